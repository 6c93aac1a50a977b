//! Run configuration: flags merged over an optional `key = value` file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use warpspec::{Error, Result};

const KEYS: [&str; 13] = [
    "n",
    "kappa",
    "lambda",
    "metric",
    "schedule",
    "suite",
    "perturbation",
    "amplitudes",
    "points",
    "out",
    "format",
    "csv",
    "max_iter",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "path")]
pub enum MetricSource {
    Model,
    Round,
    File(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ClosedForm,
    FOde,
    XiOde,
    Mu,
    ModelRelations,
    Eigenfunction,
    Drift,
}

impl Suite {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "closed-form" => Suite::ClosedForm,
            "f-ode" => Suite::FOde,
            "xi-ode" => Suite::XiOde,
            "mu" => Suite::Mu,
            "model-relations" => Suite::ModelRelations,
            "eigenfunction" => Suite::Eigenfunction,
            "drift" => Suite::Drift,
            other => return Err(bad(format!("unknown suite '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Perturbation {
    AngularScale,
    Stretch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleSpec {
    pub n_nodes: Vec<usize>,
    /// `ε / T` for each truncation level.
    pub eps_fractions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub kappa: f64,
    pub lambda: f64,
    pub metric: MetricSource,
    pub schedule: ScheduleSpec,
    pub suite: Option<Suite>,
    pub perturbation: Perturbation,
    pub amplitudes: Vec<f64>,
    pub points: Option<usize>,
    pub out: Option<String>,
    pub format: Format,
    pub csv: Option<String>,
    pub max_iter: usize,
    pub tolerances: BTreeMap<String, f64>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Reads `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key = value, got '{line}'") })?;
        let key = k.trim().replace('-', "_");
        if key.is_empty() {
            return Err(Error::Parse { line: i + 1, msg: "empty key".into() });
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Parse { line: i + 1, msg: format!("duplicate key '{key}'") });
        }
    }
    Ok(out)
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|_| bad(format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(bad(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim().parse().map_err(|_| bad(format!("{key}: '{v}' is not a non-negative integer")))
}

fn parse_list<T>(v: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).map(f).collect()
}

/// `"256,512,1024:T/50,T/100,T/200"`; truncations are `T/k` or plain fractions of `T`.
pub fn parse_schedule(v: &str) -> Result<ScheduleSpec> {
    let (nodes, eps) = v
        .split_once(':')
        .ok_or_else(|| bad(format!("schedule '{v}' must look like N1,N2,N3:T/50,T/100")))?;
    let n_nodes = parse_list(nodes, |s| parse_usize("schedule", s))?;
    let eps_fractions = parse_list(eps, |s| {
        if let Some(d) = s.strip_prefix("T/") {
            let k = parse_f64("schedule", d)?;
            if k <= 0.0 {
                return Err(bad("schedule: T/k needs k > 0"));
            }
            Ok(1.0 / k)
        } else {
            parse_f64("schedule", s)
        }
    })?;
    let spec = ScheduleSpec { n_nodes, eps_fractions };
    spec.to_schedule().validate()?;
    Ok(spec)
}

impl ScheduleSpec {
    pub fn to_schedule(&self) -> warpspec::Schedule {
        warpspec::Schedule {
            n_nodes: self.n_nodes.clone(),
            eps_fractions: self.eps_fractions.clone(),
        }
    }
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        let s = warpspec::Schedule::default();
        ScheduleSpec {
            n_nodes: s.n_nodes,
            eps_fractions: s.eps_fractions,
        }
    }
}

impl RunConfig {
    /// Builds a configuration from merged raw settings; `tol` holds
    /// `name=value` overrides. Unknown keys are rejected.
    pub fn from_settings(command: &str, settings: &BTreeMap<String, String>, tol: &[String]) -> Result<Self> {
        let mut tolerances = BTreeMap::new();
        for (k, v) in settings {
            if let Some(name) = k.strip_prefix("tol.") {
                tolerances.insert(name.to_string(), parse_tol(name, v)?);
            } else if !KEYS.contains(&k.as_str()) {
                return Err(bad(format!("unknown configuration key '{k}'")));
            }
        }
        for t in tol {
            let (name, v) = t.split_once('=').ok_or_else(|| bad(format!("--tol expects name=value, got '{t}'")))?;
            tolerances.insert(name.trim().to_string(), parse_tol(name, v)?);
        }
        let get = |k: &str| settings.get(k).map(String::as_str);
        let n = get("n").map(|v| parse_usize("n", v)).transpose()?.unwrap_or(3);
        if n < 3 {
            return Err(bad(format!("n must be at least 3, got {n}")));
        }
        let kappa = get("kappa").map(|v| parse_f64("kappa", v)).transpose()?.unwrap_or(1.0);
        let lambda = get("lambda").map(|v| parse_f64("lambda", v)).transpose()?.unwrap_or(6.0);
        // shares the library's domain checks
        warpspec::SpectralParams::new(kappa, lambda)?;
        let metric = match get("metric").unwrap_or("model") {
            "model" => MetricSource::Model,
            "round" => MetricSource::Round,
            other => match other.strip_prefix("file:") {
                Some(p) if !p.is_empty() => MetricSource::File(p.to_string()),
                _ => return Err(bad(format!("metric must be model, round or file:<path>, got '{other}'"))),
            },
        };
        let schedule = get("schedule").map(parse_schedule).transpose()?.unwrap_or_default();
        let suite = get("suite").map(Suite::parse).transpose()?;
        let perturbation = match get("perturbation").unwrap_or("angular-scale") {
            "angular-scale" => Perturbation::AngularScale,
            "stretch" => Perturbation::Stretch,
            other => return Err(bad(format!("unknown perturbation '{other}'"))),
        };
        let amplitudes = match get("amplitudes") {
            Some(v) => parse_list(v, |s| parse_f64("amplitudes", s))?,
            None => vec![0.0, 0.01, 0.05, 0.1],
        };
        if amplitudes.is_empty() || amplitudes.iter().any(|&a| a < 0.0) {
            return Err(bad("amplitudes must be a non-empty list of values >= 0"));
        }
        let points = get("points").map(|v| parse_usize("points", v)).transpose()?;
        if points.is_some_and(|p| p < 4) {
            return Err(bad("points must be at least 4"));
        }
        let format = match get("format").unwrap_or("json") {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => return Err(bad(format!("format must be json or csv, got '{other}'"))),
        };
        let max_iter = get("max_iter").map(|v| parse_usize("max_iter", v)).transpose()?.unwrap_or(50);
        Ok(RunConfig {
            command: command.to_string(),
            n,
            kappa,
            lambda,
            metric,
            schedule,
            suite,
            perturbation,
            amplitudes,
            points,
            out: get("out").map(str::to_string),
            format,
            csv: get("csv").map(str::to_string),
            max_iter,
            tolerances,
        })
    }
}

fn parse_tol(name: &str, v: &str) -> Result<f64> {
    let x = parse_f64(&format!("tol.{name}"), v)?;
    if x < 0.0 {
        return Err(bad(format!("tolerance {name} must be non-negative")));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn schedule_syntax() {
        let s = parse_schedule("256,512,1024:T/50,T/100,0.005").unwrap();
        assert_eq!(s.n_nodes, vec![256, 512, 1024]);
        assert_eq!(s.eps_fractions, vec![0.02, 0.01, 0.005]);
        assert!(parse_schedule("256,512:T/50").is_err());
        assert!(parse_schedule("256,512,1024").is_err());
        assert!(parse_schedule("256,512,1024:T/2").is_err());
    }

    #[test]
    fn config_text_and_unknown_keys() {
        let m = parse_config_text("# sweep\nn = 4\nkappa=0.5 # trailing\n\ntol.observed_order = 0.2\n").unwrap();
        let c = RunConfig::from_settings("lambda-c", &m, &[]).unwrap();
        assert_eq!((c.n, c.kappa), (4, 0.5));
        assert_eq!(c.tolerances["observed_order"], 0.2);
        assert!(RunConfig::from_settings("x", &settings(&[("colour", "red")]), &[]).is_err());
        assert!(parse_config_text("n 3").is_err());
        assert!(parse_config_text("n = 3\nn = 4").is_err());
    }

    #[test]
    fn domain_checks() {
        assert!(RunConfig::from_settings("x", &settings(&[("kappa", "4")]), &[]).is_err());
        assert!(RunConfig::from_settings("x", &settings(&[("n", "2")]), &[]).is_err());
        assert!(RunConfig::from_settings("x", &settings(&[("metric", "file:")]), &[]).is_err());
        assert!(RunConfig::from_settings("x", &settings(&[("amplitudes", "0,-0.1")]), &[]).is_err());
        assert!(RunConfig::from_settings("x", &settings(&[]), &["bad".into()]).is_err());
    }
}
