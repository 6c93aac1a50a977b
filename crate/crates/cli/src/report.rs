//! Machine-readable report bundle and verdict bookkeeping.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::Value;
use warpspec::{Error, Result};

/// Shortest round-trip decimal, as in the JSON output; `nan`/`inf` spelled out.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        serde_json::Value::from(x).to_string()
    } else {
        x.to_string()
    }
}

/// How a measured value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
}

impl Verdict {
    pub fn new(measured: f64, comparison: Comparison, threshold: f64) -> Self {
        let pass = match comparison {
            Comparison::Below => measured < threshold,
            Comparison::Above => measured > threshold,
        };
        Verdict { pass, measured, threshold, comparison }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub config: Value,
    pub results: Value,
    pub diagnostics: Value,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl ReportBundle {
    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }

    /// `name,pass,measured,comparison,threshold` rows.
    pub fn verdicts_csv(&self) -> String {
        let mut s = String::from("name,pass,measured,comparison,threshold\n");
        for (k, v) in &self.verdicts {
            let cmp = match v.comparison {
                Comparison::Below => "<",
                Comparison::Above => ">",
            };
            s.push_str(&format!("{k},{},{},{cmp},{}\n", v.pass, fmt_num(v.measured), fmt_num(v.threshold)));
        }
        s
    }
}

/// Collects verdicts, applying user threshold overrides by name and
/// remembering which overrides were consumed.
pub struct Verdicts<'a> {
    overrides: &'a BTreeMap<String, f64>,
    used: RefCell<BTreeSet<String>>,
    pub map: BTreeMap<String, Verdict>,
}

impl<'a> Verdicts<'a> {
    pub fn new(overrides: &'a BTreeMap<String, f64>) -> Self {
        Verdicts {
            overrides,
            used: RefCell::new(BTreeSet::new()),
            map: BTreeMap::new(),
        }
    }

    /// Threshold for `family`, honoring an override of the same name.
    pub fn threshold(&self, family: &str, default: f64) -> f64 {
        match self.overrides.get(family) {
            Some(&v) => {
                self.used.borrow_mut().insert(family.to_string());
                v
            }
            None => default,
        }
    }

    pub fn below(&mut self, name: &str, family: &str, measured: f64, default: f64) -> bool {
        let t = self.threshold(family, default);
        self.push(name, Verdict::new(measured, Comparison::Below, t))
    }

    pub fn above(&mut self, name: &str, family: &str, measured: f64, default: f64) -> bool {
        let t = self.threshold(family, default);
        self.push(name, Verdict::new(measured, Comparison::Above, t))
    }

    fn push(&mut self, name: &str, v: Verdict) -> bool {
        let pass = v.pass;
        self.map.insert(name.to_string(), v);
        pass
    }

    /// Rejects overrides that named no threshold of this command.
    pub fn finish(self) -> Result<BTreeMap<String, Verdict>> {
        let used = self.used.into_inner();
        if let Some(k) = self.overrides.keys().find(|k| !used.contains(*k)) {
            return Err(Error::InvalidInput(format!("tolerance '{k}' does not apply to this command")));
        }
        Ok(self.map)
    }
}
