//! Smallest eigenpair of a symmetric tridiagonal pencil `(A, M)` with
//! diagonal positive `M`: Sturm-count bisection followed by inverse iteration.

use crate::error::{Error, Result};

pub(crate) struct Pencil<'a> {
    pub diag: &'a [f64],
    /// `off[i] = A[i][i+1]`, length `diag.len() - 1`.
    pub off: &'a [f64],
    pub mass: &'a [f64],
}

pub(crate) struct Eigenpair {
    pub value: f64,
    /// Unit Euclidean norm, positive sum.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub matrix_norm: f64,
    pub iterations: usize,
}

impl Pencil<'_> {
    fn len(&self) -> usize {
        self.diag.len()
    }

    /// Number of pencil eigenvalues strictly below `sigma`: the count of
    /// negative pivots in the LDLᵀ factorization of `A - σM`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        let floor = f64::MIN_POSITIVE.sqrt();
        for i in 0..self.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / d };
            d = self.diag[i] - sigma * self.mass[i] - coupling;
            if d == 0.0 {
                d = -floor;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval of `M^{-1/2} A M^{-1/2}`.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs() / (self.mass[i - 1] * self.mass[i]).sqrt();
            }
            if i + 1 < n {
                radius += self.off[i].abs() / (self.mass[i] * self.mass[i + 1]).sqrt();
            }
            let centre = self.diag[i] / self.mass[i];
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        (lo, hi)
    }

    pub fn matrix_norm(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < self.len() {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// `(A - σM) x = rhs` by the Thomas algorithm. Only used with `σ` below
    /// the spectrum, where the matrix is positive definite.
    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut denom = self.diag[0] - sigma * self.mass[0];
        if n > 1 {
            c[0] = self.off[0] / denom;
        }
        x[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - sigma * self.mass[i] - self.off[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            x[i] = (rhs[i] - self.off[i - 1] * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        let num: f64 = ax.iter().zip(x).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().zip(self.mass).map(|(v, m)| v * v * m).sum();
        num / den
    }

    /// Smallest eigenpair. `rel_tol` bounds the bisection bracket relative to
    /// the eigenvalue magnitude; inverse iteration stops when
    /// `‖Ax - λMx‖ ≤ residual_tol·‖A‖` for unit `x`.
    pub fn smallest(&self, rel_tol: f64, residual_tol: f64, max_iter: usize) -> Result<Eigenpair> {
        let n = self.len();
        let (mut lo, mut hi) = self.bounds();
        let spread = (hi - lo).abs().max(1.0);
        lo -= 1e-3 * spread;
        hi += 1e-3 * spread;
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= rel_tol * mid.abs().max(1.0) {
                break;
            }
        }
        let norm = self.matrix_norm();
        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        let mut value = 0.5 * (lo + hi);
        for iter in 1..=max_iter {
            let rhs: Vec<f64> = x.iter().zip(self.mass).map(|(v, m)| v * m).collect();
            let mut y = self.solve_shifted(lo, &rhs);
            let len = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::NonConvergence("inverse iteration produced a degenerate vector".into()));
            }
            y.iter_mut().for_each(|v| *v /= len);
            if y.iter().sum::<f64>() < 0.0 {
                y.iter_mut().for_each(|v| *v = -*v);
            }
            x = y;
            value = self.rayleigh(&x);
            let ax = self.apply(&x);
            let residual = ax
                .iter()
                .zip(x.iter().zip(self.mass))
                .map(|(a, (v, m))| (a - value * m * v).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual <= residual_tol * norm {
                return Ok(Eigenpair {
                    value,
                    vector: x,
                    residual,
                    matrix_norm: norm,
                    iterations: iter,
                });
            }
        }
        Err(Error::NonConvergence(format!(
            "inverse iteration did not reach residual {residual_tol:.1e}·‖A‖ within {max_iter} iterations (eigenvalue estimate {value})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // -u'' on (0, π) with Dirichlet ends; discrete eigenvalues known exactly.
    #[test]
    fn discrete_dirichlet_laplacian() {
        let n = 99;
        let h = std::f64::consts::PI / (n as f64 + 1.0);
        let diag = vec![2.0 / (h * h); n];
        let off = vec![-1.0 / (h * h); n - 1];
        let mass = vec![1.0; n];
        let p = Pencil { diag: &diag, off: &off, mass: &mass };
        let exact = 4.0 / (h * h) * (h / 2.0).sin().powi(2);
        let e = p.smallest(1e-13, 1e-10, 20).unwrap();
        assert!((e.value - exact).abs() < 1e-11);
        assert!(e.vector.iter().all(|&v| v > 0.0));
        assert_eq!(p.count_below(exact * 0.999), 0);
        assert_eq!(p.count_below(exact * 1.001), 1);
    }

    #[test]
    fn generalized_mass_scales_spectrum() {
        let diag = vec![2.0, 3.0, 4.0];
        let off = vec![-1.0, -0.5];
        let p1 = Pencil { diag: &diag, off: &off, mass: &[1.0, 1.0, 1.0] };
        let p2 = Pencil { diag: &diag, off: &off, mass: &[2.0, 2.0, 2.0] };
        let a = p1.smallest(1e-14, 1e-12, 20).unwrap().value;
        let b = p2.smallest(1e-14, 1e-12, 20).unwrap().value;
        assert!((a - 2.0 * b).abs() < 1e-12);
    }

    #[test]
    fn zero_iterations_is_non_convergence() {
        let diag = vec![2.0, 2.0];
        let off = vec![-1.0];
        let p = Pencil { diag: &diag, off: &off, mass: &[1.0, 1.0] };
        assert!(matches!(p.smallest(1e-12, 1e-10, 0), Err(Error::NonConvergence(_))));
    }
}
