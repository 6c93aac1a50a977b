//! Scale-free residuals for identities written as a sum of terms equal to zero.

/// `|Σ terms| / Σ |terms|`, which lies in `[0, 1]`. Zero when every term vanishes.
///
/// Identities near the closed ends of a warp involve terms that grow like
/// `t⁻²`; normalizing by the term magnitudes makes one threshold meaningful
/// across the whole interior.
pub fn balance(terms: &[f64]) -> f64 {
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if scale == 0.0 {
        return 0.0;
    }
    if !scale.is_finite() {
        // an infinite coefficient dominates every finite term
        return 1.0;
    }
    (terms.iter().sum::<f64>().abs() / scale).min(1.0)
}

/// Largest [`balance`] over a family of pointwise identities.
pub fn max_balance<I>(rows: I) -> f64
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    rows.into_iter().map(|r| balance(r.as_ref())).fold(0.0, f64::max)
}
