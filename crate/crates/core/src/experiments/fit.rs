//! Growth-exponent fits against `log(1/eps)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub alpha: f64,
    pub c: f64,
    /// Additive offset; zero for the plain fit.
    pub offset: f64,
    /// RMS residual, in log space for the plain fit and in value space for
    /// the offset fit.
    pub residual: f64,
}

fn regressor(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok((1.0 / eps).ln())
}

/// Ordinary least squares `y = p + q x`; returns `(p, q, rss)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let q = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let p = my - q * mx;
    let rss = x.iter().zip(y).map(|(a, b)| (b - p - q * a).powi(2)).sum();
    (p, q, rss)
}

/// `log value = log c + alpha log log(1/eps)` by least squares.
pub fn fit_log_exponent(pairs: &[(f64, f64)]) -> Result<Fit> {
    if pairs.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 (eps, value) pairs, got {}",
            pairs.len()
        )));
    }
    let mut x = Vec::with_capacity(pairs.len());
    let mut y = Vec::with_capacity(pairs.len());
    for &(eps, v) in pairs {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("values must be positive, got {v}")));
        }
        x.push(regressor(eps)?.ln());
        y.push(v.ln());
    }
    let (p, q, rss) = linear_fit(&x, &y);
    Ok(Fit {
        alpha: q,
        c: p.exp(),
        offset: 0.0,
        residual: (rss / pairs.len() as f64).sqrt(),
    })
}

const ALPHA_RANGE: (f64, f64) = (-1.0, 2.0);

/// `value = c log(1/eps)^alpha + d`. For fixed `alpha` the model is linear
/// in `(c, d)`; the residual is minimized over `alpha` by a grid scan
/// followed by golden-section refinement. Needs at least 4 pairs.
pub fn fit_log_exponent_offset(pairs: &[(f64, f64)]) -> Result<Fit> {
    if pairs.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "the offset fit needs at least 4 pairs, got {}",
            pairs.len()
        )));
    }
    let mut l = Vec::with_capacity(pairs.len());
    let mut y = Vec::with_capacity(pairs.len());
    for &(eps, v) in pairs {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite value {v}")));
        }
        l.push(regressor(eps)?);
        y.push(v);
    }
    let rss = |alpha: f64| {
        let x: Vec<f64> = l.iter().map(|v| v.powf(alpha)).collect();
        linear_fit(&x, &y)
    };
    let steps = 300;
    let (lo, hi) = ALPHA_RANGE;
    let h = (hi - lo) / steps as f64;
    let mut best = lo;
    let mut best_rss = f64::INFINITY;
    for k in 0..=steps {
        let a = lo + k as f64 * h;
        let r = rss(a).2;
        if r < best_rss {
            best_rss = r;
            best = a;
        }
    }
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if rss(x1).2 < rss(x2).2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let alpha = 0.5 * (a + b);
    let (d, c, r) = rss(alpha);
    Ok(Fit {
        alpha,
        c,
        offset: d,
        residual: (r / pairs.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::divergent_integral;

    fn eps_grid() -> Vec<f64> {
        (1..=8).map(|k| 10f64.powi(-k)).collect()
    }

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = eps_grid().iter().map(|&e| (e, (1.0 / e).ln().powf(0.25))).collect();
        let f = fit_log_exponent(&pairs).unwrap();
        assert!((f.alpha - 0.25).abs() < 1e-6 && (f.c - 1.0).abs() < 1e-6 && f.residual < 1e-9);
        let flat: Vec<(f64, f64)> = eps_grid().iter().map(|&e| (e, 3.0)).collect();
        let f = fit_log_exponent(&flat).unwrap();
        assert!(f.alpha.abs() < 1e-6 && (f.c - 3.0).abs() < 1e-9);
    }

    #[test]
    fn divergent_integral_rate() {
        // (log 1/delta)^{1 - beta} growth for beta = 0.75, with the constant
        // (log 2)^{1-beta} offset removed by the offset fit
        let pairs: Vec<(f64, f64)> = eps_grid()
            .iter()
            .map(|&d| (d, divergent_integral(0.75, d.min(0.25)).unwrap()))
            .collect();
        let f = fit_log_exponent_offset(&pairs).unwrap();
        assert!((f.alpha - 0.25).abs() < 0.03, "alpha {}", f.alpha);
        let g = fit_log_exponent(&pairs).unwrap();
        assert!(g.alpha > 0.25, "plain fit alpha {}", g.alpha);
    }

    #[test]
    fn offset_model_recovered() {
        let pairs: Vec<(f64, f64)> = eps_grid()
            .iter()
            .map(|&e| (e, -0.7 * (1.0 / e).ln().powf(0.4) + 1.3))
            .collect();
        let f = fit_log_exponent_offset(&pairs).unwrap();
        assert!((f.alpha - 0.4).abs() < 1e-6 && (f.c + 0.7).abs() < 1e-5 && (f.offset - 1.3).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_log_exponent(&[(0.1, 1.0), (0.01, 2.0)]).is_err());
        assert!(fit_log_exponent(&[(0.1, 1.0), (0.01, -2.0), (0.001, 3.0)]).is_err());
        assert!(fit_log_exponent(&[(0.1, 1.0), (0.01, 0.0), (0.001, 3.0)]).is_err());
        assert!(fit_log_exponent(&[(1.5, 1.0), (0.01, 1.0), (0.001, 3.0)]).is_err());
        assert!(fit_log_exponent_offset(&[(0.1, 1.0), (0.01, 2.0), (0.001, 3.0)]).is_err());
    }
}
