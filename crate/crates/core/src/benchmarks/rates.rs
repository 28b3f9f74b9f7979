//! Least-squares convergence rates.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    /// RMS deviation of `log e` from the fitted line.
    pub residual: f64,
}

pub const RATE_FIT_POINTS: usize = 3;

/// Slope of `log e` against `log h` over the `RATE_FIT_POINTS` smallest `h`.
pub fn fit_rate(h: &[f64], e: &[f64]) -> Result<RateFit> {
    if h.len() != e.len() {
        return Err(Error::DimensionMismatch(format!("{} sizes, {} errors", h.len(), e.len())));
    }
    if h.len() < RATE_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "need at least {RATE_FIT_POINTS} ladder points, got {}",
            h.len()
        )));
    }
    let mut pts: Vec<(f64, f64)> = h.iter().copied().zip(e.iter().copied()).collect();
    if pts.iter().any(|&(h, e)| !(h > 0.0 && e > 0.0)) {
        return Err(Error::InvalidArgument("rates need positive sizes and errors".into()));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.truncate(RATE_FIT_POINTS);
    fit_all(&pts)
}

fn fit_all(pts: &[(f64, f64)]) -> Result<RateFit> {
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidArgument("ladder sizes are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let rate = sxy / sxx;
    let c = my - rate * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - c - rate * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateFit { rate, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn ladder() -> Vec<f64> {
        (0..5).map(|k| 0.5f64.powi(k)).collect()
    }

    #[test]
    fn exact_powers() {
        let h = ladder();
        for p in [1.0, 2.0] {
            let e: Vec<f64> = h.iter().map(|h| 3.0 * h.powf(p)).collect();
            let f = fit_rate(&h, &e).unwrap();
            assert!((f.rate - p).abs() < 1e-12);
            assert!(f.residual < 1e-12);
        }
    }

    #[test]
    fn noisy_quadratic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = ladder();
        for _ in 0..50 {
            let e: Vec<f64> = h
                .iter()
                .map(|h| h * h * (1.0 + rng.random_range(-0.05..0.05)))
                .collect();
            let f = fit_rate(&h, &e).unwrap();
            assert!((f.rate - 2.0).abs() < 0.1, "{}", f.rate);
        }
    }

    #[test]
    fn uses_finest_points() {
        let h = [1.0, 0.5, 0.25, 0.125];
        let e = [100.0, 0.25, 0.0625, 0.015625];
        assert!((fit_rate(&h, &e).unwrap().rate - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_rate(&[1.0, 0.5], &[1.0, 0.5]).is_err());
        assert!(fit_rate(&[1.0, 0.5, 0.2], &[1.0, 0.0, 0.1]).is_err());
        assert!(fit_rate(&[1.0, 0.5, 0.2], &[1.0, 0.5]).is_err());
    }
}
