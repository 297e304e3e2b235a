//! Order-point estimation from the divergence of laminar lengths.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{iterate, WindowPolicy};
use crate::mapexpr::MapSpec;
use crate::numerics::{Precision, Real};

use super::{skid_scan, HelixError, SkidParams};

/// Episodes a sample must produce before its mean is trusted.
pub const MIN_EPISODES: usize = 10;

/// T(b) = C·(b* − b)^(−γ) fitted in log space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub b_star: f64,
    pub c: f64,
    pub gamma: f64,
    /// Root mean square residual of ln T.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderPointSample {
    pub b: Real,
    pub episodes: usize,
    pub mean_laminar: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderPointFit {
    #[serde(flatten)]
    pub fit: PowerLawFit,
    pub samples: Vec<OrderPointSample>,
}

/// Ordinary least squares of ln T on ln(b* − b) for a fixed b*.
/// Returns (ln C, γ, sum of squared residuals).
fn log_fit(b: &[f64], t: &[f64], b_star: f64) -> (f64, f64, f64) {
    let xs: Vec<f64> = b.iter().map(|bi| (b_star - bi).ln()).collect();
    let ys: Vec<f64> = t.iter().map(|ti| ti.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let ssr = xs.iter().zip(&ys).map(|(x, y)| (y - icept - slope * x).powi(2)).sum();
    (icept, -slope, ssr)
}

/// Fit T = C·(b* − b)^(−γ), searching b* above the largest sample.
///
/// The offset δ = b* − max(b) is scanned on a log grid from 1e-12 to 1 and
/// then refined by golden-section search on ln δ.
pub fn fit_power_law(b: &[f64], t: &[f64]) -> Result<PowerLawFit, HelixError> {
    if b.len() != t.len() || b.len() < 3 {
        return Err(HelixError::FitDegenerate("need at least three (b, T) pairs".into()));
    }
    if t.iter().any(|x| !(x.is_finite() && *x > 0.0)) || b.iter().any(|x| !x.is_finite()) {
        return Err(HelixError::FitDegenerate("laminar lengths must be positive and finite".into()));
    }
    let top = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = top - b.iter().copied().fold(f64::INFINITY, f64::min);
    if spread <= 0.0 {
        return Err(HelixError::FitDegenerate("all samples share one b".into()));
    }
    let cost = |ld: f64| log_fit(b, t, top + ld.exp()).2;
    let (lo, hi) = (1e-12f64.ln(), 0f64);
    let steps = 400;
    let grid: Vec<f64> = (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).collect();
    let best = (0..=steps).min_by(|&i, &j| cost(grid[i]).total_cmp(&cost(grid[j]))).expect("nonempty");
    let (mut x0, mut x3) = (grid[best.saturating_sub(1)], grid[(best + 1).min(steps)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = x3 - g * (x3 - x0);
    let mut x2 = x0 + g * (x3 - x0);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    while x3 - x0 > 1e-13 {
        if f1 <= f2 {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - g * (x3 - x0);
            f1 = cost(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + g * (x3 - x0);
            f2 = cost(x2);
        }
    }
    let ld = (x0 + x3) / 2.0;
    let b_star = top + ld.exp();
    let (lnc, gamma, ssr) = log_fit(b, t, b_star);
    Ok(PowerLawFit { b_star, c: lnc.exp(), gamma, residual: (ssr / b.len() as f64).sqrt() })
}

/// Mean laminar length at each b, then the power-law fit. Samples run in
/// parallel; results are merged in input order.
#[allow(clippy::too_many_arguments)]
pub fn order_point_fit(
    map: &MapSpec,
    b_samples: &[Real],
    a: &Real,
    n: u64,
    digits: Precision,
    j: usize,
    c: f64,
    params: &SkidParams,
) -> Result<OrderPointFit, HelixError> {
    let samples: Vec<Result<OrderPointSample, HelixError>> = b_samples
        .par_iter()
        .map(|b| {
            let p: BTreeMap<String, Real> = [("b".to_string(), b.clone())].into_iter().collect();
            let traj = iterate(map, a, &p, n, digits, WindowPolicy::tail(0).with_full_frac())?;
            let fs = traj.frac_stream().expect("full-frac policy");
            let stats = skid_scan(fs, j, c, params)?;
            let episodes = stats.episodes.len();
            match stats.mean_laminar {
                Some(m) if episodes >= MIN_EPISODES => {
                    Ok(OrderPointSample { b: b.clone(), episodes, mean_laminar: m })
                }
                _ => Err(HelixError::InsufficientEpisodes { b: b.to_string(), episodes, needed: MIN_EPISODES }),
            }
        })
        .collect();
    let mut samples = samples.into_iter().collect::<Result<Vec<_>, _>>()?;
    samples.sort_by(|x, y| x.b.cmp(&y.b));
    if samples.windows(2).any(|w| w[1].mean_laminar <= w[0].mean_laminar) {
        return Err(HelixError::FitDegenerate("mean laminar length is not increasing in b".into()));
    }
    let bs: Vec<f64> = samples.iter().map(|s| s.b.to_f64()).collect();
    let ts: Vec<f64> = samples.iter().map(|s| s.mean_laminar).collect();
    Ok(OrderPointFit { fit: fit_power_law(&bs, &ts)?, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_synthetic_power_law() {
        let (bs, c, g): (f64, f64, f64) = (0.8872564, 0.37, 0.51);
        let b = [0.8870, 0.8871, 0.8872, 0.88725, 0.887256];
        let t: Vec<f64> = b.iter().map(|x| c * (bs - x).powf(-g)).collect();
        let f = fit_power_law(&b, &t).unwrap();
        assert!(((f.b_star - bs) / bs).abs() < 1e-6, "{f:?}");
        assert!(((f.c - c) / c).abs() < 1e-6, "{f:?}");
        assert!(((f.gamma - g) / g).abs() < 1e-6, "{f:?}");
        assert!(f.residual < 1e-6);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_power_law(&[1.0, 2.0], &[1.0, 2.0]), Err(HelixError::FitDegenerate(_))));
        assert!(matches!(fit_power_law(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(HelixError::FitDegenerate(_))));
        assert!(matches!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]), Err(HelixError::FitDegenerate(_))));
    }
}
