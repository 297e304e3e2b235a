//! Helix verification and detection, skid statistics and the order-point fit.

mod fit;
mod skid;

pub use fit::{fit_power_law, order_point_fit, OrderPointFit, OrderPointSample, PowerLawFit};
pub use skid::{
    calibrate_threshold, pseudo_helix_candidate, skid_scan, ResidualSummary, SkidParams, SkidStats,
};

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{EngineError, Trajectory};
use crate::numerics::{Precision, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HelixError {
    #[error("sequence has {got} terms, need at least {needed}")]
    Length { needed: usize, got: usize },
    #[error("{0}")]
    Window(String),
    #[error("residual exceeds the threshold on {:.1}% of indices; no laminar phase", .0 * 100.0)]
    NoLaminarPhase(f64),
    #[error("no skid episodes")]
    NoEpisodes,
    #[error("sample b={b} produced {episodes} episodes, need at least {needed}")]
    InsufficientEpisodes { b: String, episodes: usize, needed: usize },
    #[error("fit is degenerate: {0}")]
    FitDegenerate(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_TRANSIENT: u64 = 10_000;
pub const DEFAULT_J_MAX: usize = 64;

/// A detected constant-increment helix: u(i+j) − u(i) = c for all i in the
/// analysis window, reported with modulo r = c and multiplier m = 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HelixDescriptor {
    pub j: usize,
    pub c: Real,
    pub r: Real,
    pub m: i64,
    pub residual: Real,
    pub fractional_cycle: Vec<Real>,
}

/// Definition check: every difference seq(i+kj) − seq(i) is an integer
/// multiple of `r` (for r = 0: the sequence repeats with period j).
/// At least one pair (i, i + j) must exist.
///
/// Checking k = 1 for every i suffices, since longer differences are sums of
/// one-period differences. The tolerance is 10^−(D−5), scaled by the largest
/// magnitude in the sequence relative to |r| so that unbounded sequences are
/// judged by their significant digits.
pub fn verify_helix(seq: &[Real], j: usize, r: &Real) -> Result<bool, HelixError> {
    if j == 0 || seq.len() <= j {
        return Err(HelixError::Length { needed: j + 1, got: seq.len() });
    }
    let digits = seq.iter().map(|v| v.precision()).max().unwrap_or_default();
    let max_abs = seq.iter().map(|v| v.abs()).max().expect("nonempty");
    let one = Real::one(digits);
    let base = Real::one(digits).scale10(-(digits.digits() as i64 - 5));
    let scale = if r.is_zero() {
        Real::max_of(&one, &max_abs)
    } else {
        Real::max_of(&one, &(&max_abs / &r.abs()))
    };
    let tol = &base * &scale;
    for i in 0..seq.len() - j {
        let d = &seq[i + j] - &seq[i];
        let dev = if r.is_zero() {
            d.abs()
        } else {
            let q = &d / r;
            let nearest = (&q + &Real::parse("0.5", digits).expect("literal")).floor();
            (&q - &nearest).abs()
        };
        if dev > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lexicographically smallest rotation (compared numerically, term by term).
pub fn canonical_rotation(values: &[Real]) -> Vec<Real> {
    let n = values.len();
    let mut best = 0;
    for s in 1..n {
        let ord = (0..n)
            .map(|k| values[(s + k) % n].cmp(&values[(best + k) % n]))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal);
        if ord == Ordering::Less {
            best = s;
        }
    }
    (0..n).map(|k| values[(best + k) % n].clone()).collect()
}

/// The contiguous retained tail restricted to indices ≥ `transient`.
fn analysis_window(traj: &Trajectory, transient: u64, needed: usize) -> Result<Vec<&Real>, HelixError> {
    let vals: Vec<&Real> = traj.tail().filter(|(i, _)| *i >= transient).map(|(_, v)| v).collect();
    if vals.len() < needed {
        return Err(HelixError::Window(format!(
            "need {needed} contiguous retained terms at or after index {transient}, have {} (last index {})",
            vals.len(),
            traj.last_index()
        )));
    }
    Ok(vals)
}

/// frac values of the last j retained terms, rounded to D, in canonical rotation.
pub fn fractional_cycle(traj: &Trajectory, j: usize) -> Result<Vec<Real>, HelixError> {
    let vals = analysis_window(traj, 0, j)?;
    let d = traj.digits;
    let last: Vec<Real> = vals[vals.len() - j..].iter().map(|v| v.with_precision(d).frac()).collect();
    Ok(canonical_rotation(&last))
}

/// Smallest j ≤ j_max for which u(i+j) − u(i) stays within `tol` of its mean
/// over the retained tail past `transient`.
pub fn detect_stable_helix(
    traj: &Trajectory,
    j_max: usize,
    tol: f64,
    transient: u64,
) -> Result<Option<HelixDescriptor>, HelixError> {
    let vals = analysis_window(traj, transient, 3 * j_max)?;
    let digits = traj.digits;
    Ok(detect_in(&vals, j_max, tol, digits))
}

pub(crate) fn detect_in(vals: &[&Real], j_max: usize, tol: f64, digits: Precision) -> Option<HelixDescriptor> {
    let work = vals[0].precision();
    'period: for j in 1..=j_max {
        let n = vals.len() - j;
        let d0 = vals[j] - vals[0];
        let mut diffs = Vec::with_capacity(n);
        for i in 0..n {
            let d = vals[i + j] - vals[i];
            // Two values 2·tol apart cannot both be within tol of the mean.
            if (&d - &d0).to_f64().abs() > 2.0 * tol {
                continue 'period;
            }
            diffs.push(d);
        }
        let sum = diffs.iter().fold(Real::zero(work), |acc, d| &acc + d);
        let mean = &sum / &Real::from_i64(n as i64, work);
        let residual = diffs.iter().map(|d| (d - &mean).abs()).max().expect("nonempty");
        if residual.to_f64() > tol {
            continue;
        }
        let c = mean.with_precision(digits);
        let tail: Vec<Real> = vals[vals.len() - j..].iter().map(|v| v.with_precision(digits).frac()).collect();
        return Some(HelixDescriptor {
            j,
            r: c.clone(),
            c,
            m: 1,
            residual: residual.with_precision(Precision::new(15).expect("valid")),
            fractional_cycle: canonical_rotation(&tail),
        });
    }
    None
}
