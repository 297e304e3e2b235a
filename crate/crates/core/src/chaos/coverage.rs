use serde::Serialize;

use crate::engine::FracStream;

use super::ChaosError;

/// Which of K equal bins of [0, r) the values u(n) mod r visited.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub r: f64,
    pub k: usize,
    /// One character per bin, `1` for visited.
    pub visited: String,
    pub coverage: f64,
    pub first_hit: Vec<Option<u64>>,
    /// Indices skip..=n were examined.
    pub skip: u64,
    pub n: u64,
}

/// Bins u(n) mod r for skip ≤ n ≤ `n` (clamped to the stream).
pub fn transitivity_mod_r(fs: &FracStream, r: f64, k: usize, n: u64, skip: u64) -> Result<CoverageReport, ChaosError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(ChaosError::InvalidArgument("modulo r must be positive".into()));
    }
    if k < 2 {
        return Err(ChaosError::InvalidArgument("need at least two bins".into()));
    }
    if fs.is_empty() {
        return Err(ChaosError::InvalidArgument("no full-resolution values retained".into()));
    }
    let mut first_hit = vec![None; k];
    let lo = fs.start().max(skip);
    let hi = fs.end().min(n);
    for i in lo..=hi {
        let (fl, fr) = fs.get(i).expect("in range");
        let m = if r == 1.0 { fr } else { ((fl as f64).rem_euclid(r) + fr).rem_euclid(r) };
        let bin = ((m / r * k as f64) as usize).min(k - 1);
        first_hit[bin].get_or_insert(i);
    }
    let hits = first_hit.iter().filter(|h| h.is_some()).count();
    Ok(CoverageReport {
        r,
        k,
        visited: first_hit.iter().map(|h| if h.is_some() { '1' } else { '0' }).collect(),
        coverage: hits as f64 / k as f64,
        first_hit,
        skip,
        n,
    })
}
