use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::engine::{Failure, System};
use crate::numerics::{Precision, Real};

use super::ChaosError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceOptions {
    /// Last index computed.
    pub n: u64,
    /// Checkpoint spacing.
    pub stride: u64,
    /// λ in the limsup criterion.
    pub lambda: f64,
    /// Start of the range reported as `max_d_after_transient`.
    pub transient: u64,
}

impl Default for DivergenceOptions {
    fn default() -> Self {
        DivergenceOptions { n: 100_000, stride: 1000, lambda: 0.5, transient: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergencePoint {
    pub n: u64,
    pub u_a: Real,
    pub u_b: Real,
    /// u_a − u_b.
    pub diff: Real,
}

/// Least-squares slope of ln(max so far D) against ln n over the checkpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthTrend {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub system: String,
    pub params: BTreeMap<String, Real>,
    pub digits: u32,
    pub a: Real,
    pub epsilon: Real,
    pub options: DivergenceOptions,
    pub checkpoints: Vec<DivergencePoint>,
    /// limsup proxy: max D(n) over every computed n.
    pub max_d: Real,
    /// liminf proxy: min D(n) over n ≥ N/2 (absent if the run stopped before N/2).
    pub min_d_tail: Option<Real>,
    pub max_d_after_transient: Option<Real>,
    pub max_d_reaches_lambda: bool,
    pub sign_changes: u64,
    pub lambda_threshold: f64,
    pub growth: Option<GrowthTrend>,
    pub failure: Option<Failure>,
}

impl DivergenceReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,u_a,u_b,diff")?;
        for p in &self.checkpoints {
            writeln!(out, "{},{},{},{}", p.n, p.u_a, p.u_b, p.diff)?;
        }
        Ok(())
    }
}

fn growth_trend(points: &[(f64, f64)]) -> Option<GrowthTrend> {
    let m = points.len();
    if m < 3 {
        return None;
    }
    let mf = m as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Some(GrowthTrend { slope, stderr: (ssr / (mf - 2.0) / sxx).sqrt(), points: m })
}

/// Runs the orbits of a and a + ε in lockstep and summarises D(n) = |u_a(n) − u_{a+ε}(n)|.
///
/// ε = 0 is accepted (both orbits coincide). If either orbit fails, the
/// report covers the steps before the failure and records it.
pub fn divergence_probe(
    system: &System,
    a: &Real,
    epsilon: &Real,
    params: &BTreeMap<String, Real>,
    digits: Precision,
    opts: &DivergenceOptions,
) -> Result<DivergenceReport, ChaosError> {
    if opts.stride == 0 {
        return Err(ChaosError::InvalidArgument("checkpoint stride must be positive".into()));
    }
    let mut oa = system.orbit(a, params, digits)?;
    let work = oa.work_precision();
    let b0 = &a.with_precision(work) + &epsilon.with_precision(work);
    let mut ob = system.orbit(&b0, params, digits)?;
    let first = oa.first_index();
    if opts.n < first {
        return Err(ChaosError::InvalidArgument(format!("N must be at least {first}")));
    }
    let half = opts.n.div_ceil(2);
    let mut checkpoints = Vec::new();
    let mut max_d = Real::zero(work);
    let mut min_tail: Option<Real> = None;
    let mut max_after: Option<Real> = None;
    let mut sign_changes = 0u64;
    let mut last_sign = 0;
    let mut trend = Vec::new();
    let mut failure = None;
    loop {
        let n = oa.index();
        let diff = oa.value() - ob.value();
        let d = diff.abs();
        let s = diff.signum();
        if s != 0 {
            if last_sign != 0 && s != last_sign {
                sign_changes += 1;
            }
            last_sign = s;
        }
        if d > max_d {
            max_d = d.clone();
        }
        if n >= half && min_tail.as_ref().map_or(true, |m| d < *m) {
            min_tail = Some(d.clone());
        }
        if n >= opts.transient && max_after.as_ref().map_or(true, |m| d > *m) {
            max_after = Some(d.clone());
        }
        if n == first || n % opts.stride == 0 || n == opts.n {
            checkpoints.push(DivergencePoint {
                n,
                u_a: oa.value().with_precision(digits),
                u_b: ob.value().with_precision(digits),
                diff: diff.with_precision(digits),
            });
            if n >= 1 && !max_d.is_zero() {
                trend.push(((n as f64).ln(), max_d.log10_abs() * std::f64::consts::LN_10));
            }
        }
        if n >= opts.n {
            break;
        }
        let step = oa.step().map(|_| ()).and_then(|_| ob.step().map(|_| ()));
        if let Err(error) = step {
            failure = Some(Failure { index: n + 1, error });
            break;
        }
    }
    let lambda = Real::from_f64(opts.lambda, digits).map_err(|e| ChaosError::InvalidArgument(e.to_string()))?;
    Ok(DivergenceReport {
        system: system.name().to_string(),
        params: params.clone(),
        digits: digits.digits(),
        a: a.with_precision(digits),
        epsilon: epsilon.with_precision(digits),
        options: *opts,
        checkpoints,
        max_d_reaches_lambda: max_d >= lambda,
        max_d: max_d.with_precision(digits),
        min_d_tail: min_tail.map(|m| m.with_precision(digits)),
        max_d_after_transient: max_after.map(|m| m.with_precision(digits)),
        sign_changes,
        lambda_threshold: opts.lambda,
        growth: growth_trend(&trend),
        failure,
    })
}
