use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{Orbit, System};
use crate::mapexpr::{EvalError, LSystemSpec};
use crate::numerics::{Precision, Real};

use super::ChaosError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleFailure {
    pub sample: usize,
    pub lambda: Real,
    pub index: u64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LsysProbeReport {
    /// Smallest k ≤ k_max with w_λ(k) ∈ V for a sampled λ.
    pub k: Option<u64>,
    pub witness: Option<Real>,
    pub u: (Real, Real),
    pub v: (Real, Real),
    pub k_max: u64,
    /// Distinct grid points actually run.
    pub samples: usize,
    pub failures: Vec<SampleFailure>,
}

/// Outcome of one orbit: first index in V (if any) and where it failed (if it did).
#[derive(Clone)]
struct Outcome {
    hit: Option<u64>,
    failure: Option<(u64, EvalError)>,
}

fn grid(lo: &Real, hi: &Real, samples: usize) -> Vec<Real> {
    let mut out: Vec<Real> = Vec::with_capacity(samples);
    let span = hi - lo;
    for i in 0..samples {
        let p = if samples == 1 {
            lo.clone()
        } else {
            let t = &Real::from_i64(i as i64, lo.precision()) / &Real::from_i64(samples as i64 - 1, lo.precision());
            lo + &(&span * &t)
        };
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    out
}

/// Probe of transitivity relative to an L-system: does some orbit started in
/// U reach V within k_max letters? A `None` is evidence, not proof.
///
/// U is sampled on a uniform grid. Once an orbit's working value equals the
/// first sample's orbit at the same step, its future is that orbit's future,
/// so the rest is read off the reference instead of recomputed.
#[allow(clippy::too_many_arguments)]
pub fn lsys_transitivity_probe(
    spec: &LSystemSpec,
    params: &BTreeMap<String, Real>,
    u: (&Real, &Real),
    v: (&Real, &Real),
    k_max: u64,
    samples: usize,
    digits: Precision,
) -> Result<LsysProbeReport, ChaosError> {
    if samples == 0 {
        return Err(ChaosError::InvalidArgument("need at least one sample".into()));
    }
    if u.0 > u.1 || v.0 > v.1 {
        return Err(ChaosError::InvalidArgument("intervals must satisfy lo ≤ hi".into()));
    }
    let work = digits.guarded();
    let lambdas = grid(&u.0.with_precision(work), &u.1.with_precision(work), samples);
    let (v_lo, v_hi) = (v.0.with_precision(work), v.1.with_precision(work));
    let inside = |x: &Real| *x >= v_lo && *x <= v_hi;
    let template = System::LSystem(spec.clone()).orbit(&lambdas[0], params, digits)?;

    // Reference orbit from the first sample, with next-hit lookups.
    let mut reference: Vec<Real> = Vec::new();
    let mut orbit = template.clone();
    let mut ref_fail = None;
    while orbit.index() < k_max {
        match orbit.step() {
            Ok(x) => reference.push(x.clone()),
            Err(e) => {
                ref_fail = Some((orbit.index() + 1, e));
                break;
            }
        }
    }
    // next_hit[i] = first k ≥ i + 1 with reference value in V.
    let mut next_hit = vec![None; reference.len() + 1];
    for i in (0..reference.len()).rev() {
        next_hit[i] = if inside(&reference[i]) { Some(i as u64 + 1) } else { next_hit[i + 1] };
    }
    let ref_outcome = Outcome { hit: next_hit[0], failure: ref_fail.clone() };

    let run = |lam: &Real| -> Outcome {
        let mut o: Orbit = template.resume(&crate::engine::Checkpoint { index: 0, value: lam.clone() });
        while o.index() < k_max {
            match o.step() {
                Ok(_) => {
                    let (k, x) = (o.index(), o.value());
                    if inside(x) {
                        return Outcome { hit: Some(k), failure: None };
                    }
                    if reference.get(k as usize - 1) == Some(x) {
                        return Outcome { hit: next_hit[k as usize], failure: ref_fail.clone() };
                    }
                }
                Err(e) => return Outcome { hit: None, failure: Some((o.index() + 1, e)) },
            }
        }
        Outcome { hit: None, failure: None }
    };
    let outcomes: Vec<Outcome> = std::iter::once(ref_outcome)
        .chain(lambdas[1..].par_iter().map(run).collect::<Vec<_>>())
        .collect();

    let mut best: Option<(u64, usize)> = None;
    let mut failures = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(k) = o.hit {
            if best.map_or(true, |(bk, _)| k < bk) {
                best = Some((k, i));
            }
        }
        if let Some((index, e)) = &o.failure {
            failures.push(SampleFailure {
                sample: i,
                lambda: lambdas[i].with_precision(digits),
                index: *index,
                error: e.to_string(),
            });
        }
    }
    Ok(LsysProbeReport {
        k: best.map(|b| b.0),
        witness: best.map(|b| lambdas[b.1].with_precision(digits)),
        u: (u.0.with_precision(digits), u.1.with_precision(digits)),
        v: (v.0.with_precision(digits), v.1.with_precision(digits)),
        k_max,
        samples: lambdas.len(),
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairAttraction {
    pub a: Real,
    pub b: Real,
    /// Smallest n after which every computed gap stayed below the tolerance.
    pub n_epsilon: Option<u64>,
    pub max_gap: Real,
    pub final_gap: Real,
    /// Last index at which both orbits were defined.
    pub compared_to: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttractionReport {
    pub system: String,
    pub tolerance: Real,
    pub n: u64,
    pub converged: bool,
    pub pairs: Vec<PairAttraction>,
    pub failures: Vec<SampleFailure>,
}

/// Lockstep orbits from each initial value; for every pair, the index from
/// which the gap stays below `tolerance` up to N.
pub fn mutual_attraction_check(
    system: &System,
    a_list: &[Real],
    params: &BTreeMap<String, Real>,
    n: u64,
    tolerance: &Real,
    digits: Precision,
) -> Result<AttractionReport, ChaosError> {
    if a_list.len() < 2 {
        return Err(ChaosError::InvalidArgument("need at least two initial values".into()));
    }
    let mut orbits = a_list.iter().map(|a| system.orbit(a, params, digits)).collect::<Result<Vec<_>, _>>()?;
    let first = orbits[0].first_index();
    let tol = tolerance.with_precision(orbits[0].work_precision());
    let mut alive: Vec<bool> = vec![true; orbits.len()];
    let mut failures = Vec::new();
    let pairs: Vec<(usize, usize)> =
        (0..a_list.len()).flat_map(|i| (i + 1..a_list.len()).map(move |j| (i, j))).collect();
    // Per pair: last index with gap ≥ tol, max gap, final gap, last compared index.
    let mut state: Vec<(Option<u64>, Real, Real, u64)> =
        pairs.iter().map(|_| (None, Real::zero(tol.precision()), Real::zero(tol.precision()), first)).collect();
    let mut idx = first;
    loop {
        for (p, &(i, j)) in pairs.iter().enumerate() {
            if !(alive[i] && alive[j]) {
                continue;
            }
            let gap = (orbits[i].value() - orbits[j].value()).abs();
            let st = &mut state[p];
            if gap >= tol {
                st.0 = Some(idx);
            }
            if gap > st.1 {
                st.1 = gap.clone();
            }
            st.2 = gap;
            st.3 = idx;
        }
        if idx >= n || !alive.iter().any(|x| *x) {
            break;
        }
        for (k, o) in orbits.iter_mut().enumerate() {
            if alive[k] {
                if let Err(e) = o.step() {
                    alive[k] = false;
                    failures.push(SampleFailure {
                        sample: k,
                        lambda: a_list[k].with_precision(digits),
                        index: idx + 1,
                        error: e.to_string(),
                    });
                }
            }
        }
        idx += 1;
    }
    let pairs: Vec<PairAttraction> = pairs
        .iter()
        .zip(state)
        .map(|(&(i, j), (bad, max_gap, final_gap, compared_to))| PairAttraction {
            a: a_list[i].with_precision(digits),
            b: a_list[j].with_precision(digits),
            n_epsilon: match bad {
                _ if compared_to < n => None,
                None => Some(first),
                Some(k) if k < n => Some(k + 1),
                Some(_) => None,
            },
            max_gap: max_gap.with_precision(digits),
            final_gap: final_gap.with_precision(digits),
            compared_to,
        })
        .collect();
    Ok(AttractionReport {
        system: system.name().to_string(),
        tolerance: tolerance.with_precision(digits),
        n,
        converged: pairs.iter().all(|p| p.n_epsilon.is_some()),
        pairs,
        failures,
    })
}
