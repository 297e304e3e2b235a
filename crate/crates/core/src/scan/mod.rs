//! Parameter sweeps over b: regime classification and boundary bisection.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chaos::transitivity_mod_r;
use crate::engine::{iterate, EngineError, Trajectory, WindowPolicy};
use crate::helix::{
    detect_stable_helix, pseudo_helix_candidate, skid_scan, HelixDescriptor, HelixError, SkidParams, DEFAULT_J_MAX,
    DEFAULT_TOL, DEFAULT_TRANSIENT,
};
use crate::mapexpr::MapSpec;
use crate::numerics::{Precision, Real};

mod atlas;

pub use atlas::{atlas_files, write_atlas, AtlasRow, ATLAS_CSV_HEADER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("predicate is {value} at both ends of [{lo}, {hi}]")]
    PredicateAgrees { lo: String, hi: String, value: bool },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Helix(#[from] HelixError),
}

/// Defaults: three initial values, 2·10⁵ steps escalating to 10⁶, j ≤ 64.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyConfig {
    pub a_set: Vec<Real>,
    /// Other parameters of the map, held fixed.
    pub fixed: BTreeMap<String, Real>,
    pub n: u64,
    pub escalate_to: u64,
    pub digits: u32,
    pub j_max: usize,
    pub tol: f64,
    pub transient: u64,
    pub skid: SkidParams,
    pub min_episodes: usize,
    pub cycle_tol: f64,
    pub coverage_bins: usize,
    pub coverage_min: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            a_set: ["0.3", "0.5", "0.8"].iter().map(|s| s.parse().expect("literal")).collect(),
            fixed: BTreeMap::new(),
            n: 200_000,
            escalate_to: 1_000_000,
            digits: Precision::DEFAULT.digits(),
            j_max: DEFAULT_J_MAX,
            tol: DEFAULT_TOL,
            transient: DEFAULT_TRANSIENT,
            skid: SkidParams { transient: DEFAULT_TRANSIENT, ..SkidParams::default() },
            min_episodes: 3,
            cycle_tol: 1e-6,
            coverage_bins: 100,
            coverage_min: 0.9,
        }
    }
}

impl ClassifyConfig {
    fn precision(&self) -> Result<Precision, ScanError> {
        Precision::new(self.digits).map_err(|e| ScanError::InvalidArgument(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Tag {
    Helix { j: usize, c: Real },
    PseudoHelix { j: usize, c: f64, mean_laminar: f64 },
    Chaotic,
    Unclassified,
}

impl Tag {
    pub fn kind(&self) -> &'static str {
        match self {
            Tag::Helix { .. } => "Helix",
            Tag::PseudoHelix { .. } => "PseudoHelix",
            Tag::Chaotic => "Chaotic",
            Tag::Unclassified => "Unclassified",
        }
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            Tag::Helix { j, .. } | Tag::PseudoHelix { j, .. } => Some(*j),
            _ => None,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Helix { j, c } => write!(f, "Helix({j}, {c})"),
            Tag::PseudoHelix { j, c, mean_laminar } => write!(f, "PseudoHelix({j}, {c}, {mean_laminar:.1})"),
            other => f.write_str(other.kind()),
        }
    }
}

/// What each stage saw; kept for the per-row diagnostic files.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub helix: Vec<Option<HelixDescriptor>>,
    pub skid_episodes: Vec<Option<usize>>,
    pub coverage: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttractorClass {
    pub tag: Tag,
    /// Initial values that agree with the tag.
    pub evidence: usize,
    /// Steps per trajectory actually used.
    pub budget: u64,
    pub diagnostics: Diagnostics,
}

fn cycles_agree(x: &HelixDescriptor, y: &HelixDescriptor, cfg: &ClassifyConfig) -> bool {
    x.j == y.j
        && (&x.c - &y.c).abs().to_f64() <= cfg.tol * x.j as f64
        && x.fractional_cycle.iter().zip(&y.fractional_cycle).all(|(p, q)| {
            // Cycle values near 0 and 1 are the same point of the circle.
            let d = (p - q).abs().to_f64();
            d.min(1.0 - d) <= cfg.cycle_tol
        })
}

fn helix_stage(trajs: &[Trajectory], cfg: &ClassifyConfig, diag: &mut Diagnostics) -> Result<Option<AttractorClass>, ScanError> {
    let found: Vec<Option<HelixDescriptor>> = trajs
        .iter()
        .map(|t| detect_stable_helix(t, cfg.j_max, cfg.tol, cfg.transient))
        .collect::<Result<_, _>>()?;
    diag.helix = found.clone();
    let Some(Some(first)) = found.first() else { return Ok(None) };
    let agree = found.iter().filter(|d| d.as_ref().is_some_and(|d| cycles_agree(first, d, cfg))).count();
    if agree == found.len() {
        return Ok(Some(AttractorClass {
            tag: Tag::Helix { j: first.j, c: first.c.clone() },
            evidence: agree,
            budget: trajs[0].last_index(),
            diagnostics: diag.clone(),
        }));
    }
    if found.iter().any(|d| d.is_some()) {
        diag.notes.push(format!("helix detected for {agree} of {} initial values only", found.len()));
    }
    Ok(None)
}

fn pseudo_stage(trajs: &[Trajectory], cfg: &ClassifyConfig, diag: &mut Diagnostics) -> (Option<AttractorClass>, bool) {
    let mut no_laminar = 0;
    let mut hits = Vec::new();
    diag.skid_episodes.clear();
    for t in trajs {
        let fs = t.frac_stream().expect("classification keeps full fractions");
        let Some((j, c)) = pseudo_helix_candidate(fs, cfg.j_max, cfg.skid.theta, cfg.transient) else {
            no_laminar += 1;
            diag.skid_episodes.push(None);
            continue;
        };
        match skid_scan(fs, j, c, &cfg.skid) {
            Ok(s) => {
                diag.skid_episodes.push(Some(s.episodes.len()));
                if s.episodes.len() >= cfg.min_episodes {
                    hits.push((j, c, s.laminar_lengths));
                }
            }
            Err(HelixError::NoLaminarPhase(_)) => {
                no_laminar += 1;
                diag.skid_episodes.push(None);
            }
            Err(_) => diag.skid_episodes.push(None),
        }
    }
    let all_no_laminar = no_laminar == trajs.len();
    if 2 * hits.len() <= trajs.len() {
        return (None, all_no_laminar);
    }
    let j = hits[0].0;
    let hits: Vec<_> = hits.into_iter().filter(|h| h.0 == j).collect();
    if 2 * hits.len() <= trajs.len() {
        return (None, all_no_laminar);
    }
    let c = hits.iter().map(|h| h.1).sum::<f64>() / hits.len() as f64;
    let gaps: Vec<u64> = hits.iter().flat_map(|h| h.2.iter().copied()).collect();
    let mean_laminar = gaps.iter().sum::<u64>() as f64 / gaps.len() as f64;
    let class = AttractorClass {
        tag: Tag::PseudoHelix { j, c, mean_laminar },
        evidence: hits.len(),
        budget: trajs[0].last_index(),
        diagnostics: diag.clone(),
    };
    (Some(class), all_no_laminar)
}

fn trajectories(map: &MapSpec, b: &Real, cfg: &ClassifyConfig, n: u64) -> Result<Vec<Trajectory>, ScanError> {
    let digits = cfg.precision()?;
    let mut params = cfg.fixed.clone();
    params.insert("b".into(), b.clone());
    let policy = WindowPolicy { tail: (3 * cfg.j_max as u64).max(4096), stride: 0, ranges: Vec::new(), full_frac: true };
    let out: Vec<Result<Trajectory, EngineError>> =
        cfg.a_set.par_iter().map(|a| iterate(map, a, &params, n, digits, policy.clone())).collect();
    let out = out.into_iter().collect::<Result<Vec<_>, _>>()?;
    if let Some(f) = out.iter().find_map(|t| t.failure()) {
        return Err(ScanError::InvalidArgument(format!("iteration failed at index {}: {}", f.index, f.error)));
    }
    Ok(out)
}

/// Classifies the regime at b: Helix, then PseudoHelix, then (after
/// escalating the budget) Chaotic, with Unclassified as the fallback.
pub fn classify(map: &MapSpec, b: &Real, cfg: &ClassifyConfig) -> Result<AttractorClass, ScanError> {
    if cfg.a_set.len() < 3 {
        return Err(ScanError::InvalidArgument("classification needs at least three initial values".into()));
    }
    let mut diag = Diagnostics::default();
    let mut trajs = trajectories(map, b, cfg, cfg.n)?;
    let mut budget = cfg.n;
    loop {
        if let Some(c) = helix_stage(&trajs, cfg, &mut diag)? {
            return Ok(c);
        }
        let (pseudo, no_laminar) = pseudo_stage(&trajs, cfg, &mut diag);
        if let Some(c) = pseudo {
            return Ok(c);
        }
        if budget < cfg.escalate_to {
            budget = cfg.escalate_to;
            diag.notes.push(format!("escalated to N = {budget}"));
            trajs.par_iter_mut().for_each(|t| t.extend_to(budget));
            continue;
        }
        let fs = trajs[0].frac_stream().expect("full fractions");
        let cov = transitivity_mod_r(fs, 1.0, cfg.coverage_bins, budget, cfg.transient)
            .map_err(|e| ScanError::InvalidArgument(e.to_string()))?
            .coverage;
        diag.coverage = Some(cov);
        let tag = if no_laminar && cov >= cfg.coverage_min {
            Tag::Chaotic
        } else {
            diag.notes.push(format!("no period ≤ {} and no clean chaotic signature", cfg.j_max));
            Tag::Unclassified
        };
        let evidence = if tag == Tag::Chaotic { trajs.len() } else { 0 };
        return Ok(AttractorClass { tag, evidence, budget, diagnostics: diag });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub b: Real,
    pub class: AttractorClass,
    /// The Helix period differs from the previous row's.
    pub boundary: bool,
}

/// The sample points from, from + step, … ≤ to, in exact decimal arithmetic.
pub fn sweep_points(from: &Real, to: &Real, step: &Real) -> Result<Vec<Real>, ScanError> {
    if !step.is_positive() {
        return Err(ScanError::InvalidArgument("step must be positive".into()));
    }
    let mut out = Vec::new();
    if from >= to {
        return Ok(out);
    }
    let mut b = from.clone();
    while b <= *to {
        out.push(b.clone());
        b = &b + step;
    }
    Ok(out)
}

/// Classifies each sample on a pool of `jobs` threads; rows come back in b order.
pub fn sweep(map: &MapSpec, from: &Real, to: &Real, step: &Real, cfg: &ClassifyConfig, jobs: usize) -> Result<Vec<ScanRow>, ScanError> {
    let points = sweep_points(from, to, step)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ScanError::InvalidArgument(e.to_string()))?;
    let classes: Vec<Result<AttractorClass, ScanError>> =
        pool.install(|| points.par_iter().map(|b| classify(map, b, cfg)).collect());
    let mut rows: Vec<ScanRow> = Vec::with_capacity(points.len());
    for (b, c) in points.into_iter().zip(classes) {
        let class = c?;
        let boundary = match (rows.last().map(|r| &r.class.tag), &class.tag) {
            (Some(Tag::Helix { j: p, .. }), Tag::Helix { j: q, .. }) => p != q,
            _ => false,
        };
        rows.push(ScanRow { b, class, boundary });
    }
    Ok(rows)
}

/// A Boolean on the tag and period only, for bisection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BoundaryPredicate {
    /// Helix with exactly this period.
    Helix(usize),
    /// Any tag of this kind.
    Kind(String),
}

impl FromStr for BoundaryPredicate {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, ScanError> {
        let bad = || ScanError::InvalidArgument(format!("unknown predicate '{s}' (try helix:2, helix, pseudo, chaotic)"));
        let lower = s.trim().to_ascii_lowercase();
        if let Some(j) = lower.strip_prefix("helix:") {
            return j.parse().map(BoundaryPredicate::Helix).map_err(|_| bad());
        }
        let kind = match lower.as_str() {
            "helix" => "Helix",
            "pseudo" | "pseudohelix" => "PseudoHelix",
            "chaotic" => "Chaotic",
            "unclassified" => "Unclassified",
            _ => return Err(bad()),
        };
        Ok(BoundaryPredicate::Kind(kind.into()))
    }
}

impl fmt::Display for BoundaryPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPredicate::Helix(j) => write!(f, "helix:{j}"),
            BoundaryPredicate::Kind(k) => f.write_str(&k.to_ascii_lowercase()),
        }
    }
}

impl BoundaryPredicate {
    /// Helix predicates need only the helix stage, which is far cheaper than
    /// a full classification on the non-helix side.
    pub fn eval(&self, map: &MapSpec, b: &Real, cfg: &ClassifyConfig) -> Result<bool, ScanError> {
        match self {
            BoundaryPredicate::Helix(j) => {
                let trajs = trajectories(map, b, cfg, cfg.n)?;
                let tag = helix_stage(&trajs, cfg, &mut Diagnostics::default())?.map(|c| c.tag);
                Ok(matches!(tag, Some(Tag::Helix { j: k, .. }) if k == *j))
            }
            BoundaryPredicate::Kind(k) if k == "Helix" => {
                let trajs = trajectories(map, b, cfg, cfg.n)?;
                Ok(helix_stage(&trajs, cfg, &mut Diagnostics::default())?.is_some())
            }
            BoundaryPredicate::Kind(k) => Ok(classify(map, b, cfg)?.tag.kind() == k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub lo: Real,
    pub hi: Real,
    pub predicate: String,
    /// Predicate value at `lo` (the opposite holds at `hi`).
    pub at_lo: bool,
    pub iterations: u32,
}

/// Bisection on [lo, hi] until `iterations` halvings are done.
pub fn refine_boundary(
    map: &MapSpec,
    lo: &Real,
    hi: &Real,
    predicate: &BoundaryPredicate,
    iterations: u32,
    cfg: &ClassifyConfig,
) -> Result<Bracket, ScanError> {
    if lo >= hi {
        return Err(ScanError::InvalidArgument("need lo < hi".into()));
    }
    let work = cfg.precision()?.guarded();
    let (mut lo, mut hi) = (lo.with_precision(work), hi.with_precision(work));
    let at_lo = predicate.eval(map, &lo, cfg)?;
    let at_hi = predicate.eval(map, &hi, cfg)?;
    if at_lo == at_hi {
        return Err(ScanError::PredicateAgrees { lo: lo.to_string(), hi: hi.to_string(), value: at_lo });
    }
    let half = Real::parse("0.5", work).expect("literal");
    for _ in 0..iterations {
        let mid = &(&lo + &hi) * &half;
        if predicate.eval(map, &mid, cfg)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bracket { lo, hi, predicate: predicate.to_string(), at_lo, iterations })
}
