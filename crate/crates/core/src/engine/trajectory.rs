use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::mapexpr::{EvalError, LSystemSpec, MapSpec};
use crate::numerics::{Precision, Real};

use super::orbit::{Checkpoint, Orbit};
use super::EngineError;

/// Which computed terms a trajectory keeps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowPolicy {
    /// Keep the last `tail` terms (contiguous).
    pub tail: u64,
    /// Keep every term whose index is a multiple of `stride` (0 disables).
    pub stride: u64,
    /// Keep every term in these inclusive index ranges.
    pub ranges: Vec<(u64, u64)>,
    /// Keep floor and fractional part of every term at reduced precision.
    pub full_frac: bool,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy { tail: 4096, stride: 10_000, ranges: Vec::new(), full_frac: false }
    }
}

impl WindowPolicy {
    pub fn tail(k: u64) -> Self {
        WindowPolicy { tail: k, stride: 0, ranges: Vec::new(), full_frac: false }
    }

    /// Every term.
    pub fn all() -> Self {
        WindowPolicy::tail(u64::MAX)
    }

    pub fn with_full_frac(mut self) -> Self {
        self.full_frac = true;
        self
    }
}

/// Text form: `+`-separated parts among `tail:K`, `stride:S`, `range:A-B`,
/// `full-frac`, `all` and `default`. Example: `tail:30+stride:1000`.
impl FromStr for WindowPolicy {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| EngineError::Window(format!("{m} in window policy {s:?}"));
        let mut p = WindowPolicy { tail: 0, stride: 0, ranges: Vec::new(), full_frac: false };
        for part in s.split('+').map(str::trim) {
            let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad("bad number"));
            if part == "default" {
                let d = WindowPolicy::default();
                p.tail = p.tail.max(d.tail);
                p.stride = d.stride;
            } else if part == "all" {
                p.tail = u64::MAX;
            } else if part == "full-frac" {
                p.full_frac = true;
            } else if let Some(v) = part.strip_prefix("tail:") {
                p.tail = num(v)?;
            } else if let Some(v) = part.strip_prefix("stride:") {
                p.stride = num(v)?;
            } else if let Some(v) = part.strip_prefix("range:") {
                let (a, b) = v.split_once('-').ok_or_else(|| bad("range needs A-B"))?;
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(bad("empty range"));
                }
                p.ranges.push((a, b));
            } else {
                return Err(bad(&format!("unknown part {part:?}")));
            }
        }
        Ok(p)
    }
}

impl fmt::Display for WindowPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.tail == u64::MAX {
            parts.push("all".to_string());
        } else if self.tail > 0 {
            parts.push(format!("tail:{}", self.tail));
        }
        if self.stride > 0 {
            parts.push(format!("stride:{}", self.stride));
        }
        for (a, b) in &self.ranges {
            parts.push(format!("range:{a}-{b}"));
        }
        if self.full_frac {
            parts.push("full-frac".to_string());
        }
        if parts.is_empty() {
            parts.push("tail:0".to_string());
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// Floor and fractional part of every term, kept at double precision.
#[derive(Clone, Debug, Default)]
pub struct FracStream {
    start: u64,
    floors: Vec<i64>,
    fracs: Vec<f64>,
}

impl FracStream {
    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.fracs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fracs.is_empty()
    }

    /// Last index held.
    pub fn end(&self) -> u64 {
        self.start + self.fracs.len() as u64 - 1
    }

    pub fn get(&self, i: u64) -> Option<(i64, f64)> {
        let k = i.checked_sub(self.start)? as usize;
        Some((*self.floors.get(k)?, *self.fracs.get(k)?))
    }

    pub fn frac(&self, i: u64) -> Option<f64> {
        self.get(i).map(|(_, f)| f)
    }

    /// u(j) − u(i), accurate to about 1e-15 in the fractional part.
    pub fn diff(&self, i: u64, j: u64) -> Option<f64> {
        let (fi, ri) = self.get(i)?;
        let (fj, rj) = self.get(j)?;
        Some((fj.wrapping_sub(fi)) as f64 + (rj - ri))
    }

    /// `u(n)` as an `f64` (lossy for large values).
    pub fn approx(&self, i: u64) -> Option<f64> {
        self.get(i).map(|(f, r)| f as f64 + r)
    }

    fn push(&mut self, v: &Real) {
        let (f, r) = v.floor_frac_f64();
        self.floors.push(f);
        self.fracs.push(r);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub min: Real,
    pub max: Real,
    pub frac_min: Real,
    pub frac_max: Real,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    /// Index of the term that could not be computed.
    pub index: u64,
    pub error: EvalError,
}

impl Serialize for Failure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Failure", 2)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("error", &self.error.to_string())?;
        st.end()
    }
}

/// A computed sequence u(first..=last) with the terms its policy retains.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub source: String,
    pub a: Real,
    pub params: BTreeMap<String, Real>,
    pub digits: Precision,
    pub policy: WindowPolicy,
    orbit: Orbit,
    tail: VecDeque<(u64, Real)>,
    samples: BTreeMap<u64, Real>,
    frac: Option<FracStream>,
    summary: Option<Summary>,
    failure: Option<Failure>,
}

impl Trajectory {
    fn start(
        source: String,
        orbit: Orbit,
        a: &Real,
        params: &BTreeMap<String, Real>,
        digits: Precision,
        policy: WindowPolicy,
    ) -> Trajectory {
        let mut t = Trajectory {
            source,
            a: a.with_precision(digits),
            params: params.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            digits,
            frac: policy.full_frac.then(|| FracStream { start: orbit.index(), ..Default::default() }),
            policy,
            orbit,
            tail: VecDeque::new(),
            samples: BTreeMap::new(),
            summary: None,
            failure: None,
        };
        let (i, v) = (t.orbit.index(), t.orbit.value().clone());
        t.record(i, v);
        t
    }

    fn record(&mut self, index: u64, v: Real) {
        let frac = v.frac();
        match &mut self.summary {
            None => {
                self.summary =
                    Some(Summary { min: v.clone(), max: v.clone(), frac_min: frac.clone(), frac_max: frac });
            }
            Some(s) => {
                if v < s.min {
                    s.min = v.clone();
                } else if v > s.max {
                    s.max = v.clone();
                }
                if frac < s.frac_min {
                    s.frac_min = frac;
                } else if frac > s.frac_max {
                    s.frac_max = frac;
                }
            }
        }
        if let Some(fs) = &mut self.frac {
            fs.push(&v);
        }
        let sampled = (self.policy.stride > 0 && index % self.policy.stride == 0)
            || self.policy.ranges.iter().any(|&(a, b)| a <= index && index <= b);
        if sampled {
            self.samples.insert(index, v.clone());
        }
        if self.policy.tail > 0 {
            if self.tail.len() as u64 >= self.policy.tail {
                self.tail.pop_front();
            }
            self.tail.push_back((index, v));
        }
    }

    /// Computes further terms until the last index is `n` or a term fails.
    pub fn extend_to(&mut self, n: u64) {
        while self.failure.is_none() && self.orbit.index() < n {
            match self.orbit.step() {
                Ok(v) => {
                    let v = v.clone();
                    let i = self.orbit.index();
                    self.record(i, v);
                }
                Err(error) => self.failure = Some(Failure { index: self.orbit.index() + 1, error }),
            }
        }
    }

    /// Index of the initial term (1 for plain iteration, 0 for L-iteration).
    pub fn first_index(&self) -> u64 {
        self.orbit.first_index()
    }

    /// Index of the last computed term.
    pub fn last_index(&self) -> u64 {
        self.orbit.index()
    }

    /// Number of computed terms.
    pub fn len(&self) -> u64 {
        self.last_index() - self.first_index() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The last term at full working precision.
    pub fn last(&self) -> &Real {
        self.orbit.value()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        self.orbit.checkpoint()
    }

    pub fn failure(&self) -> Option<&Failure> {
        self.failure.as_ref()
    }

    pub fn summary(&self) -> &Summary {
        self.summary.as_ref().expect("the initial term is always recorded")
    }

    pub fn frac_stream(&self) -> Option<&FracStream> {
        self.frac.as_ref()
    }

    /// First index of the contiguous retained tail.
    pub fn tail_start(&self) -> Option<u64> {
        self.tail.front().map(|(i, _)| *i)
    }

    /// The contiguous tail at working precision, oldest first.
    pub fn tail(&self) -> impl ExactSizeIterator<Item = &(u64, Real)> + '_ {
        self.tail.iter()
    }

    /// A retained term at working precision.
    pub fn value_at(&self, i: u64) -> Option<&Real> {
        if let Some(start) = self.tail_start() {
            if i >= start {
                return self.tail.get((i - start) as usize).map(|(_, v)| v);
            }
        }
        self.samples.get(&i)
    }

    /// Every retained term in index order, at working precision.
    pub fn window(&self) -> Vec<(u64, &Real)> {
        let start = self.tail_start().unwrap_or(u64::MAX);
        let mut out: Vec<(u64, &Real)> = self.samples.range(..start).map(|(i, v)| (*i, v)).collect();
        out.extend(self.tail.iter().map(|(i, v)| (*i, v)));
        out
    }

    /// Writes the retained terms as `n,value,frac`, rounded to D digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,value,frac")?;
        for (i, v) in self.window() {
            let r = v.with_precision(self.digits);
            writeln!(out, "{i},{r},{}", r.frac())?;
        }
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn report(&self) -> TrajectoryReport {
        let s = self.summary();
        let d = self.digits;
        TrajectoryReport {
            source: self.source.clone(),
            a: self.a.clone(),
            params: self.params.iter().map(|(k, v)| (k.clone(), v.with_precision(d))).collect(),
            digits: d.digits(),
            first_index: self.first_index(),
            last_index: self.last_index(),
            last_value: self.last().with_precision(d),
            window: self.policy.to_string(),
            retained: self.window().len(),
            summary: Summary {
                min: s.min.with_precision(d),
                max: s.max.with_precision(d),
                frac_min: s.frac_min.with_precision(d),
                frac_max: s.frac_max.with_precision(d),
            },
            failure: self.failure.clone(),
        }
    }
}

/// Serializable overview of a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryReport {
    pub source: String,
    pub a: Real,
    pub params: BTreeMap<String, Real>,
    pub digits: u32,
    pub first_index: u64,
    pub last_index: u64,
    pub last_value: Real,
    pub window: String,
    pub retained: usize,
    pub summary: Summary,
    pub failure: Option<Failure>,
}

/// Plain iteration u(1) = a, u(n+1) = f(u(n)) up to u(n).
pub fn iterate(
    map: &MapSpec,
    a: &Real,
    params: &BTreeMap<String, Real>,
    n: u64,
    digits: Precision,
    policy: WindowPolicy,
) -> Result<Trajectory, EngineError> {
    if n < 1 {
        return Err(EngineError::InvalidLength("N must be at least 1".into()));
    }
    let orbit = Orbit::map(map, a, params, digits)?;
    let mut t = Trajectory::start(map.text(), orbit, a, params, digits, policy);
    t.extend_to(n);
    Ok(t)
}

/// L-iteration U(0) = a, U(n) = f_{L(n)}(U(n−1)) up to U(n).
pub fn literate(
    spec: &LSystemSpec,
    a: &Real,
    params: &BTreeMap<String, Real>,
    n: u64,
    digits: Precision,
    policy: WindowPolicy,
) -> Result<Trajectory, EngineError> {
    if n < 1 {
        return Err(EngineError::InvalidLength("N must be at least 1".into()));
    }
    let orbit = Orbit::lsystem(spec, a, params, digits)?;
    let mut t = Trajectory::start(spec.text(), orbit, a, params, digits, policy);
    t.extend_to(n);
    Ok(t)
}
