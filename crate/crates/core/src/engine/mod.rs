//! Trajectory generation by plain iteration and by L-iteration.

mod orbit;
mod system;
mod trajectory;
mod word;

pub use orbit::{Checkpoint, Orbit};
pub use system::System;
pub use trajectory::{
    iterate, literate, Failure, FracStream, Summary, Trajectory, TrajectoryReport, WindowPolicy,
};
pub use word::{lword_stream, tm_letter, LazyWord};

use thiserror::Error;

use crate::mapexpr::MapError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("the L-system has no infinite limit word from its axiom")]
    NonProductive,
    #[error("{0}")]
    InvalidLength(String),
    #[error("{0}")]
    Window(String),
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::mapexpr::{builtin_lsystem, builtin_map, parse_lsystem};
    use crate::numerics::{cos_r, NumericError, Precision, Real};

    fn d40() -> Precision {
        Precision::DEFAULT
    }

    fn r(s: &str) -> Real {
        Real::parse(s, d40()).unwrap()
    }

    fn b(v: &str) -> BTreeMap<String, Real> {
        [("b".to_string(), r(v))].into_iter().collect()
    }

    #[test]
    fn identity_stays_put() {
        let t = iterate(&builtin_map("identity").unwrap(), &r("7"), &BTreeMap::new(), 100, d40(), WindowPolicy::all())
            .unwrap();
        assert_eq!(t.len(), 100);
        assert!(t.window().iter().all(|(_, v)| v.to_string() == "7"));
    }

    #[test]
    fn period_three_table_value() {
        let t = iterate(&builtin_map("sine-drift").unwrap(), &r("0.8"), &b("0.7"), 20_000, d40(), WindowPolicy::default())
            .unwrap();
        let last = t.last().with_precision(d40());
        assert_eq!(last.floor().to_string(), "13333");
        let frac = last.frac().to_f64();
        assert!((frac - 0.7162148952).abs() < 1e-9, "{last}");
        // Frozen from an independent 60-digit evaluation of the same recurrence.
        assert_eq!(last.to_string(), "13333.71621489528683235911855632452237334");
    }

    #[test]
    fn sine_drift_steps_are_bounded() {
        let t = iterate(&builtin_map("sine-drift").unwrap(), &r("0.3"), &b("0.41"), 3000, d40(), WindowPolicy::all())
            .unwrap();
        let w = t.window();
        let (lo, hi) = (0.41 - 0.4, 0.41 + 0.4);
        for pair in w.windows(2) {
            let d = (pair[1].1 - pair[0].1).to_f64();
            assert!(d >= lo - 1e-30 && d <= hi + 1e-30);
        }
    }

    #[test]
    fn restart_is_consistent() {
        let map = builtin_map("sine-drift").unwrap();
        let full = iterate(&map, &r("0.5"), &b("0.8872559"), 3000, d40(), WindowPolicy::tail(1)).unwrap();
        let mut half = iterate(&map, &r("0.5"), &b("0.8872559"), 1234, d40(), WindowPolicy::tail(1)).unwrap();
        half.extend_to(3000);
        assert_eq!(full.last().to_string(), half.last().to_string());
        let first = iterate(&map, &r("0.5"), &b("0.8872559"), 1234, d40(), WindowPolicy::tail(1)).unwrap();
        let orbit = Orbit::map(&map, &r("0.5"), &b("0.8872559"), d40()).unwrap();
        let mut resumed = orbit.resume(&first.checkpoint());
        while resumed.index() < 3000 {
            resumed.step().unwrap();
        }
        assert_eq!(resumed.value().to_string(), full.last().to_string());
    }

    #[test]
    fn literate_gamma_cos() {
        let l = builtin_lsystem("lfam-gamma-cos").unwrap();
        let t = literate(&l, &r("0"), &BTreeMap::new(), 3, d40(), WindowPolicy::all()).unwrap();
        let vals: Vec<String> = t.window().iter().map(|(_, v)| v.with_precision(d40()).to_string()).collect();
        assert_eq!(vals[0], "0");
        assert_eq!(vals[1], "1");
        assert_eq!(vals[2], cos_r(&r("1")).unwrap().to_string());
        assert!(vals[2].starts_with("0.5403023058"));
        assert!(vals[3].starts_with("0.8575532158"));
    }

    #[test]
    fn literate_identity_and_cos_range() {
        let ident = parse_lsystem("axiom A; A -> A B; B -> B A; A := x; B := x").unwrap();
        let t = literate(&ident, &r("2.5"), &BTreeMap::new(), 50, d40(), WindowPolicy::all()).unwrap();
        assert!(t.window().iter().all(|(_, v)| v.to_string() == "2.5"));
        let l = builtin_lsystem("lfam-gamma-cos").unwrap();
        let t = literate(&l, &r("2.7"), &BTreeMap::new(), 64, d40(), WindowPolicy::all()).unwrap();
        for (n, v) in t.window() {
            if n >= 1 && tm_letter(n) == 'B' {
                assert!(v.abs() <= Real::one(d40()));
            }
        }
    }

    #[test]
    fn pole_marks_failure_but_keeps_prefix() {
        let l = parse_lsystem("axiom A; A -> A B; B -> B A; A := x - 1; B := gamma(x)").unwrap();
        // U(1) = 0, then B hits the pole at 0.
        let t = literate(&l, &r("1"), &BTreeMap::new(), 10, d40(), WindowPolicy::all()).unwrap();
        let f = t.failure().unwrap();
        assert_eq!(f.index, 2);
        assert!(matches!(f.error, crate::mapexpr::EvalError::Numeric(NumericError::Pole(_))));
        assert_eq!(t.last_index(), 1);
    }

    #[test]
    fn window_policies() {
        let p: WindowPolicy = "tail:30+stride:1000+range:5-7+full-frac".parse().unwrap();
        assert_eq!(p.tail, 30);
        assert_eq!(p.stride, 1000);
        assert_eq!(p.ranges, vec![(5, 7)]);
        assert!(p.full_frac);
        assert_eq!(p.to_string(), "tail:30+stride:1000+range:5-7+full-frac");
        assert!("tail:x".parse::<WindowPolicy>().is_err());
        assert!("bogus".parse::<WindowPolicy>().is_err());
        let t = iterate(&builtin_map("sine-drift").unwrap(), &r("0.5"), &b("0.8"), 2500, d40(), p).unwrap();
        let idx: Vec<u64> = t.window().iter().map(|(i, _)| *i).collect();
        assert_eq!(&idx[..5], &[5, 6, 7, 1000, 2000]);
        assert_eq!(idx.len(), 5 + 30);
        assert_eq!(*idx.last().unwrap(), 2500);
        let fs = t.frac_stream().unwrap();
        assert_eq!(fs.len(), 2500);
        let exact = (t.value_at(2500).unwrap() - t.value_at(2490).unwrap()).to_f64();
        assert!((fs.diff(2490, 2500).unwrap() - exact).abs() < 1e-9);
    }

    #[test]
    fn csv_export() {
        let t = iterate(&builtin_map("identity").unwrap(), &r("-0.25"), &BTreeMap::new(), 3, d40(), WindowPolicy::all())
            .unwrap();
        assert_eq!(t.csv_string(), "n,value,frac\n1,-0.25,0.75\n2,-0.25,0.75\n3,-0.25,0.75\n");
    }

    #[test]
    fn determinism() {
        let run = || {
            iterate(&builtin_map("sine-drift").unwrap(), &r("0.5"), &b("0.41"), 5000, d40(), WindowPolicy::tail(50))
                .unwrap()
                .csv_string()
        };
        assert_eq!(run(), run());
    }
}
