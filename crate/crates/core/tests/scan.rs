use helixlab::mapexpr::builtin_map;
use helixlab::numerics::Real;
use helixlab::scan::{classify, refine_boundary, sweep, sweep_points, BoundaryPredicate, ClassifyConfig, ScanError, Tag};

fn r(s: &str) -> Real {
    s.parse().unwrap()
}

fn short(n: u64) -> ClassifyConfig {
    ClassifyConfig { n, escalate_to: n, ..ClassifyConfig::default() }
}

#[test]
fn sweep_points_are_exact_decimals() {
    let pts = sweep_points(&r("0.7"), &r("0.71"), &r("0.001")).unwrap();
    assert_eq!(pts.len(), 11);
    assert_eq!(pts.last().unwrap().to_string(), "0.71");
    assert!(sweep_points(&r("0.7"), &r("0.7"), &r("0.001")).unwrap().is_empty());
    assert!(sweep_points(&r("0.7"), &r("0.8"), &r("0")).is_err());
    let map = builtin_map("sine-drift").unwrap();
    assert!(sweep(&map, &r("0.7"), &r("0.7"), &r("0.01"), &short(1000), 1).unwrap().is_empty());
}

#[test]
fn period_three_window() {
    let map = builtin_map("sine-drift").unwrap();
    let rows = sweep(&map, &r("0.68"), &r("0.74"), &r("0.02"), &short(20_000), 2).unwrap();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        assert!(matches!(&row.class.tag, Tag::Helix { j: 3, c } if (c.to_f64() - 2.0).abs() < 1e-9), "b={}: {}", row.b, row.class.tag);
        assert_eq!(row.class.evidence, 3);
        assert!(!row.boundary);
    }
}

#[test]
fn boundary_flag_marks_period_changes() {
    let map = builtin_map("sine-drift").unwrap();
    let rows = sweep(&map, &r("0.795"), &r("0.799"), &r("0.002"), &short(200_000), 1).unwrap();
    let periods: Vec<Option<usize>> = rows.iter().map(|r| r.class.tag.period()).collect();
    assert_eq!(periods, [Some(5), Some(10), Some(10)]);
    let flags: Vec<bool> = rows.iter().map(|r| r.boundary).collect();
    assert_eq!(flags, [false, true, false]);
}

#[test]
fn classify_is_deterministic() {
    let map = builtin_map("sine-drift").unwrap();
    let cfg = short(20_000);
    let x = classify(&map, &r("0.7"), &cfg).unwrap();
    let y = classify(&map, &r("0.7"), &cfg).unwrap();
    assert_eq!(serde_json::to_string(&x).unwrap(), serde_json::to_string(&y).unwrap());
}

#[test]
fn refine_needs_a_sign_change() {
    let map = builtin_map("sine-drift").unwrap();
    let err = refine_boundary(&map, &r("0.70"), &r("0.71"), &BoundaryPredicate::Helix(3), 5, &short(20_000)).unwrap_err();
    assert!(matches!(err, ScanError::PredicateAgrees { value: true, .. }), "{err}");
}

#[test]
fn refine_keeps_the_period_one_end() {
    // Only b = 1 itself carries a period-1 helix; just below it the cycle has period 2.
    let map = builtin_map("sine-drift").unwrap();
    let br = refine_boundary(&map, &r("0.95"), &r("1.0"), &BoundaryPredicate::Helix(1), 6, &short(20_000)).unwrap();
    assert!(!br.at_lo);
    assert_eq!(br.hi, r("1.0"));
    assert_eq!(br.iterations, 6);
    assert!(br.lo >= r("0.99921875"));
}

#[test]
fn predicates_parse() {
    assert_eq!("helix:2".parse::<BoundaryPredicate>().unwrap(), BoundaryPredicate::Helix(2));
    assert_eq!("Chaotic".parse::<BoundaryPredicate>().unwrap().to_string(), "chaotic");
    assert!("helix:x".parse::<BoundaryPredicate>().is_err());
}
