use std::collections::BTreeMap;
use std::fs;

use serde::Serialize;

use super::args::*;
use super::{runtime, usage, CliError, Outcome, EXIT_OK, EXIT_RUNTIME};
use crate::chaos::{
    divergence_probe, lsys_transitivity_probe, mutual_attraction_check, transitivity_mod_r, DivergenceOptions,
};
use crate::engine::{System, Trajectory, TrajectoryReport, WindowPolicy};
use crate::helix::{
    calibrate_threshold, detect_stable_helix, order_point_fit, pseudo_helix_candidate, skid_scan, verify_helix,
    HelixDescriptor, SkidParams,
};
use crate::mapexpr::{builtin_lsystem, builtin_map, parse_lsystem, LSystemSpec, MapSpec};
use crate::numerics::{Precision, Real};
use crate::scan::{atlas_files, classify, refine_boundary, sweep, BoundaryPredicate, ClassifyConfig};

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    Ok((serde_json::to_string_pretty(v).map_err(runtime)? + "\n").into_bytes())
}

fn precision(d: u32) -> Result<Precision, CliError> {
    Precision::new(d).map_err(usage)
}

fn real(s: &str, p: Precision, what: &str) -> Result<Real, CliError> {
    Real::parse(s.trim(), p).map_err(|e| usage(format!("{what}: {e}")))
}

fn reals(s: &str, p: Precision, what: &str) -> Result<Vec<Real>, CliError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| real(t, p, what)).collect()
}

fn interval(s: &str, p: Precision, what: &str) -> Result<(Real, Real), CliError> {
    match reals(s, p, what)?.as_slice() {
        [lo, hi] if lo <= hi => Ok((lo.clone(), hi.clone())),
        _ => Err(usage(format!("{what}: expected lo,hi with lo ≤ hi"))),
    }
}

fn params(c: &Common, p: Precision) -> Result<BTreeMap<String, Real>, CliError> {
    let mut out = BTreeMap::new();
    for kv in &c.params {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--param expects NAME=VALUE, got '{kv}'")))?;
        out.insert(k.trim().to_string(), real(v, p, k.trim())?);
    }
    Ok(out)
}

fn read_text(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
}

impl MapArgs {
    fn given(&self) -> bool {
        self.map.is_some() || self.map_expr.is_some() || self.map_file.is_some()
    }

    fn resolve(&self) -> Result<MapSpec, CliError> {
        if let Some(name) = &self.map {
            return builtin_map(name).map_err(usage);
        }
        let text = match (&self.map_expr, &self.map_file) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => read_text(p)?,
            _ => return Err(usage("give one of --map, --map-expr or --map-file")),
        };
        MapSpec::parse("map", text.trim()).map_err(usage)
    }
}

impl LsysArgs {
    fn given(&self) -> bool {
        self.lsystem.is_some() || self.lsystem_text.is_some() || self.lsystem_file.is_some()
    }

    fn resolve(&self) -> Result<LSystemSpec, CliError> {
        if let Some(name) = &self.lsystem {
            return builtin_lsystem(name).map_err(usage);
        }
        let text = match (&self.lsystem_text, &self.lsystem_file) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => read_text(p)?,
            _ => return Err(usage("give one of --lsystem, --lsystem-text or --lsystem-file")),
        };
        parse_lsystem(&text).map_err(usage)
    }
}

fn either(map: &MapArgs, lsys: &LsysArgs) -> Result<System, CliError> {
    match (map.given(), lsys.given()) {
        (true, false) => Ok(System::Map(map.resolve()?)),
        (false, true) => Ok(System::LSystem(lsys.resolve()?)),
        _ => Err(usage("give exactly one map (--map…) or L-system (--lsystem…)")),
    }
}

/// One value per line or comma; a CSV with a `value` column is also read.
pub(crate) fn sequence_text(text: &str) -> String {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let first = lines.clone().next().unwrap_or("");
    let header: Vec<&str> = first.split(',').map(str::trim).collect();
    if let Some(col) = header.iter().position(|h| *h == "value") {
        lines.next();
        return lines.filter_map(|l| l.split(',').nth(col).map(str::trim)).collect::<Vec<_>>().join(",");
    }
    lines.flat_map(|l| l.split(',')).map(str::trim).filter(|t| !t.is_empty()).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct RunHeader<'a> {
    system: String,
    source: &'a str,
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Iterate(a) => {
            let d = precision(a.common.digits)?;
            let sys = System::Map(a.map.resolve()?);
            run_trajectory(&sys, &a.a, &a.common, a.n, d, &a.window)
        }
        Command::Liter(a) => {
            let d = precision(a.common.digits)?;
            let sys = System::LSystem(a.lsys.resolve()?);
            run_trajectory(&sys, &a.a, &a.common, a.n, d, &a.window)
        }
        Command::Detect(a) => detect(a),
        Command::VerifyHelix(a) => verify(a),
        Command::Skids(a) => skids(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Orderpoint(a) => orderpoint(a),
        Command::Classify(a) => {
            let d = precision(a.common.digits)?;
            let map = a.map.resolve()?;
            let cfg = classify_config(&a.opts, &a.common, d)?;
            let b = real(&a.b, d, "b")?;
            let class = classify(&map, &b, &cfg).map_err(runtime)?;
            #[derive(Serialize)]
            struct Out<'a> {
                map: String,
                b: &'a Real,
                class: &'a crate::scan::AttractorClass,
            }
            let body = json(&Out { map: map.text(), b: &b, class: &class })?;
            Ok(Outcome {
                stdout: format!("{}\n", class.tag),
                files: vec![("classify.json".into(), body)],
                code: EXIT_OK,
            })
        }
        Command::Sweep(a) => {
            let d = precision(a.common.digits)?;
            let map = a.map.resolve()?;
            let cfg = classify_config(&a.opts, &a.common, d)?;
            let (from, to, step) = (real(&a.from, d, "from")?, real(&a.to, d, "to")?, real(&a.step, d, "step")?);
            let jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let rows = sweep(&map, &from, &to, &step, &cfg, jobs).map_err(runtime)?;
            #[derive(Serialize)]
            struct AtlasConfig<'a> {
                map: String,
                from: &'a Real,
                to: &'a Real,
                step: &'a Real,
                classify: &'a ClassifyConfig,
            }
            let files = atlas_files(&rows, &AtlasConfig { map: map.text(), from: &from, to: &to, step: &step, classify: &cfg })
                .map_err(runtime)?;
            let csv = files.iter().find(|f| f.0 == "sweep.csv").map(|f| String::from_utf8_lossy(&f.1).into_owned());
            Ok(Outcome { stdout: csv.unwrap_or_default(), files, code: EXIT_OK })
        }
        Command::Refine(a) => {
            let d = precision(a.common.digits)?;
            let map = a.map.resolve()?;
            let cfg = classify_config(&a.opts, &a.common, d)?;
            let pred: BoundaryPredicate = a.predicate.parse().map_err(usage)?;
            let (lo, hi) = (real(&a.lo, d, "lo")?, real(&a.hi, d, "hi")?);
            let bracket = refine_boundary(&map, &lo, &hi, &pred, a.iterations, &cfg).map_err(runtime)?;
            let body = json(&bracket)?;
            Ok(Outcome {
                stdout: format!("[{}, {}]\n", bracket.lo, bracket.hi),
                files: vec![("refine.json".into(), body)],
                code: EXIT_OK,
            })
        }
        Command::Diverge(a) => {
            let d = precision(a.common.digits)?;
            let sys = either(&a.map, &a.lsys)?;
            let opts = DivergenceOptions { n: a.n, stride: a.stride, lambda: a.lambda, transient: a.transient };
            let rep = divergence_probe(
                &sys,
                &real(&a.a, d, "a")?,
                &real(&a.epsilon, d, "epsilon")?,
                &params(&a.common, d)?,
                d,
                &opts,
            )
            .map_err(runtime)?;
            let mut csv = Vec::new();
            rep.write_csv(&mut csv).map_err(runtime)?;
            let body = json(&rep)?;
            Ok(Outcome {
                stdout: String::from_utf8_lossy(&body).into_owned(),
                files: vec![("divergence.json".into(), body), ("divergence.csv".into(), csv)],
                code: EXIT_OK,
            })
        }
        Command::Transitivity(a) => {
            let d = precision(a.common.digits)?;
            let map = a.map.resolve()?;
            let t = System::Map(map)
                .run(&real(&a.a, d, "a")?, &params(&a.common, d)?, a.n, d, WindowPolicy::tail(1).with_full_frac())
                .map_err(runtime)?;
            let fs = t.frac_stream().expect("full fractions kept");
            let rep = transitivity_mod_r(fs, a.r, a.bins, a.n, a.skip).map_err(runtime)?;
            let body = json(&rep)?;
            Ok(Outcome {
                stdout: format!("coverage {}\n", rep.coverage),
                files: vec![("transitivity.json".into(), body)],
                code: failure_code(&t),
            })
        }
        Command::LsysProbe(a) => {
            let d = precision(a.common.digits)?;
            let spec = a.lsys.resolve()?;
            let u = interval(&a.u, d, "u")?;
            let v = interval(&a.v, d, "v")?;
            let rep = lsys_transitivity_probe(&spec, &params(&a.common, d)?, (&u.0, &u.1), (&v.0, &v.1), a.k_max, a.samples, d)
                .map_err(runtime)?;
            let body = json(&rep)?;
            let k = rep.k.map_or("none".to_string(), |k| k.to_string());
            Ok(Outcome { stdout: format!("k {k}\n"), files: vec![("lsys-probe.json".into(), body)], code: EXIT_OK })
        }
        Command::Attract(a) => {
            let d = precision(a.common.digits)?;
            let sys = either(&a.map, &a.lsys)?;
            let list = reals(&a.a_list, d, "a-list")?;
            let tol = real(&a.tol, d, "tol")?;
            let rep = mutual_attraction_check(&sys, &list, &params(&a.common, d)?, a.n, &tol, d).map_err(runtime)?;
            let body = json(&rep)?;
            Ok(Outcome {
                stdout: String::from_utf8_lossy(&body).into_owned(),
                files: vec![("attract.json".into(), body)],
                code: EXIT_OK,
            })
        }
        Command::Replay(_) => Err(usage("replay cannot be nested")),
    }
}

fn failure_code(t: &Trajectory) -> i32 {
    if t.failure().is_some() {
        EXIT_RUNTIME
    } else {
        EXIT_OK
    }
}

fn run_trajectory(sys: &System, a: &str, c: &Common, n: u64, d: Precision, window: &str) -> Result<Outcome, CliError> {
    let policy: WindowPolicy = window.parse().map_err(usage)?;
    let t = sys.run(&real(a, d, "a")?, &params(c, d)?, n, d, policy).map_err(runtime)?;
    #[derive(Serialize)]
    struct Out<'a> {
        #[serde(flatten)]
        header: RunHeader<'a>,
        trajectory: TrajectoryReport,
    }
    let csv = t.csv_string();
    let rep = Out { header: RunHeader { system: sys.name().to_string(), source: &t.source }, trajectory: t.report() };
    if let Some(f) = t.failure() {
        eprintln!("iteration stopped at index {}: {}", f.index, f.error);
    }
    Ok(Outcome {
        stdout: csv.clone(),
        files: vec![("trajectory.csv".into(), csv.into_bytes()), ("report.json".into(), json(&rep)?)],
        code: failure_code(&t),
    })
}

fn map_run(map: &MapArgs, c: &Common, a: &str, n: u64, policy: WindowPolicy) -> Result<(Trajectory, Precision), CliError> {
    let d = precision(c.digits)?;
    let t = System::Map(map.resolve()?).run(&real(a, d, "a")?, &params(c, d)?, n, d, policy).map_err(runtime)?;
    if let Some(f) = t.failure() {
        return Err(runtime(format!("iteration stopped at index {}: {}", f.index, f.error)));
    }
    Ok((t, d))
}

fn detect(a: &DetectArgs) -> Result<Outcome, CliError> {
    let policy = WindowPolicy { tail: (3 * a.j_max as u64).max(4096), ..WindowPolicy::default() };
    let (t, _) = map_run(&a.map, &a.common, &a.a, a.n, policy)?;
    let helix = detect_stable_helix(&t, a.j_max, a.tol, a.transient).map_err(runtime)?;
    #[derive(Serialize)]
    struct Out<'a> {
        trajectory: TrajectoryReport,
        helix: &'a Option<HelixDescriptor>,
    }
    let body = json(&Out { trajectory: t.report(), helix: &helix })?;
    let line = match &helix {
        Some(h) => format!("helix j={} c={}\n", h.j, h.c),
        None => "no helix\n".to_string(),
    };
    Ok(Outcome { stdout: line, files: vec![("detect.json".into(), body)], code: EXIT_OK })
}

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let d = precision(a.digits)?;
    let text = match (&a.seq, &a.seq_file) {
        (Some(s), _) => s.clone(),
        (None, Some(p)) => sequence_text(&read_text(p)?),
        _ => return Err(usage("give --seq or --seq-file")),
    };
    let seq = reals(&text, d, "seq")?;
    let r = real(&a.modulo, d, "modulo")?;
    let ok = verify_helix(&seq, a.period, &r).map_err(usage)?;
    #[derive(Serialize)]
    struct Out<'a> {
        sequence: &'a [Real],
        period: usize,
        modulo: &'a Real,
        helix: bool,
    }
    let body = json(&Out { sequence: &seq, period: a.period, modulo: &r, helix: ok })?;
    Ok(Outcome { stdout: format!("{ok}\n"), files: vec![("verify.json".into(), body)], code: EXIT_OK })
}

/// The (j, c) to scan against: explicit flags, else the detected candidate.
fn skid_target(t: &Trajectory, period: Option<usize>, increment: Option<f64>, theta: f64, transient: u64) -> Result<(usize, f64), CliError> {
    match (period, increment) {
        (Some(j), Some(c)) => Ok((j, c)),
        (None, None) => pseudo_helix_candidate(t.frac_stream().expect("full fractions kept"), 64, theta, transient)
            .ok_or_else(|| runtime("no pseudo-helix candidate with period ≤ 64; pass --period and --increment")),
        _ => Err(usage("--period and --increment go together")),
    }
}

fn skids(a: &SkidArgs) -> Result<Outcome, CliError> {
    let (t, _) = map_run(&a.map, &a.common, &a.a, a.n, WindowPolicy::tail(1).with_full_frac())?;
    let o = &a.skid;
    let (j, c) = skid_target(&t, o.period, o.increment, o.theta, o.transient)?;
    let stats = skid_scan(t.frac_stream().expect("full fractions kept"), j, c, &SkidParams {
        theta: o.theta,
        h: o.h,
        transient: o.transient,
    })
    .map_err(runtime)?;
    let mut csv = Vec::new();
    stats.write_csv(&mut csv).map_err(runtime)?;
    let body = json(&stats)?;
    Ok(Outcome {
        stdout: String::from_utf8_lossy(&body).into_owned(),
        files: vec![("skids.json".into(), body), ("episodes.csv".into(), csv)],
        code: EXIT_OK,
    })
}

fn calibrate(a: &CalibrateArgs) -> Result<Outcome, CliError> {
    let (t, _) = map_run(&a.map, &a.common, &a.a, a.n, WindowPolicy::tail(1).with_full_frac())?;
    let (j, c) = skid_target(&t, a.period, a.increment, SkidParams::default().theta, a.transient)?;
    let theta = calibrate_threshold(t.frac_stream().expect("full fractions kept"), j, c, a.transient)
        .ok_or_else(|| runtime("episode count is nowhere stable; no threshold suggested"))?;
    #[derive(Serialize)]
    struct Out {
        period: usize,
        increment: f64,
        theta: f64,
    }
    let body = json(&Out { period: j, increment: c, theta })?;
    Ok(Outcome { stdout: format!("theta {theta:.6}\n"), files: vec![("calibrate.json".into(), body)], code: EXIT_OK })
}

fn orderpoint(a: &OrderArgs) -> Result<Outcome, CliError> {
    let d = precision(a.common.digits)?;
    let map = a.map.resolve()?;
    let bs = reals(&a.b, d, "b")?;
    if bs.len() < 4 {
        return Err(usage("the fit needs at least four b values"));
    }
    let params = SkidParams { theta: a.theta, h: a.h, transient: 0 };
    let fit =
        order_point_fit(&map, &bs, &real(&a.a, d, "a")?, a.n, d, a.period, a.increment, &params).map_err(runtime)?;
    let body = json(&fit)?;
    Ok(Outcome {
        stdout: format!("b* {:.9} C {:.6} gamma {:.6}\n", fit.fit.b_star, fit.fit.c, fit.fit.gamma),
        files: vec![("orderpoint.json".into(), body)],
        code: EXIT_OK,
    })
}

fn classify_config(o: &ClassifyOpts, c: &Common, d: Precision) -> Result<ClassifyConfig, CliError> {
    let mut fixed = params(c, d)?;
    fixed.remove("b");
    let base = ClassifyConfig::default();
    Ok(ClassifyConfig {
        a_set: reals(&o.a_set, d, "a-set")?,
        fixed,
        n: o.n,
        escalate_to: o.escalate.max(o.n),
        digits: d.digits(),
        j_max: o.j_max,
        tol: o.tol,
        transient: o.transient,
        skid: SkidParams { theta: o.theta, transient: o.transient, ..base.skid },
        ..base
    })
}
