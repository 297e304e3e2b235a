use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn helixlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helixlab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_helix_fibonacci() {
    let dir = tempfile::tempdir().unwrap();
    let o = helixlab(dir.path(), &["verify-helix", "--seq", "1,1,2,3,5,8,13,21,34", "--period", "3", "--modulo", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true\n");
    assert_eq!(json(&dir.path().join("verify.json"))["helix"], true);
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["tool"], "helixlab");
    assert_eq!(m["outputs"][0]["path"], "verify.json");

    let o = helixlab(dir.path(), &["verify-helix", "--seq", "1,1,2,3,5,8,13,21,34", "--period", "3", "--modulo", "5"]);
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn iterate_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = helixlab(dir.path(), &["iterate", "--map", "identity", "--a", "7", "--n", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,value,frac");
    assert_eq!(lines.len(), 11);
    for (k, l) in lines[1..].iter().enumerate() {
        assert_eq!(*l, format!("{},7,0", k + 1));
    }
    assert_eq!(fs::read_to_string(dir.path().join("trajectory.csv")).unwrap(), text);
    assert_eq!(json(&dir.path().join("report.json"))["trajectory"]["last_value"], "7");
}

#[test]
fn iterate_reproduces_the_period_three_table() {
    // Terms 20000..20017 of u(1) = 0.8, b = 0.7, to 10 decimals.
    let want = [
        "13333.7162148952", "13334.1049995507", "13334.9345659839", "13335.7162148952", "13336.1049995507",
        "13336.9345659839", "13337.7162148952", "13338.1049995507", "13338.9345659839", "13339.7162148952",
        "13340.1049995507", "13340.9345659839", "13341.7162148952", "13342.1049995507", "13342.9345659839",
        "13343.7162148952", "13344.1049995507", "13344.9345659839",
    ];
    let dir = tempfile::tempdir().unwrap();
    let o = helixlab(
        dir.path(),
        &["iterate", "--map", "sine-drift", "--a", "0.8", "--param", "b=0.7", "--n", "20017", "--window", "tail:18"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<(u64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 18);
    for (k, ((n, v), w)) in rows.iter().zip(want).enumerate() {
        assert_eq!(*n, 20_000 + k as u64);
        assert!((v - w.parse::<f64>().unwrap()).abs() < 1e-9, "term {n}: {v} vs {w}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = helixlab(dir.path(), &["iterate", "--map", "no-such-map", "--a", "1", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-such-map"));
    assert_eq!(helixlab(dir.path(), &["iterate", "--bogus"]).status.code(), Some(1));
    assert_eq!(helixlab(dir.path(), &["iterate", "--map", "identity", "--a", "x1", "--n", "3"]).status.code(), Some(1));
    assert_eq!(helixlab(dir.path(), &["--help"]).status.code(), Some(0));

    // A pole at term 2: data up to the failure is still written.
    let o = helixlab(dir.path(), &["iterate", "--map-expr", "1/x", "--a", "0", "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["trajectory"]["failure"]["index"], 2);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn map_file_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("drift.map");
    fs::write(&map, "# unit drift\nx + step\n").unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# defaults\na = 2\nn = 4\nparam = step=0.5\n").unwrap();
    let out = dir.path().join("out");
    let o = helixlab(
        &out,
        &["iterate", "--config", cfg.to_str().unwrap(), "--map-file", map.to_str().unwrap(), "--n", "3"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // The flag overrides the file's n = 4.
    assert_eq!(stdout(&o), "n,value,frac\n1,2,0\n2,2.5,0.5\n3,3,0\n");
    // The manifest inlines the map text so replay does not need the file.
    let m = json(&out.join("manifest.json"));
    let argv: Vec<String> = m["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    assert!(argv.iter().any(|a| a.starts_with("--map-expr=") && a.ends_with("x + step")), "{argv:?}");
    fs::remove_file(&map).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_helixlab"))
        .args(["replay", out.join("manifest.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn replay_detects_changes() {
    let dir = tempfile::tempdir().unwrap();
    let o = helixlab(dir.path(), &["diverge", "--map", "sine-drift", "--param", "b=0.41", "--a", "0.5", "--n", "3000", "--stride", "100", "--transient", "500"]);
    assert_eq!(o.status.code(), Some(0));
    let manifest = dir.path().join("manifest.json");
    let replay = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_helixlab")).arg("replay").arg(&manifest).args(extra).output().unwrap()
    };
    let o = replay(&[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("identical\tdivergence.json") && text.contains("identical\tdivergence.csv"), "{text}");

    let mut m = json(&manifest);
    m["outputs"][1]["sha256"] = Value::String("0".repeat(64));
    fs::write(&manifest, serde_json::to_string(&m).unwrap()).unwrap();
    let o = replay(&[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("DIFFERS"));
}

#[test]
fn skids_near_the_order_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = helixlab(dir.path(), &["skids", "--map", "sine-drift", "--a", "0.5", "--param", "b=0.8872559", "--n", "100000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("skids.json"));
    assert_eq!(s["j"], 2);
    let mean: f64 = s["mean_laminar"].as_str().unwrap().parse().unwrap();
    assert!((mean - 6090.0).abs() <= 0.15 * 6090.0, "{mean}");
    let csv = fs::read_to_string(dir.path().join("episodes.csv")).unwrap();
    assert!(csv.starts_with("start,end,laminar_gap\n"));
}

#[test]
fn detect_and_lsystem_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = helixlab(dir.path(), &["detect", "--map", "sine-drift", "--a", "0.8", "--param", "b=0.7", "--n", "20000"]);
    assert_eq!(stdout(&o), "helix j=3 c=2\n");
    let d = json(&dir.path().join("detect.json"));
    assert_eq!(d["helix"]["fractional_cycle"].as_array().unwrap().len(), 3);

    let o = helixlab(dir.path(), &["liter", "--lsystem", "lfam-gamma-cos", "--a", "0", "--n", "3", "--window", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(rows[1], "0,0,0");
    assert_eq!(rows[2], "1,1,0");
    assert!(rows[3].starts_with("2,0.5403023058"));

    let o = helixlab(dir.path(), &["attract", "--lsystem", "lfam-gamma-cos", "--a-list", "0.1,0.5,2.7"]);
    assert_eq!(o.status.code(), Some(0));
    let a = json(&dir.path().join("attract.json"));
    assert_eq!(a["converged"], true);
}

#[test]
fn sweep_writes_an_atlas() {
    let dir = tempfile::tempdir().unwrap();
    let o = helixlab(
        dir.path(),
        &[
            "sweep", "--map", "sine-drift", "--from", "0.70", "--to", "0.702", "--step", "0.001", "--n", "20000",
            "--escalate", "20000", "--jobs", "2",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "b,class,period,increment,mean_laminar,evidence");
    assert_eq!(lines.len(), 4);
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!((f[1], f[2], f[3]), ("Helix", "3", "2"), "{l}");
    }
    let atlas = json(&dir.path().join("atlas.json"));
    let rows = atlas["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!(dir.path().join(r["diagnostics"].as_str().unwrap()).exists());
    }
}
