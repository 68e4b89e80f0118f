use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn cru(args: &[&str], paths: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cru"));
    cmd.args(args);
    for (flag, p) in paths {
        cmd.arg(flag).arg(p);
    }
    cmd.env_remove("OPENSKY_USERNAME").env_remove("OPENSKY_PASSWORD");
    cmd.output().unwrap()
}

fn ok(out: Output) -> Output {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn manifest(artifact: &Path) -> Value {
    let mut p = artifact.as_os_str().to_owned();
    p.push(".manifest.json");
    json(Path::new(&p))
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not a JSON error line: {text}"))
}

struct Pipeline {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Pipeline {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        ok(cru(
            &["donors", "--count", "60", "--seed", "1"],
            &[("--out", &root.join("donors.jsonl"))],
        ));
        ok(cru(
            &["augment", "--target-wer", "10", "--seed", "2"],
            &[
                ("--donors", &root.join("donors.jsonl")),
                ("--out", &root.join("corpus.jsonl")),
            ],
        ));
        Pipeline { _dir: dir, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }
}

#[test]
fn pipeline_with_manifests() {
    let p = Pipeline::new();
    let corpus = p.path("corpus.jsonl");
    let m = manifest(&corpus);
    assert_eq!(m["tool"], "cru");
    assert_eq!(m["subcommand"], "augment");
    assert_eq!(m["seed"], 2);
    let realized = m["realized_wer"].as_f64().unwrap();
    assert!((realized - 10.0).abs() <= 3.0, "{realized}");

    for mode in ["van", "sur"] {
        let preds = p.path(&format!("{mode}.jsonl"));
        ok(cru(
            &["recognize", "--mode", mode],
            &[("--corpus", &corpus), ("--out", &preds)],
        ));
        assert_eq!(manifest(&preds)["options"]["mode"], mode);
        let out = ok(cru(&["evaluate"], &[("--predictions", &preds)]));
        let metrics: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(metrics["n"], 60);
        let csa = metrics["csa"].as_f64().unwrap();
        let correct = metrics["correct"].as_f64().unwrap();
        assert!((csa - 100.0 * correct / 60.0).abs() < 1e-9);
    }
}

#[test]
fn sweep_writes_json_and_csv() {
    let p = Pipeline::new();
    let out = p.path("size.json");
    ok(cru(
        &[
            "sweep",
            "--parameter",
            "surveillance_size",
            "--values",
            "1,5,10",
            "--seed",
            "3",
        ],
        &[("--corpus", &p.path("corpus.jsonl")), ("--out", &out)],
    ));
    let report = json(&out);
    assert_eq!(report["parameter"], "surveillance_size");
    assert_eq!(report["points"].as_array().unwrap().len(), 3);
    assert_eq!(report["corpus"]["seed"], 2);
    let csv = std::fs::read_to_string(p.path("size.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# surveillance_size mode=sur");
    assert_eq!(lines[1], "value,csa,n");
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("1,"));
    assert_eq!(manifest(&out)["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn manifest_replays_the_run() {
    let p = Pipeline::new();
    let replay = p.path("replay.jsonl");
    let mut m = p.path("corpus.jsonl").into_os_string();
    m.push(".manifest.json");
    ok(cru(
        &["augment"],
        &[
            ("--config", Path::new(&m)),
            ("--donors", &p.path("donors.jsonl")),
            ("--out", &replay),
        ],
    ));
    assert_eq!(
        std::fs::read(p.path("corpus.jsonl")).unwrap(),
        std::fs::read(&replay).unwrap()
    );
}

#[test]
fn seed_is_chosen_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    ok(cru(&["donors", "--count", "20"], &[("--out", &a)]));
    let seed = manifest(&a)["seed"].as_u64().unwrap();
    ok(cru(
        &["donors", "--count", "20", "--seed", &seed.to_string()],
        &[("--out", &b)],
    ));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn toml_config_is_applied() {
    let p = Pipeline::new();
    let cfg = p.path("run.toml");
    std::fs::write(&cfg, "seed = 9\n[matcher]\nthreshold = 1.0\n").unwrap();
    let preds = p.path("strict.jsonl");
    ok(cru(
        &["recognize"],
        &[
            ("--config", &cfg),
            ("--corpus", &p.path("corpus.jsonl")),
            ("--out", &preds),
        ],
    ));
    let m = manifest(&preds);
    assert_eq!(m["seed"], 9);
    assert_eq!(m["config"]["matcher"]["threshold"], 1.0);
}

#[test]
fn usage_and_config_errors_exit_2() {
    let p = Pipeline::new();
    let corpus = p.path("corpus.jsonl");
    let missing = p.path("no-such-registry.tsv");
    let out = cru(
        &["recognize"],
        &[("--registry", &missing), ("--corpus", &corpus), ("--out", &p.path("x"))],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_error(&out);
    assert!(
        err["message"].as_str().unwrap().contains("no-such-registry.tsv"),
        "{err}"
    );

    let bad = p.path("bad.toml");
    std::fs::write(&bad, "[matcher]\nthreshold = 3.0\n").unwrap();
    let out = cru(
        &["recognize"],
        &[("--config", &bad), ("--corpus", &corpus), ("--out", &p.path("x"))],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "invalid_config");

    std::fs::write(&bad, "[matcher]\nthreshhold = 0.5\n").unwrap();
    let out = cru(
        &["recognize"],
        &[("--config", &bad), ("--corpus", &corpus), ("--out", &p.path("x"))],
    );
    assert_eq!(out.status.code(), Some(2));

    let out = cru(
        &["recognize", "--mode", "both"],
        &[("--corpus", &corpus), ("--out", &p.path("x"))],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = cru(&["frobnicate"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(ok(cru(&["--help"], &[])).stdout.starts_with(b"Call-sign"));
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let preds = dir.path().join("p.jsonl");
    std::fs::write(&preds, "{\"target\": \"DLH1\"}\n").unwrap();
    let out = cru(&["evaluate"], &[("--predictions", &preds)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error(&out)["error"], "schema");

    let out = cru(
        &["recognize"],
        &[("--corpus", &dir.path().join("missing.jsonl")), ("--out", &preds)],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error(&out)["error"], "io");
}

#[test]
fn fetch_from_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("frame.json");
    std::fs::write(
        &fixture,
        r#"[{"time": 1600000000, "states": [
            {"callsign": "DLH83K ", "lat": 50.1, "lon": 8.6},
            {"callsign": "RYR853K", "lat": 40.0, "lon": 8.6},
            {"callsign": "BAW12", "lat": 50.0, "lon": 8.5}]},
           {"time": 1600000100, "states": [{"callsign": "AFR1", "lat": 50.0, "lon": 8.5}]}]"#,
    )
    .unwrap();
    let out = dir.path().join("snap.json");
    ok(cru(
        &["fetch", "--time", "1600000000", "--lat", "50.0", "--lon", "8.5"],
        &[("--fixture", &fixture), ("--out", &out)],
    ));
    let snap = json(&out);
    assert_eq!(snap["callsigns"], serde_json::json!(["BAW12", "DLH83K"]));
    assert_eq!(snap["dropped"], 0);
    assert_eq!(manifest(&out)["options"]["provider"], "offline");

    let out2 = dir.path().join("wide.json");
    ok(cru(
        &[
            "fetch",
            "--time",
            "1600000050",
            "--lat",
            "50.0",
            "--lon",
            "8.5",
            "--radius-km",
            "2000",
            "--window-s",
            "60",
        ],
        &[("--fixture", &fixture), ("--out", &out2)],
    ));
    assert_eq!(json(&out2)["callsigns"].as_array().unwrap().len(), 4);

    let out = cru(
        &["fetch", "--time", "0", "--lat", "95", "--lon", "0"],
        &[("--fixture", &fixture), ("--out", &out)],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fetch_over_http_reports_unavailable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fetch.toml");
    std::fs::write(&cfg, "[fetch.http]\nmax_attempts = 1\ntimeout_s = 2.0\n").unwrap();
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let out = cru(
        &[
            "fetch",
            "--time",
            "1600000000",
            "--lat",
            "50",
            "--lon",
            "8",
            "--base-url",
            &format!("http://127.0.0.1:{port}"),
        ],
        &[("--config", &cfg), ("--out", &dir.path().join("s.json"))],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error(&out)["error"], "provider_unavailable");
}
