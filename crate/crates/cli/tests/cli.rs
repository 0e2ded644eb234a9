use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qisc(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qisc"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("QISC_OUT_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const QUICK: &[&str] = &[
    "--epochs",
    "2",
    "--trials",
    "1",
    "--layers",
    "2",
    "--batch-size",
    "8",
];

#[test]
fn gen_data_writes_reproducible_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&qisc(&a, &["gen-data", "--seed", "3"])), 0);
    assert_eq!(code(&qisc(&b, &["gen-data", "--seed", "3"])), 0);
    let train = fs::read_to_string(a.join("train.csv")).unwrap();
    assert_eq!(
        train.lines().next().unwrap(),
        "Bx_nT,By_nT,Bz_nT,heading_deg"
    );
    assert_eq!(train.lines().count(), 201);
    assert_eq!(
        fs::read_to_string(a.join("test.csv"))
            .unwrap()
            .lines()
            .count(),
        51
    );
    for f in ["train.csv", "test.csv", "dataset.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }

    let again = qisc(&a, &["gen-data", "--seed", "4"]);
    assert_eq!(code(&again), 1);
    assert_eq!(fs::read_to_string(a.join("train.csv")).unwrap(), train);
    assert_eq!(code(&qisc(&a, &["--force", "gen-data", "--seed", "4"])), 0);
    assert_ne!(fs::read_to_string(a.join("train.csv")).unwrap(), train);
}

#[test]
fn invalid_configuration_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(
        &cfg,
        "[dataset.bounds]\nbx = [5.0, -5.0]\nby = [-1.0, 1.0]\nbz = [-1.0, 1.0]\n",
    )
    .unwrap();
    let o = qisc(
        &tmp.path().join("d"),
        &["--config", cfg.to_str().unwrap(), "gen-data"],
    );
    assert_eq!(code(&o), 2);

    assert_eq!(code(&qisc(tmp.path(), &["train", "--epochs", "1"])), 2);
    assert_eq!(
        code(&qisc(tmp.path(), &["train", "--generate", "--lr", "-1"])),
        2
    );
    assert_eq!(
        code(&qisc(
            tmp.path(),
            &["train", "--generate", "--batch-size", "500"]
        )),
        2
    );
    assert_eq!(
        code(&qisc(tmp.path(), &["train", "--pipeline", "sideways"])),
        2
    );
}

#[test]
fn train_writes_report_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let mut args = vec!["train", "--generate", "--cumulative"];
    args.extend(QUICK);
    let o = qisc(&out, &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let results = stdout_json(&o);
    assert_eq!(results["trials"].as_array().unwrap().len(), 1);
    let curves = fs::read_to_string(out.join("curves.csv")).unwrap();
    assert_eq!(
        curves.lines().next().unwrap(),
        "epoch,trial,train_loss,test_loss"
    );
    assert_eq!(curves.lines().count(), 3);
    assert!(out.join("curves_cumulative.csv").exists());
    assert!(out.join("results.json").exists());
    let params = fs::read_to_string(out.join("params_trial_0.txt")).unwrap();
    assert_eq!(params.lines().count(), 12);

    let e = qisc(
        &out,
        &[
            "eval",
            "--params",
            out.join("params_trial_0.txt").to_str().unwrap(),
            "--layers",
            "2",
            "--data",
            out.join("data").to_str().unwrap(),
        ],
    );
    assert_eq!(code(&e), 0);
    let loss = stdout_json(&e)["mean_loss"].as_f64().unwrap();
    let last_test = curves
        .lines()
        .last()
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse::<f64>()
        .unwrap();
    assert_eq!(loss, last_test);
}

#[test]
fn nan_target_aborts_with_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    assert_eq!(
        code(&qisc(&data, &["gen-data", "--train", "8", "--test", "2"])),
        0
    );
    let path = data.join("train.csv");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut cols: Vec<&str> = lines[1].split(',').collect();
    cols[3] = "NaN";
    lines[1] = cols.join(",");
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let mut args = vec!["train", "--data", data.to_str().unwrap()];
    args.extend(QUICK);
    let o = qisc(&tmp.path().join("run"), &args);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("aborted"));
}

#[test]
fn compare_generates_both_runs_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let mut args = vec!["compare", "--generate", "--threshold", "1e-9"];
    args.extend(QUICK);
    let oa = qisc(&a, &args);
    assert_eq!(code(&oa), 0, "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(code(&qisc(&b, &args)), 0);
    for f in ["comparison.csv", "comparison.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let csv = fs::read_to_string(a.join("comparison.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "epoch,ico_train,ico_test,def_train,def_test"
    );
    let summary = stdout_json(&oa);
    assert_eq!(summary["ico_epochs_to_threshold"], "not reached");
    assert_eq!(summary["def_epochs_to_threshold"], "not reached");
    assert!(summary["ico_converges_faster"].is_null());

    let ico = a.join("ico");
    let same = qisc(
        &tmp.path().join("self"),
        &[
            "compare",
            "--ico",
            ico.to_str().unwrap(),
            "--definite",
            ico.to_str().unwrap(),
            "--threshold",
            "10",
        ],
    );
    assert_eq!(code(&same), 0);
    let s = stdout_json(&same);
    assert_eq!(s["max_abs_train_gap"], 0.0);
    assert_eq!(s["ico_epochs_to_threshold"], 1);
}

#[test]
fn compare_rejects_mismatched_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    assert_eq!(
        code(&qisc(&data, &["gen-data", "--train", "16", "--test", "4"])),
        0
    );
    let run = |name: &str, epochs: &str, pipeline: &str| {
        let dir = tmp.path().join(name);
        let o = qisc(
            &dir,
            &[
                "train",
                "--data",
                data.to_str().unwrap(),
                "--pipeline",
                pipeline,
                "--epochs",
                epochs,
                "--trials",
                "1",
                "--layers",
                "1",
                "--batch-size",
                "8",
            ],
        );
        assert_eq!(code(&o), 0);
        dir
    };
    let ico = run("ico", "2", "ico");
    let def = run("def", "3", "definite");
    let o = qisc(
        &tmp.path().join("cmp"),
        &[
            "compare",
            "--ico",
            ico.to_str().unwrap(),
            "--definite",
            def.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("epochs"));
}

#[test]
fn gradcheck_passes_and_catches_injected_fault() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = qisc(tmp.path(), &["gradcheck", "--instances", "3"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let reports = stdout_json(&ok);
    assert_eq!(reports.as_array().unwrap().len(), 2);
    assert!(reports
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["passed"] == true));

    let coarse = qisc(
        tmp.path(),
        &[
            "gradcheck",
            "--instances",
            "2",
            "--step",
            "1e-4",
            "--pipeline",
            "ico",
        ],
    );
    assert_eq!(code(&coarse), 0);

    let bad = qisc(
        tmp.path(),
        &["gradcheck", "--instances", "2", "--inject-sign-flip"],
    );
    assert_eq!(code(&bad), 5);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("coordinate 0"));
}
