use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use diva::report::load_report;

fn diva(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diva"))
        .args(args)
        .output()
        .expect("run diva")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn identity() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("x.csv"), "1,0\n0,1\n").unwrap();
        std::fs::write(dir.path().join("y.csv"), "0\n1\n").unwrap();
        Fixture { dir }
    }

    /// Noisy two-blob data written by `diva generate`.
    fn noisy() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let o = diva(&[
            "generate",
            "--out-dir",
            s(dir.path()),
            "--n-per-class",
            "60",
            "--seed",
            "7",
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        Fixture { dir }
    }

    fn p(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn fit_identity_predicts_one_half() {
    let f = Fixture::identity();
    let out = f.p("r.json");
    let o = diva(&[
        "fit",
        "--features",
        s(&f.p("x.csv")),
        "--labels",
        s(&f.p("y.csv")),
        "--lambda",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = load_report(&out).unwrap();
    assert_eq!(r.lambda.0, 1.0);
    let pred = r.predictions.unwrap();
    let expect = [[0.5, 0.0], [0.0, 0.5]];
    for i in 0..2 {
        for c in 0..2 {
            assert!((pred[i][c].0 - expect[i][c]).abs() < 1e-15);
        }
    }
    assert!(r.lambda_search.is_none());
}

#[test]
fn fit_default_grid_lists_25_lambdas() {
    let f = Fixture::identity();
    let out = f.p("r.json");
    let o = diva(&[
        "fit",
        "--features",
        s(&f.p("x.csv")),
        "--labels",
        s(&f.p("y.csv")),
        "--lambda-grid",
        "default",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let grid = load_report(&out).unwrap().lambda_search.unwrap();
    assert_eq!(grid.len(), 25);
    assert_eq!(grid[0].lambda.0, 2f64.powi(-20));
    assert_eq!(grid[24].lambda.0, 16.0);
}

#[test]
fn missing_labels_file_exits_2_naming_path() {
    let f = Fixture::identity();
    let missing = f.p("absent_labels.csv");
    let o = diva(&[
        "fit",
        "--features",
        s(&f.p("x.csv")),
        "--labels",
        s(&missing),
        "--lambda",
        "1",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("absent_labels.csv"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    let f = Fixture::identity();
    let (x, y) = (f.p("x.csv"), f.p("y.csv"));
    let base = ["--features", s(&x), "--labels", s(&y)];
    let cases: Vec<Vec<&str>> = vec![
        vec!["fit", "--bogus"],
        vec![
            "fit",
            base[0],
            base[1],
            base[2],
            base[3],
            "--lambda",
            "1",
            "--lambda-grid",
            "default",
        ],
        vec![
            "reweight", base[0], base[1], base[2], base[3], "--mode", "heldout",
        ],
        vec![
            "reweight",
            base[0],
            base[1],
            base[2],
            base[3],
            "--val-features",
            s(&x),
            "--val-labels",
            s(&y),
        ],
        vec!["fit", base[0], base[1], base[2], base[3], "--lambda", "-1"],
        vec![
            "fit",
            base[0],
            base[1],
            base[2],
            base[3],
            "--lambda-grid",
            "1,abc",
        ],
        vec![
            "detect",
            base[0],
            base[1],
            base[2],
            base[3],
            "--epsilon",
            "nan",
        ],
        vec!["nosuchcommand"],
        vec![],
    ];
    for args in cases {
        let o = diva(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_for_every_subcommand() {
    for sub in [
        "fit",
        "reweight",
        "extend",
        "detect",
        "loo",
        "gradcheck",
        "generate",
    ] {
        let o = diva(&[sub, "--help"]);
        assert_eq!(code(&o), 0, "{sub}");
        assert!(
            String::from_utf8_lossy(&o.stdout).contains("Usage"),
            "{sub}"
        );
    }
}

#[test]
fn detect_infinite_epsilon_is_empty() {
    let f = Fixture::noisy();
    let out = f.p("r.json");
    let o = diva(&[
        "detect",
        "--features",
        s(&f.p("train_features.csv")),
        "--labels",
        s(&f.p("train_labels.csv")),
        "--epsilon",
        "inf",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = load_report(&out).unwrap();
    assert!(r.detrimental.is_empty());
    assert_eq!(r.gradient.unwrap().len(), 60);

    let o = diva(&[
        "detect",
        "--features",
        s(&f.p("train_features.csv")),
        "--labels",
        s(&f.p("train_labels.csv")),
        "--epsilon",
        "-inf",
        "--truth",
        s(&f.p("flipped.txt")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = load_report(&out).unwrap();
    assert_eq!(r.detrimental.len(), 60);
    assert!(r.metrics.contains_key("auc") && r.metrics.contains_key("f1_at_zero"));
}

#[test]
fn gradcheck_loo_passes() {
    let o = diva(&["gradcheck", "--which", "loo", "--fd-step", "1e-5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("max relative error"));
    for which in ["val", "jacobian"] {
        let o = diva(&["gradcheck", "--which", which, "--seed", "3"]);
        assert_eq!(
            code(&o),
            0,
            "{which}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
    }
    for loss in ["ce", "ce-misclassified"] {
        let o = diva(&["gradcheck", "--which", "loo", "--loss", loss]);
        assert_eq!(
            code(&o),
            0,
            "{loss}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
    }
}

#[test]
fn gradcheck_failure_exits_1() {
    let o = diva(&[
        "gradcheck",
        "--which",
        "val",
        "--fd-step",
        "0.5",
        "--tolerance",
        "1e-12",
    ]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn reweight_trajectory_has_initial_plus_steps() {
    let f = Fixture::noisy();
    let out = f.p("r.json");
    let o = diva(&[
        "reweight",
        "--features",
        s(&f.p("train_features.csv")),
        "--labels",
        s(&f.p("train_labels.csv")),
        "--test-features",
        s(&f.p("test_features.csv")),
        "--test-labels",
        s(&f.p("test_labels.csv")),
        "--steps",
        "4",
        "--lr",
        "0.15",
        "--mode",
        "loo",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = load_report(&out).unwrap();
    assert_eq!(r.trajectory.len(), 5);
    assert!(r.trajectory.windows(2).all(|w| w[0].step < w[1].step));
    assert_eq!(r.weights.len(), 60);
    assert!(r.weights.iter().all(|w| w.0 >= 0.0));
    assert!(r.metrics.contains_key("test_error_rate"));
    assert_eq!(r.lambda_search.unwrap().len(), 25);
}

#[test]
fn extend_and_loo_reports() {
    let f = Fixture::noisy();
    let out = f.p("r.json");
    let o = diva(&[
        "extend",
        "--features",
        s(&f.p("train_features.csv")),
        "--labels",
        s(&f.p("train_labels.csv")),
        "--pool-features",
        s(&f.p("test_features.csv")),
        "--pool-labels",
        s(&f.p("test_labels.csv")),
        "--batch",
        "4",
        "--max-rounds",
        "2",
        "--lambda",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = load_report(&out).unwrap();
    assert!(r.selected_indices.len() <= 8);
    assert_eq!(r.weights.len(), 120);
    assert!(r.trajectory.len() <= 3);

    let o = diva(&[
        "loo",
        "--features",
        s(&f.p("train_features.csv")),
        "--labels",
        s(&f.p("train_labels.csv")),
        "--lambda",
        "1",
        "--gradient",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = load_report(&out).unwrap();
    assert_eq!(r.per_sample_loss.unwrap().len(), 60);
    assert_eq!(r.gradient.unwrap().len(), 60);
    assert_eq!(r.predictions.unwrap().len(), 60);
}

#[test]
fn divm_format_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let o = diva(&[
        "generate",
        "--out-dir",
        s(dir.path()),
        "--n-per-class",
        "20",
        "--format",
        "divm",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = diva(&[
        "fit",
        "--features",
        s(&dir.path().join("train_features.divm")),
        "--labels",
        s(&dir.path().join("train_labels.divm")),
        "--format",
        "divm",
        "--lambda",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"schema_version\": 1"));
}

#[test]
fn thread_cap_does_not_change_output() {
    let f = Fixture::noisy();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_diva"))
            .args([
                "detect",
                "--features",
                s(&f.p("train_features.csv")),
                "--labels",
                s(&f.p("train_labels.csv")),
            ])
            .env("DIVA_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("0");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&run("many")), 2);
}
