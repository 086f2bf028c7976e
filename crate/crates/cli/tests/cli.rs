use std::path::PathBuf;
use std::process::{Command, Output};

use treefid::{advantage_threshold, favg_closed, TreeKind, WernerParam};

fn treefid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treefid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = treefid(args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn records(csv_text: &str) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers().unwrap().clone();
    let rows = r.records().map(Result::unwrap).collect();
    (header, rows)
}

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name]
        .iter()
        .collect();
    p.display().to_string()
}

#[test]
fn fidelity_row_and_round_trip() {
    let text = ok_stdout(&[
        "fidelity", "--kind", "dsbt", "--nodes", "15", "--p", "0.3333",
    ]);
    let (header, rows) = records(&text);
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["kind", "depth", "N", "p", "f_avg", "epsilon", "method"]
    );
    assert_eq!(rows.len(), 1);
    let f: f64 = rows[0][4].parse().unwrap();
    assert!((f - 0.593).abs() < 0.001);
    let exact = favg_closed(TreeKind::Dsbt, 3, WernerParam::new(0.3333).unwrap()).unwrap();
    assert_eq!(f, exact.f_avg);
    assert_eq!(rows[0][5].parse::<f64>().unwrap(), exact.epsilon);
    assert!(!text.contains('\r'));

    let text = ok_stdout(&["fidelity", "--kind", "dabt", "--depth", "1", "--p", "1.0"]);
    assert_eq!(records(&text).1[0][4].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn methods_agree() {
    let mut values = Vec::new();
    for m in ["closed", "census", "enumerate"] {
        let text = ok_stdout(&[
            "fidelity", "--kind", "usbt", "--depth", "4", "--p", "0.6", "--method", m,
        ]);
        values.push(records(&text).1[0][4].parse::<f64>().unwrap());
    }
    assert!(
        values.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12),
        "{values:?}"
    );
}

#[test]
fn invalid_arguments_exit_2() {
    let out = treefid(&["fidelity", "--kind", "usbt", "--nodes", "16", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("16 not of form 2^(d+1)-1"));

    for args in [
        &[
            "fidelity", "--kind", "dabt", "--depth", "2", "--nodes", "5", "--p", "0.5",
        ][..],
        &["fidelity", "--kind", "dabt", "--depth", "2", "--p", "1.5"],
        &["fidelity", "--kind", "xbt", "--depth", "2", "--p", "0.5"],
        &["fidelity", "--kind", "dabt", "--depth", "0", "--p", "0.5"],
        &[
            "threshold",
            "--kind",
            "dabt",
            "--depth",
            "2",
            "--target",
            "0.4",
        ],
        &[
            "melinks", "--kind", "dabt", "--depth", "2", "--p", "0.5", "--m", "9",
        ],
        &["sweep", "--kinds", "usbt", "--nodes", "16", "--p", "0.5"],
    ] {
        assert_eq!(treefid(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn size_guard_exits_3() {
    assert_eq!(
        treefid(&["tree", "--kind", "dsbt", "--depth", "30"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        treefid(&[
            "census",
            "--kind",
            "usbt",
            "--depth",
            "12",
            "--method",
            "enumeration"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        treefid(&["fidelity", "--kind", "usbt", "--depth", "500", "--p", "0.5"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn census_rows() {
    let (header, rows) = records(&ok_stdout(&["census", "--kind", "dsbt", "--depth", "3"]));
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["kind", "depth", "r", "count", "method"]
    );
    let counts: Vec<&str> = rows.iter().map(|r| r.get(3).unwrap()).collect();
    assert_eq!(counts, ["14", "12", "8"]);
    let (_, rows) = records(&ok_stdout(&[
        "census",
        "--kind",
        "usbt",
        "--depth",
        "3",
        "--method",
        "enumeration",
        "--summary",
    ]));
    assert_eq!(&rows[0][3], "105");
    assert_eq!(&rows[0][5], "enumeration");
}

#[test]
fn threshold_matches_library() {
    let (_, rows) = records(&ok_stdout(&[
        "threshold",
        "--kind",
        "dabt",
        "--nodes",
        "127",
    ]));
    let p: f64 = rows[0][3].parse().unwrap();
    assert_eq!(
        p,
        advantage_threshold(TreeKind::Dabt, 63, 2.0 / 3.0)
            .unwrap()
            .p_star
    );
}

#[test]
fn melinks_rows() {
    let (header, rows) = records(&ok_stdout(&[
        "melinks", "--kind", "dsbt", "--nodes", "15", "--p", "0.333",
    ]));
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        [
            "kind",
            "depth",
            "p",
            "m",
            "f_avg",
            "strategy",
            "chosen_edges"
        ]
    );
    assert_eq!(rows.len(), 15);
    assert_eq!(&rows[14][4], "1");
    assert!(rows.iter().all(|r| &r[5] == "exhaustive"));

    let (_, rows) = records(&ok_stdout(&[
        "melinks",
        "--kind",
        "dsbt",
        "--nodes",
        "15",
        "--p",
        "0.333",
        "--threshold",
    ]));
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][3], "3");
    assert_eq!(rows[0][6].split(' ').count(), 3);

    let (_, rows) = records(&ok_stdout(&[
        "melinks",
        "--kind",
        "dabt",
        "--nodes",
        "15",
        "--p",
        "0.333",
        "--strategy",
        "expected",
        "--threshold",
    ]));
    assert_eq!(&rows[0][3], "7");
}

#[test]
fn montecarlo_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("trials.csv");
    let args = [
        "montecarlo",
        "--kind",
        "usbt",
        "--depth",
        "3",
        "--trials",
        "25",
        "--seed",
        "9",
    ];
    let a = ok_stdout(&args);
    let mut with_csv = args.to_vec();
    with_csv.extend(["--per-trial-csv", csv_path.to_str().unwrap()]);
    let b = ok_stdout(&with_csv);
    assert_eq!(a, b);

    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    for key in [
        "kind",
        "depth",
        "N",
        "trials",
        "seed",
        "mean",
        "std_error",
        "predicted_p_half",
        "per_trial",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let per_trial: Vec<f64> = v["per_trial"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(per_trial.len(), 25);

    let (_, rows) = records(&std::fs::read_to_string(&csv_path).unwrap());
    let from_csv: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(from_csv, per_trial);
}

#[test]
fn sweep_from_config() {
    let text = ok_stdout(&["sweep", "--config", &config("fidelity_n15.conf")]);
    let (_, rows) = records(&text);
    assert_eq!(rows.len(), 404);
    let kinds: Vec<&str> = rows.iter().map(|r| r.get(0).unwrap()).collect();
    assert_eq!(kinds[0], "DABT");
    assert_eq!(kinds[403], "USBT");
    let ps: Vec<f64> = rows[..101].iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(ps.windows(2).all(|w| w[0] < w[1]));
    assert_eq!((ps[0], ps[100]), (0.0, 1.0));

    // deterministic, and flags override the file
    assert_eq!(
        text,
        ok_stdout(&["sweep", "--config", &config("fidelity_n15.conf")])
    );
    let (_, rows) = records(&ok_stdout(&[
        "sweep",
        "--config",
        &config("fidelity_n15.conf"),
        "--kinds",
        "uabt",
        "--p",
        "0.5",
    ]));
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "UABT");
}

#[test]
fn sweep_thresholds_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("thresholds.csv");
    ok_stdout(&[
        "sweep",
        "--config",
        &config("threshold_vs_n.conf"),
        "--out",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = records(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["kind", "depth", "N", "p_star"]
    );
    assert_eq!(rows.len(), 36);
    for r in &rows {
        let kind: TreeKind = r[0].parse().unwrap();
        let d: u32 = r[1].parse().unwrap();
        let p: f64 = r[3].parse().unwrap();
        assert_eq!(p, advantage_threshold(kind, d, 2.0 / 3.0).unwrap().p_star);
    }

    let text = ok_stdout(&[
        "sweep",
        "--config",
        &config("fidelity_p09_vs_n.conf"),
        "--nodes",
        "4095",
    ]);
    let (_, rows) = records(&text);
    let f = |k: &str| {
        rows.iter().find(|r| &r[0] == k).unwrap()[4]
            .parse::<f64>()
            .unwrap()
    };
    assert!(f("DSBT") > 2.0 / 3.0);
    for k in ["DABT", "UABT", "USBT"] {
        assert!(f(k) < 2.0 / 3.0, "{k}");
    }
}

#[test]
fn io_errors_exit_4() {
    let out = treefid(&[
        "sweep",
        "--config",
        &config("threshold_vs_n.conf"),
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(
        treefid(&["sweep", "--config", "/nonexistent-dir/none.conf"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn verify_passes_and_reports_injected_fault() {
    let out = treefid(&["verify"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );

    let out = treefid(&["verify", "--inject-census-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("kind=USBT, d=3, r=2"), "{err}");
}

#[test]
fn tree_edge_list() {
    let text = ok_stdout(&["tree", "--kind", "usbt", "--depth", "2"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# kind=USBT depth=2 directed=false"));
    assert_eq!(
        lines.collect::<Vec<_>>(),
        ["1 2", "1 3", "2 4", "2 5", "3 6", "3 7"]
    );
}

#[test]
fn help_documents_flags() {
    let cases: [(&str, &[&str]); 9] = [
        (
            "fidelity",
            &[
                "--kind", "--depth", "--nodes", "--p", "--method", "--format", "--out",
            ],
        ),
        (
            "census",
            &["--kind", "--depth", "--nodes", "--method", "--summary"],
        ),
        ("threshold", &["--target"]),
        (
            "melinks",
            &["--p", "--m", "--strategy", "--threshold", "--target"],
        ),
        (
            "montecarlo",
            &["--trials", "--seed", "--out", "--per-trial-csv"],
        ),
        ("asymptotic", &["--from", "--to", "--step"]),
        (
            "sweep",
            &[
                "--config",
                "--kinds",
                "--depths",
                "--nodes",
                "--p-start",
                "--p-stop",
                "--p-steps",
            ],
        ),
        ("verify", &["--level"]),
        ("tree", &["--kind", "--out"]),
    ];
    for (cmd, flags) in cases {
        let text = ok_stdout(&[cmd, "--help"]);
        for f in flags {
            assert!(text.contains(f), "{cmd} --help lacks {f}");
        }
    }
    assert!(!ok_stdout(&["verify", "--help"]).contains("inject"));
}
