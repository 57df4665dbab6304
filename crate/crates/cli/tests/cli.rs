use std::process::{Command, Output};

fn ifm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

#[test]
fn two_splitter_row() {
    let text = stdout(&ifm(&["sweep", "--eta", "0", "--n", "2"]));
    assert!(text.starts_with("N,eta,p_exact,p_approx\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let p: f64 = rows[0][2].parse().unwrap();
    assert!((p - 0.25).abs() < 1e-12);
}

#[test]
fn sweep_curves_are_ordered() {
    let text = stdout(&ifm(&["sweep", "--eta", "0,0.05,0.1,0.2", "--n", "2..500"]));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4 * 499);
    let p = |i: usize| rows[i][2].parse::<f64>().unwrap();
    for i in 0..499 {
        for k in 1..4 {
            assert!(p((k - 1) * 499 + i) > p(k * 499 + i));
        }
    }
}

#[test]
fn bell_measure_rate() {
    let text = stdout(&ifm(&["bell-measure", "--trials", "100000", "--seed", "7"]));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 100_000);
    let correct = rows.iter().filter(|r| r[4] == "true").count() as f64 / 1e5;
    assert!((0.745..=0.755).contains(&correct), "{correct}");
}

#[test]
fn output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = ifm(&[
            "cnot",
            "--trials",
            "300",
            "--seed",
            "11",
            "--format",
            "json",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 300);
    let keys: Vec<_> = rows[0].as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, ["trial", "b1", "b2", "success"]);
}

#[test]
fn seeds_change_trials() {
    let a = stdout(&ifm(&["bell-measure", "--trials", "50", "--seed", "1"]));
    let b = stdout(&ifm(&["bell-measure", "--trials", "50", "--seed", "2"]));
    assert_ne!(a, b);
}

#[test]
fn headers() {
    let cases: [(&[&str], &str); 7] = [
        (&["bell"], "state,mode,n_splitters,eta,fidelity,absorbed_mass"),
        (&["ghz", "--n", "50"], "state,mode,n_splitters,eta,fidelity,absorbed_mass"),
        (&["photon-bell", "--trials", "2"], "trial,label,fidelity"),
        (&["bell-measure", "--trials", "2"], "trial,true_label,reported_label,guessed,correct"),
        (&["cnot", "--trials", "2"], "trial,b1,b2,success"),
        (&["required-n"], "target_p,eta,n_estimate,n_exact_search"),
        (
            &["truth-table"],
            "mode,n_splitters,eta,control_in,target_in,out0_re,out0_im,out1_re,out1_im,absorbed_mass",
        ),
    ];
    for (args, header) in cases {
        let text = stdout(&ifm(args));
        assert_eq!(text.lines().next().unwrap(), header, "{args:?}");
    }
}

#[test]
fn required_n_columns() {
    let text = stdout(&ifm(&["required-n", "--target", "0.9", "--eta", "0"]));
    let rows = csv_rows(&text);
    assert_eq!(rows[0][2], "25");
    assert_eq!(rows[0][3], "24");
}

#[test]
fn gamma_row_in_truth_table() {
    let rows = csv_rows(&stdout(&ifm(&["truth-table"])));
    assert_eq!(rows.len(), 4);
    let blocked = &rows[3];
    assert_eq!((blocked[3].as_str(), blocked[4].as_str()), ("1", "1"));
    assert_eq!(blocked[9].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["sweep", "--bogus"][..],
        &["sweep", "--eta", "1.5"],
        &["sweep", "--n", "1"],
        &["sweep", "--n", "9..3"],
        &["cnot", "--trials", "0"],
        &["cnot", "--n", "10,20"],
        &["bell", "--eta", "0.1"],
        &["bell", "--format", "xml"],
        &["required-n", "--target", "1"],
        &[],
    ] {
        let out = ifm(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = ifm(&["sweep", "--n", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
