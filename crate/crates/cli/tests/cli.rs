use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ontalign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontalign"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn synth_align_eval_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&ontalign(&[
        "synth",
        "--generate",
        "people",
        "--size",
        "80",
        "--seed",
        "4",
        "--out",
        path(d),
    ]));
    let base = d.join("people.nt");
    let twin_dir = d.join("twin");
    ok(&ontalign(&[
        "synth",
        "--in",
        path(&base),
        "--drop-rate",
        "0.1",
        "--seed",
        "5",
        "--out",
        path(&twin_dir),
    ]));
    for f in [
        "twin.nt",
        "gold.tsv",
        "relations_gold.tsv",
        "classes_gold.tsv",
    ] {
        assert!(twin_dir.join(f).exists(), "{f}");
    }

    let out = d.join("out");
    ok(&ontalign(&[
        "align",
        "--o1",
        path(&base),
        "--o2",
        path(&twin_dir.join("twin.nt")),
        "--format",
        "ntriples",
        "--theta",
        "0.1",
        "--max-iters",
        "5",
        "--literal-sim",
        "exact",
        "--pair-limit",
        "10000",
        "--out",
        path(&out),
    ]));
    for f in [
        "instances.tsv",
        "relations.tsv",
        "classes.tsv",
        "diagnostics.jsonl",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let diagnostics = fs::read_to_string(out.join("diagnostics.jsonl")).unwrap();
    for line in diagnostics.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["iteration"].as_u64().is_some() && v["changed_fraction"].as_f64().is_some());
    }
    let relations = fs::read_to_string(out.join("relations.tsv")).unwrap();
    assert!(relations.lines().all(|l| l.split('\t').count() == 4));

    let gold = twin_dir.join("gold.tsv");
    let table = ok(&ontalign(&[
        "eval",
        "--pred",
        path(&out.join("instances.tsv")),
        "--gold",
        path(&gold),
    ]));
    assert!(table.contains("precision\t100.00%"), "{table}");

    let json = ok(&ontalign(&[
        "eval",
        "--pred",
        path(&out.join("instances.tsv")),
        "--gold",
        path(&gold),
        "--json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["recall"].as_f64().unwrap() > 0.9);

    let csv = ok(&ontalign(&[
        "sweep",
        "--table",
        path(&out.join("instances.tsv")),
        "--thresholds",
        "0.1,0.5,1.0",
        "--gold",
        path(&gold),
    ]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "threshold,retained,covered,precision");
    assert_eq!(lines.len(), 4);
}

#[test]
fn restaurants_and_tsv_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&ontalign(&[
        "synth",
        "--generate",
        "restaurants",
        "--format",
        "tsv",
        "--out",
        path(d),
    ]));
    let out = d.join("out");
    ok(&ontalign(&[
        "align",
        "--o1",
        path(&d.join("first.tsv")),
        "--o2",
        path(&d.join("second.tsv")),
        "--literal-sim",
        "normalized",
        "--threads",
        "2",
        "--dump-iterations",
        "--out",
        path(&out),
    ]));
    assert!(out.join("instances.1.tsv").exists());
    let table = ok(&ontalign(&[
        "eval",
        "--pred",
        path(&out.join("instances.tsv")),
        "--gold",
        path(&d.join("gold.tsv")),
    ]));
    assert!(table.contains("f_measure\t100.00%"), "{table}");
}

#[test]
fn stats_and_functionality_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("o.tsv");
    fs::write(&f, "a\tp\tb\na\tp\tc\nd\tp\tb\n").unwrap();
    let stats = ok(&ontalign(&["stats", path(&f)]));
    assert!(stats.starts_with("ontology,"));
    assert!(stats.lines().nth(1).unwrap().contains(",3,"));

    let funs = ok(&ontalign(&["functionality", "--in", path(&f)]));
    assert_eq!(
        funs.lines().next(),
        Some("relation,fun,inverse_fun,statements")
    );
    let row = funs.lines().find(|l| l.starts_with("p,")).unwrap();
    let fields: Vec<f64> = row.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert!((fields[0] - 2.0 / 3.0).abs() < 1e-12);
    assert!((fields[1] - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(fields[2], 3.0);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let good = d.join("ok.tsv");
    fs::write(&good, "a\tp\tb\n").unwrap();
    let bad = d.join("bad.nt");
    fs::write(&bad, "<a> <p> broken\n").unwrap();
    let out = path(&d.join("out")).to_string();

    let cases: Vec<Vec<&str>> = vec![
        vec![
            "align",
            "--o1",
            path(&bad),
            "--o2",
            path(&good),
            "--out",
            &out,
        ],
        vec![
            "align",
            "--o1",
            "/does/not/exist.tsv",
            "--o2",
            path(&good),
            "--out",
            &out,
        ],
        vec![
            "align",
            "--o1",
            path(&good),
            "--o2",
            path(&good),
            "--theta",
            "0",
            "--out",
            &out,
        ],
        vec!["eval", "--pred", path(&good), "--gold", path(&good)],
        vec!["sweep", "--table", path(&good), "--thresholds", "0.5,0.1"],
        vec![
            "synth",
            "--in",
            path(&good),
            "--drop-rate",
            "1.5",
            "--out",
            &out,
        ],
        vec!["align", "--o2", path(&good), "--out", &out],
    ];
    for args in cases {
        let result = ontalign(&args);
        assert_eq!(
            result.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&result.stderr)
        );
    }
}

#[test]
fn malformed_lines_can_be_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("o.nt");
    fs::write(&f, "<a> <p> <b> .\nnot a triple\n<c> <p> \"x\" .\n").unwrap();
    assert_eq!(ontalign(&["stats", path(&f)]).status.code(), Some(2));
    let out = ontalign(&["stats", "--skip-malformed", path(&f)]);
    let text = ok(&out);
    assert!(text.lines().nth(1).unwrap().contains(",2,"), "{text}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped 1"));
}
