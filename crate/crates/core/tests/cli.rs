use std::process::{Command, Output};

fn g2flow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2flow"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("g2flow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_reports_the_shrinking_soliton() {
    let o = g2flow(&[
        "classify",
        "--catalog",
        "htype",
        "--param",
        "a=0.25",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["F"].as_f64().unwrap() - 81.0 / 17.0).abs() < 1e-9);
    assert_eq!(v["soliton"]["kind"], "shrinking");
    assert!((v["soliton"]["c"].as_f64().unwrap() - 1.5).abs() < 1e-9);
}

#[test]
fn dump_then_input_round_trips_exactly() {
    let dumped = g2flow(&[
        "catalog", "dump", "htype", "--param", "a=0.3", "--format", "json",
    ]);
    assert_eq!(dumped.status.code(), Some(0));
    let path = scratch("htype.json");
    std::fs::write(&path, &dumped.stdout).unwrap();

    let from_catalog = g2flow(&[
        "inspect",
        "--catalog",
        "htype",
        "--param",
        "a=0.3",
        "--format",
        "json",
    ]);
    let from_file = g2flow(&[
        "inspect",
        "--input",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(stdout(&from_catalog), stdout(&from_file));

    // the parsed structure serializes back to the same document
    let redump: serde_json::Value = serde_json::from_slice(&dumped.stdout).unwrap();
    let reparsed: g2flow::cli::StructureJson = serde_json::from_value(redump.clone()).unwrap();
    let s = reparsed.to_structure().unwrap();
    let again = g2flow::cli::StructureJson::from_structure("htype(a=0.3)", &s);
    assert_eq!(serde_json::to_value(&again).unwrap(), redump);
}

#[test]
fn validation_failures_exit_with_two() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    for args in [
        vec!["classify", "--catalog", "nope"],
        vec!["classify", "--input", bad.to_str().unwrap()],
        vec!["soliton", "--catalog", "bryant-homogeneous"],
        vec!["classify", "--catalog", "htype"],
        vec!["classify", "--catalog", "flat", "--tol", "bogus=1"],
    ] {
        let o = g2flow(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn non_closed_input_is_rejected() {
    let path = scratch("open.json");
    let doc = r#"{"lie_algebra":{"dim":7,"brackets":[{"i":1,"j":2,"out":{"3":1.0}}]},
                 "phi":[{"indices":[1,2,7],"coeff":1.0},{"indices":[3,4,7],"coeff":1.0},{"indices":[5,6,7],"coeff":1.0},
                        {"indices":[1,3,5],"coeff":1.0},{"indices":[1,4,6],"coeff":-1.0},{"indices":[2,3,6],"coeff":-1.0},{"indices":[2,4,5],"coeff":-1.0}]}"#;
    std::fs::write(&path, doc).unwrap();
    let o = g2flow(&["classify", "--input", path.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn sweep_keeps_grid_order_and_f_decreases() {
    let o = g2flow(&[
        "sweep",
        "--catalog",
        "htype",
        "--param",
        "a=0.25:3:0.25",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,F,c,kind"));
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    let a: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let f: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(a.windows(2).all(|w| w[1] > w[0]));
    assert!(f.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(rows[3][3], "steady");
    assert_eq!(rows[0][3], "shrinking");
    assert_eq!(rows[11][3], "expanding");
}

#[test]
fn flow_csv_matches_the_bryant_closed_form() {
    let o = g2flow(&[
        "flow",
        "--catalog",
        "bryant-homogeneous",
        "--t-end",
        "0.05",
        "--dt",
        "1e-4",
        "--sample-every",
        "100",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (t_col, e145, e123) = (col("t"), col("e145"), col("e123"));
    let mut n = 0;
    for line in lines {
        let row: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let t = row[t_col];
        assert!((row[e145] - (12.0 * t).exp()).abs() < 1e-9 * (12.0 * t).exp());
        assert!((row[e123] - 1.0).abs() < 1e-9);
        n += 1;
    }
    assert_eq!(n, 6);
}

#[test]
fn bracket_flow_and_catalog_list() {
    let out = scratch("bracket.csv");
    let o = g2flow(&[
        "bracket-flow",
        "--param",
        "a=2",
        "--param",
        "b=1",
        "--param",
        "c=0.5",
        "--t-end",
        "0.01",
        "--dt",
        "1e-3",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("t,a,b,c,f,funcG,H,F"));
    assert_eq!(text.lines().count(), 12);

    let o = g2flow(&["catalog", "list"]);
    assert_eq!(o.status.code(), Some(0));
    for name in [
        "flat",
        "bryant-homogeneous",
        "triple",
        "htype",
        "mu-a",
        "mu-b",
    ] {
        assert!(stdout(&o).contains(name), "{name}");
    }
}
