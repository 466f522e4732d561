use std::path::Path;
use std::process::{Command, Output};

fn piezo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_piezo"))
        .args(args)
        .output()
        .expect("run piezo")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn lambda_column(table: &str) -> Vec<String> {
    table
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap().to_string())
        .collect()
}

#[test]
fn sio2_table_matches_golden() {
    let o = piezo(&["solve", "--catalog", "SiO2", "--starts", "500", "--seed", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text, golden("sio2_solve.txt"));
    let positive: Vec<String> = lambda_column(&text).into_iter().filter(|v| v != "0.0").collect();
    let mut expected = vec!["0.137536"; 3];
    expected.extend(["0.13685"; 3]);
    expected.extend(["0.000686228"; 3]);
    assert_eq!(positive, expected);
}

#[test]
fn rbtao3_table_matches_golden() {
    let o = piezo(&["solve", "--catalog", "RbTaO3", "--starts", "500", "--seed", "0"]);
    assert_eq!(stdout(&o), golden("rbtao3_solve.txt"));
    let col = lambda_column(&stdout(&o));
    let mut distinct = col.clone();
    distinct.dedup();
    assert_eq!(distinct, ["12.4234", "7.82245", "6.91463", "5.14766", "4.38052"]);
}

#[test]
fn compare_banio3() {
    let o = piezo(&["compare", "--catalog", "BaNiO3"]);
    assert!(o.status.success());
    // rows of the unfolding are orthogonal, so μ* is the largest row norm
    let mu = (2.0 * 6.89822f64.powi(2) + 27.4628f64.powi(2)).sqrt();
    let gap = mu - 27.4628;
    assert_eq!(
        stdout(&o),
        format!("lambda_star=27.4628 mu_star={mu:.4} gap={gap:.5} strict=true\n")
    );
}

#[test]
fn zero_tensor_single_degenerate_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.pz");
    std::fs::write(&path, "piezo-tensor v1 dim=3\n").unwrap();
    let o = piezo(&["solve", "--tensor", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("1    0.0 "));
    assert!(rows[0].contains("degenerate"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.txt");
    let o = piezo(&[
        "largest",
        "--catalog",
        "BaNiO3",
        "--format",
        "lines",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("lambda=27.4628 x=0.0,0.0,1.0 "), "{text}");
}

#[test]
fn catalog_show_round_trips_through_solve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kbi2f7.pz");
    let o = piezo(&["catalog", "show", "KBi2F7"]);
    std::fs::write(&path, &o.stdout).unwrap();
    let from_file = piezo(&["solve", "--tensor", path.to_str().unwrap()]);
    let from_catalog = piezo(&["solve", "--catalog", "KBi2F7"]);
    assert_eq!(from_file.stdout, from_catalog.stdout);
    assert_eq!(stdout(&piezo(&["catalog", "list"])).lines().count(), 8);
}

#[test]
fn exit_codes() {
    let o = piezo(&["solve", "--catalog", "Quartz"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("available: VFeSb"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pz");
    std::fs::write(&bad, "piezo-tensor v1 dim=3\n1 1 2 0.5\n1 2 1 0.7\n").unwrap();
    let o = piezo(&["solve", "--tensor", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = piezo(&["solve", "--catalog", "SiO2", "--starts", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = piezo(&["solve", "--catalog", "SiO2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = piezo(&["rotate-check", "--catalog", "SiO2", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn physics_modes() {
    let o = piezo(&["physics", "--catalog", "VFeSb", "--mode", "strain", "--field", "0,0,-1"]);
    assert_eq!(
        stdout(&o),
        "    0.0  3.68181      0.0\n3.68181      0.0      0.0\n    0.0      0.0      0.0\nmax_eigenvalue=3.68181 max_abs_eigenvalue=3.68181\n"
    );
    let o = piezo(&["physics", "--catalog", "BaNiO3", "--mode", "max"]);
    let text = stdout(&o);
    assert!(text.starts_with("max_polarization=27.4628 "));
    assert!(text.contains("max_strain=27.4628 "));
}
