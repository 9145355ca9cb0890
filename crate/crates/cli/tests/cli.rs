use std::process::{Command, Output};

use cellbath_cli::run::{read_csv, DEPHASE_COLUMNS, ENTANGLE_COLUMNS};

fn cellbath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellbath"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn curie_prints_integers() {
    assert_eq!(stdout(&cellbath(&["curie"])).trim(), "3");
    assert_eq!(stdout(&cellbath(&["curie", "--spin", "1"])).trim(), "8");
}

#[test]
fn recipe_fig2_emits_dephasing_csv() {
    let o = cellbath(&["recipe", "fig2", "--n-points", "51"]);
    assert!(o.status.success());
    let (header, rows) = read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(header, DEPHASE_COLUMNS);
    assert_eq!(rows.len(), 51);
    assert_eq!(rows[50][0], Some(50.0));
    // |F^eta| starts at one
    assert!((rows[0][3].unwrap() - 1.0).abs() < 1e-14);
    assert!(String::from_utf8_lossy(&o.stderr).contains("h_z=0.5J"));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "entangle",
        "--alpha",
        "1",
        "--gamma",
        "1",
        "--eta",
        "4",
        "--n-points",
        "41",
    ];
    let a = cellbath(&args);
    let b = cellbath(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (header, _) = read_csv(a.stdout.as_slice()).unwrap();
    assert_eq!(header, ENTANGLE_COLUMNS);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, "temperature = 2.5\nn_points = 11\nt_max = 10\n").unwrap();
    let o = cellbath(&[
        "dephase",
        "--config",
        cfg.to_str().unwrap(),
        "--n-points",
        "21",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[20][0], Some(10.0));
}

#[test]
fn invalid_input_exits_nonzero() {
    for args in [
        vec!["dephase", "--temperature", "-1"],
        vec!["dephase", "--n-points", "1"],
        vec!["recipe", "fig99"],
        vec!["transition", "--spin", "banana"],
        vec!["frobnicate"],
    ] {
        let o = cellbath(&args);
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn warns_above_curie_without_aborting() {
    let o = cellbath(&["dephase", "--temperature", "3.5", "--n-points", "5"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Curie"));
}

#[test]
fn recipe_list_names_every_preset() {
    let listing = stdout(&cellbath(&["recipe", "--list"]));
    for r in cellbath_cli::recipes::RECIPES {
        assert!(listing.lines().any(|l| l.split_whitespace().next() == Some(r.name)));
    }
}

#[test]
fn sweep_writes_index() {
    let dir = tempfile::tempdir().unwrap();
    let o = cellbath(&[
        "sweep",
        "--kind",
        "dephase",
        "--vary",
        "temperature=1.5,2",
        "--vary",
        "hz=0.1,0.5",
        "--n-points",
        "11",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let index = std::fs::read_to_string(dir.path().join("index.csv")).unwrap();
    assert_eq!(index.lines().count(), 5);
}

#[test]
fn quick_verify_passes() {
    let o = cellbath(&["verify", "--quick"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text
        .lines()
        .any(|l| l.starts_with("c4.dephasing_oracle ") && l.ends_with("PASS")));
    assert!(text.contains("population_denominator"));
}
