use std::process::Command;

fn bvac(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bvac")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bvac").chain(args.iter().copied());
    let code = bvac_cli::run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn coincident_scan_is_one_separable_row_at_minus_quarter() {
    let (code, out, _) = bvac(&["scan", "--z", "1", "--zprime", "1", "--r", "0", "--L", "0.1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "r,z,zprime,L,F_expanded,F_detform,verdict,max_flag");
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[4].parse::<f64>().unwrap(), -0.25);
    assert_eq!(fields[6], "separable");
    assert_eq!(fields[7], "true");
    assert!(!out.contains('\r'));
}

#[test]
fn casimir_at_unit_height() {
    let (code, out, _) = in_process(&["casimir", "--z", "1", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rho = v["records"][0]["energy_density"].as_f64().unwrap();
    assert!((rho + 6.33257e-3).abs() < 1e-8);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["subcommand"], "casimir");
}

#[test]
fn usage_errors_exit_two_and_name_the_problem() {
    for args in [
        vec!["scan", "--z", "0.01", "--zprime", "1", "--L", "0.1"],
        vec!["scan", "--z", "1:2"],
        vec!["scan", "--zprime", "1"],
        vec!["casimir", "--z", "-1"],
        vec!["scan", "--z", "1", "--zprime", "1", "--format", "xml"],
        vec!["nonsense"],
        vec!["oracle-lattice", "--z", "0.3", "--spacing", "0.1"],
    ] {
        let (code, out, err) = in_process(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.trim().is_empty(), "{args:?}");
    }
    let (_, _, err) = in_process(&["scan", "--z", "0.01", "--zprime", "1", "--L", "0.1"]);
    assert!(err.contains("crosses the wall"), "{err}");
}

#[test]
fn help_exits_zero() {
    let (code, out, err) = in_process(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("find-max"));
    assert!(err.is_empty());
}

#[test]
fn flags_override_config_file() {
    let dir = std::env::temp_dir().join(format!("bvac-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let recipe = dir.join("recipe.txt");
    std::fs::write(&recipe, "# sweep\nz = 1\nzprime = 1:2:2\nL = 0.05\nformat = json\n").unwrap();
    let recipe = recipe.to_str().unwrap();

    let (code, out, _) = in_process(&["scan", "--config", recipe]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 2);

    let (code, out, _) = in_process(&["scan", "--config", recipe, "--format", "csv", "--zprime", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().nth(1).unwrap().contains(",3.0000000000000000e0,"));

    let (code, _, err) = in_process(&["scan", "--config", dir.join("missing").to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn out_flag_writes_identical_files_for_identical_runs() {
    let dir = std::env::temp_dir().join(format!("bvac-out-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    for path in [&a, &b] {
        let (code, out, _) = bvac(&[
            "scan", "--z", "0.5:2:7", "--zprime", "0.5:2:7", "--r", "0:3:4", "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert_eq!(text.lines().count(), 1 + 7 * 7 * 4);
    // every coincident point (r = 0, z = zprime) is flagged
    let flagged = text.lines().filter(|l| l.ends_with(",true")).count();
    assert_eq!(flagged, 7);
}

#[test]
fn find_max_lands_on_coincidence() {
    let (code, out, _) = in_process(&[
        "find-max", "--z", "0.5:2:2", "--zprime", "0.5:2:2", "--r", "0:2:2", "--L", "0.1", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rec = &v["records"][0];
    assert_eq!(rec["r"].as_f64().unwrap(), 0.0);
    assert_eq!(rec["z"], rec["zprime"]);
    assert!((rec["F"].as_f64().unwrap() + 0.25).abs() <= 1e-9);

    let (code, out, _) = in_process(&["find-max", "--z", "1", "--zprime", "2:3:2", "--L", "0.1", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["records"][0]["F"].as_f64().unwrap() < -0.25);
}

#[test]
fn small_verify_run_passes_and_reports_seed() {
    let (code, out, _) = in_process(&["verify", "--seed", "3", "--samples", "200"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["diagnostics"]["seed"], 3);
    assert_eq!(v["diagnostics"]["all_passed"], true);
    assert_eq!(v["inputs"]["seed"], "3");
}

#[test]
fn momentum_oracle_default_probes() {
    let (code, out, _) = in_process(&["oracle-momentum", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 8);
    assert!(records.iter().all(|r| r["relative_error"].as_f64().unwrap() < 1e-3));
}
