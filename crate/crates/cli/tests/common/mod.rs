//! Golden-file cases for the `ballcover` binary, shared by the `golden` and
//! `acceptance` test targets.
//!
//! Each case runs the binary with `--json` from `tests/golden/inputs` and
//! compares the report, minus `timings`, with `tests/golden/expected/<name>.json`.
//! Set `UPDATE_GOLDEN=1` to rewrite the expected files.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub env: &'static [(&'static str, &'static str)],
    pub exit: i32,
}

const fn case(name: &'static str, args: &'static [&'static str], exit: i32) -> Case {
    Case { name, args, env: &[], exit }
}

pub const CASES: &[Case] = &[
    case("derive_euclidean", &["derive", "lp2.json", "--x", "3,4", "--y", "1,0"], 0),
    case("derive_linf_kink", &["derive", "linf2.json", "--x", "2,-2", "--y", "1,3"], 0),
    case("derive_both", &["derive", "lp2.json", "--x", "1,0", "--y", "1,1", "--method", "both"], 0),
    case("derive_both_polyhedral_kink", &["derive", "hex.json", "--x", "0,1", "--y", "1,0", "--method", "both"], 0),
    case("derive_zero_x", &["derive", "lp2.json", "--x", "0,0", "--y", "1,0"], 3),
    case("derive_bad_number", &["derive", "lp2.json", "--x", "1,a", "--y", "1,0"], 2),
    case("derive_wrong_length", &["derive", "lp2.json", "--x", "1,0,0", "--y", "1,0"], 2),
    case("derive_missing_file", &["derive", "nope.json", "--x", "1,0", "--y", "1,0"], 2),
    case("derive_malformed_json", &["derive", "not_json.json", "--x", "1,0", "--y", "1,0"], 2),
    case("derive_invalid_space", &["derive", "bad.json", "--x", "1,0", "--y", "1,0"], 2),
    Case {
        name: "derive_tolerance_override",
        args: &["derive", "lp2.json", "--x", "1,0", "--y", "1,1"],
        env: &[("BALLCOVER_TOL", "1e-6")],
        exit: 0,
    },
    Case {
        name: "derive_bad_tolerance",
        args: &["derive", "lp2.json", "--x", "1,0", "--y", "1,1"],
        env: &[("BALLCOVER_TOL", "abc")],
        exit: 2,
    },
    case("witness_positive", &["witness", "lp2.json", "--x", "1,0", "--y", "1,1", "--side", "pos"], 0),
    case("witness_negative", &["witness", "lp2.json", "--x", "1,0", "--y", "-1,0.1", "--side", "neg"], 0),
    case("witness_classify_orthogonal", &["witness", "lp2.json", "--x", "1,0", "--y", "0,1", "--side", "classify"], 0),
    case("witness_classify_linf", &["witness", "linf2.json", "--x", "1,1", "--y", "1,-1", "--side", "classify"], 0),
    case("witness_absent", &["witness", "lp2.json", "--x", "1,0", "--y", "0,1", "--side", "pos"], 0),
    case("witness_zero_y", &["witness", "lp2.json", "--x", "1,0", "--y", "0,0", "--side", "pos"], 3),
    case("cover_build_n1", &["cover", "lp2.json", "build-n1", "--delta", "0.01"], 0),
    case("cover_build_n1_3d", &["cover", "lp3_3d.json", "build-n1", "--delta", "0.05"], 0),
    case("cover_build_n1_nonsmooth", &["cover", "linf2.json", "build-n1", "--delta", "0.01"], 3),
    case("cover_build_2n_linf", &["cover", "linf2.json", "build-2n", "--delta", "0.01"], 0),
    case("cover_build_2n_l1_basis_not_exposed", &["cover", "l1_2.json", "build-2n", "--delta", "0.01"], 3),
    case(
        "cover_build_2n_l1",
        &["cover", "l1_2.json", "build-2n", "--delta", "0.01", "--functionals-file", "functionals_l1.json"],
        0,
    ),
    case("cover_build_2n_coarse", &["cover", "lp2.json", "build-2n", "--delta", "0.9"], 5),
    case(
        "cover_from_functionals_points",
        &["cover", "lp2.json", "from-functionals", "--functionals-file", "functionals_l2.json", "--points-file", "points_l2.json"],
        0,
    ),
    case("cover_from_functionals_sphere", &["cover", "lp2.json", "from-functionals", "--functionals-file", "functionals_l2.json"], 0),
    case("cover_verify_failing", &["cover", "lp2.json", "verify", "--covering-file", "small_balls.json"], 5),
    case("cover_verify_missing_file", &["cover", "lp2.json", "verify"], 2),
    case("cover_adversary_two_balls", &["cover", "lp2.json", "adversary", "--covering-file", "two_balls.json"], 0),
    case("cover_adversary_symmetric", &["cover", "lp2.json", "adversary", "--covering-file", "two_balls.json", "--symmetric"], 0),
    case("separate_sixteen_points", &["separate", "inst.json"], 0),
    case("separate_linf_negative", &["separate", "inst_linf_neg.json"], 5),
    case("separate_l1_selections", &["separate", "inst_l1.json"], 0),
    case("separate_closure_verified", &["separate", "closure_ok.json"], 0),
    case("separate_closure_orthogonal", &["separate", "closure_orth.json"], 5),
    case("smooth_transfer", &["smooth", "linf2.json", "--x", "1,1", "--y", "1,0.5"], 0),
    case("smooth_hypothesis_violated", &["smooth", "linf2.json", "--x", "1,1", "--y", "1,-1"], 3),
    case("smooth_not_linf_space", &["smooth", "lp2.json", "--x", "1,1", "--y", "1,0.5"], 3),
];

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ballcover")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.current_dir(golden_dir().join("inputs")).args(args).env_remove("BALLCOVER_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// The report with its timing fields removed.
pub fn structured(stdout: &str) -> Result<Value, String> {
    let mut v: Value = serde_json::from_str(stdout).map_err(|e| format!("report is not JSON: {e}\n{stdout}"))?;
    v.as_object_mut().ok_or("report is not an object")?.remove("timings");
    Ok(v)
}

pub fn check_case(c: &Case) -> Result<(), String> {
    let mut args = vec!["--json"];
    args.extend_from_slice(c.args);
    let out = run(&args, c.env);
    if out.code != c.exit {
        return Err(format!("{}: exit {} (expected {})\nstderr: {}", c.name, out.code, c.exit, out.stderr));
    }
    let report = structured(&out.stdout)?;
    if report["exit_code"] != c.exit {
        return Err(format!("{}: report exit_code {} (expected {})", c.name, report["exit_code"], c.exit));
    }
    let path = golden_dir().join("expected").join(format!("{}.json", c.name));
    let text = serde_json::to_string_pretty(&report).expect("serializes") + "\n";
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(());
    }
    let expected = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != text {
        return Err(format!("{}: report differs from {}\n--- got ---\n{text}", c.name, path.display()));
    }
    Ok(())
}

pub const ROUND_TRIPS: &[(&str, &str, &[&str])] = &[
    ("lp2.json", "build-n1", &["--delta", "0.01"]),
    ("linf2.json", "build-2n", &["--delta", "0.01"]),
    ("hex.json", "build-2n", &["--delta", "0.02", "--functionals-file", "functionals_hex.json"]),
    (
        "lp2.json",
        "from-functionals",
        &["--functionals-file", "functionals_l2.json", "--points-file", "points_l2.json"],
    ),
];

/// Builds a covering file, verifies it with `--out`, and requires the rewritten
/// file to be byte-identical and the recomputed certificate to match.
pub fn check_round_trip(space: &str, action: &str, extra: &[&str]) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let mut args = vec!["cover", space, action, "--out", first.to_str().unwrap()];
    args.extend_from_slice(extra);
    let built = run(&args, &[]);
    if built.code != 0 {
        return Err(format!("{space} {action}: build exited {}: {}", built.code, built.stderr));
    }
    let verified = run(
        &["--json", "cover", space, "verify", "--covering-file", first.to_str().unwrap(), "--out", second.to_str().unwrap()],
        &[],
    );
    if verified.code != 0 {
        return Err(format!("{space} {action}: verify exited {}: {}", verified.code, verified.stderr));
    }
    let report = structured(&verified.stdout)?;
    if report["verdicts"]["matches_file_certificate"] != Value::Bool(true) {
        return Err(format!("{space} {action}: recomputed certificate differs from the file"));
    }
    let a = fs::read(&first).map_err(|e| e.to_string())?;
    let b = fs::read(&second).map_err(|e| e.to_string())?;
    if a != b {
        return Err(format!("{space} {action}: covering file changed across verify"));
    }
    Ok(())
}

/// Identical inputs give identical reports; whitespace in input files does not
/// change the digest.
pub fn check_determinism() -> Result<(), String> {
    let args = ["--json", "cover", "linf2.json", "build-2n", "--delta", "0.05"];
    let a = structured(&run(&args, &[]).stdout)?;
    let b = structured(&run(&args, &[]).stdout)?;
    if a != b {
        return Err("repeated run produced a different report".into());
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spaced = dir.path().join("linf2_spaced.json");
    fs::write(&spaced, "  {\"dim\" :2,\n\n \"norm\": {\"p\": \"inf\",   \"kind\": \"lp\"}}  \n").map_err(|e| e.to_string())?;
    let c = structured(&run(&["--json", "cover", spaced.to_str().unwrap(), "build-2n", "--delta", "0.05"], &[]).stdout)?;
    if a["inputs_digest"] != c["inputs_digest"] {
        return Err("digest depends on input formatting".into());
    }
    Ok(())
}

/// Text mode prints the headline quantities.
pub fn check_text_mode() -> Result<(), String> {
    let out = run(&["derive", "linf2.json", "--x", "2,-2", "--y", "1,3"], &[]);
    if out.code != 0 || !out.stdout.contains("rho_minus = -6") || !out.stdout.contains("rho_plus = 2") {
        return Err(format!("unexpected text output:\n{}", out.stdout));
    }
    let out = run(&["smooth", "linf2.json", "--x", "1,1", "--y", "1,-1"], &[]);
    if out.code != 3 || !out.stderr.contains("hypothesis violated") {
        return Err(format!("unexpected error output (exit {}):\n{}", out.code, out.stderr));
    }
    Ok(())
}

pub fn check_svg() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cover_svg = dir.path().join("cover.svg");
    let adv_svg = dir.path().join("adversary.svg");
    let a = run(&["cover", "linf2.json", "build-2n", "--delta", "0.05", "--svg", cover_svg.to_str().unwrap()], &[]);
    let b = run(
        &["cover", "lp2.json", "adversary", "--covering-file", "two_balls.json", "--svg", adv_svg.to_str().unwrap()],
        &[],
    );
    if a.code != 0 || b.code != 0 {
        return Err(format!("svg runs exited {} and {}", a.code, b.code));
    }
    for (path, balls, marked) in [(&cover_svg, 4, 0), (&adv_svg, 2, 1)] {
        let svg = fs::read_to_string(path).map_err(|e| e.to_string())?;
        if !svg.starts_with("<svg") || !svg.contains(r#"viewBox="0 0 800 800""#) || !svg.trim_end().ends_with("</svg>") {
            return Err(format!("{} is not a well-formed figure", path.display()));
        }
        // Balls plus the sphere itself.
        if svg.matches("<polygon").count() != balls + 1 {
            return Err(format!("{}: wrong polygon count", path.display()));
        }
        if svg.matches("#d0021b").count() != marked {
            return Err(format!("{}: wrong marked-point count", path.display()));
        }
        let sphere = svg.lines().find(|l| l.contains("stroke-width=\"1.5\"")).ok_or("no sphere polygon")?;
        if sphere.matches(',').count() != 720 {
            return Err(format!("{}: sphere not sampled at 720 segments", path.display()));
        }
    }
    let three_d = run(&["cover", "lp3_3d.json", "build-n1", "--delta", "0.05", "--svg", "x.svg"], &[]);
    if three_d.code != 3 {
        return Err(format!("svg for a 3-d space exited {} (expected 3)", three_d.code));
    }
    Ok(())
}

/// Every check, as `(label, outcome)`.
pub fn all_checks() -> Vec<(String, Result<(), String>)> {
    let mut out: Vec<(String, Result<(), String>)> = CASES.iter().map(|c| (c.name.to_string(), check_case(c))).collect();
    for (space, action, extra) in ROUND_TRIPS {
        out.push((format!("round_trip {space} {action}"), check_round_trip(space, action, extra)));
    }
    out.push(("determinism".into(), check_determinism()));
    out.push(("text_mode".into(), check_text_mode()));
    out.push(("svg".into(), check_svg()));
    out
}
