#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod report;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ballcover::covering::{
    adversary_uncovered, cover_from_functionals, smooth_cover_n_plus_1, symmetric_cover_2n, verify_cover,
};
use ballcover::derivatives::{rho_analytic, rho_finite_difference};
use ballcover::files::{functionals_from_json, CoveringFile, InstanceFile, TargetSpec};
use ballcover::orthogonality::classify_pair;
use ballcover::separation::{
    closure_precondition_check, positively_separates, selection_oracle_exhaustive, separation_ballcover_equivalence,
    ConclusionStatus,
};
use ballcover::smoothapprox::{transfer_witness, SmoothingSequence, DEFAULT_N_MAX};
use ballcover::witness::{negative_witness, positive_witness, WitnessOutcome};
use ballcover::{Covering64, Error, Functional64, Space64, TargetSet64, Tolerances, Vector64};

use report::{CliError, Run, EXIT_INTERNAL, EXIT_NEGATIVE};

/// Net points drawn in SVG output at most.
const SVG_NET_POINTS: usize = 4000;

#[derive(Parser)]
#[command(name = "ballcover", version, about = "Norm derivatives, local ball-covering witnesses and certified ball-coverings")]
struct Cli {
    /// Print the structured run report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One-sided norm derivatives rho'-(x, y) and rho'+(x, y).
    Derive {
        space: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
    },
    /// Ball on the line through x containing y and excluding the origin.
    Witness {
        space: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, value_enum, default_value_t = SideArg::Pos)]
        side: SideArg,
    },
    /// Build, verify or attack ball-coverings of the unit sphere.
    Cover {
        space: PathBuf,
        #[arg(value_enum)]
        action: CoverAction,
        /// Net resolution for unit-sphere targets.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// JSON list of functionals; defaults to the coordinate functionals.
        #[arg(long)]
        functionals_file: Option<PathBuf>,
        /// JSON list of target points (from-functionals); defaults to the unit sphere.
        #[arg(long)]
        points_file: Option<PathBuf>,
        #[arg(long)]
        covering_file: Option<PathBuf>,
        /// Where to write the covering file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Treat the candidate as mirrored pairs (adversary).
        #[arg(long)]
        symmetric: bool,
    },
    /// Positive separation by selections and its ball-covering counterpart.
    Separate { instance: PathBuf },
    /// Transfer a witness from x to nearby smooth points.
    Smooth {
        space: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, value_enum, default_value_t = SeqArg::Linf)]
        seq: SeqArg,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        nmax: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Analytic,
    Fd,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Pos,
    Neg,
    Classify,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoverAction {
    #[value(name = "build-2n")]
    Build2n,
    #[value(name = "build-n1")]
    BuildN1,
    FromFunctionals,
    Verify,
    Adversary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeqArg {
    Linf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = match &cli.command {
        Command::Derive { .. } => "derive",
        Command::Witness { .. } => "witness",
        Command::Cover { .. } => "cover",
        Command::Separate { .. } => "separate",
        Command::Smooth { .. } => "smooth",
    };
    let mut run = Run::new(name);
    let code = match dispatch(&cli.command, &mut run) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            run.verdict("error", json!({ "message": e.message }));
            e.code
        }
    };
    if cli.json {
        let report = run.finish(code);
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        for line in run.lines() {
            println!("{line}");
        }
    }
    ExitCode::from(code as u8)
}

fn dispatch(command: &Command, run: &mut Run) -> Result<i32, CliError> {
    match command {
        Command::Derive { space, x, y, method } => cmd_derive(run, space, x, y, *method),
        Command::Witness { space, x, y, side } => cmd_witness(run, space, x, y, *side),
        Command::Cover { space, action, .. } => cmd_cover(run, space, *action, command),
        Command::Separate { instance } => cmd_separate(run, instance),
        Command::Smooth { space, x, y, seq: _, nmax } => cmd_smooth(run, space, x, y, *nmax),
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn tolerances() -> Result<Tolerances<f64>, CliError> {
    let mut tol = Tolerances::default();
    if let Ok(raw) = std::env::var("BALLCOVER_TOL") {
        let v: f64 = raw.trim().parse().map_err(|_| CliError::parse(format!("BALLCOVER_TOL is not a number: {raw}")))?;
        if !(v >= 0.0) || !v.is_finite() {
            return Err(CliError::parse(format!("BALLCOVER_TOL must be a non-negative number, got {raw}")));
        }
        tol.analytic = v;
    }
    Ok(tol)
}

fn load_space(run: &mut Run, path: &Path) -> Result<Space64, CliError> {
    let value = read_json(path)?;
    run.input("space", value.clone());
    let space: Space64 = serde_json::from_value(value).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let tol = tolerances()?;
    run.input("analytic_tolerance", json!(tol.analytic));
    Ok(space.with_tolerances(tol))
}

fn parse_vector(run: &mut Run, key: &str, text: &str, dim: usize) -> Result<Vector64, CliError> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::parse(format!("--{key}: cannot parse '{t}' as a number"))))
        .collect::<Result<_, _>>()?;
    if coords.len() != dim {
        return Err(CliError::parse(format!("--{key}: expected {dim} coordinates, got {}", coords.len())));
    }
    run.input(key, json!(coords));
    Vector64::new(coords).map_err(|e| CliError::parse(format!("--{key}: {e}")))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn cmd_derive(run: &mut Run, space: &Path, x: &str, y: &str, method: MethodArg) -> Result<i32, CliError> {
    let space = load_space(run, space)?;
    let x = parse_vector(run, "x", x, space.dim())?;
    let y = parse_vector(run, "y", y, space.dim())?;
    let method_name = match method {
        MethodArg::Analytic => "analytic",
        MethodArg::Fd => "fd",
        MethodArg::Both => "both",
    };
    run.input("method", json!(method_name));
    let analytic = if method != MethodArg::Fd { Some(run.timed("analytic", || rho_analytic(&space, &x, &y))?) } else { None };
    let fd = if method != MethodArg::Analytic {
        Some(run.timed("finite_difference", || rho_finite_difference(&space, &x, &y))?)
    } else {
        None
    };
    for (label, pair) in [("analytic", &analytic), ("finite_difference", &fd)] {
        if let Some(p) = pair {
            run.line(format!("[{label}] rho_minus = {}", p.rho_minus));
            run.line(format!("[{label}] rho_plus = {}", p.rho_plus));
            run.line(format!("[{label}] error_bound = {}", p.error_bound));
            run.verdict(label, p);
        }
    }
    if let (Some(a), Some(f)) = (&analytic, &fd) {
        let delta = (a.rho_minus - f.rho_minus).abs().max((a.rho_plus - f.rho_plus).abs());
        run.line(format!("agreement_delta = {delta}"));
        run.verdict("agreement_delta", delta);
    }
    Ok(0)
}

fn cmd_witness(run: &mut Run, space: &Path, x: &str, y: &str, side: SideArg) -> Result<i32, CliError> {
    let space = load_space(run, space)?;
    let x = parse_vector(run, "x", x, space.dim())?;
    let y = parse_vector(run, "y", y, space.dim())?;
    let side_name = match side {
        SideArg::Pos => "positive",
        SideArg::Neg => "negative",
        SideArg::Classify => "classify",
    };
    run.input("side", json!(side_name));
    run.verdict("side", side_name);
    if side == SideArg::Classify {
        let class = run.timed("classify", || classify_pair(&space, &x, &y))?;
        let tag = serde_json::to_value(class.tag).expect("tag serializes");
        run.line(format!("class = {}", tag.as_str().unwrap_or_default()));
        run.line(format!("rho_minus = {}", class.rho.rho_minus));
        run.line(format!("rho_plus = {}", class.rho.rho_plus));
        run.verdict("class", class);
        return Ok(0);
    }
    let outcome = run.timed("search", || match side {
        SideArg::Pos => positive_witness(&space, &x, &y),
        _ => negative_witness(&space, &x, &y),
    })?;
    match &outcome {
        WitnessOutcome::Found(w) => {
            run.line("witness found");
            run.line(format!("lambda = {}", w.lambda));
            run.line(format!("radius = {}", w.radius));
            run.line(format!("margin = {}", w.margin));
        }
        WitnessOutcome::Absent(a) => {
            run.line("certified absence");
            run.line(format!("rho = {}", a.rho));
            run.line(format!("gap_limit = {}", a.gap_limit));
        }
    }
    run.verdict("outcome", outcome);
    Ok(0)
}

fn load_functionals(run: &mut Run, path: Option<&PathBuf>, dim: usize) -> Result<Vec<Functional64>, CliError> {
    match path {
        Some(p) => {
            let value = read_json(p)?;
            run.input("functionals", value.clone());
            let fs = functionals_from_json(&value.to_string()).map_err(|e| CliError::parse(e.to_string()))?;
            for f in &fs {
                if f.dim() != dim {
                    return Err(CliError::parse(format!("functional has {} coordinates, space has {dim}", f.dim())));
                }
            }
            Ok(fs)
        }
        None => Ok((0..dim).map(|i| Functional64::basis(dim, i)).collect()),
    }
}

fn load_covering(run: &mut Run, path: Option<&PathBuf>) -> Result<CoveringFile, CliError> {
    let path = path.ok_or_else(|| CliError::parse("--covering-file is required"))?;
    let value = read_json(path)?;
    run.input("covering", value.clone());
    CoveringFile::from_json(&value.to_string()).map_err(|e| CliError::parse(e.to_string()))
}

fn report_covering(run: &mut Run, covering: &Covering64) {
    run.line(format!("balls = {}", covering.balls.len()));
    for (i, b) in covering.balls.iter().enumerate() {
        run.line(format!("ball[{i}] center = {} radius = {}", fmt_vec(b.center.as_slice()), b.radius));
    }
    if let Some(c) = &covering.certificate {
        run.line(format!("min_slack = {}", c.min_slack));
        run.line(format!("net_resolution = {}", c.net_resolution));
        run.line(format!("points_checked = {}", c.points_checked));
        run.line(format!("full_cover = {}", c.full_cover));
    }
    run.verdict("covering", covering);
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::precondition(format!("cannot write {}: {e}", path.display())))
}

fn net_sample(target: &TargetSet64) -> Vec<Vector64> {
    let len = target.len();
    let stride = len.div_ceil(SVG_NET_POINTS).max(1);
    (0..len).step_by(stride).map(|k| target.point(k)).collect()
}

fn cmd_cover(run: &mut Run, space_path: &Path, action: CoverAction, command: &Command) -> Result<i32, CliError> {
    let Command::Cover { delta, functionals_file, points_file, covering_file, out, svg: svg_path, symmetric, .. } =
        command
    else {
        unreachable!("cmd_cover is only called for cover");
    };
    let space = load_space(run, space_path)?;
    let action_name = match action {
        CoverAction::Build2n => "build-2n",
        CoverAction::BuildN1 => "build-n1",
        CoverAction::FromFunctionals => "from-functionals",
        CoverAction::Verify => "verify",
        CoverAction::Adversary => "adversary",
    };
    run.input("action", json!(action_name));
    run.verdict("action", action_name);

    if action == CoverAction::Adversary {
        run.input("symmetric", json!(symmetric));
        let file = load_covering(run, covering_file.as_ref())?;
        let u = run.timed("adversary", || adversary_uncovered(&space, &file.balls, *symmetric))?;
        run.line(format!("uncovered point = {}", fmt_vec(u.point.as_slice())));
        for (i, s) in u.per_ball_slack.iter().enumerate() {
            run.line(format!("ball[{i}] slack = {s}"));
        }
        run.verdict("uncovered", &u);
        if let Some(p) = svg_path {
            let fig = svg::Figure { space: &space, balls: &file.balls, net: &[], marked: Some(&u.point) };
            write_file(p, &svg::render(&fig)?)?;
        }
        return Ok(0);
    }

    let (covering, target_spec, target) = match action {
        CoverAction::Verify => {
            let file = load_covering(run, covering_file.as_ref())?;
            let spec = file.target.clone().ok_or_else(|| CliError::parse("covering file has no target"))?;
            let target = spec.build(&space)?;
            let cert = run.timed("verify", || verify_cover(&space, &file.balls, &target))?;
            if let Some(old) = &file.certificate {
                let same = old == &cert;
                run.line(format!("matches_file_certificate = {same}"));
                run.verdict("matches_file_certificate", same);
            }
            (Covering64 { balls: file.balls, certificate: Some(cert) }, spec, target)
        }
        _ => {
            run.input("delta", json!(delta));
            let fs = load_functionals(run, functionals_file.as_ref(), space.dim())?;
            let spec = match points_file {
                Some(p) if action == CoverAction::FromFunctionals || action == CoverAction::BuildN1 => {
                    let value = read_json(p)?;
                    run.input("points", value.clone());
                    let points: Vec<Vector64> =
                        serde_json::from_value(value).map_err(|e| CliError::parse(format!("{}: {e}", p.display())))?;
                    TargetSpec::FinitePoints { points }
                }
                _ => TargetSpec::UnitSphere { delta: *delta },
            };
            let target = spec.build(&space)?;
            let covering = run.timed("construct", || match action {
                CoverAction::Build2n => symmetric_cover_2n(&space, &fs, *delta),
                CoverAction::BuildN1 => smooth_cover_n_plus_1(&space, &fs, &target),
                _ => cover_from_functionals(&space, &target, &fs),
            })?;
            (covering, spec, target)
        }
    };
    report_covering(run, &covering);
    if let Some(p) = svg_path {
        let net = net_sample(&target);
        let fig = svg::Figure { space: &space, balls: &covering.balls, net: &net, marked: None };
        write_file(p, &svg::render(&fig)?)?;
    }
    let certified = covering.is_certified();
    if let Some(p) = out {
        write_file(p, &CoveringFile::new(covering, target_spec).to_json())?;
    }
    Ok(if certified { 0 } else { EXIT_NEGATIVE })
}

fn cmd_separate(run: &mut Run, path: &Path) -> Result<i32, CliError> {
    let value = read_json(path)?;
    run.input("instance", value.clone());
    let mut file = InstanceFile::from_json(&value.to_string()).map_err(|e| CliError::parse(e.to_string()))?;
    file.space = file.space.with_tolerances(tolerances()?);
    let inst = file.instance()?;

    let verdict = run.timed("separate", || positively_separates(&inst))?;
    run.line(format!("separated = {}", verdict.separated));
    for (k, w) in verdict.witness_index.iter().enumerate() {
        match w {
            Some(i) => run.line(format!("point[{k}] -> direction {i}")),
            None => run.line(format!("point[{k}] -> none")),
        }
    }
    let oracle = match run.timed("oracle", || selection_oracle_exhaustive(&inst)) {
        Ok(v) => Some(v),
        Err(Error::UnsupportedFamily(_) | Error::CombinatorialBlowup { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    if let Some(o) = oracle {
        run.line(format!("selection_oracle = {o}"));
    }
    let eq = run.timed("equivalence", || separation_ballcover_equivalence(&inst))?;
    run.line(format!("covering_certified = {}", eq.covering_certified));
    run.line(format!("directions_agree = {}", eq.agree));
    let separated = verdict.separated;
    run.verdict("separation", &verdict);
    run.verdict("selection_oracle", oracle);
    run.verdict("equivalence", &eq);

    let mut closure_ok = true;
    if !file.closure_points.is_empty() {
        let rep = run.timed("closure", || closure_precondition_check(&inst, &file.closure_points))?;
        run.line(format!("closure hypotheses_hold = {}", rep.hypotheses_hold));
        let conclusion = serde_json::to_value(rep.conclusion).expect("conclusion serializes");
        run.line(format!("closure conclusion = {conclusion}"));
        closure_ok = rep.conclusion == ConclusionStatus::Verified;
        run.verdict("closure", &rep);
    }
    if oracle.is_some_and(|o| o != separated) || !eq.agree {
        return Ok(EXIT_INTERNAL);
    }
    Ok(if separated && closure_ok { 0 } else { EXIT_NEGATIVE })
}

fn cmd_smooth(run: &mut Run, space: &Path, x: &str, y: &str, nmax: usize) -> Result<i32, CliError> {
    let space = load_space(run, space)?;
    let x = parse_vector(run, "x", x, space.dim())?;
    let y = parse_vector(run, "y", y, space.dim())?;
    run.input("seq", json!("linf"));
    run.input("nmax", json!(nmax));
    let seq = SmoothingSequence::LinfShrink;
    let t = run.timed("transfer", || transfer_witness(&space, &x, &y, &seq, nmax))?;
    run.line(format!("n0 = {}", t.n0));
    run.line(format!("x_n0 = {}", fmt_vec(t.point.as_slice())));
    run.line(format!("rho_minus = {}", t.rho_minus));
    run.line(format!("lambda = {}", t.witness.lambda));
    run.line(format!("radius = {}", t.witness.radius));
    run.line(format!("margin = {}", t.witness.margin));
    run.verdict("sequence", seq.label());
    run.verdict("transfer", &t);
    Ok(0)
}
