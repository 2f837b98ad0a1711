use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geostiff::connection::correction_matrix;
use geostiff::passivity::{audit_stiffness, EnergyAudit};
use geostiff::robot::{self, jacobian, load_model, RobotModel};
use geostiff::sim::{self, ConfigDocument, JointTrajectory, WrenchProfile};
use geostiff::stiffness::{
    joint_stiffness, kinematic_stiffness, symmetry_report, SymmetryReport, TaskStiffness,
};
use geostiff::{Frame, Wrench};
use nalgebra::{DMatrix, DVector, Matrix6, Vector3};
use serde_json::{json, Value};

const MODEL_PATH_VAR: &str = "GEOSTIFF_MODEL_PATH";

#[derive(Parser)]
#[command(
    name = "geostiff",
    version,
    about = "Symmetric joint-space stiffness toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model file operations.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Joint stiffness at one configuration.
    Stiffness(StiffnessArgs),
    /// Run the impedance-control simulation and write a trace CSV.
    Simulate(SimulateArgs),
    /// Work-loop audit of a stiffness matrix.
    Passivity {
        /// JSON array of rows, or a path to a file containing one.
        #[arg(long)]
        matrix: String,
    },
    /// Closed-form 3R example.
    Example {
        #[command(subcommand)]
        which: ExampleKind,
    },
    /// Write input files for a built-in scenario.
    Scenario {
        #[command(subcommand)]
        which: ScenarioKind,
    },
}

#[derive(Subcommand)]
enum ModelAction {
    /// Parse and check a model; prints its dimension.
    Validate { file: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Body,
    Hybrid,
    Inertial,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Body => Frame::Body,
            FrameArg::Hybrid => Frame::Hybrid,
            FrameArg::Inertial => Frame::Inertial,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StiffnessAction {
    Compute,
    Audit,
}

#[derive(Args)]
struct StiffnessArgs {
    #[arg(long)]
    model: String,
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    q: Vec<f64>,
    /// Force then moment, six comma-separated numbers in the chosen frame.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        num_args = 1,
        required = true
    )]
    wrench: Vec<f64>,
    #[arg(long, value_enum, default_value = "body")]
    frame: FrameArg,
    #[arg(long, overrides_with = "no_correction")]
    correction: bool,
    #[arg(long, overrides_with = "correction")]
    no_correction: bool,
    /// 6 (diagonal) or 36 (row-major) numbers; zero when omitted.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    hessian: Option<Vec<f64>>,
    #[arg(value_enum)]
    action: StiffnessAction,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    wrench: PathBuf,
    #[arg(long)]
    trajectory: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's duration; defaults to the trajectory's end time.
    #[arg(long)]
    duration: Option<f64>,
    /// Also write a gnuplot script next to the trace.
    #[arg(long)]
    emit_plotscript: bool,
}

#[derive(Subcommand)]
enum ExampleKind {
    /// 3R anthropomorphic arm under a pure moment.
    Anthro {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q1: f64,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "1,0,0"
        )]
        m: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum ScenarioKind {
    /// Semicircular wipe on iiwa7 with a ramped moment.
    Wiping {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        peak: f64,
        #[arg(long)]
        no_correction: bool,
    },
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(value) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("serializable")
            );
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Model {
            action: ModelAction::Validate { file },
        } => model_validate(&file),
        Command::Stiffness(args) => stiffness(&args),
        Command::Simulate(args) => simulate(&args),
        Command::Passivity { matrix } => passivity(&matrix),
        Command::Example {
            which: ExampleKind::Anthro { q1, m },
        } => example_anthro(q1, &m),
        Command::Scenario {
            which:
                ScenarioKind::Wiping {
                    dir,
                    peak,
                    no_correction,
                },
        } => scenario_wiping(&dir, peak, !no_correction),
    }
}

/// Search order: the literal path, each `GEOSTIFF_MODEL_PATH` directory,
/// then the bundled models by name.
fn resolve_model(spec: &str) -> Result<(RobotModel, String), Failure> {
    let literal = Path::new(spec);
    if literal.is_file() {
        return Ok((
            RobotModel::from_file(literal)?,
            literal.display().to_string(),
        ));
    }
    if literal.components().count() == 1 {
        if let Some(dirs) = std::env::var_os(MODEL_PATH_VAR) {
            for dir in std::env::split_paths(&dirs) {
                let candidate = dir.join(spec);
                if candidate.is_file() {
                    return Ok((
                        RobotModel::from_file(&candidate)?,
                        candidate.display().to_string(),
                    ));
                }
            }
        }
        if let Some(doc) = robot::bundled_document(spec) {
            return Ok((
                load_model(doc)?,
                format!("bundled:{}", spec.trim_end_matches(".json")),
            ));
        }
    }
    Err(Failure::Invalid(format!("model `{spec}` not found")))
}

fn matrix_json(m: &DMatrix<f64>) -> Value {
    json!(m
        .row_iter()
        .map(|r| r.iter().copied().collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn report_json(r: &SymmetryReport) -> Value {
    json!({
        "sigma_max_sym": r.sigma_max_sym,
        "sigma_max_asym": r.sigma_max_asym,
        "asym_ratio": r.asym_ratio,
    })
}

fn audit_json(a: &EnergyAudit) -> Value {
    json!({
        "net_work": a.net_work,
        "passive": a.passive,
        "plane": a.plane.map(|(i, j)| [i + 1, j + 1]),
        "work_per_area": a.work_per_area,
    })
}

fn model_validate(file: &str) -> Outcome {
    let (model, source) = resolve_model(file)?;
    Ok(json!({
        "n": model.dof(),
        "valid": true,
        "name": model.name,
        "inputs_echo": { "file": file, "resolved": source },
    }))
}

fn stiffness(args: &StiffnessArgs) -> Outcome {
    let (model, source) = resolve_model(&args.model)?;
    let frame = Frame::from(args.frame);
    let with_correction = !args.no_correction;
    let q = DVector::from_column_slice(&args.q);
    if args.wrench.len() != 6 {
        return Err(Failure::Usage(format!(
            "--wrench needs 6 numbers, got {}",
            args.wrench.len()
        )));
    }
    let wrench = Wrench::from_slice(&args.wrench)?;
    let hessian = match &args.hessian {
        Some(values) => TaskStiffness::from_values(values, frame)?,
        None => TaskStiffness::zero(frame),
    };
    let violations = model.limit_violations(&q);
    if !violations.is_empty() {
        let joints: Vec<usize> = violations.iter().map(|i| i + 1).collect();
        eprintln!("warning: q outside joint limits at joints {joints:?}");
    }
    let k = joint_stiffness(&model, &q, &hessian, &wrench, frame, with_correction)?;
    let report = k.report();
    let echo = json!({
        "model": args.model,
        "resolved": source,
        "q": args.q,
        "wrench": args.wrench,
        "frame": frame.name(),
        "with_correction": with_correction,
        "hessian": hessian.hessian.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    let mut out = json!({
        "symmetric": k.is_symmetric(),
        "sigma_max_sym": report.sigma_max_sym,
        "sigma_max_asym": report.sigma_max_asym,
        "asym_ratio": report.asym_ratio,
    });
    match args.action {
        StiffnessAction::Compute => {
            out["matrix"] = matrix_json(&k.matrix);
        }
        StiffnessAction::Audit => {
            let audit = audit_stiffness(&k.matrix)?;
            out["net_work"] = json!(audit.net_work);
            out["passive"] = json!(audit.passive);
            out["plane"] = json!(audit.plane.map(|(i, j)| [i + 1, j + 1]));
        }
    }
    out["inputs_echo"] = echo;
    Ok(out)
}

fn simulate(args: &SimulateArgs) -> Outcome {
    let (model, source) = resolve_model(&args.model)?;
    let doc = ConfigDocument::from_json(&fs::read_to_string(&args.config)?)?;
    let controller = doc.controller()?;
    let wrench = WrenchProfile::read_csv(fs::File::open(&args.wrench)?)?;
    let trajectory =
        JointTrajectory::read_csv(fs::File::open(&args.trajectory)?, Some(model.dof()))?;
    let duration = args
        .duration
        .or(doc.duration)
        .unwrap_or_else(|| trajectory.series().end());
    let start = match &doc.initial_q {
        Some(q) => robot::JointState::at_rest(DVector::from_column_slice(q)),
        None => robot::JointState::at_rest(trajectory.eval(0.0)),
    };
    let trace = sim::simulate_from(&model, &controller, &trajectory, &wrench, duration, start)?;

    let mut buf = Vec::new();
    trace.write_csv(&mut buf)?;
    fs::write(&args.out, buf)?;
    let plot = if args.emit_plotscript {
        let path = args.out.with_extension("gp");
        fs::write(
            &path,
            sim::plot_script(&trace, &args.out.display().to_string()),
        )?;
        Some(path.display().to_string())
    } else {
        None
    };
    let worst_ratio = trace
        .rows
        .iter()
        .map(|r| r.sigma_max_asym / r.sigma_max_sym.max(geostiff::stiffness::RATIO_EPSILON))
        .fold(0.0, f64::max);
    Ok(json!({
        "rows": trace.rows.len(),
        "timestep": trace.timestep,
        "peak_sigma_max_asym": trace.peak_asymmetry(),
        "max_asym_ratio": worst_ratio,
        "trace": args.out.display().to_string(),
        "plotscript": plot,
        "inputs_echo": {
            "model": args.model,
            "resolved": source,
            "config": serde_json::to_value(&doc)?,
            "wrench": args.wrench.display().to_string(),
            "trajectory": args.trajectory.display().to_string(),
            "duration": duration,
        },
    }))
}

fn parse_matrix(arg: &str) -> Result<DMatrix<f64>, Failure> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg)?
    } else {
        arg.to_string()
    };
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text)
        .map_err(|e| Failure::Invalid(format!("matrix must be a JSON array of rows: {e}")))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Failure::Invalid(
            "matrix rows must be non-empty and equal length".into(),
        ));
    }
    Ok(DMatrix::from_row_iterator(
        n,
        rows[0].len(),
        rows.into_iter().flatten(),
    ))
}

fn passivity(arg: &str) -> Outcome {
    let k = parse_matrix(arg)?;
    let audit = audit_stiffness(&k)?;
    let report = symmetry_report(&k)?;
    let mut out = audit_json(&audit);
    out["symmetry"] = report_json(&report);
    out["inputs_echo"] = json!({ "matrix": matrix_json(&k) });
    Ok(out)
}

fn example_anthro(q1: f64, m: &[f64]) -> Outcome {
    if m.len() != 3 {
        return Err(Failure::Usage(format!(
            "--m needs 3 numbers, got {}",
            m.len()
        )));
    }
    let model = RobotModel::anthro3r();
    let q = DVector::from_vec(vec![q1, 0.0, 0.0]);
    let wrench = Wrench::new(Vector3::zeros(), Vector3::new(m[0], m[1], m[2]));
    let frame = Frame::Hybrid;
    let k_kin = kinematic_stiffness(&model, &q, &wrench, frame)?;
    let j = jacobian(&model, &q, frame)?;
    let correction = j.transpose() * correction_matrix(frame, &wrench).matrix * &j;
    let corrected = joint_stiffness(
        &model,
        &q,
        &TaskStiffness::zero(frame),
        &wrench,
        frame,
        true,
    )?;
    let a = 0.5 * (m[0] * q1.cos() + m[1] * q1.sin());
    Ok(json!({
        "K_kin": matrix_json(&k_kin),
        "correction": matrix_json(&correction),
        "corrected": matrix_json(&corrected.matrix),
        "A": a,
        "symmetric": corrected.is_symmetric(),
        "inputs_echo": { "q1": q1, "m": m, "frame": frame.name() },
    }))
}

fn scenario_wiping(dir: &Path, peak: f64, with_correction: bool) -> Outcome {
    let s = sim::wiping_scenario(peak, with_correction)?;
    fs::create_dir_all(dir)?;
    let h: Matrix6<f64> = s.controller.task_hessian.hessian;
    let doc = ConfigDocument {
        hessian: h.transpose().iter().copied().collect(),
        damping_ratio: s.controller.damping_ratio,
        frame: s.controller.frame,
        with_correction,
        rate: s.controller.rate,
        nullspace_stiffness: s.controller.nullspace_stiffness,
        duration: Some(s.duration),
        initial_q: None,
    };
    let config = dir.join("config.json");
    let trajectory = dir.join("trajectory.csv");
    let wrench = dir.join("wrench.csv");
    fs::write(&config, serde_json::to_string_pretty(&doc)?)?;
    let mut buf = Vec::new();
    s.trajectory.write_csv(&mut buf)?;
    fs::write(&trajectory, &buf)?;
    buf.clear();
    s.wrench.write_csv(&mut buf)?;
    fs::write(&wrench, &buf)?;
    Ok(json!({
        "model": s.model.name,
        "config": config.display().to_string(),
        "trajectory": trajectory.display().to_string(),
        "wrench": wrench.display().to_string(),
        "inputs_echo": { "peak": peak, "with_correction": with_correction },
    }))
}
