//! `shapesphere` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 unreadable input or bad
//! arguments, 3 invariant violation, 4 uncertified result under `--strict`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde_json::Value;

use shapesphere::atlas::atlas;
use shapesphere::generate::{
    figure1_pinch, figure_eight, homothety, newtonian, perturbed_lagrange, random_smooth, rigid_rotation,
    rigid_rotation_planar, spatial_wobble, RandomSmooth, Tilt,
};
use shapesphere::io::{parse, read_shape_curve, serialize, write_shape_curve, Format};
use shapesphere::planar::{reconstruct, zero_j_lift, ShapeCurve, Target};
use shapesphere::spatial::{reconstruct_spatial_with, Branch, SpatialOptions};
use shapesphere::verify::{run_suite, Suite, VerifyOptions};
use shapesphere::{Dim, MassTriple, Trajectory};

#[derive(Parser, Debug)]
#[command(
    name = "shapesphere",
    version,
    about = "Shape-sphere geometry and rotation reconstruction for three-body motions"
)]
struct Cli {
    /// Masses as m1,m2,m3 (required for CSV input, overrides JSON masses)
    #[arg(long, global = true, value_parser = parse_masses)]
    masses: Option<MassTriple>,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Show angles in degrees (display only)
    #[arg(long, global = true)]
    degrees: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Project a trajectory to its normalized shape curve (CSV)
    Project { input: PathBuf },
    /// Recover the rotation angle of a motion from its shape curve
    Reconstruct(ReconstructArgs),
    /// Marked points of the shape sphere for the given masses
    Atlas,
    /// Zero-angular-momentum motion over a shape curve
    Lift {
        /// Shape curve CSV with columns t,w1,w2,w3 and optionally w4
        curve: PathBuf,
        /// Trajectory file whose first sample is the starting configuration
        #[arg(long)]
        initial: PathBuf,
    },
    /// Write a synthetic trajectory
    Generate(GenerateArgs),
    /// Run the built-in verification suite
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Samples per motion
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, env = "SHAPESPHERE_SEED", default_value_t = 0)]
        seed: u64,
        /// Record per-case wall-clock time (makes reports run-dependent)
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "q1")]
    target: TargetArg,
    /// Reference axis for spatial motions (default: direction of J(0))
    #[arg(long, value_parser = parse_vector)]
    e: Option<Vector3<f64>>,
    /// Also measure the rotation directly from the positions
    #[arg(long)]
    with_oracle: bool,
    /// Exit with status 4 when the result is not certified
    #[arg(long)]
    strict: bool,
    /// Side used to pass a normal through -e
    #[arg(long, value_enum, default_value = "left")]
    branch: BranchArg,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    /// Number of samples
    #[arg(long, default_value_t = 1001)]
    n: usize,
    #[arg(long, env = "SHAPESPHERE_SEED", default_value_t = 0)]
    seed: u64,
    /// Rotation or dilation rate
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Rotation axis; makes rigid-rotation spatial
    #[arg(long, value_parser = parse_vector)]
    axis: Option<Vector3<f64>>,
    /// Fourier amplitude (random-smooth, wobble) or perturbation size (lagrange)
    #[arg(long)]
    amplitude: Option<f64>,
    /// Fraction of the pinch to run before stopping
    #[arg(long, default_value_t = 1.0)]
    stop_fraction: f64,
    /// Tilt profile beta0,beta_rate,beta_amplitude,psi_rate for wobble
    #[arg(long, value_parser = parse_tilt)]
    tilt: Option<Tilt>,
    /// Starting positions and velocities for newtonian
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Output format when writing to stdout
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TargetArg {
    Q1,
    Z1,
    Spatial,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BranchArg {
    Left,
    Right,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Planar,
    Spatial,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    RigidRotation,
    Homothety,
    Pinch,
    FigureEight,
    Lagrange,
    Newtonian,
    RandomSmooth,
    Wobble,
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0f64; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.trim().parse().map_err(|_| format!("`{p}` is not a number"))?;
        if !slot.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
    }
    Ok(out)
}

fn parse_masses(s: &str) -> Result<MassTriple, String> {
    MassTriple::try_from(parse_list::<3>(s)?).map_err(|e| e.to_string())
}

fn parse_vector(s: &str) -> Result<Vector3<f64>, String> {
    let v = Vector3::from(parse_list::<3>(s)?);
    if v.norm() == 0.0 {
        return Err("vector must be nonzero".into());
    }
    Ok(v)
}

fn parse_tilt(s: &str) -> Result<Tilt, String> {
    let [beta0, beta_rate, beta_amplitude, psi_rate] = parse_list::<4>(s)?;
    Ok(Tilt {
        beta0,
        beta_rate,
        beta_amplitude,
        psi_rate,
    })
}

/// An error with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

type CliResult<T> = std::result::Result<T, Failure>;

fn input_error(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn invariant_error(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 3,
        error: error.into(),
    }
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .with_context(|| format!("cannot open {}", path.display()))
        .map_err(input_error)
}

fn read_trajectory(path: &Path, masses: Option<MassTriple>) -> CliResult<Trajectory> {
    let source = open(path)?;
    parse(source, Format::from_path(path), masses)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input_error)
}

struct Output {
    path: Option<PathBuf>,
}

impl Output {
    fn writer(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p)
                    .with_context(|| format!("cannot create {}", p.display()))
                    .map_err(input_error)?,
            )),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    fn json(&self, value: &Value) -> CliResult<()> {
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, value)
            .map_err(anyhow::Error::from)
            .and_then(|_| writeln!(w).and_then(|_| w.flush()).map_err(anyhow::Error::from))
            .map_err(input_error)
    }

    /// Trajectories follow the output extension, or `fallback` on stdout.
    fn trajectory(&self, traj: &Trajectory, fallback: Format) -> CliResult<()> {
        let format = self.path.as_deref().map_or(fallback, Format::from_path);
        let mut w = self.writer()?;
        serialize(traj, format, &mut w).map_err(input_error)?;
        w.flush().map_err(input_error)
    }
}

/// Multiplies the listed numeric fields (recursively, including arrays) by
/// `180 / pi`.
fn in_degrees(value: &mut Value, keys: &[&str]) {
    fn scale(v: &mut Value) {
        match v {
            Value::Number(n) => {
                if let Some(x) = n.as_f64() {
                    *v = serde_json::json!(x.to_degrees());
                }
            }
            Value::Array(items) => items.iter_mut().for_each(scale),
            _ => {}
        }
    }
    match value {
        Value::Object(map) => {
            for (k, v) in map.iter_mut() {
                if keys.contains(&k.as_str()) {
                    scale(v);
                } else {
                    in_degrees(v, keys);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|v| in_degrees(v, keys)),
        _ => {}
    }
}

const REPORT_ANGLES: &[&str] = &["dynamic_term", "geometric_term", "total", "total_mod_2pi", "oracle"];
const VERIFY_ANGLES: &[&str] = &[
    "formula_total",
    "oracle_total",
    "abs_error",
    "mod2pi_error",
    "tolerance",
    "max_abs_error",
];

fn run(cli: Cli) -> CliResult<()> {
    let out = Output { path: cli.out.clone() };
    match cli.command {
        Command::Project { input } => {
            let traj = read_trajectory(&input, cli.masses)?;
            let mut curve = ShapeCurve::from_trajectory(&traj).map_err(invariant_error)?;
            if cli.degrees {
                curve.unwound_xi.iter_mut().for_each(|x| *x = x.to_degrees());
            }
            let mut w = out.writer()?;
            write_shape_curve(&curve, &mut w).map_err(input_error)?;
            w.flush().map_err(input_error)
        }
        Command::Reconstruct(args) => reconstruct_cmd(&args, cli.masses, cli.degrees, &out),
        Command::Atlas => {
            let masses = cli.masses.unwrap_or_else(MassTriple::equal);
            let mut value = serde_json::to_value(atlas(&masses).map_err(invariant_error)?).map_err(input_error)?;
            if cli.degrees {
                in_degrees(&mut value, &["alpha", "beta"]);
            }
            out.json(&value)
        }
        Command::Lift { curve, initial } => {
            let curve = read_shape_curve(open(&curve)?)
                .with_context(|| format!("reading {}", curve.display()))
                .map_err(input_error)?;
            let start = read_trajectory(&initial, cli.masses)?;
            let masses = start.masses;
            let lift = zero_j_lift(&curve, &start.planar(0), &masses).map_err(invariant_error)?;
            out.trajectory(&lift.trajectory, Format::Csv)
        }
        Command::Generate(args) => {
            let traj = generate_cmd(&args, cli.masses)?;
            let fallback = match args.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            out.trajectory(&traj, fallback)
        }
        Command::Verify { suite, n, seed, timing } => {
            if n < 8 {
                return Err(input_error(anyhow!("--n must be at least 8")));
            }
            let suite = match suite {
                SuiteArg::Planar => Suite::Planar,
                SuiteArg::Spatial => Suite::Spatial,
                SuiteArg::All => Suite::All,
            };
            let report = run_suite(&VerifyOptions { suite, n, seed, timing });
            let mut value = serde_json::to_value(&report).map_err(input_error)?;
            if cli.degrees {
                in_degrees(&mut value, VERIFY_ANGLES);
            }
            out.json(&value)?;
            if report.summary.failures > 0 {
                for case in report.cases.iter().filter(|c| !c.passed) {
                    eprintln!(
                        "failed: {} (error {:.3e}, tolerance {:.1e})",
                        case.name,
                        case.compared_error(),
                        case.tolerance
                    );
                }
                return Err(Failure {
                    code: 1,
                    error: anyhow!("{} verification case(s) failed", report.summary.failures),
                });
            }
            Ok(())
        }
    }
}

fn reconstruct_cmd(args: &ReconstructArgs, masses: Option<MassTriple>, degrees: bool, out: &Output) -> CliResult<()> {
    let traj = read_trajectory(&args.input, masses)?;
    let report = match args.target {
        TargetArg::Q1 | TargetArg::Z1 => {
            if traj.dim == Dim::Spatial {
                return Err(input_error(anyhow!(
                    "target {:?} needs a planar trajectory; use --target spatial",
                    args.target
                )));
            }
            let target = if matches!(args.target, TargetArg::Q1) {
                Target::Q1
            } else {
                Target::Z1
            };
            reconstruct(&traj, target, args.with_oracle).map_err(invariant_error)?
        }
        TargetArg::Spatial => {
            let traj = Trajectory {
                dim: Dim::Spatial,
                ..traj
            };
            let options = SpatialOptions {
                with_oracle: args.with_oracle,
                branch: match args.branch {
                    BranchArg::Left => Branch::Left,
                    BranchArg::Right => Branch::Right,
                },
            };
            reconstruct_spatial_with(&traj, args.e, options).map_err(invariant_error)?
        }
    };
    let mut value = serde_json::to_value(&report).map_err(input_error)?;
    if degrees {
        in_degrees(&mut value, REPORT_ANGLES);
    }
    out.json(&value)?;
    if !report.certified {
        eprintln!(
            "warning: result is not certified (time in the bad set: {:.3e})",
            report.bad_set_measure.unwrap_or(0.0)
        );
        if args.strict {
            return Err(Failure {
                code: 4,
                error: anyhow!("uncertified result under --strict"),
            });
        }
    }
    Ok(())
}

fn generate_cmd(args: &GenerateArgs, masses: Option<MassTriple>) -> CliResult<Trajectory> {
    let m = masses.unwrap_or_else(MassTriple::equal);
    let smooth = RandomSmooth {
        seed: args.seed,
        duration: args.duration,
        n: args.n,
        amplitude: args.amplitude.unwrap_or(RandomSmooth::default().amplitude),
        ..RandomSmooth::default()
    };
    let base = || random_smooth(&m, &RandomSmooth { n: 2, ..smooth });
    let traj = match args.kind {
        Kind::RigidRotation => {
            let start = base().map_err(input_error)?;
            match args.axis {
                Some(axis) => rigid_rotation(&start.spatial(0), &m, &axis, args.rate, args.duration, args.n),
                None => rigid_rotation_planar(&start.planar(0), &m, args.rate, args.duration, args.n),
            }
        }
        Kind::Homothety => {
            let start = base().map_err(input_error)?;
            homothety(&start.planar(0), &m, args.rate, args.duration, args.n)
        }
        Kind::Pinch => figure1_pinch(&m, args.duration, args.n, args.stop_fraction),
        Kind::FigureEight => {
            if masses.is_some_and(|x| x != MassTriple::equal()) {
                eprintln!("note: figure-eight always uses equal masses");
            }
            figure_eight(args.duration, args.n)
        }
        Kind::Lagrange => perturbed_lagrange(&m, args.amplitude.unwrap_or(0.05), args.duration, args.n),
        Kind::Newtonian => {
            let path = args
                .initial
                .as_deref()
                .ok_or_else(|| input_error(anyhow!("newtonian needs --initial with positions and velocities")))?;
            let start = read_trajectory(path, masses)?;
            let v0 = start
                .velocities
                .as_ref()
                .ok_or_else(|| input_error(anyhow!("{} has no velocity columns", path.display())))?[0];
            newtonian(
                &start.masses,
                start.positions[0],
                v0,
                1.0,
                args.duration,
                args.n,
                10,
                start.dim,
            )
        }
        Kind::RandomSmooth => random_smooth(&m, &smooth),
        Kind::Wobble => {
            let tilt = args.tilt.unwrap_or(Tilt {
                beta0: 0.4,
                beta_rate: 0.2,
                beta_amplitude: 0.2,
                psi_rate: 0.5,
            });
            spatial_wobble(&m, &smooth, &tilt)
        }
    };
    traj.map_err(invariant_error)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
