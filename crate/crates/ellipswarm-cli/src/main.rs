//! `ellipswarm` binary: solver, experiment, and cross-validation commands
//! with reproducible seeds and machine-readable output.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, malformed
//! input, missing files), 2 on numeric or degeneracy failures.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use ellipswarm::classifier::{multiclass_train, ClassSamples, ClassifierRecord};
use ellipswarm::data::{cross_validate, generate_synthetic, load_csv, CsvSchema, Dataset};
use ellipswarm::experiments::{baseline_comparison, lp_error_statistics_on};
use ellipswarm::solver::{
    solve_nearest_point, solve_two_ellipsoids, LpSolver, NearestPointProblem, TwoEllipsoidProblem,
};
use ellipswarm::{Ellipsoid, Error, PsoConfig, Result, SolveResult};

#[derive(Parser)]
#[command(
    name = "ellipswarm",
    version,
    about = "Particle-swarm solver for ellipsoid-constrained problems",
    after_help = "All randomness derives from --seed; identical invocations \
                  produce byte-identical output."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Base RNG seed; every stream used by a command derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Swarm iterations (default 1000); also the table length for
    /// compare-baselines (default 50 there).
    #[arg(long, global = true)]
    iterations: Option<usize>,

    /// Particles per swarm (default 10).
    #[arg(long, global = true)]
    swarm_size: Option<usize>,

    /// Inertia weight (default 0.05).
    #[arg(long, global = true)]
    w: Option<f64>,

    /// Personal-best pull (default 0.05).
    #[arg(long, global = true)]
    c1: Option<f64>,

    /// Global-best pull (default 0.05).
    #[arg(long, global = true)]
    c2: Option<f64>,

    /// Attractor pull (default 0.05).
    #[arg(long, global = true)]
    c3: Option<f64>,

    /// Craziness kick magnitude (default 0.20).
    #[arg(long, global = true)]
    c4: Option<f64>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format. Defaults to json, except compare-baselines and
    /// synth which default to csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize aᵀx over an ellipsoid with the swarm.
    SolveLp {
        /// Objective vector, comma-separated (e.g. "1,1").
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Region center; origin when omitted.
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        /// Region shape matrix P, row-major; identity when omitted.
        #[arg(long, allow_hyphen_values = true)]
        shape: Option<String>,
        /// Solve this many times under derived seeds and report the
        /// min/mean/max/stddev of |f_best − f*| against the analytic
        /// optimum instead of a single trace.
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Disable the attractor velocity term.
        #[arg(long)]
        no_attractor: bool,
    },
    /// Nearest point on an ellipsoid to an outside target.
    SolveNearest {
        /// Target point, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        shape: Option<String>,
    },
    /// Shortest segment between two disjoint ellipsoids.
    SolveTwo {
        #[arg(long, allow_hyphen_values = true)]
        center_x: String,
        #[arg(long, allow_hyphen_values = true)]
        shape_x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        center_y: String,
        #[arg(long, allow_hyphen_values = true)]
        shape_y: Option<String>,
    },
    /// Convergence table: cutting-plane, damped interior steps at two
    /// step scales, and the swarm at two craziness levels, all on
    /// maximizing x + y over the unit disk.
    CompareBaselines,
    /// Fit one-vs-one hyperplanes on a labeled CSV dataset.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        /// JSON file describing the CSV layout.
        #[arg(long)]
        schema: PathBuf,
    },
    /// Repeated stratified 10-fold cross-validation with per-fold
    /// whitening and per-pair 2D projection.
    CrossValidate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Generate the two-Gaussian synthetic dataset.
    Synth {
        /// Points per class.
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            std::process::exit(if ok { 0 } else { 1 });
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        if let Error::Ingestion { problems, .. } = &err {
            for (line, what) in problems {
                eprintln!("  line {line}: {what}");
            }
        }
        std::process::exit(if err.is_usage() { 1 } else { 2 });
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = resolve_config(&cli);
    cfg.validate()?;
    let format = cli.format.unwrap_or(match cli.command {
        Command::CompareBaselines | Command::Synth { .. } => Format::Csv,
        _ => Format::Json,
    });
    let text = match &cli.command {
        Command::SolveLp {
            a,
            center,
            shape,
            runs,
            no_attractor,
        } => {
            let a = parse_vector(a)?;
            let region = resolve_region(center, shape, a.len())?;
            if *runs > 1 {
                let stats = lp_error_statistics_on(&a, &region, *runs, &cfg, !no_attractor)?;
                match format {
                    Format::Json => to_json(&stats)?,
                    Format::Csv => {
                        let mut out = String::from("run,error\n");
                        for (i, e) in stats.errors.iter().enumerate() {
                            out.push_str(&format!("{i},{e}\n"));
                        }
                        out
                    }
                }
            } else {
                let mut solver = LpSolver::new(a, &region, cfg.clone(), !no_attractor)?;
                while !solver.is_complete() {
                    solver.step()?;
                }
                render_solve(&cfg, "solve-lp", solver.into_result(), format)?
            }
        }
        Command::SolveNearest {
            target,
            center,
            shape,
        } => {
            let target = parse_vector(target)?;
            let region = resolve_region(center, shape, target.len())?;
            let problem = NearestPointProblem::new(region, target)?;
            let result = solve_nearest_point(problem, &cfg)?;
            render_solve(&cfg, "solve-nearest", result, format)?
        }
        Command::SolveTwo {
            center_x,
            shape_x,
            center_y,
            shape_y,
        } => {
            let cx = parse_vector(center_x)?;
            let cy = parse_vector(center_y)?;
            let rx = resolve_region(&Some(center_x.clone()), shape_x, cx.len())?;
            let ry = resolve_region(&Some(center_y.clone()), shape_y, cy.len())?;
            let problem = TwoEllipsoidProblem::new(rx, ry)?;
            let result = solve_two_ellipsoids(problem, &cfg)?;
            render_solve(&cfg, "solve-two", result, format)?
        }
        Command::CompareBaselines => {
            let table_len = cli.iterations.unwrap_or(50);
            let cmp = baseline_comparison(table_len, &cfg)?;
            match format {
                Format::Json => to_json(&cmp)?,
                Format::Csv => cmp.to_csv(),
            }
        }
        Command::Train { dataset, schema } => {
            if format == Format::Csv {
                return Err(Error::InvalidConfig(
                    "train emits JSON records; rerun without --format csv".into(),
                ));
            }
            let data = load(dataset, schema)?;
            let classes: Vec<ClassSamples> = data
                .classes()
                .into_iter()
                .map(|label| ClassSamples {
                    points: data
                        .indices_of(&label)
                        .into_iter()
                        .map(|i| data.features()[i].clone())
                        .collect(),
                    label,
                })
                .collect();
            let trained = multiclass_train(&classes, &cfg)?;
            let output = TrainOutput {
                config: &cfg,
                records: trained.iter().map(|t| t.record()).collect(),
            };
            to_json(&output)?
        }
        Command::CrossValidate {
            dataset,
            schema,
            trials,
        } => {
            let data = load(dataset, schema)?;
            let name = dataset
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into());
            let report = cross_validate(&name, &data, &cfg, *trials)?;
            match format {
                Format::Json => to_json(&report)?,
                Format::Csv => report.to_csv(),
            }
        }
        Command::Synth { count } => {
            let data = generate_synthetic(*count, cfg.seed)?;
            match format {
                Format::Json => to_json(&SynthOutput {
                    config: &cfg,
                    count: *count,
                    features: data
                        .features()
                        .iter()
                        .map(|x| x.as_slice().to_vec())
                        .collect(),
                    labels: data.labels().to_vec(),
                })?,
                Format::Csv => {
                    let mut out = String::from("x,y,class\n");
                    for (x, label) in data.features().iter().zip(data.labels()) {
                        out.push_str(&format!("{},{},{label}\n", x[0], x[1]));
                    }
                    out
                }
            }
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    command: &'a str,
    config: &'a PsoConfig,
    result: SolveResult,
}

#[derive(Serialize)]
struct TrainOutput<'a> {
    config: &'a PsoConfig,
    records: Vec<ClassifierRecord>,
}

#[derive(Serialize)]
struct SynthOutput<'a> {
    config: &'a PsoConfig,
    count: usize,
    features: Vec<Vec<f64>>,
    labels: Vec<String>,
}

fn resolve_config(cli: &Cli) -> PsoConfig {
    let mut cfg = PsoConfig {
        seed: cli.seed,
        ..PsoConfig::default()
    };
    if let Some(v) = cli.iterations {
        cfg.max_iterations = v;
    }
    if let Some(v) = cli.swarm_size {
        cfg.swarm_size = v;
    }
    if let Some(v) = cli.w {
        cfg.w = v;
    }
    if let Some(v) = cli.c1 {
        cfg.c1 = v;
    }
    if let Some(v) = cli.c2 {
        cfg.c2 = v;
    }
    if let Some(v) = cli.c3 {
        cfg.c3 = v;
    }
    if let Some(v) = cli.c4 {
        cfg.c4 = v;
    }
    cfg
}

fn parse_vector(text: &str) -> Result<DVector<f64>> {
    let mut values = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        let v: f64 = token
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("cannot parse {token:?} as a number")))?;
        values.push(v);
    }
    Ok(DVector::from_vec(values))
}

fn parse_matrix(text: &str, dim: usize) -> Result<DMatrix<f64>> {
    let flat = parse_vector(text)?;
    if flat.len() != dim * dim {
        return Err(Error::InvalidConfig(format!(
            "shape matrix needs {dim}x{dim} = {} entries, got {}",
            dim * dim,
            flat.len()
        )));
    }
    Ok(DMatrix::from_row_slice(dim, dim, flat.as_slice()))
}

/// Center defaults to the origin, shape to the identity (unit ball).
fn resolve_region(
    center: &Option<String>,
    shape: &Option<String>,
    dim: usize,
) -> Result<Ellipsoid> {
    let c = match center {
        Some(text) => parse_vector(text)?,
        None => DVector::zeros(dim),
    };
    let p = match shape {
        Some(text) => parse_matrix(text, c.len())?,
        None => DMatrix::identity(c.len(), c.len()),
    };
    Ellipsoid::new(c, p)
}

fn load(dataset: &Path, schema: &Path) -> Result<Dataset> {
    let schema = CsvSchema::from_file(schema)?;
    load_csv(dataset, &schema)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn render_solve(
    cfg: &PsoConfig,
    command: &str,
    result: SolveResult,
    format: Format,
) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(&SolveOutput {
            command,
            config: cfg,
            result,
        })?,
        Format::Csv => {
            let mut out = String::from("iteration,objective\n");
            for point in &result.trace {
                out.push_str(&format!("{},{}\n", point.iteration, point.objective));
            }
            out
        }
    })
}
