// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! `fermicon` command line: verification suites, kernel rendering and
//! constraint classification.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or config error.

mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fermicon::config::Config;
use fermicon::grassmann::text;
use fermicon::lattice::{lattice_propagate, LatticePlan, DEFAULT_SLICES};
use fermicon::models::{ExampleId, ExampleParams, ExampleSystem};
use fermicon::propagator::{evaluate_system, ConstrainedKernel, KernelRoute};
use fermicon::Error;
use serde::{Deserialize, Serialize};

use report::RunReport;
use suites::{Ctx, Suite};

#[derive(Parser, Debug)]
#[command(
    name = "fermicon",
    version,
    about = "Verify constrained fermion path-integral kernels"
)]
struct Cli {
    /// Also write a JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// JSON config with tolerances and kernel parameters.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Print an example kernel in canonical text form.
    Kernel(KernelArgs),
    /// Classify the constraints declared in a config.
    Classify { config: PathBuf },
}

#[derive(clap::Args, Debug)]
struct KernelArgs {
    /// eq39, sec42, eq58, eq63, eq65, eq66 or bose-fermi.
    example: ExampleId,
    #[arg(long, default_value = "operator")]
    route: KernelRoute,
    /// Second route; prints the largest coefficient deviation.
    #[arg(long)]
    compare: Option<KernelRoute>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<i64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    n_slices: Option<usize>,
    /// JSON file with boson coherent labels `{"z_bra": [[re, im]], "z_ket": [[re, im]]}`.
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelsFile {
    z_bra: Vec<[f64; 2]>,
    z_ket: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
struct KernelOutput {
    example: ExampleId,
    route: String,
    params: ExampleParams,
    kernel: String,
    compare: Option<Comparison>,
}

#[derive(Debug, Serialize)]
struct Comparison {
    route: String,
    max_deviation: f64,
    tolerance: f64,
    pass: bool,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. }
            | Error::EmptyConstraintSet
            | Error::UnknownExample(_)
            | Error::MissingParameter(_)
            | Error::InconsistentPlan(_)
            | Error::QuadratureTooSmall { .. }
            | Error::DimensionCap { .. }
            | Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    match path {
        Some(p) => Ok(Config::load(p)?),
        None => Ok(Config::default()),
    }
}

fn write_json(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, format!("{body}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

/// Returns whether every check passed.
fn run(cli: &Cli) -> Result<bool, Failure> {
    let config = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Verify { suite } => {
            let ctx = Ctx {
                tol: config.tolerances,
                seed: cli.seed,
            };
            let report = RunReport::new(suite.name(), &config, cli.seed, suites::run(*suite, &ctx));
            print!("{}", report.to_text());
            write_json(cli.json.as_deref(), &report.to_json())?;
            Ok(report.all_passed())
        }
        Command::Kernel(args) => kernel(cli, &config, args),
        Command::Classify { config: path } => {
            let config = Config::load(path)?;
            let report = config.constraint_set::<f64>()?.classify()?;
            print!("{}", report.render());
            let body = serde_json::to_string_pretty(&report).map_err(|e| Failure::Verification(e.to_string()))?;
            write_json(cli.json.as_deref(), &body)?;
            Ok(true)
        }
    }
}

fn kernel_params(config: &Config, args: &KernelArgs) -> Result<ExampleParams, Failure> {
    let mut params = config.kernel.clone().unwrap_or_default();
    if let Some(path) = &args.labels {
        let body = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let labels: LabelsFile =
            serde_json::from_str(&body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        params.z_bra = labels.z_bra;
        params.z_ket = labels.z_ket;
    }
    if let Some(t) = args.t {
        params.t = t;
    }
    if let Some(p) = args.p {
        params.p = p;
    }
    if let Some(w) = args.omega {
        params.omega = w;
    }
    Ok(params)
}

fn evaluate(
    sys: &ExampleSystem<f64>,
    config: &Config,
    route: KernelRoute,
    n_slices: Option<usize>,
) -> Result<ConstrainedKernel<f64>, Failure> {
    if route != KernelRoute::Lattice {
        return Ok(evaluate_system(sys, route)?);
    }
    let mut plan = match &config.lattice {
        Some(l) if l.example == sys.id => l.plan(),
        _ => LatticePlan::for_example(sys.id, DEFAULT_SLICES),
    };
    if let Some(n) = n_slices {
        plan.n_slices = n;
        if let fermicon::lattice::Schedule::Multipliers(eta) = &plan.schedule {
            if eta.len() != n {
                return Err(Failure::Usage(format!(
                    "config gives {} multipliers for {n} slices",
                    eta.len()
                )));
            }
        }
    }
    Ok(lattice_propagate(sys.id, &sys.params, &plan)?)
}

fn kernel(cli: &Cli, config: &Config, args: &KernelArgs) -> Result<bool, Failure> {
    let params = kernel_params(config, args)?;
    let sys = ExampleSystem::<f64>::build(args.example, &params)?;
    let k = evaluate(&sys, config, args.route, args.n_slices)?;
    println!("{} [{}]", args.example, args.route);
    println!("{}", text::render(&k.value));
    let compare = match args.compare {
        Some(route) => {
            let other = evaluate(&sys, config, route, args.n_slices)?;
            let max_deviation = k.max_deviation(&other)?;
            let tolerance = if args.example == ExampleId::BoseFermi {
                config.tolerances.bose_fermi
            } else {
                config.tolerances.kernel
            };
            let pass = max_deviation <= tolerance;
            println!(
                "{} {} vs {}: max deviation {max_deviation:.3e} (tol {tolerance:.0e})",
                if pass { "PASS" } else { "FAIL" },
                args.route,
                route
            );
            Some(Comparison {
                route: route.to_string(),
                max_deviation,
                tolerance,
                pass,
            })
        }
        None => None,
    };
    let pass = compare.as_ref().is_none_or(|c| c.pass);
    let out = KernelOutput {
        example: args.example,
        route: args.route.to_string(),
        params,
        kernel: text::render(&k.value),
        compare,
    };
    let body = serde_json::to_string_pretty(&out).map_err(|e| Failure::Verification(e.to_string()))?;
    write_json(cli.json.as_deref(), &body)?;
    Ok(pass)
}
