mod simulate;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use gan_core::arithmetic::CostModel;
use gan_core::circuit::dump_ir;
use gan_core::estimator::{compile_step, estimate_model, table1_harness, ModelSource, DEFAULT_DT, DEFAULT_STEPS};
use gan_core::fragmentation::build_fragments;
use gan_core::model::{save_model, Preset, ToySpec};
use gan_core::verify::run_suite;
use gan_core::Error;

#[derive(Parser)]
#[command(name = "gan", version, about = "Compile, cost and simulate molecule-metal models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resource estimate for one model.
    Estimate(EstimateArgs),
    /// Compare all nine application presets with the published table.
    Table1 {
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: u64,
        /// Comparison CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a simulation described by a JSON config.
    Simulate(simulate::SimulateArgs),
    /// Run the invariant checks.
    Verify {
        /// Fewer random models, for a quick run.
        #[arg(long)]
        small: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Also write the check table as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write a model as JSON.
    Model {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long, conflicts_with_all = ["model", "toy"])]
    preset: Option<Preset>,
    /// Model JSON file.
    #[arg(long, conflicts_with = "toy")]
    model: Option<PathBuf>,
    /// Toy model shape as a JSON file.
    #[arg(long)]
    toy: Option<PathBuf>,
    /// Coefficient seed for presets and toy models.
    #[arg(long = "model-seed", default_value_t = 0)]
    model_seed: u64,
}

impl SourceArgs {
    fn source(&self) -> Result<ModelSource, Error> {
        match (&self.preset, &self.model, &self.toy) {
            (Some(p), _, _) => Ok(ModelSource::Preset { preset: *p, seed: self.model_seed }),
            (_, Some(path), _) => Ok(ModelSource::File(path.clone())),
            (_, _, Some(path)) => {
                let spec: ToySpec = serde_json::from_str(&fs::read_to_string(path)?)?;
                Ok(ModelSource::Toy { spec, seed: self.model_seed })
            }
            _ => Err(Error::InvalidArgument("one of --preset, --model or --toy is required".into())),
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: u64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Cost model JSON; missing fields take their defaults.
    #[arg(long)]
    cost_model: Option<PathBuf>,
    /// Report path: `.txt` writes the text summary, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the IR of one Trotter step as text.
    #[arg(long)]
    dump_ir: Option<PathBuf>,
}

/// Failure of a command: bad input, or a check that ran and did not pass.
pub enum Failure {
    Input(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.into())
    }
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: &'a str,
    message: String,
}

fn report_failure(code: &str, message: String) {
    let doc = ErrorDoc { error: code, message };
    eprintln!("{}", serde_json::to_string(&doc).expect("error documents serialize"));
}

pub fn write(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn estimate(args: &EstimateArgs) -> Result<(), Failure> {
    let model = args.source.source()?.resolve()?;
    let cost_model: CostModel = match &args.cost_model {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?).map_err(Error::from)?,
        None => CostModel::default(),
    };
    let report = estimate_model(&model, args.steps, args.dt, &cost_model)?;
    if let Some(path) = &args.dump_ir {
        let step = compile_step(&model, &build_fragments(&model)?, args.dt, &cost_model)?;
        write(path, &dump_ir(&step.circuit))?;
    }
    match &args.out {
        Some(path) if path.extension().is_some_and(|e| e == "txt") => write(path, &report.to_text())?,
        Some(path) => write(path, &(serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n"))?,
        None => print!("{}", report.to_text()),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Estimate(args) => estimate(&args),
        Command::Table1 { steps, out } => {
            let cmp = table1_harness(steps)?;
            print!("{}", cmp.to_text());
            if let Some(path) = out {
                write(&path, &cmp.to_csv())?;
            }
            if cmp.qubits_pass() && cmp.toffoli_pass() {
                Ok(())
            } else {
                Err(Failure::Verification("table comparison failed".into()))
            }
        }
        Command::Simulate(args) => simulate::run(&args),
        Command::Verify { small, seed, json } => {
            let report = run_suite(small, seed);
            print!("{}", report.to_text());
            if let Some(path) = json {
                write(&path, &(serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n"))?;
            }
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                Err(Failure::Verification(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::Model { source, out } => {
            let model = source.source()?.resolve()?;
            match out {
                Some(path) => save_model(&model, &path)?,
                None => println!("{}", serde_json::to_string_pretty(&model).map_err(Error::from)?),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_failure("InvalidArguments", e.to_string().trim().to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            report_failure("VerificationFailed", msg);
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            report_failure(e.code(), e.to_string());
            ExitCode::from(2)
        }
    }
}
