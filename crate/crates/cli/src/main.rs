use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use unikit_core::closure::MAX_ORACLE_DIM;
use unikit_core::{
    classify, gate_closure_seeds, identify_group, lie_basis, lie_closure, ClosureOptions, Error, Extension,
    SectorDescriptor,
};
use unikit_cli::report::{ClassificationReport, DimsReport, InvariantsReport, OracleReport};
use unikit_cli::scenario::{self, Overrides};
use unikit_cli::{repro, CliError, Result};

/// Classify the group generated by a linear-optics family plus one extra
/// Hamiltonian or gate.
#[derive(Parser)]
#[command(name = "unikit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the scenario described by a JSON file.
    Classify {
        file: PathBuf,
        /// Also run the Lie-closure oracle (sector dimension at most 32).
        #[arg(long)]
        oracle: bool,
        /// Zero threshold per unit of sector dimension; the nonzero
        /// threshold is 100 times larger.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Run only the Lie-closure oracle on a scenario.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        max_rounds: Option<usize>,
        /// Highest gate power used to seed gate closures.
        #[arg(long)]
        max_power: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Print the invariant vector of a sector, e.g. `bosonic:2:4`.
    Invariants {
        #[arg(long)]
        sector: SectorDescriptor,
        #[arg(long)]
        json: bool,
    },
    /// Print the algebra dimensions relevant to a sector.
    Dims {
        #[arg(long)]
        sector: SectorDescriptor,
        #[arg(long)]
        json: bool,
    },
    /// Re-run the worked examples; exits 1 if any verdict differs.
    Repro {
        /// Attach closure dimensions where the sector is small enough.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        json: bool,
    },
}

fn emit<T: Serialize>(json: bool, report: &T, text: impl FnOnce(&T) -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
    } else {
        print!("{}", text(report));
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("UNIKIT_THREADS") else { return Ok(()) };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Scenario(format!("UNIKIT_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Scenario(format!("cannot configure thread pool: {e}")))
}

fn run_oracle(file: &Path, overrides: &Overrides, json: bool) -> Result<()> {
    let (_, s) = scenario::load(file, overrides)?;
    let n = s.descriptor.dim();
    if n > MAX_ORACLE_DIM {
        return Err(Error::OracleScope { dim: n, limit: MAX_ORACLE_DIM }.into());
    }
    let basis = lie_basis(s.family, &s.descriptor)?;
    let (seeds, lower_bound) = match &s.extension {
        Extension::Hamiltonian(x) => {
            let mut seeds = basis.raw_generators().to_vec();
            seeds.push(x.clone());
            (seeds, false)
        }
        Extension::Gate(v) => (gate_closure_seeds(v, &basis, s.options.max_power)?, true),
    };
    let options = ClosureOptions { tol: s.options.rank_tol, max_rounds: s.options.max_rounds };
    let closure = lie_closure(&seeds, &options)?;
    let group = identify_group(&closure, basis.dim())?;
    let report = OracleReport::new(
        s.descriptor,
        s.family,
        s.extension.kind(),
        basis.dim(),
        &closure,
        group,
        lower_bound,
        s.options.max_power,
        s.options.max_rounds,
    );
    emit(json, &report, OracleReport::render);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Classify { file, oracle, tol, json } => {
            let overrides = Overrides { oracle, tolerance: tol, ..Default::default() };
            let (_, s) = scenario::load(&file, &overrides)?;
            let result = classify(&s)?;
            let report = ClassificationReport::new(s.descriptor, s.family, s.extension.kind(), result);
            emit(json, &report, ClassificationReport::render);
        }
        Command::Oracle { file, max_rounds, max_power, json } => {
            let overrides = Overrides { max_rounds, max_power, ..Default::default() };
            run_oracle(&file, &overrides, json)?;
        }
        Command::Invariants { sector, json } => {
            emit(json, &InvariantsReport::compute(sector)?, InvariantsReport::render);
        }
        Command::Dims { sector, json } => {
            emit(json, &DimsReport::compute(sector)?, DimsReport::render);
        }
        Command::Repro { oracle, json } => {
            let report = repro::run(oracle);
            emit(json, &report, |r| r.render());
            if !report.all_match {
                let failed = report.rows.iter().filter(|r| !r.matches).count();
                return Err(CliError::Mismatch(format!("{failed} example case(s) disagree with the expected verdicts")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
