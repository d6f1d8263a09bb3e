use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use maslov::job::{run_compute, to_json, IndexKind, Overrides};
use maslov::verify::{run_verify, Mutation, VerifyOptions};
use maslov::Tolerances;

#[derive(Parser)]
#[command(
    name = "maslov",
    version,
    about = "Maslov-type indices of Lagrangian and symplectic paths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one index described by a JSON job file.
    Compute(ComputeArgs),
    /// Run the seeded invariant suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct TolArgs {
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    tol_sig: Option<f64>,
    #[arg(long)]
    tol_round: Option<f64>,
    #[arg(long)]
    refine_depth: Option<u32>,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides the job's own "index" field.
    #[arg(long, value_enum)]
    index: Option<IndexArg>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    n_max: usize,
    /// Instances per check and dimension (default: per-check counts).
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long, value_enum)]
    mutate: Option<MutationArg>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexArg {
    KellerMaslov,
    Leray,
    Lagrangian,
    Symplectic,
    MuEll,
    Kashiwara,
    Inert,
    Hormander,
    Rs,
    SpectralFlow,
}

impl From<IndexArg> for IndexKind {
    fn from(a: IndexArg) -> Self {
        match a {
            IndexArg::KellerMaslov => IndexKind::KellerMaslov,
            IndexArg::Leray => IndexKind::Leray,
            IndexArg::Lagrangian => IndexKind::Lagrangian,
            IndexArg::Symplectic => IndexKind::Symplectic,
            IndexArg::MuEll => IndexKind::MuEll,
            IndexArg::Kashiwara => IndexKind::Kashiwara,
            IndexArg::Inert => IndexKind::Inert,
            IndexArg::Hormander => IndexKind::Hormander,
            IndexArg::Rs => IndexKind::Rs,
            IndexArg::SpectralFlow => IndexKind::SpectralFlow,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    FlipTauSign,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::FlipTauSign => Mutation::FlipTauSign,
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => {
            std::fs::write(path, format!("{text}\n")).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn overrides(index: Option<IndexArg>, tol: &TolArgs) -> Overrides {
    Overrides {
        index: index.map(Into::into),
        tol_rank: tol.tol_rank,
        tol_sig: tol.tol_sig,
        tol_round: tol.tol_round,
        refine_depth: tol.refine_depth,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute(args) => {
            let report = run_compute(&args.input, &overrides(args.index, &args.tol));
            if let Err(e) = emit(&to_json(&report), args.output.as_ref()) {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            if let Some(err) = &report.error {
                eprintln!("{}: {}", err.code, err.message);
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Verify(args) => {
            let o = overrides(None, &args.tol);
            let mut tolerances = Tolerances::default();
            tolerances.tol_rank = o.tol_rank.unwrap_or(tolerances.tol_rank);
            tolerances.tol_sig = o.tol_sig.unwrap_or(tolerances.tol_sig);
            tolerances.tol_round = o.tol_round.unwrap_or(tolerances.tol_round);
            tolerances.refine_depth = o.refine_depth.unwrap_or(tolerances.refine_depth);
            let report = run_verify(&VerifyOptions {
                seed: args.seed,
                n_max: args.n_max,
                instances: args.instances,
                tolerances,
                mutation: args.mutate.map(Into::into),
            });
            for c in &report.checks {
                let status = if c.passed() { "ok" } else { "FAIL" };
                eprintln!(
                    "{status:4} {:36} n={} {}/{}",
                    c.id,
                    c.n,
                    c.instances - c.failures,
                    c.instances
                );
                if let Some(f) = &c.first_failure {
                    eprintln!("     {f}");
                }
            }
            if let Err(e) = emit(&to_json(&report), args.output.as_ref()) {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(5)
            }
        }
    }
}
