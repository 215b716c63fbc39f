use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pirlab::audit::Exact;
use pirlab::coding::CodecConfig;
use pirlab::seed::DEFAULT_SEED;
use pirlab::Rational;
use pirlab_cli::{
    cmd_audit, cmd_capacity, cmd_reproduce, cmd_simulate, parse_rational, CliError, Mode, Report,
    ReproduceConfig, ReproduceMode, RunConfig, SchemeKind, StorageVariant,
};

/// Private information retrieval schemes with coded storage: capacity,
/// simulation, exact audits and reproduction of the reference numbers.
#[derive(Parser)]
#[command(name = "pirlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity of T-private retrieval of one of K messages from N databases.
    Capacity {
        #[arg(short = 'K', default_value_t = 2)]
        messages: u32,
        #[arg(short = 'N', default_value_t = 2)]
        databases: u32,
        #[arg(short = 'T', default_value_t = 1)]
        collusion: u32,
    },
    /// Run sessions and report download, upload, rate and errors.
    Simulate(RunArgs),
    /// Exact privacy, correctness, rate and bound checks for one scheme.
    Audit(RunArgs),
    /// Recompute every reference number and compare against its expected value.
    Reproduce {
        #[arg(long, value_enum, default_value_t = ReproduceMode::Full)]
        mode: ReproduceMode,
        #[arg(long, env = "PIRLAB_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Slepian-Wolf rate margin in bits per symbol.
        #[arg(long, default_value_t = 0.15)]
        rate_margin: f64,
        #[arg(long, default_value_t = 16)]
        block_length: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = SchemeKind::Multiround)]
    scheme: SchemeKind,
    #[arg(long, value_enum, default_value_t = Mode::Ideal)]
    mode: Mode,
    /// Message length L in bits.
    #[arg(long, short = 'L', default_value_t = 1)]
    message_length: usize,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, env = "PIRLAB_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Slepian-Wolf block length n.
    #[arg(long, default_value_t = 16)]
    block_length: usize,
    /// Slepian-Wolf rate margin in bits per symbol.
    #[arg(long, default_value_t = 0.15)]
    rate_margin: f64,
    /// Probability that a message bit is 1, as `p/q` or a decimal.
    #[arg(long, value_parser = parse_rational, default_value = "1/2")]
    message_bias: Rational,
    #[arg(long, value_enum, default_value_t = StorageVariant::Split)]
    storage_variant: StorageVariant,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            scheme: self.scheme,
            mode: self.mode,
            message_length: self.message_length,
            trials: self.trials,
            seed: self.seed,
            codec: CodecConfig {
                block_length: self.block_length,
                rate_margin: self.rate_margin,
                seed: self.seed,
            },
            message_bias: Exact(self.message_bias),
            storage_variant: self.storage_variant,
        }
    }
}

fn run(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Capacity {
            messages,
            databases,
            collusion,
        } => cmd_capacity(messages, databases, collusion),
        Command::Simulate(args) => cmd_simulate(&args.config()),
        Command::Audit(args) => cmd_audit(&args.config()),
        Command::Reproduce {
            mode,
            seed,
            rate_margin,
            block_length,
        } => cmd_reproduce(&ReproduceConfig {
            mode,
            seed,
            codec: CodecConfig {
                block_length,
                rate_margin,
                seed,
            },
        }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            match serde_json::to_string_pretty(&report.json) {
                Ok(text) => println!("{text}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            eprintln!("verdict: {}", report.verdict);
            if report.verdict.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
