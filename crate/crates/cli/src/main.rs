//! `edseq`: scans, lemma suites, Zsygmondy reports, heights and
//! factorizations from the command line.
//!
//! Exit status is 0 on success, 1 when a check fails and 2 on bad input.

mod commands;
mod job;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edseq::numberfield::Order;

use crate::commands::Outcomes;
use crate::job::{parse_fault, read_curve, InputError, Job};
use crate::output::Format;

#[derive(Parser)]
#[command(name = "edseq", version, about = "Shifted elliptic divisibility sequences over Q and Q(i)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One row per index: the factored term and its primitive-divisor verdict.
    Sequence(JobArgs),
    /// Good-prime lemma checks, height scaling and the Möbius chain.
    Verify {
        #[command(flatten)]
        job: JobArgs,
        /// Print diagnostics for every check, not only failures.
        #[arg(long)]
        details: bool,
    },
    /// Nonzero terms without a primitive divisor.
    Zsygmondy(JobArgs),
    /// Naive and canonical heights of P, Q and the multiples of P.
    Heights(JobArgs),
    /// Factor an integer of Z or Z[i].
    Factor {
        /// e.g. 1105 or 3+4i.
        #[arg(allow_hyphen_values = true)]
        value: String,
        /// Defaults to Zi when the value has an imaginary part.
        #[arg(long)]
        order: Option<Order>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Omit the header line with the generation time.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct JobArgs {
    /// Curve file with field=, a= and optional cm= lines.
    #[arg(long)]
    curve: PathBuf,
    /// P=x,y or Q=x,y|O; Q defaults to O.
    #[arg(long = "point", value_name = "NAME=X,Y", allow_hyphen_values = true)]
    points: Vec<String>,
    #[arg(long, default_value = "Z")]
    order: Order,
    /// Largest index norm.
    #[arg(long, default_value_t = 25)]
    max_norm: u64,
    /// Largest residue norm of the primes checked.
    #[arg(long, default_value_t = 10_000)]
    prime_cap: u64,
    /// Only print canonical representatives of each index up to units.
    #[arg(long)]
    canonical_only: bool,
    /// Corrupt a term as ALPHA:FACTOR to exercise the failure path.
    #[arg(long, hide = true)]
    fault: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

impl JobArgs {
    fn job(&self) -> Result<Job, InputError> {
        let curve = read_curve(&self.curve)?;
        let mut job = Job::new(curve, &self.points, self.order, self.max_norm, self.prime_cap)?;
        job.canonical_only = self.canonical_only;
        job.fault = self.fault.as_deref().map(parse_fault).transpose()?;
        Ok(job)
    }
}

fn run(cli: Cli) -> Result<(Outcomes, &'static str, OutputArgs), InputError> {
    Ok(match cli.command {
        Command::Sequence(a) => (commands::sequence(&a.job()?)?, "sequence", a.out),
        Command::Verify { job, details } => (commands::verify(&job.job()?, details)?, "verify", job.out),
        Command::Zsygmondy(a) => (commands::zsygmondy(&a.job()?)?, "zsygmondy", a.out),
        Command::Heights(a) => (commands::heights(&a.job()?)?, "heights", a.out),
        Command::Factor { value, order, out } => (commands::factor(&value, order)?, "factor", out),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcomes, name, out)) => {
            let text = outcomes.report.render(out.format, name, !out.no_timestamp);
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            if let Some(s) = &outcomes.summary {
                eprintln!("{}", s);
            }
            if outcomes.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
