//! `pavcore`: core-stability checks, PAV rules and certified existence proofs
//! for approval-based committee elections.
//!
//! Exit codes: 0 success or claim holds, 1 claim fails or deviation found,
//! 2 input error, 3 time budget exceeded.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use pav_core::stability::Quota;

#[derive(Parser, Debug)]
#[command(name = "pavcore", version, about)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Stop long searches after this many seconds (exit code 3).
    #[arg(long, global = true)]
    budget_seconds: Option<u64>,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuotaArg {
    Hare,
    Droop,
}

impl From<QuotaArg> for Quota {
    fn from(q: QuotaArg) -> Quota {
        match q {
            QuotaArg::Hare => Quota::Hare,
            QuotaArg::Droop => Quota::Droop,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Inequality,
    Program3,
    Histories,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    PavLocal,
    PavGlobal,
    RecursivePav,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Look for a successful deviation from a committee.
    VerifyCore {
        profile: PathBuf,
        /// Committee members, 1-based and comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        committee: Vec<usize>,
        #[arg(long, value_enum, default_value = "hare")]
        quota: QuotaArg,
    },
    /// Run one of the existence proofs and write its certificates.
    Prove {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        k: usize,
        /// Number of candidates (history mode only).
        #[arg(long)]
        m: Option<usize>,
        /// Directory for the certificate bundle.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify every certificate in a bundle without a solver.
    CheckCertificates { bundle: PathBuf },
    /// Compute committees with a PAV-based rule.
    Rule {
        profile: PathBuf,
        #[arg(long, value_enum)]
        rule: RuleArg,
        #[arg(long, value_enum, default_value = "hare")]
        quota: QuotaArg,
        /// Committee to start the local search from instead of the greedy
        /// one (first round only for recursive-pav), 1-based.
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<usize>>,
    },
}

pub struct Settings {
    pub json: bool,
    pub budget: Option<Duration>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let settings = Settings {
        json: cli.json,
        budget: cli.budget_seconds.map(Duration::from_secs),
    };
    let result = match cli.command {
        Command::VerifyCore {
            profile,
            committee,
            quota,
        } => commands::verify_core(&settings, &profile, &committee, quota.into()),
        Command::Prove { mode, k, m, out } => commands::prove(&settings, mode, k, m, out.as_deref()),
        Command::CheckCertificates { bundle } => commands::check_certificates(&settings, &bundle),
        Command::Rule {
            profile,
            rule,
            quota,
            start,
        } => commands::rule(&settings, &profile, rule, quota.into(), start.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
