use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hpn_degrees::congruence::{exponent_table, DEFAULT_SCAN_GUARD};
use hpn_degrees::padic::parse_rational;
use hpn_degrees::report::{self, OutputFormat, ReportConfig};
use hpn_degrees::verify::{self, Suite};

/// Degrees of self maps of quaternionic projective space: membership in the
/// Feder-Gitler sets, exponent tables, and verification suites.
#[derive(Debug, Parser)]
#[command(name = "hpn-degrees", version, args_conflicts_with_subcommands = false)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,

    /// Largest prime in `table`
    #[arg(long, global = true, default_value_t = 13, value_parser = clap::value_parser!(u64).range(1..))]
    pmax: u64,

    /// Largest level in `table`
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    nmax: u32,

    /// Maximum number of residue classes any scan may visit
    #[arg(long, global = true, default_value_t = DEFAULT_SCAN_GUARD)]
    scan_guard: u64,

    /// Worker threads for scans (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write output to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether k (integer or a/b) satisfies C_1..C_n
    Check {
        #[arg(allow_hyphen_values = true)]
        k: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Decide in Z_(p) only, by closed form and by the congruences
        #[arg(long)]
        p: Option<u64>,
        /// Run the K-theory test as well when n is at most this
        #[arg(long, default_value_t = 8)]
        cross_check_bound: u32,
    },
    /// Tabulate e(p, n), f(p, n) and proof status for p <= pmax, n <= nmax
    Table,
    /// Show the Adams-commuting endomorphism with leading coefficient k
    Phi {
        #[arg(allow_hyphen_values = true)]
        k: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
    /// List residues all of whose lifts satisfy C_1..C_n
    Residues {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Modulus; defaults to the smallest one that decides C_1..C_n
        #[arg(long)]
        modulus: Option<u64>,
    },
    /// Run verification suites; exits 1 if any case fails
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

fn run(cli: Cli) -> Result<(String, u8), hpn_degrees::Error> {
    let config = ReportConfig {
        format: cli.format,
        pmax: cli.pmax,
        nmax: cli.nmax,
        scan_guard: cli.scan_guard,
        jobs: cli.jobs,
        ..ReportConfig::default()
    };
    let rendered = match cli.command {
        Command::Check {
            k,
            n,
            p,
            cross_check_bound,
        } => {
            let record = report::check(&parse_rational(&k)?, n, p, cross_check_bound)?;
            report::render_check(&record, config.format)
        }
        Command::Table => {
            report::render_table(&exponent_table(config.pmax, config.nmax), config.format)
        }
        Command::Phi { k, n } => {
            let record = report::phi(&parse_rational(&k)?, n as usize)?;
            report::render_phi(&record, config.format)
        }
        Command::Residues { n, modulus } => {
            let record = report::residues(n, modulus, config.scan_guard)?;
            report::render_residues(&record, config.format)
        }
        Command::Verify { suite } => {
            let outcomes = verify::run(suite, config.scan_guard);
            let code = verify::exit_code(&outcomes) as u8;
            return Ok((verify::render(&outcomes, config.format), code));
        }
    };
    Ok((rendered, 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    }
    let out = cli.out.clone();
    match run(cli) {
        Ok((text, code)) => {
            match out {
                Some(path) => {
                    if let Err(err) = fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {err}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
