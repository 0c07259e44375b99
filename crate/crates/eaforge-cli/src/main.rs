use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use eaforge_cli::commands::{self, GenArgs, RecoverArgs, EXIT_ERROR};
use eaforge_cli::format::{parse_function_file, FunctionFile};

/// Analysis of vectorial Boolean functions up to EA-equivalence:
/// spectra, Jacobian rank tables, ortho-derivative invariants,
/// EA-recovery and CCZ-class exploration.
///
/// Function files are line oriented; `#` starts a comment. Records:
/// `T <n> <m> <hex outputs...>` for truth tables,
/// `U <n> <mod-hex> <coef>:<exp>[,...]` for univariate polynomials over
/// GF(2^n) (coefficients `a^k`, `a`, `1`, `0`, or `0xHH`).
#[derive(Parser)]
#[command(name = "eaforge", version, about)]
struct Cli {
    /// Worker threads; defaults to the EAFORGE_JOBS environment variable,
    /// then to the available parallelism. Results never depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degree, differential and extended Walsh spectra, linearity, APN
    /// and permutation flags, per function.
    Spectra { file: PathBuf },
    /// Jacobian rank distribution of each (quadratic) function.
    Ranktable { file: PathBuf },
    /// Ortho-derivative invariant label of each quadratic APN function.
    Ortho { file: PathBuf },
    /// Bucket the functions of a file by selected invariants.
    Partition {
        file: PathBuf,
        /// Comma-separated invariants: ortho_diff, ortho_walsh, degree,
        /// diff_spectrum, walsh_spectrum, gamma_rank, delta_rank,
        /// sigma4, thickness.
        #[arg(long = "use", value_delimiter = ',', required = true)]
        invariants: Vec<String>,
    },
    /// Recover, if it exists, a tuple (A0, B0, C0, a) with
    /// G = A0 F(B0 x) + C0 x + a for the first functions of two files.
    /// Exits 0 on success, 2 for NOT EQUIVALENT, 3 for NO EQUIVALENCE
    /// FOUND.
    EaRecover {
        file_f: PathBuf,
        file_g: PathBuf,
        /// Number of simultaneous guesses (default: 3, or 2 for APN
        /// rank distributions with n = m).
        #[arg(long)]
        s: Option<usize>,
        /// Largest solution-space dimension enumerated per guess.
        #[arg(long, default_value_t = 10)]
        threshold: usize,
        /// Refine over-threshold guesses with an extra reference vector
        /// instead of skipping them.
        #[arg(long)]
        exhaustive: bool,
        /// Accepted for script compatibility; recovery is deterministic
        /// and uses no randomness either way.
        #[arg(long)]
        seedless: bool,
    },
    /// Count the dimension-n vector spaces inside the Walsh zeroes and
    /// report the thickness spectrum.
    Spaces { file: PathBuf },
    /// Bounds on the number of EA-classes inside each CCZ-class, with a
    /// per-thickness-spectrum breakdown.
    CczExpand { file: PathBuf },
    /// Gamma- and Delta-rank of each function (n = m, n <= 7).
    GammaDelta { file: PathBuf },
    /// Sigma-k multiplicities of each function.
    Sigma {
        file: PathBuf,
        /// Even subset size, k > 2.
        #[arg(long)]
        k: usize,
    },
    /// Emit random quadratic functions as T records.
    GenQuadratic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        count: usize,
        /// PRNG seed; runs with the same seed emit identical records.
        #[arg(long)]
        seed: u64,
        /// Keep only APN functions (requires m >= n).
        #[arg(long)]
        apn_only: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs.or_else(|| {
        std::env::var("EAFORGE_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(jobs) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            eprintln!("eaforge: could not configure {jobs} worker threads: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    }
    match run(cli.command, jobs) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("eaforge: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn run(command: Command, jobs: Option<usize>) -> Result<i32> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match command {
        Command::Spectra { file } => commands::spectra(&load(&file)?, &mut out)?,
        Command::Ranktable { file } => commands::ranktable(&load(&file)?, &mut out)?,
        Command::Ortho { file } => commands::ortho(&load(&file)?, &mut out)?,
        Command::Partition { file, invariants } => {
            commands::partition(&load(&file)?, &invariants, &mut out)?
        }
        Command::EaRecover {
            file_f,
            file_g,
            s,
            threshold,
            exhaustive,
            seedless: _,
        } => {
            let args = RecoverArgs {
                s,
                threshold: Some(threshold),
                exhaustive,
                jobs,
            };
            commands::ea_recover(&load(&file_f)?, &load(&file_g)?, &args, &mut out)?
        }
        Command::Spaces { file } => commands::spaces(&load(&file)?, &mut out)?,
        Command::CczExpand { file } => commands::ccz_expand(&load(&file)?, &mut out)?,
        Command::GammaDelta { file } => commands::gamma_delta(&load(&file)?, &mut out)?,
        Command::Sigma { file, k } => commands::sigma(&load(&file)?, k, &mut out)?,
        Command::GenQuadratic {
            n,
            m,
            count,
            seed,
            apn_only,
        } => {
            let args = GenArgs {
                n,
                m,
                count,
                seed,
                apn_only,
            };
            commands::gen_quadratic(&args, &mut out)?
        }
    };
    out.flush()?;
    Ok(code)
}

fn load(path: &Path) -> Result<FunctionFile> {
    Ok(parse_function_file(path)?)
}
