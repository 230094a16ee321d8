//! Command layer behind the `fedosov` binary. Every command renders to a
//! string so that golden tests and the binary share one code path.

pub mod job;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use fedosov_core::fedosov::{build_abelian, AbelianConnection, Observable};
use fedosov_core::grading::{fiber_position, fiber_unposition, sym_rank, sym_unrank, FiberAddress, Part, SymIndex};
use fedosov_core::poly::Poly;
use num_bigint::BigUint;
use thiserror::Error;

pub use job::{parse_job, Job, Prepared};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    /// A `check` run with at least one failing check; `report` is the full output.
    #[error("{failed} check(s) failed")]
    CheckFailed { report: String, failed: usize, validation: bool },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Consistency(_) => 4,
            CliError::CheckFailed { validation: true, .. } => 3,
            CliError::CheckFailed { .. } => 4,
        }
    }
}

impl From<fedosov_core::Error> for CliError {
    fn from(e: fedosov_core::Error) -> Self {
        use fedosov_core::Error as E;
        match e {
            E::Parse(p) => CliError::Parse { line: 0, message: p.to_string() },
            E::InvalidDimension(_)
            | E::InvalidSymIndex { .. }
            | E::InvalidFormIndex { .. }
            | E::RankOutOfRange { .. }
            | E::SymmetryViolation { .. }
            | E::ConnectionIndex { .. } => CliError::Validation(e.to_string()),
            E::Mismatch { .. } | E::HbarResidue { .. } | E::IdentityMismatch { .. } => CliError::Consistency(e.to_string()),
        }
    }
}

/// Exact Fedosov star products on Darboux charts.
#[derive(Debug, Parser)]
#[command(name = "fedosov", version)]
pub struct Cli {
    /// Job file with [chart], [connection] and [observables] sections.
    #[arg(long, global = true)]
    pub job: Option<PathBuf>,
    /// Truncation order N; overrides the job file.
    #[arg(long, global = true)]
    pub order: Option<u32>,
    /// Also print intermediate flat lifts.
    #[arg(long, global = true)]
    pub verbose: bool,
    /// Print observables as one `hbar^k * (poly)` line per power of hbar.
    #[arg(long, global = true)]
    pub graded: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Star product f1 * f2 of two named observables.
    Star { f1: String, f2: String },
    /// Moyal bracket (f1*f2 - f2*f1)/(i hbar) of two named observables.
    Bracket { f1: String, f2: String },
    /// Flat section lifting a named observable.
    Lift { f: String },
    /// Rank of a nondecreasing index such as `1,2` among tuples of its length.
    Rank { two_n: usize, index: String },
    /// Index of length l with the given rank.
    Unrank { two_n: usize, l: usize, rank: String },
    /// Series position of a fiber address.
    Position { two_n: usize, part: PartArg, k: u32, index: String },
    /// Validation, curvature, centrality and lift checks on a job.
    Check,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PartArg {
    Re,
    Im,
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Star { f1, f2 } => {
            let (p, ab) = setup(cli)?;
            let (a, b) = (p.observable(f1)?, p.observable(f2)?);
            let mut out = lifts_text(cli, &ab, &[(f1, a), (f2, b)])?;
            out.push_str(&observable_text(cli, &ab.star(a, b)?));
            Ok(out)
        }
        Command::Bracket { f1, f2 } => {
            let (p, ab) = setup(cli)?;
            let (a, b) = (p.observable(f1)?, p.observable(f2)?);
            let mut out = lifts_text(cli, &ab, &[(f1, a), (f2, b)])?;
            out.push_str(&observable_text(cli, &ab.moyal_bracket(a, b)?));
            Ok(out)
        }
        Command::Lift { f } => {
            let (p, ab) = setup(cli)?;
            Ok(format!("{}\n", ab.flat_lift(p.observable(f)?)?))
        }
        Command::Rank { two_n, index } => {
            let idx = parse_index(*two_n, index)?;
            Ok(format!("{}\n", sym_rank(*two_n, &idx)?))
        }
        Command::Unrank { two_n, l, rank } => {
            let r: BigUint = rank.parse().map_err(|_| CliError::Usage(format!("bad rank `{rank}`")))?;
            Ok(format!("{}\n", sym_unrank(*two_n, *l, &r)?))
        }
        Command::Position { two_n, part, k, index } => {
            let part = match part {
                PartArg::Re => Part::Real,
                PartArg::Im => Part::Imag,
            };
            let addr = FiberAddress::new(part, *k, parse_index(*two_n, index)?);
            let p = fiber_position(*two_n, &addr)?;
            // the inverse must land back on the same address
            if fiber_unposition(*two_n, &p)? != addr {
                return Err(CliError::Consistency(format!("position {p} does not invert")));
            }
            Ok(format!("{p}\n"))
        }
        Command::Check => check(cli),
    }
}

fn load(cli: &Cli) -> Result<Job, CliError> {
    let path = cli.job.as_ref().ok_or_else(|| CliError::Usage("this command needs --job FILE".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_job(&text)
}

fn setup(cli: &Cli) -> Result<(Prepared, AbelianConnection), CliError> {
    let p = load(cli)?.prepare(cli.order)?;
    let ab = build_abelian(&p.connection, p.order)?;
    Ok((p, ab))
}

fn observable_text(cli: &Cli, o: &Observable) -> String {
    if cli.graded {
        format!("{}\n", o.graded_text())
    } else {
        format!("{o}\n")
    }
}

fn lifts_text(cli: &Cli, ab: &AbelianConnection, named: &[(&String, &Observable)]) -> Result<String, CliError> {
    let mut out = String::new();
    if cli.verbose {
        for (name, o) in named {
            out.push_str(&format!("lift {name} = {}\n", ab.flat_lift(o)?));
        }
    }
    Ok(out)
}

/// `1,2,2`, `(1,2,2)`, `()` or the empty string.
fn parse_index(two_n: usize, text: &str) -> Result<SymIndex, CliError> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    let mut entries = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        entries.push(part.parse::<usize>().map_err(|_| CliError::Usage(format!("bad index entry `{part}`")))?);
    }
    Ok(SymIndex::new(two_n, &entries)?)
}

fn check(cli: &Cli) -> Result<String, CliError> {
    let job = load(cli)?;
    let mut report = String::new();
    let mut line = |name: &str, result: &Result<(), CliError>| match result {
        Ok(()) => report.push_str(&format!("{name}: pass\n")),
        Err(e) => report.push_str(&format!("{name}: fail ({e})\n")),
    };
    let prepared = job.prepare(cli.order);
    let p = match prepared {
        Ok(p) => {
            line("validate", &Ok(()));
            p
        }
        Err(e @ CliError::Parse { .. }) => return Err(e),
        Err(e) => {
            line("validate", &Err(e));
            for name in ["curvature", "centrality", "lifts"] {
                report.push_str(&format!("{name}: skipped\n"));
            }
            return Err(CliError::CheckFailed { report, failed: 1, validation: true });
        }
    };
    let mut failed = 0;
    let mut record = |name: &str, r: Result<(), CliError>| {
        failed += r.is_err() as usize;
        line(name, &r);
    };
    let work = p.order + 2;
    record(
        "curvature",
        (|| {
            let direct = p.connection.curvature(work)?;
            let assembled = p.connection.curvature_tensor().assemble(work)?;
            Ok(direct.expect_equal(&assembled, "curvature components")?)
        })(),
    );
    match build_abelian(&p.connection, p.order) {
        Ok(ab) => {
            record("centrality", ab.check_centrality().map_err(CliError::from));
            let coords: Vec<(String, Observable)>;
            let targets = if p.observables.is_empty() {
                coords = (0..p.two_n)
                    .map(|j| Ok((format!("q{}", j + 1), Observable::from_poly(p.two_n, p.order, Poly::var(p.two_n, j))?)))
                    .collect::<Result<_, fedosov_core::Error>>()?;
                &coords
            } else {
                &p.observables
            };
            for (name, o) in targets {
                record(&format!("lift {name}"), ab.check_lift(o).map_err(CliError::from));
            }
        }
        Err(e) => record("centrality", Err(e.into())),
    }
    if failed > 0 {
        return Err(CliError::CheckFailed { report, failed, validation: false });
    }
    Ok(report)
}
