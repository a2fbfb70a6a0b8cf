//! Command-line and config-file parsing into a [`RunConfig`].
//!
//! Precedence, lowest first: built-in defaults, the `--config` TOML file,
//! then flags. Tolerances are set with `--tol.<name>=<value>` (or
//! `--tol.<name> <value>`) and the `[tolerances]` table of the file.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use schottky_core::obstruction::HARNESS_DEPTH;
use schottky_core::Tolerances;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "schottky", version, about = "Schottky groups on complex projective space")]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
    /// TOML file with `seed`, `samples`, `output` and a `[tolerances]` table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Artifact path; standard output when absent.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample count; each command has its own default.
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Nori's Schottky group on odd-dimensional P^n, as group JSON.
    BuildNori {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        g: usize,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
    },
    /// Checks the Schottky axioms for group JSON.
    Verify { input: PathBuf },
    /// Two-sided orbits of interior points under one generator, as CSV.
    Orbit {
        input: PathBuf,
        #[arg(long = "gen", default_value_t = 1)]
        generator: usize,
        #[arg(long, default_value_t = 200)]
        mmax: u64,
    },
    /// Reduced words up to a length; with `--check`, their action on interior points.
    Words {
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        maxlen: usize,
        #[arg(long)]
        check: bool,
    },
    /// Modulus decomposition and limit set of a map (or of one generator of a group).
    LimitSet {
        input: PathBuf,
        #[arg(long = "gen", default_value_t = 1)]
        generator: usize,
        #[arg(long, default_value_t = 500)]
        mmax: u64,
    },
    /// Decay table of `C(m, l) lambda^{-m} t^m v`, as CSV.
    Decay {
        /// JSON with `t`, `lambda`, `power` and optionally `vector`; a
        /// Jordan block of size `n + 1` at 1/2 when absent.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 400)]
        mmax: u64,
    },
    /// Runs the even-dimension contradiction harness on candidate data.
    Obstruct {
        input: PathBuf,
        #[arg(long, default_value_t = HARNESS_DEPTH)]
        depth: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    BuildNori { n: usize, g: usize, alpha: f64 },
    Verify { input: PathBuf },
    Orbit { input: PathBuf, generator: usize, m_max: u64 },
    Words { input: PathBuf, max_len: usize, check: bool },
    LimitSet { input: PathBuf, generator: usize, m_max: u64 },
    Decay { input: Option<PathBuf>, n: usize, m_max: u64 },
    Obstruct { input: PathBuf, depth: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::BuildNori { .. } => "build-nori",
            Command::Verify { .. } => "verify",
            Command::Orbit { .. } => "orbit",
            Command::Words { .. } => "words",
            Command::LimitSet { .. } => "limit-set",
            Command::Decay { .. } => "decay",
            Command::Obstruct { .. } => "obstruct",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub tolerances: Tolerances,
    /// Determines every sampled quantity of the run.
    pub seed: u64,
    pub samples: Option<usize>,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, tolerances: Tolerances::default(), seed: 0, samples: None, output_path: None }
    }

    /// Parses a full argument list, program name first.
    pub fn from_args<I, T>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString>,
    {
        let (rest, tol_flags) = split_tolerance_flags(args.into_iter().map(Into::into).collect())?;
        let cli = Cli::try_parse_from(rest)?;
        let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let mut overrides = file.tolerances;
        overrides.extend(tol_flags);
        let tolerances = Tolerances::with_overrides(&overrides).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(RunConfig {
            command: cli.command.into(),
            tolerances,
            seed: cli.seed.or(file.seed).unwrap_or(0),
            samples: cli.samples.or(file.samples),
            output_path: cli.output.or(file.output),
        })
    }
}

impl From<CommandArgs> for Command {
    fn from(args: CommandArgs) -> Self {
        match args {
            CommandArgs::BuildNori { n, g, alpha } => Command::BuildNori { n, g, alpha },
            CommandArgs::Verify { input } => Command::Verify { input },
            CommandArgs::Orbit { input, generator, mmax } => Command::Orbit { input, generator, m_max: mmax },
            CommandArgs::Words { input, maxlen, check } => Command::Words { input, max_len: maxlen, check },
            CommandArgs::LimitSet { input, generator, mmax } => Command::LimitSet { input, generator, m_max: mmax },
            CommandArgs::Decay { input, n, mmax } => Command::Decay { input, n, m_max: mmax },
            CommandArgs::Obstruct { input, depth } => Command::Obstruct { input, depth },
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    samples: Option<usize>,
    output: Option<PathBuf>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

const TOL_PREFIX: &str = "--tol.";

/// Pulls `--tol.<name>=<value>` and `--tol.<name> <value>` out of the
/// argument list; unknown names fail later, in [`Tolerances::with_overrides`].
fn split_tolerance_flags(args: Vec<OsString>) -> Result<(Vec<OsString>, BTreeMap<String, f64>), CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tolerances = BTreeMap::new();
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let Some(flag) = arg.to_str().and_then(|s| s.strip_prefix(TOL_PREFIX)) else {
            rest.push(arg);
            continue;
        };
        let (name, raw) = match flag.split_once('=') {
            Some((name, raw)) => (name.to_string(), raw.to_string()),
            None => {
                let value = iter
                    .next()
                    .and_then(|v| v.into_string().ok())
                    .ok_or_else(|| CliError::Config(format!("missing value for {TOL_PREFIX}{flag}")))?;
                (flag.to_string(), value)
            }
        };
        let value: f64 =
            raw.parse().map_err(|_| CliError::Config(format!("{TOL_PREFIX}{name}: `{raw}` is not a number")))?;
        tolerances.insert(name, value);
    }
    Ok((rest, tolerances))
}
