//! Command-line front end for `coopcap-core`.
//!
//! Three subcommands: `rates` (every scheme for one realization), `sweep`
//! (Monte Carlo expectations over a grid of cooperation gains) and `bounds`
//! (the reference capacities for one realization, with an ordering
//! self-check). Settings come from flags, a `key = value` config file named
//! by `--config`, and `COOPCAP_SEED`, in decreasing order of precedence.
//!
//! This is the only place where decibels appear: every value handed to the
//! core library is linear.

pub mod parse;
mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, ArgMatches};
use coopcap_core::montecarlo::Scheme;
use coopcap_core::rx_coop::RxSearch;
use coopcap_core::txrx_coop::TxRxSearch;
use coopcap_core::Assumption;
use thiserror::Error;

use crate::parse::{parse_bool, parse_f64, parse_g_range, parse_schemes, parse_thetas};

pub use report::{execute, Report};

pub const SEED_ENV: &str = "COOPCAP_SEED";

pub const DEFAULT_P_DB: f64 = 0.0;
pub const DEFAULT_G_DB: f64 = 10.0;
pub const DEFAULT_G_DB_RANGE: &str = "-10:30:2";
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Rates,
    Sweep,
    Bounds,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rates => "rates",
            Command::Sweep => "sweep",
            Command::Bounds => "bounds",
        }
    }

    fn bit(self) -> u8 {
        match self {
            Command::Rates => RATES,
            Command::Sweep => SWEEP,
            Command::Bounds => BOUNDS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Where the single realization of `rates` and `bounds` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Realization {
    Thetas([f64; 4]),
    Sample { seed: u64, index: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Set for `rates` and `bounds`.
    pub realization: Option<Realization>,
    pub p_db: f64,
    /// One point for `rates`, the sweep grid for `sweep`, empty for `bounds`.
    pub g_db: Vec<f64>,
    pub assumption: Assumption,
    pub schemes: Vec<Scheme>,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub rx_search: RxSearch,
    pub txrx_search: TxRxSearch,
}

impl RunConfig {
    pub fn budget(&self) -> f64 {
        db_to_linear(self.p_db)
    }

    pub fn gains(&self) -> Vec<f64> {
        self.g_db.iter().map(|&g| db_to_linear(g)).collect()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Help or version text; not an error.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

const RATES: u8 = 1;
const SWEEP: u8 = 2;
const BOUNDS: u8 = 4;

struct Key {
    name: &'static str,
    /// `None` for boolean switches.
    value_name: Option<&'static str>,
    help: &'static str,
    commands: u8,
}

const fn key(name: &'static str, value_name: &'static str, help: &'static str, commands: u8) -> Key {
    Key {
        name,
        value_name: Some(value_name),
        help,
        commands,
    }
}

const KEYS: &[Key] = &[
    key("thetas", "T1,T2,T3,T4", "Channel phases in radians", RATES | BOUNDS),
    key(
        "seed",
        "N",
        "Master seed [default: $COOPCAP_SEED, else 0 for sweep]",
        RATES | SWEEP | BOUNDS,
    ),
    key(
        "index",
        "I",
        "Sample index of the realization drawn from the seed [default: 0]",
        RATES | BOUNDS,
    ),
    key(
        "p-db",
        "DB",
        "Total network power in dB [default: 0]",
        RATES | SWEEP | BOUNDS,
    ),
    key("g-db", "DB", "Cooperation channel gain in dB [default: 10]", RATES),
    key(
        "g-db-range",
        "LO:HI:STEP",
        "Inclusive gain grid in dB [default: -10:30:2]",
        SWEEP,
    ),
    key(
        "assumption",
        "dedicated|shared",
        "Bandwidth assumption [default: dedicated]",
        RATES | SWEEP,
    ),
    key(
        "schemes",
        "LIST",
        "Comma-separated subset of nc,tx,rx,txrx,bc,mac,mimo [default: all]",
        RATES | SWEEP,
    ),
    key("samples", "N", "Monte Carlo samples [default: 1000]", SWEEP),
    key("workers", "N", "Worker threads [default: available parallelism]", SWEEP),
    key(
        "format",
        "csv|json",
        "Output format [default: csv]",
        RATES | SWEEP | BOUNDS,
    ),
    key(
        "output",
        "PATH",
        "Write to PATH instead of stdout",
        RATES | SWEEP | BOUNDS,
    ),
    Key {
        name: "wide-rx",
        value_name: None,
        help: "Search receiver cooperation data powers independently",
        commands: RATES | SWEEP,
    },
    key(
        "rx-grid-points",
        "N",
        "Grid points per dimension for receiver cooperation",
        RATES | SWEEP,
    ),
    key(
        "rx-refine-levels",
        "N",
        "Grid refinement levels for receiver cooperation",
        RATES | SWEEP,
    ),
    key(
        "txrx-n-hat-points",
        "N",
        "Compression noise targets per axis for joint cooperation",
        RATES | SWEEP,
    ),
    key(
        "txrx-coarse-points",
        "N",
        "Targets per axis at each shared-band point",
        RATES | SWEEP,
    ),
    key(
        "txrx-refine-levels",
        "N",
        "Target refinement levels for joint cooperation",
        RATES | SWEEP,
    ),
    key(
        "txrx-band-points",
        "N",
        "Shared-band grid points per axis",
        RATES | SWEEP,
    ),
    key(
        "waterfill-tol",
        "BITS",
        "Duality gap at which waterfilling stops",
        RATES | SWEEP,
    ),
];

fn cli() -> clap::Command {
    let sub = |command: Command, about: &'static str| {
        let mut c = clap::Command::new(command.name()).about(about).arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .help("Read `key = value` settings from PATH; flags take precedence"),
        );
        for k in KEYS.iter().filter(|k| k.commands & command.bit() != 0) {
            let arg = Arg::new(k.name).long(k.name).help(k.help);
            c = c.arg(match k.value_name {
                Some(v) => arg.value_name(v).allow_hyphen_values(true),
                None => arg.action(ArgAction::SetTrue),
            });
        }
        c
    };
    clap::Command::new("coopcap")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Cooperative sum rates of a two-by-two phase-fading network")
        .subcommand_required(true)
        .subcommand(sub(Command::Rates, "Sum rates of every scheme for one realization"))
        .subcommand(sub(
            Command::Sweep,
            "Expected sum rates over a grid of cooperation gains",
        ))
        .subcommand(sub(Command::Bounds, "Reference capacities for one realization"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Source {
    Env,
    Config,
    Flag,
}

/// Settings after layering; later sources replace earlier ones.
#[derive(Default)]
struct Settings(BTreeMap<&'static str, (String, Source)>);

impl Settings {
    fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(|(v, _)| v.as_str())
    }

    fn explicit(&self, name: &str) -> bool {
        self.0.get(name).is_some_and(|(_, s)| *s > Source::Env)
    }

    fn parsed<T>(&self, name: &str, f: impl FnOnce(&str) -> Result<T, String>) -> Result<Option<T>, CliError> {
        match self.get(name) {
            None => Ok(None),
            Some(v) => f(v).map(Some).map_err(|e| CliError::Usage(format!("--{name}: {e}"))),
        }
    }
}

fn int<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a valid count", s.trim()))
}

fn at_least(min: usize) -> impl Fn(&str) -> Result<usize, String> {
    move |s| match int::<usize>(s)? {
        n if n >= min => Ok(n),
        n => Err(format!("{n} is below the minimum {min}")),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match parse_f64(s).map_err(|e| e.0)? {
        v if v > 0.0 => Ok(v),
        v => Err(format!("{v} must be positive")),
    }
}

fn db(s: &str) -> Result<f64, String> {
    let v = parse_f64(s).map_err(|e| e.0)?;
    match db_to_linear(v) {
        lin if lin.is_finite() => Ok(v),
        _ => Err(format!("{v} dB overflows")),
    }
}

/// Parses arguments (including the program name) into a run configuration.
/// `env_seed` is the value of `COOPCAP_SEED`, if set.
pub fn parse_args<I, T>(args: I, env_seed: Option<&str>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = cli().try_get_matches_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let command = match name {
        "rates" => Command::Rates,
        "sweep" => Command::Sweep,
        _ => Command::Bounds,
    };
    let settings = layer(command, sub, env_seed)?;
    build(command, &settings)
}

fn layer(command: Command, m: &ArgMatches, env_seed: Option<&str>) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Some(seed) = env_seed {
        s.0.insert("seed", (seed.to_string(), Source::Env));
    }
    if let Some(path) = m.get_one::<String>("config") {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
        let entries = parse::parse_config(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
        for (k, v) in entries {
            let Some(key) = KEYS.iter().find(|key| key.name == k) else {
                return usage(format!("{path}: unknown setting `{k}`"));
            };
            if key.commands & command.bit() == 0 {
                return usage(format!("{path}: `{k}` does not apply to {}", command.name()));
            }
            if key.value_name.is_none() {
                parse_bool(&v).map_err(|e| CliError::Usage(format!("{path}: {k}: {e}")))?;
            }
            s.0.insert(key.name, (v, Source::Config));
        }
    }
    for key in KEYS.iter().filter(|k| k.commands & command.bit() != 0) {
        let value = match key.value_name {
            Some(_) => m.get_one::<String>(key.name).cloned(),
            None => m.get_flag(key.name).then(|| "true".to_string()),
        };
        if let Some(v) = value {
            s.0.insert(key.name, (v, Source::Flag));
        }
    }
    Ok(s)
}

fn build(command: Command, s: &Settings) -> Result<RunConfig, CliError> {
    let seed = s.parsed("seed", int::<u64>)?;
    let realization = match command {
        Command::Sweep => None,
        _ => {
            let thetas = s.parsed("thetas", |v| parse_thetas(v).map_err(|e| e.0))?;
            let index = s.parsed("index", int::<u64>)?;
            Some(match (thetas, seed) {
                (Some(_), Some(_)) if s.explicit("seed") => return usage("--thetas and --seed are mutually exclusive"),
                (Some(_), _) if index.is_some() => {
                    return usage("--index selects a sampled realization; it cannot be combined with --thetas")
                }
                (Some(t), _) => Realization::Thetas(t),
                (None, Some(seed)) => Realization::Sample {
                    seed,
                    index: index.unwrap_or(0),
                },
                (None, None) => return usage(format!("{} needs --thetas or --seed (or {SEED_ENV})", command.name())),
            })
        }
    };

    let p_db = s.parsed("p-db", db)?.unwrap_or(DEFAULT_P_DB);
    let g_db = match command {
        Command::Rates => vec![s.parsed("g-db", db)?.unwrap_or(DEFAULT_G_DB)],
        Command::Sweep => {
            let grid = parse_g_range(s.get("g-db-range").unwrap_or(DEFAULT_G_DB_RANGE))
                .map_err(|e| CliError::Usage(format!("--g-db-range: {e}")))?;
            let linear: Vec<f64> = grid.iter().map(|&g| db_to_linear(g)).collect();
            if linear.iter().any(|g| !g.is_finite()) {
                return usage("--g-db-range: gains overflow");
            }
            if linear.windows(2).any(|w| w[1] <= w[0]) {
                return usage("--g-db-range: step too small to separate the linear gains");
            }
            grid
        }
        Command::Bounds => Vec::new(),
    };

    let mut rx_search = RxSearch::default();
    if let Some(wide) = s.parsed("wide-rx", |v| parse_bool(v).map_err(|e| e.0))? {
        rx_search.wide = wide;
    }
    if let Some(n) = s.parsed("rx-grid-points", at_least(3))? {
        rx_search.points_per_dim = n;
    }
    if let Some(n) = s.parsed("rx-refine-levels", int::<usize>)? {
        rx_search.refine_levels = n;
    }
    let mut txrx_search = TxRxSearch::default();
    if let Some(n) = s.parsed("txrx-n-hat-points", at_least(2))? {
        txrx_search.n_hat_points = n;
    }
    if let Some(n) = s.parsed("txrx-coarse-points", at_least(2))? {
        txrx_search.coarse_n_hat_points = n;
    }
    if let Some(n) = s.parsed("txrx-refine-levels", int::<usize>)? {
        txrx_search.refine_levels = n;
    }
    if let Some(n) = s.parsed("txrx-band-points", at_least(2))? {
        txrx_search.band_points = n;
    }
    if let Some(tol) = s.parsed("waterfill-tol", positive)? {
        txrx_search.waterfill_tol = tol;
    }

    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    Ok(RunConfig {
        command,
        realization,
        p_db,
        g_db,
        assumption: s.parsed("assumption", str::parse)?.unwrap_or(Assumption::Dedicated),
        schemes: s
            .parsed("schemes", |v| parse_schemes(v).map_err(|e| e.0))?
            .unwrap_or_else(|| Scheme::ALL.to_vec()),
        samples: s.parsed("samples", at_least(1))?.unwrap_or(DEFAULT_SAMPLES),
        seed: seed.unwrap_or(DEFAULT_SEED),
        workers: s.parsed("workers", at_least(1))?.unwrap_or(default_workers),
        format: s
            .parsed("format", |v| match v.trim().to_ascii_lowercase().as_str() {
                "csv" => Ok(Format::Csv),
                "json" => Ok(Format::Json),
                other => Err(format!("unknown format `{other}` (expected csv or json)")),
            })?
            .unwrap_or(Format::Csv),
        output: s.get("output").map(PathBuf::from),
        rx_search,
        txrx_search,
    })
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Runs one command and returns the process exit code: 0 on success, 1 if
/// a computation or self-check failed, 2 on a usage error.
pub fn run<I, T>(args: I, env_seed: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = parse_args(args, env_seed).and_then(|cfg| {
        let report = execute(&cfg)?;
        match &cfg.output {
            Some(path) => write_atomic(path, report.body.as_bytes())
                .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?,
            None => stdout
                .write_all(report.body.as_bytes())
                .map_err(|e| CliError::Runtime(format!("cannot write output: {e}")))?,
        }
        Ok(report.problems)
    });
    match outcome {
        Ok(problems) if problems.is_empty() => 0,
        Ok(problems) => {
            for p in problems {
                let _ = writeln!(stderr, "error: {p}");
            }
            1
        }
        Err(CliError::Info(text)) => {
            let _ = write!(stdout, "{text}");
            0
        }
        Err(e) => {
            let text = e.to_string();
            let _ = if text.starts_with("error:") {
                write!(stderr, "{text}")
            } else {
                writeln!(stderr, "error: {text}")
            };
            e.exit_code()
        }
    }
}
