//! Parsers for the textual inputs of the command line: flag values, config
//! files and sweep CSV files.

use std::collections::BTreeMap;

use coopcap_core::montecarlo::Scheme;
use thiserror::Error;

/// Longest G grid a range expression may expand to.
pub const MAX_RANGE_POINTS: usize = 100_000;

/// Exact header of sweep CSV files.
pub const SWEEP_CSV_HEADER: &str = "g_db,scheme,mean_rate_bits,stderr,samples,seed";

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct ParseError(pub String);

type Result<T> = std::result::Result<T, ParseError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ParseError(msg.into()))
}

/// A finite float.
pub fn parse_f64(s: &str) -> Result<f64> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => err(format!("{v} is not a finite number")),
        Err(_) => err(format!("`{}` is not a number", s.trim())),
    }
}

/// `t1,t2,t3,t4` in radians.
pub fn parse_thetas(s: &str) -> Result<[f64; 4]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return err(format!("expected four comma-separated phases, got {}", parts.len()));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_f64(p)?;
    }
    Ok(out)
}

/// `lo:hi:step` in dB, inclusive of `hi` when it lies on the grid up to
/// rounding.
pub fn parse_g_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return err(format!("expected lo:hi:step, got `{s}`"));
    };
    let (lo, hi, step) = (parse_f64(lo)?, parse_f64(hi)?, parse_f64(step)?);
    if step <= 0.0 {
        return err(format!("step {step} must be positive"));
    }
    if hi < lo {
        return err(format!("range end {hi} is below its start {lo}"));
    }
    let span = (hi - lo) / step;
    if !(span < MAX_RANGE_POINTS as f64) {
        return err(format!("range expands to more than {MAX_RANGE_POINTS} points"));
    }
    let last = (span + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=last).map(|k| lo + k as f64 * step).collect();
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return err(format!("step {step} is too small to separate points near {lo}"));
    }
    Ok(grid)
}

/// Comma-separated scheme names, each at most once.
pub fn parse_schemes(s: &str) -> Result<Vec<Scheme>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let scheme: Scheme = part.parse().map_err(ParseError)?;
        if out.contains(&scheme) {
            return err(format!("scheme {scheme} listed twice"));
        }
        out.push(scheme);
    }
    Ok(out)
}

/// `true`/`false` (also `yes`/`no`, `1`/`0`).
pub fn parse_bool(s: &str) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => err(format!("`{other}` is not a boolean")),
    }
}

/// Config file of `key = value` lines. Blank lines and lines starting with
/// `#` are ignored; keys are flag names without the leading dashes, and
/// underscores are read as dashes.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!("line {}: expected `key = value`", n + 1));
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return err(format!("line {}: invalid key `{key}`", n + 1));
        }
        let value = value.trim();
        let value = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(value);
        if out.insert(key.clone(), value.to_string()).is_some() {
            return err(format!("line {}: `{key}` set twice", n + 1));
        }
    }
    Ok(out)
}

/// One row of a sweep CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub g_db: f64,
    pub scheme: Scheme,
    pub mean_rate_bits: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

pub fn write_sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(SWEEP_CSV_HEADER.split(',')).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.g_db.to_string(),
            r.scheme.to_string(),
            r.mean_rate_bits.to_string(),
            r.stderr.to_string(),
            r.samples.to_string(),
            r.seed.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| ParseError(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != SWEEP_CSV_HEADER {
        return err(format!("unexpected header, expected `{SWEEP_CSV_HEADER}`"));
    }
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ParseError(e.to_string()))?;
        let field = |k: usize| record.get(k).unwrap_or("");
        let line = n + 2;
        let int = |k: usize| -> Result<u64> {
            field(k)
                .parse::<u64>()
                .map_err(|_| ParseError(format!("line {line}: `{}` is not an integer", field(k))))
        };
        rows.push(SweepRow {
            g_db: parse_f64(field(0))?,
            scheme: field(1)
                .parse()
                .map_err(|e: String| ParseError(format!("line {line}: {e}")))?,
            mean_rate_bits: parse_f64(field(2))?,
            stderr: parse_f64(field(3))?,
            samples: usize::try_from(int(4)?)
                .map_err(|_| ParseError(format!("line {line}: sample count too large")))?,
            seed: int(5)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn thetas() {
        assert_eq!(parse_thetas("0,0,0,0").unwrap(), [0.0; 4]);
        assert_eq!(parse_thetas(" 3.5, -1 ,2e-1,0").unwrap(), [3.5, -1.0, 0.2, 0.0]);
        assert!(parse_thetas("0,0,0").is_err());
        assert!(parse_thetas("0,0,0,0,0").is_err());
        assert!(parse_thetas("0,0,nan,0").is_err());
        assert!(parse_thetas("0,0,inf,0").is_err());
        assert!(parse_thetas("0,,0,0").is_err());
    }

    #[test]
    fn g_range() {
        let g = parse_g_range("-10:30:2").unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!((g[0], g[20]), (-10.0, 30.0));
        assert_eq!(parse_g_range("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_g_range("5:5:1").unwrap(), vec![5.0]);
        assert_eq!(parse_g_range("0:1:0.3").unwrap().len(), 4);
        assert!(parse_g_range("0:1").is_err());
        assert!(parse_g_range("1:0:1").is_err());
        assert!(parse_g_range("0:1:0").is_err());
        assert!(parse_g_range("0:1:-1").is_err());
        assert!(parse_g_range("0:1e300:1e-300").is_err());
        assert!(parse_g_range("1e16:1e16:1e-3").is_ok());
        assert!(parse_g_range("1e16:2e16:1").is_err());
    }

    #[test]
    fn schemes() {
        assert_eq!(
            parse_schemes("tx,rx,txrx").unwrap(),
            vec![Scheme::Tx, Scheme::Rx, Scheme::TxRx]
        );
        assert!(parse_schemes("tx,tx").is_err());
        assert!(parse_schemes("").is_err());
        assert!(parse_schemes("tx,").is_err());
    }

    #[test]
    fn config() {
        let c = parse_config("# sweep\np-db = 10\n\ng_db_range= -10:30:2\nassumption = \"shared\"\n").unwrap();
        assert_eq!(c["p-db"], "10");
        assert_eq!(c["g-db-range"], "-10:30:2");
        assert_eq!(c["assumption"], "shared");
        assert!(parse_config("p-db 10").is_err());
        assert!(parse_config("a = 1\na = 2").is_err());
        assert!(parse_config(" = 1").is_err());
        assert!(parse_config("a b = 1").is_err());
    }

    #[test]
    fn csv_header_is_exact() {
        let text = write_sweep_csv(&[]);
        assert_eq!(text, format!("{SWEEP_CSV_HEADER}\n"));
        assert!(parse_sweep_csv("g_db,scheme,mean,stderr,samples,seed\n").is_err());
    }

    fn scheme() -> impl Strategy<Value = Scheme> {
        prop::sample::select(Scheme::ALL.to_vec())
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn csv_round_trip(rows in prop::collection::vec(
            (finite(), scheme(), finite(), finite(), 0usize..1_000_000, any::<u64>()), 0..20)
        ) {
            let rows: Vec<SweepRow> = rows
                .into_iter()
                .map(|(g_db, scheme, mean_rate_bits, stderr, samples, seed)| SweepRow {
                    g_db, scheme, mean_rate_bits, stderr, samples, seed,
                })
                .collect();
            prop_assert_eq!(parse_sweep_csv(&write_sweep_csv(&rows)).unwrap(), rows);
        }

        #[test]
        fn g_range_is_increasing_and_inclusive(lo in -50i32..50, n in 0usize..200, step in 1u32..40) {
            let step = step as f64 * 0.25;
            let hi = lo as f64 + n as f64 * step;
            let g = parse_g_range(&format!("{lo}:{hi}:{step}")).unwrap();
            prop_assert_eq!(g.len(), n + 1);
            prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
            prop_assert!((g[n] - hi).abs() < 1e-9);
        }

        #[test]
        fn parsers_never_panic(s in ".{0,64}") {
            let _ = parse_thetas(&s);
            let _ = parse_g_range(&s);
            let _ = parse_schemes(&s);
            let _ = parse_config(&s);
            let _ = parse_sweep_csv(&s);
        }
    }
}
