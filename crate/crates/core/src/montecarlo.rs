//! Seeded Monte Carlo sweeps of expected sum rates over the cooperation
//! gain `G`.
//!
//! Sample `i` draws one phase realization that every scheme and every `G`
//! point reuses, so differences between curves are not sampling noise.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::Assumption;
use crate::bounds::{c_bc, c_mac, c_mimo, c_nc};
use crate::channel::{CoopChannel, PhaseFading};
use crate::error::{Error, Result};
use crate::rx_coop::{r_rx, RxSearch};
use crate::tx_coop::r_tx;
use crate::txrx_coop::{r_txrx_with_corners, TxRxSearch};

/// Largest tolerated fraction of failed samples.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Nc,
    Tx,
    Rx,
    TxRx,
    Bc,
    Mac,
    Mimo,
}

impl Scheme {
    pub const ALL: [Self; 7] = [
        Self::Nc,
        Self::Tx,
        Self::Rx,
        Self::TxRx,
        Self::Bc,
        Self::Mac,
        Self::Mimo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Nc => "nc",
            Self::Tx => "tx",
            Self::Rx => "rx",
            Self::TxRx => "txrx",
            Self::Bc => "bc",
            Self::Mac => "mac",
            Self::Mimo => "mimo",
        }
    }

    /// Whether the rate depends on the cooperation gain.
    pub fn uses_gain(self) -> bool {
        matches!(self, Self::Tx | Self::Rx | Self::TxRx)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|scheme| scheme.name() == t)
            .ok_or_else(|| format!("unknown scheme {s:?} (expected one of nc, tx, rx, txrx, bc, mac, mimo)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Linear cooperation gains, strictly increasing.
    pub g_grid: Vec<f64>,
    pub budget: f64,
    pub assumption: Assumption,
    pub samples: usize,
    pub master_seed: u64,
    pub schemes: Vec<Scheme>,
    pub rx_search: RxSearch,
    pub txrx_search: TxRxSearch,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSweep(m));
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.g_grid.is_empty() {
            return bad("the G grid is empty".into());
        }
        if let Some(g) = self.g_grid.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return bad(format!("G = {g} is not a finite nonnegative gain"));
        }
        if self.g_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("the G grid must be strictly increasing".into());
        }
        if !(self.budget.is_finite() && self.budget > 0.0) {
            return bad(format!("power budget {} must be positive", self.budget));
        }
        if self.schemes.is_empty() {
            return bad("no schemes requested".into());
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return bad(format!("scheme {s} listed twice"));
            }
        }
        Ok(())
    }

    fn cell_count(&self) -> usize {
        self.g_grid.len() * self.schemes.len()
    }
}

/// Mean rate of one scheme at one gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub scheme: Scheme,
    pub g: f64,
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub index: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Grouped by gain in grid order, then by scheme in request order.
    pub cells: Vec<Cell>,
    pub failures: Vec<SampleFailure>,
    /// Fingerprint of the realizations every cell averaged over.
    pub realization_digest: u64,
    pub wall_time_s: f64,
}

/// All requested rates of sample `index`, in cell order.
fn evaluate_sample(spec: &SweepSpec, index: u64) -> std::result::Result<(u64, Vec<f64>), String> {
    let ch = PhaseFading::sample(spec.master_seed, index);
    let p = spec.budget;
    let mimo = c_mimo(&ch, p).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(spec.cell_count());
    for &g in &spec.g_grid {
        let link = CoopChannel::new(g).map_err(|e| e.to_string())?;
        let needs = |s: Scheme| spec.schemes.contains(&s);
        let tx = if needs(Scheme::Tx) || needs(Scheme::TxRx) {
            Some(r_tx(&ch, &link, p, spec.assumption).map_err(|e| e.to_string())?)
        } else {
            None
        };
        let rx = if needs(Scheme::Rx) || needs(Scheme::TxRx) {
            Some(r_rx(&ch, &link, p, spec.assumption, &spec.rx_search).map_err(|e| e.to_string())?)
        } else {
            None
        };
        for &scheme in &spec.schemes {
            let rate = match scheme {
                Scheme::Nc => c_nc(p),
                Scheme::Bc => c_bc(&ch, p),
                Scheme::Mac => c_mac(&ch, p).map_err(|e| e.to_string())?,
                Scheme::Mimo => mimo,
                Scheme::Tx => tx.expect("computed above").sum_rate,
                Scheme::Rx => rx.expect("computed above").sum_rate,
                Scheme::TxRx => {
                    let (tx, rx) = (tx.expect("computed above"), rx.expect("computed above"));
                    let joint = r_txrx_with_corners(&ch, &link, p, spec.assumption, &spec.txrx_search, &tx, &rx)
                        .map_err(|e| e.to_string())?
                        .sum_rate;
                    if joint < tx.sum_rate.max(rx.sum_rate) - 1e-6 {
                        return Err(format!("txrx {joint} below its corners at G = {g}"));
                    }
                    joint
                }
            };
            if !rate.is_finite() {
                return Err(format!("{scheme} rate is {rate} at G = {g}"));
            }
            if rate > mimo + 1e-9 {
                return Err(format!(
                    "{scheme} rate {rate} exceeds the MIMO capacity {mimo} at G = {g}"
                ));
            }
            out.push(rate);
        }
    }
    Ok((ch.digest(), out))
}

/// Folds a sample digest into a running FNV-1a hash.
fn fold_digest(acc: u64, digest: u64) -> u64 {
    digest
        .to_le_bytes()
        .iter()
        .fold(acc, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

const DIGEST_SEED: u64 = 0xcbf2_9ce4_8422_2325;

/// Mean and standard error, accumulated around the first sample so that
/// identical samples give exactly that value and zero spread.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    shift: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        if self.n == 0 {
            self.shift = x;
        }
        let d = x - self.shift;
        self.n += 1;
        self.sum += d;
        self.sum_sq += d * d;
    }

    fn mean(&self) -> f64 {
        self.shift + self.sum / self.n as f64
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Runs the sweep on `workers` threads. The result does not depend on the
/// worker count.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult> {
    spec.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidSweep(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| {
        (0..spec.samples as u64)
            .into_par_iter()
            .map(|i| evaluate_sample(spec, i))
            .collect()
    });

    let cells = spec.cell_count();
    let mut moments = vec![Moments::default(); cells];
    let mut digests = vec![DIGEST_SEED; cells];
    let mut failures = Vec::new();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((digest, rates)) => {
                for (k, rate) in rates.into_iter().enumerate() {
                    moments[k].push(rate);
                    digests[k] = fold_digest(digests[k], digest);
                }
            }
            Err(message) => failures.push(SampleFailure {
                index: index as u64,
                message,
            }),
        }
    }
    if failures.len() as f64 > MAX_FAILURE_FRACTION * spec.samples as f64 || failures.len() == spec.samples {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: spec.samples,
            first: failures[0].message.clone(),
        });
    }
    // Every cell must have averaged over the same realizations.
    assert!(
        digests.windows(2).all(|w| w[0] == w[1]),
        "unpaired samples across schemes"
    );

    let mut out = Vec::with_capacity(cells);
    let mut k = 0;
    for &g in &spec.g_grid {
        for &scheme in &spec.schemes {
            let m = &moments[k];
            out.push(Cell {
                scheme,
                g,
                mean: m.mean(),
                stderr: m.stderr(),
                samples: m.n,
            });
            k += 1;
        }
    }
    Ok(SweepResult {
        spec: spec.clone(),
        cells: out,
        failures,
        realization_digest: digests[0],
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Sample mean of `phi` over `samples` realizations; a self-test of the
/// phase generator, since `E[phi] = 1`.
pub fn mean_phi_check(samples: usize, seed: u64) -> f64 {
    let mut m = Moments::default();
    for i in 0..samples as u64 {
        m.push(PhaseFading::sample(seed, i).phi());
    }
    m.mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn spec(schemes: Vec<Scheme>, samples: usize) -> SweepSpec {
        SweepSpec {
            g_grid: vec![0.1, 1.0, 10.0],
            budget: 1.0,
            assumption: Assumption::Dedicated,
            samples,
            master_seed: 7,
            schemes,
            rx_search: RxSearch::default(),
            txrx_search: TxRxSearch::default(),
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
            assert_eq!(s.to_string().to_uppercase().parse::<Scheme>().unwrap(), s);
        }
        assert!("dpc".parse::<Scheme>().is_err());
    }

    #[test]
    fn validation() {
        let ok = spec(vec![Scheme::Nc], 1);
        assert!(ok.validate().is_ok());
        let mut s = ok.clone();
        s.samples = 0;
        assert!(s.validate().is_err());
        let mut s = ok.clone();
        s.g_grid = vec![];
        assert!(s.validate().is_err());
        let mut s = ok.clone();
        s.g_grid = vec![1.0, 1.0];
        assert!(s.validate().is_err());
        let mut s = ok.clone();
        s.g_grid = vec![-1.0];
        assert!(s.validate().is_err());
        let mut s = ok.clone();
        s.schemes = vec![Scheme::Nc, Scheme::Nc];
        assert!(s.validate().is_err());
        let mut s = ok;
        s.budget = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn non_cooperative_is_exact() {
        let r = run_sweep(&spec(vec![Scheme::Nc], 50), 2).unwrap();
        for c in &r.cells {
            assert_eq!(c.mean, 1.0);
            assert_eq!(c.stderr, 0.0);
            assert_eq!(c.samples, 50);
        }
    }

    #[test]
    fn bc_and_mac_agree() {
        let r = run_sweep(&spec(vec![Scheme::Bc, Scheme::Mac], 1000), 2).unwrap();
        for pair in r.cells.chunks(2) {
            assert!((pair[0].mean - pair[1].mean).abs() < 1e-12);
        }
    }

    #[test]
    fn single_sample_has_zero_stderr() {
        let r = run_sweep(&spec(vec![Scheme::Mimo], 1), 1).unwrap();
        assert!(r.cells.iter().all(|c| c.stderr == 0.0 && c.samples == 1));
    }

    #[test]
    fn stderr_matches_two_pass_formula() {
        let r = run_sweep(&spec(vec![Scheme::Mimo], 200), 1).unwrap();
        let xs: Vec<f64> = (0..200)
            .map(|i| c_mimo(&PhaseFading::sample(7, i), 1.0).unwrap())
            .collect();
        let mean = xs.iter().sum::<f64>() / 200.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 199.0;
        assert!((r.cells[0].mean - mean).abs() < 1e-12);
        assert!((r.cells[0].stderr - (var / 200.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identical_across_worker_counts() {
        let s = spec(Scheme::ALL.to_vec(), 6);
        let runs: Vec<_> = [1, 2, 8].iter().map(|&w| run_sweep(&s, w).unwrap()).collect();
        for r in &runs[1..] {
            assert_eq!(r.cells, runs[0].cells);
            assert_eq!(r.realization_digest, runs[0].realization_digest);
        }
    }

    #[test]
    fn cell_layout() {
        let s = spec(vec![Scheme::Tx, Scheme::Nc], 3);
        let r = run_sweep(&s, 1).unwrap();
        let layout: Vec<_> = r.cells.iter().map(|c| (c.g, c.scheme)).collect();
        assert_eq!(
            layout,
            vec![
                (0.1, Scheme::Tx),
                (0.1, Scheme::Nc),
                (1.0, Scheme::Tx),
                (1.0, Scheme::Nc),
                (10.0, Scheme::Tx),
                (10.0, Scheme::Nc),
            ]
        );
    }

    #[test]
    fn mean_phi() {
        let m = mean_phi_check(10_000, 1);
        assert!((m - 1.0).abs() <= 0.04);
        assert_eq!(m, mean_phi_check(10_000, 1));
        assert!((mean_phi_check(100, 2) - 1.0).abs() <= 0.4);
    }

    #[test]
    fn mean_phi_matches_quadrature() {
        // phi depends on the wrapped sum of independent uniform phases, which
        // is itself uniform; integrate 1 - cos over one period.
        let n = 100_000;
        let h = TAU / n as f64;
        let integral: f64 = (0..n).map(|k| 1.0 - ((k as f64 + 0.5) * h).cos()).sum::<f64>() * h / TAU;
        assert!((integral - 1.0).abs() < 1e-12);
        assert!((mean_phi_check(40_000, 3) - integral).abs() <= 4.0 / 200.0);
    }
}
