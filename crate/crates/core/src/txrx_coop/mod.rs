//! Joint transmitter and receiver cooperation.
//!
//! The transmitters exchange their messages and dirty-paper code towards two
//! receivers that each also hear a compressed copy of the other's antenna.
//! Once the compression noise targets are fixed, the network is a broadcast
//! channel with two-antenna receivers; its DPC sum rate comes from the dual
//! MAC by sum-power iterative waterfilling. The data power is then scaled
//! back until the exchange link can carry the resulting rates.

pub mod waterfill;

use serde::{Deserialize, Serialize};

use crate::allocation::{awgn_rate, Assumption, BandwidthAlloc, PowerAlloc};
use crate::channel::{CoopChannel, PhaseFading};
use crate::error::Result;
use crate::linalg::{logdet_i_plus, quad_form, Complex2x2, Hermitian2x2};
use crate::optimize::linspace;
use crate::rx_coop::{compression_numerator, eta_from_noise, own_row, r_rx, Direction, RxCoopResult, RxSearch};
use crate::tx_coop::{r_tx, TxCoopResult};

use waterfill::{iterative_waterfill_with, mac_to_bc, WaterfillSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DpcOrder {
    /// Receiver 1's message is encoded first and sees receiver 2's signal
    /// as interference.
    EncodeR1First,
    EncodeR2First,
}

impl DpcOrder {
    pub const BOTH: [Self; 2] = [Self::EncodeR1First, Self::EncodeR2First];

    /// Index of the user encoded last, which sees no interference.
    fn clean_user(self) -> usize {
        match self {
            Self::EncodeR1First => 1,
            Self::EncodeR2First => 0,
        }
    }
}

/// Per-user DPC rates (bits/s) and transmit covariances (W).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpcPair {
    pub order: DpcOrder,
    pub r1: f64,
    pub r2: f64,
    pub sigma_x1: Hermitian2x2,
    pub sigma_x2: Hermitian2x2,
}

/// Where the reported operating point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TxRxSource {
    /// The compression-target search.
    Joint,
    /// Transmitter cooperation alone: no receiver link.
    TxCorner,
    /// Receiver cooperation alone: no message exchange.
    RxCorner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TxRxResult {
    pub sum_rate: f64,
    pub power: PowerAlloc,
    pub bandwidths: BandwidthAlloc,
    /// `(N̂1, N̂2)`; infinite when that receiver forwards nothing.
    pub n_hat_targets: (f64, f64),
    pub order: Option<DpcOrder>,
    pub source: TxRxSource,
}

/// Resolution of the outer search in [`r_txrx`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TxRxSearch {
    /// Range of the finite compression noise targets; the grid is
    /// logarithmic and always includes `N̂ = ∞`.
    pub n_hat_range: (f64, f64),
    pub n_hat_points: usize,
    /// Targets per axis used for every bandwidth point of a shared band.
    pub coarse_n_hat_points: usize,
    pub refine_levels: usize,
    /// Points per axis in each refinement window.
    pub refine_points: usize,
    /// Points per axis of the `(b_t, b_r)` grid for a shared band.
    pub band_points: usize,
    pub band_refine_levels: usize,
    /// Absolute tolerance on the data power scale.
    pub scale_tol: f64,
    /// Duality gap (bits/s) at which waterfilling stops.
    pub waterfill_tol: f64,
}

impl Default for TxRxSearch {
    fn default() -> Self {
        Self {
            n_hat_range: (1e-3, 1e3),
            n_hat_points: 16,
            coarse_n_hat_points: 6,
            refine_levels: 2,
            refine_points: 5,
            band_points: 9,
            band_refine_levels: 2,
            scale_tol: 1e-6,
            waterfill_tol: 1e-9,
        }
    }
}

/// Smallest exchange power that lets each transmitter learn the other's
/// message: `sum_i (2^{r_i/b_t} - 1) b_t / G`.
pub fn tx_coop_required_power(r1: f64, r2: f64, g: &CoopChannel, b_t: f64) -> f64 {
    if r1 <= 0.0 && r2 <= 0.0 {
        return 0.0;
    }
    if b_t <= 0.0 || g.gain() <= 0.0 {
        return f64::INFINITY;
    }
    let one = |r: f64| (r.max(0.0) / b_t * std::f64::consts::LN_2).exp_m1() * b_t / g.gain();
    one(r1) + one(r2)
}

/// DPC rates of the equivalent broadcast channel with antenna gains
/// `eta1`, `eta2` on the forwarded observations.
pub fn dpc_rates(
    ch: &PhaseFading,
    eta1: f64,
    eta2: f64,
    sigma_x1: &Hermitian2x2,
    sigma_x2: &Hermitian2x2,
    b: f64,
    order: DpcOrder,
) -> Result<DpcPair> {
    let (h1, h2) = ch.tilde_matrices(eta1, eta2)?;
    dpc_rates_tilde(&h1, &h2, sigma_x1, sigma_x2, b, order)
}

fn dpc_rates_tilde(
    h1: &Complex2x2,
    h2: &Complex2x2,
    sigma_x1: &Hermitian2x2,
    sigma_x2: &Hermitian2x2,
    b: f64,
    order: DpcOrder,
) -> Result<DpcPair> {
    let mut pair = DpcPair {
        order,
        r1: 0.0,
        r2: 0.0,
        sigma_x1: *sigma_x1,
        sigma_x2: *sigma_x2,
    };
    if b <= 0.0 {
        return Ok(pair);
    }
    let ld = |h: &Complex2x2, s: &Hermitian2x2| logdet_i_plus(&h.congruence(&(*s * (1.0 / b))));
    let total = *sigma_x1 + *sigma_x2;
    let (r1, r2) = match order {
        DpcOrder::EncodeR1First => (ld(h1, &total)? - ld(h1, sigma_x2)?, ld(h2, sigma_x2)?),
        DpcOrder::EncodeR2First => (ld(h1, sigma_x1)?, ld(h2, &total)? - ld(h2, sigma_x1)?),
    };
    pair.r1 = (b * r1).max(0.0);
    pair.r2 = (b * r2).max(0.0);
    Ok(pair)
}

/// Receiver cooperation power that brings the compression noise of
/// `direction` down to `n_hat`, given the input covariance `sigma` (W).
fn receiver_power(
    ch: &PhaseFading,
    g: &CoopChannel,
    sigma: &Hermitian2x2,
    b: f64,
    b_r: f64,
    n_hat: f64,
    direction: Direction,
) -> f64 {
    if n_hat.is_infinite() {
        return 0.0;
    }
    if b_r <= 0.0 || g.gain() <= 0.0 || b <= 0.0 {
        return f64::INFINITY;
    }
    let s = *sigma * (1.0 / b);
    // 2^{R_wz/b} - 1 for the compression rate that yields n_hat.
    let excess = compression_numerator(ch, &s) / (n_hat * (quad_form(own_row(ch, direction), &s) + 1.0));
    ((b / b_r) * excess.ln_1p()).exp_m1() * b_r / g.gain()
}

/// `[p_r1, p_r2]` for the targets `(N̂1, N̂2)`. The input covariance in the
/// noise formulas starts as an even split of the whole budget and is
/// recomputed once from what the receivers leave over.
pub fn receiver_powers(
    ch: &PhaseFading,
    g: &CoopChannel,
    budget: f64,
    b: f64,
    b_r: f64,
    n_hat: (f64, f64),
) -> [f64; 2] {
    let powers_for = |data: f64| {
        let sigma = Hermitian2x2::diag(0.5 * data, 0.5 * data);
        [
            receiver_power(ch, g, &sigma, b, b_r, n_hat.0, Direction::At2From1),
            receiver_power(ch, g, &sigma, b, b_r, n_hat.1, Direction::At1From2),
        ]
    };
    let first = powers_for(budget);
    powers_for((budget - first[0] - first[1]).max(0.0))
}

#[derive(Debug, Clone, Copy)]
struct Bands {
    b_t: f64,
    b: f64,
    b_r: f64,
}

#[derive(Debug, Clone, Copy)]
struct PointValue {
    sum_rate: f64,
    pair: DpcPair,
    p_t: f64,
    p_r: [f64; 2],
    n_hat: (f64, f64),
    bands: Bands,
}

struct Evaluator<'a> {
    ch: &'a PhaseFading,
    g: &'a CoopChannel,
    budget: f64,
    search: &'a TxRxSearch,
    warm: Option<[Hermitian2x2; 2]>,
    incumbent: f64,
}

impl Evaluator<'_> {
    fn waterfill(&mut self, h: (&Complex2x2, &Complex2x2), power: f64, b: f64) -> Result<WaterfillSolution> {
        let sol = iterative_waterfill_with(h, power, b, self.search.waterfill_tol, self.warm, |_| {})?;
        if sol.sum_rate > 0.0 {
            self.warm = Some(sol.mac_covariances);
        }
        Ok(sol)
    }

    /// DPC rates under the encode order needing the least exchange power.
    fn best_order(
        &self,
        h: (&Complex2x2, &Complex2x2),
        sol: &WaterfillSolution,
        bands: Bands,
    ) -> Result<(DpcPair, f64)> {
        let mut best: Option<(DpcPair, f64)> = None;
        for order in DpcOrder::BOTH {
            let s = mac_to_bc(h, &sol.mac_covariances, bands.b, order.clean_user())?;
            let pair = dpc_rates_tilde(h.0, h.1, &s[0], &s[1], bands.b, order)?;
            let need = tx_coop_required_power(pair.r1, pair.r2, self.g, bands.b_t);
            if best.is_none_or(|(_, n)| need < n) {
                best = Some((pair, need));
            }
        }
        Ok(best.expect("two orders"))
    }

    /// Best feasible operating point for fixed targets and bandwidths, or
    /// `None` when it cannot beat the incumbent.
    fn point(&mut self, n_hat: (f64, f64), bands: Bands) -> Result<Option<PointValue>> {
        if bands.b <= 0.0 || bands.b_t <= 0.0 || self.g.gain() <= 0.0 {
            return Ok(None);
        }
        let p_r = receiver_powers(self.ch, self.g, self.budget, bands.b, bands.b_r, n_hat);
        let avail = self.budget - p_r[0] - p_r[1];
        if !(avail > 0.0) {
            return Ok(None);
        }
        // The exchange link alone caps the sum rate, whatever the DPC rates.
        let exchange_cap = 2.0 * awgn_rate(bands.b_t, 0.5 * avail, self.g.gain());
        if exchange_cap <= self.incumbent {
            return Ok(None);
        }
        let (h1, h2) = self
            .ch
            .tilde_matrices(eta_from_noise(n_hat.0), eta_from_noise(n_hat.1))?;
        let h = (&h1, &h2);

        let full = self.waterfill(h, avail, bands.b)?;
        if full.sum_rate <= self.incumbent {
            return Ok(None);
        }
        let (pair, need) = self.best_order(h, &full, bands)?;
        let make = |pair: DpcPair, p_t: f64| PointValue {
            sum_rate: pair.r1 + pair.r2,
            pair,
            p_t,
            p_r,
            n_hat,
            bands,
        };
        if need <= 0.0 {
            return Ok(Some(make(pair, need)));
        }

        // Feasibility of the data power scale s is monotone: more data power
        // raises both rates and so the exchange power they need.
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut hi_rate = full.sum_rate;
        let mut best: Option<PointValue> = None;
        while hi - lo > self.search.scale_tol {
            if hi_rate <= self.incumbent {
                break;
            }
            let s = 0.5 * (lo + hi);
            let sol = self.waterfill(h, s * avail, bands.b)?;
            let (pair, need) = self.best_order(h, &sol, bands)?;
            if s * avail + need <= avail {
                lo = s;
                best = Some(make(pair, need));
            } else {
                hi = s;
                hi_rate = sol.sum_rate;
            }
        }
        Ok(best.filter(|v| v.sum_rate > self.incumbent))
    }

    fn offer(&mut self, best: &mut Option<PointValue>, v: Option<PointValue>) {
        if let Some(v) = v {
            if v.sum_rate > self.incumbent {
                self.incumbent = v.sum_rate;
                *best = Some(v);
            }
        }
    }

    /// Log-spaced targets plus `N̂ = ∞`, in ascending order.
    fn axis(&self, points: usize) -> Vec<f64> {
        let (lo, hi) = self.search.n_hat_range;
        linspace(lo.log10(), hi.log10(), points)
            .map(|e| 10f64.powf(e))
            .chain([f64::INFINITY])
            .collect()
    }

    fn target_grid(&mut self, points: usize, bands: Bands, best: &mut Option<PointValue>) -> Result<()> {
        let axis = self.axis(points);
        for &n1 in &axis {
            for &n2 in &axis {
                let v = self.point((n1, n2), bands)?;
                self.offer(best, v);
            }
        }
        Ok(())
    }

    /// Re-grids the finite coordinates of the best target pair on shrinking
    /// windows in log space.
    fn refine_targets(&mut self, points: usize, bands: Bands, best: &mut Option<PointValue>) -> Result<()> {
        let Some(start) = *best else {
            return Ok(());
        };
        let (lo, hi) = self.search.n_hat_range;
        let (lo, hi) = (lo.log10(), hi.log10());
        let mut step = (hi - lo) / (points - 1) as f64;
        let mut center = (start.n_hat.0.log10(), start.n_hat.1.log10());
        let k = self.search.refine_points;
        for _ in 0..self.search.refine_levels {
            let window = |c: f64| -> Vec<f64> {
                if c.is_infinite() {
                    vec![c]
                } else {
                    linspace((c - step).max(lo), (c + step).min(hi), k).collect()
                }
            };
            let (w1, w2) = (window(center.0), window(center.1));
            for &e1 in &w1 {
                for &e2 in &w2 {
                    let v = self.point((10f64.powf(e1), 10f64.powf(e2)), bands)?;
                    self.offer(best, v);
                }
            }
            if let Some(b) = best {
                center = (b.n_hat.0.log10(), b.n_hat.1.log10());
            }
            step *= 2.0 / (k - 1) as f64;
        }
        Ok(())
    }

    fn search_targets(&mut self, bands: Bands, best: &mut Option<PointValue>) -> Result<()> {
        let mut local = None;
        let n = self.search.n_hat_points;
        self.target_grid(n, bands, &mut local)?;
        self.refine_targets(n, bands, &mut local)?;
        if local.is_some() {
            *best = local;
        }
        Ok(())
    }
}

/// Joint cooperation sum rate. Computes the transmitter-only and
/// receiver-only optima itself; see [`r_txrx_with_corners`].
pub fn r_txrx(
    ch: &PhaseFading,
    g: &CoopChannel,
    budget: f64,
    assumption: Assumption,
    search: &TxRxSearch,
) -> Result<TxRxResult> {
    let tx = r_tx(ch, g, budget, assumption)?;
    let rx = r_rx(ch, g, budget, assumption, &RxSearch::default())?;
    r_txrx_with_corners(ch, g, budget, assumption, search, &tx, &rx)
}

/// Joint cooperation sum rate, seeded with the transmitter-only and
/// receiver-only optima for the same realization and assumption. Both are
/// special cases of joint cooperation (no receiver link, no message
/// exchange), so the result never falls below either.
pub fn r_txrx_with_corners(
    ch: &PhaseFading,
    g: &CoopChannel,
    budget: f64,
    assumption: Assumption,
    search: &TxRxSearch,
    tx: &TxCoopResult,
    rx: &RxCoopResult,
) -> Result<TxRxResult> {
    let tx_corner = TxRxResult {
        sum_rate: tx.sum_rate,
        power: tx.power,
        bandwidths: tx.bandwidths,
        n_hat_targets: (f64::INFINITY, f64::INFINITY),
        order: None,
        source: TxRxSource::TxCorner,
    };
    let rx_corner = TxRxResult {
        sum_rate: rx.sum_rate,
        power: rx.power,
        bandwidths: rx.bandwidths,
        n_hat_targets: (rx.n_hat, rx.n_hat),
        order: None,
        source: TxRxSource::RxCorner,
    };
    let corner = if rx.sum_rate > tx.sum_rate {
        rx_corner
    } else {
        tx_corner
    };

    let mut ev = Evaluator {
        ch,
        g,
        budget,
        search,
        warm: None,
        incumbent: corner.sum_rate,
    };
    let mut best = None;
    match assumption {
        Assumption::Dedicated => {
            let bands = Bands {
                b_t: 1.0,
                b: 1.0,
                b_r: 1.0,
            };
            ev.search_targets(bands, &mut best)?;
        }
        Assumption::Shared => {
            best = search_bands(&mut ev)?;
            if let Some(v) = best {
                ev.search_targets(v.bands, &mut best)?;
            }
        }
    }

    let Some(v) = best else {
        return Ok(corner);
    };
    let bandwidths = match assumption {
        Assumption::Dedicated => BandwidthAlloc::dedicated(true, v.n_hat.0.is_finite() || v.n_hat.1.is_finite()),
        Assumption::Shared => BandwidthAlloc::shared(v.bands.b_t, v.bands.b, v.bands.b_r)?,
    };
    Ok(TxRxResult {
        sum_rate: v.sum_rate,
        power: PowerAlloc::new(
            v.pair.sigma_x1.trace().max(0.0),
            v.pair.sigma_x2.trace().max(0.0),
            v.p_t,
            v.p_r[0],
            v.p_r[1],
        )?,
        bandwidths,
        n_hat_targets: v.n_hat,
        order: Some(v.pair.order),
        source: TxRxSource::Joint,
    })
}

/// Picks `(b_t, b_r)` for a shared band by a coarse target search at each
/// point of a simplex grid, refined around the best point.
fn search_bands(ev: &mut Evaluator) -> Result<Option<PointValue>> {
    let n = ev.search.band_points;
    let coarse = ev.search.coarse_n_hat_points;
    let bands_at = |b_t: f64, b_r: f64| Bands {
        b_t,
        b: 1.0 - b_t - b_r,
        b_r,
    };
    let mut best: Option<PointValue> = None;
    let grid: Vec<f64> = linspace(0.0, 1.0, n).collect();
    for &b_t in &grid {
        for &b_r in &grid {
            if b_t + b_r < 1.0 {
                ev.target_grid(coarse, bands_at(b_t, b_r), &mut best)?;
            }
        }
    }
    let mut step = 1.0 / (n - 1) as f64;
    for _ in 0..ev.search.band_refine_levels {
        let Some(center) = best else {
            break;
        };
        step *= 0.5;
        let (c_t, c_r) = (center.bands.b_t, center.bands.b_r);
        for dt in [-1.0, 0.0, 1.0] {
            for dr in [-1.0, 0.0, 1.0] {
                let (b_t, b_r) = ((c_t + dt * step).clamp(0.0, 1.0), (c_r + dr * step).clamp(0.0, 1.0));
                if (dt, dr) != (0.0, 0.0) && b_t + b_r < 1.0 {
                    ev.target_grid(coarse, bands_at(b_t, b_r), &mut best)?;
                }
            }
        }
    }
    Ok(best)
}
