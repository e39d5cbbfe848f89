//! Receiver cooperation by Wyner-Ziv compress-and-forward.
//!
//! Each receiver quantizes its observation, using the other receiver's
//! signal as side information, and forwards it over the receiver
//! cooperation link. The quantization shows up as extra noise of variance
//! `N̂` on the forwarded antenna, i.e. an antenna gain `eta = 1/(1 + N̂)`.

use serde::{Deserialize, Serialize};

use crate::allocation::{Assumption, BandwidthAlloc, PowerAlloc, BUDGET_TOL};
use crate::channel::{CoopChannel, PhaseFading};
use crate::error::Result;
use crate::linalg::{quad_form, Hermitian2x2, C64};
use crate::optimize::{grid_max, GRID_POINTS, GRID_REFINE_LEVELS};

/// Which forwarding direction a compression noise belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Receiver 2 compresses its observation for receiver 1 (noise `N̂2`).
    At1From2,
    /// Receiver 1 compresses its observation for receiver 2 (noise `N̂1`).
    At2From1,
}

/// Compression noise variances of both directions and the resulting
/// antenna gains. Infinite noise means the link carries nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionState {
    pub n_hat_1: f64,
    pub n_hat_2: f64,
    pub eta_1: f64,
    pub eta_2: f64,
}

impl CompressionState {
    pub fn new(n_hat_1: f64, n_hat_2: f64) -> Self {
        Self {
            n_hat_1,
            n_hat_2,
            eta_1: eta_from_noise(n_hat_1),
            eta_2: eta_from_noise(n_hat_2),
        }
    }
}

/// Search space for [`r_rx`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RxSearch {
    /// Search `p1`, `p2` independently instead of the even data split.
    pub wide: bool,
    pub points_per_dim: usize,
    pub refine_levels: usize,
}

impl Default for RxSearch {
    fn default() -> Self {
        Self {
            wide: false,
            points_per_dim: GRID_POINTS,
            refine_levels: GRID_REFINE_LEVELS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RxCoopResult {
    pub sum_rate: f64,
    pub power: PowerAlloc,
    pub bandwidths: BandwidthAlloc,
    pub n_hat: f64,
}

/// `1/(1 + n)`, with `eta = 0` for infinite noise.
pub fn eta_from_noise(n_hat: f64) -> f64 {
    if n_hat.is_infinite() {
        0.0
    } else {
        1.0 / (1.0 + n_hat)
    }
}

/// Numerator shared by both directions:
/// `|H S H^H| + f2 S f2^H + f1 S f1^H + 1` with `S = sigma_x / b`.
pub(crate) fn compression_numerator(ch: &PhaseFading, sigma: &Hermitian2x2) -> f64 {
    let det = ch.matrix().congruence(sigma).det();
    det + quad_form(ch.f2(), sigma) + quad_form(ch.f1(), sigma) + 1.0
}

pub(crate) fn own_row(ch: &PhaseFading, direction: Direction) -> [C64; 2] {
    match direction {
        Direction::At1From2 => ch.f1(),
        Direction::At2From1 => ch.f2(),
    }
}

/// Variance of the compression noise when the forwarding receiver
/// compresses at `r_wz` bits/s for a data band of width `b`.
pub fn compression_noise_general(
    ch: &PhaseFading,
    sigma_x: &Hermitian2x2,
    b: f64,
    r_wz: f64,
    direction: Direction,
) -> f64 {
    if r_wz <= 0.0 {
        return f64::INFINITY;
    }
    let s = *sigma_x * (1.0 / b);
    let num = compression_numerator(ch, &s);
    let excess = (r_wz / b * std::f64::consts::LN_2).exp_m1();
    num / (excess * (quad_form(own_row(ch, direction), &s) + 1.0))
}

/// Compression noise with a diagonal input covariance and the receiver
/// cooperation power `p_r` split evenly between the two receivers.
pub fn compression_noise_symmetric(
    ch: &PhaseFading,
    p1: f64,
    p2: f64,
    b: f64,
    p_r: f64,
    b_r: f64,
    g: &CoopChannel,
) -> f64 {
    if p_r <= 0.0 || b_r <= 0.0 || g.gain() <= 0.0 {
        return f64::INFINITY;
    }
    let num = 2.0 * ch.phi() * p1 * p2 / (b * b) + 2.0 * (p1 + p2) / b + 1.0;
    // [1 + G p_r / (2 b_r)]^(b_r / b) - 1
    let excess = ((b_r / b) * (g.gain() * p_r / (2.0 * b_r)).ln_1p()).exp_m1();
    num / (excess * ((p1 + p2) / b + 1.0))
}

/// Strong-interference sum capacity of the two-antenna-receiver
/// interference channel with symmetric antenna gain `eta`.
pub fn r_ic(ch: &PhaseFading, p1: f64, p2: f64, b: f64, eta: f64) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    let snr = (1.0 + eta) * (p1 + p2) / b + 2.0 * eta * ch.phi() * p1 * p2 / (b * b);
    b * snr.ln_1p() / std::f64::consts::LN_2
}

fn rx_value(ch: &PhaseFading, g: &CoopChannel, p1: f64, p2: f64, p_r: f64, b: f64, b_r: f64) -> (f64, f64) {
    if b <= 0.0 {
        return (0.0, f64::INFINITY);
    }
    let n_hat = compression_noise_symmetric(ch, p1, p2, b, p_r, b_r, g);
    (r_ic(ch, p1, p2, b, eta_from_noise(n_hat)), n_hat)
}

/// Best compress-and-forward sum rate for one realization, by grid search
/// over the receiver cooperation power (and, for a shared band, the
/// receiver cooperation bandwidth).
pub fn r_rx(
    ch: &PhaseFading,
    g: &CoopChannel,
    budget: f64,
    assumption: Assumption,
    search: &RxSearch,
) -> Result<RxCoopResult> {
    let shared = assumption == Assumption::Shared;
    // Coordinates: [p_r, (b_r)] or, in wide mode, [p1, p2, p_r, (b_r)].
    let decode = |x: &[f64]| -> (f64, f64, f64, f64) {
        let (p1, p2, p_r, rest) = if search.wide {
            (x[0], x[1], x[2], &x[3..])
        } else {
            let half = 0.5 * (budget - x[0]).max(0.0);
            (half, half, x[0], &x[1..])
        };
        let b_r = if shared { rest[0] } else { 1.0 };
        (p1, p2, p_r, b_r)
    };
    let band = |b_r: f64| if shared { 1.0 - b_r } else { 1.0 };

    let mut bounds = Vec::with_capacity(4);
    if search.wide {
        bounds.extend([(0.0, budget), (0.0, budget)]);
    }
    bounds.push((0.0, budget));
    if shared {
        bounds.push((0.0, 1.0));
    }

    let objective = |x: &[f64]| {
        let (p1, p2, p_r, b_r) = decode(x);
        if p1 + p2 + p_r > budget + BUDGET_TOL {
            return f64::NEG_INFINITY;
        }
        rx_value(ch, g, p1, p2, p_r, band(b_r), b_r).0
    };
    let report = grid_max(objective, &bounds, search.points_per_dim, search.refine_levels)?;
    let (p1, p2, p_r, b_r) = decode(&report.x);
    let (sum_rate, n_hat) = rx_value(ch, g, p1, p2, p_r, band(b_r), b_r);

    let bandwidths = if shared {
        BandwidthAlloc::shared(0.0, 1.0 - b_r, b_r)?
    } else {
        BandwidthAlloc::dedicated(false, true)
    };
    Ok(RxCoopResult {
        sum_rate,
        power: PowerAlloc::with_symmetric_rx(p1, p2, 0.0, p_r)?,
        bandwidths,
        n_hat,
    })
}
