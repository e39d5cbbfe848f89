//! Capacity baselines: non-cooperative transmission and the colocated
//! multi-antenna upper bounds.

use serde::{Deserialize, Serialize};

use crate::channel::PhaseFading;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, logdet_i_plus, Hermitian2x2};

/// The four reference sum rates for one realization at one power budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub c_nc: f64,
    pub c_bc: f64,
    pub c_mac: f64,
    pub c_mimo: f64,
}

impl BoundSet {
    pub fn evaluate(ch: &PhaseFading, budget: f64) -> Result<Self> {
        Ok(Self {
            c_nc: c_nc(budget),
            c_bc: c_bc(ch, budget),
            c_mac: c_mac(ch, budget)?,
            c_mimo: c_mimo(ch, budget)?,
        })
    }

    /// `c_nc <= c_bc = c_mac <= c_mimo`, with `tol` slack on each link.
    pub fn ordering_holds(&self, tol: f64) -> bool {
        self.c_nc <= self.c_bc + tol
            && (self.c_bc - self.c_mac).abs() <= tol
            && self.c_bc <= self.c_mimo + tol
            && self.c_mac <= self.c_mimo + tol
    }
}

/// Two-mode waterfilling solution over the eigenmodes of `H H^H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MimoWaterfill {
    pub gains: [f64; 2],
    pub powers: [f64; 2],
    /// Common value of `1/gain + power` on the active modes.
    pub water_level: f64,
    pub rate: f64,
}

/// Interference channel under strong interference without cooperation: the
/// unit-modulus gains make it independent of the phases.
pub fn c_nc(budget: f64) -> f64 {
    budget.ln_1p() / std::f64::consts::LN_2
}

/// Colocated transmitters: two-antenna broadcast channel, via its dual MAC
/// at the equal power split.
pub fn c_bc(ch: &PhaseFading, budget: f64) -> f64 {
    let p = budget;
    (1.0 + 2.0 * p + 0.5 * ch.phi() * p * p).log2()
}

/// Colocated receivers: two-antenna multiple-access channel, evaluated
/// from the column vectors of `H` at the equal power split.
pub fn c_mac(ch: &PhaseFading, budget: f64) -> Result<f64> {
    let half = 0.5 * budget;
    let gram = Hermitian2x2::outer(ch.column1(), half) + Hermitian2x2::outer(ch.column2(), half);
    logdet_i_plus(&gram)
}

pub fn c_mimo(ch: &PhaseFading, budget: f64) -> Result<f64> {
    Ok(mimo_waterfill(ch, budget)?.rate)
}

pub fn mimo_waterfill(ch: &PhaseFading, budget: f64) -> Result<MimoWaterfill> {
    let (l1, l2) = eig_hermitian(&ch.matrix().gram());
    if l1 <= 0.0 {
        return Err(Error::DegenerateChannel(format!("largest eigenvalue of H H^H is {l1}")));
    }
    let l2 = l2.max(0.0);
    let inv1 = 1.0 / l1;
    // Second mode opens once the water rises above its inverse gain.
    let (powers, water_level) = if l2 == 0.0 || budget <= 1.0 / l2 - inv1 {
        ([budget, 0.0], inv1 + budget)
    } else {
        let inv2 = 1.0 / l2;
        let level = 0.5 * (budget + inv1 + inv2);
        ([level - inv1, level - inv2], level)
    };
    let rate = (l1 * powers[0]).ln_1p() / std::f64::consts::LN_2 + (l2 * powers[1]).ln_1p() / std::f64::consts::LN_2;
    Ok(MimoWaterfill {
        gains: [l1, l2],
        powers,
        water_level,
        rate,
    })
}
