//! Power and bandwidth allocations shared by all cooperation schemes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the total network power constraint.
pub const BUDGET_TOL: f64 = 1e-9;

const SHARED_SUM_TOL: f64 = 1e-12;

/// How bandwidth is provisioned for the data and cooperation channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assumption {
    /// Every channel has its own 1 Hz band.
    Dedicated,
    /// One 1 Hz band is split between data and cooperation channels.
    Shared,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assumption::Dedicated => "dedicated",
            Assumption::Shared => "shared",
        })
    }
}

impl FromStr for Assumption {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dedicated" | "1" => Ok(Assumption::Dedicated),
            "shared" | "2" => Ok(Assumption::Shared),
            other => Err(format!(
                "unknown bandwidth assumption `{other}` (expected dedicated or shared)"
            )),
        }
    }
}

/// Bandwidths (Hz) of the transmitter cooperation, data and receiver
/// cooperation channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthAlloc {
    pub assumption: Assumption,
    pub b_t: f64,
    pub b: f64,
    pub b_r: f64,
}

impl BandwidthAlloc {
    /// Dedicated bands: 1 Hz for data and for each active cooperation link.
    pub fn dedicated(tx_active: bool, rx_active: bool) -> Self {
        Self {
            assumption: Assumption::Dedicated,
            b_t: if tx_active { 1.0 } else { 0.0 },
            b: 1.0,
            b_r: if rx_active { 1.0 } else { 0.0 },
        }
    }

    /// A split of the single shared band; the parts must sum to one.
    pub fn shared(b_t: f64, b: f64, b_r: f64) -> Result<Self> {
        for (name, value) in [("b_t", b_t), ("b", b), ("b_r", b_r)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        let total = b_t + b + b_r;
        if (total - 1.0).abs() > SHARED_SUM_TOL {
            return Err(Error::OutOfRange {
                name: "b_t + b + b_r",
                value: total,
                lo: 1.0,
                hi: 1.0,
            });
        }
        Ok(Self {
            assumption: Assumption::Shared,
            b_t,
            b,
            b_r,
        })
    }
}

/// Power (W) spent on data, transmitter cooperation and receiver cooperation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerAlloc {
    pub p1: f64,
    pub p2: f64,
    pub p_t: f64,
    pub p_r1: f64,
    pub p_r2: f64,
}

impl PowerAlloc {
    pub fn new(p1: f64, p2: f64, p_t: f64, p_r1: f64, p_r2: f64) -> Result<Self> {
        let alloc = Self {
            p1,
            p2,
            p_t,
            p_r1,
            p_r2,
        };
        for (name, value) in alloc.named() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
        }
        Ok(alloc)
    }

    /// Receiver cooperation power `p_r` split evenly between the receivers.
    pub fn with_symmetric_rx(p1: f64, p2: f64, p_t: f64, p_r: f64) -> Result<Self> {
        Self::new(p1, p2, p_t, 0.5 * p_r, 0.5 * p_r)
    }

    pub fn p_r(&self) -> f64 {
        self.p_r1 + self.p_r2
    }

    pub fn total(&self) -> f64 {
        self.p1 + self.p2 + self.p_t + self.p_r1 + self.p_r2
    }

    pub fn within_budget(&self, budget: f64) -> bool {
        self.total() <= budget + BUDGET_TOL
    }

    fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p_t", self.p_t),
            ("p_r1", self.p_r1),
            ("p_r2", self.p_r2),
        ]
    }
}

/// `bandwidth * log2(1 + gain * power / bandwidth)` in bits/s, extended by its
/// limit 0 at zero bandwidth.
pub fn awgn_rate(bandwidth: f64, power: f64, gain: f64) -> f64 {
    if bandwidth <= 0.0 {
        return 0.0;
    }
    bandwidth * (gain * power / bandwidth).ln_1p() / std::f64::consts::LN_2
}
