//! Achievable sum rates for a two-transmitter, two-receiver phase-fading
//! network whose transmitters and receivers may cooperate over orthogonal
//! AWGN links, under a total network power constraint.
//!
//! Schemes: non-cooperative transmission, message exchange followed by
//! dirty paper coding ([`tx_coop`]), Wyner-Ziv compress-and-forward between
//! the receivers ([`rx_coop`]), and both at once ([`txrx_coop`]). The
//! colocated-antenna capacities in [`bounds`] cap them, and [`montecarlo`]
//! averages everything over random phase realizations.

pub mod allocation;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod optimize;
pub mod rx_coop;
pub mod tx_coop;
pub mod txrx_coop;

pub use allocation::{Assumption, BandwidthAlloc, PowerAlloc};
pub use channel::{CoopChannel, PhaseFading};
pub use error::{Error, Result};
