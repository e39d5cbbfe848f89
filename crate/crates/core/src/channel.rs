//! Phase-fading channel realizations.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Complex2x2, C64};

/// One realization of the four data-channel phases `theta_1..theta_4`.
///
/// The complex gains `h_i = exp(j theta_i)` are recomputed from the phases on
/// demand, so their modulus is always exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFading {
    theta: [f64; 4],
}

/// Static AWGN cooperation link with linear power gain `G`, shared by the
/// transmitter pair and the receiver pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoopChannel {
    gain: f64,
}

impl PhaseFading {
    /// Phases are wrapped into `[0, 2pi)`.
    pub fn new(theta: [f64; 4]) -> Result<Self> {
        let mut wrapped = [0.0; 4];
        for (out, &t) in wrapped.iter_mut().zip(&theta) {
            if !t.is_finite() {
                return Err(Error::OutOfRange {
                    name: "theta",
                    value: t,
                    lo: 0.0,
                    hi: TAU,
                });
            }
            let w = t.rem_euclid(TAU);
            *out = if w >= TAU { 0.0 } else { w };
        }
        Ok(Self { theta: wrapped })
    }

    /// Deterministic realization for sample `index` of the stream keyed by
    /// `seed`. Each index owns its own ChaCha stream, so the result does not
    /// depend on which other indices were drawn or in what order.
    pub fn sample(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let theta = [(); 4].map(|_| rng.gen_range(0.0..TAU));
        Self { theta }
    }

    pub fn theta(&self) -> [f64; 4] {
        self.theta
    }

    /// `[h1, h2, h3, h4]`.
    pub fn gains(&self) -> [C64; 4] {
        self.theta.map(|t| C64::from_polar(1.0, t))
    }

    /// `H = [h1 h2; h3 h4]`.
    pub fn matrix(&self) -> Complex2x2 {
        let [h1, h2, h3, h4] = self.gains();
        Complex2x2::from_rows([h1, h2], [h3, h4])
    }

    /// Row seen by receiver 1, `f1 = [h1 h2]`.
    pub fn f1(&self) -> [C64; 2] {
        let [h1, h2, _, _] = self.gains();
        [h1, h2]
    }

    /// Row seen by receiver 2, `f2 = [h3 h4]`.
    pub fn f2(&self) -> [C64; 2] {
        let [_, _, h3, h4] = self.gains();
        [h3, h4]
    }

    /// Column from transmitter 1, `[h1 h3]^T`.
    pub fn column1(&self) -> [C64; 2] {
        let [h1, _, h3, _] = self.gains();
        [h1, h3]
    }

    /// Column from transmitter 2, `[h2 h4]^T`.
    pub fn column2(&self) -> [C64; 2] {
        let [_, h2, _, h4] = self.gains();
        [h2, h4]
    }

    /// `1 - cos(theta1 - theta2 - theta3 + theta4)`, in `[0, 2]`.
    ///
    /// `|det H|^2 = 2 phi`, so this single scalar carries all of the
    /// realization's influence on the symmetric rate formulas.
    pub fn phi(&self) -> f64 {
        let [t1, t2, t3, t4] = self.theta;
        (1.0 - (t1 - t2 - t3 + t4).cos()).clamp(0.0, 2.0)
    }

    /// Equivalent channels after receiver cooperation:
    /// `H1 = [f1; sqrt(eta2) f2]` and `H2 = [sqrt(eta1) f1; f2]`.
    pub fn tilde_matrices(&self, eta1: f64, eta2: f64) -> Result<(Complex2x2, Complex2x2)> {
        for (name, eta) in [("eta1", eta1), ("eta2", eta2)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::OutOfRange {
                    name,
                    value: eta,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        let h = self.matrix();
        Ok((h.scale_row(1, eta2.sqrt()), h.scale_row(0, eta1.sqrt())))
    }

    /// FNV-1a digest of the phase bit patterns.
    pub fn digest(&self) -> u64 {
        self.theta
            .iter()
            .flat_map(|t| t.to_bits().to_le_bytes())
            .fold(0xcbf2_9ce4_8422_2325, |h, byte| {
                (h ^ u64::from(byte)).wrapping_mul(0x0000_0100_0000_01b3)
            })
    }
}

impl CoopChannel {
    pub fn new(gain: f64) -> Result<Self> {
        if !(gain >= 0.0 && gain.is_finite()) {
            return Err(Error::OutOfRange {
                name: "G",
                value: gain,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(Self { gain })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn fading(t: [f64; 4]) -> PhaseFading {
        PhaseFading::new(t).unwrap()
    }

    #[test]
    fn sampling_is_deterministic_per_index() {
        let a = PhaseFading::sample(42, 7);
        let _ = PhaseFading::sample(42, 3);
        assert_eq!(a, PhaseFading::sample(42, 7));
        assert_ne!(a, PhaseFading::sample(42, 8));
        assert_ne!(a, PhaseFading::sample(43, 7));
        assert!(a.theta().iter().all(|t| (0.0..TAU).contains(t)));
    }

    #[test]
    fn phi_has_unit_mean() {
        let n = 100_000;
        let mean = (0..n).map(|i| PhaseFading::sample(2024, i).phi()).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean phi {mean}");
    }

    #[test]
    fn theta_histogram_is_uniform() {
        // 20 bins, chi-square critical value at the 0.01 level with 19 dof.
        const BINS: usize = 20;
        const CRITICAL: f64 = 36.191;
        let n = 100_000;
        let mut counts = [0usize; BINS];
        for i in 0..n {
            let t = PhaseFading::sample(99, i).theta()[0];
            counts[((t / TAU) * BINS as f64) as usize] += 1;
        }
        let expected = n as f64 / BINS as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < CRITICAL, "chi2 = {chi2}");
    }

    #[test]
    fn phi_examples() {
        assert_eq!(fading([0.0; 4]).phi(), 0.0);
        assert_eq!(fading([PI, 0.0, 0.0, 0.0]).phi(), 2.0);
        assert!((fading([PI / 2.0, 0.0, 0.0, 0.0]).phi() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tilde_matrix_examples() {
        let ch = fading([0.3, 1.1, 2.0, 5.9]);
        let h = ch.matrix();
        let (h1, h2) = ch.tilde_matrices(1.0, 1.0).unwrap();
        assert_eq!(h1, h);
        assert_eq!(h2, h);

        let (h1, h2) = ch.tilde_matrices(0.0, 0.0).unwrap();
        assert_eq!(h1.row(0), ch.f1());
        assert!(h1.row(1).iter().all(|z| z.norm() == 0.0));
        assert!(h2.row(0).iter().all(|z| z.norm() == 0.0));
        assert_eq!(h2.row(1), ch.f2());

        let (h1, _) = ch.tilde_matrices(1.0, 0.25).unwrap();
        let f2 = ch.f2();
        assert_eq!(h1.row(1), [f2[0] * 0.5, f2[1] * 0.5]);
    }

    #[test]
    fn tilde_matrices_reject_bad_eta() {
        let ch = fading([0.0; 4]);
        assert!(ch.tilde_matrices(1.5, 0.5).is_err());
        assert!(ch.tilde_matrices(0.5, -0.1).is_err());
        assert!(ch.tilde_matrices(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn construction_wraps_and_validates() {
        let ch = fading([-PI, 3.0 * PI, 0.0, TAU]);
        let t = ch.theta();
        assert!((t[0] - PI).abs() < 1e-15 && (t[1] - PI).abs() < 1e-12);
        assert_eq!(t[3], 0.0);
        assert!(PhaseFading::new([f64::NAN, 0.0, 0.0, 0.0]).is_err());
        assert!(CoopChannel::new(-1.0).is_err());
        assert!(CoopChannel::new(f64::NAN).is_err());
        assert_eq!(CoopChannel::new(0.0).unwrap().gain(), 0.0);
    }

    #[test]
    fn det_h_squared_is_two_phi() {
        for i in 0..100 {
            let ch = PhaseFading::sample(5, i);
            assert!((ch.matrix().det().norm_sqr() - 2.0 * ch.phi()).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn gains_have_unit_modulus(seed in any::<u64>(), index in any::<u64>()) {
            let ch = PhaseFading::sample(seed, index);
            for h in ch.gains() {
                prop_assert!((h.norm() - 1.0).abs() < 1e-15);
            }
            let phi = ch.phi();
            prop_assert!((0.0..=2.0).contains(&phi));
        }

        #[test]
        fn phi_ignores_common_phase(t in proptest::array::uniform4(0.0..TAU), c in -10.0..10.0f64) {
            let a = fading(t).phi();
            let b = fading(t.map(|x| x + c)).phi();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
