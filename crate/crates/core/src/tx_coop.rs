//! Transmitter cooperation: the transmitters exchange their messages over
//! the cooperation link, then jointly encode with dirty paper coding.
//!
//! The exchanged sum rate `R_t` grows with the cooperation power while the
//! DPC sum rate `R_DPC` shrinks with it, so the best split of the budget
//! sits at their crossing.

use serde::{Deserialize, Serialize};

use crate::allocation::{awgn_rate, Assumption, BandwidthAlloc, PowerAlloc};
use crate::channel::{CoopChannel, PhaseFading};
use crate::error::Result;
use crate::optimize::{
    bisect_root, golden_max, grid_max, linspace, BISECT_TOL, GOLDEN_TOL, GRID_POINTS, GRID_REFINE_LEVELS,
};

/// Points in the coarse bandwidth pre-scan used to bracket the golden search.
const PRESCAN_POINTS: usize = 17;

/// Relative width of the band around `G^2 = 2 phi` that selects the
/// degenerate closed form.
const DEGENERATE_REL_TOL: f64 = 1e-9;

/// How the optimal cooperation power was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PtBranch {
    ClosedFormGeneric,
    ClosedFormDegenerate,
    NumericRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtStar {
    pub p_t: f64,
    pub branch: PtBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TxCoopResult {
    pub sum_rate: f64,
    pub p_t_star: f64,
    pub power: PowerAlloc,
    pub bandwidths: BandwidthAlloc,
    pub branch: PtBranch,
}

/// DPC sum rate of the broadcast channel formed after message exchange.
pub fn r_dpc_sum(ch: &PhaseFading, p1: f64, p2: f64, b: f64) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    let snr = 2.0 * (p1 + p2) / b + 2.0 * ch.phi() * p1 * p2 / (b * b);
    b * snr.ln_1p() / std::f64::consts::LN_2
}

/// Sum rate the cooperation link carries when each transmitter spends `p_t/2`.
pub fn r_t(g: &CoopChannel, p_t: f64, b_t: f64) -> f64 {
    2.0 * awgn_rate(b_t, 0.5 * p_t, g.gain())
}

/// DPC sum rate with the data power `budget - p_t` split evenly.
fn r_dpc_after(ch: &PhaseFading, budget: f64, p_t: f64, b: f64) -> f64 {
    let half = 0.5 * (budget - p_t).max(0.0);
    r_dpc_sum(ch, half, half, b)
}

/// Closed-form crossing of `R_t` and `R_DPC` with unit bandwidths.
///
/// Clearing the logarithms leaves the quadratic
/// `(G^2 - 2 phi) p^2 + 4 (G + 2 + phi P) p - (8P + 2 phi P^2) = 0`. Its
/// positive root `2(sqrt(D) - G - phi P - 2) / (G^2 - 2 phi)` is evaluated in
/// the rationalized form `2c / (sqrt(D) + G + phi P + 2)`, which is the same
/// number without the cancellation near `G^2 = 2 phi`.
pub fn pt_star_dedicated(ch: &PhaseFading, g: &CoopChannel, budget: f64) -> PtStar {
    let phi = ch.phi();
    let gain = g.gain();
    let p = budget;
    let lin = gain + phi * p + 2.0;
    let scale = (gain * gain).max(2.0 * phi);
    let degenerate = (gain * gain - 2.0 * phi).abs() <= DEGENERATE_REL_TOL * scale;

    let p_t = if degenerate {
        p * (phi * p + 4.0) / (2.0 * lin)
    } else {
        let d = 4.0 * (gain + 1.0) + gain * gain * (2.0 * p + 1.0) + phi * gain * p * (2.0 + 0.5 * gain * p);
        let c = 2.0 * p + 0.5 * phi * p * p;
        2.0 * c / (d.sqrt() + lin)
    };
    PtStar {
        p_t: p_t.clamp(0.0, budget),
        branch: if degenerate {
            PtBranch::ClosedFormDegenerate
        } else {
            PtBranch::ClosedFormGeneric
        },
    }
}

/// Crossing of `R_t` and `R_DPC` for a split band, found by bisection.
pub fn pt_star_shared(ch: &PhaseFading, g: &CoopChannel, budget: f64, b_t: f64, b: f64) -> Result<f64> {
    if b_t <= 0.0 || b <= 0.0 || g.gain() <= 0.0 || r_dpc_after(ch, budget, 0.0, b) <= 0.0 {
        return Ok(0.0);
    }
    let report = bisect_root(
        |p_t| r_t(g, p_t, b_t) - r_dpc_after(ch, budget, p_t, b),
        0.0,
        budget,
        BISECT_TOL,
    )?;
    Ok(report.x[0].clamp(0.0, budget))
}

fn min_rate(ch: &PhaseFading, g: &CoopChannel, budget: f64, p_t: f64, b_t: f64, b: f64) -> f64 {
    r_t(g, p_t, b_t).min(r_dpc_after(ch, budget, p_t, b))
}

/// Best exchange-then-DPC sum rate for one realization.
pub fn r_tx(ch: &PhaseFading, g: &CoopChannel, budget: f64, assumption: Assumption) -> Result<TxCoopResult> {
    let finish = |p_t: f64, sum_rate: f64, bandwidths: BandwidthAlloc, branch: PtBranch| -> Result<TxCoopResult> {
        let half = 0.5 * (budget - p_t).max(0.0);
        Ok(TxCoopResult {
            sum_rate,
            p_t_star: p_t,
            power: PowerAlloc::new(half, half, p_t, 0.0, 0.0)?,
            bandwidths,
            branch,
        })
    };

    match assumption {
        Assumption::Dedicated => {
            let bw = BandwidthAlloc::dedicated(true, false);
            if g.gain() <= 0.0 {
                return finish(0.0, 0.0, bw, PtBranch::ClosedFormGeneric);
            }
            let star = pt_star_dedicated(ch, g, budget);
            let rate = min_rate(ch, g, budget, star.p_t, 1.0, 1.0);
            finish(star.p_t, rate, bw, star.branch)
        }
        Assumption::Shared => {
            let value = |b_t: f64| -> f64 {
                let b = 1.0 - b_t;
                match pt_star_shared(ch, g, budget, b_t, b) {
                    Ok(p_t) => min_rate(ch, g, budget, p_t, b_t, b),
                    Err(_) => f64::NAN,
                }
            };
            let b_t = shared_bandwidth_search(&value)?;
            let b = 1.0 - b_t;
            let p_t = pt_star_shared(ch, g, budget, b_t, b)?;
            let rate = min_rate(ch, g, budget, p_t, b_t, b);
            finish(p_t, rate, BandwidthAlloc::shared(b_t, b, 0.0)?, PtBranch::NumericRoot)
        }
    }
}

/// Maximizes the inner rate over `b_t`: a coarse scan brackets the peak for
/// golden-section search, falling back to grid search when the scan is not
/// unimodal.
fn shared_bandwidth_search(value: &dyn Fn(f64) -> f64) -> Result<f64> {
    let xs: Vec<f64> = linspace(0.0, 1.0, PRESCAN_POINTS).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| value(x)).collect();
    let (k_best, &y_best) = ys.iter().enumerate().fold(
        (0, &f64::NEG_INFINITY),
        |acc, (k, y)| if *y > *acc.1 { (k, y) } else { acc },
    );
    if y_best <= 0.0 {
        return Ok(xs[k_best]);
    }

    const SLACK: f64 = 1e-12;
    let rising = ys[..=k_best].windows(2).all(|w| w[1] >= w[0] - SLACK);
    let falling = ys[k_best..].windows(2).all(|w| w[1] <= w[0] + SLACK);
    let (x, y) = if rising && falling {
        let lo = xs[k_best.saturating_sub(1)];
        let hi = xs[(k_best + 1).min(PRESCAN_POINTS - 1)];
        let r = golden_max(value, lo, hi, GOLDEN_TOL)?;
        (r.argmax(), r.value)
    } else {
        let r = grid_max(|x| value(x[0]), &[(0.0, 1.0)], GRID_POINTS, GRID_REFINE_LEVELS)?;
        (r.x[0], r.value)
    };
    Ok(if y >= y_best { x } else { xs[k_best] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::c_bc;
    use crate::linalg::{logdet_i_plus, Hermitian2x2};
    use std::f64::consts::PI;

    fn fading(t: [f64; 4]) -> PhaseFading {
        PhaseFading::new(t).unwrap()
    }

    fn coop(g: f64) -> CoopChannel {
        CoopChannel::new(g).unwrap()
    }

    /// `B log2 |I + f1^H (P1/B) f1 + f2^H (P2/B) f2|`.
    fn dpc_logdet(ch: &PhaseFading, p1: f64, p2: f64, b: f64) -> f64 {
        let conj = |v: [crate::linalg::C64; 2]| [v[0].conj(), v[1].conj()];
        let m = Hermitian2x2::outer(conj(ch.f1()), p1 / b) + Hermitian2x2::outer(conj(ch.f2()), p2 / b);
        b * logdet_i_plus(&m).unwrap()
    }

    /// Plain bisection on the increasing gap `R_t - R_DPC`.
    fn crossing_oracle(ch: &PhaseFading, g: f64, budget: f64, b_t: f64, b: f64) -> f64 {
        let gap = |p: f64| {
            let rt = 2.0 * b_t * (1.0 + g * p / (2.0 * b_t)).log2();
            rt - dpc_logdet(ch, 0.5 * (budget - p), 0.5 * (budget - p), b)
        };
        let (mut lo, mut hi) = (0.0, budget);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn r_dpc_examples() {
        assert!((r_dpc_sum(&fading([0.0; 4]), 0.5, 0.5, 1.0) - 3f64.log2()).abs() < 1e-15);
        assert!((r_dpc_sum(&fading([PI, 0.0, 0.0, 0.0]), 0.5, 0.5, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn r_dpc_matches_logdet() {
        for i in 0..10_000u64 {
            let ch = PhaseFading::sample(21, i);
            let p1 = (i % 97) as f64 * 0.05;
            let p2 = (i % 89) as f64 * 0.07;
            let b = 0.1 + (i % 13) as f64 * 0.1;
            let closed = r_dpc_sum(&ch, p1, p2, b);
            assert!((closed - dpc_logdet(&ch, p1, p2, b)).abs() < 1e-10);
        }
    }

    #[test]
    fn r_t_examples() {
        assert_eq!(r_t(&coop(1.0), 2.0, 1.0), 2.0);
        assert_eq!(r_t(&coop(5.0), 0.0, 1.0), 0.0);
        assert_eq!(r_t(&coop(5.0), 1.0, 0.0), 0.0);
        let expected = 101f64.ln() / 2f64.ln();
        assert!((r_t(&coop(100.0), 1.0, 0.5) - expected).abs() < 1e-12);
        assert!((expected - 6.658_211_482_751_795).abs() < 1e-12);
    }

    #[test]
    fn pt_star_degenerate_branch() {
        let ch = fading([PI, 0.0, 0.0, 0.0]);
        let star = pt_star_dedicated(&ch, &coop(2.0), 1.0);
        assert_eq!(star.branch, PtBranch::ClosedFormDegenerate);
        assert!((star.p_t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pt_star_vanishes_for_strong_link() {
        for i in 0..20 {
            let ch = PhaseFading::sample(2, i);
            let star = pt_star_dedicated(&ch, &coop(1e6), 1.0);
            assert!(star.p_t < 1e-5, "{}", star.p_t);
        }
    }

    #[test]
    fn pt_star_generic_matches_literal_formula() {
        for i in 0..1000 {
            let ch = PhaseFading::sample(30, i);
            let g = 0.5 + (i % 40) as f64;
            let p = 0.1 + (i % 17) as f64;
            let phi = ch.phi();
            let d = 4.0 * (g + 1.0) + g * g * (2.0 * p + 1.0) + phi * g * p * (2.0 + g * p / 2.0);
            let literal = 2.0 * (d.sqrt() - g - phi * p - 2.0) / (g * g - 2.0 * phi);
            let star = pt_star_dedicated(&ch, &coop(g), p);
            assert_eq!(star.branch, PtBranch::ClosedFormGeneric);
            assert!((star.p_t - literal).abs() < 1e-9 * literal.abs().max(1.0));
        }
    }

    #[test]
    fn pt_star_matches_bisection_oracle() {
        for i in 0..1000u64 {
            let ch = PhaseFading::sample(31, i);
            let g = 10f64.powf(-1.0 + 4.0 * ((i * 37) % 101) as f64 / 100.0);
            let p = 10f64.powf(-1.0 + 2.0 * ((i * 53) % 97) as f64 / 96.0);
            let star = pt_star_dedicated(&ch, &coop(g), p);
            let oracle = crossing_oracle(&ch, g, p, 1.0, 1.0);
            assert!(
                (star.p_t - oracle).abs() < 1e-6,
                "G {g} P {p}: {} vs {oracle}",
                star.p_t
            );
            let rt = r_t(&coop(g), star.p_t, 1.0);
            let rd = r_dpc_after(&ch, p, star.p_t, 1.0);
            assert!((rt - rd).abs() < 1e-6);
        }
    }

    #[test]
    fn pt_star_near_degeneracy_is_continuous() {
        let ch = fading([PI / 2.0, 0.0, 0.0, 0.0]);
        let g0 = (2.0 * ch.phi()).sqrt();
        let at = pt_star_dedicated(&ch, &coop(g0), 1.0);
        for eps in [1e-12, 1e-9, 1e-7, 1e-5] {
            let off = pt_star_dedicated(&ch, &coop(g0 * (1.0 + eps)), 1.0);
            assert!((off.p_t - at.p_t).abs() < 1e-5);
        }
    }

    #[test]
    fn pt_star_shared_examples() {
        let ch = fading([PI / 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(pt_star_shared(&ch, &coop(5.0), 1.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(pt_star_shared(&ch, &coop(0.0), 1.0, 0.5, 0.5).unwrap(), 0.0);

        let got = pt_star_shared(&ch, &coop(100.0), 1.0, 0.5, 0.5).unwrap();
        let gap = |p: f64| r_t(&coop(100.0), p, 0.5) - dpc_logdet(&ch, 0.5 * (1.0 - p), 0.5 * (1.0 - p), 0.5);
        let n = 1_000_001;
        let scan = (0..n)
            .map(|k| k as f64 / (n - 1) as f64)
            .find(|&p| gap(p) >= 0.0)
            .unwrap();
        assert!((got - scan).abs() <= 1e-6 + 1e-9, "{got} vs {scan}");
    }

    #[test]
    fn r_tx_examples() {
        let ch = fading([PI / 2.0, 0.0, 0.0, 0.0]);
        let zero = r_tx(&ch, &coop(0.0), 1.0, Assumption::Dedicated).unwrap();
        assert_eq!(zero.sum_rate, 0.0);
        assert_eq!(r_tx(&ch, &coop(0.0), 1.0, Assumption::Shared).unwrap().sum_rate, 0.0);

        let strong = r_tx(&ch, &coop(1e6), 1.0, Assumption::Dedicated).unwrap();
        let bc = c_bc(&ch, 1.0);
        assert!(strong.sum_rate <= bc && bc - strong.sum_rate < 1e-4);

        let r = r_tx(&ch, &coop(10.0), 1.0, Assumption::Dedicated).unwrap();
        let p_oracle = crossing_oracle(&ch, 10.0, 1.0, 1.0, 1.0);
        let oracle = (2.0 * (1.0 + 10.0 * p_oracle / 2.0).log2()).min(dpc_logdet(
            &ch,
            0.5 * (1.0 - p_oracle),
            0.5 * (1.0 - p_oracle),
            1.0,
        ));
        assert!((r.sum_rate - oracle).abs() < 1e-6);
        assert!(r.power.within_budget(1.0));
    }

    #[test]
    fn r_tx_shared_reports_full_band() {
        let ch = PhaseFading::sample(1, 1);
        let r = r_tx(&ch, &coop(100.0), 1.0, Assumption::Shared).unwrap();
        let bw = r.bandwidths;
        assert!((bw.b_t + bw.b + bw.b_r - 1.0).abs() < 1e-12 && bw.b_r == 0.0);
        assert!(r.sum_rate > 0.0);
        // interior crossing
        let rt = r_t(&coop(100.0), r.p_t_star, bw.b_t);
        let rd = r_dpc_after(&ch, 1.0, r.p_t_star, bw.b);
        assert!((rt - rd).abs() < 1e-6);
    }

    #[test]
    fn r_tx_shared_matches_bandwidth_scan() {
        for i in 0..5 {
            let ch = PhaseFading::sample(77, i);
            let g = coop(10f64.powi(i as i32 - 1));
            let r = r_tx(&ch, &g, 1.0, Assumption::Shared).unwrap();
            let scan = (1..2000)
                .map(|k| k as f64 / 2000.0)
                .map(|bt| {
                    let pt = crossing_oracle(&ch, g.gain(), 1.0, bt, 1.0 - bt);
                    min_rate(&ch, &g, 1.0, pt, bt, 1.0 - bt)
                })
                .fold(0.0, f64::max);
            assert!(r.sum_rate >= scan - 1e-6, "{} < {scan}", r.sum_rate);
        }
    }

    #[test]
    fn r_dpc_symmetric_and_concave_on_power_line() {
        for i in 0..200 {
            let ch = PhaseFading::sample(40, i);
            let total = 0.5 + (i % 7) as f64;
            for k in 0..20 {
                let a = total * k as f64 / 20.0;
                let c = total * (k + 1) as f64 / 20.0;
                assert!((r_dpc_sum(&ch, a, total - a, 1.0) - r_dpc_sum(&ch, total - a, a, 1.0)).abs() < 1e-12);
                let mid = r_dpc_sum(&ch, 0.5 * (a + c), total - 0.5 * (a + c), 1.0);
                let chord = 0.5 * (r_dpc_sum(&ch, a, total - a, 1.0) + r_dpc_sum(&ch, c, total - c, 1.0));
                assert!(mid >= chord - 1e-12);
            }
        }
    }

    #[test]
    fn r_tx_monotone_and_bounded() {
        for i in 0..1000u64 {
            let ch = PhaseFading::sample(41, i);
            let g = 10f64.powf(-1.0 + 4.0 * ((i * 13) % 100) as f64 / 100.0);
            let p = 10f64.powf(-1.0 + 2.0 * ((i * 7) % 50) as f64 / 50.0);
            let base = r_tx(&ch, &coop(g), p, Assumption::Dedicated).unwrap().sum_rate;
            let more_g = r_tx(&ch, &coop(g * 1.1), p, Assumption::Dedicated).unwrap().sum_rate;
            let more_p = r_tx(&ch, &coop(g), p * 1.1, Assumption::Dedicated).unwrap().sum_rate;
            assert!(more_g >= base - 1e-12 && more_p >= base - 1e-12);
            assert!(base <= c_bc(&ch, p) + 1e-12);
        }
    }

    #[test]
    fn dedicated_dominates_shared() {
        for i in 0..100u64 {
            let ch = PhaseFading::sample(42, i);
            let g = coop(10f64.powf(-1.0 + 0.04 * i as f64));
            let d = r_tx(&ch, &g, 1.0, Assumption::Dedicated).unwrap().sum_rate;
            let s = r_tx(&ch, &g, 1.0, Assumption::Shared).unwrap().sum_rate;
            assert!(d >= s - 1e-12, "{d} < {s}");
        }
    }
}
