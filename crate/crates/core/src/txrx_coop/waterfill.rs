//! Sum-power iterative waterfilling for the dual multiple-access channel of
//! a two-user broadcast channel with two-antenna receivers, and the
//! MAC-to-BC covariance transformation.

use crate::error::{Error, Result};
use crate::linalg::{logdet_i_plus, Complex2x2, Hermitian2x2, C64};
use crate::optimize::golden_max;

pub const MAX_ITERATIONS: usize = 1000;

/// Longest extrapolated step along the waterfilling direction.
const MAX_STEP: f64 = 1e3;

/// Waterfilling iterations before switching to the barrier Newton polish.
/// Waterfilling crawls when the two users' channels are nearly parallel.
const WATERFILL_ITERATIONS: usize = 60;

/// Newton steps per barrier weight.
const CENTERING_STEPS: usize = 50;

/// Real coordinates of a Hermitian 2x2 matrix: `a`, `d`, `Re b`, `Im b`.
const BASIS: [Hermitian2x2; 4] = [
    Hermitian2x2::diag(1.0, 0.0),
    Hermitian2x2::diag(0.0, 1.0),
    Hermitian2x2::new(0.0, 0.0, C64::new(1.0, 0.0)),
    Hermitian2x2::new(0.0, 0.0, C64::new(0.0, 1.0)),
];

/// Converged dual-MAC covariances (in W, one per user) and the sum rate
/// they achieve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterfillSolution {
    pub mac_covariances: [Hermitian2x2; 2],
    pub sum_rate: f64,
    pub iterations: usize,
    /// Frank-Wolfe duality gap in bits/s: an upper bound on the distance of
    /// `sum_rate` from the optimum.
    pub gap: f64,
}

/// Waterfills `power` over parallel channels with the given gains.
/// Non-positive gains receive nothing.
pub fn waterfill<const N: usize>(gains: &[f64; N], power: f64) -> [f64; N] {
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));
    let mut alloc = [0.0; N];
    if power <= 0.0 {
        return alloc;
    }
    let mut inv_sum = 0.0;
    let mut level = 0.0;
    let mut active = 0;
    for (m, &k) in order.iter().enumerate() {
        let g = gains[k];
        if g <= 0.0 {
            break;
        }
        let candidate = (power + inv_sum + 1.0 / g) / (m + 1) as f64;
        if candidate <= 1.0 / g {
            break;
        }
        inv_sum += 1.0 / g;
        level = candidate;
        active = m + 1;
    }
    for &k in &order[..active] {
        alloc[k] = (level - 1.0 / gains[k]).max(0.0);
    }
    alloc
}

/// `I + sum_i H_i^H Q_i H_i` for BC channels `H_i`.
fn mac_gram(channels: &[Complex2x2; 2], q: &[Hermitian2x2; 2]) -> Hermitian2x2 {
    Hermitian2x2::identity() + channels[0].adjoint_congruence(&q[0]) + channels[1].adjoint_congruence(&q[1])
}

/// Dual-MAC sum rate `log2 |I + sum_i H_i^H Q_i H_i|` in bits/s/Hz.
pub fn mac_sum_rate(channels: &[Complex2x2; 2], q: &[Hermitian2x2; 2]) -> Result<f64> {
    logdet_i_plus(&(mac_gram(channels, q) - Hermitian2x2::identity()))
}

/// Frank-Wolfe gap of the normalized problem, in bits.
fn duality_gap(channels: &[Complex2x2; 2], q: &[Hermitian2x2; 2], power: f64) -> Result<f64> {
    let inv = mac_gram(channels, q).inverse()?;
    let mut top = 0.0f64;
    let mut inner = 0.0;
    for (h, qi) in channels.iter().zip(q) {
        let grad = h.congruence(&inv);
        top = top.max(crate::linalg::eig_hermitian(&grad).0);
        inner += trace_product(&grad, qi);
    }
    Ok(((power * top - inner) / std::f64::consts::LN_2).max(0.0))
}

fn trace_product(a: &Hermitian2x2, b: &Hermitian2x2) -> f64 {
    a.a() * b.a() + a.d() * b.d() + 2.0 * (a.off() * b.off().conj()).re
}

/// Maximizes the dual-MAC sum rate `b log2 |I + sum_i H_i^H (Q_i/b) H_i|`
/// subject to `tr Q_1 + tr Q_2 <= sum_power`.
///
/// Each iteration waterfills every user against the others' current
/// interference with a common water level, then moves halfway to that
/// point. The sum rate never decreases; iteration stops once the duality
/// gap falls below `tol` bits/s.
pub fn iterative_waterfill(
    channels: (&Complex2x2, &Complex2x2),
    sum_power: f64,
    b: f64,
    tol: f64,
) -> Result<WaterfillSolution> {
    iterative_waterfill_with(channels, sum_power, b, tol, None, |_| {})
}

/// [`iterative_waterfill`] with an optional starting point (rescaled to the
/// power budget) and a callback receiving the sum rate after every
/// iteration.
pub fn iterative_waterfill_with(
    channels: (&Complex2x2, &Complex2x2),
    sum_power: f64,
    b: f64,
    tol: f64,
    warm_start: Option<[Hermitian2x2; 2]>,
    mut observe: impl FnMut(f64),
) -> Result<WaterfillSolution> {
    let h = [*channels.0, *channels.1];
    if sum_power <= 0.0 || b <= 0.0 {
        return Ok(WaterfillSolution {
            mac_covariances: [Hermitian2x2::zero(); 2],
            sum_rate: 0.0,
            iterations: 0,
            gap: 0.0,
        });
    }
    let power = sum_power / b;
    let mut q = [Hermitian2x2::diag(0.25 * power, 0.25 * power); 2];
    if let Some(init) = warm_start {
        let total = init[0].trace() + init[1].trace();
        if total > 0.0 && total.is_finite() {
            q = [init[0] * (power / total), init[1] * (power / total)];
        }
    }

    let mut rate = mac_sum_rate(&h, &q)?;
    let mut gap = duality_gap(&h, &q, power)?;
    let mut iterations = 0;
    while gap * b > tol {
        if iterations == MAX_ITERATIONS {
            return Err(Error::NotConverged {
                iterations,
                residual: gap * b,
            });
        }
        if iterations >= WATERFILL_ITERATIONS {
            let polished = barrier_polish(&h, q, power, tol / b, &mut iterations)?;
            let polished_rate = mac_sum_rate(&h, &polished)?;
            // The polished gap bounds the distance to the optimum of either
            // point, so keep whichever is higher.
            gap = duality_gap(&h, &polished, power)?;
            if polished_rate > rate {
                q = polished;
                rate = polished_rate;
                observe(rate * b);
            }
            break;
        }
        iterations += 1;

        let total = mac_gram(&h, &q);
        let mut gains = [0.0; 4];
        let mut bases = [Complex2x2::identity(); 2];
        for i in 0..2 {
            let others = total - h[i].adjoint_congruence(&q[i]);
            let effective = h[i].congruence(&others.inverse()?);
            let e = effective.eigen();
            gains[2 * i] = e.values[0];
            gains[2 * i + 1] = e.values[1];
            bases[i] = e.vectors;
        }
        let p = waterfill(&gains, power);
        let fresh = [
            Hermitian2x2::from_eigen([p[0], p[1]], &bases[0]),
            Hermitian2x2::from_eigen([p[2], p[3]], &bases[1]),
        ];
        let mix = |t: f64| [q[0] * (1.0 - t) + fresh[0] * t, q[1] * (1.0 - t) + fresh[1] * t];
        let psd = |t: f64| mix(t).iter().all(Hermitian2x2::is_psd);
        let (mut lo, mut hi) = (1.0, MAX_STEP);
        if psd(hi) {
            lo = hi;
        } else {
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if psd(mid) {
                    lo = mid
                } else {
                    hi = mid
                }
            }
        }
        let score = |t: f64| mac_sum_rate(&h, &mix(t)).unwrap_or(f64::NEG_INFINITY);
        let t = golden_max(score, 0.0, lo, 1e-3 * lo)?.argmax();
        let averaged = if score(t) > score(0.5) { mix(t) } else { mix(0.5) };
        let next_rate = mac_sum_rate(&h, &averaged)?;
        if next_rate < rate {
            // Rounding noise dominates the step; hand over to the polish.
            iterations = iterations.max(WATERFILL_ITERATIONS);
            continue;
        }
        q = averaged;
        rate = next_rate;
        observe(rate * b);
        gap = duality_gap(&h, &q, power)?;
    }

    Ok(WaterfillSolution {
        mac_covariances: [q[0] * b, q[1] * b],
        sum_rate: rate * b,
        iterations,
        gap: gap * b,
    })
}

fn is_pd(q: &Hermitian2x2) -> bool {
    q.a() > 0.0 && q.det() > 0.0
}

/// `Re tr(X Y)`.
fn trace_of_product(x: &Complex2x2, y: &Complex2x2) -> f64 {
    let mut t = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            t += (x.entry(r, c) * y.entry(c, r)).re;
        }
    }
    t
}

/// Solves `a x = rhs` by Gaussian elimination with partial pivoting.
fn solve_dense<const N: usize>(mut a: [[f64; N]; N], mut rhs: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let tail: f64 = (row + 1..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / a[row][row];
    }
    Some(x)
}

/// `ln |M| + mu sum_i ln |Q_i|`, or `-inf` outside the open cone.
fn barrier_objective(h: &[Complex2x2; 2], q: &[Hermitian2x2; 2], mu: f64) -> f64 {
    if !(is_pd(&q[0]) && is_pd(&q[1])) {
        return f64::NEG_INFINITY;
    }
    mac_gram(h, q).det().ln() + mu * (q[0].det().ln() + q[1].det().ln())
}

/// Finishes the sum-rate maximization with a log-barrier interior point
/// method: damped Newton steps on the trace-constrained barrier problem,
/// shrinking the barrier weight until the duality gap (bits) meets `tol`.
fn barrier_polish(
    h: &[Complex2x2; 2],
    start: [Hermitian2x2; 2],
    power: f64,
    tol: f64,
    iterations: &mut usize,
) -> Result<[Hermitian2x2; 2]> {
    // Pull the start strictly inside the cone, keeping the total trace.
    let eps = 1e-6;
    let floor = Hermitian2x2::identity() * (0.25 * eps * power);
    let mut q = [start[0] * (1.0 - eps) + floor, start[1] * (1.0 - eps) + floor];
    // Central-path points are within 4 mu nats of the optimum.
    let mut mu = (duality_gap(h, &q, power)? * std::f64::consts::LN_2 / 4.0).max(1e-300);
    loop {
        for _ in 0..CENTERING_STEPS {
            if duality_gap(h, &q, power)? <= tol {
                return Ok(q);
            }
            if *iterations >= MAX_ITERATIONS {
                return Err(Error::NotConverged {
                    iterations: *iterations,
                    residual: duality_gap(h, &q, power)?,
                });
            }
            *iterations += 1;
            let m_inv = mac_gram(h, &q).inverse()?;
            let w = m_inv.to_matrix();
            let mut grad = [0.0; 9];
            let mut kkt = [[0.0; 9]; 9];
            let mut mats = [Complex2x2::zero(); 8];
            for i in 0..2 {
                let q_inv = q[i].inverse()?;
                let g_i = h[i].congruence(&m_inv);
                for (e, basis) in BASIS.iter().enumerate() {
                    let k = 4 * i + e;
                    grad[k] = trace_product(&g_i, basis) + mu * trace_product(&q_inv, basis);
                    mats[k] = w * h[i].adjoint_congruence(basis).to_matrix();
                }
                let qi = q_inv.to_matrix();
                for e in 0..4 {
                    for f in 0..4 {
                        let x = qi * BASIS[e].to_matrix();
                        let y = qi * BASIS[f].to_matrix();
                        kkt[4 * i + e][4 * i + f] += mu * trace_of_product(&x, &y);
                    }
                }
            }
            for k in 0..8 {
                for l in 0..8 {
                    kkt[k][l] += trace_of_product(&mats[k], &mats[l]);
                }
            }
            // Equality constraint on the total trace.
            for k in [0, 1, 4, 5] {
                kkt[k][8] = 1.0;
                kkt[8][k] = 1.0;
            }
            let Some(step) = solve_dense(kkt, grad) else {
                break;
            };
            let decrement: f64 = (0..8).map(|k| grad[k] * step[k]).sum();
            if !(decrement > 1e-14) {
                break;
            }
            let moved = |t: f64| {
                let mut out = q;
                for (i, m) in out.iter_mut().enumerate() {
                    for (e, basis) in BASIS.iter().enumerate() {
                        *m = *m + *basis * (t * step[4 * i + e]);
                    }
                }
                out
            };
            let base = barrier_objective(h, &q, mu);
            let mut t = 1.0;
            while barrier_objective(h, &moved(t), mu) < base + 0.25 * t * decrement {
                t *= 0.5;
                if t < 1e-12 {
                    break;
                }
            }
            if t < 1e-12 {
                break;
            }
            q = moved(t);
        }
        if duality_gap(h, &q, power)? <= tol || mu < 1e-300 {
            return Ok(q);
        }
        mu *= 0.1;
    }
}

/// Maps dual-MAC covariances to BC transmit covariances with the same
/// total power and the same per-user rates.
///
/// `clean` is the BC user whose signal is encoded last, so that it sees no
/// interference; in the dual MAC it is decoded first. Inputs and outputs
/// are in W for a data band of width `b`.
pub fn mac_to_bc(
    channels: (&Complex2x2, &Complex2x2),
    q_mac: &[Hermitian2x2; 2],
    b: f64,
    clean: usize,
) -> Result<[Hermitian2x2; 2]> {
    let h = [*channels.0, *channels.1];
    let other = 1 - clean;
    let scale = 1.0 / b;
    let q = [q_mac[0] * scale, q_mac[1] * scale];

    // Clean user: whitened by the other user's dual-MAC interference.
    let a = Hermitian2x2::identity() + h[other].adjoint_congruence(&q[other]);
    let a_inv_sqrt = a.inv_sqrt()?.to_matrix();
    let f = h[clean] * a_inv_sqrt;
    let svd = f.svd();
    let rotate = svd.v * svd.u.adjoint();
    let sigma_clean = (a_inv_sqrt * rotate).congruence(&q[clean]);

    // Interfered user: whitened by the clean user's BC interference.
    let b_int = Hermitian2x2::identity() + h[other].congruence(&sigma_clean);
    let b_inv_sqrt = b_int.inv_sqrt()?.to_matrix();
    let f = b_inv_sqrt * h[other];
    let svd = f.svd();
    let rotate = svd.v * svd.u.adjoint() * b_int.sqrt_psd().to_matrix();
    let sigma_other = rotate.congruence(&q[other]);

    let mut out = [Hermitian2x2::zero(); 2];
    out[clean] = sigma_clean * b;
    out[other] = sigma_other * b;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PhaseFading;
    use crate::linalg::eig_hermitian;
    use crate::optimize::grid_max;

    fn tilde(seed: u64, i: u64, eta: (f64, f64)) -> (Complex2x2, Complex2x2) {
        PhaseFading::sample(seed, i).tilde_matrices(eta.0, eta.1).unwrap()
    }

    fn etas(i: u64) -> (f64, f64) {
        [(0.0, 0.0), (1.0, 1.0), (0.3, 0.8), (0.999, 0.99), (0.05, 0.0)][(i % 5) as usize]
    }

    /// Covariance with trace `t` and eigenvalue split `u` whose leading
    /// eigenvector is `[1, z]` (or `[z, 1]` when `flip`), normalized.
    fn covariance(t: f64, u: f64, z: C64, flip: bool) -> Hermitian2x2 {
        let n = (1.0 + z.norm_sqr()).sqrt();
        let (x, y) = (C64::new(1.0 / n, 0.0), z / n);
        let v1 = if flip { [y, x] } else { [x, y] };
        let v2 = [-v1[1].conj(), v1[0].conj()];
        Hermitian2x2::outer(v1, t * u) + Hermitian2x2::outer(v2, t * (1.0 - u))
    }

    /// Sum rate with user 2 fixed and user 1 waterfilled against it.
    fn best_response_rate(h: &[Complex2x2; 2], q2: &Hermitian2x2, power: f64) -> f64 {
        let z = Hermitian2x2::identity() + h[1].adjoint_congruence(q2);
        let e = h[0].congruence(&z.inverse().unwrap()).eigen();
        let p = waterfill(&e.values, power - q2.trace());
        let q1 = Hermitian2x2::from_eigen(p, &e.vectors);
        mac_sum_rate(h, &[q1, *q2]).unwrap()
    }

    #[test]
    fn waterfill_examples() {
        assert_eq!(waterfill(&[1.0, 0.5], 0.0), [0.0, 0.0]);
        assert_eq!(waterfill(&[1.0, 0.5], 0.5), [0.5, 0.0]);
        let p = waterfill(&[1.0, 0.5], 3.0);
        assert!((p[0] - 2.0).abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
        assert_eq!(waterfill(&[0.0, -1.0, 2.0], 1.0), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn waterfill_kkt() {
        for n in 0..500 {
            let gains = [
                0.1 + (n % 7) as f64,
                0.05 * (n % 13) as f64,
                3.0 / (1 + n % 5) as f64,
                0.0,
            ];
            let power = 0.01 * (n + 1) as f64;
            let p = waterfill(&gains, power);
            assert!((p.iter().sum::<f64>() - power).abs() < 1e-12);
            let level = (0..4)
                .filter(|&k| p[k] > 0.0)
                .map(|k| p[k] + 1.0 / gains[k])
                .next()
                .unwrap();
            for k in 0..4 {
                if p[k] > 0.0 {
                    assert!((p[k] + 1.0 / gains[k] - level).abs() < 1e-12);
                } else {
                    assert!(gains[k] <= 0.0 || 1.0 / gains[k] >= level - 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_power_gives_zero() {
        let (h1, h2) = tilde(1, 0, (0.5, 0.5));
        let s = iterative_waterfill((&h1, &h2), 0.0, 1.0, 1e-9).unwrap();
        assert_eq!(s.sum_rate, 0.0);
        assert_eq!(s.mac_covariances, [Hermitian2x2::zero(); 2]);
    }

    #[test]
    fn identical_users_share_evenly() {
        for i in 0..50 {
            let h = PhaseFading::sample(2, i).matrix();
            let p = 0.2 * (i + 1) as f64;
            let s = iterative_waterfill((&h, &h), p, 1.0, 1e-10).unwrap();
            let [q1, q2] = s.mac_covariances;
            assert!(q1.max_abs_diff(&q2) < 1e-9, "{q1:?} {q2:?}");
            let (l1, l2) = eig_hermitian(&h.gram());
            let alloc = waterfill(&[l1, l2], p);
            let single = (1.0 + l1 * alloc[0]).log2() + (1.0 + l2.max(0.0) * alloc[1]).log2();
            assert!((s.sum_rate - single).abs() < 1e-9, "{} vs {single}", s.sum_rate);
        }
    }

    #[test]
    fn objective_never_decreases() {
        for i in 0..200 {
            let (h1, h2) = tilde(3, i, etas(i));
            let p = [0.1, 1.0, 10.0, 100.0][(i % 4) as usize];
            let mut trail = Vec::new();
            let s = iterative_waterfill_with((&h1, &h2), p, 1.0, 1e-9, None, |r| trail.push(r)).unwrap();
            assert!(trail.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{trail:?}");
            assert!(s.gap <= 1e-9);
            let total = s.mac_covariances[0].trace() + s.mac_covariances[1].trace();
            assert!(total <= p + 1e-9);
            assert!(s.mac_covariances.iter().all(Hermitian2x2::is_psd));
        }
    }

    #[test]
    fn nearly_parallel_users_converge() {
        for i in 0..50 {
            let (h1, h2) = tilde(4, i, (1.0 / 1.001, 1.0 / 1.01));
            for p in [1.0, 10.0, 1000.0] {
                let s = iterative_waterfill((&h1, &h2), p, 1.0, 1e-9).unwrap();
                assert!(s.gap <= 1e-9);
            }
        }
    }

    #[test]
    fn bandwidth_scales_power_and_rate() {
        let (h1, h2) = tilde(5, 0, (0.4, 0.7));
        let unit = iterative_waterfill((&h1, &h2), 0.5, 1.0, 1e-10).unwrap();
        let half = iterative_waterfill((&h1, &h2), 0.25, 0.5, 1e-10).unwrap();
        assert!((half.sum_rate - 0.5 * unit.sum_rate).abs() < 1e-9);
    }

    #[test]
    fn bc_covariances_reproduce_dual_rates() {
        for i in 0..500 {
            let (h1, h2) = tilde(6, i, etas(i));
            let b = [1.0, 0.4][(i % 2) as usize];
            let p = [0.1, 1.0, 10.0][(i % 3) as usize];
            let s = iterative_waterfill((&h1, &h2), p, b, 1e-9).unwrap();
            let h = [h1, h2];
            for clean in 0..2 {
                let sigma = mac_to_bc((&h1, &h2), &s.mac_covariances, b, clean).unwrap();
                let total = sigma[0] + sigma[1];
                assert!((total.trace() - p).abs() < 1e-9);
                for m in &sigma {
                    assert!(eig_hermitian(m).1 >= -1e-10 * p, "{m:?} {:?}", eig_hermitian(m));
                }
                let other = 1 - clean;
                let ld =
                    |hm: &Complex2x2, m: &Hermitian2x2| b * logdet_i_plus(&hm.congruence(&(*m * (1.0 / b)))).unwrap();
                let r_clean = ld(&h[clean], &sigma[clean]);
                let r_other = ld(&h[other], &total) - ld(&h[other], &sigma[clean]);
                assert!(
                    (r_clean + r_other - s.sum_rate).abs() < 1e-6,
                    "{} vs {}",
                    r_clean + r_other,
                    s.sum_rate
                );
            }
        }
    }

    #[test]
    fn matches_brute_force_covariance_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for i in 0..20 {
            let (h1, h2) = tilde(7, i, (rng.gen(), rng.gen()));
            let h = [h1, h2];
            let p = 1.0;
            let s = iterative_waterfill((&h1, &h2), p, 1.0, 1e-9).unwrap();
            // Q2 = V diag(t u, t (1 - u)) V^H over two charts of the
            // eigenvector; user 1 then waterfills against it exactly.
            let oracle = [false, true]
                .map(|flip| {
                    grid_max(
                        |x| best_response_rate(&h, &covariance(x[0] * p, x[1], C64::new(x[2], x[3]), flip), p),
                        &[(0.0, 1.0), (0.5, 1.0), (-2.0, 2.0), (-2.0, 2.0)],
                        13,
                        8,
                    )
                    .unwrap()
                })
                .into_iter()
                .max_by(|a, b| a.value.total_cmp(&b.value))
                .unwrap();
            assert!(oracle.value <= s.sum_rate + 1e-9);
            assert!(s.sum_rate - oracle.value < 1e-3, "{} vs {}", s.sum_rate, oracle.value);
        }
    }

    #[test]
    fn dense_solver() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let x = solve_dense(a, [1.0, 2.0, 3.0]).unwrap();
        for r in 0..3 {
            let lhs: f64 = (0..3).map(|c| a[r][c] * x[c]).sum();
            assert!((lhs - [1.0, 2.0, 3.0][r]).abs() < 1e-14);
        }
        assert!(solve_dense([[0.0, 0.0], [0.0, 0.0]], [1.0, 1.0]).is_none());
    }
}
