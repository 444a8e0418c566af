//! The classical pure-death process `ṗ_n = −n p_n + (n+1) p_{n+1}`, the
//! diagonal shadow of the attenuator, and an energy-constrained minimizer of
//! its entropy production rate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::fock::shannon_entropy;
use crate::gaussian::{g_entropy, g_inverse, g_prime};

pub const PMF_SUM_TOL: f64 = 1e-12;

/// Largest geometric tail mass allowed beyond the truncation level.
pub const GEOMETRIC_TAIL_TOL: f64 = 1e-10;

/// A probability mass function on `{0, …, K}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPMF {
    probs: Vec<f64>,
}

impl ClassicalPMF {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDimension { dim: 0, min: 1 });
        }
        if let Some((i, &x)) = probs.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidState(format!("probability {x} at level {i}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidArgument("weights must have positive finite sum".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn point_mass(n: usize, k: usize) -> Result<Self> {
        if n > k {
            return Err(Error::OutOfRange { index: n, dim: k + 1 });
        }
        let mut p = vec![0.0; k + 1];
        p[n] = 1.0;
        Self::new(p)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Truncation level `K`.
    pub fn max_level(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.probs)
    }

    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::DimensionMismatch { left: self.probs.len(), right: other.probs.len() });
        }
        Ok(0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }
}

/// Geometric distribution with mean `n`, `p_k ∝ r^k` with `r = n/(n+1)`,
/// renormalized on `{0, …, K}`.
pub fn geometric_pmf(n: f64, k: usize) -> Result<ClassicalPMF> {
    ensure_finite("mean", n)?;
    if n < 0.0 {
        return Err(Error::InvalidArgument(format!("mean must be >= 0, got {n}")));
    }
    let r = n / (n + 1.0);
    let tail = r.powi(k as i32 + 1);
    if tail > GEOMETRIC_TAIL_TOL {
        let need = (GEOMETRIC_TAIL_TOL.ln() / r.ln()).ceil() as usize;
        return Err(Error::Truncation {
            edge_mass: tail,
            tolerance: GEOMETRIC_TAIL_TOL,
            suggested_dim: Some(need),
        });
    }
    let weights: Vec<f64> = (0..=k).map(|j| r.powi(j as i32)).collect();
    ClassicalPMF::from_weights(&weights)
}

/// `(C₋p)_n = −n p_n + (n+1) p_{n+1}`, with no inflow into level `K`.
/// Conserves total probability exactly.
pub fn death_generator(p: &ClassicalPMF) -> Vec<f64> {
    death_apply(&p.probs)
}

fn death_apply(p: &[f64]) -> Vec<f64> {
    let k = p.len() - 1;
    (0..=k)
        .map(|n| {
            let inflow = if n < k { (n + 1) as f64 * p[n + 1] } else { 0.0 };
            inflow - n as f64 * p[n]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeathOptions {
    pub step: f64,
    pub negativity_tolerance: f64,
    pub sum_tolerance: f64,
}

impl Default for DeathOptions {
    fn default() -> Self {
        Self { step: 1e-3, negativity_tolerance: 1e-10, sum_tolerance: 1e-10 }
    }
}

/// RK4 integration of `ṗ = C₋p`. Negativity and normalization are checked,
/// never projected away.
pub fn death_evolve(p: &ClassicalPMF, t: f64, opts: &DeathOptions) -> Result<ClassicalPMF> {
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    if !(opts.step > 0.0 && opts.step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be > 0, got {}", opts.step)));
    }
    if t == 0.0 {
        return Ok(p.clone());
    }
    let k = p.max_level().max(1) as f64;
    let max_dt = opts.step.min(2.5 / k);
    let steps = (t / max_dt).ceil() as usize;
    let dt = t / steps as f64;
    let mut x = p.probs.clone();
    let axpy =
        |x: &[f64], a: f64, y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(u, v)| u + a * v).collect() };
    for _ in 0..steps {
        let k1 = death_apply(&x);
        let k2 = death_apply(&axpy(&x, dt / 2.0, &k1));
        let k3 = death_apply(&axpy(&x, dt / 2.0, &k2));
        let k4 = death_apply(&axpy(&x, dt, &k3));
        for i in 0..x.len() {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let worst = x.iter().cloned().fold(f64::INFINITY, f64::min);
        if worst < -opts.negativity_tolerance {
            return Err(Error::StepSize { drift: -worst, step: dt });
        }
    }
    let total: f64 = x.iter().sum();
    if (total - 1.0).abs() > opts.sum_tolerance {
        return Err(Error::StepSize { drift: (total - 1.0).abs(), step: dt });
    }
    // Round-off below the negativity tolerance is cleared before validation.
    for v in x.iter_mut() {
        *v = v.max(0.0);
    }
    let total: f64 = x.iter().sum();
    ClassicalPMF::new(x.into_iter().map(|v| v / total).collect())
}

/// `J₋(p) = 2 dH/dt = −2 Σ_n (C₋p)_n log p_n`. Divergent when probability
/// flows into an empty level.
pub fn death_entropy_rate(p: &ClassicalPMF) -> Result<f64> {
    rate_of(&p.probs)
}

fn rate_of(p: &[f64]) -> Result<f64> {
    let flow = death_apply(p);
    let mut acc = 0.0;
    for (n, (&c, &x)) in flow.iter().zip(p).enumerate() {
        if x > 0.0 {
            acc += c * x.ln();
        } else if c > 0.0 {
            return Err(Error::Divergent(format!(
                "probability flows into empty level {n}; entropy rate is +inf"
            )));
        }
    }
    Ok(-2.0 * acc)
}

/// `∂J₋/∂p_m = −2[−m log p_m + m log p_{m−1} + (C₋p)_m / p_m]` on the interior.
fn rate_gradient(p: &[f64]) -> Vec<f64> {
    let flow = death_apply(p);
    (0..p.len())
        .map(|m| {
            let mf = m as f64;
            let back = if m > 0 { mf * p[m - 1].ln() } else { 0.0 };
            -2.0 * (-mf * p[m].ln() + back + flow[m] / p[m])
        })
        .collect()
}

/// `f(S) = −g⁻¹(S) g'(g⁻¹(S))`, half the attenuator rate of the thermal
/// state with entropy `S`.
pub fn f_of_entropy(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("entropy must be > 0, got {s}")));
    }
    let n = g_inverse(s)?;
    Ok(-n * g_prime(n))
}

/// `F(S₀) = inf_{n ≥ g⁻¹(S₀)} (−μ² n g'(n) + ζ g(n))`.
pub fn big_f(s0: f64, mu2: f64, zeta: f64) -> Result<f64> {
    Ok(big_f_argmin(s0, mu2, zeta)?.1)
}

/// Minimizer and value of the infimum in [`big_f`]: a log-spaced scan
/// locates the basin, golden section refines it, and the left endpoint is
/// always a candidate.
pub fn big_f_argmin(s0: f64, mu2: f64, zeta: f64) -> Result<(f64, f64)> {
    ensure_finite("mu2", mu2)?;
    ensure_finite("zeta", zeta)?;
    if !(s0 > 0.0 && mu2 > 0.0 && zeta > 0.0) {
        return Err(Error::InvalidArgument(format!("need S0, mu2, zeta > 0, got {s0}, {mu2}, {zeta}")));
    }
    let phi = |n: f64| -mu2 * n * g_prime(n) + zeta * g_entropy(n);
    let n0 = g_inverse(s0)?;
    // φ grows like ζ log n, so the infimum lies within a few decades of n0.
    let hi = (n0 * 1e6).max(1e6);
    let grid = 600;
    let ratio = (hi / n0).ln() / grid as f64;
    let at = |k: usize| n0 * (ratio * k as f64).exp();
    let mut best = (n0, phi(n0));
    let mut best_k = 0;
    for k in 1..=grid {
        let v = phi(at(k));
        if v < best.1 {
            best = (at(k), v);
            best_k = k;
        }
    }
    if best_k > 0 {
        let (mut a, mut b) = (at(best_k - 1), at((best_k + 1).min(grid)));
        let gr = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - gr * (b - a);
        let mut d = a + gr * (b - a);
        for _ in 0..200 {
            if phi(c) < phi(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - gr * (b - a);
            d = a + gr * (b - a);
            if b - a < 1e-13 * b {
                break;
            }
        }
        let m = 0.5 * (a + b);
        if phi(m) < best.1 {
            best = (m, phi(m));
        }
    }
    Ok(best)
}

/// Controls for [`min_entropy_rate_constrained`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Smallest probability kept on any level.
    pub floor: f64,
    /// Stationarity threshold: stop when a unit scaled step moves `p` by
    /// less than this (ℓ∞).
    pub step_tolerance: f64,
    /// Allowed undershoot below the closed-form bound before reporting.
    pub slack: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { starts: 8, seed: 0, max_iterations: 20_000, floor: 1e-12, step_tolerance: 1e-10, slack: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub label: String,
    pub initial_rate: f64,
    pub rate: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMinimum {
    pub p_star: ClassicalPMF,
    pub j_star: f64,
    /// `−2n log(1 + 1/n)`.
    pub bound: f64,
    pub starts: Vec<StartOutcome>,
}

/// Projection onto `{p ≥ floor, Σp = 1, Σ k p_k ≤ n}` in the metric
/// `Σ (p_k − y_k)² / w_k`. The KKT conditions give
/// `p_k = max(floor, y_k − w_k(α + βk))` with `β ≥ 0`. For fixed `β` the
/// normalization is piecewise linear in `α` and solved exactly over sorted
/// breakpoints; `β` is found by bisection on the mean.
fn project(y: &[f64], w: &[f64], n: f64, floor: f64) -> Vec<f64> {
    let len = y.len();
    let at = |alpha: f64, beta: f64| -> Vec<f64> {
        (0..len).map(|k| (y[k] - w[k] * (alpha + beta * k as f64)).max(floor)).collect()
    };
    let solve = |beta: f64| -> Vec<f64> {
        let shifted: Vec<f64> = (0..len).map(|k| y[k] - w[k] * beta * k as f64).collect();
        // Entry k sits above the floor iff α < (shifted_k − floor)/w_k.
        let mut order: Vec<usize> = (0..len).collect();
        let brk = |k: usize| (shifted[k] - floor) / w[k];
        order.sort_by(|&a, &b| brk(b).total_cmp(&brk(a)));
        let (mut sy, mut sw) = (0.0, 0.0);
        let mut alpha = brk(order[0]);
        for (j, &k) in order.iter().enumerate() {
            sy += shifted[k];
            sw += w[k];
            let pinned = floor * (len - j - 1) as f64;
            let a = (sy + pinned - 1.0) / sw;
            let next = order.get(j + 1).map_or(f64::NEG_INFINITY, |&m| brk(m));
            if a >= next {
                alpha = a;
                break;
            }
        }
        let mut p = at(alpha, beta);
        // Park the rounding residual on the largest entry so floored
        // entries stay exactly at the floor.
        let residual = 1.0 - p.iter().sum::<f64>();
        let top = (0..len).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap_or(0);
        p[top] += residual;
        p
    };
    let mean = |p: &[f64]| p.iter().enumerate().map(|(k, v)| k as f64 * v).sum::<f64>();
    let p0 = solve(0.0);
    if mean(&p0) <= n {
        return p0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while mean(&solve(hi)) > n && hi < 1e300 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(&solve(mid)) > n {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    solve(hi)
}

/// One scaled projected-gradient trial: metric `diag(p)`, step `s`.
fn trial_point(p: &[f64], grad: &[f64], s: f64, n: f64, floor: f64) -> Vec<f64> {
    let y: Vec<f64> = p.iter().zip(grad).map(|(x, g)| x - s * x * g).collect();
    project(&y, p, n, floor)
}

/// Consecutive iterations without relative progress above machine scale
/// after which a run counts as converged.
const STALL_ITERATIONS: usize = 5;

fn descend(start: Vec<f64>, n: f64, opts: &MinimizeOptions) -> Result<(Vec<f64>, f64, usize, bool)> {
    let ones = vec![1.0; start.len()];
    let mut p = project(&start, &ones, n, opts.floor);
    let mut value = rate_of(&p)?;
    let mut step = 1.0;
    let mut stalled = 0;
    for it in 0..opts.max_iterations {
        let grad = rate_gradient(&p);
        // Stationarity: the unit scaled step no longer moves the iterate.
        let probe = trial_point(&p, &grad, 1.0, n, opts.floor);
        let residual = p.iter().zip(&probe).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if residual < opts.step_tolerance {
            return Ok((p, value, it, true));
        }
        let mut accepted = None;
        for _ in 0..80 {
            let q = trial_point(&p, &grad, step, n, opts.floor);
            let v = rate_of(&q)?;
            let decrease: f64 = p.iter().zip(&q).zip(&grad).map(|((a, b), g)| g * (a - b)).sum();
            if v <= value - 1e-4 * decrease {
                accepted = Some((q, v));
                break;
            }
            step *= 0.5;
        }
        let Some((q, v)) = accepted else {
            // No descent left at working precision.
            return Ok((p, value, it, true));
        };
        if value - v <= 1e-14 * v.abs().max(1.0) {
            stalled += 1;
        } else {
            stalled = 0;
        }
        p = q;
        value = v;
        if stalled >= STALL_ITERATIONS {
            return Ok((p, value, it + 1, true));
        }
        step = (step * 2.0).min(1e3);
    }
    Ok((p, value, opts.max_iterations, false))
}

/// Minimizes `J₋(p)` over strictly positive PMFs on `{0, …, K}` with
/// `E_p[N] ≤ n` by projected gradient descent from several starts: the
/// geometric distribution itself, a point-like start at the mean and random
/// interior points. Starts run in parallel; the best is returned.
pub fn min_entropy_rate_constrained(n: f64, k: usize, opts: &MinimizeOptions) -> Result<RateMinimum> {
    ensure_finite("n", n)?;
    if n <= 0.0 {
        return Err(Error::InvalidArgument(format!("mean bound must be > 0, got {n}")));
    }
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("need at least one start".into()));
    }
    let geometric = geometric_pmf(n, k)?;
    let mut starts: Vec<(String, Vec<f64>)> = vec![("geometric".into(), geometric.probs.clone())];
    if opts.starts > 1 {
        // Two-point mixture around the mean.
        let lo = n.floor() as usize;
        let mut w = vec![opts.floor; k + 1];
        let frac = n - lo as f64;
        w[lo.min(k)] += 1.0 - frac;
        w[(lo + 1).min(k)] += frac;
        starts.push(("two-point".into(), w));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for s in 2..opts.starts {
        let w: Vec<f64> = (0..=k).map(|_| Exp1.sample(&mut rng)).collect();
        starts.push((format!("random-{}", s - 2), w));
    }
    // (label, initial rate, p, rate, iterations, converged)
    type Run = (String, f64, Vec<f64>, f64, usize, bool);
    let outcomes: Vec<Result<Run>> = starts
        .into_par_iter()
        .map(|(label, w)| {
            let total: f64 = w.iter().sum();
            let y: Vec<f64> = w.iter().map(|v| v / total).collect();
            let init = rate_of(&project(&y, &vec![1.0; y.len()], n, opts.floor))?;
            let (p, v, it, conv) = descend(y, n, opts)?;
            Ok((label, init, p, v, it, conv))
        })
        .collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut records = Vec::with_capacity(outcomes.len());
    for out in outcomes {
        let (label, init, p, v, it, conv) = out?;
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((p, v));
        }
        records.push(StartOutcome { label, initial_rate: init, rate: v, iterations: it, converged: conv });
    }
    let (p, j_star) = best.ok_or_else(|| Error::Optimizer("no start produced a value".into()))?;
    let bound = -2.0 * n * g_prime(n);
    if j_star < bound - opts.slack {
        return Err(Error::Optimizer(format!(
            "rate {j_star} undercuts the bound {bound} by more than {}",
            opts.slack
        )));
    }
    let total: f64 = p.iter().sum();
    Ok(RateMinimum {
        p_star: ClassicalPMF::new(p.into_iter().map(|v| v / total).collect())?,
        j_star,
        bound,
        starts: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn generator_examples() {
        let d0 = ClassicalPMF::point_mass(0, 5).unwrap();
        assert!(death_generator(&d0).iter().all(|&x| x == 0.0));
        let d1 = ClassicalPMF::point_mass(1, 5).unwrap();
        assert_eq!(death_generator(&d1), vec![1.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        let g = geometric_pmf(1.5, 80).unwrap();
        assert!(death_generator(&g).iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn geometric_properties() {
        let g = geometric_pmf(1.0, 60).unwrap();
        for (k, p) in g.probs().iter().take(5).enumerate() {
            assert_relative_eq!(*p, 0.5f64.powi(k as i32 + 1), epsilon = 1e-15);
        }
        for n in [0.5, 1.0, 2.5, 4.0] {
            let g = geometric_pmf(n, 512).unwrap();
            assert!((g.mean() - n).abs() < 1e-10);
            assert_relative_eq!(g.entropy(), g_entropy(n), epsilon = 1e-9);
        }
        assert!(matches!(geometric_pmf(5.0, 20), Err(Error::Truncation { .. })));
    }

    #[test]
    fn evolution_of_geometric() {
        let p = geometric_pmf(1.0, 256).unwrap();
        let t: f64 = 0.3;
        let out = death_evolve(&p, t, &DeathOptions::default()).unwrap();
        let target = geometric_pmf((-t).exp(), 256).unwrap();
        let diff = out.probs().iter().zip(target.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");
        assert!((out.mean() - (-t).exp()).abs() < 1e-8);
        assert_eq!(death_evolve(&p, 0.0, &DeathOptions::default()).unwrap(), p);
    }

    #[test]
    fn mean_decays_exponentially_from_any_start() {
        let p = ClassicalPMF::from_weights(&[0.1, 0.0, 0.3, 0.2, 0.0, 0.4, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let out = death_evolve(&p, 0.7, &DeathOptions::default()).unwrap();
        assert!((out.mean() - (-0.7f64).exp() * p.mean()).abs() < 1e-8);
    }

    #[test]
    fn entropy_rate_closed_forms() {
        assert_relative_eq!(
            death_entropy_rate(&geometric_pmf(1.0, 128).unwrap()).unwrap(),
            -2.0 * LN_2,
            epsilon = 1e-10
        );
        for n in [0.5, 2.0] {
            let r = death_entropy_rate(&geometric_pmf(n, 256).unwrap()).unwrap();
            assert!((r + 2.0 * n * (1.0 + 1.0 / n).ln()).abs() < 1e-8);
        }
        let gap = ClassicalPMF::from_weights(&[0.5, 0.0, 0.5]).unwrap();
        assert!(matches!(death_entropy_rate(&gap), Err(Error::Divergent(_))));
        let top_empty = ClassicalPMF::from_weights(&[0.5, 0.5, 0.0]).unwrap();
        assert!(death_entropy_rate(&top_empty).unwrap().is_finite());
    }

    #[test]
    fn entropy_rate_matches_finite_difference() {
        let p = ClassicalPMF::from_weights(
            &(0..40).map(|k| (1.0 + (k as f64).sin().abs()) * 0.8f64.powi(k)).collect::<Vec<_>>(),
        )
        .unwrap();
        let h = 1e-5;
        let opts = DeathOptions { step: 1e-6, ..Default::default() };
        let later = death_evolve(&p, h, &opts).unwrap();
        let fd = 2.0 * (later.entropy() - p.entropy()) / h;
        assert!((fd - death_entropy_rate(&p).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn gradient_matches_difference_quotients() {
        let p: Vec<f64> = ClassicalPMF::from_weights(&[0.3, 0.25, 0.2, 0.15, 0.1]).unwrap().probs;
        let g = rate_gradient(&p);
        for m in 0..p.len() {
            let h = 1e-7;
            let mut up = p.clone();
            up[m] += h;
            let mut dn = p.clone();
            dn[m] -= h;
            let fd = (rate_of(&up).unwrap() - rate_of(&dn).unwrap()) / (2.0 * h);
            assert_relative_eq!(g[m], fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn projection_is_feasible_and_idempotent() {
        let y = vec![0.9, -0.2, 0.4, 0.05, 0.3, 0.0];
        let w = vec![1.0; y.len()];
        let p = project(&y, &w, 1.0, 1e-12);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&v| v >= 1e-12));
        let mean: f64 = p.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
        assert!(mean <= 1.0 + 1e-9);
        let again = project(&p, &w, 1.0, 1e-12);
        assert!(p.iter().zip(&again).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn f_and_big_f() {
        assert_relative_eq!(f_of_entropy(g_entropy(1.0)).unwrap(), -LN_2, epsilon = 1e-10);
        let mut last = f64::NEG_INFINITY;
        for i in 0..40 {
            let s0 = 0.6 + 0.1 * i as f64;
            let v = big_f(s0, 2.0, 1.0).unwrap();
            assert!(v >= last - 1e-12, "F not monotone at {s0}");
            last = v;
        }
        // Brute-force oracle for the infimum.
        let s0 = 1.0;
        let n0 = g_inverse(s0).unwrap();
        let brute = (0..200_000)
            .map(|k| n0 + k as f64 * 1e-4)
            .map(|n| -2.0 * n * g_prime(n) + g_entropy(n))
            .fold(f64::INFINITY, f64::min);
        assert!((big_f(s0, 2.0, 1.0).unwrap() - brute).abs() < 1e-7);
    }

    #[test]
    fn constrained_minimum_is_geometric() {
        let opts = MinimizeOptions::default();
        let res = min_entropy_rate_constrained(1.0, 64, &opts).unwrap();
        assert!((res.j_star + 2.0 * LN_2).abs() < 1e-3, "{}", res.j_star);
        let geo = geometric_pmf(1.0, 64).unwrap();
        assert!(res.p_star.total_variation(&geo).unwrap() < 1e-2);
        let geo_rate = res.starts[0].rate;
        assert!(res.starts.iter().all(|s| s.rate >= geo_rate - 1e-6));
        let half = min_entropy_rate_constrained(0.5, 64, &opts).unwrap();
        assert!((half.j_star + 3f64.ln()).abs() < 1e-3);
    }
}
