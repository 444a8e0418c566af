//! Closed-form calculus for one-mode Gaussian states and the classical
//! Ornstein-Uhlenbeck process.
//!
//! Covariance matrices use `M_jk = tr(ρ{R_j, R_k})` with `R = (Q, P)` centered,
//! so the vacuum has `M = I` and a thermal state `M = (2n̄+1) I`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::semigroups::SemigroupKind;

/// Entropy of the thermal state with mean photon number `n`:
/// `(n+1) log(n+1) − n log n`.
pub fn g_entropy(n: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    n.ln_1p() + n * (1.0 / n).ln_1p()
}

/// `g'(n) = log(1 + 1/n)`; infinite at zero.
pub fn g_prime(n: f64) -> f64 {
    if n <= 0.0 {
        f64::INFINITY
    } else {
        (1.0 / n).ln_1p()
    }
}

pub const G_INVERSE_TOL: f64 = 1e-12;

/// Inverse of [`g_entropy`] on `[0, ∞)`, by Newton's method safeguarded with
/// a bisection bracket.
pub fn g_inverse(s: f64) -> Result<f64> {
    ensure_finite("entropy", s)?;
    if s < 0.0 {
        return Err(Error::InvalidArgument(format!("entropy must be >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while g_entropy(hi) < s {
        lo = hi;
        hi *= 2.0;
    }
    let mut n = 0.5 * (lo + hi);
    for _ in 0..200 {
        let r = g_entropy(n) - s;
        if r > 0.0 {
            hi = n;
        } else {
            lo = n;
        }
        let newton = n - r / g_prime(n);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - n).abs() <= G_INVERSE_TOL * n.max(1.0) || hi - lo <= G_INVERSE_TOL * hi {
            return Ok(next);
        }
        n = next;
    }
    Ok(n)
}

fn positive_photon(n: f64) -> Result<()> {
    ensure_finite("mean photon number", n)?;
    if n <= 0.0 {
        return Err(Error::Divergent(format!("thermal quantity diverges at mean photon number {n}")));
    }
    Ok(())
}

/// `J(ω_n) = 4π log((n+1)/n)`.
pub fn thermal_fisher_closed(n: f64) -> Result<f64> {
    positive_photon(n)?;
    Ok(4.0 * PI * g_prime(n))
}

/// `N(ω_n) = (n+1)^{n+1} / n^n`.
pub fn thermal_entropy_power(n: f64) -> f64 {
    g_entropy(n).exp()
}

/// Slope of `[J(ω_{n+2πt})/2]⁻¹` at `t = 0`: `1 / (n(n+1) log²(1+1/n))`.
/// The Fisher isoperimetric inequality says it is at least 1.
pub fn fisher_isoperimetric_ratio(n: f64) -> Result<f64> {
    positive_photon(n)?;
    let l = g_prime(n);
    Ok(1.0 / (n * (n + 1.0) * l * l))
}

/// `J(ω_n)·N(ω_n)`, bounded below by `4πe` and tending to it as `n → ∞`.
pub fn thermal_isoperimetric_product(n: f64) -> Result<f64> {
    Ok(thermal_fisher_closed(n)? * thermal_entropy_power(n))
}

pub const FOUR_PI_E: f64 = 4.0 * PI * E;

/// A one-mode Gaussian state through its first moments and the normal form
/// of its covariance: `M = κ O diag(z², 1/z²) Oᵀ` with `O` the rotation by
/// `angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianStateSpec {
    pub mean: [f64; 2],
    /// Symplectic eigenvalue `√det M`.
    pub kappa: f64,
    /// Squeezing parameter.
    pub z: f64,
    pub angle: f64,
}

impl GaussianStateSpec {
    pub fn new(mean: [f64; 2], kappa: f64, z: f64, angle: f64) -> Result<Self> {
        let s = Self { mean, kappa, z, angle };
        s.validate()?;
        Ok(s)
    }

    pub fn thermal(n: f64) -> Result<Self> {
        Self::new([0.0, 0.0], 2.0 * n + 1.0, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("mean", self.mean[0]),
            ("mean", self.mean[1]),
            ("kappa", self.kappa),
            ("z", self.z),
            ("angle", self.angle),
        ] {
            ensure_finite(name, x)?;
        }
        // Rounding in `from_covariance` can land a hair below the bound.
        if self.kappa < 1.0 - 1e-12 {
            return Err(Error::InvalidState(format!(
                "symplectic eigenvalue {} violates the uncertainty bound",
                self.kappa
            )));
        }
        if self.z < 1.0 {
            return Err(Error::InvalidArgument(format!("squeezing z must be >= 1, got {}", self.z)));
        }
        Ok(())
    }

    /// Reads `κ`, `z` and the squeezing axis off a symmetric covariance.
    pub fn from_covariance(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = cov;
        if (b - c).abs() > 1e-12 * (a.abs() + d.abs()).max(1.0) {
            return Err(Error::InvalidArgument("covariance must be symmetric".into()));
        }
        let det = a * d - b * b;
        if !(a > 0.0 && det > 0.0) {
            return Err(Error::InvalidState("covariance must be positive definite".into()));
        }
        let half_trace = 0.5 * (a + d);
        let gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let (big, small) = (half_trace + gap, det / (half_trace + gap));
        let kappa = det.sqrt();
        let z = (big / small).sqrt().sqrt().max(1.0);
        let angle = 0.5 * (2.0 * b).atan2(a - d);
        let spec = Self { mean, kappa: kappa.max(1.0), z, angle };
        spec.validate()?;
        Ok(spec)
    }

    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        let big = self.kappa * self.z * self.z;
        let small = self.kappa / (self.z * self.z);
        [
            [big * c * c + small * s * s, (big - small) * c * s],
            [(big - small) * c * s, big * s * s + small * c * c],
        ]
    }

    /// Mean photon number of the thermal state with the same entropy.
    pub fn symplectic_photon(&self) -> f64 {
        0.5 * (self.kappa - 1.0)
    }

    pub fn mean_photon(&self) -> f64 {
        let trace = self.kappa * (self.z * self.z + 1.0 / (self.z * self.z));
        (trace - 2.0) / 4.0 + 0.5 * (self.mean[0].powi(2) + self.mean[1].powi(2))
    }

    pub fn entropy(&self) -> f64 {
        g_entropy(self.symplectic_photon())
    }
}

/// Entropy production rates `(J₋, J₊)` of a Gaussian state:
/// `(½(z² + 1/z²) ∓ κ) log((κ+1)/(κ−1))`.
pub fn j_pm_gaussian(kappa: f64, z: f64) -> Result<(f64, f64)> {
    ensure_finite("kappa", kappa)?;
    ensure_finite("z", z)?;
    if kappa <= 1.0 {
        return Err(Error::Divergent(format!(
            "entropy rate of a pure Gaussian state (kappa = {kappa}) is infinite"
        )));
    }
    if z < 1.0 {
        return Err(Error::InvalidArgument(format!("squeezing z must be >= 1, got {z}")));
    }
    let spread = 0.5 * (z * z + 1.0 / (z * z));
    let l = (2.0 / (kappa - 1.0)).ln_1p();
    Ok(((spread - kappa) * l, (spread + kappa) * l))
}

/// Coefficients `(c₁, c₂, mean scale)` with `M(t) = c₁ M + c₂ I` and first
/// moments scaled by the third entry.
fn covariance_map(kind: SemigroupKind, t: f64) -> (f64, f64, f64) {
    match kind {
        SemigroupKind::Heat => (1.0, 4.0 * PI * t, 1.0),
        SemigroupKind::Attenuator => ((-t).exp(), -(-t).exp_m1(), (-0.5 * t).exp()),
        SemigroupKind::Amplifier => (t.exp(), t.exp_m1(), (0.5 * t).exp()),
        SemigroupKind::Qou { mu, lambda } => {
            let (mu2, la2) = (mu * mu, lambda * lambda);
            let zeta = mu2 - la2;
            let decay = (-zeta * t).exp();
            (decay, (1.0 - decay) * (mu2 + la2) / zeta, (-0.5 * zeta * t).exp())
        }
    }
}

/// Closed-form action of a semigroup on a Gaussian state.
pub fn gaussian_evolve(spec: &GaussianStateSpec, kind: SemigroupKind, t: f64) -> Result<GaussianStateSpec> {
    spec.validate()?;
    kind.validate()?;
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    let (c1, c2, scale) = covariance_map(kind, t);
    let m = spec.covariance();
    let cov = [[c1 * m[0][0] + c2, c1 * m[0][1]], [c1 * m[1][0], c1 * m[1][1] + c2]];
    let mean = [scale * spec.mean[0], scale * spec.mean[1]];
    let mut out = GaussianStateSpec::from_covariance(mean, cov)?;
    if out.z == 1.0 {
        out.angle = spec.angle;
    }
    Ok(out)
}

fn qou_params(mu: f64, lambda: f64) -> Result<(f64, f64, f64, f64)> {
    SemigroupKind::qou(mu, lambda)?;
    let (mu2, la2) = (mu * mu, lambda * lambda);
    Ok((mu2, la2, mu2 - la2, la2 / mu2))
}

/// `D(ρ‖σ_{μ,λ}) = −S − n log ν − log(1−ν)`, `ν = λ²/μ²`, from the entropy
/// and mean photon number of `ρ`.
pub fn relent_to_qou_fixed(entropy: f64, n: f64, mu: f64, lambda: f64) -> Result<f64> {
    let (_, _, _, nu) = qou_params(mu, lambda)?;
    Ok(-entropy - nu.ln() * n - (-nu).ln_1p())
}

/// `h(n) = μ² log(n+1) − λ² log n + λ² log λ² − μ² log μ² + ζ log ζ`, the
/// margin `−ζD − dD/dt` of the qOU semigroup on `ω_n`.
pub fn h_function(n: f64, mu: f64, lambda: f64) -> Result<f64> {
    let (mu2, la2, zeta, _) = qou_params(mu, lambda)?;
    positive_photon(n)?;
    Ok(mu2 * n.ln_1p() - la2 * n.ln() + la2 * la2.ln() - mu2 * mu2.ln() + zeta * zeta.ln())
}

/// Stationary point `n* = λ²/ζ` of [`h_function`] and its value there.
pub fn h_minimize(mu: f64, lambda: f64) -> Result<(f64, f64)> {
    let (_, la2, zeta, _) = qou_params(mu, lambda)?;
    let n_star = la2 / zeta;
    Ok((n_star, h_function(n_star, mu, lambda)?))
}

/// Exact `d/dt D(e^{tL}ω_n ‖ σ_{μ,λ})` at `t = 0`, from the photon-number
/// flow `ṅ = λ² − ζn` of thermal states.
pub fn thermal_relent_rate(n: f64, mu: f64, lambda: f64) -> Result<f64> {
    let (_, la2, zeta, nu) = qou_params(mu, lambda)?;
    positive_photon(n)?;
    Ok(-(g_prime(n) + nu.ln()) * (la2 - zeta * n))
}

/// `−ζD − dD/dt` for a Gaussian state, assembled from its closed-form
/// entropy rates. Nonnegative for every Gaussian state.
pub fn gaussian_decay_margin(spec: &GaussianStateSpec, mu: f64, lambda: f64) -> Result<f64> {
    let (mu2, la2, zeta, nu) = qou_params(mu, lambda)?;
    let (jm, jp) = j_pm_gaussian(spec.kappa, spec.z)?;
    Ok(mu2 / 2.0 * jm + la2 / 2.0 * jp + zeta * spec.entropy() + la2 * nu.ln() + zeta * (-nu).ln_1p())
}

/// `−(ζ+ε)D(ω_n‖σ) − dD/dt = h(n) + ε(g(n) + n log ν + log(1−ν))`.
pub fn strengthened_margin(n: f64, mu: f64, lambda: f64, epsilon: f64) -> Result<f64> {
    let (_, _, _, nu) = qou_params(mu, lambda)?;
    Ok(h_function(n, mu, lambda)? + epsilon * (g_entropy(n) + n * nu.ln() + (-nu).ln_1p()))
}

pub const WITNESS_THRESHOLD: f64 = -1e-9;

/// Smallest `n` on a log grid over `[1e-3, n_max]` (64 points per decade)
/// where the strengthened rate `ζ + ε` fails on `ω_n`, if any.
pub fn zeta_optimality_witness(mu: f64, lambda: f64, epsilon: f64, n_max: f64) -> Result<Option<f64>> {
    ensure_finite("epsilon", epsilon)?;
    if epsilon < 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
    }
    if !(n_max > 1e-3 && n_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("n_max must exceed 1e-3, got {n_max}")));
    }
    let lo = 1e-3f64.log10();
    let steps = ((n_max.log10() - lo) * 64.0).ceil() as usize;
    for k in 0..=steps {
        let n = 10f64.powf(lo + (n_max.log10() - lo) * k as f64 / steps as f64);
        if strengthened_margin(n, mu, lambda, epsilon)? < WITNESS_THRESHOLD {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalOUParams {
    pub theta: f64,
    pub sigma2: f64,
}

impl ClassicalOUParams {
    pub fn new(theta: f64, sigma2: f64) -> Result<Self> {
        ensure_finite("theta", theta)?;
        ensure_finite("sigma2", sigma2)?;
        if !(theta > 0.0 && sigma2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cOU needs theta > 0 and sigma2 > 0, got {theta}, {sigma2}"
            )));
        }
        Ok(Self { theta, sigma2 })
    }

    pub fn stationary_variance(&self) -> f64 {
        self.sigma2 / (2.0 * self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouStep {
    pub variance: f64,
    /// `D(X_t ‖ Z)` against the stationary Gaussian.
    pub relent: f64,
    /// `d/dt D(X_t ‖ Z)`.
    pub relent_rate: f64,
    /// `−2θ D − dD/dt`.
    pub rate_margin: f64,
}

/// `x − 1 − log x` without cancellation near `x = 1`.
fn log_gap(x: f64) -> f64 {
    let u = x - 1.0;
    u - u.ln_1p()
}

/// Centered Gaussian input of variance `var0` run for time `t` under the
/// classical Ornstein-Uhlenbeck process.
pub fn cou_step(params: &ClassicalOUParams, var0: f64, t: f64) -> Result<CouStep> {
    let p = ClassicalOUParams::new(params.theta, params.sigma2)?;
    ensure_finite("var0", var0)?;
    ensure_finite("t", t)?;
    if var0 <= 0.0 || t < 0.0 {
        return Err(Error::InvalidArgument(format!("need var0 > 0 and t >= 0, got {var0}, {t}")));
    }
    let s = p.stationary_variance();
    let decay = (-2.0 * p.theta * t).exp();
    let variance = decay * var0 + s * (1.0 - decay);
    // With x = s/v: D = ½(1/x − 1 + log x), dD/dt = −θ(x + 1/x − 2).
    let x = s / variance;
    let relent = 0.5 * log_gap(1.0 / x);
    let relent_rate = -p.theta * (x + 1.0 / x - 2.0);
    Ok(CouStep { variance, relent, relent_rate, rate_margin: p.theta * log_gap(x) })
}

/// Bracketing intervals for the Log-Sobolev-2 constants of the qOU semigroup
/// (`α₂`) and of its classical birth-death process (`α_C`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarboneBounds {
    pub alpha_c_inv: (f64, f64),
    pub alpha2_inv: (f64, f64),
    pub alpha_c: (f64, f64),
    pub alpha2: (f64, f64),
}

pub fn carbone_lsi2_bounds(mu: f64, lambda: f64) -> Result<CarboneBounds> {
    let (mu2, _, _, nu) = qou_params(mu, lambda)?;
    let one_minus = 1.0 - nu;
    let log_inv_nu = -nu.ln();
    let c_lo = log_inv_nu / (5.0 * 5f64.sqrt() * mu2 * one_minus.powf(1.5));
    let c_hi = 255.0 / 4.0 * ((1.0 + 2f64.ln()) * one_minus + log_inv_nu) / (mu2 * one_minus.powi(3));
    let a_hi = 4.0 * (5.0 - one_minus.ln()) / (mu2 * one_minus) + 3.0 * 3f64.ln() * c_hi;
    Ok(CarboneBounds {
        alpha_c_inv: (c_lo, c_hi),
        alpha2_inv: (c_lo, a_hi),
        alpha_c: (1.0 / c_hi, 1.0 / c_lo),
        alpha2: (1.0 / a_hi, 1.0 / c_lo),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{thermal_populations, thermal_state, von_neumann_entropy};
    use crate::semigroups::{entropy_rate, evolve, SolverOptions, DEFAULT_RATE_STEP};
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn g_values_and_inverse() {
        assert_eq!(g_entropy(0.0), 0.0);
        assert_relative_eq!(g_entropy(1.0), 2.0 * LN_2, epsilon = 1e-15);
        // Direct formula at a value where it is well conditioned.
        let n = 3.7f64;
        assert_relative_eq!(g_entropy(n), (n + 1.0) * (n + 1.0).ln() - n * n.ln(), epsilon = 1e-13);
        for n in [1e-8, 0.01, 0.5, 3.7, 40.0, 1e6] {
            let back = g_inverse(g_entropy(n)).unwrap();
            assert!((back - n).abs() <= 1e-10 * n.max(1.0), "{n} -> {back}");
        }
        assert_eq!(g_inverse(0.0).unwrap(), 0.0);
        assert!(g_inverse(-1.0).is_err());
    }

    #[test]
    fn g_prime_matches_difference_quotient() {
        for n in [0.2, 1.0, 7.0] {
            let h = 1e-6;
            let fd = (g_entropy(n + h) - g_entropy(n - h)) / (2.0 * h);
            assert_relative_eq!(g_prime(n), fd, max_relative = 1e-8);
        }
    }

    #[test]
    fn thermal_closed_forms() {
        assert_relative_eq!(thermal_fisher_closed(1.0).unwrap(), 4.0 * PI * LN_2, epsilon = 1e-14);
        assert!(matches!(thermal_fisher_closed(0.0), Err(Error::Divergent(_))));
        let r = fisher_isoperimetric_ratio(100.0).unwrap();
        assert!((r - 1.000008).abs() < 1e-6, "{r}");
        let p = thermal_isoperimetric_product(100.0).unwrap();
        assert!((p / FOUR_PI_E - 1.0).abs() < 0.01 && p >= FOUR_PI_E);
        assert_relative_eq!(thermal_entropy_power(1.0), 4.0, epsilon = 1e-14);
        assert_relative_eq!(thermal_entropy_power(2.0), 27.0 / 4.0, epsilon = 1e-13);
    }

    #[test]
    fn thermal_entropy_matches_fock_state() {
        let rho = thermal_state(1.5, 128).unwrap();
        assert_relative_eq!(von_neumann_entropy(&rho), g_entropy(1.5), epsilon = 1e-9);
    }

    #[test]
    fn covariance_round_trip() {
        let spec = GaussianStateSpec::new([0.3, -1.0], 2.5, 1.7, 0.4).unwrap();
        let back = GaussianStateSpec::from_covariance(spec.mean, spec.covariance()).unwrap();
        assert_relative_eq!(back.kappa, spec.kappa, epsilon = 1e-12);
        assert_relative_eq!(back.z, spec.z, epsilon = 1e-12);
        assert_relative_eq!(back.angle, spec.angle, epsilon = 1e-12);
        let m = spec.covariance();
        assert_relative_eq!((m[0][0] * m[1][1] - m[0][1] * m[1][0]).sqrt(), 2.5, epsilon = 1e-12);
        assert!(GaussianStateSpec::new([0.0; 2], 0.5, 1.0, 0.0).is_err());
        assert!(GaussianStateSpec::new([0.0; 2], 2.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn mean_photon_of_thermal_and_displaced() {
        let spec = GaussianStateSpec::thermal(2.0).unwrap();
        assert_relative_eq!(spec.mean_photon(), 2.0, epsilon = 1e-14);
        let shifted = GaussianStateSpec::new([1.0, 1.0], 1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(shifted.mean_photon(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn j_pm_examples() {
        let (jm, jp) = j_pm_gaussian(3.0, 1.0).unwrap();
        assert_relative_eq!(jm, -2.0 * LN_2, epsilon = 1e-14);
        assert_relative_eq!(jp, 4.0 * LN_2, epsilon = 1e-14);
        assert!(matches!(j_pm_gaussian(1.0, 2.0), Err(Error::Divergent(_))));
        for kappa in [1.1, 3.0, 20.0] {
            let (m1, p1) = j_pm_gaussian(kappa, 1.0).unwrap();
            for z in [1.01, 1.5, 4.0] {
                let (m, p) = j_pm_gaussian(kappa, z).unwrap();
                assert!(m > m1 && p > p1);
            }
        }
    }

    #[test]
    fn j_plus_bounded_below_on_grid() {
        for i in 0..50 {
            let kappa = 1.0 + 10f64.powf(-3.0 + 6.0 * i as f64 / 49.0);
            for j in 0..50 {
                let z = 10f64.powf(2.0 * j as f64 / 49.0);
                let (_, jp) = j_pm_gaussian(kappa, z).unwrap();
                assert!(jp >= 2.0, "kappa={kappa} z={z} J+={jp}");
            }
        }
    }

    #[test]
    fn j_pm_sum_is_thermal_fisher() {
        for n in [0.1, 1.0, 4.0, 30.0] {
            let (jm, jp) = j_pm_gaussian(2.0 * n + 1.0, 1.0).unwrap();
            let target = thermal_fisher_closed(n).unwrap() / (2.0 * PI);
            assert!((jm + jp - target).abs() <= 1e-12 * target.max(1.0));
        }
    }

    #[test]
    fn j_pm_matches_fock_entropy_rates() {
        let opts = SolverOptions::numeric();
        for n in [0.5, 1.0, 2.0] {
            let rho = thermal_state(n, 96).unwrap();
            let (jm, jp) = j_pm_gaussian(2.0 * n + 1.0, 1.0).unwrap();
            let num_m = entropy_rate(&rho, SemigroupKind::Attenuator, DEFAULT_RATE_STEP, &opts).unwrap();
            let num_p = entropy_rate(&rho, SemigroupKind::Amplifier, DEFAULT_RATE_STEP, &opts).unwrap();
            assert_relative_eq!(num_m.value, jm, max_relative = 1e-3);
            assert_relative_eq!(num_p.value, jp, max_relative = 1e-3);
        }
    }

    #[test]
    fn evolve_thermal_photon_maps() {
        let spec = GaussianStateSpec::thermal(1.3).unwrap();
        for (kind, t) in [
            (SemigroupKind::Attenuator, 0.4),
            (SemigroupKind::Amplifier, 0.2),
            (SemigroupKind::Heat, 0.05),
            (SemigroupKind::Qou { mu: 2f64.sqrt(), lambda: 1.0 }, 0.7),
        ] {
            let out = gaussian_evolve(&spec, kind, t).unwrap();
            assert_relative_eq!(out.z, 1.0, epsilon = 1e-12);
            assert_relative_eq!(out.symplectic_photon(), kind.thermal_photon_map(1.3, t), epsilon = 1e-12);
        }
    }

    #[test]
    fn kappa_first_order_expansion() {
        let (kappa, z, t) = (2.2, 1.8, 1e-4);
        let spec = GaussianStateSpec::new([0.0; 2], kappa, z, 0.3).unwrap();
        let spread = 0.5 * (z * z + 1.0 / (z * z));
        let plus = gaussian_evolve(&spec, SemigroupKind::Amplifier, t).unwrap().kappa;
        let minus = gaussian_evolve(&spec, SemigroupKind::Attenuator, t).unwrap().kappa;
        assert!((plus - (kappa + t * (spread + kappa))).abs() < 10.0 * t * t);
        assert!((minus - (kappa + t * (spread - kappa))).abs() < 10.0 * t * t);
    }

    #[test]
    fn entropy_rate_from_covariance_flow() {
        // 2 d/dt g((κ(t)−1)/2) by central differences reproduces J± off z = 1.
        let spec = GaussianStateSpec::new([0.0; 2], 1.9, 1.4, 1.1).unwrap();
        let (jm, jp) = j_pm_gaussian(spec.kappa, spec.z).unwrap();
        let h = 1e-5;
        let s0 = spec.entropy();
        for (kind, target) in [(SemigroupKind::Attenuator, jm), (SemigroupKind::Amplifier, jp)] {
            let s1 = gaussian_evolve(&spec, kind, h).unwrap().entropy();
            let s2 = gaussian_evolve(&spec, kind, 2.0 * h).unwrap().entropy();
            let d = (-3.0 * s0 + 4.0 * s1 - s2) / (2.0 * h);
            assert_relative_eq!(2.0 * d, target, max_relative = 1e-6);
        }
    }

    #[test]
    fn heat_closed_form_matches_fock_evolution() {
        let opts = SolverOptions::numeric();
        for n in [0.5, 4.0] {
            let t = 0.05;
            let rho = thermal_state(n, 256).unwrap();
            let out = evolve(&rho, SemigroupKind::Heat, t, &opts).unwrap();
            let spec =
                gaussian_evolve(&GaussianStateSpec::thermal(n).unwrap(), SemigroupKind::Heat, t).unwrap();
            let (pops, _) = thermal_populations(spec.symplectic_photon(), 256).unwrap();
            let diff = out.populations().iter().zip(&pops).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(diff < 1e-5, "n={n}: {diff}");
        }
    }

    #[test]
    fn relent_closed_form() {
        let (mu, la) = (2f64.sqrt(), 1.0);
        assert_relative_eq!(relent_to_qou_fixed(0.0, 0.0, mu, la).unwrap(), LN_2, epsilon = 1e-15);
        let n_inf = 1.0;
        assert!(relent_to_qou_fixed(g_entropy(n_inf), n_inf, mu, la).unwrap().abs() < 1e-14);
        let sigma = crate::semigroups::qou_fixed_point(mu, la, 96).unwrap();
        let rho = crate::fock::DensityMatrix::from_populations(&{
            let mut p = vec![0.0; 96];
            p[..4].copy_from_slice(&[0.4, 0.3, 0.2, 0.1]);
            p
        })
        .unwrap();
        let s = von_neumann_entropy(&rho);
        let n = crate::fock::mean_photon(&rho);
        let exact = crate::fock::relative_entropy(&rho, &sigma).unwrap();
        assert_relative_eq!(relent_to_qou_fixed(s, n, mu, la).unwrap(), exact, epsilon = 1e-8);
    }

    #[test]
    fn h_function_minimum() {
        let (n_star, v) = h_minimize(2f64.sqrt(), 1.0).unwrap();
        assert_relative_eq!(n_star, 1.0, epsilon = 1e-15);
        assert!(v.abs() < 1e-12);
        for k in 0..=120 {
            let n = 10f64.powf(-3.0 + k as f64 / 20.0);
            assert!(h_function(n, 2f64.sqrt(), 1.0).unwrap() >= -1e-14);
        }
        let (mu2, la2) = (3.0f64, 1.2f64);
        let (mu, la) = (mu2.sqrt(), la2.sqrt());
        let (ns, _) = h_minimize(mu, la).unwrap();
        let d = 1e-4;
        let second = (h_function(ns + d, mu, la).unwrap() - 2.0 * h_function(ns, mu, la).unwrap()
            + h_function(ns - d, mu, la).unwrap())
            / (d * d);
        // h'' = −μ²/(n+1)² + λ²/n² at n* = λ²/ζ.
        let expected = (mu2 - la2).powi(2) * (1.0 / la2 - 1.0 / mu2);
        assert_relative_eq!(second, expected, max_relative = 1e-5);
    }

    #[test]
    fn h_is_the_exact_thermal_margin() {
        let (mu, la) = (1.7, 0.9);
        let zeta = mu * mu - la * la;
        for n in [0.1, 0.7, 3.0, 10.0] {
            let d = relent_to_qou_fixed(g_entropy(n), n, mu, la).unwrap();
            let margin = -zeta * d - thermal_relent_rate(n, mu, la).unwrap();
            assert_relative_eq!(margin, h_function(n, mu, la).unwrap(), epsilon = 1e-12);
            let assembled = gaussian_decay_margin(&GaussianStateSpec::thermal(n).unwrap(), mu, la).unwrap();
            assert_relative_eq!(assembled, margin, epsilon = 1e-12);
        }
    }

    #[test]
    fn zeta_witness() {
        let (mu, la) = (2f64.sqrt(), 1.0);
        assert_eq!(zeta_optimality_witness(mu, la, 0.0, 1e4).unwrap(), None);
        let n = zeta_optimality_witness(mu, la, 0.5, 1e4).unwrap().expect("witness");
        assert!(strengthened_margin(n, mu, la, 0.5).unwrap() < WITNESS_THRESHOLD);
    }

    #[test]
    fn cou_fixed_point_and_tightness() {
        let p = ClassicalOUParams::new(1.0, 1.0).unwrap();
        let fixed = cou_step(&p, 0.5, 0.3).unwrap();
        assert_eq!(fixed.relent, 0.0);
        assert_eq!(fixed.rate_margin, 0.0);
        assert!(cou_step(&p, 10.0, 0.0).unwrap().rate_margin >= 0.0);
        let mut last = f64::INFINITY;
        for v in [1e2, 1e4, 1e6] {
            let s = cou_step(&p, v, 0.0).unwrap();
            let ratio = s.rate_margin / s.relent;
            assert!(ratio < last);
            last = ratio;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn cou_margin_matches_debruijn_form() {
        // dD/dt = −σ²/2 J(X) − 2θ²/σ² E[X²] + 2θ with J = 1/v for a Gaussian.
        let p = ClassicalOUParams::new(0.7, 2.3).unwrap();
        for (v0, t) in [(0.2, 0.0), (5.0, 0.4), (40.0, 1.0)] {
            let s = cou_step(&p, v0, t).unwrap();
            let rate = -p.sigma2 / (2.0 * s.variance) - 2.0 * p.theta * p.theta / p.sigma2 * s.variance
                + 2.0 * p.theta;
            assert_relative_eq!(s.relent_rate, rate, max_relative = 1e-12);
            let sv = p.stationary_variance();
            let d = 0.5 * (s.variance / sv - 1.0 - (s.variance / sv).ln());
            assert_relative_eq!(s.relent, d, max_relative = 1e-10);
            assert_relative_eq!(s.rate_margin, -2.0 * p.theta * d - rate, max_relative = 1e-8);
            // The relative entropy decays along the flow at the analytic rate.
            let h = 1e-6;
            let fwd = cou_step(&p, v0, t + h).unwrap().relent;
            let bwd = if t > 0.0 { cou_step(&p, v0, t - h).unwrap().relent } else { s.relent };
            let fd = if t > 0.0 { (fwd - bwd) / (2.0 * h) } else { (fwd - bwd) / h };
            assert_relative_eq!(fd, s.relent_rate, max_relative = 1e-4);
        }
    }

    #[test]
    fn carbone_intervals() {
        let b = carbone_lsi2_bounds(2f64.sqrt(), 1.0).unwrap();
        let expected = LN_2 / (5.0 * 5f64.sqrt() * 2.0 * 0.5f64.powf(1.5));
        assert_relative_eq!(b.alpha_c_inv.0, expected, epsilon = 1e-14);
        assert!(b.alpha2.0 <= b.alpha2.1);
        assert!(b.alpha_c_inv.0 <= b.alpha_c_inv.1);
        assert!(carbone_lsi2_bounds(1.0, 1.0).is_err());
    }
}
