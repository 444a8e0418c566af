//! Heat, attenuator, amplifier and quantum Ornstein-Uhlenbeck semigroups on
//! the truncated Fock space, the classical-quantum convolution `f ⋆ₜ ρ`, and
//! finite-difference entropy and divergence rates.
//!
//! Every generator here is a nonnegative combination `loss·L₋ + gain·L₊`
//! (the heat Liouvillian is `2π(L₋ + L₊)`), applied in O(dim²) from the
//! sparse action of the ladder operators.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::fock::{
    detect_thermal, edge_levels, relative_entropy, thermal_state, thermal_state_with_tol,
    von_neumann_entropy, DensityMatrix, Displacer, QuadratureBasis, EDGE_MASS_TOL,
};
use crate::linalg::{self, CMat, RMat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SemigroupKind {
    Heat,
    Attenuator,
    Amplifier,
    /// Generator `μ² L₋ + λ² L₊`, requires `μ > λ > 0`.
    Qou {
        mu: f64,
        lambda: f64,
    },
}

impl SemigroupKind {
    pub fn qou(mu: f64, lambda: f64) -> Result<Self> {
        let k = SemigroupKind::Qou { mu, lambda };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if let SemigroupKind::Qou { mu, lambda } = *self {
            ensure_finite("mu", mu)?;
            ensure_finite("lambda", lambda)?;
            if !(mu > lambda && lambda > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "qOU needs mu > lambda > 0, got mu={mu}, lambda={lambda}"
                )));
            }
        }
        Ok(())
    }

    /// `(loss, gain)` with generator `loss·L₋ + gain·L₊`.
    pub fn rates(&self) -> (f64, f64) {
        match *self {
            SemigroupKind::Heat => (2.0 * PI, 2.0 * PI),
            SemigroupKind::Attenuator => (1.0, 0.0),
            SemigroupKind::Amplifier => (0.0, 1.0),
            SemigroupKind::Qou { mu, lambda } => (mu * mu, lambda * lambda),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SemigroupKind::Heat => "heat",
            SemigroupKind::Attenuator => "attenuator",
            SemigroupKind::Amplifier => "amplifier",
            SemigroupKind::Qou { .. } => "qou",
        }
    }

    /// Mean photon number of a thermal input after time `t`.
    pub fn thermal_photon_map(&self, n: f64, t: f64) -> f64 {
        match *self {
            SemigroupKind::Heat => n + 2.0 * PI * t,
            SemigroupKind::Attenuator => (-t).exp() * n,
            SemigroupKind::Amplifier => t.exp() * (n + 1.0) - 1.0,
            SemigroupKind::Qou { mu, lambda } => photon_trajectory(n, mu, lambda, t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Method {
    #[default]
    Rk4Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Largest step taken; it is further clamped below the RK4 stability
    /// limit of the generator at the current truncation.
    pub step: f64,
    pub method: Method,
    pub trace_tolerance: f64,
    /// Largest population allowed on the top `⌈dim/8⌉` levels.
    pub edge_tolerance: f64,
    /// Use closed-form photon-number maps for thermal inputs.
    pub fast_path: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            method: Method::Rk4Fixed,
            trace_tolerance: 1e-9,
            edge_tolerance: EDGE_MASS_TOL,
            fast_path: true,
        }
    }
}

impl SolverOptions {
    pub fn numeric() -> Self {
        Self { fast_path: false, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be > 0, got {}", self.step)));
        }
        if !(self.trace_tolerance > 0.0 && self.edge_tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// `loss·L₋(m) + gain·L₊(m)` using the truncated `a`, with `aa† = diag(1,…,N−1,0)`.
pub(crate) fn apply_rates(m: &CMat, loss: f64, gain: f64) -> CMat {
    let n = m.nrows();
    let sq: Vec<f64> = (0..=n).map(|j| (j as f64).sqrt()).collect();
    let up: Vec<f64> = (0..n).map(|j| if j + 1 < n { (j + 1) as f64 } else { 0.0 }).collect();
    CMat::from_fn(n, n, |j, k| {
        let mut acc = Complex64::new(0.0, 0.0);
        if loss != 0.0 {
            let mut v = -m[(j, k)] * (0.5 * (j + k) as f64);
            if j + 1 < n && k + 1 < n {
                v += m[(j + 1, k + 1)] * (sq[j + 1] * sq[k + 1]);
            }
            acc += v * loss;
        }
        if gain != 0.0 {
            let mut v = -m[(j, k)] * (0.5 * (up[j] + up[k]));
            if j > 0 && k > 0 {
                v += m[(j - 1, k - 1)] * (sq[j] * sq[k]);
            }
            acc += v * gain;
        }
        acc
    })
}

fn edge_mass_of(m: &CMat) -> f64 {
    let n = m.nrows();
    (n - edge_levels(n).min(n)..n).map(|j| m[(j, j)].re).sum()
}

/// `L(ρ)` for the given semigroup; Hermitian and exactly traceless.
pub fn liouvillian_apply(kind: SemigroupKind, rho: &DensityMatrix) -> Result<CMat> {
    kind.validate()?;
    if rho.dim() < 4 {
        return Err(Error::InvalidDimension { dim: rho.dim(), min: 4 });
    }
    let edge = edge_mass_of(rho.matrix());
    if edge > EDGE_MASS_TOL {
        return Err(Error::Truncation { edge_mass: edge, tolerance: EDGE_MASS_TOL, suggested_dim: None });
    }
    let (loss, gain) = kind.rates();
    Ok(apply_rates(rho.matrix(), loss, gain))
}

/// Upper bound on the spectral radius of `loss·L₋ + gain·L₊` at this truncation.
fn generator_bound(dim: usize, loss: f64, gain: f64) -> f64 {
    2.0 * (loss + gain) * dim as f64
}

fn rk4_step(m: &CMat, dt: f64, loss: f64, gain: f64) -> CMat {
    let k1 = apply_rates(m, loss, gain);
    let k2 = apply_rates(&(m + &k1 * Complex64::new(dt / 2.0, 0.0)), loss, gain);
    let k3 = apply_rates(&(m + &k2 * Complex64::new(dt / 2.0, 0.0)), loss, gain);
    let k4 = apply_rates(&(m + &k3 * Complex64::new(dt, 0.0)), loss, gain);
    m + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(dt / 6.0, 0.0)
}

/// `e^{tL}(ρ)`.
pub fn evolve(
    rho: &DensityMatrix,
    kind: SemigroupKind,
    t: f64,
    opts: &SolverOptions,
) -> Result<DensityMatrix> {
    Ok(evolve_many(rho, kind, &[t], opts)?.pop().expect("one time requested"))
}

/// `e^{tL}(ρ)` at each of the nondecreasing `times`, sharing one trajectory.
pub fn evolve_many(
    rho: &DensityMatrix,
    kind: SemigroupKind,
    times: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<DensityMatrix>> {
    kind.validate()?;
    opts.validate()?;
    let mut prev = 0.0;
    for &t in times {
        ensure_finite("t", t)?;
        if t < prev {
            return Err(Error::InvalidArgument("times must be nonnegative and nondecreasing".into()));
        }
        prev = t;
    }
    if opts.fast_path {
        if let Some(n) = detect_thermal(rho, 1e-12) {
            return times
                .iter()
                .map(|&t| {
                    if t == 0.0 {
                        Ok(rho.clone())
                    } else {
                        thermal_state_with_tol(kind.thermal_photon_map(n, t), rho.dim(), opts.edge_tolerance)
                    }
                })
                .collect();
        }
    }
    let (loss, gain) = kind.rates();
    let dt_max = opts.step.min(2.5 / generator_bound(rho.dim(), loss, gain));
    let mut m = rho.matrix().clone();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - now;
        if span > 0.0 {
            let steps = (span / dt_max).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for _ in 0..steps {
                m = rk4_step(&m, dt, loss, gain);
                let edge = edge_mass_of(&m);
                if edge > opts.edge_tolerance {
                    return Err(Error::Truncation {
                        edge_mass: edge,
                        tolerance: opts.edge_tolerance,
                        suggested_dim: None,
                    });
                }
            }
            m = linalg::hermitize(&m);
            let drift = (linalg::trace(&m).re - 1.0).abs();
            if drift > opts.trace_tolerance {
                return Err(Error::StepSize { drift, step: dt });
            }
            now = t;
        }
        if t == 0.0 {
            out.push(rho.clone());
        } else {
            out.push(
                DensityMatrix::new(m.clone()).map_err(|_| Error::StepSize {
                    drift: (linalg::trace(&m).re - 1.0).abs(),
                    step: dt_max,
                })?,
            );
        }
    }
    Ok(out)
}

/// A classical probability density on phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PhaseDensity {
    Gaussian { mean: [f64; 2], cov: [[f64; 2]; 2] },
    AtomMixture { points: Vec<[f64; 2]>, weights: Vec<f64> },
}

impl PhaseDensity {
    /// The centered unit-variance Gaussian `f_Z`.
    pub fn standard() -> Self {
        PhaseDensity::Gaussian { mean: [0.0, 0.0], cov: [[1.0, 0.0], [0.0, 1.0]] }
    }

    pub fn gaussian(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        let f = PhaseDensity::Gaussian { mean, cov };
        f.validate()?;
        Ok(f)
    }

    pub fn atoms(points: Vec<[f64; 2]>, weights: Vec<f64>) -> Result<Self> {
        let f = PhaseDensity::AtomMixture { points, weights };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PhaseDensity::Gaussian { mean, cov } => {
                for x in mean.iter().chain(cov.iter().flatten()) {
                    ensure_finite("gaussian parameter", *x)?;
                }
                if (cov[0][1] - cov[1][0]).abs() > 1e-12 * (1.0 + cov[0][1].abs()) {
                    return Err(Error::InvalidArgument("covariance must be symmetric".into()));
                }
                let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
                if !(cov[0][0] > 0.0 && det > 0.0) {
                    return Err(Error::InvalidArgument("covariance must be positive definite".into()));
                }
                Ok(())
            }
            PhaseDensity::AtomMixture { points, weights } => {
                if points.len() != weights.len() || points.is_empty() {
                    return Err(Error::InvalidArgument(
                        "atoms need matching, nonempty points and weights".into(),
                    ));
                }
                if weights.iter().any(|&w| !(w >= 0.0)) {
                    return Err(Error::InvalidArgument("weights must be nonnegative".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!("weights sum to {total}")));
                }
                for p in points.iter().flatten() {
                    ensure_finite("atom", *p)?;
                }
                Ok(())
            }
        }
    }

    /// Law of `s·X` for `X ~ f`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            PhaseDensity::Gaussian { mean, cov } => PhaseDensity::Gaussian {
                mean: [s * mean[0], s * mean[1]],
                cov: [[s * s * cov[0][0], s * s * cov[0][1]], [s * s * cov[1][0], s * s * cov[1][1]]],
            },
            PhaseDensity::AtomMixture { points, weights } => PhaseDensity::AtomMixture {
                points: points.iter().map(|p| [s * p[0], s * p[1]]).collect(),
                weights: weights.clone(),
            },
        }
    }

    /// Law of `X + d`.
    pub fn shifted(&self, d: [f64; 2]) -> Self {
        match self {
            PhaseDensity::Gaussian { mean, cov } => {
                PhaseDensity::Gaussian { mean: [mean[0] + d[0], mean[1] + d[1]], cov: *cov }
            }
            PhaseDensity::AtomMixture { points, weights } => PhaseDensity::AtomMixture {
                points: points.iter().map(|p| [p[0] + d[0], p[1] + d[1]]).collect(),
                weights: weights.clone(),
            },
        }
    }

    /// Gaussian with `v·I` added to the covariance (classical heat flow).
    pub fn with_added_variance(&self, v: f64) -> Result<Self> {
        match self {
            PhaseDensity::Gaussian { mean, cov } => {
                PhaseDensity::gaussian(*mean, [[cov[0][0] + v, cov[0][1]], [cov[1][0], cov[1][1] + v]])
            }
            PhaseDensity::AtomMixture { .. } => {
                Err(Error::InvalidArgument("variance can only be added to a Gaussian density".into()))
            }
        }
    }
}

/// Largest trace deviation tolerated by [`convolve`].
pub const QUADRATURE_TOL: f64 = 1e-8;
/// Largest estimated Frobenius error of a Gauss–Hermite convolution accepted
/// by [`convolve`].
pub const QUADRATURE_ERROR_TOL: f64 = 1e-4;
pub const DEFAULT_QUAD_ORDER: usize = 20;

/// How the Gaussian average over each phase-space axis is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureRule {
    /// `order`-point Gauss–Hermite rule per axis.
    GaussHermite(usize),
    /// Closed-form average: in the eigenbasis of the displacement generator
    /// the entry `(a, b)` is damped by `exp(−c²(x_a − x_b)²/2)`.
    Exact,
}

/// Result of [`convolve_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct Convolution {
    pub state: DensityMatrix,
    /// Frobenius distance between the quadrature and the closed-form average,
    /// summed over the two axes (zero for [`QuadratureRule::Exact`]).
    pub quadrature_error: f64,
}

/// Nodes and weights of the `order`-point Gauss–Hermite rule for the standard
/// normal density (weights sum to one).
pub fn gauss_hermite(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be positive".into()));
    }
    let jacobi = RMat::from_fn(order, order, |j, k| {
        if k == j + 1 {
            (k as f64).sqrt()
        } else if j == k + 1 {
            (j as f64).sqrt()
        } else {
            0.0
        }
    });
    let (x, v) = linalg::real_symmetric_eigen(&jacobi);
    let w: Vec<f64> = (0..order).map(|k| v[(0, k)] * v[(0, k)]).collect();
    Ok((x.iter().copied().collect(), w))
}

/// `E_z[W(z u) X W(z u)†]` for `z ~ N(0,1)` along the vector `u`.
/// Returns the result and the Frobenius norm of its deviation from the
/// closed-form average.
fn average_along(
    basis: &Arc<QuadratureBasis>,
    x: &CMat,
    dir: [f64; 2],
    rule: &Option<(Vec<f64>, Vec<f64>)>,
) -> Result<(CMat, f64)> {
    let len = dir[0].hypot(dir[1]);
    if len == 0.0 {
        return Ok((x.clone(), 0.0));
    }
    let d = Displacer::new(basis.clone(), dir)?;
    let y = d.to_eigenbasis(x);
    let c = (2.0 * PI).sqrt() * len;
    let xs = &basis.x;
    let n = y.nrows();
    let mut out = CMat::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut err2 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let delta = c * (xs[a] - xs[b]);
            let exact = (-0.5 * delta * delta).exp();
            let f = match rule {
                Some((nodes, weights)) => {
                    let mut f = Complex64::new(0.0, 0.0);
                    for (z, w) in nodes.iter().zip(weights) {
                        f += Complex64::from_polar(*w, -delta * z);
                    }
                    err2 += (y[(a, b)] * (f - exact)).norm_sqr();
                    f
                }
                None => Complex64::new(exact, 0.0),
            };
            out[(a, b)] = y[(a, b)] * f;
        }
    }
    Ok((d.from_eigenbasis(&out), err2.sqrt()))
}

/// The convolution `f ⋆ₜ ρ = ∫ f(ξ) W(√t ξ) ρ W(√t ξ)† dξ` with a
/// `quad_order`-point Gauss–Hermite rule per axis.
///
/// Fails when the trace deviates by [`QUADRATURE_TOL`] or the estimated
/// quadrature error reaches [`QUADRATURE_ERROR_TOL`].
pub fn convolve(f: &PhaseDensity, rho: &DensityMatrix, t: f64, quad_order: usize) -> Result<DensityMatrix> {
    let out = convolve_with(f, rho, t, QuadratureRule::GaussHermite(quad_order))?;
    if out.quadrature_error >= QUADRATURE_ERROR_TOL {
        return Err(Error::Quadrature { deviation: out.quadrature_error, order: quad_order });
    }
    Ok(out.state)
}

/// [`convolve`] with an explicit rule and no gate on the quadrature error.
///
/// Gaussian densities are averaged along the Cholesky columns of the
/// covariance, one axis after the other; atom mixtures are summed exactly.
pub fn convolve_with(
    f: &PhaseDensity,
    rho: &DensityMatrix,
    t: f64,
    rule: QuadratureRule,
) -> Result<Convolution> {
    f.validate()?;
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(Convolution { state: rho.clone(), quadrature_error: 0.0 });
    }
    let order = match rule {
        QuadratureRule::GaussHermite(k) => k,
        QuadratureRule::Exact => 0,
    };
    let st = t.sqrt();
    let basis = Arc::new(QuadratureBasis::new(rho.dim())?);
    let mut quadrature_error = 0.0;
    let out = match f {
        PhaseDensity::AtomMixture { points, weights } => {
            let n = rho.dim();
            let mut acc = CMat::from_element(n, n, Complex64::new(0.0, 0.0));
            for (p, w) in points.iter().zip(weights) {
                if *w == 0.0 {
                    continue;
                }
                let xi = [st * p[0], st * p[1]];
                let r = xi[0].hypot(xi[1]);
                let term = if r == 0.0 {
                    rho.matrix().clone()
                } else {
                    Displacer::new(basis.clone(), xi)?.conjugate(rho.matrix(), r)
                };
                acc += term * Complex64::new(*w, 0.0);
            }
            acc
        }
        PhaseDensity::Gaussian { mean, cov } => {
            let nodes = match rule {
                QuadratureRule::GaussHermite(k) if k < 8 => {
                    return Err(Error::InvalidArgument(format!(
                        "Gaussian convolution needs quad_order >= 8, got {k}"
                    )))
                }
                QuadratureRule::GaussHermite(k) => Some(gauss_hermite(k)?),
                QuadratureRule::Exact => None,
            };
            let l11 = cov[0][0].sqrt();
            let l21 = cov[1][0] / l11;
            let l22 = (cov[1][1] - l21 * l21).sqrt();
            let (inner, e1) = average_along(&basis, rho.matrix(), [0.0, st * l22], &nodes)?;
            let (outer, e2) = average_along(&basis, &inner, [st * l11, st * l21], &nodes)?;
            quadrature_error = e1 + e2;
            let shift = [st * mean[0], st * mean[1]];
            let r = shift[0].hypot(shift[1]);
            if r == 0.0 {
                outer
            } else {
                Displacer::new(basis.clone(), shift)?.conjugate(&outer, r)
            }
        }
    };
    let tr = linalg::trace(&out).re;
    if (tr - 1.0).abs() >= QUADRATURE_TOL {
        return Err(Error::Quadrature { deviation: (tr - 1.0).abs(), order });
    }
    let out = out.map(|z| z / tr);
    Ok(Convolution { state: DensityMatrix::new(linalg::hermitize(&out))?, quadrature_error })
}

/// A finite-difference derivative with its Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub stencil_h: f64,
}

pub const DEFAULT_RATE_STEP: f64 = 1e-4;

/// Smallest eigenvalue for which entropy rates are attempted.
pub const RATE_FULL_RANK_FLOOR: f64 = 1e-12;

fn check_rate_inputs(rho: &DensityMatrix, h: f64) -> Result<()> {
    if !(1e-5..=1e-2).contains(&h) {
        return Err(Error::InvalidArgument(format!("stencil h={h} outside [1e-5, 1e-2]")));
    }
    // A number-diagonal state has its spectrum on the diagonal, exactly.
    let (min, floor) = if rho.off_diagonal_norm() == 0.0 {
        (rho.populations().into_iter().fold(f64::INFINITY, f64::min), 0.0)
    } else {
        (rho.min_eigenvalue(), RATE_FULL_RANK_FLOOR)
    };
    if min <= floor {
        return Err(Error::IllConditioned(format!(
            "state has eigenvalue {min:.3e}; entropy derivative may diverge"
        )));
    }
    Ok(())
}

/// Forward derivative at `t = 0` of `t ↦ value(e^{tL}ρ)`, one Richardson step.
fn forward_rate<F>(
    rho: &DensityMatrix,
    kind: SemigroupKind,
    h: f64,
    opts: &SolverOptions,
    value: F,
) -> Result<RateEstimate>
where
    F: Fn(&DensityMatrix) -> Result<f64>,
{
    let states = evolve_many(rho, kind, &[h / 2.0, h], opts)?;
    let v0 = value(rho)?;
    let d_half = (value(&states[0])? - v0) / (h / 2.0);
    let d_full = (value(&states[1])? - v0) / h;
    Ok(RateEstimate { value: 2.0 * d_half - d_full, error_estimate: (d_half - d_full).abs(), stencil_h: h })
}

/// `2·dS/dt` at `t = 0` along the semigroup (the entropy production rate
/// `J₋`/`J₊` for the attenuator/amplifier).
pub fn entropy_rate(
    rho: &DensityMatrix,
    kind: SemigroupKind,
    h: f64,
    opts: &SolverOptions,
) -> Result<RateEstimate> {
    check_rate_inputs(rho, h)?;
    let r = forward_rate(rho, kind, h, opts, |s| Ok(von_neumann_entropy(s)))?;
    Ok(RateEstimate { value: 2.0 * r.value, error_estimate: 2.0 * r.error_estimate, stencil_h: h })
}

/// Derivative of `D(e^{tL}ρ ‖ σ)` at `t = 0` under the qOU semigroup, and
/// the same quantity assembled from the entropy rates through the identity
/// `−ζD − dD/dt = μ²/2·J₋ + λ²/2·J₊ + ζS + λ² log ν + ζ log(1−ν)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRate {
    pub rate: RateEstimate,
    pub assembled: f64,
    pub relent: f64,
    pub entropy: f64,
    pub j_minus: f64,
    pub j_plus: f64,
}

impl DecayRate {
    /// `|rate − assembled| / max(|rate|, |assembled|)`; zero when both vanish.
    pub fn relative_gap(&self) -> f64 {
        let scale = self.rate.value.abs().max(self.assembled.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.rate.value - self.assembled).abs() / scale
        }
    }
}

/// The qOU fixed point `ω_{n∞}`, `n∞ = λ²/(μ²−λ²)`.
pub fn qou_fixed_point(mu: f64, lambda: f64, dim: usize) -> Result<DensityMatrix> {
    SemigroupKind::qou(mu, lambda)?;
    thermal_state(lambda * lambda / (mu * mu - lambda * lambda), dim)
}

pub fn relent_decay_rate(
    rho: &DensityMatrix,
    mu: f64,
    lambda: f64,
    h: f64,
    opts: &SolverOptions,
) -> Result<DecayRate> {
    let kind = SemigroupKind::qou(mu, lambda)?;
    check_rate_inputs(rho, h)?;
    let sigma = qou_fixed_point(mu, lambda, rho.dim())?;
    let rate = forward_rate(rho, kind, h, opts, |s| relative_entropy(s, &sigma))?;
    let (mu2, la2) = (mu * mu, lambda * lambda);
    let zeta = mu2 - la2;
    let nu = la2 / mu2;
    let j_minus = entropy_rate(rho, SemigroupKind::Attenuator, h, opts)?.value;
    let j_plus = entropy_rate(rho, SemigroupKind::Amplifier, h, opts)?.value;
    let entropy = von_neumann_entropy(rho);
    let relent = relative_entropy(rho, &sigma)?;
    let rhs =
        mu2 / 2.0 * j_minus + la2 / 2.0 * j_plus + zeta * entropy + la2 * nu.ln() + zeta * (1.0 - nu).ln();
    Ok(DecayRate { rate, assembled: -zeta * relent - rhs, relent, entropy, j_minus, j_plus })
}

/// Mean photon number under the qOU semigroup:
/// `e^{−ζt} n₀ + (1 − e^{−ζt}) λ²/ζ`, `ζ = μ² − λ²`.
pub fn photon_trajectory(n0: f64, mu: f64, lambda: f64, t: f64) -> f64 {
    let zeta = mu * mu - lambda * lambda;
    let decay = (-zeta * t).exp();
    decay * n0 + (1.0 - decay) * lambda * lambda / zeta
}

/// Mean photon number of `e^{tL}ρ` for any semigroup of this module; linear
/// in `n₀` because `dn/dt = −loss·n + gain·(n+1)` up to truncation.
pub fn mean_photon_after(kind: SemigroupKind, n0: f64, t: f64) -> f64 {
    kind.thermal_photon_map(n0, t)
}
