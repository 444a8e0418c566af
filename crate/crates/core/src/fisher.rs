//! Divergence-based quantum Fisher information of the translation family
//! `θ ↦ W(θ) ρ W(θ)†`, Gaussian classical Fisher quantities and the Stam,
//! Fisher-isoperimetry and entropy-power-concavity margins.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::fock::{
    edge_levels, entropy_power, log_full_rank, quadratures, DensityMatrix, Displacer, QuadratureBasis,
    EDGE_MASS_TOL,
};
use crate::linalg::{self, CMat, HermitianEigen};
use crate::semigroups::{
    convolve_with, evolve_many, PhaseDensity, QuadratureRule, RateEstimate, SemigroupKind, SolverOptions,
};

pub const DEFAULT_FISHER_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherEstimate {
    pub value: f64,
    pub stencil_h: f64,
    pub error_estimate: f64,
}

/// `θ ↦ D(ρ ‖ W(θu) ρ W(θu)†)` along a fixed direction, evaluated in O(dim²)
/// per point after one change of basis.
struct DivergenceProfile {
    displacer: Displacer,
    state: CMat,
    log_state: CMat,
    neg_entropy: f64,
}

impl DivergenceProfile {
    fn new(
        basis: &Arc<QuadratureBasis>,
        rho: &DensityMatrix,
        log_rho: &CMat,
        neg_entropy: f64,
        dir: [f64; 2],
    ) -> Result<Self> {
        let displacer = Displacer::new(basis.clone(), dir)?;
        Ok(Self {
            state: displacer.to_eigenbasis(rho.matrix()),
            log_state: displacer.to_eigenbasis(log_rho),
            displacer,
            neg_entropy,
        })
    }

    /// `tr ρ log ρ − tr(ρ W log ρ W†)` with `W = W(θu)`.
    fn at(&self, theta: f64) -> f64 {
        let shifted = self.displacer.conjugate_diag(&self.log_state, theta);
        self.neg_entropy - linalg::trace_product(&self.state, &shifted).re
    }

    fn edge_mass_at(&self, theta: f64) -> f64 {
        let m = self.displacer.from_eigenbasis(&self.displacer.conjugate_diag(&self.state, theta));
        let n = m.nrows();
        (n - edge_levels(n)..n).map(|j| m[(j, j)].re).sum()
    }
}

/// Eigenvalues below this are treated as numerically zero.
const EIGEN_FLOOR: f64 = 1e-16;
/// Largest first-order flow of probability into the numerically null space
/// of `ρ` under displacements, `Σ_A tr(ρ A P₀ A)`.
const NULL_LEAKAGE_TOL: f64 = 1e-10;

/// `(log ρ, tr ρ log ρ)`, with eigenvalues below [`EIGEN_FLOOR`] raised to it.
///
/// Raising is harmless when displacements move almost no weight into the
/// floored subspace; otherwise the Fisher information is effectively infinite
/// and an ill-conditioned error is returned.
fn regularized_log(rho: &DensityMatrix) -> Result<(CMat, f64)> {
    if rho.off_diagonal_norm() == 0.0 && rho.populations().iter().all(|&p| p > 0.0) {
        let (eig, log) = log_full_rank(rho)?;
        let neg: f64 = eig.values.iter().map(|&x| x * x.ln()).sum();
        return Ok((log, neg));
    }
    let eig = rho.eigen();
    let null: Vec<bool> = eig.values.iter().map(|&x| x <= EIGEN_FLOOR).collect();
    if null.iter().any(|&z| z) {
        let (q, p) = quadratures(rho.dim())?;
        let v = &eig.vectors;
        let mut leakage = 0.0;
        for a in [q.matrix(), p.matrix()] {
            let m = linalg::matmul(&linalg::matmul(&v.adjoint(), a), v);
            for i in (0..m.nrows()).filter(|&i| !null[i]) {
                for j in (0..m.ncols()).filter(|&j| null[j]) {
                    leakage += eig.values[i] * m[(i, j)].norm_sqr();
                }
            }
        }
        if leakage > NULL_LEAKAGE_TOL {
            return Err(Error::IllConditioned(format!(
                "displacements move weight {leakage:.3e} into the null space of the state"
            )));
        }
    }
    let clamped: Vec<f64> = eig.values.iter().map(|&x| x.max(EIGEN_FLOOR)).collect();
    let neg = eig.values.iter().zip(&clamped).map(|(&x, &c)| if x > 0.0 { x * c.ln() } else { 0.0 }).sum();
    let log = HermitianEigen { values: clamped, vectors: eig.vectors }.apply(f64::ln);
    Ok((log, neg))
}

fn check_step(h: f64) -> Result<()> {
    if !(1e-4..=1e-1).contains(&h) {
        return Err(Error::InvalidArgument(format!("stencil h={h} outside [1e-4, 1e-1]")));
    }
    Ok(())
}

/// Quantum Fisher information `J(ρ)`: the trace of the Hessian of
/// `θ ↦ D(ρ‖ρ^{(θ)})` at zero, from the symmetric stencil
/// `Σ_j [D(h e_j) + D(−h e_j)]/h²` with one Richardson step over `h, h/2`.
pub fn quantum_fisher(rho: &DensityMatrix, h: f64) -> Result<FisherEstimate> {
    quantum_fisher_scaled(rho, 1.0, h)
}

/// Fisher information of the reparametrized family `θ ↦ ρ^{(cθ)}`; equals
/// `c² J(ρ)`.
pub fn quantum_fisher_scaled(rho: &DensityMatrix, scale: f64, h: f64) -> Result<FisherEstimate> {
    check_step(h)?;
    ensure_finite("scale", scale)?;
    if scale == 0.0 {
        return Ok(FisherEstimate { value: 0.0, stencil_h: h, error_estimate: 0.0 });
    }
    let (log_rho, neg_entropy) = regularized_log(rho)?;
    let basis = Arc::new(QuadratureBasis::new(rho.dim())?);
    let mut coarse = 0.0;
    let mut fine = 0.0;
    for dir in [[1.0, 0.0], [0.0, 1.0]] {
        let p = DivergenceProfile::new(&basis, rho, &log_rho, neg_entropy, dir)?;
        for s in [h, -h] {
            let edge = p.edge_mass_at(scale * s);
            if edge > EDGE_MASS_TOL {
                return Err(Error::Truncation {
                    edge_mass: edge,
                    tolerance: EDGE_MASS_TOL,
                    suggested_dim: None,
                });
            }
        }
        coarse += (p.at(scale * h) + p.at(-scale * h)) / (h * h);
        let hh = h / 2.0;
        fine += (p.at(scale * hh) + p.at(-scale * hh)) / (hh * hh);
    }
    Ok(FisherEstimate {
        value: (4.0 * fine - coarse) / 3.0,
        stencil_h: h,
        error_estimate: (fine - coarse).abs() / 3.0,
    })
}

fn spd_det_and_trace_inv(cov: &[[f64; 2]; 2]) -> Result<(f64, f64)> {
    for x in cov.iter().flatten() {
        ensure_finite("covariance entry", *x)?;
    }
    let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    if !(cov[0][0] > 0.0 && det > 0.0) || (cov[0][1] - cov[1][0]).abs() > 1e-12 {
        return Err(Error::InvalidArgument("covariance must be symmetric positive definite".into()));
    }
    Ok((det, (cov[0][0] + cov[1][1]) / det))
}

/// Translation Fisher information `tr(Σ⁻¹)` of a Gaussian density on ℝ².
pub fn classical_fisher_gaussian(cov: &[[f64; 2]; 2]) -> Result<f64> {
    Ok(spd_det_and_trace_inv(cov)?.1)
}

/// Differential entropy `1 + log 2π + ½ log det Σ` of a Gaussian on ℝ².
pub fn gaussian_density_entropy(cov: &[[f64; 2]; 2]) -> Result<f64> {
    let (det, _) = spd_det_and_trace_inv(cov)?;
    Ok(1.0 + (2.0 * PI).ln() + 0.5 * det.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StamMargin {
    /// `J(f⋆ₜρ)⁻¹ − J(ρ)⁻¹ − t J(f)⁻¹`.
    pub margin: f64,
    pub fisher_state: f64,
    pub fisher_output: f64,
    pub fisher_density: f64,
    pub quadrature_error: f64,
}

pub fn stam_margin(f: &PhaseDensity, rho: &DensityMatrix, t: f64, quad_order: usize) -> Result<StamMargin> {
    stam_margin_with(f, rho, t, QuadratureRule::GaussHermite(quad_order), DEFAULT_FISHER_STEP)
}

/// Stam margin with an explicit quadrature rule. The quadrature error is
/// reported, not gated: low-order rules bias the margin but the caller
/// decides whether that matters at its tolerance.
pub fn stam_margin_with(
    f: &PhaseDensity,
    rho: &DensityMatrix,
    t: f64,
    rule: QuadratureRule,
    h: f64,
) -> Result<StamMargin> {
    let cov = match f {
        PhaseDensity::Gaussian { cov, .. } => *cov,
        PhaseDensity::AtomMixture { .. } => {
            return Err(Error::InvalidArgument("Stam margins are defined for Gaussian densities".into()))
        }
    };
    let conv = convolve_with(f, rho, t, rule)?;
    let fisher_state = quantum_fisher(rho, h)?.value;
    let fisher_output = quantum_fisher(&conv.state, h)?.value;
    let fisher_density = classical_fisher_gaussian(&cov)?;
    Ok(StamMargin {
        margin: 1.0 / fisher_output - 1.0 / fisher_state - t / fisher_density,
        fisher_state,
        fisher_output,
        fisher_density,
        quadrature_error: conv.quadrature_error,
    })
}

pub const DEFAULT_HEAT_STEP: f64 = 1e-3;

/// Forward derivative at `t = 0` of `t ↦ 2 / J(e^{tL_heat}ρ)` (one Richardson
/// step over `τ, τ/2`); the isoperimetric inequality asserts it is at least 1.
pub fn inverse_fisher_slope(
    rho: &DensityMatrix,
    tau: f64,
    h: f64,
    opts: &SolverOptions,
) -> Result<RateEstimate> {
    if !(tau > 0.0 && tau <= 0.1) {
        return Err(Error::InvalidArgument(format!("time step {tau} outside (0, 0.1]")));
    }
    let states = evolve_many(rho, SemigroupKind::Heat, &[tau / 2.0, tau], opts)?;
    let g = |s: &DensityMatrix| -> Result<f64> { Ok(2.0 / quantum_fisher(s, h)?.value) };
    let g0 = g(rho)?;
    let d_half = (g(&states[0])? - g0) / (tau / 2.0);
    let d_full = (g(&states[1])? - g0) / tau;
    Ok(RateEstimate { value: 2.0 * d_half - d_full, error_estimate: (d_half - d_full).abs(), stencil_h: tau })
}

pub const DEFAULT_CONCAVITY_STEP: f64 = 5e-3;

/// `[N(ρ) − 2N(ρ_h) + N(ρ_{2h})]/h²` along the heat flow.
pub fn entropy_power_second_difference(rho: &DensityMatrix, h: f64, opts: &SolverOptions) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    let states = evolve_many(rho, SemigroupKind::Heat, &[h, 2.0 * h], opts)?;
    let n0 = entropy_power(rho);
    Ok((n0 - 2.0 * entropy_power(&states[0]) + entropy_power(&states[1])) / (h * h))
}

/// BKM form of the Fisher information used to cross-check the stencil:
/// `2π Σ_{A∈{Q,P}} Σ_ij |A_ij|² (λ_i − λ_j)(log λ_i − log λ_j)` in the
/// eigenbasis of `ρ`.
#[cfg(test)]
pub(crate) fn fisher_bkm(rho: &DensityMatrix) -> f64 {
    let eig = rho.eigen();
    let (q, p) = quadratures(rho.dim()).unwrap();
    let v = &eig.vectors;
    let mut total = 0.0;
    for a in [q.matrix(), p.matrix()] {
        let m = v.adjoint() * a * v;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let (li, lj) = (eig.values[i], eig.values[j]);
                if li > 0.0 && lj > 0.0 && i != j {
                    total += m[(i, j)].norm_sqr() * (li - lj) * (li.ln() - lj.ln());
                }
            }
        }
    }
    2.0 * PI * total
}
