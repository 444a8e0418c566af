//! Single-mode truncated Fock space: states, ladder and Weyl operators,
//! entropies, photon statistics, rearrangement and majorization.
//!
//! Conventions: `[Q, P] = i`, `Q = (a + a†)/√2`, `P = (a − a†)/(i√2)`, natural
//! logarithms throughout. Weyl operators carry the `√(2π)` normalization,
//! `W(ξ) = exp(i√(2π) (ξ₁ P − ξ₂ Q))`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::linalg::{self, CMat, HermitianEigen, RMat};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as roundoff and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Smallest eigenvalue accepted for a reference state inside a logarithm.
pub const FULL_RANK_FLOOR: f64 = 1e-14;
/// Weight of the thermal admixture that makes random states full rank.
pub const FULL_RANK_EPS: f64 = 1e-6;
/// Default tail mass tolerated when truncating a thermal state.
pub const THERMAL_LEAKAGE_TOL: f64 = 1e-10;
/// Edge mass above which a case is considered corrupted by truncation.
pub const EDGE_MASS_TOL: f64 = 1e-6;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn check_dim(dim: usize, min: usize) -> Result<()> {
    if dim < min {
        Err(Error::InvalidDimension { dim, min })
    } else {
        Ok(())
    }
}

/// Number of basis levels at the top of the truncation counted as "edge".
pub fn edge_levels(dim: usize) -> usize {
    dim.div_ceil(8)
}

/// A Hermitian, positive semidefinite, unit-trace matrix on `span{|0>,…,|dim−1>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, not square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        check_dim(mat.nrows(), 1)?;
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = linalg::hermiticity_defect(&mat);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("hermiticity defect {herm:.3e}")));
        }
        let tr = linalg::trace(&mat).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let mat = linalg::hermitize(&mat);
        let min = HermitianEigen::new(&mat).values.last().copied().unwrap_or(0.0);
        if min < -PSD_CLAMP {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { mat })
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(p: &[f64]) -> Result<Self> {
        if p.iter().any(|&x| !(x >= -PSD_CLAMP) || !x.is_finite()) {
            return Err(Error::InvalidState("populations must be nonnegative".into()));
        }
        let n = p.len();
        Self::new(CMat::from_fn(
            n,
            n,
            |j, k| {
                if j == k {
                    Complex64::new(p[j].max(0.0), 0.0)
                } else {
                    zero()
                }
            },
        ))
    }

    /// Wraps a matrix produced by a trace- and hermiticity-preserving map
    /// whose positivity is established by construction.
    pub(crate) fn from_trusted(mat: CMat) -> Self {
        debug_assert!(mat.nrows() == mat.ncols());
        Self { mat: linalg::hermitize(&mat) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Diagonal in the number basis, `⟨n|ρ|n⟩`.
    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.mat)
    }

    /// Eigenvalues in decreasing order, clamped at zero from below.
    pub fn spectrum(&self) -> Vec<f64> {
        self.eigen().values.into_iter().map(|x| x.max(0.0)).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().values.last().copied().unwrap_or(0.0)
    }

    /// Largest off-diagonal magnitude in the number basis.
    pub fn off_diagonal_norm(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    worst = worst.max(self.mat[(j, k)].norm());
                }
            }
        }
        worst
    }

    /// Convex combination `(1 − w) self + w other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidArgument(format!("mixing weight {w} outside [0,1]")));
        }
        Ok(Self::from_trusted(self.mat.map(|z| z * (1.0 - w)) + other.mat.map(|z| z * w)))
    }

    /// Zero-pads the state into a larger truncation.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: dim });
        }
        let mut m = CMat::from_element(dim, dim, zero());
        m.view_mut((0, 0), (self.dim(), self.dim())).copy_from(&self.mat);
        Ok(Self { mat: m })
    }

    pub fn health(&self) -> HealthMetrics {
        truncation_health(self)
    }
}

/// A linear operator on the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    mat: CMat,
}

impl FockOperator {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidArgument("operator must be square".into()));
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint() }
    }

    pub fn health(&self) -> HealthMetrics {
        truncation_health(self)
    }
}

#[derive(Debug, Clone)]
pub struct LadderOperators {
    pub annihilate: FockOperator,
    pub create: FockOperator,
    pub number: FockOperator,
}

pub fn ladder_operators(dim: usize) -> Result<LadderOperators> {
    check_dim(dim, 2)?;
    let a = CMat::from_fn(
        dim,
        dim,
        |j, k| {
            if k == j + 1 {
                Complex64::new((k as f64).sqrt(), 0.0)
            } else {
                zero()
            }
        },
    );
    let ad = a.adjoint();
    let n = &ad * &a;
    Ok(LadderOperators {
        annihilate: FockOperator { mat: a },
        create: FockOperator { mat: ad },
        number: FockOperator { mat: n },
    })
}

/// Truncated quadratures `(Q, P)`.
pub fn quadratures(dim: usize) -> Result<(FockOperator, FockOperator)> {
    let l = ladder_operators(dim)?;
    let a = &l.annihilate.mat;
    let ad = &l.create.mat;
    let s = 1.0 / 2f64.sqrt();
    let q = (a + ad).map(|z| z * s);
    let p = (a - ad).map(|z| z * Complex64::new(0.0, -s));
    Ok((FockOperator { mat: q }, FockOperator { mat: p }))
}

/// Eigendecomposition of the truncated position quadrature `Q = V diag(x) Vᵀ`.
///
/// Every phase-space direction is a rotation of `Q` by `e^{iφn̂}`, so this one
/// real symmetric decomposition diagonalizes all Weyl generators.
#[derive(Debug, Clone)]
pub struct QuadratureBasis {
    pub(crate) x: DVector<f64>,
    pub(crate) v: RMat,
}

impl QuadratureBasis {
    pub fn new(dim: usize) -> Result<Self> {
        check_dim(dim, 2)?;
        let q = RMat::from_fn(dim, dim, |j, k| {
            if k == j + 1 {
                (k as f64 / 2.0).sqrt()
            } else if j == k + 1 {
                (j as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let (x, v) = linalg::real_symmetric_eigen(&q);
        Ok(Self { x, v })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Displacements along a fixed phase-space direction `u`:
/// `W(r u) = R† V diag(exp(−i√(2π) r x)) Vᵀ R` with `R = e^{iφn̂}`,
/// `u = (sin φ, cos φ)`.
#[derive(Debug, Clone)]
pub struct Displacer {
    basis: Arc<QuadratureBasis>,
    phases: Vec<Complex64>,
}

impl Displacer {
    pub fn new(basis: Arc<QuadratureBasis>, direction: [f64; 2]) -> Result<Self> {
        let norm = direction[0].hypot(direction[1]);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "direction {direction:?} must be a nonzero finite vector"
            )));
        }
        let phi = direction[0].atan2(direction[1]);
        let phases = (0..basis.dim()).map(|n| Complex64::from_polar(1.0, phi * n as f64)).collect();
        Ok(Self { basis, phases })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `Vᵀ R X R† V`.
    pub fn to_eigenbasis(&self, x: &CMat) -> CMat {
        let n = self.dim();
        let rotated = CMat::from_fn(n, n, |j, k| self.phases[j] * x[(j, k)] * self.phases[k].conj());
        linalg::congruence_t(&self.basis.v, &rotated)
    }

    /// Inverse of [`Self::to_eigenbasis`].
    pub fn from_eigenbasis(&self, y: &CMat) -> CMat {
        let n = self.dim();
        let back = linalg::congruence(&self.basis.v, y);
        CMat::from_fn(n, n, |j, k| self.phases[j].conj() * back[(j, k)] * self.phases[k])
    }

    /// `E Y E*` for `E = diag(exp(−i√(2π) r x))`, i.e. conjugation by `W(r u)`
    /// expressed in the eigenbasis.
    pub fn conjugate_diag(&self, y: &CMat, r: f64) -> CMat {
        let c = (2.0 * PI).sqrt() * r;
        let x = &self.basis.x;
        let e: Vec<Complex64> = x.iter().map(|&xi| Complex64::from_polar(1.0, -c * xi)).collect();
        let n = self.dim();
        CMat::from_fn(n, n, |j, k| e[j] * y[(j, k)] * e[k].conj())
    }

    /// Dense `W(r u)`.
    pub fn operator(&self, r: f64) -> CMat {
        let n = self.dim();
        let c = (2.0 * PI).sqrt() * r;
        let x = &self.basis.x;
        let v = &self.basis.v;
        let ve = CMat::from_fn(n, n, |j, k| Complex64::from_polar(v[(j, k)], -c * x[k]));
        let w = linalg::mulr(&ve, &v.transpose());
        CMat::from_fn(n, n, |j, k| self.phases[j].conj() * w[(j, k)] * self.phases[k])
    }

    /// `W(r u) X W(r u)†`.
    pub fn conjugate(&self, x: &CMat, r: f64) -> CMat {
        self.from_eigenbasis(&self.conjugate_diag(&self.to_eigenbasis(x), r))
    }
}

/// The Weyl displacement operator `W(ξ) = exp(i√(2π) ξ·(σR))`.
pub fn weyl_operator(xi: [f64; 2], dim: usize) -> Result<FockOperator> {
    check_dim(dim, 2)?;
    ensure_finite("xi[0]", xi[0])?;
    ensure_finite("xi[1]", xi[1])?;
    let r = xi[0].hypot(xi[1]);
    if r == 0.0 {
        return Ok(FockOperator { mat: CMat::identity(dim, dim) });
    }
    let basis = Arc::new(QuadratureBasis::new(dim)?);
    let d = Displacer::new(basis, xi)?;
    Ok(FockOperator { mat: d.operator(r) })
}

/// The translated state `W(ξ) ρ W(ξ)†`.
pub fn displace(rho: &DensityMatrix, xi: [f64; 2]) -> Result<DensityMatrix> {
    ensure_finite("xi[0]", xi[0])?;
    ensure_finite("xi[1]", xi[1])?;
    let r = xi[0].hypot(xi[1]);
    if r == 0.0 {
        return Ok(rho.clone());
    }
    let basis = Arc::new(QuadratureBasis::new(rho.dim())?);
    let d = Displacer::new(basis, xi)?;
    Ok(DensityMatrix::from_trusted(d.conjugate(rho.matrix(), r)))
}

pub fn number_state(n: usize, dim: usize) -> Result<DensityMatrix> {
    check_dim(dim, 1)?;
    if n >= dim {
        return Err(Error::OutOfRange { index: n, dim });
    }
    let mut p = vec![0.0; dim];
    p[n] = 1.0;
    DensityMatrix::from_populations(&p)
}

/// Populations of the thermal state `ω_n̄` truncated to `dim` levels and
/// renormalized; also returns the tail mass that was discarded.
pub fn thermal_populations(nbar: f64, dim: usize) -> Result<(Vec<f64>, f64)> {
    check_dim(dim, 1)?;
    ensure_finite("nbar", nbar)?;
    if nbar < 0.0 {
        return Err(Error::InvalidArgument(format!("nbar must be >= 0, got {nbar}")));
    }
    if nbar == 0.0 {
        let mut p = vec![0.0; dim];
        p[0] = 1.0;
        return Ok((p, 0.0));
    }
    let ratio = nbar / (nbar + 1.0);
    let tail = ratio.powi(dim as i32);
    let mut p: Vec<f64> = (0..dim).map(|j| ratio.powi(j as i32) / (nbar + 1.0)).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok((p, tail))
}

/// Smallest truncation whose thermal tail mass is below `tol`.
pub fn thermal_min_dim(nbar: f64, tol: f64) -> usize {
    if nbar <= 0.0 {
        return 1;
    }
    let ratio = nbar / (nbar + 1.0);
    (tol.ln() / ratio.ln()).ceil().max(1.0) as usize
}

/// Gaussian thermal state with mean photon number `nbar`.
pub fn thermal_state(nbar: f64, dim: usize) -> Result<DensityMatrix> {
    thermal_state_with_tol(nbar, dim, THERMAL_LEAKAGE_TOL)
}

pub fn thermal_state_with_tol(nbar: f64, dim: usize, tol: f64) -> Result<DensityMatrix> {
    let (p, tail) = thermal_populations(nbar, dim)?;
    if tail > tol {
        return Err(Error::Truncation {
            edge_mass: tail,
            tolerance: tol,
            suggested_dim: Some(thermal_min_dim(nbar, tol)),
        });
    }
    DensityMatrix::from_populations(&p)
}

/// Mean photon number of `rho` if it is a truncated thermal state within `tol`.
pub fn detect_thermal(rho: &DensityMatrix, tol: f64) -> Option<f64> {
    if rho.off_diagonal_norm() > tol {
        return None;
    }
    let p = rho.populations();
    let p0 = p[0];
    if !(p0 > 0.0) {
        return None;
    }
    // p0 fixes the ratio of a renormalized geometric sequence only up to the
    // tail; use the first two levels, which is exact for the truncated form.
    let ratio = if p.len() > 1 { p[1] / p0 } else { 0.0 };
    if !(0.0..1.0).contains(&ratio) {
        return None;
    }
    let nbar = ratio / (1.0 - ratio);
    let (q, _) = thermal_populations(nbar, p.len()).ok()?;
    let dev = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    (dev <= tol).then_some(nbar)
}

/// Families of pseudo-random test states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RandomFamily {
    /// `G G†` for a complex Gaussian `G`, plus a thermal floor.
    FullRank,
    /// Squared Gaussian draws on the diagonal, plus a thermal floor.
    Diagonal,
    /// Random pure state plus a thermal floor.
    PureMixedEps,
}

/// Default decay ratio of the random-state envelope: the amplitude on level
/// `j` is damped by `ratio^{j/2}` so that the top eighth of the truncation
/// carries negligible mass while neighbouring levels stay comparable.
pub fn default_envelope(dim: usize) -> f64 {
    (-24.0 / dim as f64).exp().min(0.8)
}

/// Mean photon number of the full-rank thermal floor mixed into random states.
pub fn floor_nbar(dim: usize) -> f64 {
    (dim as f64 / 10.0).max(0.5)
}

pub fn random_state(dim: usize, seed: u64, family: RandomFamily) -> Result<DensityMatrix> {
    random_state_with_envelope(dim, default_envelope(dim), seed, family)
}

/// Random state whose level-`j` amplitudes are weighted by `ratio^{j/2}`,
/// mixed with weight [`FULL_RANK_EPS`] into the thermal floor.
pub fn random_state_with_envelope(
    dim: usize,
    ratio: f64,
    seed: u64,
    family: RandomFamily,
) -> Result<DensityMatrix> {
    check_dim(dim, 2)?;
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidArgument(format!("envelope ratio {ratio} must lie in (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };
    let env: Vec<f64> = (0..dim).map(|j| ratio.powf(j as f64 / 2.0)).collect();
    let block = match family {
        RandomFamily::FullRank => {
            let g = CMat::from_fn(dim, dim, |j, _| Complex64::new(gauss(), gauss()) * env[j]);
            linalg::matmul(&g, &g.adjoint())
        }
        RandomFamily::Diagonal => {
            let mut m = CMat::from_element(dim, dim, zero());
            for j in 0..dim {
                let x = gauss();
                m[(j, j)] = Complex64::new(x * x * env[j] * env[j], 0.0);
            }
            m
        }
        RandomFamily::PureMixedEps => {
            let psi: Vec<Complex64> = (0..dim).map(|j| Complex64::new(gauss(), gauss()) * env[j]).collect();
            CMat::from_fn(dim, dim, |j, k| psi[j] * psi[k].conj())
        }
    };
    let tr = linalg::trace(&block).re;
    if !(tr > 0.0) {
        return Err(Error::InvalidState("degenerate random draw".into()));
    }
    let (floor, _) = thermal_populations(floor_nbar(dim), dim)?;
    let mut m = block.map(|z| z * ((1.0 - FULL_RANK_EPS) / tr));
    for (j, p) in floor.iter().enumerate() {
        m[(j, j)] += Complex64::new(FULL_RANK_EPS * p, 0.0);
    }
    DensityMatrix::new(linalg::hermitize(&m))
}

fn entropy_of_spectrum(spec: &[f64]) -> f64 {
    -spec.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// `S(ρ) = −tr ρ log ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.spectrum())
}

/// Shannon entropy of a probability vector (nats, `0 log 0 = 0`).
pub fn shannon_entropy(p: &[f64]) -> f64 {
    entropy_of_spectrum(p)
}

/// `log σ` for a full-rank state. A number-diagonal `σ` only needs positive
/// populations; otherwise the smallest eigenvalue must exceed
/// [`FULL_RANK_FLOOR`].
pub fn log_full_rank(sigma: &DensityMatrix) -> Result<(HermitianEigen, CMat)> {
    let n = sigma.dim();
    if sigma.off_diagonal_norm() == 0.0 {
        let p = sigma.populations();
        if let Some(min) = p.iter().copied().find(|&x| x <= 0.0) {
            return Err(Error::IllConditioned(format!("reference state has population {min:.3e}")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
        let vectors =
            CMat::from_fn(n, n, |r, c| if r == order[c] { Complex64::new(1.0, 0.0) } else { zero() });
        let values = order.iter().map(|&i| p[i]).collect();
        let log = CMat::from_fn(n, n, |j, k| if j == k { Complex64::new(p[j].ln(), 0.0) } else { zero() });
        return Ok((HermitianEigen { values, vectors }, log));
    }
    let eig = sigma.eigen();
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min <= FULL_RANK_FLOOR {
        return Err(Error::IllConditioned(format!(
            "reference state has eigenvalue {min:.3e} <= {FULL_RANK_FLOOR:.0e}"
        )));
    }
    let log = eig.apply(f64::ln);
    Ok((eig, log))
}

/// `D(ρ‖σ) = tr ρ log ρ − tr ρ log σ`.
///
/// A number-diagonal `σ` is used exactly and yields `+∞` when the support of
/// `ρ` leaves that of `σ`; any other `σ` must have smallest eigenvalue above
/// [`FULL_RANK_FLOOR`].
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: sigma.dim() });
    }
    let neg_s = -von_neumann_entropy(rho);
    if sigma.off_diagonal_norm() == 0.0 {
        // Exact spectrum: only support matters, not conditioning.
        let mut cross = 0.0;
        for (p, s) in rho.populations().iter().zip(sigma.populations()) {
            if *p <= 0.0 {
                continue;
            }
            if s <= 0.0 {
                return Ok(f64::INFINITY);
            }
            cross += p * s.ln();
        }
        return Ok(neg_s - cross);
    }
    let (_, log_sigma) = log_full_rank(sigma)?;
    let cross = linalg::trace_product(rho.matrix(), &log_sigma).re;
    Ok(neg_s - cross)
}

/// `N(ρ) = exp(S(ρ)/d)` with `d = 1`.
pub fn entropy_power(rho: &DensityMatrix) -> f64 {
    von_neumann_entropy(rho).exp()
}

pub fn mean_photon(rho: &DensityMatrix) -> f64 {
    rho.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
}

/// Passive rearrangement: the decreasing spectrum placed on `|0>, |1>, …`.
pub fn fock_rearrangement(rho: &DensityMatrix) -> DensityMatrix {
    let spec = rho.spectrum();
    let total: f64 = spec.iter().sum();
    let p: Vec<f64> = spec.iter().map(|x| x / total).collect();
    DensityMatrix::from_trusted(CMat::from_fn(rho.dim(), rho.dim(), |j, k| {
        if j == k {
            Complex64::new(p[j], 0.0)
        } else {
            zero()
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MajorizationMode {
    /// Partial sums of the decreasing rearrangements.
    WeakSub,
    /// Weak sub-majorization plus equal totals.
    Full,
    /// Cumulative number-basis populations `tr(Π_n ·)`, no sorting.
    Fock,
}

/// Outcome of a majorization test: `margins[n]` is the slack of the `n`-th
/// partial-sum inequality; in `Full` mode a final entry `−|Σp − Σq|` is appended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationCheck {
    pub holds: bool,
    pub margins: Vec<f64>,
}

impl MajorizationCheck {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub const MAJORIZATION_TOL: f64 = 1e-10;

/// Does `p` majorize `q` (i.e. `q ≺ p` in the chosen sense)?
pub fn majorizes(p: &[f64], q: &[f64], mode: MajorizationMode) -> Result<MajorizationCheck> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { left: p.len(), right: q.len() });
    }
    let prep = |v: &[f64]| -> Vec<f64> {
        let mut v = v.to_vec();
        if mode != MajorizationMode::Fock {
            v.sort_by(|a, b| b.total_cmp(a));
        }
        v
    };
    let (ps, qs) = (prep(p), prep(q));
    let mut margins = Vec::with_capacity(p.len() + 1);
    let (mut sp, mut sq) = (0.0, 0.0);
    for (a, b) in ps.iter().zip(&qs) {
        sp += a;
        sq += b;
        margins.push(sp - sq);
    }
    if mode == MajorizationMode::Full {
        margins.push(-(sp - sq).abs());
    }
    let holds = margins.iter().all(|&m| m >= -MAJORIZATION_TOL);
    Ok(MajorizationCheck { holds, margins })
}

/// State version of [`majorizes`]: spectra for `WeakSub`/`Full`, number-basis
/// populations for `Fock`.
pub fn majorizes_states(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    mode: MajorizationMode,
) -> Result<MajorizationCheck> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: sigma.dim() });
    }
    match mode {
        MajorizationMode::Fock => majorizes(&rho.populations(), &sigma.populations(), mode),
        _ => majorizes(&rho.spectrum(), &sigma.spectrum(), mode),
    }
}

/// Indicators of truncation artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HealthMetrics {
    /// Population (states) or vacuum-column weight (operators) on the top
    /// `⌈dim/8⌉` levels.
    pub edge_mass: f64,
    /// `‖M†M − I‖_F` where `M` maps the lower half of the basis into the
    /// non-edge levels; large when the operator pushes those states onto the
    /// edge of the truncation.
    pub unitarity_defect: Option<f64>,
    /// `|tr ρ − 1|` for states.
    pub trace_drift: Option<f64>,
    pub flagged: bool,
}

pub trait Truncated {
    fn health_metrics(&self) -> HealthMetrics;
}

impl Truncated for DensityMatrix {
    fn health_metrics(&self) -> HealthMetrics {
        let dim = self.dim();
        let p = self.populations();
        let edge_mass: f64 = p[dim - edge_levels(dim).min(dim)..].iter().sum();
        let trace_drift = (p.iter().sum::<f64>() - 1.0).abs();
        HealthMetrics {
            edge_mass,
            unitarity_defect: None,
            trace_drift: Some(trace_drift),
            flagged: edge_mass > EDGE_MASS_TOL || trace_drift > TRACE_TOL,
        }
    }
}

impl Truncated for FockOperator {
    fn health_metrics(&self) -> HealthMetrics {
        let dim = self.dim();
        let edge = edge_levels(dim).min(dim - 1);
        let edge_mass: f64 = (dim - edge..dim).map(|j| self.mat[(j, 0)].norm_sqr()).sum();
        let interior = (dim / 2).max(1);
        let block = self.mat.view((0, 0), (dim - edge, interior)).clone_owned();
        let gram = block.adjoint() * &block - CMat::identity(interior, interior);
        let defect = linalg::frobenius(&gram);
        HealthMetrics {
            edge_mass,
            unitarity_defect: Some(defect),
            trace_drift: None,
            flagged: edge_mass > EDGE_MASS_TOL || defect > 1e-8,
        }
    }
}

pub fn truncation_health<T: Truncated>(x: &T) -> HealthMetrics {
    x.health_metrics()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn basis_vec(n: usize, dim: usize) -> DVector<Complex64> {
        let mut v = DVector::from_element(dim, zero());
        v[n] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn ladder_action_and_number_operator() {
        let l = ladder_operators(3).unwrap();
        let a = l.annihilate.matrix();
        assert_eq!(a * basis_vec(1, 3), basis_vec(0, 3));
        let a2 = a * basis_vec(2, 3);
        assert_relative_eq!(a2[1].re, 2f64.sqrt(), epsilon = 1e-15);
        for j in 0..3 {
            assert_relative_eq!(l.number.matrix()[(j, j)].re, j as f64);
        }
        assert!(ladder_operators(1).is_err());
    }

    #[test]
    fn commutator_is_identity_away_from_edge() {
        let l = ladder_operators(4).unwrap();
        let a = l.annihilate.matrix();
        let ad = l.create.matrix();
        let c = a * ad - ad * a;
        for j in 0..3 {
            for k in 0..3 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert_relative_eq!(c[(j, k)].re, want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn weyl_zero_is_identity() {
        let w = weyl_operator([0.0, 0.0], 6).unwrap();
        assert_eq!(w.matrix(), &CMat::identity(6, 6));
        assert!(weyl_operator([f64::NAN, 0.0], 6).is_err());
    }

    #[test]
    fn weyl_matches_direct_exponential_of_generator() {
        let dim = 24;
        let xi = [0.3, -0.2];
        let (q, p) = quadratures(dim).unwrap();
        let s = (2.0 * PI).sqrt();
        let g = (p.matrix().map(|z| z * xi[0]) - q.matrix().map(|z| z * xi[1])).map(|z| z * s);
        let eig = HermitianEigen::new(&g);
        let n = dim;
        let mut scaled = eig.vectors.clone();
        for c in 0..n {
            let ph = Complex64::from_polar(1.0, eig.values[c]);
            for r in 0..n {
                scaled[(r, c)] *= ph;
            }
        }
        let direct = &scaled * eig.vectors.adjoint();
        let w = weyl_operator(xi, dim).unwrap();
        assert!(linalg::frobenius(&(direct - w.matrix())) < 1e-10);
    }

    #[test]
    fn weyl_composition_law_on_interior() {
        let dim = 128;
        let xi = [0.3, -0.4];
        let eta = [-0.2, 0.35];
        let wx = weyl_operator(xi, dim).unwrap();
        let we = weyl_operator(eta, dim).unwrap();
        let ws = weyl_operator([xi[0] + eta[0], xi[1] + eta[1]], dim).unwrap();
        let phase = Complex64::from_polar(1.0, -PI * (xi[0] * eta[1] - xi[1] * eta[0]));
        let diff = linalg::matmul(wx.matrix(), we.matrix()) - ws.matrix().map(|z| z * phase);
        let half = dim / 2;
        let block = diff.view((0, 0), (half, half)).clone_owned();
        assert!(linalg::frobenius(&block) < 1e-6, "{}", linalg::frobenius(&block));
    }

    #[test]
    fn displaced_vacuum_mean_position() {
        // W((θ,0)) = exp(i√(2π)θP) moves ⟨Q⟩ by −√(2π)θ.
        let dim = 128;
        let theta = 0.1;
        let vac = number_state(0, dim).unwrap();
        let out = displace(&vac, [theta, 0.0]).unwrap();
        let (q, _) = quadratures(dim).unwrap();
        let mean_q = linalg::trace_product(out.matrix(), q.matrix()).re;
        let want = -(2.0 * PI).sqrt() * theta;
        assert!(((mean_q - want) / want).abs() < 1e-6, "{mean_q} vs {want}");
    }

    #[test]
    fn thermal_entropy_and_mean() {
        let w1 = thermal_state(1.0, 64).unwrap();
        assert_relative_eq!(von_neumann_entropy(&w1), 2.0 * 2f64.ln(), epsilon = 1e-8);
        assert_relative_eq!(mean_photon(&w1), 1.0, epsilon = 1e-8);
        assert_relative_eq!(entropy_power(&w1), 4.0, epsilon = 1e-8);
        let w = thermal_state(2.5, 128).unwrap();
        assert_relative_eq!(mean_photon(&w), 2.5, epsilon = 1e-6);
        let vac = thermal_state(0.0, 8).unwrap();
        assert_eq!(vac.populations()[0], 1.0);
    }

    #[test]
    fn thermal_truncation_error_names_dim() {
        match thermal_state(10.0, 16) {
            Err(Error::Truncation { suggested_dim: Some(d), .. }) => {
                assert!(thermal_state(10.0, d).is_ok());
                assert!(d > 16);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn number_states() {
        assert!(number_state(4, 4).is_err());
        let s = number_state(3, 16).unwrap();
        assert_eq!(mean_photon(&s), 3.0);
        assert_eq!(von_neumann_entropy(&number_state(2, 16).unwrap()), 0.0);
        let mm = DensityMatrix::from_populations(&[0.25; 4]).unwrap();
        assert_relative_eq!(von_neumann_entropy(&mm), 4f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn relative_entropy_cases() {
        let w1 = thermal_state(1.0, 64).unwrap();
        let w2 = thermal_state(2.0, 64).unwrap_or_else(|_| thermal_state_with_tol(2.0, 64, 1e-8).unwrap());
        assert!(relative_entropy(&w1, &w1).unwrap().abs() < 1e-10);
        let vac = number_state(0, 64).unwrap();
        assert_relative_eq!(relative_entropy(&vac, &w1).unwrap(), 2f64.ln(), epsilon = 1e-8);
        assert!(relative_entropy(&w2, &w1).unwrap() > 0.0);
        assert_eq!(relative_entropy(&w1, &vac).unwrap(), f64::INFINITY);
        let h = Complex64::new(0.5, 0.0);
        let plus =
            DensityMatrix::new(CMat::from_fn(4, 4, |j, k| if j < 2 && k < 2 { h } else { zero() })).unwrap();
        let mixed = DensityMatrix::from_populations(&[0.25; 4]).unwrap();
        assert!(matches!(relative_entropy(&mixed, &plus), Err(Error::IllConditioned(_))));
        assert!(relative_entropy(&w1, &thermal_state(1.0, 40).unwrap()).is_err());
    }

    #[test]
    fn random_states_are_valid_and_deterministic() {
        for fam in [RandomFamily::FullRank, RandomFamily::Diagonal, RandomFamily::PureMixedEps] {
            let a = random_state(32, 11, fam).unwrap();
            let b = random_state(32, 11, fam).unwrap();
            assert_eq!(a, b);
            assert!(DensityMatrix::new(a.matrix().clone()).is_ok());
            assert!(a.min_eigenvalue() > 0.0, "{fam:?}");
        }
        assert!(random_state(1, 0, RandomFamily::FullRank).is_err());
        let big = random_state(128, 5, RandomFamily::FullRank).unwrap();
        assert!(big.min_eigenvalue() > 1e-12, "{}", big.min_eigenvalue());
        assert!(big.health().edge_mass < 1e-8);
    }

    #[test]
    fn rearrangement_examples() {
        let one = number_state(1, 4).unwrap();
        let r = fock_rearrangement(&one);
        assert_relative_eq!(r.populations()[0], 1.0, epsilon = 1e-12);
        let d = DensityMatrix::from_populations(&[0.2, 0.5, 0.3]).unwrap();
        let r = fock_rearrangement(&d);
        let p = r.populations();
        for (x, y) in p.iter().zip([0.5, 0.3, 0.2]) {
            assert_relative_eq!(*x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn majorization_examples() {
        let eq = majorizes(&[0.7, 0.3], &[0.7, 0.3], MajorizationMode::WeakSub).unwrap();
        assert!(eq.holds && eq.margins.iter().all(|&m| m == 0.0));
        assert!(majorizes(&[1.0, 0.0], &[0.5, 0.5], MajorizationMode::WeakSub).unwrap().holds);
        assert!(!majorizes(&[0.5, 0.5], &[1.0, 0.0], MajorizationMode::WeakSub).unwrap().holds);
        assert!(majorizes(&[1.0], &[0.5, 0.5], MajorizationMode::Full).is_err());
        // Full needs equal totals.
        assert!(!majorizes(&[1.0, 0.0], &[0.4, 0.4], MajorizationMode::Full).unwrap().holds);
        assert!(majorizes(&[1.0, 0.0], &[0.4, 0.4], MajorizationMode::WeakSub).unwrap().holds);
    }

    #[test]
    fn health_of_vacuum_thermal_and_bad_weyl() {
        assert_eq!(number_state(0, 32).unwrap().health().edge_mass, 0.0);
        // top 8 of 64 levels of ω₁: Σ_{j=56}^{63} 2^{-(j+1)}
        let tail: f64 = (56..64).map(|j| 0.5f64.powi(j + 1)).sum();
        let h = thermal_state(1.0, 64).unwrap().health();
        assert!((h.edge_mass - tail).abs() < 1e-25);
        assert!(h.edge_mass < 1e-16 && !h.flagged);
        let bad = weyl_operator([3.0, 0.0], 8).unwrap().health();
        assert!(bad.flagged && bad.unitarity_defect.unwrap() > 1e-3, "{bad:?}");
        let good = weyl_operator([0.1, 0.0], 128).unwrap().health();
        assert!(good.unitarity_defect.unwrap() < 1e-8, "{:?}", good);
    }

    #[test]
    fn detect_thermal_roundtrip() {
        let w = thermal_state(1.7, 64).unwrap();
        assert_relative_eq!(detect_thermal(&w, 1e-12).unwrap(), 1.7, epsilon = 1e-12);
        let r = random_state(16, 1, RandomFamily::FullRank).unwrap();
        assert!(detect_thermal(&r, 1e-12).is_none());
    }
}
