use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{threshold_solve, CaseSpec, Outcome, SuiteConfig, Threshold};
use crate::classical::{
    big_f, death_entropy_rate, death_evolve, geometric_pmf, min_entropy_rate_constrained, ClassicalPMF,
    DeathOptions, MinimizeOptions,
};
use crate::error::{Error, Result};
use crate::fisher::{
    entropy_power_second_difference, inverse_fisher_slope, quantum_fisher, stam_margin_with,
    DEFAULT_CONCAVITY_STEP, DEFAULT_FISHER_STEP, DEFAULT_HEAT_STEP,
};
use crate::fock::{
    entropy_power, fock_rearrangement, majorizes_states, mean_photon, number_state, random_state,
    random_state_with_envelope, thermal_state, von_neumann_entropy, DensityMatrix, HealthMetrics,
    MajorizationMode, RandomFamily, EDGE_MASS_TOL,
};
use crate::gaussian::{
    cou_step, fisher_isoperimetric_ratio, g_entropy, g_prime, gaussian_decay_margin, gaussian_evolve,
    h_function, h_minimize, j_pm_gaussian, relent_to_qou_fixed, thermal_entropy_power, thermal_fisher_closed,
    thermal_isoperimetric_product, thermal_relent_rate, zeta_optimality_witness, ClassicalOUParams,
    GaussianStateSpec, FOUR_PI_E,
};
use crate::semigroups::{
    convolve_with, entropy_rate, evolve, evolve_many, relent_decay_rate, DecayRate, PhaseDensity,
    QuadratureRule, SemigroupKind, SolverOptions, DEFAULT_QUAD_ORDER, DEFAULT_RATE_STEP,
};

type Maker<T> = Box<dyn Fn() -> Result<T> + Send + Sync>;

/// Suites that bind a proved inequality or identity.
pub const SPEC_SUITES: [&str; 13] = [
    "data-processing",
    "stam",
    "de-bruijn",
    "fisher-isoperimetry",
    "concavity",
    "epi-heat",
    "entropy-isoperimetry",
    "majorization",
    "correspondence",
    "geometric-optimality",
    "rate-decay-identity",
    "log-sobolev",
    "cou",
];

/// Closed-form tables, threshold examples and the amplifier rate bound.
pub const EXTRA_SUITES: [&str; 6] =
    ["appendix-b", "appendix-c", "appendix-d", "jplus-bound", "threshold-0.67", "threshold-2.06"];

pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SPEC_SUITES.iter().chain(EXTRA_SUITES.iter()).copied()
}

fn config(
    name: &str,
    dim: usize,
    cases: usize,
    tolerance: f64,
    time_grid: &[f64],
    extra: &[(&str, f64)],
) -> SuiteConfig {
    SuiteConfig {
        suite_name: name.to_string(),
        dim,
        cases,
        seed: 0,
        tolerance,
        time_grid: time_grid.to_vec(),
        extra: extra.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
    }
}

pub(super) fn default_config(name: &str) -> Result<SuiteConfig> {
    let sqrt2 = 2f64.sqrt();
    let c = match name {
        // quad_order 0 selects the closed-form Gaussian average.
        "data-processing" => config(name, 64, 10, 1e-6, &[0.1], &[("quad_order", 0.0)]),
        "stam" => {
            config(name, 128, 20, 1e-3, &[0.02, 0.05, 0.1], &[("quad_order", DEFAULT_QUAD_ORDER as f64)])
        }
        "de-bruijn" => config(name, 128, 10, 2e-2, &[], &[]),
        "fisher-isoperimetry" => config(name, 128, 6, 1e-2, &[], &[]),
        "concavity" => config(name, 128, 10, 1e-3, &[], &[]),
        "epi-heat" => config(
            name,
            128,
            10,
            1e-3,
            &[0.05, 0.1, 0.5],
            &[("numeric_tolerance", 1e-2), ("numeric_tmax", 0.1)],
        ),
        "entropy-isoperimetry" => config(name, 128, 50, 0.1, &[], &[]),
        "majorization" => config(name, 12, 100, 1e-10, &[0.1, 0.5, 1.0], &[]),
        "correspondence" => config(name, 64, 5, 1e-3, &[0.5], &[]),
        "geometric-optimality" => config(name, 64, 8, 1e-3, &[], &[]),
        "rate-decay-identity" => config(name, 64, 5, 1e-3, &[], &[("mu", sqrt2), ("lambda", 1.0)]),
        "log-sobolev" => config(name, 64, 6, 1e-3, &[], &[("mu", sqrt2), ("lambda", 1.0)]),
        "cou" => config(name, 2, 1, 1e-12, &[0.0, 0.5, 2.0], &[]),
        "appendix-b" => config(name, 128, 1, 1e-4, &[], &[]),
        "appendix-c" => config(name, 128, 1, 1e-2, &[], &[]),
        "appendix-d" => config(name, 2, 20, 1e-12, &[], &[("epsilon", 0.5)]),
        "jplus-bound" => config(name, 128, 5, 1e-2, &[], &[]),
        "threshold-0.67" => config(name, 64, 8, 1e-3, &[], &[]),
        "threshold-2.06" => config(name, 128, 6, 1e-3, &[], &[]),
        _ => return Err(Error::UnknownSuite(name.to_string())),
    };
    Ok(c)
}

pub(super) fn build(cfg: &SuiteConfig) -> Result<Vec<CaseSpec>> {
    let cases = match cfg.suite_name.as_str() {
        "data-processing" => data_processing(cfg),
        "stam" => stam(cfg),
        "de-bruijn" => de_bruijn(cfg),
        "fisher-isoperimetry" => fisher_isoperimetry(cfg),
        "concavity" => concavity(cfg),
        "epi-heat" => epi_heat(cfg),
        "entropy-isoperimetry" => entropy_isoperimetry(cfg),
        "majorization" => majorization(cfg),
        "correspondence" => correspondence(cfg),
        "geometric-optimality" => geometric_optimality(cfg),
        "rate-decay-identity" => rate_decay_identity(cfg),
        "log-sobolev" => log_sobolev(cfg),
        "cou" => cou(cfg),
        "appendix-b" => appendix_b(cfg),
        "appendix-c" => appendix_c(cfg),
        "appendix-d" => appendix_d(cfg),
        "jplus-bound" => jplus_bound(cfg),
        "threshold-0.67" => threshold_photon(cfg),
        "threshold-2.06" => threshold_entropy(cfg),
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(cases)
}

// ---- shared helpers -------------------------------------------------------

fn case_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

const FAMILIES: [RandomFamily; 3] =
    [RandomFamily::FullRank, RandomFamily::Diagonal, RandomFamily::PureMixedEps];

fn family_label(f: RandomFamily) -> &'static str {
    match f {
        RandomFamily::FullRank => "full-rank",
        RandomFamily::Diagonal => "diagonal",
        RandomFamily::PureMixedEps => "pure+eps",
    }
}

fn random_label(f: RandomFamily, seed: u64) -> String {
    format!("random {} seed={seed}", family_label(f))
}

/// Health of `rho`, or a truncation error once its edge mass is too large
/// for the margin to be trusted.
fn checked(rho: &DensityMatrix) -> Result<HealthMetrics> {
    let h = rho.health();
    if h.edge_mass > EDGE_MASS_TOL {
        return Err(Error::Truncation {
            edge_mass: h.edge_mass,
            tolerance: EDGE_MASS_TOL,
            suggested_dim: None,
        });
    }
    Ok(h)
}

/// `−|a − b| / |b|`, or the absolute gap when `b` vanishes.
fn agreement(numeric: f64, reference: f64) -> f64 {
    let gap = (numeric - reference).abs();
    if reference == 0.0 {
        -gap
    } else {
        -gap / reference.abs()
    }
}

/// `D(ω_a ‖ ω_b) = −g(a) − a log(b/(b+1)) + log(b+1)`.
fn thermal_relent(a: f64, b: f64) -> f64 {
    -g_entropy(a) - a * (b / (b + 1.0)).ln() + b.ln_1p()
}

/// Relative entropy between bivariate Gaussian densities.
fn gaussian_kl(m1: [f64; 2], c1: [[f64; 2]; 2], m2: [f64; 2], c2: [[f64; 2]; 2]) -> f64 {
    let det1 = c1[0][0] * c1[1][1] - c1[0][1] * c1[1][0];
    let det2 = c2[0][0] * c2[1][1] - c2[0][1] * c2[1][0];
    let inv2 = [[c2[1][1] / det2, -c2[0][1] / det2], [-c2[1][0] / det2, c2[0][0] / det2]];
    let tr = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| inv2[i][j] * c1[j][i]);
    let d = [m2[0] - m1[0], m2[1] - m1[1]];
    let quad: f64 =
        (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| d[i] * inv2[i][j] * d[j]).sum();
    0.5 * (tr.sum::<f64>() + quad - 2.0 + (det2 / det1).ln())
}

fn qou_params(cfg: &SuiteConfig) -> (f64, f64) {
    (cfg.extra_or("mu", 2f64.sqrt()), cfg.extra_or("lambda", 1.0))
}

// ---- suites ---------------------------------------------------------------

/// `D(f⋆ρ ‖ g⋆σ) ≤ D(f‖g) + D(ρ‖σ)`.
fn data_processing(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let t = cfg.time_grid.first().copied().unwrap_or(0.1);
    let order = cfg.extra_or("quad_order", 0.0) as usize;
    let rule = if order == 0 { QuadratureRule::Exact } else { QuadratureRule::GaussHermite(order) };
    let mut out = Vec::new();
    for (a, b) in [(0.5, 2.0), (1.0, 0.3)] {
        let family = format!("thermal a={a} b={b}");
        out.push(
            CaseSpec::asserted(family, cfg.tolerance, move || {
                let shift = SemigroupKind::Heat.thermal_photon_map(0.0, t);
                let before = thermal_relent(a, b);
                let after = thermal_relent(a + shift, b + shift);
                Ok(Outcome::new(before - after).value("relent_in", before).value("relent_out", after))
            })
            .param("t", t),
        );
    }
    let (dim, seed) = (cfg.dim, cfg.seed);
    for i in 0..cfg.cases {
        let s = case_seed(seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        // Diagonal covariances keep the two averages on the same displacement axes.
        let cf = [[rng.random_range(0.3..2.0), 0.0], [0.0, rng.random_range(0.3..2.0)]];
        let cg = [[rng.random_range(0.3..2.0), 0.0], [0.0, rng.random_range(0.3..2.0)]];
        let fam_r = FAMILIES[i % 3];
        let fam_s = FAMILIES[(i + 1) % 3];
        let label = format!("{} vs {}", random_label(fam_r, s), random_label(fam_s, s + 1));
        out.push(
            CaseSpec::asserted(label, cfg.tolerance, move || {
                let rho = random_state(dim, s, fam_r)?;
                let sigma = random_state(dim, s + 1, fam_s)?;
                let f = PhaseDensity::gaussian([0.0; 2], cf)?;
                let g = PhaseDensity::gaussian([0.0; 2], cg)?;
                let rho_t = convolve_with(&f, &rho, t, rule)?;
                let sigma_t = convolve_with(&g, &sigma, t, rule)?;
                let health = checked(&rho_t.state)?;
                checked(&sigma_t.state)?;
                let classical = gaussian_kl([0.0; 2], cf, [0.0; 2], cg);
                let quantum = crate::fock::relative_entropy(&rho, &sigma)?;
                let output = crate::fock::relative_entropy(&rho_t.state, &sigma_t.state)?;
                Ok(Outcome::new(classical + quantum - output)
                    .value("relent_density", classical)
                    .value("relent_state", quantum)
                    .value("relent_output", output)
                    .value("quadrature_error", rho_t.quadrature_error + sigma_t.quadrature_error)
                    .health(health))
            })
            .param("t", t)
            .param("f_var_q", cf[0][0])
            .param("f_var_p", cf[1][1])
            .param("g_var_q", cg[0][0])
            .param("g_var_p", cg[1][1]),
        );
    }
    out
}

/// `J(f⋆ₜρ)⁻¹ − J(ρ)⁻¹ − t J(f)⁻¹ ≥ 0` with `f = f_Z`.
fn stam(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let order = cfg.extra_or("quad_order", DEFAULT_QUAD_ORDER as f64) as usize;
    let rule = if order == 0 { QuadratureRule::Exact } else { QuadratureRule::GaussHermite(order) };
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let mut out = Vec::new();
    for &t in &cfg.time_grid {
        out.push(
            CaseSpec::asserted("thermal n=1 closed form", tol, move || {
                let shift = SemigroupKind::Heat.thermal_photon_map(0.0, t);
                let j_in = thermal_fisher_closed(1.0)?;
                let j_out = thermal_fisher_closed(1.0 + shift)?;
                let j_f = crate::fisher::classical_fisher_gaussian(&[[1.0, 0.0], [0.0, 1.0]])?;
                Ok(Outcome::new(1.0 / j_out - 1.0 / j_in - t / j_f))
            })
            .param("t", t),
        );
        out.push(
            CaseSpec::asserted("thermal n=1 numeric vs closed form", tol, move || {
                let rho = thermal_state(1.0, dim)?;
                let m = stam_margin_with(
                    &PhaseDensity::standard(),
                    &rho,
                    t,
                    QuadratureRule::Exact,
                    DEFAULT_FISHER_STEP,
                )?;
                let shift = SemigroupKind::Heat.thermal_photon_map(0.0, t);
                let closed = 1.0 / thermal_fisher_closed(1.0 + shift)?
                    - 1.0 / thermal_fisher_closed(1.0)?
                    - t / m.fisher_density;
                Ok(Outcome::new(-(m.margin - closed).abs())
                    .value("numeric", m.margin)
                    .value("closed_form", closed))
            })
            .param("t", t),
        );
    }
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        for &t in &cfg.time_grid {
            out.push(
                CaseSpec::asserted(random_label(RandomFamily::FullRank, s), tol, move || {
                    let rho = random_state(dim, s, RandomFamily::FullRank)?;
                    let m = stam_margin_with(&PhaseDensity::standard(), &rho, t, rule, DEFAULT_FISHER_STEP)?;
                    Ok(Outcome::new(m.margin)
                        .value("fisher_state", m.fisher_state)
                        .value("fisher_output", m.fisher_output)
                        .value("fisher_density", m.fisher_density)
                        .value("quadrature_error", m.quadrature_error)
                        .health(checked(&rho)?))
                })
                .param("t", t)
                .param("quad_order", order as f64),
            );
        }
    }
    out
}

/// `2 dS/dt = J` along the heat flow, as a relative gap.
fn de_bruijn(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let mut out = Vec::new();
    for n in [0.5, 1.0, 2.0, 4.0] {
        out.push(
            CaseSpec::asserted(format!("thermal n={n} closed form"), tol, move || {
                let tau = 1e-5;
                let shift = SemigroupKind::Heat.thermal_photon_map(0.0, tau);
                let rate = (g_entropy(n + shift) - g_entropy(n - shift)) / tau;
                let j = thermal_fisher_closed(n)?;
                Ok(Outcome::new(agreement(rate, j)))
            })
            .param("n", n),
        );
    }
    let mut states: Vec<(String, Maker<DensityMatrix>)> = Vec::new();
    for n in [0.5, 1.0, 2.0, 4.0] {
        states.push((format!("thermal n={n}"), Box::new(move || thermal_state(n, dim))));
    }
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        states.push((
            random_label(RandomFamily::FullRank, s),
            Box::new(move || random_state(dim, s, RandomFamily::FullRank)),
        ));
    }
    for (label, make) in states {
        out.push(CaseSpec::asserted(label, tol, move || {
            let rho = make()?;
            let rate = entropy_rate(&rho, SemigroupKind::Heat, DEFAULT_RATE_STEP, &SolverOptions::numeric())?;
            let j = quantum_fisher(&rho, DEFAULT_FISHER_STEP)?;
            Ok(Outcome::new(agreement(rate.value, j.value))
                .value("entropy_rate", rate.value)
                .value("entropy_rate_error", rate.error_estimate)
                .value("fisher", j.value)
                .health(checked(&rho)?))
        }));
    }
    out
}

/// `d/dt [J(e^{tL}ρ)/2]⁻¹ ≥ 1`.
fn fisher_isoperimetry(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let mut out = Vec::new();
    for n in [0.1, 1.0, 4.0, 100.0] {
        out.push(
            CaseSpec::asserted(format!("thermal n={n} closed form"), tol, move || {
                Ok(Outcome::new(fisher_isoperimetric_ratio(n)? - 1.0))
            })
            .param("n", n),
        );
    }
    out.push(
        CaseSpec::asserted("thermal n=4 numeric vs closed form", 2e-2, move || {
            let rho = thermal_state(4.0, dim)?;
            let slope = inverse_fisher_slope(
                &rho,
                DEFAULT_HEAT_STEP,
                DEFAULT_FISHER_STEP,
                &SolverOptions::numeric(),
            )?;
            let closed = fisher_isoperimetric_ratio(4.0)?;
            Ok(Outcome::new(agreement(slope.value, closed))
                .value("numeric", slope.value)
                .value("closed_form", closed)
                .health(checked(&rho)?))
        })
        .param("n", 4.0),
    );
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        out.push(CaseSpec::asserted(random_label(RandomFamily::FullRank, s), tol, move || {
            let rho = random_state(dim, s, RandomFamily::FullRank)?;
            let slope = inverse_fisher_slope(
                &rho,
                DEFAULT_HEAT_STEP,
                DEFAULT_FISHER_STEP,
                &SolverOptions::numeric(),
            )?;
            Ok(Outcome::new(slope.value - 1.0)
                .value("slope", slope.value)
                .value("slope_error", slope.error_estimate)
                .health(checked(&rho)?))
        }));
    }
    out
}

/// `d²/dt² N(e^{tL_heat}ρ) ≤ 0`.
fn concavity(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let mut out = Vec::new();
    for n in [0.5, 1.0, 2.0, 4.0] {
        out.push(
            CaseSpec::asserted(format!("thermal n={n} closed form"), tol, move || {
                // N(ω_{n+2πt}) = e^{g}: second derivative (2π)² e^g (g'² + g'').
                let gp = g_prime(n);
                let gpp = -1.0 / (n * (n + 1.0));
                let d2 = (2.0 * PI).powi(2) * thermal_entropy_power(n) * (gp * gp + gpp);
                Ok(Outcome::new(-d2))
            })
            .param("n", n),
        );
        out.push(
            CaseSpec::asserted(format!("thermal n={n}"), tol, move || {
                let rho = thermal_state(n, dim)?;
                let d2 =
                    entropy_power_second_difference(&rho, DEFAULT_CONCAVITY_STEP, &SolverOptions::numeric())?;
                Ok(Outcome::new(-d2).value("second_difference", d2).health(checked(&rho)?))
            })
            .param("n", n),
        );
    }
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        out.push(CaseSpec::asserted(random_label(RandomFamily::FullRank, s), tol, move || {
            let rho = random_state(dim, s, RandomFamily::FullRank)?;
            let d2 =
                entropy_power_second_difference(&rho, DEFAULT_CONCAVITY_STEP, &SolverOptions::numeric())?;
            Ok(Outcome::new(-d2).value("second_difference", d2).health(checked(&rho)?))
        }));
    }
    out
}

/// `N(e^{tL_heat}ρ) ≥ N(ρ) + 2πe t`, and `dN/dt → 2πe`.
fn epi_heat(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let numeric_tol = cfg.extra_or("numeric_tolerance", 1e-2);
    let numeric_tmax = cfg.extra_or("numeric_tmax", 0.1);
    let mut out = Vec::new();
    for n in [0.5, 1.0, 2.0] {
        for &t in &cfg.time_grid {
            out.push(
                CaseSpec::asserted(format!("thermal n={n}"), tol, move || {
                    let rho = thermal_state(n, dim)?;
                    let rho_t = evolve(&rho, SemigroupKind::Heat, t, &SolverOptions::default())?;
                    let health = checked(&rho_t)?;
                    let closed = thermal_entropy_power(SemigroupKind::Heat.thermal_photon_map(n, t));
                    let n_t = entropy_power(&rho_t);
                    Ok(Outcome::new(n_t - entropy_power(&rho) - 2.0 * PI * E * t)
                        .value("entropy_power_out", n_t)
                        .value("closed_form_out", closed)
                        .health(health))
                })
                .param("n", n)
                .param("t", t),
            );
            out.push(
                CaseSpec::asserted(format!("thermal n={n} closed form"), tol, move || {
                    let closed = thermal_entropy_power(SemigroupKind::Heat.thermal_photon_map(n, t));
                    Ok(Outcome::new(closed - thermal_entropy_power(n) - 2.0 * PI * E * t))
                })
                .param("n", n)
                .param("t", t),
            );
        }
        out.push(
            CaseSpec::asserted(format!("thermal n={n} asymptotic slope"), 1e-2, move || {
                let at = |t: f64| thermal_entropy_power(SemigroupKind::Heat.thermal_photon_map(n, t));
                let slope = (at(4.0) - at(2.0)) / 2.0;
                Ok(Outcome::new(agreement(slope, 2.0 * PI * E)).value("slope", slope))
            })
            .param("n", n),
        );
    }
    let squeezed = GaussianStateSpec::new([0.5, -0.3], 2.0, 1.3, 0.4);
    out.push(CaseSpec::asserted("gaussian squeezed asymptotic slope", 1e-2, move || {
        let spec = squeezed.clone()?;
        let at =
            |t: f64| -> Result<f64> { Ok(gaussian_evolve(&spec, SemigroupKind::Heat, t)?.entropy().exp()) };
        let slope = (at(4.0)? - at(2.0)?) / 2.0;
        Ok(Outcome::new(agreement(slope, 2.0 * PI * E)).value("slope", slope))
    }));
    let times: Vec<f64> = cfg.time_grid.iter().copied().filter(|&t| t <= numeric_tmax).collect();
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        let t_max = times.last().copied().unwrap_or(0.0);
        let times = times.clone();
        out.push(
            CaseSpec::asserted(random_label(RandomFamily::FullRank, s), numeric_tol, move || {
                let rho = random_state(dim, s, RandomFamily::FullRank)?;
                let states = evolve_many(&rho, SemigroupKind::Heat, &times, &SolverOptions::numeric())?;
                let n0 = entropy_power(&rho);
                let mut worst = f64::INFINITY;
                let mut outcome_values = Vec::new();
                let mut health = checked(&rho)?;
                for (t, st) in times.iter().zip(&states) {
                    health = checked(st)?;
                    let m = entropy_power(st) - n0 - 2.0 * PI * E * t;
                    outcome_values.push((format!("margin_t{t}"), m));
                    worst = worst.min(m);
                }
                let mut o = Outcome::new(worst).health(health);
                for (k, v) in outcome_values {
                    o = o.value(k, v);
                }
                Ok(o)
            })
            .param("t_max", t_max),
        );
    }
    out
}

/// `J(ρ) N(ρ) ≥ 4πe`.
fn entropy_isoperimetry(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let mut out = vec![CaseSpec::asserted("thermal n=100 closed form tightness", 1e-2, || {
        let p = thermal_isoperimetric_product(100.0)?;
        Ok(Outcome::new(agreement(p, FOUR_PI_E)).value("product", p))
    })
    .param("n", 100.0)];
    for n in [0.1, 1.0, 10.0] {
        out.push(
            CaseSpec::asserted(format!("thermal n={n} closed form"), tol, move || {
                Ok(Outcome::new(thermal_isoperimetric_product(n)? - FOUR_PI_E))
            })
            .param("n", n),
        );
    }
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        out.push(CaseSpec::asserted(random_label(RandomFamily::FullRank, s), tol, move || {
            let rho = random_state(dim, s, RandomFamily::FullRank)?;
            let j = quantum_fisher(&rho, DEFAULT_FISHER_STEP)?.value;
            let n = entropy_power(&rho);
            Ok(Outcome::new(j * n - FOUR_PI_E)
                .value("fisher", j)
                .value("entropy_power", n)
                .health(checked(&rho)?))
        }));
    }
    out
}

/// `e^{tL₋}(ρ↓)` majorizes `e^{tL₋}(ρ)`, and `tr(ρ↓ n̂) ≤ tr(ρ n̂)`.
fn majorization(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let mut out = Vec::new();
    let k = (dim - 1).min(3);
    out.push(
        CaseSpec::asserted(format!("number state k={k}"), tol, move || {
            let rho = number_state(k, dim)?;
            let gap = mean_photon(&rho) - mean_photon(&fock_rearrangement(&rho));
            Ok(Outcome::new(-(gap - k as f64).abs()).value("photon_gap", gap))
        })
        .param("k", k as f64),
    );
    for &t in &cfg.time_grid {
        out.push(
            CaseSpec::asserted("thermal n=0.1 (already rearranged)", tol, move || {
                let rho = thermal_state(0.1, dim)?;
                let down = fock_rearrangement(&rho);
                let drift = (down.matrix() - rho.matrix()).norm();
                let opts = SolverOptions::numeric();
                let a = evolve(&down, SemigroupKind::Attenuator, t, &opts)?;
                let b = evolve(&rho, SemigroupKind::Attenuator, t, &opts)?;
                let check = majorizes_states(&a, &b, MajorizationMode::Full)?;
                Ok(Outcome::new(check.min_margin().min(-drift)).value("rearrangement_drift", drift))
            })
            .param("t", t),
        );
    }
    let times = cfg.time_grid.clone();
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        let fam = FAMILIES[i % 3];
        let times = times.clone();
        out.push(CaseSpec::asserted(random_label(fam, s), tol, move || {
            let rho = random_state(dim, s, fam)?;
            let down = fock_rearrangement(&rho);
            let opts = SolverOptions::numeric();
            let a = evolve_many(&down, SemigroupKind::Attenuator, &times, &opts)?;
            let b = evolve_many(&rho, SemigroupKind::Attenuator, &times, &opts)?;
            let mut o = Outcome::new(0.0);
            let mut worst = f64::INFINITY;
            for ((t, x), y) in times.iter().zip(&a).zip(&b) {
                let m = majorizes_states(x, y, MajorizationMode::Full)?.min_margin();
                o = o.value(format!("majorization_t{t}"), m);
                worst = worst.min(m);
            }
            let photon_gap = mean_photon(&rho) - mean_photon(&down);
            o.margin = worst.min(photon_gap);
            Ok(o.value("photon_gap", photon_gap).health(checked(&rho)?))
        }));
    }
    out
}

/// The attenuator on number-diagonal states is the pure-death process.
fn correspondence(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let t = cfg.time_grid.first().copied().unwrap_or(0.5);
    let mut out = Vec::new();
    let mut states: Vec<(String, Maker<Vec<f64>>)> = Vec::new();
    for n in [0.5, 1.0, 2.0] {
        out.push(
            CaseSpec::asserted(format!("geometric n={n} closed form"), 1e-6, move || {
                let p = geometric_pmf(n, dim - 1)?;
                let rate = death_entropy_rate(&p)?;
                let closed = -2.0 * n * g_prime(n);
                Ok(Outcome::new(agreement(rate, closed)).value("rate", rate))
            })
            .param("n", n),
        );
        states.push((
            format!("geometric n={n}"),
            Box::new(move || Ok(geometric_pmf(n, dim - 1)?.probs().to_vec())),
        ));
    }
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        states.push((
            random_label(RandomFamily::Diagonal, s),
            Box::new(move || Ok(random_state(dim, s, RandomFamily::Diagonal)?.populations())),
        ));
    }
    for (label, make) in states {
        let make = std::sync::Arc::new(make);
        let make2 = make.clone();
        out.push(CaseSpec::asserted(format!("{label} rate"), tol, move || {
            let probs = make()?;
            let pmf = ClassicalPMF::new(probs.clone())?;
            let rho = DensityMatrix::from_populations(&probs)?;
            let quantum =
                entropy_rate(&rho, SemigroupKind::Attenuator, DEFAULT_RATE_STEP, &SolverOptions::numeric())?;
            let classical = death_entropy_rate(&pmf)?;
            Ok(Outcome::new(agreement(quantum.value, classical))
                .value("fock_rate", quantum.value)
                .value("death_rate", classical)
                .health(checked(&rho)?))
        }));
        out.push(
            CaseSpec::asserted(format!("{label} evolution"), 1e-8, move || {
                let probs = make2()?;
                let pmf = ClassicalPMF::new(probs.clone())?;
                let rho = DensityMatrix::from_populations(&probs)?;
                let quantum = evolve(&rho, SemigroupKind::Attenuator, t, &SolverOptions::numeric())?;
                let classical = death_evolve(&pmf, t, &DeathOptions::default())?;
                let tv = ClassicalPMF::new(quantum.populations())?.total_variation(&classical)?;
                let coherence = quantum.off_diagonal_norm();
                Ok(Outcome::new(-(tv + coherence)).value("total_variation", tv).value("coherence", coherence))
            })
            .param("t", t),
        );
    }
    out
}

/// The constrained minimum of `J₋` is attained by the geometric law.
fn geometric_optimality(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (k, tol) = (cfg.dim, cfg.tolerance);
    let opts = MinimizeOptions { starts: cfg.cases, seed: cfg.seed, ..MinimizeOptions::default() };
    let mut out = Vec::new();
    for n in [0.5, 1.0, 2.0] {
        let bound = -2.0 * n * g_prime(n);
        out.push(
            CaseSpec::asserted(format!("geometric n={n} closed form"), 1e-6, move || {
                let rate = death_entropy_rate(&geometric_pmf(n, k)?)?;
                Ok(Outcome::new(agreement(rate, bound)).value("rate", rate))
            })
            .param("n", n),
        );
        out.push(
            CaseSpec::asserted(format!("minimizer n={n} K={k}"), tol, move || {
                let min = min_entropy_rate_constrained(n, k, &opts)?;
                let worst_start = min.starts.iter().map(|s| s.rate - bound).fold(f64::INFINITY, f64::min);
                let mut o = Outcome::new(-(min.j_star - bound).abs())
                    .value("j_star", min.j_star)
                    .value("bound", bound)
                    .value("min_start_excess", worst_start)
                    .value("mean", min.p_star.mean());
                for s in &min.starts {
                    o = o.value(format!("start_{}", s.label), s.rate);
                }
                Ok(o)
            })
            .param("n", n)
            .param("K", k as f64)
            .param("starts", opts.starts as f64),
        );
        out.push(
            CaseSpec::asserted(format!("thermal n={n} attenuator rate"), tol, move || {
                let rho = thermal_state(n, k)?;
                let rate = entropy_rate(
                    &rho,
                    SemigroupKind::Attenuator,
                    DEFAULT_RATE_STEP,
                    &SolverOptions::numeric(),
                )?;
                // entropy_rate is 2 dS/dt; the closed form is dS/dt.
                let closed = -n * g_prime(n);
                Ok(Outcome::new(-(rate.value / 2.0 - closed).abs())
                    .value("ds_dt", rate.value / 2.0)
                    .value("closed_form", closed)
                    .health(checked(&rho)?))
            })
            .param("n", n),
        );
    }
    out
}

fn decay_rate_of(rho: &DensityMatrix, mu: f64, lambda: f64) -> Result<DecayRate> {
    relent_decay_rate(rho, mu, lambda, DEFAULT_RATE_STEP, &SolverOptions::numeric())
}

/// Numeric `dD/dt` against the value assembled from `J₋, J₊, S`.
fn rate_decay_identity(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let (mu, lambda) = qou_params(cfg);
    let n = 2.0;
    let mut out = vec![
        CaseSpec::asserted("thermal n=2 closed-form identity", 1e-12, move || {
            let zeta = mu * mu - lambda * lambda;
            let d = relent_to_qou_fixed(g_entropy(n), n, mu, lambda)?;
            let lhs = -zeta * d - thermal_relent_rate(n, mu, lambda)?;
            let h = h_function(n, mu, lambda)?;
            Ok(Outcome::new(-(lhs - h).abs()).value("h", h))
        }),
        CaseSpec::asserted("thermal n=2 numeric vs closed-form rate", tol, move || {
            let rho = thermal_state(n, dim)?;
            let r = decay_rate_of(&rho, mu, lambda)?;
            let closed = thermal_relent_rate(n, mu, lambda)?;
            Ok(Outcome::new(agreement(r.rate.value, closed))
                .value("numeric", r.rate.value)
                .value("closed_form", closed))
        }),
    ];
    let mut states: Vec<(String, Maker<DensityMatrix>)> =
        vec![(format!("thermal n={n}"), Box::new(move || thermal_state(n, dim)))];
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        states.push((
            random_label(RandomFamily::Diagonal, s),
            Box::new(move || random_state(dim, s, RandomFamily::Diagonal)),
        ));
    }
    for (label, make) in states {
        out.push(
            CaseSpec::asserted(label, tol, move || {
                let rho = make()?;
                let r = decay_rate_of(&rho, mu, lambda)?;
                Ok(Outcome::new(-r.relative_gap())
                    .value("rate", r.rate.value)
                    .value("rate_error", r.rate.error_estimate)
                    .value("assembled", r.assembled)
                    .value("relent", r.relent)
                    .value("j_minus", r.j_minus)
                    .value("j_plus", r.j_plus)
                    .health(checked(&rho)?))
            })
            .param("mu", mu)
            .param("lambda", lambda),
        );
    }
    out
}

/// Coefficients `(α₋, α₊, γ, δ)` of the lower bound on `−ζD − dD/dt`.
fn log_sobolev_coefficients(mu: f64, lambda: f64, zeta: f64, a: f64) -> (f64, f64, f64, f64) {
    let (mu2, la2) = (mu * mu, lambda * lambda);
    let nu = la2 / mu2;
    (
        mu2 / 2.0 - 2.0 * PI * a * zeta,
        la2 / 2.0 - 2.0 * PI * a * zeta,
        nu.ln() * (zeta - (mu2 - la2)),
        zeta * ((-nu).ln_1p() + 2.0 + (4.0 * PI * a).ln()) + la2 * nu.ln(),
    )
}

const LSI_SCALES: [(f64, f64); 4] = [(1.0, 1.0), (0.5, 1.0), (2.0, 1.0), (1.0, 0.5)];

fn log_sobolev(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let (mu, lambda) = qou_params(cfg);
    let zeta0 = mu * mu - lambda * lambda;
    let a0 = lambda * lambda / (4.0 * PI * zeta0);
    let mut out = Vec::new();
    for n in [0.5, 1.0, 2.0] {
        out.push(
            CaseSpec::asserted(format!("thermal n={n} closed form"), tol, move || {
                let (jm, jp) = j_pm_gaussian(2.0 * n + 1.0, 1.0)?;
                let d = relent_to_qou_fixed(g_entropy(n), n, mu, lambda)?;
                let rate = thermal_relent_rate(n, mu, lambda)?;
                let mut worst = f64::INFINITY;
                for (sa, sz) in LSI_SCALES {
                    let zeta = zeta0 * sz;
                    let (am, ap, g, dl) = log_sobolev_coefficients(mu, lambda, zeta, a0 * sa);
                    worst = worst.min(-zeta * d - rate - (am * jm + ap * jp + g * n + dl));
                }
                Ok(Outcome::new(worst))
            })
            .param("n", n),
        );
    }
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        let fam = if i % 2 == 0 { RandomFamily::FullRank } else { RandomFamily::Diagonal };
        let label = random_label(fam, s);
        out.push(CaseSpec::asserted(label.clone(), tol, move || {
            let rho = random_state(dim, s, fam)?;
            let r = decay_rate_of(&rho, mu, lambda)?;
            let n = mean_photon(&rho);
            let mut o = Outcome::new(0.0);
            let mut worst = f64::INFINITY;
            for (sa, sz) in LSI_SCALES {
                let zeta = zeta0 * sz;
                let (am, ap, g, dl) = log_sobolev_coefficients(mu, lambda, zeta, a0 * sa);
                let m = -zeta * r.relent - r.rate.value - (am * r.j_minus + ap * r.j_plus + g * n + dl);
                o = o.value(format!("margin_A{sa}_zeta{sz}"), m);
                worst = worst.min(m);
            }
            // The photon-number form with the default A and ζ.
            let (_, _, _, dl) = log_sobolev_coefficients(mu, lambda, zeta0, a0);
            let lhs = -zeta0 * r.relent - r.rate.value;
            let photon_form = lhs - (-zeta0 * n * g_prime(n) + dl);
            o.margin = worst.min(photon_form);
            Ok(o.value("photon_form", photon_form).value("mean_photon", n).health(checked(&rho)?))
        }));
        out.push(CaseSpec::reported(format!("{label} rate-zeta probe"), tol, move || {
            let rho = random_state(dim, s, fam)?;
            let r = decay_rate_of(&rho, mu, lambda)?;
            Ok(Outcome::new(-zeta0 * r.relent - r.rate.value).value("relent", r.relent))
        }));
    }
    out
}

/// The classical OU process contracts relative entropy at rate `2θ`.
fn cou(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let tol = cfg.tolerance;
    let mut out = vec![CaseSpec::asserted("tightness var0=1e6", 1e-3, || {
        let step = cou_step(&ClassicalOUParams::new(1.0, 2.0)?, 1e6, 0.0)?;
        let ratio = step.rate_margin / step.relent;
        Ok(Outcome::new(-ratio.abs()).value("margin_over_relent", ratio))
    })
    .param("var0", 1e6)];
    for theta in [0.5, 1.0, 2.0] {
        for sigma2 in [0.5, 1.0, 4.0] {
            for var0 in [1e-3, 0.1, 1.0, 10.0, 1e3] {
                for &t in &cfg.time_grid {
                    out.push(
                        CaseSpec::asserted(format!("gaussian var0={var0}"), tol, move || {
                            let step = cou_step(&ClassicalOUParams::new(theta, sigma2)?, var0, t)?;
                            Ok(Outcome::new(step.rate_margin)
                                .value("relent", step.relent)
                                .value("relent_rate", step.relent_rate))
                        })
                        .param("theta", theta)
                        .param("sigma2", sigma2)
                        .param("var0", var0)
                        .param("t", t),
                    );
                }
            }
        }
    }
    out
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp()).collect()
}

fn appendix_b(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    vec![
        CaseSpec::asserted("thermal n=100 tightness", tol, || {
            let r = fisher_isoperimetric_ratio(100.0)?;
            Ok(Outcome::new(-(r - 1.0).abs()).value("ratio", r))
        }),
        CaseSpec::asserted("thermal log grid 1e-3..1e3", 1e-12, || {
            let worst = log_grid(1e-3, 1e3, 200)
                .into_iter()
                .map(|n| fisher_isoperimetric_ratio(n).map(|r| r - 1.0))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok(Outcome::new(worst))
        }),
        CaseSpec::asserted("thermal n=4 numeric vs closed form", 2e-2, move || {
            let rho = thermal_state(4.0, dim)?;
            let slope = inverse_fisher_slope(
                &rho,
                DEFAULT_HEAT_STEP,
                DEFAULT_FISHER_STEP,
                &SolverOptions::numeric(),
            )?;
            let closed = fisher_isoperimetric_ratio(4.0)?;
            Ok(Outcome::new(agreement(slope.value, closed))
                .value("numeric", slope.value)
                .value("closed_form", closed)
                .health(checked(&rho)?))
        }),
    ]
}

fn appendix_c(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let tol = cfg.tolerance;
    vec![
        CaseSpec::asserted("thermal n=100 tightness", tol, || {
            let p = thermal_isoperimetric_product(100.0)?;
            Ok(Outcome::new(agreement(p, FOUR_PI_E)).value("product", p))
        }),
        CaseSpec::asserted("thermal log grid 1e-3..1e3", 1e-9, || {
            let mut worst = f64::INFINITY;
            for n in log_grid(1e-3, 1e3, 200) {
                worst = worst.min(thermal_isoperimetric_product(n)? - FOUR_PI_E);
            }
            Ok(Outcome::new(worst))
        }),
    ]
}

fn random_qou(seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda: f64 = rng.random_range(0.2..2.0);
    let mu = lambda * rng.random_range(1.05..3.0);
    (mu, lambda)
}

fn appendix_d(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let tol = cfg.tolerance;
    let epsilon = cfg.extra_or("epsilon", 0.5);
    let (mu0, la0) = qou_params(cfg);
    let mut out = Vec::new();
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        let (mu, lambda) = random_qou(s);
        out.push(
            CaseSpec::asserted(format!("h minimum seed={s}"), tol, move || {
                let (n_star, h_star) = h_minimize(mu, lambda)?;
                let mut grid_min = f64::INFINITY;
                for n in log_grid(1e-4, 1e4, 400) {
                    grid_min = grid_min.min(h_function(n, mu, lambda)?);
                }
                Ok(Outcome::new((-h_star.abs()).min(grid_min))
                    .value("n_star", n_star)
                    .value("h_star", h_star)
                    .value("grid_min", grid_min))
            })
            .param("mu", mu)
            .param("lambda", lambda),
        );
    }
    for k in 0..=10 {
        let n = 0.1 * 100f64.powf(k as f64 / 10.0);
        out.push(
            CaseSpec::asserted(format!("thermal n={n:.4}"), 1e-6, move || {
                let zeta = mu0 * mu0 - la0 * la0;
                let d = relent_to_qou_fixed(g_entropy(n), n, mu0, la0)?;
                let rate = thermal_relent_rate(n, mu0, la0)?;
                Ok(Outcome::new(-zeta * d - rate).value("relent", d).value("relent_rate", rate))
            })
            .param("n", n)
            .param("mu", mu0)
            .param("lambda", la0),
        );
    }
    for (kappa, z) in [(1.5, 1.0), (2.0, 3.0), (5.0, 1.5), (1.1, 10.0)] {
        out.push(
            CaseSpec::asserted(format!("gaussian kappa={kappa} z={z}"), 1e-9, move || {
                let spec = GaussianStateSpec::new([0.3, 0.0], kappa, z, 0.2)?;
                Ok(Outcome::new(gaussian_decay_margin(&spec, mu0, la0)?))
            })
            .param("kappa", kappa)
            .param("z", z),
        );
    }
    out.push(
        CaseSpec::asserted(format!("zeta-optimality witness eps={epsilon}"), tol, move || {
            let w = zeta_optimality_witness(mu0, la0, epsilon, 1e3)?;
            match w {
                Some(n) => Ok(Outcome::new(0.0).value("witness_n", n)),
                None => Ok(Outcome::new(-1.0)),
            }
        })
        .param("epsilon", epsilon),
    );
    out
}

/// `J₊(ρ) ≥ 2`.
fn jplus_bound(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let mut out = vec![CaseSpec::asserted("gaussian (kappa, z) grid", 1e-12, || {
        let mut worst = f64::INFINITY;
        for i in 0..50 {
            let kappa = 1.0 + 0.01 * 5000f64.powf(i as f64 / 49.0);
            for j in 0..50 {
                let z = 50f64.powf(j as f64 / 49.0);
                worst = worst.min(j_pm_gaussian(kappa, z)?.1 - 2.0);
            }
        }
        Ok(Outcome::new(worst))
    })];
    let mut states: Vec<(String, Maker<DensityMatrix>)> = Vec::new();
    for n in [0.5, 1.0, 2.0] {
        states.push((format!("thermal n={n}"), Box::new(move || thermal_state(n, dim))));
    }
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        states.push((
            random_label(RandomFamily::FullRank, s),
            Box::new(move || random_state(dim, s, RandomFamily::FullRank)),
        ));
    }
    for (label, make) in states {
        out.push(CaseSpec::asserted(label, tol, move || {
            let rho = make()?;
            let r =
                entropy_rate(&rho, SemigroupKind::Amplifier, DEFAULT_RATE_STEP, &SolverOptions::numeric())?;
            Ok(Outcome::new(r.value - 2.0).value("j_plus", r.value).health(checked(&rho)?))
        }));
    }
    out
}

fn threshold_root_case(which: Threshold, lo: f64, hi: f64) -> CaseSpec {
    CaseSpec::asserted(format!("{which:?} root in [{lo}, {hi}]"), 1e-12, move || {
        let root = threshold_solve(which)?;
        let changes = which.sign_changes(2000)? as f64;
        let margin = if changes == 1.0 { (root - lo).min(hi - root) } else { -1.0 };
        Ok(Outcome::new(margin).value("root", root).value("sign_changes", changes))
    })
}

/// Below the photon threshold the certified bound guarantees rate `ζ`.
fn threshold_photon(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let (mu, lambda) = (2f64.sqrt(), 1.0);
    let zeta = 1.0;
    let certified = move |n: f64| -> f64 {
        let (_, _, _, dl) = log_sobolev_coefficients(mu, lambda, zeta, lambda * lambda / (4.0 * PI * zeta));
        -zeta * n * g_prime(n) + dl
    };
    let mut out = vec![threshold_root_case(Threshold::Photon067, 0.66, 0.68)];
    out.push(
        CaseSpec::reported("thermal n=0.8 certified bound", tol, move || {
            let n = 0.8;
            Ok(Outcome::new(certified(n)).value("exact_margin", h_function(n, mu, lambda)?))
        })
        .param("n", 0.8),
    );
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        let target = 0.1 + 0.56 * i as f64 / (cfg.cases.max(2) - 1) as f64;
        out.push(
            CaseSpec::asserted(
                format!("{} mixed to n<={target:.3}", random_label(RandomFamily::FullRank, s)),
                tol,
                move || {
                    let rho = random_state_with_envelope(dim, 0.5, s, RandomFamily::FullRank)?;
                    let m = mean_photon(&rho);
                    let rho =
                        if m > target { rho.mix(&number_state(0, dim)?, 1.0 - target / m)? } else { rho };
                    let n = mean_photon(&rho);
                    let r = decay_rate_of(&rho, mu, lambda)?;
                    Ok(Outcome::new(-zeta * r.relent - r.rate.value)
                        .value("mean_photon", n)
                        .value("certified_bound", certified(n))
                        .value("relent", r.relent)
                        .health(checked(&rho)?))
                },
            )
            .param("target_photon", target),
        );
    }
    out
}

/// Above the entropy threshold the certified bound guarantees rate `ζ`.
fn threshold_entropy(cfg: &SuiteConfig) -> Vec<CaseSpec> {
    let (dim, tol) = (cfg.dim, cfg.tolerance);
    let (mu, lambda) = (2f64.sqrt(), 1.0);
    let zeta = 1.0;
    let mut out = vec![threshold_root_case(Threshold::Entropy206, 2.0, 2.2)];
    out.push(
        CaseSpec::reported("alternative figure S=2.4", tol, move || {
            let v = big_f(2.4, 2.0, 1.0)? + 1.0 - 2.0 * 2f64.ln();
            Ok(Outcome::new(v).value("criterion_at_2.4", v))
        })
        .param("entropy", 2.4),
    );
    let floor_n = 4.0;
    for i in 0..cfg.cases {
        let s = case_seed(cfg.seed, i);
        let frac = i as f64 / (cfg.cases.max(2) - 1) as f64;
        out.push(
            CaseSpec::asserted(
                format!("{} mixed to high entropy", random_label(RandomFamily::FullRank, s)),
                tol,
                move || {
                    let root = threshold_solve(Threshold::Entropy206)?;
                    let target = root + 0.4 * frac;
                    let rho = random_state(dim, s, RandomFamily::FullRank)?;
                    let omega = thermal_state(floor_n, dim)?;
                    let (s_rho, s_omega) = (von_neumann_entropy(&rho), g_entropy(floor_n));
                    // Concavity of S: this weight lifts the mixture to at least `target`.
                    let w = if s_rho >= target { 0.0 } else { (target - s_rho) / (s_omega - s_rho) };
                    let mixed = rho.mix(&omega, w)?;
                    let entropy = von_neumann_entropy(&mixed);
                    if entropy < root {
                        return Err(Error::InvalidState(format!("mixture entropy {entropy} below {root}")));
                    }
                    let r = decay_rate_of(&mixed, mu, lambda)?;
                    Ok(Outcome::new(-zeta * r.relent - r.rate.value)
                        .value("entropy", entropy)
                        .value("relent", r.relent)
                        .health(checked(&mixed)?))
                },
            )
            .param("entropy_target_offset", 0.4 * frac),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_has_defaults() {
        for name in suite_names() {
            let c = default_config(name).unwrap();
            c.validate().unwrap();
            assert!(!build(&c).unwrap().is_empty(), "{name}");
        }
    }

    #[test]
    fn gaussian_kl_known_values() {
        let i = [[1.0, 0.0], [0.0, 1.0]];
        assert_eq!(gaussian_kl([0.0; 2], i, [0.0; 2], i), 0.0);
        // Shift by one unit along q: D = ½.
        assert!((gaussian_kl([1.0, 0.0], i, [0.0; 2], i) - 0.5).abs() < 1e-15);
        // Scale: D(N(0,aI)‖N(0,I)) = a − 1 − log a.
        let a = 2.5;
        let ca = [[a, 0.0], [0.0, a]];
        assert!((gaussian_kl([0.0; 2], ca, [0.0; 2], i) - (a - 1.0 - a.ln())).abs() < 1e-14);
    }

    #[test]
    fn thermal_relent_matches_numeric() {
        let (a, b) = (0.7, 1.9);
        let num =
            crate::fock::relative_entropy(&thermal_state(a, 96).unwrap(), &thermal_state(b, 96).unwrap())
                .unwrap();
        assert!((num - thermal_relent(a, b)).abs() < 1e-9);
    }
}
