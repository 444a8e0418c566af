//! Phase-space convolution with a Gaussian density and the Stam margin.

use bosonic_geom::fisher::stam_margin;
use bosonic_geom::fock::{entropy_power, random_state, RandomFamily};
use bosonic_geom::semigroups::{convolve_with, PhaseDensity, QuadratureRule, DEFAULT_QUAD_ORDER};
use bosonic_geom::Result;

pub fn run_example() -> Result<()> {
    let rho = random_state(64, 5, RandomFamily::FullRank)?;
    let f = PhaseDensity::standard();
    for t in [0.02, 0.05, 0.1] {
        let exact = convolve_with(&f, &rho, t, QuadratureRule::Exact)?;
        let gh = convolve_with(&f, &rho, t, QuadratureRule::GaussHermite(DEFAULT_QUAD_ORDER))?;
        let stam = stam_margin(&f, &rho, t, DEFAULT_QUAD_ORDER)?;
        println!(
            "t = {t:<4}  N: {:.4} -> {:.4}   Stam margin {:+.5}   Gauss-Hermite error {:.1e}",
            entropy_power(&rho),
            entropy_power(&exact.state),
            stam.margin,
            gh.quadrature_error
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
