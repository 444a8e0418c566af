//! Fisher information along the heat flow: de Bruijn identity, the Fisher
//! isoperimetric slope and the concavity of the entropy power.

use bosonic_geom::fisher::{
    entropy_power_second_difference, inverse_fisher_slope, quantum_fisher, DEFAULT_CONCAVITY_STEP,
    DEFAULT_FISHER_STEP, DEFAULT_HEAT_STEP,
};
use bosonic_geom::fock::thermal_state;
use bosonic_geom::gaussian::{fisher_isoperimetric_ratio, thermal_fisher_closed};
use bosonic_geom::semigroups::{entropy_rate, SemigroupKind, SolverOptions, DEFAULT_RATE_STEP};
use bosonic_geom::Result;

pub fn run_example() -> Result<()> {
    let opts = SolverOptions::numeric();
    for n in [0.5, 2.0] {
        let rho = thermal_state(n, 96)?;
        let j = quantum_fisher(&rho, DEFAULT_FISHER_STEP)?;
        let rate = entropy_rate(&rho, SemigroupKind::Heat, DEFAULT_RATE_STEP, &opts)?;
        let slope = inverse_fisher_slope(&rho, DEFAULT_HEAT_STEP, DEFAULT_FISHER_STEP, &opts)?;
        let d2 = entropy_power_second_difference(&rho, DEFAULT_CONCAVITY_STEP, &opts)?;
        println!("thermal n={n}");
        println!(
            "  J = {:.6} (closed form {:.6}), 2 dS/dt = {:.6}",
            j.value,
            thermal_fisher_closed(n)?,
            rate.value
        );
        println!("  d/dt (J/2)^-1 = {:.5} (closed form {:.5})", slope.value, fisher_isoperimetric_ratio(n)?);
        println!("  d²N/dt² = {d2:.5}");
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
