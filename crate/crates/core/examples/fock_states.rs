//! Thermal and random states in a truncated Fock space, their entropies and
//! the Fock rearrangement.

use bosonic_geom::fock::{
    entropy_power, fock_rearrangement, majorizes_states, mean_photon, random_state, thermal_state,
    von_neumann_entropy, MajorizationMode, RandomFamily,
};
use bosonic_geom::gaussian::g_entropy;
use bosonic_geom::Result;

pub fn run_example() -> Result<()> {
    let omega = thermal_state(1.5, 64)?;
    println!(
        "thermal n=1.5: S = {:.6} (closed form {:.6}), N = {:.6}",
        von_neumann_entropy(&omega),
        g_entropy(1.5),
        entropy_power(&omega)
    );

    let rho = random_state(16, 3, RandomFamily::FullRank)?;
    let down = fock_rearrangement(&rho);
    println!(
        "random state: <n> = {:.4}, rearranged <n> = {:.4}, same spectrum: {}",
        mean_photon(&rho),
        mean_photon(&down),
        majorizes_states(&down, &rho, MajorizationMode::Full)?.holds
            && majorizes_states(&rho, &down, MajorizationMode::Full)?.holds
    );
    println!("edge mass of the random state: {:.2e}", rho.health().edge_mass);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
