//! Heat, attenuator, amplifier and qOU flows on a thermal state, checked
//! against the closed-form photon-number maps.

use bosonic_geom::fock::{mean_photon, random_state, RandomFamily};
use bosonic_geom::semigroups::{evolve, SemigroupKind, SolverOptions};
use bosonic_geom::Result;

pub fn run_example() -> Result<()> {
    let rho = random_state(96, 11, RandomFamily::FullRank)?;
    let n0 = mean_photon(&rho);
    let t = 0.3;
    for kind in [
        SemigroupKind::Heat,
        SemigroupKind::Attenuator,
        SemigroupKind::Amplifier,
        SemigroupKind::qou(2f64.sqrt(), 1.0)?,
    ] {
        let out = evolve(&rho, kind, t, &SolverOptions::numeric())?;
        println!(
            "{:>10}: <n> {:.4} -> {:.6} (closed form {:.6}), edge mass {:.1e}",
            kind.name(),
            n0,
            mean_photon(&out),
            kind.thermal_photon_map(n0, t),
            out.health().edge_mass
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
