//! Gaussian closed forms: entropy production rates, the qOU margin function
//! and its minimum, the rate-optimality witness and the classical OU process.

use bosonic_geom::gaussian::{
    cou_step, gaussian_evolve, h_minimize, j_pm_gaussian, zeta_optimality_witness, ClassicalOUParams,
    GaussianStateSpec,
};
use bosonic_geom::semigroups::SemigroupKind;
use bosonic_geom::Result;

pub fn run_example() -> Result<()> {
    let spec = GaussianStateSpec::new([0.4, -0.2], 2.5, 1.4, 0.3)?;
    let (jm, jp) = j_pm_gaussian(spec.kappa, spec.z)?;
    println!("squeezed state: S = {:.5}, J- = {jm:.5}, J+ = {jp:.5}", spec.entropy());
    let later = gaussian_evolve(&spec, SemigroupKind::qou(2f64.sqrt(), 1.0)?, 2.0)?;
    println!("after qOU t=2: kappa = {:.5}, mean = {:?}", later.kappa, later.mean);

    let (n_star, h_star) = h_minimize(2f64.sqrt(), 1.0)?;
    println!("h minimum at n* = {n_star}: {h_star:.2e}");
    match zeta_optimality_witness(2f64.sqrt(), 1.0, 0.5, 1e3)? {
        Some(n) => println!("rate zeta + 0.5 fails on the thermal state n = {n:.4}"),
        None => println!("no witness found"),
    }

    let ou = ClassicalOUParams::new(1.0, 2.0)?;
    for var0 in [0.1, 10.0, 1e6] {
        let s = cou_step(&ou, var0, 0.0)?;
        println!("cOU var0 = {var0:e}: D = {:.5}, margin/D = {:.2e}", s.relent, s.rate_margin / s.relent);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
