//! The pure-death process, its agreement with the attenuator on diagonal
//! states, and the constrained minimum of the entropy production rate.

use bosonic_geom::classical::{
    death_entropy_rate, geometric_pmf, min_entropy_rate_constrained, MinimizeOptions,
};
use bosonic_geom::fock::DensityMatrix;
use bosonic_geom::semigroups::{entropy_rate, SemigroupKind, SolverOptions, DEFAULT_RATE_STEP};
use bosonic_geom::Result;

pub fn run_example() -> Result<()> {
    let n = 1.0;
    let p = geometric_pmf(n, 47)?;
    let rho = DensityMatrix::from_populations(p.probs())?;
    let classical = death_entropy_rate(&p)?;
    let quantum =
        entropy_rate(&rho, SemigroupKind::Attenuator, DEFAULT_RATE_STEP, &SolverOptions::numeric())?;
    println!("J- of the geometric law: death process {classical:.8}, attenuator {:.8}", quantum.value);

    let opts = MinimizeOptions { starts: 4, ..MinimizeOptions::default() };
    let min = min_entropy_rate_constrained(n, 40, &opts)?;
    println!("min J- with E[N] <= {n}: {:.8} (bound {:.8})", min.j_star, min.bound);
    for s in &min.starts {
        println!("  {:<12} {:.6} -> {:.8} in {} iterations", s.label, s.initial_rate, s.rate, s.iterations);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
