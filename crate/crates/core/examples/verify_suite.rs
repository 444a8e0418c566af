//! Running a verification suite from code and reading its report.

use bosonic_geom::verify::{run_suite, threshold_solve, SuiteConfig, Threshold};
use bosonic_geom::Result;

pub fn run_example() -> Result<()> {
    let mut cfg = SuiteConfig::for_suite("majorization")?;
    cfg.cases = 20;
    cfg.seed = 42;
    let report = run_suite(&cfg)?;
    println!(
        "{}: {} cases, {} failures, min margin {:?}",
        report.suite, report.summary.cases, report.summary.failures, report.summary.min_margin
    );

    println!("photon threshold {:.6}", threshold_solve(Threshold::Photon067)?);
    println!("entropy threshold {:.6}", threshold_solve(Threshold::Entropy206)?);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
