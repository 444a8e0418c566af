//! Verification suites: each binds one inequality or closed-form limit to a
//! family of test states and records the signed margin of every case.
//!
//! A case passes when `margin >= -tolerance`. Cases are either asserted
//! (a proved inequality; a failure fails the suite) or reported (probes of
//! conjectures and indeterminate examples; informational only).

mod report;
mod suites;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::big_f;
use crate::error::{Error, Result};
use crate::fock::HealthMetrics;
use crate::gaussian::g_prime;

pub use report::{
    format_number, round_significant, to_csv, to_json, to_json_value, Metadata, SIGNIFICANT_DIGITS,
};
pub use suites::{suite_names, EXTRA_SUITES, SPEC_SUITES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite_name: String,
    pub dim: usize,
    pub cases: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub time_grid: Vec<f64>,
    /// Suite-specific numeric knobs (`mu`, `lambda`, `quad_order`, …).
    pub extra: BTreeMap<String, f64>,
}

impl SuiteConfig {
    /// Built-in defaults of a registered suite.
    pub fn for_suite(name: &str) -> Result<Self> {
        suites::default_config(name)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.cases == 0 {
            return Err(Error::InvalidArgument("cases must be >= 1".into()));
        }
        if self.dim < 2 {
            return Err(Error::InvalidDimension { dim: self.dim, min: 2 });
        }
        if let Some(t) = self.time_grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(Error::InvalidArgument(format!("time grid entry {t} must be >= 0")));
        }
        Ok(())
    }

    pub fn extra_or(&self, key: &str, default: f64) -> f64 {
        self.extra.get(key).copied().unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Asserted,
    Reported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub index: usize,
    /// State descriptor, e.g. `thermal n=1` or `random full-rank seed=7`.
    pub family: String,
    pub role: Role,
    pub tolerance: f64,
    pub parameters: BTreeMap<String, f64>,
    /// Intermediate quantities behind the margin.
    pub values: BTreeMap<String, f64>,
    /// `None` when the backend raised an error for this case.
    pub margin: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
    pub health: Option<HealthMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub asserted: usize,
    /// Asserted cases with a margin below `-tolerance` or an error.
    pub failures: usize,
    pub reported_failures: usize,
    pub errors: usize,
    /// Minimum margin over asserted cases that produced one.
    pub min_margin: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub config: SuiteConfig,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
    /// Run-dependent data (wall time, version); excluded from comparisons.
    pub metadata: Metadata,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    /// Records of asserted cases whose margin fell below their tolerance.
    pub fn failing_cases(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| c.role == Role::Asserted && !c.passed)
    }
}

/// What a case computes.
pub(crate) struct Outcome {
    pub margin: f64,
    pub values: Vec<(String, f64)>,
    pub health: Option<HealthMetrics>,
}

impl Outcome {
    pub fn new(margin: f64) -> Self {
        Self { margin, values: Vec::new(), health: None }
    }

    pub fn value(mut self, key: impl Into<String>, v: f64) -> Self {
        self.values.push((key.into(), v));
        self
    }

    pub fn health(mut self, h: HealthMetrics) -> Self {
        self.health = Some(h);
        self
    }
}

type CaseFn = Box<dyn Fn() -> Result<Outcome> + Send + Sync>;

/// A case awaiting execution.
pub(crate) struct CaseSpec {
    pub family: String,
    pub role: Role,
    pub tolerance: f64,
    pub parameters: Vec<(&'static str, f64)>,
    pub run: CaseFn,
}

impl CaseSpec {
    pub fn asserted<F>(family: impl Into<String>, tolerance: f64, run: F) -> Self
    where
        F: Fn() -> Result<Outcome> + Send + Sync + 'static,
    {
        Self {
            family: family.into(),
            role: Role::Asserted,
            tolerance,
            parameters: Vec::new(),
            run: Box::new(run),
        }
    }

    pub fn reported<F>(family: impl Into<String>, tolerance: f64, run: F) -> Self
    where
        F: Fn() -> Result<Outcome> + Send + Sync + 'static,
    {
        Self { role: Role::Reported, ..Self::asserted(family, tolerance, run) }
    }

    pub fn param(mut self, key: &'static str, v: f64) -> Self {
        self.parameters.push((key, v));
        self
    }
}

fn execute(index: usize, spec: CaseSpec) -> CaseRecord {
    let parameters = spec.parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let (margin, values, health, error) = match (spec.run)() {
        Ok(out) if out.margin.is_nan() => (None, out.values, out.health, Some("margin is NaN".to_string())),
        Ok(out) => (Some(out.margin), out.values, out.health, None),
        Err(e) => (None, Vec::new(), None, Some(e.to_string())),
    };
    CaseRecord {
        index,
        family: spec.family,
        role: spec.role,
        tolerance: spec.tolerance,
        parameters,
        values: values.into_iter().collect(),
        passed: margin.is_some_and(|m| m >= -spec.tolerance),
        margin,
        error,
        health,
    }
}

fn summarize(cases: &[CaseRecord]) -> Summary {
    let asserted: Vec<&CaseRecord> = cases.iter().filter(|c| c.role == Role::Asserted).collect();
    let failures = asserted.iter().filter(|c| !c.passed).count();
    let reported_failures = cases.iter().filter(|c| c.role == Role::Reported && !c.passed).count();
    let min_margin = asserted.iter().filter_map(|c| c.margin).reduce(f64::min);
    Summary {
        cases: cases.len(),
        asserted: asserted.len(),
        failures,
        reported_failures,
        errors: cases.iter().filter(|c| c.error.is_some()).count(),
        min_margin,
        passed: failures == 0,
    }
}

/// Runs a suite. Cases execute in parallel; records come back ordered by
/// case index, so the report depends only on the configuration.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    config.validate()?;
    let specs = suites::build(config)?;
    let start = Instant::now();
    let mut cases: Vec<CaseRecord> =
        specs.into_par_iter().enumerate().map(|(i, spec)| execute(i, spec)).collect();
    cases.sort_by_key(|c| c.index);
    let summary = summarize(&cases);
    Ok(VerificationReport {
        suite: config.suite_name.clone(),
        config: config.clone(),
        cases,
        summary,
        metadata: Metadata::now(start.elapsed()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Threshold {
    /// Smallest entropy above which the qOU `(√2, 1)` decays at rate 1.
    Entropy206,
    /// Largest mean photon number below which it decays at rate 1.
    Photon067,
}

impl Threshold {
    /// The function whose root is the threshold, on `(0, 10)`.
    pub fn criterion(self, x: f64) -> Result<f64> {
        match self {
            Threshold::Photon067 => Ok(-x * g_prime(x) + 2.0 - 2.0 * 2f64.ln()),
            Threshold::Entropy206 => Ok(big_f(x, 2.0, 1.0)? + 1.0 - 2.0 * 2f64.ln()),
        }
    }

    /// Sign changes of [`Self::criterion`] on a uniform grid over `(0, 10)`.
    pub fn sign_changes(self, grid: usize) -> Result<usize> {
        let mut changes = 0;
        let mut last: Option<f64> = None;
        for k in 1..grid {
            let v = self.criterion(10.0 * k as f64 / grid as f64)?;
            if let Some(prev) = last {
                if (prev < 0.0) != (v < 0.0) {
                    changes += 1;
                }
            }
            last = Some(v);
        }
        Ok(changes)
    }
}

pub const THRESHOLD_TOL: f64 = 1e-9;

/// Root of the threshold criterion by bisection on `(0, 10)`.
pub fn threshold_solve(which: Threshold) -> Result<f64> {
    let (mut lo, mut hi) = (1e-6, 10.0);
    let f_lo = which.criterion(lo)?;
    let f_hi = which.criterion(hi)?;
    if (f_lo < 0.0) == (f_hi < 0.0) {
        return Err(Error::Optimizer(format!("no sign change for {which:?} on (0, 10)")));
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if (which.criterion(mid)? < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
