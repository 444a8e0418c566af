//! Command-line front end. `run` parses arguments, merges the optional TOML
//! configuration file and returns the process exit code: 0 when every
//! asserted case passed, 1 on an asserted margin violation, 2 on usage or
//! numerical-backend errors.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::classical::{
    death_entropy_rate, death_evolve, geometric_pmf, min_entropy_rate_constrained, ClassicalPMF,
    DeathOptions, MinimizeOptions,
};
use crate::error::Error;
use crate::fisher::{quantum_fisher, DEFAULT_FISHER_STEP};
use crate::fock::{
    entropy_power, mean_photon, random_state, relative_entropy, thermal_state, von_neumann_entropy,
    RandomFamily,
};
use crate::gaussian::{
    carbone_lsi2_bounds, fisher_isoperimetric_ratio, g_entropy, h_function, h_minimize, relent_to_qou_fixed,
    thermal_isoperimetric_product, thermal_relent_rate, FOUR_PI_E,
};
use crate::semigroups::{evolve_many, qou_fixed_point, SemigroupKind, SolverOptions};
use crate::verify::{
    format_number, run_suite, suite_names, threshold_solve, to_csv, to_json, to_json_value, SuiteConfig,
    Threshold, VerificationReport,
};

/// Environment variable naming a configuration file; `--config` wins over it.
pub const CONFIG_ENV: &str = "BOSONIC_GEOM_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Global settings from the configuration file. Every field is optional;
/// command-line flags take precedence over values found here.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub cases: Option<usize>,
    #[serde(alias = "tol")]
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub time_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub extra: BTreeMap<String, f64>,
}

impl CliConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("invalid configuration: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read configuration {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    /// `self` with every value present in `flags` replacing its own.
    pub fn overridden_by(mut self, flags: &CliConfig) -> Self {
        self.dim = flags.dim.or(self.dim);
        self.seed = flags.seed.or(self.seed);
        self.cases = flags.cases.or(self.cases);
        self.tolerance = flags.tolerance.or(self.tolerance);
        self.out = flags.out.clone().or(self.out);
        self.format = flags.format.or(self.format);
        self.time_grid = flags.time_grid.clone().or(self.time_grid);
        self.extra.extend(flags.extra.iter().map(|(k, v)| (k.clone(), *v)));
        self
    }

    /// Applies the overrides to a suite's built-in defaults.
    pub fn apply_to(&self, cfg: &mut SuiteConfig) {
        if let Some(d) = self.dim {
            cfg.dim = d;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(c) = self.cases {
            cfg.cases = c;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        if let Some(g) = &self.time_grid {
            cfg.time_grid = g.clone();
        }
        cfg.extra.extend(self.extra.iter().map(|(k, v)| (k.clone(), *v)));
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bosonic-geom",
    version,
    about = "Verify entropy and Fisher-information inequalities for one bosonic mode"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Fock truncation (number of levels).
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of random cases (verify) or optimizer starts (minimize-rate).
    #[arg(long, global = true)]
    cases: Option<usize>,
    /// Suite tolerance; sentinel cases keep their own.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML configuration file (overrides the environment variable).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Omit run metadata so reports compare byte for byte.
    #[arg(long, global = true)]
    no_metadata: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Flow {
    Heat,
    Attenuator,
    Amplifier,
    Qou,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Table {
    #[value(name = "appB")]
    AppB,
    #[value(name = "appC")]
    AppC,
    #[value(name = "appD")]
    AppD,
    Carbone,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    Entropy,
    Photon,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite (`all` runs every registered suite).
    Verify {
        suite: String,
        /// Comma-separated times.
        #[arg(long, value_delimiter = ',')]
        time_grid: Option<Vec<f64>>,
        /// Suite parameter, e.g. `--set mu=1.5`.
        #[arg(long = "set", value_parser = parse_key_value)]
        set: Vec<(String, f64)>,
    },
    /// Entropy, entropy power, Fisher information and photon number along a semigroup.
    Trajectory {
        flow: Flow,
        #[arg(long, default_value_t = 1.0)]
        n0: f64,
        #[arg(long, default_value_t = SQRT_2)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        tmax: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Start from a random full-rank state (seeded by --seed) instead of ω_{n0}.
        #[arg(long)]
        random: bool,
    },
    /// Evolve a distribution under the pure-death process.
    DeathProcess {
        /// `geometric:<mean>` or `point:<level>`.
        #[arg(long, default_value = "geometric:1")]
        init: String,
        #[arg(long, default_value_t = 1.0)]
        tmax: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Tabulate closed forms over a grid.
    ClosedForms {
        table: Table,
        /// `lo:hi:count` or `lo:hi:count:log`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = SQRT_2)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Solve the entropy or photon-number threshold of the (√2, 1) qOU process.
    Thresholds {
        #[arg(long, value_enum)]
        which: Option<Which>,
    },
    /// Minimize the attenuator entropy rate at fixed mean photon number.
    MinimizeRate {
        #[arg(long)]
        n: f64,
        #[arg(long = "K", default_value_t = 64)]
        k: usize,
    },
}

fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

enum Failure {
    Usage(String),
    Backend(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownSuite(_) => Failure::Usage(e.to_string()),
            e => Failure::Backend(e),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command, reading
/// the configuration path from [`CONFIG_ENV`] when `--config` is absent.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env_config = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    run_with(args, env_config, &mut std::io::stdout(), &mut std::io::stderr())
}

/// [`run`] with explicit streams and configuration fallback.
pub fn run_with<I, T>(
    args: I,
    env_config: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match dispatch(cli, env_config, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Backend(e)) => {
            let _ = writeln!(stderr, "numerical error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli, env_config: Option<PathBuf>, stdout: &mut dyn Write) -> CmdResult {
    let g = &cli.global;
    let file = match g.config.clone().or(env_config) {
        Some(path) => CliConfig::load(&path).map_err(Failure::Usage)?,
        None => CliConfig::default(),
    };
    let mut flags = CliConfig {
        dim: g.dim,
        seed: g.seed,
        cases: g.cases,
        tolerance: g.tol,
        out: g.out.clone(),
        format: g.format,
        ..CliConfig::default()
    };
    if let Command::Verify { time_grid, set, .. } = &cli.command {
        flags.time_grid = time_grid.clone();
        flags.extra = set.iter().cloned().collect();
    }
    let cfg = file.overridden_by(&flags);
    let mut sink = Sink { out: cfg.out.clone(), stdout };
    match cli.command {
        Command::Verify { suite, .. } => verify(&suite, &cfg, g.no_metadata, &mut sink),
        Command::Trajectory { flow, n0, mu, lambda, tmax, steps, random } => {
            let kind = match flow {
                Flow::Heat => SemigroupKind::Heat,
                Flow::Attenuator => SemigroupKind::Attenuator,
                Flow::Amplifier => SemigroupKind::Amplifier,
                Flow::Qou => SemigroupKind::qou(mu, lambda)?,
            };
            trajectory(kind, n0, tmax, steps, random, &cfg, &mut sink)
        }
        Command::DeathProcess { init, tmax, steps } => death_process(&init, tmax, steps, &cfg, &mut sink),
        Command::ClosedForms { table, grid, mu, lambda } => {
            closed_forms(table, grid.as_deref(), mu, lambda, &cfg, &mut sink)
        }
        Command::Thresholds { which } => thresholds(which, &cfg, &mut sink),
        Command::MinimizeRate { n, k } => minimize_rate(n, k, &cfg, &mut sink),
    }
}

struct Sink<'a> {
    out: Option<PathBuf>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn emit(&mut self, text: &str) -> std::result::Result<(), Failure> {
        let text = if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}"))),
        }
    }
}

fn verify(suite: &str, cfg: &CliConfig, no_metadata: bool, sink: &mut Sink) -> CmdResult {
    let names: Vec<String> =
        if suite == "all" { suite_names().map(String::from).collect() } else { vec![suite.to_string()] };
    let mut reports: Vec<VerificationReport> = Vec::new();
    for name in &names {
        let mut sc = SuiteConfig::for_suite(name)?;
        cfg.apply_to(&mut sc);
        reports.push(run_suite(&sc)?);
    }
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut all = String::new();
            for (i, r) in reports.iter().enumerate() {
                let csv = to_csv(r);
                // Keep a single header when several suites are concatenated.
                let body = if i == 0 { csv.as_str() } else { csv.split_once('\n').map_or("", |x| x.1) };
                all.push_str(body);
            }
            all
        }
        Format::Json if reports.len() == 1 => to_json(&reports[0], !no_metadata),
        Format::Json => {
            let parts: Vec<String> = reports.iter().map(|r| to_json(r, !no_metadata)).collect();
            format!("[\n{}\n]", parts.join(",\n"))
        }
    };
    sink.emit(&text)?;
    Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
}

/// Rows of numbers as CSV (12 significant digits) or as a JSON array of objects.
fn table_text(header: &[&str], rows: &[Vec<f64>], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).expect("in-memory write");
            for row in rows {
                w.write_record(row.iter().map(|x| format_number(*x))).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        Format::Json => {
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let map: serde_json::Map<String, serde_json::Value> =
                        header.iter().zip(row).map(|(k, v)| (k.to_string(), json!(v))).collect();
                    serde_json::Value::Object(map)
                })
                .collect();
            pretty(&objs)
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(&to_json_value(v).expect("serializable")).expect("serializable")
}

fn time_points(tmax: f64, steps: usize) -> std::result::Result<Vec<f64>, Failure> {
    if !(tmax >= 0.0 && tmax.is_finite()) || steps == 0 {
        return Err(Failure::Usage("need tmax >= 0 and steps >= 1".into()));
    }
    Ok((0..=steps).map(|k| tmax * k as f64 / steps as f64).collect())
}

fn trajectory(
    kind: SemigroupKind,
    n0: f64,
    tmax: f64,
    steps: usize,
    random: bool,
    cfg: &CliConfig,
    sink: &mut Sink,
) -> CmdResult {
    let dim = cfg.dim.unwrap_or(128);
    let times = time_points(tmax, steps)?;
    let rho = if random {
        random_state(dim, cfg.seed.unwrap_or(0), RandomFamily::FullRank)?
    } else {
        thermal_state(n0, dim)?
    };
    let fixed = match kind {
        SemigroupKind::Qou { mu, lambda } => Some(qou_fixed_point(mu, lambda, dim)?),
        _ => None,
    };
    let states = evolve_many(&rho, kind, &times, &SolverOptions::default())?;
    let mut rows = Vec::with_capacity(states.len());
    for (t, s) in times.iter().zip(&states) {
        let relent = match &fixed {
            Some(sigma) => relative_entropy(s, sigma)?,
            None => f64::NAN,
        };
        rows.push(vec![
            *t,
            von_neumann_entropy(s),
            entropy_power(s),
            quantum_fisher(s, DEFAULT_FISHER_STEP)?.value,
            mean_photon(s),
            relent,
        ]);
    }
    let header = ["t", "entropy", "entropy_power", "fisher", "mean_photon", "relent_to_fixed"];
    sink.emit(&table_text(&header, &rows, cfg.format.unwrap_or(Format::Csv)))?;
    Ok(0)
}

fn parse_init(init: &str, k: usize) -> std::result::Result<ClassicalPMF, Failure> {
    let bad = || Failure::Usage(format!("--init expects geometric:<mean> or point:<level>, got `{init}`"));
    let (family, value) = init.split_once(':').ok_or_else(bad)?;
    match family {
        "geometric" => Ok(geometric_pmf(value.parse().map_err(|_| bad())?, k)?),
        "point" => Ok(ClassicalPMF::point_mass(value.parse().map_err(|_| bad())?, k)?),
        _ => Err(bad()),
    }
}

fn death_process(init: &str, tmax: f64, steps: usize, cfg: &CliConfig, sink: &mut Sink) -> CmdResult {
    let k = cfg.dim.unwrap_or(65).max(2) - 1;
    let times = time_points(tmax, steps)?;
    let mut p = parse_init(init, k)?;
    let opts = DeathOptions::default();
    let mut rows = Vec::with_capacity(times.len());
    let mut prev = 0.0;
    for &t in &times {
        p = death_evolve(&p, t - prev, &opts)?;
        prev = t;
        // The rate diverges once inflow reaches an empty level.
        let rate = death_entropy_rate(&p).unwrap_or(f64::NAN);
        rows.push(vec![t, p.entropy(), p.mean(), rate]);
    }
    let header = ["t", "entropy", "mean", "entropy_rate"];
    sink.emit(&table_text(&header, &rows, cfg.format.unwrap_or(Format::Csv)))?;
    Ok(0)
}

/// Parses `lo:hi:count[:log]`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || format!("grid expects lo:hi:count[:log], got `{spec}`");
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    let log = match parts.get(3) {
        None => false,
        Some(&"log") => true,
        Some(_) => return Err(bad()),
    };
    if count == 0 || !(lo.is_finite() && hi.is_finite()) || (log && !(lo > 0.0 && hi > 0.0)) {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count)
        .map(|i| {
            let s = i as f64 / (count - 1) as f64;
            if log {
                (lo.ln() + (hi.ln() - lo.ln()) * s).exp()
            } else {
                lo + (hi - lo) * s
            }
        })
        .collect())
}

fn closed_forms(
    table: Table,
    grid: Option<&str>,
    mu: f64,
    lambda: f64,
    cfg: &CliConfig,
    sink: &mut Sink,
) -> CmdResult {
    let default_grid = match table {
        Table::AppB | Table::AppC => "0.001:1000:25:log",
        Table::AppD => "0.01:100:25:log",
        Table::Carbone => "0.1:1.3:13",
    };
    let xs = parse_grid(grid.unwrap_or(default_grid)).map_err(Failure::Usage)?;
    let (header, rows): (Vec<&str>, Vec<Vec<f64>>) = match table {
        Table::AppB => (
            vec!["n", "ratio"],
            xs.iter().map(|&n| Ok(vec![n, fisher_isoperimetric_ratio(n)?])).collect::<Result<_, Error>>()?,
        ),
        Table::AppC => (
            vec!["n", "product", "excess"],
            xs.iter()
                .map(|&n| {
                    let p = thermal_isoperimetric_product(n)?;
                    Ok(vec![n, p, p - FOUR_PI_E])
                })
                .collect::<Result<_, Error>>()?,
        ),
        Table::AppD => {
            let (n_star, _) = h_minimize(mu, lambda)?;
            let mut ns = xs.clone();
            ns.push(n_star);
            ns.sort_by(f64::total_cmp);
            (
                vec!["n", "h", "relent", "relent_rate"],
                ns.iter()
                    .map(|&n| {
                        Ok(vec![
                            n,
                            h_function(n, mu, lambda)?,
                            relent_to_qou_fixed(g_entropy(n), n, mu, lambda)?,
                            thermal_relent_rate(n, mu, lambda)?,
                        ])
                    })
                    .collect::<Result<_, Error>>()?,
            )
        }
        Table::Carbone => (
            vec!["lambda", "nu", "alpha_c_lo", "alpha_c_hi", "alpha2_lo", "alpha2_hi"],
            xs.iter()
                .filter(|&&l| l > 0.0 && l < mu)
                .map(|&l| {
                    let b = carbone_lsi2_bounds(mu, l)?;
                    Ok(vec![l, l * l / (mu * mu), b.alpha_c.0, b.alpha_c.1, b.alpha2.0, b.alpha2.1])
                })
                .collect::<Result<_, Error>>()?,
        ),
    };
    sink.emit(&table_text(&header, &rows, cfg.format.unwrap_or(Format::Csv)))?;
    Ok(0)
}

fn thresholds(which: Option<Which>, cfg: &CliConfig, sink: &mut Sink) -> CmdResult {
    let selected: Vec<(Which, Threshold)> = match which {
        Some(Which::Photon) => vec![(Which::Photon, Threshold::Photon067)],
        Some(Which::Entropy) => vec![(Which::Entropy, Threshold::Entropy206)],
        None => vec![(Which::Photon, Threshold::Photon067), (Which::Entropy, Threshold::Entropy206)],
    };
    let mut rows = Vec::new();
    for (w, t) in &selected {
        rows.push((*w, threshold_solve(*t)?, t.sign_changes(2000)?));
    }
    let name = |w: Which| match w {
        Which::Photon => "photon",
        Which::Entropy => "entropy",
    };
    let text = match cfg.format {
        Some(Format::Json) => pretty(
            &rows
                .iter()
                .map(|(w, root, changes)| json!({"which": name(*w), "root": root, "sign_changes": changes}))
                .collect::<Vec<_>>(),
        ),
        Some(Format::Csv) => {
            let mut s = String::from("which,root,sign_changes\n");
            for (w, root, changes) in &rows {
                s.push_str(&format!("{},{},{}\n", name(*w), format_number(*root), changes));
            }
            s
        }
        None if rows.len() == 1 => format_number(rows[0].1),
        None => rows
            .iter()
            .map(|(w, root, _)| format!("{} {}", name(*w), format_number(*root)))
            .collect::<Vec<_>>()
            .join("\n"),
    };
    sink.emit(&text)?;
    Ok(0)
}

fn minimize_rate(n: f64, k: usize, cfg: &CliConfig, sink: &mut Sink) -> CmdResult {
    let opts = MinimizeOptions {
        starts: cfg.cases.unwrap_or(MinimizeOptions::default().starts),
        seed: cfg.seed.unwrap_or(0),
        ..MinimizeOptions::default()
    };
    let min = min_entropy_rate_constrained(n, k, &opts)?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => pretty(&json!({
            "n": n,
            "K": k,
            "j_star": min.j_star,
            "bound": min.bound,
            "gap": min.j_star - min.bound,
            "mean": min.p_star.mean(),
            "starts": min.starts,
            "p_star": min.p_star.probs(),
        })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["label", "initial_rate", "rate", "iterations", "converged"])
                .expect("in-memory write");
            for s in &min.starts {
                w.write_record([
                    s.label.clone(),
                    format_number(s.initial_rate),
                    format_number(s.rate),
                    s.iterations.to_string(),
                    s.converged.to_string(),
                ])
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
    };
    sink.emit(&text)?;
    Ok(0)
}
