//! Experiment harness behind the `simulate` CLI: TOML configs, the two-UAV
//! spacing sweep, the UAV-count sweep over schemes, single runs and
//! aggregated plot data.
//!
//! Floats in every CSV are printed with 9 significant digits ([`fmt_float`]).
//! Rows are produced in a fixed key order, so re-running a config yields
//! byte-identical files. Wall-clock times go to a separate timing file for the
//! same reason.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accessibility::{
    Deployment, DeploymentConstraints, EvaluationReport, Evaluator, UtilityWeights,
};
use crate::baselines::{fixed_deploy_and_evaluate, greedy_deploy, random_deploy, FixedBaselineParams};
use crate::channel::{ChannelParams, UavPosition};
use crate::error::{Error, Result};
use crate::optimizer::{ca3d_optimize, BeamParams, OptimizerTrace, PsoParams};
use crate::scenario::{
    generate_cns_uniform, generate_hotspot_gus, generate_random_gus, megabytes_to_bits,
    sample_cns_ppp, Point2, Region, Scenario, Task,
};

/// `%.9g`-style formatting: 9 significant digits, trailing zeros trimmed,
/// scientific notation for exponents below -4 or above 8.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ca3d,
    Greedy,
    Random,
    Fixed,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Ca3d, Scheme::Greedy, Scheme::Random, Scheme::Fixed];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Ca3d => "ca3d",
            Scheme::Greedy => "greedy",
            Scheme::Random => "random",
            Scheme::Fixed => "fixed",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}' (expected ca3d, greedy, random or fixed)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "lowercase", deny_unknown_fields)]
pub enum UserSpec {
    /// Uniform on a disk; the center defaults to the region center.
    Hotspot {
        count: usize,
        radius: f64,
        #[serde(default)]
        center: Option<Point2>,
    },
    /// Uniform over the whole region.
    Random { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "lowercase", deny_unknown_fields)]
pub enum NodeSpec {
    /// Fixed count, i.i.d. uniform capacities in Hz.
    Uniform { count: usize, cap_min: f64, cap_max: f64 },
    /// Poisson point process; every node gets `mean_capacity` Hz.
    Ppp { density_per_km2: f64, mean_capacity: f64 },
}

/// Task profile as written in config files; the input size is in decimal
/// megabytes (1 MB = 8e6 bits).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub input_mb: f64,
    pub cycles: f64,
    pub deadline: f64,
}

impl TaskSpec {
    pub fn to_task(&self) -> Result<Task> {
        Task::new(megabytes_to_bits(self.input_mb), self.cycles, self.deadline)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub region: Region,
    pub users: UserSpec,
    pub nodes: NodeSpec,
    pub task: TaskSpec,
}

impl ScenarioSpec {
    /// The point the spacing sweep is centred on.
    pub fn hotspot_center(&self) -> Point2 {
        match &self.users {
            UserSpec::Hotspot { center: Some(c), .. } => *c,
            _ => self.region.center(),
        }
    }

    pub fn build(&self, seed: u64) -> Result<Scenario> {
        let task = self.task.to_task()?;
        let users = match &self.users {
            UserSpec::Hotspot { count, radius, .. } => {
                generate_hotspot_gus(&self.region, *count, self.hotspot_center(), *radius, task, seed)?
            }
            UserSpec::Random { count } => generate_random_gus(&self.region, *count, task, seed),
        };
        let nodes = match &self.nodes {
            NodeSpec::Uniform { count, cap_min, cap_max } => {
                generate_cns_uniform(&self.region, *count, *cap_min, *cap_max, seed)?
            }
            NodeSpec::Ppp {
                density_per_km2,
                mean_capacity,
            } => sample_cns_ppp(&self.region, density_per_km2 / 1e6, *mean_capacity, seed)?,
        };
        Scenario::new(self.region, users, nodes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub h_min: f64,
    pub h_max: f64,
    pub d_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub seeds: Vec<u64>,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub uav_counts: Vec<usize>,
}

fn default_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacingSpec {
    pub altitudes: Vec<f64>,
    pub spacings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub channel: ChannelParams,
    pub weights: UtilityWeights,
    pub constraints: ConstraintSpec,
    #[serde(default)]
    pub pso: PsoParams,
    #[serde(default)]
    pub beam: BeamParams,
    #[serde(default)]
    pub fixed: FixedBaselineParams,
    pub run: RunSpec,
    #[serde(default)]
    pub spacing: Option<SpacingSpec>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Config(e.to_string());
        self.scenario.region.validate().map_err(wrap)?;
        self.scenario.task.to_task().map_err(wrap)?;
        self.channel.validate().map_err(wrap)?;
        self.weights.validate().map_err(wrap)?;
        self.constraints().map_err(wrap)?;
        self.pso.validate().map_err(wrap)?;
        self.beam.validate().map_err(wrap)?;
        if self.run.seeds.is_empty() {
            return Err(Error::Config("run.seeds must not be empty".into()));
        }
        if self.run.uav_counts.contains(&0) {
            return Err(Error::Config("run.uav_counts entries must be at least 1".into()));
        }
        if !(self.fixed.local_radius > 0.0) {
            return Err(Error::Config("fixed.local_radius must be positive".into()));
        }
        Ok(())
    }

    pub fn constraints(&self) -> Result<DeploymentConstraints> {
        let c = &self.constraints;
        DeploymentConstraints::new(c.h_min, c.h_max, c.d_min, self.scenario.region)
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::Config("seed list must not be empty".into()));
        }
        self.run.seeds = seeds;
        Ok(self)
    }

    pub fn with_schemes(mut self, schemes: Vec<Scheme>) -> Self {
        self.run.schemes = schemes;
        self
    }
}

/// Outcome of running one scheme on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeOutcome {
    /// Layout the scheme started from (its own placement for Fixed).
    pub initial: Deployment,
    pub deployment: Deployment,
    pub report: EvaluationReport,
    pub trace: Option<OptimizerTrace>,
}

/// Evaluator matching how `scheme` scores its deployments.
pub fn scheme_evaluator<'a>(config: &ExperimentConfig, scenario: &'a Scenario, scheme: Scheme) -> Evaluator<'a> {
    let ev = Evaluator::new(scenario, config.channel, config.weights);
    match scheme {
        Scheme::Fixed => ev.with_cn_radius(config.fixed.local_radius),
        _ => ev,
    }
}

pub fn run_scheme(
    config: &ExperimentConfig,
    scenario: &Scenario,
    scheme: Scheme,
    m: usize,
    seed: u64,
) -> Result<SchemeOutcome> {
    let c = config.constraints()?;
    let (p, w) = (&config.channel, &config.weights);
    match scheme {
        Scheme::Ca3d => {
            let pso = PsoParams { seed, ..config.pso };
            let initial = random_deploy(&c, m, seed)?;
            let (deployment, report, trace) = ca3d_optimize(scenario, p, w, &c, &pso, &config.beam, m)?;
            Ok(SchemeOutcome {
                initial,
                deployment,
                report,
                trace: Some(trace),
            })
        }
        Scheme::Greedy => {
            let initial = random_deploy(&c, m, seed)?;
            let (deployment, trace) = greedy_deploy(scenario, p, w, &c, &config.beam, m, seed)?;
            let report = Evaluator::new(scenario, *p, *w).evaluate(&deployment);
            Ok(SchemeOutcome {
                initial,
                deployment,
                report,
                trace: Some(trace),
            })
        }
        Scheme::Random => {
            let deployment = random_deploy(&c, m, seed)?;
            let report = Evaluator::new(scenario, *p, *w).evaluate(&deployment);
            Ok(SchemeOutcome {
                initial: deployment.clone(),
                deployment,
                report,
                trace: None,
            })
        }
        Scheme::Fixed => {
            let (deployment, report) = fixed_deploy_and_evaluate(scenario, p, w, &c, &config.fixed, m, seed)?;
            Ok(SchemeOutcome {
                initial: deployment.clone(),
                deployment,
                report,
                trace: None,
            })
        }
    }
}

fn status_text(msg: &str) -> String {
    format!("error: {}", msg.replace([',', '\n', '\r'], ";"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub p_succ: f64,
    pub psi: f64,
    pub omega: f64,
    pub utility: f64,
}

impl From<&EvaluationReport> for Metrics {
    fn from(r: &EvaluationReport) -> Self {
        Self {
            p_succ: r.p_succ,
            psi: r.psi,
            omega: r.omega,
            utility: r.utility,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UavRow {
    pub scheme: Scheme,
    pub m: usize,
    pub seed: u64,
    pub result: std::result::Result<Metrics, String>,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpacingRow {
    pub altitude: f64,
    pub spacing: f64,
    pub seed: u64,
    /// `Err` carries the reason a point was skipped.
    pub result: std::result::Result<Metrics, String>,
}

pub const UAV_HEADER: &str = "scheme,m,seed,p_succ,psi_ghz,omega_ghz,utility,status";
pub const TIMING_HEADER: &str = "scheme,m,seed,wall_clock_s";
pub const SPACING_HEADER: &str = "altitude_m,spacing_m,seed,psi_ghz,p_succ,omega_ghz,utility,status";

fn metric_fields(r: &std::result::Result<Metrics, String>, order: &[fn(&Metrics) -> f64]) -> (Vec<String>, String) {
    match r {
        Ok(m) => (order.iter().map(|f| fmt_float(f(m))).collect(), "ok".into()),
        Err(e) => (vec![String::new(); order.len()], e.clone()),
    }
}

pub fn uav_rows_csv(rows: &[UavRow]) -> String {
    let mut out = format!("{UAV_HEADER}\n");
    for r in rows {
        let (fields, status) = metric_fields(&r.result, &[|m| m.p_succ, |m| m.psi, |m| m.omega, |m| m.utility]);
        out.push_str(&format!("{},{},{},{},{}\n", r.scheme, r.m, r.seed, fields.join(","), status));
    }
    out
}

pub fn timing_csv(rows: &[UavRow]) -> String {
    let mut out = format!("{TIMING_HEADER}\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.scheme, r.m, r.seed, fmt_float(r.wall_clock_s)));
    }
    out
}

pub fn spacing_rows_csv(rows: &[SpacingRow]) -> String {
    let mut out = format!("{SPACING_HEADER}\n");
    for r in rows {
        let (fields, status) = metric_fields(&r.result, &[|m| m.psi, |m| m.p_succ, |m| m.omega, |m| m.utility]);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(r.altitude),
            fmt_float(r.spacing),
            r.seed,
            fields.join(","),
            status
        ));
    }
    out
}

fn build_scenarios(config: &ExperimentConfig) -> Result<Vec<Scenario>> {
    config
        .run
        .seeds
        .par_iter()
        .map(|&s| config.scenario.build(s))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config(format!("building scenario: {e}")))
}

/// Two UAVs at `(c -/+ d/2, c_y, h)` around the hotspot center for every
/// (altitude, spacing, seed); rows in config order.
pub fn run_spacing_sweep(config: &ExperimentConfig) -> Result<Vec<SpacingRow>> {
    let spec = config
        .spacing
        .as_ref()
        .ok_or_else(|| Error::Config("spacing sweep needs a [spacing] section".into()))?;
    let c = config.constraints()?;
    let scenarios = build_scenarios(config)?;
    let center = config.scenario.hotspot_center();
    let mut cells = Vec::new();
    for &h in &spec.altitudes {
        for &d in &spec.spacings {
            for (i, &seed) in config.run.seeds.iter().enumerate() {
                cells.push((h, d, i, seed));
            }
        }
    }
    log::info!("spacing sweep: {} cells", cells.len());
    Ok(cells
        .par_iter()
        .map(|&(h, d, i, seed)| {
            let dep = Deployment::new(vec![
                UavPosition::new(center.x - 0.5 * d, center.y, h),
                UavPosition::new(center.x + 0.5 * d, center.y, h),
            ]);
            let result = if d < c.d_min {
                Err(format!("skipped: spacing below d_min {}", fmt_float(c.d_min)))
            } else if !crate::accessibility::feasible(&dep, &c) {
                Err("skipped: placement outside altitude band or region".to_string())
            } else {
                let ev = Evaluator::new(&scenarios[i], config.channel, config.weights);
                Ok(Metrics::from(&ev.evaluate(&dep)))
            };
            SpacingRow {
                altitude: h,
                spacing: d,
                seed,
                result,
            }
        })
        .collect())
}

/// Every (scheme, M, seed) cell; rows sorted by scheme (config order), M, seed.
pub fn run_uav_count_sweep(config: &ExperimentConfig) -> Result<Vec<UavRow>> {
    let scenarios = build_scenarios(config)?;
    let mut cells = Vec::new();
    for (si, &scheme) in config.run.schemes.iter().enumerate() {
        for &m in &config.run.uav_counts {
            for (i, &seed) in config.run.seeds.iter().enumerate() {
                cells.push((si, scheme, m, i, seed));
            }
        }
    }
    log::info!("uav-count sweep: {} cells", cells.len());
    let mut rows: Vec<(usize, UavRow)> = cells
        .par_iter()
        .map(|&(si, scheme, m, i, seed)| {
            let t0 = Instant::now();
            let result = run_scheme(config, &scenarios[i], scheme, m, seed)
                .map(|o| Metrics::from(&o.report))
                .map_err(|e| status_text(&e.to_string()));
            if let Err(e) = &result {
                log::warn!("{scheme} m={m} seed={seed}: {e}");
            }
            (
                si,
                UavRow {
                    scheme,
                    m,
                    seed,
                    result,
                    wall_clock_s: t0.elapsed().as_secs_f64(),
                },
            )
        })
        .collect();
    rows.sort_by_key(|(si, r)| (*si, r.m, r.seed));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// Result of a single (scheme, M, seed) run with before/after layouts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleRun {
    pub scheme: Scheme,
    pub m: usize,
    pub seed: u64,
    pub initial: Deployment,
    pub deployment: Deployment,
    pub initial_report: EvaluationReport,
    pub report: EvaluationReport,
    pub trace: Option<OptimizerTrace>,
}

pub fn run_single(config: &ExperimentConfig) -> Result<SingleRun> {
    let (scheme, m) = match (config.run.schemes.as_slice(), config.run.uav_counts.as_slice()) {
        ([s], [m]) => (*s, *m),
        _ => {
            return Err(Error::Config(
                "a single run needs exactly one scheme and one UAV count".into(),
            ))
        }
    };
    let seed = config.run.seeds[0];
    let scenario = config
        .scenario
        .build(seed)
        .map_err(|e| Error::Config(format!("building scenario: {e}")))?;
    let out = run_scheme(config, &scenario, scheme, m, seed)?;
    let initial_report = scheme_evaluator(config, &scenario, scheme).evaluate(&out.initial);
    Ok(SingleRun {
        scheme,
        m,
        seed,
        initial: out.initial,
        deployment: out.deployment,
        initial_report,
        report: out.report,
        trace: out.trace,
    })
}

/// Re-evaluates a dumped single run against the scenario regenerated from `config`.
pub fn reevaluate(config: &ExperimentConfig, run: &SingleRun) -> Result<EvaluationReport> {
    let scenario = config.scenario.build(run.seed)?;
    Ok(scheme_evaluator(config, &scenario, run.scheme).evaluate(&run.deployment))
}

pub fn save_single(run: &SingleRun, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(run).map_err(|e| Error::invalid(e.to_string()))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_single(path: impl AsRef<Path>) -> Result<SingleRun> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Sample mean and standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpacingStat {
    pub altitude: f64,
    pub spacing: f64,
    pub n: usize,
    pub psi_mean: f64,
    pub psi_std: f64,
    pub p_succ_mean: f64,
    pub p_succ_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UavStat {
    pub scheme: Scheme,
    pub m: usize,
    pub n: usize,
    pub p_succ_mean: f64,
    pub p_succ_std: f64,
}

/// Per (altitude, spacing) statistics over successful rows, in first-seen order.
pub fn spacing_stats(rows: &[SpacingRow]) -> Vec<SpacingStat> {
    let mut keys: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        if r.result.is_ok() && !keys.contains(&(r.altitude, r.spacing)) {
            keys.push((r.altitude, r.spacing));
        }
    }
    keys.into_iter()
        .map(|(h, d)| {
            let ok: Vec<&Metrics> = rows
                .iter()
                .filter(|r| r.altitude == h && r.spacing == d)
                .filter_map(|r| r.result.as_ref().ok())
                .collect();
            let (psi_mean, psi_std) = mean_std(&ok.iter().map(|m| m.psi).collect::<Vec<_>>());
            let (p_succ_mean, p_succ_std) = mean_std(&ok.iter().map(|m| m.p_succ).collect::<Vec<_>>());
            SpacingStat {
                altitude: h,
                spacing: d,
                n: ok.len(),
                psi_mean,
                psi_std,
                p_succ_mean,
                p_succ_std,
            }
        })
        .collect()
}

/// Per (scheme, M) statistics over successful rows, in first-seen order.
pub fn uav_stats(rows: &[UavRow]) -> Vec<UavStat> {
    let mut keys: Vec<(Scheme, usize)> = Vec::new();
    for r in rows {
        if r.result.is_ok() && !keys.contains(&(r.scheme, r.m)) {
            keys.push((r.scheme, r.m));
        }
    }
    keys.into_iter()
        .map(|(scheme, m)| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.scheme == scheme && r.m == m)
                .filter_map(|r| r.result.as_ref().ok().map(|x| x.p_succ))
                .collect();
            let (p_succ_mean, p_succ_std) = mean_std(&vals);
            UavStat {
                scheme,
                m,
                n: vals.len(),
                p_succ_mean,
                p_succ_std,
            }
        })
        .collect()
}

pub enum SweepTable<'a> {
    Spacing(&'a [SpacingRow]),
    Uavs(&'a [UavRow]),
}

/// Writes the seed-aggregated panels of a sweep into `dir` and returns the paths.
///
/// Spacing sweeps give `spacing_psi.csv` and `spacing_p_succ.csv`; UAV-count
/// sweeps give `uavs_p_succ.csv`.
pub fn emit_plot_data(table: SweepTable<'_>, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut files = Vec::new();
    match table {
        SweepTable::Spacing(rows) => {
            let stats = spacing_stats(rows);
            let mut psi = String::from("altitude_m,spacing_m,n,mean,std\n");
            let mut ps = psi.clone();
            for s in &stats {
                let key = format!("{},{},{}", fmt_float(s.altitude), fmt_float(s.spacing), s.n);
                psi.push_str(&format!("{key},{},{}\n", fmt_float(s.psi_mean), fmt_float(s.psi_std)));
                ps.push_str(&format!("{key},{},{}\n", fmt_float(s.p_succ_mean), fmt_float(s.p_succ_std)));
            }
            files.push(write_file(dir.join("spacing_psi.csv"), &psi)?);
            files.push(write_file(dir.join("spacing_p_succ.csv"), &ps)?);
        }
        SweepTable::Uavs(rows) => {
            let mut out = String::from("scheme,m,n,mean,std\n");
            for s in uav_stats(rows) {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    s.scheme,
                    s.m,
                    s.n,
                    fmt_float(s.p_succ_mean),
                    fmt_float(s.p_succ_std)
                ));
            }
            files.push(write_file(dir.join("uavs_p_succ.csv"), &out)?);
        }
    }
    Ok(files)
}

pub fn write_file(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
