//! Deployment evaluation: accessible computing sets, unique capacity, overlap
//! penalty, task-level pair selection, success probability and the scalar
//! utility, plus the feasibility predicate.
//!
//! Capacities are reported in GHz (the scenario stores cycles/s). One
//! evaluation builds the full `K x M x N` latency table once and derives every
//! metric from it.

use serde::{Deserialize, Serialize};

use crate::channel::{
    air_ground_rate, compute_delay, transfer_delay, ChannelParams, UavPosition,
};
use crate::error::{Error, Result};
use crate::scenario::{Region, Scenario};

const HZ_PER_GHZ: f64 = 1e9;

/// The UAV layout `Q`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Deployment {
    pub positions: Vec<UavPosition>,
}

impl Deployment {
    pub fn new(positions: Vec<UavPosition>) -> Self {
        Self { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Flattened `[x0, y0, h0, x1, y1, h1, ...]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.positions.iter().flat_map(|q| [q.x, q.y, q.h]).collect()
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        assert!(flat.len().is_multiple_of(3), "flat deployment length must be a multiple of 3");
        Self {
            positions: flat
                .chunks_exact(3)
                .map(|c| UavPosition::new(c[0], c[1], c[2]))
                .collect(),
        }
    }

    /// Smallest pairwise 3D distance, `+inf` for fewer than two UAVs.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.positions.iter().enumerate() {
            for b in &self.positions[i + 1..] {
                best = best.min(a.distance(b));
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeploymentConstraints {
    pub h_min: f64,
    pub h_max: f64,
    /// Minimum 3D distance between any two UAVs.
    pub d_min: f64,
    pub region: Region,
}

impl DeploymentConstraints {
    pub fn new(h_min: f64, h_max: f64, d_min: f64, region: Region) -> Result<Self> {
        let c = Self {
            h_min,
            h_max,
            d_min,
            region,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h_min > 0.0 && self.h_min <= self.h_max && self.h_max.is_finite()) {
            return Err(Error::Validation(format!(
                "constraints require 0 < h_min <= h_max, got h_min={} h_max={}",
                self.h_min, self.h_max
            )));
        }
        if !(self.d_min >= 0.0 && self.d_min.is_finite()) {
            return Err(Error::Validation(format!(
                "constraints.d_min must be non-negative, got {}",
                self.d_min
            )));
        }
        self.region.validate()
    }

    pub fn mid_altitude(&self) -> f64 {
        0.5 * (self.h_min + self.h_max)
    }
}

/// Weights of `F = alpha * Psi + beta * P_succ - gamma * Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityWeights {
    /// Per GHz.
    pub alpha: f64,
    pub beta: f64,
    /// Per GHz.
    pub gamma: f64,
}

impl Default for UtilityWeights {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            beta: 1.5e4,
            gamma: 0.1,
        }
    }
}

impl UtilityWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "weights.{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn combine(&self, psi: f64, p_succ: f64, omega: f64) -> f64 {
        self.alpha * psi + self.beta * p_succ - self.gamma * omega
    }
}

/// Selected `(UAV, CN)` pair of one user. Indices are zero-based positions in
/// the deployment and in `scenario.nodes`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub uav: usize,
    pub cn: usize,
    pub latency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// GHz.
    pub psi: f64,
    /// GHz.
    pub omega: f64,
    pub p_succ: f64,
    pub utility: f64,
    pub per_user_assignment: Vec<Option<Assignment>>,
}

impl EvaluationReport {
    pub const CSV_HEADER: &'static str = "psi_ghz,omega_ghz,p_succ,utility";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            crate::experiment::fmt_float(self.psi),
            crate::experiment::fmt_float(self.omega),
            crate::experiment::fmt_float(self.p_succ),
            crate::experiment::fmt_float(self.utility)
        )
    }
}

/// Something the optimizers can maximize.
pub trait Objective: Sync {
    fn score(&self, deployment: &Deployment) -> f64;
}

impl<T: Objective + ?Sized> Objective for &T {
    fn score(&self, deployment: &Deployment) -> f64 {
        (**self).score(deployment)
    }
}

/// Latency table of one deployment plus the accessibility bitmaps derived from it.
#[derive(Debug, Clone)]
pub struct AccessTable {
    m: usize,
    n: usize,
    /// `accessible[m * N + n]`.
    accessible: Vec<bool>,
    assignment: Vec<Option<Assignment>>,
}

impl AccessTable {
    pub fn num_uavs(&self) -> usize {
        self.m
    }

    pub fn is_accessible(&self, m: usize, n: usize) -> bool {
        self.accessible[m * self.n + n]
    }

    /// Sorted node indices of `C_m`.
    pub fn accessible_set(&self, m: usize) -> Vec<usize> {
        (0..self.n).filter(|&n| self.is_accessible(m, n)).collect()
    }

    pub fn assignment(&self, k: usize) -> Option<Assignment> {
        self.assignment[k]
    }

    /// Ψ in GHz, summed in node order.
    pub fn unique_capacity(&self, scenario: &Scenario) -> f64 {
        let mut total = 0.0;
        for (n, node) in scenario.nodes.iter().enumerate() {
            if (0..self.m).any(|m| self.is_accessible(m, n)) {
                total += node.capacity / HZ_PER_GHZ;
            }
        }
        total
    }

    pub fn pairwise_overlap(&self, a: usize, b: usize, scenario: &Scenario) -> f64 {
        let mut total = 0.0;
        for (n, node) in scenario.nodes.iter().enumerate() {
            if self.is_accessible(a, n) && self.is_accessible(b, n) {
                total += node.capacity / HZ_PER_GHZ;
            }
        }
        total
    }

    pub fn overlap_penalty(&self, scenario: &Scenario) -> f64 {
        if self.m < 2 {
            return 0.0;
        }
        let mut sum = 0.0;
        for a in 0..self.m {
            for b in a + 1..self.m {
                sum += self.pairwise_overlap(a, b, scenario);
            }
        }
        2.0 / (self.m as f64 * (self.m as f64 - 1.0)) * sum
    }

    /// `(1/K) sum 1_k`; `None` when there are no users.
    pub fn success_probability(&self, scenario: &Scenario) -> Option<f64> {
        if self.assignment.is_empty() {
            return None;
        }
        let ok = self
            .assignment
            .iter()
            .zip(&scenario.users)
            .filter(|(a, u)| matches!(a, Some(a) if a.latency <= u.task.deadline))
            .count();
        Some(ok as f64 / self.assignment.len() as f64)
    }
}

/// Evaluates deployments of one scenario.
///
/// `cn_radius` optionally restricts UAV `m` to nodes within that horizontal
/// distance of its ground projection (used by the Fixed baseline).
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    pub scenario: &'a Scenario,
    pub params: ChannelParams,
    pub weights: UtilityWeights,
    pub cn_radius: Option<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, params: ChannelParams, weights: UtilityWeights) -> Self {
        Self {
            scenario,
            params,
            weights,
            cn_radius: None,
        }
    }

    pub fn with_cn_radius(mut self, radius: f64) -> Self {
        self.cn_radius = Some(radius);
        self
    }

    pub fn table(&self, deployment: &Deployment) -> AccessTable {
        let sc = self.scenario;
        let p = &self.params;
        let m_count = deployment.len();
        let n_count = sc.nodes.len();

        let up: Vec<f64> = sc
            .users
            .iter()
            .flat_map(|u| {
                deployment.positions.iter().map(move |q| {
                    transfer_delay(
                        u.task.input_bits,
                        air_ground_rate(q.horizontal_distance(&u.position), q.h, p.p_user, p),
                    )
                })
            })
            .collect();

        let mut fwd_rate = vec![0.0; m_count * n_count];
        let mut allowed = vec![true; m_count * n_count];
        for (m, q) in deployment.positions.iter().enumerate() {
            for (n, cn) in sc.nodes.iter().enumerate() {
                let r = q.horizontal_distance(&cn.position);
                fwd_rate[m * n_count + n] = air_ground_rate(r, q.h, p.p_uav, p);
                if let Some(limit) = self.cn_radius {
                    allowed[m * n_count + n] = r <= limit;
                }
            }
        }

        let mut accessible = vec![false; m_count * n_count];
        let mut assignment = Vec::with_capacity(sc.users.len());
        for (k, u) in sc.users.iter().enumerate() {
            let deadline = u.task.deadline;
            let mut best: Option<Assignment> = None;
            for m in 0..m_count {
                let d_up = up[k * m_count + m];
                if !(d_up <= deadline) {
                    continue;
                }
                for (n, cn) in sc.nodes.iter().enumerate() {
                    let idx = m * n_count + n;
                    if !allowed[idx] {
                        continue;
                    }
                    let latency = d_up
                        + transfer_delay(u.task.input_bits, fwd_rate[idx])
                        + compute_delay(&u.task, cn);
                    if latency <= deadline {
                        accessible[idx] = true;
                        if best.is_none_or(|b| latency < b.latency) {
                            best = Some(Assignment { uav: m, cn: n, latency });
                        }
                    }
                }
            }
            assignment.push(best);
        }

        AccessTable {
            m: m_count,
            n: n_count,
            accessible,
            assignment,
        }
    }

    pub fn evaluate(&self, deployment: &Deployment) -> EvaluationReport {
        let table = self.table(deployment);
        let psi = table.unique_capacity(self.scenario);
        let omega = table.overlap_penalty(self.scenario);
        let p_succ = table.success_probability(self.scenario).unwrap_or(0.0);
        EvaluationReport {
            psi,
            omega,
            p_succ,
            utility: self.weights.combine(psi, p_succ, omega),
            per_user_assignment: table.assignment,
        }
    }
}

impl Objective for Evaluator<'_> {
    fn score(&self, deployment: &Deployment) -> f64 {
        self.evaluate(deployment).utility
    }
}

fn check_uav(m: usize, deployment: &Deployment) -> Result<()> {
    if m >= deployment.len() {
        return Err(Error::invalid(format!(
            "UAV index {m} out of range for {} UAVs",
            deployment.len()
        )));
    }
    Ok(())
}

/// `C_m` as sorted indices into `scenario.nodes`.
pub fn accessible_set(
    m: usize,
    deployment: &Deployment,
    scenario: &Scenario,
    params: &ChannelParams,
) -> Result<Vec<usize>> {
    check_uav(m, deployment)?;
    let ev = Evaluator::new(scenario, *params, UtilityWeights::default());
    Ok(ev.table(deployment).accessible_set(m))
}

/// Ψ in GHz.
pub fn unique_capacity(deployment: &Deployment, scenario: &Scenario, params: &ChannelParams) -> f64 {
    let ev = Evaluator::new(scenario, *params, UtilityWeights::default());
    ev.table(deployment).unique_capacity(scenario)
}

/// `O_{m,m'}` in GHz.
pub fn pairwise_overlap(
    m: usize,
    m2: usize,
    deployment: &Deployment,
    scenario: &Scenario,
    params: &ChannelParams,
) -> Result<f64> {
    check_uav(m, deployment)?;
    check_uav(m2, deployment)?;
    if m == m2 {
        return Err(Error::invalid("pairwise overlap needs two distinct UAVs"));
    }
    let ev = Evaluator::new(scenario, *params, UtilityWeights::default());
    Ok(ev.table(deployment).pairwise_overlap(m, m2, scenario))
}

/// Ω in GHz.
pub fn overlap_penalty(deployment: &Deployment, scenario: &Scenario, params: &ChannelParams) -> f64 {
    let ev = Evaluator::new(scenario, *params, UtilityWeights::default());
    ev.table(deployment).overlap_penalty(scenario)
}

/// Minimum-latency deadline-feasible pair for user `k`; ties go to the lower
/// UAV index, then the lower node index.
pub fn select_pair(
    k: usize,
    deployment: &Deployment,
    scenario: &Scenario,
    params: &ChannelParams,
) -> Result<Option<Assignment>> {
    if k >= scenario.users.len() {
        return Err(Error::invalid(format!(
            "user index {k} out of range for {} users",
            scenario.users.len()
        )));
    }
    let ev = Evaluator::new(scenario, *params, UtilityWeights::default());
    Ok(ev.table(deployment).assignment(k))
}

pub fn success_probability(
    deployment: &Deployment,
    scenario: &Scenario,
    params: &ChannelParams,
) -> Result<f64> {
    let ev = Evaluator::new(scenario, *params, UtilityWeights::default());
    ev.table(deployment)
        .success_probability(scenario)
        .ok_or_else(|| Error::invalid("success probability needs at least one user"))
}

pub fn utility(
    deployment: &Deployment,
    scenario: &Scenario,
    params: &ChannelParams,
    weights: &UtilityWeights,
) -> EvaluationReport {
    Evaluator::new(scenario, *params, *weights).evaluate(deployment)
}

/// Altitude bounds, region containment and pairwise 3D separation.
pub fn feasible(deployment: &Deployment, constraints: &DeploymentConstraints) -> bool {
    let in_bounds = deployment.positions.iter().all(|q| {
        q.h >= constraints.h_min
            && q.h <= constraints.h_max
            && constraints.region.contains(&q.ground())
    });
    in_bounds && deployment.min_separation() >= constraints.d_min
}
