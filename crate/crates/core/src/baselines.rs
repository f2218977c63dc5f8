//! Comparison schemes: Random placement, Fixed (cluster placement with a
//! local node radius) and Greedy one-step local search.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::accessibility::{
    Deployment, DeploymentConstraints, EvaluationReport, Evaluator, Objective, UtilityWeights,
};
use crate::channel::{ChannelParams, UavPosition};
use crate::error::{Error, Result};
use crate::optimizer::{
    apply_action, local_actions, project_feasible, ActionRecord, BeamParams, OptimizerTrace, Stage,
    TraceRecord, STAY,
};
use crate::scenario::{Point2, Scenario};
use crate::seeding::{rng_for, stream};

const KMEANS_MAX_ITERS: usize = 100;

/// Uniform positions over the region and altitude band, projected to feasibility.
pub fn random_deploy(constraints: &DeploymentConstraints, m: usize, seed: u64) -> Result<Deployment> {
    if m == 0 {
        return Err(Error::invalid("at least one UAV is required"));
    }
    let reg = &constraints.region;
    let mut rng = rng_for(seed, stream::RANDOM_DEPLOY);
    let raw = (0..m)
        .map(|_| {
            let x = reg.origin.x + reg.width * rng.random::<f64>();
            let y = reg.origin.y + reg.height * rng.random::<f64>();
            let h = constraints.h_min + (constraints.h_max - constraints.h_min) * rng.random::<f64>();
            UavPosition::new(x, y, h)
        })
        .collect();
    project_feasible(&Deployment::new(raw), constraints)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixedBaselineParams {
    /// Horizontal radius around each UAV projection within which nodes count, meters.
    pub local_radius: f64,
    /// Flight altitude; the middle of the altitude band when absent.
    pub altitude: Option<f64>,
}

impl Default for FixedBaselineParams {
    fn default() -> Self {
        Self {
            local_radius: 200.0,
            altitude: None,
        }
    }
}

/// k-means (k-means++ seeding, Lloyd iterations) of the points into `k` centroids.
pub fn kmeans(points: &[Point2], k: usize, seed: u64) -> Vec<Point2> {
    if points.is_empty() || k == 0 {
        return Vec::new();
    }
    let mut rng = rng_for(seed, stream::FIXED);
    let mut centers = vec![points[rng.random_range(0..points.len())]];
    while centers.len() < k {
        let d2: Vec<f64> = points
            .iter()
            .map(|p| {
                centers
                    .iter()
                    .map(|c| (p.x - c.x).powi(2) + (p.y - c.y).powi(2))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut idx = d2.len() - 1;
            for (i, w) in d2.iter().enumerate() {
                if u < *w {
                    idx = i;
                    break;
                }
                u -= w;
            }
            idx
        } else {
            rng.random_range(0..points.len())
        };
        centers.push(points[pick]);
    }

    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..KMEANS_MAX_ITERS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, ctr) in centers.iter().enumerate() {
                let d = (p.x - ctr.x).powi(2) + (p.y - ctr.y).powi(2);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for (p, &l) in points.iter().zip(&labels) {
            sums[l].0 += p.x;
            sums[l].1 += p.y;
            sums[l].2 += 1;
        }
        for (c, (sx, sy, n)) in centers.iter_mut().zip(sums) {
            if n > 0 {
                *c = Point2::new(sx / n as f64, sy / n as f64);
            }
        }
    }
    centers
}

/// UAVs over the user cluster centroids at the configured altitude.
pub fn fixed_placement(
    scenario: &Scenario,
    constraints: &DeploymentConstraints,
    fixed: &FixedBaselineParams,
    m: usize,
    seed: u64,
) -> Result<Deployment> {
    if m == 0 {
        return Err(Error::invalid("at least one UAV is required"));
    }
    let h = fixed.altitude.unwrap_or_else(|| constraints.mid_altitude());
    let points: Vec<Point2> = scenario.users.iter().map(|u| u.position).collect();
    let mut centers = kmeans(&points, m, seed);
    if centers.is_empty() {
        centers = vec![constraints.region.center(); m];
    }
    let raw = centers.iter().map(|c| UavPosition::new(c.x, c.y, h)).collect();
    project_feasible(&Deployment::new(raw), constraints)
}

/// Places the Fixed UAVs and evaluates them with nodes restricted to
/// `local_radius` of each UAV.
#[allow(clippy::too_many_arguments)]
pub fn fixed_deploy_and_evaluate(
    scenario: &Scenario,
    params: &ChannelParams,
    weights: &UtilityWeights,
    constraints: &DeploymentConstraints,
    fixed: &FixedBaselineParams,
    m: usize,
    seed: u64,
) -> Result<(Deployment, EvaluationReport)> {
    if !(fixed.local_radius > 0.0) {
        return Err(Error::invalid(format!(
            "fixed local radius must be positive, got {}",
            fixed.local_radius
        )));
    }
    let placement = fixed_placement(scenario, constraints, fixed, m, seed)?;
    let report = Evaluator::new(scenario, *params, *weights)
        .with_cn_radius(fixed.local_radius)
        .evaluate(&placement);
    Ok((placement, report))
}

/// One-step hill climbing from `start`: each UAV in turn takes the local move
/// with the largest immediate gain (the zero move wins ties), until a sweep
/// yields no strict improvement or `max_passes` sweeps have run.
pub fn greedy_search<O: Objective>(
    objective: &O,
    start: &Deployment,
    constraints: &DeploymentConstraints,
    beam: &BeamParams,
) -> Result<(Deployment, OptimizerTrace)> {
    beam.validate()?;
    let actions = local_actions(beam);
    let mut current = start.clone();
    let mut f_cur = objective.score(&current);
    let mut evals = 1;
    let mut trace = OptimizerTrace::default();
    trace.records.push(TraceRecord {
        stage: Stage::Greedy,
        iteration: 0,
        best_utility: f_cur,
        evals,
    });
    for pass in 1..=beam.max_passes {
        let mut improved = false;
        for m in 0..current.len() {
            let mut best_a = STAY;
            let mut best_gain = f64::NEG_INFINITY;
            let mut best = None;
            for (a, act) in actions.iter().enumerate() {
                let cand = apply_action(&current, m, *act, constraints)?;
                let f = objective.score(&cand);
                evals += 1;
                if f - f_cur > best_gain {
                    best_gain = f - f_cur;
                    best_a = a;
                    best = Some((cand, f));
                }
            }
            if best_a != STAY && best_gain > 0.0 {
                let (state, f) = best.expect("at least one candidate evaluated");
                current = state;
                f_cur = f;
                improved = true;
            } else {
                best_a = STAY;
            }
            trace.actions.push(ActionRecord {
                pass,
                uav: m,
                action: best_a,
            });
        }
        trace.records.push(TraceRecord {
            stage: Stage::Greedy,
            iteration: pass,
            best_utility: f_cur,
            evals,
        });
        if !improved {
            break;
        }
    }
    trace.final_deployment = current.clone();
    trace.evaluations = evals;
    Ok((current, trace))
}

/// Greedy local search started from [`random_deploy`] with the run seed.
#[allow(clippy::too_many_arguments)]
pub fn greedy_deploy(
    scenario: &Scenario,
    params: &ChannelParams,
    weights: &UtilityWeights,
    constraints: &DeploymentConstraints,
    beam: &BeamParams,
    m: usize,
    seed: u64,
) -> Result<(Deployment, OptimizerTrace)> {
    let start = random_deploy(constraints, m, seed)?;
    greedy_search(&Evaluator::new(scenario, *params, *weights), &start, constraints, beam)
}
