//! Two-stage deployment search: particle swarm initialization over the full
//! layout followed by per-UAV beam-search refinement with discounted rollouts.
//!
//! Every candidate layout is passed through [`project_feasible`] before it is
//! scored, so the objective only ever sees feasible deployments.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accessibility::{
    feasible, Deployment, DeploymentConstraints, EvaluationReport, Evaluator, Objective,
    UtilityWeights,
};
use crate::baselines::random_deploy;
use crate::channel::{ChannelParams, UavPosition};
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::seeding::{mix64, rng_for, stream};

/// Maximum number of pairwise repair rounds in [`project_feasible`].
pub const MAX_REPAIR_ROUNDS: usize = 100;
/// Repaired pairs are pushed to `d_min * SEPARATION_MARGIN`.
pub const SEPARATION_MARGIN: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    pub num_particles: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Per-axis speed limit as a fraction of that axis' extent.
    pub velocity_clamp: f64,
    pub seed: u64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            num_particles: 30,
            iterations: 100,
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
            velocity_clamp: 0.2,
            seed: 1,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_particles == 0 {
            return Err(Error::Validation("pso.num_particles must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.inertia) {
            return Err(Error::Validation(format!("pso.inertia must lie in [0, 1], got {}", self.inertia)));
        }
        if !(self.cognitive >= 0.0 && self.social >= 0.0) {
            return Err(Error::Validation("pso.cognitive and pso.social must be non-negative".into()));
        }
        if !(self.velocity_clamp > 0.0 && self.velocity_clamp.is_finite()) {
            return Err(Error::Validation(format!(
                "pso.velocity_clamp must be positive, got {}",
                self.velocity_clamp
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamParams {
    /// Horizontal step (both axes), meters.
    pub step_xy: f64,
    /// Vertical step, meters.
    pub step_h: f64,
    pub horizon: usize,
    pub discount: f64,
    pub width: usize,
    pub max_passes: usize,
}

impl Default for BeamParams {
    fn default() -> Self {
        Self {
            step_xy: 100.0,
            step_h: 20.0,
            horizon: 3,
            discount: 0.9,
            width: 4,
            max_passes: 50,
        }
    }
}

impl BeamParams {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.width == 0 {
            return Err(Error::Validation("beam.horizon and beam.width must be at least 1".into()));
        }
        if !(self.step_xy > 0.0 && self.step_h > 0.0) {
            return Err(Error::Validation("beam steps must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(Error::Validation(format!(
                "beam.discount must lie in [0, 1], got {}",
                self.discount
            )));
        }
        Ok(())
    }
}

/// Index of the zero displacement in [`local_actions`].
pub const STAY: usize = 0;

/// The seven local moves, in the fixed order
/// stay, +x, -x, +y, -y, +h, -h.
pub fn local_actions(beam: &BeamParams) -> [[f64; 3]; 7] {
    let (s, v) = (beam.step_xy, beam.step_h);
    [
        [0.0, 0.0, 0.0],
        [s, 0.0, 0.0],
        [-s, 0.0, 0.0],
        [0.0, s, 0.0],
        [0.0, -s, 0.0],
        [0.0, 0.0, v],
        [0.0, 0.0, -v],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Pso,
    Beam,
    Greedy,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Pso => "pso",
            Stage::Beam => "beam",
            Stage::Greedy => "greedy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub stage: Stage,
    /// PSO iteration or refinement pass; 0 is the starting state.
    pub iteration: usize,
    pub best_utility: f64,
    /// Cumulative objective evaluations.
    pub evals: usize,
}

/// One per-UAV decision of a local search pass; `action` indexes
/// [`local_actions`] and is [`STAY`] when nothing was executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub pass: usize,
    pub uav: usize,
    pub action: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub records: Vec<TraceRecord>,
    pub actions: Vec<ActionRecord>,
    pub final_deployment: Deployment,
    pub evaluations: usize,
}

impl OptimizerTrace {
    pub fn stage_utilities(&self, stage: Stage) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.stage == stage)
            .map(|r| r.best_utility)
            .collect()
    }

    /// Best-so-far utility never decreases within any stage.
    pub fn is_monotone(&self) -> bool {
        [Stage::Pso, Stage::Beam, Stage::Greedy].iter().all(|&s| {
            self.stage_utilities(s).windows(2).all(|w| w[1] >= w[0])
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,iteration,best_utility,evals\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.stage.as_str(),
                r.iteration,
                crate::experiment::fmt_float(r.best_utility),
                r.evals
            ));
        }
        out
    }

    fn append(&mut self, other: OptimizerTrace) {
        self.records.extend(other.records);
        self.actions.extend(other.actions);
        self.final_deployment = other.final_deployment;
        self.evaluations = other.evaluations;
    }
}

fn clamp_position(q: &UavPosition, c: &DeploymentConstraints) -> UavPosition {
    let g = c.region.clamp(q.ground());
    UavPosition::new(g.x, g.y, q.h.clamp(c.h_min, c.h_max))
}

/// Deterministic unit vector used to split coincident UAVs.
fn split_direction(i: usize, j: usize, round: usize) -> [f64; 3] {
    let key = mix64(((i as u64) << 40) ^ ((j as u64) << 20) ^ round as u64);
    let mut rng = rng_for(key, stream::SEPARATION);
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Projection onto the feasible set.
///
/// Positions are clamped to the altitude band and the region; pairs closer
/// than `d_min` are then pushed apart symmetrically along their connecting
/// line to `d_min * 1.01`, re-clamping after every round. If that stalls,
/// UAVs are placed one at a time at the nearest free spot. Feasible inputs
/// are returned unchanged.
pub fn project_feasible(deployment: &Deployment, c: &DeploymentConstraints) -> Result<Deployment> {
    let mut q: Vec<UavPosition> = deployment.positions.iter().map(|p| clamp_position(p, c)).collect();
    let mut out = Deployment::new(q.clone());
    if feasible(&out, c) {
        return Ok(out);
    }
    let target = c.d_min * SEPARATION_MARGIN;
    for round in 0..MAX_REPAIR_ROUNDS {
        for i in 0..q.len() {
            for j in i + 1..q.len() {
                let dist = q[i].distance(&q[j]);
                if dist >= c.d_min {
                    continue;
                }
                let u = if dist > 1e-9 * target.max(1.0) {
                    [
                        (q[j].x - q[i].x) / dist,
                        (q[j].y - q[i].y) / dist,
                        (q[j].h - q[i].h) / dist,
                    ]
                } else {
                    split_direction(i, j, round)
                };
                let shift = 0.5 * (target - dist);
                q[i].x -= shift * u[0];
                q[i].y -= shift * u[1];
                q[i].h -= shift * u[2];
                q[j].x += shift * u[0];
                q[j].y += shift * u[1];
                q[j].h += shift * u[2];
            }
        }
        for p in q.iter_mut() {
            *p = clamp_position(p, c);
        }
        out.positions.clone_from(&q);
        if feasible(&out, c) {
            return Ok(out);
        }
    }
    // Repulsion can stall when several UAVs are pinned in a corner.
    if let Some(placed) = place_sequentially(&q, c, target) {
        return Ok(Deployment::new(placed));
    }
    Err(Error::ProjectionFailed {
        rounds: MAX_REPAIR_ROUNDS,
        detail: format!(
            "{} UAVs, d_min {} m, smallest separation reached {:.3} m",
            q.len(),
            c.d_min,
            out.min_separation()
        ),
    })
}

/// Keeps UAVs in index order; each one that conflicts with an earlier one
/// moves to the nearest free spot on rings of radius `k * target / 2`.
fn place_sequentially(q: &[UavPosition], c: &DeploymentConstraints, target: f64) -> Option<Vec<UavPosition>> {
    let step = 0.5 * target;
    let max_rings = (c.region.diagonal() / step).ceil() as usize + 1;
    let levels = [c.h_min, c.mid_altitude(), c.h_max];
    let ok = |p: &UavPosition, placed: &[UavPosition]| placed.iter().all(|o| o.distance(p) >= target);
    let mut placed: Vec<UavPosition> = Vec::with_capacity(q.len());
    for p in q {
        let mut spot = ok(p, &placed).then_some(*p);
        for k in 1..=max_rings {
            if spot.is_some() {
                break;
            }
            let r = k as f64 * step;
            let n = 8 * k;
            let mut best: Option<(f64, UavPosition)> = None;
            for a in 0..n {
                let phi = std::f64::consts::TAU * a as f64 / n as f64;
                for h in std::iter::once(p.h).chain(levels) {
                    let cand = clamp_position(&UavPosition::new(p.x + r * phi.cos(), p.y + r * phi.sin(), h), c);
                    let moved = cand.distance(p);
                    if ok(&cand, &placed) && best.is_none_or(|(d, _)| moved < d) {
                        best = Some((moved, cand));
                    }
                }
            }
            spot = best.map(|(_, cand)| cand);
        }
        placed.push(spot?);
    }
    Some(placed)
}

/// Moves UAV `m` by `action` and projects the result.
pub fn apply_action(
    deployment: &Deployment,
    m: usize,
    action: [f64; 3],
    c: &DeploymentConstraints,
) -> Result<Deployment> {
    let mut next = deployment.clone();
    let q = &mut next.positions[m];
    q.x += action[0];
    q.y += action[1];
    q.h += action[2];
    project_feasible(&next, c)
}

fn check_count(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("at least one UAV is required"));
    }
    Ok(())
}

/// `J = sum_l rho^(l-1) (F(Q^l) - F(Q))` for UAV `m` following `actions`.
#[allow(clippy::too_many_arguments)]
pub fn rollout_score(
    m: usize,
    actions: &[[f64; 3]],
    deployment: &Deployment,
    scenario: &Scenario,
    params: &ChannelParams,
    weights: &UtilityWeights,
    constraints: &DeploymentConstraints,
    beam: &BeamParams,
) -> Result<f64> {
    if actions.is_empty() {
        return Err(Error::invalid("rollout needs at least one action"));
    }
    if m >= deployment.len() {
        return Err(Error::invalid(format!("UAV index {m} out of range")));
    }
    let ev = Evaluator::new(scenario, *params, *weights);
    let f0 = ev.score(deployment);
    let mut state = deployment.clone();
    let mut j = 0.0;
    for (l, a) in actions.iter().enumerate() {
        state = apply_action(&state, m, *a, constraints)?;
        j += beam.discount.powi(l as i32) * (ev.score(&state) - f0);
    }
    Ok(j)
}

/// Particle swarm search over flattened layouts, maximizing `objective`.
///
/// Particle 0 starts from [`random_deploy`] with the PSO seed, the others
/// uniformly in the box. Random draws happen sequentially per particle and
/// scoring runs in parallel, so the result only depends on the seed.
pub fn pso_search<O: Objective>(
    objective: &O,
    constraints: &DeploymentConstraints,
    pso: &PsoParams,
    m: usize,
) -> Result<(Deployment, OptimizerTrace)> {
    check_count(m)?;
    pso.validate()?;
    constraints.validate()?;
    let reg = &constraints.region;
    let lo_axis = [reg.origin.x, reg.origin.y, constraints.h_min];
    let hi_axis = [reg.x_max(), reg.y_max(), constraints.h_max];
    let dim = 3 * m;
    let lo: Vec<f64> = (0..dim).map(|d| lo_axis[d % 3]).collect();
    let hi: Vec<f64> = (0..dim).map(|d| hi_axis[d % 3]).collect();
    let vmax: Vec<f64> = (0..dim).map(|d| pso.velocity_clamp * (hi[d] - lo[d])).collect();

    let mut rng = rng_for(pso.seed, stream::PSO);
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(pso.num_particles);
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(pso.num_particles);
    for i in 0..pso.num_particles {
        let x = if i == 0 {
            random_deploy(constraints, m, pso.seed)?.to_flat()
        } else {
            let raw: Vec<f64> = (0..dim).map(|d| lo[d] + (hi[d] - lo[d]) * rng.random::<f64>()).collect();
            project_feasible(&Deployment::from_flat(&raw), constraints)?.to_flat()
        };
        let v: Vec<f64> = (0..dim).map(|d| vmax[d] * (2.0 * rng.random::<f64>() - 1.0)).collect();
        xs.push(x);
        vs.push(v);
    }

    let score_all = |xs: &[Vec<f64>]| -> Vec<f64> {
        xs.par_iter()
            .map(|x| objective.score(&Deployment::from_flat(x)))
            .collect()
    };

    let mut fx = score_all(&xs);
    let mut evals = xs.len();
    let mut pbest = xs.clone();
    let mut pbest_f = fx.clone();
    let mut g = 0;
    for i in 1..fx.len() {
        if fx[i] > fx[g] {
            g = i;
        }
    }
    let mut gbest = xs[g].clone();
    let mut gbest_f = fx[g];

    let mut trace = OptimizerTrace::default();
    trace.records.push(TraceRecord {
        stage: Stage::Pso,
        iteration: 0,
        best_utility: gbest_f,
        evals,
    });

    for it in 1..=pso.iterations {
        for i in 0..xs.len() {
            let (x, v) = (&mut xs[i], &mut vs[i]);
            for d in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let vel = pso.inertia * v[d]
                    + pso.cognitive * r1 * (pbest[i][d] - x[d])
                    + pso.social * r2 * (gbest[d] - x[d]);
                v[d] = vel.clamp(-vmax[d], vmax[d]);
                x[d] = (x[d] + v[d]).clamp(lo[d], hi[d]);
            }
            *x = project_feasible(&Deployment::from_flat(x), constraints)?.to_flat();
        }
        fx = score_all(&xs);
        evals += xs.len();
        for i in 0..xs.len() {
            if fx[i] > pbest_f[i] {
                pbest_f[i] = fx[i];
                pbest[i].clone_from(&xs[i]);
            }
            if fx[i] > gbest_f {
                gbest_f = fx[i];
                gbest.clone_from(&xs[i]);
            }
        }
        trace.records.push(TraceRecord {
            stage: Stage::Pso,
            iteration: it,
            best_utility: gbest_f,
            evals,
        });
    }

    let best = Deployment::from_flat(&gbest);
    trace.final_deployment = best.clone();
    trace.evaluations = evals;
    Ok((best, trace))
}

pub fn pso_init(
    scenario: &Scenario,
    params: &ChannelParams,
    weights: &UtilityWeights,
    constraints: &DeploymentConstraints,
    pso: &PsoParams,
    m: usize,
) -> Result<(Deployment, OptimizerTrace)> {
    pso_search(&Evaluator::new(scenario, *params, *weights), constraints, pso, m)
}

struct Prefix {
    first: usize,
    state: Deployment,
    score: f64,
}

/// Beam-search local refinement of `start`, maximizing `objective`.
///
/// UAVs are visited in index order. For UAV `m` all action sequences of
/// length `horizon` are explored keeping the best `width` prefixes per depth
/// (others frozen); the first action of the best sequence is executed when it
/// is a real move whose own utility change is non-negative. Stops after a pass
/// without moves or after `max_passes`.
pub fn beam_search<O: Objective>(
    objective: &O,
    start: &Deployment,
    constraints: &DeploymentConstraints,
    beam: &BeamParams,
) -> Result<(Deployment, OptimizerTrace)> {
    beam.validate()?;
    check_count(start.len())?;
    let actions = local_actions(beam);
    let mut current = start.clone();
    let mut f_cur = objective.score(&current);
    let mut evals = 1;
    let mut trace = OptimizerTrace::default();
    trace.records.push(TraceRecord {
        stage: Stage::Beam,
        iteration: 0,
        best_utility: f_cur,
        evals,
    });

    for pass in 1..=beam.max_passes {
        let mut moved = false;
        for m in 0..current.len() {
            let mut prefixes = vec![Prefix {
                first: STAY,
                state: current.clone(),
                score: 0.0,
            }];
            let mut one_step: Vec<(Deployment, f64)> = Vec::new();
            for depth in 0..beam.horizon {
                let mut states = Vec::with_capacity(prefixes.len() * actions.len());
                for p in &prefixes {
                    for (a, act) in actions.iter().enumerate() {
                        states.push((p, a, apply_action(&p.state, m, *act, constraints)?));
                    }
                }
                let scores: Vec<f64> = states.par_iter().map(|(_, _, s)| objective.score(s)).collect();
                evals += states.len();
                let weight = beam.discount.powi(depth as i32);
                let mut next: Vec<Prefix> = states
                    .into_iter()
                    .zip(&scores)
                    .map(|((p, a, s), f)| Prefix {
                        first: if depth == 0 { a } else { p.first },
                        state: s,
                        score: p.score + weight * (f - f_cur),
                    })
                    .collect();
                if depth == 0 {
                    one_step = next.iter().zip(&scores).map(|(p, f)| (p.state.clone(), *f)).collect();
                }
                next.sort_by(|a, b| b.score.total_cmp(&a.score));
                next.truncate(beam.width);
                prefixes = next;
            }
            let first = prefixes[0].first;
            let mut executed = STAY;
            if first != STAY {
                let (state, f) = &one_step[first];
                if f - f_cur >= 0.0 {
                    current = state.clone();
                    f_cur = *f;
                    executed = first;
                    moved = true;
                }
            }
            trace.actions.push(ActionRecord {
                pass,
                uav: m,
                action: executed,
            });
        }
        trace.records.push(TraceRecord {
            stage: Stage::Beam,
            iteration: pass,
            best_utility: f_cur,
            evals,
        });
        if !moved {
            break;
        }
    }
    trace.final_deployment = current.clone();
    trace.evaluations = evals;
    Ok((current, trace))
}

pub fn beam_refine(
    deployment: &Deployment,
    scenario: &Scenario,
    params: &ChannelParams,
    weights: &UtilityWeights,
    constraints: &DeploymentConstraints,
    beam: &BeamParams,
) -> Result<(Deployment, OptimizerTrace)> {
    beam_search(&Evaluator::new(scenario, *params, *weights), deployment, constraints, beam)
}

/// PSO followed by beam refinement of the PSO result.
pub fn optimize<O: Objective>(
    objective: &O,
    constraints: &DeploymentConstraints,
    pso: &PsoParams,
    beam: &BeamParams,
    m: usize,
) -> Result<(Deployment, OptimizerTrace)> {
    let (init, mut trace) = pso_search(objective, constraints, pso, m)?;
    let offset = trace.evaluations;
    let (best, mut refine) = beam_search(objective, &init, constraints, beam)?;
    for r in &mut refine.records {
        r.evals += offset;
    }
    refine.evaluations += offset;
    trace.append(refine);
    Ok((best, trace))
}

pub fn ca3d_optimize(
    scenario: &Scenario,
    params: &ChannelParams,
    weights: &UtilityWeights,
    constraints: &DeploymentConstraints,
    pso: &PsoParams,
    beam: &BeamParams,
    m: usize,
) -> Result<(Deployment, EvaluationReport, OptimizerTrace)> {
    let ev = Evaluator::new(scenario, *params, *weights);
    let (best, trace) = optimize(&ev, constraints, pso, beam, m)?;
    let report = ev.evaluate(&best);
    Ok((best, report, trace))
}
