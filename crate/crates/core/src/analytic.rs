//! Two-UAV disk model.
//!
//! Each UAV's accessible computing set is approximated by a ground disk of
//! radius `R_a` around its projection, and nodes form a homogeneous PPP of
//! density `lambda` with mean capacity `f_bar`. For two UAVs at horizontal
//! separation `d` the expected unique capacity is `f_bar * lambda * A_union(d)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{air_ground_rate, transfer_delay, ChannelParams};
use crate::error::{Error, Result};
use crate::scenario::Task;

/// Bisection stops once the bracket is this narrow (m).
pub const RADIUS_TOLERANCE: f64 = 0.1;

/// Default relative tolerance for the monotonicity/concavity checks.
pub const THEOREM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskModelParams {
    /// `R_a`, meters.
    pub radius: f64,
    /// Nodes per square meter.
    pub density: f64,
    /// Cycles/s.
    pub mean_capacity: f64,
    /// Meters.
    pub min_sep: f64,
}

impl DiskModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(format!("radius must be non-negative, got {}", self.radius)));
        }
        if !(self.density >= 0.0 && self.density.is_finite()) {
            return Err(Error::invalid(format!("density must be non-negative, got {}", self.density)));
        }
        if !(self.mean_capacity > 0.0 && self.mean_capacity.is_finite()) {
            return Err(Error::invalid(format!(
                "mean capacity must be positive, got {}",
                self.mean_capacity
            )));
        }
        if !(self.min_sep >= 0.0) {
            return Err(Error::invalid(format!("min_sep must be non-negative, got {}", self.min_sep)));
        }
        Ok(())
    }

    fn scale_ghz(&self) -> f64 {
        self.mean_capacity / 1e9 * self.density
    }
}

/// Largest horizontal UAV-to-node distance at which the representative task
/// still meets its deadline.
///
/// The user sits `user_offset` meters (horizontally) from the UAV projection
/// and the node has capacity `node_capacity`. The search runs on
/// `[0, upper_bound]` by bisection to [`RADIUS_TOLERANCE`]; 0 is returned when
/// the deadline fails even at distance 0.
pub fn effective_radius(
    altitude: f64,
    task: &Task,
    user_offset: f64,
    node_capacity: f64,
    upper_bound: f64,
    params: &ChannelParams,
) -> Result<f64> {
    if !(altitude > 0.0) {
        return Err(Error::invalid(format!("altitude must be positive, got {altitude}")));
    }
    if !(upper_bound >= 0.0 && upper_bound.is_finite()) {
        return Err(Error::invalid(format!("upper bound must be finite and non-negative, got {upper_bound}")));
    }
    let up = transfer_delay(task.input_bits, air_ground_rate(user_offset, altitude, params.p_user, params));
    let cmp = task.cycles / node_capacity;
    let meets = |r: f64| {
        let fwd = transfer_delay(task.input_bits, air_ground_rate(r, altitude, params.p_uav, params));
        up + fwd + cmp <= task.deadline
    };
    if !meets(0.0) {
        return Ok(0.0);
    }
    if meets(upper_bound) {
        return Ok(upper_bound);
    }
    let (mut lo, mut hi) = (0.0, upper_bound);
    while hi - lo > RADIUS_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if meets(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Lens area of two radius-`radius` circles whose centers are `separation` apart.
pub fn overlap_area(separation: f64, radius: f64) -> f64 {
    let (d, r) = (separation, radius);
    if d >= 2.0 * r {
        return 0.0;
    }
    2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt()
}

pub fn union_area(separation: f64, radius: f64) -> f64 {
    2.0 * PI * radius * radius - overlap_area(separation, radius)
}

/// Expected unique capacity in GHz.
pub fn expected_unique_capacity(separation: f64, disk: &DiskModelParams) -> f64 {
    disk.scale_ghz() * union_area(separation, disk.radius)
}

/// `dE[Psi]/dd` in GHz per meter on `[0, 2 R_a)`.
pub fn capacity_derivative(separation: f64, disk: &DiskModelParams) -> Result<f64> {
    let r = disk.radius;
    if !(separation >= 0.0 && separation < 2.0 * r) {
        return Err(Error::Domain(format!(
            "derivative defined on [0, 2R_a) = [0, {}), got {separation}",
            2.0 * r
        )));
    }
    Ok(disk.scale_ghz() * (4.0 * r * r - separation * separation).sqrt())
}

/// Separation maximizing expected capacity alone: `max(d_min, 2 R_a)`.
pub fn optimal_capacity_only_separation(disk: &DiskModelParams) -> f64 {
    disk.min_sep.max(2.0 * disk.radius)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Row {
    pub d: f64,
    pub e_psi: f64,
    /// `E[d_{i+1}] - E[d_i]`; `None` on the last point.
    pub first_diff: Option<f64>,
    /// `E[d_{i+1}] - 2E[d_i] + E[d_{i-1}]`; `None` on both end points.
    pub second_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    /// The domain `[d_min, 2R_a)` is empty and `E[Psi]` is constant there.
    pub saturated: bool,
    pub rows: Vec<Theorem1Row>,
    /// Grid indices `i` whose forward difference is not positive.
    pub monotonicity_violations: Vec<usize>,
    /// Grid indices `i` whose second difference is not negative.
    pub concavity_violations: Vec<usize>,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        self.monotonicity_violations.is_empty() && self.concavity_violations.is_empty()
    }

    pub fn to_csv(&self) -> String {
        use crate::experiment::fmt_float;
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        let mut out = String::from("d,e_psi,first_diff,second_diff\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_float(r.d),
                fmt_float(r.e_psi),
                opt(r.first_diff),
                opt(r.second_diff)
            ));
        }
        out
    }
}

/// Checks strict increase and strict concavity of `E[Psi(d)]` on a uniform grid
/// over `[d_min, 2R_a - eps]`, `eps = 1e-6 R_a`.
///
/// A forward difference counts as a violation unless it exceeds
/// `tol * max|E|`; a second difference unless it is below `-tol * max|E|`.
pub fn verify_theorem1(disk: &DiskModelParams, grid_size: usize) -> Result<Theorem1Report> {
    verify_theorem1_with_tolerance(disk, grid_size, THEOREM_TOLERANCE)
}

pub fn verify_theorem1_with_tolerance(
    disk: &DiskModelParams,
    grid_size: usize,
    tol: f64,
) -> Result<Theorem1Report> {
    disk.validate()?;
    if grid_size < 3 {
        return Err(Error::invalid(format!("grid size must be at least 3, got {grid_size}")));
    }
    let lo = disk.min_sep;
    let hi = 2.0 * disk.radius - 1e-6 * disk.radius;
    if lo >= hi {
        return Ok(Theorem1Report {
            saturated: true,
            rows: Vec::new(),
            monotonicity_violations: Vec::new(),
            concavity_violations: Vec::new(),
        });
    }
    let step = (hi - lo) / (grid_size - 1) as f64;
    let ds: Vec<f64> = (0..grid_size)
        .map(|i| if i + 1 == grid_size { hi } else { lo + step * i as f64 })
        .collect();
    let es: Vec<f64> = ds.iter().map(|&d| expected_unique_capacity(d, disk)).collect();
    let scale = es.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let thresh = tol * scale;

    let mut rows = Vec::with_capacity(grid_size);
    let mut mono = Vec::new();
    let mut conc = Vec::new();
    for i in 0..grid_size {
        let first = (i + 1 < grid_size).then(|| es[i + 1] - es[i]);
        let second = (i > 0 && i + 1 < grid_size).then(|| es[i + 1] - 2.0 * es[i] + es[i - 1]);
        if let Some(f) = first {
            if !(f > thresh) {
                mono.push(i);
            }
        }
        if let Some(s) = second {
            if !(s < -thresh) {
                conc.push(i);
            }
        }
        rows.push(Theorem1Row {
            d: ds[i],
            e_psi: es[i],
            first_diff: first,
            second_diff: second,
        });
    }
    Ok(Theorem1Report {
        saturated: false,
        rows,
        monotonicity_violations: mono,
        concavity_violations: conc,
    })
}
