//! World instances: ground users with tasks, computing nodes, region bounds.
//!
//! All lengths are meters, capacities cycles/s (Hz), data sizes bits and times
//! seconds. Generators are pure functions of their inputs and seed.
//!
//! Scenario files are JSON:
//!
//! ```json
//! {
//!   "region": { "width": 4000.0, "height": 4000.0, "origin": { "x": 0.0, "y": 0.0 } },
//!   "users": [ { "id": 1, "position": { "x": 1.0, "y": 2.0 },
//!                "task": { "input_bits": 4e7, "cycles": 1e9, "deadline": 1.0 } } ],
//!   "nodes": [ { "id": 1, "position": { "x": 3.0, "y": 4.0 }, "capacity": 6e9 } ]
//! }
//! ```

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::{rng_for, stream};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned service area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub origin: Point2,
}

impl Region {
    pub fn new(width: f64, height: f64, origin: Point2) -> Result<Self> {
        let region = Self {
            width,
            height,
            origin,
        };
        region.validate()?;
        Ok(region)
    }

    /// Square region anchored at the origin.
    pub fn square(side: f64) -> Result<Self> {
        Self::new(side, side, Point2::default())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::Validation(format!(
                "region.width must be positive, got {}",
                self.width
            )));
        }
        if !(self.height > 0.0 && self.height.is_finite()) {
            return Err(Error::Validation(format!(
                "region.height must be positive, got {}",
                self.height
            )));
        }
        Ok(())
    }

    pub fn x_max(&self) -> f64 {
        self.origin.x + self.width
    }

    pub fn y_max(&self) -> f64 {
        self.origin.y + self.height
    }

    pub fn center(&self) -> Point2 {
        Point2::new(
            self.origin.x + 0.5 * self.width,
            self.origin.y + 0.5 * self.height,
        )
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    /// Closed containment test.
    pub fn contains(&self, p: &Point2) -> bool {
        p.x >= self.origin.x && p.x <= self.x_max() && p.y >= self.origin.y && p.y <= self.y_max()
    }

    pub fn clamp(&self, p: Point2) -> Point2 {
        Point2::new(
            p.x.clamp(self.origin.x, self.x_max()),
            p.y.clamp(self.origin.y, self.y_max()),
        )
    }

    /// Distance from `p` to the nearest point of the rectangle (0 inside).
    pub fn distance_to(&self, p: &Point2) -> f64 {
        p.distance(&self.clamp(*p))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        Point2::new(
            self.origin.x + self.width * rng.random::<f64>(),
            self.origin.y + self.height * rng.random::<f64>(),
        )
    }
}

/// Task profile `(L, C, D_max)` of a ground user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    /// Input size in bits.
    pub input_bits: f64,
    /// Required CPU cycles.
    pub cycles: f64,
    /// Maximum tolerable end-to-end latency in seconds.
    pub deadline: f64,
}

impl Task {
    pub fn new(input_bits: f64, cycles: f64, deadline: f64) -> Result<Self> {
        let task = Self {
            input_bits,
            cycles,
            deadline,
        };
        task.validate("task")?;
        Ok(task)
    }

    /// 5 MB input (decimal megabytes), 1e9 cycles, 1 s deadline.
    pub fn reference() -> Self {
        Self {
            input_bits: megabytes_to_bits(5.0),
            cycles: 1e9,
            deadline: 1.0,
        }
    }

    pub(crate) fn validate(&self, ctx: &str) -> Result<()> {
        for (name, v) in [
            ("input_bits", self.input_bits),
            ("cycles", self.cycles),
            ("deadline", self.deadline),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{ctx}.{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Decimal megabytes to bits (x 8 x 10^6).
pub fn megabytes_to_bits(mb: f64) -> f64 {
    mb * 8.0e6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundUser {
    pub id: usize,
    pub position: Point2,
    pub task: Task,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComputingNode {
    pub id: usize,
    pub position: Point2,
    /// Available computing capability in cycles/s.
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub region: Region,
    pub users: Vec<GroundUser>,
    pub nodes: Vec<ComputingNode>,
}

impl Scenario {
    pub fn new(region: Region, users: Vec<GroundUser>, nodes: Vec<ComputingNode>) -> Result<Self> {
        let s = Self {
            region,
            users,
            nodes,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn total_capacity(&self) -> f64 {
        self.nodes.iter().map(|n| n.capacity).sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.region.validate()?;
        for (i, u) in self.users.iter().enumerate() {
            if u.id != i + 1 {
                return Err(Error::Validation(format!(
                    "users[{i}].id must be {} (ids are contiguous from 1), got {}",
                    i + 1,
                    u.id
                )));
            }
            if !self.region.contains(&u.position) {
                return Err(Error::Validation(format!(
                    "users[{i}].position ({}, {}) lies outside the region",
                    u.position.x, u.position.y
                )));
            }
            u.task.validate(&format!("users[{i}].task"))?;
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i + 1 {
                return Err(Error::Validation(format!(
                    "nodes[{i}].id must be {} (ids are contiguous from 1), got {}",
                    i + 1,
                    n.id
                )));
            }
            if !(n.capacity > 0.0 && n.capacity.is_finite()) {
                return Err(Error::Validation(format!(
                    "nodes[{i}].capacity must be positive, got {}",
                    n.capacity
                )));
            }
            if !self.region.contains(&n.position) {
                return Err(Error::Validation(format!(
                    "nodes[{i}].position ({}, {}) lies outside the region",
                    n.position.x, n.position.y
                )));
            }
        }
        Ok(())
    }
}

fn users_from_positions(positions: Vec<Point2>, task: Task) -> Vec<GroundUser> {
    positions
        .into_iter()
        .enumerate()
        .map(|(i, position)| GroundUser {
            id: i + 1,
            position,
            task,
        })
        .collect()
}

/// Users uniform on the disk `(center, radius)` intersected with the region.
///
/// Points are drawn by polar sampling (`r = radius * sqrt(u)`), which is exact
/// on the disk; draws falling outside the region are redrawn so the result is
/// uniform on the intersection.
pub fn generate_hotspot_gus(
    region: &Region,
    count: usize,
    center: Point2,
    radius: f64,
    task: Task,
    seed: u64,
) -> Result<Vec<GroundUser>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!(
            "hotspot radius must be positive, got {radius}"
        )));
    }
    if region.distance_to(&center) >= radius {
        return Err(Error::invalid(
            "hotspot disk does not intersect the region".to_string(),
        ));
    }
    let mut rng = rng_for(seed, stream::USERS);
    let mut positions = Vec::with_capacity(count);
    while positions.len() < count {
        let r = radius * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        let p = Point2::new(center.x + r * theta.cos(), center.y + r * theta.sin());
        if region.contains(&p) {
            positions.push(p);
        }
    }
    Ok(users_from_positions(positions, task))
}

/// Users uniform over the whole region.
pub fn generate_random_gus(region: &Region, count: usize, task: Task, seed: u64) -> Vec<GroundUser> {
    let mut rng = rng_for(seed, stream::USERS);
    let positions = (0..count).map(|_| region.sample(&mut rng)).collect();
    users_from_positions(positions, task)
}

/// `count` nodes uniform over the region with i.i.d. `U[cap_min, cap_max]` capacities.
pub fn generate_cns_uniform(
    region: &Region,
    count: usize,
    cap_min: f64,
    cap_max: f64,
    seed: u64,
) -> Result<Vec<ComputingNode>> {
    if !(cap_min > 0.0 && cap_min.is_finite()) {
        return Err(Error::invalid(format!(
            "cap_min must be positive, got {cap_min}"
        )));
    }
    if !(cap_max >= cap_min && cap_max.is_finite()) {
        return Err(Error::invalid(format!(
            "cap_max ({cap_max}) must be >= cap_min ({cap_min})"
        )));
    }
    let mut rng = rng_for(seed, stream::NODES);
    Ok((0..count)
        .map(|i| {
            let position = region.sample(&mut rng);
            let capacity = cap_min + (cap_max - cap_min) * rng.random::<f64>();
            ComputingNode {
                id: i + 1,
                position,
                capacity,
            }
        })
        .collect())
}

/// Homogeneous Poisson point process of nodes, each with capacity `mean_capacity`.
///
/// `density` is in nodes per square meter.
pub fn sample_cns_ppp(
    region: &Region,
    density: f64,
    mean_capacity: f64,
    seed: u64,
) -> Result<Vec<ComputingNode>> {
    if !(density >= 0.0 && density.is_finite()) {
        return Err(Error::invalid(format!(
            "density must be non-negative, got {density}"
        )));
    }
    if !(mean_capacity > 0.0 && mean_capacity.is_finite()) {
        return Err(Error::invalid(format!(
            "mean_capacity must be positive, got {mean_capacity}"
        )));
    }
    let mut rng = rng_for(seed, stream::NODES);
    let mean = density * region.area();
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::invalid(format!("poisson mean {mean}: {e}")))?
            .sample(&mut rng) as usize
    } else {
        0
    };
    Ok((0..count)
        .map(|i| ComputingNode {
            id: i + 1,
            position: region.sample(&mut rng),
            capacity: mean_capacity,
        })
        .collect())
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(scenario)
        .map_err(|e| Error::invalid(format!("serializing scenario: {e}")))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let scenario: Scenario = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}
