//! Air-to-ground link model and end-to-end latency components.
//!
//! Both legs (user to UAV, UAV to node) use the same probabilistic
//! line-of-sight model: a logistic LoS probability in the elevation angle
//! (degrees), a power-law path loss with reference gain `beta0`, and an extra
//! attenuation `eta` for the NLoS share. Rates are Shannon rates over a
//! shared bandwidth. A zero rate is reported as an infinite delay so the
//! evaluation stays total.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{ComputingNode, GroundUser, Point2, Task};

/// Propagation and radio constants (SI units, linear scale).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    /// Environment constant `a` of the LoS logistic.
    pub a: f64,
    /// Environment constant `b` of the LoS logistic (per degree).
    pub b: f64,
    /// Linear channel gain at 1 m.
    pub beta0: f64,
    /// Path-loss exponent.
    pub pathloss_exp: f64,
    /// Extra NLoS attenuation, in (0, 1).
    pub nlos_atten: f64,
    /// Hz, shared by access and forwarding links.
    pub bandwidth: f64,
    /// User transmit power, W.
    pub p_user: f64,
    /// UAV transmit power, W.
    pub p_uav: f64,
    /// Noise power, W.
    pub noise: f64,
}

impl Default for ChannelParams {
    /// Urban logistic constants, -30 dB reference gain, exponent 2.6, 20 dB NLoS
    /// attenuation, 10 MHz, 0.1 W / 1 W transmit powers and -104 dBm thermal
    /// noise over 10 MHz.
    fn default() -> Self {
        Self {
            a: 9.61,
            b: 0.16,
            beta0: 1e-3,
            pathloss_exp: 2.6,
            nlos_atten: 0.01,
            bandwidth: 10e6,
            p_user: 0.1,
            p_uav: 1.0,
            noise: 3.98e-14,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a", self.a),
            ("b", self.b),
            ("beta0", self.beta0),
            ("pathloss_exp", self.pathloss_exp),
            ("bandwidth", self.bandwidth),
            ("p_user", self.p_user),
            ("p_uav", self.p_uav),
            ("noise", self.noise),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "channel.{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.nlos_atten > 0.0 && self.nlos_atten < 1.0) {
            return Err(Error::Validation(format!(
                "channel.nlos_atten must lie in (0, 1), got {}",
                self.nlos_atten
            )));
        }
        Ok(())
    }
}

/// UAV position `(x, y, h)`; `h` is the altitude above ground.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UavPosition {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl UavPosition {
    pub const fn new(x: f64, y: f64, h: f64) -> Self {
        Self { x, y, h }
    }

    pub fn ground(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn horizontal_distance(&self, p: &Point2) -> f64 {
        (self.x - p.x).hypot(self.y - p.y)
    }

    pub fn distance(&self, other: &UavPosition) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dh = self.h - other.h;
        (dx * dx + dy * dy + dh * dh).sqrt()
    }
}

/// Elevation angle in degrees, `(180/pi) * atan(h / r)`.
pub fn elevation_angle_deg(horizontal_dist: f64, altitude: f64) -> Result<f64> {
    if !(altitude > 0.0) {
        return Err(Error::invalid(format!(
            "altitude must be positive, got {altitude}"
        )));
    }
    if !(horizontal_dist >= 0.0) {
        return Err(Error::invalid(format!(
            "horizontal distance must be non-negative, got {horizontal_dist}"
        )));
    }
    Ok(altitude.atan2(horizontal_dist).to_degrees())
}

pub fn los_probability(theta_deg: f64, params: &ChannelParams) -> f64 {
    1.0 / (1.0 + params.a * (-params.b * (theta_deg - params.a)).exp())
}

/// Average large-scale gain `beta0 * d^-alpha * [P_LoS + eta (1 - P_LoS)]`.
pub fn channel_gain(link_dist: f64, theta_deg: f64, params: &ChannelParams) -> Result<f64> {
    if !(link_dist > 0.0) {
        return Err(Error::invalid(format!(
            "link distance must be positive, got {link_dist}"
        )));
    }
    Ok(gain_unchecked(link_dist, theta_deg, params))
}

#[inline]
fn gain_unchecked(link_dist: f64, theta_deg: f64, params: &ChannelParams) -> f64 {
    let p_los = los_probability(theta_deg, params);
    params.beta0
        * link_dist.powf(-params.pathloss_exp)
        * (p_los + params.nlos_atten * (1.0 - p_los))
}

/// Shannon rate `B log2(1 + p g / noise)` in bit/s.
pub fn link_rate(tx_power: f64, gain: f64, params: &ChannelParams) -> f64 {
    params.bandwidth * (1.0 + tx_power * gain / params.noise).log2()
}

/// Rate of an air-ground link with the given horizontal offset and altitude.
///
/// Returns 0 for a non-positive altitude (no valid geometry).
pub fn air_ground_rate(horizontal_dist: f64, altitude: f64, tx_power: f64, params: &ChannelParams) -> f64 {
    if !(altitude > 0.0) {
        return 0.0;
    }
    let link_dist = horizontal_dist.hypot(altitude);
    let theta = altitude.atan2(horizontal_dist).to_degrees();
    link_rate(tx_power, gain_unchecked(link_dist, theta, params), params)
}

pub fn uplink_rate(user: &GroundUser, uav: &UavPosition, params: &ChannelParams) -> f64 {
    air_ground_rate(uav.horizontal_distance(&user.position), uav.h, params.p_user, params)
}

pub fn forward_rate(uav: &UavPosition, cn: &ComputingNode, params: &ChannelParams) -> f64 {
    air_ground_rate(uav.horizontal_distance(&cn.position), uav.h, params.p_uav, params)
}

/// `L / R` with the convention that a zero rate yields `+inf`.
#[inline]
pub fn transfer_delay(bits: f64, rate: f64) -> f64 {
    if rate > 0.0 {
        bits / rate
    } else {
        f64::INFINITY
    }
}

pub fn uplink_delay(user: &GroundUser, uav: &UavPosition, params: &ChannelParams) -> f64 {
    transfer_delay(user.task.input_bits, uplink_rate(user, uav, params))
}

pub fn forward_delay(task: &Task, uav: &UavPosition, cn: &ComputingNode, params: &ChannelParams) -> f64 {
    transfer_delay(task.input_bits, forward_rate(uav, cn, params))
}

pub fn compute_delay(task: &Task, cn: &ComputingNode) -> f64 {
    task.cycles / cn.capacity
}

/// `D_up + D_fwd + D_cmp`; infinite if any leg is.
pub fn end_to_end_latency(
    user: &GroundUser,
    uav: &UavPosition,
    cn: &ComputingNode,
    params: &ChannelParams,
) -> f64 {
    uplink_delay(user, uav, params) + forward_delay(&user.task, uav, cn, params) + compute_delay(&user.task, cn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn urban() -> ChannelParams {
        ChannelParams {
            a: 9.61,
            b: 0.16,
            beta0: 1e-6,
            pathloss_exp: 2.3,
            nlos_atten: 0.2,
            ..ChannelParams::default()
        }
    }

    fn user_at(x: f64, y: f64, input_bits: f64) -> GroundUser {
        GroundUser {
            id: 1,
            position: Point2::new(x, y),
            task: Task {
                input_bits,
                cycles: 1e9,
                deadline: 1.0,
            },
        }
    }

    fn node_at(x: f64, y: f64, capacity: f64) -> ComputingNode {
        ComputingNode {
            id: 1,
            position: Point2::new(x, y),
            capacity,
        }
    }

    #[test]
    fn elevation_examples() {
        assert_relative_eq!(elevation_angle_deg(100.0, 100.0).unwrap(), 45.0, max_relative = 1e-12);
        assert_relative_eq!(elevation_angle_deg(0.0, 150.0).unwrap(), 90.0, max_relative = 1e-12);
        assert_relative_eq!(
            elevation_angle_deg(100.0 * 3f64.sqrt(), 100.0).unwrap(),
            30.0,
            max_relative = 1e-12
        );
        assert!(elevation_angle_deg(10.0, 0.0).is_err());
        assert!(elevation_angle_deg(10.0, -5.0).is_err());
    }

    #[test]
    fn los_examples() {
        let p = urban();
        assert_relative_eq!(los_probability(9.61, &p), 1.0 / 10.61, max_relative = 1e-12);
        // 1 / (1 + 9.61 exp(-0.16 * 80.39))
        assert_relative_eq!(los_probability(90.0, &p), 0.999_974_4, max_relative = 1e-6);
        // 1 / (1 + 9.61 exp(-0.16 * 35.39))
        assert_relative_eq!(los_probability(45.0, &p), 0.967_7, max_relative = 1e-4);
    }

    #[test]
    fn gain_examples() {
        let p = ChannelParams {
            nlos_atten: 1.0 - 1e-15,
            ..urban()
        };
        let g = channel_gain(200.0, 10.0, &p).unwrap();
        assert_relative_eq!(g, 1e-6 * 200f64.powf(-2.3), max_relative = 1e-12);

        let forced_los = ChannelParams { a: 1e-300, ..urban() };
        assert_relative_eq!(channel_gain(1.0, 45.0, &forced_los).unwrap(), 1e-6, max_relative = 1e-12);

        // Hand-composed at d = 200, theta = 45.
        let p = urban();
        let p_los = 1.0 / (1.0 + 9.61 * (-0.16f64 * (45.0 - 9.61)).exp());
        let expected = 1e-6 * 200f64.powf(-2.3) * (p_los + 0.2 * (1.0 - p_los));
        assert_relative_eq!(channel_gain(200.0, 45.0, &p).unwrap(), expected, max_relative = 1e-12);

        assert!(channel_gain(0.0, 45.0, &p).is_err());
    }

    #[test]
    fn rate_examples() {
        let p = ChannelParams::default();
        let unit_snr_gain = p.noise / 0.5;
        assert_relative_eq!(link_rate(0.5, unit_snr_gain, &p), 10e6, max_relative = 1e-12);
        assert_relative_eq!(link_rate(1.5, unit_snr_gain, &p), 20e6, max_relative = 1e-12);
        assert_eq!(link_rate(0.0, 1.0, &p), 0.0);
    }

    #[test]
    fn uplink_delay_oracle() {
        let p = ChannelParams::default();
        let uav = UavPosition::new(0.0, 0.0, 150.0);
        let user = user_at(120.0, 50.0, 4e7);
        let r = 130.0f64;
        let d = (r * r + 150.0 * 150.0).sqrt();
        let theta = (150.0f64 / r).atan() * 180.0 / std::f64::consts::PI;
        let p_los = 1.0 / (1.0 + p.a * (-p.b * (theta - p.a)).exp());
        let g = p.beta0 * d.powf(-p.pathloss_exp) * (p_los + p.nlos_atten * (1.0 - p_los));
        let rate = p.bandwidth * (1.0 + p.p_user * g / p.noise).log2();
        assert_relative_eq!(uplink_delay(&user, &uav, &p), 4e7 / rate, max_relative = 1e-12);
    }

    #[test]
    fn forward_delay_overhead_node() {
        let p = ChannelParams::default();
        let uav = UavPosition::new(10.0, 10.0, 100.0);
        let cn = node_at(10.0, 10.0, 5e9);
        let task = Task::reference();
        let g = p.beta0 * 100f64.powf(-p.pathloss_exp)
            * (los_probability(90.0, &p) + p.nlos_atten * (1.0 - los_probability(90.0, &p)));
        let rate = p.bandwidth * (1.0 + p.p_uav * g / p.noise).log2();
        assert_relative_eq!(forward_delay(&task, &uav, &cn, &p), 4e7 / rate, max_relative = 1e-12);

        let stronger = ChannelParams { p_uav: 2.0 * p.p_uav, ..p };
        assert!(forward_delay(&task, &uav, &cn, &stronger) <= forward_delay(&task, &uav, &cn, &p));
    }

    #[test]
    fn degenerate_links_are_infinite() {
        let p = ChannelParams {
            beta0: 1e-300,
            ..ChannelParams::default()
        };
        let uav = UavPosition::new(0.0, 0.0, 100.0);
        assert_eq!(forward_delay(&Task::reference(), &uav, &node_at(0.0, 0.0, 1e9), &p), f64::INFINITY);
        assert_eq!(transfer_delay(4e7, 0.0), f64::INFINITY);
        let user = user_at(0.0, 0.0, 4e7);
        assert_eq!(
            end_to_end_latency(&user, &uav, &node_at(0.0, 0.0, 1e9), &p),
            f64::INFINITY
        );
    }

    #[test]
    fn compute_delay_examples() {
        let task = Task::reference();
        assert_relative_eq!(compute_delay(&task, &node_at(0.0, 0.0, 2e9)), 0.5);
        assert_relative_eq!(compute_delay(&task, &node_at(0.0, 0.0, 10e9)), 0.1);
        assert_eq!(compute_delay(&task, &node_at(0.0, 0.0, f64::INFINITY)), 0.0);
    }

    #[test]
    fn latency_is_sum_of_components() {
        let p = ChannelParams::default();
        let user = user_at(300.0, 200.0, 4e7);
        let uav = UavPosition::new(250.0, 260.0, 180.0);
        let cn = node_at(900.0, 100.0, 7e9);
        let sum = uplink_delay(&user, &uav, &p) + forward_delay(&user.task, &uav, &cn, &p) + compute_delay(&user.task, &cn);
        assert_eq!(end_to_end_latency(&user, &uav, &cn, &p), sum);
    }

    #[test]
    fn unit_conversion_invariance() {
        let p = ChannelParams::default();
        let mb = 5.0;
        let user = user_at(100.0, 0.0, crate::scenario::megabytes_to_bits(mb));
        let uav = UavPosition::new(0.0, 0.0, 120.0);
        let mhz = 10.0;
        let p2 = ChannelParams { bandwidth: mhz * 1e6, ..p };
        assert_eq!(uplink_delay(&user, &uav, &p), uplink_delay(&user, &uav, &p2));
        assert_eq!(user.task.input_bits, 4e7);
    }
}
