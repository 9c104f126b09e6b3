//! Rotary-wing power model and the time/energy bookkeeping of the four
//! trip topologies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::params::{PowerProfile, RotorParams};
use crate::quad::golden_min;

fn power_at_weight(rotor: &RotorParams, weight: f64, v: f64) -> f64 {
    let profile = rotor.delta_drag / 8.0 * rotor.rho_air * rotor.solidity * rotor.a_disc * rotor.omega.powi(3) * rotor.r_rotor.powi(3);
    let induced = (1.0 + rotor.k_corr) * weight.powf(1.5) / (2.0 * rotor.rho_air * rotor.a_disc).sqrt();
    let v2 = v * v;
    let v0_2 = rotor.v0 * rotor.v0;
    let blade = profile * (1.0 + 3.0 * v2 / (rotor.u_tip * rotor.u_tip));
    let induced_term = induced * ((1.0 + v2 * v2 / (4.0 * v0_2 * v0_2)).sqrt() - v2 / (2.0 * v0_2)).sqrt();
    let parasite = 0.5 * rotor.d0 * rotor.rho_air * rotor.solidity * rotor.a_disc * v2 * v;
    blade + induced_term + parasite
}

/// Propulsion power at speed `v` for the loaded craft (weight `w_total`), W.
pub fn rotor_power(rotor: &RotorParams, v: f64) -> f64 {
    power_at_weight(rotor, rotor.w_total, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalVelocity {
    pub speed: f64,
    /// Energy per metre at `speed`, J/m.
    pub energy_per_m: f64,
    /// Set when the coarse scan found several local minima and a dense
    /// grid was used instead of golden-section refinement.
    pub grid_fallback: bool,
}

const COARSE_POINTS: usize = 300;

fn minimize_energy_per_m(rotor: &RotorParams, weight: f64) -> OptimalVelocity {
    let vmax = rotor.max_speed;
    let cost = |v: f64| power_at_weight(rotor, weight, v) / v;
    let step = vmax / COARSE_POINTS as f64;
    let values: Vec<f64> = (1..=COARSE_POINTS).map(|i| cost(i as f64 * step)).collect();
    let local_minima = (0..values.len())
        .filter(|&i| {
            let left = if i == 0 { f64::INFINITY } else { values[i - 1] };
            let right = values.get(i + 1).copied().unwrap_or(f64::INFINITY);
            values[i] <= left && values[i] <= right
        })
        .count();
    if local_minima > 1 {
        let n = (vmax / 1e-3).round() as usize;
        let (mut best_v, mut best) = (vmax, f64::INFINITY);
        for i in 1..=n {
            let v = i as f64 * 1e-3;
            let c = cost(v);
            if c < best {
                best = c;
                best_v = v;
            }
        }
        return OptimalVelocity {
            speed: best_v,
            energy_per_m: best,
            grid_fallback: true,
        };
    }
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lo = (best as f64 * step).max(1e-6);
    let hi = ((best + 2) as f64 * step).min(vmax);
    let (speed, energy_per_m) = golden_min(cost, lo, hi, 1e-5);
    OptimalVelocity {
        speed,
        energy_per_m,
        grid_fallback: false,
    }
}

/// Cruise speed minimizing energy per metre, p(V)/V, on (0, max_speed].
pub fn optimal_velocity(rotor: &RotorParams) -> OptimalVelocity {
    minimize_energy_per_m(rotor, rotor.w_total)
}

/// Aggregate powers and cruise speeds derived from rotor constants.
/// Service power is hover power plus the radio power.
pub fn derive_power_profile(rotor: &RotorParams) -> Result<PowerProfile> {
    rotor.validate()?;
    let loaded = rotor.w_total;
    let empty = rotor.w_total - rotor.package_weight;
    let with_pkg = minimize_energy_per_m(rotor, loaded);
    let without = minimize_energy_per_m(rotor, empty);
    let profile = PowerProfile {
        p_m: power_at_weight(rotor, empty, without.speed),
        p_mp: power_at_weight(rotor, loaded, with_pkg.speed),
        p_s: power_at_weight(rotor, empty, 0.0) + rotor.comm_power,
        p_sp: power_at_weight(rotor, loaded, 0.0) + rotor.comm_power,
        v: without.speed,
        v_p: with_pkg.speed,
        rotor: Some(*rotor),
    };
    profile.validate()?;
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RouteKind {
    /// S → IoT → TBS → D → S
    Route1,
    /// S → IoT → D → TBS → S
    Route2,
    /// S → D → IoT → TBS → S
    Route3,
    /// S → IoT → S → D → TBS → S
    Route4,
}

impl RouteKind {
    pub const ALL: [RouteKind; 4] = [RouteKind::Route1, RouteKind::Route2, RouteKind::Route3, RouteKind::Route4];

    /// 1-based route number.
    pub fn number(self) -> u8 {
        match self {
            RouteKind::Route1 => 1,
            RouteKind::Route2 => 2,
            RouteKind::Route3 => 3,
            RouteKind::Route4 => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get((n as usize).checked_sub(1)?).copied()
    }

    /// Radio powers while collecting and while forwarding (package aboard
    /// or not at each phase).
    pub fn comm_powers(self, power: &PowerProfile) -> (f64, f64) {
        match self {
            RouteKind::Route1 => (power.p_sp, power.p_sp),
            RouteKind::Route2 => (power.p_sp, power.p_s),
            RouteKind::Route3 | RouteKind::Route4 => (power.p_s, power.p_s),
        }
    }
}

/// Leg lengths of one trip; only the legs of the route's topology are set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LegDistances {
    pub sh1: Option<f64>,
    pub h1h2: Option<f64>,
    pub h2d: Option<f64>,
    pub sd: Option<f64>,
    pub h1d: Option<f64>,
    pub h2s: Option<f64>,
    pub sh2: Option<f64>,
    pub dh1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteLegs {
    pub legs: LegDistances,
    /// Seconds per bit/Hz on the collecting link.
    pub tau_c2u: f64,
    /// Seconds per bit/Hz on the forwarding link.
    pub tau_u2b: f64,
    /// Data moved, bit/Hz.
    pub payload: f64,
}

impl RouteLegs {
    /// Legs of `kind` through the hover points `h1` (collect) and `h2`
    /// (forward).
    pub fn from_points(kind: RouteKind, s: Point2, d: Point2, h1: Point2, h2: Point2, tau_c2u: f64, tau_u2b: f64, payload: f64) -> Self {
        let mut legs = LegDistances::default();
        match kind {
            RouteKind::Route1 => {
                legs.sh1 = Some(s.dist(h1));
                legs.h1h2 = Some(h1.dist(h2));
                legs.h2d = Some(h2.dist(d));
                legs.sd = Some(s.dist(d));
            }
            RouteKind::Route2 => {
                legs.sh1 = Some(s.dist(h1));
                legs.h1d = Some(h1.dist(d));
                legs.h2d = Some(h2.dist(d));
                legs.h2s = Some(h2.dist(s));
            }
            RouteKind::Route3 => {
                legs.sh2 = Some(s.dist(h2));
                legs.h1h2 = Some(h1.dist(h2));
                legs.dh1 = Some(d.dist(h1));
                legs.sd = Some(s.dist(d));
            }
            RouteKind::Route4 => {
                legs.sh1 = Some(s.dist(h1));
                legs.sh2 = Some(s.dist(h2));
                legs.h2d = Some(h2.dist(d));
                legs.sd = Some(s.dist(d));
            }
        }
        Self {
            legs,
            tau_c2u,
            tau_u2b,
            payload,
        }
    }

    pub fn with_payload(mut self, payload: f64) -> Self {
        self.payload = payload;
        self
    }
}

/// Travel split by package state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Travel {
    /// Distance flown with the package, m.
    pub loaded: f64,
    /// Distance flown without it, m.
    pub empty: f64,
    pub time: f64,
    pub energy: f64,
}

fn leg(v: Option<f64>, kind: RouteKind, name: &str) -> Result<f64> {
    match v {
        Some(d) if d >= 0.0 && d.is_finite() => Ok(d),
        Some(d) => Err(Error::Topology(format!("route {}: leg {name} = {d}", kind.number()))),
        None => Err(Error::Topology(format!("route {}: leg {name} missing", kind.number()))),
    }
}

fn check_unused(legs: &LegDistances, kind: RouteKind, allowed: &[&str]) -> Result<()> {
    let all = [
        ("sh1", legs.sh1),
        ("h1h2", legs.h1h2),
        ("h2d", legs.h2d),
        ("sd", legs.sd),
        ("h1d", legs.h1d),
        ("h2s", legs.h2s),
        ("sh2", legs.sh2),
        ("dh1", legs.dh1),
    ];
    for (name, v) in all {
        if v.is_some() && !allowed.contains(&name) {
            return Err(Error::Topology(format!("route {}: unexpected leg {name}", kind.number())));
        }
    }
    Ok(())
}

/// Loaded and empty distances of the route (in that order).
pub fn split_distances(kind: RouteKind, legs: &LegDistances) -> Result<(f64, f64)> {
    match kind {
        RouteKind::Route1 => {
            check_unused(legs, kind, &["sh1", "h1h2", "h2d", "sd"])?;
            Ok((
                leg(legs.sh1, kind, "sh1")? + leg(legs.h1h2, kind, "h1h2")? + leg(legs.h2d, kind, "h2d")?,
                leg(legs.sd, kind, "sd")?,
            ))
        }
        RouteKind::Route2 => {
            check_unused(legs, kind, &["sh1", "h1d", "h2d", "h2s"])?;
            Ok((
                leg(legs.sh1, kind, "sh1")? + leg(legs.h1d, kind, "h1d")?,
                leg(legs.h2d, kind, "h2d")? + leg(legs.h2s, kind, "h2s")?,
            ))
        }
        RouteKind::Route3 => {
            check_unused(legs, kind, &["sh2", "h1h2", "dh1", "sd"])?;
            Ok((
                leg(legs.sd, kind, "sd")?,
                leg(legs.sh2, kind, "sh2")? + leg(legs.h1h2, kind, "h1h2")? + leg(legs.dh1, kind, "dh1")?,
            ))
        }
        RouteKind::Route4 => {
            check_unused(legs, kind, &["sh1", "sh2", "h2d", "sd"])?;
            Ok((
                leg(legs.sd, kind, "sd")?,
                2.0 * leg(legs.sh1, kind, "sh1")? + leg(legs.sh2, kind, "sh2")? + leg(legs.h2d, kind, "h2d")?,
            ))
        }
    }
}

pub fn travel(kind: RouteKind, legs: &LegDistances, power: &PowerProfile) -> Result<Travel> {
    let (loaded, empty) = split_distances(kind, legs)?;
    let t_loaded = loaded / power.v_p;
    let t_empty = empty / power.v;
    Ok(Travel {
        loaded,
        empty,
        time: t_loaded + t_empty,
        energy: t_loaded * power.p_mp + t_empty * power.p_m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteMetrics {
    pub t_total: f64,
    pub e_total: f64,
    /// Time from departure until the package is dropped at D.
    pub t_delivery: f64,
}

pub fn route_metrics(kind: RouteKind, legs: &RouteLegs, power: &PowerProfile) -> Result<RouteMetrics> {
    if !(legs.payload >= 0.0) {
        return Err(Error::invalid("payload", "must be non-negative"));
    }
    let tr = travel(kind, &legs.legs, power)?;
    let t_c2u = legs.tau_c2u * legs.payload;
    let t_u2b = legs.tau_u2b * legs.payload;
    let (p1, p2) = kind.comm_powers(power);
    let l = &legs.legs;
    let t_delivery = match kind {
        RouteKind::Route1 => tr.loaded / power.v_p + t_c2u + t_u2b,
        RouteKind::Route2 => tr.loaded / power.v_p + t_c2u,
        RouteKind::Route3 => tr.loaded / power.v_p,
        RouteKind::Route4 => 2.0 * l.sh1.unwrap_or(0.0) / power.v + t_c2u + tr.loaded / power.v_p,
    };
    Ok(RouteMetrics {
        t_total: tr.time + t_c2u + t_u2b,
        e_total: tr.energy + t_c2u * p1 + t_u2b * p2,
        t_delivery,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataCapacity {
    /// Largest payload the remaining battery can move, bit/Hz.
    pub m_max: f64,
    /// Set when travel alone exceeds the battery.
    pub infeasible: bool,
}

/// Largest payload that fits in the battery after paying for travel.
pub fn max_transferable_data(kind: RouteKind, legs: &RouteLegs, power: &PowerProfile, b_max: f64) -> Result<DataCapacity> {
    let tr = travel(kind, &legs.legs, power)?;
    let remaining = b_max - tr.energy;
    if remaining < 0.0 {
        return Ok(DataCapacity {
            m_max: 0.0,
            infeasible: true,
        });
    }
    let (p1, p2) = kind.comm_powers(power);
    let per_unit = legs.tau_c2u * p1 + legs.tau_u2b * p2;
    let m_max = if per_unit > 0.0 { remaining / per_unit } else { f64::INFINITY };
    Ok(DataCapacity {
        m_max,
        infeasible: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotor() -> RotorParams {
        RotorParams::reference()
    }

    #[test]
    fn hover_power_is_profile_plus_induced() {
        let r = rotor();
        let p0 = r.delta_drag / 8.0 * r.rho_air * r.solidity * r.a_disc * r.omega.powi(3) * r.r_rotor.powi(3);
        let pi = (1.0 + r.k_corr) * r.w_total.powf(1.5) / (2.0 * r.rho_air * r.a_disc).sqrt();
        assert!((rotor_power(&r, 0.0) - (p0 + pi)).abs() < 1e-9);
    }

    #[test]
    fn parasite_term_is_cubic() {
        let r = rotor();
        let no_parasite = RotorParams { d0: 1e-300, ..r };
        for v in [1.0, 5.0, 17.0] {
            let diff = rotor_power(&r, v) - rotor_power(&no_parasite, v);
            let expected = 0.5 * r.d0 * r.rho_air * r.solidity * r.a_disc * v * v * v;
            assert!((diff - expected).abs() < 1e-9 * expected.max(1.0));
        }
    }

    #[test]
    fn induced_scales_with_weight_three_halves() {
        let r = rotor();
        let heavy = RotorParams { w_total: 2.0 * r.w_total, ..r };
        let p0 = rotor_power(&RotorParams { w_total: 1e-300, ..r }, 0.0);
        let ratio = (rotor_power(&heavy, 0.0) - p0) / (rotor_power(&r, 0.0) - p0);
        assert!((ratio - 2f64.powf(1.5)).abs() < 1e-9);
    }

    #[test]
    fn optimal_velocity_beats_neighbours_and_grid() {
        let r = rotor();
        let opt = optimal_velocity(&r);
        assert!(!opt.grid_fallback);
        let cost = |v: f64| rotor_power(&r, v) / v;
        assert!(cost(opt.speed) <= cost(opt.speed + 0.1));
        assert!(cost(opt.speed) <= cost(opt.speed - 0.1));
        let (mut best_v, mut best) = (0.0, f64::INFINITY);
        for i in 1..=3000 {
            let v = i as f64 * 0.01;
            if cost(v) < best {
                best = cost(v);
                best_v = v;
            }
        }
        assert!((best_v - opt.speed).abs() < 0.02);
    }

    #[test]
    fn derived_profile_is_ordered() {
        let p = derive_power_profile(&rotor()).unwrap();
        assert!(p.p_mp >= p.p_m && p.p_sp >= p.p_s);
        assert!(p.v_p > 0.0 && p.v > 0.0);
    }

    fn sample_legs(kind: RouteKind) -> RouteLegs {
        let s = Point2::new(0.0, 0.0);
        let d = Point2::new(5000.0, 0.0);
        let h1 = Point2::new(2000.0, 1400.0);
        let h2 = Point2::new(3400.0, -900.0);
        RouteLegs::from_points(kind, s, d, h1, h2, 0.4, 0.1, 1000.0)
    }

    #[test]
    fn zero_payload_route3_is_pure_travel() {
        let power = PowerProfile::table_i();
        let legs = sample_legs(RouteKind::Route3).with_payload(0.0);
        let m = route_metrics(RouteKind::Route3, &legs, &power).unwrap();
        let l = legs.legs;
        let expected = l.sd.unwrap() / power.v_p + (l.sh2.unwrap() + l.h1h2.unwrap() + l.dh1.unwrap()) / power.v;
        assert!((m.t_total - expected).abs() < 1e-9);
    }

    #[test]
    fn topology_is_checked() {
        let power = PowerProfile::table_i();
        let legs = sample_legs(RouteKind::Route1);
        assert!(matches!(route_metrics(RouteKind::Route2, &legs, &power), Err(Error::Topology(_))));
    }

    #[test]
    fn capacity_fills_battery() {
        let power = PowerProfile::table_i();
        for kind in RouteKind::ALL {
            let legs = sample_legs(kind);
            let cap = max_transferable_data(kind, &legs, &power, 639_360.0).unwrap();
            assert!(!cap.infeasible);
            let m = route_metrics(kind, &legs.with_payload(cap.m_max), &power).unwrap();
            assert!((m.e_total / 639_360.0 - 1.0).abs() < 1e-9);
            assert!(m.t_delivery <= m.t_total);
        }
        let legs = sample_legs(RouteKind::Route1);
        let travel_e = travel(RouteKind::Route1, &legs.legs, &power).unwrap().energy;
        let cap = max_transferable_data(RouteKind::Route1, &legs, &power, travel_e).unwrap();
        assert_eq!(cap.m_max, 0.0);
        assert!(!cap.infeasible);
        assert!(max_transferable_data(RouteKind::Route1, &legs, &power, travel_e * 0.5).unwrap().infeasible);
    }
}
