//! Hover-point geometry and the trip optimizer.
//!
//! For each pair of hover radii on the planner grid and each of the four
//! route topologies, the hover points are placed on circles around the
//! cluster center and the TBS so that the detour from the route's anchor
//! segment is minimal. The optimizer then picks the fastest plan that moves
//! all the data, or the one that moves the most data when none can.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::channel::TransmissionTimes;
use crate::energy::{route_metrics, travel, RouteKind, RouteLegs, Travel};
use crate::error::{Error, Result};
use crate::geometry::{closest_on_segment, distance_to_segment, to_local_frame, Point2};
use crate::params::SystemParams;
use crate::quad::golden_min;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoverSolution {
    pub h: Point2,
    /// |A − H| + |H − B|.
    pub path_len: f64,
    /// `path_len − |A − B|`.
    pub detour: f64,
}

const HOVER_GRID: usize = 128;

/// Point within distance `d` of `c` minimizing |A−H| + |H−B|.
///
/// When the disk meets the segment A–B the detour is zero and the first
/// point of the segment inside the disk, walking from A, is returned.
/// Otherwise the optimum lies on the circle.
pub fn optimal_hover_point(a: Point2, b: Point2, c: Point2, d: f64) -> HoverSolution {
    let base = a.dist(b);
    let solution = |h: Point2| {
        let path_len = a.dist(h) + h.dist(b);
        HoverSolution {
            h,
            path_len,
            detour: path_len - base,
        }
    };
    let on_segment = |h: Point2| HoverSolution {
        h,
        path_len: base,
        detour: 0.0,
    };
    if d <= 0.0 {
        return solution(c);
    }
    if a.dist(c) <= d {
        return on_segment(a);
    }
    if base == 0.0 {
        let dir = a.sub(c);
        return solution(c.add(dir.scale(d / dir.norm())));
    }
    // the frame exists because a != b
    let local = to_local_frame(a, b, c).expect("distinct anchors");
    if distance_to_segment(c, a, b) <= d {
        // A lies outside the disk, so the entry point is the smaller root
        let w = (d * d - local.y * local.y).max(0.0).sqrt();
        let x = (local.x - w).clamp(0.0, base);
        let u = b.sub(a).scale(1.0 / base);
        return on_segment(a.add(u.scale(x)));
    }

    let at = |phi: f64| Point2::new(c.x + d * phi.cos(), c.y + d * phi.sin());
    let cost = |phi: f64| {
        let h = at(phi);
        a.dist(h) + h.dist(b)
    };
    let step = TAU / HOVER_GRID as f64;
    let values: Vec<f64> = (0..HOVER_GRID).map(|i| cost(i as f64 * step)).collect();
    let mut best_phi = 0.0;
    let mut best = f64::INFINITY;
    let mut consider = |phi: f64, v: f64| {
        if v < best {
            best = v;
            best_phi = phi;
        }
    };
    for i in 0..HOVER_GRID {
        let prev = values[(i + HOVER_GRID - 1) % HOVER_GRID];
        let next = values[(i + 1) % HOVER_GRID];
        if values[i] <= prev && values[i] <= next {
            let phi0 = i as f64 * step;
            let (phi, v) = golden_min(cost, phi0 - step, phi0 + step, 1e-11);
            consider(phi, v);
        }
    }
    for target in [a, b, closest_on_segment(c, a, b)] {
        let dir = target.sub(c);
        if dir.norm() > 0.0 {
            let phi = dir.y.atan2(dir.x);
            consider(phi, cost(phi));
        }
    }
    solution(at(best_phi))
}

/// Positions of one planning instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub s: Point2,
    pub d: Point2,
    pub iot: Point2,
    pub tbs: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripPlan {
    /// `None` for the pure delivery trip S → D → S.
    pub route: Option<RouteKind>,
    pub h1: Option<Point2>,
    pub h2: Option<Point2>,
    pub r_c2u: f64,
    pub r_u2b: f64,
    pub t_total: f64,
    pub t_delivery: f64,
    pub e_total: f64,
    /// Data actually moved, bit/Hz.
    pub m_t_over_bw: f64,
    /// Data requested, bit/Hz.
    pub m_over_bw: f64,
    pub feasible_full_delivery: bool,
    pub legs: Option<RouteLegs>,
}

/// One enumerated (route, radii) combination.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    route: RouteKind,
    h1: Point2,
    h2: Point2,
    r_c2u: f64,
    r_u2b: f64,
    travel: Travel,
    tau_c2u: f64,
    tau_u2b: f64,
    /// Comm energy per bit/Hz.
    comm_energy: f64,
    m_max: f64,
}

impl Candidate {
    fn time(&self, m: f64) -> f64 {
        self.travel.time + self.tau_c2u * m + self.tau_u2b * m
    }

    fn energy(&self, m: f64) -> f64 {
        self.travel.energy + self.comm_energy * m
    }
}

/// Running selection for one requested payload.
#[derive(Debug, Clone, Copy)]
struct Selection {
    m: f64,
    full: Option<(Candidate, f64, f64)>,
    partial: Option<(Candidate, f64)>,
}

impl Selection {
    fn new(m: f64) -> Self {
        Self {
            m,
            full: None,
            partial: None,
        }
    }

    fn offer(&mut self, c: &Candidate) {
        if c.m_max >= self.m {
            let t = c.time(self.m);
            let e = c.energy(self.m);
            let better = match &self.full {
                None => true,
                Some((best, bt, be)) => {
                    t < *bt || (t == *bt && (e < *be || (e == *be && c.route < best.route)))
                }
            };
            if better {
                self.full = Some((*c, t, e));
            }
        } else if self.full.is_none() {
            let t = c.time(c.m_max);
            let better = match &self.partial {
                None => true,
                Some((best, bt)) => {
                    c.m_max > best.m_max || (c.m_max == best.m_max && (t < *bt || (t == *bt && c.route < best.route)))
                }
            };
            if better {
                self.partial = Some((*c, t));
            }
        }
    }
}

/// Trip optimizer bound to one parameter set and a shared cache of
/// transmission times.
#[derive(Debug)]
pub struct Planner<'a> {
    params: &'a SystemParams,
    times: &'a TransmissionTimes,
    step: f64,
}

impl<'a> Planner<'a> {
    pub fn new(params: &'a SystemParams, times: &'a TransmissionTimes) -> Self {
        Self {
            params,
            times,
            step: params.run.grid_step,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Best plan over all four routes for one requested payload.
    pub fn plan(&self, sc: &Scenario, m_over_bw: f64) -> Result<TripPlan> {
        Ok(self.plan_many(sc, &[m_over_bw])?.remove(0))
    }

    /// Best plans for several payloads on the same instance; the candidate
    /// enumeration is shared.
    pub fn plan_many(&self, sc: &Scenario, ms: &[f64]) -> Result<Vec<TripPlan>> {
        self.optimize(sc, ms, &RouteKind::ALL)
    }

    /// Plan restricted to delivering the package first (route 3).
    pub fn deliver_first(&self, sc: &Scenario, m_over_bw: f64) -> Result<TripPlan> {
        Ok(self.deliver_first_many(sc, &[m_over_bw])?.remove(0))
    }

    pub fn deliver_first_many(&self, sc: &Scenario, ms: &[f64]) -> Result<Vec<TripPlan>> {
        self.optimize(sc, ms, &[RouteKind::Route3])
    }

    /// The S → D → S trip without any data task.
    pub fn pure_delivery(&self, sc: &Scenario) -> Result<TripPlan> {
        let p = &self.params.power;
        let sd = sc.s.dist(sc.d);
        let t_out = sd / p.v_p;
        let t_back = sd / p.v;
        let e = t_out * p.p_mp + t_back * p.p_m;
        if e > self.params.b_max {
            return Err(Error::Infeasible {
                travel_energy: e,
                battery: self.params.b_max,
            });
        }
        Ok(TripPlan {
            route: None,
            h1: None,
            h2: None,
            r_c2u: 0.0,
            r_u2b: 0.0,
            t_total: t_out + t_back,
            t_delivery: t_out,
            e_total: e,
            m_t_over_bw: 0.0,
            m_over_bw: 0.0,
            feasible_full_delivery: true,
            legs: None,
        })
    }

    fn validate(&self, sc: &Scenario, ms: &[f64]) -> Result<()> {
        for p in [sc.s, sc.d, sc.iot, sc.tbs] {
            if !p.is_finite() {
                return Err(Error::Domain("non-finite scenario coordinates".into()));
            }
        }
        if sc.s == sc.d {
            return Err(Error::DegenerateFrame);
        }
        if !(self.step > 0.0) {
            return Err(Error::invalid("run.grid_step_m", "must be positive"));
        }
        if ms.is_empty() || ms.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::invalid("mission.data_over_bandwidth", "must be finite and non-negative"));
        }
        Ok(())
    }

    fn optimize(&self, sc: &Scenario, ms: &[f64], routes: &[RouteKind]) -> Result<Vec<TripPlan>> {
        self.validate(sc, ms)?;
        let pure = self.pure_delivery(sc)?;
        let mut selections: Vec<Selection> = ms.iter().map(|&m| Selection::new(m)).collect();
        if ms.iter().any(|&m| m > 0.0) {
            self.enumerate(sc, routes, |c| {
                for sel in selections.iter_mut().filter(|s| s.m > 0.0) {
                    sel.offer(c);
                }
            })?;
        }
        selections
            .iter()
            .map(|sel| {
                if sel.m == 0.0 {
                    return Ok(TripPlan { m_over_bw: 0.0, ..pure });
                }
                if let Some((c, _, _)) = sel.full {
                    return self.finish(sc, &c, sel.m, sel.m, true);
                }
                match sel.partial {
                    Some((c, _)) if c.m_max > 0.0 => self.finish(sc, &c, c.m_max, sel.m, false),
                    _ => Ok(TripPlan {
                        m_over_bw: sel.m,
                        feasible_full_delivery: false,
                        ..pure
                    }),
                }
            })
            .collect()
    }

    fn finish(&self, sc: &Scenario, c: &Candidate, payload: f64, requested: f64, full: bool) -> Result<TripPlan> {
        let legs = RouteLegs::from_points(c.route, sc.s, sc.d, c.h1, c.h2, c.tau_c2u, c.tau_u2b, payload);
        let m = route_metrics(c.route, &legs, &self.params.power)?;
        Ok(TripPlan {
            route: Some(c.route),
            h1: Some(c.h1),
            h2: Some(c.h2),
            r_c2u: c.r_c2u,
            r_u2b: c.r_u2b,
            t_total: m.t_total,
            t_delivery: m.t_delivery,
            e_total: m.e_total,
            m_t_over_bw: payload,
            m_over_bw: requested,
            feasible_full_delivery: full,
            legs: Some(legs),
        })
    }

    /// Largest collection radius searched: the cluster's distance to the
    /// S–D segment, but at least the cluster radius.
    pub fn c2u_limit(&self, sc: &Scenario) -> f64 {
        distance_to_segment(sc.iot, sc.s, sc.d).max(self.params.r_c)
    }

    /// Largest forwarding radius searched: the TBS's distance to the
    /// farthest point any anchor segment can reach.
    pub fn u2b_limit(&self, sc: &Scenario) -> f64 {
        let far_h1 = sc.tbs.dist(sc.iot) + self.c2u_limit(sc);
        sc.tbs.dist(sc.s).max(sc.tbs.dist(sc.d)).max(far_h1)
    }

    /// Visit every feasible candidate in a fixed order (collection radius,
    /// then forwarding radius, then route). Forwarding radii past the first
    /// one with zero detour are skipped: the travel is unchanged and the
    /// link only gets slower.
    fn enumerate<F: FnMut(&Candidate)>(&self, sc: &Scenario, routes: &[RouteKind], mut visit: F) -> Result<()> {
        let power = &self.params.power;
        let b_max = self.params.b_max;
        let kc_max = (self.c2u_limit(sc) / self.step + 1e-9).floor() as usize;
        let ku_max = (self.u2b_limit(sc) / self.step + 1e-9).floor() as usize;
        let radii_u: Vec<f64> = (0..=ku_max).map(|k| k as f64 * self.step).collect();
        let taus_u: Vec<f64> = radii_u.iter().map(|&r| self.times.tau_u2b(r)).collect();

        let needs_ds = routes.iter().any(|r| matches!(r, RouteKind::Route2 | RouteKind::Route4));
        let mut h2_ds: Vec<HoverSolution> = Vec::new();
        if needs_ds {
            for &r in &radii_u {
                let h = optimal_hover_point(sc.d, sc.s, sc.tbs, r);
                let done = h.detour <= 0.0;
                h2_ds.push(h);
                if done {
                    break;
                }
            }
        }

        for kc in 0..=kc_max {
            let r_c2u = kc as f64 * self.step;
            let tau_c2u = self.times.tau_c2u(r_c2u);
            let mut h1_sd = None;
            let mut h1_ds = None;
            let mut h1_ss = None;
            for &route in routes {
                let (p1, p2) = route.comm_powers(power);
                let h1 = match route {
                    RouteKind::Route1 | RouteKind::Route2 => {
                        *h1_sd.get_or_insert_with(|| optimal_hover_point(sc.s, sc.d, sc.iot, r_c2u))
                    }
                    RouteKind::Route3 => *h1_ds.get_or_insert_with(|| optimal_hover_point(sc.d, sc.s, sc.iot, r_c2u)),
                    RouteKind::Route4 => *h1_ss.get_or_insert_with(|| optimal_hover_point(sc.s, sc.s, sc.iot, r_c2u)),
                }
                .h;
                for (ku, &r_u2b) in radii_u.iter().enumerate() {
                    let h2 = match route {
                        RouteKind::Route1 => optimal_hover_point(h1, sc.d, sc.tbs, r_u2b),
                        RouteKind::Route3 => optimal_hover_point(h1, sc.s, sc.tbs, r_u2b),
                        RouteKind::Route2 | RouteKind::Route4 => match h2_ds.get(ku) {
                            Some(h) => *h,
                            None => break,
                        },
                    };
                    let legs = RouteLegs::from_points(route, sc.s, sc.d, h1, h2.h, tau_c2u, taus_u[ku], 0.0);
                    let tr = travel(route, &legs.legs, power)?;
                    let remaining = b_max - tr.energy;
                    if remaining >= 0.0 {
                        let comm_energy = tau_c2u * p1 + taus_u[ku] * p2;
                        let m_max = if comm_energy > 0.0 { remaining / comm_energy } else { f64::INFINITY };
                        visit(&Candidate {
                            route,
                            h1,
                            h2: h2.h,
                            r_c2u,
                            r_u2b,
                            travel: tr,
                            tau_c2u,
                            tau_u2b: taus_u[ku],
                            comm_energy,
                            m_max,
                        });
                    }
                    if h2.detour <= 0.0 {
                        break;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Optimal plan for one instance with a fresh transmission-time cache.
pub fn plan_route(s: Point2, d: Point2, iot: Point2, tbs: Point2, params: &SystemParams) -> Result<TripPlan> {
    let times = TransmissionTimes::from_params(params);
    Planner::new(params, &times).plan(&Scenario { s, d, iot, tbs }, params.m_over_bw)
}

/// Deliver-the-package-first plan for one instance.
pub fn deliver_first_plan(s: Point2, d: Point2, iot: Point2, tbs: Point2, params: &SystemParams) -> Result<TripPlan> {
    let times = TransmissionTimes::from_params(params);
    Planner::new(params, &times).deliver_first(&Scenario { s, d, iot, tbs }, params.m_over_bw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_hover(a: Point2, b: Point2, c: Point2, d: f64, n: usize) -> f64 {
        (0..n)
            .map(|i| {
                let phi = TAU * i as f64 / n as f64;
                let h = Point2::new(c.x + d * phi.cos(), c.y + d * phi.sin());
                a.dist(h) + h.dist(b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn zero_radius_hovers_at_center() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(10.0, 0.0);
        let c = Point2::new(4.0, 3.0);
        let s = optimal_hover_point(a, b, c, 0.0);
        assert_eq!(s.h, c);
        assert!((s.path_len - (5.0 + 45f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn circle_crossing_segment_has_no_detour() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(10.0, 0.0);
        let s = optimal_hover_point(a, b, Point2::new(4.0, 0.0), 2.0);
        assert_eq!(s.detour, 0.0);
        assert!((s.h.x - 2.0).abs() < 1e-12 && s.h.y.abs() < 1e-12);
    }

    #[test]
    fn coincident_anchors_head_toward_anchor() {
        let a = Point2::new(0.0, 0.0);
        let s = optimal_hover_point(a, a, Point2::new(10.0, 0.0), 3.0);
        assert!((s.h.x - 7.0).abs() < 1e-12);
        assert!((s.path_len - 14.0).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let mut p = || Point2::new(rng.gen_range(-1000.0..1000.0), rng.gen_range(-1000.0..1000.0));
            let (a, b, c) = (p(), p(), p());
            let d = rng.gen_range(0.0..800.0);
            let s = optimal_hover_point(a, b, c, d);
            assert!(s.h.dist(c) <= d + 1e-6);
            assert!(s.detour >= -1e-9);
            if distance_to_segment(c, a, b) <= d {
                assert_eq!(s.detour, 0.0);
            }
            let brute = brute_hover(a, b, c, d, 200_000);
            assert!(s.path_len <= brute * (1.0 + 1e-6), "{} vs {brute}", s.path_len);
        }
    }

    fn scenario() -> Scenario {
        Scenario {
            s: Point2::new(0.0, 0.0),
            d: Point2::new(5000.0, 0.0),
            iot: Point2::new(2000.0, 1500.0),
            tbs: Point2::new(3500.0, -1000.0),
        }
    }

    #[test]
    fn zero_payload_is_pure_delivery() {
        let params = SystemParams::table_i();
        let times = TransmissionTimes::from_params(&params);
        let plan = Planner::new(&params, &times).plan(&scenario(), 0.0).unwrap();
        let p = &params.power;
        assert_eq!(plan.route, None);
        assert!((plan.t_total - (5000.0 / p.v_p + 5000.0 / p.v)).abs() < 1e-9);
        assert!((plan.e_total - (5000.0 / p.v_p * p.p_mp + 5000.0 / p.v * p.p_m)).abs() < 1e-6);
    }

    #[test]
    fn plans_respect_budget_and_request() {
        let params = SystemParams::table_i();
        let times = TransmissionTimes::from_params(&params);
        let planner = Planner::new(&params, &times);
        let ms = [500.0, 2000.0, 6000.0, 20000.0];
        let plans = planner.plan_many(&scenario(), &ms).unwrap();
        for (plan, m) in plans.iter().zip(ms) {
            assert!(plan.e_total <= params.b_max * (1.0 + 1e-12));
            assert!(plan.m_t_over_bw <= m);
            let legs = plan.legs.unwrap();
            let re = route_metrics(plan.route.unwrap(), &legs, &params.power).unwrap();
            assert_eq!(re.t_total, plan.t_total);
            assert_eq!(re.e_total, plan.e_total);
        }
        for w in plans.windows(2) {
            assert!(w[1].m_t_over_bw >= w[0].m_t_over_bw);
            assert!(w[1].t_total >= w[0].t_total - 1e-9);
        }
        let df = planner.deliver_first(&scenario(), 2000.0).unwrap();
        assert_eq!(df.route, Some(RouteKind::Route3));
        assert!((df.t_delivery - 5000.0 / params.power.v_p).abs() < 1e-9);
    }
}
