//! System-level averages over random deployments.
//!
//! Two ways of drawing an instance (S, D, IoT cluster, TBS):
//!
//! * the bound study samples the nearest-cluster and nearest-TBS distances
//!   from their analytic CDFs and puts the TBS where it lengthens the trip
//!   most, which upper-bounds time and energy;
//! * the direct study samples both point processes and picks the actual
//!   nearest qualifying cluster and nearest TBS.
//!
//! In both, S is at the origin and D at (L2, 0). Every trial owns an RNG
//! stream derived from (seed, trial index), so results do not depend on
//! scheduling.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{qualifying_cluster_density, threshold_radius, TransmissionTimes};
use crate::error::{Error, Result};
use crate::geometry::{
    buffer_area_numeric, distance_to_polyline, distance_to_segment, sample_ppp, PathGeometry, Point2, Window,
};
use crate::planner::{Planner, Scenario, TripPlan};
use crate::params::SystemParams;
use crate::quad::NeumaierSum;

/// Tabulated CDF with nondecreasing abscissae and values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() || xs.is_empty() {
            return Err(Error::invalid("cdf", "abscissae and values must be non-empty and of equal length"));
        }
        if xs.windows(2).any(|w| !(w[1] >= w[0])) || fs.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::invalid("cdf", "abscissae and values must be nondecreasing"));
        }
        if fs.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::invalid("cdf", "values must lie in [0, 1]"));
        }
        if *fs.last().unwrap() < 1.0 - 1e-6 {
            return Err(Error::invalid("cdf", "table must reach 1 - 1e-6"));
        }
        Ok(Self { xs, fs })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn fs(&self) -> &[f64] {
        &self.fs
    }

    /// Linear interpolation of the table at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|v| *v <= x);
        if i == 0 {
            return 0.0;
        }
        if i == self.xs.len() {
            return *self.fs.last().unwrap();
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (f0, f1) = (self.fs[i - 1], self.fs[i]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }
}

/// Generalized inverse of the linearly interpolated table.
pub fn inverse_cdf_sample(cdf: &EmpiricalCdf, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("uniform variate {u} outside [0, 1]")));
    }
    let i = cdf.fs.partition_point(|f| *f < u);
    if i == 0 {
        return Ok(cdf.xs[0]);
    }
    if i == cdf.fs.len() {
        return Ok(*cdf.xs.last().unwrap());
    }
    let (f0, f1) = (cdf.fs[i - 1], cdf.fs[i]);
    let (x0, x1) = (cdf.xs[i - 1], cdf.xs[i]);
    Ok(x0 + (x1 - x0) * (u - f0) / (f1 - f0))
}

const TABLE_POINTS: usize = 512;
const TABLE_DECADES: f64 = 4.0;
const TABLE_TAIL: f64 = 1e-6;

/// Tabulate the nearest-point distance CDF for `path` on 512 log-spaced
/// radii up to the 1 − 1e-6 quantile (plus r = 0).
pub fn tabulate_rb_cdf(path: &PathGeometry, lambda: f64, resolution: Option<f64>) -> Result<EmpiricalCdf> {
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda", "density must be positive"));
    }
    let target = -TABLE_TAIL.ln() / lambda;
    let area = |r: f64| buffer_area_numeric(path, r, resolution);
    // area >= pi r^2 bounds the quantile from above
    let mut hi = (target / std::f64::consts::PI).sqrt();
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if area(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-6 * hi {
            break;
        }
    }
    let r_max = hi;
    let mut xs = Vec::with_capacity(TABLE_POINTS + 1);
    let mut fs = Vec::with_capacity(TABLE_POINTS + 1);
    xs.push(0.0);
    fs.push(0.0);
    let mut running: f64 = 0.0;
    for i in 0..TABLE_POINTS {
        let e = -TABLE_DECADES * (1.0 - i as f64 / (TABLE_POINTS - 1) as f64);
        let r = if i + 1 == TABLE_POINTS { r_max } else { r_max * 10f64.powf(e) };
        running = running.max(-(-lambda * area(r)?).exp_m1());
        xs.push(r);
        fs.push(running);
    }
    EmpiricalCdf::new(xs, fs)
}

/// Distance from the path to the nearest point of a PPP of density
/// `lambda`, one value per realization. Points inside the hole are
/// discarded.
pub fn sample_nearest_distances(path: &PathGeometry, lambda: f64, realizations: usize, seed: u64) -> Result<Vec<f64>> {
    path.validate()?;
    let verts = path.vertices();
    let half = path.extent() + 10.0 / lambda.sqrt();
    let window = Window::centered(Point2::ORIGIN, half);
    (0..realizations)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let pts = sample_ppp(lambda, &window, &mut rng)?;
            Ok(pts
                .iter()
                .filter(|p| p.dist(verts[0]) >= path.r_hole)
                .map(|p| distance_to_polyline(*p, &verts))
                .fold(f64::INFINITY, f64::min))
        })
        .collect()
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StudyKind {
    Bound,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Best of all four routes.
    Optimal,
    /// Route 3 only.
    DeliverFirst,
}

/// Quantities shared by all trials of one study.
#[derive(Debug, Clone)]
pub struct StudyContext {
    pub l2: f64,
    /// Radius of the TBS-free disk around a qualifying cluster, m.
    pub r_t: f64,
    pub r_t_unattainable: bool,
    /// Density of qualifying clusters, per m².
    pub lambda_i_qualifying: f64,
    /// Nearest-qualifying-cluster distance to the S–D segment (bound study).
    pub iot_cdf: EmpiricalCdf,
}

impl StudyContext {
    pub fn new(params: &SystemParams, l2: f64) -> Result<Self> {
        let tr = threshold_radius(&params.links.i2b, params.r_c, params.c_t, &params.run.channel)?;
        let lambda_q = qualifying_cluster_density(params.lambda_i, params.lambda_t, tr.r_t);
        let line = PathGeometry::new(0.0, 0.0, l2, 0.0)?;
        Ok(Self {
            l2,
            r_t: tr.r_t,
            r_t_unattainable: tr.unattainable,
            lambda_i_qualifying: lambda_q,
            iot_cdf: tabulate_rb_cdf(&line, lambda_q, params.run.area_resolution)?,
        })
    }
}

/// Length of the shortest of the four tours through IoT and TBS with no
/// hover offsets.
fn tour_proxy(s: Point2, d: Point2, iot: Point2, tbs: Point2) -> f64 {
    let (si, it, td, ds) = (s.dist(iot), iot.dist(tbs), tbs.dist(d), d.dist(s));
    let (id, ts) = (iot.dist(d), tbs.dist(s));
    [si + it + td + ds, si + id + td + ts, ds + id + it + ts, 2.0 * si + ds + td + ts]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

const LEVEL_SAMPLES: usize = 96;

/// Point at distance `r_b` from the polyline iot→d→s that lengthens the
/// shortest tour the most, found by scanning the level curve.
pub fn worst_case_tbs(s: Point2, d: Point2, iot: Point2, r_b: f64, r_hole: f64) -> Point2 {
    let verts = [iot, d, s];
    let mut candidates: Vec<Point2> = Vec::with_capacity(5 * LEVEL_SAMPLES);
    for w in verts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ab = b.sub(a);
        let len = ab.norm();
        if len == 0.0 {
            continue;
        }
        let n = Point2::new(-ab.y / len, ab.x / len);
        for i in 0..=LEVEL_SAMPLES {
            let base = a.add(ab.scale(i as f64 / LEVEL_SAMPLES as f64));
            candidates.push(base.add(n.scale(r_b)));
            candidates.push(base.sub(n.scale(r_b)));
        }
    }
    for v in verts {
        for i in 0..LEVEL_SAMPLES {
            let phi = std::f64::consts::TAU * i as f64 / LEVEL_SAMPLES as f64;
            candidates.push(Point2::new(v.x + r_b * phi.cos(), v.y + r_b * phi.sin()));
        }
    }
    let tol = 1e-7 * (1.0 + r_b);
    candidates
        .into_iter()
        .filter(|p| distance_to_polyline(*p, &verts) >= r_b - tol && p.dist(iot) >= r_hole)
        .map(|p| (tour_proxy(s, d, iot, p), p))
        .fold((f64::NEG_INFINITY, Point2::new(d.x, d.y + r_b)), |acc, c| if c.0 > acc.0 { c } else { acc })
        .1
}

fn draw_bound_instance(params: &SystemParams, ctx: &StudyContext, rng: &mut ChaCha8Rng) -> Result<Scenario> {
    let l2 = ctx.l2;
    let s = Point2::ORIGIN;
    let d = Point2::new(l2, 0.0);
    let r_iot = inverse_cdf_sample(&ctx.iot_cdf, rng.gen::<f64>())?;
    let x = l2 * rng.gen::<f64>();
    let iot = Point2::new(x, r_iot);
    let l1 = iot.dist(d);
    let theta = if l1 > 0.0 { ((l2 - x) / l1).clamp(-1.0, 1.0).acos() } else { 0.0 };
    let path = PathGeometry::new(l1, theta, l2, ctx.r_t)?;
    let rb_cdf = tabulate_rb_cdf(&path, params.lambda_t, params.run.area_resolution)?;
    let r_b = inverse_cdf_sample(&rb_cdf, rng.gen::<f64>())?;
    let tbs = worst_case_tbs(s, d, iot, r_b, ctx.r_t);
    Ok(Scenario { s, d, iot, tbs })
}

/// Sample both point processes; `None` when no usable cluster or TBS lies
/// in the window even after enlarging it once.
fn draw_direct_instance(params: &SystemParams, ctx: &StudyContext, rng: &mut ChaCha8Rng) -> Result<Option<Scenario>> {
    let l2 = ctx.l2;
    let s = Point2::ORIGIN;
    let d = Point2::new(l2, 0.0);
    let center = Point2::new(0.5 * l2, 0.0);
    let margin = 5.0 / params.lambda_i.min(params.lambda_t).sqrt();
    for attempt in 0..2 {
        let half_iot = (0.5 * l2 + margin) * (1 + attempt) as f64;
        let half_tbs = half_iot + margin + ctx.r_t;
        let tbs_pts = sample_ppp(params.lambda_t, &Window::centered(center, half_tbs), rng)?;
        let iot_pts = sample_ppp(params.lambda_i, &Window::centered(center, half_iot), rng)?;
        let qualifying = iot_pts
            .into_iter()
            .filter(|c| tbs_pts.iter().all(|t| t.dist(*c) > ctx.r_t));
        let nearest_iot = qualifying
            .map(|c| (distance_to_segment(c, s, d), c))
            .fold(None, |acc: Option<(f64, Point2)>, c| match acc {
                Some(a) if a.0 <= c.0 => Some(a),
                _ => Some(c),
            });
        let Some((d_iot, iot)) = nearest_iot else { continue };
        // the nearest cluster is only trustworthy if its distance ball fits the window
        if d_iot > half_iot - 0.5 * l2 {
            continue;
        }
        let verts = [iot, d, s];
        let nearest_tbs = tbs_pts
            .iter()
            .filter(|t| t.dist(iot) > ctx.r_t)
            .map(|t| (distance_to_polyline(*t, &verts), *t))
            .fold(None, |acc: Option<(f64, Point2)>, c| match acc {
                Some(a) if a.0 <= c.0 => Some(a),
                _ => Some(c),
            });
        let Some((d_tbs, tbs)) = nearest_tbs else { continue };
        let reach = iot.sub(center).x.abs().max(iot.sub(center).y.abs()).max(0.5 * l2);
        if d_tbs > half_tbs - reach {
            continue;
        }
        return Ok(Some(Scenario { s, d, iot, tbs }));
    }
    Ok(None)
}

/// Draw `trials` instances; `None` marks skipped trials.
pub fn draw_instances(kind: StudyKind, params: &SystemParams, ctx: &StudyContext, trials: u64, seed: u64) -> Result<Vec<Option<Scenario>>> {
    if trials < 1 {
        return Err(Error::invalid("run.trials", "must be at least 1"));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            match kind {
                StudyKind::Bound => draw_bound_instance(params, ctx, &mut rng).map(Some),
                StudyKind::Direct => draw_direct_instance(params, ctx, &mut rng),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlanOutcome {
    Planned(TripPlan),
    /// Even the bare delivery trip exceeds the battery.
    Infeasible,
    /// No instance could be drawn.
    Skipped,
}

/// Plan every instance for every payload in `ms`. Result is indexed
/// `[trial][payload]`.
pub fn plan_instances(
    params: &SystemParams,
    times: &TransmissionTimes,
    instances: &[Option<Scenario>],
    ms: &[f64],
    method: Method,
) -> Result<Vec<Vec<PlanOutcome>>> {
    let planner = Planner::new(params, times);
    instances
        .par_iter()
        .map(|inst| {
            let Some(sc) = inst else {
                return Ok(vec![PlanOutcome::Skipped; ms.len()]);
            };
            let plans = match method {
                Method::Optimal => planner.plan_many(sc, ms),
                Method::DeliverFirst => planner.deliver_first_many(sc, ms),
            };
            match plans {
                Ok(p) => Ok(p.into_iter().map(PlanOutcome::Planned).collect()),
                Err(Error::Infeasible { .. }) => Ok(vec![PlanOutcome::Infeasible; ms.len()]),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std_err: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std_err: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        let mean = values.iter().copied().collect::<NeumaierSum>().value() / n as f64;
        let ss = values.iter().map(|v| (v - mean) * (v - mean)).collect::<NeumaierSum>().value();
        let std_err = if n > 1 { (ss / (n - 1) as f64 / n as f64).sqrt() } else { 0.0 };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // rounding can push the mean of identical values a hair outside
        Self {
            mean: mean.clamp(min, max),
            std_err,
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

pub const HISTOGRAM_BINS: usize = 20;

impl Histogram {
    /// Equal-width bins spanning the sample range.
    pub fn of(values: &[f64], bins: usize) -> Self {
        if values.is_empty() || bins == 0 {
            return Self::default();
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            hi = lo + lo.abs().max(1.0) * 1e-9;
        }
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }).collect();
        let mut counts = vec![0u64; bins];
        for v in values {
            let i = (((v - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { edges, counts }
    }

    /// Two occupied bins separated by at least one empty bin.
    pub fn has_empty_valley(&self) -> bool {
        let occupied: Vec<usize> = self.counts.iter().enumerate().filter(|(_, c)| **c > 0).map(|(i, _)| i).collect();
        occupied.windows(2).any(|w| w[1] > w[0] + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub l2: f64,
    pub m_over_bw: f64,
    pub trials: u64,
    pub seed: u64,
    /// Trials that produced a plan.
    pub completed: u64,
    pub infeasible: u64,
    pub skipped: u64,
    pub t_total: Summary,
    pub e_total: Summary,
    pub m_t_over_bw: Summary,
    pub t_delivery: Summary,
    /// Delivery-time inflation caused by the data task.
    pub xi: Summary,
    /// Fraction of completed trials that moved all the data.
    pub full_delivery_fraction: f64,
    pub t_delivery_histogram: Histogram,
    pub xi_histogram: Histogram,
}

/// Aggregate column `m_index` of planned outcomes.
pub fn aggregate(outcomes: &[Vec<PlanOutcome>], m_index: usize, m_over_bw: f64, l2: f64, params: &SystemParams, seed: u64) -> AggregateMetrics {
    let t_nodata = l2 / params.power.v_p;
    let mut plans = Vec::new();
    let (mut infeasible, mut skipped) = (0u64, 0u64);
    for row in outcomes {
        match row[m_index] {
            PlanOutcome::Planned(p) => plans.push(p),
            PlanOutcome::Infeasible => infeasible += 1,
            PlanOutcome::Skipped => skipped += 1,
        }
    }
    let col = |f: fn(&TripPlan) -> f64| plans.iter().map(f).collect::<Vec<f64>>();
    let t_delivery = col(|p| p.t_delivery);
    let xi: Vec<f64> = t_delivery.iter().map(|t| t / t_nodata).collect();
    let full = plans.iter().filter(|p| p.feasible_full_delivery).count();
    AggregateMetrics {
        l2,
        m_over_bw,
        trials: outcomes.len() as u64,
        seed,
        completed: plans.len() as u64,
        infeasible,
        skipped,
        t_total: Summary::of(&col(|p| p.t_total)),
        e_total: Summary::of(&col(|p| p.e_total)),
        m_t_over_bw: Summary::of(&col(|p| p.m_t_over_bw)),
        t_delivery: Summary::of(&t_delivery),
        xi: Summary::of(&xi),
        full_delivery_fraction: if plans.is_empty() { f64::NAN } else { full as f64 / plans.len() as f64 },
        t_delivery_histogram: Histogram::of(&t_delivery, HISTOGRAM_BINS),
        xi_histogram: Histogram::of(&xi, HISTOGRAM_BINS),
    }
}

/// Draw, plan and aggregate one study for every payload in `ms`, with
/// common instances across payloads.
pub fn run_study(kind: StudyKind, params: &SystemParams, l2: f64, ms: &[f64], trials: u64, seed: u64, method: Method) -> Result<Vec<AggregateMetrics>> {
    let ctx = StudyContext::new(params, l2)?;
    let mut scoped = *params;
    scoped.l2 = l2;
    let instances = draw_instances(kind, &scoped, &ctx, trials, seed)?;
    let times = TransmissionTimes::from_params(params);
    let outcomes = plan_instances(&scoped, &times, &instances, ms, method)?;
    Ok(ms
        .iter()
        .enumerate()
        .map(|(i, &m)| aggregate(&outcomes, i, m, l2, params, seed))
        .collect())
}

/// Averages with analytic distance sampling and worst-case TBS placement.
pub fn run_bound_study(params: &SystemParams, l2: f64, ms: &[f64], trials: u64, seed: u64) -> Result<Vec<AggregateMetrics>> {
    run_study(StudyKind::Bound, params, l2, ms, trials, seed, Method::Optimal)
}

/// Averages over sampled point-process deployments.
pub fn run_direct_study(params: &SystemParams, l2: f64, ms: &[f64], trials: u64, seed: u64) -> Result<Vec<AggregateMetrics>> {
    run_study(StudyKind::Direct, params, l2, ms, trials, seed, Method::Optimal)
}

/// Optimal routing against deliver-first on common instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    pub m_over_bw: f64,
    pub optimal: AggregateMetrics,
    pub deliver_first: AggregateMetrics,
    /// Instances planned by both methods.
    pub paired: u64,
    /// Share of paired instances where the optimal plan moves at least as much data.
    pub data_dominance: f64,
    /// Instances where both methods move all the data.
    pub both_full: u64,
    /// Share of `both_full` instances where the optimal plan is no slower.
    pub time_dominance: f64,
}

const DOMINANCE_TOL: f64 = 1e-9;

pub fn compare_methods(kind: StudyKind, params: &SystemParams, l2: f64, ms: &[f64], trials: u64, seed: u64) -> Result<Vec<MethodComparison>> {
    let ctx = StudyContext::new(params, l2)?;
    let mut scoped = *params;
    scoped.l2 = l2;
    let instances = draw_instances(kind, &scoped, &ctx, trials, seed)?;
    let times = TransmissionTimes::from_params(params);
    let opt = plan_instances(&scoped, &times, &instances, ms, Method::Optimal)?;
    let df = plan_instances(&scoped, &times, &instances, ms, Method::DeliverFirst)?;
    Ok(ms
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let (mut paired, mut data_ok, mut both_full, mut time_ok) = (0u64, 0u64, 0u64, 0u64);
            for (a, b) in opt.iter().zip(&df) {
                if let (PlanOutcome::Planned(a), PlanOutcome::Planned(b)) = (a[i], b[i]) {
                    paired += 1;
                    if a.m_t_over_bw >= b.m_t_over_bw * (1.0 - DOMINANCE_TOL) {
                        data_ok += 1;
                    }
                    if a.feasible_full_delivery && b.feasible_full_delivery {
                        both_full += 1;
                        if a.t_total <= b.t_total * (1.0 + DOMINANCE_TOL) {
                            time_ok += 1;
                        }
                    }
                }
            }
            let share = |k: u64, n: u64| if n == 0 { f64::NAN } else { k as f64 / n as f64 };
            MethodComparison {
                m_over_bw: m,
                optimal: aggregate(&opt, i, m, l2, params, seed),
                deliver_first: aggregate(&df, i, m, l2, params, seed),
                paired,
                data_dominance: share(data_ok, paired),
                both_full,
                time_dominance: share(time_ok, both_full),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> EmpiricalCdf {
        EmpiricalCdf::new(vec![0.0, 1.0, 2.0, 4.0], vec![0.0, 0.5, 0.5, 1.0]).unwrap()
    }

    #[test]
    fn cdf_validation() {
        assert!(EmpiricalCdf::new(vec![0.0, 1.0], vec![0.0, 0.9]).is_err());
        assert!(EmpiricalCdf::new(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(EmpiricalCdf::new(vec![0.0, 1.0], vec![0.5, 0.2]).is_err());
    }

    #[test]
    fn inverse_sampling_contract() {
        let c = table();
        assert_eq!(inverse_cdf_sample(&c, 0.0).unwrap(), 0.0);
        assert_eq!(inverse_cdf_sample(&c, 0.25).unwrap(), 0.5);
        assert_eq!(inverse_cdf_sample(&c, 0.5).unwrap(), 1.0);
        assert_eq!(inverse_cdf_sample(&c, 0.75).unwrap(), 3.0);
        assert!(inverse_cdf_sample(&c, 1.5).is_err());
        let mut prev = 0.0;
        for k in 0..=1000 {
            let x = inverse_cdf_sample(&c, k as f64 / 1000.0).unwrap();
            assert!(x >= prev);
            prev = x;
        }
    }

    #[test]
    fn tabulated_rb_cdf_is_valid() {
        let path = PathGeometry::new(500.0, 1.0, 1000.0, 0.0).unwrap();
        let c = tabulate_rb_cdf(&path, 1e-6, None).unwrap();
        assert_eq!(c.xs().len(), TABLE_POINTS + 1);
        assert!(*c.fs().last().unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn summaries_and_histograms() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std_err - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        let h = Histogram::of(&[0.0, 0.1, 0.2, 5.0, 5.1], 10);
        assert_eq!(h.counts.iter().sum::<u64>(), 5);
        assert!(h.has_empty_valley());
        assert!(!Histogram::of(&[1.0, 1.0, 1.0], 4).has_empty_valley());
    }

    #[test]
    fn worst_case_tbs_is_on_level_curve() {
        let s = Point2::ORIGIN;
        let d = Point2::new(5000.0, 0.0);
        let iot = Point2::new(2000.0, 800.0);
        let t = worst_case_tbs(s, d, iot, 600.0, 0.0);
        assert!((distance_to_polyline(t, &[iot, d, s]) - 600.0).abs() < 1e-6);
    }
}
