//! Air-to-ground and ground link statistics.
//!
//! Aerial links mix a line-of-sight and a non-line-of-sight state whose
//! probabilities follow the elevation-angle model; each state has
//! Nakagami-m fading (Gamma-distributed power gain with unit mean). The
//! ground link is Rayleigh. All SNR statistics are computed from the
//! coverage CCDF, which is the primary object: the SNR density is its
//! numerical derivative and the rate/time expectations are written as
//! integrals of the CCDF (or CDF) against the derivative of the rate
//! function.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pdf_device_distance, DiskOffsetLaw};
use crate::quad::{bisect, gamma_p_int, gamma_q_int, gl16, integrate, QuadSettings};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LinkKind {
    /// LoS/NLoS mixture with elevation-angle environment constants.
    Aerial { a: f64, b: f64 },
    /// Rayleigh fading with a single path-loss exponent.
    Ground { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    /// Transmit power, W.
    pub rho_tx: f64,
    pub eta_l: f64,
    pub eta_n: f64,
    pub alpha_l: f64,
    pub alpha_n: f64,
    pub m_l: u32,
    pub m_n: u32,
    /// Altitude of the aerial end, m (0 for the ground link).
    pub h: f64,
    /// Noise power, W.
    pub sigma2: f64,
    pub kind: LinkKind,
}

impl LinkSpec {
    pub fn validate(&self, name: &str) -> Result<()> {
        let field = |f: &str| format!("{name}.{f}");
        positive(&field("rho_tx"), self.rho_tx)?;
        positive(&field("sigma2"), self.sigma2)?;
        match self.kind {
            LinkKind::Aerial { a, b } => {
                positive(&field("eta_l"), self.eta_l)?;
                positive(&field("eta_n"), self.eta_n)?;
                if !(self.alpha_l >= 2.0) {
                    return Err(Error::invalid(&field("alpha_l"), "must be at least 2"));
                }
                if !(self.alpha_n > 2.0) {
                    return Err(Error::invalid(&field("alpha_n"), "must exceed 2"));
                }
                if self.m_l < 1 || self.m_n < 1 {
                    return Err(Error::invalid(&field("m"), "fading shapes must be integers >= 1"));
                }
                positive(&field("h"), self.h)?;
                positive(&field("a"), a)?;
                positive(&field("b"), b)?;
            }
            LinkKind::Ground { alpha } => {
                if !(alpha > 2.0) {
                    return Err(Error::invalid(&field("alpha_ground"), "must exceed 2"));
                }
            }
        }
        Ok(())
    }

    /// Same link with transmit and noise power scaled together.
    pub fn with_power_scale(mut self, factor: f64) -> Self {
        self.rho_tx *= factor;
        self.sigma2 *= factor;
        self
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be strictly positive, got {v}")))
    }
}

/// Horizontal distance law between the serving end and the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DistanceLaw {
    Fixed(f64),
    DiskOffset(DiskOffsetLaw),
}

/// LoS probability at horizontal distance `r_horiz`.
pub fn los_probability(link: &LinkSpec, r_horiz: f64) -> Result<f64> {
    match link.kind {
        LinkKind::Aerial { a, b } => {
            if !(r_horiz >= 0.0) {
                return Err(Error::Domain(format!("negative horizontal distance {r_horiz}")));
            }
            Ok(los_from_elevation(a, b, link.h, r_horiz))
        }
        LinkKind::Ground { .. } => Err(Error::Domain("LoS probability is undefined for the ground link".into())),
    }
}

fn los_from_elevation(a: f64, b: f64, h: f64, r_horiz: f64) -> f64 {
    let elevation_deg = if r_horiz == 0.0 {
        90.0
    } else {
        (h / r_horiz).atan().to_degrees()
    };
    1.0 / (1.0 + a * (-b * (elevation_deg - a)).exp())
}

/// One distance atom of a discretized distance law, with the per-state
/// SNR scale factors precomputed.
#[derive(Debug, Clone, Copy)]
struct Atom {
    weight: f64,
    p_los: f64,
    /// Mean SNR in the LoS state (or the only state for ground links).
    mean_l: f64,
    mean_n: f64,
}

/// SNR distribution of a link under a distance law, as a finite mixture of
/// Gamma-distributed components.
#[derive(Debug, Clone)]
pub struct SnrDistribution {
    atoms: Vec<Atom>,
    m_l: u32,
    m_n: u32,
    ground: bool,
}

const DISK_PANELS: usize = 16;
const INNER_PANELS: usize = 8;

/// Quadrature atoms `(r, weight)` for the device-distance law, normalized
/// so the weights sum to one. The arccos-shaped parts are integrated with a
/// cosine substitution, which removes the square-root endpoint behaviour.
pub(crate) fn disk_atoms(law: &DiskOffsetLaw) -> Vec<(f64, f64)> {
    let (nodes, weights) = gl16();
    let rc = law.r_c;
    let center = law.r_center;
    if rc == 0.0 {
        return vec![(center, 1.0)];
    }
    let mut atoms = Vec::with_capacity((DISK_PANELS + INNER_PANELS) * 16);
    let push_cos_panelled = |atoms: &mut Vec<(f64, f64)>, lo: f64, hi: f64| {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        if half <= 0.0 {
            return;
        }
        let du = PI / DISK_PANELS as f64;
        for p in 0..DISK_PANELS {
            let u0 = p as f64 * du;
            for (x, w) in nodes.iter().zip(weights) {
                let u = u0 + 0.5 * du * (x + 1.0);
                let r = mid - half * u.cos();
                let jac = half * u.sin() * 0.5 * du;
                let f = pdf_device_distance(law, r);
                if f > 0.0 {
                    atoms.push((r, w * jac * f));
                }
            }
        }
    };
    if center > rc {
        push_cos_panelled(&mut atoms, center - rc, center + rc);
    } else {
        let inner = rc - center;
        let dr = inner / INNER_PANELS as f64;
        for p in 0..INNER_PANELS {
            let r0 = p as f64 * dr;
            for (x, w) in nodes.iter().zip(weights) {
                let r = r0 + 0.5 * dr * (x + 1.0);
                atoms.push((r, w * 0.5 * dr * 2.0 * r / (rc * rc)));
            }
        }
        push_cos_panelled(&mut atoms, inner, rc + center);
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    for a in &mut atoms {
        a.1 /= total;
    }
    atoms
}

impl SnrDistribution {
    pub fn new(link: &LinkSpec, law: &DistanceLaw) -> Result<Self> {
        let points: Vec<(f64, f64)> = match law {
            DistanceLaw::Fixed(r) => {
                if !(*r >= 0.0) {
                    return Err(Error::Domain(format!("negative link distance {r}")));
                }
                vec![(*r, 1.0)]
            }
            DistanceLaw::DiskOffset(d) => {
                d.validate()?;
                disk_atoms(d)
            }
        };
        let atoms = points
            .into_iter()
            .map(|(r, weight)| match link.kind {
                LinkKind::Aerial { a, b } => {
                    let d2 = r * r + link.h * link.h;
                    Atom {
                        weight,
                        p_los: los_from_elevation(a, b, link.h, r),
                        mean_l: link.eta_l * link.rho_tx * d2.powf(-0.5 * link.alpha_l) / link.sigma2,
                        mean_n: link.eta_n * link.rho_tx * d2.powf(-0.5 * link.alpha_n) / link.sigma2,
                    }
                }
                LinkKind::Ground { alpha } => Atom {
                    weight,
                    p_los: 1.0,
                    mean_l: link.rho_tx * r.powf(-alpha) / link.sigma2,
                    mean_n: 0.0,
                },
            })
            .collect();
        Ok(Self {
            atoms,
            m_l: link.m_l,
            m_n: link.m_n,
            ground: matches!(link.kind, LinkKind::Ground { .. }),
        })
    }

    /// P(SNR > gamma).
    pub fn ccdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 1.0;
        }
        let mut acc = 0.0;
        for a in &self.atoms {
            let v = if self.ground {
                component_ccdf(1, a.mean_l, gamma)
            } else {
                a.p_los * component_ccdf(self.m_l, a.mean_l, gamma)
                    + (1.0 - a.p_los) * component_ccdf(self.m_n, a.mean_n, gamma)
            };
            acc += a.weight * v;
        }
        acc.clamp(0.0, 1.0)
    }

    /// P(SNR <= gamma), evaluated directly for precision in the lower tail.
    pub fn cdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for a in &self.atoms {
            let v = if self.ground {
                component_cdf(1, a.mean_l, gamma)
            } else {
                a.p_los * component_cdf(self.m_l, a.mean_l, gamma)
                    + (1.0 - a.p_los) * component_cdf(self.m_n, a.mean_n, gamma)
            };
            acc += a.weight * v;
        }
        acc.clamp(0.0, 1.0)
    }

    /// Smallest gamma (searched on a doubling grid) with CCDF below `eps`.
    pub fn upper_limit(&self, eps: f64) -> f64 {
        let max_mean = self
            .atoms
            .iter()
            .map(|a| a.mean_l.max(a.mean_n))
            .fold(0.0_f64, f64::max)
            .max(1e-12);
        let mut g = max_mean;
        while self.ccdf(g) >= eps && g < 1e300 {
            g *= 2.0;
        }
        g
    }

    /// Density of SNR by central differences on the CCDF (or CDF, whichever
    /// is smaller and therefore better conditioned) with relative step 1e-4.
    pub fn pdf(&self, gamma: f64) -> Result<f64> {
        if !(gamma > 0.0) {
            return Err(Error::StepUnderflow(gamma));
        }
        let h = 1e-4 * gamma;
        if !(h > 0.0) || gamma - h == gamma || gamma + h == gamma {
            return Err(Error::StepUnderflow(gamma));
        }
        let use_cdf = self.cdf(gamma) < 0.5;
        let d = if use_cdf {
            self.cdf(gamma + h) - self.cdf(gamma - h)
        } else {
            self.ccdf(gamma - h) - self.ccdf(gamma + h)
        };
        Ok(d / (2.0 * h))
    }
}

fn component_ccdf(m: u32, mean: f64, gamma: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    // g = sigma^2 r^alpha / (rho eta) = 1 / mean, tail argument m g gamma
    gamma_q_int(m, m as f64 * gamma / mean)
}

fn component_cdf(m: u32, mean: f64, gamma: f64) -> f64 {
    if mean <= 0.0 {
        return 1.0;
    }
    gamma_p_int(m, m as f64 * gamma / mean)
}

/// Numerical settings for the channel integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSettings {
    /// SNR floor: fading states below it are served at the floor rate.
    /// Zero disables the floor.
    pub snr_floor: f64,
    /// Per-unit transmission times above this cap flag the link as unusable.
    pub tau_cap: f64,
    pub prob_tol: f64,
    pub rate_tol: f64,
}

impl Default for ChannelSettings {
    fn default() -> Self {
        Self {
            snr_floor: 1e-3,
            tau_cap: 1e4,
            prob_tol: 1e-6,
            rate_tol: 1e-4,
        }
    }
}

/// P(SNR > gamma).
pub fn coverage_ccdf(link: &LinkSpec, law: &DistanceLaw, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("negative SNR threshold {gamma}")));
    }
    Ok(SnrDistribution::new(link, law)?.ccdf(gamma))
}

/// SNR density, the negative derivative of [`coverage_ccdf`].
pub fn snr_pdf(link: &LinkSpec, law: &DistanceLaw, gamma: f64) -> Result<f64> {
    SnrDistribution::new(link, law)?.pdf(gamma)
}

const LOWEST_LOG_GAMMA: f64 = -69.0; // ~1e-30

/// Expected spectral efficiency E[log2(1 + SNR)], bit/s/Hz.
pub fn expected_rate(link: &LinkSpec, law: &DistanceLaw, settings: &ChannelSettings) -> Result<f64> {
    let dist = SnrDistribution::new(link, law)?;
    expected_rate_of(&dist, settings)
}

fn expected_rate_of(dist: &SnrDistribution, settings: &ChannelSettings) -> Result<f64> {
    // E[log2(1+S)] = int_0^inf ccdf(g) / ((1+g) ln 2) dg, integrated in t = ln g
    let hi = dist.upper_limit(1e-12).ln();
    let q = QuadSettings::new(settings.rate_tol * 1e-2, 1e-8);
    let body = integrate(
        |t| {
            let g = t.exp();
            dist.ccdf(g) * g / ((1.0 + g) * LN_2)
        },
        LOWEST_LOG_GAMMA,
        hi,
        &q,
    );
    let head = LOWEST_LOG_GAMMA.exp() / LN_2;
    Ok(body.checked(&q)? + head)
}

/// Outcome of a per-unit transmission time evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionTime {
    /// Seconds per bit/Hz.
    pub tau: f64,
    /// Set when tau exceeds the configured cap.
    pub diverged: bool,
}

/// Per-unit transmission time tau = E[1 / log2(1 + max(SNR, floor))].
///
/// Written as the integral of the SNR CDF against |d/dg 1/log2(1+g)| from
/// the floor upward, plus the exact tail term above the point where the
/// CCDF is negligible.
pub fn per_unit_transmission_time(
    link: &LinkSpec,
    law: &DistanceLaw,
    settings: &ChannelSettings,
) -> Result<TransmissionTime> {
    let dist = SnrDistribution::new(link, law)?;
    transmission_time_of(&dist, settings)
}

fn inv_rate(g: f64) -> f64 {
    LN_2 / g.ln_1p()
}

fn transmission_time_of(dist: &SnrDistribution, settings: &ChannelSettings) -> Result<TransmissionTime> {
    let lo = if settings.snr_floor > 0.0 {
        settings.snr_floor.ln()
    } else {
        LOWEST_LOG_GAMMA
    };
    let top = dist.upper_limit(1e-12).max(settings.snr_floor * 2.0);
    let hi = top.ln();
    let q = QuadSettings::new(settings.prob_tol * 1e-3, 1e-9);
    let body = integrate(
        |t| {
            let g = t.exp();
            let l = g.ln_1p();
            let slope = LN_2 / ((1.0 + g) * l * l);
            slope * dist.cdf(g) * g
        },
        lo,
        hi,
        &q,
    );
    let tau = body.checked(&q)? + inv_rate(top);
    Ok(TransmissionTime {
        tau,
        diverged: !(tau <= settings.tau_cap),
    })
}

/// Root r_t of E[rate](R_center = x) = c_t for the ground link with a disk
/// of devices of radius `r_c` around the cluster center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRadius {
    pub r_t: f64,
    /// Set when the rate never crosses c_t inside the bracket; `r_t` is
    /// then the bracket end on the side where the threshold is missed.
    pub unattainable: bool,
    pub rate_at_lo: f64,
    pub rate_at_hi: f64,
}

pub const THRESHOLD_BRACKET: (f64, f64) = (1.0, 50_000.0);

pub fn threshold_radius(
    ground: &LinkSpec,
    r_c: f64,
    c_t: f64,
    settings: &ChannelSettings,
) -> Result<ThresholdRadius> {
    if !matches!(ground.kind, LinkKind::Ground { .. }) {
        return Err(Error::Domain("threshold radius needs the ground link".into()));
    }
    if !(c_t > 0.0) {
        return Err(Error::invalid("c_t", "rate threshold must be positive"));
    }
    let rate = |x: f64| -> Result<f64> {
        expected_rate(
            ground,
            &DistanceLaw::DiskOffset(DiskOffsetLaw { r_center: x, r_c }),
            settings,
        )
    };
    let (lo, hi) = THRESHOLD_BRACKET;
    let rate_lo = rate(lo)?;
    let rate_hi = rate(hi)?;
    if rate_hi >= c_t {
        return Ok(ThresholdRadius {
            r_t: hi,
            unattainable: true,
            rate_at_lo: rate_lo,
            rate_at_hi: rate_hi,
        });
    }
    if rate_lo <= c_t {
        return Ok(ThresholdRadius {
            r_t: lo,
            unattainable: true,
            rate_at_lo: rate_lo,
            rate_at_hi: rate_hi,
        });
    }
    let r_t = bisect(|x| Ok(rate(x)? - c_t), lo, hi, 1e-6)?;
    Ok(ThresholdRadius {
        r_t,
        unattainable: false,
        rate_at_lo: rate_lo,
        rate_at_hi: rate_hi,
    })
}

/// Density of IoT clusters without a TBS inside the threshold radius.
pub fn qualifying_cluster_density(lambda_i: f64, lambda_t: f64, r_t: f64) -> f64 {
    lambda_i * (-PI * lambda_t * r_t * r_t).exp()
}

/// Memoized per-unit transmission times for the two UAV links, keyed by
/// the serving distance. The cluster-to-UAV link averages over the device
/// disk; the UAV-to-TBS link uses the fixed hover distance.
#[derive(Debug)]
pub struct TransmissionTimes {
    i2u: LinkSpec,
    u2b: LinkSpec,
    r_c: f64,
    settings: ChannelSettings,
    c2u_cache: Mutex<HashMap<u64, f64>>,
    u2b_cache: Mutex<HashMap<u64, f64>>,
}

impl TransmissionTimes {
    pub fn new(i2u: LinkSpec, u2b: LinkSpec, r_c: f64, settings: ChannelSettings) -> Self {
        Self {
            i2u,
            u2b,
            r_c,
            settings,
            c2u_cache: Mutex::new(HashMap::new()),
            u2b_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn from_params(params: &crate::params::SystemParams) -> Self {
        Self::new(
            params.links.i2u,
            params.links.u2b,
            params.r_c,
            params.run.channel,
        )
    }

    /// Seconds per bit/Hz collecting from a cluster whose center is at
    /// horizontal distance `r_c2u`.
    pub fn tau_c2u(&self, r_c2u: f64) -> f64 {
        let key = r_c2u.to_bits();
        if let Some(v) = self.c2u_cache.lock().unwrap().get(&key) {
            return *v;
        }
        let law = DistanceLaw::DiskOffset(DiskOffsetLaw {
            r_center: r_c2u,
            r_c: self.r_c,
        });
        let v = self.evaluate(&self.i2u, &law);
        self.c2u_cache.lock().unwrap().insert(key, v);
        v
    }

    /// Seconds per bit/Hz forwarding to a TBS at horizontal distance `r_u2b`.
    pub fn tau_u2b(&self, r_u2b: f64) -> f64 {
        let key = r_u2b.to_bits();
        if let Some(v) = self.u2b_cache.lock().unwrap().get(&key) {
            return *v;
        }
        let v = self.evaluate(&self.u2b, &DistanceLaw::Fixed(r_u2b));
        self.u2b_cache.lock().unwrap().insert(key, v);
        v
    }

    fn evaluate(&self, link: &LinkSpec, law: &DistanceLaw) -> f64 {
        match per_unit_transmission_time(link, law, &self.settings) {
            Ok(t) if !t.diverged => t.tau,
            _ => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;

    fn table() -> SystemParams {
        SystemParams::table_i()
    }

    #[test]
    fn los_probability_reference_values() {
        let p = table();
        let u2b = p.links.u2b;
        let near = los_probability(&u2b, 100.0).unwrap();
        // direct evaluation: 1 / (1 + 4.9 exp(-0.43 (45 - 4.9)))
        let expected = 1.0 / (1.0 + 4.9 * (-0.43f64 * (45.0 - 4.9)).exp());
        assert!((near - expected).abs() < 1e-15);
        assert!((near - 0.9999998).abs() < 1e-7);
        let far = los_probability(&u2b, 1e12).unwrap();
        assert!((far - 1.0 / (1.0 + 4.9 * (0.43f64 * 4.9).exp())).abs() < 1e-9);
        assert!((far - 0.0242).abs() < 1e-4);
        assert_eq!(los_probability(&u2b, 0.0).unwrap(), 1.0 / (1.0 + 4.9 * (-0.43f64 * 85.1).exp()));
        assert!(los_probability(&p.links.i2b, 10.0).is_err());
    }

    #[test]
    fn ccdf_is_one_at_zero_threshold() {
        let p = table();
        for law in [
            DistanceLaw::Fixed(500.0),
            DistanceLaw::DiskOffset(DiskOffsetLaw { r_center: 200.0, r_c: 50.0 }),
            DistanceLaw::DiskOffset(DiskOffsetLaw { r_center: 20.0, r_c: 50.0 }),
        ] {
            for link in [p.links.i2u, p.links.u2b, p.links.i2b] {
                let c = coverage_ccdf(&link, &law, 1e-300).unwrap();
                assert!((c - 1.0).abs() < 1e-9, "{c}");
            }
        }
    }

    #[test]
    fn ground_fixed_law_is_rayleigh() {
        let p = table();
        let g = p.links.i2b;
        for &(r, gamma) in &[(10.0, 0.5), (20.0, 1.0), (15.0, 3.0)] {
            let c = coverage_ccdf(&g, &DistanceLaw::Fixed(r), gamma).unwrap();
            let exact = (-gamma * g.sigma2 * f64::powf(r, 4.0) / g.rho_tx).exp();
            assert!((c - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn ccdf_nonincreasing_in_threshold() {
        let p = table();
        let law = DistanceLaw::DiskOffset(DiskOffsetLaw { r_center: 80.0, r_c: 50.0 });
        let d = SnrDistribution::new(&p.links.i2u, &law).unwrap();
        let mut prev = 1.0;
        for k in -40..40 {
            let c = d.ccdf(10f64.powf(k as f64 * 0.25));
            assert!(c <= prev + 1e-15);
            prev = c;
        }
    }

    #[test]
    fn disk_law_reduces_to_fixed_as_radius_vanishes() {
        let p = table();
        let g = p.links.i2b;
        for &gamma in &[0.1, 1.0, 10.0] {
            let disk = coverage_ccdf(
                &g,
                &DistanceLaw::DiskOffset(DiskOffsetLaw { r_center: 12.0, r_c: 0.1 }),
                gamma,
            )
            .unwrap();
            let fixed = coverage_ccdf(&g, &DistanceLaw::Fixed(12.0), gamma).unwrap();
            assert!((disk - fixed).abs() < 1e-3);
        }
    }

    #[test]
    fn scale_invariance() {
        let p = table();
        let s = ChannelSettings::default();
        let law = DistanceLaw::DiskOffset(DiskOffsetLaw { r_center: 60.0, r_c: 50.0 });
        let link = p.links.i2u;
        let scaled = link.with_power_scale(7.5);
        assert!((coverage_ccdf(&link, &law, 2.0).unwrap() - coverage_ccdf(&scaled, &law, 2.0).unwrap()).abs() < 1e-9);
        assert!((snr_pdf(&link, &law, 2.0).unwrap() - snr_pdf(&scaled, &law, 2.0).unwrap()).abs() < 1e-9);
        let t0 = per_unit_transmission_time(&link, &law, &s).unwrap().tau;
        let t1 = per_unit_transmission_time(&scaled, &law, &s).unwrap().tau;
        assert!((t0 - t1).abs() < 1e-9);
        let r0 = expected_rate(&link, &law, &s).unwrap();
        let r1 = expected_rate(&scaled, &law, &s).unwrap();
        assert!((r0 - r1).abs() < 1e-9);
    }

    #[test]
    fn pdf_integrates_to_one_and_is_nonnegative() {
        let p = table();
        for (link, law) in [
            (p.links.u2b, DistanceLaw::Fixed(500.0)),
            (p.links.i2u, DistanceLaw::DiskOffset(DiskOffsetLaw { r_center: 100.0, r_c: 50.0 })),
        ] {
            let d = SnrDistribution::new(&link, &law).unwrap();
            let hi = d.upper_limit(1e-6).ln();
            let q = QuadSettings::new(1e-7, 1e-9);
            let total = integrate(|t| d.pdf(t.exp()).unwrap() * t.exp(), LOWEST_LOG_GAMMA, hi, &q);
            assert!((total.value - 1.0).abs() < 1e-3, "{}", total.value);
            for k in -300..60 {
                let g = 10f64.powf(k as f64 * 0.1);
                assert!(d.pdf(g).unwrap() >= -1e-6);
            }
        }
        assert!(snr_pdf(&p.links.u2b, &DistanceLaw::Fixed(10.0), 0.0).is_err());
    }

    #[test]
    fn tau_by_parts_matches_density_form() {
        let p = table();
        let s = ChannelSettings::default();
        for (link, law) in [
            (p.links.u2b, DistanceLaw::Fixed(150.0)),
            (p.links.i2u, DistanceLaw::DiskOffset(DiskOffsetLaw { r_center: 30.0, r_c: 50.0 })),
        ] {
            let d = SnrDistribution::new(&link, &law).unwrap();
            let tau = transmission_time_of(&d, &s).unwrap().tau;
            // tau = F(floor) / log2(1+floor) + int_floor^inf f(g) / log2(1+g) dg
            let hi = d.upper_limit(1e-12).ln();
            let q = QuadSettings::new(1e-10, 1e-10);
            let body = integrate(
                |t| {
                    let g = t.exp();
                    d.pdf(g).unwrap() * g * inv_rate(g)
                },
                s.snr_floor.ln(),
                hi,
                &q,
            );
            let direct = d.cdf(s.snr_floor) * inv_rate(s.snr_floor) + body.value;
            assert!((direct / tau - 1.0).abs() < 1e-4, "{direct} vs {tau}");
        }
    }

    #[test]
    fn transmission_time_is_linear_in_payload_and_monotone_in_distance() {
        let p = table();
        let times = TransmissionTimes::from_params(&p);
        let tau = times.tau_u2b(300.0);
        let t1 = 1000.0 * tau;
        let t2 = 2000.0 * tau;
        assert!((t2 - 2.0 * t1).abs() < 1e-9 * t2);
        let mut prev = 0.0;
        for k in 1..=20 {
            let r = 100.0 * k as f64;
            let t = times.tau_u2b(r);
            assert!(t >= prev - 1e-9, "tau decreased at {r}");
            prev = t;
        }
    }

    #[test]
    fn expected_rate_vanishes_with_power_and_decreases_with_distance() {
        let p = table();
        let s = ChannelSettings::default();
        let mut weak = p.links.u2b;
        weak.rho_tx = 1e-30;
        let r = expected_rate(&weak, &DistanceLaw::Fixed(100.0), &s).unwrap();
        assert!(r < 1e-6);
        let mut prev = f64::INFINITY;
        for k in 0..10 {
            let law = DistanceLaw::DiskOffset(DiskOffsetLaw {
                r_center: 5.0 + 10.0 * k as f64,
                r_c: 50.0,
            });
            let rate = expected_rate(&p.links.i2b, &law, &s).unwrap();
            assert!(rate < prev);
            prev = rate;
        }
    }

    #[test]
    fn threshold_radius_contract() {
        let p = table();
        let s = ChannelSettings::default();
        // a strong link meets a tiny threshold even at the far end of the bracket
        let mut loud = p.links.i2b;
        loud.rho_tx = 1e10;
        let tr = threshold_radius(&loud, p.r_c, 1e-6, &s).unwrap();
        assert!(tr.unattainable);
        assert_eq!(tr.r_t, THRESHOLD_BRACKET.1);
        // a reachable threshold: residual below 1e-3
        let mut strong = p.links.i2b;
        strong.rho_tx = 1.0;
        let tr = threshold_radius(&strong, p.r_c, 1.0, &s).unwrap();
        assert!(!tr.unattainable);
        let rate = expected_rate(
            &strong,
            &DistanceLaw::DiskOffset(DiskOffsetLaw { r_center: tr.r_t, r_c: p.r_c }),
            &s,
        )
        .unwrap();
        assert!((rate - 1.0).abs() < 1e-3);
    }

    #[test]
    fn qualifying_density_edges() {
        assert_eq!(qualifying_cluster_density(1e-6, 0.0, 300.0), 1e-6);
        assert_eq!(qualifying_cluster_density(1e-6, 1e-6, 0.0), 1e-6);
        let v = qualifying_cluster_density(1e-6, 1e-6, 500.0);
        assert!((v - 1e-6 * (-PI * 0.25f64).exp()).abs() < 1e-20);
    }
}
