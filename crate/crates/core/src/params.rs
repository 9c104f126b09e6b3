//! System parameters and their TOML configuration format.
//!
//! Everything is stored in SI units (m, s, W, J, per-m² densities). The
//! config accepts a few alternative units (km, W·h, per-km², dB) for the
//! same quantity; at most one spelling of each quantity may appear.
//!
//! ```toml
//! [network]
//! tbs_density_per_km2 = 1.0      # or tbs_density_per_m2
//! iot_density_per_km2 = 1.0      # or iot_density_per_m2
//! cluster_radius_m = 50.0
//! rate_threshold = 1.0           # bit/s/Hz
//!
//! [mission]
//! sd_distance_km = 5.0           # or sd_distance_m
//! data_over_bandwidth = 1000.0   # bit/Hz
//! battery_wh = 177.6             # or battery_j
//! altitude_m = 100.0
//!
//! [environment]
//! los_a = 4.9
//! los_b = 0.43
//!
//! [power]                        # or [rotor], never both
//! travel_w = 159.0
//! travel_package_w = 193.0
//! service_w = 178.0
//! service_package_w = 252.0
//! speed_mps = 10.0
//! speed_package_mps = 12.4
//!
//! [channel]
//! noise_w = 1e-9
//! iot_tx_w = 1e-4
//! uav_tx_w = 0.1
//! los_exponent = 2.1
//! nlos_exponent = 4.0
//! ground_exponent = 4.0          # TBS link exponent
//! los_fading_m = 3
//! nlos_fading_m = 1
//! los_loss_db = 0.0              # or los_loss (linear)
//! nlos_loss_db = -20.0           # or nlos_loss (linear)
//!
//! [run]
//! trials = 1000
//! seed = 7
//! grid_step_m = 25.0
//! snr_floor = 1e-3
//! tau_cap = 1e4
//! prob_tol = 1e-6
//! rate_tol = 1e-4
//! # area_resolution_m = 1.0     # optional, default r/200 (>= 0.25 m)
//! ```
//!
//! The `[rotor]` section replaces `[power]` with the rotary-wing constants
//! `weight_n`, `package_weight_n`, `air_density`, `rotor_radius_m`,
//! `disc_area_m2`, `induced_velocity_mps`, `tip_speed_mps`, `solidity`,
//! `blade_angular_velocity`, `correction_factor`, `profile_drag`,
//! `fuselage_drag_ratio`, `max_speed_mps` and `comm_power_w`; the four
//! aggregate powers and both cruise speeds are then derived.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::channel::{ChannelSettings, LinkKind, LinkSpec};
use crate::error::{Error, Result};

const WH_TO_J: f64 = 3600.0;
const PER_KM2_TO_PER_M2: f64 = 1e-6;
const KM_TO_M: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorParams {
    /// Weight including the average package, N.
    pub w_total: f64,
    /// Average package weight, N.
    pub package_weight: f64,
    pub rho_air: f64,
    pub r_rotor: f64,
    pub a_disc: f64,
    pub v0: f64,
    pub u_tip: f64,
    pub solidity: f64,
    pub omega: f64,
    pub k_corr: f64,
    pub delta_drag: f64,
    pub d0: f64,
    /// Upper end of the cruise-speed search, m/s.
    pub max_speed: f64,
    /// Radio power added to hover power while serving, W.
    pub comm_power: f64,
}

impl RotorParams {
    /// Rotary-wing constants of a typical small quadrotor, carrying a 1 kg
    /// package.
    pub fn reference() -> Self {
        Self {
            w_total: 20.0 + 9.8,
            package_weight: 9.8,
            rho_air: 1.225,
            r_rotor: 0.4,
            a_disc: 0.503,
            v0: 4.03,
            u_tip: 120.0,
            solidity: 0.05,
            omega: 300.0,
            k_corr: 0.1,
            delta_drag: 0.012,
            d0: 0.6,
            max_speed: 30.0,
            comm_power: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rotor.weight_n", self.w_total),
            ("rotor.air_density", self.rho_air),
            ("rotor.rotor_radius_m", self.r_rotor),
            ("rotor.disc_area_m2", self.a_disc),
            ("rotor.induced_velocity_mps", self.v0),
            ("rotor.tip_speed_mps", self.u_tip),
            ("rotor.solidity", self.solidity),
            ("rotor.blade_angular_velocity", self.omega),
            ("rotor.correction_factor", self.k_corr),
            ("rotor.profile_drag", self.delta_drag),
            ("rotor.fuselage_drag_ratio", self.d0),
            ("rotor.max_speed_mps", self.max_speed),
        ] {
            positive(name, v)?;
        }
        non_negative("rotor.package_weight_n", self.package_weight)?;
        non_negative("rotor.comm_power_w", self.comm_power)?;
        if self.package_weight >= self.w_total {
            return Err(Error::invalid("rotor.package_weight_n", "must be below the total weight"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    /// Travel power without / with package, W.
    pub p_m: f64,
    pub p_mp: f64,
    /// Service (hover + radio) power without / with package, W.
    pub p_s: f64,
    pub p_sp: f64,
    /// Cruise speed without / with package, m/s.
    pub v: f64,
    pub v_p: f64,
    pub rotor: Option<RotorParams>,
}

impl PowerProfile {
    pub fn table_i() -> Self {
        Self {
            p_m: 159.0,
            p_mp: 193.0,
            p_s: 178.0,
            p_sp: 252.0,
            v: 10.0,
            v_p: 12.4,
            rotor: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("power.travel_w", self.p_m)?;
        positive("power.service_w", self.p_s)?;
        positive("power.speed_mps", self.v)?;
        positive("power.speed_package_mps", self.v_p)?;
        if !(self.p_mp >= self.p_m) {
            return Err(Error::invalid("power.travel_package_w", "must be at least travel_w"));
        }
        if !(self.p_sp >= self.p_s) {
            return Err(Error::invalid("power.service_package_w", "must be at least service_w"));
        }
        if let Some(r) = &self.rotor {
            r.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Links {
    /// IoT device to UAV.
    pub i2u: LinkSpec,
    /// UAV to TBS.
    pub u2b: LinkSpec,
    /// IoT device straight to TBS.
    pub i2b: LinkSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub trials: u64,
    pub seed: u64,
    /// Planner grid step for both hover radii, m.
    pub grid_step: f64,
    pub channel: ChannelSettings,
    /// Buffer-area grid spacing, m; `None` uses the radius-relative default.
    pub area_resolution: Option<f64>,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 7,
            grid_step: 25.0,
            channel: ChannelSettings::default(),
            area_resolution: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// TBS density, per m².
    pub lambda_t: f64,
    /// IoT-cluster density, per m².
    pub lambda_i: f64,
    /// Cluster radius, m.
    pub r_c: f64,
    /// Direct-link rate threshold, bit/s/Hz.
    pub c_t: f64,
    /// Source-destination distance, m.
    pub l2: f64,
    /// Data to move, bit/Hz.
    pub m_over_bw: f64,
    /// Battery capacity, J.
    pub b_max: f64,
    /// Flight altitude, m.
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub power: PowerProfile,
    pub links: Links,
    pub run: RunSettings,
}

/// Channel constants shared by the three links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConstants {
    pub noise: f64,
    pub iot_tx: f64,
    pub uav_tx: f64,
    pub alpha_l: f64,
    pub alpha_n: f64,
    pub alpha_ground: f64,
    pub m_l: u32,
    pub m_n: u32,
    pub eta_l: f64,
    pub eta_n: f64,
}

impl ChannelConstants {
    pub fn table_i() -> Self {
        Self {
            noise: 1e-9,
            iot_tx: 1e-4,
            uav_tx: 0.1,
            alpha_l: 2.1,
            alpha_n: 4.0,
            alpha_ground: 4.0,
            m_l: 3,
            m_n: 1,
            eta_l: 1.0,
            eta_n: 0.01,
        }
    }

    pub fn build_links(&self, h: f64, a: f64, b: f64) -> Links {
        let aerial = |rho_tx| LinkSpec {
            rho_tx,
            eta_l: self.eta_l,
            eta_n: self.eta_n,
            alpha_l: self.alpha_l,
            alpha_n: self.alpha_n,
            m_l: self.m_l,
            m_n: self.m_n,
            h,
            sigma2: self.noise,
            kind: LinkKind::Aerial { a, b },
        };
        Links {
            i2u: aerial(self.iot_tx),
            u2b: aerial(self.uav_tx),
            i2b: LinkSpec {
                rho_tx: self.iot_tx,
                eta_l: 1.0,
                eta_n: 1.0,
                alpha_l: self.alpha_ground,
                alpha_n: self.alpha_ground,
                m_l: 1,
                m_n: 1,
                h: 0.0,
                sigma2: self.noise,
                kind: LinkKind::Ground { alpha: self.alpha_ground },
            },
        }
    }

    fn from_links(links: &Links) -> Self {
        let alpha_ground = match links.i2b.kind {
            LinkKind::Ground { alpha } => alpha,
            LinkKind::Aerial { .. } => links.i2b.alpha_n,
        };
        Self {
            noise: links.i2u.sigma2,
            iot_tx: links.i2u.rho_tx,
            uav_tx: links.u2b.rho_tx,
            alpha_l: links.i2u.alpha_l,
            alpha_n: links.i2u.alpha_n,
            alpha_ground,
            m_l: links.i2u.m_l,
            m_n: links.i2u.m_n,
            eta_l: links.i2u.eta_l,
            eta_n: links.i2u.eta_n,
        }
    }
}

impl SystemParams {
    /// Reference parameter set: 1 TBS and 1 cluster per km², 50 m clusters,
    /// 5 km deliveries, 177.6 W·h battery, 100 m altitude.
    pub fn table_i() -> Self {
        let (h, a, b) = (100.0, 4.9, 0.43);
        Self {
            lambda_t: 1e-6,
            lambda_i: 1e-6,
            r_c: 50.0,
            c_t: 1.0,
            l2: 5000.0,
            m_over_bw: 1000.0,
            b_max: 177.6 * WH_TO_J,
            h,
            a,
            b,
            power: PowerProfile::table_i(),
            links: ChannelConstants::table_i().build_links(h, a, b),
            run: RunSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("network.tbs_density", self.lambda_t)?;
        positive("network.iot_density", self.lambda_i)?;
        positive("network.cluster_radius_m", self.r_c)?;
        non_negative("network.rate_threshold", self.c_t)?;
        positive("mission.sd_distance", self.l2)?;
        non_negative("mission.data_over_bandwidth", self.m_over_bw)?;
        positive("mission.battery", self.b_max)?;
        positive("mission.altitude_m", self.h)?;
        positive("environment.los_a", self.a)?;
        positive("environment.los_b", self.b)?;
        self.power.validate()?;
        self.links.i2u.validate("channel")?;
        self.links.u2b.validate("channel")?;
        self.links.i2b.validate("channel")?;
        if self.run.trials < 1 {
            return Err(Error::invalid("run.trials", "must be at least 1"));
        }
        positive("run.grid_step_m", self.run.grid_step)?;
        non_negative("run.snr_floor", self.run.channel.snr_floor)?;
        positive("run.tau_cap", self.run.channel.tau_cap)?;
        positive("run.prob_tol", self.run.channel.prob_tol)?;
        positive("run.rate_tol", self.run.channel.rate_tol)?;
        if let Some(res) = self.run.area_resolution {
            positive("run.area_resolution_m", res)?;
        }
        Ok(())
    }

    pub fn channel_constants(&self) -> ChannelConstants {
        ChannelConstants::from_links(&self.links)
    }

    /// Canonical TOML form (SI spellings), readable by [`load_and_validate`].
    pub fn to_toml_string(&self) -> String {
        let mut root = Table::new();
        let mut network = Table::new();
        network.insert("tbs_density_per_m2".into(), self.lambda_t.into());
        network.insert("iot_density_per_m2".into(), self.lambda_i.into());
        network.insert("cluster_radius_m".into(), self.r_c.into());
        network.insert("rate_threshold".into(), self.c_t.into());
        root.insert("network".into(), network.into());

        let mut mission = Table::new();
        mission.insert("sd_distance_m".into(), self.l2.into());
        mission.insert("data_over_bandwidth".into(), self.m_over_bw.into());
        mission.insert("battery_j".into(), self.b_max.into());
        mission.insert("altitude_m".into(), self.h.into());
        root.insert("mission".into(), mission.into());

        let mut env = Table::new();
        env.insert("los_a".into(), self.a.into());
        env.insert("los_b".into(), self.b.into());
        root.insert("environment".into(), env.into());

        match &self.power.rotor {
            Some(r) => {
                let mut t = Table::new();
                t.insert("weight_n".into(), r.w_total.into());
                t.insert("package_weight_n".into(), r.package_weight.into());
                t.insert("air_density".into(), r.rho_air.into());
                t.insert("rotor_radius_m".into(), r.r_rotor.into());
                t.insert("disc_area_m2".into(), r.a_disc.into());
                t.insert("induced_velocity_mps".into(), r.v0.into());
                t.insert("tip_speed_mps".into(), r.u_tip.into());
                t.insert("solidity".into(), r.solidity.into());
                t.insert("blade_angular_velocity".into(), r.omega.into());
                t.insert("correction_factor".into(), r.k_corr.into());
                t.insert("profile_drag".into(), r.delta_drag.into());
                t.insert("fuselage_drag_ratio".into(), r.d0.into());
                t.insert("max_speed_mps".into(), r.max_speed.into());
                t.insert("comm_power_w".into(), r.comm_power.into());
                root.insert("rotor".into(), t.into());
            }
            None => {
                let p = &self.power;
                let mut t = Table::new();
                t.insert("travel_w".into(), p.p_m.into());
                t.insert("travel_package_w".into(), p.p_mp.into());
                t.insert("service_w".into(), p.p_s.into());
                t.insert("service_package_w".into(), p.p_sp.into());
                t.insert("speed_mps".into(), p.v.into());
                t.insert("speed_package_mps".into(), p.v_p.into());
                root.insert("power".into(), t.into());
            }
        }

        let c = self.channel_constants();
        let mut ch = Table::new();
        ch.insert("noise_w".into(), c.noise.into());
        ch.insert("iot_tx_w".into(), c.iot_tx.into());
        ch.insert("uav_tx_w".into(), c.uav_tx.into());
        ch.insert("los_exponent".into(), c.alpha_l.into());
        ch.insert("nlos_exponent".into(), c.alpha_n.into());
        ch.insert("ground_exponent".into(), c.alpha_ground.into());
        ch.insert("los_fading_m".into(), Value::Integer(c.m_l as i64));
        ch.insert("nlos_fading_m".into(), Value::Integer(c.m_n as i64));
        ch.insert("los_loss".into(), c.eta_l.into());
        ch.insert("nlos_loss".into(), c.eta_n.into());
        root.insert("channel".into(), ch.into());

        let r = &self.run;
        let mut run = Table::new();
        run.insert("trials".into(), Value::Integer(r.trials as i64));
        run.insert("seed".into(), Value::Integer(r.seed as i64));
        run.insert("grid_step_m".into(), r.grid_step.into());
        run.insert("snr_floor".into(), r.channel.snr_floor.into());
        run.insert("tau_cap".into(), r.channel.tau_cap.into());
        run.insert("prob_tol".into(), r.channel.prob_tol.into());
        run.insert("rate_tol".into(), r.channel.rate_tol.into());
        if let Some(res) = r.area_resolution {
            run.insert("area_resolution_m".into(), res.into());
        }
        root.insert("run".into(), run.into());

        toml::to_string(&root).expect("plain tables always serialize")
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be strictly positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be non-negative, got {v}")))
    }
}

/// Result of loading a config document.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedParams {
    pub params: SystemParams,
    /// Unknown keys tolerated in non-strict mode.
    pub warnings: Vec<String>,
}

/// Alternative spellings of one quantity with their scale to SI.
const ALTERNATIVES: &[(&str, &[(&str, f64)])] = &[
    ("network", &[("tbs_density_per_m2", 1.0), ("tbs_density_per_km2", PER_KM2_TO_PER_M2)]),
    ("network", &[("iot_density_per_m2", 1.0), ("iot_density_per_km2", PER_KM2_TO_PER_M2)]),
    ("mission", &[("sd_distance_m", 1.0), ("sd_distance_km", KM_TO_M)]),
    ("mission", &[("battery_j", 1.0), ("battery_wh", WH_TO_J)]),
];

const DB_ALTERNATIVES: &[(&str, &str)] = &[("los_loss", "los_loss_db"), ("nlos_loss", "nlos_loss_db")];

struct Reader<'a> {
    root: &'a Table,
    used: BTreeSet<String>,
}

impl<'a> Reader<'a> {
    fn section(&self, name: &str) -> Option<&'a Table> {
        self.root.get(name).and_then(Value::as_table)
    }

    fn raw(&mut self, section: &str, key: &str) -> Result<Option<&'a Value>> {
        let Some(t) = self.section(section) else {
            return Ok(None);
        };
        let v = t.get(key);
        if v.is_some() {
            self.used.insert(format!("{section}.{key}"));
        }
        Ok(v)
    }

    fn opt_f64(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.raw(section, key)? {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(*f)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(Error::invalid(
                &format!("{section}.{key}"),
                format!("expected a number, got {}", other.type_str()),
            )),
        }
    }

    fn f64(&mut self, section: &str, key: &str) -> Result<f64> {
        self.opt_f64(section, key)?
            .ok_or_else(|| Error::MissingKey(format!("{section}.{key}")))
    }

    fn opt_u64(&mut self, section: &str, key: &str) -> Result<Option<u64>> {
        match self.raw(section, key)? {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(_) => Err(Error::invalid(
                &format!("{section}.{key}"),
                "expected a non-negative integer",
            )),
        }
    }

    fn u64(&mut self, section: &str, key: &str) -> Result<u64> {
        self.opt_u64(section, key)?
            .ok_or_else(|| Error::MissingKey(format!("{section}.{key}")))
    }

    fn one_of(&mut self, section: &str, options: &[(&str, f64)]) -> Result<f64> {
        let mut found = None;
        for (key, scale) in options {
            if let Some(v) = self.opt_f64(section, key)? {
                if found.is_some() {
                    return Err(Error::invalid(
                        &format!("{section}.{key}"),
                        "the same quantity is given in two units",
                    ));
                }
                found = Some(v * scale);
            }
        }
        found.ok_or_else(|| Error::MissingKey(format!("{section}.{}", options[0].0)))
    }

    fn loss(&mut self, linear: &str, db: &str) -> Result<f64> {
        let lin = self.opt_f64("channel", linear)?;
        let dbv = self.opt_f64("channel", db)?;
        match (lin, dbv) {
            (Some(_), Some(_)) => Err(Error::invalid(
                &format!("channel.{db}"),
                "the same quantity is given in two units",
            )),
            (Some(l), None) => Ok(l),
            (None, Some(d)) => Ok(10f64.powf(d / 10.0)),
            (None, None) => Err(Error::MissingKey(format!("channel.{db}"))),
        }
    }

    fn unknown_keys(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, value) in self.root {
            match value.as_table() {
                Some(t) => {
                    for key in t.keys() {
                        let full = format!("{name}.{key}");
                        if !self.used.contains(&full) {
                            out.push(full);
                        }
                    }
                }
                None => out.push(name.clone()),
            }
        }
        out
    }
}

/// Parse, normalize units and validate a config document.
///
/// Unknown keys are an error when `strict` is set and are returned as
/// warnings otherwise.
pub fn load_and_validate(text: &str, strict: bool) -> Result<LoadedParams> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.message().to_string()))?;
    let mut rd = Reader {
        root: &root,
        used: BTreeSet::new(),
    };

    let lambda_t = rd.one_of("network", ALTERNATIVES[0].1)?;
    let lambda_i = rd.one_of("network", ALTERNATIVES[1].1)?;
    let r_c = rd.f64("network", "cluster_radius_m")?;
    let c_t = rd.f64("network", "rate_threshold")?;

    let l2 = rd.one_of("mission", ALTERNATIVES[2].1)?;
    let m_over_bw = rd.f64("mission", "data_over_bandwidth")?;
    let b_max = rd.one_of("mission", ALTERNATIVES[3].1)?;
    let h = rd.f64("mission", "altitude_m")?;

    let a = rd.f64("environment", "los_a")?;
    let b = rd.f64("environment", "los_b")?;

    let has_power = rd.section("power").is_some();
    let has_rotor = rd.section("rotor").is_some();
    let power = match (has_power, has_rotor) {
        (true, true) => {
            return Err(Error::invalid("rotor", "[power] and [rotor] are mutually exclusive"));
        }
        (false, false) => return Err(Error::MissingKey("power".into())),
        (true, false) => PowerProfile {
            p_m: rd.f64("power", "travel_w")?,
            p_mp: rd.f64("power", "travel_package_w")?,
            p_s: rd.f64("power", "service_w")?,
            p_sp: rd.f64("power", "service_package_w")?,
            v: rd.f64("power", "speed_mps")?,
            v_p: rd.f64("power", "speed_package_mps")?,
            rotor: None,
        },
        (false, true) => {
            let rotor = RotorParams {
                w_total: rd.f64("rotor", "weight_n")?,
                package_weight: rd.f64("rotor", "package_weight_n")?,
                rho_air: rd.f64("rotor", "air_density")?,
                r_rotor: rd.f64("rotor", "rotor_radius_m")?,
                a_disc: rd.f64("rotor", "disc_area_m2")?,
                v0: rd.f64("rotor", "induced_velocity_mps")?,
                u_tip: rd.f64("rotor", "tip_speed_mps")?,
                solidity: rd.f64("rotor", "solidity")?,
                omega: rd.f64("rotor", "blade_angular_velocity")?,
                k_corr: rd.f64("rotor", "correction_factor")?,
                delta_drag: rd.f64("rotor", "profile_drag")?,
                d0: rd.f64("rotor", "fuselage_drag_ratio")?,
                max_speed: rd.f64("rotor", "max_speed_mps")?,
                comm_power: rd.f64("rotor", "comm_power_w")?,
            };
            rotor.validate()?;
            crate::energy::derive_power_profile(&rotor)?
        }
    };

    let m_l = rd.u64("channel", "los_fading_m")?;
    let m_n = rd.u64("channel", "nlos_fading_m")?;
    let constants = ChannelConstants {
        noise: rd.f64("channel", "noise_w")?,
        iot_tx: rd.f64("channel", "iot_tx_w")?,
        uav_tx: rd.f64("channel", "uav_tx_w")?,
        alpha_l: rd.f64("channel", "los_exponent")?,
        alpha_n: rd.f64("channel", "nlos_exponent")?,
        alpha_ground: rd.f64("channel", "ground_exponent")?,
        m_l: u32::try_from(m_l).map_err(|_| Error::invalid("channel.los_fading_m", "too large"))?,
        m_n: u32::try_from(m_n).map_err(|_| Error::invalid("channel.nlos_fading_m", "too large"))?,
        eta_l: rd.loss(DB_ALTERNATIVES[0].0, DB_ALTERNATIVES[0].1)?,
        eta_n: rd.loss(DB_ALTERNATIVES[1].0, DB_ALTERNATIVES[1].1)?,
    };

    let defaults = RunSettings::default();
    let run = RunSettings {
        trials: rd.opt_u64("run", "trials")?.unwrap_or(defaults.trials),
        seed: rd.opt_u64("run", "seed")?.unwrap_or(defaults.seed),
        grid_step: rd.opt_f64("run", "grid_step_m")?.unwrap_or(defaults.grid_step),
        channel: ChannelSettings {
            snr_floor: rd.opt_f64("run", "snr_floor")?.unwrap_or(defaults.channel.snr_floor),
            tau_cap: rd.opt_f64("run", "tau_cap")?.unwrap_or(defaults.channel.tau_cap),
            prob_tol: rd.opt_f64("run", "prob_tol")?.unwrap_or(defaults.channel.prob_tol),
            rate_tol: rd.opt_f64("run", "rate_tol")?.unwrap_or(defaults.channel.rate_tol),
        },
        area_resolution: rd.opt_f64("run", "area_resolution_m")?,
    };

    let params = SystemParams {
        lambda_t,
        lambda_i,
        r_c,
        c_t,
        l2,
        m_over_bw,
        b_max,
        h,
        a,
        b,
        power,
        links: constants.build_links(h, a, b),
        run,
    };
    params.validate()?;

    let unknown = rd.unknown_keys();
    if strict {
        if let Some(first) = unknown.into_iter().next() {
            return Err(Error::UnknownKey(first));
        }
        return Ok(LoadedParams {
            params,
            warnings: Vec::new(),
        });
    }
    let warnings = unknown.into_iter().map(|k| format!("ignoring unknown key `{k}`")).collect();
    Ok(LoadedParams { params, warnings })
}

/// Apply `section.key = value` overrides to a config document. The value
/// is parsed as a TOML literal; other spellings of the same quantity are
/// removed so the override wins.
pub fn apply_overrides(text: &str, overrides: &[(String, String)]) -> Result<String> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.message().to_string()))?;
    for (path, raw) in overrides {
        let (section, key) = path
            .split_once('.')
            .ok_or_else(|| Error::invalid(path, "override keys look like section.key"))?;
        let wrapper: Table = format!("v = {raw}")
            .parse()
            .map_err(|_| Error::invalid(path, format!("`{raw}` is not a TOML value")))?;
        let value = wrapper["v"].clone();

        let mut siblings: Vec<String> = Vec::new();
        for (sec, group) in ALTERNATIVES {
            if *sec == section && group.iter().any(|(k, _)| *k == key) {
                siblings.extend(group.iter().map(|(k, _)| k.to_string()));
            }
        }
        for (lin, db) in DB_ALTERNATIVES {
            if section == "channel" && (key == *lin || key == *db) {
                siblings.push(lin.to_string());
                siblings.push(db.to_string());
            }
        }
        if section == "power" {
            root.remove("rotor");
        } else if section == "rotor" {
            root.remove("power");
        }

        let entry = root
            .entry(section.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        let table = entry
            .as_table_mut()
            .ok_or_else(|| Error::invalid(section, "not a section"))?;
        for s in siblings {
            table.remove(&s);
        }
        table.insert(key.to_string(), value);
    }
    Ok(toml::to_string(&root).expect("plain tables always serialize"))
}

/// Config document for the reference parameter set, in the same spelling
/// as the shipped `configs/table1.toml`.
pub const TABLE_I_TOML: &str = include_str!("../../../configs/table1.toml");
