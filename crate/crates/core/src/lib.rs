//! Models for UAVs that deliver a package and, on the same trip, relay data
//! from an IoT cluster to the nearest terrestrial base station (TBS).
//!
//! Base stations and IoT clusters are Poisson point processes. The crate
//! covers the distance distributions, the air-to-ground channel
//! statistics, the route energy/time model, the hover-point route planner
//! and Monte-Carlo averaging over random deployments.

pub mod channel;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod params;
pub mod planner;
pub mod quad;

pub use error::{Error, Result};
