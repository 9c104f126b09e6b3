use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::Point2;
use crate::error::{Error, Result};

/// Axis-aligned sampling rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Window {
    pub fn centered(center: Point2, half_width: f64) -> Self {
        Self {
            x_min: center.x - half_width,
            y_min: center.y - half_width,
            x_max: center.x + half_width,
            y_max: center.y + half_width,
        }
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }
}

/// Homogeneous Poisson point process of density `lambda` on `window`.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, window: &Window, rng: &mut R) -> Result<Vec<Point2>> {
    if !(window.x_max > window.x_min && window.y_max > window.y_min) {
        return Err(Error::invalid("window", "must have positive area"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", "must be finite and non-negative"));
    }
    let mean = lambda * window.area();
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let n = Poisson::new(mean)
        .map_err(|e| Error::Domain(e.to_string()))?
        .sample(rng) as usize;
    let (w, h) = (window.x_max - window.x_min, window.y_max - window.y_min);
    Ok((0..n)
        .map(|_| {
            Point2::new(
                window.x_min + w * rng.gen::<f64>(),
                window.y_min + h * rng.gen::<f64>(),
            )
        })
        .collect())
}
