//! Planar geometry and stochastic-geometry kernels.

mod area;
mod disk;
mod ppp;

pub use area::{
    area_audit, buffer_area_closed, buffer_area_numeric, default_resolution, AreaAuditRow, AreaDiagnostic,
    ClosedArea, AUDIT_L1, AUDIT_L2, AUDIT_RADII, AUDIT_THETAS,
};
pub use disk::{pdf_device_distance, sample_disk_offset, DiskOffsetLaw};
pub use ppp::{sample_ppp, Window};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Coordinates of `p` in the frame with origin `a` and x-axis along a→b.
pub fn to_local_frame(a: Point2, b: Point2, p: Point2) -> Result<Point2> {
    let (c, s) = frame_axis(a, b)?;
    let d = p.sub(a);
    Ok(Point2::new(c * d.x + s * d.y, -s * d.x + c * d.y))
}

/// Inverse of [`to_local_frame`].
pub fn from_local_frame(a: Point2, b: Point2, q: Point2) -> Result<Point2> {
    let (c, s) = frame_axis(a, b)?;
    Ok(Point2::new(a.x + c * q.x - s * q.y, a.y + s * q.x + c * q.y))
}

fn frame_axis(a: Point2, b: Point2) -> Result<(f64, f64)> {
    let d = b.sub(a);
    let len = d.norm();
    if len == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    Ok((d.x / len, d.y / len))
}

/// Closest point to `p` on the segment a–b.
pub fn closest_on_segment(p: Point2, a: Point2, b: Point2) -> Point2 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return a;
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    a.add(ab.scale(t))
}

pub fn distance_to_segment(p: Point2, a: Point2, b: Point2) -> f64 {
    p.dist(closest_on_segment(p, a, b))
}

/// Distance from `p` to the polyline through `vertices`.
pub fn distance_to_polyline(p: Point2, vertices: &[Point2]) -> f64 {
    match vertices {
        [] => f64::INFINITY,
        [only] => p.dist(*only),
        _ => vertices
            .windows(2)
            .map(|w| distance_to_segment(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Two-segment path IoT→D→S with the junction angle at D and a TBS-free
/// disk of radius `r_hole` around the IoT end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathGeometry {
    /// IoT-to-D length, m.
    pub l1: f64,
    /// D-to-S length, m.
    pub l2: f64,
    /// Angle between D→IoT and D→S, rad.
    pub theta: f64,
    pub r_hole: f64,
}

impl PathGeometry {
    pub fn new(l1: f64, theta: f64, l2: f64, r_hole: f64) -> Result<Self> {
        let p = Self { l1, l2, theta, r_hole };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l1 >= 0.0 && self.l1.is_finite()) {
            return Err(Error::invalid("l1", "must be finite and non-negative"));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::invalid("l2", "must be finite and non-negative"));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.theta) {
            return Err(Error::invalid("theta", "must lie in [0, pi]"));
        }
        if !(self.r_hole >= 0.0 && self.r_hole.is_finite()) {
            return Err(Error::invalid("r_hole", "must be finite and non-negative"));
        }
        Ok(())
    }

    /// Path vertices (IoT, D, S) with D at the origin and S on the +x axis.
    pub fn vertices(&self) -> [Point2; 3] {
        let (s, c) = self.theta.sin_cos();
        [
            Point2::new(self.l1 * c, self.l1 * s),
            Point2::ORIGIN,
            Point2::new(self.l2, 0.0),
        ]
    }

    /// Largest distance from D to any path point.
    pub fn extent(&self) -> f64 {
        self.l1.max(self.l2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AreaBackend {
    /// Grid oracle; `None` uses [`default_resolution`].
    Numeric { resolution: Option<f64> },
    /// Printed piecewise closed form.
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfPoint {
    pub value: f64,
    pub diagnostics: Vec<AreaDiagnostic>,
}

/// Distribution of the distance from the path to the nearest point of a
/// PPP of density `lambda`: 1 − exp(−λ · area(r)).
pub fn cdf_rb(path: &PathGeometry, lambda: f64, r: f64, backend: AreaBackend) -> Result<CdfPoint> {
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda", "density must be positive"));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    path.validate()?;
    let (area, diagnostics) = match backend {
        AreaBackend::Numeric { resolution } => (buffer_area_numeric(path, r, resolution)?, Vec::new()),
        AreaBackend::Closed => {
            let c = buffer_area_closed(path, r)?;
            (c.value, c.diagnostics)
        }
    };
    Ok(CdfPoint {
        value: -(-lambda * area).exp_m1(),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frame_endpoints() {
        let a = Point2::new(3.0, -2.0);
        let b = Point2::new(-1.0, 5.0);
        assert_eq!(to_local_frame(a, b, a).unwrap(), Point2::ORIGIN);
        let q = to_local_frame(a, b, b).unwrap();
        assert!((q.x - a.dist(b)).abs() < 1e-12 && q.y.abs() < 1e-12);
        assert_eq!(to_local_frame(a, a, b), Err(Error::DegenerateFrame));
    }

    proptest! {
        #[test]
        fn frame_round_trip(ax in -1e4..1e4f64, ay in -1e4..1e4f64, bx in -1e4..1e4f64, by in -1e4..1e4f64,
                            px in -1e4..1e4f64, py in -1e4..1e4f64) {
            let a = Point2::new(ax, ay);
            let b = Point2::new(bx, by);
            prop_assume!(a.dist(b) > 1e-6);
            let p = Point2::new(px, py);
            let back = from_local_frame(a, b, to_local_frame(a, b, p).unwrap()).unwrap();
            prop_assert!(back.dist(p) < 1e-9);
        }
    }

    #[test]
    fn polyline_distance() {
        let v = [Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), Point2::new(10.0, 10.0)];
        assert_eq!(distance_to_polyline(Point2::new(5.0, 3.0), &v), 3.0);
        assert_eq!(distance_to_polyline(Point2::new(13.0, 5.0), &v), 3.0);
        assert_eq!(distance_to_polyline(Point2::new(-3.0, -4.0), &v), 5.0);
    }

    #[test]
    fn cdf_basics() {
        let path = PathGeometry::new(500.0, std::f64::consts::FRAC_PI_2, 1000.0, 0.0).unwrap();
        let backend = AreaBackend::Numeric { resolution: None };
        assert_eq!(cdf_rb(&path, 1e-6, 0.0, backend).unwrap().value, 0.0);
        let mut prev = 0.0;
        for k in 1..60 {
            let v = cdf_rb(&path, 1e-6, 50.0 * k as f64, backend).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        assert!(cdf_rb(&path, 1e-6, 1e5, backend).unwrap().value > 1.0 - 1e-12);
        assert!(cdf_rb(&path, 0.0, 1.0, backend).is_err());
    }
}
