//! Area of the set of points within `r` of the two-segment path, minus the
//! TBS-free disk around the IoT end.
//!
//! The numeric backend is exact for the two capsule areas and integrates
//! only the overlap corrections (capsule ∩ capsule, hole ∩ union) by a
//! midpoint scanline with exact chord lengths per row. The midpoint rule
//! on chord lengths with square-root endpoints has error O(dy^1.5) per
//! boundary, so the total error is bounded by a constant times
//! `r · resolution`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{PathGeometry, Point2};
use crate::error::{Error, Result};

/// Default scanline spacing: r/200, but not below 0.25 m.
pub fn default_resolution(r: f64) -> f64 {
    (r / 200.0).max(0.25)
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    fn len(self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    fn meet(self, o: Interval) -> Interval {
        Interval {
            lo: self.lo.max(o.lo),
            hi: self.hi.min(o.hi),
        }
    }

    fn hull(self, o: Interval) -> Interval {
        Interval {
            lo: self.lo.min(o.lo),
            hi: self.hi.max(o.hi),
        }
    }
}

fn disk_chord(c: Point2, r: f64, y: f64) -> Interval {
    let dy = y - c.y;
    if dy.abs() > r {
        return Interval::EMPTY;
    }
    let w = (r * r - dy * dy).max(0.0).sqrt();
    Interval {
        lo: c.x - w,
        hi: c.x + w,
    }
}

/// Chord of the capsule around p–q at height y. The capsule is convex, so
/// its chord is the hull of the chords of its two end disks and its core
/// rectangle.
fn capsule_chord(p: Point2, q: Point2, r: f64, y: f64) -> Interval {
    let mut out = disk_chord(p, r, y).hull(disk_chord(q, r, y));
    let d = q.sub(p);
    let len = d.norm();
    if len == 0.0 {
        return out;
    }
    let n = Point2::new(-d.y / len * r, d.x / len * r);
    let corners = [p.add(n), q.add(n), q.sub(n), p.sub(n)];
    for i in 0..4 {
        let a = corners[i];
        let b = corners[(i + 1) % 4];
        if (y - a.y) * (y - b.y) > 0.0 {
            continue;
        }
        if a.y == b.y {
            out = out.hull(Interval { lo: a.x.min(b.x), hi: a.x.max(b.x) });
        } else {
            let t = (y - a.y) / (b.y - a.y);
            let x = a.x + t * (b.x - a.x);
            out = out.hull(Interval { lo: x, hi: x });
        }
    }
    out
}

fn scanline<F: FnMut(f64) -> f64>(y_lo: f64, y_hi: f64, resolution: f64, mut chord: F) -> f64 {
    let span = y_hi - y_lo;
    if span <= 0.0 {
        return 0.0;
    }
    let n = (span / resolution).ceil().max(1.0) as usize;
    let dy = span / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        acc += chord(y_lo + (i as f64 + 0.5) * dy);
    }
    acc * dy
}

/// Area within `r` of the path and outside the hole, by scanline.
pub fn buffer_area_numeric(path: &PathGeometry, r: f64, resolution: Option<f64>) -> Result<f64> {
    path.validate()?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    let res = resolution.unwrap_or_else(|| default_resolution(r));
    if !(res > 0.0) {
        return Err(Error::invalid("resolution", "must be positive"));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let [iot, d, s] = path.vertices();
    let cap1 = PI * r * r + 2.0 * path.l1 * r;
    let cap2 = PI * r * r + 2.0 * path.l2 * r;
    // segment D-S lies on the x axis, so both capsules meet only in |y| <= r
    let overlap = scanline(-r, r, res, |y| {
        capsule_chord(iot, d, r, y).meet(capsule_chord(d, s, r, y)).len()
    });
    let rh = path.r_hole;
    let hole_cut = if rh > 0.0 {
        scanline(iot.y - rh, iot.y + rh, res, |y| {
            let h = disk_chord(iot, rh, y);
            let c1 = capsule_chord(iot, d, r, y);
            let c2 = capsule_chord(d, s, r, y);
            h.meet(c1).len() + h.meet(c2).len() - h.meet(c1).meet(c2).len()
        })
    } else {
        0.0
    };
    Ok((cap1 + cap2 - overlap - hole_cut).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AreaDiagnostic {
    /// The selected overlap branch produced a negative area.
    NegativeOverlapTerm,
    /// The total came out negative.
    NegativeTotal,
    /// An arcsine argument fell outside [-1, 1].
    ArcsinDomain,
    /// The value is NaN or infinite.
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedArea {
    pub value: f64,
    /// Capsule around D–S.
    pub base: f64,
    /// Junction correction.
    pub junction: f64,
    /// IoT-segment contribution, and which of the three branches was used.
    pub segment: f64,
    pub branch: u8,
    pub hole: f64,
    pub diagnostics: Vec<AreaDiagnostic>,
}

fn checked_asin(x: f64, diags: &mut Vec<AreaDiagnostic>) -> f64 {
    if !(-1.0..=1.0).contains(&x) && !diags.contains(&AreaDiagnostic::ArcsinDomain) {
        diags.push(AreaDiagnostic::ArcsinDomain);
    }
    x.asin()
}

/// Piecewise closed form of the buffer area, evaluated as printed.
///
/// Out-of-domain branches are not repaired; they are reported through
/// `diagnostics` next to the raw value.
pub fn buffer_area_closed(path: &PathGeometry, r: f64) -> Result<ClosedArea> {
    path.validate()?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    let (l1, l2, theta, rt) = (path.l1, path.l2, path.theta, path.r_hole);
    let mut diags = Vec::new();
    if r == 0.0 {
        return Ok(ClosedArea {
            value: 0.0,
            base: 0.0,
            junction: 0.0,
            segment: 0.0,
            branch: 1,
            hole: 0.0,
            diagnostics: diags,
        });
    }
    let half_tan = (theta / 2.0).tan();
    let base = PI * r * r + 2.0 * l2 * r;
    let junction = r * r * half_tan - r * r;

    let (segment, branch) = if r <= l1 * half_tan {
        (2.0 * r * (l1 - r / theta.sin()) + r * r * PI / 2.0, 1)
    } else if r <= l1 * theta.tan() {
        let t1 = checked_asin((l1 * theta.sin() - r) / r, &mut diags) + theta + FRAC_PI_2;
        let sh = (t1 / 2.0).sin();
        (r * r * (t1 - t1.sin()) / 2.0 + (l1 - r * half_tan) * (r * sh) * sh, 2)
    } else {
        let t4 = FRAC_PI_2 - checked_asin((r - l1 * theta.sin()) / r, &mut diags);
        let x = l1 - r * half_tan;
        let y = r * t4.sin() + l1 * theta.cos() + r * half_tan;
        let z = ((y - x * theta.cos()).powi(2) + (x * theta.sin()).powi(2)).sqrt();
        let t3 = checked_asin(z / (2.0 * r), &mut diags);
        (0.5 * theta.sin() * x * y + t3 * r * r - r * r * (2.0 * t3).sin() / 2.0, 3)
    };

    let hole = if r < rt {
        let t2 = checked_asin(r / rt, &mut diags);
        0.5 * PI * r * r + r * rt * t2.cos() + t2 * rt * rt
    } else {
        PI * rt * rt
    };

    let value = base + junction + segment - hole;
    if segment < 0.0 {
        diags.push(AreaDiagnostic::NegativeOverlapTerm);
    }
    if value < 0.0 {
        diags.push(AreaDiagnostic::NegativeTotal);
    }
    if !value.is_finite() {
        diags.push(AreaDiagnostic::NonFinite);
    }
    Ok(ClosedArea {
        value,
        base,
        junction,
        segment,
        branch,
        hole,
        diagnostics: diags,
    })
}

/// Radii of the closed-form audit grid, m.
pub const AUDIT_RADII: [f64; 11] = [10.0, 25.0, 50.0, 100.0, 200.0, 300.0, 500.0, 750.0, 1000.0, 1500.0, 2000.0];
/// Junction angles of the audit grid, rad.
pub const AUDIT_THETAS: [f64; 3] = [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0];
/// IoT-segment lengths of the audit grid, m.
pub const AUDIT_L1: [f64; 3] = [200.0, 500.0, 1000.0];
pub const AUDIT_L2: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaAuditRow {
    pub r: f64,
    pub theta: f64,
    pub l1: f64,
    pub closed: f64,
    pub numeric: f64,
    pub rel_err: f64,
    pub branch: u8,
    pub diagnostics: Vec<AreaDiagnostic>,
}

/// Closed form against the scanline oracle over the audit grid.
pub fn area_audit(resolution: Option<f64>) -> Result<Vec<AreaAuditRow>> {
    let mut rows = Vec::new();
    for &l1 in &AUDIT_L1 {
        for &theta in &AUDIT_THETAS {
            for &r in &AUDIT_RADII {
                let path = PathGeometry::new(l1, theta, AUDIT_L2, 0.0)?;
                let closed = buffer_area_closed(&path, r)?;
                let numeric = buffer_area_numeric(&path, r, resolution)?;
                let rel_err = (closed.value - numeric).abs() / numeric;
                rows.push(AreaAuditRow {
                    r,
                    theta,
                    l1,
                    closed: closed.value,
                    numeric,
                    rel_err: if rel_err.is_nan() { f64::INFINITY } else { rel_err },
                    branch: closed.branch,
                    diagnostics: closed.diagnostics,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force cell-center count on a uniform grid.
    fn brute_area(path: &PathGeometry, r: f64, cell: f64) -> f64 {
        let v = path.vertices();
        let xs = [v[0].x, v[1].x, v[2].x];
        let ys = [v[0].y, v[1].y, v[2].y];
        let x0 = xs.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let x1 = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        let y0 = ys.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let y1 = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        let nx = ((x1 - x0) / cell).ceil() as usize;
        let ny = ((y1 - y0) / cell).ceil() as usize;
        let mut count = 0usize;
        for i in 0..nx {
            let x = x0 + (i as f64 + 0.5) * cell;
            for j in 0..ny {
                let p = Point2::new(x, y0 + (j as f64 + 0.5) * cell);
                if super::super::distance_to_polyline(p, &v) <= r && p.dist(v[0]) >= path.r_hole {
                    count += 1;
                }
            }
        }
        count as f64 * cell * cell
    }

    #[test]
    fn zero_radius_is_empty() {
        let p = PathGeometry::new(300.0, 1.0, 1000.0, 20.0).unwrap();
        assert_eq!(buffer_area_numeric(&p, 0.0, None).unwrap(), 0.0);
        for theta in [0.0, 0.3, FRAC_PI_2, 2.5, PI] {
            let p = PathGeometry::new(300.0, theta, 1000.0, 0.0).unwrap();
            assert_eq!(buffer_area_closed(&p, 0.0).unwrap().value, 0.0);
        }
    }

    #[test]
    fn straight_path_is_one_capsule() {
        let p = PathGeometry::new(400.0, PI, 1000.0, 0.0).unwrap();
        for r in [10.0, 100.0, 700.0] {
            let exact = PI * r * r + 2.0 * 1400.0 * r;
            let a = buffer_area_numeric(&p, r, None).unwrap();
            assert!((a / exact - 1.0).abs() < 1e-3, "{r}: {a} vs {exact}");
        }
    }

    #[test]
    fn no_iot_leg_is_single_capsule() {
        let p = PathGeometry::new(0.0, 1.2, 1000.0, 0.0).unwrap();
        let a = buffer_area_numeric(&p, 100.0, None).unwrap();
        assert!((a - 231_415.9).abs() / 231_415.9 < 1e-3, "{a}");
    }

    #[test]
    fn agrees_with_brute_force_grid() {
        for (l1, theta, rh, r) in [
            (500.0, FRAC_PI_2, 0.0, 200.0),
            (300.0, 0.4, 80.0, 150.0),
            (800.0, 2.6, 300.0, 120.0),
            (200.0, 0.0, 40.0, 60.0),
        ] {
            let p = PathGeometry::new(l1, theta, 1000.0, rh).unwrap();
            let a = buffer_area_numeric(&p, r, None).unwrap();
            let b = brute_area(&p, r, 2.0);
            assert!((a / b - 1.0).abs() < 5e-3, "{l1} {theta} {rh} {r}: {a} vs {b}");
        }
    }

    #[test]
    fn nondecreasing_and_converging() {
        let p = PathGeometry::new(500.0, 0.7, 1000.0, 30.0).unwrap();
        let mut prev = 0.0;
        for k in 1..400 {
            let a = buffer_area_numeric(&p, 5.0 * k as f64, None).unwrap();
            assert!(a >= prev, "{k}");
            prev = a;
        }
        let r = 400.0;
        let coarse = buffer_area_numeric(&p, r, Some(8.0)).unwrap();
        let mid = buffer_area_numeric(&p, r, Some(4.0)).unwrap();
        let fine = buffer_area_numeric(&p, r, Some(2.0)).unwrap();
        assert!((fine - mid).abs() < (mid - coarse).abs() + 1e-9);
        assert!((fine - mid).abs() / fine < 1e-4);
    }

    #[test]
    fn closed_form_without_iot_leg_keeps_junction_term() {
        // with l1 = 0 and theta = 0 the junction term equals -r^2 as printed
        let p = PathGeometry::new(0.0, 0.0, 1000.0, 0.0).unwrap();
        for r in [5.0, 15.0, 100.0] {
            let c = buffer_area_closed(&p, r).unwrap();
            assert_eq!(c.branch, 3);
            assert!((c.value - (PI * r * r + 2000.0 * r - r * r)).abs() < 1e-6);
            let n = buffer_area_numeric(&p, r, None).unwrap();
            let rel = (c.value - n).abs() / n;
            if r / 2000.0 < 0.009 {
                assert!(rel <= 0.01, "{r}: {rel}");
            }
        }
    }

    #[test]
    fn closed_form_hole_branches() {
        let p = PathGeometry::new(500.0, FRAC_PI_2, 1000.0, 100.0).unwrap();
        let big = buffer_area_closed(&p, 150.0).unwrap();
        assert!((big.hole - PI * 1e4).abs() < 1e-9);
        let small = buffer_area_closed(&p, 50.0).unwrap();
        let t2 = (0.5f64).asin();
        let expected = 0.5 * PI * 2500.0 + 50.0 * 100.0 * t2.cos() + t2 * 1e4;
        assert!((small.hole - expected).abs() < 1e-9);
    }

    #[test]
    fn audit_grid_shape() {
        let rows = area_audit(None).unwrap();
        assert_eq!(rows.len(), AUDIT_RADII.len() * AUDIT_THETAS.len() * AUDIT_L1.len());
        assert!(rows.iter().all(|r| r.numeric > 0.0));
    }
}
