use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from a reference point to a device drawn uniformly from a disk
/// of radius `r_c` whose center is `r_center` away.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskOffsetLaw {
    pub r_center: f64,
    pub r_c: f64,
}

impl DiskOffsetLaw {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_center >= 0.0 && self.r_center.is_finite()) {
            return Err(Error::invalid("r_center", "must be finite and non-negative"));
        }
        if !(self.r_c >= 0.0 && self.r_c.is_finite()) {
            return Err(Error::invalid("r_c", "must be finite and non-negative"));
        }
        Ok(())
    }

    /// Support of the distance, `(lo, hi)`.
    pub fn support(&self) -> (f64, f64) {
        ((self.r_center - self.r_c).max(0.0), self.r_center + self.r_c)
    }
}

/// Density of the device distance at `r`; zero outside the support.
pub fn pdf_device_distance(law: &DiskOffsetLaw, r: f64) -> f64 {
    let (big_r, rc) = (law.r_center, law.r_c);
    if !(r > 0.0) || rc <= 0.0 || r >= big_r + rc {
        return 0.0;
    }
    if big_r <= rc && r <= rc - big_r {
        return 2.0 * r / (rc * rc);
    }
    if r <= big_r - rc {
        return 0.0;
    }
    let c = ((big_r * big_r + r * r - rc * rc) / (2.0 * big_r * r)).clamp(-1.0, 1.0);
    2.0 * r / (PI * rc * rc) * c.acos()
}

/// Draw one device distance by placing a uniform point in the disk.
pub fn sample_disk_offset<R: Rng + ?Sized>(law: &DiskOffsetLaw, rng: &mut R) -> f64 {
    let rho = law.r_c * rng.gen::<f64>().sqrt();
    let phi = 2.0 * PI * rng.gen::<f64>();
    (law.r_center + rho * phi.cos()).hypot(rho * phi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadSettings};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mass(law: &DiskOffsetLaw) -> f64 {
        let (lo, hi) = law.support();
        let q = QuadSettings::new(1e-10, 1e-10);
        // split at the kink of the inner branch
        let mid = (law.r_c - law.r_center).max(lo);
        let mut total = 0.0;
        if mid > lo {
            total += integrate(|r| pdf_device_distance(law, r), lo, mid, &q).value;
        }
        total + integrate(|r| pdf_device_distance(law, r), mid, hi, &q).value
    }

    #[test]
    fn centered_disk_is_triangular() {
        let law = DiskOffsetLaw { r_center: 0.0, r_c: 50.0 };
        for r in [1.0, 10.0, 25.0, 49.0] {
            assert!((pdf_device_distance(&law, r) - 2.0 * r / 2500.0).abs() < 1e-15);
        }
        assert_eq!(pdf_device_distance(&law, 60.0), 0.0);
    }

    #[test]
    fn integrates_to_one_on_grid() {
        for r_center in [0.0, 10.0, 25.0, 49.0, 50.0, 51.0, 200.0, 2000.0] {
            for r_c in [1.0, 50.0, 300.0] {
                let law = DiskOffsetLaw { r_center, r_c };
                let m = mass(&law);
                assert!((m - 1.0).abs() < 1e-6, "{r_center} {r_c}: {m}");
            }
        }
    }

    #[test]
    fn matches_sampled_offsets() {
        let law = DiskOffsetLaw { r_center: 200.0, r_c: 50.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut samples: Vec<f64> = (0..n).map(|_| sample_disk_offset(&law, &mut rng)).collect();
        samples.sort_by(f64::total_cmp);
        let q = QuadSettings::new(1e-10, 1e-10);
        let mut ks: f64 = 0.0;
        for k in 1..100 {
            let x = 150.0 + k as f64;
            let cdf = integrate(|r| pdf_device_distance(&law, r), 150.0, x, &q).value;
            let emp = samples.partition_point(|s| *s <= x) as f64 / n as f64;
            ks = ks.max((cdf - emp).abs());
        }
        assert!(ks < 0.01, "{ks}");
    }
}
