use std::f64::consts::PI;

use mpuav_core::geometry::{buffer_area_numeric, cdf_rb, AreaBackend, PathGeometry};
use proptest::prelude::*;

fn numeric() -> AreaBackend {
    AreaBackend::Numeric { resolution: None }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_a_distribution(l1 in 0.0..2000.0f64, theta in 0.0..PI, l2 in 100.0..3000.0f64, r in 0.0..3000.0f64) {
        let path = PathGeometry::new(l1, theta, l2, 0.0).unwrap();
        let f = cdf_rb(&path, 1e-6, r, numeric()).unwrap().value;
        let g = cdf_rb(&path, 1e-6, r * 1.1 + 1.0, numeric()).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!(g >= f - 1e-12);
    }

    #[test]
    fn area_between_single_and_double_capsule(l1 in 0.0..2000.0f64, theta in 0.0..PI, l2 in 100.0..3000.0f64, r in 1.0..1500.0f64) {
        let path = PathGeometry::new(l1, theta, l2, 0.0).unwrap();
        let area = buffer_area_numeric(&path, r, None).unwrap();
        let capsule = |len: f64| PI * r * r + 2.0 * r * len;
        prop_assert!(area >= capsule(l2.max(l1)) * (1.0 - 1e-3));
        prop_assert!(area <= (capsule(l1) + capsule(l2)) * (1.0 + 1e-3));
    }

    #[test]
    fn hole_only_removes_area(l1 in 100.0..2000.0f64, theta in 0.1..PI, r in 10.0..1500.0f64, hole in 0.0..300.0f64) {
        let open = PathGeometry::new(l1, theta, 1000.0, 0.0).unwrap();
        let holed = PathGeometry::new(l1, theta, 1000.0, hole).unwrap();
        let res = 0.5;
        let a = buffer_area_numeric(&open, r, Some(res)).unwrap();
        let b = buffer_area_numeric(&holed, r, Some(res)).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-9));
        // one scanline of slack around the hole
        prop_assert!(a - b <= PI * hole * hole + 4.0 * hole * res + 1e-6);
    }
}
