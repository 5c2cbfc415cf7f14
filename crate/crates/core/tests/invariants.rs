use affsurf::corpus::{random_polygon, random_smooth_body, random_symmetric_polygon};
use affsurf::curvature::{asp, equivariance_exponent, isoperimetric_value};
use affsurf::fit::{john_ellipsoid, loewner_ellipsoid, DEFAULT_TOL};
use affsurf::util::{from2, stream_rng, unit2};
use affsurf::{AffineMap, ConvexBody};
use approx::assert_relative_eq;
use proptest::prelude::*;
use std::f64::consts::PI;

fn smooth(seed: u64) -> ConvexBody {
    random_smooth_body(&mut stream_rng(seed, 0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn affine_equivariance_of_smooth_bodies(seed in any::<u64>(), p in 0.1f64..1.9, spread in 1.0f64..4.0) {
        let body = smooth(seed);
        let map = AffineMap::random_linear(&mut stream_rng(seed, 1), 2, spread);
        let image = body.apply_affine(&map).unwrap();
        let base = asp(&body, p).unwrap().value;
        let mapped = asp(&image, p).unwrap().value;
        let expected = map.det_abs().powf(equivariance_exponent(2, p)) * base;
        assert_relative_eq!(mapped, expected, max_relative = 1e-7);
    }

    #[test]
    fn equivariance_of_closed_form_ellipses(a in 0.2f64..5.0, b in 0.2f64..5.0, angle in 0.0f64..PI, p in -1.9f64..1.9) {
        prop_assume!(p.abs() > 1e-3);
        let disk = ConvexBody::unit_ball(2);
        let (c, s) = (angle.cos(), angle.sin());
        let m = affsurf::util::Matrix::from_row_slice(2, 2, &[a * c, -b * s, a * s, b * c]);
        let map = AffineMap::linear(m).unwrap();
        let image = disk.apply_affine(&map).unwrap();
        let expected = (a * b).powf(equivariance_exponent(2, p)) * 2.0 * PI;
        assert_relative_eq!(asp(&image, p).unwrap().value, expected, max_relative = 1e-10);
    }

    #[test]
    fn p_zero_gives_twice_the_area(seed in any::<u64>()) {
        let body = smooth(seed);
        assert_relative_eq!(asp(&body, 0.0).unwrap().value, 2.0 * body.volume().value, max_relative = 1e-9);
    }

    #[test]
    fn isoperimetric_inequality_on_smooth_bodies(seed in any::<u64>(), p in -1.9f64..1.9) {
        prop_assume!(p.abs() > 1e-3);
        let body = smooth(seed);
        let value = asp(&body, p).unwrap().value;
        let bound = isoperimetric_value(2, p, body.volume().value);
        if p > 0.0 {
            prop_assert!(value <= bound * (1.0 + 1e-9), "{value} > {bound}");
        } else {
            prop_assert!(value >= bound * (1.0 - 1e-9), "{value} < {bound}");
        }
    }

    #[test]
    fn loewner_ellipsoid_contains_polygon(seed in any::<u64>()) {
        let body = random_polygon(&mut stream_rng(seed, 0)).unwrap();
        let fit = loewner_ellipsoid(&body, DEFAULT_TOL).unwrap();
        for v in body.polytope().unwrap().vertices() {
            prop_assert!(fit.ellipsoid.contains(v, 1e-7));
        }
        prop_assert!(fit.containment_ratio <= 2.0 + 1e-6);
    }

    #[test]
    fn john_ellipsoid_lies_in_polygon(seed in any::<u64>()) {
        let body = random_symmetric_polygon(&mut stream_rng(seed, 0)).unwrap();
        let fit = john_ellipsoid(&body, DEFAULT_TOL).unwrap();
        for j in 0..256 {
            let x = fit.ellipsoid.boundary_point(&from2(unit2(j as f64 * PI / 128.0)));
            prop_assert!(body.contains(&x, 1e-6));
        }
        prop_assert!(fit.containment_ratio <= 2f64.sqrt() + 1e-6);
    }

    #[test]
    fn support_and_polar_radial_are_reciprocal(seed in any::<u64>(), theta in 0.0f64..(2.0 * PI)) {
        let body = random_polygon(&mut stream_rng(seed, 0)).unwrap();
        let polar = body.polar().unwrap();
        let u = from2(unit2(theta));
        assert_relative_eq!(body.support(&u) * polar.radial(&u).unwrap(), 1.0, max_relative = 1e-9);
    }
}
