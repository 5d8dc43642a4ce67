use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use htype::connect::{classify, mu, nu, TargetClass};
use htype::geodesics::{Geodesic, GeodesicSpec};
use htype::numeric::{fd_derivative, polyline_endpoint, sinc_like};
use htype::{Covector, GroupPoint, HTypeAlgebra};

/// (r, m) pairs small enough for fast property runs.
const SHAPES: [(usize, usize); 6] = [(1, 2), (1, 4), (2, 4), (3, 4), (3, 8), (7, 8)];

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (0..SHAPES.len()).prop_map(|i| SHAPES[i])
}

fn vector(len: usize, bound: f64) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-bound..bound, len).prop_map(DVector::from_vec)
}

/// An algebra together with two horizontal vectors and one vertical one.
fn algebra_and_vectors() -> impl Strategy<Value = (HTypeAlgebra, DVector<f64>, DVector<f64>, DVector<f64>)> {
    shape().prop_flat_map(|(r, m)| {
        (Just(HTypeAlgebra::build(r, m).unwrap()), vector(m, 3.0), vector(m, 3.0), vector(r, 3.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric_and_dual_to_j((alg, v, w, z) in algebra_and_vectors()) {
        let vw = alg.bracket(&v, &w).unwrap();
        let wv = alg.bracket(&w, &v).unwrap();
        prop_assert!((&vw + &wv).amax() < 1e-13);
        prop_assert!(alg.bracket(&v, &v).unwrap().amax() < 1e-13);
        let lhs = alg.j_map(&z, &v).unwrap().dot(&w);
        prop_assert!((lhs - z.dot(&vw)).abs() < 1e-12);
    }

    #[test]
    fn unit_j_maps_are_isometries((alg, v, _w, z) in algebra_and_vectors()) {
        prop_assume!(z.norm() > 1e-3);
        let zu = &z / z.norm();
        let jv = alg.j_map(&zu, &v).unwrap();
        prop_assert!((jv.norm() - v.norm()).abs() < 1e-12);
    }

    #[test]
    fn skew_quadratic_forms_vanish((alg, v, _w, z) in algebra_and_vectors()) {
        let omega = alg.omega(&Covector::new(z).unwrap()).unwrap();
        prop_assert!(v.dot(&(&omega * &v)).abs() < 1e-12);
        let c = alg.structure_matrices();
        for k in 0..c.len() {
            prop_assert!(v.dot(&(&c[k] * &v)).abs() < 1e-12);
            for p in 0..c.len() {
                if p != k {
                    let prod = &c[k] * &c[p];
                    prop_assert!((&prod + prod.transpose()).amax() == 0.0);
                    prop_assert!(v.dot(&(&prod * &v)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn omega_squares_to_minus_norm_squared((alg, _v, _w, z) in algebra_and_vectors()) {
        let theta = Covector::new(z).unwrap();
        let omega = alg.omega(&theta).unwrap();
        let m = alg.m();
        let resid = &omega * &omega + DMatrix::identity(m, m) * theta.norm().powi(2);
        prop_assert!(resid.amax() <= 1e-12);
    }

    #[test]
    fn geodesic_invariants((alg, a, _w, theta) in algebra_and_vectors(), t in 0.0..1.5f64) {
        let spec = GeodesicSpec::new(a.clone(), Covector::new(theta.clone()).unwrap());
        let g = Geodesic::new(&alg, spec).unwrap();
        // constant speed
        prop_assert!((g.velocity_x(t).norm() - a.norm()).abs() < 1e-12);
        // z(t) parallel to θ
        let z = g.z(t);
        if theta.norm() > 0.0 {
            let u = &theta / theta.norm();
            prop_assert!((&z - &u * u.dot(&z)).amax() < 1e-12);
        }
        // horizontality ż = ½ [x, ẋ]
        let rule = alg.bracket(&g.x(t), &g.velocity_x(t)).unwrap() * 0.5;
        prop_assert!((rule - g.velocity_z(t)).amax() < 1e-11);
    }

    #[test]
    fn geodesic_second_order_equation((alg, a, _w, theta) in algebra_and_vectors(), t in 0.05..1.0f64) {
        let spec = GeodesicSpec::new(a.clone(), Covector::new(theta).unwrap());
        let g = Geodesic::new(&alg, spec.clone()).unwrap();
        let acc = fd_derivative(|s| g.velocity_x(s), t, 1e-4).unwrap();
        let expected = g.omega() * g.velocity_x(t);
        let w = spec.theta.norm();
        prop_assert!((acc - expected).amax() <= 1e-6 * w * w * a.norm() + 1e-11);
    }

    #[test]
    fn splitting_a_segment_keeps_the_endpoint(
        (alg, p, q, _z) in algebra_and_vectors(),
        lambda in 0.01..0.99f64,
    ) {
        let split = &p + (&q - &p) * lambda;
        let start = DVector::zeros(alg.m());
        let whole = polyline_endpoint(&alg, &[start.clone(), p.clone(), q.clone()]).unwrap();
        let parts = polyline_endpoint(&alg, &[start, p, split, q]).unwrap();
        prop_assert!((whole.z - parts.z).amax() <= 1e-12);
    }

    #[test]
    fn matrix_trig_identity((alg, _v, _w, dir) in algebra_and_vectors(), w in 0.1..(4.0 * PI)) {
        prop_assume!(dir.norm() > 1e-3);
        prop_assume!((w - 2.0 * PI).abs() > 1e-3);
        let theta = Covector::new(&dir / dir.norm() * w).unwrap();
        let omega = alg.omega(&theta).unwrap();
        let eye = DMatrix::identity(alg.m(), alg.m());
        let half = 0.5 * w;
        let inv = &eye * (half * half.cos() / half.sin()) - &omega * 0.5;
        let fwd = &eye * (w.sin() / w) + &omega * ((1.0 - w.cos()) / (w * w));
        prop_assert!((inv * fwd - &eye).amax() <= 1e-12);
    }

    #[test]
    fn nu_mu_identity(w in 0.01..(16.0 * PI)) {
        let half = 0.5 * w;
        let n = (half / PI).round();
        prop_assume!(n == 0.0 || (half - n * PI).abs() > 1e-6);
        let lhs = (2.0 - 2.0 * w.cos()) * (1.0 + mu(half).unwrap());
        let rhs = 2.0 * (1.0 + w - w.cos() - w.sin());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        // the two length expressions agree
        let via_nu = nu(w).unwrap() * (1.0 + mu(half).unwrap());
        let via_speed = w * w / (2.0 - 2.0 * w.cos());
        prop_assert!((via_nu - via_speed).abs() <= 1e-9 * via_speed);
    }

    #[test]
    fn sinc_is_below_one(u in 1e-7..50.0f64) {
        prop_assert!(sinc_like(u) < 1.0);
        prop_assert!(sinc_like(-u) < 1.0);
        prop_assert!(1.0 - sinc_like(u) > 0.0);
    }

    #[test]
    fn exponential_map_round_trip(
        (alg, a, _w, dir) in algebra_and_vectors(),
        w in 0.2..12.0f64,
    ) {
        prop_assume!(dir.norm() > 0.1 && a.norm() > 0.1);
        prop_assume!(((w / (2.0 * PI)).round() * 2.0 * PI - w).abs() > 0.05);
        let theta = Covector::new(&dir / dir.norm() * w).unwrap();
        let spec = GeodesicSpec::new(a.clone(), theta);
        let end = Geodesic::new(&alg, spec.clone()).unwrap().eval(1.0).unwrap().point;
        prop_assume!(TargetClass::of(&end) == TargetClass::Generic);
        let res = classify(&alg, &end).unwrap();
        let found = res.geodesics.iter().any(|g| {
            (g.spec.theta.norm() - w).abs() < 1e-8 && (&g.spec.xdot0 - &a).amax() < 1e-8
        });
        prop_assert!(found, "no match among {:?}", res.geodesics.iter().map(|g| g.spec.theta.norm()).collect::<Vec<_>>());
        prop_assert!(!res.in_cut_locus);
        prop_assert_eq!(&res.minimizer_indices, &vec![0]);
    }

    #[test]
    fn classify_distance_scales_with_dilations(
        x in vector(2, 2.0),
        z in -2.0..2.0f64,
        s in 0.2..3.0f64,
    ) {
        let alg = HTypeAlgebra::build(1, 2).unwrap();
        let p = GroupPoint::new(&alg, x.iter().copied().collect(), vec![z]).unwrap();
        let ps = GroupPoint::new(&alg, (x * s).iter().copied().collect(), vec![z * s * s]).unwrap();
        let d = classify(&alg, &p).unwrap().distance;
        let ds = classify(&alg, &ps).unwrap().distance;
        prop_assert!((ds - s * d).abs() <= 1e-9 * ds.max(1.0));
    }
}
