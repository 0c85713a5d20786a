use proptest::prelude::*;
use qhexa_core::hexgeom::*;

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn sq(x: &[f64; 4]) -> f64 {
    (0..4).map(|i| ETA[i] * x[i] * x[i]).sum()
}

fn coords() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-2.0f64..2.0)
}

fn accel() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-0.5f64..0.5)
}

fn factor() -> impl Strategy<Value = f64> {
    prop_oneof![0.2f64..3.0, -3.0f64..-0.2]
}

/// Direct evaluation of the hexaspherical coordinates of a point.
fn lift_oracle(x: &[f64; 4], lam: f64) -> [f64; 6] {
    let (s, d) = (-lam, lam * sq(x));
    [(s - d) / 2.0, (s + d) / 2.0, lam * x[0], -lam * x[1], -lam * x[2], -lam * x[3]]
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1.0)
}

fn far_from_horizon(x: &[f64; 4], a: &[f64; 4]) -> bool {
    conformal_denominator(x, a).abs() >= 1e-3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lift_lies_on_quadric_and_projects_back(x in coords(), lam in factor()) {
        let p = SpaceTimePoint::new(x, lam).unwrap();
        let y = lift(&p);
        let expect = lift_oracle(&x, lam);
        for i in 0..6 {
            prop_assert!(rel(y.y[i], expect[i], expect[i].abs()) <= EXACT_TOL);
        }
        let scale = y.max_abs().max(1.0);
        prop_assert!(y.square().abs() <= EXACT_TOL * scale * scale);
        let q = project(&y).unwrap();
        prop_assert!(rel(q.lam, lam, lam.abs()) <= EXACT_TOL);
        for i in 0..4 {
            prop_assert!(rel(q.x[i], x[i], x[i].abs()) <= EXACT_TOL);
        }
    }

    #[test]
    fn rotation_commutes_with_lift(x in coords(), lam in factor(), a in accel()) {
        prop_assume!(far_from_horizon(&x, &a));
        let p = SpaceTimePoint::new(x, lam).unwrap();
        let via_rotation = rotate_hexa(&lift(&p), &a);
        let via_map = lift(&conformal_map(&p, &a).unwrap());
        let scale = via_map.max_abs();
        for i in 0..6 {
            prop_assert!(rel(via_rotation.y[i], via_map.y[i], scale) <= COMPOSED_TOL);
        }
    }

    #[test]
    fn rotation_preserves_products(y1 in prop::array::uniform6(-3.0f64..3.0), y2 in prop::array::uniform6(-3.0f64..3.0), a in accel()) {
        let (u, v) = (HexaPoint { y: y1 }, HexaPoint { y: y2 });
        let (ru, rv) = (rotate_hexa(&u, &a), rotate_hexa(&v, &a));
        let scale = u.max_abs() * v.max_abs();
        prop_assert!(rel(ru.dot(&rv), u.dot(&v), scale * 4.0) <= EXACT_TOL);
        prop_assert!(rel(ru.square(), u.square(), u.max_abs().powi(2) * 4.0) <= EXACT_TOL);
        let d = u.plus() - u.minus();
        prop_assert!(rel(ru.plus() - ru.minus(), d, u.max_abs().max(1.0)) <= EXACT_TOL);
    }

    #[test]
    fn pair_distance_matches_interval(x in coords(), x2 in coords(), l1 in factor(), l2 in factor(), a in accel()) {
        prop_assume!(far_from_horizon(&x, &a) && far_from_horizon(&x2, &a));
        let (p, q) = (SpaceTimePoint::new(x, l1).unwrap(), SpaceTimePoint::new(x2, l2).unwrap());
        let d: [f64; 4] = std::array::from_fn(|i| x[i] - x2[i]);
        let expect = l1 * l2 * sq(&d);
        let got = pair_invariant(&lift(&p), &lift(&q));
        let scale = (l1 * l2).abs() * d.iter().map(|v| v * v).sum::<f64>();
        prop_assert!(rel(got, expect, scale) <= COMPOSED_TOL);
        let moved = pair_invariant(&lift(&conformal_map(&p, &a).unwrap()), &lift(&conformal_map(&q, &a).unwrap()));
        prop_assert!(rel(moved, got, scale.max(got.abs())) <= COMPOSED_TOL);
    }

    #[test]
    fn light_like_pairs_are_conjugate(x in coords(), dir in prop::array::uniform3(-1.0f64..1.0), t in -1.5f64..1.5, l1 in factor(), l2 in factor()) {
        let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        prop_assume!(norm > 1e-3);
        let x2 = [x[0] + t, x[1] + t * dir[0] / norm, x[2] + t * dir[1] / norm, x[3] + t * dir[2] / norm];
        let (y, y2) = (lift(&SpaceTimePoint::new(x, l1).unwrap()), lift(&SpaceTimePoint::new(x2, l2).unwrap()));
        let scale = y.max_abs() * y2.max_abs();
        prop_assert!(y.dot(&y2).abs() <= COMPOSED_TOL * scale.max(1.0));
    }

    #[test]
    fn inverse_acceleration_undoes_map(x in coords(), lam in factor(), a in accel()) {
        prop_assume!(far_from_horizon(&x, &a));
        let p = SpaceTimePoint::new(x, lam).unwrap();
        let q = conformal_map(&p, &a).unwrap();
        let back = conformal_map(&q, &[-a[0], -a[1], -a[2], -a[3]]).unwrap();
        prop_assert!(rel(back.lam, lam, lam.abs()) <= COMPOSED_TOL);
        for i in 0..4 {
            prop_assert!(rel(back.x[i], x[i], x[i].abs()) <= COMPOSED_TOL);
        }
    }

    #[test]
    fn hyperboloid_square_is_scale(omega in coords(), rho_sq in prop_oneof![-2.0f64..-0.05, 0.05f64..2.0], k_mag in 0.1f64..2.0) {
        // positive λ² needs k² and ρ² of opposite signs
        let k_sq = -rho_sq.signum() * k_mag;
        let h = Hyperboloid::new(omega, rho_sq, k_sq).unwrap();
        let y = hyperboloid_lift(&h).unwrap();
        let scale = y.max_abs().powi(2);
        prop_assert!(rel(y.square(), k_sq, scale) <= COMPOSED_TOL);
        prop_assert!(rel(y.square(), -h.lam_sq * rho_sq, scale) <= COMPOSED_TOL);
    }

    #[test]
    fn hyperboloid_map_matches_rotation(omega in coords(), rho_sq in prop_oneof![-2.0f64..-0.05, 0.05f64..2.0], k_mag in 0.1f64..2.0, a in accel()) {
        let k_sq = -rho_sq.signum() * k_mag;
        let h = Hyperboloid::new(omega, rho_sq, k_sq).unwrap();
        let w = sq(&omega) + rho_sq;
        let aw: f64 = (0..4).map(|i| ETA[i] * a[i] * omega[i]).sum();
        let q = 1.0 - 2.0 * aw + sq(&a) * w;
        prop_assume!(q.abs() >= 1e-3);
        let mapped = hyperboloid_lift(&hyperboloid_map(&h, &a).unwrap()).unwrap();
        let rotated = rotate_hexa(&hyperboloid_lift(&h).unwrap(), &a);
        // equal up to the overall sign of the transformed scale
        let s = if q > 0.0 { 1.0 } else { -1.0 };
        let scale = rotated.max_abs();
        for i in 0..6 {
            prop_assert!(rel(s * mapped.y[i], rotated.y[i], scale) <= COMPOSED_TOL);
        }
        prop_assert_eq!(hyperboloid_map(&h, &a).unwrap().k_sq, k_sq);
    }

    #[test]
    fn vanishing_radius_reduces_to_point_map(omega in coords(), a in accel()) {
        prop_assume!(far_from_horizon(&omega, &a));
        let point = conformal_map(&SpaceTimePoint::new(omega, 1.0).unwrap(), &a).unwrap();
        let h = Hyperboloid::new(omega, 1e-14, -1.0).unwrap();
        let m = hyperboloid_map(&h, &a).unwrap();
        for i in 0..4 {
            prop_assert!(rel(m.omega[i], point.x[i], point.x[i].abs()) <= 1e-6);
        }
    }

    #[test]
    fn metric_defect_is_second_order(x in prop::array::uniform4(-0.5f64..0.5), a in prop::array::uniform4(-0.3f64..0.3), dx in prop::array::uniform4(-1.0f64..1.0), lam in 0.5f64..2.0) {
        prop_assume!(far_from_horizon(&x, &a));
        let p = SpaceTimePoint::new(x, lam).unwrap();
        let q = conformal_map(&p, &a).unwrap();
        prop_assume!(q.x.iter().all(|v| v.abs() < 4.0));
        let norm = dx.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(norm > 0.1);
        let step: [f64; 4] = std::array::from_fn(|i| 1e-2 * dx[i] / norm);
        let r = metric_check(&p, &step, &a).unwrap();
        prop_assert!(r.pass, "defects {} {} ratio {:?}", r.defect, r.defect_half, r.ratio);
    }
}

#[test]
fn worked_examples() {
    let y = lift(&SpaceTimePoint::new([1.0, 0.0, 0.0, 0.0], 2.0).unwrap());
    assert_eq!(y.y, [-2.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
    let p = project(&HexaPoint { y: [-2.0, 0.0, 2.0, 0.0, 0.0, 0.0] }).unwrap();
    assert_eq!((p.x, p.lam), ([1.0, 0.0, 0.0, 0.0], 2.0));
    assert_eq!(project(&HexaPoint { y: [1.0, -1.0, 0.0, 0.0, 0.0, 0.0] }), Err(GeomError::PointAtInfinity));

    let q = conformal_map(&SpaceTimePoint::new([1.0, 0.0, 0.0, 0.0], 1.0).unwrap(), &[0.5, 0.0, 0.0, 0.0]).unwrap();
    assert_eq!((q.x, q.lam), ([2.0, 0.0, 0.0, 0.0], 0.25));
    assert!(matches!(
        conformal_map(&SpaceTimePoint::new([2.0, 0.0, 0.0, 0.0], 1.0).unwrap(), &[0.5, 0.0, 0.0, 0.0]),
        Err(GeomError::Horizon(_))
    ));

    let a = [0.1, -0.2, 0.3, 0.05];
    let id = conformal_map(&SpaceTimePoint::new([0.3, 0.1, -0.7, 1.2], 1.5).unwrap(), &[0.0; 4]).unwrap();
    assert_eq!((id.x, id.lam), ([0.3, 0.1, -0.7, 1.2], 1.5));
    let y = HexaPoint { y: [0.3, -1.2, 0.5, 0.7, -0.1, 2.0] };
    assert_eq!(rotate_hexa(&y, &[0.0; 4]), y);
    assert_eq!(pair_invariant(&y, &y), 0.0);

    let (u, v) = (
        lift(&SpaceTimePoint::new([1.0, 1.0, 0.0, 0.0], 1.0).unwrap()),
        lift(&SpaceTimePoint::new([0.0; 4], 1.0).unwrap()),
    );
    assert_eq!(pair_invariant(&u, &v), 0.0);
    assert_eq!(u.dot(&v), 0.0);

    let h = Hyperboloid::new([0.2, 0.1, 0.0, -0.3], -0.5, 2.0).unwrap();
    assert_eq!(hyperboloid_map(&h, &[0.0; 4]).unwrap(), h);
    assert!(matches!(hyperboloid_lift(&Hyperboloid::new([0.0; 4], 1.0, 1.0).unwrap()), Err(GeomError::NonRealScale(_))));
    let _ = a;
}

#[test]
fn metric_examples() {
    let p = SpaceTimePoint::new([0.3, -0.2, 0.5, 0.1], 1.7).unwrap();
    let inertial = metric_check(&p, &[0.01, 0.02, -0.01, 0.03], &[0.0; 4]).unwrap();
    assert!(inertial.defect <= 1e-12 && inertial.pass);
    let null = metric_check(&p, &[0.01, 0.01, 0.0, 0.0], &[0.2, 0.1, 0.0, -0.1]).unwrap();
    assert!(null.defect < 1e-3, "null defect {}", null.defect);
    let accelerated = metric_check(&p, &[0.01, 0.02, -0.01, 0.03], &[0.2, 0.1, 0.0, -0.1]).unwrap();
    let r = accelerated.ratio.unwrap();
    assert!((3.5..=4.5).contains(&r), "ratio {r}");
}
