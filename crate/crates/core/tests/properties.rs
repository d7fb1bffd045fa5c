mod common;

use std::f64::consts::TAU;
use std::sync::OnceLock;

use common::{c, circle_quad, random_curve};
use concyclic_core::nalgebra::{Rotation3, Vector3};
use concyclic_core::osculating::{find_chords, osculating_circle};
use concyclic_core::sphere::{self, Construction, SphereParams};
use concyclic_core::{Complex64, CylinderPoint, PlaneCurve, TraceConfig, Variety};
use proptest::prelude::*;

fn construction() -> &'static Construction {
    static C: OnceLock<Construction> = OnceLock::new();
    C.get_or_init(|| sphere::build(&SphereParams::default()).unwrap())
}

fn unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0f64..1.0, 0.0f64..TAU).prop_map(|(z, th)| {
        let r = (1.0 - z * z).sqrt();
        Vector3::new(r * th.cos(), r * th.sin(), z)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn winding_is_shift_invariant(seed in 0u64..20, shift in 0.0f64..1.0, x in -0.5f64..0.5, y in -0.5f64..0.5) {
        let curve = random_curve(seed);
        let p = c(x, y);
        prop_assume!(curve.signed_distance(p).abs() > 1e-6);
        prop_assert_eq!(curve.winding_number(p).unwrap(), curve.shifted(shift).winding_number(p).unwrap());
    }

    #[test]
    fn closest_point_beats_samples(seed in 0u64..20, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let curve = random_curve(seed);
        let p = c(x, y);
        let cp = curve.closest_point(p);
        for j in 0..1000 {
            let t = (j as f64 + 0.5) / 1000.0;
            prop_assert!(cp.dist <= (curve.eval(t) - p).norm() + 1e-12);
        }
    }

    #[test]
    fn sphere_parities(p in unit_vector()) {
        let k = construction();
        prop_assert!((k.g.value(&p) - k.g.value(&-p)).abs() <= 1e-12);
        prop_assert!((k.h.value(&p) + k.h.value(&-p)).abs() <= 1e-12);
        prop_assert!((k.f.value(&p) - k.f.value(&-p) - 2.0 * k.h.value(&p).powi(3)).abs() <= 1e-10);
    }

    #[test]
    fn odd_curve_is_odd(theta in 0.0f64..TAU) {
        let l = &construction().l;
        prop_assert!((l.point(theta) + l.point(theta + std::f64::consts::PI)).norm() <= 1e-12);
    }

    #[test]
    fn spread_is_nonnegative_and_z_rotation_invariant_for_z(a in 0.01f64..1.5, b in 0.01f64..1.5, angle in 0.0f64..TAU, p in unit_vector()) {
        let q = sphere::quadruple(a, b).unwrap();
        let axis = concyclic_core::nalgebra::Unit::new_normalize(p);
        let r = Rotation3::from_axis_angle(&axis, angle);
        prop_assert!(sphere::spread(&construction().f, &q, r.matrix()).unwrap() >= 0.0);
        let z = sphere::SphereField::new("z", sphere::Expr::z(), sphere::Parity::Odd);
        let spin = Rotation3::from_axis_angle(&Vector3::z_axis(), angle);
        prop_assert!(sphere::spread(&z, &q, spin.matrix()).unwrap() <= 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn chord_endpoints_lie_on_circles(alpha in 0.3f64..6.0) {
        let e = PlaneCurve::ellipse(2.0, 1.0).unwrap();
        for s in find_chords(&e, alpha).unwrap().solutions {
            let o = osculating_circle(&e, s.a_t).unwrap();
            prop_assert!(((s.b - o.center).norm() - o.radius).abs() <= 1e-12 * o.radius.max(1.0));
            prop_assert!(s.residual <= 1e-8);
        }
    }
}

fn triangle_ratio(angles: [f64; 4]) -> Complex64 {
    circle_quad(angles, 1.0, c(0.0, 0.0)).shape_ratios().unwrap().r
}

#[test]
fn traced_paths_stay_on_variety_with_margin() {
    for (seed, angles) in [(3u64, [0.0, 1.3, 3.0, 4.6]), (5, [0.0, 2.1, 3.3, 5.1])] {
        let curve = random_curve(seed).to_ccw();
        let v = Variety::new(curve, triangle_ratio(angles), TraceConfig::default());
        let paths = v.trace_all().unwrap();
        let tol = v.curve().tolerances().trace;
        for p in &paths {
            for q in &p.samples {
                assert!(v.residual(q.t, q.s).abs() <= tol, "{q:?}");
            }
        }
        let periodic: Vec<_> = paths.iter().filter(|p| p.is_periodic()).collect();
        assert!(!periodic.is_empty());
        for p in periodic {
            assert!(p.s_margin >= 1e-3);
        }
    }
}

#[test]
fn deck_shifted_seed_traces_shifted_path() {
    let curve = PlaneCurve::ellipse(2.0, 1.0).unwrap();
    let v = Variety::new(curve, triangle_ratio([0.0, 1.1, 2.9, 4.4]), TraceConfig::default());
    let paths = v.trace_all().unwrap();
    let p = paths.iter().find(|p| p.is_periodic()).unwrap();
    let seed = p.samples[0];
    let a = v.trace_component(seed).unwrap();
    let b = v.trace_component(CylinderPoint::new(seed.t + 1.0, seed.s)).unwrap();
    let tol = 10.0 * v.curve().tolerances().trace;
    assert_eq!(a.len(), b.len());
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert!((y.t - x.t - 1.0).abs() <= tol && (y.s - x.s).abs() <= tol, "{x:?} {y:?}");
    }
}
