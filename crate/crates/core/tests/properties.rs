use proptest::prelude::*;

use constant_angle::curve::HCurve;
use constant_angle::diffgeo::fundamental_data;
use constant_angle::mesh::to_poincare;
use constant_angle::minkowski::on_hyperboloid;
use constant_angle::ode;
use constant_angle::surface::{closed_form_lambda, ConstantAngleSurface};
use constant_angle::verify::principal_residual;

fn curve() -> impl Strategy<Value = HCurve> {
    prop_oneof![
        Just(HCurve::Geodesic),
        (0.1..2.0f64).prop_map(|d| HCurve::hypercycle(d).unwrap()),
        Just(HCurve::Horocycle),
        // radius ≥ 0.5 keeps the degeneracy locus u = ρ/cosθ outside |u| < 0.45
        (0.5..2.0f64).prop_map(|r| HCurve::circle(r).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pointwise_identities(theta in 0.05..1.52f64, c in curve(), u in -0.45..0.45f64, v in 0.0..1.0f64) {
        let s = ConstantAngleSurface::new(theta, c.clone(), (-0.45, 0.45), (0.0, 1.0)).unwrap();
        let p = s.immerse(u, v).unwrap();
        prop_assert!(on_hyperboloid(p.h, 1e-9));
        let fd = fundamental_data(&s.immerse_jet(u, v).unwrap()).unwrap();
        let cos = theta.cos();
        prop_assert!((fd.cos_angle() - cos).abs() < 1e-10);
        prop_assert!((fd.k + cos * cos).abs() < 1e-9, "K = {}", fd.k);
        prop_assert!(principal_residual(&fd).unwrap() < 1e-8);
        let lambda = closed_form_lambda(theta, c.curvature(v).unwrap(), u).unwrap();
        let (near, far) = if (fd.k1 - lambda).abs() < (fd.k2 - lambda).abs() { (fd.k1, fd.k2) } else { (fd.k2, fd.k1) };
        prop_assert!((near - lambda).abs() < 1e-9 * lambda.abs().max(1.0), "{near} vs {lambda}");
        prop_assert!(far.abs() < 1e-9);
        let q = to_poincare(&p);
        prop_assert!(q[0] * q[0] + q[1] * q[1] < 1.0);
        prop_assert_eq!(q[2], p.t);
    }

    #[test]
    fn tanh_branch_matches_closed_form(theta in 0.1..1.4f64, frac in -0.95..0.95f64, beta0 in 0.1..3.0f64) {
        let sol = ode::integrate(theta, frac * theta.sin(), beta0, (0.0, 2.0), 1e-3).unwrap();
        prop_assert_eq!(sol.branch, ode::Branch::Tanh);
        prop_assert!(ode::compare_closed_form(&sol).unwrap() < 1e-9);
    }

    #[test]
    fn descriptor_json_roundtrip(theta in 0.05..1.52f64, c in curve(), a in -0.45..0.0f64, b in 0.01..0.45f64) {
        let s = ConstantAngleSurface::new(theta, c, (a, b), (0.0, 1.0)).unwrap();
        let back: ConstantAngleSurface = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}
