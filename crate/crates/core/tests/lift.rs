mod common;

use common::*;
use engelsteer_core::horizontal::{
    arclength_reparam, c1h_distance, curve_length, horizontality_residual, lift, uniform_grid,
};
use engelsteer_core::io::CurveSpec;
use engelsteer_core::{engel, Controls, Poly, SampledCurve};
use proptest::prelude::*;

fn poly_controls(c1: Vec<f64>, c2: Vec<f64>) -> Controls {
    Controls::polynomial(Poly::new(c1), Poly::new(c2), -0.5, 1.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_lift_matches_rk4(
        c1 in prop::collection::vec(-2.0f64..2.0, 1..4),
        c2 in prop::collection::vec(-2.0f64..2.0, 1..5),
        start in prop::array::uniform4(-1.0f64..1.0),
    ) {
        let c = poly_controls(c1.clone(), c2.clone());
        let g = lift(&c, &start, &uniform_grid(-0.5, 1.5, 9)).unwrap();
        let (p1, p2) = (Poly::new(c1), Poly::new(c2));
        let want = rk4_lift(|t| [p1.eval(t), p2.eval(t)], &start, -0.5, 1.5, 4000);
        prop_assert!(max_abs_diff(&g.end(), &want) < 1e-9, "{:?} vs {:?}", g.end(), want);
    }

    #[test]
    fn sampled_lift_matches_rk4_on_each_cell(
        u1 in prop::collection::vec(-2.0f64..2.0, 6),
        u2 in prop::collection::vec(-2.0f64..2.0, 6),
    ) {
        let times = uniform_grid(0.0, 1.0, 6);
        let c = Controls::sampled(times.clone(), u1.clone(), u2.clone()).unwrap();
        let g = lift(&c, &[0.0; 4], &uniform_grid(0.0, 1.0, 31)).unwrap();
        // piecewise linear control, RK4 per cell so the kinks sit on step boundaries
        let mut x = [0.0; 4];
        for k in 0..5 {
            let (t0, t1) = (times[k], times[k + 1]);
            let lin = |t: f64| {
                let w = (t - t0) / (t1 - t0);
                [u1[k] + w * (u1[k + 1] - u1[k]), u2[k] + w * (u2[k + 1] - u2[k])]
            };
            x = rk4_lift(lin, &x, t0, t1, 400);
        }
        prop_assert!(max_abs_diff(&g.end(), &x) < 1e-10);
    }
}

#[test]
fn lifted_curves_are_horizontal() {
    let c = poly_controls(vec![1.0, -0.3, 0.2], vec![0.5, 1.0, -1.0, 0.4]);
    let g = lift(&c, &[0.1, 0.2, 0.3, 0.4], &uniform_grid(-0.5, 1.5, 2001)).unwrap();
    assert!(horizontality_residual(&g).unwrap() < 1e-5);
}

#[test]
fn straight_line_length_and_box_distance() {
    let c = Controls::constant([0.6, 0.8], 0.0, 2.0);
    assert!((curve_length(&c) - 2.0).abs() < 1e-12);
    let g = lift(&c, &[0.0; 4], &uniform_grid(0.0, 2.0, 5)).unwrap();
    // the horizontal line is a geodesic for the box distance on V1
    assert!((engel::box_dist_second(&g.end(), &g.start()) - 2.0).abs() < 1e-12);
}

#[test]
fn arclength_reparametrization_has_unit_speed() {
    let c = poly_controls(vec![1.0, 1.0], vec![0.0, 0.0, 1.0]);
    let g = lift(&c, &[0.0; 4], &uniform_grid(-0.5, 1.5, 801)).unwrap();
    let (phi, f) = arclength_reparam(&g).unwrap();
    // F integrates the piecewise-linear speed of the samples
    let len = curve_length(&c);
    assert!((f.values.last().unwrap() - len).abs() < 1e-5);
    for u in phi.derivs().unwrap() {
        assert!((u[0].hypot(u[1]) - 1.0).abs() < 1e-12);
    }
    assert!(max_abs_diff(&phi.end(), &g.end()) < 1e-8);
}

#[test]
fn c1h_distance_of_a_curve_to_itself_is_zero() {
    let c = poly_controls(vec![1.0], vec![0.0, 1.0]);
    let g = lift(&c, &[0.0; 4], &uniform_grid(-0.5, 1.5, 101)).unwrap();
    assert_eq!(c1h_distance(&g, &g).unwrap(), 0.0);
    let h = lift(&c, &[0.0; 4], &uniform_grid(-0.5, 1.5, 51)).unwrap();
    assert!(c1h_distance(&g, &h).is_err());
}

#[test]
fn csv_round_trip_is_lossless() {
    let c = poly_controls(vec![1.0, 0.1], vec![0.3, -0.7]);
    let g = lift(&c, &[0.0; 4], &uniform_grid(-0.5, 1.5, 17)).unwrap();
    let mut buf = Vec::new();
    g.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("t,x1,x2,x3,x4,u1,u2\n"));
    let back = SampledCurve::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, g);
}

#[test]
fn curve_json_lifts() {
    let spec: CurveSpec = serde_json::from_str(
        r#"{"controls":{"u1":{"poly":[1.0]},"u2":{"poly":[0.0,1.0]}},"domain":[0.0,1.0],"start":[0,0,0,0]}"#,
    )
    .unwrap();
    let g = lift(&spec.controls().unwrap(), &spec.start(), &uniform_grid(0.0, 1.0, 3)).unwrap();
    let want = rk4_lift(|t| [1.0, t], &[0.0; 4], 0.0, 1.0, 1000);
    assert!(max_abs_diff(&g.end(), &want) < 1e-12);
}
