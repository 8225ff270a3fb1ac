//! Published constants and closed-form values, recomputed from the library.

use rfgap_core::bochner::{
    bisect, certify_min_point, corner_p1_value, corner_p3_value, max_point_margin, min_point_margin,
    polygon_extrema, q_min_bound_branch, remark_max_extrema, threshold_constants, BoundBranch, Verdict,
};
use rfgap_core::curvature::{q_tensor, to_riemann, WeylBlocks};
use rfgap_core::grassmann::{corollary_bounds_check, extremize_sectional};
use rfgap_core::kahler::{extremize_hol, family_f, kahler_thresholds, siu_yang_laplacian, Orientation};
use rfgap_core::Tolerances;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn riemannian_thresholds_round_to_published_digits() {
    let t = threshold_constants();
    assert_eq!(format!("{:.4}", t.delta_star_min), "0.8990");
    assert_eq!(format!("{:.3}", t.c_star_min), "1.112");
    assert_eq!(format!("{:.2}", t.delta_star_max), "1.45");
    assert_eq!(format!("{:.2}", t.c_star_max), "0.69");
    assert_eq!(format!("{:.12}", t.delta_star_min), "0.898979485566");
}

#[test]
fn kahler_thresholds_round_to_published_digits() {
    let k = kahler_thresholds();
    assert_eq!(format!("{:.3}", k.c_min_case), "1.366");
    assert_eq!(format!("{:.2}", k.c_max_case), "0.73");
    assert_eq!(format!("{:.12}", k.c_min_case), "1.366025403784");
}

#[test]
fn thresholds_are_sign_changes_of_the_margins() {
    let t = threshold_constants();
    let root = bisect(min_point_margin, 0.5, 1.0, 1e-13).unwrap();
    assert!(close(root, t.delta_star_min, 1e-9));
    let root = bisect(max_point_margin, 1.0, 2.0, 1e-13).unwrap();
    assert!(close(root, t.delta_star_max, 1e-9));
}

#[test]
fn corner_values_at_delta_one() {
    assert_eq!(corner_p1_value(1.0), 1.0);
    assert!(close(corner_p3_value(1.0), -1.0 / 3.0, 1e-15));
    let e = polygon_extrema(1.0).unwrap();
    assert!(close(e.q_min, -0.5, 1e-15));
}

#[test]
fn corner_branch_below_four_fifths() {
    let (b, branch) = q_min_bound_branch(0.6);
    assert_eq!(branch, BoundBranch::CornerP3);
    assert_eq!(branch.formula(), "(11δ²-14δ+2)/3");
    assert!(close(b, (3.96 - 8.4 + 2.0) / 3.0, 1e-14));
    assert!(close(polygon_extrema(0.6).unwrap().q_min, b, 1e-12));
}

#[test]
fn remark_region_maximum() {
    assert!(close(remark_max_extrema(1.0).unwrap().q_max, 1.0, 1e-15));
    assert!(close(remark_max_extrema(1.5).unwrap().q_max, 0.25, 1e-15));
}

#[test]
fn worked_weyl_example_certificate() {
    let w = WeylBlocks::from_diagonals([1.5, -0.5, -1.0], [0.5, 0.5, -1.0]).unwrap();
    let r = to_riemann(&w);
    assert!(close(q_tensor(&r).get(0, 3, 0, 3), 1.0, 1e-14));
    let c = certify_min_point(&r).unwrap();
    assert!(close(c.delta, 1.0, 1e-12));
    assert!(close(c.x, 0.5, 1e-12) && close(c.z, -0.5, 1e-12));
    assert!(close(c.half_q0303, 0.5, 1e-12));
    assert_eq!(c.sign_conclusion, Verdict::Positive);
}

#[test]
fn saturating_diagonals_close_the_pinching_interval() {
    let upper = corollary_bounds_check(&extremize_sectional(&to_riemann(
        &WeylBlocks::from_diagonals([1.0, -0.5, -0.5], [1.0, -0.5, -0.5]).unwrap(),
    ))
    .unwrap());
    assert!(upper.upper_slack.abs() <= 1e-12);
    let lower = corollary_bounds_check(&extremize_sectional(&to_riemann(
        &WeylBlocks::from_diagonals([0.5, 0.5, -1.0], [0.5, 0.5, -1.0]).unwrap(),
    ))
    .unwrap());
    assert!(lower.lower_slack.abs() <= 1e-12);
}

#[test]
fn kahler_family_closed_forms() {
    let tol = Tolerances::default();
    for n in 0..=6 {
        let b = f64::from(n) * 0.5;
        let k = family_f(b);
        let rep = extremize_hol(&k).unwrap();
        assert!(close(rep.h_min, -1.0, 1e-9), "b = {b}");
        assert!(close(rep.h_max, (1.0 + b) / 2.0, 1e-9), "b = {b}");
        let c = siu_yang_laplacian(&k, &rep, Orientation::Min, &tol).unwrap();
        assert!(close(c.laplacian_value, b * b - 3.0, 1e-9), "b = {b}");
        let m = siu_yang_laplacian(&k, &rep, Orientation::Max, &tol).unwrap();
        assert!(close(m.laplacian_value, -(b * b + 6.0 * b - 3.0) / 2.0, 1e-9), "b = {b}");
    }
    let c = siu_yang_laplacian(&family_f(1.0), &extremize_hol(&family_f(1.0)).unwrap(), Orientation::Min, &tol).unwrap();
    assert!(close(c.laplacian_value, -2.0, 1e-12));
    assert_eq!(c.sign_conclusion, Verdict::Negative);
}
