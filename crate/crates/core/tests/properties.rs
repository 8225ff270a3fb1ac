use proptest::prelude::*;

use rfgap_core::bochner::{
    polygon_bruteforce, polygon_extrema, q_min_bound, q_value, remark_max_extrema, remark_q_max_bound, Region,
    INSIDE_TOL,
};
use rfgap_core::curvature::{
    conjugate, ricci, sample_weyl, sectional, symmetrize, symmetry_residuals, to_riemann, Frame4, Plane2, Tensor4,
};
use rfgap_core::grassmann::{eigen_oracle, numeric_search};
use rfgap_core::io::{parse_tensor, write_tensor, TensorFile};
use rfgap_core::kahler::{extremize_hol, hol_sectional, kahler_symmetrize, sample_einstein_kahler, UnitaryFrame2};
use rfgap_core::oracle::{b_tensor_reference, relative_gap};
use rfgap_core::rng::SampleStream;

fn stream(seed: u64) -> SampleStream {
    SampleStream::new(seed, 17)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetrized_tensors_are_curvature_tensors(seed in any::<u64>(), bound in 0.1f64..10.0) {
        let raw = Tensor4::random(&mut stream(seed), bound);
        let r = symmetrize(&raw);
        let res = symmetry_residuals(r.tensor());
        prop_assert!(res.max() <= 1e-12 * bound, "{res:?}");
        prop_assert!(symmetrize(r.tensor()).max_abs_diff(&r) <= 1e-14 * bound);
    }

    #[test]
    fn contraction_matches_reference(seed in any::<u64>()) {
        let r = symmetrize(&Tensor4::random(&mut stream(seed), 1.0));
        prop_assert!(relative_gap(&rfgap_core::curvature::b_tensor(&r), &b_tensor_reference(&r)) <= 1e-12);
    }

    #[test]
    fn weyl_tensors_have_dual_planes(seed in any::<u64>(), scale in 0.1f64..5.0) {
        let mut s = stream(seed);
        let r = to_riemann(&sample_weyl(&mut s, scale));
        prop_assert!(ricci(&r).amax() <= 1e-12 * scale);
        for _ in 0..5 {
            let p = Plane2::random(&mut s);
            let gap = sectional(&r, &p) - sectional(&r, &p.orthogonal_complement());
            prop_assert!(gap.abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn extrema_are_frame_independent(seed in any::<u64>()) {
        let mut s = stream(seed);
        let r = to_riemann(&sample_weyl(&mut s, 1.0));
        let a = eigen_oracle(&r, 1e-10).unwrap();
        let b = eigen_oracle(&conjugate(&r, &Frame4::random(&mut s)), 1e-10).unwrap();
        prop_assert!((a.k_max - b.k_max).abs() <= 1e-10);
        prop_assert!((a.k_min - b.k_min).abs() <= 1e-10);
        let n = numeric_search(&r).unwrap();
        prop_assert!((a.k_max - n.k_max).abs() <= 1e-8);
    }

    #[test]
    fn weyl_files_round_trip_exactly(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let f = TensorFile::Weyl(sample_weyl(&mut stream(seed), scale));
        let text = write_tensor(&f);
        let back = parse_tensor(&text, 1e-10 * scale.max(1.0)).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(write_tensor(&back), text);
    }

    #[test]
    fn riemann_files_round_trip_exactly(seed in any::<u64>()) {
        let f = TensorFile::Riemann(symmetrize(&Tensor4::random(&mut stream(seed), 1.0)));
        let back = parse_tensor(&write_tensor(&f), 1e-10).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn kahler_files_round_trip_exactly(seed in any::<u64>(), lambda in -2.0f64..2.0) {
        let f = TensorFile::Kahler(sample_einstein_kahler(seed, 3, 1.0, lambda));
        let back = parse_tensor(&write_tensor(&f), 1e-10).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn holomorphic_curvature_is_unitarily_covariant(seed in any::<u64>()) {
        let mut s = stream(seed);
        let raw: [num_complex::Complex64; 16] =
            std::array::from_fn(|_| num_complex::Complex64::new(s.symmetric(1.0), s.symmetric(1.0)));
        let k = kahler_symmetrize(&raw);
        let u = UnitaryFrame2::random(&mut s);
        let g: [f64; 4] = s.unit_vector();
        let v = [num_complex::Complex64::new(g[0], g[1]), num_complex::Complex64::new(g[2], g[3])];
        let gap = hol_sectional(&k.in_frame(&u), &v) - hol_sectional(&k, &u.apply(&v));
        prop_assert!(gap.abs() <= 1e-12);
    }

    #[test]
    fn ricci_flat_kahler_extrema_bracket_zero(seed in any::<u64>()) {
        let k = sample_einstein_kahler(seed, 0, 1.0, 0.0);
        let rep = extremize_hol(&k).unwrap();
        prop_assert!(rep.h_min <= 1e-12 && rep.h_max >= -1e-12);
        prop_assert!(rep.h_max + 0.5 * rep.h_min >= -1e-8);
        prop_assert!(-2.0 * rep.h_min - rep.h_max >= -1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn enumeration_matches_grid(delta in 0.5f64..=2.0) {
        let exact = polygon_extrema(delta).unwrap();
        let grid = polygon_bruteforce(delta, 501).unwrap();
        prop_assert!((exact.q_min - grid.q_min).abs() <= 5e-3);
        prop_assert!((exact.q_max - grid.q_max).abs() <= 5e-3);
        prop_assert!(grid.q_min >= exact.q_min - 1e-12);
        prop_assert!((exact.q_min - q_min_bound(delta)).abs() <= 1e-12);
        for p in &exact.argmin {
            prop_assert!(Region::MinPoint.contains(delta, *p, INSIDE_TOL));
            prop_assert!((q_value(p[0], p[1]) - exact.q_min).abs() <= 1e-12);
        }
    }

    #[test]
    fn remark_bound_is_attained(delta in 0.5f64..=2.0) {
        let exact = remark_max_extrema(delta).unwrap();
        prop_assert!((exact.q_max - remark_q_max_bound(delta)).abs() <= 1e-12);
    }
}
