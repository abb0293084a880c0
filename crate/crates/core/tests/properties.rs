mod common;

use gtbezier_core::basis::eval_rational_basis_2d;
use gtbezier_core::degeneration::{regular_decomposition_1d, weight_family};
use gtbezier_core::distance::{hausdorff_distance_indexed, hausdorff_distance_with};
use gtbezier_core::geometry::{contains, dist};
use gtbezier_core::image::{curve_log_coordinate, curve_log_image};
use gtbezier_core::*;
use proptest::prelude::*;

fn knots_1d(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.5, 1..max_n).prop_map(|gaps| {
        let mut a = vec![0.0];
        for g in gaps {
            a.push(a.last().unwrap() + g);
        }
        a
    })
}

fn curve_strategy() -> impl Strategy<Value = GtBezierCurve<2>> {
    knots_1d(7).prop_flat_map(|a| {
        let n = a.len();
        (
            Just(a),
            prop::collection::vec(0.1f64..10.0, n),
            prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), n),
            0.3f64..3.0,
            0.3f64..3.0,
        )
            .prop_map(|(a, w, b, k0, k1)| {
                let n = a.len();
                GtBezierCurve::new(
                    KnotSet1D::new(a).unwrap(),
                    Coefficients::ones(n),
                    Weights::new(w).unwrap(),
                    b.into_iter().map(|(x, y)| [x, y]).collect(),
                    ScaleParams::new(k0, k1).unwrap(),
                )
                .unwrap()
            })
    })
}

/// Planar knot sets with a nondegenerate hull.
fn planar_knots() -> impl Strategy<Value = KnotSet2D> {
    prop::collection::vec((0.0f64..3.0, 0.0f64..3.0), 3..9)
        .prop_filter_map("degenerate hull", |pts| {
            let pts: Vec<Point2> = pts.into_iter().map(|(x, y)| [x, y]).collect();
            let ks = KnotSet2D::new(pts).ok()?;
            let hull = convex_hull_2d(&ks, 1e-9).ok()?;
            (hull.area() > 0.05).then_some(ks)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_basis_is_a_partition_of_unity(cv in curve_strategy(), s in 0.0f64..=1.0) {
        let dom = cv.domain();
        let t = dom.lo + s * dom.len();
        let basis = cv.rational_basis(t).unwrap();
        prop_assert!(basis.iter().all(|&b| b >= 0.0));
        prop_assert!((basis.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn curve_interpolates_end_control_points(cv in curve_strategy()) {
        let dom = cv.domain();
        let b = cv.control();
        prop_assert_eq!(cv.eval(dom.lo).unwrap(), b[0]);
        prop_assert_eq!(cv.eval(dom.hi).unwrap(), b[b.len() - 1]);
    }

    #[test]
    fn curve_stays_in_control_bounding_box(cv in curve_strategy(), s in 0.0f64..=1.0) {
        let dom = cv.domain();
        let p = cv.eval(dom.lo + s * dom.len()).unwrap();
        for d in 0..2 {
            let lo = cv.control().iter().map(|b| b[d]).fold(f64::INFINITY, f64::min);
            let hi = cv.control().iter().map(|b| b[d]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(p[d] >= lo - 1e-12 && p[d] <= hi + 1e-12);
        }
    }

    #[test]
    fn affine_invariance(cv in curve_strategy(), s in 0.0f64..=1.0, m in prop::array::uniform4(-2.0f64..2.0), off in prop::array::uniform2(-3.0f64..3.0)) {
        let map = |p: &[f64; 2]| [m[0] * p[0] + m[1] * p[1] + off[0], m[2] * p[0] + m[3] * p[1] + off[1]];
        let moved = cv.with_control(cv.control().iter().map(map).collect()).unwrap();
        let dom = cv.domain();
        let t = dom.lo + s * dom.len();
        let (a, b) = (map(&cv.eval(t).unwrap()), moved.eval(t).unwrap());
        prop_assert!(dist(&a, &b) <= 1e-11 * (1.0 + a[0].abs() + a[1].abs()));
    }

    #[test]
    fn log_coordinates_reproduce_evaluation(cv in curve_strategy(), s in 0.01f64..0.99) {
        let dom = cv.domain();
        let t = dom.lo + s * dom.len();
        let img = curve_log_image(&cv);
        let p = cv.eval(t).unwrap();
        let q = img.point(&[curve_log_coordinate(&cv, t)]);
        prop_assert!(dist(&p, &q) <= 1e-10 * (1.0 + p[0].abs() + p[1].abs()));
    }

    #[test]
    fn reversal_traverses_backwards(cv in curve_strategy(), s in 0.0f64..=1.0) {
        let dom = cv.domain();
        let t = dom.lo + s * dom.len();
        let rv = cv.reversed().unwrap();
        let (p, q) = (cv.eval(t).unwrap(), rv.eval(dom.lo + dom.hi - t).unwrap());
        prop_assert!(dist(&p, &q) <= 1e-9 * (1.0 + p[0].abs() + p[1].abs()));
    }

    #[test]
    fn weight_family_shift_is_invisible(cv in curve_strategy(), shift in -3.0f64..3.0, x in 1.1f64..50.0, s in 0.0f64..=1.0) {
        let n = cv.knots().len();
        let lam = Lifting::new((0..n).map(|i| (i * 7 % 5) as f64).collect()).unwrap();
        let shifted = Lifting::new(lam.values().iter().map(|l| l + shift).collect()).unwrap();
        let a = cv.with_weights(weight_family(cv.weights(), &lam, x).unwrap()).unwrap();
        let b = cv.with_weights(weight_family(cv.weights(), &shifted, x).unwrap()).unwrap();
        let dom = cv.domain();
        let t = dom.lo + s * dom.len();
        let (p, q) = (a.eval(t).unwrap(), b.eval(t).unwrap());
        prop_assert!(dist(&p, &q) <= 1e-9 * (1.0 + p[0].abs() + p[1].abs()));
    }

    #[test]
    fn decomposition_1d_tiles_the_interval(a in knots_1d(8), seed in prop::collection::vec(-3.0f64..3.0, 8)) {
        let ks = KnotSet1D::new(a.clone()).unwrap();
        let lam = Lifting::new(seed[..a.len()].to_vec()).unwrap();
        let dec = regular_decomposition_1d(&ks, &lam, 1e-9).unwrap();
        let span = a[a.len() - 1] - a[0];
        prop_assert!((dec.total_measure() - span).abs() <= 1e-12 * (1.0 + span));
        prop_assert!(dec.cells.iter().all(|c| c.len() >= 2));
        prop_assert!(!dec.omitted.contains(&0) && !dec.omitted.contains(&(a.len() - 1)));
    }

    #[test]
    fn surface_basis_is_a_partition_of_unity(ks in planar_knots(), bary in prop::collection::vec(0.01f64..1.0, 8)) {
        let hull = convex_hull_2d(&ks, 1e-9).unwrap();
        let pts = ks.points();
        let total: f64 = bary[..pts.len()].iter().sum();
        let p = pts.iter().zip(&bary).fold([0.0, 0.0], |acc, (q, w)| [acc[0] + q[0] * w / total, acc[1] + q[1] * w / total]);
        prop_assume!(contains(&hull, &p, 1e-9));
        let n = pts.len();
        let w = Weights::new((0..n).map(|i| 1.0 + i as f64).collect()).unwrap();
        let basis = eval_rational_basis_2d(&ks, &hull, &Coefficients::ones(n), &w, &p).unwrap();
        prop_assert!(basis.iter().all(|&b| b >= 0.0));
        prop_assert!((basis.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn surface_edges_see_only_edge_knots(ks in planar_knots(), s in 0.0f64..=1.0) {
        let n = ks.len();
        let control: Vec<Point3> = ks.points().iter().map(|p| [p[0], p[1], p[0] - p[1]]).collect();
        let sf = GtBezierSurface::with_unit_coefficients(ks, Weights::ones(n), control).unwrap();
        for e in 0..sf.hull().num_edges() {
            let (a, b) = sf.hull().edge_endpoints(e);
            let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let basis = sf.rational_basis(&p).unwrap();
            for (i, t) in basis.iter().enumerate() {
                if !sf.hull().edge_members[e].contains(&i) {
                    prop_assert_eq!(*t, 0.0);
                }
            }
        }
    }

    #[test]
    fn indexed_hausdorff_equals_brute_force(
        a in prop::collection::vec(prop::array::uniform3(-10.0f64..10.0), 1..200),
        b in prop::collection::vec(prop::array::uniform3(-10.0f64..10.0), 1..200),
    ) {
        let (a, b) = (SampledShape::new(a).unwrap(), SampledShape::new(b).unwrap());
        prop_assert_eq!(hausdorff_distance_indexed(&a, &b, Exec::Sequential), hausdorff_distance_with(&a, &b, Exec::Sequential));
    }

    #[test]
    fn execution_policy_does_not_change_results(cv in curve_strategy()) {
        let seq = cv.sample_with(257, Exec::Sequential).unwrap();
        let par = cv.sample_with(257, Exec::Parallel).unwrap();
        prop_assert_eq!(seq, par);
    }
}
