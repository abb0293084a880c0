//! Worked-example fixtures shared by the integration tests.
#![allow(dead_code)]

use gtbezier_core::{GtBezierCurve, GtBezierSurface, KnotSet1D, KnotSet2D, Point2, Point3, Weights};

pub fn sqrt2_knots() -> KnotSet1D {
    let s2 = 2f64.sqrt();
    KnotSet1D::new(vec![0.0, s2 / 4.0, 0.5, s2 / 2.0, 1.0]).unwrap()
}

pub fn sqrt2_weights() -> Weights {
    Weights::new(vec![1.0, 10.0, 20.0, 6.0, 5.0]).unwrap()
}

pub fn sqrt2_control() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0], [0.4, 1.3], [2.0, 2.0], [3.7, 1.5], [4.0, 0.0]]
}

pub fn sqrt2_curve() -> GtBezierCurve<2> {
    GtBezierCurve::with_unit_coefficients(sqrt2_knots(), sqrt2_weights(), sqrt2_control()).unwrap()
}

/// Integer points of the pentagon.
pub fn pentagon_lattice() -> Vec<Point2> {
    vec![[0.0, 2.0], [1.0, 2.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]
}

/// Pentagon knots with the interior and edge points moved.
pub fn pentagon_knots() -> Vec<Point2> {
    vec![
        [0.0, 2.0],
        [1.0, 2.0],
        [0.0, 1.2],
        [8.0 / 7.0, 8.0 / 7.0],
        [2.0, 1.0],
        [0.0, 0.0],
        [1.2, 0.0],
        [2.0, 0.0],
    ]
}

pub fn pentagon_weights() -> Weights {
    Weights::new(vec![2.0, 2.0, 5.0, 7.0, 2.0, 3.0, 5.0, 2.0]).unwrap()
}

pub fn pentagon_control(peak: f64) -> Vec<Point3> {
    vec![
        [0.0, 2.0, 0.0],
        [1.0, 2.0, 4.0],
        [0.0, 1.2, 2.0],
        [8.0 / 7.0, 8.0 / 7.0, peak],
        [2.0, 1.0, 2.0],
        [0.0, 0.0, 0.0],
        [1.2, 0.0, 2.0],
        [2.0, 0.0, 0.0],
    ]
}

pub fn pentagon_surface(peak: f64) -> GtBezierSurface {
    GtBezierSurface::with_unit_coefficients(
        KnotSet2D::new(pentagon_knots()).unwrap(),
        pentagon_weights(),
        pentagon_control(peak),
    )
    .unwrap()
}
