//! Generalized toric Bezier curves and surfaces over real knot sets.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod basis;
pub mod coefficients;
pub mod curve;
pub mod degeneration;
pub mod distance;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod image;
pub mod surface;

pub use basis::{Basis1D, Basis2D, Coefficients, ScaleParams, Weights};
pub use curve::{GtBezierCurve, Line2, Polyline};
pub use degeneration::{Lifting, RegularDecomposition};
pub use distance::SampledShape;
pub use error::{GtbError, Result};
pub use exec::Exec;
pub use surface::{Axis, GtBezierSurface, SampledMesh};
pub use geometry::{
    convex_hull_2d, convex_hull_2d_with, hull_1d, EdgeLine, Interval, KnotSet1D, KnotSet2D,
    NormalizationStrategy, Point2, Point3, PolygonHull,
};
