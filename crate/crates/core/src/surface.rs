//! Multisided GT-Bezier surfaces over the convex hull of a planar knot set.

use std::collections::HashMap;

use crate::basis::{Basis2D, Coefficients, ScaleParams, Weights};
use crate::curve::{combine, GtBezierCurve, Polyline};
use crate::error::{GtbError, Result};
use crate::exec::Exec;
use crate::geometry::{
    add, convex_hull_2d_with, dist, scale, sub, KnotSet1D, KnotSet2D, NormalizationStrategy,
    Point2, Point3, PolygonHull, DEFAULT_TOL,
};

#[derive(Debug, Clone)]
pub struct GtBezierSurface {
    knots: KnotSet2D,
    hull: PolygonHull,
    coeffs: Coefficients,
    weights: Weights,
    control: Vec<Point3>,
    strategy: NormalizationStrategy,
    basis: Basis2D,
}

/// Triangulated sample of a surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<[usize; 3]>,
    pub params: Vec<Point2>,
}

/// Iso-line direction: `U` fixes `u`, `V` fixes `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    U,
    V,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::U => 0,
            Axis::V => 1,
        }
    }
}

impl GtBezierSurface {
    /// Builds the hull with the default tolerance and `strategy`.
    pub fn new(
        knots: KnotSet2D,
        coeffs: Coefficients,
        weights: Weights,
        control: Vec<Point3>,
        strategy: NormalizationStrategy,
    ) -> Result<Self> {
        let hull = convex_hull_2d_with(&knots, DEFAULT_TOL, strategy)?;
        Self::with_hull(knots, hull, coeffs, weights, control, strategy)
    }

    pub fn with_hull(
        knots: KnotSet2D,
        hull: PolygonHull,
        coeffs: Coefficients,
        weights: Weights,
        control: Vec<Point3>,
        strategy: NormalizationStrategy,
    ) -> Result<Self> {
        let n = knots.len();
        weights.expect_len(n)?;
        if control.len() != n {
            return Err(GtbError::LengthMismatch {
                what: "control points",
                expected: n,
                got: control.len(),
            });
        }
        let basis = Basis2D::new(&knots, &hull, &coeffs)?;
        Ok(Self {
            knots,
            hull,
            coeffs,
            weights,
            control,
            strategy,
            basis,
        })
    }

    pub fn with_unit_coefficients(knots: KnotSet2D, weights: Weights, control: Vec<Point3>) -> Result<Self> {
        let n = knots.len();
        Self::new(knots, Coefficients::ones(n), weights, control, NormalizationStrategy::default())
    }

    pub fn knots(&self) -> &KnotSet2D {
        &self.knots
    }

    pub fn hull(&self) -> &PolygonHull {
        &self.hull
    }

    pub fn coeffs(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn control(&self) -> &[Point3] {
        &self.control
    }

    pub fn strategy(&self) -> NormalizationStrategy {
        self.strategy
    }

    pub fn with_weights(&self, weights: Weights) -> Result<Self> {
        Self::with_hull(
            self.knots.clone(),
            self.hull.clone(),
            self.coeffs.clone(),
            weights,
            self.control.clone(),
            self.strategy,
        )
    }

    pub fn with_control(&self, control: Vec<Point3>) -> Result<Self> {
        Self::with_hull(
            self.knots.clone(),
            self.hull.clone(),
            self.coeffs.clone(),
            self.weights.clone(),
            control,
            self.strategy,
        )
    }

    pub fn rational_basis(&self, p: &Point2) -> Result<Vec<f64>> {
        self.basis.eval_rational(&self.weights, p)
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<Point3> {
        self.eval_at(&[u, v])
    }

    pub fn eval_at(&self, p: &Point2) -> Result<Point3> {
        Ok(combine(&self.control, &self.rational_basis(p)?))
    }

    pub fn eval_many(&self, params: &[Point2], exec: Exec) -> Result<Vec<Point3>> {
        exec.map_slice(params, |p| self.eval_at(p))
            .into_iter()
            .collect()
    }

    pub fn sample(&self, grid: usize) -> Result<SampledMesh> {
        self.sample_with(grid, Exec::default())
    }

    pub fn sample_with(&self, grid: usize, exec: Exec) -> Result<SampledMesh> {
        let (params, faces) = sample_polygon(&self.hull.vertices, grid)?;
        let vertices = self.eval_many(&params, exec)?;
        Ok(SampledMesh {
            vertices,
            faces,
            params,
        })
    }

    /// `(knot index, value)` at every hull vertex.
    pub fn corner_values(&self) -> Result<Vec<(usize, Point3)>> {
        self.hull
            .vertex_indices
            .iter()
            .zip(&self.hull.vertices)
            .map(|(&i, v)| Ok((i, self.eval_at(v)?)))
            .collect()
    }

    /// Univariate curve on `[0, sigma]` whose image is the surface boundary
    /// along edge `edge`. Knots are distances from the edge's start vertex.
    pub fn boundary_curve(&self, edge: usize) -> Result<GtBezierCurve<3>> {
        let r = self.hull.num_edges();
        if edge >= r {
            return Err(GtbError::IndexOutOfRange { index: edge, len: r });
        }
        let (start, end) = self.hull.edge_endpoints(edge);
        let sigma = dist(&start, &end);
        let pts = self.knots.points();
        let mut members: Vec<(f64, usize)> = self.hull.edge_members[edge]
            .iter()
            .map(|&j| (dist(&pts[j], &start).min(sigma), j))
            .collect();
        members.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if members.len() < 2 {
            return Err(GtbError::Precondition(format!("edge {edge} has fewer than 2 knots")));
        }
        let c = self.coeffs.as_slice();
        let w = self.weights.as_slice();
        let knots = KnotSet1D::new(members.iter().map(|m| m.0).collect())?;
        let weights = Weights::new(members.iter().map(|&(_, j)| w[j] * c[j]).collect())?;
        let control = members.iter().map(|&(_, j)| self.control[j]).collect();
        let n = members.len();
        GtBezierCurve::new(knots, Coefficients::ones(n), weights, control, ScaleParams::default())
    }

    /// Point on edge `edge` at arc length `t` from its start vertex.
    pub fn edge_point(&self, edge: usize, t: f64) -> Point2 {
        let (start, end) = self.hull.edge_endpoints(edge);
        let sigma = dist(&start, &end);
        if t >= sigma {
            return end;
        }
        add(&start, &scale(&sub(&end, &start), t / sigma))
    }

    /// Samples of the iso-line `axis = value` clipped to the domain.
    pub fn isoparametric_polyline(&self, axis: Axis, value: f64, samples: usize) -> Result<Polyline<3>> {
        if samples < 2 {
            return Err(GtbError::Precondition("need at least 2 samples".into()));
        }
        let a = axis.index();
        let (p, q) = self.hull.clip_axis_line(a, value).ok_or_else(|| {
            GtbError::EmptyIntersection(format!("iso-line {axis:?} = {value} misses the domain"))
        })?;
        let (lo, hi) = (p[1 - a], q[1 - a]);
        let params: Vec<f64> = (0..samples)
            .map(|i| {
                if i + 1 == samples {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (samples - 1) as f64
                }
            })
            .collect();
        let points = params
            .iter()
            .map(|&s| {
                let mut x = [0.0; 2];
                x[a] = value;
                x[1 - a] = s;
                self.eval_at(&x)
            })
            .collect::<Result<Vec<_>>>()?;
        Polyline::new(points, params)
    }

    /// Limit surface when knot `k` coalesces with knot `q`. The merged entry
    /// takes position `q` in the original ordering, with `k` removed.
    pub fn merge_knots(&self, k: usize, q: usize) -> Result<Self> {
        let n = self.knots.len();
        for idx in [k, q] {
            if idx >= n {
                return Err(GtbError::IndexOutOfRange { index: idx, len: n });
            }
        }
        if k == q {
            return Err(GtbError::Precondition("cannot merge a knot into itself".into()));
        }
        if !self.coeffs.all_unit() {
            return Err(GtbError::Precondition("knot merging requires unit coefficients".into()));
        }
        if self.hull.is_vertex(k) {
            return Err(GtbError::Precondition(format!(
                "knot {k} is a hull vertex; merging it changes the domain"
            )));
        }
        let w = self.weights.as_slice();
        let merged_w = w[k] + w[q];
        let merged_b = add(
            &scale(&self.control[k], w[k] / merged_w),
            &scale(&self.control[q], w[q] / merged_w),
        );
        let mut pts = Vec::with_capacity(n - 1);
        let mut weights = Vec::with_capacity(n - 1);
        let mut control = Vec::with_capacity(n - 1);
        for i in (0..n).filter(|&i| i != k) {
            pts.push(self.knots.points()[i]);
            if i == q {
                weights.push(merged_w);
                control.push(merged_b);
            } else {
                weights.push(w[i]);
                control.push(self.control[i]);
            }
        }
        let knots = KnotSet2D::new(pts)?;
        let surface = Self::new(knots, Coefficients::ones(n - 1), Weights::new(weights)?, control, self.strategy)?;
        if surface.hull.vertices != self.hull.vertices {
            return Err(GtbError::Precondition("merge changes the convex hull".into()));
        }
        Ok(surface)
    }

    /// Same data with knot `k` moved to `to`; the hull must not change.
    pub fn with_knot_moved(&self, k: usize, to: Point2) -> Result<Self> {
        let mut pts = self.knots.points().to_vec();
        if k >= pts.len() {
            return Err(GtbError::IndexOutOfRange { index: k, len: pts.len() });
        }
        pts[k] = to;
        let moved = Self::new(
            KnotSet2D::new(pts)?,
            self.coeffs.clone(),
            self.weights.clone(),
            self.control.clone(),
            self.strategy,
        )?;
        if moved.hull.vertices != self.hull.vertices {
            return Err(GtbError::Precondition("move changes the convex hull".into()));
        }
        Ok(moved)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum SampleKey {
    Center,
    Vertex(usize),
    Spoke(usize, usize),
    Edge(usize, usize),
    Inner(usize, usize, usize),
}

/// Triangulates a convex CCW polygon by fanning from its vertex centroid and
/// subdividing each fan triangle `grid - 1` times. Vertices and edge points
/// are exact, and shared points are emitted once.
pub fn sample_polygon(vertices: &[Point2], grid: usize) -> Result<(Vec<Point2>, Vec<[usize; 3]>)> {
    if grid < 2 {
        return Err(GtbError::Precondition(format!("grid must be at least 2, got {grid}")));
    }
    let r = vertices.len();
    if r < 3 {
        return Err(GtbError::DegenerateHull("polygon needs at least 3 vertices".into()));
    }
    let m = grid - 1;
    let center = scale(&vertices.iter().fold([0.0, 0.0], |acc, v| add(&acc, v)), 1.0 / r as f64);
    let spoke = |s: usize, a: usize| add(&center, &scale(&sub(&vertices[s % r], &center), a as f64 / m as f64));
    let edge = |i: usize, b: usize| {
        let (p, q) = (vertices[i], vertices[(i + 1) % r]);
        add(&p, &scale(&sub(&q, &p), b as f64 / m as f64))
    };

    let mut index: HashMap<SampleKey, usize> = HashMap::new();
    let mut params: Vec<Point2> = Vec::new();
    let mut id = |i: usize, a: usize, b: usize| -> usize {
        let key = if a == 0 {
            SampleKey::Center
        } else if a == m && b == 0 {
            SampleKey::Vertex(i)
        } else if a == m && b == m {
            SampleKey::Vertex((i + 1) % r)
        } else if b == 0 {
            SampleKey::Spoke(i, a)
        } else if b == a {
            SampleKey::Spoke((i + 1) % r, a)
        } else if a == m {
            SampleKey::Edge(i, b)
        } else {
            SampleKey::Inner(i, a, b)
        };
        *index.entry(key).or_insert_with(|| {
            let p = match key {
                SampleKey::Center => center,
                SampleKey::Vertex(v) => vertices[v],
                SampleKey::Spoke(s, a) => spoke(s, a),
                SampleKey::Edge(e, b) => edge(e, b),
                SampleKey::Inner(i, a, b) => {
                    let base = spoke(i, a);
                    let step = sub(&vertices[(i + 1) % r], &vertices[i]);
                    add(&base, &scale(&step, b as f64 / m as f64))
                }
            };
            params.push(p);
            params.len() - 1
        })
    };

    let mut faces = Vec::with_capacity(r * m * m);
    for i in 0..r {
        for a in 0..m {
            for b in 0..=a {
                faces.push([id(i, a, b), id(i, a + 1, b), id(i, a + 1, b + 1)]);
                if b < a {
                    faces.push([id(i, a, b), id(i, a + 1, b + 1), id(i, a, b + 1)]);
                }
            }
        }
    }
    Ok((params, faces))
}

/// Points of a `grid x grid` lattice over the hull's bounding box that lie in
/// the hull.
pub fn clipped_lattice(hull: &PolygonHull, grid: usize) -> Vec<Point2> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in &hull.vertices {
        for d in 0..2 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    let step = |d: usize, i: usize| {
        if grid < 2 {
            lo[d]
        } else if i + 1 == grid {
            hi[d]
        } else {
            lo[d] + (hi[d] - lo[d]) * i as f64 / (grid - 1) as f64
        }
    };
    let mut out = Vec::new();
    for j in 0..grid {
        for i in 0..grid {
            let p = [step(0, i), step(1, j)];
            if crate::geometry::contains(hull, &p, hull.tol) {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tilde() -> KnotSet2D {
        KnotSet2D::new(vec![
            [0.0, 2.0],
            [1.0, 2.0],
            [0.0, 6.0 / 5.0],
            [8.0 / 7.0, 8.0 / 7.0],
            [2.0, 1.0],
            [0.0, 0.0],
            [6.0 / 5.0, 0.0],
            [2.0, 0.0],
        ])
        .unwrap()
    }

    fn ex41() -> GtBezierSurface {
        GtBezierSurface::with_unit_coefficients(
            tilde(),
            Weights::new(vec![2.0, 2.0, 5.0, 7.0, 2.0, 3.0, 5.0, 2.0]).unwrap(),
            vec![
                [0.0, 2.0, 0.0],
                [1.0, 2.0, 4.0],
                [0.0, 6.0 / 5.0, 2.0],
                [8.0 / 7.0, 8.0 / 7.0, 5.0],
                [2.0, 1.0, 2.0],
                [0.0, 0.0, 0.0],
                [6.0 / 5.0, 0.0, 2.0],
                [2.0, 0.0, 0.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn corners_are_exact() {
        let sf = ex41();
        assert_eq!(sf.eval(0.0, 0.0).unwrap(), [0.0, 0.0, 0.0]);
        assert_eq!(sf.eval(2.0, 0.0).unwrap(), [2.0, 0.0, 0.0]);
        for (i, p) in sf.corner_values().unwrap() {
            assert_eq!(p, sf.control()[i]);
        }
        assert_eq!(sf.corner_values().unwrap().len(), 5);
    }

    #[test]
    fn matches_high_precision_oracle() {
        let sf = ex41();
        let p = sf.eval(1.0, 1.0).unwrap();
        let want = [0.857_142_857_142_857_142_86, 0.857_142_857_142_857_142_86, 2.392_857_142_857_142_857_1];
        for d in 0..3 {
            assert_relative_eq!(p[d], want[d], max_relative = 1e-12);
        }
        let p = sf.eval(0.7, 0.4).unwrap();
        let want = [0.381_658_601_009_533_621_25, 0.166_911_653_529_092_570_71, 0.806_791_254_535_943_627_59];
        for d in 0..3 {
            assert_relative_eq!(p[d], want[d], max_relative = 1e-12);
        }
    }

    #[test]
    fn outside_domain_rejected() {
        assert!(matches!(ex41().eval(2.0, 2.0), Err(GtbError::OutsideDomain(_))));
    }

    #[test]
    fn polygon_sampling_structure() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let (params, faces) = sample_polygon(&tri, 2).unwrap();
        assert_eq!(params.len(), 4);
        assert_eq!(faces.len(), 3);
        for v in tri {
            assert!(params.contains(&v));
        }
        let (params, faces) = sample_polygon(&tri, 5).unwrap();
        // 1 center + 3 vertices + 3 spokes * 3 + 3 edges * 3 + 3 fans * 3 inner
        assert_eq!(params.len(), 1 + 3 + 9 + 9 + 9);
        assert_eq!(faces.len(), 3 * 16);
        let area: f64 = faces
            .iter()
            .map(|f| crate::geometry::orient(&params[f[0]], &params[f[1]], &params[f[2]]) / 2.0)
            .sum();
        assert_relative_eq!(area, 0.5, epsilon = 1e-14);
        assert!(faces.iter().all(|f| crate::geometry::orient(&params[f[0]], &params[f[1]], &params[f[2]]) > 0.0));
        assert!(sample_polygon(&tri, 1).is_err());
    }

    #[test]
    fn mesh_covers_corners() {
        let sf = ex41();
        let mesh = sf.sample(6).unwrap();
        for v in &sf.hull().vertices {
            assert!(mesh.params.contains(v));
        }
        assert!(mesh.faces.iter().flatten().all(|&i| i < mesh.vertices.len()));
    }

    #[test]
    fn bottom_boundary_curve() {
        let sf = ex41();
        let bottom = (0..sf.hull().num_edges())
            .find(|&i| sf.hull().edge_members[i] == vec![5, 6, 7])
            .unwrap();
        let cv = sf.boundary_curve(bottom).unwrap();
        assert_eq!(cv.knots().knots(), &[0.0, 1.2, 2.0]);
        assert_eq!(cv.weights().as_slice(), &[3.0, 5.0, 2.0]);
        assert!(sf.boundary_curve(9).is_err());
    }

    #[test]
    fn boundary_support_on_edges() {
        let sf = ex41();
        let mut moved = sf.control().to_vec();
        moved[3] = [5.0, -3.0, 40.0];
        let other = sf.with_control(moved).unwrap();
        for e in 0..sf.hull().num_edges() {
            for k in 0..=20 {
                let (a, b) = sf.hull().edge_endpoints(e);
                let t = k as f64 / 20.0;
                let p = add(&a, &scale(&sub(&b, &a), t));
                let d = dist(&sf.eval_at(&p).unwrap(), &other.eval_at(&p).unwrap());
                assert!(d <= 1e-12, "edge {e} t {t}: {d}");
            }
        }
    }

    #[test]
    fn iso_lines() {
        let sf = ex41();
        let line = sf.isoparametric_polyline(Axis::U, 1.0, 11).unwrap();
        assert_eq!(line.params[0], 0.0);
        assert_eq!(*line.params.last().unwrap(), 2.0);
        assert!(sf.isoparametric_polyline(Axis::V, 5.0, 11).is_err());
        let tri = GtBezierSurface::with_unit_coefficients(
            KnotSet2D::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap(),
            Weights::ones(3),
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
        )
        .unwrap();
        let short = tri.isoparametric_polyline(Axis::U, 0.999, 5).unwrap();
        assert!(short.params[4] - short.params[0] < 0.01);
    }

    #[test]
    fn merge_example() {
        let sf = ex41();
        let m = sf.merge_knots(3, 1).unwrap();
        assert_eq!(m.weights().as_slice(), &[2.0, 9.0, 5.0, 2.0, 3.0, 5.0, 2.0]);
        let b = m.control()[1];
        assert_relative_eq!(b[0], 10.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(b[1], 12.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(b[2], 43.0 / 9.0, max_relative = 1e-15);
        assert!(sf.merge_knots(5, 6).is_err());
        assert!(sf.merge_knots(3, 3).is_err());
    }

    #[test]
    fn merge_equal_weights_midpoint() {
        let sf = ex41().with_weights(Weights::ones(8)).unwrap();
        let m = sf.merge_knots(3, 6).unwrap();
        let b = m.control()[5];
        assert_relative_eq!(b[0], (8.0 / 7.0 + 1.2) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(b[2], 3.5, max_relative = 1e-15);
    }

    #[test]
    fn lattice_clip() {
        let sf = ex41();
        let pts = clipped_lattice(sf.hull(), 3);
        // 3x3 lattice on [0,2]^2 minus the (2,2) corner
        assert_eq!(pts.len(), 8);
    }
}
