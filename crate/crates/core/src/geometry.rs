//! Knot sets, their convex hulls, and the inward edge-line functions whose
//! values at the knots become basis exponents.

use crate::error::{GtbError, Result};

/// Default tolerance for on-edge and containment predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];

/// `base^exponent` with `0^0 = 1` and `0^p = 0` for `p > 0`.
pub fn pow_conv(base: f64, exponent: f64) -> Result<f64> {
    if base < 0.0 || base.is_nan() {
        return Err(GtbError::NegativeBase(base));
    }
    if base == 0.0 {
        return if exponent == 0.0 {
            Ok(1.0)
        } else if exponent > 0.0 {
            Ok(0.0)
        } else {
            Err(GtbError::Singularity(exponent))
        };
    }
    Ok(base.powf(exponent))
}

/// `exponent * ln(base)` under the same conventions as [`pow_conv`];
/// `-inf` encodes an exact zero. Callers guarantee `base >= 0`, `exponent >= 0`.
#[inline]
pub(crate) fn log_pow(base: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        0.0
    } else if base == 0.0 {
        f64::NEG_INFINITY
    } else {
        exponent * base.ln()
    }
}

// Small fixed-size vector helpers shared by curves and surfaces.

#[inline]
pub fn sub<const D: usize>(a: &[f64; D], b: &[f64; D]) -> [f64; D] {
    std::array::from_fn(|i| a[i] - b[i])
}

#[inline]
pub fn add<const D: usize>(a: &[f64; D], b: &[f64; D]) -> [f64; D] {
    std::array::from_fn(|i| a[i] + b[i])
}

#[inline]
pub fn scale<const D: usize>(a: &[f64; D], s: f64) -> [f64; D] {
    std::array::from_fn(|i| a[i] * s)
}

#[inline]
pub fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm<const D: usize>(a: &[f64; D]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    norm(&sub(a, b))
}

#[inline]
pub fn cross2(a: &Point2, b: &Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Orientation of `c` relative to the directed line `a -> b`.
#[inline]
pub fn orient(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    cross2(&sub(b, a), &sub(c, a))
}

/// Largest pairwise distance of a point set (brute force).
pub fn diameter<const D: usize>(points: &[[f64; D]]) -> f64 {
    let mut d = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(dist(p, q));
        }
    }
    d
}

/// Closed parameter interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(GtbError::InvalidKnots(format!(
                "interval [{lo}, {hi}] is empty"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64, tol: f64) -> bool {
        t >= self.lo - tol && t <= self.hi + tol
    }

    /// `count` uniformly spaced parameters including both ends, the last one
    /// exactly `hi`.
    pub fn uniform(&self, count: usize) -> Vec<f64> {
        match count {
            0 => vec![],
            1 => vec![self.lo],
            _ => (0..count)
                .map(|i| {
                    if i + 1 == count {
                        self.hi
                    } else {
                        self.lo + self.len() * i as f64 / (count - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// Nondecreasing real knots `a_0 <= ... <= a_n` with `a_0 < a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSet1D {
    knots: Vec<f64>,
}

impl KnotSet1D {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(GtbError::InvalidKnots(format!(
                "need at least 2 knots, got {}",
                knots.len()
            )));
        }
        if let Some(i) = knots.iter().position(|k| !k.is_finite()) {
            return Err(GtbError::InvalidKnots(format!("knot {i} is not finite")));
        }
        if let Some(i) = knots.windows(2).position(|w| w[0] > w[1]) {
            return Err(GtbError::InvalidKnots(format!(
                "knots must be nondecreasing: a[{}]={} > a[{}]={}",
                i,
                knots[i],
                i + 1,
                knots[i + 1]
            )));
        }
        if !(knots[0] < knots[knots.len() - 1]) {
            return Err(GtbError::InvalidKnots("a_0 must be < a_n".into()));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.knots[0]
    }

    pub fn last(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.knots.windows(2).all(|w| w[0] < w[1])
    }
}

pub fn hull_1d(ks: &KnotSet1D) -> Interval {
    Interval {
        lo: ks.first(),
        hi: ks.last(),
    }
}

/// Finite set of planar knots whose hull has nonzero area.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSet2D {
    points: Vec<Point2>,
}

impl KnotSet2D {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.len() < 3 {
            return Err(GtbError::InvalidKnots(format!(
                "need at least 3 planar knots, got {}",
                points.len()
            )));
        }
        if let Some(i) = points
            .iter()
            .position(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(GtbError::InvalidKnots(format!("knot {i} is not finite")));
        }
        let ks = Self { points };
        if ks.all_collinear(DEFAULT_TOL) {
            return Err(GtbError::DegenerateHull("all knots are collinear".into()));
        }
        Ok(ks)
    }

    fn all_collinear(&self, tol: f64) -> bool {
        let p0 = self.points[0];
        let (far, d) = self
            .points
            .iter()
            .map(|p| dist(p, &p0))
            .enumerate()
            .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
        if d == 0.0 {
            return true;
        }
        let p1 = self.points[far];
        self.points
            .iter()
            .all(|p| orient(&p0, &p1, p).abs() <= tol * d * d.max(1.0))
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// How an edge line's coefficients were scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    PrimitiveInteger,
    UnitNormal,
    Custom,
}

/// Caller-selectable edge-line scaling. `PrimitiveInteger` falls back to
/// unit normals for edges whose coefficients are not rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizationStrategy {
    #[default]
    PrimitiveInteger,
    UnitNormal,
}

/// Affine function `h(u, v) = xi*u + eta*v + rho`, nonnegative on the hull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeLine {
    pub xi: f64,
    pub eta: f64,
    pub rho: f64,
    pub normalization: Normalization,
}

impl EdgeLine {
    #[inline]
    pub fn eval(&self, p: &Point2) -> f64 {
        self.xi * p[0] + self.eta * p[1] + self.rho
    }

    /// Magnitude of the rounding error `eval` can make at `p`.
    #[inline]
    pub(crate) fn rounding_bound(&self, p: &Point2) -> f64 {
        64.0 * f64::EPSILON * ((self.xi * p[0]).abs() + (self.eta * p[1]).abs() + self.rho.abs())
    }

    pub fn normal_len(&self) -> f64 {
        self.xi.hypot(self.eta)
    }

    /// Euclidean signed distance of `p` to the line (positive inside).
    pub fn signed_distance(&self, p: &Point2) -> f64 {
        self.eval(p) / self.normal_len()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            xi: self.xi * factor,
            eta: self.eta * factor,
            rho: self.rho * factor,
            normalization: Normalization::Custom,
        }
    }
}

/// Edge lines plus a flag recording a primitive-integer request that had to
/// fall back to unit normals on at least one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLines {
    pub lines: Vec<EdgeLine>,
    pub fell_back: bool,
}

/// Convex hull of a planar knot set.
///
/// Vertices run counterclockwise starting from the lowest (then leftmost)
/// vertex. Edge `i` joins `vertices[i]` to `vertices[(i + 1) % r]`; its
/// line is `edges[i]` and `edge_members[i]` lists the knots lying on it.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonHull {
    pub vertex_indices: Vec<usize>,
    pub vertices: Vec<Point2>,
    pub edges: Vec<EdgeLine>,
    pub edge_members: Vec<Vec<usize>>,
    pub normalization_fell_back: bool,
    pub tol: f64,
}

impl PolygonHull {
    pub fn num_edges(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_endpoints(&self, i: usize) -> (Point2, Point2) {
        let r = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % r])
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn is_vertex(&self, knot: usize) -> bool {
        self.vertex_indices.contains(&knot)
    }

    /// Same hull with edge lines rebuilt under another strategy.
    pub fn renormalized(&self, strategy: NormalizationStrategy) -> Self {
        let EdgeLines { lines, fell_back } = edge_lines(self, strategy);
        Self {
            edges: lines,
            normalization_fell_back: fell_back,
            ..self.clone()
        }
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len() as f64;
        let s = self
            .vertices
            .iter()
            .fold([0.0, 0.0], |acc, v| add(&acc, v));
        scale(&s, 1.0 / n)
    }

    /// Clip the infinite line `{p : p[axis] = value}` against the hull.
    pub fn clip_axis_line(&self, axis: usize, value: f64) -> Option<(Point2, Point2)> {
        let other = 1 - axis;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let r = self.vertices.len();
        for i in 0..r {
            let (a, b) = self.edge_endpoints(i);
            let (da, db) = (a[axis] - value, b[axis] - value);
            if da == 0.0 {
                lo = lo.min(a[other]);
                hi = hi.max(a[other]);
            }
            if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
                let s = da / (da - db);
                let x = a[other] + s * (b[other] - a[other]);
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        if lo > hi {
            return None;
        }
        let mut p = [0.0; 2];
        let mut q = [0.0; 2];
        p[axis] = value;
        q[axis] = value;
        p[other] = lo;
        q[other] = hi;
        Some((p, q))
    }
}

/// Shoelace area; positive for counterclockwise vertex order.
pub fn polygon_area(vertices: &[Point2]) -> f64 {
    let r = vertices.len();
    0.5 * (0..r)
        .map(|i| cross2(&vertices[i], &vertices[(i + 1) % r]))
        .sum::<f64>()
}

/// Indices of the strict convex-hull corners of `points`, counterclockwise
/// from the lowest-then-leftmost point. Collinear boundary points are not
/// corners.
pub fn hull_corner_indices(points: &[Point2], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let lo = points[idx[0]];
    let hi = points[idx[idx.len() - 1]];
    let span = dist(&lo, &hi).max(f64::MIN_POSITIVE);
    let eps = tol * span;
    let turn_ok = |hull: &[usize], c: usize| {
        let n = hull.len();
        let a = points[hull[n - 2]];
        let b = points[hull[n - 1]];
        // signed distance of c from line a->b, positive on the left
        let len = dist(&a, &b).max(f64::MIN_POSITIVE);
        orient(&a, &b, &points[c]) / len > eps
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && !turn_ok(&lower, i) {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && !turn_ok(&upper, i) {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // rotate so the lowest-then-leftmost corner comes first
    let start = (0..lower.len())
        .min_by(|&a, &b| {
            let (p, q) = (points[lower[a]], points[lower[b]]);
            p[1].total_cmp(&q[1]).then(p[0].total_cmp(&q[0]))
        })
        .unwrap_or(0);
    lower.rotate_left(start);
    lower
}

pub fn convex_hull_2d(ks: &KnotSet2D, tol: f64) -> Result<PolygonHull> {
    convex_hull_2d_with(ks, tol, NormalizationStrategy::default())
}

pub fn convex_hull_2d_with(
    ks: &KnotSet2D,
    tol: f64,
    strategy: NormalizationStrategy,
) -> Result<PolygonHull> {
    let pts = ks.points();
    let corners = hull_corner_indices(pts, tol);
    if corners.len() < 3 {
        return Err(GtbError::DegenerateHull("all knots are collinear".into()));
    }
    let vertices: Vec<Point2> = corners.iter().map(|&i| pts[i]).collect();
    let mut hull = PolygonHull {
        vertex_indices: corners,
        vertices,
        edges: vec![],
        edge_members: vec![],
        normalization_fell_back: false,
        tol,
    };
    let EdgeLines { lines, fell_back } = edge_lines(&hull, strategy);
    hull.edge_members = lines
        .iter()
        .map(|line| {
            (0..pts.len())
                .filter(|&j| line.signed_distance(&pts[j]).abs() <= tol)
                .collect()
        })
        .collect();
    hull.edges = lines;
    hull.normalization_fell_back = fell_back;
    Ok(hull)
}

const MAX_DENOMINATOR: i64 = 1_000;

/// Best rational approximation `p/q` with `q <= max_den`, accepted only if it
/// reproduces `x` within `tol`.
fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() || x.abs() > 1e9 {
        return None;
    }
    // continued-fraction convergents
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 != 0 && (h1 as f64 / k1 as f64 - x).abs() <= tol {
        Some((h1, k1))
    } else {
        None
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Coprime integer multiple of `(xi, eta, rho)` if all three are rational
/// within tolerance.
fn primitive_integer(xi: f64, eta: f64, rho: f64) -> Option<(f64, f64, f64)> {
    let m = xi.abs().max(eta.abs());
    let raw = [xi / m, eta / m, rho / m];
    let mut fracs = [(0i64, 1i64); 3];
    for (f, &x) in fracs.iter_mut().zip(&raw) {
        *f = rationalize(x, MAX_DENOMINATOR, DEFAULT_TOL * (1.0 + x.abs()))?;
    }
    let mut lcm: i64 = 1;
    for &(_, q) in &fracs {
        lcm = (lcm / gcd(lcm, q)).checked_mul(q)?;
        if lcm > MAX_DENOMINATOR * 1000 {
            return None;
        }
    }
    let ints: Vec<i64> = fracs
        .iter()
        .map(|&(p, q)| p.checked_mul(lcm / q))
        .collect::<Option<_>>()?;
    let g = ints.iter().fold(0, |g, &x| gcd(g, x));
    if g == 0 {
        return None;
    }
    Some((
        (ints[0] / g) as f64,
        (ints[1] / g) as f64,
        (ints[2] / g) as f64,
    ))
}

/// One inward-nonnegative line per hull edge.
pub fn edge_lines(hull: &PolygonHull, strategy: NormalizationStrategy) -> EdgeLines {
    let mut fell_back = false;
    let lines = (0..hull.num_edges())
        .map(|i| {
            let (a, b) = hull.edge_endpoints(i);
            let d = sub(&b, &a);
            // left normal of a counterclockwise edge points inward
            let (xi, eta) = (-d[1], d[0]);
            let rho = -(xi * a[0] + eta * a[1]);
            if strategy == NormalizationStrategy::PrimitiveInteger {
                if let Some((xi, eta, rho)) = primitive_integer(xi, eta, rho) {
                    return EdgeLine {
                        xi,
                        eta,
                        rho,
                        normalization: Normalization::PrimitiveInteger,
                    };
                }
                fell_back = true;
            }
            let n = xi.hypot(eta);
            EdgeLine {
                xi: xi / n,
                eta: eta / n,
                rho: rho / n,
                normalization: Normalization::UnitNormal,
            }
        })
        .collect();
    if fell_back {
        log::warn!("primitive-integer normalization fell back to unit normals");
    }
    EdgeLines { lines, fell_back }
}

/// `h_i(p) >= -tol` for every edge (Euclidean distance tolerance).
pub fn contains(hull: &PolygonHull, p: &Point2, tol: f64) -> bool {
    hull.edges.iter().all(|e| e.signed_distance(p) >= -tol)
}
