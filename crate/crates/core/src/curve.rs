//! GT-Bezier curves: rational combinations of control points blended by the
//! univariate GT-Bernstein basis.

use crate::basis::{Basis1D, Coefficients, ScaleParams, Weights};
use crate::error::{GtbError, Result};
use crate::exec::Exec;
use crate::geometry::{add, cross2, dot, hull_1d, norm, scale, sub, Interval, KnotSet1D, Point2};

/// Default sample count for crossing counts.
pub const DEFAULT_CROSSING_SAMPLES: usize = 4096;
const BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone)]
pub struct GtBezierCurve<const D: usize> {
    knots: KnotSet1D,
    coeffs: Coefficients,
    weights: Weights,
    control: Vec<[f64; D]>,
    scale: ScaleParams,
    basis: Basis1D,
}

/// Ordered points with matching parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub params: Vec<f64>,
}

impl<const D: usize> Polyline<D> {
    pub fn new(points: Vec<[f64; D]>, params: Vec<f64>) -> Result<Self> {
        if points.len() != params.len() {
            return Err(GtbError::LengthMismatch {
                what: "polyline params",
                expected: points.len(),
                got: params.len(),
            });
        }
        if params.windows(2).any(|w| w[0] > w[1]) {
            return Err(GtbError::Precondition("polyline params must be nondecreasing".into()));
        }
        Ok(Self { points, params })
    }

    /// Polyline with parameters `0, 1, 2, ...`.
    pub fn from_points(points: Vec<[f64; D]>) -> Self {
        let params = (0..points.len()).map(|i| i as f64).collect();
        Self { points, params }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<const D: usize> GtBezierCurve<D> {
    pub fn new(
        knots: KnotSet1D,
        coeffs: Coefficients,
        weights: Weights,
        control: Vec<[f64; D]>,
        scale: ScaleParams,
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
        let basis = Basis1D::new(&knots, &coeffs, scale)?;
        Ok(Self {
            knots,
            coeffs,
            weights,
            control,
            scale,
            basis,
        })
    }

    /// Curve with unit coefficients and `k0 = k1 = 1`.
    pub fn with_unit_coefficients(
        knots: KnotSet1D,
        weights: Weights,
        control: Vec<[f64; D]>,
    ) -> Result<Self> {
        let n = knots.len();
        Self::new(knots, Coefficients::ones(n), weights, control, ScaleParams::default())
    }

    pub fn knots(&self) -> &KnotSet1D {
        &self.knots
    }

    pub fn coeffs(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn control(&self) -> &[[f64; D]] {
        &self.control
    }

    pub fn scale(&self) -> ScaleParams {
        self.scale
    }

    pub fn domain(&self) -> Interval {
        hull_1d(&self.knots)
    }

    pub fn with_weights(&self, weights: Weights) -> Result<Self> {
        Self::new(
            self.knots.clone(),
            self.coeffs.clone(),
            weights,
            self.control.clone(),
            self.scale,
        )
    }

    pub fn with_scale(&self, scale: ScaleParams) -> Result<Self> {
        Self::new(
            self.knots.clone(),
            self.coeffs.clone(),
            self.weights.clone(),
            self.control.clone(),
            scale,
        )
    }

    pub fn with_control(&self, control: Vec<[f64; D]>) -> Result<Self> {
        Self::new(
            self.knots.clone(),
            self.coeffs.clone(),
            self.weights.clone(),
            control,
            self.scale,
        )
    }

    /// The same image traversed backwards: knots `a_0 + a_n - a_i`, with
    /// coefficients, weights, control points and scale swapped end for end.
    pub fn reversed(&self) -> Result<Self> {
        let (a0, an) = (self.knots.first(), self.knots.last());
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        Self::new(
            KnotSet1D::new(self.knots.knots().iter().rev().map(|a| a0 + an - a).collect())?,
            Coefficients::new(rev(self.coeffs.as_slice()))?,
            Weights::new(rev(self.weights.as_slice()))?,
            self.control.iter().rev().copied().collect(),
            ScaleParams::new(self.scale.k1, self.scale.k0)?,
        )
    }

    pub fn rational_basis(&self, t: f64) -> Result<Vec<f64>> {
        self.basis.eval_rational(&self.weights, t)
    }

    pub fn eval(&self, t: f64) -> Result<[f64; D]> {
        let basis = self.rational_basis(t)?;
        Ok(combine(&self.control, &basis))
    }

    /// `P(t) - b_anchor`, summed as `sum_i T_i(t) (b_i - b_anchor)` so it
    /// keeps full relative accuracy when `P(t)` is close to `b_anchor`.
    pub fn eval_from(&self, t: f64, anchor: usize) -> Result<[f64; D]> {
        let origin = *self.control.get(anchor).ok_or(GtbError::IndexOutOfRange {
            index: anchor,
            len: self.control.len(),
        })?;
        let shifted: Vec<[f64; D]> = self.control.iter().map(|b| sub(b, &origin)).collect();
        Ok(combine(&shifted, &self.rational_basis(t)?))
    }

    pub fn sample(&self, m: usize) -> Result<Polyline<D>> {
        self.sample_with(m, Exec::default())
    }

    /// `m` points at uniform parameters including both endpoints.
    pub fn sample_with(&self, m: usize, exec: Exec) -> Result<Polyline<D>> {
        if m < 2 {
            return Err(GtbError::Precondition(format!("need at least 2 samples, got {m}")));
        }
        let params = self.domain().uniform(m);
        let points = exec
            .map_slice(&params, |&t| self.eval(t))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(Polyline { points, params })
    }

    pub fn control_polygon(&self) -> Polyline<D> {
        Polyline {
            points: self.control.clone(),
            params: self.knots.knots().to_vec(),
        }
    }

    /// Tangent vectors at `a_0` and `a_n` from the closed form evaluated with
    /// `k0 = 1/(a_1 - a_0)` and `k1 = 1/(a_n - a_{n-1})`. Knots tied with
    /// `a_1` (resp. `a_{n-1}`) contribute their own first-order terms.
    pub fn endpoint_tangents(&self) -> Result<([f64; D], [f64; D])> {
        let a = self.knots.knots();
        let n = a.len() - 1;
        if !(a[0] < a[1]) || !(a[n - 1] < a[n]) {
            return Err(GtbError::DegenerateTangent(
                "first and last knot must be simple for endpoint tangents".into(),
            ));
        }
        let k0 = 1.0 / (a[1] - a[0]);
        let k1 = 1.0 / (a[n] - a[n - 1]);
        let span = a[n] - a[0];
        let c = self.coeffs.as_slice();
        let w = self.weights.as_slice();
        let b = &self.control;

        let lead0 = k0 * (k1 * span).powf(-k1 / k0) / (c[0] * w[0]);
        let start = (1..=n)
            .take_while(|&i| a[i] == a[1])
            .fold([0.0; D], |acc, i| add(&acc, &scale(&sub(&b[i], &b[0]), c[i] * w[i])));
        let lead1 = k1 * (k0 * span).powf(-k0 / k1) / (c[n] * w[n]);
        let end = (0..n)
            .rev()
            .take_while(|&i| a[i] == a[n - 1])
            .fold([0.0; D], |acc, i| add(&acc, &scale(&sub(&b[n], &b[i]), c[i] * w[i])));
        Ok((scale(&start, lead0), scale(&end, lead1)))
    }

    /// Scale parameters under which [`Self::endpoint_tangents`] are derivatives.
    pub fn tangent_scale(&self) -> Result<ScaleParams> {
        let a = self.knots.knots();
        let n = a.len() - 1;
        ScaleParams::new(1.0 / (a[1] - a[0]), 1.0 / (a[n] - a[n - 1]))
    }

    /// Limit curve when knots `q .. q+k-1` coalesce at knot `into`
    /// (`q <= into <= q+k-1`). Requires unit coefficients.
    pub fn merge_knots(&self, q: usize, k: usize, into: usize) -> Result<Self> {
        let n1 = self.knots.len();
        if k < 2 || q + k > n1 {
            return Err(GtbError::Precondition(format!(
                "merge range q={q}, k={k} invalid for {n1} knots"
            )));
        }
        if !(q..q + k).contains(&into) {
            return Err(GtbError::Precondition(format!(
                "merge target {into} outside {q}..{}",
                q + k - 1
            )));
        }
        if !self.coeffs.all_unit() {
            return Err(GtbError::Precondition("knot merging requires unit coefficients".into()));
        }
        let w = self.weights.as_slice();
        let merged_w: f64 = w[q..q + k].iter().sum();
        let merged_b = (q..q + k).fold([0.0; D], |acc, j| {
            add(&acc, &scale(&self.control[j], w[j] / merged_w))
        });
        let a = self.knots.knots();
        let mut knots = Vec::with_capacity(n1 - k + 1);
        let mut weights = Vec::with_capacity(n1 - k + 1);
        let mut control = Vec::with_capacity(n1 - k + 1);
        for i in 0..n1 {
            if i == into {
                knots.push(a[i]);
                weights.push(merged_w);
                control.push(merged_b);
            } else if !(q..q + k).contains(&i) {
                knots.push(a[i]);
                weights.push(w[i]);
                control.push(self.control[i]);
            }
        }
        let knots = KnotSet1D::new(knots)?;
        let n = knots.len();
        Self::new(knots, Coefficients::ones(n), Weights::new(weights)?, control, self.scale)
    }

    /// Pointwise limit as weight `i` tends to infinity.
    pub fn weight_infinity_limit(&self, i: usize, t: f64) -> Result<[f64; D]> {
        let n1 = self.knots.len();
        if i >= n1 {
            return Err(GtbError::IndexOutOfRange { index: i, len: n1 });
        }
        let dom = self.domain();
        if !dom.contains(t, 1e-12 * dom.len()) {
            return Err(GtbError::OutsideDomain(vec![t]));
        }
        Ok(if t <= dom.lo {
            self.control[0]
        } else if t >= dom.hi {
            self.control[n1 - 1]
        } else {
            self.control[i]
        })
    }
}

/// `sum_i basis[i] * points[i]`.
pub(crate) fn combine<const D: usize>(points: &[[f64; D]], basis: &[f64]) -> [f64; D] {
    let mut out = [0.0; D];
    for (p, &t) in points.iter().zip(basis) {
        if t != 0.0 {
            for d in 0..D {
                out[d] += t * p[d];
            }
        }
    }
    out
}

/// Result of a successful progressive-iteration fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PiaFit<const D: usize> {
    pub control: Vec<[f64; D]>,
    pub iterations: usize,
    /// Max interpolation error before each update, plus the final one.
    pub residuals: Vec<f64>,
}

/// Progressive iteration approximation at the knots: start from the targets
/// and repeatedly add the interpolation residual to the control points.
pub fn pia_fit<const D: usize>(
    ks: &KnotSet1D,
    c: &Coefficients,
    w: &Weights,
    s: ScaleParams,
    targets: &[[f64; D]],
    max_iter: usize,
    tol: f64,
) -> Result<PiaFit<D>> {
    let n = ks.len();
    if targets.len() != n {
        return Err(GtbError::LengthMismatch {
            what: "targets",
            expected: n,
            got: targets.len(),
        });
    }
    if !ks.is_strictly_increasing() {
        return Err(GtbError::Precondition("PIA needs strictly increasing knots as nodes".into()));
    }
    let basis = Basis1D::new(ks, c, s)?;
    w.expect_len(n)?;
    let collocation = ks
        .knots()
        .iter()
        .map(|&t| basis.eval_rational(w, t))
        .collect::<Result<Vec<_>>>()?;
    let mut control = targets.to_vec();
    let mut residuals = Vec::new();
    for iter in 0..=max_iter {
        let deltas: Vec<[f64; D]> = collocation
            .iter()
            .zip(targets)
            .map(|(row, q)| sub(q, &combine(&control, row)))
            .collect();
        let res = deltas.iter().map(norm).fold(0.0, f64::max);
        residuals.push(res);
        if res <= tol {
            return Ok(PiaFit {
                control,
                iterations: iter,
                residuals,
            });
        }
        if iter == max_iter {
            break;
        }
        for (b, d) in control.iter_mut().zip(&deltas) {
            *b = add(b, d);
        }
    }
    Err(GtbError::NoConvergence {
        iterations: max_iter,
        last_residual: *residuals.last().unwrap_or(&f64::NAN),
        history: residuals,
    })
}

/// Straight line through `point` along `dir`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line2 {
    pub point: Point2,
    pub dir: Point2,
}

impl Line2 {
    pub fn new(point: Point2, dir: Point2) -> Result<Self> {
        if norm(&dir) == 0.0 || !dir.iter().all(|x| x.is_finite()) {
            return Err(GtbError::Precondition("line direction must be nonzero".into()));
        }
        Ok(Self { point, dir })
    }

    pub fn signed_distance(&self, p: &Point2) -> f64 {
        cross2(&self.dir, &sub(p, &self.point)) / norm(&self.dir)
    }
}

fn sign_with(x: f64, tol: f64) -> i8 {
    if x > tol {
        1
    } else if x < -tol {
        -1
    } else {
        0
    }
}

/// Number of strict sign changes in `signs` after dropping zeros, plus one
/// for each end that lies on the line.
fn count_changes(signs: &[i8]) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for &s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    if signs.first() == Some(&0) && signs.iter().any(|&s| s != 0) {
        count += 1;
    }
    if signs.last() == Some(&0) && signs.iter().any(|&s| s != 0) {
        count += 1;
    }
    count
}

/// Parameters where a planar curve crosses `line`: strict sign changes of the
/// signed distance over a uniform sample, each refined by bisection, plus
/// curve endpoints lying on the line. Touches without a sign change are not
/// crossings.
pub fn line_crossings_curve(cv: &GtBezierCurve<2>, line: &Line2, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(GtbError::Precondition("need at least 2 samples".into()));
    }
    let Line2 { .. } = Line2::new(line.point, line.dir)?;
    let poly = cv.sample(samples)?;
    let extent = cv
        .control()
        .iter()
        .chain(std::iter::once(&line.point))
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1.0, f64::max);
    let tol = 1e-12 * extent;
    let f = |t: f64| -> Result<f64> { Ok(line.signed_distance(&cv.eval(t)?)) };
    let signs: Vec<i8> = poly
        .points
        .iter()
        .map(|p| sign_with(line.signed_distance(p), tol))
        .collect();
    let mut roots = Vec::new();
    if signs[0] == 0 && signs.iter().any(|&s| s != 0) {
        roots.push(poly.params[0]);
    }
    let mut last: Option<(usize, i8)> = None;
    for (i, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if let Some((j, ls)) = last {
            if ls != s {
                let (mut lo, mut hi) = (poly.params[j], poly.params[i]);
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    let fm = sign_with(f(mid)?, tol);
                    if fm == 0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if fm == ls {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        last = Some((i, s));
    }
    if signs[signs.len() - 1] == 0 && signs.iter().any(|&s| s != 0) {
        roots.push(poly.params[poly.params.len() - 1]);
    }
    Ok(roots)
}

pub fn count_line_crossings_curve(cv: &GtBezierCurve<2>, line: &Line2, samples: usize) -> Result<usize> {
    Ok(line_crossings_curve(cv, line, samples)?.len())
}

/// Crossings of a line with a polyline: strict sign changes of the vertex
/// distances, where on-line vertices take the sign of the next off-line
/// vertex, plus end vertices lying on the line.
pub fn count_line_crossings_polygon(poly: &Polyline<2>, line: &Line2) -> Result<usize> {
    Line2::new(line.point, line.dir)?;
    let signs: Vec<i8> = poly
        .points
        .iter()
        .map(|p| sign_with(line.signed_distance(p), 1e-12))
        .collect();
    Ok(count_changes(&signs))
}

/// Consecutive-edge turns never change sign; near-zero turns are skipped.
pub fn is_convex_polyline(poly: &Polyline<2>) -> Result<bool> {
    if poly.len() < 3 {
        return Err(GtbError::Precondition("convexity needs at least 3 points".into()));
    }
    let mut sign = 0i8;
    for w in poly.points.windows(3) {
        let e1 = sub(&w[1], &w[0]);
        let e2 = sub(&w[2], &w[1]);
        let scale = norm(&e1) * norm(&e2);
        let s = sign_with(cross2(&e1, &e2), 1e-12 * scale);
        if s == 0 {
            continue;
        }
        if sign != 0 && s != sign {
            return Ok(false);
        }
        sign = s;
    }
    Ok(true)
}

/// True when every gap `a_i - a_0` is a rational number with denominator at
/// most `max_den` (within `1e-12`).
pub fn has_rational_gaps(ks: &KnotSet1D, max_den: u64) -> bool {
    let a0 = ks.first();
    ks.knots().iter().all(|&a| {
        let d = a - a0;
        (1..=max_den).any(|q| {
            let p = (d * q as f64).round();
            (p / q as f64 - d).abs() <= 1e-12 * (1.0 + d.abs())
        })
    })
}

/// Dot product helper re-exported for tests of planar projections.
pub fn planar_dot(a: &Point2, b: &Point2) -> f64 {
    dot(a, b)
}
