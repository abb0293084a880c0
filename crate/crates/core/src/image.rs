//! Image sampling in log coordinates.
//!
//! Every edge function is affine in the knot, so
//! `sum_k h_k(a_i) ln h_k(p) = a_i . y(p) + (terms independent of i)` with
//! `y(p) = sum_k n_k ln h_k(p)`, where `n_k` is the gradient of `h_k`. The
//! rational basis is therefore `softmax_i(ln(c_i w_i) + a_i . y)`, and `y`
//! maps the open domain onto all of `R^K`. Sampling `y` instead of `p` keeps
//! transition zones at unit width however extreme the weights become, which
//! uniform parameter grids cannot do.

use std::collections::HashMap;

use log::warn;

use crate::basis::softmax_in_place;
use crate::curve::{combine, GtBezierCurve};
use crate::degeneration::{regular_decomposition_1d, regular_decomposition_2d, Lifting};
use crate::error::{GtbError, Result};
use crate::geometry::{convex_hull_2d, dist, KnotSet1D, KnotSet2D, Point2, DEFAULT_TOL};
use crate::surface::GtBezierSurface;

/// Largest margin past the outermost breakpoint, in units of
/// `1 / separation`: `exp(-40)` is below double resolution relative to 1.
const SATURATION: f64 = 40.0;
/// Default cap on evaluated points per image.
pub const DEFAULT_MAX_POINTS: usize = 2_000_000;

/// `sum_i b_i softmax_i(theta_i + a_i . y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogImage<const K: usize, const D: usize> {
    knots: Vec<[f64; K]>,
    theta: Vec<f64>,
    control: Vec<[f64; D]>,
}

impl<const K: usize, const D: usize> LogImage<K, D> {
    pub fn new(knots: Vec<[f64; K]>, theta: Vec<f64>, control: Vec<[f64; D]>) -> Result<Self> {
        let n = knots.len();
        for (what, got) in [("log weights", theta.len()), ("control points", control.len())] {
            if got != n {
                return Err(GtbError::LengthMismatch { what, expected: n, got });
            }
        }
        if n < 2 {
            return Err(GtbError::InvalidKnots("need at least 2 knots".into()));
        }
        Ok(Self { knots, theta, control })
    }

    pub fn point(&self, y: &[f64; K]) -> [f64; D] {
        let mut logs: Vec<f64> = self
            .knots
            .iter()
            .zip(&self.theta)
            .map(|(a, t)| t + (0..K).map(|k| a[k] * y[k]).sum::<f64>())
            .collect();
        softmax_in_place(&mut logs);
        combine(&self.control, &logs)
    }

    /// Same image with every log weight moved by `delta_i`.
    pub fn shifted(&self, delta: &[f64]) -> Result<Self> {
        if delta.len() != self.theta.len() {
            return Err(GtbError::LengthMismatch {
                what: "log weight shifts",
                expected: self.theta.len(),
                got: delta.len(),
            });
        }
        let theta = self.theta.iter().zip(delta).map(|(t, d)| t + d).collect();
        Ok(Self { theta, ..self.clone() })
    }

    pub fn control(&self) -> &[[f64; D]] {
        &self.control
    }

    /// Margin past the outermost breakpoint beyond which the image moves by
    /// less than `gap / 8`.
    fn margin(&self, gap: f64, separation: f64) -> f64 {
        let spread = crate::geometry::diameter(&self.control).max(gap);
        let decay = (8.0 * spread / gap).ln().max(1.0);
        decay.min(SATURATION) / separation
    }

    /// Smallest positive distance between knots.
    fn separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.knots.iter().enumerate() {
            for b in &self.knots[i + 1..] {
                let d = dist(a, b);
                if d > 0.0 {
                    best = best.min(d);
                }
            }
        }
        best
    }
}

pub fn curve_log_image<const D: usize>(cv: &GtBezierCurve<D>) -> LogImage<1, D> {
    LogImage {
        knots: cv.knots().knots().iter().map(|&a| [a]).collect(),
        theta: log_products(cv.coeffs().as_slice(), cv.weights().as_slice()),
        control: cv.control().to_vec(),
    }
}

pub fn surface_log_image(sf: &GtBezierSurface) -> LogImage<2, 3> {
    LogImage {
        knots: sf.knots().points().to_vec(),
        theta: log_products(sf.coeffs().as_slice(), sf.weights().as_slice()),
        control: sf.control().to_vec(),
    }
}

fn log_products(c: &[f64], w: &[f64]) -> Vec<f64> {
    c.iter().zip(w).map(|(c, w)| c.ln() + w.ln()).collect()
}

/// Log coordinate of an interior curve parameter.
pub fn curve_log_coordinate<const D: usize>(cv: &GtBezierCurve<D>, t: f64) -> f64 {
    let s = cv.scale();
    let (a0, an) = (cv.knots().first(), cv.knots().last());
    s.k0 * (s.k0 * (t - a0)).ln() - s.k1 * (s.k1 * (an - t)).ln()
}

/// Log coordinates of an interior surface parameter.
pub fn surface_log_coordinates(sf: &GtBezierSurface, p: &Point2) -> Point2 {
    sf.hull().edges.iter().fold([0.0, 0.0], |acc, e| {
        let l = e.eval(p).ln();
        [acc[0] + e.xi * l, acc[1] + e.eta * l]
    })
}

/// Points of the 1D image such that consecutive samples are at most `gap`
/// apart (up to `max_points` evaluations), including both end limits.
pub fn sample_log_image_1d<const D: usize>(img: &LogImage<1, D>, gap: f64, max_points: usize) -> Result<Vec<[f64; D]>> {
    check_gap(gap)?;
    let a = KnotSet1D::new(sorted(img.knots.iter().map(|k| k[0]).collect()))?;
    let order = sort_order(img.knots.iter().map(|k| k[0]).collect());
    let theta: Vec<f64> = order.iter().map(|&i| img.theta[i]).collect();
    let dec = regular_decomposition_1d(&a, &Lifting::new(theta)?, DEFAULT_TOL)?;
    let breaks: Vec<f64> = dec.slopes.iter().map(|s| -s[0]).collect();
    let margin = img.margin(gap, img.separation());
    let lo = breaks.iter().copied().fold(f64::INFINITY, f64::min) - margin;
    let hi = breaks.iter().copied().fold(f64::NEG_INFINITY, f64::max) + margin;

    let far = 1e6 * (hi - lo + 1.0);
    let mut out = vec![img.point(&[lo - far])];
    let seeds = 64;
    let mut prev = (lo, img.point(&[lo]));
    out.push(prev.1);
    let mut budget = max_points;
    for s in 1..=seeds {
        let y = lo + (hi - lo) * s as f64 / seeds as f64;
        let next = (y, img.point(&[y]));
        refine_1d(img, prev, next, gap, 60, &mut out, &mut budget);
        prev = next;
    }
    out.push(img.point(&[hi + far]));
    if budget == 0 {
        warn!("1D image sampling hit the {max_points}-point cap");
    }
    Ok(out)
}

fn refine_1d<const D: usize>(
    img: &LogImage<1, D>,
    a: (f64, [f64; D]),
    b: (f64, [f64; D]),
    gap: f64,
    depth: usize,
    out: &mut Vec<[f64; D]>,
    budget: &mut usize,
) {
    if depth > 0 && *budget > 0 && dist(&a.1, &b.1) > gap {
        let m = 0.5 * (a.0 + b.0);
        let mid = (m, img.point(&[m]));
        *budget -= 1;
        refine_1d(img, a, mid, gap, depth - 1, out, budget);
        refine_1d(img, mid, b, gap, depth - 1, out, budget);
    } else {
        out.push(b.1);
    }
}

/// Points of the 2D image at spacing about `gap` (up to `max_points`
/// evaluations).
///
/// The log-coordinate box is split by longest-edge bisection. A triangle on
/// which one knot dominates every other by a fixed log margin is constant to
/// within `gap / 8` and needs only its corners; the margin is linear on the
/// triangle, so checking the corners is exact. Other triangles split until
/// their image is close to affine, then get an anisotropic lattice sized to
/// the image lengths of two edges, so transition strips cost points in
/// proportion to their image rather than their area in `y`.
pub fn sample_log_image_2d<const D: usize>(img: &LogImage<2, D>, gap: f64, max_points: usize) -> Result<Vec<[f64; D]>> {
    check_gap(gap)?;
    let ks = KnotSet2D::new(img.knots.clone())?;
    let hull = convex_hull_2d(&ks, DEFAULT_TOL)?;
    let dec = regular_decomposition_2d(&ks, &hull, &Lifting::new(img.theta.clone())?, DEFAULT_TOL)?;
    let sep = edge_separation(&ks, &hull).min(img.separation());
    let margin = img.margin(gap, sep);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for s in &dec.slopes {
        for k in 0..2 {
            lo[k] = lo[k].min(-s[k]);
            hi[k] = hi[k].max(-s[k]);
        }
    }
    for k in 0..2 {
        lo[k] -= margin;
        hi[k] += margin;
    }
    let spread = crate::geometry::diameter(&img.control).max(gap);
    let dominance = (8.0 * img.knots.len() as f64 * spread / gap).ln().max(0.0);

    let mut sampler = Sampler2D {
        img,
        cache: HashMap::new(),
        ys: Vec::new(),
        pts: Vec::new(),
        extra: Vec::new(),
    };
    let seeds = 8;
    let at = |i: usize, j: usize| {
        [
            lo[0] + (hi[0] - lo[0]) * i as f64 / seeds as f64,
            lo[1] + (hi[1] - lo[1]) * j as f64 / seeds as f64,
        ]
    };
    let mut stack: Vec<([usize; 3], usize)> = Vec::new();
    for i in 0..seeds {
        for j in 0..seeds {
            let c = [
                sampler.id(at(i, j)),
                sampler.id(at(i + 1, j)),
                sampler.id(at(i + 1, j + 1)),
                sampler.id(at(i, j + 1)),
            ];
            stack.push(([c[0], c[1], c[2]], 0));
            stack.push(([c[0], c[2], c[3]], 0));
        }
    }
    let tol = 0.25 * gap;
    let mut capped = false;
    while let Some((tri, depth)) = stack.pop() {
        if sampler.len() >= max_points {
            capped = true;
            break;
        }
        let y = tri.map(|i| sampler.ys[i]);
        if sampler.saturated(&y, dominance) {
            continue;
        }
        let p = tri.map(|i| sampler.pts[i]);
        let edge_len = [dist(&p[0], &p[1]), dist(&p[1], &p[2]), dist(&p[2], &p[0])];
        if edge_len.iter().all(|&l| l <= gap) {
            continue;
        }
        if depth < 60 && !sampler.near_affine(&y, &p, tol) {
            let (i, j) = [(0, 1), (1, 2), (2, 0)]
                .into_iter()
                .max_by(|&(a, b), &(c, d)| {
                    crate::geometry::dist(&y[a], &y[b]).total_cmp(&crate::geometry::dist(&y[c], &y[d]))
                })
                .expect("three edges");
            let k = 3 - i - j;
            let m = sampler.id([0.5 * (y[i][0] + y[j][0]), 0.5 * (y[i][1] + y[j][1])]);
            stack.push(([tri[i], m, tri[k]], depth + 1));
            stack.push(([m, tri[j], tri[k]], depth + 1));
            continue;
        }
        sampler.fill(&y, &p, gap);
    }
    if capped {
        warn!("2D image sampling hit the {max_points}-point cap");
    }
    // limits at infinity along every hull edge direction
    let far = 1e6 * (hi[0] - lo[0] + hi[1] - lo[1] + 1.0);
    let mut pts = sampler.pts;
    pts.extend(sampler.extra);
    for e in &hull.edges {
        let n = (e.xi * e.xi + e.eta * e.eta).sqrt();
        pts.push(img.point(&[-far * e.xi / n, -far * e.eta / n]));
    }
    Ok(pts)
}

struct Sampler2D<'a, const D: usize> {
    img: &'a LogImage<2, D>,
    cache: HashMap<[u64; 2], usize>,
    ys: Vec<[f64; 2]>,
    pts: Vec<[f64; D]>,
    /// Lattice points, not shared between triangles.
    extra: Vec<[f64; D]>,
}

impl<const D: usize> Sampler2D<'_, D> {
    fn id(&mut self, y: [f64; 2]) -> usize {
        let (ys, pts, img) = (&mut self.ys, &mut self.pts, self.img);
        *self.cache.entry([y[0].to_bits(), y[1].to_bits()]).or_insert_with(|| {
            ys.push(y);
            pts.push(img.point(&y));
            pts.len() - 1
        })
    }

    fn len(&self) -> usize {
        self.pts.len() + self.extra.len()
    }

    fn scores(&self, y: &[f64; 2]) -> Vec<f64> {
        self.img
            .knots
            .iter()
            .zip(&self.img.theta)
            .map(|(a, t)| t + a[0] * y[0] + a[1] * y[1])
            .collect()
    }

    /// One knot beats every other by `margin` at all three corners.
    fn saturated(&self, y: &[[f64; 2]; 3], margin: f64) -> bool {
        let s = y.map(|y| self.scores(&y));
        let top = |v: &[f64]| v.iter().enumerate().fold(0, |b, (i, x)| if *x > v[b] { i } else { b });
        let k = top(&s[0]);
        if top(&s[1]) != k || top(&s[2]) != k {
            return false;
        }
        let same = |i: usize| self.img.knots[i] == self.img.knots[k];
        (0..s[0].len()).all(|i| i == k || same(i) || s.iter().all(|v| v[k] - v[i] >= margin))
    }

    fn near_affine(&mut self, y: &[[f64; 2]; 3], p: &[[f64; D]; 3], tol: f64) -> bool {
        let mid = |a: &[f64; 2], b: &[f64; 2]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let avg2 = |a: &[f64; D], b: &[f64; D]| {
            let mut out = [0.0; D];
            for d in 0..D {
                out[d] = 0.5 * (a[d] + b[d]);
            }
            out
        };
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            let m = self.id(mid(&y[i], &y[j]));
            if dist(&self.pts[m], &avg2(&p[i], &p[j])) > tol {
                return false;
            }
        }
        let c = [(y[0][0] + y[1][0] + y[2][0]) / 3.0, (y[0][1] + y[1][1] + y[2][1]) / 3.0];
        let mut flat = [0.0; D];
        for d in 0..D {
            flat[d] = (p[0][d] + p[1][d] + p[2][d]) / 3.0;
        }
        dist(&self.img.point(&c), &flat) <= tol
    }

    /// Lattice on the two edges at the corner that needs the fewest points.
    fn fill(&mut self, y: &[[f64; 2]; 3], p: &[[f64; D]; 3], gap: f64) {
        let steps = |a: usize, b: usize| (dist(&p[a], &p[b]) / gap).ceil().max(1.0) as usize;
        let (v, u, w) = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
            .into_iter()
            .min_by_key(|&(v, u, w)| steps(v, u) * steps(v, w))
            .expect("three corners");
        let (m1, m2) = (steps(v, u), steps(v, w));
        for i in 0..=m1 {
            for j in 0..=m2 {
                let (s, t) = (i as f64 / m1 as f64, j as f64 / m2 as f64);
                if s + t > 1.0 + 1e-12 || (i == 0 && j == 0) || (i == m1 && j == 0) || (i == 0 && j == m2) {
                    continue;
                }
                let q = [
                    y[v][0] + s * (y[u][0] - y[v][0]) + t * (y[w][0] - y[v][0]),
                    y[v][1] + s * (y[u][1] - y[v][1]) + t * (y[w][1] - y[v][1]),
                ];
                self.extra.push(self.img.point(&q));
            }
        }
    }
}

/// Smallest positive distance from a knot to a hull edge line it is not on.
fn edge_separation(ks: &KnotSet2D, hull: &crate::geometry::PolygonHull) -> f64 {
    let mut best = f64::INFINITY;
    for e in &hull.edges {
        for p in ks.points() {
            let d = e.signed_distance(p);
            if d > hull.tol {
                best = best.min(d);
            }
        }
    }
    best
}

fn check_gap(gap: f64) -> Result<()> {
    if gap > 0.0 && gap.is_finite() {
        Ok(())
    } else {
        Err(GtbError::NonPositive {
            what: "sampling gap",
            index: 0,
            value: gap,
        })
    }
}

fn sort_order(v: Vec<f64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]).then(i.cmp(&j)));
    idx
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{ScaleParams, Weights};
    use crate::geometry::KnotSet1D;

    fn ex31() -> GtBezierCurve<2> {
        let s2 = 2f64.sqrt();
        GtBezierCurve::with_unit_coefficients(
            KnotSet1D::new(vec![0.0, s2 / 4.0, 0.5, s2 / 2.0, 1.0]).unwrap(),
            Weights::new(vec![1.0, 10.0, 20.0, 6.0, 5.0]).unwrap(),
            vec![[0.0, 0.0], [0.4, 1.3], [2.0, 2.0], [3.7, 1.5], [4.0, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn curve_identity_for_any_scale() {
        for (k0, k1) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5)] {
            let cv = ex31().with_scale(ScaleParams::new(k0, k1).unwrap()).unwrap();
            let img = curve_log_image(&cv);
            for t in [1e-6, 0.1, 0.37, 0.5, 0.9, 1.0 - 1e-6] {
                let p = cv.eval(t).unwrap();
                let q = img.point(&[curve_log_coordinate(&cv, t)]);
                assert!(dist(&p, &q) <= 1e-12, "{k0} {k1} {t}");
            }
        }
    }

    #[test]
    fn surface_identity() {
        let ks = KnotSet2D::new(vec![
            [0.0, 2.0],
            [1.0, 2.0],
            [0.0, 1.2],
            [8.0 / 7.0, 8.0 / 7.0],
            [2.0, 1.0],
            [0.0, 0.0],
            [1.2, 0.0],
            [2.0, 0.0],
        ])
        .unwrap();
        let control: Vec<[f64; 3]> = ks.points().iter().map(|p| [p[0], p[1], p[0] * p[1]]).collect();
        let sf = GtBezierSurface::with_unit_coefficients(
            ks,
            Weights::new(vec![2.0, 2.0, 5.0, 7.0, 2.0, 3.0, 5.0, 2.0]).unwrap(),
            control,
        )
        .unwrap();
        let img = surface_log_image(&sf);
        for p in [[1.0, 1.0], [0.7, 0.4], [0.01, 1.9], [1.9, 0.05]] {
            let a = sf.eval_at(&p).unwrap();
            let b = img.point(&surface_log_coordinates(&sf, &p));
            assert!(dist(&a, &b) <= 1e-12, "{p:?}");
        }
    }

    #[test]
    fn sampled_images_respect_gap() {
        let cv = ex31();
        let pts = sample_log_image_1d(&curve_log_image(&cv), 0.01, DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(pts[0], [0.0, 0.0]);
        assert_eq!(*pts.last().unwrap(), [4.0, 0.0]);
        assert!(pts.windows(2).all(|w| dist(&w[0], &w[1]) <= 0.01 + 1e-12));
    }

    #[test]
    fn surface_sample_covers_dense_parameter_sample() {
        let ks = KnotSet2D::new(vec![
            [0.0, 2.0],
            [1.0, 2.0],
            [0.0, 1.2],
            [8.0 / 7.0, 8.0 / 7.0],
            [2.0, 1.0],
            [0.0, 0.0],
            [1.2, 0.0],
            [2.0, 0.0],
        ])
        .unwrap();
        let control: Vec<[f64; 3]> = ks.points().iter().map(|p| [p[0], p[1], 3.0 * p[0] * p[1]]).collect();
        let sf = GtBezierSurface::with_unit_coefficients(
            ks,
            Weights::new(vec![2.0, 2.0, 5.0, 7.0, 2.0, 3.0, 5.0, 2.0]).unwrap(),
            control,
        )
        .unwrap();
        let gap = 0.05;
        let lam = [6.0, 2.0, 4.0, 4.0, 1.0, 0.0, 5.0, 3.0];
        for x in [1.0f64, 30.0] {
            let shift: Vec<f64> = lam.iter().map(|l| l * x.ln()).collect();
            let w: Vec<f64> = sf.weights().as_slice().iter().zip(&lam).map(|(w, l)| w * x.powf(*l)).collect();
            let moved = sf.with_weights(Weights::new(w).unwrap()).unwrap();
            let dense = moved.sample(120).unwrap().vertices;
            let pts = sample_log_image_2d(&surface_log_image(&sf).shifted(&shift).unwrap(), gap, DEFAULT_MAX_POINTS).unwrap();
            let d = crate::distance::directed_hausdorff_indexed(&dense, &pts, crate::Exec::Sequential).unwrap();
            assert!(d <= gap, "x = {x}: {d}");
        }
    }
}
