//! Sampled Hausdorff distances, plus a refined variant that projects samples
//! onto a parametric curve instead of onto another sample.

use kiddo::immutable::float::kdtree::ImmutableKdTree;
use kiddo::SquaredEuclidean;

use crate::error::{GtbError, Result};
use crate::exec::Exec;
use crate::geometry::dist;

/// Unordered nonempty point sample of a curve or surface image.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledShape<const D: usize> {
    points: Vec<[f64; D]>,
}

impl<const D: usize> SampledShape<D> {
    pub fn new(points: Vec<[f64; D]>) -> Result<Self> {
        if points.is_empty() {
            return Err(GtbError::Precondition("sampled shape must be nonempty".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[[f64; D]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extend(&mut self, other: &SampledShape<D>) {
        self.points.extend_from_slice(&other.points);
    }
}

/// Largest distance from a point of `from` to its nearest point of `to`.
pub fn directed_hausdorff<const D: usize>(from: &[[f64; D]], to: &[[f64; D]], exec: Exec) -> f64 {
    exec.max_slice(from, |p| to.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
}

pub fn hausdorff_distance<const D: usize>(a: &SampledShape<D>, b: &SampledShape<D>) -> f64 {
    hausdorff_distance_with(a, b, Exec::default())
}

/// Symmetric brute-force Hausdorff distance between two samples.
pub fn hausdorff_distance_with<const D: usize>(a: &SampledShape<D>, b: &SampledShape<D>, exec: Exec) -> f64 {
    directed_hausdorff(&a.points, &b.points, exec).max(directed_hausdorff(&b.points, &a.points, exec))
}

/// Exact nearest-neighbour index over a point sample.
pub struct PointIndex<const D: usize> {
    tree: ImmutableKdTree<f64, u32, D, 32>,
}

impl<const D: usize> PointIndex<D> {
    pub fn new(points: &[[f64; D]]) -> Result<Self> {
        if points.is_empty() {
            return Err(GtbError::Precondition("point index needs points".into()));
        }
        if points.len() > u32::MAX as usize {
            return Err(GtbError::TooLarge(points.len()));
        }
        Ok(Self {
            tree: ImmutableKdTree::new_from_slice(points),
        })
    }

    /// Euclidean distance from `p` to the nearest indexed point.
    pub fn nearest_distance(&self, p: &[f64; D]) -> f64 {
        self.tree.nearest_one::<SquaredEuclidean>(p).distance.sqrt()
    }
}

/// Directed Hausdorff distance through a k-d tree; equals
/// [`directed_hausdorff`] exactly.
pub fn directed_hausdorff_indexed<const D: usize>(from: &[[f64; D]], to: &[[f64; D]], exec: Exec) -> Result<f64> {
    let index = PointIndex::new(to)?;
    Ok(exec.max_slice(from, |p| index.nearest_distance(p)))
}

/// Symmetric Hausdorff distance through k-d trees.
pub fn hausdorff_distance_indexed<const D: usize>(a: &SampledShape<D>, b: &SampledShape<D>, exec: Exec) -> f64 {
    let ab = directed_hausdorff_indexed(&a.points, &b.points, exec).expect("nonempty shape");
    let ba = directed_hausdorff_indexed(&b.points, &a.points, exec).expect("nonempty shape");
    ab.max(ba)
}

const GOLDEN_STEPS: usize = 80;

/// Distance from `p` to the parametric curve `f`, given precomputed
/// `samples = f(params)`: nearest sample, then golden-section refinement over
/// the two neighbouring parameter cells.
pub fn distance_to_curve<const D: usize, F>(p: &[f64; D], f: &F, params: &[f64], samples: &[[f64; D]]) -> Result<f64>
where
    F: Fn(f64) -> Result<[f64; D]>,
{
    let (best, mut d_best) = samples
        .iter()
        .enumerate()
        .map(|(i, q)| (i, dist(p, q)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let lo = params[best.saturating_sub(1)];
    let hi = params[(best + 1).min(params.len() - 1)];
    let g = |t: f64| -> Result<f64> { Ok(dist(p, &f(t)?)) };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (g(c)?, g(d)?);
    for _ in 0..GOLDEN_STEPS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d)?;
        }
        if b - a <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    d_best = d_best.min(fc).min(fd);
    Ok(d_best)
}

/// Uniform parameters on `[lo, hi]` with exact end values.
pub fn uniform_params(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| {
            if i + 1 == m {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (m - 1).max(1) as f64
            }
        })
        .collect()
}

/// A parametric curve given by an evaluator and its parameter interval.
pub struct ParamCurve<'a, const D: usize> {
    pub eval: &'a (dyn Fn(f64) -> Result<[f64; D]> + Sync),
    pub lo: f64,
    pub hi: f64,
}

/// Symmetric Hausdorff distance between two parametric curves: `samples`
/// points of each are projected onto the other curve (refined by golden
/// section), so the sampling floor of point-to-point matching disappears.
pub fn refined_curve_hausdorff<const D: usize>(
    a: &ParamCurve<'_, D>,
    b: &ParamCurve<'_, D>,
    samples: usize,
    exec: Exec,
) -> Result<f64> {
    if samples < 2 {
        return Err(GtbError::Precondition("need at least 2 samples".into()));
    }
    let sample = |c: &ParamCurve<'_, D>| -> Result<(Vec<f64>, Vec<[f64; D]>)> {
        let params = uniform_params(c.lo, c.hi, samples);
        let pts = params.iter().map(|&t| (c.eval)(t)).collect::<Result<Vec<_>>>()?;
        Ok((params, pts))
    };
    let (pa, sa) = sample(a)?;
    let (pb, sb) = sample(b)?;
    let directed = |from: &[[f64; D]], onto: &ParamCurve<'_, D>, params: &[f64], pts: &[[f64; D]]| -> Result<f64> {
        let ds = exec.map_slice(from, |p| distance_to_curve(p, &onto.eval, params, pts));
        ds.into_iter().try_fold(0.0f64, |m, d| Ok(m.max(d?)))
    };
    Ok(directed(&sa, b, &pb, &sb)?.max(directed(&sb, a, &pa, &sa)?))
}
