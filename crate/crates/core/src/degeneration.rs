//! Liftings, regular decompositions and toric degeneration of curves and
//! surfaces.

use std::collections::BTreeSet;

use log::warn;

use crate::basis::{Coefficients, Weights};
use crate::curve::GtBezierCurve;
use crate::distance::{hausdorff_distance_indexed, SampledShape};
use crate::error::{GtbError, Result};
use crate::exec::Exec;
use crate::geometry::{
    diameter, hull_corner_indices, polygon_area, Interval, KnotSet1D, KnotSet2D, Point2, PolygonHull,
    DEFAULT_TOL,
};
use crate::image::{
    curve_log_image, sample_log_image_1d, sample_log_image_2d, surface_log_image, DEFAULT_MAX_POINTS,
};
use crate::surface::GtBezierSurface;

/// One real value per knot.
#[derive(Debug, Clone, PartialEq)]
pub struct Lifting {
    values: Vec<f64>,
}

impl Lifting {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GtbError::InvalidKnots(format!("lifting value {i} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self { values: vec![value; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn expect_len(&self, n: usize) -> Result<()> {
        if self.values.len() != n {
            return Err(GtbError::LengthMismatch {
                what: "lifting",
                expected: n,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// Absolute height tolerance: `tol` times the spread of the values, or
    /// `tol` itself for a constant lifting.
    fn height_tol(&self, tol: f64) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let spread = hi - lo;
        if spread > 0.0 {
            tol * spread
        } else {
            tol
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellDomain {
    Interval(Interval),
    /// Counterclockwise corners.
    Polygon(Vec<Point2>),
}

impl CellDomain {
    /// Length in 1D, area in 2D.
    pub fn measure(&self) -> f64 {
        match self {
            CellDomain::Interval(i) => i.len(),
            CellDomain::Polygon(p) => polygon_area(p),
        }
    }

    pub fn corner_count(&self) -> usize {
        match self {
            CellDomain::Interval(_) => 2,
            CellDomain::Polygon(p) => p.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularDecomposition {
    /// Sorted knot indices per cell.
    pub cells: Vec<Vec<usize>>,
    pub cell_domains: Vec<CellDomain>,
    /// Gradient of each cell's upper facet (one entry in 1D, two in 2D).
    pub slopes: Vec<Vec<f64>>,
    /// Knots on no upper facet.
    pub omitted: Vec<usize>,
}

impl RegularDecomposition {
    fn finish(cells: Vec<Vec<usize>>, cell_domains: Vec<CellDomain>, slopes: Vec<Vec<f64>>, n: usize) -> Self {
        let covered: BTreeSet<usize> = cells.iter().flatten().copied().collect();
        let omitted = (0..n).filter(|i| !covered.contains(i)).collect();
        Self {
            cells,
            cell_domains,
            slopes,
            omitted,
        }
    }

    pub fn total_measure(&self) -> f64 {
        self.cell_domains.iter().map(CellDomain::measure).sum()
    }
}

/// Upper hull of the lifted points `(a_i, lambda_i)` projected back to the
/// line. Knots tied in position keep only their highest lift.
pub fn regular_decomposition_1d(ks: &KnotSet1D, lam: &Lifting, tol: f64) -> Result<RegularDecomposition> {
    let a = ks.knots();
    lam.expect_len(a.len())?;
    let l = lam.values();
    let h = lam.height_tol(tol);

    // highest lift per distinct position, left to right
    let mut tops: Vec<usize> = Vec::new();
    for i in 0..a.len() {
        match tops.last() {
            Some(&j) if a[j] == a[i] => {
                if l[i] > l[j] {
                    *tops.last_mut().unwrap() = i;
                }
            }
            _ => tops.push(i),
        }
    }
    let above = |o: usize, m: usize, p: usize| -> f64 {
        let s = (a[m] - a[o]) / (a[p] - a[o]);
        l[m] - (l[o] + s * (l[p] - l[o]))
    };
    let mut upper: Vec<usize> = Vec::new();
    for &p in &tops {
        while upper.len() >= 2 && above(upper[upper.len() - 2], upper[upper.len() - 1], p) <= h {
            upper.pop();
        }
        upper.push(p);
    }

    let mut cells = Vec::new();
    let mut domains = Vec::new();
    let mut slopes = Vec::new();
    for w in upper.windows(2) {
        let (o, p) = (w[0], w[1]);
        slopes.push(vec![(l[p] - l[o]) / (a[p] - a[o])]);
        let cell: Vec<usize> = (0..a.len())
            .filter(|&i| a[i] >= a[o] && a[i] <= a[p] && above(o, i, p).abs() <= h)
            .collect();
        cells.push(cell);
        domains.push(CellDomain::Interval(Interval::new(a[o], a[p])?));
    }
    Ok(RegularDecomposition::finish(cells, domains, slopes, a.len()))
}

/// Upper facets of the lifted points `(u_i, v_i, lambda_i)` by brute force
/// over point triples, with coplanar points merged into one facet.
pub fn regular_decomposition_2d(
    ks: &KnotSet2D,
    hull: &PolygonHull,
    lam: &Lifting,
    tol: f64,
) -> Result<RegularDecomposition> {
    let pts = ks.points();
    let n = pts.len();
    lam.expect_len(n)?;
    let l = lam.values();
    let h = lam.height_tol(tol);

    let mut found: std::collections::BTreeMap<Vec<usize>, Vec<f64>> = Default::default();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (pi, pj, pk) = (pts[i], pts[j], pts[k]);
                let d1 = [pj[0] - pi[0], pj[1] - pi[1], l[j] - l[i]];
                let d2 = [pk[0] - pi[0], pk[1] - pi[1], l[k] - l[i]];
                let nz = d1[0] * d2[1] - d1[1] * d2[0];
                let scale = (d1[0].abs() + d1[1].abs()) * (d2[0].abs() + d2[1].abs());
                if nz.abs() <= 1e-12 * scale {
                    continue;
                }
                let nx = d1[1] * d2[2] - d1[2] * d2[1];
                let ny = d1[2] * d2[0] - d1[0] * d2[2];
                let height = |p: &Point2| l[i] - (nx * (p[0] - pi[0]) + ny * (p[1] - pi[1])) / nz;
                let excess: Vec<f64> = (0..n).map(|m| l[m] - height(&pts[m])).collect();
                if excess.iter().any(|&e| e > h) {
                    continue;
                }
                let cell: Vec<usize> = (0..n).filter(|&m| excess[m].abs() <= h).collect();
                found.entry(cell).or_insert_with(|| vec![-nx / nz, -ny / nz]);
            }
        }
    }
    if found.is_empty() {
        return Err(GtbError::DegenerateHull("no upper facet found".into()));
    }
    // near-coplanar triples can yield nested member sets; keep maximal ones
    let all: Vec<(Vec<usize>, Vec<f64>)> = found.into_iter().collect();
    let (cells, slopes): (Vec<Vec<usize>>, Vec<Vec<f64>>) = all
        .iter()
        .filter(|(c, _)| {
            !all.iter()
                .any(|(d, _)| d.len() > c.len() && c.iter().all(|x| d.binary_search(x).is_ok()))
        })
        .cloned()
        .unzip();
    let domains: Vec<CellDomain> = cells
        .iter()
        .map(|c| {
            let cp: Vec<Point2> = c.iter().map(|&m| pts[m]).collect();
            let corners = hull_corner_indices(&cp, hull.tol);
            CellDomain::Polygon(corners.iter().map(|&m| cp[m]).collect())
        })
        .collect();
    let dec = RegularDecomposition::finish(cells, domains, slopes, n);
    let covered = dec.total_measure();
    if (covered - hull.area()).abs() > 1e-9 * hull.area().max(1.0) {
        warn!("cell areas sum to {covered}, domain area is {}", hull.area());
    }
    Ok(dec)
}

/// `x^lambda_i * w_i`, computed as `exp(lambda_i ln x + ln w_i)`.
pub fn weight_family(w: &Weights, lam: &Lifting, x: f64) -> Result<Weights> {
    let logs = log_weight_family(w, lam, x)?;
    if x == 1.0 {
        return Ok(w.clone());
    }
    let values: Vec<f64> = logs.iter().map(|v| v.exp()).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite() || *v <= 0.0) {
        return Err(GtbError::NonPositive {
            what: "weight family (overflow or underflow)",
            index: i,
            value: values[i],
        });
    }
    Weights::new(values)
}

pub fn log_weight_family(w: &Weights, lam: &Lifting, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(GtbError::NonPositive {
            what: "family parameter x",
            index: 0,
            value: x,
        });
    }
    lam.expect_len(w.len())?;
    let lx = x.ln();
    Ok(w.as_slice()
        .iter()
        .zip(lam.values())
        .map(|(wi, li)| li * lx + wi.ln())
        .collect())
}

/// The weight family divided by its largest member. The rational basis is
/// unchanged by the common factor; entries below the smallest normal double
/// are raised to it.
pub fn normalized_weight_family(w: &Weights, lam: &Lifting, x: f64) -> Result<Weights> {
    let logs = log_weight_family(w, lam, x)?;
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut clamped = false;
    let values = logs
        .iter()
        .map(|l| {
            let v = (l - top).exp();
            if v < f64::MIN_POSITIVE {
                clamped = true;
                f64::MIN_POSITIVE
            } else {
                v
            }
        })
        .collect();
    if clamped {
        warn!("weight family at x = {x} underflows; small weights clamped");
    }
    Weights::new(values)
}

fn require_unit(c: &Coefficients) -> Result<()> {
    if c.all_unit() {
        Ok(())
    } else {
        Err(GtbError::Precondition("degeneration requires unit coefficients".into()))
    }
}

/// Sub-curve on each cell's knots.
pub fn regular_control_pieces<const D: usize>(
    cv: &GtBezierCurve<D>,
    dec: &RegularDecomposition,
) -> Result<Vec<GtBezierCurve<D>>> {
    require_unit(cv.coeffs())?;
    let a = cv.knots().knots();
    let w = cv.weights().as_slice();
    dec.cells
        .iter()
        .map(|cell| {
            if cell.len() < 2 {
                return Err(GtbError::Precondition("cell needs at least 2 knots".into()));
            }
            if let Some(&i) = cell.iter().find(|&&i| i >= a.len()) {
                return Err(GtbError::IndexOutOfRange { index: i, len: a.len() });
            }
            GtBezierCurve::new(
                KnotSet1D::new(cell.iter().map(|&i| a[i]).collect())?,
                Coefficients::ones(cell.len()),
                Weights::new(cell.iter().map(|&i| w[i]).collect())?,
                cell.iter().map(|&i| cv.control()[i]).collect(),
                cv.scale(),
            )
        })
        .collect()
}

/// Image-space spacing for a resolution of `samples` points across the
/// control net.
pub fn resolution_gap<const D: usize>(control: &[[f64; D]], samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(GtbError::Precondition("resolution needs at least 2 samples".into()));
    }
    let d = diameter(control);
    Ok(if d > 0.0 { d / samples as f64 } else { 1.0 })
}

/// Union of the images of every cell's sub-curve, sampled in log
/// coordinates at the spacing of [`resolution_gap`].
pub fn regular_control_curve<const D: usize>(
    cv: &GtBezierCurve<D>,
    dec: &RegularDecomposition,
    samples: usize,
) -> Result<SampledShape<D>> {
    let gap = resolution_gap(cv.control(), samples)?;
    let mut points = Vec::new();
    for piece in regular_control_pieces(cv, dec)? {
        points.extend(sample_log_image_1d(&curve_log_image(&piece), gap, DEFAULT_MAX_POINTS)?);
    }
    SampledShape::new(points)
}

/// Sub-patches (three or more knots) and degenerate two-knot pieces.
pub enum ControlPiece {
    Patch(GtBezierSurface),
    Segment(GtBezierCurve<3>),
}

pub fn regular_control_surface_pieces(sf: &GtBezierSurface, dec: &RegularDecomposition) -> Result<Vec<ControlPiece>> {
    require_unit(sf.coeffs())?;
    let pts = sf.knots().points();
    let w = sf.weights().as_slice();
    dec.cells
        .iter()
        .map(|cell| {
            if let Some(&i) = cell.iter().find(|&&i| i >= pts.len()) {
                return Err(GtbError::IndexOutOfRange { index: i, len: pts.len() });
            }
            let weights = Weights::new(cell.iter().map(|&i| w[i]).collect())?;
            let control: Vec<_> = cell.iter().map(|&i| sf.control()[i]).collect();
            match cell.len() {
                0 | 1 => Err(GtbError::Precondition("empty surface cell".into())),
                2 => {
                    let d = crate::geometry::dist(&pts[cell[0]], &pts[cell[1]]);
                    Ok(ControlPiece::Segment(GtBezierCurve::with_unit_coefficients(
                        KnotSet1D::new(vec![0.0, d])?,
                        weights,
                        control,
                    )?))
                }
                m => Ok(ControlPiece::Patch(GtBezierSurface::new(
                    KnotSet2D::new(cell.iter().map(|&i| pts[i]).collect())?,
                    Coefficients::ones(m),
                    weights,
                    control,
                    sf.strategy(),
                )?)),
            }
        })
        .collect()
}

/// Union of the images of every cell's piece, sampled in log coordinates at
/// the spacing of [`resolution_gap`] for `grid`.
pub fn regular_control_surface(sf: &GtBezierSurface, dec: &RegularDecomposition, grid: usize) -> Result<SampledShape<3>> {
    let gap = resolution_gap(sf.control(), grid)?;
    let mut points = Vec::new();
    for piece in regular_control_surface_pieces(sf, dec)? {
        match piece {
            ControlPiece::Patch(p) => points.extend(sample_log_image_2d(&surface_log_image(&p), gap, DEFAULT_MAX_POINTS)?),
            ControlPiece::Segment(c) => points.extend(sample_log_image_1d(&curve_log_image(&c), gap, DEFAULT_MAX_POINTS)?),
        }
    }
    SampledShape::new(points)
}

/// One step of a degeneration sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationFrame<const D: usize> {
    pub x: f64,
    pub shape: SampledShape<D>,
    pub distance: f64,
}

fn check_xs(xs: &[f64]) -> Result<()> {
    if let Some((i, &x)) = xs.iter().enumerate().find(|(_, x)| !(**x > 0.0) || !x.is_finite()) {
        return Err(GtbError::NonPositive {
            what: "family parameter x",
            index: i,
            value: x,
        });
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GtbError::Precondition("xs must be strictly increasing".into()));
    }
    Ok(())
}

fn log_shifts(lam: &Lifting, x: f64) -> Vec<f64> {
    let lx = x.ln();
    lam.values().iter().map(|l| l * lx).collect()
}

/// Curve images under the weight family `x^lambda w` for each `x`, with their
/// Hausdorff distance to the regular control curve. Images are sampled in log
/// coordinates with spacing [`resolution_gap`]`(control, samples)`, so the
/// distances do not pick up the squeezing of parameter space as `x` grows.
pub fn degeneration_sequence_curve<const D: usize>(
    cv: &GtBezierCurve<D>,
    lam: &Lifting,
    xs: &[f64],
    samples: usize,
    exec: Exec,
) -> Result<(RegularDecomposition, Vec<DegenerationFrame<D>>)> {
    check_xs(xs)?;
    require_unit(cv.coeffs())?;
    lam.expect_len(cv.knots().len())?;
    let dec = regular_decomposition_1d(cv.knots(), lam, DEFAULT_TOL)?;
    let target = regular_control_curve(cv, &dec, samples)?;
    let gap = resolution_gap(cv.control(), samples)?;
    let img = curve_log_image(cv);
    let frames = xs
        .iter()
        .map(|&x| {
            let moved = img.shifted(&log_shifts(lam, x))?;
            let shape = SampledShape::new(sample_log_image_1d(&moved, gap, DEFAULT_MAX_POINTS)?)?;
            let distance = hausdorff_distance_indexed(&shape, &target, exec);
            Ok(DegenerationFrame { x, shape, distance })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((dec, frames))
}

/// Surface analogue of [`degeneration_sequence_curve`].
pub fn degeneration_sequence_surface(
    sf: &GtBezierSurface,
    lam: &Lifting,
    xs: &[f64],
    grid: usize,
    exec: Exec,
) -> Result<(RegularDecomposition, Vec<DegenerationFrame<3>>)> {
    check_xs(xs)?;
    require_unit(sf.coeffs())?;
    lam.expect_len(sf.knots().len())?;
    let dec = regular_decomposition_2d(sf.knots(), sf.hull(), lam, DEFAULT_TOL)?;
    let target = regular_control_surface(sf, &dec, grid)?;
    let gap = resolution_gap(sf.control(), grid)?;
    let img = surface_log_image(sf);
    let frames = xs
        .iter()
        .map(|&x| {
            let moved = img.shifted(&log_shifts(lam, x))?;
            let shape = SampledShape::new(sample_log_image_2d(&moved, gap, DEFAULT_MAX_POINTS)?)?;
            let distance = hausdorff_distance_indexed(&shape, &target, exec);
            Ok(DegenerationFrame { x, shape, distance })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((dec, frames))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::convex_hull_2d;
    use approx::assert_relative_eq;

    fn ex_knots() -> KnotSet1D {
        let s2 = 2f64.sqrt();
        KnotSet1D::new(vec![0.0, s2 / 4.0, 0.5, s2 / 2.0, 1.0]).unwrap()
    }

    fn lam(v: &[f64]) -> Lifting {
        Lifting::new(v.to_vec()).unwrap()
    }

    #[test]
    fn example_liftings_1d() {
        let ks = ex_knots();
        let s2 = 2f64.sqrt();
        let d = regular_decomposition_1d(&ks, &lam(&[2.0, 1.0, 5.0, 9.0 - 4.0 * s2, 1.0]), DEFAULT_TOL).unwrap();
        assert_eq!(d.cells, vec![vec![0, 2], vec![2, 3, 4]]);
        assert_eq!(d.omitted, vec![1]);
        let d = regular_decomposition_1d(&ks, &lam(&[0.0, 2.5, 3.0, 2.5, 0.0]), DEFAULT_TOL).unwrap();
        assert_eq!(d.cells, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]]);
        assert!(d.omitted.is_empty());
        let d = regular_decomposition_1d(&ks, &lam(&[1.0, 3.0, 1.0, 0.0, 1.0]), DEFAULT_TOL).unwrap();
        assert_eq!(d.cells, vec![vec![0, 1], vec![1, 4]]);
        assert_eq!(d.omitted, vec![2, 3]);
        assert_relative_eq!(d.total_measure(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn constant_lift_single_cell() {
        let ks = ex_knots();
        let d = regular_decomposition_1d(&ks, &Lifting::constant(5, 3.0), DEFAULT_TOL).unwrap();
        assert_eq!(d.cells, vec![vec![0, 1, 2, 3, 4]]);
        let two = KnotSet1D::new(vec![0.0, 1.0]).unwrap();
        let d = regular_decomposition_1d(&two, &lam(&[0.0, 7.0]), DEFAULT_TOL).unwrap();
        assert_eq!(d.cells, vec![vec![0, 1]]);
    }

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

    #[test]
    fn flat_lift_2d() {
        let ks = tilde();
        let hull = convex_hull_2d(&ks, DEFAULT_TOL).unwrap();
        let d = regular_decomposition_2d(&ks, &hull, &Lifting::constant(8, 0.0), DEFAULT_TOL).unwrap();
        assert_eq!(d.cells, vec![(0..8).collect::<Vec<_>>()]);
        assert!(d.omitted.is_empty());
        assert_eq!(d.cell_domains[0].corner_count(), 5);
    }

    #[test]
    fn generic_lift_tiles_domain() {
        let ks = tilde();
        let hull = convex_hull_2d(&ks, DEFAULT_TOL).unwrap();
        let l = lam(&[0.3, 1.7, 0.9, 2.6, 0.4, 0.1, 1.2, 0.8]);
        let d = regular_decomposition_2d(&ks, &hull, &l, DEFAULT_TOL).unwrap();
        assert!(d.cells.len() >= 3);
        assert_relative_eq!(d.total_measure(), hull.area(), epsilon = 1e-9);
    }

    #[test]
    fn shear_invariance() {
        let ks = tilde();
        let hull = convex_hull_2d(&ks, DEFAULT_TOL).unwrap();
        let base = [0.3, 1.7, 0.9, 2.6, 0.4, 0.1, 1.2, 0.8];
        let sheared: Vec<f64> = base
            .iter()
            .zip(ks.points())
            .map(|(l, p)| l + 0.7 * p[0] - 1.3 * p[1] + 4.0)
            .collect();
        let a = regular_decomposition_2d(&ks, &hull, &lam(&base), DEFAULT_TOL).unwrap();
        let b = regular_decomposition_2d(&ks, &hull, &lam(&sheared), DEFAULT_TOL).unwrap();
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn weight_family_values() {
        let s2 = 2f64.sqrt();
        let w = Weights::new(vec![1.0, 10.0, 20.0, 6.0, 5.0]).unwrap();
        let l = lam(&[2.0, 1.0, 5.0, 9.0 - 4.0 * s2, 1.0]);
        assert_eq!(weight_family(&w, &l, 1.0).unwrap(), w);
        let f = weight_family(&w, &l, 2.0).unwrap();
        let want = [4.0, 20.0, 640.0, 60.888_938_256_498_309_983, 10.0];
        for (a, b) in f.as_slice().iter().zip(want) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
        assert!(weight_family(&w, &l, 0.0).is_err());
        assert!(weight_family(&w, &l, -1.0).is_err());
    }

    #[test]
    fn constant_shift_is_common_factor() {
        let ks = ex_knots();
        let w = Weights::new(vec![1.0, 10.0, 20.0, 6.0, 5.0]).unwrap();
        let cv = GtBezierCurve::with_unit_coefficients(
            ks,
            w.clone(),
            vec![[0.0, 0.0], [0.4, 1.3], [2.0, 2.0], [3.7, 1.5], [4.0, 0.0]],
        )
        .unwrap();
        let l = lam(&[2.0, 1.0, 5.0, 3.0, 1.0]);
        let shifted = lam(&[5.0, 4.0, 8.0, 6.0, 4.0]);
        let a = cv.with_weights(weight_family(&w, &l, 3.0).unwrap()).unwrap();
        let b = cv.with_weights(weight_family(&w, &shifted, 3.0).unwrap()).unwrap();
        for t in [0.1, 0.37, 0.5, 0.9] {
            let (x, y) = (a.rational_basis(t).unwrap(), b.rational_basis(t).unwrap());
            for (p, q) in x.iter().zip(&y) {
                assert!((p - q).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn pairwise_cells_give_control_polygon() {
        let cv = GtBezierCurve::with_unit_coefficients(
            ex_knots(),
            Weights::new(vec![1.0, 10.0, 20.0, 6.0, 5.0]).unwrap(),
            vec![[0.0, 0.0], [0.4, 1.3], [2.0, 2.0], [3.7, 1.5], [4.0, 0.0]],
        )
        .unwrap();
        let d = regular_decomposition_1d(cv.knots(), &lam(&[0.0, 2.5, 3.0, 2.5, 0.0]), DEFAULT_TOL).unwrap();
        let shape = regular_control_curve(&cv, &d, 50).unwrap();
        for p in shape.points() {
            // each point lies on one of the polygon legs
            let on_leg = cv.control().windows(2).any(|w| {
                let e = crate::geometry::sub(&w[1], &w[0]);
                let r = crate::geometry::sub(p, &w[0]);
                crate::geometry::cross2(&e, &r).abs() <= 1e-12 * crate::geometry::norm(&e)
            });
            assert!(on_leg);
        }
    }

    #[test]
    fn curve_sequence_decreases() {
        let s2 = 2f64.sqrt();
        let cv = GtBezierCurve::with_unit_coefficients(
            ex_knots(),
            Weights::new(vec![1.0, 10.0, 20.0, 6.0, 5.0]).unwrap(),
            vec![[0.0, 0.0], [0.4, 1.3], [2.0, 2.0], [3.7, 1.5], [4.0, 0.0]],
        )
        .unwrap();
        let l = lam(&[2.0, 1.0, 5.0, 9.0 - 4.0 * s2, 1.0]);
        let (_, frames) = degeneration_sequence_curve(&cv, &l, &[1.3, 2.0, 3.0], 400, Exec::default()).unwrap();
        assert!(frames.windows(2).all(|w| w[1].distance < w[0].distance));
        assert!(degeneration_sequence_curve(&cv, &l, &[2.0, 1.0], 10, Exec::default()).is_err());
    }
}
