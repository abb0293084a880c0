//! Univariate and bivariate GT-Bernstein basis functions and their rational
//! (weighted, normalized) forms.
//!
//! A basis function is `c_i * prod_k h_k(p)^{h_k(a_i)}` where the `h_k` are
//! the affine functions vanishing on the boundary of the knot hull. The
//! evaluators precompute the exponent table once; rational forms are
//! normalized in the log domain with max subtraction, so exact zeros on the
//! boundary (`-inf` logs) and huge weight ratios are both handled without
//! underflow.

use crate::error::{GtbError, Result};
use crate::geometry::{log_pow, pow_conv, KnotSet1D, KnotSet2D, Point2, PolygonHull};

macro_rules! positive_vec {
    ($name:ident, $what:literal) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(values: Vec<f64>) -> Result<Self> {
                if let Some((index, &value)) = values
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
                {
                    return Err(GtbError::NonPositive {
                        what: $what,
                        index,
                        value,
                    });
                }
                Ok(Self(values))
            }

            pub fn ones(n: usize) -> Self {
                Self(vec![1.0; n])
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.0
            }

            pub(crate) fn expect_len(&self, n: usize) -> Result<()> {
                if self.0.len() != n {
                    return Err(GtbError::LengthMismatch {
                        what: $what,
                        expected: n,
                        got: self.0.len(),
                    });
                }
                Ok(())
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }
    };
}

positive_vec!(Coefficients, "coefficients");
positive_vec!(Weights, "weights");

impl Coefficients {
    pub fn all_unit(&self) -> bool {
        self.0.iter().all(|&c| c == 1.0)
    }
}

/// Univariate edge scalings: `h_0(t) = k0 (t - a_0)`, `h_1(t) = k1 (a_n - t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleParams {
    pub k0: f64,
    pub k1: f64,
}

impl Default for ScaleParams {
    fn default() -> Self {
        Self { k0: 1.0, k1: 1.0 }
    }
}

impl ScaleParams {
    pub fn new(k0: f64, k1: f64) -> Result<Self> {
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(GtbError::NonPositive {
                what: "k0",
                index: 0,
                value: k0,
            });
        }
        if !(k1 > 0.0 && k1.is_finite()) {
            return Err(GtbError::NonPositive {
                what: "k1",
                index: 0,
                value: k1,
            });
        }
        Ok(Self { k0, k1 })
    }
}

/// Normalize `exp(logs)` to sum 1 with max subtraction.
pub(crate) fn softmax_in_place(logs: &mut [f64]) {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for l in logs.iter_mut() {
        *l = (*l - m).exp();
        s += *l;
    }
    for l in logs.iter_mut() {
        *l /= s;
    }
}

/// Precomputed univariate basis over a knot set.
#[derive(Debug, Clone)]
pub struct Basis1D {
    a0: f64,
    an: f64,
    scale: ScaleParams,
    coeffs: Vec<f64>,
    exp0: Vec<f64>,
    exp1: Vec<f64>,
}

impl Basis1D {
    pub fn new(ks: &KnotSet1D, c: &Coefficients, s: ScaleParams) -> Result<Self> {
        c.expect_len(ks.len())?;
        let (a0, an) = (ks.first(), ks.last());
        Ok(Self {
            a0,
            an,
            scale: s,
            coeffs: c.as_slice().to_vec(),
            exp0: ks.knots().iter().map(|&a| s.k0 * (a - a0)).collect(),
            exp1: ks.knots().iter().map(|&a| s.k1 * (an - a)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Edge-function values `(h_0(t), h_1(t))`, clamped at the ends.
    fn edge_values(&self, t: f64) -> Result<(f64, f64)> {
        let tol = 1e-12 * (self.an - self.a0);
        if !(t >= self.a0 - tol && t <= self.an + tol) {
            return Err(GtbError::OutsideDomain(vec![t]));
        }
        let t = t.clamp(self.a0, self.an);
        Ok((self.scale.k0 * (t - self.a0), self.scale.k1 * (self.an - t)))
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let (h0, h1) = self.edge_values(t)?;
        (0..self.len())
            .map(|i| Ok(self.coeffs[i] * pow_conv(h0, self.exp0[i])? * pow_conv(h1, self.exp1[i])?))
            .collect()
    }

    /// `ln(w_i * beta_i(t))`, `-inf` for exact zeros.
    pub fn log_weighted(&self, w: &[f64], t: f64) -> Result<Vec<f64>> {
        let (h0, h1) = self.edge_values(t)?;
        Ok((0..self.len())
            .map(|i| {
                w[i].ln() + self.coeffs[i].ln() + log_pow(h0, self.exp0[i]) + log_pow(h1, self.exp1[i])
            })
            .collect())
    }

    pub fn eval_rational(&self, w: &Weights, t: f64) -> Result<Vec<f64>> {
        w.expect_len(self.len())?;
        let mut v = self.log_weighted(w.as_slice(), t)?;
        softmax_in_place(&mut v);
        Ok(v)
    }
}

pub fn eval_basis_1d(ks: &KnotSet1D, c: &Coefficients, s: ScaleParams, t: f64) -> Result<Vec<f64>> {
    Basis1D::new(ks, c, s)?.eval(t)
}

pub fn eval_rational_basis_1d(
    ks: &KnotSet1D,
    c: &Coefficients,
    w: &Weights,
    s: ScaleParams,
    t: f64,
) -> Result<Vec<f64>> {
    Basis1D::new(ks, c, s)?.eval_rational(w, t)
}

/// Precomputed bivariate basis over a knot set and its hull.
#[derive(Debug, Clone)]
pub struct Basis2D {
    hull: PolygonHull,
    coeffs: Vec<f64>,
    /// `exponents[i][k] = h_k(a_i)`, snapped to exactly zero for knots on edge `k`.
    exponents: Vec<Vec<f64>>,
}

impl Basis2D {
    pub fn new(ks: &KnotSet2D, hull: &PolygonHull, c: &Coefficients) -> Result<Self> {
        c.expect_len(ks.len())?;
        let exponents = ks
            .points()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                hull.edges
                    .iter()
                    .enumerate()
                    .map(|(k, e)| {
                        if hull.edge_members[k].contains(&i) {
                            Ok(0.0)
                        } else {
                            let h = e.eval(a);
                            if h < 0.0 {
                                Err(GtbError::Precondition(format!(
                                    "knot {i} lies outside hull edge {k}"
                                )))
                            } else {
                                Ok(h)
                            }
                        }
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            hull: hull.clone(),
            coeffs: c.as_slice().to_vec(),
            exponents,
        })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn hull(&self) -> &PolygonHull {
        &self.hull
    }

    pub fn exponents(&self) -> &[Vec<f64>] {
        &self.exponents
    }

    /// `h_k(p)` for every edge; values within rounding noise of zero are
    /// snapped to zero, points farther than the hull tolerance outside are
    /// rejected.
    pub fn edge_values(&self, p: &Point2) -> Result<Vec<f64>> {
        self.hull
            .edges
            .iter()
            .map(|e| {
                let h = e.eval(p);
                if h.abs() <= e.rounding_bound(p) {
                    Ok(0.0)
                } else if h < 0.0 {
                    if h / e.normal_len() >= -self.hull.tol {
                        Ok(0.0)
                    } else {
                        Err(GtbError::OutsideDomain(p.to_vec()))
                    }
                } else {
                    Ok(h)
                }
            })
            .collect()
    }

    pub fn eval(&self, p: &Point2) -> Result<Vec<f64>> {
        let h = self.edge_values(p)?;
        self.exponents
            .iter()
            .zip(&self.coeffs)
            .map(|(ex, &c)| {
                ex.iter()
                    .zip(&h)
                    .try_fold(c, |acc, (&e, &hk)| Ok(acc * pow_conv(hk, e)?))
            })
            .collect()
    }

    pub fn log_weighted(&self, w: &[f64], p: &Point2) -> Result<Vec<f64>> {
        let h = self.edge_values(p)?;
        Ok(self
            .exponents
            .iter()
            .enumerate()
            .map(|(i, ex)| {
                ex.iter()
                    .zip(&h)
                    .fold(w[i].ln() + self.coeffs[i].ln(), |acc, (&e, &hk)| acc + log_pow(hk, e))
            })
            .collect())
    }

    pub fn eval_rational(&self, w: &Weights, p: &Point2) -> Result<Vec<f64>> {
        w.expect_len(self.len())?;
        let mut v = self.log_weighted(w.as_slice(), p)?;
        softmax_in_place(&mut v);
        Ok(v)
    }
}

pub fn eval_basis_2d(
    ks: &KnotSet2D,
    hull: &PolygonHull,
    c: &Coefficients,
    p: &Point2,
) -> Result<Vec<f64>> {
    Basis2D::new(ks, hull, c)?.eval(p)
}

pub fn eval_rational_basis_2d(
    ks: &KnotSet2D,
    hull: &PolygonHull,
    c: &Coefficients,
    w: &Weights,
    p: &Point2,
) -> Result<Vec<f64>> {
    Basis2D::new(ks, hull, c)?.eval_rational(w, p)
}

/// Binomial coefficient as a float (small arguments only).
pub fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Coefficients `C(n, i) / n^n` that turn the basis on `{0, 1, ..., n}` into
/// the classical Bernstein basis under `t = n s`.
pub fn classical_coefficients(n: u32) -> Coefficients {
    let nn = (n as f64).powi(n as i32);
    Coefficients((0..=n).map(|i| binomial(n, i) / nn).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{convex_hull_2d, DEFAULT_TOL};
    use approx::assert_relative_eq;

    fn ex21() -> (KnotSet1D, Coefficients) {
        let s2 = 2f64.sqrt();
        (
            KnotSet1D::new(vec![0.0, s2 / 4.0, 0.5, s2 / 2.0, 1.0]).unwrap(),
            Coefficients::new(vec![0.5, 1.0, 1.5, 0.7, 0.9]).unwrap(),
        )
    }

    fn tilde() -> (KnotSet2D, PolygonHull) {
        let ks = KnotSet2D::new(vec![
            [0.0, 2.0],
            [1.0, 2.0],
            [0.0, 6.0 / 5.0],
            [8.0 / 7.0, 8.0 / 7.0],
            [2.0, 1.0],
            [0.0, 0.0],
            [6.0 / 5.0, 0.0],
            [2.0, 0.0],
        ])
        .unwrap();
        let hull = convex_hull_2d(&ks, DEFAULT_TOL).unwrap();
        (ks, hull)
    }

    #[test]
    fn example_basis_midpoint() {
        let (ks, c) = ex21();
        let b = eval_basis_1d(&ks, &c, ScaleParams::default(), 0.5).unwrap();
        assert_relative_eq!(b[2], 0.75, max_relative = 1e-15);
    }

    #[test]
    fn example_basis_left_end() {
        let (ks, c) = ex21();
        let b = eval_basis_1d(&ks, &c, ScaleParams::default(), 0.0).unwrap();
        assert_eq!(b, vec![0.5, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn classical_bernstein_quadratic() {
        let ks = KnotSet1D::new(vec![0.0, 1.0, 2.0]).unwrap();
        let c = Coefficients::new(vec![0.25, 0.5, 0.25]).unwrap();
        let b = eval_basis_1d(&ks, &c, ScaleParams::default(), 0.6).unwrap();
        for (x, y) in b.iter().zip([0.49, 0.42, 0.09]) {
            assert_relative_eq!(*x, y, max_relative = 1e-14);
        }
    }

    #[test]
    fn rational_indicator_at_ends() {
        let (ks, c) = ex21();
        let w = Weights::ones(5);
        let s = ScaleParams::default();
        assert_eq!(
            eval_rational_basis_1d(&ks, &c, &w, s, 0.0).unwrap(),
            vec![1.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            eval_rational_basis_1d(&ks, &c, &w, s, 1.0).unwrap(),
            vec![0.0, 0.0, 0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn rational_against_high_precision_oracle() {
        // 50-digit direct summation of w_i beta_i / sum
        let (ks, c) = ex21();
        let w = Weights::new(vec![1.0, 10.0, 20.0, 6.0, 5.0]).unwrap();
        let t = eval_rational_basis_1d(&ks, &c, &w, ScaleParams::default(), 0.3).unwrap();
        let expected = [
            0.015_729_897_900_619_977_671,
            0.233_161_295_277_557_931_52,
            0.617_858_124_030_154_310_72,
            0.072_578_219_460_705_009_072,
            0.060_672_463_330_962_771_015,
        ];
        for (x, y) in t.iter().zip(expected) {
            assert_relative_eq!(*x, y, max_relative = 1e-13);
        }
        let t = eval_rational_basis_1d(&ks, &c, &w, ScaleParams::default(), 0.5).unwrap();
        let expected = [
            0.010_162_601_626_016_260_163,
            0.203_252_032_520_325_203_25,
            0.609_756_097_560_975_609_76,
            0.085_365_853_658_536_585_366,
            0.091_463_414_634_146_341_463,
        ];
        for (x, y) in t.iter().zip(expected) {
            assert_relative_eq!(*x, y, max_relative = 1e-13);
        }
    }

    #[test]
    fn outside_domain_is_error() {
        let (ks, c) = ex21();
        assert!(matches!(
            eval_basis_1d(&ks, &c, ScaleParams::default(), 1.1),
            Err(GtbError::OutsideDomain(_))
        ));
    }

    #[test]
    fn tilde_basis_values() {
        let (ks, hull) = tilde();
        let c = Coefficients::ones(8);
        let b = eval_basis_2d(&ks, &hull, &c, &[1.0, 1.0]).unwrap();
        // (2 - v) v u^2 at (1, 1)
        assert_relative_eq!(b[4], 1.0, max_relative = 1e-15);
        let b = eval_basis_2d(&ks, &hull, &c, &[0.0, 0.0]).unwrap();
        assert_eq!(b[5], 432.0);
        assert!(b.iter().enumerate().all(|(i, &x)| i == 5 || x == 0.0));
    }

    #[test]
    fn tilde_basis_matches_printed_formula() {
        let (ks, hull) = tilde();
        let c = Coefficients::ones(8);
        let (u, v): (f64, f64) = (0.7, 0.4);
        let b = eval_basis_2d(&ks, &hull, &c, &[u, v]).unwrap();
        let f = (2.0 - v).powf(0.8) * (3.0 - u - v).powf(1.8) * (2.0 - u).powi(2) * v.powf(1.2);
        assert_relative_eq!(b[2], f, max_relative = 1e-13);
        let f = (2.0 - v).powf(6.0 / 7.0)
            * (3.0 - u - v).powf(5.0 / 7.0)
            * (2.0 - u).powf(6.0 / 7.0)
            * v.powf(8.0 / 7.0)
            * u.powf(8.0 / 7.0);
        assert_relative_eq!(b[3], f, max_relative = 1e-13);
    }

    #[test]
    fn unit_triangle_symmetric() {
        let ks = KnotSet2D::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let hull = convex_hull_2d(&ks, DEFAULT_TOL).unwrap();
        let b = eval_basis_2d(&ks, &hull, &Coefficients::ones(3), &[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_relative_eq!(b[0], 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(b[0], b[1], max_relative = 1e-14);
        assert_relative_eq!(b[1], b[2], max_relative = 1e-14);
    }

    #[test]
    fn corner_and_edge_support() {
        let (ks, hull) = tilde();
        let basis = Basis2D::new(&ks, &hull, &Coefficients::ones(8)).unwrap();
        let w = Weights::new(vec![2.0, 2.0, 5.0, 7.0, 2.0, 3.0, 5.0, 2.0]).unwrap();
        for &vi in &hull.vertex_indices {
            let t = basis.eval_rational(&w, &ks.points()[vi]).unwrap();
            for (i, x) in t.iter().enumerate() {
                assert_eq!(*x, if i == vi { 1.0 } else { 0.0 });
            }
        }
        // a point on the bottom edge
        let t = basis.eval_rational(&w, &[0.7, 0.0]).unwrap();
        for (i, x) in t.iter().enumerate() {
            if hull.edge_members[0].contains(&i) {
                assert!(*x > 0.0);
            } else {
                assert_eq!(*x, 0.0);
            }
        }
    }

    #[test]
    fn outside_hull_is_error() {
        let (ks, hull) = tilde();
        assert!(eval_basis_2d(&ks, &hull, &Coefficients::ones(8), &[2.0, 2.0]).is_err());
    }

    #[test]
    fn huge_weights_do_not_underflow() {
        let (ks, c) = ex21();
        let w = Weights::new(vec![1e-300, 1e300, 1.0, 1e-200, 1.0]).unwrap();
        let t = eval_rational_basis_1d(&ks, &c, &w, ScaleParams::default(), 0.4).unwrap();
        assert!(t.iter().all(|x| x.is_finite()));
        assert_relative_eq!(t.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Weights::new(vec![1.0, 0.0]),
            Err(GtbError::NonPositive { index: 1, .. })
        ));
        let (ks, _) = ex21();
        let c = Coefficients::ones(3);
        assert!(matches!(
            eval_basis_1d(&ks, &c, ScaleParams::default(), 0.5),
            Err(GtbError::LengthMismatch { .. })
        ));
    }
}
