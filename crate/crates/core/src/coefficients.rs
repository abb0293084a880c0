//! Collocation matrices of the univariate basis, the partition-of-unity
//! coefficient solve, and brute-force strict-total-positivity checks.

use nalgebra::{DMatrix, DVector};

use crate::basis::{Basis1D, Coefficients, ScaleParams};
use crate::error::{GtbError, Result};
use crate::exec::Exec;
use crate::geometry::KnotSet1D;

/// Largest matrix accepted by [`check_strict_total_positivity`].
pub const MAX_STP_DIM: usize = 7;
/// Largest minor order checked.
pub const MAX_STP_ORDER: usize = 5;
/// Relative tolerance for a minor to count as positive.
pub const STP_REL_TOL: f64 = 1e-12;

/// `entries[(i, j)] = beta_j(t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationMatrix {
    pub entries: DMatrix<f64>,
    pub nodes: Vec<f64>,
}

fn check_nodes(ks: &KnotSet1D, nodes: &[f64]) -> Result<()> {
    if nodes.len() != ks.len() {
        return Err(GtbError::LengthMismatch {
            what: "nodes",
            expected: ks.len(),
            got: nodes.len(),
        });
    }
    if let Some(i) = nodes.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(GtbError::Precondition(format!(
            "nodes must be strictly increasing (t[{}] = {}, t[{}] = {})",
            i,
            nodes[i],
            i + 1,
            nodes[i + 1]
        )));
    }
    let (a0, an) = (ks.first(), ks.last());
    if let Some(&t) = nodes.iter().find(|&&t| t < a0 || t > an) {
        return Err(GtbError::OutsideDomain(vec![t]));
    }
    Ok(())
}

pub fn collocation_matrix(
    ks: &KnotSet1D,
    c: &Coefficients,
    s: ScaleParams,
    nodes: &[f64],
) -> Result<CollocationMatrix> {
    if s.k0 != s.k1 {
        return Err(GtbError::Precondition(format!(
            "collocation requires k0 == k1 (got {} and {})",
            s.k0, s.k1
        )));
    }
    check_nodes(ks, nodes)?;
    let basis = Basis1D::new(ks, c, s)?;
    let n = ks.len();
    let mut entries = DMatrix::zeros(n, n);
    for (i, &t) in nodes.iter().enumerate() {
        for (j, b) in basis.eval(t)?.into_iter().enumerate() {
            entries[(i, j)] = b;
        }
    }
    Ok(CollocationMatrix {
        entries,
        nodes: nodes.to_vec(),
    })
}

/// Knots when strictly increasing, otherwise Chebyshev points mapped into
/// the open interval.
pub fn default_nodes(ks: &KnotSet1D) -> Vec<f64> {
    if ks.is_strictly_increasing() {
        return ks.knots().to_vec();
    }
    let n = ks.len();
    let (a0, an) = (ks.first(), ks.last());
    (0..n)
        .map(|i| {
            let x = -((2 * i + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
            a0 + (an - a0) * 0.5 * (x + 1.0)
        })
        .collect()
}

/// Outcome of the coefficient solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSolution {
    /// Raw solution of `M C = 1`. Not wrapped in [`Coefficients`] because it
    /// may contain non-positive entries.
    pub values: Vec<f64>,
    /// Max-norm of `M C - 1`.
    pub residual: f64,
    /// 2-norm condition number of `M`.
    pub condition: f64,
    /// Set when some `C_i <= 0`.
    pub nonpositive: bool,
}

impl PartitionSolution {
    pub fn coefficients(&self) -> Result<Coefficients> {
        Coefficients::new(self.values.clone())
    }
}

pub fn solve_partition_coefficients(
    ks: &KnotSet1D,
    s: ScaleParams,
    nodes: &[f64],
) -> Result<PartitionSolution> {
    let m = collocation_matrix(ks, &Coefficients::ones(ks.len()), s, nodes)?;
    let n = ks.len();
    let ones = DVector::from_element(n, 1.0);
    let lu = m.entries.clone().lu();
    let sol = lu.solve(&ones).ok_or(GtbError::Singular)?;
    let sv = m.entries.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smin <= smax * f64::EPSILON {
        return Err(GtbError::Singular);
    }
    let residual = (&m.entries * &sol - ones).amax();
    let values: Vec<f64> = sol.iter().copied().collect();
    let nonpositive = values.iter().any(|&c| c <= 0.0);
    if nonpositive {
        log::warn!("partition-of-unity solve produced non-positive coefficients: {values:?}");
    }
    Ok(PartitionSolution {
        values,
        residual,
        condition: smax / smin,
        nonpositive,
    })
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Determinant by cofactor expansion along the first row, together with the
/// sum of absolute expansion terms (the rounding scale of the result).
pub fn cofactor_det(m: &[Vec<f64>]) -> (f64, f64) {
    let n = m.len();
    match n {
        0 => (1.0, 1.0),
        1 => (m[0][0], m[0][0].abs()),
        _ => {
            let mut det = 0.0;
            let mut scale = 0.0;
            for j in 0..n {
                if m[0][j] == 0.0 {
                    continue;
                }
                let sub: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let (d, s) = cofactor_det(&sub);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                det += sign * m[0][j] * d;
                scale += m[0][j].abs() * s;
            }
            (det, scale)
        }
    }
}

/// Per-order tally of a total-positivity scan.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StpReport {
    /// `checked[k - 1]`: number of order-`k` minors evaluated.
    pub checked: Vec<usize>,
    /// `skipped[k - 1]`: minors skipped because they touch a structural zero.
    pub skipped: Vec<usize>,
    /// First failing minor, as (rows, cols, value).
    pub failure: Option<(Vec<usize>, Vec<usize>, f64)>,
}

impl StpReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// True iff every minor of order `<= max_order` avoiding structural zeros is
/// positive. See [`stp_report_with`] for details.
pub fn check_strict_total_positivity(m: &CollocationMatrix, max_order: usize) -> Result<bool> {
    Ok(stp_report_with(m, max_order, Exec::default())?.passed())
}

/// Enumerate minors of order `1..=max_order` (capped at [`MAX_STP_ORDER`]).
///
/// A minor whose submatrix contains an exact zero entry is skipped: such
/// zeros only arise in rows evaluated at the interval ends. A minor passes
/// when its value exceeds `STP_REL_TOL` times the sum of absolute cofactor
/// terms.
pub fn stp_report_with(m: &CollocationMatrix, max_order: usize, exec: Exec) -> Result<StpReport> {
    let (rows, cols) = m.entries.shape();
    if rows != cols {
        return Err(GtbError::Precondition("collocation matrix must be square".into()));
    }
    if rows > MAX_STP_DIM {
        return Err(GtbError::TooLarge(rows));
    }
    let n = rows;
    let top = max_order.min(MAX_STP_ORDER).min(n);
    let dense: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m.entries[(i, j)]).collect())
        .collect();
    let mut report = StpReport {
        checked: vec![0; top],
        skipped: vec![0; top],
        failure: None,
    };
    for k in 1..=top {
        let subsets = combinations(n, k);
        let pairs: Vec<(&Vec<usize>, &Vec<usize>)> = subsets
            .iter()
            .flat_map(|r| subsets.iter().map(move |c| (r, c)))
            .collect();
        // None = skipped, Some(ok, value)
        let results = exec.map_slice(&pairs, |(r, c)| {
            let sub: Vec<Vec<f64>> = r
                .iter()
                .map(|&i| c.iter().map(|&j| dense[i][j]).collect())
                .collect();
            if sub.iter().flatten().any(|&x| x == 0.0) {
                return None;
            }
            let (det, scale) = cofactor_det(&sub);
            Some((det > STP_REL_TOL * scale, det))
        });
        for ((r, c), res) in pairs.iter().zip(results) {
            match res {
                None => report.skipped[k - 1] += 1,
                Some((ok, det)) => {
                    report.checked[k - 1] += 1;
                    if !ok && report.failure.is_none() {
                        report.failure = Some(((*r).clone(), (*c).clone(), det));
                    }
                }
            }
        }
    }
    Ok(report)
}
