//! Property suite behind `gtbezier check`.

use std::fmt;

use gtbezier_core::curve::{
    count_line_crossings_curve, count_line_crossings_polygon, has_rational_gaps, is_convex_polyline,
};
use gtbezier_core::distance::{refined_curve_hausdorff, ParamCurve};
use gtbezier_core::geometry::{diameter, dist, dot, norm, scale, sub};
use gtbezier_core::{Exec, GtBezierCurve, GtBezierSurface, GtbError, Line2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn judge(name: &'static str, ok: bool, detail: String) -> Check {
    Check {
        name,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn skip(name: &'static str, detail: impl Into<String>) -> Check {
    Check {
        name,
        status: Status::Skip,
        detail: detail.into(),
    }
}

fn errored(name: &'static str, e: GtbError) -> Check {
    judge(name, false, format!("error: {e}"))
}

/// Runs `f`, turning a kernel error into a failed check.
fn guarded(name: &'static str, f: impl FnOnce() -> Result<Check, GtbError>) -> Check {
    f().unwrap_or_else(|e| errored(name, e))
}

const POU_TOL: f64 = 1e-12;
const HULL_TOL: f64 = 1e-9;
const BOUNDARY_TOL: f64 = 1e-6;
const RATIONAL_DEN: u64 = 1000;
const LINES: usize = 200;

fn basis_checks<'a>(bases: impl Iterator<Item = Result<Vec<f64>, GtbError>> + 'a) -> Vec<Check> {
    let mut worst = 0.0f64;
    let mut min = f64::INFINITY;
    let mut count = 0;
    for b in bases {
        match b {
            Ok(b) => {
                worst = worst.max((b.iter().sum::<f64>() - 1.0).abs());
                min = b.iter().copied().fold(min, f64::min);
                count += 1;
            }
            Err(e) => return vec![errored("partition of unity", e.clone()), errored("nonnegative basis", e)],
        }
    }
    vec![
        judge(
            "partition of unity",
            worst <= POU_TOL,
            format!("max |sum T - 1| = {worst:.2e} at {count} points (tol {POU_TOL:e})"),
        ),
        judge("nonnegative basis", min >= 0.0, format!("min T = {min:.2e}")),
    ]
}

fn bbox_check<const D: usize>(control: &[[f64; D]], points: &[[f64; D]]) -> Check {
    let tol = HULL_TOL * (1.0 + diameter(control));
    let mut excess = 0.0f64;
    for p in points {
        for d in 0..D {
            let lo = control.iter().map(|b| b[d]).fold(f64::INFINITY, f64::min);
            let hi = control.iter().map(|b| b[d]).fold(f64::NEG_INFINITY, f64::max);
            excess = excess.max(lo - p[d]).max(p[d] - hi);
        }
    }
    judge(
        "control bounding box",
        excess <= tol,
        format!("max excursion {:.2e} over {} points (tol {tol:.1e})", excess.max(0.0), points.len()),
    )
}

/// Fixed invertible map: rotation by 0.7 rad in the first two coordinates,
/// scaling by 1.5, a shear into the last coordinate and a translation.
fn affine<const D: usize>(p: &[f64; D]) -> [f64; D] {
    let (s, c) = 0.7f64.sin_cos();
    let mut q = *p;
    q[0] = 1.5 * (c * p[0] - s * p[1]) + 0.25;
    q[1] = 1.5 * (s * p[0] + c * p[1]) - 1.75;
    if D > 2 {
        q[D - 1] = p[D - 1] + 0.5 * p[0] + 3.0;
    }
    q
}

fn affine_check<const D: usize, F, G>(params: usize, original: F, moved: G) -> Check
where
    F: Fn(usize) -> Result<[f64; D], GtbError>,
    G: Fn(usize) -> Result<[f64; D], GtbError>,
{
    guarded("affine invariance", || {
        let mut worst = 0.0f64;
        for i in 0..params {
            let a = affine(&original(i)?);
            let b = moved(i)?;
            worst = worst.max(dist(&a, &b) / (1.0 + norm(&a)));
        }
        Ok(judge(
            "affine invariance",
            worst <= HULL_TOL,
            format!("max relative deviation {worst:.2e} at {params} points (tol {HULL_TOL:e})"),
        ))
    })
}

/// Checks shared by planar and spatial curves.
pub fn check_curve<const D: usize>(cv: &GtBezierCurve<D>, samples: usize, exec: Exec) -> Vec<Check> {
    let poly = match cv.sample_with(samples.max(2), exec) {
        Ok(p) => p,
        Err(e) => return vec![errored("sampling", e)],
    };
    let mut out = basis_checks(poly.params.iter().map(|&t| cv.rational_basis(t)));

    let b = cv.control();
    let dom = cv.domain();
    out.push(guarded("endpoint interpolation", || {
        let (p, q) = (cv.eval(dom.lo)?, cv.eval(dom.hi)?);
        Ok(judge(
            "endpoint interpolation",
            p == b[0] && q == b[b.len() - 1],
            format!("|P(a0) - b0| = {:.1e}, |P(an) - bn| = {:.1e}", dist(&p, &b[0]), dist(&q, &b[b.len() - 1])),
        ))
    }));
    out.push(bbox_check(b, &poly.points));

    out.push(match cv.with_control(b.iter().map(affine).collect()) {
        Ok(moved) => affine_check(poly.params.len(), |i| cv.eval(poly.params[i]), |i| moved.eval(poly.params[i])),
        Err(e) => errored("affine invariance", e),
    });

    let n = b.len() - 1;
    out.push(match cv.endpoint_tangents() {
        Ok((d0, d1)) => {
            let legs = [(d0, sub(&b[1], &b[0])), (d1, sub(&b[n], &b[n - 1]))];
            if legs.iter().any(|(_, e)| norm(e) == 0.0) {
                skip("endpoint tangents", "an end leg of the control polygon has zero length")
            } else {
                let (mut cross, mut aligned) = (0.0f64, true);
                for (d, e) in &legs {
                    let (dh, eh) = (scale(d, 1.0 / norm(d)), scale(e, 1.0 / norm(e)));
                    let c = dot(&dh, &eh);
                    cross = cross.max(norm(&sub(&dh, &scale(&eh, c))));
                    aligned &= c > 0.0;
                }
                judge(
                    "endpoint tangents",
                    cross <= HULL_TOL && aligned,
                    format!("max normalized cross with end legs {cross:.2e} (tol {HULL_TOL:e}), same direction: {aligned}"),
                )
            }
        }
        Err(e) if e.is_validation() => skip("endpoint tangents", e.to_string()),
        Err(e) => errored("endpoint tangents", e),
    });
    out
}

/// [`check_curve`] plus the planar shape properties.
pub fn check_planar_curve(cv: &GtBezierCurve<2>, samples: usize, exec: Exec) -> Vec<Check> {
    let mut out = check_curve(cv, samples, exec);
    let rational = has_rational_gaps(cv.knots(), RATIONAL_DEN);
    if !rational {
        let why = "knot gaps are not rational";
        out.push(skip("variation diminishing", why));
        out.push(skip("convexity preservation", why));
        return out;
    }
    out.push(guarded("variation diminishing", || {
        let polygon = cv.control_polygon();
        let poly = cv.sample_with(samples.max(2), exec)?;
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let mut violations = 0;
        for k in 0..LINES {
            let angle = std::f64::consts::PI * (k as f64 * golden).fract();
            let anchor = poly.points[(k * 7919) % poly.len()];
            let line = Line2::new(anchor, [angle.cos(), angle.sin()])?;
            if count_line_crossings_curve(cv, &line, samples.max(2))? > count_line_crossings_polygon(&polygon, &line)? {
                violations += 1;
            }
        }
        Ok(judge(
            "variation diminishing",
            violations == 0,
            format!("{violations}/{LINES} lines cross the curve more often than the polygon"),
        ))
    }));
    out.push(guarded("convexity preservation", || {
        if !is_convex_polyline(&cv.control_polygon())? {
            return Ok(skip("convexity preservation", "control polygon is not convex"));
        }
        let convex = is_convex_polyline(&cv.sample_with(samples.max(3), exec)?)?;
        Ok(judge("convexity preservation", convex, format!("sampled curve convex: {convex}")))
    }));
    out
}

pub fn check_surface(sf: &GtBezierSurface, grid: usize, exec: Exec) -> Vec<Check> {
    let mesh = match sf.sample_with(grid, exec) {
        Ok(m) => m,
        Err(e) => return vec![errored("sampling", e)],
    };
    let mut out = basis_checks(mesh.params.iter().map(|p| sf.rational_basis(p)));

    out.push(guarded("corner interpolation", || {
        let corners = sf.corner_values()?;
        let exact = corners.iter().filter(|(i, p)| *p == sf.control()[*i]).count();
        Ok(judge(
            "corner interpolation",
            exact == corners.len(),
            format!("{exact}/{} hull vertices reproduce their control points exactly", corners.len()),
        ))
    }));
    out.push(bbox_check(sf.control(), &mesh.vertices));

    out.push(match sf.with_control(sf.control().iter().map(affine).collect()) {
        Ok(moved) => affine_check(mesh.params.len(), |i| sf.eval_at(&mesh.params[i]), |i| moved.eval_at(&mesh.params[i])),
        Err(e) => errored("affine invariance", e),
    });

    out.push(guarded("boundary curves", || {
        let mut worst = 0.0f64;
        for e in 0..sf.hull().num_edges() {
            let bc = sf.boundary_curve(e)?;
            let sigma = bc.domain().hi;
            let restrict = |t: f64| sf.eval_at(&sf.edge_point(e, t));
            let reduced = |t: f64| bc.eval(t);
            let d = refined_curve_hausdorff(
                &ParamCurve { eval: &restrict, lo: 0.0, hi: sigma },
                &ParamCurve { eval: &reduced, lo: 0.0, hi: sigma },
                500,
                exec,
            )?;
            worst = worst.max(d);
        }
        Ok(judge(
            "boundary curves",
            worst <= BOUNDARY_TOL,
            format!("max edge Hausdorff {worst:.2e} over {} edges (tol {BOUNDARY_TOL:e})", sf.hull().num_edges()),
        ))
    }));

    out.push(guarded("boundary support", || {
        let mut leaks = 0;
        for e in 0..sf.hull().num_edges() {
            let members = &sf.hull().edge_members[e];
            let sigma = {
                let (a, b) = sf.hull().edge_endpoints(e);
                dist(&a, &b)
            };
            for k in 0..=grid {
                let t = sigma * k as f64 / grid as f64;
                let basis = sf.rational_basis(&sf.edge_point(e, t))?;
                leaks += basis.iter().enumerate().filter(|(i, v)| !members.contains(i) && **v != 0.0).count();
            }
        }
        Ok(judge(
            "boundary support",
            leaks == 0,
            format!("{leaks} nonzero off-edge basis values on the boundary"),
        ))
    }));
    out
}
