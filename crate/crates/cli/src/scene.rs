//! Scene files: a JSON document describing one curve or surface.
//!
//! ```json
//! {
//!   "kind": "curve",
//!   "knots": [0, "sqrt(2)/4", 0.5, "sqrt(2)/2", 1],
//!   "weights": [1, 10, 20, 6, 5],
//!   "control": [[0, 0], [0.4, 1.3], [2, 2], [3.7, 1.5], [4, 0]],
//!   "scale": {"k0": 1, "k1": 1},
//!   "lifting": [2, 1, 5, "9 - 4*sqrt(2)", 1]
//! }
//! ```
//!
//! Surface knots are `[u, v]` pairs and surface control points have three
//! coordinates; curve control points have two or three. Every number may be
//! written as an expression string (see [`crate::expr`]). `coefficients`,
//! `weights`, `scale`, `lifting` and `normalization` (`"primitive"` or
//! `"unit"`) are optional.

use std::fmt;
use std::path::Path;

use gtbezier_core::{
    Coefficients, GtBezierCurve, GtBezierSurface, GtbError, KnotSet1D, KnotSet2D, Lifting,
    NormalizationStrategy, ScaleParams, Weights,
};
use serde::{Deserialize, Serialize};

use crate::expr::eval_expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Curve,
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Primitive,
    Unit,
}

impl From<Normalization> for NormalizationStrategy {
    fn from(n: Normalization) -> Self {
        match n {
            Normalization::Primitive => NormalizationStrategy::PrimitiveInteger,
            Normalization::Unit => NormalizationStrategy::UnitNormal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Knots {
    Line(Vec<f64>),
    Plane(Vec<[f64; 2]>),
}

impl Knots {
    pub fn len(&self) -> usize {
        match self {
            Knots::Line(k) => k.len(),
            Knots::Plane(k) => k.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scale {
    pub k0: f64,
    pub k1: f64,
}

/// A validated scene. Serializing and reloading reproduces every field bit
/// for bit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scene {
    pub kind: Kind,
    pub knots: Knots,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub control: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lifting: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
}

/// The geometric object a scene describes.
#[derive(Debug, Clone)]
pub enum Model {
    Curve2(GtBezierCurve<2>),
    Curve3(GtBezierCurve<3>),
    Surface(GtBezierSurface),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Parse,
    LengthMismatch,
    NonPositive,
    DegenerateKnots,
    Invalid,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Parse => "E-PARSE",
            ErrorCode::LengthMismatch => "E-LENGTH",
            ErrorCode::NonPositive => "E-NONPOSITIVE",
            ErrorCode::DegenerateKnots => "E-DEGENERATE",
            ErrorCode::Invalid => "E-INVALID",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneError {
    pub code: ErrorCode,
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code.as_str(), self.path)?;
        if let Some(line) = self.line {
            write!(f, " (line {line})")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for SceneError {}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNum {
    Num(f64),
    Expr(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawKnot {
    Line(RawNum),
    Plane([RawNum; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScale {
    k0: RawNum,
    k1: RawNum,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    kind: Kind,
    knots: Vec<RawKnot>,
    coefficients: Option<Vec<RawNum>>,
    weights: Option<Vec<RawNum>>,
    control: Vec<Vec<RawNum>>,
    scale: Option<RawScale>,
    lifting: Option<Vec<RawNum>>,
    normalization: Option<Normalization>,
}

/// Validation context: the source text, for locating fields by line.
struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    /// Line of the first `"field":` key, 1-based.
    fn line_of(&self, path: &str) -> Option<usize> {
        let field = path.split(['[', '.']).next().unwrap_or(path);
        let key = format!("\"{field}\"");
        let at = self.text.find(&key)?;
        Some(self.text[..at].matches('\n').count() + 1)
    }

    fn err(&self, code: ErrorCode, path: impl Into<String>, message: impl Into<String>) -> SceneError {
        let path = path.into();
        SceneError {
            code,
            line: self.line_of(&path),
            path,
            message: message.into(),
        }
    }

    fn num(&self, raw: &RawNum, path: String) -> Result<f64, SceneError> {
        match raw {
            RawNum::Num(v) => Ok(*v),
            RawNum::Expr(s) => eval_expr(s).map_err(|m| self.err(ErrorCode::Parse, path, m)),
        }
    }

    fn nums(&self, raw: &[RawNum], field: &str) -> Result<Vec<f64>, SceneError> {
        raw.iter()
            .enumerate()
            .map(|(i, r)| self.num(r, format!("{field}[{i}]")))
            .collect()
    }

    fn expect_len(&self, field: &str, got: usize, expected: usize) -> Result<(), SceneError> {
        if got != expected {
            return Err(self.err(
                ErrorCode::LengthMismatch,
                field,
                format!("expected {expected} entries (one per knot), got {got}"),
            ));
        }
        Ok(())
    }

    fn positive(&self, field: &str, values: &[f64]) -> Result<(), SceneError> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(self.err(ErrorCode::NonPositive, format!("{field}[{i}]"), format!("must be positive, got {v}")));
        }
        Ok(())
    }

    fn core(&self, e: GtbError) -> SceneError {
        let (code, path) = match &e {
            GtbError::LengthMismatch { what, .. } => (ErrorCode::LengthMismatch, field_of(what).to_string()),
            GtbError::NonPositive { what, index, .. } => (ErrorCode::NonPositive, format!("{}[{index}]", field_of(what))),
            GtbError::InvalidKnots(_) | GtbError::DegenerateHull(_) => (ErrorCode::DegenerateKnots, "knots".into()),
            _ => (ErrorCode::Invalid, "scene".into()),
        };
        self.err(code, path, e.to_string())
    }
}

fn field_of(what: &str) -> &str {
    match what {
        "control points" => "control",
        "lifting" => "lifting",
        "weights" => "weights",
        "coefficients" => "coefficients",
        _ => "scene",
    }
}

impl Scene {
    pub fn load(path: &Path) -> Result<Scene, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
        Scene::parse(&text).map_err(LoadError::Invalid)
    }

    pub fn parse(text: &str) -> Result<Scene, SceneError> {
        let ctx = Ctx { text };
        let raw: RawScene = serde_json::from_str(text).map_err(|e| SceneError {
            code: ErrorCode::Parse,
            path: "scene".into(),
            line: Some(e.line()),
            message: e.to_string(),
        })?;
        let n = raw.knots.len();
        let knots = match raw.kind {
            Kind::Curve => Knots::Line(
                raw.knots
                    .iter()
                    .enumerate()
                    .map(|(i, k)| match k {
                        RawKnot::Line(v) => ctx.num(v, format!("knots[{i}]")),
                        RawKnot::Plane(_) => Err(ctx.err(ErrorCode::Parse, format!("knots[{i}]"), "curve knots are single numbers")),
                    })
                    .collect::<Result<_, _>>()?,
            ),
            Kind::Surface => Knots::Plane(
                raw.knots
                    .iter()
                    .enumerate()
                    .map(|(i, k)| match k {
                        RawKnot::Plane([u, v]) => Ok([ctx.num(u, format!("knots[{i}][0]"))?, ctx.num(v, format!("knots[{i}][1]"))?]),
                        RawKnot::Line(_) => Err(ctx.err(ErrorCode::Parse, format!("knots[{i}]"), "surface knots are [u, v] pairs")),
                    })
                    .collect::<Result<_, _>>()?,
            ),
        };

        let optional = |v: &Option<Vec<RawNum>>, field: &str| -> Result<Option<Vec<f64>>, SceneError> {
            v.as_ref()
                .map(|v| {
                    let out = ctx.nums(v, field)?;
                    ctx.expect_len(field, out.len(), n)?;
                    Ok(out)
                })
                .transpose()
        };
        let coefficients = optional(&raw.coefficients, "coefficients")?;
        let weights = optional(&raw.weights, "weights")?;
        let lifting = optional(&raw.lifting, "lifting")?;
        if let Some(c) = &coefficients {
            ctx.positive("coefficients", c)?;
        }
        if let Some(w) = &weights {
            ctx.positive("weights", w)?;
        }

        ctx.expect_len("control", raw.control.len(), n)?;
        let control: Vec<Vec<f64>> = raw
            .control
            .iter()
            .enumerate()
            .map(|(i, p)| ctx.nums(p, &format!("control[{i}]")))
            .collect::<Result<_, _>>()?;
        let dims: &[usize] = match raw.kind {
            Kind::Curve => &[2, 3],
            Kind::Surface => &[3],
        };
        let dim = control.first().map_or(dims[0], Vec::len);
        if let Some(i) = control.iter().position(|p| p.len() != dim || !dims.contains(&p.len())) {
            return Err(ctx.err(
                ErrorCode::LengthMismatch,
                format!("control[{i}]"),
                format!("control points need {dims:?} coordinates, all alike (got {})", control[i].len()),
            ));
        }

        let scale = raw
            .scale
            .as_ref()
            .map(|s| -> Result<Scale, SceneError> {
                let s = Scale {
                    k0: ctx.num(&s.k0, "scale.k0".into())?,
                    k1: ctx.num(&s.k1, "scale.k1".into())?,
                };
                ctx.positive("scale", &[s.k0, s.k1])?;
                Ok(s)
            })
            .transpose()?;

        let scene = Scene {
            kind: raw.kind,
            knots,
            coefficients,
            weights,
            control,
            scale,
            lifting,
            normalization: raw.normalization,
        };
        scene.build_in(&ctx)?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn strategy(&self) -> NormalizationStrategy {
        self.normalization.map(Into::into).unwrap_or_default()
    }

    pub fn lifting(&self) -> Option<Lifting> {
        self.lifting.clone().map(|l| Lifting::new(l).expect("validated on load"))
    }

    pub fn build(&self) -> Result<Model, SceneError> {
        self.build_in(&Ctx { text: "" })
    }

    fn build_in(&self, ctx: &Ctx<'_>) -> Result<Model, SceneError> {
        let n = self.len();
        let coeffs = Coefficients::new(self.coefficients.clone().unwrap_or_else(|| vec![1.0; n])).map_err(|e| ctx.core(e))?;
        let weights = Weights::new(self.weights.clone().unwrap_or_else(|| vec![1.0; n])).map_err(|e| ctx.core(e))?;
        if let Some(l) = &self.lifting {
            Lifting::new(l.clone()).map_err(|e| ctx.err(ErrorCode::Invalid, "lifting", e.to_string()))?;
        }
        match &self.knots {
            Knots::Line(k) => {
                let ks = KnotSet1D::new(k.clone()).map_err(|e| ctx.core(e))?;
                let s = self.scale.unwrap_or(Scale { k0: 1.0, k1: 1.0 });
                let scale = ScaleParams::new(s.k0, s.k1).map_err(|e| ctx.err(ErrorCode::NonPositive, "scale", e.to_string()))?;
                let model = if self.control[0].len() == 2 {
                    let ctl = self.control.iter().map(|p| [p[0], p[1]]).collect();
                    Model::Curve2(GtBezierCurve::new(ks, coeffs, weights, ctl, scale).map_err(|e| ctx.core(e))?)
                } else {
                    let ctl = self.control.iter().map(|p| [p[0], p[1], p[2]]).collect();
                    Model::Curve3(GtBezierCurve::new(ks, coeffs, weights, ctl, scale).map_err(|e| ctx.core(e))?)
                };
                Ok(model)
            }
            Knots::Plane(k) => {
                if self.scale.is_some() {
                    return Err(ctx.err(ErrorCode::Invalid, "scale", "surfaces take no scale parameters"));
                }
                let ks = KnotSet2D::new(k.clone()).map_err(|e| ctx.core(e))?;
                let ctl = self.control.iter().map(|p| [p[0], p[1], p[2]]).collect();
                let sf = GtBezierSurface::new(ks, coeffs, weights, ctl, self.strategy()).map_err(|e| ctx.core(e))?;
                Ok(Model::Surface(sf))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadError {
    Io(String),
    Invalid(SceneError),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(m) => write!(f, "cannot read scene: {m}"),
            LoadError::Invalid(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for LoadError {}

#[cfg(test)]
mod tests {
    use super::*;

    const CURVE: &str = r#"{
  "kind": "curve",
  "knots": [0, "sqrt(2)/4", 0.5, "sqrt(2)/2", 1],
  "weights": [1, 10, 20, 6, 5],
  "control": [[0, 0], [0.4, 1.3], [2, 2], [3.7, 1.5], [4, 0]],
  "lifting": [2, 1, 5, "9 - 4*sqrt(2)", 1]
}"#;

    #[test]
    fn loads_expressions() {
        let s = Scene::parse(CURVE).unwrap();
        assert_eq!(s.knots, Knots::Line(vec![0.0, 2f64.sqrt() / 4.0, 0.5, 2f64.sqrt() / 2.0, 1.0]));
        assert_eq!(s.lifting.as_ref().unwrap()[3], 9.0 - 4.0 * 2f64.sqrt());
        assert!(matches!(s.build().unwrap(), Model::Curve2(_)));
    }

    #[test]
    fn round_trips_bit_for_bit() {
        let s = Scene::parse(CURVE).unwrap();
        let again = Scene::parse(&s.to_json()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.to_json(), again.to_json());
    }

    #[test]
    fn errors_carry_code_path_and_line() {
        let short = CURVE.replace("[1, 10, 20, 6, 5]", "[1, 10, 20, 6]");
        let e = Scene::parse(&short).unwrap_err();
        assert_eq!((e.code, e.path.as_str(), e.line), (ErrorCode::LengthMismatch, "weights", Some(4)));

        let neg = CURVE.replace("[1, 10, 20, 6, 5]", "[1, 10, -20, 6, 5]");
        let e = Scene::parse(&neg).unwrap_err();
        assert_eq!((e.code, e.path.as_str()), (ErrorCode::NonPositive, "weights[2]"));

        let bad = CURVE.replace("\"sqrt(2)/4\"", "\"sqrt(2/\"");
        assert_eq!(Scene::parse(&bad).unwrap_err().code, ErrorCode::Parse);

        let e = Scene::parse("{\"kind\": \"curve\",\n \"knots\": [0, 1,]}").unwrap_err();
        assert_eq!((e.code, e.line), (ErrorCode::Parse, Some(2)));

        let dup = CURVE.replace("0.5, \"sqrt(2)/2\"", "0.5, 0.25");
        assert_eq!(Scene::parse(&dup).unwrap_err().code, ErrorCode::DegenerateKnots);
    }

    #[test]
    fn collinear_surface_knots_are_degenerate() {
        let text = r#"{"kind": "surface", "knots": [[0, 0], [1, 1], [2, 2]],
            "control": [[0, 0, 0], [1, 1, 1], [2, 2, 2]]}"#;
        assert_eq!(Scene::parse(text).unwrap_err().code, ErrorCode::DegenerateKnots);
    }
}
