//! Scene loading, artifact writers and the `gtbezier` command set.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod expr;
pub mod output;
pub mod scene;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gtbezier_core::coefficients::{default_nodes, solve_partition_coefficients};
use gtbezier_core::degeneration::{
    degeneration_sequence_curve, degeneration_sequence_surface, regular_control_curve, regular_control_surface,
    regular_decomposition_1d, regular_decomposition_2d, CellDomain,
};
use gtbezier_core::{Exec, GtBezierCurve, GtbError, RegularDecomposition};

use crate::output::{csv_header, csv_table, obj_mesh, Figure};
use crate::scene::{Knots, LoadError, Model, Normalization, Scene};

#[derive(Debug, Parser)]
#[command(name = "gtbezier", version, about = "Evaluate, plot and analyse GT-Bezier curves and surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write sampled points as CSV (parameters, then coordinates).
    Eval(EvalArgs),
    /// Write an SVG of the curve over its control polygon.
    Plot(PlotArgs),
    /// Write a triangulated surface sample as OBJ.
    Mesh(MeshArgs),
    /// Solve for coefficients making the unweighted basis sum to one.
    SolveCoeffs(SolveArgs),
    /// Print the regular decomposition induced by the scene's lifting.
    Decompose(DecomposeArgs),
    /// Write one frame per family parameter plus a distances CSV.
    Degenerate(DegenerateArgs),
    /// Run the property suite and report pass/fail per invariant.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Primitive,
    Unit,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    /// Scene file (JSON).
    pub scene: PathBuf,
    /// Edge-line normalization for surfaces, overriding the scene.
    #[arg(long, value_enum)]
    pub normalization: Option<NormArg>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: SceneArgs,
    /// Curve samples.
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// Surface lattice resolution.
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub input: SceneArgs,
    /// Segments per curve.
    #[arg(long, default_value_t = 800)]
    pub samples: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[command(flatten)]
    pub input: SceneArgs,
    #[arg(long, default_value_t = 30)]
    pub grid: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: SceneArgs,
    /// Collocation nodes (comma separated; expressions allowed).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nodes: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: SceneArgs,
    /// Relative height tolerance for coplanar lifted points.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DegenerateArgs {
    #[command(flatten)]
    pub input: SceneArgs,
    /// Family parameters, strictly increasing and positive.
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<String>,
    /// Curve resolution (points across the control net).
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Surface resolution.
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
    /// Output directory.
    #[arg(short, long, default_value = ".")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: SceneArgs,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 30)]
    pub grid: usize,
}

/// Failure classes, each with its own exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<GtbError> for CliError {
    fn from(e: GtbError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io(m) => CliError::Io(m),
            LoadError::Invalid(e) => CliError::Validation(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn load(args: &SceneArgs) -> Result<(Scene, Model), CliError> {
    let mut scene = Scene::load(&args.scene)?;
    if let Some(n) = args.normalization {
        scene.normalization = Some(match n {
            NormArg::Primitive => Normalization::Primitive,
            NormArg::Unit => Normalization::Unit,
        });
    }
    let model = scene.build().map_err(|e| CliError::Validation(e.to_string()))?;
    Ok((scene, model))
}

/// Writes to `path`, or to stdout when `path` is `None`.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn parse_list(items: &[String], what: &str) -> Result<Vec<f64>, CliError> {
    items
        .iter()
        .map(|s| expr::eval_expr(s.trim()).map_err(|m| CliError::Validation(format!("{what}: {m}"))))
        .collect()
}

fn xy<const D: usize>(p: &[f64; D]) -> [f64; 2] {
    [p[0], p[1]]
}

/// Runs one command, returning the process exit code on success (0, or 1
/// when `check` finds a failing property).
pub fn run(cli: Cli) -> Result<i32, CliError> {
    let exec = Exec::default();
    match cli.command {
        Command::Eval(a) => {
            let (_, model) = load(&a.input)?;
            let text = match &model {
                Model::Curve2(cv) => curve_csv(cv, a.samples, exec)?,
                Model::Curve3(cv) => curve_csv(cv, a.samples, exec)?,
                Model::Surface(sf) => {
                    let mesh = sf.sample_with(a.grid, exec)?;
                    let rows = mesh.params.iter().zip(&mesh.vertices).map(|(p, v)| vec![p[0], p[1], v[0], v[1], v[2]]);
                    csv_table(&csv_header(&["u", "v"], 3), rows).map_err(|e| CliError::Io(e.to_string()))?
                }
            };
            emit(a.output.as_deref(), &text)?;
        }
        Command::Plot(a) => {
            let (_, model) = load(&a.input)?;
            let fig = match &model {
                Model::Curve2(cv) => curve_figure(cv, a.samples, exec)?,
                Model::Curve3(cv) => curve_figure(cv, a.samples, exec)?,
                Model::Surface(sf) => {
                    let mut fig = Figure {
                        points: sf.control().iter().map(xy).collect(),
                        ..Figure::default()
                    };
                    for e in 0..sf.hull().num_edges() {
                        let bc = sf.boundary_curve(e)?;
                        fig.curves.push(bc.sample_with(a.samples + 1, exec)?.points.iter().map(xy).collect());
                    }
                    fig
                }
            };
            emit(a.output.as_deref(), &fig.to_svg())?;
        }
        Command::Mesh(a) => {
            let (_, model) = load(&a.input)?;
            let Model::Surface(sf) = &model else {
                return Err(CliError::Validation("mesh needs a surface scene".into()));
            };
            let mesh = sf.sample_with(a.grid, exec)?;
            emit(a.output.as_deref(), &obj_mesh(&mesh.vertices, &mesh.faces))?;
        }
        Command::SolveCoeffs(a) => {
            let (scene, model) = load(&a.input)?;
            let (ks, scale) = match &model {
                Model::Curve2(cv) => (cv.knots().clone(), cv.scale()),
                Model::Curve3(cv) => (cv.knots().clone(), cv.scale()),
                Model::Surface(_) => return Err(CliError::Validation("solve-coeffs needs a curve scene".into())),
            };
            let nodes = match &a.nodes {
                Some(list) => parse_list(list, "nodes")?,
                None => default_nodes(&ks),
            };
            log::info!("solving {} coefficients for {}", scene.len(), a.input.scene.display());
            let sol = solve_partition_coefficients(&ks, scale, &nodes)?;
            let list = sol.values.iter().map(|v| output::fmt_f64(*v)).collect::<Vec<_>>().join(",");
            let mut text = format!("coefficients: {list}\nresidual: {:e}\ncondition: {:e}\n", sol.residual, sol.condition);
            if sol.nonpositive {
                text.push_str("warning: some coefficients are not positive\n");
            }
            emit(None, &text)?;
        }
        Command::Decompose(a) => {
            let (scene, model) = load(&a.input)?;
            let lam = scene
                .lifting()
                .ok_or_else(|| CliError::Validation("scene has no lifting".into()))?;
            let dec = match &model {
                Model::Curve2(cv) => regular_decomposition_1d(cv.knots(), &lam, a.tol)?,
                Model::Curve3(cv) => regular_decomposition_1d(cv.knots(), &lam, a.tol)?,
                Model::Surface(sf) => regular_decomposition_2d(sf.knots(), sf.hull(), &lam, a.tol)?,
            };
            emit(None, &describe_decomposition(&scene, &dec))?;
        }
        Command::Degenerate(a) => {
            let (scene, model) = load(&a.input)?;
            let lam = scene
                .lifting()
                .ok_or_else(|| CliError::Validation("scene has no lifting".into()))?;
            let xs = parse_list(&a.x, "x")?;
            std::fs::create_dir_all(&a.output).map_err(|e| io_err(&a.output, e))?;
            let write = |name: String, text: &str| {
                let p = a.output.join(name);
                std::fs::write(&p, text).map_err(|e| io_err(&p, e))
            };
            let distances: Vec<(f64, f64)> = match &model {
                Model::Curve2(cv) => degenerate_curve(cv, &lam, &xs, a.samples, exec, &write)?,
                Model::Curve3(cv) => degenerate_curve(cv, &lam, &xs, a.samples, exec, &write)?,
                Model::Surface(sf) => {
                    let (dec, frames) = degeneration_sequence_surface(sf, &lam, &xs, a.grid, exec)?;
                    let target = regular_control_surface(sf, &dec, a.grid)?;
                    write("control.obj".into(), &obj_mesh(target.points(), &[]))?;
                    for (i, f) in frames.iter().enumerate() {
                        write(format!("frame_{i:02}.obj"), &obj_mesh(f.shape.points(), &[]))?;
                    }
                    frames.iter().map(|f| (f.x, f.distance)).collect()
                }
            };
            let csv = csv_table(&["x", "hausdorff"], distances.iter().map(|&(x, d)| vec![x, d]))
                .map_err(|e| CliError::Io(e.to_string()))?;
            write("distances.csv".into(), &csv)?;
            emit(None, &csv)?;
        }
        Command::Check(a) => {
            let (_, model) = load(&a.input)?;
            let report = match &model {
                Model::Curve2(cv) => check::check_planar_curve(cv, a.samples, exec),
                Model::Curve3(cv) => check::check_curve(cv, a.samples, exec),
                Model::Surface(sf) => check::check_surface(sf, a.grid, exec),
            };
            let mut text = String::new();
            for c in &report {
                text.push_str(&c.to_string());
                text.push('\n');
            }
            let failed = report.iter().filter(|c| c.status == check::Status::Fail).count();
            text.push_str(&format!("{} checks, {failed} failed\n", report.len()));
            emit(None, &text)?;
            return Ok(if failed == 0 { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn curve_csv<const D: usize>(cv: &GtBezierCurve<D>, samples: usize, exec: Exec) -> Result<String, CliError> {
    let poly = cv.sample_with(samples, exec)?;
    let rows = poly.params.iter().zip(&poly.points).map(|(t, p)| {
        let mut row = vec![*t];
        row.extend_from_slice(p);
        row
    });
    csv_table(&csv_header(&["t"], D), rows).map_err(|e| CliError::Io(e.to_string()))
}

fn curve_figure<const D: usize>(cv: &GtBezierCurve<D>, samples: usize, exec: Exec) -> Result<Figure, CliError> {
    let curve = cv.sample_with(samples + 1, exec)?;
    Ok(Figure {
        curves: vec![curve.points.iter().map(xy).collect()],
        polygons: vec![cv.control().iter().map(xy).collect()],
        points: cv.control().iter().map(xy).collect(),
    })
}

fn degenerate_curve<const D: usize>(
    cv: &GtBezierCurve<D>,
    lam: &gtbezier_core::Lifting,
    xs: &[f64],
    samples: usize,
    exec: Exec,
    write: &dyn Fn(String, &str) -> Result<(), CliError>,
) -> Result<Vec<(f64, f64)>, CliError> {
    let (dec, frames) = degeneration_sequence_curve(cv, lam, xs, samples, exec)?;
    let polygon: Vec<[f64; 2]> = cv.control().iter().map(xy).collect();
    let target = regular_control_curve(cv, &dec, samples)?;
    let frame = |pts: &[[f64; D]]| Figure {
        curves: vec![pts.iter().map(xy).collect()],
        polygons: vec![polygon.clone()],
        points: polygon.clone(),
    };
    write("control.svg".into(), &frame(target.points()).to_svg())?;
    for (i, f) in frames.iter().enumerate() {
        write(format!("frame_{i:02}.svg"), &frame(f.shape.points()).to_svg())?;
    }
    Ok(frames.iter().map(|f| (f.x, f.distance)).collect())
}

fn describe_decomposition(scene: &Scene, dec: &RegularDecomposition) -> String {
    let fmt = |v: f64| output::fmt_f64(v);
    let knot = |i: usize| match &scene.knots {
        Knots::Line(k) => fmt(k[i]),
        Knots::Plane(k) => format!("({}, {})", fmt(k[i][0]), fmt(k[i][1])),
    };
    let mut s = format!("cells: {}\n", dec.cells.len());
    for (c, (cell, dom)) in dec.cells.iter().zip(&dec.cell_domains).enumerate() {
        let knots = cell.iter().map(|&i| knot(i)).collect::<Vec<_>>().join(", ");
        let domain = match dom {
            CellDomain::Interval(iv) => format!("[{}, {}]", fmt(iv.lo), fmt(iv.hi)),
            CellDomain::Polygon(p) => {
                let corners = p.iter().map(|q| format!("({}, {})", fmt(q[0]), fmt(q[1]))).collect::<Vec<_>>();
                format!("polygon with {} corners {}", p.len(), corners.join(" "))
            }
        };
        s.push_str(&format!("cell {c}: indices {cell:?} knots {{{knots}}} domain {domain}\n"));
    }
    let omitted = dec.omitted.iter().map(|&i| knot(i)).collect::<Vec<_>>().join(", ");
    s.push_str(&format!("omitted: indices {:?} knots {{{omitted}}}\n", dec.omitted));
    s
}
