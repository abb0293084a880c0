//! CSV, SVG and OBJ writers. All float text goes through [`fmt_f64`], so
//! identical inputs give byte-identical files.

use std::fmt::Write as _;

/// Shortest decimal text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    ryu::Buffer::new().format(v).to_string()
}

/// CSV with a header row; each row has `header.len()` numbers.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row.into_iter().map(fmt_f64))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

/// Header names for a parameter block followed by `dim` coordinates.
pub fn csv_header(params: &[&'static str], dim: usize) -> Vec<&'static str> {
    params.iter().copied().chain(["x", "y", "z"].into_iter().take(dim)).collect()
}

/// Wavefront OBJ: vertices, then 1-based triangular faces.
pub fn obj_mesh(vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> String {
    let mut s = String::new();
    for v in vertices {
        let _ = writeln!(s, "v {} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]));
    }
    for f in faces {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

/// Layers of a 2D figure: solid curves, dashed polygons and marked points.
#[derive(Debug, Default, Clone)]
pub struct Figure {
    pub curves: Vec<Vec<[f64; 2]>>,
    pub polygons: Vec<Vec<[f64; 2]>>,
    pub points: Vec<[f64; 2]>,
}

const SVG_SIZE: f64 = 800.0;

impl Figure {
    /// SVG 1.1 with the drawing fitted to the viewport plus a 5% margin and
    /// the y axis pointing up.
    pub fn to_svg(&self) -> String {
        let all = self.curves.iter().chain(&self.polygons).flatten().chain(&self.points);
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in all.filter(|p| p[0].is_finite() && p[1].is_finite()) {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        if lo[0] > hi[0] {
            lo = [0.0; 2];
            hi = [1.0; 2];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
        let margin = 0.05 * span;
        let s = SVG_SIZE / (span + 2.0 * margin);
        let w = (hi[0] - lo[0] + 2.0 * margin) * s;
        let h = (hi[1] - lo[1] + 2.0 * margin) * s;
        let map = |p: &[f64; 2]| ((p[0] - lo[0] + margin) * s, (hi[1] - p[1] + margin) * s);
        let path = |pts: &[[f64; 2]]| {
            pts.iter()
                .map(|p| {
                    let (x, y) = map(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect::<Vec<_>>()
                .join(" ")
        };

        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for poly in &self.polygons {
            let _ = writeln!(
                out,
                r##"<polyline points="{}" fill="none" stroke="#555555" stroke-width="1.5" stroke-dasharray="6,4"/>"##,
                path(poly)
            );
        }
        for curve in &self.curves {
            let _ = writeln!(
                out,
                r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="2.5"/>"##,
                path(curve)
            );
        }
        for p in &self.points {
            let (x, y) = map(p);
            let _ = writeln!(
                out,
                r##"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="white" stroke="#1f4e79" stroke-width="1.5"/>"##
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let text = csv_table(&csv_header(&["t"], 2), vec![vec![0.0, 1.0, 2.5]]).unwrap();
        assert_eq!(text, "t,x,y\n0.0,1.0,2.5\n");
    }

    #[test]
    fn obj_faces_are_one_based() {
        let text = obj_mesh(&[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[0, 1, 2]]);
        assert!(text.ends_with("f 1 2 3\n"));
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 3);
    }

    #[test]
    fn svg_fits_with_margin() {
        let fig = Figure {
            curves: vec![vec![[0.0, 0.0], [10.0, 0.0]]],
            polygons: vec![vec![[0.0, 0.0], [5.0, 5.0], [10.0, 0.0]]],
            points: vec![[5.0, 5.0]],
        };
        let svg = fig.to_svg();
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains(r#"<circle cx="400.000" cy="36.364""#));
    }
}
