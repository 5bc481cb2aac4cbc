//! SVG drawing. Domain coordinates are y-up; the drawing flips them inside
//! a group so the viewBox can use domain units directly.

use std::fmt::Write;

use super::Failure;
use crate::candidates::{
    bisector_adjacency, boundary_foot_candidates, plausible_nodes, plausible_tuples, triple_point_candidates,
    vertex_candidates,
};
use crate::diameter::{compute_diameter, vertex_maps};
use crate::domain::{PolygonalDomain, VertexId};
use crate::geom::Point;
use crate::oracle::sample_set;
use crate::spm::build_spm;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RenderSpec {
    pub width_px: u32,
    /// Stroke width in pixels.
    pub stroke: f64,
    pub spm_source: Option<VertexId>,
    pub candidates: bool,
    pub diameter: bool,
    pub oracle_resolution: Option<f64>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self { width_px: 800, stroke: 1.5, spm_source: None, candidates: false, diameter: false, oracle_resolution: None }
    }
}

fn polyline(out: &mut String, pts: &[Point], color: &str, width: f64) {
    let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
        coords.join(" ")
    );
}

fn dot(out: &mut String, p: Point, r: f64, color: &str) {
    let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{r}" fill="{color}"/>"#, p.x, p.y);
}

pub(crate) fn render_svg(d: &PolygonalDomain, spec: &RenderSpec) -> Result<String, Failure> {
    let (lo, hi) = d.bbox();
    let margin = 0.05 * (hi.x - lo.x).max(hi.y - lo.y);
    let (x0, x1) = (lo.x - margin, hi.x + margin);
    let (y0, y1) = (lo.y - margin, hi.y + margin);
    let (w, h) = (x1 - x0, y1 - y0);
    let width_px = spec.width_px.max(64);
    let height_px = (width_px as f64 * h / w).round().max(1.0) as u32;
    let unit = w / width_px as f64;
    let stroke = spec.stroke * unit;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}" height="{height_px}" viewBox="{} {} {} {}">"#,
        x0, -y1, w, h
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
    for (k, ring) in d.rings().iter().enumerate() {
        let mut path = String::new();
        for (i, p) in ring.iter().enumerate() {
            let _ = write!(path, "{}{} {} ", if i == 0 { "M" } else { "L" }, p.x, p.y);
        }
        path.push('Z');
        let fill = if k == 0 { "#eeeeee" } else { "#ffffff" };
        let _ = writeln!(out, r#"<path d="{path}" fill="{fill}" stroke="black" stroke-width="{stroke}"/>"#);
    }
    if let Some(v) = spec.spm_source {
        let map = build_spm(d, d.vertex(v))?;
        for arc in &map.arcs {
            polyline(&mut out, &arc.polyline(64), "#1f77b4", stroke);
        }
        dot(&mut out, map.source, 3.0 * stroke, "#1f77b4");
    }
    if spec.candidates {
        let maps = vertex_maps(d)?;
        let tuples = plausible_tuples(&bisector_adjacency(d, &maps));
        let layers = [
            (vertex_candidates(d), "#444444"),
            (boundary_foot_candidates(&maps), "#2ca02c"),
            (triple_point_candidates(&maps), "#9467bd"),
            (plausible_nodes(d, &maps, &tuples), "#ff7f0e"),
        ];
        for (list, color) in &layers {
            for c in list {
                dot(&mut out, c.location, 2.0 * stroke, color);
            }
        }
    }
    if let Some(r) = spec.oracle_resolution {
        for p in sample_set(d, r)?.points {
            dot(&mut out, p, stroke, "#999999");
        }
    }
    if spec.diameter {
        let (result, _) = compute_diameter(d)?;
        polyline(&mut out, &result.witness.waypoints, "#d62728", 2.0 * stroke);
        dot(&mut out, result.p, 3.0 * stroke, "#d62728");
        dot(&mut out, result.q, 3.0 * stroke, "#d62728");
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn square_has_one_closed_path() {
        let svg = render_svg(&fixtures::unit_square(), &RenderSpec::default()).unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches('Z').count(), 1);
        assert!(svg.contains(r#"viewBox="-0.05 -1.05 1.1 1.1""#));
    }
}
