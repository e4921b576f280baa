//! SVG rendering of subdivided complexes of dimension at most 2, with
//! optional per-stage retraction overlays: grey fill on top simplices whose
//! composite image drops into the carrier's boundary, a distinct fill on the
//! unique top simplex mapped onto its carrier, and thick edges from each
//! vertex to its image under the current stage map.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::retraction::{build_r1, build_rj};
use crate::subdivision::SubdivisionTower;

/// One drawing: a complex with vertex positions, fills, and stage arrows.
pub struct RenderPanel {
    pub label: String,
    pub complex: Arc<SimplicialComplex>,
    pub positions: BTreeMap<u32, [f64; 2]>,
    /// Top simplices drawn with the distinct "mapped onto carrier" fill.
    pub onto: Vec<Simplex>,
    /// Whether fills distinguish onto/boundary (false draws a plain wireframe).
    pub has_map: bool,
    /// Thick edges from each vertex to its stage image.
    pub arrows: Vec<([f64; 2], [f64; 2])>,
}

/// Standard positions for a base consisting of a single simplex of
/// dimension at most 2; other bases need explicit layout coordinates.
pub fn auto_layout(base: &SimplicialComplex) -> Result<BTreeMap<u32, Vec<f64>>> {
    let tops = base.maximal_simplices();
    if tops.len() != 1 {
        return Err(Error::InvalidDocument(
            "layout coordinates are required for complexes with more than one maximal simplex"
                .into(),
        ));
    }
    let verts = tops[0].vertices().to_vec();
    let shape: &[[f64; 2]] = match verts.len() {
        1 => &[[0.0, 0.0]],
        2 => &[[0.0, 0.0], [1.0, 0.0]],
        3 => &[[0.0, 0.0], [1.0, 0.0], [0.5, 0.866_025_403_784_438_6]],
        n => return Err(Error::UnsupportedRender(n - 1)),
    };
    Ok(verts
        .into_iter()
        .zip(shape.iter().map(|p| p.to_vec()))
        .collect())
}

fn positions_at(
    tower: &SubdivisionTower,
    level: usize,
    layout: &BTreeMap<u32, Vec<f64>>,
) -> Result<BTreeMap<u32, [f64; 2]>> {
    let mut out = BTreeMap::new();
    for v in tower.complex(level)?.vertex_ids() {
        let point = tower.base_pos(level, v)?;
        let mut pos = [0.0_f64; 2];
        for (base_vertex, weight) in point.support().iter().zip(point.coords()) {
            let coords = layout.get(base_vertex).ok_or_else(|| {
                Error::InvalidDocument(format!("vertex {base_vertex} has no layout coordinates"))
            })?;
            pos[0] += weight * coords[0];
            pos[1] += weight * coords.get(1).copied().unwrap_or(0.0);
        }
        out.insert(v, pos);
    }
    Ok(out)
}

/// Build the panels for `Sd^depth base`: a plain wireframe, or with
/// `stages` one panel per level overlaying the stage retraction.
pub fn subdivision_panels(
    base: Arc<SimplicialComplex>,
    layout: &BTreeMap<u32, Vec<f64>>,
    depth: usize,
    stages: bool,
) -> Result<Vec<RenderPanel>> {
    let dim = base
        .maximal_simplices()
        .iter()
        .map(|s| s.dim())
        .max()
        .unwrap_or(0);
    if dim > 2 {
        return Err(Error::UnsupportedRender(dim));
    }
    let mut tower = SubdivisionTower::new(base.clone());
    tower.ensure_depth(depth)?;

    if !stages || depth == 0 {
        return Ok(vec![RenderPanel {
            label: format!("level {depth}"),
            complex: tower.complex(depth)?.clone(),
            positions: positions_at(&tower, depth, layout)?,
            onto: Vec::new(),
            has_map: false,
            arrows: Vec::new(),
        }]);
    }

    let mut panels = Vec::new();
    let mut composite: Option<SimplicialMap> = None;
    for j in 1..=depth {
        let stage = if j == 1 {
            build_r1(&tower)?
        } else {
            build_rj(&tower, j)?
        };
        composite = Some(match composite {
            None => stage.clone(),
            Some(prev) => SimplicialMap::compose(&prev, &stage)?,
        });
        let to_base = composite.as_ref().expect("composite built");
        let complex = tower.complex(j)?.clone();
        let positions = positions_at(&tower, j, layout)?;
        let below = positions_at(&tower, j - 1, layout)?;

        let mut tops = complex.maximal_simplices();
        tops.sort();
        let onto = tops
            .iter()
            .filter(|t| to_base.apply(t).dim() == t.dim())
            .cloned()
            .collect();

        let mut arrows = Vec::new();
        for v in complex.vertex_ids() {
            let w = stage.image_of_vertex(v);
            let from = positions[&v];
            let to = below[&w];
            if (from[0] - to[0]).abs() > 1e-12 || (from[1] - to[1]).abs() > 1e-12 {
                arrows.push((from, to));
            }
        }

        panels.push(RenderPanel {
            label: format!("level {j}, stage {j}"),
            complex,
            positions,
            onto,
            has_map: true,
            arrows,
        });
    }
    Ok(panels)
}

const PANEL_SIZE: f64 = 420.0;
const MARGIN: f64 = 34.0;
const GAP: f64 = 40.0;

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render panels side by side as a standalone SVG 1.1 document with exactly
/// one polygon per top simplex.
pub fn render_svg(panels: &[RenderPanel]) -> Result<String> {
    if panels.is_empty() {
        return Err(Error::InvalidDocument("nothing to render".into()));
    }
    struct Placed<'a> {
        panel: &'a RenderPanel,
        scale: f64,
        offset: [f64; 2],
    }
    let mut placed = Vec::new();
    let mut cursor = MARGIN;
    let mut height: f64 = 0.0;
    for panel in panels {
        if panel.positions.is_empty() {
            return Err(Error::InvalidDocument(format!(
                "panel {:?} has no vertices",
                panel.label
            )));
        }
        let dim = panel
            .complex
            .maximal_simplices()
            .iter()
            .map(|s| s.dim())
            .max()
            .unwrap_or(0);
        if dim > 2 {
            return Err(Error::UnsupportedRender(dim));
        }
        let xs: Vec<f64> = panel.positions.values().map(|p| p[0]).collect();
        let ys: Vec<f64> = panel.positions.values().map(|p| p[1]).collect();
        let (min_x, max_x) = (xs.iter().cloned().fold(f64::MAX, f64::min), xs.iter().cloned().fold(f64::MIN, f64::max));
        let (min_y, max_y) = (ys.iter().cloned().fold(f64::MAX, f64::min), ys.iter().cloned().fold(f64::MIN, f64::max));
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        let scale = PANEL_SIZE / span;
        let w = (max_x - min_x) * scale;
        let h = (max_y - min_y) * scale;
        // SVG y grows downward; flip so layout y grows upward.
        placed.push(Placed {
            panel,
            scale,
            offset: [cursor - min_x * scale, MARGIN + h + min_y * scale],
        });
        cursor += w + GAP;
        height = height.max(h + 2.0 * MARGIN + 24.0);
    }
    let width = cursor - GAP + MARGIN;

    let mut svg = String::new();
    let _ = writeln!(svg, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.1}\" height=\"{height:.1}\" viewBox=\"0 0 {width:.1} {height:.1}\">"
    );
    for p in &placed {
        let px = |pos: [f64; 2]| -> (f64, f64) {
            (pos[0] * p.scale + p.offset[0], p.offset[1] - pos[1] * p.scale)
        };
        let _ = writeln!(svg, "  <g>");
        let mut tops = p.panel.complex.maximal_simplices();
        tops.sort();
        for top in &tops {
            let pts: Vec<String> = top
                .vertices()
                .iter()
                .map(|v| {
                    let (x, y) = px(p.panel.positions[v]);
                    format!("{x:.4},{y:.4}")
                })
                .collect();
            let fill = if !p.panel.has_map {
                "#f2f2f2"
            } else if p.panel.onto.contains(top) {
                "#8dd3c7"
            } else {
                "#d9d9d9"
            };
            let fill = if top.dim() < 2 { "none" } else { fill };
            let _ = writeln!(
                svg,
                "    <polygon points=\"{}\" fill=\"{fill}\" stroke=\"#444444\" stroke-width=\"1\"/>",
                pts.join(" ")
            );
        }
        for (from, to) in &p.panel.arrows {
            let (x1, y1) = px(*from);
            let (x2, y2) = px(*to);
            let _ = writeln!(
                svg,
                "    <line x1=\"{x1:.4}\" y1=\"{y1:.4}\" x2=\"{x2:.4}\" y2=\"{y2:.4}\" stroke=\"#1f3552\" stroke-width=\"3\" stroke-linecap=\"round\" opacity=\"0.85\"/>"
            );
        }
        for pos in p.panel.positions.values() {
            let (x, y) = px(*pos);
            let _ = writeln!(
                svg,
                "    <circle cx=\"{x:.4}\" cy=\"{y:.4}\" r=\"2.4\" fill=\"#1f3552\"/>"
            );
        }
        let (lx, ly) = (p.offset[0], height - 10.0);
        let _ = writeln!(
            svg,
            "    <text x=\"{lx:.1}\" y=\"{ly:.1}\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#222222\">{}</text>",
            xml_escape(&p.panel.label)
        );
        let _ = writeln!(svg, "  </g>");
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
