//! SVG rendering of a solved flow tree over the disk D_R.

use std::collections::BTreeMap;
use std::fmt::Write;

use foldtree::geom::V2;
use foldtree::solver::{sample_trajectories, FlowTreeProblem};
use foldtree::trees::VertexKind;

use crate::CliError;

const SIZE: f64 = 480.0;
const LEGEND: f64 = 200.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// Samples per strand.
pub const SAMPLES: usize = 64;

/// One polyline per lifted edge, colored by its pair of sheet labels, with
/// generator points as circles and marginal vertices as squares.
pub fn render(p: &FlowTreeProblem, unknowns: &[f64]) -> Result<String, CliError> {
    let r = p.chain.radius;
    let s = 0.45 * SIZE / r;
    let at = |x: V2| (SIZE / 2.0 + s * x.x, SIZE / 2.0 - s * x.y);
    let trajectories = sample_trajectories(p, unknowns, SAMPLES)?;
    let shot = p.shoot(unknowns)?;
    let g = &p.graph;

    let mut colors: BTreeMap<(usize, usize, usize, usize), usize> = BTreeMap::new();
    let mut svg = String::new();
    let w = SIZE + LEGEND;
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{SIZE}" viewBox="0 0 {w} {SIZE}">"#).unwrap();
    writeln!(svg, r#"<rect width="{w}" height="{SIZE}" fill="white"/>"#).unwrap();
    let (cx, cy) = at(V2::ZERO);
    writeln!(svg, r##"<circle class="disk" cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="#999" stroke-dasharray="4 3"/>"##, s * r)
        .unwrap();
    for t in &trajectories {
        let l = g.edges[t.strand];
        let lab = g.labels(t.strand);
        let key = (lab.il, l.hl, lab.ir, l.hr);
        let n = colors.len();
        let c = COLORS[*colors.entry(key).or_insert(n) % COLORS.len()];
        let pts: Vec<String> = t
            .points
            .iter()
            .map(|&x| {
                let (a, b) = at(x);
                format!("{a:.3},{b:.3}")
            })
            .collect();
        writeln!(
            svg,
            r#"<polyline class="strand" data-strand="{}" data-edge="{}" points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#,
            t.strand,
            t.base,
            pts.join(" ")
        )
        .unwrap();
    }
    let mut gens: Vec<V2> = p.inputs.iter().chain([&p.output]).flat_map(|q| q.points.iter().copied()).collect();
    gens.dedup();
    for x in gens {
        let (a, b) = at(x);
        writeln!(svg, r#"<circle class="generator" cx="{a:.3}" cy="{b:.3}" r="3.5" fill="black"/>"#).unwrap();
    }
    for (_, [a, _]) in &g.marginal_pairs {
        if let (_, Some(x)) = shot.strand_ends[*a] {
            let (u, v) = at(x);
            writeln!(svg, r#"<rect class="marginal" x="{:.3}" y="{:.3}" width="7" height="7" fill="none" stroke="black"/>"#, u - 3.5, v - 3.5)
                .unwrap();
        }
    }
    let marginal = g.base.vertices.iter().filter(|&&k| k == VertexKind::Marginal).count();
    let mut by_color: Vec<(usize, (usize, usize, usize, usize))> = colors.into_iter().map(|(k, i)| (i, k)).collect();
    by_color.sort();
    for (row, (i, (il, hl, ir, hr))) in by_color.into_iter().enumerate() {
        let y = 24.0 + 18.0 * row as f64;
        let c = COLORS[i % COLORS.len()];
        writeln!(svg, r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{c}" stroke-width="3"/>"#, SIZE + 10.0, SIZE + 34.0)
            .unwrap();
        writeln!(
            svg,
            r#"<text class="legend" x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">f({il},{hl}) - f({ir},{hr})</text>"#,
            SIZE + 40.0,
            y + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">kappa {} marginal {marginal} R {r}</text>"#,
        SIZE + 10.0,
        SIZE - 12.0,
        g.base.kappa
    )
    .unwrap();
    svg.push_str("</svg>\n");
    Ok(svg)
}
