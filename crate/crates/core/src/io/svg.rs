use std::fmt::Write;

use crate::error::{Error, Result};
use crate::kinggraph::{LatticeGraph, BOX};
use crate::rational;
use crate::tile::{Circuit, Decoration, Edge, Selector, Tile, TileKind};

#[derive(Clone, Debug)]
pub struct SvgOptions {
    pub cell: f64,
    pub show_weights: bool,
    pub highlight: Vec<usize>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { cell: 24.0, show_weights: false, highlight: Vec::new() }
    }
}

fn header(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.1}\" height=\"{h:.1}\" viewBox=\"0 0 {w:.1} {h:.1}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Fails if the highlight set is out of range or not independent.
pub fn render_graph(g: &LatticeGraph, o: &SvgOptions) -> Result<String> {
    if o.highlight.iter().any(|&i| i >= g.len()) || !g.is_independent(&o.highlight) {
        return Err(Error::Graph("highlight set is not an independent set of the graph".into()));
    }
    let s = o.cell;
    let boxes = g.boxes();
    let (by0, by1) = (boxes.iter().map(|b| b.0).min().unwrap_or(0), boxes.iter().map(|b| b.0).max().unwrap_or(0));
    let (bx0, bx1) = (boxes.iter().map(|b| b.1).min().unwrap_or(0), boxes.iter().map(|b| b.1).max().unwrap_or(0));
    let (minx, miny) = (bx0 * BOX, by0 * BOX);
    let px = |x: i64| (x - minx) as f64 * s + s / 2.0;
    let py = |y: i64| (y - miny) as f64 * s + s / 2.0;
    let side = BOX as f64 * s;
    let w = (bx1 - bx0 + 1) as f64 * side;
    let h = (by1 - by0 + 1) as f64 * side;
    let mut out = header(w, h);
    // Tile boxes.
    for by in by0..=by1 {
        for bx in bx0..=bx1 {
            let x = (bx - bx0) as f64 * side;
            let y = (by - by0) as f64 * side;
            writeln!(out, "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{side:.1}\" height=\"{side:.1}\" fill=\"none\" stroke=\"#dddddd\" stroke-dasharray=\"3,3\"/>").unwrap();
        }
    }
    for a in 0..g.len() {
        for &b in g.neighbors(a) {
            if b > a {
                let (va, vb) = (&g.vertices[a], &g.vertices[b]);
                writeln!(out, "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#999999\" stroke-width=\"1\"/>", px(va.x), py(va.y), px(vb.x), py(vb.y)).unwrap();
            }
        }
    }
    let hl: std::collections::BTreeSet<usize> = o.highlight.iter().copied().collect();
    for (i, v) in g.vertices.iter().enumerate() {
        let r = s * (0.16 + 0.04 * v.weight.coeff.clamp(0, 4) as f64);
        let fill = match (hl.contains(&i), v.conn.is_some()) {
            (true, _) => "#2ca02c",
            (false, true) => "#ffe0b0",
            (false, false) => "white",
        };
        writeln!(out, "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"{r:.1}\" fill=\"{fill}\" stroke=\"black\" stroke-width=\"1\"><title>{}</title></circle>", px(v.x), py(v.y), esc(&v.label)).unwrap();
        if o.show_weights {
            writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"{:.1}\" text-anchor=\"middle\">{}</text>", px(v.x), py(v.y) - r - 2.0, s * 0.3, esc(&v.weight.to_string())).unwrap();
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn edge_point(cx: f64, cy: f64, half: f64, e: Edge) -> (f64, f64) {
    match e {
        Edge::Right => (cx + half, cy),
        Edge::Top => (cx, cy - half),
        Edge::Left => (cx - half, cy),
        Edge::Bottom => (cx, cy + half),
    }
}

fn kind_tag(t: &Tile) -> &'static str {
    match t.kind {
        TileKind::Variable => "var",
        TileKind::Terminator => "end",
        TileKind::OrGate => "OR",
        TileKind::AndGate => "AND",
        TileKind::CornerMeet => "meet",
        TileKind::Custom => "?",
        _ => "",
    }
}

fn sel_text(sel: &Selector) -> String {
    match sel {
        Selector::Wire(b) => format!("{}", *b as u8),
        Selector::Pair(i, j) => format!("{}{}", *i as u8, *j as u8),
        Selector::Edges(v) => v.iter().map(|(e, b)| format!("{}={}", e.index(), *b as u8)).collect::<Vec<_>>().join(","),
    }
}

pub fn render_circuit(c: &Circuit, o: &SvgOptions) -> String {
    let s = o.cell * 3.0;
    let w = c.cols as f64 * s + 2.0;
    let h = c.rows as f64 * s + 2.0;
    let mut out = header(w, h);
    for r in 0..c.rows {
        for col in 0..c.cols {
            let x = 1.0 + col as f64 * s;
            let y = 1.0 + r as f64 * s;
            writeln!(out, "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{s:.1}\" height=\"{s:.1}\" fill=\"none\" stroke=\"#cccccc\"/>").unwrap();
        }
    }
    for (r, col, t) in c.cells() {
        let cx = 1.0 + (col as f64 + 0.5) * s;
        let cy = 1.0 + (r as f64 + 0.5) * s;
        for e in t.wired().edges() {
            let (ex, ey) = edge_point(cx, cy, s / 2.0, e);
            writeln!(out, "<line x1=\"{cx:.1}\" y1=\"{cy:.1}\" x2=\"{ex:.1}\" y2=\"{ey:.1}\" stroke=\"black\" stroke-width=\"2\"/>").unwrap();
        }
        let tag = kind_tag(t);
        if !tag.is_empty() {
            writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"{:.1}\" text-anchor=\"middle\">{tag}</text>", cx, cy - s * 0.3, s * 0.16).unwrap();
        }
        let m = s * 0.08;
        for (line, d) in t.decorations.iter().enumerate() {
            // Marks stack down the left side of the cell, labels to their right.
            let mx = cx - s * 0.3;
            let my = cy + s * (0.12 + 0.16 * line as f64);
            let (txt, color) = match d {
                Decoration::Restrict { sel } => {
                    writeln!(out, "<path d=\"M{:.1},{:.1} L{:.1},{:.1} M{:.1},{:.1} L{:.1},{:.1}\" stroke=\"#d62728\" stroke-width=\"2\"/>", mx - m, my - m, mx + m, my + m, mx - m, my + m, mx + m, my - m).unwrap();
                    (sel_text(sel), "#d62728")
                }
                Decoration::Bias { sel, weight } => {
                    writeln!(out, "<circle cx=\"{mx:.1}\" cy=\"{my:.1}\" r=\"{m:.1}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>").unwrap();
                    (format!("{}: {}", sel_text(sel), rational::fmt_rational(weight)), "#1f77b4")
                }
            };
            writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"{:.1}\" fill=\"{color}\">{}</text>", mx + 2.0 * m, my + m, s * 0.13, esc(&txt)).unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}
