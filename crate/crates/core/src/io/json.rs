use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinggraph::{ConnTag, DeltaWeight, LatticeGraph, LatticeVertex, DEFAULT_RADIUS};
use crate::rational::{self, Rational};
use crate::tile::{Circuit, Edge, Tile};

#[derive(Serialize, Deserialize)]
struct VertexDto {
    x: i64,
    y: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<String>,
    #[serde(default)]
    connecting: bool,
    #[serde(default)]
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_coeff: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bias: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge: Option<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tile: Option<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphDto {
    #[serde(default = "default_radius")]
    radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<String>,
    vertices: Vec<VertexDto>,
}

fn default_radius() -> f64 {
    DEFAULT_RADIUS
}

fn bad(msg: String) -> Error {
    Error::Graph(msg)
}

pub fn graph_to_json(g: &LatticeGraph) -> Result<String> {
    let vertices = g
        .vertices
        .iter()
        .map(|v| {
            let weight = match (&g.delta, v.weight.coeff) {
                (Some(d), _) => Some(v.weight.eval(d)),
                (None, 0) => Some(v.weight.bias.clone()),
                (None, _) => None,
            };
            VertexDto {
                x: v.x,
                y: v.y,
                weight: weight.map(|w| rational::fmt_rational(&w)),
                connecting: v.conn.is_some(),
                label: v.label.clone(),
                delta_coeff: (v.weight.coeff != 0).then_some(v.weight.coeff),
                bias: (v.weight.coeff != 0).then(|| rational::fmt_rational(&v.weight.bias)),
                edge: v.conn.map(|c| c.edge),
                tile: v.conn.map(|c| c.tile),
            }
        })
        .collect();
    let dto = GraphDto { radius: g.radius, delta: g.delta.as_ref().map(rational::fmt_rational), vertices };
    Ok(serde_json::to_string_pretty(&dto)?)
}

pub fn graph_from_json(s: &str) -> Result<LatticeGraph> {
    let dto: GraphDto = serde_json::from_str(s)?;
    let delta = dto.delta.as_deref().map(|d| rational::parse_rational(d, false)).transpose().map_err(bad)?;
    let vertices = dto
        .vertices
        .into_iter()
        .map(|v| {
            let weight = match (v.delta_coeff, &v.bias, &v.weight) {
                (Some(k), Some(b), _) => DeltaWeight::new(k, rational::parse_rational(b, false).map_err(bad)?),
                (_, _, Some(w)) => DeltaWeight::constant(rational::parse_rational(w, false).map_err(bad)?),
                _ => return Err(bad(format!("vertex ({}, {}) has no weight", v.x, v.y))),
            };
            let conn = match (v.connecting, v.edge, v.tile) {
                (true, Some(edge), Some(tile)) => Some(ConnTag { tile, edge }),
                (true, _, _) => {
                    return Err(bad(format!("connecting vertex ({}, {}) needs edge and tile", v.x, v.y)));
                }
                _ => None,
            };
            Ok(LatticeVertex { x: v.x, y: v.y, weight, conn, label: v.label })
        })
        .collect::<Result<Vec<_>>>()?;
    LatticeGraph::new(dto.radius, delta, vertices)
}

#[derive(Serialize, Deserialize)]
struct PlacedTileDto {
    r: usize,
    c: usize,
    #[serde(flatten)]
    tile: Tile,
}

#[derive(Serialize, Deserialize)]
struct CircuitDto {
    rows: usize,
    cols: usize,
    tiles: Vec<PlacedTileDto>,
}

pub fn circuit_to_json(c: &Circuit) -> Result<String> {
    let tiles = c.cells().map(|(r, col, t)| PlacedTileDto { r, c: col, tile: t.clone() }).collect();
    Ok(serde_json::to_string_pretty(&CircuitDto { rows: c.rows, cols: c.cols, tiles })?)
}

pub fn circuit_from_json(s: &str) -> Result<Circuit> {
    let dto: CircuitDto = serde_json::from_str(s)?;
    let mut c = Circuit::new(dto.rows, dto.cols);
    for t in dto.tiles {
        if t.r >= dto.rows || t.c >= dto.cols {
            return Err(Error::Circuit(format!("tile ({}, {}) outside the grid", t.r, t.c)));
        }
        if c.get(t.r, t.c).is_some() {
            return Err(Error::Circuit(format!("two tiles at ({}, {})", t.r, t.c)));
        }
        c.set(t.r, t.c, t.tile);
    }
    c.validate()?;
    Ok(c)
}

/// Parses a rational written as a CLI value.
pub fn rational_arg(s: &str) -> Result<Rational> {
    rational::parse_rational(s, true).map_err(|m| Error::Parse { line: 1, col: 1, msg: m })
}
