use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::certify::{certify_fragment, find_anchor, summarize, CompilationCertificate};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::tile::{Edge, EdgeSet, Row, Selector, Tile, TruthTable};

pub const MAX_FRAGMENT_VERTICES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FragVertex {
    /// `(row, col)` inside the 4x4 box.
    pub pos: (u8, u8),
    /// Weight in units of δ.
    pub coeff: i64,
    #[serde(with = "rational::serde_str", default = "Rational::zero")]
    pub bias: Rational,
    /// Edge served when this is a connecting vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<Edge>,
    /// Permits a connecting vertex on a box corner.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub corner: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileFragment {
    pub label: String,
    pub table: TruthTable,
    pub vertices: Vec<FragVertex>,
    /// Row to vertex index receiving that row's bias.
    #[serde(default)]
    pub anchors: BTreeMap<Row, usize>,
}

/// Middle positions reserved for the connecting vertex of each edge.
pub fn connecting_slots(e: Edge) -> [(u8, u8); 2] {
    match e {
        Edge::Right => [(1, 3), (2, 3)],
        Edge::Top => [(0, 1), (0, 2)],
        Edge::Left => [(1, 0), (2, 0)],
        Edge::Bottom => [(3, 1), (3, 2)],
    }
}

fn on_side(e: Edge, p: (u8, u8)) -> bool {
    match e {
        Edge::Right => p.1 == 3,
        Edge::Top => p.0 == 0,
        Edge::Left => p.1 == 0,
        Edge::Bottom => p.0 == 3,
    }
}

impl TileFragment {
    pub fn new(label: &str, table: TruthTable, vs: &[(u8, u8, i64, Option<Edge>)]) -> Self {
        TileFragment {
            label: label.into(),
            table,
            vertices: vs
                .iter()
                .map(|&(r, c, coeff, edge)| FragVertex { pos: (r, c), coeff, bias: Rational::zero(), edge, corner: false })
                .collect(),
            anchors: BTreeMap::new(),
        }
    }

    pub fn served(&self) -> EdgeSet {
        EdgeSet::of(&self.vertices.iter().filter_map(|v| v.edge).collect::<Vec<_>>())
    }

    /// Box-placement rules that make stitched boxes interact only through facing
    /// connecting vertices.
    pub fn check_placement(&self) -> std::result::Result<(), String> {
        if self.vertices.len() > MAX_FRAGMENT_VERTICES {
            return Err(format!("{} vertices exceed the box limit", self.vertices.len()));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut edges = Vec::new();
        for v in &self.vertices {
            if v.pos.0 > 3 || v.pos.1 > 3 {
                return Err(format!("position {:?} outside the box", v.pos));
            }
            if !seen.insert(v.pos) {
                return Err(format!("two vertices at {:?}", v.pos));
            }
            if let Some(e) = v.edge {
                edges.push(e);
            }
        }
        let served = self.served();
        if served.len() != edges.len() {
            return Err("an edge has more than one connecting vertex".into());
        }
        for v in &self.vertices {
            let p = v.pos;
            let ok = match v.edge {
                Some(e) => connecting_slots(e).contains(&p) || (v.corner && on_side(e, p)),
                None => {
                    let inner = (1..=2).contains(&p.0) && (1..=2).contains(&p.1);
                    let right = p.1 == 3 && (1..=2).contains(&p.0) && !served.contains(Edge::Right);
                    let bottom = p.0 == 3 && (1..=2).contains(&p.1) && !served.contains(Edge::Bottom);
                    let corner = p == (3, 3) && !served.contains(Edge::Right) && !served.contains(Edge::Bottom);
                    inner || right || bottom || corner
                }
            };
            if !ok {
                return Err(format!("vertex at {p:?} breaks the placement convention"));
            }
        }
        Ok(())
    }

    /// Adds each row's weight to its anchor vertex.
    pub fn decorate(&self, tile: &Tile) -> std::result::Result<TileFragment, String> {
        let mut out = self.clone();
        for row in tile.effective_table().rows {
            let w = tile.row_weight(row);
            if w.is_zero() {
                continue;
            }
            let &a = self
                .anchors
                .get(&row)
                .ok_or_else(|| format!("fragment {} has no anchor for row {row:#06b}", self.label))?;
            out.vertices[a].bias += w;
        }
        Ok(out)
    }

    /// Fills `anchors` for every row where a clean anchor exists.
    pub fn with_anchors(mut self) -> Self {
        let sets = summarize(&self);
        let valid: Vec<Row> = self.table.rows.iter().copied().collect();
        let k = sets.iter().filter(|s| valid.contains(&s.row)).map(|s| s.coeff).max().unwrap_or(0);
        self.anchors = valid
            .iter()
            .filter_map(|&r| find_anchor(&self, &sets, &valid, r, k).map(|v| (r, v)))
            .collect();
        self
    }

    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("fragment serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LibraryEntry {
    pub fragment: TileFragment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CompilationCertificate>,
    /// Hash of `fragment` at the time `certificate` was produced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified_hash: Option<String>,
}

impl LibraryEntry {
    pub fn certify(fragment: TileFragment) -> Result<LibraryEntry> {
        let tile = Tile::custom(fragment.table.clone());
        let cert = certify_fragment(&tile, &fragment)?;
        let verified_hash = Some(fragment.content_hash());
        Ok(LibraryEntry { fragment, certificate: Some(cert), verified_hash })
    }

    pub fn is_verified(&self) -> bool {
        self.certificate.is_some() && self.verified_hash.as_deref() == Some(self.fragment.content_hash().as_str())
    }
}

/// Fragments keyed by the truth table they implement.
#[derive(Clone, Debug, Default)]
pub struct FragmentLibrary {
    pub entries: Vec<LibraryEntry>,
}

fn table_of(t: Tile) -> TruthTable {
    t.effective_table()
}

/// The built-in fragments, uncertified and without anchors.
pub fn builtin_fragments() -> Vec<TileFragment> {
    use Edge::*;
    let mut v = Vec::new();
    let ends = [(Right, (1, 3), (1, 2)), (Top, (0, 1), (1, 1)), (Left, (1, 0), (1, 1)), (Bottom, (3, 1), (2, 1))];
    for (e, c, u) in ends {
        v.push(TileFragment::new(
            &format!("end-{}", e.index()),
            table_of(Tile::variable(e)),
            &[(c.0, c.1, 2, Some(e)), (u.0, u.1, 1, None)],
        ));
    }
    v.push(TileFragment::new(
        "straight-h",
        table_of(Tile::straight(true)),
        &[(1, 0, 2, Some(Left)), (1, 1, 2, None), (1, 2, 2, None), (1, 3, 2, Some(Right))],
    ));
    v.push(TileFragment::new(
        "straight-v",
        table_of(Tile::straight(false)),
        &[(0, 1, 2, Some(Top)), (1, 1, 2, None), (2, 1, 2, None), (3, 1, 2, Some(Bottom))],
    ));
    v.push(TileFragment::new(
        "corner-12",
        table_of(Tile::corner(Right, Top)),
        &[(0, 1, 2, Some(Top)), (1, 1, 2, None), (2, 2, 2, None), (1, 3, 2, Some(Right))],
    ));
    v.push(TileFragment::new(
        "corner-34",
        table_of(Tile::corner(Left, Bottom)),
        &[(1, 0, 2, Some(Left)), (1, 1, 2, None), (2, 2, 2, None), (3, 1, 2, Some(Bottom))],
    ));
    v.push(TileFragment::new(
        "corner-23",
        table_of(Tile::corner(Top, Left)),
        &[(0, 1, 2, Some(Top)), (1, 1, 2, None), (2, 0, 2, Some(Left))],
    ));
    v.push(TileFragment::new(
        "corner-14",
        table_of(Tile::corner(Right, Bottom)),
        &[(1, 3, 2, Some(Right)), (2, 2, 2, None), (3, 1, 2, Some(Bottom))],
    ));
    let cross_rim = [(1, 3, 2, Some(Right)), (0, 1, 2, Some(Top)), (2, 0, 2, Some(Left)), (3, 2, 2, Some(Bottom))];
    let mut cross: Vec<_> = cross_rim.to_vec();
    cross.extend([(1, 1, 4, None), (1, 2, 4, None), (2, 1, 4, None), (2, 2, 4, None)]);
    v.push(TileFragment::new("cross", table_of(Tile::intersection()), &cross));
    let mut cross_r11: Vec<_> = cross_rim.to_vec();
    cross_r11.extend([(1, 2, 4, None), (2, 1, 4, None), (2, 2, 4, None)]);
    v.push(TileFragment::new(
        "cross-r11",
        table_of(Tile::intersection().restrict(Selector::Pair(true, true))),
        &cross_r11,
    ));
    v.push(TileFragment::new(
        "or-12-4-r11",
        table_of(Tile::or_gate((Right, Top), Bottom).restrict(Selector::Pair(true, true))),
        &[(1, 3, 2, Some(Right)), (0, 1, 2, Some(Top)), (3, 1, 2, Some(Bottom)), (1, 2, 2, None), (2, 2, 2, None)],
    ));
    v.push(TileFragment::new(
        "and-23-1-r00",
        table_of(Tile::and_gate((Top, Left), Right).restrict(Selector::Pair(false, false))),
        &[(1, 3, 2, Some(Right)), (0, 1, 2, Some(Top)), (1, 0, 2, Some(Left)), (1, 1, 2, None), (2, 2, 2, None)],
    ));
    v
}

/// Horizontal wire whose end vertices weigh δ. Its both-ends-excluded state ties
/// with the valid states, so it does not certify.
pub fn copy_gadget_fragment() -> TileFragment {
    TileFragment::new(
        "copy-gadget",
        table_of(Tile::straight(true)),
        &[(1, 0, 1, Some(Edge::Left)), (1, 1, 2, None), (1, 2, 2, None), (1, 3, 1, Some(Edge::Right))],
    )
}

/// Horizontal wire carrying `+w` on its second vertex and `-w` on its right
/// connecting vertex. Valid rows stay at `5δ`; an invalid row reaches `4δ + w`.
pub fn biased_wire_fragment(w: &Rational) -> TileFragment {
    let mut f = TileFragment::new(
        "wire-pm",
        table_of(Tile::straight(true)),
        &[(1, 0, 2, Some(Edge::Left)), (1, 1, 2, None), (1, 2, 2, None), (1, 3, 2, Some(Edge::Right))],
    );
    f.vertices[1].bias = w.clone();
    f.vertices[3].bias = -w.clone();
    f
}

impl FragmentLibrary {
    /// Built-in fragments with anchors and certificates.
    pub fn builtin() -> Self {
        let entries = builtin_fragments()
            .into_iter()
            .map(|f| LibraryEntry::certify(f.with_anchors()).expect("built-in fragment certifies"))
            .collect();
        FragmentLibrary { entries }
    }

    pub fn from_fragments(frags: Vec<TileFragment>) -> Result<Self> {
        let entries = frags
            .into_iter()
            .map(|f| {
                let f = if f.anchors.is_empty() { f.with_anchors() } else { f };
                LibraryEntry::certify(f)
            })
            .collect::<Result<_>>()?;
        Ok(FragmentLibrary { entries })
    }

    pub fn find(&self, table: &TruthTable) -> Option<&LibraryEntry> {
        self.entries.iter().find(|e| e.fragment.table == *table)
    }

    pub fn get(&self, label: &str) -> Option<&LibraryEntry> {
        self.entries.iter().find(|e| e.fragment.label == label)
    }

    pub fn to_json(&self) -> Result<String> {
        let map: BTreeMap<&str, &LibraryEntry> = self.entries.iter().map(|e| (e.fragment.label.as_str(), e)).collect();
        Ok(serde_json::to_string_pretty(&map)?)
    }

    /// Loads a library; entries whose hash does not match are re-certified.
    /// Returns the library and the labels that needed re-certification.
    pub fn from_json(s: &str) -> Result<(Self, Vec<String>)> {
        let map: BTreeMap<String, LibraryEntry> = serde_json::from_str(s)?;
        let mut entries = Vec::new();
        let mut recertified = Vec::new();
        for (label, e) in map {
            if e.fragment.label != label {
                return Err(Error::Graph(format!("library key {label} names fragment {}", e.fragment.label)));
            }
            if e.is_verified() {
                entries.push(e);
            } else {
                recertified.push(label);
                entries.push(LibraryEntry::certify(e.fragment)?);
            }
        }
        Ok((FragmentLibrary { entries }, recertified))
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<String>)> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
