//! Circuit tiles: wired edges, truth tables, orientations and decorations.

mod chains;
mod circuit;
mod random;

pub use random::{random_circuit, RandomCircuitOptions};
pub use chains::{build_and_chain, build_or_chain, pairwise_or_circuit, ChainCircuit};
pub use circuit::{
    circuit_to_problem, circuit_valid_assignments, Circuit, CircuitAssignment, End, EnumOptions, Net,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// Tile edge, numbered counter-clockwise from the right.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Edge {
    Right = 1,
    Top = 2,
    Left = 3,
    Bottom = 4,
}

impl From<Edge> for u8 {
    fn from(e: Edge) -> u8 {
        e as u8
    }
}

impl TryFrom<u8> for Edge {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        Edge::from_index(v).ok_or_else(|| format!("edge must be 1..4, got {v}"))
    }
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Right, Edge::Top, Edge::Left, Edge::Bottom];

    pub fn from_index(v: u8) -> Option<Edge> {
        match v {
            1 => Some(Edge::Right),
            2 => Some(Edge::Top),
            3 => Some(Edge::Left),
            4 => Some(Edge::Bottom),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn bit(self) -> u8 {
        1 << (self as u8 - 1)
    }

    pub fn opposite(self) -> Edge {
        self.rotate(2)
    }

    /// Quarter turns counter-clockwise.
    pub fn rotate(self, r: u8) -> Edge {
        Edge::from_index((self as u8 - 1 + r) % 4 + 1).unwrap()
    }

    /// Reflection across the vertical axis.
    pub fn mirror(self) -> Edge {
        match self {
            Edge::Right => Edge::Left,
            Edge::Left => Edge::Right,
            e => e,
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Edge::Right | Edge::Left)
    }

    /// Grid offset `(drow, dcol)` to the neighbouring tile across this edge.
    pub fn offset(self) -> (isize, isize) {
        match self {
            Edge::Right => (0, 1),
            Edge::Top => (-1, 0),
            Edge::Left => (0, -1),
            Edge::Bottom => (1, 0),
        }
    }

    /// Edges 1 and 4 read 1 when their connecting vertex is selected; 2 and 3 read 0.
    pub fn reads_one_when_selected(self) -> bool {
        matches!(self, Edge::Right | Edge::Bottom)
    }
}

/// Bitmask over edges (bit `e-1`).
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet(pub u8);

impl EdgeSet {
    pub fn of(edges: &[Edge]) -> Self {
        EdgeSet(edges.iter().fold(0, |m, e| m | e.bit()))
    }

    pub fn contains(self, e: Edge) -> bool {
        self.0 & e.bit() != 0
    }

    pub fn edges(self) -> Vec<Edge> {
        Edge::ALL.into_iter().filter(|e| self.contains(*e)).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// A tile row: bit `e-1` holds the value on edge `e`.
pub type Row = u8;

pub fn row_value(row: Row, e: Edge) -> bool {
    row & e.bit() != 0
}

pub fn row_of(values: &[(Edge, bool)]) -> Row {
    values.iter().filter(|(_, b)| *b).fold(0, |m, (e, _)| m | e.bit())
}

/// Renders a row as the edge values in increasing edge order, e.g. `1010`.
pub fn fmt_row(wired: EdgeSet, row: Row) -> String {
    wired.edges().iter().map(|e| if row_value(row, *e) { '1' } else { '0' }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruthTable {
    pub wired: Vec<Edge>,
    pub rows: BTreeSet<Row>,
}

impl TruthTable {
    pub fn new(wired: &[Edge], rows: impl IntoIterator<Item = Row>) -> Self {
        let mut w = wired.to_vec();
        w.sort();
        w.dedup();
        let mask = EdgeSet::of(&w).0;
        TruthTable { wired: w, rows: rows.into_iter().map(|r| r & mask).collect() }
    }

    pub fn wired_set(&self) -> EdgeSet {
        EdgeSet::of(&self.wired)
    }

    pub fn transform(&self, o: Orientation) -> Self {
        let wired: Vec<Edge> = self.wired.iter().map(|e| o.apply(*e)).collect();
        let rows = self.rows.iter().map(|&r| o.apply_row(r));
        TruthTable::new(&wired, rows)
    }

    /// Hamming distance from `row` to the nearest row of the table.
    pub fn distance(&self, row: Row) -> Option<u32> {
        self.rows.iter().map(|r| (r ^ row).count_ones()).min()
    }

    pub fn signature(&self) -> String {
        let w: String = self.wired.iter().map(|e| char::from(b'0' + e.index())).collect();
        let rows: Vec<String> = self.rows.iter().map(|r| fmt_row(self.wired_set(), *r)).collect();
        format!("{w}:{}", rows.join(","))
    }
}

/// Mirror (optional) followed by `rotation` counter-clockwise quarter turns.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Orientation {
    pub rotation: u8,
    pub mirrored: bool,
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation { rotation: 0, mirrored: false };

    pub fn all() -> impl Iterator<Item = Orientation> {
        [false, true]
            .into_iter()
            .flat_map(|m| (0..4).map(move |r| Orientation { rotation: r, mirrored: m }))
    }

    pub fn apply(self, e: Edge) -> Edge {
        let e = if self.mirrored { e.mirror() } else { e };
        e.rotate(self.rotation)
    }

    pub fn apply_row(self, row: Row) -> Row {
        Edge::ALL
            .into_iter()
            .filter(|e| row_value(row, *e))
            .fold(0, |m, e| m | self.apply(e).bit())
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.mirrored { 'm' } else { 'r' }, self.rotation)
    }
}

impl From<Orientation> for String {
    fn from(o: Orientation) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for Orientation {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        let b = s.as_bytes();
        let ok = b.len() == 2 && (b[0] == b'r' || b[0] == b'm') && (b'0'..=b'3').contains(&b[1]);
        if !ok {
            return Err(format!("orientation must be r0..r3 or m0..m3, got {s:?}"));
        }
        Ok(Orientation { rotation: b[1] - b'0', mirrored: b[0] == b'm' })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TileKind {
    Variable,
    WireStraight,
    WireCorner,
    Intersection,
    CornerMeet,
    OrGate,
    AndGate,
    Terminator,
    Custom,
}

impl TileKind {
    /// Table in the base orientation. Gates take inputs on edges 1, 2 and output on 3.
    pub fn base_table(self) -> Option<TruthTable> {
        use Edge::*;
        let (r, t, l, b) = (Right.bit(), Top.bit(), Left.bit(), Bottom.bit());
        Some(match self {
            TileKind::Variable => TruthTable::new(&[Bottom], [0, b]),
            TileKind::Terminator => TruthTable::new(&[Left], [0, l]),
            TileKind::WireStraight => TruthTable::new(&[Right, Left], [0, r | l]),
            TileKind::WireCorner => TruthTable::new(&[Right, Top], [0, r | t]),
            TileKind::Intersection => TruthTable::new(&[Right, Top, Left, Bottom], [0, r | l, t | b, r | t | l | b]),
            TileKind::CornerMeet => TruthTable::new(&[Right, Top], [0, r, t, r | t]),
            TileKind::OrGate => TruthTable::new(&[Right, Top, Left], [0, r | l, t | l, r | t | l]),
            TileKind::AndGate => TruthTable::new(&[Right, Top, Left], [0, r, t, r | t | l]),
            TileKind::Custom => return None,
        })
    }
}

/// Selects tile rows. `Wire(b)` matches the value of a single-wire tile,
/// `Pair(i, j)` matches horizontal value `i` and vertical value `j`,
/// `Edges` matches explicit edge values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "SelectorDto", try_from = "SelectorDto")]
pub enum Selector {
    Wire(bool),
    Pair(bool, bool),
    Edges(Vec<(Edge, bool)>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SelectorDto {
    Bits(Vec<u8>),
    Edges { edges: Vec<(u8, u8)> },
}

impl From<Selector> for SelectorDto {
    fn from(s: Selector) -> Self {
        match s {
            Selector::Wire(b) => SelectorDto::Bits(vec![b as u8]),
            Selector::Pair(i, j) => SelectorDto::Bits(vec![i as u8, j as u8]),
            Selector::Edges(v) => SelectorDto::Edges { edges: v.iter().map(|(e, b)| (e.index(), *b as u8)).collect() },
        }
    }
}

impl TryFrom<SelectorDto> for Selector {
    type Error = String;
    fn try_from(d: SelectorDto) -> Result<Self, String> {
        let bit = |v: u8| match v {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(format!("selector values must be 0 or 1, got {v}")),
        };
        match d {
            SelectorDto::Bits(v) if v.len() == 1 => Ok(Selector::Wire(bit(v[0])?)),
            SelectorDto::Bits(v) if v.len() == 2 => Ok(Selector::Pair(bit(v[0])?, bit(v[1])?)),
            SelectorDto::Bits(v) => Err(format!("selector needs 1 or 2 values, got {}", v.len())),
            SelectorDto::Edges { edges } => Ok(Selector::Edges(
                edges
                    .into_iter()
                    .map(|(e, b)| Ok((Edge::try_from(e)?, bit(b)?)))
                    .collect::<Result<_, String>>()?,
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Decoration {
    Restrict { sel: Selector },
    Bias {
        sel: Selector,
        #[serde(with = "rational::serde_str")]
        weight: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tile {
    pub kind: TileKind,
    #[serde(default)]
    pub orientation: Orientation,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decorations: Vec<Decoration>,
    /// Explicit table for `Custom` tiles, already in final orientation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TruthTable>,
}

impl Tile {
    pub fn standard(kind: TileKind, orientation: Orientation) -> Tile {
        Tile { kind, orientation, decorations: Vec::new(), table: None }
    }

    pub fn custom(table: TruthTable) -> Tile {
        Tile { kind: TileKind::Custom, orientation: Orientation::IDENTITY, decorations: Vec::new(), table: Some(table) }
    }

    /// First orientation of `kind` whose base table passes `pred`.
    fn oriented(kind: TileKind, pred: impl Fn(Orientation) -> bool) -> Tile {
        let o = Orientation::all().find(|o| pred(*o)).expect("orientation exists");
        Tile::standard(kind, o)
    }

    pub fn variable(edge: Edge) -> Tile {
        Self::oriented(TileKind::Variable, |o| o.apply(Edge::Bottom) == edge)
    }

    pub fn terminator(edge: Edge) -> Tile {
        Self::oriented(TileKind::Terminator, |o| o.apply(Edge::Left) == edge)
    }

    pub fn straight(horizontal: bool) -> Tile {
        Self::oriented(TileKind::WireStraight, |o| o.apply(Edge::Right).is_horizontal() == horizontal)
    }

    pub fn corner(a: Edge, b: Edge) -> Tile {
        let want = EdgeSet::of(&[a, b]);
        Self::oriented(TileKind::WireCorner, |o| EdgeSet::of(&[o.apply(Edge::Right), o.apply(Edge::Top)]) == want)
    }

    pub fn corner_meet(a: Edge, b: Edge) -> Tile {
        let want = EdgeSet::of(&[a, b]);
        Self::oriented(TileKind::CornerMeet, |o| EdgeSet::of(&[o.apply(Edge::Right), o.apply(Edge::Top)]) == want)
    }

    pub fn intersection() -> Tile {
        Tile::standard(TileKind::Intersection, Orientation::IDENTITY)
    }

    fn gate(kind: TileKind, inputs: (Edge, Edge), out: Edge) -> Tile {
        let want = EdgeSet::of(&[inputs.0, inputs.1]);
        Self::oriented(kind, |o| {
            EdgeSet::of(&[o.apply(Edge::Right), o.apply(Edge::Top)]) == want && o.apply(Edge::Left) == out
        })
    }

    pub fn or_gate(inputs: (Edge, Edge), out: Edge) -> Tile {
        Self::gate(TileKind::OrGate, inputs, out)
    }

    pub fn and_gate(inputs: (Edge, Edge), out: Edge) -> Tile {
        Self::gate(TileKind::AndGate, inputs, out)
    }

    pub fn with(mut self, d: Decoration) -> Tile {
        self.decorations.push(d);
        self
    }

    pub fn restrict(self, sel: Selector) -> Tile {
        self.with(Decoration::Restrict { sel })
    }

    pub fn bias(self, sel: Selector, weight: Rational) -> Tile {
        self.with(Decoration::Bias { sel, weight })
    }

    pub fn base_table(&self) -> TruthTable {
        match self.kind.base_table() {
            Some(t) => t.transform(self.orientation),
            None => self.table.clone().unwrap_or_else(|| TruthTable::new(&[], [])),
        }
    }

    pub fn wired(&self) -> EdgeSet {
        self.base_table().wired_set()
    }

    /// The edges read by `Pair` selectors: (horizontal, vertical).
    pub fn pair_edges(&self) -> Option<(Edge, Edge)> {
        let wired = self.wired();
        let pick = |horizontal: bool| {
            let inputs: Vec<Edge> = match self.kind {
                TileKind::OrGate | TileKind::AndGate | TileKind::CornerMeet => {
                    vec![self.orientation.apply(Edge::Right), self.orientation.apply(Edge::Top)]
                }
                _ => wired.edges(),
            };
            inputs.into_iter().find(|e| e.is_horizontal() == horizontal)
        };
        Some((pick(true)?, pick(false)?))
    }

    /// `(care mask, values)` for a selector on this tile.
    pub fn selector_mask(&self, sel: &Selector) -> Result<(u8, u8), String> {
        match sel {
            Selector::Wire(b) => {
                let e = *self.wired().edges().first().ok_or("selector on an unwired tile")?;
                Ok((e.bit(), if *b { e.bit() } else { 0 }))
            }
            Selector::Pair(i, j) => {
                let (h, v) = self.pair_edges().ok_or("pair selector needs a horizontal and a vertical wire")?;
                let val = row_of(&[(h, *i), (v, *j)]);
                Ok((h.bit() | v.bit(), val))
            }
            Selector::Edges(list) => {
                let wired = self.wired();
                if let Some((e, _)) = list.iter().find(|(e, _)| !wired.contains(*e)) {
                    return Err(format!("selector names unwired edge {}", e.index()));
                }
                let care = list.iter().fold(0, |m, (e, _)| m | e.bit());
                Ok((care, row_of(list)))
            }
        }
    }

    pub fn matches(&self, sel: &Selector, row: Row) -> bool {
        self.selector_mask(sel).map(|(care, val)| row & care == val).unwrap_or(false)
    }

    /// Base rows minus restricted rows.
    pub fn effective_table(&self) -> TruthTable {
        let base = self.base_table();
        let rows = base.rows.iter().copied().filter(|&r| {
            !self
                .decorations
                .iter()
                .any(|d| matches!(d, Decoration::Restrict { sel } if self.matches(sel, r)))
        });
        TruthTable::new(&base.wired, rows)
    }

    /// `w(x)`: total bias of decorations selecting `row`.
    pub fn row_weight(&self, row: Row) -> Rational {
        let mut w = Rational::zero();
        for d in &self.decorations {
            if let Decoration::Bias { sel, weight } = d {
                if self.matches(sel, row) {
                    w += weight;
                }
            }
        }
        w
    }

    pub fn row_weights(&self) -> BTreeMap<Row, Rational> {
        self.effective_table().rows.iter().map(|&r| (r, self.row_weight(r))).collect()
    }

    pub fn has_bias(&self) -> bool {
        self.decorations.iter().any(|d| matches!(d, Decoration::Bias { .. }))
    }

    /// Rewrites the biases so every row weight is nonnegative.
    ///
    /// Returns the rewritten tile and a constant `o <= 0` with
    /// `w(x) = w_lowered(x) + o` for every effective row.
    pub fn lowered(&self) -> (Tile, Rational) {
        let weights = self.row_weights();
        let min = weights.values().min().cloned().unwrap_or_else(Rational::zero);
        let offset = if min.is_negative() { min } else { Rational::zero() };
        let wired = self.base_table().wired;
        let mut t = Tile {
            kind: self.kind,
            orientation: self.orientation,
            decorations: self
                .decorations
                .iter()
                .filter(|d| matches!(d, Decoration::Restrict { .. }))
                .cloned()
                .collect(),
            table: self.table.clone(),
        };
        for (row, w) in weights {
            let lw = w - &offset;
            if !lw.is_zero() {
                let sel = Selector::Edges(wired.iter().map(|e| (*e, row_value(row, *e))).collect());
                t.decorations.push(Decoration::Bias { sel, weight: lw });
            }
        }
        (t, offset)
    }

    pub fn describe(&self) -> String {
        format!("{:?}/{} [{}]", self.kind, self.orientation, self.effective_table().signature())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn edge_algebra() {
        assert_eq!(Edge::Right.opposite(), Edge::Left);
        assert_eq!(Edge::Top.rotate(1), Edge::Left);
        assert_eq!(Edge::Bottom.rotate(1), Edge::Right);
        for e in Edge::ALL {
            assert_eq!(e.rotate(4), e);
            assert_eq!(e.mirror().mirror(), e);
        }
    }

    #[test]
    fn gate_orientations_resolve() {
        let g = Tile::or_gate((Edge::Right, Edge::Top), Edge::Bottom);
        assert_eq!(g.orientation, Orientation { rotation: 3, mirrored: true });
        let t = g.base_table();
        assert_eq!(t.wired, vec![Edge::Right, Edge::Top, Edge::Bottom]);
        let a = Tile::and_gate((Edge::Top, Edge::Left), Edge::Right);
        assert_eq!(a.orientation, Orientation { rotation: 0, mirrored: true });
        assert_eq!(a.pair_edges(), Some((Edge::Left, Edge::Top)));
    }

    #[test]
    fn intersection_restriction() {
        let t = Tile::intersection().restrict(Selector::Pair(true, true));
        let eff = t.effective_table();
        assert_eq!(eff.rows.len(), 3);
        assert!(!eff.rows.contains(&0b1111));
    }

    #[test]
    fn lowering_keeps_differences() {
        let t = Tile::intersection().bias(Selector::Pair(true, true), int(-3));
        let (l, o) = t.lowered();
        assert_eq!(o, int(-3));
        for (r, w) in t.row_weights() {
            assert_eq!(l.row_weight(r) + &o, w);
            assert!(!l.row_weight(r).is_negative());
        }
        let p = Tile::variable(Edge::Bottom).bias(Selector::Wire(true), int(4));
        let (lp, op) = p.lowered();
        assert_eq!(op, int(0));
        assert_eq!(lp.row_weight(Edge::Bottom.bit()), int(4));
    }

    #[test]
    fn serde_round_trip() {
        let t = Tile::or_gate((Edge::Right, Edge::Top), Edge::Bottom)
            .restrict(Selector::Pair(true, true))
            .bias(Selector::Edges(vec![(Edge::Right, true)]), int(2));
        let s = serde_json::to_string(&t).unwrap();
        let u: Tile = serde_json::from_str(&s).unwrap();
        assert_eq!(t, u);
    }
}
