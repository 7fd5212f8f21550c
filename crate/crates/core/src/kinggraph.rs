//! Weighted unit-disk graphs on the integer lattice, with weights of the form `k*delta + b`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::tile::Edge;

pub const DEFAULT_RADIUS: f64 = 1.5;
pub const BOX: i64 = 4;

/// `coeff * delta + bias` with `delta` symbolic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DeltaWeight {
    pub coeff: i64,
    pub bias: Rational,
}

impl DeltaWeight {
    pub fn new(coeff: i64, bias: Rational) -> Self {
        DeltaWeight { coeff, bias }
    }

    pub fn delta(coeff: i64) -> Self {
        DeltaWeight { coeff, bias: Rational::zero() }
    }

    pub fn constant(bias: Rational) -> Self {
        DeltaWeight { coeff: 0, bias }
    }

    pub fn eval(&self, delta: &Rational) -> Rational {
        Rational::from_integer(self.coeff.into()) * delta + &self.bias
    }

    /// `self(delta) <= other(delta)` for every `delta > 0`.
    pub fn le_for_all_delta(&self, other: &DeltaWeight) -> bool {
        self.coeff <= other.coeff && self.bias <= other.bias
    }

    /// Order for all sufficiently large `delta`: coefficient first, then bias.
    pub fn cmp_eventually(&self, other: &DeltaWeight) -> Ordering {
        self.coeff.cmp(&other.coeff).then_with(|| self.bias.cmp(&other.bias))
    }
}

impl Add for DeltaWeight {
    type Output = DeltaWeight;
    fn add(self, o: DeltaWeight) -> DeltaWeight {
        DeltaWeight { coeff: self.coeff + o.coeff, bias: self.bias + o.bias }
    }
}

impl<'a> Add<&'a DeltaWeight> for &'a DeltaWeight {
    type Output = DeltaWeight;
    fn add(self, o: &DeltaWeight) -> DeltaWeight {
        DeltaWeight { coeff: self.coeff + o.coeff, bias: &self.bias + &o.bias }
    }
}

impl AddAssign<&DeltaWeight> for DeltaWeight {
    fn add_assign(&mut self, o: &DeltaWeight) {
        self.coeff += o.coeff;
        self.bias += &o.bias;
    }
}

impl Sub for DeltaWeight {
    type Output = DeltaWeight;
    fn sub(self, o: DeltaWeight) -> DeltaWeight {
        DeltaWeight { coeff: self.coeff - o.coeff, bias: self.bias - o.bias }
    }
}

impl Neg for DeltaWeight {
    type Output = DeltaWeight;
    fn neg(self) -> DeltaWeight {
        DeltaWeight { coeff: -self.coeff, bias: -self.bias }
    }
}

impl fmt::Display for DeltaWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coeff, self.bias.is_zero()) {
            (0, _) => write!(f, "{}", rational::fmt_rational(&self.bias)),
            (k, true) => write!(f, "{k}d"),
            (k, false) if self.bias.is_negative() => {
                write!(f, "{k}d - {}", rational::fmt_rational(&-self.bias.clone()))
            }
            (k, false) => write!(f, "{k}d + {}", rational::fmt_rational(&self.bias)),
        }
    }
}

/// Connecting-vertex tag: the tile box it belongs to and the edge it serves.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConnTag {
    pub tile: (usize, usize),
    pub edge: Edge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeVertex {
    pub x: i64,
    pub y: i64,
    pub weight: DeltaWeight,
    pub conn: Option<ConnTag>,
    pub label: String,
}

impl LatticeVertex {
    /// Row-major lattice position `(y, x)`, the order used for tie-breaking.
    pub fn pos(&self) -> (i64, i64) {
        (self.y, self.x)
    }

    pub fn tile_box(&self) -> (i64, i64) {
        match self.conn {
            Some(t) => (t.tile.0 as i64, t.tile.1 as i64),
            None => (self.y.div_euclid(BOX), self.x.div_euclid(BOX)),
        }
    }
}

/// Vertices of each side adjacent to the other side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Boundary {
    pub b1: Vec<usize>,
    pub b2: Vec<usize>,
}

impl Boundary {
    /// The shared boundary `B1 ∪ B2`, sorted.
    pub fn all(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.b1.iter().chain(&self.b2).copied().collect();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeGraph {
    pub radius: f64,
    pub delta: Option<Rational>,
    pub vertices: Vec<LatticeVertex>,
    adj: Vec<Vec<usize>>,
}

impl LatticeGraph {
    /// Sorts vertices into position order and builds adjacency. Positions must be distinct.
    pub fn new(radius: f64, delta: Option<Rational>, mut vertices: Vec<LatticeVertex>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Graph(format!("radius must be positive, got {radius}")));
        }
        vertices.sort_by_key(|v| v.pos());
        if let Some(w) = vertices.windows(2).find(|w| w[0].pos() == w[1].pos()) {
            return Err(Error::Graph(format!("two vertices at x={}, y={}", w[0].x, w[0].y)));
        }
        let reach = radius.floor() as i64;
        let r2 = radius * radius + 1e-9;
        let at: HashMap<(i64, i64), usize> = vertices.iter().enumerate().map(|(i, v)| (v.pos(), i)).collect();
        let adj = vertices
            .iter()
            .map(|v| {
                let mut nb = Vec::new();
                for dy in -reach..=reach {
                    for dx in -reach..=reach {
                        if (dx, dy) == (0, 0) || ((dx * dx + dy * dy) as f64) > r2 {
                            continue;
                        }
                        if let Some(&j) = at.get(&(v.y + dy, v.x + dx)) {
                            nb.push(j);
                        }
                    }
                }
                nb.sort_unstable();
                nb
            })
            .collect();
        Ok(LatticeGraph { radius, delta, vertices, adj })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn index_of(&self, pos: (i64, i64)) -> Option<usize> {
        self.vertices.binary_search_by_key(&pos, |v| v.pos()).ok()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        let mut mark = vec![false; self.len()];
        for &v in set {
            if v >= self.len() || mark[v] {
                return false;
            }
            mark[v] = true;
        }
        set.iter().all(|&v| self.adj[v].iter().all(|&u| !mark[u]))
    }

    pub fn symbolic_weight(&self, set: &[usize]) -> DeltaWeight {
        let mut w = DeltaWeight::default();
        for &v in set {
            w += &self.vertices[v].weight;
        }
        w
    }

    pub fn has_symbolic_weights(&self) -> bool {
        self.vertices.iter().any(|v| v.weight.coeff != 0)
    }

    /// Concrete vertex weights at the graph's delta.
    pub fn resolved_weights(&self) -> Result<Vec<Rational>> {
        match &self.delta {
            Some(d) => Ok(self.vertices.iter().map(|v| v.weight.eval(d)).collect()),
            None if !self.has_symbolic_weights() => Ok(self.vertices.iter().map(|v| v.weight.bias.clone()).collect()),
            None => Err(Error::Graph("graph has delta-dependent weights but no delta".into())),
        }
    }

    /// Connecting vertices with no connecting neighbour in another tile box.
    pub fn v_con(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| {
                let Some(_) = self.vertices[v].conn else { return false };
                let b = self.vertices[v].tile_box();
                !self.adj[v]
                    .iter()
                    .any(|&u| self.vertices[u].conn.is_some() && self.vertices[u].tile_box() != b)
            })
            .collect()
    }

    /// `w(S) + delta * |V_con \ S|`.
    pub fn circuit_weight(&self, set: &[usize]) -> DeltaWeight {
        let mut w = self.symbolic_weight(set);
        let vcon = self.v_con();
        w.coeff += vcon.iter().filter(|v| !set.contains(v)).count() as i64;
        w
    }

    /// Subgraph induced by `keep` (indices into this graph), with its own tags.
    pub fn induced(&self, keep: &[usize]) -> LatticeGraph {
        let vs = keep.iter().map(|&i| self.vertices[i].clone()).collect();
        LatticeGraph::new(self.radius, self.delta.clone(), vs).expect("subset of a valid graph")
    }

    /// Tile boxes that hold at least one vertex.
    pub fn boxes(&self) -> BTreeSet<(i64, i64)> {
        self.vertices.iter().map(|v| v.tile_box()).collect()
    }

    /// Boundaries of the split that puts the boxes in `part1` on one side and all
    /// other boxes on the other.
    pub fn split_boundary(&self, part1: &BTreeSet<(i64, i64)>) -> Result<Boundary> {
        let boxes = self.boxes();
        if let Some(b) = part1.iter().find(|b| !boxes.contains(b)) {
            return Err(Error::Graph(format!("box {b:?} is not part of the graph")));
        }
        let side: Vec<bool> = self.vertices.iter().map(|v| part1.contains(&v.tile_box())).collect();
        let mut out = Boundary::default();
        for v in 0..self.len() {
            if self.adj[v].iter().any(|&u| side[u] != side[v]) {
                if side[v] {
                    out.b1.push(v);
                } else {
                    out.b2.push(v);
                }
            }
        }
        Ok(out)
    }

    /// Both sides of `w_circ(S, G) = w_circ(S1, G1) + w_circ(S2, G2) - δ |B \ S|`,
    /// each computed on its own graph.
    pub fn weight_lemma_sides(&self, part1: &BTreeSet<(i64, i64)>, set: &[usize]) -> Result<(DeltaWeight, DeltaWeight)> {
        if !self.is_independent(set) {
            return Err(Error::Graph("set is not independent".into()));
        }
        let bd = self.split_boundary(part1)?;
        let (mut keep1, mut keep2) = (Vec::new(), Vec::new());
        for v in 0..self.len() {
            if part1.contains(&self.vertices[v].tile_box()) {
                keep1.push(v);
            } else {
                keep2.push(v);
            }
        }
        let sub = |keep: &[usize]| {
            let g = self.induced(keep);
            let s: Vec<usize> = set
                .iter()
                .filter(|v| keep.contains(v))
                .map(|&v| g.index_of(self.vertices[v].pos()).expect("kept vertex"))
                .collect();
            g.circuit_weight(&s)
        };
        let outside = bd.all().iter().filter(|v| !set.contains(v)).count() as i64;
        let rhs = sub(&keep1) + sub(&keep2) - DeltaWeight::delta(outside);
        Ok((self.circuit_weight(set), rhs))
    }

    pub fn check_weight_lemma(&self, part1: &BTreeSet<(i64, i64)>, set: &[usize]) -> Result<bool> {
        let (l, r) = self.weight_lemma_sides(part1, set)?;
        Ok(l == r)
    }
}

/// Up to `max_vertices` distinct random positions in a `side x side` window with
/// integer weights in `-max_weight/4..=max_weight`, some halved.
pub fn random_lattice_graph(rng: &mut impl rand::Rng, max_vertices: usize, side: i64, max_weight: i64) -> LatticeGraph {
    let n = rng.gen_range(0..=max_vertices.min((side * side) as usize));
    let mut cells: Vec<(i64, i64)> = (0..side).flat_map(|y| (0..side).map(move |x| (y, x))).collect();
    let mut vertices = Vec::with_capacity(n);
    for i in 0..n {
        let j = rng.gen_range(i..cells.len());
        cells.swap(i, j);
        let (y, x) = cells[i];
        let num = rng.gen_range(-max_weight / 4..=max_weight);
        let den = if rng.gen_bool(0.2) { 2 } else { 1 };
        vertices.push(LatticeVertex {
            x,
            y,
            weight: DeltaWeight::constant(rational::ratio(num, den)),
            conn: None,
            label: format!("v{i}"),
        });
    }
    LatticeGraph::new(DEFAULT_RADIUS, None, vertices).expect("distinct positions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn v(x: i64, y: i64, w: i64) -> LatticeVertex {
        LatticeVertex { x, y, weight: DeltaWeight::delta(w), conn: None, label: String::new() }
    }

    #[test]
    fn king_adjacency() {
        let g = LatticeGraph::new(DEFAULT_RADIUS, None, vec![v(0, 0, 1), v(1, 1, 1), v(2, 0, 1), v(0, 2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        let at = |x, y| g.index_of((y, x)).unwrap();
        assert!(g.adjacent(at(0, 0), at(1, 1)));
        assert!(!g.adjacent(at(0, 0), at(2, 0)));
    }

    #[test]
    fn duplicate_positions_rejected() {
        assert!(LatticeGraph::new(DEFAULT_RADIUS, None, vec![v(0, 0, 1), v(0, 0, 2)]).is_err());
    }

    #[test]
    fn delta_comparisons() {
        let a = DeltaWeight::new(3, int(5));
        let b = DeltaWeight::new(4, int(1));
        assert!(!a.le_for_all_delta(&b));
        assert_eq!(a.cmp_eventually(&b), Ordering::Less);
        assert_eq!(a.eval(&int(2)), int(11));
        assert_eq!(format!("{}", DeltaWeight::new(2, int(-1))), "2d - 1");
    }
}
