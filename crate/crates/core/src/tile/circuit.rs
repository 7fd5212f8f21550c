use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{row_value, Edge, Row, Tile};
use crate::cbop::{BinaryProblem, Constraint, WeightPolynomial};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A wired tile edge: `(row, col, edge)`.
pub type End = (usize, usize, Edge);

/// Rectangular grid of tiles; `None` is an empty cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub rows: usize,
    pub cols: usize,
    pub tiles: Vec<Option<Tile>>,
}

/// One or two facing ends that must carry the same value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    pub ends: Vec<End>,
}

/// Wire values per wired tile edge.
pub type CircuitAssignment = BTreeMap<End, bool>;

impl Circuit {
    pub fn new(rows: usize, cols: usize) -> Self {
        Circuit { rows, cols, tiles: vec![None; rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&Tile> {
        self.tiles[r * self.cols + c].as_ref()
    }

    pub fn set(&mut self, r: usize, c: usize, t: Tile) {
        self.tiles[r * self.cols + c] = Some(t);
    }

    pub fn tile_mut(&mut self, r: usize, c: usize) -> Option<&mut Tile> {
        self.tiles[r * self.cols + c].as_mut()
    }

    /// Occupied cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, &Tile)> {
        self.tiles
            .iter()
            .enumerate()
            .filter_map(move |(k, t)| t.as_ref().map(|t| (k / self.cols, k % self.cols, t)))
    }

    pub fn neighbor(&self, r: usize, c: usize, e: Edge) -> Option<(usize, usize)> {
        let (dr, dc) = e.offset();
        let nr = r as isize + dr;
        let nc = c as isize + dc;
        (nr >= 0 && nc >= 0 && (nr as usize) < self.rows && (nc as usize) < self.cols)
            .then_some((nr as usize, nc as usize))
    }

    /// The facing end across `e`, if that neighbour is wired towards us.
    pub fn partner(&self, r: usize, c: usize, e: Edge) -> Option<End> {
        let (nr, nc) = self.neighbor(r, c, e)?;
        let t = self.get(nr, nc)?;
        t.wired().contains(e.opposite()).then_some((nr, nc, e.opposite()))
    }

    /// Checks that wired edges pair up between occupied neighbours.
    pub fn validate(&self) -> Result<()> {
        if self.tiles.len() != self.rows * self.cols {
            return Err(Error::Circuit("tile count does not match grid size".into()));
        }
        for (r, c, t) in self.cells() {
            let base = t.base_table();
            if base.wired.is_empty() {
                return Err(Error::Circuit(format!("tile at ({r},{c}) has no wired edge")));
            }
            if t.effective_table().rows.is_empty() {
                return Err(Error::Circuit(format!("tile at ({r},{c}) has no allowed row")));
            }
            for d in &t.decorations {
                let sel = match d {
                    super::Decoration::Restrict { sel } | super::Decoration::Bias { sel, .. } => sel,
                };
                t.selector_mask(sel).map_err(|m| Error::Circuit(format!("tile at ({r},{c}): {m}")))?;
            }
            for e in Edge::ALL {
                let Some((nr, nc)) = self.neighbor(r, c, e) else { continue };
                let Some(u) = self.get(nr, nc) else { continue };
                let here = t.wired().contains(e);
                let there = u.wired().contains(e.opposite());
                if here != there {
                    return Err(Error::Circuit(format!(
                        "edge {} of tile ({r},{c}) does not match its neighbour ({nr},{nc})",
                        e.index()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dangling(&self) -> Vec<End> {
        let mut out = Vec::new();
        for (r, c, t) in self.cells() {
            for e in t.wired().edges() {
                if self.partner(r, c, e).is_none() {
                    out.push((r, c, e));
                }
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.dangling().is_empty()
    }

    /// Nets in row-major order of their first end.
    pub fn nets(&self) -> Vec<Net> {
        let mut out = Vec::new();
        for (r, c, t) in self.cells() {
            for e in t.wired().edges() {
                match self.partner(r, c, e) {
                    Some(p) if p < (r, c, e) => {}
                    Some(p) => out.push(Net { ends: vec![(r, c, e), p] }),
                    None => out.push(Net { ends: vec![(r, c, e)] }),
                }
            }
        }
        out
    }

    /// Sum of the row weights selected by a full assignment.
    pub fn weight(&self, a: &CircuitAssignment) -> Option<Rational> {
        let mut w = Rational::zero();
        for (r, c, t) in self.cells() {
            let row = tile_row(a, r, c, t)?;
            if !t.effective_table().rows.contains(&row) {
                return None;
            }
            w += t.row_weight(row);
        }
        Some(w)
    }

    /// Facing ends agree and every tile sits on an allowed row.
    pub fn is_valid(&self, a: &CircuitAssignment) -> bool {
        for (r, c, t) in self.cells() {
            for e in t.wired().edges() {
                if let Some(p) = self.partner(r, c, e) {
                    if a.get(&(r, c, e)) != a.get(&p) {
                        return false;
                    }
                }
            }
        }
        self.weight(a).is_some()
    }
}

fn tile_row(a: &CircuitAssignment, r: usize, c: usize, t: &Tile) -> Option<Row> {
    let mut row = 0;
    for e in t.wired().edges() {
        if *a.get(&(r, c, e))? {
            row |= e.bit();
        }
    }
    Some(row)
}

#[derive(Clone, Debug)]
pub struct EnumOptions {
    pub max_nets: usize,
    /// Ends whose value is pinned in advance.
    pub fixed: BTreeMap<End, bool>,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { max_nets: 24, fixed: BTreeMap::new() }
    }
}

struct Index {
    tiles: Vec<(usize, usize, Vec<(Edge, usize)>, Vec<Row>, Vec<Rational>)>,
    tiles_of_net: Vec<Vec<usize>>,
}

fn index(c: &Circuit, nets: &[Net]) -> Index {
    let mut net_of: BTreeMap<End, usize> = BTreeMap::new();
    for (k, n) in nets.iter().enumerate() {
        for e in &n.ends {
            net_of.insert(*e, k);
        }
    }
    let mut tiles = Vec::new();
    let mut tiles_of_net = vec![Vec::new(); nets.len()];
    for (r, col, t) in c.cells() {
        let ends: Vec<(Edge, usize)> = t.wired().edges().into_iter().map(|e| (e, net_of[&(r, col, e)])).collect();
        for (_, n) in &ends {
            tiles_of_net[*n].push(tiles.len());
        }
        let rows: Vec<Row> = t.effective_table().rows.into_iter().collect();
        let weights = rows.iter().map(|r| t.row_weight(*r)).collect();
        tiles.push((r, col, ends, rows, weights));
    }
    Index { tiles, tiles_of_net }
}

/// All valid circuit assignments with their weights, by backtracking over tiles in
/// row-major order with forward checking.
pub fn circuit_valid_assignments(c: &Circuit, opts: &EnumOptions) -> Result<Vec<(CircuitAssignment, Rational)>> {
    c.validate()?;
    let nets = c.nets();
    if nets.len() > opts.max_nets {
        return Err(Error::CapExceeded { what: "net count", size: nets.len(), cap: opts.max_nets });
    }
    let idx = index(c, &nets);
    let mut val: Vec<Option<bool>> = vec![None; nets.len()];
    for (k, n) in nets.iter().enumerate() {
        for e in &n.ends {
            if let Some(&b) = opts.fixed.get(e) {
                if val[k].is_some_and(|v| v != b) {
                    return Ok(Vec::new());
                }
                val[k] = Some(b);
            }
        }
    }
    let mut out = Vec::new();
    let mut weight = Rational::zero();
    rec(&idx, &nets, 0, &mut val, &mut weight, &mut out);
    Ok(out)
}

fn consistent(ends: &[(Edge, usize)], row: Row, val: &[Option<bool>]) -> bool {
    ends.iter().all(|(e, n)| val[*n].is_none_or(|v| v == row_value(row, *e)))
}

fn rec(
    idx: &Index,
    nets: &[Net],
    i: usize,
    val: &mut Vec<Option<bool>>,
    weight: &mut Rational,
    out: &mut Vec<(CircuitAssignment, Rational)>,
) {
    if i == idx.tiles.len() {
        let mut a = CircuitAssignment::new();
        for (k, n) in nets.iter().enumerate() {
            for e in &n.ends {
                a.insert(*e, val[k].unwrap_or(false));
            }
        }
        out.push((a, weight.clone()));
        return;
    }
    let (_, _, ends, rows, weights) = &idx.tiles[i];
    for (row, w) in rows.iter().zip(weights) {
        if !consistent(ends, *row, val) {
            continue;
        }
        let newly: Vec<usize> = ends.iter().filter(|(_, n)| val[*n].is_none()).map(|(_, n)| *n).collect();
        for (e, n) in ends {
            val[*n] = Some(row_value(*row, *e));
        }
        let ok = newly.iter().all(|n| {
            idx.tiles_of_net[*n].iter().filter(|&&t| t > i).all(|&t| {
                let (_, _, te, tr, _) = &idx.tiles[t];
                tr.iter().any(|r| consistent(te, *r, val))
            })
        });
        if ok {
            *weight += w;
            rec(idx, nets, i + 1, val, weight, out);
            *weight -= w;
        }
        for n in newly {
            val[n] = None;
        }
    }
}

/// The constrained binary problem of a circuit: one variable per net, one table
/// constraint per tile, weight equal to the summed tile biases.
pub fn circuit_to_problem(c: &Circuit) -> Result<(BinaryProblem, Vec<Net>)> {
    c.validate()?;
    let nets = c.nets();
    let idx = index(c, &nets);
    let vars = nets
        .iter()
        .map(|n| {
            let (r, col, e) = n.ends[0];
            format!("t{r}_{col}e{}", e.index())
        })
        .collect();
    let mut constraints = Vec::new();
    let mut terms = Vec::new();
    for (_, _, ends, rows, weights) in &idx.tiles {
        let scope: Vec<usize> = ends.iter().map(|(_, n)| *n).collect();
        let table_rows = rows.iter().map(|r| ends.iter().map(|(e, _)| row_value(*r, *e)).collect()).collect();
        constraints.push(Constraint::Table { vars: scope, rows: table_rows });
        for (row, w) in rows.iter().zip(weights) {
            if w.is_zero() {
                continue;
            }
            // Indicator of `row` expanded into monomials.
            let pos: Vec<usize> = ends.iter().filter(|(e, _)| row_value(*row, *e)).map(|(_, n)| *n).collect();
            let neg: Vec<usize> = ends.iter().filter(|(e, _)| !row_value(*row, *e)).map(|(_, n)| *n).collect();
            for mask in 0u32..(1 << neg.len()) {
                let mut vs = pos.clone();
                let mut sign = 1;
                for (k, n) in neg.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        vs.push(*n);
                        sign = -sign;
                    }
                }
                let c = if sign > 0 { w.clone() } else { -w.clone() };
                terms.push((vs, c));
            }
        }
    }
    let weight = WeightPolynomial::from_terms(terms, Rational::zero());
    Ok((BinaryProblem { vars, constraints, weight }, nets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbop::{check_encoding, enumerate_valid, VariableMap};
    use crate::rational::int;
    use crate::tile::Selector;

    fn loop2x2() -> Circuit {
        let mut c = Circuit::new(2, 2);
        c.set(0, 0, Tile::corner(Edge::Right, Edge::Bottom));
        c.set(0, 1, Tile::corner(Edge::Left, Edge::Bottom));
        c.set(1, 0, Tile::corner(Edge::Right, Edge::Top));
        c.set(1, 1, Tile::corner(Edge::Left, Edge::Top).bias(Selector::Wire(true), int(3)));
        c
    }

    #[test]
    fn loop_has_two_states() {
        let c = loop2x2();
        assert!(c.is_closed());
        assert_eq!(c.nets().len(), 4);
        let all = circuit_valid_assignments(&c, &EnumOptions::default()).unwrap();
        let ws: Vec<Rational> = all.iter().map(|(_, w)| w.clone()).collect();
        assert_eq!(ws, vec![int(0), int(3)]);
        for (a, w) in &all {
            assert!(c.is_valid(a));
            assert_eq!(c.weight(a).unwrap(), *w);
        }
    }

    #[test]
    fn mismatched_edges_rejected() {
        let mut c = Circuit::new(1, 2);
        c.set(0, 0, Tile::straight(true));
        c.set(0, 1, Tile::straight(false));
        assert!(c.validate().is_err());
    }

    #[test]
    fn problem_matches_enumeration() {
        let c = loop2x2();
        let (p, nets) = circuit_to_problem(&c).unwrap();
        let xs = enumerate_valid(&p, 24).unwrap();
        assert_eq!(xs.len(), 2);
        assert_eq!(nets.len(), p.num_vars());
        let r = check_encoding(&p, &p, &VariableMap::identity(p.num_vars()), 24).unwrap();
        assert!(r.holds());
        let best = xs.iter().map(|x| p.weight.evaluate(x)).max().unwrap();
        assert_eq!(best, int(3));
    }
}
