use num_traits::{One, Zero};

use super::{reduced_formulation, Placement, QapInstance, ReducedCoefficients};
use crate::rational::{self, Rational};
use crate::tile::{Circuit, CircuitAssignment, Edge, End, Selector, Tile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// `n^2` wires on a triangular crossing lattice.
    Naive,
    /// `(n-1)^2` wires with OR chains per facility and one AND chain.
    Reduced,
}

#[derive(Clone, Debug)]
pub struct QapCircuit {
    pub layout: Layout,
    pub n: usize,
    pub circuit: Circuit,
    /// Bottom end of each variable tile, in variable order.
    pub var_ends: Vec<End>,
    /// Valid assignments of placement `P` weigh `constant - C(P)`.
    pub constant: Rational,
    /// Per-wire base bias of the naive layout.
    pub w0: Option<Rational>,
    pub coeffs: Option<ReducedCoefficients>,
}

impl QapCircuit {
    pub fn bits(&self, a: &CircuitAssignment) -> Vec<bool> {
        self.var_ends.iter().map(|e| a.get(e).copied().unwrap_or(false)).collect()
    }

    pub fn decode(&self, a: &CircuitAssignment) -> Option<Placement> {
        let bits = self.bits(a);
        match self.layout {
            Layout::Naive => Placement::from_matrix(self.n, &bits),
            Layout::Reduced => Placement::from_reduced(self.n, &bits),
        }
    }

    /// End values pinning the variable tiles to `bits`.
    pub fn pin(&self, bits: &[bool]) -> std::collections::BTreeMap<End, bool> {
        self.var_ends.iter().copied().zip(bits.iter().copied()).collect()
    }
}

fn epsilon(values: &[Rational]) -> Rational {
    let l = rational::lcm_of_denoms(values.iter());
    Rational::new(num_bigint::BigInt::one(), l)
}

/// Wire `a = x*n+i` runs down column `a` from the variable row, turns right at
/// row `a+1` and ends in a terminator. At each crossing the smaller wire is
/// horizontal. Crossings of wires sharing a facility or a location are
/// (1,1)-restricted; other crossings carry `2 w0 - f_xy d_ij - f_yx d_ji` and each
/// variable carries `w0 - f_xx d_ii`. A placement then weighs `n^2 w0 - C`.
pub fn naive_circuit(inst: &QapInstance) -> QapCircuit {
    let n = inst.n;
    let w = n * n;
    let mut products = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for i in 0..n {
                for j in 0..n {
                    products.push(&inst.f[x][y] * &inst.d[i][j]);
                }
            }
        }
    }
    let eps = epsilon(&products);
    let w0 = products.iter().max().cloned().unwrap_or_else(Rational::zero) + eps;
    let mut c = Circuit::new(w + 1, w + 1);
    let wire = |a: usize| (a / n, a % n);
    for a in 0..w {
        let (x, i) = wire(a);
        let bias = &w0 - &inst.f[x][x] * &inst.d[i][i];
        c.set(0, a, Tile::variable(Edge::Bottom).bias(Selector::Wire(true), bias));
        c.set(a + 1, a, Tile::corner(Edge::Top, Edge::Right));
        for b in a + 1..w {
            let (y, j) = wire(b);
            let t = Tile::intersection();
            let t = if x == y || i == j {
                t.restrict(Selector::Pair(true, true))
            } else {
                let bias = rational::int(2) * &w0 - &inst.f[x][y] * &inst.d[i][j] - &inst.f[y][x] * &inst.d[j][i];
                t.bias(Selector::Pair(true, true), bias)
            };
            c.set(a + 1, b, t);
        }
        c.set(a + 1, w, Tile::terminator(Edge::Left));
    }
    QapCircuit {
        layout: Layout::Naive,
        n,
        circuit: c,
        var_ends: (0..w).map(|a| (0, a, Edge::Bottom)).collect(),
        constant: rational::int((w) as i64) * &w0,
        w0: Some(w0),
        coeffs: None,
    }
}

/// Reduced layout, `m = n-1` and `W = m^2` wires. Columns `0..m` hold the OR
/// chains (facility `x` at column `m-1-x`), columns `m..m+W` the wire lattice
/// (wire `a = x*m+i` at column `m+W-1-a`). Wire `a` turns left at row
/// `1 + x*m + (m-1-i)` and feeds its facility's chain. Row `W+1` holds the AND
/// chain over the chain outputs, closed by a terminator.
pub fn reduced_circuit(inst: &QapInstance) -> QapCircuit {
    let (_, coeffs) = reduced_formulation(inst);
    let n = inst.n;
    let m = n - 1;
    let w = m * m;
    let col_of = |a: usize| m + w - 1 - a;
    let turn = |a: usize| (a / m) * m + (m - 1 - a % m);
    let mut c = Circuit::new(w + 2, m + w);
    for a in 0..w {
        let (x, i) = (a / m, a % m);
        c.set(0, col_of(a), Tile::variable(Edge::Bottom).bias(Selector::Wire(true), coeffs.w_lin(x, i)));
    }
    for l in 1..=w {
        let t = l - 1;
        let (xs, is) = (t / m, m - 1 - t % m);
        let a_star = xs * m + is;
        for b in 0..w {
            let col = col_of(b);
            let going = turn(b) > t;
            let tile = if b == a_star {
                Some(Tile::corner(Edge::Top, Edge::Left))
            } else if going && b > a_star {
                let (y, j) = (b / m, b % m);
                let tile = Tile::intersection();
                Some(if is == j {
                    tile.restrict(Selector::Pair(true, true))
                } else {
                    tile.bias(Selector::Pair(true, true), coeffs.w_quad(xs, is, y, j))
                })
            } else if going {
                Some(Tile::straight(false))
            } else if b > a_star {
                Some(Tile::straight(true))
            } else {
                None
            };
            if let Some(tile) = tile {
                c.set(l, col, tile);
            }
        }
        for x in 0..m {
            let col = m - 1 - x;
            if x == xs {
                let tile = if is == m - 1 {
                    Tile::corner(Edge::Right, Edge::Bottom)
                } else {
                    Tile::or_gate((Edge::Right, Edge::Top), Edge::Bottom).restrict(Selector::Pair(true, true))
                };
                c.set(l, col, tile);
            } else if x < xs {
                c.set(l, col, Tile::intersection());
            }
        }
    }
    let last = w + 1;
    c.set(last, 0, Tile::corner(Edge::Top, Edge::Right));
    for col in 1..m {
        c.set(
            last,
            col,
            Tile::and_gate((Edge::Top, Edge::Left), Edge::Right).restrict(Selector::Pair(false, false)),
        );
    }
    c.set(last, m, Tile::terminator(Edge::Left));
    QapCircuit {
        layout: Layout::Reduced,
        n,
        circuit: c,
        var_ends: (0..w).map(|a| (0, col_of(a), Edge::Bottom)).collect(),
        constant: coeffs.c_i.clone(),
        w0: None,
        coeffs: Some(coeffs),
    }
}
