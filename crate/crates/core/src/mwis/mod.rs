//! Exact maximum-weight independent set solvers for lattice graphs.

mod bnb;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use bnb::{Bits, Core, Lex, SolverWeight};

use crate::error::{Error, Result};
use crate::kinggraph::{DeltaWeight, LatticeGraph};
use crate::rational::{self, Rational};

pub const DEFAULT_BRUTE_CAP: usize = 30;
pub const DEFAULT_TIMEOUT_SECS: u64 = 600;
pub const TIMEOUT_ENV: &str = "QAPC_TIMEOUT_SECS";

/// Solver wall-clock budget: `QAPC_TIMEOUT_SECS` when set, else 600 s.
pub fn timeout_from_env() -> Duration {
    let secs = std::env::var(TIMEOUT_ENV).ok().and_then(|s| s.trim().parse::<u64>().ok());
    Duration::from_secs(secs.unwrap_or(DEFAULT_TIMEOUT_SECS))
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub timeout: Option<Duration>,
    /// Return the lexicographically smallest optimum (sorted position order).
    pub canonical: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { timeout: Some(timeout_from_env()), canonical: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: String,
    /// Vertex indices in position order.
    pub set: Vec<usize>,
    /// `(x, y)` of each selected vertex.
    pub positions: Vec<(i64, i64)>,
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
    /// False when the time budget ran out; `set` is then the best incumbent.
    pub optimal: bool,
    pub canonical: bool,
    pub nodes: u64,
    pub wall_ms: u128,
}

fn report(g: &LatticeGraph, solver: &str, set: Vec<usize>, weight: Rational, optimal: bool, canonical: bool, nodes: u64, t0: Instant) -> SolveReport {
    let positions = set.iter().map(|&v| (g.vertices[v].x, g.vertices[v].y)).collect();
    SolveReport { solver: solver.into(), set, positions, weight, optimal, canonical, nodes, wall_ms: t0.elapsed().as_millis() }
}

/// Exhaustive enumeration; ties go to the lexicographically smallest index list.
pub fn brute_mwis(g: &LatticeGraph, cap: usize) -> Result<SolveReport> {
    if g.len() > cap {
        return Err(Error::CapExceeded { what: "vertex count", size: g.len(), cap });
    }
    let t0 = Instant::now();
    let w = g.resolved_weights()?;
    let n = g.len();
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u)).collect();
    let mut best: (Rational, Vec<usize>) = (Rational::zero(), Vec::new());
    let mut nodes = 0u64;
    let mut cur = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(i: usize, n: usize, blocked: u64, acc: &Rational, w: &[Rational], adj: &[u64], cur: &mut Vec<usize>, best: &mut (Rational, Vec<usize>), nodes: &mut u64) {
        if i == n {
            *nodes += 1;
            if *acc > best.0 || (*acc == best.0 && *cur < best.1) {
                *best = (acc.clone(), cur.clone());
            }
            return;
        }
        if blocked >> i & 1 == 0 {
            cur.push(i);
            rec(i + 1, n, blocked | adj[i], &(acc + &w[i]), w, adj, cur, best, nodes);
            cur.pop();
        }
        rec(i + 1, n, blocked, acc, w, adj, cur, best, nodes);
    }
    rec(0, n, 0, &Rational::zero(), &w, &adj, &mut cur, &mut best, &mut nodes);
    Ok(report(g, "brute", best.1, best.0, true, true, nodes, t0))
}

struct Prepared<W> {
    adj: Vec<Bits>,
    w: Vec<W>,
    blocks: Vec<Vec<usize>>,
    nblocks: Vec<usize>,
}

fn prepare<W: SolverWeight>(g: &LatticeGraph, w: Vec<W>) -> Prepared<W> {
    let n = g.len();
    let adj = (0..n)
        .map(|v| {
            let mut b = Bits::empty(n);
            for &u in g.neighbors(v) {
                b.set(u);
            }
            b
        })
        .collect();
    let mut blocks = Vec::new();
    let mut nblocks = Vec::new();
    // Aligned 2x2 boxes are cliques once the radius reaches sqrt(2).
    if g.radius * g.radius >= 2.0 - 1e-9 {
        for off in 0..4i64 {
            let (ox, oy) = (off & 1, off >> 1);
            let mut ids = std::collections::HashMap::new();
            let blk: Vec<usize> = g
                .vertices
                .iter()
                .map(|v| {
                    let key = ((v.y + oy).div_euclid(2), (v.x + ox).div_euclid(2));
                    let next = ids.len();
                    *ids.entry(key).or_insert(next)
                })
                .collect();
            nblocks.push(ids.len());
            blocks.push(blk);
        }
    }
    Prepared { adj, w, blocks, nblocks }
}

struct Outcome<W> {
    value: W,
    set: Vec<usize>,
    optimal: bool,
    canonical: bool,
    nodes: u64,
}

fn run<W: SolverWeight>(p: &Prepared<W>, opts: &SolveOptions) -> Outcome<W> {
    let n = p.adj.len();
    let deadline = opts.timeout.map(|t| Instant::now() + t);
    let mut core = Core {
        adj: &p.adj,
        w: &p.w,
        blocks: &p.blocks,
        nblocks: &p.nblocks,
        deadline,
        nodes: 0,
        timed_out: false,
    };
    let (value, set) = core.solve(&Bits::full(n));
    if core.timed_out || !opts.canonical {
        let optimal = !core.timed_out;
        return Outcome { value, set, optimal, canonical: false, nodes: core.nodes };
    }
    // Smallest optimal index list: decide vertices in order, keeping a witness set.
    let mut witness = set;
    let mut chosen: Vec<usize> = Vec::new();
    let mut chosen_w = W::default();
    let mut open = Bits::full(n);
    for v in 0..n {
        if !open.has(v) {
            continue;
        }
        if chosen_w == value {
            break;
        }
        open.clear(v);
        let mut rest = open.and_not(&p.adj[v]);
        let include = if witness.binary_search(&v).is_ok() {
            true
        } else {
            let (rw, rs) = core.solve(&rest);
            if core.timed_out {
                return Outcome { value, set: witness, optimal: true, canonical: false, nodes: core.nodes };
            }
            if chosen_w + p.w[v] + rw == value {
                witness = chosen.iter().copied().chain([v]).chain(rs).collect();
                witness.sort_unstable();
                true
            } else {
                false
            }
        };
        if include {
            chosen.push(v);
            chosen_w = chosen_w + p.w[v];
            std::mem::swap(&mut open, &mut rest);
        }
    }
    let canonical = chosen_w == value;
    let set = if canonical { chosen } else { witness };
    Outcome { value, set, optimal: true, canonical, nodes: core.nodes }
}

fn integer_weights(w: &[Rational]) -> Result<(Vec<i128>, BigInt)> {
    let scale = rational::lcm_of_denoms(w.iter());
    let ints: Option<Vec<i128>> = w.iter().map(|v| rational::scaled_i128(v, &scale)).collect();
    let ints = ints.ok_or_else(|| Error::Graph("weights too large for exact integer search".into()))?;
    let total: i128 = ints.iter().map(|v| v.abs()).try_fold(0i128, |a, b| a.checked_add(b)).unwrap_or(i128::MAX);
    if total >= i128::MAX / 4 {
        return Err(Error::Graph("weights too large for exact integer search".into()));
    }
    Ok((ints, scale))
}

/// Branch and bound on the resolved weights.
pub fn bnb_mwis(g: &LatticeGraph, opts: &SolveOptions) -> Result<SolveReport> {
    let t0 = Instant::now();
    let w = g.resolved_weights()?;
    let (ints, scale) = integer_weights(&w)?;
    let p = prepare(g, ints);
    let o = run(&p, opts);
    let weight = Rational::new(BigInt::from(o.value), scale);
    Ok(report(g, "bnb", o.set, weight, o.optimal, o.canonical, o.nodes, t0))
}

/// Branch and bound with δ kept symbolic: maximizes for all sufficiently large δ.
pub fn bnb_mwis_symbolic(g: &LatticeGraph, opts: &SolveOptions) -> Result<(Vec<usize>, DeltaWeight, bool)> {
    let biases: Vec<Rational> = g.vertices.iter().map(|v| v.weight.bias.clone()).collect();
    let (ints, _) = integer_weights(&biases)?;
    let w: Vec<Lex> = g.vertices.iter().zip(ints).map(|(v, b)| Lex(v.weight.coeff, b)).collect();
    let p = prepare(g, w);
    let o = run(&p, opts);
    let sw = g.symbolic_weight(&o.set);
    Ok((o.set, sw, o.optimal))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub independent: bool,
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
    pub weight_matches: bool,
}

impl VerifyOutcome {
    pub fn ok(&self) -> bool {
        self.independent && self.weight_matches
    }
}

pub fn verify(g: &LatticeGraph, set: &[usize], claimed: &Rational) -> Result<VerifyOutcome> {
    let w = g.resolved_weights()?;
    let independent = g.is_independent(set);
    let weight: Rational = set.iter().filter(|&&v| v < w.len()).map(|&v| w[v].clone()).sum();
    let weight_matches = weight == *claimed;
    Ok(VerifyOutcome { independent, weight, weight_matches })
}

/// Weight of an index set as an `f64`, for display only.
pub fn approx(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinggraph::{LatticeVertex, DEFAULT_RADIUS};
    use crate::rational::int;

    fn graph(pts: &[(i64, i64, i64)]) -> LatticeGraph {
        let vs = pts
            .iter()
            .map(|&(x, y, w)| LatticeVertex { x, y, weight: DeltaWeight::constant(int(w)), conn: None, label: String::new() })
            .collect();
        LatticeGraph::new(DEFAULT_RADIUS, None, vs).unwrap()
    }

    #[test]
    fn path_of_three() {
        let g = graph(&[(0, 0, 2), (1, 0, 3), (2, 0, 2)]);
        let b = brute_mwis(&g, 30).unwrap();
        assert_eq!(b.weight, int(4));
        assert_eq!(b.set, vec![0, 2]);
        let o = bnb_mwis(&g, &SolveOptions::default()).unwrap();
        assert_eq!(o.set, b.set);
    }

    #[test]
    fn ties_break_lexicographically() {
        // Two disjoint optimal choices of weight 2.
        let g = graph(&[(0, 0, 1), (1, 0, 2), (2, 0, 1)]);
        let b = brute_mwis(&g, 30).unwrap();
        assert_eq!(b.set, vec![0, 2]);
        let o = bnb_mwis(&g, &SolveOptions::default()).unwrap();
        assert_eq!(o.set, vec![0, 2]);
    }

    #[test]
    fn negative_and_empty() {
        let g = graph(&[(0, 0, -1)]);
        assert_eq!(brute_mwis(&g, 30).unwrap().set, Vec::<usize>::new());
        assert_eq!(bnb_mwis(&g, &SolveOptions::default()).unwrap().weight, int(0));
        let e = graph(&[]);
        assert_eq!(bnb_mwis(&e, &SolveOptions::default()).unwrap().weight, int(0));
    }

    #[test]
    fn verify_detects_bad_sets() {
        let g = graph(&[(0, 0, 2), (1, 0, 3)]);
        assert!(!verify(&g, &[0, 1], &int(5)).unwrap().ok());
        assert!(verify(&g, &[1], &int(3)).unwrap().ok());
        assert!(!verify(&g, &[1], &int(4)).unwrap().ok());
    }

    #[test]
    fn brute_cap() {
        let pts: Vec<(i64, i64, i64)> = (0..31).map(|i| (2 * i, 0, 1)).collect();
        assert!(brute_mwis(&graph(&pts), 30).is_err());
    }
}
