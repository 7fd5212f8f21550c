use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::fragment::TileFragment;
use crate::rational::{self, Rational};
use crate::tile::{Edge, Row, Tile};

/// `w_circ(S) = kδ + w(x(S))` is attained on every valid row and nothing beats it;
/// invalid rows stay at or below `(k-1)δ + w_tilde`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompilationCertificate {
    pub k: i64,
    #[serde(with = "rational::serde_str")]
    pub w_tilde: Rational,
    /// `k - c(S)` is at least the Hamming distance from `x(S)` to the nearest valid row.
    pub flip_bounded: bool,
    pub independent_sets: usize,
    /// Constant removed when the tile biases were made nonnegative.
    #[serde(with = "rational::serde_str", default = "Rational::zero")]
    pub offset: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationFailure {
    pub label: String,
    pub property: &'static str,
    pub witness: Vec<(u8, u8)>,
    pub detail: String,
}

impl std::fmt::Display for CertificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} violates {}: {} (witness {:?})", self.label, self.property, self.detail, self.witness)
    }
}

impl From<CertificationFailure> for crate::Error {
    fn from(c: CertificationFailure) -> Self {
        crate::Error::Certification {
            label: c.label.clone(),
            detail: format!("{}: {} (witness {:?})", c.property, c.detail, c.witness),
        }
    }
}

/// One independent set of a fragment, summarized.
#[derive(Clone, Debug)]
pub(crate) struct SetSummary {
    pub mask: u32,
    pub row: Row,
    pub coeff: i64,
    pub bias: Rational,
}

pub(crate) fn adjacency(frag: &TileFragment) -> Vec<u32> {
    let vs = &frag.vertices;
    (0..vs.len())
        .map(|i| {
            (0..vs.len())
                .filter(|&j| {
                    let (a, b) = (vs[i].pos, vs[j].pos);
                    i != j && a.0.abs_diff(b.0) <= 1 && a.1.abs_diff(b.1) <= 1
                })
                .fold(0u32, |m, j| m | 1 << j)
        })
        .collect()
}

/// Every independent set with its decoded row, δ-coefficient of `w_circ` and bias.
pub(crate) fn summarize(frag: &TileFragment) -> Vec<SetSummary> {
    let adj = adjacency(frag);
    let n = frag.vertices.len();
    let mut out = Vec::new();
    fn rec(i: usize, n: usize, mask: u32, blocked: u32, adj: &[u32], out: &mut Vec<u32>) {
        if i == n {
            out.push(mask);
            return;
        }
        rec(i + 1, n, mask, blocked, adj, out);
        if blocked >> i & 1 == 0 {
            rec(i + 1, n, mask | 1 << i, blocked | adj[i], adj, out);
        }
    }
    let mut masks = Vec::new();
    rec(0, n, 0, 0, &adj, &mut masks);
    for mask in masks {
        let mut row = 0u8;
        let mut coeff = 0i64;
        let mut bias = Rational::zero();
        for (i, v) in frag.vertices.iter().enumerate() {
            let inside = mask >> i & 1 == 1;
            if inside {
                coeff += v.coeff;
                bias += &v.bias;
            }
            if let Some(e) = v.edge {
                if !inside {
                    coeff += 1;
                }
                if inside == e.reads_one_when_selected() {
                    row |= e.bit();
                }
            }
        }
        out.push(SetSummary { mask, row, coeff, bias });
    }
    out
}

fn witness(frag: &TileFragment, mask: u32) -> Vec<(u8, u8)> {
    frag.vertices.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.pos).collect()
}

fn fail(frag: &TileFragment, property: &'static str, mask: u32, detail: String) -> CertificationFailure {
    CertificationFailure { label: frag.label.clone(), property, witness: witness(frag, mask), detail }
}

/// Exhaustively certifies `frag` as a compilation of `tile`, where the tile's row
/// weights are the targets `w(x)`. Biases must already be injected into the fragment.
pub fn certify_fragment(tile: &Tile, frag: &TileFragment) -> Result<CompilationCertificate, CertificationFailure> {
    if let Err(detail) = frag.check_placement() {
        return Err(fail(frag, "placement", 0, detail));
    }
    let table = tile.effective_table();
    let wired_frag: Vec<Edge> = frag.vertices.iter().filter_map(|v| v.edge).collect();
    let mut sorted = wired_frag.clone();
    sorted.sort();
    if sorted != table.wired {
        return Err(fail(frag, "placement", 0, format!("fragment serves edges {sorted:?}, tile wires {:?}", table.wired)));
    }
    let targets: BTreeMap<Row, Rational> = table.rows.iter().map(|&r| (r, tile.row_weight(r))).collect();
    let sets = summarize(frag);

    let k = sets.iter().filter(|s| targets.contains_key(&s.row)).map(|s| s.coeff).max();
    let Some(k) = k else {
        return Err(fail(frag, "property 1", 0, "no independent set decodes to a valid row".into()));
    };
    for (&row, w) in &targets {
        let attained = sets.iter().any(|s| s.row == row && s.coeff == k && s.bias == *w);
        if !attained {
            let best = sets.iter().filter(|s| s.row == row).max_by(|a, b| a.coeff.cmp(&b.coeff));
            return Err(fail(
                frag,
                "property 1",
                best.map_or(0, |s| s.mask),
                format!("row {} never reaches {k}d + {}", fmt_bits(&table.wired, row), rational::fmt_rational(w)),
            ));
        }
    }
    let mut w_tilde = targets.values().map(|w| w.abs()).max().unwrap_or_else(Rational::zero);
    let mut flip_bounded = true;
    for s in &sets {
        match targets.get(&s.row) {
            Some(w) => {
                if s.coeff > k || s.bias > *w {
                    return Err(fail(
                        frag,
                        "property 2",
                        s.mask,
                        format!("valid row {} reaches {}d + {}", fmt_bits(&table.wired, s.row), s.coeff, rational::fmt_rational(&s.bias)),
                    ));
                }
            }
            None => {
                if s.coeff > k - 1 {
                    return Err(fail(
                        frag,
                        "property 2",
                        s.mask,
                        format!("invalid row {} reaches {}d", fmt_bits(&table.wired, s.row), s.coeff),
                    ));
                }
                if s.bias > w_tilde {
                    w_tilde = s.bias.clone();
                }
            }
        }
        let dist = table.distance(s.row).unwrap_or(0) as i64;
        if k - s.coeff < dist {
            flip_bounded = false;
        }
    }
    Ok(CompilationCertificate { k, w_tilde, flip_bounded, independent_sets: sets.len(), offset: Rational::zero() })
}

pub(crate) fn fmt_bits(wired: &[Edge], row: Row) -> String {
    crate::tile::fmt_row(crate::tile::EdgeSet::of(wired), row)
}

/// Vertex usable as the bias anchor of `row`: it only occurs in sets decoding to
/// `row` or to invalid rows, and it lies in a set of `row` with coefficient `k`.
pub(crate) fn find_anchor(frag: &TileFragment, sets: &[SetSummary], valid: &[Row], row: Row, k: i64) -> Option<usize> {
    (0..frag.vertices.len()).find(|&v| {
        let bit = 1u32 << v;
        let clean = sets
            .iter()
            .filter(|s| s.mask & bit != 0)
            .all(|s| s.row == row || !valid.contains(&s.row));
        clean && sets.iter().any(|s| s.mask & bit != 0 && s.row == row && s.coeff == k)
    })
}
