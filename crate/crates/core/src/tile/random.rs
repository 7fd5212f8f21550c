use rand::Rng;

use super::{Circuit, Edge, EdgeSet, Selector, Tile};
use crate::rational::int;

/// Shape limits for [`random_circuit`].
#[derive(Clone, Debug)]
pub struct RandomCircuitOptions {
    pub max_rows: usize,
    pub max_cols: usize,
    pub max_tiles: usize,
    /// Allow wires leaving the grid.
    pub open: bool,
    /// Biases are drawn from `-bias_range..=bias_range`.
    pub bias_range: i64,
}

impl Default for RandomCircuitOptions {
    fn default() -> Self {
        RandomCircuitOptions { max_rows: 2, max_cols: 3, max_tiles: 6, open: false, bias_range: 3 }
    }
}

fn tile_for(w: EdgeSet, rng: &mut impl Rng) -> Option<Tile> {
    use Edge::*;
    let e = w.edges();
    let t = match e.len() {
        1 => Tile::variable(e[0]),
        2 if e[0].opposite() == e[1] => Tile::straight(e[0].is_horizontal()),
        2 => Tile::corner(e[0], e[1]),
        3 if w == EdgeSet::of(&[Right, Top, Bottom]) => {
            Tile::or_gate((Right, Top), Bottom).restrict(Selector::Pair(true, true))
        }
        3 if w == EdgeSet::of(&[Top, Left, Right]) => {
            Tile::and_gate((Top, Left), Right).restrict(Selector::Pair(false, false))
        }
        4 if rng.gen_bool(0.5) => Tile::intersection().restrict(Selector::Pair(true, true)),
        4 => Tile::intersection(),
        _ => return None,
    };
    Some(t)
}

fn link(a: usize, ea: Edge, b: Option<usize>, wired: &mut [EdgeSet]) {
    wired[a].0 |= ea.bit();
    if let Some(b) = b {
        wired[b].0 |= ea.opposite().bit();
    }
}

/// A random circuit built only from tiles the built-in fragment library covers,
/// with random single-edge biases.
pub fn random_circuit(rng: &mut impl Rng, opts: &RandomCircuitOptions) -> Circuit {
    'retry: loop {
        let rows = rng.gen_range(1..=opts.max_rows);
        let cols = rng.gen_range(1..=opts.max_cols);
        let mut wired = vec![EdgeSet::default(); rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols && rng.gen_bool(0.6) {
                    link(i, Edge::Right, Some(i + 1), &mut wired);
                }
                if r + 1 < rows && rng.gen_bool(0.6) {
                    link(i, Edge::Bottom, Some(i + cols), &mut wired);
                }
                if opts.open {
                    for (e, border) in [(Edge::Top, r == 0), (Edge::Left, c == 0), (Edge::Right, c + 1 == cols), (Edge::Bottom, r + 1 == rows)] {
                        if border && rng.gen_bool(0.25) {
                            link(i, e, None, &mut wired);
                        }
                    }
                }
            }
        }
        if wired.iter().filter(|w| !w.is_empty()).count() > opts.max_tiles || wired.iter().all(|w| w.is_empty()) {
            continue;
        }
        let mut circ = Circuit::new(rows, cols);
        for (i, w) in wired.iter().enumerate() {
            if w.is_empty() {
                continue;
            }
            let Some(mut t) = tile_for(*w, rng) else { continue 'retry };
            if opts.bias_range > 0 && rng.gen_bool(0.5) {
                let es = w.edges();
                let e = es[rng.gen_range(0..es.len())];
                let v = rng.gen_range(-opts.bias_range..=opts.bias_range);
                t = t.bias(Selector::Edges(vec![(e, rng.gen_bool(0.5))]), int(v));
            }
            circ.set(i / cols, i % cols, t);
        }
        return circ;
    }
}
