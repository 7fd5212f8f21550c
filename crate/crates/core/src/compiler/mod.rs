//! Lattice fragments for tiles, their exhaustive certification, and stitching.

mod certify;
mod fragment;
mod stitch;

pub use certify::{certify_fragment, CertificationFailure, CompilationCertificate};
pub use fragment::{
    biased_wire_fragment, builtin_fragments, connecting_slots, copy_gadget_fragment, FragVertex, FragmentLibrary,
    LibraryEntry, TileFragment, MAX_FRAGMENT_VERTICES,
};
pub use stitch::{compile_tile, stitch, stitch_open, CompiledCircuit, PlacedTile};

use num_traits::{One, Signed, Zero};

use crate::kinggraph::LatticeGraph;
use crate::rational::{ratio, Rational};
use crate::tile::CircuitAssignment;

pub fn default_margin() -> Rational {
    ratio(1, 10)
}

/// A δ strictly above `bound`: `bound * (1 + margin)`, or `margin` when the bound is 0.
pub fn choose_delta(bound: &Rational, margin: &Rational) -> Rational {
    assert!(margin.is_positive(), "margin must be positive");
    if bound.is_zero() || bound.is_negative() {
        margin.clone()
    } else {
        bound * (Rational::one() + margin)
    }
}

/// Reads wire values off the connecting vertices: edges 1 and 4 are 1 when their
/// vertex is in `set`, edges 2 and 3 when it is not.
pub fn decode_assignment(g: &LatticeGraph, set: &[usize]) -> CircuitAssignment {
    let mut inside = vec![false; g.len()];
    for &v in set {
        inside[v] = true;
    }
    let mut out = CircuitAssignment::new();
    for (i, v) in g.vertices.iter().enumerate() {
        if let Some(t) = v.conn {
            out.insert((t.tile.0, t.tile.1, t.edge), inside[i] == t.edge.reads_one_when_selected());
        }
    }
    out
}
