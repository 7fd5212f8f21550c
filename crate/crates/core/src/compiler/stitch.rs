use num_traits::Zero;

use super::certify::{certify_fragment, CompilationCertificate};
use super::fragment::{FragmentLibrary, TileFragment};
use crate::error::{Error, Result};
use crate::kinggraph::{ConnTag, DeltaWeight, LatticeGraph, LatticeVertex, BOX, DEFAULT_RADIUS};
use crate::rational::Rational;
use crate::tile::{Circuit, Tile};

#[derive(Clone, Debug)]
pub struct PlacedTile {
    pub r: usize,
    pub c: usize,
    pub label: String,
    pub certificate: CompilationCertificate,
}

/// A circuit compiled into one lattice graph.
#[derive(Clone, Debug)]
pub struct CompiledCircuit {
    pub circuit: Circuit,
    pub graph: LatticeGraph,
    /// Optimum δ-coefficient: `sum k_i` minus the number of stitched edge pairs.
    pub k: i64,
    /// Sum of the tile `w_tilde`.
    pub w_tilde: Rational,
    /// Sum of the per-tile lowering constants (each `<= 0`).
    pub offset: Rational,
    pub tiles: Vec<PlacedTile>,
}

impl CompiledCircuit {
    /// Circuit weight `k δ + w(x)` of a valid assignment with weight `w`, as seen by
    /// the lattice graph (lowering constants removed).
    pub fn graph_value(&self, w: &Rational) -> DeltaWeight {
        DeltaWeight::new(self.k, w - &self.offset)
    }
}

/// Decorates and certifies the fragment for one tile.
pub fn compile_tile(tile: &Tile, lib: &FragmentLibrary) -> Result<(TileFragment, CompilationCertificate)> {
    let (lowered, offset) = tile.lowered();
    let table = lowered.effective_table();
    let entry = lib.find(&table).ok_or_else(|| Error::NoFragment(tile.describe()))?;
    let frag = entry
        .fragment
        .decorate(&lowered)
        .map_err(|m| Error::Certification { label: entry.fragment.label.clone(), detail: m })?;
    let mut cert = certify_fragment(&lowered, &frag)?;
    cert.offset = offset;
    Ok((frag, cert))
}

/// Stitches a closed circuit.
pub fn stitch(c: &Circuit, lib: &FragmentLibrary) -> Result<CompiledCircuit> {
    let dangling = c.dangling().len();
    if dangling > 0 {
        return Err(Error::OpenCircuit(dangling));
    }
    stitch_open(c, lib)
}

/// Stitches a circuit that may have dangling wire ends; those ends keep their
/// connecting vertices in `V_con` of the result.
pub fn stitch_open(c: &Circuit, lib: &FragmentLibrary) -> Result<CompiledCircuit> {
    c.validate()?;
    let mut vertices = Vec::new();
    let mut tiles = Vec::new();
    let mut k_sum = 0i64;
    let mut w_tilde = Rational::zero();
    let mut offset = Rational::zero();
    let mut ends = 0usize;
    for (r, col, tile) in c.cells() {
        let (frag, cert) = compile_tile(tile, lib)?;
        for (i, v) in frag.vertices.iter().enumerate() {
            vertices.push(LatticeVertex {
                x: BOX * col as i64 + v.pos.1 as i64,
                y: BOX * r as i64 + v.pos.0 as i64,
                weight: DeltaWeight::new(v.coeff, v.bias.clone()),
                conn: v.edge.map(|edge| ConnTag { tile: (r, col), edge }),
                label: format!("t{r}_{col}/{}/{i}", frag.label),
            });
        }
        k_sum += cert.k;
        w_tilde += &cert.w_tilde;
        offset += &cert.offset;
        ends += tile.wired().len();
        tiles.push(PlacedTile { r, c: col, label: frag.label.clone(), certificate: cert });
    }
    let graph = LatticeGraph::new(DEFAULT_RADIUS, None, vertices)?;
    check_adjacency(c, &graph)?;
    let pairs = (ends - c.dangling().len()) / 2;
    Ok(CompiledCircuit {
        circuit: c.clone(),
        graph,
        k: k_sum - pairs as i64,
        w_tilde,
        offset,
        tiles,
    })
}

/// Cross-box edges must join exactly the facing connecting vertices of each net.
fn check_adjacency(c: &Circuit, g: &LatticeGraph) -> Result<()> {
    let mut facing = 0usize;
    for a in 0..g.len() {
        let va = &g.vertices[a];
        for &b in g.neighbors(a) {
            if b <= a {
                continue;
            }
            let vb = &g.vertices[b];
            if va.tile_box() == vb.tile_box() {
                continue;
            }
            let (Some(ta), Some(tb)) = (va.conn, vb.conn) else {
                return Err(Error::Stitch(format!("{} touches {} across boxes", va.label, vb.label)));
            };
            let across = c.neighbor(ta.tile.0, ta.tile.1, ta.edge);
            if across != Some(tb.tile) || tb.edge != ta.edge.opposite() {
                return Err(Error::Stitch(format!("{} touches non-facing {}", va.label, vb.label)));
            }
            facing += 1;
        }
    }
    let nets = c.nets().iter().filter(|n| n.ends.len() == 2).count();
    if facing != nets {
        return Err(Error::Stitch(format!("{nets} stitched edge pairs but {facing} facing adjacencies")));
    }
    Ok(())
}
