use super::{Circuit, Edge, End, Selector, Tile};
use crate::rational::Rational;

/// A circuit together with its dangling input and output ends.
#[derive(Clone, Debug)]
pub struct ChainCircuit {
    pub circuit: Circuit,
    pub inputs: Vec<End>,
    pub output: End,
}

/// Vertical chain: inputs enter from the right, the output leaves at the bottom.
/// Each gate is a (1,1)-restricted OR, so at most one input is 1 and the output
/// is their sum.
pub fn build_or_chain(k: usize) -> ChainCircuit {
    assert!(k >= 1, "chain needs at least one input");
    let mut c = Circuit::new(k, 1);
    c.set(0, 0, Tile::corner(Edge::Right, Edge::Bottom));
    for r in 1..k {
        c.set(r, 0, Tile::or_gate((Edge::Right, Edge::Top), Edge::Bottom).restrict(Selector::Pair(true, true)));
    }
    ChainCircuit {
        circuit: c,
        inputs: (0..k).map(|r| (r, 0, Edge::Right)).collect(),
        output: (k - 1, 0, Edge::Bottom),
    }
}

/// Horizontal chain: inputs enter from the top, the output leaves at the right.
/// Each gate is a (0,0)-restricted AND, so at most one input is 0 and the output
/// is 1 exactly when all inputs are 1.
pub fn build_and_chain(k: usize) -> ChainCircuit {
    assert!(k >= 1, "chain needs at least one input");
    let mut c = Circuit::new(1, k);
    c.set(0, 0, Tile::corner(Edge::Top, Edge::Right));
    for col in 1..k {
        c.set(0, col, Tile::and_gate((Edge::Top, Edge::Left), Edge::Right).restrict(Selector::Pair(false, false)));
    }
    ChainCircuit {
        circuit: c,
        inputs: (0..k).map(|col| (0, col, Edge::Top)).collect(),
        output: (0, k - 1, Edge::Right),
    }
}

/// Four-tile circuit with three free wires: `x1`, `x2` enter from the top,
/// `x3` from the right. Valid assignments carry the weights
/// `w1+w3`, `w2+w3`, `w1+w2`, `w1+w2+w3+w4`.
pub fn pairwise_or_circuit(w: [Rational; 4]) -> ChainCircuit {
    let [w1, w2, w3, w4] = w;
    let mut c = Circuit::new(2, 2);
    c.set(0, 0, Tile::straight(false).bias(Selector::Wire(true), w1));
    c.set(0, 1, Tile::straight(false).bias(Selector::Wire(true), w2));
    c.set(
        1,
        0,
        Tile::corner_meet(Edge::Right, Edge::Top)
            .restrict(Selector::Pair(false, false))
            .bias(Selector::Pair(true, true), w4),
    );
    c.set(
        1,
        1,
        Tile::and_gate((Edge::Right, Edge::Top), Edge::Left)
            .restrict(Selector::Pair(false, false))
            .bias(Selector::Edges(vec![(Edge::Right, true)]), w3),
    );
    ChainCircuit {
        circuit: c,
        inputs: vec![(0, 0, Edge::Top), (0, 1, Edge::Top), (1, 1, Edge::Right)],
        output: (1, 1, Edge::Right),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::{circuit_valid_assignments, EnumOptions};

    fn values(ch: &ChainCircuit) -> Vec<(Vec<bool>, bool)> {
        let all = circuit_valid_assignments(&ch.circuit, &EnumOptions::default()).unwrap();
        let mut v: Vec<(Vec<bool>, bool)> =
            all.iter().map(|(a, _)| (ch.inputs.iter().map(|e| a[e]).collect(), a[&ch.output])).collect();
        v.sort();
        v
    }

    #[test]
    fn or_chain_counts_at_most_one() {
        for k in 1..=4 {
            let v = values(&build_or_chain(k));
            assert_eq!(v.len(), k + 1);
            for (ins, out) in v {
                let ones = ins.iter().filter(|b| **b).count();
                assert!(ones <= 1);
                assert_eq!(out, ones == 1);
            }
        }
    }

    #[test]
    fn and_chain_allows_one_zero() {
        for k in 1..=4 {
            let v = values(&build_and_chain(k));
            assert_eq!(v.len(), k + 1);
            for (ins, out) in v {
                let zeros = ins.iter().filter(|b| !**b).count();
                assert!(zeros <= 1);
                assert_eq!(out, zeros == 0);
            }
        }
    }
}
