use qapc_core::cbop::{check_encoding, enumerate_valid, EncodingResult, VariableMap};
use qapc_core::compiler::{stitch, FragmentLibrary};
use qapc_core::oracle::brute_force;
use qapc_core::qap::*;
use qapc_core::tile::{circuit_to_problem, circuit_valid_assignments, EnumOptions};

#[test]
fn reduced_circuit_shape_and_semantics() {
    for n in 2..=4 {
        let mut rng = seeded_rng(n as u64);
        let inst = random_instance(n, 9, &mut rng);
        let qc = reduced_circuit(&inst);
        qc.circuit.validate().unwrap();
        assert!(qc.circuit.is_closed(), "n={n}");
        let opts = EnumOptions { max_nets: 10_000, ..Default::default() };
        let all = circuit_valid_assignments(&qc.circuit, &opts).unwrap();
        let (red, _) = reduced_formulation(&inst);
        let xs = enumerate_valid(&red, 64).unwrap();
        assert_eq!(all.len(), xs.len(), "n={n}");
        for (a, w) in &all {
            let p = qc.decode(a).unwrap();
            assert_eq!(*w, &qc.constant - inst.cost(&p));
        }
        let best = all.iter().map(|(_, w)| w.clone()).max().unwrap();
        assert_eq!(&qc.constant - best, brute_force(&inst).unwrap().cost);
        let lib = FragmentLibrary::builtin();
        let cc = stitch(&qc.circuit, &lib).unwrap();
        println!("n={n} tiles={} vertices={} k={}", qc.circuit.cells().count(), cc.graph.len(), cc.k);
    }
}

#[test]
fn circuit_problem_encodes_reduced() {
    for n in 2..=4 {
        let mut rng = seeded_rng(10 + n as u64);
        let inst = random_instance(n, 9, &mut rng);
        let qc = reduced_circuit(&inst);
        let (p, nets) = circuit_to_problem(&qc.circuit).unwrap();
        let sources: Vec<usize> = qc
            .var_ends
            .iter()
            .map(|e| nets.iter().position(|net| net.ends.contains(e)).unwrap())
            .collect();
        let (red, _) = reduced_formulation(&inst);
        let r = check_encoding(&p, &red, &VariableMap::select(&sources), 4096).unwrap();
        assert!(matches!(r, EncodingResult::Encodes { .. }), "n={n}: {r:?}");
    }
}

#[test]
fn reduced_encodes_canonical() {
    for n in 2..=5 {
        let mut rng = seeded_rng(100 + n as u64);
        let inst = random_instance(n, 9, &mut rng);
        let (red, co) = reduced_formulation(&inst);
        let can = canonical_formulation(&inst);
        let r = check_encoding(&red, &can, &reduced_to_canonical_map(n), 32).unwrap();
        assert_eq!(r, EncodingResult::Encodes { offset: -co.c_i.clone() });
        let cf = closed_form_comparison(&inst, &co);
        println!("n={n} {cf:?}");
    }
}

/// Partial permutation matrices of an n x n board.
fn rook_count(n: usize) -> usize {
    // sum_k C(n,k)^2 k!
    let binom = |n: usize, k: usize| (0..k).fold(1usize, |a, i| a * (n - i) / (i + 1));
    (0..=n).map(|k| binom(n, k) * binom(n, k) * (1..=k).product::<usize>()).sum()
}

#[test]
fn naive_circuit_semantics() {
    assert_eq!((rook_count(2), rook_count(3)), (7, 34));
    for n in 2..=3 {
        let mut rng = seeded_rng(200 + n as u64);
        let inst = random_instance(n, 9, &mut rng);
        let qc = naive_circuit(&inst);
        assert!(qc.circuit.is_closed());
        let opts = EnumOptions { max_nets: 10_000, ..Default::default() };
        let all = circuit_valid_assignments(&qc.circuit, &opts).unwrap();
        assert_eq!(all.len(), rook_count(n), "n={n}");
        let w0 = qc.w0.clone().unwrap();
        assert_eq!(qc.constant, w0 * qapc_core::rational::int((n * n) as i64));
        for (a, w) in &all {
            if let Some(p) = qc.decode(a) {
                assert_eq!(*w, &qc.constant - inst.cost(&p));
            }
        }
        let best = all.iter().max_by(|x, y| x.1.cmp(&y.1)).unwrap();
        let p = qc.decode(&best.0).expect("optimum is a full placement");
        assert_eq!(inst.cost(&p), brute_force(&inst).unwrap().cost);
    }
}
