use proptest::prelude::*;
use qapc_core::compiler::FragmentLibrary;
use qapc_core::io::*;
use qapc_core::kinggraph::random_lattice_graph;
use qapc_core::oracle::brute_force;
use qapc_core::pipeline::{compile_instance, DeltaChoice, Formulation};
use qapc_core::qap::{random_instance, reduced_circuit, seeded_rng, QapInstance};
use qapc_core::rational::{int, ratio};
use qapc_core::tile::{pairwise_or_circuit, random_circuit, RandomCircuitOptions};
use qapc_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn parse(s: &str) -> qapc_core::Result<QapInstance> {
    parse_instance(s, ParseOptions::default())
}

#[test]
fn parse_examples() {
    let one = parse("1\n3\n2").unwrap();
    assert_eq!((one.n, one.f[0][0].clone(), one.d[0][0].clone()), (1, int(3), int(2)));
    let two = parse("2\n0 1\n1 0\n0 5\n5 0").unwrap();
    assert_eq!(two, QapInstance::from_ints(&[vec![0, 1], vec![1, 0]], &[vec![0, 5], vec![5, 0]]).unwrap());
    assert_eq!(brute_force(&two).unwrap().cost, int(10));
    match parse("2\n0 1\n1") {
        Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (3, 2)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn float_literals() {
    let s = "2\n0 0.5\n1 0\n0 1\n1 0";
    assert!(matches!(parse(s), Err(Error::Parse { line: 2, col: 3, .. })));
    let inst = parse_instance(s, ParseOptions { allow_float: true, ..Default::default() }).unwrap();
    assert_eq!(inst.f[0][1], ratio(1, 2));
}

#[test]
fn swap_and_json() {
    let s = "2\n0 1\n1 0\n0 5\n5 0";
    let sw = parse_instance(s, ParseOptions { swap_matrices: true, ..Default::default() }).unwrap();
    assert_eq!(sw.f[0][1], int(5));
    let json = serde_json::to_string(&sw).unwrap();
    assert_eq!(parse(&json).unwrap(), sw);
}

#[test]
fn graph_json_round_trip() {
    let inst = random_instance(2, 9, &mut seeded_rng(4));
    let ci = compile_instance(&inst, Formulation::Reduced, &DeltaChoice::Auto, &FragmentLibrary::builtin()).unwrap();
    let s = graph_to_json(&ci.cc.graph).unwrap();
    let back = graph_from_json(&s).unwrap();
    assert_eq!(back, ci.cc.graph);
    assert_eq!(graph_to_json(&back).unwrap(), s);
}

#[test]
fn unparsable_weight() {
    let s = r#"{"radius": 1.5, "vertices": [{"x": 0, "y": 0, "weight": "1/x"}]}"#;
    assert!(graph_from_json(s).is_err());
}

#[test]
fn circuit_json_round_trip() {
    let qc = reduced_circuit(&random_instance(3, 9, &mut seeded_rng(2)));
    let s = circuit_to_json(&qc.circuit).unwrap();
    assert_eq!(circuit_from_json(&s).unwrap(), qc.circuit);
    let ex = pairwise_or_circuit([1, 2, 3, 4].map(int)).circuit;
    assert_eq!(circuit_from_json(&circuit_to_json(&ex).unwrap()).unwrap(), ex);
}

#[test]
fn svg_is_deterministic_and_checks_highlight() {
    let inst = random_instance(2, 9, &mut seeded_rng(4));
    let ci = compile_instance(&inst, Formulation::Reduced, &DeltaChoice::Auto, &FragmentLibrary::builtin()).unwrap();
    let g = &ci.cc.graph;
    let o = SvgOptions { highlight: vec![0], show_weights: true, ..Default::default() };
    assert_eq!(render_graph(g, &o).unwrap(), render_graph(g, &o).unwrap());
    let nb = g.neighbors(0)[0];
    let bad = SvgOptions { highlight: vec![0, nb], ..Default::default() };
    assert!(render_graph(g, &bad).is_err());
    let c = render_circuit(&ci.qc.circuit, &SvgOptions::default());
    assert_eq!(c, render_circuit(&ci.qc.circuit, &SvgOptions::default()));
}

proptest! {
    #[test]
    fn instance_text_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let inst = random_instance(n, 20, &mut seeded_rng(seed));
        prop_assert_eq!(parse(&instance_to_text(&inst)).unwrap(), inst);
    }

    #[test]
    fn random_graph_round_trip(seed in any::<u64>()) {
        let g = random_lattice_graph(&mut ChaCha8Rng::seed_from_u64(seed), 20, 6, 9);
        prop_assert_eq!(graph_from_json(&graph_to_json(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn random_circuit_round_trip(seed in any::<u64>()) {
        let c = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), &RandomCircuitOptions { open: true, ..Default::default() });
        prop_assert_eq!(circuit_from_json(&circuit_to_json(&c).unwrap()).unwrap(), c);
    }
}
