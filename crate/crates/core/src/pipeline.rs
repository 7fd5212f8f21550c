//! End-to-end: instance to lattice graph, solve, decode, compare with the oracle.

use serde::{Deserialize, Serialize};

use crate::compiler::{choose_delta, decode_assignment, default_margin, stitch, CompiledCircuit, FragmentLibrary};
use crate::error::{Error, Result};
use crate::kinggraph::DeltaWeight;
use crate::mwis::{bnb_mwis, brute_mwis, SolveOptions, SolveReport, DEFAULT_BRUTE_CAP};
use crate::oracle::{brute_force, OracleResult};
use crate::qap::{naive_circuit, reduced_circuit, Layout, Placement, QapCircuit, QapInstance};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// All `n^2` variables on the naive crossing lattice.
    Canonical,
    /// `(n-1)^2` variables with OR and AND chains.
    Reduced,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeltaChoice {
    Auto,
    Value(Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Brute,
    Bnb,
}

#[derive(Clone, Debug)]
pub struct CompiledInstance {
    pub qc: QapCircuit,
    pub cc: CompiledCircuit,
    /// δ must exceed this for the optimum to decode correctly.
    pub bound: Rational,
    pub delta: Rational,
}

pub fn build_circuit(inst: &QapInstance, f: Formulation) -> QapCircuit {
    match f {
        Formulation::Canonical => naive_circuit(inst),
        Formulation::Reduced => reduced_circuit(inst),
    }
}

/// The δ threshold: the per-wire bound for the reduced layout, `2 w_tilde` otherwise.
pub fn delta_bound(qc: &QapCircuit, cc: &CompiledCircuit) -> Rational {
    match (&qc.layout, &qc.coeffs) {
        (Layout::Reduced, Some(c)) => c.wire_bound(),
        _ => rational::int(2) * &cc.w_tilde,
    }
}

pub fn compile_instance(inst: &QapInstance, f: Formulation, delta: &DeltaChoice, lib: &FragmentLibrary) -> Result<CompiledInstance> {
    inst.validate()?;
    if inst.n < 2 {
        return Err(Error::Instance(format!("compilation needs n >= 2, got {}", inst.n)));
    }
    let qc = build_circuit(inst, f);
    let mut cc = stitch(&qc.circuit, lib)?;
    let bound = delta_bound(&qc, &cc);
    let delta = match delta {
        DeltaChoice::Auto => choose_delta(&bound, &default_margin()),
        DeltaChoice::Value(v) => {
            if *v <= Rational::from_integer(0.into()) {
                return Err(Error::Instance("delta must be positive".into()));
            }
            v.clone()
        }
    };
    cc.graph.delta = Some(delta.clone());
    Ok(CompiledInstance { qc, cc, bound, delta })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QapSolution {
    pub placement: Option<Placement>,
    #[serde(with = "rational::serde_str_opt")]
    pub cost: Option<Rational>,
    /// The decoded circuit assignment satisfies every tile.
    pub valid: bool,
    /// Independent-set weight equals `k δ + w(x) - offset` for the decoded `x`.
    pub weight_consistent: bool,
    pub mwis: SolveReport,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub vertices: usize,
}

pub fn solve_compiled(ci: &CompiledInstance, inst: &QapInstance, solver: Solver, opts: &SolveOptions) -> Result<QapSolution> {
    let g = &ci.cc.graph;
    let rep = match solver {
        Solver::Brute => brute_mwis(g, DEFAULT_BRUTE_CAP)?,
        Solver::Bnb => bnb_mwis(g, opts)?,
    };
    let a = decode_assignment(g, &rep.set);
    let valid = ci.qc.circuit.is_valid(&a);
    let placement = if valid { ci.qc.decode(&a) } else { None };
    let weight_consistent = match (&placement, ci.qc.circuit.weight(&a)) {
        (Some(_), Some(w)) => ci.cc.graph_value(&w).eval(&ci.delta) == rep.weight,
        _ => false,
    };
    let cost = placement.as_ref().map(|p| inst.cost(p));
    Ok(QapSolution { placement, cost, valid, weight_consistent, mwis: rep, delta: ci.delta.clone(), vertices: g.len() })
}

pub fn qap_solve(inst: &QapInstance, f: Formulation, delta: &DeltaChoice, solver: Solver, opts: &SolveOptions) -> Result<QapSolution> {
    let lib = FragmentLibrary::builtin();
    let ci = compile_instance(inst, f, delta, &lib)?;
    solve_compiled(&ci, inst, solver, opts)
}

/// Outcome of comparing the compiled pipeline against the oracle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub n: usize,
    pub formulation: Formulation,
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    #[serde(with = "rational::serde_str")]
    pub delta_bound: Rational,
    pub k: i64,
    pub vertices: usize,
    pub edges: usize,
    pub oracle: OracleResult,
    pub placement: Option<Vec<usize>>,
    #[serde(with = "rational::serde_str_opt")]
    pub cost: Option<Rational>,
    pub solver_optimal: bool,
    pub agree: bool,
}

impl CheckReport {
    /// Deterministic text rendering (no timings).
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("n: {}\n", self.n));
        s.push_str(&format!("formulation: {:?}\n", self.formulation));
        s.push_str(&format!("vertices: {}\nedges: {}\n", self.vertices, self.edges));
        s.push_str(&format!("k: {}\n", self.k));
        s.push_str(&format!("delta bound: {}\n", rational::fmt_rational(&self.delta_bound)));
        s.push_str(&format!("delta: {}\n", rational::fmt_rational(&self.delta)));
        s.push_str(&format!(
            "oracle: placement {:?} cost {} ({} optimal of {})\n",
            self.oracle.placement.one_based(),
            rational::fmt_rational(&self.oracle.cost),
            self.oracle.optimal_count,
            self.oracle.evaluated
        ));
        match (&self.placement, &self.cost) {
            (Some(p), Some(c)) => s.push_str(&format!("mwis: placement {p:?} cost {}\n", rational::fmt_rational(c))),
            _ => s.push_str("mwis: no valid placement decoded\n"),
        }
        if !self.solver_optimal {
            s.push_str("solver: time budget exhausted, incumbent reported\n");
        }
        s.push_str(if self.agree { "result: match\n" } else { "result: MISMATCH\n" });
        s
    }
}

pub fn check(inst: &QapInstance, f: Formulation, delta: &DeltaChoice, solver: Solver, opts: &SolveOptions) -> Result<(CheckReport, CompiledInstance, QapSolution)> {
    let lib = FragmentLibrary::builtin();
    let ci = compile_instance(inst, f, delta, &lib)?;
    let sol = solve_compiled(&ci, inst, solver, opts)?;
    let oracle = brute_force(inst)?;
    let agree = sol.cost.as_ref() == Some(&oracle.cost) && sol.weight_consistent;
    let rep = CheckReport {
        n: inst.n,
        formulation: f,
        delta: ci.delta.clone(),
        delta_bound: ci.bound.clone(),
        k: ci.cc.k,
        vertices: ci.cc.graph.len(),
        edges: ci.cc.graph.edge_count(),
        oracle,
        placement: sol.placement.as_ref().map(|p| p.one_based()),
        cost: sol.cost.clone(),
        solver_optimal: sol.mwis.optimal,
        agree,
    };
    Ok((rep, ci, sol))
}

/// `k δ + max_x w(x) - offset`: the optimum the certificates promise.
pub fn promised_optimum(ci: &CompiledInstance, max_circuit_weight: &Rational) -> DeltaWeight {
    ci.cc.graph_value(max_circuit_weight)
}
