use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qapc_core::compiler::{certify_fragment, FragmentLibrary};
use qapc_core::io::{
    circuit_from_json, circuit_to_json, graph_from_json, graph_to_json, parse_instance, rational_arg, render_circuit,
    render_graph, ParseOptions, SvgOptions,
};
use qapc_core::mwis::{brute_mwis, bnb_mwis, SolveOptions, SolveReport, DEFAULT_BRUTE_CAP};
use qapc_core::oracle::brute_force;
use qapc_core::pipeline::{check, compile_instance, qap_solve, DeltaChoice, Formulation, Solver};
use qapc_core::qap::{random_instance, seeded_rng, QapInstance};
use qapc_core::rational::fmt_rational;
use qapc_core::tile::Tile;
use qapc_core::Error;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "qapc", version, about = "Compile QAP instances to king's-graph MWIS and check the result")]
struct Cli {
    /// Read the distance matrix before the flow matrix.
    #[arg(long, global = true)]
    swap_matrices: bool,
    /// Accept decimal literals and read them as exact rationals.
    #[arg(long, global = true)]
    allow_float_as_rational: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Canonical,
    Reduced,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Brute,
    Bnb,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderKind {
    Circuit,
    Graph,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile an instance to a weighted lattice graph.
    Compile {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "reduced")]
        formulation: FormArg,
        /// `auto` or an exact positive value.
        #[arg(long, default_value = "auto")]
        delta: String,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the tile circuit.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Exact MWIS of a graph file.
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "bnb")]
        solver: SolverArg,
        /// Required if the graph stores symbolic weights without a delta.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Formulate, compile, solve and decode.
    QapSolve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "reduced")]
        formulation: FormArg,
        #[arg(long, default_value = "auto")]
        delta: String,
        #[arg(long, value_enum, default_value = "bnb")]
        solver: SolverArg,
    },
    /// Brute-force optimum over all permutations.
    Oracle { instance: PathBuf },
    /// Run the pipeline and the oracle and compare.
    Check {
        /// Instance file. Without it a random instance is drawn from the seed.
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Size of the random instance.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Largest entry of the random instance.
        #[arg(long, default_value_t = 9)]
        max_entry: i64,
        #[arg(long, value_enum, default_value = "reduced")]
        formulation: FormArg,
        #[arg(long, default_value = "auto")]
        delta: String,
        #[arg(long, value_enum, default_value = "bnb")]
        solver: SolverArg,
        /// Write the report here as well as to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the compiled graph with the solution highlighted.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the tile circuit.
        #[arg(long)]
        circuit_svg: Option<PathBuf>,
    },
    /// Certify every fragment of the library.
    VerifyTiles {
        /// Library JSON; the built-in library if omitted.
        #[arg(long)]
        library: Option<PathBuf>,
    },
    /// Render a circuit or graph JSON file as SVG.
    Render {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Detected from the file if omitted.
        #[arg(long, value_enum)]
        kind: Option<RenderKind>,
        #[arg(long, default_value_t = 24.0)]
        cell: f64,
        #[arg(long)]
        show_weights: bool,
        /// Comma-separated vertex indices to highlight.
        #[arg(long, value_delimiter = ',')]
        highlight: Vec<usize>,
    },
}

enum Fail {
    Usage(String),
    Mismatch(String),
    Timeout(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

type Out = Result<(), Fail>;

fn read(p: &Path) -> Result<String, Fail> {
    fs::read_to_string(p).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))
}

fn write(p: &Path, s: &str) -> Out {
    fs::write(p, s).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))
}

fn delta_choice(s: &str) -> Result<DeltaChoice, Fail> {
    if s == "auto" {
        return Ok(DeltaChoice::Auto);
    }
    Ok(DeltaChoice::Value(rational_arg(s)?))
}

fn formulation(f: FormArg) -> Formulation {
    match f {
        FormArg::Canonical => Formulation::Canonical,
        FormArg::Reduced => Formulation::Reduced,
    }
}

fn solver(s: SolverArg) -> Solver {
    match s {
        SolverArg::Brute => Solver::Brute,
        SolverArg::Bnb => Solver::Bnb,
    }
}

fn solve_opts() -> SolveOptions {
    SolveOptions::default()
}

struct Ctx {
    parse: ParseOptions,
}

impl Ctx {
    fn instance(&self, p: &Path) -> Result<QapInstance, Fail> {
        let text = read(p)?;
        parse_instance(&text, self.parse).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))
    }
}

fn print_report(r: &SolveReport) {
    println!("solver: {}", r.solver);
    println!("weight: {}", fmt_rational(&r.weight));
    println!("size: {}", r.set.len());
    println!("optimal: {}", r.optimal);
    println!("set: {:?}", r.set);
}

fn run(cli: Cli) -> Out {
    let ctx = Ctx { parse: ParseOptions { swap_matrices: cli.swap_matrices, allow_float: cli.allow_float_as_rational } };
    match cli.cmd {
        Cmd::Compile { instance, formulation: f, delta, output, circuit } => {
            let inst = ctx.instance(&instance)?;
            let lib = FragmentLibrary::builtin();
            let ci = compile_instance(&inst, formulation(f), &delta_choice(&delta)?, &lib)?;
            write(&output, &graph_to_json(&ci.cc.graph)?)?;
            if let Some(p) = circuit {
                write(&p, &circuit_to_json(&ci.qc.circuit)?)?;
            }
            println!("vertices: {}", ci.cc.graph.len());
            println!("edges: {}", ci.cc.graph.edge_count());
            println!("k: {}", ci.cc.k);
            println!("delta bound: {}", fmt_rational(&ci.bound));
            println!("delta: {}", fmt_rational(&ci.delta));
            Ok(())
        }
        Cmd::Solve { graph, solver: s, delta } => {
            let mut g = graph_from_json(&read(&graph)?)?;
            if let Some(d) = delta {
                g.delta = Some(rational_arg(&d)?);
            }
            if g.delta.is_none() && g.has_symbolic_weights() {
                return Err(Fail::Usage("graph has symbolic weights; pass --delta".into()));
            }
            let rep = match s {
                SolverArg::Brute => brute_mwis(&g, DEFAULT_BRUTE_CAP)?,
                SolverArg::Bnb => bnb_mwis(&g, &solve_opts())?,
            };
            print_report(&rep);
            if !rep.optimal {
                return Err(Fail::Timeout("time budget exhausted".into()));
            }
            Ok(())
        }
        Cmd::QapSolve { instance, formulation: f, delta, solver: s } => {
            let inst = ctx.instance(&instance)?;
            let sol = qap_solve(&inst, formulation(f), &delta_choice(&delta)?, solver(s), &solve_opts())?;
            println!("vertices: {}", sol.vertices);
            println!("delta: {}", fmt_rational(&sol.delta));
            println!("mwis weight: {}", fmt_rational(&sol.mwis.weight));
            match (&sol.placement, &sol.cost) {
                (Some(p), Some(c)) => {
                    println!("placement: {:?}", p.one_based());
                    println!("cost: {}", fmt_rational(c));
                }
                _ => println!("placement: none (solution does not decode)"),
            }
            if !sol.mwis.optimal {
                return Err(Fail::Timeout("time budget exhausted".into()));
            }
            if !sol.valid || !sol.weight_consistent {
                return Err(Fail::Mismatch("solution does not decode to a consistent placement".into()));
            }
            Ok(())
        }
        Cmd::Oracle { instance } => {
            let inst = ctx.instance(&instance)?;
            let r = brute_force(&inst)?;
            println!("placement: {:?}", r.placement.one_based());
            println!("cost: {}", fmt_rational(&r.cost));
            println!("optimal placements: {}", r.optimal_count);
            println!("evaluated: {}", r.evaluated);
            Ok(())
        }
        Cmd::Check { instance, seed, n, max_entry, formulation: f, delta, solver: s, output, svg, circuit_svg } => {
            let inst = match instance {
                Some(p) => ctx.instance(&p)?,
                None => {
                    if n == 0 || max_entry < 0 {
                        return Err(Fail::Usage("need n >= 1 and max-entry >= 0".into()));
                    }
                    random_instance(n, max_entry, &mut seeded_rng(seed))
                }
            };
            let (rep, ci, sol) = check(&inst, formulation(f), &delta_choice(&delta)?, solver(s), &solve_opts())?;
            let text = rep.render();
            print!("{text}");
            if let Some(p) = output {
                write(&p, &text)?;
            }
            if let Some(p) = svg {
                let o = SvgOptions { highlight: sol.mwis.set.clone(), ..SvgOptions::default() };
                write(&p, &render_graph(&ci.cc.graph, &o)?)?;
            }
            if let Some(p) = circuit_svg {
                write(&p, &render_circuit(&ci.qc.circuit, &SvgOptions::default()))?;
            }
            if !rep.solver_optimal {
                return Err(Fail::Timeout("time budget exhausted".into()));
            }
            if !rep.agree {
                return Err(Fail::Mismatch("pipeline and oracle disagree".into()));
            }
            Ok(())
        }
        Cmd::VerifyTiles { library } => {
            let (lib, recert) = match library {
                Some(p) => match FragmentLibrary::from_json(&read(&p)?) {
                    Ok(l) => l,
                    Err(e @ Error::Certification { .. }) => return Err(Fail::Mismatch(e.to_string())),
                    Err(e) => return Err(e.into()),
                },
                None => (FragmentLibrary::builtin(), Vec::new()),
            };
            for l in &recert {
                println!("recertified {l}");
            }
            let mut failed = 0;
            for e in &lib.entries {
                let tile = Tile::custom(e.fragment.table.clone());
                match certify_fragment(&tile, &e.fragment) {
                    Ok(c) => println!(
                        "{:<16} k={} w~={} sets={} vertices={}",
                        e.fragment.label,
                        c.k,
                        fmt_rational(&c.w_tilde),
                        c.independent_sets,
                        e.fragment.vertices.len()
                    ),
                    Err(f) => {
                        failed += 1;
                        println!("{:<16} FAILED {}: {}", e.fragment.label, f.property, f.detail);
                    }
                }
            }
            println!("{} fragments, {} failed", lib.entries.len(), failed);
            if failed > 0 {
                return Err(Fail::Mismatch(format!("{failed} fragments failed certification")));
            }
            Ok(())
        }
        Cmd::Render { input, output, kind, cell, show_weights, highlight } => {
            let text = read(&input)?;
            let kind = match kind {
                Some(k) => k,
                None => {
                    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Fail::Usage(e.to_string()))?;
                    if v.get("vertices").is_some() {
                        RenderKind::Graph
                    } else {
                        RenderKind::Circuit
                    }
                }
            };
            let o = SvgOptions { cell, show_weights, highlight };
            let svg = match kind {
                RenderKind::Graph => render_graph(&graph_from_json(&text)?, &o)?,
                RenderKind::Circuit => render_circuit(&circuit_from_json(&text)?, &o),
            };
            write(&output, &svg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Fail::Mismatch(m)) => {
            eprintln!("mismatch: {m}");
            ExitCode::from(EXIT_MISMATCH)
        }
        Err(Fail::Timeout(m)) => {
            eprintln!("timeout: {m}");
            ExitCode::from(EXIT_TIMEOUT)
        }
    }
}
