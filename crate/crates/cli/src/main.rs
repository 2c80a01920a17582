use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use shareq_core::bench::{parse_sizes, run_sweep};
use shareq_core::generators::{seed_from_env, Family};
use shareq_core::json::{graph_to_json, parse_graph, parse_query, GraphDocument};
use shareq_core::{
    compile_many, parse_surface, quotient, readback, run_check, Backend, BuildOptions, CheckError,
    LamGraph, NodeId, Query, ReadbackError,
};

const EXIT_NOT_EQUAL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "shareq", version, about = "Sharing equality of λ-terms represented as DAGs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two terms (or the root pairs of a query) are equal.
    ///
    /// Give either two surface-syntax files, or a JSON graph and a JSON query.
    Check {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = BackendArg::Queue)]
        backend: BackendArg,
        /// Print node, edge and query counts and transitions as JSON.
        #[arg(long)]
        stats: bool,
        /// Do not check acyclicity and domination of a JSON graph.
        #[arg(long)]
        skip_validation: bool,
    },
    /// Check that a graph file (or surface file) is a valid λ-graph.
    Validate { file: PathBuf },
    /// Print the term denoted by each root.
    Unfold {
        file: PathBuf,
        /// Only this root (id or label).
        #[arg(long)]
        root: Option<String>,
        /// Give up once the term exceeds this many constructors.
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
        /// Print de Bruijn indices instead of names.
        #[arg(long)]
        nameless: bool,
    },
    /// Check a query and print the quotient graph by the resulting sharing
    /// equivalence.
    Quotient {
        graph: PathBuf,
        query: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time the checker over growing instances of a family.
    Bench {
        #[arg(long, value_enum, default_value_t = FamilyArg::SharedPower)]
        family: FamilyArg,
        /// E.g. `2^10..2^20`, `8..12` or `1024,4096`.
        #[arg(long, default_value = "2^10..2^20")]
        sizes: String,
        #[arg(long, value_enum, default_value_t = BackendArg::Queue)]
        backend: BackendArg,
        /// Seed for the random families; `SHAREQ_SEED` overrides the default.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Queue,
    Recursive,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Queue => Backend::Queue,
            BackendArg::Recursive => Backend::Recursive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    SharedPower,
    UnsharedTree,
    RandomTerm,
    RandomDag,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::SharedPower => Family::SharedPower,
            FamilyArg::UnsharedTree => Family::UnsharedTree,
            FamilyArg::RandomTerm => Family::RandomTerm,
            FamilyArg::RandomDag => Family::RandomDag,
        }
    }
}

/// An error with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(e: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: e.to_string(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::invalid(format!("{e:#}"))
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    Ok(fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?)
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{')
}

/// A graph plus its root labels, from either file format. Surface files
/// become a single root labelled with the file stem.
fn load_graph(path: &Path, options: BuildOptions) -> Result<GraphDocument, Failure> {
    let text = read(path)?;
    if is_json(path, &text) {
        return parse_graph(&text, options).map_err(Failure::invalid);
    }
    let e = parse_surface(&text).map_err(Failure::invalid)?;
    let (graph, roots) = compile_many(&[&e]).map_err(Failure::invalid)?;
    let mut labels = std::collections::HashMap::new();
    if let Some(stem) = path.file_stem() {
        labels.insert(stem.to_string_lossy().into_owned(), roots[0]);
    }
    Ok(GraphDocument { graph, labels })
}

fn check_inputs(first: &Path, second: &Path, options: BuildOptions) -> Result<(LamGraph, Query), Failure> {
    let text = read(first)?;
    if is_json(first, &text) {
        let doc = parse_graph(&text, options).map_err(Failure::invalid)?;
        let query = parse_query(&read(second)?, &doc).map_err(Failure::invalid)?;
        return Ok((doc.graph, query));
    }
    let a = parse_surface(&text).map_err(|e| Failure::invalid(format!("{}: {e}", first.display())))?;
    let b = parse_surface(&read(second)?)
        .map_err(|e| Failure::invalid(format!("{}: {e}", second.display())))?;
    let (graph, roots) = compile_many(&[&a, &b]).map_err(Failure::invalid)?;
    let query = Query::single(roots[0], roots[1]);
    Ok((graph, query))
}

fn cmd_check(first: &Path, second: &Path, backend: Backend, stats: bool, skip_validation: bool) -> CmdResult {
    let options = if skip_validation {
        BuildOptions::unchecked()
    } else {
        BuildOptions::default()
    };
    let (graph, query) = check_inputs(first, second, options)?;
    let report = run_check(&graph, &query, backend);
    let s = report.stats;
    let (code, classes) = match &report.outcome {
        Ok(can) => {
            let classes = can.class_count();
            println!("EQUAL ({classes} classes, {} transitions)", s.transitions);
            (0, Some(classes))
        }
        Err(CheckError::Failed(f)) => {
            println!("NOT EQUAL: {} at node {}", f.reason, f.node);
            (EXIT_NOT_EQUAL, None)
        }
        Err(e @ CheckError::NonRootQuery(_)) => return Err(Failure::invalid(e)),
    };
    if stats {
        let v = json!({
            "equal": code == 0,
            "nodes": s.nodes,
            "edges": s.edges,
            "query_pairs": s.query_pairs,
            "transitions": s.transitions,
            "max_query_edges": s.max_query_edges,
            "classes": classes,
        });
        println!("{v}");
    }
    Ok(code)
}

fn cmd_validate(file: &Path) -> CmdResult {
    let doc = match load_graph(file, BuildOptions::default()) {
        Ok(doc) => doc,
        Err(f) => {
            println!("{}", f.message);
            return Ok(f.code);
        }
    };
    println!(
        "OK ({} nodes, {} edges, {} roots)",
        doc.graph.node_count(),
        doc.graph.edge_count(),
        doc.graph.roots().len()
    );
    Ok(0)
}

fn resolve_root(doc: &GraphDocument, root: &str) -> Result<NodeId, Failure> {
    let id = match root.parse::<u32>() {
        Ok(i) => NodeId(i),
        Err(_) => *doc
            .labels
            .get(root)
            .ok_or_else(|| Failure::invalid(format!("unknown root label {root:?}")))?,
    };
    if !doc.graph.is_root(id) {
        return Err(Failure::invalid(format!("node {id} is not a root")));
    }
    Ok(id)
}

fn cmd_unfold(file: &Path, root: Option<&str>, limit: usize, nameless: bool) -> CmdResult {
    let doc = load_graph(file, BuildOptions::default())?;
    let g = &doc.graph;
    let roots = match root {
        Some(r) => vec![resolve_root(&doc, r)?],
        None => g.roots().to_vec(),
    };
    let many = roots.len() > 1;
    for r in roots {
        let term = match readback(g, r, limit) {
            Ok(t) => t,
            Err(e @ ReadbackError::LimitExceeded { .. }) => {
                return Err(Failure {
                    code: EXIT_LIMIT,
                    message: e.to_string(),
                })
            }
            Err(e) => return Err(Failure::invalid(e)),
        };
        let shown = if nameless {
            term.display_nameless(g.atoms()).to_string()
        } else {
            term.display(g.atoms()).to_string()
        };
        if many {
            println!("{r}: {shown}");
        } else {
            println!("{shown}");
        }
    }
    Ok(0)
}

fn cmd_quotient(graph: &Path, query: &Path, output: Option<&Path>) -> CmdResult {
    let doc = load_graph(graph, BuildOptions::default())?;
    let q = parse_query(&read(query)?, &doc).map_err(Failure::invalid)?;
    let report = run_check(&doc.graph, &q, Backend::Queue);
    let can = match report.outcome {
        Ok(can) => can,
        Err(CheckError::Failed(f)) => {
            println!("NOT EQUAL: {} at node {}", f.reason, f.node);
            return Ok(EXIT_NOT_EQUAL);
        }
        Err(e) => return Err(Failure::invalid(e)),
    };
    let (qg, _) = quotient(&doc.graph, &can.partition()).map_err(Failure::invalid)?;
    let text = graph_to_json(&qg);
    match output {
        Some(path) => fs::write(path, text + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(0)
}

fn cmd_bench(family: Family, sizes: &str, backend: Backend, seed: Option<u64>, as_json: bool) -> CmdResult {
    let sizes = parse_sizes(sizes).map_err(Failure::invalid)?;
    let seed = seed.unwrap_or_else(|| seed_from_env(0));
    let report = run_sweep(family, &sizes, backend, seed).map_err(Failure::invalid)?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(Failure::invalid)?);
    } else {
        print!("{}", report.to_table());
    }
    Ok(0)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Check {
            first,
            second,
            backend,
            stats,
            skip_validation,
        } => cmd_check(&first, &second, backend.into(), stats, skip_validation),
        Command::Validate { file } => cmd_validate(&file),
        Command::Unfold {
            file,
            root,
            limit,
            nameless,
        } => cmd_unfold(&file, root.as_deref(), limit, nameless),
        Command::Quotient { graph, query, output } => cmd_quotient(&graph, &query, output.as_deref()),
        Command::Bench {
            family,
            sizes,
            backend,
            seed,
            json,
        } => cmd_bench(family.into(), &sizes, backend.into(), seed, json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
