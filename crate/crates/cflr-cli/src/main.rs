//! Command-line front end: recognition, reachability queries, PDS
//! reachability, gadget generation, oracle debugging, reduction verification
//! and a small benchmark harness. All commands print JSON on stdout.
//!
//! Exit codes: 0 on success (including negative answers), 1 on a
//! verification disagreement, 2 on usage errors, 3 on malformed input.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cflr::generate::{random_labeled_graph, trial_rng};
use cflr::grammar::{to_cnf, Grammar};
use cflr::graph::{graph_to_text, GraphFile, LabeledGraph, SubdivisionGraph, WeightedLabeledGraph};
use cflr::oracles::{
    aemono_oracle, instance_digest, led_oracle, ov_oracle, triangle_oracle, walk_enum_reach_oracle,
    LedOutcome,
};
use cflr::pds::{pds_reach, Pds};
use cflr::reductions::{
    aemono_to_pds, aemono_to_subdivision_cflr, led_to_weighted_cflr, ov_to_dyck2,
    subdivision_preprocess, triangle_to_dyck1, triangle_to_pds, AeMonoInstance, LedInstance,
    OvInstance, Payload, Query, ReductionInstance, TriangleInstance,
};
use cflr::solvers::{
    all_pairs_reach_with_stats, bounded_path_reach, prepare_instance, st_reach, weighted_st_reach,
};
use cflr::verify::run_verify;
use cflr::{Error, Symbol};

#[derive(Parser)]
#[command(name = "cflr", version, about = "CFL reachability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a word against a grammar with CYK.
    Recognize {
        #[arg(long)]
        grammar: PathBuf,
        /// Terminal tokens, whitespace-separated; single-character terminals
        /// may be written without separators.
        #[arg(long)]
        word: String,
    },
    /// CFL reachability on a labeled graph.
    Reach(ReachArgs),
    /// Empty-stack-to-empty-stack reachability in a bounded pushdown system.
    PdsReach {
        #[arg(long)]
        pds: PathBuf,
        #[arg(long)]
        source: usize,
        #[arg(long)]
        target: usize,
    },
    /// Generate a gadget instance from a source problem instance.
    Reduce {
        /// One of: triangle-dyck1, ov-dyck2, triangle-pds, aemono-pds,
        /// aemono-sub, led-wcflr, subdiv.
        kind: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Grammar file; required by `subdiv`.
        #[arg(long)]
        grammar: Option<PathBuf>,
    },
    /// Run seeded random trials of a reduction against its oracle.
    Verify {
        reduction: String,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        /// Defaults to the CFLR_SEED environment variable, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
    /// Run a brute-force oracle on an instance file.
    Oracle {
        /// One of: triangle, ov, aemono, led, walk-enum.
        name: String,
        #[arg(long = "in")]
        input: PathBuf,
        /// Grammar file for walk-enum.
        #[arg(long)]
        grammar: Option<PathBuf>,
        /// Search radius for the led oracle.
        #[arg(long, default_value_t = 8)]
        radius: u64,
        /// Walk length bound for walk-enum.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Time the all-pairs solver on random graphs and report worklist pops.
    Bench {
        /// Comma-separated vertex counts.
        #[arg(long, default_value = "50,100,200")]
        sizes: String,
        #[arg(long, default_value_t = 0.02)]
        density: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct ReachArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    /// Report all S-reachable pairs (the default mode).
    #[arg(long, conflicts_with_all = ["st", "bounded", "weighted"])]
    all_pairs: bool,
    /// Source and target vertex for an s-t query.
    #[arg(long, num_args = 2, value_names = ["S", "T"])]
    st: Option<Vec<usize>>,
    /// Only count paths of at most K edges.
    #[arg(long, value_name = "K", conflicts_with_all = ["st", "weighted"])]
    bounded: Option<usize>,
    /// Minimal S-path weight; requires a weighted graph and --st.
    #[arg(long, requires = "st")]
    weighted: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok((value, code)) => {
            println!("{value}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(command: Command) -> Result<(Value, u8), Error> {
    match command {
        Command::Recognize { grammar, word } => cmd_recognize(&grammar, &word),
        Command::Reach(args) => cmd_reach(args),
        Command::PdsReach { pds, source, target } => cmd_pds_reach(&pds, source, target),
        Command::Reduce { kind, input, out, grammar } => {
            cmd_reduce(&kind, &input, &out, grammar.as_deref())
        }
        Command::Verify { reduction, trials, seed, max_n } => {
            cmd_verify(&reduction, trials, resolve_seed(seed), max_n)
        }
        Command::Oracle { name, input, grammar, radius, max_len } => {
            cmd_oracle(&name, &input, grammar.as_deref(), radius, max_len)
        }
        Command::Bench { sizes, density, seed } => cmd_bench(&sizes, density, resolve_seed(seed)),
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("CFLR_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents)
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

/// Splits a word argument into terminal tokens; unseparated tokens fall back
/// to per-character terminals.
fn tokenize_word(g: &Grammar, word: &str) -> Result<Vec<Symbol>, Error> {
    let mut out = Vec::new();
    for token in word.split_whitespace() {
        if let Some(s) = g.symbols().lookup(token).filter(|s| g.terminals().contains(s)) {
            out.push(s);
            continue;
        }
        for ch in token.chars() {
            let name = ch.to_string();
            let s = g
                .symbols()
                .lookup(&name)
                .filter(|s| g.terminals().contains(s))
                .ok_or(Error::UnknownTerminal(name))?;
            out.push(s);
        }
    }
    Ok(out)
}

fn cmd_recognize(grammar: &Path, word: &str) -> Result<(Value, u8), Error> {
    let g = Grammar::parse(&read_file(grammar)?)?;
    let cnf = to_cnf(&g)?;
    let tokens = tokenize_word(&cnf, word)?;
    let (member, _) = cflr::recognizer::cyk_recognize(&cnf, &tokens)?;
    Ok((json!({ "member": member }), 0))
}

fn cmd_reach(args: ReachArgs) -> Result<(Value, u8), Error> {
    let g = Grammar::parse(&read_file(&args.grammar)?)?;
    let file = GraphFile::parse(&read_file(&args.graph)?)?;
    let mut labels = g.symbols().clone();
    let graph = file.resolve(&mut labels)?;
    if args.weighted {
        let weights = file
            .weights
            .clone()
            .ok_or_else(|| Error::Parse("--weighted needs a weighted graph file".into()))?;
        let st = args.st.as_ref().expect("clap enforces --st");
        let (cnf, base) = prepare_instance(&g, &graph, &labels)?;
        let wg = WeightedLabeledGraph::new(base, weights)?;
        let weight = weighted_st_reach(&cnf, &wg, st[0], st[1])?;
        return Ok((json!({ "weight": weight }), 0));
    }
    let (cnf, d) = prepare_instance(&g, &graph, &labels)?;
    if let Some(st) = &args.st {
        let reachable = st_reach(&cnf, &d, st[0], st[1])?;
        return Ok((json!({ "reachable": reachable }), 0));
    }
    let pairs: Vec<[usize; 2]> = if let Some(k) = args.bounded {
        bounded_path_reach(&cnf, &d, k)?
            .into_iter()
            .map(|(u, v)| [u, v])
            .collect()
    } else {
        let (reach, _) = all_pairs_reach_with_stats(&cnf, &d)?;
        reach
            .start_pairs(cnf.start())
            .into_iter()
            .map(|(u, v)| [u, v])
            .collect()
    };
    Ok((json!({ "pairs": pairs }), 0))
}

fn cmd_pds_reach(path: &Path, source: usize, target: usize) -> Result<(Value, u8), Error> {
    let pds = Pds::parse(&read_file(path)?)?;
    let reachable = pds_reach(&pds, source, target)?;
    Ok((json!({ "reachable": reachable }), 0))
}

fn query_json(query: &Query) -> Value {
    match query {
        Query::St { source, target } => json!({ "type": "st", "source": source, "target": target }),
        Query::WeightedSt { source, target } => {
            json!({ "type": "weighted-st", "source": source, "target": target })
        }
        Query::PerEdge(queries) => json!({
            "type": "per-edge",
            "queries": queries
                .iter()
                .map(|q| json!({ "edge": [q.edge.0, q.edge.1], "from": q.from, "to": q.to }))
                .collect::<Vec<_>>(),
        }),
    }
}

fn provenance_json(instance: &ReductionInstance) -> Value {
    let map: serde_json::Map<String, Value> = instance
        .provenance
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    json!({
        "kind": instance.kind.name(),
        "query": query_json(&instance.query),
        "entities": map,
    })
}

fn write_reduction(out: &Path, instance: &ReductionInstance) -> Result<Vec<String>, Error> {
    std::fs::create_dir_all(out)
        .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", out.display())))?;
    let mut written = Vec::new();
    let mut emit = |name: &str, contents: String| -> Result<(), Error> {
        write_file(&out.join(name), &contents)?;
        written.push(name.to_string());
        Ok(())
    };
    match &instance.payload {
        Payload::Cfl { grammar, graph, labels } => {
            emit("grammar.cfg", grammar.to_text())?;
            emit("graph.g", graph_to_text(graph, labels, None, None))?;
        }
        Payload::WeightedCfl { grammar, graph, labels } => {
            emit("grammar.cfg", grammar.to_text())?;
            emit(
                "graph.g",
                graph_to_text(&graph.base, labels, Some(&graph.weights), None),
            )?;
        }
        Payload::Pds(pds) => {
            emit("system.pds", pds.to_text())?;
        }
        Payload::SubdivisionCfl { grammar, graph, labels } => {
            emit("grammar.cfg", grammar.to_text())?;
            emit(
                "graph.g",
                graph_to_text(&graph.base, labels, None, Some(&graph.ordinary)),
            )?;
        }
    }
    let prov = provenance_json(instance);
    emit("provenance.json", format!("{prov}\n"))?;
    Ok(written)
}

fn cmd_reduce(
    kind: &str,
    input: &Path,
    out: &Path,
    grammar: Option<&Path>,
) -> Result<(Value, u8), Error> {
    let text = read_file(input)?;
    let instance = match kind {
        "triangle-dyck1" => triangle_to_dyck1(&TriangleInstance::parse(&text)?)?,
        "ov-dyck2" => ov_to_dyck2(&OvInstance::parse(&text)?)?,
        "triangle-pds" => triangle_to_pds(&TriangleInstance::parse(&text)?)?,
        "aemono-pds" => aemono_to_pds(&AeMonoInstance::parse(&text)?)?,
        "aemono-sub" => aemono_to_subdivision_cflr(&AeMonoInstance::parse(&text)?)?,
        "led-wcflr" => led_to_weighted_cflr(&LedInstance::parse(&text)?)?,
        "subdiv" => return cmd_reduce_subdiv(&text, out, grammar),
        other => {
            return Err(Error::Invalid(format!(
                "unknown reduction `{other}`"
            )))
        }
    };
    let written = write_reduction(out, &instance)?;
    Ok((
        json!({ "kind": instance.kind.name(), "files": written, "out": out.display().to_string() }),
        0,
    ))
}

fn cmd_reduce_subdiv(
    graph_text: &str,
    out: &Path,
    grammar: Option<&Path>,
) -> Result<(Value, u8), Error> {
    let grammar_path =
        grammar.ok_or_else(|| Error::Invalid("subdiv needs --grammar".into()))?;
    let g = Grammar::parse(&read_file(grammar_path)?)?;
    let file = GraphFile::parse(graph_text)?;
    let ordinary: BTreeSet<usize> = file
        .ordinary
        .clone()
        .ok_or_else(|| Error::Parse("subdivision graph needs an `ordinary:` section".into()))?
        .into_iter()
        .collect();
    let mut labels = g.symbols().clone();
    let base = file.resolve(&mut labels)?;
    let sd = SubdivisionGraph::new(base, ordinary)?;
    let pre = subdivision_preprocess(&sd, &g, &labels, 4)?;
    std::fs::create_dir_all(out)
        .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", out.display())))?;
    // Edges whose tuple label was pruned from the grammar label no word of
    // the language; drop them so the written pair stays self-contained.
    let used: BTreeSet<Symbol> = pre
        .grammar
        .productions()
        .iter()
        .flat_map(|p| p.rhs.iter().copied())
        .filter(|s| pre.grammar.terminals().contains(s))
        .collect();
    let kept: Vec<(usize, Symbol, usize)> = pre
        .graph
        .edges()
        .iter()
        .filter(|e| used.contains(&e.label))
        .map(|e| (e.src, e.label, e.dst))
        .collect();
    let dropped = pre.graph.edges().len() - kept.len();
    let collapsed = LabeledGraph::new(pre.graph.vertex_count(), kept)?;
    write_file(&out.join("grammar.cfg"), &pre.grammar.to_text())?;
    write_file(
        &out.join("graph.g"),
        &graph_to_text(&collapsed, &pre.labels, None, None),
    )?;
    let prov = json!({
        "kind": "subdiv",
        "ordinary_map": pre.ordinary_map,
        "dropped_dead_edges": dropped,
        "grammar_size": pre.grammar.size(),
    });
    write_file(&out.join("provenance.json"), &format!("{prov}\n"))?;
    Ok((
        json!({
            "kind": "subdiv",
            "files": ["grammar.cfg", "graph.g", "provenance.json"],
            "out": out.display().to_string(),
        }),
        0,
    ))
}

fn cmd_verify(reduction: &str, trials: u32, seed: u64, max_n: usize) -> Result<(Value, u8), Error> {
    let report = run_verify(reduction, trials, seed, max_n)?;
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|f| json!({ "trial": f.trial, "detail": f.detail }))
        .collect();
    let code = if report.failures.is_empty() { 0 } else { 1 };
    Ok((
        json!({
            "reduction": report.reduction,
            "trials": report.trials,
            "agreements": report.agreements,
            "failures": failures,
        }),
        code,
    ))
}

fn cmd_oracle(
    name: &str,
    input: &Path,
    grammar: Option<&Path>,
    radius: u64,
    max_len: usize,
) -> Result<(Value, u8), Error> {
    let text = read_file(input)?;
    let digest = instance_digest(&text);
    let (answer, operations) = match name {
        "triangle" => {
            let run = triangle_oracle(&TriangleInstance::parse(&text)?);
            (json!(run.answer), run.operations)
        }
        "ov" => {
            let run = ov_oracle(&OvInstance::parse(&text)?)?;
            (json!(run.answer), run.operations)
        }
        "aemono" => {
            let run = aemono_oracle(&AeMonoInstance::parse(&text)?);
            let per_edge: Vec<Value> = run
                .answer
                .iter()
                .map(|(&(u, v), &b)| json!({ "edge": [u, v], "answer": b }))
                .collect();
            (json!(per_edge), run.operations)
        }
        "led" => {
            let run = led_oracle(&LedInstance::parse(&text)?, radius)?;
            let answer = match run.answer {
                LedOutcome::Exact(d) => json!(d),
                LedOutcome::ExceedsRadius => json!({ "exceeds_radius": radius }),
            };
            (answer, run.operations)
        }
        "walk-enum" => {
            let grammar_path = grammar
                .ok_or_else(|| Error::Invalid("walk-enum needs --grammar".into()))?;
            let g = Grammar::parse(&read_file(grammar_path)?)?;
            let file = GraphFile::parse(&text)?;
            let mut labels = g.symbols().clone();
            let graph = file.resolve(&mut labels)?;
            let (cnf, d) = prepare_instance(&g, &graph, &labels)?;
            let run = walk_enum_reach_oracle(&cnf, &d, max_len)?;
            let pairs: Vec<[usize; 2]> = run.answer.into_iter().map(|(u, v)| [u, v]).collect();
            (json!(pairs), run.operations)
        }
        other => return Err(Error::Invalid(format!("unknown oracle `{other}`"))),
    };
    Ok((
        json!({
            "problem": name,
            "digest": digest,
            "answer": answer,
            "operations": operations,
        }),
        0,
    ))
}

fn cmd_bench(sizes: &str, density: f64, seed: u64) -> Result<(Value, u8), Error> {
    let sizes: Vec<usize> = sizes
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad size `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    let dyck = cflr::grammar::dyck_grammar(1)?;
    let cnf = to_cnf(&dyck)?;
    let labels: Vec<Symbol> = cnf.terminals().iter().copied().collect();
    let mut runs = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let mut rng = trial_rng(seed, i as u64);
        let d = random_labeled_graph(&mut rng, n, density, &labels);
        let started = Instant::now();
        let (reach, stats) = all_pairs_reach_with_stats(&cnf, &d)?;
        let elapsed = started.elapsed();
        let bound =
            ((cnf.terminals().len() + cnf.nonterminals().len()) * n * n) as u64;
        runs.push(json!({
            "n": n,
            "edges": d.edges().len(),
            "pops": stats.pops,
            "pop_bound": bound,
            "facts": reach.facts().len(),
            "millis": elapsed.as_millis() as u64,
        }));
    }
    Ok((json!({ "density": density, "seed": seed, "runs": runs }), 0))
}
