//! `egp`: extended graph permanents from the command line.

mod source;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use egp::arith::primes_up_to;
use egp::catalog::{Catalog, EdgeData};
use egp::expr::eval_expr;
use egp::graph::format_graph;
use egp::modform::{compare, eta_expand, known_pairings, parse_coefficient_csv, DEFAULT_TERMS};
use egp::pointcount::reconcile;
use egp::sequence::{
    canonicalize_sign, closed_form_tree, closed_form_wheel, closed_form_zigzag, egp as compute_egp, Algorithm,
    EgpSequence,
};
use egp::verify::{
    closed_form_suite, invariance_suite, reproduce_completed, reproduce_expressions, reproduce_rows, symmetry_suite,
    CheckResult, TableReport,
};
use egp::Result;

use source::{resolve_expr, resolve_graph};

#[derive(Parser)]
#[command(name = "egp", version, about = "Extended graph permanents modulo primes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Residues of a graph at every admissible prime up to the bound.
    Compute {
        /// file:<path>, catalog:<name>[:completed] or family:<kind>:<args>
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 41)]
        bound: u64,
        #[arg(long, default_value = "auto")]
        algorithm: Algorithm,
        /// Use this vertex as the special vertex.
        #[arg(long)]
        special: Option<usize>,
        /// Skip sign canonicalization at variate primes.
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        json: bool,
    },
    /// Reproduce a stored table and report every cell.
    Table {
        #[arg(long, value_enum, ignore_case = true, default_value = "a")]
        appendix: Appendix,
        /// Largest prime; defaults to 41 for A and B and to every listed
        /// prime for C.
        #[arg(long)]
        bound: Option<u64>,
        /// Algorithms used for the residue table (repeatable).
        #[arg(long = "algorithm", default_value = "auto")]
        algorithms: Vec<Algorithm>,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite; exits nonzero on any failure.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 13)]
        bound: u64,
        #[arg(long)]
        json: bool,
    },
    /// Point count of the permanent polynomial and its reconciliation with
    /// the residue.
    Pointcount {
        #[arg(long)]
        graph: String,
        #[arg(short, long)]
        prime: u64,
        #[arg(long)]
        special: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Compare a graph's residues with a q-series' coefficients a_p mod p.
    ModformCompare {
        #[arg(long)]
        graph: String,
        /// Eta product such as `-1 * eta(4)^6`.
        #[arg(long, conflicts_with_all = ["csv", "pairing"], allow_hyphen_values = true)]
        eta: Option<String>,
        /// CSV file of `n,a_n` lines.
        #[arg(long, conflicts_with = "pairing")]
        csv: Option<String>,
        /// Use the known form paired with this catalog graph.
        #[arg(long)]
        pairing: bool,
        #[arg(long, default_value_t = 41)]
        bound: u64,
        #[arg(long, default_value_t = DEFAULT_TERMS)]
        terms: usize,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a closed form at admissible primes.
    ClosedForm {
        #[arg(long, value_enum, conflicts_with = "expr")]
        family: Option<ClosedFamily>,
        /// Wheel spokes, zig-zag vertices or tree vertices.
        #[arg(long, requires = "family")]
        size: Option<usize>,
        /// catalog:<name>[:completed] or file:<path>[#<name>]
        #[arg(long)]
        expr: Option<String>,
        #[arg(long, default_value_t = 41)]
        bound: u64,
        #[arg(long)]
        json: bool,
    },
    /// List catalog entries or show one.
    Catalog {
        name: Option<String>,
        /// Print the completed graph in the text graph format.
        #[arg(long, requires = "name")]
        export: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Appendix {
    /// Residue rows, recomputed from the graphs.
    A,
    /// Closed forms for decompleted graphs against the rows.
    B,
    /// Closed forms for completed graphs against their printed values.
    C,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Invariance,
    Symmetry,
    ClosedForm,
    Tables,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosedFamily {
    Wheel,
    Zigzag,
    Tree,
}

/// Outcome of a subcommand: whether every check it ran passed.
type Outcome = Result<bool>;

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn sequence_json(label: &str, s: &EgpSequence) -> Value {
    json!({
        "graph": label,
        "primes": s.primes(),
        "residues": s.residues(),
        "variate": s.values.iter().map(|v| v.variate).collect::<Vec<_>>(),
        "canonicalized": s.canonicalized,
        "missing": s.missing.iter().map(|m| json!({"prime": m.prime, "reason": m.reason})).collect::<Vec<_>>(),
    })
}

fn print_sequence(label: &str, s: &EgpSequence) {
    println!("graph: {label}");
    println!("{:>6} {:>4} {:>8}  variate", "prime", "n", "residue");
    for v in &s.values {
        println!("{:>6} {:>4} {:>8}  {}", v.prime, v.n, v.residue, yes_no(v.variate));
    }
    for m in &s.missing {
        println!("{:>6}    - unavailable: {}", m.prime, m.reason);
    }
}

fn with_special(g: egp::OrientedGraph, special: Option<usize>) -> Result<egp::OrientedGraph> {
    match special {
        Some(v) => g.with_special(v),
        None => Ok(g),
    }
}

fn compute(
    catalog: &Catalog,
    graph: &str,
    bound: u64,
    algorithm: Algorithm,
    special: Option<usize>,
    raw: bool,
    json: bool,
) -> Outcome {
    let src = resolve_graph(graph, catalog)?;
    let g = with_special(src.graph, special)?;
    let seq = compute_egp(&g, bound, algorithm)?;
    let seq = if raw { seq } else { canonicalize_sign(&seq) };
    if json {
        print_json(&sequence_json(&src.label, &seq));
    } else {
        print_sequence(&src.label, &seq);
    }
    Ok(seq.missing.is_empty())
}

fn print_table(report: &TableReport, json: bool) {
    if json {
        print_json(&serde_json::to_value(report).expect("report serializes"));
        return;
    }
    println!("{:<8} {:>6} {:>9} {:>9}  {:<20} result", "graph", "prime", "expected", "computed", "source");
    for c in &report.cells {
        let got = c.computed.map_or("-".to_string(), |v| v.to_string());
        let verdict = if c.matches { "match" } else { "MISMATCH" };
        println!("{:<8} {:>6} {:>9} {:>9}  {:<20} {verdict}", c.graph, c.prime, c.expected, got, c.source);
    }
    let bad = report.mismatches().count();
    println!("table {}: {} cells, {} mismatches", report.table, report.cells.len(), bad);
}

fn table(catalog: &Catalog, appendix: Appendix, bound: Option<u64>, algorithms: &[Algorithm], json: bool) -> Outcome {
    let report = match appendix {
        Appendix::A => reproduce_rows(catalog, bound.unwrap_or(41), algorithms)?,
        Appendix::B => reproduce_expressions(catalog, bound.unwrap_or(41))?,
        Appendix::C => reproduce_completed(catalog, bound.unwrap_or(u64::MAX))?,
    };
    print_table(&report, json);
    Ok(report.all_match)
}

fn verify(catalog: &Catalog, suite: Suite, bound: u64, json: bool) -> Outcome {
    let mut checks: Vec<CheckResult> = Vec::new();
    let runs = |s: Suite| suite == s || suite == Suite::All;
    if runs(Suite::Invariance) {
        checks.extend(invariance_suite(catalog, bound)?);
    }
    if runs(Suite::Symmetry) {
        checks.extend(symmetry_suite(catalog)?);
    }
    if runs(Suite::ClosedForm) {
        checks.extend(closed_form_suite(bound)?);
    }
    if runs(Suite::Tables) {
        for (name, report) in [
            ("residue rows", reproduce_rows(catalog, bound, &[Algorithm::Auto])?),
            ("decompleted closed forms", reproduce_expressions(catalog, bound)?),
            ("completed closed forms", reproduce_completed(catalog, 61)?),
        ] {
            let bad = report.mismatches().count();
            checks.push(CheckResult {
                name: format!("table: {name}"),
                passed: report.all_match,
                detail: format!("{} cells, {bad} mismatches", report.cells.len()),
            });
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    if json {
        print_json(&json!({"passed": passed, "checks": checks}));
    } else {
        for c in &checks {
            println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        println!("{} of {} checks passed", checks.iter().filter(|c| c.passed).count(), checks.len());
    }
    Ok(passed)
}

fn pointcount(catalog: &Catalog, graph: &str, prime: u64, special: Option<usize>, json: bool) -> Outcome {
    let src = resolve_graph(graph, catalog)?;
    let g = with_special(src.graph, special)?;
    let r = reconcile(&g, prime)?;
    let signs = json!({
        "coefficient_vs_count": r.coefficient_vs_count,
        "gperm_vs_count": r.gperm_vs_count,
        "predicted_sign": r.predicted_sign,
        "empirical_sign": r.empirical_sign,
        "derived_multiplier": r.derived_multiplier,
        "derived_relation_holds": r.derived_relation_holds,
    });
    if json {
        print_json(&json!({
            "graph": src.label,
            "prime": r.prime,
            "variate": r.variate,
            "count": r.count,
            "count_mod_p": r.count_mod_p,
            "coefficient": r.coefficient,
            "coefficient_oracle": r.coefficient_oracle,
            "gperm": r.gperm,
            "oracle_matches_gperm": r.oracle_matches_gperm,
            "signs": signs,
        }));
    } else {
        let s = |v: Option<i8>| v.map_or("none".to_string(), |x| x.to_string());
        println!("graph: {}  prime: {}  variate: {}", src.label, r.prime, yes_no(r.variate));
        println!("point count            {} (mod p: {})", r.count, r.count_mod_p);
        println!("coefficient            {}", r.coefficient);
        println!("coefficient oracle     {}", r.coefficient_oracle);
        println!("permanent residue      {}", r.gperm);
        println!("oracle = permanent     {}", yes_no(r.oracle_matches_gperm));
        println!("coefficient vs count   {}", s(r.coefficient_vs_count));
        println!("permanent vs count     {}", s(r.gperm_vs_count));
        println!("predicted sign         {}", s(r.predicted_sign));
        println!("empirical sign         {}", s(r.empirical_sign));
        println!("derived multiplier     {} (holds: {})", r.derived_multiplier, yes_no(r.derived_relation_holds));
    }
    Ok(r.oracle_matches_gperm && r.derived_relation_holds)
}

#[allow(clippy::too_many_arguments)]
fn modform_compare(
    catalog: &Catalog,
    graph: &str,
    eta: Option<&str>,
    csv: Option<&str>,
    pairing: bool,
    bound: u64,
    terms: usize,
    json: bool,
) -> Outcome {
    let src = resolve_graph(graph, catalog)?;
    let series = if let Some(spec) = eta {
        eta_expand(&spec.parse()?, terms)?
    } else if let Some(path) = csv {
        let text = std::fs::read_to_string(path)
            .map_err(|e| egp::Error::Parse { line: 0, message: format!("{path}: {e}") })?;
        parse_coefficient_csv(&text, path)?
    } else if pairing {
        let name = graph.strip_prefix("catalog:").unwrap_or(graph);
        let key = egp::catalog::normalize_name(name);
        let p = known_pairings()
            .into_iter()
            .find(|p| p.graphs.iter().any(|g| *g == key || *g == name))
            .ok_or_else(|| egp::Error::UnknownGraph(format!("no known form for {name}")))?;
        p.series(terms)?
    } else {
        return Err(egp::Error::Parse { line: 0, message: "give --eta, --csv or --pairing".into() });
    };
    let mut seq = compute_egp(&src.graph, bound, Algorithm::Auto)?;
    seq.graph = src.label.clone();
    let report = compare(&seq, &series)?;
    if json {
        print_json(&serde_json::to_value(&report).expect("report serializes"));
    } else {
        println!("graph: {}  form: {}", src.label, report.form);
        println!("{:>6} {:>8} {:>8}  result", "prime", "graph", "form");
        for r in &report.primes {
            println!("{:>6} {:>8} {:>8}  {}", r.prime, r.egp, r.form, if r.matches { "match" } else { "MISMATCH" });
        }
        match (report.full_match, report.negated_match) {
            (true, _) => println!("matches at every prime up to {bound}"),
            (false, true) => println!("matches up to a global sign at every prime up to {bound}"),
            (false, false) => println!("first mismatch at p = {}", report.first_mismatch.unwrap_or(0)),
        }
    }
    Ok(report.full_match || report.negated_match)
}

fn closed_form(
    catalog: &Catalog,
    family: Option<ClosedFamily>,
    size: Option<usize>,
    expr: Option<&str>,
    bound: u64,
    json: bool,
) -> Outcome {
    let (label, values): (String, Vec<(u64, u64)>) = match (family, expr) {
        (Some(f), _) => {
            let k = size.ok_or_else(|| egp::Error::InvalidFamily("--size is required".into()))?;
            let (name, primes): (&str, Vec<u64>) = match f {
                ClosedFamily::Tree => ("tree", primes_up_to(bound)),
                ClosedFamily::Wheel => ("wheel", primes_up_to(bound).into_iter().filter(|&p| p > 2).collect()),
                ClosedFamily::Zigzag => ("zigzag", primes_up_to(bound).into_iter().filter(|&p| p > 2).collect()),
            };
            let values = primes
                .into_iter()
                .map(|p| {
                    let v = match f {
                        ClosedFamily::Tree => closed_form_tree(k, p)?,
                        ClosedFamily::Wheel => closed_form_wheel(k, p)?,
                        ClosedFamily::Zigzag => closed_form_zigzag(k, p)?,
                    };
                    Ok((p, v))
                })
                .collect::<Result<_>>()?;
            (format!("{name} {k}"), values)
        }
        (None, Some(spec)) => {
            let x = resolve_expr(spec, catalog)?;
            let values = primes_up_to(bound)
                .into_iter()
                .filter(|&p| p > 2 && (p - 1) % x.vertex_reps == 0)
                .map(|p| Ok((p, eval_expr(&x, p)?)))
                .collect::<Result<_>>()?;
            (x.name.clone(), values)
        }
        (None, None) => return Err(egp::Error::Expr("give --family or --expr".into())),
    };
    if json {
        print_json(&json!({
            "closed_form": label,
            "primes": values.iter().map(|v| v.0).collect::<Vec<_>>(),
            "residues": values.iter().map(|v| v.1).collect::<Vec<_>>(),
        }));
    } else {
        println!("closed form: {label}");
        for (p, v) in &values {
            println!("{p:>6} {v:>8}");
        }
    }
    Ok(true)
}

fn show_catalog(catalog: &Catalog, name: Option<&str>, export: bool, json: bool) -> Outcome {
    let Some(name) = name else {
        if json {
            let list: Vec<Value> = catalog
                .entries
                .iter()
                .map(|e| json!({"name": e.name, "loops": e.loops, "edges": e.has_edges(), "row": e.row}))
                .collect();
            print_json(&json!({"primes": catalog.primes, "entries": list}));
        } else {
            println!("{:<8} {:>5} {:>6}  row at {:?}", "name", "loops", "edges", catalog.primes);
            for e in &catalog.entries {
                let edges = if e.has_edges() { "yes" } else { "absent" };
                println!("{:<8} {:>5} {:>6}  {:?}", e.name, e.loops, edges, e.row);
            }
        }
        return Ok(true);
    };
    let e = catalog.get(name)?;
    if export {
        print!("{}", format_graph(&e.completed_graph()?, None));
        return Ok(true);
    }
    let edges = match &e.edges {
        EdgeData::Present(list) => json!(list),
        EdgeData::Absent => json!("absent"),
    };
    let v = json!({
        "name": e.name,
        "loops": e.loops,
        "aliases": e.aliases,
        "edges": edges,
        "primes": catalog.primes,
        "row": e.row,
        "row_source": e.row_source,
        "decompleted_expression": e.decompleted_expression.is_some(),
        "completed_expression": e.completed_expression.is_some(),
        "completed_values": e.completed_values,
        "symmetric_decompletion": e.symmetric_decompletion,
        "relations": e.relations,
        "unexplained_equal": e.unexplained_equal,
    });
    if json {
        print_json(&v);
    } else {
        println!("{}", serde_json::to_string_pretty(&v).expect("JSON values serialize"));
    }
    Ok(true)
}

fn run(cli: Cli) -> Outcome {
    let catalog = source::catalog()?;
    match cli.command {
        Command::Compute { graph, bound, algorithm, special, raw, json } => {
            compute(&catalog, &graph, bound, algorithm, special, raw, json)
        }
        Command::Table { appendix, bound, algorithms, json } => table(&catalog, appendix, bound, &algorithms, json),
        Command::Verify { suite, bound, json } => verify(&catalog, suite, bound, json),
        Command::Pointcount { graph, prime, special, json } => pointcount(&catalog, &graph, prime, special, json),
        Command::ModformCompare { graph, eta, csv, pairing, bound, terms, json } => {
            modform_compare(&catalog, &graph, eta.as_deref(), csv.as_deref(), pairing, bound, terms, json)
        }
        Command::ClosedForm { family, size, expr, bound, json } => {
            closed_form(&catalog, family, size, expr.as_deref(), bound, json)
        }
        Command::Catalog { name, export, json } => show_catalog(&catalog, name.as_deref(), export, json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
