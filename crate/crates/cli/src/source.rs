//! Graph and expression sources named on the command line.

use egp::catalog::{load_catalog, normalize_name, p31_squared, Catalog};
use egp::expr::{parse_exprs, BinomialSumExpr};
use egp::families::{generate_family, Family, TreeShape};
use egp::graph::parse_graph;
use egp::{Error, OrientedGraph, Result};

fn bad(spec: &str, why: &str) -> Error {
    Error::Parse { line: 0, message: format!("graph source `{spec}`: {why}") }
}

fn numbers(spec: &str, parts: &[&str]) -> Result<Vec<usize>> {
    parts.iter().map(|s| s.parse::<usize>().map_err(|_| bad(spec, &format!("`{s}` is not a number")))).collect()
}

fn family(spec: &str, rest: &str) -> Result<Family> {
    let parts: Vec<&str> = rest.split(':').collect();
    let args = numbers(spec, &parts[1..]).or_else(|e| {
        if parts[0] == "prufer" && parts.len() == 2 {
            numbers(spec, &parts[1].split(',').filter(|s| !s.is_empty()).collect::<Vec<_>>())
        } else {
            Err(e)
        }
    })?;
    let one = || args.first().copied().filter(|_| args.len() == 1).ok_or_else(|| bad(spec, "expected one size"));
    Ok(match parts[0] {
        "wheel" => Family::Wheel(one()?),
        "zigzag" => Family::Zigzag(one()?),
        "banana" => Family::Banana(one()?),
        "path" => Family::Tree(TreeShape::Path(one()?)),
        "star" => Family::Tree(TreeShape::Star(one()?)),
        "prufer" => Family::Tree(TreeShape::Prufer(args)),
        "circulant" => match args[..] {
            [n, a, b] => Family::Circulant { n, a, b },
            _ => return Err(bad(spec, "expected circulant:<n>:<a>:<b>")),
        },
        other => return Err(bad(spec, &format!("unknown family `{other}`"))),
    })
}

/// A resolved graph together with a display label.
pub struct Source {
    pub label: String,
    pub graph: OrientedGraph,
}

/// `file:<path>`, `catalog:<name>[:completed]`, `catalog:(P_3_1)^2`, or
/// `family:<kind>:<args>`.
pub fn resolve_graph(spec: &str, catalog: &Catalog) -> Result<Source> {
    let graph = if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| bad(spec, &e.to_string()))?;
        parse_graph(&text)?.graph
    } else if let Some(name) = spec.strip_prefix("catalog:") {
        if name == egp::modform::P31_SQUARED {
            p31_squared()
        } else if let Some(base) = name.strip_suffix(":completed") {
            catalog.get(base)?.completed_graph()?
        } else {
            catalog.get(name)?.decompletion(0)?
        }
    } else if let Some(rest) = spec.strip_prefix("family:") {
        generate_family(&family(spec, rest)?)?
    } else {
        return Err(bad(spec, "expected file:, catalog: or family: prefix"));
    };
    Ok(Source { label: spec.to_string(), graph })
}

/// `catalog:<name>[:completed]` or `file:<path>[#<name>]`.
pub fn resolve_expr(spec: &str, catalog: &Catalog) -> Result<BinomialSumExpr> {
    let missing = |what: &str| Error::Expr(format!("`{spec}`: {what}"));
    if let Some(name) = spec.strip_prefix("catalog:") {
        let (base, completed) = match name.strip_suffix(":completed") {
            Some(b) => (b, true),
            None => (name, false),
        };
        let e = catalog.get(base)?;
        let x = if completed { &e.completed_expression } else { &e.decompleted_expression };
        return x.clone().ok_or_else(|| missing("no closed form stored"));
    }
    if let Some(rest) = spec.strip_prefix("file:") {
        let (path, name) = match rest.split_once('#') {
            Some((p, n)) => (p, Some(n)),
            None => (rest, None),
        };
        let text = std::fs::read_to_string(path).map_err(|e| missing(&e.to_string()))?;
        let exprs = parse_exprs(&text)?;
        return match name {
            Some(n) => exprs.into_iter().find(|x| x.name == n || x.name == normalize_name(n)),
            None => exprs.into_iter().next(),
        }
        .ok_or_else(|| missing("expression not found"));
    }
    Err(missing("expected catalog: or file: prefix"))
}

pub fn catalog() -> Result<Catalog> {
    load_catalog()
}
