//! Bundled catalog of named primitive φ⁴ graphs.
//!
//! Each entry carries the completed (4-regular) graph when its edges are
//! known, the stored residue row at the primes `3..=41` (canonical sign),
//! any closed-form expressions, and twist/dual relations. Graphs whose
//! adjacency is not bundled carry only their row (`edges: "absent"`).
//! Vertices are numbered from 0.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::expr::{parse_exprs, BinomialSumExpr};
use crate::graph::{BlockSpec, OrientedGraph, RotationSystem};
use crate::sequence::EgpSequence;
use crate::transforms::FourCutSpec;

pub const CATALOG_JSON: &str = include_str!("../data/catalog.json");
pub const DECOMPLETED_EXPRESSIONS: &str = include_str!("../data/decompleted.egpx");
pub const COMPLETED_EXPRESSIONS: &str = include_str!("../data/completed.egpx");
/// `n,a_n` coefficients of the weight 6, level 8 newform paired with P_6_3.
pub const P63_FORM_CSV: &str = include_str!("../data/p63_form.csv");
const CHECKSUMS: &str = include_str!("../data/SHA256SUMS");

/// Completed-graph edge list, or a marker that the catalog only has the row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeData {
    Present(Vec<[usize; 2]>),
    Absent,
}

impl Serialize for EdgeData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EdgeData::Present(edges) => edges.serialize(s),
            EdgeData::Absent => s.serialize_str("absent"),
        }
    }
}

impl<'de> Deserialize<'de> for EdgeData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<[usize; 2]>),
            Marker(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(edges) => Ok(EdgeData::Present(edges)),
            Raw::Marker(m) if m == "absent" => Ok(EdgeData::Absent),
            Raw::Marker(m) => Err(serde::de::Error::custom(format!("unknown edge marker `{m}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowSource {
    /// Printed directly in the residue table.
    Table,
    /// Printed once for a twist/dual pair and attached to both members.
    Relation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Twist,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub other: String,
    /// Twist cut on this entry's completed graph producing `other`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<FourCutSpec>,
    /// Vertex whose decompletion is planar with `rotation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomplete_at: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CirculantSpec {
    pub n: usize,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RawEntry {
    name: String,
    loops: u32,
    aliases: Vec<String>,
    #[serde(default)]
    circulant: Option<CirculantSpec>,
    edges: EdgeData,
    row: Vec<u64>,
    row_source: RowSource,
    decompleted_expression: Option<String>,
    completed_expression: Option<String>,
    symmetric_decompletion: bool,
    relations: Vec<Relation>,
    unexplained_equal: Vec<String>,
    #[serde(default)]
    completed_values: Vec<(u64, u64)>,
    #[serde(default)]
    completed_errata: Vec<Erratum>,
}

/// A printed completed-graph value that the graph itself contradicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub prime: u64,
    pub printed: u64,
    /// Value agreed on by every permanent algorithm and the closed form.
    pub value: u64,
}

#[derive(Debug, Clone, Deserialize)]
struct RawCatalog {
    indexing: String,
    primes: Vec<u64>,
    entries: Vec<RawEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub loops: u32,
    pub aliases: Vec<String>,
    pub circulant: Option<CirculantSpec>,
    pub edges: EdgeData,
    /// Canonical residues at [`Catalog::primes`] for any decompletion.
    pub row: Vec<u64>,
    pub row_source: RowSource,
    pub decompleted_expression: Option<BinomialSumExpr>,
    pub completed_expression: Option<BinomialSumExpr>,
    /// Whether the residue-table commentary lists this graph as having a
    /// decompletion with a zero-forcing involution.
    pub symmetric_decompletion: bool,
    pub relations: Vec<Relation>,
    pub unexplained_equal: Vec<String>,
    /// `(prime, residue)` pairs printed for the completed graph, matching
    /// `completed_expression` up to sign at variate primes.
    pub completed_values: Vec<(u64, u64)>,
    /// Printed completed values superseded by the recomputed ones.
    pub completed_errata: Vec<Erratum>,
}

impl CatalogEntry {
    pub fn has_edges(&self) -> bool {
        matches!(self.edges, EdgeData::Present(_))
    }

    /// The completed 4-regular graph with special vertex 0.
    pub fn completed_graph(&self) -> Result<OrientedGraph> {
        match &self.edges {
            EdgeData::Present(edges) => {
                let n = edges.iter().flat_map(|e| e.iter()).max().map_or(0, |&m| m + 1);
                let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                OrientedGraph::from_pairs(n, &pairs, 0)
            }
            EdgeData::Absent => Err(Error::Catalog(format!("{} has no bundled edge list", self.name))),
        }
    }

    /// Decompletion at vertex `v`, special vertex 0.
    pub fn decompletion(&self, v: usize) -> Result<OrientedGraph> {
        self.completed_graph()?.decomplete(v)
    }

    pub fn relation(&self, kind: RelationKind) -> Option<&Relation> {
        self.relations.iter().find(|r| r.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub indexing: String,
    /// Primes of the stored rows.
    pub primes: Vec<u64>,
    pub entries: Vec<CatalogEntry>,
}

/// Accept `P_7_5`, `P7,5`, `P_{7,5}` and `p7_5` alike.
pub fn normalize_name(name: &str) -> String {
    let digits: Vec<&str> = name.split(|c: char| !c.is_ascii_digit()).filter(|s| !s.is_empty()).collect();
    if name.trim_start().starts_with(['P', 'p']) && digits.len() == 2 {
        format!("P_{}_{}", digits[0], digits[1])
    } else {
        name.to_string()
    }
}

impl Catalog {
    pub fn get(&self, name: &str) -> Result<&CatalogEntry> {
        let key = normalize_name(name);
        self.entries
            .iter()
            .find(|e| e.name == key || e.aliases.iter().any(|a| a == name))
            .ok_or_else(|| Error::UnknownGraph(name.to_string()))
    }

    /// Stored row of `name` as a sequence of the φ⁴ decompletion spec.
    pub fn row_sequence(&self, name: &str) -> Result<EgpSequence> {
        let e = self.get(name)?;
        // An ℓ-loop decompletion has ℓ + 1 vertices and 2ℓ edges.
        let spec = BlockSpec::from_counts(e.loops as usize + 1, 2 * e.loops as usize);
        let pairs: Vec<(u64, u64)> = self.primes.iter().copied().zip(e.row.iter().copied()).collect();
        EgpSequence::from_residues(e.name.clone(), spec, &pairs)
    }

    /// Dual relation's decompletion together with its planar rotation.
    pub fn planar_decompletion(&self, name: &str) -> Result<(OrientedGraph, RotationSystem)> {
        let e = self.get(name)?;
        let rel =
            e.relation(RelationKind::Dual).ok_or_else(|| Error::Catalog(format!("{} has no dual relation", e.name)))?;
        match (rel.decomplete_at, &rel.rotation) {
            (Some(v), Some(order)) => Ok((e.decompletion(v)?, RotationSystem { order: order.clone() })),
            _ => Err(Error::Catalog(format!("{} has no bundled planar embedding", e.name))),
        }
    }
}

/// Decompletion of the unique two-vertex join of two copies of P_3_1: two
/// copies of `K_4` minus the edge `0-1`, sharing vertices 0 and 1.
pub fn p31_squared() -> OrientedGraph {
    OrientedGraph::from_undirected(
        6,
        &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (0, 5), (1, 4), (1, 5), (4, 5)],
        0,
    )
    .expect("static graph is valid")
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Check every bundled data file against its recorded digest.
pub fn verify_bundled_data() -> Result<()> {
    let files: BTreeMap<&str, &str> = [
        ("catalog.json", CATALOG_JSON),
        ("decompleted.egpx", DECOMPLETED_EXPRESSIONS),
        ("completed.egpx", COMPLETED_EXPRESSIONS),
        ("p63_form.csv", P63_FORM_CSV),
    ]
    .into_iter()
    .collect();
    let mut seen = 0;
    for line in CHECKSUMS.lines().filter(|l| !l.trim().is_empty()) {
        let (digest, file) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Catalog(format!("malformed checksum line `{line}`")))?;
        let file = file.trim();
        let text = files.get(file).ok_or_else(|| Error::Catalog(format!("checksum for unknown file {file}")))?;
        let found = sha256_hex(text.as_bytes());
        if found != digest {
            return Err(Error::Checksum { expected: digest.to_string(), found });
        }
        seen += 1;
    }
    if seen != files.len() {
        return Err(Error::Catalog("a bundled data file has no recorded checksum".into()));
    }
    Ok(())
}

/// Parse the bundled catalog, attaching closed forms and validating
/// rows and cross-references.
pub fn load_catalog() -> Result<Catalog> {
    verify_bundled_data()?;
    let raw: RawCatalog =
        serde_json::from_str(CATALOG_JSON).map_err(|e| Error::Catalog(format!("catalog.json: {e}")))?;
    let by_name = |text: &str| -> Result<BTreeMap<String, BinomialSumExpr>> {
        Ok(parse_exprs(text)?.into_iter().map(|e| (e.name.clone(), e)).collect())
    };
    let decompleted = by_name(DECOMPLETED_EXPRESSIONS)?;
    let completed = by_name(COMPLETED_EXPRESSIONS)?;
    let lookup = |table: &BTreeMap<String, BinomialSumExpr>, key: &Option<String>| -> Result<Option<BinomialSumExpr>> {
        key.as_ref()
            .map(|k| table.get(k).cloned().ok_or_else(|| Error::Catalog(format!("missing expression {k}"))))
            .transpose()
    };
    let names: Vec<&str> = raw.entries.iter().map(|e| e.name.as_str()).collect();
    let mut entries = Vec::with_capacity(raw.entries.len());
    for e in &raw.entries {
        if e.row.len() != raw.primes.len() || e.row.iter().zip(&raw.primes).any(|(&r, &p)| r >= p) {
            return Err(Error::Catalog(format!("{}: row does not fit the prime list", e.name)));
        }
        let refs = e.relations.iter().map(|r| r.other.as_str()).chain(e.unexplained_equal.iter().map(String::as_str));
        for other in refs {
            if !names.contains(&other) {
                return Err(Error::Catalog(format!("{} references unknown entry {other}", e.name)));
            }
        }
        entries.push(CatalogEntry {
            name: e.name.clone(),
            loops: e.loops,
            aliases: e.aliases.clone(),
            circulant: e.circulant.clone(),
            edges: e.edges.clone(),
            row: e.row.clone(),
            row_source: e.row_source,
            decompleted_expression: lookup(&decompleted, &e.decompleted_expression)?,
            completed_expression: lookup(&completed, &e.completed_expression)?,
            symmetric_decompletion: e.symmetric_decompletion,
            relations: e.relations.clone(),
            unexplained_equal: e.unexplained_equal.clone(),
            completed_values: e.completed_values.clone(),
            completed_errata: e.completed_errata.clone(),
        });
    }
    Ok(Catalog { indexing: raw.indexing, primes: raw.primes, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_normalize() {
        assert_eq!(normalize_name("P_7_5"), "P_7_5");
        assert_eq!(normalize_name("P7,5"), "P_7_5");
        assert_eq!(normalize_name("P_{7,10}"), "P_7_10");
        assert_eq!(normalize_name("K4"), "K4");
    }

    #[test]
    fn catalog_loads_with_expected_shape() {
        let c = load_catalog().unwrap();
        assert_eq!(c.entries.len(), 60);
        assert_eq!(c.entries.iter().filter(|e| e.loops == 8 && !e.has_edges()).count(), 38);
        assert!(c.entries.iter().filter(|e| e.loops <= 7).all(CatalogEntry::has_edges));
        let p75 = c.get("P7,5").unwrap();
        assert_eq!(p75.relation(RelationKind::Dual).unwrap().other, "P_7_10");
        assert!(p75.decompleted_expression.is_some());
        assert!(c.get("P_8_3").unwrap().unexplained_equal.contains(&"P_8_32".to_string()));
        assert!(c.get("P_1_1").unwrap().completed_expression.is_some());
        assert!(matches!(c.get("Q_1_1"), Err(Error::UnknownGraph(_))));
    }

    #[test]
    fn edge_marker_round_trips() {
        let s = serde_json::to_string(&EdgeData::Absent).unwrap();
        assert_eq!(s, "\"absent\"");
        assert_eq!(serde_json::from_str::<EdgeData>(&s).unwrap(), EdgeData::Absent);
        assert!(serde_json::from_str::<EdgeData>("\"missing\"").is_err());
    }
}
