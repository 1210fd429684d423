//! Oriented multigraphs with a designated special vertex, their reduced signed
//! incidence matrices and block dimensions, and the plain-text graph format.
//!
//! Vertices and edges are 0-based. The column order of every incidence matrix
//! is the edge-list order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, lcm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
}

impl Edge {
    pub fn new(tail: usize, head: usize) -> Self {
        Self { tail, head }
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    pub fn reversed(self) -> Self {
        Self::new(self.head, self.tail)
    }

    pub fn touches(&self, v: usize) -> bool {
        self.tail == v || self.head == v
    }

    /// The endpoint opposite `v` (for a loop, `v` itself).
    pub fn other(&self, v: usize) -> usize {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

/// Vertex/edge multigraph with per-edge orientation and a special vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    special: usize,
}

impl OrientedGraph {
    /// Validating constructor. Loops are accepted; parallel edges are kept.
    pub fn new(vertex_count: usize, edges: Vec<Edge>, special: usize) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        if special >= vertex_count {
            return Err(Error::VertexOutOfRange { vertex: special, count: vertex_count });
        }
        for e in &edges {
            for v in [e.tail, e.head] {
                if v >= vertex_count {
                    return Err(Error::VertexOutOfRange { vertex: v, count: vertex_count });
                }
            }
        }
        Ok(Self { vertex_count, edges, special })
    }

    /// Build from `(tail, head)` pairs.
    pub fn from_pairs(vertex_count: usize, pairs: &[(usize, usize)], special: usize) -> Result<Self> {
        let edges = pairs.iter().map(|&(t, h)| Edge::new(t, h)).collect();
        Self::new(vertex_count, edges, special)
    }

    /// Build from unordered pairs, orienting each edge from the smaller endpoint.
    pub fn from_undirected(vertex_count: usize, pairs: &[(usize, usize)], special: usize) -> Result<Self> {
        let edges = pairs.iter().map(|&(a, b)| Edge::new(a.min(b), a.max(b))).collect();
        Self::new(vertex_count, edges, special)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn special_vertex(&self) -> usize {
        self.special
    }

    pub fn loop_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].is_loop()).collect()
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(Edge::is_loop)
    }

    /// Same graph, different special vertex.
    pub fn with_special(&self, special: usize) -> Result<Self> {
        Self::new(self.vertex_count, self.edges.clone(), special)
    }

    /// Same underlying graph with the edges whose flag is set reversed.
    pub fn with_reversed(&self, flips: &[bool]) -> Self {
        let edges = self
            .edges
            .iter()
            .zip(flips.iter().chain(std::iter::repeat(&false)))
            .map(|(e, &f)| if f { e.reversed() } else { *e })
            .collect();
        Self { vertex_count: self.vertex_count, edges, special: self.special }
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|e| usize::from(e.tail == v) + usize::from(e.head == v)).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for e in &self.edges {
            d[e.tail] += 1;
            d[e.head] += 1;
        }
        d
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.degrees().iter().all(|&x| x == d)
    }

    /// Symmetric edge-multiplicity matrix (loops on the diagonal, counted once).
    pub fn multiplicity_matrix(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count;
        let mut m = vec![vec![0usize; n]; n];
        for e in &self.edges {
            m[e.tail][e.head] += 1;
            if !e.is_loop() {
                m[e.head][e.tail] += 1;
            }
        }
        m
    }

    /// Component label for every vertex, labels in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
            if a != b {
                parent[a] = b;
            }
        }
        let mut label = BTreeMap::new();
        (0..n)
            .map(|v| {
                let r = find(&mut parent, v);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Full signed incidence matrix: rows are vertices, columns edges;
    /// `+1` at the head, `-1` at the tail, loops give zero columns.
    pub fn full_incidence(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.edges.len()]; self.vertex_count];
        for (j, e) in self.edges.iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            m[e.head][j] = 1;
            m[e.tail][j] = -1;
        }
        m
    }

    /// Incidence matrix with the special vertex's row deleted.
    pub fn reduced_incidence(&self) -> Result<SignedIncidence> {
        if self.vertex_count < 2 {
            return Err(Error::TooFewVertices { needed: 2, found: self.vertex_count });
        }
        let full = self.full_incidence();
        let mut rows = Vec::with_capacity(self.vertex_count - 1);
        let mut row_vertices = Vec::with_capacity(self.vertex_count - 1);
        for (v, row) in full.into_iter().enumerate() {
            if v != self.special {
                rows.push(row);
                row_vertices.push(v);
            }
        }
        Ok(SignedIncidence { rows, row_vertices, cols: self.edges.len() })
    }

    pub fn block_spec(&self) -> Result<BlockSpec> {
        if self.vertex_count < 2 {
            return Err(Error::TooFewVertices { needed: 2, found: self.vertex_count });
        }
        if self.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        Ok(BlockSpec::from_counts(self.vertex_count, self.edges.len()))
    }

    /// Replace every edge by `n` parallel copies with the same orientation.
    /// Copies of edge `i` occupy positions `i*n .. (i+1)*n`.
    pub fn duplicate_edges(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDuplication);
        }
        let edges = self.edges.iter().flat_map(|&e| std::iter::repeat_n(e, n)).collect();
        Ok(Self { vertex_count: self.vertex_count, edges, special: self.special })
    }

    /// Add one vertex joined to every vertex `v` by `4 - deg(v)` edges so the
    /// result is 4-regular. The new vertex is last; edges run into it.
    pub fn complete(&self) -> Result<Self> {
        let deg = self.degrees();
        if let Some(v) = deg.iter().position(|&d| d > 4) {
            return Err(Error::CompletionImpossible(format!("vertex {v} has degree {}", deg[v])));
        }
        let deficiency: usize = deg.iter().map(|&d| 4 - d).sum();
        if deficiency != 4 {
            return Err(Error::CompletionImpossible(format!(
                "degree deficiencies sum to {deficiency}, a single new vertex needs 4"
            )));
        }
        let new = self.vertex_count;
        let mut edges = self.edges.clone();
        for (v, &d) in deg.iter().enumerate() {
            edges.extend(std::iter::repeat_n(Edge::new(v, new), 4 - d));
        }
        Ok(Self { vertex_count: new + 1, edges, special: self.special })
    }

    /// Delete vertex `v` and its edges; higher vertex indices shift down by one.
    /// If `v` was special the new special vertex is 0.
    pub fn decomplete(&self, v: usize) -> Result<Self> {
        if v >= self.vertex_count {
            return Err(Error::VertexOutOfRange { vertex: v, count: self.vertex_count });
        }
        if self.vertex_count == 1 {
            return Err(Error::TooFewVertices { needed: 2, found: 1 });
        }
        let shift = |x: usize| if x > v { x - 1 } else { x };
        let edges =
            self.edges.iter().filter(|e| !e.touches(v)).map(|e| Edge::new(shift(e.tail), shift(e.head))).collect();
        let special = if self.special == v { 0 } else { shift(self.special) };
        Ok(Self { vertex_count: self.vertex_count - 1, edges, special })
    }

    /// Identify one vertex of every component (its lowest-index vertex) with
    /// the special vertex, producing a connected graph with cut vertices.
    pub fn merge_components_at_special(&self) -> Self {
        let comp = self.components();
        let special_comp = comp[self.special];
        let mut representative: BTreeMap<usize, usize> = BTreeMap::new();
        for (v, &c) in comp.iter().enumerate() {
            if c != special_comp {
                representative.entry(c).or_insert(v);
            }
        }
        // Representatives collapse onto the special vertex; renumber the rest.
        let mut new_index = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for (v, slot) in new_index.iter_mut().enumerate() {
            if representative.values().any(|&r| r == v) {
                continue;
            }
            *slot = next;
            next += 1;
        }
        for &r in representative.values() {
            new_index[r] = new_index[self.special];
        }
        let edges = self.edges.iter().map(|e| Edge::new(new_index[e.tail], new_index[e.head])).collect();
        Self { vertex_count: next, edges, special: new_index[self.special] }
    }
}

/// `(|V|-1) x |E|` signed incidence matrix with the special row removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedIncidence {
    pub rows: Vec<Vec<i64>>,
    /// Graph vertex for each row.
    pub row_vertices: Vec<usize>,
    pub cols: usize,
}

impl SignedIncidence {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }
}

/// Block repetition data for the fundamental block matrix
/// `1_{vertex_reps x edge_reps} ⊗ M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSpec {
    /// `lcm(|V|-1, |E|)`.
    pub l: u64,
    /// Copies of each row.
    pub vertex_reps: u64,
    /// Copies of each column.
    pub edge_reps: u64,
}

impl BlockSpec {
    pub fn from_counts(vertex_count: usize, edge_count: usize) -> Self {
        let rows = (vertex_count - 1) as u64;
        let cols = edge_count as u64;
        let l = lcm(rows, cols);
        Self { l, vertex_reps: l / rows, edge_reps: l / cols }
    }

    /// True for graphs with `|E| = 2(|V|-1)`.
    pub fn is_phi4_ratio(&self) -> bool {
        self.vertex_reps == 2 && self.edge_reps == 1
    }

    /// `n` with `p = n * vertex_reps + 1`, if `p` is admissible.
    pub fn duplication_for(&self, p: u64) -> Option<u64> {
        if p > 1 && (p - 1).is_multiple_of(self.vertex_reps) {
            Some((p - 1) / self.vertex_reps)
        } else {
            None
        }
    }

    /// Whether the residue at `p` changes sign with edge orientation.
    pub fn is_variate(&self, p: u64) -> bool {
        self.duplication_for(p).map(|n| (n * self.edge_reps) % 2 == 1).unwrap_or(false)
    }

    /// Row and column repetition counts checked against the dimensions.
    pub fn is_consistent(&self, vertex_count: usize, edge_count: usize) -> bool {
        let rows = (vertex_count - 1) as u64;
        let cols = edge_count as u64;
        self.vertex_reps * rows == self.l
            && self.edge_reps * cols == self.l
            && gcd(self.vertex_reps, self.edge_reps) == 1
    }
}

/// Per-vertex cyclic order of incident edge indices. A loop appears twice.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RotationSystem {
    pub order: Vec<Vec<usize>>,
}

/// A parsed graph file: the graph plus an optional rotation system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: OrientedGraph,
    pub rotation: Option<RotationSystem>,
}

/// Text form: `V <n> SPECIAL <k>`, then one `t h` pair per line, then
/// optional `ROT v: e1 e2 ...` lines. `#` starts a comment.
pub fn format_graph(g: &OrientedGraph, rotation: Option<&RotationSystem>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "V {} SPECIAL {}", g.vertex_count, g.special);
    for e in &g.edges {
        let _ = writeln!(s, "{} {}", e.tail, e.head);
    }
    if let Some(rot) = rotation {
        for (v, order) in rot.order.iter().enumerate() {
            let list: Vec<String> = order.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(s, "ROT {v}: {}", list.join(" "));
        }
    }
    s
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let perr = |line: usize, message: &str| Error::Parse { line, message: message.to_string() };
    let mut header: Option<(usize, usize)> = None;
    let mut pairs = Vec::new();
    let mut rot: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if header.is_none() {
            if tokens.len() != 4 || tokens[0] != "V" || tokens[2] != "SPECIAL" {
                return Err(perr(lineno, "expected header `V <n> SPECIAL <k>`"));
            }
            let n = tokens[1].parse().map_err(|_| perr(lineno, "bad vertex count"))?;
            let k = tokens[3].parse().map_err(|_| perr(lineno, "bad special vertex"))?;
            header = Some((n, k));
            continue;
        }
        if tokens[0] == "ROT" {
            let rest = line[3..].trim();
            let (v, list) = rest.split_once(':').ok_or_else(|| perr(lineno, "expected `ROT v: e1 e2 ...`"))?;
            let v: usize = v.trim().parse().map_err(|_| perr(lineno, "bad rotation vertex"))?;
            let order = list
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| perr(lineno, "bad edge index in rotation"))?;
            if rot.insert(v, order).is_some() {
                return Err(perr(lineno, "duplicate rotation line"));
            }
            continue;
        }
        if tokens.len() != 2 {
            return Err(perr(lineno, "expected `tail head`"));
        }
        let t = tokens[0].parse().map_err(|_| perr(lineno, "bad tail"))?;
        let h = tokens[1].parse().map_err(|_| perr(lineno, "bad head"))?;
        pairs.push((t, h));
    }
    let (n, k) = header.ok_or_else(|| perr(0, "missing header"))?;
    let graph = OrientedGraph::from_pairs(n, &pairs, k)?;
    let rotation = if rot.is_empty() {
        None
    } else {
        let mut order = vec![Vec::new(); n];
        for (v, list) in rot {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, count: n });
            }
            order[v] = list;
        }
        Some(RotationSystem { order })
    };
    Ok(GraphFile { graph, rotation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> OrientedGraph {
        OrientedGraph::from_undirected(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 0).unwrap()
    }

    #[test]
    fn rejects_bad_endpoints_and_empty_graph() {
        assert_eq!(OrientedGraph::from_pairs(2, &[(0, 2)], 0), Err(Error::VertexOutOfRange { vertex: 2, count: 2 }));
        assert_eq!(OrientedGraph::from_pairs(0, &[], 0), Err(Error::EmptyGraph));
        assert!(OrientedGraph::from_pairs(2, &[], 2).is_err());
    }

    #[test]
    fn trivial_and_loop_graphs_are_accepted() {
        let g = OrientedGraph::from_pairs(1, &[], 0).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(g.reduced_incidence().is_err());
        let l = OrientedGraph::from_pairs(1, &[(0, 0)], 0).unwrap();
        assert!(l.has_loops());
        assert_eq!(l.loop_edges(), vec![0]);
        let l2 = OrientedGraph::from_pairs(2, &[(0, 1), (1, 1)], 0).unwrap();
        let m = l2.reduced_incidence().unwrap();
        assert_eq!(m.rows, vec![vec![1, 0]]);
    }

    #[test]
    fn banana_incidence() {
        let g = OrientedGraph::from_pairs(2, &[(0, 1), (0, 1)], 0).unwrap();
        assert_eq!(g.reduced_incidence().unwrap().rows, vec![vec![1, 1]]);
    }

    #[test]
    fn k3_incidence_matches_worked_block() {
        // Rows v1, v2 of the worked K3 example; the special vertex is the third.
        let g = OrientedGraph::from_pairs(3, &[(1, 0), (2, 1), (2, 0)], 2).unwrap();
        let m = g.reduced_incidence().unwrap();
        assert_eq!(m.rows, vec![vec![1, 0, 1], vec![-1, 1, 0]]);
    }

    #[test]
    fn k4_incidence_matches_worked_block() {
        // Special vertex 3; columns e1..e6 of the worked K4 example.
        let g = OrientedGraph::from_pairs(4, &[(3, 0), (3, 1), (3, 2), (1, 0), (0, 2), (2, 1)], 3).unwrap();
        let m = g.reduced_incidence().unwrap();
        assert_eq!(m.rows, vec![vec![1, 0, 0, 1, -1, 0], vec![0, 1, 0, -1, 0, 1], vec![0, 0, 1, 0, 1, -1],]);
    }

    #[test]
    fn column_sums_of_full_incidence_vanish() {
        let g = k4();
        let full = g.full_incidence();
        for j in 0..g.edge_count() {
            assert_eq!(full.iter().map(|r| r[j]).sum::<i64>(), 0);
        }
    }

    #[test]
    fn block_specs() {
        assert_eq!(k4().block_spec().unwrap(), BlockSpec { l: 6, vertex_reps: 2, edge_reps: 1 });
        assert_eq!(BlockSpec::from_counts(5, 10), BlockSpec { l: 20, vertex_reps: 5, edge_reps: 2 });
        assert_eq!(BlockSpec::from_counts(6, 12), BlockSpec { l: 60, vertex_reps: 12, edge_reps: 5 });
        assert!(BlockSpec::from_counts(6, 12).is_consistent(6, 12));
        let one = OrientedGraph::from_pairs(2, &[], 0).unwrap();
        assert_eq!(one.block_spec(), Err(Error::NoEdges));
    }

    #[test]
    fn variate_flags() {
        let s = BlockSpec::from_counts(4, 6);
        assert!(s.is_variate(3) && !s.is_variate(5) && s.is_variate(7) && !s.is_variate(13));
        // Completed P4,1 varies exactly at primes 13 mod 24.
        let c = BlockSpec::from_counts(6, 12);
        for p in crate::arith::primes_up_to(500) {
            if c.duplication_for(p).is_some() {
                assert_eq!(c.is_variate(p), p % 24 == 13, "p = {p}");
            }
        }
    }

    #[test]
    fn duplication() {
        let banana = OrientedGraph::from_pairs(2, &[(0, 1), (0, 1)], 0).unwrap();
        assert_eq!(banana.duplicate_edges(2).unwrap().edge_count(), 4);
        assert_eq!(k4().duplicate_edges(1).unwrap(), k4());
        assert_eq!(k4().duplicate_edges(0), Err(Error::ZeroDuplication));
        let a = k4().duplicate_edges(6).unwrap();
        let b = k4().duplicate_edges(2).unwrap().duplicate_edges(3).unwrap();
        let mut ea = a.edges().to_vec();
        let mut eb = b.edges().to_vec();
        ea.sort();
        eb.sort();
        assert_eq!(ea, eb);
    }

    #[test]
    fn k3_duplication_is_kronecker_with_ones() {
        let k3 = OrientedGraph::from_undirected(3, &[(0, 1), (0, 2), (1, 2)], 0).unwrap();
        let m = k3.reduced_incidence().unwrap();
        let d = k3.duplicate_edges(3).unwrap().reduced_incidence().unwrap();
        for (r, row) in d.rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, m.rows[r][j / 3]);
            }
        }
    }

    #[test]
    fn completion_round_trip() {
        let c = k4().complete().unwrap();
        assert_eq!(c.vertex_count(), 5);
        assert!(c.is_regular(4));
        let back = c.decomplete(4).unwrap();
        assert_eq!(back, k4());
        assert!(matches!(
            OrientedGraph::from_undirected(3, &[(0, 1)], 0).unwrap().complete(),
            Err(Error::CompletionImpossible(_))
        ));
    }

    #[test]
    fn decomplete_moves_special() {
        let g = k4().with_special(2).unwrap();
        assert_eq!(g.decomplete(2).unwrap().special_vertex(), 0);
        assert_eq!(g.decomplete(0).unwrap().special_vertex(), 1);
        assert_eq!(g.decomplete(3).unwrap().special_vertex(), 2);
    }

    #[test]
    fn components_and_merge() {
        let g = OrientedGraph::from_undirected(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], 0).unwrap();
        assert_eq!(g.components(), vec![0, 0, 0, 1, 1, 1]);
        let m = g.merge_components_at_special();
        assert_eq!(m.vertex_count(), 5);
        assert!(m.is_connected());
        assert_eq!(m.edge_count(), 6);
    }

    #[test]
    fn text_format_round_trip_with_rotation() {
        let g = k4().with_reversed(&[true, false, true]);
        let rot = RotationSystem { order: vec![vec![0, 1, 2], vec![0, 4, 3], vec![1, 3, 5], vec![2, 5, 4]] };
        let text = format_graph(&g, Some(&rot));
        let parsed = parse_graph(&text).unwrap();
        assert_eq!(parsed.graph, g);
        assert_eq!(parsed.rotation, Some(rot));
        let commented = format!("# K4\n{}", text.replace("\n0 1\n", "\n0 1 # first\n"));
        assert_eq!(parse_graph(&commented).unwrap().graph.edge_count(), 6);
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert!(matches!(parse_graph("V 2 SPECIAL 0\n0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_graph("V 2 SPECIAL 0\n0 5\n").is_err());
    }
}
