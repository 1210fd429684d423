//! Weighted-graph cofactor calculus.
//!
//! The permanent of a matrix whose rows and columns come in repeated classes
//! is a weighted graph: vertex `v` (a row class) carries weight `w_v`, the
//! number of its copies, and edge `e` (a column class) carries weight `c_e`
//! plus the entries `m_{v,e}` it has in each row class. Acting on an edge
//! distributes its `c_e` columns among incident vertices, `k_v` to vertex `v`:
//! the columns can be split in `c_e! / Π k_v!` ways, the chosen rows of `v`
//! in `res_v (res_v - 1) ... (res_v - k_v + 1)` ways, and each choice
//! contributes `Π m_{v,e}^{k_v}`. Acting on all edges in turn and summing over
//! the splits that exhaust every vertex weight gives the permanent.
//!
//! The sum is evaluated by dynamic programming over edges. The state is the
//! vector of residual vertex weights; states that agree are merged. The memo
//! key is the complete residual vector (no symmetry reduction).

use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::arith::{is_prime, mul_mod, pow_mod, reduce, Factorials};
use crate::error::{Error, Result};
use crate::graph::OrientedGraph;
use crate::perm::admissible_duplication;

/// An edge (column class) of a weighted state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedEdge {
    pub weight: u64,
    /// `(vertex, entry)` pairs with nonzero entry.
    pub incidences: Vec<(usize, i64)>,
}

/// Vertex weights, weighted (hyper)edges and the prime modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedState {
    pub vertex_weights: Vec<u64>,
    pub edges: Vec<WeightedEdge>,
    pub modulus: u64,
}

/// How to order vertices; edges are acted on vertex by vertex, edges with a
/// single incident vertex always first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum EliminationOrder {
    /// Minimise the number of simultaneously open vertices (exhaustive up
    /// to 20 vertices, greedy beyond).
    #[default]
    MinFrontier,
    /// Remove a set of vertices whose deletion leaves a forest, then peel
    /// leaves.
    ForestPeeling,
    /// Vertices in the given order (must be a permutation of the vertices).
    Custom(Vec<usize>),
}

impl WeightedState {
    /// Row class `i` of `base` has weight `row_mult[i]`, column class `j`
    /// weight `col_mult[j]`.
    pub fn from_matrix(base: &[Vec<i64>], row_mult: &[u64], col_mult: &[u64], modulus: u64) -> Result<Self> {
        if base.len() != row_mult.len() || base.iter().any(|r| r.len() != col_mult.len()) {
            return Err(Error::Internal("multiplicities do not match the matrix".into()));
        }
        let edges = col_mult
            .iter()
            .enumerate()
            .map(|(j, &w)| WeightedEdge {
                weight: w,
                incidences: base.iter().enumerate().filter(|(_, r)| r[j] != 0).map(|(i, r)| (i, r[j])).collect(),
            })
            .collect();
        let state = Self { vertex_weights: row_mult.to_vec(), edges, modulus };
        state.validate()?;
        Ok(state)
    }

    /// The state of `Perm(1_{nV x nE} ⊗ M_G)` for admissible prime `p`:
    /// one vertex per non-special graph vertex (in order), one edge per edge.
    pub fn from_graph(g: &OrientedGraph, p: u64) -> Result<Self> {
        let spec = g.block_spec()?;
        let n = admissible_duplication(&spec, p)?;
        let m = g.reduced_incidence()?;
        let rows = m.row_count();
        let cols = m.cols;
        Self::from_matrix(&m.rows, &vec![n * spec.vertex_reps; rows], &vec![n * spec.edge_reps; cols], p)
    }

    fn validate(&self) -> Result<()> {
        if !is_prime(self.modulus) {
            return Err(Error::NotPrime(self.modulus));
        }
        let rows: u64 = self.vertex_weights.iter().sum();
        let cols: u64 = self.edges.iter().map(|e| e.weight).sum();
        if rows != cols {
            return Err(Error::NotSquare { rows: rows as usize, cols: cols as usize });
        }
        let n = self.vertex_weights.len();
        for e in &self.edges {
            if let Some(&(v, _)) = e.incidences.iter().find(|(v, _)| *v >= n) {
                return Err(Error::VertexOutOfRange { vertex: v, count: n });
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_weights.len()
    }

    /// Neighbour sets through shared edges.
    fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count();
        let mut adj = vec![vec![false; n]; n];
        for e in &self.edges {
            for &(a, _) in &e.incidences {
                for &(b, _) in &e.incidences {
                    if a != b {
                        adj[a][b] = true;
                    }
                }
            }
        }
        adj
    }

    /// Vertex order for the given strategy.
    pub fn vertex_order(&self, strategy: &EliminationOrder) -> Result<Vec<usize>> {
        let n = self.vertex_count();
        match strategy {
            EliminationOrder::Custom(order) => {
                let mut seen = vec![false; n];
                if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
                    return Err(Error::Internal("custom order is not a vertex permutation".into()));
                }
                Ok(order.clone())
            }
            EliminationOrder::MinFrontier if n <= 20 => Ok(exact_min_frontier(&self.adjacency())),
            EliminationOrder::MinFrontier => Ok(greedy_min_frontier(&self.adjacency())),
            EliminationOrder::ForestPeeling => Ok(forest_peeling(&self.adjacency())),
        }
    }

    /// Edge order: single-vertex edges, then edges grouped by the first
    /// vertex in `vertex_order` they touch.
    pub fn edge_order(&self, vertex_order: &[usize]) -> Vec<usize> {
        let mut rank = vec![0usize; self.vertex_count()];
        for (i, &v) in vertex_order.iter().enumerate() {
            rank[v] = i;
        }
        let mut keyed: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(j, e)| {
                let first = e.incidences.iter().map(|&(v, _)| rank[v]).min().unwrap_or(0);
                (usize::from(e.incidences.len() > 1), first, j)
            })
            .collect();
        keyed.sort_unstable();
        keyed.into_iter().map(|(_, _, j)| j).collect()
    }
}

fn exact_min_frontier(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }
    let nbr: Vec<u32> =
        adj.iter().map(|row| row.iter().enumerate().filter(|(_, &b)| b).fold(0u32, |m, (j, _)| m | (1 << j))).collect();
    let full = (1usize << n) - 1;
    let mut reach = vec![0u32; full + 1];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        reach[s] = reach[s & (s - 1)] | nbr[low];
    }
    // best[s] = (max frontier, sum of frontiers) over orders of s.
    let mut best = vec![(u32::MAX, u32::MAX); full + 1];
    let mut last = vec![0u8; full + 1];
    best[0] = (0, 0);
    for s in 1..=full {
        let open = (reach[s] & !(s as u32)).count_ones();
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let (m, t) = best[s & !(1 << v)];
            let cand = (m.max(open), t + open);
            if cand < best[s] {
                best[s] = cand;
                last[s] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    order
}

fn greedy_min_frontier(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let open_after = |v: usize, done: &[bool]| -> usize {
            (0..n).filter(|&u| !done[u] && u != v && (adj[v][u] || (0..n).any(|x| done[x] && adj[x][u]))).count()
        };
        let v = (0..n).filter(|&v| !done[v]).min_by_key(|&v| (open_after(v, &done), v)).expect("a vertex remains");
        done[v] = true;
        order.push(v);
    }
    order
}

fn forest_peeling(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut removed = vec![false; n];
    let degree = |v: usize, removed: &[bool]| (0..n).filter(|&u| !removed[u] && adj[v][u]).count();
    let is_forest = |removed: &[bool]| {
        let verts = (0..n).filter(|&v| !removed[v]).count();
        let edges: usize = (0..n).filter(|&v| !removed[v]).map(|v| degree(v, removed)).sum::<usize>() / 2;
        // A graph is a forest iff edges = vertices - components.
        let mut comp = 0;
        let mut seen = removed.to_vec();
        for r in 0..n {
            if seen[r] {
                continue;
            }
            comp += 1;
            let mut stack = vec![r];
            seen[r] = true;
            while let Some(v) = stack.pop() {
                for u in 0..n {
                    if adj[v][u] && !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        edges + comp == verts
    };
    let mut order = Vec::with_capacity(n);
    while !is_forest(&removed) {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .max_by_key(|&v| (degree(v, &removed), std::cmp::Reverse(v)))
            .expect("a cycle has vertices");
        removed[v] = true;
        order.push(v);
    }
    while order.len() < n {
        let v = (0..n).filter(|&v| !removed[v]).min_by_key(|&v| (degree(v, &removed), v)).expect("a vertex remains");
        removed[v] = true;
        order.push(v);
    }
    order
}

/// Residual-weight vectors used as memo keys.
trait Residuals: Hash + Eq + Clone {
    fn from_weights(w: &[u64]) -> Self;
    fn get(&self, i: usize) -> u64;
    fn set(&mut self, i: usize, x: u64);
}

/// Up to 16 residuals below 256, eight bits each.
impl Residuals for u128 {
    fn from_weights(w: &[u64]) -> Self {
        w.iter().enumerate().fold(0, |acc, (i, &x)| acc | (u128::from(x as u8) << (8 * i)))
    }
    #[inline]
    fn get(&self, i: usize) -> u64 {
        ((self >> (8 * i)) & 0xff) as u64
    }
    #[inline]
    fn set(&mut self, i: usize, x: u64) {
        *self = (*self & !(0xffu128 << (8 * i))) | (u128::from(x as u8) << (8 * i));
    }
}

impl Residuals for Box<[u32]> {
    fn from_weights(w: &[u64]) -> Self {
        w.iter().map(|&x| x as u32).collect()
    }
    #[inline]
    fn get(&self, i: usize) -> u64 {
        u64::from(self[i])
    }
    #[inline]
    fn set(&mut self, i: usize, x: u64) {
        self[i] = x as u32;
    }
}

/// Permanent mod p of the matrix described by `state`.
pub fn cofactor_calculus(state: &WeightedState) -> Result<u64> {
    cofactor_calculus_with(state, &EliminationOrder::default())
}

/// As [`cofactor_calculus`] with an explicit elimination strategy. Every
/// strategy gives the same residue.
pub fn cofactor_calculus_with(state: &WeightedState, strategy: &EliminationOrder) -> Result<u64> {
    state.validate()?;
    let p = state.modulus;
    // Uncoverable rows or columns.
    let mut touched = vec![false; state.vertex_count()];
    for e in &state.edges {
        if e.weight > 0 && e.incidences.is_empty() {
            return Ok(0);
        }
        for &(v, _) in &e.incidences {
            touched[v] = true;
        }
    }
    if state.vertex_weights.iter().zip(&touched).any(|(&w, &t)| w > 0 && !t) {
        return Ok(0);
    }
    let vorder = state.vertex_order(strategy)?;
    let eorder = state.edge_order(&vorder);
    let small = state.vertex_count() <= 16 && state.vertex_weights.iter().all(|&w| w < 256);
    if small {
        Ok(run_dp::<u128>(state, &eorder, p))
    } else {
        Ok(run_dp::<Box<[u32]>>(state, &eorder, p))
    }
}

fn run_dp<K: Residuals>(state: &WeightedState, eorder: &[usize], p: u64) -> u64 {
    let f = Factorials::new(p);
    let n = state.vertex_count();
    let m = eorder.len();
    // cap_after[t][v]: weight of edges at positions > t touching v.
    let mut cap_after = vec![vec![0u64; n]; m + 1];
    for t in (0..m).rev() {
        cap_after[t] = cap_after[t + 1].clone();
        for &(v, _) in &state.edges[eorder[t]].incidences {
            cap_after[t][v] += state.edges[eorder[t]].weight;
        }
    }
    // Before anything runs, residuals must fit in the total capacity.
    if state.vertex_weights.iter().zip(&cap_after[0]).any(|(&w, &c)| w > c) {
        return 0;
    }
    let mut layer: FxHashMap<K, u64> = FxHashMap::default();
    layer.insert(K::from_weights(&state.vertex_weights), 1 % p);
    for (t, &ei) in eorder.iter().enumerate() {
        let edge = &state.edges[ei];
        if edge.weight == 0 {
            continue;
        }
        let coeffs: Vec<u64> = edge.incidences.iter().map(|&(_, c)| reduce(c, p)).collect();
        let after = &cap_after[t + 1];
        let mut next: FxHashMap<K, u64> = FxHashMap::default();
        for (key, &val) in &layer {
            let mut ks = vec![0u64; edge.incidences.len()];
            distribute(edge, &coeffs, after, &f, key, 0, edge.weight, val, &mut ks, &mut key.clone(), &mut next, p);
        }
        layer = next;
        if layer.is_empty() {
            return 0;
        }
    }
    layer.values().fold(0, |acc, &v| (acc + v) % p)
}

/// Enumerate splits `k_i` of the remaining `left` columns over incidences
/// `i..`, accumulating the weight into `next`.
#[allow(clippy::too_many_arguments)]
fn distribute<K: Residuals>(
    edge: &WeightedEdge,
    coeffs: &[u64],
    cap_after: &[u64],
    f: &Factorials,
    key: &K,
    i: usize,
    left: u64,
    acc: u64,
    ks: &mut Vec<u64>,
    out_key: &mut K,
    next: &mut FxHashMap<K, u64>,
    p: u64,
) {
    let inc = &edge.incidences;
    if i == inc.len() {
        if left == 0 {
            let e = next.entry(out_key.clone()).or_insert(0);
            *e = (*e + acc) % p;
        }
        return;
    }
    let (v, _) = inc[i];
    let res = key.get(v);
    // Residual after this edge must still fit in later edges.
    let lo = res.saturating_sub(cap_after[v]);
    let hi = res.min(left);
    if lo > hi {
        return;
    }
    let (lo, hi) = if i + 1 == inc.len() {
        if left < lo || left > hi {
            return;
        }
        (left, left)
    } else {
        (lo, hi)
    };
    for k in lo..=hi {
        // Choose which k of the `left` columns, and k ordered rows of v.
        let w = mul_mod(mul_mod(f.binom(left, k), f.falling(res, k), p), pow_mod(coeffs[i], k, p), p);
        if w == 0 {
            continue;
        }
        ks[i] = k;
        out_key.set(v, res - k);
        distribute(edge, coeffs, cap_after, f, key, i + 1, left - k, mul_mod(acc, w, p), ks, out_key, next, p);
    }
    out_key.set(v, res);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate_family, Family};
    use crate::perm::{gperm_direct, BlockMatrix};

    #[test]
    fn single_vertex_single_edge_is_factorial() {
        for (n, p) in [(4u64, 5u64), (6, 7), (3, 11)] {
            let s = WeightedState {
                vertex_weights: vec![n],
                edges: vec![WeightedEdge { weight: n, incidences: vec![(0, 1)] }],
                modulus: p,
            };
            assert_eq!(cofactor_calculus(&s).unwrap(), crate::arith::factorial_mod(n, p));
        }
    }

    #[test]
    fn wheel_four_at_five() {
        let w4 = generate_family(&Family::Wheel(4)).unwrap();
        let s = WeightedState::from_graph(&w4, 5).unwrap();
        assert_eq!(cofactor_calculus(&s).unwrap(), 3);
    }

    #[test]
    fn unbalanced_state_is_rejected() {
        let s = WeightedState {
            vertex_weights: vec![2],
            edges: vec![WeightedEdge { weight: 3, incidences: vec![(0, 1)] }],
            modulus: 5,
        };
        assert!(matches!(cofactor_calculus(&s), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn matches_grouped_ryser_on_matrices() {
        let base = vec![vec![1, 2, 0], vec![-1, 1, 3], vec![0, 1, 1]];
        for p in [5u64, 7, 11, 13] {
            let bm = BlockMatrix::new(base.clone(), 2, 2);
            let s = WeightedState::from_matrix(&base, &[2, 2, 2], &[2, 2, 2], p).unwrap();
            assert_eq!(cofactor_calculus(&s).unwrap(), bm.perm_mod(p).unwrap());
        }
    }

    #[test]
    fn all_orders_agree() {
        let g = generate_family(&Family::Circulant { n: 7, a: 1, b: 2 }).unwrap().decomplete(0).unwrap();
        for p in [13u64, 37] {
            let s = WeightedState::from_graph(&g, p).unwrap();
            let a = cofactor_calculus_with(&s, &EliminationOrder::MinFrontier).unwrap();
            let b = cofactor_calculus_with(&s, &EliminationOrder::ForestPeeling).unwrap();
            let c =
                cofactor_calculus_with(&s, &EliminationOrder::Custom((0..s.vertex_count()).rev().collect())).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
            if p == 13 {
                assert_eq!(a, gperm_direct(&g, p).unwrap());
            }
        }
    }

    #[test]
    fn bad_custom_order() {
        let w4 = generate_family(&Family::Wheel(4)).unwrap();
        let s = WeightedState::from_graph(&w4, 5).unwrap();
        assert!(cofactor_calculus_with(&s, &EliminationOrder::Custom(vec![0, 0, 1, 2])).is_err());
    }
}
