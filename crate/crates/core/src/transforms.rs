//! Period-preserving graph operations and involution symmetries.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, OrientedGraph, RotationSystem};
use crate::iso::involutive_automorphisms;

/// Largest graph handed to the automorphism search.
pub const INVOLUTION_VERTEX_LIMIT: usize = 16;

/// A four-vertex cut `(v1, v2, v3, v4)` and the vertices on its left side;
/// every other non-cut vertex is on the right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourCutSpec {
    pub cut_vertices: [usize; 4],
    pub left_vertices: Vec<usize>,
}

/// Exchange `v1 <-> v2` and `v3 <-> v4` in every right-side edge.
///
/// Left-side edges and edges between two cut vertices are unchanged, as is
/// the special vertex index. Edge order and orientation are kept.
pub fn schnetz_twist(g: &OrientedGraph, cut: &FourCutSpec) -> Result<OrientedGraph> {
    let n = g.vertex_count();
    let c = cut.cut_vertices;
    for &v in c.iter().chain(&cut.left_vertices) {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, count: n });
        }
    }
    if c.iter().collect::<BTreeSet<_>>().len() != 4 {
        return Err(Error::InvalidCut("cut vertices must be distinct".into()));
    }
    let left: BTreeSet<usize> = cut.left_vertices.iter().copied().collect();
    if left.iter().any(|v| c.contains(v)) {
        return Err(Error::InvalidCut("left side contains a cut vertex".into()));
    }
    if left.is_empty() || left.len() + 4 >= n {
        return Err(Error::InvalidCut("both sides must be nonempty".into()));
    }
    let side = |v: usize| -> Option<bool> {
        if c.contains(&v) {
            None
        } else {
            Some(left.contains(&v))
        }
    };
    let swap = |v: usize| -> usize {
        match c.iter().position(|&x| x == v) {
            Some(0) => c[1],
            Some(1) => c[0],
            Some(2) => c[3],
            Some(3) => c[2],
            _ => v,
        }
    };
    let mut edges = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let (a, b) = (side(e.tail), side(e.head));
        if let (Some(x), Some(y)) = (a, b) {
            if x != y {
                return Err(Error::InvalidCut(format!("edge {}-{} crosses the cut", e.tail, e.head)));
            }
        }
        let right = a == Some(false) || b == Some(false);
        edges.push(if right { Edge::new(swap(e.tail), swap(e.head)) } else { *e });
    }
    let twisted = OrientedGraph::new(n, edges, g.special_vertex())?;
    let mut before = g.degrees();
    if let Some(d) = before.first().copied().filter(|&d| g.is_regular(d)) {
        if !twisted.is_regular(d) {
            return Err(Error::NotRegular(d));
        }
    }
    let mut after = twisted.degrees();
    before.sort_unstable();
    after.sort_unstable();
    if before != after {
        return Err(Error::InvalidCut("twist changes the degree sequence".into()));
    }
    Ok(twisted)
}

/// Dart `2e` runs tail to head along edge `e`; dart `2e+1` runs back.
fn dart_end(g: &OrientedGraph, d: usize) -> usize {
    let e = g.edges()[d / 2];
    if d.is_multiple_of(2) {
        e.head
    } else {
        e.tail
    }
}

fn check_rotation(g: &OrientedGraph, rot: &RotationSystem) -> Result<()> {
    if rot.order.len() != g.vertex_count() {
        return Err(Error::InvalidRotation(format!(
            "{} vertex orders for {} vertices",
            rot.order.len(),
            g.vertex_count()
        )));
    }
    if g.has_loops() {
        return Err(Error::InvalidRotation("loops are not supported".into()));
    }
    for (v, order) in rot.order.iter().enumerate() {
        let mut listed: Vec<usize> = order.clone();
        let mut incident: Vec<usize> = (0..g.edge_count()).filter(|&e| g.edges()[e].touches(v)).collect();
        listed.sort_unstable();
        incident.sort_unstable();
        if listed != incident {
            return Err(Error::InvalidRotation(format!("vertex {v} lists {order:?}, incident edges are {incident:?}")));
        }
    }
    Ok(())
}

/// Faces of the embedding as cycles of darts.
pub fn faces(g: &OrientedGraph, rot: &RotationSystem) -> Result<Vec<Vec<usize>>> {
    check_rotation(g, rot)?;
    let darts = 2 * g.edge_count();
    let next = |d: usize| -> usize {
        let v = dart_end(g, d);
        let e = d / 2;
        let order = &rot.order[v];
        let pos = order.iter().position(|&x| x == e).expect("validated rotation");
        let f = order[(pos + 1) % order.len()];
        if g.edges()[f].tail == v {
            2 * f
        } else {
            2 * f + 1
        }
    };
    let mut seen = vec![false; darts];
    let mut out = Vec::new();
    for start in 0..darts {
        if seen[start] {
            continue;
        }
        let mut face = Vec::new();
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            face.push(d);
            d = next(d);
        }
        out.push(face);
    }
    Ok(out)
}

/// Planar dual together with the rotation system its face walks induce.
///
/// Dual vertex `i` is the `i`-th face found by walking darts in index
/// order; dual edge `e` runs from the face containing dart `2e` to the face
/// containing dart `2e+1`. The special vertex of the dual is 0.
pub fn planar_dual_with_rotation(g: &OrientedGraph, rot: &RotationSystem) -> Result<(OrientedGraph, RotationSystem)> {
    if !g.is_connected() {
        return Err(Error::InvalidRotation("graph must be connected".into()));
    }
    let fs = faces(g, rot)?;
    let euler = g.vertex_count() as i64 - g.edge_count() as i64 + fs.len() as i64;
    if euler != 2 {
        return Err(Error::NotPlanar { euler });
    }
    let mut face_of = vec![0usize; 2 * g.edge_count()];
    for (i, f) in fs.iter().enumerate() {
        for &d in f {
            face_of[d] = i;
        }
    }
    let edges = (0..g.edge_count()).map(|e| Edge::new(face_of[2 * e], face_of[2 * e + 1])).collect();
    let dual = OrientedGraph::new(fs.len(), edges, 0)?;
    let order = fs.iter().map(|f| f.iter().map(|d| d / 2).collect()).collect();
    Ok((dual, RotationSystem { order }))
}

/// Planar dual of `g` under the embedding `rot`.
pub fn planar_dual(g: &OrientedGraph, rot: &RotationSystem) -> Result<OrientedGraph> {
    planar_dual_with_rotation(g, rot).map(|(d, _)| d)
}

/// Split along the cut pair `(v1, v2)`: one side is the component (of
/// `G - {v1, v2}`) containing the smallest remaining vertex, the other side
/// is everything else. Each part gets `v1`, `v2` (numbered 0 and 1, with 0
/// special), its side's vertices in increasing order, its side's edges, and
/// a new edge `v1 -> v2`. Edges joining `v1` and `v2` directly go to the
/// first part.
pub fn two_vertex_split(g: &OrientedGraph, pair: (usize, usize)) -> Result<(OrientedGraph, OrientedGraph)> {
    let n = g.vertex_count();
    let (a, b) = pair;
    for v in [a, b] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, count: n });
        }
    }
    if a == b {
        return Err(Error::NotACutPair(a, b));
    }
    // Components of G - {a, b}.
    let rest: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
    let Some(&root) = rest.first() else {
        return Err(Error::NotACutPair(a, b));
    };
    let mut in_first = vec![false; n];
    in_first[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for e in g.edges() {
            if e.touches(v) {
                let u = e.other(v);
                if u != a && u != b && !in_first[u] {
                    in_first[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    let first: Vec<usize> = rest.iter().copied().filter(|&v| in_first[v]).collect();
    let second: Vec<usize> = rest.iter().copied().filter(|&v| !in_first[v]).collect();
    if second.is_empty() {
        return Err(Error::NotACutPair(a, b));
    }
    let build = |side: &[usize], take_pair_edges: bool| -> Result<OrientedGraph> {
        let mut index = vec![usize::MAX; n];
        index[a] = 0;
        index[b] = 1;
        for (i, &v) in side.iter().enumerate() {
            index[v] = i + 2;
        }
        let on_side = |v: usize| side.contains(&v);
        let mut edges = Vec::new();
        for e in g.edges() {
            let pair_edge = [e.tail, e.head].iter().all(|&x| x == a || x == b);
            let keep = on_side(e.tail) || on_side(e.head) || (take_pair_edges && pair_edge);
            if keep {
                edges.push(Edge::new(index[e.tail], index[e.head]));
            }
        }
        edges.push(Edge::new(0, 1));
        OrientedGraph::new(side.len() + 2, edges, 0)
    };
    // Loops at a or b and direct a-b edges stay with the first part.
    Ok((build(&first, true)?, build(&second, false)?))
}

/// An involutive automorphism with its crossing and fixed-vertex counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Involution {
    pub permutation: Vec<usize>,
    /// Edges `uv` (u != v) with `τ(u) = v`.
    pub crossing_edge_count: usize,
    pub fixed_vertex_count: usize,
}

/// Every non-identity involutive automorphism of `g`.
pub fn find_involutions(g: &OrientedGraph) -> Result<Vec<Involution>> {
    if g.vertex_count() > INVOLUTION_VERTEX_LIMIT {
        return Err(Error::SizeLimit { vertices: g.vertex_count(), limit: INVOLUTION_VERTEX_LIMIT });
    }
    Ok(involutive_automorphisms(g)
        .into_iter()
        .filter(|t| t.iter().enumerate().any(|(i, &x)| i != x))
        .map(|t| {
            let crossing_edge_count = g.edges().iter().filter(|e| !e.is_loop() && t[e.tail] == e.head).count();
            let fixed_vertex_count = t.iter().enumerate().filter(|&(i, &x)| i == x).count();
            Involution { permutation: t, crossing_edge_count, fixed_vertex_count }
        })
        .collect())
}

/// Whether some involution has an odd number of crossing edges and a fixed
/// vertex, which forces the residue to vanish at every `p ≡ 3 mod 4` for
/// decompleted 4-regular graphs.
pub fn symmetry_zero_predicate(g: &OrientedGraph) -> Result<bool> {
    Ok(find_involutions(g)?.iter().any(|i| i.crossing_edge_count % 2 == 1 && i.fixed_vertex_count >= 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate_family, Family};
    use crate::iso::are_isomorphic;

    fn k4() -> OrientedGraph {
        OrientedGraph::from_undirected(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 0).unwrap()
    }

    /// Tetrahedron embedding: vertex 3 in the middle of triangle 0-1-2.
    fn k4_rotation() -> RotationSystem {
        // Edge indices: 0:(0,1) 1:(0,2) 2:(0,3) 3:(1,2) 4:(1,3) 5:(2,3).
        RotationSystem { order: vec![vec![0, 2, 1], vec![3, 4, 0], vec![1, 5, 3], vec![2, 4, 5]] }
    }

    #[test]
    fn tetrahedron_is_self_dual() {
        let (d, rot) = planar_dual_with_rotation(&k4(), &k4_rotation()).unwrap();
        assert_eq!(d.vertex_count(), 4);
        assert!(are_isomorphic(&d, &k4()));
        let dd = planar_dual(&d, &rot).unwrap();
        assert!(are_isomorphic(&dd, &k4()));
    }

    #[test]
    fn bad_rotations() {
        let mut r = k4_rotation();
        r.order[0] = vec![0, 1];
        assert!(matches!(planar_dual(&k4(), &r), Err(Error::InvalidRotation(_))));
        // A valid rotation system of genus one.
        let torus = RotationSystem { order: vec![vec![0, 1, 2], vec![3, 4, 0], vec![1, 5, 3], vec![2, 4, 5]] };
        assert!(matches!(planar_dual(&k4(), &torus), Err(Error::NotPlanar { .. })));
    }

    #[test]
    fn path_reflection() {
        let p = OrientedGraph::from_undirected(3, &[(0, 1), (1, 2)], 0).unwrap();
        let inv = find_involutions(&p).unwrap();
        assert_eq!(inv.len(), 1);
        assert_eq!(inv[0].crossing_edge_count, 0);
        assert_eq!(inv[0].fixed_vertex_count, 1);
        assert!(!symmetry_zero_predicate(&p).unwrap());
    }

    #[test]
    fn wheel_symmetry() {
        assert!(symmetry_zero_predicate(&k4()).unwrap());
        assert!(!symmetry_zero_predicate(&generate_family(&Family::Wheel(4)).unwrap()).unwrap());
        assert!(symmetry_zero_predicate(&generate_family(&Family::Wheel(5)).unwrap()).unwrap());
    }

    #[test]
    fn split_needs_a_cut() {
        assert!(matches!(two_vertex_split(&k4(), (0, 1)), Err(Error::NotACutPair(0, 1))));
    }

    #[test]
    fn split_of_glued_halves() {
        // Two copies of K4 minus the edge 0-1, glued along {0, 1}.
        let g = OrientedGraph::from_undirected(
            6,
            &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (0, 5), (1, 4), (1, 5), (4, 5)],
            0,
        )
        .unwrap();
        let (a, b) = two_vertex_split(&g, (0, 1)).unwrap();
        assert!(are_isomorphic(&a, &k4()));
        assert!(are_isomorphic(&b, &k4()));
    }

    #[test]
    fn twist_checks() {
        let c8 = generate_family(&Family::Circulant { n: 8, a: 1, b: 2 }).unwrap();
        // {0,1} vs {4,5} separated by {2,3,6,7}; 2 and 7 each have one
        // right-side edge, 3 and 6 two.
        let cut = FourCutSpec { cut_vertices: [2, 7, 3, 6], left_vertices: vec![0, 1] };
        let unbalanced = FourCutSpec { cut_vertices: [2, 3, 6, 7], left_vertices: vec![0, 1] };
        assert!(matches!(schnetz_twist(&c8, &unbalanced), Err(Error::NotRegular(4))));
        let t = schnetz_twist(&c8, &cut).unwrap();
        assert!(t.is_regular(4));
        assert_eq!(schnetz_twist(&t, &cut).unwrap(), c8);
        let bad = FourCutSpec { cut_vertices: [2, 3, 6, 7], left_vertices: vec![0, 4] };
        assert!(matches!(schnetz_twist(&c8, &bad), Err(Error::InvalidCut(_))));
    }
}
