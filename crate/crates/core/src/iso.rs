//! Brute-force vertex mappings for small undirected multigraphs: isomorphism
//! tests and involutive automorphism enumeration. Orientation and the special
//! vertex are ignored.

use crate::graph::OrientedGraph;

struct Matcher<'a> {
    a: &'a [Vec<usize>],
    b: &'a [Vec<usize>],
    deg_a: Vec<usize>,
    deg_b: Vec<usize>,
    order: Vec<usize>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(a: &'a [Vec<usize>], b: &'a [Vec<usize>]) -> Self {
        let deg = |m: &[Vec<usize>]| -> Vec<usize> {
            m.iter().enumerate().map(|(i, row)| row.iter().sum::<usize>() + row[i]).collect()
        };
        let n = a.len();
        // Breadth-first order keeps every new vertex adjacent to mapped ones.
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for u in 0..n {
                    if a[v][u] > 0 && !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        Self { deg_a: deg(a), deg_b: deg(b), a, b, order, map: vec![None; n], used: vec![false; b.len()] }
    }

    fn consistent(&self, x: usize, y: usize) -> bool {
        if self.deg_a[x] != self.deg_b[y] || self.a[x][x] != self.b[y][y] {
            return false;
        }
        self.map.iter().enumerate().all(|(w, m)| m.is_none_or(|z| self.a[x][w] == self.b[y][z]))
    }

    fn assign(&mut self, x: usize, y: usize) {
        self.map[x] = Some(y);
        self.used[y] = true;
    }

    fn unassign(&mut self, x: usize, y: usize) {
        self.map[x] = None;
        self.used[y] = false;
    }

    /// Depth-first search; `visit` returns false to stop.
    fn run(&mut self, depth: usize, involution: bool, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let Some(&x) = self.order[depth..].iter().find(|&&v| self.map[v].is_none()) else {
            let full: Vec<usize> = self.map.iter().map(|m| m.expect("complete map")).collect();
            return visit(&full);
        };
        for y in 0..self.b.len() {
            if self.used[y] || !self.consistent(x, y) {
                continue;
            }
            if involution && y != x {
                // y must map back to x.
                if self.map[y].is_some() || self.used[x] {
                    continue;
                }
                self.assign(x, y);
                if self.consistent(y, x) {
                    self.assign(y, x);
                    let go_on = self.run(depth + 1, involution, visit);
                    self.unassign(y, x);
                    if !go_on {
                        self.unassign(x, y);
                        return false;
                    }
                }
                self.unassign(x, y);
            } else {
                self.assign(x, y);
                let go_on = self.run(depth + 1, involution, visit);
                self.unassign(x, y);
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}

/// A vertex map `f` with `mult(u,v) = mult(f(u), f(v))`, if one exists.
pub fn find_isomorphism(g: &OrientedGraph, h: &OrientedGraph) -> Option<Vec<usize>> {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    let mut dg = g.degrees();
    let mut dh = h.degrees();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return None;
    }
    let (a, b) = (g.multiplicity_matrix(), h.multiplicity_matrix());
    let mut m = Matcher::new(&a, &b);
    let mut found = None;
    m.run(0, false, &mut |f| {
        found = Some(f.to_vec());
        false
    });
    found
}

pub fn are_isomorphic(g: &OrientedGraph, h: &OrientedGraph) -> bool {
    find_isomorphism(g, h).is_some()
}

/// Every automorphism `τ` with `τ∘τ = id`, identity included.
pub fn involutive_automorphisms(g: &OrientedGraph) -> Vec<Vec<usize>> {
    let a = g.multiplicity_matrix();
    let mut m = Matcher::new(&a, &a);
    let mut out = Vec::new();
    m.run(0, true, &mut |f| {
        out.push(f.to_vec());
        true
    });
    out
}

/// Number of automorphisms (brute force).
pub fn automorphism_count(g: &OrientedGraph) -> usize {
    let a = g.multiplicity_matrix();
    let mut m = Matcher::new(&a, &a);
    let mut count = 0;
    m.run(0, false, &mut |_| {
        count += 1;
        true
    });
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_has_one_reflection() {
        let p = OrientedGraph::from_undirected(3, &[(0, 1), (1, 2)], 0).unwrap();
        let inv = involutive_automorphisms(&p);
        assert_eq!(inv, vec![vec![0, 1, 2], vec![2, 1, 0]]);
        assert_eq!(automorphism_count(&p), 2);
    }

    #[test]
    fn k4_involutions() {
        let k4 = OrientedGraph::from_undirected(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 0).unwrap();
        // Identity, 6 transpositions, 3 double transpositions.
        assert_eq!(involutive_automorphisms(&k4).len(), 10);
        assert_eq!(automorphism_count(&k4), 24);
    }

    #[test]
    fn multiplicities_matter() {
        let a = OrientedGraph::from_undirected(3, &[(0, 1), (0, 1), (1, 2)], 0).unwrap();
        let b = OrientedGraph::from_undirected(3, &[(0, 1), (1, 2), (1, 2)], 0).unwrap();
        let c = OrientedGraph::from_undirected(3, &[(0, 1), (1, 2), (0, 2)], 0).unwrap();
        assert!(are_isomorphic(&a, &b));
        assert!(!are_isomorphic(&a, &c));
        assert_eq!(find_isomorphism(&a, &b), Some(vec![2, 1, 0]));
    }
}
