//! Generators for trees, wheels, zig-zags, circulants and bananas.
//!
//! Numbering conventions (all edges run from the smaller endpoint unless noted):
//! - path: `0 - 1 - ... - (n-1)`, special vertex 0;
//! - star: centre 0 with leaves `1..n`, special vertex 0;
//! - Prüfer trees: standard decoding, special vertex 0;
//! - wheel `W_w`: rim `0..w` in cyclic order, apex `w` (last) is special;
//!   rim edges `(i, i+1)` then the closing edge `(0, w-1)`, then spokes `(i, w)`;
//! - circulant `C^n_{a,b}`: edges `{i, i+a}` and `{i, i+b}` (mod n) for each
//!   `i` in turn, repeated pairs dropped, special vertex 0;
//! - zig-zag on `m` vertices: `C^{m+1}_{1,2}` with vertex `m` deleted; the
//!   special vertex is the right-most vertex `m-1`;
//! - banana: two vertices joined by `k` parallel edges `0 -> 1`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::OrientedGraph;
use crate::iso::are_isomorphic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeShape {
    Path(usize),
    Star(usize),
    Prufer(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Tree(TreeShape),
    Wheel(usize),
    Zigzag(usize),
    Circulant { n: usize, a: usize, b: usize },
    Banana(usize),
}

pub fn generate_family(kind: &Family) -> Result<OrientedGraph> {
    match kind {
        Family::Tree(shape) => tree(shape),
        Family::Wheel(w) => wheel(*w),
        Family::Zigzag(m) => zigzag(*m),
        Family::Circulant { n, a, b } => circulant(*n, *a, *b),
        Family::Banana(k) => banana(*k),
    }
}

fn tree(shape: &TreeShape) -> Result<OrientedGraph> {
    match shape {
        TreeShape::Path(n) => {
            if *n == 0 {
                return Err(Error::InvalidFamily("path needs a vertex".into()));
            }
            let pairs: Vec<_> = (1..*n).map(|i| (i - 1, i)).collect();
            OrientedGraph::from_undirected(*n, &pairs, 0)
        }
        TreeShape::Star(n) => {
            if *n == 0 {
                return Err(Error::InvalidFamily("star needs a vertex".into()));
            }
            let pairs: Vec<_> = (1..*n).map(|i| (0, i)).collect();
            OrientedGraph::from_undirected(*n, &pairs, 0)
        }
        TreeShape::Prufer(seq) => {
            let n = seq.len() + 2;
            if let Some(&bad) = seq.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidFamily(format!("Prüfer entry {bad} >= {n}")));
            }
            let mut degree = vec![1usize; n];
            for &x in seq {
                degree[x] += 1;
            }
            let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
            let mut pairs = Vec::with_capacity(n - 1);
            for &x in seq {
                let leaf = *leaves.iter().next().expect("a leaf always exists");
                leaves.remove(&leaf);
                pairs.push((leaf, x));
                degree[x] -= 1;
                if degree[x] == 1 {
                    leaves.insert(x);
                }
            }
            let rest: Vec<usize> = leaves.into_iter().collect();
            pairs.push((rest[0], rest[1]));
            OrientedGraph::from_undirected(n, &pairs, 0)
        }
    }
}

fn wheel(w: usize) -> Result<OrientedGraph> {
    if w < 3 {
        return Err(Error::InvalidFamily(format!("wheel needs at least 3 spokes, got {w}")));
    }
    let mut pairs: Vec<_> = (1..w).map(|i| (i - 1, i)).collect();
    pairs.push((0, w - 1));
    pairs.extend((0..w).map(|i| (i, w)));
    OrientedGraph::from_undirected(w + 1, &pairs, w)
}

fn circulant(n: usize, a: usize, b: usize) -> Result<OrientedGraph> {
    if n < 3 || a == 0 || b == 0 || a >= n || b >= n || a == b || a + b == n {
        return Err(Error::InvalidFamily(format!("circulant C^{n}_({a},{b})")));
    }
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    for i in 0..n {
        for d in [a, b] {
            let j = (i + d) % n;
            let key = (i.min(j), i.max(j));
            if seen.insert(key) {
                pairs.push(key);
            }
        }
    }
    OrientedGraph::from_undirected(n, &pairs, 0)
}

fn zigzag(m: usize) -> Result<OrientedGraph> {
    if m < 4 {
        return Err(Error::InvalidFamily(format!("zig-zag needs at least 4 vertices, got {m}")));
    }
    circulant(m + 1, 1, 2)?.decomplete(m)?.with_special(m - 1)
}

fn banana(k: usize) -> Result<OrientedGraph> {
    if k == 0 {
        return Err(Error::InvalidFamily("banana needs an edge".into()));
    }
    OrientedGraph::from_pairs(2, &vec![(0, 1); k], 0)
}

/// Every connected simple 4-regular graph on `n` vertices, one per
/// isomorphism class. Vertex 0 is special in each.
pub fn connected_four_regular(n: usize) -> Result<Vec<OrientedGraph>> {
    if n < 5 {
        return Ok(Vec::new());
    }
    if n > 10 {
        return Err(Error::InvalidFamily(format!("4-regular enumeration is limited to 10 vertices, got {n}")));
    }
    // Vertex 0 is adjacent to 1..=4 without loss of generality; the rest of
    // the adjacency is filled in lexicographic pair order.
    let mut deg = vec![0usize; n];
    deg[0] = 4;
    for d in deg.iter_mut().take(5).skip(1) {
        *d = 1;
    }
    let mut pairs = vec![(0, 1), (0, 2), (0, 3), (0, 4)];
    let mut labelled = Vec::new();
    fill_four_regular(n, &mut deg, &mut pairs, 1, 2, &mut labelled);
    let mut classes: Vec<OrientedGraph> = Vec::new();
    for p in labelled {
        let g = OrientedGraph::from_undirected(n, &p, 0)?;
        if g.is_connected() && !classes.iter().any(|h| are_isomorphic(&g, h)) {
            classes.push(g);
        }
    }
    Ok(classes)
}

fn fill_four_regular(
    n: usize,
    deg: &mut [usize],
    pairs: &mut Vec<(usize, usize)>,
    i: usize,
    j: usize,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if i == n {
        if deg.iter().all(|&d| d == 4) {
            out.push(pairs.clone());
        }
        return;
    }
    if j == n {
        if deg[i] == 4 {
            fill_four_regular(n, deg, pairs, i + 1, i + 2, out);
        }
        return;
    }
    if 4 - deg[i] > n - j {
        return;
    }
    if deg[i] < 4 && deg[j] < 4 {
        deg[i] += 1;
        deg[j] += 1;
        pairs.push((i, j));
        fill_four_regular(n, deg, pairs, i, j + 1, out);
        pairs.pop();
        deg[i] -= 1;
        deg[j] -= 1;
    }
    fill_four_regular(n, deg, pairs, i, j + 1, out);
}
