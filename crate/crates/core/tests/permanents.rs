use egp::arith::{factorial_mod, is_prime, split_factorial_product, wilson_holds};
use egp::families::{generate_family, Family, TreeShape};
use egp::perm::{fundamental_perm_mod, perm_exact, perm_mod, BlockMatrix};
use egp::sequence::{canonicalize_sign, egp, gperm, Algorithm};
use egp::OrientedGraph;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

fn k3() -> OrientedGraph {
    OrientedGraph::from_pairs(3, &[(0, 1), (1, 2), (0, 2)], 0).unwrap()
}

fn k4() -> OrientedGraph {
    generate_family(&Family::Wheel(3)).unwrap()
}

fn banana(k: usize) -> OrientedGraph {
    generate_family(&Family::Banana(k)).unwrap()
}

/// Determinant by fraction-free elimination.
fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else { return 0 };
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Random connected multigraph without loops: a random tree plus extras.
fn connected_graph() -> impl Strategy<Value = OrientedGraph> {
    (2usize..=5)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec(0usize..1000, n - 1);
            let extra = proptest::collection::vec((0usize..n, 0usize..n), 0..=4);
            (Just(n), tree, extra)
        })
        .prop_filter_map("loops are excluded", |(n, tree, extra)| {
            let mut pairs: Vec<(usize, usize)> = (1..n).map(|v| (tree[v - 1] % v, v)).collect();
            for (a, b) in extra {
                if a == b {
                    return None;
                }
                pairs.push((a, b));
            }
            OrientedGraph::from_pairs(n, &pairs, 0).ok()
        })
}

/// A bound reaching at least one admissible prime while keeping the
/// duplicated matrices small enough for the direct algorithm.
fn small_bound(g: &OrientedGraph) -> u64 {
    let spec = g.block_spec().unwrap();
    let first = (1..).map(|n| n * spec.vertex_reps + 1).find(|&p| is_prime(p)).unwrap();
    first.max(13)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn algorithms_agree(g in connected_graph()) {
        let bound = small_bound(&g);
        let direct = egp(&g, bound, Algorithm::Direct).unwrap();
        for alg in [Algorithm::Reduced, Algorithm::Cofactor, Algorithm::Auto] {
            prop_assert_eq!(egp(&g, bound, alg).unwrap().residues(), direct.residues());
        }
    }

    #[test]
    fn orientation_changes_only_the_variate_sign(g in connected_graph(), flips in proptest::collection::vec(any::<bool>(), 9)) {
        let bound = small_bound(&g);
        let flipped = g.with_reversed(&flips[..g.edge_count().min(9)].iter().copied().chain(std::iter::repeat(false)).take(g.edge_count()).collect::<Vec<_>>());
        let a = egp(&g, bound, Algorithm::Auto).unwrap();
        let b = egp(&flipped, bound, Algorithm::Auto).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            if x.variate {
                prop_assert!(y.residue == x.residue || y.residue == (x.prime - x.residue) % x.prime);
            } else {
                prop_assert_eq!(y.residue, x.residue);
            }
        }
        prop_assert_eq!(canonicalize_sign(&a).residues(), canonicalize_sign(&b).residues());
    }

    #[test]
    fn special_vertex_is_irrelevant(g in connected_graph(), v in 0usize..5) {
        let v = v % g.vertex_count();
        let bound = small_bound(&g);
        let a = egp(&g, bound, Algorithm::Auto).unwrap();
        let b = egp(&g.with_special(v).unwrap(), bound, Algorithm::Auto).unwrap();
        prop_assert_eq!(a.residues(), b.residues());
    }

    #[test]
    fn repeated_rows_force_factorial_divisibility(row in proptest::collection::vec(-2i64..=2, 5), k in 2usize..=4, rest in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 5), 3)) {
        let mut m: Vec<Vec<i64>> = std::iter::repeat_n(row, k).collect();
        m.extend(rest.into_iter().take(5 - k));
        let p = perm_exact(&m).unwrap();
        let kf: u64 = (1..=k as u64).product();
        prop_assert!((p % BigInt::from(kf)).is_zero());
    }

    #[test]
    fn block_diagonal_permanent_factors_and_off_diagonal_zero_block_kills_it(
        a in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 3),
        b in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 2), 2),
    ) {
        let mut m = vec![vec![0i64; 5]; 5];
        for i in 0..3 { for j in 0..3 { m[i][j] = a[i][j]; } }
        for i in 0..2 { for j in 0..2 { m[3 + i][3 + j] = b[i][j]; } }
        prop_assert_eq!(perm_exact(&m).unwrap(), perm_exact(&a).unwrap() * perm_exact(&b).unwrap());
        // A 4 x 3 zero block leaves no transversal at all.
        let mut z = vec![vec![1i64; 5]; 5];
        for row in z.iter_mut().take(4) { for x in row.iter_mut().take(2) { *x = 0; } }
        prop_assert!(perm_exact(&z).unwrap().is_zero());
    }

    #[test]
    fn modular_permanent_reduces_exact(m in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 5), 5), q in 2u64..40) {
        let exact = perm_exact(&m).unwrap();
        let r = ((exact % BigInt::from(q)) + BigInt::from(q)) % BigInt::from(q);
        prop_assert_eq!(perm_mod(&m, q).unwrap(), r.to_u64().unwrap());
    }
}

#[test]
fn reduced_incidence_is_totally_unimodular() {
    let graphs = [k3(), k4(), banana(3), generate_family(&Family::Wheel(4)).unwrap()];
    for g in &graphs {
        let m = g.reduced_incidence().unwrap().rows;
        let (r, c) = (m.len(), m[0].len());
        for size in 1..=r.min(c) {
            for rows in subsets(r, size) {
                for cols in subsets(c, size) {
                    let sub: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
                    assert!(det(&sub).abs() <= 1, "minor {rows:?} x {cols:?}");
                }
            }
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn fundamental_residues(g: &OrientedGraph, moduli: &[u64]) -> Vec<(u64, u64)> {
    moduli.iter().filter_map(|&q| fundamental_perm_mod(g, q - 1).unwrap().map(|r| (q, r))).collect()
}

#[test]
fn composite_moduli_vanish_for_three_or_more_vertices() {
    let moduli = [4, 6, 8, 9, 10, 12, 14, 15, 16];
    let k3_cases = fundamental_residues(&k3(), &moduli);
    let k4_cases = fundamental_residues(&k4(), &moduli);
    assert!(k3_cases.iter().any(|c| c.0 == 4) && k4_cases.iter().any(|c| c.0 == 9));
    for (q, r) in k3_cases.into_iter().chain(k4_cases) {
        assert!(!is_prime(q));
        assert_eq!(r, 0, "modulus {q}");
    }
}

#[test]
fn two_vertex_graphs_are_outside_the_vanishing_hypothesis() {
    // The fundamental matrix of a banana is all ones, so its permanent is k!.
    for (edges, q) in [(3, 4u64), (5, 6), (7, 8), (4, 9), (2, 9)] {
        let cases = fundamental_residues(&banana(edges), &[q]);
        assert_eq!(cases.len(), 1);
        assert_eq!(cases[0].1, factorial_mod(q - 1, q));
    }
    assert_eq!(factorial_mod(3, 4), 2);
}

#[test]
fn prime_moduli_recover_gperm() {
    for g in [k3(), k4(), banana(3)] {
        let spec = g.block_spec().unwrap();
        for p in [5u64, 7, 13] {
            let Some(n) = spec.duplication_for(p) else { continue };
            let m = g.reduced_incidence().unwrap().rows;
            let bm = BlockMatrix::new(m, n * spec.vertex_reps, n * spec.edge_reps);
            assert_eq!(bm.perm_mod(p).unwrap(), gperm(&g, p, Algorithm::Direct).unwrap());
        }
    }
}

#[test]
fn wilson_and_factorial_split() {
    for n in 2..200 {
        assert_eq!(wilson_holds(n), is_prime(n), "{n}");
    }
    // a! b! ≡ (-1)^b (a+b)! mod a+b+1
    for j in [7u64, 11, 13, 31] {
        for a in 1..j - 1 {
            let b = j - 1 - a;
            let (lhs, rhs) = split_factorial_product(a, b);
            assert_eq!(lhs, rhs, "a = {a}, b = {b}");
            let sign = if b % 2 == 0 { 1 } else { j - 1 };
            assert_eq!(lhs, factorial_mod(j - 1, j) * sign % j);
        }
    }
}

#[test]
fn wheel_five_vanishes_at_five_but_its_permanent_does_not() {
    let w5 = generate_family(&Family::Wheel(5)).unwrap();
    assert_eq!(gperm(&w5, 5, Algorithm::Direct).unwrap(), 0);
    let spec = w5.block_spec().unwrap();
    let n = spec.duplication_for(5).unwrap();
    let m = BlockMatrix::new(w5.reduced_incidence().unwrap().rows, n * spec.vertex_reps, n * spec.edge_reps);
    let exact = perm_exact(&m.materialize()).unwrap();
    assert!(!exact.is_zero());
    assert!((exact.abs() % BigInt::from(5)).is_zero());
}

#[test]
fn trees_give_a_sign_fixed_by_the_edge_count() {
    // Each of the |E| row blocks contributes (p-1)! ≡ -1.
    for shape in [TreeShape::Path(5), TreeShape::Path(4), TreeShape::Star(4), TreeShape::Prufer(vec![2, 2, 0])] {
        let g = generate_family(&Family::Tree(shape)).unwrap();
        let s = egp(&g, 23, Algorithm::Direct).unwrap();
        let odd = g.edge_count() % 2 == 1;
        assert!(s.values.iter().all(|v| v.residue == if odd { v.prime - 1 } else { 1 }));
    }
}
