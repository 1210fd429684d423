//! EGP sequences: admissible primes, per-prime residues by any algorithm,
//! sign canonicalization and the closed forms for trees, wheels and zig-zags.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, mul_mod, pow_mod, primes_up_to, sign_mod, Factorials};
use crate::error::{Error, Result};
use crate::graph::{BlockSpec, OrientedGraph};
use crate::perm::{gperm_cofactor, gperm_direct, gperm_reduced};

/// Which permanent algorithm computes each residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Grouped Ryser on the fundamental block matrix.
    Direct,
    /// Blockwise row reduction, then the smaller remaining permanent.
    Reduced,
    /// Weighted-graph cofactor calculus.
    Cofactor,
    /// The cheapest available path (the cofactor calculus).
    #[default]
    Auto,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Self::Direct),
            "reduced" => Ok(Self::Reduced),
            "cofactor" => Ok(Self::Cofactor),
            "auto" => Ok(Self::Auto),
            other => Err(Error::Parse { line: 0, message: format!("unknown algorithm {other:?}") }),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Direct => "direct",
            Self::Reduced => "reduced",
            Self::Cofactor => "cofactor",
            Self::Auto => "auto",
        })
    }
}

/// One residue of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgpValue {
    pub prime: u64,
    /// Duplication factor: `prime = n * vertex_reps + 1`.
    pub n: u64,
    pub residue: u64,
    /// True when `n * edge_reps` is odd, i.e. the residue flips sign with
    /// edge orientation.
    pub variate: bool,
}

/// A prime the computation could not cover, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingValue {
    pub prime: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgpSequence {
    pub graph: String,
    pub spec: BlockSpec,
    /// Strictly increasing in `prime`.
    pub values: Vec<EgpValue>,
    pub missing: Vec<MissingValue>,
    pub canonicalized: bool,
}

impl EgpSequence {
    /// Build from `(prime, residue)` pairs; primes must be admissible.
    pub fn from_residues(graph: impl Into<String>, spec: BlockSpec, residues: &[(u64, u64)]) -> Result<Self> {
        let mut values = Vec::with_capacity(residues.len());
        for &(p, r) in residues {
            let n = spec
                .duplication_for(p)
                .filter(|_| is_prime(p))
                .ok_or(Error::NotAdmissible { prime: p, vertex_reps: spec.vertex_reps })?;
            values.push(EgpValue { prime: p, n, residue: r % p, variate: spec.is_variate(p) });
        }
        values.sort_by_key(|v| v.prime);
        values.dedup_by_key(|v| v.prime);
        Ok(Self { graph: graph.into(), spec, values, missing: Vec::new(), canonicalized: false })
    }

    pub fn primes(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.prime).collect()
    }

    pub fn residues(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.residue).collect()
    }

    pub fn residue_at(&self, p: u64) -> Option<u64> {
        self.values.iter().find(|v| v.prime == p).map(|v| v.residue)
    }
}

/// Primes `p <= bound` with `p = n * vertex_reps + 1`, `n >= 1`.
pub fn admissible_primes(spec: &BlockSpec, bound: u64) -> Vec<u64> {
    primes_up_to(bound).into_iter().filter(|&p| spec.duplication_for(p).is_some_and(|n| n >= 1)).collect()
}

/// `Perm(1_{nV x nE} ⊗ M_G) mod p` by the chosen algorithm.
pub fn gperm(g: &OrientedGraph, p: u64, algorithm: Algorithm) -> Result<u64> {
    match algorithm {
        Algorithm::Direct => gperm_direct(g, p),
        Algorithm::Reduced => gperm_reduced(g, p),
        Algorithm::Cofactor | Algorithm::Auto => gperm_cofactor(g, p),
    }
}

/// The raw (uncanonicalized) sequence of `g` for admissible primes up to
/// `bound`, computed in parallel over primes. Graphs with a loop or with a
/// component missing the special vertex vanish at every prime.
pub fn egp(g: &OrientedGraph, bound: u64, algorithm: Algorithm) -> Result<EgpSequence> {
    let spec = g.block_spec()?;
    let primes = admissible_primes(&spec, bound);
    if primes.is_empty() {
        return Err(Error::NoAdmissiblePrime(bound));
    }
    let vanishes = g.has_loops() || !g.is_connected();
    let results: Vec<(u64, Result<u64>)> =
        primes.par_iter().map(|&p| (p, if vanishes { Ok(0) } else { gperm(g, p, algorithm) })).collect();
    let mut values = Vec::new();
    let mut missing = Vec::new();
    for (p, r) in results {
        match r {
            Ok(residue) => {
                let n = spec.duplication_for(p).expect("admissible");
                values.push(EgpValue { prime: p, n, residue, variate: spec.is_variate(p) });
            }
            Err(e) => missing.push(MissingValue { prime: p, reason: e.to_string() }),
        }
    }
    Ok(EgpSequence { graph: String::new(), spec, values, missing, canonicalized: false })
}

/// Flip every variate residue when the first nonzero variate residue `r`
/// has `r > p - r`. Fixed residues are untouched.
pub fn canonicalize_sign(s: &EgpSequence) -> EgpSequence {
    let mut out = s.clone();
    let flip = s.values.iter().find(|v| v.variate && v.residue != 0).is_some_and(|v| v.residue > v.prime - v.residue);
    if flip {
        for v in out.values.iter_mut().filter(|v| v.variate) {
            v.residue = (v.prime - v.residue) % v.prime;
        }
    }
    out.canonicalized = true;
    out
}

/// Canonical forms agree at every prime present in both sequences.
pub fn sequences_equal(a: &EgpSequence, b: &EgpSequence) -> Result<bool> {
    if a.spec.vertex_reps != b.spec.vertex_reps {
        return Err(Error::MismatchedPrimes(a.spec.vertex_reps, b.spec.vertex_reps));
    }
    let (ca, cb) = (canonicalize_sign(a), canonicalize_sign(b));
    // Canonicalization depends on the first variate prime, so compare on the
    // common primes only after restricting both sequences to them.
    let common: Vec<u64> = ca.primes().into_iter().filter(|p| cb.residue_at(*p).is_some()).collect();
    let restrict = |s: &EgpSequence| {
        let mut t = s.clone();
        t.values.retain(|v| common.contains(&v.prime));
        canonicalize_sign(&t)
    };
    Ok(restrict(&ca).residues() == restrict(&cb).residues())
}

fn odd_prime_half(p: u64) -> Result<u64> {
    if p.is_multiple_of(2) {
        return Err(Error::EvenPrime(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok((p - 1) / 2)
}

/// Trees: `(-1)^{|V|-1} mod p`.
pub fn closed_form_tree(vertex_count: usize, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if vertex_count == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(sign_mod(vertex_count as u64 - 1, p))
}

/// Wheels with `w` spokes at `p = 2n+1`:
/// `(-1)^w Σ_k (-1)^{kw} C(n,k)^w mod p`.
pub fn closed_form_wheel(w: usize, p: u64) -> Result<u64> {
    if w < 3 {
        return Err(Error::InvalidFamily(format!("wheel needs at least 3 spokes, got {w}")));
    }
    let n = odd_prime_half(p)?;
    let f = Factorials::new(p);
    let w = w as u64;
    let mut total = 0u64;
    for k in 0..=n {
        let term = mul_mod(sign_mod(k * w, p), pow_mod(f.binom(n, k), w, p), p);
        total = (total + term) % p;
    }
    Ok(mul_mod(sign_mod(w, p), total, p))
}

/// Zig-zags on `m` vertices at `p = 2n+1`:
/// `(-1)^{m-1} Σ_{k_1+..+k_{m-1}=n} Π C(n,k_i) Π_{i=1}^{m-3} C(n-k_{i+1}, k_1+..+k_i)`.
pub fn closed_form_zigzag(m: usize, p: u64) -> Result<u64> {
    if m < 4 {
        return Err(Error::InvalidFamily(format!("zig-zag needs at least 4 vertices, got {m}")));
    }
    let n = odd_prime_half(p)?;
    let f = Factorials::new(p);
    let parts = m - 1;
    let mut ks = vec![0u64; parts];
    let mut total = 0u64;
    zigzag_rec(&f, n, parts, 0, n, &mut ks, &mut total);
    Ok(mul_mod(sign_mod(parts as u64, p), total, p))
}

fn zigzag_rec(f: &Factorials, n: u64, parts: usize, i: usize, left: u64, ks: &mut [u64], total: &mut u64) {
    let p = f.prime();
    if i + 1 == parts {
        ks[i] = left;
        let mut term = 1u64;
        for &k in ks.iter() {
            term = mul_mod(term, f.binom(n, k), p);
        }
        let mut prefix = 0u64;
        for j in 0..parts.saturating_sub(2) {
            prefix += ks[j];
            let top = n - ks[j + 1];
            term = mul_mod(term, f.binom(top, prefix), p);
            if term == 0 {
                return;
            }
        }
        *total = (*total + term) % p;
        return;
    }
    for k in 0..=left {
        ks[i] = k;
        zigzag_rec(f, n, parts, i + 1, left - k, ks, total);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate_family, Family, TreeShape};

    #[test]
    fn prime_sets() {
        assert_eq!(
            admissible_primes(&BlockSpec::from_counts(4, 6), 41),
            vec![3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41]
        );
        assert_eq!(admissible_primes(&BlockSpec::from_counts(4, 3), 7), vec![2, 3, 5, 7]);
        assert_eq!(admissible_primes(&BlockSpec::from_counts(5, 10), 71), vec![11, 31, 41, 61, 71]);
    }

    #[test]
    fn banana_row() {
        let g = generate_family(&Family::Banana(2)).unwrap();
        let s = canonicalize_sign(&egp(&g, 13, Algorithm::Direct).unwrap());
        assert_eq!(s.residues(), vec![1, 4, 1, 1, 12]);
    }

    #[test]
    fn star_tree_is_minus_one() {
        let g = generate_family(&Family::Tree(TreeShape::Star(4))).unwrap();
        for alg in [Algorithm::Direct, Algorithm::Cofactor] {
            let s = egp(&g, 7, alg).unwrap();
            assert_eq!(s.primes(), vec![2, 3, 5, 7]);
            assert_eq!(s.residues(), vec![1, 2, 4, 6]);
        }
    }

    #[test]
    fn canonical_sign_rules() {
        let spec = BlockSpec::from_counts(2, 2);
        let raw = EgpSequence::from_residues("banana", spec, &[(3, 2), (5, 4), (7, 6)]).unwrap();
        assert_eq!(canonicalize_sign(&raw).residues(), vec![1, 4, 1]);
        let zeros = EgpSequence::from_residues("z", spec, &[(3, 0), (5, 0)]).unwrap();
        assert_eq!(canonicalize_sign(&zeros).residues(), vec![0, 0]);
        // No variate primes at all: untouched.
        let fixed = EgpSequence::from_residues("c", BlockSpec::from_counts(3, 6), &[(7, 6), (13, 5)]).unwrap();
        assert!(fixed.values.iter().all(|v| !v.variate));
        assert_eq!(canonicalize_sign(&fixed).residues(), vec![6, 5]);
    }

    #[test]
    fn disconnected_and_looped_graphs_vanish() {
        let g = OrientedGraph::from_undirected(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], 0).unwrap();
        assert!(egp(&g, 13, Algorithm::Auto).unwrap().residues().iter().all(|&r| r == 0));
        let l = OrientedGraph::from_pairs(2, &[(0, 1), (1, 1)], 0).unwrap();
        assert!(egp(&l, 13, Algorithm::Direct).unwrap().residues().iter().all(|&r| r == 0));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_tree(2, 5).unwrap(), 4);
        assert_eq!(closed_form_tree(3, 7).unwrap(), 1);
        assert_eq!(closed_form_wheel(4, 5).unwrap(), 3);
        assert_eq!(closed_form_wheel(3, 13).unwrap(), 3);
        for p in [3u64, 7, 11, 19, 23] {
            assert_eq!(closed_form_wheel(3, p).unwrap(), 0);
        }
        assert_eq!(closed_form_zigzag(4, 5).unwrap(), 1);
        assert!(matches!(closed_form_wheel(4, 2), Err(Error::EvenPrime(2))));
        assert!(matches!(closed_form_zigzag(4, 9), Err(Error::NotPrime(9))));
    }

    #[test]
    fn mismatched_prime_sets() {
        let a = EgpSequence::from_residues("a", BlockSpec::from_counts(2, 2), &[(3, 1)]).unwrap();
        let b = EgpSequence::from_residues("b", BlockSpec::from_counts(3, 6), &[(7, 1)]).unwrap();
        assert!(sequences_equal(&a, &b).is_err());
        assert!(sequences_equal(&a, &a).unwrap());
    }
}
