//! Permanents as polynomial coefficients and point counts.
//!
//! For the fundamental block matrix of `G` the permanent function is
//! `F = Π_i ℓ_i^V`, one linear form `ℓ_i` per non-special vertex over the
//! `L` column variables. `F̃ = Π_i ℓ_i(y_1^V, ..., y_L^V)` has degree `L` in
//! `L` variables. At `p = rV + 1`:
//!
//! - `GPerm = r!^L [(x_1..x_L)^r] F^r = r!^L [(y_1..y_L)^{p-1}] F̃^{p-1}` exactly;
//! - the Chevalley–Warning argument relates the last coefficient to the
//!   number `[F̃]_p` of zeros of `F̃` over `F_p`:
//!   `[(y)^{p-1}] F̃^{p-1} ≡ (-1)^{L+1} [F̃]_p (mod p)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorial_mod, is_prime, mul_mod, pow_mod, reduce, sign_mod};
use crate::error::{Error, Result};
use crate::graph::OrientedGraph;
use crate::perm::{admissible_duplication, gperm_direct};

/// Largest coefficient table for the dense expansion.
pub const COEFFICIENT_TABLE_CAP: u64 = 1 << 24;
/// Largest number of points enumerated by [`point_count`].
pub const POINT_COUNT_CAP: u64 = 100_000_000;

/// `F = Π_i ℓ_i^multiplicity`; `F̃` substitutes `y_j^tilde_exponent` for `x_j`
/// in `Π_i ℓ_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFormProduct {
    /// One coefficient vector (length `L`) per non-special vertex.
    pub forms: Vec<Vec<i64>>,
    pub multiplicity: u64,
    pub tilde_exponent: u64,
}

impl LinearFormProduct {
    pub fn variable_count(&self) -> usize {
        self.forms.first().map_or(0, Vec::len)
    }

    /// Total degree of `F` (and of `F̃`).
    pub fn degree(&self) -> u64 {
        self.forms.len() as u64 * self.multiplicity
    }

    /// Value of `F̃` at `y` modulo `p`.
    pub fn eval_tilde(&self, y: &[u64], p: u64) -> u64 {
        let powers: Vec<u64> = y.iter().map(|&v| pow_mod(v, self.tilde_exponent, p)).collect();
        let mut acc = 1 % p;
        for f in &self.forms {
            let mut s = 0u64;
            for (&c, &x) in f.iter().zip(&powers) {
                s = (s + mul_mod(reduce(c, p), x, p)) % p;
            }
            acc = mul_mod(acc, s, p);
        }
        acc
    }
}

/// Permanent function of the fundamental block matrix of `g`: columns are
/// edges repeated `E` times (copies of edge `e` are variables
/// `e*E .. (e+1)*E`), and every row form carries multiplicity `V`.
pub fn permanent_polynomial(g: &OrientedGraph) -> Result<LinearFormProduct> {
    let spec = g.block_spec()?;
    let m = g.reduced_incidence()?;
    let reps = spec.edge_reps as usize;
    let forms = m.rows.iter().map(|row| row.iter().flat_map(|&c| std::iter::repeat_n(c, reps)).collect()).collect();
    Ok(LinearFormProduct { forms, multiplicity: spec.vertex_reps, tilde_exponent: spec.vertex_reps })
}

/// `[(x_1..x_n)^r] Π_i ℓ_i^{k}` modulo `p`, by dense expansion with every
/// exponent capped at `r`.
fn capped_coefficient_mod(forms: &[Vec<i64>], power_each: u64, r: u64, p: u64) -> Result<u64> {
    let n = forms.first().map_or(0, Vec::len);
    let radix = r + 1;
    let size = radix.checked_pow(n as u32).filter(|&s| s <= COEFFICIENT_TABLE_CAP).ok_or(Error::CapExceeded {
        what: "coefficient table entries",
        needed: radix.saturating_pow(n as u32),
        cap: COEFFICIENT_TABLE_CAP,
    })? as usize;
    let strides: Vec<usize> = (0..n).map(|j| radix.pow(j as u32) as usize).collect();
    let mut poly = vec![0u64; size];
    poly[0] = 1 % p;
    let mut next = vec![0u64; size];
    for form in forms {
        let coeffs: Vec<u64> = form.iter().map(|&c| reduce(c, p)).collect();
        for _ in 0..power_each {
            next.iter_mut().for_each(|x| *x = 0);
            for (idx, &v) in poly.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                for j in 0..n {
                    if coeffs[j] == 0 {
                        continue;
                    }
                    let e = (idx / strides[j]) as u64 % radix;
                    if e < r {
                        let t = idx + strides[j];
                        next[t] = (next[t] + mul_mod(v, coeffs[j], p)) % p;
                    }
                }
            }
            std::mem::swap(&mut poly, &mut next);
        }
    }
    Ok(poly[size - 1])
}

/// `[(y_1..y_L)^{p-1}] F̃^{p-1} mod p` for `p = rV + 1`.
pub fn tilde_coefficient(g: &OrientedGraph, p: u64) -> Result<u64> {
    let spec = g.block_spec()?;
    let r = admissible_duplication(&spec, p)?;
    let f = permanent_polynomial(g)?;
    // Exponents of F̃^{p-1} are multiples of V, so the y-expansion is the
    // x-expansion of Π ℓ_i^{rV} with exponents capped at r.
    capped_coefficient_mod(&f.forms, r * f.multiplicity, r, p)
}

/// `r!^L [(y_1..y_L)^{p-1}] F̃^{p-1} mod p`; equals the permanent residue.
pub fn coefficient_oracle(g: &OrientedGraph, p: u64) -> Result<u64> {
    let spec = g.block_spec()?;
    let r = admissible_duplication(&spec, p)?;
    let c = tilde_coefficient(g, p)?;
    Ok(mul_mod(pow_mod(factorial_mod(r, p), spec.l, p), c, p))
}

/// Exact `r!^n [(x_1..x_n)^r] F_A^r` for a square integer matrix `A`.
pub fn extension_coefficient(a: &[Vec<i64>], r: u64) -> Result<BigInt> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::NotSquare { rows: n, cols: a.first().map_or(0, Vec::len) });
    }
    let radix = r + 1;
    let size = radix.checked_pow(n as u32).filter(|&s| s <= COEFFICIENT_TABLE_CAP).ok_or(Error::CapExceeded {
        what: "coefficient table entries",
        needed: radix.saturating_pow(n as u32),
        cap: COEFFICIENT_TABLE_CAP,
    })? as usize;
    let strides: Vec<usize> = (0..n).map(|j| radix.pow(j as u32) as usize).collect();
    let mut poly = vec![BigInt::zero(); size];
    poly[0] = BigInt::one();
    for row in a {
        for _ in 0..r {
            let mut next = vec![BigInt::zero(); size];
            for (idx, v) in poly.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                for j in 0..n {
                    if row[j] != 0 && (idx / strides[j]) as u64 % radix < r {
                        next[idx + strides[j]] += v * row[j];
                    }
                }
            }
            poly = next;
        }
    }
    let mut rfact = BigInt::one();
    for k in 1..=r {
        rfact *= k;
    }
    Ok(num_traits::pow(rfact, n) * &poly[size - 1])
}

/// Number of zeros of `F̃` over `F_p` (any prime `p`), by enumeration.
pub fn point_count(g: &OrientedGraph, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let f = permanent_polynomial(g)?;
    count_zeros(&f, p)
}

/// Zeros of `F̃` over `F_p`, enumerated in odometer order with the first
/// coordinate split across workers.
pub fn count_zeros(f: &LinearFormProduct, p: u64) -> Result<u64> {
    let l = f.variable_count();
    let total = p.checked_pow(l as u32).filter(|&t| t <= POINT_COUNT_CAP).ok_or(Error::CapExceeded {
        what: "point count assignments",
        needed: p.saturating_pow(l as u32),
        cap: POINT_COUNT_CAP,
    })?;
    if l == 0 {
        return Ok(u64::from(f.forms.is_empty()) ^ 1);
    }
    let powers: Vec<u64> = (0..p).map(|a| pow_mod(a, f.tilde_exponent, p)).collect();
    let coeffs: Vec<Vec<u64>> = f.forms.iter().map(|r| r.iter().map(|&c| reduce(c, p)).collect()).collect();
    let count = (0..p)
        .into_par_iter()
        .map(|first| {
            let mut y = vec![0u64; l];
            y[0] = first;
            let mut zeros = 0u64;
            loop {
                let vanishes = coeffs.iter().any(|form| {
                    form.iter().zip(&y).fold(0u64, |s, (&c, &v)| (s + mul_mod(c, powers[v as usize], p)) % p) == 0
                });
                zeros += u64::from(vanishes);
                // Odometer over coordinates 1..l.
                let mut j = 1;
                while j < l {
                    y[j] += 1;
                    if y[j] < p {
                        break;
                    }
                    y[j] = 0;
                    j += 1;
                }
                if j == l {
                    break;
                }
            }
            zeros
        })
        .sum::<u64>();
    debug_assert!(count <= total);
    Ok(count)
}

/// `s` with `a ≡ s·b (mod p)`: `Some(1)`, `Some(-1)`, `Some(0)` when both
/// vanish (sign undetermined), or `None`.
pub fn sign_relation(a: u64, b: u64, p: u64) -> Option<i8> {
    let (a, b) = (a % p, b % p);
    if a == 0 && b == 0 {
        Some(0)
    } else if a == b {
        Some(1)
    } else if a == (p - b) % p {
        Some(-1)
    } else {
        None
    }
}

/// How the permanent, the coefficient chain and the point count relate at
/// one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconcileReport {
    pub prime: u64,
    pub variate: bool,
    /// `[(y)^{p-1}] F̃^{p-1} mod p`.
    pub coefficient: u64,
    /// `r!^L` times `coefficient`, mod p.
    pub coefficient_oracle: u64,
    pub gperm: u64,
    pub oracle_matches_gperm: bool,
    pub count: u64,
    pub count_mod_p: u64,
    /// `coefficient ≡ s · count`.
    pub coefficient_vs_count: Option<i8>,
    /// `gperm ≡ s · count`.
    pub gperm_vs_count: Option<i8>,
    /// Predicted sign linking `gperm` to `count` (graphs
    /// with `|E| = 2(|V|-1)` only): `+1` when `|E| ≡ 0 mod 4`, else `-1`.
    pub predicted_sign: Option<i8>,
    /// `gperm_vs_count` divided by `predicted_sign` when both are `±1`.
    pub empirical_sign: Option<i8>,
    /// `(-1)^{L+1} r!^L mod p`: the multiplier that makes
    /// `gperm ≡ multiplier · count` by the Chevalley–Warning chain.
    pub derived_multiplier: u64,
    pub derived_relation_holds: bool,
}

/// Compute both sides at `p` and report their sign relations.
pub fn reconcile(g: &OrientedGraph, p: u64) -> Result<ReconcileReport> {
    let spec = g.block_spec()?;
    let r = admissible_duplication(&spec, p)?;
    let coefficient = tilde_coefficient(g, p)?;
    let rl = pow_mod(factorial_mod(r, p), spec.l, p);
    let coefficient_oracle = mul_mod(rl, coefficient, p);
    let gperm = gperm_direct(g, p)?;
    let count = point_count(g, p)?;
    let count_mod_p = count % p;
    let derived_multiplier = mul_mod(sign_mod(spec.l + 1, p), rl, p);
    let gperm_vs_count = sign_relation(gperm, count_mod_p, p);
    let predicted_sign = spec.is_phi4_ratio().then(|| if g.edge_count().is_multiple_of(4) { 1 } else { -1 });
    let empirical_sign = match (gperm_vs_count, predicted_sign) {
        (Some(s), Some(t)) if s != 0 => Some(s * t),
        _ => None,
    };
    Ok(ReconcileReport {
        prime: p,
        variate: spec.is_variate(p),
        coefficient,
        coefficient_oracle,
        gperm,
        oracle_matches_gperm: coefficient_oracle == gperm,
        count,
        count_mod_p,
        coefficient_vs_count: sign_relation(coefficient, count_mod_p, p),
        gperm_vs_count,
        predicted_sign,
        empirical_sign,
        derived_multiplier,
        derived_relation_holds: gperm == mul_mod(derived_multiplier, count_mod_p, p),
    })
}
