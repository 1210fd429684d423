//! Permanent kernels.
//!
//! - [`perm_exact`] / [`perm_mod`]: Ryser's inclusion-exclusion with Gray-code
//!   subset updates on an explicit matrix.
//! - [`block_perm_mod`]: the same formula for matrices whose rows and columns
//!   come in repeated classes. Subsets that pick the same number of copies of
//!   every column class contribute identical terms, so they are summed once
//!   with a binomial weight.
//! - [`gperm_direct`], [`gperm_reduced`], [`gperm_cofactor`]: the three
//!   graph-level algorithms for `Perm(1_{nV x nE} ⊗ M) mod p`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{is_prime, mul_mod, pow_mod, reduce, sign_mod, Factorials, PascalTable};
use crate::error::{Error, Result};
use crate::graph::{BlockSpec, OrientedGraph};
use crate::weighted::WeightedState;

/// Default ceiling on Ryser work, as log2 of the number of subset terms.
/// For an unstructured matrix this is the column count.
pub const DEFAULT_RYSER_CAP: u32 = 28;
/// Hard ceiling for [`perm_exact`].
pub const EXACT_DIMENSION_CAP: usize = 30;

/// Ryser cap, overridable through `EGP_RYSER_CAP`.
pub fn ryser_cap() -> u32 {
    std::env::var("EGP_RYSER_CAP").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_RYSER_CAP)
}

fn check_square(m: &[Vec<i64>]) -> Result<usize> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::NotSquare { rows: n, cols: row.len() });
        }
    }
    Ok(n)
}

/// Index of the bit flipped between Gray codes `k-1` and `k`.
#[inline]
fn gray_flip(k: u64) -> usize {
    k.trailing_zeros() as usize
}

/// Exact permanent over the integers.
pub fn perm_exact(m: &[Vec<i64>]) -> Result<BigInt> {
    let n = check_square(m)?;
    if n > EXACT_DIMENSION_CAP {
        return Err(Error::CapExceeded {
            what: "exact permanent dimension",
            needed: n as u64,
            cap: EXACT_DIMENSION_CAP as u64,
        });
    }
    if n == 0 {
        return Ok(BigInt::from(1));
    }
    let mut sums = vec![0i64; n];
    let mut in_set = vec![false; n];
    let mut fast: i128 = 0;
    let mut slow = BigInt::zero();
    for k in 1u64..(1u64 << n) {
        let j = gray_flip(k);
        in_set[j] = !in_set[j];
        let delta = if in_set[j] { 1 } else { -1 };
        for (s, row) in sums.iter_mut().zip(m) {
            *s += delta * row[j];
        }
        let size = k ^ (k >> 1);
        let negative = (n as u32 - size.count_ones()) % 2 == 1;
        let mut prod: Option<i128> = Some(1);
        for &s in &sums {
            prod = prod.and_then(|p| p.checked_mul(s as i128));
            if prod == Some(0) {
                break;
            }
        }
        match prod {
            Some(0) => {}
            Some(p) => {
                let p = if negative { -p } else { p };
                match fast.checked_add(p) {
                    Some(v) => fast = v,
                    None => {
                        slow += BigInt::from(fast) + BigInt::from(p);
                        fast = 0;
                    }
                }
            }
            None => {
                let mut big = BigInt::from(1);
                for &s in &sums {
                    big *= s;
                }
                if negative {
                    slow -= big;
                } else {
                    slow += big;
                }
            }
        }
    }
    Ok(slow + BigInt::from(fast))
}

/// Permanent modulo `modulus` (any modulus >= 2; no inverses are used).
pub fn perm_mod(m: &[Vec<i64>], modulus: u64) -> Result<u64> {
    let n = check_square(m)?;
    let cap = ryser_cap();
    if n as u32 > cap {
        return Err(Error::CapExceeded { what: "Ryser columns", needed: n as u64, cap: cap as u64 });
    }
    if n == 0 {
        return Ok(1 % modulus);
    }
    let rows: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| reduce(x, modulus)).collect()).collect();
    let mut sums = vec![0u64; n];
    let mut in_set = vec![false; n];
    let mut total = 0u64;
    for k in 1u64..(1u64 << n) {
        let j = gray_flip(k);
        in_set[j] = !in_set[j];
        for (s, row) in sums.iter_mut().zip(&rows) {
            *s = if in_set[j] { (*s + row[j]) % modulus } else { (*s + modulus - row[j]) % modulus };
        }
        let mut prod = 1u64;
        for &s in &sums {
            prod = mul_mod(prod, s, modulus);
            if prod == 0 {
                break;
            }
        }
        let size = (k ^ (k >> 1)).count_ones();
        if (n as u32 - size) % 2 == 1 {
            total = (total + modulus - prod) % modulus;
        } else {
            total = (total + prod) % modulus;
        }
    }
    Ok(total)
}

/// `1_{row_reps x col_reps} ⊗ base`, stored unmaterialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMatrix {
    pub base: Vec<Vec<i64>>,
    pub row_reps: u64,
    pub col_reps: u64,
}

impl BlockMatrix {
    pub fn new(base: Vec<Vec<i64>>, row_reps: u64, col_reps: u64) -> Self {
        Self { base, row_reps, col_reps }
    }

    pub fn base_rows(&self) -> usize {
        self.base.len()
    }

    pub fn base_cols(&self) -> usize {
        self.base.first().map_or(0, Vec::len)
    }

    pub fn dims(&self) -> (u64, u64) {
        (self.base_rows() as u64 * self.row_reps, self.base_cols() as u64 * self.col_reps)
    }

    pub fn is_square(&self) -> bool {
        let (r, c) = self.dims();
        r == c
    }

    /// Explicit Kronecker product; block `(a, b)` is a copy of `base`.
    pub fn materialize(&self) -> Vec<Vec<i64>> {
        let (r, c) = (self.base_rows(), self.base_cols());
        let mut out = Vec::with_capacity(r * self.row_reps as usize);
        for _ in 0..self.row_reps {
            for row in &self.base {
                let mut full = Vec::with_capacity(c * self.col_reps as usize);
                for _ in 0..self.col_reps {
                    full.extend_from_slice(row);
                }
                out.push(full);
            }
        }
        out
    }

    /// Permanent mod `modulus` without materializing.
    pub fn perm_mod(&self, modulus: u64) -> Result<u64> {
        if !self.is_square() {
            let (rows, cols) = self.dims();
            return Err(Error::NotSquare { rows: rows as usize, cols: cols as usize });
        }
        let rm = vec![self.row_reps; self.base_rows()];
        let cm = vec![self.col_reps; self.base_cols()];
        block_perm_mod(&self.base, &rm, &cm, modulus)
    }
}

/// Merge identical rows of `base`, adding their multiplicities.
fn merge_rows(base: &[Vec<i64>], mult: &[u64]) -> (Vec<Vec<i64>>, Vec<u64>) {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut m: Vec<u64> = Vec::new();
    for (row, &k) in base.iter().zip(mult) {
        if k == 0 {
            continue;
        }
        match rows.iter().position(|r| r == row) {
            Some(i) => m[i] += k,
            None => {
                rows.push(row.clone());
                m.push(k);
            }
        }
    }
    (rows, m)
}

fn transpose(base: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    (0..cols).map(|j| base.iter().map(|r| r[j]).collect()).collect()
}

/// log2 of `prod (m_i + 1)`, saturating.
fn log2_terms(mult: &[u64]) -> f64 {
    mult.iter().map(|&m| ((m + 1) as f64).log2()).sum()
}

/// Permanent mod `modulus` of the matrix in which row `i` of `base` appears
/// `row_mult[i]` times and column `j` appears `col_mult[j]` times.
///
/// Ryser's formula grouped by how many copies of each column class a subset
/// takes: `(-1)^N Σ_s Π_j C(c_j, s_j) (-1)^{s_j} Π_i (Σ_j b_ij s_j)^{r_i}`.
/// The sum runs over whichever side has fewer grouped terms; the counts `s`
/// follow a reflected mixed-radix Gray code so each step moves one class.
pub fn block_perm_mod(base: &[Vec<i64>], row_mult: &[u64], col_mult: &[u64], modulus: u64) -> Result<u64> {
    let cols = base.first().map_or(col_mult.len(), Vec::len);
    if base.len() != row_mult.len() || cols != col_mult.len() {
        return Err(Error::Internal("multiplicity vectors do not match base".into()));
    }
    let n_rows: u64 = row_mult.iter().sum();
    let n_cols: u64 = col_mult.iter().sum();
    if n_rows != n_cols {
        return Err(Error::NotSquare { rows: n_rows as usize, cols: n_cols as usize });
    }
    if n_rows == 0 {
        return Ok(1 % modulus);
    }
    let (rows, rmult) = merge_rows(base, row_mult);
    let t = transpose(&rows, cols);
    let (cols_m, cmult) = merge_rows(&t, col_mult);
    // cols_m[j] is column class j as a vector over merged rows.
    let row_terms = log2_terms(&rmult);
    let col_terms = log2_terms(&cmult);
    let cap = ryser_cap() as f64;
    let best = row_terms.min(col_terms);
    if best > cap + 1e-9 {
        return Err(Error::CapExceeded { what: "Ryser log2 terms", needed: best.ceil() as u64, cap: cap as u64 });
    }
    if col_terms <= row_terms {
        // Sum over column-count vectors; products over row classes.
        Ok(grouped_ryser(&cols_m, &cmult, &rmult, n_rows, modulus))
    } else {
        // Rows over the merged column classes.
        let by_row = transpose(&cols_m, rows.len());
        Ok(grouped_ryser(&by_row, &rmult, &cmult, n_rows, modulus))
    }
}

/// `summed[j]` is the vector (over product classes) of summed class `j`.
fn grouped_ryser(summed: &[Vec<i64>], summed_mult: &[u64], product_mult: &[u64], n: u64, modulus: u64) -> u64 {
    let k = summed.len();
    let r = product_mult.len();
    let max_mult = summed_mult.iter().copied().max().unwrap_or(0) as usize;
    let pascal = PascalTable::new(max_mult, modulus);
    let col: Vec<Vec<u64>> = summed.iter().map(|v| v.iter().map(|&x| reduce(x, modulus)).collect()).collect();
    let mut digits = vec![0u64; k];
    let mut up = vec![true; k];
    let mut sums = vec![0u64; r];
    let mut total = 0u64;
    let mut parity = 0u64;
    loop {
        let mut weight = 1 % modulus;
        for j in 0..k {
            weight = mul_mod(weight, pascal.binom(summed_mult[j] as usize, digits[j] as usize), modulus);
            if weight == 0 {
                break;
            }
        }
        if weight != 0 {
            let mut prod = weight;
            for i in 0..r {
                prod = mul_mod(prod, pow_mod(sums[i], product_mult[i], modulus), modulus);
                if prod == 0 {
                    break;
                }
            }
            if (parity + n) % 2 == 1 {
                total = (total + modulus - prod) % modulus;
            } else {
                total = (total + prod) % modulus;
            }
        }
        // Advance the reflected Gray code.
        let mut j = 0;
        while j < k {
            let can = if up[j] { digits[j] < summed_mult[j] } else { digits[j] > 0 };
            if can {
                break;
            }
            up[j] = !up[j];
            j += 1;
        }
        if j == k {
            break;
        }
        if up[j] {
            digits[j] += 1;
            for (s, &c) in sums.iter_mut().zip(&col[j]) {
                *s = (*s + c) % modulus;
            }
        } else {
            digits[j] -= 1;
            for (s, &c) in sums.iter_mut().zip(&col[j]) {
                *s = (*s + modulus - c) % modulus;
            }
        }
        parity ^= 1;
    }
    total
}

/// Check `p` is prime and admissible for `spec`; return `n` with `p = n V + 1`.
pub fn admissible_duplication(spec: &BlockSpec, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    spec.duplication_for(p).ok_or(Error::NotAdmissible { prime: p, vertex_reps: spec.vertex_reps })
}

/// The fundamental block matrix of `g` duplicated for prime `p`.
pub fn block_matrix_for(g: &OrientedGraph, p: u64) -> Result<BlockMatrix> {
    let spec = g.block_spec()?;
    let n = admissible_duplication(&spec, p)?;
    let m = g.reduced_incidence()?;
    Ok(BlockMatrix::new(m.rows, n * spec.vertex_reps, n * spec.edge_reps))
}

/// `Perm(1_{nV x nE} ⊗ M_G) mod p` by grouped Ryser on the full block matrix.
pub fn gperm_direct(g: &OrientedGraph, p: u64) -> Result<u64> {
    block_matrix_for(g, p)?.perm_mod(p)
}

/// `Perm(1_{k x m} ⊗ M_G) mod (k+1)` for any modulus, prime or not, or
/// `None` when no `m` makes the fundamental matrix square.
pub fn fundamental_perm_mod(g: &OrientedGraph, k: u64) -> Result<Option<u64>> {
    let m = g.reduced_incidence()?;
    let (rows, cols) = (m.row_count() as u64, m.cols as u64);
    if k == 0 || cols == 0 || !(k * rows).is_multiple_of(cols) {
        return Ok(None);
    }
    BlockMatrix::new(m.rows, k, k * rows / cols).perm_mod(k + 1).map(Some)
}

/// Result of blockwise row reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedBlock {
    /// Base in `[I_r | A]` form, entries in the symmetric range mod p.
    pub matrix: BlockMatrix,
    /// Original column index of each reduced column.
    pub column_order: Vec<usize>,
    /// True when every row scaling was by `-1` (or not needed).
    pub unit_scalings_only: bool,
}

impl ReducedBlock {
    pub fn rank(&self) -> usize {
        self.matrix.base_rows()
    }

    /// The `A` block of `[I_r | A]`.
    pub fn right_block(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        self.matrix.base.iter().map(|row| row[r..].to_vec()).collect()
    }
}

/// Row reduce the base of `bm` to `[I_r | A]` over F_p, acting on every
/// block copy of a row at once. Needs `row_reps = p - 1`, under which
/// adding multiples of rows, swapping rows and scaling rows all leave the
/// permanent unchanged mod p.
pub fn blockwise_row_reduce(bm: &BlockMatrix, p: u64) -> Result<ReducedBlock> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if bm.row_reps + 1 != p {
        return Err(Error::ReductionModulus { row_reps: bm.row_reps, prime: p });
    }
    let rows = bm.base_rows();
    let cols = bm.base_cols();
    let mut a: Vec<Vec<u64>> = bm.base.iter().map(|r| r.iter().map(|&x| reduce(x, p)).collect()).collect();
    let mut pivots = Vec::with_capacity(rows);
    let mut unit_only = true;
    for c in 0..cols {
        let rank = pivots.len();
        if rank == rows {
            break;
        }
        let candidates: Vec<usize> = (rank..rows).filter(|&r| a[r][c] != 0).collect();
        let Some(&pr) = candidates.iter().find(|&&r| a[r][c] == 1 || a[r][c] == p - 1).or(candidates.first()) else {
            continue;
        };
        a.swap(rank, pr);
        let piv = a[rank][c];
        if piv != 1 {
            if piv != p - 1 {
                unit_only = false;
            }
            let inv = crate::arith::inv_mod(piv, p).expect("nonzero residue mod prime");
            for x in a[rank].iter_mut() {
                *x = mul_mod(*x, inv, p);
            }
        }
        let pivot_row = a[rank].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == rank || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = (*x + p - mul_mod(f, y, p)) % p;
            }
        }
        pivots.push(c);
    }
    if pivots.len() < rows {
        return Err(Error::RankDeficient { rank: pivots.len(), rows });
    }
    let mut column_order = pivots.clone();
    column_order.extend((0..cols).filter(|c| !pivots.contains(c)));
    let symmetric = |x: u64| -> i64 {
        if x > p / 2 {
            x as i64 - p as i64
        } else {
            x as i64
        }
    };
    let base = a.iter().map(|row| column_order.iter().map(|&c| symmetric(row[c])).collect()).collect();
    Ok(ReducedBlock {
        matrix: BlockMatrix::new(base, bm.row_reps, bm.col_reps),
        column_order,
        unit_scalings_only: unit_only,
    })
}

/// Permanent of `1_{(nV - nE) x nE} ⊗ A` mod p: grouped Ryser within the cap,
/// the weighted-state calculus beyond it.
fn reduced_remainder(a: &[Vec<i64>], rows_each: u64, cols_each: u64, p: u64) -> Result<u64> {
    let r = a.len();
    let c = a.first().map_or(0, Vec::len);
    if r * rows_each as usize != c * cols_each as usize {
        return Err(Error::NotSquare { rows: r * rows_each as usize, cols: c * cols_each as usize });
    }
    if c == 0 || rows_each == 0 {
        return Ok(1 % p);
    }
    let rm = vec![rows_each; r];
    let cm = vec![cols_each; c];
    match block_perm_mod(a, &rm, &cm, p) {
        Err(Error::CapExceeded { .. }) => {
            let state = WeightedState::from_matrix(a, &rm, &cm, p)?;
            crate::weighted::cofactor_calculus(&state)
        }
        other => other,
    }
}

/// `((nV)!/(nV-nE)!)^{|V|-1} · Perm(1_{(nV-nE) x nE} ⊗ A) mod p` after
/// reducing `M_G` to `[I | A]`.
pub fn gperm_reduced(g: &OrientedGraph, p: u64) -> Result<u64> {
    let bm = block_matrix_for(g, p)?;
    let reduced = blockwise_row_reduce(&bm, p)?;
    let f = Factorials::new(p);
    let vr = bm.row_reps;
    let er = bm.col_reps;
    if er > vr {
        return Err(Error::Internal("more column copies than row copies".into()));
    }
    let r = reduced.rank() as u64;
    let prefactor = pow_mod(f.falling(vr, er), r, p);
    if prefactor == 0 {
        return Ok(0);
    }
    let rest = reduced_remainder(&reduced.right_block(), vr - er, er, p)?;
    Ok(mul_mod(prefactor, rest, p))
}

/// `Perm(1_{nV x nE} ⊗ M_G) mod p` by the weighted-graph cofactor calculus.
pub fn gperm_cofactor(g: &OrientedGraph, p: u64) -> Result<u64> {
    let state = WeightedState::from_graph(g, p)?;
    crate::weighted::cofactor_calculus(&state)
}

/// `(-1)^k` helper re-exported for closed forms.
pub fn sign(k: u64, p: u64) -> u64 {
    sign_mod(k, p)
}
