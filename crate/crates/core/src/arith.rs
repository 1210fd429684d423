//! Residue arithmetic shared by the permanent kernels and the closed forms.

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce(x: i64, m: u64) -> u64 {
    let r = x.rem_euclid(m as i64);
    r as u64
}

/// Reduce a signed 128-bit integer into `[0, m)`.
#[inline]
pub fn reduce_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

#[inline]
pub fn neg_mod(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `(-1)^e` as a residue mod `m`.
#[inline]
pub fn sign_mod(e: u64, m: u64) -> u64 {
    if e.is_multiple_of(2) {
        1 % m
    } else {
        m - 1
    }
}

/// Modular inverse via the extended Euclidean algorithm; `None` when not a unit.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes `<= bound`, by sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `n! mod m` by direct product. Works for any modulus.
pub fn factorial_mod(n: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    for i in 2..=n {
        acc = mul_mod(acc, i % m, m);
        if acc == 0 {
            break;
        }
    }
    acc
}

/// Binomial coefficients modulo an arbitrary (possibly composite) modulus,
/// from Pascal's triangle. Used where no inverses are available.
#[derive(Debug, Clone)]
pub struct PascalTable {
    modulus: u64,
    rows: Vec<Vec<u64>>,
}

impl PascalTable {
    pub fn new(max_n: usize, modulus: u64) -> Self {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![1 % modulus; n + 1];
            for k in 1..n {
                row[k] = add_mod(rows[n - 1][k - 1], rows[n - 1][k], modulus);
            }
            rows.push(row);
        }
        Self { modulus, rows }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn binom(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.rows[n][k]
        }
    }
}

/// Factorials and inverse factorials modulo a prime `p`, for arguments below `p`.
/// Larger arguments go through Lucas' theorem or direct products.
#[derive(Debug, Clone)]
pub struct Factorials {
    p: u64,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl Factorials {
    /// Tables for the prime `p` (entries `0..p`).
    pub fn new(p: u64) -> Self {
        debug_assert!(is_prime(p), "factorial tables need a prime modulus");
        let n = p as usize;
        let mut fact = vec![1u64; n];
        for i in 1..n {
            fact[i] = mul_mod(fact[i - 1], i as u64, p);
        }
        let mut inv_fact = vec![1u64; n];
        inv_fact[n - 1] = inv_mod(fact[n - 1], p).expect("(p-1)! is a unit");
        for i in (1..n).rev() {
            inv_fact[i - 1] = mul_mod(inv_fact[i], i as u64, p);
        }
        Self { p, fact, inv_fact }
    }

    #[inline]
    pub fn prime(&self) -> u64 {
        self.p
    }

    /// `x! mod p`; zero once `x >= p`.
    #[inline]
    pub fn fact(&self, x: u64) -> u64 {
        if x >= self.p {
            0
        } else {
            self.fact[x as usize]
        }
    }

    /// `(x!)^{-1} mod p`, `None` when `x >= p`.
    #[inline]
    pub fn inv_fact(&self, x: u64) -> Option<u64> {
        if x >= self.p {
            None
        } else {
            Some(self.inv_fact[x as usize])
        }
    }

    /// `x (x-1) ... (x-k+1) mod p`.
    pub fn falling(&self, x: u64, k: u64) -> u64 {
        if k > x {
            return 0;
        }
        if x < self.p {
            return mul_mod(self.fact[x as usize], self.inv_fact[(x - k) as usize], self.p);
        }
        let mut acc = 1u64;
        for i in 0..k {
            acc = mul_mod(acc, (x - i) % self.p, self.p);
            if acc == 0 {
                break;
            }
        }
        acc
    }

    /// `C(n, k) mod p` for nonnegative arguments, via Lucas for `n >= p`.
    pub fn binom(&self, mut n: u64, mut k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut acc = 1u64;
        while n > 0 || k > 0 {
            let (a, b) = (n % self.p, k % self.p);
            if b > a {
                return 0;
            }
            let c = mul_mod(
                self.fact[a as usize],
                mul_mod(self.inv_fact[b as usize], self.inv_fact[(a - b) as usize], self.p),
                self.p,
            );
            acc = mul_mod(acc, c, self.p);
            n /= self.p;
            k /= self.p;
        }
        acc
    }

    /// `C(n, k)` extended by zero to negative or out-of-range arguments.
    pub fn binom_signed(&self, n: i64, k: i64) -> u64 {
        if n < 0 || k < 0 || k > n {
            0
        } else {
            self.binom(n as u64, k as u64)
        }
    }
}

/// Wilson's criterion: `n > 1` is prime iff `(n-1)! ≡ -1 (mod n)`.
pub fn wilson_holds(n: u64) -> bool {
    n > 1 && factorial_mod(n - 1, n) == n - 1
}

/// `a! · b! mod j` for `j = a + b + 1`. For prime `j` this equals `(-1)^b (j-1)!`.
pub fn split_factorial_product(a: u64, b: u64) -> (u64, u64) {
    let j = a + b + 1;
    let lhs = mul_mod(factorial_mod(a, j), factorial_mod(b, j), j);
    let rhs = mul_mod(sign_mod(b, j), factorial_mod(j - 1, j), j);
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_wilson_agree() {
        for n in 2..=101u64 {
            assert_eq!(is_prime(n), wilson_holds(n), "n = {n}");
        }
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn split_factorial_identity_for_prime_moduli() {
        for j in primes_up_to(101).into_iter().filter(|&j| j >= 3) {
            for a in 1..j - 1 {
                let (lhs, rhs) = split_factorial_product(a, j - 1 - a);
                assert_eq!(lhs, rhs, "j = {j}, a = {a}");
            }
        }
    }

    #[test]
    fn half_factorial_square() {
        // n!^2 is -1 mod 2n+1 for even n and 1 for odd n.
        for p in primes_up_to(101).into_iter().filter(|&p| p >= 3) {
            let n = (p - 1) / 2;
            let sq = pow_mod(factorial_mod(n, p), 2, p);
            let expected = if n % 2 == 0 { p - 1 } else { 1 };
            assert_eq!(sq, expected, "p = {p}");
        }
    }

    #[test]
    fn lucas_binomials_match_pascal() {
        let f = Factorials::new(7);
        let t = PascalTable::new(60, 7);
        for n in 0..=60u64 {
            for k in 0..=n {
                assert_eq!(f.binom(n, k), t.binom(n as usize, k as usize));
            }
        }
        assert_eq!(f.binom_signed(-3, 1), 0);
        assert_eq!(f.binom_signed(3, -1), 0);
        assert_eq!(f.binom_signed(3, 4), 0);
    }

    #[test]
    fn falling_factorials() {
        let f = Factorials::new(13);
        assert_eq!(f.falling(5, 2), 20 % 13);
        assert_eq!(f.falling(20, 3), (20 * 19 * 18) % 13);
        assert_eq!(f.falling(3, 4), 0);
        assert_eq!(inv_mod(4, 7), Some(2));
        assert_eq!(inv_mod(4, 8), None);
    }
}
