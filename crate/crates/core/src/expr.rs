//! A small language for binomial-sum closed forms.
//!
//! ```text
//! # comment
//! EXPR P_5_1 VCAL 2
//! SUM x0..x1 IN 0..n {
//!   SIGN x1;
//!   BINOM(n, x0)^3 * BINOM(n, x1)^2 * BINOM(n, x0 + x1)
//! }
//! PREFACTOR fact(2n)^5
//! ```
//!
//! - `EXPR <name> VCAL <v>` starts an expression evaluated at primes
//!   `p = v*n + 1`.
//! - `SUM x0..xk [IN <lin>..<lin>] { [SIGN <lin>;] <factors> }` sums over
//!   every variable independently in the inclusive range (default `0..n`);
//!   at most five variables. The `SUM` block may be omitted.
//! - Factors are `BINOM(<lin>, <lin>)[^k]` joined by `*`; a binomial with a
//!   negative or out-of-range lower argument is zero.
//! - `PREFACTOR` is a `*`-separated list of `fact(<lin>)^<int>` (negative
//!   exponents mean inverses mod p) and `SIGN(<lin>)`.
//! - Linear forms combine integers, `n` and `x<i>` with `+`, `-` and
//!   integer coefficients (`2n`, `2*n`, `-x0`).

use crate::arith::{inv_mod, mul_mod, pow_mod, sign_mod, Factorials};
use crate::error::{Error, Result};

/// Most summation variables an expression may use.
pub const MAX_SUM_VARS: usize = 5;

/// `constant + n_coeff*n + Σ var_coeffs[i]*x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearForm {
    pub constant: i64,
    pub n_coeff: i64,
    pub var_coeffs: Vec<i64>,
}

impl LinearForm {
    pub fn eval(&self, n: i64, xs: &[i64]) -> i64 {
        self.constant + self.n_coeff * n + self.var_coeffs.iter().zip(xs).map(|(c, x)| c * x).sum::<i64>()
    }

    /// Highest summation variable with nonzero coefficient.
    fn deepest_var(&self) -> Option<usize> {
        self.var_coeffs.iter().rposition(|&c| c != 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomFactor {
    pub top: LinearForm,
    pub bottom: LinearForm,
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrefactorTerm {
    Factorial { arg: LinearForm, power: i64 },
    Sign(LinearForm),
}

/// A parsed closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomialSumExpr {
    pub name: String,
    pub vertex_reps: u64,
    pub var_count: usize,
    pub range: (LinearForm, LinearForm),
    pub sign: Option<LinearForm>,
    pub factors: Vec<BinomFactor>,
    pub prefactor: Vec<PrefactorTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(i64),
    Sym(char),
    DotDot,
}

fn tokenize(text: &str, line: usize) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut ln = line;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            ln += 1;
            i += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| Error::Parse { line: ln, message: format!("bad integer {s}") })?;
            out.push((Tok::Int(v), ln));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Word(chars[start..i].iter().collect()), ln));
        } else if c == '.' && chars.get(i + 1) == Some(&'.') {
            out.push((Tok::DotDot, ln));
            i += 2;
        } else if "+-*^(),;{}".contains(c) {
            out.push((Tok::Sym(c), ln));
            i += 1;
        } else {
            return Err(Error::Parse { line: ln, message: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    var_count: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(0, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line(), message: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Sym(d)) if d == c => Ok(()),
            other => self.err(format!("expected {c:?}, found {other:?}")),
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<()> {
        match self.next() {
            Some(Tok::Word(s)) if s == w => Ok(()),
            other => self.err(format!("expected {w}, found {other:?}")),
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(s)) if s == w)
    }

    fn int(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some(&Tok::Sym('-')) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.next() {
            Some(Tok::Int(v)) => Ok(if neg { -v } else { v }),
            other => self.err(format!("expected integer, found {other:?}")),
        }
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        name.strip_prefix('x').and_then(|d| d.parse().ok())
    }

    /// One linear term: `[int][*]atom` or `int`.
    fn term(&mut self, form: &mut LinearForm, sign: i64) -> Result<()> {
        let mut coeff = 1;
        let mut had_int = false;
        if let Some(Tok::Int(v)) = self.peek() {
            coeff = *v;
            had_int = true;
            self.pos += 1;
            if self.peek() == Some(&Tok::Sym('*')) {
                self.pos += 1;
            }
        }
        match self.peek().cloned() {
            Some(Tok::Word(w)) if w == "n" => {
                self.pos += 1;
                form.n_coeff += sign * coeff;
            }
            Some(Tok::Word(w)) if self.var_index(&w).is_some() => {
                self.pos += 1;
                let i = self.var_index(&w).expect("checked");
                if i >= self.var_count {
                    return self.err(format!("variable {w} is not summed over"));
                }
                if form.var_coeffs.len() < self.var_count {
                    form.var_coeffs.resize(self.var_count, 0);
                }
                form.var_coeffs[i] += sign * coeff;
            }
            _ if had_int => form.constant += sign * coeff,
            other => return self.err(format!("expected a linear term, found {other:?}")),
        }
        Ok(())
    }

    fn linear(&mut self) -> Result<LinearForm> {
        let mut form = LinearForm { var_coeffs: vec![0; self.var_count], ..Default::default() };
        let mut sign = 1;
        if self.peek() == Some(&Tok::Sym('-')) {
            self.pos += 1;
            sign = -1;
        } else if self.peek() == Some(&Tok::Sym('+')) {
            self.pos += 1;
        }
        self.term(&mut form, sign)?;
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.pos += 1;
                    self.term(&mut form, 1)?;
                }
                Some(Tok::Sym('-')) => {
                    self.pos += 1;
                    self.term(&mut form, -1)?;
                }
                _ => return Ok(form),
            }
        }
    }

    fn power(&mut self) -> Result<i64> {
        if self.peek() == Some(&Tok::Sym('^')) {
            self.pos += 1;
            self.int()
        } else {
            Ok(1)
        }
    }

    fn expression(&mut self) -> Result<BinomialSumExpr> {
        self.expect_word("EXPR")?;
        let name = match self.next() {
            Some(Tok::Word(w)) => w,
            other => return self.err(format!("expected expression name, found {other:?}")),
        };
        self.expect_word("VCAL")?;
        let vertex_reps = self.int()?;
        if vertex_reps < 1 {
            return self.err("VCAL must be positive");
        }
        self.var_count = 0;
        let mut range = (LinearForm::default(), LinearForm { n_coeff: 1, ..Default::default() });
        let mut sign = None;
        let mut factors = Vec::new();
        if self.is_word("SUM") {
            self.pos += 1;
            let first = match self.next() {
                Some(Tok::Word(w)) => self.var_index(&w),
                _ => None,
            };
            let last = if self.peek() == Some(&Tok::DotDot) {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Word(w)) => self.var_index(&w),
                    _ => None,
                }
            } else {
                first
            };
            let (Some(0), Some(last)) = (first, last) else {
                return self.err("summation variables must be x0..xk");
            };
            self.var_count = last + 1;
            if self.var_count > MAX_SUM_VARS {
                return Err(Error::Expr(format!(
                    "{} summation variables exceeds the cap of {MAX_SUM_VARS}",
                    self.var_count
                )));
            }
            range.0.var_coeffs = vec![0; self.var_count];
            range.1.var_coeffs = vec![0; self.var_count];
            if self.is_word("IN") {
                self.pos += 1;
                let lo = self.linear()?;
                if self.next() != Some(Tok::DotDot) {
                    return self.err("expected .. in range");
                }
                let hi = self.linear()?;
                if lo.deepest_var().is_some() || hi.deepest_var().is_some() {
                    return self.err("summation range may depend on n only");
                }
                range = (lo, hi);
            }
            self.expect_sym('{')?;
            if self.is_word("SIGN") {
                self.pos += 1;
                sign = Some(self.linear()?);
                self.expect_sym(';')?;
            }
            loop {
                self.expect_word("BINOM")?;
                self.expect_sym('(')?;
                let top = self.linear()?;
                self.expect_sym(',')?;
                let bottom = self.linear()?;
                self.expect_sym(')')?;
                let power = self.power()?;
                if power < 0 {
                    return self.err("binomial powers must be nonnegative");
                }
                factors.push(BinomFactor { top, bottom, power: power as u32 });
                if self.peek() == Some(&Tok::Sym('*')) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            self.expect_sym('}')?;
        }
        self.expect_word("PREFACTOR")?;
        let mut prefactor = Vec::new();
        loop {
            match self.next() {
                Some(Tok::Word(w)) if w == "fact" => {
                    self.expect_sym('(')?;
                    let arg = self.linear()?;
                    self.expect_sym(')')?;
                    let power = self.power()?;
                    if arg.deepest_var().is_some() {
                        return self.err("prefactor may depend on n only");
                    }
                    prefactor.push(PrefactorTerm::Factorial { arg, power });
                }
                Some(Tok::Word(w)) if w == "SIGN" => {
                    self.expect_sym('(')?;
                    let arg = self.linear()?;
                    self.expect_sym(')')?;
                    if arg.deepest_var().is_some() {
                        return self.err("prefactor may depend on n only");
                    }
                    prefactor.push(PrefactorTerm::Sign(arg));
                }
                other => return self.err(format!("expected fact(..) or SIGN(..), found {other:?}")),
            }
            if self.peek() == Some(&Tok::Sym('*')) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(BinomialSumExpr {
            name,
            vertex_reps: vertex_reps as u64,
            var_count: self.var_count,
            range,
            sign,
            factors,
            prefactor,
        })
    }
}

/// Parse every expression in `text`.
pub fn parse_exprs(text: &str) -> Result<Vec<BinomialSumExpr>> {
    let toks = tokenize(text, 1)?;
    let mut p = Parser { toks, pos: 0, var_count: 0 };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.expression()?);
    }
    Ok(out)
}

/// Parse exactly one expression.
pub fn parse_expr(text: &str) -> Result<BinomialSumExpr> {
    let mut all = parse_exprs(text)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        k => Err(Error::Expr(format!("expected one expression, found {k}"))),
    }
}

fn binom_or_zero(f: &Factorials, top: i64, bottom: i64) -> u64 {
    if top < 0 || bottom < 0 || bottom > top {
        0
    } else {
        f.binom(top as u64, bottom as u64)
    }
}

/// Evaluate `e` at prime `p = vertex_reps * n + 1`.
pub fn eval_expr(e: &BinomialSumExpr, p: u64) -> Result<u64> {
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !(p - 1).is_multiple_of(e.vertex_reps) || p == 1 {
        return Err(Error::NotAdmissible { prime: p, vertex_reps: e.vertex_reps });
    }
    let n = ((p - 1) / e.vertex_reps) as i64;
    let f = Factorials::new(p);
    let mut pre = 1 % p;
    for t in &e.prefactor {
        match t {
            PrefactorTerm::Factorial { arg, power } => {
                let a = arg.eval(n, &[]);
                if a < 0 {
                    return Err(Error::Expr(format!("factorial of negative argument {a}")));
                }
                let v = crate::arith::factorial_mod(a as u64, p);
                let v = if *power < 0 {
                    inv_mod(v, p).ok_or_else(|| Error::Expr(format!("{a}! is not invertible mod {p}")))?
                } else {
                    v
                };
                pre = mul_mod(pre, pow_mod(v, power.unsigned_abs(), p), p);
            }
            PrefactorTerm::Sign(arg) => pre = mul_mod(pre, sign_mod(arg.eval(n, &[]).unsigned_abs(), p), p),
        }
    }
    if e.var_count == 0 {
        let mut v = pre;
        for b in &e.factors {
            v = mul_mod(
                v,
                pow_mod(binom_or_zero(&f, b.top.eval(n, &[]), b.bottom.eval(n, &[])), u64::from(b.power), p),
                p,
            );
        }
        return Ok(v);
    }
    let lo = e.range.0.eval(n, &[]);
    let hi = e.range.1.eval(n, &[]);
    // Evaluate each factor as soon as its last variable is bound.
    let k = e.var_count;
    let mut by_depth: Vec<Vec<&BinomFactor>> = vec![Vec::new(); k];
    for b in &e.factors {
        let d = b.top.deepest_var().max(b.bottom.deepest_var()).unwrap_or(0);
        by_depth[d].push(b);
    }
    let mut xs = vec![0i64; k];
    let total = sum_rec(e, &f, &by_depth, n, lo, hi, 0, 1 % p, &mut xs);
    Ok(mul_mod(pre, total, p))
}

#[allow(clippy::too_many_arguments)]
fn sum_rec(
    e: &BinomialSumExpr,
    f: &Factorials,
    by_depth: &[Vec<&BinomFactor>],
    n: i64,
    lo: i64,
    hi: i64,
    depth: usize,
    acc: u64,
    xs: &mut Vec<i64>,
) -> u64 {
    let p = f.prime();
    let mut total = 0u64;
    for x in lo..=hi {
        xs[depth] = x;
        let mut v = acc;
        for b in &by_depth[depth] {
            let c = binom_or_zero(f, b.top.eval(n, xs), b.bottom.eval(n, xs));
            v = mul_mod(v, pow_mod(c, u64::from(b.power), p), p);
            if v == 0 {
                break;
            }
        }
        if v == 0 {
            continue;
        }
        if depth + 1 == xs.len() {
            if let Some(s) = &e.sign {
                v = mul_mod(v, sign_mod(s.eval(n, xs).unsigned_abs(), p), p);
            }
            total = (total + v) % p;
        } else {
            total = (total + sum_rec(e, f, by_depth, n, lo, hi, depth + 1, v, xs)) % p;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    const COMPLETED_P11: &str = "EXPR P_1_1 VCAL 3\nPREFACTOR fact(3n)^2 * fact(2n) * fact(n)^-2 * SIGN(n)";

    #[test]
    fn completed_banana_values() {
        let e = parse_expr(COMPLETED_P11).unwrap();
        assert_eq!(eval_expr(&e, 7).unwrap(), 6);
        assert_eq!(eval_expr(&e, 13).unwrap(), 5);
        assert!(matches!(eval_expr(&e, 11), Err(Error::NotAdmissible { .. })));
    }

    #[test]
    fn wheel_three_sum() {
        let e = parse_expr("EXPR P_3_1 VCAL 2 SUM x0 { SIGN x0; BINOM(n, x0)^3 } PREFACTOR fact(2n)^3").unwrap();
        assert_eq!(e.var_count, 1);
        assert_eq!(eval_expr(&e, 13).unwrap(), 3);
        assert_eq!(eval_expr(&e, 7).unwrap(), 0);
    }

    #[test]
    fn out_of_range_binomials_vanish() {
        let e = parse_expr("EXPR t VCAL 2 SUM x0 { BINOM(n, x0 - n - 1) } PREFACTOR fact(0)").unwrap();
        assert_eq!(eval_expr(&e, 11).unwrap(), 0);
    }

    #[test]
    fn linear_forms() {
        let e = parse_expr("EXPR t VCAL 2 SUM x0..x1 IN 0..2*n { BINOM(2n, -n + x0 + 3x1 - 1) } PREFACTOR SIGN(n)")
            .unwrap();
        let b = &e.factors[0];
        assert_eq!(b.top, LinearForm { constant: 0, n_coeff: 2, var_coeffs: vec![0, 0] });
        assert_eq!(b.bottom, LinearForm { constant: -1, n_coeff: -1, var_coeffs: vec![1, 3] });
        assert_eq!(e.range.1.n_coeff, 2);
    }

    #[test]
    fn variable_cap_and_errors() {
        assert!(matches!(
            parse_expr("EXPR t VCAL 2 SUM x0..x5 { BINOM(n, x0) } PREFACTOR fact(n)"),
            Err(Error::Expr(_))
        ));
        assert!(parse_expr("EXPR t VCAL 2 SUM x0 { BINOM(n, x1) } PREFACTOR fact(n)").is_err());
        assert!(parse_expr("EXPR t VCAL 2 PREFACTOR fact(x0)").is_err());
        assert!(matches!(parse_expr("EXPR t VCAL 2\nPREFACTOR $"), Err(Error::Parse { line: 2, .. })));
    }
}
