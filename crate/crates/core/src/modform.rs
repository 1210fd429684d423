//! q-expansions of eta products and comparison of their Fourier
//! coefficients `a_p mod p` with residue sequences.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::{canonicalize_sign, EgpSequence};

/// Default truncation order of expansions.
pub const DEFAULT_TERMS: usize = 128;

/// `sign * Π η(m z)^e` with `η(z) = q^{1/24} Π_{n≥1} (1 - q^n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaProduct {
    pub sign: i8,
    /// `(m, e)` pairs.
    pub factors: Vec<(u64, i64)>,
}

impl EtaProduct {
    /// Exponent of the leading `q` power, times 24.
    pub fn leading_numerator(&self) -> i64 {
        self.factors.iter().map(|&(m, e)| m as i64 * e).sum()
    }

    pub fn leading_power(&self) -> Result<usize> {
        let num = self.leading_numerator();
        if num <= 0 || num % 24 != 0 {
            return Err(Error::FractionalLeadingPower { numerator: num });
        }
        Ok((num / 24) as usize)
    }
}

impl fmt::Display for EtaProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.factors.iter().map(|(m, e)| format!("eta({m})^{e}")).collect();
        if self.sign < 0 {
            write!(f, "-1 * ")?;
        }
        write!(f, "{}", body.join(" * "))
    }
}

impl FromStr for EtaProduct {
    type Err = Error;

    /// Parse `[-1 *] eta(m)[^e] * eta(m)[^e] ...`.
    fn from_str(s: &str) -> Result<Self> {
        let perr = |message: String| Error::Parse { line: 1, message };
        let mut sign = 1i8;
        let mut factors = Vec::new();
        for raw in s.split('*') {
            let term: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
            match term.as_str() {
                "" => return Err(perr(format!("empty factor in `{s}`"))),
                "-1" => sign = -sign,
                "1" | "+1" => {}
                "-eta" => return Err(perr("write the sign as `-1 *`".into())),
                t => {
                    let (base, exp) = match t.split_once('^') {
                        Some((b, e)) => (b, e.parse::<i64>().map_err(|_| perr(format!("bad exponent in `{t}`")))?),
                        None => (t, 1),
                    };
                    let m = base
                        .strip_prefix("eta(")
                        .and_then(|r| r.strip_suffix(')'))
                        .ok_or_else(|| perr(format!("expected eta(m)^e, found `{t}`")))?
                        .parse::<u64>()
                        .ok()
                        .filter(|&m| m > 0)
                        .ok_or_else(|| perr(format!("bad eta multiplier in `{t}`")))?;
                    factors.push((m, exp));
                }
            }
        }
        if factors.is_empty() {
            return Err(perr("no eta factors".into()));
        }
        Ok(Self { sign, factors })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesSource {
    Eta(String),
    File(String),
}

/// Coefficients `a_1..a_N` of a q-series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffSeries {
    pub coefficients: Vec<BigInt>,
    pub source: SeriesSource,
    pub weight: Option<u32>,
    pub level: Option<u64>,
}

impl CoeffSeries {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `a_n` for `1 <= n <= N`.
    pub fn coefficient(&self, n: usize) -> Option<&BigInt> {
        n.checked_sub(1).and_then(|i| self.coefficients.get(i))
    }
}

/// Multiply `series` by `(1 - q^step)^power` in place (truncated).
fn mul_one_minus(series: &mut [BigInt], step: usize, power: i64) {
    if step >= series.len() {
        return;
    }
    for _ in 0..power.unsigned_abs() {
        if power > 0 {
            for i in (step..series.len()).rev() {
                let t = series[i - step].clone();
                series[i] -= t;
            }
        } else {
            for i in step..series.len() {
                let t = series[i - step].clone();
                series[i] += t;
            }
        }
    }
}

/// Coefficients of `q^1 .. q^terms`.
pub fn eta_expand(e: &EtaProduct, terms: usize) -> Result<CoeffSeries> {
    let lead = e.leading_power()?;
    // Product part needs exponents 0 .. terms - lead.
    let len = (terms + 1).saturating_sub(lead);
    let mut series = vec![BigInt::zero(); len];
    if len > 0 {
        series[0] = BigInt::from(e.sign);
    }
    for &(m, power) in &e.factors {
        let mut k = m as usize;
        while k < len {
            mul_one_minus(&mut series, k, power);
            k += m as usize;
        }
    }
    let coefficients = (1..=terms).map(|n| if n < lead { BigInt::zero() } else { series[n - lead].clone() }).collect();
    Ok(CoeffSeries { coefficients, source: SeriesSource::Eta(e.to_string()), weight: None, level: None })
}

/// Read `n,a_n` lines (`#` comments and a non-numeric header allowed);
/// indices must cover `1..=N` exactly once.
pub fn parse_coefficient_csv(text: &str, origin: &str) -> Result<CoeffSeries> {
    let mut pairs: Vec<(usize, BigInt)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let perr = |m: &str| Error::Parse { line: idx + 1, message: m.to_string() };
        let (n, a) = line.split_once(',').ok_or_else(|| perr("expected `n,a_n`"))?;
        let Ok(n) = n.trim().parse::<usize>() else {
            if pairs.is_empty() {
                continue; // header
            }
            return Err(perr("bad index"));
        };
        let a = a.trim().parse::<BigInt>().map_err(|_| perr("bad coefficient"))?;
        pairs.push((n, a));
    }
    pairs.sort_by_key(|(n, _)| *n);
    for (i, (n, _)) in pairs.iter().enumerate() {
        if *n != i + 1 {
            return Err(Error::Parse {
                line: 0,
                message: format!("coefficient indices must be 1..N without gaps (saw {n})"),
            });
        }
    }
    Ok(CoeffSeries {
        coefficients: pairs.into_iter().map(|(_, a)| a).collect(),
        source: SeriesSource::File(origin.to_string()),
        weight: None,
        level: None,
    })
}

/// `a_p mod p` for each prime.
pub fn residue_sequence(c: &CoeffSeries, primes: &[u64]) -> Result<Vec<u64>> {
    primes
        .iter()
        .map(|&p| {
            let a =
                c.coefficient(p as usize).ok_or(Error::SeriesTooShort { available: c.len(), needed: p as usize })?;
            let r = ((a % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
            Ok(r.to_u64().expect("residue below p"))
        })
        .collect()
}

/// Where a paired form's coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormData {
    Eta(&'static str),
    /// Bundled `n,a_n` table.
    Csv(&'static str),
}

/// A graph (or `(P_3_1)^2`, the two-vertex join) observed to share its
/// residues with a cusp form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormPairing {
    pub graphs: &'static [&'static str],
    pub weight: u32,
    pub level: u64,
    pub form: FormData,
}

pub const P31_SQUARED: &str = "(P_3_1)^2";

/// The observed pairings. The weight equals the loop number in every case;
/// this is recorded, not asserted.
pub fn known_pairings() -> Vec<FormPairing> {
    vec![
        FormPairing { graphs: &["P_3_1"], weight: 3, level: 16, form: FormData::Eta("-1 * eta(4)^6") },
        FormPairing { graphs: &["P_4_1"], weight: 4, level: 8, form: FormData::Eta("eta(2)^4 * eta(4)^4") },
        FormPairing {
            graphs: &[P31_SQUARED],
            weight: 5,
            level: 4,
            form: FormData::Eta("eta(1)^4 * eta(2)^2 * eta(4)^4"),
        },
        FormPairing { graphs: &["P_6_1", "P_6_4"], weight: 6, level: 4, form: FormData::Eta("eta(2)^12") },
        FormPairing { graphs: &["P_6_3"], weight: 6, level: 8, form: FormData::Csv(crate::catalog::P63_FORM_CSV) },
    ]
}

impl FormPairing {
    pub fn series(&self, terms: usize) -> Result<CoeffSeries> {
        let mut c = match self.form {
            FormData::Eta(spec) => eta_expand(&spec.parse()?, terms)?,
            FormData::Csv(text) => parse_coefficient_csv(text, "p63_form.csv")?,
        };
        c.weight = Some(self.weight);
        c.level = Some(self.level);
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeComparison {
    pub prime: u64,
    pub egp: u64,
    pub form: u64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub graph: String,
    pub form: String,
    pub primes: Vec<PrimeComparison>,
    pub first_mismatch: Option<u64>,
    /// Largest prime up to which every compared residue matched.
    pub matched_through: Option<u64>,
    pub full_match: bool,
    /// Every residue matches `-a_p mod p` instead (a global sign flip).
    pub negated_match: bool,
}

/// Compare an EGP with `a_p mod p` at the sequence's primes, both taken
/// with the canonical sign convention at variate primes.
pub fn compare(egp: &EgpSequence, c: &CoeffSeries) -> Result<ComparisonReport> {
    let primes = egp.primes();
    let form = residue_sequence(c, &primes)?;
    let pairs: Vec<(u64, u64)> = primes.iter().copied().zip(form).collect();
    let form_seq = canonicalize_sign(&EgpSequence::from_residues("form", egp.spec, &pairs)?);
    let negated: Vec<(u64, u64)> = pairs.iter().map(|&(p, r)| (p, (p - r) % p)).collect();
    let negated_seq = canonicalize_sign(&EgpSequence::from_residues("form", egp.spec, &negated)?);
    let ours = canonicalize_sign(egp);
    let negated_match = ours.residues() == negated_seq.residues();
    let rows: Vec<PrimeComparison> = ours
        .values
        .iter()
        .zip(&form_seq.values)
        .map(|(a, b)| PrimeComparison {
            prime: a.prime,
            egp: a.residue,
            form: b.residue,
            matches: a.residue == b.residue,
        })
        .collect();
    let first_mismatch = rows.iter().find(|r| !r.matches).map(|r| r.prime);
    let matched_through = rows.iter().take_while(|r| r.matches).last().map(|r| r.prime);
    let form_name = match &c.source {
        SeriesSource::Eta(s) | SeriesSource::File(s) => s.clone(),
    };
    Ok(ComparisonReport {
        graph: egp.graph.clone(),
        form: form_name,
        full_match: first_mismatch.is_none(),
        negated_match,
        primes: rows,
        first_mismatch,
        matched_through,
    })
}
