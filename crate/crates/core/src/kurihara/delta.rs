//! Kurihara numbers `delta_n` and the truncated Mazur-Tate element.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{mul_mod, valuation, Valuation};
use crate::error::{Error, Result};
use crate::kolyvagin::{KolyvaginPrime, Modulus};
use crate::modsym::{EigenSymbol, ResidueTable};

/// Number of `a` values per parallel work unit.
const CHUNK: u64 = 1 << 16;

/// p-adic valuation of a Kurihara number as far as it is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeltaValuation {
    /// The value is nonzero with this valuation.
    Exact(u32),
    /// The value vanishes modulo `p^k`.
    AtLeast(u32),
    /// The value is exactly zero.
    Infinite,
}

impl DeltaValuation {
    pub fn exact(self) -> Option<u32> {
        match self {
            DeltaValuation::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_nonzero(self) -> bool {
        matches!(self, DeltaValuation::Exact(_))
    }

    /// Lower bound on the valuation.
    pub fn floor(self) -> u64 {
        match self {
            DeltaValuation::Exact(v) | DeltaValuation::AtLeast(v) => v as u64,
            DeltaValuation::Infinite => u64::MAX,
        }
    }

    /// The smaller of two valuations, where a known value beats a bound.
    pub fn meet(self, other: DeltaValuation) -> DeltaValuation {
        use DeltaValuation::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Exact(a.min(b)),
            (Exact(a), _) | (_, Exact(a)) => Exact(a),
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
            (AtLeast(a), Infinite) | (Infinite, AtLeast(a)) => AtLeast(a),
            (Infinite, Infinite) => Infinite,
        }
    }
}

impl fmt::Display for DeltaValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaValuation::Exact(v) => write!(f, "{v}"),
            DeltaValuation::AtLeast(v) => write!(f, ">={v}"),
            DeltaValuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for DeltaValuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DeltaValuation::Exact(v) => s.serialize_u32(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// Which scale the symbols were taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    PNormalized,
    Pinned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaValue {
    /// A residue modulo `p^k_used`.
    Residue(u64),
    /// The exact rational `delta_1`.
    Exact(BigRational),
}

impl Serialize for DeltaValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DeltaValue::Residue(v) => s.serialize_u64(*v),
            DeltaValue::Exact(r) => s.serialize_str(&r.to_string()),
        }
    }
}

/// `delta_n`, reduced modulo `p^k_used` (or exact for `n = 1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KuriharaNumber {
    pub n: u64,
    pub factors: Vec<u64>,
    /// `None` when the value is exact.
    pub k_used: Option<u32>,
    pub value: DeltaValue,
    pub valuation: DeltaValuation,
    pub normalization: Normalization,
}

impl KuriharaNumber {
    pub fn nu(&self) -> usize {
        self.factors.len()
    }

    pub fn is_nonzero(&self) -> bool {
        self.valuation.is_nonzero()
    }
}

/// Result of comparing a Kurihara number against the parity forced by the
/// root number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCheck {
    Consistent,
    Violation,
}

/// `delta_n` must vanish when `(-1)^nu(n) != w`.
pub fn functional_sign_check(w: i8, kn: &KuriharaNumber) -> SignCheck {
    let sign = if kn.nu().is_multiple_of(2) { 1 } else { -1 };
    if sign != w && kn.is_nonzero() {
        SignCheck::Violation
    } else {
        SignCheck::Consistent
    }
}

/// `k_used = min(v(I_n), k)`; `None` for `n = 1`.
pub fn default_k_used(m: &Modulus, k: u32) -> Option<u32> {
    m.i_valuation().map(|v| v.min(k))
}

/// `a b mod m` without widening when `m < 2^32`.
#[inline]
fn mul_small(a: u64, b: u64, m: u64) -> u64 {
    if m < 1 << 32 {
        a * b % m
    } else {
        mul_mod(a, b, m)
    }
}

fn residue_valuation(x: u64, p: u64, k: u32) -> DeltaValuation {
    if x == 0 {
        return DeltaValuation::AtLeast(k);
    }
    let (mut x, mut v) = (x, 0);
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    DeltaValuation::Exact(v)
}

/// Evaluates Kurihara numbers for one eigen-symbol at a fixed top precision.
pub struct DeltaEvaluator<'a> {
    symbol: &'a EigenSymbol,
    table: ResidueTable<'a>,
    k_max: u32,
}

impl<'a> DeltaEvaluator<'a> {
    /// Precomputes `[x]^+ mod p^k_max` on every Manin symbol.
    pub fn new(symbol: &'a EigenSymbol, k_max: u32) -> Result<Self> {
        let p = symbol.p();
        let modulus = p
            .checked_pow(k_max)
            .filter(|&m| m < 1 << 62)
            .ok_or_else(|| Error::InvalidInput(format!("{p}^{k_max} is too large a working modulus")))?;
        let table = symbol.residues(modulus)?;
        Ok(DeltaEvaluator { symbol, table, k_max })
    }

    pub fn symbol(&self) -> &EigenSymbol {
        self.symbol
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// The exact `delta_1 = [0]^+`, pinned when the scale is known.
    pub fn delta_one(&self) -> KuriharaNumber {
        let (value, normalization) = match self.symbol.pinned_value(0, 1) {
            Some(v) => (v, Normalization::Pinned),
            None => (self.symbol.value(0, 1), Normalization::PNormalized),
        };
        let valuation = match valuation(&value, self.symbol.p()) {
            _ if value.is_zero() => DeltaValuation::Infinite,
            Valuation::Finite(v) => DeltaValuation::Exact(v.max(0) as u32),
            Valuation::Infinite => DeltaValuation::Infinite,
        };
        KuriharaNumber {
            n: 1,
            factors: Vec::new(),
            k_used: None,
            value: DeltaValue::Exact(value),
            valuation,
            normalization,
        }
    }

    fn check_precision(&self, m: &Modulus, k_used: u32) -> Result<u64> {
        let limit = m.i_valuation().expect("n > 1");
        if k_used == 0 || k_used > limit || k_used > self.k_max {
            return Err(Error::InvalidInput(format!(
                "k_used = {k_used} must lie in 1..={} for n = {m}",
                limit.min(self.k_max)
            )));
        }
        Ok(self.symbol.p().pow(k_used))
    }

    /// `sum_{a in (Z/n)^*} [a/n]^+ prod_{l | n} log_l(a)` modulo `p^k_used`.
    pub fn delta(&self, m: &Modulus, k_used: Option<u32>) -> Result<KuriharaNumber> {
        let Some(k_used) = k_used else {
            return Ok(self.delta_one());
        };
        if m.nu() == 0 {
            return Ok(self.delta_one());
        }
        let pk = self.check_precision(m, k_used)?;
        let n = m.n();
        let primes = m.primes();
        let chunks: Vec<u64> = (0..n.div_ceil(CHUNK)).collect();
        let value = chunks
            .par_iter()
            .map(|&c| self.partial_sum(primes, n, c * CHUNK, ((c + 1) * CHUNK).min(n), pk))
            .reduce(|| 0, |a, b| (a + b) % pk);
        Ok(KuriharaNumber {
            n,
            factors: m.factors(),
            k_used: Some(k_used),
            value: DeltaValue::Residue(value),
            valuation: residue_valuation(value, self.symbol.p(), k_used),
            normalization: Normalization::PNormalized,
        })
    }

    /// The sum over `start <= a < end`.
    fn partial_sum(&self, primes: &[KolyvaginPrime], n: u64, start: u64, end: u64, pk: u64) -> u64 {
        let mut res: Vec<u64> = primes.iter().map(|q| start % q.ell()).collect();
        let mut acc = 0u64;
        for a in start..end {
            let mut weight = 1u64;
            for (q, r) in primes.iter().zip(&res) {
                if *r == 0 {
                    weight = 0;
                    break;
                }
                weight = mul_small(weight, q.log_mod(*r, pk), pk);
                if weight == 0 {
                    break;
                }
            }
            if weight != 0 {
                let sym = self.table.eval(a as i64, n) % pk;
                acc = (acc + mul_small(weight, sym, pk)) % pk;
            }
            for (q, r) in primes.iter().zip(res.iter_mut()) {
                *r += 1;
                if *r == q.ell() {
                    *r = 0;
                }
            }
        }
        acc
    }

    /// The coefficients of `sum_a [a/n]^+ sigma_a` in
    /// `Z/p^k [x_l : l | n] / (x_l^2)`, with `sigma_a` expanded as
    /// `prod_l (1 + log_l(a) x_l)`.
    ///
    /// The sum runs over the group `(Z/n)^*` through its generators (each
    /// `a` is rebuilt by CRT from its exponent vector), bucketing the symbols
    /// by exponent vector modulo `p^k` before expanding.
    pub fn mazur_tate(&self, m: &Modulus, k_used: u32) -> Result<MazurTateTruncation> {
        if m.nu() == 0 {
            return Err(Error::InvalidInput("the truncation needs n > 1".into()));
        }
        let pk = self.check_precision(m, k_used)?;
        let n = m.n();
        let primes = m.primes();
        let nu = primes.len();
        // CRT idempotents: e_j = 1 mod l_j, 0 mod l_i (i != j).
        let idempotents: Vec<u64> = primes
            .iter()
            .map(|q| {
                let rest = n / q.ell();
                let inv = crate::arith::inv_mod(rest % q.ell(), q.ell()).expect("coprime");
                mul_mod(rest, inv, n)
            })
            .collect();
        let bucket_count = (pk as usize)
            .checked_pow(nu as u32)
            .filter(|&c| c <= 1 << 24)
            .ok_or_else(|| Error::InvalidInput(format!("truncation for n = {m} at p^{k_used} is too large")))?;
        let mut buckets = vec![0u64; bucket_count];
        let mut exps = vec![0u64; nu];
        let mut powers: Vec<u64> = vec![1; nu];
        loop {
            let a = powers
                .iter()
                .zip(&idempotents)
                .fold(0u64, |acc, (&g, &e)| (acc + mul_mod(g, e, n)) % n);
            let mut slot = 0usize;
            for &e in &exps {
                slot = slot * pk as usize + (e % pk) as usize;
            }
            let sym = self.table.eval(a as i64, n) % pk;
            buckets[slot] = (buckets[slot] + sym) % pk;
            // odometer over exponent vectors
            let mut j = nu;
            loop {
                if j == 0 {
                    return Ok(self.expand(m, k_used, pk, &buckets));
                }
                j -= 1;
                exps[j] += 1;
                if exps[j] < primes[j].ell() - 1 {
                    powers[j] = mul_mod(powers[j], primes[j].root(), primes[j].ell());
                    break;
                }
                exps[j] = 0;
                powers[j] = 1;
            }
        }
    }

    fn expand(&self, m: &Modulus, k_used: u32, pk: u64, buckets: &[u64]) -> MazurTateTruncation {
        let nu = m.nu();
        let mut coefficients = vec![0u64; 1 << nu];
        for (slot, &b) in buckets.iter().enumerate() {
            if b == 0 {
                continue;
            }
            let mut digits = vec![0u64; nu];
            let mut s = slot;
            for d in digits.iter_mut().rev() {
                *d = (s % pk as usize) as u64;
                s /= pk as usize;
            }
            for (subset, coef) in coefficients.iter_mut().enumerate() {
                let mut w = b;
                for (j, &d) in digits.iter().enumerate() {
                    if subset >> j & 1 == 1 {
                        w = mul_mod(w, d, pk);
                    }
                }
                *coef = (*coef + w) % pk;
            }
        }
        MazurTateTruncation { n: m.n(), factors: m.factors(), k_used, coefficients }
    }
}

/// The image of the Mazur-Tate element in the truncated group ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MazurTateTruncation {
    pub n: u64,
    pub factors: Vec<u64>,
    pub k_used: u32,
    /// Coefficient of `prod_{j in S} x_{l_j}`, indexed by the bit mask of `S`.
    pub coefficients: Vec<u64>,
}

impl MazurTateTruncation {
    /// Coefficient of the full product, which is `delta_n`.
    pub fn top(&self) -> u64 {
        *self.coefficients.last().expect("nonempty")
    }

    /// Coefficient of `1`, the plain sum of the symbols.
    pub fn constant(&self) -> u64 {
        self.coefficients[0]
    }
}

/// Recomputes `delta_n` with other primitive roots (`roots[j]` for the
/// `j`-th prime of `m`) and reports whether the valuation is unchanged.
pub fn unit_invariance_audit(eval: &DeltaEvaluator<'_>, m: &Modulus, k_used: u32, roots: &[u64]) -> Result<bool> {
    if roots.len() != m.nu() {
        return Err(Error::InvalidInput("one alternate root per prime is required".into()));
    }
    let base = eval.delta(m, Some(k_used))?;
    let alternates = m
        .primes()
        .iter()
        .zip(roots)
        .map(|(q, &g)| q.with_root(g))
        .collect::<Result<Vec<_>>>()?;
    let other = eval.delta(&Modulus::new(alternates)?, Some(k_used))?;
    Ok(base.valuation == other.valuation)
}
