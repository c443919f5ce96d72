//! p-adic valuations, rational reconstruction and Chinese remaindering.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::modular::Residue;

/// A p-adic valuation; zero has infinite valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Exponent of `p` in the nonzero integer `x`.
pub fn valuation_int(x: &BigInt, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        y = q;
        v += 1;
    }
    Valuation::Finite(v)
}

/// p-adic valuation of a rational number.
pub fn valuation(x: &BigRational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let num = valuation_int(x.numer(), p).finite().unwrap_or(0);
    let den = valuation_int(x.denom(), p).finite().unwrap_or(0);
    Valuation::Finite(num - den)
}

/// Finds `n/d` with `|n| <= num_bound`, `0 < d <= den_bound`, `gcd(n, d) = 1`
/// and `n = r d (mod m)`. The answer is unique when `2 num_bound den_bound < m`.
pub fn rational_reconstruct(
    r: &BigInt,
    m: &BigInt,
    num_bound: &BigInt,
    den_bound: &BigInt,
) -> Option<BigRational> {
    let r = r.mod_floor(m);
    // Invariant: r_i = t_i * r (mod m).
    let (mut r0, mut r1) = (m.clone(), r);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > num_bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *den_bound {
        return None;
    }
    let (n, d) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    if !n.gcd(&d).is_one() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Reconstruction for a machine-word residue.
pub fn reconstruct_residue(r: Residue, num_bound: u64, den_bound: u64) -> Option<BigRational> {
    rational_reconstruct(
        &BigInt::from(r.value()),
        &BigInt::from(r.modulus()),
        &BigInt::from(num_bound),
        &BigInt::from(den_bound),
    )
}

/// Combines `x = a (mod m)` and `x = b (mod n)` for coprime moduli into a
/// residue modulo `m n`.
pub fn crt_pair(a: &BigInt, m: &BigInt, b: &BigInt, n: &BigInt) -> BigInt {
    let e = m.extended_gcd(n);
    assert!(e.gcd.is_one(), "moduli must be coprime");
    let mn = m * n;
    let diff = (b - a).mod_floor(n);
    (a + m * ((diff * e.x).mod_floor(n))).mod_floor(&mn)
}

/// Integer square root bound helper: `floor(sqrt(m / 2))`.
pub fn balanced_bound(m: &BigInt) -> BigInt {
    (m / BigInt::from(2)).sqrt()
}
