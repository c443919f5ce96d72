//! Machine-word modular arithmetic, primitive roots and discrete logarithms.

use std::collections::HashMap;

use crate::error::{Error, Result};

use super::primes::{factorize, is_prime};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
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

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = xgcd((a % m) as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

/// An element of `Z/mZ` with `m < 2^63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i128, modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Residue {
            value: value.rem_euclid(modulus as i128) as u64,
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Representative in `(-m/2, m/2]`.
    pub fn centered(self) -> i128 {
        let v = self.value as i128;
        if 2 * v > self.modulus as i128 {
            v - self.modulus as i128
        } else {
            v
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue::new(self.value as i128 + other.value as i128, self.modulus)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue {
            value: mul_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Residue {
        Residue::new(-(self.value as i128), self.modulus)
    }

    /// Reduction to a divisor of the modulus.
    pub fn reduce(self, modulus: u64) -> Residue {
        assert!(self.modulus.is_multiple_of(modulus), "{modulus} does not divide {}", self.modulus);
        Residue::new(self.value as i128, modulus)
    }

    /// Largest `j` with `p^j | value` (capped at the exponent of `p` in the
    /// modulus); `None` when the residue is zero.
    pub fn valuation(self, p: u64) -> Option<u32> {
        if self.value == 0 {
            return None;
        }
        let mut v = self.value;
        let mut j = 0;
        while v.is_multiple_of(p) {
            v /= p;
            j += 1;
        }
        Some(j)
    }
}

/// Least positive primitive root modulo the prime `l`.
pub fn primitive_root(l: u64) -> Result<u64> {
    if !is_prime(l) {
        return Err(Error::InvalidInput(format!("{l} is not prime")));
    }
    if l == 2 {
        return Ok(1);
    }
    let factors = factorize(l - 1);
    (2..l)
        .find(|&g| factors.iter().all(|&(q, _)| pow_mod(g, (l - 1) / q, l) != 1))
        .ok_or_else(|| Error::Invariant(format!("no primitive root mod {l}")))
}

/// Whether `g` generates `(Z/l)^*`.
pub fn is_primitive_root(g: u64, l: u64) -> bool {
    !g.is_multiple_of(l)
        && factorize(l - 1)
            .iter()
            .all(|&(q, _)| pow_mod(g, (l - 1) / q, l) != 1)
}

/// Discrete logarithm to a fixed base modulo a prime, tabulated once.
#[derive(Debug, Clone)]
pub struct LogTable {
    prime: u64,
    base: u64,
    logs: Vec<u32>,
}

impl LogTable {
    pub fn new(prime: u64, base: u64) -> Result<Self> {
        if prime > u32::MAX as u64 {
            return Err(Error::InvalidInput(format!("log table modulus {prime} too large")));
        }
        if !is_primitive_root(base, prime) {
            return Err(Error::InvalidInput(format!("{base} is not a primitive root mod {prime}")));
        }
        let mut logs = vec![0u32; prime as usize];
        let mut x = 1u64;
        for i in 0..prime - 1 {
            logs[x as usize] = i as u32;
            x = x * base % prime;
        }
        Ok(LogTable { prime, base, logs })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// `log_base(a)` in `[0, prime - 1)`. Panics if `prime | a`.
    #[inline]
    pub fn log(&self, a: u64) -> u64 {
        let r = (a % self.prime) as usize;
        assert!(r != 0, "logarithm of a multiple of {}", self.prime);
        self.logs[r] as u64
    }
}

/// Baby-step giant-step discrete logarithm; independent of [`LogTable`].
pub fn discrete_log(base: u64, target: u64, l: u64) -> Option<u64> {
    let m = (l as f64).sqrt().ceil() as u64 + 1;
    let mut baby = HashMap::with_capacity(m as usize);
    let mut x = 1u64;
    for j in 0..m {
        baby.entry(x).or_insert(j);
        x = mul_mod(x, base, l);
    }
    let giant = pow_mod(inv_mod(base, l)?, m, l);
    let mut y = target % l;
    for i in 0..m {
        if let Some(&j) = baby.get(&y) {
            return Some(i * m + j);
        }
        y = mul_mod(y, giant, l);
    }
    None
}

/// Kronecker symbol `(a / n)` for `n >= 1`.
pub fn kronecker(a: i64, n: u64) -> i32 {
    let mut n = n;
    let mut a = a as i128;
    let mut sign = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        match a.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            3 | 5 => sign = -sign,
            _ => {}
        }
    }
    // Jacobi symbol for odd n.
    let mut n = n as i128;
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}
