//! Thin helper around `astro_float` fixing a working precision.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

pub struct Real {
    bits: usize,
    cc: Consts,
}

impl Real {
    pub fn new(bits: usize) -> Self {
        Real {
            bits,
            cc: Consts::new().expect("constant cache"),
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn int(&self, x: i64) -> BigFloat {
        BigFloat::from_i64(x, self.bits)
    }

    pub fn big(&mut self, x: &BigInt) -> BigFloat {
        if let Ok(small) = i64::try_from(x) {
            return self.int(small);
        }
        let (sign, words) = x.to_u64_digits();
        let mut acc = BigFloat::from_word(0, self.bits);
        let shift = BigFloat::from_word(1, self.bits).mul(&self.pow2(64), self.bits, RM);
        for w in words.iter().rev() {
            acc = acc.mul(&shift, self.bits, RM).add(&BigFloat::from_word(*w, self.bits), self.bits, RM);
        }
        if sign == num_bigint::Sign::Minus {
            acc.neg()
        } else {
            acc
        }
    }

    fn pow2(&self, e: usize) -> BigFloat {
        BigFloat::from_word(2, self.bits).powi(e, self.bits, RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.bits, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }

    /// Arithmetic-geometric mean of two positive reals.
    pub fn agm(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        let mut a = a.clone();
        let mut b = b.clone();
        let half = BigFloat::from_f64(0.5, self.bits);
        for _ in 0..10_000 {
            let diff = self.sub(&a, &b).abs();
            if diff.is_zero() || self.rel_lt(&diff, &a, self.bits - 4) {
                break;
            }
            let next_a = self.mul(&self.add(&a, &b), &half);
            b = self.sqrt(&self.mul(&a, &b));
            a = next_a;
        }
        a
    }

    /// Whether `|x| < 2^-bits |y|`.
    pub fn rel_lt(&self, x: &BigFloat, y: &BigFloat, bits: usize) -> bool {
        match (x.exponent(), y.exponent()) {
            (_, None) => false,
            (None, _) => true,
            (Some(ex), Some(ey)) => (ex as i64) < (ey as i64) - bits as i64,
        }
    }

    pub fn to_f64(x: &BigFloat) -> f64 {
        match x.as_raw_parts() {
            Some((words, _, sign, exp, _)) => {
                if x.is_zero() {
                    return 0.0;
                }
                let top = *words.last().expect("mantissa") as f64;
                let v = top * 2f64.powi(exp - 64);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            None => f64::NAN,
        }
    }

    /// The exact binary rational represented by `x`.
    pub fn to_rational(x: &BigFloat) -> BigRational {
        let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
            return BigRational::zero();
        };
        if x.is_zero() {
            return BigRational::zero();
        }
        let mut digits = Vec::with_capacity(words.len() * 2);
        for w in words {
            digits.push(*w as u32);
            digits.push((*w >> 32) as u32);
        }
        let m = BigInt::from(BigUint::new(digits));
        let shift = exp as i64 - 64 * words.len() as i64;
        let mut q = if shift >= 0 {
            BigRational::from_integer(m << shift as usize)
        } else {
            BigRational::new(m, BigInt::one() << (-shift) as usize)
        };
        if sign == Sign::Neg {
            q = -q;
        }
        q
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`, by
/// continued fractions; returns `None` when the approximation is not closer
/// than `2^-tol_bits` in relative terms.
pub fn recognize_rational(x: &BigRational, max_den: &BigInt, tol_bits: usize) -> Option<BigRational> {
    use num_integer::Integer;
    use num_traits::Signed;
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    let mut best = None;
    for _ in 0..200 {
        let a = rest.numer().div_floor(rest.denom());
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if &k2 > max_den {
            break;
        }
        let cand = BigRational::new(h2.clone(), k2.clone());
        let err = (&cand - x).abs();
        let scale = if x.is_zero() { BigRational::one() } else { x.abs() };
        let tol = scale / BigRational::from_integer(BigInt::one() << tol_bits);
        if err <= tol {
            best = Some(cand);
            break;
        }
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        let mut r = Real::new(256);
        let x = BigInt::parse_bytes(b"-27061436852750306309", 10).unwrap();
        let f = r.big(&x);
        assert_eq!(Real::to_rational(&f), BigRational::from_integer(x));
        let pi = r.pi();
        assert!((Real::to_f64(&pi) - std::f64::consts::PI).abs() < 1e-15);
        let third = r.div(&r.int(1), &r.int(3));
        let q = recognize_rational(&Real::to_rational(&third), &BigInt::from(1000), 200).unwrap();
        assert_eq!(q, BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn agm_of_lemniscate() {
        let r = Real::new(128);
        let g = r.agm(&r.int(1), &r.sqrt(&r.int(2)));
        assert!((Real::to_f64(&g) - 1.1981402347355922).abs() < 1e-15);
    }
}
