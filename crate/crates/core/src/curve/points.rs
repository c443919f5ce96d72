//! Point counting and group structure over prime fields.

use rand::Rng;

use crate::arith::{inv_mod, mul_mod, pow_mod};
use crate::error::{Error, Result};

use super::model::WeierstrassModel;

/// Square root modulo an odd prime (Tonelli-Shanks).
pub fn sqrt_mod(a: u64, l: u64) -> Option<u64> {
    let a = a % l;
    if a == 0 || l == 2 {
        return Some(a);
    }
    if pow_mod(a, (l - 1) / 2, l) != 1 {
        return None;
    }
    let s = (l - 1).trailing_zeros();
    let q = (l - 1) >> s;
    let z = (2..l).find(|&z| pow_mod(z, (l - 1) / 2, l) == l - 1).expect("non-residue exists");
    let mut m = s;
    let mut c = pow_mod(z, q, l);
    let mut t = pow_mod(a, q, l);
    let mut r = pow_mod(a, q.div_ceil(2), l);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, l);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), l);
        m = i;
        c = mul_mod(b, b, l);
        t = mul_mod(t, c, l);
        r = mul_mod(r, b, l);
    }
    Some(r)
}

/// Trace of Frobenius `a_l = -sum_x chi(x^3 + A x + B)` on the short model,
/// for primes `l >= 5` of good reduction.
pub fn ap_character_sum(model: &WeierstrassModel, l: u64) -> Result<i64> {
    if l < 5 {
        return Err(Error::InvalidInput(format!("character sum needs l >= 5, got {l}")));
    }
    if model.is_singular_mod(l) {
        return Err(Error::InvalidInput(format!("{l} is a prime of bad reduction")));
    }
    if l > u32::MAX as u64 {
        return Err(Error::InvalidInput(format!("{l} is too large for a character sum")));
    }
    let (a, b) = model.short_model_mod(l);
    let n = l as usize;
    let mut square = vec![false; n];
    for y in 1..l.div_ceil(2) {
        square[(y * y % l) as usize] = true;
    }
    let mut sum: i64 = 0;
    for x in 0..l {
        let v = ((x * x % l * x) % l + a * x % l + b) % l;
        if v != 0 {
            sum += if square[v as usize] { 1 } else { -1 };
        }
    }
    Ok(-sum)
}

/// Number of affine solutions of the Weierstrass equation over `F_l`, by
/// direct enumeration of all `(x, y)`.
pub fn count_affine_exhaustive(model: &WeierstrassModel, l: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = model.reduce(l);
    let mut count = 0;
    for x in 0..l {
        let rhs = (x * x % l * x + a2 * x % l * x + a4 * x + a6) % l;
        for y in 0..l {
            let lhs = (y * y + a1 * x % l * y + a3 * y) % l;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    count
}

/// `a_l = l + 1 - #E(F_l)` by exhaustive enumeration.
pub fn ap_exhaustive(model: &WeierstrassModel, l: u64) -> i64 {
    l as i64 + 1 - (count_affine_exhaustive(model, l) as i64 + 1)
}

/// `a_l` at a prime of good reduction; exhaustive for `l < 5`.
pub fn ap_good(model: &WeierstrassModel, l: u64) -> Result<i64> {
    if model.is_singular_mod(l) {
        return Err(Error::InvalidInput(format!("{l} is a prime of bad reduction")));
    }
    if l < 5 {
        Ok(ap_exhaustive(model, l))
    } else {
        ap_character_sum(model, l)
    }
}

/// The reduction of a curve modulo a prime of good reduction, with the
/// chord-tangent group law on the general Weierstrass form.
#[derive(Debug, Clone, Copy)]
pub struct ReducedCurve {
    l: u64,
    a: [u64; 5],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine(u64, u64),
}

impl ReducedCurve {
    pub fn new(model: &WeierstrassModel, l: u64) -> Self {
        ReducedCurve { l, a: model.reduce(l) }
    }

    fn sub(&self, x: u64, y: u64) -> u64 {
        (x + self.l - y % self.l) % self.l
    }

    pub fn contains(&self, p: Point) -> bool {
        let l = self.l;
        let [a1, a2, a3, a4, a6] = self.a;
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => {
                let lhs = (mul_mod(y, y, l) + mul_mod(mul_mod(a1, x, l), y, l) + mul_mod(a3, y, l)) % l;
                let rhs = (mul_mod(mul_mod(x, x, l), x, l) + mul_mod(mul_mod(a2, x, l), x, l) + mul_mod(a4, x, l) + a6) % l;
                lhs == rhs
            }
        }
    }

    pub fn neg(&self, p: Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let l = self.l;
                let [a1, _, a3, _, _] = self.a;
                let t = (y + mul_mod(a1, x, l) + a3) % l;
                Point::Affine(x, (l - t) % l)
            }
        }
    }

    pub fn add(&self, p: Point, q: Point) -> Point {
        let l = self.l;
        let [a1, a2, a3, a4, _] = self.a;
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q,
            (_, Point::Infinity) => return p,
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            let denom = (2 * y1 + mul_mod(a1, x1, l) + a3) % l;
            if y1 != y2 || denom == 0 {
                return Point::Infinity;
            }
            let num = (3 * mul_mod(x1, x1, l) + 2 * mul_mod(a2, x1, l) + a4 + l - mul_mod(a1, y1, l)) % l;
            mul_mod(num, inv_mod(denom, l).expect("nonzero"), l)
        } else {
            mul_mod(self.sub(y2, y1), inv_mod(self.sub(x2, x1), l).expect("nonzero"), l)
        };
        let nu = self.sub(y1, mul_mod(lambda, x1, l));
        let x3 = self.sub(
            self.sub((mul_mod(lambda, lambda, l) + mul_mod(a1, lambda, l)) % l, a2),
            (x1 + x2) % l,
        );
        let y3 = self.sub(self.sub(0, mul_mod((lambda + a1) % l, x3, l)), (nu + a3) % l);
        Point::Affine(x3, y3)
    }

    pub fn mul(&self, mut n: u64, p: Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = p;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            n >>= 1;
        }
        acc
    }

    /// A uniformly chosen x-coordinate is tried until the fibre is nonempty;
    /// one of the (at most two) points above it is returned.
    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        let l = self.l;
        let [a1, a2, a3, a4, a6] = self.a;
        loop {
            let x = rng.gen_range(0..l);
            let b = (mul_mod(a1, x, l) + a3) % l;
            let c = (mul_mod(mul_mod(x, x, l), x, l) + mul_mod(mul_mod(a2, x, l), x, l) + mul_mod(a4, x, l) + a6) % l;
            // y^2 + b y - c = 0
            if l == 2 {
                let ys: Vec<u64> = (0..2).filter(|&y| (y * y + b * y + l - c).is_multiple_of(l)).collect();
                if !ys.is_empty() {
                    return Point::Affine(x, ys[rng.gen_range(0..ys.len())]);
                }
                continue;
            }
            let disc = (mul_mod(b, b, l) + 4 * c) % l;
            if let Some(s) = sqrt_mod(disc, l) {
                let s = if rng.gen_bool(0.5) { s } else { (l - s) % l };
                let inv2 = l.div_ceil(2);
                let y = mul_mod((s + l - b) % l, inv2, l);
                return Point::Affine(x, y);
            }
        }
    }
}

/// Structure `Z/p^e1 x Z/p^e2` of the p-Sylow subgroup of `E(F_l)`.
///
/// The exponent comes from random points pushed into the Sylow subgroup by
/// the prime-to-p cofactor; `samples` points bound the failure probability
/// by `p^-samples`.
pub fn sylow_structure<R: Rng>(
    model: &WeierstrassModel,
    l: u64,
    p: u64,
    samples: usize,
    rng: &mut R,
) -> Result<(u32, u32)> {
    let a = ap_good(model, l)?;
    let order = (l as i64 + 1 - a) as u64;
    let mut v = 0u32;
    let mut cofactor = order;
    while cofactor.is_multiple_of(p) {
        cofactor /= p;
        v += 1;
    }
    if v == 0 {
        return Ok((0, 0));
    }
    let curve = ReducedCurve::new(model, l);
    let mut e1 = 0u32;
    for _ in 0..samples {
        let mut q = curve.mul(cofactor, curve.random_point(rng));
        let mut j = 0;
        while q != Point::Infinity {
            q = curve.mul(p, q);
            j += 1;
        }
        e1 = e1.max(j);
        if e1 == v {
            break;
        }
    }
    Ok((e1, v - e1))
}

/// Number of samples needed for failure probability below `2^-40`.
pub fn sylow_samples(p: u64) -> usize {
    (40.0 / (p as f64).log2()).ceil() as usize
}
