//! Tate's algorithm: Kodaira symbol, Tamagawa number and conductor exponent
//! at a single prime, minimizing the model along the way.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{inv_mod, mul_mod, pow_mod};

use super::model::{mod_u64, WeierstrassModel};

/// Primes below this bound use exhaustive search over `F_p` for roots.
const BRUTE_FORCE_BELOW: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum KodairaType {
    I0,
    I(u32),
    II,
    III,
    IV,
    I0Star,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I0 => write!(f, "I0"),
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::II => write!(f, "II"),
            KodairaType::III => write!(f, "III"),
            KodairaType::IV => write!(f, "IV"),
            KodairaType::I0Star => write!(f, "I0*"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::IVStar => write!(f, "IV*"),
            KodairaType::IIIStar => write!(f, "III*"),
            KodairaType::IIStar => write!(f, "II*"),
        }
    }
}

impl KodairaType {
    /// Number of irreducible components of the special fibre.
    pub fn components(self) -> u32 {
        match self {
            KodairaType::I0 => 1,
            KodairaType::I(n) => n,
            KodairaType::II => 1,
            KodairaType::III => 2,
            KodairaType::IV => 3,
            KodairaType::I0Star => 5,
            KodairaType::IStar(n) => n + 5,
            KodairaType::IVStar => 7,
            KodairaType::IIIStar => 8,
            KodairaType::IIStar => 9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionType {
    Good,
    SplitMultiplicative,
    NonSplitMultiplicative,
    Additive,
}

impl ReductionType {
    /// `a_q` at a bad prime (and `None` at a good one).
    pub fn bad_ap(self) -> Option<i64> {
        match self {
            ReductionType::Good => None,
            ReductionType::SplitMultiplicative => Some(1),
            ReductionType::NonSplitMultiplicative => Some(-1),
            ReductionType::Additive => Some(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalData {
    pub prime: u64,
    pub kodaira: KodairaType,
    pub tamagawa: u64,
    /// Valuation of the minimal discriminant.
    pub disc_valuation: u32,
    pub conductor_exponent: u32,
    pub reduction: ReductionType,
    /// A model minimal at `prime`, with the singular point (if any) at the
    /// origin modulo `prime`.
    #[serde(skip)]
    pub minimal_model: WeierstrassModel,
}

fn val(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        return u32::MAX / 2;
    }
    let pb = BigInt::from(p);
    let mut y = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

struct Local {
    p: u64,
    pb: BigInt,
}

impl Local {
    fn red(&self, x: &BigInt) -> u64 {
        mod_u64(x, self.p)
    }

    fn divides(&self, x: &BigInt) -> bool {
        self.red(x) == 0
    }

    fn big(&self, x: u64) -> BigInt {
        BigInt::from(x)
    }

    fn inv(&self, x: &BigInt) -> u64 {
        inv_mod(self.red(x), self.p).expect("unit modulo p")
    }

    fn exact_div(&self, x: &BigInt, e: u32) -> BigInt {
        let d = num_traits::pow(self.pb.clone(), e as usize);
        debug_assert!((x % &d).is_zero());
        x / d
    }

    /// Whether `a T^2 + b T + c` has a root modulo p.
    fn quad_has_root(&self, a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
        let p = self.p;
        let (a, b, c) = (self.red(a), self.red(b), self.red(c));
        if p < BRUTE_FORCE_BELOW {
            return (0..p).any(|t| (a * t % p * t + b * t + c).is_multiple_of(p));
        }
        if a == 0 {
            return b != 0 || c == 0;
        }
        let disc = (mul_mod(b, b, p) + p - mul_mod(4 % p, mul_mod(a, c, p), p)) % p;
        disc == 0 || pow_mod(disc, (p - 1) / 2, p) == 1
    }

    /// Number of distinct roots modulo p of the monic `T^3 + b T^2 + c T + d`.
    fn cubic_root_count(&self, b: &BigInt, c: &BigInt, d: &BigInt) -> u32 {
        let p = self.p;
        let f = [self.red(d), self.red(c), self.red(b), 1];
        if p < 1 << 20 {
            let ev = |t: u64| (mul_mod(mul_mod(t, t, p), t, p) + mul_mod(mul_mod(f[2], t, p), t, p) + mul_mod(f[1], t, p) + f[0]) % p;
            return (0..p).filter(|&t| ev(t) == 0).count() as u32;
        }
        poly::distinct_root_count(&f, p)
    }

    /// A root of the cubic that is also a root of its derivative.
    fn cubic_multiple_root(&self, b: &BigInt, c: &BigInt, d: &BigInt, triple: bool) -> u64 {
        let p = self.p;
        let (b, c, d) = (self.red(b), self.red(c), self.red(d));
        if p < BRUTE_FORCE_BELOW {
            let f = |t: u64| (t * t % p * t + b * t % p * t + c * t + d) % p;
            let df = |t: u64| (3 * t * t + 2 * b * t + c) % p;
            return (0..p).find(|&t| f(t) == 0 && df(t) == 0).expect("multiple root exists");
        }
        if triple {
            // T^3 + b T^2 + ... = (T + b/3)^3
            return mul_mod((p - b) % p, inv_mod(3, p).expect("p > 3"), p);
        }
        // double root (b c - 9 d) / (2 (3 c - b^2))
        let num = (mul_mod(b, c, p) + p - mul_mod(9, d, p)) % p;
        let x = (mul_mod(3, c, p) + p - mul_mod(b, b, p)) % p;
        mul_mod(num, inv_mod(mul_mod(2, x, p), p).expect("simple part"), p)
    }
}

/// Runs Tate's algorithm at the prime `p`.
pub fn tate_local_data(model: &WeierstrassModel, p: u64) -> LocalData {
    let lc = Local { p, pb: BigInt::from(p) };
    let zero = BigInt::zero();
    let mut cur = model.clone();
    loop {
        let vdisc = val(cur.discriminant(), p);
        if vdisc == 0 {
            return LocalData {
                prime: p,
                kodaira: KodairaType::I0,
                tamagawa: 1,
                disc_valuation: 0,
                conductor_exponent: 0,
                reduction: ReductionType::Good,
                minimal_model: cur,
            };
        }

        // Move the singular point to the origin.
        let (r, t) = singular_point(&cur, &lc);
        cur = cur.rst_transform(&lc.big(r), &zero, &lc.big(t));
        debug_assert!(lc.divides(cur.a3()) && lc.divides(cur.a4()) && lc.divides(cur.a6()));

        if !lc.divides(cur.c4()) {
            let split = lc.quad_has_root(&BigInt::one(), cur.a1(), &-cur.a2());
            let tamagawa = if split {
                vdisc as u64
            } else if vdisc.is_multiple_of(2) {
                2
            } else {
                1
            };
            return LocalData {
                prime: p,
                kodaira: KodairaType::I(vdisc),
                tamagawa,
                disc_valuation: vdisc,
                conductor_exponent: 1,
                reduction: if split {
                    ReductionType::SplitMultiplicative
                } else {
                    ReductionType::NonSplitMultiplicative
                },
                minimal_model: cur,
            };
        }

        let additive = |kodaira: KodairaType, tamagawa: u64, model: WeierstrassModel| LocalData {
            prime: p,
            kodaira,
            tamagawa,
            disc_valuation: vdisc,
            conductor_exponent: vdisc + 1 - kodaira.components(),
            reduction: ReductionType::Additive,
            minimal_model: model,
        };

        if val(cur.a6(), p) < 2 {
            return additive(KodairaType::II, 1, cur);
        }
        if val(cur.b8(), p) < 3 {
            return additive(KodairaType::III, 2, cur);
        }
        if val(cur.b6(), p) < 3 {
            let a3t = lc.exact_div(cur.a3(), 1);
            let a6t = lc.exact_div(cur.a6(), 2);
            let c = if lc.quad_has_root(&BigInt::one(), &a3t, &-a6t) { 3 } else { 1 };
            return additive(KodairaType::IV, c, cur);
        }

        // Arrange p | a1, a2; p^2 | a3, a4; p^3 | a6.
        let (s, t) = if p == 2 {
            (lc.red(cur.a2()), 2 * lc.red(&lc.exact_div(cur.a6(), 2)))
        } else {
            let half = inv_mod(2, p).expect("odd prime");
            let s = mul_mod((p - lc.red(cur.a1())) % p, half, p);
            let a3t = lc.red(&lc.exact_div(cur.a3(), 1));
            let t = p * mul_mod((p - a3t) % p, half, p);
            (s, t)
        };
        cur = cur.rst_transform(&zero, &lc.big(s), &lc.big(t));
        debug_assert!(
            lc.divides(cur.a1())
                && lc.divides(cur.a2())
                && val(cur.a3(), p) >= 2
                && val(cur.a4(), p) >= 2
                && val(cur.a6(), p) >= 3
        );

        let b = lc.exact_div(cur.a2(), 1);
        let c = lc.exact_div(cur.a4(), 2);
        let d = lc.exact_div(cur.a6(), 3);
        let w = 27 * &d * &d - &b * &b * &c * &c + 4 * &b * &b * &b * &d - 18 * &b * &c * &d + 4 * &c * &c * &c;
        let x = 3 * &c - &b * &b;
        if !lc.divides(&w) {
            let roots = lc.cubic_root_count(&b, &c, &d) as u64;
            return additive(KodairaType::I0Star, 1 + roots, cur);
        }
        if !lc.divides(&x) {
            // Double root: move it to zero and run the I_m* subprocedure.
            let r = lc.cubic_multiple_root(&b, &c, &d, false);
            cur = cur.rst_transform(&(lc.big(r) * &lc.pb), &zero, &zero);
            let (m, tam, model) = i_m_star(cur, &lc);
            return additive(KodairaType::IStar(m), tam, model);
        }

        // Triple root.
        let r = lc.cubic_multiple_root(&b, &c, &d, true);
        cur = cur.rst_transform(&(lc.big(r) * &lc.pb), &zero, &zero);
        let a3t = lc.exact_div(cur.a3(), 2);
        let a6t = lc.exact_div(cur.a6(), 4);
        if !lc.divides(&(&a3t * &a3t + 4 * &a6t)) {
            let c = if lc.quad_has_root(&BigInt::one(), &a3t, &-a6t) { 3 } else { 1 };
            return additive(KodairaType::IVStar, c, cur);
        }
        let t = if p == 2 {
            let q = lc.red(&a6t);
            -(lc.big(q) * &lc.pb * &lc.pb)
        } else {
            let half = inv_mod(2, p).expect("odd prime");
            lc.big(mul_mod((p - lc.red(&a3t)) % p, half, p)) * &lc.pb * &lc.pb
        };
        cur = cur.rst_transform(&zero, &zero, &t);
        if val(cur.a4(), p) < 4 {
            return additive(KodairaType::IIIStar, 2, cur);
        }
        if val(cur.a6(), p) < 6 {
            return additive(KodairaType::IIStar, 1, cur);
        }
        // Not minimal: divide by p and start again.
        cur = cur.scale_down(&lc.pb).expect("divisibility checked by the algorithm");
    }
}

fn singular_point(model: &WeierstrassModel, lc: &Local) -> (u64, u64) {
    let p = lc.p;
    if p < BRUTE_FORCE_BELOW {
        let [a1, a2, a3, a4, a6] = model.reduce(p).map(|v| v as i64);
        let p = p as i64;
        for x in 0..p {
            for y in 0..p {
                let f = (y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6).rem_euclid(p);
                let fx = (a1 * y - 3 * x * x - 2 * a2 * x - a4).rem_euclid(p);
                let fy = (2 * y + a1 * x + a3).rem_euclid(p);
                if f == 0 && fx == 0 && fy == 0 {
                    return (x as u64, y as u64);
                }
            }
        }
        unreachable!("a curve with bad reduction has a singular point");
    }
    let r = if lc.divides(model.c4()) {
        let inv12 = inv_mod(12, p).expect("p > 3");
        mul_mod((p - lc.red(model.b2())) % p, inv12, p)
    } else {
        let inv = lc.inv(&(12 * model.c4()));
        let num = lc.red(&(model.c6() + model.b2() * model.c4()));
        mul_mod((p - num) % p, inv, p)
    };
    let half = inv_mod(2, p).expect("odd prime");
    let t = mul_mod((p - lc.red(&(model.a1() * BigInt::from(r) + model.a3()))) % p, half, p);
    (r, t)
}

/// The `I_m*` loop; the double root of the cubic sits at zero on entry.
fn i_m_star(mut cur: WeierstrassModel, lc: &Local) -> (u32, u64, WeierstrassModel) {
    let p = lc.p;
    let zero = BigInt::zero();
    let half = if p == 2 { 0 } else { inv_mod(2, p).expect("odd prime") };
    let mut ix = 3u32;
    let mut iy = 3u32;
    let mut mx = &lc.pb * &lc.pb;
    let mut my = mx.clone();
    loop {
        let a3t = cur.a3() / &my;
        let a6t = cur.a6() / (&mx * &my);
        if !lc.divides(&(&a3t * &a3t + 4 * &a6t)) {
            let c = if lc.quad_has_root(&BigInt::one(), &a3t, &-a6t) { 4 } else { 2 };
            return (ix + iy - 5, c, cur);
        }
        let t = if p == 2 {
            &my * lc.big(lc.red(&a6t))
        } else {
            &my * lc.big(mul_mod((p - lc.red(&a3t)) % p, half, p))
        };
        cur = cur.rst_transform(&zero, &zero, &t);
        my *= &lc.pb;
        iy += 1;

        let a2t = lc.exact_div(cur.a2(), 1);
        let a4t = cur.a4() / (&lc.pb * &mx);
        let a6t = cur.a6() / (&mx * &my);
        if !lc.divides(&(&a4t * &a4t - 4 * &a6t * &a2t)) {
            let c = if lc.quad_has_root(&a2t, &a4t, &a6t) { 4 } else { 2 };
            return (ix + iy - 5, c, cur);
        }
        let r = if p == 2 {
            &mx * lc.big(mul_mod(lc.red(&a6t), lc.red(&a2t), p))
        } else {
            let inv = lc.inv(&(2 * &a2t));
            &mx * lc.big(mul_mod((p - lc.red(&a4t)) % p, inv, p))
        };
        cur = cur.rst_transform(&r, &zero, &zero);
        mx *= &lc.pb;
        ix += 1;
    }
}

mod poly {
    //! Dense polynomials over `F_p`, coefficients in increasing degree.

    use crate::arith::{inv_mod, mul_mod};

    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.len() > 1 && *a.last().expect("nonempty") == 0 {
            a.pop();
        }
        a
    }

    fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let m = trim(m.to_vec());
        let lead_inv = inv_mod(*m.last().expect("nonempty"), p).expect("nonzero lead");
        while a.len() >= m.len() && !(a.len() == 1 && a[0] == 0) {
            let shift = a.len() - m.len();
            let coef = mul_mod(*a.last().expect("nonempty"), lead_inv, p);
            for (i, &mi) in m.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - mul_mod(coef, mi, p)) % p;
            }
            a = trim(a);
            if a.len() < m.len() {
                break;
            }
        }
        a
    }

    fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(ai, bj, p)) % p;
            }
        }
        rem(&out, m, p)
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !(b.len() == 1 && b[0] == 0) {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Degree of `gcd(f, T^p - T)`.
    pub fn distinct_root_count(f: &[u64], p: u64) -> u32 {
        let mut acc = vec![1u64];
        let mut base = vec![0u64, 1];
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_rem(&acc, &base, f, p);
            }
            base = mul_rem(&base, &base, f, p);
            e >>= 1;
        }
        acc.resize(acc.len().max(2), 0);
        acc[1] = (acc[1] + p - 1) % p;
        (gcd(f, &acc, p).len() - 1) as u32
    }

    #[cfg(test)]
    mod tests {
        #[test]
        fn root_counts() {
            let p = 1_000_003u64;
            // (T-1)(T-2)(T-3) = T^3 - 6T^2 + 11T - 6
            let f = [p - 6, 11, p - 6, 1];
            assert_eq!(super::distinct_root_count(&f, p), 3);
            // T^3 - 2 over a prime = 1 mod 3 has 0 or 3 roots; over p = 2 mod 3 exactly one.
            let q = 1_000_037u64;
            assert_eq!(q % 3, 2);
            assert_eq!(super::distinct_root_count(&[q - 2, 0, 0, 1], q), 1);
        }
    }
}

/// `v_q` of the discriminant of `model`; used for global minimality checks.
pub fn disc_valuation(model: &WeierstrassModel, q: u64) -> u32 {
    val(model.discriminant(), q)
}
