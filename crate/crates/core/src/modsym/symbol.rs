//! Evaluation of `[a/m]^+`, the Fricke sign and the two-stage
//! normalization of the eigenline.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{kronecker, valuation_int, Valuation};
use crate::curve::{
    fricke_sign_numeric, fricke_terms, is_fundamental_discriminant, l_value, real_period,
    recognize_rational, terms_needed, twisted_l_value, CurveContext, Real,
};
use crate::error::{Error, Result};

use super::eigen::Eigenline;
use super::p1::P1List;

/// Largest twist discriminant tried when pinning a curve with `L(E, 1) = 0`.
pub const MAX_PIN_TWIST: i64 = 400;

/// Calls `f(c, d)` on the Manin symbols whose sum is the path from
/// `infinity` to `a/m` (`gcd(a, m) = 1`, `m >= 1`), using the denominators
/// `q_j` of the continued-fraction convergents: the symbols are
/// `((-1)^(j-1) q_j : q_(j-1))` with `q_(-1) = 0`.
pub fn manin_path(a: i64, m: u64, mut f: impl FnMut(i64, i64)) {
    let (mut x, mut y) = (a, m as i64);
    let (mut q_prev, mut q_cur) = (0i64, 1i64);
    let mut negative = true;
    f(-1, 0);
    loop {
        let r = x.rem_euclid(y);
        if r == 0 {
            break;
        }
        (x, y) = (y, r);
        let q_next = (x / y) * q_cur + q_prev;
        (q_prev, q_cur) = (q_cur, q_next);
        negative = !negative;
        f(if negative { -q_cur } else { q_cur }, q_prev);
    }
}

impl Eigenline {
    /// Raw value of the path from `infinity` to `a/m`, in lowest terms or
    /// not; `m = 0` is the cusp at infinity itself.
    pub fn raw(&self, a: i64, m: u64) -> BigInt {
        if m == 0 {
            return BigInt::zero();
        }
        let g = a.unsigned_abs().gcd(&m).max(1);
        let (a, m) = (a / g as i64, m / g);
        let mut acc = BigInt::zero();
        manin_path(a, m, |c, d| {
            if let Some(i) = self.p1().index(c, d) {
                acc += self.value(i);
            }
        });
        acc
    }
}

/// Eigenvalue of the Fricke involution `z -> -1/(N z)` on the line, read off
/// `phi({W alpha, W beta}) = eps phi({alpha, beta})` over a range of paths.
/// The root number of the curve is `-eps`.
pub fn fricke_sign(line: &Eigenline) -> Result<i8> {
    let n = line.level() as i64;
    let at_zero = line.raw(0, 1);
    let mut sign: Option<i8> = None;
    let mut checked = 0;
    'outer: for m in 1..200u64 {
        for a in 1..=m as i64 {
            if a.unsigned_abs().gcd(&m) != 1 {
                continue;
            }
            let value = line.raw(a, m);
            if value.is_zero() {
                continue;
            }
            // W(a/m) = -m / (N a)
            let (num, den) = (-(m as i64), n * a);
            let image = line.raw(num, den as u64) - &at_zero;
            let eps = if image == value {
                1
            } else if image == -&value {
                -1
            } else {
                return Err(Error::Invariant(format!(
                    "Fricke image of {{oo, {a}/{m}}} is not proportional to the eigenline"
                )));
            };
            if sign.is_some_and(|s| s != eps) {
                return Err(Error::Invariant("inconsistent Fricke eigenvalue".into()));
            }
            sign = Some(eps);
            checked += 1;
            if checked >= 8 {
                break 'outer;
            }
        }
    }
    sign.ok_or_else(|| Error::Eigenline("no nonzero path found for the Fricke test".into()))
}

/// Residues of the p-normalized symbols modulo `p^k`, one per Manin symbol.
#[derive(Debug, Clone)]
pub struct ResidueTable<'a> {
    p1: &'a P1List,
    modulus: u64,
    values: Vec<u64>,
}

impl ResidueTable<'_> {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `[a/m]^+ mod p^k`, following the same path as [`manin_path`] with
    /// the convergent denominators kept reduced modulo the level.
    pub fn eval(&self, a: i64, m: u64) -> u64 {
        let n = self.p1.level();
        let md = self.modulus;
        let mut acc = self.at(n - 1, 0);
        let (mut x, mut y) = (m, a.rem_euclid(m as i64) as u64);
        let (mut q_prev, mut q_cur) = (0u64, 1u64);
        let mut negative = true;
        while y != 0 {
            let partial = x / y;
            let r = x - partial * y;
            let q_next = ((partial % n) * q_cur + q_prev) % n;
            (q_prev, q_cur) = (q_cur, q_next);
            negative = !negative;
            let c = if negative && q_cur != 0 { n - q_cur } else { q_cur };
            acc += self.at(c, q_prev);
            if acc >= md {
                acc -= md;
            }
            (x, y) = (y, r);
        }
        acc
    }

    #[inline]
    fn at(&self, c: u64, d: u64) -> u64 {
        match self.p1.index_reduced(c, d) {
            Some(i) => self.values[i],
            None => 0,
        }
    }
}

/// Options for [`EigenSymbol::normalize`].
#[derive(Debug, Clone, Copy)]
pub struct NormalizeOptions {
    /// Working precision, in bits, for the numerical pinning.
    pub precision_bits: usize,
    /// Largest denominator of the probe set reported after stage one.
    pub probe_bound: u64,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { precision_bits: 128, probe_bound: 20 }
    }
}

/// How the absolute scale was fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pinning {
    /// Against `L(E, 1) / Omega^+`.
    Central,
    /// Against `L(E, chi_D, 1) sqrt(D) / Omega^+` for a real quadratic twist.
    Twist(i64),
}

/// A normalized eigen-symbol for a curve and a prime `p`.
#[derive(Debug, Clone)]
pub struct EigenSymbol {
    line: Eigenline,
    curve_hash: u64,
    ainvs: [BigInt; 5],
    p: u64,
    lambda_p: BigRational,
    lambda_pinned: Option<BigRational>,
    fricke_eps: i8,
    pinning: Option<Pinning>,
}

impl EigenSymbol {
    /// Stage one scales the primitive integer line by `p^-c`, `c` the least
    /// valuation over all Manin symbols, so that every `[a/m]^+` is
    /// p-integral and some is a unit. Stage two pins the absolute scale
    /// numerically, when possible.
    pub fn normalize(line: Eigenline, ctx: &CurveContext, p: u64, opts: &NormalizeOptions) -> Result<Self> {
        let fricke_eps = fricke_sign(&line)?;
        let w = -fricke_eps;
        check_root_number(ctx, w)?;
        let lambda_p = p_scale(&line, p)?;
        let pin = pin_scale(&line, ctx, w, opts.precision_bits);
        let (lambda_pinned, pinning) = match pin {
            Some((r, how)) => (Some(r), Some(how)),
            None => (None, None),
        };
        Ok(EigenSymbol {
            line,
            curve_hash: ctx.curve_hash(),
            ainvs: ctx.model().ainvs().clone(),
            p,
            lambda_p,
            lambda_pinned,
            fricke_eps,
            pinning,
        })
    }

    /// Reassembles a symbol from stored parts; the caller has verified them.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        line: Eigenline,
        curve_hash: u64,
        ainvs: [BigInt; 5],
        p: u64,
        lambda_p: BigRational,
        lambda_pinned: Option<BigRational>,
        pinning: Option<Pinning>,
        fricke_eps: i8,
    ) -> Self {
        EigenSymbol { line, curve_hash, ainvs, p, lambda_p, lambda_pinned, fricke_eps, pinning }
    }

    pub fn line(&self) -> &Eigenline {
        &self.line
    }

    pub fn level(&self) -> u64 {
        self.line.level()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn curve_hash(&self) -> u64 {
        self.curve_hash
    }

    pub fn ainvs(&self) -> &[BigInt; 5] {
        &self.ainvs
    }

    pub fn fricke_eps(&self) -> i8 {
        self.fricke_eps
    }

    /// `w(E) = -eps`.
    pub fn root_number(&self) -> i8 {
        -self.fricke_eps
    }

    pub fn lambda_p(&self) -> &BigRational {
        &self.lambda_p
    }

    pub fn lambda_pinned(&self) -> Option<&BigRational> {
        self.lambda_pinned.as_ref()
    }

    pub fn pinning(&self) -> Option<Pinning> {
        self.pinning
    }

    pub fn raw(&self, a: i64, m: u64) -> BigInt {
        self.line.raw(a, m)
    }

    /// p-normalized `[a/m]^+`.
    pub fn value(&self, a: i64, m: u64) -> BigRational {
        BigRational::from_integer(self.raw(a, m)) * &self.lambda_p
    }

    /// `[a/m]^+` on the absolute scale, if it was pinned.
    pub fn pinned_value(&self, a: i64, m: u64) -> Option<BigRational> {
        let r = self.lambda_pinned.as_ref()?;
        Some(BigRational::from_integer(self.raw(a, m)) * r)
    }

    /// Whether the pinned and p-normalized scales differ by a p-adic unit.
    pub fn scales_agree(&self) -> Option<bool> {
        let r = self.lambda_pinned.as_ref()?;
        let ratio = r / &self.lambda_p;
        Some(crate::arith::valuation(&ratio, self.p) == Valuation::Finite(0))
    }

    /// Least valuation of the p-normalized `[a/m]^+` over `m <= bound`.
    pub fn probe_min_valuation(&self, bound: u64) -> Valuation {
        let mut best = Valuation::Infinite;
        for m in 1..=bound {
            for a in 0..m as i64 {
                if a.unsigned_abs().gcd(&m) == 1 {
                    best = best.min(crate::arith::valuation(&self.value(a, m), self.p));
                }
            }
        }
        best
    }

    /// The table of p-normalized symbols modulo `modulus`, a power of `p`.
    pub fn residues(&self, modulus: u64) -> Result<ResidueTable<'_>> {
        let m = BigInt::from(modulus);
        let num = self.lambda_p.numer();
        let den = self.lambda_p.denom();
        let den_inv = den
            .mod_floor(&m)
            .modinv(&m)
            .ok_or_else(|| Error::Invariant("normalization scale is not p-integral".into()))?;
        let mut values = Vec::with_capacity(self.line.values().len());
        for v in self.line.values() {
            let scaled = v * num;
            // v * num / den must be p-integral: den's p-part divides v * num
            let r = (scaled * &den_inv).mod_floor(&m);
            values.push(r.to_u64().expect("residue below modulus"));
        }
        Ok(ResidueTable { p1: self.line.p1(), modulus, values })
    }
}

/// Stage one: `p^-c` with `c` the least valuation of a Manin-symbol value.
pub(crate) fn p_scale(line: &Eigenline, p: u64) -> Result<BigRational> {
    let c = line
        .values()
        .iter()
        .filter_map(|v| valuation_int(v, p).finite())
        .min()
        .ok_or_else(|| Error::Eigenline("zero functional".into()))?;
    Ok(BigRational::new(BigInt::one(), BigInt::from(p).pow(c as u32)))
}

/// The numerical root number agrees with the Fricke sign wherever the
/// test is conclusive.
fn check_root_number(ctx: &CurveContext, w: i8) -> Result<()> {
    let n = ctx.conductor();
    let an = ctx.an_sequence(fricke_terms(n, 1.3));
    for t in [1.1, 1.3] {
        if let Some(s) = fricke_sign_numeric(&an, n, t) {
            if s != w {
                return Err(Error::Invariant(format!(
                    "Fricke sign gives w = {w} but the numerical functional equation gives {s}"
                )));
            }
        }
    }
    Ok(())
}

/// Stage two: the rational `r` with `[a/m]^+ = r * raw(a, m)`, recognized
/// from the numerical central value (or a real quadratic twist) at two
/// working precisions.
pub fn pin_scale(line: &Eigenline, ctx: &CurveContext, w: i8, bits: usize) -> Option<(BigRational, Pinning)> {
    let n = ctx.conductor();
    let (how, combo) = pinning_combination(line, n, w)?;
    let d = match how {
        Pinning::Central => 1,
        Pinning::Twist(d) => d,
    };
    let an = ctx.an_sequence(terms_needed(n, d as u64, bits + 64));
    let ratio_at = |b: usize| -> Option<BigRational> {
        let r = Real::new(b + 32);
        let omega = real_period(ctx.model(), b);
        let target = if d == 1 {
            r.div(&l_value(&an, n, w, b), &omega)
        } else {
            let l = twisted_l_value(&an, n, w, d, b);
            r.div(&r.mul(&l, &r.sqrt(&r.int(d))), &omega)
        };
        let x = Real::to_rational(&target) / BigRational::from_integer(combo.clone());
        recognize_rational(&x, &(BigInt::one() << 40), 64)
    };
    let low = ratio_at(bits)?;
    let high = ratio_at(bits + 64)?;
    (low == high && !low.is_zero()).then_some((low, how))
}

/// Chooses the raw combination to pin against: `raw(0, 1)` when nonzero,
/// else `sum chi_D(a) raw(a, D)` for the first usable real twist.
fn pinning_combination(line: &Eigenline, level: u64, w: i8) -> Option<(Pinning, BigInt)> {
    let central = line.raw(0, 1);
    if !central.is_zero() {
        return Some((Pinning::Central, central));
    }
    for d in 5..=MAX_PIN_TWIST {
        if !is_fundamental_discriminant(d) || (d as u64).gcd(&level) != 1 {
            continue;
        }
        let twist_sign = w as i32 * twist_character(d, -(level as i64));
        if twist_sign != 1 {
            continue;
        }
        let mut acc = BigInt::zero();
        for a in 1..d {
            let chi = kronecker(d, a as u64);
            if chi != 0 {
                acc += line.raw(a, d as u64) * chi;
            }
        }
        if !acc.is_zero() {
            return Some((Pinning::Twist(d), acc));
        }
    }
    None
}

/// `chi_D(n)` for a positive discriminant and a signed argument.
fn twist_character(d: i64, n: i64) -> i32 {
    kronecker(d, n.unsigned_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::WeierstrassModel;
    use crate::modsym::{extract_eigenline, SymbolSpace};

    fn setup(a: [i64; 5], p: u64) -> (CurveContext, EigenSymbol) {
        let ctx = CurveContext::new(WeierstrassModel::from_i64(a).unwrap(), None).unwrap();
        let space = SymbolSpace::build(ctx.conductor()).unwrap();
        let line = extract_eigenline(&space, &ctx, 0).unwrap();
        let es = EigenSymbol::normalize(line, &ctx, p, &NormalizeOptions::default()).unwrap();
        (ctx, es)
    }

    /// Path decomposition oracle: walk the convergents with explicit
    /// matrices and compare endpoints.
    #[test]
    fn manin_path_telescopes() {
        for (a, m) in [(0i64, 1u64), (3, 7), (-5, 13), (22, 7), (1, 1), (355, 113)] {
            let mut pieces = Vec::new();
            manin_path(a, m, |c, d| pieces.push((c, d)));
            // Each (c : d) symbol with c, d from consecutive convergent
            // denominators satisfies gcd(c, d) = 1 and the last has c = +-m.
            assert!(pieces.iter().all(|&(c, d)| num_integer::gcd(c, d) == 1));
            assert_eq!(pieces.last().unwrap().0.unsigned_abs(), m);
        }
    }

    #[test]
    fn periodicity_and_symmetry() {
        let (_, es) = setup([0, 0, 1, -1, 0], 5);
        let mut rng = 12345u64;
        for _ in 0..200 {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let m = 1 + (rng >> 40) % 300;
            let a = ((rng >> 20) % 1000) as i64 - 500;
            if a.unsigned_abs().gcd(&m) != 1 {
                continue;
            }
            assert_eq!(es.raw(a, m), es.raw(a + m as i64, m));
            assert_eq!(es.raw(a, m), es.raw(-a, m));
        }
    }

    #[test]
    fn root_numbers() {
        let (_, es) = setup([0, 1, 1, -2, 0], 5);
        assert_eq!(es.root_number(), 1);
        assert!(es.pinned_value(0, 1).unwrap().is_zero());
        let (_, es) = setup([0, 0, 1, -1, 0], 5);
        assert_eq!(es.root_number(), -1);
        let (_, es) = setup([0, -1, 1, -10, -20], 5);
        assert_eq!(es.root_number(), 1);
    }

    #[test]
    fn level_eleven_central_value() {
        // L(E,1)/Omega^+ = 1/5 for 11.a1 (torsion 5, c_11 = 5, Sha = 1).
        let (_, es) = setup([0, -1, 1, -10, -20], 7);
        assert_eq!(es.pinned_value(0, 1).unwrap(), BigRational::new(1.into(), 5.into()));
    }

    #[test]
    fn stage_one_makes_all_values_integral() {
        let (_, es) = setup([0, 1, 1, -2, 0], 5);
        assert_eq!(es.probe_min_valuation(20), Valuation::Finite(0));
        let table = es.residues(125).unwrap();
        for m in 1..40u64 {
            for a in 0..m as i64 {
                if a.unsigned_abs().gcd(&m) == 1 {
                    let exact = es.value(a, m);
                    let r = exact.numer() * exact.denom().modinv(&BigInt::from(125)).unwrap();
                    assert_eq!(BigInt::from(table.eval(a, m)), r.mod_floor(&BigInt::from(125)));
                }
            }
        }
    }

    #[test]
    fn hecke_recurrence_on_values() {
        let (ctx, es) = setup([0, 1, 1, -2, 0], 5);
        for (a, m) in [(1i64, 7u64), (3, 10), (5, 12), (2, 389), (0, 1), (17, 60)] {
            for q in [2u64, 3, 7, 11] {
                let mut rhs = es.raw(q as i64 * a, m);
                for j in 0..q as i64 {
                    rhs += es.raw(a + j * m as i64, q * m);
                }
                assert_eq!(es.raw(a, m) * ctx.ap(q), rhs, "q = {q}, a/m = {a}/{m}");
            }
        }
    }

    #[test]
    fn pinned_scale_for_nontrivial_sha() {
        // 1058.e1: L(E,1)/Omega^+ = 25 (Sha of order 25, trivial torsion,
        // Tamagawa product 1).
        let (ctx, es) = setup([1, -1, 0, -332311, -73733731], 5);
        assert_eq!(es.pinning(), Some(Pinning::Central));
        assert_eq!(es.pinned_value(0, 1).unwrap(), BigRational::from_integer(25.into()));
        assert_eq!(es.scales_agree(), Some(true));
        assert_eq!(ctx.conductor(), 1058);
    }

    #[test]
    fn rank_two_pins_through_a_twist() {
        let (_, es) = setup([0, 1, 1, -2, 0], 5);
        assert!(matches!(es.pinning(), Some(Pinning::Twist(_))));
        assert_eq!(es.probe_min_valuation(20), Valuation::Finite(0));
    }
}
