//! Local torsion at p, the Manin-constant condition and a sampling test for
//! surjectivity of the mod-p Galois representation.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{inv_mod, mul_mod, pow_mod, valuation, Valuation};
use crate::error::{Error, Result};

use super::context::CurveContext;
use super::model::{mod_u64, WeierstrassModel};
use super::points::{ap_good, sqrt_mod, Point, ReducedCurve};
use super::tate::ReductionType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TorsionStatus {
    Trivial,
    NonTrivial,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalTorsionReport {
    pub status: TorsionStatus,
    pub reason: &'static str,
    /// Length of `E(Q_p)[p^inf]` when known.
    pub length: Option<u32>,
}

impl LocalTorsionReport {
    fn trivial(reason: &'static str) -> Self {
        LocalTorsionReport { status: TorsionStatus::Trivial, reason, length: Some(0) }
    }
}

/// Decides whether `E(Q_p)[p]` is nontrivial, for `p >= 5`.
pub fn local_torsion(ctx: &CurveContext, p: u64) -> Result<LocalTorsionReport> {
    if p < 5 {
        return Err(Error::InvalidInput(format!("local torsion needs p >= 5, got {p}")));
    }
    let data = ctx.local_data(p);
    Ok(match data.reduction {
        ReductionType::Good => {
            let ap = ctx.ap(p);
            if ap.rem_euclid(p as i64) != 1 {
                LocalTorsionReport::trivial("good non-anomalous reduction")
            } else {
                match anomalous_split_depth(ctx.model(), p) {
                    Some(1) => LocalTorsionReport::trivial("good anomalous reduction; the reduction sequence does not split"),
                    Some(_) => LocalTorsionReport {
                        status: TorsionStatus::NonTrivial,
                        reason: "good anomalous reduction; a point of order p lifts to p-torsion",
                        length: None,
                    },
                    None => LocalTorsionReport {
                        status: TorsionStatus::Indeterminate,
                        reason: "good anomalous reduction; p too large for the lift test",
                        length: None,
                    },
                }
            }
        }
        ReductionType::SplitMultiplicative => {
            let vj = valuation(&ctx.model().j_invariant(), p);
            let divisible = matches!(vj, Valuation::Finite(v) if v % p as i64 == 0);
            if divisible {
                LocalTorsionReport {
                    status: TorsionStatus::NonTrivial,
                    reason: "split multiplicative reduction with p | ord_p(j)",
                    length: None,
                }
            } else {
                LocalTorsionReport::trivial("split multiplicative reduction with p not dividing ord_p(j)")
            }
        }
        ReductionType::NonSplitMultiplicative => LocalTorsionReport::trivial("non-split multiplicative reduction"),
        ReductionType::Additive => {
            if p > 7 {
                return Ok(LocalTorsionReport::trivial("additive reduction at p > 7"));
            }
            // Minimal model with the cusp at the origin; clear a1 so every a_i is in pZ_p.
            let m = &data.minimal_model;
            let half = inv_mod(2, p).expect("odd prime");
            let s = BigInt::from((p - mod_u64(m.a1(), p)) % p * half % p);
            let m = m.rst_transform(&BigInt::zero(), &s, &BigInt::zero());
            debug_assert!(m.ainvs().iter().all(|a| mod_u64(a, p) == 0));
            let hit = match p {
                5 => mod_u64(m.a4(), 25) == 10,
                _ => mod_u64(m.a6(), 49) == 14,
            };
            if hit {
                LocalTorsionReport {
                    status: TorsionStatus::NonTrivial,
                    reason: "additive reduction satisfying the local congruence",
                    length: None,
                }
            } else {
                LocalTorsionReport::trivial("additive reduction failing the local congruence")
            }
        }
    })
}

/// Affine chord-tangent arithmetic on a Weierstrass model modulo `p^N`,
/// valid while every denominator is a unit.
struct AdicCurve {
    q: u64,
    a: [u64; 5],
}

impl AdicCurve {
    fn sub(&self, x: u64, y: u64) -> u64 {
        (x + self.q - y % self.q) % self.q
    }

    fn add(&self, (x1, y1): (u64, u64), (x2, y2): (u64, u64)) -> Option<(u64, u64)> {
        let q = self.q;
        let [a1, a2, a3, a4, _] = self.a;
        let m = |a: u64, b: u64| mul_mod(a, b, q);
        let (num, den) = if (x1, y1) == (x2, y2) {
            let num = (m(3, m(x1, x1)) + m(2, m(a2, x1)) + a4) % q;
            (self.sub(num, m(a1, y1)), (m(2, y1) + m(a1, x1) + a3) % q)
        } else {
            (self.sub(y2, y1), self.sub(x2, x1))
        };
        let lambda = m(num, inv_mod(den, q)?);
        let nu = self.sub(y1, m(lambda, x1));
        let x3 = self.sub(self.sub((m(lambda, lambda) + m(a1, lambda)) % q, a2), (x1 + x2) % q);
        let y3 = self.sub(self.sub(0, m((lambda + a1) % q, x3)), (nu + a3) % q);
        Some((x3, y3))
    }
}

/// A point of order `p` on the reduction, when `p` divides its order.
fn reduction_point_of_order_p(model: &WeierstrassModel, p: u64) -> Option<Point> {
    let red = ReducedCurve::new(model, p);
    let order = (p as i64 + 1 - ap_good(model, p).ok()?) as u64;
    if !order.is_multiple_of(p) {
        return None;
    }
    // The order is below p^2, so the cofactor is prime to p.
    let cofactor = order / p;
    let [a1, a2, a3, a4, a6] = model.reduce(p);
    for x in 0..p {
        let b = (mul_mod(a1, x, p) + a3) % p;
        let c = (mul_mod(mul_mod(x, x, p), x, p) + mul_mod(mul_mod(a2, x, p), x, p) + mul_mod(a4, x, p) + a6) % p;
        // y^2 + b y = c, so (2y + b)^2 = b^2 + 4c
        let disc = (mul_mod(b, b, p) + mul_mod(4, c, p)) % p;
        let Some(r) = sqrt_mod(disc, p) else { continue };
        let half = inv_mod(2, p).expect("odd prime");
        let y = mul_mod((r + p - b) % p, half, p);
        let t = red.mul(cofactor, Point::Affine(x, y));
        if t != Point::Infinity {
            return Some(t);
        }
    }
    None
}

/// For good anomalous reduction at `p >= 5`: lifts a point `P` of order `p`
/// on the reduction to `E(Z_p)` and returns `v_p(x((p-1)P) - x(P))`, which
/// is the depth of `pP` in the formal group. `E(Q_p)[p]` is nontrivial
/// exactly when the depth is at least 2, since `[p]` maps the first layer
/// of the formal group onto the second. The depth is truncated at `N`,
/// the working precision `p^N < 2^62`; `None` when `p^3` exceeds it.
pub fn anomalous_split_depth(model: &WeierstrassModel, p: u64) -> Option<u32> {
    let mut n = 0u32;
    let mut q = 1u64;
    while q.checked_mul(p).is_some_and(|v| v < 1 << 62) {
        q *= p;
        n += 1;
    }
    if n < 3 {
        return None;
    }
    let Point::Affine(x0, y_red) = reduction_point_of_order_p(model, p)? else { return None };
    let a = model.reduce(q);
    let curve = AdicCurve { q, a };
    let [a1, a2, a3, a4, a6] = a;
    let m = |u: u64, v: u64| mul_mod(u, v, q);
    // Newton on g(y) = y^2 + (a1 x + a3) y - f(x); g' is a unit because P is not 2-torsion.
    let b = (m(a1, x0) + a3) % q;
    let f = (m(m(x0, x0), x0) + m(m(a2, x0), x0) + m(a4, x0) + a6) % q;
    let mut y = y_red;
    for _ in 0..=n {
        let g = curve.sub((m(y, y) + m(b, y)) % q, f);
        if g == 0 {
            break;
        }
        let dg = (m(2, y) + b) % q;
        y = curve.sub(y, m(g, inv_mod(dg, q)?));
    }
    let p0 = (x0, y);
    let k = p - 1;
    let mut acc = p0;
    for bit in (0..63 - k.leading_zeros()).rev() {
        acc = curve.add(acc, acc)?;
        if k >> bit & 1 == 1 {
            acc = curve.add(acc, p0)?;
        }
    }
    // Exact modulo p^N, so the valuation is only truncated at N >= 3.
    let mut d = curve.sub(acc.0, x0);
    let mut v = 0;
    while v < n && d.is_multiple_of(p) {
        d /= p;
        v += 1;
    }
    Some(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ManinStatus {
    Yes,
    AssertRequired,
}

/// The Manin constant is prime to `p` when reduction at `p` is semistable;
/// otherwise the user has to assert it.
pub fn manin_constant_ok(ctx: &CurveContext, p: u64) -> ManinStatus {
    match ctx.local_data(p).reduction {
        ReductionType::Additive => ManinStatus::AssertRequired,
        _ => ManinStatus::Yes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SurjectivityVerdict {
    Surjective,
    ReducibleSuspected,
    Inconclusive,
}

/// Samples Frobenius characteristic polynomials `x^2 - a_l x + l` modulo
/// `p` at the first `sample_count` good primes `l != p`.
///
/// The image is declared surjective once the samples rule out every maximal
/// proper subgroup of `GL_2(F_p)`: a Borel or a split Cartan normalizer (an
/// irreducible polynomial with nonzero trace), a nonsplit Cartan normalizer
/// (a split polynomial with distinct roots and nonzero trace) and the
/// exceptional groups (a ratio `a^2 / l` outside `{0, 1, 2, 4}` and the roots
/// of `u^2 - 3u + 1`).
pub fn rho_surjectivity_probable(ctx: &CurveContext, p: u64, sample_count: usize) -> SurjectivityVerdict {
    if sample_count == 0 {
        return SurjectivityVerdict::Inconclusive;
    }
    let exceptional: Vec<u64> = {
        let mut v = vec![0, 1, 2, 4 % p];
        v.extend((0..p).filter(|&u| (u * u + 1 + 3 * (p - 1) * u).is_multiple_of(p)));
        v
    };
    let (mut irreducible, mut split, mut non_exceptional) = (false, false, false);
    let mut seen_irreducible = false;
    let mut l = 2u64;
    let mut taken = 0;
    while taken < sample_count {
        l = crate::arith::next_prime(l);
        if l == p || ctx.is_bad(l) {
            continue;
        }
        taken += 1;
        let a = ctx.ap(l).rem_euclid(p as i64) as u64;
        let lp = l % p;
        let disc = (a * a + 4 * (p - lp)) % p;
        let is_square = disc != 0 && pow_mod(disc, (p - 1) / 2, p) == 1;
        if disc != 0 && !is_square {
            seen_irreducible = true;
            irreducible |= a != 0;
        }
        if is_square && a != 0 {
            split = true;
        }
        let u = a * a % p * inv_mod(lp, p).expect("l != p") % p;
        if !exceptional.contains(&u) {
            non_exceptional = true;
        }
    }
    if irreducible && split && non_exceptional {
        SurjectivityVerdict::Surjective
    } else if !seen_irreducible && sample_count >= 20 {
        SurjectivityVerdict::ReducibleSuspected
    } else {
        SurjectivityVerdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(a: [i64; 5]) -> CurveContext {
        CurveContext::new(WeierstrassModel::from_i64(a).unwrap(), None).unwrap()
    }

    #[test]
    fn surjectivity_sampling() {
        let c389 = ctx([0, 1, 1, -2, 0]);
        assert_eq!(rho_surjectivity_probable(&c389, 5, 100), SurjectivityVerdict::Surjective);
        assert_eq!(rho_surjectivity_probable(&c389, 5, 0), SurjectivityVerdict::Inconclusive);
        // 11.a1 has a rational 5-torsion point.
        let c11 = ctx([0, -1, 1, -10, -20]);
        assert_eq!(rho_surjectivity_probable(&c11, 5, 100), SurjectivityVerdict::ReducibleSuspected);
        let c5077 = ctx([0, 0, 1, -7, 6]);
        assert_eq!(rho_surjectivity_probable(&c5077, 5, 100), SurjectivityVerdict::Surjective);
    }

    #[test]
    fn local_torsion_branches() {
        let c389 = ctx([0, 1, 1, -2, 0]);
        // a_5(389.a1) = -3
        assert_eq!(c389.ap(5), -3);
        assert_eq!(local_torsion(&c389, 5).unwrap().status, TorsionStatus::Trivial);
        assert_eq!(local_torsion(&c389, 5).unwrap().length, Some(0));
        assert!(local_torsion(&c389, 3).is_err());
        // 11.a1 at 11: split multiplicative with ord(j) = -5, 11 does not divide it.
        let c11 = ctx([0, -1, 1, -10, -20]);
        assert_eq!(local_torsion(&c11, 11).unwrap().status, TorsionStatus::Trivial);
        // 11.a1 at 5: a_5 = 1 is anomalous, and its rational 5-torsion
        // survives in E(Q_5).
        assert_eq!(local_torsion(&c11, 5).unwrap().status, TorsionStatus::NonTrivial);
        assert_eq!(manin_constant_ok(&c389, 5), ManinStatus::Yes);
    }

    #[test]
    fn split_multiplicative_criterion_on_small_models() {
        let mut nontrivial = 0;
        for a2 in -3i64..=3 {
            for a4 in -40i64..=40 {
                for a6 in -40i64..=40 {
                    let Ok(m) = WeierstrassModel::from_i64([1, a2, 0, a4, a6]) else { continue };
                    let Ok(c) = CurveContext::new(m, None) else { continue };
                    if c.local_data(5).reduction != ReductionType::SplitMultiplicative {
                        continue;
                    }
                    let vj = valuation(&c.model().j_invariant(), 5).finite().unwrap();
                    let status = local_torsion(&c, 5).unwrap().status;
                    if vj % 5 == 0 {
                        assert_eq!(status, TorsionStatus::NonTrivial);
                        nontrivial += 1;
                    } else {
                        assert_eq!(status, TorsionStatus::Trivial);
                    }
                }
            }
        }
        assert!(nontrivial > 0);
    }

    #[test]
    fn additive_at_five_needs_assertion() {
        let c = ctx([0, 0, 0, -1, 0]);
        assert_eq!(manin_constant_ok(&c, 5), ManinStatus::Yes);
        // y^2 = x^3 + 5 has additive reduction at 5 (II).
        let c = ctx([0, 0, 0, 0, 5]);
        assert_eq!(manin_constant_ok(&c, 5), ManinStatus::AssertRequired);
        assert_eq!(local_torsion(&c, 5).unwrap().status, TorsionStatus::Trivial);
        // y^2 = x^3 + 10 x + 5: a4 = 10 mod 25 with every a_i in 5Z.
        let c = ctx([0, 0, 0, 10, 5]);
        assert_eq!(c.local_data(5).reduction, ReductionType::Additive);
        assert_eq!(local_torsion(&c, 5).unwrap().status, TorsionStatus::NonTrivial);
    }

    /// Independent route: lift the reduction point by brute force modulo
    /// `p^3`, move the constant term so the lift lies on the model exactly,
    /// and add it to itself `p` times over Q. The depth is `-v_p(x(pP)) / 2`,
    /// or infinite when the lift is itself p-torsion.
    fn depth_by_rationals(model: &WeierstrassModel, p: u64) -> i64 {
        use num_rational::BigRational;
        let Point::Affine(xr, yr) = reduction_point_of_order_p(model, p).unwrap() else { panic!() };
        let a: Vec<i64> = model.ainvs().iter().map(|v| i64::try_from(v).unwrap()).collect();
        let (x0, p3) = (xr as i64, (p * p * p) as i64);
        let g = |y: i64| {
            let v = y as i128 * y as i128 + (a[0] * x0 + a[2]) as i128 * y as i128
                - (x0 as i128).pow(3)
                - a[1] as i128 * (x0 as i128).pow(2)
                - a[3] as i128 * x0 as i128
                - a[4] as i128;
            v.rem_euclid(p3 as i128)
        };
        let y0 = (0..(p * p) as i64).map(|t| yr as i64 + p as i64 * t).find(|&y| g(y) == 0).unwrap();
        let r = |v: i64| BigRational::from_integer(v.into());
        let (a1, a2, a3, a4) = (r(a[0]), r(a[1]), r(a[2]), r(a[3]));
        let add = |(x1, y1): (BigRational, BigRational), (x2, y2): (BigRational, BigRational)| {
            if x1 == x2 && y1 != y2 {
                return None;
            }
            let lambda = if x1 == x2 {
                (r(3) * &x1 * &x1 + r(2) * &a2 * &x1 + &a4 - &a1 * &y1) / (r(2) * &y1 + &a1 * &x1 + &a3)
            } else {
                (&y2 - &y1) / (&x2 - &x1)
            };
            let x3 = &lambda * &lambda + &a1 * &lambda - &a2 - &x1 - &x2;
            let y3 = -(&lambda + &a1) * &x3 - (&y1 - &lambda * &x1) - &a3;
            Some((x3, y3))
        };
        let p0 = (r(x0), r(y0));
        let mut acc = p0.clone();
        for _ in 1..p {
            let Some(next) = add(acc, p0.clone()) else { return i64::MAX };
            acc = next;
        }
        let v = crate::arith::valuation(&acc.0, p).finite().unwrap();
        assert!(v < 0 && v % 2 == 0);
        -v / 2
    }

    #[test]
    fn anomalous_lift_test_matches_rational_route() {
        let mut seen = [0usize; 2];
        let mut check = |a: [i64; 5], p: u64| {
            let Ok(m) = WeierstrassModel::from_i64(a) else { return };
            if m.is_singular_mod(p) || ap_good(&m, p).unwrap().rem_euclid(p as i64) != 1 {
                return;
            }
            let depth = anomalous_split_depth(&m, p).unwrap_or_else(|| panic!("{a:?} at {p}"));
            assert_eq!((depth as i64).min(2), depth_by_rationals(&m, p).min(2), "{a:?} at {p}");
            seen[(depth >= 2) as usize] += 1;
        };
        check([0, -1, 1, -10, -20], 5);
        check([0, -1, 1, 0, 0], 5);
        check([0, 0, 1, -7, 6], 5);
        for a4 in -6..=6 {
            for a6 in -6..=6 {
                check([0, 0, 1, a4, a6], 5);
                check([1, 0, 0, a4, a6], 7);
            }
        }
        assert!(seen[0] > 3 && seen[1] > 0, "{seen:?}");
    }

    #[test]
    fn rank_three_curve_has_local_five_torsion() {
        // a_5 = -4 is anomalous and the lifted point of order 5 has depth 2,
        // agreeing with the rational route above.
        let c = ctx([0, 0, 1, -7, 6]);
        assert_eq!(c.ap(5), -4);
        assert_eq!(anomalous_split_depth(c.model(), 5), Some(2));
        assert_eq!(local_torsion(&c, 5).unwrap().status, TorsionStatus::NonTrivial);
        assert_eq!(anomalous_split_depth(&WeierstrassModel::from_i64([0, -1, 1, -7820, -263580]).unwrap(), 5), Some(1));
        // 11.a3 has a rational 5-torsion point.
        assert_eq!(local_torsion(&ctx([0, -1, 1, 0, 0]), 5).unwrap().status, TorsionStatus::NonTrivial);
    }
}
