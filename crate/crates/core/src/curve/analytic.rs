//! Real periods and central L-values.

use astro_float::BigFloat;
use num_traits::Signed;

use crate::arith::kronecker;

use super::model::WeierstrassModel;
use super::real::Real;

/// Extra working bits on top of the requested precision.
const GUARD_BITS: usize = 64;

/// Real roots of `4x^3 + b2 x^2 + 2 b4 x + b6`, largest first.
fn two_torsion_roots(model: &WeierstrassModel, r: &mut Real) -> Vec<BigFloat> {
    let b2 = r.big(model.b2());
    let b4 = r.big(model.b4());
    let b6 = r.big(model.b6());
    let f64_of = |x: &num_bigint::BigInt| x.to_string().parse::<f64>().expect("finite");
    let (bb, cc, dd) = (f64_of(model.b2()) / 4.0, f64_of(model.b4()) / 2.0, f64_of(model.b6()) / 4.0);
    let guesses = cubic_roots_f64(bb, cc, dd, model.discriminant().is_positive());

    let two = r.int(2);
    let four = r.int(4);
    let twelve = r.int(12);
    let mut roots = Vec::new();
    for g in guesses {
        let mut x = BigFloat::from_f64(g, r.bits());
        for _ in 0..400 {
            // f = ((4x + b2) x + 2 b4) x + b6, f' = (12 x + 2 b2) x + 2 b4
            let f = r.add(&r.mul(&r.add(&r.mul(&r.add(&r.mul(&four, &x), &b2), &x), &r.mul(&two, &b4)), &x), &b6);
            let df = r.add(&r.mul(&r.add(&r.mul(&twelve, &x), &r.mul(&two, &b2)), &x), &r.mul(&two, &b4));
            if df.is_zero() {
                break;
            }
            let step = r.div(&f, &df);
            x = r.sub(&x, &step);
            if step.is_zero() || r.rel_lt(&step, &x, r.bits() - 2) {
                break;
            }
        }
        roots.push(x);
    }
    roots.sort_by(|a, b| Real::to_f64(b).partial_cmp(&Real::to_f64(a)).expect("finite"));
    roots
}

/// Approximate real roots of `x^3 + b x^2 + c x + d` (three when the
/// discriminant is positive, else one).
fn cubic_roots_f64(b: f64, c: f64, d: f64, three_real: bool) -> Vec<f64> {
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    if three_real {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .collect()
    } else {
        let disc = q * q / 4.0 + p * p * p / 27.0;
        let s = disc.max(0.0).sqrt();
        let t = (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt();
        vec![t - shift]
    }
}

/// The real period `Omega^+`: the integral of the invariant differential over
/// `E(R)`, so twice the identity-component period when `disc > 0`.
pub fn real_period(model: &WeierstrassModel, bits: usize) -> BigFloat {
    let mut r = Real::new(bits + GUARD_BITS);
    let roots = two_torsion_roots(model, &mut r);
    let pi = r.pi();
    if model.discriminant().is_positive() {
        let (e1, e2, e3) = (&roots[0], &roots[1], &roots[2]);
        let a = r.sqrt(&r.sub(e1, e3));
        let b = r.sqrt(&r.sub(e1, e2));
        let omega = r.div(&pi, &r.agm(&a, &b));
        r.mul(&r.int(2), &omega)
    } else {
        let e1 = &roots[0];
        let b2 = r.big(model.b2());
        let b4 = r.big(model.b4());
        // z = |e1 - e2| = sqrt(3 e1^2 + b2 e1 / 2 + b4 / 2)
        let z2 = r.add(
            &r.add(&r.mul(&r.int(3), &r.mul(e1, e1)), &r.div(&r.mul(&b2, e1), &r.int(2))),
            &r.div(&b4, &r.int(2)),
        );
        let z = r.sqrt(&z2);
        let a = r.mul(&r.int(2), &r.sqrt(&z));
        let c = r.add(&r.add(&r.mul(&r.int(2), &z), &r.mul(&r.int(3), e1)), &r.div(&b2, &r.int(4)));
        let b = r.sqrt(&c);
        r.div(&r.mul(&r.int(2), &pi), &r.agm(&a, &b))
    }
}

/// Number of series terms for `bits` of accuracy at conductor `level` and
/// twist modulus `modulus`.
pub fn terms_needed(level: u64, modulus: u64, bits: usize) -> usize {
    let scale = modulus as f64 * (level as f64).sqrt();
    let decay = (bits as f64 + 32.0) * std::f64::consts::LN_2 + scale.ln().max(0.0) * 2.0;
    (scale * decay / (2.0 * std::f64::consts::PI)).ceil() as usize + 10
}

/// `L(E, 1) = (1 + w) sum a_n / n exp(-2 pi n / sqrt N)`; `an[n]` holds `a_n`
/// (index 0 unused).
pub fn l_value(an: &[i64], level: u64, root_number: i8, bits: usize) -> BigFloat {
    twisted_l_value(an, level, root_number, 1, bits)
}

/// `L(E, chi_D, 1)` for a fundamental discriminant `D` coprime to `N`
/// (`D = 1` is the untwisted value). The twist has conductor `N D^2` and
/// root number `w chi_D(-N)`.
pub fn twisted_l_value(an: &[i64], level: u64, root_number: i8, d: i64, bits: usize) -> BigFloat {
    let modulus = d.unsigned_abs();
    let twisted_sign = root_number as i32 * chi(d, -(level as i64));
    let mut r = Real::new(bits + GUARD_BITS);
    if twisted_sign == -1 {
        return r.int(0);
    }
    let terms = terms_needed(level, modulus, bits).min(an.len() - 1);
    let pi = r.pi();
    let scale = r.mul(&r.int(modulus as i64), &r.sqrt(&r.int(level as i64)));
    let x = r.exp(&r.div(&r.mul(&r.int(-2), &pi), &scale));
    let mut power = x.clone();
    let mut sum = r.int(0);
    for (n, &a) in an.iter().enumerate().take(terms + 1).skip(1) {
        let c = a * chi(d, n as i64) as i64;
        if c != 0 {
            let term = r.div(&r.mul(&r.int(c), &power), &r.int(n as i64));
            sum = r.add(&sum, &term);
        }
        power = r.mul(&power, &x);
    }
    r.mul(&r.int(2), &sum)
}

fn chi(d: i64, n: i64) -> i32 {
    if d == 1 {
        return 1;
    }
    // kronecker(D, n) for n of either sign
    let s = kronecker(d, n.unsigned_abs());
    if n < 0 && d < 0 {
        -s
    } else {
        s
    }
}

/// Whether `d` is a fundamental discriminant.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    let squarefree = |m: u64| crate::arith::factorize(m).iter().all(|&(_, e)| e == 1);
    if d == 1 || d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Sign read off the Fricke functional equation of the theta series:
/// `sum a_n e^{-2 pi n / (t sqrt N)} = w t^2 sum a_n e^{-2 pi n t / sqrt N}`.
/// Returns `None` when the two sides are too small to compare.
pub fn fricke_sign_numeric(an: &[i64], level: u64, t: f64) -> Option<i8> {
    let sq = (level as f64).sqrt();
    let side = |y: f64| -> f64 {
        let mut s = 0.0f64;
        for (n, &a) in an.iter().enumerate().skip(1) {
            let e = (-2.0 * std::f64::consts::PI * n as f64 * y).exp();
            if e < 1e-30 {
                break;
            }
            s += a as f64 * e;
        }
        s
    };
    let left = side(1.0 / (t * sq));
    let right = t * t * side(t / sq);
    if left.abs() < 1e-12 || right.abs() < 1e-12 {
        return None;
    }
    let ratio = left / right;
    if (ratio - 1.0).abs() < 1e-6 {
        Some(1)
    } else if (ratio + 1.0).abs() < 1e-6 {
        Some(-1)
    } else {
        None
    }
}

/// Terms needed by [`fricke_sign_numeric`] at the smaller sample point.
pub fn fricke_terms(level: u64, t: f64) -> usize {
    ((level as f64).sqrt() * t * 70.0 / (2.0 * std::f64::consts::PI)).ceil() as usize + 10
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Omega^+ by quadrature: `2 * int_{e1}^inf dx / sqrt(4x^3 + b2 x^2 + 2 b4 x + b6)`
    /// per real component, with the substitution `x = e1 + s^2` (and `1/u` tail).
    fn quadrature_period(model: &WeierstrassModel) -> f64 {
        let f = |x: f64| {
            let b2 = model.b2().to_string().parse::<f64>().unwrap();
            let b4 = model.b4().to_string().parse::<f64>().unwrap();
            let b6 = model.b6().to_string().parse::<f64>().unwrap();
            ((4.0 * x + b2) * x + 2.0 * b4) * x + b6
        };
        let mut r = Real::new(128);
        let roots: Vec<f64> = two_torsion_roots(model, &mut r).iter().map(Real::to_f64).collect();
        let e1 = roots[0];
        // x = e1 + s^2 / (1 - s)^2 for s in (0, 1)
        let n = 200_000;
        let mut acc = 0.0;
        for i in 0..n {
            let s = (i as f64 + 0.5) / n as f64;
            let u = s / (1.0 - s);
            let x = e1 + u * u;
            let dxds = 2.0 * u / ((1.0 - s) * (1.0 - s));
            acc += dxds / f(x).sqrt() / n as f64;
        }
        let component = 2.0 * acc;
        if model.discriminant().is_positive() {
            2.0 * component
        } else {
            component
        }
    }

    #[test]
    fn frozen_period_of_congruent_number_curve() {
        let m = WeierstrassModel::from_i64([0, 0, 0, -1, 0]).unwrap();
        let quad = quadrature_period(&m);
        assert!((quad - 5.2441151086).abs() < 1e-6, "{quad}");
        let omega = Real::to_f64(&real_period(&m, 128));
        assert!((omega - 5.244115108584239).abs() < 1e-12, "{omega}");
    }

    #[test]
    fn negative_discriminant_period_matches_quadrature() {
        for a in [[0, 0, 0, 0, 1], [0, 0, 1, -7, 6], [1, -1, 0, -332311, -73733731], [0, 0, 1, 0, -7]] {
            let m = WeierstrassModel::from_i64(a).unwrap();
            let quad = quadrature_period(&m);
            let omega = Real::to_f64(&real_period(&m, 96));
            assert!(((quad - omega) / omega).abs() < 1e-4, "{a:?}: {quad} vs {omega}");
            assert!(omega > 0.0);
        }
    }

    #[test]
    fn fundamental_discriminants() {
        let pos: Vec<i64> = (2..30).filter(|&d| is_fundamental_discriminant(d)).collect();
        assert_eq!(pos, vec![5, 8, 12, 13, 17, 21, 24, 28, 29]);
        assert!(is_fundamental_discriminant(-4));
        assert!(!is_fundamental_discriminant(-8 * 4));
    }
}
