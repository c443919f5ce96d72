//! Cusps of `X_0(N)` and the genus formula.

use num_integer::gcd;

use crate::arith::{factorize, kronecker, totient};

/// Canonical label of the `Gamma_0(N)`-class of a cusp `a/c`: with
/// `g = gcd(c, N)` the class is determined by `g` and `a (c/g)` modulo
/// `gcd(g, N/g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CuspClass {
    pub denominator_gcd: u64,
    pub residue: u64,
}

/// Class of `a/c` (with `c = 0` for the cusp at infinity).
pub fn cusp_class(a: i128, c: i128, level: u64) -> CuspClass {
    let (a, c) = if c < 0 { (-a, -c) } else { (a, c) };
    let n = level as i128;
    let g = gcd(c, n);
    let m = gcd(g, n / g);
    let residue = (a.rem_euclid(m) * ((c / g).rem_euclid(m))).rem_euclid(m);
    CuspClass { denominator_gcd: g as u64, residue: residue as u64 }
}

/// Class of `a/c` modulo `a/c ~ -a/c`, as used by the plus quotient.
pub fn plus_cusp_class(a: i128, c: i128, level: u64) -> CuspClass {
    cusp_class(a, c, level).min(cusp_class(-a, c, level))
}

/// Number of cusps of `X_0(N)`: `sum_{d | N} phi(gcd(d, N/d))`.
pub fn cusp_count(level: u64) -> u64 {
    (1..=level)
        .filter(|d| level.is_multiple_of(*d))
        .map(|d| totient(gcd(d, level / d)))
        .sum()
}

/// Genus of `X_0(N)` from the index, elliptic points and cusps.
pub fn genus(level: u64) -> u64 {
    let f = factorize(level);
    let mu = f.iter().fold(level, |acc, &(q, _)| acc / q * (q + 1)) as i64;
    let nu2: i64 = if level.is_multiple_of(4) {
        0
    } else {
        f.iter().map(|&(q, _)| 1 + kronecker(-4, q) as i64).product()
    };
    let nu3: i64 = if level.is_multiple_of(9) {
        0
    } else {
        f.iter().map(|&(q, _)| 1 + kronecker(-3, q) as i64).product()
    };
    let cusps = cusp_count(level) as i64;
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 cusps
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
    assert!(twelve_g >= 0 && twelve_g % 12 == 0, "genus formula");
    (twelve_g / 12) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pairwise equivalence test: `a1/c1 ~ a2/c2` iff
    /// `c2 s1 = c1 s2 (mod gcd(c1 c2, N))` where `a_i s_i = 1 (mod c_i)`.
    fn equivalent(a1: i128, c1: i128, a2: i128, c2: i128, n: i128) -> bool {
        let inv = |a: i128, c: i128| {
            if c <= 1 {
                return 0;
            }
            let (_, x, _) = crate::arith::xgcd(a.rem_euclid(c), c);
            x.rem_euclid(c)
        };
        let (s1, s2) = (inv(a1, c1), inv(a2, c2));
        let m = gcd(c1 * c2, n);
        if m == 0 {
            return true;
        }
        (c2 * s1 - c1 * s2).rem_euclid(m) == 0
    }

    #[test]
    fn class_label_matches_pairwise_test() {
        for n in [8u64, 12, 18, 36, 50, 98, 1058] {
            let mut cusps = Vec::new();
            for c in 1..(2 * n as i128) {
                for a in -7i128..7 {
                    if gcd(a, c) == 1 {
                        cusps.push((a, c));
                    }
                }
            }
            for &(a1, c1) in cusps.iter().step_by(3) {
                for &(a2, c2) in cusps.iter().step_by(5) {
                    assert_eq!(
                        cusp_class(a1, c1, n) == cusp_class(a2, c2, n),
                        equivalent(a1, c1, a2, c2, n as i128),
                        "N={n}: {a1}/{c1} vs {a2}/{c2}"
                    );
                }
            }
            let mut classes: Vec<_> = cusps.iter().map(|&(a, c)| cusp_class(a, c, n)).collect();
            classes.push(cusp_class(1, 0, n));
            classes.sort();
            classes.dedup();
            assert_eq!(classes.len() as u64, cusp_count(n), "N={n}");
        }
    }

    #[test]
    fn genus_values() {
        // Classical small genera; 1058 and 5077 evaluated by hand:
        // 12 + 1656 - 0 - 0 - 6*48 = 12*115 and 12 + 5078 - 6 - 8 - 12 = 12*422.
        let known = [(1, 0), (11, 1), (23, 2), (37, 2), (389, 32), (5077, 422), (1058, 115), (36, 1), (64, 3)];
        for (n, g) in known {
            assert_eq!(genus(n), g, "N={n}");
        }
    }
}
