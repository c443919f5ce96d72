//! Primality and factorization of machine and multiprecision integers.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::modular::{mul_mod, pow_mod};

/// Witnesses that make Miller-Rabin deterministic below 2^64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= bound`, by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n + 1;
    while !is_prime(m) {
        m += 1;
    }
    m
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's variant of Pollard rho; returns a nontrivial factor of the odd
/// composite `n`.
fn rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut q) = (2u64, 2u64, 1u64);
        let mut g = 1u64;
        let mut r = 1u64;
        let mut ys = 0u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn push_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho(n);
    push_factors(d, out);
    push_factors(n / d, out);
}

fn collect(mut primes: Vec<u64>) -> Vec<(u64, u32)> {
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

/// Prime factorization of `n >= 1` as sorted `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize(0) is undefined");
    let mut primes = Vec::new();
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while n.is_multiple_of(q) {
            primes.push(q);
            n /= q;
        }
    }
    let mut q = 41;
    while q < 1000 && q * q <= n {
        while n.is_multiple_of(q) {
            primes.push(q);
            n /= q;
        }
        q += 2;
    }
    push_factors(n, &mut primes);
    collect(primes)
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (q, _)| acc / q * (q - 1))
}

/// Probabilistic primality for integers beyond 64 bits (40 random bases,
/// seeded so the result is reproducible).
pub fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(m) = n.to_u64() {
        return is_prime(m);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let two = BigUint::from(2u32);
    'witness: for _ in 0..40 {
        let a = rng.gen_biguint_range(&two, &nm1);
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = BigUint::one();
        let mut steps = 0u64;
        while g.is_one() && steps < 1 << 24 {
            let mut q = BigUint::one();
            for _ in 0..64 {
                x = f(&x);
                y = f(&f(&y));
                let diff = if x > y { &x - &y } else { &y - &x };
                q = q * diff % n;
            }
            g = q.gcd(n);
            steps += 64;
        }
        if !g.is_one() && &g != n {
            return g;
        }
        // Backtrack one step at a time when the batch overshot.
        if &g == n {
            let mut x = BigUint::from(2u32);
            let mut y = x.clone();
            loop {
                x = f(&x);
                y = f(&f(&y));
                let diff = if x > y { &x - &y } else { &y - &x };
                let g = diff.gcd(n);
                if !g.is_one() {
                    if &g != n {
                        return g;
                    }
                    break;
                }
            }
        }
        c += 1u32;
    }
}

fn push_factors_big(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if let Some(m) = n.to_u64() {
        let mut small = Vec::new();
        push_factors(m, &mut small);
        out.extend(small.into_iter().map(BigUint::from));
        return;
    }
    if is_probable_prime_big(&n) {
        out.push(n);
        return;
    }
    let d = rho_big(&n);
    let e = &n / &d;
    push_factors_big(d, out);
    push_factors_big(e, out);
}

/// Factorization of an arbitrary positive integer. Large cofactors are
/// certified only probabilistically.
pub fn factorize_big(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factorize_big(0) is undefined");
    let mut n = n.clone();
    let mut primes: Vec<BigUint> = Vec::new();
    let mut q = 2u64;
    while q < 100_000 {
        let qb = BigUint::from(q);
        if &qb * &qb > n {
            break;
        }
        loop {
            let (quot, rem) = n.div_rem(&qb);
            if !rem.is_zero() {
                break;
            }
            primes.push(qb.clone());
            n = quot;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    push_factors_big(n, &mut primes);
    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    fn trial_division_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn frozen_primality() {
        assert!(trial_division_is_prime(93251));
        assert!(is_prime(93251));
        assert!(!is_prime(1058));
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn agrees_with_trial_division_below_5000() {
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial_division_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn frozen_factorizations() {
        assert_eq!(trial_division_factor(1058), vec![(2, 1), (23, 2)]);
        assert_eq!(factorize(1058), vec![(2, 1), (23, 2)]);
        assert_eq!(trial_division_factor(423801), vec![(3, 2), (7, 2), (31, 2)]);
        assert_eq!(factorize(423801), vec![(3, 2), (7, 2), (31, 2)]);
        assert_eq!(factorize(1), vec![]);
        let semi = 4294967291u64 * 4294967279u64;
        assert_eq!(factorize(semi), vec![(4294967279, 1), (4294967291, 1)]);
    }

    #[test]
    fn big_factorization_recovers_product() {
        let p1 = BigUint::from(1_000_000_007u64);
        let p2 = BigUint::from(998_244_353u64);
        let p3 = BigUint::from(18446744073709551557u64);
        let n = &p1 * &p1 * &p2 * &p3 * BigUint::from(12u32);
        let f = factorize_big(&n);
        assert_eq!(
            f,
            vec![
                (BigUint::from(2u32), 2),
                (BigUint::from(3u32), 1),
                (p2, 1),
                (p1, 2),
                (p3, 1)
            ]
        );
    }

    #[test]
    fn sieve_matches_predicate() {
        let ps = primes_up_to(1000);
        assert_eq!(ps.len(), 168);
        assert!(ps.iter().all(|&q| is_prime(q)));
        assert_eq!(next_prime(89), 97);
        assert_eq!(totient(1058), 506);
    }

    proptest::proptest! {
        #[test]
        fn factorization_multiplies_back(n in 1u64..1_000_000_000_000) {
            let f = factorize(n);
            let prod: u64 = f.iter().map(|&(q, e)| q.pow(e)).product();
            proptest::prop_assert_eq!(prod, n);
            proptest::prop_assert!(f.iter().all(|&(q, _)| is_prime(q)));
        }
    }
}
