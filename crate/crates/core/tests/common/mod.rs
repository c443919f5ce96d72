//! Checks shared by the property tests and the acceptance run.

#![allow(dead_code)]

use std::sync::OnceLock;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kurihara::arith::{is_prime, primes_up_to};
use kurihara::curve::{ap_character_sum, ap_exhaustive, parse_ainvs, CurveContext};
use kurihara::kolyvagin::{primitive_roots, sieve, KolyvaginPrime, Modulus};
use kurihara::kurihara::{scan, DeltaCollection, DeltaEvaluator, DeltaValue, ScanConfig};
use kurihara::modsym::{extract_eigenline, EigenSymbol, NormalizeOptions, SymbolSpace};

pub const P: u64 = 5;

pub struct Case {
    pub name: &'static str,
    pub ctx: CurveContext,
    pub symbol: EigenSymbol,
    pub primes: Vec<KolyvaginPrime>,
    pub scan: DeltaCollection,
}

impl Case {
    fn build(name: &'static str, ainvs: &str) -> Case {
        let ctx = CurveContext::new(parse_ainvs(ainvs).unwrap(), Some(name.into())).unwrap();
        let space = SymbolSpace::build(ctx.conductor()).unwrap();
        let line = extract_eigenline(&space, &ctx, 0).unwrap();
        let symbol = EigenSymbol::normalize(line, &ctx, P, &NormalizeOptions::default()).unwrap();
        let primes = sieve(&ctx, P, 1, 200).unwrap();
        let eval = DeltaEvaluator::new(&symbol, 1).unwrap();
        let scan = scan(&eval, name, &primes, &ScanConfig::new(P, 1, 200, 3, 6)).unwrap();
        Case { name, ctx, symbol, primes, scan }
    }

    pub fn eval(&self) -> DeltaEvaluator<'_> {
        DeltaEvaluator::new(&self.symbol, 1).unwrap()
    }

    pub fn modulus(&self, factors: &[u64]) -> Modulus {
        let chosen = factors
            .iter()
            .map(|f| self.primes.iter().find(|l| l.ell() == *f).unwrap().clone())
            .collect();
        Modulus::new(chosen).unwrap()
    }

    /// Every scanned modulus of either parity, as factor lists.
    pub fn scanned(&self) -> Vec<Vec<u64>> {
        let mut out: Vec<Vec<u64>> = self.scan.entries.iter().map(|e| e.factors.clone()).collect();
        out.extend(self.scan.audits.iter().map(|a| a.factors.clone()));
        out.retain(|f| !f.is_empty());
        out
    }
}

pub fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        vec![
            Case::build("37.a1", "[0,0,1,-1,0]"),
            Case::build("389.a1", "[0,1,1,-2,0]"),
            Case::build("1058.e1", "[1,-1,0,-332311,-73733731]"),
        ]
    })
}

fn sym(es: &EigenSymbol, a: i64, m: u64) -> BigRational {
    es.value(a.rem_euclid(m as i64), m)
}

/// `a_q [a/m]^+ = [qa/m]^+ + sum_j [(a + jm)/(qm)]^+` for `q` prime to the level.
pub fn hecke_recurrence(case: &Case, a: i64, m: u64, q: u64) -> Result<(), String> {
    let es = &case.symbol;
    let lhs = sym(es, a, m) * BigRational::from_integer(case.ctx.ap(q).into());
    let mut rhs = sym(es, q as i64 * a, m);
    for j in 0..q as i64 {
        rhs += sym(es, a + j * m as i64, q * m);
    }
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("{}: a={a} m={m} q={q}: {lhs} != {rhs}", case.name))
    }
}

/// Random `(a, m, q)` with `q` a prime not dividing the level.
pub fn hecke_triples(case: &Case, count: usize, seed: u64) -> Vec<(i64, u64, u64)> {
    let level = case.ctx.conductor();
    let qs: Vec<u64> = primes_up_to(40).into_iter().filter(|q| !level.is_multiple_of(*q)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.gen_range(1..150u64);
            (rng.gen_range(-300..300i64), m, qs[rng.gen_range(0..qs.len())])
        })
        .collect()
}

/// Every wrong-parity sample vanishes; returns the number of samples.
pub fn wrong_parity_vanishes(case: &Case) -> Result<usize, String> {
    let audits = &case.scan.audits;
    if audits.is_empty() {
        return Err(format!("{}: no wrong-parity samples", case.name));
    }
    match audits.iter().find(|a| a.valuation.is_nonzero()) {
        Some(a) => Err(format!("{}: delta_{} has valuation {}", case.name, a.n, a.valuation)),
        None => Ok(audits.len()),
    }
}

/// The top Mazur-Tate coefficient equals `delta_n` on every scanned `n`.
pub fn mazur_tate_matches(case: &Case) -> Result<usize, String> {
    let eval = case.eval();
    let scanned = case.scanned();
    for factors in &scanned {
        let m = case.modulus(factors);
        let kn = eval.delta(&m, Some(1)).map_err(|e| e.to_string())?;
        let top = eval.mazur_tate(&m, 1).map_err(|e| e.to_string())?.top();
        if kn.value != DeltaValue::Residue(top) {
            return Err(format!("{}: n={} delta {:?} top {top}", case.name, m.n(), kn.value));
        }
    }
    Ok(scanned.len())
}

/// Recomputing with other primitive roots keeps every valuation.
pub fn root_change_preserves(case: &Case, choice: usize) -> Result<usize, String> {
    let eval = case.eval();
    let scanned = case.scanned();
    for factors in &scanned {
        let m = case.modulus(factors);
        let base = eval.delta(&m, Some(1)).map_err(|e| e.to_string())?;
        let moved = m
            .primes()
            .iter()
            .map(|l| {
                let roots = primitive_roots(l.ell(), choice + 2);
                l.with_root(roots[(choice + 1) % roots.len()])
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let other = eval.delta(&Modulus::new(moved).unwrap(), Some(1)).map_err(|e| e.to_string())?;
        if base.valuation != other.valuation {
            return Err(format!("{}: n={} {} vs {}", case.name, m.n(), base.valuation, other.valuation));
        }
    }
    Ok(scanned.len())
}

/// Character sum against exhaustive count for good `5 <= l <= bound`;
/// `l = 2, 3` go through the point count used by the curve itself.
pub fn character_sums_match(case: &Case, bound: u64) -> Result<usize, String> {
    let model = case.ctx.model();
    let mut checked = 0;
    for l in primes_up_to(bound) {
        if case.ctx.is_bad(l) {
            continue;
        }
        let count = ap_exhaustive(model, l);
        let fast = if l >= 5 { ap_character_sum(model, l).map_err(|e| e.to_string())? } else { case.ctx.ap(l) };
        if fast != count {
            return Err(format!("{}: a_{l} {fast} vs {count}", case.name));
        }
        checked += 1;
    }
    Ok(checked)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn phi(n: u64) -> u64 {
    (1..=n).filter(|&x| gcd(x, n) == 1).count() as u64
}

/// Genus of `X_0(N)` by counting: the index from `P^1(Z/N)`, elliptic
/// points from roots of `x^2 + 1` and `x^2 + x + 1`, and cusps.
pub fn genus_by_counting(n: u64) -> u64 {
    let pairs = (0..n).flat_map(|c| (0..n).map(move |d| (c, d))).filter(|&(c, d)| gcd(gcd(c, d), n) == 1).count();
    let mu = pairs as u64 / phi(n);
    let nu2 = (0..n).filter(|x| (x * x + 1) % n == 0).count() as u64;
    let nu3 = (0..n).filter(|x| (x * x + x + 1) % n == 0).count() as u64;
    let cusps: u64 = (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| phi(gcd(d, n / d))).sum();
    let twelve_g = 12 + mu as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * cusps as i64;
    assert_eq!(twelve_g % 12, 0);
    (twelve_g / 12) as u64
}

/// Cuspidal dimension of the plus space against the counted genus.
pub fn dimension_is_genus(n: u64) -> Result<u64, String> {
    let space = SymbolSpace::build(n).map_err(|e| e.to_string())?;
    let g = genus_by_counting(n);
    if space.cuspidal_dimension() as u64 == g {
        Ok(g)
    } else {
        Err(format!("N={n}: cuspidal dimension {} vs genus {g}", space.cuspidal_dimension()))
    }
}

pub fn is_good_prime(case: &Case, q: u64) -> bool {
    is_prime(q) && !case.ctx.is_bad(q)
}
