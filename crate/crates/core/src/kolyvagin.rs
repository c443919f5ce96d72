//! Kolyvagin primes and the squarefree moduli built from them.

use std::fmt;
use std::sync::Arc;

use crate::arith::{is_prime, primitive_root, LogTable};
use crate::curve::CurveContext;
use crate::error::{Error, Result};

/// `v_p(x)` for a nonzero integer; `None` for zero.
fn vp(x: i64, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut x = x.unsigned_abs();
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    Some(v)
}

/// `min(v_p(l - 1), v_p(a_l - l - 1))`: the largest `k` with `l` in `P_k`.
pub fn kolyvagin_depth(p: u64, ell: u64, a_ell: i64) -> u32 {
    let first = vp(ell as i64 - 1, p).expect("l > 1");
    match vp(a_ell - ell as i64 - 1, p) {
        Some(second) => first.min(second),
        None => first,
    }
}

/// A prime `l` with `l = 1` and `a_l = l + 1` modulo `p`, with its depth and
/// a discrete-log table to a fixed primitive root.
#[derive(Clone)]
pub struct KolyvaginPrime {
    ell: u64,
    a_ell: i64,
    depth: u32,
    logs: Arc<LogTable>,
}

impl fmt::Debug for KolyvaginPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KolyvaginPrime")
            .field("ell", &self.ell)
            .field("a_ell", &self.a_ell)
            .field("depth", &self.depth)
            .field("root", &self.root())
            .finish()
    }
}

impl KolyvaginPrime {
    /// Returns `None` when `l` is not a Kolyvagin prime for `(E, p)`.
    pub fn new(ctx: &CurveContext, p: u64, ell: u64) -> Result<Option<Self>> {
        if !is_prime(ell) || ell == p || ctx.is_bad(ell) {
            return Ok(None);
        }
        let a_ell = ctx.ap(ell);
        let depth = kolyvagin_depth(p, ell, a_ell);
        if depth == 0 {
            return Ok(None);
        }
        let root = primitive_root(ell)?;
        Ok(Some(KolyvaginPrime { ell, a_ell, depth, logs: Arc::new(LogTable::new(ell, root)?) }))
    }

    /// The same prime with logarithms taken to another primitive root.
    pub fn with_root(&self, root: u64) -> Result<Self> {
        Ok(KolyvaginPrime { logs: Arc::new(LogTable::new(self.ell, root)?), ..self.clone() })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn a_ell(&self) -> i64 {
        self.a_ell
    }

    /// `k_l`.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn root(&self) -> u64 {
        self.logs.base()
    }

    /// `log_root(a)` reduced modulo `modulus`, which must divide `l - 1`.
    #[inline]
    pub fn log_mod(&self, a: u64, modulus: u64) -> u64 {
        self.logs.log(a) % modulus
    }
}

/// Kolyvagin primes `l <= bound` of depth at least `k`, ascending. Only the
/// candidates `l = 1 mod p^k` are point-counted.
pub fn sieve(ctx: &CurveContext, p: u64, k: u32, bound: u64) -> Result<Vec<KolyvaginPrime>> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("p must be a prime >= 5, got {p}")));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let step = p
        .checked_pow(k)
        .ok_or_else(|| Error::InvalidInput(format!("{p}^{k} overflows")))?;
    let candidates: Vec<u64> = (1..)
        .map(|i| i * step + 1)
        .take_while(|&l| l <= bound)
        .filter(|&l| is_prime(l) && !ctx.is_bad(l))
        .collect();
    ctx.precompute_aps(&candidates);
    let mut out = Vec::new();
    for l in candidates {
        if let Some(kp) = KolyvaginPrime::new(ctx, p, l)? {
            if kp.depth >= k {
                out.push(kp);
            }
        }
    }
    Ok(out)
}

/// A squarefree product of distinct Kolyvagin primes (`n = 1` allowed).
#[derive(Debug, Clone)]
pub struct Modulus {
    primes: Vec<KolyvaginPrime>,
    n: u64,
}

impl Modulus {
    pub fn one() -> Self {
        Modulus { primes: Vec::new(), n: 1 }
    }

    pub fn new(mut primes: Vec<KolyvaginPrime>) -> Result<Self> {
        primes.sort_by_key(|q| q.ell);
        if primes.windows(2).any(|w| w[0].ell == w[1].ell) {
            return Err(Error::InvalidInput("modulus primes must be distinct".into()));
        }
        let n = primes
            .iter()
            .try_fold(1u64, |acc, q| acc.checked_mul(q.ell))
            .ok_or_else(|| Error::InvalidInput("modulus exceeds 64 bits".into()))?;
        Ok(Modulus { primes, n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `nu(n)`, the number of prime factors.
    pub fn nu(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[KolyvaginPrime] {
        &self.primes
    }

    pub fn factors(&self) -> Vec<u64> {
        self.primes.iter().map(|q| q.ell).collect()
    }

    /// `v_p(I_n)`; `None` for `n = 1`, where `I_1 = 0`.
    pub fn i_valuation(&self) -> Option<u32> {
        self.primes.iter().map(|q| q.depth).min()
    }

    /// `n * l` for a prime not already dividing `n`.
    pub fn extend(&self, prime: KolyvaginPrime) -> Result<Self> {
        let mut primes = self.primes.clone();
        primes.push(prime);
        Modulus::new(primes)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primes.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.primes.iter().map(|q| q.ell.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Index sets of size `nu` from `0..len` in colexicographic order.
#[derive(Debug, Clone)]
pub struct Colex {
    current: Option<Vec<usize>>,
    len: usize,
}

impl Colex {
    pub fn new(len: usize, nu: usize) -> Self {
        Colex { current: (nu <= len).then(|| (0..nu).collect()), len }
    }
}

impl Iterator for Colex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let c = self.current.as_mut().expect("present");
        let nu = c.len();
        let pos = (0..nu).find(|&i| {
            let limit = if i + 1 < nu { c[i + 1] } else { self.len };
            c[i] + 1 < limit
        });
        match pos {
            Some(i) => {
                c[i] += 1;
                for (j, slot) in c.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
            }
            None => self.current = None,
        }
        Some(out)
    }
}

/// The first `budget` moduli with `nu` prime factors, in colex order of the
/// prime indices; `nu = 0` yields `n = 1` alone. Products that overflow 64
/// bits are skipped.
pub fn enumerate_moduli(primes: &[KolyvaginPrime], nu: usize, budget: usize) -> impl Iterator<Item = Modulus> + '_ {
    Colex::new(primes.len(), nu)
        .filter_map(move |idx| Modulus::new(idx.iter().map(|&i| primes[i].clone()).collect()).ok())
        .take(budget)
}

/// The first `count` primitive roots modulo `l`, ascending.
pub fn primitive_roots(ell: u64, count: usize) -> Vec<u64> {
    (2..ell)
        .filter(|&g| crate::arith::is_primitive_root(g, ell))
        .take(count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pow_mod;
    use crate::curve::{ap_exhaustive, WeierstrassModel};

    fn ctx(a: [i64; 5]) -> CurveContext {
        CurveContext::new(WeierstrassModel::from_i64(a).unwrap(), None).unwrap()
    }

    #[test]
    fn sieve_examples() {
        let c = ctx([0, 1, 1, -2, 0]);
        let ells: Vec<u64> = sieve(&c, 5, 1, 100).unwrap().iter().map(|q| q.ell()).collect();
        assert!(ells.contains(&41) && ells.contains(&61));
        let c = ctx([0, 0, 1, -7, 6]);
        let ells: Vec<u64> = sieve(&c, 5, 1, 700).unwrap().iter().map(|q| q.ell()).collect();
        for l in [71, 401, 631] {
            assert!(ells.contains(&l), "{l} missing from {ells:?}");
        }
        assert!(sieve(&c, 5, 1, 10).unwrap().is_empty());
        assert!(sieve(&c, 4, 1, 100).is_err());
    }

    /// Every sieved prime is re-verified against an exhaustive point count,
    /// and every rejected candidate fails one of the congruences.
    #[test]
    fn sieve_matches_exhaustive_count() {
        for a in [[0, 1, 1, -2, 0], [1, -1, 0, -332311, -73733731], [0, 0, 1, -1, 0]] {
            let c = ctx(a);
            let found = sieve(&c, 5, 1, 1000).unwrap();
            let model = c.model();
            for q in found.iter().take(10) {
                let al = ap_exhaustive(model, q.ell());
                assert_eq!(al, q.a_ell());
                assert_eq!((q.ell() - 1) % 5, 0);
                assert_eq!((al - q.ell() as i64 - 1).rem_euclid(5), 0);
            }
            for l in crate::arith::primes_up_to(400) {
                if l == 5 || c.is_bad(l) {
                    continue;
                }
                let al = ap_exhaustive(model, l);
                let member = (l - 1) % 5 == 0 && (al - l as i64 - 1).rem_euclid(5) == 0;
                assert_eq!(member, found.iter().any(|q| q.ell() == l), "l = {l}");
            }
        }
    }

    #[test]
    fn depth_and_i_valuation() {
        // l = 251: v_5(250) = 3; a_l - l - 1 with v_5 = 1.
        assert_eq!(kolyvagin_depth(5, 251, 252 + 5), 1);
        assert_eq!(kolyvagin_depth(5, 251, 252 + 125 * 2), 3);
        assert_eq!(kolyvagin_depth(5, 11, 12), 1);
        let c = ctx([0, 1, 1, -2, 0]);
        let primes = sieve(&c, 5, 1, 2000).unwrap();
        assert_eq!(Modulus::one().i_valuation(), None);
        for pair in enumerate_moduli(&primes, 2, 30) {
            let [a, b] = pair.primes() else { panic!() };
            assert_eq!(pair.i_valuation(), Some(a.depth().min(b.depth())));
            for q in &primes {
                if pair.factors().contains(&q.ell()) {
                    continue;
                }
                let bigger = pair.extend(q.clone()).unwrap();
                assert_eq!(bigger.i_valuation(), Some(pair.i_valuation().unwrap().min(q.depth())));
            }
        }
    }

    /// Reference generator: all subsets, sorted by the reversed index tuple.
    fn colex_reference(len: usize, nu: usize) -> Vec<Vec<usize>> {
        let mut all: Vec<Vec<usize>> = (0u32..1 << len)
            .filter(|m| m.count_ones() as usize == nu)
            .map(|m| (0..len).filter(|i| m >> i & 1 == 1).collect())
            .collect();
        all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        all
    }

    #[test]
    fn colex_order() {
        for len in 0..8 {
            for nu in 0..=len + 1 {
                let got: Vec<Vec<usize>> = Colex::new(len, nu).collect();
                assert_eq!(got, colex_reference(len, nu), "len {len} nu {nu}");
            }
        }
        let c = ctx([0, 1, 1, -2, 0]);
        let primes: Vec<KolyvaginPrime> = sieve(&c, 5, 1, 200).unwrap();
        let pick: Vec<KolyvaginPrime> =
            primes.iter().filter(|q| [41, 61].contains(&q.ell())).cloned().collect();
        let ns: Vec<u64> = enumerate_moduli(&pick, 2, 3).map(|m| m.n()).collect();
        assert_eq!(ns, vec![41 * 61]);
        let ones: Vec<u64> = enumerate_moduli(&primes, 0, 5).map(|m| m.n()).collect();
        assert_eq!(ones, vec![1]);
        assert_eq!(enumerate_moduli(&primes, 2, 0).count(), 0);
    }

    #[test]
    fn alternate_roots() {
        let c = ctx([0, 1, 1, -2, 0]);
        let q = KolyvaginPrime::new(&c, 5, 41).unwrap().unwrap();
        let roots = primitive_roots(41, 3);
        assert_eq!(roots[0], q.root());
        let alt = q.with_root(roots[1]).unwrap();
        for a in 1..41 {
            let l0 = q.log_mod(a, 40);
            let l1 = alt.log_mod(a, 40);
            assert_eq!(pow_mod(q.root(), l0, 41), a);
            assert_eq!(pow_mod(alt.root(), l1, 41), a);
        }
    }
}
