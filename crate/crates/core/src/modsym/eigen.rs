//! The dual eigenline of a curve inside the plus quotient.
//!
//! The line is cut out modulo several word-size primes, lifted by CRT and
//! rational reconstruction to a primitive integer functional on Manin
//! symbols, and then checked exactly against every relation and the Hecke
//! equations used for the cut.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{crt_pair, inv_mod, mul_mod, primes_up_to, rational_reconstruct};
use crate::curve::CurveContext;
use crate::error::{Error, Result};

use super::heilbronn::{act, heilbronn_cremona};
use super::linalg::{add_mod, reduce_i64, sub_mod, word_primes, DenseMatrix};
use super::p1::P1List;
use super::space::{GenRef, Presentation, SymbolSpace};

/// Maximum number of Hecke operators used to cut the line.
pub const MAX_CUTS: usize = 25;

/// Maximum number of primes tried in the multi-modular lift.
const MAX_FIELDS: usize = 12;

/// A primitive integer functional on Manin symbols annihilated by
/// `T_q - a_q` for the curve's `a_q`: one value per point of `P^1(Z/N)`.
#[derive(Debug, Clone)]
pub struct Eigenline {
    p1: P1List,
    values: Vec<BigInt>,
    basis: Vec<usize>,
    verified: Vec<(u64, i64)>,
}

impl Eigenline {
    /// Wraps externally supplied values after exact verification of the
    /// relations and of the Hecke equations for the listed primes.
    pub fn from_values(
        level: u64,
        values: Vec<BigInt>,
        basis: Vec<usize>,
        checks: &[(u64, i64)],
    ) -> Result<Self> {
        let p1 = P1List::new(level);
        if values.len() != p1.len() {
            return Err(Error::Format(format!(
                "expected {} symbol values at level {level}, got {}",
                p1.len(),
                values.len()
            )));
        }
        if values.iter().all(Zero::is_zero) {
            return Err(Error::Eigenline("functional is identically zero".into()));
        }
        let line = Eigenline { p1, values, basis, verified: checks.to_vec() };
        line.verify_relations()?;
        for &(q, aq) in checks {
            line.verify_hecke(q, aq)?;
        }
        Ok(line)
    }

    pub fn level(&self) -> u64 {
        self.p1.level()
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    /// Value on the Manin symbol with the given P1 index.
    pub fn value(&self, index: usize) -> &BigInt {
        &self.values[index]
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    /// P1 indices of the symbols that formed the quotient basis.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Hecke eigenvalues checked exactly on every symbol.
    pub fn verified_hecke(&self) -> &[(u64, i64)] {
        &self.verified
    }

    /// Exact check of `x + xS = 0`, `x = x eta` and `x + xT + xT^2 = 0`.
    pub fn verify_relations(&self) -> Result<()> {
        for x in 0..self.p1.len() {
            let v = &self.values[x];
            if !(v + &self.values[self.p1.apply_s(x)]).is_zero() {
                return Err(Error::Eigenline(format!("two-term relation fails at symbol {x}")));
            }
            if *v != self.values[self.p1.apply_eta(x)] {
                return Err(Error::Eigenline(format!("plus relation fails at symbol {x}")));
            }
            let y = self.p1.apply_t(x);
            let z = self.p1.apply_t(y);
            if !(v + &self.values[y] + &self.values[z]).is_zero() {
                return Err(Error::Eigenline(format!("three-term relation fails at symbol {x}")));
            }
        }
        Ok(())
    }

    /// Exact check of `sum_h phi(x h) = a_q phi(x)` on every symbol.
    pub fn verify_hecke(&self, q: u64, aq: i64) -> Result<()> {
        let heil = heilbronn_cremona(q);
        let aq = BigInt::from(aq);
        for x in 0..self.p1.len() {
            let (c, d) = self.p1.point(x);
            let mut acc = BigInt::zero();
            for h in &heil {
                let (u, v) = act(h, c as i64, d as i64);
                if let Some(i) = self.p1.index(u, v) {
                    acc += &self.values[i];
                }
            }
            if acc != &aq * &self.values[x] {
                return Err(Error::Eigenline(format!("Hecke equation for q = {q} fails at symbol {x}")));
            }
        }
        Ok(())
    }
}

/// Good primes `q` (not dividing `N`) in increasing order.
fn cut_primes(level: u64) -> impl Iterator<Item = u64> {
    primes_up_to(100_000).into_iter().filter(move |q| !level.is_multiple_of(*q))
}

/// Cuts the eigenline over one field. Returns the functional on the basis
/// and the primes used.
fn cut_mod(
    space: &SymbolSpace,
    pres: &Presentation,
    eigenvalue: &dyn Fn(u64) -> i64,
    primes: Option<&[u64]>,
) -> Result<(Vec<u64>, Vec<u64>)> {
    let p = pres.prime();
    let d = pres.dimension();
    let mut kernel: Option<DenseMatrix> = None;
    let mut used = Vec::new();
    let candidates: Vec<u64> = match primes {
        Some(list) => list.to_vec(),
        None => cut_primes(space.level()).take(MAX_CUTS).collect(),
    };
    for q in candidates {
        let aq = reduce_i64(eigenvalue(q), p);
        let t = space.hecke_matrix(pres, q);
        let shifted = match &kernel {
            None => {
                let mut a = t;
                for i in 0..d {
                    a.set(i, i, sub_mod(a.get(i, i), aq, p));
                }
                a
            }
            Some(k) => {
                let mut a = k.mul(&t, p);
                for r in 0..k.rows {
                    for c in 0..d {
                        let v = sub_mod(a.get(r, c), mul_mod(k.get(r, c), aq, p), p);
                        a.set(r, c, v);
                    }
                }
                a
            }
        };
        let left = shifted.left_kernel(p);
        let next = match &kernel {
            None => left,
            Some(k) => left.mul(k, p),
        };
        used.push(q);
        if next.rows == 0 {
            return Err(Error::Eigenline(format!(
                "no eigenvector with the curve's a_q after cutting with {used:?}; check the model and conductor"
            )));
        }
        let done = next.rows == 1;
        kernel = Some(next);
        if done {
            break;
        }
    }
    let k = kernel.ok_or_else(|| Error::Eigenline("no good primes to cut with".into()))?;
    if k.rows > 1 {
        return Err(Error::Eigenline(format!(
            "eigenspace still has dimension {} after {} Hecke cuts",
            k.rows,
            used.len()
        )));
    }
    Ok((k.row(0).to_vec(), used))
}

/// Values of a basis functional on every generator.
fn generator_values(space: &SymbolSpace, pres: &Presentation, phi: &[u64]) -> Vec<u64> {
    let p = pres.prime();
    (0..space.generator_count() as u32)
        .map(|g| {
            pres.generator_coords(g)
                .iter()
                .fold(0u64, |acc, &(i, x)| add_mod(acc, mul_mod(x, phi[i as usize], p), p))
        })
        .collect()
}

/// Computes the eigenline of the curve in `space`.
pub fn extract_eigenline(space: &SymbolSpace, ctx: &CurveContext, seed: u64) -> Result<Eigenline> {
    if space.level() != ctx.conductor() {
        return Err(Error::InvalidInput(format!(
            "space level {} differs from the conductor {}",
            space.level(),
            ctx.conductor()
        )));
    }
    let first = space.presentation();
    let ap = |q: u64| ctx.ap(q);
    let (phi, used) = cut_mod(space, first, &ap, None)?;
    let mut gens = generator_values(space, first, &phi);
    let anchor = gens
        .iter()
        .position(|&x| x != 0)
        .ok_or_else(|| Error::Eigenline("eigenvector vanishes on all generators".into()))?;
    let basis: Vec<usize> = first.basis().iter().map(|&g| space.generator_symbol(g)).collect();
    normalize_at(&mut gens, anchor, first.prime());

    let mut residues: Vec<BigInt> = gens.iter().map(|&x| BigInt::from(x)).collect();
    let mut modulus = BigInt::from(first.prime());
    let extra = word_primes(seed, MAX_FIELDS);
    for &prime in &extra {
        let pres = space.presentation_mod(prime);
        if pres.dimension() != first.dimension() {
            continue;
        }
        let (phi, _) = cut_mod(space, &pres, &ap, Some(&used))?;
        let mut g = generator_values(space, &pres, &phi);
        if g[anchor] == 0 {
            continue;
        }
        normalize_at(&mut g, anchor, prime);
        let m2 = BigInt::from(prime);
        for (r, &x) in residues.iter_mut().zip(&g) {
            *r = crt_pair(r, &modulus, &BigInt::from(x), &m2);
        }
        modulus *= m2;
        if let Some(ints) = reconstruct(&residues, &modulus) {
            let values = symbol_values(space, &ints);
            let mut checks: Vec<(u64, i64)> = used.iter().map(|&q| (q, ctx.ap(q))).collect();
            for q in cut_primes(space.level()) {
                if checks.len() >= 3 {
                    break;
                }
                if !used.contains(&q) {
                    checks.push((q, ctx.ap(q)));
                }
            }
            if let Ok(line) = Eigenline::from_values(space.level(), values, basis.clone(), &checks) {
                return Ok(line);
            }
        }
    }
    Err(Error::Eigenline("multi-modular lift did not verify".into()))
}

fn normalize_at(values: &mut [u64], anchor: usize, p: u64) {
    let inv = inv_mod(values[anchor], p).expect("nonzero anchor");
    for v in values.iter_mut() {
        *v = mul_mod(*v, inv, p);
    }
}

/// Rational reconstruction of every entry, then scaling to a primitive
/// integer vector whose first nonzero entry is positive.
fn reconstruct(residues: &[BigInt], modulus: &BigInt) -> Option<Vec<BigInt>> {
    let bound = (modulus / BigInt::from(2)).sqrt();
    let mut rationals = Vec::with_capacity(residues.len());
    for r in residues {
        rationals.push(rational_reconstruct(r, modulus, &bound, &bound)?);
    }
    let lcm = rationals.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut ints: Vec<BigInt> = rationals.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return None;
    }
    let first_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if first_negative { -g } else { g };
    for x in ints.iter_mut() {
        *x = &*x / &g;
    }
    Some(ints)
}

fn symbol_values(space: &SymbolSpace, gens: &[BigInt]) -> Vec<BigInt> {
    (0..space.p1().len())
        .map(|x| match space.gen_ref(x) {
            GenRef::Zero => BigInt::zero(),
            GenRef::Gen { gen, sign } => {
                let v = &gens[gen as usize];
                if sign > 0 {
                    v.clone()
                } else {
                    -v
                }
            }
        })
        .collect()
}
