//! The plus quotient of weight-two Manin symbols for `Gamma_0(N)`.

use std::collections::HashMap;

use num_integer::gcd;

use crate::arith::xgcd;
use crate::error::{Error, Result};

use super::cusps::{plus_cusp_class, CuspClass};
use super::heilbronn::{act, heilbronn_cremona};
use super::linalg::{add_scaled, DenseMatrix, SparseEchelon, SparseVec};
use super::p1::P1List;

/// The default prime used when a space is built without an explicit one.
pub const DEFAULT_PRIME: u64 = 4_611_686_018_427_387_847;

/// A symbol in terms of the generators left after the two-term relations:
/// `x = sign * g`, or `x = 0` when its orbit is killed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenRef {
    Zero,
    Gen { gen: u32, sign: i8 },
}

/// Coordinates of the generators over a prime field, relative to the free
/// generators chosen by elimination.
#[derive(Debug, Clone)]
pub struct Presentation {
    prime: u64,
    basis: Vec<u32>,
    coords: Vec<SparseVec>,
}

impl Presentation {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Generators forming the basis.
    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn generator_coords(&self, gen: u32) -> &SparseVec {
        &self.coords[gen as usize]
    }
}

/// Manin-symbol presentation of the plus quotient at level `N`.
#[derive(Debug, Clone)]
pub struct SymbolSpace {
    p1: P1List,
    gen_of: Vec<GenRef>,
    gen_p1: Vec<usize>,
    relations: Vec<Vec<(u32, i64)>>,
    presentation: Presentation,
}

impl SymbolSpace {
    /// Builds the presentation, eliminating over [`DEFAULT_PRIME`].
    pub fn build(level: u64) -> Result<Self> {
        Self::build_with_prime(level, DEFAULT_PRIME)
    }

    pub fn build_with_prime(level: u64, prime: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidInput("level must be positive".into()));
        }
        let p1 = P1List::new(level);
        let (gen_of, gen_p1) = two_term_quotient(&p1);
        let relations = three_term_relations(&p1, &gen_of);
        let mut space = SymbolSpace {
            p1,
            gen_of,
            gen_p1,
            relations,
            presentation: Presentation { prime, basis: Vec::new(), coords: Vec::new() },
        };
        space.presentation = space.presentation_mod(prime);
        Ok(space)
    }

    pub fn level(&self) -> u64 {
        self.p1.level()
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    pub fn generator_count(&self) -> usize {
        self.gen_p1.len()
    }

    pub fn gen_ref(&self, index: usize) -> GenRef {
        self.gen_of[index]
    }

    /// The P1 index representing a generator.
    pub fn generator_symbol(&self, gen: u32) -> usize {
        self.gen_p1[gen as usize]
    }

    /// Three-term relations over the generators.
    pub fn relations(&self) -> &[Vec<(u32, i64)>] {
        &self.relations
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn dimension(&self) -> usize {
        self.presentation.dimension()
    }

    /// Re-eliminates the relations over another prime field.
    pub fn presentation_mod(&self, prime: u64) -> Presentation {
        let mut ech = SparseEchelon::new(self.gen_p1.len(), prime);
        for rel in &self.relations {
            ech.add_relation(rel);
        }
        let basis = ech.free_columns();
        let mut position = vec![u32::MAX; self.gen_p1.len()];
        for (i, &g) in basis.iter().enumerate() {
            position[g as usize] = i as u32;
        }
        let coords = (0..self.gen_p1.len() as u32)
            .map(|g| match ech.expression(g) {
                None => vec![(position[g as usize], 1)],
                Some(e) => {
                    let mut v: SparseVec = e.iter().map(|&(k, x)| (position[k as usize], x)).collect();
                    v.sort_unstable_by_key(|&(k, _)| k);
                    v
                }
            })
            .collect();
        Presentation { prime, basis, coords }
    }

    /// Coordinates of the Manin symbol with the given P1 index.
    pub fn symbol_coords(&self, pres: &Presentation, index: usize) -> SparseVec {
        match self.gen_of[index] {
            GenRef::Zero => Vec::new(),
            GenRef::Gen { gen, sign } => {
                let c = pres.generator_coords(gen);
                if sign > 0 {
                    c.clone()
                } else {
                    c.iter().map(|&(k, x)| (k, (pres.prime - x) % pres.prime)).collect()
                }
            }
        }
    }

    /// P1 indices (with multiplicity) of `x h` over the Heilbronn matrices
    /// of determinant `q`; images outside `P^1(Z/N)` are dropped, which
    /// gives `U_q` when `q | N`.
    pub fn hecke_images(&self, index: usize, q: u64) -> Vec<usize> {
        let (c, d) = self.p1.point(index);
        heilbronn_cremona(q)
            .iter()
            .filter_map(|h| {
                let (u, v) = act(h, c as i64, d as i64);
                self.p1.index(u, v)
            })
            .collect()
    }

    /// Matrix of `T_q` on the quotient: column `j` holds the coordinates of
    /// `T_q` applied to the `j`-th basis symbol.
    pub fn hecke_matrix(&self, pres: &Presentation, q: u64) -> DenseMatrix {
        let d = pres.dimension();
        let p = pres.prime;
        let heil = heilbronn_cremona(q);
        let mut m = DenseMatrix::zeros(d, d);
        for (j, &g) in pres.basis.iter().enumerate() {
            let (c, dd) = self.p1.point(self.gen_p1[g as usize]);
            let mut acc: SparseVec = Vec::new();
            for h in &heil {
                let (u, v) = act(h, c as i64, dd as i64);
                if let Some(idx) = self.p1.index(u, v) {
                    acc = add_scaled(&acc, &self.symbol_coords(pres, idx), 1, p);
                }
            }
            for (i, x) in acc {
                m.set(i as usize, j, x);
            }
        }
        m
    }

    /// Transpose Hecke action on a functional given by its values on the
    /// basis: returns `phi o T_q`.
    pub fn hecke_apply(&self, pres: &Presentation, q: u64, phi: &[u64]) -> Vec<u64> {
        let m = self.hecke_matrix(pres, q);
        let row = DenseMatrix { rows: 1, cols: phi.len(), data: phi.to_vec() };
        row.mul(&m, pres.prime).data
    }

    /// Boundary map from the basis to plus cusp classes.
    pub fn boundary_matrix(&self, pres: &Presentation) -> (DenseMatrix, Vec<CuspClass>) {
        let n = self.level();
        let mut classes: HashMap<CuspClass, usize> = HashMap::new();
        let mut entries = Vec::new();
        for (j, &g) in pres.basis.iter().enumerate() {
            let (c, d) = self.p1.point(self.gen_p1[g as usize]);
            let [a, b, c1, d1] = lift_to_sl2(c, d, n);
            let mut next_id = |k: CuspClass| {
                let len = classes.len();
                *classes.entry(k).or_insert(len)
            };
            let plus = next_id(plus_cusp_class(a, c1, n));
            let minus = next_id(plus_cusp_class(b, d1, n));
            entries.push((j, plus, 1i64));
            entries.push((j, minus, -1i64));
        }
        let mut m = DenseMatrix::zeros(pres.dimension(), classes.len());
        for (j, k, s) in entries {
            let v = (m.get(j, k) as i128 + s as i128).rem_euclid(pres.prime as i128) as u64;
            m.set(j, k, v);
        }
        let mut labels = vec![CuspClass { denominator_gcd: 0, residue: 0 }; classes.len()];
        for (k, i) in classes {
            labels[i] = k;
        }
        (m, labels)
    }

    /// Dimension of the kernel of the boundary map, the cuspidal plus part.
    pub fn cuspidal_dimension(&self) -> usize {
        let (m, _) = self.boundary_matrix(&self.presentation);
        self.dimension() - m.rank(self.presentation.prime)
    }
}

/// Lifts `(c : d)` to `[[a, b], [c', d']]` in `SL_2(Z)` with `c' = c`,
/// `d' = d (mod N)`; the symbol is the path `b/d' -> a/c'`.
pub fn lift_to_sl2(c: u64, d: u64, level: u64) -> [i128; 4] {
    let n = level as i128;
    let c0 = if c == 0 { n } else { c as i128 };
    let mut d0 = d as i128;
    while gcd(c0, d0) != 1 {
        d0 += n;
    }
    let (_, u, v) = xgcd(c0, d0);
    [v, -u, c0, d0]
}

/// Orbits under `S` (sign -1) and `eta` (sign +1). Returns the generator of
/// each symbol and the representative symbol of each generator.
fn two_term_quotient(p1: &P1List) -> (Vec<GenRef>, Vec<usize>) {
    let n = p1.len();
    let mut sign = vec![0i8; n];
    let mut orbit_id = vec![usize::MAX; n];
    let mut orbits: Vec<(usize, bool)> = Vec::new();
    for start in 0..n {
        if orbit_id[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut killed = false;
        let mut stack = vec![start];
        orbit_id[start] = id;
        sign[start] = 1;
        while let Some(x) = stack.pop() {
            for (y, s) in [(p1.apply_s(x), -1i8), (p1.apply_eta(x), 1i8)] {
                let sy = sign[x] * s;
                if orbit_id[y] == usize::MAX {
                    orbit_id[y] = id;
                    sign[y] = sy;
                    stack.push(y);
                } else if sign[y] != sy {
                    killed = true;
                }
            }
        }
        orbits.push((start, killed));
    }
    let mut gen_index = vec![u32::MAX; orbits.len()];
    let mut gen_p1 = Vec::new();
    for (id, &(rep, killed)) in orbits.iter().enumerate() {
        if !killed {
            gen_index[id] = gen_p1.len() as u32;
            gen_p1.push(rep);
        }
    }
    let gen_of = (0..n)
        .map(|x| {
            let g = gen_index[orbit_id[x]];
            if g == u32::MAX {
                GenRef::Zero
            } else {
                GenRef::Gen { gen: g, sign: sign[x] }
            }
        })
        .collect();
    (gen_of, gen_p1)
}

/// `x + x T + x T^2 = 0`, one relation per `T`-orbit.
fn three_term_relations(p1: &P1List, gen_of: &[GenRef]) -> Vec<Vec<(u32, i64)>> {
    let mut out = Vec::new();
    for x in 0..p1.len() {
        let y = p1.apply_t(x);
        let z = p1.apply_t(y);
        if y < x || z < x {
            continue;
        }
        let orbit: &[usize] = if y == x { &[x, x, x] } else { &[x, y, z] };
        let mut acc: Vec<(u32, i64)> = Vec::new();
        for &s in orbit {
            if let GenRef::Gen { gen, sign } = gen_of[s] {
                match acc.iter_mut().find(|(g, _)| *g == gen) {
                    Some(e) => e.1 += sign as i64,
                    None => acc.push((gen, sign as i64)),
                }
            }
        }
        acc.retain(|&(_, c)| c != 0);
        acc.sort_unstable();
        if !acc.is_empty() {
            out.push(acc);
        }
    }
    out
}
