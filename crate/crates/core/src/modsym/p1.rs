//! The projective line over `Z/N`, indexed through the Chinese remainder
//! theorem.
//!
//! Over a prime power `m = q^e` every point is `(1 : j)` for `0 <= j < m` or
//! `(q i : 1)` for `0 <= i < m/q`; these get local indices `j` and `m + i`.
//! A point mod `N` is the tuple of its local points, indexed in mixed radix
//! with the first prime-power factor least significant.

use crate::arith::{factorize, inv_mod};

#[derive(Debug, Clone)]
struct Component {
    modulus: u64,
    prime: u64,
    /// Inverse of each residue, 0 for non-units.
    inverse: Vec<u32>,
    size: usize,
    stride: usize,
}

impl Component {
    fn new(prime: u64, exp: u32, stride: usize) -> Self {
        let modulus = prime.pow(exp);
        let inverse = (0..modulus).map(|x| inv_mod(x, modulus).unwrap_or(0) as u32).collect();
        let size = (modulus + modulus / prime) as usize;
        Component { modulus, prime, inverse, size, stride }
    }

    /// Local index of `(c : d)` for residues `c, d < m`, if the pair is
    /// primitive modulo the prime.
    fn local_index(&self, c: u64, d: u64) -> Option<usize> {
        let m = self.modulus;
        let ci = self.inverse[c as usize] as u64;
        if ci != 0 {
            return Some((d * ci % m) as usize);
        }
        let di = self.inverse[d as usize] as u64;
        if di == 0 {
            return None;
        }
        let x = c * di % m;
        Some((m + x / self.prime) as usize)
    }

    fn local_point(&self, local: usize) -> (u64, u64) {
        let m = self.modulus as usize;
        if local < m {
            (1, local as u64)
        } else {
            (self.prime * (local - m) as u64, 1)
        }
    }
}

/// A point `(c : d)` of `P^1(Z/N)` with its position in the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct P1Element {
    pub c: u64,
    pub d: u64,
    pub index: usize,
}

/// Enumeration of `P^1(Z/N)` with constant-time lookup.
#[derive(Debug, Clone)]
pub struct P1List {
    level: u64,
    components: Vec<Component>,
    points: Vec<(u64, u64)>,
}

impl P1List {
    pub fn new(level: u64) -> Self {
        assert!((1..1 << 32).contains(&level), "level must lie in 1..2^32");
        let mut components = Vec::new();
        let mut stride = 1usize;
        for (q, e) in factorize(level) {
            let comp = Component::new(q, e, stride);
            stride *= comp.size;
            components.push(comp);
        }
        let mut list = P1List { level, components, points: Vec::new() };
        list.points = (0..stride).map(|i| list.representative(i)).collect();
        list
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Canonical residues `(c, d)` of the point with the given index.
    pub fn point(&self, index: usize) -> (u64, u64) {
        self.points[index]
    }

    pub fn element(&self, index: usize) -> P1Element {
        let (c, d) = self.points[index];
        P1Element { c, d, index }
    }

    pub fn iter(&self) -> impl Iterator<Item = P1Element> + '_ {
        (0..self.len()).map(|i| self.element(i))
    }

    /// Index of `(c : d)` for arbitrary integers, or `None` when
    /// `gcd(c, d, N) > 1`.
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.level as i64;
        self.index_reduced(c.rem_euclid(n) as u64, d.rem_euclid(n) as u64)
    }

    /// Index of `(c : d)` for residues already in `[0, N)`.
    pub fn index_reduced(&self, c: u64, d: u64) -> Option<usize> {
        let mut index = 0;
        for comp in &self.components {
            let local = if comp.modulus == self.level {
                comp.local_index(c, d)?
            } else {
                comp.local_index(c % comp.modulus, d % comp.modulus)?
            };
            index += local * comp.stride;
        }
        Some(index)
    }

    fn representative(&self, index: usize) -> (u64, u64) {
        let (mut c, mut d, mut modulus) = (0u64, 0u64, 1u64);
        for comp in &self.components {
            let local = index / comp.stride % comp.size;
            let (lc, ld) = comp.local_point(local);
            c = crt(c, modulus, lc, comp.modulus);
            d = crt(d, modulus, ld, comp.modulus);
            modulus *= comp.modulus;
        }
        (c, d)
    }

    /// `(c : d) S = (d : -c)`.
    pub fn apply_s(&self, index: usize) -> usize {
        let (c, d) = self.points[index];
        self.index_reduced(d, (self.level - c) % self.level).expect("primitive")
    }

    /// `(c : d) T = (d : -c - d)`.
    pub fn apply_t(&self, index: usize) -> usize {
        let (c, d) = self.points[index];
        let n = self.level;
        self.index_reduced(d, (2 * n - c - d) % n).expect("primitive")
    }

    /// `(c : d) eta = (-c : d)`.
    pub fn apply_eta(&self, index: usize) -> usize {
        let (c, d) = self.points[index];
        self.index_reduced((self.level - c) % self.level, d).expect("primitive")
    }
}

fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    if m == 1 {
        return b % n;
    }
    let inv = inv_mod(m % n, n).expect("coprime moduli");
    let diff = (b + n - a % n) % n;
    let t = (diff as u128 * inv as u128 % n as u128) as u64;
    a + m * t
}

/// `N prod_{q | N} (1 + 1/q)`.
pub fn p1_size(level: u64) -> u64 {
    factorize(level).iter().fold(level, |acc, &(q, _)| acc / q * (q + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::gcd;

    /// Direct enumeration: classes of primitive pairs under unit scaling.
    fn brute_force_size(n: u64) -> usize {
        let units: Vec<u64> = (1..=n).filter(|&u| gcd(u, n) == 1).map(|u| u % n).collect();
        let mut seen = std::collections::HashSet::new();
        let mut count = 0;
        for c in 0..n {
            for d in 0..n {
                if gcd(gcd(c, d), n) != 1 || seen.contains(&(c, d)) {
                    continue;
                }
                count += 1;
                for &u in &units {
                    seen.insert((c * u % n, d * u % n));
                }
            }
        }
        count
    }

    #[test]
    fn sizes() {
        assert_eq!(P1List::new(1).len(), 1);
        assert_eq!(P1List::new(11).len(), 12);
        assert_eq!(P1List::new(1058).len(), 1656);
        for n in 1..60 {
            assert_eq!(P1List::new(n).len(), brute_force_size(n), "N = {n}");
            assert_eq!(P1List::new(n).len() as u64, p1_size(n));
        }
    }

    #[test]
    fn lookup_is_a_bijection_onto_scaling_classes() {
        for n in [12u64, 36, 45, 98, 100] {
            let p1 = P1List::new(n);
            for (i, e) in p1.iter().enumerate() {
                assert_eq!(p1.index(e.c as i64, e.d as i64), Some(i));
            }
            for c in 0..n {
                for d in 0..n {
                    let idx = p1.index(c as i64, d as i64);
                    if gcd(gcd(c, d), n) != 1 {
                        assert!(idx.is_none());
                        continue;
                    }
                    let (rc, rd) = p1.point(idx.unwrap());
                    // (c, d) = u (rc, rd) for some unit u
                    let ok = (1..n).filter(|&u| gcd(u, n) == 1).any(|u| rc * u % n == c && rd * u % n == d);
                    assert!(ok, "N={n}: ({c},{d}) vs ({rc},{rd})");
                }
            }
        }
    }

    #[test]
    fn involutions() {
        let p1 = P1List::new(1058);
        for i in 0..p1.len() {
            assert_eq!(p1.apply_s(p1.apply_s(i)), i);
            assert_eq!(p1.apply_eta(p1.apply_eta(i)), i);
            assert_eq!(p1.apply_t(p1.apply_t(p1.apply_t(i))), i);
        }
        assert_eq!(p1.index(-3, -5), p1.index(3, 5));
    }
}
