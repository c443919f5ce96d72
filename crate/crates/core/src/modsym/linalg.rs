//! Linear algebra over word-size prime fields.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{inv_mod, is_prime, mul_mod};

/// Sparse vector: strictly increasing indices with nonzero entries.
pub type SparseVec = Vec<(u32, u64)>;

/// Residue of a signed integer modulo `p`.
pub fn reduce_i64(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    add_mod(a, p - b % p, p)
}

/// `a + s b`, merging two sparse vectors.
pub fn add_scaled(a: &[(u32, u64)], b: &[(u32, u64)], s: u64, p: u64) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            let v = mul_mod(b[j].1, s, p);
            if v != 0 {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = add_mod(a[i].1, mul_mod(b[j].1, s, p), p);
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Reduced echelon form maintained one relation at a time.
///
/// Every pivot column is kept expressed through the current free columns, so
/// when the last relation is in, the free columns form a basis of the
/// quotient and each pivot's expression gives its coordinates.
#[derive(Debug, Clone)]
pub struct SparseEchelon {
    prime: u64,
    expr: Vec<Option<SparseVec>>,
    occurs: Vec<HashSet<u32>>,
}

impl SparseEchelon {
    pub fn new(columns: usize, prime: u64) -> Self {
        SparseEchelon { prime, expr: vec![None; columns], occurs: vec![HashSet::new(); columns] }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Imposes `sum c_i x_i = 0`. Returns false when the relation was
    /// already implied.
    pub fn add_relation(&mut self, row: &[(u32, i64)]) -> bool {
        let p = self.prime;
        let mut acc: BTreeMap<u32, u64> = BTreeMap::new();
        for &(col, coef) in row {
            let c = reduce_i64(coef, p);
            if c == 0 {
                continue;
            }
            match &self.expr[col as usize] {
                Some(e) => {
                    for &(k, v) in e {
                        let slot = acc.entry(k).or_insert(0);
                        *slot = add_mod(*slot, mul_mod(v, c, p), p);
                    }
                }
                None => {
                    let slot = acc.entry(col).or_insert(0);
                    *slot = add_mod(*slot, c, p);
                }
            }
        }
        let v: SparseVec = acc.into_iter().filter(|&(_, x)| x != 0).collect();
        if v.is_empty() {
            return false;
        }
        let &(pivot, lead) = v
            .iter()
            .min_by_key(|&&(k, _)| (self.occurs[k as usize].len(), k))
            .expect("nonempty");
        let scale = p - inv_mod(lead, p).expect("nonzero");
        let e: SparseVec = v
            .iter()
            .filter(|&&(k, _)| k != pivot)
            .map(|&(k, x)| (k, mul_mod(x, scale, p)))
            .collect();
        let users: Vec<u32> = self.occurs[pivot as usize].drain().collect();
        for c in users {
            let old = self.expr[c as usize].take().expect("pivot");
            let pos = old.binary_search_by_key(&pivot, |&(k, _)| k).expect("occurrence");
            let alpha = old[pos].1;
            let mut without = old.clone();
            without.remove(pos);
            let new = add_scaled(&without, &e, alpha, p);
            for &(k, _) in &old {
                if k != pivot {
                    self.occurs[k as usize].remove(&c);
                }
            }
            for &(k, _) in &new {
                self.occurs[k as usize].insert(c);
            }
            self.expr[c as usize] = Some(new);
        }
        for &(k, _) in &e {
            self.occurs[k as usize].insert(pivot);
        }
        self.expr[pivot as usize] = Some(e);
        true
    }

    /// Columns never chosen as pivots, in increasing order.
    pub fn free_columns(&self) -> Vec<u32> {
        (0..self.expr.len() as u32).filter(|&c| self.expr[c as usize].is_none()).collect()
    }

    /// Expression of a pivot column in free columns, `None` for free columns.
    pub fn expression(&self, col: u32) -> Option<&SparseVec> {
        self.expr[col as usize].as_ref()
    }
}

/// Dense row-major matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &DenseMatrix, p: u64) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc = vec![0u128; other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for (j, slot) in acc.iter_mut().enumerate() {
                    *slot = (*slot + a as u128 * other.get(k, j) as u128) % p as u128;
                }
            }
            for (j, v) in acc.into_iter().enumerate() {
                out.set(i, j, v as u64);
            }
        }
        out
    }

    /// Row vectors `x` with `x A = 0`, as the rows of a matrix.
    pub fn left_kernel(&self, p: u64) -> DenseMatrix {
        let (n, m) = (self.rows, self.cols);
        let width = m + n;
        let mut a = vec![0u64; n * width];
        for i in 0..n {
            a[i * width..i * width + m].copy_from_slice(self.row(i));
            a[i * width + m + i] = 1;
        }
        let mut rank = 0;
        for col in 0..m {
            let Some(piv) = (rank..n).find(|&r| a[r * width + col] != 0) else { continue };
            if piv != rank {
                for k in 0..width {
                    a.swap(piv * width + k, rank * width + k);
                }
            }
            let inv = inv_mod(a[rank * width + col], p).expect("nonzero pivot");
            for k in 0..width {
                a[rank * width + k] = mul_mod(a[rank * width + k], inv, p);
            }
            let pivot_row: Vec<u64> = a[rank * width..(rank + 1) * width].to_vec();
            for r in 0..n {
                if r == rank {
                    continue;
                }
                let f = a[r * width + col];
                if f == 0 {
                    continue;
                }
                let neg = p - f;
                for k in col..width {
                    if pivot_row[k] != 0 {
                        let slot = &mut a[r * width + k];
                        *slot = add_mod(*slot, mul_mod(pivot_row[k], neg, p), p);
                    }
                }
            }
            rank += 1;
        }
        let mut out = DenseMatrix::zeros(n - rank, n);
        for (i, r) in (rank..n).enumerate() {
            out.data[i * n..(i + 1) * n].copy_from_slice(&a[r * width + m..(r + 1) * width]);
        }
        out
    }

    pub fn rank(&self, p: u64) -> usize {
        self.rows - self.left_kernel(p).rows
    }
}

/// Distinct primes in `[2^61, 2^62)` drawn from a seeded generator.
pub fn word_primes(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d6f_6473_796d);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut candidate = rng.gen_range((1u64 << 61)..(1u64 << 62)) | 1;
        while !is_prime(candidate) {
            candidate += 2;
        }
        if !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u64 = 1_000_000_007;

    fn dense_rank_oracle(rows: &[Vec<i64>], p: u64) -> usize {
        let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| reduce_i64(x, p)).collect()).collect();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
            m.swap(piv, rank);
            let inv = inv_mod(m[rank][c], p).unwrap();
            for r in 0..m.len() {
                if r != rank && m[r][c] != 0 {
                    let f = mul_mod(m[r][c], inv, p);
                    let pivot = m[rank].clone();
                    for (x, &y) in m[r].iter_mut().zip(&pivot).take(cols) {
                        *x = sub_mod(*x, mul_mod(f, y, p), p);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest::proptest! {
        #[test]
        fn echelon_matches_dense_rank(
            rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 9), 0..12)
        ) {
            let mut ech = SparseEchelon::new(9, P);
            for r in &rows {
                let sparse: Vec<(u32, i64)> = r.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i as u32, x)).collect();
                ech.add_relation(&sparse);
            }
            let rank = dense_rank_oracle(&rows, P);
            proptest::prop_assert_eq!(ech.free_columns().len(), 9 - rank);
            // Each relation holds on the coordinate vectors.
            let coords = |c: u32| -> SparseVec {
                match ech.expression(c) {
                    Some(e) => e.clone(),
                    None => vec![(c, 1)],
                }
            };
            for r in &rows {
                let mut acc: SparseVec = Vec::new();
                for (i, &x) in r.iter().enumerate() {
                    acc = add_scaled(&acc, &coords(i as u32), reduce_i64(x, P), P);
                }
                proptest::prop_assert!(acc.is_empty());
            }
        }

        #[test]
        fn left_kernel_annihilates(
            data in proptest::collection::vec(0u64..5, 20)
        ) {
            let m = DenseMatrix { rows: 5, cols: 4, data };
            let k = m.left_kernel(P);
            let prod = k.mul(&m, P);
            proptest::prop_assert!(prod.data.iter().all(|&x| x == 0));
            let rows: Vec<Vec<i64>> = (0..5).map(|r| m.row(r).iter().map(|&x| x as i64).collect()).collect();
            proptest::prop_assert_eq!(k.rows, 5 - dense_rank_oracle(&rows, P));
        }
    }

    #[test]
    fn seeded_primes_are_reproducible() {
        let a = word_primes(7, 3);
        assert_eq!(a, word_primes(7, 3));
        assert!(a.iter().all(|&q| is_prime(q) && q >= 1 << 61));
        assert_ne!(a, word_primes(8, 3));
    }
}
