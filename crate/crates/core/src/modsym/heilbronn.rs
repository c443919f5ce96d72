//! Cremona's Heilbronn matrices of prime determinant.

/// A 2x2 integer matrix `[[a, b], [c, d]]` stored as `[a, b, c, d]`.
pub type Matrix2 = [i64; 4];

/// Heilbronn matrices of determinant `p` for the Hecke operator `T_p`
/// acting on Manin symbols from the right.
pub fn heilbronn_cremona(p: u64) -> Vec<Matrix2> {
    let p = p as i64;
    if p == 2 {
        return vec![[1, 0, 0, 2], [2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 1, 2]];
    }
    let mut out = vec![[1, 0, 0, p]];
    let half = p / 2;
    for r in -half..=half {
        let (mut x1, mut x2, mut y1, mut y2) = (p, -r, 0i64, 1i64);
        let (mut a, mut b) = (-p, r);
        out.push([x1, x2, y1, y2]);
        while b != 0 {
            let q = round_half_away(a, b);
            let c = a - b * q;
            a = -b;
            b = c;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            out.push([x1, x2, y1, y2]);
        }
    }
    out
}

/// Nearest integer to `a / b`, halves rounded away from zero.
fn round_half_away(a: i64, b: i64) -> i64 {
    let q = (2 * a.abs() + b.abs()) / (2 * b.abs());
    if (a < 0) != (b < 0) {
        -q
    } else {
        q
    }
}

/// Image of the row vector `(u, v)` under a matrix: `(a u + c v, b u + d v)`.
pub fn act(m: &Matrix2, u: i64, v: i64) -> (i64, i64) {
    (m[0] * u + m[2] * v, m[1] * u + m[3] * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants_and_counts() {
        // Counts from a reference run of the same construction.
        for (p, count) in [(2u64, 4usize), (3, 6), (5, 12), (7, 18), (11, 30), (13, 38), (97, 392)] {
            let h = heilbronn_cremona(p);
            assert_eq!(h.len(), count, "p = {p}");
            assert!(h.iter().all(|m| m[0] * m[3] - m[1] * m[2] == p as i64));
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_away(5, 2), 3);
        assert_eq!(round_half_away(-5, 2), -3);
        assert_eq!(round_half_away(5, -2), -3);
        assert_eq!(round_half_away(7, 3), 2);
        assert_eq!(round_half_away(-7, 3), -2);
    }
}
