use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// An integral Weierstrass model `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`
/// together with its standard derived quantities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassModel {
    a: [BigInt; 5],
    b2: BigInt,
    b4: BigInt,
    b6: BigInt,
    b8: BigInt,
    c4: BigInt,
    c6: BigInt,
    disc: BigInt,
}

impl WeierstrassModel {
    pub fn new(ainvs: [BigInt; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = &ainvs;
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let c4 = &b2 * &b2 - 24 * &b4;
        let b2_cubed: BigInt = &b2 * &b2 * &b2;
        let c6 = 36 * &b2 * &b4 - 216 * &b6 - b2_cubed;
        let b2sq_b8: BigInt = &b2 * &b2 * &b8;
        let disc: BigInt = -b2sq_b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(Error::Singular);
        }
        Ok(WeierstrassModel { a: ainvs, b2, b4, b6, b8, c4, c6, disc })
    }

    pub fn from_i64(ainvs: [i64; 5]) -> Result<Self> {
        Self::new(ainvs.map(BigInt::from))
    }

    pub fn ainvs(&self) -> &[BigInt; 5] {
        &self.a
    }

    pub fn a1(&self) -> &BigInt {
        &self.a[0]
    }
    pub fn a2(&self) -> &BigInt {
        &self.a[1]
    }
    pub fn a3(&self) -> &BigInt {
        &self.a[2]
    }
    pub fn a4(&self) -> &BigInt {
        &self.a[3]
    }
    pub fn a6(&self) -> &BigInt {
        &self.a[4]
    }
    pub fn b2(&self) -> &BigInt {
        &self.b2
    }
    pub fn b4(&self) -> &BigInt {
        &self.b4
    }
    pub fn b6(&self) -> &BigInt {
        &self.b6
    }
    pub fn b8(&self) -> &BigInt {
        &self.b8
    }
    pub fn c4(&self) -> &BigInt {
        &self.c4
    }
    pub fn c6(&self) -> &BigInt {
        &self.c6
    }
    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn j_invariant(&self) -> BigRational {
        BigRational::new(&self.c4 * &self.c4 * &self.c4, self.disc.clone())
    }

    /// Model after the substitution `x = x' + r`, `y = y' + s x' + t`.
    pub fn rst_transform(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> WeierstrassModel {
        let [a1, a2, a3, a4, a6] = &self.a;
        let n1 = a1 + 2 * s;
        let n2 = a2 - s * a1 + 3 * r - s * s;
        let n3 = a3 + r * a1 + 2 * t;
        let n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
        let n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
        WeierstrassModel::new([n1, n2, n3, n4, n6]).expect("isomorphic model is nonsingular")
    }

    /// Model after `x = u^2 x'`, `y = u^3 y'`; `None` unless `u^i | a_i`.
    pub fn scale_down(&self, u: &BigInt) -> Option<WeierstrassModel> {
        let mut out = self.a.clone();
        for (ai, w) in out.iter_mut().zip([1u32, 2, 3, 4, 6]) {
            let uw = num_traits::pow(u.clone(), w as usize);
            if !(&*ai % &uw).is_zero() {
                return None;
            }
            *ai = &*ai / uw;
        }
        Some(WeierstrassModel::new(out).expect("scaled model is nonsingular"))
    }

    /// Stable 64-bit identifier of the model (first eight bytes of a SHA-256
    /// digest of the comma-joined coefficients).
    pub fn curve_hash(&self) -> u64 {
        let text = self.a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let digest = Sha256::digest(text.as_bytes());
        u64::from_be_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
    }

    /// Reduction of the coefficients modulo a prime `l`.
    pub fn reduce(&self, l: u64) -> [u64; 5] {
        self.a.clone().map(|x| mod_u64(&x, l))
    }

    /// `(A, B)` of the short model `y^2 = x^3 + A x + B` isomorphic over
    /// `F_l` for `l >= 5`, namely `A = -27 c4`, `B = -54 c6`.
    pub fn short_model_mod(&self, l: u64) -> (u64, u64) {
        let a = mod_u64(&(-27 * &self.c4), l);
        let b = mod_u64(&(-54 * &self.c6), l);
        (a, b)
    }

    pub fn is_singular_mod(&self, l: u64) -> bool {
        mod_u64(&self.disc, l) == 0
    }
}

impl fmt::Display for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Nonnegative residue of a big integer modulo `m`.
pub fn mod_u64(x: &BigInt, m: u64) -> u64 {
    let r = x % BigInt::from(m);
    let r = if r.is_negative() { r + BigInt::from(m) } else { r };
    u64::try_from(&r).expect("residue fits in u64")
}

/// A curve as read from JSON: `{"label": "389.a1", "ainvs": [0,1,1,-2,0]}`.
/// Coefficients may be JSON numbers of any size or decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub ainvs: Vec<serde_json::Value>,
}

impl CurveRecord {
    pub fn from_model(label: Option<&str>, model: &WeierstrassModel) -> Self {
        CurveRecord {
            label: label.map(str::to_owned),
            ainvs: model
                .ainvs()
                .iter()
                .map(|x| serde_json::Value::Number(serde_json::Number::from_str(&x.to_string()).expect("integer literal")))
                .collect(),
        }
    }

    pub fn model(&self) -> Result<WeierstrassModel> {
        if self.ainvs.len() != 5 {
            return Err(Error::InvalidInput(format!("expected 5 coefficients, got {}", self.ainvs.len())));
        }
        let mut out: [BigInt; 5] = Default::default();
        for (slot, v) in out.iter_mut().zip(&self.ainvs) {
            let text = match v {
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::String(s) => s.trim().to_owned(),
                other => return Err(Error::InvalidInput(format!("bad coefficient {other}"))),
            };
            *slot = BigInt::from_str(&text)
                .map_err(|_| Error::InvalidInput(format!("coefficient {text} is not an integer")))?;
        }
        WeierstrassModel::new(out)
    }
}

/// Parses `"[0,1,1,-2,0]"` (brackets optional) into a model.
pub fn parse_ainvs(text: &str) -> Result<WeierstrassModel> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(Error::InvalidInput(format!("expected 5 coefficients in {text:?}")));
    }
    let mut out: [BigInt; 5] = Default::default();
    for (slot, s) in out.iter_mut().zip(parts) {
        *slot = BigInt::from_str(s).map_err(|_| Error::InvalidInput(format!("coefficient {s:?} is not an integer")))?;
    }
    WeierstrassModel::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_discriminants() {
        // Direct evaluation of the b/c formulas.
        let d = |a: [i64; 5]| {
            let [a1, a2, a3, a4, a6] = a;
            let b2 = a1 * a1 + 4 * a2;
            let b4 = 2 * a4 + a1 * a3;
            let b6 = a3 * a3 + 4 * a6;
            let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
            -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        };
        assert_eq!(d([0, 0, 0, 0, 1]), -432);
        assert_eq!(d([0, 0, 1, -1, 0]), 37);
        assert_eq!(d([0, 1, 1, -2, 0]), 389);
        for (a, disc) in [([0, 0, 0, 0, 1], -432), ([0, 0, 1, -1, 0], 37), ([0, 1, 1, -2, 0], 389)] {
            let m = WeierstrassModel::from_i64(a).unwrap();
            assert_eq!(*m.discriminant(), BigInt::from(disc));
        }
    }

    #[test]
    fn singular_is_rejected() {
        assert!(matches!(WeierstrassModel::from_i64([0, 0, 0, 0, 0]), Err(Error::Singular)));
        assert!(matches!(WeierstrassModel::from_i64([0, 0, 0, -3, 2]), Err(Error::Singular)));
    }

    #[test]
    fn record_parses_big_numbers_and_strings() {
        let text = r#"{"label":"423801.ci1","ainvs":[0,0,1,-17034726259173,"-27061436852750306309"]}"#;
        let rec: CurveRecord = serde_json::from_str(text).unwrap();
        let m = rec.model().unwrap();
        assert_eq!(m.a6().to_string(), "-27061436852750306309");
        let back = serde_json::to_string(&CurveRecord::from_model(Some("x"), &m)).unwrap();
        assert!(back.contains("-27061436852750306309"));
        assert_eq!(parse_ainvs("[0,1,1,-2,0]").unwrap().discriminant(), &BigInt::from(389));
    }

    proptest::proptest! {
        #[test]
        fn invariant_relations_hold(a in proptest::array::uniform5(-1000i64..1000)) {
            if let Ok(m) = WeierstrassModel::from_i64(a) {
                proptest::prop_assert_eq!(4 * m.b8(), m.b2() * m.b6() - m.b4() * m.b4());
                proptest::prop_assert_eq!(m.c4().pow(3) - m.c6().pow(2), 1728 * m.discriminant());
                let r = BigInt::from(a[0] - 3);
                let t = BigInt::from(a[1] + 7);
                let s = BigInt::from(2);
                let n = m.rst_transform(&r, &s, &t);
                proptest::prop_assert_eq!(n.discriminant(), m.discriminant());
                proptest::prop_assert_eq!(n.j_invariant(), m.j_invariant());
            }
        }
    }
}
