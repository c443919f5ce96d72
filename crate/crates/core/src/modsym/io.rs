//! JSON persistence of eigen-symbols.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::arith::primes_up_to;
use crate::curve::CurveContext;
use crate::error::{Error, Result};

use super::eigen::Eigenline;
use super::symbol::{fricke_sign, p_scale, EigenSymbol, Pinning};

pub const EIGEN_FILE_VERSION: u32 = 1;

/// Number of Hecke equations re-verified on import.
const IMPORT_HECKE_CHECKS: usize = 3;

#[derive(Debug, Serialize, Deserialize)]
struct EigenFile {
    version: u32,
    level: u64,
    curve_hash: u64,
    ainvs: Vec<Number>,
    p: u64,
    basis_index_map: Vec<usize>,
    dual_vector: Vec<(usize, Number, Number)>,
    lambda_p_normalized: (Number, Number),
    lambda_pinned: Option<(Number, Number)>,
    fricke_eps: i8,
    verified_hecke: Vec<(u64, i64)>,
    /// Discriminant of the twist the scale was pinned against; 1 for the
    /// central value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pinned_by: Option<i64>,
}

fn num(x: &BigInt) -> Number {
    Number::from_str(&x.to_string()).expect("integer literal")
}

fn big(n: &Number) -> Result<BigInt> {
    BigInt::from_str(&n.to_string()).map_err(|_| Error::Format(format!("expected an integer, found {n}")))
}

fn rational(pair: &(Number, Number)) -> Result<BigRational> {
    let (n, d) = (big(&pair.0)?, big(&pair.1)?);
    if d.is_zero() {
        return Err(Error::Format("zero denominator".into()));
    }
    Ok(BigRational::new(n, d))
}

fn pair(r: &BigRational) -> (Number, Number) {
    (num(r.numer()), num(r.denom()))
}

/// Canonical JSON text of an eigen-symbol: fixed field order, indices
/// ascending, rationals in lowest terms, zero entries omitted.
pub fn eigensymbol_to_json(es: &EigenSymbol) -> String {
    let line = es.line();
    let file = EigenFile {
        version: EIGEN_FILE_VERSION,
        level: es.level(),
        curve_hash: es.curve_hash(),
        ainvs: es.ainvs().iter().map(num).collect(),
        p: es.p(),
        basis_index_map: line.basis().to_vec(),
        dual_vector: line
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, num(v), Number::from(1u8)))
            .collect(),
        lambda_p_normalized: pair(es.lambda_p()),
        lambda_pinned: es.lambda_pinned().map(pair),
        fricke_eps: es.fricke_eps(),
        verified_hecke: line.verified_hecke().to_vec(),
        pinned_by: es.pinning().map(|p| match p {
            Pinning::Central => 1,
            Pinning::Twist(d) => d,
        }),
    };
    serde_json::to_string(&file).expect("serializable")
}

pub fn export_eigensymbol(es: &EigenSymbol, path: &Path) -> Result<()> {
    std::fs::write(path, eigensymbol_to_json(es))?;
    Ok(())
}

pub fn import_eigensymbol(path: &Path, ctx: &CurveContext) -> Result<EigenSymbol> {
    let text = std::fs::read_to_string(path)?;
    eigensymbol_from_json(&text, ctx)
}

/// Parses and re-verifies an eigen-symbol for the curve of `ctx`: the
/// relations, the Hecke equations at the first good primes, the Fricke
/// sign and the p-normalization are all recomputed.
pub fn eigensymbol_from_json(text: &str, ctx: &CurveContext) -> Result<EigenSymbol> {
    let file: EigenFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.version != EIGEN_FILE_VERSION {
        return Err(Error::Format(format!("unsupported eigen-symbol version {}", file.version)));
    }
    if file.curve_hash != ctx.curve_hash() {
        return Err(Error::Hypothesis(format!(
            "eigen-symbol belongs to curve hash {:016x}, not {:016x}",
            file.curve_hash,
            ctx.curve_hash()
        )));
    }
    if file.level != ctx.conductor() {
        return Err(Error::Hypothesis(format!(
            "eigen-symbol level {} differs from the conductor {}",
            file.level,
            ctx.conductor()
        )));
    }
    let ainvs = file.ainvs.iter().map(big).collect::<Result<Vec<_>>>()?;
    if ainvs.as_slice() != ctx.model().ainvs().as_slice() {
        return Err(Error::Hypothesis("eigen-symbol coefficients differ from the curve".into()));
    }

    let size = super::p1::p1_size(file.level) as usize;
    let mut entries = Vec::with_capacity(file.dual_vector.len());
    let mut common = BigInt::one();
    let mut last = None;
    for (i, n, d) in &file.dual_vector {
        if *i >= size || last.is_some_and(|l| l >= *i) {
            return Err(Error::Format(format!("dual vector index {i} out of order or range")));
        }
        last = Some(*i);
        let r = rational(&(n.clone(), d.clone()))?;
        common = common.lcm(r.denom());
        entries.push((*i, r));
    }
    // Clear denominators and content, carrying the factor into the scales.
    let mut values = vec![BigInt::zero(); size];
    let mut content = BigInt::zero();
    for (i, r) in &entries {
        let v = r.numer() * (&common / r.denom());
        content = content.gcd(&v);
        values[*i] = v;
    }
    if content.is_zero() {
        return Err(Error::Eigenline("functional is identically zero".into()));
    }
    let first_sign = values.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
    if first_sign {
        content = -content;
    }
    for v in values.iter_mut() {
        *v = &*v / &content;
    }
    let rescale = BigRational::new(content, common);

    let checks: Vec<(u64, i64)> = primes_up_to(1000)
        .into_iter()
        .filter(|&q| !ctx.is_bad(q))
        .take(IMPORT_HECKE_CHECKS)
        .map(|q| (q, ctx.ap(q)))
        .collect();
    for &(q, aq) in &file.verified_hecke {
        if !ctx.is_bad(q) && ctx.ap(q) != aq {
            return Err(Error::Hypothesis(format!("recorded a_{q} = {aq} differs from the curve's {}", ctx.ap(q))));
        }
    }
    let line = Eigenline::from_values(file.level, values, file.basis_index_map.clone(), &checks)?;

    let eps = fricke_sign(&line)?;
    if eps != file.fricke_eps {
        return Err(Error::Invariant(format!(
            "recorded Fricke sign {} differs from the recomputed {eps}",
            file.fricke_eps
        )));
    }
    let lambda_p = p_scale(&line, file.p)?;
    let recorded = rational(&file.lambda_p_normalized)? * &rescale;
    if recorded != lambda_p {
        return Err(Error::Format(format!(
            "recorded p-normalization {recorded} differs from the recomputed {lambda_p}"
        )));
    }
    let pinned = file.lambda_pinned.as_ref().map(rational).transpose()?.map(|r| r * &rescale);
    let pinning = match (&pinned, file.pinned_by) {
        (None, _) => None,
        (Some(_), Some(1)) => Some(Pinning::Central),
        (Some(_), Some(d)) => Some(Pinning::Twist(d)),
        (Some(_), None) => None,
    };
    Ok(EigenSymbol::from_parts(line, file.curve_hash, ctx.model().ainvs().clone(), file.p, lambda_p, pinned, pinning, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::WeierstrassModel;
    use crate::modsym::{extract_eigenline, NormalizeOptions, SymbolSpace};

    fn build(a: [i64; 5]) -> (CurveContext, EigenSymbol) {
        let ctx = CurveContext::new(WeierstrassModel::from_i64(a).unwrap(), None).unwrap();
        let space = SymbolSpace::build(ctx.conductor()).unwrap();
        let line = extract_eigenline(&space, &ctx, 0).unwrap();
        let es = EigenSymbol::normalize(line, &ctx, 5, &NormalizeOptions::default()).unwrap();
        (ctx, es)
    }

    #[test]
    fn round_trip_is_exact() {
        let (ctx, es) = build([0, 1, 1, -2, 0]);
        let text = eigensymbol_to_json(&es);
        let back = eigensymbol_from_json(&text, &ctx).unwrap();
        assert_eq!(eigensymbol_to_json(&back), text);
        assert_eq!(back.pinning(), es.pinning());
        let mut seed = 99u64;
        for _ in 0..100 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let m = 1 + (seed >> 33) % 500;
            let a = ((seed >> 13) % 1000) as i64;
            assert_eq!(es.value(a, m), back.value(a, m));
            assert_eq!(es.pinned_value(a, m), back.pinned_value(a, m));
        }
    }

    #[test]
    fn file_on_disk() {
        let (ctx, es) = build([0, 0, 1, -1, 0]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.json");
        export_eigensymbol(&es, &path).unwrap();
        let back = import_eigensymbol(&path, &ctx).unwrap();
        assert_eq!(back.root_number(), -1);
    }

    #[test]
    fn rescaled_vector_is_accepted() {
        let (ctx, es) = build([0, 0, 1, -1, 0]);
        let mut v: serde_json::Value = serde_json::from_str(&eigensymbol_to_json(&es)).unwrap();
        for e in v["dual_vector"].as_array_mut().unwrap() {
            let n: i64 = e[1].as_i64().unwrap();
            e[1] = (-3 * n).into();
            e[2] = 7.into();
        }
        let (n, d) = (es.lambda_p().numer().clone(), es.lambda_p().denom().clone());
        let scaled = BigRational::new(n, d) * BigRational::new((-7).into(), 3.into());
        v["lambda_p_normalized"] = serde_json::json!([scaled.numer().to_string().parse::<i64>().unwrap(), scaled.denom().to_string().parse::<i64>().unwrap()]);
        v["lambda_pinned"] = serde_json::Value::Null;
        let back = eigensymbol_from_json(&v.to_string(), &ctx).unwrap();
        assert_eq!(back.value(1, 7), es.value(1, 7));
    }

    #[test]
    fn tampering_is_rejected() {
        let (ctx, es) = build([0, 1, 1, -2, 0]);
        let text = eigensymbol_to_json(&es);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let n = v["dual_vector"][3][1].as_i64().unwrap();
        v["dual_vector"][3][1] = (n + 1).into();
        assert!(matches!(eigensymbol_from_json(&v.to_string(), &ctx), Err(Error::Eigenline(_))));

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["curve_hash"] = (es.curve_hash() ^ 1).into();
        assert!(matches!(eigensymbol_from_json(&v.to_string(), &ctx), Err(Error::Hypothesis(_))));

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["version"] = 2.into();
        assert!(matches!(eigensymbol_from_json(&v.to_string(), &ctx), Err(Error::Format(_))));

        let (other, _) = build([0, 0, 1, -1, 0]);
        assert!(matches!(eigensymbol_from_json(&text, &other), Err(Error::Hypothesis(_))));
    }
}
