//! Scans over squarefree moduli and the resulting valuation invariants.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kolyvagin::{enumerate_moduli, KolyvaginPrime, Modulus};

use super::delta::{default_k_used, functional_sign_check, DeltaEvaluator, DeltaValuation, KuriharaNumber, SignCheck};

#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub p: u64,
    pub k: u32,
    pub bound: u64,
    pub nu_max: usize,
    /// Moduli evaluated per `nu` of the matching parity.
    pub budget: usize,
    /// Moduli evaluated per `nu` of the opposite parity.
    pub audit_sample: usize,
    /// Distinct minimizers needed before a minimum counts as saturated.
    pub saturation_count: usize,
}

impl ScanConfig {
    pub fn new(p: u64, k: u32, bound: u64, nu_max: usize, budget: usize) -> Self {
        ScanConfig { p, k, bound, nu_max, budget, audit_sample: 5, saturation_count: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// `(-1)^nu = w`: the values carry information.
    Matching,
    /// `(-1)^nu = -w`: the values are forced to vanish.
    Opposite,
}

/// Per-`nu` summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialRecord {
    pub nu: usize,
    pub parity: Parity,
    pub computed: usize,
    /// Upper bound for the minimal valuation over all `n` with this `nu`.
    pub min_valuation: DeltaValuation,
    /// Number of computed `n` attaining an exact minimum.
    pub attained: usize,
    pub saturated: bool,
    /// The first `n` attaining the minimum.
    pub witness: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub n: u64,
    pub factors: Vec<u64>,
    pub valuation: DeltaValuation,
    pub check: SignCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStatus {
    Pass,
    Fail,
}

/// Kurihara numbers over a finite search, with the invariants they bound.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaCollection {
    pub curve: String,
    pub p: u64,
    pub k: u32,
    pub bound: u64,
    pub budgets: Vec<usize>,
    pub root_number: i8,
    pub entries: Vec<KuriharaNumber>,
    pub audits: Vec<AuditEntry>,
    pub partials: Vec<PartialRecord>,
    /// Least `nu` with a nonvanishing witness.
    pub ord_estimate: Option<usize>,
    /// Least valuation over every computed `n`.
    pub min_valuation_all: DeltaValuation,
    pub parity_audit: AuditStatus,
    /// Some zero was seen at a precision too low to separate it from the
    /// observed minimum.
    pub precision_limited: bool,
}

impl DeltaCollection {
    pub fn partial(&self, nu: usize) -> Option<&PartialRecord> {
        self.partials.iter().find(|r| r.nu == nu)
    }

    pub fn entry(&self, n: u64) -> Option<&KuriharaNumber> {
        self.entries.iter().find(|e| e.n == n)
    }

    /// `partial^(i)` as an upper bound, `None` when not searched.
    pub fn min_valuation(&self, nu: usize) -> Option<DeltaValuation> {
        self.partial(nu).filter(|r| r.computed > 0).map(|r| r.min_valuation)
    }

    /// The witness of the vanishing order.
    pub fn ord_witness(&self) -> Option<&KuriharaNumber> {
        let nu = self.ord_estimate?;
        let n = self.partial(nu)?.witness?;
        self.entry(n)
    }
}

fn parity_of(nu: usize, w: i8) -> Parity {
    let sign = if nu.is_multiple_of(2) { 1 } else { -1 };
    if sign == w {
        Parity::Matching
    } else {
        Parity::Opposite
    }
}

fn summarize(nu: usize, parity: Parity, values: &[&KuriharaNumber], cfg: &ScanConfig) -> PartialRecord {
    let mut min = DeltaValuation::Infinite;
    for v in values {
        min = min.meet(v.valuation);
    }
    if values.is_empty() {
        min = DeltaValuation::AtLeast(cfg.k);
    }
    let attaining: Vec<u64> = values.iter().filter(|v| v.valuation == min && min.is_nonzero()).map(|v| v.n).collect();
    let saturated = match min {
        // nu = 0 has the single modulus n = 1, and 0 is the least valuation
        DeltaValuation::Exact(v) if nu == 0 || v == 0 => true,
        DeltaValuation::Exact(v) => attaining.len() >= cfg.saturation_count && (v as u64) + 1 < cfg.k as u64,
        _ => false,
    };
    PartialRecord {
        nu,
        parity,
        computed: values.len(),
        min_valuation: min,
        attained: attaining.len(),
        saturated,
        witness: attaining.first().copied(),
    }
}

/// Evaluates `delta_n` for the first `budget` moduli of every `nu <= nu_max`
/// of the matching parity, and an audit sample of the opposite parity.
pub fn scan(
    eval: &DeltaEvaluator<'_>,
    curve: &str,
    primes: &[KolyvaginPrime],
    cfg: &ScanConfig,
) -> Result<DeltaCollection> {
    if eval.symbol().p() != cfg.p {
        return Err(Error::InvalidInput("eigen-symbol was normalized at another prime".into()));
    }
    if eval.k_max() < cfg.k {
        return Err(Error::InvalidInput(format!("evaluator precision {} is below k = {}", eval.k_max(), cfg.k)));
    }
    let w = eval.symbol().root_number();
    let mut entries = Vec::new();
    let mut audits = Vec::new();
    let mut partials = Vec::new();
    for nu in 0..=cfg.nu_max {
        let parity = parity_of(nu, w);
        let count = match parity {
            Parity::Matching => cfg.budget,
            Parity::Opposite => cfg.audit_sample.min(cfg.budget.max(1)),
        };
        let moduli: Vec<Modulus> = enumerate_moduli(primes, nu, count).collect();
        let values = moduli
            .par_iter()
            .map(|m| eval.delta(m, default_k_used(m, cfg.k)))
            .collect::<Result<Vec<_>>>()?;
        let record = summarize(nu, parity, &values.iter().collect::<Vec<_>>(), cfg);
        match parity {
            Parity::Matching => entries.extend(values),
            Parity::Opposite => audits.extend(values.into_iter().map(|v| AuditEntry {
                check: functional_sign_check(w, &v),
                n: v.n,
                factors: v.factors,
                valuation: v.valuation,
            })),
        }
        partials.push(record);
    }

    let ord_estimate = partials
        .iter()
        .find(|r| r.parity == Parity::Matching && r.min_valuation.is_nonzero())
        .map(|r| r.nu);
    let min_valuation_all = partials
        .iter()
        .filter(|r| r.parity == Parity::Matching && r.computed > 0)
        .fold(DeltaValuation::Infinite, |acc, r| acc.meet(r.min_valuation));
    let parity_audit = if audits.iter().all(|a| a.check == SignCheck::Consistent) {
        AuditStatus::Pass
    } else {
        AuditStatus::Fail
    };
    let precision_limited = entries.iter().any(|e| match (e.valuation, min_valuation_all) {
        (DeltaValuation::AtLeast(k), DeltaValuation::Exact(m)) => k <= m + 1,
        (DeltaValuation::AtLeast(_), _) => true,
        _ => false,
    });
    Ok(DeltaCollection {
        curve: curve.to_string(),
        p: cfg.p,
        k: cfg.k,
        bound: cfg.bound,
        budgets: vec![cfg.budget; cfg.nu_max + 1],
        root_number: w,
        entries,
        audits,
        partials,
        ord_estimate,
        min_valuation_all,
        parity_audit,
        precision_limited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveContext, WeierstrassModel};
    use crate::kolyvagin::sieve;
    use crate::modsym::{extract_eigenline, EigenSymbol, NormalizeOptions, SymbolSpace};

    fn symbol(a: [i64; 5]) -> (CurveContext, EigenSymbol) {
        let ctx = CurveContext::new(WeierstrassModel::from_i64(a).unwrap(), None).unwrap();
        let space = SymbolSpace::build(ctx.conductor()).unwrap();
        let line = extract_eigenline(&space, &ctx, 0).unwrap();
        let es = EigenSymbol::normalize(line, &ctx, 5, &NormalizeOptions::default()).unwrap();
        (ctx, es)
    }

    #[test]
    fn rank_two_scan() {
        let (ctx, es) = symbol([0, 1, 1, -2, 0]);
        let primes = sieve(&ctx, 5, 1, 200).unwrap();
        let eval = DeltaEvaluator::new(&es, 1).unwrap();
        let cfg = ScanConfig::new(5, 1, 200, 2, 10);
        let dc = scan(&eval, "389.a1", &primes, &cfg).unwrap();
        assert_eq!(dc.ord_estimate, Some(2));
        assert_eq!(dc.parity_audit, AuditStatus::Pass);
        assert_eq!(dc.min_valuation(0), Some(DeltaValuation::Infinite));
        assert_eq!(dc.min_valuation(2), Some(DeltaValuation::Exact(0)));
        assert_eq!(dc.min_valuation_all, DeltaValuation::Exact(0));
        assert!(dc.entry(41 * 61).unwrap().is_nonzero());
        assert_eq!(dc.partial(1).unwrap().parity, Parity::Opposite);
    }

    #[test]
    fn empty_budget() {
        let (ctx, es) = symbol([0, 1, 1, -2, 0]);
        let primes = sieve(&ctx, 5, 1, 200).unwrap();
        let eval = DeltaEvaluator::new(&es, 1).unwrap();
        let mut cfg = ScanConfig::new(5, 1, 200, 3, 0);
        cfg.audit_sample = 0;
        let dc = scan(&eval, "389.a1", &primes, &cfg).unwrap();
        assert_eq!(dc.ord_estimate, None);
        assert!(dc.entries.is_empty());
        for r in &dc.partials {
            assert_eq!(r.min_valuation, DeltaValuation::AtLeast(1));
        }
    }

    #[test]
    fn rank_zero_with_sha() {
        let (ctx, es) = symbol([1, -1, 0, -332311, -73733731]);
        let primes = sieve(&ctx, 5, 1, 200).unwrap();
        let eval = DeltaEvaluator::new(&es, 1).unwrap();
        let dc = scan(&eval, "1058.e1", &primes, &ScanConfig::new(5, 1, 200, 2, 10)).unwrap();
        assert_eq!(dc.ord_estimate, Some(0));
        assert_eq!(dc.min_valuation(0), Some(DeltaValuation::Exact(2)));
        assert_eq!(dc.min_valuation(2), Some(DeltaValuation::Exact(0)));
        assert!(dc.entry(131 * 151).unwrap().is_nonzero());
        assert!(dc.partial(0).unwrap().saturated);
    }
}
