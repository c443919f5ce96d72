//! The pipelines behind each subcommand.

use std::path::{Path, PathBuf};

use crate::arith::factorize;
use crate::curve::CurveContext;
use crate::error::{Error, Result};
use crate::kolyvagin::{sieve, KolyvaginPrime, Modulus};
use crate::kurihara::{
    default_k_used, functional_sign_check, scan, AuditStatus, DeltaEvaluator, KuriharaNumber, ScanConfig, SignCheck,
};
use crate::modsym::{export_eigensymbol, import_eigensymbol};
use crate::selmer::{
    parity_check, predict_structure, rank_upper_bound, semilocal_report, tamagawa_conjecture_check, HypothesisLedger,
    ParityCheck,
};

use super::report::{factor_text, value_text, CurveSection, ModsymSection, PredictionSection, Report, SieveSection};
use super::{
    build_symbol, curve_name, eigen_cache_path, load_curve, obtain_symbol, persist, LoadedSymbol, RunConfig,
    SymbolSource, REPORT_SCHEMA_VERSION,
};

/// Loads the curve and attaches the `a_l` cache when a cache directory is
/// configured.
fn open_curve(cfg: &RunConfig) -> Result<CurveContext> {
    cfg.validate()?;
    let mut ctx = load_curve(&cfg.curve)?;
    if let Some(dir) = &cfg.cache_dir {
        ctx.attach_cache(dir)?;
    }
    Ok(ctx)
}

/// Outcome of [`analyze`]: the report plus what decides the exit status.
#[derive(Debug)]
pub struct Analysis {
    pub report: Report,
    /// Where the eigen-symbol came from.
    pub source: SymbolSource,
    /// Cache problems that were repaired along the way.
    pub notes: Vec<String>,
    /// A consistency check that failed.
    pub violation: Option<String>,
}

impl Analysis {
    /// `Err(Invariant)` on a failed audit, `Err(Hypothesis)` when a
    /// hypothesis is neither verified nor asserted, else `Ok`.
    pub fn status(&self) -> Result<()> {
        if let Some(v) = &self.violation {
            return Err(Error::Invariant(v.clone()));
        }
        let failures = self.report.hypotheses.failures();
        if !failures.is_empty() {
            return Err(Error::Hypothesis(failures.join("; ")));
        }
        Ok(())
    }
}

/// Curve, eigen-symbol, sieve, scan and predictions.
pub fn analyze(cfg: &RunConfig) -> Result<Analysis> {
    cfg.install(|| analyze_inner(cfg))?
}

fn analyze_inner(cfg: &RunConfig) -> Result<Analysis> {
    let ctx = open_curve(cfg)?;
    let LoadedSymbol { symbol, source, notes, .. } = obtain_symbol(&ctx, cfg)?;
    let primes = sieve(&ctx, cfg.p, cfg.k, cfg.bound)?;
    ctx.flush_cache()?;

    let eval = DeltaEvaluator::new(&symbol, cfg.k)?;
    let delta_one = eval.delta_one();
    let scan_cfg = ScanConfig::new(cfg.p, cfg.k, cfg.bound, cfg.nu_max, cfg.budget);
    let dc = scan(&eval, &curve_name(&ctx), &primes, &scan_cfg)?;
    let ledger = HypothesisLedger::gather(&ctx, cfg.p, cfg.assertions)?;

    let mut violation = None;
    let prediction = match predict_structure(&dc) {
        Ok(pred) => Some(PredictionSection::new(&pred, &ledger)),
        Err(Error::Invariant(msg)) => {
            violation = Some(msg);
            None
        }
        Err(e) => return Err(e),
    };
    let parity = parity_check(&dc, symbol.root_number());
    if parity == ParityCheck::Inconsistent && violation.is_none() {
        violation = Some(format!("vanishing order {:?} contradicts the root number", dc.ord_estimate));
    }
    if dc.parity_audit == AuditStatus::Fail && violation.is_none() {
        violation = Some("a Kurihara number of the wrong parity is nonzero".into());
    }
    let tamagawa = tamagawa_conjecture_check(&dc, &ctx);
    let semilocal = semilocal_report(&dc, &ctx, &ledger, cfg.seed)?;
    let rank_bound = dc.ord_witness().and_then(rank_upper_bound);

    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg.into(),
        curve: CurveSection::new(&ctx),
        hypotheses: ledger,
        modsym: ModsymSection::new(&symbol),
        delta_one,
        sieve: SieveSection::new(cfg.p, cfg.k, cfg.bound, &primes),
        scan: dc,
        prediction,
        rank_bound,
        parity,
        tamagawa,
        semilocal,
    };
    Ok(Analysis { report, source, notes, violation })
}

/// A single Kurihara number with its parity check.
#[derive(Debug, Clone)]
pub struct DeltaOutcome {
    pub number: KuriharaNumber,
    pub root_number: i8,
    pub sign: SignCheck,
    pub p: u64,
}

impl DeltaOutcome {
    pub fn describe(&self) -> String {
        let kn = &self.number;
        format!(
            "n = {}\nvalue = {}\nk_used = {}\nvaluation = {}\nsign check (w = {:+}) = {:?}\n",
            factor_text(&kn.factors),
            value_text(kn, self.p),
            kn.k_used.map_or("exact".to_string(), |k| k.to_string()),
            kn.valuation,
            self.root_number,
            self.sign
        )
    }
}

/// The level-`k` Kolyvagin primes dividing `n`; an error names the first
/// factor that is not one.
fn moduli_primes(ctx: &CurveContext, p: u64, k: u32, n: u64) -> Result<Vec<KolyvaginPrime>> {
    let mut primes = Vec::new();
    for (ell, e) in factorize(n) {
        if e > 1 {
            return Err(Error::InvalidInput(format!("n = {n} is not squarefree")));
        }
        match KolyvaginPrime::new(ctx, p, ell)? {
            Some(l) if l.depth() >= k => primes.push(l),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "{ell} is not a Kolyvagin prime of level {k} for p = {p}"
                )))
            }
        }
    }
    Ok(primes)
}

/// `delta_n` for one squarefree `n`; `n = 1` gives the exact `delta_1`.
pub fn delta(cfg: &RunConfig, n: u64) -> Result<DeltaOutcome> {
    cfg.install(|| {
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        let ctx = open_curve(cfg)?;
        let primes = moduli_primes(&ctx, cfg.p, cfg.k, n)?;
        let loaded = obtain_symbol(&ctx, cfg)?;
        ctx.flush_cache()?;
        let eval = DeltaEvaluator::new(&loaded.symbol, cfg.k)?;
        let number = if n == 1 {
            eval.delta_one()
        } else {
            let m = Modulus::new(primes)?;
            eval.delta(&m, default_k_used(&m, cfg.k))?
        };
        let w = loaded.symbol.root_number();
        Ok(DeltaOutcome { sign: functional_sign_check(w, &number), number, root_number: w, p: cfg.p })
    })?
}

fn require_cache(cfg: &RunConfig) -> Result<&Path> {
    cfg.cache_dir
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("no cache directory; pass --cache-dir or set KURIHARA_CACHE".into()))
}

/// Builds the eigen-symbol and stores it in the cache; returns the cache
/// file and the plus-space dimension.
pub fn modsym_build(cfg: &RunConfig) -> Result<(PathBuf, usize)> {
    cfg.install(|| {
        let dir = require_cache(cfg)?;
        let ctx = open_curve(cfg)?;
        let (symbol, dim) = build_symbol(&ctx, cfg)?;
        let path = eigen_cache_path(dir, &ctx, cfg.p);
        persist(&symbol, &path)?;
        ctx.flush_cache()?;
        Ok((path, dim))
    })?
}

/// Copies the verified cached eigen-symbol to `out`.
pub fn modsym_export(cfg: &RunConfig, out: &Path) -> Result<()> {
    let dir = require_cache(cfg)?;
    let ctx = open_curve(cfg)?;
    let path = eigen_cache_path(dir, &ctx, cfg.p);
    if !path.exists() {
        return Err(Error::InvalidInput(format!(
            "no eigen-symbol for {} at p = {} in {}; run `modsym build` first",
            curve_name(&ctx),
            cfg.p,
            dir.display()
        )));
    }
    let symbol = import_eigensymbol(&path, &ctx)?;
    export_eigensymbol(&symbol, out)
}

/// Verifies an external eigen-symbol against the curve and stores it in
/// the cache.
pub fn modsym_import(cfg: &RunConfig, from: &Path) -> Result<PathBuf> {
    let dir = require_cache(cfg)?;
    let ctx = open_curve(cfg)?;
    let symbol = import_eigensymbol(from, &ctx)?;
    if symbol.p() != cfg.p {
        return Err(Error::InvalidInput(format!("eigen-symbol was normalized at p = {}, not {}", symbol.p(), cfg.p)));
    }
    let path = eigen_cache_path(dir, &ctx, cfg.p);
    persist(&symbol, &path)?;
    Ok(path)
}

/// The Kolyvagin primes up to the configured bound.
pub fn sieve_primes(cfg: &RunConfig) -> Result<SieveSection> {
    cfg.install(|| {
        let ctx = open_curve(cfg)?;
        let primes = sieve(&ctx, cfg.p, cfg.k, cfg.bound)?;
        ctx.flush_cache()?;
        Ok(SieveSection::new(cfg.p, cfg.k, cfg.bound, &primes))
    })?
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kurihara::DeltaValuation;
    use crate::selmer::PredictionStatus;

    #[test]
    fn rank_two_report() {
        let cfg = RunConfig { nu_max: 2, ..RunConfig::inline("[0,1,1,-2,0]") };
        let a = analyze(&cfg).unwrap();
        let r = &a.report;
        assert_eq!(r.scan.ord_estimate, Some(2));
        assert_eq!(r.scan.ord_witness().unwrap().n, 41 * 61);
        assert_eq!(r.delta_one.valuation, DeltaValuation::Infinite);
        let pred = r.prediction.as_ref().unwrap();
        assert_eq!(pred.corank, Some(2));
        assert_eq!(pred.status, PredictionStatus::Complete);
        assert!(pred.torsion.is_empty());
        assert_eq!(r.rank_bound, Some(2));
        assert!(a.violation.is_none());
        let json = r.to_json();
        assert!(json.contains("\"ord_estimate\": 2"));
        assert!(r.summary().contains("41*61"));
    }

    #[test]
    fn single_delta() {
        let cfg = RunConfig::inline("[1,-1,0,-332311,-73733731]");
        let one = delta(&cfg, 1).unwrap();
        assert_eq!(one.number.k_used, None);
        assert_eq!(one.number.valuation, DeltaValuation::Exact(2));
        assert!(one.describe().contains("value = 25"));
        let d = delta(&cfg, 131 * 151).unwrap();
        assert!(d.number.is_nonzero());
        assert_eq!(d.sign, SignCheck::Consistent);
        assert!(matches!(delta(&cfg, 131 * 7), Err(Error::InvalidInput(_))));
        assert!(matches!(delta(&cfg, 131 * 131), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn modsym_commands() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("export.json");
        let mut cfg = RunConfig::inline("[0,0,1,-1,0]");
        assert!(modsym_build(&cfg).is_err());
        cfg.cache_dir = Some(dir.path().join("cache"));
        assert!(matches!(modsym_export(&cfg, &out), Err(Error::InvalidInput(_))));
        let (path, dim) = modsym_build(&cfg).unwrap();
        assert!(path.exists());
        assert!(dim >= 2);
        modsym_export(&cfg, &out).unwrap();

        let other = RunConfig { cache_dir: Some(dir.path().join("other")), ..cfg.clone() };
        modsym_import(&other, &out).unwrap();
        let wrong = RunConfig { cache_dir: other.cache_dir.clone(), ..RunConfig::inline("[0,1,1,-2,0]") };
        assert!(matches!(modsym_import(&wrong, &out), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn corrupt_ap_cache_is_replaced() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig { cache_dir: Some(dir.path().to_path_buf()), ..RunConfig::inline("[0,0,1,-1,0]") };
        let first = sieve_primes(&cfg).unwrap();
        let ctx = load_curve(&cfg.curve).unwrap();
        let path = dir.path().join(format!("{:016x}.ap", ctx.curve_hash()));
        let good = std::fs::read(&path).unwrap();
        std::fs::write(&path, b"garbage").unwrap();
        let second = sieve_primes(&cfg).unwrap();
        assert_eq!(first.primes.len(), second.primes.len());
        assert_eq!(std::fs::read(&path).unwrap(), good);
    }
}
