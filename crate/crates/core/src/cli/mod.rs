//! Batch front end: run configuration, on-disk caches and the commands
//! behind the `kurihara` binary.

mod args;
mod commands;
mod report;

use std::fs;
use std::path::{Path, PathBuf};

use crate::arith::is_prime;
use crate::curve::{parse_ainvs, CurveContext, CurveRecord};
use crate::error::{Error, Result};
use crate::modsym::{
    export_eigensymbol, extract_eigenline, import_eigensymbol, EigenSymbol, NormalizeOptions, SymbolSpace,
};
use crate::selmer::Assertions;

pub use args::{run, Cli, Command, CommonArgs, ModsymAction};
pub use commands::{analyze, delta, modsym_build, modsym_export, modsym_import, sieve_primes, Analysis, DeltaOutcome};
pub use report::{
    CurveSection, ModsymSection, PredictionSection, Report, SievedPrime, SieveSection, REPORT_SCHEMA_VERSION,
};

/// Environment variable that overrides the cache directory.
pub const CACHE_ENV: &str = "KURIHARA_CACHE";

/// Where the curve comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveSource {
    /// `[a1,a2,a3,a4,a6]`.
    Inline(String),
    /// A JSON record `{"label": ..., "ainvs": [...]}`.
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub curve: CurveSource,
    pub p: u64,
    pub k: u32,
    pub bound: u64,
    pub nu_max: usize,
    /// Moduli evaluated per `nu`.
    pub budget: usize,
    pub precision_bits: usize,
    pub cache_dir: Option<PathBuf>,
    pub import_modsym: Option<PathBuf>,
    pub assertions: Assertions,
    pub seed: u64,
    /// Size of the worker pool; `None` uses every core.
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn new(curve: CurveSource) -> Self {
        RunConfig {
            curve,
            p: 5,
            k: 1,
            bound: 200,
            nu_max: 3,
            budget: 10,
            precision_bits: 128,
            cache_dir: None,
            import_modsym: None,
            assertions: Assertions::default(),
            seed: 0,
            workers: None,
        }
    }

    pub fn inline(ainvs: &str) -> Self {
        RunConfig::new(CurveSource::Inline(ainvs.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 5 || !is_prime(self.p) {
            return Err(Error::InvalidInput(format!("p = {} must be a prime >= 5", self.p)));
        }
        if self.k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        if self.precision_bits < 64 {
            return Err(Error::InvalidInput("precision must be at least 64 bits".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidInput("at least one worker is needed".into()));
        }
        Ok(())
    }

    fn normalize_options(&self) -> NormalizeOptions {
        NormalizeOptions { precision_bits: self.precision_bits, ..NormalizeOptions::default() }
    }

    /// Runs `f` on a pool of the configured size.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.workers {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// `KURIHARA_CACHE` if set and nonempty, else the flag.
pub fn resolve_cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag,
    }
}

pub fn load_curve(source: &CurveSource) -> Result<CurveContext> {
    match source {
        CurveSource::Inline(text) => CurveContext::new(parse_ainvs(text)?, None),
        CurveSource::File(path) => {
            let text = fs::read_to_string(path)?;
            let record: CurveRecord =
                serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            CurveContext::new(record.model()?, record.label)
        }
    }
}

/// The label if known, else the coefficient list.
pub fn curve_name(ctx: &CurveContext) -> String {
    match ctx.label() {
        Some(l) => l.to_string(),
        None => {
            let a: Vec<String> = ctx.model().ainvs().iter().map(|x| x.to_string()).collect();
            format!("[{}]", a.join(","))
        }
    }
}

/// Cache file of the eigen-symbol of a curve normalized at `p`.
pub fn eigen_cache_path(dir: &Path, ctx: &CurveContext, p: u64) -> PathBuf {
    dir.join(format!("{:016x}-p{p}.eigen.json", ctx.curve_hash()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolSource {
    Imported,
    Cached,
    Built,
}

/// An eigen-symbol ready for evaluation.
#[derive(Debug)]
pub struct LoadedSymbol {
    pub symbol: EigenSymbol,
    pub source: SymbolSource,
    /// Dimension of the plus space, when it was built here.
    pub dimension: Option<usize>,
    pub notes: Vec<String>,
}

fn check_prime(es: &EigenSymbol, p: u64) -> Result<()> {
    if es.p() != p {
        return Err(Error::InvalidInput(format!("eigen-symbol was normalized at p = {}, not {p}", es.p())));
    }
    Ok(())
}

/// Builds the space, cuts out the eigenline and normalizes it.
pub fn build_symbol(ctx: &CurveContext, cfg: &RunConfig) -> Result<(EigenSymbol, usize)> {
    let space = SymbolSpace::build(ctx.conductor())?;
    let line = extract_eigenline(&space, ctx, cfg.seed)?;
    let es = EigenSymbol::normalize(line, ctx, cfg.p, &cfg.normalize_options())?;
    Ok((es, space.dimension()))
}

/// Imports, loads from the cache or builds the eigen-symbol. A cache file
/// that fails verification is discarded and rebuilt.
pub fn obtain_symbol(ctx: &CurveContext, cfg: &RunConfig) -> Result<LoadedSymbol> {
    if let Some(path) = &cfg.import_modsym {
        let symbol = import_eigensymbol(path, ctx)?;
        check_prime(&symbol, cfg.p)?;
        return Ok(LoadedSymbol { symbol, source: SymbolSource::Imported, dimension: None, notes: Vec::new() });
    }
    let mut notes = Vec::new();
    let cache = cfg.cache_dir.as_ref().map(|d| eigen_cache_path(d, ctx, cfg.p));
    if let Some(path) = cache.as_ref().filter(|p| p.exists()) {
        match import_eigensymbol(path, ctx).and_then(|es| check_prime(&es, cfg.p).map(|_| es)) {
            Ok(symbol) => return Ok(LoadedSymbol { symbol, source: SymbolSource::Cached, dimension: None, notes }),
            Err(e) => notes.push(format!("discarded cache file {}: {e}", path.display())),
        }
    }
    let (symbol, dim) = build_symbol(ctx, cfg)?;
    if let Some(path) = &cache {
        persist(&symbol, path)?;
    }
    Ok(LoadedSymbol { symbol, source: SymbolSource::Built, dimension: Some(dim), notes })
}

fn persist(es: &EigenSymbol, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    export_eigensymbol(es, &tmp)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let mut cfg = RunConfig::inline("[0,0,1,-1,0]");
        assert!(cfg.validate().is_ok());
        cfg.p = 4;
        assert!(matches!(cfg.validate(), Err(Error::InvalidInput(_))));
        cfg.p = 3;
        assert!(cfg.validate().is_err());
        cfg.p = 7;
        cfg.k = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn curve_sources() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"label": "37.a1", "ainvs": [0, 0, 1, "-1", 0]}"#).unwrap();
        let ctx = load_curve(&CurveSource::File(path)).unwrap();
        assert_eq!(ctx.conductor(), 37);
        assert_eq!(curve_name(&ctx), "37.a1");
        let ctx = load_curve(&CurveSource::Inline("[0,0,1,-1,0]".into())).unwrap();
        assert_eq!(curve_name(&ctx), "[0,0,1,-1,0]");
        assert!(load_curve(&CurveSource::Inline("[0,0,0,0,0]".into())).is_err());
    }

    #[test]
    fn corrupt_cache_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::inline("[0,0,1,-1,0]");
        cfg.cache_dir = Some(dir.path().to_path_buf());
        let ctx = load_curve(&cfg.curve).unwrap();
        let first = obtain_symbol(&ctx, &cfg).unwrap();
        assert_eq!(first.source, SymbolSource::Built);
        let again = obtain_symbol(&ctx, &cfg).unwrap();
        assert_eq!(again.source, SymbolSource::Cached);

        let path = eigen_cache_path(dir.path(), &ctx, 5);
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replacen("\"version\":1", "\"version\":1,\"junk\":", 1)).unwrap();
        let rebuilt = obtain_symbol(&ctx, &cfg).unwrap();
        assert_eq!(rebuilt.source, SymbolSource::Built);
        assert_eq!(rebuilt.notes.len(), 1);
        assert_eq!(obtain_symbol(&ctx, &cfg).unwrap().source, SymbolSource::Cached);
    }
}
