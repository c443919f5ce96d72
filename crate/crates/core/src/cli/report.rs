//! The JSON report of an `analyze` run and its plain-text summary.

use std::fmt::Write as _;

use serde::Serialize;

use crate::curve::{CurveContext, LocalData};
use crate::kolyvagin::KolyvaginPrime;
use crate::kurihara::{DeltaCollection, DeltaValue, KuriharaNumber, Parity};
use crate::modsym::{EigenSymbol, Pinning};
use crate::selmer::{
    HypothesisLedger, ParityCheck, PredictionStatus, SelmerPrediction, SemilocalReport, SemilocalStatus,
    ShaPrediction, TamagawaReport,
};

use super::{curve_name, RunConfig};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// The parameters that affect the results. Paths and the worker count are
/// left out so that reports compare equal across machines.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub p: u64,
    pub k: u32,
    pub bound: u64,
    pub nu_max: usize,
    pub budget: usize,
    pub precision_bits: usize,
    pub seed: u64,
    pub assert_manin: bool,
    pub assert_surjective: bool,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        ConfigEcho {
            p: c.p,
            k: c.k,
            bound: c.bound,
            nu_max: c.nu_max,
            budget: c.budget,
            precision_bits: c.precision_bits,
            seed: c.seed,
            assert_manin: c.assertions.manin_ok,
            assert_surjective: c.assertions.rho_surjective,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveSection {
    pub label: String,
    pub ainvs: Vec<String>,
    pub conductor: u64,
    pub discriminant: String,
    pub curve_hash: String,
    pub tamagawa_product: u64,
    pub local_data: Vec<LocalData>,
}

impl CurveSection {
    pub fn new(ctx: &CurveContext) -> Self {
        CurveSection {
            label: curve_name(ctx),
            ainvs: ctx.model().ainvs().iter().map(|a| a.to_string()).collect(),
            conductor: ctx.conductor(),
            discriminant: ctx.model().discriminant().to_string(),
            curve_hash: format!("{:016x}", ctx.curve_hash()),
            tamagawa_product: ctx.tamagawa_product(),
            local_data: ctx.bad_primes().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModsymSection {
    pub level: u64,
    pub fricke_eps: i8,
    pub root_number: i8,
    /// Scale taking the primitive integral line to the p-normalized symbol.
    pub lambda_p: String,
    /// Scale taking it to `L`-value-pinned symbols, when found.
    pub lambda_pinned: Option<String>,
    /// `"central"` or `"twist:D"`.
    pub pinning: Option<String>,
    /// Whether the two scales differ by a p-adic unit.
    pub scales_agree: Option<bool>,
}

impl ModsymSection {
    pub fn new(es: &EigenSymbol) -> Self {
        ModsymSection {
            level: es.level(),
            fricke_eps: es.fricke_eps(),
            root_number: es.root_number(),
            lambda_p: es.lambda_p().to_string(),
            lambda_pinned: es.lambda_pinned().map(|r| r.to_string()),
            pinning: es.pinning().map(|p| match p {
                Pinning::Central => "central".to_string(),
                Pinning::Twist(d) => format!("twist:{d}"),
            }),
            scales_agree: es.scales_agree(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SievedPrime {
    pub ell: u64,
    pub a_ell: i64,
    /// Largest `j` with `ell` in the level-`j` set.
    pub depth: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct SieveSection {
    pub p: u64,
    pub k: u32,
    pub bound: u64,
    pub primes: Vec<SievedPrime>,
}

impl SieveSection {
    pub fn new(p: u64, k: u32, bound: u64, primes: &[KolyvaginPrime]) -> Self {
        SieveSection {
            p,
            k,
            bound,
            primes: primes
                .iter()
                .map(|l| SievedPrime { ell: l.ell(), a_ell: l.a_ell(), depth: l.depth() })
                .collect(),
        }
    }
}

/// The structural prediction in report form: torsion as `[p, e, 2]`
/// triples and Fitting exponents as `[i, e]` pairs (`null` for the zero
/// ideal).
#[derive(Debug, Clone, Serialize)]
pub struct PredictionSection {
    pub status: PredictionStatus,
    pub corank: Option<usize>,
    pub torsion: Vec<(u64, u32, u32)>,
    pub sha: Option<ShaPrediction>,
    pub fitting: Vec<(usize, Option<u32>)>,
    pub length: Option<u32>,
    /// Hypotheses that are neither verified nor asserted.
    pub hypotheses: Vec<String>,
    pub flags: Vec<String>,
}

impl PredictionSection {
    pub fn new(pred: &SelmerPrediction, ledger: &HypothesisLedger) -> Self {
        PredictionSection {
            status: pred.status,
            corank: pred.corank,
            torsion: pred.torsion.iter().map(|t| (t.p, t.exponent, t.multiplicity)).collect(),
            sha: pred.sha.clone(),
            fitting: pred.fitting.clone(),
            length: pred.length,
            hypotheses: ledger.failures(),
            flags: pred.flags.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub curve: CurveSection,
    pub hypotheses: HypothesisLedger,
    pub modsym: ModsymSection,
    pub delta_one: KuriharaNumber,
    pub sieve: SieveSection,
    pub scan: DeltaCollection,
    /// Absent when the parity audit failed.
    pub prediction: Option<PredictionSection>,
    pub rank_bound: Option<usize>,
    pub parity: ParityCheck,
    pub tamagawa: TamagawaReport,
    pub semilocal: SemilocalReport,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// A short plain-text account in the order: curve, delta_1, sieve,
    /// vanishing order, Tamagawa numbers, Selmer structure, semilocal
    /// isomorphism.
    pub fn summary(&self) -> String {
        let p = self.config.p;
        let mut out = String::new();
        let c = &self.curve;
        let coeffs = format!("[{}]", c.ainvs.join(","));
        if c.label == coeffs {
            let _ = writeln!(out, "{coeffs}  N = {}  p = {p}", c.conductor);
        } else {
            let _ = writeln!(out, "{} {coeffs}  N = {}  p = {p}", c.label, c.conductor);
        }
        let _ = writeln!(out, "  root number w = {:+}", self.modsym.root_number);
        let d1 = &self.delta_one;
        let _ = writeln!(
            out,
            "  delta_1 = {} ({}), v_{p} = {}",
            value_text(d1, p),
            serde_json::to_value(d1.normalization).expect("serializable").as_str().unwrap_or(""),
            d1.valuation
        );
        let ells: Vec<String> = self.sieve.primes.iter().map(|l| l.ell.to_string()).collect();
        let _ = writeln!(
            out,
            "  Kolyvagin primes (k = {}, l <= {}): {}",
            self.sieve.k,
            self.sieve.bound,
            if ells.is_empty() { "none".to_string() } else { ells.join(" ") }
        );
        for rec in &self.scan.partials {
            let tag = match rec.parity {
                Parity::Matching => "",
                Parity::Opposite => " (audit)",
            };
            let _ = writeln!(
                out,
                "  nu = {}{tag}: {} computed, min valuation {}{}",
                rec.nu,
                rec.computed,
                rec.min_valuation,
                if rec.saturated { ", saturated" } else { "" }
            );
        }
        match self.scan.ord_witness() {
            Some(w) => {
                let _ = writeln!(
                    out,
                    "  ord = {} with witness n = {} (delta_n = {}, valuation {})",
                    w.nu(),
                    factor_text(&w.factors),
                    value_text(w, p),
                    w.valuation
                );
            }
            None => {
                let _ = writeln!(out, "  no nonvanishing Kurihara number for nu <= {}", self.config.nu_max);
            }
        }
        let _ = writeln!(out, "  parity audit: {:?}, parity vs root number: {:?}", self.scan.parity_audit, self.parity);
        let t = &self.tamagawa;
        let _ = writeln!(
            out,
            "  Tamagawa: sum v_{p}(c_l) = {}, least observed valuation {} ({:?})",
            t.tamagawa_valuation, t.observed_min, t.status
        );
        match &self.prediction {
            Some(pred) => {
                if let Some(r) = pred.corank {
                    let _ = writeln!(out, "  corank Sel(Q, E[{p}^inf]) = {r}");
                }
                match &pred.sha {
                    Some(sha) if sha.factors.is_empty() => {
                        let _ = writeln!(out, "  Sha[{p}^inf] = 0 ({})", sha.conditional_on);
                    }
                    Some(sha) => {
                        let parts: Vec<String> = sha
                            .factors
                            .iter()
                            .map(|f| format!("(Z/{})^{}", p.pow(f.exponent), f.multiplicity))
                            .collect();
                        let _ = writeln!(out, "  Sha[{p}^inf] = {} ({})", parts.join(" + "), sha.conditional_on);
                    }
                    None => {
                        let _ = writeln!(out, "  Sha[{p}^inf]: no prediction ({:?})", pred.status);
                    }
                }
                for f in &pred.flags {
                    let _ = writeln!(out, "  flag: {f}");
                }
            }
            None => {
                let _ = writeln!(out, "  no structural prediction: parity audit failed");
            }
        }
        let s = &self.semilocal;
        match (s.status, s.witness) {
            (SemilocalStatus::Applicable, Some(n)) => {
                let _ = writeln!(out, "  n = {n}: Sel(Q, E[{p}]) = {}", s.describe().replace("/p", &format!("/{p}")));
                if let (Some(dim), Some(r)) = (s.selmer_dimension, s.rank_if_sha_trivial) {
                    let _ = writeln!(out, "  dim Sel(Q, E[{p}]) = {dim}; rank = {r} if Sha[{p}] = 0");
                }
            }
            (SemilocalStatus::NotApplicable, Some(n)) => {
                let _ = writeln!(
                    out,
                    "  n = {n}: Sel(Q, E[{p}]) = {} would follow, but the isomorphism is not applicable: {}",
                    s.describe().replace("/p", &format!("/{p}")),
                    s.reasons.join("; ")
                );
            }
            _ => {
                let _ = writeln!(out, "  semilocal isomorphism not applicable: {}", s.reasons.join("; "));
            }
        }
        for h in self.hypotheses.failures() {
            let _ = writeln!(out, "  unverified: {h}");
        }
        out
    }
}

pub(crate) fn factor_text(factors: &[u64]) -> String {
    if factors.is_empty() {
        return "1".into();
    }
    factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("*")
}

pub(crate) fn value_text(kn: &KuriharaNumber, p: u64) -> String {
    match &kn.value {
        DeltaValue::Exact(r) => r.to_string(),
        DeltaValue::Residue(v) => match kn.k_used {
            Some(k) => format!("{v} mod {p}^{k}"),
            None => v.to_string(),
        },
    }
}
