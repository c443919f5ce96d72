//! Structural predictions for the p-primary Selmer group read off the
//! valuations of Kurihara numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::{
    local_torsion, manin_constant_ok, rho_surjectivity_probable, sylow_samples, sylow_structure, CurveContext,
    LocalTorsionReport, ManinStatus, SurjectivityVerdict, TorsionStatus,
};
use crate::error::{Error, Result};
use crate::kurihara::{AuditStatus, DeltaCollection, DeltaValuation, KuriharaNumber};

/// Frobenius samples used by the surjectivity test.
pub const SURJECTIVITY_SAMPLES: usize = 200;

/// Claims supplied by the user in place of a check the program cannot make.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Assertions {
    pub manin_ok: bool,
    pub rho_surjective: bool,
}

/// The hypotheses under which the predictions are theorems.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisLedger {
    pub p: u64,
    pub surjectivity: SurjectivityVerdict,
    pub surjectivity_asserted: bool,
    pub manin: ManinStatus,
    pub manin_asserted: bool,
    pub local_torsion: LocalTorsionReport,
    /// `sum_l v_p(c_l)`.
    pub tamagawa_valuation: u32,
}

impl HypothesisLedger {
    pub fn gather(ctx: &CurveContext, p: u64, assertions: Assertions) -> Result<Self> {
        Ok(HypothesisLedger {
            p,
            surjectivity: rho_surjectivity_probable(ctx, p, SURJECTIVITY_SAMPLES),
            surjectivity_asserted: assertions.rho_surjective,
            manin: manin_constant_ok(ctx, p),
            manin_asserted: assertions.manin_ok,
            local_torsion: local_torsion(ctx, p)?,
            tamagawa_valuation: tamagawa_valuation(ctx, p),
        })
    }

    pub fn surjective(&self) -> bool {
        self.surjectivity == SurjectivityVerdict::Surjective || self.surjectivity_asserted
    }

    pub fn manin_ok(&self) -> bool {
        self.manin == ManinStatus::Yes || self.manin_asserted
    }

    /// Hypotheses of the Selmer structure prediction that are neither
    /// verified nor asserted.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.surjective() {
            out.push(format!("mod-{} representation not shown surjective ({:?})", self.p, self.surjectivity));
        }
        if !self.manin_ok() {
            out.push("Manin constant not known to be prime to p".into());
        }
        out
    }

    /// The structure hypotheses plus those of the semilocal isomorphism:
    /// `E(Q_p)[p] = 0` and Tamagawa numbers prime to `p`.
    pub fn semilocal_failures(&self) -> Vec<String> {
        let mut out = self.failures();
        match self.local_torsion.status {
            TorsionStatus::Trivial => {}
            TorsionStatus::NonTrivial => out.push(format!("E(Q_p)[p] is nontrivial: {}", self.local_torsion.reason)),
            TorsionStatus::Indeterminate => {
                out.push(format!("E(Q_p)[p] not known to vanish: {}", self.local_torsion.reason))
            }
        }
        if self.tamagawa_valuation > 0 {
            out.push(format!("some Tamagawa number is divisible by {}", self.p));
        }
        out
    }
}

/// `sum_{l | N} v_p(c_l)`.
pub fn tamagawa_valuation(ctx: &CurveContext, p: u64) -> u32 {
    ctx.bad_primes()
        .iter()
        .map(|d| {
            let (mut c, mut v) = (d.tamagawa, 0);
            while c > 0 && c % p == 0 {
                c /= p;
                v += 1;
            }
            v
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionStatus {
    /// A corank and a square torsion structure were derived.
    Complete,
    /// A corank was found but the torsion could not be pinned down.
    Unsaturated,
    /// No nonvanishing Kurihara number was found.
    NoWitness,
}

/// `Z/p^e` appearing twice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TorsionFactor {
    pub p: u64,
    pub exponent: u32,
    pub multiplicity: u32,
}

/// Predicted Sha under the finiteness hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShaPrediction {
    pub factors: Vec<TorsionFactor>,
    /// `log_p` of the order.
    pub order_exponent: u32,
    pub conditional_on: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelmerPrediction {
    pub p: u64,
    pub status: PredictionStatus,
    pub corank: Option<usize>,
    pub torsion: Vec<TorsionFactor>,
    pub sha: Option<ShaPrediction>,
    /// `(i, e)` with `Fitt_i = p^e Z_p`; `None` stands for the zero ideal.
    pub fitting: Vec<(usize, Option<u32>)>,
    /// Length of the Selmer group modulo its divisible part.
    pub length: Option<u32>,
    pub flags: Vec<String>,
}

impl SelmerPrediction {
    pub fn sha_is_trivial(&self) -> bool {
        self.sha.as_ref().is_some_and(|s| s.factors.is_empty())
    }

    /// The torsion as `(Z/p^e)^m` strings.
    pub fn describe_torsion(&self) -> String {
        if self.torsion.is_empty() {
            return "0".into();
        }
        self.torsion
            .iter()
            .map(|t| format!("(Z/{})^{}", t.p.pow(t.exponent), t.multiplicity))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Derives corank, torsion and Fitting exponents from the indices of the
/// same parity as the vanishing order.
pub fn predict_structure(dc: &DeltaCollection) -> Result<SelmerPrediction> {
    if dc.parity_audit == AuditStatus::Fail {
        return Err(Error::Invariant("parity audit failed; refusing to predict".into()));
    }
    let mut flags = Vec::new();
    let Some(r) = dc.ord_estimate else {
        flags.push(format!("no nonvanishing witness for nu <= {}", dc.partials.len().saturating_sub(1)));
        return Ok(SelmerPrediction {
            p: dc.p,
            status: PredictionStatus::NoWitness,
            corank: None,
            torsion: Vec::new(),
            sha: None,
            fitting: Vec::new(),
            length: None,
            flags,
        });
    };
    let floor = dc.min_valuation_all.exact().expect("a witness exists");
    let chain: Vec<(usize, DeltaValuation)> = dc
        .partials
        .iter()
        .filter(|rec| rec.nu >= r && (rec.nu - r) % 2 == 0 && rec.computed > 0)
        .map(|rec| (rec.nu, rec.min_valuation))
        .collect();

    // The chain of minima must fall in even steps to a value that is either
    // 0 or repeated at a deeper index.
    let mut status = PredictionStatus::Complete;
    let mut exponents = Vec::new();
    let mut prev = chain[0].1.exact().expect("ord index has a witness");
    let mut stabilized = false;
    for &(nu, v) in &chain[1..] {
        match v {
            DeltaValuation::Exact(cur) if cur <= prev => {
                let diff = prev - cur;
                if diff % 2 == 1 {
                    flags.push(format!("odd drop {prev} -> {cur} at nu = {nu}"));
                    status = PredictionStatus::Unsaturated;
                    break;
                }
                if diff == 0 {
                    stabilized = true;
                } else {
                    exponents.push(diff / 2);
                }
                prev = cur;
            }
            DeltaValuation::Exact(cur) => {
                flags.push(format!("minimum rises from {prev} to {cur} at nu = {nu}"));
                status = PredictionStatus::Unsaturated;
                break;
            }
            _ if prev == 0 => {}
            _ => {
                flags.push(format!("no witness at nu = {nu}"));
                status = PredictionStatus::Unsaturated;
                break;
            }
        }
    }
    if status == PredictionStatus::Complete && prev != 0 && !stabilized {
        flags.push(format!("minimum {prev} not confirmed at a deeper index"));
        status = PredictionStatus::Unsaturated;
    }
    for rec in &dc.partials {
        if rec.parity == crate::kurihara::Parity::Matching && rec.nu >= r && rec.computed > 0 && !rec.saturated {
            flags.push(format!("nu = {} unsaturated", rec.nu));
        }
    }
    if dc.precision_limited {
        flags.push("precision-limited".into());
    }

    let mut torsion: Vec<TorsionFactor> = exponents
        .iter()
        .filter(|&&e| e > 0)
        .map(|&e| TorsionFactor { p: dc.p, exponent: e, multiplicity: 2 })
        .collect();
    torsion.sort_by_key(|t| std::cmp::Reverse(t.exponent));
    let complete = status == PredictionStatus::Complete;
    let sha = complete.then(|| ShaPrediction {
        order_exponent: torsion.iter().map(|t| t.exponent * t.multiplicity).sum(),
        factors: torsion.clone(),
        conditional_on: "finiteness of Sha[p^inf]",
    });

    let mut fitting = Vec::new();
    for rec in &dc.partials {
        if rec.nu < r {
            fitting.push((rec.nu, None));
        } else if (rec.nu - r) % 2 == 0 {
            if let Some(v) = rec.min_valuation.exact() {
                fitting.push((rec.nu, Some(v - floor)));
            }
        }
    }
    let length = chain[0].1.exact().map(|v| v - floor);
    Ok(SelmerPrediction {
        p: dc.p,
        status,
        corank: Some(r),
        torsion: if complete { torsion } else { Vec::new() },
        sha,
        fitting,
        length,
        flags,
    })
}

/// `rank E(Q) <= nu(n)` for a nonvanishing witness.
pub fn rank_upper_bound(witness: &KuriharaNumber) -> Option<usize> {
    witness.is_nonzero().then(|| witness.nu())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityCheck {
    Consistent,
    Inconsistent,
    Undetermined,
}

/// `(-1)^ord = w`.
pub fn parity_check(dc: &DeltaCollection, w: i8) -> ParityCheck {
    match dc.ord_estimate {
        None => ParityCheck::Undetermined,
        Some(r) if (if r % 2 == 0 { 1 } else { -1 }) == w => ParityCheck::Consistent,
        Some(_) => ParityCheck::Inconsistent,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TamagawaStatus {
    Match,
    UpperBoundOnly,
    Mismatch,
}

#[derive(Debug, Clone, Serialize)]
pub struct TamagawaReport {
    pub tamagawa_valuation: u32,
    pub observed_min: DeltaValuation,
    pub status: TamagawaStatus,
}

/// Compares the least observed valuation with `sum v_p(c_l)`.
pub fn tamagawa_conjecture_check(dc: &DeltaCollection, ctx: &CurveContext) -> TamagawaReport {
    let sum = tamagawa_valuation(ctx, dc.p);
    let status = match dc.min_valuation_all.exact() {
        Some(v) if v == sum => TamagawaStatus::Match,
        Some(v) if v < sum => TamagawaStatus::Mismatch,
        _ => TamagawaStatus::UpperBoundOnly,
    };
    TamagawaReport { tamagawa_valuation: sum, observed_min: dc.min_valuation_all, status }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SemilocalStatus {
    Applicable,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemilocalFactor {
    pub ell: u64,
    /// `E(F_l)[p^inf] = Z/p^a x Z/p^b`.
    pub sylow: (u32, u32),
    /// `dim_{F_p} E(F_l) / p`.
    pub dimension: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemilocalReport {
    pub status: SemilocalStatus,
    pub witness: Option<u64>,
    pub factors: Vec<SemilocalFactor>,
    /// `dim Sel(Q, E[p])` under the isomorphism.
    pub selmer_dimension: Option<u32>,
    /// `rank E(Q) = nu(n)` when `Sha[p] = 0`.
    pub rank_if_sha_trivial: Option<usize>,
    pub reasons: Vec<String>,
}

impl SemilocalReport {
    /// `Sel(Q, E[p]) = E(F_l1)/p + ...`.
    pub fn describe(&self) -> String {
        if self.factors.is_empty() {
            return "n/a".into();
        }
        self.factors
            .iter()
            .map(|f| format!("E(F_{})/p", f.ell))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The isomorphism `Sel(Q, E[p]) = sum_{l | n} E(F_l) / p` at a mod-p
/// witness `n` of the least `nu`.
pub fn semilocal_report(
    dc: &DeltaCollection,
    ctx: &CurveContext,
    hypotheses: &HypothesisLedger,
    seed: u64,
) -> Result<SemilocalReport> {
    let p = dc.p;
    let mut reasons = hypotheses.semilocal_failures();
    let unit = |e: &KuriharaNumber| e.valuation == DeltaValuation::Exact(0);
    let witness = dc
        .entries
        .iter()
        .filter(|e| unit(e))
        .min_by_key(|e| e.nu())
        .cloned();
    let Some(witness) = witness else {
        reasons.push("no Kurihara number is a unit".into());
        return Ok(SemilocalReport {
            status: SemilocalStatus::NotApplicable,
            witness: None,
            factors: Vec::new(),
            selmer_dimension: None,
            rank_if_sha_trivial: None,
            reasons,
        });
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for &ell in &witness.factors {
        let sylow = sylow_structure(ctx.model(), ell, p, sylow_samples(p), &mut rng)?;
        let dimension = (sylow.0 > 0) as u32 + (sylow.1 > 0) as u32;
        factors.push(SemilocalFactor { ell, sylow, dimension });
    }
    let status = if reasons.is_empty() { SemilocalStatus::Applicable } else { SemilocalStatus::NotApplicable };
    Ok(SemilocalReport {
        status,
        witness: Some(witness.n),
        selmer_dimension: Some(factors.iter().map(|f| f.dimension).sum()),
        rank_if_sha_trivial: Some(witness.nu()),
        factors,
        reasons,
    })
}
