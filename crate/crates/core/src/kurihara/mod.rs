//! Kurihara numbers `delta_n`, their Mazur-Tate cross-check and scans of
//! their valuations over squarefree moduli.

mod delta;
mod scan;

pub use delta::{
    default_k_used, functional_sign_check, unit_invariance_audit, DeltaEvaluator, DeltaValuation, DeltaValue,
    KuriharaNumber, MazurTateTruncation, Normalization, SignCheck,
};
pub use scan::{scan, AuditEntry, AuditStatus, DeltaCollection, Parity, PartialRecord, ScanConfig};
