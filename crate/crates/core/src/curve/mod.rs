//! Elliptic curves over Q: Weierstrass models, local data from Tate's
//! algorithm, traces of Frobenius, real periods and central L-values.

mod analytic;
mod context;
mod hypotheses;
mod model;
mod points;
mod real;
mod tate;

pub use analytic::{
    fricke_sign_numeric, fricke_terms, is_fundamental_discriminant, l_value, real_period,
    terms_needed, twisted_l_value,
};
pub use context::{read_ap_cache, write_ap_cache, CurveContext, AP_CACHE_MAGIC, AP_CACHE_VERSION};
pub use hypotheses::{
    anomalous_split_depth,
    local_torsion, manin_constant_ok, rho_surjectivity_probable, LocalTorsionReport, ManinStatus,
    SurjectivityVerdict, TorsionStatus,
};
pub use model::{mod_u64, parse_ainvs, CurveRecord, WeierstrassModel};
pub use points::{
    ap_character_sum, ap_exhaustive, ap_good, count_affine_exhaustive, sqrt_mod, sylow_samples,
    sylow_structure, Point, ReducedCurve,
};
pub use real::{recognize_rational, Real};
pub use tate::{tate_local_data, KodairaType, LocalData, ReductionType};
