//! Plus-part modular symbols for `Gamma_0(N)`: the Manin-symbol
//! presentation, Hecke operators, the eigenline of a curve and exact
//! evaluation of `[a/m]^+`.

mod cusps;
mod eigen;
mod heilbronn;
mod io;
mod linalg;
mod p1;
mod space;
mod symbol;

pub use cusps::{cusp_class, cusp_count, genus, plus_cusp_class, CuspClass};
pub use heilbronn::{heilbronn_cremona, Matrix2};
pub use linalg::{word_primes, DenseMatrix, SparseEchelon, SparseVec};
pub use p1::{p1_size, P1Element, P1List};
pub use space::{lift_to_sl2, GenRef, Presentation, SymbolSpace, DEFAULT_PRIME};
pub use eigen::{extract_eigenline, Eigenline, MAX_CUTS};
pub use symbol::{fricke_sign, manin_path, pin_scale, EigenSymbol, NormalizeOptions, Pinning, ResidueTable, MAX_PIN_TWIST};
pub use io::{eigensymbol_from_json, eigensymbol_to_json, export_eigensymbol, import_eigensymbol, EIGEN_FILE_VERSION};
