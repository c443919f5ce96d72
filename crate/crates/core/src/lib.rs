//! Kurihara numbers for elliptic curves over the rationals.
//!
//! The pipeline runs from a Weierstrass model to a predicted structure of the
//! p-primary Selmer group:
//!
//! 1. [`curve`] derives local data, traces of Frobenius and real periods.
//! 2. [`modsym`] builds the plus quotient of weight-2 modular symbols for
//!    `Gamma_0(N)`, cuts out the curve's eigenline and normalizes it.
//! 3. [`kolyvagin`] sieves the primes `l` with `p^k | l - 1` and
//!    `p^k | a_l - l - 1`, and enumerates their squarefree products.
//! 4. [`kurihara`] evaluates the twisted sums `delta_n` and scans the
//!    vanishing orders.
//! 5. [`selmer`] turns the observed valuations into a corank, a torsion
//!    structure and Fitting ideals.
//!
//! [`cli`] glues these into the `kurihara` binary and its JSON reports.

pub mod arith;
pub mod cli;
pub mod curve;
pub mod error;
pub mod kolyvagin;
pub mod kurihara;
pub mod modsym;
pub mod selmer;

pub use error::{Error, Result};
