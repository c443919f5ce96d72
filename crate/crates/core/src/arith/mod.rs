//! Integer arithmetic used throughout: primes, residues, discrete logarithms,
//! p-adic valuations and rational reconstruction.

mod modular;
mod primes;
mod rational;

pub use modular::{
    discrete_log, inv_mod, is_primitive_root, kronecker, mul_mod, pow_mod, primitive_root, xgcd,
    LogTable, Residue,
};
pub use primes::{
    factorize, factorize_big, is_prime, is_probable_prime_big, next_prime, primes_up_to, totient,
};
pub use rational::{
    balanced_bound, crt_pair, rational_reconstruct, reconstruct_residue, valuation, valuation_int,
    Valuation,
};
