//! Verification and search toolkit for the exponential Diophantine equations
//! `p·x² + q^(2n) = y^p` and `5x² − 4 = yⁿ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: exact substrate: quadratic-order integers, dense integer and
//!   rational polynomials (with exact resultants), primality/factorisation and
//!   certified interval reals.
//! * [`solutions`]: the parametrisation of solutions for general `p`, the prime
//!   family `q = 2000v⁴ − 200v² + 1`, congruence constraints on `(q, n)`,
//!   witnesses, Pell/Lucas facts and bounded oracles for cited results.
//! * [`split_poly`]: the factorisation `f = f₁·f₂` for `p ≡ 3 (mod 8)` and
//!   every identity the no-solution argument relies on.
//! * [`thue`]: the binary forms `T_k(u, v)`, local solvability sieves,
//!   monicisation, bounded enumeration and export.
//! * [`linf`]: the linear form `Λ`, the explicit two-logarithm inequality and
//!   the reduction table replay.
//! * [`cf_sieve`]: the continued-fraction elimination of small `y`, with a
//!   parallel, checkpointed range driver.
//! * [`hypergeom`]: hypergeometric polynomials, the gap principle and the
//!   uniqueness decision for `5x² = qⁿ + 4`.
//! * [`pipeline`]: the end-to-end decision for a prime `q` and the scripted
//!   reproductions used by the acceptance suite.

pub mod arith;
pub mod bigjson;
pub mod cf_sieve;
mod error;
pub mod hypergeom;
pub mod linf;
pub mod pipeline;
pub mod solutions;
pub mod split_poly;
pub mod thue;

pub use arith::poly::{IntPoly, RatPoly};
pub use arith::quad::QuadInt;
pub use arith::real::RealApprox;
pub use error::{Error, Result};

/// Default working precision (decimal digits) for logarithms and certified
/// comparisons.
pub const DEFAULT_DIGITS: u32 = 50;
