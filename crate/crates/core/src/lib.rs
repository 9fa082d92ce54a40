//! Numerics for multi-dimensional bilateral q-series.
//!
//! This crate evaluates three families of multi-index Jackson integrals --
//! Milne-Gustafson sums, bilateral q-Dixon-Anderson (Evans) sums, and
//! Gustafson A_n sums -- together with their truncations, regularizations,
//! dual companions and closed-form product evaluations, and provides a
//! checking engine that verifies every identity numerically at randomized
//! parameter points.
//!
//! Layout:
//! - [`qcore`]: scalar kernels (q-powers, q-Pochhammer symbols, theta
//!   function) with controlled truncation error, plus the exponent-based
//!   variants used everywhere internally.
//! - [`scaled`]: complex numbers with a separate binary exponent, so weight
//!   products spanning thousands of orders of magnitude never overflow.
//! - [`lattice`]: the multi-index summation engine (fan sums over N^n and
//!   bilateral box sums over Z^n) with compensated deterministic reduction.
//! - [`families`]: weight functions, Vandermonde factors, regularizers and
//!   closed-form right-hand sides of the three families.
//! - [`verify`]: identity checks, recurrence checks, polynomial expansion
//!   lemmas, asymptotic leading-term checks, and report assembly.

pub mod families;
pub mod lattice;
pub mod qcore;
pub mod scaled;
pub mod verify;

pub use num_complex::Complex64;
pub use qcore::{ExponentPoint, QContext};
pub use scaled::Scaled;
