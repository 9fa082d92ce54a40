//! The three identity families.
//!
//! Each submodule holds one family's parameter set, lattice weights,
//! regularizers, dual companions and closed-form product sides:
//! [`mg`] the Milne-Gustafson bilateral sums, [`da`] the bilateral
//! q-Dixon-Anderson (Evans) sums, [`gus`] Gustafson's A_n sums under the
//! balance constraint.

pub mod da;
pub mod gus;
pub mod mg;

use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::LatticeError;
use crate::qcore::QContext;
use crate::scaled::Scaled;

/// Ceiling on precomputed table half-width; beyond this the lattice engine
/// reports NotConverged rather than growing further.
pub const TABLE_CAP: i64 = 8192;

/// Minimum distance of convergence-condition gaps accepted by the parameter
/// validators.
pub const MIN_MARGIN: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("non-finite closed-form value ({0})")]
    NonFinite(&'static str),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Weight variants shared by the families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightVariant {
    /// The defining weight of the bilateral sum.
    Primal,
    /// The companion weight with inverted parameter roles.
    Dual,
}

/// Vandermonde product over scaled coordinate values,
/// `prod_{i<j} (z_j - z_i)`.
pub(crate) fn vandermonde(zs: &[Scaled]) -> Scaled {
    let mut r = Scaled::ONE;
    for i in 0..zs.len() {
        for j in (i + 1)..zs.len() {
            r = r.mul(zs[j].sub(zs[i]));
        }
    }
    r
}

/// Sign relating the reversed Vandermonde to the plain one:
/// `prod_{i<j} (z_i - z_j) = sign(n) * prod_{i<j} (z_j - z_i)`.
pub(crate) fn reversal_sign(n: usize) -> f64 {
    if (n * (n - 1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Finalize a scaled closed-form evaluation, rejecting poles.
pub(crate) fn finish(v: Scaled, what: &'static str) -> Result<Complex64, FamilyError> {
    let c = v.to_complex();
    if !c.re.is_finite() || !c.im.is_finite() {
        return Err(FamilyError::NonFinite(what));
    }
    Ok(c)
}


/// Shared convergence-gap check: `gap >= MIN_MARGIN`, with a description in
/// the error.
pub(crate) fn require_margin(gap: f64, what: &str) -> Result<(), FamilyError> {
    if gap >= MIN_MARGIN {
        Ok(())
    } else {
        Err(FamilyError::InvalidParams(format!(
            "{what} violated: gap {gap:.4} must be positive"
        )))
    }
}

/// Largest cutoff worth building tables for under the current budget.
pub(crate) fn capacity(n: usize, bilateral: bool, ctx: &QContext) -> i64 {
    let spec = if bilateral {
        crate::lattice::SumSpec::boxed(n, 1)
    } else {
        crate::lattice::SumSpec::fan(n, 1)
    };
    spec.max_allowed_cutoff(ctx).min(TABLE_CAP)
}

