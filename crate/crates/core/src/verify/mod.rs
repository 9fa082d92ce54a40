//! The checking engine.
//!
//! Every claim the library implements -- product evaluations, contiguous
//! relations, vanishing integrals of difference-operator images, polynomial
//! expansion lemmas, asymptotic leading terms, structural symmetries -- has
//! a corresponding check that draws random admissible parameters from a
//! seeded generator, evaluates both sides, and assembles a [`CheckReport`].
//! Checks are pure functions of `(check id, seed, context)`, so reports are
//! reproducible bit for bit.

mod catalog;
mod checks;
mod permutation;
pub mod sample;

pub use catalog::{catalog, check_identity, find_check, CheckDef, Suite};
pub use permutation::{nabla, nabla_pair, permutations_with_sign, skew_symmetrize, Permutation};

use num_complex::Complex64;
use thiserror::Error;

use crate::families::FamilyError;
use crate::lattice::LatticeError;
use crate::qcore::QContext;

/// One verified identity: both sides, the deviation, and enough context to
/// re-run the check exactly.
#[derive(Clone, Debug)]
pub struct CheckReport {
    /// Stable identifier, e.g. `mg.theorem31.n2`.
    pub check_id: String,
    /// Which classical result the check exercises.
    pub paper_anchor: String,
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `|lhs - rhs| / max(1, |rhs|)`.
    pub rel_dev: f64,
    pub tol: f64,
    /// `rel_dev <= tol` (ties pass).
    pub passed: bool,
    pub seed: u64,
    /// Canonical parameter echo; re-running with these values reproduces the
    /// numbers exactly.
    pub params_echo: String,
    /// Lattice points evaluated across all sums of the check.
    pub terms: u64,
    pub elapsed_ms: u64,
}

pub fn rel_dev(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("{check_id}: not converged: {detail}")]
    NotConverged { check_id: String, detail: String },
    #[error("{check_id}: non-finite evaluation: {detail}")]
    NonFinite { check_id: String, detail: String },
    #[error("dimension {0} too large for skew-symmetrization (limit 6)")]
    DimensionTooLarge(usize),
    #[error("invalid check request: {0}")]
    Invalid(String),
}

/// Inputs shared by every check runner.
pub struct CheckInput<'a> {
    pub check_id: String,
    pub n: usize,
    pub ctx: &'a QContext,
    pub seed: u64,
    pub tol: f64,
}

impl CheckInput<'_> {
    /// Context for lattice sums inside the check: the tail gate sits one
    /// decade below the check tolerance so truncation never dominates.
    pub fn sum_ctx(&self) -> QContext {
        let target = (self.tol / 10.0)
            .max(self.ctx.product_tol * 10.0)
            .min(self.ctx.identity_tol);
        self.ctx.with_identity_tol(target).unwrap_or(*self.ctx)
    }

    pub fn wrap_family(&self, e: FamilyError) -> CheckError {
        match e {
            FamilyError::Lattice(LatticeError::NotConverged { tail, gate, cutoff, terms }) => {
                CheckError::NotConverged {
                    check_id: self.check_id.clone(),
                    detail: format!(
                        "tail {tail:.3e} above gate {gate:.3e} at cutoff {cutoff} after {terms} terms"
                    ),
                }
            }
            FamilyError::Lattice(LatticeError::NonFinite(p)) => CheckError::NonFinite {
                check_id: self.check_id.clone(),
                detail: format!("lattice point {p:?}"),
            },
            FamilyError::Lattice(LatticeError::InvalidSpec(s)) => {
                CheckError::Invalid(format!("{}: {s}", self.check_id))
            }
            FamilyError::NonFinite(what) => CheckError::NonFinite {
                check_id: self.check_id.clone(),
                detail: what.to_string(),
            },
            FamilyError::InvalidParams(s) => CheckError::Invalid(format!("{}: {s}", self.check_id)),
        }
    }

    pub fn report(
        &self,
        anchor: &str,
        lhs: Complex64,
        rhs: Complex64,
        dev: f64,
        params_echo: String,
        terms: u64,
        started: std::time::Instant,
    ) -> CheckReport {
        CheckReport {
            check_id: self.check_id.clone(),
            paper_anchor: anchor.to_string(),
            lhs,
            rhs,
            rel_dev: dev,
            tol: self.tol,
            passed: dev <= self.tol,
            seed: self.seed,
            params_echo,
            terms,
            elapsed_ms: started.elapsed().as_millis() as u64,
        }
    }
}

/// Canonical text form of a complex number for parameter echoes.
pub(crate) fn echo_c(v: Complex64) -> String {
    format!("{:.16e}{:+.16e}i", v.re, v.im)
}

pub(crate) fn echo_vec(vs: &[Complex64]) -> String {
    let parts: Vec<String> = vs.iter().map(|&v| echo_c(v)).collect();
    format!("[{}]", parts.join(","))
}
