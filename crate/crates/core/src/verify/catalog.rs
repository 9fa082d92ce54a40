//! The table of all checks: identifiers, suites, supported dimensions,
//! default trial counts and tolerances, and the dispatch entry point.

use super::checks::{asym, core_kernels, da_checks, gus_checks, lemmas, mg_checks};
use super::{CheckError, CheckInput, CheckReport};
use crate::qcore::QContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Core,
    Mg,
    Da,
    Gus,
    Lemmas,
    Asymptotics,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Vec<Suite>> {
        match s {
            "core" => Some(vec![Suite::Core]),
            "mg" => Some(vec![Suite::Mg]),
            "da" => Some(vec![Suite::Da]),
            "gus" => Some(vec![Suite::Gus]),
            "lemmas" => Some(vec![Suite::Lemmas]),
            "asymptotics" => Some(vec![Suite::Asymptotics]),
            "all" => Some(vec![
                Suite::Core,
                Suite::Mg,
                Suite::Da,
                Suite::Gus,
                Suite::Lemmas,
                Suite::Asymptotics,
            ]),
            _ => None,
        }
    }
}

type Runner = fn(&CheckInput) -> Result<CheckReport, CheckError>;

pub struct CheckDef {
    pub id: &'static str,
    pub suite: Suite,
    /// Supported dimensions; empty means dimension-independent (the id
    /// carries no `.nK` suffix).
    pub dims: &'static [usize],
    pub default_trials: u32,
    pub default_tol: fn(usize) -> f64,
    pub run: Runner,
}

fn tol_identity(n: usize) -> f64 {
    if n >= 3 {
        1e-6
    } else {
        1e-8
    }
}

fn tol_recurrence(_n: usize) -> f64 {
    1e-9
}

fn tol_exact(_n: usize) -> f64 {
    1e-12
}

fn tol_oracle(_n: usize) -> f64 {
    1e-10
}

fn tol_functional(_n: usize) -> f64 {
    1e-13
}

fn tol_zeros(_n: usize) -> f64 {
    1e-10
}

fn tol_asym(_n: usize) -> f64 {
    1e-3
}

/// Vanishing checks compare a compensated near-cancellation against the
/// magnitude sum; the bound reflects the cancellation conditioning rather
/// than identity truncation.
fn tol_vanishing(_n: usize) -> f64 {
    1e-10
}

static CATALOG: &[CheckDef] = &[
    // scalar kernels
    CheckDef { id: "core.q_power_consistency", suite: Suite::Core, dims: &[], default_trials: 1, default_tol: tol_exact, run: core_kernels::q_power_consistency },
    CheckDef { id: "core.qpoch_shift", suite: Suite::Core, dims: &[], default_trials: 1, default_tol: tol_exact, run: core_kernels::qpoch_shift },
    CheckDef { id: "core.qpoch_functional", suite: Suite::Core, dims: &[], default_trials: 1, default_tol: tol_functional, run: core_kernels::qpoch_functional },
    CheckDef { id: "core.theta_quasi_period", suite: Suite::Core, dims: &[], default_trials: 1, default_tol: tol_exact, run: core_kernels::theta_quasi_period },
    CheckDef { id: "core.theta_inversion", suite: Suite::Core, dims: &[], default_trials: 1, default_tol: tol_exact, run: core_kernels::theta_inversion },
    CheckDef { id: "core.theta_zeros", suite: Suite::Core, dims: &[], default_trials: 1, default_tol: tol_zeros, run: core_kernels::theta_zeros },
    // Milne-Gustafson family
    CheckDef { id: "mg.theorem31", suite: Suite::Mg, dims: &[1, 2, 3], default_trials: 10, default_tol: tol_identity, run: mg_checks::theorem31 },
    CheckDef { id: "mg.truncated", suite: Suite::Mg, dims: &[1, 2, 3], default_trials: 10, default_tol: tol_identity, run: mg_checks::truncated },
    CheckDef { id: "mg.dual_truncated", suite: Suite::Mg, dims: &[1, 2, 3], default_trials: 10, default_tol: tol_identity, run: mg_checks::dual_truncated },
    CheckDef { id: "mg.qbinomial_oracle", suite: Suite::Mg, dims: &[1], default_trials: 10, default_tol: tol_oracle, run: mg_checks::qbinomial_oracle },
    CheckDef { id: "mg.connection_xa", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: mg_checks::connection_xa },
    CheckDef { id: "mg.connection_xb", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: mg_checks::connection_xb },
    CheckDef { id: "mg.connection_xy", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: mg_checks::connection_xy },
    CheckDef { id: "mg.macdonald_const", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: mg_checks::macdonald_const },
    CheckDef { id: "mg.reflective", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: mg_checks::reflective },
    CheckDef { id: "mg.constant_c", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: mg_checks::constant_c },
    CheckDef { id: "mg.recurrence_alpha", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: mg_checks::recurrence_alpha },
    CheckDef { id: "mg.recurrence_dual_alpha", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: mg_checks::recurrence_dual_alpha },
    CheckDef { id: "mg.skew_symmetry", suite: Suite::Mg, dims: &[2, 3], default_trials: 5, default_tol: tol_identity, run: mg_checks::skew_symmetry },
    CheckDef { id: "mg.qshift_invariance", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: mg_checks::qshift_invariance },
    CheckDef { id: "mg.fan_box_truncation", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: mg_checks::fan_box_truncation },
    CheckDef { id: "mg.duality_involution", suite: Suite::Mg, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: mg_checks::duality_involution },
    // Dixon-Anderson family
    CheckDef { id: "da.theorem41", suite: Suite::Da, dims: &[1, 2], default_trials: 10, default_tol: tol_identity, run: da_checks::theorem41 },
    CheckDef { id: "da.evans", suite: Suite::Da, dims: &[1, 2, 3], default_trials: 10, default_tol: tol_identity, run: da_checks::evans },
    CheckDef { id: "da.evans_iterated", suite: Suite::Da, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: da_checks::evans_iterated },
    CheckDef { id: "da.dual_truncated", suite: Suite::Da, dims: &[1, 2], default_trials: 10, default_tol: tol_identity, run: da_checks::dual_truncated },
    CheckDef { id: "da.reflective", suite: Suite::Da, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: da_checks::reflective },
    CheckDef { id: "da.mg_bridge", suite: Suite::Da, dims: &[1, 2], default_trials: 10, default_tol: tol_identity, run: da_checks::mg_bridge },
    CheckDef { id: "da.c0_degenerate", suite: Suite::Da, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: da_checks::c0_degenerate },
    CheckDef { id: "da.recurrence_a", suite: Suite::Da, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: da_checks::recurrence_a },
    CheckDef { id: "da.recurrence_b", suite: Suite::Da, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: da_checks::recurrence_b },
    CheckDef { id: "da.recurrence_reg_a", suite: Suite::Da, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: da_checks::recurrence_reg_a },
    CheckDef { id: "da.recurrence_reg_b", suite: Suite::Da, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: da_checks::recurrence_reg_b },
    CheckDef { id: "da.skew_symmetry", suite: Suite::Da, dims: &[2], default_trials: 5, default_tol: tol_identity, run: da_checks::skew_symmetry },
    // Gustafson A_n family
    CheckDef { id: "gus.theorem52", suite: Suite::Gus, dims: &[1, 2], default_trials: 10, default_tol: tol_identity, run: gus_checks::theorem52 },
    CheckDef { id: "gus.constancy", suite: Suite::Gus, dims: &[1, 2], default_trials: 10, default_tol: tol_identity, run: gus_checks::constancy },
    CheckDef { id: "gus.milne_special", suite: Suite::Gus, dims: &[1, 2], default_trials: 10, default_tol: tol_identity, run: gus_checks::milne_special },
    CheckDef { id: "gus.k0_macdonald", suite: Suite::Gus, dims: &[1, 2], default_trials: 10, default_tol: tol_identity, run: gus_checks::k0_macdonald },
    CheckDef { id: "gus.factorization", suite: Suite::Gus, dims: &[1, 2], default_trials: 1, default_tol: tol_exact, run: gus_checks::factorization },
    CheckDef { id: "gus.factorization_sum", suite: Suite::Gus, dims: &[1, 2], default_trials: 5, default_tol: tol_identity, run: gus_checks::factorization_sum },
    CheckDef { id: "gus.recurrence_a", suite: Suite::Gus, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: gus_checks::recurrence_a },
    CheckDef { id: "gus.recurrence_b", suite: Suite::Gus, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: gus_checks::recurrence_b },
    CheckDef { id: "gus.recurrence_reg_a", suite: Suite::Gus, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: gus_checks::recurrence_reg_a },
    CheckDef { id: "gus.recurrence_reg_b", suite: Suite::Gus, dims: &[1, 2], default_trials: 5, default_tol: tol_recurrence, run: gus_checks::recurrence_reg_b },
    // expansion lemmas and vanishing integrals
    CheckDef { id: "mg.poly_expansion", suite: Suite::Lemmas, dims: &[2, 3], default_trials: 20, default_tol: tol_exact, run: lemmas::mg_expansion },
    CheckDef { id: "da.poly_expansion", suite: Suite::Lemmas, dims: &[2, 3], default_trials: 20, default_tol: tol_exact, run: lemmas::da_expansion },
    CheckDef { id: "gus.poly_expansion", suite: Suite::Lemmas, dims: &[2, 3], default_trials: 20, default_tol: tol_exact, run: lemmas::gus_expansion },
    CheckDef { id: "mg.nabla_vanishing", suite: Suite::Lemmas, dims: &[1, 2], default_trials: 5, default_tol: tol_vanishing, run: lemmas::mg_nabla_vanishing },
    CheckDef { id: "da.nabla_vanishing", suite: Suite::Lemmas, dims: &[1, 2], default_trials: 5, default_tol: tol_vanishing, run: lemmas::da_nabla_vanishing },
    CheckDef { id: "gus.nabla_vanishing", suite: Suite::Lemmas, dims: &[1, 2], default_trials: 5, default_tol: tol_vanishing, run: lemmas::gus_nabla_vanishing },
    // asymptotic directions
    CheckDef { id: "mg.asym_truncated", suite: Suite::Asymptotics, dims: &[1, 2], default_trials: 3, default_tol: tol_asym, run: asym::mg_truncated },
    CheckDef { id: "mg.asym_dual", suite: Suite::Asymptotics, dims: &[1, 2], default_trials: 3, default_tol: tol_asym, run: asym::mg_dual },
    CheckDef { id: "da.asym_dual", suite: Suite::Asymptotics, dims: &[1, 2], default_trials: 3, default_tol: tol_asym, run: asym::da_dual },
    CheckDef { id: "gus.asym_tilde", suite: Suite::Asymptotics, dims: &[1, 2], default_trials: 3, default_tol: tol_asym, run: asym::gus_tilde },
];

/// Every check known to the engine.
pub fn catalog() -> &'static [CheckDef] {
    CATALOG
}

pub fn find_check(base_id: &str) -> Option<&'static CheckDef> {
    CATALOG.iter().find(|d| d.id == base_id)
}

/// Run one check by its full identifier (`base` or `base.nK`), seeding the
/// sampler stream from `(id, seed)`.
pub fn check_identity(
    check_id: &str,
    ctx: &QContext,
    seed: u64,
) -> Result<CheckReport, CheckError> {
    let (base, n) = match check_id.rfind(".n") {
        Some(pos) if check_id[pos + 2..].chars().all(|c| c.is_ascii_digit()) => {
            let n: usize = check_id[pos + 2..]
                .parse()
                .map_err(|_| CheckError::Invalid(format!("bad dimension suffix in {check_id}")))?;
            (&check_id[..pos], n)
        }
        _ => (check_id, 0),
    };
    let def = find_check(base)
        .ok_or_else(|| CheckError::Invalid(format!("unknown check id {check_id}")))?;
    let n = if def.dims.is_empty() {
        0
    } else if n == 0 {
        def.dims[0]
    } else if def.dims.contains(&n) {
        n
    } else {
        return Err(CheckError::Invalid(format!(
            "check {base} does not support dimension {n}"
        )));
    };
    let input = CheckInput {
        check_id: full_id(def, n),
        n,
        ctx,
        seed,
        tol: (def.default_tol)(n),
    };
    (def.run)(&input)
}

/// Canonical identifier for a check instance.
pub fn full_id(def: &CheckDef, n: usize) -> String {
    if def.dims.is_empty() {
        def.id.to_string()
    } else {
        format!("{}.n{}", def.id, n)
    }
}
