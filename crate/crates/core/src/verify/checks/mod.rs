//! Check implementations, grouped by what they exercise.

pub(crate) mod asym;
pub(crate) mod core_kernels;
pub(crate) mod da_checks;
pub(crate) mod gus_checks;
pub(crate) mod lemmas;
pub(crate) mod mg_checks;

use crate::lattice::SumSpec;
use crate::qcore::QContext;

pub(crate) fn box_spec(n: usize, ctx: &QContext) -> SumSpec {
    let s = SumSpec::boxed(n, ctx.lattice_cutoff);
    if ctx.pinned_cutoff {
        s.with_max_cutoff(ctx.lattice_cutoff)
    } else {
        s
    }
}

pub(crate) fn fan_spec(n: usize, ctx: &QContext) -> SumSpec {
    let s = SumSpec::fan(n, ctx.lattice_cutoff);
    if ctx.pinned_cutoff {
        s.with_max_cutoff(ctx.lattice_cutoff)
    } else {
        s
    }
}

/// Max of per-point relative deviations, used by multi-assert checks.
pub(crate) fn fold_dev(devs: &[f64]) -> f64 {
    devs.iter().copied().fold(0.0, f64::max)
}
