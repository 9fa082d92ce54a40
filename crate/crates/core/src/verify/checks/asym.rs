//! Leading-term asymptotics along the parameter directions that fix the
//! special solutions.
//!
//! Each family's truncated sum, divided by its predicted leading term inside
//! the summand (so nothing underflows), must approach 1 along the drift;
//! a check passes when the deviation |ratio - 1| strictly decreases over the
//! drift list and the final deviation is below tolerance.

use std::time::Instant;

use num_complex::Complex64;

use crate::families::FamilyError;
use crate::lattice::SumResult;
use crate::verify::sample::{sample_da, sample_gus, sample_mg, trial_rng, Mode};
use crate::verify::{echo_vec, CheckError, CheckInput, CheckReport};

pub(crate) const MG_DRIFT: [i64; 3] = [5, 10, 15];
pub(crate) const DA_DRIFT: [i64; 3] = [8, 12, 16];
pub(crate) const GUS_DRIFT: [i64; 3] = [6, 12, 18];

fn run_direction<F>(
    input: &CheckInput,
    anchor: &str,
    drift: &[i64],
    echo: String,
    ratio: F,
) -> Result<CheckReport, CheckError>
where
    F: Fn(i64) -> Result<SumResult, FamilyError>,
{
    let started = Instant::now();
    let mut devs = Vec::with_capacity(drift.len());
    let mut terms = 0;
    let mut last = Complex64::default();
    for &big_n in drift {
        let r = ratio(big_n).map_err(|e| input.wrap_family(e))?;
        terms += r.terms;
        last = r.value;
        devs.push((r.value - Complex64::new(1.0, 0.0)).norm());
    }
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    let final_dev = *devs.last().unwrap();
    // a non-monotone sequence fails regardless of the final deviation
    let dev = if monotone { final_dev } else { 1.0 + devs.iter().cloned().fold(0.0, f64::max) };
    let echo = format!("{echo};drift={drift:?};devs={devs:?}");
    Ok(input.report(anchor, last, Complex64::new(1.0, 0.0), dev, echo, terms, started))
}

pub(crate) fn mg_truncated(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let sctx = input.ctx.with_identity_tol(1e-6).unwrap_or(*input.ctx);
    let echo = format!(
        "q={:.16e};n={};alpha_exp={};beta_exp={};alpha={}",
        input.ctx.q(),
        input.n,
        echo_vec(&p.alpha_exp),
        echo_vec(&p.beta_exp),
        crate::verify::echo_c(p.alpha)
    );
    run_direction(
        input,
        "leading asymptotics of the truncated sum as the weight power grows",
        &MG_DRIFT,
        echo,
        |big_n| crate::families::mg::mg_asym_ratio(&p, big_n, &sctx),
    )
}

pub(crate) fn mg_dual(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let sctx = input.ctx.with_identity_tol(1e-6).unwrap_or(*input.ctx);
    let echo = format!(
        "q={:.16e};n={};alpha_exp={};beta_exp={};alpha={}",
        input.ctx.q(),
        input.n,
        echo_vec(&p.alpha_exp),
        echo_vec(&p.beta_exp),
        crate::verify::echo_c(p.alpha)
    );
    run_direction(
        input,
        "leading asymptotics of the dual truncated sum as the weight power drops",
        &MG_DRIFT,
        echo,
        |big_n| crate::families::mg::mg_dual_asym_ratio(&p, big_n, &sctx),
    )
}

pub(crate) fn da_dual(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_da(&mut rng, input.n, Mode::Standard);
    let sctx = input.ctx.with_identity_tol(1e-6).unwrap_or(*input.ctx);
    let echo = format!(
        "q={:.16e};n={};alpha_exp={};beta_exp={}",
        input.ctx.q(),
        input.n,
        echo_vec(&p.alpha_exp),
        echo_vec(&p.beta_exp)
    );
    run_direction(
        input,
        "leading asymptotics of the dual truncated sum along the special drift",
        &DA_DRIFT,
        echo,
        |big_n| crate::families::da::da_asym_ratio(&p, big_n, &sctx),
    )
}

pub(crate) fn gus_tilde(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_gus(&mut rng, input.n, Mode::Standard);
    let sctx = input.ctx.with_identity_tol(1e-6).unwrap_or(*input.ctx);
    let echo = format!(
        "q={:.16e};n={};alpha_exp={};beta_exp={};d_exp={}",
        input.ctx.q(),
        input.n,
        echo_vec(&p.alpha_exp),
        echo_vec(&p.beta_exp),
        crate::verify::echo_c(p.d_exp)
    );
    run_direction(
        input,
        "leading asymptotics of the deformed truncated sum along the special drift",
        &GUS_DRIFT,
        echo,
        |big_n| crate::families::gus::gus_asym_ratio(&p, big_n, &sctx),
    )
}
