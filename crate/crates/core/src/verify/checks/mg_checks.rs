//! Identity, connection, recurrence and structural checks for the
//! Milne-Gustafson family.

use std::time::Instant;

use num_complex::Complex64;

use super::{box_spec, fan_spec, fold_dev};
use crate::families::mg::{
    mg_connection_coeff, mg_dual_lhs, mg_dual_rec_alpha_coeff, mg_dual_regularizer_h,
    mg_dual_truncated_rhs, mg_hbar_scaled, mg_h_scaled, mg_lhs, mg_macdonald_constant,
    mg_macdonald_sum, mg_rec_alpha_coeff, mg_reflection_factor, mg_regularizer_h, mg_rhs,
    mg_truncated_rhs, MGParams,
};
use crate::families::reversal_sign;
use crate::qcore::{q_power, qpoch_inf, theta_exp, QContext};
use crate::scaled::Scaled;
use crate::verify::sample::{sample_mg, sample_mg_base, trial_rng, Mode};
use crate::verify::{echo_c, echo_vec, rel_dev, CheckError, CheckInput, CheckReport};

fn echo(p: &MGParams, ctx: &QContext, extra: &str) -> String {
    format!(
        "q={:.16e};n={};alpha_exp={};beta_exp={};alpha={}{}",
        ctx.q(),
        p.n,
        echo_vec(&p.alpha_exp),
        echo_vec(&p.beta_exp),
        echo_c(p.alpha),
        extra
    )
}

pub(crate) fn theorem31(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let x = sample_mg_base(&mut rng, &p);
    let sctx = input.sum_ctx();
    let lhs = mg_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let rhs = mg_rhs(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    Ok(input.report(
        "Milne-Gustafson bilateral summation (multidimensional Ramanujan 1psi1)",
        lhs.value,
        rhs,
        rel_dev(lhs.value, rhs),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        lhs.terms,
        started,
    ))
}

pub(crate) fn truncated(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let sctx = input.sum_ctx();
    let lhs = mg_lhs(&p, &p.a_point(), &fan_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let rhs = mg_truncated_rhs(&p, input.ctx).map_err(|e| input.wrap_family(e))?;
    Ok(input.report(
        "truncated Milne-Gustafson sum (multidimensional q-binomial theorem)",
        lhs.value,
        rhs,
        rel_dev(lhs.value, rhs),
        echo(&p, input.ctx, ";x=a"),
        lhs.terms,
        started,
    ))
}

pub(crate) fn dual_truncated(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let sctx = input.sum_ctx();
    let lhs = mg_dual_lhs(&p, &p.b_point(), &fan_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let rhs = mg_dual_truncated_rhs(&p, input.ctx).map_err(|e| input.wrap_family(e))?;
    Ok(input.report(
        "dual truncated Milne-Gustafson sum",
        lhs.value,
        rhs,
        rel_dev(lhs.value, rhs),
        echo(&p, input.ctx, ";x=b"),
        lhs.terms,
        started,
    ))
}

/// n = 1 cross-check against an independently coded scalar q-binomial
/// series: `sum_k (c;q)_k/(q;q)_k z^k = (cz;q)_inf/(z;q)_inf`, built by
/// plain incremental term updates with no shared kernel code.
pub(crate) fn qbinomial_oracle(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, 1, 0);
    let p = sample_mg(&mut rng, 1, Mode::Standard);
    let q = input.ctx.q();
    let ab = q_power(p.alpha_exp[0] + p.beta_exp[0], input.ctx);
    let z = q_power(p.alpha, input.ctx);
    // scalar series oracle
    let mut term = Complex64::new(1.0, 0.0);
    let mut series = term;
    let mut cq = ab;
    let mut qq = q;
    for _ in 0..600 {
        term = term * (1.0 - cq) / (1.0 - qq) * z;
        series += term;
        cq *= q;
        qq *= q;
        if term.norm() < 1e-18 * series.norm() {
            break;
        }
    }
    let a = q_power(p.alpha_exp[0], input.ctx);
    let prefactor = (1.0 - q)
        * q_power(p.alpha * p.alpha_exp[0], input.ctx)
        * qpoch_inf(Complex64::new(q, 0.0), input.ctx)
        / qpoch_inf(ab, input.ctx);
    let _ = a;
    let oracle = prefactor * series;
    let sctx = input.sum_ctx();
    let fan = mg_lhs(&p, &p.a_point(), &fan_spec(1, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let closed = mg_truncated_rhs(&p, input.ctx).map_err(|e| input.wrap_family(e))?;
    let dev = fold_dev(&[rel_dev(fan.value, oracle), rel_dev(closed, oracle)]);
    Ok(input.report(
        "q-binomial theorem, scalar series oracle",
        fan.value,
        oracle,
        dev,
        echo(&p, input.ctx, ";oracle=qbinomial-series"),
        fan.terms,
        started,
    ))
}

pub(crate) fn connection_xa(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let x = sample_mg_base(&mut rng, &p);
    let sctx = input.sum_ctx();
    let lhs = mg_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let ia = mg_lhs(&p, &p.a_point(), &fan_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let a_pt = p.a_point();
    let hx = mg_regularizer_h(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    let ha = mg_regularizer_h(&p, &a_pt, input.ctx).map_err(|e| input.wrap_family(e))?;
    let coeff = mg_connection_coeff(&p, &x, &a_pt, input.ctx).map_err(|e| input.wrap_family(e))?;
    let rhs = hx / ha * coeff * ia.value;
    Ok(input.report(
        "connection to the truncated solution",
        lhs.value,
        rhs,
        rel_dev(lhs.value, rhs),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        lhs.terms + ia.terms,
        started,
    ))
}

pub(crate) fn connection_xb(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let x = sample_mg_base(&mut rng, &p);
    let sctx = input.sum_ctx();
    let lhs = mg_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let ib = mg_dual_lhs(&p, &p.b_point(), &fan_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let b_pt = p.b_point();
    let hx = mg_h_scaled(&p, &x, input.ctx);
    let hbarb = mg_hbar_scaled(&p, &b_pt, input.ctx);
    let coeff = theta_exp(p.alpha + x.sum_exponents() + p.sum_beta(), input.ctx)
        .div(theta_exp(p.alpha, input.ctx));
    let rhs = hx.div(hbarb).mul(coeff).mul_c(ib.value).to_complex();
    if !rhs.re.is_finite() || !rhs.im.is_finite() {
        return Err(CheckError::NonFinite {
            check_id: input.check_id.clone(),
            detail: "connection coefficient".into(),
        });
    }
    Ok(input.report(
        "connection to the dual truncated solution",
        lhs.value,
        rhs,
        rel_dev(lhs.value, rhs),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        lhs.terms + ib.terms,
        started,
    ))
}

pub(crate) fn connection_xy(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let x = sample_mg_base(&mut rng, &p);
    let y = sample_mg_base(&mut rng, &p);
    let sctx = input.sum_ctx();
    let ix = mg_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let iy = mg_lhs(&p, &y, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let hx = mg_regularizer_h(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    let hy = mg_regularizer_h(&p, &y, input.ctx).map_err(|e| input.wrap_family(e))?;
    let coeff = mg_connection_coeff(&p, &x, &y, input.ctx).map_err(|e| input.wrap_family(e))?;
    let lhs = ix.value / hx;
    let rhs = coeff * (iy.value / hy);
    let mut devs = vec![rel_dev(lhs, rhs)];
    // the full coefficient between the raw sums, h(x) theta(..x..) /
    // (h(y) theta(..y..)), is invariant under integer shifts of a base
    // exponent and of the weight power
    let full = |pp: &MGParams, xx: &crate::qcore::ExponentPoint| {
        mg_h_scaled(pp, xx, input.ctx)
            .mul(theta_exp(pp.alpha + xx.sum_exponents() + pp.sum_beta(), input.ctx))
    };
    let base = full(&p, &x).div(full(&p, &y)).to_complex();
    let shifted_x = full(&p, &x.shifted(0, 1.0)).div(full(&p, &y)).to_complex();
    devs.push(rel_dev(shifted_x, base));
    let p_up = MGParams { alpha: p.alpha + 1.0, ..p.clone() };
    let shifted_alpha = full(&p_up, &x).div(full(&p_up, &y)).to_complex();
    devs.push(rel_dev(shifted_alpha, base));
    Ok(input.report(
        "connection formula between regularized sums at two bases",
        lhs,
        rhs,
        fold_dev(&devs),
        echo(&p, input.ctx, &format!(";x={};y={}", echo_vec(&x.xi), echo_vec(&y.xi))),
        ix.terms + iy.terms,
        started,
    ))
}

pub(crate) fn macdonald_const(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::ConstantTerm);
    let x = sample_mg_base(&mut rng, &p);
    let sctx = input.sum_ctx();
    let lhs = mg_macdonald_sum(&p, &x, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let rhs = mg_macdonald_constant(&p, input.ctx).map_err(|e| input.wrap_family(e))?;
    Ok(input.report(
        "Macdonald-type constant-term sum",
        lhs.value,
        rhs,
        rel_dev(lhs.value, rhs),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        lhs.terms,
        started,
    ))
}

pub(crate) fn reflective(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let x = sample_mg_base(&mut rng, &p);
    let xinv = x.inverted();
    let sctx = input.sum_ctx();
    let ix = mg_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let ibar = mg_dual_lhs(&p, &xinv, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let factor = mg_reflection_factor(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    let rhs = factor * ibar.value;
    let mut devs = vec![rel_dev(ix.value, rhs)];
    // the explicit factor equals the regularizer ratio h(x)/hbar(x^-1)
    let ratio = mg_h_scaled(&p, &x, input.ctx)
        .div(mg_hbar_scaled(&p, &xinv, input.ctx))
        .to_complex();
    devs.push(rel_dev(ratio, factor));
    // regularized form of the reflection
    let hx = mg_regularizer_h(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    let hbar = mg_dual_regularizer_h(&p, &xinv, input.ctx).map_err(|e| input.wrap_family(e))?;
    devs.push(rel_dev(ix.value / hx, ibar.value / hbar));
    Ok(input.report(
        "reflection between the sum and its dual",
        ix.value,
        rhs,
        fold_dev(&devs),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        ix.terms + ibar.terms,
        started,
    ))
}

pub(crate) fn constant_c(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let sctx = input.sum_ctx();
    let ia = mg_lhs(&p, &p.a_point(), &fan_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let a_pt = p.a_point();
    let ha = mg_h_scaled(&p, &a_pt, input.ctx);
    let th = theta_exp(p.alpha + p.sum_alpha() + p.sum_beta(), input.ctx);
    let lhs = Scaled::new(ia.value).div(ha.mul(th)).to_complex();
    // closed form: the x-independent prefactor of the bilateral evaluation
    let one = Complex64::new(1.0, 0.0);
    let mut rhs_s = Scaled::new(Complex64::new(
        (1.0 - input.ctx.q()).powi(input.n as i32),
        0.0,
    ));
    let qq = crate::qcore::qpoch_inf_exp(one, input.ctx);
    for _ in 0..input.n {
        rhs_s = rhs_s.mul(qq);
    }
    for i in 0..input.n {
        for j in 0..input.n {
            rhs_s = rhs_s.mul(crate::qcore::qpoch_inf_exp(
                one - p.alpha_exp[i] - p.beta_exp[j],
                input.ctx,
            ));
        }
    }
    rhs_s = rhs_s
        .div(crate::qcore::qpoch_inf_exp(p.alpha, input.ctx))
        .div(crate::qcore::qpoch_inf_exp(one - p.alpha - p.sum_exponents(), input.ctx));
    let rhs = rhs_s.to_complex();
    Ok(input.report(
        "explicit value of the regularized constant",
        lhs,
        rhs,
        rel_dev(lhs, rhs),
        echo(&p, input.ctx, ""),
        ia.terms,
        started,
    ))
}

pub(crate) fn recurrence_alpha(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Recurrence);
    let x = sample_mg_base(&mut rng, &p);
    let p_up = p.with_alpha(p.alpha + 1.0).map_err(|e| input.wrap_family(e))?;
    let sctx = input.sum_ctx();
    let lhs = mg_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let up = mg_lhs(&p_up, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let rhs = mg_rec_alpha_coeff(&p, input.ctx) * up.value;
    Ok(input.report(
        "contiguous relation in the weight power",
        lhs.value,
        rhs,
        rel_dev(lhs.value, rhs),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        lhs.terms + up.terms,
        started,
    ))
}

pub(crate) fn recurrence_dual_alpha(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::DualRecurrence);
    let x = sample_mg_base(&mut rng, &p);
    let p_down = p.with_alpha(p.alpha - 1.0).map_err(|e| input.wrap_family(e))?;
    let sctx = input.sum_ctx();
    let lhs = mg_dual_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let down = mg_dual_lhs(&p_down, &x, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let rhs = mg_dual_rec_alpha_coeff(&p, input.ctx) * down.value;
    Ok(input.report(
        "contiguous relation of the dual sum in the weight power",
        lhs.value,
        rhs,
        rel_dev(lhs.value, rhs),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        lhs.terms + down.terms,
        started,
    ))
}

/// Swapping two base coordinates negates the bilateral sum; the regularized
/// sum is invariant. Passes within ten tail estimates.
pub(crate) fn skew_symmetry(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let x = sample_mg_base(&mut rng, &p);
    let xs = x.swapped(0, 1);
    let sctx = input.sum_ctx();
    let ix = mg_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let is = mg_lhs(&p, &xs, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let rhs = -ix.value;
    let dev = rel_dev(is.value, rhs);
    let hx = mg_regularizer_h(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    let hs = mg_regularizer_h(&p, &xs, input.ctx).map_err(|e| input.wrap_family(e))?;
    let dev2 = rel_dev(is.value / hs, ix.value / hx);
    let tol = 10.0 * (ix.tail_estimate + is.tail_estimate) / rhs.norm().max(1.0);
    let mut report = input.report(
        "skew-symmetry of the bilateral sum, symmetry of its regularization",
        is.value,
        rhs,
        fold_dev(&[dev, dev2]),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        ix.terms + is.terms,
        started,
    );
    report.tol = tol.max(input.tol);
    report.passed = report.rel_dev <= report.tol;
    Ok(report)
}

/// Integer shift of a base exponent leaves the bilateral sum unchanged.
pub(crate) fn qshift_invariance(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let x = sample_mg_base(&mut rng, &p);
    let xs = x.shifted(0, 1.0);
    let sctx = input.sum_ctx();
    let ix = mg_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let is = mg_lhs(&p, &xs, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let dev = rel_dev(is.value, ix.value);
    let tol = 10.0 * (ix.tail_estimate + is.tail_estimate) / ix.value.norm().max(1.0);
    let mut report = input.report(
        "q-shift invariance of the bilateral sum",
        is.value,
        ix.value,
        dev,
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        ix.terms + is.terms,
        started,
    );
    report.tol = tol.max(input.tol);
    report.passed = report.rel_dev <= report.tol;
    Ok(report)
}

/// At the truncating base the bilateral box sum collapses onto the fan.
pub(crate) fn fan_box_truncation(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let sctx = input.sum_ctx();
    let a_pt = p.a_point();
    let fan = mg_lhs(&p, &a_pt, &fan_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let boxed = mg_lhs(&p, &a_pt, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let dev = rel_dev(boxed.value, fan.value);
    let tol = 10.0 * (fan.tail_estimate + boxed.tail_estimate) / fan.value.norm().max(1.0);
    let mut report = input.report(
        "support collapse of the bilateral sum at the truncating base",
        boxed.value,
        fan.value,
        dev,
        echo(&p, input.ctx, ";x=a"),
        fan.terms + boxed.terms,
        started,
    );
    report.tol = tol.max(input.tol);
    report.passed = report.rel_dev <= report.tol;
    Ok(report)
}

/// The parameter swap is an involution, and one application carries the sum
/// onto its dual up to the Vandermonde reversal sign.
pub(crate) fn duality_involution(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_mg(&mut rng, input.n, Mode::Standard);
    let x = sample_mg_base(&mut rng, &p);
    let swapped = p.dual_params().map_err(|e| input.wrap_family(e))?;
    let twice = swapped.dual_params().map_err(|e| input.wrap_family(e))?;
    let mut devs = Vec::new();
    for i in 0..p.n {
        devs.push((twice.alpha_exp[i] - p.alpha_exp[i]).norm());
        devs.push((twice.beta_exp[i] - p.beta_exp[i]).norm());
    }
    devs.push((twice.alpha - p.alpha).norm());
    let sctx = input.sum_ctx();
    let lhs = mg_lhs(&swapped, &x, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let dual = mg_dual_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let rhs = reversal_sign(input.n) * dual.value;
    devs.push(rel_dev(lhs.value, rhs));
    Ok(input.report(
        "parameter-swap duality: involution and transfer to the dual sum",
        lhs.value,
        rhs,
        fold_dev(&devs),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        lhs.terms + dual.terms,
        started,
    ))
}
