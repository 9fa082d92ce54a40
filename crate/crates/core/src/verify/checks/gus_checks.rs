//! Identity, recurrence and structural checks for the Gustafson A_n family.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

use super::{box_spec, fan_spec, fold_dev};
use crate::families::gus::{
    gus_constant_rhs, gus_k_factor, gus_k_factor_alt, gus_k_factor_point, gus_lhs,
    gus_macdonald_k0, gus_milne_truncated_rhs, gus_rec_a_coeff, gus_rec_b_coeff,
    gus_rec_reg_a_coeff, gus_rec_reg_b_coeff, gus_regularizer_h, gus_regularizer_h_symmetric,
    gus_tilde_lhs, gus_tilde_weight_point, gus_weight_point, GUSParams,
};
use crate::qcore::{qpoch_inf, QContext};
use crate::verify::sample::{sample_gus, sample_gus_base, sample_gus_milne, trial_rng, Mode};
use crate::verify::{echo_c, echo_vec, rel_dev, CheckError, CheckInput, CheckReport};

fn echo(p: &GUSParams, ctx: &QContext, extra: &str) -> String {
    format!(
        "q={:.16e};n={};alpha_exp={};beta_exp={};d_exp={}{}",
        ctx.q(),
        p.n,
        echo_vec(&p.alpha_exp),
        echo_vec(&p.beta_exp),
        echo_c(p.d_exp),
        extra
    )
}

pub(crate) fn theorem52(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_gus(&mut rng, input.n, Mode::Standard);
    let x = sample_gus_base(&mut rng, &p);
    let sctx = input.sum_ctx();
    let k = gus_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let h = gus_regularizer_h(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    let lhs = k.value / h;
    let rhs = gus_constant_rhs(&p, input.ctx).map_err(|e| input.wrap_family(e))?;
    // the two presentations of the regularizer agree
    let h_sym = gus_regularizer_h_symmetric(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    let dev = fold_dev(&[rel_dev(lhs, rhs), rel_dev(h_sym, h)]);
    Ok(input.report(
        "Gustafson A_n summation",
        lhs,
        rhs,
        dev,
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        k.terms,
        started,
    ))
}

pub(crate) fn constancy(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_gus(&mut rng, input.n, Mode::Standard);
    let x1 = sample_gus_base(&mut rng, &p);
    let x2 = sample_gus_base(&mut rng, &p);
    let sctx = input.sum_ctx();
    let k1 = gus_lhs(&p, &x1, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let k2 = gus_lhs(&p, &x2, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let h1 = gus_regularizer_h(&p, &x1, input.ctx).map_err(|e| input.wrap_family(e))?;
    let h2 = gus_regularizer_h(&p, &x2, input.ctx).map_err(|e| input.wrap_family(e))?;
    let lhs = k1.value / h1;
    let rhs = k2.value / h2;
    Ok(input.report(
        "base independence of the regularized sum",
        lhs,
        rhs,
        rel_dev(lhs, rhs),
        echo(&p, input.ctx, &format!(";x1={};x2={}", echo_vec(&x1.xi), echo_vec(&x2.xi))),
        k1.terms + k2.terms,
        started,
    ))
}

pub(crate) fn milne_special(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_gus_milne(&mut rng, input.n);
    let sctx = input.sum_ctx();
    let k = gus_lhs(&p, &p.a_point(), &fan_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let rhs = gus_milne_truncated_rhs(&p, input.ctx).map_err(|e| input.wrap_family(e))?;
    Ok(input.report(
        "Milne's U(n) fundamental theorem",
        k.value,
        rhs,
        rel_dev(k.value, rhs),
        echo(&p, input.ctx, ";x=a;d=prod(a)"),
        k.terms,
        started,
    ))
}

pub(crate) fn k0_macdonald(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_gus(&mut rng, input.n, Mode::Standard);
    let x1 = sample_gus_base(&mut rng, &p);
    let x2 = sample_gus_base(&mut rng, &p);
    let sctx = input.sum_ctx();
    let k1 = gus_macdonald_k0(&p, &x1, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let k2 = gus_macdonald_k0(&p, &x2, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let q = input.ctx.q();
    let rhs = Complex64::new((1.0 - q).powi(input.n as i32), 0.0)
        * qpoch_inf(Complex64::new(q, 0.0), input.ctx).powu(input.n as u32);
    let dev = fold_dev(&[rel_dev(k1.value, rhs), rel_dev(k2.value, k1.value)]);
    Ok(input.report(
        "Macdonald identity for A_n (Milne's form)",
        k1.value,
        rhs,
        dev,
        echo(&p, input.ctx, &format!(";x1={};x2={}", echo_vec(&x1.xi), echo_vec(&x2.xi))),
        k1.terms + k2.terms,
        started,
    ))
}

/// Pointwise factorization of the weight through the quasi-periodic factor,
/// on 100 seeded lattice points.
pub(crate) fn factorization(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_gus(&mut rng, input.n, Mode::Standard);
    let x = sample_gus_base(&mut rng, &p);
    let mut devs = Vec::with_capacity(102);
    let mut worst = (Complex64::default(), Complex64::default(), -1.0);
    for _ in 0..100 {
        let nu: Vec<i64> = (0..input.n).map(|_| rng.gen_range(-24..=24)).collect();
        let phi = gus_weight_point(&p, &x, &nu, input.ctx);
        let kf = gus_k_factor_point(&p, &x, &nu, input.ctx);
        let tilde = gus_tilde_weight_point(&p, &x, &nu, input.ctx);
        let rhs = kf.mul(tilde);
        // compare in scaled form: mantissa ratio with exponent alignment
        let lv = phi.to_complex();
        let rv = rhs.to_complex();
        let (lv, rv) = if lv.re.is_finite() && rv.re.is_finite() && lv.norm() > 0.0 {
            (lv, rv)
        } else {
            (phi.mantissa, rhs.mul_c(Complex64::new(1.0, 0.0)).mantissa)
        };
        let d = rel_dev(lv, rv);
        if d >= worst.2 {
            worst = (lv, rv, d);
        }
        devs.push(d);
    }
    // the two closed forms of the factor agree as well
    let k1 = gus_k_factor(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    let k2 = gus_k_factor_alt(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    devs.push(rel_dev(k1, k2));
    Ok(input.report(
        "quasi-periodic factorization of the weight, pointwise",
        worst.0,
        worst.1,
        fold_dev(&devs),
        echo(&p, input.ctx, &format!(";x={};points=100", echo_vec(&x.xi))),
        100,
        started,
    ))
}

/// Sum-level form of the factorization: `K(x) = k(x) Ktilde(x)`.
pub(crate) fn factorization_sum(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_gus(&mut rng, input.n, Mode::Standard);
    let x = sample_gus_base(&mut rng, &p);
    let sctx = input.sum_ctx();
    let k = gus_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx).map_err(|e| input.wrap_family(e))?;
    let kt = gus_tilde_lhs(&p, &x, &box_spec(input.n, &sctx), &sctx)
        .map_err(|e| input.wrap_family(e))?;
    let kf = gus_k_factor(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
    let rhs = kf * kt.value;
    Ok(input.report(
        "quasi-periodic factorization of the sum",
        k.value,
        rhs,
        rel_dev(k.value, rhs),
        echo(&p, input.ctx, &format!(";x={}", echo_vec(&x.xi))),
        k.terms + kt.terms,
        started,
    ))
}

fn recurrence(
    input: &CheckInput,
    shift_alpha: bool,
    regularized: bool,
) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, input.n, 0);
    let p = sample_gus(&mut rng, input.n, Mode::Recurrence);
    let x = sample_gus_base(&mut rng, &p);
    let j = rng.gen_range(0..p.pairs());
    let shifted = if shift_alpha { p.shift_alpha(j, 1.0) } else { p.shift_beta(j, 1.0) }
        .map_err(|e| input.wrap_family(e))?;
    let sctx = input.sum_ctx();
    let spec = box_spec(input.n, &sctx);
    let k0 = gus_lhs(&p, &x, &spec, &sctx).map_err(|e| input.wrap_family(e))?;
    let k1 = gus_lhs(&shifted, &x, &spec, &sctx).map_err(|e| input.wrap_family(e))?;
    let (lhs, rhs);
    if regularized {
        let h0 = gus_regularizer_h(&p, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
        let h1 = gus_regularizer_h(&shifted, &x, input.ctx).map_err(|e| input.wrap_family(e))?;
        let coeff = if shift_alpha {
            gus_rec_reg_a_coeff(&p, j, input.ctx)
        } else {
            gus_rec_reg_b_coeff(&p, j, input.ctx)
        };
        lhs = k1.value / h1;
        rhs = coeff * (k0.value / h0);
    } else {
        let coeff = if shift_alpha {
            gus_rec_a_coeff(&p, j, input.ctx)
        } else {
            gus_rec_b_coeff(&p, j, input.ctx)
        };
        lhs = k1.value;
        rhs = coeff * k0.value;
    }
    let what = match (shift_alpha, regularized) {
        (true, false) => "contiguous relation in an a-parameter",
        (false, false) => "contiguous relation in a b-parameter",
        (true, true) => "regularized contiguous relation in an a-parameter",
        (false, true) => "regularized contiguous relation in a b-parameter",
    };
    Ok(input.report(
        what,
        lhs,
        rhs,
        rel_dev(lhs, rhs),
        echo(&p, input.ctx, &format!(";x={};shift_j={}", echo_vec(&x.xi), j + 1)),
        k0.terms + k1.terms,
        started,
    ))
}

pub(crate) fn recurrence_a(input: &CheckInput) -> Result<CheckReport, CheckError> {
    recurrence(input, true, false)
}

pub(crate) fn recurrence_b(input: &CheckInput) -> Result<CheckReport, CheckError> {
    recurrence(input, false, false)
}

pub(crate) fn recurrence_reg_a(input: &CheckInput) -> Result<CheckReport, CheckError> {
    recurrence(input, true, true)
}

pub(crate) fn recurrence_reg_b(input: &CheckInput) -> Result<CheckReport, CheckError> {
    recurrence(input, false, true)
}
