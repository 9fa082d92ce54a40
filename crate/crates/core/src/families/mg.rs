//! Milne-Gustafson bilateral sums.
//!
//! The weight is `(z_1...z_n)^alpha prod_{i,j} (q a_j^-1 z_i)_inf / (b_j z_i)_inf`
//! against the Vandermonde factor; its bilateral Jackson integral over the
//! q-cycle through `x` evaluates to an explicit theta-function product (the
//! multi-dimensional extension of Ramanujan's 1psi1 summation). This module
//! provides the lattice weights, the closed-form product sides, the
//! regularizer `h`, the dual companion sum, connection coefficients, the
//! constant-term (Macdonald-type) variant and the asymptotic leading terms.

use num_complex::Complex64;

use super::{capacity, finish, require_margin, reversal_sign, vandermonde, FamilyError, WeightVariant};
use crate::lattice::{jackson_sum, Cycle, SumResult, SumSpec};
use crate::qcore::{
    q_power, q_power_scaled, qpoch_inf_exp, theta_exp, ExponentPoint, PochTable, PowerTable,
    QContext, ValueTable,
};
use crate::scaled::Scaled;

/// Parameters of the family, all as q-exponents: `a_i = q^{alpha_exp[i]}`,
/// `b_i = q^{beta_exp[i]}`, and the weight power `alpha`.
///
/// Convergence of the bilateral sum requires
/// `0 < Re(alpha) < 1 - Re(sum alpha_exp + sum beta_exp)`; the constructor
/// rejects parameters outside that window. `alpha` is an explicit knob
/// because the contiguous relation in `alpha` shifts it by integers.
#[derive(Clone, Debug, PartialEq)]
pub struct MGParams {
    pub n: usize,
    pub alpha_exp: Vec<Complex64>,
    pub beta_exp: Vec<Complex64>,
    pub alpha: Complex64,
}

impl MGParams {
    pub fn new(
        alpha_exp: Vec<Complex64>,
        beta_exp: Vec<Complex64>,
        alpha: Complex64,
    ) -> Result<Self, FamilyError> {
        let n = alpha_exp.len();
        if n == 0 || beta_exp.len() != n {
            return Err(FamilyError::InvalidParams(
                "alpha_exp and beta_exp must have equal positive length".into(),
            ));
        }
        let p = MGParams { n, alpha_exp, beta_exp, alpha };
        require_margin(p.alpha.re, "positive-side convergence (Re alpha > 0)")?;
        require_margin(
            1.0 - p.sum_exponents().re - p.alpha.re,
            "negative-side convergence (Re alpha < 1 - sum of parameter exponents)",
        )?;
        Ok(p)
    }

    pub fn sum_alpha(&self) -> Complex64 {
        self.alpha_exp.iter().sum()
    }

    pub fn sum_beta(&self) -> Complex64 {
        self.beta_exp.iter().sum()
    }

    pub fn sum_exponents(&self) -> Complex64 {
        self.sum_alpha() + self.sum_beta()
    }

    /// The derived dual power `beta = 1 - sum(alpha_exp) - sum(beta_exp) - alpha`,
    /// which satisfies `a_1..a_n b_1..b_n q^{alpha+beta} = q` by construction.
    pub fn beta_derived(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.sum_exponents() - self.alpha
    }

    /// Same parameter set with the weight power replaced.
    pub fn with_alpha(&self, alpha: Complex64) -> Result<Self, FamilyError> {
        Self::new(self.alpha_exp.clone(), self.beta_exp.clone(), alpha)
    }

    /// The parameter swap `alpha <-> beta`, `a_i <-> b_i`, under which the
    /// sum transforms into its dual up to a sign. An involution.
    pub fn dual_params(&self) -> Result<Self, FamilyError> {
        Self::new(self.beta_exp.clone(), self.alpha_exp.clone(), self.beta_derived())
    }

    /// Base point `x = a`, where the bilateral sum truncates to a fan sum.
    pub fn a_point(&self) -> ExponentPoint {
        ExponentPoint::new(self.alpha_exp.clone())
    }

    /// Base point `x = b`, where the dual sum truncates.
    pub fn b_point(&self) -> ExponentPoint {
        ExponentPoint::new(self.beta_exp.clone())
    }

    /// Margin of the convergence window, `min(Re alpha, 1 - Re(sum) - Re alpha)`.
    pub fn convergence_margin(&self) -> f64 {
        self.alpha.re.min(1.0 - self.sum_exponents().re - self.alpha.re)
    }
}

/// Table-backed lattice summand for the primal or dual weight.
pub struct MgSummand {
    n: usize,
    num: Vec<PochTable>,
    den: Vec<PochTable>,
    pow: Vec<PowerTable>,
    zt: Vec<ValueTable>,
    prefactor: Scaled,
    pub capacity: i64,
}

impl MgSummand {
    /// Build tables covering |nu_i| <= cap. `power` overrides the weight
    /// power (used by the contiguous-relation and asymptotic checks);
    /// `prefactor` multiplies every term (used to divide out asymptotic
    /// leading terms without underflow).
    pub fn build(
        params: &MGParams,
        variant: WeightVariant,
        x: &ExponentPoint,
        power: Complex64,
        prefactor: Scaled,
        cap: i64,
        ctx: &QContext,
    ) -> Self {
        let n = params.n;
        let (up, dn) = match variant {
            WeightVariant::Primal => (&params.alpha_exp, &params.beta_exp),
            WeightVariant::Dual => (&params.beta_exp, &params.alpha_exp),
        };
        let mut num = Vec::with_capacity(n * n);
        let mut den = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                num.push(PochTable::build(Complex64::new(1.0, 0.0) - up[j] + x.xi[i], -cap, cap, ctx));
                den.push(PochTable::build(dn[j] + x.xi[i], -cap, cap, ctx));
            }
        }
        let pow = (0..n)
            .map(|i| PowerTable::build(x.xi[i], power, -cap, cap, ctx))
            .collect();
        let zt = (0..n)
            .map(|i| ValueTable::build(x.xi[i], -cap, cap, ctx))
            .collect();
        let pre = match variant {
            WeightVariant::Primal => prefactor,
            // the dual uses the reversed Vandermonde
            WeightVariant::Dual => prefactor.mul_c(Complex64::new(reversal_sign(n), 0.0)),
        };
        MgSummand { n, num, den, pow, zt, prefactor: pre, capacity: cap }
    }

    pub fn eval(&self, nu: &[i64]) -> Complex64 {
        let mut w = self.weight(nu);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                w = w.mul(self.zt[j].get(nu[j]).sub(self.zt[i].get(nu[i])));
            }
        }
        w.to_complex()
    }

    /// The weight alone, without the Vandermonde factor.
    pub fn weight(&self, nu: &[i64]) -> Scaled {
        let n = self.n;
        let mut w = self.prefactor;
        for i in 0..n {
            w = w.mul(self.pow[i].get(nu[i]));
            for j in 0..n {
                let t = i * n + j;
                w = w.mul(self.num[t].get(nu[i])).div(self.den[t].get(nu[i]));
            }
        }
        w
    }

    /// Coordinate values of the lattice point, as plain complex numbers.
    pub fn point_values(&self, nu: &[i64]) -> Vec<Complex64> {
        (0..self.n).map(|i| self.zt[i].get(nu[i]).to_complex()).collect()
    }
}

fn run_sum(s: &MgSummand, spec: &SumSpec, ctx: &QContext) -> Result<SumResult, FamilyError> {
    let spec = spec.with_max_cutoff(spec.max_cutoff.unwrap_or(i64::MAX).min(s.capacity));
    Ok(jackson_sum(&|nu: &[i64]| s.eval(nu), &spec, ctx)?)
}

/// Bilateral (or truncated, via a fan spec) Milne-Gustafson sum at base `x`.
pub fn mg_lhs(
    params: &MGParams,
    x: &ExponentPoint,
    spec: &SumSpec,
    ctx: &QContext,
) -> Result<SumResult, FamilyError> {
    check_dim(params, x)?;
    let cap = capacity(params.n, spec.cycle == Cycle::Box, ctx);
    let s = MgSummand::build(params, WeightVariant::Primal, x, params.alpha, Scaled::ONE, cap, ctx);
    run_sum(&s, spec, ctx)
}

/// Dual sum at base `x` (reversed Vandermonde, inverted parameter roles,
/// derived power).
pub fn mg_dual_lhs(
    params: &MGParams,
    x: &ExponentPoint,
    spec: &SumSpec,
    ctx: &QContext,
) -> Result<SumResult, FamilyError> {
    check_dim(params, x)?;
    let cap = capacity(params.n, spec.cycle == Cycle::Box, ctx);
    let s = MgSummand::build(
        params,
        WeightVariant::Dual,
        x,
        params.beta_derived(),
        Scaled::ONE,
        cap,
        ctx,
    );
    run_sum(&s, spec, ctx)
}

fn check_dim(params: &MGParams, x: &ExponentPoint) -> Result<(), FamilyError> {
    if x.dim() != params.n {
        return Err(FamilyError::InvalidParams(format!(
            "base point dimension {} does not match family dimension {}",
            x.dim(),
            params.n
        )));
    }
    Ok(())
}

fn one_minus_q_pow(n: usize, ctx: &QContext) -> Scaled {
    Scaled::new(Complex64::new((1.0 - ctx.q()).powi(n as i32), 0.0))
}

fn qq_inf_pow(n: usize, ctx: &QContext) -> Scaled {
    let p = qpoch_inf_exp(Complex64::new(1.0, 0.0), ctx);
    let mut r = Scaled::ONE;
    for _ in 0..n {
        r = r.mul(p);
    }
    r
}

/// Product side of the bilateral evaluation at a generic base `x`.
pub fn mg_rhs(params: &MGParams, x: &ExponentPoint, ctx: &QContext) -> Result<Complex64, FamilyError> {
    check_dim(params, x)?;
    Ok(finish(mg_rhs_scaled(params, x, ctx), "bilateral product side")?)
}

pub(crate) fn mg_rhs_scaled(params: &MGParams, x: &ExponentPoint, ctx: &QContext) -> Scaled {
    let n = params.n;
    let one = Complex64::new(1.0, 0.0);
    let mut r = one_minus_q_pow(n, ctx).mul(qq_inf_pow(n, ctx));
    for i in 0..n {
        for j in 0..n {
            r = r.mul(qpoch_inf_exp(one - params.alpha_exp[i] - params.beta_exp[j], ctx));
        }
    }
    r = r
        .div(qpoch_inf_exp(params.alpha, ctx))
        .div(qpoch_inf_exp(one - params.alpha - params.sum_exponents(), ctx));
    let sx = x.sum_exponents();
    r = r
        .mul(q_power_scaled(params.alpha * sx, ctx))
        .mul(theta_exp(params.alpha + sx + params.sum_beta(), ctx));
    for i in 0..n {
        for j in 0..n {
            r = r.div(theta_exp(x.xi[i] + params.beta_exp[j], ctx));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            r = r.mul(q_power_scaled(x.xi[j], ctx)).mul(theta_exp(x.xi[i] - x.xi[j], ctx));
        }
    }
    r
}

/// Closed form of the truncated sum at `x = a` (the q-binomial theorem for
/// n = 1).
pub fn mg_truncated_rhs(params: &MGParams, ctx: &QContext) -> Result<Complex64, FamilyError> {
    let n = params.n;
    let a = &params.alpha_exp;
    let b = &params.beta_exp;
    let mut r = one_minus_q_pow(n, ctx)
        .mul(q_power_scaled(params.alpha * params.sum_alpha(), ctx))
        .mul(qq_inf_pow(n, ctx))
        .mul(qpoch_inf_exp(params.alpha + params.sum_exponents(), ctx))
        .div(qpoch_inf_exp(params.alpha, ctx));
    for i in 0..n {
        for j in 0..n {
            r = r.div(qpoch_inf_exp(a[i] + b[j], ctx));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            r = r.mul(q_power_scaled(a[j], ctx)).mul(theta_exp(a[i] - a[j], ctx));
        }
    }
    finish(r, "truncated product side")
}

/// Closed form of the truncated dual sum at `x = b`.
pub fn mg_dual_truncated_rhs(params: &MGParams, ctx: &QContext) -> Result<Complex64, FamilyError> {
    let n = params.n;
    let one = Complex64::new(1.0, 0.0);
    let a = &params.alpha_exp;
    let b = &params.beta_exp;
    let mut r = one_minus_q_pow(n, ctx)
        .mul(q_power_scaled(params.beta_derived() * params.sum_beta(), ctx))
        .mul(qq_inf_pow(n, ctx))
        .mul(qpoch_inf_exp(one - params.alpha, ctx))
        .div(qpoch_inf_exp(one - params.alpha - params.sum_exponents(), ctx));
    for i in 0..n {
        for j in 0..n {
            r = r.div(qpoch_inf_exp(a[i] + b[j], ctx));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            r = r.mul(q_power_scaled(b[i], ctx)).mul(theta_exp(b[j] - b[i], ctx));
        }
    }
    finish(r, "dual truncated product side")
}

/// Quasi-periodic regularizer `h(x)`: dividing the bilateral sum by it
/// leaves a holomorphic symmetric function of `x`.
pub fn mg_regularizer_h(
    params: &MGParams,
    x: &ExponentPoint,
    ctx: &QContext,
) -> Result<Complex64, FamilyError> {
    check_dim(params, x)?;
    finish(mg_h_scaled(params, x, ctx), "regularizer h")
}

pub(crate) fn mg_h_scaled(params: &MGParams, x: &ExponentPoint, ctx: &QContext) -> Scaled {
    let n = params.n;
    let mut r = q_power_scaled(params.alpha * x.sum_exponents(), ctx);
    for i in 0..n {
        for j in (i + 1)..n {
            r = r.mul(q_power_scaled(x.xi[j], ctx)).mul(theta_exp(x.xi[i] - x.xi[j], ctx));
        }
    }
    for i in 0..n {
        for j in 0..n {
            r = r.div(theta_exp(params.beta_exp[j] + x.xi[i], ctx));
        }
    }
    r
}

/// Dual regularizer `hbar(x)`.
pub fn mg_dual_regularizer_h(
    params: &MGParams,
    x: &ExponentPoint,
    ctx: &QContext,
) -> Result<Complex64, FamilyError> {
    check_dim(params, x)?;
    finish(mg_hbar_scaled(params, x, ctx), "dual regularizer hbar")
}

pub(crate) fn mg_hbar_scaled(params: &MGParams, x: &ExponentPoint, ctx: &QContext) -> Scaled {
    let n = params.n;
    let mut r = q_power_scaled(params.beta_derived() * x.sum_exponents(), ctx);
    for i in 0..n {
        for j in (i + 1)..n {
            r = r.mul(q_power_scaled(x.xi[i], ctx)).mul(theta_exp(x.xi[j] - x.xi[i], ctx));
        }
    }
    for i in 0..n {
        for j in 0..n {
            r = r.div(theta_exp(params.alpha_exp[j] + x.xi[i], ctx));
        }
    }
    r
}

/// Reflection factor `h(x) / hbar(x^-1)` in its explicit product form:
/// `prod_{i,j} x_i^{1-alpha_j-beta_j} theta(q a_j^-1 x_i) / theta(b_j x_i)`.
pub fn mg_reflection_factor(
    params: &MGParams,
    x: &ExponentPoint,
    ctx: &QContext,
) -> Result<Complex64, FamilyError> {
    check_dim(params, x)?;
    let one = Complex64::new(1.0, 0.0);
    let mut r = Scaled::ONE;
    for i in 0..params.n {
        for j in 0..params.n {
            r = r
                .mul(q_power_scaled(
                    x.xi[i] * (one - params.alpha_exp[j] - params.beta_exp[j]),
                    ctx,
                ))
                .mul(theta_exp(one - params.alpha_exp[j] + x.xi[i], ctx))
                .div(theta_exp(params.beta_exp[j] + x.xi[i], ctx));
        }
    }
    finish(r, "reflection factor")
}

/// Connection coefficient between the regularized sums at bases `x` and `y`:
/// a ratio of two theta values, invariant under integer shifts of either
/// base's exponents and of `alpha`.
pub fn mg_connection_coeff(
    params: &MGParams,
    x: &ExponentPoint,
    y: &ExponentPoint,
    ctx: &QContext,
) -> Result<Complex64, FamilyError> {
    check_dim(params, x)?;
    check_dim(params, y)?;
    let num = theta_exp(params.alpha + x.sum_exponents() + params.sum_beta(), ctx);
    let den = theta_exp(params.alpha + y.sum_exponents() + params.sum_beta(), ctx);
    finish(num.div(den), "connection coefficient")
}

/// The x-independent value of the constant-term (Macdonald-type) sum.
pub fn mg_macdonald_constant(params: &MGParams, ctx: &QContext) -> Result<Complex64, FamilyError> {
    let n = params.n;
    let one = Complex64::new(1.0, 0.0);
    let mut r = one_minus_q_pow(n, ctx).mul(qq_inf_pow(n, ctx));
    for i in 0..n {
        for j in 0..n {
            r = r.mul(qpoch_inf_exp(one - params.alpha_exp[i] - params.beta_exp[j], ctx));
        }
    }
    r = r
        .div(qpoch_inf_exp(params.alpha, ctx))
        .div(qpoch_inf_exp(params.beta_derived(), ctx));
    finish(r, "constant-term value")
}

/// One term of the constant-term integrand at lattice offset `nu` from
/// `base` (the weight divided by its quasi-periodic envelope).
pub fn mg_macdonald_integrand(
    params: &MGParams,
    base: &ExponentPoint,
    nu: &[i64],
    ctx: &QContext,
) -> Result<Complex64, FamilyError> {
    check_dim(params, base)?;
    let n = params.n;
    let one = Complex64::new(1.0, 0.0);
    let zeta: Vec<Complex64> = (0..n).map(|i| base.xi[i] + nu[i] as f64).collect();
    let zsum: Complex64 = zeta.iter().sum();
    let mut r = Scaled::ONE;
    for i in 0..n {
        for j in 0..n {
            r = r
                .mul(qpoch_inf_exp(one - params.alpha_exp[j] + zeta[i], ctx))
                .mul(qpoch_inf_exp(one - params.beta_exp[j] - zeta[i], ctx));
            if i != j {
                r = r.div(qpoch_inf_exp(one + zeta[i] - zeta[j], ctx));
            }
        }
    }
    r = r
        .div(qpoch_inf_exp(params.beta_derived() + params.sum_alpha() - zsum, ctx))
        .div(qpoch_inf_exp(params.alpha + params.sum_beta() + zsum, ctx));
    finish(r, "constant-term integrand")
}

/// Table-backed constant-term summand.
pub struct MgMacdonaldSummand {
    n: usize,
    num_up: Vec<PochTable>,
    num_dn: Vec<PochTable>,
    cross: Vec<Option<PochTable>>,
    den_lo: PochTable,
    den_hi: PochTable,
    pub capacity: i64,
}

impl MgMacdonaldSummand {
    pub fn build(params: &MGParams, x: &ExponentPoint, cap: i64, ctx: &QContext) -> Self {
        let n = params.n;
        let one = Complex64::new(1.0, 0.0);
        let mut num_up = Vec::with_capacity(n * n);
        let mut num_dn = Vec::with_capacity(n * n);
        let mut cross = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                num_up.push(PochTable::build(one - params.alpha_exp[j] + x.xi[i], -cap, cap, ctx));
                num_dn.push(PochTable::build(one - params.beta_exp[j] - x.xi[i], -cap, cap, ctx));
                cross.push(if i == j {
                    None
                } else {
                    Some(PochTable::build(one + x.xi[i] - x.xi[j], -2 * cap, 2 * cap, ctx))
                });
            }
        }
        let sx = x.sum_exponents();
        let ncap = n as i64 * cap;
        let den_lo = PochTable::build(
            params.beta_derived() + params.sum_alpha() - sx,
            -ncap,
            ncap,
            ctx,
        );
        let den_hi = PochTable::build(params.alpha + params.sum_beta() + sx, -ncap, ncap, ctx);
        MgMacdonaldSummand { n, num_up, num_dn, cross, den_lo, den_hi, capacity: cap }
    }

    pub fn eval(&self, nu: &[i64]) -> Complex64 {
        let n = self.n;
        let s: i64 = nu.iter().sum();
        let mut w = Scaled::ONE;
        for i in 0..n {
            for j in 0..n {
                let t = i * n + j;
                w = w.mul(self.num_up[t].get(nu[i])).mul(self.num_dn[t].get(-nu[i]));
                if let Some(c) = &self.cross[t] {
                    w = w.div(c.get(nu[i] - nu[j]));
                }
            }
        }
        w = w.div(self.den_lo.get(-s)).div(self.den_hi.get(s));
        w.to_complex()
    }
}

/// Bilateral constant-term sum at base `x`; equals
/// [`mg_macdonald_constant`] independently of the base.
pub fn mg_macdonald_sum(
    params: &MGParams,
    x: &ExponentPoint,
    spec: &SumSpec,
    ctx: &QContext,
) -> Result<SumResult, FamilyError> {
    check_dim(params, x)?;
    let cap = capacity(params.n, spec.cycle == Cycle::Box, ctx);
    let s = MgMacdonaldSummand::build(params, x, cap, ctx);
    let spec = spec.with_max_cutoff(spec.max_cutoff.unwrap_or(i64::MAX).min(cap));
    Ok(jackson_sum(&|nu: &[i64]| s.eval(nu), &spec, ctx)?)
}

/// Weight shift ratio `T_{z_i} Phi / Phi` as an exact rational expression,
/// `q^alpha prod_j (1 - b_j z_i)/(1 - q a_j^-1 z_i)`.
pub fn mg_shift_ratio(params: &MGParams, z: &[Complex64], i: usize, ctx: &QContext) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut r = q_power(params.alpha, ctx);
    for j in 0..params.n {
        let b = q_power(params.beta_exp[j], ctx);
        let qa_inv = q_power(one - params.alpha_exp[j], ctx);
        r *= (one - b * z[i]) / (one - qa_inv * z[i]);
    }
    r
}

/// Dual-weight shift ratio `T_{z_i} Phibar / Phibar`.
pub fn mg_dual_shift_ratio(
    params: &MGParams,
    z: &[Complex64],
    i: usize,
    ctx: &QContext,
) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut r = q_power(params.beta_derived(), ctx);
    for j in 0..params.n {
        let a = q_power(params.alpha_exp[j], ctx);
        let qb_inv = q_power(one - params.beta_exp[j], ctx);
        r *= (one - a * z[i]) / (one - qb_inv * z[i]);
    }
    r
}

/// Coefficient of the contiguous relation in `alpha`: the sum at `alpha`
/// equals this times the sum at `alpha + 1`.
pub fn mg_rec_alpha_coeff(params: &MGParams, ctx: &QContext) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let top = one - q_power(params.alpha + params.sum_exponents(), ctx);
    let bot = q_power(params.sum_alpha(), ctx) * (one - q_power(params.alpha, ctx));
    top / bot
}

/// Coefficient of the dual contiguous relation: the dual sum at `alpha`
/// equals this times the dual sum at `alpha - 1`.
pub fn mg_dual_rec_alpha_coeff(params: &MGParams, ctx: &QContext) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let top = one - q_power(one - params.alpha, ctx);
    let bot = q_power(params.sum_beta(), ctx)
        * (one - q_power(one - params.alpha - params.sum_exponents(), ctx));
    top / bot
}

/// Leading term of the truncated sum at `x = a` as the weight power grows by
/// `shift`: `(1-q)^n (a_1..a_n)^{alpha+shift} Delta(a) prod_{i,j}
/// (q a_i/a_j)_inf / (a_i b_j)_inf`.
pub fn mg_asym_leading(params: &MGParams, shift: f64, ctx: &QContext) -> Scaled {
    let n = params.n;
    let one = Complex64::new(1.0, 0.0);
    let alpha_n = params.alpha + shift;
    let mut r = one_minus_q_pow(n, ctx).mul(q_power_scaled(alpha_n * params.sum_alpha(), ctx));
    let zs: Vec<Scaled> = params
        .alpha_exp
        .iter()
        .map(|&t| q_power_scaled(t, ctx))
        .collect();
    r = r.mul(vandermonde(&zs));
    for i in 0..n {
        for j in 0..n {
            r = r
                .mul(qpoch_inf_exp(one + params.alpha_exp[i] - params.alpha_exp[j], ctx))
                .div(qpoch_inf_exp(params.alpha_exp[i] + params.beta_exp[j], ctx));
        }
    }
    r
}

/// Leading term of the truncated dual sum at `x = b` as the power drops by
/// `shift`.
pub fn mg_dual_asym_leading(params: &MGParams, shift: f64, ctx: &QContext) -> Scaled {
    let n = params.n;
    let one = Complex64::new(1.0, 0.0);
    let beta_n = params.beta_derived() + shift;
    let mut r = one_minus_q_pow(n, ctx).mul(q_power_scaled(beta_n * params.sum_beta(), ctx));
    let zs: Vec<Scaled> = params
        .beta_exp
        .iter()
        .map(|&t| q_power_scaled(t, ctx))
        .collect();
    r = r.mul(vandermonde(&zs)).mul_c(Complex64::new(reversal_sign(n), 0.0));
    for i in 0..n {
        for j in 0..n {
            r = r
                .mul(qpoch_inf_exp(one + params.beta_exp[i] - params.beta_exp[j], ctx))
                .div(qpoch_inf_exp(params.alpha_exp[i] + params.beta_exp[j], ctx));
        }
    }
    r
}

/// Fan-sum ratio `I(alpha+N; a) / leading(N)`; approaches 1 as N grows. The
/// division happens inside the summand so nothing underflows.
pub fn mg_asym_ratio(params: &MGParams, n_shift: i64, ctx: &QContext) -> Result<SumResult, FamilyError> {
    let lead = mg_asym_leading(params, n_shift as f64, ctx);
    let cap = capacity(params.n, false, ctx);
    let s = MgSummand::build(
        params,
        WeightVariant::Primal,
        &params.a_point(),
        params.alpha + n_shift as f64,
        lead.recip(),
        cap,
        ctx,
    );
    run_sum(&s, &SumSpec::fan(params.n, ctx.lattice_cutoff), ctx)
}

/// Fan-sum ratio for the dual direction, `Ibar(alpha-N; b) / leading(N)`.
pub fn mg_dual_asym_ratio(
    params: &MGParams,
    n_shift: i64,
    ctx: &QContext,
) -> Result<SumResult, FamilyError> {
    let lead = mg_dual_asym_leading(params, n_shift as f64, ctx);
    let cap = capacity(params.n, false, ctx);
    // dual power at alpha - N is beta + N
    let s = MgSummand::build(
        params,
        WeightVariant::Dual,
        &params.b_point(),
        params.beta_derived() + n_shift as f64,
        lead.recip(),
        cap,
        ctx,
    );
    run_sum(&s, &SumSpec::fan(params.n, ctx.lattice_cutoff), ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> QContext {
        QContext::new(0.5).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn params_n2() -> MGParams {
        MGParams::new(
            vec![c(0.06), c(0.11)],
            vec![c(0.09), c(0.13)],
            c(0.32),
        )
        .unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1.0)
    }

    #[test]
    fn constructor_rejects_nonconvergent_windows() {
        // example with exponent sum 1.8 and alpha 0.7: outside the window
        assert!(MGParams::new(
            vec![c(0.3), c(0.5)],
            vec![c(0.4), c(0.6)],
            c(0.7),
        )
        .is_err());
        assert!(MGParams::new(vec![c(0.3)], vec![c(0.4)], c(-0.1)).is_err());
    }

    #[test]
    fn n1_box_equals_ramanujan_product() {
        let ctx = ctx();
        let p = MGParams::new(vec![c(0.15)], vec![c(0.2)], c(0.3)).unwrap();
        let x = ExponentPoint::real(&[0.27]);
        let lhs = mg_lhs(&p, &x, &SumSpec::boxed(1, 16), &ctx).unwrap();
        let rhs = mg_rhs(&p, &x, &ctx).unwrap();
        assert!(lhs.converged);
        assert!(rel(lhs.value, rhs) < 1e-9, "dev {}", rel(lhs.value, rhs));
    }

    #[test]
    fn n2_box_equals_product() {
        let ctx = ctx();
        let p = params_n2();
        let x = ExponentPoint::real(&[0.21, 0.55]);
        let lhs = mg_lhs(&p, &x, &SumSpec::boxed(2, 16), &ctx).unwrap();
        let rhs = mg_rhs(&p, &x, &ctx).unwrap();
        assert!(rel(lhs.value, rhs) < 1e-8, "dev {}", rel(lhs.value, rhs));
    }

    #[test]
    fn truncated_fan_matches_closed_form() {
        let ctx = ctx();
        let p = params_n2();
        let fan = mg_lhs(&p, &p.a_point(), &SumSpec::fan(2, 16), &ctx).unwrap();
        let rhs = mg_truncated_rhs(&p, &ctx).unwrap();
        assert!(rel(fan.value, rhs) < 1e-9);
        let dfan = mg_dual_lhs(&p, &p.b_point(), &SumSpec::fan(2, 16), &ctx).unwrap();
        let drhs = mg_dual_truncated_rhs(&p, &ctx).unwrap();
        assert!(rel(dfan.value, drhs) < 1e-9);
    }

    #[test]
    fn rhs_vanishes_for_coinciding_coordinates() {
        let ctx = ctx();
        let p = params_n2();
        let x = ExponentPoint::real(&[0.4, 0.4]);
        let v = mg_rhs(&p, &x, &ctx).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn truncated_rhs_vanishes_for_coinciding_parameters() {
        let ctx = ctx();
        let p = MGParams::new(vec![c(0.07), c(0.07)], vec![c(0.09), c(0.13)], c(0.32)).unwrap();
        assert!(mg_truncated_rhs(&p, &ctx).unwrap().norm() < 1e-12);
    }

    #[test]
    fn regularizer_quasi_periodicity() {
        // T_{x_i} h / h = -q^alpha x_1..x_n b_1..b_n
        let ctx = ctx();
        let p = params_n2();
        let x = ExponentPoint::real(&[0.23, 0.61]);
        for i in 0..2 {
            let shifted = x.shifted(i, 1.0);
            let lhs = mg_regularizer_h(&p, &shifted, &ctx).unwrap()
                / mg_regularizer_h(&p, &x, &ctx).unwrap();
            let rhs = -q_power(p.alpha + x.sum_exponents() + p.sum_beta(), &ctx);
            assert!(rel(lhs, rhs) < 1e-10, "i={i}: {}", rel(lhs, rhs));
        }
    }

    #[test]
    fn regularizer_pole_at_inverse_b() {
        let ctx = ctx();
        let p = params_n2();
        // x_1 = b_1^{-1}: theta(b_1 x_1) = theta(1) = 0 in the denominator
        let x = ExponentPoint::new(vec![-p.beta_exp[0], c(0.5)]);
        assert!(matches!(
            mg_regularizer_h(&p, &x, &ctx),
            Err(FamilyError::NonFinite(_))
        ));
    }

    #[test]
    fn regularizer_skew_symmetry() {
        let ctx = ctx();
        let p = params_n2();
        let x = ExponentPoint::real(&[0.23, 0.61]);
        let h = mg_regularizer_h(&p, &x, &ctx).unwrap();
        let hs = mg_regularizer_h(&p, &x.swapped(0, 1), &ctx).unwrap();
        assert!(rel(hs, -h) < 1e-12);
    }

    #[test]
    fn duality_involution() {
        let p = params_n2();
        let dd = p.dual_params().unwrap().dual_params().unwrap();
        for i in 0..p.n {
            assert!((dd.alpha_exp[i] - p.alpha_exp[i]).norm() < 1e-15);
            assert!((dd.beta_exp[i] - p.beta_exp[i]).norm() < 1e-15);
        }
        assert!((dd.alpha - p.alpha).norm() < 1e-15);
    }

    #[test]
    fn parameter_swap_maps_dual_to_primal_up_to_sign() {
        let ctx = ctx();
        let p = params_n2();
        let x = ExponentPoint::real(&[0.21, 0.55]);
        let swapped = p.dual_params().unwrap();
        let lhs = mg_lhs(&swapped, &x, &SumSpec::boxed(2, 16), &ctx).unwrap();
        let rhs = mg_dual_lhs(&p, &x, &SumSpec::boxed(2, 16), &ctx).unwrap();
        let sign = reversal_sign(2);
        assert!(rel(lhs.value, rhs.value * sign) < 1e-8);
    }

    #[test]
    fn macdonald_integrand_matches_table_summand() {
        let ctx = ctx();
        let p = params_n2();
        let x = ExponentPoint::real(&[0.21, 0.55]);
        let s = MgMacdonaldSummand::build(&p, &x, 8, &ctx);
        for nu in [[0i64, 0], [3, -2], [-5, 7], [-8, -8]] {
            let a = s.eval(&nu);
            let b = mg_macdonald_integrand(&p, &x, &nu, &ctx).unwrap();
            assert!(rel(a, b) < 1e-11, "nu={nu:?}");
        }
    }
}
