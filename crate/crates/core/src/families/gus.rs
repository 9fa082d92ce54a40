//! Gustafson A_n sums.
//!
//! An (n+1)-variable weight `prod_{i,j<=n+1} (q a_j^-1 z_i)_inf/(b_j z_i)_inf`
//! restricted to the balance surface `z_1...z_{n+1} = d` and summed over the
//! n-dimensional q-cycle through `x` (the last coordinate is derived). The
//! regularization by the quasi-periodic factor `h(x)` is a constant in `x`,
//! and that constant has an explicit product form extending the
//! Milne-Gustafson evaluation; the special case `d = a_1...a_{n+1}` is
//! Milne's U(n) fundamental-theorem product, and stripping all parameters
//! leaves the Macdonald identity sum `(1-q)^n (q)_inf^n`.

use num_complex::Complex64;

use super::{capacity, finish, require_margin, FamilyError};
use crate::lattice::{jackson_sum, Cycle, SumResult, SumSpec};
use crate::qcore::{
    q_power, q_power_scaled, qpoch_inf_exp, theta_exp, ExponentPoint, PochTable, PowerTable,
    QContext, ValueTable,
};
use crate::scaled::Scaled;

/// Parameters as q-exponents: n+1 pairs plus the balance exponent `d_exp`
/// with `d = q^{d_exp}`. Convergence requires `Re(sum of all exponents) < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GUSParams {
    pub n: usize,
    pub alpha_exp: Vec<Complex64>,
    pub beta_exp: Vec<Complex64>,
    pub d_exp: Complex64,
}

impl GUSParams {
    pub fn new(
        alpha_exp: Vec<Complex64>,
        beta_exp: Vec<Complex64>,
        d_exp: Complex64,
    ) -> Result<Self, FamilyError> {
        let m = alpha_exp.len();
        if m < 2 || beta_exp.len() != m {
            return Err(FamilyError::InvalidParams(
                "need n+1 >= 2 parameter exponents in each family".into(),
            ));
        }
        let p = GUSParams { n: m - 1, alpha_exp, beta_exp, d_exp };
        require_margin(
            1.0 - p.sum_exponents().re,
            "convergence (Re of total exponent sum < 1)",
        )?;
        Ok(p)
    }

    /// Same parameter pairs with the balance constant pinned to
    /// `d = a_1 ... a_{n+1}` (the Milne special case).
    pub fn milne(alpha_exp: Vec<Complex64>, beta_exp: Vec<Complex64>) -> Result<Self, FamilyError> {
        let d: Complex64 = alpha_exp.iter().sum();
        Self::new(alpha_exp, beta_exp, d)
    }

    pub fn pairs(&self) -> usize {
        self.n + 1
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

    pub fn shift_alpha(&self, j: usize, k: f64) -> Result<Self, FamilyError> {
        let mut a = self.alpha_exp.clone();
        a[j] += k;
        Self::new(a, self.beta_exp.clone(), self.d_exp)
    }

    pub fn shift_beta(&self, j: usize, k: f64) -> Result<Self, FamilyError> {
        let mut b = self.beta_exp.clone();
        b[j] += k;
        Self::new(self.alpha_exp.clone(), b, self.d_exp)
    }

    /// The n-dimensional truncating base `x = (a_1, ..., a_n)`.
    pub fn a_point(&self) -> ExponentPoint {
        ExponentPoint::new(self.alpha_exp[..self.n].to_vec())
    }

    /// Exponent of the derived last coordinate at base `x`, offset `s` in
    /// the total lattice degree: `d_exp - sum(x) - s`. The balance constraint
    /// `z_1...z_{n+1} = d` holds exactly in this bookkeeping.
    pub fn last_exponent(&self, x: &ExponentPoint, s: i64) -> Complex64 {
        self.d_exp - x.sum_exponents() - s as f64
    }
}

fn check_dim(params: &GUSParams, x: &ExponentPoint) -> Result<(), FamilyError> {
    if x.dim() != params.n {
        return Err(FamilyError::InvalidParams(format!(
            "base point dimension {} does not match summation dimension {}",
            x.dim(),
            params.n
        )));
    }
    Ok(())
}

/// Table-backed summand for the balanced weight times the full
/// (n+1)-variable Vandermonde factor.
pub struct GusSummand {
    n: usize,
    m: usize,
    num: Vec<PochTable>,
    den: Vec<PochTable>,
    num_last: Vec<PochTable>,
    den_last: Vec<PochTable>,
    zt: Vec<ValueTable>,
    z_last: ValueTable,
    prefactor: Scaled,
    pub capacity: i64,
}

impl GusSummand {
    pub fn build(
        params: &GUSParams,
        x: &ExponentPoint,
        prefactor: Scaled,
        cap: i64,
        ctx: &QContext,
    ) -> Self {
        let n = params.n;
        let m = params.pairs();
        let one = Complex64::new(1.0, 0.0);
        let mut num = Vec::with_capacity(n * m);
        let mut den = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                num.push(PochTable::build(one - params.alpha_exp[j] + x.xi[i], -cap, cap, ctx));
                den.push(PochTable::build(params.beta_exp[j] + x.xi[i], -cap, cap, ctx));
            }
        }
        let ncap = n as i64 * cap;
        let t_last = params.last_exponent(x, 0);
        let num_last = (0..m)
            .map(|j| PochTable::build(one - params.alpha_exp[j] + t_last, -ncap, ncap, ctx))
            .collect();
        let den_last = (0..m)
            .map(|j| PochTable::build(params.beta_exp[j] + t_last, -ncap, ncap, ctx))
            .collect();
        let zt = (0..n)
            .map(|i| ValueTable::build(x.xi[i], -cap, cap, ctx))
            .collect();
        let z_last = ValueTable::build(t_last, -ncap, ncap, ctx);
        GusSummand { n, m, num, den, num_last, den_last, zt, z_last, prefactor, capacity: cap }
    }

    pub fn eval(&self, nu: &[i64]) -> Complex64 {
        let s: i64 = nu.iter().sum();
        let mut w = self.weight(nu);
        let z_last = self.z_last.get(-s);
        for i in 0..self.n {
            let zi = self.zt[i].get(nu[i]);
            for j in (i + 1)..self.n {
                w = w.mul(self.zt[j].get(nu[j]).sub(zi));
            }
            w = w.mul(z_last.sub(zi));
        }
        w.to_complex()
    }

    /// The balanced weight alone, without the Vandermonde factor.
    pub fn weight(&self, nu: &[i64]) -> Scaled {
        let s: i64 = nu.iter().sum();
        let mut w = self.prefactor;
        for i in 0..self.n {
            for j in 0..self.m {
                let t = i * self.m + j;
                w = w.mul(self.num[t].get(nu[i])).div(self.den[t].get(nu[i]));
            }
        }
        for j in 0..self.m {
            w = w.mul(self.num_last[j].get(-s)).div(self.den_last[j].get(-s));
        }
        w
    }

    /// The full coordinate tuple including the derived last coordinate.
    pub fn tuple_values(&self, nu: &[i64]) -> Vec<Complex64> {
        let s: i64 = nu.iter().sum();
        let mut zs: Vec<Complex64> =
            (0..self.n).map(|i| self.zt[i].get(nu[i]).to_complex()).collect();
        zs.push(self.z_last.get(-s).to_complex());
        zs
    }
}

fn run<F: Fn(&[i64]) -> Complex64 + Sync>(
    f: F,
    cap: i64,
    spec: &SumSpec,
    ctx: &QContext,
) -> Result<SumResult, FamilyError> {
    let spec = spec.with_max_cutoff(spec.max_cutoff.unwrap_or(i64::MAX).min(cap));
    Ok(jackson_sum(&f, &spec, ctx)?)
}

/// The balanced bilateral sum `K` at base `x`.
pub fn gus_lhs(
    params: &GUSParams,
    x: &ExponentPoint,
    spec: &SumSpec,
    ctx: &QContext,
) -> Result<SumResult, FamilyError> {
    check_dim(params, x)?;
    let cap = capacity(params.n, spec.cycle == Cycle::Box, ctx);
    let s = GusSummand::build(params, x, Scaled::ONE, cap, ctx);
    run(|nu: &[i64]| s.eval(nu), cap, spec, ctx)
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

/// Regularizer `h(x)` in the form with the derived coordinate spelled out.
pub fn gus_regularizer_h(
    params: &GUSParams,
    x: &ExponentPoint,
    ctx: &QContext,
) -> Result<Complex64, FamilyError> {
    check_dim(params, x)?;
    finish(gus_h_scaled(params, x, ctx), "regularizer h")
}

pub(crate) fn gus_h_scaled(params: &GUSParams, x: &ExponentPoint, ctx: &QContext) -> Scaled {
    let n = params.n;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut r = Scaled::new(Complex64::new(sign, 0.0));
    for i in 0..n {
        for j in (i + 1)..n {
            r = r.mul(q_power_scaled(x.xi[j], ctx)).mul(theta_exp(x.xi[i] - x.xi[j], ctx));
        }
    }
    for i in 0..n {
        for j in 0..params.pairs() {
            r = r.div(theta_exp(params.beta_exp[j] + x.xi[i], ctx));
        }
    }
    let t_last = params.last_exponent(x, 0);
    for i in 0..n {
        r = r
            .mul(q_power_scaled(x.xi[i], ctx))
            .mul(theta_exp(t_last - x.xi[i], ctx));
    }
    for j in 0..params.pairs() {
        r = r.div(theta_exp(params.beta_exp[j] + t_last, ctx));
    }
    r
}

/// Regularizer in the symmetric presentation over all n+1 coordinates
/// (including the derived one); equal to [`gus_regularizer_h`].
pub fn gus_regularizer_h_symmetric(
    params: &GUSParams,
    x: &ExponentPoint,
    ctx: &QContext,
) -> Result<Complex64, FamilyError> {
    check_dim(params, x)?;
    let mut xs = x.xi.clone();
    xs.push(params.last_exponent(x, 0));
    let m = params.pairs();
    let mut r = Scaled::ONE;
    for i in 0..m {
        for j in (i + 1)..m {
            r = r.mul(q_power_scaled(xs[j], ctx)).mul(theta_exp(xs[i] - xs[j], ctx));
        }
    }
    for i in 0..m {
        for j in 0..m {
            r = r.div(theta_exp(params.beta_exp[j] + xs[i], ctx));
        }
    }
    finish(r, "regularizer h (symmetric form)")
}

/// The x-independent value of the regularized sum `K(x)/h(x)`.
pub fn gus_constant_rhs(params: &GUSParams, ctx: &QContext) -> Result<Complex64, FamilyError> {
    let m = params.pairs();
    let one = Complex64::new(1.0, 0.0);
    let mut r = one_minus_q_pow(params.n, ctx)
        .mul(qq_inf_pow(params.n, ctx))
        .mul(qpoch_inf_exp(one - params.sum_alpha() + params.d_exp, ctx))
        .mul(qpoch_inf_exp(one - params.sum_beta() - params.d_exp, ctx))
        .div(qpoch_inf_exp(one - params.sum_exponents(), ctx));
    for i in 0..m {
        for j in 0..m {
            r = r.mul(qpoch_inf_exp(one - params.alpha_exp[i] - params.beta_exp[j], ctx));
        }
    }
    finish(r, "regularized constant")
}

/// Milne's U(n) fundamental-theorem product: the truncated sum `K(a)` when
/// the balance constant is `d = a_1...a_{n+1}`.
pub fn gus_milne_truncated_rhs(params: &GUSParams, ctx: &QContext) -> Result<Complex64, FamilyError> {
    let m = params.pairs();
    let mut r = one_minus_q_pow(params.n, ctx).mul(qq_inf_pow(params.n + 1, ctx));
    for i in 0..m {
        for j in (i + 1)..m {
            r = r
                .mul(q_power_scaled(params.alpha_exp[j], ctx))
                .mul(theta_exp(params.alpha_exp[i] - params.alpha_exp[j], ctx));
        }
    }
    for i in 0..m {
        for j in 0..m {
            r = r.div(qpoch_inf_exp(params.alpha_exp[i] + params.beta_exp[j], ctx));
        }
    }
    finish(r, "Milne product")
}

/// The quasi-periodic factor `k` splitting the weight as `Phi = k * Phitilde`,
/// evaluated at the lattice point `(x, nu)`; a pure function of the derived
/// coordinate.
pub fn gus_k_factor_point(
    params: &GUSParams,
    x: &ExponentPoint,
    nu: &[i64],
    ctx: &QContext,
) -> Scaled {
    let s: i64 = nu.iter().sum();
    let t_last = params.last_exponent(x, s);
    let one = Complex64::new(1.0, 0.0);
    let mut r = Scaled::ONE;
    for j in 0..params.pairs() {
        r = r
            .mul(q_power_scaled(
                (one - params.alpha_exp[j] - params.beta_exp[j]) * t_last,
                ctx,
            ))
            .mul(theta_exp(one - params.alpha_exp[j] + t_last, ctx))
            .div(theta_exp(params.beta_exp[j] + t_last, ctx));
    }
    r
}

/// `k` at the base point itself (lattice offset zero).
pub fn gus_k_factor(
    params: &GUSParams,
    x: &ExponentPoint,
    ctx: &QContext,
) -> Result<Complex64, FamilyError> {
    check_dim(params, x)?;
    finish(gus_k_factor_point(params, x, &vec![0; params.n], ctx), "k factor")
}

/// `k` rewritten through the product of the first n coordinates; equal to
/// [`gus_k_factor`].
pub fn gus_k_factor_alt(
    params: &GUSParams,
    x: &ExponentPoint,
    ctx: &QContext,
) -> Result<Complex64, FamilyError> {
    check_dim(params, x)?;
    let one = Complex64::new(1.0, 0.0);
    let u = x.sum_exponents() - params.d_exp;
    let mut r = Scaled::ONE;
    for j in 0..params.pairs() {
        r = r
            .mul(theta_exp(params.alpha_exp[j] + u, ctx))
            .div(q_power_scaled((one - params.alpha_exp[j] - params.beta_exp[j]) * u, ctx))
            .div(theta_exp(one - params.beta_exp[j] + u, ctx));
    }
    finish(r, "k factor (alternate form)")
}

/// The balanced weight `Phi` (without the Vandermonde factor) at lattice
/// offset `nu` from `x`, evaluated directly from exponents.
pub fn gus_weight_point(
    params: &GUSParams,
    x: &ExponentPoint,
    nu: &[i64],
    ctx: &QContext,
) -> Scaled {
    let one = Complex64::new(1.0, 0.0);
    let s: i64 = nu.iter().sum();
    let t_last = params.last_exponent(x, s);
    let mut r = Scaled::ONE;
    for j in 0..params.pairs() {
        for i in 0..params.n {
            let zi = x.xi[i] + nu[i] as f64;
            r = r
                .mul(qpoch_inf_exp(one - params.alpha_exp[j] + zi, ctx))
                .div(qpoch_inf_exp(params.beta_exp[j] + zi, ctx));
        }
        r = r
            .mul(qpoch_inf_exp(one - params.alpha_exp[j] + t_last, ctx))
            .div(qpoch_inf_exp(params.beta_exp[j] + t_last, ctx));
    }
    r
}

/// The deformed weight `Phitilde` at lattice offset `nu` from `x`.
pub fn gus_tilde_weight_point(
    params: &GUSParams,
    x: &ExponentPoint,
    nu: &[i64],
    ctx: &QContext,
) -> Scaled {
    let one = Complex64::new(1.0, 0.0);
    let m = params.pairs();
    let s: i64 = nu.iter().sum();
    let t_inv = x.sum_exponents() - params.d_exp + s as f64;
    let power = Complex64::new(m as f64, 0.0) - params.sum_exponents();
    let mut r = q_power_scaled(power * t_inv, ctx);
    for j in 0..m {
        for i in 0..params.n {
            let zi = x.xi[i] + nu[i] as f64;
            r = r
                .mul(qpoch_inf_exp(one - params.alpha_exp[j] + zi, ctx))
                .div(qpoch_inf_exp(params.beta_exp[j] + zi, ctx));
        }
        r = r
            .mul(qpoch_inf_exp(one - params.beta_exp[j] + t_inv, ctx))
            .div(qpoch_inf_exp(params.alpha_exp[j] + t_inv, ctx));
    }
    r
}

/// Table-backed summand for the deformed weight times the Vandermonde factor.
pub struct GusTildeSummand {
    n: usize,
    m: usize,
    num: Vec<PochTable>,
    den: Vec<PochTable>,
    num_last: Vec<PochTable>,
    den_last: Vec<PochTable>,
    pow: PowerTable,
    zt: Vec<ValueTable>,
    z_last: ValueTable,
    prefactor: Scaled,
    pub capacity: i64,
}

impl GusTildeSummand {
    pub fn build(
        params: &GUSParams,
        x: &ExponentPoint,
        prefactor: Scaled,
        cap: i64,
        ctx: &QContext,
    ) -> Self {
        let n = params.n;
        let m = params.pairs();
        let one = Complex64::new(1.0, 0.0);
        let mut num = Vec::with_capacity(n * m);
        let mut den = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                num.push(PochTable::build(one - params.alpha_exp[j] + x.xi[i], -cap, cap, ctx));
                den.push(PochTable::build(params.beta_exp[j] + x.xi[i], -cap, cap, ctx));
            }
        }
        let ncap = n as i64 * cap;
        let t_inv = x.sum_exponents() - params.d_exp;
        let num_last = (0..m)
            .map(|j| PochTable::build(one - params.beta_exp[j] + t_inv, -ncap, ncap, ctx))
            .collect();
        let den_last = (0..m)
            .map(|j| PochTable::build(params.alpha_exp[j] + t_inv, -ncap, ncap, ctx))
            .collect();
        let power = Complex64::new(m as f64, 0.0) - params.sum_exponents();
        let pow = PowerTable::build(t_inv, power, -ncap, ncap, ctx);
        let zt = (0..n)
            .map(|i| ValueTable::build(x.xi[i], -cap, cap, ctx))
            .collect();
        let z_last = ValueTable::build(params.last_exponent(x, 0), -ncap, ncap, ctx);
        GusTildeSummand {
            n,
            m,
            num,
            den,
            num_last,
            den_last,
            pow,
            zt,
            z_last,
            prefactor,
            capacity: cap,
        }
    }

    pub fn eval(&self, nu: &[i64]) -> Complex64 {
        let s: i64 = nu.iter().sum();
        let mut w = self.prefactor.mul(self.pow.get(s));
        for i in 0..self.n {
            for j in 0..self.m {
                let t = i * self.m + j;
                w = w.mul(self.num[t].get(nu[i])).div(self.den[t].get(nu[i]));
            }
        }
        for j in 0..self.m {
            w = w.mul(self.num_last[j].get(s)).div(self.den_last[j].get(s));
        }
        let z_last = self.z_last.get(-s);
        for i in 0..self.n {
            let zi = self.zt[i].get(nu[i]);
            for j in (i + 1)..self.n {
                w = w.mul(self.zt[j].get(nu[j]).sub(zi));
            }
            w = w.mul(z_last.sub(zi));
        }
        w.to_complex()
    }
}

/// The deformed sum `Ktilde` at base `x`; `K(x) = k(x) Ktilde(x)`.
pub fn gus_tilde_lhs(
    params: &GUSParams,
    x: &ExponentPoint,
    spec: &SumSpec,
    ctx: &QContext,
) -> Result<SumResult, FamilyError> {
    check_dim(params, x)?;
    let cap = capacity(params.n, spec.cycle == Cycle::Box, ctx);
    let s = GusTildeSummand::build(params, x, Scaled::ONE, cap, ctx);
    run(|nu: &[i64]| s.eval(nu), cap, spec, ctx)
}

/// Table-backed summand of the parameter-free Macdonald identity sum.
pub struct GusK0Summand {
    n: usize,
    cross: Vec<Option<PochTable>>,
    cross_last_up: Vec<PochTable>,
    cross_last_dn: Vec<PochTable>,
    pub capacity: i64,
}

impl GusK0Summand {
    pub fn build(params: &GUSParams, x: &ExponentPoint, cap: i64, ctx: &QContext) -> Self {
        let n = params.n;
        let one = Complex64::new(1.0, 0.0);
        let mut cross = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                cross.push(if i == j {
                    None
                } else {
                    Some(PochTable::build(one + x.xi[i] - x.xi[j], -2 * cap, 2 * cap, ctx))
                });
            }
        }
        let t_last = params.last_exponent(x, 0);
        let wide = (n as i64 + 1) * cap;
        let cross_last_up = (0..n)
            .map(|i| PochTable::build(one + x.xi[i] - t_last, -wide, wide, ctx))
            .collect();
        let cross_last_dn = (0..n)
            .map(|i| PochTable::build(one - x.xi[i] + t_last, -wide, wide, ctx))
            .collect();
        GusK0Summand { n, cross, cross_last_up, cross_last_dn, capacity: cap }
    }

    pub fn eval(&self, nu: &[i64]) -> Complex64 {
        let n = self.n;
        let s: i64 = nu.iter().sum();
        let mut w = Scaled::ONE;
        for i in 0..n {
            for j in (i + 1)..n {
                w = w
                    .div(self.cross[i * n + j].as_ref().unwrap().get(nu[i] - nu[j]))
                    .div(self.cross[j * n + i].as_ref().unwrap().get(nu[j] - nu[i]));
            }
        }
        for i in 0..n {
            w = w
                .div(self.cross_last_up[i].get(nu[i] + s))
                .div(self.cross_last_dn[i].get(-nu[i] - s));
        }
        w.to_complex()
    }
}

/// The Macdonald identity sum on the balance surface; equals
/// `(1-q)^n (q)_inf^n` independently of the base point.
pub fn gus_macdonald_k0(
    params: &GUSParams,
    x: &ExponentPoint,
    spec: &SumSpec,
    ctx: &QContext,
) -> Result<SumResult, FamilyError> {
    check_dim(params, x)?;
    let cap = capacity(params.n, spec.cycle == Cycle::Box, ctx);
    let s = GusK0Summand::build(params, x, cap, ctx);
    run(|nu: &[i64]| s.eval(nu), cap, spec, ctx)
}

/// Paired-shift weight ratio `T_{z_j}^{-1} T_{z_i} Phi / Phi` as an exact
/// rational expression in the full (n+1)-coordinate tuple.
pub fn gus_pair_shift_ratio(
    params: &GUSParams,
    z: &[Complex64],
    i: usize,
    j: usize,
    ctx: &QContext,
) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let q = ctx.q();
    let mut r = one;
    for k in 0..params.pairs() {
        let b = q_power(params.beta_exp[k], ctx);
        let a_inv = q_power(-params.alpha_exp[k], ctx);
        r *= (one - b * z[i]) * (one - a_inv * z[j])
            / ((one - q * a_inv * z[i]) * (one - b * z[j] / q));
    }
    r
}

/// Contiguous-relation coefficient for `a_j -> q a_j` on `K`:
/// `(1 - d / (a_1..a_{n+1})) / (1 - 1/(a_1 b_1 .. a_{n+1} b_{n+1}))
///  * prod_i (1 - 1/(b_i a_j))`.
pub fn gus_rec_a_coeff(params: &GUSParams, j: usize, ctx: &QContext) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut r = (one - q_power(params.d_exp - params.sum_alpha(), ctx))
        / (one - q_power(-params.sum_exponents(), ctx));
    for i in 0..params.pairs() {
        r *= one - q_power(-params.beta_exp[i] - params.alpha_exp[j], ctx);
    }
    r
}

/// Contiguous-relation coefficient for `b_j -> q b_j` on `K`.
pub fn gus_rec_b_coeff(params: &GUSParams, j: usize, ctx: &QContext) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut r = (one - q_power(params.d_exp + params.sum_beta(), ctx))
        / (one - q_power(params.sum_exponents(), ctx));
    for i in 0..params.pairs() {
        r *= one - q_power(params.alpha_exp[i] + params.beta_exp[j], ctx);
    }
    r
}

/// Contiguous-relation coefficient for `a_j -> q a_j` on the regularized sum
/// (the regularizer is a-independent, so this matches [`gus_rec_a_coeff`]).
pub fn gus_rec_reg_a_coeff(params: &GUSParams, j: usize, ctx: &QContext) -> Complex64 {
    gus_rec_a_coeff(params, j, ctx)
}

/// Contiguous-relation coefficient for `b_j -> q b_j` on the regularized sum.
pub fn gus_rec_reg_b_coeff(params: &GUSParams, j: usize, ctx: &QContext) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut r = (one - q_power(-params.d_exp - params.sum_beta(), ctx))
        / (one - q_power(-params.sum_exponents(), ctx));
    for i in 0..params.pairs() {
        r *= one - q_power(-params.alpha_exp[i] - params.beta_exp[j], ctx);
    }
    r
}

/// Parameter drift of the asymptotic direction: all `b_i` shrink by
/// `q^{-nN}`, the first n of the `a_j` grow by `q^{(n+1)N}`, and `a_{n+1}`
/// shrinks by `q^{-nN}`; the balance constant is untouched.
pub fn gus_asym_shifted(params: &GUSParams, big_n: i64) -> Result<GUSParams, FamilyError> {
    let n = params.n as f64;
    let shift = big_n as f64;
    let b = params.beta_exp.iter().map(|&t| t - n * shift).collect();
    let a: Vec<Complex64> = params
        .alpha_exp
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            if j < params.n {
                t + (n + 1.0) * shift
            } else {
                t - n * shift
            }
        })
        .collect();
    GUSParams::new(a, b, params.d_exp)
}

/// Leading term of the drifted truncated deformed sum, with the original
/// parameters.
pub fn gus_asym_leading(params: &GUSParams, big_n: i64, ctx: &QContext) -> Scaled {
    let n = params.n;
    let nf = n as f64;
    let shift = big_n as f64;
    let sum_a_head: Complex64 = params.alpha_exp[..n].iter().sum();
    let power = Complex64::new(1.0, 0.0) - params.sum_exponents() + nf * shift;
    let base = sum_a_head - params.d_exp + nf * (nf + 1.0) * shift;
    let mut r = one_minus_q_pow(n, ctx)
        .mul(q_power_scaled(base * power, ctx))
        .mul(qq_inf_pow(n, ctx));
    for i in 0..n {
        for j in (i + 1)..n {
            r = r
                .mul(q_power_scaled(Complex64::new((nf + 1.0) * shift, 0.0), ctx))
                .mul(q_power_scaled(params.alpha_exp[j], ctx))
                .mul(theta_exp(params.alpha_exp[i] - params.alpha_exp[j], ctx));
        }
    }
    r
}

/// Fan-sum ratio `(drifted truncated deformed sum) / leading`; approaches 1.
pub fn gus_asym_ratio(
    params: &GUSParams,
    big_n: i64,
    ctx: &QContext,
) -> Result<SumResult, FamilyError> {
    let shifted = gus_asym_shifted(params, big_n)?;
    let lead = gus_asym_leading(params, big_n, ctx);
    let x = shifted.a_point();
    let cap = capacity(params.n, false, ctx);
    let s = GusTildeSummand::build(&shifted, &x, lead.recip(), cap, ctx);
    run(|nu: &[i64]| s.eval(nu), cap, &SumSpec::fan(params.n, ctx.lattice_cutoff), ctx)
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

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1.0)
    }

    fn params_n1() -> GUSParams {
        GUSParams::new(
            vec![c(0.09), c(0.14)],
            vec![c(0.11), c(0.17)],
            c(0.47),
        )
        .unwrap()
    }

    #[test]
    fn regularizer_forms_agree() {
        let ctx = ctx();
        let p = params_n1();
        let x = ExponentPoint::real(&[0.29]);
        let h1 = gus_regularizer_h(&p, &x, &ctx).unwrap();
        let h2 = gus_regularizer_h_symmetric(&p, &x, &ctx).unwrap();
        assert!(rel(h1, h2) < 1e-12);
    }

    #[test]
    fn regularized_sum_equals_constant_n1() {
        let ctx = ctx();
        let p = params_n1();
        let x = ExponentPoint::real(&[0.29]);
        let k = gus_lhs(&p, &x, &SumSpec::boxed(1, 16), &ctx).unwrap();
        let h = gus_regularizer_h(&p, &x, &ctx).unwrap();
        let rhs = gus_constant_rhs(&p, &ctx).unwrap();
        assert!(rel(k.value / h, rhs) < 1e-9, "dev {}", rel(k.value / h, rhs));
    }

    #[test]
    fn constancy_between_two_bases() {
        let ctx = ctx();
        let p = params_n1();
        let spec = SumSpec::boxed(1, 16);
        let v1 = gus_lhs(&p, &ExponentPoint::real(&[0.29]), &spec, &ctx).unwrap().value
            / gus_regularizer_h(&p, &ExponentPoint::real(&[0.29]), &ctx).unwrap();
        let v2 = gus_lhs(&p, &ExponentPoint::real(&[0.615]), &spec, &ctx).unwrap().value
            / gus_regularizer_h(&p, &ExponentPoint::real(&[0.615]), &ctx).unwrap();
        assert!(rel(v1, v2) < 1e-9);
    }

    #[test]
    fn milne_special_case_n1() {
        let ctx = ctx();
        let p = GUSParams::milne(vec![c(0.09), c(0.14)], vec![c(0.11), c(0.17)]).unwrap();
        let k = gus_lhs(&p, &p.a_point(), &SumSpec::fan(1, 16), &ctx).unwrap();
        let rhs = gus_milne_truncated_rhs(&p, &ctx).unwrap();
        assert!(rel(k.value, rhs) < 1e-9, "dev {}", rel(k.value, rhs));
    }

    #[test]
    fn weight_factorizes_pointwise() {
        let ctx = ctx();
        let p = params_n1();
        let x = ExponentPoint::real(&[0.29]);
        for nu in [[0i64], [5], [-7], [12]] {
            let phi = gus_weight_point(&p, &x, &nu, &ctx);
            let k = gus_k_factor_point(&p, &x, &nu, &ctx);
            let tilde = gus_tilde_weight_point(&p, &x, &nu, &ctx);
            let lhs = phi.to_complex();
            let rhs = k.mul(tilde).to_complex();
            assert!(rel(lhs, rhs) < 1e-12, "nu={nu:?} dev {}", rel(lhs, rhs));
        }
    }

    #[test]
    fn k_factor_forms_agree() {
        let ctx = ctx();
        let p = params_n1();
        let x = ExponentPoint::real(&[0.29]);
        let k1 = gus_k_factor(&p, &x, &ctx).unwrap();
        let k2 = gus_k_factor_alt(&p, &x, &ctx).unwrap();
        assert!(rel(k1, k2) < 1e-12);
    }

    #[test]
    fn sum_factorizes_through_deformed_weight() {
        let ctx = ctx();
        let p = params_n1();
        let x = ExponentPoint::real(&[0.29]);
        let k = gus_lhs(&p, &x, &SumSpec::boxed(1, 16), &ctx).unwrap();
        let kt = gus_tilde_lhs(&p, &x, &SumSpec::boxed(1, 16), &ctx).unwrap();
        let kf = gus_k_factor(&p, &x, &ctx).unwrap();
        assert!(rel(k.value, kf * kt.value) < 1e-8);
    }

    #[test]
    fn macdonald_identity_sum_n1() {
        let ctx = ctx();
        let p = params_n1();
        let x = ExponentPoint::real(&[0.29]);
        let k0 = gus_macdonald_k0(&p, &x, &SumSpec::boxed(1, 16), &ctx).unwrap();
        let expect = (1.0 - ctx.q()) * crate::qcore::qpoch_inf(c(0.5), &ctx);
        assert!(rel(k0.value, expect) < 1e-10);
    }

    #[test]
    fn balance_holds_in_exponent_bookkeeping() {
        let p = params_n1();
        let x = ExponentPoint::real(&[0.29]);
        for s in [-9i64, 0, 4] {
            let total = x.sum_exponents() + Complex64::new(s as f64, 0.0)
                + p.last_exponent(&x, s);
            assert!((total - p.d_exp).norm() < 1e-12);
        }
    }

    #[test]
    fn recurrences_n1() {
        let ctx = ctx();
        let p = GUSParams::new(
            vec![c(-0.12), c(-0.16)],
            vec![c(-0.09), c(-0.15)],
            c(0.4),
        )
        .unwrap();
        let x = ExponentPoint::real(&[0.29]);
        let spec = SumSpec::boxed(1, 32);
        let k0 = gus_lhs(&p, &x, &spec, &ctx).unwrap();
        let pa = p.shift_alpha(0, 1.0).unwrap();
        let ka = gus_lhs(&pa, &x, &spec, &ctx).unwrap();
        let coef = gus_rec_a_coeff(&p, 0, &ctx);
        assert!(rel(ka.value, coef * k0.value) < 1e-9);
        let pb = p.shift_beta(0, 1.0).unwrap();
        let kb = gus_lhs(&pb, &x, &spec, &ctx).unwrap();
        let coefb = gus_rec_b_coeff(&p, 0, &ctx);
        assert!(rel(kb.value, coefb * k0.value) < 1e-9);
        // regularized versions
        let h0 = gus_regularizer_h(&p, &x, &ctx).unwrap();
        let hb = gus_regularizer_h(&pb, &x, &ctx).unwrap();
        let lhs = kb.value / hb;
        let rhs = gus_rec_reg_b_coeff(&p, 0, &ctx) * (k0.value / h0);
        assert!(rel(lhs, rhs) < 1e-9);
    }
}
