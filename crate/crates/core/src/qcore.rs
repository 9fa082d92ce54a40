//! Scalar q-series kernels.
//!
//! Everything downstream works with q-exponents: a parameter written `a` in
//! the classical notation enters as the exponent `alpha` with `a = q^alpha`.
//! The base q is a real number in (0,1), so `q^c = exp(c ln q)` is
//! single-valued for complex `c` and exponent arithmetic is exact integer
//! bookkeeping along lattice directions. The kernels here are the infinite
//! and finite q-Pochhammer symbols, the theta function
//! `theta(a) = (a)_inf (q/a)_inf`, and tabulated variants used by the
//! summation engine.

use num_complex::Complex64;
use thiserror::Error;

use crate::scaled::Scaled;

#[derive(Debug, Error, PartialEq)]
pub enum QError {
    #[error("q must lie in the open interval (0,1), got {0}")]
    InvalidBase(f64),
    #[error("invalid context parameter: {0}")]
    InvalidContext(&'static str),
    #[error("theta is undefined at a = 0")]
    ThetaAtZero,
    #[error("division by zero in q-Pochhammer with negative order: factor 1 - q^-{0} a vanishes")]
    PochhammerPole(i64),
    #[error("non-finite value in q-Pochhammer evaluation")]
    NonFinite,
}

/// Global numeric context: the base q, truncation targets and budgets.
///
/// `product_tol` bounds the relative truncation error of infinite products;
/// `identity_tol` is the pass threshold for identity checks and also drives
/// the adaptive lattice tail gate; `lattice_cutoff` is the initial box
/// half-width; `max_terms` caps the number of summed lattice points.
#[derive(Clone, Copy, Debug)]
pub struct QContext {
    q: f64,
    ln_q: f64,
    pub product_tol: f64,
    pub lattice_cutoff: i64,
    /// When set, `lattice_cutoff` is a hard ceiling rather than an initial
    /// half-width: sums that need more room report non-convergence instead
    /// of growing.
    pub pinned_cutoff: bool,
    pub identity_tol: f64,
    pub max_terms: u64,
}

impl QContext {
    pub const DEFAULT_PRODUCT_TOL: f64 = 1e-14;
    pub const DEFAULT_IDENTITY_TOL: f64 = 1e-8;
    pub const DEFAULT_CUTOFF: i64 = 16;
    pub const DEFAULT_MAX_TERMS: u64 = 8_000_000;

    pub fn new(q: f64) -> Result<Self, QError> {
        if !(q > 0.0 && q < 1.0) || !q.is_finite() {
            return Err(QError::InvalidBase(q));
        }
        Ok(QContext {
            q,
            ln_q: q.ln(),
            product_tol: Self::DEFAULT_PRODUCT_TOL,
            lattice_cutoff: Self::DEFAULT_CUTOFF,
            pinned_cutoff: false,
            identity_tol: Self::DEFAULT_IDENTITY_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        })
    }

    pub fn with_identity_tol(mut self, tol: f64) -> Result<Self, QError> {
        if !(tol > 0.0) {
            return Err(QError::InvalidContext("identity_tol must be positive"));
        }
        if self.product_tol >= tol {
            return Err(QError::InvalidContext("product_tol must be below identity_tol"));
        }
        self.identity_tol = tol;
        Ok(self)
    }

    /// Pin the lattice half-width: the value is both the starting and the
    /// maximal cutoff, so insufficient room surfaces as non-convergence.
    pub fn with_cutoff(mut self, cutoff: i64) -> Result<Self, QError> {
        if cutoff < 1 {
            return Err(QError::InvalidContext("lattice_cutoff must be positive"));
        }
        self.lattice_cutoff = cutoff;
        self.pinned_cutoff = true;
        Ok(self)
    }

    pub fn with_max_terms(mut self, max_terms: u64) -> Result<Self, QError> {
        if max_terms == 0 {
            return Err(QError::InvalidContext("max_terms must be positive"));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn ln_q(&self) -> f64 {
        self.ln_q
    }
}

/// A point of (C*)^n given by q-exponents: coordinate i is `q^{xi_i}`.
///
/// Storing exponents instead of values removes every complex-power branch
/// choice: products of coordinates are sums of exponents by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentPoint {
    pub xi: Vec<Complex64>,
}

impl ExponentPoint {
    pub fn new(xi: Vec<Complex64>) -> Self {
        ExponentPoint { xi }
    }

    pub fn real(xi: &[f64]) -> Self {
        ExponentPoint {
            xi: xi.iter().map(|&t| Complex64::new(t, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// Coordinate value `q^{xi_i}`.
    pub fn value(&self, i: usize, ctx: &QContext) -> Complex64 {
        q_power(self.xi[i], ctx)
    }

    /// Exponent of the coordinate product; the product of values is
    /// `q_power` of this sum, with no branch drift.
    pub fn sum_exponents(&self) -> Complex64 {
        self.xi.iter().sum()
    }

    /// The point with all coordinates inverted (exponents negated).
    pub fn inverted(&self) -> Self {
        ExponentPoint {
            xi: self.xi.iter().map(|t| -t).collect(),
        }
    }

    /// Copy with coordinates i and j swapped.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut xi = self.xi.clone();
        xi.swap(i, j);
        ExponentPoint { xi }
    }

    /// Copy with coordinate i dropped (for alternating sums over deleted points).
    pub fn dropped(&self, i: usize) -> Self {
        let mut xi = self.xi.clone();
        xi.remove(i);
        ExponentPoint { xi }
    }

    /// Copy with `delta` added to coordinate i.
    pub fn shifted(&self, i: usize, delta: f64) -> Self {
        let mut xi = self.xi.clone();
        xi[i] += delta;
        ExponentPoint { xi }
    }
}

/// `q^c = exp(c ln q)` with the real logarithm of q in (0,1).
#[inline]
pub fn q_power(c: Complex64, ctx: &QContext) -> Complex64 {
    (c * ctx.ln_q).exp()
}

/// `q^c` in scaled form; safe for exponents far outside the f64 range.
pub fn q_power_scaled(c: Complex64, ctx: &QContext) -> Scaled {
    // magnitude 2^(Re c * log2 q), phase exp(i Im c ln q)
    let log2_mag = c.re * ctx.ln_q * std::f64::consts::LOG2_E;
    let e = log2_mag.floor();
    let mantissa_mag = (log2_mag - e).exp2();
    let phase = Complex64::new(0.0, c.im * ctx.ln_q).exp();
    Scaled::from_parts(phase * mantissa_mag, e as i64)
}

/// Infinite q-Pochhammer symbol `(a)_inf = prod_{i>=0} (1 - q^i a)`.
///
/// The product is truncated at the first index K with
/// `|q^K a| < product_tol / (1 + |a|)`; the geometric tail then keeps the
/// relative error at or below `product_tol`.
pub fn qpoch_inf(a: Complex64, ctx: &QContext) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    let mut f = a;
    let gate = ctx.product_tol / (1.0 + a.norm());
    loop {
        r *= 1.0 - f;
        if f.norm() < gate {
            break;
        }
        f *= ctx.q;
    }
    r
}

/// Finite q-Pochhammer symbol `(a)_N = (a)_inf / (q^N a)_inf` for any sign
/// of N, evaluated as a finite product.
///
/// For N >= 0 this is `prod_{i=0}^{N-1} (1 - q^i a)`; for N < 0 it is
/// `1 / prod_{i=1}^{-N} (1 - q^{-i} a)`, which fails with a pole error when
/// one of the denominator factors vanishes.
pub fn qpoch_n(a: Complex64, n: i64, ctx: &QContext) -> Result<Complex64, QError> {
    if n >= 0 {
        let mut r = Complex64::new(1.0, 0.0);
        let mut f = a;
        for _ in 0..n {
            r *= 1.0 - f;
            f *= ctx.q;
        }
        if !r.re.is_finite() || !r.im.is_finite() {
            return Err(QError::NonFinite);
        }
        Ok(r)
    } else {
        let mut r = Scaled::ONE;
        let mut qinv_i = 1.0 / ctx.q;
        for i in 1..=(-n) {
            let factor = 1.0 - a * qinv_i;
            if factor.norm() == 0.0 {
                return Err(QError::PochhammerPole(i));
            }
            r = r.mul_c(factor);
            qinv_i /= ctx.q;
        }
        let v = r.recip().to_complex();
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(QError::NonFinite);
        }
        Ok(v)
    }
}

/// Theta function `theta(a) = (a)_inf (q/a)_inf`, the quasi-periodic
/// building block: `theta(q a) = -theta(a)/a` and `theta` vanishes exactly
/// on the q-power lattice `a in q^Z`.
pub fn theta(a: Complex64, ctx: &QContext) -> Result<Complex64, QError> {
    if a.norm() == 0.0 {
        return Err(QError::ThetaAtZero);
    }
    Ok(qpoch_inf(a, ctx) * qpoch_inf(ctx.q / a, ctx))
}

/// `(q^t)_inf` in scaled form for an arbitrary complex exponent t.
///
/// For Re t <= 0 the leading factors are split off so the remaining product
/// has all arguments inside the unit disk; the split part may be huge but is
/// absorbed by the scaled representation. Integer t <= 0 yields an exact
/// zero (the factor 1 - q^0).
pub fn qpoch_inf_exp(t: Complex64, ctx: &QContext) -> Scaled {
    let m = if t.re >= 1.0 { 0 } else { (1.0 - t.re).ceil() as i64 };
    let mut head = Scaled::ONE;
    for i in 0..m {
        let f = q_power_scaled(t + i as f64, ctx);
        head = head.mul(Scaled::ONE.sub(f));
        if head.is_zero() {
            return Scaled::ZERO;
        }
    }
    // Re(t+m) >= 1: benign tail, plain f64 arithmetic.
    let mut tail = Complex64::new(1.0, 0.0);
    let mut f = q_power(t + m as f64, ctx);
    let gate = ctx.product_tol * 0.5;
    loop {
        tail *= 1.0 - f;
        if f.norm() < gate {
            break;
        }
        f *= ctx.q;
    }
    head.mul_c(tail)
}

/// `theta(q^t) = (q^t)_inf (q^{1-t})_inf` in scaled form.
pub fn theta_exp(t: Complex64, ctx: &QContext) -> Scaled {
    qpoch_inf_exp(t, ctx).mul(qpoch_inf_exp(Complex64::new(1.0, 0.0) - t, ctx))
}

/// Lookup table of `(q^{t0 + k})_inf` for integer offsets k in [lo, hi].
///
/// Built downward from the top entry so that only multiplications occur:
/// `(q^{s-1})_inf = (1 - q^{s-1}) (q^s)_inf`. Exact zeros from integer
/// exponents propagate to every lower entry, matching the truncation
/// behavior of the weights.
pub struct PochTable {
    t0: Complex64,
    lo: i64,
    vals: Vec<Scaled>,
}

impl PochTable {
    pub fn build(t0: Complex64, lo: i64, hi: i64, ctx: &QContext) -> Self {
        debug_assert!(lo <= hi);
        let len = (hi - lo + 1) as usize;
        let mut vals = vec![Scaled::ZERO; len];
        let mut cur = qpoch_inf_exp(t0 + hi as f64, ctx);
        vals[len - 1] = cur;
        for k in (lo..hi).rev() {
            let f = q_power_scaled(t0 + k as f64, ctx);
            cur = Scaled::ONE.sub(f).mul(cur);
            vals[(k - lo) as usize] = cur;
        }
        PochTable { t0, lo, vals }
    }

    #[inline]
    pub fn get(&self, k: i64) -> Scaled {
        self.vals[(k - self.lo) as usize]
    }

    pub fn base_exponent(&self) -> Complex64 {
        self.t0
    }
}

/// Lookup table of `q^{(t0 + k) w}` (scaled) for integer k in [lo, hi]; used
/// for the `(z_1 ... z_n)^alpha` style power factors along lattice
/// directions. Entries are computed independently, so there is no drift.
pub struct PowerTable {
    lo: i64,
    vals: Vec<Scaled>,
}

impl PowerTable {
    pub fn build(t0: Complex64, w: Complex64, lo: i64, hi: i64, ctx: &QContext) -> Self {
        let vals = (lo..=hi)
            .map(|k| q_power_scaled((t0 + k as f64) * w, ctx))
            .collect();
        PowerTable { lo, vals }
    }

    #[inline]
    pub fn get(&self, k: i64) -> Scaled {
        self.vals[(k - self.lo) as usize]
    }
}

/// Lookup table of coordinate values `q^{xi + k}` (scaled).
pub struct ValueTable {
    lo: i64,
    vals: Vec<Scaled>,
}

impl ValueTable {
    pub fn build(xi: Complex64, lo: i64, hi: i64, ctx: &QContext) -> Self {
        let vals = (lo..=hi).map(|k| q_power_scaled(xi + k as f64, ctx)).collect();
        ValueTable { lo, vals }
    }

    #[inline]
    pub fn get(&self, k: i64) -> Scaled {
        self.vals[(k - self.lo) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> QContext {
        QContext::new(0.5).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1.0)
    }

    #[test]
    fn context_validation() {
        assert!(QContext::new(0.0).is_err());
        assert!(QContext::new(1.0).is_err());
        assert!(QContext::new(-0.5).is_err());
        assert!(QContext::new(f64::NAN).is_err());
        assert!(QContext::new(0.5).unwrap().with_identity_tol(1e-15).is_err());
    }

    #[test]
    fn q_power_trivial_cases() {
        let ctx = ctx();
        assert_eq!(q_power(c(0.0, 0.0), &ctx), c(1.0, 0.0));
        assert!((q_power(c(1.0, 0.0), &ctx) - c(0.5, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn q_power_complex_against_independent_evaluation() {
        // exp((0.5 + 1.0i) ln 0.5), 40-digit reference evaluation
        let ctx = ctx();
        let expect = c(0.543_934_043_506_954_45, -0.451_813_851_396_982_49);
        assert!(rel(q_power(c(0.5, 1.0), &ctx), expect) < 1e-15);
    }

    #[test]
    fn q_power_additivity() {
        let ctx = ctx();
        let c1 = c(0.37, -0.8);
        let c2 = c(-1.13, 0.44);
        assert!(rel(q_power(c1 + c2, &ctx), q_power(c1, &ctx) * q_power(c2, &ctx)) < 1e-15);
    }

    #[test]
    fn qpoch_inf_trivial_and_zero() {
        let ctx = ctx();
        assert_eq!(qpoch_inf(c(0.0, 0.0), &ctx), c(1.0, 0.0));
        assert_eq!(qpoch_inf(c(1.0, 0.0), &ctx), c(0.0, 0.0));
    }

    #[test]
    fn qpoch_inf_at_q_against_direct_product() {
        // (q;q)_inf at q = 0.5: direct 60-factor product as the oracle.
        let ctx = ctx();
        let mut oracle = 1.0f64;
        let mut p = 0.5f64;
        for _ in 0..60 {
            oracle *= 1.0 - p;
            p *= 0.5;
        }
        let got = qpoch_inf(c(0.5, 0.0), &ctx);
        assert!((got.re - oracle).abs() < 1e-15 && got.im == 0.0);
        // and against the 40-digit reference value
        assert!((got.re - 0.288_788_095_086_602_421_3).abs() < 1e-15);
    }

    #[test]
    fn qpoch_n_edge_cases() {
        let ctx = ctx();
        let a = c(0.3, 0.2);
        assert_eq!(qpoch_n(a, 0, &ctx).unwrap(), c(1.0, 0.0));
        assert_eq!(qpoch_n(a, 1, &ctx).unwrap(), c(1.0, 0.0) - a);
    }

    #[test]
    fn qpoch_n_negative_order_matches_quotient_oracle() {
        // (0.3)_{-2} = 1/((1-0.6)(1-1.2)) = -12.5, and the defining quotient
        // (0.3)_inf / (q^{-2} 0.3)_inf agrees (reference value -12.5 exactly).
        let ctx = ctx();
        let got = qpoch_n(c(0.3, 0.0), -2, &ctx).unwrap();
        assert!(rel(got, c(-12.5, 0.0)) < 1e-14);
        let quotient = qpoch_inf(c(0.3, 0.0), &ctx) / qpoch_inf(c(1.2, 0.0), &ctx);
        assert!(rel(got, quotient) < 1e-13);
    }

    #[test]
    fn qpoch_n_negative_order_pole() {
        // a = q^2 makes 1 - q^{-2} a vanish
        let ctx = ctx();
        assert_eq!(qpoch_n(c(0.25, 0.0), -3, &ctx), Err(QError::PochhammerPole(2)));
    }

    #[test]
    fn qpoch_n_shift_relation() {
        let ctx = ctx();
        let a = c(0.41, -0.23);
        for n in -5..6i64 {
            let lhs = qpoch_n(a, n + 1, &ctx).unwrap();
            let rhs = qpoch_n(a, n, &ctx).unwrap() * (1.0 - q_power(c(n as f64, 0.0), &ctx) * a);
            assert!(rel(lhs, rhs) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn theta_reference_values() {
        let ctx = ctx();
        // theta(q^0.3) at q=0.5, 40-digit reference
        let got = theta(q_power(c(0.3, 0.0), &ctx), &ctx).unwrap();
        assert!(rel(got, c(0.013_841_515_885_172_590, 0.0)) < 1e-13);
        // complex argument reference
        let got = theta(c(0.7, 0.2), &ctx).unwrap();
        let expect = c(0.030_216_566_246_197_911, -0.003_059_622_674_325_509);
        assert!(rel(got, expect) < 1e-13);
    }

    #[test]
    fn theta_symmetry_and_domain_error() {
        let ctx = ctx();
        let a = c(0.63, 0.21);
        let lhs = theta(ctx.q() / a, &ctx).unwrap();
        let rhs = theta(a, &ctx).unwrap();
        assert!(rel(lhs, rhs) < 1e-13);
        assert_eq!(theta(c(0.0, 0.0), &ctx), Err(QError::ThetaAtZero));
    }

    #[test]
    fn theta_quasi_periodicity() {
        let ctx = ctx();
        for a in [c(0.7, 0.0), c(1.3, 0.4), c(-0.8, 0.1), c(0.05, -0.4)] {
            let lhs = theta(ctx.q() * a, &ctx).unwrap();
            let rhs = -theta(a, &ctx).unwrap() / a;
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm(), "a={a}");
        }
    }

    #[test]
    fn theta_vanishes_on_q_powers_via_exponents() {
        let ctx = ctx();
        for k in -3..=3i64 {
            let v = theta_exp(c(k as f64, 0.0), &ctx).to_complex();
            assert!(v.norm() <= 1e-10, "k={k} -> {v}");
        }
    }

    #[test]
    fn qpoch_inf_exp_matches_value_form() {
        let ctx = ctx();
        for t in [c(0.4, 0.0), c(1.7, -0.3), c(-2.3, 0.5), c(-7.9, 0.0)] {
            let via_exp = qpoch_inf_exp(t, &ctx).to_complex();
            let via_val = qpoch_inf(q_power(t, &ctx), &ctx);
            assert!(rel(via_exp, via_val) < 1e-12, "t={t}");
        }
    }

    #[test]
    fn qpoch_inf_functional_equation() {
        let ctx = ctx();
        for a in [c(0.9, 0.0), c(-3.7, 1.2), c(8.5, -4.0)] {
            let lhs = qpoch_inf(a, &ctx);
            let rhs = (1.0 - a) * qpoch_inf(ctx.q() * a, &ctx);
            assert!(rel(lhs, rhs) < ctx.product_tol * 10.0, "a={a}");
        }
    }

    #[test]
    fn poch_table_matches_direct_evaluation() {
        let ctx = ctx();
        let t0 = c(0.37, 0.21);
        let table = PochTable::build(t0, -40, 40, &ctx);
        for k in [-40i64, -17, -1, 0, 1, 25, 40] {
            let direct = qpoch_inf_exp(t0 + k as f64, &ctx);
            let tabbed = table.get(k);
            let d = direct.to_complex();
            let t = tabbed.to_complex();
            if d.norm() > 0.0 && d.norm().is_finite() {
                assert!(rel(t, d) < 1e-12, "k={k}");
            } else {
                assert!((t.norm() - d.norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn poch_table_propagates_exact_zeros() {
        // integer base exponent: entries at k <= -t0 are exactly zero
        let ctx = ctx();
        let table = PochTable::build(c(3.0, 0.0), -10, 10, &ctx);
        for k in -10..=-3i64 {
            assert!(table.get(k).is_zero(), "k={k}");
        }
        assert!(!table.get(-2).is_zero());
    }

    #[test]
    fn exponent_point_product_bookkeeping() {
        let ctx = ctx();
        let p = ExponentPoint::real(&[0.21, 0.55, -0.3]);
        let prod: Complex64 = (0..3).map(|i| p.value(i, &ctx)).product();
        let via_sum = q_power(p.sum_exponents(), &ctx);
        assert!(rel(prod, via_sum) < 1e-14);
    }
}
