//! Multi-index lattice summation.
//!
//! Evaluates `(1-q)^n sum_nu f(nu)` over fan cycles (nu in N^n) and
//! bilateral box cycles (nu in [-M,M]^n). Accumulation is compensated
//! (Neumaier) and runs in a fixed traversal order: leading-coordinate slices
//! in increasing order, lexicographic within a slice, with per-slice partial
//! sums concatenated in slice order. Slices may be computed concurrently;
//! the ordered reduction makes the result bit-identical for any worker
//! count. The magnitude of the outermost L-infinity shell is reported as the
//! tail estimate, and adaptive runs double the cutoff until that shell drops
//! below the convergence gate.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::qcore::QContext;

/// Which lattice cycle to sum over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cycle {
    /// nu in [0, M]^n (truncated sums).
    Fan,
    /// nu in [-M, M]^n (bilateral sums).
    Box,
}

/// Shape of a lattice sum: dimension, cycle, initial cutoff and growth policy.
#[derive(Clone, Copy, Debug)]
pub struct SumSpec {
    pub n: usize,
    pub cycle: Cycle,
    pub cutoff: i64,
    pub adaptive: bool,
    /// Hard ceiling on the cutoff, e.g. the capacity of precomputed weight
    /// tables. `None` leaves only the `max_terms` budget as the limit.
    pub max_cutoff: Option<i64>,
}

impl SumSpec {
    pub fn boxed(n: usize, cutoff: i64) -> Self {
        SumSpec { n, cycle: Cycle::Box, cutoff, adaptive: true, max_cutoff: None }
    }

    pub fn fan(n: usize, cutoff: i64) -> Self {
        SumSpec { n, cycle: Cycle::Fan, cutoff, adaptive: true, max_cutoff: None }
    }

    pub fn with_max_cutoff(mut self, m: i64) -> Self {
        self.max_cutoff = Some(m);
        self
    }

    pub fn fixed(mut self) -> Self {
        self.adaptive = false;
        self
    }

    /// Number of lattice points at half-width m, saturating.
    pub fn points(&self, m: i64) -> u64 {
        let side = match self.cycle {
            Cycle::Fan => m as u64 + 1,
            Cycle::Box => 2 * m as u64 + 1,
        };
        let mut p = 1u64;
        for _ in 0..self.n {
            p = p.saturating_mul(side);
        }
        p
    }

    /// Largest cutoff the term budget and table capacity allow.
    pub fn max_allowed_cutoff(&self, ctx: &QContext) -> i64 {
        let mut m = 1i64;
        while self.points(m + 1) <= ctx.max_terms {
            m += 1;
            if m > 1 << 24 {
                break;
            }
        }
        match self.max_cutoff {
            Some(cap) => m.min(cap),
            None => m,
        }
    }
}

/// Value of a lattice sum plus tail estimate and cost counters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumResult {
    pub value: Complex64,
    /// Magnitude of the outermost L-infinity shell contribution.
    pub tail_estimate: f64,
    /// Lattice points evaluated, cumulative over adaptive passes.
    pub terms: u64,
    pub converged: bool,
    /// Final half-width the sum was taken at.
    pub cutoff: i64,
}

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("lattice sum did not converge: tail {tail:.3e} above gate {gate:.3e} at cutoff {cutoff} ({terms} terms)")]
    NotConverged { tail: f64, gate: f64, cutoff: i64, terms: u64 },
    #[error("non-finite summand at lattice point {0:?} (pole on the q-cycle)")]
    NonFinite(Vec<i64>),
    #[error("invalid sum spec: {0}")]
    InvalidSpec(&'static str),
}

/// Neumaier compensated accumulator for one f64 lane.
#[derive(Clone, Copy, Default)]
struct Comp {
    sum: f64,
    c: f64,
}

impl Comp {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Clone, Copy, Default)]
struct CompC {
    re: Comp,
    im: Comp,
}

impl CompC {
    #[inline]
    fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

struct SliceOut {
    sum: Complex64,
    shell: Complex64,
    bad: Option<Vec<i64>>,
}

/// Sum of `f` over the sub-lattice of one leading-coordinate slice, in
/// lexicographic order over the remaining coordinates.
fn sum_slice<F>(f: &F, lead: i64, lo: i64, m: i64, n: usize) -> SliceOut
where
    F: Fn(&[i64]) -> Complex64 + Sync,
{
    let mut nu = vec![lo; n];
    nu[0] = lead;
    let lead_on_shell = lead.abs() == m || (lo == 0 && lead == m);
    let mut acc = CompC::default();
    let mut shell = CompC::default();
    loop {
        let v = f(&nu);
        if !v.re.is_finite() || !v.im.is_finite() {
            return SliceOut { sum: Complex64::default(), shell: Complex64::default(), bad: Some(nu) };
        }
        acc.add(v);
        let on_shell = lead_on_shell
            || nu[1..].iter().any(|&k| k.abs() == m || (lo == 0 && k == m));
        if on_shell {
            shell.add(v);
        }
        // lexicographic increment over nu[1..]
        let mut i = n;
        loop {
            if i == 1 {
                return SliceOut { sum: acc.value(), shell: shell.value(), bad: None };
            }
            i -= 1;
            if nu[i] < m {
                nu[i] += 1;
                break;
            }
            nu[i] = lo;
        }
    }
}

fn single_pass<F>(f: &F, spec: &SumSpec, m: i64) -> Result<(Complex64, Complex64), LatticeError>
where
    F: Fn(&[i64]) -> Complex64 + Sync,
{
    let lo = match spec.cycle {
        Cycle::Fan => 0,
        Cycle::Box => -m,
    };
    let leads: Vec<i64> = (lo..=m).collect();
    let big = spec.points(m) > 20_000 && spec.n > 1;
    let outs: Vec<SliceOut> = if big {
        leads.par_iter().map(|&s| sum_slice(f, s, lo, m, spec.n)).collect()
    } else {
        leads.iter().map(|&s| sum_slice(f, s, lo, m, spec.n)).collect()
    };
    let mut total = CompC::default();
    let mut shell = CompC::default();
    for out in outs {
        if let Some(p) = out.bad {
            return Err(LatticeError::NonFinite(p));
        }
        total.add(out.sum);
        shell.add(out.shell);
    }
    Ok((total.value(), shell.value()))
}

/// Lattice sum `(1-q)^n sum_nu f(nu)` over the cycle described by `spec`.
///
/// Adaptive runs double the cutoff until the outermost-shell contribution
/// falls below `identity_tol * max(1,|partial|) / 10`, the term budget is
/// exhausted, or the `max_cutoff` ceiling is reached; exhaustion with the
/// tail still above the gate is a `NotConverged` error. Fixed runs report
/// the measured convergence flag instead.
pub fn jackson_sum<F>(f: &F, spec: &SumSpec, ctx: &QContext) -> Result<SumResult, LatticeError>
where
    F: Fn(&[i64]) -> Complex64 + Sync,
{
    if spec.n == 0 {
        return Err(LatticeError::InvalidSpec("dimension must be at least 1"));
    }
    if spec.cutoff < 1 {
        return Err(LatticeError::InvalidSpec("cutoff must be at least 1"));
    }
    let cap = spec.max_allowed_cutoff(ctx);
    if spec.points(spec.cutoff) > ctx.max_terms {
        return Err(LatticeError::InvalidSpec("cutoff exceeds the max_terms budget"));
    }
    let norm = (1.0 - ctx.q()).powi(spec.n as i32);
    let mut m = spec.cutoff.min(cap);
    let mut terms = 0u64;
    loop {
        let (raw, raw_shell) = single_pass(f, spec, m)?;
        terms += spec.points(m);
        let value = norm * raw;
        let tail = norm * raw_shell.norm();
        let gate = ctx.identity_tol * value.norm().max(1.0) / 10.0;
        let converged = tail <= gate;
        if converged || !spec.adaptive {
            return Ok(SumResult { value, tail_estimate: tail, terms, converged, cutoff: m });
        }
        if m >= cap || spec.points(m * 2).saturating_add(terms) > ctx.max_terms.saturating_mul(4) {
            return Err(LatticeError::NotConverged { tail, gate, cutoff: m, terms });
        }
        m = (m * 2).min(cap);
    }
}

/// Contiguous leading-coordinate blocks covering the index range, at most
/// `workers` of them, balanced within one slice of each other. Reductions
/// that concatenate per-block partial sums in block order reproduce the
/// serial result bit for bit.
pub fn shell_partition(spec: &SumSpec, workers: usize) -> Vec<(i64, i64)> {
    let lo = match spec.cycle {
        Cycle::Fan => 0,
        Cycle::Box => -spec.cutoff,
    };
    let hi = spec.cutoff;
    let slices = (hi - lo + 1) as usize;
    let blocks = workers.max(1).min(slices);
    let base = slices / blocks;
    let extra = slices % blocks;
    let mut out = Vec::with_capacity(blocks);
    let mut start = lo;
    for b in 0..blocks {
        let len = base + usize::from(b < extra);
        let end = start + len as i64 - 1;
        out.push((start, end));
        start = end + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{q_power, qpoch_inf};

    fn ctx() -> QContext {
        QContext::new(0.5).unwrap()
    }

    #[test]
    fn zero_summand() {
        let r = jackson_sum(&|_nu: &[i64]| Complex64::default(), &SumSpec::fan(2, 4), &ctx()).unwrap();
        assert_eq!(r.value, Complex64::default());
        assert!(r.converged);
    }

    #[test]
    fn geometric_series_is_exact() {
        // n=1 fan, f(nu) = q^nu: (1-q) * 1/(1-q) = 1
        let ctx = ctx();
        let f = |nu: &[i64]| Complex64::new(0.5f64.powi(nu[0] as i32), 0.0);
        let r = jackson_sum(&f, &SumSpec::fan(1, 8), &ctx).unwrap();
        assert!(r.converged);
        assert!((r.value.re - 1.0).abs() < 1e-8);
    }

    /// Bilateral Ramanujan-type summand in plain value arithmetic, with the
    /// Pochhammer quotient expanded factor by factor so huge numerators and
    /// denominators never materialize. Independent of the exponent-table
    /// machinery used by the production weights.
    fn ramanujan_term(nu: i64, ctx: &QContext, alpha: f64, a_exp: f64, b_exp: f64, x_exp: f64) -> Complex64 {
        let q = ctx.q();
        let z = q_power(Complex64::new(x_exp + nu as f64, 0.0), ctx);
        let top0 = q_power(Complex64::new(1.0 - a_exp, 0.0), ctx) * z;
        let bot0 = q_power(Complex64::new(b_exp, 0.0), ctx) * z;
        let mut quot = Complex64::new(1.0, 0.0);
        let mut top = top0;
        let mut bot = bot0;
        for _ in 0..220 {
            quot *= (1.0 - top) / (1.0 - bot);
            top *= q;
            bot *= q;
        }
        q_power(Complex64::new(alpha * (x_exp + nu as f64), 0.0), ctx) * quot
    }

    #[test]
    fn bilateral_ramanujan_summand_matches_brute_force() {
        let ctx = ctx();
        let (alpha, a_exp, b_exp, x_exp) = (0.3, 0.15, 0.2, 0.27);
        // brute-force oracle over [-200, 200], plain f64 loop
        let mut oracle = Complex64::default();
        for nu in -200..=200i64 {
            oracle += ramanujan_term(nu, &ctx, alpha, a_exp, b_exp, x_exp);
        }
        oracle *= 1.0 - ctx.q();
        let f = |nu: &[i64]| ramanujan_term(nu[0], &ctx, alpha, a_exp, b_exp, x_exp);
        let r = jackson_sum(&f, &SumSpec::boxed(1, 16), &ctx).unwrap();
        assert!(r.converged);
        assert!((r.value - oracle).norm() <= 1e-8 * oracle.norm());
    }

    #[test]
    fn monotone_refinement_on_ramanujan_summand() {
        let ctx = ctx();
        let f = |nu: &[i64]| ramanujan_term(nu[0], &ctx, 0.3, 0.15, 0.2, 0.27);
        let at = |m: i64| {
            jackson_sum(&f, &SumSpec::boxed(1, m).fixed(), &ctx).unwrap().value
        };
        let v40 = at(40);
        let v80 = at(80);
        let v160 = at(160);
        let v320 = at(320);
        assert!((v80 - v160).norm() < (v40 - v80).norm());
        assert!((v160 - v320).norm() < (v80 - v160).norm());
    }

    #[test]
    fn fan_box_agree_when_negative_support_vanishes() {
        // summand with (q^{1+nu})_inf factor: exactly zero for nu < 0 when
        // evaluated through integer exponent arithmetic
        let ctx = ctx();
        let f = |nu: &[i64]| {
            let t = crate::qcore::qpoch_inf_exp(Complex64::new(1.0 + nu[0] as f64, 0.0), &ctx);
            t.to_complex() * Complex64::new(0.5f64.powi(nu[0] as i32), 0.0)
        };
        let fan = jackson_sum(&f, &SumSpec::fan(1, 32), &ctx).unwrap();
        let boxed = jackson_sum(&f, &SumSpec::boxed(1, 32), &ctx).unwrap();
        assert!((fan.value - boxed.value).norm() <= fan.tail_estimate.max(boxed.tail_estimate));
    }

    #[test]
    fn non_finite_summand_reports_point() {
        let ctx = ctx();
        let f = |nu: &[i64]| {
            if nu == [1, -2] {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                Complex64::new(1e-30, 0.0)
            }
        };
        match jackson_sum(&f, &SumSpec::boxed(2, 4).fixed(), &ctx) {
            Err(LatticeError::NonFinite(p)) => assert_eq!(p, vec![1, -2]),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_is_not_converged() {
        let ctx = ctx().with_max_terms(200).unwrap();
        // slowly decaying summand that cannot meet the gate within 200 terms
        let f = |nu: &[i64]| Complex64::new(0.999f64.powi(nu[0].unsigned_abs() as i32 % 1000), 0.0);
        match jackson_sum(&f, &SumSpec::boxed(1, 16), &ctx) {
            Err(LatticeError::NotConverged { .. }) => {}
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn shell_partition_examples() {
        // single worker covers the whole range
        let spec = SumSpec::boxed(2, 2);
        assert_eq!(shell_partition(&spec, 1), vec![(-2, 2)]);
        // box n=2 M=2 with 5 workers: singleton slices
        assert_eq!(
            shell_partition(&spec, 5),
            vec![(-2, -2), (-1, -1), (0, 0), (1, 1), (2, 2)]
        );
        // fan n=3 M=10 with 4 workers: disjoint cover of [0,10]
        let spec = SumSpec::fan(3, 10);
        let blocks = shell_partition(&spec, 4);
        assert_eq!(blocks.len(), 4);
        assert_eq!(blocks.first().unwrap().0, 0);
        assert_eq!(blocks.last().unwrap().1, 10);
        for w in blocks.windows(2) {
            assert_eq!(w[0].1 + 1, w[1].0);
        }
    }

    #[test]
    fn determinism_across_worker_counts() {
        // same inputs, pools of 1 and 4 threads: bit-identical values
        let ctx = ctx();
        let f = |nu: &[i64]| {
            let s: i64 = nu.iter().map(|k| k.abs()).sum();
            let r = 0.7f64.powi(s as i32);
            Complex64::new(r * (nu[0] as f64 * 0.1).cos(), r * (nu[1] as f64 * 0.2).sin())
        };
        let spec = SumSpec::boxed(2, 48).fixed();
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let r1 = pool1.install(|| jackson_sum(&f, &spec, &ctx)).unwrap();
        let r4 = pool4.install(|| jackson_sum(&f, &spec, &ctx)).unwrap();
        assert_eq!(r1.value.re.to_bits(), r4.value.re.to_bits());
        assert_eq!(r1.value.im.to_bits(), r4.value.im.to_bits());
        assert_eq!(r1.tail_estimate.to_bits(), r4.tail_estimate.to_bits());
    }

    #[test]
    fn converged_result_meets_tail_invariant() {
        let ctx = ctx();
        let f = |nu: &[i64]| Complex64::new(0.25f64.powi(nu[0].unsigned_abs() as i32), 0.0);
        let r = jackson_sum(&f, &SumSpec::boxed(1, 8), &ctx).unwrap();
        assert!(r.converged);
        assert!(r.tail_estimate <= ctx.identity_tol * r.value.norm().max(1.0) / 10.0);
    }
}
