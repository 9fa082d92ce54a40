//! Property checks for the scalar kernels.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

use super::fold_dev;
use crate::qcore::{q_power, qpoch_inf, qpoch_n, theta, theta_exp};
use crate::verify::sample::trial_rng;
use crate::verify::{echo_c, rel_dev, CheckError, CheckInput, CheckReport};

fn rand_c<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub(crate) fn q_power_consistency(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, 0, 0);
    let mut devs = Vec::new();
    let mut worst = (Complex64::default(), Complex64::default(), 0.0);
    for _ in 0..20 {
        let c1 = rand_c(&mut rng, 2.0);
        let c2 = rand_c(&mut rng, 2.0);
        let lhs = q_power(c1 + c2, input.ctx);
        let rhs = q_power(c1, input.ctx) * q_power(c2, input.ctx);
        let d = rel_dev(lhs, rhs);
        if d >= worst.2 {
            worst = (lhs, rhs, d);
        }
        devs.push(d);
    }
    let echo = format!("q={:.16e};draws=20", input.ctx.q());
    Ok(input.report(
        "additivity of real-base powers",
        worst.0,
        worst.1,
        fold_dev(&devs),
        echo,
        0,
        started,
    ))
}

pub(crate) fn qpoch_shift(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, 0, 0);
    let mut devs = Vec::new();
    let mut worst = (Complex64::default(), Complex64::default(), 0.0);
    let mut echo_a = Complex64::default();
    for _ in 0..10 {
        let a = rand_c(&mut rng, 0.8);
        for order in -6..=6i64 {
            let lhs = qpoch_n(a, order + 1, input.ctx).map_err(|e| CheckError::NonFinite {
                check_id: input.check_id.clone(),
                detail: e.to_string(),
            })?;
            let step = 1.0 - q_power(Complex64::new(order as f64, 0.0), input.ctx) * a;
            let rhs = qpoch_n(a, order, input.ctx).map_err(|e| CheckError::NonFinite {
                check_id: input.check_id.clone(),
                detail: e.to_string(),
            })? * step;
            let d = rel_dev(lhs, rhs);
            if d >= worst.2 {
                worst = (lhs, rhs, d);
                echo_a = a;
            }
            devs.push(d);
        }
    }
    let echo = format!("q={:.16e};worst_a={}", input.ctx.q(), echo_c(echo_a));
    Ok(input.report(
        "finite q-Pochhammer order-shift relation",
        worst.0,
        worst.1,
        fold_dev(&devs),
        echo,
        0,
        started,
    ))
}

pub(crate) fn qpoch_functional(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, 0, 0);
    let mut devs = Vec::new();
    let mut worst = (Complex64::default(), Complex64::default(), 0.0);
    for _ in 0..20 {
        let a = rand_c(&mut rng, 7.0);
        let lhs = qpoch_inf(a, input.ctx);
        let rhs = (1.0 - a) * qpoch_inf(input.ctx.q() * a, input.ctx);
        let d = rel_dev(lhs, rhs);
        if d >= worst.2 {
            worst = (lhs, rhs, d);
        }
        devs.push(d);
    }
    let echo = format!("q={:.16e};draws=20;|a|<10", input.ctx.q());
    Ok(input.report(
        "infinite q-Pochhammer functional equation",
        worst.0,
        worst.1,
        fold_dev(&devs),
        echo,
        0,
        started,
    ))
}

pub(crate) fn theta_quasi_period(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, 0, 0);
    let mut devs = Vec::new();
    let mut worst = (Complex64::default(), Complex64::default(), 0.0);
    let map_err = |e: crate::qcore::QError| CheckError::NonFinite {
        check_id: input.check_id.clone(),
        detail: e.to_string(),
    };
    for _ in 0..20 {
        let mut a = rand_c(&mut rng, 2.0);
        if a.norm() < 0.2 {
            a += Complex64::new(0.5, 0.0);
        }
        let lhs = theta(input.ctx.q() * a, input.ctx).map_err(map_err)?;
        let rhs = -theta(a, input.ctx).map_err(map_err)? / a;
        // spec'd as relative to |theta(a)/a|
        let d = (lhs - rhs).norm() / rhs.norm();
        if d >= worst.2 {
            worst = (lhs, rhs, d);
        }
        devs.push(d);
    }
    let echo = format!("q={:.16e};draws=20", input.ctx.q());
    Ok(input.report(
        "theta quasi-periodicity",
        worst.0,
        worst.1,
        fold_dev(&devs),
        echo,
        0,
        started,
    ))
}

pub(crate) fn theta_inversion(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut rng = trial_rng(input.seed, &input.check_id, 0, 0);
    let mut devs = Vec::new();
    let mut worst = (Complex64::default(), Complex64::default(), 0.0);
    let map_err = |e: crate::qcore::QError| CheckError::NonFinite {
        check_id: input.check_id.clone(),
        detail: e.to_string(),
    };
    for _ in 0..20 {
        let mut a = rand_c(&mut rng, 2.0);
        if a.norm() < 0.2 {
            a += Complex64::new(0.4, 0.3);
        }
        let lhs = theta(input.ctx.q() / a, input.ctx).map_err(map_err)?;
        let rhs = theta(a, input.ctx).map_err(map_err)?;
        let d = rel_dev(lhs, rhs);
        if d >= worst.2 {
            worst = (lhs, rhs, d);
        }
        devs.push(d);
    }
    let echo = format!("q={:.16e};draws=20", input.ctx.q());
    Ok(input.report(
        "theta inversion symmetry",
        worst.0,
        worst.1,
        fold_dev(&devs),
        echo,
        0,
        started,
    ))
}

pub(crate) fn theta_zeros(input: &CheckInput) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for k in -3..=3i64 {
        let v = theta_exp(Complex64::new(k as f64, 0.0), input.ctx).to_complex();
        worst = worst.max(v.norm());
    }
    let echo = format!("q={:.16e};k=-3..3", input.ctx.q());
    Ok(input.report(
        "theta vanishing on the q-power lattice",
        Complex64::new(worst, 0.0),
        Complex64::default(),
        worst,
        echo,
        0,
        started,
    ))
}
