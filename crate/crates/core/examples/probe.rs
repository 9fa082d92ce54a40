use qjackson_core::verify::sample::*;
use rand::Rng;
fn main() {
    // scan the trial seeds the CLI derives for mg.poly_expansion
    for n in [2usize, 3] {
        for trial in 0..20u32 {
            let seed = 0u64.wrapping_add((trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let id = format!("mg.poly_expansion.n{n}");
            let mut rng = trial_rng(seed, &id, n, 0);
            // mimic sample_mg Standard with attempt counting
            let mut attempts = 0usize;
            let mut found = false;
            for _ in 0..10_000 {
                attempts += 1;
                let (sum_range, alpha_frac): ((f64, f64), (f64, f64)) = if n >= 3 {
                    ((0.1, 0.16), (0.45, 0.58))
                } else {
                    ((0.2, 0.35), (0.4, 0.6))
                };
                let draw = |rng: &mut rand_chacha::ChaCha8Rng, count: usize, lo: f64, hi: f64| -> Vec<num_complex::Complex64> {
                    let target = rng.gen_range(lo..hi);
                    let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.5..1.5)).collect();
                    let tot: f64 = raw.iter().sum();
                    raw.iter().map(|&u| num_complex::Complex64::new(u * target / tot, rng.gen_range(-0.1..0.1))).collect()
                };
                let alphas = draw(&mut rng, n, sum_range.0 * 0.5, sum_range.1 * 0.5);
                let betas = draw(&mut rng, n, sum_range.0 * 0.5, sum_range.1 * 0.5);
                let s: num_complex::Complex64 = alphas.iter().sum::<num_complex::Complex64>() + betas.iter().sum::<num_complex::Complex64>();
                let w = 1.0 - s.re;
                let alpha = num_complex::Complex64::new(w * rng.gen_range(alpha_frac.0..alpha_frac.1), rng.gen_range(-0.1..0.1));
                let p = match qjackson_core::families::mg::MGParams::new(alphas, betas, alpha) { Ok(p) => p, Err(_) => continue };
                let mut ok = p.convergence_margin() >= 0.05;
                for i in 0..n { for j in 0..n {
                    if i != j {
                        ok &= frac_dist((p.alpha_exp[i]-p.alpha_exp[j]).re) >= SEP_MARGIN;
                        ok &= frac_dist((p.beta_exp[i]-p.beta_exp[j]).re) >= SEP_MARGIN;
                    }
                    ok &= frac_dist((p.alpha_exp[i]+p.beta_exp[j]).re) >= POLE_MARGIN;
                }}
                ok &= frac_dist((p.alpha + p.sum_exponents()).re) >= POLE_MARGIN;
                if ok { found = true; break; }
            }
            if !found || attempts > 2000 {
                println!("n={n} trial={trial} attempts={attempts} found={found}");
            }
        }
    }
    println!("scan done");
}
