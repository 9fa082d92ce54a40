//! Symmetric-group machinery: signed permutations, the skew-symmetrizer,
//! and the difference operators whose lattice integrals vanish.

use num_complex::Complex64;

use super::CheckError;

/// A permutation of `{0, ..., n-1}` by its image vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    pub image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Option<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return None;
            }
            seen[v] = true;
        }
        Some(Permutation { image })
    }

    /// Parity by inversion count.
    pub fn sign(&self) -> f64 {
        let mut inv = 0usize;
        for i in 0..self.image.len() {
            for j in (i + 1)..self.image.len() {
                if self.image[i] > self.image[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 { 1.0 } else { -1.0 }
    }
}

/// All permutations of `{0..n}` with their signs, in lexicographic order.
pub fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push((cur.clone(), Permutation { image: cur.clone() }.sign()));
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Alternating sum over the symmetric group,
/// `sum_sigma sgn(sigma) f(z_{sigma(1)}, ..., z_{sigma(n)})`.
///
/// Guarded at n <= 6 against factorial blowup.
pub fn skew_symmetrize<F>(f: F, n: usize, z: &[Complex64]) -> Result<Complex64, CheckError>
where
    F: Fn(&[Complex64]) -> Complex64,
{
    if n > 6 {
        return Err(CheckError::DimensionTooLarge(n));
    }
    debug_assert_eq!(z.len(), n);
    let mut acc = Complex64::default();
    let mut buf = vec![Complex64::default(); n];
    for (perm, sign) in permutations_with_sign(n) {
        for (slot, &src) in buf.iter_mut().zip(&perm) {
            *slot = z[src];
        }
        acc += sign * f(&buf);
    }
    Ok(acc)
}

/// Difference-operator image `phi(z) - ratio(z, i) * phi(..., q z_i, ...)`,
/// where `ratio` is the weight's shift quotient in exact rational form.
pub fn nabla<F, R>(phi: F, ratio: R, i: usize, q: f64, z: &[Complex64]) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64,
    R: Fn(&[Complex64], usize) -> Complex64,
{
    let mut shifted = z.to_vec();
    shifted[i] *= q;
    phi(z) - ratio(z, i) * phi(&shifted)
}

/// Paired-shift image `phi(z) - ratio(z, i, j) * phi` with `z_i -> q z_i`
/// and `z_j -> z_j / q` together (the balanced-weight operator).
pub fn nabla_pair<F, R>(phi: F, ratio: R, i: usize, j: usize, q: f64, z: &[Complex64]) -> Complex64
where
    F: Fn(&[Complex64]) -> Complex64,
    R: Fn(&[Complex64], usize, usize) -> Complex64,
{
    let mut shifted = z.to_vec();
    shifted[i] *= q;
    shifted[j] /= q;
    phi(z) - ratio(z, i, j) * phi(&shifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(Permutation::new(vec![0, 1, 2]).unwrap().sign(), 1.0);
        assert_eq!(Permutation::new(vec![1, 0, 2]).unwrap().sign(), -1.0);
        assert_eq!(Permutation::new(vec![2, 0, 1]).unwrap().sign(), 1.0);
        assert!(Permutation::new(vec![0, 0, 1]).is_none());
        assert_eq!(permutations_with_sign(4).len(), 24);
    }

    #[test]
    fn symmetric_functions_cancel() {
        let z = [c(0.3, 0.2), c(-1.1, 0.5), c(0.8, -0.4)];
        let f = |w: &[Complex64]| w.iter().sum::<Complex64>() * w.iter().product::<Complex64>();
        let v = skew_symmetrize(f, 3, &z).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn two_term_alternation() {
        // f(z) = z_2 skew-symmetrizes to z_2 - z_1
        let z = [c(0.3, 0.2), c(-1.1, 0.5)];
        let f = |w: &[Complex64]| w[1];
        let v = skew_symmetrize(f, 2, &z).unwrap();
        assert!((v - (z[1] - z[0])).norm() < 1e-15);
    }

    #[test]
    fn dimension_guard() {
        let z = vec![c(1.0, 0.0); 7];
        let f = |w: &[Complex64]| w[0];
        assert!(matches!(
            skew_symmetrize(f, 7, &z),
            Err(CheckError::DimensionTooLarge(7))
        ));
    }
}
