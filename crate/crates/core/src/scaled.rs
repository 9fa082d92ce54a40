//! Complex values carrying a separate power-of-two exponent.
//!
//! Lattice weights are products of dozens of q-Pochhammer factors whose
//! magnitudes range over thousands of binary orders; plain `f64` arithmetic
//! overflows long before the (bounded) final term is assembled. A [`Scaled`]
//! keeps a complex mantissa near unit magnitude and tracks the excess in an
//! `i64` exponent.

use num_complex::Complex64;

/// `mantissa * 2^exp`, with the mantissa renormalized into a wide band
/// around magnitude one after every operation that can drift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub exp: i64,
}

/// Renormalization band: mantissa norms are kept within 2^±256.
const BAND: i32 = 256;

impl Scaled {
    pub const ONE: Scaled = Scaled {
        mantissa: Complex64::new(1.0, 0.0),
        exp: 0,
    };

    pub const ZERO: Scaled = Scaled {
        mantissa: Complex64::new(0.0, 0.0),
        exp: 0,
    };

    pub fn new(v: Complex64) -> Self {
        Scaled { mantissa: v, exp: 0 }.normalized()
    }

    pub fn from_parts(mantissa: Complex64, exp: i64) -> Self {
        Scaled { mantissa, exp }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.re.is_finite() && self.mantissa.im.is_finite()
    }

    fn normalized(mut self) -> Self {
        let m = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if m == 0.0 {
            self.exp = 0;
            return self;
        }
        if !m.is_finite() {
            return self;
        }
        let e = m.log2();
        if e.abs() as i32 > BAND {
            let shift = e as i64;
            let factor = exp2i(-shift);
            self.mantissa *= factor;
            self.exp += shift;
        }
        self
    }

    pub fn mul(self, rhs: Scaled) -> Scaled {
        Scaled {
            mantissa: self.mantissa * rhs.mantissa,
            exp: self.exp + rhs.exp,
        }
        .normalized()
    }

    pub fn div(self, rhs: Scaled) -> Scaled {
        Scaled {
            mantissa: self.mantissa / rhs.mantissa,
            exp: self.exp - rhs.exp,
        }
        .normalized()
    }

    pub fn mul_c(self, rhs: Complex64) -> Scaled {
        Scaled {
            mantissa: self.mantissa * rhs,
            exp: self.exp,
        }
        .normalized()
    }

    pub fn recip(self) -> Scaled {
        Scaled {
            mantissa: self.mantissa.finv(),
            exp: -self.exp,
        }
        .normalized()
    }

    pub fn neg(self) -> Scaled {
        Scaled {
            mantissa: -self.mantissa,
            exp: self.exp,
        }
    }

    /// Sum with exponent alignment. If the exponents differ by more than the
    /// f64 range the smaller operand is absorbed as zero.
    pub fn add(self, rhs: Scaled) -> Scaled {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let d = lo.exp - hi.exp;
        if d < -1100 {
            return hi;
        }
        Scaled {
            mantissa: hi.mantissa + lo.mantissa * exp2i(d),
            exp: hi.exp,
        }
        .normalized()
    }

    pub fn sub(self, rhs: Scaled) -> Scaled {
        self.add(rhs.neg())
    }

    /// Collapse to a plain complex value. Overflows to infinity / underflows
    /// to zero outside the f64 range, which callers treat as a pole signal.
    pub fn to_complex(self) -> Complex64 {
        if self.exp == 0 {
            return self.mantissa;
        }
        self.mantissa * exp2i(self.exp)
    }

    /// log2 of the magnitude; `-inf` for zero.
    pub fn log2_norm(self) -> f64 {
        self.mantissa.norm().log2() + self.exp as f64
    }
}

/// 2^k as f64 without going through powi's loop.
fn exp2i(k: i64) -> f64 {
    if k >= 1024 {
        f64::INFINITY
    } else if k <= -1075 {
        0.0
    } else if k >= -1022 {
        f64::from_bits(((1023 + k) as u64) << 52)
    } else {
        // subnormal range
        f64::from_bits(1u64 << (52 - (-1022 - k) as u32).min(52))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_many_huge_factors_round_trips() {
        let mut p = Scaled::ONE;
        for _ in 0..200 {
            p = p.mul_c(Complex64::new(1e40, 3e39));
        }
        for _ in 0..200 {
            p = p.div(Scaled::new(Complex64::new(1e40, 3e39)));
        }
        let v = p.to_complex();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-11, "{v}");
    }

    #[test]
    fn add_aligns_exponents() {
        // 2^300 + 2^299 = 3 * 2^299
        let a = Scaled::from_parts(Complex64::new(1.0, 0.0), 300);
        let b = Scaled::from_parts(Complex64::new(1.0, 0.0), 299);
        let s = a.add(b);
        assert!((s.log2_norm() - (299.0 + 3f64.log2())).abs() < 1e-12);
        let tiny = Scaled::from_parts(Complex64::new(1.0, 0.0), -2000);
        assert_eq!(a.add(tiny), a);
    }

    #[test]
    fn exp2i_matches_powi() {
        for k in [-1000i64, -53, -1, 0, 1, 53, 1000] {
            assert_eq!(exp2i(k), 2f64.powi(k as i32));
        }
    }
}
