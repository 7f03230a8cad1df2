//! Multi-precision real and complex helpers on top of `astro-float`.
//!
//! Only the handful of operations the root finder and the separation code
//! need are provided. All arithmetic rounds to nearest-even.

use std::sync::OnceLock;

use astro_float::{BigFloat, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_complex::Complex64;

const RM: RoundingMode = RoundingMode::ToEven;

/// Default working precision in bits.
pub const DEFAULT_PRECISION_BITS: usize = 128;

/// Working precision, overridable through `BC_PRECISION_BITS`.
pub fn working_bits() -> usize {
    static BITS: OnceLock<usize> = OnceLock::new();
    *BITS.get_or_init(|| {
        std::env::var("BC_PRECISION_BITS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&b| (64..=4096).contains(&b))
            .unwrap_or(DEFAULT_PRECISION_BITS)
    })
}

pub fn from_f64(x: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(x, p)
}

pub fn from_bigint(n: &BigInt, p: usize) -> BigFloat {
    let (sign, digits) = n.to_u64_digits();
    let mut acc = BigFloat::from_u64(0, p);
    // most significant limb first keeps the intermediate values exact up to p
    for d in digits.iter().rev() {
        let shifted = mul_pow2(&acc, 64);
        acc = shifted.add(&BigFloat::from_u64(*d, p), p, RM);
    }
    if sign == BigSign::Minus {
        acc.neg()
    } else {
        acc
    }
}

fn mul_pow2(x: &BigFloat, k: i32) -> BigFloat {
    if x.is_zero() {
        return x.clone();
    }
    let mut y = x.clone();
    if let Some(e) = y.exponent() {
        y.set_exponent(e + k);
    }
    y
}

/// Nearest `f64` (truncating the mantissa to its top 64 bits first).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((m, _, s, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = m.last().copied().unwrap_or(0);
    let next = if m.len() >= 2 { m[m.len() - 2] } else { 0 };
    let v = top as f64 + (next as f64) * 2f64.powi(-64);
    // two factors so that neither power over- or underflows on its own
    let shift = e - 64;
    let mag = v * 2f64.powi(shift / 2) * 2f64.powi(shift - shift / 2);
    if s == Sign::Neg {
        -mag
    } else {
        mag
    }
}

pub fn add(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.add(b, p, RM)
}

pub fn sub(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.sub(b, p, RM)
}

pub fn mul(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.mul(b, p, RM)
}

pub fn div(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.div(b, p, RM)
}

pub fn sqrt(a: &BigFloat, p: usize) -> BigFloat {
    a.sqrt(p, RM)
}

/// Complex number with `BigFloat` parts.
#[derive(Debug, Clone)]
pub struct HpComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl HpComplex {
    pub fn zero(p: usize) -> Self {
        Self {
            re: BigFloat::from_u64(0, p),
            im: BigFloat::from_u64(0, p),
        }
    }

    pub fn from_c64(z: Complex64, p: usize) -> Self {
        Self {
            re: from_f64(z.re, p),
            im: from_f64(z.im, p),
        }
    }

    pub fn from_real(x: BigFloat, p: usize) -> Self {
        Self {
            re: x,
            im: BigFloat::from_u64(0, p),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }

    pub fn add(&self, o: &Self, p: usize) -> Self {
        Self {
            re: add(&self.re, &o.re, p),
            im: add(&self.im, &o.im, p),
        }
    }

    pub fn sub(&self, o: &Self, p: usize) -> Self {
        Self {
            re: sub(&self.re, &o.re, p),
            im: sub(&self.im, &o.im, p),
        }
    }

    pub fn mul(&self, o: &Self, p: usize) -> Self {
        let rr = mul(&self.re, &o.re, p);
        let ii = mul(&self.im, &o.im, p);
        let ri = mul(&self.re, &o.im, p);
        let ir = mul(&self.im, &o.re, p);
        Self {
            re: sub(&rr, &ii, p),
            im: add(&ri, &ir, p),
        }
    }

    pub fn scale(&self, s: &BigFloat, p: usize) -> Self {
        Self {
            re: mul(&self.re, s, p),
            im: mul(&self.im, s, p),
        }
    }

    pub fn norm_sqr(&self, p: usize) -> BigFloat {
        add(&mul(&self.re, &self.re, p), &mul(&self.im, &self.im, p), p)
    }

    pub fn abs(&self, p: usize) -> BigFloat {
        sqrt(&self.norm_sqr(p), p)
    }

    pub fn div(&self, o: &Self, p: usize) -> Self {
        let den = o.norm_sqr(p);
        let re = add(&mul(&self.re, &o.re, p), &mul(&self.im, &o.im, p), p);
        let im = sub(&mul(&self.im, &o.re, p), &mul(&self.re, &o.im, p), p);
        Self {
            re: div(&re, &den, p),
            im: div(&im, &den, p),
        }
    }

    pub fn recip(&self, p: usize) -> Self {
        let one = HpComplex::from_real(BigFloat::from_u64(1, p), p);
        one.div(self, p)
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}
