//! Exact arithmetic in ℤ[X]/(m) for a monic integer polynomial `m`.

use std::sync::Arc;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hp;
use crate::polyalg::IntPolynomial;

/// Element of ℤ[X]/(m) stored as its canonical remainder of degree `< deg m`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NumberFieldElement {
    modulus: Arc<IntPolynomial>,
    coeffs: Vec<BigInt>,
}

impl NumberFieldElement {
    pub fn zero(modulus: Arc<IntPolynomial>) -> Result<Self> {
        if !modulus.lead().is_one() {
            return Err(Error::invalid(format!("{modulus} is not monic")));
        }
        if modulus.degree() == 0 {
            return Err(Error::invalid("modulus must have degree >= 1"));
        }
        let n = modulus.degree();
        Ok(Self {
            modulus,
            coeffs: vec![BigInt::zero(); n],
        })
    }

    pub fn from_int(modulus: Arc<IntPolynomial>, c: i64) -> Result<Self> {
        let mut e = Self::zero(modulus)?;
        e.coeffs[0] = BigInt::from(c);
        Ok(e)
    }

    /// The class of `X`, i.e. the algebraic number itself.
    pub fn generator(modulus: Arc<IntPolynomial>) -> Result<Self> {
        let mut e = Self::zero(modulus)?;
        if e.coeffs.len() == 1 {
            // X ≡ −m₀ when m = X + m₀
            e.coeffs[0] = -e.modulus.constant().clone();
        } else {
            e.coeffs[1] = BigInt::one();
        }
        Ok(e)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            modulus: self.modulus.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            modulus: self.modulus.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        Self {
            modulus: self.modulus.clone(),
            coeffs: self.coeffs.iter().map(|c| c * &k).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.coeffs.len();
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        Self {
            modulus: self.modulus.clone(),
            coeffs: reduce(prod, &self.modulus),
        }
    }

    /// Multiplication by the generator `X`.
    pub fn mul_generator(&self) -> Self {
        let mut prod = vec![BigInt::zero()];
        prod.extend(self.coeffs.iter().cloned());
        Self {
            modulus: self.modulus.clone(),
            coeffs: reduce(prod, &self.modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn to_i64s(&self) -> Result<Vec<i64>> {
        self.coeffs
            .iter()
            .map(|c| c.to_i64().ok_or(Error::ArithmeticOverflow))
            .collect()
    }

    /// Value at a real embedding `x` of the generator.
    pub fn eval_hp(&self, x: &BigFloat, bits: usize) -> BigFloat {
        eval_coeffs_hp(&self.coeffs, x, bits)
    }
}

pub(crate) fn eval_coeffs_hp(coeffs: &[BigInt], x: &BigFloat, bits: usize) -> BigFloat {
    let mut acc = BigFloat::from_u64(0, bits);
    for c in coeffs.iter().rev() {
        acc = hp::add(&hp::mul(&acc, x, bits), &hp::from_bigint(c, bits), bits);
    }
    acc
}

fn reduce(mut v: Vec<BigInt>, m: &IntPolynomial) -> Vec<BigInt> {
    let n = m.degree();
    let mc = m.coeffs();
    while v.len() > n {
        let top = v.pop().expect("len > n >= 1");
        if top.is_zero() {
            continue;
        }
        let shift = v.len() - n;
        for (i, c) in mc[..n].iter().enumerate() {
            v[shift + i] -= &top * c;
        }
    }
    v.resize(n, BigInt::zero());
    v
}
