use astro_float::BigFloat;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::irreducible::is_irreducible;
use super::poly::IntPolynomial;
use super::roots::{find_roots, RootSet, DEFAULT_ROOT_TOL};
use crate::error::{Error, Result};
use crate::hp;

/// Tolerance on `||α| − 1|` when counting conjugates on the unit circle.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// `|lead| · ∏ max(|α|, 1)` over the roots of `p`.
pub fn mahler_measure(p: &IntPolynomial) -> Result<f64> {
    if p.degree() == 0 {
        return Err(Error::invalid("mahler_measure needs degree >= 1"));
    }
    let roots = find_roots(p, DEFAULT_ROOT_TOL)?;
    Ok(mahler_from_roots(p, &roots))
}

pub fn mahler_from_roots(p: &IntPolynomial, roots: &RootSet) -> f64 {
    let bits = roots.precision_bits;
    let mut acc = hp::from_bigint(&p.lead().abs(), bits);
    let one = BigFloat::from_u64(1, bits);
    for r in &roots.roots {
        let m = r.value.abs(bits);
        if m.cmp(&one).is_some_and(|c| c > 0) {
            for _ in 0..r.multiplicity {
                acc = hp::mul(&acc, &m, bits);
            }
        }
    }
    hp::to_f64(&acc)
}

/// A contraction ratio `λ ∈ (0, 1)` together with its minimal polynomial
/// and conjugates.
#[derive(Debug, Clone)]
pub struct AlgebraicParameter {
    pub min_poly: IntPolynomial,
    pub value: BigFloat,
    pub conjugates: RootSet,
    pub mahler: f64,
    pub modulus_one_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraicSummary {
    pub min_poly: String,
    pub lambda: f64,
    pub mahler: f64,
    pub modulus_one_count: usize,
    pub max_conjugate_modulus: f64,
}

impl AlgebraicParameter {
    /// Every real root of `min_poly` in the open interval `(lo, hi)`.
    ///
    /// Fails unless `min_poly` is irreducible.
    pub fn real_roots_in(min_poly: &IntPolynomial, lo: f64, hi: f64) -> Result<Vec<Self>> {
        if !is_irreducible(min_poly)? {
            return Err(Error::invalid(format!("{min_poly} is not irreducible")));
        }
        let conjugates = find_roots(min_poly, DEFAULT_ROOT_TOL)?;
        Ok(Self::select(min_poly, &conjugates, lo, hi))
    }

    /// Like [`Self::real_roots_in`] but skips the irreducibility check, for
    /// callers that already established it.
    pub(crate) fn select(
        min_poly: &IntPolynomial,
        conjugates: &RootSet,
        lo: f64,
        hi: f64,
    ) -> Vec<Self> {
        let mahler = mahler_from_roots(min_poly, conjugates);
        let on_circle = conjugates
            .approx_with_multiplicity()
            .iter()
            .filter(|z| (z.norm() - 1.0).abs() < UNIT_CIRCLE_TOL)
            .count();
        conjugates
            .real_roots()
            .into_iter()
            .filter(|(x, _)| {
                let v = hp::to_f64(x);
                v > lo && v < hi
            })
            .map(|(x, _)| Self {
                min_poly: min_poly.clone(),
                value: x,
                conjugates: conjugates.clone(),
                mahler,
                modulus_one_count: on_circle,
            })
            .collect()
    }

    /// The real root of `min_poly` in `(0, 1)` closest to `approx`.
    pub fn nearest(min_poly: &IntPolynomial, approx: f64) -> Result<Self> {
        Self::real_roots_in(min_poly, 0.0, 1.0)?
            .into_iter()
            .min_by(|a, b| {
                (a.lambda() - approx)
                    .abs()
                    .total_cmp(&(b.lambda() - approx).abs())
            })
            .ok_or_else(|| Error::invalid(format!("{min_poly} has no real root in (0, 1)")))
    }

    pub fn lambda(&self) -> f64 {
        hp::to_f64(&self.value)
    }

    pub fn max_conjugate_modulus(&self) -> f64 {
        self.conjugates
            .approx()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// A conjugate of modulus above 2 rules out λ being a root of any nonzero
    /// polynomial with coefficients in {−1, 0, 1}.
    pub fn has_conjugate_above_two(&self) -> bool {
        self.max_conjugate_modulus() > 2.0
    }

    pub fn is_monic(&self) -> bool {
        self.min_poly.lead().abs().to_i64() == Some(1)
    }

    pub fn summary(&self) -> AlgebraicSummary {
        AlgebraicSummary {
            min_poly: self.min_poly.to_string(),
            lambda: self.lambda(),
            mahler: self.mahler,
            modulus_one_count: self.modulus_one_count,
            max_conjugate_modulus: self.max_conjugate_modulus(),
        }
    }
}
