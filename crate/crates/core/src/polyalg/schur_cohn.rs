//! Counting roots inside a disk with the Schur-Cohn recursion.
//!
//! The recursion runs in exact integer arithmetic on `den^n·p(ρX/den)`, so
//! the only floating-point input is the choice of rescaling radius. The
//! count is always cross-checked against the moduli of the computed roots.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::poly::{schur_cohn_transform, IntPolynomial};
use super::roots::{find_roots, RootSet, DEFAULT_ROOT_TOL};
use crate::error::{Error, Result};

/// Minimum distance between any root modulus and the counting radius.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Dyadic denominators tried for the rescaling radius.
const RADIUS_BITS: u32 = 40;

#[derive(Debug, Clone, Serialize)]
pub struct DiskCount {
    pub count: usize,
    /// `false` when every rescaling hit `Tp(0) = 0` and the count comes from
    /// root moduli alone.
    pub verified_by_schur_cohn: bool,
    /// Radius actually used by the exact recursion, as `num / 2^bits`.
    pub rescaled_radius: Option<f64>,
}

/// Number of roots of `p` (with multiplicity) of modulus `< radius`.
pub fn count_roots_in_disk(p: &IntPolynomial, radius: f64) -> Result<DiskCount> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("radius must be positive"));
    }
    if p.degree() == 0 {
        return Ok(DiskCount {
            count: 0,
            verified_by_schur_cohn: true,
            rescaled_radius: Some(radius),
        });
    }
    let roots = find_roots(p, DEFAULT_ROOT_TOL)?;
    count_with_roots(p, radius, &roots)
}

pub fn count_with_roots(p: &IntPolynomial, radius: f64, roots: &RootSet) -> Result<DiskCount> {
    let moduli: Vec<(f64, usize)> = roots
        .roots
        .iter()
        .map(|r| (r.modulus(), r.multiplicity))
        .collect();
    if let Some(&(m, _)) = moduli
        .iter()
        .find(|(m, _)| (m - radius).abs() < BOUNDARY_TOL)
    {
        return Err(Error::BoundaryRoot {
            modulus: m,
            radius,
            threshold: BOUNDARY_TOL,
        });
    }
    let direct: usize = moduli
        .iter()
        .filter(|(m, _)| *m < radius)
        .map(|(_, k)| k)
        .sum();

    // Gap of root-free radii around `radius`.
    let below = moduli
        .iter()
        .map(|(m, _)| *m)
        .filter(|m| *m < radius)
        .fold(0.0, f64::max);
    let above = moduli
        .iter()
        .map(|(m, _)| *m)
        .filter(|m| *m > radius)
        .fold(f64::INFINITY, f64::min);

    for rho in candidate_radii(radius, below, above) {
        let (num, den) = dyadic(rho);
        let scaled = p.rescale(&num, &den);
        if let Some(count) = schur_cohn_unit_disk(&scaled) {
            if count != direct {
                return Err(Error::InconsistentCount {
                    schur_cohn: count,
                    direct,
                });
            }
            return Ok(DiskCount {
                count,
                verified_by_schur_cohn: true,
                rescaled_radius: Some(rho),
            });
        }
    }
    Ok(DiskCount {
        count: direct,
        verified_by_schur_cohn: false,
        rescaled_radius: None,
    })
}

/// The radius itself first, then points inside the root-free gap.
fn candidate_radii(radius: f64, below: f64, above: f64) -> Vec<f64> {
    let mut out = vec![radius];
    let lo = below.max(radius * 0.5);
    let hi = above.min(radius * 2.0);
    for frac in [0.5, 0.25, 0.75, 0.125, 0.875, 0.375, 0.625] {
        out.push(radius + frac * (hi - radius));
        out.push(radius - frac * (radius - lo));
    }
    out.retain(|r| *r > below && *r < above && *r > 0.0);
    out
}

/// Shortest dyadic approximation of `x` kept well inside its gap.
fn dyadic(x: f64) -> (BigInt, BigInt) {
    for bits in 0..=RADIUS_BITS {
        let scale = 2f64.powi(bits as i32);
        let num = (x * scale).round();
        if ((num / scale) - x).abs() <= x * 2f64.powi(-(RADIUS_BITS as i32)) {
            return (BigInt::from(num as i64), BigInt::from(1u64 << bits));
        }
    }
    let scale = 2f64.powi(RADIUS_BITS as i32);
    (
        BigInt::from((x * scale).round() as i64),
        BigInt::from(1u64 << RADIUS_BITS),
    )
}

/// Exact Schur-Cohn count of roots strictly inside the unit disk, assuming
/// none lie on the circle. `None` when some transform has `Tp(0) = 0`.
pub fn schur_cohn_unit_disk(p: &IntPolynomial) -> Option<usize> {
    let mut zeros_at_origin = 0;
    let mut coeffs: Vec<BigInt> = p.coeffs().to_vec();
    while coeffs.len() > 1 && coeffs[0].is_zero() {
        coeffs.remove(0);
        zeros_at_origin += 1;
    }
    let q = IntPolynomial::new(coeffs).ok()?;
    let n = q.degree();
    if n == 0 {
        return Some(zeros_at_origin);
    }
    let a0 = q.constant();
    let an = q.lead();
    let delta = a0 * a0 - an * an;
    if delta.is_zero() {
        return None;
    }
    let t = schur_cohn_transform(&q)?.primitive_part();
    let inner = schur_cohn_unit_disk(&t)?;
    // Rouché on the unit circle: |a0| > |an| means Tp and p have the same
    // interior count, otherwise Tp matches p* whose interior count is n − k.
    let k = if delta.is_positive() { inner } else { n.checked_sub(inner)? };
    Some(zeros_at_origin + k)
}

/// The transform on real coefficients; used to follow the scaled-polynomial
/// argument for the `Xⁿ − 2Xⁿ⁻¹ − X + 1` family in floating point.
pub fn schur_cohn_transform_f64(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    let a0 = coeffs[0];
    let an = coeffs[n];
    (0..=n)
        .map(|k| a0 * coeffs[k] - an * coeffs[n - k])
        .collect()
}
