//! Simultaneous root finding (Aberth-Ehrlich) with multi-precision polish.
//!
//! Roots are first located in `f64`, then refined by Aberth steps at the
//! working precision and finally polished by Newton steps at twice that
//! precision. Multiple roots are handled by an exact square-free
//! decomposition before any floating-point work.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_complex::Complex64;
use serde::Serialize;

use super::poly::IntPolynomial;
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex};

/// Default bound on `|p(root)|`.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

const MAX_F64_ROUNDS: usize = 500;
const MAX_HP_ROUNDS: usize = 60;

#[derive(Debug, Clone)]
pub struct Root {
    pub value: HpComplex,
    pub multiplicity: usize,
}

impl Root {
    pub fn approx(&self) -> Complex64 {
        self.value.to_c64()
    }

    pub fn modulus(&self) -> f64 {
        self.approx().norm()
    }
}

/// All complex roots of a polynomial with multiplicities, sorted by real
/// part then imaginary part.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub residual_bound: f64,
    pub precision_bits: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootRecord {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub multiplicity: usize,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn approx(&self) -> Vec<Complex64> {
        self.roots.iter().map(Root::approx).collect()
    }

    /// Roots with multiplicity expanded.
    pub fn approx_with_multiplicity(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.approx()).take(r.multiplicity))
            .collect()
    }

    /// Roots whose imaginary part vanishes to within `2^{-bits/2}`.
    pub fn real_roots(&self) -> Vec<(BigFloat, usize)> {
        let tol = 2f64.powi(-(self.precision_bits as i32) / 2).max(1e-30);
        self.roots
            .iter()
            .filter(|r| {
                let z = r.approx();
                z.im.abs() <= tol * z.norm().max(1.0)
            })
            .map(|r| (r.value.re.clone(), r.multiplicity))
            .collect()
    }

    pub fn records(&self) -> Vec<RootRecord> {
        self.roots
            .iter()
            .map(|r| {
                let z = r.approx();
                RootRecord {
                    re: z.re,
                    im: z.im,
                    modulus: z.norm(),
                    multiplicity: r.multiplicity,
                }
            })
            .collect()
    }
}

/// Roots of `p` to within `tol` in residual, at the working precision.
pub fn find_roots(p: &IntPolynomial, tol: f64) -> Result<RootSet> {
    find_roots_with_precision(p, tol, hp::working_bits())
}

pub fn find_roots_with_precision(p: &IntPolynomial, tol: f64, bits: usize) -> Result<RootSet> {
    if p.degree() == 0 {
        return Err(Error::invalid("find_roots needs degree >= 1"));
    }
    let mut roots = Vec::with_capacity(p.degree());
    for (factor, mult) in p.squarefree_decomposition() {
        for z in simple_roots(&factor, bits)? {
            roots.push(Root {
                value: z,
                multiplicity: mult,
            });
        }
    }
    roots.sort_by(|a, b| cmp_complex(a.approx(), b.approx()));

    let mut residual: f64 = 0.0;
    for r in &roots {
        let v = p.eval_hp(&r.value, bits).abs(bits);
        residual = residual.max(hp::to_f64(&v));
    }
    if !(residual <= tol) {
        return Err(Error::NonConvergence {
            degree: p.degree(),
            rounds: MAX_HP_ROUNDS,
        });
    }
    Ok(RootSet {
        roots,
        residual_bound: residual,
        precision_bits: bits,
    })
}

fn cmp_complex(a: Complex64, b: Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Roots in `f64` only; used by cheap screens where a few ulps suffice.
pub fn roots_f64(p: &IntPolynomial) -> Result<Vec<Complex64>> {
    let coeffs = p.coeffs_f64();
    aberth_f64(&coeffs).ok_or(Error::NonConvergence {
        degree: p.degree(),
        rounds: MAX_F64_ROUNDS,
    })
}

/// Initial points on the circle of radius `max(1, 1 + max|aᵢ/aₙ|)`.
fn initial_points(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let bound = coeffs[..n]
        .iter()
        .map(|c| (c / lead).abs())
        .fold(0.0, f64::max);
    let radius = (1.0 + bound).max(1.0);
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn horner_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Aberth-Ehrlich in double precision (Gauss-Seidel updates).
///
/// Returns `None` if some iterate becomes non-finite. Stagnation at
/// roundoff level is not an error; the multi-precision stage finishes the
/// job.
pub(crate) fn aberth_f64(coeffs: &[f64]) -> Option<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Some(Vec::new());
    }
    if n == 1 {
        return Some(vec![Complex64::new(-coeffs[0] / coeffs[1], 0.0)]);
    }
    let mut z = initial_points(coeffs);
    let mut done = vec![false; n];
    for _ in 0..MAX_F64_ROUNDS {
        let mut active = false;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (pv, dpv) = horner_with_derivative(coeffs, z[k]);
            if pv.norm() == 0.0 {
                done[k] = true;
                continue;
            }
            let ratio = pv / dpv;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[k] -= step;
            if step.norm() <= 1e-15 * z[k].norm().max(1e-300) {
                done[k] = true;
            } else {
                active = true;
            }
        }
        if !active {
            break;
        }
    }
    z.iter()
        .all(|w| w.re.is_finite() && w.im.is_finite())
        .then_some(z)
}

/// Roots of a square-free polynomial at `bits` precision.
fn simple_roots(p: &IntPolynomial, bits: usize) -> Result<Vec<HpComplex>> {
    let n = p.degree();
    let non_conv = Error::NonConvergence {
        degree: n,
        rounds: MAX_HP_ROUNDS,
    };
    let start = aberth_f64(&p.coeffs_f64()).ok_or(Error::NonConvergence {
        degree: n,
        rounds: MAX_F64_ROUNDS,
    })?;
    let dp = match p.derivative() {
        Some(d) => d,
        None => return Ok(Vec::new()),
    };

    let mut z: Vec<HpComplex> = start.iter().map(|&w| HpComplex::from_c64(w, bits)).collect();
    let eps = 2f64.powi(-(bits as i32) + 8);
    let mut converged = vec![false; n];
    for _ in 0..MAX_HP_ROUNDS {
        let mut active = false;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let pv = p.eval_hp(&z[k], bits);
            if pv.is_zero() {
                converged[k] = true;
                continue;
            }
            let dpv = dp.eval_hp(&z[k], bits);
            let ratio = pv.div(&dpv, bits);
            let mut sum = HpComplex::zero(bits);
            for j in 0..n {
                if j != k {
                    sum = sum.add(&z[k].sub(&z[j], bits).recip(bits), bits);
                }
            }
            let one = HpComplex::from_c64(Complex64::new(1.0, 0.0), bits);
            let step = ratio.div(&one.sub(&ratio.mul(&sum, bits), bits), bits);
            let step_size = step.to_c64().norm();
            if !step_size.is_finite() {
                return Err(non_conv);
            }
            z[k] = z[k].sub(&step, bits);
            if step_size <= eps * z[k].to_c64().norm().max(1e-300) {
                converged[k] = true;
            } else {
                active = true;
            }
        }
        if !active {
            break;
        }
    }
    if converged.iter().any(|c| !c) {
        return Err(non_conv);
    }

    // Newton polish at twice the working precision.
    let pp = 2 * bits;
    for w in z.iter_mut() {
        let mut v = HpComplex {
            re: widen(&w.re, pp),
            im: widen(&w.im, pp),
        };
        for _ in 0..2 {
            let pv = p.eval_hp(&v, pp);
            if pv.is_zero() {
                break;
            }
            let dpv = dp.eval_hp(&v, pp);
            v = v.sub(&pv.div(&dpv, pp), pp);
        }
        *w = HpComplex {
            re: narrow(&v.re, bits),
            im: narrow(&v.im, bits),
        };
    }

    // Conjugate pairs of a real polynomial: snap near-real roots onto the axis
    // so that real roots compare cleanly.
    let snap = 2f64.powi(-(bits as i32) / 2);
    for w in z.iter_mut() {
        let c = w.to_c64();
        if c.im.abs() <= snap * c.norm().max(1.0) {
            w.im = BigFloat::from_u64(0, bits);
        }
    }

    // Distinct roots expected for a square-free input.
    let approx: Vec<Complex64> = z.iter().map(HpComplex::to_c64).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (approx[i] - approx[j]).norm() <= 1e-13 * approx[i].norm().max(1.0) {
                return Err(non_conv);
            }
        }
    }
    Ok(z)
}

fn widen(x: &BigFloat, p: usize) -> BigFloat {
    let mut y = x.clone();
    let _ = y.set_precision(p, astro_float::RoundingMode::ToEven);
    y
}

fn narrow(x: &BigFloat, p: usize) -> BigFloat {
    widen(x, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn x2_minus_1() {
        let rs = find_roots(&p("X^2-1"), DEFAULT_ROOT_TOL).unwrap();
        let v = rs.approx();
        assert_eq!(v.len(), 2);
        assert!((v[0].re + 1.0).abs() < 1e-15 && v[0].im == 0.0);
        assert!((v[1].re - 1.0).abs() < 1e-15 && v[1].im == 0.0);
    }

    #[test]
    fn golden_ratio_roots() {
        // quadratic formula oracle
        let s5 = 5f64.sqrt();
        let want = [(1.0 - s5) / 2.0, (1.0 + s5) / 2.0];
        let v = find_roots(&p("X^2-X-1"), DEFAULT_ROOT_TOL).unwrap().approx();
        for (z, w) in v.iter().zip(want) {
            assert!((z.re - w).abs() < 1e-15, "{z} vs {w}");
        }
        assert!((v[1].re - 1.618_034).abs() < 1e-6);
        assert!((v[0].re + 0.618_034).abs() < 1e-6);
    }

    #[test]
    fn table_polynomial_roots() {
        let q = p("X^9-2X^8-X+1");
        let rs = find_roots(&q, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(rs.len(), 9);
        let reals: Vec<f64> = rs.real_roots().iter().map(|(x, _)| hp::to_f64(x)).collect();
        assert!(reals.iter().any(|&x| (x - 0.799_533).abs() < 1e-6), "{reals:?}");
        let n = 9;
        let hi = 2.0 + 2f64.powi(2 - n);
        assert!(reals.iter().any(|&x| x > 2.0 && x < hi));
        assert!(rs.residual_bound <= DEFAULT_ROOT_TOL);
    }

    #[test]
    fn multiplicities_sum_to_degree() {
        let q = p("X^5-3X^4+3X^3-X^2"); // X²(X−1)³
        let rs = find_roots(&q, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(rs.len(), 5);
        let mults: Vec<usize> = rs.roots.iter().map(|r| r.multiplicity).collect();
        assert_eq!(mults, vec![2, 3]);
    }

    #[test]
    fn ordering_by_real_then_imaginary() {
        let rs = find_roots(&p("X^4-1"), DEFAULT_ROOT_TOL).unwrap();
        let v = rs.approx();
        assert!((v[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!((v[1] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((v[2] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((v[3] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(find_roots(&p("3"), DEFAULT_ROOT_TOL).is_err());
    }

    #[test]
    fn high_degree_family_member() {
        let n = 40;
        let mut c = vec![0i64; n + 1];
        c[0] = 1;
        c[1] = -1;
        c[n - 1] = -2;
        c[n] = 1;
        let q = IntPolynomial::from_i64s(&c).unwrap();
        let rs = find_roots(&q, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(rs.len(), n);
        assert!(rs.residual_bound < 1e-20);
    }
}
