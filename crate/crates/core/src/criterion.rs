//! The absolute-continuity inequality
//!
//! ```text
//! (d·log M − h)·(log M)² < (1/27)·(log M − log λ⁻¹)³·λ⁴
//! ```
//!
//! and its specialisations. All logarithms are natural, entropies in nats.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::polyalg::{count_with_roots, find_roots, AlgebraicParameter, IntPolynomial, DEFAULT_ROOT_TOL};

/// Absolute tolerance on `M` when bisecting for `F(λ)`.
pub const THRESHOLD_TOL: f64 = 1e-10;
const THRESHOLD_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionInput {
    pub dim: u32,
    /// Natural log of the splitting-rate bound `M`.
    pub log_splitting: f64,
    /// Garsia entropy `h` in nats.
    pub garsia_entropy: f64,
    pub lam: f64,
}

impl CriterionInput {
    pub fn new(dim: u32, log_splitting: f64, garsia_entropy: f64, lam: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !(log_splitting > 0.0) {
            return Err(Error::invalid("log M must be positive"));
        }
        if !(garsia_entropy >= 0.0) {
            return Err(Error::invalid("entropy must be non-negative"));
        }
        if !(lam > 0.0 && lam < 1.0) {
            return Err(Error::invalid("lambda must lie in (0, 1)"));
        }
        Ok(Self {
            dim,
            log_splitting,
            garsia_entropy,
            lam,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub input: CriterionInput,
    #[serde(serialize_with = "sig12")]
    pub lhs: f64,
    #[serde(serialize_with = "sig12")]
    pub rhs: f64,
    #[serde(serialize_with = "sig12")]
    pub margin: f64,
    pub passes: bool,
}

impl CriterionReport {
    fn from_sides(input: CriterionInput, lhs: f64, rhs: f64) -> Self {
        Self {
            input,
            lhs,
            rhs,
            margin: rhs - lhs,
            passes: lhs < rhs,
        }
    }
}

fn sides(input: &CriterionInput) -> (f64, f64) {
    let log_m = input.log_splitting;
    let log_inv_lam = -input.lam.ln();
    let lhs = (input.dim as f64 * log_m - input.garsia_entropy) * log_m * log_m;
    let rhs = (log_m - log_inv_lam).powi(3) * input.lam.powi(4) / 27.0;
    (lhs, rhs)
}

pub fn general_criterion(input: CriterionInput) -> CriterionReport {
    let (lhs, rhs) = sides(&input);
    CriterionReport::from_sides(input, lhs, rhs)
}

/// `d = 1`, `h = log 2`, `M = M_λ`.
pub fn bernoulli_criterion(mahler: f64, lam: f64) -> Result<CriterionReport> {
    if !(lam > 0.5 && lam < 1.0) {
        return Err(Error::invalid("lambda must lie in (1/2, 1)"));
    }
    if !(mahler > 1.0) {
        return Err(Error::invalid("Mahler measure must exceed 1"));
    }
    let input = CriterionInput::new(1, mahler.ln(), std::f64::consts::LN_2, lam)?;
    Ok(general_criterion(input))
}

/// Unique `M > 2` where the Bernoulli criterion is an equality.
pub fn threshold_f(lam: f64) -> Result<f64> {
    if !(lam > 0.5 && lam < 1.0) {
        return Err(Error::invalid("lambda must lie in (1/2, 1)"));
    }
    let g = |m: f64| {
        let (l, r) = sides(&CriterionInput {
            dim: 1,
            log_splitting: m.ln(),
            garsia_entropy: std::f64::consts::LN_2,
            lam,
        });
        l - r
    };
    let mut lo = 2.0;
    if !(g(lo) < 0.0) {
        return Err(Error::NoBracket {
            lam,
            limit: THRESHOLD_LIMIT,
        });
    }
    let mut step = 1e-3;
    let mut hi = lo + step;
    while g(hi) <= 0.0 {
        lo = hi;
        step *= 2.0;
        hi = 2.0 + step;
        if hi > THRESHOLD_LIMIT {
            return Err(Error::NoBracket {
                lam,
                limit: THRESHOLD_LIMIT,
            });
        }
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `steps` evenly spaced values of `λ` from `lo` to `hi` inclusive.
pub fn f_graph(lo: f64, hi: f64, steps: usize) -> Result<Vec<(f64, f64)>> {
    if !(0.5 < lo && lo < hi && hi < 1.0) {
        return Err(Error::invalid("need 1/2 < lo < hi < 1"));
    }
    if steps < 2 {
        return Err(Error::invalid("need at least two grid points"));
    }
    (0..steps)
        .map(|i| {
            let lam = if i == steps - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            };
            threshold_f(lam).map(|f| (lam, f))
        })
        .collect()
}

pub fn f_graph_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("lambda,F\n");
    for (l, f) in rows {
        s.push_str(&format!("{l},{f}\n"));
    }
    s
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The polynomial `Xⁿ − 2Xⁿ⁻¹ − X + 1`.
pub fn family_polynomial(n: usize) -> IntPolynomial {
    let mut c = vec![0i64; n + 1];
    c[0] = 1;
    c[1] -= 1;
    c[n - 1] -= 2;
    c[n] += 1;
    IntPolynomial::from_i64s(&c).expect("leading coefficient 1")
}

/// Lower end `(1/2)^{2/√(n−1)}` of the interval holding `λₙ`.
pub fn family_lambda_lower(n: usize) -> f64 {
    0.5f64.powf(2.0 / ((n - 1) as f64).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyCheck {
    pub n: usize,
    /// Verdict using `M ≤ 2 + 2^{2−n}` and `λ ≥ (1/2)^{2/√(n−1)}`.
    pub bound: CriterionReport,
    /// Verdict at the exact root and Mahler measure.
    pub exact: CriterionReport,
    pub lambda: f64,
    pub lambda_lower: f64,
    pub mahler: f64,
    pub large_root: f64,
    /// Roots strictly inside the unit disk other than `λₙ`.
    pub interior_others: usize,
    pub schur_cohn_verified: bool,
}

pub fn family_check(n: usize) -> Result<FamilyCheck> {
    if n < 5 {
        return Err(Error::invalid("family requires n >= 5"));
    }
    let ln2 = std::f64::consts::LN_2;
    let m_bound = 2.0 + 2f64.powi(2 - n as i32);
    let lam_lower = family_lambda_lower(n);
    let s = ((n - 1) as f64).sqrt();
    let lhs = (m_bound.ln() - ln2) * m_bound.ln().powi(2);
    let rhs = (ln2 - (2.0 / s) * ln2).powi(3) * 2f64.powf(-8.0 / s) / 27.0;
    let bound = CriterionReport::from_sides(
        CriterionInput {
            dim: 1,
            log_splitting: m_bound.ln(),
            garsia_entropy: ln2,
            lam: lam_lower,
        },
        lhs,
        rhs,
    );

    let p = family_polynomial(n);
    let roots = find_roots(&p, DEFAULT_ROOT_TOL)?;
    let cands = AlgebraicParameter::select(&p, &roots, lam_lower, 1.0);
    let lam = cands
        .first()
        .ok_or_else(|| Error::invalid(format!("no root of {p} in ({lam_lower}, 1)")))?;
    let large_root = roots
        .approx()
        .iter()
        // within 2^{2−n} of 2, so below f64 resolution for large n
        .filter(|z| z.im == 0.0 && z.re > 1.5)
        .map(|z| z.re)
        .fold(f64::NAN, f64::max);
    let disk = count_with_roots(&p, 1.0, &roots)?;
    let exact = bernoulli_criterion(lam.mahler, lam.lambda())?;
    Ok(FamilyCheck {
        n,
        bound,
        exact,
        lambda: lam.lambda(),
        lambda_lower: lam_lower,
        mahler: lam.mahler,
        large_root,
        interior_others: disk.count.saturating_sub(1),
        schur_cohn_verified: disk.verified_by_schur_cohn,
    })
}

/// `log(1 + 1/(q−1)) < (1/27)(log(q−1)/log q)²·log(q−1)·((q−1)/q)⁴`.
pub fn q_family_check(q: u64) -> Result<CriterionReport> {
    if q < 3 || !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let qf = q as f64;
    let lq = qf.ln();
    let lq1 = (qf - 1.0).ln();
    let lhs = (1.0 / (qf - 1.0)).ln_1p();
    let rhs = (lq1 / lq).powi(2) * lq1 * ((qf - 1.0) / qf).powi(4) / 27.0;
    Ok(CriterionReport::from_sides(
        CriterionInput {
            dim: 1,
            log_splitting: lq,
            garsia_entropy: lq1,
            lam: (qf - 1.0) / qf,
        },
        lhs,
        rhs,
    ))
}

/// `(2 log p − log m)(log p)² < (1/27)(2 log p − log(p/(p−1)))³((p−1)/p)⁴`.
pub fn gauss2d_check(p: u64, m: u64) -> Result<CriterionReport> {
    if !is_prime(p) || p % 4 != 3 {
        return Err(Error::BadPrime(p));
    }
    if m < 2 || m > p * p {
        return Err(Error::invalid(format!("need 2 <= m <= p^2, got m = {m}")));
    }
    let pf = p as f64;
    let lp = pf.ln();
    let lhs = (2.0 * lp - (m as f64).ln()) * lp * lp;
    let rhs = (2.0 * lp - (pf / (pf - 1.0)).ln()).powi(3) * ((pf - 1.0) / pf).powi(4) / 27.0;
    let lam = ((pf - 1.0).powi(2) + 1.0).sqrt() / pf;
    Ok(CriterionReport::from_sides(
        CriterionInput {
            dim: 2,
            log_splitting: lp,
            garsia_entropy: (m as f64).ln(),
            lam,
        },
        lhs,
        rhs,
    ))
}
