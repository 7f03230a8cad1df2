//! Numerical checks of the convolution and entropy inequalities.

use serde::Serialize;

use super::detail::{detail, DetailValue};
use super::entropy::{entropy_gauss_with_error, entropy_slope, SlopeEstimate};
use super::kernel::KernelConstants;
use super::measure::DiscreteMeasure;
use crate::error::{Error, Result};
use crate::ifs::{certify, k_step_support, UniformIFS};
use crate::verify::fit_slope;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyDetailCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub slope_mu: SlopeEstimate,
    pub slope_nu: SlopeEstimate,
    pub holds: bool,
}

/// `s_r(μ∗ν) ≤ r²κ·√(∂H(μ∗n_u)·∂H(ν∗n_v))` for `r² = u + v`.
pub fn entropy_to_detail_check(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    r: f64,
    u: f64,
    v: f64,
) -> Result<EntropyDetailCheck> {
    if !(r > 0.0 && u > 0.0 && v > 0.0) {
        return Err(Error::invalid("r, u, v must be positive"));
    }
    if (u + v - r * r).abs() > 1e-12 * r * r {
        return Err(Error::invalid(format!("u + v = {} differs from r² = {}", u + v, r * r)));
    }
    let k = KernelConstants::new(mu.dim());
    let lhs = detail(&mu.convolve(nu)?, r)?;
    let slope_mu = entropy_slope(mu, u)?;
    let slope_nu = entropy_slope(nu, v)?;
    let rhs = r * r * k.kappa * (slope_mu.fisher * slope_nu.fisher).sqrt();
    // the two slope estimators bracket the quadrature uncertainty
    let rel = slope_mu.relative_gap() + slope_nu.relative_gap();
    let tolerance = lhs.error + rhs * rel;
    Ok(EntropyDetailCheck {
        lhs: lhs.value,
        rhs,
        tolerance,
        slope_mu,
        slope_nu,
        holds: lhs.value <= rhs + tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvolutionCheck {
    pub alpha1: f64,
    pub alpha2: f64,
    pub c_kd: f64,
    pub lhs: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub grid: Vec<f64>,
    pub holds: bool,
}

/// Points of the `t`-grid used for the suprema.
pub const ALPHA_GRID: usize = 24;

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// `s_r(μ₁∗μ₂) ≤ C_{K,d}·α₁·α₂` with `αᵢ` the largest detail of `μᵢ` over
/// `[r/√2, K·r/√(α₁α₂)]`.
pub fn convolution_detail_check(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    r: f64,
    k: f64,
) -> Result<ConvolutionCheck> {
    if !(r > 0.0) || !(k > 1.0) {
        return Err(Error::invalid("need r > 0 and K > 1"));
    }
    let consts = KernelConstants::new(mu1.dim());
    let (mut a1, mut a2) = (1.0f64, 1.0f64);
    let mut grid = Vec::new();
    let mut err = 0.0f64;
    for _ in 0..2 {
        grid = geometric(r / 2f64.sqrt(), k * r / (a1 * a2).sqrt(), ALPHA_GRID);
        let sup = |m: &DiscreteMeasure| -> Result<DetailValue> {
            grid.iter().try_fold(DetailValue { value: 0.0, error: 0.0 }, |acc, &t| {
                let d = detail(m, t)?;
                Ok(DetailValue {
                    value: acc.value.max(d.value),
                    error: acc.error.max(d.error),
                })
            })
        };
        let (s1, s2) = (sup(mu1)?, sup(mu2)?);
        a1 = s1.value;
        a2 = s2.value;
        err = s1.error.max(s2.error);
    }
    let lhs = detail(&mu1.convolve(mu2)?, r)?;
    let c = consts.c_kd(k);
    let bound = c * a1 * a2;
    let tolerance = lhs.error + c * err * (a1 + a2 + err);
    Ok(ConvolutionCheck {
        alpha1: a1,
        alpha2: a2,
        c_kd: c,
        lhs: lhs.value,
        bound,
        tolerance,
        grid,
        holds: lhs.value <= bound + tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionCheck {
    pub conv: DetailValue,
    pub mu: DetailValue,
    pub nu: DetailValue,
    pub holds: bool,
}

/// `s_r(μ∗ν) ≤ min(s_r(μ), s_r(ν)) + 2·err`.
pub fn contraction_check(mu: &DiscreteMeasure, nu: &DiscreteMeasure, r: f64) -> Result<ContractionCheck> {
    let conv = detail(&mu.convolve(nu)?, r)?;
    let a = detail(mu, r)?;
    let b = detail(nu, r)?;
    let err = conv.error.max(a.error).max(b.error);
    Ok(ContractionCheck {
        holds: conv.value <= a.value.min(b.value) + 2.0 * err,
        conv,
        mu: a,
        nu: b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub atoms: usize,
    pub coarse: f64,
    pub fine: f64,
    pub gap: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapProbe {
    pub m: f64,
    pub splitting_bound: f64,
    pub garsia_entropy: f64,
    /// `d·log M − h_F`.
    pub rate: f64,
    pub rows: Vec<GapRow>,
    pub slope: f64,
    pub holds: bool,
}

/// `H(μₙ∗n_1) − H(μₙ∗n_{M^{−2n}})` for the depth-n support distribution
/// `μₙ`, whose growth in `n` should not exceed `d·log M − h_F`.
pub fn initial_gap_probe(f: &UniformIFS, m: f64, n_grid: &[usize]) -> Result<GapProbe> {
    if n_grid.len() < 2 {
        return Err(Error::invalid("need at least two depths to fit a slope"));
    }
    let n_max = *n_grid.iter().max().expect("nonempty");
    let report = match certify(f, n_max) {
        Ok(r) => r,
        Err(Error::NotCertifiable { report, .. }) => *report,
        Err(e) => return Err(e),
    };
    let bound = report
        .splitting_bound
        .ok_or_else(|| Error::invalid("no splitting bound available for this system"))?;
    if !(m > bound) {
        return Err(Error::invalid(format!("M = {m} must exceed the splitting bound {bound}")));
    }
    let h = report
        .garsia_entropy
        .or_else(|| report.garsia_sequence.last().map(|g| g.1))
        .ok_or(Error::InexactMode)?;
    let d = f.dim() as u32;
    let mut rows = Vec::new();
    for &n in n_grid {
        let level = k_step_support(f, n)?;
        if level.len() < 2 {
            return Err(Error::Degenerate);
        }
        let mu = DiscreteMeasure::from_support(&level, d)?;
        let coarse = entropy_gauss_with_error(&mu, 1.0)?;
        let fine = entropy_gauss_with_error(&mu, m.powf(-2.0 * n as f64))?;
        rows.push(GapRow {
            n,
            atoms: mu.len(),
            coarse: coarse.value,
            fine: fine.value,
            gap: coarse.value - fine.value,
            error: coarse.error + fine.error,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let slope = fit_slope(&xs, &ys);
    let rate = d as f64 * m.ln() - h;
    Ok(GapProbe {
        m,
        splitting_bound: bound,
        garsia_entropy: h,
        rate,
        rows,
        slope,
        holds: slope <= rate + 0.1,
    })
}
