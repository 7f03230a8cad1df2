//! Differential entropy and Fisher information of `μ ∗ n_y`.

use std::cell::{Cell, RefCell};

use serde::Serialize;

use super::kernel::heat_kernel_r2;
use super::measure::DiscreteMeasure;
use super::quad::{adaptive, merged_windows, mesh, QuadOptions, QuadResult};
use crate::error::{Error, Result};

/// Padding and evaluation window, in standard deviations.
const PAD: f64 = 12.0;
/// Relative step of the central difference in `y`.
pub const FD_STEP: f64 = 1e-4;

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-14,
        max_evals: 100_000_000,
    }
}

/// `∫ φ(f, |∇f|²)` for the density `f = μ ∗ n_y`.
fn density_integral(
    mu: &DiscreteMeasure,
    y: f64,
    phi: &(dyn Fn(f64, f64) -> f64 + Sync),
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid(format!("variance {y} must be positive")));
    }
    let s = y.sqrt();
    let w = PAD * s;
    let (pts, wts) = (mu.points(), mu.weights());
    let outer = merged_windows(pts.iter().map(|p| p[0]), w);
    let cells: Vec<(f64, f64)> = outer.iter().flat_map(|&(a, b)| mesh(a, b, s / 2.0)).collect();
    if mu.dim() == 1 {
        let g = |x: f64| {
            let (mut f, mut df) = (0.0, 0.0);
            for i in mu.x_range(x - w, x + w) {
                let d = x - pts[i][0];
                let n = wts[i] * heat_kernel_r2(d * d, y, 1);
                f += n;
                df -= d / y * n;
            }
            if f > 0.0 {
                phi(f, df * df)
            } else {
                0.0
            }
        };
        return adaptive(&g, &cells, opts);
    }
    let outer_len: f64 = outer.iter().map(|s| s.1 - s.0).sum();
    let inner_opts = QuadOptions {
        abs_tol: 1e-2 * opts.abs_tol / outer_len,
        rel_tol: 1e-13,
        ..*opts
    };
    let worst_inner = Cell::new(0.0f64);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let column = |x1: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let mut near: Vec<(f64, f64, f64)> = mu
            .x_range(x1 - w, x1 + w)
            .map(|i| (pts[i][1], x1 - pts[i][0], wts[i]))
            .collect();
        if near.is_empty() {
            return 0.0;
        }
        near.sort_by(|a, b| a.0.total_cmp(&b.0));
        let g = |x2: f64| {
            let (mut f, mut g1, mut g2) = (0.0, 0.0, 0.0);
            let lo = near.partition_point(|a| a.0 < x2 - w);
            for &(a2, d1, wt) in near[lo..].iter().take_while(|a| a.0 <= x2 + w) {
                let d2 = x2 - a2;
                let n = wt * heat_kernel_r2(d1 * d1 + d2 * d2, y, 2);
                f += n;
                g1 -= d1 / y * n;
                g2 -= d2 / y * n;
            }
            if f > 0.0 {
                phi(f, g1 * g1 + g2 * g2)
            } else {
                0.0
            }
        };
        let segs: Vec<(f64, f64)> = merged_windows(near.iter().map(|a| a.0), w)
            .into_iter()
            .flat_map(|(a, b)| mesh(a, b, s / 2.0))
            .collect();
        match adaptive(&g, &segs, &inner_opts) {
            Ok(r) => {
                worst_inner.set(worst_inner.get().max(r.error));
                r.value
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let res = adaptive(&column, &cells, opts);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let res = res?;
    Ok(QuadResult {
        error: res.error + worst_inner.get() * outer_len,
        ..res
    })
}

/// `H(μ ∗ n_y) = −∫ f log f` in nats.
pub fn entropy_gauss(mu: &DiscreteMeasure, y: f64) -> Result<f64> {
    Ok(entropy_gauss_with_error(mu, y)?.value)
}

pub fn entropy_gauss_with_error(mu: &DiscreteMeasure, y: f64) -> Result<QuadResult> {
    density_integral(mu, y, &|f, _| -f * f.ln(), &opts())
}

/// `(1/2)∫|∇f|²/f`, which equals `∂y H(μ ∗ n_y)`.
pub fn fisher_slope(mu: &DiscreteMeasure, y: f64) -> Result<f64> {
    let r = density_integral(mu, y, &|f, g2| g2 / f, &opts())?;
    Ok(0.5 * r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub finite_difference: f64,
    pub fisher: f64,
}

impl SlopeEstimate {
    pub fn relative_gap(&self) -> f64 {
        (self.finite_difference - self.fisher).abs() / self.fisher.abs()
    }
}

/// `∂y H(μ ∗ n_y)` by a central difference and by Fisher information.
pub fn entropy_slope(mu: &DiscreteMeasure, y: f64) -> Result<SlopeEstimate> {
    let h = FD_STEP * y;
    let hi = entropy_gauss(mu, y + h)?;
    let lo = entropy_gauss(mu, y - h)?;
    Ok(SlopeEstimate {
        finite_difference: (hi - lo) / (2.0 * h),
        fisher: fisher_slope(mu, y)?,
    })
}
