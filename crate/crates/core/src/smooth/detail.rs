use std::cell::{Cell, RefCell};

use serde::Serialize;

use super::kernel::{kernel_dy_r2, KernelConstants};
use super::measure::DiscreteMeasure;
use super::quad::{abs_integral, adaptive, merged_windows, mesh, QuadOptions};
use crate::error::{Error, Result};

/// Largest measure `detail` accepts.
pub const DETAIL_ATOM_LIMIT: usize = 1 << 20;
/// Padding and evaluation window, in units of `r`.
const PAD: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetailValue {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct DetailOptions {
    /// Target absolute error on `s_r`.
    pub tol: f64,
    pub max_evals: usize,
}

impl Default for DetailOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_evals: 200_000_000,
        }
    }
}

/// `s_r(μ) = r²κ‖μ ∗ ∂y n_y‖₁` at `y = r²`.
pub fn detail(mu: &DiscreteMeasure, r: f64) -> Result<DetailValue> {
    detail_with(mu, r, &DetailOptions::default())
}

pub fn detail_with(mu: &DiscreteMeasure, r: f64, opts: &DetailOptions) -> Result<DetailValue> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("scale {r} must be positive")));
    }
    if mu.len() > DETAIL_ATOM_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "{} atoms exceed the detail limit {DETAIL_ATOM_LIMIT}",
            mu.len()
        )));
    }
    let k = KernelConstants::new(mu.dim());
    let y = r * r;
    let scale = y * k.kappa;
    let quad = QuadOptions {
        abs_tol: opts.tol / scale,
        rel_tol: 0.0,
        max_evals: opts.max_evals,
    };
    let (integral, qerr) = match mu.dim() {
        1 => l1_norm_1d(mu, r, &quad)?,
        _ => l1_norm_2d(mu, r, &quad)?,
    };
    // mass outside the domain plus mass dropped by windowed evaluation
    let tail = 2.0 * k.tail(PAD * r, y);
    Ok(DetailValue {
        value: scale * integral,
        error: scale * (qerr + tail),
    })
}

fn l1_norm_1d(mu: &DiscreteMeasure, r: f64, quad: &QuadOptions) -> Result<(f64, f64)> {
    let y = r * r;
    let w = PAD * r;
    let (pts, wts) = (mu.points(), mu.weights());
    let g = |x: f64| {
        mu.x_range(x - w, x + w)
            .map(|i| {
                let d = x - pts[i][0];
                wts[i] * kernel_dy_r2(d * d, y, 1)
            })
            .sum::<f64>()
    };
    let segs = merged_windows(pts.iter().map(|p| p[0]), w);
    let res = abs_integral(&g, &segs, r / 32.0, quad)?;
    Ok((res.value, res.error))
}

/// Iterated quadrature: the inner `|g|` integral over the second
/// coordinate, the outer adaptive rule over the first.
fn l1_norm_2d(mu: &DiscreteMeasure, r: f64, quad: &QuadOptions) -> Result<(f64, f64)> {
    let y = r * r;
    let w = PAD * r;
    let (pts, wts) = (mu.points(), mu.weights());
    let outer = merged_windows(pts.iter().map(|p| p[0]), w);
    let outer_len: f64 = outer.iter().map(|s| s.1 - s.0).sum();
    let inner_opts = QuadOptions {
        abs_tol: 1e-2 * quad.abs_tol / outer_len,
        rel_tol: 0.0,
        max_evals: quad.max_evals,
    };
    let worst_inner = Cell::new(0.0f64);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let column = |x1: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let mut near: Vec<(f64, f64, f64)> = mu
            .x_range(x1 - w, x1 + w)
            .map(|i| {
                let d = x1 - pts[i][0];
                (pts[i][1], d * d, wts[i])
            })
            .collect();
        if near.is_empty() {
            return 0.0;
        }
        near.sort_by(|a, b| a.0.total_cmp(&b.0));
        let g = |x2: f64| {
            let lo = near.partition_point(|a| a.0 < x2 - w);
            near[lo..]
                .iter()
                .take_while(|a| a.0 <= x2 + w)
                .map(|&(a2, dx2, wt)| {
                    let d = x2 - a2;
                    wt * kernel_dy_r2(dx2 + d * d, y, 2)
                })
                .sum::<f64>()
        };
        let segs = merged_windows(near.iter().map(|a| a.0), w);
        match abs_integral(&g, &segs, r / 32.0, &inner_opts) {
            Ok(res) => {
                worst_inner.set(worst_inner.get().max(res.error));
                res.value
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let cells: Vec<(f64, f64)> = outer.iter().flat_map(|&(a, b)| mesh(a, b, r / 2.0)).collect();
    let res = adaptive(&column, &cells, quad);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let res = res?;
    Ok((res.value, res.error + worst_inner.get() * outer_len))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleEntry {
    pub r: f64,
    pub s_r: f64,
    pub err: f64,
    /// `(log 1/r)^{−β}` for `r < 1`.
    pub envelope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleProfile {
    pub beta: f64,
    pub coalesce_radius: f64,
    pub entries: Vec<ScaleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub beta: f64,
    /// Scales where `s_r` exceeds the envelope.
    pub violations: Vec<f64>,
}

impl ScaleProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,s_r,err\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", e.r, e.s_r, e.err));
        }
        s
    }

    pub fn decay_report(&self) -> DecayReport {
        DecayReport {
            beta: self.beta,
            violations: self
                .entries
                .iter()
                .filter(|e| e.envelope.is_some_and(|env| e.s_r - e.err > env))
                .map(|e| e.r)
                .collect(),
        }
    }
}

/// Detail at each scale of a sorted grid. Atoms closer than
/// `r_min/1000` are merged first; the L1 perturbation this causes is at
/// most `r²κ·(E_d/r³)·cost` and is added to every error bound.
pub fn detail_profile(mu: &DiscreteMeasure, r_grid: &[f64], beta: f64) -> Result<ScaleProfile> {
    if r_grid.is_empty() || r_grid.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::invalid("scale grid must be nonempty and positive"));
    }
    if r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("scale grid must be strictly increasing"));
    }
    let radius = r_grid[0] / 1000.0;
    let (merged, cost) = mu.coalesce(radius);
    let k = KernelConstants::new(mu.dim());
    let entries = r_grid
        .iter()
        .map(|&r| {
            let d = detail(&merged, r)?;
            let moved = r * r * k.kappa * k.gradient_norm(r * r) * cost;
            Ok(ScaleEntry {
                r,
                s_r: d.value,
                err: d.error + moved,
                envelope: (r < 1.0).then(|| (1.0 / r).ln().powf(-beta)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScaleProfile {
        beta,
        coalesce_radius: radius,
        entries,
    })
}
