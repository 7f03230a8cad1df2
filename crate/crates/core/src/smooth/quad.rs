//! Gauss-Kronrod 7-15 quadrature, globally adaptive, and integration of
//! `|g|` for integrands that change sign.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl QuadOptions {
    pub fn tight() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_evals: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

/// One 15-point Kronrod panel; error is `|K15 − G7|`.
pub fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    // largest error first, ties broken by position so the order is total
    fn cmp(&self, o: &Self) -> Ordering {
        self.error
            .total_cmp(&o.error)
            .then_with(|| o.a.total_cmp(&self.a))
    }
}

/// Globally adaptive integration over a list of intervals.
pub fn adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    intervals: &[(f64, f64)],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for &(a, b) in intervals {
        if b > a {
            let (value, error) = gk15(f, a, b);
            evals += 15;
            heap.push(Panel { a, b, value, error });
        }
    }
    loop {
        let (total, err) = totals(&heap);
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(QuadResult {
                value: total,
                error: err,
                evals,
            });
        }
        if evals + 30 > opts.max_evals {
            return Err(Error::BudgetExceeded(format!(
                "{evals} evaluations, error {err:.3e} above tolerance"
            )));
        }
        let worst = heap.pop().expect("nonempty when error is positive");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            // interval no longer splittable in f64: accept its estimate
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            continue;
        }
        for (a, b) in [(worst.a, m), (m, worst.b)] {
            let (value, error) = gk15(f, a, b);
            heap.push(Panel { a, b, value, error });
        }
        evals += 30;
    }
}

/// Sum in interval order so the result does not depend on heap layout.
fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut v: Vec<&Panel> = heap.iter().collect();
    v.sort_by(|x, y| x.a.total_cmp(&y.a));
    v.iter()
        .fold((0.0, 0.0), |(s, e), p| (s + p.value, e + p.error))
}

/// Split `[a, b]` into pieces no longer than `width`.
pub fn mesh(a: f64, b: f64, width: f64) -> Vec<(f64, f64)> {
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    (0..n)
        .map(|i| {
            let lo = a + (b - a) * i as f64 / n as f64;
            let hi = if i + 1 == n { b } else { a + (b - a) * (i + 1) as f64 / n as f64 };
            (lo, hi)
        })
        .collect()
}

/// Union of `[cᵢ − w, cᵢ + w]` for sorted centres.
pub fn merged_windows(centres: impl IntoIterator<Item = f64>, w: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for c in centres {
        let (lo, hi) = (c - w, c + w);
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// `∫|g|` over the segments. Sign changes are located on a scan grid of
/// spacing `h` and refined by bisection; `g` is then integrated with its
/// sign fixed on each piece.
pub fn abs_integral<F: Fn(f64) -> f64 + ?Sized>(
    g: &F,
    segments: &[(f64, f64)],
    h: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let total_len: f64 = segments.iter().map(|s| s.1 - s.0).sum();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evals = 0;
    for &(a, b) in segments {
        let n = ((b - a) / h).ceil().max(1.0) as usize;
        let xs: Vec<f64> = (0..=n)
            .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
            .collect();
        let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
        evals += xs.len();
        let mut breaks = vec![a];
        for i in 0..n {
            if vals[i] == 0.0 && i > 0 {
                breaks.push(xs[i]);
            } else if vals[i] * vals[i + 1] < 0.0 {
                let (z, e) = bisect_zero(g, xs[i], xs[i + 1], vals[i]);
                evals += e;
                breaks.push(z);
            }
        }
        breaks.push(b);
        breaks.dedup();
        let piece_width = 64.0 * h;
        for w in breaks.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let mid = g(0.5 * (lo + hi));
            let s = if mid < 0.0 { -1.0 } else { 1.0 };
            let share = QuadOptions {
                abs_tol: opts.abs_tol * (hi - lo) / total_len,
                rel_tol: opts.rel_tol,
                max_evals: opts.max_evals.saturating_sub(evals),
            };
            let signed = |x: f64| s * g(x);
            let r = adaptive(&signed, &mesh(lo, hi, piece_width), &share)?;
            value += r.value.abs();
            error += r.error;
            evals += r.evals + 1;
        }
    }
    Ok(QuadResult {
        value,
        error,
        evals,
    })
}

fn bisect_zero<F: Fn(f64) -> f64 + ?Sized>(g: &F, mut a: f64, mut b: f64, ga: f64) -> (f64, usize) {
    let sa = ga.signum();
    let mut evals = 0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            break;
        }
        let gm = g(m);
        evals += 1;
        if gm == 0.0 {
            return (m, evals);
        }
        if gm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    (0.5 * (a + b), evals)
}
