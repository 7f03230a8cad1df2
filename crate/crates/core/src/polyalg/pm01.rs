//! Smallest nonzero values of {−1, 0, 1}-polynomials at λ.
//!
//! Meet in the middle: all sums over the low coefficients are tabulated and
//! sorted once, then every high part looks up its nearest partner. Values
//! close to zero are checked exactly against the minimal polynomial so that
//! genuine roots are skipped rather than reported.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::mahler::AlgebraicParameter;
use super::poly::IntPolynomial;
use crate::error::{Error, Result};

pub const MAX_PM01_DEGREE: usize = 30;

const LOW_DIGITS_CAP: usize = 13;
const ZERO_SUSPECT: f64 = 1e-13;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Pm01Min {
    pub degree: usize,
    pub min_value: f64,
}

/// For each `n ≤ max_degree`, the minimum of `|p(λ)|` over polynomials of
/// degree at most `n` with coefficients in {−1, 0, 1} and `p(λ) ≠ 0`.
pub fn min_pm01_value(lam: &AlgebraicParameter, max_degree: usize) -> Result<Vec<Pm01Min>> {
    if max_degree > MAX_PM01_DEGREE {
        return Err(Error::invalid(format!(
            "max_degree {max_degree} exceeds {MAX_PM01_DEGREE}"
        )));
    }
    let x = lam.lambda();
    let minpoly = &lam.min_poly;
    let low = ((max_degree + 1) / 2).clamp(1, LOW_DIGITS_CAP);
    let powers: Vec<f64> = (0..=max_degree).map(|i| x.powi(i as i32)).collect();

    // table of low sums, index encodes base-3 digits (0 → −1, 1 → 0, 2 → 1)
    let size = 3usize.pow(low as u32);
    let mut table: Vec<(f64, u32)> = (0..size as u32)
        .into_par_iter()
        .map(|idx| (digits_value(idx as u64, 0, low, &powers), idx))
        .collect();
    table.par_sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut out = Vec::with_capacity(max_degree + 1);
    let mut best = f64::INFINITY;
    for n in 0..=max_degree {
        let here = if n < low {
            exact_degree_small(n, &powers, minpoly)
        } else {
            exact_degree_split(n, low, &powers, &table, minpoly)
        };
        best = best.min(here);
        out.push(Pm01Min {
            degree: n,
            min_value: best,
        });
    }
    Ok(out)
}

fn digit(idx: u64, pos: usize) -> i64 {
    ((idx / 3u64.pow(pos as u32)) % 3) as i64 - 1
}

fn digits_value(idx: u64, offset: usize, count: usize, powers: &[f64]) -> f64 {
    let mut v = 0.0;
    let mut rest = idx;
    for i in 0..count {
        let d = (rest % 3) as f64 - 1.0;
        rest /= 3;
        v += d * powers[offset + i];
    }
    v
}

fn is_exact_zero(coeffs: Vec<i64>, minpoly: &IntPolynomial) -> bool {
    match IntPolynomial::new(coeffs.into_iter().map(BigInt::from).collect()) {
        Ok(p) => p.degree() >= minpoly.degree() && p.pseudo_rem(minpoly).is_none(),
        Err(_) => true,
    }
}

/// Leading coefficient fixed to +1 (the sign symmetry covers −1).
fn exact_degree_small(n: usize, powers: &[f64], minpoly: &IntPolynomial) -> f64 {
    let count = 3u64.pow(n as u32);
    (0..count)
        .into_par_iter()
        .filter_map(|idx| {
            let v = (digits_value(idx, 0, n, powers) + powers[n]).abs();
            if v < ZERO_SUSPECT {
                let mut c: Vec<i64> = (0..n).map(|i| digit(idx, i)).collect();
                c.push(1);
                if is_exact_zero(c, minpoly) {
                    return None;
                }
            }
            Some(v)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

fn exact_degree_split(
    n: usize,
    low: usize,
    powers: &[f64],
    table: &[(f64, u32)],
    minpoly: &IntPolynomial,
) -> f64 {
    let mid = n - low; // digits low..n-1
    let count = 3u64.pow(mid as u32);
    (0..count)
        .into_par_iter()
        .map(|hidx| {
            let high = digits_value(hidx, low, mid, powers) + powers[n];
            let coeffs_for = |lidx: u32| -> Vec<i64> {
                let mut c: Vec<i64> = (0..low).map(|i| digit(lidx as u64, i)).collect();
                c.extend((0..mid).map(|i| digit(hidx, i)));
                c.push(1);
                c
            };
            let target = -high;
            let pos = table.partition_point(|e| e.0 < target);
            let mut best = f64::INFINITY;
            // scan downward and upward until a value that is not an exact zero
            for dir in [-1i64, 1] {
                let mut i = if dir < 0 { pos as i64 - 1 } else { pos as i64 };
                while i >= 0 && (i as usize) < table.len() {
                    let (lv, lidx) = table[i as usize];
                    let v = (lv + high).abs();
                    if v >= best {
                        break;
                    }
                    if v < ZERO_SUSPECT && is_exact_zero(coeffs_for(lidx), minpoly) {
                        i += dir;
                        continue;
                    }
                    best = v;
                    break;
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min)
}
