//! k-step supports, separations and Garsia entropy.

use std::cmp::Ordering;
use std::sync::Arc;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::numfield::{eval_coeffs_hp, NumberFieldElement};
use super::{Contraction, UniformIFS};
use crate::error::{Error, Result};
use crate::hp;
use crate::polyalg::IntPolynomial;

/// Largest number of atoms a single expansion step may produce before
/// merging.
pub const ATOM_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    NumberField,
    GaussianOverDenominator,
    Float,
}

/// Exact (or, in float mode, approximate) location of one atom.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    /// Coefficients in the power basis of the generator.
    Field(Vec<i64>),
    /// Gaussian-integer numerator over the level's denominator.
    Gauss(i128, i128),
    Float(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: Point,
    /// Floating-point coordinates (second entry 0 in dimension 1).
    pub coords: [f64; 2],
    pub prob: f64,
    /// Number of words of length k landing on this atom.
    pub count: u64,
}

#[derive(Debug, Clone)]
enum Keys {
    Field { stride: usize, data: Vec<i64> },
    Gauss(Vec<(i128, i128)>),
    Float,
}

/// Distribution of `∑_{i<k} (λU)ⁱ a_{jᵢ}` with exact duplicates merged.
#[derive(Debug, Clone)]
pub struct SupportLevel {
    pub k: usize,
    pub representation: Representation,
    /// Common denominator of Gaussian numerators (`D^{k−1}`), 1 otherwise.
    pub denominator: i128,
    keys: Keys,
    coords: Vec<[f64; 2]>,
    probs: Vec<f64>,
    counts: Vec<u64>,
}

impl SupportLevel {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn atom(&self, i: usize) -> Atom {
        let point = match &self.keys {
            Keys::Field { stride, data } => Point::Field(data[i * stride..(i + 1) * stride].to_vec()),
            Keys::Gauss(v) => Point::Gauss(v[i].0, v[i].1),
            Keys::Float => Point::Float(self.coords[i][0], self.coords[i][1]),
        };
        Atom {
            point,
            coords: self.coords[i],
            prob: self.probs[i],
            count: self.counts[i],
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        (0..self.len()).map(|i| self.atom(i))
    }

    pub fn is_exact(&self) -> bool {
        self.representation != Representation::Float
    }

    /// `x,prob` (dimension 1) or `x,y,prob` rows with a header.
    pub fn to_csv(&self, dim: usize) -> String {
        let mut s = String::from(if dim == 1 { "x,prob\n" } else { "x,y,prob\n" });
        for (c, p) in self.coords.iter().zip(&self.probs) {
            if dim == 1 {
                s.push_str(&format!("{},{}\n", c[0], p));
            } else {
                s.push_str(&format!("{},{},{}\n", c[0], c[1], p));
            }
        }
        s
    }
}

/// Exact arithmetic context derived from the contraction.
struct Arith {
    kind: ArithKind,
    mult: Complex64,
}

enum ArithKind {
    Field {
        modulus: Arc<IntPolynomial>,
        generator: BigFloat,
        bits: usize,
    },
    Gauss {
        beta: (i128, i128),
        den: i128,
    },
    Float,
}

impl Arith {
    fn new(f: &UniformIFS) -> Self {
        let mult = f.contraction.multiplier();
        let kind = match &f.contraction {
            Contraction::Algebraic { param, reflect } if param.is_monic() => {
                let bits = hp::working_bits();
                let (modulus, generator) = if *reflect {
                    (param.min_poly.reflect().primitive_part(), param.value.neg())
                } else {
                    (param.min_poly.clone(), param.value.clone())
                };
                ArithKind::Field {
                    modulus: Arc::new(modulus),
                    generator,
                    bits,
                }
            }
            Contraction::GaussRational { re, im, den } => ArithKind::Gauss {
                beta: (*re as i128, *im as i128),
                den: *den as i128,
            },
            _ => ArithKind::Float,
        };
        Self { kind, mult }
    }

    fn representation(&self) -> Representation {
        match self.kind {
            ArithKind::Field { .. } => Representation::NumberField,
            ArithKind::Gauss { .. } => Representation::GaussianOverDenominator,
            ArithKind::Float => Representation::Float,
        }
    }
}

fn gauss_mul(a: (i128, i128), b: (i128, i128)) -> Option<(i128, i128)> {
    let re = a.0.checked_mul(b.0)?.checked_sub(a.1.checked_mul(b.1)?)?;
    let im = a.0.checked_mul(b.1)?.checked_add(a.1.checked_mul(b.0)?)?;
    Some((re, im))
}

fn root_level(f: &UniformIFS, arith: &Arith) -> SupportLevel {
    let keys = match &arith.kind {
        ArithKind::Field { modulus, .. } => Keys::Field {
            stride: modulus.degree(),
            data: vec![0; modulus.degree()],
        },
        ArithKind::Gauss { .. } => Keys::Gauss(vec![(0, 0)]),
        ArithKind::Float => Keys::Float,
    };
    let _ = f;
    SupportLevel {
        k: 0,
        representation: arith.representation(),
        denominator: 1,
        keys,
        coords: vec![[0.0, 0.0]],
        probs: vec![1.0],
        counts: vec![1],
    }
}

/// Power `gen^k` of the generator, exact where possible.
enum StepPower {
    Field(Vec<i64>),
    Gauss((i128, i128)),
    Float,
}

struct Expander<'a> {
    f: &'a UniformIFS,
    arith: Arith,
    field_power: Option<NumberFieldElement>,
    gauss_power: (i128, i128),
    float_power: Complex64,
}

impl<'a> Expander<'a> {
    fn new(f: &'a UniformIFS) -> Result<Self> {
        let arith = Arith::new(f);
        let field_power = match &arith.kind {
            ArithKind::Field { modulus, .. } => Some(NumberFieldElement::from_int(modulus.clone(), 1)?),
            _ => None,
        };
        Ok(Self {
            f,
            arith,
            field_power,
            gauss_power: (1, 0),
            float_power: Complex64::new(1.0, 0.0),
        })
    }

    /// Produce level `prev.k + 1`; the current powers correspond to `prev.k`.
    fn step(&mut self, prev: &SupportLevel) -> Result<SupportLevel> {
        let n = self.f.n_maps();
        let k = prev.k;
        let needed = prev.len() as u128 * n as u128;
        if needed > ATOM_BUDGET as u128 {
            return Err(Error::Overflow {
                depth: k + 1,
                needed,
                budget: ATOM_BUDGET,
            });
        }
        let power = match &self.arith.kind {
            ArithKind::Field { .. } => {
                StepPower::Field(self.field_power.as_ref().expect("field mode").to_i64s()?)
            }
            ArithKind::Gauss { .. } => StepPower::Gauss(self.gauss_power),
            ArithKind::Float => StepPower::Float,
        };
        // float value of the step power, exact-rounded where an exact form exists
        let fpow = match (&self.arith.kind, &power) {
            (ArithKind::Field { generator, bits, .. }, StepPower::Field(c)) => {
                let big: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
                Complex64::new(hp::to_f64(&eval_coeffs_hp(&big, generator, *bits)), 0.0)
            }
            _ => self.float_power,
        };
        let translations = self.f.translations();
        let probs = self.f.probs();
        let total = prev.len() * n;

        let coords: Vec<[f64; 2]> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let a = Complex64::new(translations[j][0] as f64, translations[j][1] as f64);
                let d = fpow * a;
                [prev.coords[i][0] + d.re, prev.coords[i][1] + d.im]
            })
            .collect();
        let new_probs: Vec<f64> = (0..total)
            .into_par_iter()
            .map(|idx| prev.probs[idx / n] * probs[idx % n])
            .collect();
        let new_counts: Vec<u64> = (0..total).map(|idx| prev.counts[idx / n]).collect();

        let (keys, denominator) = match (&prev.keys, &power, &self.arith.kind) {
            (Keys::Field { stride, data }, StepPower::Field(pw), _) => {
                let stride = *stride;
                let mut out = vec![0i64; total * stride];
                out.par_chunks_mut(stride)
                    .enumerate()
                    .try_for_each(|(idx, chunk)| {
                        let (i, j) = (idx / n, idx % n);
                        let a = translations[j][0];
                        for t in 0..stride {
                            chunk[t] = pw[t]
                                .checked_mul(a)
                                .and_then(|v| v.checked_add(data[i * stride + t]))
                                .ok_or(Error::ArithmeticOverflow)?;
                        }
                        Ok::<(), Error>(())
                    })?;
                (Keys::Field { stride, data: out }, 1)
            }
            (Keys::Gauss(v), StepPower::Gauss(bp), ArithKind::Gauss { den, .. }) => {
                let den = *den;
                let out: Vec<(i128, i128)> = (0..total)
                    .into_par_iter()
                    .map(|idx| {
                        let (i, j) = (idx / n, idx % n);
                        let a = (translations[j][0] as i128, translations[j][1] as i128);
                        let t = gauss_mul(*bp, a)?;
                        let (re, im) = if k == 0 { (0, 0) } else { v[i] };
                        Some((
                            den.checked_mul(re)?.checked_add(t.0)?,
                            den.checked_mul(im)?.checked_add(t.1)?,
                        ))
                    })
                    .collect::<Option<Vec<_>>>()
                    .ok_or(Error::ArithmeticOverflow)?;
                let denom = if k == 0 {
                    1
                } else {
                    prev.denominator
                        .checked_mul(den)
                        .ok_or(Error::ArithmeticOverflow)?
                };
                (Keys::Gauss(out), denom)
            }
            _ => (Keys::Float, 1),
        };

        // advance powers for the next level
        match &self.arith.kind {
            ArithKind::Field { .. } => {
                self.field_power = self.field_power.take().map(|p| p.mul_generator());
            }
            ArithKind::Gauss { beta, .. } => {
                self.gauss_power =
                    gauss_mul(self.gauss_power, *beta).ok_or(Error::ArithmeticOverflow)?;
            }
            ArithKind::Float => {}
        }
        self.float_power *= self.arith.mult;

        let mut level = SupportLevel {
            k: k + 1,
            representation: self.arith.representation(),
            denominator,
            keys,
            coords,
            probs: new_probs,
            counts: new_counts,
        };
        merge(&mut level);
        Ok(level)
    }
}

fn cmp_keys(keys: &Keys, coords: &[[f64; 2]], a: usize, b: usize) -> Ordering {
    match keys {
        Keys::Field { stride, data } => data[a * stride..(a + 1) * stride].cmp(&data[b * stride..(b + 1) * stride]),
        Keys::Gauss(v) => v[a].cmp(&v[b]),
        Keys::Float => coords[a][0]
            .total_cmp(&coords[b][0])
            .then(coords[a][1].total_cmp(&coords[b][1])),
    }
}

/// Sort atoms by exact key and merge equal keys. The sort is stable, so the
/// surviving coordinates are those of the first word in generation order.
fn merge(level: &mut SupportLevel) {
    let n = level.len();
    let mut order: Vec<usize> = (0..n).collect();
    {
        let keys = &level.keys;
        let coords = &level.coords;
        order.par_sort_by(|&a, &b| cmp_keys(keys, coords, a, b));
    }
    let mut keep: Vec<usize> = Vec::with_capacity(n);
    let mut probs = Vec::with_capacity(n);
    let mut counts = Vec::with_capacity(n);
    for &i in &order {
        if let Some(&last) = keep.last() {
            if cmp_keys(&level.keys, &level.coords, last, i) == Ordering::Equal {
                *probs.last_mut().expect("nonempty") += level.probs[i];
                *counts.last_mut().expect("nonempty") += level.counts[i];
                continue;
            }
        }
        keep.push(i);
        probs.push(level.probs[i]);
        counts.push(level.counts[i]);
    }
    level.coords = keep.iter().map(|&i| level.coords[i]).collect();
    level.keys = match &level.keys {
        Keys::Field { stride, data } => Keys::Field {
            stride: *stride,
            data: keep
                .iter()
                .flat_map(|&i| data[i * stride..(i + 1) * stride].iter().copied())
                .collect(),
        },
        Keys::Gauss(v) => Keys::Gauss(keep.iter().map(|&i| v[i]).collect()),
        Keys::Float => Keys::Float,
    };
    level.probs = probs;
    level.counts = counts;
}

pub fn k_step_support(f: &UniformIFS, k: usize) -> Result<SupportLevel> {
    let mut ex = Expander::new(f)?;
    let mut level = root_level(f, &ex.arith);
    for _ in 0..k {
        level = ex.step(&level)?;
    }
    Ok(level)
}

/// Shannon entropy of a level in nats. For uniform weights it is computed
/// from word counts, so an overlap-free level gives exactly `k·log n`.
fn level_entropy(f: &UniformIFS, level: &SupportLevel) -> f64 {
    if f.is_uniform() {
        let ln_n = (f.n_maps() as f64).ln();
        let words = (f.n_maps() as f64).powi(level.k as i32);
        let s: f64 = level
            .counts
            .iter()
            .filter(|&&c| c > 1)
            .map(|&c| c as f64 * (c as f64).ln())
            .sum();
        level.k as f64 * ln_n - s / words
    } else {
        -level
            .probs
            .iter()
            .map(|p| p * p.ln())
            .sum::<f64>()
    }
}

fn garsia_ratio(f: &UniformIFS, level: &SupportLevel) -> f64 {
    if f.is_uniform() {
        let ln_n = (f.n_maps() as f64).ln();
        let words = (f.n_maps() as f64).powi(level.k as i32);
        let s: f64 = level
            .counts
            .iter()
            .filter(|&&c| c > 1)
            .map(|&c| c as f64 * (c as f64).ln())
            .sum();
        ln_n - s / (words * level.k as f64)
    } else {
        level_entropy(f, level) / level.k as f64
    }
}

/// Minimum distance between distinct atoms.
pub fn level_separation(f: &UniformIFS, level: &SupportLevel) -> Result<f64> {
    if level.len() < 2 {
        return Err(Error::Degenerate);
    }
    match &level.keys {
        Keys::Gauss(v) => gauss_separation(f.dim(), v, level.denominator),
        Keys::Field { stride, data } => {
            let arith = Arith::new(f);
            let ArithKind::Field { generator, bits, .. } = &arith.kind else {
                unreachable!("field keys come from field arithmetic")
            };
            Ok(field_separation(f, level, *stride, data, generator, *bits))
        }
        Keys::Float => Ok(float_separation(f.dim(), &level.coords)),
    }
}

fn gauss_separation(dim: usize, v: &[(i128, i128)], den: i128) -> Result<f64> {
    let mut pts = v.to_vec();
    pts.sort_unstable();
    let den = den as f64;
    if dim == 1 {
        let best = pts
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .min()
            .expect("at least two atoms");
        return Ok(best as f64 / den);
    }
    // sweep in the first coordinate, exact squared distances
    let mut best: Option<i128> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dx = pts[j].0 - pts[i].0;
            let dx2 = dx.checked_mul(dx).ok_or(Error::ArithmeticOverflow)?;
            if best.is_some_and(|b| dx2 >= b) {
                break;
            }
            let dy = pts[j].1 - pts[i].1;
            let d2 = dy
                .checked_mul(dy)
                .and_then(|y| y.checked_add(dx2))
                .ok_or(Error::ArithmeticOverflow)?;
            if best.map_or(true, |b| d2 < b) {
                best = Some(d2);
            }
        }
    }
    Ok((best.expect("at least two atoms") as f64).sqrt() / den)
}

fn float_separation(dim: usize, coords: &[[f64; 2]]) -> f64 {
    let mut pts = coords.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    if dim == 1 {
        return pts
            .windows(2)
            .map(|w| w[1][0] - w[0][0])
            .filter(|g| *g > 0.0)
            .fold(f64::INFINITY, f64::min);
    }
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dx = pts[j][0] - pts[i][0];
            if dx * dx >= best {
                break;
            }
            let d2 = dx * dx + (pts[j][1] - pts[i][1]).powi(2);
            if d2 > 0.0 && d2 < best {
                best = d2;
            }
        }
    }
    best.sqrt()
}

/// Sort by float value, then recompute every pair that could be the closest
/// one exactly at high precision from the integer coefficient difference.
fn field_separation(
    f: &UniformIFS,
    level: &SupportLevel,
    stride: usize,
    data: &[i64],
    generator: &BigFloat,
    bits: usize,
) -> f64 {
    let n = level.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| level.coords[a][0].total_cmp(&level.coords[b][0]));
    let xs: Vec<f64> = order.iter().map(|&i| level.coords[i][0]).collect();
    // accumulated rounding error of the float coordinates
    let amax = f
        .translations()
        .iter()
        .map(|t| t[0].unsigned_abs() as f64)
        .fold(0.0, f64::max);
    let err = 4.0 * (level.k as f64 + 1.0) * f64::EPSILON * amax / (1.0 - f.lam()) + 1e-300;
    let best_float = xs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let window = best_float + 4.0 * err;
    let mut best: Option<BigFloat> = None;
    for a in 0..n {
        for b in a + 1..n {
            if xs[b] - xs[a] > window {
                break;
            }
            let (i, j) = (order[a], order[b]);
            let diff: Vec<BigInt> = (0..stride)
                .map(|t| BigInt::from(data[j * stride + t]) - BigInt::from(data[i * stride + t]))
                .collect();
            let d = eval_coeffs_hp(&diff, generator, bits).abs();
            if best
                .as_ref()
                .map_or(true, |cur| d.cmp(cur).is_some_and(|c| c < 0))
            {
                best = Some(d);
            }
        }
    }
    best.map_or(best_float, |b| hp::to_f64(&b))
}

pub fn separation(f: &UniformIFS, k: usize) -> Result<f64> {
    let level = k_step_support(f, k)?;
    level_separation(f, &level)
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelStats {
    pub k: usize,
    pub atoms: usize,
    /// `h_{F,k}/k`, absent in float mode.
    pub garsia_ratio: Option<f64>,
    pub separation: Option<f64>,
}

/// One pass over levels `1..=kmax`.
pub fn level_statistics(f: &UniformIFS, kmax: usize, with_separation: bool) -> Result<Vec<LevelStats>> {
    let mut ex = Expander::new(f)?;
    let mut level = root_level(f, &ex.arith);
    let mut out = Vec::with_capacity(kmax);
    for _ in 0..kmax {
        level = ex.step(&level)?;
        let separation = if with_separation {
            Some(level_separation(f, &level)?)
        } else {
            None
        };
        out.push(LevelStats {
            k: level.k,
            atoms: level.len(),
            garsia_ratio: level.is_exact().then(|| garsia_ratio(f, &level)),
            separation,
        });
    }
    Ok(out)
}

pub fn garsia_entropy_sequence(f: &UniformIFS, kmax: usize) -> Result<Vec<(usize, f64)>> {
    if f.representation() == Representation::Float {
        return Err(Error::InexactMode);
    }
    Ok(level_statistics(f, kmax, false)?
        .into_iter()
        .map(|s| (s.k, s.garsia_ratio.expect("exact mode")))
        .collect())
}

/// `(k, Δ_{F,k}^{−1/k})`.
pub fn splitting_rate_estimate(f: &UniformIFS, kmax: usize) -> Result<Vec<(usize, f64)>> {
    Ok(level_statistics(f, kmax, true)?
        .into_iter()
        .map(|s| {
            let d = s.separation.expect("separation requested");
            (s.k, d.powf(-1.0 / s.k as f64))
        })
        .collect())
}
