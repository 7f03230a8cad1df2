use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::SupportLevel;

/// Pairwise products allowed in a single convolution.
pub const CONVOLVE_BUDGET: usize = 1 << 22;

/// Finitely supported probability measure on ℝ or ℝ². Points are stored
/// as pairs; the second coordinate is zero in dimension one. Atoms are
/// kept sorted lexicographically with exact duplicates merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    dim: u32,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(dim: u32, atoms: Vec<([f64; 2], f64)>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::invalid(format!("dimension {dim} not supported")));
        }
        if atoms.is_empty() {
            return Err(Error::invalid("measure needs at least one atom"));
        }
        let mut total = 0.0;
        for (p, w) in &atoms {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::invalid(format!("weight {w} must be positive")));
            }
            if !p[0].is_finite() || !p[1].is_finite() || (dim == 1 && p[1] != 0.0) {
                return Err(Error::invalid(format!("bad point {p:?}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self::merged(dim, atoms))
    }

    pub fn from_reals(points: &[f64], weights: &[f64]) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::invalid("points and weights differ in length"));
        }
        Self::new(1, points.iter().zip(weights).map(|(&x, &w)| ([x, 0.0], w)).collect())
    }

    pub fn delta(dim: u32, at: [f64; 2]) -> Result<Self> {
        Self::new(dim, vec![(at, 1.0)])
    }

    /// The distribution of the k-step support.
    pub fn from_support(level: &SupportLevel, dim: u32) -> Result<Self> {
        let atoms = level
            .coords()
            .iter()
            .zip(level.probs())
            .map(|(&c, &p)| (if dim == 1 { [c[0], 0.0] } else { c }, p))
            .collect::<Vec<_>>();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        Self::new(dim, atoms.into_iter().map(|(c, p)| (c, p / total)).collect())
    }

    fn merged(dim: u32, mut atoms: Vec<([f64; 2], f64)>) -> Self {
        atoms.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]).then(a.0[1].total_cmp(&b.0[1])));
        let mut points: Vec<[f64; 2]> = Vec::with_capacity(atoms.len());
        let mut weights: Vec<f64> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            if points.last() == Some(&p) {
                *weights.last_mut().expect("paired with points") += w;
            } else {
                points.push(p);
                weights.push(w);
            }
        }
        Self {
            dim,
            points,
            weights,
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Indices of atoms with first coordinate in `[lo, hi]`.
    pub(crate) fn x_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = self.points.partition_point(|p| p[0] < lo);
        let b = self.points.partition_point(|p| p[0] <= hi);
        a..b.max(a)
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::invalid("convolving measures of different dimension"));
        }
        let n = self.len().saturating_mul(other.len());
        if n > CONVOLVE_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "convolution needs {n} atoms, budget {CONVOLVE_BUDGET}"
            )));
        }
        let mut atoms = Vec::with_capacity(n);
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (q, v) in other.points.iter().zip(&other.weights) {
                atoms.push(([p[0] + q[0], p[1] + q[1]], w * v));
            }
        }
        Ok(Self::merged(self.dim, atoms))
    }

    /// Image under `x ↦ αx`.
    pub fn dilate(&self, alpha: f64) -> Self {
        let atoms = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| ([alpha * p[0], alpha * p[1]], w))
            .collect();
        Self::merged(self.dim, atoms)
    }

    pub fn translate(&self, by: [f64; 2]) -> Self {
        let by = if self.dim == 1 { [by[0], 0.0] } else { by };
        let atoms = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| ([p[0] + by[0], p[1] + by[1]], w))
            .collect();
        Self::merged(self.dim, atoms)
    }

    /// Mixture `∑ pᵢ μᵢ`.
    pub fn mixture(parts: &[(f64, &Self)]) -> Result<Self> {
        let dim = parts.first().ok_or_else(|| Error::invalid("empty mixture"))?.1.dim;
        let mut atoms = Vec::new();
        for (p, m) in parts {
            if m.dim != dim {
                return Err(Error::invalid("mixture of different dimensions"));
            }
            atoms.extend(m.points.iter().zip(&m.weights).map(|(&x, &w)| (x, p * w)));
        }
        Self::new(dim, atoms)
    }

    /// Merge runs of atoms whose first coordinates lie within `radius` of
    /// the run's first atom (and, in the plane, whose second coordinates
    /// also do). Each run is replaced by its barycentre. Returns the new
    /// measure and the transport cost `∑ wᵢ |xᵢ − cᵢ|`.
    pub fn coalesce(&self, radius: f64) -> (Self, f64) {
        if radius <= 0.0 {
            return (self.clone(), 0.0);
        }
        let mut used = vec![false; self.len()];
        let mut atoms = Vec::new();
        let mut cost = 0.0;
        for i in 0..self.len() {
            if used[i] {
                continue;
            }
            let anchor = self.points[i];
            let mut group = vec![i];
            used[i] = true;
            for j in i + 1..self.len() {
                if self.points[j][0] - anchor[0] > radius {
                    break;
                }
                if !used[j] && (self.points[j][1] - anchor[1]).abs() <= radius {
                    used[j] = true;
                    group.push(j);
                }
            }
            let w: f64 = group.iter().map(|&k| self.weights[k]).sum();
            let mut c = [0.0; 2];
            for &k in &group {
                c[0] += self.weights[k] * self.points[k][0] / w;
                c[1] += self.weights[k] * self.points[k][1] / w;
            }
            for &k in &group {
                let d = [self.points[k][0] - c[0], self.points[k][1] - c[1]];
                cost += self.weights[k] * d[0].hypot(d[1]);
            }
            atoms.push((c, w));
        }
        (Self::merged(self.dim, atoms), cost)
    }

    /// Shannon entropy of the weights.
    pub fn shannon_entropy(&self) -> f64 {
        -self.weights.iter().map(|&w| w * w.ln()).sum::<f64>()
    }
}
