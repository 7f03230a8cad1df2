//! Iterated function systems `Sᵢ(x) = λUx + aᵢ` with one contraction ratio
//! and one rotation shared by all maps.
//!
//! Points of the k-step support are sums `∑_{i<k} (λU)ⁱ a_{jᵢ}`. When the
//! multiplier has an exact description they are stored exactly so that
//! overlaps are detected without tolerances:
//!
//! * monic algebraic `λ` (1D): coefficient vectors in ℤ[X]/(m);
//! * Gaussian-rational multiplier `β/D` (1D or 2D): Gaussian integers over
//!   the common denominator `D^{k−1}`;
//! * anything else: plain floats, good for separation and detail only.

mod certify;
mod numfield;
mod spec_file;
mod support;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::criterion::is_prime;
use crate::error::{Error, Result};
use crate::polyalg::AlgebraicParameter;

pub use certify::{certify, CertificationReport, SplittingProvenance};
pub use numfield::NumberFieldElement;
pub use spec_file::{IfsSpec, LambdaSpec};
pub use support::{
    garsia_entropy_sequence, k_step_support, level_statistics, separation,
    splitting_rate_estimate, Atom, LevelStats, Point, Representation, SupportLevel,
    ATOM_BUDGET,
};

/// Exact or approximate description of the multiplier `λU`.
#[derive(Debug, Clone)]
pub enum Contraction {
    /// Real algebraic `λ`, optionally composed with the reflection `x ↦ −x`.
    Algebraic {
        param: Arc<AlgebraicParameter>,
        reflect: bool,
    },
    /// `(re + i·im)/den`; `im = 0` in dimension 1.
    GaussRational { re: i64, im: i64, den: i64 },
    /// Ratio `λ` and rotation angle (radians; 0 or π in dimension 1).
    Float { lam: f64, angle: f64 },
}

impl Contraction {
    pub fn lam(&self) -> f64 {
        match self {
            Contraction::Algebraic { param, .. } => param.lambda(),
            Contraction::GaussRational { re, im, den } => {
                ((*re as f64).powi(2) + (*im as f64).powi(2)).sqrt() / *den as f64
            }
            Contraction::Float { lam, .. } => *lam,
        }
    }

    pub fn angle(&self) -> f64 {
        match self {
            Contraction::Algebraic { reflect, .. } => {
                if *reflect {
                    PI
                } else {
                    0.0
                }
            }
            Contraction::GaussRational { re, im, .. } => (*im as f64).atan2(*re as f64),
            Contraction::Float { angle, .. } => *angle,
        }
    }

    /// `λU` as a complex number.
    pub fn multiplier(&self) -> Complex64 {
        Complex64::from_polar(self.lam(), self.angle())
    }

    pub fn representation(&self) -> Representation {
        match self {
            Contraction::Algebraic { param, .. } if param.is_monic() => Representation::NumberField,
            Contraction::Algebraic { .. } => Representation::Float,
            Contraction::GaussRational { .. } => Representation::GaussianOverDenominator,
            Contraction::Float { .. } => Representation::Float,
        }
    }
}

/// Which constructor produced the system; carries the family's overlap and
/// splitting arguments into [`certify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Bernoulli { bias: f64 },
    QPrime { q: u64 },
    Gauss { p: u64, m: u64 },
    /// User-supplied system with optional manual bounds.
    Custom {
        splitting_bound: Option<f64>,
        garsia_entropy: Option<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct UniformIFS {
    dim: usize,
    contraction: Contraction,
    translations: Vec<[i64; 2]>,
    probs: Vec<f64>,
    family: Family,
}

impl UniformIFS {
    /// Translations are integers (dimension 1) or Gaussian integers
    /// `[re, im]` (dimension 2).
    pub fn new(
        dim: usize,
        contraction: Contraction,
        translations: Vec<[i64; 2]>,
        probs: Vec<f64>,
        family: Family,
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::invalid("dimension must be 1 or 2"));
        }
        if translations.len() < 2 {
            return Err(Error::invalid("need at least two maps"));
        }
        if translations.len() != probs.len() {
            return Err(Error::invalid("one probability per map"));
        }
        if probs.iter().any(|p| !(*p > 0.0)) {
            return Err(Error::invalid("probabilities must be positive"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-15 * probs.len() as f64 {
            return Err(Error::invalid(format!("probabilities sum to {total}")));
        }
        let lam = contraction.lam();
        if !(lam > 0.0 && lam < 1.0) {
            return Err(Error::invalid("contraction ratio must lie in (0, 1)"));
        }
        if dim == 1 {
            if translations.iter().any(|t| t[1] != 0) {
                return Err(Error::invalid("1D translations must be real"));
            }
            let a = contraction.angle();
            if a.sin().abs() > 1e-12 {
                return Err(Error::invalid("1D rotation must be +1 or -1"));
            }
        }
        if let Contraction::GaussRational { im, den, .. } = contraction {
            if den <= 0 {
                return Err(Error::invalid("denominator must be positive"));
            }
            if dim == 1 && im != 0 {
                return Err(Error::invalid("1D multiplier must be real"));
            }
        }
        Ok(Self {
            dim,
            contraction,
            translations,
            probs,
            family,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_maps(&self) -> usize {
        self.translations.len()
    }

    pub fn lam(&self) -> f64 {
        self.contraction.lam()
    }

    pub fn contraction(&self) -> &Contraction {
        &self.contraction
    }

    /// `U` as a 2×2 matrix (the top-left entry alone in dimension 1).
    pub fn rotation(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.contraction.angle().sin_cos();
        [[c, -s], [s, c]]
    }

    pub fn translations(&self) -> &[[i64; 2]] {
        &self.translations
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_uniform(&self) -> bool {
        let first = self.probs[0];
        self.probs.iter().all(|&p| p == first)
    }

    pub fn representation(&self) -> Representation {
        self.contraction.representation()
    }

    /// Shannon entropy of the probability vector, nats.
    pub fn prob_entropy(&self) -> f64 {
        -self.probs.iter().map(|p| p * p.ln()).sum::<f64>()
    }
}

/// Maps `x ↦ λx ± 1`, the `+1` map chosen with probability `bias`.
pub fn bernoulli_ifs(lam: AlgebraicParameter, bias: f64) -> Result<UniformIFS> {
    if !(bias > 0.0 && bias < 1.0) {
        return Err(Error::invalid("bias must lie in (0, 1)"));
    }
    UniformIFS::new(
        1,
        Contraction::Algebraic {
            param: Arc::new(lam),
            reflect: false,
        },
        vec![[-1, 0], [1, 0]],
        vec![1.0 - bias, bias],
        Family::Bernoulli { bias },
    )
}

/// Bernoulli system for a ratio without an exact description.
pub fn bernoulli_ifs_float(lam: f64, bias: f64) -> Result<UniformIFS> {
    if !(bias > 0.0 && bias < 1.0) {
        return Err(Error::invalid("bias must lie in (0, 1)"));
    }
    UniformIFS::new(
        1,
        Contraction::Float { lam, angle: 0.0 },
        vec![[-1, 0], [1, 0]],
        vec![1.0 - bias, bias],
        Family::Bernoulli { bias },
    )
}

/// `λ = (q−1)/q`, translations `1, …, q−1`, uniform weights.
pub fn q_ifs(q: u64) -> Result<UniformIFS> {
    if q < 3 || !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let qi = i64::try_from(q).map_err(|_| Error::invalid("q too large"))?;
    let n = (q - 1) as usize;
    UniformIFS::new(
        1,
        Contraction::GaussRational {
            re: qi - 1,
            im: 0,
            den: qi,
        },
        (1..qi).map(|a| [a, 0]).collect(),
        vec![1.0 / n as f64; n],
        Family::QPrime { q },
    )
}

/// `α = ((p−1) + i)/p` acting on ℂ ≅ ℝ², translations the first `m` coset
/// representatives of `(p)` in ℤ[i] in lexicographic order.
pub fn gauss_ifs(p: u64, m: u64) -> Result<UniformIFS> {
    if !is_prime(p) || p % 4 != 3 {
        return Err(Error::BadPrime(p));
    }
    if m < 2 || m > p * p {
        return Err(Error::invalid(format!("need 2 <= m <= p^2, got m = {m}")));
    }
    let pi = i64::try_from(p).map_err(|_| Error::invalid("p too large"))?;
    let translations: Vec<[i64; 2]> = (0..pi)
        .flat_map(|a| (0..pi).map(move |b| [a, b]))
        .take(m as usize)
        .collect();
    UniformIFS::new(
        2,
        Contraction::GaussRational {
            re: pi - 1,
            im: 1,
            den: pi,
        },
        translations,
        vec![1.0 / m as f64; m as usize],
        Family::Gauss { p, m },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::IntPolynomial;

    #[test]
    fn constructions() {
        let q = q_ifs(3).unwrap();
        assert_eq!(q.n_maps(), 2);
        assert!((q.lam() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(q_ifs(9), Err(Error::NotPrime(9))));

        let g = gauss_ifs(3, 8).unwrap();
        assert!((g.lam() - 5f64.sqrt() / 3.0).abs() < 1e-15);
        assert!((g.contraction().angle() - 0.5f64.atan()).abs() < 1e-15);
        assert_eq!(g.translations()[1], [0, 1]);
        assert_eq!(g.translations()[3], [1, 0]);
        let r = g.rotation();
        let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        assert!((det - 1.0).abs() < 1e-12);
        assert!(matches!(gauss_ifs(5, 4), Err(Error::BadPrime(5))));

        let p: IntPolynomial = "X^9-2X^8-X+1".parse().unwrap();
        let lam = AlgebraicParameter::nearest(&p, 0.8).unwrap();
        let b = bernoulli_ifs(lam, 0.5).unwrap();
        assert_eq!(b.rotation(), [[1.0, -0.0], [0.0, 1.0]]);
        assert!((b.lam() - 0.799_533).abs() < 1e-6);
        assert_eq!(b.representation(), Representation::NumberField);
    }

    #[test]
    fn validation() {
        let c = Contraction::Float {
            lam: 0.5,
            angle: 0.0,
        };
        assert!(UniformIFS::new(1, c.clone(), vec![[0, 0]], vec![1.0], Family::Custom {
            splitting_bound: None,
            garsia_entropy: None
        })
        .is_err());
        let fam = Family::Custom {
            splitting_bound: None,
            garsia_entropy: None,
        };
        assert!(UniformIFS::new(1, c.clone(), vec![[0, 0], [1, 0]], vec![0.5, 0.6], fam.clone()).is_err());
        assert!(UniformIFS::new(1, c.clone(), vec![[0, 0], [1, 1]], vec![0.5, 0.5], fam.clone()).is_err());
        assert!(UniformIFS::new(3, c, vec![[0, 0], [1, 0]], vec![0.5, 0.5], fam).is_err());
    }
}
