//! JSON description of a system, e.g.
//!
//! ```json
//! {"dim": 1, "lambda": {"minpoly": "X^9-2X^8-X+1", "near": 0.8},
//!  "translations": [-1, 1], "probs": [0.5, 0.5], "family": "bernoulli"}
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Contraction, Family, UniformIFS};
use crate::error::{Error, Result};
use crate::polyalg::{AlgebraicParameter, IntPolynomial};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    /// Real root of `minpoly` in (0, 1) nearest `near`.
    Minpoly {
        minpoly: String,
        #[serde(default)]
        near: Option<f64>,
        #[serde(default)]
        reflect: bool,
    },
    /// `(re + i·im)/den`.
    GaussRational { re: i64, im: i64, den: i64 },
    Float {
        value: f64,
        #[serde(default)]
        angle: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TranslationSpec {
    Real(i64),
    Gaussian([i64; 2]),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Bernoulli,
    #[default]
    Custom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSpec {
    pub dim: usize,
    pub lambda: LambdaSpec,
    pub translations: Vec<TranslationSpec>,
    /// Uniform when omitted.
    #[serde(default)]
    pub probs: Option<Vec<f64>>,
    #[serde(default)]
    pub family: FamilyTag,
    #[serde(default)]
    pub splitting_bound: Option<f64>,
    #[serde(default)]
    pub garsia_entropy: Option<f64>,
}

impl IfsSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<UniformIFS> {
        let contraction = match &self.lambda {
            LambdaSpec::Minpoly {
                minpoly,
                near,
                reflect,
            } => {
                let p: IntPolynomial = minpoly.parse()?;
                let param = AlgebraicParameter::nearest(&p, near.unwrap_or(0.5))?;
                Contraction::Algebraic {
                    param: Arc::new(param),
                    reflect: *reflect,
                }
            }
            LambdaSpec::GaussRational { re, im, den } => Contraction::GaussRational {
                re: *re,
                im: *im,
                den: *den,
            },
            LambdaSpec::Float { value, angle } => Contraction::Float {
                lam: *value,
                angle: *angle,
            },
        };
        let translations: Vec<[i64; 2]> = self
            .translations
            .iter()
            .map(|t| match t {
                TranslationSpec::Real(a) => [*a, 0],
                TranslationSpec::Gaussian(g) => *g,
            })
            .collect();
        let n = translations.len();
        let probs = self
            .probs
            .clone()
            .unwrap_or_else(|| vec![1.0 / n.max(1) as f64; n]);
        let family = match self.family {
            FamilyTag::Bernoulli => {
                if self.dim != 1 || translations != [[-1, 0], [1, 0]] {
                    return Err(Error::invalid("bernoulli systems have translations [-1, 1]"));
                }
                Family::Bernoulli { bias: probs[1] }
            }
            FamilyTag::Custom => Family::Custom {
                splitting_bound: self.splitting_bound,
                garsia_entropy: self.garsia_entropy,
            },
        };
        UniformIFS::new(self.dim, contraction, translations, probs, family)
    }
}
