use serde::Serialize;

use super::support::{level_statistics, Representation};
use super::{Contraction, Family, UniformIFS};
use crate::criterion::{general_criterion, CriterionInput, CriterionReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingProvenance {
    /// `M_F ≤ M_λ` for algebraic `λ`.
    Mahler,
    /// `M_F ≤ q` from `|u − v| ≥ q^{−k}`.
    Prime,
    /// `M_F ≤ p` from the Gaussian-integer lattice.
    PrimePower,
    Manual,
    Unavailable,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub family: Family,
    pub dim: usize,
    pub lambda: f64,
    pub garsia_sequence: Vec<(usize, f64)>,
    pub splitting_sequence: Vec<(usize, f64)>,
    /// Largest tested depth with `n^k` distinct atoms.
    pub overlap_free_up_to: usize,
    pub overlap_free_certified: bool,
    pub overlap_reason: String,
    pub garsia_entropy: Option<f64>,
    pub entropy_certified: bool,
    pub splitting_bound: Option<f64>,
    pub splitting_provenance: SplittingProvenance,
    pub criterion: Option<CriterionReport>,
    pub absolutely_continuous: bool,
}

/// Assemble the certified inputs of the criterion for `f` and evaluate it.
///
/// Empirical sequences up to depth `kmax` are always attached; they never
/// replace the algebraic arguments.
pub fn certify(f: &UniformIFS, kmax: usize) -> Result<CertificationReport> {
    let stats = level_statistics(f, kmax, true)?;
    let n = f.n_maps() as u128;
    let overlap_free_up_to = stats
        .iter()
        .take_while(|s| f.representation() != Representation::Float && s.atoms as u128 == n.pow(s.k as u32))
        .count();
    let garsia_sequence = stats
        .iter()
        .filter_map(|s| s.garsia_ratio.map(|h| (s.k, h)))
        .collect();
    let splitting_sequence = stats
        .iter()
        .map(|s| (s.k, s.separation.expect("requested").powf(-1.0 / s.k as f64)))
        .collect();

    let (overlap_free, reason, h, m, prov) = match (f.family(), f.contraction()) {
        (Family::Bernoulli { bias }, Contraction::Algebraic { param, .. }) => {
            let above_two = param.has_conjugate_above_two();
            let reason = if above_two {
                "a conjugate of modulus > 2 rules out roots of {-1,0,1} polynomials"
            } else {
                "no conjugate of modulus > 2; exact overlaps not excluded"
            };
            let hb = -(bias * bias.ln() + (1.0 - bias) * (1.0 - bias).ln());
            (above_two, reason.to_string(), above_two.then_some(hb), Some(param.mahler), SplittingProvenance::Mahler)
        }
        (Family::Bernoulli { .. }, _) => (
            false,
            "ratio has no algebraic description".to_string(),
            None,
            None,
            SplittingProvenance::Unavailable,
        ),
        (Family::QPrime { q }, _) => (
            true,
            "points are distinct residues modulo q at each level".to_string(),
            Some(((q - 1) as f64).ln()),
            Some(*q as f64),
            SplittingProvenance::Prime,
        ),
        (Family::Gauss { p, m }, _) => (
            true,
            "translations lie in distinct cosets of the prime ideal (p)".to_string(),
            Some((*m as f64).ln()),
            Some(*p as f64),
            SplittingProvenance::PrimePower,
        ),
        (Family::Custom { splitting_bound, garsia_entropy }, _) => (
            false,
            "user-supplied bounds".to_string(),
            *garsia_entropy,
            *splitting_bound,
            if splitting_bound.is_some() {
                SplittingProvenance::Manual
            } else {
                SplittingProvenance::Unavailable
            },
        ),
    };

    let criterion = match (h, m) {
        (Some(h), Some(m)) => Some(general_criterion(CriterionInput::new(f.dim() as u32, m.ln(), h, f.lam())?)),
        _ => None,
    };
    let entropy_certified = overlap_free && h.is_some();
    let certified_inputs = entropy_certified && prov != SplittingProvenance::Manual && prov != SplittingProvenance::Unavailable;
    let report = CertificationReport {
        family: f.family().clone(),
        dim: f.dim(),
        lambda: f.lam(),
        garsia_sequence,
        splitting_sequence,
        overlap_free_up_to,
        overlap_free_certified: overlap_free,
        overlap_reason: reason,
        garsia_entropy: h,
        entropy_certified,
        splitting_bound: m,
        splitting_provenance: prov,
        absolutely_continuous: certified_inputs && criterion.is_some_and(|c| c.passes),
        criterion,
    };
    if report.criterion.is_none() {
        return Err(Error::NotCertifiable {
            reason: format!("cannot certify: {}", report.overlap_reason),
            report: Box::new(report),
        });
    }
    Ok(report)
}
