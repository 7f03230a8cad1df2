//! Irreducibility over ℤ by root-subset reconstruction.
//!
//! Any factor of `p` is `c·∏_{α∈S}(X − α)` for some subset `S` of the roots,
//! with `c` dividing the leading coefficient. Multiplying by `lead(p)` makes
//! every such candidate integral, so rounding and an exact division decide
//! each subset. Complex-conjugate roots are kept together because integer
//! factors have real coefficients.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use super::poly::IntPolynomial;
use super::roots::{find_roots_with_precision, RootSet, DEFAULT_ROOT_TOL};
use crate::error::{Error, Result};
use crate::hp::{self, HpComplex};

/// Largest degree accepted by [`is_irreducible`].
pub const MAX_IRREDUCIBLE_DEGREE: usize = 24;

const NEAR_INTEGER: f64 = 1e-6;

pub fn is_irreducible(p: &IntPolynomial) -> Result<bool> {
    Ok(find_factor(p)?.is_none())
}

/// A nontrivial factor of `p` if one exists.
pub fn find_factor(p: &IntPolynomial) -> Result<Option<IntPolynomial>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::invalid("irreducibility needs degree >= 1"));
    }
    if n > MAX_IRREDUCIBLE_DEGREE {
        return Err(Error::invalid(format!(
            "degree {n} exceeds the enumeration bound {MAX_IRREDUCIBLE_DEGREE}"
        )));
    }
    if !p.content().is_one() {
        return Err(Error::invalid("polynomial must be primitive (content 1)"));
    }
    if n == 1 {
        return Ok(None);
    }
    if p.constant().is_zero() {
        return Ok(Some(IntPolynomial::monomial(1)));
    }
    let dec = p.squarefree_decomposition();
    if dec.len() != 1 || dec[0].1 != 1 {
        let (f, _) = dec.into_iter().next().expect("degree >= 1");
        return Ok(Some(f));
    }

    let bits = hp::working_bits();
    let roots = find_roots_with_precision(p, DEFAULT_ROOT_TOL, bits)?;
    let units = conjugate_units(&roots);
    let lead = p.lead().to_f64().unwrap_or(f64::NAN);

    let mut search = Search {
        p,
        units: &units,
        roots: &roots,
        lead,
        half: n / 2,
        chosen: Vec::new(),
        found: None,
    };
    search.dfs(0, vec![Complex64::new(1.0, 0.0)])?;
    Ok(search.found)
}

/// Groups of root indices that must be taken together: a real root alone or
/// a conjugate pair.
fn conjugate_units(roots: &RootSet) -> Vec<Vec<usize>> {
    let approx = roots.approx();
    let mut used = vec![false; approx.len()];
    let mut units = Vec::new();
    for i in 0..approx.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if approx[i].im == 0.0 {
            units.push(vec![i]);
            continue;
        }
        let target = approx[i].conj();
        let partner = (0..approx.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                (approx[a] - target)
                    .norm()
                    .total_cmp(&(approx[b] - target).norm())
            });
        match partner {
            Some(j) => {
                used[j] = true;
                units.push(vec![i, j]);
            }
            None => units.push(vec![i]),
        }
    }
    units
}

struct Search<'a> {
    p: &'a IntPolynomial,
    units: &'a [Vec<usize>],
    roots: &'a RootSet,
    lead: f64,
    half: usize,
    chosen: Vec<usize>,
    found: Option<IntPolynomial>,
}

impl Search<'_> {
    fn dfs(&mut self, start: usize, prod: Vec<Complex64>) -> Result<()> {
        let size = prod.len() - 1;
        if size >= 1 {
            self.test(&prod)?;
            if self.found.is_some() {
                return Ok(());
            }
        }
        for u in start..self.units.len() {
            let unit = &self.units[u];
            if size + unit.len() > self.half {
                continue;
            }
            let mut next = prod.clone();
            for &ri in unit {
                next = mul_linear(&next, self.roots.roots[ri].approx());
            }
            self.chosen.push(u);
            self.dfs(u + 1, next)?;
            self.chosen.pop();
            if self.found.is_some() {
                return Ok(());
            }
        }
        Ok(())
    }

    fn test(&mut self, prod: &[Complex64]) -> Result<()> {
        // constant term first: cheapest rejection
        let c0 = prod[0].re * self.lead;
        if (c0 - c0.round()).abs() > NEAR_INTEGER || c0.round() == 0.0 {
            return Ok(());
        }
        let Some(candidate) = round_candidate(prod, self.lead) else {
            return Ok(());
        };
        if self.divides(&candidate) {
            self.found = Some(candidate.primitive_part());
            return Ok(());
        }
        // near-integral but not a factor: measure the distance to the
        // integer lattice at full precision
        match self.hp_distance(&candidate) {
            d if d > self.hp_threshold() => Ok(()),
            _ => Err(Error::PrecisionExhausted),
        }
    }

    fn hp_threshold(&self) -> f64 {
        let bits = self.roots.precision_bits as i32;
        2f64.powi(-bits / 2).max(1e3 * self.roots.residual_bound)
    }

    fn divides(&self, candidate: &IntPolynomial) -> bool {
        let g = candidate.primitive_part();
        g.degree() >= 1 && self.p.div_exact(&g).is_some()
    }

    /// Largest distance of `lead·∏(X − α)` from `candidate`, coefficientwise.
    fn hp_distance(&self, candidate: &IntPolynomial) -> f64 {
        let bits = self.roots.precision_bits;
        let mut prod = vec![HpComplex::from_c64(Complex64::new(1.0, 0.0), bits)];
        for &u in &self.chosen {
            for &ri in &self.units[u] {
                let root = &self.roots.roots[ri].value;
                let mut next = vec![HpComplex::zero(bits); prod.len() + 1];
                for (k, c) in prod.iter().enumerate() {
                    next[k + 1] = next[k + 1].add(c, bits);
                    next[k] = next[k].sub(&c.mul(root, bits), bits);
                }
                prod = next;
            }
        }
        let lead = hp::from_bigint(self.p.lead(), bits);
        prod.iter()
            .zip(candidate.coeffs())
            .map(|(c, k)| {
                let z = c.scale(&lead, bits);
                let re = hp::sub(&z.re, &hp::from_bigint(k, bits), bits);
                hp::to_f64(&re).abs().max(hp::to_f64(&z.im).abs())
            })
            .fold(0.0, f64::max)
    }
}

fn mul_linear(poly: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (k, &c) in poly.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= c * root;
    }
    out
}

fn round_candidate(prod: &[Complex64], lead: f64) -> Option<IntPolynomial> {
    let mut coeffs = Vec::with_capacity(prod.len());
    for c in prod {
        let v = c.re * lead;
        let im = c.im * lead;
        if (v - v.round()).abs() > NEAR_INTEGER || im.abs() > NEAR_INTEGER || v.abs() > 9e15 {
            return None;
        }
        coeffs.push(BigInt::from(v.round() as i64));
    }
    IntPolynomial::new(coeffs).ok()
}
