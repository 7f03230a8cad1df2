use std::fmt;
use std::str::FromStr;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{self, HpComplex};

/// Integer polynomial, coefficients in ascending degree order.
///
/// The coefficient list is never empty and its last entry is nonzero, so the
/// zero polynomial is not representable. Operations that can produce zero
/// return `Option`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl TryFrom<String> for IntPolynomial {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<IntPolynomial> for String {
    fn from(p: IntPolynomial) -> Self {
        p.to_string()
    }
}

pub(crate) fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

impl IntPolynomial {
    /// Trailing zero coefficients are dropped; an all-zero list is rejected.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        let coeffs = trim(coeffs);
        if coeffs.is_empty() {
            return Err(Error::invalid("zero polynomial"));
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub(crate) fn from_trimmed(coeffs: Vec<BigInt>) -> Option<Self> {
        let coeffs = trim(coeffs);
        (!coeffs.is_empty()).then_some(Self { coeffs })
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![BigInt::zero(); degree + 1];
        c[degree] = BigInt::one();
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn lead(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    pub fn constant(&self) -> &BigInt {
        &self.coeffs[0]
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_hp(&self, z: &HpComplex, p: usize) -> HpComplex {
        let mut acc = HpComplex::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z, p);
            acc.re = hp::add(&acc.re, &hp::from_bigint(c, p), p);
        }
        acc
    }

    pub fn eval_hp_real(&self, x: &BigFloat, p: usize) -> BigFloat {
        let mut acc = BigFloat::from_u64(0, p);
        for c in self.coeffs.iter().rev() {
            acc = hp::add(&hp::mul(&acc, x, p), &hp::from_bigint(c, p), p);
        }
        acc
    }

    pub fn derivative(&self) -> Option<Self> {
        let d: Vec<BigInt> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        Self::from_trimmed(d)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn scale(&self, k: &BigInt) -> Option<Self> {
        Self::from_trimmed(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// `p(-X)`.
    pub fn reflect(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// `Xⁿ·p(1/X)`: the coefficient list reversed.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::from_trimmed(c).expect("leading coefficient is nonzero")
    }

    /// Gcd of all coefficients, always positive.
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide by the content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        Self {
            coeffs: self.coeffs.iter().map(|c| c / &g).collect(),
        }
    }

    /// Exact quotient over ℤ, `None` when `d` does not divide `self` with
    /// integer quotient.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.degree() > self.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dl = d.lead();
        let mut q = vec![BigInt::zero(); self.degree() - d.degree() + 1];
        for k in (0..q.len()).rev() {
            let top = &rem[k + d.degree()];
            if top.is_zero() {
                continue;
            }
            let (qk, r) = top.div_rem(dl);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &qk * dc;
            }
            q[k] = qk;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Self::from_trimmed(q)
    }

    /// Pseudo-remainder of `self` by `d`: `lead(d)^k · self mod d`.
    pub fn pseudo_rem(&self, d: &Self) -> Option<Self> {
        let mut r = self.coeffs.clone();
        let dl = d.lead().clone();
        let dd = d.degree();
        while r.len() > dd && !r.is_empty() {
            let top = r.last().cloned().unwrap_or_default();
            let shift = r.len() - 1 - dd;
            for c in r.iter_mut() {
                *c *= &dl;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[shift + j] -= &top * dc;
            }
            r = trim(r);
        }
        Self::from_trimmed(r)
    }

    /// Primitive gcd over ℤ (leading coefficient positive).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        loop {
            match a.pseudo_rem(&b) {
                None => return b,
                Some(r) if r.degree() == 0 => {
                    return IntPolynomial::new(vec![BigInt::one()]).expect("one")
                }
                Some(r) => {
                    a = b;
                    b = r.primitive_part();
                }
            }
        }
    }

    /// Square-free decomposition: `(f, m)` pairs with `p = c·∏ f^m`, each `f`
    /// primitive, square-free and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPolynomial, usize)> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let p = self.primitive_part();
        let dp = p.derivative().expect("degree >= 1");
        let mut a = p.gcd(&dp);
        let mut b = p.div_exact(&a).expect("gcd divides");
        let mut out = Vec::new();
        let mut mult = 1;
        while b.degree() > 0 {
            let h = a.gcd(&b);
            let f = b.div_exact(&h).expect("gcd divides");
            if f.degree() > 0 {
                out.push((f.primitive_part(), mult));
            }
            b = h;
            a = a.div_exact(&b).expect("gcd divides");
            mult += 1;
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.squarefree_decomposition().iter().all(|(_, m)| *m == 1)
    }

    /// `den^n · p(num·X/den)`, which has integer coefficients.
    pub fn rescale(&self, num: &BigInt, den: &BigInt) -> Self {
        let n = self.degree();
        let mut out = Vec::with_capacity(n + 1);
        let mut num_pow = BigInt::one();
        let den_pows: Vec<BigInt> = {
            let mut v = vec![BigInt::one(); n + 1];
            for i in 1..=n {
                v[i] = &v[i - 1] * den;
            }
            v
        };
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c * &num_pow * &den_pows[n - k]);
            num_pow *= num;
        }
        Self::from_trimmed(out).expect("rescaling by nonzero factors keeps the leading term")
    }

    /// Comma-separated ascending coefficients, e.g. `1,-1,0,1`.
    pub fn to_csv(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_csv(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    /// Parse `X^9-2X^8-X+1` style input (also `x`, `*`, spaces).
    pub fn parse_human(s: &str) -> Result<Self> {
        let cleaned: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '*')
            .map(|c| if c == 'x' { 'X' } else { c })
            .collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bad = || Error::Parse(format!("cannot parse polynomial {s:?}"));
        let mut terms: Vec<(BigInt, usize)> = Vec::new();
        let bytes: Vec<char> = cleaned.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = BigInt::one();
            if bytes[i] == '+' || bytes[i] == '-' {
                if bytes[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            } else if !terms.is_empty() {
                return Err(bad());
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coef: Option<BigInt> = if i > start {
                Some(
                    bytes[start..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| bad())?,
                )
            } else {
                None
            };
            let mut exp = 0usize;
            if i < bytes.len() && bytes[i] == 'X' {
                i += 1;
                exp = 1;
                if i < bytes.len() && bytes[i] == '^' {
                    i += 1;
                    let es = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if es == i {
                        return Err(bad());
                    }
                    exp = bytes[es..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| bad())?;
                }
            } else if coef.is_none() {
                return Err(bad());
            }
            terms.push((sign * coef.unwrap_or_else(BigInt::one), exp));
        }
        let deg = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        for (c, e) in terms {
            coeffs[e] += c;
        }
        Self::new(coeffs)
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Accepts either the comma-separated or the human-readable form.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains('X') || t.contains('x') {
            Self::parse_human(t)
        } else if t.contains(',') {
            Self::parse_csv(t)
        } else {
            // a bare integer is a constant polynomial in both syntaxes
            Self::parse_csv(t)
        }
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            if k == 0 || !a.is_one() {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "X")?,
                _ => write!(f, "X^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

/// `p*`: reciprocal adjoint. For real coefficients this reverses the list.
pub fn reciprocal_adjoint(p: &IntPolynomial) -> IntPolynomial {
    p.reversed()
}

/// `Tp = p(0)·p − p*(0)·p*`, read at the nominal degree of `p`.
///
/// Returns `None` when the transform vanishes identically.
pub fn schur_cohn_transform(p: &IntPolynomial) -> Option<IntPolynomial> {
    let n = p.degree();
    let a0 = p.constant();
    let an = p.lead();
    let c = p.coeffs();
    let out: Vec<BigInt> = (0..=n).map(|k| a0 * &c[k] - an * &c[n - k]).collect();
    IntPolynomial::from_trimmed(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn eval_examples() {
        let q = p("X^2-X-1");
        assert_eq!(q.eval(Complex64::new(2.0, 0.0)), Complex64::new(1.0, 0.0));
        assert_eq!(q.eval_int(&BigInt::from(2)), BigInt::from(1));
        assert_eq!(p("X-2").eval_int(&BigInt::from(2)), BigInt::zero());
        let v = p("X^9-2X^8-X+1").eval(Complex64::new(0.799_533, 0.0));
        assert!(v.norm() < 1e-5, "{v}");
    }

    #[test]
    fn parse_both_forms() {
        let a = p("1,-1,0,0,0,0,0,0,-2,1");
        let b = p("X^9-2X^8-X+1");
        assert_eq!(a, b);
        assert_eq!(b.to_string(), "X^9-2X^8-X+1");
        assert_eq!(b.to_csv(), "1,-1,0,0,0,0,0,0,-2,1");
        assert_eq!(p("-x^2 + 3*x - 7").to_csv(), "-7,3,-1");
        assert_eq!(p("5").degree(), 0);
        assert!("X^".parse::<IntPolynomial>().is_err());
        assert!("1,,2".parse::<IntPolynomial>().is_err());
        assert!("0,0".parse::<IntPolynomial>().is_err());
        assert!("X--1".parse::<IntPolynomial>().is_err());
    }

    #[test]
    fn reciprocal_adjoint_examples() {
        assert_eq!(reciprocal_adjoint(&p("X^2-X-1")).to_string(), "-X^2-X+1");
        for n in 5..12 {
            let q = IntPolynomial::from_i64s(
                &(0..=n)
                    .map(|k| match k {
                        0 => 1,
                        1 => -1,
                        k if k == n - 1 => -2,
                        k if k == n => 1,
                        _ => 0,
                    })
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let want = format!("X^{n}-X^{}-2X+1", n - 1);
            assert_eq!(reciprocal_adjoint(&q).to_string(), want);
        }
        assert_eq!(reciprocal_adjoint(&p("3")), p("3"));
    }

    #[test]
    fn schur_cohn_transform_examples() {
        // self-reciprocal with |p(0)| = |lead|: vanishes
        assert!(schur_cohn_transform(&p("X^2+3X+1")).is_none());
        let t = schur_cohn_transform(&p("X-2")).unwrap();
        assert_eq!(t.constant(), &BigInt::from(3));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = p("X^2-1");
        let b = p("X^2-2X+1");
        assert_eq!(a.gcd(&b), p("X-1"));
        let sq = p("X^3-X^2-X+1"); // (X-1)^2 (X+1)
        let dec = sq.squarefree_decomposition();
        assert_eq!(dec, vec![(p("X+1"), 1), (p("X-1"), 2)]);
        assert!(p("X^9-2X^8-X+1").is_squarefree());
    }

    #[test]
    fn exact_division() {
        let a = p("X^2-1");
        assert_eq!(a.div_exact(&p("X+1")), Some(p("X-1")));
        assert_eq!(a.div_exact(&p("X+2")), None);
        assert_eq!(p("2X^2-2").div_exact(&p("2X+2")), Some(p("X-1")));
        assert_eq!(p("X^2+1").div_exact(&p("2X+1")), None);
    }

    #[test]
    fn rescale_matches_substitution() {
        let q = p("X^2-X-1");
        // 4·q(3X/2) = 9X² − 6X − 4
        assert_eq!(q.rescale(&BigInt::from(3), &BigInt::from(2)), p("9X^2-6X-4"));
    }
}
