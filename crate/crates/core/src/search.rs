//! Exhaustive search for algebraic `λ` certified by the Bernoulli criterion.
//!
//! Candidates are monic with constant term `±1`. A passing `λ` needs
//! `log M < (27/26) log 2`, so the single conjugate outside the unit disk is
//! real and lies in `(2, 2^{27/26})` up to sign; a sign change of `p` there
//! is therefore a sound first screen.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criterion::{bernoulli_criterion, family_check, family_polynomial, CriterionReport};
use crate::error::{Error, Result};
use crate::polyalg::{
    count_with_roots, find_roots, is_irreducible, AlgebraicParameter, AlgebraicSummary, IntPolynomial,
    roots_f64, DEFAULT_ROOT_TOL, MAX_IRREDUCIBLE_DEGREE,
};

pub const MAX_SEARCH_DEGREE: usize = 14;
pub const MAX_SEARCH_HEIGHT: i64 = 3;

/// Right end of the screening interval, above `2^{27/26} ≈ 2.05400`.
const SCREEN_NUM: i64 = 20541;
const SCREEN_DEN: i64 = 10000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_degree: usize,
    pub max_height: i64,
    /// Checkpoint file; an existing file with a matching config resumes.
    #[serde(default)]
    pub checkpoint: Option<PathBuf>,
}

impl SearchConfig {
    pub fn new(max_degree: usize, max_height: i64) -> Result<Self> {
        let cfg = Self {
            max_degree,
            max_height,
            checkpoint: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint = Some(path.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_degree > MAX_SEARCH_DEGREE {
            return Err(Error::invalid(format!("max_degree must be <= {MAX_SEARCH_DEGREE}")));
        }
        if !(1..=MAX_SEARCH_HEIGHT).contains(&self.max_height) {
            return Err(Error::invalid(format!("max_height must lie in 1..={MAX_SEARCH_HEIGHT}")));
        }
        Ok(())
    }

    /// FNV-1a of the canonical `degree:height` key.
    pub fn hash(&self) -> String {
        let key = format!("{}:{}", self.max_degree, self.max_height);
        let h = key
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        format!("{h:016x}")
    }
}

/// A block fixes the degree and the (up to) two coefficients below the
/// leading one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Block {
    degree: usize,
    top: [Option<i64>; 2],
}

fn blocks(cfg: &SearchConfig) -> Vec<Block> {
    let h = cfg.max_height;
    let mut out = Vec::new();
    for degree in 1..=cfg.max_degree {
        match degree {
            1 => out.push(Block { degree, top: [None, None] }),
            2 => out.extend((-h..=h).map(|a| Block { degree, top: [Some(a), None] })),
            _ => {
                for a in -h..=h {
                    for b in -h..=h {
                        out.push(Block { degree, top: [Some(a), Some(b)] });
                    }
                }
            }
        }
    }
    out
}

impl Block {
    fn free(&self) -> usize {
        self.degree.saturating_sub(3)
    }

    fn len(&self, h: i64) -> u64 {
        2 * ((2 * h + 1) as u64).pow(self.free() as u32)
    }

    /// Ascending coefficient vector of the `i`-th candidate, `i` in
    /// lexicographic order of the descending coefficients.
    fn candidate(&self, i: u64, h: i64) -> Vec<i64> {
        let d = self.degree;
        let mut c = vec![0i64; d + 1];
        c[d] = 1;
        c[0] = if i % 2 == 0 { -1 } else { 1 };
        let mut rest = i / 2;
        let base = (2 * h + 1) as u64;
        // the lowest free coefficient varies fastest
        for k in 1..=self.free() {
            c[k] = (rest % base) as i64 - h;
            rest /= base;
        }
        if let Some(a) = self.top[0] {
            c[d - 1] = a;
        }
        if let Some(b) = self.top[1] {
            c[d - 2] = b;
        }
        c
    }
}

/// Every candidate in lexicographic order.
pub fn enumerate_candidates(cfg: &SearchConfig) -> Result<impl Iterator<Item = IntPolynomial>> {
    cfg.validate()?;
    let h = cfg.max_height;
    Ok(blocks(cfg).into_iter().flat_map(move |b| {
        (0..b.len(h)).map(move |i| IntPolynomial::from_i64s(&b.candidate(i, h)).expect("monic"))
    }))
}

fn horner_f64(c: &[i64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut mag = 0.0;
    for &a in c.iter().rev() {
        v = v * x + a as f64;
        mag = mag * x.abs() + (a as f64).abs();
    }
    (v, mag)
}

/// Sign of `p(num/den)`, exactly.
fn sign_at(c: &[i64], num: i64, den: i64) -> i32 {
    let (v, mag) = horner_f64(c, num as f64 / den as f64);
    if v.abs() > 4.0 * c.len() as f64 * f64::EPSILON * mag {
        return if v > 0.0 { 1 } else { -1 };
    }
    // den^d · p(num/den)
    let d = c.len() - 1;
    let (n, m) = (BigInt::from(num), BigInt::from(den));
    let mut acc = BigInt::zero();
    for (k, &a) in c.iter().enumerate() {
        acc += BigInt::from(a) * n.pow(k as u32) * m.pow((d - k) as u32);
    }
    if acc.is_zero() {
        0
    } else if acc.is_positive() {
        1
    } else {
        -1
    }
}

/// Sound necessary condition for a passing root: a sign change on
/// `[2, T]` or `[−T, −2]`.
fn passes_prefilter(c: &[i64]) -> bool {
    let change = |a: i32, b: i32| a * b <= 0;
    change(sign_at(c, 2, 1), sign_at(c, SCREEN_NUM, SCREEN_DEN))
        || change(sign_at(c, -2, 1), sign_at(c, -SCREEN_NUM, SCREEN_DEN))
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifiedParameter {
    pub param: AlgebraicSummary,
    pub report: CriterionReport,
}

/// The qualifying real roots of `p` in `(1/2, 1)`.
pub fn screen(p: &IntPolynomial) -> Result<Vec<CertifiedParameter>> {
    if p.degree() < 2 {
        return Ok(Vec::new());
    }
    let roots = find_roots(p, DEFAULT_ROOT_TOL)?;
    if !roots.approx().iter().any(|z| z.norm() > 2.0) {
        return Ok(Vec::new());
    }
    let cands = AlgebraicParameter::select(p, &roots, 0.5, 1.0);
    if cands.is_empty() || !is_irreducible(p)? {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for c in cands {
        let report = bernoulli_criterion(c.mahler, c.lambda())?;
        if report.passes {
            out.push(CertifiedParameter {
                param: c.summary(),
                report,
            });
        }
    }
    Ok(out)
}

/// Double-precision Mahler measure, used only to discard candidates far
/// above the passing range; falls through when the iteration fails.
const COARSE_MAHLER_CUTOFF: f64 = 2.2;

fn screen_coeffs(c: &[i64]) -> Result<Vec<CertifiedParameter>> {
    if !passes_prefilter(c) {
        return Ok(Vec::new());
    }
    let p = IntPolynomial::from_i64s(c)?;
    if let Ok(z) = roots_f64(&p) {
        let m: f64 = z.iter().map(|r| r.norm().max(1.0)).product();
        if m > COARSE_MAHLER_CUTOFF {
            return Ok(Vec::new());
        }
    }
    screen(&p)
}

fn run_block(b: &Block, h: i64) -> Result<Vec<CertifiedParameter>> {
    let mut out = Vec::new();
    for i in 0..b.len(h) {
        out.extend(screen_coeffs(&b.candidate(i, h))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    /// Number of blocks finished, in block order.
    pub last_completed_block: usize,
    pub results: Vec<CheckpointRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointRow {
    pub minpoly: String,
    pub lambda: f64,
}

fn load_checkpoint(path: &Path, cfg: &SearchConfig) -> Result<Option<Checkpoint>> {
    if !path.exists() {
        return Ok(None);
    }
    let cp: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
    if cp.config_hash != cfg.hash() {
        return Err(Error::invalid(format!(
            "checkpoint {} belongs to a different configuration",
            path.display()
        )));
    }
    Ok(Some(cp))
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_string_pretty(cp)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn restore(rows: &[CheckpointRow]) -> Result<Vec<CertifiedParameter>> {
    rows.iter()
        .map(|r| {
            let p: IntPolynomial = r.minpoly.parse()?;
            let c = AlgebraicParameter::nearest(&p, r.lambda)?;
            Ok(CertifiedParameter {
                report: bernoulli_criterion(c.mahler, c.lambda())?,
                param: c.summary(),
            })
        })
        .collect()
}

/// Progress hook called after each batch with `(blocks done, total)`.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

pub fn run_search(cfg: &SearchConfig) -> Result<Vec<CertifiedParameter>> {
    run_search_with(cfg, None, &|_, _| {})
}

/// Runs on `jobs` workers (all cores when `None`). Blocks are processed in
/// batches; results and checkpoints are written in block order, so the
/// output does not depend on the worker count.
pub fn run_search_with(cfg: &SearchConfig, jobs: Option<usize>, progress: Progress) -> Result<Vec<CertifiedParameter>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let all = blocks(cfg);
    let h = cfg.max_height;
    let (mut done, mut results) = match cfg.checkpoint.as_deref().map(|p| load_checkpoint(p, cfg)).transpose()? {
        Some(Some(cp)) => (cp.last_completed_block.min(all.len()), restore(&cp.results)?),
        _ => (0, Vec::new()),
    };
    let batch = pool.current_num_threads().max(1) * 2;
    while done < all.len() {
        let end = (done + batch).min(all.len());
        let found: Vec<Vec<CertifiedParameter>> =
            pool.install(|| all[done..end].par_iter().map(|b| run_block(b, h)).collect::<Result<_>>())?;
        results.extend(found.into_iter().flatten());
        done = end;
        if let Some(path) = &cfg.checkpoint {
            save_checkpoint(
                path,
                &Checkpoint {
                    config_hash: cfg.hash(),
                    last_completed_block: done,
                    results: results
                        .iter()
                        .map(|r| CheckpointRow {
                            minpoly: r.param.min_poly.clone(),
                            lambda: r.param.lambda,
                        })
                        .collect(),
                },
            )?;
        }
        progress(done, all.len());
    }
    results.dedup_by(|a, b| a.param.min_poly == b.param.min_poly && a.param.lambda == b.param.lambda);
    Ok(results)
}

pub fn results_csv(rows: &[CertifiedParameter]) -> String {
    let mut s = String::from("minpoly,mahler,lambda,margin\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:.6},{:.6},{:.6e}\n",
            r.param.min_poly, r.param.mahler, r.param.lambda, r.report.margin
        ));
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyRow {
    pub n: usize,
    pub lambda: f64,
    pub lambda_lower: f64,
    pub lambda_in_range: bool,
    pub large_root: f64,
    pub large_root_in_range: bool,
    pub interior_others: usize,
    pub interior_count_ok: bool,
    pub schur_cohn_verified: bool,
    pub irreducible: bool,
    pub mahler: f64,
    /// Verdict from the closed-form bounds on `M` and `λ`.
    pub family_passes: bool,
    /// Verdict at the computed root and Mahler measure.
    pub direct_passes: bool,
}

impl FamilyRow {
    /// Every root-location statement holds.
    pub fn roots_ok(&self) -> bool {
        self.lambda_in_range && self.large_root_in_range && self.interior_count_ok && self.irreducible
    }
}

/// Root locations and verdicts for `Xⁿ − 2Xⁿ⁻¹ − X + 1`, `n_lo ≤ n ≤ n_hi`.
///
/// Irreducibility follows from the root count: a monic integer factor with
/// every root strictly inside the unit disk would have a nonzero integer
/// constant of modulus below one. Below the enumeration bound it is also
/// confirmed directly.
/// `p(2) < 0 < p(2 + 2^{2−n})` evaluated exactly as `bⁿ·p(a/b)`.
fn large_root_bracketed(p: &IntPolynomial) -> bool {
    let n = p.degree();
    let b: BigInt = BigInt::from(1) << (n - 2);
    let a: BigInt = (BigInt::from(1) << (n - 1)) + 1;
    let mut at_hi = BigInt::zero();
    for (i, c) in p.coeffs().iter().enumerate() {
        at_hi += c * a.pow(i as u32) * b.pow((n - i) as u32);
    }
    p.eval_int(&BigInt::from(2)).is_negative() && at_hi.is_positive()
}

pub fn verify_family(n_lo: usize, n_hi: usize) -> Result<Vec<FamilyRow>> {
    if !(5 <= n_lo && n_lo <= n_hi && n_hi <= 64) {
        return Err(Error::invalid("need 5 <= n_lo <= n_hi <= 64"));
    }
    (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            let fc = family_check(n)?;
            let p = family_polynomial(n);
            let roots = find_roots(&p, DEFAULT_ROOT_TOL)?;
            let disk = count_with_roots(&p, 1.0, &roots)?;
            let outside = roots.approx().iter().filter(|z| z.norm() > 1.0).count();
            let mut irreducible = disk.count == n - 1 && outside == 1;
            if n <= MAX_IRREDUCIBLE_DEGREE {
                irreducible &= is_irreducible(&p)?;
            }
            Ok(FamilyRow {
                n,
                lambda: fc.lambda,
                lambda_lower: fc.lambda_lower,
                lambda_in_range: fc.lambda > fc.lambda_lower && fc.lambda < 1.0,
                large_root: fc.large_root,
                large_root_in_range: outside == 1 && large_root_bracketed(&p),
                interior_others: fc.interior_others,
                interior_count_ok: fc.interior_others == n - 2,
                schur_cohn_verified: fc.schur_cohn_verified,
                irreducible,
                mahler: fc.mahler,
                family_passes: fc.bound.passes,
                direct_passes: fc.exact.passes,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn candidate_counts_and_order() {
        let cfg = SearchConfig::new(2, 1).unwrap();
        let all: Vec<String> = enumerate_candidates(&cfg).unwrap().map(|p| p.to_string()).collect();
        // two linear, six quadratic
        assert_eq!(all.len(), 8);
        let quad: Vec<&String> = all.iter().skip(2).collect();
        assert_eq!(quad.len(), 6);
        let cfg9 = SearchConfig::new(9, 2).unwrap();
        let nine = enumerate_candidates(&cfg9).unwrap().filter(|p| p.degree() == 9).count();
        assert_eq!(nine, 2 * 5usize.pow(8));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let cfg = SearchConfig::new(5, 1).unwrap();
        let v: Vec<Vec<i64>> = enumerate_candidates(&cfg)
            .unwrap()
            .map(|p| {
                let mut c: Vec<i64> = p.coeffs().iter().map(|x| i64::try_from(x).unwrap()).collect();
                c.reverse();
                c
            })
            .collect();
        for w in v.windows(2) {
            assert!(w[0].len() < w[1].len() || (w[0].len() == w[1].len() && w[0] < w[1]));
        }
    }

    #[test]
    fn prefilter_keeps_examples() {
        for s in ["X^9-2X^8-X+1", "X^10+2X^9-1", "X^7+2X^6-X-1"] {
            let p = poly(s);
            let c: Vec<i64> = p.coeffs().iter().map(|x| i64::try_from(x).unwrap()).collect();
            assert!(passes_prefilter(&c), "{s}");
        }
        assert!(!passes_prefilter(&[-1, -1, 1]));
    }

    #[test]
    fn screen_examples() {
        let r = screen(&poly("X^9-2X^8-X+1")).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].param.lambda - 0.799_533).abs() < 1e-5);
        assert!((r[0].param.mahler - 2.003_861).abs() < 1e-5);
        assert!(screen(&poly("X^2-X-1")).unwrap().is_empty());
        let r = screen(&poly("X^10+2X^9-1")).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].param.lambda - 0.888_810).abs() < 1e-5);
        assert!((r[0].param.mahler - 2.001_936).abs() < 1e-5);
    }

    #[test]
    fn config_guards() {
        assert!(SearchConfig::new(15, 2).is_err());
        assert!(SearchConfig::new(9, 4).is_err());
        assert_ne!(SearchConfig::new(9, 2).unwrap().hash(), SearchConfig::new(9, 3).unwrap().hash());
        assert!(run_search(&SearchConfig::new(0, 1).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn family_rows() {
        let rows = verify_family(5, 14).unwrap();
        assert!(rows.iter().all(FamilyRow::roots_ok));
        let r13 = rows.iter().find(|r| r.n == 13).unwrap();
        assert!(r13.family_passes && r13.direct_passes);
        for w in rows.windows(2) {
            assert!(w[1].lambda > w[0].lambda);
            assert!(w[1].mahler < w[0].mahler);
        }
    }

    #[test]
    fn family_large_root_below_f64_resolution() {
        // 2 + 2^{2−n} rounds to 2 for these n
        let rows = verify_family(60, 64).unwrap();
        assert!(rows.iter().all(|r| r.roots_ok() && r.interior_count_ok), "{rows:?}");
        assert!(rows.iter().all(|r| r.large_root == 2.0));
    }
}
