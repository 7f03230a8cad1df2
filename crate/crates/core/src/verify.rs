//! Randomized property suites shared by the CLI and the tests.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::criterion::{family_check, q_family_check, threshold_f};
use crate::error::Result;
use crate::smooth::quad::{adaptive, QuadOptions};
use crate::smooth::{
    contraction_check, convolution_detail_check, detail, entropy_gauss, entropy_slope, entropy_to_detail_check,
    kernel_dy_r2, DiscreteMeasure, KernelConstants,
};

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Small,
    Full,
}

impl Profile {
    fn trials(self) -> (usize, usize) {
        // (entropy measures, inequality trials)
        match self {
            Profile::Small => (5, 8),
            Profile::Full => (20, 50),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            trials: 0,
            violations: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.violations += 1;
            self.failures.push(what());
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub profile: Profile,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub violations: usize,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub const DEFAULT_SEED: u64 = 20_190_521;

/// Random atomic measure on `[−1, 1]` with 2 to 6 atoms.
pub fn random_measure(rng: &mut impl Rng) -> DiscreteMeasure {
    let n = rng.gen_range(2..=6);
    let pts: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    DiscreteMeasure::from_reals(&pts, &w).expect("valid by construction")
}

pub fn normalization_check() -> Result<CheckResult> {
    let mut c = CheckResult::new("detail_point_mass");
    for d in [1, 2] {
        let m = DiscreteMeasure::delta(d, [0.0, 0.0])?;
        for r in [0.01, 1.0, 100.0] {
            let v = detail(&m, r)?;
            c.record((v.value - 1.0).abs() <= 1e-6, || format!("d={d} r={r}: {}", v.value));
        }
    }
    Ok(c)
}

/// `∫|∂y n_y|` by quadrature against `(1/y)(2/Γ(d/2))(d/(2e))^{d/2}`.
pub fn kernel_norm_check() -> Result<CheckResult> {
    let mut c = CheckResult::new("kernel_norm");
    for d in [1u32, 2] {
        let k = KernelConstants::new(d);
        for y in [0.01f64, 1.0, 50.0] {
            let s = y.sqrt();
            let zero = (d as f64 * y).sqrt();
            let q = if d == 1 {
                let f = |x: f64| kernel_dy_r2(x * x, y, 1).abs();
                2.0 * adaptive(&f, &[(0.0, zero), (zero, 40.0 * s)], &QuadOptions::tight())?.value
            } else {
                let f = |r: f64| 2.0 * PI * r * kernel_dy_r2(r * r, y, 2).abs();
                adaptive(&f, &[(0.0, zero), (zero, 40.0 * s)], &QuadOptions::tight())?.value
            };
            let want = k.dy_norm(y);
            c.record((q - want).abs() <= 1e-6 * want, || format!("d={d} y={y}: {q} vs {want}"));
        }
    }
    Ok(c)
}

pub fn constant_check() -> CheckResult {
    let mut c = CheckResult::new("c_kd_limit");
    let v = KernelConstants::new(1).c_kd(1e8);
    c.record((v - 1.935_77).abs() <= 1e-4, || format!("{v}"));
    c
}

pub fn criterion_checks() -> Result<CheckResult> {
    let mut c = CheckResult::new("criterion_examples");
    let grid: Vec<f64> = (0..50).map(|i| 0.51 + (0.9999 - 0.51) * i as f64 / 49.0).collect();
    let vals = grid.iter().map(|&l| threshold_f(l)).collect::<Result<Vec<_>>>()?;
    c.record(vals.windows(2).all(|w| w[1] > w[0]), || "F not increasing".into());
    c.record(vals.iter().all(|&v| v > 2.0), || "F <= 2 somewhere".into());
    c.record(family_check(13)?.exact.passes, || "family n = 13".into());
    c.record(q_family_check(17)?.passes, || "q = 17".into());
    Ok(c)
}

/// Monotonicity, concavity, scaling, separation and grouping of the
/// smoothed entropy, and agreement of the two slope estimators.
pub fn entropy_checks(n: usize, rng: &mut impl Rng) -> Result<Vec<CheckResult>> {
    let mut mono = CheckResult::new("entropy_increasing");
    let mut conc = CheckResult::new("slope_decreasing");
    let mut scale = CheckResult::new("entropy_scaling");
    let mut sep = CheckResult::new("entropy_separated_additivity");
    let mut group = CheckResult::new("entropy_grouping");
    let mut agree = CheckResult::new("slope_estimators_agree");
    let ys = [1e-3, 1e-2, 1e-1, 1.0];
    for _ in 0..n {
        let mu = random_measure(rng);
        let hs = ys.iter().map(|&y| entropy_gauss(&mu, y)).collect::<Result<Vec<_>>>()?;
        let ss = ys.iter().map(|&y| entropy_slope(&mu, y)).collect::<Result<Vec<_>>>()?;
        mono.record(hs.windows(2).all(|w| w[1] > w[0]), || format!("{hs:?}"));
        conc.record(ss.windows(2).all(|w| w[1].fisher < w[0].fisher), || format!("{ss:?}"));
        for s in &ss {
            agree.record(s.relative_gap() <= 1e-3, || format!("{s:?}"));
        }

        let a = rng.gen_range(0.2..5.0);
        let y = 0.01;
        let lhs = entropy_gauss(&mu.dilate(a), a * a * y)?;
        let rhs = entropy_gauss(&mu, y)? + a.ln();
        scale.record((lhs - rhs).abs() <= 1e-6, || format!("α={a}: {lhs} vs {rhs}"));

        let far = DiscreteMeasure::from_reals(&[-100.0, 100.0], &[0.5, 0.5])?;
        let joined = entropy_gauss(&mu.convolve(&far)?, y)?;
        let base = entropy_gauss(&mu, y)?;
        sep.record((joined - base - 2f64.ln()).abs() <= 1e-6, || format!("{joined} vs {base} + log 2"));

        let nu = random_measure(rng);
        let p = rng.gen_range(0.1..0.9);
        let mix = DiscreteMeasure::mixture(&[(p, &mu), (1.0 - p, &nu)])?;
        let hp = -(p * p.ln() + (1.0 - p) * (1.0 - p).ln());
        let bound = p * entropy_gauss(&mu, y)? + (1.0 - p) * entropy_gauss(&nu, y)? + hp;
        let h = entropy_gauss(&mix, y)?;
        group.record(h <= bound + 1e-9, || format!("{h} > {bound}"));
    }
    Ok(vec![mono, conc, scale, sep, group, agree])
}

/// The entropy-to-detail, two-factor convolution and contraction
/// inequalities on random pairs.
pub fn inequality_checks(n: usize, rng: &mut impl Rng) -> Result<Vec<CheckResult>> {
    let mut e2d = CheckResult::new("entropy_to_detail");
    let mut conv = CheckResult::new("convolution_detail");
    let mut contr = CheckResult::new("detail_contraction");
    for _ in 0..n {
        let mu = random_measure(rng);
        let nu = random_measure(rng).dilate(rng.gen_range(0.05..1.0));
        let r = rng.gen_range(0.05..0.5);
        let t = rng.gen_range(0.2..0.8);
        let u = t * r * r;
        let c = entropy_to_detail_check(&mu, &nu, r, u, r * r - u)?;
        e2d.record(c.holds, || format!("r={r} u={u}: {} > {} + {}", c.lhs, c.rhs, c.tolerance));
        let k = rng.gen_range(1.5..6.0);
        let c = convolution_detail_check(&mu, &nu, r, k)?;
        conv.record(c.holds, || format!("r={r} K={k}: {} > {} + {}", c.lhs, c.bound, c.tolerance));
        let c = contraction_check(&mu, &nu, r)?;
        contr.record(c.holds, || format!("r={r}: {:?}", c));
    }
    Ok(vec![e2d, conv, contr])
}

pub fn run_suite(profile: Profile, seed: u64) -> Result<SuiteSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ne, ni) = profile.trials();
    let mut checks = vec![normalization_check()?, kernel_norm_check()?, constant_check(), criterion_checks()?];
    checks.extend(entropy_checks(ne, &mut rng)?);
    checks.extend(inequality_checks(ni, &mut rng)?);
    let violations = checks.iter().map(|c| c.violations).sum();
    Ok(SuiteSummary {
        profile,
        seed,
        checks,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        assert!((fit_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn small_suite_passes() {
        let s = run_suite(Profile::Small, DEFAULT_SEED).unwrap();
        for c in &s.checks {
            assert_eq!(c.violations, 0, "{}: {:?}", c.name, c.failures);
        }
        assert!(s.checks.iter().any(|c| c.name == "detail_point_mass"));
    }

    #[test]
    fn random_measures_are_reproducible() {
        let a = random_measure(&mut ChaCha8Rng::seed_from_u64(3));
        let b = random_measure(&mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }
}
