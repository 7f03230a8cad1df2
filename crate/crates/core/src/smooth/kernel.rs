//! The y-derivative of the heat kernel `n_y` and its norms.

use std::f64::consts::{E, PI};
use std::sync::OnceLock;

use serde::Serialize;

use super::quad::{adaptive, QuadOptions};

/// `Γ(d/2)` for `d ≥ 1`.
pub fn gamma_half(d: u32) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    let mut g = if d % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut s = if d % 2 == 0 { 1.0 } else { 0.5 };
    while s + 1e-9 < d as f64 / 2.0 {
        g *= s;
        s += 1.0;
    }
    g
}

/// `∂y n_y(x)` for `|x|² = r2`.
#[inline]
pub fn kernel_dy_r2(r2: f64, y: f64, d: u32) -> f64 {
    let df = d as f64;
    (r2 / (2.0 * y * y) - df / (2.0 * y)) * (2.0 * PI * y).powf(-df / 2.0) * (-r2 / (2.0 * y)).exp()
}

pub fn kernel_dy(x: &[f64], y: f64, d: u32) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    kernel_dy_r2(r2, y, d)
}

/// Heat kernel `n_y(x)` for `|x|² = r2`.
#[inline]
pub fn heat_kernel_r2(r2: f64, y: f64, d: u32) -> f64 {
    (2.0 * PI * y).powf(-(d as f64) / 2.0) * (-r2 / (2.0 * y)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConstants {
    pub dim: u32,
    /// `Γ(d/2)/2 · (d/(2e))^{−d/2}`.
    pub kappa: f64,
}

impl KernelConstants {
    pub fn new(dim: u32) -> Self {
        let d = dim as f64;
        let kappa = gamma_half(dim) / 2.0 * (d / (2.0 * E)).powf(-d / 2.0);
        Self { dim, kappa }
    }

    /// `C_{K,d} = (4/κ)(1 + 1/(2K²))`.
    pub fn c_kd(&self, k: f64) -> f64 {
        4.0 / self.kappa * (1.0 + 1.0 / (2.0 * k * k))
    }

    /// `‖∂y n_y‖₁ = (1/y)(2/Γ(d/2))(d/(2e))^{d/2}`.
    pub fn dy_norm(&self, y: f64) -> f64 {
        let d = self.dim as f64;
        2.0 / gamma_half(self.dim) * (d / (2.0 * E)).powf(d / 2.0) / y
    }

    /// `∫_{|x|>L} |∂y n_y|`, valid for `L² ≥ d·y` where the kernel is
    /// positive.
    pub fn tail(&self, l: f64, y: f64) -> f64 {
        let q = l * l / (2.0 * y);
        match self.dim {
            1 => l / ((2.0 * PI).sqrt() * y.powf(1.5)) * (-q).exp(),
            2 => l * l / (2.0 * y * y) * (-q).exp(),
            _ => f64::NAN,
        }
    }

    /// `∫ |∇ₓ ∂y n_y| dx = E_d / y^{3/2}`; bounds the L1 change of the
    /// smoothed measure when an atom moves.
    pub fn gradient_norm(&self, y: f64) -> f64 {
        gradient_constant(self.dim) / y.powf(1.5)
    }
}

fn gradient_constant(d: u32) -> f64 {
    static E2: OnceLock<f64> = OnceLock::new();
    let phi = |x: f64| (-x * x / 2.0).exp() / (2.0 * PI).sqrt();
    match d {
        // ∫|x(3 − x²)|φ(x) dx over the half line
        1 => phi(0.0) + 4.0 * phi(3f64.sqrt()),
        // (1/2)∫ρ²|4 − ρ²|e^{−ρ²/2} dρ
        2 => *E2.get_or_init(|| {
            let f = |r: f64| 0.5 * r * r * (4.0 - r * r).abs() * (-r * r / 2.0).exp();
            adaptive(&f, &[(0.0, 2.0), (2.0, 40.0)], &QuadOptions::tight())
                .expect("smooth integrand")
                .value
        }),
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(2), 1.0);
        assert!((gamma_half(3) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(gamma_half(4), 1.0);
        assert_eq!(gamma_half(6), 2.0);
    }

    #[test]
    fn kernel_examples() {
        let v = kernel_dy(&[0.0], 1.0, 1);
        assert!((v + 0.5 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((v + 0.199_47).abs() < 1e-5);
        for (d, y) in [(1u32, 0.3), (2, 2.0)] {
            let r = (d as f64 * y).sqrt();
            let x = if d == 1 { vec![r] } else { vec![r / 2f64.sqrt(), r / 2f64.sqrt()] };
            assert!(kernel_dy(&x, y, d).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_is_half_laplacian_of_heat_kernel() {
        let (x, y, h) = (0.7, 0.4, 1e-4);
        let lap = (heat_kernel_r2((x + h) * (x + h), y, 1) - 2.0 * heat_kernel_r2(x * x, y, 1)
            + heat_kernel_r2((x - h) * (x - h), y, 1))
            / (h * h);
        assert!((kernel_dy(&[x], y, 1) - 0.5 * lap).abs() < 1e-6);
    }

    #[test]
    fn constants() {
        let k1 = KernelConstants::new(1);
        assert!((k1.kappa - 2.066_37).abs() < 1e-5);
        assert!((4.0 / k1.kappa - 1.935_77).abs() < 1e-5);
        assert!((k1.c_kd(1e6) - 1.935_77).abs() < 1e-4);
        for d in [1, 2] {
            let k = KernelConstants::new(d);
            for y in [0.01, 1.0, 7.0] {
                assert!((k.kappa * k.dy_norm(y) * y - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tail_matches_quadrature() {
        let k = KernelConstants::new(1);
        let (y, l) = (0.5, 2.0);
        let f = |x: f64| kernel_dy_r2(x * x, y, 1).abs();
        let q = adaptive(&f, &[(l, 40.0)], &QuadOptions::tight()).unwrap().value;
        assert!((2.0 * q - k.tail(l, y)).abs() < 1e-12);

        let k2 = KernelConstants::new(2);
        let g = |r: f64| 2.0 * PI * r * kernel_dy_r2(r * r, y, 2).abs();
        let q2 = adaptive(&g, &[(l, 40.0)], &QuadOptions::tight()).unwrap().value;
        assert!((q2 - k2.tail(l, y)).abs() < 1e-12);
    }

    #[test]
    fn gradient_constants() {
        assert!((gradient_constant(1) - 0.755_01).abs() < 1e-4);
        // independent evaluation of ∫|∂x ∂y n_1| in one dimension
        let f = |x: f64| (x / 2.0 * (3.0 - x * x)).abs() * (-x * x / 2.0).exp() / (2.0 * PI).sqrt();
        let q = adaptive(&f, &[(-40.0, -3f64.sqrt()), (-3f64.sqrt(), 0.0), (0.0, 3f64.sqrt()), (3f64.sqrt(), 40.0)], &QuadOptions::tight())
            .unwrap()
            .value;
        assert!((q - gradient_constant(1)).abs() < 1e-12);
        assert!(gradient_constant(2) > 0.0);
    }
}
