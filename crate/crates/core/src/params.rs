//! Medium parameters, the dispersion relation and its quadrature oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::special::{gamma, sin_half_pi};

/// Exponent δ, length scale h, continuum parameter ζ and the derived
/// dispersion coefficient A_δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MediumParams {
    delta: f64,
    h: f64,
    zeta: f64,
    a_delta: f64,
}

impl MediumParams {
    /// Validates the inputs and computes
    /// A_δ = (h^δ/ζ)·π / (Γ(1+δ)·sin(πδ/2)).
    pub fn new(delta: f64, h: f64, zeta: f64) -> Result<Self> {
        ensure_finite("delta", delta)?;
        ensure_finite("h", h)?;
        ensure_finite("zeta", zeta)?;
        if !(delta > 0.0 && delta < 2.0) {
            return Err(Error::DeltaOutOfRange { delta, range: "(0, 2)" });
        }
        if h <= 0.0 {
            return Err(Error::NonPositiveScale { name: "h", value: h });
        }
        if zeta <= 0.0 {
            return Err(Error::NonPositiveScale { name: "zeta", value: zeta });
        }
        let a_delta = h.powf(delta) / zeta * PI / (gamma(1.0 + delta) * sin_half_pi(delta));
        Ok(MediumParams { delta, h, zeta, a_delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn a_delta(&self) -> f64 {
        self.a_delta
    }

    /// Kernel prefactor h^δ/ζ of the nonlocal operator.
    pub fn kernel_scale(&self) -> f64 {
        self.h.powf(self.delta) / self.zeta
    }
}

/// Convenience constructor mirroring [`MediumParams::new`].
pub fn make_params(delta: f64, h: f64, zeta: f64) -> Result<MediumParams> {
    MediumParams::new(delta, h, zeta)
}

/// Numerical settings shared by the quadrature-based routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    /// Regularization parameter for ε → 0+ limits.
    pub epsilon: f64,
    /// Split point between the near-field and far-field parts of an integral.
    pub tau_split: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            epsilon: 1e-3,
            tau_split: 1.0,
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("tau_split", self.tau_split),
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
        ];
        for (name, value) in positive {
            ensure_finite(name, value)?;
            if value <= 0.0 {
                return Err(Error::NonPositiveScale { name, value });
            }
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs: self.abs_tol,
            rel: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// ω²(k) = A_δ |k|^δ.
pub fn dispersion(params: &MediumParams, k: f64) -> f64 {
    params.a_delta * k.abs().powf(params.delta)
}

/// ω²(k) from direct quadrature of 2(h^δ/ζ)|k|^δ ∫₀^∞ (1 − cos s)/s^{1+δ} ds.
///
/// The integral is split at s = 1. Near zero the leading s²/2 of 1 − cos s
/// is integrated in closed form and the quartic remainder numerically. Above
/// one, the algebraic part is exact and the cosine part is moved onto the
/// ray s = 1 + iy, where the integrand decays like e^{−y}.
pub fn dispersion_quadrature(params: &MediumParams, k: f64, qcfg: &QuadratureConfig) -> Result<f64> {
    qcfg.validate()?;
    ensure_finite("k", k)?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let d = params.delta;
    let tol = qcfg.tolerance();

    let remainder = |s: f64| -> f64 {
        // 1 − cos s − s²/2, series near zero to avoid cancellation
        let r = if s < 0.1 {
            let s2 = s * s;
            s2 * s2 * (-1.0 / 24.0 + s2 * (1.0 / 720.0 + s2 * (-1.0 / 40_320.0 + s2 / 3_628_800.0)))
        } else {
            let h = (0.5 * s).sin();
            2.0 * h * h - 0.5 * s * s
        };
        r * s.powf(-1.0 - d)
    };
    let inner = 0.5 / (2.0 - d) + integrate(remainder, 0.0, 1.0, tol)?.value;

    let ray = |y: f64| -> Complex64 { (-y).exp() * Complex64::new(1.0, y).powf(-1.0 - d) };
    let mut ray_sum = Complex64::new(0.0, 0.0);
    for j in 0..48 {
        let (a, b) = (j as f64, j as f64 + 1.0);
        let re = integrate(|y| ray(y).re, a, b, tol)?.value;
        let im = integrate(|y| ray(y).im, a, b, tol)?.value;
        ray_sum += Complex64::new(re, im);
    }
    // the integral beyond y = 48 is below e^{-48}
    let cos_part = (Complex64::i() * Complex64::new(1f64.cos(), 1f64.sin()) * ray_sum).re;
    let outer = 1.0 / d - cos_part;

    Ok(2.0 * params.kernel_scale() * k.abs().powf(d) * (inner + outer))
}
