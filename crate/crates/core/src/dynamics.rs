//! Cauchy problem of the self-similar wave equation, its kernels, and the
//! retarded and Helmholtz Green's functions.

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::grid::{exp_filter, ComplexField, Grid1D, RealField, SpectralField};
use crate::params::{dispersion, MediumParams};
use crate::series::{kernel_q_series, SeriesPolicy};

/// Order of the exponential filter applied to the sampled kernels.
pub const KERNEL_FILTER_ORDER: i32 = 8;

/// Displacement u and velocity v at time t.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyState {
    pub u: RealField,
    pub v: RealField,
    pub t: f64,
}

impl CauchyState {
    pub fn new(u: RealField, v: RealField, t: f64) -> Result<Self> {
        ensure_finite("t", t)?;
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(CauchyState { u, v, t })
    }

    pub fn grid(&self) -> &Grid1D {
        self.u.grid()
    }
}

/// Evolves the state by `t` (any sign) with the exact spectral propagator
/// û ← cos(ωt)û + sin(ωt)/ω v̂, v̂ ← −ω sin(ωt)û + cos(ωt)v̂.
///
/// At k = 0 the limits û + t v̂ and v̂ are used.
pub fn cauchy_evolve(params: &MediumParams, state: &CauchyState, t: f64) -> Result<CauchyState> {
    ensure_finite("t", t)?;
    let grid = *state.grid();
    let u = state.u.to_spectral();
    let v = state.v.to_spectral();
    let mut nu = u.clone();
    let mut nv = v.clone();
    for j in 0..grid.n() {
        let w = dispersion(params, grid.k(j)).sqrt();
        let (uh, vh) = (u.amplitudes()[j], v.amplitudes()[j]);
        let (c, s) = ((w * t).cos(), (w * t).sin());
        let sinc = if w == 0.0 { t } else { s / w };
        nu.amplitudes_mut()[j] = uh * c + vh * sinc;
        nv.amplitudes_mut()[j] = -uh * (w * s) + vh * c;
    }
    CauchyState::new(nu.to_real(), nv.to_real(), state.t + t)
}

/// Hamiltonian E = ½ Σ_k (|v̂|² + ω²(k)|û|²)/(n·dx), the discrete form of
/// ½∫(v² − u Δu) dx.
pub fn energy(params: &MediumParams, state: &CauchyState) -> f64 {
    let grid = state.grid();
    let u = state.u.to_spectral();
    let v = state.v.to_spectral();
    let sum: f64 = (0..grid.n())
        .map(|j| v.amplitudes()[j].norm_sqr() + dispersion(params, grid.k(j)) * u.amplitudes()[j].norm_sqr())
        .sum();
    0.5 * sum / grid.length()
}

fn filtered_kernel<S: Fn(f64) -> f64>(grid: &Grid1D, symbol: S) -> RealField {
    let k_max = grid.k_nyquist();
    SpectralField::from_symbol(*grid, |k| Complex64::new(symbol(k) * exp_filter(k, k_max, KERNEL_FILTER_ORDER), 0.0))
        .to_real()
}

/// Sampled velocity kernel Q(x,t) = (1/2π)∫ e^{ikx} sin(ωt)/ω dk.
///
/// The symbol does not decay in k, so it is tapered with an exponential
/// filter of order [`KERNEL_FILTER_ORDER`] before the inverse transform;
/// the k = 0 amplitude (the kernel's mass, t) is left untouched.
pub fn kernel_q_spectral(params: &MediumParams, grid: &Grid1D, t: f64) -> Result<RealField> {
    ensure_finite("t", t)?;
    Ok(filtered_kernel(grid, |k| {
        let w = dispersion(params, k).sqrt();
        if w == 0.0 {
            t
        } else {
            (w * t).sin() / w
        }
    }))
}

/// Sampled displacement kernel ∂ₜQ(x,t) = (1/2π)∫ e^{ikx} cos(ωt) dk, with
/// the same filtering as [`kernel_q_spectral`]; at t = 0 it is a discrete
/// unit mass.
pub fn kernel_qdot_spectral(params: &MediumParams, grid: &Grid1D, t: f64) -> Result<RealField> {
    ensure_finite("t", t)?;
    Ok(filtered_kernel(grid, |k| (dispersion(params, k).sqrt() * t).cos()))
}

/// Retarded Green's function g(x,t) = e^{−εt} Θ(t) Q(x,t), x ≠ 0.
pub fn greens_retarded(params: &MediumParams, x: f64, t: f64, eps: f64, policy: &SeriesPolicy) -> Result<f64> {
    ensure_finite("t", t)?;
    ensure_finite("eps", eps)?;
    if eps < 0.0 {
        return Err(Error::EpsNonPositive { eps });
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok((-eps * t).exp() * kernel_q_series(params, x, t, policy)?)
}

/// Fourier symbol of the Helmholtz resolvent, 1/(ω²(k) − (Ω + iε)²).
pub fn helmholtz_symbol(params: &MediumParams, k: f64, omega: f64, eps: f64) -> Complex64 {
    let z = Complex64::new(omega, eps);
    1.0 / (dispersion(params, k) - z * z)
}

/// Helmholtz Green's function on a periodic grid: the inverse transform of
/// [`helmholtz_symbol`].
pub fn helmholtz_green(params: &MediumParams, grid: &Grid1D, omega: f64, eps: f64) -> Result<ComplexField> {
    helmholtz_impl(params, grid, omega, eps, false)
}

/// As [`helmholtz_green`] but with the k = 0 mode removed, which fixes the
/// additive constant the same way as the static solver does.
pub fn helmholtz_green_gauged(params: &MediumParams, grid: &Grid1D, omega: f64, eps: f64) -> Result<ComplexField> {
    helmholtz_impl(params, grid, omega, eps, true)
}

fn helmholtz_impl(params: &MediumParams, grid: &Grid1D, omega: f64, eps: f64, gauge: bool) -> Result<ComplexField> {
    ensure_finite("omega", omega)?;
    ensure_finite("eps", eps)?;
    if eps <= 0.0 {
        return Err(Error::EpsNonPositive { eps });
    }
    let spec = SpectralField::from_symbol(*grid, |k| {
        if gauge && k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            helmholtz_symbol(params, k, omega, eps)
        }
    });
    Ok(spec.to_complex())
}
