//! Uniform grids, sampled fields and their discrete Fourier transforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};

pub const MIN_POINTS: usize = 8;

/// Uniform grid x_i = x_min + i·dx, i = 0..n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    x_min: f64,
    dx: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, dx: f64, n: usize) -> Result<Self> {
        ensure_finite("x_min", x_min)?;
        ensure_finite("dx", dx)?;
        if dx <= 0.0 {
            return Err(Error::NonPositiveScale { name: "dx", value: dx });
        }
        if n < MIN_POINTS {
            return Err(Error::GridTooSmall { n, min: MIN_POINTS });
        }
        Ok(Grid1D { x_min, dx, n })
    }

    /// Grid with x = 0 at index n/2, spanning [−n·dx/2, n·dx/2).
    pub fn centered(n: usize, dx: f64) -> Result<Self> {
        Grid1D::new(-((n / 2) as f64) * dx, dx, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Period n·dx of the implied periodic extension.
    pub fn length(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Wavenumber of FFT bin j: 2π·j'/(n·dx) with j' ∈ [−n/2, n/2).
    pub fn k(&self, j: usize) -> f64 {
        let n = self.n as i64;
        let mut jj = j as i64;
        if jj >= n - n / 2 {
            jj -= n;
        }
        2.0 * PI * jj as f64 / self.length()
    }

    pub fn ks(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.k(j)).collect()
    }

    /// Largest resolved wavenumber π/dx.
    pub fn k_nyquist(&self) -> f64 {
        PI / self.dx
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Result<RealField> {
        RealField::new(*self, self.xs().into_iter().map(f).collect())
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: len });
        }
        Ok(())
    }
}

/// Real samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid1D,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        grid.check(values.len())?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite { name: "field sample", value: *v });
        }
        Ok(RealField { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        RealField { grid, values: vec![0.0; grid.n] }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Σ f_i · dx.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete inner product Σ f_i g_i · dx.
    pub fn dot(&self, other: &RealField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.dx)
    }

    /// Transform with the continuous-FT normalization
    /// â(k_j) = dx · Σ_m f_m e^{−i k_j x_m}.
    pub fn to_spectral(&self) -> SpectralField {
        let buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        forward(&self.grid, buf)
    }

    /// Applies a real or complex Fourier multiplier and returns the real part.
    pub fn apply_symbol<S: Fn(f64) -> Complex64>(&self, symbol: S) -> RealField {
        let mut s = self.to_spectral();
        for (j, a) in s.amplitudes.iter_mut().enumerate() {
            *a *= symbol(self.grid.k(j));
        }
        s.to_real()
    }
}

/// Complex samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        grid.check(values.len())?;
        Ok(ComplexField { grid, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn re(&self) -> RealField {
        RealField { grid: self.grid, values: self.values.iter().map(|c| c.re).collect() }
    }

    pub fn im(&self) -> RealField {
        RealField { grid: self.grid, values: self.values.iter().map(|c| c.im).collect() }
    }
}

/// Fourier amplitudes indexed by FFT bin, dual to [`RealField`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid1D,
    amplitudes: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid1D, amplitudes: Vec<Complex64>) -> Result<Self> {
        grid.check(amplitudes.len())?;
        Ok(SpectralField { grid, amplitudes })
    }

    /// Samples a symbol s(k) on the wavenumber grid.
    pub fn from_symbol<S: Fn(f64) -> Complex64>(grid: Grid1D, symbol: S) -> Self {
        let amplitudes = (0..grid.n).map(|j| symbol(grid.k(j))).collect();
        SpectralField { grid, amplitudes }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Inverse transform f_m = (1/(n·dx)) Σ_j â_j e^{i k_j x_m}.
    pub fn to_complex(&self) -> ComplexField {
        inverse(&self.grid, self.amplitudes.clone())
    }

    /// Inverse transform keeping the real part.
    pub fn to_real(&self) -> RealField {
        self.to_complex().re()
    }
}

fn phase(grid: &Grid1D, j: usize) -> Complex64 {
    // e^{i k_j x_min}
    Complex64::from_polar(1.0, grid.k(j) * grid.x_min)
}

fn forward(grid: &Grid1D, mut buf: Vec<Complex64>) -> SpectralField {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(grid.n).process(&mut buf);
    for (j, a) in buf.iter_mut().enumerate() {
        *a *= phase(grid, j).conj() * grid.dx;
    }
    SpectralField { grid: *grid, amplitudes: buf }
}

fn inverse(grid: &Grid1D, mut buf: Vec<Complex64>) -> ComplexField {
    let scale = 1.0 / grid.length();
    for (j, a) in buf.iter_mut().enumerate() {
        *a *= phase(grid, j) * scale;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(grid.n).process(&mut buf);
    ComplexField { grid: *grid, values: buf }
}

/// Exponential low-pass σ(k) = exp(−36 (|k|/k_max)^order).
///
/// Used when a symbol does not decay and the sampled kernel would otherwise
/// carry the Gibbs oscillation of a sharp cutoff at the Nyquist wavenumber.
pub fn exp_filter(k: f64, k_max: f64, order: i32) -> f64 {
    (-36.0 * (k.abs() / k_max).powi(order)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wavenumbers_follow_fft_order() {
        let g = Grid1D::new(0.0, 0.5, 8).unwrap();
        let l = 4.0;
        let want: Vec<f64> = [0, 1, 2, 3, -4, -3, -2, -1]
            .iter()
            .map(|&j| 2.0 * PI * j as f64 / l)
            .collect();
        assert_eq!(g.ks(), want);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(matches!(Grid1D::new(0.0, 1.0, 4), Err(Error::GridTooSmall { .. })));
        assert!(matches!(Grid1D::new(0.0, 0.0, 16), Err(Error::NonPositiveScale { .. })));
    }

    #[test]
    fn gaussian_transform_matches_continuous() {
        let g = Grid1D::centered(256, 0.1).unwrap();
        let f = g.sample(|x| (-x * x).exp()).unwrap();
        let s = f.to_spectral();
        for j in [0, 3, 17, 250] {
            let k = g.k(j);
            let want = PI.sqrt() * (-k * k / 4.0).exp();
            assert!((s.amplitudes()[j] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_off_center_grid() {
        let g = Grid1D::new(-3.3, 0.05, 200).unwrap();
        let f = g.sample(|x| (-(x + 0.4) * (x + 0.4)).exp() * (3.0 * x).cos()).unwrap();
        let back = f.to_spectral().to_real();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_relative_eq!(f.mass(), f.to_spectral().amplitudes()[0].re, max_relative = 1e-13);
    }
}
