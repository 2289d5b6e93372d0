//! Self-similar diffusion: the Lévy-stable propagator, density evolution,
//! moment diagnostics and Monte Carlo sampling.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::grid::{Grid1D, RealField, SpectralField};
use crate::operator::{derivative, flux_apply, laplacian_apply_spectral};
use crate::params::MediumParams;
use crate::quad::{integrate, Tolerance};
use crate::special::{gamma, sin_half_pi};

fn check_time(t: f64) -> Result<()> {
    ensure_finite("t", t)?;
    if t <= 0.0 {
        return Err(Error::TimeNonPositive { t });
    }
    Ok(())
}

/// Stable scale σ = (A_δ t)^{1/δ}.
pub fn stable_scale(params: &MediumParams, t: f64) -> f64 {
    (params.a_delta() * t).powf(1.0 / params.delta())
}

/// Sampled propagator W(x,t) = (1/2π)∫ e^{−A_δ|k|^δ t} e^{ikx} dk on a
/// periodic grid.
pub fn propagator_w(params: &MediumParams, grid: &Grid1D, t: f64) -> Result<RealField> {
    check_time(t)?;
    let a = params.a_delta();
    let d = params.delta();
    Ok(SpectralField::from_symbol(*grid, |k| Complex64::new((-a * k.abs().powf(d) * t).exp(), 0.0)).to_real())
}

/// Unit-scale propagator W₁(u) = (1/π) Re ∫₀^∞ e^{−k^δ} e^{iku} dk, u ≥ 0.
///
/// The path is rotated onto k = r e^{iθ} with θ a little inside
/// min(π/2, π/(2δ)), where both factors decay exponentially. For u ≥ 1 the
/// constant 1 is subtracted from e^{−k^δ} (its integral is purely imaginary)
/// so the far tail carries no cancellation.
fn unit_propagator(delta: f64, u: f64) -> Result<f64> {
    if u == 0.0 {
        return Ok(gamma(1.0 + 1.0 / delta) / PI);
    }
    let theta = 0.95 * (0.5 * PI).min(PI / (2.0 * delta));
    let subtract = u >= 1.0;
    let dir = Complex64::from_polar(1.0, theta);
    let (sd, cd) = ((delta * theta).sin(), (delta * theta).cos());
    let integrand = |r: f64| -> f64 {
        if r == 0.0 {
            return if subtract { 0.0 } else { theta.cos() };
        }
        let rd = r.powf(delta);
        let (a, b) = (-rd * cd, -rd * sd);
        let head = if subtract {
            Complex64::new(a.exp_m1() * b.cos() - 2.0 * (0.5 * b).sin().powi(2), a.exp() * b.sin())
        } else {
            Complex64::from_polar(a.exp(), b)
        };
        (head * (Complex64::i() * dir * r * u).exp() * dir).re
    };
    // W₁(u) is at most O(1) and falls off like u^{−1−δ}; panels can cancel,
    // so the absolute target follows that envelope
    let tol = Tolerance { abs: 1e-15 * u.powf(-1.0 - delta).min(1.0), rel: 1e-12, max_subdivisions: 1000 };
    let decay = u * theta.sin();
    let mut lo = 0.0;
    let mut hi = (1.0f64).min(1.0 / u);
    let mut sum = 0.0;
    loop {
        sum += integrate(integrand, lo, hi, tol)?.value;
        let mut remainder = 2.0 * (-hi * decay).exp() / decay;
        if !subtract {
            let c = cd * hi.powf(delta);
            if c > 1.0 / delta + 5.0 {
                remainder = remainder.min((-c).exp() * hi / (c * delta));
            }
        }
        if remainder < 1e-16 * sum.abs() || remainder < 1e-300 {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::QuadratureNoConvergence { estimate: sum, error: remainder, subdivisions: 0 });
        }
    }
    Ok(sum / PI)
}

/// Propagator value W(x,t) at a single point, by contour-rotated quadrature
/// of its Fourier integral (no periodization).
pub fn propagator_w_at(params: &MediumParams, x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    ensure_finite("x", x)?;
    let s = stable_scale(params, t);
    Ok(unit_propagator(params.delta(), x.abs() / s)? / s)
}

/// Closed-form δ = 1 propagator (1/π) A₁t / (x² + (A₁t)²).
pub fn propagator_w_cauchy(params: &MediumParams, x: f64, t: f64) -> Result<f64> {
    if params.delta() != 1.0 {
        return Err(Error::DeltaMismatch { delta: params.delta() });
    }
    check_time(t)?;
    ensure_finite("x", x)?;
    let s = params.a_delta() * t;
    Ok(s / (PI * (x * x + s * s)))
}

/// Coefficient c of the far-field law W ≈ c·|x|^{−1−δ}:
/// c = (1/π) Γ(1+δ) sin(πδ/2) A_δ t.
pub fn tail_coefficient(params: &MediumParams, t: f64) -> f64 {
    let d = params.delta();
    gamma(1.0 + d) * sin_half_pi(d) * params.a_delta() * t / PI
}

/// Evolves a density by e^{−Lt}: multiplies its transform by e^{−A_δ|k|^δ t}.
pub fn diffuse(params: &MediumParams, rho0: &RealField, t: f64) -> Result<RealField> {
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let a = params.a_delta();
    let d = params.delta();
    Ok(rho0.apply_symbol(|k| Complex64::new((-a * k.abs().powf(d) * t).exp(), 0.0)))
}

/// Residual of the continuity equation ∂ₜρ + ∂ₓj = 0 with ∂ₜρ = Δρ taken
/// from the spectral Laplacian and j from the flux quadrature:
/// r = Δρ + ∂ₓj.
pub fn continuity_residual(params: &MediumParams, rho: &RealField) -> Result<RealField> {
    let lap = laplacian_apply_spectral(params, rho)?;
    let dj = derivative(&flux_apply(params, rho)?);
    let values = lap.values().iter().zip(dj.values()).map(|(a, b)| a + b).collect();
    RealField::new(*rho.grid(), values)
}

fn check_order(p: u32) -> Result<()> {
    if !(1..=4).contains(&p) {
        return Err(Error::InvalidOrder { n: p as i64 });
    }
    Ok(())
}

/// ∫_{−L}^{L} x^p W dx over the grid points |x| ≤ L, trapezoid rule.
pub fn truncated_moment(field: &RealField, p: u32, l: f64) -> Result<f64> {
    check_order(p)?;
    ensure_finite("L", l)?;
    let g = field.grid();
    let reach = (-g.x_min()).min(g.x(g.n() - 1));
    if l <= 0.0 || l > reach {
        return Err(Error::LOutOfGrid { l, max: reach });
    }
    let pts: Vec<(f64, f64)> = g
        .xs()
        .into_iter()
        .zip(field.values())
        .filter(|(x, _)| x.abs() <= l)
        .map(|(x, w)| (x, x.powi(p as i32) * w))
        .collect();
    let mut sum = 0.0;
    for pair in pts.windows(2) {
        sum += 0.5 * (pair[0].1 + pair[1].1) * (pair[1].0 - pair[0].0);
    }
    Ok(sum)
}

/// ∫_{−L}^{L} x^p W(x,t) dx with W evaluated pointwise (no periodization).
pub fn truncated_moment_pointwise(params: &MediumParams, t: f64, p: u32, l: f64) -> Result<f64> {
    check_order(p)?;
    check_time(t)?;
    ensure_finite("L", l)?;
    if l <= 0.0 {
        return Err(Error::LOutOfGrid { l, max: f64::INFINITY });
    }
    if p % 2 == 1 {
        // x^p W is odd and the two half-lines are integrated identically
        return Ok(0.0);
    }
    let s = stable_scale(params, t);
    let tol = Tolerance { abs: 1e-300, rel: 1e-11, max_subdivisions: 400 };
    let mut sum = 0.0;
    let mut lo = 0.0;
    let mut hi = s.min(l);
    loop {
        sum += integrate(|x| x.powi(p as i32) * propagator_w_at(params, x, t).unwrap_or(f64::NAN), lo, hi, tol)?.value;
        if hi >= l {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(l);
    }
    if !sum.is_finite() {
        return Err(Error::NonFinite { name: "moment", value: sum });
    }
    Ok(2.0 * sum)
}

/// Closed-form truncated second moment of the δ = 1 propagator,
/// (2A₁t/π)(L − A₁t·arctan(L/(A₁t))).
pub fn truncated_second_moment_cauchy(params: &MediumParams, t: f64, l: f64) -> Result<f64> {
    if params.delta() != 1.0 {
        return Err(Error::DeltaMismatch { delta: params.delta() });
    }
    check_time(t)?;
    let s = params.a_delta() * t;
    Ok(2.0 * s / PI * (l - s * (l / s).atan()))
}

/// Least-squares slope of ln W against ln x over `count` geometrically spaced
/// points in [x_lo, x_hi].
pub fn fit_tail_exponent(params: &MediumParams, t: f64, x_lo: f64, x_hi: f64, count: usize) -> Result<TailFit> {
    if !(x_lo > 0.0 && x_hi > x_lo) || count < 2 {
        return Err(Error::InvalidArgument("tail window needs 0 < x_lo < x_hi and at least two points".into()));
    }
    let mut pts = Vec::with_capacity(count);
    for i in 0..count {
        let x = x_lo * (x_hi / x_lo).powf(i as f64 / (count - 1) as f64);
        let w = propagator_w_at(params, x, t)?;
        if w <= 0.0 {
            return Err(Error::NonFinite { name: "ln W", value: f64::NAN });
        }
        pts.push((x.ln(), w.ln()));
    }
    let n = count as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(TailFit { slope, intercept: my - slope * mx, points: pts.into_iter().map(|(a, b)| (a.exp(), b.exp())).collect() })
}

/// Result of [`fit_tail_exponent`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<(f64, f64)>,
}

/// Cumulative distribution of W(·,t), tabulated on a nonuniform grid in the
/// scaled variable u = x/σ and interpolated with cubic Hermite segments
/// (W is the exact derivative at each node). The table reaches far enough
/// that the leading tail law, which supplies the mass beyond it, accounts
/// for less than 1e-5.
#[derive(Debug, Clone)]
pub struct PropagatorCdf {
    scale: f64,
    delta: f64,
    nodes: Vec<f64>,
    cdf: Vec<f64>,
    density: Vec<f64>,
    tail_coef: f64,
}

impl PropagatorCdf {
    pub fn new(params: &MediumParams, t: f64) -> Result<Self> {
        check_time(t)?;
        let d = params.delta();
        let mut nodes = Vec::new();
        let mut u = 0.0;
        while u < 8.0 {
            nodes.push(u);
            u += 0.02;
        }
        let tail_coef = gamma(1.0 + d) * sin_half_pi(d) / PI;
        // far enough out that the analytic tail carries < 1e-5 of the mass
        let u_max = (tail_coef / (d * 1e-5)).powf(1.0 / d).clamp(1e4, 1e30);
        while u < u_max {
            nodes.push(u);
            u *= 1.01;
        }
        let density: Vec<f64> = nodes.par_iter().map(|&u| unit_propagator(d, u)).collect::<Result<_>>()?;
        let pieces: Vec<f64> = nodes
            .par_windows(2)
            .map(|w| crate::quad::gk21(&|u: f64| unit_propagator(d, u).unwrap_or(f64::NAN), w[0], w[1]).0)
            .collect();
        let mut cdf = Vec::with_capacity(nodes.len());
        let mut acc = 0.5;
        cdf.push(acc);
        for p in pieces {
            acc += p;
            cdf.push(acc);
        }
        if cdf.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { name: "cdf", value: f64::NAN });
        }
        Ok(PropagatorCdf { scale: stable_scale(params, t), delta: d, nodes, cdf, density, tail_coef })
    }

    /// Mass above the last node from the tail law, in scaled units.
    fn upper_tail(&self, u: f64) -> f64 {
        self.tail_coef * u.powf(-self.delta) / self.delta
    }

    /// Defect 1 − (tabulated mass + tail law), a consistency diagnostic.
    pub fn closure_defect(&self) -> f64 {
        let last = *self.nodes.last().unwrap();
        1.0 - (self.cdf.last().unwrap() + self.upper_tail(last))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = x.abs() / self.scale;
        let upper = if u >= *self.nodes.last().unwrap() {
            1.0 - self.upper_tail(u)
        } else {
            let i = self.nodes.partition_point(|&n| n <= u) - 1;
            let (u0, u1) = (self.nodes[i], self.nodes[i + 1]);
            let h = u1 - u0;
            let s = (u - u0) / h;
            let (s2, s3) = (s * s, s * s * s);
            let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
            let h10 = s3 - 2.0 * s2 + s;
            let h01 = -2.0 * s3 + 3.0 * s2;
            let h11 = s3 - s2;
            h00 * self.cdf[i] + h10 * h * self.density[i] + h01 * self.cdf[i + 1] + h11 * h * self.density[i + 1]
        };
        if x >= 0.0 {
            upper
        } else {
            1.0 - upper
        }
    }
}

/// Kolmogorov–Smirnov distance sup|F_n − F| of a sample against a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Samples per independently seeded partition of a batch.
pub const PARTITION: usize = 1 << 16;

/// Monte Carlo positions of a Lévy flight with their provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub delta: f64,
    pub scale: f64,
    pub seed: u64,
    pub samples: Vec<f64>,
}

impl SampleBatch {
    /// CSV with `#`-prefixed provenance lines and a single column `x`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# delta={}", self.delta)?;
        writeln!(w, "# scale={}", self.scale)?;
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "x")?;
        for x in &self.samples {
            writeln!(w, "{x:?}")?;
        }
        Ok(())
    }
}

/// One standard symmetric stable variate (characteristic function e^{−|k|^δ})
/// by the Chambers–Mallows–Stuck transform.
fn standard_stable<R: Rng>(rng: &mut R, delta: f64) -> f64 {
    let v = PI * (rng.sample::<f64, _>(Open01) - 0.5);
    if delta == 1.0 {
        return v.tan();
    }
    let w = -rng.sample::<f64, _>(Open01).ln();
    let a = delta;
    (a * v).sin() / v.cos().powf(1.0 / a) * (((1.0 - a) * v).cos() / w).powf((1.0 - a) / a)
}

/// Draws `n` positions distributed as W(·,t).
///
/// The batch is split into partitions of [`PARTITION`] samples; partition i
/// uses ChaCha20 seeded with `seed` on stream i, so the result is the same
/// however the partitions are scheduled.
pub fn sample_levy(params: &MediumParams, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_time(t)?;
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let d = params.delta();
    let scale = stable_scale(params, t);
    let parts = n.div_ceil(PARTITION);
    let chunks: Vec<Vec<f64>> = (0..parts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let len = PARTITION.min(n - i * PARTITION);
            (0..len).map(|_| scale * standard_stable(&mut rng, d)).collect()
        })
        .collect();
    Ok(SampleBatch { delta: d, scale, seed, samples: chunks.concat() })
}
