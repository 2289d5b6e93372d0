//! Static Green's function, the Poisson solver and the self-similar
//! potentials b_α.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::grid::RealField;
use crate::params::{MediumParams, QuadratureConfig};
use crate::quad::{integrate, Tolerance};
use crate::special::{cos_half_pi, factorial_ext, gamma, hurwitz_zeta, sin_half_pi};

/// Half-width of the excluded band around δ = 1, where g₀ ∝ tan(πδ/2)
/// diverges.
pub const POLE_GUARD: f64 = 1e-6;

/// Prefactor g₀ = (ζδ/(2πh^δ))·tan(πδ/2) of the static Green's function.
pub fn greens_prefactor(params: &MediumParams) -> Result<f64> {
    let d = params.delta();
    if (d - 1.0).abs() <= POLE_GUARD {
        return Err(Error::DeltaPole { delta: d, guard: POLE_GUARD });
    }
    Ok(d / (2.0 * PI * params.kernel_scale()) * (0.5 * PI * d).tan())
}

/// Static Green's function g(x) = g₀|x|^{δ−1}: displacement under a unit
/// point force in the infinite medium.
pub fn greens_static(params: &MediumParams, x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    let g0 = greens_prefactor(params)?;
    let d = params.delta();
    if x == 0.0 {
        if d < 1.0 {
            return Err(Error::OriginSingular);
        }
        return Ok(0.0);
    }
    Ok(g0 * x.abs().powf(d - 1.0))
}

/// Green's function of the same operator on a ring of circumference
/// `period`, with the rigid (k = 0) mode removed:
/// G_L(x) = g₀ L^{δ−1} [ζ(1−δ, a) + ζ(1−δ, 1−a)], a = x/L mod 1.
///
/// This is the exact response of the spectral solvers on a periodic grid.
/// Near the source it equals g(x) plus a constant gauge offset plus
/// corrections of relative order (x/L)^{3−δ}.
pub fn greens_periodic(params: &MediumParams, x: f64, period: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    ensure_finite("period", period)?;
    if period <= 0.0 {
        return Err(Error::NonPositiveScale { name: "period", value: period });
    }
    let g0 = greens_prefactor(params)?;
    let d = params.delta();
    let a = (x / period).rem_euclid(1.0);
    if a == 0.0 {
        if d < 1.0 {
            return Err(Error::OriginSingular);
        }
        // ζ(1−δ, 0⁺) − 0^{δ−1} → ζ(1−δ) as a → 0
        let z = hurwitz_zeta(1.0 - d, 1.0)?;
        return Ok(g0 * period.powf(d - 1.0) * 2.0 * z);
    }
    let s = 1.0 - d;
    Ok(g0 * period.powf(d - 1.0) * (hurwitz_zeta(s, a)? + hurwitz_zeta(s, 1.0 - a)?))
}

/// Options for [`poisson_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoissonOptions {
    /// Allow a force with nonzero mean by discarding its k = 0 component.
    pub project_mean: bool,
    /// Largest |Σf| / Σ|f| accepted without projection.
    pub mean_tol: f64,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        PoissonOptions { project_mean: false, mean_tol: 1e-10 }
    }
}

/// Solves Δu + f = 0 spectrally: û = f̂ / (A_δ|k|^δ), with û(0) = 0.
pub fn poisson_solve(params: &MediumParams, force: &RealField, opts: &PoissonOptions) -> Result<RealField> {
    let total: f64 = force.values().iter().sum();
    let scale: f64 = force.values().iter().map(|v| v.abs()).sum();
    if !opts.project_mean && scale > 0.0 && total.abs() > opts.mean_tol * scale {
        return Err(Error::NonZeroMeanForce { mean: total / force.values().len() as f64, tol: opts.mean_tol });
    }
    let a = params.a_delta();
    let d = params.delta();
    Ok(force.apply_symbol(|k| {
        if k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / (a * k.abs().powf(d)), 0.0)
        }
    }))
}

/// An exponent α together with the special cases of b_α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec {
    alpha: f64,
    /// b_α vanishes identically away from the origin (α = 0, 2, 4, …).
    pub localized: bool,
}

impl PotentialSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        ensure_finite("alpha", alpha)?;
        let odd_negative = alpha <= -1.0 && alpha.fract() == 0.0 && (alpha as i64) % 2 != 0;
        if odd_negative {
            return Err(Error::ExcludedAlpha { alpha });
        }
        let localized = alpha >= 0.0 && alpha.fract() == 0.0 && (alpha as i64) % 2 == 0;
        Ok(PotentialSpec { alpha, localized })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Self-similar potential b_α(x): the regularized Fourier transform
/// (1/π)∫₀^∞ k^α cos(kx) e^{−εk} dk = (α!/π) Re{ i^{α+1} (|x| + iε)^{−α−1} }.
///
/// At ε = 0 and x ≠ 0 this is −(α!/π)|x|^{−α−1} sin(πα/2); below α = −1 it
/// is evaluated as |x|^{−α−1} / (2 cos(πα/2) Γ(−α)). The odd negative
/// integers are excluded. At the origin the value is +∞ for α ∈ (−1, 0),
/// zero for α < −1, and singular for α ≥ 0.
pub fn potential_b(alpha: f64, x: f64, eps: f64) -> Result<f64> {
    let spec = PotentialSpec::new(alpha)?;
    ensure_finite("x", x)?;
    ensure_finite("eps", eps)?;
    if eps < 0.0 {
        return Err(Error::EpsNonPositive { eps });
    }
    let r = x.abs();
    if eps > 0.0 {
        let fact = factorial_ext(alpha)?;
        let lead = Complex64::from_polar(1.0, 0.5 * PI * (alpha + 1.0));
        return Ok(fact / PI * (lead * Complex64::new(r, eps).powf(-alpha - 1.0)).re);
    }
    if r == 0.0 {
        return if alpha >= 0.0 {
            Err(Error::OriginSingular)
        } else if alpha > -1.0 {
            Ok(f64::INFINITY)
        } else {
            Ok(0.0)
        };
    }
    if spec.localized {
        return Ok(0.0);
    }
    if alpha > -1.0 {
        Ok(-factorial_ext(alpha)? / PI * r.powf(-alpha - 1.0) * sin_half_pi(alpha))
    } else {
        Ok(r.powf(-alpha - 1.0) / (2.0 * cos_half_pi(alpha) * gamma(-alpha)))
    }
}

/// A kernel term split into its value away from the origin and the weight of
/// a δ-function sitting at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitValue {
    pub smooth: f64,
    pub origin_delta_weight: f64,
}

/// Coefficient kernel q_n(x) = A_δⁿ b_{nδ}(x) of the power-series solutions.
///
/// q_{−1} is the static Green's function and q_0 the δ-function, which is
/// returned as a unit origin weight with zero smooth part.
pub fn q_n(params: &MediumParams, n: i64, x: f64) -> Result<SplitValue> {
    ensure_finite("x", x)?;
    match n {
        i64::MIN..=-2 => Err(Error::InvalidOrder { n }),
        -1 => Ok(SplitValue { smooth: greens_static(params, x)?, origin_delta_weight: 0.0 }),
        0 => Ok(SplitValue { smooth: 0.0, origin_delta_weight: 1.0 }),
        _ => {
            if x == 0.0 {
                return Err(Error::OriginSingular);
            }
            let nd = n as f64 * params.delta();
            let an = params.a_delta().powi(n as i32);
            let smooth = -an / PI * sin_half_pi(nd) * factorial_ext(nd)? * x.abs().powf(-nd - 1.0);
            Ok(SplitValue { smooth, origin_delta_weight: 0.0 })
        }
    }
}

fn check_ij(alpha: f64, a: f64) -> Result<()> {
    ensure_finite("alpha", alpha)?;
    ensure_finite("a", a)?;
    if alpha <= 0.0 {
        return Err(Error::AlphaOutOfRange { alpha, range: "(0, inf)" });
    }
    if a <= 0.0 {
        return Err(Error::NonPositiveA { a });
    }
    Ok(())
}

/// I_α(a) = ∫_a^∞ b_α(x) dx = −(Γ(α)/π) a^{−α} sin(πα/2).
pub fn integral_i(alpha: f64, a: f64) -> Result<f64> {
    check_ij(alpha, a)?;
    Ok(-gamma(alpha) / PI * a.powf(-alpha) * sin_half_pi(alpha))
}

/// J_α(a): the part of ∫₀^∞ b_α concentrated in [0, a), which compensates
/// I_α(a); J = (Γ(α)/π) a^{−α} sin(πα/2).
pub fn integral_j(alpha: f64, a: f64) -> Result<f64> {
    Ok(-integral_i(alpha, a)?)
}

/// Outcome of [`constant_annihilation_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnihilationReport {
    pub alpha: f64,
    pub eps: Vec<f64>,
    /// Re ∫₀^∞ dx/(ε − ix)^{α+1} from the closed antiderivative, per ε.
    pub closed: Vec<f64>,
    /// The same integral evaluated numerically in the scale-free variable
    /// y = x/ε, divided by ∫₀^∞ |Re (1 − iy)^{−α−1}| dy.
    pub numeric_relative: f64,
    /// max over the ε ladder of |closed|.
    pub max_abs: f64,
}

/// Checks that Re ∫₀^∞ dx/(ε − ix)^{α+1} vanishes for every ε > 0, i.e. that
/// the α-th derivative kernel annihilates constants.
pub fn constant_annihilation_check(alpha: f64) -> Result<AnnihilationReport> {
    ensure_finite("alpha", alpha)?;
    if alpha <= 0.0 {
        return Err(Error::AlphaOutOfRange { alpha, range: "(0, inf)" });
    }
    let eps = vec![1e-1, 1e-2, 1e-3, 1e-4];
    // antiderivative (ε − ix)^{−α}/(iα) evaluated from 0 to ∞
    let closed: Vec<f64> = eps
        .iter()
        .map(|&e: &f64| (Complex64::i() * e.powf(-alpha) / alpha).re)
        .collect();
    let max_abs = closed.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // ∫₀¹ Re(1 − iy)^{−α−1} dy + ∫₀¹ (1/α) Re((v^{1/α} − i)^{−α−1}) dv, the
    // second from y = 1/u, u = v^{1/α}
    let tol = Tolerance { abs: 1e-14, rel: 1e-13, max_subdivisions: 2000 };
    let near = |y: f64| Complex64::new(1.0, -y).powf(-alpha - 1.0).re;
    let far = |v: f64| Complex64::new(v.powf(1.0 / alpha), -1.0).powf(-alpha - 1.0).re / alpha;
    let value = integrate(near, 0.0, 1.0, tol)?.value + integrate(far, 0.0, 1.0, tol)?.value;
    let scale = integrate(|y| near(y).abs(), 0.0, 1.0, tol)?.value + integrate(|v| far(v).abs(), 0.0, 1.0, tol)?.value;
    Ok(AnnihilationReport { alpha, eps, closed, numeric_relative: value / scale, max_abs })
}

/// Oscillatory-quadrature evaluation of J_α(a), independent of the closed
/// form: J = (1/π) lim_{ε→0} ∫₀^∞ e^{−εk} k^{α−1} sin(ka) dk, taken with
/// Richardson extrapolation over a geometric ε ladder.
pub fn integral_j_quadrature(alpha: f64, a: f64, qcfg: &QuadratureConfig) -> Result<f64> {
    check_ij(alpha, a)?;
    qcfg.validate()?;
    let eps0 = qcfg.epsilon.max(1e-3).min(0.2);
    let levels = 4;
    let mut row: Vec<f64> = Vec::with_capacity(levels);
    for l in 0..levels {
        let e = eps0 / 2f64.powi(l as i32);
        row.push(damped_sine_moment(alpha - 1.0, a, e, qcfg)?);
    }
    // the ε-expansion of the damped integral is a power series in ε
    let mut table = row;
    for m in 1..levels {
        let f = 2f64.powi(m as i32);
        for i in (m..levels).rev() {
            table[i] = (f * table[i] - table[i - 1]) / (f - 1.0);
        }
    }
    Ok(table[levels - 1] / PI)
}

/// ∫₀^∞ e^{−εk} k^p sin(ka) dk summed over half-periods of the sine.
fn damped_sine_moment(p: f64, a: f64, eps: f64, qcfg: &QuadratureConfig) -> Result<f64> {
    let tol = Tolerance { abs: 1e-15, rel: 1e-13, max_subdivisions: qcfg.max_subdivisions };
    let half = PI / a;
    // k = u² removes the k^p endpoint singularity on the first panel
    let first = integrate(
        |u: f64| {
            let k = u * u;
            2.0 * u * (-eps * k).exp() * k.powf(p) * (k * a).sin()
        },
        0.0,
        half.sqrt(),
        tol,
    )?
    .value;
    let mut sum = first;
    let mut j = 1usize;
    loop {
        let lo = half * j as f64;
        let piece = integrate(|k: f64| (-eps * k).exp() * k.powf(p) * (k * a).sin(), lo, lo + half, tol)?.value;
        sum += piece;
        if piece.abs() < 1e-17 * sum.abs().max(1.0) && (-eps * lo).exp() < 1e-16 {
            break;
        }
        j += 1;
        if j > 10_000_000 {
            return Err(Error::QuadratureNoConvergence { estimate: sum, error: piece.abs(), subdivisions: j });
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use approx::assert_relative_eq;

    #[test]
    fn greens_examples() {
        let p = make_params(0.5, 1.0, 1.0).unwrap();
        assert_relative_eq!(greens_static(&p, 1.0).unwrap(), 1.0 / (4.0 * PI), max_relative = 1e-14);
        let r = greens_static(&p, 4.0).unwrap() / greens_static(&p, 1.0).unwrap();
        assert_relative_eq!(r, 0.5, max_relative = 1e-14);
        let p1 = make_params(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(greens_static(&p1, 1.0), Err(Error::DeltaPole { .. })));
        assert!(matches!(greens_static(&p, 0.0), Err(Error::OriginSingular)));
    }

    #[test]
    fn potential_special_cases() {
        assert_eq!(potential_b(2.0, 1.3, 0.0).unwrap(), 0.0);
        assert_eq!(potential_b(0.0, -0.2, 0.0).unwrap(), 0.0);
        assert!(matches!(potential_b(-3.0, 1.0, 0.0), Err(Error::ExcludedAlpha { .. })));
        assert!(matches!(potential_b(-1.0, 1.0, 0.0), Err(Error::ExcludedAlpha { .. })));
        assert!(matches!(potential_b(1.0, 0.0, 0.0), Err(Error::OriginSingular)));
        assert_relative_eq!(
            potential_b(-0.5, 1.0, 0.0).unwrap(),
            PI.sqrt() * (PI / 4.0).sin() / PI,
            max_relative = 1e-14
        );
    }

    #[test]
    fn q_n_cases() {
        for d in [0.3, 1.0, 1.7] {
            let p = make_params(d, 1.0, 1.0).unwrap();
            assert_relative_eq!(q_n(&p, 1, 1.0).unwrap().smooth, -1.0, max_relative = 1e-13);
        }
        let p = make_params(1.0, 1.0, 1.0).unwrap();
        assert_eq!(q_n(&p, 2, 1.0).unwrap().smooth, 0.0);
        assert_eq!(q_n(&p, 0, 0.3).unwrap().origin_delta_weight, 1.0);
        assert!(matches!(q_n(&p, -2, 1.0), Err(Error::InvalidOrder { .. })));
    }

    #[test]
    fn i_and_j() {
        assert_eq!(integral_i(2.0, 3.0).unwrap(), 0.0);
        assert_relative_eq!(integral_i(0.5, 1.0).unwrap(), -0.398_942_280_401_432_7, max_relative = 1e-14);
        assert!(matches!(integral_i(0.0, 1.0), Err(Error::AlphaOutOfRange { .. })));
        assert!(matches!(integral_j(1.0, 0.0), Err(Error::NonPositiveA { .. })));
    }

    #[test]
    fn poisson_rejects_biased_force() {
        let p = make_params(0.5, 1.0, 1.0).unwrap();
        let g = crate::grid::Grid1D::centered(64, 0.1).unwrap();
        let f = g.sample(|x| (-x * x).exp()).unwrap();
        assert!(matches!(
            poisson_solve(&p, &f, &PoissonOptions::default()),
            Err(Error::NonZeroMeanForce { .. })
        ));
        let opts = PoissonOptions { project_mean: true, ..Default::default() };
        assert!(poisson_solve(&p, &f, &opts).is_ok());
    }
}
