//! Special functions: extended factorial, trigonometric helpers with exact
//! zeros, and the Riemann and Hurwitz zeta functions on the real line.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};

pub use statrs::function::gamma::ln_gamma;

/// Γ(x), exact at small positive integers.
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 && x <= 171.0 && is_integer(x) {
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    statrs::function::gamma::gamma(x)
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

/// sin(πx), exactly zero at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if is_integer(x) {
        return 0.0;
    }
    // reduce to (-1, 1] so large arguments keep full accuracy
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r <= -1.0 {
        r += 2.0;
    }
    if r == 0.5 {
        1.0
    } else if r == -0.5 {
        -1.0
    } else {
        (PI * r).sin()
    }
}

/// cos(πx), exactly zero at half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// sin(πx/2), exactly zero at even integers.
pub fn sin_half_pi(x: f64) -> f64 {
    sin_pi(0.5 * x)
}

/// cos(πx/2), exactly zero at odd integers.
pub fn cos_half_pi(x: f64) -> f64 {
    cos_pi(0.5 * x)
}

/// Extended factorial α! = Γ(α + 1).
///
/// For α > −1 this is the ordinary Gamma function; below −1 it is continued
/// through the reflection formula α! = −π / (Γ(−α) sin(πα)). The negative
/// integers are poles and are reported as [`Error::PoleError`].
pub fn factorial_ext(alpha: f64) -> Result<f64> {
    ensure_finite("alpha", alpha)?;
    if alpha < 0.0 && is_integer(alpha) {
        return Err(Error::PoleError { alpha });
    }
    if alpha > -1.0 {
        Ok(gamma(alpha + 1.0))
    } else {
        Ok(-PI / (gamma(-alpha) * sin_pi(alpha)))
    }
}

/// Hurwitz zeta function ζ(s, a) = Σ_{k≥0} (k + a)^{−s} for real s ≠ 1,
/// a > 0, continued analytically in s.
///
/// Direct summation of the first terms followed by the Euler–Maclaurin
/// remainder; accurate to a few ulps for moderate |s|.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    ensure_finite("s", s)?;
    ensure_finite("a", a)?;
    if s == 1.0 {
        return Err(Error::PoleError { alpha: s });
    }
    if a <= 0.0 {
        return Err(Error::NonPositiveScale { name: "a", value: a });
    }
    // B_{2j}/(2j)!
    const B2J: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
        -3617.0 / 10_670_622_842_880_000.0,
    ];
    let n = 24usize.max((s.abs() as usize) + 10);
    let mut sum = 0.0;
    for k in 0..n {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + n as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s(s+1)…(s+2j−2) times x^{−s−2j+1}
    let mut rising = s;
    let mut xp = x.powf(-s - 1.0);
    for (j, b) in B2J.iter().enumerate() {
        sum += b * rising * xp;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        xp /= x * x;
    }
    Ok(sum)
}

/// Riemann zeta function ζ(s) for real s ≠ 1.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    ensure_finite("s", s)?;
    if s > -1.0 {
        return hurwitz_zeta(s, 1.0);
    }
    if s % 2.0 == 0.0 {
        return Ok(0.0);
    }
    // ζ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s) ζ(1−s)
    let z = hurwitz_zeta(1.0 - s, 1.0)?;
    Ok(2f64.powf(s) * PI.powf(s - 1.0) * sin_half_pi(s) * gamma(1.0 - s) * z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factorial_matches_gamma_above_minus_one() {
        assert_eq!(factorial_ext(0.0).unwrap(), 1.0);
        assert_relative_eq!(factorial_ext(0.5).unwrap(), 0.886_226_925_452_758, max_relative = 1e-14);
        assert_relative_eq!(factorial_ext(4.0).unwrap(), 24.0, max_relative = 1e-14);
    }

    #[test]
    fn factorial_poles() {
        for a in [-1.0, -2.0, -7.0] {
            assert!(matches!(factorial_ext(a), Err(Error::PoleError { .. })));
        }
    }

    #[test]
    fn factorial_reflection_branch() {
        // Γ(-1.5) = Γ(0.5) / ((-1.5)(-0.5))
        let want = PI.sqrt() / 0.75;
        assert_relative_eq!(factorial_ext(-2.5).unwrap(), want, max_relative = 1e-13);
        assert_relative_eq!(want, 2.363_271_801_207_355, max_relative = 1e-13);
    }

    #[test]
    fn exact_trig_zeros() {
        assert_eq!(sin_half_pi(2.0), 0.0);
        assert_eq!(sin_half_pi(-4.0), 0.0);
        assert_eq!(cos_half_pi(1.0), 0.0);
        assert_eq!(cos_half_pi(-3.0), 0.0);
        assert_eq!(sin_half_pi(1.0), 1.0);
        assert_eq!(sin_half_pi(3.0), -1.0);
        assert_relative_eq!(sin_pi(0.25), (PI / 4.0).sin(), max_relative = 1e-15);
        assert_relative_eq!(sin_pi(1e6 + 0.25), (PI / 4.0).sin(), max_relative = 1e-12);
    }

    #[test]
    fn zeta_reference_values() {
        // reference values from an arbitrary precision evaluation
        let cases = [
            (0.25, -0.813_278_405_261_891_7),
            (0.5, -1.460_354_508_809_586_8),
            (1.5, 2.612_375_348_685_488),
            (2.0, PI * PI / 6.0),
            (-1.0, -1.0 / 12.0),
        ];
        for (s, want) in cases {
            assert_relative_eq!(riemann_zeta(s).unwrap(), want, max_relative = 1e-13);
        }
        assert!(riemann_zeta(1.0).is_err());
        assert_eq!(riemann_zeta(-2.0).unwrap(), 0.0);
    }

    #[test]
    fn hurwitz_reference_values() {
        let cases = [
            (0.5, 0.25, 0.239_963_524_495_630_96),
            (0.5, 0.75, -1.095_419_389_883_587_4),
            (-0.5, 0.3, 0.093_358_815_084_915_32),
            (1.5, 0.1, 34.052_975_515_075_6),
        ];
        for (s, a, want) in cases {
            assert_relative_eq!(hurwitz_zeta(s, a).unwrap(), want, max_relative = 1e-13);
        }
    }
}
