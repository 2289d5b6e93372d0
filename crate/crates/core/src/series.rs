//! Power series with certified truncation: the Cauchy kernels Q, ∂ₜQ and the
//! small-δ propagator series.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::params::MediumParams;
use crate::special::{ln_gamma, sin_pi};

/// Truncation contract for the series evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesPolicy {
    pub max_terms: usize,
    /// Target bound on the discarded tail.
    pub abs_tol: f64,
    /// Largest admissible ratio between consecutive term magnitudes; larger
    /// ratios signal an argument far outside the useful range.
    pub ratio_guard: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy { max_terms: 4000, abs_tol: 1e-15, ratio_guard: 1e12 }
    }
}

impl SeriesPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::InvalidArgument("max_terms must be at least 1".into()));
        }
        ensure_finite("abs_tol", self.abs_tol)?;
        if self.abs_tol <= 0.0 {
            return Err(Error::NonPositiveScale { name: "abs_tol", value: self.abs_tol });
        }
        if self.ratio_guard.is_nan() || self.ratio_guard <= 0.0 {
            return Err(Error::NonPositiveScale { name: "ratio_guard", value: self.ratio_guard });
        }
        Ok(())
    }
}

/// A truncated sum together with its tail certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
    /// Bound on |value − exact|, from a geometric majorant of the tail.
    pub tail_bound: f64,
    /// Largest term magnitude encountered; with the unit roundoff this
    /// bounds the cancellation error of the partial sum.
    pub max_term: f64,
}

/// Sums Σ_{n≥1} term(n) where |term(n)| ≤ exp(ln_major(n)) and the majorant
/// ratios are eventually non-increasing. Once a ratio r < 1 is seen and the
/// next ratio does not exceed it, the tail from n+1 on is bounded by
/// M_{n+1}/(1 − r). A sum whose rounding error (from the largest term)
/// exceeds both 1e-6 of its value and the tolerance is rejected.
fn certified_sum<T, M>(policy: &SeriesPolicy, term: T, ln_major: M) -> Result<SeriesSum>
where
    T: Fn(usize) -> f64,
    M: Fn(usize) -> f64,
{
    policy.validate()?;
    let mut sum = 0.0;
    let mut max_term = 0.0f64;
    let mut bound = f64::INFINITY;
    for n in 1..=policy.max_terms {
        let t = term(n);
        sum += t;
        max_term = max_term.max(t.abs());
        let l1 = ln_major(n + 1);
        let l2 = ln_major(n + 2);
        let l3 = ln_major(n + 3);
        let r1 = (l2 - l1).exp();
        let r2 = (l3 - l2).exp();
        // the next term would overflow: no usable result in double precision
        if (l2 - l1) > policy.ratio_guard.ln() || l1 > 700.0 {
            return Err(Error::SeriesBudgetExceeded { partial: sum, bound, terms: n });
        }
        if r1 < 1.0 && r2 <= r1 {
            bound = l1.exp() / (1.0 - r1);
            if bound <= policy.abs_tol || l1 == f64::NEG_INFINITY {
                let rounding = f64::EPSILON * max_term * (n as f64).sqrt();
                if rounding > 1e-6 * sum.abs() && rounding > policy.abs_tol {
                    return Err(Error::SeriesCancellation { partial: sum, max_term });
                }
                return Ok(SeriesSum { value: sum, terms: n, tail_bound: bound, max_term });
            }
        }
    }
    Err(Error::SeriesBudgetExceeded { partial: sum, bound, terms: policy.max_terms })
}

fn check_point(x: f64, t: f64) -> Result<()> {
    ensure_finite("x", x)?;
    ensure_finite("t", t)?;
    if x == 0.0 {
        return Err(Error::OriginSingular);
    }
    Ok(())
}

/// ln|ξ| and arg ξ / π for ξ = A_δ t² e^{iπδ/2} / |x|^δ.
fn xi(params: &MediumParams, x: f64, t: f64) -> (f64, f64) {
    let d = params.delta();
    let ln_abs = params.a_delta().ln() + 2.0 * t.abs().ln() - d * x.abs().ln();
    (ln_abs, 0.5 * d)
}

/// Kernel series Σ_{n≥1} (−1)ⁿ (nδ)!/(m(n))! ξⁿ, imaginary part, scaled by
/// `scale`, with m(n) = 2n + shift.
fn kernel_series(params: &MediumParams, x: f64, t: f64, shift: f64, scale: f64, policy: &SeriesPolicy) -> Result<SeriesSum> {
    let d = params.delta();
    let (ln_xi, arg) = xi(params, x, t);
    let ln_scale = scale.abs().ln();
    let ln_major = |n: usize| -> f64 {
        let nf = n as f64;
        ln_scale + ln_gamma(nf * d + 1.0) - ln_gamma(2.0 * nf + shift + 1.0) + nf * ln_xi
    };
    // (−1)ⁿ e^{inπδ/2} = e^{inπ(1 + δ/2)}
    let term = |n: usize| -> f64 {
        let nf = n as f64;
        scale.signum() * ln_major(n).exp() * sin_pi(nf * (1.0 + arg))
    };
    certified_sum(policy, term, ln_major)
}

/// Smooth (x ≠ 0) part of the velocity kernel
/// Q(x,t) = −(t/(π|x|)) Im Σ_{n≥1} (−1)ⁿ (nδ)!/(2n+1)! ξⁿ.
///
/// The δ-function terms sitting at the origin are not included.
pub fn kernel_q_series(params: &MediumParams, x: f64, t: f64, policy: &SeriesPolicy) -> Result<f64> {
    Ok(kernel_q_series_sum(params, x, t, policy)?.value)
}

pub fn kernel_q_series_sum(params: &MediumParams, x: f64, t: f64, policy: &SeriesPolicy) -> Result<SeriesSum> {
    check_point(x, t)?;
    if t == 0.0 {
        return Ok(SeriesSum { value: 0.0, terms: 0, tail_bound: 0.0, max_term: 0.0 });
    }
    kernel_series(params, x, t, 1.0, -t / (PI * x.abs()), policy)
}

/// Smooth (x ≠ 0) part of the displacement kernel
/// ∂ₜQ(x,t) = −(1/(π|x|)) Im Σ_{n≥1} (−1)ⁿ (nδ)!/(2n)! ξⁿ.
pub fn kernel_qdot_series(params: &MediumParams, x: f64, t: f64, policy: &SeriesPolicy) -> Result<f64> {
    Ok(kernel_qdot_series_sum(params, x, t, policy)?.value)
}

pub fn kernel_qdot_series_sum(params: &MediumParams, x: f64, t: f64, policy: &SeriesPolicy) -> Result<SeriesSum> {
    check_point(x, t)?;
    if t == 0.0 {
        return Ok(SeriesSum { value: 0.0, terms: 0, tail_bound: 0.0, max_term: 0.0 });
    }
    kernel_series(params, x, t, 0.0, -1.0 / (PI * x.abs()), policy)
}

/// Ratios |c_{n+1} ξ^{n+1}| / |c_n ξⁿ| of consecutive Q-series terms,
/// n = 1..=count, with c_n = (nδ)!/(2n+1)!.
pub fn kernel_q_term_ratios(params: &MediumParams, x: f64, t: f64, count: usize) -> Result<Vec<f64>> {
    term_ratios(params, x, t, count, 1.0)
}

/// As [`kernel_q_term_ratios`] for the ∂ₜQ series, c_n = (nδ)!/(2n)!.
pub fn kernel_qdot_term_ratios(params: &MediumParams, x: f64, t: f64, count: usize) -> Result<Vec<f64>> {
    term_ratios(params, x, t, count, 0.0)
}

fn term_ratios(params: &MediumParams, x: f64, t: f64, count: usize, shift: f64) -> Result<Vec<f64>> {
    check_point(x, t)?;
    let d = params.delta();
    let (ln_xi, _) = xi(params, x, t);
    let ln_c = |n: f64| ln_gamma(n * d + 1.0) - ln_gamma(2.0 * n + shift + 1.0);
    Ok((1..=count)
        .map(|n| {
            let nf = n as f64;
            (ln_c(nf + 1.0) - ln_c(nf) + ln_xi).exp()
        })
        .collect())
}

/// Propagator series for 0 < δ < 1, x ≠ 0, t > 0:
/// W = (1/π) Σ_{n≥1} (−1)^{n−1} (nδ)!/n! sin(πnδ/2) (A_δ t)ⁿ / |x|^{nδ+1}.
///
/// The δ-function contributions at the origin are not included.
pub fn propagator_w_series(params: &MediumParams, x: f64, t: f64, policy: &SeriesPolicy) -> Result<f64> {
    Ok(propagator_w_series_sum(params, x, t, policy)?.value)
}

pub fn propagator_w_series_sum(params: &MediumParams, x: f64, t: f64, policy: &SeriesPolicy) -> Result<SeriesSum> {
    let d = params.delta();
    if d >= 1.0 {
        return Err(Error::DeltaOutOfRange { delta: d, range: "(0, 1)" });
    }
    check_point(x, t)?;
    if t <= 0.0 {
        return Err(Error::TimeNonPositive { t });
    }
    let r = x.abs();
    let ln_at = (params.a_delta() * t).ln();
    let ln_major = |n: usize| -> f64 {
        let nf = n as f64;
        ln_gamma(nf * d + 1.0) - ln_gamma(nf + 1.0) + nf * ln_at - (nf * d + 1.0) * r.ln() - PI.ln()
    };
    let term = |n: usize| -> f64 {
        let nf = n as f64;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        sign * ln_major(n).exp() * sin_pi(0.5 * nf * d)
    };
    certified_sum(policy, term, ln_major)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use approx::assert_relative_eq;

    #[test]
    fn q_reference_values_at_delta_one() {
        // arbitrary-precision evaluation of the same series
        let p = make_params(1.0, 1.0, 1.0).unwrap();
        let pol = SeriesPolicy::default();
        assert_relative_eq!(kernel_q_series(&p, 1.0, 1.0, &pol).unwrap(), 0.155_206_296_793_825, max_relative = 1e-12);
        assert_relative_eq!(kernel_q_series(&p, 2.0, 1.0, &pol).unwrap(), 0.040_936_882_222_986_1, max_relative = 1e-12);
    }

    #[test]
    fn leading_order_small_time() {
        let p = make_params(0.5, 1.0, 1.0).unwrap();
        let v = kernel_qdot_series(&p, 1.0, 0.1, &SeriesPolicy::default()).unwrap();
        assert_relative_eq!(v, 0.005, max_relative = 0.02);
    }

    #[test]
    fn zero_time_and_symmetry() {
        let p = make_params(1.3, 1.0, 1.0).unwrap();
        let pol = SeriesPolicy::default();
        assert_eq!(kernel_q_series(&p, 0.7, 0.0, &pol).unwrap(), 0.0);
        assert_eq!(kernel_qdot_series(&p, 0.7, 0.0, &pol).unwrap(), 0.0);
        assert_eq!(kernel_q_series(&p, 0.7, 0.4, &pol).unwrap(), kernel_q_series(&p, -0.7, 0.4, &pol).unwrap());
        assert!(matches!(kernel_q_series(&p, 0.0, 1.0, &pol), Err(Error::OriginSingular)));
    }

    #[test]
    fn w_series_rejects_large_delta() {
        let p = make_params(1.0, 1.0, 1.0).unwrap();
        let r = propagator_w_series(&p, 2.0, 1.0, &SeriesPolicy::default());
        assert!(matches!(r, Err(Error::DeltaOutOfRange { .. })));
    }

    #[test]
    fn budget_exhaustion_reports_partial_sum() {
        let p = make_params(0.5, 1.0, 1.0).unwrap();
        let pol = SeriesPolicy { max_terms: 3, ..Default::default() };
        match kernel_q_series(&p, 1.0, 3.0, &pol) {
            Err(Error::SeriesBudgetExceeded { terms, partial, .. }) => {
                assert_eq!(terms, 3);
                assert!(partial.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
