//! Built-in acceptance checks, one case per criterion.

use std::f64::consts::PI;
use std::fs;

use serde_json::{json, Value};
use selfsim::diffusion::{
    continuity_residual, diffuse, fit_tail_exponent, ks_distance, propagator_w, propagator_w_cauchy, sample_levy,
    stable_scale, truncated_moment_pointwise, PropagatorCdf,
};
use selfsim::dynamics::{
    cauchy_evolve, energy, greens_retarded, helmholtz_green_gauged, kernel_q_spectral, kernel_qdot_spectral,
    CauchyState,
};
use selfsim::operator::{laplacian_apply_point, laplacian_apply_spectral};
use selfsim::series::{
    kernel_q_series, kernel_q_term_ratios, kernel_qdot_series, kernel_qdot_term_ratios, propagator_w_series,
    SeriesPolicy,
};
use selfsim::special::gamma;
use selfsim::statics::{
    greens_periodic, greens_prefactor, greens_static, integral_i, integral_j, integral_j_quadrature, poisson_solve,
    potential_b, PoissonOptions,
};
use selfsim::{dispersion, dispersion_quadrature, factorial_ext, make_params, Error, Grid1D, QuadratureConfig};

use crate::config::RunConfig;
use crate::error::CliError;

/// One measured quantity and the bound it must not exceed.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    fn new(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.to_string(), value, limit }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.limit
    }

    fn severity(&self) -> f64 {
        if !self.passed() {
            f64::INFINITY
        } else if self.limit > 0.0 {
            self.value / self.limit
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct CaseReport {
    pub id: &'static str,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    /// `C07 PASS title: worst <check> = v (limit l)`.
    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        if let Some(e) = &self.error {
            return format!("{} {status} {}: error {e}", self.id, self.title);
        }
        let worst = self.checks.iter().max_by(|a, b| a.severity().total_cmp(&b.severity()));
        match worst {
            Some(c) => format!("{} {status} {}: {} = {:.3e} (limit {:.0e})", self.id, self.title, c.name, c.value, c.limit),
            None => format!("{} {status} {}: no checks", self.id, self.title),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "title": self.title,
            "passed": self.passed(),
            "error": self.error,
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "value": c.value, "limit": c.limit})).collect::<Vec<_>>(),
        })
    }
}

type CaseFn = fn() -> Result<Vec<Check>, CliError>;

pub const CASES: [(&str, &str, CaseFn); 15] = [
    ("C01", "dispersion closed form vs quadrature", c01_dispersion),
    ("C02", "cosine eigenfunction", c02_eigenfunction),
    ("C03", "static Green's function round trip", c03_green),
    ("C04", "Cauchy kernels and energy", c04_kernels),
    ("C05", "retarded causality", c05_causality),
    ("C06", "Helmholtz static limit", c06_helmholtz),
    ("C07", "Cauchy-type propagator", c07_lorentzian),
    ("C08", "probability axioms", c08_axioms),
    ("C09", "Levy tails and moments", c09_tails),
    ("C10", "Monte Carlo vs numeric CDF", c10_monte_carlo),
    ("C11", "self-similar potentials", c11_potentials),
    ("C12", "extended factorial", c12_factorial),
    ("C13", "series guards", c13_series),
    ("C14", "continuity equation", c14_continuity),
    ("C15", "deterministic output", c15_determinism),
];

pub fn run_case(id: &'static str, title: &'static str, f: CaseFn) -> CaseReport {
    match f() {
        Ok(checks) => CaseReport { id, title, checks, error: None },
        Err(e) => CaseReport { id, title, checks: Vec::new(), error: Some(format!("[{}] {e}", e.code())) },
    }
}

pub fn run_all() -> Vec<CaseReport> {
    CASES.iter().map(|&(id, title, f)| run_case(id, title, f)).collect()
}

fn fmax(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn c01_dispersion() -> Result<Vec<Check>, CliError> {
    let q = QuadratureConfig::default();
    let mut worst = 0.0;
    for d in [0.25, 0.5, 1.0, 1.5, 1.9] {
        let p = make_params(d, 1.0, 1.0)?;
        for k in [0.1, 1.0, 10.0] {
            let closed = dispersion(&p, k);
            worst = fmax(worst, (closed - dispersion_quadrature(&p, k, &q)?).abs() / closed);
        }
    }
    Ok(vec![Check::new("relative difference", worst, 1e-6)])
}

fn c02_eigenfunction() -> Result<Vec<Check>, CliError> {
    let q = QuadratureConfig::default();
    let (mut spectral, mut pointwise) = (0.0, 0.0);
    for d in [0.25, 0.5, 1.0, 1.5, 1.9] {
        let p = make_params(d, 1.0, 1.0)?;
        let g = Grid1D::new(0.0, 0.05, 256)?;
        let k0 = g.k(5);
        let w2 = dispersion(&p, k0);
        let lu = laplacian_apply_spectral(&p, &g.sample(|x| (k0 * x).cos())?)?;
        for (x, v) in g.xs().into_iter().zip(lu.values()) {
            spectral = fmax(spectral, (v + w2 * (k0 * x).cos()).abs() / w2);
        }
        for k in [0.5, 2.0] {
            let w2 = dispersion(&p, k);
            for x in [0.0, 0.3] {
                let v = laplacian_apply_point(&p, |s| (k * s).cos(), x, &q)?;
                pointwise = fmax(pointwise, (v + w2 * (k * x).cos()).abs() / w2);
            }
        }
    }
    Ok(vec![Check::new("spectral relative error", spectral, 1e-10), Check::new("pointwise relative error", pointwise, 1e-4)])
}

fn c03_green() -> Result<Vec<Check>, CliError> {
    let (mut identity, mut round_trip) = (0.0, 0.0);
    for d in [0.25, 0.5, 1.5] {
        let p = make_params(d, 1.0, 1.0)?;
        let product = 2.0 * greens_prefactor(&p)? * gamma(d) * (0.5 * PI * d).cos() * p.a_delta();
        identity = fmax(identity, (product - 1.0).abs());
        let g = Grid1D::centered(4096, 0.05)?;
        let f = g.sample(|x| x * (-x * x).exp())?;
        let u = poisson_solve(&p, &f, &PoissonOptions::default())?;
        let back = laplacian_apply_spectral(&p, &u)?;
        let err = back.values().iter().zip(f.values()).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        round_trip = fmax(round_trip, err / f.max_abs());
    }
    Ok(vec![Check::new("|2 g0 Gamma cos A - 1|", identity, 1e-12), Check::new("round trip relative error", round_trip, 1e-6)])
}

fn c04_kernels() -> Result<Vec<Check>, CliError> {
    let pol = SeriesPolicy::default();
    let (mut q0, mut mass, mut series, mut drift) = (0.0, 0.0, 0.0, 0.0);
    for (d, n) in [(0.5, 1usize << 23), (1.0, 1 << 22), (1.5, 1 << 22)] {
        let p = make_params(d, 1.0, 1.0)?;
        let small = Grid1D::centered(1024, 0.05)?;
        q0 = fmax(q0, kernel_q_spectral(&p, &small, 0.0)?.max_abs());
        mass = fmax(mass, (kernel_qdot_spectral(&p, &small, 0.0)?.mass() - 1.0).abs());

        let g = Grid1D::centered(n, 0.02)?;
        let q = kernel_q_spectral(&p, &g, 1.0)?;
        let qd = kernel_qdot_spectral(&p, &g, 1.0)?;
        for i in [n / 2 + 50, n / 2 + 100, n / 2 - 100] {
            let x = g.x(i);
            let s = kernel_q_series(&p, x, 1.0, &pol)?;
            let sd = kernel_qdot_series(&p, x, 1.0, &pol)?;
            series = fmax(series, (q.values()[i] - s).abs() / s.abs());
            series = fmax(series, (qd.values()[i] - sd).abs() / sd.abs());
        }

        let e = Grid1D::centered(1024, 0.1)?;
        let u = e.sample(|x| (-x * x / 4.0).exp() * (1.0 + 0.5 * x.cos()))?;
        let v = e.sample(|x| x * (-x * x / 4.0).exp())?;
        let mut s = CauchyState::new(u, v, 0.0)?;
        let e0 = energy(&p, &s);
        for _ in 0..100 {
            s = cauchy_evolve(&p, &s, 0.05)?;
            drift = fmax(drift, (energy(&p, &s) / e0 - 1.0).abs());
        }
    }
    Ok(vec![
        Check::new("max |Q(x,0)|", q0, 0.0),
        Check::new("|mass dQ/dt(.,0) - 1|", mass, 1e-9),
        Check::new("series vs spectral relative error", series, 1e-6),
        Check::new("energy drift over 100 steps", drift, 1e-10),
    ])
}

fn c05_causality() -> Result<Vec<Check>, CliError> {
    let pol = SeriesPolicy::default();
    let (mut before, mut after) = (0.0, 0.0);
    for d in [0.5, 1.0, 1.5] {
        let p = make_params(d, 1.0, 1.0)?;
        for x in [1.0, 2.0] {
            for t in [-2.0, -1.0, -1e-6] {
                before = fmax(before, greens_retarded(&p, x, t, 0.0, &pol)?.abs());
            }
            for t in [0.3, 1.0, 1.7] {
                let diff = greens_retarded(&p, x, t, 0.0, &pol)? - kernel_q_series(&p, x, t, &pol)?;
                after = fmax(after, diff.abs());
            }
        }
    }
    Ok(vec![Check::new("max |g(x,t<0)|", before, 0.0), Check::new("max |g - Q| for t>0", after, 0.0)])
}

fn c06_helmholtz() -> Result<Vec<Check>, CliError> {
    let p = make_params(0.5, 1.0, 1.0)?;
    let g = Grid1D::centered(1 << 18, 0.05)?;
    let i = g.n() / 2 + 20;
    let x = g.x(i);
    let gs = greens_static(&p, x)?;
    let wrap = greens_periodic(&p, x, g.length())? - gs;
    let levels = 4usize;
    let mut t = Vec::with_capacity(levels);
    for l in 0..levels {
        t.push(helmholtz_green_gauged(&p, &g, 0.0, 0.05 / 2f64.powi(l as i32))?.values()[i].re - wrap);
    }
    for m in 1..levels {
        let f = 4f64.powi(m as i32);
        for j in (m..levels).rev() {
            t[j] = (f * t[j] - t[j - 1]) / (f - 1.0);
        }
    }
    Ok(vec![Check::new("relative difference at x=1", (t[levels - 1] / gs - 1.0).abs(), 0.01)])
}

fn c07_lorentzian() -> Result<Vec<Check>, CliError> {
    let p = make_params(1.0, 1.0, 1.0)?;
    let g = Grid1D::centered(1 << 17, 0.25)?;
    let w = propagator_w(&p, &g, 1.0)?;
    let peak = (w.values()[g.n() / 2] - 1.0 / (PI * PI)).abs();
    let mut sup = 0.0;
    for (x, v) in g.xs().into_iter().zip(w.values()) {
        sup = fmax(sup, (v - propagator_w_cauchy(&p, x, 1.0)?).abs());
    }
    Ok(vec![Check::new("|W(0,1) - 1/pi^2|", peak, 1e-8), Check::new("sup |W - Lorentzian|", sup, 1e-8)])
}

fn c08_axioms() -> Result<Vec<Check>, CliError> {
    let (mut mass, mut negative, mut symmetry, mut semigroup) = (0.0, 0.0, 0.0, 0.0);
    for d in [0.5, 1.0, 1.5] {
        let p = make_params(d, 1.0, 1.0)?;
        let g = Grid1D::centered(1 << 16, 0.05)?;
        let w = propagator_w(&p, &g, 1.0)?;
        let max = w.max_abs();
        mass = fmax(mass, (w.mass() - 1.0).abs());
        let min = w.values().iter().cloned().fold(f64::INFINITY, f64::min);
        negative = fmax(negative, (-min / max).max(0.0));
        let n = g.n();
        for i in 1..n / 2 {
            symmetry = fmax(symmetry, (w.values()[n / 2 + i] - w.values()[n / 2 - i]).abs() / max);
        }
        let rho0 = g.sample(|x| (-(x - 1.0) * (x - 1.0)).exp() / PI.sqrt())?;
        let split = diffuse(&p, &diffuse(&p, &rho0, 0.3)?, 0.5)?;
        let direct = diffuse(&p, &rho0, 0.8)?;
        mass = fmax(mass, (direct.mass() - rho0.mass()).abs());
        let scale = direct.max_abs();
        for (a, b) in split.values().iter().zip(direct.values()) {
            semigroup = fmax(semigroup, (a - b).abs() / scale);
        }
    }
    Ok(vec![
        Check::new("mass defect", mass, 1e-12),
        Check::new("-min/max", negative, 1e-8),
        Check::new("asymmetry", symmetry, 1e-13),
        Check::new("semigroup defect", semigroup, 1e-12),
    ])
}

fn c09_tails() -> Result<Vec<Check>, CliError> {
    let (mut slope, mut ratio) = (0.0, 0.0);
    for d in [0.5, 1.0, 1.5] {
        let p = make_params(d, 1.0, 1.0)?;
        let s = stable_scale(&p, 1.0);
        let fit = fit_tail_exponent(&p, 1.0, 1e3 * s, 1e5 * s, 25)?;
        slope = fmax(slope, (fit.slope + 1.0 + d).abs());
        let l = 1e4 * s;
        let r = truncated_moment_pointwise(&p, 1.0, 2, 2.0 * l)? / truncated_moment_pointwise(&p, 1.0, 2, l)?;
        ratio = fmax(ratio, (r / 2f64.powf(2.0 - d) - 1.0).abs());
    }
    Ok(vec![Check::new("|slope + 1 + delta|", slope, 0.05), Check::new("m2 ratio relative error", ratio, 0.05)])
}

fn c10_monte_carlo() -> Result<Vec<Check>, CliError> {
    let mut ks = 0.0;
    for (d, seed) in [(0.5, 20_240_501u64), (1.5, 7)] {
        let p = make_params(d, 1.0, 1.0)?;
        let cdf = PropagatorCdf::new(&p, 1.0)?;
        let batch = sample_levy(&p, 1.0, 100_000, seed)?;
        ks = fmax(ks, ks_distance(&batch.samples, |x| cdf.eval(x)));
    }
    Ok(vec![Check::new("KS distance", ks, 0.01)])
}

fn c11_potentials() -> Result<Vec<Check>, CliError> {
    let q = QuadratureConfig::default();
    let xs = [0.3, 1.0, 2.7];
    let (mut sym, mut zeros, mut comp, mut quad, mut refl) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for alpha in [-2.5, -0.5, 0.5, 1.5, 3.3] {
        for x in xs {
            sym = fmax(sym, (potential_b(alpha, x, 0.0)? - potential_b(alpha, -x, 0.0)?).abs());
            sym = fmax(sym, (potential_b(alpha, x, 0.1)? - potential_b(alpha, -x, 0.1)?).abs());
        }
    }
    for alpha in [0.0, 2.0, 4.0] {
        for x in xs {
            zeros = fmax(zeros, potential_b(alpha, x, 0.0)?.abs());
        }
    }
    for alpha in [0.5, 1.5] {
        for a in [0.5, 1.0, 2.0] {
            let j = integral_j(alpha, a)?;
            comp = fmax(comp, (integral_i(alpha, a)? + j).abs());
            quad = fmax(quad, (integral_j_quadrature(alpha, a, &q)? - j).abs());
        }
    }
    for alpha in [-1.5, -2.5, -3.7] {
        for x in xs {
            let generic = -factorial_ext(alpha)? / PI * f64::powf(x, -alpha - 1.0) * (0.5 * PI * alpha).sin();
            refl = fmax(refl, (potential_b(alpha, x, 0.0)? - generic).abs() / generic.abs());
        }
    }
    Ok(vec![
        Check::new("asymmetry", sym, 0.0),
        Check::new("even-integer values", zeros, 0.0),
        Check::new("|I + J|", comp, 1e-12),
        Check::new("|J quadrature - J|", quad, 1e-4),
        Check::new("reflection branch relative error", refl, 1e-12),
    ])
}

fn c12_factorial() -> Result<Vec<Check>, CliError> {
    // (−2.5)! = Γ(−1.5) = 4√π/3
    let exact = 4.0 * PI.sqrt() / 3.0;
    Ok(vec![Check::new("|(-2.5)! - 4 sqrt(pi)/3|", (factorial_ext(-2.5)? - exact).abs(), 1e-10)])
}

fn c13_series() -> Result<Vec<Check>, CliError> {
    let pol = SeriesPolicy::default();
    let mut violations = 0usize;
    for d in [0.5, 1.0, 1.5] {
        let p = make_params(d, 1.0, 1.0)?;
        for (x, t) in [(1.0, 1.0), (0.5, 2.0)] {
            for ratios in [kernel_q_term_ratios(&p, x, t, 400)?, kernel_qdot_term_ratios(&p, x, t, 400)?] {
                violations += (5..ratios.len()).filter(|&n| ratios[n] >= ratios[n - 1]).count();
            }
        }
    }
    let mut accepted = 0usize;
    for d in [1.0, 1.5, 1.9] {
        let p = make_params(d, 1.0, 1.0)?;
        if !matches!(propagator_w_series(&p, 2.0, 1.0, &pol), Err(Error::DeltaOutOfRange { .. })) {
            accepted += 1;
        }
    }
    Ok(vec![
        Check::new("non-monotone ratios after n=5", violations as f64, 0.0),
        Check::new("W series accepted with delta >= 1", accepted as f64, 0.0),
    ])
}

fn c14_continuity() -> Result<Vec<Check>, CliError> {
    let mut worst = 0.0;
    for d in [0.5, 1.0] {
        let p = make_params(d, 1.0, 1.0)?;
        let g = Grid1D::centered(16_384, 0.05)?;
        let rho = g.sample(|x| (-x * x).exp() / PI.sqrt())?;
        let r = continuity_residual(&p, &rho)?;
        worst = fmax(worst, r.max_abs() / laplacian_apply_spectral(&p, &rho)?.max_abs());
    }
    Ok(vec![Check::new("relative residual", worst, 1e-3)])
}

fn c15_determinism() -> Result<Vec<Check>, CliError> {
    let mut base = RunConfig::default();
    base.params.delta = 1.5;
    base.grid.n = 1024;
    base.mc.samples = 5000;
    base.mc.ks = false;
    base.diffusion.times = vec![0.5, 1.0];
    let mut mismatches = 0usize;
    for command in ["dispersion", "diffusion", "mc", "potentials"] {
        let a = tempfile::tempdir()?;
        let b = tempfile::tempdir()?;
        let mut cfg = base.clone();
        cfg.output.dir = a.path().to_path_buf();
        let first = crate::execute(command, &cfg)?;
        cfg.output.dir = b.path().to_path_buf();
        let second = crate::execute(command, &cfg)?;
        if first.len() != second.len() {
            mismatches += 1;
            continue;
        }
        for (x, y) in first.iter().zip(&second) {
            if x.file_name() != y.file_name() || fs::read(x)? != fs::read(y)? {
                mismatches += 1;
            }
        }
    }
    Ok(vec![Check::new("differing files across identical runs", mismatches as f64, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_ordered() {
        let ids: Vec<&str> = CASES.iter().map(|c| c.0).collect();
        let expected: Vec<String> = (1..=15).map(|i| format!("C{i:02}")).collect();
        assert_eq!(ids, expected);
    }

    #[test]
    fn report_line_and_failure() {
        let r = CaseReport { id: "C99", title: "t", checks: vec![Check::new("a", 0.5, 1.0), Check::new("b", 0.0, 0.0)], error: None };
        assert!(r.passed());
        assert!(r.line().starts_with("C99 PASS t: a = 5.000e-1"));
        let r = CaseReport { id: "C99", title: "t", checks: vec![Check::new("a", f64::NAN, 1.0)], error: None };
        assert!(!r.passed());
        let r = CaseReport { id: "C99", title: "t", checks: Vec::new(), error: Some("x".into()) };
        assert!(!r.passed());
        assert!(r.line().contains("FAIL"));
    }

    #[test]
    fn quick_cases_pass() {
        for &(id, title, f) in CASES.iter().filter(|c| ["C01", "C03", "C05", "C11", "C12", "C13", "C15"].contains(&c.0)) {
            let r = run_case(id, title, f);
            assert!(r.passed(), "{}", r.line());
        }
    }
}
