//! One function per subcommand, each turning a validated configuration into
//! tables and scalar results.

use serde_json::{json, Value};
use selfsim::diffusion::{
    fit_tail_exponent, ks_distance, propagator_w, propagator_w_at, propagator_w_cauchy, sample_levy, stable_scale,
    truncated_moment_pointwise, PropagatorCdf,
};
use selfsim::dynamics::{
    cauchy_evolve, energy, helmholtz_green, helmholtz_green_gauged, kernel_q_spectral, kernel_qdot_spectral,
    CauchyState,
};
use selfsim::operator::{laplacian_apply_point, laplacian_apply_spectral};
use selfsim::series::{kernel_q_series_sum, kernel_qdot_series_sum};
use selfsim::statics::{greens_prefactor, greens_static, integral_i, integral_j, potential_b};
use selfsim::{dispersion, dispersion_quadrature, RealField};

use crate::config::{RunConfig, TestFunction};
use crate::emit::{Output, Plot, Table};
use crate::error::CliError;

/// Commands that sample fields on the configured grid.
pub fn uses_grid(command: &str) -> bool {
    matches!(command, "laplacian" | "cauchy" | "kernels" | "helmholtz" | "diffusion")
}

/// Name of the configuration block a command reads.
pub fn block_name(command: &str) -> Option<&'static str> {
    match command {
        "dispersion" => Some("dispersion"),
        "greens-static" => Some("greens_static"),
        "laplacian" => Some("laplacian"),
        "cauchy" => Some("cauchy"),
        "kernels" => Some("kernels"),
        "helmholtz" => Some("helmholtz"),
        "diffusion" => Some("diffusion"),
        "mc" => Some("mc"),
        "potentials" => Some("potentials"),
        _ => None,
    }
}

pub fn dispatch(command: &str, cfg: &RunConfig) -> Result<Output, CliError> {
    match command {
        "dispersion" => run_dispersion(cfg),
        "greens-static" => run_greens_static(cfg),
        "laplacian" => run_laplacian(cfg),
        "cauchy" => run_cauchy(cfg),
        "kernels" => run_kernels(cfg),
        "helmholtz" => run_helmholtz(cfg),
        "diffusion" => run_diffusion(cfg),
        "mc" => run_mc(cfg),
        "potentials" => run_potentials(cfg),
        other => Err(CliError::Usage(format!("unknown command {other}"))),
    }
}

fn at_time(prefix: &str, t: f64) -> String {
    format!("{prefix}_t{t}")
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn run_dispersion(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.medium()?;
    let block = &cfg.dispersion;
    let mut cols = vec!["k", "omega2"];
    if block.quadrature {
        cols.push("omega2_quadrature");
    }
    let mut table = Table::new("dispersion.csv", &cols);
    let mut worst: f64 = 0.0;
    for &k in &block.k {
        let closed = dispersion(&p, k);
        let mut row = vec![k, closed];
        if block.quadrature {
            let q = dispersion_quadrature(&p, k, &cfg.quadrature)?;
            if closed != 0.0 {
                worst = worst.max(((closed - q) / closed).abs());
            }
            row.push(q);
        }
        table.push(row);
    }
    let mut out = Output::default();
    out.result("a_delta", p.a_delta());
    if block.quadrature {
        out.result("max_relative_difference", worst);
    }
    out.plots.push(Plot::lines("dispersion.gp", "dispersion.csv", "dispersion relation", "k", "omega^2", cols.len() - 1));
    out.tables.push(table);
    Ok(out)
}

fn run_greens_static(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.medium()?;
    let mut table = Table::new("greens-static.csv", &["x", "g"]);
    for &x in &cfg.greens_static.x {
        table.push(vec![x, greens_static(&p, x)?]);
    }
    let mut out = Output::default();
    out.result("prefactor", greens_prefactor(&p)?);
    out.plots.push(Plot::lines("greens-static.gp", "greens-static.csv", "static Green's function", "x", "g(x)", 1));
    out.tables.push(table);
    Ok(out)
}

fn run_laplacian(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.medium()?;
    let g = cfg.grid()?;
    let block = &cfg.laplacian;
    let k0 = block.k0;
    let f = move |x: f64| match block.function {
        TestFunction::Gaussian => (-x * x).exp(),
        TestFunction::Cosine => (k0 * x).cos(),
    };
    let exact = |x: f64| -dispersion(&p, k0) * (k0 * x).cos();
    let cosine = block.function == TestFunction::Cosine;

    let field = g.sample(f)?;
    let lap = laplacian_apply_spectral(&p, &field)?;
    let mut cols = vec!["x", "f", "laplacian"];
    if cosine {
        cols.push("exact");
    }
    let mut table = Table::new("laplacian.csv", &cols);
    let mut spectral_err: f64 = 0.0;
    for (i, x) in g.xs().into_iter().enumerate() {
        let mut row = vec![x, field.values()[i], lap.values()[i]];
        if cosine {
            spectral_err = spectral_err.max((lap.values()[i] - exact(x)).abs());
            row.push(exact(x));
        }
        table.push(row);
    }

    let mut out = Output::default();
    out.result("function", serde_json::to_value(block.function).unwrap());
    if cosine {
        out.result("spectral_max_abs_error", spectral_err);
        out.result("eigenvalue", -dispersion(&p, k0));
    }
    out.plots.push(Plot::lines("laplacian.gp", "laplacian.csv", "fractional Laplacian", "x", "value", cols.len() - 1));
    out.tables.push(table);

    if !block.x.is_empty() {
        let mut pcols = vec!["x", "pointwise"];
        if cosine {
            pcols.push("exact");
        }
        let mut pt = Table::new("laplacian-pointwise.csv", &pcols);
        for &x in &block.x {
            let v = laplacian_apply_point(&p, f, x, &cfg.quadrature)?;
            let mut row = vec![x, v];
            if cosine {
                row.push(exact(x));
            }
            pt.push(row);
        }
        out.tables.push(pt);
    }
    Ok(out)
}

fn run_cauchy(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.medium()?;
    let g = cfg.grid()?;
    let w = cfg.cauchy.width;
    let u0 = g.sample(|x| (-(x / w).powi(2)).exp())?;
    let s0 = CauchyState::new(u0, RealField::zeros(g), 0.0)?;
    let e0 = energy(&p, &s0);

    let times = &cfg.cauchy.times;
    let mut cols = vec!["x".to_string()];
    cols.extend(times.iter().map(|&t| at_time("u", t)));
    let states: Vec<CauchyState> = times.iter().map(|&t| cauchy_evolve(&p, &s0, t)).collect::<Result<_, _>>()?;
    let mut table = Table::with_columns("cauchy.csv", cols);
    for (i, x) in g.xs().into_iter().enumerate() {
        let mut row = vec![x];
        row.extend(states.iter().map(|s| s.u.values()[i]));
        table.push(row);
    }
    let energies: Vec<f64> = states.iter().map(|s| energy(&p, s)).collect();
    let drift = energies.iter().map(|e| if e0 > 0.0 { (e / e0 - 1.0).abs() } else { e.abs() }).fold(0.0, f64::max);

    let mut out = Output::default();
    out.result("initial_energy", e0);
    out.result("energies", energies);
    out.result("max_relative_energy_drift", drift);
    out.plots.push(Plot::lines("cauchy.gp", "cauchy.csv", "Cauchy problem", "x", "u(x,t)", times.len()));
    out.tables.push(table);
    Ok(out)
}

fn run_kernels(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.medium()?;
    let g = cfg.grid()?;
    let t = cfg.kernels.t;
    let q = kernel_q_spectral(&p, &g, t)?;
    let qd = kernel_qdot_spectral(&p, &g, t)?;
    let mut table = Table::new("kernels.csv", &["x", "q", "qdot"]);
    for (i, x) in g.xs().into_iter().enumerate() {
        table.push(vec![x, q.values()[i], qd.values()[i]]);
    }
    let mut out = Output::default();
    out.result("t", t);
    out.result("q_mass", q.mass());
    out.result("qdot_mass", qd.mass());
    out.plots.push(Plot::lines("kernels.gp", "kernels.csv", "Cauchy kernels", "x", "kernel", 2));
    out.tables.push(table);

    if !cfg.kernels.x.is_empty() {
        let mut st = Table::new("kernels-series.csv", &["x", "q_series", "q_tail_bound", "qdot_series", "qdot_tail_bound"]);
        let mut terms = Vec::new();
        for &x in &cfg.kernels.x {
            let a = kernel_q_series_sum(&p, x, t, &cfg.series)?;
            let b = kernel_qdot_series_sum(&p, x, t, &cfg.series)?;
            st.push(vec![x, a.value, a.tail_bound, b.value, b.tail_bound]);
            terms.push(json!({"x": x, "q_terms": a.terms, "qdot_terms": b.terms}));
        }
        out.result("series_terms", terms);
        out.tables.push(st);
    }
    Ok(out)
}

fn run_helmholtz(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.medium()?;
    let g = cfg.grid()?;
    let h = &cfg.helmholtz;
    let field = if h.gauged {
        helmholtz_green_gauged(&p, &g, h.omega, h.eps)?
    } else {
        helmholtz_green(&p, &g, h.omega, h.eps)?
    };
    let mut table = Table::new("helmholtz.csv", &["x", "re", "im"]);
    for (x, v) in g.xs().into_iter().zip(field.values()) {
        table.push(vec![x, v.re, v.im]);
    }
    let mut out = Output::default();
    out.result("omega", h.omega);
    out.result("eps", h.eps);
    out.result("gauged", h.gauged);
    out.plots.push(Plot::lines("helmholtz.gp", "helmholtz.csv", "Helmholtz Green's function", "x", "G(x)", 2));
    out.tables.push(table);
    Ok(out)
}

fn run_diffusion(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.medium()?;
    let g = cfg.grid()?;
    let block = &cfg.diffusion;
    let lorentz = p.delta() == 1.0;

    let fields: Vec<RealField> = block.times.iter().map(|&t| propagator_w(&p, &g, t)).collect::<Result<_, _>>()?;
    let mut cols = vec!["x".to_string()];
    cols.extend(block.times.iter().map(|&t| at_time("w", t)));
    if lorentz {
        cols.extend(block.times.iter().map(|&t| at_time("lorentzian", t)));
    }
    let xs = g.xs();
    let mut table = Table::with_columns("diffusion.csv", cols);
    let mut exact: Vec<Vec<f64>> = Vec::new();
    if lorentz {
        for &t in &block.times {
            exact.push(xs.iter().map(|&x| propagator_w_cauchy(&p, x, t)).collect::<Result<_, _>>()?);
        }
    }
    for (i, &x) in xs.iter().enumerate() {
        let mut row = vec![x];
        row.extend(fields.iter().map(|w| w.values()[i]));
        row.extend(exact.iter().map(|e| e[i]));
        table.push(row);
    }

    let mut per_time = Vec::new();
    for (j, (&t, w)) in block.times.iter().zip(&fields).enumerate() {
        let min = w.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let mut entry = json!({
            "t": t,
            "sigma": stable_scale(&p, t),
            "mass": w.mass(),
            "min": min,
            "max": w.max_abs(),
            "w_origin_pointwise": propagator_w_at(&p, 0.0, t)?,
        });
        if lorentz {
            entry["max_abs_deviation_from_lorentzian"] = Value::from(max_abs_diff(w.values(), &exact[j]));
        }
        per_time.push(entry);
    }

    let mut out = Output::default();
    out.result("times", per_time);
    out.plots.push(Plot::lines(
        "diffusion.gp",
        "diffusion.csv",
        "propagator W(x,t)",
        "x",
        "W(x,t)",
        table.columns.len() - 1,
    ));
    out.tables.push(table);

    let t0 = block.times[0];
    if let Some(tail) = block.tail {
        let s = stable_scale(&p, t0);
        let fit = fit_tail_exponent(&p, t0, tail.from * s, tail.to * s, tail.points)?;
        let mut tt = Table::new("diffusion-tail.csv", &["x", "w"]);
        for &(x, w) in &fit.points {
            tt.push(vec![x, w]);
        }
        out.result(
            "tail",
            json!({"t": t0, "slope": fit.slope, "intercept": fit.intercept, "expected_slope": -(1.0 + p.delta())}),
        );
        let mut plot = Plot::lines("diffusion-tail.gp", "diffusion-tail.csv", "far-field tail of W", "x", "W(x,t)", 1);
        plot.loglog = true;
        plot.fit = Some((fit.slope, fit.intercept));
        out.plots.push(plot);
        out.tables.push(tt);
    }
    if !block.moment_l.is_empty() {
        let moments: Vec<Value> = block
            .moment_l
            .iter()
            .map(|&l| Ok(json!({"l": l, "m2": truncated_moment_pointwise(&p, t0, 2, l)?})))
            .collect::<Result<_, CliError>>()?;
        out.result("second_moments", moments);
    }
    Ok(out)
}

fn run_mc(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.medium()?;
    let block = &cfg.mc;
    let batch = sample_levy(&p, block.t, block.samples, cfg.seed)?;
    let mut csv = Vec::new();
    batch.write_csv(&mut csv)?;

    let mut out = Output::default();
    out.result("t", block.t);
    out.result("scale", batch.scale);
    out.result("samples", batch.samples.len());
    out.result("seed", cfg.seed);
    if block.ks {
        let cdf = PropagatorCdf::new(&p, block.t)?;
        out.result("ks_distance", ks_distance(&batch.samples, |x| cdf.eval(x)));
        out.result("cdf_closure_defect", cdf.closure_defect());
    }
    let mut plot = Plot::lines("mc.gp", "mc.csv", "Levy flight positions", "x", "count", 1);
    plot.histogram = true;
    out.plots.push(plot);
    out.raw.push(("mc.csv".into(), csv));
    Ok(out)
}

fn run_potentials(cfg: &RunConfig) -> Result<Output, CliError> {
    let block = &cfg.potentials;
    let mut cols = vec!["x".to_string()];
    cols.extend(block.alphas.iter().map(|a| format!("b_alpha{a}")));
    let mut table = Table::with_columns("potentials.csv", cols);
    for &x in &block.x {
        let mut row = vec![x];
        for &alpha in &block.alphas {
            row.push(potential_b(alpha, x, block.eps)?);
        }
        table.push(row);
    }
    let mut comp = Vec::new();
    for &alpha in block.alphas.iter().filter(|a| **a > 0.0) {
        for &a in &block.a {
            let i = integral_i(alpha, a)?;
            let j = integral_j(alpha, a)?;
            comp.push(json!({"alpha": alpha, "a": a, "i": i, "j": j, "sum": i + j}));
        }
    }
    let mut out = Output::default();
    out.result("eps", block.eps);
    out.result("compensation", comp);
    out.plots.push(Plot::lines(
        "potentials.gp",
        "potentials.csv",
        "self-similar potentials",
        "x",
        "b_alpha(x)",
        block.alphas.len(),
    ));
    out.tables.push(table);
    Ok(out)
}
