//! WebAssembly bindings for the browser demo.
//!
//! Each exported function has a plain Rust counterpart returning
//! `Result<Curve, String>` so it can be tested natively.

use selfsim::diffusion::{propagator_w, stable_scale};
use selfsim::dynamics::{cauchy_evolve, energy, CauchyState};
use selfsim::statics::potential_b;
use selfsim::{make_params, Grid1D, MediumParams, RealField};
use wasm_bindgen::prelude::*;

/// Largest number of plotted points a caller may request.
pub const MAX_POINTS: usize = 4096;

/// A sampled curve with one scalar summary attached.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    summary: f64,
}

#[wasm_bindgen]
impl Curve {
    #[wasm_bindgen(getter)]
    pub fn xs(&self) -> Vec<f64> {
        self.xs.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn ys(&self) -> Vec<f64> {
        self.ys.clone()
    }

    /// Propagator: stable scale σ. Potential: max |b|. Cauchy: relative
    /// energy drift.
    #[wasm_bindgen(getter)]
    pub fn summary(&self) -> f64 {
        self.summary
    }
}

impl Curve {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

fn check_window(x_max: f64, points: usize) -> Result<(), String> {
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err(format!("x_max must be positive and finite, got {x_max}"));
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}, got {points}"));
    }
    Ok(())
}

fn medium(delta: f64) -> Result<MediumParams, String> {
    make_params(delta, 1.0, 1.0).map_err(|e| e.to_string())
}

/// Periodic grid whose central `points` nodes cover [−x_max, x_max), padded
/// eightfold so that periodic images stay small.
fn padded_grid(x_max: f64, points: usize) -> Result<(Grid1D, std::ops::Range<usize>), String> {
    let dx = 2.0 * x_max / points as f64;
    let n = (8 * points).next_power_of_two();
    let grid = Grid1D::centered(n, dx).map_err(|e| e.to_string())?;
    let start = n / 2 - points / 2;
    Ok((grid, start..start + points))
}

fn window(field: &RealField, range: std::ops::Range<usize>) -> (Vec<f64>, Vec<f64>) {
    let xs = range.clone().map(|i| field.grid().x(i)).collect();
    let ys = field.values()[range].to_vec();
    (xs, ys)
}

/// Propagator W(x, t) on [−x_max, x_max).
pub fn propagator_profile_curve(delta: f64, t: f64, x_max: f64, points: usize) -> Result<Curve, String> {
    check_window(x_max, points)?;
    let p = medium(delta)?;
    let (grid, range) = padded_grid(x_max, points)?;
    let w = propagator_w(&p, &grid, t).map_err(|e| e.to_string())?;
    let (xs, ys) = window(&w, range);
    Ok(Curve { xs, ys, summary: stable_scale(&p, t) })
}

/// Potential b_α(x) at midpoints of `points` cells covering [−x_max, x_max],
/// so that the origin is never sampled.
pub fn potential_curve_values(alpha: f64, eps: f64, x_max: f64, points: usize) -> Result<Curve, String> {
    check_window(x_max, points)?;
    let h = 2.0 * x_max / points as f64;
    let xs: Vec<f64> = (0..points).map(|i| -x_max + (i as f64 + 0.5) * h).collect();
    let ys = xs
        .iter()
        .map(|&x| potential_b(alpha, x, eps))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| e.to_string())?;
    let summary = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    Ok(Curve { xs, ys, summary })
}

/// Displacement at time t for a Gaussian initial displacement of the given
/// width released from rest.
pub fn cauchy_snapshot_curve(delta: f64, t: f64, width: f64, x_max: f64, points: usize) -> Result<Curve, String> {
    check_window(x_max, points)?;
    if !(width.is_finite() && width > 0.0) {
        return Err(format!("width must be positive and finite, got {width}"));
    }
    let p = medium(delta)?;
    let (grid, range) = padded_grid(x_max, points)?;
    let u0 = grid.sample(|x| (-(x / width).powi(2)).exp()).map_err(|e| e.to_string())?;
    let s0 = CauchyState::new(u0, RealField::zeros(grid), 0.0).map_err(|e| e.to_string())?;
    let s = cauchy_evolve(&p, &s0, t).map_err(|e| e.to_string())?;
    let e0 = energy(&p, &s0);
    let drift = (energy(&p, &s) / e0 - 1.0).abs();
    let (xs, ys) = window(&s.u, range);
    Ok(Curve { xs, ys, summary: drift })
}

fn js(r: Result<Curve, String>) -> Result<Curve, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = propagatorProfile)]
pub fn propagator_profile(delta: f64, t: f64, x_max: f64, points: usize) -> Result<Curve, JsError> {
    js(propagator_profile_curve(delta, t, x_max, points))
}

#[wasm_bindgen(js_name = potentialCurve)]
pub fn potential_curve(alpha: f64, eps: f64, x_max: f64, points: usize) -> Result<Curve, JsError> {
    js(potential_curve_values(alpha, eps, x_max, points))
}

#[wasm_bindgen(js_name = cauchySnapshot)]
pub fn cauchy_snapshot(delta: f64, t: f64, width: f64, x_max: f64, points: usize) -> Result<Curve, JsError> {
    js(cauchy_snapshot_curve(delta, t, width, x_max, points))
}

#[wasm_bindgen]
pub fn version() -> String {
    selfsim::VERSION.to_string()
}
