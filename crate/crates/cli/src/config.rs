//! Run configuration: one JSON document, optionally overridden by flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use selfsim::series::SeriesPolicy;
use selfsim::statics::PotentialSpec;
use selfsim::{make_params, Grid1D, MediumParams, QuadratureConfig};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ParamsInput,
    pub grid: GridInput,
    pub quadrature: QuadratureConfig,
    pub series: SeriesPolicy,
    pub seed: u64,
    pub output: OutputInput,
    pub dispersion: DispersionBlock,
    pub greens_static: PointsBlock,
    pub laplacian: LaplacianBlock,
    pub cauchy: CauchyBlock,
    pub kernels: KernelsBlock,
    pub helmholtz: HelmholtzBlock,
    pub diffusion: DiffusionBlock,
    pub mc: McBlock,
    pub potentials: PotentialsBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ParamsInput::default(),
            grid: GridInput::default(),
            quadrature: QuadratureConfig::default(),
            series: SeriesPolicy::default(),
            seed: 1,
            output: OutputInput::default(),
            dispersion: DispersionBlock::default(),
            greens_static: PointsBlock::default(),
            laplacian: LaplacianBlock::default(),
            cauchy: CauchyBlock::default(),
            kernels: KernelsBlock::default(),
            helmholtz: HelmholtzBlock::default(),
            diffusion: DiffusionBlock::default(),
            mc: McBlock::default(),
            potentials: PotentialsBlock::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsInput {
    pub delta: f64,
    pub h: f64,
    pub zeta: f64,
}

impl Default for ParamsInput {
    fn default() -> Self {
        ParamsInput { delta: 1.0, h: 1.0, zeta: 1.0 }
    }
}

/// Uniform grid; centered on the origin unless `x_min` is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridInput {
    pub n: usize,
    pub dx: f64,
    pub x_min: Option<f64>,
}

impl Default for GridInput {
    fn default() -> Self {
        GridInput { n: 4096, dx: 0.05, x_min: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputInput {
    /// Not part of the echoed input, so the same run written to two
    /// directories produces identical files.
    #[serde(skip_serializing)]
    pub dir: PathBuf,
    pub plot: bool,
}

impl Default for OutputInput {
    fn default() -> Self {
        OutputInput { dir: PathBuf::from("out"), plot: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionBlock {
    pub k: Vec<f64>,
    /// Add the quadrature evaluation as a second column.
    pub quadrature: bool,
}

impl Default for DispersionBlock {
    fn default() -> Self {
        DispersionBlock { k: vec![0.1, 1.0, 10.0], quadrature: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointsBlock {
    pub x: Vec<f64>,
}

impl Default for PointsBlock {
    fn default() -> Self {
        PointsBlock { x: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    Gaussian,
    Cosine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaplacianBlock {
    pub function: TestFunction,
    /// Wavenumber of the cosine test function.
    pub k0: f64,
    /// Points for the pointwise (quadrature) evaluation.
    pub x: Vec<f64>,
}

impl Default for LaplacianBlock {
    fn default() -> Self {
        LaplacianBlock { function: TestFunction::Gaussian, k0: 1.0, x: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CauchyBlock {
    pub times: Vec<f64>,
    /// Initial displacement exp(−x²/width²), zero initial velocity.
    pub width: f64,
}

impl Default for CauchyBlock {
    fn default() -> Self {
        CauchyBlock { times: vec![0.5, 1.0, 2.0], width: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelsBlock {
    pub t: f64,
    /// Points for the series evaluation.
    pub x: Vec<f64>,
}

impl Default for KernelsBlock {
    fn default() -> Self {
        KernelsBlock { t: 1.0, x: vec![0.5, 1.0, 2.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HelmholtzBlock {
    pub omega: f64,
    pub eps: f64,
    /// Drop the k = 0 mode.
    pub gauged: bool,
}

impl Default for HelmholtzBlock {
    fn default() -> Self {
        HelmholtzBlock { omega: 1.0, eps: 0.05, gauged: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffusionBlock {
    pub times: Vec<f64>,
    /// Far-field slope fit at the first time.
    pub tail: Option<TailBlock>,
    /// Half-widths L for truncated second moments at the first time.
    pub moment_l: Vec<f64>,
}

impl Default for DiffusionBlock {
    fn default() -> Self {
        DiffusionBlock { times: vec![0.5, 1.0, 2.0], tail: None, moment_l: Vec::new() }
    }
}

/// Fit window in units of the stable scale σ = (A_δ t)^{1/δ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TailBlock {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl Default for TailBlock {
    fn default() -> Self {
        TailBlock { from: 1e3, to: 1e5, points: 25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McBlock {
    pub t: f64,
    pub samples: usize,
    /// Compare against the tabulated CDF of W.
    pub ks: bool,
}

impl Default for McBlock {
    fn default() -> Self {
        McBlock { t: 1.0, samples: 100_000, ks: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialsBlock {
    pub alphas: Vec<f64>,
    pub x: Vec<f64>,
    pub eps: f64,
    /// Cut points for the I/J compensation integrals (α > 0 only).
    pub a: Vec<f64>,
}

impl Default for PotentialsBlock {
    fn default() -> Self {
        PotentialsBlock {
            alphas: vec![-0.5, 0.5, 1.5],
            x: vec![0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0],
            eps: 0.0,
            a: vec![0.5, 1.0, 2.0],
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn medium(&self) -> Result<MediumParams, CliError> {
        let p = self.params;
        Ok(make_params(p.delta, p.h, p.zeta)?)
    }

    pub fn grid(&self) -> Result<Grid1D, CliError> {
        let g = self.grid;
        let grid = match g.x_min {
            Some(x0) => Grid1D::new(x0, g.dx, g.n)?,
            None => Grid1D::centered(g.n, g.dx)?,
        };
        Ok(grid)
    }
}

fn finite(name: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(CliError::Config(format!("{name} contains non-finite value {v}"))),
        None => Ok(()),
    }
}

fn positive(name: &str, values: &[f64]) -> Result<(), CliError> {
    finite(name, values)?;
    match values.iter().find(|v| **v <= 0.0) {
        Some(v) => Err(CliError::Config(format!("{name} must be positive, got {v}"))),
        None => Ok(()),
    }
}

fn non_empty(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        Err(CliError::Config(format!("{name} must not be empty")))
    } else {
        Ok(())
    }
}

/// Checks everything a command will consume, so that bad input is reported
/// before any computation starts.
pub fn validate(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    cfg.medium()?;
    cfg.quadrature.validate()?;
    cfg.series.validate()?;
    match command {
        "dispersion" => finite("dispersion.k", &cfg.dispersion.k)?,
        "greens-static" => {
            finite("greens_static.x", &cfg.greens_static.x)?;
            selfsim::statics::greens_prefactor(&cfg.medium()?)?;
        }
        "laplacian" => {
            cfg.grid()?;
            finite("laplacian.k0", &[cfg.laplacian.k0])?;
            finite("laplacian.x", &cfg.laplacian.x)?;
        }
        "cauchy" => {
            cfg.grid()?;
            non_empty("cauchy.times", &cfg.cauchy.times)?;
            finite("cauchy.times", &cfg.cauchy.times)?;
            positive("cauchy.width", &[cfg.cauchy.width])?;
        }
        "kernels" => {
            cfg.grid()?;
            finite("kernels.t", &[cfg.kernels.t])?;
            finite("kernels.x", &cfg.kernels.x)?;
        }
        "helmholtz" => {
            cfg.grid()?;
            finite("helmholtz.omega", &[cfg.helmholtz.omega])?;
            positive("helmholtz.eps", &[cfg.helmholtz.eps])?;
        }
        "diffusion" => {
            cfg.grid()?;
            non_empty("diffusion.times", &cfg.diffusion.times)?;
            positive("diffusion.times", &cfg.diffusion.times)?;
            positive("diffusion.moment_l", &cfg.diffusion.moment_l)?;
            if let Some(tail) = cfg.diffusion.tail {
                positive("diffusion.tail.from", &[tail.from])?;
                if !(tail.to > tail.from) || !tail.to.is_finite() {
                    return Err(CliError::Config("diffusion.tail.to must exceed diffusion.tail.from".into()));
                }
                if tail.points < 2 {
                    return Err(CliError::Config("diffusion.tail.points must be at least 2".into()));
                }
            }
        }
        "mc" => {
            positive("mc.t", &[cfg.mc.t])?;
            if cfg.mc.samples == 0 {
                return Err(CliError::Config("mc.samples must be at least 1".into()));
            }
        }
        "potentials" => {
            non_empty("potentials.alphas", &cfg.potentials.alphas)?;
            for &alpha in &cfg.potentials.alphas {
                PotentialSpec::new(alpha)?;
            }
            finite("potentials.x", &cfg.potentials.x)?;
            finite("potentials.eps", &[cfg.potentials.eps])?;
            if cfg.potentials.eps < 0.0 {
                return Err(selfsim::Error::EpsNonPositive { eps: cfg.potentials.eps }.into());
            }
            positive("potentials.a", &cfg.potentials.a)?;
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_json(r#"{"params": {"delta": 1, "gamma": 2}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"extra": 1}"#).is_err());
    }

    #[test]
    fn partial_blocks_keep_defaults() {
        let c = RunConfig::from_json(r#"{"params": {"delta": 0.5}, "mc": {"samples": 10}}"#).unwrap();
        assert_eq!(c.params.delta, 0.5);
        assert_eq!(c.params.h, 1.0);
        assert_eq!(c.mc.samples, 10);
        assert!(c.mc.ks);
    }

    #[test]
    fn validation_catches_bad_delta_and_grid() {
        let mut c = RunConfig::default();
        c.params.delta = 2.5;
        assert!(validate(&c, "dispersion").is_err());
        let mut c = RunConfig::default();
        c.grid.n = 2;
        assert!(validate(&c, "diffusion").is_err());
        assert!(validate(&c, "dispersion").is_ok());
        let mut c = RunConfig::default();
        c.potentials.alphas = vec![-3.0];
        assert!(validate(&c, "potentials").is_err());
    }
}
