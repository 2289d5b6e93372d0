use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use selfsim::operator::*;
use selfsim::special::{gamma, riemann_zeta};
use selfsim::{dispersion, make_params, Error, Grid1D, QuadratureConfig, RealField};

fn gaussian(x: f64) -> f64 {
    (-x * x).exp()
}

/// Δ of e^{−x²} from the one-dimensional Fourier integral
/// −(1/π)∫₀^∞ A k^δ √π e^{−k²/4} cos(kx) dk, on a fine trapezoid grid.
fn gaussian_laplacian_oracle(delta: f64, x: f64) -> f64 {
    let p = make_params(delta, 1.0, 1.0).unwrap();
    let dk = 1e-4;
    let mut sum = 0.0;
    let mut k = dk;
    while k < 14.0 {
        sum += dispersion(&p, k) * PI.sqrt() * (-k * k / 4.0).exp() * (k * x).cos();
        k += dk;
    }
    // the k^δ cusp at the origin contributes O(dk^{1+δ}) only
    -sum * dk / PI
}

#[test]
fn cosine_is_an_eigenfunction() {
    let q = QuadratureConfig::default();
    for d in [0.25, 0.5, 1.0, 1.5, 1.9] {
        let p = make_params(d, 1.0, 1.0).unwrap();
        let g = Grid1D::new(0.0, 0.05, 256).unwrap();
        let k0 = g.k(5);
        let u = g.sample(|x| (k0 * x).cos()).unwrap();
        let lu = laplacian_apply_spectral(&p, &u).unwrap();
        let w2 = dispersion(&p, k0);
        for (x, v) in g.xs().into_iter().zip(lu.values()) {
            assert!((v + w2 * (k0 * x).cos()).abs() <= 1e-10 * w2, "spectral δ={d} x={x}");
        }
        for k in [0.5, 2.0] {
            let w2 = dispersion(&p, k);
            for x in [0.0, 0.3] {
                let v = laplacian_apply_point(&p, |s| (k * s).cos(), x, &q).unwrap();
                let exact = -w2 * (k * x).cos();
                assert!((v - exact).abs() <= 1e-4 * w2, "pointwise δ={d} k={k} x={x}: {v} vs {exact}");
            }
        }
    }
}

#[test]
fn delta_one_cosine_example() {
    let p = make_params(1.0, 1.0, 1.0).unwrap();
    let v = laplacian_apply_point(&p, |s: f64| s.cos(), 0.0, &QuadratureConfig::default()).unwrap();
    assert_relative_eq!(v, -PI, max_relative = 1e-7);
}

#[test]
fn constants_are_annihilated() {
    let q = QuadratureConfig::default();
    let p = make_params(0.7, 1.0, 1.0).unwrap();
    assert!(laplacian_apply_point(&p, |_| 3.0, 0.4, &q).unwrap().abs() < 1e-8 * 3.0);
    let g = Grid1D::centered(64, 0.1).unwrap();
    let c = g.sample(|_| 3.0).unwrap();
    assert!(laplacian_apply_spectral(&p, &c).unwrap().max_abs() < 1e-8 * 3.0);
    assert!(flux_apply(&p, &RealField::zeros(g)).unwrap().max_abs() == 0.0);
}

#[test]
fn gaussian_quadrature_matches_fourier_oracle() {
    let q = QuadratureConfig::default();
    for d in [0.25, 0.5, 1.0, 1.5, 1.9] {
        let p = make_params(d, 1.0, 1.0).unwrap();
        for x in [0.0, 0.7] {
            let v = laplacian_apply_point(&p, gaussian, x, &q).unwrap();
            let o = gaussian_laplacian_oracle(d, x);
            assert!((v - o).abs() <= 1e-5 * o.abs(), "δ={d} x={x}: {v} vs {o}");
        }
    }
}

#[test]
fn spectral_matches_quadrature_in_central_half() {
    let q = QuadratureConfig::default();
    for d in [0.5, 1.5] {
        let p = make_params(d, 1.0, 1.0).unwrap();
        // wide grid: the Gaussian's Laplacian decays only like |x|^{−1−δ}
        let g = Grid1D::centered(1 << 18, 0.05).unwrap();
        let lu = laplacian_apply_spectral(&p, &g.sample(gaussian).unwrap()).unwrap();
        // periodic images: Δf(x) ≈ (h^δ/ζ)·√π·|x|^{−1−δ} far away, summed
        // over x + mL, m ≠ 0
        let images = p.kernel_scale() * PI.sqrt() * 2.0 * riemann_zeta(1.0 + d).unwrap() * g.length().powf(-1.0 - d);
        for i in [g.n() / 2, g.n() / 2 + 10, g.n() / 2 - 24] {
            let x = g.x(i);
            let v = laplacian_apply_point(&p, gaussian, x, &q).unwrap();
            let s = lu.values()[i] - images;
            assert!((v - s).abs() <= 1e-5 * v.abs().max(0.1), "δ={d} x={x}: {v} vs {s}");
        }
    }
}

#[test]
fn weyl_marchaud_recombines_to_laplacian() {
    let q = QuadratureConfig::default();
    for d in [0.3, 0.5, 0.8] {
        let p = make_params(d, 1.0, 1.0).unwrap();
        for x in [0.0, 0.4] {
            let dl = weyl_marchaud(d, gaussian, x, Side::Left, &q).unwrap();
            let dr = weyl_marchaud(d, gaussian, x, Side::Right, &q).unwrap();
            let comb = -(gamma(1.0 - d) * p.kernel_scale() / d) * (dl + Complex64::from_polar(1.0, -PI * d) * dr);
            let lap = laplacian_apply_point(&p, gaussian, x, &q).unwrap();
            assert!((comb.re - lap).abs() < 1e-5 * lap.abs(), "δ={d} x={x}");
            assert!(comb.im.abs() < 1e-9 * lap.abs());
        }
    }
}

#[test]
fn weyl_marchaud_basic_properties() {
    let q = QuadratureConfig::default();
    let l = weyl_marchaud(0.5, |_| 2.0, 0.3, Side::Left, &q).unwrap();
    assert!(l.norm() < 1e-10);
    let l = weyl_marchaud(0.5, f64::cos, 0.0, Side::Left, &q).unwrap();
    let r = weyl_marchaud(0.5, f64::cos, 0.0, Side::Right, &q).unwrap();
    // the right derivative carries the principal-branch phase e^{iπδ}
    assert!((l.re - (r * Complex64::from_polar(1.0, -0.5 * PI)).re).abs() < 1e-8);
    assert!(matches!(weyl_marchaud(1.2, f64::cos, 0.0, Side::Left, &q), Err(Error::DeltaOutOfRange { .. })));
}

#[test]
fn flux_of_symmetric_density_is_antisymmetric() {
    let p = make_params(0.8, 1.0, 1.0).unwrap();
    let g = Grid1D::new(-10.0, 0.05, 401).unwrap();
    let x0 = g.x(200);
    let rho = g.sample(|x| (-(x - x0) * (x - x0)).exp()).unwrap();
    let j = flux_apply(&p, &rho).unwrap();
    assert!(j.values()[200].abs() < 1e-14);
    for m in 1..150 {
        let (a, b) = (j.values()[200 + m], j.values()[200 - m]);
        assert!((a + b).abs() <= 1e-12 * a.abs().max(1e-12));
    }
}

#[test]
fn flux_divergence_equals_minus_laplacian() {
    for d in [0.5, 1.0, 1.5] {
        let p = make_params(d, 1.0, 1.0).unwrap();
        let g = Grid1D::centered(4096, 0.05).unwrap();
        let rho = g.sample(gaussian).unwrap();
        let div = derivative(&flux_apply(&p, &rho).unwrap());
        let q = QuadratureConfig::default();
        for i in [g.n() / 2, g.n() / 2 + 17] {
            let lap = laplacian_apply_point(&p, gaussian, g.x(i), &q).unwrap();
            let rel = (div.values()[i] + lap).abs() / lap.abs();
            assert!(rel < 1e-3, "δ={d} rel={rel}");
        }
    }
}

#[test]
fn fractional_kernel_examples() {
    assert_eq!(frac_kernel_y(1.0, 0.7, 0.0).unwrap(), 0.0);
    assert_relative_eq!(frac_kernel_y(0.5, 1.0, 0.0).unwrap(), -gamma(1.5) / PI, max_relative = 1e-14);
    // ε-regularized value approaches the ε = 0 limit linearly in ε
    let v1 = frac_kernel_y(0.5, 1.0, 1e-4).unwrap();
    let v2 = frac_kernel_y(0.5, 1.0, 5e-5).unwrap();
    assert_relative_eq!(2.0 * v2 - v1, -gamma(1.5) / PI, max_relative = 1e-7);
    assert!(matches!(frac_kernel_y(-1.0, 1.0, 0.0), Err(Error::AlphaOutOfRange { .. })));
}

#[test]
fn fractional_derivative_integer_orders() {
    let g = Grid1D::centered(512, 0.05).unwrap();
    let k0 = g.k(7);
    let s = g.sample(|x| (k0 * x).sin()).unwrap();
    let d1 = frac_derivative_spectral(1.0, &s).unwrap();
    for (x, v) in g.xs().into_iter().zip(d1.values()) {
        assert!((v - k0 * (k0 * x).cos()).abs() < 1e-10);
    }
    let gs = g.sample(gaussian).unwrap();
    let d2 = frac_derivative_spectral(2.0, &gs).unwrap();
    for (x, v) in g.xs().into_iter().zip(d2.values()) {
        assert!((v - (4.0 * x * x - 2.0) * gaussian(x)).abs() < 1e-8);
    }
    assert_eq!(frac_derivative_spectral(0.0, &gs).unwrap(), gs);
}

#[test]
fn half_derivatives_compose_to_first() {
    let g = Grid1D::centered(512, 0.05).unwrap();
    let gs = g.sample(gaussian).unwrap();
    let half = frac_derivative_spectral(0.5, &frac_derivative_spectral(0.5, &gs).unwrap()).unwrap();
    let one = frac_derivative_spectral(1.0, &gs).unwrap();
    for (a, b) in half.values().iter().zip(one.values()) {
        assert!((a - b).abs() < 1e-10);
    }
}

fn band_limited(g: &Grid1D, coeffs: &[(f64, f64)], shift: f64) -> RealField {
    g.sample(|x| {
        let env = (-(x - shift) * (x - shift) / 4.0).exp();
        env * coeffs.iter().enumerate().map(|(m, (a, b))| a * (m as f64 * x).cos() + b * (m as f64 * x).sin()).sum::<f64>()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spectral_laplacian_is_self_adjoint_and_nonpositive(
        d in 0.1f64..1.9,
        cf in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
        cg in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
        shift in -3.0f64..3.0,
    ) {
        let p = make_params(d, 1.0, 1.0).unwrap();
        let g = Grid1D::centered(1024, 0.05).unwrap();
        let f = band_limited(&g, &cf, shift);
        let h = band_limited(&g, &cg, -shift);
        let lf = laplacian_apply_spectral(&p, &f).unwrap();
        let lh = laplacian_apply_spectral(&p, &h).unwrap();
        let a = f.dot(&lh).unwrap();
        let b = lf.dot(&h).unwrap();
        let scale = f.dot(&f).unwrap().sqrt() * lh.dot(&lh).unwrap().sqrt();
        prop_assert!((a - b).abs() <= 1e-6 * scale.max(1e-300));
        prop_assert!(f.dot(&lf).unwrap() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn spectral_laplacian_scales_with_dilation(d in 0.1f64..1.9, lambda in 0.5f64..2.0) {
        // Δ[f(λ·)](x) = λ^δ (Δf)(λx) on the continuum; with a grid scaled by
        // 1/λ the samples coincide exactly
        let p = make_params(d, 1.0, 1.0).unwrap();
        let g1 = Grid1D::centered(512, 0.05).unwrap();
        let g2 = Grid1D::centered(512, 0.05 / lambda).unwrap();
        let l1 = laplacian_apply_spectral(&p, &g1.sample(gaussian).unwrap()).unwrap();
        let l2 = laplacian_apply_spectral(&p, &g2.sample(|x| gaussian(lambda * x)).unwrap()).unwrap();
        let scale = l1.max_abs() * lambda.powf(d);
        for (a, b) in l1.values().iter().zip(l2.values()) {
            prop_assert!((lambda.powf(d) * a - b).abs() <= 1e-10 * scale);
        }
    }
}
