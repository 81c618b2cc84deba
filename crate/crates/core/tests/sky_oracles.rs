//! Sky-dome photometry checked against independent numeric integration: the
//! luminance gradation must close to the horizontal illuminance it claims,
//! and the window quadrature must agree with a dense direct surface
//! integral.

use daylight_core::geometry::{Point3, Polygon};
use daylight_core::sky::{
    externally_reflected_component, mean_relative_luminance, sky_component, sky_luminance,
    split_flux_irc, zenith_luminance, Blocker, SkyCondition, SkyModel, SkyOptions,
};

const MODELS: [SkyModel; 2] = [SkyModel::CieOvercast, SkyModel::Uniform];

fn vertical_window(x0: f64, x1: f64, z0: f64, z1: f64, y: f64) -> Polygon {
    Polygon::new(vec![
        Point3::new(x0, y, z0),
        Point3::new(x1, y, z0),
        Point3::new(x1, y, z1),
        Point3::new(x0, y, z1),
    ])
    .unwrap()
}

#[test]
fn gradation_integrates_back_to_the_horizontal_illuminance() {
    // E_dh = ∫ L(γ)·sin γ dΩ = 2π ∫ L(γ)·sin γ·cos γ dγ, evaluated with a
    // fine midpoint rule over elevation.
    let steps = 200_000;
    for model in MODELS {
        for e_dh in [1.0, 1.0e3, 1.0e5] {
            let zenith = zenith_luminance(model, e_dh);
            let h = std::f64::consts::FRAC_PI_2 / steps as f64;
            let mut sum = 0.0;
            for i in 0..steps {
                let g = (i as f64 + 0.5) * h;
                sum += sky_luminance(model, g.to_degrees(), zenith) * g.sin() * g.cos();
            }
            let recovered = 2.0 * std::f64::consts::PI * sum * h;
            assert!(
                (recovered - e_dh).abs() <= 1e-3 * e_dh,
                "{model:?} at {e_dh}: integral gives {recovered}"
            );
        }
    }
}

#[test]
fn mean_luminance_matches_direct_hemispheric_averaging() {
    // Solid-angle average of L/E_dh: (1/2π)·∫ (L/E_dh) dΩ = ∫ l(γ)·cos γ dγ.
    let steps = 100_000;
    for model in MODELS {
        let zenith = zenith_luminance(model, 1.0);
        let h = std::f64::consts::FRAC_PI_2 / steps as f64;
        let mut sum = 0.0;
        for i in 0..steps {
            let g = (i as f64 + 0.5) * h;
            sum += sky_luminance(model, g.to_degrees(), zenith) * g.cos();
        }
        let averaged = sum * h;
        let claimed = mean_relative_luminance(model);
        assert!(
            (averaged - claimed).abs() <= 1e-6 * claimed,
            "{model:?}: averaged {averaged} vs claimed {claimed}"
        );
    }
}

#[test]
fn sky_component_ignores_the_sky_brightness_scale() {
    let window = vertical_window(1.0, 2.0, 0.1, 2.1, 3.0);
    let q = Point3::new(1.5, 1.0, 0.01);
    for model in MODELS {
        let mut values = Vec::new();
        for e_dh in [1.0, 1.0e3, 1.0e5] {
            let sky = SkyCondition { model, diffuse_horizontal_lux: e_dh };
            values.push(
                sky_component(q, &window, 0.8, &[], &sky, &SkyOptions::default()).unwrap(),
            );
        }
        assert!(
            values[0].to_bits() == values[1].to_bits()
                && values[1].to_bits() == values[2].to_bits(),
            "{model:?}: brightness leaked into the percentage: {values:?}"
        );
    }
}

#[test]
fn window_quadrature_agrees_with_a_dense_surface_integral() {
    // Independent route: E/E_dh = ∫ l(γ)·sin γ·cosθ_w/r² dA over the window
    // surface, with cosθ_w the obliquity at the window and sin γ the
    // work-plane cosine, on a 600×600 midpoint grid.
    let (x0, x1, z0, z1, y) = (1.0, 2.0, 0.1, 2.1, 3.0);
    let window = vertical_window(x0, x1, z0, z1, y);
    let tau = 0.75;
    for (q, label) in [
        (Point3::new(1.5, 1.0, 0.01), "on-axis"),
        (Point3::new(0.2, 0.4, 0.01), "oblique"),
    ] {
        for model in MODELS {
            let sky = SkyCondition { model, diffuse_horizontal_lux: 1000.0 };
            let got = sky_component(
                q,
                &window,
                tau,
                &[],
                &sky,
                &SkyOptions { patch_n: 64, ..SkyOptions::default() },
            )
            .unwrap();

            let m = 600;
            let (dx, dz) = ((x1 - x0) / m as f64, (z1 - z0) / m as f64);
            let zenith = zenith_luminance(model, 1.0);
            let mut sum = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let p = Point3::new(
                        x0 + (i as f64 + 0.5) * dx,
                        y,
                        z0 + (j as f64 + 0.5) * dz,
                    );
                    let r = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2) + (p.z - q.z).powi(2))
                        .sqrt();
                    let sin_gamma = (p.z - q.z) / r;
                    if sin_gamma <= 0.0 {
                        continue;
                    }
                    let cos_w = (y - q.y) / r;
                    let gamma_deg = sin_gamma.asin().to_degrees();
                    sum += sky_luminance(model, gamma_deg, zenith) * sin_gamma * cos_w
                        / (r * r)
                        * dx
                        * dz;
                }
            }
            let want = 100.0 * tau * sum;
            assert!(
                (got - want).abs() <= 5e-3 * want,
                "{label} {model:?}: quadrature {got} vs surface integral {want}"
            );
        }
    }
}

#[test]
fn quadrature_converges_as_the_patch_grid_refines() {
    let window = vertical_window(1.05, 1.95, 0.1, 2.1, 3.0);
    let q = Point3::new(1.5, 2.27, 0.01);
    let sky = SkyCondition { model: SkyModel::CieOvercast, diffuse_horizontal_lux: 1.0 };
    let at = |n: usize| {
        sky_component(q, &window, 0.75, &[], &sky, &SkyOptions { patch_n: n, ..Default::default() })
            .unwrap()
    };
    let (c8, c16, c32, c64) = (at(8), at(16), at(32), at(64));
    assert!((c16 - c64).abs() <= 0.01 * c64, "N=16 off by {}", (c16 - c64).abs() / c64);
    assert!((c32 - c64).abs() <= 0.005 * c64);
    // Refinement errors shrink.
    assert!((c32 - c64).abs() <= (c8 - c64).abs());
}

#[test]
fn a_full_cover_screen_turns_sky_light_into_reflected_light() {
    // Uniform sky: every patch sees the same luminance, so fully screening
    // the window must yield exactly screen_factor·ρ times the open-sky
    // component — same quadrature nodes, different luminance.
    let window = vertical_window(1.0, 2.0, 0.5, 2.0, 3.0);
    let q = Point3::new(1.5, 1.2, 0.01);
    let screen_poly = vertical_window(-20.0, 20.0, 0.01, 60.0, 3.05);
    let rho = 0.35;
    let screen = Blocker { polygon: &screen_poly, reflectance: rho };
    let sky = SkyCondition { model: SkyModel::Uniform, diffuse_horizontal_lux: 1.0 };
    let opts = SkyOptions::default();

    let open = sky_component(q, &window, 0.8, &[], &sky, &opts).unwrap();
    let blocked_sc = sky_component(q, &window, 0.8, &[screen], &sky, &opts).unwrap();
    let erc =
        externally_reflected_component(q, &window, 0.8, &[screen], 0.2, &sky, &opts).unwrap();

    assert_eq!(blocked_sc, 0.0, "screen must remove all direct sky");
    let want = opts.obstruction_luminance_factor * rho * open;
    assert!(
        (erc - want).abs() <= 1e-9 * want,
        "reflected component {erc} vs factor·ρ·open {want}"
    );
}

#[test]
fn interreflected_light_scales_linearly_with_glazing_area() {
    let at = |w: f64| split_flux_irc(0.85, w, 50.0, 0.5, 0.3, 0.7, 39.0).unwrap();
    let base = at(2.0);
    assert!((at(4.0) - 2.0 * base).abs() < 1e-12);
    assert!((at(0.0) - 0.0).abs() < 1e-15);
    assert!((split_flux_irc(0.0, 2.0, 50.0, 0.5, 0.3, 0.7, 39.0).unwrap()).abs() < 1e-15);
}
