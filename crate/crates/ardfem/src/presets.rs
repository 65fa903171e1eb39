//! Named scenario presets for the competition experiments.
//!
//! Every preset runs on the unit square, `T = 80`, `dt = 0.1`, initial
//! density 1.6, no-flux boundary, BDF2 time stepping with a backward-Euler
//! start-up, and a Gaussian carrying capacity peaked at the domain center.
//! They differ only in species count and the diffusion / advection /
//! harvesting / growth coefficients under study.

use std::f64::consts::PI;

use crate::coeffs::ScalarField;
use crate::config::{KSpec, RSpec, RunConfig};
use crate::error::{Error, Result};

/// Gaussian hump of the carrying capacity, peaked at (0.5, 0.5).
fn bump(x: f64, y: f64) -> f64 {
    2.5 * PI * PI * (-(x - 0.5) * (x - 0.5) - (y - 0.5) * (y - 0.5)).exp()
}

/// `K(t,x,y) = (1.2 + 2.5 pi^2 exp(-(x-1/2)^2 - (y-1/2)^2)) (1 + 0.3 cos t)`.
pub fn nonstationary_gaussian() -> ScalarField {
    ScalarField::with_grad(
        |t, x, y| (1.2 + bump(x, y)) * (1.0 + 0.3 * t.cos()),
        |t, x, y| {
            let s = (1.0 + 0.3 * t.cos()) * bump(x, y);
            [-2.0 * (x - 0.5) * s, -2.0 * (y - 0.5) * s]
        },
    )
}

/// The stationary variant `K(x,y) = 1.2 + 2.5 pi^2 exp(-(x-1/2)^2 - (y-1/2)^2)`.
pub fn stationary_gaussian() -> ScalarField {
    ScalarField::with_grad(
        |_, x, y| 1.2 + bump(x, y),
        |_, x, y| {
            let s = bump(x, y);
            [-2.0 * (x - 0.5) * s, -2.0 * (y - 0.5) * s]
        },
    )
}

/// Spatially periodic growth rate used by the growth-variation scenarios.
pub const GROWTH_EXPR: &str = "1.1 + 0.75*cos(x)*cos(y)";

/// `(d, beta, gamma)` per species plus environment/growth selectors.
struct PresetDef {
    name: &'static str,
    summary: &'static str,
    stationary_k: bool,
    growth: &'static str,
    species: &'static [(f64, f64, f64)],
}

const PRESETS: [PresetDef; 10] = [
    PresetDef {
        name: "fig1-advection",
        summary: "two species, advection 0.001 vs 0.01",
        stationary_k: false,
        growth: "1",
        species: &[(0.1, 0.001, 0.0), (0.1, 0.01, 0.0)],
    },
    PresetDef {
        name: "fig2-advection",
        summary: "two species, advection 0.001 vs 0.01, stationary environment",
        stationary_k: true,
        growth: "1",
        species: &[(0.1, 0.001, 0.0), (0.1, 0.01, 0.0)],
    },
    PresetDef {
        name: "fig3-harvest",
        summary: "two species, harvesting 0.001 vs 0.01",
        stationary_k: false,
        growth: "1",
        species: &[(0.1, 0.0, 0.001), (0.1, 0.0, 0.01)],
    },
    PresetDef {
        name: "fig4-harvest",
        summary: "two species, harvesting 0.001 vs none",
        stationary_k: false,
        growth: "1",
        species: &[(0.1, 0.0, 0.001), (0.1, 0.0, 0.0)],
    },
    PresetDef {
        name: "fig5-stocking",
        summary: "harvested vs stocked species, stationary environment",
        stationary_k: true,
        growth: "1",
        species: &[(0.1, 0.0, 0.001), (0.1, 0.0, -0.001)],
    },
    PresetDef {
        name: "fig6-advection3",
        summary: "three species, advection 0.2 / 0.08 / 0.001",
        stationary_k: false,
        growth: "1",
        species: &[(1.0, 0.2, 0.001), (1.0, 0.08, 0.001), (1.0, 0.001, 0.001)],
    },
    PresetDef {
        name: "fig7-harvest3",
        summary: "three species, harvesting 0.0009 / 0.0036 / 0.0072",
        stationary_k: false,
        growth: "1",
        species: &[
            (1.0, 0.001, 0.0009),
            (1.0, 0.001, 0.0036),
            (1.0, 0.001, 0.0072),
        ],
    },
    PresetDef {
        name: "fig8-growth",
        summary: "three species, periodic growth rate, low diffusion",
        stationary_k: false,
        growth: GROWTH_EXPR,
        species: &[
            (0.001, 0.001, 0.0009),
            (0.001, 0.001, 0.0025),
            (0.001, 0.001, 0.005),
        ],
    },
    PresetDef {
        name: "fig9-diffusion",
        summary: "three species, diffusion 0.1 / 0.02 / 0.01",
        stationary_k: false,
        growth: "1",
        species: &[
            (0.1, 0.001, 0.009),
            (0.02, 0.001, 0.0036),
            (0.01, 0.001, 0.0072),
        ],
    },
    PresetDef {
        name: "fig10-diffusion-growth",
        summary: "diffusion ladder with the periodic growth rate",
        stationary_k: false,
        growth: GROWTH_EXPR,
        species: &[
            (0.1, 0.001, 0.009),
            (0.02, 0.001, 0.0036),
            (0.01, 0.001, 0.0072),
        ],
    },
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

pub fn preset_summary(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|p| p.name == name).map(|p| p.summary)
}

/// Returns the full run configuration for a named preset.
pub fn preset(name: &str) -> Result<RunConfig> {
    let def = PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        Error::config(format!(
            "unknown preset '{name}'; valid presets: {}",
            preset_names().join(", ")
        ))
    })?;
    let mut config = RunConfig::with_species(def.species.len());
    config.k_spec = if def.stationary_k {
        KSpec::StationaryGaussian
    } else {
        KSpec::NonstationaryGaussian
    };
    let r = RSpec::parse(def.growth).expect("preset growth expressions parse");
    for (spec, &(d, beta, gamma)) in config.species.iter_mut().zip(def.species) {
        spec.d = d;
        spec.beta = beta;
        spec.gamma = gamma;
        spec.r = r.clone();
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{BoundarySpec, Mode};
    use crate::stepping::Scheme;

    #[test]
    fn carrying_capacities_match_their_formulas() {
        let k = nonstationary_gaussian();
        let want = (1.2 + 2.5 * PI * PI * (-0.25f64 - 0.0).exp()) * (1.0 + 0.3 * 2.0f64.cos());
        assert!((k.eval(2.0, 0.0, 0.5) - want).abs() < 1e-12);

        let ks = stationary_gaussian();
        assert!((ks.eval(7.0, 0.5, 0.5) - (1.2 + 2.5 * PI * PI)).abs() < 1e-12);
        // Stationary: no time dependence.
        assert_eq!(ks.eval(0.0, 0.3, 0.8), ks.eval(55.0, 0.3, 0.8));
    }

    #[test]
    fn gaussian_gradients_match_finite_differences() {
        for k in [nonstationary_gaussian(), stationary_gaussian()] {
            for (t, x, y) in [(0.0, 0.3, 0.7), (11.0, 0.5, 0.5), (40.0, 0.9, 0.1)] {
                let g = k.grad(t, x, y);
                let h = 1e-6;
                let gx = (k.eval(t, x + h, y) - k.eval(t, x - h, y)) / (2.0 * h);
                let gy = (k.eval(t, x, y + h) - k.eval(t, x, y - h)) / (2.0 * h);
                assert!((g[0] - gx).abs() < 1e-5, "dK/dx at ({t},{x},{y})");
                assert!((g[1] - gy).abs() < 1e-5, "dK/dy at ({t},{x},{y})");
            }
        }
    }

    #[test]
    fn presets_match_the_published_parameters() {
        // (name, stationary K, [(d, beta, gamma); ..], growth source).
        #[rustfmt::skip]
        let expected: [(&str, bool, &[(f64, f64, f64)], &str); 10] = [
            ("fig1-advection", false, &[(0.1, 0.001, 0.0), (0.1, 0.01, 0.0)], "1"),
            ("fig2-advection", true, &[(0.1, 0.001, 0.0), (0.1, 0.01, 0.0)], "1"),
            ("fig3-harvest", false, &[(0.1, 0.0, 0.001), (0.1, 0.0, 0.01)], "1"),
            ("fig4-harvest", false, &[(0.1, 0.0, 0.001), (0.1, 0.0, 0.0)], "1"),
            ("fig5-stocking", true, &[(0.1, 0.0, 0.001), (0.1, 0.0, -0.001)], "1"),
            ("fig6-advection3", false,
             &[(1.0, 0.2, 0.001), (1.0, 0.08, 0.001), (1.0, 0.001, 0.001)], "1"),
            ("fig7-harvest3", false,
             &[(1.0, 0.001, 0.0009), (1.0, 0.001, 0.0036), (1.0, 0.001, 0.0072)], "1"),
            ("fig8-growth", false,
             &[(0.001, 0.001, 0.0009), (0.001, 0.001, 0.0025), (0.001, 0.001, 0.005)],
             GROWTH_EXPR),
            ("fig9-diffusion", false,
             &[(0.1, 0.001, 0.009), (0.02, 0.001, 0.0036), (0.01, 0.001, 0.0072)], "1"),
            ("fig10-diffusion-growth", false,
             &[(0.1, 0.001, 0.009), (0.02, 0.001, 0.0036), (0.01, 0.001, 0.0072)],
             GROWTH_EXPR),
        ];
        assert_eq!(preset_names().len(), expected.len());
        for (name, stationary, species, growth) in expected {
            let c = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            // Shared experimental frame.
            assert_eq!(c.mode, Mode::Simulate, "{name}");
            assert_eq!(c.scheme, Scheme::Dbdf2, "{name}");
            assert_eq!(c.dt, 0.1, "{name}");
            assert_eq!(c.t_end, 80.0, "{name}");
            assert_eq!(c.boundary, BoundarySpec::NoFlux, "{name}");
            let stationary_got = matches!(c.k_spec, KSpec::StationaryGaussian);
            assert_eq!(stationary_got, stationary, "{name}");
            // Studied coefficients.
            assert_eq!(c.species.len(), species.len(), "{name}");
            for (i, (got, &(d, beta, gamma))) in c.species.iter().zip(species).enumerate() {
                assert_eq!(got.d, d, "{name} species {i} d");
                assert_eq!(got.beta, beta, "{name} species {i} beta");
                assert_eq!(got.gamma, gamma, "{name} species {i} gamma");
                assert_eq!(got.r.source(), growth, "{name} species {i} r");
            }
        }
    }

    #[test]
    fn unknown_preset_lists_the_registry() {
        let e = preset("fig99").unwrap_err().to_string();
        assert!(e.contains("unknown preset 'fig99'"), "{e}");
        assert!(e.contains("fig5-stocking"), "{e}");
    }

    #[test]
    fn every_preset_builds_a_valid_problem() {
        for name in preset_names() {
            let mut c = preset(name).unwrap();
            // Shrink so validation stays cheap; coefficients are unchanged.
            c.nx = 4;
            c.ny = 4;
            let p = c.problem().unwrap_or_else(|e| panic!("{name}: {e}"));
            p.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
