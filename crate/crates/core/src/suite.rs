//! Oracle-versus-closed-form check suites behind `pointfam verify`.
//!
//! Every suite uses fixed seeds, so reports are reproducible.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffraction::{no_diffraction_scan, ray_kinematics};
use crate::interaction::{InteractionKind, InteractionParams};
use crate::many_body::nbody_bound_states;
use crate::one_body::bound_spectrum;
use crate::scattering::{amplitudes, unitarity_defect};
use crate::verify::{
    boundary_residual_3body, interior_residual, oracle_bound_kappas, sample_params, sample_two_level_params,
    scattering_matching_oracle, Incidence, PairLine, ResidualReport, DEFAULT_STEP,
};
use crate::Error;

pub const RANDOM_DRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Bound,
    Scatter,
    NbodyBoundary,
    NbodyInterior,
    Diffraction,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "bound" => Suite::Bound,
            "scatter" => Suite::Scatter,
            "nbody-boundary" => Suite::NbodyBoundary,
            "nbody-interior" => Suite::NbodyInterior,
            "diffraction" => Suite::Diffraction,
            "all" => Suite::All,
            other => return Err(Error::InvalidArgument(format!("unknown suite `{other}`"))),
        })
    }
}

pub fn run_suite(suite: Suite) -> Vec<ResidualReport> {
    match suite {
        Suite::Bound => bound_suite(),
        Suite::Scatter => scatter_suite(),
        Suite::NbodyBoundary => nbody_boundary_suite(),
        Suite::NbodyInterior => nbody_interior_suite(),
        Suite::Diffraction => diffraction_suite(),
        Suite::All => [
            Suite::Bound,
            Suite::Scatter,
            Suite::NbodyBoundary,
            Suite::NbodyInterior,
            Suite::Diffraction,
        ]
        .into_iter()
        .flat_map(run_suite)
        .collect(),
    }
}

fn draws(seed: u64, count: usize) -> Vec<InteractionParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_params(&mut rng)).collect()
}

/// Relative disagreement between closed-form and bracketed roots; infinite on a count mismatch.
pub fn bound_disagreement(params: &InteractionParams) -> f64 {
    let mut closed: Vec<f64> = bound_spectrum(params).iter().map(|s| s.kappa).collect();
    closed.sort_by(f64::total_cmp);
    let oracle = oracle_bound_kappas(params);
    if closed.len() != oracle.len() {
        return f64::INFINITY;
    }
    closed
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

fn bound_suite() -> Vec<ResidualReport> {
    let params = draws(0xB0, RANDOM_DRAWS);
    let worst = params.par_iter().map(bound_disagreement).reduce(|| 0.0, f64::max);
    vec![ResidualReport::new(
        "bound/oracle-vs-closed-form",
        worst,
        params.len(),
        1e-10,
    )]
}

/// Largest deviation between the closed-form amplitudes and the matching solve,
/// and the largest unitarity defect, over the given wavenumbers.
pub fn scatter_disagreement(params: &InteractionParams, ks: &[f64]) -> (f64, f64) {
    let mut dev: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for &k in ks {
        let (a, plus, minus) = match (
            amplitudes(params, k),
            scattering_matching_oracle(params, k, Incidence::Plus),
            scattering_matching_oracle(params, k, Incidence::Minus),
        ) {
            (Ok(a), Ok(p), Ok(m)) => (a, p, m),
            _ => return (f64::INFINITY, f64::INFINITY),
        };
        dev = dev
            .max((a.t_plus - plus.0).norm())
            .max((a.r_plus - plus.1).norm())
            .max((a.t_minus - minus.0).norm())
            .max((a.r_minus - minus.1).norm());
        defect = defect.max(unitarity_defect(&a));
    }
    (dev, defect)
}

fn scatter_suite() -> Vec<ResidualReport> {
    let params = draws(0x5C, RANDOM_DRAWS);
    let ks: Vec<f64> = (1..=10).map(|i| i as f64).collect();
    let (dev, defect) = params
        .par_iter()
        .map(|p| scatter_disagreement(p, &ks))
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let samples = params.len() * ks.len();
    vec![
        ResidualReport::new("scatter/matching-vs-closed-form", dev, samples, 1e-12),
        ResidualReport::new("scatter/unitarity", defect, samples, 1e-12),
    ]
}

fn nbody_boundary_suite() -> Vec<ResidualReport> {
    let mut sets = vec![
        InteractionParams::new(-2.0, 3.0, -2.0, 1.0, 0.0, 0.5).expect("stock parameters"),
        InteractionParams::canonical(InteractionKind::Delta, -2.0, 0.5).expect("stock parameters"),
        InteractionParams::new(-3.0, 2.0, -1.0, 1.0, 0.7, 1.0).expect("stock parameters"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x3B);
    sets.extend((0..20).map(|_| sample_two_level_params(&mut rng)));

    let mut out = Vec::new();
    for line in PairLine::ALL {
        let mut worst: f64 = 0.0;
        let mut samples = 0;
        for p in &sets {
            for s in nbody_bound_states(p, 3).unwrap_or_default() {
                let rep = boundary_residual_3body(p, &s, line, 50);
                worst = if rep.max_residual.is_nan() {
                    f64::NAN
                } else {
                    worst.max(rep.max_residual)
                };
                samples += rep.samples;
            }
        }
        out.push(ResidualReport::new(
            format!("nbody-boundary/{}", line.name()),
            worst,
            samples,
            1e-10,
        ));
    }
    out
}

fn nbody_interior_suite() -> Vec<ResidualReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1A);
    let mut sets = vec![
        InteractionParams::new(-2.0, 3.0, -2.0, 1.0, 0.0, 0.5).expect("stock parameters"),
        InteractionParams::canonical(InteractionKind::Delta, -2.0, 0.5).expect("stock parameters"),
    ];
    sets.extend((0..5).map(|_| sample_two_level_params(&mut rng)));
    (2..=5)
        .map(|n| {
            let mut worst: f64 = 0.0;
            let mut samples = 0;
            for p in &sets {
                for s in nbody_bound_states(p, n).unwrap_or_default() {
                    let rep = interior_residual(&s, 100, DEFAULT_STEP, &mut rng);
                    worst = worst.max(rep.max_residual);
                    samples += rep.samples;
                }
            }
            ResidualReport::new(format!("nbody-interior/n{n}"), worst, samples, 1e-6)
        })
        .collect()
}

fn diffraction_suite() -> Vec<ResidualReport> {
    let mut out = Vec::new();
    for (name, kind) in [
        ("delta", InteractionKind::Delta),
        ("anti-delta", InteractionKind::AntiDelta),
    ] {
        let p = InteractionParams::canonical(kind, -2.0, 0.5).expect("stock parameters");
        let scan = no_diffraction_scan(&p, 10_000)
            .map(|s| s.max_residual)
            .unwrap_or(f64::NAN);
        out.push(ResidualReport::new(format!("diffraction/{name}"), scan, 10_000, 1e-10));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1);
    let worst_defect = (0..10_000)
        .map(|_| {
            let phi = rng.gen_range(0.0..PI / 3.0);
            ray_kinematics(1.0, phi.max(f64::MIN_POSITIVE))
                .map(|k| k.momentum_defect().abs())
                .unwrap_or(f64::NAN)
        })
        .fold(0.0, f64::max);
    out.push(ResidualReport::new(
        "diffraction/momentum-identity",
        worst_defect,
        10_000,
        1e-15,
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for (s, v) in [
            ("bound", Suite::Bound),
            ("scatter", Suite::Scatter),
            ("nbody-boundary", Suite::NbodyBoundary),
            ("nbody-interior", Suite::NbodyInterior),
            ("diffraction", Suite::Diffraction),
            ("all", Suite::All),
        ] {
            assert_eq!(s.parse::<Suite>().unwrap(), v);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn all_suites_pass() {
        let reports = run_suite(Suite::All);
        assert!(reports.len() >= 10);
        for r in &reports {
            assert!(r.passed, "{r:?}");
        }
    }
}
