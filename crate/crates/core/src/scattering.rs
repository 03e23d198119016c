//! Transmission and reflection amplitudes.
//!
//! The `+`/`-` suffix is the direction of incidence: `-` for a wave arriving
//! from `x < 0` and travelling right, `+` for one arriving from `x > 0`.
//!
//! ```text
//! D   = delta k^2 + 2 i k m (alpha + gamma) - 4 beta m^2
//! T_± = 4 i e^{∓ i theta} k m / D
//! R_± = (delta k^2 ∓ 2 i k m (alpha - gamma) + 4 beta m^2) / D
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::InteractionParams;
use crate::C64;

const SINGULAR_DENOMINATOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringAmplitudes {
    pub k: f64,
    pub t_plus: C64,
    pub t_minus: C64,
    pub r_plus: C64,
    pub r_minus: C64,
    pub denominator: C64,
}

impl ScatteringAmplitudes {
    pub fn transmission_probability(&self) -> f64 {
        self.t_plus.norm_sqr()
    }

    pub fn reflection_probability(&self) -> f64 {
        self.r_plus.norm_sqr()
    }
}

pub fn amplitudes(params: &InteractionParams, k: f64) -> Result<ScatteringAmplitudes> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveWavenumber(k));
    }
    let m = params.mass();
    let (alpha, beta, gamma, delta) = (params.alpha(), params.beta(), params.gamma(), params.delta());
    let i = C64::i();
    let km = k * m;
    let dk2 = delta * k * k;
    let bm2 = 4.0 * beta * m * m;

    let denominator = dk2 + 2.0 * i * km * (alpha + gamma) - bm2;
    if denominator.norm() < SINGULAR_DENOMINATOR {
        return Err(Error::SingularDenominator { k });
    }
    let w = params.phase();
    let t0 = 4.0 * i * km / denominator;
    let asym = 2.0 * i * km * (alpha - gamma);
    Ok(ScatteringAmplitudes {
        k,
        t_plus: t0 * w.conj(),
        t_minus: t0 * w,
        r_plus: (dk2 - asym + bm2) / denominator,
        r_minus: (dk2 + asym + bm2) / denominator,
        denominator,
    })
}

/// `max(| |T+|^2 + |R+|^2 - 1 |, | |T-|^2 + |R-|^2 - 1 |)`.
pub fn unitarity_defect(amps: &ScatteringAmplitudes) -> f64 {
    let plus = amps.t_plus.norm_sqr() + amps.r_plus.norm_sqr() - 1.0;
    let minus = amps.t_minus.norm_sqr() + amps.r_minus.norm_sqr() - 1.0;
    plus.abs().max(minus.abs())
}

/// Amplitudes on a list of wavenumbers, in input order.
pub fn sweep(params: &InteractionParams, ks: &[f64]) -> Result<Vec<ScatteringAmplitudes>> {
    ks.par_iter().map(|&k| amplitudes(params, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::InteractionKind;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn delta_potential_at_unit_k() {
        let p = InteractionParams::canonical(InteractionKind::Delta, -2.0, 0.5).unwrap();
        let a = amplitudes(&p, 1.0).unwrap();
        let t = C64::new(0.5, 0.5);
        let r = -1.0 / C64::new(1.0, 1.0);
        assert!((a.t_plus - t).norm() < 1e-15);
        assert!((a.t_minus - t).norm() < 1e-15);
        assert!((a.r_plus - r).norm() < 1e-15);
        assert!((a.r_minus - r).norm() < 1e-15);
        assert!((a.transmission_probability() - 0.5).abs() < 1e-15);
        assert!(unitarity_defect(&a) < 1e-15);
    }

    #[test]
    fn delta_prime_closed_form() {
        let p = InteractionParams::canonical(InteractionKind::DeltaPrime, -4.0, 1.0).unwrap();
        let a = amplitudes(&p, 2.0).unwrap();
        let d = C64::new(16.0, -8.0);
        assert!((a.denominator - d).norm() < 1e-13);
        let t = C64::new(0.0, -8.0) / d;
        assert!((a.t_plus - t).norm() < 1e-15);
        assert!((a.t_minus - t).norm() < 1e-15);
    }

    #[test]
    fn high_energy_limits() {
        let dp = InteractionParams::canonical(InteractionKind::DeltaPrime, -4.0, 1.0).unwrap();
        let a = amplitudes(&dp, 1e6).unwrap();
        let expect = 4.0 * 1e6 / (4.0 * 1e12);
        assert!((a.t_plus.norm() - expect).abs() < 1e-3 * expect);

        let d = InteractionParams::canonical(InteractionKind::Delta, -2.0, 0.5).unwrap();
        assert!((amplitudes(&d, 1e6).unwrap().t_plus.norm() - 1.0).abs() < 1e-10);

        // delta = 0 with alpha != gamma: |T| -> 2 / |alpha + gamma|
        let p = InteractionParams::new(2.0, 0.3, 0.5, 0.0, 0.4, 1.0).unwrap();
        assert!((amplitudes(&p, 1e6).unwrap().t_plus.norm() - 2.0 / 2.5).abs() < 1e-6);
    }

    #[test]
    fn free_particle() {
        let p = InteractionParams::new(1.0, 0.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let a = amplitudes(&p, 0.7).unwrap();
        assert!((a.t_plus - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(a.r_plus.norm() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_k() {
        let p = InteractionParams::new(1.0, 0.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!(matches!(amplitudes(&p, 0.0), Err(Error::NonPositiveWavenumber(_))));
        assert!(amplitudes(&p, f64::NAN).is_err());
    }

    #[test]
    fn perturbed_params_break_unitarity() {
        let p = InteractionParams::new(-2.0, 3.0, -2.0, 1.0, 0.0, 0.5).unwrap();
        let bad = InteractionParams::new_unchecked(-2.0, 3.1, -2.0, 1.0, 0.0, 0.5);
        let good = unitarity_defect(&amplitudes(&p, 1.3).unwrap());
        let broken = unitarity_defect(&amplitudes(&bad, 1.3).unwrap());
        assert!(good < 1e-14);
        assert!(broken > 1e-3, "{broken}");
    }

    fn random_params() -> impl Strategy<Value = InteractionParams> {
        (
            -3.0..3.0f64,
            -3.0..3.0f64,
            0.1..3.0f64,
            any::<bool>(),
            0.0..(2.0 * PI),
            0.2..2.0f64,
        )
            .prop_map(|(alpha, gamma, d, neg, theta, mass)| {
                let delta = if neg { -d } else { d };
                let beta = (alpha * gamma - 1.0) / delta;
                InteractionParams::new(alpha, beta, gamma, delta, theta, mass).unwrap()
            })
    }

    proptest! {
        #[test]
        fn flux_and_structure(p in random_params(), k in 0.01..10.0f64) {
            let a = amplitudes(&p, k).unwrap();
            prop_assert!(unitarity_defect(&a) <= 1e-12);
            let w = p.phase();
            prop_assert!((a.t_plus * w - a.t_minus * w.conj()).norm() <= 1e-14);
            let b = amplitudes(&p.with_theta(p.theta() + 1.1), k).unwrap();
            prop_assert_eq!(a.r_plus, b.r_plus);
            prop_assert_eq!(a.r_minus, b.r_minus);
            prop_assert!((a.t_plus.norm() - b.t_plus.norm()).abs() <= 1e-14);
        }

        #[test]
        fn flux_identity_algebra(p in random_params(), k in 0.01..10.0f64) {
            let (al, be, ga, de, m) = (p.alpha(), p.beta(), p.gamma(), p.delta(), p.mass());
            let lhs = (de * k * k + 4.0 * be * m * m).powi(2)
                + 4.0 * k * k * m * m * (al - ga).powi(2)
                + 16.0 * k * k * m * m;
            let rhs = (de * k * k - 4.0 * be * m * m).powi(2) + 4.0 * k * k * m * m * (al + ga).powi(2);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(rhs));
        }

        #[test]
        fn symmetric_interaction_reflects_equally(alpha in -3.0..3.0f64, delta in 0.1..3.0f64, k in 0.01..10.0f64) {
            let beta = (alpha * alpha - 1.0) / delta;
            let p = InteractionParams::new(alpha, beta, alpha, delta, 0.3, 1.0).unwrap();
            let a = amplitudes(&p, k).unwrap();
            prop_assert_eq!(a.r_plus, a.r_minus);
        }
    }
}
