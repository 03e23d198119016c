//! Three-body ray kinematics and the no-diffraction test.
//!
//! A plane wave incident in region 2 reaches region 1 along two geometries of
//! equal path length. Each crossing of a pair line multiplies the ray by the
//! one-body transmission or reflection amplitude evaluated at the wavenumber
//! normal to that line. When the two outgoing products agree for every
//! `(k, phi)`, the scattering state can be written without diffraction.

use std::f64::consts::FRAC_PI_3;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::InteractionParams;
use crate::scattering::{amplitudes, ScatteringAmplitudes};
use crate::C64;

/// Residuals at or below this count as "no diffraction" in [`no_diffraction_scan`].
pub const NO_DIFFRACTION_TOL: f64 = 1e-10;

/// Margin kept from the grazing angles `phi = 0` and `phi = pi/3` in scans.
pub const PHI_MARGIN: f64 = 0.01;

/// Largest total wavenumber sampled by [`no_diffraction_scan`].
pub const SCAN_K_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayKinematics {
    pub k: f64,
    pub phi: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl RayKinematics {
    /// `k1 + k3 - k2`, zero up to rounding.
    pub fn momentum_defect(&self) -> f64 {
        self.k1 + self.k3 - self.k2
    }
}

/// Angles `phi, phi + pi/3, pi/3 - phi` and normal wavenumbers `k sin(phi_i)`.
pub fn ray_kinematics(k: f64, phi: f64) -> Result<RayKinematics> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveWavenumber(k));
    }
    if !(phi > 0.0 && phi < FRAC_PI_3) {
        return Err(Error::GrazingAngle(phi));
    }
    let (phi1, phi2, phi3) = (phi, phi + FRAC_PI_3, FRAC_PI_3 - phi);
    let kin = RayKinematics {
        k,
        phi,
        phi1,
        phi2,
        phi3,
        k1: k * phi1.sin(),
        k2: k * phi2.sin(),
        k3: k * phi3.sin(),
    };
    debug_assert!(kin.momentum_defect().abs() <= 1e-12 * k.max(1.0));
    Ok(kin)
}

/// Suffix convention for the second path of the two-path geometry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathConvention {
    /// `R1- R2- T3- + T1- R2- R3+` against `R3- T2+ R1+`.
    #[default]
    Tabulated,
    /// `R1- R2- T3- + T1- R2+ R3+` against `R3- T2+ R1+`.
    Narrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffractionReport {
    pub kinematics: RayKinematics,
    /// Sum over the two paths of the two-path geometry.
    pub amp_fig3: C64,
    /// The single-path geometry.
    pub amp_fig4: C64,
    pub residual: C64,
    pub residual_norm: f64,
}

pub fn outgoing_amplitudes(params: &InteractionParams, kin: &RayKinematics) -> Result<DiffractionReport> {
    outgoing_amplitudes_with(params, kin, PathConvention::default())
}

pub fn outgoing_amplitudes_with(
    params: &InteractionParams,
    kin: &RayKinematics,
    convention: PathConvention,
) -> Result<DiffractionReport> {
    let a1 = amplitudes(params, kin.k1)?;
    let a2 = amplitudes(params, kin.k2)?;
    let a3 = amplitudes(params, kin.k3)?;
    Ok(combine(kin, &a1, &a2, &a3, convention))
}

fn combine(
    kin: &RayKinematics,
    a1: &ScatteringAmplitudes,
    a2: &ScatteringAmplitudes,
    a3: &ScatteringAmplitudes,
    convention: PathConvention,
) -> DiffractionReport {
    let second_path_r2 = match convention {
        PathConvention::Tabulated => a2.r_minus,
        PathConvention::Narrated => a2.r_plus,
    };
    let amp_fig3 = a1.r_minus * a2.r_minus * a3.t_minus + a1.t_minus * second_path_r2 * a3.r_plus;
    let amp_fig4 = a3.r_minus * a2.t_plus * a1.r_plus;
    let residual = amp_fig3 - amp_fig4;
    DiffractionReport {
        kinematics: *kin,
        amp_fig3,
        amp_fig4,
        residual,
        residual_norm: residual.norm(),
    }
}

/// `i`-th point (from 1) of the two-dimensional Halton sequence in bases 2 and 3.
pub fn halton_point(index: u64) -> (f64, f64) {
    fn radical_inverse(mut i: u64, base: u64) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    (radical_inverse(index, 2), radical_inverse(index, 3))
}

/// The `i`-th `(k, phi)` sample of a scan: `k` in `(0, 10]`, `phi` inside the margins.
pub fn scan_point(index: u64) -> (f64, f64) {
    let (u, v) = halton_point(index + 1);
    let k = SCAN_K_MAX * (1.0 - u);
    let phi = PHI_MARGIN + (FRAC_PI_3 - 2.0 * PHI_MARGIN) * v;
    (k, phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub samples: usize,
    pub max_residual: f64,
    /// `(k, phi)` of the largest residual.
    pub worst_k: f64,
    pub worst_phi: f64,
    pub verdict: bool,
}

pub fn no_diffraction_scan(params: &InteractionParams, samples: usize) -> Result<ScanOutcome> {
    no_diffraction_scan_with(params, samples, PathConvention::default())
}

/// Largest residual over `samples` quasi-random points; the verdict is
/// `max_residual <= NO_DIFFRACTION_TOL`.
pub fn no_diffraction_scan_with(
    params: &InteractionParams,
    samples: usize,
    convention: PathConvention,
) -> Result<ScanOutcome> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let residuals: Vec<(f64, f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let (k, phi) = scan_point(i);
            let kin = ray_kinematics(k, phi)?;
            let report = outgoing_amplitudes_with(params, &kin, convention)?;
            Ok((report.residual_norm, k, phi))
        })
        .collect::<Result<_>>()?;
    // first maximum in index order, independent of thread scheduling
    let (max_residual, worst_k, worst_phi) =
        residuals
            .into_iter()
            .fold((f64::NEG_INFINITY, f64::NAN, f64::NAN), |best, cur| {
                if cur.0 > best.0 {
                    cur
                } else {
                    best
                }
            });
    Ok(ScanOutcome {
        samples,
        max_residual,
        worst_k,
        worst_phi,
        verdict: max_residual <= NO_DIFFRACTION_TOL,
    })
}
