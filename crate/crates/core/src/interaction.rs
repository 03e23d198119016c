//! Interaction parameters and the boundary condition they define.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Absolute tolerance on `alpha*gamma - beta*delta - 1`.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Tolerance on `|sin theta|` for treating `e^{i theta}` as real.
pub const REAL_PHASE_TOL: f64 = 1e-12;

/// Parameter set as it appears on disk: `{"alpha", "beta", "gamma", "delta", "theta", "mass"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub theta: f64,
    pub mass: f64,
}

/// A validated member of the four-parameter family plus the particle mass.
///
/// Values are stored exactly as given; construction rejects sets that are off
/// the `alpha*gamma - beta*delta = 1` surface by more than [`CONSTRAINT_TOL`]
/// but never projects them back onto it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct InteractionParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    theta: f64,
    mass: f64,
}

/// Named members of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    /// `V(x) = g delta(x)`: `alpha = gamma = -1`, `beta = -g`, `delta = 0`, `e^{i theta} = -1`.
    Delta,
    /// Derivative-continuous, value-discontinuous: `alpha = gamma = -1`, `beta = 0`, `delta = -c`.
    DeltaPrime,
    /// Sign-reversed delta parameters with the same phase: `alpha = gamma = 1`, `beta = g`.
    AntiDelta,
}

impl TryFrom<RawParams> for InteractionParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        validate_params(raw)
    }
}

impl From<InteractionParams> for RawParams {
    fn from(p: InteractionParams) -> Self {
        p.raw()
    }
}

/// Checks the determinant constraint and the mass, returning the parameters unchanged.
pub fn validate_params(raw: RawParams) -> Result<InteractionParams> {
    let RawParams {
        alpha,
        beta,
        gamma,
        delta,
        theta,
        mass,
    } = raw;
    for (name, v) in [
        ("alpha", alpha),
        ("beta", beta),
        ("gamma", gamma),
        ("delta", delta),
        ("theta", theta),
        ("mass", mass),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if mass <= 0.0 {
        return Err(Error::NonPositiveMass(mass));
    }
    let residual = alpha * gamma - beta * delta - 1.0;
    if residual.abs() > CONSTRAINT_TOL {
        return Err(Error::ConstraintViolation { residual });
    }
    Ok(InteractionParams {
        alpha,
        beta,
        gamma,
        delta,
        theta,
        mass,
    })
}

impl InteractionParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, theta: f64, mass: f64) -> Result<Self> {
        validate_params(RawParams {
            alpha,
            beta,
            gamma,
            delta,
            theta,
            mass,
        })
    }

    /// Builds parameters without checking the constraint.
    ///
    /// Only meant for negative controls (perturbed parameter sets that must
    /// make downstream checks fail).
    pub fn new_unchecked(alpha: f64, beta: f64, gamma: f64, delta: f64, theta: f64, mass: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
            theta,
            mass,
        }
    }

    /// Parameters in the `(a, b, c, d)` convention, where `U = e^{i theta} [[d, c], [b, a]]`.
    pub fn from_abcd(a: f64, b: f64, c: f64, d: f64, theta: f64, mass: f64) -> Result<Self> {
        Self::new(d, c, a, b, theta, mass)
    }

    /// Inverse of [`from_abcd`](Self::from_abcd): returns `(a, b, c, d)`.
    pub fn abcd(&self) -> (f64, f64, f64, f64) {
        (self.gamma, self.delta, self.beta, self.alpha)
    }

    /// Canonical members with `e^{i theta} = -1`.
    ///
    /// `strength` is `g` for [`InteractionKind::Delta`] and
    /// [`InteractionKind::AntiDelta`] and `c` for [`InteractionKind::DeltaPrime`].
    /// For the anti-delta, `g` is chosen so that `beta = g`, the magnitude of
    /// the delta's `beta = -g` with the sign reversed.
    pub fn canonical(kind: InteractionKind, strength: f64, mass: f64) -> Result<Self> {
        let theta = std::f64::consts::PI;
        match kind {
            InteractionKind::Delta => Self::new(-1.0, -strength, -1.0, 0.0, theta, mass),
            InteractionKind::DeltaPrime => Self::new(-1.0, 0.0, -1.0, -strength, theta, mass),
            InteractionKind::AntiDelta => Self::new(1.0, strength, 1.0, 0.0, theta, mass),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            theta: self.theta,
            mass: self.mass,
        }
    }

    /// Same interaction with a different phase angle.
    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }

    /// `alpha*gamma - beta*delta - 1`.
    pub fn constraint_residual(&self) -> f64 {
        self.alpha * self.gamma - self.beta * self.delta - 1.0
    }

    /// `e^{i theta}`.
    pub fn phase(&self) -> C64 {
        C64::from_polar(1.0, self.theta)
    }

    /// `Some(+1)` or `Some(-1)` when `e^{i theta}` is real, `None` otherwise.
    pub fn real_phase_sign(&self) -> Option<f64> {
        if self.theta.sin().abs() <= REAL_PHASE_TOL {
            Some(self.theta.cos().signum())
        } else {
            None
        }
    }

    /// Invariance under `x -> -x`: `alpha = gamma` and a real phase.
    pub fn is_reflection_symmetric(&self) -> bool {
        self.alpha == self.gamma && self.real_phase_sign().is_some()
    }

    pub fn boundary_matrix(&self) -> BoundaryMatrix {
        let w = self.phase();
        BoundaryMatrix {
            entries: [[w * self.alpha, w * self.beta], [w * self.delta, w * self.gamma]],
        }
    }

    /// Maps the left limits `(psi'(-0), psi(-0))` to the right limits `(psi'(+0), psi(+0))`.
    pub fn apply_boundary(&self, psi_prime_minus: C64, psi_minus: C64) -> (C64, C64) {
        let two_m = 2.0 * self.mass;
        let [top, bottom] = self.boundary_matrix().apply([psi_prime_minus, psi_minus * two_m]);
        (top, bottom / two_m)
    }
}

/// `U = e^{i theta} [[alpha, beta], [delta, gamma]]`, acting on `(psi', 2m psi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMatrix {
    pub entries: [[C64; 2]; 2],
}

impl BoundaryMatrix {
    pub fn determinant(&self) -> C64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let e = &self.entries;
        [e[0][0] * v[0] + e[0][1] * v[1], e[1][0] * v[0] + e[1][1] * v[1]]
    }
}
