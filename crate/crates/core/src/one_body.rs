//! Single-particle bound states.
//!
//! A bound state `psi(x) = C_± e^{-kappa |x|}` satisfies the boundary condition
//! iff `delta kappa^2 + 2 (alpha + gamma) kappa m + 4 beta m^2 = 0`. The same
//! formulas describe the two-body relative motion in the scaled coordinate
//! `x = (x1 - x2) / sqrt(2)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::InteractionParams;
use crate::C64;

/// Roots at or below this decay constant are dropped as non-normalizable.
pub const KAPPA_CUTOFF: f64 = 1e-12;

/// Which sign of the square root in the quadratic formula produced a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
    /// `delta = 0`: the bound-state condition is linear in `kappa`.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub kappa: f64,
    pub energy: f64,
    /// `psi(+0) / psi(-0)`.
    pub eta: C64,
    pub c_plus: C64,
    pub c_minus: C64,
    pub branch: Branch,
}

impl BoundState {
    /// Wavefunction value. At `x = 0` the left limit `c_minus` is returned.
    pub fn eval(&self, x: f64) -> C64 {
        if x > 0.0 {
            self.c_plus * (-self.kappa * x).exp()
        } else {
            self.c_minus * (self.kappa * x).exp()
        }
    }
}

/// Same as [`BoundState::eval`].
pub fn eval_bound_wavefunction(state: &BoundState, x: f64) -> C64 {
    state.eval(x)
}

/// Left-hand side of the bound-state condition at `kappa`.
pub fn bound_condition(params: &InteractionParams, kappa: f64) -> f64 {
    let m = params.mass();
    params.delta() * kappa * kappa + 2.0 * (params.alpha() + params.gamma()) * kappa * m + 4.0 * params.beta() * m * m
}

/// `eta = e^{i theta} (gamma + delta kappa / 2m)`.
pub fn jump_ratio(params: &InteractionParams, kappa: f64) -> C64 {
    params.phase() * (params.gamma() + params.delta() * kappa / (2.0 * params.mass()))
}

/// `eta = -e^{i theta} (alpha + 2 beta m / kappa)`; equals [`jump_ratio`] on a root.
pub fn jump_ratio_alt(params: &InteractionParams, kappa: f64) -> C64 {
    -params.phase() * (params.alpha() + 2.0 * params.beta() * params.mass() / kappa)
}

/// Real roots of `delta k^2 + 2 (alpha + gamma) k m + 4 beta m^2` with `k > KAPPA_CUTOFF`.
fn positive_roots(alpha: f64, beta: f64, gamma: f64, delta: f64, mass: f64) -> Vec<(f64, Branch)> {
    let trace = alpha + gamma;
    let mut roots = Vec::with_capacity(2);
    if delta != 0.0 {
        // Discriminant (alpha - gamma)^2 + 4 > 0: always two distinct real roots.
        let s = ((alpha - gamma).powi(2) + 4.0).sqrt();
        // The root without cancellation first, the other from the product 4 beta m^2 / delta.
        let (q, q_branch, other_branch) = if trace >= 0.0 {
            (-trace - s, Branch::Minus, Branch::Plus)
        } else {
            (-trace + s, Branch::Plus, Branch::Minus)
        };
        let k1 = mass * q / delta;
        let k2 = 4.0 * beta * mass / q;
        roots.push((k1, q_branch));
        roots.push((k2, other_branch));
    } else if trace != 0.0 {
        roots.push((-2.0 * beta * mass / trace, Branch::Single));
    }
    roots.retain(|&(k, _)| k > KAPPA_CUTOFF);
    roots
}

/// All bound states, lowest energy first.
pub fn bound_spectrum(params: &InteractionParams) -> Vec<BoundState> {
    let m = params.mass();
    let mut states: Vec<BoundState> = positive_roots(params.alpha(), params.beta(), params.gamma(), params.delta(), m)
        .into_iter()
        .map(|(kappa, branch)| {
            let eta = jump_ratio(params, kappa);
            BoundState {
                kappa,
                energy: -kappa * kappa / (2.0 * m),
                eta,
                c_plus: eta,
                c_minus: C64::new(1.0, 0.0),
                branch,
            }
        })
        .collect();
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    states
}

/// `conj(a.C+) b.C+ + conj(a.C-) b.C-`; zero for the two levels of one interaction.
pub fn orthogonality_sum(a: &BoundState, b: &BoundState) -> C64 {
    a.c_plus.conj() * b.c_plus + a.c_minus.conj() * b.c_minus
}

/// Number of bound states on the `(alpha, gamma)` plane at fixed `delta`.
///
/// For `delta != 0`, `beta = (alpha gamma - 1) / delta`. For `delta = 0` the
/// slice only exists on `alpha gamma = 1` and `beta` must be supplied.
/// The count does not depend on the mass.
pub fn phase_diagram_count(alpha: f64, gamma: f64, delta: f64, beta: Option<f64>) -> Result<usize> {
    let beta = if delta != 0.0 {
        (alpha * gamma - 1.0) / delta
    } else {
        if (alpha * gamma - 1.0).abs() > crate::interaction::CONSTRAINT_TOL {
            return Err(Error::InvalidSlice(format!(
                "delta = 0 requires alpha*gamma = 1, got {}",
                alpha * gamma
            )));
        }
        beta.ok_or_else(|| Error::InvalidSlice("delta = 0 requires beta".into()))?
    };
    Ok(positive_roots(alpha, beta, gamma, delta, 0.5).len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub alpha: f64,
    pub gamma: f64,
    pub count: usize,
}

/// Counts over the `alphas x gammas` grid in row-major order (alpha outer).
pub fn phase_diagram_grid(alphas: &[f64], gammas: &[f64], delta: f64) -> Result<Vec<PhaseCell>> {
    alphas
        .par_iter()
        .flat_map_iter(|&alpha| {
            gammas.iter().map(move |&gamma| {
                phase_diagram_count(alpha, gamma, delta, None).map(|count| PhaseCell { alpha, gamma, count })
            })
        })
        .collect()
}

/// Grid indices `(i, j)` whose count differs from the cell at `(i + 1, j)` or `(i, j + 1)`.
pub fn count_transitions(cells: &[PhaseCell], n_gamma: usize) -> Vec<(usize, usize)> {
    if n_gamma == 0 {
        return Vec::new();
    }
    let n_alpha = cells.len() / n_gamma;
    let at = |i: usize, j: usize| cells[i * n_gamma + j].count;
    let mut out = Vec::new();
    for i in 0..n_alpha {
        for j in 0..n_gamma {
            let right = j + 1 < n_gamma && at(i, j) != at(i, j + 1);
            let down = i + 1 < n_alpha && at(i, j) != at(i + 1, j);
            if right || down {
                out.push((i, j));
            }
        }
    }
    out
}
