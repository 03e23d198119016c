//! Brute-force oracles for the closed forms.
//!
//! Everything here works from the boundary condition itself (through
//! [`InteractionParams::apply_boundary`] and [`InteractionParams::boundary_matrix`])
//! and from the raw data of a state. Nothing calls the formula it is checking.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::InteractionParams;
use crate::many_body::NBodyBoundState;
use crate::C64;

/// Default tolerance of [`boundary_residual_3body`].
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Default tolerance of [`interior_residual`].
pub const INTERIOR_TOL: f64 = 1e-6;

/// Default finite-difference step in units of `1/kappa`.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Lower end of the bracketing interval for bound-state roots.
const KAPPA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check_name: String,
    pub max_residual: f64,
    pub samples: usize,
    pub passed: bool,
    pub tolerance: f64,
}

impl ResidualReport {
    pub fn new(check_name: impl Into<String>, max_residual: f64, samples: usize, tolerance: f64) -> Self {
        Self {
            check_name: check_name.into(),
            max_residual,
            samples,
            // NaN never passes
            passed: max_residual <= tolerance,
            tolerance,
        }
    }
}

/// Real part of `e^{-i theta} (psi'(+0) + kappa psi(+0))` for left limits `(kappa, 1)`:
/// zero exactly when `e^{-kappa |x|}`-type tails on both sides are compatible.
fn bound_mismatch(params: &InteractionParams, kappa: f64) -> f64 {
    let (dp, v) = params.apply_boundary(C64::new(kappa, 0.0), C64::new(1.0, 0.0));
    ((dp + kappa * v) * params.phase().conj()).re
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Positive bound-state decay constants found by sign-change bracketing.
pub fn oracle_bound_kappas(params: &InteractionParams) -> Vec<f64> {
    let f = |k: f64| bound_mismatch(params, k);
    let (alpha, beta, gamma, delta, m) = (
        params.alpha(),
        params.beta(),
        params.gamma(),
        params.delta(),
        params.mass(),
    );
    if delta == 0.0 {
        // the mismatch is affine in kappa
        let f0 = f(0.0);
        let slope = f(1.0) - f0;
        if slope == 0.0 {
            return Vec::new();
        }
        let k = -f0 / slope;
        return if k > KAPPA_FLOOR { vec![k] } else { Vec::new() };
    }
    let nominal =
        2.0 * (1.0 + (alpha + gamma).abs() * 2.0 * m + (4.0 * beta.abs()).sqrt() * 2.0 * m) / delta.abs().max(1e-30);
    let cauchy = 1.0
        + (2.0 * (alpha + gamma) * m / delta)
            .abs()
            .max((4.0 * beta * m * m / delta).abs());
    let k_max = 1.01 * nominal.max(cauchy);

    const N: usize = 4000;
    let mut grid: Vec<f64> = (0..=N)
        .flat_map(|i| {
            let t = i as f64 / N as f64;
            [
                KAPPA_FLOOR + (k_max - KAPPA_FLOOR) * t,
                KAPPA_FLOOR * (k_max / KAPPA_FLOOR).powf(t),
            ]
        })
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut roots = Vec::new();
    let mut prev = (grid[0], f(grid[0]));
    for &k in &grid[1..] {
        let fk = f(k);
        if fk == 0.0 {
            roots.push(k);
        } else if prev.1 != 0.0 && (prev.1 > 0.0) != (fk > 0.0) {
            roots.push(bisect(f, prev.0, k));
        }
        prev = (k, fk);
    }
    roots
}

/// Direction the incident wave comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Incidence {
    /// From `x > 0`, travelling left.
    Plus,
    /// From `x < 0`, travelling right.
    Minus,
}

fn solve2(a: [[C64; 2]; 2], b: [C64; 2], k: f64) -> Result<(C64, C64)> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.norm() < 1e-300 || !det.is_finite() {
        return Err(Error::SingularSystem { k });
    }
    let x0 = (b[0] * a[1][1] - a[0][1] * b[1]) / det;
    let x1 = (a[0][0] * b[1] - b[0] * a[1][0]) / det;
    Ok((x0, x1))
}

/// Solves the plane-wave matching problem directly: returns `(t, r)`.
pub fn scattering_matching_oracle(params: &InteractionParams, k: f64, incidence: Incidence) -> Result<(C64, C64)> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveWavenumber(k));
    }
    let u = params.boundary_matrix().entries;
    let two_m = C64::new(2.0 * params.mass(), 0.0);
    let ik = C64::new(0.0, k);
    match incidence {
        Incidence::Minus => {
            // left: e^{ikx} + r e^{-ikx}; right: t e^{ikx}
            // psi(-0) = 1 + r, psi'(-0) = ik (1 - r), psi(+0) = t, psi'(+0) = ik t
            let a = [
                [ik, u[0][0] * ik - u[0][1] * two_m],
                [two_m, u[1][0] * ik - u[1][1] * two_m],
            ];
            let b = [u[0][0] * ik + u[0][1] * two_m, u[1][0] * ik + u[1][1] * two_m];
            solve2(a, b, k)
        }
        Incidence::Plus => {
            // right: e^{-ikx} + r e^{ikx}; left: t e^{-ikx}
            // psi(+0) = 1 + r, psi'(+0) = -ik (1 - r), psi(-0) = t, psi'(-0) = -ik t
            let a = [
                [-u[0][0] * ik + u[0][1] * two_m, -ik],
                [-u[1][0] * ik + u[1][1] * two_m, -two_m],
            ];
            let b = [-ik, two_m];
            solve2(a, b, k)
        }
    }
}

/// The three pair lines of the three-body plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairLine {
    X12,
    X23,
    X31,
}

impl PairLine {
    pub const ALL: [PairLine; 3] = [PairLine::X12, PairLine::X23, PairLine::X31];

    /// `(i, j, k)`: the line is `x_i = x_j`, positive side `x_i > x_j`, third particle `k`.
    /// Labels are 0-based.
    fn particles(self) -> (usize, usize, usize) {
        match self {
            PairLine::X12 => (0, 1, 2),
            PairLine::X23 => (1, 2, 0),
            PairLine::X31 => (2, 0, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PairLine::X12 => "x12",
            PairLine::X23 => "x23",
            PairLine::X31 => "x31",
        }
    }
}

/// `sign(x_a - x_b)`, with the tie on `pair` resolved so that its first member is above
/// when `first_above` holds.
fn pair_sign(coords: &[f64], a: usize, b: usize, tie: Option<((usize, usize), bool)>) -> f64 {
    if let Some(((i, j), first_above)) = tie {
        if (a, b) == (i, j) {
            return if first_above { 1.0 } else { -1.0 };
        }
        if (a, b) == (j, i) {
            return if first_above { -1.0 } else { 1.0 };
        }
    }
    (coords[a] - coords[b]).signum()
}

/// Value and gradient of `C exp(-kappa sum |x_a - x_b| / sqrt2)` from the raw state data.
fn state_value_and_gradient(
    state: &NBodyBoundState,
    coords: &[f64],
    tie: Option<((usize, usize), bool)>,
) -> (C64, Vec<C64>) {
    let n = coords.len();
    // parity of the ordering: number of pairs a < b with particle a below particle b
    let mut below = 0usize;
    let mut sum = 0.0;
    let mut grad = vec![0.0; n];
    for a in 0..n {
        for b in a + 1..n {
            let s = pair_sign(coords, a, b, tie);
            if s < 0.0 {
                below += 1;
            }
            sum += (coords[a] - coords[b]).abs();
            grad[a] += s;
            grad[b] -= s;
        }
    }
    let c = if below % 2 == 0 { state.c_even } else { state.c_odd };
    let value = c * (-state.kappa * sum / SQRT_2).exp();
    let scale = -state.kappa / SQRT_2;
    let gradient = grad.into_iter().map(|g| value * (scale * g)).collect();
    (value, gradient)
}

/// Checks the boundary condition across one pair line of a three-body state.
///
/// Sample points lie on the line with the centre of mass at the origin, at
/// transverse distances between `0.5/kappa` and `5/kappa` from the triple
/// point on both half-lines. The normal coordinate is `x_ij`, increasing from
/// the `x_i < x_j` side to the `x_i > x_j` side. The residual is the larger of
/// `|psi(+0) - predicted| / |psi|` and `|psi'(+0) - predicted'| / (kappa |psi|)`.
pub fn boundary_residual_3body(
    params: &InteractionParams,
    state: &NBodyBoundState,
    line: PairLine,
    samples: usize,
) -> ResidualReport {
    let name = format!("nbody-boundary/{}", line.name());
    if state.n != 3 || samples == 0 {
        return ResidualReport::new(name, f64::NAN, samples, BOUNDARY_TOL);
    }
    let (i, j, k) = line.particles();
    // unit normal along which x_ij grows at unit rate
    let mut normal = [0.0; 3];
    normal[i] = 1.0 / SQRT_2;
    normal[j] = -1.0 / SQRT_2;

    let kappa = state.kappa;
    let mut worst: f64 = 0.0;
    for s in 0..samples {
        let half = samples.div_ceil(2);
        let (sign, idx, count) = if s < half {
            (1.0, s, half)
        } else {
            (-1.0, s - half, samples - half)
        };
        let frac = if count > 1 {
            idx as f64 / (count - 1) as f64
        } else {
            0.5
        };
        let distance = (0.5 + 4.5 * frac) / kappa;
        let u = sign * distance / 6f64.sqrt();
        let mut coords = [0.0; 3];
        coords[i] = u;
        coords[j] = u;
        coords[k] = -2.0 * u;

        let normal_derivative = |grad: &[C64]| grad.iter().zip(normal).map(|(g, n)| g * n).sum::<C64>();
        let (v_minus, g_minus) = state_value_and_gradient(state, &coords, Some(((i, j), false)));
        let (v_plus, g_plus) = state_value_and_gradient(state, &coords, Some(((i, j), true)));
        let (dp_pred, v_pred) = params.apply_boundary(normal_derivative(&g_minus), v_minus);
        let scale = v_plus.norm().max(v_minus.norm());
        let r_value = (v_plus - v_pred).norm() / scale;
        let r_deriv = (normal_derivative(&g_plus) - dp_pred).norm() / (kappa * scale);
        worst = worst.max(r_value).max(r_deriv);
    }
    ResidualReport::new(name, worst, samples, BOUNDARY_TOL)
}

/// Checks `-(1/2m) sum_a d^2 psi / dx_a^2 = E psi` by central differences at
/// random interior points, with step `h` (in units of `1/kappa`).
///
/// Points have coordinates uniform in `[-1.5/kappa, 1.5/kappa]` and every
/// pair separated by at least `10 h`. The residual is relative to `|E psi|`.
pub fn interior_residual<R: Rng + ?Sized>(
    state: &NBodyBoundState,
    points: usize,
    h: f64,
    rng: &mut R,
) -> ResidualReport {
    let name = format!("nbody-interior/n{}", state.n);
    let step = h / state.kappa;
    let spread = 1.5 / state.kappa;
    let n = state.n;
    let value = |x: &[f64]| state_value_and_gradient(state, x, None).0;

    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    while accepted < points {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-spread..spread)).collect();
        let separated = (0..n).all(|a| (a + 1..n).all(|b| (x[a] - x[b]).abs() >= 10.0 * step));
        if !separated {
            continue;
        }
        accepted += 1;
        let centre = value(&x);
        let mut laplacian = C64::new(0.0, 0.0);
        let mut y = x.clone();
        for a in 0..n {
            y[a] = x[a] + step;
            let fwd = value(&y);
            y[a] = x[a] - step;
            let bwd = value(&y);
            y[a] = x[a];
            laplacian += (fwd - 2.0 * centre + bwd) / (step * step);
        }
        let lhs = -laplacian / (2.0 * state.mass);
        let rhs = centre * state.energy;
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    ResidualReport::new(name, worst, points, INTERIOR_TOL)
}

/// `∫ conj(psi_a) psi_b` over the relative coordinate `x = (x1 - x2)/sqrt2` in
/// `[-length, length]`, composite Simpson on each side of the contact point.
pub fn two_body_overlap(a: &NBodyBoundState, b: &NBodyBoundState, length: f64, intervals: usize) -> C64 {
    let intervals = intervals + intervals % 2;
    let integrand = |x: f64, side_positive: bool| {
        let coords = [x / SQRT_2, -x / SQRT_2];
        let tie = Some(((0, 1), side_positive));
        let va = state_value_and_gradient(a, &coords, tie).0;
        let vb = state_value_and_gradient(b, &coords, tie).0;
        va.conj() * vb
    };
    let simpson = |lo: f64, hi: f64, positive: bool| {
        let h = (hi - lo) / intervals as f64;
        let mut acc = integrand(lo, positive) + integrand(hi, positive);
        for s in 1..intervals {
            let w = if s % 2 == 1 { 4.0 } else { 2.0 };
            acc += integrand(lo + s as f64 * h, positive) * w;
        }
        acc * h / 3.0
    };
    simpson(-length, 0.0, false) + simpson(0.0, length, true)
}

/// One random valid parameter set.
///
/// `alpha`, `gamma`, `delta` uniform in `[-3, 3]`, `theta` in `[0, 2 pi)`,
/// `m` in `[0.2, 2]`. When `|delta| > 0.1`, `beta = (alpha gamma - 1) / delta`;
/// otherwise `delta = 0`, `gamma = 1 / alpha` and `beta` is uniform in `[-3, 3]`.
pub fn sample_params<R: Rng + ?Sized>(rng: &mut R) -> InteractionParams {
    loop {
        let alpha: f64 = rng.gen_range(-3.0..3.0);
        let gamma: f64 = rng.gen_range(-3.0..3.0);
        let delta: f64 = rng.gen_range(-3.0..3.0);
        let theta = rng.gen_range(0.0..2.0 * PI);
        let mass = rng.gen_range(0.2..2.0);
        let candidate = if delta.abs() > 0.1 {
            InteractionParams::new(alpha, (alpha * gamma - 1.0) / delta, gamma, delta, theta, mass)
        } else {
            if alpha.abs() < 1e-3 {
                continue;
            }
            InteractionParams::new(alpha, rng.gen_range(-3.0..3.0), 1.0 / alpha, 0.0, theta, mass)
        };
        if let Ok(p) = candidate {
            return p;
        }
    }
}

/// A random parameter set with two bound states: `alpha = gamma < -1`, `delta > 0`.
pub fn sample_two_level_params<R: Rng + ?Sized>(rng: &mut R) -> InteractionParams {
    let alpha: f64 = rng.gen_range(-3.0..-1.1);
    let delta: f64 = rng.gen_range(0.2..3.0);
    let theta = rng.gen_range(0.0..2.0 * PI);
    let mass = rng.gen_range(0.2..2.0);
    InteractionParams::new(alpha, (alpha * alpha - 1.0) / delta, alpha, delta, theta, mass)
        .expect("beta from the constraint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::InteractionKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(kappa: f64, eta: C64, n: usize, mass: f64) -> NBodyBoundState {
        NBodyBoundState {
            n,
            mass,
            kappa,
            energy: -kappa * kappa * (n * (n * n - 1)) as f64 / (12.0 * mass),
            eta,
            c_even: C64::new(1.0, 0.0),
            c_odd: 1.0 / eta,
            branch: crate::one_body::Branch::Single,
        }
    }

    #[test]
    fn oracle_roots() {
        let d = InteractionParams::canonical(InteractionKind::Delta, -2.0, 0.5).unwrap();
        let r = oracle_bound_kappas(&d);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-12);

        let p = InteractionParams::new(-2.0, 3.0, -2.0, 1.0, 0.0, 0.5).unwrap();
        let r = oracle_bound_kappas(&p);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 3.0).abs() < 1e-12);

        let p = InteractionParams::new(2.0, 3.0, 2.0, 1.0, 0.0, 0.5).unwrap();
        assert!(oracle_bound_kappas(&p).is_empty());
    }

    #[test]
    fn oracle_handles_large_delta() {
        // roots ~ +-0.1005: just beyond the nominal bracket of 0.1
        let p = InteractionParams::new(10.0, -1.01, -10.0, 100.0, 0.0, 0.5).unwrap();
        let r = oracle_bound_kappas(&p);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 404f64.sqrt() / 200.0).abs() < 1e-12);
    }

    #[test]
    fn matching_free_particle_and_delta() {
        let free = InteractionParams::new(1.0, 0.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        for inc in [Incidence::Plus, Incidence::Minus] {
            for k in [0.1, 1.0, 7.0] {
                let (t, r) = scattering_matching_oracle(&free, k, inc).unwrap();
                assert!((t - 1.0).norm() < 1e-15 && r.norm() < 1e-15);
            }
        }
        let d = InteractionParams::canonical(InteractionKind::Delta, -2.0, 0.5).unwrap();
        let (t, r) = scattering_matching_oracle(&d, 1.0, Incidence::Plus).unwrap();
        assert!((t - C64::new(0.5, 0.5)).norm() < 1e-15);
        assert!((r + 1.0 / C64::new(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn boundary_oracle_flags_corruption() {
        let p = InteractionParams::new(-2.0, 3.0, -2.0, 1.0, 0.0, 0.5).unwrap();
        let good = state(1.0, C64::new(-1.0, 0.0), 3, 0.5);
        for line in PairLine::ALL {
            let rep = boundary_residual_3body(&p, &good, line, 50);
            assert!(rep.passed, "{rep:?}");
        }
        let bad = NBodyBoundState {
            c_odd: good.c_odd * 1.1,
            ..good
        };
        let rep = boundary_residual_3body(&p, &bad, PairLine::X12, 50);
        assert!(!rep.passed && rep.max_residual > 1e-2);
        // wrong particle number is never a pass
        assert!(!boundary_residual_3body(&p, &state(1.0, C64::new(1.0, 0.0), 2, 0.5), PairLine::X12, 5).passed);
    }

    #[test]
    fn interior_oracle_flags_wrong_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = state(1.3, C64::new(0.2, 0.9), 4, 0.7);
        assert!(interior_residual(&s, 50, DEFAULT_STEP, &mut rng).passed);
        let wrong = NBodyBoundState {
            energy: s.energy * 1.001,
            ..s
        };
        assert!(!interior_residual(&wrong, 50, DEFAULT_STEP, &mut rng).passed);
    }

    #[test]
    fn overlap_of_state_with_itself_is_positive() {
        let s = state(1.0, C64::new(1.0, 0.0), 2, 1.0);
        let o = two_body_overlap(&s, &s, 20.0, 20000);
        assert!((o.re - 1.0).abs() < 1e-8, "{o}");
    }

    #[test]
    fn sampled_params_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let p = sample_params(&mut rng);
            assert!(p.constraint_residual().abs() <= 1e-12);
            let q = sample_two_level_params(&mut rng);
            assert_eq!(oracle_bound_kappas(&q).len(), 2);
        }
    }
}
