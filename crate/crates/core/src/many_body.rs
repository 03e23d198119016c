//! N equal-mass particles with the same point interaction in every pair.
//!
//! In each of the `N!` orderings the bound state is a single exponential
//! `C_nu exp(-kappa sum_{i<j} |x_i - x_j| / sqrt 2)` with the pair decay
//! constant `kappa`. Crossing a pair hyperplane multiplies the coefficient by
//! the pair jump ratio `eta` or its inverse, so the coefficients split by
//! permutation parity: `C_even = 1`, `C_odd = 1 / eta`. The energy is
//! `E = -kappa^2 N (N^2 - 1) / (12 m)`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interaction::InteractionParams;
use crate::one_body::{bound_spectrum, Branch};
use crate::C64;

/// Separations below this count as coincident particles.
pub const COINCIDENCE_TOL: f64 = 1e-14;

/// Largest `N` accepted by [`nbody_bound_states`].
pub const DEFAULT_MAX_PARTICLES: usize = 8;

/// Largest `N` for which [`NBodyBoundState::coefficient_table`] materializes all orderings.
pub const MAX_TABLE_PARTICLES: usize = 6;

/// Tolerance for classifying `eta` as `+1` or `-1`.
pub const SYMMETRY_TOL: f64 = 1e-12;

const SQRT_3: f64 = 1.732_050_807_568_877_2;
const SQRT_6: f64 = 2.449_489_742_783_178;

/// Three-body Jacobi coordinates; `z` is proportional to the centre of mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiCoords {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub fn jacobi_transform(x1: f64, x2: f64, x3: f64) -> JacobiCoords {
    JacobiCoords {
        x: (x1 - x2) / SQRT_2,
        y: (2.0f64 / 3.0).sqrt() * ((x1 + x2) / 2.0 - x3),
        z: (x1 + x2 + x3) / SQRT_3,
    }
}

impl JacobiCoords {
    /// Inverse of [`jacobi_transform`] (the map is orthogonal).
    pub fn to_cartesian(&self) -> [f64; 3] {
        let (x, y, z) = (self.x, self.y, self.z);
        [
            x / SQRT_2 + y / SQRT_6 + z / SQRT_3,
            -x / SQRT_2 + y / SQRT_6 + z / SQRT_3,
            -2.0 * y / SQRT_6 + z / SQRT_3,
        ]
    }

    /// `(x - sqrt3 y) / 2`, equal to `-x23`.
    pub fn minus_x23(&self) -> f64 {
        (self.x - SQRT_3 * self.y) / 2.0
    }

    /// `(x + sqrt3 y) / 2`, equal to `-x31`.
    pub fn minus_x31(&self) -> f64 {
        (self.x + SQRT_3 * self.y) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// One ordering of the particles on the line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    /// 1-based particle labels from the largest coordinate to the smallest.
    pub ordering: Vec<usize>,
    pub parity: Parity,
}

fn inversion_parity(ordering: &[usize]) -> Parity {
    let mut inversions = 0usize;
    for (a, &p) in ordering.iter().enumerate() {
        inversions += ordering[a + 1..].iter().filter(|&&q| q < p).count();
    }
    if inversions % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

impl Configuration {
    pub fn identity(n: usize) -> Self {
        Self {
            ordering: (1..=n).collect(),
            parity: Parity::Even,
        }
    }

    pub fn from_ordering(ordering: Vec<usize>) -> Result<Self> {
        let n = ordering.len();
        let mut seen = vec![false; n];
        for &p in &ordering {
            if p == 0 || p > n || std::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::InvalidArgument(format!(
                    "{ordering:?} is not a permutation of 1..={n}"
                )));
            }
        }
        let parity = inversion_parity(&ordering);
        Ok(Self { ordering, parity })
    }

    pub fn n(&self) -> usize {
        self.ordering.len()
    }

    /// Swaps the particles in slots `slot` and `slot + 1`.
    pub fn transpose_adjacent(&mut self, slot: usize) {
        self.ordering.swap(slot, slot + 1);
        self.parity = self.parity.flip();
    }

    /// Signs of `(x12, x23, x31)` for three particles.
    pub fn sign_pattern(&self) -> Option<[bool; 3]> {
        if self.n() != 3 {
            return None;
        }
        let mut rank = [0usize; 3];
        for (slot, &p) in self.ordering.iter().enumerate() {
            rank[p - 1] = slot;
        }
        // particle i is above particle j when its slot is smaller
        let above = |i: usize, j: usize| rank[i - 1] < rank[j - 1];
        Some([above(1, 2), above(2, 3), above(3, 1)])
    }

    /// Region label 1..=6 for three particles, counted around the plane from `(++-)`.
    pub fn region(&self) -> Option<u8> {
        let label = match self.sign_pattern()? {
            [true, true, false] => 1,
            [false, true, false] => 2,
            [false, true, true] => 3,
            [false, false, true] => 4,
            [true, false, true] => 5,
            [true, false, false] => 6,
            _ => unreachable!("(+++) and (---) are not orderings"),
        };
        Some(label)
    }
}

fn check_distinct(coords: &[f64], skip: Option<(usize, usize)>) -> Result<()> {
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            if skip == Some((i, j)) {
                continue;
            }
            if (coords[i] - coords[j]).abs() < COINCIDENCE_TOL {
                return Err(Error::OnBoundary { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(())
}

/// Ordering of a point with pairwise-distinct coordinates.
pub fn configuration_of(coords: &[f64]) -> Result<Configuration> {
    check_distinct(coords, None)?;
    let mut labels: Vec<usize> = (1..=coords.len()).collect();
    labels.sort_by(|&a, &b| coords[b - 1].total_cmp(&coords[a - 1]));
    Configuration::from_ordering(labels)
}

/// Ordering on one side of the hyperplane `x_i = x_j` (1-based labels).
///
/// `i_above` selects the side where particle `i` is to the right of `j`.
/// Any other coincidence is still an error.
pub fn configuration_beside(coords: &[f64], i: usize, j: usize, i_above: bool) -> Result<Configuration> {
    let n = coords.len();
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::InvalidArgument(format!("bad pair ({i}, {j}) for {n} particles")));
    }
    let (lo, hi) = (i.min(j) - 1, i.max(j) - 1);
    check_distinct(coords, Some((lo, hi)))?;
    let key = |p: usize| -> (f64, i8) {
        let tiebreak = if p == i {
            if i_above {
                1
            } else {
                -1
            }
        } else if p == j {
            if i_above {
                -1
            } else {
                1
            }
        } else {
            0
        };
        let x = if p == j { coords[i - 1] } else { coords[p - 1] };
        (x, tiebreak)
    };
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.sort_by(|&a, &b| {
        let (xa, ta) = key(a);
        let (xb, tb) = key(b);
        xb.total_cmp(&xa).then(tb.cmp(&ta))
    });
    Configuration::from_ordering(labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Symmetric,
    Antisymmetric,
    None,
}

/// An N-body bound state; coefficients are stored as the parity pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NBodyBoundState {
    pub n: usize,
    pub mass: f64,
    pub kappa: f64,
    pub energy: f64,
    pub eta: C64,
    pub c_even: C64,
    pub c_odd: C64,
    pub branch: Branch,
}

/// `N (N^2 - 1) / 12`.
pub fn energy_factor(n: usize) -> f64 {
    let n = n as f64;
    n * (n * n - 1.0) / 12.0
}

/// `-kappa^2 N (N^2 - 1) / (12 m)`.
pub fn nbody_energy(kappa: f64, mass: f64, n: usize) -> f64 {
    -kappa * kappa * energy_factor(n) / mass
}

/// `-kappa sum_{i<j} |x_i - x_j| / sqrt 2`.
pub fn pair_exponent(kappa: f64, coords: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (a, &xa) in coords.iter().enumerate() {
        for &xb in &coords[a + 1..] {
            sum += (xa - xb).abs();
        }
    }
    -kappa * sum / SQRT_2
}

impl NBodyBoundState {
    pub fn coefficient(&self, config: &Configuration) -> C64 {
        match config.parity {
            Parity::Even => self.c_even,
            Parity::Odd => self.c_odd,
        }
    }

    /// Every ordering with its coefficient, lexicographic in the ordering.
    pub fn coefficient_table(&self) -> Result<Vec<(Configuration, C64)>> {
        use itertools::Itertools;
        if self.n > MAX_TABLE_PARTICLES {
            return Err(Error::InvalidArgument(format!(
                "coefficient table limited to N <= {MAX_TABLE_PARTICLES}, got {}",
                self.n
            )));
        }
        (1..=self.n)
            .permutations(self.n)
            .map(|ordering| {
                let config = Configuration::from_ordering(ordering)?;
                let c = self.coefficient(&config);
                Ok((config, c))
            })
            .collect()
    }

    fn check_len(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.n,
                coords.len()
            )));
        }
        Ok(())
    }

    /// Unnormalized wavefunction at a point off every pair hyperplane.
    pub fn eval(&self, coords: &[f64]) -> Result<C64> {
        self.check_len(coords)?;
        let config = configuration_of(coords)?;
        Ok(self.coefficient(&config) * pair_exponent(self.kappa, coords).exp())
    }

    /// One-sided limit onto the hyperplane `x_i = x_j` from the side where
    /// particle `i` is above (`i_above = true`) or below particle `j`.
    pub fn eval_one_sided(&self, coords: &[f64], i: usize, j: usize, i_above: bool) -> Result<C64> {
        self.check_len(coords)?;
        let config = configuration_beside(coords, i, j, i_above)?;
        Ok(self.coefficient(&config) * pair_exponent(self.kappa, coords).exp())
    }

    pub fn symmetry(&self) -> SymmetryClass {
        symmetry_class(self)
    }
}

/// Same as [`NBodyBoundState::eval`].
pub fn eval_nbody_wavefunction(state: &NBodyBoundState, coords: &[f64]) -> Result<C64> {
    state.eval(coords)
}

/// Bound states of `n` particles, lowest energy first.
///
/// One state per pair bound state, with the same `kappa`. The excited level is
/// assumed to stay above the ground level for every parameter value (no
/// level crossing); nothing here proves the list is complete.
pub fn nbody_bound_states(params: &InteractionParams, n: usize) -> Result<Vec<NBodyBoundState>> {
    nbody_bound_states_capped(params, n, DEFAULT_MAX_PARTICLES)
}

pub fn nbody_bound_states_capped(params: &InteractionParams, n: usize, cap: usize) -> Result<Vec<NBodyBoundState>> {
    if n < 2 || n > cap {
        return Err(Error::InvalidArgument(format!(
            "particle number must be in 2..={cap}, got {n}"
        )));
    }
    let one = C64::new(1.0, 0.0);
    Ok(bound_spectrum(params)
        .into_iter()
        .map(|s| NBodyBoundState {
            n,
            mass: params.mass(),
            kappa: s.kappa,
            energy: nbody_energy(s.kappa, params.mass(), n),
            eta: s.eta,
            c_even: one,
            c_odd: one / s.eta,
            branch: s.branch,
        })
        .collect())
}

/// Symmetric when `eta = 1`, antisymmetric when `eta = -1`, within [`SYMMETRY_TOL`].
pub fn symmetry_class(state: &NBodyBoundState) -> SymmetryClass {
    if (state.eta - 1.0).norm() <= SYMMETRY_TOL {
        SymmetryClass::Symmetric
    } else if (state.eta + 1.0).norm() <= SYMMETRY_TOL {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::None
    }
}

/// How the coefficient changes when a walk swaps two neighbouring particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingRule {
    /// The even ordering is always on the positive side of the crossed pair:
    /// entering an odd ordering multiplies by `1/eta`, entering an even one by `eta`.
    EvenSidePositive,
    /// Each pair has one fixed coordinate `x_ij = (x_i - x_j)/sqrt 2`, oriented
    /// `i -> j` when `j - i` is odd and `j -> i` otherwise (for three particles:
    /// `x12`, `x23`, `x31`). Going from `x_ij > 0` to `x_ij < 0` multiplies by `1/eta`.
    FixedPairs,
}

/// Whether the fixed orientation of the pair `{a, b}` runs from `a` to `b`.
fn fixed_orientation(a: usize, b: usize) -> bool {
    let (lo, hi) = (a.min(b), a.max(b));
    let lo_first = (hi - lo) % 2 == 1;
    lo_first == (a == lo)
}

/// Walks from the identity ordering through the given adjacent swaps
/// (slot indices), tracking the coefficient from `C_identity = 1`.
pub fn walk_coefficient(eta: C64, n: usize, swaps: &[usize], rule: CrossingRule) -> Result<(Configuration, C64)> {
    let mut config = Configuration::identity(n);
    let mut c = C64::new(1.0, 0.0);
    for &slot in swaps {
        if slot + 1 >= n {
            return Err(Error::InvalidArgument(format!(
                "slot {slot} out of range for {n} particles"
            )));
        }
        let before_upper = config.ordering[slot];
        let before_lower = config.ordering[slot + 1];
        let leaving_positive = match rule {
            CrossingRule::EvenSidePositive => config.parity == Parity::Even,
            // before the swap `before_upper` is to the right of `before_lower`
            CrossingRule::FixedPairs => fixed_orientation(before_upper, before_lower),
        };
        c = if leaving_positive { c / eta } else { c * eta };
        config.transpose_adjacent(slot);
    }
    Ok((config, c))
}

/// Delta-function reference values in terms of the true pair strength `g0`
/// of `V(x_i - x_j) = g0 delta(x_i - x_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McGuireReference {
    pub g0: f64,
    pub mass: f64,
    pub n: usize,
    pub kappa: f64,
    pub energy: f64,
}

/// `kappa = -g0 m / sqrt 2`, `E = -g0^2 m N (N^2 - 1) / 24`.
pub fn mcguire_reference(g0: f64, mass: f64, n: usize) -> Result<McGuireReference> {
    if !(g0 < 0.0) {
        return Err(Error::NonBinding(g0));
    }
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least two particles, got {n}")));
    }
    let nf = n as f64;
    Ok(McGuireReference {
        g0,
        mass,
        n,
        kappa: -g0 * mass / SQRT_2,
        energy: -g0 * g0 * mass * nf * (nf * nf - 1.0) / 24.0,
    })
}

/// Strength `g` of the delta in the scaled relative coordinate: `g0 / sqrt 2`.
pub fn relative_strength(g0: f64) -> f64 {
    g0 / SQRT_2
}

/// `g0` from McGuire's coupling (his units have `m = 1`): `g0 = -g_MG / sqrt 2`.
pub fn g0_from_mcguire(g_mg: f64) -> f64 {
    -g_mg / SQRT_2
}

/// `g0` from the coupling of the `m = 1/2` convention: `g0 = -g_CD`.
pub fn g0_from_cd(g_cd: f64) -> f64 {
    -g_cd
}
