//! Model parameters and the analytically solvable rotating-wave ladder.
//!
//! The full Hamiltonian splits into an excitation-conserving part, whose
//! dressed doublets are known in closed form, and a perturbation built from
//! the counter-rotating term (strength `g_r`) and the permanent-dipole
//! population coupling (strength `g_s`). This module owns the closed-form
//! part: energies, eigenvectors, manifold bookkeeping, and the scan for the
//! first ladder crossing as the coupling grows.

use crate::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Physical parameters, energies in units of the cavity frequency `omega_c`
/// (carried explicitly so dimensionful inputs also work).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    /// Cavity mode frequency.
    pub omega_c: f64,
    /// Emitter transition frequency.
    pub omega_a: f64,
    /// Excitation-exchange (rotating and counter-rotating) coupling.
    pub g_r: f64,
    /// Population coupling from the excited-state permanent dipole.
    pub g_s: f64,
    /// Population coupling from the ground-state permanent dipole.
    /// Only `0` is supported by the perturbative pipeline.
    pub g_s_prime: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega_c: 1.0,
            omega_a: 1.0,
            g_r: 0.0,
            g_s: 0.0,
            g_s_prime: 0.0,
        }
    }
}

impl ModelParams {
    /// Resonant parameters (`omega_a = omega_c = 1`).
    pub fn resonant(g_r: f64, g_s: f64) -> Self {
        Self {
            g_r,
            g_s,
            ..Self::default()
        }
    }

    /// Detuned parameters with `omega_c = 1`.
    pub fn detuned(omega_a: f64, g_r: f64, g_s: f64) -> Self {
        Self {
            omega_a,
            g_r,
            g_s,
            ..Self::default()
        }
    }

    /// Cavity-emitter detuning `omega_c - omega_a`.
    pub fn detuning(&self) -> f64 {
        self.omega_c - self.omega_a
    }

    /// Reject parameters the pipeline cannot handle.
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c.is_finite() && self.omega_c > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "omega_c must be finite and positive, got {}",
                self.omega_c
            )));
        }
        if !(self.omega_a.is_finite() && self.omega_a > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "omega_a must be finite and positive, got {}",
                self.omega_a
            )));
        }
        if !(self.g_r.is_finite() && self.g_r >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "g_r must be finite and non-negative, got {}",
                self.g_r
            )));
        }
        if !(self.g_s.is_finite() && self.g_s >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "g_s must be finite and non-negative, got {}",
                self.g_s
            )));
        }
        if self.g_s_prime != 0.0 {
            return Err(Error::UnsupportedParameter(format!(
                "ground-state population coupling g_s_prime = {} (only 0 is supported; \
                 shift the displaced-frame origin instead)",
                self.g_s_prime
            )));
        }
        Ok(())
    }
}

/// Upper or lower dressed branch of an excitation manifold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    /// `+1` or `-1` as a float.
    pub fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Plus => 1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Minus => Branch::Plus,
            Branch::Plus => Branch::Minus,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Minus => write!(f, "-"),
            Branch::Plus => write!(f, "+"),
        }
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            other => Err(Error::InvalidConfig(format!(
                "branch must be \"+\" or \"-\", got {other:?}"
            ))),
        }
    }
}

impl Serialize for Branch {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(match self {
            Branch::Minus => "-",
            Branch::Plus => "+",
        })
    }
}

impl<'de> Deserialize<'de> for Branch {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Branch::from_str(&s).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Label `(n, branch)` of a dressed state: `n` excitations, upper or lower
/// branch. Manifold `0` has a single state; its conventional branch label is
/// [`ground_branch`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateLabel {
    pub n: u32,
    #[serde(rename = "s")]
    pub branch: Branch,
}

impl StateLabel {
    pub fn new(n: u32, branch: Branch) -> Self {
        Self { n, branch }
    }

    /// Partner state in the same manifold.
    pub fn partner(self) -> Self {
        Self {
            n: self.n,
            branch: self.branch.flip(),
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.n, self.branch)
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (digits, branch) = s.split_at(s.len().saturating_sub(1));
        let branch: Branch = branch.parse()?;
        let n: u32 = digits.parse().map_err(|_| {
            Error::InvalidConfig(format!("state label must look like \"10+\", got {s:?}"))
        })?;
        Ok(Self { n, branch })
    }
}

/// Branch label conventionally assigned to the single `n = 0` state:
/// the sign of the detuning, `Minus` on resonance.
pub fn ground_branch(params: &ModelParams) -> Branch {
    if params.detuning() > 0.0 {
        Branch::Plus
    } else {
        Branch::Minus
    }
}

/// The dressed states of manifold `n`: one state for `n = 0`, a doublet
/// otherwise, lower branch first.
pub fn labels_of_manifold(n: u32, params: &ModelParams) -> Vec<StateLabel> {
    if n == 0 {
        vec![StateLabel::new(0, ground_branch(params))]
    } else {
        vec![
            StateLabel::new(n, Branch::Minus),
            StateLabel::new(n, Branch::Plus),
        ]
    }
}

/// Rotating-wave energy of a dressed state. The zero of energy sits halfway
/// between the two bare levels, so the `n = 0` state lies at `-omega_a / 2`.
pub fn jc_energy(label: StateLabel, params: &ModelParams) -> f64 {
    let n = label.n as f64;
    if label.n == 0 {
        return -params.omega_a / 2.0;
    }
    let d = params.detuning();
    let r = (d * d / 4.0 + n * params.g_r * params.g_r).sqrt();
    params.omega_c * (n - 0.5) + label.branch.sign() * r
}

/// Eigenvector `(a, b)` of a dressed state over the bare pair:
/// `a` multiplies the atom-ground state with `n` photons, `b` the
/// atom-excited state with `n - 1` photons. Normalized, with `b >= 0`.
///
/// The unnormalized ground-component `x = d/2 + s r` is rationalized to
/// `-n g^2 / (d/2 - s r)` on the branch where the two terms cancel, so the
/// decoupled limit `g = 0` yields an exact `(0, 1)` instead of rounding
/// noise. On resonance the degenerate `g = 0` doublet is fixed to the
/// symmetric/antisymmetric convention.
pub fn jc_eigenpair(label: StateLabel, params: &ModelParams) -> (f64, f64) {
    if label.n == 0 {
        return (1.0, 0.0);
    }
    let n = label.n as f64;
    let g = params.g_r;
    let s = label.branch.sign();
    let d = params.detuning();
    let r = (d * d / 4.0 + n * g * g).sqrt();
    let x = if s * d < 0.0 {
        -(n * g * g) / (d / 2.0 - s * r)
    } else {
        d / 2.0 + s * r
    };
    let k = g * n.sqrt();
    let nrm = x.hypot(k);
    if nrm == 0.0 {
        if d != 0.0 {
            return (0.0, 1.0);
        }
        return (s / std::f64::consts::SQRT_2, 1.0 / std::f64::consts::SQRT_2);
    }
    (x / nrm, k / nrm)
}

/// A coupling strength where two rotating-wave levels become degenerate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossingPoint {
    /// Coupling `g_r` at the crossing.
    pub g: f64,
    /// The two states that cross.
    pub a: StateLabel,
    pub b: StateLabel,
}

/// Scan `g_r` over `[g_min, g_max]` and return the first crossing between
/// any two ladder states of manifolds `0..=n_max`.
///
/// Energies are sampled on a uniform grid of `grid_points` values; each sign
/// change of a pairwise gap is refined by bisection to within `tol`. When
/// several pairs cross inside the same grid interval the smallest root wins.
pub fn jc_crossing_scan(
    params: &ModelParams,
    n_max: u32,
    g_min: f64,
    g_max: f64,
    grid_points: usize,
    tol: f64,
) -> Result<CrossingPoint> {
    if !(g_min.is_finite() && g_max.is_finite() && g_min >= 0.0 && g_max > g_min) {
        return Err(Error::InvalidConfig(format!(
            "crossing scan needs 0 <= g_min < g_max, got [{g_min}, {g_max}]"
        )));
    }
    if grid_points < 2 {
        return Err(Error::InvalidConfig(format!(
            "crossing scan needs at least 2 grid points, got {grid_points}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "crossing scan tolerance must be positive, got {tol}"
        )));
    }
    let mut labels = Vec::new();
    for n in 0..=n_max {
        labels.extend(labels_of_manifold(n, params));
    }
    let energies = |g: f64| -> Vec<f64> {
        let p = ModelParams { g_r: g, ..*params };
        labels.iter().map(|&l| jc_energy(l, &p)).collect()
    };
    let step = (g_max - g_min) / (grid_points - 1) as f64;
    let mut prev = energies(g_min);
    for i in 1..grid_points {
        let g_i = g_min + i as f64 * step;
        let cur = energies(g_i);
        let mut best: Option<CrossingPoint> = None;
        for a in 0..labels.len() {
            for b in (a + 1)..labels.len() {
                let d0 = prev[a] - prev[b];
                let d1 = cur[a] - cur[b];
                if d0 * d1 < 0.0 {
                    let (mut lo, mut hi) = (g_min + (i - 1) as f64 * step, g_i);
                    while hi - lo > tol {
                        let mid = 0.5 * (lo + hi);
                        let em = energies(mid);
                        let dm = em[a] - em[b];
                        if d0 * dm <= 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    let root = 0.5 * (lo + hi);
                    if best.as_ref().is_none_or(|c| root < c.g) {
                        best = Some(CrossingPoint {
                            g: root,
                            a: labels[a],
                            b: labels[b],
                        });
                    }
                }
            }
        }
        if let Some(c) = best {
            return Ok(c);
        }
        prev = cur;
    }
    Err(Error::NoCrossingFound { g_min, g_max })
}
