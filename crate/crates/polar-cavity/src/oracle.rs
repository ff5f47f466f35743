//! Exact diagonalization in a truncated Fock basis, used to validate the
//! perturbative pipeline.
//!
//! The full Hamiltonian, including the counter-rotating and population
//! couplings dropped from the rotating-wave ladder, is built in the product
//! basis `|atom, m photons>` with `m <= n_cutoff` and diagonalized densely.
//! Exact eigenstates are identified with ladder labels by maximum squared
//! overlap against the rotating-wave eigenvectors; the identification is
//! refused when two candidates are comparably good.

use crate::model::{jc_eigenpair, ModelParams, StateLabel};
use crate::perturbation::{energy_through_second_order, perturbed_state, PerturbedState};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Minimum overlap-squared margin between the best and second-best match
/// before the identification is considered unambiguous.
pub const MATCH_AMBIGUITY_TOL: f64 = 0.1;

/// Headroom (in manifolds) required between a matched state and the Fock
/// truncation, covering the `n + 4` reach of the second-order admixtures.
const CUTOFF_HEADROOM: u32 = 6;

/// Basis index of `|atom, m>`: photon-major, ground first.
fn idx(atom: usize, m: u32) -> usize {
    2 * m as usize + atom
}

/// Full Hamiltonian in the truncated product basis. Unlike the perturbative
/// pipeline this also accepts a nonzero ground-state population coupling.
pub fn build_hamiltonian(params: &ModelParams, n_cutoff: u32) -> DMatrix<f64> {
    let dim = 2 * (n_cutoff as usize + 1);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for m in 0..=n_cutoff {
        h[(idx(0, m), idx(0, m))] = params.omega_c * m as f64 - params.omega_a / 2.0;
        h[(idx(1, m), idx(1, m))] = params.omega_c * m as f64 + params.omega_a / 2.0;
    }
    for m in 0..n_cutoff {
        let r = ((m + 1) as f64).sqrt();
        // Excitation exchange, rotating (|g,m+1> <-> |e,m>) and
        // counter-rotating (|g,m> <-> |e,m+1>).
        h[(idx(1, m), idx(0, m + 1))] += params.g_r * r;
        h[(idx(0, m + 1), idx(1, m))] += params.g_r * r;
        h[(idx(1, m + 1), idx(0, m))] += params.g_r * r;
        h[(idx(0, m), idx(1, m + 1))] += params.g_r * r;
        // Population couplings from the permanent dipoles.
        h[(idx(1, m + 1), idx(1, m))] += 2.0 * params.g_s * r;
        h[(idx(1, m), idx(1, m + 1))] += 2.0 * params.g_s * r;
        h[(idx(0, m + 1), idx(0, m))] += -2.0 * params.g_s_prime * r;
        h[(idx(0, m), idx(0, m + 1))] += -2.0 * params.g_s_prime * r;
    }
    h
}

/// Photon annihilation operator in the truncated product basis.
pub fn annihilation_matrix(n_cutoff: u32) -> DMatrix<f64> {
    let dim = 2 * (n_cutoff as usize + 1);
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for m in 1..=n_cutoff {
        for atom in 0..2 {
            a[(idx(atom, m - 1), idx(atom, m))] = (m as f64).sqrt();
        }
    }
    a
}

/// Rotating-wave dressed state embedded in the truncated product basis.
pub fn jc_product_vector(label: StateLabel, params: &ModelParams, n_cutoff: u32) -> DVector<f64> {
    let dim = 2 * (n_cutoff as usize + 1);
    let mut v = DVector::<f64>::zeros(dim);
    let (a, b) = jc_eigenpair(label, params);
    v[idx(0, label.n)] = a;
    if label.n >= 1 {
        v[idx(1, label.n - 1)] = b;
    }
    v
}

/// Dense spectrum of the full Hamiltonian, eigenvalues ascending.
pub struct ExactSpectrum {
    pub n_cutoff: u32,
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` belonging to `energies[i]`.
    pub vectors: DMatrix<f64>,
}

/// Diagonalize the full Hamiltonian with `m <= n_cutoff` photons.
pub fn diagonalize(params: &ModelParams, n_cutoff: u32) -> Result<ExactSpectrum> {
    if n_cutoff < 1 {
        return Err(Error::InvalidConfig(
            "fock cutoff must be at least 1".into(),
        ));
    }
    let h = build_hamiltonian(params, n_cutoff);
    let se = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 0)
        .ok_or_else(|| Error::SolverFailure("symmetric eigensolver did not converge".into()))?;
    let dim = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let energies: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| se.eigenvectors[(r, order[c])]);
    Ok(ExactSpectrum {
        n_cutoff,
        energies,
        vectors,
    })
}

/// An exact eigenstate identified with a ladder label.
#[derive(Clone, Debug)]
pub struct MatchedState {
    pub label: StateLabel,
    /// Column index into the spectrum.
    pub index: usize,
    pub energy: f64,
    /// Squared overlap with the rotating-wave vector.
    pub overlap_sq: f64,
    /// Second-best squared overlap.
    pub runner_up_sq: f64,
}

/// Identify the exact eigenstate corresponding to a ladder label by maximum
/// squared overlap. Fails with [`Error::AmbiguousMatch`] when the margin to
/// the runner-up is below [`MATCH_AMBIGUITY_TOL`], and with
/// [`Error::CutoffTooSmall`] when the truncation leaves no headroom above
/// the requested manifold.
pub fn match_state(
    spectrum: &ExactSpectrum,
    label: StateLabel,
    params: &ModelParams,
) -> Result<MatchedState> {
    if spectrum.n_cutoff < label.n + CUTOFF_HEADROOM {
        return Err(Error::CutoffTooSmall {
            cutoff: spectrum.n_cutoff,
            needed: label.n + CUTOFF_HEADROOM,
        });
    }
    let v0 = jc_product_vector(label, params, spectrum.n_cutoff);
    let (mut best, mut best_ov, mut second_ov) = (0, -1.0, -1.0);
    for i in 0..spectrum.energies.len() {
        let ov = spectrum.vectors.column(i).dot(&v0).powi(2);
        if ov > best_ov {
            second_ov = best_ov;
            best = i;
            best_ov = ov;
        } else if ov > second_ov {
            second_ov = ov;
        }
    }
    if best_ov - second_ov < MATCH_AMBIGUITY_TOL {
        return Err(Error::AmbiguousMatch {
            label,
            top: best_ov,
            second: second_ov,
            tol: MATCH_AMBIGUITY_TOL,
        });
    }
    Ok(MatchedState {
        label,
        index: best,
        energy: spectrum.energies[best],
        overlap_sq: best_ov,
        runner_up_sq: second_ov,
    })
}

/// Exact squared photon matrix element `|<f|a|i>|^2` between two identified
/// eigenstates.
pub fn exact_a_sq(
    spectrum: &ExactSpectrum,
    f: StateLabel,
    i: StateLabel,
    params: &ModelParams,
) -> Result<f64> {
    let mf = match_state(spectrum, f, params)?;
    let mi = match_state(spectrum, i, params)?;
    let a = annihilation_matrix(spectrum.n_cutoff);
    let av = &a * spectrum.vectors.column(mi.index);
    let amp = spectrum.vectors.column(mf.index).dot(&av);
    Ok(amp * amp)
}

/// Second-order perturbed state embedded in the truncated product basis,
/// normalized.
pub fn embed_perturbed(state: &PerturbedState, params: &ModelParams, n_cutoff: u32) -> DVector<f64> {
    let dim = 2 * (n_cutoff as usize + 1);
    let mut v = DVector::<f64>::zeros(dim);
    for (&l, &amp) in &state.amplitudes() {
        v += amp * jc_product_vector(l, params, n_cutoff);
    }
    let n = v.norm();
    if n > 0.0 {
        v /= n;
    }
    v
}

/// Side-by-side exact and perturbative data for one dressed state.
#[derive(Clone, Debug)]
pub struct OracleComparison {
    pub label: StateLabel,
    pub n_cutoff: u32,
    pub energy_exact: f64,
    pub energy_perturbative: f64,
    /// `|exact - perturbative|`.
    pub energy_error: f64,
    /// Squared overlap between the normalized perturbed state and the exact
    /// eigenvector.
    pub overlap_sq: f64,
    /// Norm of the (unnormalized) second-order state, the validity monitor.
    pub state_norm: f64,
}

/// Diagonalize, match, and compare one state against the perturbative
/// pipeline.
pub fn match_and_compare(
    params: &ModelParams,
    label: StateLabel,
    n_cutoff: u32,
) -> Result<OracleComparison> {
    let spectrum = diagonalize(params, n_cutoff)?;
    let exact = match_state(&spectrum, label, params)?;
    let e_pert = energy_through_second_order(label, params)?;
    let pstate = perturbed_state(label, params)?;
    let embedded = embed_perturbed(&pstate, params, n_cutoff);
    let overlap = spectrum.vectors.column(exact.index).dot(&embedded).powi(2);
    Ok(OracleComparison {
        label,
        n_cutoff,
        energy_exact: exact.energy,
        energy_perturbative: e_pert,
        energy_error: (exact.energy - e_pert).abs(),
        overlap_sq: overlap,
        state_norm: pstate.norm(),
    })
}

/// Least-squares slope of `ln y` against `ln x`; the scaling exponent of a
/// power law sampled on `x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    assert!(x.len() == y.len() && x.len() >= 2, "need matching samples");
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..lx.len() {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    num / den
}
