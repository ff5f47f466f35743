//! Perturbative emission theory for a polar two-level emitter coupled to a
//! lossy single-mode cavity.
//!
//! The emitter carries permanent dipole moments, so on top of the usual
//! excitation-exchange coupling `g_r` the cavity field couples to the
//! populations with strength `g_s`. Starting from the analytically known
//! rotating-wave ladder, the counter-rotating and population couplings are
//! treated in second-order perturbation theory. The crate computes:
//!
//! * dressed-state energies, eigenvectors, and ladder crossings ([`model`]),
//! * second-order energy shifts and order-resolved perturbed states
//!   ([`perturbation`]),
//! * photon decay channels, golden-rule rates through a structured external
//!   spectral response, principal-value Lamb shifts, and Lorentzian emission
//!   spectra ([`emission`]),
//! * a truncated-Fock exact-diagonalization cross-check ([`oracle`]),
//! * file-driven runs with reproducible text/JSON output ([`cli`]).
//!
//! Energies and frequencies are quoted in units of the cavity frequency
//! unless stated otherwise.

pub mod cli;
pub mod emission;
pub mod model;
pub mod oracle;
pub mod perturbation;
pub mod quad;

use crate::model::StateLabel;

/// Error type shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Configuration rejected before any numerics ran.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// A parameter outside the regime the perturbative pipeline supports.
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),
    /// An energy denominator fell below the degeneracy tolerance.
    #[error("near-degenerate denominator between {a} and {b}: gap {gap:.3e} is below {tol:.3e}")]
    NearDegeneracy {
        a: StateLabel,
        b: StateLabel,
        gap: f64,
        tol: f64,
    },
    /// No ladder crossing inside the scanned coupling window.
    #[error("no level crossing found for g in [{g_min:.3e}, {g_max:.3e}]")]
    NoCrossingFound { g_min: f64, g_max: f64 },
    /// Principal-value shift integral diverges without a frequency cutoff.
    #[error("Lamb-shift integral diverges for this spectral response without a frequency cutoff")]
    DivergentShift,
    /// Ratio against a channel whose rate is exactly zero.
    #[error("weight ratio against a zero-rate channel {0}")]
    DivisionByZeroChannel(StateLabel),
    /// Fock-space truncation too small for the requested manifold.
    #[error("fock cutoff {cutoff} too small: manifold {needed} needs headroom for matching")]
    CutoffTooSmall { cutoff: u32, needed: u32 },
    /// The dense eigensolver did not produce a usable decomposition.
    #[error("eigensolver failure: {0}")]
    SolverFailure(String),
    /// Exact eigenvector matching found two comparable overlap candidates.
    #[error(
        "ambiguous eigenstate match for {label}: leading overlaps {top:.4} and {second:.4} differ by less than {tol:.4}"
    )]
    AmbiguousMatch {
        label: StateLabel,
        top: f64,
        second: f64,
        tol: f64,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error: 1 for configuration problems,
    /// 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::UnsupportedParameter(_) | Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
