// SPDX-License-Identifier: AGPL-3.0-only

//! Gauge-invariant strip, vertex, and loop variables for abelian lattice
//! gauge fields, with Hofstadter magnetic-band spectra.
//!
//! A non-compact U(1) gauge potential on a hypercubic lattice — one real
//! number `A_mu(n)` per directed link — carries a large gauge redundancy.
//! This crate reorganizes the links into an equivalent set of independent
//! variables that separate the physical content from the gauge orbit:
//!
//! - **strip variables** `Fbar_munu(n) = sum_l F_munu(n + l nu^)`, partial
//!   sums of the field strength along one lattice direction, which are
//!   gauge invariant and carry the local curvature data;
//! - a **vertex field** `phi(n)`, one scalar per site normalized to zero at
//!   the corner `(N, ..., N)`, which carries the gauge orbit;
//! - under periodic boundaries, **loop variables** `fbar_mu`, straight
//!   Wilson line sums reduced by boundary transition functions, which carry
//!   the holonomies no local field strength can see.
//!
//! The change of variables is an exact bijection: [`giv::extract_giv`] and
//! [`giv::reconstruct_links`] invert each other to rounding accuracy, the
//! variable counts match the link counts exactly ([`giv::dof_count`]), and
//! the Wilson action can be rewritten in the new variables without
//! approximation ([`action`]). For a uniform magnetic field the same
//! machinery produces magnetic band Hamiltonians whose spectra reproduce
//! the Hofstadter problem in two and three dimensions ([`hofstadter`]).
//!
//! # Module map
//!
//! - [`geometry`]: hypercubic lattice shapes, site/link indexing, boundary
//!   conditions.
//! - [`fields`]: link, site-scalar, and plaquette fields; field strength;
//!   gauge transformations; Bianchi residuals; Wilson line sums.
//! - [`giv`]: the gauge-invariant representation — extraction,
//!   reconstruction, degree-of-freedom counts, twisted boundary conditions.
//! - [`action`]: the (2+1)-dimensional Wilson action written directly in
//!   strip variables.
//! - [`eigen`]: dense Hermitian eigendecomposition used by the band
//!   calculations.
//! - [`hofstadter`]: uniform-flux configurations, Peierls Hamiltonians,
//!   magnetic band matrices, and butterfly spectra.
//!
//! # Conventions
//!
//! Lattice coordinates are 1-based (`1..=N` per direction) and direction
//! indices are 0-based (`0..D`), with coordinate 0 the most significant in
//! flat indexing. Charge and lattice spacing are fixed to 1. All field
//! values are plain `f64`; tolerances quoted on checks are absolute unless
//! noted otherwise.
//!
//! # References
//!
//! - K. G. Wilson, "Confinement of quarks", Phys. Rev. D 10, 2445 (1974).
//! - D. R. Hofstadter, "Energy levels and wave functions of Bloch electrons
//!   in rational and irrational magnetic fields", Phys. Rev. B 14, 2239
//!   (1976).
//! - P. G. Harper, "Single band motion of conduction electrons in a uniform
//!   magnetic field", Proc. Phys. Soc. A 68, 874 (1955).
//! - R. Peierls, "Zur Theorie des Diamagnetismus von Leitungselektronen",
//!   Z. Phys. 80, 763 (1933).

use thiserror::Error as ThisError;

pub mod action;
pub mod eigen;
pub mod fields;
pub mod geometry;
pub mod giv;
pub mod hofstadter;

pub use action::{
    action_from_links, action_from_strips, plaquettes_from_strips, ActionParams, StripTriple2p1,
};
pub use eigen::{eigh, EigenResult, HermitianMatrix};
pub use fields::{
    apply_gauge_transformation, bianchi_residual, field_strength, wilson_line_sum, LinkField,
    PlaquetteField, VertexScalarField,
};
pub use geometry::{BoundaryCondition, LatticeGeometry, MAX_DIM};
pub use giv::{
    asym_to_sym_shift, dof_count, extract_giv, reconstruct_links, strip_dependency_residual,
    verify_twisted_bc, Construction, DofCount, GaugeInvariantRep, LoopField, StripField,
    TransitionData, TransitionFunction, TwistReport,
};
pub use hofstadter::{
    band_matrix, butterfly, phase_rotate_basis, pi_flux_spectrum, real_space_hamiltonian,
    spectra_coincide, spectrum, uniform_field_giv, BandSpectrum, ButterflyData, ButterflyRow,
    CoincideReport, HofstadterParams, MbzGrid, RealSpaceHamiltonian, SpectrumRow,
    MAX_BUTTERFLY_DENOMINATOR, MAX_HAMILTONIAN_ORDER,
};

/// Errors reported by the crate.
///
/// Construction and extraction routines validate their inputs eagerly and
/// return the first violation found; numerical checks that merely *measure*
/// a violation (gauge orbits, Bianchi residuals, twisted-boundary audits)
/// return the measured number instead and leave pass/fail to the caller.
#[derive(Debug, ThisError)]
pub enum Error {
    /// Lattice dimension outside the supported range `2..=4`.
    #[error("unsupported lattice dimension {dim}: this crate covers 2 to 4 directions")]
    UnsupportedDimension { dim: usize },

    /// Lattice extent too small for a meaningful strip decomposition.
    #[error("lattice size {size} too small: at least 2 sites per direction are required")]
    SizeTooSmall { size: usize },

    /// A flat value buffer has the wrong number of entries.
    #[error("{what} has {got} values, expected {expected}")]
    WrongLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A field contains NaN or infinite entries.
    #[error("{what} contains non-finite values")]
    NonFinite { what: &'static str },

    /// An open-boundary link that must be pinned to zero is not.
    #[error("open-boundary link at {coords:?} in direction {mu} is {value}, must be exactly 0")]
    BoundaryLinkNotZero {
        coords: [usize; geometry::MAX_DIM],
        mu: usize,
        value: f64,
    },

    /// Two fields that must share a lattice geometry do not.
    #[error("fields live on different lattice geometries")]
    GeometryMismatch,

    /// Straight-line loop sums only close under periodic boundaries.
    #[error("loop variables are only defined under periodic boundary conditions")]
    OpenBoundaryLoops,

    /// The Bianchi identity needs at least three lattice directions.
    #[error("Bianchi identity needs at least 3 directions, lattice has {dim}")]
    BianchiNeedsThreeDirections { dim: usize },

    /// An operation is not defined for this construction in this dimension.
    #[error("{operation} is not defined for the {construction} construction in {dim} directions")]
    UnsupportedConstruction {
        construction: &'static str,
        dim: usize,
        operation: &'static str,
    },

    /// Transition data supplied where boundary conditions forbid it.
    #[error("transition functions are only meaningful under periodic boundary conditions")]
    TransitionForbidden,

    /// Transition functions fail the cocycle consistency condition.
    #[error("transition functions violate the cocycle condition by {max_violation:.3e}")]
    CocycleViolated { max_violation: f64 },

    /// The vertex field is not normalized to zero at the corner site.
    #[error("vertex field is {value} at the corner site, must be exactly 0")]
    CornerNotZero { value: f64 },

    /// A strip slot that must be pinned to zero is not.
    #[error(
        "strip ({mu},{nu}) slot at {coords:?} is {value}, must be exactly 0 on the zero-extension boundary"
    )]
    StripBoundaryNotZero {
        mu: usize,
        nu: usize,
        coords: [usize; geometry::MAX_DIM],
        value: f64,
    },

    /// The twist tensor of a transition datum is not antisymmetric.
    #[error("twist tensor entry ({mu},{nu}) breaks antisymmetry")]
    TwistNotAntisymmetric { mu: usize, nu: usize },

    /// A gauge-invariant representation fails structural validation.
    #[error("malformed gauge-invariant representation: {reason}")]
    MalformedRep { reason: String },

    /// A JSON document violates the interchange format.
    #[error("malformed JSON document: {reason}")]
    MalformedJson { reason: String },

    /// JSON syntax or type error from the underlying parser.
    #[error("JSON parse error: {0}")]
    Json(#[from] serde_json::Error),

    /// Flux fraction `m/n` is not a reduced positive rational.
    #[error("invalid flux fraction {m}/{n}: need n >= 1, m >= 1, gcd(m, n) = 1")]
    InvalidFlux { m: u64, n: u64 },

    /// A parameter set fails validation.
    #[error("invalid parameters: {reason}")]
    InvalidParams { reason: String },

    /// A momentum component lies outside the magnetic Brillouin zone.
    #[error("momentum component {k} lies outside the magnetic Brillouin zone")]
    MomentumOutsideMbz { k: f64 },

    /// A requested dense matrix exceeds the size cap.
    #[error("matrix order {order} exceeds the cap {cap}")]
    MatrixTooLarge { order: usize, cap: usize },

    /// A matrix handed to the eigensolver is not exactly Hermitian.
    #[error("matrix is not Hermitian at entry ({row},{col})")]
    NotHermitian { row: usize, col: usize },

    /// The iterative eigensolver failed to converge.
    #[error("eigendecomposition failed to converge for matrix of order {order}")]
    EigenConvergence { order: usize },

    /// Computed eigenpairs fail the residual bound.
    #[error(
        "eigenpair residual {residual:.3e} exceeds bound {bound:.3e} for matrix of order {order}"
    )]
    ResidualTooLarge {
        order: usize,
        residual: f64,
        bound: f64,
    },

    /// Two spectra that should be compared entry-by-entry differ in length.
    #[error("spectra have different lengths: {left} vs {right}")]
    SpectrumSizeMismatch { left: usize, right: usize },

    /// Butterfly denominator range exceeds the supported cap.
    #[error("butterfly denominator cap {n_max} exceeds the supported maximum {max}")]
    ButterflyTooLarge { n_max: u64, max: u64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
