// SPDX-License-Identifier: AGPL-3.0-only

//! Gauge-invariant representation: strip, vertex, and loop variables.
//!
//! A link configuration `A_mu(n)` is mapped to an equivalent triple of
//! variables that separates gauge-invariant content from the gauge orbit:
//!
//! - **Strip variables.** For an ordered direction pair `(mu, nu)` the strip
//!   sums the field strength along `nu` up to the lattice edge,
//!
//!   ```text
//!   Fbar_munu(n) = sum_{l = 0}^{N - 1 - n_nu} F_munu(n + l nu^),
//!   ```
//!
//!   using bulk plaquettes only (`n_mu < N`, `n_nu < N`); slots with
//!   `n_mu = N` or `n_nu = N` are pinned to exactly zero under both boundary
//!   conditions (*zero extension*). The **asymmetric** construction keeps
//!   one strip per unordered pair, `mu > nu`, stored on the sub-lattice
//!   where the first `nu` coordinates sit at `N`. The **symmetric**
//!   construction keeps both orientations of every pair on the full grid;
//!   the second family is derived data, tied to the first by the dependency
//!   relation checked in [`strip_dependency_residual`].
//!
//! - **Vertex field.** One scalar `phi(n)` per site, normalized to
//!   `phi(N, ..., N) = 0`, defined by backward passes
//!   `phi(n) = phi(n + mu^) - A_mu(n)` sweeping `mu = D-1` down to `0`.
//!   Under a gauge transformation by `L` the strips and loops are invariant
//!   while `phi` shifts by `L - L(N, ..., N)`.
//!
//! - **Loop variables** (periodic boundaries only). Straight Wilson lines
//!   `f_mu = sum_{n_mu = 1..N} A_mu` reduced by the boundary transition
//!   function, `fbar_mu = f_mu - phi_mu(n|_{n_mu = 1})`; they carry the
//!   holonomies that no local field strength determines.
//!
//! [`extract_giv`] and [`reconstruct_links`] invert each other to rounding
//! accuracy, and [`dof_count`] confirms the variable budget matches the link
//! count exactly for every lattice shape. Twisted boundary conditions are
//! described by affine transition functions ([`TransitionData`]) whose
//! mutual consistency (the cocycle condition) is reported by
//! [`verify_twisted_bc`].
//!
//! # References
//! - K. G. Wilson, "Confinement of quarks", Phys. Rev. D 10, 2445 (1974).
//! - G. 't Hooft, "A property of electric and magnetic flux in non-Abelian
//!   gauge theories", Nucl. Phys. B 153, 141 (1979).

use std::collections::BTreeMap;
use std::fmt;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fields::{field_strength, LinkField, VertexScalarField};
use crate::geometry::{BoundaryCondition, LatticeGeometry, MAX_DIM};
use crate::{Error, Result};

/// Largest cocycle violation tolerated when extracting with twisted
/// boundary transition functions.
pub const COCYCLE_TOLERANCE: f64 = 1e-12;

/// Which strip family a representation carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    /// One strip per unordered pair `mu > nu`, stored on the sub-lattice
    /// with the first `nu` coordinates pinned to `N`. Defined in 2 to 4
    /// directions.
    Asymmetric,
    /// Both orientations of every pair on the full grid. Defined in 2 and 3
    /// directions; extraction from links only in 2.
    Symmetric,
}

impl Construction {
    /// Lowercase name used in errors and serialized documents.
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Self::Asymmetric => "asymmetric",
            Self::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The `(mu, nu, pinned)` strip layout of a construction, in canonical
/// storage order.
pub(crate) fn expected_strip_layout(
    construction: Construction,
    dim: usize,
) -> Result<Vec<(usize, usize, usize)>> {
    match construction {
        Construction::Asymmetric => {
            let mut layout = Vec::new();
            for mu in 1..dim {
                for nu in 0..mu {
                    layout.push((mu, nu, nu));
                }
            }
            Ok(layout)
        }
        Construction::Symmetric => {
            if !(2..=3).contains(&dim) {
                return Err(Error::UnsupportedConstruction {
                    construction: "symmetric",
                    dim,
                    operation: "strip decomposition",
                });
            }
            let mut layout = Vec::new();
            for mu in 0..dim {
                for nu in 0..dim {
                    if nu != mu {
                        layout.push((mu, nu, 0));
                    }
                }
            }
            Ok(layout)
        }
    }
}

/// One strip variable `Fbar_munu`, stored on the sub-lattice where the
/// first `pinned` coordinates sit at `N`.
///
/// Slots with `n_mu = N` or `n_nu = N` are pinned to exactly zero (zero
/// extension) under both boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct StripField {
    geom: LatticeGeometry,
    mu: usize,
    nu: usize,
    pinned: usize,
    values: Vec<f64>,
}

impl StripField {
    /// All-zero strip for the pair `(mu, nu)` with the given number of
    /// leading pinned coordinates.
    pub fn zeros(geom: LatticeGeometry, mu: usize, nu: usize, pinned: usize) -> Result<Self> {
        let dim = geom.dim();
        if mu == nu || mu >= dim || nu >= dim || pinned > mu.min(nu) {
            return Err(Error::MalformedRep {
                reason: format!(
                    "strip pair ({mu},{nu}) with {pinned} pinned coordinates is not valid in {dim} directions"
                ),
            });
        }
        let len = geom.size().pow((dim - pinned) as u32);
        Ok(Self {
            geom,
            mu,
            nu,
            pinned,
            values: vec![0.0; len],
        })
    }

    /// Builds a strip from flat values in stored-site order, validating
    /// length, finiteness, and the zero-extension slots.
    pub fn from_values(
        geom: LatticeGeometry,
        mu: usize,
        nu: usize,
        pinned: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        let mut strip = Self::zeros(geom, mu, nu, pinned)?;
        if values.len() != strip.values.len() {
            return Err(Error::WrongLength {
                what: "strip field",
                expected: strip.values.len(),
                got: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                what: "strip field",
            });
        }
        strip.values = values;
        strip.validate_zero_slots()?;
        Ok(strip)
    }

    /// Checks that every zero-extension slot holds exactly 0.
    pub(crate) fn validate_zero_slots(&self) -> Result<()> {
        let size = self.geom.size();
        let dim = self.geom.dim();
        for site in self.geom.sites_pinned(self.pinned) {
            if site[self.mu] == size || site[self.nu] == size {
                let value = self.get(&site[..dim]);
                if value != 0.0 {
                    return Err(Error::StripBoundaryNotZero {
                        mu: self.mu,
                        nu: self.nu,
                        coords: site,
                        value,
                    });
                }
            }
        }
        Ok(())
    }

    /// Line direction `mu` of the summed plaquettes.
    #[must_use]
    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Summation direction `nu`.
    #[must_use]
    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Number of leading coordinates pinned to `N` in storage.
    #[must_use]
    pub fn pinned(&self) -> usize {
        self.pinned
    }

    /// Geometry the strip lives on.
    #[must_use]
    pub fn geometry(&self) -> LatticeGeometry {
        self.geom
    }

    /// Flat value slice in stored-site order (free coordinates lexicographic,
    /// last axis fastest).
    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn storage_index(&self, coords: &[usize]) -> usize {
        let size = self.geom.size();
        debug_assert!(
            coords[..self.pinned].iter().all(|&c| c == size),
            "strip lookup outside the stored sub-lattice: {coords:?}"
        );
        coords[self.pinned..self.geom.dim()]
            .iter()
            .fold(0, |idx, &c| idx * size + (c - 1))
    }

    /// Strip value at a stored site (full site coordinates, the first
    /// `pinned` of which must be `N`).
    #[must_use]
    pub fn get(&self, coords: &[usize]) -> f64 {
        self.values[self.storage_index(coords)]
    }

    pub(crate) fn set(&mut self, coords: &[usize], value: f64) {
        let idx = self.storage_index(coords);
        self.values[idx] = value;
    }

    /// Number of stored slots not pinned by zero extension,
    /// `n_mu < N` and `n_nu < N`.
    #[must_use]
    pub fn num_free_slots(&self) -> usize {
        let size = self.geom.size();
        self.geom
            .sites_pinned(self.pinned)
            .filter(|site| site[self.mu] < size && site[self.nu] < size)
            .count()
    }

    /// Largest absolute difference against another strip of the same pair
    /// and geometry.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.geom != other.geom
            || (self.mu, self.nu, self.pinned) != (other.mu, other.nu, other.pinned)
        {
            return Err(Error::GeometryMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// One loop variable `fbar_mu`, a value per straight line in direction
/// `mu`, indexed by the transverse coordinates. Periodic boundaries only.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopField {
    geom: LatticeGeometry,
    mu: usize,
    values: Vec<f64>,
}

impl LoopField {
    /// All-zero loop field in direction `mu`.
    pub fn zeros(geom: LatticeGeometry, mu: usize) -> Result<Self> {
        if geom.bc() != BoundaryCondition::Periodic {
            return Err(Error::OpenBoundaryLoops);
        }
        if mu >= geom.dim() {
            return Err(Error::MalformedRep {
                reason: format!("loop direction {mu} out of range for {} directions", geom.dim()),
            });
        }
        Ok(Self {
            geom,
            mu,
            values: vec![0.0; geom.num_transverse()],
        })
    }

    /// Builds from flat values in transverse-index order.
    pub fn from_values(geom: LatticeGeometry, mu: usize, values: Vec<f64>) -> Result<Self> {
        let mut field = Self::zeros(geom, mu)?;
        if values.len() != field.values.len() {
            return Err(Error::WrongLength {
                what: "loop field",
                expected: field.values.len(),
                got: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { what: "loop field" });
        }
        field.values = values;
        Ok(field)
    }

    /// Line direction.
    #[must_use]
    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Geometry the field lives on.
    #[must_use]
    pub fn geometry(&self) -> LatticeGeometry {
        self.geom
    }

    /// Flat value slice in transverse-index order.
    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Loop value for the line through the given site (only the transverse
    /// coordinates matter).
    #[must_use]
    pub fn get(&self, coords: &[usize]) -> f64 {
        self.values[self.geom.transverse_index(self.mu, coords)]
    }

    pub(crate) fn set(&mut self, coords: &[usize], value: f64) {
        let idx = self.geom.transverse_index(self.mu, coords);
        self.values[idx] = value;
    }

    pub(crate) fn set_index(&mut self, index: usize, value: f64) {
        self.values[index] = value;
    }

    /// Largest absolute difference against another loop field of the same
    /// direction and geometry.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.geom != other.geom || self.mu != other.mu {
            return Err(Error::GeometryMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// One affine boundary transition function,
/// `phi_mu(n) = constant + sum_alpha gradient[alpha] * n_alpha`.
///
/// The affine restriction is what makes the function exactly evaluable
/// outside the fundamental domain, which the cocycle condition requires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionFunction {
    /// Constant offset.
    pub constant: f64,
    /// One slope per lattice direction.
    pub gradient: Vec<f64>,
}

/// Twisted-boundary data: one affine transition function per direction and
/// an antisymmetric twist tensor `phi_munu`.
///
/// Construction validates shapes and exact antisymmetry of the twist; the
/// cocycle condition is *not* enforced here — [`verify_twisted_bc`] reports
/// its violation and [`extract_giv`] refuses transition data violating it
/// beyond [`COCYCLE_TOLERANCE`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionData {
    functions: Vec<TransitionFunction>,
    twist: Vec<Vec<f64>>,
}

impl TransitionData {
    /// Untwisted boundary data: all functions and twists zero.
    #[must_use]
    pub fn zero(dim: usize) -> Self {
        Self {
            functions: (0..dim)
                .map(|_| TransitionFunction {
                    constant: 0.0,
                    gradient: vec![0.0; dim],
                })
                .collect(),
            twist: vec![vec![0.0; dim]; dim],
        }
    }

    /// Validating constructor.
    pub fn new(functions: Vec<TransitionFunction>, twist: Vec<Vec<f64>>) -> Result<Self> {
        let data = Self { functions, twist };
        data.validate()?;
        Ok(data)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let dim = self.functions.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension { dim });
        }
        for f in &self.functions {
            if f.gradient.len() != dim {
                return Err(Error::WrongLength {
                    what: "transition gradient",
                    expected: dim,
                    got: f.gradient.len(),
                });
            }
            if !f.constant.is_finite() || !f.gradient.iter().all(|g| g.is_finite()) {
                return Err(Error::NonFinite {
                    what: "transition function",
                });
            }
        }
        if self.twist.len() != dim {
            return Err(Error::WrongLength {
                what: "twist tensor",
                expected: dim,
                got: self.twist.len(),
            });
        }
        for row in &self.twist {
            if row.len() != dim {
                return Err(Error::WrongLength {
                    what: "twist tensor row",
                    expected: dim,
                    got: row.len(),
                });
            }
            if !row.iter().all(|t| t.is_finite()) {
                return Err(Error::NonFinite { what: "twist tensor" });
            }
        }
        for mu in 0..dim {
            for nu in mu..dim {
                if self.twist[mu][nu] != -self.twist[nu][mu] {
                    return Err(Error::TwistNotAntisymmetric { mu, nu });
                }
            }
        }
        Ok(())
    }

    /// Number of lattice directions.
    #[must_use]
    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    /// The per-direction transition functions.
    #[must_use]
    pub fn functions(&self) -> &[TransitionFunction] {
        &self.functions
    }

    /// The antisymmetric twist tensor.
    #[must_use]
    pub fn twist(&self) -> &[Vec<f64>] {
        &self.twist
    }

    /// Evaluates `phi_mu` at a site (affine, so any integer coordinates are
    /// exact).
    #[must_use]
    pub fn evaluate(&self, mu: usize, coords: &[usize]) -> f64 {
        let f = &self.functions[mu];
        f.constant
            + f.gradient
                .iter()
                .zip(coords)
                .map(|(g, &c)| g * c as f64)
                .sum::<f64>()
    }

    /// Maximum cocycle violation over direction pairs.
    ///
    /// For affine functions the condition
    /// `phi_mu(n + N nu^) - phi_mu(n) - phi_nu(n + N mu^) + phi_nu(n) = phi_munu`
    /// collapses to the closed form
    /// `N g_mu[nu] - N g_nu[mu] = phi_munu` per pair `mu < nu`.
    #[must_use]
    pub fn cocycle_violation(&self, size: usize) -> f64 {
        let dim = self.dim();
        let n = size as f64;
        let mut worst: f64 = 0.0;
        for mu in 0..dim {
            for nu in (mu + 1)..dim {
                let lhs = n * self.functions[mu].gradient[nu] - n * self.functions[nu].gradient[mu];
                worst = worst.max((lhs - self.twist[mu][nu]).abs());
            }
        }
        worst
    }
}

/// A complete gauge-invariant representation of a link configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeInvariantRep {
    construction: Construction,
    phi: VertexScalarField,
    strips: Vec<StripField>,
    loops: Vec<LoopField>,
    transition: Option<TransitionData>,
}

impl GaugeInvariantRep {
    /// Assembles and validates a representation: consistent geometry, the
    /// exact strip layout of the construction, zero-extension slots, corner
    /// normalization of the vertex field, and loop/transition data present
    /// exactly when boundaries are periodic.
    pub fn new(
        construction: Construction,
        phi: VertexScalarField,
        strips: Vec<StripField>,
        loops: Vec<LoopField>,
        transition: Option<TransitionData>,
    ) -> Result<Self> {
        let rep = Self {
            construction,
            phi,
            strips,
            loops,
            transition,
        };
        rep.validate()?;
        Ok(rep)
    }

    fn validate(&self) -> Result<()> {
        let geom = self.phi.geometry();
        let corner = self.phi.corner();
        if corner != 0.0 {
            return Err(Error::CornerNotZero { value: corner });
        }
        let layout = expected_strip_layout(self.construction, geom.dim())?;
        if self.strips.len() != layout.len() {
            return Err(Error::MalformedRep {
                reason: format!(
                    "{} construction in {} directions needs {} strips, got {}",
                    self.construction,
                    geom.dim(),
                    layout.len(),
                    self.strips.len()
                ),
            });
        }
        for (strip, &(mu, nu, pinned)) in self.strips.iter().zip(&layout) {
            if strip.geometry() != geom {
                return Err(Error::GeometryMismatch);
            }
            if (strip.mu(), strip.nu(), strip.pinned()) != (mu, nu, pinned) {
                return Err(Error::MalformedRep {
                    reason: format!(
                        "expected strip ({mu},{nu}) with {pinned} pinned coordinates, found ({},{}) with {}",
                        strip.mu(),
                        strip.nu(),
                        strip.pinned()
                    ),
                });
            }
            strip.validate_zero_slots()?;
        }
        match geom.bc() {
            BoundaryCondition::Open => {
                if !self.loops.is_empty() {
                    return Err(Error::MalformedRep {
                        reason: "loop variables are not defined under open boundaries".into(),
                    });
                }
                if self.transition.is_some() {
                    return Err(Error::TransitionForbidden);
                }
            }
            BoundaryCondition::Periodic => {
                if self.loops.len() != geom.dim() {
                    return Err(Error::MalformedRep {
                        reason: format!(
                            "periodic representation needs {} loop fields, got {}",
                            geom.dim(),
                            self.loops.len()
                        ),
                    });
                }
                for (mu, lf) in self.loops.iter().enumerate() {
                    if lf.geometry() != geom {
                        return Err(Error::GeometryMismatch);
                    }
                    if lf.mu() != mu {
                        return Err(Error::MalformedRep {
                            reason: format!("loop field {mu} carries direction {}", lf.mu()),
                        });
                    }
                }
                match &self.transition {
                    None => {
                        return Err(Error::MalformedRep {
                            reason: "periodic representation needs transition data".into(),
                        })
                    }
                    Some(t) => {
                        t.validate()?;
                        if t.dim() != geom.dim() {
                            return Err(Error::GeometryMismatch);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Strip family of this representation.
    #[must_use]
    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Lattice geometry.
    #[must_use]
    pub fn geometry(&self) -> LatticeGeometry {
        self.phi.geometry()
    }

    /// Vertex field.
    #[must_use]
    pub fn phi(&self) -> &VertexScalarField {
        &self.phi
    }

    /// All strips in canonical order.
    #[must_use]
    pub fn strips(&self) -> &[StripField] {
        &self.strips
    }

    /// The strip for pair `(mu, nu)`, if the construction carries it.
    #[must_use]
    pub fn strip(&self, mu: usize, nu: usize) -> Option<&StripField> {
        self.strips.iter().find(|s| s.mu() == mu && s.nu() == nu)
    }

    /// All loop fields (empty under open boundaries).
    #[must_use]
    pub fn loops(&self) -> &[LoopField] {
        &self.loops
    }

    /// Boundary transition data (periodic boundaries only).
    #[must_use]
    pub fn transition(&self) -> Option<&TransitionData> {
        self.transition.as_ref()
    }

    /// Seeded random representation: every free slot uniform on `[-pi, pi)`
    /// (vertex field in site order skipping the corner, then strips in
    /// canonical order, then loops), zero-extension slots and the corner
    /// exactly zero, transition data untwisted.
    pub fn random(geom: LatticeGeometry, construction: Construction, seed: u64) -> Result<Self> {
        let layout = expected_strip_layout(construction, geom.dim())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new(-std::f64::consts::PI, std::f64::consts::PI);
        let dim = geom.dim();
        let size = geom.size();

        let mut phi = VertexScalarField::zeros(geom);
        for site in geom.sites() {
            if site[..dim].iter().all(|&c| c == size) {
                continue;
            }
            phi.set(&site[..dim], dist.sample(&mut rng));
        }

        let mut strips = Vec::with_capacity(layout.len());
        for &(mu, nu, pinned) in &layout {
            let mut strip = StripField::zeros(geom, mu, nu, pinned)?;
            for site in geom.sites_pinned(pinned) {
                if site[mu] == size || site[nu] == size {
                    continue;
                }
                strip.set(&site[..dim], dist.sample(&mut rng));
            }
            strips.push(strip);
        }

        let (loops, transition) = if geom.bc() == BoundaryCondition::Periodic {
            let mut loops = Vec::with_capacity(dim);
            for mu in 0..dim {
                let mut lf = LoopField::zeros(geom, mu)?;
                for i in 0..geom.num_transverse() {
                    lf.set_index(i, dist.sample(&mut rng));
                }
                loops.push(lf);
            }
            (loops, Some(TransitionData::zero(dim)))
        } else {
            (Vec::new(), None)
        };

        Self::new(construction, phi, strips, loops, transition)
    }

    /// Counts the stored free slots by iteration: vertex sites except the
    /// corner, strip slots off the zero-extension boundary, and loop
    /// entries. An audit companion to the closed forms in [`dof_count`].
    #[must_use]
    pub fn enumerate_free_variables(&self) -> usize {
        let geom = self.geometry();
        let size = geom.size();
        let dim = geom.dim();
        let phi_slots = geom
            .sites()
            .filter(|site| !site[..dim].iter().all(|&c| c == size))
            .count();
        let strip_slots: usize = self.strips.iter().map(StripField::num_free_slots).sum();
        let loop_slots: usize = self.loops.iter().map(|l| l.values().len()).sum();
        phi_slots + strip_slots + loop_slots
    }

    /// Serializes to the JSON interchange document (strips keyed `"mu,nu"`,
    /// loops keyed by direction; loop and transition fields only under
    /// periodic boundaries).
    #[must_use]
    pub fn to_json(&self) -> String {
        let geom = self.geometry();
        let mut strips = BTreeMap::new();
        for strip in &self.strips {
            strips.insert(
                format!("{},{}", strip.mu(), strip.nu()),
                StripDoc {
                    pinned: strip.pinned(),
                    values: strip.values().to_vec(),
                },
            );
        }
        let loops = if geom.bc() == BoundaryCondition::Periodic {
            Some(
                self.loops
                    .iter()
                    .map(|l| (l.mu().to_string(), l.values().to_vec()))
                    .collect::<BTreeMap<_, _>>(),
            )
        } else {
            None
        };
        let doc = RepDoc {
            construction: self.construction,
            dim: geom.dim(),
            size: geom.size(),
            bc: geom.bc(),
            phi: self.phi.values().to_vec(),
            strips,
            loops,
            transition: self.transition.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("representation document always serializes")
    }

    /// Parses the JSON interchange document with full structural
    /// validation.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RepDoc = serde_json::from_str(text)?;
        let geom = LatticeGeometry::new(doc.dim, doc.size, doc.bc)?;
        let phi = VertexScalarField::from_values(geom, doc.phi)?;

        let layout = expected_strip_layout(doc.construction, geom.dim())?;
        let mut strip_docs = doc.strips;
        let mut strips = Vec::with_capacity(layout.len());
        for &(mu, nu, pinned) in &layout {
            let key = format!("{mu},{nu}");
            let sd = strip_docs.remove(&key).ok_or_else(|| Error::MalformedRep {
                reason: format!("missing strip \"{key}\""),
            })?;
            if sd.pinned != pinned {
                return Err(Error::MalformedRep {
                    reason: format!(
                        "strip \"{key}\" declares {} pinned coordinates, expected {pinned}",
                        sd.pinned
                    ),
                });
            }
            strips.push(StripField::from_values(geom, mu, nu, pinned, sd.values)?);
        }
        if let Some(key) = strip_docs.into_keys().next() {
            return Err(Error::MalformedRep {
                reason: format!("unexpected strip \"{key}\""),
            });
        }

        let loops = match (geom.bc(), doc.loops) {
            (BoundaryCondition::Open, None) => Vec::new(),
            (BoundaryCondition::Open, Some(_)) => {
                return Err(Error::MalformedRep {
                    reason: "loop variables are not defined under open boundaries".into(),
                })
            }
            (BoundaryCondition::Periodic, None) => {
                return Err(Error::MalformedRep {
                    reason: "periodic representation needs loop variables".into(),
                })
            }
            (BoundaryCondition::Periodic, Some(mut loop_docs)) => {
                let mut loops = Vec::with_capacity(geom.dim());
                for mu in 0..geom.dim() {
                    let values = loop_docs.remove(&mu.to_string()).ok_or_else(|| {
                        Error::MalformedRep {
                            reason: format!("missing loop field \"{mu}\""),
                        }
                    })?;
                    loops.push(LoopField::from_values(geom, mu, values)?);
                }
                if let Some(key) = loop_docs.into_keys().next() {
                    return Err(Error::MalformedRep {
                        reason: format!("unexpected loop field \"{key}\""),
                    });
                }
                loops
            }
        };

        Self::new(doc.construction, phi, strips, loops, doc.transition)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StripDoc {
    pinned: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepDoc {
    construction: Construction,
    dim: usize,
    size: usize,
    bc: BoundaryCondition,
    phi: Vec<f64>,
    strips: BTreeMap<String, StripDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    loops: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transition: Option<TransitionData>,
}

/// Degree-of-freedom budget of a lattice in the gauge-invariant variables.
///
/// The counts are identical for both constructions: the symmetric family's
/// extra strips are derived data, constrained slot-by-slot by the
/// dependency relation, so they add no freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DofCount {
    /// Stored links that can be nonzero (`D N^(D-1) (N-1)` open,
    /// `D N^D` periodic).
    pub links: usize,
    /// Free vertex-field sites, `N^D - 1`.
    pub phi: usize,
    /// Free strip slots, `(D-1) N^D - D N^(D-1) + 1`.
    pub strips: usize,
    /// Loop variables, `D N^(D-1)` periodic and none open.
    pub loops: usize,
}

impl DofCount {
    /// Total variable count, `phi + strips + loops`; equals `links` for
    /// every lattice shape.
    #[must_use]
    pub fn total(&self) -> usize {
        self.phi + self.strips + self.loops
    }
}

/// Closed-form degree-of-freedom counts for a lattice geometry.
///
/// The `construction` parameter documents which family the caller works in;
/// the counts do not depend on it (see [`DofCount`]).
#[must_use]
pub fn dof_count(geom: LatticeGeometry, construction: Construction) -> DofCount {
    let _ = construction;
    let d = geom.dim() as u32;
    let n = geom.size();
    let phi = n.pow(d) - 1;
    let strips = (d as usize - 1) * n.pow(d) - d as usize * n.pow(d - 1) + 1;
    let (links, loops) = match geom.bc() {
        BoundaryCondition::Open => (d as usize * n.pow(d - 1) * (n - 1), 0),
        BoundaryCondition::Periodic => (d as usize * n.pow(d), d as usize * n.pow(d - 1)),
    };
    DofCount {
        links,
        phi,
        strips,
        loops,
    }
}

/// Normalizes optional transition input against the boundary conditions:
/// forbidden under open boundaries, defaulted to untwisted under periodic
/// ones, and (when `gate_cocycle`) rejected beyond [`COCYCLE_TOLERANCE`].
fn prepare_transition(
    geom: LatticeGeometry,
    transition: Option<&TransitionData>,
    gate_cocycle: bool,
) -> Result<Option<TransitionData>> {
    match (geom.bc(), transition) {
        (BoundaryCondition::Open, Some(_)) => Err(Error::TransitionForbidden),
        (BoundaryCondition::Open, None) => Ok(None),
        (BoundaryCondition::Periodic, maybe) => {
            let t = maybe
                .cloned()
                .unwrap_or_else(|| TransitionData::zero(geom.dim()));
            t.validate()?;
            if t.dim() != geom.dim() {
                return Err(Error::GeometryMismatch);
            }
            if gate_cocycle {
                let violation = t.cocycle_violation(geom.size());
                if violation > COCYCLE_TOLERANCE {
                    return Err(Error::CocycleViolated {
                        max_violation: violation,
                    });
                }
            }
            Ok(Some(t))
        }
    }
}

/// Maps a link configuration to its gauge-invariant representation.
///
/// Under periodic boundaries an omitted `transition` means untwisted
/// boundaries; supplying transition data under open boundaries is an error,
/// as is data violating the cocycle condition beyond
/// [`COCYCLE_TOLERANCE`]. Symmetric extraction is defined in 2 directions
/// (via the asymmetric extraction and [`asym_to_sym_shift`]).
pub fn extract_giv(
    links: &LinkField,
    construction: Construction,
    transition: Option<&TransitionData>,
) -> Result<GaugeInvariantRep> {
    let trans = prepare_transition(links.geometry(), transition, true)?;
    extract_with(links, construction, trans)
}

/// Extraction after transition validation (shared with the twisted-boundary
/// audit, which must proceed even for cocycle-violating data).
fn extract_with(
    links: &LinkField,
    construction: Construction,
    trans: Option<TransitionData>,
) -> Result<GaugeInvariantRep> {
    match construction {
        Construction::Asymmetric => extract_asym(links, trans),
        Construction::Symmetric => {
            if links.geometry().dim() != 2 {
                return Err(Error::UnsupportedConstruction {
                    construction: "symmetric",
                    dim: links.geometry().dim(),
                    operation: "extraction from links",
                });
            }
            asym_to_sym_shift(&extract_asym(links, trans)?)
        }
    }
}

fn extract_asym(links: &LinkField, trans: Option<TransitionData>) -> Result<GaugeInvariantRep> {
    let geom = links.geometry();
    let dim = geom.dim();
    let size = geom.size();
    let plaq = field_strength(links);

    // Strips: backward accumulation along nu over bulk plaquettes.
    let layout = expected_strip_layout(Construction::Asymmetric, dim)?;
    let mut strips = Vec::with_capacity(layout.len());
    for &(mu, nu, pinned) in &layout {
        let mut strip = StripField::zeros(geom, mu, nu, pinned)?;
        for site in geom.sites_pinned(pinned) {
            if site[nu] != size || site[mu] == size {
                continue; // not a line start, or a line of zero slots
            }
            let mut acc = 0.0;
            let mut c = site;
            for c_nu in (1..size).rev() {
                c[nu] = c_nu;
                acc += plaq.get(mu, nu, &c[..dim]);
                strip.set(&c[..dim], acc);
            }
        }
        strips.push(strip);
    }

    // Vertex field: passes mu = D-1 down to 0, each sweeping its coordinate
    // downward from N-1 so the upstream neighbor is already defined.
    let mut phi = VertexScalarField::zeros(geom);
    for mu in (0..dim).rev() {
        for c_mu in (1..size).rev() {
            for mut site in geom.sites_pinned(mu + 1) {
                site[mu] = c_mu;
                let mut up = site;
                up[mu] = c_mu + 1;
                let value = phi.get(&up[..dim]) - links.get(&site[..dim], mu);
                phi.set(&site[..dim], value);
            }
        }
    }

    // Loops: straight Wilson lines reduced by the transition offset at the
    // line's first site.
    let mut loops = Vec::new();
    if geom.bc() == BoundaryCondition::Periodic {
        let t = trans.as_ref().expect("periodic extraction has transition data");
        for mu in 0..dim {
            let mut lf = LoopField::zeros(geom, mu)?;
            for site in geom.sites() {
                if site[mu] != 1 {
                    continue;
                }
                let mut total = 0.0;
                let mut c = site;
                for c_mu in 1..=size {
                    c[mu] = c_mu;
                    total += links.get(&c[..dim], mu);
                }
                lf.set(&site[..dim], total - t.evaluate(mu, &site[..dim]));
            }
            loops.push(lf);
        }
    }

    GaugeInvariantRep::new(Construction::Asymmetric, phi, strips, loops, trans)
}

/// Rebuilds the link configuration from a gauge-invariant representation.
///
/// Bulk links (`n_mu < N`) come from the strip and vertex data; under open
/// boundaries the remaining slots are zero, and under periodic boundaries
/// the seam links (`n_mu = N`) are fixed by the loop variables,
/// `A_mu(n|_{n_mu=N}) = fbar_mu + phi_mu(n|_{n_mu=1}) - sum_{n_mu<N} A_mu`.
/// Symmetric reconstruction is defined in 2 and 3 directions.
pub fn reconstruct_links(rep: &GaugeInvariantRep) -> Result<LinkField> {
    let geom = rep.geometry();
    let dim = geom.dim();
    let size = geom.size();
    let mut links = LinkField::zeros(geom);

    // Bulk links.
    match rep.construction() {
        Construction::Asymmetric => {
            for site in geom.sites() {
                for mu in 0..dim {
                    if site[mu] == size {
                        continue;
                    }
                    let mut up = site;
                    up[mu] += 1;
                    let mut value = rep.phi().get(&up[..dim]) - rep.phi().get(&site[..dim]);
                    for nu in 0..mu {
                        let mut s = site;
                        for coord in s.iter_mut().take(nu) {
                            *coord = size;
                        }
                        value += rep
                            .strip(mu, nu)
                            .expect("validated asymmetric layout")
                            .get(&s[..dim]);
                    }
                    links.set(&site[..dim], mu, value);
                }
            }
        }
        Construction::Symmetric => match dim {
            2 => {
                for site in geom.sites() {
                    for mu in 0..dim {
                        if site[mu] == size {
                            continue;
                        }
                        let mut up = site;
                        up[mu] += 1;
                        let strip = rep.strip(mu, 1 - mu).expect("validated symmetric layout");
                        let value = rep.phi().get(&up[..dim]) - rep.phi().get(&site[..dim])
                            + 0.5 * strip.get(&site[..dim]);
                        links.set(&site[..dim], mu, value);
                    }
                }
            }
            3 => {
                for site in geom.sites() {
                    for mu in 0..dim {
                        if site[mu] == size {
                            continue;
                        }
                        let mut up = site;
                        up[mu] += 1;
                        let far = rep
                            .strip(mu, (mu + 2) % 3)
                            .expect("validated symmetric layout");
                        let near = rep
                            .strip(mu, (mu + 1) % 3)
                            .expect("validated symmetric layout");
                        let value = rep.phi().get(&up[..dim]) - rep.phi().get(&site[..dim])
                            + (2.0 * far.get(&site[..dim]) + near.get(&site[..dim])) / 3.0;
                        links.set(&site[..dim], mu, value);
                    }
                }
            }
            _ => {
                return Err(Error::UnsupportedConstruction {
                    construction: "symmetric",
                    dim,
                    operation: "reconstruction",
                })
            }
        },
    }

    // Seam links from the loop variables.
    if geom.bc() == BoundaryCondition::Periodic {
        let t = rep
            .transition()
            .expect("validated periodic representation has transition data");
        for mu in 0..dim {
            let lf = &rep.loops()[mu];
            for site in geom.sites() {
                if site[mu] != size {
                    continue;
                }
                let mut first = site;
                first[mu] = 1;
                let raw = lf.get(&site[..dim]) + t.evaluate(mu, &first[..dim]);
                let mut bulk = 0.0;
                let mut c = site;
                for c_mu in 1..size {
                    c[mu] = c_mu;
                    bulk += links.get(&c[..dim], mu);
                }
                links.set(&site[..dim], mu, raw - bulk);
            }
        }
    }

    Ok(links)
}

/// Converts an asymmetric 2-direction representation to the symmetric one.
///
/// The second strip family is the derived suffix sum
/// `Fbar_01(n) = -sum_l F_10(n + l 1^)` with `F_10(n) = a(n) - a(n + 0^)`
/// (zero-extended, `a = Fbar_10`), and the vertex field picks up half the
/// double suffix sum `D(n) = sum_k Fbar_01(n + k 0^)`:
/// `phi~ = phi + D / 2`, which leaves the corner normalization intact. The
/// loop variables and transition data are unchanged.
pub fn asym_to_sym_shift(rep: &GaugeInvariantRep) -> Result<GaugeInvariantRep> {
    let geom = rep.geometry();
    let dim = geom.dim();
    if rep.construction() != Construction::Asymmetric || dim != 2 {
        return Err(Error::UnsupportedConstruction {
            construction: rep.construction().name(),
            dim,
            operation: "symmetric shift",
        });
    }
    let size = geom.size();
    let a = rep.strip(1, 0).expect("validated asymmetric 2d layout");

    // Fbar_01 by backward accumulation along direction 1.
    let mut s01 = StripField::zeros(geom, 0, 1, 0)?;
    for n0 in 1..size {
        let mut acc = 0.0;
        for n1 in (1..size).rev() {
            let f10 = a.get(&[n0, n1]) - a.get(&[n0 + 1, n1]);
            acc -= f10;
            s01.set(&[n0, n1], acc);
        }
    }

    // phi~ = phi + D / 2 with D the suffix sum of Fbar_01 along direction 0
    // (inclusive), accumulated backward so D(n) = Fbar_01(n) + D(n + 0^).
    let mut phi = VertexScalarField::zeros(geom);
    for n1 in 1..=size {
        let mut d = 0.0;
        for n0 in (1..=size).rev() {
            d += s01.get(&[n0, n1]);
            phi.set(&[n0, n1], rep.phi().get(&[n0, n1]) + 0.5 * d);
        }
    }

    GaugeInvariantRep::new(
        Construction::Symmetric,
        phi,
        vec![s01, a.clone()],
        rep.loops().to_vec(),
        rep.transition().cloned(),
    )
}

/// Maximum residual of the dependency relation tying the two symmetric
/// strip families together,
/// `Fbar_01(n) - Fbar_01(n + 1^) + Fbar_10(n) - Fbar_10(n + 0^) = 0`
/// (zero-extended past the lattice edge), over all sites.
///
/// Vanishes identically when both families derive from one link
/// configuration; independently chosen strips violate it.
pub fn strip_dependency_residual(rep: &GaugeInvariantRep) -> Result<f64> {
    let geom = rep.geometry();
    if rep.construction() != Construction::Symmetric || geom.dim() != 2 {
        return Err(Error::UnsupportedConstruction {
            construction: rep.construction().name(),
            dim: geom.dim(),
            operation: "strip dependency relation",
        });
    }
    let size = geom.size();
    let s01 = rep.strip(0, 1).expect("validated symmetric 2d layout");
    let s10 = rep.strip(1, 0).expect("validated symmetric 2d layout");
    let ext = |s: &StripField, n0: usize, n1: usize| -> f64 {
        if n0 > size || n1 > size {
            0.0
        } else {
            s.get(&[n0, n1])
        }
    };
    let mut worst: f64 = 0.0;
    for n0 in 1..=size {
        for n1 in 1..=size {
            let residual = ext(s01, n0, n1) - ext(s01, n0, n1 + 1) + ext(s10, n0, n1)
                - ext(s10, n0 + 1, n1);
            worst = worst.max(residual.abs());
        }
    }
    Ok(worst)
}

/// Twisted-boundary audit report. All entries are maximum absolute
/// violations; a consistently twisted representation has every entry at
/// rounding level.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwistReport {
    /// Closed-form cocycle violation of the transition data.
    pub cocycle: f64,
    /// Vertex-field deviation under reconstruct-then-re-extract.
    pub phi_boundary: f64,
    /// Strip deviation under reconstruct-then-re-extract.
    pub strip_periodicity: f64,
    /// Loop deviation under reconstruct-then-re-extract.
    pub loop_translation: f64,
}

impl TwistReport {
    /// Largest of the four violations.
    #[must_use]
    pub fn max_violation(&self) -> f64 {
        self.cocycle
            .max(self.phi_boundary)
            .max(self.strip_periodicity)
            .max(self.loop_translation)
    }
}

/// Audits a periodic representation's boundary data: the cocycle condition
/// in closed form, plus reconstruct-then-re-extract deviations of vertex,
/// strip, and loop data under the same transition functions.
///
/// Requires periodic boundaries; the symmetric construction is supported in
/// 2 directions only (re-extraction is undefined beyond that).
pub fn verify_twisted_bc(rep: &GaugeInvariantRep) -> Result<TwistReport> {
    let geom = rep.geometry();
    if geom.bc() != BoundaryCondition::Periodic {
        return Err(Error::TransitionForbidden);
    }
    if rep.construction() == Construction::Symmetric && geom.dim() != 2 {
        return Err(Error::UnsupportedConstruction {
            construction: "symmetric",
            dim: geom.dim(),
            operation: "twisted-boundary audit",
        });
    }
    let transition = rep
        .transition()
        .expect("validated periodic representation has transition data");
    let cocycle = transition.cocycle_violation(geom.size());

    let links = reconstruct_links(rep)?;
    let again = extract_with(&links, rep.construction(), Some(transition.clone()))?;

    let phi_boundary = rep.phi().max_abs_diff(again.phi())?;
    let mut strip_periodicity: f64 = 0.0;
    for (s, s2) in rep.strips().iter().zip(again.strips()) {
        strip_periodicity = strip_periodicity.max(s.max_abs_diff(s2)?);
    }
    let mut loop_translation: f64 = 0.0;
    for (l, l2) in rep.loops().iter().zip(again.loops()) {
        loop_translation = loop_translation.max(l.max_abs_diff(l2)?);
    }

    Ok(TwistReport {
        cocycle,
        phi_boundary,
        strip_periodicity,
        loop_translation,
    })
}
