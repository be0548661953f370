// SPDX-License-Identifier: AGPL-3.0-only

//! Lattice fields: link gauge potentials, site scalars, and plaquette
//! field strengths.
//!
//! The gauge potential is a real number `A_mu(n)` per directed link
//! (non-compact fields; charge and lattice spacing are fixed to 1). The
//! field strength is the oriented plaquette sum
//!
//! ```text
//! F_munu(n) = A_nu(n + mu^) - A_nu(n) - A_mu(n + nu^) + A_mu(n),
//! ```
//!
//! antisymmetric in `(mu, nu)` and invariant under the lattice gauge
//! transformation `A_mu(n) -> A_mu(n) + L(n + mu^) - L(n)`. In three or
//! more directions the plaquettes of every elementary cube obey the
//! six-term Bianchi identity, which holds identically whenever `F` derives
//! from links.
//!
//! # References
//! - K. G. Wilson, "Confinement of quarks", Phys. Rev. D 10, 2445 (1974).

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{BoundaryCondition, LatticeGeometry, MAX_DIM};
use crate::{Error, Result};

/// Real-valued gauge potential `A_mu(n)`, one value per directed link.
///
/// Both boundary conditions store the full `D * N^D` layout; under open
/// boundaries the links leaving the lattice (`n_mu = N` in direction `mu`)
/// are pinned to exactly zero, which is validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkField {
    geom: LatticeGeometry,
    values: Vec<f64>,
}

impl LinkField {
    /// All-zero link field.
    #[must_use]
    pub fn zeros(geom: LatticeGeometry) -> Self {
        Self {
            geom,
            values: vec![0.0; geom.num_links()],
        }
    }

    /// Builds a link field from flat values in `link_index` order,
    /// validating length, finiteness, and the open-boundary zero convention.
    pub fn from_values(geom: LatticeGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geom.num_links() {
            return Err(Error::WrongLength {
                what: "link field",
                expected: geom.num_links(),
                got: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { what: "link field" });
        }
        let field = Self { geom, values };
        field.validate_boundary()?;
        Ok(field)
    }

    /// Seeded random configuration: every stored link is drawn uniformly
    /// from `[-pi, pi)` in `link_index` order, then the open-boundary slots
    /// are reset to zero. The draw order makes configurations reproducible
    /// across platforms for a fixed seed.
    #[must_use]
    pub fn random(geom: LatticeGeometry, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new(-std::f64::consts::PI, std::f64::consts::PI);
        let mut values: Vec<f64> = (0..geom.num_links()).map(|_| dist.sample(&mut rng)).collect();
        if geom.bc() == BoundaryCondition::Open {
            for coords in geom.sites() {
                for mu in 0..geom.dim() {
                    if geom.is_open_boundary_link(&coords[..geom.dim()], mu) {
                        values[geom.link_index(&coords[..geom.dim()], mu)] = 0.0;
                    }
                }
            }
        }
        Self { geom, values }
    }

    fn validate_boundary(&self) -> Result<()> {
        if self.geom.bc() != BoundaryCondition::Open {
            return Ok(());
        }
        for coords in self.geom.sites() {
            for mu in 0..self.geom.dim() {
                if self.geom.is_open_boundary_link(&coords[..self.geom.dim()], mu) {
                    let value = self.get(&coords[..self.geom.dim()], mu);
                    if value != 0.0 {
                        return Err(Error::BoundaryLinkNotZero { coords, mu, value });
                    }
                }
            }
        }
        Ok(())
    }

    /// Geometry the field lives on.
    #[must_use]
    pub fn geometry(&self) -> LatticeGeometry {
        self.geom
    }

    /// Link value `A_mu(n)`.
    #[must_use]
    pub fn get(&self, coords: &[usize], mu: usize) -> f64 {
        self.values[self.geom.link_index(coords, mu)]
    }

    /// Sets a link value (crate-internal; public construction goes through
    /// the validating constructors).
    pub(crate) fn set(&mut self, coords: &[usize], mu: usize, value: f64) {
        let idx = self.geom.link_index(coords, mu);
        self.values[idx] = value;
    }

    /// Flat value slice in `link_index` order.
    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest absolute difference against another field on the same
    /// geometry.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.geom != other.geom {
            return Err(Error::GeometryMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Serializes to the JSON interchange document
    /// `{"dim", "size", "bc", "links": [[coords..., mu, value], ...]}` with
    /// entries in lexicographic `(site, mu)` order, 1-based coordinates, and
    /// 0-based directions.
    #[must_use]
    pub fn to_json(&self) -> String {
        let dim = self.geom.dim();
        let mut links = Vec::with_capacity(self.geom.num_links());
        for coords in self.geom.sites() {
            for mu in 0..dim {
                let mut row: Vec<serde_json::Value> = Vec::with_capacity(dim + 2);
                for &c in &coords[..dim] {
                    row.push(serde_json::Value::from(c));
                }
                row.push(serde_json::Value::from(mu));
                row.push(serde_json::Value::from(self.get(&coords[..dim], mu)));
                links.push(serde_json::Value::Array(row));
            }
        }
        let doc = LinkFieldDoc {
            dim,
            size: self.geom.size(),
            bc: self.geom.bc(),
            links,
        };
        serde_json::to_string_pretty(&doc).expect("link-field document always serializes")
    }

    /// Parses the JSON interchange document, rejecting duplicate, missing,
    /// reordered, or out-of-range entries.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LinkFieldDoc = serde_json::from_str(text)?;
        let geom = LatticeGeometry::new(doc.dim, doc.size, doc.bc)?;
        if doc.links.len() != geom.num_links() {
            return Err(Error::WrongLength {
                what: "link entries",
                expected: geom.num_links(),
                got: doc.links.len(),
            });
        }
        let dim = geom.dim();
        let mut values = Vec::with_capacity(geom.num_links());
        let mut entries = doc.links.iter();
        for coords in geom.sites() {
            for mu in 0..dim {
                let entry = entries.next().expect("length checked above");
                let row = entry.as_array().ok_or_else(|| Error::MalformedJson {
                    reason: "link entry is not an array".into(),
                })?;
                if row.len() != dim + 2 {
                    return Err(Error::MalformedJson {
                        reason: format!("link entry has {} fields, expected {}", row.len(), dim + 2),
                    });
                }
                for (k, expected) in coords[..dim].iter().enumerate() {
                    let got = row[k].as_u64().ok_or_else(|| Error::MalformedJson {
                        reason: "link coordinate is not a non-negative integer".into(),
                    })?;
                    if got != *expected as u64 {
                        return Err(Error::MalformedJson {
                            reason: format!(
                                "link entries out of lexicographic order: coordinate {got} where {expected} was expected"
                            ),
                        });
                    }
                }
                let got_mu = row[dim].as_u64().ok_or_else(|| Error::MalformedJson {
                    reason: "link direction is not a non-negative integer".into(),
                })?;
                if got_mu != mu as u64 {
                    return Err(Error::MalformedJson {
                        reason: format!(
                            "link entries out of lexicographic order: direction {got_mu} where {mu} was expected"
                        ),
                    });
                }
                let value = row[dim + 1].as_f64().ok_or_else(|| Error::MalformedJson {
                    reason: "link value is not a number".into(),
                })?;
                values.push(value);
            }
        }
        Self::from_values(geom, values)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkFieldDoc {
    dim: usize,
    size: usize,
    bc: BoundaryCondition,
    links: Vec<serde_json::Value>,
}

/// Real scalar per site (gauge functions, vertex variables, phase fields).
///
/// Carries no normalization constraint of its own: gauge functions are
/// unconstrained, while the vertex field of a gauge-invariant representation
/// is normalized at the representation level.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexScalarField {
    geom: LatticeGeometry,
    values: Vec<f64>,
}

impl VertexScalarField {
    /// All-zero site scalar.
    #[must_use]
    pub fn zeros(geom: LatticeGeometry) -> Self {
        Self {
            geom,
            values: vec![0.0; geom.num_sites()],
        }
    }

    /// Builds from flat values in `site_index` order.
    pub fn from_values(geom: LatticeGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geom.num_sites() {
            return Err(Error::WrongLength {
                what: "site scalar",
                expected: geom.num_sites(),
                got: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { what: "site scalar" });
        }
        Ok(Self { geom, values })
    }

    /// Seeded random site scalar, uniform on `[-pi, pi)` per site.
    #[must_use]
    pub fn random(geom: LatticeGeometry, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new(-std::f64::consts::PI, std::f64::consts::PI);
        Self {
            geom,
            values: (0..geom.num_sites()).map(|_| dist.sample(&mut rng)).collect(),
        }
    }

    /// Geometry the field lives on.
    #[must_use]
    pub fn geometry(&self) -> LatticeGeometry {
        self.geom
    }

    /// Value at a site.
    #[must_use]
    pub fn get(&self, coords: &[usize]) -> f64 {
        self.values[self.geom.site_index(coords)]
    }

    pub(crate) fn set(&mut self, coords: &[usize], value: f64) {
        let idx = self.geom.site_index(coords);
        self.values[idx] = value;
    }

    /// Flat value slice in `site_index` order.
    #[must_use]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the all-`N` corner site `(N, ..., N)`.
    #[must_use]
    pub fn corner(&self) -> f64 {
        let coords = [self.geom.size(); MAX_DIM];
        self.get(&coords[..self.geom.dim()])
    }

    /// Largest absolute difference against another field on the same
    /// geometry.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.geom != other.geom {
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

/// Field strength `F_munu(n)` for every ordered pair `mu > nu`, antisymmetric
/// under index swap.
///
/// Under open boundaries plaquettes that would need sites outside the
/// lattice are excluded from the domain; their stored slots read 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaquetteField {
    geom: LatticeGeometry,
    /// One flat site grid per ordered pair, pairs in `pair_index` order.
    values: Vec<f64>,
}

impl PlaquetteField {
    /// Index of the ordered pair `(mu, nu)`, `mu > nu`, in the sequence
    /// (1,0), (2,0), (2,1), (3,0), (3,1), (3,2).
    #[must_use]
    pub fn pair_index(mu: usize, nu: usize) -> usize {
        debug_assert!(mu > nu, "pair index wants mu > nu, got ({mu},{nu})");
        mu * (mu - 1) / 2 + nu
    }

    /// Number of unordered direction pairs, `D (D - 1) / 2`.
    #[must_use]
    pub fn num_pairs(geom: &LatticeGeometry) -> usize {
        geom.dim() * (geom.dim() - 1) / 2
    }

    /// All-zero plaquette field.
    #[must_use]
    pub fn zeros(geom: LatticeGeometry) -> Self {
        Self {
            geom,
            values: vec![0.0; Self::num_pairs(&geom) * geom.num_sites()],
        }
    }

    /// Geometry the field lives on.
    #[must_use]
    pub fn geometry(&self) -> LatticeGeometry {
        self.geom
    }

    /// Component `F_munu(n)` for any `mu != nu`, resolving antisymmetry;
    /// out-of-domain open-boundary slots read 0.
    #[must_use]
    pub fn get(&self, mu: usize, nu: usize, coords: &[usize]) -> f64 {
        debug_assert_ne!(mu, nu, "field strength needs two distinct directions");
        let site = self.geom.site_index(coords);
        if mu > nu {
            self.values[Self::pair_index(mu, nu) * self.geom.num_sites() + site]
        } else {
            -self.values[Self::pair_index(nu, mu) * self.geom.num_sites() + site]
        }
    }

    pub(crate) fn set(&mut self, mu: usize, nu: usize, coords: &[usize], value: f64) {
        debug_assert!(mu > nu);
        let site = self.geom.site_index(coords);
        self.values[Self::pair_index(mu, nu) * self.geom.num_sites() + site] = value;
    }

    /// Largest absolute difference against another plaquette field on the
    /// same geometry.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.geom != other.geom {
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

/// Computes the field strength of a link configuration,
/// `F_munu(n) = A_nu(n+mu^) - A_nu(n) - A_mu(n+nu^) + A_mu(n)`.
///
/// Under open boundaries only plaquettes with `n_mu < N` and `n_nu < N` are
/// in the domain; the remaining slots stay 0. Under periodic boundaries the
/// neighbor arithmetic wraps.
#[must_use]
pub fn field_strength(links: &LinkField) -> PlaquetteField {
    let geom = links.geometry();
    let dim = geom.dim();
    let size = geom.size();
    let open = geom.bc() == BoundaryCondition::Open;
    let mut plaq = PlaquetteField::zeros(geom);
    for coords in geom.sites() {
        for mu in 1..dim {
            for nu in 0..mu {
                if open && (coords[mu] == size || coords[nu] == size) {
                    continue;
                }
                let up_mu = geom.neighbor(coords, mu).expect("in-domain step");
                let up_nu = geom.neighbor(coords, nu).expect("in-domain step");
                let value = links.get(&up_mu[..dim], nu) - links.get(&coords[..dim], nu)
                    - links.get(&up_nu[..dim], mu)
                    + links.get(&coords[..dim], mu);
                plaq.set(mu, nu, &coords[..dim], value);
            }
        }
    }
    plaq
}

/// Maximum over all sites and direction triples of the six-term Bianchi
/// combination
/// `F_munu(n+a^) - F_munu(n) + F_amu(n+nu^) - F_amu(n) + F_nua(n+mu^) - F_nua(n)`.
///
/// Requires at least three directions; under open boundaries only cubes with
/// `n_mu, n_nu, n_a < N` contribute.
pub fn bianchi_residual(plaq: &PlaquetteField) -> Result<f64> {
    let geom = plaq.geometry();
    let dim = geom.dim();
    if dim < 3 {
        return Err(Error::BianchiNeedsThreeDirections { dim });
    }
    let size = geom.size();
    let open = geom.bc() == BoundaryCondition::Open;
    let mut worst: f64 = 0.0;
    for coords in geom.sites() {
        for mu in 2..dim {
            for nu in 1..mu {
                for alpha in 0..nu {
                    if open
                        && (coords[mu] == size || coords[nu] == size || coords[alpha] == size)
                    {
                        continue;
                    }
                    let up_mu = geom.neighbor(coords, mu).expect("in-domain step");
                    let up_nu = geom.neighbor(coords, nu).expect("in-domain step");
                    let up_alpha = geom.neighbor(coords, alpha).expect("in-domain step");
                    let c = &coords[..dim];
                    let residual = plaq.get(mu, nu, &up_alpha[..dim]) - plaq.get(mu, nu, c)
                        + plaq.get(alpha, mu, &up_nu[..dim])
                        - plaq.get(alpha, mu, c)
                        + plaq.get(nu, alpha, &up_mu[..dim])
                        - plaq.get(nu, alpha, c);
                    worst = worst.max(residual.abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Applies the lattice gauge transformation
/// `A_mu(n) -> A_mu(n) + L(n+mu^) - L(n)`.
///
/// The gauge function is unconstrained. Under open boundaries only the bulk
/// links (`n_mu < N`) transform — the boundary slots have no outgoing
/// neighbor and stay pinned at zero, so the open-boundary convention can
/// never be violated. Under periodic boundaries every link transforms with
/// wrapped neighbor arithmetic.
pub fn apply_gauge_transformation(
    links: &LinkField,
    lambda: &VertexScalarField,
) -> Result<LinkField> {
    let geom = links.geometry();
    if lambda.geometry() != geom {
        return Err(Error::GeometryMismatch);
    }
    let dim = geom.dim();
    let mut out = links.clone();
    for coords in geom.sites() {
        for mu in 0..dim {
            match geom.neighbor(coords, mu) {
                Some(up) => {
                    let shifted = links.get(&coords[..dim], mu) + lambda.get(&up[..dim])
                        - lambda.get(&coords[..dim]);
                    out.set(&coords[..dim], mu, shifted);
                }
                None => {
                    // Open-boundary slot: stays at its pinned zero value.
                }
            }
        }
    }
    Ok(out)
}

/// Wilson line sum `f_mu = sum_{n_mu = 1..N} A_mu` along the straight
/// periodic line with the given transverse coordinates (the coordinates of
/// all directions except `mu`, in ascending direction order).
///
/// Defined for periodic boundaries only; the straight line is not a closed
/// loop under open boundaries.
pub fn wilson_line_sum(links: &LinkField, mu: usize, transverse: &[usize]) -> Result<f64> {
    let geom = links.geometry();
    if geom.bc() != BoundaryCondition::Periodic {
        return Err(Error::OpenBoundaryLoops);
    }
    let dim = geom.dim();
    debug_assert_eq!(transverse.len(), dim - 1, "one coordinate per transverse direction");
    let mut coords = [1usize; MAX_DIM];
    let mut t = transverse.iter();
    for nu in 0..dim {
        if nu != mu {
            coords[nu] = *t.next().expect("length checked");
        }
    }
    let mut total = 0.0;
    for c_mu in 1..=geom.size() {
        coords[mu] = c_mu;
        total += links.get(&coords[..dim], mu);
    }
    Ok(total)
}
