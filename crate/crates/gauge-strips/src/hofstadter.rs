// SPDX-License-Identifier: AGPL-3.0-only

//! Charged-particle spectra in uniform magnetic fields on the lattice:
//! real-space Peierls Hamiltonians, magnetic band matrices for both strip
//! constructions, reduced-zone grids, and the flux-versus-energy butterfly.
//!
//! A rational flux `Phi = 2 pi m / n` (coprime, `m >= 1`) threads every
//! plaquette. [`uniform_field_giv`] writes the field directly in the
//! gauge-invariant variables — strip profiles linear in one coordinate plus
//! the loop offsets that keep the seam plaquettes at the same flux — for
//! the asymmetric and symmetric constructions in two and three dimensions.
//! Reconstructing links from such a representation and applying the
//! Peierls substitution gives the hopping Hamiltonian
//!
//! ```text
//! H[r + j^, r] = -t exp(i A_j(r)),   H[r, r] = 0,
//! ```
//!
//! built by [`real_space_hamiltonian`]. Its spectrum is reproduced by
//! magnetic Bloch theory: [`band_matrix`] returns the moderate-sized
//! momentum-space matrix of the construction (order `n`, `(2n)^2`, `n^2`,
//! or `(3n)^3`), and [`spectrum`] sweeps it over the reduced-zone grid
//! ([`MbzGrid`]) so that the collected eigenvalues form exactly the same
//! multiset as exact diagonalization — the content of the
//! construction-equivalence checks. [`butterfly`] tabulates the band
//! energies over all reduced fluxes up to a denominator cap, the data
//! behind the classic recursive spectrum plot.
//!
//! Momenta use the reduced zone `k_j in [-pi / W_j, pi / W_j)` where `W_j`
//! is the magnetic enlargement of the unit cell in direction `j`; energies
//! are reported in units of the hopping amplitude `t`.
//!
//! # References
//! - D. R. Hofstadter, "Energy levels and wave functions of Bloch electrons
//!   in rational and irrational magnetic fields", Phys. Rev. B 14, 2239
//!   (1976).
//! - P. G. Harper, "Single band motion of conduction electrons in a uniform
//!   magnetic field", Proc. Phys. Soc. A 68, 874 (1955).
//! - R. Peierls, "Zur Theorie des Diamagnetismus von Leitungselektronen",
//!   Z. Phys. 80, 763 (1933).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{eigh, HermitianMatrix};
use crate::fields::{LinkField, VertexScalarField};
use crate::geometry::{BoundaryCondition, LatticeGeometry, MAX_DIM};
use crate::giv::{Construction, GaugeInvariantRep, LoopField, StripField, TransitionData};
use crate::{Error, Result};

/// Hard cap on the real-space Hamiltonian order (number of sites).
pub const MAX_HAMILTONIAN_ORDER: usize = 4096;

/// Largest butterfly flux denominator.
pub const MAX_BUTTERFLY_DENOMINATOR: u64 = 40;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Parameters of a uniform-field problem: flux `2 pi m / n` per plaquette,
/// lattice multiplier `kappa`, hopping amplitude `t`, and optional loop
/// holonomy offsets `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HofstadterParams {
    m: u64,
    n: u64,
    kappa: u64,
    t: f64,
    theta: [f64; MAX_DIM],
}

impl HofstadterParams {
    /// Validates `m >= 1`, `n >= 1`, `gcd(m, n) = 1`, `kappa >= 1`, and a
    /// finite nonzero hopping amplitude. Holonomy offsets start at zero.
    pub fn new(m: u64, n: u64, kappa: u64, t: f64) -> Result<Self> {
        if m == 0 || n == 0 || gcd(m, n) != 1 {
            return Err(Error::InvalidFlux { m, n });
        }
        if kappa == 0 {
            return Err(Error::InvalidParams {
                reason: "lattice multiplier kappa must be at least 1".into(),
            });
        }
        if !t.is_finite() || t == 0.0 {
            return Err(Error::InvalidParams {
                reason: format!("hopping amplitude must be finite and nonzero, got {t}"),
            });
        }
        Ok(Self {
            m,
            n,
            kappa,
            t,
            theta: [0.0; MAX_DIM],
        })
    }

    /// Replaces the loop holonomy offsets (one per direction, finite).
    pub fn with_theta(mut self, theta: [f64; MAX_DIM]) -> Result<Self> {
        if !theta.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite {
                what: "loop holonomy offsets",
            });
        }
        self.theta = theta;
        Ok(self)
    }

    /// Flux numerator.
    #[must_use]
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Flux denominator.
    #[must_use]
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Lattice multiplier.
    #[must_use]
    pub fn kappa(&self) -> u64 {
        self.kappa
    }

    /// Hopping amplitude.
    #[must_use]
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Loop holonomy offsets.
    #[must_use]
    pub fn theta(&self) -> &[f64; MAX_DIM] {
        &self.theta
    }

    /// Flux per plaquette, `2 pi m / n`.
    #[must_use]
    pub fn flux(&self) -> f64 {
        TAU * self.m as f64 / self.n as f64
    }

    /// Lattice extent commensurate with the magnetic cell of the
    /// construction: `kappa n` asymmetric, `2 kappa n` symmetric in two
    /// dimensions, `3 kappa n` symmetric in three.
    pub fn lattice_size(&self, construction: Construction, dim: usize) -> Result<usize> {
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension { dim });
        }
        let cell = match construction {
            Construction::Asymmetric => 1,
            Construction::Symmetric => dim as u64,
        };
        Ok((cell * self.kappa * self.n) as usize)
    }

    /// Periodic lattice geometry matching [`Self::lattice_size`].
    pub fn geometry(&self, construction: Construction, dim: usize) -> Result<LatticeGeometry> {
        LatticeGeometry::new(
            dim,
            self.lattice_size(construction, dim)?,
            BoundaryCondition::Periodic,
        )
    }
}

/// Sign of the uniform-field strip profile for pair `(mu, nu)`; the
/// resulting plaquette flux for `mu > nu` is `sign * Phi`.
fn uniform_strip_sign(dim: usize, mu: usize, nu: usize) -> f64 {
    if dim == 2 {
        if mu > nu {
            1.0
        } else {
            -1.0
        }
    } else if nu == (mu + 2) % 3 {
        1.0
    } else {
        -1.0
    }
}

/// Writes the uniform field `Phi = 2 pi m / n` per plaquette directly in
/// the gauge-invariant variables of a construction: vertex field zero,
/// strip profiles `sign * Phi * (N - r_nu)` with zero-extension slots, loop
/// offsets linear in the transverse coordinates plus the holonomies
/// `theta`, untwisted transition data.
pub fn uniform_field_giv(
    params: &HofstadterParams,
    construction: Construction,
    dim: usize,
) -> Result<GaugeInvariantRep> {
    let geom = params.geometry(construction, dim)?;
    let size = geom.size();
    let flux = params.flux();
    let scale = flux * size as f64;

    let phi = VertexScalarField::zeros(geom);

    let mut strips = Vec::new();
    for (mu, nu, pinned) in crate::giv::expected_strip_layout(construction, dim)? {
        let sign = uniform_strip_sign(dim, mu, nu);
        let mut strip = StripField::zeros(geom, mu, nu, pinned)?;
        for site in geom.sites_pinned(pinned) {
            if site[mu] == size || site[nu] == size {
                continue;
            }
            strip.set(&site[..dim], sign * flux * (size - site[nu]) as f64);
        }
        strips.push(strip);
    }

    let mut loops = Vec::with_capacity(dim);
    for mu in 0..dim {
        let mut lf = LoopField::zeros(geom, mu)?;
        for site in geom.sites() {
            if site[mu] != 1 {
                continue;
            }
            let value = match (dim, mu) {
                (2, 0) => scale * site[1] as f64,
                (2, 1) => -scale * site[0] as f64,
                (3, _) => scale * (site[(mu + 1) % 3] as f64 - site[(mu + 2) % 3] as f64),
                _ => unreachable!("dimension validated to 2 or 3"),
            };
            lf.set(&site[..dim], value + params.theta()[mu]);
        }
        loops.push(lf);
    }

    GaugeInvariantRep::new(
        construction,
        phi,
        strips,
        loops,
        Some(TransitionData::zero(dim)),
    )
}

/// Tight-binding Hamiltonian of a charged particle on a periodic lattice,
/// one state per site.
#[derive(Debug, Clone)]
pub struct RealSpaceHamiltonian {
    geom: LatticeGeometry,
    matrix: HermitianMatrix,
}

impl RealSpaceHamiltonian {
    /// Lattice the Hamiltonian acts on.
    #[must_use]
    pub fn geometry(&self) -> LatticeGeometry {
        self.geom
    }

    /// The Hermitian matrix, indexed by [`LatticeGeometry::site_index`].
    #[must_use]
    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// Matrix order (number of sites).
    #[must_use]
    pub fn order(&self) -> usize {
        self.matrix.order()
    }
}

/// Peierls substitution on a periodic link configuration in two or three
/// dimensions: `H[r + j^, r] = -t exp(i A_j(r))` accumulated over every
/// link (short directions produce doubled bonds), zero diagonal. The site
/// count is capped at [`MAX_HAMILTONIAN_ORDER`].
pub fn real_space_hamiltonian(links: &LinkField, t: f64) -> Result<RealSpaceHamiltonian> {
    let geom = links.geometry();
    let dim = geom.dim();
    if !(2..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension { dim });
    }
    if geom.bc() != BoundaryCondition::Periodic {
        return Err(Error::InvalidParams {
            reason: "the real-space Hamiltonian needs periodic boundary conditions".into(),
        });
    }
    if !t.is_finite() || t == 0.0 {
        return Err(Error::InvalidParams {
            reason: format!("hopping amplitude must be finite and nonzero, got {t}"),
        });
    }
    let order = geom.num_sites();
    if order > MAX_HAMILTONIAN_ORDER {
        return Err(Error::MatrixTooLarge {
            order,
            cap: MAX_HAMILTONIAN_ORDER,
        });
    }
    let mut h = HermitianMatrix::zeros(order);
    for site in geom.sites() {
        let from = geom.site_index(&site[..dim]);
        for mu in 0..dim {
            let neighbor = geom
                .neighbor(site, mu)
                .expect("periodic lattices always have neighbors");
            let to = geom.site_index(&neighbor[..dim]);
            let phase = Complex64::from_polar(1.0, links.get(&site[..dim], mu));
            h.add_hop(to, from, -t * phase);
        }
    }
    Ok(RealSpaceHamiltonian { geom, matrix: h })
}

/// Conjugates a real-space Hamiltonian by the diagonal unitary
/// `exp(-i phases(r))`: `H'[a, b] = exp(-i phases(r_a)) H[a, b]
/// exp(i phases(r_b))`. The spectrum is preserved exactly; the off-strip
/// hop phases move by the lattice gradient of `phases`.
pub fn phase_rotate_basis(
    h: &RealSpaceHamiltonian,
    phases: &VertexScalarField,
) -> Result<RealSpaceHamiltonian> {
    let geom = h.geometry();
    if phases.geometry() != geom {
        return Err(Error::GeometryMismatch);
    }
    let dim = geom.dim();
    let order = h.order();
    let factors: Vec<Complex64> = (0..order)
        .map(|a| {
            let site = geom.site_coords(a);
            Complex64::from_polar(1.0, phases.get(&site[..dim]))
        })
        .collect();
    // Rotate the upper triangle and mirror it so Hermiticity stays exact;
    // the diagonal is invariant under a diagonal conjugation.
    let mut rotated = HermitianMatrix::zeros(order);
    for a in 0..order {
        rotated.add_real_diag(a, h.matrix().get(a, a).re);
        for b in (a + 1)..order {
            let z = factors[a].conj() * h.matrix().get(a, b) * factors[b];
            rotated.add_hop(a, b, z);
        }
    }
    Ok(RealSpaceHamiltonian {
        geom,
        matrix: rotated,
    })
}

/// Exactly reduced magnetic shift `2 pi (index * m mod denom) / denom`.
fn reduced_shift(index: u64, m: u64, denom: u64) -> f64 {
    TAU * ((index * m) % denom) as f64 / denom as f64
}

/// Asymmetric-construction band matrix in two dimensions: order `n`,
/// diagonal `2 cos(k_1 + tau Phi)`, cyclic hop `exp(-i k_2)`.
fn band_2d_asym(m: u64, n: u64, k: &[f64], t: f64) -> HermitianMatrix {
    let order = n as usize;
    let mut h = HermitianMatrix::zeros(order);
    let hop = Complex64::from_polar(1.0, -k[1]);
    for tau in 0..n {
        h.add_real_diag(tau as usize, 2.0 * (k[0] + reduced_shift(tau, m, n)).cos());
        h.add_hop(tau as usize, ((tau + 1) % n) as usize, hop);
    }
    h.scale_real(-t);
    h
}

/// Symmetric-construction band matrix in two dimensions: order `(2n)^2`
/// with the halved flux `Phi/2 = 2 pi m / (2n)` entering both hop phases.
fn band_2d_sym(m: u64, n: u64, k: &[f64], t: f64) -> HermitianMatrix {
    let b = 2 * n;
    let order = (b * b) as usize;
    let idx = |tau: u64, lambda: u64| (tau * b + lambda) as usize;
    let mut h = HermitianMatrix::zeros(order);
    for tau in 0..b {
        for lambda in 0..b {
            h.add_hop(
                idx(tau, (lambda + 1) % b),
                idx(tau, lambda),
                Complex64::from_polar(1.0, -(k[0] + reduced_shift(tau, m, b))),
            );
            h.add_hop(
                idx(tau, lambda),
                idx((tau + 1) % b, lambda),
                Complex64::from_polar(1.0, -(k[1] + reduced_shift(lambda, m, b))),
            );
        }
    }
    h.scale_real(-t);
    h
}

/// Asymmetric-construction band matrix in three dimensions: order `n^2`,
/// diagonal `2 cos(k_1 + lambda Phi)`, two cyclic hops.
fn band_3d_asym(m: u64, n: u64, k: &[f64], t: f64) -> HermitianMatrix {
    let order = (n * n) as usize;
    let idx = |lambda: u64, tau: u64| (lambda * n + tau) as usize;
    let mut h = HermitianMatrix::zeros(order);
    let hop3 = Complex64::from_polar(1.0, -k[2]);
    for lambda in 0..n {
        for tau in 0..n {
            h.add_real_diag(
                idx(lambda, tau),
                2.0 * (k[0] + reduced_shift(lambda, m, n)).cos(),
            );
            h.add_hop(
                idx(lambda, tau),
                idx((lambda + 1) % n, tau),
                Complex64::from_polar(1.0, -(k[1] + reduced_shift(tau, m, n))),
            );
            h.add_hop(idx(lambda, tau), idx((lambda + n - 1) % n, (tau + 1) % n), hop3);
        }
    }
    h.scale_real(-t);
    h
}

/// Symmetric-construction band matrix in three dimensions: order `(3n)^3`
/// with the third of the flux, `Phi/3 = 2 pi m / (3n)`, entering all three
/// hop phases.
fn band_3d_sym(m: u64, n: u64, k: &[f64], t: f64) -> HermitianMatrix {
    let b = 3 * n;
    let order = (b * b * b) as usize;
    let idx = |tau: u64, eps: u64, lambda: u64| ((tau * b + eps) * b + lambda) as usize;
    let mut h = HermitianMatrix::zeros(order);
    for tau in 0..b {
        for eps in 0..b {
            for lambda in 0..b {
                h.add_hop(
                    idx(tau, (eps + 1) % b, (lambda + b - 2) % b),
                    idx(tau, eps, lambda),
                    Complex64::from_polar(1.0, -(k[0] + reduced_shift(tau, m, b))),
                );
                h.add_hop(
                    idx((tau + b - 2) % b, eps, (lambda + 1) % b),
                    idx(tau, eps, lambda),
                    Complex64::from_polar(1.0, -(k[1] + reduced_shift(eps, m, b))),
                );
                h.add_hop(
                    idx((tau + 1) % b, (eps + b - 2) % b, lambda),
                    idx(tau, eps, lambda),
                    Complex64::from_polar(1.0, -(k[2] + reduced_shift(lambda, m, b))),
                );
            }
        }
    }
    h.scale_real(-t);
    h
}

/// Magnetic enlargement `W_j` of the unit cell per direction.
fn mbz_widths(construction: Construction, dim: usize, n: u64) -> Result<Vec<u64>> {
    match (construction, dim) {
        (Construction::Asymmetric, 2) => Ok(vec![n, 1]),
        (Construction::Asymmetric, 3) => Ok(vec![n, n, 1]),
        (Construction::Symmetric, 2) => Ok(vec![2 * n, 2 * n]),
        (Construction::Symmetric, 3) => Ok(vec![3 * n, 3 * n, 3 * n]),
        _ => Err(Error::UnsupportedDimension { dim }),
    }
}

/// Magnetic band matrix of a construction at reduced-zone momentum `k`
/// (length `dim`, each `k_j` within `[-pi / W_j, pi / W_j)` up to a `1e-9`
/// slack). Orders: `n`, `(2n)^2`, `n^2`, `(3n)^3`.
pub fn band_matrix(
    params: &HofstadterParams,
    construction: Construction,
    dim: usize,
    k: &[f64],
) -> Result<HermitianMatrix> {
    if !(2..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension { dim });
    }
    if k.len() != dim {
        return Err(Error::WrongLength {
            what: "momentum",
            expected: dim,
            got: k.len(),
        });
    }
    if !k.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite { what: "momentum" });
    }
    let widths = mbz_widths(construction, dim, params.n())?;
    for (&kj, &w) in k.iter().zip(&widths) {
        let edge = PI / w as f64;
        if kj < -edge - 1e-9 || kj > edge + 1e-9 {
            return Err(Error::MomentumOutsideMbz { k: kj });
        }
    }
    let (m, n, t) = (params.m(), params.n(), params.t());
    Ok(match (construction, dim) {
        (Construction::Asymmetric, 2) => band_2d_asym(m, n, k, t),
        (Construction::Asymmetric, 3) => band_3d_asym(m, n, k, t),
        (Construction::Symmetric, 2) => band_2d_sym(m, n, k, t),
        (Construction::Symmetric, 3) => band_3d_sym(m, n, k, t),
        _ => unreachable!("dimension validated above"),
    })
}

/// Reduced-zone momenta along one axis: the full-zone grid
/// `k = 2 pi l / total - pi`, `l in [0, total)`, filtered to the magnetic
/// zone by the exact integer condition
/// `total (W - 1) <= 2 l W < total (W + 1)`.
fn axis_momenta(total: u64, width: u64) -> Vec<f64> {
    (0..total)
        .filter(|&l| 2 * l * width >= total * (width - 1) && 2 * l * width < total * (width + 1))
        .map(|l| TAU * l as f64 / total as f64 - PI)
        .collect()
}

/// The reduced-zone momentum grid of a construction: the lattice's discrete
/// momenta filtered per direction to the magnetic zone, combined
/// lexicographically (first direction slowest).
#[derive(Debug, Clone)]
pub struct MbzGrid {
    directions: Vec<Vec<f64>>,
}

impl MbzGrid {
    /// Builds the grid for the lattice extent of
    /// [`HofstadterParams::lattice_size`]; each direction keeps exactly
    /// `N / W_j` momenta.
    pub fn new(
        params: &HofstadterParams,
        construction: Construction,
        dim: usize,
    ) -> Result<Self> {
        let total = params.lattice_size(construction, dim)? as u64;
        let widths = mbz_widths(construction, dim, params.n())?;
        let directions: Vec<Vec<f64>> = widths
            .iter()
            .map(|&w| axis_momenta(total, w))
            .collect();
        for (ks, &w) in directions.iter().zip(&widths) {
            debug_assert_eq!(ks.len() as u64, total / w, "zone keeps total/width momenta");
        }
        Ok(Self { directions })
    }

    /// Momenta kept along each direction.
    #[must_use]
    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    /// Number of grid points.
    #[must_use]
    pub fn len(&self) -> usize {
        self.directions.iter().map(Vec::len).product()
    }

    /// Whether the grid is empty (it never is for valid parameters).
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All grid points in lexicographic order (first direction slowest).
    #[must_use]
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for axis in &self.directions {
            let mut next = Vec::with_capacity(points.len() * axis.len());
            for p in &points {
                for &k in axis {
                    let mut q = p.clone();
                    q.push(k);
                    next.push(q);
                }
            }
            points = next;
        }
        points
    }
}

/// One row of a band spectrum: a reduced-zone momentum, the band index
/// (ascending energy order), and the energy in units of `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    /// Reduced-zone momentum, length `dim`.
    pub k: Vec<f64>,
    /// Band index at this momentum, ascending with energy.
    pub band: usize,
    /// Energy in units of the hopping amplitude.
    pub energy: f64,
}

/// Band energies over the full reduced-zone grid; the energy multiset
/// matches exact diagonalization of the matching real-space Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandSpectrum {
    /// Number of momentum components per row.
    pub dim: usize,
    /// Rows in grid order, bands ascending within each momentum.
    pub rows: Vec<SpectrumRow>,
}

impl BandSpectrum {
    /// All energies (units of `t`), sorted ascending.
    #[must_use]
    pub fn energies_sorted(&self) -> Vec<f64> {
        let mut energies: Vec<f64> = self.rows.iter().map(|r| r.energy).collect();
        energies.sort_by(f64::total_cmp);
        energies
    }

    /// CSV document with header `k1,..,kD,band,energy`, floats in full
    /// precision.
    #[must_use]
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 1..=self.dim {
            out.push_str(&format!("k{j},"));
        }
        out.push_str("band,energy\n");
        for row in &self.rows {
            for kj in &row.k {
                out.push_str(&format!("{kj:.16e},"));
            }
            out.push_str(&format!("{},{:.16e}\n", row.band, row.energy));
        }
        out
    }
}

/// Sweeps the band matrix of a construction over its reduced-zone grid and
/// collects all `N^dim` energies in units of `t`.
pub fn spectrum(
    params: &HofstadterParams,
    construction: Construction,
    dim: usize,
) -> Result<BandSpectrum> {
    let grid = MbzGrid::new(params, construction, dim)?;
    let mut rows = Vec::new();
    for point in grid.points() {
        let h = band_matrix(params, construction, dim, &point)?;
        let eigen = eigh(&h, false)?;
        for (band, energy) in eigen.eigenvalues.iter().enumerate() {
            rows.push(SpectrumRow {
                k: point.clone(),
                band,
                energy: energy / params.t(),
            });
        }
    }
    Ok(BandSpectrum { dim, rows })
}

/// Multiset comparison of two energy lists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincideReport {
    /// Number of energies compared.
    pub size: usize,
    /// Largest absolute difference after sorting both lists.
    pub max_abs_diff: f64,
    /// Tolerance the comparison was made against.
    pub tol: f64,
    /// Whether `max_abs_diff <= tol`.
    pub pass: bool,
}

/// Compares two energy multisets by sorting and matching pointwise;
/// mismatched lengths are an error, not a failed comparison.
pub fn spectra_coincide(left: &[f64], right: &[f64], tol: f64) -> Result<CoincideReport> {
    if left.len() != right.len() {
        return Err(Error::SpectrumSizeMismatch {
            left: left.len(),
            right: right.len(),
        });
    }
    let mut a = left.to_vec();
    let mut b = right.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let max_abs_diff = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(CoincideReport {
        size: a.len(),
        max_abs_diff,
        tol,
        pass: max_abs_diff <= tol,
    })
}

/// Analytic half-flux (`Phi = pi`) band energies in units of `t` at one
/// momentum: `E = +-2 sqrt(sum_j cos^2 k_j)`, singly degenerate in two
/// dimensions (order 2) and doubly degenerate in three (order 4), returned
/// ascending to match the band matrix.
pub fn pi_flux_spectrum(k: &[f64]) -> Result<Vec<f64>> {
    let dim = k.len();
    if !(2..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension { dim });
    }
    let e = 2.0 * k.iter().map(|kj| kj.cos().powi(2)).sum::<f64>().sqrt();
    Ok(if dim == 2 {
        vec![-e, e]
    } else {
        vec![-e, -e, e, e]
    })
}

/// One butterfly row: reduced flux `2 pi m / n` and one band energy in
/// units of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ButterflyRow {
    /// Flux numerator, `0 <= m < n`, coprime with `n`.
    pub m: u64,
    /// Flux denominator.
    pub n: u64,
    /// Band energy in units of `t`.
    pub energy: f64,
}

/// Flux-versus-energy data of the two-dimensional asymmetric construction:
/// for every reduced flux the `n^2` energies of one magnetic cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ButterflyData {
    /// Rows ordered by `(n, m, energy)`.
    pub rows: Vec<ButterflyRow>,
}

impl ButterflyData {
    /// CSV document with header `m,n,energy`.
    #[must_use]
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,energy\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{:.16e}\n", row.m, row.n, row.energy));
        }
        out
    }
}

/// Tabulates the band energies of every reduced flux `2 pi m / n` with
/// `1 <= n <= n_max`, `0 <= m < n`, `gcd(m, n) = 1`, on the minimal
/// (`kappa = 1`) reduced-zone grid of the two-dimensional asymmetric
/// construction: `n` momenta times `n` bands per flux. Energies are in
/// units of `t`; `n_max` is capped at [`MAX_BUTTERFLY_DENOMINATOR`].
pub fn butterfly(n_max: u64) -> Result<ButterflyData> {
    if n_max == 0 {
        return Err(Error::InvalidParams {
            reason: "butterfly needs at least denominator 1".into(),
        });
    }
    if n_max > MAX_BUTTERFLY_DENOMINATOR {
        return Err(Error::ButterflyTooLarge {
            n_max,
            max: MAX_BUTTERFLY_DENOMINATOR,
        });
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        for m in 0..n {
            if gcd(m, n) != 1 {
                continue;
            }
            let k0s = axis_momenta(n, n);
            let k1s = axis_momenta(n, 1);
            let mut energies = Vec::with_capacity((n * n) as usize);
            for &k0 in &k0s {
                for &k1 in &k1s {
                    let h = band_2d_asym(m, n, &[k0, k1], 1.0);
                    energies.extend(eigh(&h, false)?.eigenvalues);
                }
            }
            energies.sort_by(f64::total_cmp);
            rows.extend(energies.into_iter().map(|energy| ButterflyRow { m, n, energy }));
        }
    }
    Ok(ButterflyData { rows })
}
