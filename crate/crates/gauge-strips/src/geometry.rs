// SPDX-License-Identifier: AGPL-3.0-only

//! Hypercubic lattice geometry: site and link indexing for `N^D` lattices.
//!
//! Sites carry `D` integer coordinates `n_mu ∈ [1, N]` (lattice convention:
//! sites are counted from 1); directions are `mu ∈ 0..D`. Every site maps to
//! a flat index with coordinate 0 most significant:
//!
//! ```text
//! site_index(n)     = sum_mu (n_mu - 1) * N^(D-1-mu)
//! link_index(n, mu) = site_index(n) * D + mu
//! ```
//!
//! Both boundary conditions share this layout. Under open boundaries the
//! links that would leave the lattice (`n_mu = N` in direction `mu`) are
//! still stored; the field types pin them to zero. Under periodic boundaries
//! stepping past `N` wraps back to 1.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Maximum number of lattice directions supported by the fixed-size
/// coordinate arrays used throughout the crate.
pub const MAX_DIM: usize = 4;

/// Boundary condition of the hypercubic lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// Open boundaries: links leaving the lattice are stored but pinned to 0.
    Open,
    /// Periodic boundaries: coordinate arithmetic wraps modulo `N`.
    Periodic,
}

/// Geometry of a hypercubic lattice with `dim` directions of common linear
/// size `size`, owning all site/link index arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeGeometry {
    dim: usize,
    size: usize,
    bc: BoundaryCondition,
}

impl LatticeGeometry {
    /// Creates a lattice geometry with `dim ∈ {2, 3, 4}` directions and
    /// `size ≥ 2` sites per direction.
    pub fn new(dim: usize, size: usize, bc: BoundaryCondition) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension { dim });
        }
        if size < 2 {
            return Err(Error::SizeTooSmall { size });
        }
        Ok(Self { dim, size, bc })
    }

    /// Number of lattice directions `D` (spacetime or spatial, per use).
    #[must_use]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Linear size `N` shared by every direction.
    #[must_use]
    pub fn size(&self) -> usize {
        self.size
    }

    /// Boundary condition.
    #[must_use]
    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    /// Total number of sites, `N^D`.
    #[must_use]
    pub fn num_sites(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    /// Total number of stored links, `D * N^D` (both boundary conditions
    /// store the full layout; open boundaries pin the outgoing ones to zero).
    #[must_use]
    pub fn num_links(&self) -> usize {
        self.dim * self.num_sites()
    }

    /// Flat index of the site with the given 1-based coordinates
    /// (coordinate 0 most significant).
    #[must_use]
    pub fn site_index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len().min(MAX_DIM), coords.len());
        let mut idx = 0;
        for mu in 0..self.dim {
            let c = coords[mu];
            debug_assert!(
                (1..=self.size).contains(&c),
                "coordinate {c} out of range 1..={}",
                self.size
            );
            idx = idx * self.size + (c - 1);
        }
        idx
    }

    /// Inverse of [`site_index`](Self::site_index); unused trailing slots of
    /// the returned array are set to 1.
    #[must_use]
    pub fn site_coords(&self, index: usize) -> [usize; MAX_DIM] {
        debug_assert!(index < self.num_sites(), "site index {index} out of range");
        let mut coords = [1usize; MAX_DIM];
        let mut rest = index;
        for mu in (0..self.dim).rev() {
            coords[mu] = rest % self.size + 1;
            rest /= self.size;
        }
        coords
    }

    /// Flat index of the link at `coords` pointing in direction `mu`.
    #[must_use]
    pub fn link_index(&self, coords: &[usize], mu: usize) -> usize {
        debug_assert!(mu < self.dim, "direction {mu} out of range");
        self.site_index(coords) * self.dim + mu
    }

    /// Whether the link at `coords` in direction `mu` is an open-boundary
    /// slot (`n_mu = N` under open boundaries), pinned to zero by convention.
    #[must_use]
    pub fn is_open_boundary_link(&self, coords: &[usize], mu: usize) -> bool {
        self.bc == BoundaryCondition::Open && coords[mu] == self.size
    }

    /// Site reached by one positive step in direction `mu`: wraps `N → 1`
    /// under periodic boundaries, returns `None` past the edge under open
    /// boundaries.
    #[must_use]
    pub fn neighbor(&self, coords: [usize; MAX_DIM], mu: usize) -> Option<[usize; MAX_DIM]> {
        debug_assert!(mu < self.dim);
        let mut out = coords;
        if coords[mu] < self.size {
            out[mu] += 1;
            Some(out)
        } else {
            match self.bc {
                BoundaryCondition::Periodic => {
                    out[mu] = 1;
                    Some(out)
                }
                BoundaryCondition::Open => None,
            }
        }
    }

    /// Iterator over all sites in flat-index (lexicographic) order.
    #[must_use]
    pub fn sites(&self) -> SiteIter {
        self.sites_pinned(0)
    }

    /// Iterator over the sites whose first `pinned` coordinates are held at
    /// `N` while the remaining `D - pinned` coordinates sweep `1..=N`
    /// lexicographically. `pinned = 0` yields every site.
    #[must_use]
    pub fn sites_pinned(&self, pinned: usize) -> SiteIter {
        debug_assert!(pinned <= self.dim);
        let mut coords = [1usize; MAX_DIM];
        for slot in coords.iter_mut().take(pinned) {
            *slot = self.size;
        }
        SiteIter {
            coords,
            dim: self.dim,
            size: self.size,
            pinned,
            done: false,
        }
    }

    /// Flat index over the coordinates of the `D - 1` directions other than
    /// `mu`, in ascending direction order (used to address per-line data such
    /// as Wilson loops).
    #[must_use]
    pub fn transverse_index(&self, mu: usize, coords: &[usize]) -> usize {
        let mut idx = 0;
        for nu in 0..self.dim {
            if nu == mu {
                continue;
            }
            idx = idx * self.size + (coords[nu] - 1);
        }
        idx
    }

    /// Number of transverse coordinate tuples for one direction, `N^(D-1)`.
    #[must_use]
    pub fn num_transverse(&self) -> usize {
        self.size.pow(self.dim as u32 - 1)
    }
}

/// Lexicographic iterator over (a pinned-prefix slice of) the site grid.
#[derive(Debug, Clone)]
pub struct SiteIter {
    coords: [usize; MAX_DIM],
    dim: usize,
    size: usize,
    pinned: usize,
    done: bool,
}

impl Iterator for SiteIter {
    type Item = [usize; MAX_DIM];

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let current = self.coords;
        // Odometer increment on the free axes, last axis fastest.
        let mut axis = self.dim;
        loop {
            if axis == self.pinned {
                self.done = true;
                break;
            }
            axis -= 1;
            if self.coords[axis] < self.size {
                self.coords[axis] += 1;
                break;
            }
            self.coords[axis] = 1;
        }
        Some(current)
    }
}
