// SPDX-License-Identifier: AGPL-3.0-only

//! Non-compact Wilson action in link and in strip variables, in 2+1
//! dimensions with open boundaries.
//!
//! The link-variable action is the generic plaquette sum
//!
//! ```text
//! S = beta * sum_{mu > nu} sum_n F_munu(n)^2.
//! ```
//!
//! In the asymmetric strip construction with three directions the field
//! strength is a local difference of the three independent strips
//! `a = Fbar_10`, `c = Fbar_20` (full grid) and `b = Fbar_21` (stored on
//! the `n_0 = N` plane):
//!
//! ```text
//! F_10(n) = a(n) - a(n + 0^),
//! F_20(n) = c(n) - c(n + 0^),
//! F_21(n) = D_2 a(n) - D_1 c(n) - D_1 b(n_1, n_2),
//! ```
//!
//! with `D_mu x(n) = x(n + mu^) - x(n)` and zero extension past the edge.
//! Substituting these into the plaquette sum and expanding the square of
//! `F_21` — whose `b` term is independent of `n_0`, so its square
//! contributes `N` times one transverse plane — gives the strip-variable
//! form computed by [`action_from_strips`]:
//!
//! ```text
//! S = beta *  sum_n [ (D_0 a)^2 + (D_0 c)^2 ]
//!   + beta *  sum_{n_1<N, n_2<N, all n_0} [ (D_2 a)^2 + (D_1 c)^2
//!             - 2 (D_2 a)(D_1 c) - 2 (D_1 b)((D_2 a) - (D_1 c)) ]
//!   + beta * N * sum_{n_1<N, n_2<N} (D_1 b)^2.
//! ```
//!
//! The two paths agree to rounding accuracy for every configuration, which
//! is the content of the action-equivalence check.
//!
//! # References
//! - K. G. Wilson, "Confinement of quarks", Phys. Rev. D 10, 2445 (1974).

use crate::fields::{field_strength, LinkField, PlaquetteField};
use crate::geometry::{BoundaryCondition, LatticeGeometry};
use crate::giv::{Construction, GaugeInvariantRep, StripField};
use crate::{Error, Result};

/// Coupling of the plaquette action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionParams {
    beta: f64,
}

impl ActionParams {
    /// Validates `beta` finite and non-negative (zero turns both actions
    /// off identically).
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidParams {
                reason: format!("coupling beta must be finite and non-negative, got {beta}"),
            });
        }
        Ok(Self { beta })
    }

    /// The coupling.
    #[must_use]
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// The three independent strips of a (2+1)-dimensional asymmetric
/// representation with open boundaries: `a = Fbar_10` and `c = Fbar_20` on
/// the full grid, `b = Fbar_21` on the `n_0 = N` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct StripTriple2p1 {
    a: StripField,
    c: StripField,
    b: StripField,
}

impl StripTriple2p1 {
    /// Assembles a triple from its strips, validating pairs, pinning, and a
    /// shared three-direction open-boundary geometry.
    pub fn new(a: StripField, c: StripField, b: StripField) -> Result<Self> {
        let geom = a.geometry();
        if geom.dim() != 3 {
            return Err(Error::UnsupportedConstruction {
                construction: "asymmetric",
                dim: geom.dim(),
                operation: "strip action",
            });
        }
        if geom.bc() != BoundaryCondition::Open {
            return Err(Error::InvalidParams {
                reason: "the strip action is defined for open boundaries".into(),
            });
        }
        if c.geometry() != geom || b.geometry() != geom {
            return Err(Error::GeometryMismatch);
        }
        for (strip, pair) in [(&a, (1, 0, 0)), (&c, (2, 0, 0)), (&b, (2, 1, 1))] {
            if (strip.mu(), strip.nu(), strip.pinned()) != pair {
                return Err(Error::MalformedRep {
                    reason: format!(
                        "strip action triple expects pair ({},{}) with {} pinned coordinates, found ({},{}) with {}",
                        pair.0,
                        pair.1,
                        pair.2,
                        strip.mu(),
                        strip.nu(),
                        strip.pinned()
                    ),
                });
            }
        }
        Ok(Self { a, c, b })
    }

    /// Borrows the strips of a (2+1)-dimensional open-boundary asymmetric
    /// representation one-to-one.
    pub fn from_rep(rep: &GaugeInvariantRep) -> Result<Self> {
        if rep.construction() != Construction::Asymmetric || rep.geometry().dim() != 3 {
            return Err(Error::UnsupportedConstruction {
                construction: rep.construction().name(),
                dim: rep.geometry().dim(),
                operation: "strip action",
            });
        }
        let strip = |mu, nu| {
            rep.strip(mu, nu)
                .expect("validated asymmetric 3-direction layout")
                .clone()
        };
        Self::new(strip(1, 0), strip(2, 0), strip(2, 1))
    }

    /// Shared geometry.
    #[must_use]
    pub fn geometry(&self) -> LatticeGeometry {
        self.a.geometry()
    }

    /// Strip `Fbar_10` on the full grid.
    #[must_use]
    pub fn a(&self) -> &StripField {
        &self.a
    }

    /// Strip `Fbar_20` on the full grid.
    #[must_use]
    pub fn c(&self) -> &StripField {
        &self.c
    }

    /// Strip `Fbar_21` on the `n_0 = N` plane.
    #[must_use]
    pub fn b(&self) -> &StripField {
        &self.b
    }
}

/// Plaquette action `beta * sum F^2` from link variables (any geometry;
/// open-boundary configurations sum their bulk domain since the stored
/// field strength vanishes elsewhere).
#[must_use]
pub fn action_from_links(links: &LinkField, params: &ActionParams) -> f64 {
    let geom = links.geometry();
    let dim = geom.dim();
    let plaq = field_strength(links);
    let mut total = 0.0;
    for site in geom.sites() {
        for mu in 1..dim {
            for nu in 0..mu {
                let f = plaq.get(mu, nu, &site[..dim]);
                total += f * f;
            }
        }
    }
    params.beta() * total
}

/// Plaquette action evaluated directly in strip variables via the expanded
/// quadratic form (see the module documentation), without reconstructing
/// links or plaquettes.
#[must_use]
pub fn action_from_strips(triple: &StripTriple2p1, params: &ActionParams) -> f64 {
    let geom = triple.geometry();
    let size = geom.size();

    // Longitudinal group: (D_0 a)^2 + (D_0 c)^2 over all sites. Rows at
    // n_0 = N contribute nothing (zero slots and zero extension), so the
    // sweep stops one row early.
    let mut longitudinal = 0.0;
    for site in geom.sites() {
        if site[0] == size {
            continue;
        }
        let here = [site[0], site[1], site[2]];
        let up0 = [site[0] + 1, site[1], site[2]];
        let da = triple.a.get(&up0) - triple.a.get(&here);
        let dc = triple.c.get(&up0) - triple.c.get(&here);
        longitudinal += da * da + dc * dc;
    }

    // Planar group over n_1 < N, n_2 < N and every n_0.
    let mut planar = 0.0;
    for site in geom.sites() {
        if site[1] == size || site[2] == size {
            continue;
        }
        let here = [site[0], site[1], site[2]];
        let up1 = [site[0], site[1] + 1, site[2]];
        let up2 = [site[0], site[1], site[2] + 1];
        let d2a = triple.a.get(&up2) - triple.a.get(&here);
        let d1c = triple.c.get(&up1) - triple.c.get(&here);
        let d1b = triple.b.get(&[size, site[1] + 1, site[2]])
            - triple.b.get(&[size, site[1], site[2]]);
        planar += d2a * d2a + d1c * d1c - 2.0 * d2a * d1c - 2.0 * d1b * (d2a - d1c);
    }

    // Transverse group: one plane of (D_1 b)^2, weighted by the n_0 depth.
    let mut transverse = 0.0;
    for n1 in 1..size {
        for n2 in 1..size {
            let d1b = triple.b.get(&[size, n1 + 1, n2]) - triple.b.get(&[size, n1, n2]);
            transverse += d1b * d1b;
        }
    }

    params.beta() * (longitudinal + planar + size as f64 * transverse)
}

/// Field strength assembled from the strip triple by local differences
/// (see the module documentation), on the open-boundary plaquette domains.
#[must_use]
pub fn plaquettes_from_strips(triple: &StripTriple2p1) -> PlaquetteField {
    let geom = triple.geometry();
    let size = geom.size();
    let mut plaq = PlaquetteField::zeros(geom);
    for site in geom.sites() {
        let here = [site[0], site[1], site[2]];
        if site[0] < size && site[1] < size {
            let up0 = [site[0] + 1, site[1], site[2]];
            plaq.set(1, 0, &here, triple.a.get(&here) - triple.a.get(&up0));
        }
        if site[0] < size && site[2] < size {
            let up0 = [site[0] + 1, site[1], site[2]];
            plaq.set(2, 0, &here, triple.c.get(&here) - triple.c.get(&up0));
        }
        if site[1] < size && site[2] < size {
            let up1 = [site[0], site[1] + 1, site[2]];
            let up2 = [site[0], site[1], site[2] + 1];
            let d2a = triple.a.get(&up2) - triple.a.get(&here);
            let d1c = triple.c.get(&up1) - triple.c.get(&here);
            let d1b = triple.b.get(&[size, site[1] + 1, site[2]])
                - triple.b.get(&[size, site[1], site[2]]);
            plaq.set(2, 1, &here, d2a - d1c - d1b);
        }
    }
    plaq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::VertexScalarField;
    use crate::giv::{extract_giv, reconstruct_links};
    use crate::LatticeGeometry;

    fn open_geom(dim: usize, size: usize) -> LatticeGeometry {
        LatticeGeometry::new(dim, size, BoundaryCondition::Open).unwrap()
    }

    #[test]
    fn params_reject_negative_or_nonfinite_coupling() {
        assert!(ActionParams::new(1.0).is_ok());
        assert!(ActionParams::new(0.0).is_ok(), "zero coupling turns the action off");
        for bad in [-1.0, f64::NAN, f64::INFINITY] {
            assert!(
                matches!(ActionParams::new(bad), Err(Error::InvalidParams { .. })),
                "beta = {bad} must be rejected"
            );
        }
    }

    #[test]
    fn zero_coupling_makes_both_actions_vanish() {
        let g = open_geom(3, 3);
        let links = LinkField::random(g, 11);
        let rep = extract_giv(&links, Construction::Asymmetric, None).unwrap();
        let triple = StripTriple2p1::from_rep(&rep).unwrap();
        let off = ActionParams::new(0.0).unwrap();
        assert_eq!(action_from_links(&links, &off), 0.0);
        assert_eq!(action_from_strips(&triple, &off), 0.0);
    }

    #[test]
    fn single_plaquette_link_action_matches_hand_values() {
        // Two directions: one excited link makes one unit plaquette, S = beta.
        let g2 = open_geom(2, 2);
        let mut values = vec![0.0; g2.num_links()];
        values[g2.link_index(&[1, 1], 1)] = 1.0;
        let links2 = LinkField::from_values(g2, values).unwrap();
        let beta2 = ActionParams::new(2.0).unwrap();
        assert_eq!(action_from_links(&links2, &beta2), 2.0);

        // Three directions: the same link also borders one 2-1 plaquette,
        // F_21(1,1,1) = -1, so S = 2 beta.
        let g3 = open_geom(3, 2);
        let mut values = vec![0.0; g3.num_links()];
        values[g3.link_index(&[1, 1, 1], 1)] = 1.0;
        let links3 = LinkField::from_values(g3, values).unwrap();
        let beta = ActionParams::new(0.5).unwrap();
        assert!((action_from_links(&links3, &beta) - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn strip_action_agrees_with_the_link_action() {
        for size in [2usize, 3, 4] {
            for (i, beta) in [0.5, 1.0, 2.0].into_iter().enumerate() {
                let g = open_geom(3, size);
                let rep = GaugeInvariantRep::random(
                    g,
                    Construction::Asymmetric,
                    size as u64 * 100 + i as u64,
                )
                .unwrap();
                let params = ActionParams::new(beta).unwrap();
                let links = reconstruct_links(&rep).unwrap();
                let from_links = action_from_links(&links, &params);
                let triple = StripTriple2p1::from_rep(&rep).unwrap();
                let from_strips = action_from_strips(&triple, &params);
                let rel = (from_links - from_strips).abs() / from_links.abs().max(1.0);
                assert!(
                    rel <= 1e-10,
                    "size {size} beta {beta}: {from_links} vs {from_strips} (rel {rel})"
                );
            }
        }
        // The zero configuration has zero action along both paths.
        let g = open_geom(3, 3);
        let zero = GaugeInvariantRep::new(
            Construction::Asymmetric,
            VertexScalarField::zeros(g),
            vec![
                StripField::zeros(g, 1, 0, 0).unwrap(),
                StripField::zeros(g, 2, 0, 0).unwrap(),
                StripField::zeros(g, 2, 1, 1).unwrap(),
            ],
            Vec::new(),
            None,
        )
        .unwrap();
        let params = ActionParams::new(1.0).unwrap();
        let triple = StripTriple2p1::from_rep(&zero).unwrap();
        assert_eq!(action_from_strips(&triple, &params), 0.0);
        assert_eq!(
            action_from_links(&reconstruct_links(&zero).unwrap(), &params),
            0.0
        );
    }

    #[test]
    fn transverse_only_strip_action_is_the_weighted_plane_sum() {
        // With a = c = 0 the action reduces to beta * N * sum (D_1 b)^2.
        let size = 3;
        let g = open_geom(3, size);
        let phi = VertexScalarField::zeros(g);
        let a = StripField::zeros(g, 1, 0, 0).unwrap();
        let c = StripField::zeros(g, 2, 0, 0).unwrap();
        let mut b = StripField::zeros(g, 2, 1, 1).unwrap();
        let mut pattern = 0.6;
        for n1 in 1..size {
            for n2 in 1..size {
                b.set(&[size, n1, n2], pattern);
                pattern = (pattern * 3.7).rem_euclid(1.0);
            }
        }
        let mut hand = 0.0;
        for n1 in 1..size {
            for n2 in 1..size {
                let d1b = b.get(&[size, n1 + 1, n2]) - b.get(&[size, n1, n2]);
                hand += d1b * d1b;
            }
        }
        let beta = 1.25;
        let hand = beta * size as f64 * hand;

        let params = ActionParams::new(beta).unwrap();
        let triple = StripTriple2p1::new(a, c, b.clone()).unwrap();
        let from_strips = action_from_strips(&triple, &params);
        assert!(
            (from_strips - hand).abs() <= 1e-12,
            "strip path {from_strips} vs hand {hand}"
        );

        let rep = GaugeInvariantRep::new(
            Construction::Asymmetric,
            phi,
            vec![triple.a().clone(), triple.c().clone(), b],
            Vec::new(),
            None,
        )
        .unwrap();
        let from_links =
            action_from_links(&reconstruct_links(&rep).unwrap(), &params);
        assert!(
            (from_links - hand).abs() <= 1e-12,
            "link path {from_links} vs hand {hand}"
        );
    }

    #[test]
    fn plaquettes_from_strips_match_the_reconstructed_field_strength() {
        for size in [2usize, 3] {
            let g = open_geom(3, size);
            let rep = GaugeInvariantRep::random(g, Construction::Asymmetric, 9 + size as u64)
                .unwrap();
            let triple = StripTriple2p1::from_rep(&rep).unwrap();
            let direct = plaquettes_from_strips(&triple);
            let via_links = field_strength(&reconstruct_links(&rep).unwrap());
            let diff = direct.max_abs_diff(&via_links).unwrap();
            assert!(diff <= 1e-12, "size {size}: plaquette mismatch {diff}");
        }
    }

    #[test]
    fn triple_requires_the_three_direction_open_asymmetric_family() {
        let sym = GaugeInvariantRep::random(open_geom(3, 2), Construction::Symmetric, 1).unwrap();
        assert!(matches!(
            StripTriple2p1::from_rep(&sym),
            Err(Error::UnsupportedConstruction { .. })
        ));
        let flat = GaugeInvariantRep::random(open_geom(2, 2), Construction::Asymmetric, 1).unwrap();
        assert!(matches!(
            StripTriple2p1::from_rep(&flat),
            Err(Error::UnsupportedConstruction { .. })
        ));
        let periodic = LatticeGeometry::new(3, 2, BoundaryCondition::Periodic).unwrap();
        let wrapped = GaugeInvariantRep::random(periodic, Construction::Asymmetric, 1).unwrap();
        assert!(matches!(
            StripTriple2p1::from_rep(&wrapped),
            Err(Error::InvalidParams { .. })
        ));
    }
}
