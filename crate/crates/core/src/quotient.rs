//! The quotient of S^n by the cyclic group generated by the deck matrix `B`:
//! canonical orbit representatives, the fixed-point checks, and when a
//! projective map of S^n descends.
//!
//! `B` squares to `diag(-1, -1, 1, ..., 1)`, so the group it generates has
//! order four. Orbits and map identifications below use the whole group
//! `{I, B, B², B³}`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::liealg::DeckMatrix;
use crate::numkernel::{determinant, Matrix};
use crate::sampling;
use crate::sphere::{projective_distance, ProjectiveMap, SpherePoint, MAP_EQ_TOL};

/// Residual below which a map is taken to normalise the deck group.
pub const DESCENT_TOL: f64 = 1e-9;
const POINTWISE_SAMPLES: usize = 100;
const POINTWISE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSpace {
    deck: DeckMatrix,
}

impl QuotientSpace {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            deck: DeckMatrix::new(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.deck.n()
    }

    pub fn deck(&self) -> &DeckMatrix {
        &self.deck
    }

    /// Distinct points of the orbit of `v`, starting with `v`.
    pub fn orbit(&self, v: &SpherePoint) -> Vec<SpherePoint> {
        let b = self.deck.matrix();
        let mut out = vec![v.clone()];
        let mut cur = v.coords().clone();
        loop {
            // B is a signed permutation, so this product is exact
            cur = b * cur;
            if &cur == v.coords() {
                break;
            }
            let p = SpherePoint::new(cur.clone()).expect("orthogonal image of a unit vector");
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }
}

/// A point of the quotient, stored as the lexicographically largest member of
/// its orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPoint {
    representative: SpherePoint,
}

impl OrbitPoint {
    pub fn representative(&self) -> &SpherePoint {
        &self.representative
    }
}

fn lex_cmp(a: &SpherePoint, b: &SpherePoint) -> Ordering {
    for (x, y) in a.coords().iter().zip(b.coords().iter()) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

pub fn canonical_representative(q: &QuotientSpace, v: &SpherePoint) -> Result<OrbitPoint> {
    if v.dim() != q.deck.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.deck.dim(),
            found: v.dim(),
        });
    }
    let bv = q.deck.matrix() * v.coords();
    if &bv == v.coords() {
        return Err(Error::FixedPoint);
    }
    let representative = q
        .orbit(v)
        .into_iter()
        .max_by(lex_cmp)
        .expect("orbit contains v");
    Ok(OrbitPoint { representative })
}

/// Fixed-point checks for the deck transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeActionReport {
    /// `min_displacement >= 1`, `B² = I` and `det(B - I) != 0` together.
    pub free: bool,
    /// Smallest sampled `|Bv - v|`.
    pub min_displacement: f64,
    /// Exact `B² = I`.
    pub involution: bool,
    pub det_b_minus_i: f64,
    pub deck_order: usize,
    /// Every nontrivial power `B^k` lacks the eigenvalue 1.
    pub group_acts_freely: bool,
}

pub fn verify_free_action(
    q: &QuotientSpace,
    samples: usize,
    seed: u64,
) -> Result<FreeActionReport> {
    if samples < 100 {
        return Err(Error::TooFewSamples {
            min: 100,
            got: samples,
        });
    }
    let b = q.deck.matrix();
    let d = q.deck.dim();
    let id = Matrix::identity(d, d);
    let mut rng = sampling::rng(seed);
    let min_displacement = (0..samples)
        .map(|_| {
            let v = sampling::sphere_point(&mut rng, d);
            (b * v.coords() - v.coords()).norm()
        })
        .fold(f64::INFINITY, f64::min);
    let det_b_minus_i = determinant(&(b - &id))?;
    let involution = q.deck.is_involution();
    let deck_order = q.deck.order();
    let group_acts_freely =
        (1..deck_order).all(|k| determinant(&(q.deck.power(k) - &id)).is_ok_and(|det| det != 0.0));
    Ok(FreeActionReport {
        free: min_displacement >= 1.0 && involution && det_b_minus_i != 0.0,
        min_displacement,
        involution,
        det_b_minus_i,
        deck_order,
        group_acts_freely,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub descends: bool,
    /// `min ||ABA^{-1} ∓ T||` over `T in {B, B^{-1}}` after Frobenius
    /// normalisation.
    pub residual: f64,
    /// Pointwise orbit check; only run when the algebraic test passes.
    pub pointwise: Option<bool>,
}

/// Conjugation residual of `A` against the generators `B` and `B^{-1}`.
pub fn descent_residual(q: &QuotientSpace, map: &ProjectiveMap) -> Result<f64> {
    if map.dim() != q.deck.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.deck.dim(),
            found: map.dim(),
        });
    }
    let a = map.matrix();
    let inv = map.inverse()?;
    let conj = a * q.deck.matrix() * inv.matrix();
    let forward = projective_distance(&conj, q.deck.matrix());
    let backward = projective_distance(&conj, &q.deck.inverse());
    Ok(forward.min(backward))
}

/// Whether `a` maps orbits to orbits, checked on seeded points through
/// canonical representatives.
pub fn pointwise_consistent(
    q: &QuotientSpace,
    map: &ProjectiveMap,
    samples: usize,
    seed: u64,
) -> bool {
    let mut rng = sampling::rng(seed);
    let b = ProjectiveMap::new(q.deck.matrix().clone()).expect("B is orthogonal");
    (0..samples).all(|_| {
        let v = sampling::sphere_point(&mut rng, q.deck.dim());
        let direct = canonical_representative(q, &map.apply(&v));
        let via_deck = canonical_representative(q, &map.apply(&b.apply(&v)));
        match (direct, via_deck) {
            (Ok(x), Ok(y)) => {
                (x.representative.coords() - y.representative.coords()).norm() < POINTWISE_TOL
            }
            _ => false,
        }
    })
}

pub fn descends(q: &QuotientSpace, map: &ProjectiveMap) -> Result<Descent> {
    let residual = descent_residual(q, map)?;
    if residual >= DESCENT_TOL {
        return Ok(Descent {
            descends: false,
            residual,
            pointwise: None,
        });
    }
    let pointwise = pointwise_consistent(q, map, POINTWISE_SAMPLES, 0x0D15_EA5E);
    Ok(Descent {
        descends: pointwise,
        residual,
        pointwise: Some(pointwise),
    })
}

/// Whether two descending maps induce the same map of the quotient, i.e. the
/// second matrix is proportional to `B^k A` for some `k`.
pub fn same_quotient_map(
    q: &QuotientSpace,
    m1: &ProjectiveMap,
    m2: &ProjectiveMap,
) -> Result<bool> {
    for m in [m1, m2] {
        let residual = descent_residual(q, m)?;
        if residual >= DESCENT_TOL {
            return Err(Error::DoesNotDescend(residual));
        }
    }
    Ok(q.deck
        .group()
        .iter()
        .any(|g| projective_distance(m2.matrix(), &(g * m1.matrix())) < MAP_EQ_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::centralizer;
    use crate::numkernel::{matrix_exp, Vector};
    use crate::sampling;

    #[test]
    fn canonical_examples_n2() {
        let q = QuotientSpace::new(2).unwrap();
        let e1 = SpherePoint::basis(3, 0);
        assert_eq!(
            canonical_representative(&q, &e1).unwrap().representative(),
            &e1
        );
        let minus_e2 = SpherePoint::from_slice(&[0.0, -1.0, 0.0]).unwrap();
        assert_eq!(
            canonical_representative(&q, &minus_e2)
                .unwrap()
                .representative(),
            &e1
        );
        let e3 = SpherePoint::basis(3, 2);
        assert_eq!(q.orbit(&e3).len(), 2);
        assert_eq!(
            canonical_representative(&q, &e3).unwrap().representative(),
            &e3
        );
        let minus_e3 = SpherePoint::from_slice(&[0.0, 0.0, -1.0]).unwrap();
        assert_eq!(
            canonical_representative(&q, &minus_e3)
                .unwrap()
                .representative(),
            &e3
        );
    }

    #[test]
    fn orbit_of_generic_point_has_four_elements() {
        let q = QuotientSpace::new(3).unwrap();
        let v = sampling::sphere_point(&mut sampling::rng(1), 4);
        assert_eq!(q.orbit(&v).len(), 4);
    }

    #[test]
    fn canonical_is_deck_invariant_and_idempotent() {
        let q = QuotientSpace::new(3).unwrap();
        let mut rng = sampling::rng(2024);
        for _ in 0..1000 {
            let v = sampling::sphere_point(&mut rng, 4);
            let bv = SpherePoint::new(q.deck().matrix() * v.coords()).unwrap();
            let c = canonical_representative(&q, &v).unwrap();
            assert_eq!(canonical_representative(&q, &bv).unwrap(), c);
            assert_eq!(canonical_representative(&q, c.representative()).unwrap(), c);
            for w in q.orbit(&v) {
                assert_ne!(lex_cmp(c.representative(), &w), Ordering::Less);
            }
        }
    }

    #[test]
    fn free_action_n2() {
        let q = QuotientSpace::new(2).unwrap();
        let r = verify_free_action(&q, 10_000, 42).unwrap();
        assert!(r.min_displacement >= 1.41);
        assert!(r.min_displacement >= 2f64.sqrt() - 1e-9);
        assert!(r.det_b_minus_i != 0.0);
        // B has order four, and B² fixes e3.
        assert!(!r.involution);
        assert_eq!(r.deck_order, 4);
        assert!(!r.group_acts_freely);
        assert!(!r.free);
        assert!(matches!(
            verify_free_action(&q, 10, 42),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn det_b_minus_identity_n3() {
        // eigenvalues of B are ±i and -1 (twice): det(B - I) = (1 + 1)·(-2)² = 8
        let q = QuotientSpace::new(3).unwrap();
        let r = verify_free_action(&q, 100, 1).unwrap();
        assert!((r.det_b_minus_i - 8.0).abs() < 1e-12);
    }

    #[test]
    fn block_form_maps_descend() {
        let q = QuotientSpace::new(3).unwrap();
        let mut rng = sampling::rng(9);
        for _ in 0..5 {
            let a = sampling::block_form(&mut rng, 3);
            let d = descends(&q, &ProjectiveMap::new(a.matrix()).unwrap()).unwrap();
            assert!(d.descends);
            assert!(d.residual < 1e-12, "{}", d.residual);
            assert_eq!(d.pointwise, Some(true));
        }
        let b = ProjectiveMap::new(q.deck().matrix().clone()).unwrap();
        assert!(descends(&q, &b).unwrap().descends);
    }

    #[test]
    fn generic_map_does_not_descend() {
        let q = QuotientSpace::new(3).unwrap();
        let a = sampling::special_linear(&mut sampling::rng(4), 4);
        let d = descends(&q, &ProjectiveMap::new(a).unwrap()).unwrap();
        assert!(!d.descends);
        assert!(d.residual > 0.1);
        assert_eq!(d.pointwise, None);
    }

    #[test]
    fn reflection_conjugating_b_to_its_inverse_descends() {
        let q = QuotientSpace::new(2).unwrap();
        let r = Matrix::from_diagonal(&Vector::from_row_slice(&[1.0, -1.0, 1.0]));
        let d = descends(&q, &ProjectiveMap::new(r).unwrap()).unwrap();
        assert!(d.descends);
    }

    #[test]
    fn same_quotient_map_examples() {
        let q = QuotientSpace::new(3).unwrap();
        let a = sampling::block_form(&mut sampling::rng(17), 3).matrix();
        let m = ProjectiveMap::new(a.clone()).unwrap();
        let minus = ProjectiveMap::new(-&a).unwrap();
        let ba = ProjectiveMap::new(q.deck().matrix() * &a).unwrap();
        assert!(same_quotient_map(&q, &m, &minus).unwrap());
        assert!(same_quotient_map(&q, &m, &ba).unwrap());

        let c = centralizer(3).unwrap();
        let x = &c.basis[0];
        let flowed = ProjectiveMap::new(matrix_exp(x, 0.7).unwrap()).unwrap();
        let id = ProjectiveMap::identity(4);
        for g in q.deck().group() {
            assert!(projective_distance(flowed.matrix(), &g) > 1e-3);
        }
        assert!(!same_quotient_map(&q, &id, &flowed).unwrap());

        let generic =
            ProjectiveMap::new(sampling::special_linear(&mut sampling::rng(4), 4)).unwrap();
        assert!(matches!(
            same_quotient_map(&q, &id, &generic),
            Err(Error::DoesNotDescend(_))
        ));
    }
}
