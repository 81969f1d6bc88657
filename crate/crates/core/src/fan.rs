//! Fans of strongly convex rational cones and the orbit poset of the
//! associated toric variety.
//!
//! A fan in `Z^n` determines a stratification of its toric variety by torus
//! orbits; orbits correspond to cones, with `dim(orbit) = n - dim(cone)`. The
//! orbit poset carries the Alexandroff order `s <= t` iff the cone of `t` is a
//! face of the cone of `s`, so the zero cone's orbit (the dense torus) is the
//! unique top element.

use crate::feas;
use crate::intlat::{self, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeSet;
use thiserror::Error;

pub type ConeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FanError {
    #[error("ray has all entries zero")]
    ZeroRay,
    #[error("ray has {got} entries, fan rank is {rank}")]
    RayRankMismatch { rank: usize, got: usize },
    #[error("unknown cone id {0}")]
    UnknownCone(ConeId),
    #[error("fan is invalid: {0}")]
    InvalidFan(String),
}

/// A rational polyhedral cone, stored by its primitive extreme ray generators
/// (sorted; the empty list is the zero cone).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cone {
    rank: usize,
    rays: Vec<Vec<BigInt>>,
}

fn primitivize(v: &[BigInt]) -> Result<Vec<BigInt>, FanError> {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return Err(FanError::ZeroRay);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

impl Cone {
    /// Builds a cone, normalizing generators to primitive vectors, removing
    /// duplicates, and dropping generators that are positive combinations of
    /// the others.
    pub fn new(rank: usize, rays: Vec<Vec<BigInt>>) -> Result<Cone, FanError> {
        let (c, _) = Cone::new_reporting(rank, rays)?;
        Ok(c)
    }

    /// As [`Cone::new`], also reporting whether normalization changed the
    /// input generator set.
    pub fn new_reporting(rank: usize, rays: Vec<Vec<BigInt>>) -> Result<(Cone, bool), FanError> {
        let original = rays.clone();
        let mut prim: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        for r in &rays {
            if r.len() != rank {
                return Err(FanError::RayRankMismatch { rank, got: r.len() });
            }
            prim.insert(primitivize(r)?);
        }
        let mut kept: Vec<Vec<BigInt>> = prim.into_iter().collect();
        // drop redundant generators
        let mut i = 0;
        while i < kept.len() {
            let candidate = kept[i].clone();
            let others: Vec<Vec<BigInt>> = kept
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, r)| r.clone())
                .collect();
            if feas::in_cone(&others, &candidate) {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        let changed = {
            let mut orig_sorted = original;
            orig_sorted.sort();
            orig_sorted.dedup();
            orig_sorted != kept
        };
        Ok((Cone { rank, rays: kept }, changed))
    }

    pub fn zero(rank: usize) -> Cone {
        Cone { rank, rays: Vec::new() }
    }

    pub fn from_i64(rank: usize, rays: &[&[i64]]) -> Cone {
        Cone::new(
            rank,
            rays.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .expect("valid literal rays")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn ray_matrix(&self) -> IntMatrix {
        if self.rays.is_empty() {
            IntMatrix::zeros(0, self.rank)
        } else {
            IntMatrix::from_rows(self.rays.clone())
        }
    }

    pub fn dim(&self) -> usize {
        intlat::row_rank(&self.ray_matrix())
    }

    pub fn is_strongly_convex(&self) -> bool {
        if self.rays.is_empty() {
            return true;
        }
        // pointed iff some functional is strictly positive on every generator
        feas::supporting_functional_exists(self.rank, &[], &self.rays)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        feas::in_cone(&self.rays, v)
    }
}

/// All faces of a strongly convex cone, including the zero cone and the cone
/// itself. A subset of the generators spans a face exactly when a supporting
/// functional vanishes on it and is strictly positive on the rest.
pub fn faces(c: &Cone) -> Vec<Cone> {
    let k = c.rays.len();
    assert!(k < 20, "face enumeration is exponential in the ray count");
    let mut masks: Vec<u32> = (0..(1u32 << k)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut out = Vec::new();
    for mask in masks {
        let zero_on: Vec<Vec<BigInt>> = (0..k)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| c.rays[i].clone())
            .collect();
        let positive_on: Vec<Vec<BigInt>> = (0..k)
            .filter(|&i| mask & (1 << i) == 0)
            .map(|i| c.rays[i].clone())
            .collect();
        if feas::supporting_functional_exists(c.rank, &zero_on, &positive_on) {
            out.push(Cone { rank: c.rank, rays: zero_on });
        }
    }
    out
}

/// Saturated sublattice `N_σ = span_Q(σ) ∩ Z^n`, as a canonical basis.
pub fn span_sublattice(c: &Cone) -> IntMatrix {
    intlat::saturate(&c.ray_matrix())
}

/// Interior witness: the sum of the primitive ray generators. It lies in the
/// cone and in no proper face (equivalently, in no proper face's span).
pub fn homotopy_grading(c: &Cone) -> Vec<BigInt> {
    let mut w = vec![BigInt::zero(); c.rank];
    for r in &c.rays {
        for (wi, ri) in w.iter_mut().zip(r) {
            *wi += ri;
        }
    }
    w
}

/// A fan: a finite set of cones in a common lattice. Construct with
/// [`Fan::generated_by`] (closes under faces, inserts the zero cone) or
/// [`Fan::from_cones`] (takes the list as given, for validation tests).
/// Cone ids are positions in the canonical ordering by (dimension, rays).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Fan {
    rank: usize,
    cones: Vec<Cone>,
    dims: Vec<usize>,
}

impl Fan {
    pub fn generated_by(rank: usize, generators: Vec<Cone>) -> Fan {
        let mut set: BTreeSet<Cone> = BTreeSet::new();
        set.insert(Cone::zero(rank));
        let mut queue: Vec<Cone> = generators;
        while let Some(c) = queue.pop() {
            assert_eq!(c.rank, rank, "cone rank must match fan rank");
            if set.contains(&c) {
                continue;
            }
            for f in faces(&c) {
                if !set.contains(&f) {
                    queue.push(f);
                }
            }
            set.insert(c);
        }
        Fan::sorted(rank, set.into_iter().collect())
    }

    pub fn from_cones(rank: usize, cones: Vec<Cone>) -> Fan {
        let set: BTreeSet<Cone> = cones.into_iter().collect();
        Fan::sorted(rank, set.into_iter().collect())
    }

    fn sorted(rank: usize, mut cones: Vec<Cone>) -> Fan {
        let mut with_dims: Vec<(usize, Cone)> =
            cones.drain(..).map(|c| (c.dim(), c)).collect();
        with_dims.sort();
        let dims = with_dims.iter().map(|(d, _)| *d).collect();
        let cones = with_dims.into_iter().map(|(_, c)| c).collect();
        Fan { rank, cones, dims }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cone(&self, id: ConeId) -> Result<&Cone, FanError> {
        self.cones.get(id).ok_or(FanError::UnknownCone(id))
    }

    pub fn cone_dim(&self, id: ConeId) -> usize {
        self.dims[id]
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn id_of(&self, c: &Cone) -> Option<ConeId> {
        self.cones.iter().position(|x| x == c)
    }

    /// The affine sub-fan consisting of one cone and its faces.
    pub fn star_chart(&self, id: ConeId) -> Result<Fan, FanError> {
        let c = self.cone(id)?;
        Ok(Fan::generated_by(self.rank, vec![c.clone()]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanViolation {
    NotStronglyConvex { cone: ConeId },
    MissingZeroCone,
    MissingFace { cone: ConeId, face: Cone },
    BadIntersection { a: ConeId, b: ConeId },
}

impl std::fmt::Display for FanViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FanViolation::NotStronglyConvex { cone } => {
                write!(f, "cone {cone} is not strongly convex")
            }
            FanViolation::MissingZeroCone => write!(f, "fan does not contain the zero cone"),
            FanViolation::MissingFace { cone, face } => {
                write!(f, "fan is missing a face of cone {cone}: rays {:?}", face.rays())
            }
            FanViolation::BadIntersection { a, b } => {
                write!(f, "cones {a} and {b} do not intersect in a common face")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanReport {
    pub violations: Vec<FanViolation>,
}

impl FanReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every fan invariant and reports each violation; never aborts.
pub fn validate_fan(fan: &Fan) -> FanReport {
    let mut violations = Vec::new();

    let mut all_convex = true;
    for (id, c) in fan.cones().iter().enumerate() {
        if !c.is_strongly_convex() {
            violations.push(FanViolation::NotStronglyConvex { cone: id });
            all_convex = false;
        }
    }
    if !fan.cones().iter().any(Cone::is_zero) {
        violations.push(FanViolation::MissingZeroCone);
    }
    if !all_convex {
        // face enumeration assumes pointed cones
        return FanReport { violations };
    }

    let face_lists: Vec<Vec<Cone>> = fan.cones().iter().map(faces).collect();
    let present: BTreeSet<&Cone> = fan.cones().iter().collect();
    for (id, fl) in face_lists.iter().enumerate() {
        for f in fl {
            if !present.contains(f) {
                violations.push(FanViolation::MissingFace { cone: id, face: f.clone() });
            }
        }
    }

    for a in 0..fan.len() {
        for b in (a + 1)..fan.len() {
            if !cones_intersect_in_common_face(fan, &face_lists, a, b) {
                violations.push(FanViolation::BadIntersection { a, b });
            }
        }
    }

    FanReport { violations }
}

/// Two cones of a fan meet in a common face exactly when some functional is
/// nonnegative on one, nonpositive on the other, and vanishes precisely on a
/// face shared by both.
fn cones_intersect_in_common_face(
    fan: &Fan,
    face_lists: &[Vec<Cone>],
    a: ConeId,
    b: ConeId,
) -> bool {
    let ca = &fan.cones()[a];
    let cb = &fan.cones()[b];
    for fa in &face_lists[a] {
        for fb in &face_lists[b] {
            if fa != fb {
                continue;
            }
            let zero_on: Vec<Vec<BigInt>> = fa.rays().to_vec();
            let pos: Vec<Vec<BigInt>> = ca
                .rays()
                .iter()
                .filter(|r| !fa.rays().contains(r))
                .cloned()
                .collect();
            let neg: Vec<Vec<BigInt>> = cb
                .rays()
                .iter()
                .filter(|r| !fb.rays().contains(r))
                .cloned()
                .collect();
            if feas::separating_functional_exists(fan.rank(), &zero_on, &pos, &neg) {
                return true;
            }
        }
    }
    false
}

/// The orbit poset of a fan: one element per cone, `s <= t` iff the cone of
/// `t` is a face of the cone of `s`. Orbit dimension is `rank - dim(cone)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrbitPoset {
    rank: usize,
    len: usize,
    leq: Vec<Vec<bool>>,
    orbit_dim: Vec<usize>,
    covers: Vec<(ConeId, ConeId)>,
    top: ConeId,
}

impl OrbitPoset {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn objects(&self) -> impl Iterator<Item = ConeId> {
        0..self.len
    }

    pub fn leq(&self, s: ConeId, t: ConeId) -> bool {
        self.leq[s][t]
    }

    pub fn orbit_dim(&self, s: ConeId) -> usize {
        self.orbit_dim[s]
    }

    pub fn top(&self) -> ConeId {
        self.top
    }

    /// Covering relations `s ⋖ t`.
    pub fn covers(&self) -> &[(ConeId, ConeId)] {
        &self.covers
    }

    pub fn up_set(&self, s: ConeId) -> BTreeSet<ConeId> {
        self.objects().filter(|&t| self.leq(s, t)).collect()
    }

    pub fn down_set(&self, s: ConeId) -> BTreeSet<ConeId> {
        self.objects().filter(|&t| self.leq(t, s)).collect()
    }

    pub fn all_objects(&self) -> BTreeSet<ConeId> {
        self.objects().collect()
    }

    pub fn is_upward_closed(&self, set: &BTreeSet<ConeId>) -> bool {
        set.iter()
            .all(|&s| self.objects().all(|t| !self.leq(s, t) || set.contains(&t)))
    }

    pub fn is_downward_closed(&self, set: &BTreeSet<ConeId>) -> bool {
        set.iter()
            .all(|&s| self.objects().all(|t| !self.leq(t, s) || set.contains(&t)))
    }

    /// Convex: closed under taking intermediate elements.
    pub fn is_convex(&self, set: &BTreeSet<ConeId>) -> bool {
        for &a in set {
            for &b in set {
                if !self.leq(a, b) {
                    continue;
                }
                for x in self.objects() {
                    if self.leq(a, x) && self.leq(x, b) && !set.contains(&x) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn minimal_in(&self, set: &BTreeSet<ConeId>) -> Vec<ConeId> {
        set.iter()
            .copied()
            .filter(|&s| set.iter().all(|&t| t == s || !self.leq(t, s)))
            .collect()
    }

    /// Objects of `set` in a linear extension of the order (orbit dimension,
    /// then id); minimal elements come first.
    pub fn linear_extension(&self, set: &BTreeSet<ConeId>) -> Vec<ConeId> {
        let mut v: Vec<ConeId> = set.iter().copied().collect();
        v.sort_by_key(|&s| (self.orbit_dim(s), s));
        v
    }

    /// Covering pairs with both endpoints in `set`. For convex `set` these are
    /// exactly the covering relations of the induced subposet.
    pub fn covers_within(&self, set: &BTreeSet<ConeId>) -> Vec<(ConeId, ConeId)> {
        self.covers
            .iter()
            .copied()
            .filter(|(s, t)| set.contains(s) && set.contains(t))
            .collect()
    }
}

/// Builds the orbit poset; rejects invalid fans.
pub fn orbit_poset(fan: &Fan) -> Result<OrbitPoset, FanError> {
    let report = validate_fan(fan);
    if !report.is_valid() {
        let msg = report
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(FanError::InvalidFan(msg));
    }

    let n = fan.len();
    let face_sets: Vec<BTreeSet<Cone>> = fan
        .cones()
        .iter()
        .map(|c| faces(c).into_iter().collect())
        .collect();
    let mut leq = vec![vec![false; n]; n];
    for (s, row) in leq.iter_mut().enumerate() {
        // s <= t iff σ_t is a face of σ_s
        for (entry, cone) in row.iter_mut().zip(fan.cones()) {
            *entry = face_sets[s].contains(cone);
        }
    }
    let orbit_dim: Vec<usize> = (0..n).map(|s| fan.rank() - fan.cone_dim(s)).collect();
    let mut covers = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s == t || !leq[s][t] {
                continue;
            }
            let strict_between =
                (0..n).any(|x| x != s && x != t && leq[s][x] && leq[x][t]);
            if !strict_between {
                covers.push((s, t));
            }
        }
    }
    let top = fan
        .cones()
        .iter()
        .position(Cone::is_zero)
        .expect("validated fans contain the zero cone");
    Ok(OrbitPoset { rank: fan.rank(), len: n, leq, orbit_dim, covers, top })
}

/// `(S_{>=s}, S_{<=s})`: the star (orbits of the affine chart at `s`) and the
/// closure of the orbit.
pub fn star_and_closure(
    p: &OrbitPoset,
    s: ConeId,
) -> Result<(BTreeSet<ConeId>, BTreeSet<ConeId>), FanError> {
    if s >= p.len() {
        return Err(FanError::UnknownCone(s));
    }
    Ok((p.up_set(s), p.down_set(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fans;

    #[test]
    fn cone_normalization() {
        let (c, changed) =
            Cone::new_reporting(2, vec![vec![BigInt::from(2), BigInt::from(0)]]).unwrap();
        assert!(changed);
        assert_eq!(c.rays(), &[vec![BigInt::from(1), BigInt::from(0)]]);

        let (c, changed) =
            Cone::new_reporting(1, vec![vec![BigInt::from(1)]]).unwrap();
        assert!(!changed);
        assert_eq!(c.dim(), 1);

        assert_eq!(
            Cone::new(2, vec![vec![BigInt::from(0), BigInt::from(0)]]),
            Err(FanError::ZeroRay)
        );
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let c = Cone::from_i64(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(c.rays().len(), 2);
    }

    #[test]
    fn faces_of_quadrant() {
        // oracle: brute-force over ray subsets with a supporting-functional
        // check is the implementation itself; pin the expected list instead
        let c = Cone::from_i64(2, &[&[1, 0], &[0, 1]]);
        let fs = faces(&c);
        assert_eq!(fs.len(), 4);
        assert!(fs.contains(&Cone::zero(2)));
        assert!(fs.contains(&Cone::from_i64(2, &[&[1, 0]])));
        assert!(fs.contains(&Cone::from_i64(2, &[&[0, 1]])));
        assert!(fs.contains(&c));
    }

    #[test]
    fn faces_trivial_cases() {
        assert_eq!(faces(&Cone::zero(2)), vec![Cone::zero(2)]);
        let half = Cone::from_i64(1, &[&[1]]);
        let fs = faces(&half);
        assert_eq!(fs, vec![Cone::zero(1), half.clone()]);
    }

    #[test]
    fn simplicial_cone_has_two_to_the_d_faces() {
        let c = Cone::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(faces(&c).len(), 8);
    }

    #[test]
    fn non_simplicial_face_count() {
        // cone over a square: 1 + 4 + 4 + 1 faces
        let c = Cone::from_i64(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        assert_eq!(c.rays().len(), 4);
        assert_eq!(faces(&c).len(), 10);
    }

    #[test]
    fn line_is_not_strongly_convex() {
        let c = Cone::from_i64(1, &[&[1], &[-1]]);
        assert!(!c.is_strongly_convex());
        let fan = Fan::from_cones(1, vec![Cone::zero(1), c]);
        let report = validate_fan(&fan);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, FanViolation::NotStronglyConvex { .. })));
    }

    #[test]
    fn affine_line_fan_is_valid() {
        let fan = fans::affine(1);
        assert!(validate_fan(&fan).is_valid());
        let p = orbit_poset(&fan).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.leq(1, 0) && !p.leq(0, 1));
        assert_eq!(p.top(), 0);
    }

    #[test]
    fn incomplete_projective_plane_fan_is_valid() {
        // P^2 fan with one maximal cone deleted but its rays kept
        let rays: [&[i64]; 3] = [&[1, 0], &[0, 1], &[-1, -1]];
        let fan = Fan::generated_by(
            2,
            vec![
                Cone::from_i64(2, &[rays[0], rays[1]]),
                Cone::from_i64(2, &[rays[1], rays[2]]),
                Cone::from_i64(2, &[rays[2]]),
            ],
        );
        assert!(validate_fan(&fan).is_valid());
        assert_eq!(fan.len(), 6);
    }

    #[test]
    fn intersection_closure_violation_is_reported() {
        // two 2-cones overlapping in a 2-dimensional region
        let a = Cone::from_i64(2, &[&[1, 0], &[0, 1]]);
        let b = Cone::from_i64(2, &[&[1, 1], &[-1, 1]]);
        let mut cones = vec![Cone::zero(2), a.clone(), b.clone()];
        cones.extend(faces(&a));
        cones.extend(faces(&b));
        let fan = Fan::from_cones(2, cones);
        let report = validate_fan(&fan);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, FanViolation::BadIntersection { .. })));
    }

    #[test]
    fn missing_face_is_reported() {
        let quadrant = Cone::from_i64(2, &[&[1, 0], &[0, 1]]);
        let fan = Fan::from_cones(2, vec![Cone::zero(2), quadrant]);
        let report = validate_fan(&fan);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, FanViolation::MissingFace { .. })));
    }

    #[test]
    fn projective_line_poset() {
        let p = orbit_poset(&fans::projective(1)).unwrap();
        assert_eq!(p.len(), 3);
        let minimal: Vec<ConeId> = p.minimal_in(&p.all_objects());
        assert_eq!(minimal.len(), 2);
        assert_eq!(p.orbit_dim(p.top()), 1);
    }

    #[test]
    fn projective_plane_poset_shape() {
        let p = orbit_poset(&fans::projective(2)).unwrap();
        assert_eq!(p.len(), 7);
        let dims: Vec<usize> = p.objects().map(|s| p.orbit_dim(s)).collect();
        assert_eq!(dims.iter().filter(|&&d| d == 0).count(), 3);
        assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 3);
        assert_eq!(dims.iter().filter(|&&d| d == 2).count(), 1);
    }

    #[test]
    fn orbit_posets_are_partial_orders_with_the_torus_on_top() {
        for (name, fan) in fans::standard_suite() {
            let p = orbit_poset(&fan).unwrap();
            assert!(fan.cones()[p.top()].is_zero(), "{name}");
            for s in p.objects() {
                assert!(p.leq(s, s), "{name}: reflexive");
                assert!(p.leq(s, p.top()), "{name}: torus orbit on top");
                for t in p.objects() {
                    if p.leq(s, t) && p.leq(t, s) {
                        assert_eq!(s, t, "{name}: antisymmetric");
                    }
                    for u in p.objects() {
                        if p.leq(s, t) && p.leq(t, u) {
                            assert!(p.leq(s, u), "{name}: transitive");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn star_sizes_match_face_counts() {
        for fan in [fans::affine(2), fans::projective(2), fans::hirzebruch(1)] {
            let p = orbit_poset(&fan).unwrap();
            for s in p.objects() {
                let (star, _) = star_and_closure(&p, s).unwrap();
                assert_eq!(star.len(), faces(&fan.cones()[s]).len());
            }
        }
    }

    #[test]
    fn star_and_closure_on_projective_plane_ray() {
        let fan = fans::projective(2);
        let p = orbit_poset(&fan).unwrap();
        let ray = p.objects().find(|&s| p.orbit_dim(s) == 1).unwrap();
        let (star, closure) = star_and_closure(&p, ray).unwrap();
        assert_eq!(star.len(), 2);
        assert_eq!(closure.len(), 3);
        let (star_top, closure_top) = star_and_closure(&p, p.top()).unwrap();
        assert_eq!(star_top.len(), 1);
        assert_eq!(closure_top.len(), p.len());
        assert!(star_and_closure(&p, 99).is_err());
    }

    #[test]
    fn span_sublattice_saturates() {
        let ray = Cone::from_i64(2, &[&[1, 0]]);
        assert_eq!(span_sublattice(&ray), IntMatrix::from_i64(&[&[1, 0]]));
        assert_eq!(span_sublattice(&Cone::zero(2)).rows(), 0);
        // index-2 span saturates to the whole lattice
        let c = Cone::from_i64(2, &[&[1, 1], &[1, -1]]);
        assert_eq!(span_sublattice(&c), IntMatrix::identity(2));
    }

    #[test]
    fn homotopy_grading_is_interior() {
        assert_eq!(
            homotopy_grading(&Cone::from_i64(2, &[&[1, 0], &[0, 1]])),
            vec![BigInt::from(1), BigInt::from(1)]
        );
        assert_eq!(homotopy_grading(&Cone::from_i64(1, &[&[1]])), vec![BigInt::from(1)]);
        assert_eq!(homotopy_grading(&Cone::zero(2)), vec![BigInt::from(0); 2]);

        for fan in [
            fans::affine(2),
            fans::affine(3),
            fans::projective(2),
            fans::projective(3),
            fans::hirzebruch(1),
        ] {
            for c in fan.cones() {
                let w = homotopy_grading(c);
                assert!(c.contains(&w));
                for f in faces(c) {
                    if f == *c {
                        continue;
                    }
                    let span = span_sublattice(&f);
                    assert!(
                        c.is_zero() || !intlat::span_contains(&span, &w),
                        "interior witness may not lie in a proper face span"
                    );
                }
            }
        }
    }

    #[test]
    fn upward_closed_sets_are_unions_of_stars() {
        let p = orbit_poset(&fans::projective(2)).unwrap();
        let all = p.all_objects();
        // every upward-closed set equals the union of stars of its minimal elements
        for mask in 0..(1u32 << p.len()) {
            let set: BTreeSet<ConeId> =
                p.objects().filter(|&s| mask & (1 << s) != 0).collect();
            if !p.is_upward_closed(&set) {
                continue;
            }
            let mut union: BTreeSet<ConeId> = BTreeSet::new();
            for m in p.minimal_in(&set) {
                union.extend(p.up_set(m));
            }
            assert_eq!(set, union);
        }
        assert!(p.is_upward_closed(&all));
    }

    #[test]
    fn star_chart_is_affine() {
        let fan = fans::affine(2);
        let p = orbit_poset(&fan).unwrap();
        let ray = p.objects().find(|&s| p.orbit_dim(s) == 1).unwrap();
        let chart = fan.star_chart(ray).unwrap();
        assert_eq!(chart.len(), 2);
        assert!(validate_fan(&chart).is_valid());
    }
}
