//! The fundamental category of a stratified toric variety, and its
//! finite-level Galois-enriched variant.
//!
//! Objects are the torus orbits `s`. For `s <= t` the hom set `Hom(s, t)` is
//! the group `G_s = N / N_σ_s` (it does not depend on `t`); for `s ≰ t` it is
//! empty. Composition `Hom(s,t) × Hom(r,s) -> Hom(r,t)` projects the first
//! factor along `G_s -> G_r` and multiplies in `G_r`. All group coordinates
//! are the canonical Smith-normal-form coordinates from [`crate::intlat`], so
//! serialized morphisms are reproducible across runs.

use crate::fan::{orbit_poset, span_sublattice, ConeId, Fan, FanError, OrbitPoset};
use crate::intlat::{self, IntMatrix, QuotientPresentation};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CategoryError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("morphisms are not composable: {0}")]
    NotComposable(String),
    #[error("hom set Hom({s}, {t}) is empty")]
    EmptyHom { s: ConeId, t: ConeId },
    #[error("element has {got} coordinates, hom group of object {object} has rank {rank}")]
    BadElement { object: ConeId, rank: usize, got: usize },
    #[error("level {n} is not coprime to the declared characteristic {p}")]
    LevelNotCoprime { n: u64, p: u64 },
    #[error("frobenius exponent {q} is not a unit modulo {n}")]
    FrobeniusNotUnit { q: u64, n: u64 },
}

/// The fundamental category of the orbit stratification.
#[derive(Clone, PartialEq, Debug)]
pub struct FundamentalCategory {
    fan: Fan,
    poset: OrbitPoset,
    hom: Vec<QuotientPresentation>,
    /// (s, r) with r <= s: the matrix of G_s -> G_r in free coordinates.
    proj: BTreeMap<(ConeId, ConeId), IntMatrix>,
    /// (t, s) with s <= t: canonical basis of ker(G_t -> G_s).
    kernels: BTreeMap<(ConeId, ConeId), IntMatrix>,
}

/// A morphism `source -> target` (requires `source <= target`), recorded by
/// its element of `G_source` in canonical free coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    pub source: ConeId,
    pub target: ConeId,
    pub element: Vec<BigInt>,
}

pub fn build_fundamental_category(fan: &Fan) -> Result<FundamentalCategory, CategoryError> {
    let poset = orbit_poset(fan)?;
    let n = fan.rank();
    let hom: Vec<QuotientPresentation> = fan
        .cones()
        .iter()
        .map(|c| intlat::quotient_presentation(n, &span_sublattice(c)))
        .collect();
    for (s, q) in hom.iter().enumerate() {
        assert!(q.torsion.is_empty(), "span sublattices are saturated");
        assert_eq!(q.free_rank, poset.orbit_dim(s), "rank must match orbit dimension");
    }

    let mut proj = BTreeMap::new();
    let mut kernels = BTreeMap::new();
    for s in poset.objects() {
        for r in poset.objects() {
            if !poset.leq(r, s) {
                continue;
            }
            // G_s -> G_r: lift along the section of G_s, project into G_r
            let m = hom[s].section.mul(&hom[r].projection);
            kernels.insert((s, r), intlat::kernel_basis(&m));
            proj.insert((s, r), m);
        }
    }

    Ok(FundamentalCategory { fan: fan.clone(), poset, hom, proj, kernels })
}

impl FundamentalCategory {
    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn poset(&self) -> &OrbitPoset {
        &self.poset
    }

    pub fn rank(&self) -> usize {
        self.fan.rank()
    }

    pub fn hom_group(&self, s: ConeId) -> &QuotientPresentation {
        &self.hom[s]
    }

    pub fn group_rank(&self, s: ConeId) -> usize {
        self.hom[s].free_rank
    }

    /// Matrix of the projection `G_s -> G_r` for `r <= s`.
    pub fn projection_matrix(&self, s: ConeId, r: ConeId) -> Option<&IntMatrix> {
        self.proj.get(&(s, r))
    }

    /// Canonical basis of `ker(G_t -> G_s)` for `s <= t`, in `G_t` coordinates.
    pub fn kernel_basis(&self, t: ConeId, s: ConeId) -> Option<&IntMatrix> {
        self.kernels.get(&(t, s))
    }

    /// Class of the ambient lattice vector `v` in `G_s` (free coordinates).
    pub fn ambient_class(&self, s: ConeId, v: &[BigInt]) -> Vec<BigInt> {
        intlat::project(&self.hom[s], v).expect("ambient vector length").free
    }

    /// Lift of a `G_s` element to the ambient lattice.
    pub fn lift(&self, s: ConeId, element: &[BigInt]) -> Vec<BigInt> {
        intlat::lift_free(&self.hom[s], element)
    }

    pub fn project_element(&self, s: ConeId, r: ConeId, element: &[BigInt]) -> Vec<BigInt> {
        let m = self.proj.get(&(s, r)).expect("r <= s required");
        intlat::vec_mat(element, m)
    }

    pub fn zero_morphism(&self, s: ConeId, t: ConeId) -> Result<Morphism, CategoryError> {
        if !self.poset.leq(s, t) {
            return Err(CategoryError::EmptyHom { s, t });
        }
        Ok(Morphism { source: s, target: t, element: vec![BigInt::zero(); self.group_rank(s)] })
    }

    pub fn morphism(
        &self,
        s: ConeId,
        t: ConeId,
        element: Vec<BigInt>,
    ) -> Result<Morphism, CategoryError> {
        if !self.poset.leq(s, t) {
            return Err(CategoryError::EmptyHom { s, t });
        }
        if element.len() != self.group_rank(s) {
            return Err(CategoryError::BadElement {
                object: s,
                rank: self.group_rank(s),
                got: element.len(),
            });
        }
        Ok(Morphism { source: s, target: t, element })
    }
}

/// `g ∘ h` for `h: r -> s` and `g: s -> t`: project `g` into `G_r` and add.
pub fn compose(
    cat: &FundamentalCategory,
    g: &Morphism,
    h: &Morphism,
) -> Result<Morphism, CategoryError> {
    if h.target != g.source {
        return Err(CategoryError::NotComposable(format!(
            "target of inner ({}) differs from source of outer ({})",
            h.target, g.source
        )));
    }
    let projected = cat.project_element(g.source, h.source, &g.element);
    let element: Vec<BigInt> = projected.iter().zip(&h.element).map(|(a, b)| a + b).collect();
    Ok(Morphism { source: h.source, target: g.target, element })
}

/// Description of a hom set: the group presentation of `G_s` when `s <= t`,
/// empty otherwise.
pub enum HomDescription<'a> {
    Empty,
    Group(&'a QuotientPresentation),
}

pub fn hom_set_description<'a>(
    cat: &'a FundamentalCategory,
    s: ConeId,
    t: ConeId,
) -> HomDescription<'a> {
    if cat.poset.leq(s, t) {
        HomDescription::Group(cat.hom_group(s))
    } else {
        HomDescription::Empty
    }
}

fn gcd64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd64(b, a % b)
    }
}

/// Finite-level Galois data: the cyclotomic character acts on level-n torus
/// coordinates as multiplication by `char_exponent`, and the Galois group is
/// the cyclic group generated by Frobenius modulo its order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GaloisDatum {
    pub level: u64,
    pub char_exponent: u64,
    pub galois_order: u64,
    pub char_p: u64,
}

impl GaloisDatum {
    pub fn new(level: u64, char_exponent: u64, char_p: u64) -> Result<GaloisDatum, CategoryError> {
        assert!(level >= 1, "level must be at least 1");
        if char_p != 0 && gcd64(level, char_p) != 1 {
            return Err(CategoryError::LevelNotCoprime { n: level, p: char_p });
        }
        let q = char_exponent % level;
        if gcd64(if q == 0 { level } else { q }, level) != 1 {
            return Err(CategoryError::FrobeniusNotUnit { q: char_exponent, n: level });
        }
        let mut m = 1u64;
        let mut pow = q % level;
        while pow != 1 % level {
            pow = (pow * q) % level;
            m += 1;
            assert!(m <= level, "order search must terminate");
        }
        Ok(GaloisDatum { level, char_exponent: q, galois_order: m, char_p })
    }

    /// Trivial Galois action (algebraically closed base field).
    pub fn trivial(level: u64) -> GaloisDatum {
        GaloisDatum::new(level, 1, 0).expect("1 is always a unit")
    }

    pub fn is_trivial(&self) -> bool {
        self.galois_order == 1
    }

    fn inv_exponent(&self) -> u64 {
        // q^(m-1) is the inverse of q modulo n
        let mut inv = 1u64;
        for _ in 0..self.galois_order - 1 {
            inv = (inv * self.char_exponent) % self.level;
        }
        inv
    }

    pub fn q_pow(&self, k: u64) -> u64 {
        let mut acc = 1 % self.level;
        for _ in 0..k {
            acc = (acc * self.char_exponent) % self.level;
        }
        acc
    }
}

/// A morphism at finite level: torus coordinates mod n plus a Frobenius power
/// mod the Galois order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteMorphism {
    pub source: ConeId,
    pub target: ConeId,
    pub torus: Vec<u64>,
    pub frob: u64,
}

/// The fundamental category truncated at level n: `Hom_n(s, t)` is the
/// semidirect product `(G_s ⊗ Z/n) ⋊ <Frob>/<Frob^m>` when `s <= t`.
#[derive(Clone, PartialEq, Debug)]
pub struct FiniteLevelCategory {
    pub base: FundamentalCategory,
    pub galois: GaloisDatum,
}

pub fn finite_level(
    cat: &FundamentalCategory,
    galois: GaloisDatum,
) -> Result<FiniteLevelCategory, CategoryError> {
    // GaloisDatum::new has already checked coprimality; re-validate so a
    // hand-built datum cannot sneak through
    GaloisDatum::new(galois.level, galois.char_exponent, galois.char_p)?;
    Ok(FiniteLevelCategory { base: cat.clone(), galois })
}

impl FiniteLevelCategory {
    pub fn poset(&self) -> &OrbitPoset {
        self.base.poset()
    }

    pub fn hom_size(&self, s: ConeId, t: ConeId) -> u64 {
        if !self.poset().leq(s, t) {
            return 0;
        }
        let n = self.galois.level;
        let m = self.galois.galois_order;
        n.pow(self.base.group_rank(s) as u32) * m
    }

    pub fn zero(&self, s: ConeId, t: ConeId) -> Result<FiniteMorphism, CategoryError> {
        if !self.poset().leq(s, t) {
            return Err(CategoryError::EmptyHom { s, t });
        }
        Ok(FiniteMorphism {
            source: s,
            target: t,
            torus: vec![0; self.base.group_rank(s)],
            frob: 0,
        })
    }

    pub fn frobenius(&self, s: ConeId, t: ConeId) -> Result<FiniteMorphism, CategoryError> {
        let mut z = self.zero(s, t)?;
        z.frob = 1 % self.galois.galois_order;
        Ok(z)
    }

    /// Reduction of an infinite-level morphism mod (n, m).
    pub fn reduce(&self, g: &Morphism) -> FiniteMorphism {
        let n = BigInt::from(self.galois.level);
        let torus = g
            .element
            .iter()
            .map(|x| {
                use num_integer::Integer;
                use num_traits::ToPrimitive;
                x.mod_floor(&n).to_u64().unwrap()
            })
            .collect();
        FiniteMorphism { source: g.source, target: g.target, torus, frob: 0 }
    }

    /// `g ∘ h`: project the torus part of `g` into `G_r ⊗ Z/n`, twist `h` by
    /// `q^frob(g)`, add, and add Frobenius powers.
    pub fn compose(
        &self,
        g: &FiniteMorphism,
        h: &FiniteMorphism,
    ) -> Result<FiniteMorphism, CategoryError> {
        if h.target != g.source {
            return Err(CategoryError::NotComposable(format!(
                "target of inner ({}) differs from source of outer ({})",
                h.target, g.source
            )));
        }
        let n = self.galois.level;
        let g_big: Vec<BigInt> = g.torus.iter().map(|&x| BigInt::from(x)).collect();
        let projected = self.base.project_element(g.source, h.source, &g_big);
        let qk = self.galois.q_pow(g.frob);
        let torus: Vec<u64> = projected
            .iter()
            .zip(&h.torus)
            .map(|(a, &b)| {
                use num_integer::Integer;
                use num_traits::ToPrimitive;
                let a64 = a.mod_floor(&BigInt::from(n)).to_u64().unwrap();
                (a64 + qk * b) % n
            })
            .collect();
        Ok(FiniteMorphism {
            source: h.source,
            target: g.target,
            torus,
            frob: (g.frob + h.frob) % self.galois.galois_order,
        })
    }

    pub fn inverse(&self, g: &FiniteMorphism) -> FiniteMorphism {
        assert_eq!(g.source, g.target, "only endomorphisms are invertible");
        let n = self.galois.level;
        let m = self.galois.galois_order;
        let frob = (m - g.frob % m) % m;
        // (v, F^k)^-1 = (-q^{-k} v, F^{-k})
        let qinv = self.galois.inv_exponent();
        let mut scale = 1 % n;
        for _ in 0..g.frob {
            scale = (scale * qinv) % n;
        }
        let torus = g.torus.iter().map(|&v| (n - (scale * v) % n) % n).collect();
        FiniteMorphism { source: g.source, target: g.target, torus, frob }
    }

    /// Index of a morphism in the canonical enumeration of `Hom_n(s, t)`:
    /// torus coordinates are the major digits (base n), Frobenius the minor.
    pub fn index_of(&self, g: &FiniteMorphism) -> usize {
        let n = self.galois.level as usize;
        let m = self.galois.galois_order as usize;
        let mut idx = 0usize;
        for &v in &g.torus {
            idx = idx * n + v as usize;
        }
        idx * m + g.frob as usize
    }

    pub fn from_index(&self, s: ConeId, t: ConeId, index: usize) -> FiniteMorphism {
        let n = self.galois.level as usize;
        let m = self.galois.galois_order as usize;
        let rank = self.base.group_rank(s);
        let frob = (index % m) as u64;
        let mut rest = index / m;
        let mut torus = vec![0u64; rank];
        for i in (0..rank).rev() {
            torus[i] = (rest % n) as u64;
            rest /= n;
        }
        FiniteMorphism { source: s, target: t, torus, frob }
    }

    pub fn enumerate_hom(&self, s: ConeId, t: ConeId) -> Vec<FiniteMorphism> {
        if !self.poset().leq(s, t) {
            return Vec::new();
        }
        (0..self.hom_size(s, t) as usize)
            .map(|i| self.from_index(s, t, i))
            .collect()
    }

    /// Reduction to a coarser level `n' | n`: torus coordinates reduce mod
    /// `n'` and Frobenius maps to Frobenius. These are the transition maps of
    /// the compatibility system across levels.
    pub fn reduce_to(
        &self,
        coarser: &FiniteLevelCategory,
        g: &FiniteMorphism,
    ) -> Result<FiniteMorphism, CategoryError> {
        let n = self.galois.level;
        let n2 = coarser.galois.level;
        if self.base != coarser.base
            || !n.is_multiple_of(n2)
            || self.galois.char_exponent % n2 != coarser.galois.char_exponent % n2
        {
            return Err(CategoryError::NotComposable(
                "levels are not compatible for reduction".into(),
            ));
        }
        Ok(FiniteMorphism {
            source: g.source,
            target: g.target,
            torus: g.torus.iter().map(|&x| x % n2).collect(),
            frob: g.frob % coarser.galois.galois_order,
        })
    }
}
