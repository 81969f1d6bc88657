//! Seeded random generators for valid sheaves, local systems, and morphisms,
//! used by the property suites. Everything is deterministic for a fixed RNG
//! stream.
//!
//! Stalk actions are built from translation blocks: a random finite quotient
//! of the hom group acting on itself, with Frobenius acting affinely by
//! `x -> q*x + b`. Sheaves are grown by recursive recollement: glue a random
//! stalk onto a random sheaf on the poset minus a minimal stratum, choosing
//! the comparison map uniformly among the equivariant ones, orbit by orbit.

use super::families::{family_act_ambient, family_act_frobenius, kan_families, Family};
use super::homs::orbit_candidates;
use super::recollement::glue;
use super::sheaf::{ConstructibleSheaf, Site, StratumLocalSystem};
use crate::fan::ConeId;
use crate::intlat::{self, IntMatrix};
use crate::perm::Perm;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// One translation block: the quotient `Z^rank / L` acting on itself, with an
/// optional affine Frobenius.
struct Block {
    factors: Vec<u64>,
    /// translation of generator j, in mixed-radix coordinates
    translations: Vec<Vec<u64>>,
    frobenius: Option<(u64, Vec<u64>)>, // (q, shift)
}

impl Block {
    fn size(&self) -> usize {
        self.factors.iter().product::<u64>() as usize
    }

    fn encode(&self, coords: &[u64]) -> usize {
        let mut idx = 0usize;
        for (c, f) in coords.iter().zip(&self.factors) {
            idx = idx * (*f as usize) + *c as usize;
        }
        idx
    }

    fn decode(&self, mut idx: usize) -> Vec<u64> {
        let mut coords = vec![0u64; self.factors.len()];
        for i in (0..self.factors.len()).rev() {
            coords[i] = (idx % self.factors[i] as usize) as u64;
            idx /= self.factors[i] as usize;
        }
        coords
    }

    fn translation_perm(&self, t: &[u64]) -> Vec<usize> {
        (0..self.size())
            .map(|idx| {
                let coords = self.decode(idx);
                let moved: Vec<u64> = coords
                    .iter()
                    .zip(t)
                    .zip(&self.factors)
                    .map(|((&x, &a), &f)| (x + a) % f)
                    .collect();
                self.encode(&moved)
            })
            .collect()
    }

    fn frobenius_perm(&self) -> Option<Vec<usize>> {
        let (q, shift) = self.frobenius.as_ref()?;
        Some(
            (0..self.size())
                .map(|idx| {
                    let coords = self.decode(idx);
                    let moved: Vec<u64> = coords
                        .iter()
                        .zip(shift)
                        .zip(&self.factors)
                        .map(|((&x, &b), &f)| (q % f * x + b) % f)
                        .collect();
                    self.encode(&moved)
                })
                .collect(),
        )
    }
}

fn random_block(site: &Site, s: ConeId, max_size: usize, rng: &mut impl Rng) -> Block {
    let rank = site.category().group_rank(s);
    if rank == 0 {
        return Block {
            factors: Vec::new(),
            translations: Vec::new(),
            frobenius: site.galois().map(|_| (1, Vec::new())),
        };
    }
    let bound = match site.galois() {
        Some(g) => g.level,
        None => 4,
    };
    for _ in 0..12 {
        let mut rows: Vec<Vec<BigInt>> = (0..rank)
            .map(|_| {
                (0..rank)
                    .map(|_| BigInt::from(rng.gen_range(-(bound as i64)..=bound as i64)))
                    .collect()
            })
            .collect();
        // force the quotient exponent to divide the level (or stay small)
        let d = match site.galois() {
            Some(g) => g.level,
            None => rng.gen_range(1..=4),
        };
        for i in 0..rank {
            let mut e = vec![BigInt::zero(); rank];
            e[i] = BigInt::from(d);
            rows.push(e);
        }
        let l = intlat::lattice_basis(&IntMatrix::from_rows(rows));
        let q = intlat::quotient_presentation(rank, &l);
        assert_eq!(q.free_rank, 0);
        let factors: Vec<u64> = q.torsion.iter().map(|f| f.to_u64().unwrap()).collect();
        let size = factors.iter().product::<u64>() as usize;
        if size > max_size.max(1) {
            continue;
        }
        let translations: Vec<Vec<u64>> = (0..rank)
            .map(|j| {
                let mut e = vec![BigInt::zero(); rank];
                e[j] = BigInt::from(1);
                intlat::project(&q, &e)
                    .unwrap()
                    .torsion
                    .iter()
                    .map(|x| x.to_u64().unwrap())
                    .collect()
            })
            .collect();
        let frobenius = site.galois().map(|gal| {
            let qexp = gal.char_exponent;
            // an affine shift b is allowed when (1 + q + .. + q^{m-1}) b = 0
            let c: u64 = (0..gal.galois_order).map(|k| gal.q_pow(k)).sum();
            for _ in 0..6 {
                let b: Vec<u64> = factors.iter().map(|&f| rng.gen_range(0..f)).collect();
                if b.iter().zip(&factors).all(|(&bi, &f)| ((c % f) * bi).is_multiple_of(f)) {
                    return (qexp, b);
                }
            }
            (qexp, vec![0; factors.len()])
        });
        return Block { factors, translations, frobenius };
    }
    Block {
        factors: Vec::new(),
        translations: vec![Vec::new(); rank],
        frobenius: site.galois().map(|g| (g.char_exponent, Vec::new())),
    }
}

/// A random hom-group action on a set of size at most `max_size`: generator
/// permutations in canonical coordinates, plus Frobenius at finite level.
pub fn random_local_action(
    site: &Site,
    s: ConeId,
    max_size: usize,
    rng: &mut impl Rng,
) -> (usize, Vec<Perm>, Option<Perm>) {
    let rank = site.category().group_rank(s);
    let target = rng.gen_range(0..=max_size);
    let mut blocks: Vec<Block> = Vec::new();
    let mut total = 0usize;
    while total < target {
        let b = random_block(site, s, target - total, rng);
        let sz = b.size().max(1);
        if total + sz > target {
            break;
        }
        total += sz;
        blocks.push(b);
    }
    let size: usize = blocks.iter().map(Block::size).sum();
    let mut generators = Vec::new();
    for j in 0..rank {
        let mut images = Vec::with_capacity(size);
        let mut offset = 0usize;
        for b in &blocks {
            let t = if b.factors.is_empty() { vec![] } else { b.translations[j].clone() };
            for x in b.translation_perm(&t) {
                images.push(offset + x);
            }
            offset += b.size();
        }
        generators.push(Perm::from_images(images).expect("blockwise translation"));
    }
    let frobenius = site.galois().map(|_| {
        let mut images = Vec::with_capacity(size);
        let mut offset = 0usize;
        for b in &blocks {
            for x in b.frobenius_perm().expect("finite-level block") {
                images.push(offset + x);
            }
            offset += b.size();
        }
        Perm::from_images(images).expect("blockwise Frobenius")
    });
    (size, generators, frobenius)
}

pub fn random_stratum_local_system(
    site: &Arc<Site>,
    s: ConeId,
    max_size: usize,
    rng: &mut impl Rng,
) -> StratumLocalSystem {
    let (size, generators, frobenius) = random_local_action(site, s, max_size, rng);
    StratumLocalSystem { site: site.clone(), object: s, size, generators, frobenius }
}

fn empty_local_system(site: &Arc<Site>, s: ConeId) -> StratumLocalSystem {
    let rank = site.category().group_rank(s);
    StratumLocalSystem {
        site: site.clone(),
        object: s,
        size: 0,
        generators: vec![Perm::identity(0); rank],
        frobenius: site.galois().map(|_| Perm::identity(0)),
    }
}

/// Random equivariant comparison map into the family set, chosen orbit by
/// orbit; `None` when no equivariant map exists.
fn random_theta(
    open_part: &ConstructibleSheaf,
    fams: &[Family],
    ls: &StratumLocalSystem,
    rng: &mut impl Rng,
) -> Option<Vec<usize>> {
    let cat = ls.site.category();
    let rank_s = cat.group_rank(ls.object);
    let mut ls_gens = ls.generators.clone();
    if let Some(f) = &ls.frobenius {
        ls_gens.push(f.clone());
    }

    let index: BTreeMap<&Family, usize> = fams.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut fam_gens: Vec<Perm> = (0..rank_s)
        .map(|j| {
            let mut e = vec![BigInt::zero(); rank_s];
            e[j] = BigInt::from(1);
            let ambient = cat.lift(ls.object, &e);
            let images = fams
                .iter()
                .map(|f| index[&family_act_ambient(open_part, f, &ambient)])
                .collect();
            Perm::from_images(images).expect("residual action permutes families")
        })
        .collect();
    if ls.frobenius.is_some() {
        let images = fams
            .iter()
            .map(|f| index[&family_act_frobenius(open_part, f)])
            .collect();
        fam_gens.push(Perm::from_images(images).expect("Frobenius permutes families"));
    }

    let oc = orbit_candidates(ls.size, &ls_gens, fams.len(), &fam_gens, &BTreeMap::new());
    let mut theta = vec![0usize; ls.size];
    for (orbit, candidates) in oc.orbit_elements.iter().zip(&oc.candidates) {
        if candidates.is_empty() {
            return None;
        }
        let pick = &candidates[rng.gen_range(0..candidates.len())];
        for (k, &e) in orbit.iter().enumerate() {
            theta[e] = pick[k];
        }
    }
    Some(theta)
}

/// A uniformly-varied valid random sheaf on a convex upward-closed domain,
/// built by recursive recollement from the top of the poset down.
pub fn random_sheaf(
    site: &Arc<Site>,
    domain: &BTreeSet<ConeId>,
    max_stalk: usize,
    rng: &mut impl Rng,
) -> ConstructibleSheaf {
    if domain.is_empty() {
        return ConstructibleSheaf::new(
            site.clone(),
            BTreeSet::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .expect("the empty sheaf is well-formed");
    }
    let poset = site.poset();
    let z = poset.minimal_in(domain)[0];
    let mut upper = domain.clone();
    upper.remove(&z);
    let open_part = random_sheaf(site, &upper, max_stalk, rng);
    let fams = kan_families(&open_part, &upper, z);
    for _ in 0..6 {
        let ls = random_stratum_local_system(site, z, max_stalk, rng);
        if let Some(theta) = random_theta(&open_part, &fams, &ls, rng) {
            return glue(&open_part, &ls, &theta).expect("random comparison maps are equivariant");
        }
    }
    let ls = empty_local_system(site, z);
    glue(&open_part, &ls, &[]).expect("the empty comparison map is equivariant")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fans;
    use crate::fundcat::{build_fundamental_category, finite_level, GaloisDatum};
    use crate::sheafcalc::sheaf::{validate_local_system, validate_sheaf};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_sheaves_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for fan in [fans::affine(2), fans::projective(2)] {
            let cat = build_fundamental_category(&fan).unwrap();
            let complex = Arc::new(Site::Complex(cat.clone()));
            let tame = Arc::new(Site::Tame(
                finite_level(&cat, GaloisDatum::new(4, 3, 0).unwrap()).unwrap(),
            ));
            for site in [complex, tame] {
                let all = site.poset().all_objects();
                for _ in 0..15 {
                    let sheaf = random_sheaf(&site, &all, 4, &mut rng);
                    let report = validate_sheaf(&sheaf);
                    assert!(report.is_valid(), "violations: {:?}", report.violations);
                }
            }
        }
    }

    #[test]
    fn random_local_systems_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cat = build_fundamental_category(&fans::affine(2)).unwrap();
        let site = Arc::new(Site::Tame(
            finite_level(&cat, GaloisDatum::new(5, 2, 0).unwrap()).unwrap(),
        ));
        for s in site.poset().objects() {
            for _ in 0..10 {
                let ls = random_stratum_local_system(&site, s, 5, &mut rng);
                let report = validate_local_system(&ls);
                assert!(report.is_valid(), "violations: {:?}", report.violations);
            }
        }
    }
}
