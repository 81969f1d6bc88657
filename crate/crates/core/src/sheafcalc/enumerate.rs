//! Classification of sheaves with bounded stalks, representable functors at
//! finite level, and the Yoneda bijection check.

use super::homs::{are_isomorphic, equivariant_maps, hom_set};
use super::sheaf::{same_site, ConstructibleSheaf, Site};
use super::SheafError;
use crate::fan::ConeId;
use crate::perm::{word, Perm};
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

fn all_perms(n: usize) -> Vec<Perm> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Perm>) {
        if rest.is_empty() {
            out.push(Perm::from_images(prefix.clone()).unwrap());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// All hom-group actions on a carrier of the given size: commuting generator
/// permutations, with level and Frobenius constraints at finite level.
fn local_actions(site: &Site, s: ConeId, size: usize) -> Vec<(Vec<Perm>, Option<Perm>)> {
    let rank = site.category().group_rank(s);
    let perms = all_perms(size);
    let mut tuples: Vec<Vec<Perm>> = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for t in &tuples {
            for p in &perms {
                if t.iter().all(|q| q.commutes_with(p)) {
                    let mut t2 = t.clone();
                    t2.push(p.clone());
                    next.push(t2);
                }
            }
        }
        tuples = next;
    }
    match site.galois() {
        None => tuples.into_iter().map(|t| (t, None)).collect(),
        Some(gal) => {
            let n = gal.level;
            let q = gal.char_exponent as i64;
            let m = gal.galois_order as i64;
            let mut out = Vec::new();
            for t in tuples {
                if t.iter().any(|p| n % p.order() != 0) {
                    continue;
                }
                for f in &perms {
                    if !f.pow(m).is_identity() {
                        continue;
                    }
                    if t.iter().all(|p| f.compose(p).compose(&f.inverse()) == p.pow(q)) {
                        out.push((t.clone(), Some(f.clone())));
                    }
                }
            }
            out
        }
    }
}

fn ambient_from_class_perms(site: &Site, s: ConeId, gens: &[Perm], size: usize) -> Vec<Perm> {
    let cat = site.category();
    let rank = site.rank();
    (0..rank)
        .map(|i| {
            let mut e = vec![BigInt::from(0); rank];
            e[i] = BigInt::from(1);
            if gens.is_empty() {
                Perm::identity(size)
            } else {
                word(gens, &cat.ambient_class(s, &e))
            }
        })
        .collect()
}

/// Stalk data for one object: size, hom-group generator permutations,
/// optional Frobenius, and the derived ambient-generator permutations.
type Stalk = (usize, Vec<Perm>, Option<Perm>, Vec<Perm>);

/// Complete, duplicate-free (up to isomorphism) list of sheaves on `domain`
/// with stalk sizes at most `max_stalk`. `budget` bounds the number of raw
/// candidates examined; exceeding it is reported explicitly.
pub fn enumerate_sheaves_on(
    site: &Arc<Site>,
    domain: &BTreeSet<ConeId>,
    max_stalk: usize,
    budget: usize,
) -> Result<Vec<ConstructibleSheaf>, SheafError> {
    let poset = site.poset();
    if !poset.is_convex(domain) {
        return Err(SheafError::NotConvex);
    }
    let order = poset.linear_extension(domain);
    let covers = poset.covers_within(domain);

    let mut stalk_choices: BTreeMap<ConeId, Vec<Stalk>> = BTreeMap::new();
    for &s in &order {
        let mut choices = Vec::new();
        for size in 0..=max_stalk {
            for (gens, frob) in local_actions(site, s, size) {
                let ambient = ambient_from_class_perms(site, s, &gens, size);
                choices.push((size, gens, frob, ambient));
            }
        }
        stalk_choices.insert(s, choices);
    }

    struct Ctx<'a> {
        site: &'a Arc<Site>,
        order: &'a [ConeId],
        covers: &'a [(ConeId, ConeId)],
        stalk_choices: &'a BTreeMap<ConeId, Vec<Stalk>>,
        examined: usize,
        budget: usize,
        reps: Vec<ConstructibleSheaf>,
    }

    fn gens_with_frob(ambient: &[Perm], frob: &Option<Perm>) -> Vec<Perm> {
        let mut g = ambient.to_vec();
        if let Some(f) = frob {
            g.push(f.clone());
        }
        g
    }

    fn diamonds_ok(
        ctx: &Ctx,
        maps: &BTreeMap<(ConeId, ConeId), Vec<usize>>,
        poset: &crate::fan::OrbitPoset,
    ) -> bool {
        for &(r, m1) in ctx.covers {
            for &(m2, t) in ctx.covers {
                if m2 == m1 || !poset.covers().contains(&(r, m2)) || !poset.covers().contains(&(m1, t))
                {
                    continue;
                }
                let (Some(a1), Some(a2), Some(b1), Some(b2)) = (
                    maps.get(&(r, m1)),
                    maps.get(&(m1, t)),
                    maps.get(&(r, m2)),
                    maps.get(&(m2, t)),
                ) else {
                    continue;
                };
                for x in 0..a1.len() {
                    if b1[x] >= b2.len() || a1[x] >= a2.len() {
                        return false;
                    }
                    if a2[a1[x]] != b2[b1[x]] {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn structure_dfs(
        ctx: &mut Ctx,
        stalks: &BTreeMap<ConeId, usize>,
        pair_idx: usize,
        maps: &mut BTreeMap<(ConeId, ConeId), Vec<usize>>,
    ) -> Result<(), SheafError> {
        let poset = ctx.site.poset();
        if pair_idx == ctx.covers.len() {
            ctx.examined += 1;
            if ctx.examined > ctx.budget {
                return Err(SheafError::BudgetExceeded { budget: ctx.budget });
            }
            let mut carrier = BTreeMap::new();
            let mut monodromy = BTreeMap::new();
            let mut frobenius = BTreeMap::new();
            for (&s, &choice) in stalks {
                let (size, _, frob, ambient) = &ctx.stalk_choices[&s][choice];
                carrier.insert(s, *size);
                monodromy.insert(s, ambient.clone());
                if let Some(f) = frob {
                    frobenius.insert(s, f.clone());
                }
            }
            let domain: BTreeSet<ConeId> = ctx.order.iter().copied().collect();
            let candidate = ConstructibleSheaf::new(
                ctx.site.clone(),
                domain,
                carrier,
                monodromy,
                frobenius,
                maps.clone(),
            )
            .expect("enumerated candidates are well-formed");
            for rep in &ctx.reps {
                if are_isomorphic(rep, &candidate)? {
                    return Ok(());
                }
            }
            ctx.reps.push(candidate);
            return Ok(());
        }
        let (s, t) = ctx.covers[pair_idx];
        let (size_s, _, frob_s, ambient_s) = &ctx.stalk_choices[&s][stalks[&s]];
        let (size_t, _, frob_t, ambient_t) = &ctx.stalk_choices[&t][stalks[&t]];
        let candidates = equivariant_maps(
            *size_s,
            &gens_with_frob(ambient_s, frob_s),
            *size_t,
            &gens_with_frob(ambient_t, frob_t),
            &BTreeMap::new(),
        );
        for m in candidates {
            ctx.examined += 1;
            if ctx.examined > ctx.budget {
                return Err(SheafError::BudgetExceeded { budget: ctx.budget });
            }
            maps.insert((s, t), m);
            if diamonds_ok(ctx, maps, poset) {
                structure_dfs(ctx, stalks, pair_idx + 1, maps)?;
            }
            maps.remove(&(s, t));
        }
        Ok(())
    }

    fn stalk_dfs(
        ctx: &mut Ctx,
        idx: usize,
        stalks: &mut BTreeMap<ConeId, usize>,
    ) -> Result<(), SheafError> {
        if idx == ctx.order.len() {
            return structure_dfs(ctx, stalks, 0, &mut BTreeMap::new());
        }
        let s = ctx.order[idx];
        for choice in 0..ctx.stalk_choices[&s].len() {
            stalks.insert(s, choice);
            stalk_dfs(ctx, idx + 1, stalks)?;
        }
        stalks.remove(&s);
        Ok(())
    }

    let mut ctx = Ctx {
        site,
        order: &order,
        covers: &covers,
        stalk_choices: &stalk_choices,
        examined: 0,
        budget,
        reps: Vec::new(),
    };
    stalk_dfs(&mut ctx, 0, &mut BTreeMap::new())?;
    Ok(ctx.reps)
}

pub fn enumerate_sheaves(
    site: &Arc<Site>,
    max_stalk: usize,
    budget: usize,
) -> Result<Vec<ConstructibleSheaf>, SheafError> {
    let all = site.poset().all_objects();
    enumerate_sheaves_on(site, &all, max_stalk, budget)
}

/// The representable functor `y_s = Hom_n(s, -)` at finite level: carriers
/// are the finite hom sets (empty where `s` is not below the object), the
/// action is post-composition, and structure maps are target changes.
pub fn representable_sheaf(site: &Arc<Site>, s: ConeId) -> Result<ConstructibleSheaf, SheafError> {
    let Some(flc) = site.finite().cloned() else {
        return Err(SheafError::LevelMismatch("representables need a finite-level site".into()));
    };
    let poset = site.poset();
    let cat = site.category();
    let rank = site.rank();
    let all = poset.all_objects();

    let mut carrier = BTreeMap::new();
    let mut monodromy = BTreeMap::new();
    let mut frobenius = BTreeMap::new();
    let mut structure = BTreeMap::new();

    for &t in &all {
        if !poset.leq(s, t) {
            carrier.insert(t, 0);
            monodromy.insert(t, vec![Perm::identity(0); rank]);
            frobenius.insert(t, Perm::identity(0));
            continue;
        }
        let homs = flc.enumerate_hom(s, t);
        carrier.insert(t, homs.len());
        let n = BigInt::from(flc.galois.level);
        let perms: Vec<Perm> = (0..rank)
            .map(|i| {
                let mut e = vec![BigInt::from(0); rank];
                e[i] = BigInt::from(1);
                let class = cat.ambient_class(t, &e);
                let torus: Vec<u64> = class
                    .iter()
                    .map(|x| {
                        use num_integer::Integer;
                        use num_traits::ToPrimitive;
                        x.mod_floor(&n).to_u64().unwrap()
                    })
                    .collect();
                let gen = crate::fundcat::FiniteMorphism { source: t, target: t, torus, frob: 0 };
                let images = homs.iter().map(|h| flc.index_of(&flc.compose(&gen, h).unwrap())).collect();
                Perm::from_images(images).expect("post-composition permutes the hom set")
            })
            .collect();
        monodromy.insert(t, perms);
        let fr = flc.frobenius(t, t).expect("t <= t");
        let images = homs.iter().map(|h| flc.index_of(&flc.compose(&fr, h).unwrap())).collect();
        frobenius.insert(t, Perm::from_images(images).expect("Frobenius permutes the hom set"));
    }
    for (r, t) in poset.covers_within(&all) {
        let map = if poset.leq(s, r) {
            let z = flc.zero(r, t).expect("r <= t");
            flc.enumerate_hom(s, r)
                .iter()
                .map(|h| flc.index_of(&flc.compose(&z, h).unwrap()))
                .collect()
        } else {
            Vec::new()
        };
        structure.insert((r, t), map);
    }
    ConstructibleSheaf::new(site.clone(), all, carrier, monodromy, frobenius, structure)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YonedaVerdict {
    pub object: ConeId,
    pub holds: bool,
    pub hom_count: usize,
    pub stalk_size: usize,
}

/// Checks `Hom(y_s, F) ≅ F(s)` by full enumeration, with evaluation at the
/// identity morphism as the comparison map.
pub fn yoneda_check(
    site: &Arc<Site>,
    s: ConeId,
    f: &ConstructibleSheaf,
) -> Result<YonedaVerdict, SheafError> {
    if !site.is_tame() || !f.site().is_tame() {
        return Err(SheafError::LevelMismatch("Yoneda check runs at finite level".into()));
    }
    if !same_site(site, f.site()) {
        return Err(SheafError::LevelMismatch("sheaf lives at a different level".into()));
    }
    if f.domain() != &site.poset().all_objects() {
        return Err(SheafError::DomainMismatch);
    }
    let y = representable_sheaf(site, s)?;
    let homs = hom_set(&y, f)?;
    // the identity of Hom_n(s, s) has index 0 (zero torus part, zero Frobenius)
    let images: Vec<usize> = homs.iter().map(|alpha| alpha.components[&s][0]).collect();
    let stalk = f.carrier(s);
    let bijective = homs.len() == stalk && {
        let mut seen = vec![false; stalk];
        images.iter().all(|&x| {
            if seen[x] {
                false
            } else {
                seen[x] = true;
                true
            }
        })
    };
    Ok(YonedaVerdict { object: s, holds: bijective, hom_count: homs.len(), stalk_size: stalk })
}
