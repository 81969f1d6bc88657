//! Restriction, extension by empty, pushforwards, and the retraction
//! adjunction for star charts.

use super::families::{family_act_ambient, family_act_frobenius, kan_families, Family};
use super::sheaf::{ConstructibleSheaf, StratumLocalSystem};
use super::SheafError;
use crate::fan::ConeId;
use crate::perm::Perm;
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};

fn check_subset(sheaf: &ConstructibleSheaf, set: &BTreeSet<ConeId>) -> Result<(), SheafError> {
    for s in set {
        if !sheaf.domain().contains(s) {
            return Err(SheafError::UnknownObject(*s));
        }
    }
    Ok(())
}

fn upward_closed_within(
    sheaf: &ConstructibleSheaf,
    set: &BTreeSet<ConeId>,
) -> bool {
    let poset = sheaf.site().poset();
    set.iter().all(|&s| {
        sheaf
            .domain()
            .iter()
            .all(|&x| !poset.leq(s, x) || set.contains(&x))
    })
}

fn downward_closed_within(
    sheaf: &ConstructibleSheaf,
    set: &BTreeSet<ConeId>,
) -> bool {
    let poset = sheaf.site().poset();
    set.iter().all(|&s| {
        sheaf
            .domain()
            .iter()
            .all(|&x| !poset.leq(x, s) || set.contains(&x))
    })
}

fn restrict_to(sheaf: &ConstructibleSheaf, set: &BTreeSet<ConeId>) -> ConstructibleSheaf {
    let poset = sheaf.site().poset();
    let carrier = set.iter().map(|&s| (s, sheaf.carrier(s))).collect();
    let monodromy = set.iter().map(|&s| (s, sheaf.monodromy(s).to_vec())).collect();
    let frobenius = set
        .iter()
        .filter_map(|&s| sheaf.frobenius(s).map(|f| (s, f.clone())))
        .collect();
    let structure = poset
        .covers_within(set)
        .into_iter()
        .map(|(s, t)| ((s, t), sheaf.structure_map(s, t).unwrap().to_vec()))
        .collect();
    ConstructibleSheaf::new(
        sheaf.site().clone(),
        set.clone(),
        carrier,
        monodromy,
        frobenius,
        structure,
    )
    .expect("restrictions of well-formed sheaves are well-formed")
}

/// `j^*`: restriction to an upward-closed subset of the domain.
pub fn restrict_open(
    sheaf: &ConstructibleSheaf,
    t_set: &BTreeSet<ConeId>,
) -> Result<ConstructibleSheaf, SheafError> {
    check_subset(sheaf, t_set)?;
    if !upward_closed_within(sheaf, t_set) {
        return Err(SheafError::NotUpwardClosed);
    }
    Ok(restrict_to(sheaf, t_set))
}

/// `i^*`: restriction to a downward-closed subset of the domain.
pub fn restrict_closed(
    sheaf: &ConstructibleSheaf,
    d_set: &BTreeSet<ConeId>,
) -> Result<ConstructibleSheaf, SheafError> {
    check_subset(sheaf, d_set)?;
    if !downward_closed_within(sheaf, d_set) {
        return Err(SheafError::NotDownwardClosed);
    }
    Ok(restrict_to(sheaf, d_set))
}

/// `j_!`: extension by the empty set to the whole poset. The input domain
/// must be upward closed in the full poset.
pub fn extend_by_empty(sheaf: &ConstructibleSheaf) -> Result<ConstructibleSheaf, SheafError> {
    let site = sheaf.site().clone();
    let poset = site.poset();
    let t_set = sheaf.domain().clone();
    if !poset.is_upward_closed(&t_set) {
        return Err(SheafError::NotUpwardClosed);
    }
    let all = poset.all_objects();
    let rank = site.rank();
    let mut carrier = BTreeMap::new();
    let mut monodromy = BTreeMap::new();
    let mut frobenius = BTreeMap::new();
    let mut structure = BTreeMap::new();
    for &s in &all {
        if t_set.contains(&s) {
            carrier.insert(s, sheaf.carrier(s));
            monodromy.insert(s, sheaf.monodromy(s).to_vec());
            if let Some(f) = sheaf.frobenius(s) {
                frobenius.insert(s, f.clone());
            }
        } else {
            carrier.insert(s, 0);
            monodromy.insert(s, vec![Perm::identity(0); rank]);
            if site.is_tame() {
                frobenius.insert(s, Perm::identity(0));
            }
        }
    }
    for (s, t) in poset.covers_within(&all) {
        let map = if t_set.contains(&s) {
            sheaf.structure_map(s, t).unwrap().to_vec()
        } else {
            Vec::new() // the empty function out of the empty carrier
        };
        structure.insert((s, t), map);
    }
    ConstructibleSheaf::new(site, all, carrier, monodromy, frobenius, structure)
}

/// Shared materialization for the pointwise pushforwards: carriers on `keep`
/// are copied; at every other object the carrier is the canonical family set
/// below it, with the pointwise residual action.
fn materialize_pushforward(
    sheaf: &ConstructibleSheaf,
    keep: &BTreeSet<ConeId>,
) -> ConstructibleSheaf {
    let site = sheaf.site().clone();
    let poset = site.poset();
    let all = poset.all_objects();
    let rank = site.rank();

    let mut families: BTreeMap<ConeId, Vec<Family>> = BTreeMap::new();
    let mut family_index: BTreeMap<ConeId, BTreeMap<Family, usize>> = BTreeMap::new();
    for &s in &all {
        if keep.contains(&s) {
            continue;
        }
        let fams = kan_families(sheaf, keep, s);
        let index = fams.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        families.insert(s, fams);
        family_index.insert(s, index);
    }

    let mut carrier = BTreeMap::new();
    let mut monodromy = BTreeMap::new();
    let mut frobenius = BTreeMap::new();
    for &s in &all {
        if keep.contains(&s) {
            carrier.insert(s, sheaf.carrier(s));
            monodromy.insert(s, sheaf.monodromy(s).to_vec());
            if let Some(f) = sheaf.frobenius(s) {
                frobenius.insert(s, f.clone());
            }
            continue;
        }
        let fams = &families[&s];
        let index = &family_index[&s];
        carrier.insert(s, fams.len());
        let cat = site.category();
        let perms: Vec<Perm> = (0..rank)
            .map(|i| {
                let mut e = vec![BigInt::from(0); rank];
                e[i] = BigInt::from(1);
                // kernel-fixedness makes the residual action independent of
                // the chosen lift; check that against the canonical section
                debug_assert!({
                    let canonical = cat.lift(s, &cat.ambient_class(s, &e));
                    fams.iter().all(|f| {
                        family_act_ambient(sheaf, f, &e)
                            == family_act_ambient(sheaf, f, &canonical)
                    })
                });
                let images = fams
                    .iter()
                    .map(|f| index[&family_act_ambient(sheaf, f, &e)])
                    .collect();
                Perm::from_images(images).expect("generators permute the family set")
            })
            .collect();
        monodromy.insert(s, perms);
        if site.is_tame() {
            let images = fams
                .iter()
                .map(|f| index[&family_act_frobenius(sheaf, f)])
                .collect();
            frobenius.insert(s, Perm::from_images(images).expect("Frobenius permutes families"));
        }
    }

    let mut structure = BTreeMap::new();
    for (s, t) in poset.covers_within(&all) {
        let map: Vec<usize> = if keep.contains(&s) && keep.contains(&t) {
            sheaf.structure_map(s, t).unwrap().to_vec()
        } else if keep.contains(&s) {
            // t lies outside a downward-closed domain, where the stalk is the
            // empty-limit singleton
            let empty_idx = family_index[&t][&Family::new()];
            vec![empty_idx; sheaf.carrier(s)]
        } else if keep.contains(&t) {
            families[&s].iter().map(|f| f[&t]).collect()
        } else {
            families[&s]
                .iter()
                .map(|f| {
                    let restricted: Family = f
                        .iter()
                        .filter(|(&u, _)| poset.leq(t, u))
                        .map(|(&u, &x)| (u, x))
                        .collect();
                    family_index[&t][&restricted]
                })
                .collect()
        };
        structure.insert((s, t), map);
    }

    ConstructibleSheaf::new(site, all, carrier, monodromy, frobenius, structure)
        .expect("pushforwards are well-formed")
}

/// `j_*`: right Kan extension along an open (upward-closed) inclusion,
/// computed stalkwise as kernel-fixed compatible families.
pub fn pushforward_open(sheaf: &ConstructibleSheaf) -> Result<ConstructibleSheaf, SheafError> {
    let poset = sheaf.site().poset();
    if !poset.is_upward_closed(sheaf.domain()) {
        return Err(SheafError::NotUpwardClosed);
    }
    Ok(materialize_pushforward(sheaf, &sheaf.domain().clone()))
}

/// `i_*`: extension along a closed (downward-closed) inclusion; singleton
/// stalks (empty limits) outside the domain.
pub fn pushforward_closed(sheaf: &ConstructibleSheaf) -> Result<ConstructibleSheaf, SheafError> {
    let poset = sheaf.site().poset();
    if !poset.is_downward_closed(sheaf.domain()) {
        return Err(SheafError::NotDownwardClosed);
    }
    Ok(materialize_pushforward(sheaf, &sheaf.domain().clone()))
}

/// `π^*`: pull a stratum local system back over the star of its stratum. The
/// hom group of every orbit in the star acts through its projection to the
/// base stratum's group, and all structure maps are identities.
pub fn projection_pullback(ls: &StratumLocalSystem) -> ConstructibleSheaf {
    let site = &ls.site;
    let cat = site.category();
    let poset = site.poset();
    let s = ls.object;
    let star = poset.up_set(s);
    let rank = site.rank();

    let perms: Vec<Perm> = (0..rank)
        .map(|i| {
            let mut e = vec![BigInt::from(0); rank];
            e[i] = BigInt::from(1);
            let class = cat.ambient_class(s, &e);
            if ls.generators.is_empty() {
                Perm::identity(ls.size)
            } else {
                crate::perm::word(&ls.generators, &class)
            }
        })
        .collect();

    let mut carrier = BTreeMap::new();
    let mut monodromy = BTreeMap::new();
    let mut frobenius = BTreeMap::new();
    let mut structure = BTreeMap::new();
    for &t in &star {
        carrier.insert(t, ls.size);
        monodromy.insert(t, perms.clone());
        if let Some(f) = &ls.frobenius {
            frobenius.insert(t, f.clone());
        }
    }
    for (a, b) in poset.covers_within(&star) {
        structure.insert((a, b), (0..ls.size).collect());
    }
    ConstructibleSheaf::new(site.clone(), star, carrier, monodromy, frobenius, structure)
        .expect("pullbacks along the retraction are well-formed")
}

/// `π_*`: push a sheaf on a star chart down to its closed stratum, by the
/// same pointwise family formula as the open pushforward, taken over the
/// whole star. For a valid constructible input the result is canonically
/// isomorphic to the stalk at the stratum; that comparison is recomputed and
/// asserted here rather than assumed.
pub fn projection_pushforward(
    sheaf: &ConstructibleSheaf,
) -> Result<StratumLocalSystem, SheafError> {
    let site = sheaf.site().clone();
    let poset = site.poset();
    let cat = site.category();
    let minimals = poset.minimal_in(sheaf.domain());
    let [s] = minimals[..] else {
        return Err(SheafError::Malformed(
            "retraction pushforward needs a star domain with a unique closed stratum".into(),
        ));
    };
    if sheaf.domain() != &poset.up_set(s) {
        return Err(SheafError::Malformed("domain must be the full star of its stratum".into()));
    }

    let fams = kan_families(sheaf, sheaf.domain(), s);
    let index: BTreeMap<Family, usize> =
        fams.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();

    let rank_s = cat.group_rank(s);
    let generators: Vec<Perm> = (0..rank_s)
        .map(|j| {
            let mut e = vec![BigInt::from(0); rank_s];
            e[j] = BigInt::from(1);
            let ambient = cat.lift(s, &e);
            let images = fams
                .iter()
                .map(|f| index[&family_act_ambient(sheaf, f, &ambient)])
                .collect();
            Perm::from_images(images).expect("residual action permutes families")
        })
        .collect();
    let frobenius = site.is_tame().then(|| {
        let images = fams
            .iter()
            .map(|f| index[&family_act_frobenius(sheaf, f)])
            .collect();
        Perm::from_images(images).expect("Frobenius permutes families")
    });

    // the canonical comparison with the stalk at s must be an equivariant
    // bijection; a failure means the input was not a valid sheaf
    let mut hit = vec![false; fams.len()];
    for x in 0..sheaf.carrier(s) {
        let family: Family = sheaf
            .domain()
            .iter()
            .map(|&t| Ok((t, sheaf.chain_map(s, t)?[x])))
            .collect::<Result<_, SheafError>>()?;
        let idx = *index.get(&family).unwrap_or_else(|| {
            panic!("stalk element {x} does not give a kernel-fixed family; input sheaf invalid")
        });
        assert!(!hit[idx], "comparison map must be injective");
        hit[idx] = true;
    }
    assert!(
        hit.iter().all(|&h| h),
        "comparison map must be surjective onto the family set"
    );

    Ok(StratumLocalSystem { site, object: s, size: fams.len(), generators, frobenius })
}
