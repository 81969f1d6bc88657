//! Recollement at a minimal stratum: a sheaf is equivalent to its open
//! restriction, its closed stalk, and a comparison map from the stalk into
//! the pushforward of the open part.

use super::families::{family_act_ambient, family_act_frobenius, kan_families, Family};
use super::sheaf::{stalk_local_system, ConstructibleSheaf, StratumLocalSystem};
use super::SheafError;
use crate::fan::ConeId;
use crate::perm::{word, Perm};
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};

/// The recollement data of a sheaf at a minimal stratum `z`: `open_part` is
/// the restriction away from `z`, `closed_part` the stalk at `z`, and `theta`
/// indexes, for each stalk element, the compatible family it maps to in the
/// pushforward of the open part (families in canonical order).
#[derive(Clone, PartialEq, Debug)]
pub struct Decomposition {
    pub stratum: ConeId,
    pub open_part: ConstructibleSheaf,
    pub closed_part: StratumLocalSystem,
    pub theta: Vec<usize>,
}

pub fn decompose(
    sheaf: &ConstructibleSheaf,
    z: ConeId,
) -> Result<Decomposition, SheafError> {
    if !sheaf.domain().contains(&z) {
        return Err(SheafError::UnknownObject(z));
    }
    let poset = sheaf.site().poset();
    if !poset.minimal_in(sheaf.domain()).contains(&z) {
        return Err(SheafError::NotMinimal(z));
    }
    let open_domain: BTreeSet<ConeId> =
        sheaf.domain().iter().copied().filter(|&s| s != z).collect();
    let open_part = super::functors::restrict_open(sheaf, &open_domain)?;
    let closed_part = stalk_local_system(sheaf, z)?;

    let fams = kan_families(&open_part, &open_domain, z);
    let index: BTreeMap<Family, usize> =
        fams.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    let mut theta = Vec::with_capacity(sheaf.carrier(z));
    for x in 0..sheaf.carrier(z) {
        let family: Family = open_domain
            .iter()
            .filter(|&&t| poset.leq(z, t))
            .map(|&t| Ok((t, sheaf.chain_map(z, t)?[x])))
            .collect::<Result<_, SheafError>>()?;
        let idx = index.get(&family).copied().ok_or_else(|| {
            SheafError::Malformed(format!(
                "stalk element {x} does not map to a kernel-fixed compatible family"
            ))
        })?;
        theta.push(idx);
    }
    Ok(Decomposition { stratum: z, open_part, closed_part, theta })
}

/// Rebuilds a sheaf from recollement data: the carrier at the stratum is the
/// closed stalk, and the comparison map supplies the structure maps out of
/// it. Rejects non-equivariant comparison maps.
pub fn glue(
    open_part: &ConstructibleSheaf,
    closed_part: &StratumLocalSystem,
    theta: &[usize],
) -> Result<ConstructibleSheaf, SheafError> {
    let site = open_part.site().clone();
    if !super::sheaf::same_site(&site, &closed_part.site) {
        return Err(SheafError::SiteMismatch);
    }
    let poset = site.poset();
    let cat = site.category();
    let z = closed_part.object;
    if open_part.domain().contains(&z) {
        return Err(SheafError::Malformed(format!("stratum {z} already lies in the open part")));
    }
    let mut domain = open_part.domain().clone();
    domain.insert(z);
    if !poset.is_convex(&domain) {
        return Err(SheafError::NotConvex);
    }
    if !poset.minimal_in(&domain).contains(&z) {
        return Err(SheafError::NotMinimal(z));
    }
    if theta.len() != closed_part.size {
        return Err(SheafError::Malformed("comparison map has the wrong source size".into()));
    }

    let fams = kan_families(open_part, open_part.domain(), z);
    let index: BTreeMap<Family, usize> =
        fams.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    if theta.iter().any(|&i| i >= fams.len()) {
        return Err(SheafError::Malformed("comparison map hits a nonexistent family".into()));
    }

    // ambient action at z through the closed stalk's hom-group generators
    let rank = site.rank();
    let ambient_perms: Vec<Perm> = (0..rank)
        .map(|i| {
            let mut e = vec![BigInt::from(0); rank];
            e[i] = BigInt::from(1);
            if closed_part.generators.is_empty() {
                Perm::identity(closed_part.size)
            } else {
                word(&closed_part.generators, &cat.ambient_class(z, &e))
            }
        })
        .collect();

    for x in 0..closed_part.size {
        for (i, p) in ambient_perms.iter().enumerate() {
            let mut e = vec![BigInt::from(0); rank];
            e[i] = BigInt::from(1);
            let lhs = theta[p.apply(x)];
            let rhs = index[&family_act_ambient(open_part, &fams[theta[x]], &e)];
            if lhs != rhs {
                return Err(SheafError::NonEquivariantGlue { element: x });
            }
        }
        if let Some(frob) = &closed_part.frobenius {
            let lhs = theta[frob.apply(x)];
            let rhs = index[&family_act_frobenius(open_part, &fams[theta[x]])];
            if lhs != rhs {
                return Err(SheafError::NonEquivariantGlue { element: x });
            }
        }
    }

    let mut carrier = BTreeMap::new();
    let mut monodromy = BTreeMap::new();
    let mut frobenius = BTreeMap::new();
    let mut structure = BTreeMap::new();
    for &s in open_part.domain() {
        carrier.insert(s, open_part.carrier(s));
        monodromy.insert(s, open_part.monodromy(s).to_vec());
        if let Some(f) = open_part.frobenius(s) {
            frobenius.insert(s, f.clone());
        }
    }
    carrier.insert(z, closed_part.size);
    monodromy.insert(z, ambient_perms);
    if site.is_tame() {
        let f = closed_part
            .frobenius
            .clone()
            .ok_or_else(|| SheafError::LevelMismatch("closed stalk lacks Frobenius".into()))?;
        frobenius.insert(z, f);
    }
    for (s, t) in poset.covers_within(&domain) {
        let map = if s == z {
            (0..closed_part.size).map(|x| fams[theta[x]][&t]).collect()
        } else {
            open_part.structure_map(s, t).unwrap().to_vec()
        };
        structure.insert((s, t), map);
    }

    ConstructibleSheaf::new(site, domain, carrier, monodromy, frobenius, structure)
}
