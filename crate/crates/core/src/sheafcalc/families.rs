//! Compatible families of stalk elements: the finite limits behind sections
//! and pointwise pushforwards.

use super::sheaf::ConstructibleSheaf;
use super::SheafError;
use crate::fan::ConeId;
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};

/// A choice of one carrier element per object of a subposet.
pub type Family = BTreeMap<ConeId, usize>;

/// All families over `objs` whose member at each object passes `admissible`
/// and which are compatible with every structure map inside `objs`. The
/// output order is deterministic (lexicographic in object order).
pub(crate) fn enumerate_families(
    sheaf: &ConstructibleSheaf,
    objs: &BTreeSet<ConeId>,
    admissible: &dyn Fn(ConeId, usize) -> bool,
) -> Vec<Family> {
    let poset = sheaf.site().poset();
    let order = poset.linear_extension(objs);
    let covers = poset.covers_within(objs);
    let mut below: BTreeMap<ConeId, Vec<ConeId>> = BTreeMap::new();
    for &(s, t) in &covers {
        below.entry(t).or_default().push(s);
    }

    let mut out = Vec::new();
    let mut current: Family = BTreeMap::new();
    search(sheaf, &order, 0, &below, admissible, &mut current, &mut out);
    out
}

fn search(
    sheaf: &ConstructibleSheaf,
    order: &[ConeId],
    idx: usize,
    below: &BTreeMap<ConeId, Vec<ConeId>>,
    admissible: &dyn Fn(ConeId, usize) -> bool,
    current: &mut Family,
    out: &mut Vec<Family>,
) {
    if idx == order.len() {
        out.push(current.clone());
        return;
    }
    let t = order[idx];
    // values forced by already-assigned covering predecessors
    let mut forced: Option<usize> = None;
    let mut consistent = true;
    if let Some(preds) = below.get(&t) {
        for &s in preds {
            let map = sheaf.structure_map(s, t).expect("covering pair in domain");
            let v = map[current[&s]];
            match forced {
                None => forced = Some(v),
                Some(w) if w != v => {
                    consistent = false;
                    break;
                }
                _ => {}
            }
        }
    }
    if !consistent {
        return;
    }
    let candidates: Vec<usize> = match forced {
        Some(v) => vec![v],
        None => (0..sheaf.carrier(t)).collect(),
    };
    for v in candidates {
        if !admissible(t, v) {
            continue;
        }
        current.insert(t, v);
        search(sheaf, order, idx + 1, below, admissible, current, out);
        current.remove(&t);
    }
}

/// Sections of the sheaf over an upward-closed subset `T` of its domain:
/// families fixed by every hom-group generator (and Frobenius at finite
/// level) and compatible with all structure maps. `T = ∅` yields the single
/// empty family.
pub fn sections(
    sheaf: &ConstructibleSheaf,
    t_set: &BTreeSet<ConeId>,
) -> Result<Vec<Family>, SheafError> {
    for s in t_set {
        if !sheaf.domain().contains(s) {
            return Err(SheafError::UnknownObject(*s));
        }
    }
    let poset = sheaf.site().poset();
    let upward_within = t_set.iter().all(|&s| {
        sheaf
            .domain()
            .iter()
            .all(|&x| !poset.leq(s, x) || t_set.contains(&x))
    });
    if !upward_within {
        return Err(SheafError::NotUpwardClosed);
    }
    let admissible = |s: ConeId, x: usize| -> bool {
        sheaf.monodromy(s).iter().all(|p| p.apply(x) == x)
            && sheaf.frobenius(s).is_none_or(|f| f.apply(x) == x)
    };
    Ok(enumerate_families(sheaf, t_set, &admissible))
}

/// The pointwise right-Kan-extension stalk below `s`: families over
/// `{t in objs : t >= s}` whose member at `t` is fixed by `ker(G_t -> G_s)`
/// and which are structure-compatible. This is the stalk of the open
/// pushforward at `s`, and of the retraction pushforward when `s` itself
/// lies in `objs`.
pub fn kan_families(
    sheaf: &ConstructibleSheaf,
    objs: &BTreeSet<ConeId>,
    s: ConeId,
) -> Vec<Family> {
    let site = sheaf.site().clone();
    let poset = site.poset();
    let cat = site.category();
    let above: BTreeSet<ConeId> = objs.iter().copied().filter(|&t| poset.leq(s, t)).collect();

    let mut kernel_perms: BTreeMap<ConeId, Vec<crate::perm::Perm>> = BTreeMap::new();
    for &t in &above {
        let basis = cat.kernel_basis(t, s).expect("s <= t");
        let perms = basis
            .row_vecs()
            .iter()
            .map(|row| sheaf.act_class(t, row))
            .collect();
        kernel_perms.insert(t, perms);
    }

    let admissible = move |t: ConeId, x: usize| -> bool {
        kernel_perms[&t].iter().all(|p| p.apply(x) == x)
    };
    enumerate_families(sheaf, &above, &admissible)
}

/// Pointwise action of an ambient lattice vector on a family.
pub(crate) fn family_act_ambient(
    sheaf: &ConstructibleSheaf,
    family: &Family,
    exps: &[BigInt],
) -> Family {
    family
        .iter()
        .map(|(&t, &x)| (t, sheaf.act_ambient(t, exps).apply(x)))
        .collect()
}

/// Pointwise Frobenius on a family.
pub(crate) fn family_act_frobenius(sheaf: &ConstructibleSheaf, family: &Family) -> Family {
    family
        .iter()
        .map(|(&t, &x)| (t, sheaf.frobenius(t).expect("finite level").apply(x)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundcat::build_fundamental_category;
    use crate::perm::Perm;
    use crate::sheafcalc::sheaf::{constant_sheaf, Site};
    use crate::{fans, sheafcalc::sheaf::ConstructibleSheaf};
    use std::sync::Arc;

    #[test]
    fn constant_sheaf_sections_count_stalk() {
        let cat = build_fundamental_category(&fans::projective(1)).unwrap();
        let site = Arc::new(Site::Complex(cat));
        let all = site.poset().all_objects();
        let sheaf = constant_sheaf(site.clone(), all.clone(), 3);
        assert_eq!(sections(&sheaf, &all).unwrap().len(), 3);
        assert_eq!(sections(&sheaf, &BTreeSet::new()).unwrap().len(), 1);
    }

    #[test]
    fn sections_reject_non_upward_closed() {
        let cat = build_fundamental_category(&fans::affine(1)).unwrap();
        let site = Arc::new(Site::Complex(cat));
        let all = site.poset().all_objects();
        let sheaf = constant_sheaf(site.clone(), all, 1);
        let bottom = site
            .poset()
            .objects()
            .find(|&s| site.poset().orbit_dim(s) == 0)
            .unwrap();
        let t: BTreeSet<_> = [bottom].into_iter().collect();
        assert_eq!(sections(&sheaf, &t), Err(SheafError::NotUpwardClosed));
    }

    #[test]
    fn swap_monodromy_has_no_invariant_sections() {
        let cat = build_fundamental_category(&fans::affine(1)).unwrap();
        let site = Arc::new(Site::Complex(cat));
        let poset = site.poset();
        let top = poset.top();
        let domain: BTreeSet<_> = [top].into_iter().collect();
        let carrier = [(top, 2)].into_iter().collect();
        let monodromy = [(top, vec![Perm::transposition(2, 0, 1)])].into_iter().collect();
        let sheaf = ConstructibleSheaf::new(
            site,
            domain.clone(),
            carrier,
            monodromy,
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(sections(&sheaf, &domain).unwrap().len(), 0);
    }
}
