//! Hom sets, isomorphism testing, finite limits, and coproducts, all by
//! exhaustive (orbit-pruned) enumeration over finite carriers.

use super::sheaf::{constant_sheaf, same_site, ConstructibleSheaf, Site, StratumLocalSystem};
use super::{SheafError, SheafMorphism};
use crate::fan::ConeId;
use crate::perm::Perm;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Orbit decomposition of a generator action, with a BFS spanning tree so an
/// equivariant map is determined by the image of each orbit representative.
struct Orbits {
    orbits: Vec<OrbitInfo>,
}

struct OrbitInfo {
    elements: Vec<usize>,
    /// aligned with `elements`; entry k is (position of parent, generator)
    parents: Vec<Option<(usize, usize)>>,
}

fn orbits_of(gens: &[Perm], size: usize) -> Orbits {
    let mut seen = vec![false; size];
    let mut orbits = Vec::new();
    for start in 0..size {
        if seen[start] {
            continue;
        }
        let mut elements = vec![start];
        let mut parents = vec![None];
        seen[start] = true;
        let mut head = 0;
        while head < elements.len() {
            let x = elements[head];
            for (gi, g) in gens.iter().enumerate() {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    elements.push(y);
                    parents.push(Some((head, gi)));
                }
            }
            head += 1;
        }
        orbits.push(OrbitInfo { elements, parents });
    }
    Orbits { orbits }
}

fn generators_at(sheaf: &ConstructibleSheaf, s: ConeId) -> Vec<Perm> {
    let mut gens = sheaf.monodromy(s).to_vec();
    if let Some(f) = sheaf.frobenius(s) {
        gens.push(f.clone());
    }
    gens
}

/// Per-orbit candidate images for equivariant maps: a map is determined by a
/// choice of one candidate per orbit.
pub(crate) struct OrbitCandidates {
    pub orbit_elements: Vec<Vec<usize>>,
    /// per orbit, each candidate is an image vector aligned with the orbit's
    /// elements
    pub candidates: Vec<Vec<Vec<usize>>>,
}

pub(crate) fn orbit_candidates(
    size_src: usize,
    gens_src: &[Perm],
    size_tgt: usize,
    gens_tgt: &[Perm],
    forced: &BTreeMap<usize, usize>,
) -> OrbitCandidates {
    assert_eq!(gens_src.len(), gens_tgt.len());
    let orbits = orbits_of(gens_src, size_src);
    let mut position = vec![0usize; size_src];
    for orbit in &orbits.orbits {
        for (k, &e) in orbit.elements.iter().enumerate() {
            position[e] = k;
        }
    }

    let mut per_orbit: Vec<Vec<Vec<usize>>> = Vec::new();
    for orbit in &orbits.orbits {
        let mut candidates = Vec::new();
        'candidate: for y0 in 0..size_tgt {
            let mut img = vec![usize::MAX; orbit.elements.len()];
            img[0] = y0;
            for k in 1..orbit.elements.len() {
                let (pk, gi) = orbit.parents[k].unwrap();
                img[k] = gens_tgt[gi].apply(img[pk]);
            }
            for (k, &e) in orbit.elements.iter().enumerate() {
                for (gi, g) in gens_src.iter().enumerate() {
                    let e2 = g.apply(e);
                    if gens_tgt[gi].apply(img[k]) != img[position[e2]] {
                        continue 'candidate;
                    }
                }
                if let Some(&v) = forced.get(&e) {
                    if v != img[k] {
                        continue 'candidate;
                    }
                }
            }
            candidates.push(img);
        }
        per_orbit.push(candidates);
    }
    OrbitCandidates {
        orbit_elements: orbits.orbits.into_iter().map(|o| o.elements).collect(),
        candidates: per_orbit,
    }
}

/// All maps `{0..size_src} -> {0..size_tgt}` commuting with the paired
/// generator actions and agreeing with `forced` where defined.
pub(crate) fn equivariant_maps(
    size_src: usize,
    gens_src: &[Perm],
    size_tgt: usize,
    gens_tgt: &[Perm],
    forced: &BTreeMap<usize, usize>,
) -> Vec<Vec<usize>> {
    let oc = orbit_candidates(size_src, gens_src, size_tgt, gens_tgt, forced);
    let mut out = Vec::new();
    let mut acc = vec![0usize; size_src];
    fn assemble(
        oc: &OrbitCandidates,
        idx: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if idx == oc.orbit_elements.len() {
            out.push(acc.clone());
            return;
        }
        for candidate in &oc.candidates[idx] {
            for (k, &e) in oc.orbit_elements[idx].iter().enumerate() {
                acc[e] = candidate[k];
            }
            assemble(oc, idx + 1, acc, out);
        }
    }
    assemble(&oc, 0, &mut acc, &mut out);
    out
}

fn check_comparable(f: &ConstructibleSheaf, g: &ConstructibleSheaf) -> Result<(), SheafError> {
    if !same_site(f.site(), g.site()) {
        return Err(SheafError::SiteMismatch);
    }
    if f.domain() != g.domain() {
        return Err(SheafError::DomainMismatch);
    }
    Ok(())
}

/// Is `components` a natural transformation `f -> g`?
pub fn is_natural(
    f: &ConstructibleSheaf,
    g: &ConstructibleSheaf,
    components: &BTreeMap<ConeId, Vec<usize>>,
) -> bool {
    let poset = f.site().poset();
    for &s in f.domain() {
        let Some(c) = components.get(&s) else { return false };
        if c.len() != f.carrier(s) || c.iter().any(|&x| x >= g.carrier(s)) {
            return false;
        }
        let gens_f = generators_at(f, s);
        let gens_g = generators_at(g, s);
        for (a, b) in gens_f.iter().zip(&gens_g) {
            for x in 0..f.carrier(s) {
                if b.apply(c[x]) != c[a.apply(x)] {
                    return false;
                }
            }
        }
    }
    for (s, t) in poset.covers_within(f.domain()) {
        let mf = f.structure_map(s, t).unwrap();
        let mg = g.structure_map(s, t).unwrap();
        let cs = &components[&s];
        let ct = &components[&t];
        for x in 0..f.carrier(s) {
            if ct[mf[x]] != mg[cs[x]] {
                return false;
            }
        }
    }
    true
}

/// Every natural transformation `f -> g`, in a deterministic order.
pub fn hom_set(
    f: &ConstructibleSheaf,
    g: &ConstructibleSheaf,
) -> Result<Vec<SheafMorphism>, SheafError> {
    check_comparable(f, g)?;
    let poset = f.site().poset();
    let order = poset.linear_extension(f.domain());
    let covers = poset.covers_within(f.domain());
    let mut below: BTreeMap<ConeId, Vec<ConeId>> = BTreeMap::new();
    for &(s, t) in &covers {
        below.entry(t).or_default().push(s);
    }

    struct Ctx<'a> {
        f: &'a ConstructibleSheaf,
        g: &'a ConstructibleSheaf,
        order: Vec<ConeId>,
        below: BTreeMap<ConeId, Vec<ConeId>>,
        out: Vec<SheafMorphism>,
    }

    fn dfs(ctx: &mut Ctx, idx: usize, assigned: &mut BTreeMap<ConeId, Vec<usize>>) {
        if idx == ctx.order.len() {
            ctx.out.push(SheafMorphism { components: assigned.clone() });
            return;
        }
        let t = ctx.order[idx];
        let mut forced: BTreeMap<usize, usize> = BTreeMap::new();
        if let Some(preds) = ctx.below.get(&t) {
            for &s in preds {
                let mf = ctx.f.structure_map(s, t).unwrap();
                let mg = ctx.g.structure_map(s, t).unwrap();
                let cs = &assigned[&s];
                for x in 0..ctx.f.carrier(s) {
                    let key = mf[x];
                    let val = mg[cs[x]];
                    match forced.get(&key) {
                        None => {
                            forced.insert(key, val);
                        }
                        Some(&w) if w != val => return,
                        _ => {}
                    }
                }
            }
        }
        let maps = equivariant_maps(
            ctx.f.carrier(t),
            &generators_at(ctx.f, t),
            ctx.g.carrier(t),
            &generators_at(ctx.g, t),
            &forced,
        );
        for m in maps {
            assigned.insert(t, m);
            dfs(ctx, idx + 1, assigned);
            assigned.remove(&t);
        }
    }

    let mut ctx = Ctx { f, g, order, below, out: Vec::new() };
    dfs(&mut ctx, 0, &mut BTreeMap::new());
    Ok(ctx.out)
}

pub fn compose_sheaf_morphisms(outer: &SheafMorphism, inner: &SheafMorphism) -> SheafMorphism {
    let components = inner
        .components
        .iter()
        .map(|(&s, m)| (s, m.iter().map(|&x| outer.components[&s][x]).collect()))
        .collect();
    SheafMorphism { components }
}

/// Natural isomorphism test: some natural transformation with all components
/// bijective (its inverse is then automatically natural).
pub fn are_isomorphic(
    f: &ConstructibleSheaf,
    g: &ConstructibleSheaf,
) -> Result<bool, SheafError> {
    check_comparable(f, g)?;
    if f.domain().iter().any(|&s| f.carrier(s) != g.carrier(s)) {
        return Ok(false);
    }
    let homs = hom_set(f, g)?;
    Ok(homs.iter().any(|m| {
        m.components.iter().all(|(&s, c)| {
            let mut seen = vec![false; g.carrier(s)];
            c.iter().all(|&x| {
                if seen[x] {
                    false
                } else {
                    seen[x] = true;
                    true
                }
            })
        })
    }))
}

/// A finite diagram of sheaves on a common site and domain.
pub struct SheafDiagram {
    pub sheaves: Vec<ConstructibleSheaf>,
    /// (source index, target index, morphism)
    pub arrows: Vec<(usize, usize, SheafMorphism)>,
}

/// Pointwise limit of a finite nonempty diagram: tuples satisfying every
/// arrow constraint, with componentwise actions and structure maps.
pub fn limit(diagram: &SheafDiagram) -> Result<ConstructibleSheaf, SheafError> {
    let Some(first) = diagram.sheaves.first() else {
        return Err(SheafError::Malformed("limit of an empty diagram: use terminal_sheaf".into()));
    };
    for sh in &diagram.sheaves[1..] {
        check_comparable(first, sh)?;
    }
    for &(a, b, ref m) in &diagram.arrows {
        if a >= diagram.sheaves.len() || b >= diagram.sheaves.len() {
            return Err(SheafError::Malformed("arrow endpoint out of range".into()));
        }
        if !is_natural(&diagram.sheaves[a], &diagram.sheaves[b], &m.components) {
            return Err(SheafError::Malformed("diagram arrow is not natural".into()));
        }
    }

    let site = first.site().clone();
    let domain = first.domain().clone();
    let poset = site.poset();
    let k = diagram.sheaves.len();

    let mut tuples: BTreeMap<ConeId, Vec<Vec<usize>>> = BTreeMap::new();
    let mut tuple_index: BTreeMap<ConeId, BTreeMap<Vec<usize>, usize>> = BTreeMap::new();
    for &s in &domain {
        let sizes: Vec<usize> = diagram.sheaves.iter().map(|sh| sh.carrier(s)).collect();
        let mut all: Vec<Vec<usize>> = vec![vec![]];
        for &size in &sizes {
            let mut next = Vec::new();
            for t in &all {
                for x in 0..size {
                    let mut t2 = t.clone();
                    t2.push(x);
                    next.push(t2);
                }
            }
            all = next;
        }
        let admitted: Vec<Vec<usize>> = all
            .into_iter()
            .filter(|t| {
                diagram
                    .arrows
                    .iter()
                    .all(|(a, b, m)| m.components[&s][t[*a]] == t[*b])
            })
            .collect();
        let index = admitted.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        tuples.insert(s, admitted);
        tuple_index.insert(s, index);
    }

    let rank = site.rank();
    let mut carrier = BTreeMap::new();
    let mut monodromy = BTreeMap::new();
    let mut frobenius = BTreeMap::new();
    let mut structure = BTreeMap::new();
    for &s in &domain {
        let ts = &tuples[&s];
        carrier.insert(s, ts.len());
        let perms: Vec<Perm> = (0..rank)
            .map(|i| {
                let images = ts
                    .iter()
                    .map(|t| {
                        let moved: Vec<usize> = (0..k)
                            .map(|j| diagram.sheaves[j].monodromy(s)[i].apply(t[j]))
                            .collect();
                        tuple_index[&s][&moved]
                    })
                    .collect();
                Perm::from_images(images).expect("componentwise action permutes tuples")
            })
            .collect();
        monodromy.insert(s, perms);
        if site.is_tame() {
            let images = ts
                .iter()
                .map(|t| {
                    let moved: Vec<usize> = (0..k)
                        .map(|j| diagram.sheaves[j].frobenius(s).unwrap().apply(t[j]))
                        .collect();
                    tuple_index[&s][&moved]
                })
                .collect();
            frobenius.insert(s, Perm::from_images(images).expect("Frobenius permutes tuples"));
        }
    }
    for (s, t) in poset.covers_within(&domain) {
        let map = tuples[&s]
            .iter()
            .map(|tup| {
                let moved: Vec<usize> = (0..k)
                    .map(|j| diagram.sheaves[j].structure_map(s, t).unwrap()[tup[j]])
                    .collect();
                tuple_index[&t][&moved]
            })
            .collect();
        structure.insert((s, t), map);
    }
    ConstructibleSheaf::new(site, domain, carrier, monodromy, frobenius, structure)
}

/// Pointwise disjoint union.
pub fn coproduct(parts: &[ConstructibleSheaf]) -> Result<ConstructibleSheaf, SheafError> {
    let Some(first) = parts.first() else {
        return Err(SheafError::Malformed("coproduct needs at least one part".into()));
    };
    for sh in &parts[1..] {
        check_comparable(first, sh)?;
    }
    let site = first.site().clone();
    let domain = first.domain().clone();
    let poset = site.poset();
    let rank = site.rank();

    let offsets_at = |s: ConeId| -> Vec<usize> {
        let mut offs = vec![0usize];
        for sh in parts {
            offs.push(offs.last().unwrap() + sh.carrier(s));
        }
        offs
    };

    let mut carrier = BTreeMap::new();
    let mut monodromy = BTreeMap::new();
    let mut frobenius = BTreeMap::new();
    let mut structure = BTreeMap::new();
    for &s in &domain {
        let offs = offsets_at(s);
        let total = *offs.last().unwrap();
        carrier.insert(s, total);
        let perms: Vec<Perm> = (0..rank)
            .map(|i| {
                let mut images = vec![0usize; total];
                for (j, sh) in parts.iter().enumerate() {
                    for x in 0..sh.carrier(s) {
                        images[offs[j] + x] = offs[j] + sh.monodromy(s)[i].apply(x);
                    }
                }
                Perm::from_images(images).expect("blockwise permutation")
            })
            .collect();
        monodromy.insert(s, perms);
        if site.is_tame() {
            let mut images = vec![0usize; total];
            for (j, sh) in parts.iter().enumerate() {
                for x in 0..sh.carrier(s) {
                    images[offs[j] + x] = offs[j] + sh.frobenius(s).unwrap().apply(x);
                }
            }
            frobenius.insert(s, Perm::from_images(images).expect("blockwise permutation"));
        }
    }
    for (s, t) in poset.covers_within(&domain) {
        let offs_s = offsets_at(s);
        let offs_t = offsets_at(t);
        let mut map = vec![0usize; *offs_s.last().unwrap()];
        for (j, sh) in parts.iter().enumerate() {
            let m = sh.structure_map(s, t).unwrap();
            for x in 0..sh.carrier(s) {
                map[offs_s[j] + x] = offs_t[j] + m[x];
            }
        }
        structure.insert((s, t), map);
    }
    ConstructibleSheaf::new(site, domain, carrier, monodromy, frobenius, structure)
}

/// Terminal object: the constant singleton sheaf.
pub fn terminal_sheaf(site: Arc<Site>, domain: BTreeSet<ConeId>) -> ConstructibleSheaf {
    constant_sheaf(site, domain, 1)
}

fn local_generators(ls: &StratumLocalSystem) -> Vec<Perm> {
    let mut gens = ls.generators.clone();
    if let Some(f) = &ls.frobenius {
        gens.push(f.clone());
    }
    gens
}

/// Equivariant maps between two local systems at the same stratum.
pub fn hom_local(a: &StratumLocalSystem, b: &StratumLocalSystem) -> Result<Vec<Vec<usize>>, SheafError> {
    if !same_site(&a.site, &b.site) {
        return Err(SheafError::SiteMismatch);
    }
    if a.object != b.object {
        return Err(SheafError::DomainMismatch);
    }
    Ok(equivariant_maps(
        a.size,
        &local_generators(a),
        b.size,
        &local_generators(b),
        &BTreeMap::new(),
    ))
}

/// Is `map` an equivariant bijection `a -> b`?
pub fn is_local_iso(a: &StratumLocalSystem, b: &StratumLocalSystem, map: &[usize]) -> bool {
    if a.size != b.size || map.len() != a.size {
        return false;
    }
    let mut seen = vec![false; b.size];
    for &y in map {
        if y >= b.size || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    local_generators(a)
        .iter()
        .zip(local_generators(b).iter())
        .all(|(ga, gb)| (0..a.size).all(|x| gb.apply(map[x]) == map[ga.apply(x)]))
}

/// Disjoint union of local systems at the same stratum.
pub fn coproduct_local(
    a: &StratumLocalSystem,
    b: &StratumLocalSystem,
) -> Result<StratumLocalSystem, SheafError> {
    if !same_site(&a.site, &b.site) {
        return Err(SheafError::SiteMismatch);
    }
    if a.object != b.object {
        return Err(SheafError::DomainMismatch);
    }
    let size = a.size + b.size;
    let block = |pa: &Perm, pb: &Perm| -> Perm {
        let mut images = Vec::with_capacity(size);
        images.extend(pa.images().iter().copied());
        images.extend(pb.images().iter().map(|&x| x + a.size));
        Perm::from_images(images).expect("blockwise permutation")
    };
    let generators = a
        .generators
        .iter()
        .zip(&b.generators)
        .map(|(pa, pb)| block(pa, pb))
        .collect();
    let frobenius = match (&a.frobenius, &b.frobenius) {
        (Some(fa), Some(fb)) => Some(block(fa, fb)),
        (None, None) => None,
        _ => return Err(SheafError::LevelMismatch("mixed Frobenius data".into())),
    };
    Ok(StratumLocalSystem { site: a.site.clone(), object: a.object, size, generators, frobenius })
}
