//! Sheaf and local-system data types, well-formedness, validation, and
//! functor evaluation.

use super::SheafError;
use crate::fan::{span_sublattice, ConeId, OrbitPoset};
use crate::fundcat::{FiniteLevelCategory, FiniteMorphism, FundamentalCategory, GaloisDatum, Morphism};
use crate::perm::{word, Perm};
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Where a sheaf lives: the plain fundamental category (topological case) or
/// its finite-level Galois-enriched truncation.
#[derive(Clone, PartialEq, Debug)]
pub enum Site {
    Complex(FundamentalCategory),
    Tame(FiniteLevelCategory),
}

impl Site {
    pub fn category(&self) -> &FundamentalCategory {
        match self {
            Site::Complex(c) => c,
            Site::Tame(f) => &f.base,
        }
    }

    pub fn galois(&self) -> Option<&GaloisDatum> {
        match self {
            Site::Complex(_) => None,
            Site::Tame(f) => Some(&f.galois),
        }
    }

    pub fn finite(&self) -> Option<&FiniteLevelCategory> {
        match self {
            Site::Complex(_) => None,
            Site::Tame(f) => Some(f),
        }
    }

    pub fn poset(&self) -> &OrbitPoset {
        self.category().poset()
    }

    pub fn rank(&self) -> usize {
        self.category().rank()
    }

    pub fn is_tame(&self) -> bool {
        matches!(self, Site::Tame(_))
    }
}

pub(crate) fn same_site(a: &Arc<Site>, b: &Arc<Site>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// An S-constructible sheaf of finite sets, stored as a functor on the full
/// subcategory spanned by `domain` (which must be convex, so that covering
/// relations and intervals agree with the ambient poset).
///
/// Carrier sets are `{0, .., size-1}`. Monodromy records one permutation per
/// ambient lattice generator; validity requires these to descend to the hom
/// group of each orbit. Structure maps are stored on covering relations only;
/// longer morphisms are evaluated along maximal chains, which the diamond
/// check makes well-defined.
#[derive(Clone, PartialEq, Debug)]
pub struct ConstructibleSheaf {
    site: Arc<Site>,
    domain: BTreeSet<ConeId>,
    carrier: BTreeMap<ConeId, usize>,
    monodromy: BTreeMap<ConeId, Vec<Perm>>,
    frobenius: BTreeMap<ConeId, Perm>,
    structure: BTreeMap<(ConeId, ConeId), Vec<usize>>,
}

impl ConstructibleSheaf {
    pub fn new(
        site: Arc<Site>,
        domain: BTreeSet<ConeId>,
        carrier: BTreeMap<ConeId, usize>,
        monodromy: BTreeMap<ConeId, Vec<Perm>>,
        frobenius: BTreeMap<ConeId, Perm>,
        structure: BTreeMap<(ConeId, ConeId), Vec<usize>>,
    ) -> Result<ConstructibleSheaf, SheafError> {
        let poset = site.poset();
        let rank = site.rank();
        for &s in &domain {
            if s >= poset.len() {
                return Err(SheafError::UnknownObject(s));
            }
        }
        if !poset.is_convex(&domain) {
            return Err(SheafError::NotConvex);
        }
        for &s in &domain {
            let size = *carrier
                .get(&s)
                .ok_or_else(|| SheafError::Malformed(format!("no carrier at object {s}")))?;
            let perms = monodromy
                .get(&s)
                .ok_or_else(|| SheafError::Malformed(format!("no monodromy at object {s}")))?;
            if perms.len() != rank {
                return Err(SheafError::Malformed(format!(
                    "object {s} needs {rank} generator permutations, got {}",
                    perms.len()
                )));
            }
            if perms.iter().any(|p| p.len() != size) {
                return Err(SheafError::Malformed(format!(
                    "permutation length mismatch at object {s}"
                )));
            }
            match (site.is_tame(), frobenius.get(&s)) {
                (true, Some(f)) if f.len() == size => {}
                (true, _) => {
                    return Err(SheafError::Malformed(format!(
                        "finite-level sheaf needs a Frobenius permutation of length {size} at {s}"
                    )))
                }
                (false, Some(_)) => {
                    return Err(SheafError::Malformed(
                        "Frobenius data on an infinite-level sheaf".into(),
                    ))
                }
                (false, None) => {}
            }
        }
        if carrier.len() != domain.len()
            || monodromy.len() != domain.len()
            || (site.is_tame() && frobenius.len() != domain.len())
        {
            return Err(SheafError::Malformed("data outside the domain".into()));
        }
        let covers = poset.covers_within(&domain);
        for &(s, t) in &covers {
            let map = structure.get(&(s, t)).ok_or_else(|| {
                SheafError::Malformed(format!("no structure map on covering pair {s} -> {t}"))
            })?;
            if map.len() != carrier[&s] || map.iter().any(|&x| x >= carrier[&t]) {
                return Err(SheafError::Malformed(format!(
                    "structure map {s} -> {t} is not a function between the carriers"
                )));
            }
        }
        if structure.len() != covers.len() {
            return Err(SheafError::Malformed("structure map outside covering pairs".into()));
        }
        Ok(ConstructibleSheaf { site, domain, carrier, monodromy, frobenius, structure })
    }

    pub fn site(&self) -> &Arc<Site> {
        &self.site
    }

    pub fn domain(&self) -> &BTreeSet<ConeId> {
        &self.domain
    }

    pub fn carrier(&self, s: ConeId) -> usize {
        self.carrier[&s]
    }

    pub fn carriers(&self) -> &BTreeMap<ConeId, usize> {
        &self.carrier
    }

    pub fn monodromy(&self, s: ConeId) -> &[Perm] {
        &self.monodromy[&s]
    }

    pub fn frobenius(&self, s: ConeId) -> Option<&Perm> {
        self.frobenius.get(&s)
    }

    pub fn structure_map(&self, s: ConeId, t: ConeId) -> Option<&[usize]> {
        self.structure.get(&(s, t)).map(Vec::as_slice)
    }

    /// Action of an ambient lattice vector on the carrier at `s`.
    pub fn act_ambient(&self, s: ConeId, exps: &[BigInt]) -> Perm {
        let perms = &self.monodromy[&s];
        if perms.is_empty() {
            return Perm::identity(self.carrier(s));
        }
        word(perms, exps)
    }

    /// Action of a hom-group element (canonical free coordinates) at `s`.
    pub fn act_class(&self, s: ConeId, coords: &[BigInt]) -> Perm {
        let ambient = self.site.category().lift(s, coords);
        self.act_ambient(s, &ambient)
    }

    /// Composite of structure maps along a maximal chain from `s` to `t`;
    /// well-defined once the sheaf validates.
    pub fn chain_map(&self, s: ConeId, t: ConeId) -> Result<Vec<usize>, SheafError> {
        if !self.domain.contains(&s) {
            return Err(SheafError::UnknownObject(s));
        }
        if !self.domain.contains(&t) {
            return Err(SheafError::UnknownObject(t));
        }
        let poset = self.site.poset();
        if !poset.leq(s, t) {
            return Err(SheafError::Malformed(format!("{s} is not below {t}")));
        }
        let mut map: Vec<usize> = (0..self.carrier(s)).collect();
        let mut cur = s;
        while cur != t {
            let next = poset
                .covers()
                .iter()
                .find(|&&(a, b)| a == cur && poset.leq(b, t))
                .map(|&(_, b)| b)
                .expect("convex domains contain full intervals");
            let step = &self.structure[&(cur, next)];
            map = map.iter().map(|&x| step[x]).collect();
            cur = next;
        }
        Ok(map)
    }
}

/// A local system on a single stratum: a finite set with commuting
/// permutations for the canonical generators of the orbit's hom group, plus a
/// Frobenius permutation at finite level.
#[derive(Clone, PartialEq, Debug)]
pub struct StratumLocalSystem {
    pub site: Arc<Site>,
    pub object: ConeId,
    pub size: usize,
    pub generators: Vec<Perm>,
    pub frobenius: Option<Perm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SheafViolation {
    GeneratorsDoNotCommute { object: ConeId, a: usize, b: usize },
    ActionDoesNotFactor { object: ConeId },
    GeneratorOrderExceedsLevel { object: ConeId, generator: usize },
    FrobeniusTwistBroken { object: ConeId, generator: usize },
    FrobeniusOrderBroken { object: ConeId },
    NotEquivariant { from: ConeId, to: ConeId, generator: usize },
    FrobeniusNotIntertwined { from: ConeId, to: ConeId },
    DiamondDoesNotCommute { from: ConeId, via_a: ConeId, via_b: ConeId, to: ConeId },
}

impl std::fmt::Display for SheafViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SheafViolation::GeneratorsDoNotCommute { object, a, b } => {
                write!(f, "generators {a} and {b} do not commute at object {object}")
            }
            SheafViolation::ActionDoesNotFactor { object } => {
                write!(f, "action does not kill the span sublattice at object {object}")
            }
            SheafViolation::GeneratorOrderExceedsLevel { object, generator } => write!(
                f,
                "generator {generator} at object {object} has order not dividing the level"
            ),
            SheafViolation::FrobeniusTwistBroken { object, generator } => write!(
                f,
                "Frobenius conjugation of generator {generator} at object {object} is not the q-twist"
            ),
            SheafViolation::FrobeniusOrderBroken { object } => {
                write!(f, "Frobenius order does not divide the Galois order at object {object}")
            }
            SheafViolation::NotEquivariant { from, to, generator } => write!(
                f,
                "structure map {from} -> {to} does not intertwine generator {generator}"
            ),
            SheafViolation::FrobeniusNotIntertwined { from, to } => {
                write!(f, "structure map {from} -> {to} does not intertwine Frobenius")
            }
            SheafViolation::DiamondDoesNotCommute { from, via_a, via_b, to } => write!(
                f,
                "diamond {from} -> {{{via_a}, {via_b}}} -> {to} does not commute"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafReport {
    pub violations: Vec<SheafViolation>,
}

impl SheafReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn compose_maps(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&x| outer[x]).collect()
}

/// Checks the functor axioms: actions factor through the hom groups (with
/// level and Frobenius constraints at finite level), structure maps are
/// equivariant, and all diamonds commute. Violations are reported in object
/// order; the report never aborts.
pub fn validate_sheaf(sheaf: &ConstructibleSheaf) -> SheafReport {
    let mut violations = Vec::new();
    let site = sheaf.site();
    let cat = site.category();
    let poset = site.poset();

    for &s in sheaf.domain() {
        let perms = sheaf.monodromy(s);
        for a in 0..perms.len() {
            for b in (a + 1)..perms.len() {
                if !perms[a].commutes_with(&perms[b]) {
                    violations.push(SheafViolation::GeneratorsDoNotCommute { object: s, a, b });
                }
            }
        }
        let span = span_sublattice(cat.fan().cone(s).expect("object in fan"));
        for row in span.row_vecs() {
            if !sheaf.act_ambient(s, &row).is_identity() {
                violations.push(SheafViolation::ActionDoesNotFactor { object: s });
                break;
            }
        }
        if let Some(gal) = site.galois() {
            let n = gal.level;
            let q = gal.char_exponent as i64;
            for (i, p) in perms.iter().enumerate() {
                if n % p.order() != 0 {
                    violations
                        .push(SheafViolation::GeneratorOrderExceedsLevel { object: s, generator: i });
                }
            }
            let frob = sheaf.frobenius(s).expect("finite-level sheaf has Frobenius");
            for (i, p) in perms.iter().enumerate() {
                let conj = frob.compose(p).compose(&frob.inverse());
                if conj != p.pow(q) {
                    violations
                        .push(SheafViolation::FrobeniusTwistBroken { object: s, generator: i });
                }
            }
            if !frob.pow(gal.galois_order as i64).is_identity() {
                violations.push(SheafViolation::FrobeniusOrderBroken { object: s });
            }
        }
    }

    for (s, t) in poset.covers_within(sheaf.domain()) {
        let map = sheaf.structure_map(s, t).expect("well-formed sheaf");
        for i in 0..site.rank() {
            let lhs = compose_maps(map, sheaf.monodromy(s)[i].images());
            let rhs = compose_maps(sheaf.monodromy(t)[i].images(), map);
            if lhs != rhs {
                violations.push(SheafViolation::NotEquivariant { from: s, to: t, generator: i });
            }
        }
        if site.is_tame() {
            let fs = sheaf.frobenius(s).unwrap();
            let ft = sheaf.frobenius(t).unwrap();
            if compose_maps(map, fs.images()) != compose_maps(ft.images(), map) {
                violations.push(SheafViolation::FrobeniusNotIntertwined { from: s, to: t });
            }
        }
    }

    // every pair of two-step paths through an interval must agree
    let domain: Vec<ConeId> = sheaf.domain().iter().copied().collect();
    for &r in &domain {
        for &t in &domain {
            if r == t || !poset.leq(r, t) {
                continue;
            }
            let mids: Vec<ConeId> = domain
                .iter()
                .copied()
                .filter(|&m| {
                    poset.covers().contains(&(r, m)) && poset.covers().contains(&(m, t))
                })
                .collect();
            for i in 0..mids.len() {
                for j in (i + 1)..mids.len() {
                    let via_a = compose_maps(
                        sheaf.structure_map(mids[i], t).unwrap(),
                        sheaf.structure_map(r, mids[i]).unwrap(),
                    );
                    let via_b = compose_maps(
                        sheaf.structure_map(mids[j], t).unwrap(),
                        sheaf.structure_map(r, mids[j]).unwrap(),
                    );
                    if via_a != via_b {
                        violations.push(SheafViolation::DiamondDoesNotCommute {
                            from: r,
                            via_a: mids[i],
                            via_b: mids[j],
                            to: t,
                        });
                    }
                }
            }
        }
    }

    SheafReport { violations }
}

pub fn validate_local_system(ls: &StratumLocalSystem) -> SheafReport {
    let mut violations = Vec::new();
    let expected = ls.site.category().group_rank(ls.object);
    assert_eq!(ls.generators.len(), expected, "one permutation per hom-group generator");
    for a in 0..ls.generators.len() {
        for b in (a + 1)..ls.generators.len() {
            if !ls.generators[a].commutes_with(&ls.generators[b]) {
                violations.push(SheafViolation::GeneratorsDoNotCommute {
                    object: ls.object,
                    a,
                    b,
                });
            }
        }
    }
    if let Some(gal) = ls.site.galois() {
        let frob = ls.frobenius.as_ref().expect("finite-level local system has Frobenius");
        for (i, p) in ls.generators.iter().enumerate() {
            if gal.level % p.order() != 0 {
                violations.push(SheafViolation::GeneratorOrderExceedsLevel {
                    object: ls.object,
                    generator: i,
                });
            }
            let conj = frob.compose(p).compose(&frob.inverse());
            if conj != p.pow(gal.char_exponent as i64) {
                violations.push(SheafViolation::FrobeniusTwistBroken {
                    object: ls.object,
                    generator: i,
                });
            }
        }
        if !frob.pow(gal.galois_order as i64).is_identity() {
            violations.push(SheafViolation::FrobeniusOrderBroken { object: ls.object });
        }
    }
    SheafReport { violations }
}

/// Evaluates the functor on an infinite-level morphism, as an index map from
/// the source carrier to the target carrier.
pub fn evaluate(sheaf: &ConstructibleSheaf, g: &Morphism) -> Result<Vec<usize>, SheafError> {
    if sheaf.site().is_tame() {
        return Err(SheafError::LevelMismatch(
            "infinite-level morphism applied to a finite-level sheaf".into(),
        ));
    }
    if g.element.len() != sheaf.site().category().group_rank(g.source) {
        return Err(SheafError::Malformed("morphism element has the wrong rank".into()));
    }
    let act = sheaf.act_class(g.source, &g.element);
    let chain = sheaf.chain_map(g.source, g.target)?;
    Ok((0..sheaf.carrier(g.source)).map(|x| chain[act.apply(x)]).collect())
}

/// Finite-level analogue of [`evaluate`]: Frobenius applies first, then the
/// torus part, then the structure chain.
pub fn evaluate_finite(
    sheaf: &ConstructibleSheaf,
    g: &FiniteMorphism,
) -> Result<Vec<usize>, SheafError> {
    let Some(gal) = sheaf.site().galois().copied() else {
        return Err(SheafError::LevelMismatch(
            "finite-level morphism applied to an infinite-level sheaf".into(),
        ));
    };
    let coords: Vec<BigInt> = g.torus.iter().map(|&x| BigInt::from(x)).collect();
    if coords.len() != sheaf.site().category().group_rank(g.source) {
        return Err(SheafError::Malformed("morphism element has the wrong rank".into()));
    }
    let act = sheaf.act_class(g.source, &coords);
    let frob = sheaf
        .frobenius(g.source)
        .expect("finite-level sheaf has Frobenius")
        .pow(g.frob.min(gal.galois_order) as i64);
    let chain = sheaf.chain_map(g.source, g.target)?;
    Ok((0..sheaf.carrier(g.source))
        .map(|x| chain[act.apply(frob.apply(x))])
        .collect())
}

/// The constant sheaf with the given stalk size: identity structure maps and
/// trivial monodromy.
pub fn constant_sheaf(
    site: Arc<Site>,
    domain: BTreeSet<ConeId>,
    size: usize,
) -> ConstructibleSheaf {
    let rank = site.rank();
    let mut carrier = BTreeMap::new();
    let mut monodromy = BTreeMap::new();
    let mut frobenius = BTreeMap::new();
    for &s in &domain {
        carrier.insert(s, size);
        monodromy.insert(s, vec![Perm::identity(size); rank]);
        if site.is_tame() {
            frobenius.insert(s, Perm::identity(size));
        }
    }
    let mut structure = BTreeMap::new();
    for (s, t) in site.poset().covers_within(&domain) {
        structure.insert((s, t), (0..size).collect());
    }
    ConstructibleSheaf::new(site, domain, carrier, monodromy, frobenius, structure)
        .expect("constant sheaves are well-formed")
}

/// The stalk at `s` with its residual hom-group action, as a local system.
pub fn stalk_local_system(sheaf: &ConstructibleSheaf, s: ConeId) -> Result<StratumLocalSystem, SheafError> {
    if !sheaf.domain().contains(&s) {
        return Err(SheafError::UnknownObject(s));
    }
    let cat = sheaf.site().category();
    let generators = (0..cat.group_rank(s))
        .map(|j| {
            let mut e = vec![BigInt::from(0); cat.group_rank(s)];
            e[j] = BigInt::from(1);
            sheaf.act_class(s, &e)
        })
        .collect();
    Ok(StratumLocalSystem {
        site: sheaf.site().clone(),
        object: s,
        size: sheaf.carrier(s),
        generators,
        frobenius: sheaf.frobenius(s).cloned(),
    })
}

/// A local system as a one-object sheaf on `{s}`.
pub fn local_system_sheaf(ls: &StratumLocalSystem) -> ConstructibleSheaf {
    let site = ls.site.clone();
    let cat = site.category();
    let s = ls.object;
    let rank = site.rank();
    let mut monodromy = BTreeMap::new();
    let perms: Vec<Perm> = (0..rank)
        .map(|i| {
            let mut e = vec![BigInt::from(0); rank];
            e[i] = BigInt::from(1);
            let class = cat.ambient_class(s, &e);
            if ls.generators.is_empty() {
                Perm::identity(ls.size)
            } else {
                word(&ls.generators, &class)
            }
        })
        .collect();
    monodromy.insert(s, perms);
    let mut frobenius = BTreeMap::new();
    if let Some(f) = &ls.frobenius {
        frobenius.insert(s, f.clone());
    }
    ConstructibleSheaf::new(
        site,
        [s].into_iter().collect(),
        [(s, ls.size)].into_iter().collect(),
        monodromy,
        frobenius,
        BTreeMap::new(),
    )
    .expect("one-object sheaves are well-formed")
}
