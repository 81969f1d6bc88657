//! Built-in oracle suites: desk-sized versions of the library's property
//! checks, deterministic for a fixed seed.

use exodromy::fan::ConeId;
use exodromy::fans;
use exodromy::fundcat::{
    build_fundamental_category, compose, finite_level, FiniteMorphism, GaloisDatum,
};
use exodromy::intlat::{self, IntMatrix};
use exodromy::sheafcalc::{
    decompose, enumerate_sheaves, extend_by_empty, glue, hom_set, is_local_iso, kan_families,
    projection_pullback, projection_pushforward, random, restrict_open, stalk_local_system,
    validate_sheaf, Family, Site,
};
use exodromy::tame::{descent_cross_check, enumerate_connected_covers};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

type SuiteResult = Result<String, String>;
type Suite = fn(&mut ChaCha8Rng) -> SuiteResult;

fn lattice_suite(rng: &mut ChaCha8Rng) -> SuiteResult {
    for _ in 0..50 {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=5);
        let data: Vec<BigInt> =
            (0..m * n).map(|_| BigInt::from(rng.gen_range(-20..=20i64))).collect();
        let a = IntMatrix::new(m, n, data);
        let d = intlat::snf(&a);
        if d.u.mul(&a).mul(&d.v) != d.s {
            return Err("U*A*V != S".into());
        }
        if intlat::det(&d.u).abs() != BigInt::one() || intlat::det(&d.v).abs() != BigInt::one() {
            return Err("transforms are not unimodular".into());
        }
        let sat = intlat::saturate(&a);
        if intlat::saturate(&sat) != sat {
            return Err("saturation is not idempotent".into());
        }
    }
    for (name, fan) in fans::standard_suite() {
        for c in fan.cones() {
            let q = intlat::quotient_presentation(fan.rank(), &exodromy::fan::span_sublattice(c));
            if !q.torsion.is_empty() {
                return Err(format!("{name}: torsion in an orbit hom group"));
            }
        }
    }
    Ok("50 matrices, 48 cones".into())
}

fn category_suite(rng: &mut ChaCha8Rng) -> SuiteResult {
    for fan in [fans::affine(2), fans::projective(2), fans::hirzebruch(1)] {
        let cat = build_fundamental_category(&fan).map_err(|e| e.to_string())?;
        let p = cat.poset();
        let objs: Vec<ConeId> = p.objects().collect();
        for _ in 0..100 {
            let q0 = objs[rng.gen_range(0..objs.len())];
            let pick = |s: ConeId, rng: &mut ChaCha8Rng| {
                let ups: Vec<ConeId> = p.up_set(s).into_iter().collect();
                ups[rng.gen_range(0..ups.len())]
            };
            let r = pick(q0, rng);
            let s = pick(r, rng);
            let t = pick(s, rng);
            let elt = |rank: usize, rng: &mut ChaCha8Rng| -> Vec<BigInt> {
                (0..rank).map(|_| BigInt::from(rng.gen_range(-9..=9i64))).collect()
            };
            let g = cat.morphism(s, t, elt(cat.group_rank(s), rng)).unwrap();
            let h = cat.morphism(r, s, elt(cat.group_rank(r), rng)).unwrap();
            let k = cat.morphism(q0, r, elt(cat.group_rank(q0), rng)).unwrap();
            let left = compose(&cat, &compose(&cat, &g, &h).unwrap(), &k).unwrap();
            let right = compose(&cat, &g, &compose(&cat, &h, &k).unwrap()).unwrap();
            if left != right {
                return Err("associativity failed".into());
            }
        }
    }
    let cat = build_fundamental_category(&fans::affine(2)).map_err(|e| e.to_string())?;
    let top = cat.poset().top();
    for (n, q) in [(5u64, 2u64), (7, 3), (4, 3)] {
        let flc = finite_level(&cat, GaloisDatum::new(n, q, 0).unwrap()).unwrap();
        let frob = flc.frobenius(top, top).unwrap();
        let frob_inv = flc.inverse(&frob);
        for _ in 0..25 {
            let v = FiniteMorphism {
                source: top,
                target: top,
                torus: vec![rng.gen_range(0..n), rng.gen_range(0..n)],
                frob: 0,
            };
            let conj = flc.compose(&flc.compose(&frob, &v).unwrap(), &frob_inv).unwrap();
            if conj.torus != v.torus.iter().map(|&x| (x * q) % n).collect::<Vec<_>>() {
                return Err(format!("semidirect twist failed at (n, q) = ({n}, {q})"));
            }
        }
    }
    Ok("300 triples, 75 twists".into())
}

fn recollement_suite(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut count = 0;
    for fan in [fans::affine(1), fans::affine(2), fans::projective(1), fans::projective(2)] {
        let cat = build_fundamental_category(&fan).map_err(|e| e.to_string())?;
        let site = Arc::new(Site::Complex(cat));
        let all = site.poset().all_objects();
        for _ in 0..20 {
            let f = random::random_sheaf(&site, &all, 4, rng);
            if !validate_sheaf(&f).is_valid() {
                return Err("random sheaf failed validation".into());
            }
            let z = site.poset().minimal_in(&all)[0];
            let d = decompose(&f, z).map_err(|e| e.to_string())?;
            let reglued = glue(&d.open_part, &d.closed_part, &d.theta).map_err(|e| e.to_string())?;
            if reglued != f {
                return Err("glue after decompose is not the identity".into());
            }
            count += 1;
        }
    }
    Ok(format!("{count} round trips"))
}

fn adjunction_suite(_rng: &mut ChaCha8Rng) -> SuiteResult {
    let fan = fans::affine(1);
    let cat = build_fundamental_category(&fan).map_err(|e| e.to_string())?;
    let site = Arc::new(Site::Complex(cat));
    let poset = site.poset();
    let top = poset.top();
    let t_set: BTreeSet<ConeId> = [top].into_iter().collect();
    let fs = exodromy::sheafcalc::enumerate_sheaves_on(&site, &t_set, 2, 1_000_000)
        .map_err(|e| e.to_string())?;
    let gs = enumerate_sheaves(&site, 2, 1_000_000).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for f in &fs {
        let extended = extend_by_empty(f).map_err(|e| e.to_string())?;
        for g in &gs {
            let lhs = hom_set(&extended, g).map_err(|e| e.to_string())?;
            let rhs = hom_set(f, &restrict_open(g, &t_set).unwrap()).map_err(|e| e.to_string())?;
            if lhs.len() != rhs.len() {
                return Err("open adjunction counts differ".into());
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} sheaf pairs"))
}

fn retraction_suite(rng: &mut ChaCha8Rng) -> SuiteResult {
    let fan = fans::affine(2);
    let cat = build_fundamental_category(&fan).map_err(|e| e.to_string())?;
    let site = Arc::new(Site::Complex(cat));
    let poset = site.poset().clone();
    let mut checks = 0;
    for s in poset.objects() {
        let star = poset.up_set(s);
        for _ in 0..20 {
            let f = random::random_sheaf(&site, &star, 4, rng);
            let pushed = projection_pushforward(&f).map_err(|e| e.to_string())?;
            let stalk = stalk_local_system(&f, s).map_err(|e| e.to_string())?;
            let fams = kan_families(&f, &star, s);
            let index: BTreeMap<Family, usize> =
                fams.iter().cloned().enumerate().map(|(i, fam)| (fam, i)).collect();
            let canonical: Vec<usize> = (0..f.carrier(s))
                .map(|x| {
                    let fam: Family =
                        star.iter().map(|&t| (t, f.chain_map(s, t).unwrap()[x])).collect();
                    index[&fam]
                })
                .collect();
            if !is_local_iso(&stalk, &pushed, &canonical) {
                return Err("retraction pushforward differs from the closed stalk".into());
            }
            checks += 1;
        }
        for _ in 0..20 {
            let l = random::random_stratum_local_system(&site, s, 4, rng);
            let back = projection_pushforward(&projection_pullback(&l)).map_err(|e| e.to_string())?;
            if back.size != l.size {
                return Err("unit of the retraction adjunction is not bijective".into());
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} checks"))
}

fn descent_suite(_rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut checks = 0;
    for (rank, chart) in [(1usize, fans::affine(1)), (2, fans::affine(2))] {
        for phi in enumerate_connected_covers(rank, 3) {
            let exponent = phi.target.exponent().to_u64().unwrap();
            for stratum in 0..chart.len() {
                for galois in [None, Some(GaloisDatum::trivial(exponent.max(1)))] {
                    let v = descent_cross_check(&phi, &chart, stratum, galois)
                        .map_err(|e| e.to_string())?;
                    if !v.agree {
                        return Err(format!("descent disagreement at stratum {stratum}"));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} cross-checks"))
}

fn yoneda_suite(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut checks = 0;
    for fan in [fans::affine(1), fans::projective(1), fans::projective(2)] {
        for level in [2u64, 3] {
            let cat = build_fundamental_category(&fan).map_err(|e| e.to_string())?;
            let flc = finite_level(&cat, GaloisDatum::trivial(level)).unwrap();
            let site = Arc::new(Site::Tame(flc));
            let all = site.poset().all_objects();
            for _ in 0..5 {
                let f = random::random_sheaf(&site, &all, 3, rng);
                for s in site.poset().objects() {
                    let v = exodromy::sheafcalc::yoneda_check(&site, s, &f)
                        .map_err(|e| e.to_string())?;
                    if !v.holds {
                        return Err(format!("Yoneda bijection failed at object {s}"));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} checks"))
}

fn classification_suite(_rng: &mut ChaCha8Rng) -> SuiteResult {
    let upset_count = |fan: &exodromy::fan::Fan| -> usize {
        let poset = exodromy::fan::orbit_poset(fan).unwrap();
        (0u32..(1 << poset.len()))
            .filter(|mask| {
                let set: BTreeSet<ConeId> =
                    poset.objects().filter(|&s| mask & (1 << s) != 0).collect();
                poset.is_upward_closed(&set)
            })
            .count()
    };
    for fan in [fans::affine(1), fans::projective(1)] {
        let cat = build_fundamental_category(&fan).map_err(|e| e.to_string())?;
        let site = Arc::new(Site::Complex(cat));
        let reps = enumerate_sheaves(&site, 1, 1_000_000).map_err(|e| e.to_string())?;
        if reps.len() != upset_count(&fan) {
            return Err(format!(
                "stalk-1 classes ({}) differ from the upset oracle ({})",
                reps.len(),
                upset_count(&fan)
            ));
        }
    }
    Ok("A1 = 3, P1 = 5".into())
}

pub fn run_all(seed: u64) -> bool {
    let suites: Vec<(&str, Suite)> = vec![
        ("lattice-kernel", lattice_suite),
        ("category-laws", category_suite),
        ("recollement", recollement_suite),
        ("adjunctions", adjunction_suite),
        ("retraction", retraction_suite),
        ("descent-dichotomy", descent_suite),
        ("finite-level-yoneda", yoneda_suite),
        ("classification", classification_suite),
    ];
    let mut all_ok = true;
    for (name, suite) in suites {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match suite(&mut rng) {
            Ok(detail) => println!("suite {name}: PASS ({detail})"),
            Err(msg) => {
                println!("suite {name}: FAIL ({msg})");
                all_ok = false;
            }
        }
    }
    all_ok
}
