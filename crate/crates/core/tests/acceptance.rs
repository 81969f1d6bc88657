//! Acceptance suite: one test per criterion, each printing a pass line with
//! its sample size and elapsed time. Run with
//! `cargo test -p exodromy --test acceptance -- --nocapture` to see the lines.

mod common;

use common::*;
use exodromy::fan::{Cone, ConeId};
use exodromy::fans;
use exodromy::fundcat::{
    build_fundamental_category, compose, finite_level, FiniteMorphism, GaloisDatum,
};
use exodromy::intlat::{self, IntMatrix};
use exodromy::sheafcalc::*;
use exodromy::tame::{descent_cross_check, enumerate_connected_covers};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

fn bi(x: i64) -> BigInt {
    BigInt::from(x)
}

fn report(num: u32, name: &str, detail: String, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!("criterion {num:02} {name}: PASS ({detail}, {elapsed:.2?})");
    assert!(elapsed < budget, "criterion {num} exceeded its {budget:?} budget: {elapsed:?}");
}

/// Criterion 1: hom-group ranks equal orbit dimensions on every test fan.
#[test]
fn c01_rank_theorem() {
    let start = Instant::now();
    let mut objects = 0;
    for (name, fan) in fans::standard_suite() {
        let cat = build_fundamental_category(&fan).unwrap();
        for s in cat.poset().objects() {
            let dim_cone = fan.cone_dim(s);
            assert_eq!(
                cat.group_rank(s),
                fan.rank() - dim_cone,
                "{name}: rank of hom group at object {s}"
            );
            assert_eq!(cat.group_rank(s), cat.poset().orbit_dim(s));
            objects += 1;
        }
    }
    report(1, "rank-theorem", format!("{objects} objects"), start, Duration::from_secs(1));
}

/// Criterion 2: associativity, unit laws, and the finite-level semidirect
/// relation.
#[test]
fn c02_category_laws() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut triples = 0;
    for (name, fan) in fans::standard_suite() {
        let cat = build_fundamental_category(&fan).unwrap();
        let p = cat.poset();
        let objs: Vec<ConeId> = p.objects().collect();
        let rand_elt = |rank: usize, rng: &mut ChaCha8Rng| -> Vec<BigInt> {
            (0..rank).map(|_| bi(rng.gen_range(-9..=9))).collect()
        };
        for _ in 0..500 {
            let q0 = objs[rng.gen_range(0..objs.len())];
            let pick_up = |s: ConeId, rng: &mut ChaCha8Rng| -> ConeId {
                let ups: Vec<ConeId> = p.up_set(s).into_iter().collect();
                ups[rng.gen_range(0..ups.len())]
            };
            let r = pick_up(q0, &mut rng);
            let s = pick_up(r, &mut rng);
            let t = pick_up(s, &mut rng);
            let g = cat.morphism(s, t, rand_elt(cat.group_rank(s), &mut rng)).unwrap();
            let h = cat.morphism(r, s, rand_elt(cat.group_rank(r), &mut rng)).unwrap();
            let k = cat.morphism(q0, r, rand_elt(cat.group_rank(q0), &mut rng)).unwrap();
            let left = compose(&cat, &compose(&cat, &g, &h).unwrap(), &k).unwrap();
            let right = compose(&cat, &g, &compose(&cat, &h, &k).unwrap()).unwrap();
            assert_eq!(left, right, "{name}: associativity");
            triples += 1;
        }
        for s in p.objects() {
            for t in p.objects().filter(|&t| p.leq(s, t)) {
                let g = cat.morphism(s, t, rand_elt(cat.group_rank(s), &mut rng)).unwrap();
                let id_s = cat.zero_morphism(s, s).unwrap();
                let id_t = cat.zero_morphism(t, t).unwrap();
                assert_eq!(compose(&cat, &g, &id_s).unwrap(), g, "{name}: right unit");
                assert_eq!(compose(&cat, &id_t, &g).unwrap(), g, "{name}: left unit");
            }
        }
    }

    let mut twists = 0;
    let a2 = fans::affine(2);
    let cat = build_fundamental_category(&a2).unwrap();
    let top = cat.poset().top();
    for (n, q) in [(5u64, 2u64), (7, 3), (4, 3)] {
        let flc = finite_level(&cat, GaloisDatum::new(n, q, 0).unwrap()).unwrap();
        let frob = flc.frobenius(top, top).unwrap();
        let frob_inv = flc.inverse(&frob);
        for _ in 0..100 {
            let v = FiniteMorphism {
                source: top,
                target: top,
                torus: vec![rng.gen_range(0..n), rng.gen_range(0..n)],
                frob: 0,
            };
            let conj = flc.compose(&flc.compose(&frob, &v).unwrap(), &frob_inv).unwrap();
            let twisted = FiniteMorphism {
                source: top,
                target: top,
                torus: v.torus.iter().map(|&x| (x * q) % n).collect(),
                frob: 0,
            };
            assert_eq!(conj, twisted, "(n, q) = ({n}, {q})");
            twists += 1;
        }
    }
    report(
        2,
        "category-laws",
        format!("{triples} triples, {twists} twists"),
        start,
        Duration::from_secs(5),
    );
}

/// Criterion 3: recollement round trips on random sheaves.
#[test]
fn c03_recollement_round_trip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut count = 0;
    for (name, fan) in fans::standard_suite() {
        let site = complex_site(&fan);
        let all = site.poset().all_objects();
        for _ in 0..100 {
            let f = random::random_sheaf(&site, &all, 4, &mut rng);
            let z = site.poset().minimal_in(&all)[0];
            let d = decompose(&f, z).unwrap();
            let reglued = glue(&d.open_part, &d.closed_part, &d.theta).unwrap();
            assert_eq!(reglued, f, "{name}: glue after decompose");
            let d2 = decompose(&reglued, z).unwrap();
            assert_eq!(d2, d, "{name}: decompose after glue");
            count += 1;
        }
    }
    report(3, "recollement-round-trip", format!("{count} sheaves"), start, Duration::from_secs(60));
}

fn check_open_adjunction(site: &Arc<Site>, t_set: &BTreeSet<ConeId>, budget: usize) -> usize {
    let fs = enumerate_sheaves_on(site, t_set, 2, budget).unwrap();
    let gs = enumerate_sheaves(site, 2, budget).unwrap();
    let mut pairs = 0;
    for f in &fs {
        let extended = extend_by_empty(f).unwrap();
        for g in &gs {
            let lhs = hom_set(&extended, g).unwrap();
            let restricted_g = restrict_open(g, t_set).unwrap();
            let rhs = hom_set(f, &restricted_g).unwrap();
            assert_eq!(lhs.len(), rhs.len(), "hom counts under the open adjunction");
            // the canonical bijection restricts components to the open part
            let image: BTreeSet<Vec<Vec<usize>>> = lhs
                .iter()
                .map(|a| t_set.iter().map(|s| a.components[s].clone()).collect())
                .collect();
            assert_eq!(image.len(), lhs.len(), "restriction is injective");
            for b in &rhs {
                let key: Vec<Vec<usize>> =
                    t_set.iter().map(|s| b.components[s].clone()).collect();
                assert!(image.contains(&key), "restriction is onto");
            }
            pairs += 1;
        }
    }
    pairs
}

fn check_closed_adjunction(site: &Arc<Site>, d_set: &BTreeSet<ConeId>, budget: usize) -> usize {
    let fs = enumerate_sheaves(site, 2, budget).unwrap();
    let gs = enumerate_sheaves_on(site, d_set, 2, budget).unwrap();
    let mut pairs = 0;
    for f in &fs {
        let restricted_f = restrict_closed(f, d_set).unwrap();
        for g in &gs {
            let pushed = pushforward_closed(g).unwrap();
            let lhs = hom_set(f, &pushed).unwrap();
            let rhs = hom_set(&restricted_f, g).unwrap();
            assert_eq!(lhs.len(), rhs.len(), "hom counts under the closed adjunction");
            let image: BTreeSet<Vec<Vec<usize>>> = lhs
                .iter()
                .map(|a| d_set.iter().map(|s| a.components[s].clone()).collect())
                .collect();
            assert_eq!(image.len(), lhs.len(), "restriction is injective");
            for b in &rhs {
                let key: Vec<Vec<usize>> =
                    d_set.iter().map(|s| b.components[s].clone()).collect();
                assert!(image.contains(&key), "restriction is onto");
            }
            pairs += 1;
        }
    }
    pairs
}

/// Criterion 4: the (j_!, j^*) and (i^*, i_*) adjunctions by exhaustive
/// bijections over all sheaves with stalks at most 2.
#[test]
fn c04_adjunction_bijections() {
    let start = Instant::now();
    let budget = 4_000_000;
    let mut pairs = 0;
    for fan in [fans::affine(1), fans::projective(1)] {
        let site = complex_site(&fan);
        let poset = site.poset();
        let all = poset.all_objects();
        let z = poset.minimal_in(&all)[0];
        let open: BTreeSet<ConeId> = all.iter().copied().filter(|&s| s != z).collect();
        let closed: BTreeSet<ConeId> = [z].into_iter().collect();
        pairs += check_open_adjunction(&site, &open, budget);
        pairs += check_closed_adjunction(&site, &closed, budget);
        // also the star of the open orbit, which differs from `open` on P^1
        let torus: BTreeSet<ConeId> = [poset.top()].into_iter().collect();
        if torus != open {
            pairs += check_open_adjunction(&site, &torus, budget);
        }
    }
    report(4, "adjunction-bijections", format!("{pairs} sheaf pairs"), start, Duration::from_secs(60));
}

/// Criterion 5: the retraction pushforward agrees with the closed stalk, and
/// the unit of the retraction adjunction is an isomorphism.
#[test]
fn c05_retraction_and_unit() {
    let start = Instant::now();
    let fan = fans::affine(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = 0;
    for site in [complex_site(&fan), tame_site(&fan, 4, 3)] {
        let poset = site.poset().clone();
        for s in poset.objects() {
            let star = poset.up_set(s);
            for _ in 0..100 {
                let f = random::random_sheaf(&site, &star, 4, &mut rng);
                let pushed = projection_pushforward(&f).unwrap();
                let stalk = stalk_local_system(&f, s).unwrap();
                let fams = kan_families(&f, &star, s);
                let index: BTreeMap<_, _> =
                    fams.iter().enumerate().map(|(i, fam)| (fam.clone(), i)).collect();
                let canonical: Vec<usize> = (0..f.carrier(s))
                    .map(|x| {
                        let fam: Family = star
                            .iter()
                            .map(|&t| (t, f.chain_map(s, t).unwrap()[x]))
                            .collect();
                        index[&fam]
                    })
                    .collect();
                assert!(
                    is_local_iso(&stalk, &pushed, &canonical),
                    "retraction pushforward must be the closed stalk"
                );
                checks += 1;
            }
            for _ in 0..100 {
                let l = random::random_stratum_local_system(&site, s, 4, &mut rng);
                let pulled = projection_pullback(&l);
                let back = projection_pushforward(&pulled).unwrap();
                // the unit sends a point to its constant family
                let fams = kan_families(&pulled, &star, s);
                let index: BTreeMap<_, _> =
                    fams.iter().enumerate().map(|(i, fam)| (fam.clone(), i)).collect();
                let unit: Vec<usize> = (0..l.size)
                    .map(|x| {
                        let fam: Family = star.iter().map(|&t| (t, x)).collect();
                        index[&fam]
                    })
                    .collect();
                assert!(is_local_iso(&l, &back, &unit), "unit of the retraction adjunction");
                checks += 1;
            }
        }
    }
    report(5, "retraction-and-unit", format!("{checks} checks"), start, Duration::from_secs(30));
}

/// Criterion 6: the retraction pushforward preserves finite coproducts.
#[test]
fn c06_coproduct_preservation() {
    let start = Instant::now();
    let fan = fans::affine(2);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checks = 0;
    for site in [complex_site(&fan), tame_site(&fan, 4, 3)] {
        let poset = site.poset().clone();
        for s in poset.objects() {
            let star = poset.up_set(s);
            for _ in 0..50 {
                let f = random::random_sheaf(&site, &star, 3, &mut rng);
                let g = random::random_sheaf(&site, &star, 3, &mut rng);
                let sum = coproduct(&[f.clone(), g.clone()]).unwrap();
                let pushed_sum = projection_pushforward(&sum).unwrap();
                let sum_pushed = coproduct_local(
                    &projection_pushforward(&f).unwrap(),
                    &projection_pushforward(&g).unwrap(),
                )
                .unwrap();

                // canonical map: a family of F (resp. G) is a family of F ⊔ G
                let fams_f = kan_families(&f, &star, s);
                let fams_g = kan_families(&g, &star, s);
                let fams_sum = kan_families(&sum, &star, s);
                let index: BTreeMap<_, _> =
                    fams_sum.iter().enumerate().map(|(i, fam)| (fam.clone(), i)).collect();
                let mut canonical = Vec::new();
                for fam in &fams_f {
                    let shifted: Family = fam.iter().map(|(&t, &x)| (t, x)).collect();
                    canonical.push(index[&shifted]);
                }
                for fam in &fams_g {
                    let shifted: Family =
                        fam.iter().map(|(&t, &x)| (t, x + f.carrier(t))).collect();
                    canonical.push(index[&shifted]);
                }
                assert!(
                    is_local_iso(&sum_pushed, &pushed_sum, &canonical),
                    "pushforward must preserve coproducts"
                );
                checks += 1;
            }
        }
    }
    report(6, "coproduct-preservation", format!("{checks} pairs"), start, Duration::from_secs(30));
}

/// Criterion 7: the descent dichotomy matches the sheaf-calculus pushforward
/// for every connected Kummer cover of exponent at most 4.
#[test]
fn c07_descent_dichotomy() {
    let start = Instant::now();
    let a2 = fans::affine(2);
    let ray = a2.id_of(&Cone::from_i64(2, &[&[1, 0]])).unwrap();
    let charts: Vec<(usize, exodromy::fan::Fan)> = vec![
        (1, fans::affine(1)),
        (2, fans::affine(2)),
        (2, a2.star_chart(ray).unwrap()),
    ];
    let mut checks = 0;
    for (rank, chart) in &charts {
        let covers = enumerate_connected_covers(*rank, 4);
        let n_objects = chart.len();
        for phi in &covers {
            let exponent = phi.target.exponent().to_u64().unwrap();
            for stratum in 0..n_objects {
                for galois in [None, Some(GaloisDatum::trivial(exponent.max(1) * 3))] {
                    let v = descent_cross_check(phi, chart, stratum, galois).unwrap();
                    assert!(
                        v.agree,
                        "cover with deck {:?} over stratum {stratum}: {v:?}",
                        phi.target.factors()
                    );
                    // the dichotomy itself: vanishing stalk exactly when the
                    // image does not descend
                    assert_eq!(v.descends, v.pushforward_stalk > 0);
                    if v.descends {
                        assert_eq!(BigInt::from(v.pushforward_stalk), phi.target.order());
                    }
                    checks += 1;
                }
            }
        }
    }
    report(7, "descent-dichotomy", format!("{checks} cross-checks"), start, Duration::from_secs(30));
}

/// Criterion 8: the finite-level Yoneda bijection at every object of every
/// test fan, levels 2, 3, 4.
#[test]
fn c08_finite_level_yoneda() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checks = 0;
    for (name, fan) in fans::standard_suite() {
        for level in [2u64, 3, 4] {
            let site = tame_site(&fan, level, 1);
            let all = site.poset().all_objects();
            for _ in 0..20 {
                let f = random::random_sheaf(&site, &all, 3, &mut rng);
                for s in site.poset().objects() {
                    let v = yoneda_check(&site, s, &f).unwrap();
                    assert!(v.holds, "{name}, level {level}, object {s}: {v:?}");
                    checks += 1;
                }
            }
        }
    }
    report(8, "finite-level-yoneda", format!("{checks} checks"), start, Duration::from_secs(60));
}

/// Criterion 9: stalk-1 classification counts match the upward-closed-support
/// oracle.
#[test]
fn c09_classification_oracle() {
    let start = Instant::now();
    // oracle: a stalk-size-1 sheaf is exactly an upward-closed support, and
    // isomorphism classes are supports
    let upset_count = |fan: &exodromy::fan::Fan| -> usize {
        let poset = exodromy::fan::orbit_poset(fan).unwrap();
        let n = poset.len();
        (0u32..(1 << n))
            .filter(|mask| {
                let set: BTreeSet<ConeId> =
                    poset.objects().filter(|&s| mask & (1 << s) != 0).collect();
                poset.is_upward_closed(&set)
            })
            .count()
    };

    let a1 = fans::affine(1);
    let site = complex_site(&a1);
    let reps = enumerate_sheaves(&site, 1, 1_000_000).unwrap();
    assert_eq!(reps.len(), 3);
    assert_eq!(reps.len(), upset_count(&a1));

    let p1 = fans::projective(1);
    let site = complex_site(&p1);
    let reps = enumerate_sheaves(&site, 1, 1_000_000).unwrap();
    assert_eq!(reps.len(), upset_count(&p1));
    report(
        9,
        "classification-oracle",
        format!("A1 = 3, P1 = {}", upset_count(&p1)),
        start,
        Duration::from_secs(10),
    );
}

/// Criterion 10: Smith normal form invariants, saturation idempotence, and
/// torsion-freeness of the orbit hom groups.
#[test]
fn c10_lattice_kernel() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..200 {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=5);
        let data: Vec<BigInt> = (0..m * n).map(|_| bi(rng.gen_range(-20..=20))).collect();
        let a = IntMatrix::new(m, n, data);
        let d = intlat::snf(&a);
        assert_eq!(d.u.mul(&a).mul(&d.v), d.s, "U*A*V = S");
        assert_eq!(intlat::det(&d.u).abs(), BigInt::one());
        assert_eq!(intlat::det(&d.v).abs(), BigInt::one());
        for i in 0..d.invariant_factors.len().saturating_sub(1) {
            if !d.invariant_factors[i].is_zero() {
                assert!((&d.invariant_factors[i + 1] % &d.invariant_factors[i]).is_zero());
            } else {
                assert!(d.invariant_factors[i + 1].is_zero());
            }
        }
    }
    for _ in 0..50 {
        let k = rng.gen_range(0..=4);
        let n = rng.gen_range(1..=4);
        let data: Vec<BigInt> = (0..k * n).map(|_| bi(rng.gen_range(-12..=12))).collect();
        let l = IntMatrix::new(k, n, data);
        let s1 = intlat::saturate(&l);
        assert_eq!(intlat::saturate(&s1), s1, "saturation is idempotent");
    }
    let mut cones = 0;
    for (name, fan) in fans::standard_suite() {
        for c in fan.cones() {
            let q = intlat::quotient_presentation(fan.rank(), &exodromy::fan::span_sublattice(c));
            assert!(q.torsion.is_empty(), "{name}: orbit hom groups are free");
            cones += 1;
        }
    }
    report(
        10,
        "lattice-kernel",
        format!("200 matrices, 50 saturations, {cones} cones"),
        start,
        Duration::from_secs(10),
    );
}
