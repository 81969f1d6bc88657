//! Shared fixtures for the integration suites.
#![allow(dead_code)] // each test target uses a different subset

use exodromy::fan::{ConeId, Fan};
use exodromy::fundcat::{build_fundamental_category, finite_level, GaloisDatum};
use exodromy::perm::Perm;
use exodromy::sheafcalc::{Site, StratumLocalSystem};
use std::sync::Arc;

pub fn complex_site(fan: &Fan) -> Arc<Site> {
    Arc::new(Site::Complex(build_fundamental_category(fan).unwrap()))
}

pub fn tame_site(fan: &Fan, level: u64, frob: u64) -> Arc<Site> {
    let cat = build_fundamental_category(fan).unwrap();
    let flc = finite_level(&cat, GaloisDatum::new(level, frob, 0).unwrap()).unwrap();
    Arc::new(Site::Tame(flc))
}

/// First object whose orbit has the given dimension.
pub fn object_of_dim(site: &Site, dim: usize) -> ConeId {
    site.poset()
        .objects()
        .find(|&s| site.poset().orbit_dim(s) == dim)
        .expect("an orbit of the requested dimension")
}

/// Rank-one local system `{0,1}` whose generator swaps the two points.
pub fn swap_system(site: &Arc<Site>, object: ConeId) -> StratumLocalSystem {
    assert_eq!(site.category().group_rank(object), 1);
    StratumLocalSystem {
        site: site.clone(),
        object,
        size: 2,
        generators: vec![Perm::transposition(2, 0, 1)],
        frobenius: site.galois().map(|_| Perm::identity(2)),
    }
}

/// Trivial local system of the given size.
pub fn trivial_system(site: &Arc<Site>, object: ConeId, size: usize) -> StratumLocalSystem {
    let rank = site.category().group_rank(object);
    StratumLocalSystem {
        site: site.clone(),
        object,
        size,
        generators: vec![Perm::identity(size); rank],
        frobenius: site.galois().map(|_| Perm::identity(size)),
    }
}
