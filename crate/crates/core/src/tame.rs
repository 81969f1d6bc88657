//! Kummer covers of split tori: surjections from the cocharacter lattice onto
//! finite abelian groups, the corresponding finite-index lattice extensions,
//! component counts over smaller strata, and the descent dichotomy checked
//! against the sheaf calculus.
//!
//! Conventions: for a surjection `φ: Z^r ↠ A` the cover has deck group `A`;
//! its extension lattice is spanned by `M = Z^r` together with `c_i / d_i`
//! where `c_i` is the i-th column of the matrix of `φ` and `d_i` the i-th
//! invariant factor. The Pontryagin dual `A^*` is represented with the same
//! invariant factors through the canonical pairing on coordinates.

use crate::fan::{span_sublattice, ConeId, Fan, FanError};
use crate::fundcat::{build_fundamental_category, finite_level, CategoryError, GaloisDatum};
use crate::intlat::{self, IntMatrix};
use crate::perm::Perm;
use crate::sheafcalc::{
    local_system_sheaf, pushforward_open, stalk_local_system, SheafError, Site,
    StratumLocalSystem,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TameError {
    #[error("matrix does not define a surjection onto the target group")]
    NotSurjective,
    #[error("deck group order {order} is not coprime to the characteristic {p}")]
    NotCoprime { order: BigInt, p: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("deck group exponent {exponent} does not divide the level {level}")]
    LevelTooSmall { exponent: BigInt, level: u64 },
    #[error("invariant factors must be > 1 and form a divisibility chain")]
    BadFactors,
    #[error("fan is not an affine chart (it needs a unique maximal cone)")]
    NotAffineChart,
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

/// Finite abelian group in invariant-factor coordinates `⊕ Z/d_i` with
/// `d_1 | d_2 | ..` and every `d_i > 1`. The empty list is the trivial group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteAbelianGroup {
    factors: Vec<BigInt>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<BigInt>) -> Result<FiniteAbelianGroup, TameError> {
        for (i, d) in factors.iter().enumerate() {
            if *d <= BigInt::one() {
                return Err(TameError::BadFactors);
            }
            if i + 1 < factors.len() && !(&factors[i + 1] % d).is_zero() {
                return Err(TameError::BadFactors);
            }
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn trivial() -> FiniteAbelianGroup {
        FiniteAbelianGroup { factors: Vec::new() }
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn reduce(&self, coords: &[BigInt]) -> Vec<BigInt> {
        coords.iter().zip(&self.factors).map(|(x, d)| x.mod_floor(d)).collect()
    }

    pub fn is_zero(&self, coords: &[BigInt]) -> bool {
        self.reduce(coords).iter().all(Zero::is_zero)
    }

    /// Elements in mixed-radix order (first coordinate most significant).
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        let mut out: Vec<Vec<BigInt>> = vec![Vec::new()];
        for d in &self.factors {
            let d64 = d.to_u64().expect("desk-scale group");
            let mut next = Vec::new();
            for e in &out {
                for x in 0..d64 {
                    let mut e2 = e.clone();
                    e2.push(BigInt::from(x));
                    next.push(e2);
                }
            }
            out = next;
        }
        out
    }

    pub fn index_of(&self, coords: &[BigInt]) -> usize {
        let reduced = self.reduce(coords);
        let mut idx = 0usize;
        for (x, d) in reduced.iter().zip(&self.factors) {
            idx = idx * d.to_usize().unwrap() + x.to_usize().unwrap();
        }
        idx
    }
}

/// A surjection `Z^source_rank ↠ A`, the character data of a connected
/// Kummer cover with deck group `A`.
#[derive(Clone, PartialEq, Debug)]
pub struct CharacterSurjection {
    pub source_rank: usize,
    pub target: FiniteAbelianGroup,
    /// source_rank × (number of factors); row i is the image of `e_i`.
    pub matrix: IntMatrix,
}

impl CharacterSurjection {
    pub fn new(
        source_rank: usize,
        target: FiniteAbelianGroup,
        matrix: IntMatrix,
    ) -> Result<CharacterSurjection, TameError> {
        let k = target.factors.len();
        if matrix.rows() != source_rank || matrix.cols() != k {
            return Err(TameError::DimensionMismatch {
                expected: source_rank * k,
                got: matrix.rows() * matrix.cols(),
            });
        }
        // surjectivity: the rows together with the factor relations generate Z^k
        let stacked = matrix.vstack(&diag(&target.factors));
        let d = intlat::snf(&stacked);
        if d.invariant_factors.iter().take(k).any(|f| *f != BigInt::one()) {
            return Err(TameError::NotSurjective);
        }
        let reduced = IntMatrix::from_rows(
            (0..source_rank).map(|i| target.reduce(matrix.row(i))).collect::<Vec<_>>(),
        );
        let reduced = if source_rank == 0 { IntMatrix::zeros(0, k) } else { reduced };
        Ok(CharacterSurjection { source_rank, target, matrix: reduced })
    }

    pub fn apply(&self, w: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(w.len(), self.source_rank);
        self.target.reduce(&intlat::vec_mat(w, &self.matrix))
    }

    /// Canonical basis of `ker φ`.
    pub fn kernel_lattice(&self) -> IntMatrix {
        let k = self.target.factors.len();
        if k == 0 {
            return IntMatrix::identity(self.source_rank);
        }
        let stacked = self.matrix.vstack(&diag(&self.target.factors));
        let kern = intlat::kernel_basis(&stacked);
        // project away the relation coordinates
        let rows: Vec<Vec<BigInt>> =
            kern.row_vecs().iter().map(|r| r[..self.source_rank].to_vec()).collect();
        if rows.is_empty() {
            IntMatrix::zeros(0, self.source_rank)
        } else {
            intlat::lattice_basis(&IntMatrix::from_rows(rows))
        }
    }
}

fn diag(factors: &[BigInt]) -> IntMatrix {
    let k = factors.len();
    let mut m = IntMatrix::zeros(k, k);
    for (i, d) in factors.iter().enumerate() {
        m[(i, i)] = d.clone();
    }
    m
}

/// A Kummer cover as a lattice extension `M = Z^rank ⊆ E`, stored with a
/// single global denominator: `E = (1/denominator) * rowspan(basis)`.
#[derive(Clone, PartialEq, Debug)]
pub struct KummerCoverSpec {
    pub rank: usize,
    pub basis: IntMatrix,
    pub denominator: BigInt,
    pub deck: FiniteAbelianGroup,
}

impl KummerCoverSpec {
    pub fn index(&self) -> BigInt {
        let mut d_pow = BigInt::one();
        for _ in 0..self.rank {
            d_pow *= &self.denominator;
        }
        d_pow / intlat::det(&self.basis).abs()
    }
}

/// The extension lattice of a surjection: `E = M + Σ Z * (c_i / d_i)`, with
/// `E / M` canonically dual to the deck group. Requires the deck order to be
/// coprime to the declared characteristic (`char_p = 0` imposes nothing).
pub fn extension_from_surjection(
    phi: &CharacterSurjection,
    char_p: u64,
) -> Result<KummerCoverSpec, TameError> {
    let order = phi.target.order();
    if char_p != 0 && !order.gcd(&BigInt::from(char_p)).is_one() {
        return Err(TameError::NotCoprime { order, p: char_p });
    }
    let r = phi.source_rank;
    let denom = phi.target.exponent();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..r {
        let mut e = vec![BigInt::zero(); r];
        e[i] = denom.clone();
        rows.push(e);
    }
    for (j, d) in phi.target.factors.iter().enumerate() {
        let scale = &denom / d;
        rows.push(phi.matrix.col(j).iter().map(|x| x * &scale).collect());
    }
    let basis = intlat::lattice_basis(&IntMatrix::from_rows(rows));
    let spec = KummerCoverSpec {
        rank: r,
        basis,
        denominator: denom,
        deck: phi.target.clone(),
    };
    assert_eq!(spec.index(), spec.deck.order(), "extension index must equal the deck order");
    Ok(spec)
}

/// Solve `x * upper = t` for a full-rank upper-triangular `upper` (HNF
/// basis); `None` when the solution is not integral.
fn solve_upper_triangular(upper: &IntMatrix, t: &[BigInt]) -> Option<Vec<BigInt>> {
    let r = upper.rows();
    let mut x = vec![BigInt::zero(); r];
    for j in 0..r {
        let mut acc = t[j].clone();
        for i in 0..j {
            acc -= &x[i] * &upper[(i, j)];
        }
        let (q, rem) = acc.div_rem(&upper[(j, j)]);
        if !rem.is_zero() {
            return None;
        }
        x[j] = q;
    }
    // columns beyond the diagonal must also match
    for j in 0..upper.cols() {
        let mut acc = BigInt::zero();
        for i in 0..r {
            acc += &x[i] * &upper[(i, j)];
        }
        if acc != t[j] {
            return None;
        }
    }
    Some(x)
}

/// Recovers the character surjection of an extension lattice, in the
/// canonical Smith coordinates of `E / M`. Composing with
/// [`extension_from_surjection`] reproduces the original cover: same kernel,
/// same invariant factors.
pub fn recover_surjection(spec: &KummerCoverSpec) -> CharacterSurjection {
    let r = spec.rank;
    // write the standard basis of M in E-coordinates: c * basis = D * I
    let rows: Vec<Vec<BigInt>> = (0..r)
        .map(|j| {
            let mut t = vec![BigInt::zero(); r];
            t[j] = spec.denominator.clone();
            solve_upper_triangular(&spec.basis, &t).expect("M is contained in E")
        })
        .collect();
    let c = IntMatrix::from_rows(rows);
    let d = intlat::snf(&c);
    let torsion: Vec<(usize, BigInt)> = d
        .invariant_factors
        .iter()
        .cloned()
        .enumerate()
        .filter(|(_, f)| *f > BigInt::one())
        .collect();
    let factors: Vec<BigInt> = torsion.iter().map(|(_, f)| f.clone()).collect();
    // column i of the recovered matrix pairs e_j with the i-th torsion
    // generator y_i of E/M: entry = d_i * <y_i, e_j>
    let mut matrix = IntMatrix::zeros(r, factors.len());
    for (col, (i, f)) in torsion.iter().enumerate() {
        let y_ecoords = d.v_inv.row(*i);
        let y_num = intlat::vec_mat(y_ecoords, &spec.basis); // numerators over D
        for j in 0..r {
            let scaled = f * &y_num[j];
            let (q, rem) = scaled.div_rem(&spec.denominator);
            assert!(rem.is_zero(), "torsion generators have exact order");
            matrix[(j, col)] = q.mod_floor(f);
        }
    }
    let target = FiniteAbelianGroup::new(factors).expect("Smith factors form a chain");
    CharacterSurjection::new(r, target, matrix).expect("recovered pairing is surjective")
}

/// Image data of a sublattice under the character: `descends` when the image
/// is trivial, and the number of cover components over the sublattice's
/// stratum, which is the index `[A : φ(sub)]`.
pub fn cover_components(
    phi: &CharacterSurjection,
    sub: &IntMatrix,
) -> Result<(bool, BigInt), TameError> {
    if sub.cols() != phi.source_rank {
        return Err(TameError::DimensionMismatch { expected: phi.source_rank, got: sub.cols() });
    }
    let descends = (0..sub.rows()).all(|i| phi.target.is_zero(&phi.apply(sub.row(i))));
    let k = phi.target.factors.len();
    if k == 0 {
        return Ok((descends, BigInt::one()));
    }
    let image_rows = IntMatrix::from_rows(
        (0..sub.rows()).map(|i| intlat::vec_mat(sub.row(i), &phi.matrix)).collect::<Vec<_>>(),
    );
    let image_rows = if sub.rows() == 0 { IntMatrix::zeros(0, k) } else { image_rows };
    let stacked = diag(&phi.target.factors).vstack(&image_rows);
    let d = intlat::snf(&stacked);
    let count = d.invariant_factors.iter().take(k).product();
    Ok((descends, count))
}

/// The monodromy local system of a connected Kummer cover on the open orbit
/// of a chart: the deck group acted on by translation through `φ`, with
/// Frobenius acting as multiplication by the cyclotomic exponent.
pub fn deck_local_system(
    phi: &CharacterSurjection,
    site: &Arc<Site>,
) -> Result<StratumLocalSystem, TameError> {
    let cat = site.category();
    if phi.source_rank != cat.rank() {
        return Err(TameError::DimensionMismatch { expected: cat.rank(), got: phi.source_rank });
    }
    let top = site.poset().top();
    let elements = phi.target.elements();
    let size = elements.len();
    let translation = |t: &[BigInt]| -> Perm {
        let images = elements
            .iter()
            .map(|e| {
                let moved: Vec<BigInt> = e.iter().zip(t).map(|(a, b)| a + b).collect();
                phi.target.index_of(&moved)
            })
            .collect();
        Perm::from_images(images).expect("translations permute the deck group")
    };
    let generators: Vec<Perm> = (0..cat.group_rank(top))
        .map(|j| {
            let mut e = vec![BigInt::zero(); cat.group_rank(top)];
            e[j] = BigInt::one();
            translation(&phi.apply(&cat.lift(top, &e)))
        })
        .collect();
    let frobenius = match site.galois() {
        None => None,
        Some(gal) => {
            let exponent = phi.target.exponent();
            if !(BigInt::from(gal.level) % &exponent).is_zero() {
                return Err(TameError::LevelTooSmall { exponent, level: gal.level });
            }
            let q = BigInt::from(gal.char_exponent);
            let images = elements
                .iter()
                .map(|e| {
                    let moved: Vec<BigInt> = e.iter().map(|a| a * &q).collect();
                    phi.target.index_of(&moved)
                })
                .collect();
            Some(Perm::from_images(images).expect("units act by permutations"))
        }
    };
    Ok(StratumLocalSystem { site: site.clone(), object: top, size, generators, frobenius })
}

/// As [`deck_local_system`], but starting from the lattice-extension form of
/// the cover.
pub fn local_system_from_cover(
    spec: &KummerCoverSpec,
    site: &Arc<Site>,
) -> Result<StratumLocalSystem, TameError> {
    deck_local_system(&recover_surjection(spec), site)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentVerdict {
    pub stratum: ConeId,
    pub descends: bool,
    pub component_count: BigInt,
    pub pushforward_stalk: usize,
    pub predicted_stalk: usize,
    pub agree: bool,
}

/// Computes the closed restriction of the open pushforward of a Kummer
/// cover's local system two ways — through the sheaf calculus, and through
/// the image/orbit computation on the deck group — and compares them.
pub fn descent_cross_check(
    phi: &CharacterSurjection,
    chart: &Fan,
    stratum: ConeId,
    galois: Option<GaloisDatum>,
) -> Result<DescentVerdict, TameError> {
    let cat = build_fundamental_category(chart)?;
    let poset = cat.poset().clone();
    if poset.minimal_in(&poset.all_objects()).len() != 1 {
        return Err(TameError::NotAffineChart);
    }
    if stratum >= poset.len() {
        return Err(TameError::Fan(FanError::UnknownCone(stratum)));
    }
    let site = Arc::new(match galois {
        None => Site::Complex(cat.clone()),
        Some(gal) => Site::Tame(finite_level(&cat, gal)?),
    });

    // route (a): the sheaf calculus
    let ls_top = deck_local_system(phi, &site)?;
    let open_sheaf = local_system_sheaf(&ls_top);
    let pushed = pushforward_open(&open_sheaf)?;
    let stalk = stalk_local_system(&pushed, stratum)?;

    // route (b): the image of the stratum's span sublattice in the deck group
    let sub = span_sublattice(chart.cone(stratum)?);
    let (descends, component_count) = cover_components(phi, &sub)?;
    let predicted: StratumLocalSystem = if descends {
        let elements = phi.target.elements();
        let translation = |t: &[BigInt]| -> Perm {
            let images = elements
                .iter()
                .map(|e| {
                    let moved: Vec<BigInt> = e.iter().zip(t).map(|(a, b)| a + b).collect();
                    phi.target.index_of(&moved)
                })
                .collect();
            Perm::from_images(images).unwrap()
        };
        let generators = (0..cat.group_rank(stratum))
            .map(|j| {
                let mut e = vec![BigInt::zero(); cat.group_rank(stratum)];
                e[j] = BigInt::one();
                translation(&phi.apply(&cat.lift(stratum, &e)))
            })
            .collect();
        let frobenius = site.galois().map(|gal| {
            let q = BigInt::from(gal.char_exponent);
            let images = elements
                .iter()
                .map(|e| {
                    let moved: Vec<BigInt> = e.iter().map(|a| a * &q).collect();
                    phi.target.index_of(&moved)
                })
                .collect();
            Perm::from_images(images).unwrap()
        });
        StratumLocalSystem {
            site: site.clone(),
            object: stratum,
            size: elements.len(),
            generators,
            frobenius,
        }
    } else {
        StratumLocalSystem {
            site: site.clone(),
            object: stratum,
            size: 0,
            generators: vec![Perm::identity(0); cat.group_rank(stratum)],
            frobenius: site.galois().map(|_| Perm::identity(0)),
        }
    };

    // the family enumeration at the stratum is indexed by the single value at
    // the open orbit, so both sides use the same element order
    let agree = stalk.size == predicted.size
        && stalk.generators == predicted.generators
        && stalk.frobenius == predicted.frobenius;
    Ok(DescentVerdict {
        stratum,
        descends,
        component_count,
        pushforward_stalk: stalk.size,
        predicted_stalk: predicted.size,
        agree,
    })
}

fn divisors(e: u64) -> Vec<u64> {
    (1..=e).filter(|&d| e.is_multiple_of(d)).collect()
}

/// All connected Kummer covers of the rank-r torus with deck-group exponent
/// at most `max_exponent`, one per kernel lattice (that is, up to deck
/// isomorphism). Includes the trivial cover.
pub fn enumerate_connected_covers(rank: usize, max_exponent: u64) -> Vec<CharacterSurjection> {
    let mut kernels: BTreeSet<IntMatrix> = BTreeSet::new();
    for e in 1..=max_exponent {
        let mut diag_choices: Vec<Vec<u64>> = vec![vec![]];
        for _ in 0..rank {
            let mut next = Vec::new();
            for c in &diag_choices {
                for d in divisors(e) {
                    let mut c2 = c.clone();
                    c2.push(d);
                    next.push(c2);
                }
            }
            diag_choices = next;
        }
        for diagonal in diag_choices {
            let mut offdiag_choices: Vec<Vec<u64>> = vec![vec![]];
            for (j, &d) in diagonal.iter().enumerate() {
                // j entries above the pivot in column j, each reduced mod d
                for _ in 0..j {
                    let mut next = Vec::new();
                    for c in &offdiag_choices {
                        for v in 0..d {
                            let mut c2 = c.clone();
                            c2.push(v);
                            next.push(c2);
                        }
                    }
                    offdiag_choices = next;
                }
            }
            for off in offdiag_choices {
                let mut h = IntMatrix::zeros(rank, rank);
                let mut pos = 0;
                for (j, &d) in diagonal.iter().enumerate() {
                    h[(j, j)] = BigInt::from(d);
                    for i in 0..j {
                        h[(i, j)] = BigInt::from(off[pos]);
                        pos += 1;
                    }
                }
                // must contain e * Z^rank and be reduced
                let contains = (0..rank).all(|i| {
                    let mut v = vec![BigInt::zero(); rank];
                    v[i] = BigInt::from(e);
                    intlat::lattice_contains(&h, &v)
                });
                if !contains {
                    continue;
                }
                let q = intlat::quotient_presentation(rank, &h);
                let exp = q.torsion.last().cloned().unwrap_or_else(BigInt::one);
                if exp > BigInt::from(max_exponent) {
                    continue;
                }
                kernels.insert(intlat::lattice_basis(&h));
            }
        }
    }
    let mut out: Vec<CharacterSurjection> = kernels
        .into_iter()
        .map(|l| {
            let q = intlat::quotient_presentation(rank, &l);
            assert_eq!(q.free_rank, 0);
            let k = q.torsion.len();
            let mut matrix = IntMatrix::zeros(rank, k);
            for i in 0..rank {
                for j in 0..k {
                    matrix[(i, j)] = q.projection[(i, q.free_rank + j)].clone();
                }
            }
            let target = FiniteAbelianGroup::new(q.torsion.clone()).expect("Smith chain");
            CharacterSurjection::new(rank, target, matrix).expect("canonical quotient surjection")
        })
        .collect();
    out.sort_by_key(|phi| (phi.target.order(), phi.kernel_lattice()));
    out
}
