//! Exact integer-lattice linear algebra.
//!
//! Lattice elements are row vectors and homomorphisms act by right
//! multiplication. All computations are exact over arbitrary-precision
//! integers; Smith normal form pivots blow up quickly enough that fixed-width
//! arithmetic is not worth the risk at any size we care about.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense integer matrix, row-major, arbitrary precision.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry grid must be rectangular");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in &rows {
            assert_eq!(row.len(), c, "entry grid must be rectangular");
        }
        IntMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = &self[(i, k)] * &rhs[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn vstack(&self, below: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, below.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        IntMatrix::new(self.rows + below.rows, self.cols, data)
    }

    pub fn submatrix_rows(&self, lo: usize, hi: usize) -> IntMatrix {
        IntMatrix::new(hi - lo, self.cols, self.data[lo * self.cols..hi * self.cols].to_vec())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_i += c * row_j
    pub fn add_row_multiple(&mut self, i: usize, j: usize, c: &BigInt) {
        for k in 0..self.cols {
            let add = c * &self[(j, k)];
            self[(i, k)] += add;
        }
    }

    /// col_i += c * col_j
    pub fn add_col_multiple(&mut self, i: usize, j: usize, c: &BigInt) {
        for k in 0..self.rows {
            let add = c * &self[(k, j)];
            self[(k, i)] += add;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let v = -self[(i, k)].clone();
            self[(i, k)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Row-vector multiplication `v * m`.
pub fn vec_mat(v: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    assert_eq!(v.len(), m.rows(), "vector/matrix dimension mismatch");
    let mut out = vec![BigInt::zero(); m.cols()];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for j in 0..m.cols() {
            let prod = vi * &m[(i, j)];
            out[j] += prod;
        }
    }
    out
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smith normal form `U * A * V = S` with unimodular `U`, `V` and diagonal `S`
/// whose entries are nonnegative, satisfy `d_i | d_{i+1}`, and end in zeros.
///
/// `v_inv` is the inverse of `V`, tracked during the reduction; its leading
/// rows give saturations and its trailing rows give free-part sections.
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
}

fn min_nonzero(s: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..s.rows() {
        for j in k..s.cols() {
            if s[(i, j)].is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some(b) => {
                    if s[(i, j)].abs() < s[b].abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);
    let mut k = 0usize;

    while k < m.min(n) {
        let Some((pi, pj)) = min_nonzero(&s, k) else { break };
        s.swap_rows(k, pi);
        u.swap_rows(k, pi);
        s.swap_cols(k, pj);
        v.swap_cols(k, pj);
        v_inv.swap_rows(k, pj);

        loop {
            let mut clean = true;
            // clear the pivot column
            for i in (k + 1)..m {
                if s[(i, k)].is_zero() {
                    continue;
                }
                let q = s[(i, k)].div_floor(&s[(k, k)]);
                let c = -q;
                s.add_row_multiple(i, k, &c);
                u.add_row_multiple(i, k, &c);
                if !s[(i, k)].is_zero() {
                    s.swap_rows(k, i);
                    u.swap_rows(k, i);
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // clear the pivot row
            for j in (k + 1)..n {
                if s[(k, j)].is_zero() {
                    continue;
                }
                let q = s[(k, j)].div_floor(&s[(k, k)]);
                let c = -&q;
                s.add_col_multiple(j, k, &c);
                v.add_col_multiple(j, k, &c);
                v_inv.add_row_multiple(k, j, &q);
                if !s[(k, j)].is_zero() {
                    s.swap_cols(k, j);
                    v.swap_cols(k, j);
                    v_inv.swap_rows(k, j);
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // the pivot must divide everything that comes after it
            let mut fixed = false;
            'scan: for i in (k + 1)..m {
                for j in (k + 1)..n {
                    if !(&s[(i, j)] % &s[(k, k)]).is_zero() {
                        let one = BigInt::one();
                        s.add_row_multiple(k, i, &one);
                        u.add_row_multiple(k, i, &one);
                        fixed = true;
                        break 'scan;
                    }
                }
            }
            if !fixed {
                break;
            }
        }
        k += 1;
    }

    for i in 0..m.min(n) {
        if s[(i, i)].is_negative() {
            s.negate_row(i);
            u.negate_row(i);
        }
    }

    let invariant_factors = (0..m.min(n)).map(|i| s[(i, i)].clone()).collect();
    SmithDecomposition { u, s, v, v_inv, invariant_factors }
}

/// Row-style Hermite normal form `H = U * A`: echelon with positive pivots,
/// entries above each pivot reduced into `[0, pivot)`.
pub struct HermiteForm {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

pub fn hnf(a: &IntMatrix) -> HermiteForm {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut r = 0usize;
    let mut pivot_cols = Vec::new();

    for col in 0..n {
        if r == m {
            break;
        }
        // euclidean elimination below row r in this column
        loop {
            let nz: Vec<usize> = (r..m).filter(|&i| !h[(i, col)].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            if nz.len() == 1 {
                h.swap_rows(r, nz[0]);
                u.swap_rows(r, nz[0]);
                break;
            }
            let &imin = nz
                .iter()
                .min_by(|&&a1, &&b1| h[(a1, col)].abs().cmp(&h[(b1, col)].abs()))
                .unwrap();
            for &i in &nz {
                if i == imin {
                    continue;
                }
                let q = h[(i, col)].div_floor(&h[(imin, col)]);
                let c = -q;
                h.add_row_multiple(i, imin, &c);
                u.add_row_multiple(i, imin, &c);
            }
        }
        if h[(r, col)].is_zero() {
            continue;
        }
        if h[(r, col)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            if h[(i, col)].is_zero() {
                continue;
            }
            let q = h[(i, col)].div_floor(&h[(r, col)]);
            let c = -q;
            h.add_row_multiple(i, r, &c);
            u.add_row_multiple(i, r, &c);
        }
        pivot_cols.push(col);
        r += 1;
    }

    HermiteForm { h, u, rank: r, pivot_cols }
}

/// Canonical basis (HNF rows) of the lattice spanned by the rows of `a`.
pub fn lattice_basis(a: &IntMatrix) -> IntMatrix {
    let f = hnf(a);
    f.h.submatrix_rows(0, f.rank)
}

pub fn row_rank(a: &IntMatrix) -> usize {
    hnf(a).rank
}

/// Does `v` lie in the integer row span of `l`?
pub fn lattice_contains(l: &IntMatrix, v: &[BigInt]) -> bool {
    assert_eq!(l.cols(), v.len());
    let f = hnf(l);
    let mut w = v.to_vec();
    for (r, &col) in f.pivot_cols.iter().enumerate() {
        if w[col].is_zero() {
            continue;
        }
        let (q, rem) = w[col].div_rem(&f.h[(r, col)]);
        if !rem.is_zero() {
            return false;
        }
        for (wj, hj) in w.iter_mut().zip(f.h.row(r)) {
            *wj -= &q * hj;
        }
    }
    w.iter().all(|x| x.is_zero())
}

/// Does `v` lie in the rational row span of `l`?
pub fn span_contains(l: &IntMatrix, v: &[BigInt]) -> bool {
    assert_eq!(l.cols(), v.len());
    let stacked = l.vstack(&IntMatrix::from_rows(vec![v.to_vec()]));
    row_rank(l) == row_rank(&stacked)
}

pub fn lattice_eq(a: &IntMatrix, b: &IntMatrix) -> bool {
    lattice_basis(a) == lattice_basis(b)
}

/// Basis for `{ v : v * a = 0 }`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let d = snf(a);
    let r = d.invariant_factors.iter().filter(|f| !f.is_zero()).count();
    lattice_basis(&d.u.submatrix_rows(r, a.rows()))
}

/// Saturation `(span_Q of rows of l) ∩ Z^n`, as a canonical HNF basis.
pub fn saturate(l: &IntMatrix) -> IntMatrix {
    let n = l.cols();
    if l.rows() == 0 {
        return IntMatrix::zeros(0, n);
    }
    let d = snf(l);
    let r = d.invariant_factors.iter().filter(|f| !f.is_zero()).count();
    lattice_basis(&d.v_inv.submatrix_rows(0, r))
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &IntMatrix) -> BigInt {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return BigInt::zero();
            };
            m.swap_rows(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[(k, k)] * &m[(i, j)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = num / &prev;
            }
        }
        for i in k + 1..n {
            m[(i, k)] = BigInt::zero();
        }
        prev = m[(k, k)].clone();
    }
    sign * m[(n - 1, n - 1)].clone()
}

/// Canonical presentation of `Z^ambient_rank / rowspan(L)` in Smith
/// coordinates: free coordinates first, then one coordinate per torsion
/// factor.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuotientPresentation {
    pub ambient_rank: usize,
    pub free_rank: usize,
    /// Invariant factors > 1, in divisibility order.
    pub torsion: Vec<BigInt>,
    /// ambient_rank × (free_rank + torsion.len()); acts on the right.
    pub projection: IntMatrix,
    /// free_rank × ambient_rank lift of the free coordinates.
    pub section: IntMatrix,
}

impl fmt::Debug for QuotientPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QuotientPresentation(Z^{} -> Z^{} (+) {:?})",
            self.ambient_rank, self.free_rank, self.torsion
        )
    }
}

/// Coordinates of a class in a quotient presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCoords {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl ClassCoords {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|x| x.is_zero()) && self.torsion.iter().all(|x| x.is_zero())
    }
}

pub fn quotient_presentation(ambient_rank: usize, l: &IntMatrix) -> QuotientPresentation {
    assert_eq!(l.cols(), ambient_rank, "sublattice vectors must lie in the ambient lattice");
    let d = snf(l);
    let r = d.invariant_factors.iter().filter(|f| !f.is_zero()).count();
    let free_rank = ambient_rank - r;
    let torsion_idx: Vec<usize> =
        (0..r).filter(|&i| d.invariant_factors[i] > BigInt::one()).collect();
    let torsion: Vec<BigInt> = torsion_idx.iter().map(|&i| d.invariant_factors[i].clone()).collect();

    let mut projection = IntMatrix::zeros(ambient_rank, free_rank + torsion.len());
    for i in 0..ambient_rank {
        for (jj, j) in (r..ambient_rank).enumerate() {
            projection[(i, jj)] = d.v[(i, j)].clone();
        }
        for (jj, &j) in torsion_idx.iter().enumerate() {
            projection[(i, free_rank + jj)] = d.v[(i, j)].clone();
        }
    }
    let section = d.v_inv.submatrix_rows(r, ambient_rank);

    QuotientPresentation { ambient_rank, free_rank, torsion, projection, section }
}

/// Class of `v` in the quotient; linear in `v`, torsion coordinates reduced
/// into `[0, d_i)`.
pub fn project(q: &QuotientPresentation, v: &[BigInt]) -> Result<ClassCoords, LatticeError> {
    if v.len() != q.ambient_rank {
        return Err(LatticeError::DimensionMismatch { expected: q.ambient_rank, got: v.len() });
    }
    let y = vec_mat(v, &q.projection);
    let free = y[..q.free_rank].to_vec();
    let torsion = y[q.free_rank..]
        .iter()
        .zip(&q.torsion)
        .map(|(x, d)| x.mod_floor(d))
        .collect();
    Ok(ClassCoords { free, torsion })
}

/// Lift free class coordinates back into the ambient lattice.
pub fn lift_free(q: &QuotientPresentation, free: &[BigInt]) -> Vec<BigInt> {
    assert_eq!(free.len(), q.free_rank);
    vec_mat(free, &q.section)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Independent oracle: invariant factors from determinantal divisors,
    /// d_k = gcd(k×k minors) / gcd((k-1)×(k-1) minors).
    fn minor_gcd_factors(a: &IntMatrix) -> Vec<BigInt> {
        fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                for i in start..n {
                    cur.push(i);
                    rec(i + 1, n, k, cur, out);
                    cur.pop();
                }
            }
            rec(0, n, k, &mut Vec::new(), &mut out);
            out
        }
        let (m, n) = (a.rows(), a.cols());
        let mut divisors = vec![BigInt::one()];
        for k in 1..=m.min(n) {
            let mut g = BigInt::zero();
            for rows in combinations(m, k) {
                for cols in combinations(n, k) {
                    let sub = IntMatrix::from_rows(
                        rows.iter()
                            .map(|&i| cols.iter().map(|&j| a[(i, j)].clone()).collect())
                            .collect(),
                    );
                    g = g.gcd(&det(&sub));
                }
            }
            divisors.push(g);
        }
        (1..=m.min(n))
            .map(|k| {
                if divisors[k].is_zero() {
                    BigInt::zero()
                } else {
                    &divisors[k] / &divisors[k - 1]
                }
            })
            .collect()
    }

    fn check_snf(a: &IntMatrix) {
        let d = snf(a);
        assert_eq!(d.u.mul(a).mul(&d.v), d.s, "U*A*V must equal S");
        assert_eq!(det(&d.u).abs(), BigInt::one());
        assert_eq!(det(&d.v).abs(), BigInt::one());
        assert_eq!(d.v.mul(&d.v_inv), IntMatrix::identity(a.cols()));
        for i in 0..d.invariant_factors.len() {
            assert!(!d.invariant_factors[i].is_negative());
            if i + 1 < d.invariant_factors.len() && !d.invariant_factors[i].is_zero() {
                assert!(
                    (&d.invariant_factors[i + 1] % &d.invariant_factors[i]).is_zero(),
                    "divisibility chain"
                );
            }
            if d.invariant_factors[i].is_zero() && i + 1 < d.invariant_factors.len() {
                assert!(d.invariant_factors[i + 1].is_zero(), "zeros come last");
            }
        }
        assert_eq!(d.invariant_factors, minor_gcd_factors(a));
    }

    #[test]
    fn snf_identity() {
        let d = snf(&IntMatrix::identity(2));
        assert_eq!(d.invariant_factors, vec![bi(1), bi(1)]);
        assert_eq!(d.u, IntMatrix::identity(2));
        assert_eq!(d.v, IntMatrix::identity(2));
    }

    #[test]
    fn snf_two_four_six_eight() {
        let a = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let d = snf(&a);
        assert_eq!(d.invariant_factors, vec![bi(2), bi(4)]);
        check_snf(&a);
    }

    #[test]
    fn snf_zero_matrix() {
        let a = IntMatrix::zeros(2, 3);
        let d = snf(&a);
        assert_eq!(d.invariant_factors, vec![bi(0), bi(0)]);
    }

    #[test]
    fn snf_seeded_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let m = rng.gen_range(1..=5);
            let n = rng.gen_range(1..=5);
            let data = (0..m * n).map(|_| bi(rng.gen_range(-20..=20))).collect();
            check_snf(&IntMatrix::new(m, n, data));
        }
    }

    #[test]
    fn saturate_examples() {
        // {(2,0)} in Z^2: saturation is Z*(1,0); oracle: (1,0) spans the same
        // line and has content 1.
        let l = IntMatrix::from_i64(&[&[2, 0]]);
        assert_eq!(saturate(&l), IntMatrix::from_i64(&[&[1, 0]]));

        let l = IntMatrix::from_i64(&[&[1, 0]]);
        assert_eq!(saturate(&l), IntMatrix::from_i64(&[&[1, 0]]));
    }

    #[test]
    fn saturate_full_rank_pair_matches_box_scan() {
        // Oracle: collect all integer points of [-4,4]^2 lying in the rational
        // span and compare lattices. The span of {(2,2),(0,4)} is all of Q^2,
        // so the saturation is the full lattice Z^2.
        let l = IntMatrix::from_i64(&[&[2, 2], &[0, 4]]);
        let mut pts: Vec<Vec<BigInt>> = Vec::new();
        for x in -4i64..=4 {
            for y in -4i64..=4 {
                let v = vec![bi(x), bi(y)];
                if span_contains(&l, &v) {
                    pts.push(v);
                }
            }
        }
        let scanned = lattice_basis(&IntMatrix::from_rows(pts));
        assert_eq!(saturate(&l), scanned);
        assert_eq!(saturate(&l), IntMatrix::identity(2));
    }

    #[test]
    fn saturate_is_idempotent_on_seeded_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let k = rng.gen_range(0..=3);
            let n = rng.gen_range(1..=4);
            let data = (0..k * n).map(|_| bi(rng.gen_range(-6..=6))).collect();
            let l = IntMatrix::new(k, n, data);
            let s1 = saturate(&l);
            assert_eq!(saturate(&s1), s1);
        }
    }

    #[test]
    fn quotient_examples() {
        let q = quotient_presentation(2, &IntMatrix::from_i64(&[&[1, 0]]));
        assert_eq!(q.free_rank, 1);
        assert!(q.torsion.is_empty());
        let c = project(&q, &[bi(5), bi(7)]).unwrap();
        assert_eq!(c.free, vec![bi(7)]);

        let q = quotient_presentation(2, &IntMatrix::from_i64(&[&[2, 0]]));
        assert_eq!(q.free_rank, 1);
        assert_eq!(q.torsion, vec![bi(2)]);

        let q = quotient_presentation(2, &IntMatrix::identity(2));
        assert_eq!(q.free_rank, 0);
        assert!(q.torsion.is_empty());
        let c = project(&q, &[bi(3), bi(4)]).unwrap();
        assert!(c.free.is_empty() && c.torsion.is_empty());
    }

    #[test]
    fn project_zero_and_dimension_error() {
        let q = quotient_presentation(2, &IntMatrix::from_i64(&[&[2, 0]]));
        let c = project(&q, &[bi(0), bi(0)]).unwrap();
        assert!(c.is_zero());
        assert!(project(&q, &[bi(1)]).is_err());
    }

    #[test]
    fn section_lifts_free_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.gen_range(1..=4);
            let k = rng.gen_range(0..=n);
            let data = (0..k * n).map(|_| bi(rng.gen_range(-5..=5))).collect();
            let q = quotient_presentation(n, &IntMatrix::new(k, n, data));
            for j in 0..q.free_rank {
                let mut e = vec![BigInt::zero(); q.free_rank];
                e[j] = BigInt::one();
                let lifted = lift_free(&q, &e);
                let back = project(&q, &lifted).unwrap();
                assert_eq!(back.free, e);
                assert!(back.torsion.iter().all(|t| t.is_zero()));
            }
        }
    }

    #[test]
    fn quotient_of_saturated_lattice_is_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.gen_range(1..=4);
            let k = rng.gen_range(0..=n);
            let data = (0..k * n).map(|_| bi(rng.gen_range(-6..=6))).collect();
            let sat = saturate(&IntMatrix::new(k, n, data));
            let q = quotient_presentation(n, &sat);
            assert!(q.torsion.is_empty(), "saturated sublattices give free quotients");
        }
    }

    proptest::proptest! {
        #[test]
        fn project_is_additive(
            entries in proptest::collection::vec(-10i64..=10, 4),
            a in proptest::collection::vec(-50i64..=50, 2),
            b in proptest::collection::vec(-50i64..=50, 2),
        ) {
            let l = IntMatrix::from_rows(vec![
                vec![bi(entries[0]), bi(entries[1])],
                vec![bi(entries[2]), bi(entries[3])],
            ]);
            let q = quotient_presentation(2, &l);
            let av: Vec<BigInt> = a.iter().map(|&x| bi(x)).collect();
            let bv: Vec<BigInt> = b.iter().map(|&x| bi(x)).collect();
            let sum: Vec<BigInt> = av.iter().zip(&bv).map(|(x, y)| x + y).collect();
            let ca = project(&q, &av).unwrap();
            let cb = project(&q, &bv).unwrap();
            let cs = project(&q, &sum).unwrap();
            let free_sum: Vec<BigInt> = ca.free.iter().zip(&cb.free).map(|(x, y)| x + y).collect();
            proptest::prop_assert_eq!(cs.free, free_sum);
            for (i, d) in q.torsion.iter().enumerate() {
                let t = (&ca.torsion[i] + &cb.torsion[i]).mod_floor(d);
                proptest::prop_assert_eq!(&cs.torsion[i], &t);
            }
        }

        #[test]
        fn snf_invariants_random(
            m in 1usize..=4, n in 1usize..=4,
            seed in proptest::collection::vec(-20i64..=20, 16),
        ) {
            let data: Vec<BigInt> = seed.iter().take(m * n).map(|&x| bi(x)).collect();
            if data.len() == m * n {
                let a = IntMatrix::new(m, n, data);
                let d = snf(&a);
                proptest::prop_assert_eq!(d.u.mul(&a).mul(&d.v), d.s);
                proptest::prop_assert_eq!(det(&d.u).abs(), BigInt::one());
                proptest::prop_assert_eq!(det(&d.v).abs(), BigInt::one());
            }
        }
    }
}
