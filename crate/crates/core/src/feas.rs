//! Exact feasibility of small systems of linear inequalities over Q, by
//! integer Fourier–Motzkin elimination. Only used for cone geometry (supporting
//! functionals, membership), where systems have a handful of variables.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

/// System of constraints `a · x >= b`.
pub(crate) struct LinearSystem {
    n: usize,
    rows: Vec<(Vec<BigInt>, BigInt)>,
}

impl LinearSystem {
    pub fn new(n: usize) -> Self {
        LinearSystem { n, rows: Vec::new() }
    }

    pub fn add_ge(&mut self, a: Vec<BigInt>, b: BigInt) {
        assert_eq!(a.len(), self.n);
        self.rows.push(normalize((a, b)));
    }

    pub fn add_eq(&mut self, a: Vec<BigInt>, b: BigInt) {
        let neg_a: Vec<BigInt> = a.iter().map(|x| -x).collect();
        let neg_b = -&b;
        self.add_ge(a, b);
        self.add_ge(neg_a, neg_b);
    }

    /// Is there a rational solution?
    pub fn feasible(mut self) -> bool {
        for var in 0..self.n {
            let mut zero_rows = Vec::new();
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for row in self.rows.drain(..) {
                match row.0[var].sign() {
                    num_bigint::Sign::NoSign => zero_rows.push(row),
                    num_bigint::Sign::Plus => pos.push(row),
                    num_bigint::Sign::Minus => neg.push(row),
                }
            }
            let mut next: BTreeSet<(Vec<BigInt>, BigInt)> = zero_rows.into_iter().collect();
            for p in &pos {
                for q in &neg {
                    // (-q_k) * p + p_k * q has zero coefficient at `var`
                    let mp = -&q.0[var];
                    let mq = p.0[var].clone();
                    let a: Vec<BigInt> =
                        (0..self.n).map(|j| &mp * &p.0[j] + &mq * &q.0[j]).collect();
                    let b = &mp * &p.1 + &mq * &q.1;
                    next.insert(normalize((a, b)));
                }
            }
            self.rows = next.into_iter().collect();
        }
        self.rows.iter().all(|(_, b)| !b.is_positive())
    }
}

fn normalize(mut row: (Vec<BigInt>, BigInt)) -> (Vec<BigInt>, BigInt) {
    let mut g = row.1.abs();
    for x in &row.0 {
        g = g.gcd(x);
    }
    if g > BigInt::from(1) {
        for x in &mut row.0 {
            *x /= &g;
        }
        row.1 /= &g;
    }
    row
}

/// Is `v` a nonnegative rational combination of `gens`?
pub(crate) fn in_cone(gens: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    let k = gens.len();
    let mut sys = LinearSystem::new(k);
    for i in 0..k {
        let mut a = vec![BigInt::zero(); k];
        a[i] = BigInt::from(1);
        sys.add_ge(a, BigInt::zero());
    }
    for j in 0..v.len() {
        let a: Vec<BigInt> = gens.iter().map(|g| g[j].clone()).collect();
        sys.add_eq(a, v[j].clone());
    }
    sys.feasible()
}

/// Is there `u` with `u · r = 0` for `r` in `zero_on` and `u · r > 0` for `r`
/// in `positive_on`? (Strictness is encoded as `>= 1`; the system is
/// positively homogeneous.)
pub(crate) fn supporting_functional_exists(
    dim: usize,
    zero_on: &[Vec<BigInt>],
    positive_on: &[Vec<BigInt>],
) -> bool {
    let mut sys = LinearSystem::new(dim);
    for r in zero_on {
        sys.add_eq(r.clone(), BigInt::zero());
    }
    for r in positive_on {
        sys.add_ge(r.clone(), BigInt::from(1));
    }
    sys.feasible()
}

/// Is there `u` with `u · r = 0` on `zero_on`, `u · r > 0` on `positive_on`,
/// and `u · r < 0` on `negative_on`? Used to separate two cones along a
/// common face.
pub(crate) fn separating_functional_exists(
    dim: usize,
    zero_on: &[Vec<BigInt>],
    positive_on: &[Vec<BigInt>],
    negative_on: &[Vec<BigInt>],
) -> bool {
    let mut sys = LinearSystem::new(dim);
    for r in zero_on {
        sys.add_eq(r.clone(), BigInt::zero());
    }
    for r in positive_on {
        sys.add_ge(r.clone(), BigInt::from(1));
    }
    for r in negative_on {
        let neg: Vec<BigInt> = r.iter().map(|x| -x).collect();
        sys.add_ge(neg, BigInt::from(1));
    }
    sys.feasible()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cone_membership() {
        let gens = vec![v(&[1, 0]), v(&[0, 1])];
        assert!(in_cone(&gens, &v(&[3, 5])));
        assert!(!in_cone(&gens, &v(&[-1, 0])));
        assert!(in_cone(&gens, &v(&[0, 0])));
        assert!(!in_cone(&[], &v(&[1, 0])));
    }

    #[test]
    fn positive_functional_detects_pointedness() {
        assert!(supporting_functional_exists(2, &[], &[v(&[1, 0]), v(&[0, 1])]));
        assert!(!supporting_functional_exists(1, &[], &[v(&[1]), v(&[-1])]));
    }

    #[test]
    fn face_functional() {
        // x-axis ray is a face of the first quadrant
        assert!(supporting_functional_exists(2, &[v(&[1, 0])], &[v(&[0, 1])]));
        // the ray (1,1) is not a face of the quadrant
        assert!(!supporting_functional_exists(
            2,
            &[v(&[1, 1])],
            &[v(&[1, 0]), v(&[0, 1])]
        ));
    }
}
