//! Permutations of `{0, .., n-1}` in one-line notation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    /// One-line notation: `images[i]` is the image of `i`.
    pub fn from_images(images: Vec<usize>) -> Option<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm(images))
    }

    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Perm {
        let mut p: Vec<usize> = (0..n).collect();
        for c in cycles {
            for i in 0..c.len() {
                p[c[i]] = c[(i + 1) % c.len()];
            }
        }
        Perm(p)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
        Perm::from_cycles(n, &[&[a, b]])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.len()];
        let mut ord = 1u64;
        for i in 0..self.len() {
            if seen[i] {
                continue;
            }
            let mut len = 0u64;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.0[j];
                len += 1;
            }
            ord = ord.lcm(&len);
        }
        ord
    }

    pub fn pow(&self, e: i64) -> Perm {
        let o = self.order() as i64;
        let mut e = e.rem_euclid(o);
        let mut acc = Perm::identity(self.len());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base.clone());
            e >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, e: &BigInt) -> Perm {
        let o = BigInt::from(self.order());
        let r = e.mod_floor(&o).to_i64().expect("permutation order fits in i64");
        self.pow(r)
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        self.compose(other) == other.compose(self)
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] == i).collect()
    }
}

/// Product of `gens[i]^exps[i]`; the generators are assumed to commute, so the
/// order of multiplication does not matter.
pub fn word(gens: &[Perm], exps: &[BigInt]) -> Perm {
    assert_eq!(gens.len(), exps.len());
    let n = gens.first().map_or(0, Perm::len);
    let mut acc = Perm::identity(n);
    for (g, e) in gens.iter().zip(exps) {
        acc = acc.compose(&g.pow_big(e));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        let s = Perm::from_cycles(3, &[&[0, 1, 2]]);
        let t = Perm::transposition(3, 0, 1);
        assert_eq!(s.compose(&s).compose(&s), Perm::identity(3));
        assert_eq!(s.compose(&s.inverse()), Perm::identity(3));
        // (s∘t)(0) = s(t(0)) = s(1) = 2
        assert_eq!(s.compose(&t).apply(0), 2);
        assert_eq!(s.order(), 3);
        assert_eq!(t.order(), 2);
    }

    #[test]
    fn pow_handles_negative_and_big() {
        let s = Perm::from_cycles(4, &[&[0, 1, 2, 3]]);
        assert_eq!(s.pow(-1), s.inverse());
        assert_eq!(s.pow_big(&BigInt::from(-7)), s.pow(1));
        assert_eq!(s.pow_big(&BigInt::from(400)), Perm::identity(4));
    }

    #[test]
    fn empty_permutation() {
        let e = Perm::identity(0);
        assert!(e.is_identity());
        assert_eq!(e.order(), 1);
    }
}
