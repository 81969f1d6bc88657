//! Standard test fans.

use crate::fan::{Cone, Fan};

/// Fan of affine n-space: the single cone spanned by the standard basis.
pub fn affine(n: usize) -> Fan {
    let rays: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let slices: Vec<&[i64]> = rays.iter().map(Vec::as_slice).collect();
    Fan::generated_by(n, vec![Cone::from_i64(n, &slices)])
}

/// Fan of projective n-space: rays `e_1, .., e_n, -(e_1 + .. + e_n)` with all
/// n-element subsets as maximal cones.
pub fn projective(n: usize) -> Fan {
    let mut rays: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    rays.push(vec![-1; n]);
    let mut maximal = Vec::new();
    for omit in 0..=n {
        let subset: Vec<&[i64]> = rays
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != omit)
            .map(|(_, r)| r.as_slice())
            .collect();
        maximal.push(Cone::from_i64(n, &subset));
    }
    Fan::generated_by(n, maximal)
}

/// Fan of the Hirzebruch surface F_a: rays `(1,0), (0,1), (-1,a), (0,-1)`
/// with the four adjacent pairs as maximal cones.
pub fn hirzebruch(a: i64) -> Fan {
    let rays: [[i64; 2]; 4] = [[1, 0], [0, 1], [-1, a], [0, -1]];
    let maximal = (0..4)
        .map(|i| Cone::from_i64(2, &[&rays[i], &rays[(i + 1) % 4]]))
        .collect();
    Fan::generated_by(2, maximal)
}

/// The seven fans used throughout the test suites.
pub fn standard_suite() -> Vec<(&'static str, Fan)> {
    vec![
        ("A1", affine(1)),
        ("A2", affine(2)),
        ("A3", affine(3)),
        ("P1", projective(1)),
        ("P2", projective(2)),
        ("P3", projective(3)),
        ("F1", hirzebruch(1)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::validate_fan;

    #[test]
    fn suite_fans_are_valid_and_sized() {
        let expected = [
            ("A1", 2),
            ("A2", 4),
            ("A3", 8),
            ("P1", 3),
            ("P2", 7),
            ("P3", 15),
            ("F1", 9),
        ];
        for ((name, fan), (ename, len)) in standard_suite().iter().zip(expected) {
            assert_eq!(*name, ename);
            assert!(validate_fan(fan).is_valid(), "{name} must be valid");
            assert_eq!(fan.len(), len, "{name} cone count");
        }
    }
}
