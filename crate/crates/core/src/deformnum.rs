//! Numerical invariants of μ-ordinary deformation spaces.

use serde::Serialize;

use crate::eltype::ELType;
use crate::error::{Error, Result};

/// Σ_i f(i)·(d - f(i)): the number of formal parameters of the deformation
/// space of an EL crystal of type (d, f).
pub fn unipotent_dim(t: &ELType) -> usize {
    t.f.iter().map(|&fi| fi * (t.d - fi)).sum()
}

/// A factor is rigid when every f(i) is 0 or d, i.e. its deformation space
/// has no formal parameters.
pub fn is_rigid(t: &ELType) -> bool {
    t.f.iter().all(|&fi| fi == 0 || fi == t.d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoSlopeDeformation {
    pub type1: ELType,
    pub type2: ELType,
    pub f_prime: Vec<u8>,
    pub d_prime_max: usize,
    pub defspace_dim: usize,
    pub rigid_factors: Vec<bool>,
}

impl TwoSlopeDeformation {
    /// d'_max · Σ f'(i), the dimension bound from the Lubin-Tate presentation.
    pub fn lubin_tate_bound(&self) -> usize {
        self.d_prime_max * self.f_prime.iter().map(|&x| x as usize).sum::<usize>()
    }
}

/// Deformation data of a two-slope μ-ordinary crystal from the types of its
/// slope factors, lower slope first.
pub fn two_slope_report(t1: &ELType, t2: &ELType) -> Result<TwoSlopeDeformation> {
    if t1.m() != t2.m() {
        return Err(Error::DimensionMismatch(format!("factor types have m = {} and m = {}", t1.m(), t2.m())));
    }
    let f_prime = t1
        .f
        .iter()
        .zip(&t2.f)
        .enumerate()
        .map(|(i, (&f1, &f2))| match (f1, f2) {
            (0, 0) => Ok(0),
            (a, b) if a == t1.d && b == t2.d => Ok(0),
            (0, b) if b == t2.d => Ok(1),
            _ => Err(Error::UncoveredCase { index: i, f1, f2 }),
        })
        .collect::<Result<Vec<u8>>>()?;
    let combined = ELType { d: t1.d + t2.d, f: t1.f.iter().zip(&t2.f).map(|(a, b)| a + b).collect() };
    Ok(TwoSlopeDeformation {
        type1: t1.clone(),
        type2: t2.clone(),
        f_prime,
        d_prime_max: t1.d * t2.d,
        defspace_dim: unipotent_dim(&combined),
        rigid_factors: vec![is_rigid(t1), is_rigid(t2)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(d: usize, f: &[usize]) -> ELType {
        ELType::new(d, f.to_vec()).unwrap()
    }

    /// Roots e_a - e_b of GL_d with ⟨α, μ⟩ = 1 for μ = (1^f, 0^{d-f}).
    fn positive_pairings(d: usize, f: usize) -> usize {
        let mu: Vec<i64> = (0..d).map(|k| (k < f) as i64).collect();
        let mut count = 0;
        for a in 0..d {
            for b in 0..d {
                if a != b && mu[a] - mu[b] == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn unipotent_dimension_examples() {
        assert_eq!(unipotent_dim(&t(2, &[1])), 1);
        assert_eq!(unipotent_dim(&t(2, &[1])), positive_pairings(2, 1));
        for m in 1..4 {
            assert_eq!(unipotent_dim(&t(1, &vec![1; m])), 0);
            assert_eq!(unipotent_dim(&t(1, &vec![0; m])), 0);
        }
        assert_eq!(unipotent_dim(&t(2, &[1, 0])), 1);
        assert!(is_rigid(&t(1, &[1, 0])) && !is_rigid(&t(2, &[1, 0])));
    }

    #[test]
    fn two_slope_examples() {
        let r = two_slope_report(&t(1, &[0, 0]), &t(1, &[1, 0])).unwrap();
        assert_eq!(r.f_prime, vec![1, 0]);
        assert_eq!(r.d_prime_max, 1);
        assert_eq!(r.defspace_dim, 1);
        // both slope factors of the rank-4 fixture are isoclinic
        assert_eq!(r.rigid_factors, vec![true, true]);

        let r = two_slope_report(&t(2, &[0, 0]), &t(3, &[0, 0])).unwrap();
        assert_eq!(r.f_prime, vec![0, 0]);
        assert_eq!(r.d_prime_max, 6);

        let r = two_slope_report(&t(1, &[1, 1]), &t(1, &[1, 1])).unwrap();
        assert_eq!(r.f_prime, vec![0, 0]);

        // classical ordinary: étale and multiplicative factors
        let r = two_slope_report(&t(1, &[0]), &t(1, &[1])).unwrap();
        assert_eq!((r.f_prime.clone(), r.d_prime_max, r.defspace_dim), (vec![1], 1, 1));
    }

    #[test]
    fn uncovered_cases_are_errors() {
        assert_eq!(
            two_slope_report(&t(1, &[1, 0]), &t(1, &[0, 0])),
            Err(Error::UncoveredCase { index: 0, f1: 1, f2: 0 })
        );
        assert!(matches!(two_slope_report(&t(1, &[0]), &t(1, &[0, 0])), Err(Error::DimensionMismatch(_))));
    }

    fn el_type() -> impl Strategy<Value = ELType> {
        (1usize..5, 1usize..5).prop_flat_map(|(d, m)| {
            proptest::collection::vec(0..=d, m).prop_map(move |f| ELType { d, f })
        })
    }

    proptest! {
        #[test]
        fn rigid_exactly_when_dimension_vanishes(t in el_type()) {
            prop_assert_eq!(unipotent_dim(&t) == 0, is_rigid(&t));
            if t.f.iter().all(|&x| x == 0) || t.f.iter().all(|&x| x == t.d) {
                prop_assert!(is_rigid(&t));
            }
        }

        #[test]
        fn dimension_matches_root_count(d in 1usize..6, f in 0usize..6) {
            prop_assume!(f <= d);
            prop_assert_eq!(unipotent_dim(&ELType { d, f: vec![f] }), positive_pairings(d, f));
        }

        #[test]
        fn f_prime_scales_with_unramified_extension(
            cases in proptest::collection::vec(0usize..3, 1..4),
            reps in 1usize..4,
        ) {
            // each case picks one row of the table for (d1, d2) = (1, 2)
            let pick = |c: usize| match c { 0 => (0, 0), 1 => (1, 2), _ => (0, 2) };
            let f1: Vec<usize> = cases.iter().map(|&c| pick(c).0).collect();
            let f2: Vec<usize> = cases.iter().map(|&c| pick(c).1).collect();
            let base = two_slope_report(&ELType { d: 1, f: f1.clone() }, &ELType { d: 2, f: f2.clone() }).unwrap();
            let ext = two_slope_report(
                &ELType { d: 1, f: f1.repeat(reps) },
                &ELType { d: 2, f: f2.repeat(reps) },
            ).unwrap();
            let sum = |v: &[u8]| v.iter().map(|&x| x as usize).sum::<usize>();
            prop_assert_eq!(sum(&ext.f_prime), reps * sum(&base.f_prime));
        }
    }
}
