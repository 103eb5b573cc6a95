//! Hodge-Newton reducibility, Levi partitions and the Hodge-Newton
//! decomposition of EL crystals.

use serde::{Deserialize, Serialize};

use crate::eltype::{el_newton, el_sigma_hodge, el_type, el_validate, ELStructure, ELType};
use crate::error::{Error, Result};
use crate::isocrystal::{split_at_cuts, stored_newton};
use crate::polygon::{contact_break_points, lies_above, ConvexPolygon};
use crate::wittring::WittMatrix;

/// Block sizes (n_1, ..., n_r) of a standard Levi, r ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LeviPartition {
    sizes: Vec<usize>,
}

impl LeviPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "a Levi partition needs at least two positive parts, got {sizes:?}"
            )));
        }
        Ok(LeviPartition { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Interior cut points j_1 < ... < j_{r-1}.
    pub fn cuts(&self) -> Vec<usize> {
        self.sizes[..self.sizes.len() - 1]
            .iter()
            .scan(0, |acc, &k| {
                *acc += k;
                Some(*acc)
            })
            .collect()
    }

    fn from_cuts(cuts: &[usize], total: usize) -> Self {
        let mut sizes = Vec::with_capacity(cuts.len() + 1);
        let mut prev = 0;
        for &c in cuts.iter().chain(std::iter::once(&total)) {
            sizes.push(c - prev);
            prev = c;
        }
        LeviPartition { sizes }
    }
}

#[derive(Debug, Clone)]
pub struct HNFactor {
    pub nu: ConvexPolygon,
    pub mu_bar: ConvexPolygon,
    pub el_type: ELType,
    pub structure: ELStructure,
    /// Columns spanning the factor inside the original module.
    pub basis: WittMatrix,
}

#[derive(Debug, Clone)]
pub struct HNReport {
    pub partition: LeviPartition,
    pub factors: Vec<HNFactor>,
    pub isogeny_denominator: u32,
}

fn check_partition(nu: &ConvexPolygon, mu_bar: &ConvexPolygon, part: &LeviPartition) -> Result<()> {
    if nu.height() != mu_bar.height() {
        return Err(Error::HeightMismatch(nu.height(), mu_bar.height()));
    }
    if part.total() != nu.height() {
        return Err(Error::HeightMismatch(part.total(), nu.height()));
    }
    Ok(())
}

/// Partial sums of ν and μ̄ agree at every cut, and ν breaks strictly there.
pub fn hn_reducible(nu: &ConvexPolygon, mu_bar: &ConvexPolygon, part: &LeviPartition) -> Result<bool> {
    check_partition(nu, mu_bar, part)?;
    let (ns, ms) = (nu.partial_sums(), mu_bar.partial_sums());
    let slopes = nu.slopes();
    Ok(part.cuts().into_iter().all(|j| ns[j] == ms[j] && slopes[j - 1] < slopes[j]))
}

/// The finest partition cutting at every contact break point, if any.
pub fn hn_levis(nu: &ConvexPolygon, mu_bar: &ConvexPolygon) -> Result<Option<LeviPartition>> {
    let cuts = contact_break_points(nu, mu_bar)?;
    if cuts.is_empty() {
        return Ok(None);
    }
    Ok(Some(LeviPartition::from_cuts(&cuts, nu.height())))
}

/// Splits an HN-reducible EL crystal along the partition. Factor k carries
/// the slopes of ν between cuts k-1 and k, with the inherited grading.
pub fn hn_decompose(sx: &ELStructure, part: &LeviPartition) -> Result<HNReport> {
    let nu = el_newton(sx)?;
    let mu_bar = el_sigma_hodge(&el_type(sx)?);
    if !hn_reducible(&nu, &mu_bar, part)? {
        return Err(Error::NotHNReducible);
    }
    let x = sx.crystal();
    let m = sx.m();
    let plain = stored_newton(x)?;
    let segment_ends: Vec<usize> = plain
        .segments()
        .iter()
        .scan(0, |acc, &(_, k)| {
            *acc += k;
            Some(*acc)
        })
        .collect();
    let cuts = part
        .cuts()
        .into_iter()
        .map(|j| {
            segment_ends
                .iter()
                .position(|&e| e == j * m)
                .map(|t| t + 1)
                .ok_or_else(|| Error::InvariantViolation(format!("cut {j} is not a break of the Newton polygon")))
        })
        .collect::<Result<Vec<_>>>()?;
    let (pieces, denom, _guard) = split_at_cuts(x, sx.grading(), m, &cuts)?;

    let mut factors = Vec::with_capacity(pieces.len());
    for piece in pieces {
        let structure = el_validate(&piece.crystal, m, &piece.grading)?;
        let ty = el_type(&structure)?;
        let factor_nu = el_newton(&structure)?;
        let factor_mu = el_sigma_hodge(&ty);
        if factor_nu.total_rise() != factor_mu.total_rise() || !lies_above(&factor_nu, &factor_mu)? {
            return Err(Error::InvariantViolation(format!(
                "factor with ν = {factor_nu} and μ̄ = {factor_mu} is not tight"
            )));
        }
        factors.push(HNFactor { nu: factor_nu, mu_bar: factor_mu, el_type: ty, structure, basis: piece.basis });
    }
    let nus: Vec<ConvexPolygon> = factors.iter().map(|f| f.nu.clone()).collect();
    let mus: Vec<ConvexPolygon> = factors.iter().map(|f| f.mu_bar.clone()).collect();
    if ConvexPolygon::concat(&nus) != nu || ConvexPolygon::concat(&mus) != mu_bar {
        return Err(Error::InvariantViolation("factor polygons do not concatenate to ν and μ̄".into()));
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.nu.height()).collect();
    if sizes != part.sizes() {
        return Err(Error::InvariantViolation(format!("factor heights {sizes:?} differ from the partition")));
    }
    Ok(HNReport { partition: part.clone(), factors, isogeny_denominator: denom })
}

/// Groups weight-space labels 0..k into σ-orbits. `dims[l]` is the dimension
/// of the weight space labelled l and `sigma[l]` its image under σ. Returns
/// (orbit size m_j, common dimension n_j) per orbit, ordered by the smallest
/// label in the orbit.
pub fn el_realization(dims: &[usize], sigma: &[usize]) -> Result<Vec<(usize, usize)>> {
    let k = dims.len();
    if sigma.len() != k {
        return Err(Error::DimensionMismatch(format!("{} dimensions but σ acts on {} labels", k, sigma.len())));
    }
    let mut seen = vec![false; k];
    for &t in sigma {
        if t >= k || seen[t] {
            return Err(Error::InvalidInput(format!("σ = {sigma:?} is not a permutation of 0..{k}")));
        }
        seen[t] = true;
    }
    let mut visited = vec![false; k];
    let mut out = Vec::new();
    for start in 0..k {
        if visited[start] {
            continue;
        }
        let mut size = 0;
        let mut l = start;
        while !visited[l] {
            visited[l] = true;
            if dims[l] != dims[start] {
                return Err(Error::InconsistentOrbit(format!(
                    "labels {start} and {l} lie in one σ-orbit with dimensions {} and {}",
                    dims[start], dims[l]
                )));
            }
            size += 1;
            l = sigma[l];
        }
        out.push((size, dims[start]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eltype::is_mu_ordinary;
    use crate::isocrystal::FCrystal;
    use crate::polygon::Rational;
    use crate::wittring::WittRing;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn poly(v: &[(i64, i64)]) -> ConvexPolygon {
        ConvexPolygon::from_slopes(v.iter().map(|&(a, b)| r(a, b)))
    }

    fn part(v: &[usize]) -> LeviPartition {
        LeviPartition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn partitions() {
        assert_eq!(part(&[1, 2, 1]).cuts(), vec![1, 3]);
        assert!(LeviPartition::new(vec![3]).is_err());
        assert!(LeviPartition::new(vec![1, 0]).is_err());
    }

    #[test]
    fn reducibility_examples() {
        let a = poly(&[(0, 1), (1, 2)]);
        assert!(hn_reducible(&a, &a, &part(&[1, 1])).unwrap());
        let ss = poly(&[(1, 2), (1, 2)]);
        assert!(!hn_reducible(&ss, &poly(&[(0, 1), (1, 1)]), &part(&[1, 1])).unwrap());
        let flat = poly(&[(0, 1), (0, 1), (1, 1)]);
        assert!(!hn_reducible(&flat, &flat, &part(&[1, 2])).unwrap());
        assert!(hn_reducible(&flat, &flat, &part(&[2, 1])).unwrap());
        assert_eq!(hn_reducible(&a, &flat, &part(&[1, 1])), Err(Error::HeightMismatch(2, 3)));
    }

    #[test]
    fn levi_examples() {
        let a = poly(&[(0, 1), (1, 2)]);
        assert_eq!(hn_levis(&a, &a).unwrap(), Some(part(&[1, 1])));
        assert_eq!(hn_levis(&poly(&[(1, 2), (1, 2)]), &poly(&[(0, 1), (1, 1)])).unwrap(), None);
        let b = poly(&[(0, 1), (1, 2), (1, 1)]);
        assert_eq!(hn_levis(&b, &b).unwrap(), Some(part(&[1, 1, 1])));
    }

    fn f5(g: Option<&WittMatrix>) -> ELStructure {
        let w = WittRing::new(3, 2, 16).unwrap();
        let b = WittMatrix::from_ints(&w, &[&[0, 3, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
        let mut x = FCrystal::new(b).unwrap();
        if let Some(g) = g {
            x = crate::isocrystal::sigma_conjugate(&x, g).unwrap();
        }
        el_validate(&x, 2, &[0, 1, 0, 1]).unwrap()
    }

    #[test]
    fn decomposition_of_the_two_slope_fixture() {
        let rep = hn_decompose(&f5(None), &part(&[1, 1])).unwrap();
        assert_eq!(rep.factors.len(), 2);
        assert_eq!(rep.factors[0].nu, poly(&[(0, 1)]));
        assert_eq!(rep.factors[0].mu_bar, poly(&[(0, 1)]));
        assert_eq!(rep.factors[1].nu, poly(&[(1, 2)]));
        assert_eq!(rep.factors[1].mu_bar, poly(&[(1, 2)]));
        assert_eq!(rep.factors[0].el_type, ELType::new(1, vec![0, 0]).unwrap());
        assert_eq!(rep.factors[1].el_type, ELType::new(1, vec![1, 0]).unwrap());
        assert_eq!(rep.isogeny_denominator, 0);
        assert!(rep.factors.iter().all(|f| is_mu_ordinary(&f.structure).unwrap()));
    }

    #[test]
    fn decomposition_survives_graded_scrambling() {
        // unit matrix preserving the grading [0, 1, 0, 1]
        let w = WittRing::new(3, 2, 16).unwrap();
        let t = w.theta();
        let mut g = WittMatrix::identity(&w, 4);
        g.set(0, 2, w.from_int(2));
        g.set(2, 0, t.clone());
        g.set(1, 3, &t + &w.from_int(3));
        g.set(3, 3, w.from_int(4));
        let rep = hn_decompose(&f5(Some(&g)), &part(&[1, 1])).unwrap();
        assert_eq!(rep.factors[0].nu, poly(&[(0, 1)]));
        assert_eq!(rep.factors[1].nu, poly(&[(1, 2)]));
        assert_eq!(rep.factors[1].el_type, ELType::new(1, vec![1, 0]).unwrap());
    }

    #[test]
    fn supersingular_is_not_reducible() {
        let z = WittRing::new(3, 1, 16).unwrap();
        let x = FCrystal::new(WittMatrix::from_ints(&z, &[&[0, 3], &[1, 0]])).unwrap();
        let sx = ELStructure::trivial(x);
        assert!(matches!(hn_decompose(&sx, &part(&[1, 1])), Err(Error::NotHNReducible)));
    }

    #[test]
    fn realization_examples() {
        assert_eq!(el_realization(&[3, 3], &[1, 0]).unwrap(), vec![(2, 3)]);
        assert_eq!(el_realization(&[2, 5, 1], &[0, 1, 2]).unwrap(), vec![(1, 2), (1, 5), (1, 1)]);
        assert!(matches!(el_realization(&[2, 3], &[1, 0]), Err(Error::InconsistentOrbit(_))));
        assert!(el_realization(&[1, 1], &[0, 0]).is_err());
    }

    #[test]
    fn realization_is_equivariant() {
        // relabel by τ commuting with σ = (0 1)(2 3): τ = (0 2)(1 3)
        let dims = [2, 2, 4, 4];
        let sigma = [1, 0, 3, 2];
        let tau = [2, 3, 0, 1];
        let mut relabelled = [0; 4];
        for l in 0..4 {
            relabelled[tau[l]] = dims[l];
        }
        let mut a = el_realization(&dims, &sigma).unwrap();
        let mut b = el_realization(&relabelled, &sigma).unwrap();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
