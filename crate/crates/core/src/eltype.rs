//! O_E-module (EL) structures on F-crystals.
//!
//! An unramified O_E of degree m acts through a Z/m-grading M = ⊕ M_i of the
//! stored basis, and F maps M_i into M_{i+1}. The type (d, f) records the
//! common rank d of the pieces and the cokernel ranks f(i) of the blocks
//! F_{i-1}: M_{i-1} → M_i.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isocrystal::{newton_polygon, FCrystal};
use crate::polygon::{lies_above, ConvexPolygon, KottwitzPoint, Rational};
use crate::wittring::{linalg, WittMatrix};

/// Largest d·m accepted by [`b_set`].
pub const BSET_BUDGET: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ELStructure {
    crystal: FCrystal,
    m: usize,
    grading: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ELType {
    pub d: usize,
    pub f: Vec<usize>,
}

impl ELType {
    pub fn new(d: usize, f: Vec<usize>) -> Result<Self> {
        if d == 0 || f.is_empty() {
            return Err(Error::InvalidInput("type needs d >= 1 and m >= 1".into()));
        }
        if let Some(&bad) = f.iter().find(|&&x| x > d) {
            return Err(Error::InvalidInput(format!("f value {bad} exceeds d = {d}")));
        }
        Ok(ELType { d, f })
    }

    pub fn m(&self) -> usize {
        self.f.len()
    }
}

impl ELStructure {
    pub fn crystal(&self) -> &FCrystal {
        &self.crystal
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn grading(&self) -> &[usize] {
        &self.grading
    }

    /// Rank of each graded piece.
    pub fn d(&self) -> usize {
        self.crystal.height() / self.m
    }

    /// Basis indices of the graded piece M_i, in order.
    pub fn piece(&self, i: usize) -> Vec<usize> {
        piece_indices(&self.grading, i)
    }

    /// The trivial structure (m = 1).
    pub fn trivial(x: FCrystal) -> Self {
        let n = x.height();
        ELStructure { crystal: x, m: 1, grading: vec![0; n] }
    }
}

fn piece_indices(grading: &[usize], i: usize) -> Vec<usize> {
    (0..grading.len()).filter(|&k| grading[k] == i).collect()
}

/// Checks the block shape of b against the grading.
pub fn el_validate(x: &FCrystal, m: usize, grading: &[usize]) -> Result<ELStructure> {
    let s = x.ring().s();
    if m == 0 || !s.is_multiple_of(m) {
        return Err(Error::DegreeMismatch { m, s });
    }
    let n = x.height();
    if grading.len() != n {
        return Err(Error::InvalidGrading(format!("grading has {} entries for height {n}", grading.len())));
    }
    if let Some(&bad) = grading.iter().find(|&&g| g >= m) {
        return Err(Error::InvalidGrading(format!("grading index {bad} is outside Z/{m}")));
    }
    let ranks: Vec<usize> = (0..m).map(|i| piece_indices(grading, i).len()).collect();
    if ranks.iter().any(|&r| r != ranks[0]) {
        return Err(Error::InvalidGrading(format!("graded pieces have unequal ranks {ranks:?}")));
    }
    let b = x.matrix();
    for r in 0..n {
        for c in 0..n {
            if grading[r] != (grading[c] + 1) % m && !b.get(r, c).is_zero() {
                return Err(Error::InvalidGrading(format!(
                    "entry ({r}, {c}) maps M_{} into M_{}, expected M_{}",
                    grading[c],
                    grading[r],
                    (grading[c] + 1) % m
                )));
            }
        }
    }
    Ok(ELStructure { crystal: x.clone(), m, grading: grading.to_vec() })
}

/// The block of b mapping M_{i-1} into M_i.
pub fn el_block(sx: &ELStructure, i: usize) -> WittMatrix {
    let m = sx.m;
    let rows = sx.piece(i % m);
    let cols = sx.piece((i + m - 1) % m);
    sx.crystal.matrix().submatrix(&rows, &cols)
}

pub fn el_type(sx: &ELStructure) -> Result<ELType> {
    if sx.crystal.shift() != 0 {
        return Err(Error::InvalidInput("the type is defined for integral Frobenius matrices".into()));
    }
    let f = (0..sx.m)
        .map(|i| Ok(linalg::elementary_divisors(&el_block(sx, i))?.iter().filter(|&&e| e >= 1).count()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ELType { d: sx.d(), f })
}

/// Plain Newton polygon with every multiplicity divided by m.
pub fn el_newton(sx: &ELStructure) -> Result<ConvexPolygon> {
    let plain = newton_polygon(&sx.crystal)?;
    let mut segments = Vec::new();
    for (slope, k) in plain.segments() {
        if k % sx.m != 0 {
            return Err(Error::MultiplicityViolation(format!(
                "slope {slope} occurs {k} times, not a multiple of m = {}",
                sx.m
            )));
        }
        segments.push((slope, k / sx.m));
    }
    Ok(ConvexPolygon::from_segments(&segments))
}

/// μ̄: slopes (1/m)·#{i : f(i) > d - j} for j = 1..d.
pub fn el_sigma_hodge(t: &ELType) -> ConvexPolygon {
    let m = t.m() as i64;
    ConvexPolygon::from_slopes((1..=t.d).map(|j| {
        let count = t.f.iter().filter(|&&fi| fi > t.d - j).count() as i64;
        Rational::new(count, m)
    }))
}

pub fn is_mu_ordinary(sx: &ELStructure) -> Result<bool> {
    Ok(el_newton(sx)? == el_sigma_hodge(&el_type(sx)?))
}

/// Kottwitz point of the EL factor: val det b, with val det b / m alongside.
pub fn el_kottwitz(sx: &ELStructure) -> Result<KottwitzPoint> {
    let v = linalg::det(sx.crystal.matrix())
        .val()
        .finite()
        .ok_or_else(|| Error::exhausted("determinant vanishes at working precision"))?;
    let n = sx.crystal.height() as i64;
    Ok(KottwitzPoint::el(v as i64 - n * sx.crystal.shift() as i64, sx.m))
}

/// B(G, {μ}) for the type: convex polygons ν of height d with the rise of μ̄,
/// ν ⪯ μ̄, and the Manin denominator law after scaling multiplicities by m.
/// Ordered by increasing sum of partial sums, so μ̄ comes first.
pub fn b_set(t: &ELType) -> Result<Vec<ConvexPolygon>> {
    let (d, m) = (t.d, t.m());
    if d * m > BSET_BUDGET {
        return Err(Error::BudgetExceeded(format!("d·m = {} exceeds {BSET_BUDGET}", d * m)));
    }
    let mu = el_sigma_hodge(t);
    let lo = mu.slopes()[0];
    let hi = *mu.slopes().last().unwrap();
    let max_q = (d * m) as i64;
    let mut candidates: Vec<Rational> = Vec::new();
    for q in 1..=max_q {
        let start = (lo * Rational::from_integer(q)).ceil().to_integer();
        let end = (hi * Rational::from_integer(q)).floor().to_integer();
        for a in start..=end {
            let r = Rational::new(a, q);
            if *r.denom() == q {
                candidates.push(r);
            }
        }
    }
    candidates.sort();

    let mu_sums = mu.partial_sums();
    let mut out = Vec::new();
    let mut segs: Vec<(Rational, usize)> = Vec::new();
    extend(&candidates, 0, 0, Rational::zero(), d, m, &mu_sums, &mut segs, &mut out);

    let weight = |p: &ConvexPolygon| p.partial_sums().iter().fold(Rational::zero(), |a, b| a + b);
    out.sort_by(|a, b| weight(a).cmp(&weight(b)).then_with(|| a.slopes().cmp(b.slopes())));
    debug_assert!(out.first() == Some(&mu));
    Ok(out)
}

/// Depth-first search over segments (slope, multiplicity) with strictly
/// increasing slopes, keeping partial sums on or above μ̄ at every vertex.
#[allow(clippy::too_many_arguments)]
fn extend(
    candidates: &[Rational],
    from: usize,
    len: usize,
    sum: Rational,
    d: usize,
    m: usize,
    mu_sums: &[Rational],
    segs: &mut Vec<(Rational, usize)>,
    out: &mut Vec<ConvexPolygon>,
) {
    if len == d {
        if sum == mu_sums[d] {
            out.push(ConvexPolygon::from_segments(segs));
        }
        return;
    }
    for (idx, &slope) in candidates.iter().enumerate().skip(from) {
        // the remaining slopes are all at least `slope`
        if sum + slope * Rational::from_integer((d - len) as i64) > mu_sums[d] {
            break;
        }
        let q = *slope.denom() as usize;
        let step = q / num_integer::gcd(q, m);
        let mut k = step;
        while len + k <= d {
            let end = sum + slope * Rational::from_integer(k as i64);
            if end >= mu_sums[len + k] {
                segs.push((slope, k));
                extend(candidates, idx + 1, len + k, end, d, m, mu_sums, segs, out);
                segs.pop();
            }
            k += step;
        }
    }
}

/// Convenience check used by tests and the self-test: ν ⪯ μ̄ for the
/// structure's own type.
pub fn el_mazur(sx: &ELStructure) -> Result<bool> {
    lies_above(&el_newton(sx)?, &el_sigma_hodge(&el_type(sx)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wittring::WittRing;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn f4() -> ELStructure {
        let w = WittRing::new(3, 2, 8).unwrap();
        let x = FCrystal::new(WittMatrix::from_ints(&w, &[&[0, 3], &[1, 0]])).unwrap();
        el_validate(&x, 2, &[0, 1]).unwrap()
    }

    fn t(d: usize, f: &[usize]) -> ELType {
        ELType::new(d, f.to_vec()).unwrap()
    }

    #[test]
    fn validation_examples() {
        let sx = f4();
        assert_eq!(sx.piece(0), vec![0]);
        assert_eq!(sx.piece(1), vec![1]);
        let w = WittRing::new(3, 2, 8).unwrap();
        let id = FCrystal::new(WittMatrix::identity(&w, 2)).unwrap();
        assert!(matches!(el_validate(&id, 2, &[0, 0]), Err(Error::InvalidGrading(_))));
        // identity maps M_0 to M_0, violating the block shape
        assert!(matches!(el_validate(&id, 2, &[0, 1]), Err(Error::InvalidGrading(_))));
        let z = WittRing::new(3, 1, 8).unwrap();
        let x = FCrystal::new(WittMatrix::from_ints(&z, &[&[1, 0], &[0, 3]])).unwrap();
        assert!(el_validate(&x, 1, &[0, 0]).is_ok());
        assert_eq!(el_validate(&x, 2, &[0, 1]), Err(Error::DegreeMismatch { m: 2, s: 1 }));
    }

    #[test]
    fn type_examples() {
        assert_eq!(el_type(&f4()).unwrap(), t(1, &[1, 0]));
        let z = WittRing::new(3, 1, 8).unwrap();
        let x = FCrystal::new(WittMatrix::from_ints(&z, &[&[1, 0], &[0, 3]])).unwrap();
        assert_eq!(el_type(&ELStructure::trivial(x)).unwrap(), t(2, &[1]));
        let x = FCrystal::new(WittMatrix::from_ints(&z, &[&[3, 0], &[0, 3]])).unwrap();
        assert_eq!(el_type(&ELStructure::trivial(x)).unwrap(), t(2, &[2]));
    }

    #[test]
    fn newton_examples() {
        assert_eq!(el_newton(&f4()).unwrap(), ConvexPolygon::from_slopes([r(1, 2)]));
        let w = WittRing::new(3, 2, 16).unwrap();
        let b = WittMatrix::from_ints(&w, &[&[0, 3, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
        let x = FCrystal::new(b).unwrap();
        let sx = el_validate(&x, 2, &[0, 1, 0, 1]).unwrap();
        assert_eq!(el_newton(&sx).unwrap(), ConvexPolygon::from_slopes([r(0, 1), r(1, 2)]));
        assert!(is_mu_ordinary(&sx).unwrap());
        assert_eq!(el_type(&sx).unwrap(), t(2, &[1, 0]));
    }

    #[test]
    fn sigma_hodge_examples() {
        assert_eq!(el_sigma_hodge(&t(1, &[1, 0])), ConvexPolygon::from_slopes([r(1, 2)]));
        assert_eq!(el_sigma_hodge(&t(2, &[1])), ConvexPolygon::from_integers(&[0, 1]));
        assert_eq!(el_sigma_hodge(&t(2, &[1, 0])), ConvexPolygon::from_slopes([r(0, 1), r(1, 2)]));
    }

    #[test]
    fn mu_ordinary_examples() {
        assert!(is_mu_ordinary(&f4()).unwrap());
        let z = WittRing::new(3, 1, 8).unwrap();
        let ord = FCrystal::new(WittMatrix::from_ints(&z, &[&[1, 0], &[0, 3]])).unwrap();
        assert!(is_mu_ordinary(&ELStructure::trivial(ord)).unwrap());
        let ss = FCrystal::new(WittMatrix::from_ints(&z, &[&[0, 3], &[1, 0]])).unwrap();
        assert!(!is_mu_ordinary(&ELStructure::trivial(ss)).unwrap());
    }

    #[test]
    fn multiplicity_violation_is_reported() {
        // the étale m = 2 crystal is fine; a structure built without
        // validation on diag(1, p) has slopes of multiplicity one
        let w = WittRing::new(3, 2, 8).unwrap();
        let x = FCrystal::new(WittMatrix::from_ints(&w, &[&[0, 1], &[1, 0]])).unwrap();
        let sx = el_validate(&x, 2, &[0, 1]).unwrap();
        assert_eq!(el_newton(&sx).unwrap(), ConvexPolygon::from_integers(&[0]));
        let y = FCrystal::new(WittMatrix::from_ints(&w, &[&[1, 0], &[0, 3]])).unwrap();
        let forged = ELStructure { crystal: y, m: 2, grading: vec![0, 1] };
        assert!(matches!(el_newton(&forged), Err(Error::MultiplicityViolation(_))));
    }

    #[test]
    fn b_set_examples() {
        assert_eq!(
            b_set(&t(2, &[1])).unwrap(),
            vec![ConvexPolygon::from_integers(&[0, 1]), ConvexPolygon::from_slopes([r(1, 2), r(1, 2)])]
        );
        for f in [vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 1, 1]] {
            let ty = t(1, &f);
            assert_eq!(b_set(&ty).unwrap(), vec![el_sigma_hodge(&ty)]);
        }
        assert_eq!(b_set(&t(2, &[2])).unwrap(), vec![ConvexPolygon::from_integers(&[1, 1])]);
        assert!(matches!(b_set(&t(13, &[1])), Err(Error::BudgetExceeded(_))));
        assert!(matches!(b_set(&t(4, &[1, 2, 3, 0])), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn b_set_of_height_three() {
        // μ̄ = (0, 0, 1): ordinary, then (0, 1/2, 1/2), then (1/3, 1/3, 1/3)
        let got = b_set(&t(3, &[1])).unwrap();
        assert_eq!(
            got,
            vec![
                ConvexPolygon::from_integers(&[0, 0, 1]),
                ConvexPolygon::from_slopes([r(0, 1), r(1, 2), r(1, 2)]),
                ConvexPolygon::from_slopes([r(1, 3), r(1, 3), r(1, 3)]),
            ]
        );
    }
}
