//! F-crystals given by a Frobenius matrix b, with F = b∘σ on the standard
//! basis of M = W^n. Columns of b are the images F(e_j).
//!
//! A crystal may carry a p-power denominator (`shift`): the Frobenius is then
//! p^{-shift}·b. This appears after σ-conjugating by non-integral elements.

mod decompose;

pub use decompose::{slope_decomposition, Decomposition, SlopeComponent};
pub(crate) use decompose::split_at_cuts;

use crate::error::{Error, Result};
use crate::polygon::{ConvexPolygon, KottwitzPoint, Rational};
use crate::wittring::poly::Poly;
use crate::wittring::{linalg, Valuation, WittMatrix, WittRing};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FCrystal {
    b: WittMatrix,
    shift: u32,
    crystal: bool,
}

impl FCrystal {
    /// An F-isocrystal with integral Frobenius matrix `b`.
    pub fn new(b: WittMatrix) -> Result<Self> {
        Self::with_shift(b, 0)
    }

    /// Frobenius p^{-shift}·b.
    pub fn with_shift(b: WittMatrix, shift: u32) -> Result<Self> {
        if !b.is_square() || b.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "Frobenius matrix must be square and nonempty, got {}x{}",
                b.rows(),
                b.cols()
            )));
        }
        if linalg::det(&b).val() == Valuation::AtLeastPrecision {
            return Err(Error::NotInvertible);
        }
        Ok(FCrystal { b, shift, crystal: false })
    }

    /// An F-crystal: b integral with every elementary-divisor exponent at
    /// most `hodge_bound` (1 for p M ⊂ F M ⊂ M).
    pub fn new_crystal(b: WittMatrix, hodge_bound: u32) -> Result<Self> {
        let mut x = Self::new(b)?;
        let exps = linalg::elementary_divisors(&x.b)?;
        if let Some(&e) = exps.iter().find(|&&e| e > hodge_bound) {
            return Err(Error::InvalidInput(format!(
                "elementary divisor p^{e} exceeds the Hodge bound {hodge_bound}"
            )));
        }
        x.crystal = true;
        Ok(x)
    }

    pub fn ring(&self) -> &WittRing {
        self.b.ring()
    }

    pub fn height(&self) -> usize {
        self.b.rows()
    }

    /// Stored integral matrix (the Frobenius is p^{-shift} times this).
    pub fn matrix(&self) -> &WittMatrix {
        &self.b
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn is_crystal(&self) -> bool {
        self.crystal
    }

    /// Effective precision N of the stored matrix.
    pub fn precision(&self) -> u32 {
        self.ring().precision()
    }

    pub fn reduce_to(&self, ring: &WittRing) -> Result<Self> {
        let mut x = Self::with_shift(self.b.reduce_to(ring), self.shift)?;
        x.crystal = self.crystal;
        Ok(x)
    }

    pub(crate) fn set_crystal_flag(&mut self, flag: bool) {
        self.crystal = flag;
    }

    /// Φ = b·σ(b)·…·σ^{s-1}(b), the matrix of the linear map F^s.
    pub fn frobenius_power_matrix(&self) -> WittMatrix {
        let s = self.ring().s();
        let mut acc = self.b.clone();
        for k in 1..s {
            acc = &acc * &self.b.frobenius_pow(k);
        }
        acc
    }
}

/// Slopes (with multiplicity) of the lower convex hull of the points
/// (j, val(e_j)), where e_j is the coefficient of x^{n-j} in `chi`.
pub(crate) fn hull_slopes(chi: &Poly) -> Result<Vec<Rational>> {
    let n = chi.len() - 1;
    let prec = chi[0].ring().precision() as i64;
    let vals: Vec<Option<i64>> = (0..=n).map(|j| chi[n - j].val().finite().map(i64::from)).collect();
    if vals[n].is_none() {
        return Err(Error::exhausted("determinant vanishes at working precision"));
    }
    let known: Vec<(i64, i64)> =
        vals.iter().enumerate().filter_map(|(j, v)| v.map(|v| (j as i64, v))).collect();
    // lower hull, monotone chain
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &known {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point if it is on or above the segment to pt
            if (y2 - y1) * (pt.0 - x1) >= (pt.1 - y1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut slopes = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let slope = Rational::new(y2 - y1, x2 - x1);
        for j in x1..x2 {
            // an unknown coefficient (valuation ≥ N) could only matter if
            // the hull reaches N at its abscissa
            if vals[j as usize].is_none() {
                let hull_at = Rational::from_integer(y1) + slope * Rational::from_integer(j - x1);
                if Rational::from_integer(prec) <= hull_at {
                    return Err(Error::exhausted(format!(
                        "coefficient {j} of the characteristic polynomial is unknown below the hull"
                    )));
                }
            }
        }
        slopes.extend(std::iter::repeat_n(slope, (x2 - x1) as usize));
    }
    Ok(slopes)
}

/// Newton slopes of the stored integral matrix (ignoring the shift).
pub(crate) fn stored_newton(x: &FCrystal) -> Result<ConvexPolygon> {
    let phi = x.frobenius_power_matrix();
    let chi = linalg::charpoly(&phi);
    let s = Rational::from_integer(x.ring().s() as i64);
    Ok(ConvexPolygon::from_slopes(hull_slopes(&chi)?.into_iter().map(|v| v / s)))
}

/// Newton polygon of the F-isocrystal, slopes normalised by 1/s.
pub fn newton_polygon(x: &FCrystal) -> Result<ConvexPolygon> {
    Ok(stored_newton(x)?.shifted(-Rational::from_integer(x.shift as i64)))
}

/// Hodge polygon: elementary-divisor exponents of b.
pub fn hodge_polygon(x: &FCrystal) -> Result<ConvexPolygon> {
    let exps = linalg::elementary_divisors(&x.b)?;
    Ok(ConvexPolygon::from_integers(&exps.iter().map(|&e| e as i64 - x.shift as i64).collect::<Vec<_>>()))
}

/// Kottwitz point of GL_n: val(det b).
pub fn kottwitz_point(x: &FCrystal) -> Result<KottwitzPoint> {
    let v = linalg::det(&x.b)
        .val()
        .finite()
        .ok_or_else(|| Error::exhausted("determinant vanishes at working precision"))?;
    Ok(KottwitzPoint::gl(v as i64 - (x.height() as i64) * x.shift as i64))
}

/// b' = g·b·σ(g)^{-1}. Digits lost to the inverse are removed from the
/// resulting crystal's precision; non-integral results carry a shift.
pub fn sigma_conjugate(x: &FCrystal, g: &WittMatrix) -> Result<FCrystal> {
    if g.rows() != x.height() || !g.is_square() {
        return Err(Error::DimensionMismatch("conjugating matrix has the wrong size".into()));
    }
    if g.ring() != x.ring() {
        return Err(Error::RingMismatch);
    }
    let sg = g.frobenius();
    let d = linalg::det(&sg);
    let e = d.val().finite().ok_or(Error::NotInvertible)?;
    let prec = x.precision();
    if e >= prec {
        return Err(Error::NotInvertible);
    }
    let unit_inv = d.div_p_pow(e).inverse()?;
    let m = (&(g * &x.b) * &linalg::adjugate(&sg)).scale(&unit_inv);
    let t = match m.min_val() {
        Valuation::Finite(v) => v.min(e),
        Valuation::AtLeastPrecision => e,
    };
    let ring = x.ring().with_precision(prec - t)?;
    let stored = m.map(|v| v.div_p_pow(t)).reduce_to(&ring);
    let mut out = FCrystal::with_shift(stored, x.shift + (e - t))?;
    out.crystal = x.crystal && e == 0;
    Ok(out)
}

/// Minimal precision guard for slope separation: n times the largest slope
/// numerator.
pub(crate) fn precision_guard(n: usize, slopes: &ConvexPolygon) -> u32 {
    let max_num = slopes.slopes().iter().map(|s| s.numer().abs()).max().unwrap_or(0);
    (n as i64 * max_num) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ring(p: u64, s: usize) -> WittRing {
        WittRing::new(p, s, 8).unwrap()
    }

    #[test]
    fn hodge_examples() {
        let z3 = ring(3, 1);
        for n in 1..4 {
            let x = FCrystal::new(WittMatrix::identity(&z3, n)).unwrap();
            assert_eq!(hodge_polygon(&x).unwrap(), ConvexPolygon::from_integers(&vec![0; n]));
        }
        let x = FCrystal::new(WittMatrix::from_ints(&z3, &[&[1, 0], &[0, 3]])).unwrap();
        assert_eq!(hodge_polygon(&x).unwrap(), ConvexPolygon::from_integers(&[0, 1]));
        let x = FCrystal::new(WittMatrix::from_ints(&z3, &[&[0, 3], &[1, 0]])).unwrap();
        assert_eq!(hodge_polygon(&x).unwrap(), ConvexPolygon::from_integers(&[0, 1]));
    }

    #[test]
    fn newton_examples() {
        let z3 = ring(3, 1);
        let x = FCrystal::new(WittMatrix::from_ints(&z3, &[&[1, 0], &[0, 3]])).unwrap();
        assert_eq!(newton_polygon(&x).unwrap(), ConvexPolygon::from_integers(&[0, 1]));
        let x = FCrystal::new(WittMatrix::from_ints(&z3, &[&[0, 3], &[1, 0]])).unwrap();
        assert_eq!(newton_polygon(&x).unwrap(), ConvexPolygon::from_slopes([r(1, 2), r(1, 2)]));
        for s in 1..=3 {
            let w = ring(3, s);
            let x = FCrystal::new(WittMatrix::identity(&w, 3)).unwrap();
            assert_eq!(newton_polygon(&x).unwrap(), ConvexPolygon::from_integers(&[0, 0, 0]));
        }
    }

    #[test]
    fn kottwitz_examples() {
        let z3 = ring(3, 1);
        let k = |rows: &[&[i64]]| kottwitz_point(&FCrystal::new(WittMatrix::from_ints(&z3, rows)).unwrap()).unwrap();
        assert_eq!(k(&[&[1, 0], &[0, 1]]), KottwitzPoint::gl(0));
        assert_eq!(k(&[&[1, 0], &[0, 3]]), KottwitzPoint::gl(1));
        assert_eq!(k(&[&[0, 3], &[1, 0]]), KottwitzPoint::gl(1));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let z3 = ring(3, 1);
        assert_eq!(FCrystal::new(WittMatrix::from_ints(&z3, &[&[1, 1], &[1, 1]])), Err(Error::NotInvertible));
    }

    #[test]
    fn crystal_flag_checks_hodge_bound() {
        let z3 = ring(3, 1);
        assert!(FCrystal::new_crystal(WittMatrix::from_ints(&z3, &[&[1, 0], &[0, 3]]), 1).is_ok());
        assert!(FCrystal::new_crystal(WittMatrix::from_ints(&z3, &[&[1, 0], &[0, 9]]), 1).is_err());
    }

    #[test]
    fn slopes_stable_under_residue_extension() {
        let rows: &[&[i64]] = &[&[0, 0, 3], &[1, 0, 0], &[0, 1, 0]];
        let a = newton_polygon(&FCrystal::new(WittMatrix::from_ints(&ring(3, 1), rows)).unwrap()).unwrap();
        let b = newton_polygon(&FCrystal::new(WittMatrix::from_ints(&ring(3, 2), rows)).unwrap()).unwrap();
        assert_eq!(a, ConvexPolygon::from_slopes([r(1, 3), r(1, 3), r(1, 3)]));
        assert_eq!(a, b);
    }

    #[test]
    fn sigma_conjugate_by_identity_and_diagonal() {
        let z3 = ring(3, 1);
        let x = FCrystal::new(WittMatrix::from_ints(&z3, &[&[1, 0], &[0, 3]])).unwrap();
        assert_eq!(sigma_conjugate(&x, &WittMatrix::identity(&z3, 2)).unwrap(), x);
        let g = WittMatrix::from_ints(&z3, &[&[3, 0], &[0, 1]]);
        let y = sigma_conjugate(&x, &g).unwrap();
        assert_eq!(y.shift(), 0);
        // one digit lost to the inverse of g
        assert_eq!(y.precision(), 7);
        assert_eq!(y.matrix(), &WittMatrix::from_ints(y.ring(), &[&[1, 0], &[0, 3]]));
    }

    #[test]
    fn sigma_conjugate_can_leave_integrality() {
        let z3 = ring(3, 1);
        let x = FCrystal::new(WittMatrix::from_ints(&z3, &[&[0, 3], &[1, 0]])).unwrap();
        let g = WittMatrix::from_ints(&z3, &[&[3, 0], &[0, 1]]);
        // g b g^{-1} = [[0, 9], [1/3, 0]] = 3^{-1}·[[0, 27], [1, 0]]
        let y = sigma_conjugate(&x, &g).unwrap();
        assert_eq!(y.shift(), 1);
        assert_eq!(newton_polygon(&y).unwrap(), newton_polygon(&x).unwrap());
        assert_eq!(kottwitz_point(&y).unwrap(), KottwitzPoint::gl(1));
        assert_eq!(hodge_polygon(&y).unwrap(), ConvexPolygon::from_integers(&[-1, 2]));
    }

    #[test]
    fn unit_conjugation_preserves_invariants() {
        let w = WittRing::new(3, 2, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let b = WittMatrix::random(&w, 3, 3, &mut rng);
            let Ok(x) = FCrystal::new(b) else { continue };
            let Ok(nx) = newton_polygon(&x) else { continue };
            let g = WittMatrix::random_unit(&w, 3, &mut rng);
            let y = sigma_conjugate(&x, &g).unwrap();
            assert_eq!(y.precision(), 12);
            assert_eq!(newton_polygon(&y).unwrap(), nx);
            assert_eq!(kottwitz_point(&y).unwrap(), kottwitz_point(&x).unwrap());
        }
    }

    #[test]
    fn hull_refuses_when_determinant_vanishes() {
        let w = WittRing::new(3, 1, 2).unwrap();
        let x = FCrystal::new(WittMatrix::from_ints(&w, &[&[1, 0], &[0, 3]])).unwrap();
        assert!(newton_polygon(&x).is_ok());
        // det = 9 ≡ 0 mod 3^2 is rejected at construction
        assert_eq!(FCrystal::new(WittMatrix::from_ints(&w, &[&[3, 0], &[0, 3]])), Err(Error::NotInvertible));
        // over F_9 the same b has det Φ = 9, invisible at precision 2
        let w2 = WittRing::new(3, 2, 2).unwrap();
        let x2 = FCrystal::new(WittMatrix::from_ints(&w2, &[&[1, 0], &[0, 3]])).unwrap();
        assert!(matches!(newton_polygon(&x2), Err(Error::PrecisionExhausted(_))));
    }
}
