//! Isogeny-level slope decomposition.
//!
//! To separate the slopes up to lo from those from hi on, pass to A = Φ^q with
//! q the least power for which an integer a satisfies q·lo ≤ a < q·hi. The
//! characteristic polynomial χ of A is rescaled to G(y) = χ(p^a y)/p^e; modulo
//! p it is y^k times a polynomial with unit constant term, where k counts the
//! roots above the cut. Hensel lifting that coprime factorisation yields
//! χ = H·L with H carrying exactly the roots of valuation > a. The two
//! components are the saturated images im L(A) and im H(A).
//!
//! Components are polynomials in Φ = F^s, so they are F-stable and respect
//! any O_E-grading (Φ preserves every graded piece when m | s).

use super::{precision_guard, stored_newton, FCrystal};
use crate::error::{Error, Result};
use crate::polygon::{ConvexPolygon, Rational};
use crate::wittring::poly::{self, Poly};
use crate::wittring::{linalg, Valuation, WittMatrix, WittRing};

/// One isoclinic piece of a slope decomposition.
#[derive(Debug, Clone)]
pub struct SlopeComponent {
    pub slope: Rational,
    /// Columns spanning the component inside the original module.
    pub basis: WittMatrix,
    /// Frobenius restricted to the component, in the basis above.
    pub crystal: FCrystal,
    /// Graded piece of each basis column (all zero without an EL grading).
    pub grading: Vec<usize>,
}

impl SlopeComponent {
    pub fn height(&self) -> usize {
        self.crystal.height()
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub components: Vec<SlopeComponent>,
    /// Smallest e with p^e M ⊆ ⊕ components.
    pub isogeny_denominator: u32,
    /// Digits reserved before attempting the split.
    pub guard: u32,
}

/// A sub-crystal produced by splitting, with its basis in the original module.
#[derive(Debug, Clone)]
pub(crate) struct Piece {
    pub basis: WittMatrix,
    pub crystal: FCrystal,
    pub grading: Vec<usize>,
    /// Stored (unshifted) Newton polygon.
    pub newton: ConvexPolygon,
}

/// Splits the crystal into isoclinic components, one per distinct Newton slope.
pub fn slope_decomposition(x: &FCrystal) -> Result<Decomposition> {
    let n = x.height();
    let newton = stored_newton(x)?;
    let cuts: Vec<usize> = (1..newton.segments().len()).collect();
    let (pieces, denom, guard) = split_at_cuts(x, &vec![0; n], 1, &cuts)?;
    let shift = Rational::from_integer(x.shift() as i64);
    let components = pieces
        .into_iter()
        .map(|pc| {
            let slope = pc.newton.slopes()[0] - shift;
            SlopeComponent { slope, basis: pc.basis, crystal: pc.crystal, grading: pc.grading }
        })
        .collect();
    Ok(Decomposition { components, isogeny_denominator: denom, guard })
}

/// Splits between Newton segments: `cuts` lists segment indices t such that
/// a cut is placed between segment t-1 and segment t (ascending).
pub(crate) fn split_at_cuts(
    x: &FCrystal,
    grading: &[usize],
    m: usize,
    cuts: &[usize],
) -> Result<(Vec<Piece>, u32, u32)> {
    let n = x.height();
    let newton = stored_newton(x)?;
    let guard = precision_guard(n, &newton);
    if (x.precision() as i64) - (guard as i64) < 2 {
        return Err(Error::exhausted(format!(
            "precision {} leaves fewer than 2 digits above the guard {}",
            x.precision(),
            guard
        )));
    }
    let segments = newton.segments();
    let mut current = Piece {
        basis: WittMatrix::identity(x.ring(), n),
        crystal: x.clone(),
        grading: grading.to_vec(),
        newton: newton.clone(),
    };
    let mut done = Vec::new();
    for &cut in cuts {
        if cut == 0 || cut >= segments.len() {
            return Err(Error::InvalidInput(format!("cut {cut} is not an interior segment boundary")));
        }
        let low_max = segments[cut - 1].0;
        let high_min = segments[cut].0;
        let (low, high) = split_once(&current, m, low_max, high_min)?;
        done.push(low);
        current = high;
    }
    done.push(current);

    // every component in a common ring for the index computation
    let prec = done.iter().map(|pc| pc.basis.ring().precision()).min().unwrap();
    let ring = x.ring().with_precision(prec)?;
    let mut all = done[0].basis.reduce_to(&ring);
    for pc in &done[1..] {
        all = all.hstack(&pc.basis.reduce_to(&ring));
    }
    let denom = linalg::elementary_divisors(&all)?.into_iter().max().unwrap_or(0);
    Ok((done, denom, guard))
}

/// Smallest q ≥ 1 and integer a with q·lo ≤ a < q·hi.
fn integer_cut(lo: Rational, hi: Rational) -> (i64, i64) {
    let mut q = 1i64;
    loop {
        let qlo = lo * Rational::from_integer(q);
        let a = qlo.ceil().to_integer();
        if Rational::from_integer(a) < hi * Rational::from_integer(q) {
            return (q, a);
        }
        q += 1;
    }
}

fn split_once(piece: &Piece, m: usize, low_max: Rational, high_min: Rational) -> Result<(Piece, Piece)> {
    let x = &piece.crystal;
    let n = x.height();
    let s = x.ring().s() as i64;
    let low_dim = piece.newton.slopes().iter().filter(|&&v| v <= low_max).count();
    let high_dim = n - low_dim;
    let (q, a) = integer_cut(low_max * Rational::from_integer(s), high_min * Rational::from_integer(s));

    let phi = x.frobenius_power_matrix();
    let big_a = phi.pow(q as u32);
    let chi = linalg::charpoly(&big_a);
    let (h, l, ring) = hensel_split(&chi, a, high_dim)?;

    let big_a = big_a.reduce_to(&ring);
    let low_span = poly::eval_matrix(&h, &big_a);
    let high_span = poly::eval_matrix(&l, &big_a);
    let (low_basis, low_loss) = graded_saturation(&low_span, &piece.grading, m, low_dim)?;
    let (high_basis, high_loss) = graded_saturation(&high_span, &piece.grading, m, high_dim)?;
    let loss = low_loss.max(high_loss);
    if ring.precision() <= loss + 1 {
        return Err(Error::exhausted("saturation consumed the precision budget"));
    }
    let out_ring = ring.with_precision(ring.precision() - loss)?;

    let make = |basis: WittMatrix, grading: Vec<usize>| -> Result<Piece> {
        let basis = basis.reduce_to(&out_ring);
        let b = x.matrix().reduce_to(&out_ring);
        let image = &b * &basis.frobenius();
        let left = linalg::left_inverse(&basis)?;
        let restricted = &left * &image;
        if &basis * &restricted != image {
            return Err(Error::NotSeparable("component is not Frobenius-stable at working precision".into()));
        }
        let mut sub = FCrystal::with_shift(restricted, x.shift())?;
        sub.set_crystal_flag(false);
        let newton = stored_newton(&sub)?;
        let parent = piece.basis.reduce_to(&out_ring);
        Ok(Piece { basis: &parent * &basis, crystal: sub, grading, newton })
    };
    let low = make(low_basis.0, low_basis.1)?;
    let high = make(high_basis.0, high_basis.1)?;

    // the split must reproduce the parent's slopes on each side
    let expected_low = ConvexPolygon::from_slopes(piece.newton.slopes()[..low_dim].iter().copied());
    let expected_high = ConvexPolygon::from_slopes(piece.newton.slopes()[low_dim..].iter().copied());
    if low.newton != expected_low || high.newton != expected_high {
        return Err(Error::InvariantViolation(format!(
            "split produced slopes {} and {}, expected {} and {}",
            low.newton, high.newton, expected_low, expected_high
        )));
    }
    Ok((low, high))
}

/// Factors χ = H·L where H is monic of degree k with all roots of valuation
/// > a and L has all roots of valuation ≤ a. Returns (H, L) in the ring of
/// > reduced precision where they are known.
fn hensel_split(chi: &Poly, a: i64, k: usize) -> Result<(Poly, Poly, WittRing)> {
    let n = chi.len() - 1;
    let ring = chi[0].ring().clone();
    let prec = ring.precision() as i64;
    let vk = chi[k]
        .val()
        .finite()
        .ok_or_else(|| Error::exhausted("vertex coefficient vanishes at working precision"))?;
    let e = vk as i64 + a * k as i64;
    if prec - e < 2 {
        return Err(Error::exhausted(format!("rescaling by p^{e} leaves fewer than 2 digits")));
    }
    let g_ring = ring.with_precision((prec - e) as u32)?;

    // G(y) = χ(p^a y) / p^e
    let mut g = Vec::with_capacity(n + 1);
    for (i, c) in chi.iter().enumerate() {
        let scale = a * i as i64 - e;
        let v = if scale >= 0 {
            c.mul_p_pow(scale.min(prec) as u32)
        } else {
            let need = (-scale) as u32;
            match c.val() {
                Valuation::Finite(v) if v < need => {
                    return Err(Error::NotSeparable(format!(
                        "coefficient {i} lies below the separating line"
                    )))
                }
                Valuation::Finite(_) => c.div_p_pow(need),
                Valuation::AtLeastPrecision => {
                    if (need as i64) > prec {
                        return Err(Error::exhausted("coefficient below the line is unknown"));
                    }
                    c.div_p_pow(need)
                }
            }
        };
        g.push(v.reduce_to(&g_ring));
    }
    for (i, c) in g.iter().enumerate().take(k + 1) {
        if (i == k) != c.is_unit() {
            return Err(Error::NotSeparable(format!(
                "rescaled polynomial is not y^{k} times a unit-constant factor modulo p (coefficient {i})"
            )));
        }
    }

    // Hensel: G = A·B with A ≡ y^k monic and B(0) a unit.
    let mut fa: Poly = vec![g_ring.zero(); k + 1];
    fa[k] = g_ring.one();
    let mut fb: Poly = g[k..].to_vec();
    let mut converged = false;
    for _ in 0..=(2 * g_ring.precision() + 2) {
        let err = poly::sub(&g_ring, &g, &poly::mul(&g_ring, &fa, &fb));
        if err.iter().all(|c| c.is_zero()) {
            converged = true;
            break;
        }
        let binv = series_inverse(&fb, k)?;
        let mut da = poly::mul(&g_ring, &err, &binv);
        da.truncate(k);
        let rest = poly::sub(&g_ring, &err, &poly::mul(&g_ring, &da, &fb));
        for (i, c) in da.iter().enumerate() {
            fa[i] = &fa[i] + c;
        }
        for (j, c) in rest.iter().enumerate().skip(k) {
            if j - k < fb.len() {
                fb[j - k] = &fb[j - k] + c;
            }
        }
    }
    if !converged {
        return Err(Error::NotSeparable("Hensel lifting did not converge".into()));
    }

    // H(x) = p^{a k} A(x / p^a)
    let h: Poly = fa
        .iter()
        .enumerate()
        .map(|(i, c)| c.mul_p_pow((a * (k - i) as i64).min(prec) as u32))
        .collect();
    let chi_g = poly::reduce_to(chi, &g_ring);
    let (l, rem) = poly::divrem_monic(&g_ring, &chi_g, &h);
    if rem.iter().any(|c| !c.is_zero()) {
        return Err(Error::NotSeparable("high-slope factor does not divide the characteristic polynomial".into()));
    }
    Ok((h, l, g_ring))
}

/// Power series inverse of b modulo y^k; b(0) must be a unit.
fn series_inverse(b: &[crate::wittring::WittElem], k: usize) -> Result<Poly> {
    let ring = b[0].ring();
    let c = b[0].inverse()?;
    let mut out: Poly = Vec::with_capacity(k);
    for i in 0..k {
        let mut acc = if i == 0 { ring.one() } else { ring.zero() };
        for j in 1..=i.min(b.len() - 1) {
            acc = &acc - &(&b[j] * &out[i - j]);
        }
        out.push(&acc * &c);
    }
    Ok(out)
}

/// Saturates the column span of a grading-preserving matrix piece by piece.
/// Returns the basis (columns grouped by graded piece) with its grading, and
/// the digits lost.
fn graded_saturation(
    span: &WittMatrix,
    grading: &[usize],
    m: usize,
    rank: usize,
) -> Result<((WittMatrix, Vec<usize>), u32)> {
    let n = span.rows();
    if !rank.is_multiple_of(m) {
        return Err(Error::InvalidGrading(format!("component rank {rank} is not divisible by m = {m}")));
    }
    for r in 0..n {
        for c in 0..n {
            if grading[r] != grading[c] && !span.get(r, c).is_zero() {
                return Err(Error::InvalidGrading("component projector does not respect the grading".into()));
            }
        }
    }
    let mut blocks = Vec::new();
    let mut loss = 0;
    for piece in 0..m {
        let idx: Vec<usize> = (0..n).filter(|&i| grading[i] == piece).collect();
        let (basis, l) = linalg::saturate_columns(&span.submatrix(&idx, &idx), rank / m)?;
        loss = loss.max(l);
        blocks.push((idx, basis));
    }
    let ring = span.ring().with_precision(span.ring().precision() - loss)?;
    let mut out = WittMatrix::zero(&ring, n, rank);
    let mut out_grading = Vec::with_capacity(rank);
    let mut col = 0;
    for (piece, (idx, basis)) in blocks.iter().enumerate() {
        let basis = basis.reduce_to(&ring);
        for j in 0..basis.cols() {
            for (bi, &r) in idx.iter().enumerate() {
                out.set(r, col, basis.get(bi, j).clone());
            }
            out_grading.push(piece);
            col += 1;
        }
    }
    Ok(((out, out_grading), loss))
}
