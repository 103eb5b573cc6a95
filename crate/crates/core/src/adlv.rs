//! Affine Deligne-Lusztig sets in bounded lattice windows.
//!
//! A coset g·G(W) is recorded by its lattice L = gΛ, which is stored as
//! p^{-t}·H·W^n with H in column Hermite normal form: upper triangular,
//! diagonal entries p^{e_j}, and every entry of row i to the right of the
//! diagonal reduced coordinate-wise modulo p^{e_i}. The window of size c is
//! p^cΛ ⊆ L ⊆ p^{-c}Λ.
//!
//! Membership tests b' = g^{-1}·b·σ(g) ∈ K μ(p) K. For EL groups and Levi
//! subgroups the lattices are block diagonal and b' is tested block by block.

use serde::Serialize;

use crate::eltype::{el_block, ELStructure};
use crate::error::{Error, Result};
use crate::hodgenewton::{hn_decompose, LeviPartition};
use crate::isocrystal::FCrystal;
use crate::polygon::ConvexPolygon;
use crate::wittring::{linalg, Valuation, WittMatrix, WittRing};

/// Largest number of raw window candidates examined.
pub const ADLV_BUDGET: u64 = 2_000_000;

/// Lattice p^{-denominator}·H·W^n with H in canonical Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeClass {
    pub denominator: i32,
    /// H[i][j] as Witt coordinates.
    pub hnf: Vec<Vec<Vec<u64>>>,
}

impl LatticeClass {
    pub fn height(&self) -> usize {
        self.hnf.len()
    }

    /// Exponents e_j of the diagonal entries p^{e_j}.
    pub fn exponents(&self, p: u64) -> Vec<u32> {
        (0..self.hnf.len())
            .map(|j| {
                let mut v = self.hnf[j][j][0];
                let mut e = 0;
                while v > 1 {
                    v /= p;
                    e += 1;
                }
                e
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ADLVWindowResult {
    pub window: u32,
    pub classes: Vec<LatticeClass>,
    pub complete_in_window: bool,
    /// Raw window candidates examined.
    pub candidates: u64,
}

impl ADLVWindowResult {
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

/// A block of b' and the elementary-divisor exponents it must have.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub exponents: Vec<i64>,
}

/// Coordinate blocks of admissible lattices and the cells tested for
/// membership. GL_n has one block and one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupShape {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
    pub cells: Vec<Cell>,
}

impl GroupShape {
    pub fn gl(mu: &ConvexPolygon) -> Result<Self> {
        let n = mu.height();
        let all: Vec<usize> = (0..n).collect();
        Ok(GroupShape {
            n,
            blocks: vec![all.clone()],
            cells: vec![Cell { rows: all.clone(), cols: all, exponents: integer_slopes(mu)? }],
        })
    }

    /// Graded lattices of an EL structure; the cell of M_{i-1} → M_i must
    /// keep the elementary divisors of the corresponding block of b, whose
    /// union has to be μ.
    pub fn el(sx: &ELStructure, mu: &ConvexPolygon) -> Result<Self> {
        let m = sx.m();
        let shift = sx.crystal().shift() as i64;
        let mut cells = Vec::with_capacity(m);
        let mut union = Vec::new();
        for i in 0..m {
            let exps: Vec<i64> =
                linalg::elementary_divisors(&el_block(sx, i))?.into_iter().map(|e| e as i64 - shift).collect();
            union.extend(exps.iter().copied());
            cells.push(Cell { rows: sx.piece(i), cols: sx.piece((i + m - 1) % m), exponents: exps });
        }
        union.sort();
        if union != integer_slopes(mu)? {
            return Err(Error::InvalidInput(format!(
                "EL windows test the block divisors {union:?} of b, which differ from mu = {mu}"
            )));
        }
        Ok(GroupShape { n: sx.crystal().height(), blocks: (0..m).map(|i| sx.piece(i)).collect(), cells })
    }

    /// Block-diagonal product; the parts occupy consecutive coordinates.
    pub fn product(parts: &[GroupShape]) -> Self {
        let mut out = GroupShape { n: 0, blocks: Vec::new(), cells: Vec::new() };
        for part in parts {
            let off = out.n;
            let shift = |v: &[usize]| v.iter().map(|&i| i + off).collect::<Vec<_>>();
            out.blocks.extend(part.blocks.iter().map(|b| shift(b)));
            out.cells.extend(part.cells.iter().map(|c| Cell {
                rows: shift(&c.rows),
                cols: shift(&c.cols),
                exponents: c.exponents.clone(),
            }));
            out.n += part.n;
        }
        out
    }
}

fn integer_slopes(mu: &ConvexPolygon) -> Result<Vec<i64>> {
    if !mu.has_integer_slopes() {
        return Err(Error::InvalidInput(format!("mu = {mu} must have integer slopes")));
    }
    Ok(mu.slopes().iter().map(|s| s.to_integer()).collect())
}

/// Raw HNF candidates with p^{2c}Λ ⊆ HW^k ⊆ Λ in one block of size k,
/// counted before the containment filter.
fn raw_block_count(p: u64, s: usize, k: usize, c: u32) -> Option<u64> {
    // Σ over e ∈ [0, 2c]^k of Π_i p^{s·e_i·(k-1-i)}
    let mut total: u64 = 1;
    for i in 0..k {
        let mut row_sum: u64 = 0;
        for e in 0..=2 * c {
            let exp = (s as u32).checked_mul(e)?.checked_mul((k - 1 - i) as u32)?;
            row_sum = row_sum.checked_add(p.checked_pow(exp)?)?;
        }
        total = total.checked_mul(row_sum)?;
    }
    Some(total)
}

/// One admissible block lattice: H (k×k, exact small entries) and
/// Y = p^{2c}·H^{-1}, both in the high-precision ring.
struct BlockLattice {
    h: WittMatrix,
    y: WittMatrix,
}

fn block_lattices(ring_hi: &WittRing, k: usize, c: u32) -> Vec<BlockLattice> {
    let p = ring_hi.p();
    let s = ring_hi.s();
    let two_c = 2 * c;
    let mut out = Vec::new();
    let mut exps = vec![0u32; k];
    loop {
        // off-diagonal positions (i, j), i < j, each ranging over W / p^{e_i}
        let positions: Vec<(usize, usize, u64)> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, p.pow(exps[i])))
            .collect();
        let sizes: Vec<u64> = positions.iter().map(|&(_, _, q)| q.pow(s as u32)).collect();
        let mut choice = vec![0u64; positions.len()];
        loop {
            let mut h = WittMatrix::zero(ring_hi, k, k);
            for j in 0..k {
                h.set(j, j, ring_hi.p_pow(exps[j]));
            }
            for (idx, &(i, j, q)) in positions.iter().enumerate() {
                let mut v = choice[idx];
                let coords: Vec<u64> = (0..s)
                    .map(|_| {
                        let d = v % q;
                        v /= q;
                        d
                    })
                    .collect();
                h.set(i, j, ring_hi.from_coords(coords).expect("coordinate count matches"));
            }
            if let Some(y) = scaled_inverse(&h, &exps, two_c) {
                out.push(BlockLattice { h, y });
            }
            if !odometer(&mut choice, &sizes) {
                break;
            }
        }
        if !odometer_u32(&mut exps, two_c + 1) {
            break;
        }
    }
    out
}

/// p^{2c}·H^{-1} if it is integral, i.e. if p^{2c}Λ ⊆ HW^k.
fn scaled_inverse(h: &WittMatrix, exps: &[u32], two_c: u32) -> Option<WittMatrix> {
    let total: u32 = exps.iter().sum();
    let adj = linalg::adjugate(h);
    if total <= two_c {
        return Some(adj.scale(&h.ring().p_pow(two_c - total)));
    }
    let need = total - two_c;
    if adj.entries().iter().any(|x| x.val() < Valuation::Finite(need)) {
        return None;
    }
    Some(adj.map(|x| x.div_p_pow(need)))
}

fn odometer(digits: &mut [u64], sizes: &[u64]) -> bool {
    for (d, &size) in digits.iter_mut().zip(sizes) {
        *d += 1;
        if *d < size {
            return true;
        }
        *d = 0;
    }
    false
}

fn odometer_u32(digits: &mut [u32], size: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < size {
            return true;
        }
        *d = 0;
    }
    false
}

/// Canonical class of the lattice p^{-c}·H·W^n for an HNF matrix H with
/// small exact entries.
fn class_of_window_hnf(h: &WittMatrix, c: u32) -> LatticeClass {
    let p = h.ring().p();
    let k = h
        .entries()
        .iter()
        .filter_map(|x| x.val().finite())
        .min()
        .unwrap_or(0);
    let pk = p.pow(k);
    let hnf = (0..h.rows())
        .map(|i| (0..h.cols()).map(|j| h.get(i, j).coords().iter().map(|x| x / pk).collect()).collect())
        .collect();
    LatticeClass { denominator: c as i32 - k as i32, hnf }
}

/// Canonical Hermite normal form of the lattice p^{-denominator}·G·W^n.
/// The ring precision must exceed every diagonal exponent of the result.
pub fn canonical_lattice(g: &WittMatrix, denominator: i32) -> Result<LatticeClass> {
    let n = g.rows();
    if !g.is_square() {
        return Err(Error::DimensionMismatch("lattice generators must form a square matrix".into()));
    }
    let ring = g.ring().clone();
    let mut h = g.clone();
    let mut exps = vec![0u32; n];
    for i in (0..n).rev() {
        let mut best: Option<(u32, usize)> = None;
        for j in 0..=i {
            if let Some(v) = h.get(i, j).val().finite() {
                if best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, j));
                }
            }
        }
        let (e, j) = best.ok_or(Error::NotInvertible)?;
        h.swap_cols(i, j);
        let unit = h.get(i, i).div_p_pow(e).inverse()?;
        h.scale_col(i, &unit);
        for j in 0..i {
            if !h.get(i, j).is_zero() {
                let f = -&h.get(i, j).div_p_pow(e);
                h.add_col_multiple(j, i, &f);
            }
        }
        exps[i] = e;
    }
    for j in 0..n {
        for i in (0..j).rev() {
            let e = exps[i];
            let a = h.get(i, j).clone();
            let r = a.residue(e);
            if r != a {
                let q = (&a - &r).div_p_pow(e);
                h.add_col_multiple(j, i, &-&q);
            }
        }
    }
    if exps.iter().any(|&e| e >= ring.precision()) {
        return Err(Error::exhausted("lattice pivots reach the working precision"));
    }
    let k = h.entries().iter().filter_map(|x| x.val().finite()).min().unwrap_or(0);
    let pk = ring.p().pow(k);
    let hnf = (0..n)
        .map(|i| (0..n).map(|j| h.get(i, j).coords().iter().map(|x| x / pk).collect()).collect())
        .collect();
    Ok(LatticeClass { denominator: denominator - k as i32, hnf })
}

/// The matrix H of a class, in `ring`.
pub fn class_matrix(class: &LatticeClass, ring: &WittRing) -> Result<WittMatrix> {
    let n = class.height();
    let mut h = WittMatrix::zero(ring, n, n);
    for i in 0..n {
        for j in 0..n {
            h.set(i, j, ring.from_coords(class.hnf[i][j].clone())?);
        }
    }
    Ok(h)
}

/// Enumerates the window for an arbitrary group shape.
pub fn adlv_enumerate_shape(x: &FCrystal, shape: &GroupShape, c: u32) -> Result<ADLVWindowResult> {
    let n = x.height();
    if shape.n != n {
        return Err(Error::HeightMismatch(shape.n, n));
    }
    let ring = x.ring();
    let (p, s) = (ring.p(), ring.s());
    let shift = x.shift() as i64;
    let stored_targets: Vec<Vec<i64>> = shape
        .cells
        .iter()
        .map(|cell| {
            let mut t: Vec<i64> = cell.exponents.iter().map(|e| e + shift).collect();
            t.sort();
            t
        })
        .collect();
    let candidates = shape
        .blocks
        .iter()
        .try_fold(1u64, |acc, b| raw_block_count(p, s, b.len(), c).and_then(|k| acc.checked_mul(k)))
        .filter(|&k| k <= ADLV_BUDGET)
        .ok_or_else(|| Error::BudgetExceeded(format!("window {c} has more than {ADLV_BUDGET} candidates")))?;

    let mut classes = Vec::new();
    if stored_targets.iter().flatten().any(|&t| t < 0) {
        return Ok(ADLVWindowResult { window: c, classes, complete_in_window: false, candidates });
    }
    let max_target = stored_targets.iter().flatten().copied().max().unwrap_or(0) as u32;
    let two_c = 2 * c;
    let n_z = max_target + 2 + two_c;
    if x.precision() < n_z {
        return Err(Error::exhausted(format!(
            "window {c} with max(mu) = {max_target} needs precision {n_z}, have {}",
            x.precision()
        )));
    }
    let k_max = shape.blocks.iter().map(Vec::len).max().unwrap_or(0) as u32;
    let ring_hi = ring.with_precision(n_z + two_c * k_max)?;
    let ring_z = ring.with_precision(n_z)?;
    let b = x.matrix().reduce_to(&ring_z);

    let per_block: Vec<Vec<BlockLattice>> =
        shape.blocks.iter().map(|blk| block_lattices(&ring_hi, blk.len(), c)).collect();
    let mut choice = vec![0u64; per_block.len()];
    let sizes: Vec<u64> = per_block.iter().map(|v| v.len() as u64).collect();
    if sizes.contains(&0) {
        return Ok(ADLVWindowResult { window: c, classes, complete_in_window: false, candidates });
    }
    loop {
        let mut h = WittMatrix::zero(&ring_hi, n, n);
        let mut y = WittMatrix::zero(&ring_z, n, n);
        for (bi, blk) in shape.blocks.iter().enumerate() {
            let lat = &per_block[bi][choice[bi] as usize];
            for (a, &r) in blk.iter().enumerate() {
                for (bb, &col) in blk.iter().enumerate() {
                    h.set(r, col, lat.h.get(a, bb).clone());
                    y.set(r, col, lat.y.get(a, bb).reduce_to(&ring_z));
                }
            }
        }
        let hz = h.reduce_to(&ring_z);
        let z = &(&y * &b) * &hz.frobenius();
        if is_member(&z, two_c, &shape.cells, &stored_targets) {
            classes.push(class_of_window_hnf(&h, c));
        }
        if !odometer(&mut choice, &sizes) {
            break;
        }
    }
    classes.sort();
    Ok(ADLVWindowResult { window: c, classes, complete_in_window: false, candidates })
}

/// Z = p^{2c}·b'. Every cell of b' must have exactly the target divisors.
fn is_member(z: &WittMatrix, two_c: u32, cells: &[Cell], targets: &[Vec<i64>]) -> bool {
    if z.min_val() < Valuation::Finite(two_c) {
        return false;
    }
    let ring = z.ring();
    let Ok(ring_x) = ring.with_precision(ring.precision() - two_c) else { return false };
    let x = z.map(|v| v.div_p_pow(two_c)).reduce_to(&ring_x);
    cells.iter().zip(targets).all(|(cell, target)| {
        let exps = linalg::smith(&x.submatrix(&cell.rows, &cell.cols)).exponents;
        exps.len() == target.len() && exps.iter().zip(target).all(|(&e, &t)| e as i64 == t)
    })
}

/// Window of X_μ(b) for GL_n, or for the EL group when a structure is given.
pub fn adlv_enumerate(x: &FCrystal, mu: &ConvexPolygon, c: u32, el: Option<&ELStructure>) -> Result<ADLVWindowResult> {
    if mu.height() != x.height() {
        return Err(Error::HeightMismatch(mu.height(), x.height()));
    }
    let shape = match el {
        None => GroupShape::gl(mu)?,
        Some(sx) => {
            if sx.crystal() != x {
                return Err(Error::InvalidInput("EL structure belongs to a different crystal".into()));
            }
            GroupShape::el(sx, mu)?
        }
    };
    adlv_enumerate_shape(x, &shape, c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HNComparison {
    pub count_g: usize,
    pub count_m: usize,
    pub equal: bool,
}

/// Window counts of X^G_μ(b) and X^M_μ(b_M) for the Levi M cut out by the
/// partition, where b_M is the block-diagonal Hodge-Newton decomposition.
pub fn adlv_hn_compare(sx: &ELStructure, part: &LeviPartition, mu: &ConvexPolygon, c: u32) -> Result<HNComparison> {
    let report = hn_decompose(sx, part)?;
    let prec = report.factors.iter().map(|f| f.structure.crystal().precision()).min().unwrap();
    let ring = sx.crystal().ring().with_precision(prec)?;
    let mats: Vec<WittMatrix> =
        report.factors.iter().map(|f| f.structure.crystal().matrix().reduce_to(&ring)).collect();
    let refs: Vec<&WittMatrix> = mats.iter().collect();
    let b_m = FCrystal::with_shift(WittMatrix::block_diag(&refs)?, sx.crystal().shift())?;
    let grading: Vec<usize> = report.factors.iter().flat_map(|f| f.structure.grading().to_vec()).collect();
    let whole = crate::eltype::el_validate(&b_m, sx.m(), &grading)?;

    let g_side = adlv_enumerate_shape(&b_m, &GroupShape::el(&whole, mu)?, c)?;
    let mut parts = Vec::with_capacity(report.factors.len());
    for f in &report.factors {
        let fx = f.structure.crystal().reduce_to(&ring)?;
        let fs = crate::eltype::el_validate(&fx, sx.m(), f.structure.grading())?;
        let exps = factor_mu(&fs)?;
        parts.push(GroupShape::el(&fs, &exps)?);
    }
    let m_side = adlv_enumerate_shape(&b_m, &GroupShape::product(&parts), c)?;
    let (count_g, count_m) = (g_side.count(), m_side.count());
    Ok(HNComparison { count_g, count_m, equal: count_g == count_m })
}

/// The cocharacter of a factor: the union of its block divisors.
fn factor_mu(sx: &ELStructure) -> Result<ConvexPolygon> {
    let shift = sx.crystal().shift() as i64;
    let mut all = Vec::new();
    for i in 0..sx.m() {
        all.extend(linalg::elementary_divisors(&el_block(sx, i))?.into_iter().map(|e| e as i64 - shift));
    }
    Ok(ConvexPolygon::from_integers(&all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eltype::el_validate;
    use crate::isocrystal::sigma_conjugate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn crystal(p: u64, s: usize, rows: &[&[i64]]) -> FCrystal {
        let w = WittRing::new(p, s, 16).unwrap();
        FCrystal::new(WittMatrix::from_ints(&w, rows)).unwrap()
    }

    fn mu(v: &[i64]) -> ConvexPolygon {
        ConvexPolygon::from_integers(v)
    }

    fn identity_class(n: usize, s: usize) -> LatticeClass {
        let unit = |one: bool| (0..s).map(|k| (one && k == 0) as u64).collect();
        let hnf = (0..n).map(|i| (0..n).map(|j| unit(i == j)).collect()).collect();
        LatticeClass { denominator: 0, hnf }
    }

    #[test]
    fn raw_counts() {
        assert_eq!(raw_block_count(3, 1, 2, 1), Some(3 * (1 + 3 + 9)));
        assert_eq!(raw_block_count(3, 1, 1, 1), Some(3));
        assert!(raw_block_count(5, 2, 4, 2).is_none_or(|k| k > ADLV_BUDGET));
        assert_eq!(raw_block_count(2, 64, 3, 2), None);
    }

    #[test]
    fn ordinary_window_contains_the_identity() {
        let x = crystal(3, 1, &[&[1, 0], &[0, 3]]);
        let res = adlv_enumerate(&x, &mu(&[0, 1]), 1, None).unwrap();
        assert!(!res.complete_in_window);
        assert!(res.classes.contains(&identity_class(2, 1)));
        assert!(res.classes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn kottwitz_mismatch_gives_an_empty_window() {
        let x = crystal(3, 1, &[&[1, 0], &[0, 1]]);
        assert_eq!(adlv_enumerate(&x, &mu(&[0, 1]), 1, None).unwrap().count(), 0);
    }

    #[test]
    fn windows_are_monotone() {
        let x = crystal(2, 1, &[&[0, 2], &[1, 0]]);
        let small: BTreeSet<_> = adlv_enumerate(&x, &mu(&[0, 1]), 1, None).unwrap().classes.into_iter().collect();
        let large: BTreeSet<_> = adlv_enumerate(&x, &mu(&[0, 1]), 2, None).unwrap().classes.into_iter().collect();
        assert!(!small.is_empty());
        assert!(small.is_subset(&large));
        assert!(large.len() > small.len());
    }

    #[test]
    fn canonical_form_is_class_invariant() {
        let x = crystal(3, 1, &[&[1, 0], &[0, 3]]);
        let res = adlv_enumerate(&x, &mu(&[0, 1]), 1, None).unwrap();
        let w = WittRing::new(3, 1, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for class in &res.classes {
            let h = class_matrix(class, &w).unwrap();
            assert_eq!(&canonical_lattice(&h, class.denominator).unwrap(), class);
            let u = WittMatrix::random_unit(&w, 2, &mut rng);
            assert_eq!(&canonical_lattice(&(&h * &u), class.denominator).unwrap(), class);
        }
    }

    #[test]
    fn membership_is_conjugation_covariant() {
        let x = crystal(3, 1, &[&[0, 3], &[1, 0]]);
        let w = x.ring().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let base = adlv_enumerate(&x, &mu(&[0, 1]), 1, None).unwrap();
        for _ in 0..3 {
            let g = WittMatrix::random_unit(&w, 2, &mut rng);
            let y = sigma_conjugate(&x, &g).unwrap();
            assert_eq!(adlv_enumerate(&y, &mu(&[0, 1]), 1, None).unwrap().count(), base.count());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let w = WittRing::new(5, 1, 16).unwrap();
        let x = FCrystal::new(WittMatrix::identity(&w, 4)).unwrap();
        assert!(matches!(adlv_enumerate(&x, &mu(&[0, 0, 0, 0]), 2, None), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn precision_is_checked() {
        let w = WittRing::new(3, 1, 4).unwrap();
        let x = FCrystal::new(WittMatrix::from_ints(&w, &[&[1, 0], &[0, 3]])).unwrap();
        assert!(matches!(adlv_enumerate(&x, &mu(&[0, 1]), 1, None), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn ordinary_levi_comparison_agrees() {
        let x = crystal(3, 1, &[&[1, 0], &[0, 3]]);
        let sx = ELStructure::trivial(x);
        let part = LeviPartition::new(vec![1, 1]).unwrap();
        let cmp = adlv_hn_compare(&sx, &part, &mu(&[0, 1]), 1).unwrap();
        assert!(cmp.equal, "{cmp:?}");
        assert_eq!(cmp.count_m, 9);
    }

    #[test]
    fn comparison_requires_reducibility() {
        let x = crystal(3, 1, &[&[0, 3], &[1, 0]]);
        let part = LeviPartition::new(vec![1, 1]).unwrap();
        assert_eq!(adlv_hn_compare(&ELStructure::trivial(x), &part, &mu(&[0, 1]), 1), Err(Error::NotHNReducible));
    }

    #[test]
    fn el_windows_use_graded_lattices() {
        let x = crystal(3, 2, &[&[0, 3], &[1, 0]]);
        let sx = el_validate(&x, 2, &[0, 1]).unwrap();
        let res = adlv_enumerate(&x, &mu(&[0, 1]), 1, Some(&sx)).unwrap();
        // every graded lattice is p^a W ⊕ p^b W; membership forces a = b
        assert_eq!(res.count(), 3);
        assert!(res.classes.contains(&identity_class(2, 2)));
    }
}
