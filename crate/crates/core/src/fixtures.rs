//! Reference crystals F1-F5 and seeded random generators.

use rand::Rng;

use crate::eltype::{el_validate, ELStructure};
use crate::error::Result;
use crate::isocrystal::FCrystal;
use crate::wittring::{linalg, WittMatrix, WittRing};

pub const DEFAULT_PRECISION: u32 = 16;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub crystal: FCrystal,
    /// EL structure; the trivial one (m = 1) for plain crystals.
    pub el: ELStructure,
}

fn ring(p: u64, s: usize) -> WittRing {
    WittRing::new(p, s, DEFAULT_PRECISION).expect("fixture rings are valid")
}

fn plain(name: &'static str, w: &WittRing, rows: &[&[i64]]) -> Fixture {
    let crystal = FCrystal::new(WittMatrix::from_ints(w, rows)).expect("fixture matrices are invertible");
    Fixture { name, el: ELStructure::trivial(crystal.clone()), crystal }
}

fn graded(name: &'static str, w: &WittRing, rows: &[&[i64]], m: usize, grading: &[usize]) -> Fixture {
    let crystal = FCrystal::new(WittMatrix::from_ints(w, rows)).expect("fixture matrices are invertible");
    let el = el_validate(&crystal, m, grading).expect("fixture gradings are valid");
    Fixture { name, crystal, el }
}

/// Étale crystal of height 2.
pub fn f1() -> Fixture {
    plain("F1", &ring(3, 1), &[&[1, 0], &[0, 1]])
}

/// Ordinary elliptic-curve crystal diag(1, p).
pub fn f2() -> Fixture {
    plain("F2", &ring(3, 1), &[&[1, 0], &[0, 3]])
}

/// Supersingular crystal: F e_1 = e_2, F e_2 = p e_1.
pub fn f3() -> Fixture {
    plain("F3", &ring(3, 1), &[&[0, 3], &[1, 0]])
}

/// The same matrix over F_9 with an O_E-action of degree 2 (d = 1, f = (1, 0)).
pub fn f4() -> Fixture {
    graded("F4", &ring(3, 2), &[&[0, 3], &[1, 0]], 2, &[0, 1])
}

/// F4 plus the étale m = 2 crystal: two slopes 0 and 1/2, height 4.
pub fn f5() -> Fixture {
    graded(
        "F5",
        &ring(3, 2),
        &[&[0, 3, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]],
        2,
        &[0, 1, 0, 1],
    )
}

pub fn all() -> Vec<Fixture> {
    vec![f1(), f2(), f3(), f4(), f5()]
}

/// b = k1·diag(p^{e})·k2 with unit k1, k2 and the given exponents.
pub fn crystal_with_divisors<R: Rng + ?Sized>(w: &WittRing, exps: &[u32], rng: &mut R) -> WittMatrix {
    let n = exps.len();
    let k1 = WittMatrix::random_unit(w, n, rng);
    let k2 = WittMatrix::random_unit(w, n, rng);
    &(&k1 * &linalg::p_power_diagonal(w, exps)) * &k2
}

/// Random integral crystal of height n with elementary-divisor exponents in
/// {0, 1, 2}, summing to at most `max_total`.
pub fn random_crystal<R: Rng + ?Sized>(w: &WittRing, n: usize, max_total: u32, rng: &mut R) -> (FCrystal, Vec<u32>) {
    loop {
        let mut exps: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        if exps.iter().sum::<u32>() > max_total {
            continue;
        }
        exps.sort();
        let b = crystal_with_divisors(w, &exps, rng);
        if let Ok(x) = FCrystal::new(b) {
            return (x, exps);
        }
    }
}

/// Isoclinic block of slope a/q: F e_i = e_{i+1} for i < q, F e_q = p^a e_1.
pub fn isoclinic_block(w: &WittRing, a: u32, q: usize) -> WittMatrix {
    let mut b = WittMatrix::zero(w, q, q);
    for i in 0..q - 1 {
        b.set(i + 1, i, w.one());
    }
    b.set(0, q - 1, w.p_pow(a));
    b
}

/// Block sum of isoclinic blocks with slopes a/q, in the order given.
pub fn multi_slope(w: &WittRing, slopes: &[(u32, usize)]) -> Result<FCrystal> {
    let blocks: Vec<WittMatrix> = slopes.iter().map(|&(a, q)| isoclinic_block(w, a, q)).collect();
    let refs: Vec<&WittMatrix> = blocks.iter().collect();
    FCrystal::new(WittMatrix::block_diag(&refs)?)
}

/// Height-2, m = 2 building blocks, graded [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElBlock {
    /// slope 0, type (1, (0, 0))
    Etale,
    /// slope 1/2, type (1, (1, 0))
    Half,
    /// slope 1, type (1, (1, 1))
    Multiplicative,
}

impl ElBlock {
    pub fn matrix(self, w: &WittRing) -> WittMatrix {
        let rows: &[&[i64]] = match self {
            ElBlock::Etale => &[&[0, 1], &[1, 0]],
            ElBlock::Half => &[&[0, w.p() as i64], &[1, 0]],
            ElBlock::Multiplicative => &[&[0, w.p() as i64], &[w.p() as i64, 0]],
        };
        WittMatrix::from_ints(w, rows)
    }
}

/// Block sum of m = 2 building blocks, graded [0, 1, 0, 1, ...].
pub fn el_sum(w: &WittRing, blocks: &[ElBlock]) -> Result<ELStructure> {
    let mats: Vec<WittMatrix> = blocks.iter().map(|b| b.matrix(w)).collect();
    let refs: Vec<&WittMatrix> = mats.iter().collect();
    let x = FCrystal::new(WittMatrix::block_diag(&refs)?)?;
    let grading: Vec<usize> = (0..2 * blocks.len()).map(|i| i % 2).collect();
    el_validate(&x, 2, &grading)
}

/// Unit matrix preserving a grading: a random unit on each graded piece.
pub fn random_graded_unit<R: Rng + ?Sized>(w: &WittRing, grading: &[usize], m: usize, rng: &mut R) -> WittMatrix {
    let n = grading.len();
    let mut g = WittMatrix::zero(w, n, n);
    for i in 0..m {
        let idx: Vec<usize> = (0..n).filter(|&k| grading[k] == i).collect();
        let u = WittMatrix::random_unit(w, idx.len(), rng);
        for (a, &r) in idx.iter().enumerate() {
            for (b, &c) in idx.iter().enumerate() {
                g.set(r, c, u.get(a, b).clone());
            }
        }
    }
    g
}

/// Random EL structure with m | s, piece rank d and block divisors in {0, 1}.
/// Basis vectors are interleaved: vector k lies in piece k mod m.
pub fn random_el<R: Rng + ?Sized>(w: &WittRing, m: usize, d: usize, rng: &mut R) -> Result<ELStructure> {
    let n = m * d;
    let grading: Vec<usize> = (0..n).map(|k| k % m).collect();
    let mut b = WittMatrix::zero(w, n, n);
    for i in 0..m {
        let rows: Vec<usize> = (0..n).filter(|&k| grading[k] == i).collect();
        let cols: Vec<usize> = (0..n).filter(|&k| grading[k] == (i + m - 1) % m).collect();
        let mut exps: Vec<u32> = (0..d).map(|_| rng.gen_range(0..=1)).collect();
        exps.sort();
        let block = crystal_with_divisors(w, &exps, rng);
        for (a, &r) in rows.iter().enumerate() {
            for (c, &col) in cols.iter().enumerate() {
                b.set(r, col, block.get(a, c).clone());
            }
        }
    }
    el_validate(&FCrystal::new(b)?, m, &grading)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eltype::el_type;
    use crate::isocrystal::newton_polygon;
    use crate::polygon::{ConvexPolygon, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isoclinic_blocks_have_their_slope() {
        let w = WittRing::new(2, 1, 16).unwrap();
        for (a, q) in [(0, 1), (1, 2), (1, 3), (2, 3), (3, 4)] {
            let x = FCrystal::new(isoclinic_block(&w, a, q)).unwrap();
            let slope = Rational::new(a as i64, q as i64);
            assert_eq!(newton_polygon(&x).unwrap(), ConvexPolygon::from_slopes(vec![slope; q]));
        }
    }

    #[test]
    fn random_el_structures_are_valid() {
        let w = WittRing::new(3, 2, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..=2 {
            let sx = random_el(&w, 2, d, &mut rng).unwrap();
            assert_eq!(el_type(&sx).unwrap().d, d);
        }
    }

    #[test]
    fn generators_are_reproducible() {
        let w = WittRing::new(5, 2, 16).unwrap();
        let a = random_crystal(&w, 3, 7, &mut ChaCha8Rng::seed_from_u64(1));
        let b = random_crystal(&w, 3, 7, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
    }
}
