//! Division-free and local-ring linear algebra over W/p^N.
//!
//! Everything here is exact modulo p^N. Characteristic polynomials use
//! Berkowitz's algorithm, which needs no division. Smith normal form uses
//! minimal-valuation pivoting, which is valid because W/p^N is a chain ring:
//! every entry is divisible by the pivot.

use super::poly::Poly;
use super::{Valuation, WittElem, WittMatrix, WittRing};
use crate::error::{Error, Result};

/// Coefficients of det(xI - A), lowest degree first; the last entry is 1.
pub fn charpoly(a: &WittMatrix) -> Poly {
    assert!(a.is_square(), "charpoly of a non-square matrix");
    let ring = a.ring();
    let n = a.rows();
    if n == 0 {
        return vec![ring.one()];
    }
    // highest degree first while iterating
    let mut v: Vec<WittElem> = vec![ring.one(), -a.get(0, 0)];
    for r in 1..n {
        let idx: Vec<usize> = (0..r).collect();
        let m = a.submatrix(&idx, &idx);
        let col = a.submatrix(&idx, &[r]);
        let row = a.submatrix(&[r], &idx);
        let mut q = Vec::with_capacity(r + 2);
        q.push(ring.one());
        q.push(-a.get(r, r));
        let mut mk_col = col;
        for _ in 0..r {
            q.push(-(&row * &mk_col).get(0, 0));
            mk_col = &m * &mk_col;
        }
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut acc = ring.zero();
            for (j, vj) in v.iter().enumerate().take(i.min(r) + 1) {
                acc = &acc + &(&q[i - j] * vj);
            }
            next.push(acc);
        }
        v = next;
    }
    v.reverse();
    v
}

pub fn det(a: &WittMatrix) -> WittElem {
    let chi = charpoly(a);
    if a.rows().is_multiple_of(2) {
        chi[0].clone()
    } else {
        -&chi[0]
    }
}

/// Adjugate via Cayley-Hamilton: A·adj(A) = det(A)·I.
pub fn adjugate(a: &WittMatrix) -> WittMatrix {
    let ring = a.ring();
    let n = a.rows();
    let chi = charpoly(a);
    let mut acc = WittMatrix::identity(ring, n);
    for k in (1..n).rev() {
        acc = &(&acc * a) + &WittMatrix::identity(ring, n).scale(&chi[k]);
    }
    if n.is_multiple_of(2) {
        acc.scale(&ring.from_int(-1))
    } else {
        acc
    }
}

/// Inverse of a matrix with unit determinant.
pub fn inverse(a: &WittMatrix) -> Result<WittMatrix> {
    let d = det(a).inverse()?;
    Ok(adjugate(a).scale(&d))
}

/// Smith normal form U·A·V = D over W/p^N, with D = diag(p^{e_1}, ..., p^{e_r}, 0...).
#[derive(Debug, Clone)]
pub struct Smith {
    /// Exponents of the pivots found below precision, nondecreasing.
    pub exponents: Vec<u32>,
    pub u: WittMatrix,
    pub u_inv: WittMatrix,
    pub v: WittMatrix,
}

pub fn smith(a: &WittMatrix) -> Smith {
    let ring = a.ring().clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut u = WittMatrix::identity(&ring, rows);
    let mut u_inv = WittMatrix::identity(&ring, rows);
    let mut v = WittMatrix::identity(&ring, cols);
    let mut exponents = Vec::new();

    for k in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Valuation::Finite(e) = m.get(i, j).val() {
                    if best.is_none_or(|(b, _, _)| e < b) {
                        best = Some((e, i, j));
                    }
                }
            }
        }
        let Some((e, pi, pj)) = best else { break };
        m.swap_rows(k, pi);
        u.swap_rows(k, pi);
        u_inv.swap_cols(k, pi);
        m.swap_cols(k, pj);
        v.swap_cols(k, pj);

        let w = m.get(k, k).div_p_pow(e);
        let w_inv = w.inverse().expect("pivot cofactor is a unit");
        m.scale_row(k, &w_inv);
        u.scale_row(k, &w_inv);
        u_inv.scale_col(k, &w);

        for i in k + 1..rows {
            if m.get(i, k).is_zero() {
                continue;
            }
            let f = m.get(i, k).div_p_pow(e);
            let neg = -&f;
            m.add_row_multiple(i, k, &neg);
            u.add_row_multiple(i, k, &neg);
            u_inv.add_col_multiple(k, i, &f);
        }
        for j in k + 1..cols {
            if m.get(k, j).is_zero() {
                continue;
            }
            let f = m.get(k, j).div_p_pow(e);
            let neg = -&f;
            m.add_col_multiple(j, k, &neg);
            v.add_col_multiple(j, k, &neg);
        }
        exponents.push(e);
    }
    Smith { exponents, u, u_inv, v }
}

/// Elementary-divisor exponents of a square matrix; errors if fewer than n
/// pivots are visible at working precision.
pub fn elementary_divisors(a: &WittMatrix) -> Result<Vec<u32>> {
    let s = smith(a);
    if s.exponents.len() < a.rows().min(a.cols()) {
        return Err(Error::exhausted(format!(
            "only {} of {} elementary divisors are below p^{}",
            s.exponents.len(),
            a.rows().min(a.cols()),
            a.ring().precision()
        )));
    }
    Ok(s.exponents)
}

/// Saturated basis of the K-span of the columns of `a`, intersected with W^n.
///
/// Returns the basis (n × rank) in the ring of reduced precision together
/// with the number of p-adic digits lost.
pub fn saturate_columns(a: &WittMatrix, rank: usize) -> Result<(WittMatrix, u32)> {
    let s = smith(a);
    if s.exponents.len() < rank {
        return Err(Error::exhausted(format!(
            "column span has visible rank {} < {}",
            s.exponents.len(),
            rank
        )));
    }
    if s.exponents.len() > rank {
        return Err(Error::NotSeparable(format!(
            "column span has visible rank {} > {}",
            s.exponents.len(),
            rank
        )));
    }
    let loss = s.exponents.last().copied().unwrap_or(0);
    let prec = a.ring().precision();
    if loss >= prec {
        return Err(Error::exhausted("saturation consumed the whole precision budget"));
    }
    let ring = a.ring().with_precision(prec - loss)?;
    let idx: Vec<usize> = (0..rank).collect();
    Ok((s.u_inv.columns(&idx).reduce_to(&ring), loss))
}

/// Left inverse E (r × n) of a saturated basis B (n × r): E·B = I_r.
pub fn left_inverse(b: &WittMatrix) -> Result<WittMatrix> {
    let r = b.cols();
    let s = smith(b);
    if s.exponents.len() != r || s.exponents.iter().any(|&e| e != 0) {
        return Err(Error::NotInvertible);
    }
    let idx: Vec<usize> = (0..r).collect();
    let all: Vec<usize> = (0..b.rows()).collect();
    let top = s.u.submatrix(&idx, &all);
    Ok(&s.v * &top)
}

/// p^e with e ≥ N collapses to zero; callers use this to build diagonal
/// "μ(p)" matrices.
pub fn p_power_diagonal(ring: &WittRing, exps: &[u32]) -> WittMatrix {
    let diag: Vec<WittElem> = exps.iter().map(|&e| ring.p_pow(e)).collect();
    WittMatrix::diagonal(ring, &diag)
}
