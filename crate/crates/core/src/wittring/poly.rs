//! Dense univariate polynomials over a Witt ring, low degree first.

use super::{WittElem, WittMatrix, WittRing};

pub type Poly = Vec<WittElem>;

pub fn degree(a: &[WittElem]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

pub fn mul(ring: &WittRing, a: &[WittElem], b: &[WittElem]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ring.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

pub fn sub(ring: &WittRing, a: &[WittElem], b: &[WittElem]) -> Poly {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| ring.zero());
            let y = b.get(i).cloned().unwrap_or_else(|| ring.zero());
            &x - &y
        })
        .collect()
}

/// Division by a monic polynomial: a = q·b + r with deg r < deg b.
pub fn divrem_monic(ring: &WittRing, a: &[WittElem], b: &[WittElem]) -> (Poly, Poly) {
    let db = b.len() - 1;
    debug_assert!(b[db] == ring.one(), "divisor must be monic");
    let mut r: Poly = a.to_vec();
    if r.len() <= db {
        return (vec![ring.zero()], r);
    }
    let mut q = vec![ring.zero(); r.len() - db];
    for k in (db..r.len()).rev() {
        let c = r[k].clone();
        if c.is_zero() {
            continue;
        }
        q[k - db] = c.clone();
        for (i, bi) in b.iter().enumerate() {
            r[k - db + i] = &r[k - db + i] - &(&c * bi);
        }
    }
    r.truncate(db);
    (q, r)
}

/// Evaluates a polynomial at a square matrix by Horner's rule.
pub fn eval_matrix(coeffs: &[WittElem], m: &WittMatrix) -> WittMatrix {
    let ring = m.ring();
    let n = m.rows();
    let mut acc = WittMatrix::zero(ring, n, n);
    for c in coeffs.iter().rev() {
        acc = &(&acc * m) + &WittMatrix::identity(ring, n).scale(c);
    }
    acc
}

pub fn reduce_to(a: &[WittElem], ring: &WittRing) -> Poly {
    a.iter().map(|c| c.reduce_to(ring)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_inverts_multiplication() {
        let r = WittRing::new(3, 2, 6).unwrap();
        let a: Poly = vec![r.from_int(2), r.theta(), r.from_int(5), r.one()];
        let b: Poly = vec![r.from_int(7), r.one()];
        let prod = mul(&r, &a, &b);
        let (q, rem) = divrem_monic(&r, &prod, &b);
        assert_eq!(q, a);
        assert!(rem.iter().all(WittElem::is_zero));
    }

    #[test]
    fn matrix_evaluation() {
        let r = WittRing::new(5, 1, 4).unwrap();
        let m = WittMatrix::from_ints(&r, &[&[1, 2], &[3, 4]]);
        // x^2 - 5x - 2 is the characteristic polynomial
        let chi: Poly = vec![r.from_int(-2), r.from_int(-5), r.one()];
        assert!(eval_matrix(&chi, &m).is_zero());
    }
}
