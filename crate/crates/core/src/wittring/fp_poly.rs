//! Dense polynomials over the prime field F_p, just enough to pick the
//! residue-field modulus. Coefficients are stored low degree first.

pub(crate) type FpPoly = Vec<u64>;

fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let lead_inv = inv_mod(*b.last().expect("division by zero polynomial"), p);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (*r.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (c as u128 * bi as u128 % p as u128) as u64;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = trim(r);
    }
    r
}

fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    rem(&out, f, p)
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin-style test: a monic `f` of degree s is irreducible iff it shares no
/// factor with x^(p^i) - x for 1 <= i <= s/2.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let s = f.len() - 1;
    if s == 1 {
        return true;
    }
    let mut xp: FpPoly = rem(&[0, 1], f, p);
    for _ in 1..=s / 2 {
        // xp <- xp^p mod f
        let mut acc: FpPoly = vec![1];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, f, p);
            }
            base = mul_mod(&base, &base, f, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        let g = gcd(f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `s`,
/// comparing the coefficient vector (a_{s-1}, ..., a_0) with a_{s-1} most
/// significant. Returns the s low coefficients a_0..a_{s-1}.
pub(crate) fn smallest_irreducible(p: u64, s: usize) -> Vec<u64> {
    let mut digits = vec![0u64; s]; // digits[0] = a_{s-1}
    loop {
        let mut f: FpPoly = digits.iter().rev().copied().collect();
        f.push(1);
        if is_irreducible(&f, p) {
            f.pop();
            return f;
        }
        // increment, last digit (a_0) least significant
        let mut k = s;
        loop {
            k -= 1;
            digits[k] += 1;
            if digits[k] < p {
                break;
            }
            digits[k] = 0;
            assert!(k > 0, "no irreducible polynomial found");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_irreducible(f: &[u64], p: u64) -> bool {
        // brute force: no root and (for degree <= 3) that suffices; otherwise
        // trial-divide by every monic polynomial of degree <= s/2.
        let s = f.len() - 1;
        for deg in 1..=s / 2 {
            let count = p.pow(deg as u32);
            for code in 0..count {
                let mut g: Vec<u64> = (0..deg).map(|i| code / p.pow(i as u32) % p).collect();
                g.push(1);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn quadratic_over_f3_is_x2_plus_1() {
        assert_eq!(smallest_irreducible(3, 2), vec![1, 0]);
    }

    #[test]
    fn degree_one_is_x() {
        assert_eq!(smallest_irreducible(5, 1), vec![0]);
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for p in [2u64, 3, 5] {
            for s in 2..=4usize {
                let count = p.pow(s as u32);
                for code in 0..count {
                    let mut f: Vec<u64> = (0..s).map(|i| code / p.pow(i as u32) % p).collect();
                    f.push(1);
                    assert_eq!(is_irreducible(&f, p), naive_irreducible(&f, p), "p={p} f={f:?}");
                }
            }
        }
    }
}
