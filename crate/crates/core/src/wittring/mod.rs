//! Truncated unramified Witt vectors W(F_{p^s}) / p^N.
//!
//! The ring is realised as (Z/p^N)[x] / (f) where f is the integer lift of
//! the lexicographically smallest monic irreducible polynomial of degree s
//! over F_p. Elements are coordinate vectors in the basis 1, θ, ..., θ^{s-1}.
//! Because the basis is a W-basis, p-divisibility is coordinate-wise, which
//! makes valuations and division by p-powers cheap.
//!
//! The Frobenius lift σ fixes Z/p^N and sends θ to the unique root of f
//! congruent to θ^p mod p; that root is found once per ring by Newton
//! iteration and cached together with its powers.

mod fp_poly;
pub mod linalg;
mod matrix;
pub mod poly;

pub use matrix::WittMatrix;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// p-adic valuation of an element at finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    /// The element vanishes modulo p^N; its true valuation is unknown but >= N.
    AtLeastPrecision,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeastPrecision => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        use Valuation::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), AtLeastPrecision) => Ordering::Less,
            (AtLeastPrecision, Finite(_)) => Ordering::Greater,
            (AtLeastPrecision, AtLeastPrecision) => Ordering::Equal,
        }
    }
}

struct RingInner {
    p: u64,
    s: usize,
    precision: u32,
    /// p^precision
    q: u64,
    /// Low coefficients f_0..f_{s-1} of the monic modulus, reduced mod q.
    modulus: Vec<u64>,
    /// σ(θ)^i for i in 0..s, as coordinate vectors.
    frob_powers: Vec<Vec<u64>>,
}

/// Descriptor of W(F_{p^s}) / p^N. Cheap to clone; shared across threads.
#[derive(Clone)]
pub struct WittRing(Arc<RingInner>);

const COEFF_LIMIT: u64 = 1 << 62;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl WittRing {
    /// Largest N with p^N inside the coefficient range.
    pub fn max_precision(p: u64) -> u32 {
        let mut n = 0;
        let mut q = 1u64;
        while let Some(next) = q.checked_mul(p).filter(|&v| v <= COEFF_LIMIT) {
            q = next;
            n += 1;
        }
        n
    }

    /// Builds W(F_{p^s}) / p^precision with the canonical modulus.
    pub fn new(p: u64, s: usize, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if s == 0 {
            return Err(Error::InvalidInput("residue degree s must be >= 1".into()));
        }
        if precision == 0 {
            return Err(Error::InvalidInput("precision must be >= 1".into()));
        }
        let q = p
            .checked_pow(precision)
            .filter(|&q| q <= COEFF_LIMIT)
            .ok_or(Error::PrecisionTooLarge { p, precision })?;
        let modulus = fp_poly::smallest_irreducible(p, s);
        // identity placeholder so that arithmetic works while we solve for σ(θ)
        let placeholder = (0..s).map(|i| unit_vec(s, i)).collect();
        let draft = WittRing(Arc::new(RingInner { p, s, precision, q, modulus: modulus.clone(), frob_powers: placeholder }));
        let sigma_theta = draft.solve_frobenius_root();
        let mut powers = Vec::with_capacity(s);
        let mut acc = draft.one();
        for _ in 0..s {
            powers.push(acc.coords.clone());
            acc = &acc * &sigma_theta;
        }
        Ok(WittRing(Arc::new(RingInner { p, s, precision, q, modulus, frob_powers: powers })))
    }

    /// Same residue field, different precision budget.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        if precision == self.precision() {
            return Ok(self.clone());
        }
        WittRing::new(self.p(), self.s(), precision)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn s(&self) -> usize {
        self.0.s
    }

    pub fn precision(&self) -> u32 {
        self.0.precision
    }

    /// p^N as an integer.
    pub fn modulus_int(&self) -> u64 {
        self.0.q
    }

    /// Low coefficients of the monic modulus (its integer lift).
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> WittElem {
        WittElem { ring: self.clone(), coords: vec![0; self.s()] }
    }

    pub fn one(&self) -> WittElem {
        self.from_int(1)
    }

    /// The residue generator θ (equals 0 when s = 1).
    pub fn theta(&self) -> WittElem {
        if self.s() == 1 {
            // x ≡ -f_0 modulo the degree-one modulus
            return self.zero() - self.from_u64(self.0.modulus[0]);
        }
        WittElem { ring: self.clone(), coords: unit_vec(self.s(), 1) }
    }

    pub fn from_int(&self, v: i64) -> WittElem {
        let q = self.0.q as i128;
        let r = (v as i128).rem_euclid(q) as u64;
        self.from_u64(r)
    }

    pub fn from_u64(&self, v: u64) -> WittElem {
        let mut coords = vec![0; self.s()];
        coords[0] = v % self.0.q;
        WittElem { ring: self.clone(), coords }
    }

    /// p^e, or zero when e >= N.
    pub fn p_pow(&self, e: u32) -> WittElem {
        if e >= self.precision() {
            return self.zero();
        }
        self.from_u64(self.p().pow(e))
    }

    pub fn from_coords(&self, coords: Vec<u64>) -> Result<WittElem> {
        if coords.len() != self.s() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} Witt coordinates, got {}",
                self.s(),
                coords.len()
            )));
        }
        let q = self.0.q;
        Ok(WittElem { ring: self.clone(), coords: coords.into_iter().map(|c| c % q).collect() })
    }

    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> WittElem {
        let q = self.0.q;
        WittElem { ring: self.clone(), coords: (0..self.s()).map(|_| rng.gen_range(0..q)).collect() }
    }

    /// Random unit: a random element whose reduction mod p is nonzero.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> WittElem {
        loop {
            let x = self.random_elem(rng);
            if x.is_unit() {
                return x;
            }
        }
    }

    /// Evaluates the modulus polynomial at `x`.
    fn eval_modulus(&self, x: &WittElem) -> WittElem {
        let mut acc = self.one();
        for c in self.0.modulus.iter().rev() {
            acc = &(&acc * x) + &self.from_u64(*c);
        }
        acc
    }

    fn eval_modulus_derivative(&self, x: &WittElem) -> WittElem {
        let s = self.s();
        let mut acc = self.from_u64(s as u64);
        for i in (1..s).rev() {
            let c = (self.0.modulus[i] as u128 * i as u128 % self.0.q as u128) as u64;
            acc = &(&acc * x) + &self.from_u64(c);
        }
        acc
    }

    fn solve_frobenius_root(&self) -> WittElem {
        let mut root = self.theta().pow(self.p());
        for _ in 0..(2 * self.precision() + 4) {
            let value = self.eval_modulus(&root);
            if value.is_zero() {
                return root;
            }
            let slope = self
                .eval_modulus_derivative(&root)
                .inverse()
                .expect("separable modulus has unit derivative at its roots");
            root = &root - &(&value * &slope);
        }
        panic!("Newton iteration for the Frobenius root failed to converge");
    }
}

impl PartialEq for WittRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.p() == other.p() && self.s() == other.s() && self.precision() == other.precision())
    }
}

impl Eq for WittRing {}

impl fmt::Debug for WittRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W(F_{}^{})/{}^{}", self.p(), self.s(), self.p(), self.precision())
    }
}

fn unit_vec(s: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; s];
    v[i] = 1;
    v
}

fn v_p(mut c: u64, p: u64) -> u32 {
    let mut v = 0;
    while c.is_multiple_of(p) {
        c /= p;
        v += 1;
    }
    v
}

/// Element of a truncated Witt ring.
#[derive(Clone)]
pub struct WittElem {
    ring: WittRing,
    coords: Vec<u64>,
}

impl WittElem {
    pub fn ring(&self) -> &WittRing {
        &self.ring
    }

    /// Coordinates in the basis 1, θ, ..., θ^{s-1}, each in [0, p^N).
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.val() == Valuation::Finite(0)
    }

    pub fn val(&self) -> Valuation {
        let p = self.ring.p();
        self.coords
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| v_p(c, p))
            .min()
            .map_or(Valuation::AtLeastPrecision, Valuation::Finite)
    }

    pub fn frobenius(&self) -> WittElem {
        let ring = &self.ring;
        let s = ring.s();
        if s == 1 {
            return self.clone();
        }
        let q = ring.0.q as u128;
        let mut out = vec![0u128; s];
        for (i, &c) in self.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, &pj) in ring.0.frob_powers[i].iter().enumerate() {
                out[j] = (out[j] + c as u128 * pj as u128) % q;
            }
        }
        WittElem { ring: ring.clone(), coords: out.into_iter().map(|c| c as u64).collect() }
    }

    /// σ^k(x).
    pub fn frobenius_pow(&self, k: usize) -> WittElem {
        let mut x = self.clone();
        for _ in 0..k % self.ring.s() {
            x = x.frobenius();
        }
        x
    }

    pub fn pow(&self, mut e: u64) -> WittElem {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<WittElem> {
        if !self.is_unit() {
            return Err(Error::NotInvertible);
        }
        let ring = &self.ring;
        let p = ring.p();
        let s = ring.s();
        // Solve (self * y) = 1 mod p via the multiplication matrix over F_p.
        let mut cols = Vec::with_capacity(s);
        for i in 0..s {
            let basis = WittElem { ring: ring.clone(), coords: unit_vec(s, i) };
            cols.push((self * &basis).coords.iter().map(|c| c % p).collect::<Vec<_>>());
        }
        let mut aug: Vec<Vec<u64>> = (0..s)
            .map(|r| {
                let mut row: Vec<u64> = (0..s).map(|c| cols[c][r]).collect();
                row.push(u64::from(r == 0));
                row
            })
            .collect();
        for col in 0..s {
            let pivot = (col..s).find(|&r| aug[r][col] != 0).ok_or(Error::NotInvertible)?;
            aug.swap(col, pivot);
            let inv = fp_poly::pow_mod(aug[col][col], p - 2, p);
            for v in aug[col].iter_mut() {
                *v = (*v as u128 * inv as u128 % p as u128) as u64;
            }
            for r in 0..s {
                if r != col && aug[r][col] != 0 {
                    let factor = aug[r][col];
                    for c in 0..=s {
                        let sub = (factor as u128 * aug[col][c] as u128 % p as u128) as u64;
                        aug[r][c] = (aug[r][c] + p - sub) % p;
                    }
                }
            }
        }
        let mut y = WittElem { ring: ring.clone(), coords: (0..s).map(|r| aug[r][s]).collect() };
        // Newton lift y <- y (2 - x y); digits double each step.
        let two = ring.from_int(2);
        loop {
            let xy = self * &y;
            if xy == ring.one() {
                return Ok(y);
            }
            y = &y * &(&two - &xy);
        }
    }

    /// x / p^e for an element with val(x) >= e. The result is only meaningful
    /// modulo p^{N-e}; its top e digits are zero.
    pub fn div_p_pow(&self, e: u32) -> WittElem {
        if e == 0 {
            return self.clone();
        }
        let pe = self.ring.p().pow(e);
        debug_assert!(self.coords.iter().all(|c| c % pe == 0), "division by p^{e} is not exact");
        WittElem { ring: self.ring.clone(), coords: self.coords.iter().map(|c| c / pe).collect() }
    }

    /// Multiplies by p^e.
    pub fn mul_p_pow(&self, e: u32) -> WittElem {
        self * &self.ring.p_pow(e)
    }

    /// Reduction into a ring of the same residue field and lower (or equal) precision.
    pub fn reduce_to(&self, ring: &WittRing) -> WittElem {
        debug_assert_eq!((ring.p(), ring.s()), (self.ring.p(), self.ring.s()));
        let q = ring.modulus_int();
        WittElem { ring: ring.clone(), coords: self.coords.iter().map(|c| c % q).collect() }
    }

    /// Lift of the same coordinates into a ring of higher precision. Only
    /// meaningful for values that are known exactly (small integral data).
    pub fn lift_to(&self, ring: &WittRing) -> WittElem {
        debug_assert_eq!((ring.p(), ring.s()), (self.ring.p(), self.ring.s()));
        WittElem { ring: ring.clone(), coords: self.coords.clone() }
    }

    /// Canonical representative of x modulo p^e: every coordinate in [0, p^e).
    pub fn residue(&self, e: u32) -> WittElem {
        if e >= self.ring.precision() {
            return self.clone();
        }
        let pe = self.ring.p().pow(e);
        WittElem { ring: self.ring.clone(), coords: self.coords.iter().map(|c| c % pe).collect() }
    }
}

impl PartialEq for WittElem {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.coords == other.coords
    }
}

impl Eq for WittElem {}

impl PartialOrd for WittElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WittElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl std::hash::Hash for WittElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl fmt::Debug for WittElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            write!(f, "{}", self.coords[0])
        } else {
            write!(f, "{:?}", self.coords)
        }
    }
}

impl<'a> Add<&'a WittElem> for &'a WittElem {
    type Output = WittElem;

    fn add(self, rhs: &'a WittElem) -> WittElem {
        debug_assert!(self.ring == rhs.ring, "ring mismatch");
        let q = self.ring.0.q;
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| (a + b) % q).collect();
        WittElem { ring: self.ring.clone(), coords }
    }
}

impl<'a> Sub<&'a WittElem> for &'a WittElem {
    type Output = WittElem;

    fn sub(self, rhs: &'a WittElem) -> WittElem {
        debug_assert!(self.ring == rhs.ring, "ring mismatch");
        let q = self.ring.0.q;
        let coords = self.coords.iter().zip(&rhs.coords).map(|(a, b)| (a + q - b) % q).collect();
        WittElem { ring: self.ring.clone(), coords }
    }
}

impl Sub for WittElem {
    type Output = WittElem;

    fn sub(self, rhs: WittElem) -> WittElem {
        &self - &rhs
    }
}

impl Add for WittElem {
    type Output = WittElem;

    fn add(self, rhs: WittElem) -> WittElem {
        &self + &rhs
    }
}

impl Neg for &WittElem {
    type Output = WittElem;

    fn neg(self) -> WittElem {
        let q = self.ring.0.q;
        let coords = self.coords.iter().map(|&a| (q - a) % q).collect();
        WittElem { ring: self.ring.clone(), coords }
    }
}

impl<'a> Mul<&'a WittElem> for &'a WittElem {
    type Output = WittElem;

    fn mul(self, rhs: &'a WittElem) -> WittElem {
        debug_assert!(self.ring == rhs.ring, "ring mismatch");
        let inner = &self.ring.0;
        let s = inner.s;
        let q = inner.q as u128;
        if s == 1 {
            let c = (self.coords[0] as u128 * rhs.coords[0] as u128 % q) as u64;
            return WittElem { ring: self.ring.clone(), coords: vec![c] };
        }
        let mut t = vec![0u128; 2 * s - 1];
        for (i, &a) in self.coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coords.iter().enumerate() {
                t[i + j] = (t[i + j] + a as u128 * b as u128) % q;
            }
        }
        // x^s = -(f_0 + f_1 x + ... + f_{s-1} x^{s-1})
        for k in (s..2 * s - 1).rev() {
            let c = t[k];
            if c == 0 {
                continue;
            }
            t[k] = 0;
            for (i, &fi) in inner.modulus.iter().enumerate() {
                let sub = c * fi as u128 % q;
                t[k - s + i] = (t[k - s + i] + q - sub) % q;
            }
        }
        WittElem { ring: self.ring.clone(), coords: t[..s].iter().map(|&c| c as u64).collect() }
    }
}

impl Mul for WittElem {
    type Output = WittElem;

    fn mul(self, rhs: WittElem) -> WittElem {
        &self * &rhs
    }
}
