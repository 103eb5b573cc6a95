//! Convex polygons with rational slopes and the dominance order.
//!
//! A polygon is stored as its nondecreasing slope multiset; vertices are
//! derived. `lies_above(P, Q)` is the order P ⪯ Q: every partial slope sum
//! of P dominates the corresponding partial sum of Q.

use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = Rational64;

/// Formats a rational as `"num/den"` (always with a denominator).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ConvexPolygon {
    slopes: Vec<Rational>,
}

impl ConvexPolygon {
    pub fn from_slopes(slopes: impl IntoIterator<Item = Rational>) -> Self {
        let mut slopes: Vec<Rational> = slopes.into_iter().collect();
        slopes.sort();
        ConvexPolygon { slopes }
    }

    pub fn from_integers(slopes: &[i64]) -> Self {
        Self::from_slopes(slopes.iter().map(|&v| Rational::from_integer(v)))
    }

    /// Builds a polygon from (slope, multiplicity) segments.
    pub fn from_segments(segments: &[(Rational, usize)]) -> Self {
        Self::from_slopes(segments.iter().flat_map(|&(s, k)| std::iter::repeat_n(s, k)))
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn height(&self) -> usize {
        self.slopes.len()
    }

    pub fn total_rise(&self) -> Rational {
        self.slopes.iter().sum()
    }

    /// Partial sums y_0 = 0, y_1, ..., y_n.
    pub fn partial_sums(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        let mut out = vec![acc];
        for s in &self.slopes {
            acc += s;
            out.push(acc);
        }
        out
    }

    /// Distinct slopes with multiplicities, ascending.
    pub fn segments(&self) -> Vec<(Rational, usize)> {
        let mut out: Vec<(Rational, usize)> = Vec::new();
        for &s in &self.slopes {
            match out.last_mut() {
                Some((t, k)) if *t == s => *k += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    pub fn is_isoclinic(&self) -> bool {
        self.slopes.windows(2).all(|w| w[0] == w[1])
    }

    pub fn has_integer_slopes(&self) -> bool {
        self.slopes.iter().all(|s| s.is_integer())
    }

    /// Every slope with reduced denominator q occurs with multiplicity
    /// divisible by q after scaling all multiplicities by `scale`.
    pub fn satisfies_denominator_law(&self, scale: usize) -> bool {
        self.segments().iter().all(|(s, k)| ((k * scale) as i64).is_multiple_of(s.denom()))
    }

    /// Concatenation of polygons of consecutive slope ranges.
    pub fn concat(parts: &[ConvexPolygon]) -> Self {
        Self::from_slopes(parts.iter().flat_map(|p| p.slopes.iter().copied()))
    }

    /// Multiplies every multiplicity by `k`.
    pub fn repeat_multiplicities(&self, k: usize) -> Self {
        Self::from_slopes(self.slopes.iter().flat_map(|&s| std::iter::repeat_n(s, k)))
    }

    /// Adds `shift` to every slope.
    pub fn shifted(&self, shift: Rational) -> Self {
        Self::from_slopes(self.slopes.iter().map(|s| s + shift))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.slopes.iter().map(format_rational).collect()
    }

    pub fn from_strings(items: &[String]) -> Result<Self> {
        Ok(Self::from_slopes(items.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?))
    }
}

impl fmt::Display for ConvexPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.slopes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

fn check_heights(p: &ConvexPolygon, q: &ConvexPolygon) -> Result<()> {
    if p.height() != q.height() {
        return Err(Error::HeightMismatch(p.height(), q.height()));
    }
    Ok(())
}

/// P ⪯ Q: Σ_{i≤l} (r_i - s_i) ≥ 0 for every l. Endpoints are not compared.
pub fn lies_above(p: &ConvexPolygon, q: &ConvexPolygon) -> Result<bool> {
    check_heights(p, q)?;
    let mut acc = Rational::zero();
    for (r, s) in p.slopes.iter().zip(&q.slopes) {
        acc += r - s;
        if acc.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Vertices of the polygon graph starting at (0, 0).
pub fn break_points(p: &ConvexPolygon) -> Vec<(usize, Rational)> {
    let sums = p.partial_sums();
    let n = p.height();
    let mut out = vec![(0, Rational::zero())];
    for l in 1..n {
        if p.slopes[l - 1] < p.slopes[l] {
            out.push((l, sums[l]));
        }
    }
    if n > 0 {
        out.push((n, sums[n]));
    }
    out
}

/// Interior break points of P at which P and Q have equal partial sums.
pub fn contact_break_points(p: &ConvexPolygon, q: &ConvexPolygon) -> Result<Vec<usize>> {
    check_heights(p, q)?;
    let ps = p.partial_sums();
    let qs = q.partial_sums();
    let n = p.height();
    Ok(break_points(p)
        .into_iter()
        .map(|(x, _)| x)
        .filter(|&l| 0 < l && l < n && ps[l] == qs[l])
        .collect())
}

/// Kottwitz point: one integer per factor (val det of the factor block),
/// with the polygon-compatible value val det / m alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KottwitzPoint {
    pub factors: Vec<KottwitzFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KottwitzFactor {
    pub val_det: i64,
    pub normalized: Rational,
}

impl KottwitzPoint {
    pub fn gl(val_det: i64) -> Self {
        KottwitzPoint { factors: vec![KottwitzFactor { val_det, normalized: Rational::from_integer(val_det) }] }
    }

    /// For an EL factor with O_E of degree m.
    pub fn el(val_det: i64, m: usize) -> Self {
        KottwitzPoint {
            factors: vec![KottwitzFactor { val_det, normalized: Rational::new(val_det, m as i64) }],
        }
    }
}

/// Least common multiple of the slope denominators.
pub fn denominator_lcm(p: &ConvexPolygon) -> i64 {
    p.slopes.iter().fold(1i64, |acc, s| acc.lcm(s.denom()))
}
