//! Deterministic self-test: the fixture corpus plus reduced property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adlv::adlv_hn_compare;
use crate::deformnum::{two_slope_report, unipotent_dim};
use crate::eltype::{b_set, el_newton, el_sigma_hodge, el_type, is_mu_ordinary, ELType};
use crate::error::{Error, Result};
use crate::fixtures::{self, ElBlock};
use crate::hodgenewton::{hn_decompose, hn_levis, hn_reducible, LeviPartition};
use crate::isocrystal::{hodge_polygon, kottwitz_point, newton_polygon, sigma_conjugate, slope_decomposition};
use crate::polygon::{lies_above, ConvexPolygon, Rational};
use crate::wittring::{WittMatrix, WittRing};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String>) -> CheckResult {
    match f() {
        Ok(detail) => CheckResult { name, passed: true, detail },
        Err(e) => CheckResult { name, passed: false, detail: format!("{}: {e}", e.kind()) },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvariantViolation(msg()))
    }
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn run_selftest(seed: u64) -> SelftestReport {
    let checks = vec![
        check("fixtures", fixture_values),
        check("mazur", || mazur(seed, 40)),
        check("conjugation", || conjugation(seed, 20)),
        check("decomposition", || decomposition(seed, 8)),
        check("el_consistency", || el_consistency(seed, 10)),
        check("b_set", b_set_maximality),
        check("adlv", adlv_comparison),
        check("deformation", deformation),
    ];
    let passed = checks.iter().all(|c| c.passed);
    SelftestReport { seed, passed, checks }
}

fn fixture_values() -> Result<String> {
    let half = ConvexPolygon::from_slopes([r(1, 2), r(1, 2)]);
    let expect = [
        ("F1", ConvexPolygon::from_integers(&[0, 0]), ConvexPolygon::from_integers(&[0, 0])),
        ("F2", ConvexPolygon::from_integers(&[0, 1]), ConvexPolygon::from_integers(&[0, 1])),
        ("F3", half, ConvexPolygon::from_integers(&[0, 1])),
        ("F4", ConvexPolygon::from_slopes([r(1, 2)]), ConvexPolygon::from_slopes([r(1, 2)])),
        ("F5", ConvexPolygon::from_slopes([r(0, 1), r(1, 2)]), ConvexPolygon::from_slopes([r(0, 1), r(1, 2)])),
    ];
    let mut lines = Vec::new();
    for (fx, (name, nu, second)) in fixtures::all().into_iter().zip(expect) {
        let got_nu = el_newton(&fx.el)?;
        // F3 is pinned by its Hodge polygon, the others by μ̄
        let got_second =
            if name == "F3" { hodge_polygon(&fx.crystal)? } else { el_sigma_hodge(&el_type(&fx.el)?) };
        ensure(got_nu == nu && got_second == second, || {
            format!("{name}: got ({got_nu}, {got_second}), expected ({nu}, {second})")
        })?;
        lines.push(format!("{name} {got_nu} {got_second}"));
    }
    let f3 = fixtures::f3();
    let mu3 = el_sigma_hodge(&el_type(&f3.el)?);
    ensure(hn_levis(&el_newton(&f3.el)?, &mu3)?.is_none(), || "F3 reported reducible".into())?;
    ensure(is_mu_ordinary(&fixtures::f4().el)?, || "F4 is not μ-ordinary".into())?;
    let f5 = fixtures::f5();
    let nu5 = el_newton(&f5.el)?;
    let part = LeviPartition::new(vec![1, 1])?;
    ensure(hn_reducible(&nu5, &el_sigma_hodge(&el_type(&f5.el)?), &part)?, || "F5 not reducible".into())?;
    Ok(lines.join("; "))
}

fn mazur(seed: u64, trials: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let p = *[2u64, 3, 5].choose(&mut rng).unwrap();
        let s = rng.gen_range(1..=2);
        let n = rng.gen_range(1..=4);
        let w = WittRing::new(p, s, 16)?;
        let (x, _) = fixtures::random_crystal(&w, n, 7, &mut rng);
        let nu = newton_polygon(&x)?;
        let hodge = hodge_polygon(&x)?;
        ensure(lies_above(&nu, &hodge)? && nu.total_rise() == hodge.total_rise(), || {
            format!("Mazur fails: ν = {nu}, Hodge = {hodge}")
        })?;
        ensure(nu.satisfies_denominator_law(1), || format!("denominator law fails for {nu}"))?;
    }
    Ok(format!("{trials} crystals"))
}

fn conjugation(seed: u64, trials: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5157);
    for _ in 0..trials {
        let p = *[2u64, 3, 5].choose(&mut rng).unwrap();
        let s = rng.gen_range(1..=2);
        let n = rng.gen_range(1..=4);
        let w = WittRing::new(p, s, 16)?;
        let (x, _) = fixtures::random_crystal(&w, n, 7, &mut rng);
        let g = WittMatrix::random_unit(&w, n, &mut rng);
        let y = sigma_conjugate(&x, &g)?;
        ensure(newton_polygon(&x)? == newton_polygon(&y)? && kottwitz_point(&x)? == kottwitz_point(&y)?, || {
            "σ-conjugation changed an invariant".into()
        })?;
    }
    Ok(format!("{trials} pairs"))
}

/// Slope choices for plain round-trip trials: (a, q) with slope a/q.
const SLOPES: [(u32, usize); 5] = [(0, 1), (1, 2), (1, 1), (1, 3), (2, 3)];

pub(crate) fn plain_trial<R: Rng + ?Sized>(rng: &mut R) -> Result<()> {
    let p = *[2u64, 3, 5].choose(rng).unwrap();
    let w = WittRing::new(p, 1, WittRing::max_precision(p))?;
    let mut parts: Vec<(u32, usize)> = Vec::new();
    let mut height = 0;
    while parts.len() < 2 || (height < 4 && rng.gen_bool(0.5)) {
        let &(a, q) = SLOPES.choose(rng).unwrap();
        if height + q > 5 || parts.iter().any(|&(b, k)| r(b as i64, k as i64) == r(a as i64, q as i64)) {
            if parts.len() >= 2 {
                break;
            }
            continue;
        }
        parts.push((a, q));
        height += q;
    }
    let x = fixtures::multi_slope(&w, &parts)?;
    let g = WittMatrix::random_unit(&w, height, rng);
    let y = sigma_conjugate(&x, &g)?;
    let dec = slope_decomposition(&y)?;
    let mut expected: Vec<(Rational, usize)> = parts.iter().map(|&(a, q)| (r(a as i64, q as i64), q)).collect();
    expected.sort();
    let got: Vec<(Rational, usize)> = dec.components.iter().map(|c| (c.slope, c.height())).collect();
    ensure(got == expected, || format!("components {got:?}, expected {expected:?}"))?;
    for c in &dec.components {
        let np = newton_polygon(&c.crystal)?;
        ensure(np == ConvexPolygon::from_slopes(vec![c.slope; c.height()]), || {
            format!("component of slope {} has polygon {np}", c.slope)
        })?;
    }
    ensure(dec.isogeny_denominator <= dec.guard, || "isogeny denominator exceeds the guard".into())
}

pub(crate) fn el_trial<R: Rng + ?Sized>(rng: &mut R) -> Result<()> {
    let p = *[2u64, 3, 5].choose(rng).unwrap();
    let w = WittRing::new(p, 2, WittRing::max_precision(p))?;
    let kinds = [ElBlock::Etale, ElBlock::Half, ElBlock::Multiplicative];
    let count = rng.gen_range(2..=3);
    let blocks: Vec<ElBlock> = (0..count).map(|_| *kinds.choose(rng).unwrap()).collect();
    let sx = fixtures::el_sum(&w, &blocks)?;
    let g = fixtures::random_graded_unit(&w, sx.grading(), 2, rng);
    let y = sigma_conjugate(sx.crystal(), &g)?;
    let sy = crate::eltype::el_validate(&y, 2, sx.grading())?;
    let nu = el_newton(&sy)?;
    let mu = el_sigma_hodge(&el_type(&sy)?);
    let slope = |b: &ElBlock| match b {
        ElBlock::Etale => r(0, 1),
        ElBlock::Half => r(1, 2),
        ElBlock::Multiplicative => r(1, 1),
    };
    let expected = ConvexPolygon::from_slopes(blocks.iter().map(slope));
    ensure(nu == expected && nu == mu, || format!("ν = {nu}, μ̄ = {mu}, built {expected}"))?;
    let Some(part) = hn_levis(&nu, &mu)? else {
        return ensure(nu.is_isoclinic(), || "reducible data without a Levi".into());
    };
    let rep = hn_decompose(&sy, &part)?;
    let segments = expected.segments();
    ensure(rep.factors.len() == segments.len(), || "wrong number of factors".into())?;
    for (f, (s, k)) in rep.factors.iter().zip(segments) {
        ensure(f.nu == ConvexPolygon::from_slopes(vec![s; k]) && f.mu_bar == f.nu, || {
            format!("factor ν = {}, μ̄ = {}, expected slope {s} × {k}", f.nu, f.mu_bar)
        })?;
        ensure(is_mu_ordinary(&f.structure)?, || "factor is not μ-ordinary".into())?;
    }
    ensure(rep.isogeny_denominator == 0, || "graded split is not integral".into())
}

fn decomposition(seed: u64, trials: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdec0);
    for k in 0..trials {
        if k % 2 == 0 {
            plain_trial(&mut rng)?;
        } else {
            el_trial(&mut rng)?;
        }
    }
    Ok(format!("{trials} trials"))
}

fn el_consistency(seed: u64, trials: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe1);
    let mut structures = vec![fixtures::f4().el, fixtures::f5().el];
    for _ in 0..trials {
        let p = *[2u64, 3, 5].choose(&mut rng).unwrap();
        let m = rng.gen_range(1..=2);
        let d = rng.gen_range(1..=2);
        let w = WittRing::new(p, 2, 16)?;
        structures.push(fixtures::random_el(&w, m, d, &mut rng)?);
    }
    for sx in &structures {
        let plain = newton_polygon(sx.crystal())?;
        let el = el_newton(sx)?;
        ensure(el.repeat_multiplicities(sx.m()) == plain, || format!("{plain} is not {} × {el}", sx.m()))?;
        ensure(el.satisfies_denominator_law(sx.m()) && plain.satisfies_denominator_law(1), || {
            format!("denominator law fails for {el}")
        })?;
        ensure(lies_above(&el, &el_sigma_hodge(&el_type(sx)?))?, || "generalized Mazur fails".into())?;
    }
    Ok(format!("{} structures", structures.len()))
}

fn b_set_maximality() -> Result<String> {
    let mut count = 0;
    for (d, m) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (4, 1)] {
        let mut f = vec![0; m];
        loop {
            let t = ELType::new(d, f.clone())?;
            let set = b_set(&t)?;
            let mu = el_sigma_hodge(&t);
            ensure(set.first() == Some(&mu), || format!("μ̄ is not first for {t:?}"))?;
            for nu in &set {
                ensure(lies_above(nu, &mu)? && nu.satisfies_denominator_law(m), || format!("bad member {nu}"))?;
            }
            count += 1;
            if !next_f(&mut f, d) {
                break;
            }
        }
    }
    Ok(format!("{count} types"))
}

pub(crate) fn next_f(f: &mut [usize], d: usize) -> bool {
    for x in f.iter_mut() {
        if *x < d {
            *x += 1;
            return true;
        }
        *x = 0;
    }
    false
}

fn adlv_comparison() -> Result<String> {
    let f2 = fixtures::f2();
    let cmp = adlv_hn_compare(&f2.el, &LeviPartition::new(vec![1, 1])?, &ConvexPolygon::from_integers(&[0, 1]), 1)?;
    ensure(cmp.equal, || format!("window counts differ: {} vs {}", cmp.count_g, cmp.count_m))?;
    Ok(format!("count {}", cmp.count_g))
}

fn deformation() -> Result<String> {
    ensure(unipotent_dim(&ELType::new(2, vec![1])?) == 1, || "classical dimension is not 1".into())?;
    let f5 = fixtures::f5();
    let rep = hn_decompose(&f5.el, &LeviPartition::new(vec![1, 1])?)?;
    let report = two_slope_report(&rep.factors[0].el_type, &rep.factors[1].el_type)?;
    let sum: usize = report.f_prime.iter().map(|&x| x as usize).sum();
    ensure(sum == 1 && report.d_prime_max == 1 && report.defspace_dim == 1, || format!("{report:?}"))?;
    Ok(format!("f' = {:?}", report.f_prime))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_and_is_deterministic() {
        let a = run_selftest(7);
        assert!(a.passed, "{a:#?}");
        assert_eq!(a, run_selftest(7));
    }
}
