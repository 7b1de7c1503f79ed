//! The Calkin-Wilf tree, the Stern diatomic sequence, the Newman enumeration and the
//! empirical distribution functions F_n of the tree generations.

use crate::error::{Error, Result};
use crate::numerics::Integral;
use crate::qmark;
use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use std::cmp::Ordering;

/// Largest generation materialized in memory; deeper ones are streamed.
pub const MAX_MATERIALIZED: u32 = 26;
/// Largest generation whose members fit in u64 numerators and denominators.
pub const MAX_STREAMED: u32 = 64;

/// A positive tree member a/b held in machine words (reduced, b > 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        Fraction { num, den }
    }

    pub fn recip(self) -> Self {
        Fraction { num: self.den, den: self.num }
    }

    pub fn to_rational(self) -> Rational {
        Rational::from((self.num, self.den))
    }

    pub fn to_float(self, prec: u32) -> Float {
        Float::with_val(prec, self.num) / self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(self, x: &Rational) -> Ordering {
        let lhs = Integer::from(self.num) * x.denom();
        let rhs = Integer::from(self.den) * x.numer();
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Generation n of the tree in breadth-first order.
#[derive(Clone, Debug)]
pub struct TreeGeneration {
    pub n: u32,
    pub members: Vec<Fraction>,
}

/// F(x) - F_n(x) at one grid point.
#[derive(Clone, Debug)]
pub struct Deviation {
    pub n: u32,
    pub x: Rational,
    pub delta: Rational,
}

/// Stern's diatomic sequence.
pub fn stern(n: u64) -> u64 {
    let (mut a, mut b) = (1u64, 0u64);
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            b += a;
        } else {
            a += b;
        }
        k >>= 1;
    }
    b
}

/// Member j (0-based) of generation n: s(k)/s(k+1) with k = 2^{n-1} + j.
pub fn member(n: u32, j: u64) -> Fraction {
    let k = (1u64 << (n - 1)) + j;
    Fraction::new(stern(k), stern(k + 1))
}

/// Newman's successor 1/(2[x] + 1 - x) on machine words.
pub fn newman_step(x: Fraction) -> Fraction {
    let fl = x.num / x.den;
    Fraction::new(x.den, (2 * fl + 1) * x.den - x.num)
}

/// Newman's successor for an arbitrary positive rational.
pub fn newman_next(x: &Rational) -> Result<Rational> {
    if *x <= 0 {
        return Err(Error::Domain("newman_next needs x > 0".into()));
    }
    let fl = Integer::from(x.numer() / x.denom());
    let d = Rational::from(fl * 2u32 + 1u32) - x;
    Ok(d.recip())
}

fn check_streamed(n: u32) -> Result<()> {
    if n == 0 || n > MAX_STREAMED {
        return Err(Error::SizeLimit(format!("generation {n} outside 1..={MAX_STREAMED}")));
    }
    Ok(())
}

/// Materialized generation n, 1 <= n <= 26.
pub fn generation(n: u32) -> Result<TreeGeneration> {
    if n == 0 || n > MAX_MATERIALIZED {
        return Err(Error::SizeLimit(format!("generation {n} outside 1..={MAX_MATERIALIZED}; use for_each_member")));
    }
    let mut members = Vec::with_capacity(1 << (n - 1));
    for_each_member(n, |_, x| members.push(x))?;
    Ok(TreeGeneration { n, members })
}

/// Calls `f(j, x_j)` for every member of generation n in breadth-first order.
pub fn for_each_member(n: u32, mut f: impl FnMut(u64, Fraction)) -> Result<()> {
    check_streamed(n)?;
    let count = 1u64 << (n - 1);
    let mut x = member(n, 0);
    for j in 0..count {
        f(j, x);
        if j + 1 < count {
            x = newman_step(x);
        }
    }
    Ok(())
}

/// Number of members of generation n satisfying `pred`, split over subtrees.
pub fn par_count(n: u32, pred: impl Fn(Fraction) -> bool + Sync) -> Result<u64> {
    check_streamed(n)?;
    let count = 1u64 << (n - 1);
    let blocks: u64 = if n > 12 { 1 << 8 } else { 1 };
    let size = count / blocks;
    Ok((0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut x = member(n, b * size);
            let mut c = 0u64;
            for j in 0..size {
                if pred(x) {
                    c += 1;
                }
                if j + 1 < size {
                    x = newman_step(x);
                }
            }
            c
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum())
}

/// F_n(x) = 2^{1-n} #{members <= x}, exact.
pub fn empirical_cdf(n: u32, x: &Float) -> Result<Rational> {
    let x = x.to_rational().ok_or_else(|| Error::Domain("x must be finite".into()))?;
    empirical_cdf_rational(n, &x)
}

pub fn empirical_cdf_rational(n: u32, x: &Rational) -> Result<Rational> {
    if *x < 0 {
        return Err(Error::Domain("empirical_cdf needs x >= 0".into()));
    }
    let c = par_count(n, |m| m.cmp_rational(x) != Ordering::Greater)?;
    Ok(Rational::from((c, Integer::from(1) << (n - 1))))
}

/// δ_n(x) = F(x) - F_n(x) on a grid, with F evaluated exactly.
pub fn deviations(n: u32, grid: &[Rational]) -> Result<Vec<Deviation>> {
    let mut sorted = generation(n)?.members;
    sorted.sort();
    let scale = Integer::from(1) << (n - 1);
    grid.iter()
        .map(|x| {
            let below = sorted.partition_point(|m| m.cmp_rational(x) != Ordering::Greater);
            let fn_x = Rational::from((below as u64, scale.clone()));
            let f = qmark::f_exact(x)?.to_rational();
            Ok(Deviation { n, x: x.clone(), delta: f - fn_x })
        })
        .collect()
}

/// Integration domain for `quadrature_df`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// [0, 1] against d?(x) = 2 dF(x).
    Unit,
    /// [0, ∞) against dF(x).
    HalfLine,
}

fn generation_average(omega: &dyn Fn(&Float) -> Float, n: u32, domain: Domain, prec: u32) -> Result<Float> {
    let mut acc = Float::new(prec + 16);
    match domain {
        Domain::HalfLine => {
            for_each_member(n, |_, x| acc += omega(&x.to_float(prec)))?;
            Ok(Float::with_val(prec, acc >> (n - 1)))
        }
        Domain::Unit => {
            if n < 2 {
                return Err(Error::Domain("unit-interval average needs n >= 2".into()));
            }
            for_each_member(n, |_, x| {
                if x.num < x.den {
                    acc += omega(&x.to_float(prec));
                }
            })?;
            Ok(Float::with_val(prec, acc >> (n - 2)))
        }
    }
}

/// Generation average of ω against dF (half-line) or d? (unit interval).
///
/// The value is the generation-n average; the error is its distance to the
/// generation-(n+1) average.
pub fn quadrature_df(omega: &dyn Fn(&Float) -> Float, n: u32, domain: Domain, prec: u32) -> Result<Integral> {
    let a = generation_average(omega, n, domain, prec)?;
    let b = generation_average(omega, n + 1, domain, prec)?;
    let err = Float::with_val(prec, &b - &a).abs();
    Ok(Integral { value: a, err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fr(a: u64, b: u64) -> Fraction {
        Fraction::new(a, b)
    }

    #[test]
    fn generations_match_diagram() {
        assert_eq!(generation(1).unwrap().members, vec![fr(1, 1)]);
        assert_eq!(generation(3).unwrap().members, vec![fr(1, 3), fr(3, 2), fr(2, 3), fr(3, 1)]);
        assert_eq!(generation(4).unwrap().members[0], fr(1, 4));
        assert!(generation(27).is_err());
    }

    #[test]
    fn children_rule() {
        // generation n+1 is the list of (a/(a+b), (a+b)/b) over generation n
        for n in 1..10 {
            let g = generation(n).unwrap().members;
            let h = generation(n + 1).unwrap().members;
            for (j, x) in g.iter().enumerate() {
                assert_eq!(h[2 * j], fr(x.num, x.num + x.den));
                assert_eq!(h[2 * j + 1], fr(x.num + x.den, x.den));
            }
        }
    }

    #[test]
    fn stern_values() {
        let head = [0, 1, 1, 2, 1, 3, 2, 3, 1, 4, 3, 5, 2, 5, 3, 4, 1];
        for (n, v) in head.iter().enumerate() {
            assert_eq!(stern(n as u64), *v);
        }
        assert_eq!(stern(5), 3);
        assert_eq!(stern(14), 3);
        assert_eq!(stern(15), 4);
    }

    #[test]
    fn newman_examples() {
        let r = |a: i64, b: i64| Rational::from((a, b));
        assert_eq!(newman_next(&r(1, 1)).unwrap(), r(1, 2));
        assert_eq!(newman_next(&r(1, 2)).unwrap(), r(2, 1));
        assert_eq!(newman_next(&r(3, 2)).unwrap(), r(2, 3));
        assert!(newman_next(&r(0, 1)).is_err());
    }

    #[test]
    fn newman_concatenates_generations() {
        let n = 12;
        let mut x = Rational::from(1);
        let mut seq = vec![x.clone()];
        for _ in 0..(1u64 << n) - 2 {
            x = newman_next(&x).unwrap();
            seq.push(x.clone());
        }
        let mut want = Vec::new();
        for g in 1..=n {
            want.extend(generation(g).unwrap().members.into_iter().map(Fraction::to_rational));
        }
        assert_eq!(seq, want);
    }

    #[test]
    fn stern_pairs_match_generations() {
        for n in 1..=10u32 {
            let g = generation(n).unwrap().members;
            for (j, x) in g.iter().enumerate() {
                let k = (1u64 << (n - 1)) + j as u64;
                assert_eq!((x.num, x.den), (stern(k), stern(k + 1)));
            }
        }
    }

    #[test]
    fn closed_under_reciprocal_and_digit_sums() {
        for n in 1..=14 {
            let g = generation(n).unwrap().members;
            let set: std::collections::HashSet<_> = g.iter().copied().collect();
            assert_eq!(set.len(), g.len());
            for x in &g {
                assert!(set.contains(&x.recip()));
                let cf = qmark::cf_of_rational(&x.to_rational());
                assert_eq!(cf.digit_sum(), n as u64);
            }
        }
    }

    #[test]
    fn empirical_cdf_examples() {
        let half = Float::with_val(64, 0.5);
        assert_eq!(empirical_cdf(2, &half).unwrap(), Rational::from((1, 2)));
        assert_eq!(empirical_cdf(3, &Float::with_val(64, 1)).unwrap(), Rational::from((1, 2)));
        assert_eq!(empirical_cdf(12, &Float::with_val(64, 1e9)).unwrap(), 1);
    }

    #[test]
    fn convergence_bound_small_n() {
        let grid: Vec<Rational> = (0..2000).map(|j| Rational::from((j, 2000 - j))).collect();
        for n in [2u32, 5, 8] {
            let bound = Rational::from((1, Integer::from(1) << n));
            for d in deviations(n, &grid).unwrap() {
                assert!(Rational::from(d.delta.abs_ref()) <= bound, "n={n} x={}", d.x);
            }
        }
    }

    #[test]
    fn quadrature_examples() {
        let p = 64;
        let one = quadrature_df(&|_| Float::with_val(p, 1), 6, Domain::HalfLine, p).unwrap();
        assert_eq!(one.value, 1);
        let m1 = quadrature_df(&|x| x.clone(), 18, Domain::HalfLine, p).unwrap();
        assert!((m1.value.to_f64() - 1.5).abs() < 1e-4);
        let u1 = quadrature_df(&|x| x.clone(), 18, Domain::Unit, p).unwrap();
        assert!((u1.value.to_f64() - 0.5).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn streaming_matches_stern(n in 1u32..40, j in any::<u64>()) {
            let j = j % (1u64 << (n - 1));
            let x = member(n, j);
            let k = (1u64 << (n - 1)) + j;
            prop_assert_eq!(x, Fraction::new(stern(k), stern(k + 1)));
            if j + 1 < (1u64 << (n - 1)) {
                prop_assert_eq!(newman_step(x), member(n, j + 1));
            }
        }
    }
}
