//! The p-adic distribution of the Calkin-Wilf tree: the Markov chains on p-adic
//! balls, the limit measures μ_p(z, ν), the zeta function Z_p and ζ_T.

use crate::error::{Error, Result};
use crate::numerics::{gamma, zeta};
use crate::tree::{par_count, Fraction};
use num_complex::Complex64;
use rug::{Integer, Rational};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

/// Largest orbit the builder accepts.
pub const MAX_STATES: u64 = 1_000_000;
/// Largest orbit on which the primitivity search runs.
pub const MAX_PRIMITIVITY_STATES: usize = 4096;

/// The residue datum of a state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Residue {
    /// Centre of the ball {x : ord_p(x - i) >= κ}, reduced mod p^κ.
    Value(Rational),
    /// b ≡ 0 mod p, used by the κ = 1 chain.
    Infinity,
    /// The outside state G(0, -κ) = {x : ord_p(x) <= -κ}.
    Outside,
}

/// A state (i, κ) of a chain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdmissiblePair {
    pub p: u64,
    pub i: Residue,
    pub kappa: i64,
}

impl fmt::Display for AdmissiblePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.i {
            Residue::Value(r) => write!(f, "F({r},{})", self.kappa),
            Residue::Infinity => write!(f, "F(inf,{})", self.kappa),
            Residue::Outside => write!(f, "G(0,-{})", self.kappa),
        }
    }
}

/// A finite chain v_{n+1} = P v_n with its states; P is stored by rows as
/// (column, weight) lists.
#[derive(Clone, Debug)]
pub struct MarkovOrbit {
    pub p: u64,
    pub kappa: i64,
    pub states: Vec<AdmissiblePair>,
    pub rows: Vec<Vec<(usize, Rational)>>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{p} is not prime")))
    }
}

fn pow(p: u64, k: i64) -> Integer {
    Integer::from(Integer::u_pow_u(p as u32, k as u32))
}

fn ord_int(x: &Integer, p: u64) -> i64 {
    let mut x = x.clone().abs();
    let mut k = 0;
    while x.is_divisible_u(p as u32) {
        x /= p as u32;
        k += 1;
    }
    k
}

/// ord_p(x), or None for x = 0.
pub fn ord(x: &Rational, p: u64) -> Option<i64> {
    if *x == 0 {
        return None;
    }
    Some(ord_int(x.numer(), p) - ord_int(x.denom(), p))
}

/// The canonical centre of i + p^k Z_p: an integer in [0, p^k) when ord(i) >= 0,
/// else u p^{-λ} with p ∤ u and 0 <= u < p^{k+λ}.
pub fn reduce(i: &Rational, k: i64, p: u64) -> Result<Rational> {
    let v = ord(i, p).unwrap_or(i64::MAX);
    if v >= k {
        if k <= 0 {
            return Err(Error::Inadmissible(format!("({i}, {k}) at p = {p}")));
        }
        return Ok(Rational::new());
    }
    let lam = (-v).max(0);
    if k + lam < 1 {
        return Err(Error::Inadmissible(format!("({i}, {k}) at p = {p}")));
    }
    let modulus = pow(p, k + lam);
    // i p^λ = a / b with p ∤ b
    let scaled = i * Rational::from(pow(p, lam));
    let (a, b) = scaled.into_numer_denom();
    let binv = b.invert(&modulus).map_err(|_| Error::Inadmissible(format!("denominator of {i} not invertible mod p")))?;
    let u = (a * binv).div_rem_euc(modulus.clone()).1;
    Ok(Rational::from((u, pow(p, lam))))
}

fn ball(p: u64, i: Rational, kappa: i64) -> AdmissiblePair {
    AdmissiblePair { p, i: Residue::Value(i), kappa }
}

/// τ(i, κ) = ((i - 1) mod p^κ, κ).
pub fn tau(i: &Rational, kappa: i64, p: u64) -> Result<AdmissiblePair> {
    Ok(ball(p, reduce(&Rational::from(i - 1u32), kappa, p)?, kappa))
}

/// σ(i, κ) = (i/(1-i) mod p^{κ₀}, κ₀) for i ≠ 1, with κ₀ = κ when i is an integer
/// not ≡ 1 mod p, κ - 2 ord(1-i) when i ≡ 1 mod p, and κ - 2 ord(i) otherwise.
pub fn sigma(i: &Rational, kappa: i64, p: u64) -> Result<AdmissiblePair> {
    if *i == 1 {
        return Err(Error::Inadmissible("σ is undefined at i = 1".into()));
    }
    let one_minus = 1u32 - i.clone();
    let k0 = match ord(i, p) {
        Some(v) if v < 0 => kappa - 2 * v,
        _ => match ord(&one_minus, p) {
            Some(w) if w > 0 => kappa - 2 * w,
            _ => kappa,
        },
    };
    let image = Rational::from(i / &one_minus);
    Ok(ball(p, reduce(&image, k0, p)?, k0))
}

/// The two sources of a state, each with weight 1/2.
fn sources(s: &AdmissiblePair) -> Result<[AdmissiblePair; 2]> {
    let p = s.p;
    let k = s.kappa;
    match &s.i {
        Residue::Outside => Ok([s.clone(), ball(p, reduce(&Rational::from(-1), k, p)?, k)]),
        Residue::Value(i) if *i == 1 => Ok([ball(p, Rational::new(), k), AdmissiblePair { p, i: Residue::Outside, kappa: k }]),
        Residue::Value(i) => Ok([tau(i, k, p)?, sigma(i, k, p)?]),
        Residue::Infinity => Err(Error::Invalid("the point at infinity belongs to the κ = 1 chain only".into())),
    }
}

fn add_row(row: &mut Vec<(usize, Rational)>, col: usize) {
    let half = Rational::from((1, 2));
    match row.iter_mut().find(|(c, _)| *c == col) {
        Some((_, w)) => *w += half,
        None => row.push((col, half)),
    }
}

/// ℓ_κ = p^κ + p^{κ-1}.
pub fn orbit_length(p: u64, kappa: i64) -> Integer {
    pow(p, kappa) + pow(p, kappa - 1)
}

/// The orbit of G(0, -κ): the states reachable through the recurrences, each
/// row holding the two sources with weight 1/2 (or one with weight 1).
pub fn orbit(p: u64, kappa: i64) -> Result<MarkovOrbit> {
    check_prime(p)?;
    if kappa < 1 {
        return Err(Error::Invalid("κ must be positive".into()));
    }
    if kappa > 40 || orbit_length(p, kappa) > MAX_STATES {
        return Err(Error::SizeLimit(format!("orbit of p = {p}, κ = {kappa} exceeds {MAX_STATES} states")));
    }
    let start = AdmissiblePair { p, i: Residue::Outside, kappa };
    let mut index: HashMap<AdmissiblePair, usize> = HashMap::new();
    let mut states = vec![start.clone()];
    index.insert(start, 0);
    let mut rows = Vec::new();
    let mut next = 0;
    while next < states.len() {
        let mut row = Vec::new();
        for src in sources(&states[next])? {
            let id = match index.get(&src) {
                Some(&id) => id,
                None => {
                    states.push(src.clone());
                    index.insert(src, states.len() - 1);
                    states.len() - 1
                }
            };
            add_row(&mut row, id);
        }
        rows.push(row);
        next += 1;
    }
    Ok(MarkovOrbit { p, kappa, states, rows })
}

/// The κ = 1 chain on F_p ∪ {∞} in the order (∞, 0, 1, ..., p-1):
/// L_i(n+1) = ½L_{i/(1-i)}(n) + ½L_{i-1}(n).
pub fn markov_matrix(p: u64) -> Result<MarkovOrbit> {
    check_prime(p)?;
    let inf = 0usize;
    let id = |r: u64| 1 + (r % p) as usize;
    let mut states = vec![AdmissiblePair { p, i: Residue::Infinity, kappa: 1 }];
    states.extend((0..p).map(|r| ball(p, Rational::from(r), 1)));
    let mut rows = vec![Vec::new(); p as usize + 1];
    add_row(&mut rows[inf], inf);
    add_row(&mut rows[inf], id(p - 1));
    for i in 0..p {
        let row = &mut rows[id(i)];
        add_row(row, id(i + p - 1));
        if i == 1 {
            add_row(row, inf);
        } else {
            let inv = Integer::from((1 + p - i) % p).invert(&Integer::from(p)).expect("1 - i is a unit");
            let s = (Integer::from(i) * inv) % p;
            add_row(row, id(s.to_u64().expect("residue fits")));
        }
    }
    Ok(MarkovOrbit { p, kappa: 1, states, rows })
}

impl MarkovOrbit {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// P as a dense exact matrix.
    pub fn dense(&self) -> Result<Vec<Vec<Rational>>> {
        let n = self.len();
        if n > MAX_PRIMITIVITY_STATES {
            return Err(Error::SizeLimit(format!("dense matrix of {n} states")));
        }
        let mut a = vec![vec![Rational::new(); n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, w) in row {
                a[i][*j] += w;
            }
        }
        Ok(a)
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.rows.iter().map(|r| r.iter().fold(Rational::new(), |acc, (_, w)| acc + w)).collect()
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        let mut s = vec![Rational::new(); self.len()];
        for row in &self.rows {
            for (j, w) in row {
                s[*j] += w;
            }
        }
        s
    }

    /// Rows and columns all sum to exactly 1.
    pub fn is_doubly_stochastic(&self) -> bool {
        self.row_sums().iter().chain(self.column_sums().iter()).all(|s| *s == 1)
    }

    /// Smallest m <= max_m with P^m entrywise positive, or None.
    pub fn primitive_exponent(&self, max_m: usize) -> Result<Option<usize>> {
        let n = self.len();
        if n > MAX_PRIMITIVITY_STATES {
            return Err(Error::SizeLimit(format!("primitivity search on {n} states")));
        }
        let words = n.div_ceil(64);
        // reach[i] = set of j with (P^m)_{ij} > 0
        let mut reach: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut b = vec![0u64; words];
                for (j, _) in &self.rows[i] {
                    b[j / 64] |= 1 << (j % 64);
                }
                b
            })
            .collect();
        let full = |b: &[u64]| (0..n).all(|j| b[j / 64] >> (j % 64) & 1 == 1);
        for m in 1..=max_m {
            if reach.iter().all(|b| full(b)) {
                return Ok(Some(m));
            }
            // P^{m+1} = P P^m: row i is the union of the rows of its sources
            reach = (0..n)
                .map(|i| {
                    let mut b = vec![0u64; words];
                    for (j, _) in &self.rows[i] {
                        for (x, y) in b.iter_mut().zip(&reach[*j]) {
                            *x |= y;
                        }
                    }
                    b
                })
                .collect();
        }
        Ok(None)
    }

    /// Index of the state whose ball contains 1/1, the single member of generation 1.
    pub fn initial_state(&self) -> Option<usize> {
        self.states.iter().position(|s| match &s.i {
            Residue::Value(i) => ord(&(1u32 - i.clone()), self.p).is_none_or(|v| v >= s.kappa),
            _ => false,
        })
    }

    /// v_n = P^{n-1} v_1 scaled by 2^{n-1}: exact member counts per state in generation n.
    pub fn counts(&self, n: u32) -> Result<Vec<Integer>> {
        if n == 0 {
            return Err(Error::Invalid("generations start at 1".into()));
        }
        let start = self.initial_state().ok_or_else(|| Error::Invalid("no state contains 1".into()))?;
        let mut v = vec![Integer::new(); self.len()];
        v[start] = Integer::from(1);
        for _ in 1..n {
            v = self
                .rows
                .iter()
                .map(|row| row.iter().fold(Integer::new(), |acc, (j, w)| acc + Integer::from(&v[*j] * Rational::from(w * 2u32).numer())))
                .collect();
        }
        Ok(v)
    }

    /// The uniform vector 1/ℓ, checked as an exact fixed point from both sides.
    pub fn stationary(&self) -> Result<Vec<Rational>> {
        let n = self.len();
        let u = Rational::from((1, n as u64));
        let right_ok = self.row_sums().iter().all(|s| *s == 1);
        let left_ok = self.column_sums().iter().all(|s| *s == 1);
        if !(right_ok && left_ok) {
            return Err(Error::Invalid("chain is not doubly stochastic".into()));
        }
        Ok(vec![u; n])
    }
}

/// det(xI - A) by Faddeev-LeVerrier in exact arithmetic; coefficients from x^0 up.
pub fn characteristic_polynomial(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    let mut c = vec![Rational::new(); n + 1];
    c[n] = Rational::from(1);
    let mut m = vec![vec![Rational::new(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![Rational::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = if i == j { c[n - k + 1].clone() } else { Rational::new() };
                for l in 0..n {
                    if a[i][l] != 0 && m[l][j] != 0 {
                        s += Rational::from(&a[i][l] * &m[l][j]);
                    }
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = Rational::new();
        for i in 0..n {
            for l in 0..n {
                if a[i][l] != 0 && m[l][i] != 0 {
                    tr += Rational::from(&a[i][l] * &m[l][i]);
                }
            }
        }
        c[n - k] = -tr / Rational::from(k as u64);
    }
    c
}

/// Product of polynomials given by coefficients from x^0 up.
pub fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += Rational::from(x * y);
        }
    }
    r
}

fn pw(k: i64, p: u64) -> Rational {
    if k >= 0 {
        Rational::from(pow(p, k))
    } else {
        Rational::from((Integer::from(1), pow(p, -k)))
    }
}

/// μ_p(z, ν) in closed form.
pub fn mu_closed_form(p: u64, z: &Rational, nu: i64) -> Result<Rational> {
    check_prime(p)?;
    let cell = |k: i64| Rational::from(1u32) / (pw(k, p) + pw(k - 1, p));
    match ord(z, p) {
        None if nu >= 1 => Ok(cell(nu)),
        None => Ok(Rational::from(1u32) - cell(1 - nu)),
        Some(v) if v >= nu => Err(Error::Inadmissible(format!("ord_{p}({z}) = {v} >= ν = {nu}"))),
        Some(v) if v >= 0 => Ok(cell(nu)),
        Some(v) => Ok(cell(nu - 2 * v)),
    }
}

/// Largest generation `empirical_mu` enumerates.
pub const MAX_EMPIRICAL: u32 = 24;

fn ord_i128(mut x: i128, p: i128) -> i64 {
    let mut k = 0;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    k
}

/// F_n(z, ν) = 2^{1-n} #{a/b in generation n : ord_p(a/b - z) >= ν}, exact.
pub fn empirical_mu(p: u64, z: &Rational, nu: i64, n: u32) -> Result<Rational> {
    check_prime(p)?;
    if n == 0 || n > MAX_EMPIRICAL {
        return Err(Error::SizeLimit(format!("generation {n} outside 1..={MAX_EMPIRICAL}")));
    }
    let c = z.numer().to_i128().ok_or_else(|| Error::Invalid(format!("{z} too large")))?;
    let d = z.denom().to_i128().ok_or_else(|| Error::Invalid(format!("{z} too large")))?;
    let pi = p as i128;
    let count = par_count(n, |x: Fraction| {
        let (a, b) = (x.num as i128, x.den as i128);
        let num = a * d - b * c;
        num == 0 || ord_i128(num, pi) - ord_i128(b * d, pi) >= nu
    })?;
    Ok(Rational::from((count, 1u64 << (n - 1))))
}

/// (E(n), O(n)): members of generation n with a or b even, and with both odd.
pub fn even_odd_counts(n: u32) -> Result<(Integer, Integer)> {
    if n == 0 {
        return Err(Error::Invalid("generations start at 1".into()));
    }
    let sign = if n.is_multiple_of(2) { 2 } else { -2 };
    let e = (Integer::from(1) << n) + sign;
    let o = (Integer::from(1) << (n - 1)) - sign;
    Ok((e / 3u32, o / 3u32))
}

/// (E(n), O(n)) by enumeration.
pub fn even_odd_enumerated(n: u32) -> Result<(u64, u64)> {
    let odd = par_count(n, |x| x.num % 2 == 1 && x.den % 2 == 1)?;
    Ok(((1u64 << (n - 1)) - odd, odd))
}

fn check_strip(s: Complex64) -> Result<()> {
    if s.re <= -1.0 || s.re >= 1.0 {
        return Err(Error::Domain(format!("Z_p needs -1 < Re s < 1, got {s}")));
    }
    Ok(())
}

/// Z_p(s) = (p-1)² / ((p - p^{-s})(p - p^s)).
pub fn z_p(p: u64, s: Complex64) -> Result<Complex64> {
    check_prime(p)?;
    check_strip(s)?;
    let pc = Complex64::new(p as f64, 0.0);
    let q = (p as f64 - 1.0).powi(2);
    Ok(q / ((pc - pc.powc(-s)) * (pc - pc.powc(s))))
}

/// μ_p of the shell ord_p(u) = k, as μ(0,k) - μ(0,k+1).
pub fn shell_weight(p: u64, k: i64) -> Result<Rational> {
    let zero = Rational::new();
    Ok(mu_closed_form(p, &zero, k)? - mu_closed_form(p, &zero, k + 1)?)
}

/// Σ_k μ(shell k) p^{-ks}, truncated where the geometric tails drop below 1e-18.
pub fn z_p_shell_sum(p: u64, s: Complex64) -> Result<Complex64> {
    check_prime(p)?;
    check_strip(s)?;
    // shells decay like p^{-|k|} against growth p^{|k||Re s|}
    let rate = (p as f64).powf(-(1.0 - s.re.abs()));
    let kmax = ((1e-18 * (1.0 - rate)).ln() / rate.ln()).ceil().max(1.0) as i64;
    let pc = Complex64::new(p as f64, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -kmax..=kmax {
        acc += shell_weight(p, k)?.to_f64() * pc.powc(-s * k as f64);
    }
    Ok(acc)
}

/// ζ_T(s) = (12/π²)(2π)^{-s} cos(πs/2) Γ(s) ζ(s) ζ(s+1).
pub fn zeta_t(s: Complex64) -> Result<Complex64> {
    if s.norm() < 1e-8 {
        return Err(Error::Pole(format!("ζ(s+1) at s = {s}")));
    }
    let two_pi = Complex64::new(2.0 * PI, 0.0);
    Ok(12.0 / (PI * PI) * two_pi.powc(-s) * (PI * s / 2.0).cos() * gamma(s)? * zeta(s)? * zeta(s + 1.0)?)
}

/// The divergent product's formal value (6/π²)ζ(s+1)ζ(1-s).
pub fn zeta_t_product_form(s: Complex64) -> Result<Complex64> {
    if s.norm() < 1e-8 {
        return Err(Error::Pole(format!("ζ(s+1) at s = {s}")));
    }
    Ok(6.0 / (PI * PI) * zeta(s + 1.0)? * zeta(1.0 - s)?)
}
