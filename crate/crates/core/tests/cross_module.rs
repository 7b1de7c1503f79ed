use minklab::moments::{big_m_from_m, solve_moments};
use minklab::numerics::BigComplex;
use minklab::padic::{self, Residue};
use minklab::{period, qmark, tree};
use rug::{Float, Rational};

#[test]
fn moments_do_not_depend_on_precision_beyond_truncation() {
    let a = solve_moments(64, 192).unwrap();
    let b = solve_moments(64, 384).unwrap();
    for l in 0..=64 {
        let d = Float::with_val(384, &a.m[l] - &b.m[l]).abs();
        assert!(d < 1e-50, "m_{l} moves by {d} between 192 and 384 bits");
    }
    // the m_1 defect is truncation, identical at both precisions
    let half = Float::with_val(384, 0.5);
    let da = Float::with_val(384, &a.m[1] - &half).to_f64();
    let db = Float::with_val(384, &b.m[1] - &half).to_f64();
    assert!((da - db).abs() < 1e-40 * da.abs().max(1.0));
    let wider = solve_moments(96, 192).unwrap();
    let dw = Float::with_val(192, &wider.m[1] - &half).abs().to_f64();
    assert!(dw < da.abs());
}

#[test]
fn moment_table_matches_tree_averages() {
    // x/(1+x) over a generation samples d?, so its power averages approach m_L
    let t = solve_moments(32, 128).unwrap();
    let n = 18;
    let g = tree::generation(n).unwrap();
    let size = g.members.len() as f64;
    for l in 1..=3 {
        let avg: f64 = g.members.iter().map(|f| (f.num as f64 / (f.num + f.den) as f64).powi(l)).sum::<f64>() / size;
        assert!((avg - t.m[l as usize].to_f64()).abs() < 1e-4, "L = {l}: {avg}");
    }
    assert!((big_m_from_m(&t, 1).to_f64() - 1.5).abs() <= 4.0 * t.err[1].to_f64());
}

#[test]
fn markov_chain_counts_match_enumeration() {
    for p in [3u64, 5, 7] {
        let chain = padic::markov_matrix(p).unwrap();
        let n = 14;
        let counts = chain.counts(n).unwrap();
        let scale = Rational::from((1, 1u64 << (n - 1)));
        for (k, s) in chain.states.iter().enumerate() {
            let Residue::Value(i) = &s.i else { continue };
            let emp = padic::empirical_mu(p, i, 1, n).unwrap();
            assert_eq!(Rational::from(&counts[k] * &scale), emp, "p = {p}, state {s}");
        }
    }
}

#[test]
fn question_mark_and_tree_distribution_agree() {
    for (a, b) in [(1u64, 3u64), (2, 5), (5, 7), (13, 21)] {
        let x = Rational::from((a, b));
        let q = qmark::qmark_exact(&x).unwrap().to_rational();
        let f = qmark::f_exact(&x).unwrap().to_rational();
        assert_eq!(Rational::from(&f * 2u32), q, "x = {x}");
    }
    for n in [6u32, 10] {
        let x = Rational::from((7, 3));
        let fx = qmark::f_exact(&x).unwrap().to_rational();
        let fnx = tree::empirical_cdf_rational(n, &x).unwrap();
        let gap = Rational::from(&fx - &fnx).abs();
        assert!(gap <= (1, 1u64 << n));
    }
}

#[test]
fn period_function_routes_agree_and_match_moments() {
    let t = solve_moments(64, 192).unwrap();
    // G(0) = m_1
    let g0 = period::g_eval(&BigComplex::from_f64(192, 0.0, 0.0), &t, 20).unwrap();
    assert!(Float::with_val(192, &g0.value.re - &t.m[1]).abs() < 1e-40);
    for (re, im) in [(-0.5, 0.25), (-2.0, 1.0), (0.5, 1.0)] {
        let z = BigComplex::from_f64(192, re, im);
        let a = period::g_eval(&z, &t, 22).unwrap().value.to_f64();
        let b = period::g_quadrature(&z, 22).unwrap().value.to_f64();
        assert!((a - b).norm() < 1e-9, "z = {re}+{im}i: {a} vs {b}");
    }
}
