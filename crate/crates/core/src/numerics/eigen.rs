#![allow(clippy::needless_range_loop)]

use super::matrix::{norm_inf, DenseMatrix, Lu};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rug::Float;

/// All eigenvalues of a real n x n matrix (row-major) in double precision:
/// balancing, reduction to Hessenberg form, then shifted QR.
pub fn hessenberg_qr_eigenvalues(a: &[f64], n: usize) -> Result<Vec<Complex64>> {
    if a.len() != n * n {
        return Err(Error::Dimension(format!("{} entries for n = {n}", a.len())));
    }
    // 1-based working copy
    let mut m = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            m[i + 1][j + 1] = a[i * n + j];
        }
    }
    balance(&mut m, n);
    hessenberg(&mut m, n);
    for i in 1..=n {
        for j in 1..i.saturating_sub(1) {
            m[i][j] = 0.0;
        }
    }
    hqr(&mut m, n)
}

fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for j in 1..=n {
                        a[j][i] *= f;
                    }
                }
            }
        }
    }
}

fn hessenberg(a: &mut [Vec<f64>], n: usize) {
    if n < 3 {
        return;
    }
    for m in 2..n {
        let mut x: f64 = 0.0;
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in m - 1..=n {
                let t = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut().take(n + 1).skip(1) {
                row.swap(i, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..=n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        a[i][j] -= y * a[m][j];
                    }
                    for j in 1..=n {
                        a[j][m] += y * a[j][i];
                    }
                }
            }
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

#[allow(clippy::many_single_char_names, unused_assignments)]
fn hqr(a: &mut [Vec<f64>], n: usize) -> Result<Vec<Complex64>> {
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize;
    let mut t = 0.0;
    let (mut p, mut q, mut r, mut s, mut w, mut x, mut y, mut z): (f64, f64, f64, f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    while nn >= 1 {
        let mut its = 0;
        let mut l: isize;
        loop {
            l = nn;
            while l >= 2 {
                let (lu, lm) = (l as usize, (l - 1) as usize);
                s = a[lm][lm].abs() + a[lu][lu].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[lu][lm].abs() + s == s {
                    a[lu][lm] = 0.0;
                    break;
                }
                l -= 1;
            }
            let nu = nn as usize;
            x = a[nu][nu];
            if l == nn {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
            } else {
                y = a[nu - 1][nu - 1];
                w = a[nu][nu - 1] * a[nu - 1][nu];
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != 0.0 {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = 0.0;
                        wi[nu] = 0.0;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        return Err(Error::NoConvergence("shifted QR exceeded 60 iterations".into()));
                    }
                    if its == 10 || its == 20 || its == 40 {
                        t += x;
                        for i in 1..=nu {
                            a[i][i] -= x;
                        }
                        s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let lu = l as usize;
                    let mut m = nu - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == lu {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nu {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nu - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if lu != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nu - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = nu.min(k + 3);
                            for i in lu..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nu - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// Shifted inverse iteration at the matrix precision, starting from `seed`.
///
/// Returns (lambda, v) at the matrix precision with v normalized so its first entry
/// is 1; if that entry is negligible the largest-magnitude entry is set to 1 instead.
/// Convergence is declared once ‖Av − λv‖∞ < 2^{-prec/2-4}‖v‖∞.
pub fn eigen_refine(a: &DenseMatrix, seed: &Float, prec: u32) -> Result<(Float, Vec<Float>)> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::Dimension("eigen_refine needs a square matrix".into()));
    }
    let wp = a.prec();
    let mut sigma = Float::with_val(wp, seed);
    let mut v: Vec<Float> = (0..n).map(|i| Float::with_val(wp, 1) / (i as u32 + 1)).collect();
    let mut lambda = sigma.clone();
    let tol_exp = -(prec as i32) / 2;
    let mut fixed_steps = 0;
    for it in 0..80 {
        let mut shifted = a.clone();
        for i in 0..n {
            let d = Float::with_val(wp, a.get(i, i) - &sigma);
            shifted.set(i, i, d);
        }
        let lu = match Lu::new(&shifted) {
            Ok(lu) => lu,
            Err(Error::SingularPivot { .. }) => {
                // shift landed on the eigenvalue to working precision; nudge it
                let nudge = Float::with_val(wp, sigma.clone().abs().max(&Float::with_val(wp, 1)) >> (wp as i32 / 2));
                sigma += nudge;
                continue;
            }
            Err(e) => return Err(e),
        };
        let y = lu.solve(&v);
        let (jmax, ymax) = y
            .iter()
            .enumerate()
            .fold((0, Float::new(wp)), |(j, m), (i, x)| if x.clone().abs() > m { (i, x.clone().abs()) } else { (j, m) });
        if ymax.is_zero() {
            return Err(Error::NoConvergence("inverse iteration produced a zero vector".into()));
        }
        let est = Float::with_val(wp, &sigma + Float::with_val(wp, &v[jmax] / &y[jmax]));
        let yj = y[jmax].clone();
        v = y.into_iter().map(|x| x / &yj).collect();
        let change = Float::with_val(wp, &est - &lambda).abs();
        lambda = est;
        // residual ||Av - lambda v|| with ||v|| = 1
        let av = a.mul_vec(&v);
        let res: Vec<Float> = av.iter().zip(&v).map(|(x, y)| Float::with_val(wp, x - Float::with_val(wp, &lambda * y))).collect();
        let r = norm_inf(&res);
        if r.is_zero() || r.get_exp().unwrap() < tol_exp - 4 {
            return Ok((lambda, normalize(v)));
        }
        // keep the seed as shift until the estimate settles, then update the shift
        let rel = Float::with_val(wp, &change / Float::with_val(wp, lambda.clone().abs().max(&Float::with_val(wp, 1e-30))));
        if fixed_steps < 12 && rel > 1e-6 && it < 12 {
            fixed_steps += 1;
        } else {
            sigma = lambda.clone();
        }
    }
    Err(Error::NoConvergence(format!("inverse iteration from seed {} did not converge", seed.to_f64())))
}

fn normalize(v: Vec<Float>) -> Vec<Float> {
    let m = norm_inf(&v);
    let first = v[0].clone();
    let pivot = if Float::with_val(m.prec(), first.clone().abs()) > Float::with_val(m.prec(), &m >> 64u32) {
        first
    } else {
        v.iter().fold(Float::new(m.prec()), |b, x| if x.clone().abs() > b.clone().abs() { x.clone() } else { b })
    };
    v.into_iter().map(|x| x / &pivot).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut e: Vec<Complex64>) -> Vec<Complex64> {
        e.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        e
    }

    #[test]
    fn qr_small_known_spectra() {
        let e = sorted_re(hessenberg_qr_eigenvalues(&[2.0, 0.0, 0.0, 3.0], 2).unwrap());
        assert!((e[0].re - 2.0).abs() < 1e-14 && (e[1].re - 3.0).abs() < 1e-14);
        let e = sorted_re(hessenberg_qr_eigenvalues(&[0.0, -1.0, 1.0, 0.0], 2).unwrap());
        assert!((e[0].im.abs() - 1.0).abs() < 1e-14 && e[0].re.abs() < 1e-14);
        // companion matrix of (x-1)(x-2)(x-3)(x-4)
        let c = [10.0, -35.0, 50.0, -24.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let e = sorted_re(hessenberg_qr_eigenvalues(&c, 4).unwrap());
        for (k, z) in e.iter().enumerate() {
            assert!((z.re - (k + 1) as f64).abs() < 1e-10 && z.im.abs() < 1e-10);
        }
    }

    #[test]
    fn qr_trace_and_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 30;
        let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let e = hessenberg_qr_eigenvalues(&a, n).unwrap();
        let tr: f64 = (0..n).map(|i| a[i * n + i]).sum();
        let s: Complex64 = e.iter().sum();
        assert!((s.re - tr).abs() < 1e-10 && s.im.abs() < 1e-10);
    }

    #[test]
    fn refine_diagonal_and_swap() {
        let p = 128;
        let d = DenseMatrix::from_fn(2, 2, p, |i, j| Float::with_val(p, if i == j { 2 + i } else { 0 }));
        let (l, v) = eigen_refine(&d, &Float::with_val(p, 2.9), p).unwrap();
        assert_eq!(l, 3);
        assert!(v[0].clone().abs() < 1e-30 && v[1] == 1);
        let s = DenseMatrix::from_fn(2, 2, p, |i, j| Float::with_val(p, if i == j { 0 } else { 1 }));
        let (l, v) = eigen_refine(&s, &Float::with_val(p, 0.9), p).unwrap();
        assert!(Float::with_val(p, l - 1u32).abs() < 1e-30);
        assert_eq!(v[0], 1);
        assert!(Float::with_val(p, &v[1] - 1u32).abs() < 1e-30);
    }
}
