use crate::error::{Error, Result};
use rug::Float;

/// Dense row-major matrix of arbitrary-precision reals.
#[derive(Clone, Debug)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    prec: u32,
    data: Vec<Float>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        DenseMatrix { rows, cols, prec, data: vec![Float::new(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m.set(i, i, Float::with_val(prec, 1));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, prec: u32, mut f: impl FnMut(usize, usize) -> Float) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(Float::with_val(prec, f(i, j)));
            }
        }
        DenseMatrix { rows, cols, prec, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Float) {
        let p = self.prec;
        self.data[i * self.cols + j] = Float::with_val(p, v);
    }

    pub fn row(&self, i: usize) -> &[Float] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Max-abs entry.
    pub fn max_abs(&self) -> Float {
        let mut m = Float::new(self.prec);
        for x in &self.data {
            if x.clone().abs() > m {
                m = x.clone().abs();
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Float]) -> Vec<Float> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Float::new(self.prec);
                for (a, x) in self.row(i).iter().zip(v) {
                    acc += Float::with_val(self.prec, a * x);
                }
                acc
            })
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|x| x.to_f64()).collect()
    }

    /// Leading n x n block.
    pub fn leading(&self, n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, self.prec, |i, j| self.get(i, j).clone())
    }
}

/// LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    prec: u32,
    lu: Vec<Float>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factor `a`; fails when every pivot candidate is below 2^{8-prec} times the largest entry.
    pub fn new(a: &DenseMatrix) -> Result<Lu> {
        if a.rows != a.cols {
            return Err(Error::Dimension(format!("{}x{} is not square", a.rows, a.cols)));
        }
        let n = a.rows;
        let prec = a.prec;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        let tiny = if scale.is_zero() { Float::new(prec) } else { scale << (8 - prec as i32) };
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[k * n + k].clone().abs();
            for i in k + 1..n {
                let v = lu[i * n + k].clone().abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best <= tiny {
                return Err(Error::SingularPivot { column: k });
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = lu[k * n + k].clone();
            for i in k + 1..n {
                let f = Float::with_val(prec, &lu[i * n + k] / &pivot);
                if f.is_zero() {
                    lu[i * n + k] = f;
                    continue;
                }
                for j in k + 1..n {
                    let t = Float::with_val(prec, &f * &lu[k * n + j]);
                    lu[i * n + j] -= t;
                }
                lu[i * n + k] = f;
            }
        }
        Ok(Lu { n, prec, lu, perm })
    }

    pub fn solve(&self, b: &[Float]) -> Vec<Float> {
        let n = self.n;
        let p = self.prec;
        let mut x: Vec<Float> = self.perm.iter().map(|&i| Float::with_val(p, &b[i])).collect();
        for i in 0..n {
            for j in 0..i {
                let t = Float::with_val(p, &self.lu[i * n + j] * &x[j]);
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = Float::with_val(p, &self.lu[i * n + j] * &x[j]);
                x[i] -= t;
            }
            x[i] /= &self.lu[i * n + i];
        }
        x
    }
}

/// Solve A x = b by Gaussian elimination with partial pivoting at the matrix precision.
pub fn solve_dense(a: &DenseMatrix, b: &[Float]) -> Result<Vec<Float>> {
    if b.len() != a.rows {
        return Err(Error::Dimension(format!("rhs has {} rows, matrix {}", b.len(), a.rows)));
    }
    Ok(Lu::new(a)?.solve(b))
}

/// max_i |x_i|.
pub fn norm_inf(v: &[Float]) -> Float {
    let p = v.first().map_or(53, |x| x.prec());
    v.iter().fold(Float::new(p), |m, x| {
        let a = x.clone().abs();
        if a > m {
            a
        } else {
            m
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_and_diagonal() {
        let p = 128;
        let b = vec![Float::with_val(p, 3), Float::with_val(p, -7)];
        assert_eq!(solve_dense(&DenseMatrix::identity(2, p), &b).unwrap(), b);
        let d = DenseMatrix::from_fn(2, 2, p, |i, j| Float::with_val(p, if i == j { 2 * (i + 1) } else { 0 }));
        let x = solve_dense(&d, &[Float::with_val(p, 1), Float::with_val(p, 1)]).unwrap();
        assert_eq!(x[0], 0.5);
        assert_eq!(x[1], 0.25);
    }

    #[test]
    fn hilbert_known_solution() {
        let p = 192;
        let h = DenseMatrix::from_fn(3, 3, p, |i, j| Float::with_val(p, 1) / (i + j + 1) as u32);
        let b: Vec<Float> = (0..3).map(|i| (0..3).fold(Float::new(p), |acc, j| acc + h.get(i, j))).collect();
        let x = solve_dense(&h, &b).unwrap();
        for xi in x {
            assert!(Float::with_val(p, xi - 1u32).abs() < 1e-50);
        }
    }

    #[test]
    fn singular_detected() {
        let p = 64;
        let a = DenseMatrix::from_fn(2, 2, p, |_, _| Float::with_val(p, 1));
        assert!(matches!(solve_dense(&a, &[Float::new(p), Float::new(p)]), Err(Error::SingularPivot { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn residual_bound(n in 2usize..64, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = 128;
            // diagonally dominant, hence well conditioned
            let a = DenseMatrix::from_fn(n, n, p, |i, j| {
                let v: f64 = rng.gen_range(-1.0..1.0);
                Float::with_val(p, if i == j { v + 2.0 * n as f64 } else { v })
            });
            let b: Vec<Float> = (0..n).map(|_| Float::with_val(p, rng.gen_range(-1.0..1.0))).collect();
            let x = solve_dense(&a, &b).unwrap();
            let ax = a.mul_vec(&x);
            let r: Vec<Float> = ax.iter().zip(&b).map(|(u, v)| Float::with_val(p, u - v)).collect();
            let bound = norm_inf(&b) >> (p / 2);
            prop_assert!(norm_inf(&r) <= bound);
        }
    }
}
