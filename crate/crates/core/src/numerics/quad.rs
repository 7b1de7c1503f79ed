use crate::error::{Error, Result};
use rug::float::Constant;
use rug::Float;

/// An integral estimate with its error bound.
#[derive(Clone, Debug)]
pub struct Integral {
    pub value: Float,
    pub err: Float,
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
    prec: u32,
}

impl GaussLegendre {
    pub fn new(n: usize, prec: u32) -> Self {
        let wp = prec + 32;
        let pi = Float::with_val(wp, Constant::Pi);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // Tricomi initial guess, then Newton on P_n
            let mut x = Float::with_val(wp, &pi * (4 * i as u32 + 3)) / (4 * n as u32 + 2);
            x.cos_mut();
            let mut dp = Float::new(wp);
            for _ in 0..100 {
                let (p, d) = legendre(n, &x, wp);
                let dx = Float::with_val(wp, &p / &d);
                x -= &dx;
                dp = d;
                if dx.is_zero() || dx.get_exp().unwrap() < -(wp as i32) + 4 {
                    let (_, d) = legendre(n, &x, wp);
                    dp = d;
                    break;
                }
            }
            let w = Float::with_val(wp, 2) / (Float::with_val(wp, 1) - Float::with_val(wp, x.square_ref())) / dp.square();
            nodes.push(Float::with_val(prec, &x));
            weights.push(Float::with_val(prec, w));
        }
        GaussLegendre { nodes, weights, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Rule applied to [a, b].
    pub fn apply(&self, f: &dyn Fn(&Float) -> Float, a: &Float, b: &Float) -> Float {
        let p = self.prec;
        let half = Float::with_val(p, b - a) / 2u32;
        let mid = Float::with_val(p, a + b) / 2u32;
        let mut acc = Float::new(p);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = Float::with_val(p, &mid + Float::with_val(p, &half * x));
            acc += Float::with_val(p, w * f(&t));
        }
        acc * half
    }
}

fn legendre(n: usize, x: &Float, wp: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(wp, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let k = k as u32;
        let p2 = (Float::with_val(wp, x * &p1) * (2 * k - 1) - Float::with_val(wp, &p0 * (k - 1))) / k;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { p0.clone() } else { p1.clone() };
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let d = Float::with_val(wp, x * &p1) - &p0;
    let d = d * n as u32 / (Float::with_val(wp, x.square_ref()) - 1u32);
    (pn, d)
}

/// Composite Gauss-Legendre on [a, b], doubling the panel count until two
/// successive estimates differ by less than `tol`.
pub fn integrate_panel(f: &dyn Fn(&Float) -> Float, a: &Float, b: &Float, nodes: usize, prec: u32, tol: &Float) -> Result<Integral> {
    let gl = GaussLegendre::new(nodes, prec);
    let composite = |m: u32| {
        let h = Float::with_val(prec, b - a) / m;
        let mut acc = Float::new(prec);
        for k in 0..m {
            let lo = Float::with_val(prec, a + Float::with_val(prec, &h * k));
            let hi = Float::with_val(prec, a + Float::with_val(prec, &h * (k + 1)));
            acc += gl.apply(f, &lo, &hi);
        }
        acc
    };
    let mut m = 1;
    let mut prev = composite(m);
    for _ in 0..16 {
        m *= 2;
        let cur = composite(m);
        let err = Float::with_val(prec, &cur - &prev).abs();
        if err < *tol {
            return Ok(Integral { value: cur, err });
        }
        prev = cur;
    }
    Err(Error::NoConvergence("panel doubling exhausted".into()))
}
