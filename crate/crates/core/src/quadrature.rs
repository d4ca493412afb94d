//! Tensor Gauss–Legendre quadrature on rectangles and curvilinear strips.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `∫_{x0}^{x1} ∫_{lo(x)}^{hi(x)} f(x, y) dy dx` with an `n × n` rule.
pub fn integrate_2d<F, L, H>(f: &F, x0: f64, x1: f64, lo: &L, hi: &H, n: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
    L: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    let (t, w) = gauss_legendre(n);
    let (xm, xr) = (0.5 * (x1 + x0), 0.5 * (x1 - x0));
    let mut total = 0.0;
    for (ti, wi) in t.iter().zip(&w) {
        let x = xm + xr * ti;
        let (a, b) = (lo(x), hi(x));
        let (ym, yr) = (0.5 * (b + a), 0.5 * (b - a));
        let inner: f64 = t.iter().zip(&w).map(|(tj, wj)| wj * f(x, ym + yr * tj)).sum();
        total += wi * yr * inner;
    }
    total * xr
}

/// Integrates with `n` and `2n` nodes per axis and returns the refined value,
/// or an error when the two differ by more than `tol`.
pub fn integrate_2d_checked<F, L, H>(f: &F, x0: f64, x1: f64, lo: &L, hi: &H, n: usize, tol: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
    L: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    let coarse = integrate_2d(f, x0, x1, lo, hi, n);
    let refined = integrate_2d(f, x0, x1, lo, hi, 2 * n);
    let diff = (refined - coarse).abs();
    if diff > tol || !refined.is_finite() {
        return Err(Error::Quadrature {
            nodes: n,
            coarse,
            refined,
            diff,
            tol,
        });
    }
    Ok(refined)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules_match_tables() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-14);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials() {
        for n in [1, 5, 64, 128] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let want = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((got - want).abs() < 1e-12, "n {n}: {got} vs {want}");
        }
    }

    #[test]
    fn triangle_area_and_moment() {
        // Unit right triangle: area 1/2, ∫x dA = 1/6.
        let one = |_: f64, _: f64| 1.0;
        let a = integrate_2d(&one, 0.0, 1.0, &|_| 0.0, &|x| 1.0 - x, 8);
        assert!((a - 0.5).abs() < 1e-15);
        let m = integrate_2d(&|x, _| x, 0.0, 1.0, &|_| 0.0, &|x| 1.0 - x, 8);
        assert!((m - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn checked_rejects_unresolved_integrands() {
        let spiky = |x: f64, y: f64| (2000.0 * x * y).sin().abs();
        let r = integrate_2d_checked(&spiky, 0.0, 1.0, &|_| 0.0, &|_| 1.0, 4, 1e-9);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
        let smooth = |x: f64, y: f64| (x * y).exp();
        assert!(integrate_2d_checked(&smooth, 0.0, 1.0, &|_| 0.0, &|_| 1.0, 16, 1e-12).is_ok());
    }
}
