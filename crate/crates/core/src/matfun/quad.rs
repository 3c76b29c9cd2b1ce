//! Gauss–Legendre rules and an adaptive matrix-valued integrator.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like starting guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|xi| 0.5 * (xi + 1.0)).collect(),
        w.iter().map(|wi| 0.5 * wi).collect(),
    )
}

/// Adaptively integrates a matrix-valued function over `[a, b]`.
///
/// Each panel is accepted when the 10-point rule and the sum over its two
/// halves agree to `tol` relative to the running estimate.
pub fn integrate_matrix<F, E>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<DMatrix<Complex64>, E>
where
    F: FnMut(f64) -> Result<DMatrix<Complex64>, E>,
{
    let (x, w) = gauss_legendre(10);
    let rule = |lo: f64, hi: f64, f: &mut F| -> Result<DMatrix<Complex64>, E> {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc: Option<DMatrix<Complex64>> = None;
        for (xi, wi) in x.iter().zip(&w) {
            let v = f(mid + half * xi)? * Complex64::from(wi * half);
            acc = Some(match acc {
                Some(s) => s + v,
                None => v,
            });
        }
        Ok(acc.expect("rule has nodes"))
    };

    let whole = rule(a, b, f)?;
    let scale = whole.norm().max(1e-300);
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut total: Option<DMatrix<Complex64>> = None;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule(lo, mid, f)?;
        let right = rule(mid, hi, f)?;
        let fine = &left + &right;
        if (&fine - &coarse).norm() <= tol * scale || depth >= 40 {
            total = Some(match total {
                Some(t) => t + fine,
                None => fine,
            });
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(total.expect("at least one panel"))
}
