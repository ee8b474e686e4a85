//! Composite Gauss-Legendre and trapezoid rules.

use alloc::vec::Vec;
use core::f64::consts::PI;

// f64 math for no_std builds; redundant once std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, refined by Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Points per panel of the composite rule.
pub const PANEL_ORDER: usize = 16;

/// Composite Gauss-Legendre integral of `f` over `[a, b]` with `panels`
/// equal panels.
pub fn composite_gl<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, panels: usize) -> C64 {
    let (nodes, weights) = gauss_legendre(PANEL_ORDER);
    let h = (b - a) / panels as f64;
    let mut sum = C64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for (x, w) in nodes.iter().zip(&weights) {
            sum += f(mid + 0.5 * h * x) * (0.5 * h * w);
        }
    }
    sum
}

/// Doubles the number of panels until successive estimates differ by less
/// than `tol`.
pub fn adaptive_gl<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> Result<C64> {
    let mut panels = 4;
    let mut prev = composite_gl(f, a, b, panels);
    while panels < 1 << 16 {
        panels *= 2;
        let next = composite_gl(f, a, b, panels);
        if (next - prev).norm() < tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NumericalFailure(alloc::format!(
        "quadrature on [{a}, {b}] did not converge to {tol:e}"
    )))
}

/// Trapezoid rule on a sorted grid.
pub fn trapezoid(xs: &[f64], ys: &[C64]) -> C64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[0] + y[1]) * (0.5 * (x[1] - x[0])))
        .sum()
}
