//! Gauss–Legendre rules.

use crate::scalar::Real;

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Roots are found by Newton iteration on the three-term recurrence in `f64`
/// and then converted, so `f32` callers get correctly rounded nodes.
pub fn gauss_legendre<T: Real>(m: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); m];
    let mut weights = vec![T::zero(); m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = T::lit(-x);
        nodes[m - 1 - i] = T::lit(x);
        weights[i] = T::lit(w);
        weights[m - 1 - i] = T::lit(w);
    }
    (nodes, weights)
}

/// Value and derivative of the degree-`m` Legendre polynomial.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on<T: Real>(a: T, b: T, m: usize) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(m);
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    (
        x.into_iter().map(|t| mid + half * t).collect(),
        w.into_iter().map(|v| v * half).collect(),
    )
}

/// Composite rule over consecutive panels `breaks[i]..breaks[i+1]`, `m` points each.
pub fn composite_gauss_legendre<T: Real>(breaks: &[T], m: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in breaks.windows(2) {
        let (x, v) = gauss_legendre_on(w[0], w[1], m);
        nodes.extend(x);
        weights.extend(v);
    }
    (nodes, weights)
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}
