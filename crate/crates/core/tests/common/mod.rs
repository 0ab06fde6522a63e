//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

pub type C2 = [[Complex64; 2]; 2];

/// `exp(tA)` for a real 2×2 matrix through `e^{mt}(cosh(st)I + sinh(st)/s·(A − mI))`,
/// with `m` the half trace and `s² = m² − det A`.
pub fn expm2(a: [[f64; 2]; 2], t: f64) -> C2 {
    let m = 0.5 * (a[0][0] + a[1][1]);
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let s = Complex64::new(m * m - det, 0.0).sqrt();
    let x = s * t;
    let ch = x.cosh();
    // sinh(st)/s, with its limit t at s = 0.
    let sh = if x.norm() < 1e-3 {
        let x2 = x * x;
        t * (1.0 + x2 / 6.0 + x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0)
    } else {
        x.sinh() / s
    };
    let e = (m * t).exp();
    [
        [e * (ch + sh * (a[0][0] - m)), e * sh * a[0][1]],
        [e * sh * a[1][0], e * (ch + sh * (a[1][1] - m))],
    ]
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss–Legendre quadrature of a complex integrand over `[0, t]`.
pub fn integrate(t: f64, panels: usize, f: impl Fn(f64) -> Complex64) -> Complex64 {
    let rule = gauss_legendre(20);
    let h = t / panels as f64;
    let mut total = Complex64::default();
    for p in 0..panels {
        let a = p as f64 * h;
        for &(x, w) in &rule {
            total += 0.5 * h * w * f(a + 0.5 * h * (x + 1.0));
        }
    }
    total
}
