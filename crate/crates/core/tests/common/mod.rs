//! Reference implementations that share no code with the library: Bessel
//! power series summed in log space and Gauss–Legendre quadrature of the
//! Marcum integrals.

#![allow(dead_code)]

use std::path::PathBuf;

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 2);
    out.push(0.0);
    let mut acc = 0.0;
    for k in 1..=n + 1 {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

// e^{-shift} Σ (x/2)^{2k+order} / (k! (k+order)!), summed with compensation.
fn bessel_series(order: usize, x: f64, shift: f64) -> f64 {
    if x == 0.0 {
        return if order == 0 { (-shift).exp() } else { 0.0 };
    }
    let n = (x + 30.0 * x.sqrt() + 60.0) as usize;
    let lf = ln_factorials(n + order);
    let lh = (0.5 * x).ln();
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in 0..=n {
        let ln_term = (2 * k + order) as f64 * lh - lf[k] - lf[k + order] - shift;
        let term = ln_term.exp();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        // Past the peak the terms fall monotonically.
        if 2 * k > x as usize + 2 && term < 1e-20 * sum {
            break;
        }
    }
    sum
}

pub fn i0(x: f64) -> f64 {
    bessel_series(0, x, 0.0)
}

pub fn i1(x: f64) -> f64 {
    bessel_series(1, x, 0.0)
}

pub fn i0_scaled(x: f64) -> f64 {
    bessel_series(0, x, x)
}

pub fn i1_scaled(x: f64) -> f64 {
    bessel_series(1, x, x)
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

/// Composite Gauss–Legendre quadrature on `[a, b]` with panels of at most `width`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, width: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let rule = gauss_legendre(12);
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        total += rule
            .iter()
            .map(|&(x, w)| w * f(c + 0.5 * h * x))
            .sum::<f64>()
            * 0.5
            * h;
    }
    total
}

// Rician envelope density x e^{-(x²+a²)/2} I0(ax), written stably.
fn rician_density(a: f64, x: f64) -> f64 {
    x * (-0.5 * (x - a) * (x - a)).exp() * i0_scaled(a * x)
}

/// Q1(a, b) by quadrature of the upper tail of the Rician density.
pub fn marcum_q1(a: f64, b: f64) -> f64 {
    let top = a.max(b) + 12.0;
    integrate(|x| rician_density(a, x), b, top, 1.0)
}

/// P1(a, b) = 1 − Q1(a, b) by quadrature of the lower integral.
pub fn marcum_p1(a: f64, b: f64) -> f64 {
    integrate(|x| rician_density(a, x), 0.0, b, 1.0)
}

/// P1 by whichever integral is shorter; absolute accuracy only.
pub fn marcum_p1_fast(a: f64, b: f64) -> f64 {
    if b > a + 1.0 {
        1.0 - marcum_q1(a, b)
    } else {
        marcum_p1(a, b)
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

pub fn validation_scenarios() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(scenario_dir().join("validation"))
        .expect("validation scenarios shipped")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "conf"))
        .collect();
    paths.sort();
    paths
}
