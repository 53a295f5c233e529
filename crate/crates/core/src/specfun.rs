//! Modified Bessel functions of the first kind (orders 0 and 1) and the
//! first-order Marcum Q-function.
//!
//! The Bessel functions use the power series below [`ASYMPTOTIC_SWITCH`] and
//! the Hankel asymptotic expansion above it. Past the switch the smallest
//! term of the asymptotic series is of order `e^{-2x}`, far below `f64`
//! epsilon, so both branches are accurate to a few ulps there while the
//! series still needs only ~60 terms.
//!
//! The Marcum Q-function is evaluated as a Poisson mixture of Poisson tail
//! probabilities. Whichever of `Q1` or `1 - Q1` is the smaller is summed
//! directly, so every sum has positive terms and no cancellation.

use crate::error::{require_positive, Error, Result};

/// Argument above which the asymptotic expansions replace the power series.
pub const ASYMPTOTIC_SWITCH: f64 = 25.0;

const EPS: f64 = 1e-17;

/// Tolerance and term budget for the iterative special functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy {
            rel_tol: 1e-10,
            max_terms: 10_000,
        }
    }
}

impl Accuracy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        require_positive("rel_tol", rel_tol)?;
        if max_terms == 0 {
            return Err(Error::invalid("max_terms", "must be at least 1"));
        }
        Ok(Accuracy { rel_tol, max_terms })
    }
}

/// `I0(x)`. Returns `+inf` once the result is no longer representable
/// (x ≳ 713); use [`bessel_i0_scaled`] there.
pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= ASYMPTOTIC_SWITCH {
        i0_series(x)
    } else {
        scale_up(asymptotic_scaled(0, x), x)
    }
}

/// `e^{-x} I0(x)`, finite for every finite `x ≥ 0`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= ASYMPTOTIC_SWITCH {
        i0_series(x) * (-x).exp()
    } else {
        asymptotic_scaled(0, x)
    }
}

/// `I1(x)` for `x ≥ 0`. Overflows to `+inf` like [`bessel_i0`].
pub fn bessel_i1(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= ASYMPTOTIC_SWITCH {
        i1_series(x)
    } else {
        scale_up(asymptotic_scaled(1, x), x)
    }
}

/// `e^{-x} I1(x)` for `x ≥ 0`.
pub fn bessel_i1_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= ASYMPTOTIC_SWITCH {
        i1_series(x) * (-x).exp()
    } else {
        asymptotic_scaled(1, x)
    }
}

fn scale_up(scaled: f64, x: f64) -> f64 {
    // Split the exponential so that e^x overflowing alone does not
    // spoil a product that is still representable.
    let half = (0.5 * x).exp();
    scaled * half * half
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term < EPS * sum {
            return sum;
        }
    }
}

fn i1_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + 1.0));
        sum += term;
        if term <= EPS * sum {
            return sum;
        }
    }
}

/// Hankel expansion of `e^{-x} I_ν(x)` for integer `ν ∈ {0, 1}`:
/// `(2πx)^{-1/2} Σ_k (-1)^k a_k(ν) x^{-k}`.
fn asymptotic_scaled(order: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(order * order);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = f64::from(2 * k - 1);
        let next = term * -(mu - odd * odd) / (8.0 * f64::from(k) * x);
        if next.abs() >= term.abs() {
            // Past the smallest term the series starts to diverge.
            break;
        }
        term = next;
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI).sqrt() / x.sqrt()
}

/// First-order Marcum Q-function `Q1(a, b)`.
///
/// ```
/// use uav_outage::specfun::{marcum_q1, Accuracy};
/// let q = marcum_q1(0.0, 1.0, Accuracy::default()).unwrap();
/// assert!((q - (-0.5f64).exp()).abs() < 1e-15);
/// ```
pub fn marcum_q1(a: f64, b: f64, acc: Accuracy) -> Result<f64> {
    check_marcum_args(a, b)?;
    if b == 0.0 {
        return Ok(1.0);
    }
    if a == 0.0 {
        return Ok((-0.5 * b * b).exp());
    }
    if b > a {
        upper_sum(a, b, acc)
    } else {
        Ok(1.0 - lower_sum(a, b, acc)?)
    }
}

/// `P1(a, b) = 1 - Q1(a, b)`, computed without forming the difference when
/// `Q1` is close to one.
pub fn marcum_p1(a: f64, b: f64, acc: Accuracy) -> Result<f64> {
    check_marcum_args(a, b)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    if a == 0.0 {
        return Ok(-(-0.5 * b * b).exp_m1());
    }
    if b > a {
        Ok(1.0 - upper_sum(a, b, acc)?)
    } else {
        lower_sum(a, b, acc)
    }
}

fn check_marcum_args(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::invalid(
            "marcum a",
            format!("must be finite and >= 0, got {a}"),
        ));
    }
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::invalid(
            "marcum b",
            format!("must be finite and >= 0, got {b}"),
        ));
    }
    Ok(())
}

/// Natural log of the Poisson(mean) pmf at `k`, given `ln k!`.
#[inline]
fn ln_poisson(k: f64, ln_mean: f64, mean: f64, ln_fact: f64) -> f64 {
    k * ln_mean - mean - ln_fact
}

/// `Q1(a,b) = Σ_k Pois(k; a²/2) · P[Pois(b²/2) ≤ k]`, summed upward from k = 0.
/// Used when `b > a`, where the result is at most about one half.
fn upper_sum(a: f64, b: f64, acc: Accuracy) -> Result<f64> {
    let lam = 0.5 * a * a;
    let mu = 0.5 * b * b;
    let (ln_lam, ln_mu) = (lam.ln(), mu.ln());
    let floor = acc.rel_tol * 1e-6;

    let mut ln_fact = 0.0;
    let mut cdf_mu = 0.0;
    let mut sum = 0.0;
    for k in 0..acc.max_terms {
        let kf = k as f64;
        if k > 0 {
            ln_fact += kf.ln();
        }
        cdf_mu += ln_poisson(kf, ln_mu, mu, ln_fact).exp();
        let weight = ln_poisson(kf, ln_lam, lam, ln_fact).exp();
        sum += weight * cdf_mu.min(1.0);
        // Remaining Poisson(lam) mass is bounded by a geometric tail once k > lam.
        if kf + 1.0 > lam {
            let ratio = lam / (kf + 1.0);
            let tail = weight * ratio / (1.0 - ratio);
            if tail <= floor * sum.max(f64::MIN_POSITIVE) || tail <= floor * 1e-10 {
                return Ok(sum.clamp(0.0, 1.0));
            }
        }
    }
    Err(Error::NonConvergence {
        function: "marcum_q1",
        terms: acc.max_terms,
    })
}

/// `1 - Q1(a,b) = Σ_k Pois(k; a²/2) · P[Pois(b²/2) > k]`, summed downward from
/// the top of the Poisson(a²/2) window. Used when `a ≥ b`.
fn lower_sum(a: f64, b: f64, acc: Accuracy) -> Result<f64> {
    let lam = 0.5 * a * a;
    let mu = 0.5 * b * b;
    let (ln_lam, ln_mu) = (lam.ln(), mu.ln());
    let floor = acc.rel_tol * 1e-6;

    // Top of the window: first k > lam whose geometric tail bound is negligible.
    let mut ln_fact = 0.0;
    let mut top = None;
    for k in 1..acc.max_terms {
        let kf = k as f64;
        ln_fact += kf.ln();
        if kf > lam {
            let weight = ln_poisson(kf, ln_lam, lam, ln_fact).exp();
            let ratio = lam / (kf + 1.0);
            if weight / (1.0 - ratio) <= floor * 1e-10 {
                top = Some((k, ln_fact));
                break;
            }
        }
    }
    let (top, ln_fact_top) = top.ok_or(Error::NonConvergence {
        function: "marcum_q1",
        terms: acc.max_terms,
    })?;

    // Poisson(mu) tail strictly above `top`; top > lam >= mu so terms decrease.
    let mut tail_mu = 0.0;
    let mut ln_fact_j = ln_fact_top;
    let mut converged = false;
    for j in (top + 1)..(top + acc.max_terms) {
        let jf = j as f64;
        ln_fact_j += jf.ln();
        let term = ln_poisson(jf, ln_mu, mu, ln_fact_j).exp();
        tail_mu += term;
        if term <= EPS * tail_mu || term == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            function: "marcum_q1",
            terms: acc.max_terms,
        });
    }

    // Walk k = top, top-1, ..., 0 with tail_mu = P[Pois(mu) > k].
    let mut sum = 0.0;
    let mut ln_fact_k = ln_fact_top;
    for k in (0..=top).rev() {
        let kf = k as f64;
        let weight = ln_poisson(kf, ln_lam, lam, ln_fact_k).exp();
        sum += weight * tail_mu.min(1.0);
        tail_mu += ln_poisson(kf, ln_mu, mu, ln_fact_k).exp();
        if k > 0 {
            ln_fact_k -= kf.ln();
        }
    }
    Ok(sum.clamp(0.0, 1.0))
}
