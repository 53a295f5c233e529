//! Integral identities behind the closed forms, and a direct numerical
//! integration route to each conditional outage probability.
//!
//! The three identities, for `c > 0`:
//!
//! ```text
//! ∫₀^∞ e^{−c²x} I0(d√(2x)) Q1(e, f√(2x)) dx
//!     = c^{−2} [ e^{d²/(2c²)} Q1(ce/r, df/(cr)) − (f²/r²) e^{(d² − c²e²)/(2r²)} I0(def/r²) ]
//! ∫₀^∞ e^{−c²x} Q1(e, f√(2x)) dx = c^{−2} [ 1 − (f²/r²) e^{−c²e²/(2r²)} ]
//! ∫₀^∞ e^{−c²x} I0(d√(2x)) dx     = c^{−2} e^{d²/(2c²)}
//! ```
//!
//! with `r² = c² + f²`. The closed forms here are checked against
//! [`exp_bessel_marcum_quadrature`] and friends by the test suites.

use crate::channel::{fading_pdf, FadingEnv};
use crate::error::{require_positive, Result};
use crate::quad::integrate_to_infinity;
use crate::specfun::{bessel_i0_scaled, marcum_p1, marcum_q1, Accuracy};

const QUAD_ABS: f64 = 1e-14;
const QUAD_REL: f64 = 1e-11;

/// Closed form of `∫ e^{−c²x} I0(d√(2x)) Q1(e, f√(2x)) dx`.
pub fn exp_bessel_marcum_closed(c: f64, d: f64, e: f64, f: f64) -> Result<f64> {
    require_positive("c", c)?;
    let c2 = c * c;
    let r2 = c2 + f * f;
    let r = r2.sqrt();
    let q = marcum_q1(c * e / r, d * f / (c * r), Accuracy::default())?;
    let z = d * e * f / r2;
    // e^{(d² − c²e²)/(2r²)} I0(z) = e^{(d² − c²e²)/(2r²) + z} · I0_scaled(z)
    let second = f * f / r2 * ((d * d - c2 * e * e) / (2.0 * r2) + z).exp() * bessel_i0_scaled(z);
    Ok(((d * d / (2.0 * c2)).exp() * q - second) / c2)
}

/// Closed form of `∫ e^{−c²x} Q1(e, f√(2x)) dx`.
pub fn exp_marcum_closed(c: f64, e: f64, f: f64) -> Result<f64> {
    require_positive("c", c)?;
    let c2 = c * c;
    let r2 = c2 + f * f;
    Ok((1.0 - f * f / r2 * (-c2 * e * e / (2.0 * r2)).exp()) / c2)
}

/// Closed form of `∫ e^{−c²x} I0(d√(2x)) dx`.
pub fn exp_bessel_closed(c: f64, d: f64) -> Result<f64> {
    require_positive("c", c)?;
    let c2 = c * c;
    Ok((d * d / (2.0 * c2)).exp() / c2)
}

/// `e^{−c²x} I0(d√(2x))` evaluated without overflow.
fn exp_bessel(c2: f64, d: f64, x: f64) -> f64 {
    let z = d * (2.0 * x).sqrt();
    (z - c2 * x).exp() * bessel_i0_scaled(z)
}

/// Adaptive quadrature of the left-hand side of [`exp_bessel_marcum_closed`].
pub fn exp_bessel_marcum_quadrature(c: f64, d: f64, e: f64, f: f64) -> Result<f64> {
    require_positive("c", c)?;
    let c2 = c * c;
    let acc = Accuracy::default();
    let mut failure = None;
    let v = integrate_to_infinity(
        |x| match marcum_q1(e, f * (2.0 * x).sqrt(), acc) {
            Ok(q) => exp_bessel(c2, d, x) * q,
            Err(err) => {
                failure.get_or_insert(err);
                0.0
            }
        },
        0.0,
        QUAD_ABS,
        QUAD_REL,
    )?;
    failure.map_or(Ok(v), Err)
}

/// Adaptive quadrature of the left-hand side of [`exp_marcum_closed`].
pub fn exp_marcum_quadrature(c: f64, e: f64, f: f64) -> Result<f64> {
    require_positive("c", c)?;
    let c2 = c * c;
    let acc = Accuracy::default();
    integrate_to_infinity(
        |x| (-c2 * x).exp() * marcum_q1(e, f * (2.0 * x).sqrt(), acc).unwrap_or(f64::NAN),
        0.0,
        QUAD_ABS,
        QUAD_REL,
    )
}

/// Adaptive quadrature of the left-hand side of [`exp_bessel_closed`].
pub fn exp_bessel_quadrature(c: f64, d: f64) -> Result<f64> {
    require_positive("c", c)?;
    let c2 = c * c;
    integrate_to_infinity(|x| exp_bessel(c2, d, x), 0.0, QUAD_ABS, QUAD_REL)
}

/// CDF of the fading power gain.
fn fading_cdf(env: FadingEnv, k: f64, h: f64) -> Result<f64> {
    match env {
        FadingEnv::NLoS => Ok(-(-h).exp_m1()),
        FadingEnv::LoS => marcum_p1((2.0 * k).sqrt(), h.sqrt(), Accuracy::default()),
    }
}

/// `P[h_m · v < γ_t · h_I]` by integrating the main-link CDF against the
/// interference-link density, for `v = β_m / β_I`.
pub fn conditional_outage_by_integration(
    env_main: FadingEnv,
    env_interferer: FadingEnv,
    k_m: f64,
    k_i: f64,
    v: f64,
    gamma_t: f64,
) -> Result<f64> {
    require_positive("v", v)?;
    require_positive("gamma_t", gamma_t)?;
    let scale = gamma_t / v;
    let mut failure = None;
    let p = integrate_to_infinity(
        |g| match fading_cdf(env_main, k_m, scale * g) {
            Ok(cdf) => cdf * fading_pdf(env_interferer, k_i, g),
            Err(err) => {
                failure.get_or_insert(err);
                0.0
            }
        },
        0.0,
        1e-13,
        1e-11,
    )?;
    failure.map_or(Ok(p), Err)
}

/// Parameters that reduce the LoS/LoS integral to the first identity:
/// `(c, d, e, f) = (√½, √K_I, √(2K_m), √(γ_t/(2v)))`.
pub fn ll_identity_args(k_m: f64, k_i: f64, v: f64, gamma_t: f64) -> (f64, f64, f64, f64) {
    (
        0.5f64.sqrt(),
        k_i.sqrt(),
        (2.0 * k_m).sqrt(),
        (gamma_t / (2.0 * v)).sqrt(),
    )
}

/// `(c, e, f) = (1, √(2K_m), √(γ_t/(2v)))` for the LoS/NLoS integral.
pub fn ln_identity_args(k_m: f64, v: f64, gamma_t: f64) -> (f64, f64, f64) {
    (1.0, (2.0 * k_m).sqrt(), (gamma_t / (2.0 * v)).sqrt())
}

/// `(c, d) = (√(½ + γ_t/v), √K_I)` for the NLoS/LoS integral.
pub fn nl_identity_args(k_i: f64, v: f64, gamma_t: f64) -> (f64, f64) {
    ((0.5 + gamma_t / v).sqrt(), k_i.sqrt())
}
