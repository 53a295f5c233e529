//! Elevation-angle dependent channel components and the LoS/NLoS fading
//! power distributions.
//!
//! # Angle units
//!
//! Angles are radians everywhere in this crate with one exception: the LoS
//! probability curve is calibrated in degrees (its offset `a1 = 12.08` is an
//! angle in degrees), so [`los_probability`] converts its argument before
//! evaluating the logistic. The Rician factor curve, whose growth rate is
//! `(2/π)·ln(K(π/2)/K(0))`, is evaluated directly in radians.
//!
//! # Fading normalisation
//!
//! The LoS fading power is noncentral chi-squared with two degrees of freedom
//! and noncentrality `2K`; its mean is `2 + 2K`, not one. LoS links therefore
//! carry a mean fading gain of `2 + 2K` over NLoS links (unit-mean
//! exponential) on top of their smaller path-loss exponent.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{require_positive, Error, Result};
use crate::geometry::{scenario_theta, ChannelKind, LinkGeometry};
use crate::specfun::bessel_i0_scaled;

/// Propagation environment parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    /// LoS-probability offset (degrees) and scale.
    pub a1: f64,
    /// LoS-probability rate, per degree.
    pub b1: f64,
    /// Path-loss exponent of a horizontal link.
    pub alpha_0: f64,
    /// Path-loss exponent of a vertical link.
    pub alpha_90: f64,
    /// Linear Rician factor of a horizontal link.
    pub k_0: f64,
    /// Linear Rician factor of a vertical link.
    pub k_90: f64,
}

impl Default for Environment {
    /// Urban parameters: a1 = 12.08, b1 = 0.11, α = 3.5 → 2, K = 1 → 15.
    fn default() -> Self {
        Environment {
            a1: 12.08,
            b1: 0.11,
            alpha_0: 3.5,
            alpha_90: 2.0,
            k_0: 1.0,
            k_90: 15.0,
        }
    }
}

impl Environment {
    pub fn validate(&self) -> Result<()> {
        require_positive("environment.a1", self.a1)?;
        require_positive("environment.b1", self.b1)?;
        require_positive("environment.alpha_0", self.alpha_0)?;
        require_positive("environment.alpha_90", self.alpha_90)?;
        require_positive("environment.k_0", self.k_0)?;
        require_positive("environment.k_90", self.k_90)?;
        if self.alpha_90 > self.alpha_0 {
            return Err(Error::invalid(
                "environment.alpha_90",
                "must not exceed alpha_0",
            ));
        }
        if self.k_90 < self.k_0 {
            return Err(Error::invalid("environment.k_90", "must be at least k_0"));
        }
        Ok(())
    }
}

/// LoS probability at elevation `theta` (radians).
pub fn los_probability(theta: f64, env: &Environment) -> f64 {
    let deg = theta.to_degrees();
    1.0 / (1.0 + env.a1 * (-env.b1 * (deg - env.a1)).exp())
}

/// Path-loss exponent, linear in the LoS probability and calibrated so that
/// it equals `alpha_0` at 0 and `alpha_90` at π/2 exactly.
pub fn path_loss_exponent(theta: f64, env: &Environment) -> f64 {
    let p0 = los_probability(0.0, env);
    let p90 = los_probability(FRAC_PI_2, env);
    let p = los_probability(theta, env);
    // Interpolating between the endpoints keeps both calibration points exact.
    let t = (p - p0) / (p90 - p0);
    env.alpha_0 + (env.alpha_90 - env.alpha_0) * t
}

/// Linear Rician factor `k_0 · exp(b3·θ)` with `b3 = (2/π) ln(k_90/k_0)`.
pub fn rician_factor(theta: f64, env: &Environment) -> f64 {
    if theta == FRAC_PI_2 {
        return env.k_90;
    }
    let rate = (env.k_90 / env.k_0).ln() / FRAC_PI_2;
    env.k_0 * (rate * theta).exp()
}

/// Mean received power scale `ell^(-alpha) · p_tx`.
pub fn mean_rx_power(ell: f64, alpha: f64, p_tx: f64) -> f64 {
    p_tx * ell.powf(-alpha)
}

/// LoS or NLoS propagation state of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FadingEnv {
    LoS,
    NLoS,
}

impl FadingEnv {
    pub fn short_name(self) -> &'static str {
        match self {
            FadingEnv::LoS => "L",
            FadingEnv::NLoS => "N",
        }
    }
}

impl fmt::Display for FadingEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for FadingEnv {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l" | "los" => Ok(FadingEnv::LoS),
            "n" | "nlos" => Ok(FadingEnv::NLoS),
            other => Err(Error::invalid(
                "fading environment",
                format!("expected L or N, got {other:?}"),
            )),
        }
    }
}

/// Density of the fading power gain `h`.
///
/// LoS: `½ e^{-K - h/2} I0(√(2Kh))`; NLoS: `e^{-h}`.
pub fn fading_pdf(env: FadingEnv, k: f64, h: f64) -> f64 {
    if h < 0.0 {
        return 0.0;
    }
    match env {
        FadingEnv::NLoS => (-h).exp(),
        FadingEnv::LoS => {
            let z = (2.0 * k * h).sqrt();
            // -K - h/2 + z = -(√(h/2) - √K)²
            let gap = (0.5 * h).sqrt() - k.sqrt();
            0.5 * (-gap * gap).exp() * bessel_i0_scaled(z)
        }
    }
}

/// Draws one fading power gain.
///
/// LoS: `(G1 + √(2K))² + G2²` with independent standard normals;
/// NLoS: `-ln U` with `U` uniform on (0, 1].
pub fn sample_fading<R: Rng + ?Sized>(env: FadingEnv, k: f64, rng: &mut R) -> f64 {
    match env {
        FadingEnv::NLoS => {
            let u = 1.0 - rng.random::<f64>();
            -u.ln()
        }
        FadingEnv::LoS => {
            let g1: f64 = StandardNormal.sample(rng);
            let g2: f64 = StandardNormal.sample(rng);
            let re = g1 + (2.0 * k).sqrt();
            re * re + g2 * g2
        }
    }
}

/// Per-link quantities derived from the geometry and the environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Probability that the link is LoS.
    pub p_los: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Rician factor used when the link is LoS.
    pub k: f64,
    /// Mean received power `ell^(-alpha) · P`.
    pub beta: f64,
}

impl LinkParams {
    pub fn new(p_los: f64, alpha: f64, k: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_los) {
            return Err(Error::invalid(
                "p_los",
                format!("must lie in [0, 1], got {p_los}"),
            ));
        }
        require_positive("alpha", alpha)?;
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::invalid(
                "k",
                format!("must be finite and >= 0, got {k}"),
            ));
        }
        require_positive("beta", beta)?;
        Ok(LinkParams {
            p_los,
            alpha,
            k,
            beta,
        })
    }

    /// Evaluates the channel model for a link of `kind` with geometry `geom`
    /// and transmit power `p_tx` (watts).
    pub fn derive(
        env: &Environment,
        kind: ChannelKind,
        geom: &LinkGeometry,
        p_tx: f64,
    ) -> Result<Self> {
        require_positive("transmit power", p_tx)?;
        let theta = scenario_theta(kind, geom);
        let alpha = path_loss_exponent(theta, env);
        LinkParams::new(
            los_probability(theta, env),
            alpha,
            rician_factor(theta, env),
            mean_rx_power(geom.length(), alpha, p_tx),
        )
    }

    /// Copy with the LoS probability pinned to 1 (LoS) or 0 (NLoS).
    pub fn forced(self, env: FadingEnv) -> Self {
        LinkParams {
            p_los: match env {
                FadingEnv::LoS => 1.0,
                FadingEnv::NLoS => 0.0,
            },
            ..self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn env() -> Environment {
        Environment::default()
    }

    #[test]
    fn los_probability_values() {
        let e = env();
        let at_a1 = los_probability(12.08f64.to_radians(), &e);
        assert!((at_a1 - 1.0 / 13.08).abs() < 1e-15);
        assert!((los_probability(FRAC_PI_2, &e) - 0.997_716_247_081_094).abs() < 1e-12);
        assert!((los_probability(FRAC_PI_2 / 2.0, &e) - 0.755_774_081_938_645_8).abs() < 1e-12);
    }

    #[test]
    fn endpoint_calibration_is_exact() {
        let e = env();
        assert_eq!(path_loss_exponent(0.0, &e), 3.5);
        assert_eq!(path_loss_exponent(FRAC_PI_2, &e), 2.0);
        assert_eq!(rician_factor(0.0, &e), 1.0);
        assert_eq!(rician_factor(FRAC_PI_2, &e), 15.0);
        let a45 = path_loss_exponent(FRAC_PI_2 / 2.0, &e);
        assert!((a45 - 2.371_735_904_983_945).abs() < 1e-12);
    }

    #[test]
    fn rician_factor_at_oblique_angle() {
        let k = rician_factor(0.7f64.atan(), &env());
        assert!((k - 2.865_923_182_330_367_7).abs() < 1e-12);
    }

    #[test]
    fn monotone_on_grid() {
        let e = env();
        let n = 1000;
        let grid: Vec<f64> = (0..=n).map(|i| FRAC_PI_2 * i as f64 / n as f64).collect();
        for w in grid.windows(2) {
            assert!(los_probability(w[1], &e) > los_probability(w[0], &e));
            assert!(rician_factor(w[1], &e) > rician_factor(w[0], &e));
            assert!(path_loss_exponent(w[1], &e) < path_loss_exponent(w[0], &e));
        }
    }

    #[test]
    fn mean_power() {
        assert_eq!(mean_rx_power(1.0, 3.1, 2e-8), 2e-8);
        assert!((mean_rx_power(100.0, 2.0, 1e-8) - 1e-12).abs() < 1e-27);
    }

    #[test]
    fn pdf_at_origin() {
        assert_eq!(fading_pdf(FadingEnv::NLoS, 0.0, 0.0), 1.0);
        for &k in &[0.5f64, 2.866, 15.0] {
            let want = 0.5 * (-k).exp();
            assert!((fading_pdf(FadingEnv::LoS, k, 0.0) - want).abs() < 1e-16);
        }
    }

    #[test]
    fn sample_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let los: f64 = (0..n)
            .map(|_| sample_fading(FadingEnv::LoS, 15.0, &mut rng))
            .sum::<f64>()
            / n as f64;
        assert!((los - 32.0).abs() < 0.15, "{los}");
        let nlos: f64 = (0..n)
            .map(|_| sample_fading(FadingEnv::NLoS, 15.0, &mut rng))
            .sum::<f64>()
            / n as f64;
        assert!((nlos - 1.0).abs() < 0.003, "{nlos}");
    }

    #[test]
    fn environment_validation() {
        assert!(env().validate().is_ok());
        let bad = Environment {
            alpha_90: 4.0,
            ..env()
        };
        assert!(bad.validate().is_err());
        let bad = Environment { k_90: 0.5, ..env() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn derived_a2a_link_uses_vertical_values() {
        let g = LinkGeometry::from_distances(150.0, 0.0).unwrap();
        let p = LinkParams::derive(&env(), ChannelKind::A2A, &g, 1e-9).unwrap();
        assert_eq!(p.k, 15.0);
        assert_eq!(p.alpha, 2.0);
        assert!((p.beta - 1e-9 / 22500.0).abs() < 1e-24);
    }
}
