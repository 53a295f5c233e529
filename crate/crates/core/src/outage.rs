//! Closed-form outage probabilities for the four LoS/NLoS combinations of the
//! main and interference links, and their total-probability mixture.
//!
//! With `s = β_m + γ_t β_I`, the LoS/LoS case is
//!
//! ```text
//! p_LL = 1 − Q1(A, B) + (γ_t β_I / s) · exp(−(A² + B²)/2) · I0(A·B)
//! A² = 2 K_m β_m / s,   B² = 2 γ_t K_I β_I / s
//! ```
//!
//! and `A·B = (2β_m/s)·√(γ_t K_m K_I β_I / β_m)`. The exponential–Bessel
//! product is evaluated as `exp(−(A − B)²/2) · e^{−AB} I0(AB)` so that large
//! Rician factors neither overflow the Bessel function nor underflow the
//! exponential. `1 − Q1` is taken from [`marcum_p1`] directly.

use crate::channel::{FadingEnv, LinkParams};
use crate::error::{require_positive, Error, Result};
use crate::specfun::{bessel_i0_scaled, bessel_i1_scaled, marcum_p1, Accuracy};

/// Main link, interference link and the target SIR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPair {
    pub main: LinkParams,
    pub interferer: LinkParams,
    pub gamma_t: f64,
}

impl LinkPair {
    pub fn new(main: LinkParams, interferer: LinkParams, gamma_t: f64) -> Result<Self> {
        require_positive("gamma_t", gamma_t)?;
        // Re-validate in case the params were built by struct literal.
        let main = LinkParams::new(main.p_los, main.alpha, main.k, main.beta)?;
        let interferer = LinkParams::new(
            interferer.p_los,
            interferer.alpha,
            interferer.k,
            interferer.beta,
        )?;
        Ok(LinkPair {
            main,
            interferer,
            gamma_t,
        })
    }

    /// Ratio `β_m / β_I` of mean received powers.
    pub fn beta_ratio(&self) -> f64 {
        self.main.beta / self.interferer.beta
    }

    /// Copy with both LoS probabilities pinned to the given environments.
    pub fn forced(self, main: FadingEnv, interferer: FadingEnv) -> Self {
        LinkPair {
            main: self.main.forced(main),
            interferer: self.interferer.forced(interferer),
            ..self
        }
    }
}

/// The four conditional outage probabilities, their weights and the total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageBreakdown {
    pub p_ll: f64,
    pub p_ln: f64,
    pub p_nl: f64,
    pub p_nn: f64,
    pub w_ll: f64,
    pub w_ln: f64,
    pub w_nl: f64,
    pub w_nn: f64,
    pub total: f64,
}

impl OutageBreakdown {
    /// Conditional outage probability given the environments of both links.
    pub fn case(&self, main: FadingEnv, interferer: FadingEnv) -> f64 {
        use FadingEnv::*;
        match (main, interferer) {
            (LoS, LoS) => self.p_ll,
            (LoS, NLoS) => self.p_ln,
            (NLoS, LoS) => self.p_nl,
            (NLoS, NLoS) => self.p_nn,
        }
    }

    pub fn weight(&self, main: FadingEnv, interferer: FadingEnv) -> f64 {
        use FadingEnv::*;
        match (main, interferer) {
            (LoS, LoS) => self.w_ll,
            (LoS, NLoS) => self.w_ln,
            (NLoS, LoS) => self.w_nl,
            (NLoS, NLoS) => self.w_nn,
        }
    }
}

/// The four (main, interferer) environment combinations in LL, LN, NL, NN order.
pub const ENV_CASES: [(FadingEnv, FadingEnv); 4] = [
    (FadingEnv::LoS, FadingEnv::LoS),
    (FadingEnv::LoS, FadingEnv::NLoS),
    (FadingEnv::NLoS, FadingEnv::LoS),
    (FadingEnv::NLoS, FadingEnv::NLoS),
];

/// Target SIR `2^(R/W) − 1` for rate `R` (bit/s) over bandwidth `W` (Hz).
pub fn target_sir(rate_target: f64, bandwidth: f64) -> Result<f64> {
    require_positive("target rate", rate_target)?;
    require_positive("bandwidth", bandwidth)?;
    Ok((rate_target / bandwidth * std::f64::consts::LN_2).exp_m1())
}

fn clamp_probability(p: f64) -> f64 {
    debug_assert!(
        p > -1e-9 && p < 1.0 + 1e-9,
        "probability {p} outside [0, 1] beyond rounding"
    );
    p.clamp(0.0, 1.0)
}

/// `1 − Q1(A,B) + w · exp(−(A²+B²)/2) · I0(AB)`.
fn ll_core(a: f64, b: f64, w: f64, acc: Accuracy) -> Result<f64> {
    let cdf = marcum_p1(a, b, acc)?;
    let gap = a - b;
    let bessel_term = (-0.5 * gap * gap).exp() * bessel_i0_scaled(a * b);
    Ok(clamp_probability(cdf + w * bessel_term))
}

/// Outage probability with both links LoS.
///
/// `k_m`, `k_i` may be zero (Rayleigh degenerate case); the `β` and `γ_t`
/// inputs must be positive.
pub fn outage_ll(k_m: f64, k_i: f64, beta_m: f64, beta_i: f64, gamma_t: f64) -> Result<f64> {
    outage_ll_with(k_m, k_i, beta_m, beta_i, gamma_t, Accuracy::default())
}

pub fn outage_ll_with(
    k_m: f64,
    k_i: f64,
    beta_m: f64,
    beta_i: f64,
    gamma_t: f64,
    acc: Accuracy,
) -> Result<f64> {
    check_k(k_m)?;
    check_k(k_i)?;
    require_positive("beta_m", beta_m)?;
    require_positive("beta_i", beta_i)?;
    require_positive("gamma_t", gamma_t)?;
    outage_ll_of_v_with(beta_m / beta_i, k_m, k_i, gamma_t, acc)
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "rician factor",
            format!("must be finite and >= 0, got {k}"),
        ))
    }
}

/// Outage probability with a LoS main link and an NLoS interference link.
pub fn outage_ln(k_m: f64, beta_m: f64, beta_i: f64, gamma_t: f64) -> f64 {
    let interference = gamma_t * beta_i;
    let denom = 2.0 * beta_m + interference;
    clamp_probability(interference / denom * (-2.0 * k_m * beta_m / denom).exp())
}

/// Outage probability with an NLoS main link and a LoS interference link.
pub fn outage_nl(k_i: f64, beta_m: f64, beta_i: f64, gamma_t: f64) -> f64 {
    let interference = 2.0 * gamma_t * beta_i;
    let denom = interference + beta_m;
    // 1 − x·e^{−y} = −expm1(ln x − y), which keeps precision when the product is near one.
    let survive = (beta_m / denom).ln() - k_i * interference / denom;
    clamp_probability(-survive.exp_m1())
}

/// Outage probability with both links NLoS.
pub fn outage_nn(beta_m: f64, beta_i: f64, gamma_t: f64) -> f64 {
    let interference = gamma_t * beta_i;
    clamp_probability(interference / (beta_m + interference))
}

/// Total outage probability and its breakdown for `pair`.
pub fn outage_total(pair: &LinkPair) -> Result<OutageBreakdown> {
    outage_total_with(pair, Accuracy::default())
}

pub fn outage_total_with(pair: &LinkPair, acc: Accuracy) -> Result<OutageBreakdown> {
    let (m, i, g) = (&pair.main, &pair.interferer, pair.gamma_t);
    let p_ll = outage_ll_with(m.k, i.k, m.beta, i.beta, g, acc)?;
    let p_ln = outage_ln(m.k, m.beta, i.beta, g);
    let p_nl = outage_nl(i.k, m.beta, i.beta, g);
    let p_nn = outage_nn(m.beta, i.beta, g);

    let (pm, pi) = (m.p_los, i.p_los);
    let w_ll = pm * pi;
    let w_ln = pm * (1.0 - pi);
    let w_nl = (1.0 - pm) * pi;
    let w_nn = (1.0 - pm) * (1.0 - pi);
    let total = clamp_probability(w_ll * p_ll + w_ln * p_ln + w_nl * p_nl + w_nn * p_nn);
    Ok(OutageBreakdown {
        p_ll,
        p_ln,
        p_nl,
        p_nn,
        w_ll,
        w_ln,
        w_nl,
        w_nn,
        total,
    })
}

/// `A(v) = √(2 K_m v / (v + γ_t))`, `B(v) = √(2 γ_t K_I / (v + γ_t))`.
pub fn ab_of_v(v: f64, k_m: f64, k_i: f64, gamma_t: f64) -> (f64, f64) {
    let s = v + gamma_t;
    ((2.0 * k_m * v / s).sqrt(), (2.0 * gamma_t * k_i / s).sqrt())
}

/// LoS/LoS outage as a function of `v = β_m / β_I`.
pub fn outage_ll_of_v(v: f64, k_m: f64, k_i: f64, gamma_t: f64) -> Result<f64> {
    outage_ll_of_v_with(v, k_m, k_i, gamma_t, Accuracy::default())
}

pub fn outage_ll_of_v_with(v: f64, k_m: f64, k_i: f64, gamma_t: f64, acc: Accuracy) -> Result<f64> {
    require_positive("v", v)?;
    check_k(k_m)?;
    check_k(k_i)?;
    require_positive("gamma_t", gamma_t)?;
    let (a, b) = ab_of_v(v, k_m, k_i, gamma_t);
    ll_core(a, b, gamma_t / (v + gamma_t), acc)
}

/// NLoS/NLoS outage `γ_t / (v + γ_t)`.
pub fn outage_nn_of_v(v: f64, gamma_t: f64) -> f64 {
    gamma_t / (v + gamma_t)
}

/// `d/dv` of [`outage_nn_of_v`]: `−γ_t / (v + γ_t)²`.
pub fn outage_nn_of_v_derivative(v: f64, gamma_t: f64) -> f64 {
    let s = v + gamma_t;
    -gamma_t / (s * s)
}

/// Analytic `d/dv` of [`outage_ll_of_v`].
///
/// With `E = exp(−(A²+B²)/2)`, `N = p_NN(v)`:
///
/// ```text
/// p'_LL = (N − 1)·E·B·(I1(AB)·A' − I0(AB)·B')
///       + N·E·A·(I1(AB)·B' − I0(AB)·A')
///       + N'·E·I0(AB)
/// ```
pub fn outage_ll_of_v_derivative(v: f64, k_m: f64, k_i: f64, gamma_t: f64) -> Result<f64> {
    require_positive("v", v)?;
    check_k(k_m)?;
    check_k(k_i)?;
    require_positive("gamma_t", gamma_t)?;
    let s = v + gamma_t;
    let (a, b) = ab_of_v(v, k_m, k_i, gamma_t);
    // A' = K_m γ_t / (A s²) and B' = −γ_t K_I / (B s²); written without the
    // division so that K = 0 gives 0 instead of 0/0.
    let da = (k_m / (2.0 * v * s)).sqrt() * gamma_t / s;
    let db = -(gamma_t * k_i / (2.0 * s)).sqrt() / s;
    let gap = a - b;
    let e = (-0.5 * gap * gap).exp();
    let i0 = e * bessel_i0_scaled(a * b);
    let i1 = e * bessel_i1_scaled(a * b);
    let n = outage_nn_of_v(v, gamma_t);
    let dn = outage_nn_of_v_derivative(v, gamma_t);
    Ok((n - 1.0) * b * (i1 * da - i0 * db) + n * a * (i1 * db - i0 * da) + dn * i0)
}
