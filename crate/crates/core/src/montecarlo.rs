//! Trial-level Monte Carlo estimate of the outage probability.
//!
//! Every trial owns an independent ChaCha8 stream selected by its index, so
//! the estimate for a given `(seed, trials)` does not depend on how the trial
//! range is split across workers. Outage events are counted as integers and
//! summed, which is exact in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{sample_fading, FadingEnv, LinkParams};
use crate::error::{Error, Result};
use crate::outage::{outage_total, LinkPair, ENV_CASES};

pub const DEFAULT_SEED: u64 = 0x5EED_2019;
pub const DEFAULT_TRIALS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Pins the (main, interferer) environments instead of drawing them.
    pub force_env: Option<(FadingEnv, FadingEnv)>,
    /// Number of contiguous trial chunks; 0 picks one per rayon thread.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            force_env: None,
            workers: 0,
        }
    }
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        Ok(SimConfig {
            trials,
            seed,
            ..SimConfig::default()
        })
    }

    pub fn with_force_env(mut self, force: Option<(FadingEnv, FadingEnv)>) -> Self {
        self.force_env = force;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// Empirical outage probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl OutageEstimate {
    pub fn from_count(outages: u64, trials: u64) -> Self {
        let p_hat = outages as f64 / trials as f64;
        OutageEstimate {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            trials,
        }
    }
}

/// One sampled SIR and the environments it was drawn under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirSample {
    pub sir: f64,
    pub env_main: FadingEnv,
    pub env_interferer: FadingEnv,
}

/// Source of per-trial random streams.
#[derive(Debug, Clone)]
pub struct TrialStreams {
    base: ChaCha8Rng,
}

impl TrialStreams {
    pub fn new(seed: u64) -> Self {
        TrialStreams {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The stream owned by trial `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng
    }
}

fn draw_env<R: Rng + ?Sized>(link: &LinkParams, rng: &mut R) -> FadingEnv {
    if rng.random::<f64>() < link.p_los {
        FadingEnv::LoS
    } else {
        FadingEnv::NLoS
    }
}

/// Draws one SIR `h_m β_m / (h_I β_I)` with Bernoulli environments for both links.
pub fn sample_sir<R: Rng + ?Sized>(pair: &LinkPair, rng: &mut R) -> SirSample {
    let env_main = draw_env(&pair.main, rng);
    let env_interferer = draw_env(&pair.interferer, rng);
    let h_m = sample_fading(env_main, pair.main.k, rng);
    let h_i = loop {
        let h = sample_fading(env_interferer, pair.interferer.k, rng);
        if h > 0.0 {
            break h;
        }
    };
    SirSample {
        sir: h_m * pair.main.beta / (h_i * pair.interferer.beta),
        env_main,
        env_interferer,
    }
}

/// Estimates `P[SIR < γ_t]` over `cfg.trials` independent trials.
pub fn simulate_outage(pair: &LinkPair, cfg: &SimConfig) -> Result<OutageEstimate> {
    if cfg.trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let pair = match cfg.force_env {
        Some((m, i)) => pair.forced(m, i),
        None => *pair,
    };
    let streams = TrialStreams::new(cfg.seed);
    let chunks = if cfg.workers == 0 {
        rayon::current_num_threads()
    } else {
        cfg.workers
    } as u64;
    let chunks = chunks.clamp(1, cfg.trials);
    let per_chunk = cfg.trials.div_ceil(chunks);

    let outages: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * per_chunk;
            let end = (start + per_chunk).min(cfg.trials);
            (start..end)
                .filter(|&t| {
                    let mut rng = streams.stream(t);
                    sample_sir(&pair, &mut rng).sir < pair.gamma_t
                })
                .count() as u64
        })
        .sum();
    Ok(OutageEstimate::from_count(outages, cfg.trials))
}

/// Parses `main=L|N,intf=L|N` (either order; `interferer` also accepted).
pub fn parse_force_env(text: &str) -> Result<(FadingEnv, FadingEnv)> {
    let mut main = None;
    let mut interferer = None;
    for part in text.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::invalid(
                "force-env",
                format!("expected main=L|N,intf=L|N, got {text:?}"),
            )
        })?;
        let slot = match key.trim() {
            "main" => &mut main,
            "intf" | "interferer" => &mut interferer,
            other => {
                return Err(Error::invalid(
                    "force-env",
                    format!("unknown link {other:?}"),
                ))
            }
        };
        if slot.replace(value.parse::<FadingEnv>()?).is_some() {
            return Err(Error::invalid(
                "force-env",
                format!("link {:?} given twice", key.trim()),
            ));
        }
    }
    match (main, interferer) {
        (Some(m), Some(i)) => Ok((m, i)),
        _ => Err(Error::invalid(
            "force-env",
            "both main and intf must be given",
        )),
    }
}

/// Allowed gap between analytic and simulated outage beyond `3·stderr`.
pub const VALIDATION_SLACK: f64 = 1e-3;

/// One analytic-vs-simulated comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationRow {
    /// `None` for the environment-averaged total.
    pub case: Option<(FadingEnv, FadingEnv)>,
    pub analytic: f64,
    pub estimate: OutageEstimate,
}

impl ValidationRow {
    pub fn label(&self) -> String {
        match self.case {
            None => "total".to_string(),
            Some((m, i)) => format!("{m}{i}"),
        }
    }

    pub fn deviation(&self) -> f64 {
        (self.estimate.p_hat - self.analytic).abs()
    }

    /// Deviation in standard errors; infinite if the estimate has zero
    /// spread but disagrees.
    pub fn z_score(&self) -> f64 {
        let d = self.deviation();
        if d == 0.0 {
            0.0
        } else {
            d / self.estimate.stderr
        }
    }

    pub fn passes(&self) -> bool {
        self.deviation() <= 3.0 * self.estimate.stderr + VALIDATION_SLACK
    }
}

/// Compares the analytic total and the four forced cases against
/// simulation. `cfg.force_env` is ignored; each row sets its own.
pub fn validate_pair(pair: &LinkPair, cfg: &SimConfig) -> Result<Vec<ValidationRow>> {
    let analytic = outage_total(pair)?;
    let mut rows = Vec::with_capacity(5);
    rows.push(ValidationRow {
        case: None,
        analytic: analytic.total,
        estimate: simulate_outage(pair, &cfg.with_force_env(None))?,
    });
    for (m, i) in ENV_CASES {
        rows.push(ValidationRow {
            case: Some((m, i)),
            analytic: analytic.case(m, i),
            estimate: simulate_outage(pair, &cfg.with_force_env(Some((m, i))))?,
        });
    }
    Ok(rows)
}
