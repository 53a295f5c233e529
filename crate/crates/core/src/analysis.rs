//! Sweeps, optimal UAV height, the LoS/NLoS crossing point and the
//! monotonicity/ordering battery for the v-parameterised outage curves.

pub mod identities;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{require_positive, Error, Result};
use crate::outage::{
    outage_ll_of_v, outage_nn_of_v, outage_nn_of_v_derivative, outage_total, LinkPair,
    OutageBreakdown,
};
use crate::quad::golden_section_minimize;
use crate::scenario::Scenario;

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Vertical distance of the main link (m).
    MainHeight,
    /// Horizontal distance of the interference link (m).
    InterfererHorizontal,
    /// `β_m / β_I`, with β_I and both Rician factors taken from the scenario.
    BetaRatio,
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main_height" => Ok(SweepVariable::MainHeight),
            "interferer_horizontal" => Ok(SweepVariable::InterfererHorizontal),
            "beta_ratio" => Ok(SweepVariable::BetaRatio),
            other => Err(Error::invalid(
                "sweep variable",
                format!("expected main_height, interferer_horizontal or beta_ratio; got {other:?}"),
            )),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::MainHeight => "main_height",
            SweepVariable::InterfererHorizontal => "interferer_horizontal",
            SweepVariable::BetaRatio => "beta_ratio",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: SweepScale,
}

impl SweepSpec {
    pub fn new(
        variable: SweepVariable,
        start: f64,
        stop: f64,
        points: usize,
        scale: SweepScale,
    ) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(Error::invalid(
                "grid",
                format!("need start < stop, got {start}:{stop}"),
            ));
        }
        if points < 2 {
            return Err(Error::invalid("grid", "need at least 2 points"));
        }
        if scale == SweepScale::Log && start <= 0.0 {
            return Err(Error::invalid("grid", "log scale needs start > 0"));
        }
        Ok(SweepSpec {
            variable,
            start,
            stop,
            points,
            scale,
        })
    }

    /// Grid values, endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    return self.stop;
                }
                let t = i as f64 / n as f64;
                match self.scale {
                    SweepScale::Linear => self.start + t * (self.stop - self.start),
                    SweepScale::Log => {
                        (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                    }
                }
            })
            .collect()
    }
}

impl SweepSpec {
    /// Parses a grid given as `start:stop:points[:log]`.
    pub fn parse(variable: SweepVariable, text: &str) -> Result<Self> {
        let bad = || {
            Error::invalid(
                "grid",
                format!("expected start:stop:points[:log], got {text:?}"),
            )
        };
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let scale = match parts.get(3) {
            None => SweepScale::Linear,
            Some(&"log") => SweepScale::Log,
            Some(&"lin") => SweepScale::Linear,
            Some(_) => return Err(bad()),
        };
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let points: usize = parts[2].parse().map_err(|_| bad())?;
        SweepSpec::new(variable, start, stop, points, scale)
    }
}

/// The link pair obtained by setting `variable = x` in `scenario`.
pub fn pair_at(scenario: &Scenario, variable: SweepVariable, x: f64) -> Result<LinkPair> {
    match variable {
        SweepVariable::MainHeight => scenario.with_main_height(x)?.link_pair(),
        SweepVariable::InterfererHorizontal => scenario.with_interferer_horizontal(x)?.link_pair(),
        SweepVariable::BetaRatio => {
            require_positive("beta ratio", x)?;
            let mut pair = scenario.link_pair()?;
            pair.main.beta = x * pair.interferer.beta;
            LinkPair::new(pair.main, pair.interferer, pair.gamma_t)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub breakdown: OutageBreakdown,
}

/// Evaluates the outage breakdown at every grid point, in grid order.
pub fn sweep(scenario: &Scenario, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.grid()
        .into_par_iter()
        .map(|x| {
            let pair = pair_at(scenario, spec.variable, x)?;
            Ok(SweepRow {
                x,
                breakdown: outage_total(&pair)?,
            })
        })
        .collect()
}

/// Minimum coarse-grid size used by [`optimal_height`].
pub const MIN_HEIGHT_GRID: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightOptimum {
    pub height: f64,
    pub outage: f64,
}

/// Height in `[h_min, h_max]` minimising the total outage probability.
pub fn optimal_height(scenario: &Scenario, h_min: f64, h_max: f64) -> Result<HeightOptimum> {
    optimal_height_with_grid(scenario, h_min, h_max, 2 * MIN_HEIGHT_GRID)
}

/// As [`optimal_height`], with an explicit coarse-grid size (at least
/// [`MIN_HEIGHT_GRID`] points are always used). The best coarse cell and its
/// neighbours are refined by golden-section search to 1 mm.
pub fn optimal_height_with_grid(
    scenario: &Scenario,
    h_min: f64,
    h_max: f64,
    points: usize,
) -> Result<HeightOptimum> {
    if !(h_min.is_finite() && h_max.is_finite() && 0.0 <= h_min && h_min < h_max) {
        return Err(Error::invalid(
            "height range",
            format!("need 0 <= h_min < h_max, got {h_min}:{h_max}"),
        ));
    }
    let spec = SweepSpec::new(
        SweepVariable::MainHeight,
        h_min,
        h_max,
        points.max(MIN_HEIGHT_GRID),
        SweepScale::Linear,
    )?;
    let rows = sweep(scenario, &spec)?;
    let best = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.breakdown.total.total_cmp(&b.1.breakdown.total))
        .map(|(i, _)| i)
        .expect("grid has at least two points");
    let lo = rows[best.saturating_sub(1)].x;
    let hi = rows[(best + 1).min(rows.len() - 1)].x;
    let total_at = |h: f64| -> Result<f64> {
        Ok(outage_total(&pair_at(scenario, SweepVariable::MainHeight, h)?)?.total)
    };
    let (height, outage) = golden_section_minimize(total_at, lo, hi, 1e-3)?;
    let coarse = rows[best].breakdown.total;
    Ok(if coarse < outage {
        HeightOptimum {
            height: rows[best].x,
            outage: coarse,
        }
    } else {
        HeightOptimum { height, outage }
    })
}

/// Where the LoS/LoS and NLoS/NLoS outage curves intersect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingResult {
    pub v_prime: f64,
    /// Sign-change bracket found by the outward search.
    pub bracket: (f64, f64),
    /// `p_LL(v′) − p_NN(v′)`.
    pub residual: f64,
}

/// End behaviour of the LoS/LoS curve relative to the NLoS/NLoS one:
/// `(1 − p_LL)/(1 − p_NN) → (1 + K_m)e^{−K_I}` as `v → 0` and
/// `p_LL/p_NN → (1 + K_I)e^{−K_m}` as `v → ∞`.
///
/// The curves change order somewhere in `(0, ∞)` only if both ratios are
/// below one. Equal Rician factors always qualify; strongly unequal ones
/// (e.g. `K_m = 0.5, K_I = 1`) do not, and then no crossing exists.
pub fn crossing_end_ratios(k_m: f64, k_i: f64) -> (f64, f64) {
    ((1.0 + k_m) * (-k_i).exp(), (1.0 + k_i) * (-k_m).exp())
}

const CROSSING_RANGE: (f64, f64) = (1e-8, 1e8);
// |g| below this level is not trusted as a sign.
const SIGN_FLOOR: f64 = 1e-13;

fn crossing_gap(v: f64, k_m: f64, k_i: f64, gamma_t: f64) -> Result<f64> {
    Ok(outage_ll_of_v(v, k_m, k_i, gamma_t)? - outage_nn_of_v(v, gamma_t))
}

/// Finds `v′` with `p_LL(v′) = p_NN(v′)`: `p_LL > p_NN` below it and
/// `p_LL < p_NN` above it.
///
/// The bracket grows geometrically outward from `v = γ_t` until both signs
/// are seen, then bisection runs to the resolution of `f64`. Returns
/// [`Error::NoCrossing`] when the curves keep one order over `[1e-8, 1e8]`,
/// which happens whenever [`crossing_end_ratios`] has a ratio of one or more.
pub fn crossing_point(k_m: f64, k_i: f64, gamma_t: f64) -> Result<CrossingResult> {
    require_positive("k_m", k_m)?;
    require_positive("k_i", k_i)?;
    require_positive("gamma_t", gamma_t)?;
    let g = |v: f64| crossing_gap(v, k_m, k_i, gamma_t);
    let no_crossing = Error::NoCrossing {
        lo: CROSSING_RANGE.0,
        hi: CROSSING_RANGE.1,
    };

    let mut lo = gamma_t;
    while g(lo)? <= SIGN_FLOOR {
        lo *= 0.5;
        if lo < CROSSING_RANGE.0 {
            return Err(no_crossing);
        }
    }
    let mut hi = gamma_t;
    while g(hi)? >= -SIGN_FLOOR {
        hi *= 2.0;
        if hi > CROSSING_RANGE.1 {
            return Err(no_crossing);
        }
    }
    let bracket = (lo, hi);

    let (mut a, mut b) = bracket;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid)? > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (ga, gb) = (g(a)?, g(b)?);
    let (v_prime, residual) = if ga.abs() <= gb.abs() {
        (a, ga)
    } else {
        (b, gb)
    };
    Ok(CrossingResult {
        v_prime,
        bracket,
        residual,
    })
}

/// Outcome of a single battery check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail,
    /// The compared quantities coincide (Rician factors near zero), so the
    /// strict ordering cannot be observed.
    Degenerate,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckOutcome::Pass => "pass",
            CheckOutcome::Fail => "FAIL",
            CheckOutcome::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveOrderReport {
    /// Both v-forms non-increasing on the log grid.
    pub monotone: CheckOutcome,
    /// `p_NN(ε) < p_LL(ε)` for small `ε`.
    pub small_v_order: CheckOutcome,
    /// `p_LL(v_o) < p_NN(v_o)` for large `v_o`.
    pub large_v_order: CheckOutcome,
    /// Finite-difference derivative of `p_NN` equals `−γ_t/(v+γ_t)²`.
    pub nn_derivative: CheckOutcome,
}

impl CurveOrderReport {
    pub fn checks(&self) -> [(&'static str, CheckOutcome); 4] {
        [
            ("monotone", self.monotone),
            ("small_v_order", self.small_v_order),
            ("large_v_order", self.large_v_order),
            ("nn_derivative", self.nn_derivative),
        ]
    }

    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| *c == CheckOutcome::Pass)
    }

    pub fn any_failed(&self) -> bool {
        self.checks().iter().any(|(_, c)| *c == CheckOutcome::Fail)
    }
}

const BATTERY_EPS: f64 = 1e-3;
const BATTERY_V_LARGE: f64 = 1e3;
const BATTERY_GRID: usize = 400;

fn ordering(diff: f64, scale: f64) -> CheckOutcome {
    if diff.abs() <= 1e-12 * scale.max(1e-300) + 1e-15 {
        CheckOutcome::Degenerate
    } else if diff > 0.0 {
        CheckOutcome::Pass
    } else {
        CheckOutcome::Fail
    }
}

/// Numerically checks the monotonicity and ordering properties of the
/// LoS/LoS and NLoS/NLoS outage curves in `v`.
pub fn curve_order_checks(k_m: f64, k_i: f64, gamma_t: f64) -> Result<CurveOrderReport> {
    require_positive("gamma_t", gamma_t)?;
    let grid = SweepSpec::new(
        SweepVariable::BetaRatio,
        BATTERY_EPS,
        BATTERY_V_LARGE,
        BATTERY_GRID,
        SweepScale::Log,
    )?
    .grid();
    let ll: Vec<f64> = grid
        .iter()
        .map(|&v| outage_ll_of_v(v, k_m, k_i, gamma_t))
        .collect::<Result<_>>()?;
    let nn: Vec<f64> = grid.iter().map(|&v| outage_nn_of_v(v, gamma_t)).collect();
    let decreasing = |xs: &[f64]| xs.windows(2).all(|w| w[1] - w[0] <= 1e-12);
    let monotone = if decreasing(&ll) && decreasing(&nn) {
        CheckOutcome::Pass
    } else {
        CheckOutcome::Fail
    };

    let nn_eps = outage_nn_of_v(BATTERY_EPS, gamma_t);
    let small_v_order = ordering(
        outage_ll_of_v(BATTERY_EPS, k_m, k_i, gamma_t)? - nn_eps,
        BATTERY_EPS / gamma_t,
    );
    let nn_large = outage_nn_of_v(BATTERY_V_LARGE, gamma_t);
    let large_v_order = ordering(
        nn_large - outage_ll_of_v(BATTERY_V_LARGE, k_m, k_i, gamma_t)?,
        nn_large,
    );

    let nn_derivative = if grid.iter().step_by(20).all(|&v| {
        let h = 1e-5 * v;
        let fd = (outage_nn_of_v(v + h, gamma_t) - outage_nn_of_v(v - h, gamma_t)) / (2.0 * h);
        (fd - outage_nn_of_v_derivative(v, gamma_t)).abs() <= 1e-8
    }) {
        CheckOutcome::Pass
    } else {
        CheckOutcome::Fail
    };

    Ok(CurveOrderReport {
        monotone,
        small_v_order,
        large_v_order,
        nn_derivative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const K_OBLIQUE: f64 = 2.865_923_182_330_367_7;

    #[test]
    fn end_ratios_match_the_curves() {
        for &(k_m, k_i) in &[(0.5, 1.0), (1.0, 0.5), (2.866, 2.866), (15.0, 8.0)] {
            let (small, large) = crossing_end_ratios(k_m, k_i);
            let (lo, hi) = (1e-7, 1e7);
            let at_lo = (1.0 - outage_ll_of_v(lo, k_m, k_i, 2.0).unwrap())
                / (1.0 - outage_nn_of_v(lo, 2.0));
            let at_hi = outage_ll_of_v(hi, k_m, k_i, 2.0).unwrap() / outage_nn_of_v(hi, 2.0);
            assert!((at_lo - small).abs() < 1e-4 * small, "{at_lo} vs {small}");
            assert!((at_hi - large).abs() < 1e-4 * large, "{at_hi} vs {large}");
            let crosses = small < 1.0 && large < 1.0;
            assert_eq!(
                crossing_point(k_m, k_i, 2.0).is_ok(),
                crosses,
                "({k_m}, {k_i})"
            );
        }
    }

    #[test]
    fn grid_syntax() {
        let g = SweepSpec::parse(SweepVariable::BetaRatio, "0.01:100:5:log").unwrap();
        assert_eq!(g.scale, SweepScale::Log);
        let xs = g.grid();
        assert_eq!(xs.len(), 5);
        assert!((xs[2] - 1.0).abs() < 1e-12);
        let g = SweepSpec::parse(SweepVariable::MainHeight, "10:20:3").unwrap();
        assert_eq!(g.grid(), vec![10.0, 15.0, 20.0]);
        for bad in [
            "10:20",
            "10:20:3:cubic",
            "20:10:3",
            "0:1:3:log",
            "a:1:3",
            "1:2:1",
            "1:2:3:log:x",
        ] {
            assert!(
                SweepSpec::parse(SweepVariable::MainHeight, bad).is_err(),
                "{bad}"
            );
        }
    }

    #[test]
    fn grid_shapes() {
        let lin = SweepSpec::new(SweepVariable::MainHeight, 10.0, 20.0, 3, SweepScale::Linear)
            .unwrap()
            .grid();
        assert_eq!(lin, vec![10.0, 15.0, 20.0]);
        let log = SweepSpec::new(SweepVariable::BetaRatio, 0.01, 100.0, 5, SweepScale::Log)
            .unwrap()
            .grid();
        assert!((log[2] - 1.0).abs() < 1e-14);
        assert_eq!(log[4], 100.0);
    }

    #[test]
    fn bad_specs_rejected() {
        let v = SweepVariable::MainHeight;
        assert!(SweepSpec::new(v, 5.0, 5.0, 10, SweepScale::Linear).is_err());
        assert!(SweepSpec::new(v, 1.0, 5.0, 1, SweepScale::Linear).is_err());
        assert!(SweepSpec::new(v, 0.0, 5.0, 10, SweepScale::Log).is_err());
    }

    #[test]
    fn sweep_rows_equal_pointwise_evaluation() {
        let s = Scenario::height_study(50.0, 2.0, 150.0, 0.1).unwrap();
        let spec = SweepSpec::new(
            SweepVariable::MainHeight,
            10.0,
            400.0,
            12,
            SweepScale::Linear,
        )
        .unwrap();
        for row in sweep(&s, &spec).unwrap() {
            let direct = outage_total(&s.with_main_height(row.x).unwrap().link_pair().unwrap());
            assert_eq!(row.breakdown, direct.unwrap());
        }
    }

    #[test]
    fn ratio_sweep_at_gamma_gives_half_nn() {
        let s = Scenario::height_study(70.0, 2.0, 150.0, 0.1).unwrap();
        let spec =
            SweepSpec::new(SweepVariable::BetaRatio, 1.0, 2.0, 2, SweepScale::Linear).unwrap();
        let rows = sweep(&s, &spec).unwrap();
        assert_eq!(rows[1].breakdown.p_nn, 0.5);
    }

    #[test]
    fn crossing_for_equal_k_is_gamma() {
        let c = crossing_point(K_OBLIQUE, K_OBLIQUE, 2.0).unwrap();
        assert!((c.v_prime - 2.0).abs() < 1e-9, "{c:?}");
        assert!(c.residual.abs() <= 1e-10);
        assert!(c.bracket.0 < c.v_prime && c.v_prime < c.bracket.1);
    }

    #[test]
    fn crossing_needs_nonzero_k() {
        assert!(matches!(
            crossing_point(1e-14, 1e-14, 2.0),
            Err(Error::NoCrossing { .. })
        ));
        assert!(crossing_point(0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn battery_passes_in_regular_regimes() {
        for (k, g) in [(K_OBLIQUE, 2.0), (15.0, 2.0)] {
            let r = curve_order_checks(k, k, g).unwrap();
            assert!(r.all_passed(), "{r:?}");
        }
    }

    #[test]
    fn battery_flags_degenerate_orderings() {
        let r = curve_order_checks(0.0, 0.0, 2.0).unwrap();
        assert_eq!(r.monotone, CheckOutcome::Pass);
        assert_eq!(r.small_v_order, CheckOutcome::Degenerate);
        assert_eq!(r.large_v_order, CheckOutcome::Degenerate);
        assert!(!r.any_failed());
    }

    #[test]
    fn optimal_height_is_interior() {
        let s = Scenario::height_study(50.0, 2.0, 150.0, 0.1).unwrap();
        let opt = optimal_height(&s, 10.0, 400.0).unwrap();
        assert!(opt.height > 150.0 && opt.height < 250.0, "{opt:?}");
    }

    #[test]
    fn variable_names_round_trip() {
        for v in [
            SweepVariable::MainHeight,
            SweepVariable::InterfererHorizontal,
            SweepVariable::BetaRatio,
        ] {
            assert_eq!(v.to_string().parse::<SweepVariable>().unwrap(), v);
        }
    }
}
