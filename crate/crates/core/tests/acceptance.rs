//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uav_outage::analysis::identities::{
    conditional_outage_by_integration, exp_bessel_closed, exp_bessel_marcum_closed,
    exp_bessel_marcum_quadrature, exp_bessel_quadrature, exp_marcum_closed, exp_marcum_quadrature,
    ll_identity_args, ln_identity_args, nl_identity_args,
};
use uav_outage::analysis::{
    crossing_end_ratios, crossing_point, curve_order_checks, optimal_height, sweep, CheckOutcome,
    SweepScale, SweepSpec, SweepVariable,
};
use uav_outage::channel::FadingEnv::{LoS, NLoS};
use uav_outage::config::load_scenario;
use uav_outage::geometry::ChannelKind;
use uav_outage::montecarlo::{validate_pair, SimConfig, DEFAULT_SEED};
use uav_outage::outage::{outage_ll, outage_ll_of_v, outage_ln, outage_nn, outage_nn_of_v};
use uav_outage::scenario::Scenario;
use uav_outage::specfun::{
    bessel_i0, bessel_i0_scaled, bessel_i1, bessel_i1_scaled, marcum_p1, marcum_q1, Accuracy,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn kind_class(kind: ChannelKind) -> &'static str {
    match kind {
        ChannelKind::A2A => "A2A",
        ChannelKind::A2G | ChannelKind::G2A => "A2G/G2A",
        ChannelKind::G2G => "G2G",
    }
}

fn monte_carlo_equivalence() -> Outcome {
    let start = Instant::now();
    let paths = common::validation_scenarios();
    check(
        paths.len() == 20,
        format!("expected 20 scenarios, found {}", paths.len()),
    )?;
    let cfg = SimConfig::new(1_000_000, DEFAULT_SEED).unwrap();
    let mut classes = BTreeSet::new();
    let mut worst_z = 0.0f64;
    let mut failures = Vec::new();
    for path in &paths {
        let scenario = load_scenario(path).map_err(|e| format!("{}: {e}", path.display()))?;
        classes.insert((
            kind_class(scenario.main.kind),
            kind_class(scenario.interferer.kind),
        ));
        let pair = scenario.link_pair().map_err(|e| e.to_string())?;
        for row in validate_pair(&pair, &cfg).map_err(|e| e.to_string())? {
            worst_z = worst_z.max(row.z_score());
            if !row.passes() {
                failures.push(format!(
                    "{} {}: analytic {} vs {}",
                    path.file_name().unwrap().to_string_lossy(),
                    row.label(),
                    row.analytic,
                    row.estimate.p_hat
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        classes.len() == 9,
        format!("only {} of 9 kind combinations covered", classes.len()),
    )?;
    check(failures.is_empty(), failures.join("; "))?;
    check(
        elapsed < Duration::from_secs(120),
        format!("took {:.1} s (limit 120 s)", elapsed.as_secs_f64()),
    )?;
    Ok(format!(
        "20 scenarios x 5 cases at 1e6 trials, 9/9 combinations, max |delta|/stderr {worst_z:.2}, {:.1} s",
        elapsed.as_secs_f64()
    ))
}

fn case_collapse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut worst_ln = 0.0f64;
    let mut worst_int = 0.0f64;
    for i in 0..100 {
        let beta_i = 10f64.powf(rng.random_range(-12.0..-6.0));
        let beta_m = beta_i * 10f64.powf(-2.0 + 4.0 * i as f64 / 99.0);
        let g = rng.random_range(0.1..10.0);
        let ll = outage_ll(0.0, 0.0, beta_m, beta_i, g).map_err(|e| e.to_string())?;
        worst = worst.max((ll - outage_nn(beta_m, beta_i, g)).abs());
        // Substituting K_m = 0 leaves γβ_I/(2β_m + γβ_I).
        let ln = outage_ln(0.0, beta_m, beta_i, g);
        worst_ln = worst_ln.max((ln - g * beta_i / (2.0 * beta_m + g * beta_i)).abs());
        if i % 10 == 0 {
            let v = beta_m / beta_i;
            let by_int = conditional_outage_by_integration(LoS, NLoS, 0.0, 1.0, v, g)
                .map_err(|e| e.to_string())?;
            worst_int = worst_int.max((ln - by_int).abs());
        }
    }
    check(
        worst <= 1e-10,
        format!("LL at K=0 differs from NN by {worst:e}"),
    )?;
    check(
        worst_ln <= 1e-12,
        format!("LN at K=0 differs from 2-beta form by {worst_ln:e}"),
    )?;
    check(
        worst_int <= 1e-9,
        format!("LN at K=0 differs from integration by {worst_int:e}"),
    )?;
    Ok(format!(
        "100-point grid: |LL-NN| <= {worst:.1e}, |LN-form| <= {worst_ln:.1e}, |LN-integral| <= {worst_int:.1e}"
    ))
}

fn identity_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let k_m = rng.random_range(0.1..15.0);
        let k_i = rng.random_range(0.1..15.0);
        let g = rng.random_range(0.5..4.0);
        let v = 10f64.powf(rng.random_range(-2.0..2.0));
        let err = |e: uav_outage::Error| e.to_string();

        let (c, d, e, f) = ll_identity_args(k_m, k_i, v, g);
        let closed = exp_bessel_marcum_closed(c, d, e, f).map_err(err)?;
        let quad = exp_bessel_marcum_quadrature(c, d, e, f).map_err(err)?;
        worst = worst.max(common::rel_err(quad, closed));

        let (c, e, f) = ln_identity_args(k_m, v, g);
        let closed = exp_marcum_closed(c, e, f).map_err(err)?;
        let quad = exp_marcum_quadrature(c, e, f).map_err(err)?;
        worst = worst.max(common::rel_err(quad, closed));

        let (c, d) = nl_identity_args(k_i, v, g);
        let closed = exp_bessel_closed(c, d).map_err(err)?;
        let quad = exp_bessel_quadrature(c, d).map_err(err)?;
        worst = worst.max(common::rel_err(quad, closed));
    }
    check(worst <= 1e-6, format!("worst relative error {worst:e}"))?;
    Ok(format!(
        "50 tuples x 3 identities, worst relative error {worst:.1e}"
    ))
}

fn height_study() -> Outcome {
    let spec = SweepSpec::new(
        SweepVariable::MainHeight,
        10.0,
        500.0,
        491,
        SweepScale::Linear,
    )
    .map_err(|e| e.to_string())?;
    let variants = [
        ("gamma_t=3, l_I=150, P_I=0.1P_m", 3.0, 150.0, 0.1),
        ("gamma_t=2, l_I=150, P_I=0.1P_m", 2.0, 150.0, 0.1),
        ("gamma_t=2, l_I=200, P_I=0.1P_m", 2.0, 200.0, 0.1),
        ("gamma_t=2, l_I=150, P_I=0.03P_m", 2.0, 150.0, 0.03),
    ];
    let mut heights = Vec::new();
    for (label, g, ell, ratio) in variants {
        let s = Scenario::height_study(100.0, g, ell, ratio).map_err(|e| e.to_string())?;
        let rows = sweep(&s, &spec).map_err(|e| e.to_string())?;
        let totals: Vec<f64> = rows.iter().map(|r| r.breakdown.total).collect();
        let argmin = (0..totals.len())
            .min_by(|&a, &b| totals[a].total_cmp(&totals[b]))
            .unwrap();
        check(
            argmin > 0 && argmin + 1 < totals.len(),
            format!("{label}: minimum at the grid edge"),
        )?;
        let down = totals[..=argmin].windows(2).all(|w| w[1] <= w[0]);
        let up = totals[argmin..].windows(2).all(|w| w[1] >= w[0]);
        check(
            down && up,
            format!("{label}: curve is not decreasing-then-increasing"),
        )?;
        let best = optimal_height(&s, 10.0, 500.0).map_err(|e| e.to_string())?;
        heights.push(best.height);
    }
    let [g3, g2, far, weak] = heights[..] else {
        unreachable!()
    };
    check(
        g3 < g2,
        format!("gamma_t 3->2 did not raise the optimum ({g3:.2} -> {g2:.2})"),
    )?;
    check(
        g2 < far,
        format!("l_I 150->200 did not raise the optimum ({g2:.2} -> {far:.2})"),
    )?;
    check(
        g2 < weak,
        format!("P_I 0.1->0.03 did not raise the optimum ({g2:.2} -> {weak:.2})"),
    )?;
    Ok(format!(
        "U-shaped on [10, 500] m; optimum {g3:.2} m < {g2:.2} m < {{{far:.2}, {weak:.2}}} m"
    ))
}

fn sign_changes(k_m: f64, k_i: f64, g: f64) -> Result<usize, String> {
    let mut changes = 0;
    let mut last = 0.0f64;
    for i in 0..=1200 {
        let v = 10f64.powf(-6.0 + 12.0 * i as f64 / 1200.0);
        let d = outage_ll_of_v(v, k_m, k_i, g).map_err(|e| e.to_string())? - outage_nn_of_v(v, g);
        if d.abs() <= 1e-13 {
            continue;
        }
        if last != 0.0 && d.signum() != last.signum() {
            changes += 1;
        }
        last = d;
    }
    Ok(changes)
}

fn curve_order() -> Outcome {
    const KS: [f64; 5] = [0.5, 1.0, 2.866, 8.0, 15.0];
    let mut failures = Vec::new();
    let mut no_crossing = BTreeSet::new();
    let mut worst_residual = 0.0f64;
    for k_m in KS {
        for k_i in KS {
            for g in [1.0, 2.0, 4.0] {
                let tag = format!("(K_m={k_m}, K_I={k_i}, gamma_t={g})");
                let report = curve_order_checks(k_m, k_i, g).map_err(|e| e.to_string())?;
                if report.monotone != CheckOutcome::Pass
                    || report.nn_derivative != CheckOutcome::Pass
                {
                    failures.push(format!("{tag} {:?}", report.checks()));
                }
                let at = |v: f64| outage_ll_of_v(v, k_m, k_i, g).map_err(|e| e.to_string());
                let limits = [
                    (at(1e-8)?, 1.0),
                    (outage_nn_of_v(1e-8, g), 1.0),
                    (at(1e8)?, 0.0),
                    (outage_nn_of_v(1e8, g), 0.0),
                ];
                if limits.iter().any(|(got, want)| (got - want).abs() > 1e-4) {
                    failures.push(format!("{tag} limits {limits:?}"));
                }
                let crossing = crossing_point(k_m, k_i, g);
                let changes = sign_changes(k_m, k_i, g)?;
                match crossing {
                    Ok(c) if changes == 1 && c.residual.abs() <= 1e-10 => {
                        worst_residual = worst_residual.max(c.residual.abs());
                    }
                    Ok(c) => failures.push(format!(
                        "{tag} {changes} sign changes, residual {:e}",
                        c.residual
                    )),
                    Err(_) => {
                        no_crossing.insert(format!("{k_m}/{k_i}"));
                    }
                }
            }
        }
    }
    if !no_crossing.is_empty() {
        let predicted = no_crossing.iter().all(|pair| {
            let (m, i) = pair.split_once('/').unwrap();
            let (small, large) = crossing_end_ratios(m.parse().unwrap(), i.parse().unwrap());
            small >= 1.0 || large >= 1.0
        });
        failures.push(format!(
            "no crossing exists for {} of 25 (K_m/K_I) pairs x 3 gamma_t [{}]; {}",
            no_crossing.len(),
            no_crossing.iter().cloned().collect::<Vec<_>>().join(", "),
            if predicted {
                "every one has (1+K_m)e^-K_I >= 1 or (1+K_I)e^-K_m >= 1, so the curves keep one order on (0, inf)"
            } else {
                "some are not explained by the end ratios"
            }
        ));
    }
    check(failures.is_empty(), failures.join("; "))?;
    Ok(format!(
        "75 grid points: monotone, limits within 1e-4, one sign change, max crossing residual {worst_residual:.1e}"
    ))
}

fn oblique_crossing() -> Outcome {
    let k = uav_outage::channel::rician_factor(0.7f64.atan(), &Default::default());
    check((k - 2.866).abs() < 1e-3, format!("K(atan 0.7) = {k}"))?;
    let c = crossing_point(k, k, 2.0).map_err(|e| e.to_string())?;
    let v = c.v_prime;
    check(v > 1.5 && v < 2.6, format!("v' = {v} outside (1.5, 2.6)"))?;
    for i in 1..=40 {
        let below = v * (1.0 - 0.024 * i as f64);
        let above = v * (1.0 + 0.1 * i as f64);
        let ll_b = outage_ll_of_v(below, k, k, 2.0).map_err(|e| e.to_string())?;
        let ll_a = outage_ll_of_v(above, k, k, 2.0).map_err(|e| e.to_string())?;
        check(
            ll_b > outage_nn_of_v(below, 2.0),
            format!("p_ll <= p_nn at v = {below}"),
        )?;
        check(
            ll_a < outage_nn_of_v(above, 2.0),
            format!("p_ll >= p_nn at v = {above}"),
        )?;
    }
    Ok(format!(
        "K = {k:.4}, v' = {v:.6}; p_ll > p_nn below, p_ll < p_nn above"
    ))
}

fn special_functions() -> Outcome {
    let acc = Accuracy::default();
    let mut worst_bessel = 0.0f64;
    for i in 0..=1000 {
        let x = 0.05 * i as f64;
        for (got, want) in [
            (bessel_i0(x), common::i0(x)),
            (bessel_i1(x), common::i1(x)),
            (bessel_i0_scaled(x), common::i0_scaled(x)),
            (bessel_i1_scaled(x), common::i1_scaled(x)),
        ] {
            worst_bessel = worst_bessel.max(common::rel_err(got, want));
        }
    }
    check(
        worst_bessel <= 1e-9,
        format!("Bessel relative error {worst_bessel:e}"),
    )?;

    let mut worst_marcum = 0.0f64;
    for i in 0..=20 {
        for j in 0..=20 {
            let (a, b) = (0.5 * i as f64, 0.5 * j as f64);
            let q = marcum_q1(a, b, acc).map_err(|e| e.to_string())?;
            let p = marcum_p1(a, b, acc).map_err(|e| e.to_string())?;
            worst_marcum = worst_marcum
                .max((q - common::marcum_q1(a, b)).abs())
                .max((p - common::marcum_p1(a, b)).abs());
        }
    }
    check(
        worst_marcum <= 1e-9,
        format!("Marcum error {worst_marcum:e}"),
    )?;

    // Every LL evaluation reachable with K <= 15 stays finite and in range.
    for k_m in [0.5, 1.0, 15.0] {
        for k_i in [0.5, 1.0, 15.0] {
            for e in -8..=8 {
                let p = outage_ll_of_v(10f64.powi(e), k_m, k_i, 4.0).map_err(|e| e.to_string())?;
                check(
                    p.is_finite() && (0.0..=1.0).contains(&p),
                    format!("p_ll = {p}"),
                )?;
            }
        }
    }
    for x in [0.0, 30.0, 700.0, 1e6, f64::MAX] {
        let s = bessel_i0_scaled(x);
        check(s.is_finite() && s > 0.0, format!("I0 scaled({x}) = {s}"))?;
    }
    Ok(format!(
        "I0/I1 on [0, 50] rel err <= {worst_bessel:.1e}; Q1/P1 on [0, 10]^2 abs err <= {worst_marcum:.1e}; scaled forms finite"
    ))
}

fn determinism() -> Outcome {
    let scenario = common::scenario_dir().join("crossing.conf");
    let run = |workers: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_uav-outage"))
            .args(["simulate", "--scenario"])
            .arg(&scenario)
            .args(["--trials", "200000", "--seed", "77", "--workers", workers])
            .args(["--var", "beta_ratio", "--grid", "0.25:8:6:log"])
            .output()
            .map_err(|e| e.to_string())?;
        check(
            out.status.success(),
            String::from_utf8_lossy(&out.stderr).into_owned(),
        )?;
        Ok(out.stdout)
    };
    let one = run("1")?;
    check(one == run("1")?, "two single-worker runs differ")?;
    for w in ["4", "8"] {
        check(
            one == run(w)?,
            format!("{w}-worker CSV differs from 1-worker CSV"),
        )?;
    }
    Ok(format!(
        "{} bytes identical across runs and 1/4/8 workers",
        one.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("analytic/Monte Carlo equivalence", monte_carlo_equivalence),
        ("case-collapse identities", case_collapse),
        ("integral identity oracles", identity_oracles),
        ("outage-vs-height shape and optimum ordering", height_study),
        (
            "LL/NN monotonicity, limits and crossing battery",
            curve_order,
        ),
        ("oblique-link crossing point", oblique_crossing),
        ("special-function suite", special_functions),
        ("simulate CSV determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("acceptance {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
