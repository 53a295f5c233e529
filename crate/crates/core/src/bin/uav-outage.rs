use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uav_outage::analysis::{
    crossing_end_ratios, crossing_point, optimal_height_with_grid, pair_at, sweep, SweepRow,
    SweepSpec, SweepVariable,
};
use uav_outage::channel::FadingEnv;
use uav_outage::config::load_scenario;
use uav_outage::csv::{
    breakdown_fields, format_number, format_probability, write_sweep, BREAKDOWN_HEADER,
};
use uav_outage::montecarlo::{
    parse_force_env, simulate_outage, validate_pair, SimConfig, DEFAULT_SEED, DEFAULT_TRIALS,
};
use uav_outage::outage::{outage_ll_of_v, outage_nn_of_v, outage_total, LinkPair, ENV_CASES};
use uav_outage::scenario::Scenario;
use uav_outage::{Error, Result};

/// Outage probability of a UAV link under a single interferer.
///
/// CSV goes to --out or stdout; messages and warnings go to stderr.
/// Exit codes: 0 success, 1 validation failure, 2 input error, 3 numeric failure.
#[derive(Debug, Parser)]
#[command(name = "uav-outage", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (flat key = value text).
    #[arg(long)]
    scenario: PathBuf,

    /// CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for every random stream. Analytic commands accept and ignore it.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SimArgs {
    /// Monte Carlo trials per estimate.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,

    /// Trial chunks run in parallel; 0 uses one per thread. Results do not
    /// depend on this value.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Four conditional cases, their weights and the total.
    Outage {
        #[command(flatten)]
        common: Common,
        /// Pin both environments, e.g. main=L,intf=N.
        #[arg(long)]
        force_env: Option<String>,
    },
    /// Outage breakdown along a grid of one scenario variable.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// main_height | interferer_horizontal | beta_ratio
        #[arg(long, default_value = "main_height")]
        var: String,
        /// start:stop:points[:log]
        #[arg(long)]
        grid: String,
        /// Pin both environments, e.g. main=L,intf=N.
        #[arg(long)]
        force_env: Option<String>,
    },
    /// Main-link height minimising the total outage.
    OptimalHeight {
        #[command(flatten)]
        common: Common,
        /// Height search range and coarse grid size, start:stop:points.
        #[arg(long, default_value = "10:500:400")]
        grid: String,
    },
    /// Crossing of the LoS/LoS and NLoS/NLoS curves in β_m/β_I.
    Crossing {
        #[command(flatten)]
        common: Common,
        /// β_m/β_I grid for the curve CSV.
        #[arg(long, default_value = "0.01:100:201:log")]
        grid: String,
    },
    /// Monte Carlo outage estimate, optionally along a grid.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value = "main_height")]
        var: String,
        #[arg(long)]
        grid: Option<String>,
        /// Pin both environments, e.g. main=L,intf=N.
        #[arg(long)]
        force_env: Option<String>,
    },
    /// Analytic vs Monte Carlo for the total and each forced case.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Outage { common, force_env } => cmd_outage(&common, force_env.as_deref()),
        Command::Sweep {
            common,
            var,
            grid,
            force_env,
        } => cmd_sweep(&common, &var, &grid, force_env.as_deref()),
        Command::OptimalHeight { common, grid } => cmd_optimal_height(&common, &grid),
        Command::Crossing { common, grid } => cmd_crossing(&common, &grid),
        Command::Simulate {
            common,
            sim,
            var,
            grid,
            force_env,
        } => cmd_simulate(&common, &sim, &var, grid.as_deref(), force_env.as_deref()),
        Command::Validate { common, sim } => cmd_validate(&common, &sim),
    }
}

fn load(common: &Common) -> Result<Scenario> {
    let scenario = load_scenario(&common.scenario)?;
    warn_short_links(&scenario);
    Ok(scenario)
}

fn warn_short_links(s: &Scenario) {
    for (name, link) in [("main", &s.main), ("interferer", &s.interferer)] {
        let ell = link.geometry.length();
        if ell < 1.0 {
            eprintln!(
                "warning: {name} link distance {ell} m is below 1 m; path loss exceeds unity gain"
            );
        }
    }
}

fn force(text: Option<&str>) -> Result<Option<(FadingEnv, FadingEnv)>> {
    text.map(parse_force_env).transpose()
}

fn apply_force(pair: LinkPair, f: Option<(FadingEnv, FadingEnv)>) -> LinkPair {
    match f {
        Some((m, i)) => pair.forced(m, i),
        None => pair,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io(format!("stdout: {e}"))),
    }
}

fn warn_clamped(clamped: bool) {
    if clamped {
        eprintln!("warning: probabilities below 1e-12 were written as 0");
    }
}

fn cmd_outage(common: &Common, force_env: Option<&str>) -> Result<u8> {
    let scenario = load(common)?;
    let pair = apply_force(scenario.link_pair()?, force(force_env)?);
    let b = outage_total(&pair)?;
    for (m, i) in ENV_CASES {
        eprintln!(
            "{m}{i}: p = {}  weight = {}",
            format_number(b.case(m, i)),
            format_number(b.weight(m, i))
        );
    }
    eprintln!("total: {}", format_number(b.total));
    let mut clamped = false;
    let row = breakdown_fields(&b, &mut clamped);
    emit(
        common.out.as_deref(),
        &format!("{BREAKDOWN_HEADER}\n{row}\n"),
    )?;
    warn_clamped(clamped);
    Ok(0)
}

fn cmd_sweep(common: &Common, var: &str, grid: &str, force_env: Option<&str>) -> Result<u8> {
    let scenario = load(common)?;
    let spec = SweepSpec::parse(var.parse()?, grid)?;
    let f = force(force_env)?;
    let rows = match f {
        None => sweep(&scenario, &spec)?,
        Some(_) => spec
            .grid()
            .into_iter()
            .map(|x| {
                let pair = apply_force(pair_at(&scenario, spec.variable, x)?, f);
                Ok(SweepRow {
                    x,
                    breakdown: outage_total(&pair)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let mut buf = Vec::new();
    let clamped = write_sweep(&mut buf, &rows).map_err(|e| Error::Io(e.to_string()))?;
    emit(common.out.as_deref(), &String::from_utf8_lossy(&buf))?;
    warn_clamped(clamped);
    Ok(0)
}

fn cmd_optimal_height(common: &Common, grid: &str) -> Result<u8> {
    let scenario = load(common)?;
    let spec = SweepSpec::parse(SweepVariable::MainHeight, grid)?;
    let best = optimal_height_with_grid(&scenario, spec.start, spec.stop, spec.points)?;
    eprintln!(
        "optimal height: {} m, total outage {}",
        format_number(best.height),
        format_number(best.outage)
    );
    let mut clamped = false;
    let text = format!(
        "height,total\n{},{}\n",
        format_number(best.height),
        format_probability(best.outage, &mut clamped)
    );
    emit(common.out.as_deref(), &text)?;
    warn_clamped(clamped);
    Ok(0)
}

fn cmd_crossing(common: &Common, grid: &str) -> Result<u8> {
    let scenario = load(common)?;
    let pair = scenario.link_pair()?;
    let (k_m, k_i, gamma_t) = (pair.main.k, pair.interferer.k, pair.gamma_t);
    let spec = SweepSpec::parse(SweepVariable::BetaRatio, grid)?;
    let crossing = crossing_point(k_m, k_i, gamma_t).inspect_err(|_| {
        let (small, large) = crossing_end_ratios(k_m, k_i);
        eprintln!(
            "note: (1+K_main)e^-K_interferer = {}, (1+K_interferer)e^-K_main = {}; \
             the curves can only cross when both are below 1",
            format_number(small),
            format_number(large)
        );
    })?;
    eprintln!(
        "v' = {}  (K_main = {}, K_interferer = {}, gamma_t = {}; scenario v = {})",
        format_number(crossing.v_prime),
        format_number(k_m),
        format_number(k_i),
        format_number(gamma_t),
        format_number(pair.beta_ratio())
    );
    let mut clamped = false;
    let mut text = String::from("v,p_ll,p_nn\n");
    for v in spec.grid() {
        let ll = outage_ll_of_v(v, k_m, k_i, gamma_t)?;
        let nn = outage_nn_of_v(v, gamma_t);
        text.push_str(&format!(
            "{},{},{}\n",
            format_number(v),
            format_probability(ll, &mut clamped),
            format_probability(nn, &mut clamped)
        ));
    }
    emit(common.out.as_deref(), &text)?;
    warn_clamped(clamped);
    Ok(0)
}

fn sim_config(common: &Common, sim: &SimArgs) -> Result<SimConfig> {
    Ok(SimConfig::new(sim.trials, common.seed)?.with_workers(sim.workers))
}

fn cmd_simulate(
    common: &Common,
    sim: &SimArgs,
    var: &str,
    grid: Option<&str>,
    force_env: Option<&str>,
) -> Result<u8> {
    let scenario = load(common)?;
    let cfg = sim_config(common, sim)?.with_force_env(force(force_env)?);
    let mut text = String::new();
    match grid {
        None => {
            let est = simulate_outage(&scenario.link_pair()?, &cfg)?;
            text.push_str("p_hat,stderr,trials\n");
            text.push_str(&format!(
                "{},{},{}\n",
                format_number(est.p_hat),
                format_number(est.stderr),
                est.trials
            ));
        }
        Some(grid) => {
            let spec = SweepSpec::parse(var.parse()?, grid)?;
            text.push_str("x,p_hat,stderr,trials\n");
            for x in spec.grid() {
                let est = simulate_outage(&pair_at(&scenario, spec.variable, x)?, &cfg)?;
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    format_number(x),
                    format_number(est.p_hat),
                    format_number(est.stderr),
                    est.trials
                ));
            }
        }
    }
    emit(common.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_validate(common: &Common, sim: &SimArgs) -> Result<u8> {
    let scenario = load(common)?;
    let rows = validate_pair(&scenario.link_pair()?, &sim_config(common, sim)?)?;
    let mut text = String::from("case,analytic,p_hat,stderr,deviation,z,pass\n");
    let mut worst = 0.0f64;
    let mut failed = 0;
    for row in &rows {
        worst = worst.max(row.z_score());
        if !row.passes() {
            failed += 1;
        }
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.label(),
            format_number(row.analytic),
            format_number(row.estimate.p_hat),
            format_number(row.estimate.stderr),
            format_number(row.deviation()),
            format_number(row.z_score()),
            row.passes()
        ));
    }
    emit(common.out.as_deref(), &text)?;
    eprintln!("max |delta|/stderr = {}", format_number(worst));
    if failed > 0 {
        eprintln!(
            "validation failed: {failed} of {} cases exceed 3*stderr + 1e-3",
            rows.len()
        );
        Ok(1)
    } else {
        eprintln!(
            "validation passed: all {} cases within 3*stderr + 1e-3",
            rows.len()
        );
        Ok(0)
    }
}
