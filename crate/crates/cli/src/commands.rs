use std::io::Write;

use clap::{Subcommand, ValueEnum};
use polar_fault_core::bounds::{
    bounds_sweep_n, bounds_sweep_rate, trivial_bounds, upper_bound_sweep_rate, BoundsRow,
};
use polar_fault_core::construction::k_from_rate;
use polar_fault_core::montecarlo::{estimate_fer_with, SimOptions};
use polar_fault_core::optimizer::unique_minimizer;
use polar_fault_core::polarization::{index_to_sign_string, ZTable};
use polar_fault_core::{
    compute_z_table, fer_bounds, optimal_blocklength, protection_report, CodeDefinition,
    CodeSpec, FaultProb, FerBounds, DEFAULT_COVARIANCE_CAP,
};
use serde_json::Value;

use crate::config::{config_error, percent_grid, RunConfig};
use crate::error::CliResult;
use crate::output::{float, int, Format, Outputs, Table};

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Build a code: code.json plus Z-table and information-set tables.
    Construct,
    /// FER bounds over a rate sweep (--n) or a blocklength sweep (--n-max).
    Bounds,
    /// Monte-Carlo FER of one code, checked against its bounds.
    Simulate,
    /// FER-minimizing blocklength for one rate.
    Optimize,
    /// Upper bounds for every number of protected levels 0..=n+1.
    Uep,
    /// Regenerate the data set of a reference figure.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Bounds versus rate for n = 8, 10, 12.
    Fig3,
    /// Sorted Z values for n = 8, 10, 12, faulty and fault-free.
    Fig4,
    /// Bounds versus n = 4..=12 for R = 0.1250, 0.1875, 0.2500.
    Fig5,
    /// Upper bounds at n = 10 for n_p = 0..=5 and n + 1.
    Fig6,
    /// Upper bounds for n = 8, 10, 12 with n_p = n - 5, and fault-free.
    Fig7,
}

pub fn run(command: &Command, cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    match command {
        Command::Construct => construct(cfg, out),
        Command::Bounds => bounds(cfg, out),
        Command::Simulate => simulate(cfg, out),
        Command::Optimize => optimize(cfg, out),
        Command::Uep => uep(cfg, out),
        Command::Reproduce { figure } => reproduce(*figure, cfg, out),
    }
}

fn z_table(z: &ZTable) -> CliResult<Table> {
    let mut t = Table::new(&["index", "sign_string", "z_value"]);
    for (i, &v) in z.values().iter().enumerate() {
        let signs = index_to_sign_string(i, z.level())?;
        t.push(vec![int(i as u64), Value::from(signs.to_string()), float(v)]);
    }
    Ok(t)
}

fn sorted_z_table(z: &ZTable) -> CliResult<Table> {
    let mut t = Table::new(&["rank", "normalized_rank", "index", "sign_string", "z_value"]);
    let len = z.len() as f64;
    for (rank, i) in z.ascending_order().into_iter().enumerate() {
        let signs = index_to_sign_string(i, z.level())?;
        t.push(vec![
            int(rank as u64),
            float(rank as f64 / len),
            int(i as u64),
            Value::from(signs.to_string()),
            float(z.values()[i]),
        ]);
    }
    Ok(t)
}

fn bounds_cells(b: &FerBounds) -> [Value; 4] {
    [
        float(b.upper),
        float(b.lower),
        Value::Bool(b.upper_trivialized),
        Value::Bool(b.lower_trivialized),
    ]
}

fn rate_sweep_table(n: u32, rows: &[(f64, FerBounds)]) -> CliResult<Table> {
    let mut t = Table::new(&["rate", "K", "upper", "lower", "upper_trivialized", "lower_trivialized"]);
    for (rate, b) in rows {
        let k = k_from_rate(n, *rate)?;
        let mut row = vec![float(*rate), int(k as u64)];
        row.extend(bounds_cells(b));
        t.push(row);
    }
    Ok(t)
}

fn n_sweep_table(rows: &[(f64, BoundsRow)]) -> Table {
    let mut t = Table::new(&[
        "rate",
        "n",
        "N",
        "K",
        "upper",
        "lower",
        "upper_trivialized",
        "lower_trivialized",
        "covariance_skipped",
    ]);
    for (rate, r) in rows {
        let mut row = vec![float(*rate), int(r.n), int(1u64 << r.n), int(r.k as u64)];
        row.extend(bounds_cells(&r.bounds));
        row.push(Value::Bool(r.covariance_skipped));
        t.push(row);
    }
    t
}

fn construct(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let spec = cfg.code_spec()?;
    let def = CodeDefinition::from_spec(spec)?;
    let z = spec.z_table()?;
    out.file("code.json", |w| {
        w.write_all(def.to_json()?.as_bytes())?;
        writeln!(w)?;
        Ok(())
    })?;
    out.table("z_table", &z_table(&z)?)?;
    out.table("z_sorted", &sorted_z_table(&z)?)?;
    let mut info = Table::new(&["index"]);
    for &i in def.info_set.indices() {
        info.push(vec![int(i as u64)]);
    }
    out.table("info_set", &info)?;
    println!(
        "n = {}, N = {}, K = {}: min Z = {:e}, max Z over the information set = {:e}",
        spec.n,
        spec.blocklength(),
        spec.k,
        z.min(),
        def.info_set
            .indices()
            .iter()
            .map(|&i| z.values()[i])
            .fold(0.0, f64::max)
    );
    Ok(())
}

fn bounds(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let (p, delta) = (cfg.p()?, cfg.delta()?);
    if let Some(n_max) = cfg.n_max {
        let n_min = cfg.n.unwrap_or(0);
        if n_min > n_max {
            return Err(config_error(format!("--n {n_min} exceeds --n-max {n_max}")));
        }
        let rates = cfg.rates_or(Vec::new())?;
        if rates.is_empty() {
            return Err(config_error("an n sweep needs --rate"));
        }
        let np = cfg.protected_levels;
        let mut rows = Vec::new();
        for &rate in &rates {
            let sweep = bounds_sweep_n(n_min..=n_max, rate, p, delta, |n| np.min(n + 1), DEFAULT_COVARIANCE_CAP)?;
            rows.extend(sweep.into_iter().map(|r| (rate, r)));
        }
        let path = out.table("bounds_n", &n_sweep_table(&rows))?;
        println!("wrote {} rows to {}", rows.len(), path.display());
    } else {
        let n = cfg.require_n()?;
        let rates = cfg.rates_or(percent_grid(1, 99))?;
        let rows = bounds_sweep_rate(n, p, delta, cfg.protected_levels, &rates)?;
        let path = out.table("bounds_rate", &rate_sweep_table(n, &rows)?)?;
        println!("wrote {} rows to {}", rows.len(), path.display());
    }
    Ok(())
}

/// Bounds used to judge a simulation; trivial above the covariance cap.
fn reference_bounds(spec: &CodeSpec) -> CliResult<FerBounds> {
    let info = spec.info_set()?;
    if spec.n > DEFAULT_COVARIANCE_CAP {
        return Ok(trivial_bounds(&spec.z_table()?, &info));
    }
    Ok(fer_bounds(spec, &info)?)
}

fn simulate(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let spec = cfg.code_spec()?;
    let mut options = SimOptions::new(cfg.trials, cfg.seed);
    if cfg.target_erasures > 0 {
        options = options.with_target(cfg.target_erasures);
    }
    let estimate = estimate_fer_with(&spec, &options, |e| {
        eprintln!("simulate: {}/{} frames, {} erasures", e.trials, cfg.trials, e.erasures);
    })?;
    let b = reference_bounds(&spec)?;
    let within = spec.k == 0 || b.overlaps(estimate.ci_low, estimate.ci_high);
    let mut t = Table::new(&[
        "n",
        "N",
        "K",
        "trials",
        "erasures",
        "fer",
        "ci_low",
        "ci_high",
        "stopped_early",
        "upper",
        "lower",
        "within_bounds",
    ]);
    t.push(vec![
        int(spec.n),
        int(spec.blocklength() as u64),
        int(spec.k as u64),
        int(estimate.trials),
        int(estimate.erasures),
        float(estimate.fer),
        float(estimate.ci_low),
        float(estimate.ci_high),
        Value::Bool(estimate.stopped_early),
        float(b.upper),
        float(b.lower),
        Value::Bool(within),
    ]);
    out.table("simulate", &t)?;
    println!(
        "FER = {:e} ({} / {} frames), 95% CI [{:e}, {:e}], bounds [{:e}, {:e}]",
        estimate.fer, estimate.erasures, estimate.trials, estimate.ci_low, estimate.ci_high, b.lower, b.upper
    );
    Ok(())
}

fn optimize(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let rate = cfg.single_rate()?;
    let n_max = cfg.n_max.unwrap_or(12);
    let d = optimal_blocklength(rate, cfg.p()?, cfg.delta()?, n_max, cfg.trials, cfg.seed)?;
    match cfg.format {
        Format::Csv => out.file("optimize.csv", |w| Ok(d.write_csv(w)?))?,
        Format::Json => out.json("optimize.json", &d)?,
    };
    let method = serde_json::to_value(d.method)?;
    println!(
        "n* = {} (N = {}) via {}",
        d.n_star,
        1u64 << d.n_star,
        method.as_str().unwrap_or_default()
    );
    Ok(())
}

/// Upper bounds for each protection depth in `levels`, with protection costs.
fn uep_table(n: u32, rates: &[f64], levels: &[u32], cfg: &RunConfig) -> CliResult<Table> {
    let (p, delta) = (cfg.p()?, cfg.delta()?);
    let mut t = Table::new(&[
        "n_p",
        "rate",
        "K",
        "upper",
        "protected_units",
        "total_units",
        "fraction",
        "rate_loss",
    ]);
    for &np in levels {
        let report = protection_report(n, np, p, delta)?;
        for (rate, b) in upper_bound_sweep_rate(n, p, delta, np, rates)? {
            let k = k_from_rate(n, rate)?;
            t.push(vec![
                int(np),
                float(rate),
                int(k as u64),
                float(b.upper),
                int(report.protected_units),
                int(report.total_units),
                float(report.fraction),
                float(report.rate_loss),
            ]);
        }
    }
    Ok(t)
}

fn uep(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let n = cfg.require_n()?;
    let rates = cfg.rates_or(percent_grid(1, 40))?;
    let levels: Vec<u32> = (0..=n + 1).collect();
    let t = uep_table(n, &rates, &levels, cfg)?;
    let path = out.table("uep", &t)?;
    println!("wrote {} rows to {}", t.len(), path.display());
    Ok(())
}

fn reproduce(figure: Figure, cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let (p, delta) = (cfg.p()?, cfg.delta()?);
    match figure {
        Figure::Fig3 => {
            let rates = percent_grid(5, 50);
            for n in [8, 10, 12] {
                eprintln!("fig3: n = {n}");
                let rows = bounds_sweep_rate(n, p, delta, 0, &rates)?;
                out.table(&format!("fig3_n{n}"), &rate_sweep_table(n, &rows)?)?;
            }
        }
        Figure::Fig4 => {
            for n in [8, 10, 12] {
                let faulty = compute_z_table(n, p, delta, 0)?;
                let clean = compute_z_table(n, p, FaultProb::ZERO, 0)?;
                out.table(&format!("fig4_n{n}_faulty"), &sorted_z_table(&faulty)?)?;
                out.table(&format!("fig4_n{n}_fault_free"), &sorted_z_table(&clean)?)?;
            }
        }
        Figure::Fig5 => {
            for rate in [0.1250, 0.1875, 0.2500] {
                eprintln!("fig5: R = {rate:.4}");
                let rows = bounds_sweep_n(4..=12, rate, p, delta, |_| 0, DEFAULT_COVARIANCE_CAP)?;
                let best = unique_minimizer(&rows);
                let tagged: Vec<(f64, BoundsRow)> = rows.into_iter().map(|r| (rate, r)).collect();
                out.table(&format!("fig5_R{rate:.4}"), &n_sweep_table(&tagged))?;
                match best {
                    Some(n) => println!("R = {rate:.4}: bounds single out N = {}", 1u64 << n),
                    None => println!("R = {rate:.4}: bounds overlap, no unique minimizer"),
                }
            }
        }
        Figure::Fig6 => {
            let n = cfg.n.unwrap_or(10);
            let mut levels: Vec<u32> = (0..=5.min(n + 1)).chain([n + 1]).collect();
            levels.dedup();
            let t = uep_table(n, &percent_grid(1, 40), &levels, cfg)?;
            out.table("fig6", &t)?;
        }
        Figure::Fig7 => {
            for n in [8, 10, 12] {
                let t = uep_table(n, &percent_grid(5, 50), &[n - 5, n + 1], cfg)?;
                out.table(&format!("fig7_n{n}"), &t)?;
            }
        }
    }
    for path in out.created() {
        println!("wrote {}", path.display());
    }
    Ok(())
}
