//! Subcommand bodies. Each returns a [`Table`] so the binary only has to
//! route it to stdout or a file.

use fiberpair_core::{
    calibrate_raman_gain, car, fit_quadratic, fit_sqrt, invert_counts_with, CountRecord, InversionMode, Observation,
    SeriesPoint, SimConfig, SimResult,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::parallel;
use crate::report::{evaluate, model_header, sweep_table, SweepSpec, SweepVariable};
use crate::table::{cell, counts_table, CountsRow, Table};

pub fn model(cfg: &RunConfig, per_second: bool) -> Result<Table> {
    cfg.require_raman_gain()?;
    let mut table = Table::new(model_header(per_second));
    table.push(evaluate(cfg, per_second).values.into_iter().map(cell).collect());
    Ok(table)
}

pub fn sweep(cfg: &RunConfig, spec: &SweepSpec, per_second: bool) -> Result<Table> {
    cfg.require_raman_gain()?;
    sweep_table(cfg, spec, per_second)
}

/// Result of inverting a counts file. Rows that fail keep their place in the
/// table with an `error` cell; their errors are also returned for reporting.
#[derive(Debug)]
pub struct Estimates {
    pub table: Table,
    pub failures: Vec<(usize, CliError)>,
}

pub fn estimate(cfg: &RunConfig, rows: &[CountsRow], mode: InversionMode, per_second: bool) -> Result<Estimates> {
    let det = cfg.detectors()?;
    let labelled = rows.iter().any(|r| r.label.is_some());
    let mut header: Vec<&str> = Vec::new();
    if labelled {
        header.push("label");
    }
    header.extend(["pulse_count", "pair_rate", "stokes_rate", "antistokes_rate", "car", "clamped", "error"]);
    if per_second {
        header.extend(["pair_rate_hz", "stokes_rate_hz", "antistokes_rate_hz"]);
    }
    let mut table = Table::new(header);
    let mut failures = Vec::new();
    let f_rep = cfg.pump.repetition_rate;

    for (i, r) in rows.iter().enumerate() {
        let mut out = Vec::new();
        if labelled {
            out.push(r.label.clone().unwrap_or_default());
        }
        out.push(r.pulse_count.to_string());
        let result = r.counts.validate().and_then(|_| invert_counts_with(&r.counts, &det, mode));
        match result {
            Ok(inv) => {
                let rates = [inv.rates.pair_rate, inv.rates.stokes_rate, inv.rates.antistokes_rate];
                out.extend(rates.map(|v| cell(Some(v))));
                out.push(cell(car(&r.counts).ok()));
                out.push(inv.clamped().to_string());
                out.push(String::new());
                if per_second {
                    out.extend(rates.map(|v| cell(Some(v * f_rep))));
                }
            }
            Err(e) => {
                let e = CliError::from(e);
                out.extend(std::iter::repeat_n(String::new(), 3));
                out.push(cell(car(&r.counts).ok()));
                out.push(String::new());
                out.push(e.to_string());
                if per_second {
                    out.extend(std::iter::repeat_n(String::new(), 3));
                }
                failures.push((i + 1, e));
            }
        }
        table.push(out);
    }
    Ok(Estimates { table, failures })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FitModel {
    /// y = s1·x + s2·x²
    Quadratic,
    /// y = a·√x
    Sqrt,
}

pub fn fit(points: &[SeriesPoint], model: FitModel) -> Result<Table> {
    let n = points.len().to_string();
    Ok(match model {
        FitModel::Quadratic => {
            let f = fit_quadratic(points).map_err(|e| match e {
                fiberpair_core::Error::RankDeficient { .. } => CliError::validation(format!(
                    "{e}; a quadratic through the origin needs two distinct x > 0 (or use --model sqrt)"
                )),
                e => e.into(),
            })?;
            let mut t = Table::new(["model", "s1", "s1_std_err", "s2", "s2_std_err", "residual_norm", "points"]);
            t.push(vec![
                "y = s1*x + s2*x^2".into(),
                cell(Some(f.s1)),
                cell(f.s1_std_err),
                cell(Some(f.s2)),
                cell(f.s2_std_err),
                cell(Some(f.residual_norm)),
                n,
            ]);
            t
        }
        FitModel::Sqrt => {
            let f = fit_sqrt(points)?;
            let mut t = Table::new(["model", "a", "a_std_err", "residual_norm", "points"]);
            t.push(vec!["y = a*sqrt(x)".into(), cell(Some(f.a)), cell(f.a_std_err), cell(Some(f.residual_norm)), n]);
            t
        }
    })
}

pub fn calibrate(cfg: &RunConfig, observed: Observation) -> Result<Table> {
    let g = calibrate_raman_gain(observed, &cfg.fiber, &cfg.idler, cfg.env)?;
    let mut t = Table::new(["raman_gain_per_w_km", "slope", "temperature_k", "detune_hz"]);
    t.push(vec![
        cell(Some(g)),
        cell(Some(observed.slope()?)),
        cell(Some(cfg.env.temperature)),
        cell(Some(cfg.idler.detune)),
    ]);
    Ok(t)
}

/// Simulated counts, optionally over a peak-power grid. Sweep rows carry the
/// peak power as their label.
pub fn simulate(cfg: &RunConfig, sim: &SimConfig, power_sweep: Option<&SweepSpec>) -> Result<(Table, Vec<SimResult>)> {
    cfg.require_raman_gain()?;
    let det = cfg.detectors()?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    match power_sweep {
        None => {
            let rates = fiberpair_core::generation_rates(&cfg.fiber, &cfg.pump, &cfg.signal, &cfg.idler, cfg.env)?;
            let r = parallel::simulate_pulses(&rates, &det, sim)?;
            rows.push(CountsRow { label: None, pulse_count: sim.n_pulses, counts: r.counts });
            results.push(r);
        }
        Some(spec) => {
            if spec.variable != SweepVariable::PeakPower {
                return Err(CliError::validation("simulate only sweeps peak power"));
            }
            let grid: Vec<_> = spec.grid()?.into_iter().map(|p| cfg.pump.with_peak_power(p)).collect();
            for (pump, r) in parallel::simulate_power_sweep(&cfg.fiber, &grid, &det, cfg.env, sim)? {
                rows.push(CountsRow {
                    label: Some(cell(Some(pump.peak_power))),
                    pulse_count: sim.n_pulses,
                    counts: r.counts,
                });
                results.push(r);
            }
        }
    }
    Ok((counts_table(&rows), results))
}

/// One line per simulated point: raw tallies and the binomial standard errors.
pub fn simulation_summary(results: &[SimResult]) -> String {
    let mut s = String::new();
    for (k, r) in results.iter().enumerate() {
        let raw = r.raw;
        let CountRecord { n_s, n_i, n_co, n_ac } = r.std_err;
        s.push_str(&format!(
            "point {k}: pulses={} signal={} idler={} coincidences={} accidentals={} std_err(n_s={n_s:e}, n_i={n_i:e}, n_co={n_co:e}, n_ac={n_ac:e})\n",
            raw.pulses, raw.signal_clicks, raw.idler_clicks, raw.coincidences, raw.accidentals
        ));
    }
    s
}
