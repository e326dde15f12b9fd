//! Model evaluation rows and parameter sweeps.

use fiberpair_core::physics::{generation_rates_with, hsps_efficiency_from_kappa, sfwm_spectral_density_with};
use fiberpair_core::{
    car, forward_counts, hsps_efficiency, kappa, multiphoton_probability, multiphoton_probability_at_least_two,
    pump_photons_per_pulse, raman_spectral_densities, CountRecord, DetectorPair, PhaseMatching, RateTriple,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::table::{cell, Table};

pub const MODEL_FIELDS: [&str; 21] = [
    "peak_power_w",
    "nonlinear_phase",
    "temperature_k",
    "detune_hz",
    "pump_photons",
    "xi_c",
    "xi_s",
    "xi_i",
    "pair_rate",
    "stokes_rate",
    "antistokes_rate",
    "kappa",
    "efficiency",
    "efficiency_with_mismatch",
    "multiphoton",
    "multiphoton_at_least_two",
    "n_s",
    "n_i",
    "n_co",
    "n_ac",
    "car",
];

pub const PER_SECOND_FIELDS: [&str; 7] =
    ["pair_rate_hz", "stokes_rate_hz", "antistokes_rate_hz", "n_s_hz", "n_i_hz", "n_co_hz", "n_ac_hz"];

/// All model outputs for one configuration. Undefined quantities are `None`
/// (zero pump leaves κ and the efficiency undefined, zero detune leaves the
/// Raman terms undefined).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelRow {
    pub values: Vec<Option<f64>>,
}

impl ModelRow {
    pub fn get(&self, name: &str) -> Option<f64> {
        let idx = MODEL_FIELDS.iter().chain(PER_SECOND_FIELDS.iter()).position(|f| *f == name)?;
        self.values.get(idx).copied().flatten()
    }
}

pub fn model_header(per_second: bool) -> Vec<&'static str> {
    let mut h = MODEL_FIELDS.to_vec();
    if per_second {
        h.extend(PER_SECOND_FIELDS);
    }
    h
}

pub fn evaluate(cfg: &RunConfig, per_second: bool) -> ModelRow {
    let (fiber, pump, env) = (&cfg.fiber, &cfg.pump, cfg.env);
    let detune = cfg.idler.detune;
    let ok = |r: fiberpair_core::Result<f64>| r.ok();

    let xi_c = ok(sfwm_spectral_density_with(fiber, pump, detune, PhaseMatching::Full));
    let xi_s = raman_spectral_densities(fiber, pump, cfg.signal.detune, env).ok().map(|d| d.0);
    let xi_i = raman_spectral_densities(fiber, pump, detune, env).ok().map(|d| d.1);
    let rates: Option<RateTriple> =
        generation_rates_with(fiber, pump, &cfg.signal, &cfg.idler, env, PhaseMatching::Full).ok();
    let k = ok(kappa(fiber, pump, &cfg.signal, &cfg.idler, env));
    let eff = k.and_then(|k| hsps_efficiency_from_kappa(k).ok());
    let eff_full = rates.and_then(|r| hsps_efficiency(&r).ok());
    let det = DetectorPair { signal: cfg.signal.clone(), idler: cfg.idler.clone() };
    let counts: Option<CountRecord> = rates.and_then(|r| forward_counts(&r, &det).ok());

    let mut values = vec![
        Some(pump.peak_power),
        Some(fiber.gamma * pump.peak_power * fiber.length),
        Some(env.temperature),
        Some(detune),
        ok(pump_photons_per_pulse(pump)),
        xi_c,
        xi_s,
        xi_i,
        rates.map(|r| r.pair_rate),
        rates.map(|r| r.stokes_rate),
        rates.map(|r| r.antistokes_rate),
        k,
        eff,
        eff_full,
        rates.and_then(|r| multiphoton_probability(r.pair_rate).ok()),
        rates.and_then(|r| multiphoton_probability_at_least_two(r.pair_rate).ok()),
        counts.map(|c| c.n_s),
        counts.map(|c| c.n_i),
        counts.map(|c| c.n_co),
        counts.map(|c| c.n_ac),
        counts.and_then(|c| car(&c).ok()),
    ];
    if per_second {
        let f = pump.repetition_rate;
        let hz = |v: Option<f64>| v.map(|v| v * f);
        let tail: Vec<Option<f64>> = [8, 9, 10, 16, 17, 18, 19].iter().map(|&i| hz(values[i])).collect();
        values.extend(tail);
    }
    ModelRow { values }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepVariable {
    /// Pump peak power, W.
    PeakPower,
    /// Fiber temperature, K.
    Temperature,
    /// Common signal/idler detune, Hz.
    Detune,
    /// Phase-matched pair rate per pulse; sets the pump power.
    PairRate,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::PeakPower => "sweep_peak_power_w",
            SweepVariable::Temperature => "sweep_temperature_k",
            SweepVariable::Detune => "sweep_detune_hz",
            SweepVariable::PairRate => "sweep_pair_rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum SweepScale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub scale: SweepScale,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.start.is_nan() || self.stop.is_nan() || self.start >= self.stop {
            return Err(CliError::validation(format!(
                "sweep: start ({}) must be below stop ({})",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(CliError::validation("sweep: steps must be at least 2"));
        }
        if self.scale == SweepScale::Log && self.start <= 0.0 {
            return Err(CliError::validation("sweep: log scale needs a positive start"));
        }
        if self.start < 0.0 {
            return Err(CliError::validation("sweep: values must be non-negative"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let last = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    return self.stop;
                }
                let t = k as f64 / last;
                match self.scale {
                    SweepScale::Linear => self.start + (self.stop - self.start) * t,
                    SweepScale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect())
    }

    /// `cfg` with the swept variable set to `value`.
    pub fn apply(&self, cfg: &RunConfig, value: f64) -> RunConfig {
        let mut c = cfg.clone();
        match self.variable {
            SweepVariable::PeakPower => c.pump.peak_power = value,
            SweepVariable::Temperature => c.env.temperature = value,
            SweepVariable::Detune => {
                c.signal.detune = value;
                c.idler.detune = value;
            }
            SweepVariable::PairRate => {
                let phase = (value / c.idler.mode_count()).sqrt();
                c.pump.peak_power = phase / (c.fiber.gamma * c.fiber.length);
            }
        }
        c
    }
}

pub fn sweep_table(cfg: &RunConfig, sweep: &SweepSpec, per_second: bool) -> Result<Table> {
    let mut header = vec![sweep.variable.column()];
    header.extend(model_header(per_second));
    let mut table = Table::new(header);
    for value in sweep.grid()? {
        let row = evaluate(&sweep.apply(cfg, value), per_second);
        let mut cells = vec![cell(Some(value))];
        cells.extend(row.values.into_iter().map(cell));
        table.push(cells);
    }
    Ok(table)
}
