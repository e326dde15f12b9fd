//! Run configuration file (TOML).
//!
//! Section names follow the run configuration: `[fiber]`, `[pump]`,
//! `[signal]`, `[idler]`, `[env]` and an optional `[sim]`. Every dimensional
//! key carries its unit as a suffix:
//!
//! | suffix      | unit          |
//! |-------------|---------------|
//! | `_per_w_km` | W⁻¹·km⁻¹      |
//! | `_ps_per_nm_km` | ps·nm⁻¹·km⁻¹ |
//! | `_km`       | km            |
//! | `_nm`       | nm            |
//! | `_w`        | W             |
//! | `_hz`       | Hz            |
//! | `_s`        | s             |
//! | `_k`        | K             |
//!
//! Unknown keys are rejected, so a misspelled unit suffix is an error rather
//! than a silently ignored value.

use std::fs;
use std::path::Path;

use fiberpair_core::{ChannelSpec, DetectorPair, Environment, FiberKind, FiberSpec, PumpSpec, Side, SimConfig};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    /// One of the built-in fiber rows (DSF, HNLF, HNMSF); explicit keys override it.
    pub preset: Option<String>,
    pub label: Option<String>,
    pub gamma_per_w_km: Option<f64>,
    pub raman_gain_per_w_km: Option<f64>,
    pub dispersion_ps_per_nm_km: Option<f64>,
    pub length_km: Option<f64>,
    pub zero_dispersion_wavelength_nm: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    pub peak_power_w: Option<f64>,
    /// γP₀L, dimensionless; alternative to `peak_power_w`.
    pub nonlinear_phase: Option<f64>,
    pub wavelength_nm: f64,
    pub repetition_rate_hz: f64,
    pub pulse_duration_s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub detune_hz: f64,
    pub bandwidth_hz: f64,
    pub window_s: f64,
    pub efficiency: f64,
    pub dark_prob: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSection {
    pub temperature_k: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub n_pulses: u64,
    pub seed: u64,
    #[serde(default = "default_lag")]
    pub accidental_lag: u64,
}

fn default_lag() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub fiber: FiberSection,
    pub pump: PumpSection,
    pub signal: ChannelSection,
    pub idler: ChannelSection,
    pub env: EnvSection,
    pub sim: Option<SimSection>,
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fiber: FiberSpec,
    /// False when the file gave no Raman gain (only `calibrate` accepts that).
    pub has_raman_gain: bool,
    pub pump: PumpSpec,
    pub signal: ChannelSpec,
    pub idler: ChannelSpec,
    pub env: Environment,
    pub sim: Option<SimConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::validation(format!("config: {e}")))?;
        file.try_into()
    }

    pub fn detectors(&self) -> Result<DetectorPair> {
        Ok(DetectorPair::new(self.signal.clone(), self.idler.clone())?)
    }

    pub fn require_raman_gain(&self) -> Result<()> {
        if self.has_raman_gain {
            Ok(())
        } else {
            Err(CliError::validation("fiber.raman_gain_per_w_km is required (obtain it with `fiberpair calibrate`)"))
        }
    }

    pub fn require_sim(&self) -> Result<SimConfig> {
        self.sim.ok_or_else(|| CliError::validation("a [sim] section is required for simulation"))
    }
}

fn field<T: Copy>(value: Option<T>, preset: Option<T>, key: &str) -> Result<T> {
    value.or(preset).ok_or_else(|| CliError::validation(format!("fiber.{key} is missing (no preset given)")))
}

fn check(section: &str, result: fiberpair_core::Result<()>) -> Result<()> {
    result.map_err(|e| CliError::validation(format!("[{section}] {e}")))
}

fn channel(section: &str, c: &ChannelSection, side: Side) -> Result<ChannelSpec> {
    let spec = ChannelSpec {
        detune: c.detune_hz,
        bandwidth: c.bandwidth_hz,
        window: c.window_s,
        efficiency: c.efficiency,
        dark_prob: c.dark_prob,
        side,
    };
    check(section, spec.validate())?;
    Ok(spec)
}

impl TryFrom<ConfigFile> for RunConfig {
    type Error = CliError;

    fn try_from(file: ConfigFile) -> Result<Self> {
        let f = &file.fiber;
        let preset = match &f.preset {
            Some(name) => Some(
                FiberKind::from_label(name)
                    .ok_or_else(|| CliError::validation(format!("fiber.preset: unknown fiber {name:?}")))?
                    .spec(0.0),
            ),
            None => None,
        };
        let p = preset.as_ref();
        let has_raman_gain = f.raman_gain_per_w_km.is_some();
        let fiber = FiberSpec {
            gamma: field(f.gamma_per_w_km, p.map(|s| s.gamma), "gamma_per_w_km")?,
            raman_gain: f.raman_gain_per_w_km.unwrap_or(0.0),
            dispersion: field(f.dispersion_ps_per_nm_km, p.map(|s| s.dispersion), "dispersion_ps_per_nm_km")?,
            length: field(f.length_km, p.map(|s| s.length), "length_km")?,
            zero_dispersion_wavelength: f
                .zero_dispersion_wavelength_nm
                .or(p.map(|s| s.zero_dispersion_wavelength))
                .unwrap_or(f64::NAN),
            label: f.label.clone().or_else(|| p.map(|s| s.label.clone())).unwrap_or_else(|| "fiber".into()),
        };
        check("fiber", fiber.validate())?;

        let peak_power = match (file.pump.peak_power_w, file.pump.nonlinear_phase) {
            (Some(p), None) => p,
            (None, Some(phase)) => PumpSpec::peak_power_for_phase(&fiber, phase),
            (Some(_), Some(_)) => {
                return Err(CliError::validation("pump: give either peak_power_w or nonlinear_phase, not both"))
            }
            (None, None) => return Err(CliError::validation("pump: peak_power_w (or nonlinear_phase) is required")),
        };
        let pump = PumpSpec {
            peak_power,
            wavelength: file.pump.wavelength_nm,
            repetition_rate: file.pump.repetition_rate_hz,
            pulse_duration: file.pump.pulse_duration_s,
        };
        check("pump", pump.validate())?;

        let signal = channel("signal", &file.signal, Side::Signal)?;
        let idler = channel("idler", &file.idler, Side::Idler)?;
        let env = Environment { temperature: file.env.temperature_k };
        if !(env.temperature > 0.0 && env.temperature.is_finite()) {
            return Err(CliError::validation(format!("[env] temperature_k must be positive, got {}", env.temperature)));
        }
        let sim = file.sim.map(|s| SimConfig { n_pulses: s.n_pulses, seed: s.seed, accidental_lag: s.accidental_lag });
        if let Some(s) = &sim {
            check("sim", s.validate())?;
        }
        Ok(RunConfig { fiber, has_raman_gain, pump, signal, idler, env, sim })
    }
}
