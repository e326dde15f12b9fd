//! Photon-pair and Raman-noise generation in a co-polarized, single-pump fiber.
//!
//! Fiber parameters are carried in the units fiber datasheets use
//! (W⁻¹·km⁻¹, ps·nm⁻¹·km⁻¹, km). Frequencies, times and powers are SI.
//! Detunes are ordinary frequencies in Hz: the thermal factor uses h·ν and
//! the phase-matching term uses the angular detune 2πν.

use alloc::string::String;
use core::f64::consts::PI;

use crate::constants::{BOLTZMANN, PLANCK, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Relative tolerance on `signal.detune == idler.detune`.
pub const DETUNE_MATCH_TOLERANCE: f64 = 0.01;

/// One fiber under test.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpec {
    /// Nonlinear coefficient γ, W⁻¹·km⁻¹.
    pub gamma: f64,
    /// Co-polarized Raman gain g_R at the working detune, W⁻¹·km⁻¹.
    pub raman_gain: f64,
    /// Dispersion parameter D at the pump wavelength, ps·nm⁻¹·km⁻¹.
    pub dispersion: f64,
    /// Length, km.
    pub length: f64,
    /// Zero-dispersion wavelength, nm. Informational only.
    pub zero_dispersion_wavelength: f64,
    pub label: String,
}

impl FiberSpec {
    pub fn validate(&self) -> Result<()> {
        positive("fiber.gamma", self.gamma)?;
        non_negative("fiber.raman_gain", self.raman_gain)?;
        positive("fiber.length", self.length)?;
        finite("fiber.dispersion", self.dispersion)
    }

    pub fn with_raman_gain(&self, raman_gain: f64) -> Self {
        Self { raman_gain, ..self.clone() }
    }

    /// Group-velocity dispersion β₂ at `wavelength_nm`, ps²·km⁻¹.
    pub fn beta2(&self, wavelength_nm: f64) -> Result<f64> {
        beta2_from_dispersion(self.dispersion, wavelength_nm)
    }
}

/// The three fibers characterized in the comparison experiment.
///
/// Raman gain is not part of the published table, so callers always supply
/// it (usually from [`crate::fit::calibrate_raman_gain`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberKind {
    /// Dispersion-shifted fiber (G.653).
    Dsf,
    /// Conventional GeO₂-doped highly nonlinear fiber.
    Hnlf,
    /// Pure-silica-core highly nonlinear microstructure fiber.
    Hnmsf,
}

impl FiberKind {
    pub const ALL: [FiberKind; 3] = [FiberKind::Dsf, FiberKind::Hnlf, FiberKind::Hnmsf];

    pub fn spec(self, raman_gain: f64) -> FiberSpec {
        let (gamma, dispersion, zero_dispersion_wavelength, length) = match self {
            FiberKind::Dsf => (3.0, 0.05, 1549.0, 1.0),
            FiberKind::Hnlf => (11.1, 0.076, 1548.0, 0.5),
            FiberKind::Hnmsf => (66.7, 8.65, 1564.1, 0.025),
        };
        let label = self.name();
        FiberSpec { gamma, raman_gain, dispersion, length, zero_dispersion_wavelength, label: label.into() }
    }

    pub fn name(self) -> &'static str {
        match self {
            FiberKind::Dsf => "DSF",
            FiberKind::Hnlf => "HNLF",
            FiberKind::Hnmsf => "HNMSF",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(label))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpSpec {
    /// Peak power P₀, W.
    pub peak_power: f64,
    /// Center wavelength, nm.
    pub wavelength: f64,
    /// Repetition rate, Hz.
    pub repetition_rate: f64,
    /// Pulse duration, s.
    pub pulse_duration: f64,
}

impl PumpSpec {
    pub fn validate(&self) -> Result<()> {
        non_negative("pump.peak_power", self.peak_power)?;
        positive("pump.wavelength", self.wavelength)?;
        positive("pump.repetition_rate", self.repetition_rate)?;
        positive("pump.pulse_duration", self.pulse_duration)
    }

    pub fn with_peak_power(&self, peak_power: f64) -> Self {
        Self { peak_power, ..self.clone() }
    }

    /// Peak power that puts the nonlinear phase γP₀L at `phase` in `fiber`.
    pub fn peak_power_for_phase(fiber: &FiberSpec, phase: f64) -> f64 {
        phase / (fiber.gamma * fiber.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Stokes side, red of the pump.
    Signal,
    /// Anti-Stokes side, blue of the pump.
    Idler,
}

/// One detection arm.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    /// Detune magnitude from the pump, Hz.
    pub detune: f64,
    /// Filter bandwidth Δν, Hz.
    pub bandwidth: f64,
    /// Effective temporal collection window τ, s.
    pub window: f64,
    /// Collection efficiency η in [0, 1].
    pub efficiency: f64,
    /// Dark-count probability per gate in [0, 1).
    pub dark_prob: f64,
    pub side: Side,
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        positive("channel.detune", self.detune)?;
        positive("channel.bandwidth", self.bandwidth)?;
        positive("channel.window", self.window)?;
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::Domain { what: "channel.efficiency", value: self.efficiency });
        }
        if !(0.0..1.0).contains(&self.dark_prob) {
            return Err(Error::Domain { what: "channel.dark_prob", value: self.dark_prob });
        }
        Ok(())
    }

    /// Number of spectro-temporal modes collected, Δν·τ.
    pub fn mode_count(&self) -> f64 {
        self.bandwidth * self.window
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    /// Fiber temperature, K.
    pub temperature: f64,
}

/// Per-pulse generation rates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateTriple {
    /// Correlated pairs per pulse, R.
    pub pair_rate: f64,
    /// Stokes Raman photons per pulse in the signal band, R_s.
    pub stokes_rate: f64,
    /// Anti-Stokes Raman photons per pulse in the idler band, R_i.
    pub antistokes_rate: f64,
}

impl RateTriple {
    pub fn new(pair_rate: f64, stokes_rate: f64, antistokes_rate: f64) -> Self {
        Self { pair_rate, stokes_rate, antistokes_rate }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("pair_rate", self.pair_rate)?;
        non_negative("stokes_rate", self.stokes_rate)?;
        non_negative("antistokes_rate", self.antistokes_rate)
    }
}

/// Core-material properties behind γ ∝ n₂/A_eff and g_R ∝ g/A_eff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSpec {
    /// Nonlinear refractive index, m²/W.
    pub n2: f64,
    /// Raman response at the working detune, arbitrary but consistent units.
    pub raman_response: f64,
    /// Effective mode area, μm².
    pub effective_area: f64,
}

/// Whether the SFWM phase-matching factor is evaluated or pinned to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMatching {
    #[default]
    Full,
    Neglected,
}

/// Thermal phonon occupation 1/(exp(hν/k_BT) − 1) at ordinary-frequency detune `detune` (Hz).
pub fn bose_occupation(detune: f64, env: Environment) -> Result<f64> {
    positive("detune", detune)?;
    positive("temperature", env.temperature)?;
    let x = PLANCK * detune / (BOLTZMANN * env.temperature);
    Ok(1.0 / libm::expm1(x))
}

/// β₂ = −D·λ²/(2πc) in ps²·km⁻¹ from D in ps·nm⁻¹·km⁻¹ and λ in nm.
pub fn beta2_from_dispersion(dispersion: f64, wavelength_nm: f64) -> Result<f64> {
    positive("wavelength", wavelength_nm)?;
    // c in nm/ps
    let c = SPEED_OF_LIGHT * 1e-3;
    Ok(-dispersion * wavelength_nm * wavelength_nm / (2.0 * PI * c))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        libm::sin(x) / x
    }
}

/// Argument of the phase-matching sinc, (β₂Ω² + 2γP₀)·L/2, with Ω = 2πν.
pub fn phase_mismatch(fiber: &FiberSpec, pump: &PumpSpec, detune: f64) -> Result<f64> {
    let beta2 = fiber.beta2(pump.wavelength)?;
    // rad/ps
    let omega = 2.0 * PI * detune * 1e-12;
    Ok((beta2 * omega * omega + 2.0 * fiber.gamma * pump.peak_power) * fiber.length / 2.0)
}

/// Pair spectral density ξ_c = (γP₀L)²·sinc²[(β₂Ω² + 2γP₀)L/2].
pub fn sfwm_spectral_density(fiber: &FiberSpec, pump: &PumpSpec, detune: f64) -> Result<f64> {
    sfwm_spectral_density_with(fiber, pump, detune, PhaseMatching::Full)
}

pub fn sfwm_spectral_density_with(
    fiber: &FiberSpec,
    pump: &PumpSpec,
    detune: f64,
    phase: PhaseMatching,
) -> Result<f64> {
    fiber.validate()?;
    pump.validate()?;
    non_negative("detune", detune)?;
    let phi = fiber.gamma * pump.peak_power * fiber.length;
    let matching = match phase {
        PhaseMatching::Full => {
            let s = sinc(phase_mismatch(fiber, pump, detune)?);
            s * s
        }
        PhaseMatching::Neglected => 1.0,
    };
    Ok(phi * phi * matching)
}

/// Raman spectral densities `(ξ_s, ξ_i)`: Stokes P₀Lg_R(n+1) and anti-Stokes P₀Lg_R·n.
pub fn raman_spectral_densities(
    fiber: &FiberSpec,
    pump: &PumpSpec,
    detune: f64,
    env: Environment,
) -> Result<(f64, f64)> {
    fiber.validate()?;
    pump.validate()?;
    let n = bose_occupation(detune, env)?;
    let spontaneous = pump.peak_power * fiber.length * fiber.raman_gain;
    Ok((spontaneous * (n + 1.0), spontaneous * n))
}

fn check_channels(signal: &ChannelSpec, idler: &ChannelSpec) -> Result<()> {
    signal.validate()?;
    idler.validate()?;
    if signal.side != Side::Signal {
        return Err(Error::Config("signal channel must have side = signal"));
    }
    if idler.side != Side::Idler {
        return Err(Error::Config("idler channel must have side = idler"));
    }
    let mismatch = (signal.detune - idler.detune).abs() / signal.detune.max(idler.detune);
    if mismatch > DETUNE_MATCH_TOLERANCE {
        return Err(Error::Config("signal and idler detunes differ by more than 1%"));
    }
    Ok(())
}

/// Per-pulse rates R = Δν·τ·ξ_c, R_s = Δν·τ·ξ_s, R_i = Δν·τ·ξ_i.
///
/// Each noise rate uses its own arm's Δν·τ. Pairs are counted in the
/// heralding (idler) arm's modes and at the idler detune.
pub fn generation_rates(
    fiber: &FiberSpec,
    pump: &PumpSpec,
    signal: &ChannelSpec,
    idler: &ChannelSpec,
    env: Environment,
) -> Result<RateTriple> {
    generation_rates_with(fiber, pump, signal, idler, env, PhaseMatching::Full)
}

pub fn generation_rates_with(
    fiber: &FiberSpec,
    pump: &PumpSpec,
    signal: &ChannelSpec,
    idler: &ChannelSpec,
    env: Environment,
    phase: PhaseMatching,
) -> Result<RateTriple> {
    check_channels(signal, idler)?;
    let xi_c = sfwm_spectral_density_with(fiber, pump, idler.detune, phase)?;
    let (xi_s, _) = raman_spectral_densities(fiber, pump, signal.detune, env)?;
    let (_, xi_i) = raman_spectral_densities(fiber, pump, idler.detune, env)?;
    Ok(RateTriple {
        pair_rate: idler.mode_count() * xi_c,
        stokes_rate: signal.mode_count() * xi_s,
        antistokes_rate: idler.mode_count() * xi_i,
    })
}

/// κ = R/R_i in closed form, γ√R / (g_R·n·√(Δν·τ)), with R evaluated at phase matching.
pub fn kappa(
    fiber: &FiberSpec,
    pump: &PumpSpec,
    signal: &ChannelSpec,
    idler: &ChannelSpec,
    env: Environment,
) -> Result<f64> {
    check_channels(signal, idler)?;
    fiber.validate()?;
    pump.validate()?;
    if fiber.raman_gain == 0.0 {
        return Err(Error::DivisionDomain { vanishing: "raman_gain" });
    }
    if pump.peak_power == 0.0 {
        return Err(Error::DivisionDomain { vanishing: "peak_power" });
    }
    let n = bose_occupation(idler.detune, env)?;
    let modes = idler.mode_count();
    let phi = fiber.gamma * pump.peak_power * fiber.length;
    let pair_rate = modes * phi * phi;
    Ok(fiber.gamma * libm::sqrt(pair_rate) / (fiber.raman_gain * n * libm::sqrt(modes)))
}

/// Upper limit of heralded single-photon preparation efficiency, R/(R + R_i).
pub fn hsps_efficiency(rates: &RateTriple) -> Result<f64> {
    rates.validate()?;
    let total = rates.pair_rate + rates.antistokes_rate;
    if total == 0.0 {
        return Err(Error::DivisionDomain { vanishing: "pair_rate + antistokes_rate" });
    }
    Ok(rates.pair_rate / total)
}

/// Efficiency from κ alone: 1/(1 + 1/κ).
pub fn hsps_efficiency_from_kappa(kappa: f64) -> Result<f64> {
    positive("kappa", kappa)?;
    Ok(kappa / (1.0 + kappa))
}

/// Poisson probability of exactly two pairs in one pulse, μ²e^(−μ)/2.
pub fn multiphoton_probability(pair_rate: f64) -> Result<f64> {
    non_negative("pair_rate", pair_rate)?;
    Ok(pair_rate * pair_rate * libm::exp(-pair_rate) / 2.0)
}

/// Poisson probability of two or more pairs, 1 − e^(−μ)(1 + μ).
pub fn multiphoton_probability_at_least_two(pair_rate: f64) -> Result<f64> {
    non_negative("pair_rate", pair_rate)?;
    Ok(-libm::expm1(-pair_rate) - pair_rate * libm::exp(-pair_rate))
}

/// κ_a/κ_b at equal R, T and Δν·τ. Effective areas cancel.
pub fn material_kappa_ratio(a: &MaterialSpec, b: &MaterialSpec) -> Result<f64> {
    for m in [a, b] {
        positive("material.n2", m.n2)?;
        positive("material.effective_area", m.effective_area)?;
        if m.raman_response == 0.0 {
            return Err(Error::DivisionDomain { vanishing: "raman_response" });
        }
        positive("material.raman_response", m.raman_response)?;
    }
    Ok((a.n2 * b.raman_response) / (b.n2 * a.raman_response))
}

/// Pump photons per pulse, P₀·τ_p·λ/(h·c).
pub fn pump_photons_per_pulse(pump: &PumpSpec) -> Result<f64> {
    pump.validate()?;
    let photon_energy = PLANCK * SPEED_OF_LIGHT / (pump.wavelength * 1e-9);
    Ok(pump.peak_power * pump.pulse_duration / photon_energy)
}

fn finite(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

pub(crate) fn positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

pub(crate) fn non_negative(what: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}
