//! Correlated photon-pair generation and Raman noise in optical fibers.
//!
//! The crate covers four pieces that share the same value types:
//!
//! - [`physics`]: spectral densities of four-wave-mixing pairs and Raman
//!   noise, per-pulse generation rates, the pair-to-noise ratio κ and the
//!   heralded-source preparation efficiency derived from it.
//! - [`counts`]: the linearized detector model mapping generation rates to
//!   singles, coincidence and accidental-coincidence probabilities, and its
//!   exact algebraic inverse.
//! - [`sim`]: a seeded per-pulse Monte Carlo counting simulator used as an
//!   independent check of the detector model.
//! - [`fit`]: closed-form least-squares fits for pump-power and √R scaling,
//!   plus Raman gain calibration.
//!
//! Everything is `no_std` with `alloc`; IO lives in the `fiberpair` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod constants;
pub mod counts;
mod error;
pub mod fit;
pub mod physics;
pub mod sim;

pub use counts::{
    car, forward_counts, invert_counts, invert_counts_with, CountRecord, DetectorPair, Inversion, InversionMode,
};
pub use error::{Error, Result};
pub use fit::{
    calibrate_raman_gain, fit_quadratic, fit_sqrt, predict_a, Observation, QuadraticFit, SeriesPoint, SqrtFit,
};
pub use physics::{
    beta2_from_dispersion, bose_occupation, generation_rates, hsps_efficiency, kappa, material_kappa_ratio,
    multiphoton_probability, multiphoton_probability_at_least_two, pump_photons_per_pulse, raman_spectral_densities,
    sfwm_spectral_density, ChannelSpec, Environment, FiberKind, FiberSpec, MaterialSpec, PhaseMatching, PumpSpec,
    RateTriple, Side,
};
pub use sim::{simulate_power_sweep, simulate_pulses, RawTallies, SimConfig, SimResult};
