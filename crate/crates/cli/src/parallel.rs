//! Multi-threaded driver over the simulator's batch substreams.
//!
//! Batches are generated on the rayon pool and concatenated in batch order
//! before tallying, so the result is bit-identical to the serial
//! [`fiberpair_core::simulate_pulses`] for any thread count.

use fiberpair_core::sim::{batch_flags, tally_flags};
use fiberpair_core::{
    generation_rates, DetectorPair, Environment, FiberSpec, PumpSpec, RateTriple, SimConfig, SimResult,
};
use rayon::prelude::*;

pub fn simulate_point(
    rates: &RateTriple,
    det: &DetectorPair,
    cfg: &SimConfig,
    point: u64,
) -> fiberpair_core::Result<SimResult> {
    cfg.validate()?;
    let batches: Vec<Vec<u8>> = (0..cfg.batch_count())
        .into_par_iter()
        .map(|b| batch_flags(rates, det, cfg, point, b))
        .collect::<fiberpair_core::Result<_>>()?;
    tally_flags(&batches.concat(), cfg)
}

pub fn simulate_pulses(rates: &RateTriple, det: &DetectorPair, cfg: &SimConfig) -> fiberpair_core::Result<SimResult> {
    simulate_point(rates, det, cfg, 0)
}

pub fn simulate_power_sweep(
    fiber: &FiberSpec,
    pump_grid: &[PumpSpec],
    det: &DetectorPair,
    env: Environment,
    cfg: &SimConfig,
) -> fiberpair_core::Result<Vec<(PumpSpec, SimResult)>> {
    if pump_grid.is_empty() {
        return Err(fiberpair_core::Error::Config("pump grid is empty"));
    }
    pump_grid
        .iter()
        .enumerate()
        .map(|(k, pump)| {
            let rates = generation_rates(fiber, pump, &det.signal, &det.idler, env)?;
            Ok((pump.clone(), simulate_point(&rates, det, cfg, k as u64)?))
        })
        .collect()
}
