//! Seeded per-pulse photon-counting Monte Carlo.
//!
//! Each pulse draws Poisson numbers of pairs and Raman photons, applies
//! per-photon detection with the arm efficiency plus an independent dark
//! count, and records whether each threshold detector clicked. Nothing here
//! uses the linearized count model, so the simulator can check it.
//!
//! Pulses are generated in fixed-size batches. Batch `b` of sweep point `p`
//! draws from the ChaCha8 stream `b` keyed by `(seed, p)`, so the click
//! record does not depend on how batches are scheduled.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::counts::{CountRecord, DetectorPair};
use crate::error::{Error, Result};
use crate::physics::{generation_rates, Environment, FiberSpec, PumpSpec, RateTriple};

/// Pulses per RNG substream.
pub const BATCH_PULSES: u64 = 1 << 16;

const SIGNAL_CLICK: u8 = 0b01;
const IDLER_CLICK: u8 = 0b10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub n_pulses: u64,
    pub seed: u64,
    /// Pulse offset between the signal and idler clicks counted as accidentals.
    pub accidental_lag: u64,
}

impl SimConfig {
    pub fn new(n_pulses: u64, seed: u64) -> Self {
        Self { n_pulses, seed, accidental_lag: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pulses == 0 {
            return Err(Error::Config("n_pulses must be at least 1"));
        }
        if self.accidental_lag == 0 {
            return Err(Error::Config("accidental_lag must be at least 1"));
        }
        Ok(())
    }

    /// Pulses actually generated: the trailing `accidental_lag` pulses only
    /// supply idler clicks for the accidental pairing.
    pub fn generated_pulses(&self) -> u64 {
        self.n_pulses + self.accidental_lag
    }

    pub fn batch_count(&self) -> u64 {
        self.generated_pulses().div_ceil(BATCH_PULSES)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RawTallies {
    pub pulses: u64,
    pub signal_clicks: u64,
    pub idler_clicks: u64,
    pub coincidences: u64,
    pub accidentals: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub counts: CountRecord,
    pub raw: RawTallies,
    /// Binomial standard errors √(p(1−p)/n) of each field of `counts`.
    pub std_err: CountRecord,
}

fn substream(seed: u64, point: u64, batch: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(batch);
    rng
}

struct PoissonSource(Option<Poisson<f64>>);

impl PoissonSource {
    fn new(mean: f64) -> Result<Self> {
        if mean == 0.0 {
            return Ok(Self(None));
        }
        Poisson::new(mean).map(|p| Self(Some(p))).map_err(|_| Error::Domain { what: "poisson mean", value: mean })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> u64 {
        match &self.0 {
            Some(p) => p.sample(rng) as u64,
            None => 0,
        }
    }
}

struct Arm {
    miss: f64,
    dark: f64,
}

impl Arm {
    // P(no photon detected | k photons) = (1 − η)^k
    fn clicks<R: Rng>(&self, photons: u64, rng: &mut R) -> bool {
        let dark = rng.random::<f64>() < self.dark;
        let detected = photons > 0 && rng.random::<f64>() >= powi(self.miss, photons);
        dark || detected
    }
}

fn powi(base: f64, exp: u64) -> f64 {
    libm::pow(base, exp as f64)
}

/// Click flags for batch `batch` of sweep point `point`: bit 0 is the signal
/// arm, bit 1 the idler arm.
pub fn batch_flags(rates: &RateTriple, det: &DetectorPair, cfg: &SimConfig, point: u64, batch: u64) -> Result<Vec<u8>> {
    rates.validate()?;
    det.validate()?;
    cfg.validate()?;
    let start = batch * BATCH_PULSES;
    let end = (start + BATCH_PULSES).min(cfg.generated_pulses());
    if start >= end {
        return Err(Error::Config("batch index beyond the configured pulse count"));
    }

    let pairs = PoissonSource::new(rates.pair_rate)?;
    let stokes = PoissonSource::new(rates.stokes_rate)?;
    let antistokes = PoissonSource::new(rates.antistokes_rate)?;
    let signal = Arm { miss: 1.0 - det.signal.efficiency, dark: det.signal.dark_prob };
    let idler = Arm { miss: 1.0 - det.idler.efficiency, dark: det.idler.dark_prob };

    let mut rng = substream(cfg.seed, point, batch);
    let flags = (start..end)
        .map(|_| {
            let n_pairs = pairs.draw(&mut rng);
            let n_stokes = stokes.draw(&mut rng);
            let n_antistokes = antistokes.draw(&mut rng);
            let mut f = 0;
            if signal.clicks(n_pairs + n_stokes, &mut rng) {
                f |= SIGNAL_CLICK;
            }
            if idler.clicks(n_pairs + n_antistokes, &mut rng) {
                f |= IDLER_CLICK;
            }
            f
        })
        .collect();
    Ok(flags)
}

/// Reduces the concatenated click flags of all batches to tallies.
pub fn tally_flags(flags: &[u8], cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    if flags.len() as u64 != cfg.generated_pulses() {
        return Err(Error::Config("flag record length does not match the configuration"));
    }
    let n = cfg.n_pulses as usize;
    let lag = cfg.accidental_lag as usize;
    let mut raw = RawTallies { pulses: cfg.n_pulses, ..RawTallies::default() };
    for k in 0..n {
        let f = flags[k];
        let s = f & SIGNAL_CLICK != 0;
        let i = f & IDLER_CLICK != 0;
        raw.signal_clicks += s as u64;
        raw.idler_clicks += i as u64;
        raw.coincidences += (s && i) as u64;
        raw.accidentals += (s && flags[k + lag] & IDLER_CLICK != 0) as u64;
    }
    Ok(result_from_tallies(raw))
}

pub fn result_from_tallies(raw: RawTallies) -> SimResult {
    let n = raw.pulses as f64;
    let p = |k: u64| k as f64 / n;
    let se = |p: f64| libm::sqrt(p * (1.0 - p) / n);
    let counts = CountRecord {
        n_s: p(raw.signal_clicks),
        n_i: p(raw.idler_clicks),
        n_co: p(raw.coincidences),
        n_ac: p(raw.accidentals),
    };
    let std_err =
        CountRecord { n_s: se(counts.n_s), n_i: se(counts.n_i), n_co: se(counts.n_co), n_ac: se(counts.n_ac) };
    SimResult { counts, raw, std_err }
}

/// Simulates sweep point `point`; point 0 is what [`simulate_pulses`] uses.
pub fn simulate_point(rates: &RateTriple, det: &DetectorPair, cfg: &SimConfig, point: u64) -> Result<SimResult> {
    cfg.validate()?;
    let mut flags = Vec::with_capacity(cfg.generated_pulses() as usize);
    for batch in 0..cfg.batch_count() {
        flags.extend(batch_flags(rates, det, cfg, point, batch)?);
    }
    tally_flags(&flags, cfg)
}

pub fn simulate_pulses(rates: &RateTriple, det: &DetectorPair, cfg: &SimConfig) -> Result<SimResult> {
    simulate_point(rates, det, cfg, 0)
}

/// Simulates every pump level of `pump_grid`; grid entry `k` is sweep point `k`.
pub fn simulate_power_sweep(
    fiber: &FiberSpec,
    pump_grid: &[PumpSpec],
    det: &DetectorPair,
    env: Environment,
    cfg: &SimConfig,
) -> Result<Vec<(PumpSpec, SimResult)>> {
    if pump_grid.is_empty() {
        return Err(Error::Config("pump grid is empty"));
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{ChannelSpec, Side};

    fn det(eta: f64, d: f64) -> DetectorPair {
        let arm =
            |side| ChannelSpec { detune: 0.3e12, bandwidth: 50e9, window: 50e-12, efficiency: eta, dark_prob: d, side };
        DetectorPair::new(arm(Side::Signal), arm(Side::Idler)).unwrap()
    }

    #[test]
    fn zero_rates_give_zero_tallies() {
        let r = simulate_pulses(&RateTriple::default(), &det(0.5, 0.0), &SimConfig::new(100_000, 3)).unwrap();
        assert_eq!(r.raw, RawTallies { pulses: 100_000, ..RawTallies::default() });
        assert_eq!(r.std_err, CountRecord::default());
    }

    #[test]
    fn single_pulse_config() {
        let r = simulate_pulses(&RateTriple::default(), &det(0.5, 0.0), &SimConfig::new(1, 0)).unwrap();
        assert_eq!(r.counts, CountRecord::default());
    }

    #[test]
    fn rejects_bad_config() {
        let rates = RateTriple::new(0.1, 0.0, 0.0);
        assert!(matches!(simulate_pulses(&rates, &det(0.5, 0.0), &SimConfig::new(0, 1)), Err(Error::Config(_))));
        let cfg = SimConfig { accidental_lag: 0, ..SimConfig::new(10, 1) };
        assert!(simulate_pulses(&rates, &det(0.5, 0.0), &cfg).is_err());
    }

    #[test]
    fn same_seed_same_result() {
        let rates = RateTriple::new(0.05, 0.02, 0.01);
        let cfg = SimConfig::new(200_001, 99);
        let a = simulate_pulses(&rates, &det(0.2, 1e-4), &cfg).unwrap();
        let b = simulate_pulses(&rates, &det(0.2, 1e-4), &cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_pulses(&rates, &det(0.2, 1e-4), &SimConfig::new(200_001, 100)).unwrap();
        assert_ne!(a.raw, c.raw);
    }

    #[test]
    fn batches_are_independent_of_order() {
        let rates = RateTriple::new(0.1, 0.05, 0.05);
        let cfg = SimConfig::new(3 * BATCH_PULSES + 17, 7);
        let forward: Vec<_> =
            (0..cfg.batch_count()).map(|b| batch_flags(&rates, &det(0.3, 0.0), &cfg, 0, b).unwrap()).collect();
        let mut reverse: Vec<_> =
            (0..cfg.batch_count()).rev().map(|b| batch_flags(&rates, &det(0.3, 0.0), &cfg, 0, b).unwrap()).collect();
        reverse.reverse();
        assert_eq!(forward, reverse);
        assert_eq!(forward.iter().map(Vec::len).sum::<usize>() as u64, cfg.generated_pulses());
    }

    #[test]
    fn std_err_matches_binomial() {
        let r = simulate_pulses(&RateTriple::new(0.2, 0.1, 0.1), &det(0.5, 1e-3), &SimConfig::new(50_000, 11)).unwrap();
        let p = r.counts.n_s;
        assert_eq!(r.std_err.n_s, libm::sqrt(p * (1.0 - p) / 50_000.0));
        assert_eq!(r.counts.n_co, r.raw.coincidences as f64 / 50_000.0);
    }

    #[test]
    fn lossless_pairs_always_coincide() {
        let r = simulate_pulses(&RateTriple::new(0.1, 0.0, 0.0), &det(1.0, 0.0), &SimConfig::new(100_000, 5)).unwrap();
        assert_eq!(r.raw.signal_clicks, r.raw.coincidences);
        assert_eq!(r.raw.idler_clicks, r.raw.coincidences);
    }

    #[test]
    fn sweep_point_zero_is_simulate_pulses() {
        let f = crate::physics::FiberKind::Dsf.spec(0.5);
        let pump = PumpSpec { peak_power: 0.05, wavelength: 1552.75, repetition_rate: 1e6, pulse_duration: 50e-12 };
        let d = det(0.2, 1e-4);
        let env = Environment { temperature: 300.0 };
        let cfg = SimConfig::new(100_000, 21);
        let sweep = simulate_power_sweep(&f, core::slice::from_ref(&pump), &d, env, &cfg).unwrap();
        let rates = generation_rates(&f, &pump, &d.signal, &d.idler, env).unwrap();
        assert_eq!(sweep[0].1, simulate_pulses(&rates, &d, &cfg).unwrap());
        assert!(simulate_power_sweep(&f, &[], &d, env, &cfg).is_err());
    }
}
