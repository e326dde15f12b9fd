//! Linearized detector model: generation rates to per-pulse count probabilities and back.

use crate::error::{Error, Result};
use crate::physics::{non_negative, ChannelSpec, RateTriple, Side};

/// Observed per-pulse probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CountRecord {
    /// Signal singles.
    pub n_s: f64,
    /// Idler singles.
    pub n_i: f64,
    /// Coincidences within one pulse.
    pub n_co: f64,
    /// Accidental coincidences between different pulses.
    pub n_ac: f64,
}

impl CountRecord {
    pub fn fields(&self) -> [(&'static str, f64); 4] {
        [("n_s", self.n_s), ("n_i", self.n_i), ("n_co", self.n_co), ("n_ac", self.n_ac)]
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in self.fields() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ModelValidity { field, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorPair {
    pub signal: ChannelSpec,
    pub idler: ChannelSpec,
}

impl DetectorPair {
    pub fn new(signal: ChannelSpec, idler: ChannelSpec) -> Result<Self> {
        let pair = Self { signal, idler };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        self.signal.validate()?;
        self.idler.validate()?;
        if self.signal.side != Side::Signal || self.idler.side != Side::Idler {
            return Err(Error::Config("detector pair needs one signal and one idler channel"));
        }
        Ok(())
    }
}

/// Four observed probabilities from the generation rates.
///
/// N_co − N_ac = η_sη_i(R − R²) holds by construction: both share the
/// noise-product and dark-count terms.
pub fn forward_counts(rates: &RateTriple, det: &DetectorPair) -> Result<CountRecord> {
    rates.validate()?;
    det.validate()?;
    let RateTriple { pair_rate: r, stokes_rate: rs, antistokes_rate: ri } = *rates;
    let (es, ei) = (det.signal.efficiency, det.idler.efficiency);
    let (ds, di) = (det.signal.dark_prob, det.idler.dark_prob);

    let noise_products = r * rs + r * ri + rs * ri;
    let dark_cross = es * (r + rs) * di + ei * (r + ri) * ds;
    let record = CountRecord {
        n_s: es * (r + rs) + ds,
        n_i: ei * (r + ri) + di,
        n_co: es * ei * (r + noise_products) + dark_cross,
        n_ac: es * ei * (r * r + noise_products) + dark_cross,
    };
    record.validate()?;
    Ok(record)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InversionMode {
    /// Negative noise estimates are errors.
    #[default]
    Strict,
    /// Negative noise estimates are clamped to zero and flagged.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub rates: RateTriple,
    /// R_s was negative and clamped (lenient mode only).
    pub clamped_stokes: bool,
    /// R_i was negative and clamped (lenient mode only).
    pub clamped_antistokes: bool,
}

impl Inversion {
    pub fn clamped(&self) -> bool {
        self.clamped_stokes || self.clamped_antistokes
    }
}

/// Strict inversion of [`forward_counts`].
pub fn invert_counts(counts: &CountRecord, det: &DetectorPair) -> Result<RateTriple> {
    invert_counts_with(counts, det, InversionMode::Strict).map(|inv| inv.rates)
}

/// Exact algebraic inversion of the count model.
///
/// Δ = (N_co − N_ac)/(η_sη_i) equals R − R², and the root with R ≤ 1/2 is
/// taken. The noise rates follow from the singles once R is known.
pub fn invert_counts_with(counts: &CountRecord, det: &DetectorPair, mode: InversionMode) -> Result<Inversion> {
    det.validate()?;
    for (what, v) in counts.fields() {
        non_negative(what, v)?;
    }
    let (es, ei) = (det.signal.efficiency, det.idler.efficiency);
    if es == 0.0 {
        return Err(Error::DivisionDomain { vanishing: "signal efficiency" });
    }
    if ei == 0.0 {
        return Err(Error::DivisionDomain { vanishing: "idler efficiency" });
    }

    let delta = (counts.n_co - counts.n_ac) / (es * ei);
    if delta < 0.0 {
        return Err(Error::Inconsistent { reason: "accidentals exceed coincidences", delta });
    }
    if delta > 0.25 {
        return Err(Error::Inconsistent { reason: "coincidence excess exceeds model maximum", delta });
    }
    // (1 − √(1 − 4Δ))/2 rewritten to avoid cancellation at small Δ
    let pair_rate = 2.0 * delta / (1.0 + libm::sqrt(1.0 - 4.0 * delta));

    let signal_total = (counts.n_s - det.signal.dark_prob) / es;
    let idler_total = (counts.n_i - det.idler.dark_prob) / ei;
    // below this, a negative difference is rounding in the subtraction
    let slack = 64.0 * f64::EPSILON * (pair_rate + signal_total.abs() + idler_total.abs());

    let mut out = Inversion {
        rates: RateTriple { pair_rate, stokes_rate: 0.0, antistokes_rate: 0.0 },
        clamped_stokes: false,
        clamped_antistokes: false,
    };
    let noise = [("stokes_rate", signal_total - pair_rate), ("antistokes_rate", idler_total - pair_rate)];
    for (i, (which, value)) in noise.into_iter().enumerate() {
        let clamped = if value >= 0.0 {
            value
        } else if value >= -slack {
            0.0
        } else {
            match mode {
                InversionMode::Strict => return Err(Error::NegativeRate { which, value }),
                InversionMode::Lenient => {
                    if i == 0 {
                        out.clamped_stokes = true;
                    } else {
                        out.clamped_antistokes = true;
                    }
                    0.0
                }
            }
        };
        if i == 0 {
            out.rates.stokes_rate = clamped;
        } else {
            out.rates.antistokes_rate = clamped;
        }
    }
    Ok(out)
}

/// Coincidence-to-accidental ratio N_co/N_ac.
pub fn car(counts: &CountRecord) -> Result<f64> {
    if counts.n_ac == 0.0 {
        return Err(Error::DivisionDomain { vanishing: "n_ac" });
    }
    Ok(counts.n_co / counts.n_ac)
}
