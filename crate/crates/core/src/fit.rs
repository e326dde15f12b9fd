//! Closed-form least squares for the pump-power and √R scaling laws, and
//! Raman gain calibration from a measured κ slope or preparation efficiency.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::physics::{bose_occupation, non_negative, positive, ChannelSpec, Environment, FiberSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

impl SeriesPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, weight: 1.0 }
    }

    pub fn weighted(x: f64, y: f64, weight: f64) -> Self {
        Self { x, y, weight }
    }

    fn validate(&self) -> Result<()> {
        non_negative("series x", self.x)?;
        positive("series weight", self.weight)?;
        if !self.y.is_finite() {
            return Err(Error::Domain { what: "series y", value: self.y });
        }
        Ok(())
    }
}

/// y = s₁x + s₂x². The linear term is read as Raman noise, the quadratic as pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit {
    pub s1: f64,
    pub s2: f64,
    /// Weighted root-mean-square residual.
    pub residual_norm: f64,
    /// Standard errors from the residual scatter; `None` with only two points.
    pub s1_std_err: Option<f64>,
    pub s2_std_err: Option<f64>,
}

impl QuadraticFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.s1 * x + self.s2 * x * x
    }
}

/// y = A√x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtFit {
    pub a: f64,
    pub residual_norm: f64,
    pub a_std_err: Option<f64>,
}

fn distinct_positive(points: &[SeriesPoint]) -> usize {
    let mut xs: Vec<f64> = points.iter().map(|p| p.x).filter(|&x| x > 0.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.len()
}

fn weighted_rms(points: &[SeriesPoint], model: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut ss, mut wsum) = (0.0, 0.0);
    for p in points {
        let r = p.y - model(p.x);
        ss += p.weight * r * r;
        wsum += p.weight;
    }
    (libm::sqrt(ss / wsum), ss)
}

/// Weighted least squares for y = s₁x + s₂x², no intercept.
pub fn fit_quadratic(points: &[SeriesPoint]) -> Result<QuadraticFit> {
    for p in points {
        p.validate()?;
    }
    let distinct = distinct_positive(points);
    if distinct < 2 {
        return Err(Error::RankDeficient { needed: 2, distinct });
    }
    // work in u = x/x_max so the normal matrix stays O(1)
    let scale = points.iter().map(|p| p.x).fold(0.0, f64::max);
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let u = p.x / scale;
        let (u2, w) = (u * u, p.weight);
        s11 += w * u2;
        s12 += w * u2 * u;
        s22 += w * u2 * u2;
        b1 += w * u * p.y;
        b2 += w * u2 * p.y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.is_nan() || det <= 0.0 {
        return Err(Error::RankDeficient { needed: 2, distinct });
    }
    let c1 = (s22 * b1 - s12 * b2) / det;
    let c2 = (s11 * b2 - s12 * b1) / det;
    let s1 = c1 / scale;
    let s2 = c2 / (scale * scale);

    let (residual_norm, ss) = weighted_rms(points, |x| s1 * x + s2 * x * x);
    let dof = points.len().saturating_sub(2);
    let (s1_std_err, s2_std_err) = if dof > 0 {
        let var = ss / dof as f64;
        (Some(libm::sqrt(var * s22 / det) / scale), Some(libm::sqrt(var * s11 / det) / (scale * scale)))
    } else {
        (None, None)
    };
    Ok(QuadraticFit { s1, s2, residual_norm, s1_std_err, s2_std_err })
}

/// Least squares for y = A√x: A = Σwy√x / Σwx.
pub fn fit_sqrt(points: &[SeriesPoint]) -> Result<SqrtFit> {
    for p in points {
        p.validate()?;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for p in points {
        num += p.weight * p.y * libm::sqrt(p.x);
        den += p.weight * p.x;
    }
    if den == 0.0 {
        return Err(Error::RankDeficient { needed: 1, distinct: 0 });
    }
    let a = num / den;
    let (residual_norm, ss) = weighted_rms(points, |x| a * libm::sqrt(x));
    let a_std_err = (points.len() > 1).then(|| libm::sqrt(ss / (points.len() - 1) as f64 / den));
    Ok(SqrtFit { a, residual_norm, a_std_err })
}

/// Slope of κ = A√R implied by the fiber: γ / (g_R·n·√(Δν·τ)).
pub fn predict_a(fiber: &FiberSpec, channel: &ChannelSpec, env: Environment) -> Result<f64> {
    fiber.validate()?;
    channel.validate()?;
    if fiber.raman_gain == 0.0 {
        return Err(Error::DivisionDomain { vanishing: "raman_gain" });
    }
    let n = bose_occupation(channel.detune, env)?;
    Ok(fiber.gamma / (fiber.raman_gain * n * libm::sqrt(channel.mode_count())))
}

/// What the Raman gain is calibrated against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    /// Fitted slope A of κ = A√R.
    Slope(f64),
    /// Preparation efficiency R/(R + R_i) at pair rate R.
    Efficiency { efficiency: f64, pair_rate: f64 },
}

impl Observation {
    pub fn slope(&self) -> Result<f64> {
        match *self {
            Observation::Slope(a) => {
                positive("observed slope", a)?;
                Ok(a)
            }
            Observation::Efficiency { efficiency, pair_rate } => {
                positive("pair_rate", pair_rate)?;
                if !(efficiency > 0.0 && efficiency < 1.0) {
                    return Err(Error::Domain {
                        what: "efficiency (must lie strictly inside (0, 1))",
                        value: efficiency,
                    });
                }
                let kappa = efficiency / (1.0 - efficiency);
                Ok(kappa / libm::sqrt(pair_rate))
            }
        }
    }
}

/// Raman gain (W⁻¹·km⁻¹) that makes [`predict_a`] reproduce `observed`.
///
/// `fiber.raman_gain` is ignored.
pub fn calibrate_raman_gain(
    observed: Observation,
    fiber: &FiberSpec,
    channel: &ChannelSpec,
    env: Environment,
) -> Result<f64> {
    let a = observed.slope()?;
    fiber.with_raman_gain(0.0).validate()?;
    channel.validate()?;
    let n = bose_occupation(channel.detune, env)?;
    Ok(fiber.gamma / (a * n * libm::sqrt(channel.mode_count())))
}
