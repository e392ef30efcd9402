//! Models of real clocks: the probability density of the unobservable time
//! parameter given a clock reading, the spread function b(T) and its rate
//! sigma(T) = db/dT.
//!
//! Three clocks are provided. The ideal clock reads the parameter exactly.
//! The fixed-width Gaussian clock has a constant reading uncertainty. The
//! Ng-Van Dam clock is the phenomenological best clock allowed by gravity,
//! whose accuracy degrades with the measured duration: b(T) = c T_P^{4/3}
//! T^{2/3}. Only the second moment of the reading distribution enters the
//! evolution equations, so all non-ideal clocks are realized as Gaussians
//! with variance 2 b(T).

use crate::error::{Error, Result};

/// A clock's reading distribution, parametrized by kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ClockModel {
    /// Reads the unobservable parameter exactly.
    Ideal,
    /// Constant reading uncertainty of standard deviation `width`.
    GaussianFixedWidth { width: f64 },
    /// Best-clock accuracy b(T) = prefactor * planck_time^{4/3} T^{2/3},
    /// defined for readings T > 0.
    NgVanDam { planck_time: f64, prefactor: f64 },
}

/// Second-moment data of the reading distribution at a given reading:
/// `b` is the spread (squared-time units) and `sigma` = db/dT its rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockSpread {
    pub b: f64,
    pub sigma: f64,
}

/// The density of the unobservable parameter t for a fixed clock reading.
/// An exact delta is kept symbolic so consumers can integrate analytically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClockDensity {
    Delta { at: f64 },
    Gaussian { mean: f64, std: f64 },
}

impl ClockDensity {
    /// Pointwise value; `None` for the delta, which has no density function.
    pub fn value(&self, t: f64) -> Option<f64> {
        match self {
            ClockDensity::Delta { .. } => None,
            ClockDensity::Gaussian { mean, std } => {
                let x = (t - mean) / std;
                Some((-0.5 * x * x).exp() / (std * (2.0 * std::f64::consts::PI).sqrt()))
            }
        }
    }
}

impl ClockModel {
    pub fn ideal() -> Self {
        ClockModel::Ideal
    }

    /// Fixed-width Gaussian clock; `width >= 0` (zero degenerates to ideal).
    pub fn gaussian(width: f64) -> Result<Self> {
        let clock = ClockModel::GaussianFixedWidth { width };
        clock.check()?;
        Ok(clock)
    }

    /// Ng-Van Dam clock with `planck_time > 0` and `prefactor > 0`.
    pub fn ng_van_dam(planck_time: f64, prefactor: f64) -> Result<Self> {
        let clock = ClockModel::NgVanDam { planck_time, prefactor };
        clock.check()?;
        Ok(clock)
    }

    fn check(&self) -> Result<()> {
        match *self {
            ClockModel::Ideal => Ok(()),
            ClockModel::GaussianFixedWidth { width } => {
                if !width.is_finite() || width < 0.0 {
                    Err(Error::Invalid(format!(
                        "Gaussian clock width must be finite and >= 0, got {width}"
                    )))
                } else {
                    Ok(())
                }
            }
            ClockModel::NgVanDam { planck_time, prefactor } => {
                if !planck_time.is_finite() || planck_time <= 0.0 {
                    Err(Error::Invalid(format!(
                        "Ng-Van Dam planck_time must be finite and > 0, got {planck_time}"
                    )))
                } else if !prefactor.is_finite() || prefactor <= 0.0 {
                    Err(Error::Invalid(format!(
                        "Ng-Van Dam prefactor must be finite and > 0, got {prefactor}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Spread b and rate sigma = db/dT at the given reading.
    ///
    /// Ideal: (0, 0). Gaussian width s: (s^2/2, 0). Ng-Van Dam: b = c
    /// T_P^{4/3} T^{2/3} and sigma = (2/3) c T_P^{4/3} T^{-1/3}, which
    /// diverges toward T = 0, so readings must be positive there.
    pub fn spread(&self, reading: f64) -> Result<ClockSpread> {
        self.check()?;
        match *self {
            ClockModel::Ideal => Ok(ClockSpread { b: 0.0, sigma: 0.0 }),
            ClockModel::GaussianFixedWidth { width } => Ok(ClockSpread {
                b: 0.5 * width * width,
                sigma: 0.0,
            }),
            ClockModel::NgVanDam { planck_time, prefactor } => {
                if !reading.is_finite() || reading <= 0.0 {
                    return Err(Error::Invalid(format!(
                        "Ng-Van Dam clock is defined for readings T > 0, got {reading}"
                    )));
                }
                let scale = prefactor * planck_time.powf(4.0 / 3.0);
                Ok(ClockSpread {
                    b: scale * reading.powf(2.0 / 3.0),
                    sigma: (2.0 / 3.0) * scale * reading.powf(-1.0 / 3.0),
                })
            }
        }
    }

    /// The density of the unobservable parameter for this reading. Non-ideal
    /// clocks yield a Gaussian centered on the reading with variance 2 b(T);
    /// the ideal clock (and a zero-width Gaussian) yields an exact delta.
    pub fn density_profile(&self, reading: f64) -> Result<ClockDensity> {
        let spread = self.spread(reading)?;
        if spread.b == 0.0 {
            Ok(ClockDensity::Delta { at: reading })
        } else {
            Ok(ClockDensity::Gaussian {
                mean: reading,
                std: (2.0 * spread.b).sqrt(),
            })
        }
    }
}
