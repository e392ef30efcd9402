//! When collapse and unitary evolution can no longer be told apart.
//!
//! The cavity experiment's interference signal survives real-clock
//! decoherence only up to the factor e^{-K}, with K the damping exponent of
//! the corrected evolution. Any angle measurement carries a fundamental
//! resolution bound delta_theta = l_P / R (Planck length over apparatus
//! size), which feeds a noise floor (delta_theta)^{2N} on the product
//! observable. Once the signal drops below that floor, no measurement can
//! decide whether collapse happened. At realistic scales both sides
//! underflow any float, so every comparison here runs in log space; linear
//! fields are reported alongside and simply flush to zero when out of
//! range. Natural units (hbar = 1) throughout.

use crate::chamber::ChamberConfig;
use crate::error::{Error, Result};

const LOG10_E: f64 = std::f64::consts::LOG10_E;

/// The cavity experiment plus the angular-resolution scales.
#[derive(Debug, Clone)]
pub struct UndecidabilityInput {
    pub chamber: ChamberConfig,
    /// Planck length, same length units as `radius`.
    pub l_p: f64,
    /// Apparatus (at the extreme, observable-universe) radius.
    pub radius: f64,
    /// Optional extra measurement-noise term, as log10 of its magnitude,
    /// added onto the angular floor. Default none.
    pub extra_noise_log10: Option<f64>,
}

/// The two threshold readings for the environment size at which the
/// experiment becomes undecidable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdEstimate {
    /// The published closed-form expression evaluated literally, with the
    /// duration scale read as the Planck-time parameter. Not a
    /// dimensionless combination; meaningful in one fixed unit system.
    pub formula: f64,
    /// The crossover estimate: the N at which signal and noise floor meet,
    /// using the strong-bound scaling K = N^5 / C with the dimensionless
    /// C = m^4 (gamma1 gamma2)^{8/3} mu^{8/3} / T_P^{4/3}. The bound's
    /// "much greater than" is read as equality, so this is an estimate of
    /// the onset, not a sharp threshold.
    pub crossover: f64,
    /// First integer strictly above the crossover.
    pub first_integer: f64,
}

/// Everything needed for the verdict at the configured environment size.
#[derive(Debug, Clone, PartialEq)]
pub struct UndecidabilityReport {
    /// Damping exponent K of the corrected evolution.
    pub k: f64,
    /// e^{-K}; zero when it underflows (see `signal_log10`).
    pub signal: f64,
    pub signal_log10: f64,
    /// Angular resolution bound l_P / R.
    pub delta_theta: f64,
    /// (delta_theta)^{2N} plus any extra noise; zero when it underflows.
    pub noise_floor: f64,
    pub noise_floor_log10: f64,
    pub n_threshold_formula: f64,
    pub n_threshold_crossover: f64,
    /// True when the signal sits below the noise floor (log comparison).
    pub undecidable: bool,
}

impl UndecidabilityInput {
    pub fn new(chamber: ChamberConfig, l_p: f64, radius: f64) -> Result<Self> {
        let inp = Self { chamber, l_p, radius, extra_noise_log10: None };
        inp.validate()?;
        Ok(inp)
    }

    pub fn validate(&self) -> Result<()> {
        self.chamber.validate()?;
        if !(self.l_p > 0.0) || !self.l_p.is_finite() {
            return Err(Error::Invalid(format!(
                "Planck length must be finite and positive, got {}",
                self.l_p
            )));
        }
        if !(self.radius > self.l_p) || !self.radius.is_finite() {
            return Err(Error::Invalid(format!(
                "radius must be finite and larger than the Planck length, got {}",
                self.radius
            )));
        }
        if let Some(e) = self.extra_noise_log10 {
            if !e.is_finite() {
                return Err(Error::Invalid(format!("extra noise log10 must be finite, got {e}")));
            }
        }
        Ok(())
    }
}

/// The damping exponent K = 6 N B^2 (gamma1 - gamma2)^2 T_P^{4/3} tau^{2/3}.
pub fn damping_exponent_k(cfg: &ChamberConfig) -> Result<f64> {
    cfg.validate()?;
    let dg = cfg.b_field * (cfg.gamma1 - cfg.gamma2);
    Ok(6.0 * cfg.n as f64 * dg * dg * cfg.planck_time.powf(4.0 / 3.0) * cfg.tau.powf(2.0 / 3.0))
}

/// The fundamental angular resolution delta_theta = l_P / R.
pub fn angular_bound(inp: &UndecidabilityInput) -> Result<f64> {
    inp.validate()?;
    Ok(inp.l_p / inp.radius)
}

/// log10(10^a + 10^b) without leaving log space.
fn log_add_exp10(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (1.0 + 10f64.powf(lo - hi)).log10()
}

/// The noise floor (delta_theta)^{2n} plus the optional extra term, as
/// log10. The linear value is 10 to this power and underflows to zero
/// beyond about -308.
pub fn noise_floor_log10(inp: &UndecidabilityInput, n: usize) -> Result<f64> {
    inp.validate()?;
    let base = 2.0 * n as f64 * (inp.l_p / inp.radius).log10();
    Ok(match inp.extra_noise_log10 {
        Some(extra) => log_add_exp10(base, extra),
        None => base,
    })
}

/// The noise floor as a linear value; zero when it underflows.
pub fn noise_floor(inp: &UndecidabilityInput, n: usize) -> Result<f64> {
    Ok(10f64.powf(noise_floor_log10(inp, n)?))
}

/// The undecidability verdict, compared in log space.
pub fn undecidable_from_logs(signal_log10: f64, noise_floor_log10: f64) -> bool {
    signal_log10 < noise_floor_log10
}

/// The crossover environment size from the strong-bound scaling: solves
/// N^5 / C = 2 N ln(R/l_P), i.e. N = (2 ln(R/l_P) C)^{1/4}, in log space.
/// `log_ratio` is ln(R/l_P) and `ln_c` is ln C.
pub fn crossover_n(log_ratio: f64, ln_c: f64) -> Result<f64> {
    if !(log_ratio > 0.0) {
        return Err(Error::Invalid(format!(
            "the crossover needs ln(R/l_P) > 0, got {log_ratio}"
        )));
    }
    Ok((0.25 * (std::f64::consts::LN_2 + log_ratio.ln() + ln_c)).exp())
}

/// Both threshold readings for the input's chamber parameters.
pub fn threshold_n(inp: &UndecidabilityInput) -> Result<ThresholdEstimate> {
    inp.validate()?;
    let cfg = &inp.chamber;
    let gg = (cfg.gamma1 * cfg.gamma2).abs();
    let log_ratio = (inp.radius / inp.l_p).ln();
    let (ln_m, ln_mu) = (cfg.m_env.ln(), cfg.mu.ln());
    // ln gg and ln T_P may be -inf in degenerate limits; the exponentials
    // then give 0 or infinity, which is the right reading of the estimate.
    let ln_gg = gg.ln();
    let ln_tp = cfg.planck_time.ln();

    let ln_formula = 0.25
        * (std::f64::consts::LN_2
            + log_ratio.ln()
            + (2.0 / 3.0) * (ln_m + 4.0 * ln_gg)
            + (8.0 / 3.0) * ln_mu
            - (4.0 / 3.0) * ln_tp)
        + ln_m
        + 2.0 * ln_gg;
    let formula = ln_formula.exp();

    let ln_c = 4.0 * ln_m + (8.0 / 3.0) * ln_gg + (8.0 / 3.0) * ln_mu - (4.0 / 3.0) * ln_tp;
    let crossover = crossover_n(log_ratio, ln_c)?;
    if formula.is_nan() || crossover.is_nan() {
        return Err(Error::Invalid(
            "threshold is indeterminate: both the coupling product and the Planck time degenerate"
                .into(),
        ));
    }
    let first_integer = if crossover.is_finite() { crossover.floor() + 1.0 } else { crossover };
    Ok(ThresholdEstimate { formula, crossover, first_integer })
}

/// Assembles the full verdict for the input's chamber at its configured N.
pub fn report(inp: &UndecidabilityInput) -> Result<UndecidabilityReport> {
    inp.validate()?;
    let k = damping_exponent_k(&inp.chamber)?;
    let signal_log10 = -k * LOG10_E;
    let delta_theta = angular_bound(inp)?;
    let noise_log10 = noise_floor_log10(inp, inp.chamber.n)?;
    let thresholds = threshold_n(inp)?;
    Ok(UndecidabilityReport {
        k,
        signal: (-k).exp(),
        signal_log10,
        delta_theta,
        noise_floor: 10f64.powf(noise_log10),
        noise_floor_log10: noise_log10,
        n_threshold_formula: thresholds.formula,
        n_threshold_crossover: thresholds.crossover,
        undecidable: undecidable_from_logs(signal_log10, noise_log10),
    })
}
