//! A central spin dephased by a bath of environment spins.
//!
//! The interaction Hamiltonian is H = -sum_k g_k sigma_z (x) sigma_z^(k),
//! acting on a product initial state (a|0> + b|1>) (x) prod_k (alpha_k|0> +
//! beta_k|1>). The reduced state of the central spin keeps its populations
//! and multiplies its coherence by
//!
//! z(t) = prod_k ( |alpha_k|^2 e^{2 i g_k t} + |beta_k|^2 e^{-2 i g_k t} ),
//!
//! which decays for generic couplings and revives when the couplings are
//! commensurate. Reading the system against a spreading clock damps each
//! frequency component of z by e^{-f^2 b(T)}, turning revivals into decaying
//! echoes; `clock_corrected_coherence` evaluates that sum over all 2^N
//! branch frequencies.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clock::ClockModel;
use crate::error::{Error, Result};
use crate::hilbert::{CVector, DensityMatrix, StateVector};
use crate::numeric::golden_section_max;

type C64 = Complex64;

const NORM_TOL: f64 = 1e-12;
/// Largest bath size for operations that enumerate all 2^N branches.
const MAX_BATH_SPINS: usize = 22;
/// A revival must reach this coherence magnitude to be reported by default.
pub const DEFAULT_REVIVAL_THRESHOLD: f64 = 0.9;

/// How the bath couplings g_k are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSpec {
    /// Every spin couples with the same strength.
    Constant { g: f64 },
    /// g_k = k g0 for k = 1..N; commensurate, so the coherence revives.
    Linear { g0: f64 },
    /// Each coupling drawn uniformly from [g_min, g_max].
    Uniform { g_min: f64, g_max: f64 },
}

/// A revived coherence peak found by [`SpinBathConfig::revival_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Revival {
    pub time: f64,
    pub magnitude: f64,
}

/// Central spin plus N environment spins in a product initial state.
#[derive(Debug, Clone)]
pub struct SpinBathConfig {
    couplings: Vec<f64>,
    a: C64,
    b: C64,
    alpha: Vec<C64>,
    beta: Vec<C64>,
}

fn check_pair_norm(what: &str, x: C64, y: C64) -> Result<()> {
    let norm = x.norm_sqr() + y.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Invalid(format!(
            "{what} amplitudes must satisfy |.|^2 + |.|^2 = 1, got {norm}"
        )));
    }
    Ok(())
}

impl SpinBathConfig {
    pub fn new(
        couplings: Vec<f64>,
        a: C64,
        b: C64,
        alpha: Vec<C64>,
        beta: Vec<C64>,
    ) -> Result<Self> {
        let n = couplings.len();
        if n == 0 {
            return Err(Error::Invalid("the bath needs at least one spin".into()));
        }
        if alpha.len() != n || beta.len() != n {
            return Err(Error::Invalid(format!(
                "amplitude lists must match the {n} couplings, got {} and {}",
                alpha.len(),
                beta.len()
            )));
        }
        if couplings.iter().any(|g| !g.is_finite()) {
            return Err(Error::Invalid("couplings must be finite".into()));
        }
        check_pair_norm("system", a, b)?;
        for k in 0..n {
            check_pair_norm(&format!("environment spin {k}"), alpha[k], beta[k])?;
        }
        Ok(Self { couplings, a, b, alpha, beta })
    }

    /// Draws a configuration from a seeded generator. The draw order is
    /// fixed: first the couplings (only the uniform spec consumes draws),
    /// then weight and two phases for the system pair, then weight and two
    /// phases for each environment spin in order.
    pub fn seeded(n: usize, spec: &CouplingSpec, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("the bath needs at least one spin".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let couplings: Vec<f64> = match *spec {
            CouplingSpec::Constant { g } => vec![g; n],
            CouplingSpec::Linear { g0 } => (1..=n).map(|k| k as f64 * g0).collect(),
            CouplingSpec::Uniform { g_min, g_max } => {
                if !(g_min.is_finite() && g_max.is_finite() && g_min <= g_max) {
                    return Err(Error::Invalid(format!(
                        "uniform coupling range needs g_min <= g_max, got [{g_min}, {g_max}]"
                    )));
                }
                (0..n).map(|_| g_min + (g_max - g_min) * rng.gen::<f64>()).collect()
            }
        };
        let draw_pair = |rng: &mut ChaCha8Rng| {
            let w: f64 = rng.gen();
            let p1 = rng.gen::<f64>() * std::f64::consts::TAU;
            let p2 = rng.gen::<f64>() * std::f64::consts::TAU;
            (
                C64::from_polar(w.sqrt(), p1),
                C64::from_polar((1.0 - w).sqrt(), p2),
            )
        };
        let (a, b) = draw_pair(&mut rng);
        let mut alpha = Vec::with_capacity(n);
        let mut beta = Vec::with_capacity(n);
        for _ in 0..n {
            let (x, y) = draw_pair(&mut rng);
            alpha.push(x);
            beta.push(y);
        }
        Self::new(couplings, a, b, alpha, beta)
    }

    /// The same bath with different central-spin amplitudes.
    pub fn with_system(&self, a: C64, b: C64) -> Result<Self> {
        check_pair_norm("system", a, b)?;
        let mut out = self.clone();
        out.a = a;
        out.b = b;
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.couplings.len()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn alpha(&self) -> &[C64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[C64] {
        &self.beta
    }

    /// The coherence factor z(t). z(0) = 1 and |z| <= 1 always.
    pub fn coherence_z(&self, t: f64) -> C64 {
        let mut z = C64::new(1.0, 0.0);
        for k in 0..self.n() {
            let theta = 2.0 * self.couplings[k] * t;
            z *= C64::from_polar(self.alpha[k].norm_sqr(), theta)
                + C64::from_polar(self.beta[k].norm_sqr(), -theta);
        }
        z
    }

    /// The full (N+1)-spin state at time t, central spin as the slowest
    /// tensor factor. Dimension 2^{N+1}, so N is capped at 22.
    pub fn evolved_state(&self, t: f64) -> Result<StateVector> {
        let n = self.n();
        if n > MAX_BATH_SPINS {
            return Err(Error::Capacity(format!(
                "a full state for {n} bath spins needs dimension 2^{}; the cap is 2^{}",
                n + 1,
                MAX_BATH_SPINS + 1
            )));
        }
        let dim = 1usize << (n + 1);
        let mut amps = CVector::zeros(dim);
        for idx in 0..dim {
            let s = idx >> n;
            let mut amp = if s == 0 { self.a } else { self.b };
            // sigma_z eigenvalue is +1 for bit 0 and -1 for bit 1.
            let zs = 1.0 - 2.0 * s as f64;
            let mut energy = 0.0;
            for k in 0..n {
                let e = (idx >> (n - 1 - k)) & 1;
                amp *= if e == 0 { self.alpha[k] } else { self.beta[k] };
                energy += -self.couplings[k] * zs * (1.0 - 2.0 * e as f64);
            }
            amps[idx] = amp * C64::from_polar(1.0, -energy * t);
        }
        StateVector::new(amps)
    }

    /// The reduced 2x2 state of the central spin at time t: populations are
    /// constant, the coherence is a b* z(t).
    pub fn reduced_density(&self, t: f64) -> DensityMatrix {
        let z = self.coherence_z(t);
        let off = self.a * self.b.conj() * z;
        let mut m = crate::hilbert::CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(self.a.norm_sqr(), 0.0);
        m[(1, 1)] = C64::new(self.b.norm_sqr(), 0.0);
        m[(0, 1)] = off;
        m[(1, 0)] = off.conj();
        DensityMatrix::from_invariant_preserving(m)
    }

    /// Scans |z| on a grid, refines each interior local maximum by golden
    /// section to a bracket of width 1e-9, and reports peaks at or above
    /// `threshold`. The grid step must resolve the fastest branch frequency
    /// (at most pi / (20 max|g_k|)).
    pub fn revival_search(
        &self,
        t_max: f64,
        step: f64,
        threshold: f64,
    ) -> Result<Vec<Revival>> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Invalid(format!("t_max must be positive, got {t_max}")));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Invalid(format!("step must be positive, got {step}")));
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::Invalid(format!(
                "threshold must lie in [0, 1], got {threshold}"
            )));
        }
        let g_max = self.couplings.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if g_max == 0.0 {
            return Err(Error::Invalid(
                "all couplings vanish, so the coherence never decays or revives".into(),
            ));
        }
        let max_step = std::f64::consts::PI / (20.0 * g_max);
        if step > max_step {
            return Err(Error::Invalid(format!(
                "step {step} cannot resolve the fastest branch; need at most {max_step:.6e}"
            )));
        }
        let count = (t_max / step).floor() as usize;
        let mags: Vec<f64> = (0..=count).map(|i| self.coherence_z(i as f64 * step).norm()).collect();
        let mut out: Vec<Revival> = Vec::new();
        for i in 1..count {
            if mags[i] >= mags[i - 1] && mags[i] >= mags[i + 1] {
                let lo = (i - 1) as f64 * step;
                let hi = (i + 1) as f64 * step;
                let (time, magnitude) =
                    golden_section_max(|t| self.coherence_z(t).norm(), lo, hi, 1e-9);
                if magnitude >= threshold
                    && time > step / 2.0
                    && time < t_max - step / 2.0
                    && !out.iter().any(|r| (r.time - time).abs() < step / 2.0)
                {
                    out.push(Revival { time, magnitude });
                }
            }
        }
        Ok(out)
    }

    /// The coherence factor as read on a real clock: every branch frequency
    /// f = sum_k (+/- 2 g_k) contributes w e^{i f T} e^{-f^2 b(T)}, with w
    /// the product of branch weights |alpha_k|^2 or |beta_k|^2 and b the
    /// clock spread at the reading. With b = 0 this is exactly z(T).
    pub fn clock_corrected_coherence(&self, clock: &ClockModel, reading: f64) -> Result<C64> {
        let spread = clock.spread(reading)?;
        if spread.b == 0.0 {
            return Ok(self.coherence_z(reading));
        }
        let n = self.n();
        if n > MAX_BATH_SPINS {
            return Err(Error::Capacity(format!(
                "the corrected coherence sums 2^{n} branches; the cap is 2^{MAX_BATH_SPINS}"
            )));
        }
        let mut z = C64::new(0.0, 0.0);
        for mask in 0u64..(1u64 << n) {
            let mut w = 1.0;
            let mut f = 0.0;
            for k in 0..n {
                if (mask >> k) & 1 == 0 {
                    w *= self.alpha[k].norm_sqr();
                    f += 2.0 * self.couplings[k];
                } else {
                    w *= self.beta[k].norm_sqr();
                    f -= 2.0 * self.couplings[k];
                }
            }
            z += C64::from_polar(w * (-f * f * spread.b).exp(), f * reading);
        }
        Ok(z)
    }
}
