//! A cavity experiment that distinguishes unitary evolution from collapse.
//!
//! A central spin-1/2 particle sits in a magnetic field B while N
//! environment spins fly past it one by one, each interacting for a flight
//! time tau through a Heisenberg coupling f_k on top of the two Zeeman
//! terms. The global observable M, a product of sigma_x over every spin,
//! has zero expectation on any collapsed (z-diagonal) state but not on the
//! unitarily evolved one, so measuring it decides between the two. The
//! closed-form expectation values below follow the pair-frequency
//! Omega_k = sqrt(4 f_k^2 + B^2 (gamma1 - gamma2)^2); the clock-corrected
//! variant adds per-branch damping factors controlled by
//! theta = (3/2) T_P^{4/3} tau^{2/3}. Natural units (hbar = 1) throughout.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{kron, sigma_x, sigma_y, sigma_z, CMatrix, HermitianOperator};

type C64 = Complex64;

const NORM_TOL: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-10;
/// Largest environment size for which the product observable is built as an
/// explicit matrix; the closed-form expectations have no such cap.
const MAX_EXPLICIT_SPINS: usize = 22;
/// Default reading of "much smaller than" in the coupling condition.
pub const DEFAULT_RATIO_THRESHOLD: f64 = 0.1;

/// Parameters of the cavity experiment. Fields are public; every operation
/// validates the full set first.
#[derive(Debug, Clone)]
pub struct ChamberConfig {
    /// Number of environment spins N >= 1.
    pub n: usize,
    /// Magnetic field B inside the cavity.
    pub b_field: f64,
    /// Magnetic moment of the central spin.
    pub gamma1: f64,
    /// Magnetic moment of each environment spin.
    pub gamma2: f64,
    /// Heisenberg coupling strength per environment spin, length N.
    pub f_k: Vec<f64>,
    /// Flight time of one environment spin through the cavity.
    pub tau: f64,
    /// Total duration of the experiment.
    pub t_total: f64,
    /// Mass of one environment particle (enters only the feasibility
    /// dispersion estimate).
    pub m_env: f64,
    /// Impact parameter of the flyby (enters only feasibility).
    pub d: f64,
    /// Magnetic constant in the dipole interaction estimate (enters only
    /// feasibility).
    pub mu: f64,
    /// Planck-time parameter of the clock corrections; zero switches the
    /// corrections off.
    pub planck_time: f64,
    /// Central-spin amplitudes, |a|^2 + |b|^2 = 1.
    pub a: C64,
    pub b: C64,
    /// Environment amplitudes per spin, |alpha_k|^2 + |beta_k|^2 = 1.
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
}

/// One feasibility inequality: the compared sides and a margin that is
/// larger than 1 exactly when the condition holds with room to spare.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityCondition {
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// The four feasibility conditions of the experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    /// Interaction strength: the accumulated dipole phase mu gamma1 gamma2
    /// tau / d^3 must exceed 1.
    pub cond_a: FeasibilityCondition,
    /// Collimation: the free dispersion scale sqrt(T/m) compared against a
    /// detector aperture; informational when no aperture is given.
    pub cond_b: FeasibilityCondition,
    /// Weak residual coupling: max |f_k| must stay well below the
    /// differential Zeeman splitting |B (gamma1 - gamma2)|.
    pub cond_c: FeasibilityCondition,
    /// Remaining interference visibility e^{-K} from the clock corrections;
    /// informational.
    pub cond_d: FeasibilityCondition,
}

impl ChamberConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invalid("the chamber needs at least one environment spin".into()));
        }
        if self.f_k.len() != self.n || self.alpha.len() != self.n || self.beta.len() != self.n {
            return Err(Error::Invalid(format!(
                "per-spin lists must have length N = {}; got f_k {}, alpha {}, beta {}",
                self.n,
                self.f_k.len(),
                self.alpha.len(),
                self.beta.len()
            )));
        }
        for (name, v) in [
            ("tau", self.tau),
            ("t_total", self.t_total),
            ("m_env", self.m_env),
            ("d", self.d),
            ("mu", self.mu),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if !(self.planck_time >= 0.0) || !self.planck_time.is_finite() {
            return Err(Error::Invalid(format!(
                "planck_time must be finite and >= 0, got {}",
                self.planck_time
            )));
        }
        for (name, v) in [
            ("b_field", self.b_field),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ] {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if self.f_k.iter().any(|f| !f.is_finite()) {
            return Err(Error::Invalid("f_k entries must be finite".into()));
        }
        let sys = self.a.norm_sqr() + self.b.norm_sqr();
        if (sys - 1.0).abs() > NORM_TOL {
            return Err(Error::Invalid(format!(
                "central-spin amplitudes must satisfy |a|^2 + |b|^2 = 1, got {sys}"
            )));
        }
        for k in 0..self.n {
            let norm = self.alpha[k].norm_sqr() + self.beta[k].norm_sqr();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::Invalid(format!(
                    "environment spin {k} amplitudes must be normalized, got {norm}"
                )));
            }
        }
        Ok(())
    }

    /// The pair frequency Omega_k = sqrt(4 f_k^2 + B^2 (gamma1 - gamma2)^2).
    pub fn omega_k(&self, k: usize) -> Result<f64> {
        self.validate()?;
        let f = *self
            .f_k
            .get(k)
            .ok_or_else(|| Error::Invalid(format!("spin index {k} out of range for N = {}", self.n)))?;
        let dg = self.b_field * (self.gamma1 - self.gamma2);
        Ok((4.0 * f * f + dg * dg).sqrt())
    }

    /// The damping parameter theta = (3/2) T_P^{4/3} tau^{2/3}.
    pub fn theta(&self) -> f64 {
        1.5 * self.planck_time.powf(4.0 / 3.0) * self.tau.powf(2.0 / 3.0)
    }

    /// The two-spin Hamiltonian for the k-th flyby: both Zeeman terms plus
    /// the Heisenberg coupling, with spin operators sigma/2. The central
    /// spin is the slow tensor factor.
    pub fn build_hamiltonian(&self, k: usize) -> Result<HermitianOperator> {
        self.validate()?;
        let f = *self
            .f_k
            .get(k)
            .ok_or_else(|| Error::Invalid(format!("spin index {k} out of range for N = {}", self.n)))?;
        let id = CMatrix::identity(2, 2);
        let half = C64::new(0.5, 0.0);
        let mut h = kron(&(sigma_z() * half), &id)? * C64::new(self.gamma1 * self.b_field, 0.0);
        h += kron(&id, &(sigma_z() * half))? * C64::new(self.gamma2 * self.b_field, 0.0);
        let quarter = C64::new(0.25 * f, 0.0);
        h += kron(&sigma_x(), &sigma_x())? * quarter;
        h += kron(&sigma_y(), &sigma_y())? * quarter;
        h += kron(&sigma_z(), &sigma_z())? * quarter;
        HermitianOperator::new(h)
    }

    /// The global product observable: sigma_x on the central spin and on
    /// every environment spin, eigenvalues +/-1. Explicit matrix, so N is
    /// capped at 22.
    pub fn despagnat_m(&self) -> Result<HermitianOperator> {
        self.validate()?;
        if self.n > MAX_EXPLICIT_SPINS {
            return Err(Error::Capacity(format!(
                "an explicit product observable for N = {} needs dimension 2^{}; the cap is 2^{}",
                self.n,
                self.n + 1,
                MAX_EXPLICIT_SPINS + 1
            )));
        }
        let mut m = sigma_x();
        for _ in 0..self.n {
            m = kron(&m, &sigma_x())?;
        }
        HermitianOperator::new(m)
    }

    /// Closed-form expectation of the product observable after unitary
    /// evolution: a b* prod_k (alpha_k beta_k* + alpha_k* beta_k)
    /// e^{-2 i Omega_k tau} plus the conjugate term. The sum is checked to
    /// be real.
    pub fn expectation_m_unitary(&self) -> Result<f64> {
        self.validate()?;
        let mut term1 = self.a * self.b.conj();
        for k in 0..self.n {
            let bracket = self.alpha[k] * self.beta[k].conj() + self.alpha[k].conj() * self.beta[k];
            let omega = self.omega_k(k)?;
            term1 *= bracket * C64::from_polar(1.0, -2.0 * omega * self.tau);
        }
        let mut term2 = self.a.conj() * self.b;
        for k in 0..self.n {
            let bracket = self.alpha[k] * self.beta[k].conj() + self.alpha[k].conj() * self.beta[k];
            let omega = self.omega_k(k)?;
            term2 *= bracket * C64::from_polar(1.0, 2.0 * omega * self.tau);
        }
        let total = term1 + term2;
        if total.im.abs() > IMAG_TOL {
            return Err(Error::Numerical(format!(
                "closed-form expectation has imaginary residue {}",
                total.im
            )));
        }
        Ok(total.re)
    }

    /// The same expectation with real-clock corrections: an overall damping
    /// e^{-4 N B^2 (gamma1-gamma2)^2 theta}, per-spin bracket damping
    /// e^{-16 B^2 gamma1 gamma2 theta} on one branch of each term, and the
    /// collective phase e^{-+ i 2 N Omega T} with Omega = B (gamma1-gamma2)
    /// and T the experiment duration. Evaluated term by term as written;
    /// the asymmetric bracket damping makes the two terms exact conjugates.
    pub fn expectation_m_corrected(&self) -> Result<f64> {
        self.validate()?;
        let theta = self.theta();
        let dg = self.b_field * (self.gamma1 - self.gamma2);
        let omega = dg;
        let nf = self.n as f64;
        let x1 = 4.0 * nf * dg * dg * theta;
        let x2 = 16.0 * self.b_field * self.b_field * self.gamma1 * self.gamma2 * theta;
        let phase = 2.0 * nf * omega * self.t_total;
        let damp2 = C64::new((-x2).exp(), 0.0);

        let mut term1 =
            self.a * self.b.conj() * C64::from_polar((-x1).exp(), -phase);
        for k in 0..self.n {
            term1 *= self.alpha[k] * self.beta[k].conj() * damp2
                + self.alpha[k].conj() * self.beta[k];
        }
        let mut term2 = self.a.conj() * self.b * C64::from_polar((-x1).exp(), phase);
        for k in 0..self.n {
            term2 *= self.alpha[k] * self.beta[k].conj()
                + self.alpha[k].conj() * self.beta[k] * damp2;
        }
        let total = term1 + term2;
        if total.im.abs() > IMAG_TOL {
            return Err(Error::Numerical(format!(
                "corrected expectation has imaginary residue {}",
                total.im
            )));
        }
        Ok(total.re)
    }

    /// Feasibility with no aperture bound and the default coupling-ratio
    /// threshold.
    pub fn feasibility(&self) -> Result<FeasibilityReport> {
        self.feasibility_with(None, DEFAULT_RATIO_THRESHOLD)
    }

    /// Evaluates the four conditions. `aperture` bounds the dispersion
    /// scale sqrt(T/m) when given; `ratio_threshold` is the reading of
    /// "much smaller" in the coupling condition.
    pub fn feasibility_with(
        &self,
        aperture: Option<f64>,
        ratio_threshold: f64,
    ) -> Result<FeasibilityReport> {
        self.validate()?;
        if !(ratio_threshold > 0.0) || !ratio_threshold.is_finite() {
            return Err(Error::Invalid(format!(
                "ratio_threshold must be finite and positive, got {ratio_threshold}"
            )));
        }
        if let Some(ap) = aperture {
            if !(ap > 0.0) || !ap.is_finite() {
                return Err(Error::Invalid(format!(
                    "aperture must be finite and positive, got {ap}"
                )));
            }
        }

        let lhs_a = self.mu * self.gamma1 * self.gamma2 * self.tau / self.d.powi(3);
        let cond_a = FeasibilityCondition {
            satisfied: lhs_a > 1.0,
            lhs: lhs_a,
            rhs: 1.0,
            margin: lhs_a,
        };

        let lhs_b = (self.t_total / self.m_env).sqrt();
        let cond_b = match aperture {
            Some(ap) => FeasibilityCondition {
                satisfied: lhs_b <= ap,
                lhs: lhs_b,
                rhs: ap,
                margin: ap / lhs_b,
            },
            None => FeasibilityCondition {
                satisfied: true,
                lhs: lhs_b,
                rhs: f64::INFINITY,
                margin: f64::INFINITY,
            },
        };

        let f_max = self.f_k.iter().fold(0.0f64, |m, f| m.max(f.abs()));
        let split = (self.b_field * (self.gamma1 - self.gamma2)).abs();
        let lhs_c = if f_max == 0.0 { 0.0 } else { f_max / split };
        let cond_c = FeasibilityCondition {
            satisfied: lhs_c <= ratio_threshold,
            lhs: lhs_c,
            rhs: ratio_threshold,
            margin: ratio_threshold / lhs_c,
        };

        let dg = self.b_field * (self.gamma1 - self.gamma2);
        let k_exp = 6.0 * self.n as f64 * dg * dg
            * self.planck_time.powf(4.0 / 3.0)
            * self.tau.powf(2.0 / 3.0);
        let lhs_d = (-k_exp).exp();
        let cond_d = FeasibilityCondition {
            satisfied: true,
            lhs: lhs_d,
            rhs: 1.0,
            margin: lhs_d,
        };

        Ok(FeasibilityReport { cond_a, cond_b, cond_c, cond_d })
    }
}
