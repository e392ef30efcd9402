//! Classical relational dynamics of the parameterized free particle.
//!
//! The system lives on the constraint surface phi = p0^2 - p^2 - m^2 = 0 of
//! a four-dimensional phase space (q0, q; p0, p). Genuine observables must
//! Poisson-commute with the constraint; two independent ones are p and
//! X = q - p q0 / sqrt(p^2 + m^2), and the family
//! Q(t) = X + p t / sqrt(p^2 + m^2) is an evolving constant: each member is
//! an observable, and Q(t = q0) returns the canonical position q. The
//! bracket checker differentiates an arbitrary phase-space function
//! numerically, so the sign conventions fixed here are machine-verified
//! rather than assumed.

use crate::error::{Error, Result};

/// |phi| below this counts as on the constraint surface.
pub const ON_SHELL_TOL: f64 = 1e-9;

/// A point of the (q0, q; p0, p) phase space with the particle mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub q0: f64,
    pub q: f64,
    pub p0: f64,
    pub p: f64,
    pub mass: f64,
}

impl PhaseSpacePoint {
    pub fn new(q0: f64, q: f64, p0: f64, p: f64, mass: f64) -> Result<Self> {
        let pt = Self { q0, q, p0, p, mass };
        pt.validate()?;
        Ok(pt)
    }

    /// The on-shell point with p0 on the negative-energy branch
    /// p0 = -sqrt(p^2 + m^2), the branch on which X commutes with the
    /// constraint.
    pub fn on_negative_branch(mass: f64, q0: f64, q: f64, p: f64) -> Result<Self> {
        let p0 = -(p * p + mass * mass).sqrt();
        Self::new(q0, q, p0, p, mass)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::Invalid(format!(
                "mass must be finite and positive, got {}",
                self.mass
            )));
        }
        for (name, v) in [("q0", self.q0), ("q", self.q), ("p0", self.p0), ("p", self.p)] {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// The constraint phi = p0^2 - p^2 - m^2.
    pub fn constraint(&self) -> f64 {
        self.p0 * self.p0 - self.p * self.p - self.mass * self.mass
    }

    pub fn on_shell(&self) -> bool {
        self.constraint().abs() <= ON_SHELL_TOL
    }
}

/// The two independent Dirac observables (p, X).
pub fn dirac_observables(pt: &PhaseSpacePoint) -> Result<(f64, f64)> {
    pt.validate()?;
    let root = (pt.p * pt.p + pt.mass * pt.mass).sqrt();
    Ok((pt.p, pt.q - pt.p * pt.q0 / root))
}

/// The evolving constant Q(t) = X + p t / sqrt(p^2 + m^2); at t = q0 it
/// equals q identically.
pub fn evolving_constant_q(pt: &PhaseSpacePoint, t: f64) -> Result<f64> {
    let (p, x) = dirac_observables(pt)?;
    let root = (p * p + pt.mass * pt.mass).sqrt();
    Ok(x + p * t / root)
}

/// The Poisson bracket of the constraint with `f`, namely
/// {phi, f} = sum_i (dphi/dq_i df/dp_i - dphi/dp_i df/dq_i) over the pairs
/// (q0, p0) and (q, p). The constraint side is differentiated analytically,
/// `f` by central differences with step 1e-6 scaled per coordinate.
pub fn poisson_bracket_check(f: impl Fn(&PhaseSpacePoint) -> f64, pt: &PhaseSpacePoint) -> Result<f64> {
    pt.validate()?;
    let step = |v: f64| 1e-6 * (1.0 + v.abs());
    let df = |select: fn(&mut PhaseSpacePoint) -> &mut f64, at: f64| {
        let h = step(at);
        let mut plus = *pt;
        *select(&mut plus) += h;
        let mut minus = *pt;
        *select(&mut minus) -= h;
        (f(&plus) - f(&minus)) / (2.0 * h)
    };
    let df_dq0 = df(|z| &mut z.q0, pt.q0);
    let df_dq = df(|z| &mut z.q, pt.q);
    // dphi/dq0 = dphi/dq = 0, dphi/dp0 = 2 p0, dphi/dp = -2 p.
    Ok(-2.0 * pt.p0 * df_dq0 + 2.0 * pt.p * df_dq)
}

/// Integrates the Hamiltonian flow of the constraint for gauge parameter
/// `s` in `steps` fourth-order Runge-Kutta substeps: dq0/ds = 2 p0,
/// dq/ds = -2 p, momenta constant. The flow is the pure-gauge motion every
/// Dirac observable must survive.
pub fn constraint_flow(pt: &PhaseSpacePoint, s: f64, steps: usize) -> Result<PhaseSpacePoint> {
    pt.validate()?;
    if steps == 0 {
        return Err(Error::Invalid("the flow needs at least one step".into()));
    }
    if !s.is_finite() {
        return Err(Error::Invalid(format!("gauge parameter must be finite, got {s}")));
    }
    let h = s / steps as f64;
    let mut z = *pt;
    let rhs = |z: &PhaseSpacePoint| (2.0 * z.p0, -2.0 * z.p);
    for _ in 0..steps {
        let k1 = rhs(&z);
        let mid = PhaseSpacePoint { q0: z.q0 + 0.5 * h * k1.0, q: z.q + 0.5 * h * k1.1, ..z };
        let k2 = rhs(&mid);
        let mid2 = PhaseSpacePoint { q0: z.q0 + 0.5 * h * k2.0, q: z.q + 0.5 * h * k2.1, ..z };
        let k3 = rhs(&mid2);
        let end = PhaseSpacePoint { q0: z.q0 + h * k3.0, q: z.q + h * k3.1, ..z };
        let k4 = rhs(&end);
        z.q0 += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        z.q += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    Ok(z)
}
