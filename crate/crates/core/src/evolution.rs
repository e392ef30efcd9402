//! Evolution of a quantum state read out against a real clock.
//!
//! Three mutually consistent engines are provided. `effective_density`
//! integrates the defining average: the unitarily evolved state weighted by
//! the clock's reading density. `integrate_master` solves the differential
//! form of the same dynamics,
//!
//! dT rho = -i [H, rho] - sigma(T) [H, [H, rho]],
//!
//! where sigma(T) is the clock's spread rate; the sign is fixed so that
//! energy-basis coherences decay, matching the closed-form solution below.
//! `closed_form` evaluates that solution directly in the energy eigenbasis:
//! each coherence picks up the phase e^{-i omega T} and the damping
//! e^{-omega^2 b(T)}, with omega the level splitting and b(T) the clock
//! spread. Natural units (hbar = 1) throughout.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::clock::{ClockDensity, ClockModel};
use crate::error::{Error, Result};
use crate::hilbert::{evolve_unitary, hermitize, CMatrix, DensityMatrix, HermitianOperator};
use crate::numeric::adaptive_simpson;

type C64 = Complex64;

/// Which engine produced an [`EvolutionResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    MasterEquation,
    ClosedForm,
}

/// States on a grid of clock readings.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub method: Method,
}

impl EvolutionResult {
    /// Tr(rho^2) per grid point.
    pub fn purity_series(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.purity()).collect()
    }
}

/// Tr(rho^2) per grid point of a result.
pub fn purity_series(result: &EvolutionResult) -> Vec<f64> {
    result.purity_series()
}

const QUADRATURE_TOL: f64 = 1e-10;
const WINDOW_SIGMAS: f64 = 8.0;

fn check_dims(h: &HermitianOperator, rho: &DensityMatrix) -> Result<()> {
    if h.dim() != rho.dim() {
        return Err(Error::Invalid(format!(
            "dimension mismatch: H is {}, rho is {}",
            h.dim(),
            rho.dim()
        )));
    }
    Ok(())
}

/// Applies per-coherence phase and damping factors in the eigenbasis of `h`:
/// rho_nm -> rho_nm e^{-i omega_nm phase_time} e^{-omega_nm^2 b}.
fn damp_in_eigenbasis(
    h: &HermitianOperator,
    rho: &DensityMatrix,
    b: f64,
    phase_time: f64,
) -> DensityMatrix {
    let (vals, vecs) = h.eigh();
    let d = rho.dim();
    let mut tilde = vecs.adjoint() * rho.mat() * &vecs;
    for n in 0..d {
        for m in 0..d {
            let omega = vals[n] - vals[m];
            let factor = C64::new(0.0, -omega * phase_time).exp()
                * C64::new((-omega * omega * b).exp(), 0.0);
            tilde[(n, m)] *= factor;
        }
    }
    DensityMatrix::from_invariant_preserving(&vecs * tilde * vecs.adjoint())
}

/// The clock-averaged state at reading T: the unitary evolution of `rho_s`
/// integrated against the clock's reading density and normalized to unit
/// trace. An ideal clock reduces exactly to unitary evolution.
///
/// The quadrature runs per distinct level splitting in the eigenbasis of
/// `h_s`, over a window of 8 standard deviations around the reading;
/// refinement failure surfaces as a numerical error.
pub fn effective_density(
    h_s: &HermitianOperator,
    rho_s: &DensityMatrix,
    clock: &ClockModel,
    reading: f64,
) -> Result<DensityMatrix> {
    check_dims(h_s, rho_s)?;
    let (mean, std) = match clock.density_profile(reading)? {
        ClockDensity::Delta { at } => return evolve_unitary(rho_s, h_s, at),
        ClockDensity::Gaussian { mean, std } => (mean, std),
    };
    let profile = ClockDensity::Gaussian { mean, std };
    let (lo, hi) = (mean - WINDOW_SIGMAS * std, mean + WINDOW_SIGMAS * std);

    let (vals, vecs) = h_s.eigh();
    let d = rho_s.dim();
    let mut tilde = vecs.adjoint() * rho_s.mat() * &vecs;

    // Weight per distinct splitting: integral of e^{-i omega t} against the
    // reading density.
    let mut weights: Vec<(f64, C64)> = Vec::new();
    for n in 0..d {
        for m in 0..d {
            let omega = vals[n] - vals[m];
            if !weights.iter().any(|(w, _)| (w - omega).abs() <= 1e-12 * (1.0 + omega.abs())) {
                let integral = adaptive_simpson(
                    |t| C64::new(0.0, -omega * t).exp() * profile.value(t).unwrap(),
                    lo,
                    hi,
                    QUADRATURE_TOL,
                )?;
                weights.push((omega, integral));
            }
        }
    }
    for n in 0..d {
        for m in 0..d {
            let omega = vals[n] - vals[m];
            let (_, w) = weights
                .iter()
                .find(|(x, _)| (x - omega).abs() <= 1e-12 * (1.0 + omega.abs()))
                .expect("weight computed above");
            tilde[(n, m)] *= w;
        }
    }
    let raw = &vecs * tilde * vecs.adjoint();
    let trace = raw.trace();
    if trace.re <= 0.0 || !trace.re.is_finite() {
        return Err(Error::Numerical(format!(
            "quadrature produced non-positive trace {trace}"
        )));
    }
    Ok(DensityMatrix::from_invariant_preserving(raw / C64::new(trace.re, 0.0)))
}

/// Closed-form real-clock evolution for the power-law clock with unit
/// prefactor: coherences damp as e^{-omega^2 T_P^{4/3} T^{2/3}}.
/// `planck_time` may be zero, recovering unitary evolution.
pub fn closed_form(
    h: &HermitianOperator,
    rho0: &DensityMatrix,
    planck_time: f64,
    t: f64,
) -> Result<DensityMatrix> {
    check_dims(h, rho0)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Invalid(format!("closed form needs a reading T >= 0, got {t}")));
    }
    if !(planck_time >= 0.0) || !planck_time.is_finite() {
        return Err(Error::Invalid(format!(
            "planck_time must be finite and >= 0, got {planck_time}"
        )));
    }
    let b = planck_time.powf(4.0 / 3.0) * t.powf(2.0 / 3.0);
    Ok(damp_in_eigenbasis(h, rho0, b, t))
}

/// Closed-form evolution under an arbitrary clock model: phase e^{-i omega T}
/// and damping e^{-omega^2 b(T)} with b taken from the clock's spread.
pub fn closed_form_clock(
    h: &HermitianOperator,
    rho0: &DensityMatrix,
    clock: &ClockModel,
    t: f64,
) -> Result<DensityMatrix> {
    check_dims(h, rho0)?;
    let spread = clock.spread(t)?;
    Ok(damp_in_eigenbasis(h, rho0, spread.b, t))
}

const RK_TOL: f64 = 1e-10;
const TRACE_DRIFT_TOL: f64 = 1e-10;

/// Right-hand side -i [H, rho] - sigma [H, [H, rho]].
fn master_rhs(h: &CMatrix, rho: &CMatrix, sigma: f64) -> CMatrix {
    let c1 = h * rho - rho * h;
    let c2 = h * &c1 - &c1 * h;
    c1 * C64::new(0.0, -1.0) - c2 * C64::new(sigma, 0.0)
}

fn rk_error_norm(err: &CMatrix, y: &CMatrix, y_new: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..err.nrows() {
        for j in 0..err.ncols() {
            let scale = RK_TOL + RK_TOL * y[(i, j)].norm().max(y_new[(i, j)].norm());
            worst = worst.max(err[(i, j)].norm() / scale);
        }
    }
    worst
}

/// One adaptive Dormand-Prince segment from t0 to t1.
fn rk45_segment(
    h: &CMatrix,
    sigma_of: &dyn Fn(f64) -> Result<f64>,
    mut y: CMatrix,
    t0: f64,
    t1: f64,
) -> Result<CMatrix> {
    // Dormand-Prince 5(4) tableau.
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    // Difference between the fifth- and fourth-order weights.
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    let span = t1 - t0;
    let mut t = t0;
    let mut hstep = (span / 64.0).min(span);
    let mut k1 = master_rhs(h, &y, sigma_of(t)?);
    let mut steps = 0u64;
    while t < t1 {
        if t + hstep > t1 {
            hstep = t1 - t;
        }
        let mut k = vec![k1.clone()];
        for stage in 0..6 {
            let mut arg = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let coeff = A[stage][j];
                if coeff != 0.0 {
                    arg += kj * C64::new(hstep * coeff, 0.0);
                }
            }
            let ts = t + C[stage] * hstep;
            k.push(master_rhs(h, &arg, sigma_of(ts)?));
        }
        // Fifth-order solution uses the last tableau row (first-same-as-last).
        let mut y_new = y.clone();
        for (j, kj) in k.iter().take(6).enumerate() {
            let coeff = A[5][j];
            if coeff != 0.0 {
                y_new += kj * C64::new(hstep * coeff, 0.0);
            }
        }
        let mut err = DMatrix::zeros(y.nrows(), y.ncols());
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                err += kj * C64::new(hstep * E[j], 0.0);
            }
        }
        let norm = rk_error_norm(&err, &y, &y_new);
        if norm <= 1.0 {
            t += hstep;
            y = y_new;
            k1 = k[6].clone();
        }
        let factor = if norm > 0.0 { 0.9 * norm.powf(-0.2) } else { 5.0 };
        hstep *= factor.clamp(0.2, 5.0);
        if hstep < 1e-13 * (1.0 + t.abs()) {
            return Err(Error::Numerical(format!(
                "integrator step size underflow near T = {t:.6e}; the system is too stiff for the requested tolerance"
            )));
        }
        steps += 1;
        if steps > 2_000_000 {
            return Err(Error::Numerical(
                "integrator exceeded the step budget without reaching the grid point".into(),
            ));
        }
    }
    Ok(y)
}

/// Integrates the modified master equation over a strictly increasing grid of
/// clock readings. `rho0` is the state at reading zero; the state at the
/// first grid point is obtained by the exact closed-form map for the clock's
/// spread (for the power-law clock the spread rate diverges toward zero, so
/// the grid must start at a positive reading), and adaptive Dormand-Prince
/// steps with local tolerance 1e-10 carry it across the rest of the grid. The
/// trace is checked against drift at every output.
pub fn integrate_master(
    h: &HermitianOperator,
    rho0: &DensityMatrix,
    clock: &ClockModel,
    t_grid: &[f64],
) -> Result<EvolutionResult> {
    check_dims(h, rho0)?;
    if t_grid.is_empty() {
        return Err(Error::Invalid("the reading grid must be non-empty".into()));
    }
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("the reading grid must be strictly increasing".into()));
    }
    // Validates the first reading against the clock's domain as a side effect.
    let first = closed_form_clock(h, rho0, clock, t_grid[0])?;

    let hm = h.mat().clone();
    let sigma_of = |t: f64| -> Result<f64> { Ok(clock.spread(t)?.sigma) };

    let mut states = Vec::with_capacity(t_grid.len());
    states.push(first);
    for i in 1..t_grid.len() {
        let y = states[i - 1].mat().clone();
        let y1 = rk45_segment(&hm, &sigma_of, y, t_grid[i - 1], t_grid[i])?;
        states.push(DensityMatrix::from_invariant_preserving(hermitize(&y1)));
    }
    for (i, s) in states.iter().enumerate() {
        let drift = (s.trace() - 1.0).abs();
        if drift > TRACE_DRIFT_TOL {
            return Err(Error::Numerical(format!(
                "trace drifted by {drift:.3e} at reading {}",
                t_grid[i]
            )));
        }
    }
    Ok(EvolutionResult {
        times: t_grid.to_vec(),
        states,
        method: Method::MasterEquation,
    })
}

/// Closed-form states on a grid, for the power-law clock with unit prefactor.
pub fn closed_form_series(
    h: &HermitianOperator,
    rho0: &DensityMatrix,
    planck_time: f64,
    t_grid: &[f64],
) -> Result<EvolutionResult> {
    let states = t_grid
        .iter()
        .map(|&t| closed_form(h, rho0, planck_time, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolutionResult {
        times: t_grid.to_vec(),
        states,
        method: Method::ClosedForm,
    })
}

/// Clock-averaged states on a grid, by quadrature per grid point.
pub fn effective_density_series(
    h: &HermitianOperator,
    rho0: &DensityMatrix,
    clock: &ClockModel,
    t_grid: &[f64],
) -> Result<EvolutionResult> {
    let states = t_grid
        .iter()
        .map(|&t| effective_density(h, rho0, clock, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolutionResult {
        times: t_grid.to_vec(),
        states,
        method: Method::Quadrature,
    })
}

/// Largest elementwise deviation between two states.
pub fn max_deviation(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            worst = worst.max((a.mat()[(i, j)] - b.mat()[(i, j)]).norm());
        }
    }
    worst
}
