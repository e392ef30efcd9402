//! Conditional probabilities with a physical clock.
//!
//! Two free particles live on periodic position grids: one is the system
//! under study, the other a clock whose position is read as time. Questions
//! of the form "what is the chance the system sits in this band when the
//! clock reads that band" are answered by integrating projector expectations
//! over the unobservable evolution parameter,
//!
//!   P = integral dt Tr(P_O P_T rho(t) P_T) / integral dt Tr(P_T rho(t)),
//!
//! with both projectors diagonal in position. The integral runs over a
//! finite parameter window whose adequacy is checked by doubling it and
//! demanding the answer stays put. In the limit of a heavy, sharply peaked
//! clock the conditional distribution approaches the ordinary Born
//! distribution evaluated at the reading; a light clock smears it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hilbert::{C64, CMatrix, StateVector, DensityMatrix, HermitianOperator, hermitize};

/// Largest joint dimension (system sites times clock sites) accepted.
pub const MAX_CONDITIONAL_DIM: usize = 1 << 14;
/// Largest number of trapezoid subintervals per window.
pub const MAX_TIME_STEPS: usize = 1 << 21;
/// A window integral of the clock projector below this means the clock
/// never reads the conditioned band.
pub const DENOMINATOR_FLOOR: f64 = 1e-14;
/// Allowed change of the answer under one window doubling.
pub const CONVERGENCE_TOL: f64 = 1e-6;
/// Slack around [0, 1] before a ratio is declared numerically broken.
const RANGE_SLACK: f64 = 1e-9;

/// A uniform periodic grid of `n` sites on a ring of circumference `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingGrid {
    n: usize,
    length: f64,
}

impl RingGrid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("a ring needs at least 2 sites, got {n}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Invalid(format!(
                "ring circumference must be finite and positive, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// The coordinate of site `i`, in [0, length).
    pub fn position(&self, i: usize) -> f64 {
        assert!(i < self.n, "site index {i} out of range for {} sites", self.n);
        i as f64 * self.spacing()
    }

    /// The wavenumber of discrete mode `j`, ordered like a DFT: nonnegative
    /// modes first, then the negative ones.
    fn wavenumber(&self, j: usize) -> f64 {
        let half = (self.n + 1) / 2;
        let m = if j < half { j as f64 } else { j as f64 - self.n as f64 };
        2.0 * PI * m / self.length
    }

    /// The kinetic Hamiltonian p^2 / 2m built spectrally from the ring's
    /// discrete modes. An infinite mass gives the zero operator, useful for
    /// a perfectly stationary particle.
    pub fn free_hamiltonian(&self, mass: f64) -> Result<HermitianOperator> {
        if !(mass > 0.0) || mass.is_nan() {
            return Err(Error::Invalid(format!("mass must be positive, got {mass}")));
        }
        if mass.is_infinite() {
            return HermitianOperator::new(CMatrix::zeros(self.n, self.n));
        }
        // Circulant: the entry depends only on the site offset, so one
        // profile row determines the whole matrix.
        let dx = self.spacing();
        let inv_n = 1.0 / self.n as f64;
        let profile: Vec<C64> = (0..self.n)
            .map(|d| {
                (0..self.n)
                    .map(|j| {
                        let k = self.wavenumber(j);
                        C64::from_polar(k * k / (2.0 * mass) * inv_n, k * d as f64 * dx)
                    })
                    .sum()
            })
            .collect();
        let mat = CMatrix::from_fn(self.n, self.n, |a, b| {
            profile[(a + self.n - b) % self.n]
        });
        HermitianOperator::new(hermitize(&mat))
    }

    /// A normalized Gaussian wave packet: envelope over the nearest-image
    /// displacement from `center`, phase `momentum * x` against the raw site
    /// coordinate. `sigma` is the position spread of the probability profile.
    pub fn gaussian_packet(&self, center: f64, sigma: f64, momentum: f64) -> Result<StateVector> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Invalid(format!("packet width must be positive, got {sigma}")));
        }
        for (name, v) in [("center", center), ("momentum", momentum)] {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("packet {name} must be finite, got {v}")));
            }
        }
        let amps = crate::hilbert::CVector::from_fn(self.n, |i, _| {
            let x = self.position(i);
            let mut d = (x - center).rem_euclid(self.length);
            if d > 0.5 * self.length {
                d -= self.length;
            }
            C64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), momentum * x)
        });
        StateVector::normalized(amps)
    }

    /// Marks the sites whose coordinate falls in the closed interval
    /// [lo, hi], allowing one wrap in either direction and a relative
    /// tolerance of 1e-9 of the circumference at the edges.
    pub fn interval_mask(&self, lo: f64, hi: f64) -> Result<Vec<bool>> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Invalid(format!("interval bounds must be finite, got [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::Invalid(format!("interval is reversed: [{lo}, {hi}]")));
        }
        let tol = 1e-9 * self.length;
        if hi - lo >= self.length - tol {
            return Ok(vec![true; self.n]);
        }
        Ok((0..self.n)
            .map(|i| {
                let x = self.position(i);
                [-1.0, 0.0, 1.0]
                    .iter()
                    .any(|w| {
                        let y = x + w * self.length;
                        y >= lo - tol && y <= hi + tol
                    })
            })
            .collect())
    }
}

/// One conditional-probability question: is the system inside the outcome
/// band when the clock position sits in the reading band?
///
/// `window` is the integration range of the unobservable evolution
/// parameter. When `time_step` is `None` a step resolving the joint
/// spectral spread is chosen. `doublings` successive window doublings must
/// each move the answer by at most [`CONVERGENCE_TOL`]; zero skips the
/// check for callers that manage convergence themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalQuery {
    pub o_center: f64,
    pub o_halfwidth: f64,
    pub t_center: f64,
    pub t_halfwidth: f64,
    pub window: (f64, f64),
    pub time_step: Option<f64>,
    pub doublings: u32,
}

impl ConditionalQuery {
    pub fn new(
        o_center: f64,
        o_halfwidth: f64,
        t_center: f64,
        t_halfwidth: f64,
        window: (f64, f64),
    ) -> Result<Self> {
        let query = Self {
            o_center,
            o_halfwidth,
            t_center,
            t_halfwidth,
            window,
            time_step: None,
            doublings: 1,
        };
        query.validate()?;
        Ok(query)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("outcome halfwidth", self.o_halfwidth),
            ("reading halfwidth", self.t_halfwidth),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("outcome center", self.o_center), ("reading center", self.t_center)] {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be finite, got {v}")));
            }
        }
        let (w0, w1) = self.window;
        if !w0.is_finite() || !w1.is_finite() || !(w0 < w1) {
            return Err(Error::Invalid(format!("window must be a finite range, got ({w0}, {w1})")));
        }
        if let Some(dt) = self.time_step {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
            }
        }
        if self.doublings > 20 {
            return Err(Error::Invalid(format!(
                "more than 20 window doublings is unreasonable, got {}",
                self.doublings
            )));
        }
        Ok(())
    }
}

/// A free system particle and a free clock particle on their own rings,
/// prepared once so repeated queries reuse the spectral decompositions.
#[derive(Debug, Clone)]
pub struct TwoParticleModel {
    grid_system: RingGrid,
    grid_clock: RingGrid,
    mass_system: f64,
    mass_clock: f64,
    evals_system: Vec<f64>,
    evecs_system: CMatrix,
    evals_clock: Vec<f64>,
    evecs_clock: CMatrix,
}

impl TwoParticleModel {
    pub fn new(
        grid_system: RingGrid,
        grid_clock: RingGrid,
        mass_system: f64,
        mass_clock: f64,
    ) -> Result<Self> {
        let dim = grid_system.n() * grid_clock.n();
        if dim > MAX_CONDITIONAL_DIM {
            return Err(Error::Capacity(format!(
                "joint dimension {dim} exceeds the supported {MAX_CONDITIONAL_DIM}"
            )));
        }
        let (evals_system, evecs_system) = grid_system.free_hamiltonian(mass_system)?.eigh();
        let (evals_clock, evecs_clock) = grid_clock.free_hamiltonian(mass_clock)?.eigh();
        Ok(Self {
            grid_system,
            grid_clock,
            mass_system,
            mass_clock,
            evals_system,
            evecs_system,
            evals_clock,
            evecs_clock,
        })
    }

    pub fn grid_system(&self) -> &RingGrid {
        &self.grid_system
    }

    pub fn grid_clock(&self) -> &RingGrid {
        &self.grid_clock
    }

    pub fn mass_system(&self) -> f64 {
        self.mass_system
    }

    pub fn mass_clock(&self) -> f64 {
        self.mass_clock
    }

    pub fn dim(&self) -> usize {
        self.grid_system.n() * self.grid_clock.n()
    }

    /// The joint state `system (x) clock`, system index slow.
    pub fn product_state(&self, system: &StateVector, clock: &StateVector) -> Result<StateVector> {
        if system.dim() != self.grid_system.n() || clock.dim() != self.grid_clock.n() {
            return Err(Error::Invalid(format!(
                "factor dimensions ({}, {}) do not match the grids ({}, {})",
                system.dim(),
                clock.dim(),
                self.grid_system.n(),
                self.grid_clock.n()
            )));
        }
        crate::hilbert::kron_states(system, clock)
    }

    /// Conditional probability for a pure joint state.
    pub fn conditional_probability_pure(
        &self,
        query: &ConditionalQuery,
        psi: &StateVector,
    ) -> Result<f64> {
        query.validate()?;
        if psi.dim() != self.dim() {
            return Err(Error::Invalid(format!(
                "state dimension {} does not match the model dimension {}",
                psi.dim(),
                self.dim()
            )));
        }
        let (ds, dc) = (self.grid_system.n(), self.grid_clock.n());
        let (a_tilde, b_tilde) = self.eigenbasis_projectors(query)?;
        let bt = b_tilde.transpose();

        // Amplitudes as a system-by-clock matrix, rotated into the joint
        // eigenbasis once; each window node then only needs phases.
        let coeff = CMatrix::from_fn(ds, dc, |i, k| psi.amps()[i * dc + k]);
        let coeff = self.evecs_system.adjoint() * coeff * self.evecs_clock.conjugate();

        self.with_doubling(query, |window, dt| {
            let (steps, h) = self.time_nodes(window, dt)?;
            let mut num = 0.0;
            let mut den = 0.0;
            for node in 0..=steps {
                let t = window.0 + node as f64 * h;
                let weight = if node == 0 || node == steps { 0.5 * h } else { h };
                let d = CMatrix::from_fn(ds, dc, |a, b| {
                    coeff[(a, b)]
                        * C64::from_polar(1.0, -(self.evals_system[a] + self.evals_clock[b]) * t)
                });
                let e = &d * &bt;
                den += weight * d.dotc(&e).re;
                num += weight * d.dotc(&(&a_tilde * &e)).re;
            }
            finish_ratio(num, den)
        })
    }

    /// Conditional probability for a general joint density matrix, keeping
    /// the clock projector sandwich literal. Cost grows with the cube of
    /// the joint dimension per node, so this route suits small models; the
    /// pure route is the fast path.
    pub fn conditional_probability(
        &self,
        query: &ConditionalQuery,
        rho: &DensityMatrix,
    ) -> Result<f64> {
        query.validate()?;
        let dim = self.dim();
        if rho.dim() != dim {
            return Err(Error::Invalid(format!(
                "density matrix dimension {} does not match the model dimension {dim}",
                rho.dim()
            )));
        }
        let (ds, dc) = (self.grid_system.n(), self.grid_clock.n());
        let (a_tilde, b_tilde) = self.eigenbasis_projectors(query)?;
        let rho_e = self.to_eigenbasis(rho.mat());
        let energies: Vec<f64> = (0..dim)
            .map(|r| self.evals_system[r / dc] + self.evals_clock[r % dc])
            .collect();

        self.with_doubling(query, |window, dt| {
            let (steps, h) = self.time_nodes(window, dt)?;
            let mut num = 0.0;
            let mut den = 0.0;
            let mut phases = vec![C64::new(1.0, 0.0); dim];
            for node in 0..=steps {
                let t = window.0 + node as f64 * h;
                let weight = if node == 0 || node == steps { 0.5 * h } else { h };
                for (u, energy) in phases.iter_mut().zip(&energies) {
                    *u = C64::from_polar(1.0, -energy * t);
                }
                let rho_t =
                    CMatrix::from_fn(dim, dim, |r, c| phases[r] * rho_e[(r, c)] * phases[c].conj());
                // Denominator: Tr[(I (x) B) rho(t)] over the diagonal blocks.
                let mut den_t = C64::new(0.0, 0.0);
                for i in 0..ds {
                    den_t += (&b_tilde * rho_t.view((i * dc, i * dc), (dc, dc))).trace();
                }
                // Numerator: Tr[(A (x) I) (I (x) B) rho(t) (I (x) B)], the
                // reading projector applied on both sides.
                let mut sandwich = CMatrix::zeros(dim, dim);
                for i in 0..ds {
                    for j in 0..ds {
                        let block = &b_tilde * rho_t.view((i * dc, j * dc), (dc, dc)) * &b_tilde;
                        sandwich.view_mut((i * dc, j * dc), (dc, dc)).copy_from(&block);
                    }
                }
                let mut num_t = C64::new(0.0, 0.0);
                for i in 0..ds {
                    for j in 0..ds {
                        num_t += a_tilde[(i, j)]
                            * sandwich.view((j * dc, i * dc), (dc, dc)).trace();
                    }
                }
                den += weight * den_t.re;
                num += weight * num_t.re;
            }
            finish_ratio(num, den)
        })
    }

    /// Both interval projectors rotated into the respective eigenbases.
    fn eigenbasis_projectors(&self, query: &ConditionalQuery) -> Result<(CMatrix, CMatrix)> {
        let mask_o = self.grid_system.interval_mask(
            query.o_center - query.o_halfwidth,
            query.o_center + query.o_halfwidth,
        )?;
        let mask_t = self.grid_clock.interval_mask(
            query.t_center - query.t_halfwidth,
            query.t_center + query.t_halfwidth,
        )?;
        Ok((
            masked_rotation(&self.evecs_system, &mask_o),
            masked_rotation(&self.evecs_clock, &mask_t),
        ))
    }

    fn default_time_step(&self) -> f64 {
        let spread = |v: &[f64]| {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        };
        let total = spread(&self.evals_system) + spread(&self.evals_clock);
        if total > 0.0 {
            PI / (4.0 * total)
        } else {
            f64::INFINITY
        }
    }

    /// Trapezoid node count and exact step for a window, honoring the
    /// requested step when it divides the span.
    fn time_nodes(&self, window: (f64, f64), dt: f64) -> Result<(usize, f64)> {
        let span = window.1 - window.0;
        let dt = dt.min(span / 16.0);
        let steps = (span / dt - 1e-9).ceil() as usize;
        let steps = steps.max(16);
        if steps > MAX_TIME_STEPS {
            return Err(Error::Capacity(format!(
                "window ({}, {}) at step {dt:e} needs {steps} nodes, above the supported {MAX_TIME_STEPS}",
                window.0, window.1
            )));
        }
        Ok((steps, span / steps as f64))
    }

    /// Runs `eval` on the query window, then on successively doubled
    /// windows, insisting the answer moves by at most [`CONVERGENCE_TOL`]
    /// per doubling. Returns the widest-window value.
    fn with_doubling(
        &self,
        query: &ConditionalQuery,
        eval: impl Fn((f64, f64), f64) -> Result<f64>,
    ) -> Result<f64> {
        let dt = query.time_step.unwrap_or_else(|| self.default_time_step());
        let mut window = query.window;
        let mut value = eval(window, dt)?;
        for round in 0..query.doublings {
            let mid = 0.5 * (window.0 + window.1);
            let half = window.1 - mid;
            window = (mid - 2.0 * half, mid + 2.0 * half);
            let next = eval(window, dt)?;
            if (next - value).abs() > CONVERGENCE_TOL {
                return Err(Error::Numerical(format!(
                    "window doubling {} moved the probability by {:.3e}; the window ({}, {}) is too short",
                    round + 1,
                    (next - value).abs(),
                    query.window.0,
                    query.window.1
                )));
            }
            value = next;
        }
        Ok(value)
    }

    /// Similarity-transforms a joint operator into the product eigenbasis,
    /// factor by factor, without materializing the joint rotation.
    fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        let (ds, dc) = (self.grid_system.n(), self.grid_clock.n());
        let dim = ds * dc;
        // Clock factor on every system block.
        let mut stage = CMatrix::zeros(dim, dim);
        for i in 0..ds {
            for j in 0..ds {
                let block =
                    self.evecs_clock.adjoint() * m.view((i * dc, j * dc), (dc, dc)) * &self.evecs_clock;
                stage.view_mut((i * dc, j * dc), (dc, dc)).copy_from(&block);
            }
        }
        // Swap to clock-major layout so the system factor is also blockwise.
        let permute = |src: &CMatrix, rows_fast: usize, rows_slow: usize| {
            CMatrix::from_fn(dim, dim, |r, c| {
                let (ra, rb) = (r / rows_slow, r % rows_slow);
                let (ca, cb) = (c / rows_slow, c % rows_slow);
                src[(rb * rows_fast + ra, cb * rows_fast + ca)]
            })
        };
        let swapped = permute(&stage, dc, ds);
        let mut rotated = CMatrix::zeros(dim, dim);
        for k in 0..dc {
            for l in 0..dc {
                let block =
                    self.evecs_system.adjoint() * swapped.view((k * ds, l * ds), (ds, ds)) * &self.evecs_system;
                rotated.view_mut((k * ds, l * ds), (ds, ds)).copy_from(&block);
            }
        }
        permute(&rotated, ds, dc)
    }
}

/// V^H diag(mask) V for a 0/1 site mask.
fn masked_rotation(evecs: &CMatrix, mask: &[bool]) -> CMatrix {
    let mut selected = evecs.clone();
    for (i, keep) in mask.iter().enumerate() {
        if !keep {
            selected.row_mut(i).fill(C64::new(0.0, 0.0));
        }
    }
    evecs.adjoint() * selected
}

/// Turns the window integrals into a probability, guarding against a clock
/// that never reads the band and against numerically broken ratios.
fn finish_ratio(num: f64, den: f64) -> Result<f64> {
    if den < DENOMINATOR_FLOOR {
        return Err(Error::Invalid(
            "the clock never reads the conditioned band inside the window".into(),
        ));
    }
    let p = num / den;
    if !(p >= -RANGE_SLACK && p <= 1.0 + RANGE_SLACK) {
        return Err(Error::Numerical(format!(
            "conditional probability {p} fell outside [0, 1] beyond tolerance"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{evolution_operator, evolve_state, kron};

    fn moving_clock_model() -> (TwoParticleModel, StateVector, ConditionalQuery) {
        let model = TwoParticleModel::new(
            RingGrid::new(8, 2.0 * PI).unwrap(),
            RingGrid::new(8, 2.0 * PI).unwrap(),
            3.0,
            25.0,
        )
        .unwrap();
        let system = model.grid_system().gaussian_packet(1.2, 0.6, 1.0).unwrap();
        let clock = model.grid_clock().gaussian_packet(1.0, 0.5, 25.0 * 0.02).unwrap();
        let psi = model.product_state(&system, &clock).unwrap();
        // The clock front reaches 1.8 at parameter 40; the window holds it.
        let mut query = ConditionalQuery::new(1.2, 0.8, 1.8, 0.5, (0.0, 60.0)).unwrap();
        query.doublings = 0;
        (model, psi, query)
    }

    #[test]
    fn ring_grid_validation_and_positions() {
        assert!(RingGrid::new(1, 1.0).is_err());
        assert!(RingGrid::new(8, 0.0).is_err());
        assert!(RingGrid::new(8, f64::NAN).is_err());
        let grid = RingGrid::new(4, 2.0).unwrap();
        assert_eq!(grid.spacing(), 0.5);
        assert_eq!(grid.position(3), 1.5);
    }

    #[test]
    fn free_spectrum_matches_ring_modes() {
        let grid = RingGrid::new(4, 2.0 * PI).unwrap();
        let h = grid.free_hamiltonian(1.0).unwrap();
        let (mut evals, _) = h.eigh();
        evals.sort_by(f64::total_cmp);
        // Wavenumbers 0, +-1, -2 give kinetic energies 0, 1/2, 1/2, 2.
        let expect = [0.0, 0.5, 0.5, 2.0];
        for (a, b) in evals.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        // A plane wave is an eigenvector: H e^(ikx) = k^2/2m e^(ikx).
        let n = 6;
        let grid = RingGrid::new(n, 3.0).unwrap();
        let h = grid.free_hamiltonian(2.0).unwrap();
        let k = 2.0 * PI / 3.0;
        let wave = crate::hilbert::CVector::from_fn(n, |i, _| C64::from_polar(1.0, k * grid.position(i)));
        let image = h.mat() * &wave;
        for i in 0..n {
            assert!((image[i] - wave[i] * C64::new(k * k / 4.0, 0.0)).norm() < 1e-10);
        }
        let frozen = grid.free_hamiltonian(f64::INFINITY).unwrap();
        assert!(frozen.mat().iter().all(|z| z.norm() == 0.0));
        assert!(grid.free_hamiltonian(-1.0).is_err());
        assert!(grid.free_hamiltonian(f64::NAN).is_err());
    }

    #[test]
    fn gaussian_packet_profile() {
        let grid = RingGrid::new(16, 2.0 * PI).unwrap();
        let psi = grid.gaussian_packet(grid.position(5), 0.4, 0.0).unwrap();
        let norm: f64 = psi.amps().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let peak = (0..16).max_by(|&a, &b| {
            psi.amps()[a].norm_sqr().total_cmp(&psi.amps()[b].norm_sqr())
        });
        assert_eq!(peak, Some(5));
        // Zero momentum: the profile is symmetric about the peak, across
        // the wrap as well.
        for step in 1..8usize {
            let lo = psi.amps()[(5 + 16 - step) % 16].norm_sqr();
            let hi = psi.amps()[(5 + step) % 16].norm_sqr();
            assert!((lo - hi).abs() < 1e-12);
        }
        // Centers a full circumference apart describe the same state.
        let wrapped = grid.gaussian_packet(1.0 - 2.0 * PI, 0.7, 2.0).unwrap();
        let plain = grid.gaussian_packet(1.0, 0.7, 2.0).unwrap();
        for i in 0..16 {
            assert!((wrapped.amps()[i] - plain.amps()[i]).norm() < 1e-12);
        }
        assert!(grid.gaussian_packet(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn interval_mask_closed_and_wrapping() {
        let grid = RingGrid::new(8, 2.0 * PI).unwrap();
        let dx = grid.spacing();
        // Closed: both boundary sites included.
        let mask = grid.interval_mask(dx, 2.0 * dx).unwrap();
        assert_eq!(mask, [false, true, true, false, false, false, false, false]);
        // Wrapping across zero picks up the last site.
        let mask = grid.interval_mask(-0.8, 0.1).unwrap();
        assert_eq!(mask, [true, false, false, false, false, false, false, true]);
        // A full circumference selects everything.
        let all = grid.interval_mask(0.0, 2.0 * PI).unwrap();
        assert!(all.iter().all(|&m| m));
        assert!(grid.interval_mask(1.0, 0.5).is_err());
        assert!(grid.interval_mask(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn model_capacity_and_dimension_checks() {
        let big = RingGrid::new(129, 1.0).unwrap();
        let other = RingGrid::new(128, 1.0).unwrap();
        match TwoParticleModel::new(big, other, 1.0, 1.0) {
            Err(Error::Capacity(_)) => {}
            other => panic!("expected a capacity error, got {other:?}"),
        }
        let (model, _, query) = moving_clock_model();
        let short = StateVector::basis(16, 0).unwrap();
        assert!(model.conditional_probability_pure(&query, &short).is_err());
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(model.conditional_probability(&query, &rho).is_err());
    }

    #[test]
    fn whole_spectrum_conditional_is_one() {
        let (model, psi, mut query) = moving_clock_model();
        query.o_center = PI;
        query.o_halfwidth = PI;
        let p = model.conditional_probability_pure(&query, &psi).unwrap();
        assert!((p - 1.0).abs() < 1e-9, "whole-spectrum probability {p}");
    }

    #[test]
    fn stationary_eigenstate_reads_one() {
        // An infinitely heavy system particle sits still in a position
        // eigenstate; conditioned on any successful clock reading, the
        // chance of finding it in its own band is one.
        let grid = RingGrid::new(16, 2.0 * PI).unwrap();
        let model = TwoParticleModel::new(grid, grid, f64::INFINITY, 30.0).unwrap();
        let system = StateVector::basis(16, 5).unwrap();
        let clock = model.grid_clock().gaussian_packet(1.0, 0.5, 30.0 * 0.01).unwrap();
        let psi = model.product_state(&system, &clock).unwrap();
        let x5 = model.grid_system().position(5);
        let mut query = ConditionalQuery::new(x5, 0.1, 1.5, 0.3, (0.0, 100.0)).unwrap();
        query.doublings = 3;
        let p = model.conditional_probability_pure(&query, &psi).unwrap();
        assert!((p - 1.0).abs() < 1e-6, "eigenstate probability {p}");
    }

    #[test]
    fn partition_additivity_total_and_phase() {
        let (model, psi, query) = moving_clock_model();
        let dx = model.grid_system().spacing();
        let band = |lo_site: usize, hi_site: usize| {
            let lo = lo_site as f64 * dx;
            let hi = hi_site as f64 * dx;
            let mut q = query;
            q.o_center = 0.5 * (lo + hi);
            q.o_halfwidth = 0.5 * (hi - lo) + 0.25 * dx;
            q
        };
        let quarters: Vec<f64> = (0..4)
            .map(|i| {
                model
                    .conditional_probability_pure(&band(i * 2, i * 2 + 1), &psi)
                    .unwrap()
            })
            .collect();
        let total: f64 = quarters.iter().sum();
        assert!((total - 1.0).abs() < 1e-8, "partition total {total}");
        let joined = model
            .conditional_probability_pure(&band(0, 3), &psi)
            .unwrap();
        assert!((joined - quarters[0] - quarters[1]).abs() < 1e-8);

        let spun = StateVector::normalized(psi.amps() * C64::from_polar(1.0, 1.234)).unwrap();
        let a = model.conditional_probability_pure(&band(2, 5), &psi).unwrap();
        let b = model.conditional_probability_pure(&band(2, 5), &spun).unwrap();
        assert!((a - b).abs() < 1e-10, "global phase shifted {a} to {b}");
    }

    /// Straightforward oracle: evolve the joint state with a dense unitary
    /// and integrate the literal projector sandwich on the same grid.
    fn dense_oracle(
        model: &TwoParticleModel,
        query: &ConditionalQuery,
        rho: &DensityMatrix,
    ) -> f64 {
        let (ds, dc) = (model.grid_system().n(), model.grid_clock().n());
        let hs = model.grid_system().free_hamiltonian(model.mass_system()).unwrap();
        let hc = model.grid_clock().free_hamiltonian(model.mass_clock()).unwrap();
        let h_total = HermitianOperator::new(
            kron(hs.mat(), &CMatrix::identity(dc, dc)).unwrap()
                + kron(&CMatrix::identity(ds, ds), hc.mat()).unwrap(),
        )
        .unwrap();
        let mask_o = model
            .grid_system()
            .interval_mask(query.o_center - query.o_halfwidth, query.o_center + query.o_halfwidth)
            .unwrap();
        let mask_t = model
            .grid_clock()
            .interval_mask(query.t_center - query.t_halfwidth, query.t_center + query.t_halfwidth)
            .unwrap();
        let diag = |mask: &[bool]| {
            CMatrix::from_fn(mask.len(), mask.len(), |r, c| {
                C64::new((r == c && mask[r]) as u8 as f64, 0.0)
            })
        };
        let a_full = kron(&diag(&mask_o), &CMatrix::identity(dc, dc)).unwrap();
        let b_full = kron(&CMatrix::identity(ds, ds), &diag(&mask_t)).unwrap();
        let (steps, h) = model.time_nodes(query.window, query.time_step.unwrap()).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for node in 0..=steps {
            let t = query.window.0 + node as f64 * h;
            let weight = if node == 0 || node == steps { 0.5 * h } else { h };
            let u = evolution_operator(&h_total, t);
            let rho_t = &u * rho.mat() * u.adjoint();
            den += weight * (&b_full * &rho_t).trace().re;
            num += weight * (&a_full * &b_full * &rho_t * &b_full).trace().re;
        }
        num / den
    }

    #[test]
    fn both_routes_match_a_dense_oracle() {
        let model = TwoParticleModel::new(
            RingGrid::new(4, 2.0 * PI).unwrap(),
            RingGrid::new(4, 2.0 * PI).unwrap(),
            1.5,
            8.0,
        )
        .unwrap();
        let system = model.grid_system().gaussian_packet(1.0, 0.7, 1.0).unwrap();
        let clock = model.grid_clock().gaussian_packet(0.5, 0.8, 8.0 * 0.05).unwrap();
        let psi = model.product_state(&system, &clock).unwrap();
        let mut query = ConditionalQuery::new(2.0, 1.0, 2.5, 1.2, (0.0, 12.0)).unwrap();
        query.time_step = Some(0.5);
        query.doublings = 0;

        let pure = model.conditional_probability_pure(&query, &psi).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let general = model.conditional_probability(&query, &rho).unwrap();
        let oracle = dense_oracle(&model, &query, &rho);
        assert!((pure - general).abs() < 1e-12, "routes split: {pure} vs {general}");
        assert!((pure - oracle).abs() < 1e-10, "pure {pure} vs oracle {oracle}");

        // A genuinely mixed state through the literal route.
        let other = model
            .product_state(
                &model.grid_system().gaussian_packet(4.0, 0.5, -1.0).unwrap(),
                &clock,
            )
            .unwrap();
        let mixed = DensityMatrix::new(
            rho.mat() * C64::new(0.35, 0.0) + DensityMatrix::from_pure(&other).mat() * C64::new(0.65, 0.0),
        )
        .unwrap();
        let p_mixed = model.conditional_probability(&query, &mixed).unwrap();
        let o_mixed = dense_oracle(&model, &query, &mixed);
        assert!((p_mixed - o_mixed).abs() < 1e-10, "mixed {p_mixed} vs oracle {o_mixed}");
        assert!((0.0..=1.0).contains(&p_mixed));
    }

    #[test]
    fn clock_never_reads_errors() {
        // No clock site falls in a sliver between grid points, so the
        // reading projector is exactly zero. (A reachable-but-remote band
        // is not a reliable trigger: basis-rotation dust can hold the
        // denominator marginally above the floor, and the ratio then
        // clamps to zero instead.)
        let (model, psi, mut query) = moving_clock_model();
        let dx = model.grid_clock().spacing();
        query.t_center = 2.5 * dx;
        query.t_halfwidth = 0.1 * dx;
        match model.conditional_probability_pure(&query, &psi) {
            Err(Error::Invalid(msg)) => assert!(msg.contains("never reads"), "{msg}"),
            other => panic!("expected the never-reads error, got {other:?}"),
        }
        let rho = DensityMatrix::from_pure(&psi);
        match model.conditional_probability(&query, &rho) {
            Err(Error::Invalid(msg)) => assert!(msg.contains("never reads"), "{msg}"),
            other => panic!("expected the never-reads error, got {other:?}"),
        }
    }

    #[test]
    fn window_doubling_detects_a_short_window() {
        let (model, psi, mut query) = moving_clock_model();
        // A window an order of magnitude too short for the clock transit.
        query.window = (0.0, 6.0);
        query.doublings = 2;
        match model.conditional_probability_pure(&query, &psi) {
            Err(Error::Numerical(msg)) => assert!(msg.contains("doubling"), "{msg}"),
            other => panic!("expected a convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn heavy_clock_approaches_the_born_distribution() {
        // The reading-band setup whose full mass ladder the acceptance
        // suite pins: here only the two ends, light against heavy.
        let grid = RingGrid::new(16, 2.0 * PI).unwrap();
        let dx = grid.spacing();
        let tv_for = |mass_clock: f64| {
            let model = TwoParticleModel::new(grid, grid, 400.0, mass_clock).unwrap();
            let system = grid.gaussian_packet(PI / 2.0, 0.7, 2.0).unwrap();
            let clock = grid.gaussian_packet(1.0, 0.55, mass_clock * 0.005).unwrap();
            let psi = model.product_state(&system, &clock).unwrap();
            let born_state = evolve_state(
                &system,
                &grid.free_hamiltonian(400.0).unwrap(),
                400.0,
            )
            .unwrap();
            let mut tv = 0.0;
            for band in 0..4usize {
                let lo = band as f64 * 4.0 * dx;
                let hi = (band as f64 * 4.0 + 3.0) * dx;
                let mut query = ConditionalQuery::new(
                    0.5 * (lo + hi),
                    0.5 * (hi - lo) + 0.25 * dx,
                    3.0,
                    0.25,
                    (0.0, 480.0),
                )
                .unwrap();
                query.time_step = Some(0.25);
                query.doublings = 0;
                let conditional = model.conditional_probability_pure(&query, &psi).unwrap();
                let mask = grid.interval_mask(lo, hi).unwrap();
                let born: f64 = born_state
                    .amps()
                    .iter()
                    .zip(&mask)
                    .filter(|(_, &m)| m)
                    .map(|(z, _)| z.norm_sqr())
                    .sum();
                tv += 0.5 * (conditional - born).abs();
            }
            tv
        };
        let light = tv_for(1.0);
        let heavy = tv_for(1000.0);
        assert!(
            light - heavy > 0.2,
            "expected a much better reading from the heavy clock: {light} vs {heavy}"
        );
    }

    #[test]
    fn query_validation_errors() {
        assert!(ConditionalQuery::new(0.0, 0.0, 0.0, 1.0, (0.0, 1.0)).is_err());
        assert!(ConditionalQuery::new(0.0, 1.0, 0.0, -1.0, (0.0, 1.0)).is_err());
        assert!(ConditionalQuery::new(0.0, 1.0, 0.0, 1.0, (2.0, 1.0)).is_err());
        assert!(ConditionalQuery::new(f64::NAN, 1.0, 0.0, 1.0, (0.0, 1.0)).is_err());
        let mut query = ConditionalQuery::new(0.0, 1.0, 0.0, 1.0, (0.0, 1.0)).unwrap();
        query.time_step = Some(0.0);
        assert!(query.validate().is_err());
        query.time_step = Some(1e-3);
        query.doublings = 21;
        assert!(query.validate().is_err());

        let (model, psi, mut query) = moving_clock_model();
        query.time_step = Some(1e-8);
        match model.conditional_probability_pure(&query, &psi) {
            Err(Error::Capacity(_)) => {}
            other => panic!("expected a capacity error for the node count, got {other:?}"),
        }
    }
}
