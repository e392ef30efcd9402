//! Simulation library for quantum evolution timed by realistic clocks.
//!
//! A quantum system read out against a physical clock, rather than the ideal
//! parameter time of textbook mechanics, accumulates a fundamental loss of
//! coherence: the clock's reading is a distribution over parameter time, and
//! averaging unitary evolution over that distribution damps energy-basis
//! off-diagonals. This crate implements that mechanism end to end:
//!
//! * [`hilbert`]: dense complex state/operator primitives, tensor products,
//!   partial traces, Hermitian eigendecomposition, unitary evolution;
//! * [`clock`]: clock-reading distributions (ideal, Gaussian, power-law
//!   quantum-limit spread) and their second-moment expansions;
//! * [`evolution`]: the clock-averaged effective density matrix, the modified
//!   master equation it obeys, and its closed-form solution;
//! * [`zurek`]: a spin coupled to a bath of environment spins, with exact
//!   coherence product formulas, revival search, and clock-corrected coherence;
//! * [`chamber`]: a cavity model of repeated spin crossings with a global
//!   parity observable that witnesses surviving superposition;
//! * [`undecidability`]: log-space comparison of that witness against the
//!   rotation-noise floor of any finite apparatus;
//! * [`relational`]: constrained-mechanics observables and conditional
//!   probabilities of one subsystem given the reading of another.

pub mod chamber;
pub mod clock;
pub mod conditional;
pub mod error;
pub mod evolution;
pub mod hilbert;
mod numeric;
pub mod relational;
pub mod undecidability;
pub mod zurek;

pub use error::{Error, Result};
