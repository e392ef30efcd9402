//! Dense complex Hilbert-space primitives: states, density matrices,
//! Hermitian operators, tensor products, partial traces and unitary evolution.
//!
//! Tensor index convention: in `kron(a, b)` the left factor is the slow
//! (most significant) index, so basis state `i` of `a` combined with `j` of
//! `b` lands at `i * dim_b + j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest total dimension a tensor product is allowed to produce.
pub const MAX_TOTAL_DIM: usize = 1 << 24;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue of a density matrix (round-off slack).
pub const PSD_TOL: f64 = -1e-10;
pub const NORM_TOL: f64 = 1e-12;
pub const IDEMPOTENCY_TOL: f64 = 1e-10;
/// Largest imaginary residue tolerated when an expectation value should be real.
pub const IMAG_TOL: f64 = 1e-10;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)])
}

fn hermiticity_residue(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Symmetrizes away round-off: returns (m + m^dagger)/2.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// A normalized pure state.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: CVector,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized to 1 within 1e-12.
    pub fn new(amps: CVector) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Invalid("state vector must have dimension >= 1".into()));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Invalid(format!(
                "state vector norm {norm:.3e} deviates from 1 beyond {NORM_TOL:.0e}"
            )));
        }
        Ok(Self { amps })
    }

    /// Normalizes raw amplitudes; fails on the zero vector.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Invalid("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self { amps: amps / C64::new(norm, 0.0) })
    }

    /// Basis state `index` of a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Invalid(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &CVector {
        &self.amps
    }
}

/// A trace-one positive-semidefinite Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Full validation: Hermiticity within 1e-12, unit trace within 1e-10,
    /// and positive semidefiniteness (smallest eigenvalue >= -1e-10). The
    /// last check diagonalizes the matrix, so it costs O(dim^3); prefer
    /// [`DensityMatrix::from_pure`] for large pure states, where positivity
    /// holds by construction.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::Invalid("density matrix must be square and non-empty".into()));
        }
        let res = hermiticity_residue(&mat);
        if res > HERMITICITY_TOL {
            return Err(Error::Invalid(format!(
                "density matrix hermiticity residue {res:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Invalid(format!("density matrix trace {tr} deviates from 1")));
        }
        let dm = Self { mat: hermitize(&mat) };
        let min = dm.min_eigenvalue();
        if min < PSD_TOL {
            return Err(Error::Invalid(format!(
                "density matrix has eigenvalue {min:.3e} below {PSD_TOL:.0e}"
            )));
       }
        Ok(dm)
    }

    /// The projector |psi><psi|; positive semidefinite by construction.
    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amps();
        let mat = a * a.adjoint();
        Self { mat: hermitize(&mat) }
    }

    /// Maximally mixed state I/dim.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be >= 1".into()));
        }
        Ok(Self { mat: identity(dim) / C64::new(dim as f64, 0.0) })
    }

    /// Wraps a matrix produced by an operation that preserves the density
    /// matrix invariants exactly (unitary conjugation, convex mixtures,
    /// partial traces); only round-off symmetrization is applied.
    pub(crate) fn from_invariant_preserving(mat: CMatrix) -> Self {
        Self { mat: hermitize(&mat) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Tr(rho^2); 1 for pure states, 1/dim for the maximally mixed state.
    pub fn purity(&self) -> f64 {
        let mut p = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                p += self.mat[(i, j)] * self.mat[(j, i)];
            }
        }
        p.re
    }

    /// Smallest eigenvalue, by full diagonalization.
    pub fn min_eigenvalue(&self) -> f64 {
        let eig = self.mat.clone().symmetric_eigen();
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// A Hermitian operator (observable or Hamiltonian).
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::Invalid("operator must be square and non-empty".into()));
        }
        let res = hermiticity_residue(&mat);
        if res > HERMITICITY_TOL {
            return Err(Error::Invalid(format!(
                "operator hermiticity residue {res:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )));
        }
        Ok(Self { mat: hermitize(&mat) })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    /// Real eigenvalues and the unitary of column eigenvectors.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        let eig = self.mat.clone().symmetric_eigen();
        (eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors)
    }
}

/// An orthogonal projector: Hermitian and idempotent within 1e-10.
#[derive(Debug, Clone)]
pub struct Projector {
    mat: CMatrix,
}

impl Projector {
    pub fn new(mat: CMatrix) -> Result<Self> {
        let op = HermitianOperator::new(mat)?;
        let mat = op.mat;
        let sq = &mat * &mat;
        let mut worst = 0.0f64;
        for i in 0..mat.nrows() {
            for j in 0..mat.ncols() {
                worst = worst.max((sq[(i, j)] - mat[(i, j)]).norm());
            }
        }
        if worst > IDEMPOTENCY_TOL {
            return Err(Error::Invalid(format!(
                "projector idempotency residue {worst:.3e} exceeds {IDEMPOTENCY_TOL:.0e}"
            )));
        }
        Ok(Self { mat })
    }

    /// Diagonal 0/1 projector from a membership mask.
    pub fn from_mask(mask: &[bool]) -> Result<Self> {
        if mask.is_empty() {
            return Err(Error::Invalid("projector mask must be non-empty".into()));
        }
        let mut mat = CMatrix::zeros(mask.len(), mask.len());
        for (i, &m) in mask.iter().enumerate() {
            if m {
                mat[(i, i)] = C64::new(1.0, 0.0);
            }
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }
}

fn check_capacity(dim: usize, what: &str) -> Result<()> {
    if dim > MAX_TOTAL_DIM {
        return Err(Error::Capacity(format!(
            "{what} dimension {dim} exceeds the limit {MAX_TOTAL_DIM}"
        )));
    }
    Ok(())
}

/// Kronecker product of matrices, left factor slow.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_capacity(a.nrows().saturating_mul(b.nrows()), "tensor product")?;
    Ok(a.kronecker(b))
}

/// Kronecker product of state vectors, left factor slow.
pub fn kron_states(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    check_capacity(a.dim().saturating_mul(b.dim()), "tensor product")?;
    let (na, nb) = (a.dim(), b.dim());
    let mut amps = CVector::zeros(na * nb);
    for i in 0..na {
        for j in 0..nb {
            amps[i * nb + j] = a.amps()[i] * b.amps()[j];
        }
    }
    StateVector::new(amps)
}

/// Traces out every factor not listed in `keep`.
///
/// `dims` are the factor dimensions, slow to fast, and must multiply to the
/// dimension of `rho`; `keep` lists factor positions to retain, strictly
/// increasing. The kept factors stay in their original order.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != rho.dim() {
        return Err(Error::Invalid(format!(
            "factor dimensions {dims:?} do not multiply to the matrix dimension {}",
            rho.dim()
        )));
    }
    if keep.is_empty() {
        return Err(Error::Invalid("must keep at least one factor".into()));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || *keep.last().unwrap() >= dims.len() {
        return Err(Error::Invalid(format!(
            "keep list {keep:?} must be strictly increasing factor positions below {}",
            dims.len()
        )));
    }

    let strides: Vec<usize> = (0..dims.len())
        .map(|f| dims[f + 1..].iter().product())
        .collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !keep.contains(f)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&f| dims[f]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&f| dims[f]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // Base offset of a flattened multi-index over the given factors.
    let offset = |multi: usize, order: &[usize], order_dims: &[usize]| -> usize {
        let mut rem = multi;
        let mut off = 0;
        for (pos, &f) in order.iter().enumerate().rev() {
            let d = order_dims[pos];
            off += (rem % d) * strides[f];
            rem /= d;
        }
        off
    };

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        let row_base = offset(r, keep, &kept_dims);
        for c in 0..out_dim {
            let col_base = offset(c, keep, &kept_dims);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..traced_total {
                let tb = offset(t, &traced, &traced_dims);
                acc += rho.mat()[(row_base + tb, col_base + tb)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DensityMatrix::from_invariant_preserving(out))
}

/// The unitary exp(-i H t), via eigendecomposition of H.
pub fn evolution_operator(h: &HermitianOperator, t: f64) -> CMatrix {
    let (vals, vecs) = h.eigh();
    let mut phased = vecs.clone();
    for (j, w) in vals.iter().enumerate() {
        let ph = C64::new(0.0, -w * t).exp();
        for i in 0..phased.nrows() {
            phased[(i, j)] *= ph;
        }
    }
    phased * vecs.adjoint()
}

/// Schroedinger evolution of a density matrix: U rho U^dagger.
pub fn evolve_unitary(rho: &DensityMatrix, h: &HermitianOperator, t: f64) -> Result<DensityMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::Invalid(format!(
            "dimension mismatch: rho is {}, H is {}",
            rho.dim(),
            h.dim()
        )));
    }
    let u = evolution_operator(h, t);
    Ok(DensityMatrix::from_invariant_preserving(&u * rho.mat() * u.adjoint()))
}

/// Schroedinger evolution of a pure state: exp(-i H t) |psi>.
pub fn evolve_state(psi: &StateVector, h: &HermitianOperator, t: f64) -> Result<StateVector> {
    if psi.dim() != h.dim() {
        return Err(Error::Invalid(format!(
            "dimension mismatch: psi is {}, H is {}",
            psi.dim(),
            h.dim()
        )));
    }
    let u = evolution_operator(h, t);
    StateVector::normalized(&u * psi.amps())
}

/// Tr(A rho) for Hermitian A; errors if the imaginary residue exceeds 1e-10.
pub fn expectation(a: &HermitianOperator, rho: &DensityMatrix) -> Result<f64> {
    if a.dim() != rho.dim() {
        return Err(Error::Invalid(format!(
            "dimension mismatch: A is {}, rho is {}",
            a.dim(),
            rho.dim()
        )));
    }
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            tr += a.mat()[(i, j)] * rho.mat()[(j, i)];
        }
    }
    if tr.im.abs() > IMAG_TOL {
        return Err(Error::Numerical(format!(
            "expectation of a Hermitian operator has imaginary residue {:.3e}",
            tr.im
        )));
    }
    Ok(tr.re)
}

/// <psi| A |psi>; errors if the imaginary residue exceeds 1e-10.
pub fn expectation_state(a: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    if a.dim() != psi.dim() {
        return Err(Error::Invalid(format!(
            "dimension mismatch: A is {}, psi is {}",
            a.dim(),
            psi.dim()
        )));
    }
    let v = a.mat() * psi.amps();
    let val = psi.amps().dotc(&v);
    if val.im.abs() > IMAG_TOL {
        return Err(Error::Numerical(format!(
            "expectation of a Hermitian operator has imaginary residue {:.3e}",
            val.im
        )));
    }
    Ok(val.re)
}
