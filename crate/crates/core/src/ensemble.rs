//! A classical bit stored as an ensemble of N pure states.
//!
//! The bit's density matrix is the uniform mixture of its members. Corrupting
//! a member rotates it by an amplitude `beta` toward an orthogonal direction;
//! in a thermal environment the cross terms dephase away, leaving
//! `rho' = rho + (1/N) sum_i |beta_i|^2 (|perp_i><perp_i| - |psi_i><psi_i|)`.
//! Any observable then shifts by at most `(2 eps / N) ||Omega||`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<Complex64>;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState(DVector<Complex64>);

impl PureState {
    /// Fails unless the amplitudes have unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState(v))
    }

    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState(v / Complex64::from(norm)))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        PureState(v)
    }

    /// `alpha|0> + beta|1>`.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(vec![alpha, beta])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.0
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn projector(&self) -> Matrix {
        &self.0 * self.0.adjoint()
    }

    /// The qubit state orthogonal to this one, `-beta*|0> + alpha*|1>`.
    /// `None` unless `dim() == 2`.
    pub fn qubit_perp(&self) -> Option<PureState> {
        (self.dim() == 2).then(|| PureState(DVector::from_vec(vec![-self.0[1].conj(), self.0[0].conj()])))
    }
}

/// Hermitian observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable(Matrix);

impl Observable {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let dev = (&matrix - matrix.adjoint()).camax();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Observable(matrix))
    }

    pub fn pauli_x() -> Self {
        Observable(real2(0.0, 1.0, 1.0, 0.0))
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        Observable(Matrix::from_row_slice(2, 2, &[0.0.into(), -i, i, 0.0.into()]))
    }

    pub fn pauli_z() -> Self {
        Observable(real2(1.0, 0.0, 0.0, -1.0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.0.clone().symmetric_eigenvalues().iter().copied().collect()
    }

    /// Largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues().into_iter().fold(0.0, |acc, e| acc.max(e.abs()))
    }
}

fn real2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[a.into(), b.into(), c.into(), d.into()])
}

/// Member `index` rotated by amplitude `beta` toward `perp`.
#[derive(Debug, Clone, PartialEq)]
pub struct Corruption {
    pub index: usize,
    pub beta: Complex64,
    /// Required when the member dimension exceeds 2; derived for qubits.
    pub perp: Option<PureState>,
}

impl Corruption {
    pub fn new(index: usize, beta: Complex64) -> Self {
        Corruption { index, beta, perp: None }
    }

    pub fn with_perp(index: usize, beta: Complex64, perp: PureState) -> Self {
        Corruption {
            index,
            beta,
            perp: Some(perp),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    members: Vec<PureState>,
    corruptions: Vec<Corruption>,
}

impl EnsembleSpec {
    pub fn new(members: Vec<PureState>, corruptions: Vec<Corruption>) -> Result<Self> {
        let dim = check_members(&members)?;
        let mut seen = vec![false; members.len()];
        let mut resolved = Vec::with_capacity(corruptions.len());
        for mut c in corruptions {
            if c.index >= members.len() {
                return Err(Error::InvalidCorruption(format!(
                    "index {} outside ensemble of {}",
                    c.index,
                    members.len()
                )));
            }
            if std::mem::replace(&mut seen[c.index], true) {
                return Err(Error::InvalidCorruption(format!("index {} corrupted twice", c.index)));
            }
            if c.beta.norm() > 1.0 + NORM_TOL {
                return Err(Error::InvalidCorruption(format!("|beta| = {} exceeds 1", c.beta.norm())));
            }
            let member = &members[c.index];
            let perp = match c.perp.take() {
                Some(p) => {
                    if p.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            got: p.dim(),
                        });
                    }
                    let overlap = member.inner(&p).norm();
                    if overlap > NORM_TOL {
                        return Err(Error::NotOrthogonal(overlap));
                    }
                    p
                }
                None => member.qubit_perp().ok_or_else(|| {
                    Error::InvalidCorruption(format!(
                        "member {} has dimension {dim}; an orthogonal direction must be supplied",
                        c.index
                    ))
                })?,
            };
            c.perp = Some(perp);
            resolved.push(c);
        }
        Ok(EnsembleSpec {
            members,
            corruptions: resolved,
        })
    }

    pub fn members(&self) -> &[PureState] {
        &self.members
    }

    pub fn corruptions(&self) -> &[Corruption] {
        &self.corruptions
    }

    /// N
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of corrupted members (eps).
    pub fn corrupted(&self) -> usize {
        self.corruptions.len()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    fn perp(c: &Corruption) -> &PureState {
        c.perp.as_ref().expect("resolved in EnsembleSpec::new")
    }
}

fn check_members(members: &[PureState]) -> Result<usize> {
    let first = members.first().ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?;
    let dim = first.dim();
    for m in members {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.dim(),
            });
        }
    }
    Ok(dim)
}

/// `(1/N) sum_n |psi_n><psi_n|`.
pub fn density(members: &[PureState]) -> Result<Matrix> {
    let dim = check_members(members)?;
    let mut rho = Matrix::zeros(dim, dim);
    for m in members {
        rho += m.projector();
    }
    Ok(rho / Complex64::from(members.len() as f64))
}

/// `Tr(rho Omega)`; fails if the result has an imaginary part above 1e-12.
pub fn expectation(rho: &Matrix, omega: &Observable) -> Result<f64> {
    if rho.nrows() != omega.dim() || rho.ncols() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            got: rho.nrows(),
        });
    }
    let tr = (rho * omega.matrix()).trace();
    if tr.im.abs() > HERMITIAN_TOL {
        return Err(Error::NotHermitian(tr.im.abs()));
    }
    Ok(tr.re)
}

/// Ensemble density with each corrupted member replaced by the coherent
/// superposition `alpha psi + beta perp`, before any dephasing.
pub fn corrupt_coherent(spec: &EnsembleSpec) -> Matrix {
    let mut states: Vec<DVector<Complex64>> = spec.members.iter().map(|m| m.0.clone()).collect();
    for c in &spec.corruptions {
        let alpha = (1.0 - c.beta.norm_sqr()).max(0.0).sqrt();
        states[c.index] = &states[c.index] * Complex64::from(alpha) + &EnsembleSpec::perp(c).0 * c.beta;
    }
    let dim = spec.dim();
    let mut rho = Matrix::zeros(dim, dim);
    for s in &states {
        rho += s * s.adjoint();
    }
    rho / Complex64::from(spec.len() as f64)
}

/// Ensemble density after corruption and dephasing of the corrupted members.
pub fn corrupt_dephased(spec: &EnsembleSpec) -> Matrix {
    let mut rho = density(&spec.members).expect("validated members");
    let n = spec.len() as f64;
    for c in &spec.corruptions {
        let w = Complex64::from(c.beta.norm_sqr() / n);
        let member = &spec.members[c.index];
        rho += (EnsembleSpec::perp(c).projector() - member.projector()) * w;
    }
    rho
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ExpectationShift {
    pub delta: f64,
    pub bound: f64,
}

/// `delta = |<Omega>_rho - <Omega>_rho'|` against `bound = (2 eps / N) ||Omega||`.
pub fn expectation_shift(spec: &EnsembleSpec, omega: &Observable) -> Result<ExpectationShift> {
    let before = expectation(&density(&spec.members)?, omega)?;
    let after = expectation(&corrupt_dephased(spec), omega)?;
    let bound = 2.0 * spec.corrupted() as f64 / spec.len() as f64 * omega.operator_norm();
    Ok(ExpectationShift {
        delta: (before - after).abs(),
        bound,
    })
}
