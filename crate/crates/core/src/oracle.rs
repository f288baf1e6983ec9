//! Brute-force certification of the cloner closed forms.
//!
//! Symmetric states are expanded into the full `2^m` computational basis, the
//! clone-side mixture is assembled as a dense matrix, qubits are traced out
//! explicitly, and the result is read back in the symmetric basis. Qubit 0 is
//! the most significant bit of a basis index.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::cloner::{self, CloneParams};
use crate::ensemble::{Matrix, PureState};
use crate::error::{Error, Result};
use crate::numerics::{ExactScalar, Weight};

pub const MAX_SYM_QUBITS: usize = 14;
pub const MAX_CLONE_QUBITS: usize = 12;
pub const CERTIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FullVector {
    qubits: usize,
    amps: DVector<Complex64>,
}

impl FullVector {
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn inner(&self, other: &FullVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn projector(&self) -> Matrix {
        &self.amps * self.amps.adjoint()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullDensity {
    qubits: usize,
    matrix: Matrix,
}

impl FullDensity {
    pub fn new(qubits: usize, matrix: Matrix) -> Result<Self> {
        let dim = 1usize << qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        Ok(FullDensity { qubits, matrix })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| b.total_cmp(a));
        e
    }

    /// `<v| rho |w>`.
    pub fn element(&self, v: &FullVector, w: &FullVector) -> Complex64 {
        v.amps.dotc(&(&self.matrix * &w.amps))
    }
}

fn qubit_and_perp(psi: &PureState) -> Result<(PureState, PureState)> {
    let perp = psi.qubit_perp().ok_or(Error::DimensionMismatch {
        expected: 2,
        got: psi.dim(),
    })?;
    Ok((psi.clone(), perp))
}

/// Equal superposition of every placement of `j` copies of `psi_perp` among
/// `m - j` copies of `psi`.
pub fn expand_sym(m: usize, j: usize, psi: &PureState) -> Result<FullVector> {
    if m > MAX_SYM_QUBITS {
        return Err(Error::TooManyQubits {
            qubits: m,
            limit: MAX_SYM_QUBITS,
        });
    }
    if j > m {
        return Err(Error::OutOfRange {
            what: "j",
            value: j as u64,
            min: 0,
            max: m as u64,
        });
    }
    let (psi, perp) = qubit_and_perp(psi)?;
    let dim = 1usize << m;
    let mut amps = DVector::<Complex64>::zeros(dim);
    let mut placements = 0u64;
    for mask in 0..dim {
        if mask.count_ones() as usize != j {
            continue;
        }
        placements += 1;
        // bit (m-1-q) of mask set => qubit q holds perp
        let mut v = DVector::from_element(1, Complex64::new(1.0, 0.0));
        for q in 0..m {
            let s = if mask >> (m - 1 - q) & 1 == 1 { &perp } else { &psi };
            v = v.kronecker(s.amplitudes());
        }
        amps += v;
    }
    amps /= Complex64::from((placements as f64).sqrt());
    Ok(FullVector { qubits: m, amps })
}

/// Clone register after tracing out the machine:
/// `sum_j alpha_j^2 |(M-j)psi, j perp><...|`.
pub fn clone_output_density(params: CloneParams, psi: &PureState) -> Result<FullDensity> {
    let m = params.m() as usize;
    if m > MAX_CLONE_QUBITS {
        return Err(Error::TooManyQubits {
            qubits: m,
            limit: MAX_CLONE_QUBITS,
        });
    }
    let dim = 1usize << m;
    let mut rho = Matrix::zeros(dim, dim);
    for j in 0..=params.excess() {
        let w = cloner::alpha_sq::<ExactScalar>(params, j)?.to_f64();
        let v = expand_sym(m, j as usize, psi)?;
        rho += v.projector() * Complex64::from(w);
    }
    Ok(FullDensity { qubits: m, matrix: rho })
}

/// Reduced state on the qubits in `keep`, in the order given.
pub fn partial_trace(rho: &FullDensity, keep: &[usize]) -> Result<FullDensity> {
    let total = rho.qubits;
    let mut kept = vec![false; total];
    for &q in keep {
        if q >= total || std::mem::replace(&mut kept[q], true) {
            return Err(Error::OutOfRange {
                what: "kept qubit",
                value: q as u64,
                min: 0,
                max: total.saturating_sub(1) as u64,
            });
        }
    }
    if keep.is_empty() {
        return Err(Error::OutOfRange {
            what: "kept qubit count",
            value: 0,
            min: 1,
            max: total as u64,
        });
    }
    let traced: Vec<usize> = (0..total).filter(|&q| !kept[q]).collect();
    let scatter = |qs: &[usize], x: usize| -> usize {
        let k = qs.len();
        qs.iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | ((x >> (k - 1 - i) & 1) << (total - 1 - q)))
    };
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..kd).map(|a| scatter(keep, a)).collect();
    let traced_idx: Vec<usize> = (0..td).map(|t| scatter(&traced, t)).collect();
    let mut out = Matrix::zeros(kd, kd);
    for a in 0..kd {
        for b in 0..kd {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_idx {
                acc += rho.matrix[(kept_idx[a] | t, kept_idx[b] | t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(FullDensity {
        qubits: keep.len(),
        matrix: out,
    })
}

/// Keep the first `n` qubits.
pub fn partial_trace_first(rho: &FullDensity, n: usize) -> Result<FullDensity> {
    partial_trace(rho, &(0..n).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub n: u64,
    pub m: u64,
    pub block: u64,
    pub expected: Vec<f64>,
    pub observed: Vec<f64>,
    pub max_diag_deviation: f64,
    pub max_offdiag_deviation: f64,
    pub passed: bool,
}

impl CertifyReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_diag_deviation.max(self.max_offdiag_deviation)
    }
}

pub fn certify(params: CloneParams, block: u64) -> Result<CertifyReport> {
    certify_with(params, block, &PureState::basis(2, 0))
}

/// Compare the brute-force n-qubit reduced state, read in the symmetric basis
/// built from `psi`, against the closed-form diagonal.
pub fn certify_with(params: CloneParams, block: u64, psi: &PureState) -> Result<CertifyReport> {
    let expected: Vec<f64> = cloner::reduced_diagonal::<ExactScalar>(params, block)?
        .coeffs
        .iter()
        .map(Weight::to_f64)
        .collect();
    let full = clone_output_density(params, psi)?;
    let reduced = partial_trace_first(&full, block as usize)?;
    let basis: Vec<FullVector> = (0..=block as usize)
        .map(|k| expand_sym(block as usize, k, psi))
        .collect::<Result<_>>()?;
    let mut observed = Vec::with_capacity(basis.len());
    let mut max_diag: f64 = 0.0;
    let mut max_off: f64 = 0.0;
    for (k, bk) in basis.iter().enumerate() {
        for (l, bl) in basis.iter().enumerate() {
            let g = reduced.element(bk, bl);
            if k == l {
                observed.push(g.re);
                max_diag = max_diag.max((g - Complex64::from(expected[k])).norm());
            } else {
                max_off = max_off.max(g.norm());
            }
        }
    }
    Ok(CertifyReport {
        n: params.n(),
        m: params.m(),
        block,
        expected,
        observed,
        max_diag_deviation: max_diag,
        max_offdiag_deviation: max_off,
        passed: max_diag <= CERTIFY_TOL && max_off <= CERTIFY_TOL,
    })
}

/// Certify every `N <= max_n`, `2 <= kappa <= max_kappa` (with `M` within the
/// dense limit) and every block size `1..=N`.
pub fn certify_grid(max_n: u64, max_kappa: u64) -> Result<Vec<CertifyReport>> {
    let mut reports = Vec::new();
    for n in 1..=max_n {
        for kappa in 2..=max_kappa {
            let params = CloneParams::with_kappa(n, kappa)?;
            if params.m() as usize > MAX_CLONE_QUBITS {
                continue;
            }
            for block in 1..=n {
                reports.push(certify(params, block)?);
            }
        }
    }
    Ok(reports)
}
