//! Closed forms for the symmetric universal N→M qubit cloner.
//!
//! The cloner output is `sum_j alpha_j |(M-j)psi, j psi_perp> ⊗ R_j` with
//! orthonormal machine states `R_j`, so the clone register alone is the
//! diagonal mixture with weights `alpha_j^2`. Everything here depends only on
//! the integers (N, M, n, k, j); the input state never appears.
//!
//! All sums run on term recurrences (ratio of consecutive terms), which costs
//! O(M) per coefficient and never re-evaluates a factorial.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Backend, ExactScalar, LogScalar, Value, Weight};

/// `(N, M)`: N identical input qubits cloned into M outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CloneParams {
    n: u64,
    m: u64,
}

impl CloneParams {
    pub fn new(n: u64, m: u64) -> Result<Self> {
        if n == 0 || m < n {
            return Err(Error::InvalidParams { n, m });
        }
        Ok(CloneParams { n, m })
    }

    /// `M = kappa * N`.
    pub fn with_kappa(n: u64, kappa: u64) -> Result<Self> {
        let m = n.checked_mul(kappa).ok_or(Error::InvalidParams { n, m: u64::MAX })?;
        Self::new(n, m)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// `M / N` when M is an integral multiple of N.
    pub fn kappa(&self) -> Option<u64> {
        (self.m % self.n == 0).then(|| self.m / self.n)
    }

    /// `M - N`, the largest number of orthogonal-state errors in the output.
    pub fn excess(&self) -> u64 {
        self.m - self.n
    }
}

/// Weights `alpha_j^2`, `j = 0..=M-N`.
#[derive(Debug, Clone)]
pub struct CloneSpectrum<W> {
    pub params: CloneParams,
    pub weights: Vec<W>,
}

impl<W: Weight> CloneSpectrum<W> {
    pub fn total(&self) -> W {
        W::sum(self.weights.iter().cloned())
    }
}

/// Diagonal of an n-qubit reduced state in the basis `|(n-k)psi, k psi_perp>`.
#[derive(Debug, Clone)]
pub struct SymDiagonal<W> {
    pub n: u64,
    pub coeffs: Vec<W>,
}

impl<W: Weight> SymDiagonal<W> {
    pub fn trace(&self) -> W {
        W::sum(self.coeffs.iter().cloned())
    }

    /// Overlap with `|n psi>`.
    pub fn fidelity(&self) -> &W {
        &self.coeffs[0]
    }
}

/// `alpha_j^2 = (N+1)/(M+1) · (M-N)!(M-j)! / ((M-N-j)! M!)`, evaluated
/// straight from the factorials.
pub fn alpha_sq<W: Weight>(params: CloneParams, j: u64) -> Result<W> {
    let (n, m) = (params.n, params.m);
    if j > params.excess() {
        return Err(Error::OutOfRange {
            what: "j",
            value: j,
            min: 0,
            max: params.excess(),
        });
    }
    let lead = W::ratio(&[n + 1], &[m + 1]);
    Ok(lead.mul(&W::factorial_ratio(&[m - n, m - j], &[m - n - j, m])))
}

pub fn spectrum<W: Weight>(params: CloneParams) -> CloneSpectrum<W> {
    let (n, m) = (params.n, params.m);
    let mut weights = Vec::with_capacity(params.excess() as usize + 1);
    let mut w = W::ratio(&[n + 1], &[m + 1]);
    for j in 0..=params.excess() {
        if j > 0 {
            w = w.mul(&W::ratio(&[m - n - (j - 1)], &[m - (j - 1)]));
        }
        weights.push(w.clone());
    }
    CloneSpectrum { params, weights }
}

/// Coefficients `k = 0..=k_max` of the n-block diagonal:
/// `sum_{j=k}^{min(M-n+k, M-N)} alpha_j^2 C(M-n, j-k) C(n, k) / C(M, j)`.
fn diagonal_prefix<W: Weight>(params: CloneParams, block: u64, k_max: u64) -> Vec<W> {
    let (n_in, m) = (params.n, params.m);
    let excess = params.excess();
    let mut coeffs = Vec::with_capacity(k_max as usize + 1);
    // j = k term: alpha_k^2 C(block, k) / C(M, k)
    let mut lead = W::ratio(&[n_in + 1], &[m + 1]);
    for k in 0..=k_max {
        let upper = (m - block + k).min(excess);
        if k > upper || lead.is_zero() {
            coeffs.push(W::zero());
        } else {
            let ratios: Vec<W> = (k..upper)
                .map(|p| {
                    W::ratio(
                        &[m - n_in - p, m - block + k - p, p + 1],
                        &[m - p, p + 1 - k, m - p],
                    )
                })
                .collect();
            coeffs.push(W::series(lead.clone(), &ratios));
        }
        if k < k_max {
            lead = lead.mul(&W::ratio(&[excess.saturating_sub(k), block - k], &[m - k, m - k]));
        }
    }
    coeffs
}

pub fn reduced_diagonal<W: Weight>(params: CloneParams, block: u64) -> Result<SymDiagonal<W>> {
    if block == 0 || block > params.m {
        return Err(Error::OutOfRange {
            what: "block size n",
            value: block,
            min: 1,
            max: params.m,
        });
    }
    Ok(SymDiagonal {
        n: block,
        coeffs: diagonal_prefix(params, block, block),
    })
}

/// Distribution of the number of erroneous qubits in an N-qubit output block.
pub fn error_distribution<W: Weight>(params: CloneParams) -> SymDiagonal<W> {
    SymDiagonal {
        n: params.n,
        coeffs: diagonal_prefix(params, params.n, params.n),
    }
}

/// Block fidelity `sum_j alpha_j^2 C(M-N, j) / C(M, j)`.
///
/// This is an independent route to `reduced_diagonal(params, N).coeffs[0]`.
pub fn fidelity<W: Weight>(params: CloneParams) -> W {
    let (n, m) = (params.n, params.m);
    let ratios: Vec<W> = (0..params.excess())
        .map(|p| W::ratio(&[m - n - p, m - n - p], &[m - p, m - p]))
        .collect();
    W::series(W::ratio(&[n + 1], &[m + 1]), &ratios)
}

fn check_err(params: CloneParams, err: u64) -> Result<()> {
    if err > params.n {
        return Err(Error::OutOfRange {
            what: "Err",
            value: err,
            min: 0,
            max: params.n,
        });
    }
    Ok(())
}

/// Probability that an N-qubit output block carries at most `err` errors.
pub fn info_fidelity<W: Weight>(params: CloneParams, err: u64) -> Result<W> {
    check_err(params, err)?;
    Ok(W::sum(diagonal_prefix::<W>(params, params.n, err)))
}

/// `info_fidelity` for every tolerance `0..=max_err`, sharing one pass.
pub fn info_fidelity_profile<W: Weight>(params: CloneParams, max_err: u64) -> Result<Vec<W>> {
    check_err(params, max_err)?;
    let mut running = W::zero();
    Ok(diagonal_prefix::<W>(params, params.n, max_err)
        .into_iter()
        .map(|c| {
            running = W::sum([running.clone(), c]);
            running.clone()
        })
        .collect())
}

/// Smallest tolerance whose information fidelity reaches `target`.
pub fn min_err_for<W: Weight>(params: CloneParams, target: f64) -> Option<u64> {
    let mut running = W::zero();
    for (k, c) in diagonal_prefix::<W>(params, params.n, params.n).into_iter().enumerate() {
        running = W::sum([running, c]);
        if running.to_f64() >= target {
            return Some(k as u64);
        }
    }
    None
}

macro_rules! with_backend {
    ($backend:expr, $m:expr, |$w:ident| $body:expr) => {
        match $backend.resolve($m)? {
            Backend::Exact => {
                type $w = ExactScalar;
                $body
            }
            _ => {
                type $w = LogScalar;
                $body
            }
        }
    };
}

pub fn alpha_sq_value(params: CloneParams, j: u64, backend: Backend) -> Result<Value> {
    with_backend!(backend, params.m, |W| Ok(alpha_sq::<W>(params, j)?.into_value()))
}

pub fn spectrum_values(params: CloneParams, backend: Backend) -> Result<Vec<Value>> {
    with_backend!(backend, params.m, |W| Ok(spectrum::<W>(params)
        .weights
        .into_iter()
        .map(Weight::into_value)
        .collect()))
}

pub fn reduced_diagonal_values(params: CloneParams, block: u64, backend: Backend) -> Result<Vec<Value>> {
    with_backend!(backend, params.m, |W| Ok(reduced_diagonal::<W>(params, block)?
        .coeffs
        .into_iter()
        .map(Weight::into_value)
        .collect()))
}

pub fn fidelity_value(params: CloneParams, backend: Backend) -> Result<Value> {
    with_backend!(backend, params.m, |W| Ok(fidelity::<W>(params).into_value()))
}

pub fn info_fidelity_value(params: CloneParams, err: u64, backend: Backend) -> Result<Value> {
    with_backend!(backend, params.m, |W| Ok(info_fidelity::<W>(params, err)?.into_value()))
}

pub fn info_fidelity_profile_values(
    params: CloneParams,
    max_err: u64,
    backend: Backend,
) -> Result<Vec<Value>> {
    with_backend!(backend, params.m, |W| Ok(info_fidelity_profile::<W>(params, max_err)?
        .into_iter()
        .map(Weight::into_value)
        .collect()))
}
