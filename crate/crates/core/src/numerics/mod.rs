//! Two interchangeable arithmetic backends for the cloner formulas.
//!
//! [`ExactScalar`] carries reduced big rationals and is used as ground truth for
//! small instances. [`LogScalar`] carries a natural-log magnitude so that weights
//! built from factorials of numbers in the hundreds of thousands stay finite.
//! Formulas are written once against [`Weight`].

mod exact;
mod log;
mod sum;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use exact::{binomial, binomial_int, factorial, ExactScalar};
pub use log::{log_binomial, log_factorial, LogFactorialTable, LogScalar, DEFAULT_LOG_FACTORIAL_CAP};
pub use sum::{compensated_sum, NeumaierSum};

/// Largest M for which the exact backend is accepted by [`Backend::resolve`].
pub const EXACT_M_LIMIT: u64 = 200;

/// Nonnegative scalar arithmetic shared by both backends.
pub trait Weight: Clone + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    /// `prod(num) / prod(den)`; every `den` factor must be nonzero.
    fn ratio(num: &[u64], den: &[u64]) -> Self;
    /// `prod(num_i!) / prod(den_i!)`.
    fn factorial_ratio(num: &[u64], den: &[u64]) -> Self;
    /// `C(a, b)`, zero when `b` lies outside `[0, a]`.
    fn binomial(a: u64, b: i64) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn sum<I: IntoIterator<Item = Self>>(terms: I) -> Self;
    /// Sum of the series `t_0, t_0 r_1, t_0 r_1 r_2, ...` given `t_0` and the
    /// consecutive term ratios.
    fn series(first: Self, ratios: &[Self]) -> Self {
        let mut terms = Vec::with_capacity(ratios.len() + 1);
        let mut t = first;
        for r in ratios {
            let next = t.mul(r);
            terms.push(t);
            t = next;
        }
        terms.push(t);
        Self::sum(terms)
    }
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    fn into_value(self) -> Value;
}

/// Backend selection. `Auto` picks exact arithmetic when M is small enough.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Log,
    #[default]
    Auto,
}

impl Backend {
    /// Concrete backend for a computation with `m` output qubits.
    pub fn resolve(self, m: u64) -> Result<Backend> {
        match self {
            Backend::Auto if m <= EXACT_M_LIMIT => Ok(Backend::Exact),
            Backend::Auto => Ok(Backend::Log),
            Backend::Exact if m > EXACT_M_LIMIT => Err(Error::ExactTooLarge {
                m,
                limit: EXACT_M_LIMIT,
            }),
            b => Ok(b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Log => "log",
            Backend::Auto => "auto",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Backend::Exact),
            "log" => Ok(Backend::Log),
            "auto" => Ok(Backend::Auto),
            other => Err(format!("unknown backend '{other}'")),
        }
    }
}

/// A result produced by either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(ExactScalar),
    Log(LogScalar),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(x) => x.to_f64(),
            Value::Log(x) => x.to_f64(),
        }
    }

    pub fn exact(&self) -> Option<&ExactScalar> {
        match self {
            Value::Exact(x) => Some(x),
            Value::Log(_) => None,
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Value::Exact(_) => Backend::Exact,
            Value::Log(_) => Backend::Log,
        }
    }
}
