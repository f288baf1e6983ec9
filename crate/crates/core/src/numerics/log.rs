use std::fmt;
use std::sync::OnceLock;

use super::sum::NeumaierSum;
use super::{Value, Weight};

pub const DEFAULT_LOG_FACTORIAL_CAP: u64 = 1_000_000;

/// Nonnegative scalar stored as its natural logarithm; zero is `ln = -inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogScalar {
    ln: f64,
}

impl LogScalar {
    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan());
        LogScalar { ln }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "LogScalar cannot hold negative value {x}");
        LogScalar { ln: x.ln() }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn div(self, rhs: LogScalar) -> LogScalar {
        LogScalar::from_ln(self.ln - rhs.ln)
    }

    /// `ln(exp(a) + exp(b))` without leaving the log domain.
    pub fn add(self, rhs: LogScalar) -> LogScalar {
        let (hi, lo) = if self.ln >= rhs.ln {
            (self.ln, rhs.ln)
        } else {
            (rhs.ln, self.ln)
        };
        if lo == f64::NEG_INFINITY {
            return LogScalar { ln: hi };
        }
        LogScalar {
            ln: hi + (lo - hi).exp().ln_1p(),
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.ln)
    }
}

/// Prefix sums of `ln k`, so `ln(a!)` is a table lookup below the cap.
#[derive(Debug, Clone)]
pub struct LogFactorialTable {
    table: Vec<f64>,
    tail_from: NeumaierSum,
}

impl LogFactorialTable {
    pub fn with_cap(cap: u64) -> Self {
        let cap = cap.max(20);
        let mut table = Vec::with_capacity(cap as usize + 1);
        let mut fact: u64 = 1;
        table.push(0.0);
        for k in 1..=20u64 {
            fact *= k;
            table.push((fact as f64).ln());
        }
        let mut acc = NeumaierSum::new();
        acc.add(table[20]);
        for k in 21..=cap {
            acc.add((k as f64).ln());
            table.push(acc.sum());
        }
        LogFactorialTable {
            table,
            tail_from: acc,
        }
    }

    pub fn cap(&self) -> u64 {
        self.table.len() as u64 - 1
    }

    /// `ln(a!)`. Beyond the cap the missing logs are summed on demand.
    pub fn get(&self, a: u64) -> f64 {
        if let Some(&v) = self.table.get(a as usize) {
            return v;
        }
        let mut acc = self.tail_from;
        for k in self.cap() + 1..=a {
            acc.add((k as f64).ln());
        }
        acc.sum()
    }
}

fn default_table() -> &'static LogFactorialTable {
    static TABLE: OnceLock<LogFactorialTable> = OnceLock::new();
    TABLE.get_or_init(|| LogFactorialTable::with_cap(DEFAULT_LOG_FACTORIAL_CAP))
}

pub fn log_factorial(a: u64) -> LogScalar {
    LogScalar::from_ln(default_table().get(a))
}

/// `ln C(a, b)`; zero (`-inf`) outside `0 <= b <= a`.
pub fn log_binomial(a: u64, b: i64) -> LogScalar {
    if b < 0 || b as u64 > a {
        return LogScalar::zero();
    }
    let t = default_table();
    let b = b as u64;
    LogScalar::from_ln(t.get(a) - t.get(b) - t.get(a - b))
}

impl Weight for LogScalar {
    fn zero() -> Self {
        LogScalar {
            ln: f64::NEG_INFINITY,
        }
    }

    fn one() -> Self {
        LogScalar { ln: 0.0 }
    }

    fn ratio(num: &[u64], den: &[u64]) -> Self {
        if num.contains(&0) {
            return Self::zero();
        }
        let n: f64 = num.iter().map(|&x| x as f64).product();
        let d: f64 = den.iter().map(|&x| x as f64).product();
        LogScalar { ln: (n / d).ln() }
    }

    fn factorial_ratio(num: &[u64], den: &[u64]) -> Self {
        let t = default_table();
        let mut acc = NeumaierSum::new();
        num.iter().for_each(|&x| acc.add(t.get(x)));
        den.iter().for_each(|&x| acc.add(-t.get(x)));
        LogScalar { ln: acc.sum() }
    }

    fn binomial(a: u64, b: i64) -> Self {
        log_binomial(a, b)
    }

    fn mul(&self, rhs: &Self) -> Self {
        LogScalar {
            ln: self.ln + rhs.ln,
        }
    }

    fn sum<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        let lns: Vec<f64> = terms.into_iter().map(|t| t.ln).collect();
        let max = lns.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Self::zero();
        }
        let scaled: NeumaierSum = lns.iter().map(|&l| (l - max).exp()).collect();
        LogScalar {
            ln: max + scaled.sum().ln(),
        }
    }

    fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    fn to_f64(&self) -> f64 {
        self.ln.exp()
    }

    fn into_value(self) -> Value {
        Value::Log(self)
    }
}
