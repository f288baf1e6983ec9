use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{LogScalar, Value, Weight};

/// Reduced ratio of arbitrary-size integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactScalar(BigRational);

impl ExactScalar {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        ExactScalar(BigRational::new(num.into(), den.into()))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        ExactScalar(BigRational::from_integer(n.into()))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        ExactScalar(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        ExactScalar(&self.0 - &rhs.0)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        ExactScalar(&self.0 / &rhs.0)
    }

    pub fn to_log(&self) -> LogScalar {
        if self.0.is_zero() {
            return LogScalar::zero();
        }
        // ln(p/q) from the leading bits of each side, immune to f64 overflow
        LogScalar::from_ln(ln_big(self.0.numer()) - ln_big(self.0.denom()))
    }
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        ExactScalar(r)
    }
}

fn gcd_with_small(big: &BigInt, small: &BigInt) -> BigInt {
    if big.is_zero() {
        return small.abs();
    }
    (big % small).gcd(small)
}

pub fn factorial(a: u64) -> BigUint {
    (2..=a).fold(BigUint::one(), |acc, k| acc * k)
}

/// Exact `C(a, b)`; zero outside `0 <= b <= a`.
pub fn binomial_int(a: u64, b: i64) -> BigUint {
    if b < 0 || b as u64 > a {
        return BigUint::zero();
    }
    let b = (b as u64).min(a - b as u64);
    // C(a-b+i, i) is an integer at every step
    let mut acc = BigUint::one();
    for i in 1..=b {
        acc *= a - b + i;
        acc /= i;
    }
    acc
}

pub fn binomial(a: u64, b: i64) -> ExactScalar {
    ExactScalar::from_int(BigInt::from(binomial_int(a, b)))
}

impl Weight for ExactScalar {
    fn zero() -> Self {
        ExactScalar(BigRational::zero())
    }

    fn one() -> Self {
        ExactScalar(BigRational::one())
    }

    fn ratio(num: &[u64], den: &[u64]) -> Self {
        let n = num.iter().fold(BigInt::one(), |acc, &x| acc * x);
        let d = den.iter().fold(BigInt::one(), |acc, &x| acc * x);
        ExactScalar(BigRational::new(n, d))
    }

    fn factorial_ratio(num: &[u64], den: &[u64]) -> Self {
        let n = num.iter().fold(BigUint::one(), |acc, &x| acc * factorial(x));
        let d = den.iter().fold(BigUint::one(), |acc, &x| acc * factorial(x));
        ExactScalar(BigRational::new(n.into(), d.into()))
    }

    fn binomial(a: u64, b: i64) -> Self {
        binomial(a, b)
    }

    fn mul(&self, rhs: &Self) -> Self {
        ExactScalar(&self.0 * &rhs.0)
    }

    fn sum<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        ExactScalar(terms.into_iter().fold(BigRational::zero(), |acc, t| acc + t.0))
    }

    /// Nested (Horner) form `t_0 (1 + r_1 (1 + r_2 (...)))`. The accumulator
    /// stays reduced: multiplying by a small ratio only needs gcds against the
    /// small factors, and adding one keeps `gcd(num + den, den) = 1`.
    fn series(first: Self, ratios: &[Self]) -> Self {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for r in ratios.iter().rev() {
            let (p, q) = (r.0.numer(), r.0.denom());
            if p.is_zero() {
                num = BigInt::zero();
                den = BigInt::one();
            } else {
                let g1 = gcd_with_small(&num, q);
                let g2 = gcd_with_small(&den, p);
                num = (num / &g1) * (p / &g2);
                den = (den / &g2) * (q / &g1);
            }
            num += &den;
        }
        ExactScalar(first.0 * BigRational::new_raw(num, den))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    fn into_value(self) -> Value {
        Value::Exact(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Pascal's triangle, row by row.
    fn pascal(rows: usize) -> Vec<Vec<BigUint>> {
        let mut tri: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
        for r in 1..=rows {
            let prev = &tri[r - 1];
            let mut row = vec![BigUint::one(); r + 1];
            for k in 1..r {
                row[k] = &prev[k - 1] + &prev[k];
            }
            tri.push(row);
        }
        tri
    }

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(4, 2), ExactScalar::from_int(6));
        assert_eq!(binomial(3, 5), ExactScalar::zero());
        assert_eq!(binomial(3, -1), ExactScalar::zero());
        assert_eq!(binomial(0, 0), ExactScalar::one());
    }

    #[test]
    fn binomial_50_25_matches_pascal() {
        let tri = pascal(50);
        assert_eq!(tri[50][25], BigUint::from(126_410_606_437_752u64));
        assert_eq!(binomial_int(50, 25), tri[50][25]);
        for (a, row) in tri.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                assert_eq!(&binomial_int(a as u64, b as i64), v);
            }
        }
    }

    #[test]
    fn factorial_ratio_and_ratio() {
        assert_eq!(
            ExactScalar::factorial_ratio(&[5], &[3, 2]),
            ExactScalar::from_int(10)
        );
        assert_eq!(ExactScalar::ratio(&[2, 3], &[4]), ExactScalar::new(3, 2));
        assert_eq!(ExactScalar::ratio(&[0], &[7]), ExactScalar::zero());
    }

    #[test]
    fn series_matches_plain_sum() {
        let ratios: Vec<ExactScalar> = (1..30u64).map(|i| ExactScalar::ratio(&[31 - i], &[i + 7])).collect();
        let first = ExactScalar::new(3, 11);
        let mut terms = vec![first.clone()];
        for r in &ratios {
            let next = terms.last().unwrap().mul(r);
            terms.push(next);
        }
        assert_eq!(ExactScalar::series(first.clone(), &ratios), ExactScalar::sum(terms));
        assert_eq!(ExactScalar::series(first.clone(), &[]), first);
    }

    #[test]
    fn to_log_handles_huge_values() {
        let big = ExactScalar::new(BigInt::from(factorial(400)), BigInt::from(factorial(399)));
        assert!((big.to_log().ln() - 400f64.ln()).abs() < 1e-12);
        assert_eq!(ExactScalar::zero().to_log(), LogScalar::zero());
    }

    proptest! {
        #[test]
        fn symmetric(a in 0u64..120, b in 0u64..120) {
            let b = b.min(a) as i64;
            prop_assert_eq!(binomial_int(a, b), binomial_int(a, a as i64 - b));
        }

        #[test]
        fn vandermonde(p in 0u64..=60, q in 0u64..=60, n in 0u64..=60) {
            let lhs = (0..=n as i64).fold(BigUint::zero(), |acc, k| {
                acc + binomial_int(p, k) * binomial_int(q, n as i64 - k)
            });
            prop_assert_eq!(lhs, binomial_int(p + q, n as i64));
        }
    }
}
