//! Exact rational polynomials in `i` for the `Delta_n` recursion
//!
//! ```text
//! Delta_n(i) = binom(i, n) - sum_{k=1}^{n-1} Delta_k(i) binom(i, n-k)
//! ```
//!
//! and the telescoping identity it supports: with
//! `L_k = sum_{j=0}^{n-k} binom(i, j) u_{k+j}`,
//! `L_k = u_k + sum_{j=1}^{n-k} Delta_j(i) L_{k+j}`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::matrix::binomial_exact;

/// Dense polynomial with exact rational coefficients, ascending degree.
/// Trailing zero coefficients are trimmed; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `i`.
    pub fn variable() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Coefficients as `"p/q"` strings (`"p"` when the denominator is 1).
    pub fn coefficient_strings(&self) -> Vec<String> {
        if self.coeffs.is_empty() {
            return vec!["0".to_string()];
        }
        self.coeffs.iter().map(ToString::to_string).collect()
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn add(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigRational::zero();
        RationalPolynomial::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + rhs.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn sub(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        self + &rhs.scale(&-BigRational::one())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn mul(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            for (b, y) in rhs.coeffs.iter().enumerate() {
                out[a + b] += x * y;
            }
        }
        RationalPolynomial::new(out)
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            match (first, c.is_negative()) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, _) => write!(f, " {sign} ")?,
            }
            first = false;
            let a = c.abs();
            let show_coef = k == 0 || !a.is_one();
            if show_coef {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}i", if show_coef { "*" } else { "" })?,
                _ => write!(f, "{}i^{k}", if show_coef { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl Serialize for RationalPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coefficient_strings().serialize(s)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `binom(i, n) = i (i-1) ... (i-n+1) / n!` as a polynomial in `i`.
pub fn binomial_poly(n: usize) -> RationalPolynomial {
    let falling = (0..n as i64).fold(RationalPolynomial::constant(rat(1)), |acc, j| {
        &acc * &RationalPolynomial::new(vec![rat(-j), rat(1)])
    });
    let inv = BigRational::new(BigInt::one(), BigInt::from(factorial(n as u64)));
    falling.scale(&inv)
}

/// `[Delta_0, Delta_1, ..., Delta_n]`, built bottom-up from the recursion.
pub fn delta_polys(n: usize) -> Vec<RationalPolynomial> {
    let binoms: Vec<RationalPolynomial> = (0..=n).map(binomial_poly).collect();
    let mut out: Vec<RationalPolynomial> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut d = binoms[m].clone();
        for k in 1..m {
            d = &d - &(&out[k] * &binoms[m - k]);
        }
        out.push(d);
    }
    out
}

/// `Delta_n` for `n >= 1` (`n = 0` gives the constant 1).
pub fn delta_poly(n: usize) -> RationalPolynomial {
    delta_polys(n).pop().expect("table has n + 1 entries")
}

/// `(-1)^{n+1} / n!`.
pub fn expected_delta_leading(n: usize) -> BigRational {
    let sign = if n % 2 == 1 { 1 } else { -1 };
    BigRational::new(BigInt::from(sign), BigInt::from(factorial(n as u64)))
}

/// `sum_{k=1}^{n-1} binom(n, k) (-1)^{k+1}`: 0 for odd `n`, 2 for even `n >= 2`.
pub fn alternating_binomial_sum(n: u64) -> BigInt {
    (1..n).fold(BigInt::zero(), |acc, k| {
        let b = BigInt::from(binomial_exact(n, k));
        if k % 2 == 1 {
            acc + b
        } else {
            acc - b
        }
    })
}

/// Both sides of the telescoping identity for every `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LIdentityReport {
    pub n: usize,
    pub i: u64,
    /// `i >= n`; the identity is still evaluated when this is false.
    pub hypothesis_met: bool,
    /// `L_k` for `k = 1..n`.
    #[serde(serialize_with = "ser_rationals")]
    pub lhs: Vec<BigRational>,
    /// `u_k + sum_j Delta_j(i) L_{k+j}` for `k = 1..n`.
    #[serde(serialize_with = "ser_rationals")]
    pub rhs: Vec<BigRational>,
    /// `lhs - rhs`, exactly.
    #[serde(serialize_with = "ser_rationals")]
    pub residuals: Vec<BigRational>,
    pub holds: bool,
}

fn ser_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
}

/// Evaluates `L_k` and the right-hand side exactly for `u = (u_1, ..., u_n)`.
pub fn check_l_identity(u: &[BigRational], i: u64) -> LIdentityReport {
    let n = u.len();
    let iq = BigRational::from_integer(BigInt::from(i));
    let deltas: Vec<BigRational> = delta_polys(n).iter().map(|p| p.eval(&iq)).collect();
    let binom: Vec<BigRational> = (0..=n as u64)
        .map(|j| BigRational::from_integer(BigInt::from(binomial_exact(i, j))))
        .collect();
    // 1-based k stored at index k-1
    let lhs: Vec<BigRational> = (1..=n)
        .map(|k| (0..=n - k).map(|j| &binom[j] * &u[k + j - 1]).sum())
        .collect();
    let rhs: Vec<BigRational> = (1..=n)
        .map(|k| {
            let tail: BigRational = (1..=n - k).map(|j| &deltas[j] * &lhs[k + j - 1]).sum();
            &u[k - 1] + tail
        })
        .collect();
    let residuals: Vec<BigRational> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let holds = residuals.iter().all(Zero::is_zero);
    LIdentityReport {
        n,
        i,
        hypothesis_met: i >= n as u64,
        lhs,
        rhs,
        residuals,
        holds,
    }
}
