//! Truncated power series over a prime field.
//!
//! A [`TruncatedSeries`] is an element of `F_p[[t]]` known modulo `t^N`.
//! The precision `N` is part of the value: operands of different precision
//! are rejected instead of being silently cut down.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{inv_mod, is_prime, MAX_PRIME};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("{0} is not a supported prime")]
    InvalidPrime(u64),
    #[error("precision must be positive")]
    ZeroPrecision,
    #[error("coefficient {value} of t^{degree} is not a residue mod {prime}")]
    CoefficientOutOfRange { degree: usize, value: i64, prime: u64 },
    #[error("{len} coefficients do not fit in precision {precision}")]
    TooManyCoefficients { len: usize, precision: usize },
    #[error("mismatched primes {0} and {1}")]
    MismatchedPrime(u64, u64),
    #[error("mismatched precisions {0} and {1}")]
    MismatchedPrecision(usize, usize),
    #[error("series is not a unit (constant term is zero)")]
    NotAUnit,
    #[error("inner series of a composition must have zero constant term")]
    PositiveValuationRequired,
    #[error("series is not reversible (needs zero constant term and nonzero linear term)")]
    NotReversible,
    #[error("root obstruction: {0}")]
    RootObstruction(String),
}

/// Valuation of a truncated quantity.
///
/// `AtLeast(n)` is returned when every stored coefficient vanishes: the
/// truncation cannot tell zero apart from anything of valuation `>= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Valuation {
    Finite(usize),
    AtLeast(usize),
}

impl Valuation {
    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// Valuation of a product, saturating at the truncation bound `bound`.
    pub fn product(self, other: Valuation, bound: usize) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) if a + b < bound => {
                Valuation::Finite(a + b)
            }
            _ => Valuation::AtLeast(bound),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

/// JSON literal `{"p": .., "precision": .., "coeffs": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesLiteral {
    pub p: u64,
    pub precision: usize,
    pub coeffs: Vec<i64>,
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SeriesLiteral", into = "SeriesLiteral")]
pub struct TruncatedSeries {
    prime: u64,
    coeffs: Vec<u64>,
}

impl TryFrom<SeriesLiteral> for TruncatedSeries {
    type Error = SeriesError;

    fn try_from(lit: SeriesLiteral) -> Result<Self, Self::Error> {
        check_prime(lit.p)?;
        for (degree, &value) in lit.coeffs.iter().enumerate() {
            if value < 0 || value as u64 >= lit.p {
                return Err(SeriesError::CoefficientOutOfRange { degree, value, prime: lit.p });
            }
        }
        TruncatedSeries::from_coeffs(lit.p, lit.precision, &lit.coeffs)
    }
}

impl From<TruncatedSeries> for SeriesLiteral {
    fn from(s: TruncatedSeries) -> Self {
        SeriesLiteral {
            p: s.prime,
            precision: s.coeffs.len(),
            coeffs: s.coeffs.iter().map(|&c| c as i64).collect(),
        }
    }
}

fn check_prime(p: u64) -> Result<(), SeriesError> {
    if p > MAX_PRIME || !is_prime(p) {
        return Err(SeriesError::InvalidPrime(p));
    }
    Ok(())
}

impl TruncatedSeries {
    /// Builds a series from signed coefficients, reducing them mod `p`.
    /// Missing high coefficients are zero.
    pub fn from_coeffs(p: u64, precision: usize, coeffs: &[i64]) -> Result<Self, SeriesError> {
        check_prime(p)?;
        if precision == 0 {
            return Err(SeriesError::ZeroPrecision);
        }
        if coeffs.len() > precision {
            return Err(SeriesError::TooManyCoefficients { len: coeffs.len(), precision });
        }
        let mut out = vec![0; precision];
        for (slot, &c) in out.iter_mut().zip(coeffs) {
            *slot = c.rem_euclid(p as i64) as u64;
        }
        Ok(TruncatedSeries { prime: p, coeffs: out })
    }

    pub fn zero(p: u64, precision: usize) -> Result<Self, SeriesError> {
        Self::from_coeffs(p, precision, &[])
    }

    pub fn one(p: u64, precision: usize) -> Result<Self, SeriesError> {
        Self::from_coeffs(p, precision, &[1])
    }

    /// The uniformizer `t`.
    pub fn variable(p: u64, precision: usize) -> Result<Self, SeriesError> {
        Self::from_coeffs(p, precision, &[0, 1])
    }

    /// `c * t^degree`; zero if `degree >= precision`.
    pub fn monomial(p: u64, precision: usize, degree: usize, c: i64) -> Result<Self, SeriesError> {
        let mut s = Self::zero(p, precision)?;
        if degree < precision {
            s.coeffs[degree] = c.rem_euclid(p as i64) as u64;
        }
        Ok(s)
    }

    pub(crate) fn from_raw(prime: u64, coeffs: Vec<u64>) -> Self {
        debug_assert!(!coeffs.is_empty() && coeffs.iter().all(|&c| c < prime));
        TruncatedSeries { prime, coeffs }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> u64 {
        self.coeffs.get(degree).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Same coefficients at another precision: extra coefficients are zero,
    /// dropped ones must be the caller's intent.
    pub fn with_precision(&self, precision: usize) -> Result<Self, SeriesError> {
        if precision == 0 {
            return Err(SeriesError::ZeroPrecision);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(precision, 0);
        Ok(TruncatedSeries { prime: self.prime, coeffs })
    }

    fn check_compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.prime != other.prime {
            return Err(SeriesError::MismatchedPrime(self.prime, other.prime));
        }
        if self.precision() != other.precision() {
            return Err(SeriesError::MismatchedPrecision(self.precision(), other.precision()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let p = self.prime;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % p).collect();
        Ok(Self::from_raw(p, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let p = self.prime;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + p - b) % p).collect();
        Ok(Self::from_raw(p, coeffs))
    }

    pub fn neg(&self) -> Self {
        let p = self.prime;
        Self::from_raw(p, self.coeffs.iter().map(|&c| (p - c) % p).collect())
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.prime;
        let c = c % p;
        Self::from_raw(p, self.coeffs.iter().map(|&a| a * c % p).collect())
    }

    /// Cauchy product truncated at `t^N`.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let p = self.prime;
        let n = self.precision();
        let mut acc = vec![0u64; n];
        // Lazy reduction is safe while n products of residues fit in a u64.
        let lazy = (p - 1)
            .checked_mul(p - 1)
            .and_then(|sq| sq.checked_mul(n as u64))
            .is_some();
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                if lazy {
                    acc[i + j] += a * b;
                } else {
                    acc[i + j] = (acc[i + j] + a * b % p) % p;
                }
            }
        }
        if lazy {
            for c in acc.iter_mut() {
                *c %= p;
            }
        }
        Self::from_raw(p, acc)
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut out = Self::from_raw(self.prime, {
            let mut v = vec![0; self.precision()];
            v[0] = 1;
            v
        });
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        out
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn unit_inverse(&self) -> Result<Self, SeriesError> {
        let p = self.prime;
        let c0 = self.coeffs[0];
        if c0 == 0 {
            return Err(SeriesError::NotAUnit);
        }
        let inv0 = inv_mod(c0, p).expect("nonzero residue mod a prime");
        let n = self.precision();
        let mut out = vec![0u64; n];
        out[0] = inv0;
        for k in 1..n {
            let mut s = 0u64;
            for i in 1..=k {
                s = (s + self.coeffs[i] * out[k - i]) % p;
            }
            out[k] = (p - s) % p * inv0 % p;
        }
        Ok(Self::from_raw(p, out))
    }

    /// `f(g(t))` for `g` with zero constant term, by Horner's rule.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(inner)?;
        if inner.coeffs[0] != 0 {
            return Err(SeriesError::PositiveValuationRequired);
        }
        let n = self.precision();
        let top = match inner.valuation() {
            Valuation::Finite(v) => (n - 1) / v,
            Valuation::AtLeast(_) => 0,
        };
        let mut acc = Self::monomial(self.prime, n, 0, self.coeffs[top] as i64)?;
        for i in (0..top).rev() {
            acc = acc.mul_unchecked(inner);
            acc.coeffs[0] = (acc.coeffs[0] + self.coeffs[i]) % self.prime;
        }
        Ok(acc)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let p = self.prime;
        let n = self.precision();
        let mut out = vec![0u64; n];
        for i in 1..n {
            out[i - 1] = (i as u64 % p) * self.coeffs[i] % p;
        }
        Self::from_raw(p, out)
    }

    /// Compositional inverse, by Newton iteration `g <- g - (f(g) - t) / f'(g)`.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        let p = self.prime;
        let n = self.precision();
        if self.coeffs[0] != 0 || n < 2 || self.coeffs[1] == 0 {
            return Err(SeriesError::NotReversible);
        }
        let t = Self::variable(p, n)?;
        let inv1 = inv_mod(self.coeffs[1], p).expect("nonzero residue");
        let deriv = self.derivative();
        let mut g = t.scale(inv1);
        // Quadratic convergence: the loop ends after about log2(N) steps.
        for _ in 0..=n {
            let residual = self.compose(&g)?.sub(&t)?;
            if residual.is_zero() {
                return Ok(g);
            }
            let slope = deriv.compose(&g)?.unit_inverse()?;
            g = g.sub(&residual.mul_unchecked(&slope))?;
        }
        unreachable!("Newton reversion failed to converge")
    }

    /// The `m`-th root congruent to 1 mod `t` of a series with constant term 1.
    pub fn nth_root(&self, m: u64) -> Result<Self, SeriesError> {
        let p = self.prime;
        if m == 0 || m.is_multiple_of(p) {
            return Err(SeriesError::RootObstruction(format!("gcd({m}, {p}) != 1")));
        }
        if self.coeffs[0] != 1 {
            return Err(SeriesError::RootObstruction("constant term is not 1".into()));
        }
        let n = self.precision();
        let inv_m = inv_mod(m % p, p).expect("m prime to p");
        let mut g = Self::one(p, n)?;
        for _ in 0..=n {
            let residual = g.pow(m).sub(self)?;
            if residual.is_zero() {
                return Ok(g);
            }
            let slope = g.pow(m - 1).unit_inverse()?.scale(inv_m);
            g = g.sub(&residual.mul_unchecked(&slope))?;
        }
        unreachable!("Newton root extraction failed to converge")
    }

    /// Smallest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|&c| c != 0) {
            Some(i) => Valuation::Finite(i),
            None => Valuation::AtLeast(self.precision()),
        }
    }

    /// Multiplication by `t^k` (coefficients pushed past the precision are dropped).
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.precision();
        let mut out = vec![0u64; n];
        if k < n {
            out[k..].copy_from_slice(&self.coeffs[..n - k]);
        }
        Self::from_raw(self.prime, out)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod {})", self.prime)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{c}t")?,
                (_, 1) => write!(f, "t^{i}")?,
                _ => write!(f, "{c}t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.precision())
    }
}
