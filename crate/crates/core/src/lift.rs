//! A truncated model of the lifting ring and Weierstrass preparation over it.
//!
//! Scalars live in `Z[zeta]/(Phi_p(zeta), p^M)`, a discrete valuation ring
//! truncated at `pi^(M(p-1))` where `pi = zeta - 1` is a uniformizer
//! (`v(pi) = 1`, `v(p) = p - 1`). Its maximal ideal is nilpotent, so every
//! successive-approximation scheme below terminates exactly.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{inv_mod, is_prime, p_adic_valuation};
use crate::automorphism::{AutomorphismError, DiskAutomorphism};
use crate::series::{TruncatedSeries, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),
    #[error("depth {depth} is unsupported for p = {p} (need M >= 1 and p^M < 2^32)")]
    InvalidDepth { p: u64, depth: u32 },
    #[error("expected {expected} coordinates, got {got}")]
    WrongCoordinateCount { expected: usize, got: usize },
    #[error("coordinate {value} is not a residue mod {modulus}")]
    CoordinateOutOfRange { value: i64, modulus: u64 },
    #[error("operands live in different rings")]
    MismatchedRing,
    #[error("mismatched precisions {0} and {1}")]
    MismatchedPrecision(usize, usize),
    #[error("precision must be positive")]
    ZeroPrecision,
    #[error("{len} coefficients do not fit in precision {precision}")]
    TooManyCoefficients { len: usize, precision: usize },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("inner series of a composition must have zero constant term")]
    PositiveValuationRequired,
    #[error("series vanishes modulo the maximal ideal; preparation is undefined")]
    ReductionVanishes,
    #[error("precision exhausted: preparation of degree {degree} needs precision >= {needed}, have {have}")]
    PrecisionExhausted { degree: usize, needed: usize, have: usize },
    #[error("not a lifted automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error(transparent)]
    Automorphism(#[from] AutomorphismError),
    #[error("fixed-point divisor has degree {degree}, expected break + 1 = {expected}")]
    DegreeMismatch { degree: usize, expected: usize },
    #[error("factorization does not re-multiply to the input")]
    VerificationFailed,
}

/// Parameters of the ring `Z[zeta_p]/(Phi_p, p^M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LiftRing {
    p: u64,
    depth: u32,
    modulus: u64,
}

impl LiftRing {
    pub fn new(p: u64, depth: u32) -> Result<Self, LiftError> {
        if !is_prime(p) {
            return Err(LiftError::InvalidPrime(p));
        }
        let modulus = p
            .checked_pow(depth)
            .filter(|&m| depth >= 1 && m <= u32::MAX as u64)
            .ok_or(LiftError::InvalidDepth { p, depth })?;
        Ok(LiftRing { p, depth, modulus })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `p^M`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Number of basis coordinates, `p - 1`.
    pub fn rank(&self) -> usize {
        self.p as usize - 1
    }

    /// `M(p-1)`: every element of valuation at least this is zero.
    pub fn valuation_bound(&self) -> usize {
        self.depth as usize * self.rank()
    }

    pub fn zero(&self) -> LiftScalar {
        LiftScalar { ring: *self, coords: vec![0; self.rank()] }
    }

    pub fn from_int(&self, n: i64) -> LiftScalar {
        let mut x = self.zero();
        x.coords[0] = n.rem_euclid(self.modulus as i64) as u64;
        x
    }

    pub fn one(&self) -> LiftScalar {
        self.from_int(1)
    }

    /// The primitive `p`-th root of unity.
    pub fn zeta(&self) -> LiftScalar {
        if self.p == 2 {
            return self.from_int(-1);
        }
        let mut x = self.zero();
        x.coords[1] = 1;
        x
    }

    /// The uniformizer `zeta - 1`.
    pub fn uniformizer(&self) -> LiftScalar {
        self.zeta().sub(&self.one())
    }

    pub fn scalar(&self, coords: &[i64]) -> Result<LiftScalar, LiftError> {
        if coords.len() != self.rank() {
            return Err(LiftError::WrongCoordinateCount { expected: self.rank(), got: coords.len() });
        }
        let m = self.modulus as i64;
        Ok(LiftScalar {
            ring: *self,
            coords: coords.iter().map(|&c| c.rem_euclid(m) as u64).collect(),
        })
    }
}

/// JSON literal `{"p": .., "M": .., "coords": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarLiteral {
    pub p: u64,
    #[serde(rename = "M")]
    pub depth: u32,
    pub coords: Vec<i64>,
}

/// Element of `Z[zeta_p]/(Phi_p, p^M)` in the basis `1, zeta, ..., zeta^(p-2)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScalarLiteral", into = "ScalarLiteral")]
pub struct LiftScalar {
    ring: LiftRing,
    coords: Vec<u64>,
}

impl TryFrom<ScalarLiteral> for LiftScalar {
    type Error = LiftError;

    fn try_from(lit: ScalarLiteral) -> Result<Self, LiftError> {
        let ring = LiftRing::new(lit.p, lit.depth)?;
        if let Some(&value) = lit.coords.iter().find(|&&c| c < 0 || c as u64 >= ring.modulus) {
            return Err(LiftError::CoordinateOutOfRange { value, modulus: ring.modulus });
        }
        ring.scalar(&lit.coords)
    }
}

impl From<LiftScalar> for ScalarLiteral {
    fn from(x: LiftScalar) -> Self {
        ScalarLiteral {
            p: x.ring.p,
            depth: x.ring.depth,
            coords: x.coords.iter().map(|&c| c as i64).collect(),
        }
    }
}

impl LiftScalar {
    pub fn ring(&self) -> LiftRing {
        self.ring
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ring, other.ring);
        let m = self.ring.modulus;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| (a + b) % m).collect();
        LiftScalar { ring: self.ring, coords }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ring, other.ring);
        let m = self.ring.modulus;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| (a + m - b) % m).collect();
        LiftScalar { ring: self.ring, coords }
    }

    pub fn neg(&self) -> Self {
        self.ring.zero().sub(self)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ring, other.ring);
        let p = self.ring.p as usize;
        let m = self.ring.modulus;
        if p == 2 {
            return LiftScalar { ring: self.ring, coords: vec![self.coords[0] * other.coords[0] % m] };
        }
        // Multiply in Z[zeta]/(zeta^p - 1), then fold zeta^(p-1) = -(1 + ... + zeta^(p-2)).
        let mut buf = vec![0u64; p];
        for (i, &a) in self.coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coords.iter().enumerate() {
                let k = (i + j) % p;
                buf[k] = (buf[k] + a * b % m) % m;
            }
        }
        let top = buf[p - 1];
        let coords = buf[..p - 1].iter().map(|&c| (c + m - top) % m).collect();
        LiftScalar { ring: self.ring, coords }
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut out = self.ring.one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        out
    }

    /// Image in the residue field `F_p` (`zeta -> 1`).
    pub fn reduce(&self) -> u64 {
        let p = self.ring.p;
        self.coords.iter().fold(0, |acc, &c| (acc + c % p) % p)
    }

    pub fn is_unit(&self) -> bool {
        self.reduce() != 0
    }

    pub fn inverse(&self) -> Result<Self, LiftError> {
        let r = self.reduce();
        if r == 0 {
            return Err(LiftError::NotAUnit);
        }
        let one = self.ring.one();
        let two = self.ring.from_int(2);
        let mut z = self.ring.from_int(inv_mod(r, self.ring.p).expect("unit residue") as i64);
        // Newton: z <- z (2 - x z); the error squares each round.
        for _ in 0..64 {
            let xz = self.mul(&z);
            if xz == one {
                return Ok(z);
            }
            z = z.mul(&two.sub(&xz));
        }
        unreachable!("inverse iteration failed to converge")
    }

    /// Coordinates in the basis `1, pi, ..., pi^(p-2)` with `pi = zeta - 1`.
    fn uniformizer_coords(&self) -> Vec<u64> {
        let p = self.ring.p as usize;
        let m = self.ring.modulus;
        let rank = p - 1;
        // zeta^i = (1 + pi)^i = sum_j C(i, j) pi^j, and i <= p - 2 keeps j in range.
        let mut binom = vec![vec![0u64; rank]; rank];
        for i in 0..rank {
            binom[i][0] = 1;
            for j in 1..=i {
                binom[i][j] = (binom[i - 1][j - 1] + binom[i - 1][j]) % m;
            }
        }
        (0..rank)
            .map(|j| {
                (0..rank).fold(0u64, |acc, i| (acc + self.coords[i] * binom[i][j] % m) % m)
            })
            .collect()
    }

    /// Normalized valuation with `v(zeta - 1) = 1`.
    pub fn valuation(&self) -> Valuation {
        let rank = self.ring.rank();
        self.uniformizer_coords()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(|(j, &b)| rank * p_adic_valuation(b, self.ring.p) as usize + j)
            .min()
            .map_or(Valuation::AtLeast(self.ring.valuation_bound()), Valuation::Finite)
    }
}

impl fmt::Debug for LiftScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LiftScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

/// JSON literal `{"p", "M", "precision", "coeffs": [scalar literals]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftSeriesLiteral {
    pub p: u64,
    #[serde(rename = "M")]
    pub depth: u32,
    pub precision: usize,
    pub coeffs: Vec<LiftScalar>,
}

/// Power series over the lifting ring known modulo `T^N`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "LiftSeriesLiteral", into = "LiftSeriesLiteral")]
pub struct LiftSeries {
    ring: LiftRing,
    coeffs: Vec<LiftScalar>,
}

impl TryFrom<LiftSeriesLiteral> for LiftSeries {
    type Error = LiftError;

    fn try_from(lit: LiftSeriesLiteral) -> Result<Self, LiftError> {
        let ring = LiftRing::new(lit.p, lit.depth)?;
        if lit.coeffs.iter().any(|c| c.ring != ring) {
            return Err(LiftError::MismatchedRing);
        }
        LiftSeries::new(ring, lit.precision, lit.coeffs)
    }
}

impl From<LiftSeries> for LiftSeriesLiteral {
    fn from(s: LiftSeries) -> Self {
        LiftSeriesLiteral {
            p: s.ring.p,
            depth: s.ring.depth,
            precision: s.precision(),
            coeffs: s.coeffs,
        }
    }
}

impl LiftSeries {
    /// Missing high coefficients are zero.
    pub fn new(ring: LiftRing, precision: usize, mut coeffs: Vec<LiftScalar>) -> Result<Self, LiftError> {
        if precision == 0 {
            return Err(LiftError::ZeroPrecision);
        }
        if coeffs.len() > precision {
            return Err(LiftError::TooManyCoefficients { len: coeffs.len(), precision });
        }
        coeffs.resize(precision, ring.zero());
        Ok(LiftSeries { ring, coeffs })
    }

    pub fn zero(ring: LiftRing, precision: usize) -> Result<Self, LiftError> {
        Self::new(ring, precision, Vec::new())
    }

    pub fn constant(c: LiftScalar, precision: usize) -> Result<Self, LiftError> {
        Self::new(c.ring, precision, vec![c])
    }

    /// The variable `T`.
    pub fn variable(ring: LiftRing, precision: usize) -> Result<Self, LiftError> {
        Self::new(ring, precision, vec![ring.zero(), ring.one()])
    }

    pub fn ring(&self) -> LiftRing {
        self.ring
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[LiftScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> LiftScalar {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LiftScalar::is_zero)
    }

    pub fn with_precision(&self, precision: usize) -> Result<Self, LiftError> {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(precision);
        Self::new(self.ring, precision, coeffs)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), LiftError> {
        if self.ring != other.ring {
            return Err(LiftError::MismatchedRing);
        }
        if self.precision() != other.precision() {
            return Err(LiftError::MismatchedPrecision(self.precision(), other.precision()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LiftError> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(LiftSeries { ring: self.ring, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LiftError> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect();
        Ok(LiftSeries { ring: self.ring, coeffs })
    }

    pub fn scale(&self, c: &LiftScalar) -> Self {
        LiftSeries { ring: self.ring, coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LiftError> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.precision();
        let mut out = vec![self.ring.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        LiftSeries { ring: self.ring, coeffs: out }
    }

    pub fn unit_inverse(&self) -> Result<Self, LiftError> {
        let inv0 = self.coeffs[0].inverse()?;
        let n = self.precision();
        let mut out = vec![self.ring.zero(); n];
        out[0] = inv0.clone();
        for k in 1..n {
            let mut s = self.ring.zero();
            for i in 1..=k {
                s = s.add(&self.coeffs[i].mul(&out[k - i]));
            }
            out[k] = s.neg().mul(&inv0);
        }
        Ok(LiftSeries { ring: self.ring, coeffs: out })
    }

    /// `f(g(T))` for `g` with zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self, LiftError> {
        self.check_compatible(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(LiftError::PositiveValuationRequired);
        }
        let n = self.precision();
        let mut acc = Self::constant(self.coeffs[n - 1].clone(), n)?;
        for i in (0..n - 1).rev() {
            acc = acc.mul_unchecked(inner);
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[i]);
        }
        Ok(acc)
    }

    /// `k`-fold self-composition.
    pub fn iterate(&self, k: u64) -> Result<Self, LiftError> {
        let mut out = Self::variable(self.ring, self.precision())?;
        for _ in 0..k {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    pub fn is_variable(&self) -> bool {
        *self == Self::variable(self.ring, self.precision()).expect("valid shape")
    }

    /// Coefficientwise reduction modulo `(zeta - 1, p)`.
    pub fn reduce(&self) -> TruncatedSeries {
        let coeffs: Vec<i64> = self.coeffs.iter().map(|c| c.reduce() as i64).collect();
        TruncatedSeries::from_coeffs(self.ring.p, self.precision(), &coeffs)
            .expect("ring prime and precision are valid")
    }

    /// Low part: the coefficients below `T^d`.
    fn low(&self, d: usize) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().skip(d) {
            *c = self.ring.zero();
        }
        out
    }

    /// High part divided by `T^d`, zero-padded at the top.
    fn high(&self, d: usize) -> Self {
        let mut coeffs: Vec<LiftScalar> = self.coeffs.iter().skip(d).cloned().collect();
        coeffs.resize(self.precision(), self.ring.zero());
        LiftSeries { ring: self.ring, coeffs }
    }
}

/// `f = g * u` with `g` a distinguished polynomial and `u` a unit series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguishedFactorization {
    pub degree: usize,
    /// Coefficients of `g`, ascending, monic of length `degree + 1`.
    pub g: Vec<LiftScalar>,
    pub u: LiftSeries,
    /// Coefficients of `u` below this index do not depend on the unknown
    /// tail of `f` past `T^N`; the ones above are fixed by extending `f`
    /// by zero.
    pub u_determined_below: usize,
}

impl DistinguishedFactorization {
    /// `g` as a series at the precision of `u`.
    pub fn g_series(&self) -> LiftSeries {
        LiftSeries::new(self.u.ring, self.u.precision().max(self.degree + 1), self.g.clone())
            .expect("fits")
            .with_precision(self.u.precision())
            .expect("positive precision")
    }

    pub fn evaluate_g(&self, x: &LiftScalar) -> LiftScalar {
        self.g.iter().rev().fold(x.ring.zero(), |acc, c| acc.mul(x).add(c))
    }

    /// True when `g` is exactly `prod (T - r)` over the given roots.
    pub fn splits_with_roots(&self, roots: &[LiftScalar]) -> bool {
        self.g == monic_from_roots(self.u.ring, roots)
    }
}

/// Coefficients of `prod (T - r)`, ascending.
pub fn monic_from_roots(ring: LiftRing, roots: &[LiftScalar]) -> Vec<LiftScalar> {
    let mut poly = vec![ring.one()];
    for r in roots {
        let mut next = vec![ring.zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].sub(&c.mul(r));
        }
        poly = next;
    }
    poly
}

/// Weierstrass preparation `f = g * u` over the truncated lifting ring.
///
/// With `d` the valuation of the reduction of `f`, this performs the
/// division `T^d = q f + r` (`deg r < d`) by fixed-point iteration; then
/// `g = T^d - r` and `u = q^(-1)`. The iteration map is affine with a
/// nilpotent linear part, so it stabilizes exactly.
///
/// `g` only depends on coefficients of `f` below `d (1 + ceil(E / w))`,
/// where `E = M(p-1)` and `w` is the least valuation among the coefficients
/// below `T^d`; a smaller precision is reported as `PrecisionExhausted`.
/// The unit `u` is only determined modulo a lower power of `T` (see
/// [`DistinguishedFactorization::u_determined_below`]); above that it is the
/// unit for `f` extended by zero, which still gives `g u = f mod T^N`.
pub fn weierstrass_preparation(f: &LiftSeries) -> Result<DistinguishedFactorization, LiftError> {
    let ring = f.ring;
    let n = f.precision();
    let d = match f.reduce().valuation() {
        Valuation::Finite(d) => d,
        Valuation::AtLeast(_) => return Err(LiftError::ReductionVanishes),
    };
    if d == 0 {
        return Ok(DistinguishedFactorization {
            degree: 0,
            g: vec![ring.one()],
            u: f.clone(),
            u_determined_below: n,
        });
    }
    let bound = ring.valuation_bound();
    let least = f.coeffs[..d].iter().filter_map(|c| c.valuation().finite()).min();
    let rounds = least.map_or(0, |w| bound.div_ceil(w));
    let needed = d * (1 + rounds);
    if n < needed {
        return Err(LiftError::PrecisionExhausted { degree: d, needed, have: n });
    }

    // Work at a padded precision so that q is exact below T^N.
    let padded = f.with_precision(n + rounds * d + d)?;
    let low = padded.low(d);
    let high_inv = padded.high(d).unit_inverse()?;
    let w = high_inv.mul_unchecked(&low);
    let one = LiftSeries::constant(ring.one(), padded.precision())?;
    let mut q_shifted = one.clone();
    let mut stable = false;
    for _ in 0..=rounds + 1 {
        let next = one.sub(&q_shifted.mul_unchecked(&w).high(d))?;
        if next == q_shifted {
            stable = true;
            break;
        }
        q_shifted = next;
    }
    if !stable {
        return Err(LiftError::VerificationFailed);
    }
    let q = q_shifted.mul_unchecked(&high_inv);
    let qf = q.mul_unchecked(&padded);
    let mut g: Vec<LiftScalar> = qf.coeffs[..d].to_vec();
    g.push(ring.one());
    let u = q.unit_inverse()?.with_precision(n)?;

    let fact = DistinguishedFactorization {
        degree: d,
        g,
        u,
        u_determined_below: n - rounds.max(1) * d,
    };
    if fact.g_series().mul(&fact.u)? != *f {
        return Err(LiftError::VerificationFailed);
    }
    Ok(fact)
}

/// The homography `zeta T / (1 + c T)`, an automorphism of exact order `p`:
/// its matrix `[[zeta, 0], [c, 1]]` has `p`-th power
/// `[[zeta^p, 0], [c (1 + zeta + ... + zeta^(p-1)), 1]] = 1`.
pub fn homography_lift(c: &LiftScalar, precision: usize) -> Result<LiftSeries, LiftError> {
    if !c.is_unit() {
        return Err(LiftError::NotAUnit);
    }
    if precision < 2 {
        return Err(LiftError::ZeroPrecision);
    }
    let ring = c.ring;
    let denom = LiftSeries::new(ring, precision, vec![ring.one(), c.clone()])?;
    let numer = LiftSeries::new(ring, precision, vec![ring.zero(), ring.zeta()])?;
    numer.mul(&denom.unit_inverse()?)
}

/// Weierstrass factorization of `sigma(T) - T`: the horizontal divisor of
/// fixed points of a lifted automorphism. Its degree is the break of the
/// reduction plus one.
pub fn fixed_point_divisor(sigma: &LiftSeries) -> Result<DistinguishedFactorization, LiftError> {
    if !sigma.coeffs[0].is_zero() {
        return Err(LiftError::NotAnAutomorphism("constant term must vanish".into()));
    }
    let reduction = DiskAutomorphism::new(sigma.reduce())?;
    let expected = reduction.break_number()? as usize + 1;
    let f = sigma.sub(&LiftSeries::variable(sigma.ring, sigma.precision())?)?;
    let fact = weierstrass_preparation(&f)?;
    if fact.degree != expected {
        return Err(LiftError::DegreeMismatch { degree: fact.degree, expected });
    }
    Ok(fact)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, m: u32) -> LiftRing {
        LiftRing::new(p, m).unwrap()
    }

    #[test]
    fn ring_validation() {
        assert_eq!(LiftRing::new(4, 2), Err(LiftError::InvalidPrime(4)));
        assert!(LiftRing::new(3, 0).is_err());
        assert!(LiftRing::new(2, 40).is_err());
        assert_eq!(ring(3, 4).modulus(), 81);
    }

    #[test]
    fn zeta_is_a_primitive_root() {
        for p in [2, 3, 5, 7] {
            let r = ring(p, 3);
            let z = r.zeta();
            assert_eq!(z.pow(p), r.one());
            assert_ne!(z, r.one());
            let sum = (0..p).fold(r.zero(), |acc, k| acc.add(&z.pow(k)));
            assert!(sum.is_zero());
        }
    }

    #[test]
    fn valuations() {
        for p in [2u64, 3, 5, 7] {
            let r = ring(p, 3);
            let pi = r.uniformizer();
            assert_eq!(pi.valuation(), Valuation::Finite(1));
            assert_eq!(r.from_int(p as i64).valuation(), Valuation::Finite(p as usize - 1));
            assert_eq!(r.one().valuation(), Valuation::Finite(0));
            assert_eq!(r.zero().valuation(), Valuation::AtLeast(3 * (p as usize - 1)));
            for k in 0..r.valuation_bound() as u64 {
                assert_eq!(pi.pow(k).valuation(), Valuation::Finite(k as usize));
            }
            assert!(pi.pow(r.valuation_bound() as u64).is_zero());
        }
    }

    #[test]
    fn inverses_and_reduction() {
        let r = ring(5, 3);
        let x = r.scalar(&[3, 1, 4, 1]).unwrap();
        assert_eq!(x.reduce(), 4);
        assert_eq!(x.mul(&x.inverse().unwrap()), r.one());
        assert_eq!(r.uniformizer().inverse(), Err(LiftError::NotAUnit));
        assert_eq!(r.zeta().reduce(), 1);
    }

    #[test]
    fn reduce_examples() {
        let r = ring(3, 3);
        let zeta_t = LiftSeries::new(r, 4, vec![r.zero(), r.zeta()]).unwrap();
        assert_eq!(zeta_t.reduce(), TruncatedSeries::variable(3, 4).unwrap());

        let r2 = ring(2, 4);
        let minus = homography_lift(&r2.one(), 6).unwrap();
        assert_eq!(minus.reduce(), TruncatedSeries::from_coeffs(2, 6, &[0, 1, 1, 1, 1, 1]).unwrap());

        let pt2 = LiftSeries::new(r, 4, vec![r.zero(), r.one(), r.from_int(3)]).unwrap();
        assert_eq!(pt2.reduce(), TruncatedSeries::variable(3, 4).unwrap());
    }

    #[test]
    fn preparation_fixed_point() {
        let r = ring(2, 4);
        let f = LiftSeries::new(r, 16, vec![r.zero(), r.from_int(2), r.one()]).unwrap();
        let fact = weierstrass_preparation(&f).unwrap();
        assert_eq!(fact.degree, 2);
        assert_eq!(fact.g, vec![r.zero(), r.from_int(2), r.one()]);
        assert_eq!(fact.u, LiftSeries::constant(r.one(), 16).unwrap());
    }

    #[test]
    fn preparation_of_order_two_lift() {
        let r = ring(2, 4);
        let sigma = homography_lift(&r.one(), 16).unwrap();
        let t = LiftSeries::variable(r, 16).unwrap();
        let fact = weierstrass_preparation(&sigma.sub(&t).unwrap()).unwrap();
        assert_eq!(fact.g, vec![r.zero(), r.from_int(2), r.one()]);
        // u = -1/(1+T) on the determined range.
        let expected_u = LiftSeries::new(r, 16, vec![r.one(), r.one()])
            .unwrap()
            .unit_inverse()
            .unwrap()
            .scale(&r.from_int(-1));
        assert_eq!(fact.u_determined_below, 8);
        assert_eq!(fact.u.coeffs()[..8], expected_u.coeffs()[..8]);

        // With enough input precision the whole of u mod T^16 is exact.
        let wide = homography_lift(&r.one(), 24).unwrap();
        let t24 = LiftSeries::variable(r, 24).unwrap();
        let fact = weierstrass_preparation(&wide.sub(&t24).unwrap()).unwrap();
        assert_eq!(fact.u.with_precision(16).unwrap(), expected_u);
    }

    #[test]
    fn preparation_degree_zero_and_errors() {
        let r = ring(3, 2);
        let unit = LiftSeries::new(r, 8, vec![r.one(), r.from_int(3)]).unwrap();
        let fact = weierstrass_preparation(&unit).unwrap();
        assert_eq!(fact.degree, 0);
        assert_eq!(fact.u, unit);

        let vanishing = LiftSeries::new(r, 8, vec![r.from_int(3), r.uniformizer()]).unwrap();
        assert_eq!(weierstrass_preparation(&vanishing), Err(LiftError::ReductionVanishes));

        let short = LiftSeries::new(r, 6, vec![r.uniformizer(), r.zero(), r.one()]).unwrap();
        assert!(matches!(weierstrass_preparation(&short), Err(LiftError::PrecisionExhausted { .. })));
    }

    #[test]
    fn homography_order_and_divisor() {
        for p in [2u64, 3, 5] {
            let r = ring(p, 3);
            let n = 2 * (r.valuation_bound() + 1) + 2;
            let sigma = homography_lift(&r.one(), n).unwrap();
            assert!(sigma.iterate(p).unwrap().is_variable());
            assert!(!sigma.iterate(1).unwrap().is_variable());
            let fact = fixed_point_divisor(&sigma).unwrap();
            assert_eq!(fact.degree, 2);
            assert!(fact.splits_with_roots(&[r.zero(), r.uniformizer()]));
            assert!(fact.evaluate_g(&r.uniformizer()).is_zero());
        }
    }

    #[test]
    fn identity_has_no_divisor() {
        let r = ring(3, 2);
        let t = LiftSeries::variable(r, 10).unwrap();
        assert!(matches!(
            fixed_point_divisor(&t),
            Err(LiftError::Automorphism(AutomorphismError::IndistinguishableFromIdentity(10)))
        ));
    }

    #[test]
    fn literals() {
        let x: LiftScalar = serde_json::from_str(r#"{"p":3,"M":2,"coords":[1,8]}"#).unwrap();
        assert_eq!(x, ring(3, 2).scalar(&[1, 8]).unwrap());
        assert!(serde_json::from_str::<LiftScalar>(r#"{"p":3,"M":2,"coords":[9,0]}"#).is_err());
        assert!(serde_json::from_str::<LiftScalar>(r#"{"p":3,"M":2,"coords":[1]}"#).is_err());
        let s = LiftSeries::variable(ring(2, 3), 3).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"p":2,"M":3,"precision":3,"coeffs":[{"p":2,"M":3,"coords":[0]},{"p":2,"M":3,"coords":[1]},{"p":2,"M":3,"coords":[0]}]}"#
        );
        assert_eq!(serde_json::from_str::<LiftSeries>(&json).unwrap(), s);
    }
}
