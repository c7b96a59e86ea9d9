//! Wild automorphisms of the formal disk and the lower-numbering ramification
//! filtration of the cyclic group they generate.
//!
//! An automorphism is stored as the series `sigma(t)`, known modulo `t^N`.
//! Every order statement here is an order statement in the finite group
//! `Aut(F_p[t]/(t^N))`, so reports carry the precision they were computed at.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{SeriesError, TruncatedSeries, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomorphismError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("not an automorphism of the disk: {0}")]
    NotAnAutomorphism(&'static str),
    #[error("automorphism is not wild: linear coefficient is {0}, expected 1")]
    NotWild(u64),
    #[error("not an element of order dividing p^{bound} modulo t^{precision}")]
    NotAPnTorsionElement { bound: u32, precision: usize },
    #[error("indistinguishable from the identity modulo t^{0}")]
    IndistinguishableFromIdentity(usize),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("wrong order: {0}")]
    WrongOrder(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "TruncatedSeries", into = "TruncatedSeries")]
pub struct DiskAutomorphism {
    series: TruncatedSeries,
}

impl TryFrom<TruncatedSeries> for DiskAutomorphism {
    type Error = AutomorphismError;

    fn try_from(series: TruncatedSeries) -> Result<Self, Self::Error> {
        DiskAutomorphism::new(series)
    }
}

impl From<DiskAutomorphism> for TruncatedSeries {
    fn from(a: DiskAutomorphism) -> Self {
        a.series
    }
}

impl DiskAutomorphism {
    pub fn new(series: TruncatedSeries) -> Result<Self, AutomorphismError> {
        if series.precision() < 2 {
            return Err(AutomorphismError::NotAnAutomorphism("precision must be at least 2"));
        }
        if series.coeff(0) != 0 {
            return Err(AutomorphismError::NotAnAutomorphism("constant term must vanish"));
        }
        if series.coeff(1) == 0 {
            return Err(AutomorphismError::NotAnAutomorphism("linear term must be a unit"));
        }
        Ok(DiskAutomorphism { series })
    }

    pub fn identity(p: u64, precision: usize) -> Result<Self, AutomorphismError> {
        Self::new(TruncatedSeries::variable(p, precision)?)
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn prime(&self) -> u64 {
        self.series.prime()
    }

    pub fn precision(&self) -> usize {
        self.series.precision()
    }

    pub fn is_wild(&self) -> bool {
        self.series.coeff(1) == 1
    }

    pub fn is_identity(&self) -> bool {
        self.displacement().valuation() == Valuation::AtLeast(self.precision())
    }

    fn require_wild(&self) -> Result<(), AutomorphismError> {
        if self.is_wild() {
            Ok(())
        } else {
            Err(AutomorphismError::NotWild(self.series.coeff(1)))
        }
    }

    /// `sigma(t) - t`.
    pub fn displacement(&self) -> TruncatedSeries {
        let t = TruncatedSeries::variable(self.prime(), self.precision()).expect("valid shape");
        self.series.sub(&t).expect("same shape")
    }

    /// The automorphism `t -> self(other(t))`.
    pub fn compose(&self, other: &Self) -> Result<Self, AutomorphismError> {
        Ok(DiskAutomorphism { series: self.series.compose(&other.series)? })
    }

    pub fn inverse(&self) -> Result<Self, AutomorphismError> {
        Ok(DiskAutomorphism { series: self.series.reversion()? })
    }

    /// `k`-fold composition by binary exponentiation.
    pub fn power(&self, mut k: u64) -> Self {
        let mut out = Self::identity(self.prime(), self.precision()).expect("valid shape");
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                out = out.compose(&base).expect("same shape");
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base).expect("same shape");
            }
        }
        out
    }

    /// Smallest `e <= bound` with `self^(p^e) = id` modulo `t^N`.
    pub fn order_mod_precision(&self, bound: u32) -> Result<u32, AutomorphismError> {
        self.require_wild()?;
        let p = self.prime();
        let mut current = self.clone();
        for e in 0..=bound {
            if current.is_identity() {
                return Ok(e);
            }
            if e < bound {
                current = current.power(p);
            }
        }
        Err(AutomorphismError::NotAPnTorsionElement { bound, precision: self.precision() })
    }

    /// The break `b = v(sigma(t) - t) - 1`: `sigma` lies in `G_b` but not `G_{b+1}`.
    pub fn break_number(&self) -> Result<u64, AutomorphismError> {
        self.require_wild()?;
        match self.displacement().valuation() {
            Valuation::Finite(v) => Ok(v as u64 - 1),
            Valuation::AtLeast(n) => Err(AutomorphismError::IndistinguishableFromIdentity(n)),
        }
    }

    /// Breaks of `self^(p^k)` for `k = 0, 1, ...` until the power becomes the
    /// identity modulo `t^N`.
    pub fn power_breaks(&self) -> Result<Vec<u64>, AutomorphismError> {
        self.require_wild()?;
        let mut breaks = Vec::new();
        let mut current = self.clone();
        while !current.is_identity() {
            breaks.push(current.break_number()?);
            current = current.power(self.prime());
        }
        Ok(breaks)
    }

    /// Ramification filtration of the cyclic group generated by an element of
    /// order exactly `p^n` (modulo `t^N`).
    ///
    /// The jumps are `j_k = break(self^(p^k))`: the subgroup `G_{j_k}` is
    /// generated by `self^(p^k)`.
    pub fn cyclic_filtration(&self, n: u32) -> Result<FiltrationReport, AutomorphismError> {
        let order = match self.order_mod_precision(n) {
            Ok(e) => e,
            Err(AutomorphismError::NotAPnTorsionElement { bound, precision }) => {
                return Err(AutomorphismError::WrongOrder(format!(
                    "power p^{bound} is not the identity modulo t^{precision}"
                )))
            }
            Err(e) => return Err(e),
        };
        if order < n {
            return Err(AutomorphismError::InsufficientPrecision(format!(
                "power p^{order} is already the identity modulo t^{}; cannot see order p^{n}",
                self.precision()
            )));
        }
        let breaks = self.power_breaks()?;
        debug_assert_eq!(breaks.len(), n as usize);
        FiltrationReport::from_jumps(self.prime(), breaks, self.precision())
    }
}

/// Lower-numbering filtration `G_0 >= G_1 >= ...` of a cyclic group of order
/// `p^n`, described by its jumps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationReport {
    pub p: u64,
    pub n: u32,
    pub jumps: Vec<u64>,
    /// `(i, |G_i|)` for `0 <= i <= j_{n-1} + 1`.
    pub group_orders: Vec<(u64, u64)>,
    pub precision_used: usize,
}

impl FiltrationReport {
    pub fn from_jumps(p: u64, jumps: Vec<u64>, precision: usize) -> Result<Self, AutomorphismError> {
        let invalid = |msg: String| Err(AutomorphismError::InvalidFiltration(msg));
        if jumps.first() == Some(&0) {
            return invalid("jumps must be positive".into());
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("jumps {jumps:?} are not strictly increasing"));
        }
        if let Some(&last) = jumps.last() {
            if last + 1 >= precision as u64 {
                return invalid(format!("jump {last} is not visible modulo t^{precision}"));
            }
        }
        let n = jumps.len() as u32;
        if p.checked_pow(n).is_none() {
            return invalid(format!("group order {p}^{n} overflows"));
        }
        let last = jumps.last().copied().unwrap_or(0);
        let group_orders = (0..=last + 1)
            .map(|i| {
                // |G_i| = p^(n-k) for the first k with i <= j_k.
                let k = jumps.iter().position(|&j| i <= j).unwrap_or(n as usize) as u32;
                (i, p.pow(n - k))
            })
            .collect();
        Ok(FiltrationReport { p, n, jumps, group_orders, precision_used: precision })
    }

    /// `|G_i|`; trivial past the last jump.
    pub fn group_order(&self, i: u64) -> u64 {
        self.group_orders
            .iter()
            .find(|&&(idx, _)| idx == i)
            .map(|&(_, order)| order)
            .unwrap_or(1)
    }

    /// `gcd(j_0, p) = 1`, which every genuine automorphism satisfies.
    pub fn first_jump_prime_to_p(&self) -> bool {
        self.jumps.first().is_none_or(|j| j % self.p != 0)
    }
}

/// The order-`p` element `t * (1 + t^m)^(-1/m)` of break `m`.
///
/// Its iterates are `t * (1 + k t^m)^(-1/m)`, so it has order exactly `p`.
pub fn sigma_m_example(p: u64, m: u64, precision: usize) -> Result<DiskAutomorphism, AutomorphismError> {
    if m == 0 || m.is_multiple_of(p) {
        return Err(SeriesError::RootObstruction(format!("gcd({m}, {p}) != 1")).into());
    }
    if precision as u64 <= m * p {
        return Err(AutomorphismError::InsufficientPrecision(format!(
            "precision {precision} must exceed m*p = {}",
            m * p
        )));
    }
    let base = TruncatedSeries::one(p, precision)?
        .add(&TruncatedSeries::monomial(p, precision, m as usize, 1)?)?;
    let unit = base.unit_inverse()?.nth_root(m)?;
    DiskAutomorphism::new(unit.shift_up(1))
}

/// Randomized search for elements of order exactly `p^exponent` in
/// `Aut(F_p[t]/(t^N))`.
///
/// Candidates are `t + c t^(b+1) + (random higher terms)` with a random
/// starting break `b` prime to `p`, as for genuine finite-order elements.
/// The order test is exact; the sampling only steers it toward breaks where
/// the requested order is common. Results are distinct
/// and returned in discovery order, which depends only on the seed.
pub fn search_cyclic_elements(
    p: u64,
    exponent: u32,
    precision: usize,
    seed: u64,
    wanted: usize,
    max_attempts: usize,
) -> Result<Vec<DiskAutomorphism>, AutomorphismError> {
    if precision < 4 {
        return Err(AutomorphismError::InsufficientPrecision(format!(
            "precision {precision} is too small to search"
        )));
    }
    // Validates the prime.
    TruncatedSeries::zero(p, precision)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_break = ((precision - 2) / p as usize).max(1);
    let mut seen = BTreeSet::new();
    let mut found = Vec::new();
    for _ in 0..max_attempts {
        if found.len() >= wanted {
            break;
        }
        let b = rng.gen_range(1..=max_break);
        if (b as u64).is_multiple_of(p) {
            continue;
        }
        let mut coeffs = vec![0i64; precision];
        coeffs[1] = 1;
        coeffs[b + 1] = rng.gen_range(1..p) as i64;
        for c in coeffs.iter_mut().skip(b + 2) {
            *c = rng.gen_range(0..p) as i64;
        }
        let candidate = DiskAutomorphism::new(TruncatedSeries::from_coeffs(p, precision, &coeffs)?)?;
        if seen.contains(&coeffs) {
            continue;
        }
        if candidate.order_mod_precision(exponent) == Ok(exponent) {
            seen.insert(coeffs);
            found.push(candidate);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn auto(p: u64, n: usize, c: &[i64]) -> DiskAutomorphism {
        DiskAutomorphism::new(TruncatedSeries::from_coeffs(p, n, c).unwrap()).unwrap()
    }

    /// `t/(1+kt)` expanded directly.
    fn homography(p: u64, n: usize, k: i64) -> DiskAutomorphism {
        let coeffs: Vec<i64> = (0..n)
            .map(|i| if i == 0 { 0 } else { (-k).rem_euclid(p as i64).pow(i as u32 - 1) })
            .collect();
        let coeffs: Vec<i64> = coeffs.iter().map(|c| c % p as i64).collect();
        auto(p, n, &coeffs)
    }

    #[test]
    fn construction_checks() {
        let p = 3;
        assert!(DiskAutomorphism::new(TruncatedSeries::from_coeffs(p, 5, &[1, 1]).unwrap()).is_err());
        assert!(DiskAutomorphism::new(TruncatedSeries::from_coeffs(p, 5, &[0, 0, 1]).unwrap()).is_err());
        let tame = auto(p, 5, &[0, 2]);
        assert!(!tame.is_wild());
        assert_eq!(tame.break_number(), Err(AutomorphismError::NotWild(2)));
    }

    #[test]
    fn composition_of_order_two_homography() {
        let sigma = homography(2, 8, 1);
        assert!(sigma.compose(&sigma).unwrap().is_identity());
        let id = DiskAutomorphism::identity(2, 8).unwrap();
        assert_eq!(sigma.compose(&id).unwrap(), sigma);
    }

    #[test]
    fn powers() {
        let sigma = homography(5, 12, 1);
        assert_eq!(sigma.power(1), sigma);
        assert!(sigma.power(0).is_identity());
        for k in 0..5 {
            assert_eq!(sigma.power(k), homography(5, 12, k as i64));
        }
        assert!(sigma.power(5).is_identity());
    }

    #[test]
    fn order_examples() {
        let id = DiskAutomorphism::identity(3, 16).unwrap();
        assert_eq!(id.order_mod_precision(2), Ok(0));
        assert_eq!(homography(3, 16, 1).order_mod_precision(1), Ok(1));
        let a = auto(2, 16, &[0, 1, 1]);
        assert_eq!(
            a.order_mod_precision(1),
            Err(AutomorphismError::NotAPnTorsionElement { bound: 1, precision: 16 })
        );
    }

    #[test]
    fn break_examples() {
        assert_eq!(homography(3, 10, 1).break_number(), Ok(1));
        assert_eq!(sigma_m_example(5, 3, 20).unwrap().break_number(), Ok(3));
        let almost_id = auto(3, 6, &[0, 1]);
        assert_eq!(almost_id.break_number(), Err(AutomorphismError::IndistinguishableFromIdentity(6)));
    }

    #[test]
    fn filtration_examples() {
        let fr = homography(2, 8, 1).cyclic_filtration(1).unwrap();
        assert_eq!(fr.jumps, vec![1]);
        assert_eq!(fr.group_orders, vec![(0, 2), (1, 2), (2, 1)]);
        assert_eq!(fr.precision_used, 8);

        let fr = sigma_m_example(3, 2, 16).unwrap().cyclic_filtration(1).unwrap();
        assert_eq!(fr.jumps, vec![2]);
    }

    #[test]
    fn filtration_order_errors() {
        let sigma = homography(3, 12, 1);
        assert!(matches!(sigma.cyclic_filtration(2), Err(AutomorphismError::InsufficientPrecision(_))));
        let wild_infinite = auto(2, 16, &[0, 1, 1]);
        assert!(matches!(wild_infinite.cyclic_filtration(1), Err(AutomorphismError::WrongOrder(_))));
    }

    #[test]
    fn report_table_for_two_jumps() {
        let fr = FiltrationReport::from_jumps(2, vec![1, 3], 10).unwrap();
        assert_eq!(fr.group_orders, vec![(0, 4), (1, 4), (2, 2), (3, 2), (4, 1)]);
        assert_eq!(fr.group_order(17), 1);
        assert!(FiltrationReport::from_jumps(2, vec![3, 3], 10).is_err());
        assert!(FiltrationReport::from_jumps(2, vec![1, 9], 10).is_err());
        assert!(FiltrationReport::from_jumps(2, vec![0], 10).is_err());
        let trivial = FiltrationReport::from_jumps(2, vec![], 10).unwrap();
        assert_eq!(trivial.group_orders, vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn sigma_m_first_example() {
        let sigma = sigma_m_example(2, 1, 8).unwrap();
        assert_eq!(sigma.series().coeffs(), &[0, 1, 1, 1, 1, 1, 1, 1]);
        assert!(matches!(sigma_m_example(3, 3, 20), Err(AutomorphismError::Series(SeriesError::RootObstruction(_)))));
        assert!(matches!(sigma_m_example(3, 2, 6), Err(AutomorphismError::InsufficientPrecision(_))));
    }

    #[test]
    fn report_json_shape() {
        let fr = FiltrationReport::from_jumps(2, vec![1], 8).unwrap();
        assert_eq!(
            serde_json::to_string(&fr).unwrap(),
            r#"{"p":2,"n":1,"jumps":[1],"group_orders":[[0,2],[1,2],[2,1]],"precision_used":8}"#
        );
    }

    #[test]
    fn search_is_seeded() {
        let a = search_cyclic_elements(2, 2, 32, 7, 3, 400).unwrap();
        let b = search_cyclic_elements(2, 2, 32, 7, 3, 400).unwrap();
        assert_eq!(a, b);
        for x in &a {
            assert_eq!(x.order_mod_precision(2), Ok(2));
        }
    }
}
