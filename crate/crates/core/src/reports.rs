//! Artin values, different valuations, upper numbering and the Hasse-Arf
//! verdict for cyclic `p`-group filtrations.
//!
//! Conventions: `i_G(sigma) = v(sigma(t) - t)`, so an element of exact break
//! `j` has `i_G = j + 1` and Artin value `-(j + 1)`. Residue degrees are 1.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::automorphism::FiltrationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),
    #[error("invalid jump profile: {0}")]
    InvalidJumps(String),
    #[error("declared n = {declared} but {actual} jumps given")]
    LengthMismatch { declared: u32, actual: usize },
}

/// Jumps `j_0 < ... < j_{n-1}` of a cyclic filtration of order `p^n`,
/// without any automorphism attached.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "JumpProfileLiteral", into = "JumpProfileLiteral")]
pub struct JumpProfile {
    p: u64,
    jumps: Vec<u64>,
}

/// JSON form `{"p": .., "n": .., "jumps": [..]}`; `n` is optional on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpProfileLiteral {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub jumps: Vec<u64>,
}

impl TryFrom<JumpProfileLiteral> for JumpProfile {
    type Error = ProfileError;

    fn try_from(lit: JumpProfileLiteral) -> Result<Self, ProfileError> {
        if let Some(n) = lit.n {
            if n as usize != lit.jumps.len() {
                return Err(ProfileError::LengthMismatch { declared: n, actual: lit.jumps.len() });
            }
        }
        JumpProfile::new(lit.p, lit.jumps)
    }
}

impl From<JumpProfile> for JumpProfileLiteral {
    fn from(jp: JumpProfile) -> Self {
        JumpProfileLiteral { p: jp.p, n: Some(jp.n()), jumps: jp.jumps }
    }
}

impl JumpProfile {
    pub fn new(p: u64, jumps: Vec<u64>) -> Result<Self, ProfileError> {
        if !is_prime(p) {
            return Err(ProfileError::InvalidPrime(p));
        }
        if jumps.first() == Some(&0) {
            return Err(ProfileError::InvalidJumps("jumps must be positive".into()));
        }
        if jumps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ProfileError::InvalidJumps(format!("{jumps:?} is not strictly increasing")));
        }
        if p.checked_pow(jumps.len() as u32).is_none() {
            return Err(ProfileError::InvalidJumps(format!("group order {p}^{} overflows", jumps.len())));
        }
        Ok(JumpProfile { p, jumps })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.jumps.len() as u32
    }

    pub fn jumps(&self) -> &[u64] {
        &self.jumps
    }
}

impl FiltrationReport {
    pub fn jump_profile(&self) -> JumpProfile {
        JumpProfile::new(self.p, self.jumps.clone()).expect("reports hold valid jumps")
    }
}

/// Artin value on the class of elements of exact break `break_number`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtinClass {
    pub break_number: u64,
    pub class_size: u64,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtinTable {
    pub p: u64,
    pub n: u32,
    pub residue_degree: u64,
    pub classes: Vec<ArtinClass>,
    pub identity_value: i64,
}

impl ArtinTable {
    /// `sum over sigma of ar(sigma)`, which vanishes.
    pub fn weighted_sum(&self) -> i64 {
        self.identity_value + self.classes.iter().map(|c| c.class_size as i64 * c.value).sum::<i64>()
    }
}

pub fn artin_table(fr: &FiltrationReport) -> ArtinTable {
    let p = fr.p;
    let n = fr.n;
    let classes: Vec<ArtinClass> = fr
        .jumps
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let size = p.pow(n - k as u32) - p.pow(n - k as u32 - 1);
            ArtinClass { break_number: j, class_size: size, value: -(j as i64 + 1) }
        })
        .collect();
    let identity_value = classes.iter().map(|c| c.class_size as i64 * -c.value).sum();
    ArtinTable { p, n, residue_degree: 1, classes, identity_value }
}

/// `sum_{i >= 0} (|G_i| - 1)`.
pub fn different_valuation(fr: &FiltrationReport) -> u64 {
    fr.group_orders.iter().map(|&(_, order)| order - 1).sum()
}

/// Upper-numbering jumps: `u_0 = j_0`, `u_k = u_{k-1} + (j_k - j_{k-1}) / p^k`.
pub fn herbrand_upper_jumps(jp: &JumpProfile) -> Vec<Ratio<u64>> {
    let mut out: Vec<Ratio<u64>> = Vec::with_capacity(jp.jumps.len());
    for (k, &j) in jp.jumps.iter().enumerate() {
        let u = match k {
            0 => Ratio::from_integer(j),
            _ => out[k - 1] + Ratio::new(j - jp.jumps[k - 1], jp.p.pow(k as u32)),
        };
        out.push(u);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseArfVerdict {
    pub pass: bool,
    /// `i_0 = j_0`, `i_k = (j_k - j_{k-1}) / p^k`; on failure, the prefix
    /// before the violation.
    pub coefficients: Vec<u64>,
    /// Upper jumps as `[numerator, denominator]`.
    pub upper_jumps: Vec<(u64, u64)>,
    pub violation_index: Option<usize>,
}

/// Checks `j_k = i_0 + i_1 p + ... + i_k p^k` with integral `i_l`.
///
/// Panics if the divisibility test and the integrality of the upper jumps
/// disagree, which would be a bug.
pub fn hasse_arf_holds(jp: &JumpProfile) -> HasseArfVerdict {
    let mut coefficients = Vec::with_capacity(jp.jumps.len());
    let mut violation_index = None;
    for (k, &j) in jp.jumps.iter().enumerate() {
        if k == 0 {
            coefficients.push(j);
            continue;
        }
        let diff = j - jp.jumps[k - 1];
        let pk = jp.p.pow(k as u32);
        if !diff.is_multiple_of(pk) {
            violation_index = Some(k);
            break;
        }
        coefficients.push(diff / pk);
    }
    let upper = herbrand_upper_jumps(jp);
    let first_fractional = upper.iter().position(|u| !u.is_integer());
    assert_eq!(
        first_fractional, violation_index,
        "divisibility and upper-jump integrality disagree for {jp:?}"
    );
    HasseArfVerdict {
        pass: violation_index.is_none(),
        coefficients,
        upper_jumps: upper.iter().map(|u| (*u.numer(), *u.denom())).collect(),
        violation_index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jp(p: u64, j: &[u64]) -> JumpProfile {
        JumpProfile::new(p, j.to_vec()).unwrap()
    }

    fn report(p: u64, j: &[u64]) -> FiltrationReport {
        FiltrationReport::from_jumps(p, j.to_vec(), 1000).unwrap()
    }

    #[test]
    fn profile_validation() {
        assert_eq!(JumpProfile::new(4, vec![1]), Err(ProfileError::InvalidPrime(4)));
        assert!(JumpProfile::new(2, vec![0, 1]).is_err());
        assert!(JumpProfile::new(2, vec![3, 3]).is_err());
        assert!(JumpProfile::new(2, vec![]).is_ok());
        let lit = r#"{"p":2,"n":3,"jumps":[1,3]}"#;
        assert!(matches!(
            serde_json::from_str::<JumpProfile>(lit),
            Err(e) if e.to_string().contains("declared n = 3")
        ));
        let parsed: JumpProfile = serde_json::from_str(r#"{"p":2,"jumps":[1,3]}"#).unwrap();
        assert_eq!(serde_json::to_string(&parsed).unwrap(), r#"{"p":2,"n":2,"jumps":[1,3]}"#);
    }

    #[test]
    fn artin_single_jump() {
        let t = artin_table(&report(2, &[1]));
        assert_eq!(t.classes, vec![ArtinClass { break_number: 1, class_size: 1, value: -2 }]);
        assert_eq!(t.identity_value, 2);
        assert_eq!(t.weighted_sum(), 0);
    }

    #[test]
    fn artin_two_jumps() {
        let t = artin_table(&report(2, &[1, 3]));
        assert_eq!(t.identity_value, 8);
        assert_eq!(t.classes[0].value, -2);
        assert_eq!(t.classes[0].class_size, 2);
        assert_eq!(t.classes[1].value, -4);
        assert_eq!(t.classes[1].class_size, 1);
        assert_eq!(t.weighted_sum(), 0);
    }

    #[test]
    fn differents() {
        assert_eq!(different_valuation(&report(2, &[1])), 2);
        assert_eq!(different_valuation(&report(2, &[1, 3])), 8);
        assert_eq!(different_valuation(&report(2, &[])), 0);
        assert_eq!(different_valuation(&report(3, &[2])), 6);
    }

    #[test]
    fn upper_jumps() {
        assert_eq!(herbrand_upper_jumps(&jp(2, &[1, 3])), vec![Ratio::from(1), Ratio::from(2)]);
        assert_eq!(herbrand_upper_jumps(&jp(2, &[1, 2])), vec![Ratio::from(1), Ratio::new(3, 2)]);
        assert_eq!(herbrand_upper_jumps(&jp(5, &[7])), vec![Ratio::from(7)]);
    }

    #[test]
    fn verdicts() {
        let v = hasse_arf_holds(&jp(2, &[1, 3]));
        assert!(v.pass);
        assert_eq!(v.coefficients, vec![1, 1]);
        assert_eq!(v.violation_index, None);

        let v = hasse_arf_holds(&jp(2, &[1, 2]));
        assert!(!v.pass);
        assert_eq!(v.violation_index, Some(1));
        assert_eq!(v.upper_jumps, vec![(1, 1), (3, 2)]);

        let v = hasse_arf_holds(&jp(3, &[2, 11, 38]));
        assert!(v.pass);
        // 11 = 2 + 3*3, 38 = 11 + 3*9
        assert_eq!(v.coefficients, vec![2, 3, 3]);
    }

    #[test]
    fn verdict_json_shape() {
        let v = hasse_arf_holds(&jp(2, &[1, 2]));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"pass":false,"coefficients":[1],"upper_jumps":[[1,1],[3,2]],"violation_index":1}"#
        );
    }
}
