//! Branch points on the generic fiber of a lifted cyclic action.
//!
//! For `G = Z/p^n` acting on a lift, the generic-fiber branch points form a
//! `G`-set. `s_k` counts those with stabilizer of order exactly `p^(n-k)`;
//! they fall into orbits of size `p^k`. Points are tame there, so each fixed
//! point contributes `-1` to the Artin value of a nontrivial element and
//! `|stabilizer| - 1` to the different. Balancing these against the special
//! fiber forces
//!
//! ```text
//! s_0 = j_0 + 1,   s_k = j_k - j_{k-1}   (k >= 1)
//! ```
//!
//! so `p^k | j_k - j_{k-1}` is exactly the orbit-size constraint. The level-0
//! orbit count reported as `i_0` is `s_0 - 1`; with that label
//! `j_k = i_0 + i_1 p + ... + i_k p^k`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::automorphism::FiltrationReport;
use crate::reports::{different_valuation, JumpProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OortError {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),
    #[error("invalid orbit profile: {0}")]
    InvalidProfile(String),
    #[error("Hasse-Arf violation at index {index}: level size is not divisible by p^{index}")]
    HasseArfViolation { index: usize },
    #[error("strict mode: j_0 = {j0} is divisible by p = {p}")]
    StrictViolation { j0: u64, p: u64 },
    #[error("break index {k} out of range for n = {n}")]
    IndexOutOfRange { k: usize, n: u32 },
    #[error("filtration (p = {fr_p}, n = {fr_n}) and orbit profile (p = {op_p}, n = {op_n}) do not match")]
    ProfileMismatch { fr_p: u64, fr_n: u32, op_p: u64, op_n: u32 },
    #[error("Riemann-Hurwitz gives 2g = {twice_genus}, not a nonnegative even integer")]
    NonIntegralGenus { twice_genus: i64 },
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),
}

/// Generic-fiber branch points stratified by stabilizer order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OrbitProfileLiteral", into = "OrbitProfileLiteral")]
pub struct OrbitProfile {
    p: u64,
    s: Vec<u64>,
    strict: bool,
}

/// JSON form `{"p", "n", "s", "i", "strict"}`; `n` and `i` are optional on
/// input and checked when present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitProfileLiteral {
    pub p: u64,
    #[serde(default)]
    pub n: Option<u32>,
    pub s: Vec<u64>,
    #[serde(default)]
    pub i: Option<Vec<u64>>,
    #[serde(default)]
    pub strict: bool,
}

impl TryFrom<OrbitProfileLiteral> for OrbitProfile {
    type Error = OortError;

    fn try_from(lit: OrbitProfileLiteral) -> Result<Self, OortError> {
        if let Some(n) = lit.n {
            if n as usize != lit.s.len() {
                return Err(OortError::InvalidProfile(format!(
                    "declared n = {n} but {} levels given",
                    lit.s.len()
                )));
            }
        }
        let op = OrbitProfile::new(lit.p, lit.s, lit.strict)?;
        if let Some(i) = lit.i {
            if i != op.orbit_counts() {
                return Err(OortError::InvalidProfile(format!(
                    "orbit counts {i:?} disagree with point counts (expected {:?})",
                    op.orbit_counts()
                )));
            }
        }
        Ok(op)
    }
}

impl From<OrbitProfile> for OrbitProfileLiteral {
    fn from(op: OrbitProfile) -> Self {
        OrbitProfileLiteral {
            p: op.p,
            n: Some(op.n()),
            i: Some(op.orbit_counts()),
            s: op.s,
            strict: op.strict,
        }
    }
}

impl OrbitProfile {
    pub fn new(p: u64, s: Vec<u64>, strict: bool) -> Result<Self, OortError> {
        if !is_prime(p) {
            return Err(OortError::InvalidPrime(p));
        }
        let Some(&s0) = s.first() else {
            return Err(OortError::InvalidProfile("at least one level is required".into()));
        };
        if s0 < 2 {
            return Err(OortError::InvalidProfile(format!(
                "s_0 = {s0}: a nontrivial wild action fixes at least 2 points"
            )));
        }
        if p.checked_pow(s.len() as u32).is_none() {
            return Err(OortError::InvalidProfile(format!("group order {p}^{} overflows", s.len())));
        }
        for (k, &sk) in s.iter().enumerate().skip(1) {
            if sk == 0 {
                return Err(OortError::InvalidProfile(format!(
                    "level {k} is empty, so j_{k} would not be a jump"
                )));
            }
            if sk % p.pow(k as u32) != 0 {
                return Err(OortError::HasseArfViolation { index: k });
            }
        }
        if strict && (s0 - 1) % p == 0 {
            return Err(OortError::StrictViolation { j0: s0 - 1, p });
        }
        Ok(OrbitProfile { p, s, strict })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.s.len() as u32
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    /// Point counts `s_0, ..., s_{n-1}`.
    pub fn point_counts(&self) -> &[u64] {
        &self.s
    }

    /// `[s_0 - 1, s_1 / p, ..., s_{n-1} / p^(n-1)]`.
    pub fn orbit_counts(&self) -> Vec<u64> {
        self.s
            .iter()
            .enumerate()
            .map(|(k, &sk)| if k == 0 { sk - 1 } else { sk / self.p.pow(k as u32) })
            .collect()
    }

    pub fn total_points(&self) -> u64 {
        self.s.iter().sum()
    }
}

pub fn jumps_to_orbits(jp: &JumpProfile, strict: bool) -> Result<OrbitProfile, OortError> {
    let jumps = jp.jumps();
    let Some(&j0) = jumps.first() else {
        return Err(OortError::InvalidProfile("the trivial filtration has no branch points".into()));
    };
    let mut s = vec![j0 + 1];
    for (k, w) in jumps.windows(2).enumerate() {
        let level = w[1] - w[0];
        if level % jp.p().pow(k as u32 + 1) != 0 {
            return Err(OortError::HasseArfViolation { index: k + 1 });
        }
        s.push(level);
    }
    OrbitProfile::new(jp.p(), s, strict)
}

pub fn orbits_to_jumps(op: &OrbitProfile) -> JumpProfile {
    let jumps = op
        .s
        .iter()
        .scan(0u64, |acc, &sk| {
            *acc += sk;
            Some(*acc - 1)
        })
        .collect();
    JumpProfile::new(op.p, jumps).expect("orbit profile invariants give valid jumps")
}

/// Generic branch points fixed by an element of exact break `j_k`:
/// `s_0 + ... + s_k`.
pub fn fixed_point_count(op: &OrbitProfile, k: usize) -> Result<u64, OortError> {
    if k >= op.s.len() {
        return Err(OortError::IndexOutOfRange { k, n: op.n() });
    }
    Ok(op.s[..=k].iter().sum())
}

fn check_shared(fr: &FiltrationReport, op: &OrbitProfile) -> Result<(), OortError> {
    if fr.p != op.p || fr.n != op.n() {
        return Err(OortError::ProfileMismatch { fr_p: fr.p, fr_n: fr.n, op_p: op.p, op_n: op.n() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassBalance {
    pub k: usize,
    pub break_number: u64,
    /// `-(j_k + 1)`.
    pub special: i64,
    /// `-(number of fixed generic branch points)`.
    pub generic: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentBalance {
    pub special: u64,
    /// `sum_l s_l (p^(n-l) - 1)`.
    pub generic: u64,
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtinIdentityVerdict {
    pub pass: bool,
    pub classes: Vec<ClassBalance>,
    pub different: DifferentBalance,
    pub first_failure: Option<usize>,
}

/// Different valuations on both fibers.
pub fn different_balance(fr: &FiltrationReport, op: &OrbitProfile) -> Result<DifferentBalance, OortError> {
    check_shared(fr, op)?;
    let special = different_valuation(fr);
    let n = op.n();
    let generic = op
        .s
        .iter()
        .enumerate()
        .map(|(l, &sl)| sl * (op.p.pow(n - l as u32) - 1))
        .sum();
    Ok(DifferentBalance { special, generic, balanced: special == generic })
}

/// Artin values of each nontrivial class and of the identity, special fiber
/// against generic fiber.
pub fn verify_artin_identity(
    fr: &FiltrationReport,
    op: &OrbitProfile,
) -> Result<ArtinIdentityVerdict, OortError> {
    check_shared(fr, op)?;
    let classes: Vec<ClassBalance> = fr
        .jumps
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let special = -(j as i64 + 1);
            let generic = -(fixed_point_count(op, k).expect("k < n") as i64);
            ClassBalance { k, break_number: j, special, generic, pass: special == generic }
        })
        .collect();
    let different = different_balance(fr, op)?;
    let first_failure = classes.iter().position(|c| !c.pass);
    Ok(ArtinIdentityVerdict {
        pass: first_failure.is_none() && different.balanced,
        classes,
        different,
        first_failure,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusCheck {
    pub genus: u64,
    pub balanced: bool,
}

/// Riemann-Hurwitz for a `Z/p^n` cover of a genus-0 curve, on both fibers:
/// `2g - 2 = -2 p^n + deg(different)`.
pub fn genus_check(fr: &FiltrationReport, op: &OrbitProfile) -> Result<GenusCheck, OortError> {
    let balance = different_balance(fr, op)?;
    let order = fr.p.pow(fr.n) as i64;
    let twice = |different: u64| 2 - 2 * order + different as i64;
    let special = twice(balance.special);
    if special < 0 || special % 2 != 0 {
        return Err(OortError::NonIntegralGenus { twice_genus: special });
    }
    Ok(GenusCheck { genus: special as u64 / 2, balanced: special == twice(balance.generic) })
}

/// A finite `Z/p^n`-set given by how many orbits of each size it has:
/// `orbit_counts[k]` orbits isomorphic to `Z/p^k` (stabilizer of order
/// `p^(n-k)`), for `0 <= k <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GSet {
    pub p: u64,
    pub n: u32,
    pub orbit_counts: Vec<u64>,
}

impl GSet {
    /// Points as `(level, residue mod p^level)`; `g` acts by adding `g`.
    fn points(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.orbit_counts.iter().enumerate().flat_map(move |(k, &count)| {
            let size = self.p.pow(k as u32);
            (0..count).flat_map(move |_| (0..size).map(move |x| (k as u32, x)))
        })
    }

    fn acts_trivially(&self, g: u64, (level, x): (u32, u64)) -> bool {
        let size = self.p.pow(level);
        (x + g) % size == x
    }

    pub fn size(&self) -> u64 {
        self.points().count() as u64
    }

    /// Number of points fixed by the group element `g`.
    pub fn fixed_points(&self, g: u64) -> u64 {
        self.points().filter(|&pt| self.acts_trivially(g, pt)).count() as u64
    }

    /// For each `k < n`, the number of points whose stabilizer has order
    /// exactly `p^(n-k)`, found by enumerating the group.
    pub fn stabilizer_profile(&self) -> Vec<u64> {
        let order = self.p.pow(self.n);
        let mut s = vec![0u64; self.n as usize];
        for pt in self.points() {
            let stab = (0..order).filter(|&g| self.acts_trivially(g, pt)).count() as u64;
            for (k, slot) in s.iter_mut().enumerate() {
                if stab == self.p.pow(self.n - k as u32) {
                    *slot += 1;
                }
            }
        }
        s
    }
}

/// All `Z/p^n`-sets with at most `max_points` points, up to isomorphism.
pub fn enumerate_g_sets(p: u64, n: u32, max_points: u64) -> Vec<GSet> {
    fn go(p: u64, n: u32, level: u32, room: u64, counts: &mut Vec<u64>, out: &mut Vec<GSet>) {
        if level > n {
            out.push(GSet { p, n, orbit_counts: counts.clone() });
            return;
        }
        let size = p.pow(level);
        for c in 0..=room / size {
            counts.push(c);
            go(p, n, level + 1, room - c * size, counts, out);
            counts.pop();
        }
    }
    let mut out = Vec::new();
    go(p, n, 0, max_points, &mut Vec::new(), &mut out);
    out
}

/// One realizable profile: fixed-point counts of the generators of
/// `G_{j_0} ⊋ ... ⊋ G_{j_{n-1}}` and the jumps they force.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OracleEntry {
    pub fixed_point_counts: Vec<u64>,
    pub jumps: Vec<u64>,
}

/// Exhaustive oracle for [`jumps_to_orbits`].
///
/// Enumerates every `Z/p^n`-set with at most `max_points` points, counts by
/// brute force the points fixed by `p^k` (a generator of the subgroup of
/// order `p^(n-k)`), turns those counts `F_k` into candidate jumps
/// `j_k = F_k - 1`, and keeps the candidates that form a valid jump
/// profile. Nothing here uses the closed-form level sizes.
pub fn brute_force_orbit_oracle(p: u64, n: u32, max_points: u64) -> Result<BTreeSet<OracleEntry>, OortError> {
    if !is_prime(p) {
        return Err(OortError::InvalidPrime(p));
    }
    let order = p.checked_pow(n).filter(|&o| o <= 27);
    if order.is_none() || max_points > 60 || n == 0 {
        return Err(OortError::BudgetExceeded(format!(
            "need 1 <= n, p^n <= 27 and max_points <= 60 (got p = {p}, n = {n}, max_points = {max_points})"
        )));
    }
    let mut out = BTreeSet::new();
    for gset in enumerate_g_sets(p, n, max_points) {
        let fixed: Vec<u64> = (0..n).map(|k| gset.fixed_points(p.pow(k))).collect();
        if fixed[0] < 2 {
            continue;
        }
        let jumps: Vec<u64> = fixed.iter().map(|f| f - 1).collect();
        if JumpProfile::new(p, jumps.clone()).is_ok() {
            out.insert(OracleEntry { fixed_point_counts: fixed, jumps });
        }
    }
    Ok(out)
}
