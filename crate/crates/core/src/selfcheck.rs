//! Property suites over exhaustive ranges, bundled for the `selfcheck`
//! command. Results are deterministic for a given budget and seed.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automorphism::{search_cyclic_elements, sigma_m_example, DiskAutomorphism, FiltrationReport};
use crate::lift::{fixed_point_divisor, homography_lift, LiftRing};
use crate::oort::{
    brute_force_orbit_oracle, genus_check, jumps_to_orbits, orbits_to_jumps, verify_artin_identity,
    OortError,
};
use crate::reports::{different_valuation, artin_table, hasse_arf_holds, herbrand_upper_jumps, JumpProfile};
use crate::series::TruncatedSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Quick,
    Default,
    Deep,
}

impl FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quick" => Ok(Budget::Quick),
            "default" => Ok(Budget::Default),
            "deep" => Ok(Budget::Deep),
            other => Err(format!("unknown budget {other:?} (quick|default|deep)")),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Budget::Quick => "quick",
            Budget::Default => "default",
            Budget::Deep => "deep",
        })
    }
}

struct Ranges {
    sigma_primes: &'static [u64],
    sigma_max_m: u64,
    profile_primes: &'static [u64],
    max_n: u32,
    max_jump: u64,
    lift_primes: &'static [u64],
    lift_depth: u32,
    oracle: &'static [(u64, u32, u64)],
    search: &'static [(u64, usize, usize)],
    random_series: usize,
}

impl Budget {
    fn ranges(self) -> Ranges {
        match self {
            Budget::Quick => Ranges {
                sigma_primes: &[2, 3],
                sigma_max_m: 5,
                profile_primes: &[2, 3],
                max_n: 2,
                max_jump: 20,
                lift_primes: &[2, 3],
                lift_depth: 2,
                oracle: &[(2, 2, 20)],
                search: &[(2, 32, 3)],
                random_series: 10,
            },
            Budget::Default => Ranges {
                sigma_primes: &[2, 3, 5, 7],
                sigma_max_m: 10,
                profile_primes: &[2, 3],
                max_n: 3,
                max_jump: 40,
                lift_primes: &[2, 3, 5],
                lift_depth: 3,
                oracle: &[(2, 2, 40), (3, 2, 30)],
                search: &[(2, 64, 5)],
                random_series: 30,
            },
            Budget::Deep => Ranges {
                sigma_primes: &[2, 3, 5, 7],
                sigma_max_m: 10,
                profile_primes: &[2, 3, 5],
                max_n: 3,
                max_jump: 60,
                lift_primes: &[2, 3, 5, 7],
                lift_depth: 4,
                oracle: &[(2, 2, 60), (3, 2, 60), (2, 3, 60), (3, 3, 60)],
                search: &[(2, 64, 10), (3, 48, 5)],
                random_series: 100,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfCheckReport {
    pub budget: Budget,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

/// Every strictly increasing sequence of `n` positive integers `<= max_jump`.
pub fn all_jump_sequences(n: u32, max_jump: u64) -> Vec<Vec<u64>> {
    fn go(n: u32, start: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == n as usize {
            out.push(cur.clone());
            return;
        }
        for j in start..=max {
            cur.push(j);
            go(n, j + 1, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, max_jump, &mut Vec::new(), &mut out);
    out
}

/// Accumulates cases and remembers the first failure.
struct Tally {
    name: &'static str,
    cases: u64,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, cases: 0, failure: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            pass: self.failure.is_none(),
            cases: self.cases,
            failure: self.failure,
        }
    }
}

fn sigma_family(r: &Ranges) -> CheckResult {
    let mut t = Tally::new("sigma_m_family");
    for &p in r.sigma_primes {
        for m in (1..=r.sigma_max_m).filter(|m| m % p != 0) {
            let n = (m * p + 4) as usize;
            let outcome = sigma_m_example(p, m, n)
                .and_then(|s| Ok((s.order_mod_precision(1)?, s.break_number()?)));
            t.check(outcome == Ok((1, m)), || format!("p={p} m={m}: {outcome:?}"));
        }
    }
    t.finish()
}

fn hasse_arf_equivalence(r: &Ranges) -> CheckResult {
    let mut t = Tally::new("hasse_arf_equivalence");
    for &p in r.profile_primes {
        for n in 1..=r.max_n {
            for jumps in all_jump_sequences(n, r.max_jump) {
                let jp = JumpProfile::new(p, jumps).expect("valid");
                let verdict = hasse_arf_holds(&jp);
                let integral = herbrand_upper_jumps(&jp).iter().all(|u| u.is_integer());
                let orbits = jumps_to_orbits(&jp, false);
                let agree = verdict.pass == integral
                    && verdict.pass == orbits.is_ok()
                    && match &orbits {
                        Err(OortError::HasseArfViolation { index }) => verdict.violation_index == Some(*index),
                        Err(_) => false,
                        Ok(_) => true,
                    };
                t.check(agree, || format!("{jp:?}: verdict {verdict:?}, orbits {orbits:?}"));
            }
        }
    }
    t.finish()
}

fn orbit_round_trip(r: &Ranges) -> CheckResult {
    let mut t = Tally::new("orbit_round_trip");
    for &p in r.profile_primes {
        for n in 1..=r.max_n {
            for jumps in all_jump_sequences(n, r.max_jump) {
                let jp = JumpProfile::new(p, jumps).expect("valid");
                let Ok(op) = jumps_to_orbits(&jp, false) else { continue };
                let i = op.orbit_counts();
                let formula: Vec<u64> = (0..n as usize)
                    .map(|k| (0..=k).map(|l| i[l] * p.pow(l as u32)).sum())
                    .collect();
                let back = orbits_to_jumps(&op);
                t.check(back == jp && formula == jp.jumps(), || {
                    format!("{jp:?}: round trip {back:?}, formula {formula:?}")
                });
            }
        }
    }
    t.finish()
}

fn artin_identity(r: &Ranges) -> CheckResult {
    let mut t = Tally::new("artin_identity_and_genus");
    for &p in r.profile_primes {
        for n in 1..=r.max_n {
            for jumps in all_jump_sequences(n, r.max_jump) {
                let jp = JumpProfile::new(p, jumps.clone()).expect("valid");
                let Ok(op) = jumps_to_orbits(&jp, false) else { continue };
                let fr = FiltrationReport::from_jumps(p, jumps, usize::MAX).expect("valid");
                let verdict = verify_artin_identity(&fr, &op);
                let table = artin_table(&fr);
                let ok = matches!(&verdict, Ok(v) if v.pass)
                    && table.identity_value == different_valuation(&fr) as i64
                    && table.weighted_sum() == 0;
                t.check(ok, || format!("{jp:?}: {verdict:?}"));
                // Riemann-Hurwitz is integral unless p = 2 and j_0 is even.
                let genus = genus_check(&fr, &op);
                let integral_expected = p != 2 || fr.jumps[0] % 2 == 1;
                let ok = match &genus {
                    Ok(g) => integral_expected && g.balanced,
                    Err(OortError::NonIntegralGenus { .. }) => !integral_expected,
                    Err(_) => false,
                };
                t.check(ok, || format!("{jp:?}: genus {genus:?}"));
            }
        }
    }
    t.finish()
}

fn lift_demo(r: &Ranges) -> CheckResult {
    let mut t = Tally::new("lift_weierstrass");
    for &p in r.lift_primes {
        let ring = LiftRing::new(p, r.lift_depth).expect("valid ring");
        let precision = 2 * (ring.valuation_bound() + 1) + 2;
        for c in [1i64, 2, -1, p as i64 + 1].into_iter().filter(|c| c.rem_euclid(p as i64) != 0) {
            let unit = ring.from_int(c);
            let outcome = (|| -> Result<bool, String> {
                let sigma = homography_lift(&unit, precision).map_err(|e| e.to_string())?;
                let order_p = sigma.iterate(p).map_err(|e| e.to_string())?.is_variable();
                let fact = fixed_point_divisor(&sigma).map_err(|e| e.to_string())?;
                let root = ring.uniformizer().mul(&unit.inverse().map_err(|e| e.to_string())?);
                Ok(order_p && fact.degree == 2 && fact.splits_with_roots(&[ring.zero(), root]))
            })();
            t.check(outcome == Ok(true), || format!("p={p} c={c}: {outcome:?}"));
        }
    }
    t.finish()
}

fn oracle_agreement(r: &Ranges) -> CheckResult {
    let mut t = Tally::new("oracle_agreement");
    for &(p, n, max_points) in r.oracle {
        let oracle: BTreeSet<Vec<u64>> = match brute_force_orbit_oracle(p, n, max_points) {
            Ok(entries) => entries.into_iter().map(|e| e.jumps).collect(),
            Err(e) => {
                t.check(false, || format!("oracle p={p} n={n}: {e}"));
                continue;
            }
        };
        // Jumps of profiles within budget are at most max_points - 1.
        let accepted: BTreeSet<Vec<u64>> = all_jump_sequences(n, max_points)
            .into_iter()
            .filter(|j| {
                let jp = JumpProfile::new(p, j.clone()).expect("valid");
                matches!(jumps_to_orbits(&jp, false), Ok(op) if op.total_points() <= max_points)
            })
            .collect();
        t.check(oracle == accepted, || {
            let extra: Vec<_> = oracle.difference(&accepted).take(3).collect();
            let missing: Vec<_> = accepted.difference(&oracle).take(3).collect();
            format!("p={p} n={n}: extra {extra:?}, missing {missing:?}")
        });
    }
    t.finish()
}

fn searched_automorphisms(r: &Ranges, seed: u64) -> CheckResult {
    let mut t = Tally::new("searched_automorphisms");
    for &(p, precision, wanted) in r.search {
        let found = search_cyclic_elements(p, 2, precision, seed, wanted, 20_000);
        let found = match found {
            Ok(f) => f,
            Err(e) => {
                t.check(false, || e.to_string());
                continue;
            }
        };
        t.check(found.len() >= wanted, || format!("p={p}: found {} of {wanted}", found.len()));
        for a in &found {
            let outcome = a.cyclic_filtration(2).map(|fr| {
                let verdict = hasse_arf_holds(&fr.jump_profile());
                let monotone = fr.jumps[1] > fr.jumps[0];
                verdict.pass && monotone && (fr.jumps[1] - fr.jumps[0]) % p == 0
            });
            t.check(outcome == Ok(true), || format!("{:?}: {outcome:?}", a.series()));
        }
    }
    t.finish()
}

fn random_series_laws(r: &Ranges, seed: u64) -> CheckResult {
    let mut t = Tally::new("series_group_laws");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..r.random_series {
        let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let n = rng.gen_range(4..24usize);
        let wild = |rng: &mut ChaCha8Rng| {
            let mut c: Vec<i64> = (0..n).map(|_| rng.gen_range(0..p) as i64).collect();
            c[0] = 0;
            c[1] = 1;
            DiskAutomorphism::new(TruncatedSeries::from_coeffs(p, n, &c).expect("valid"))
                .expect("wild")
        };
        let (a, b, c) = (wild(&mut rng), wild(&mut rng), wild(&mut rng));
        let assoc = a.compose(&b).and_then(|ab| ab.compose(&c))
            == b.compose(&c).and_then(|bc| a.compose(&bc));
        t.check(assoc, || format!("associativity failed for {a:?}, {b:?}, {c:?}"));
        let inverse = a.inverse().and_then(|inv| a.compose(&inv)).map(|x| x.is_identity());
        t.check(inverse == Ok(true), || format!("inverse failed for {a:?}"));
        let conj = b
            .inverse()
            .and_then(|binv| b.compose(&a)?.compose(&binv)).map(|x| x.break_number().ok());
        t.check(conj == Ok(a.break_number().ok()), || format!("conjugation moved the break of {a:?}"));
    }
    t.finish()
}

pub fn run_selfcheck(budget: Budget, seed: u64) -> SelfCheckReport {
    let r = budget.ranges();
    let checks = vec![
        sigma_family(&r),
        hasse_arf_equivalence(&r),
        orbit_round_trip(&r),
        artin_identity(&r),
        lift_demo(&r),
        oracle_agreement(&r),
        searched_automorphisms(&r, seed),
        random_series_laws(&r, seed),
    ];
    SelfCheckReport { budget, seed, pass: checks.iter().all(|c| c.pass), checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jump_sequences() {
        assert_eq!(all_jump_sequences(2, 3), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(all_jump_sequences(3, 40).len(), 9880);
    }

    #[test]
    fn quick_budget_passes() {
        let report = run_selfcheck(Budget::Quick, 1);
        for c in &report.checks {
            assert!(c.pass, "{c:?}");
            assert!(c.cases > 0, "{c:?}");
        }
    }

    #[test]
    fn budget_parsing() {
        assert_eq!("deep".parse::<Budget>(), Ok(Budget::Deep));
        assert!("huge".parse::<Budget>().is_err());
    }
}
