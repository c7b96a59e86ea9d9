//! Acceptance suite: one PASS/FAIL line per criterion, exact integer checks.
//! Run with `cargo test --test acceptance`.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};

use ramify::arith::inv_mod;
use ramify::automorphism::{search_cyclic_elements, sigma_m_example, FiltrationReport};
use ramify::commands;
use ramify::lift::{fixed_point_divisor, homography_lift, LiftRing};
use ramify::oort::{
    brute_force_orbit_oracle, different_balance, fixed_point_count, jumps_to_orbits, orbits_to_jumps,
    verify_artin_identity,
};
use ramify::reports::{different_valuation, hasse_arf_holds, JumpProfile};
use ramify::selfcheck::{all_jump_sequences, Budget};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Naive composition `f(g(t))` mod `t^n` by expanding powers of `g`.
fn naive_compose(p: u64, f: &[u64], g: &[u64]) -> Vec<u64> {
    let n = f.len();
    let mut out = vec![0u64; n];
    let mut power = vec![0u64; n];
    power[0] = 1;
    for &c in f {
        for i in 0..n {
            out[i] = (out[i] + c * power[i]) % p;
        }
        let mut next = vec![0u64; n];
        for i in 0..n {
            for j in 0..n - i {
                next[i + j] = (next[i + j] + power[i] * g[j]) % p;
            }
        }
        power = next;
    }
    out
}

fn is_variable(f: &[u64]) -> bool {
    f.iter().enumerate().all(|(i, &c)| c == u64::from(i == 1))
}

/// Every profile in range: p in {2, 3}, n <= 3, last jump <= 40.
fn profiles() -> Vec<JumpProfile> {
    let mut out = Vec::new();
    for p in [2u64, 3] {
        for n in 1..=3 {
            for j in all_jump_sequences(n, 40) {
                out.push(JumpProfile::new(p, j).expect("valid"));
            }
        }
    }
    out
}

fn report(jp: &JumpProfile) -> FiltrationReport {
    FiltrationReport::from_jumps(jp.p(), jp.jumps().to_vec(), usize::MAX).expect("valid")
}

/// Orders are checked by naive iteration; the break against the leading
/// term `-(1/m) t^(m+1)` of `t (1 + t^m)^(-1/m)`.
fn sigma_family() -> Outcome {
    let mut cases = 0;
    for p in [2u64, 3, 5, 7] {
        for m in (1..=10u64).filter(|m| m % p != 0) {
            let n = (m * p + 4) as usize;
            let sigma = sigma_m_example(p, m, n).map_err(|e| format!("p={p} m={m}: {e}"))?;
            ensure!(sigma.order_mod_precision(1) == Ok(1), "p={p} m={m}: order {:?}", sigma.order_mod_precision(1));
            ensure!(sigma.break_number() == Ok(m), "p={p} m={m}: break {:?}", sigma.break_number());

            let f = sigma.series().coeffs().to_vec();
            let mut iterate = f.clone();
            for k in 1..p {
                ensure!(!is_variable(&iterate), "p={p} m={m}: sigma^{k} is the identity");
                iterate = naive_compose(p, &f, &iterate);
            }
            ensure!(is_variable(&iterate), "p={p} m={m}: sigma^p is not the identity");
            let lead = (p - inv_mod(m, p).expect("unit")) % p;
            let first = (2..n).find(|&i| f[i] != 0);
            ensure!(first == Some(m as usize + 1) && f[m as usize + 1] == lead, "p={p} m={m}: leading term {first:?}");
            cases += 1;
        }
    }
    Ok(format!("{cases} (p, m) pairs"))
}

/// Upper jumps from the integral form of the Herbrand function:
/// `phi(j) * |G_0| = sum_{i=1}^{j} |G_i|`.
fn upper_jumps_integral(fr: &FiltrationReport) -> bool {
    let g0 = fr.group_order(0);
    fr.jumps.iter().all(|&j| (1..=j).map(|i| fr.group_order(i)).sum::<u64>() % g0 == 0)
}

fn hasse_arf_equivalence() -> Outcome {
    let (mut pass, mut total) = (0, 0);
    for jp in profiles() {
        let verdict = hasse_arf_holds(&jp).pass;
        let integral = upper_jumps_integral(&report(&jp));
        let accepted = jumps_to_orbits(&jp, false).is_ok();
        ensure!(verdict == integral && integral == accepted, "{jp:?}: verdict {verdict}, integral {integral}, orbits {accepted}");
        total += 1;
        pass += usize::from(verdict);
    }
    Ok(format!("{total} profiles, {pass} satisfy Hasse-Arf"))
}

fn orbit_formula() -> Outcome {
    let mut cases = 0;
    for jp in profiles() {
        let Ok(op) = jumps_to_orbits(&jp, false) else { continue };
        let (p, s) = (jp.p(), op.point_counts());
        for k in 0..s.len() {
            let expected = (s[0] - 1) + (1..=k).map(|l| p.pow(l as u32) * (s[l] / p.pow(l as u32))).sum::<u64>();
            ensure!(jp.jumps()[k] == expected, "{jp:?}: j_{k} != {expected}");
        }
        ensure!(orbits_to_jumps(&op) == jp, "{jp:?}: round trip gave {:?}", orbits_to_jumps(&op));
        cases += 1;
    }
    Ok(format!("{cases} profiles"))
}

fn artin_identity() -> Outcome {
    let mut cases = 0;
    for jp in profiles() {
        let Ok(op) = jumps_to_orbits(&jp, false) else { continue };
        let fr = report(&jp);
        let verdict = verify_artin_identity(&fr, &op).map_err(|e| e.to_string())?;
        let balance = different_balance(&fr, &op).map_err(|e| e.to_string())?;
        ensure!(verdict.pass && balance.balanced, "{jp:?}: {verdict:?}");
        cases += 1;
    }
    let jp = JumpProfile::new(2, vec![1, 3]).expect("valid");
    let op = jumps_to_orbits(&jp, false).map_err(|e| e.to_string())?;
    let fr = report(&jp);
    let s = op.point_counts();
    let generic: u64 = s.iter().enumerate().map(|(l, &sl)| sl * (2u64.pow(2 - l as u32) - 1)).sum();
    ensure!(different_valuation(&fr) == 8 && generic == 8, "worked case: different {}, generic {generic}", different_valuation(&fr));
    ensure!(op.point_counts() == [2, 2], "worked case: s = {:?}", op.point_counts());
    let counts = (fixed_point_count(&op, 0), fixed_point_count(&op, 1));
    ensure!(counts == (Ok(2), Ok(4)), "worked case: fixed points {counts:?}");
    Ok(format!("{cases} profiles plus p=2, j=[1,3]"))
}

fn lift_demo() -> Outcome {
    for p in [2u64, 3, 5] {
        let ring = LiftRing::new(p, 3).map_err(|e| e.to_string())?;
        let precision = 2 * (ring.valuation_bound() + 1) + 2;
        let sigma = homography_lift(&ring.one(), precision).map_err(|e| e.to_string())?;
        ensure!(!sigma.is_variable(), "p={p}: sigma is the identity");
        for k in 1..p {
            ensure!(!sigma.iterate(k).map_err(|e| e.to_string())?.is_variable(), "p={p}: sigma^{k} = id");
        }
        ensure!(sigma.iterate(p).map_err(|e| e.to_string())?.is_variable(), "p={p}: sigma^p != id");
        let m = sigma.reduce().coeffs().iter().skip(2).position(|&c| c != 0).map(|i| i + 1);
        ensure!(m == Some(1), "p={p}: reduction break {m:?}");
        let fact = fixed_point_divisor(&sigma).map_err(|e| e.to_string())?;
        ensure!(fact.degree == 2, "p={p}: degree {}", fact.degree);
        let f = sigma.sub(&ramify::lift::LiftSeries::variable(ring, precision).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure!(fact.g_series().mul(&fact.u).map_err(|e| e.to_string())? == f, "p={p}: g u != sigma(T) - T");
        if p == 2 {
            ensure!(fact.splits_with_roots(&[ring.zero(), ring.uniformizer()]), "p=2: roots are not {{0, zeta - 1}}");
            ensure!(fact.evaluate_g(&ring.from_int(-2)).is_zero(), "p=2: g(-2) != 0");
        }
    }
    Ok("p in {2, 3, 5} at M = 3".into())
}

fn oracle_agreement() -> Outcome {
    let (p, n, budget) = (2u64, 2u32, 40u64);
    let oracle = brute_force_orbit_oracle(p, n, budget).map_err(|e| e.to_string())?;
    let mut from_oracle = BTreeSet::new();
    for entry in &oracle {
        let expected: Vec<u64> = entry.jumps.iter().map(|j| j + 1).collect();
        ensure!(entry.fixed_point_counts == expected, "oracle entry {entry:?} is inconsistent");
        from_oracle.insert(entry.jumps.clone());
    }
    let accepted: BTreeSet<Vec<u64>> = all_jump_sequences(n, budget)
        .into_iter()
        .filter(|j| {
            let jp = JumpProfile::new(p, j.clone()).expect("valid");
            matches!(jumps_to_orbits(&jp, false), Ok(op) if op.total_points() <= budget)
        })
        .collect();
    let extra: Vec<_> = from_oracle.difference(&accepted).collect();
    let missing: Vec<_> = accepted.difference(&from_oracle).collect();
    ensure!(extra.is_empty() && missing.is_empty(), "extras {extra:?}, omissions {missing:?}");
    Ok(format!("{} profiles", accepted.len()))
}

fn searched_automorphisms() -> Outcome {
    let found = search_cyclic_elements(2, 2, 64, 20_240_601, 5, 20_000).map_err(|e| e.to_string())?;
    let distinct: BTreeSet<_> = found.iter().map(|a| a.series().coeffs().to_vec()).collect();
    ensure!(distinct.len() >= 5, "only {} distinct fixtures", distinct.len());
    let mut seen = Vec::new();
    for a in &found {
        let fr = a.cyclic_filtration(2).map_err(|e| e.to_string())?;
        let verdict = hasse_arf_holds(&fr.jump_profile());
        ensure!(verdict.pass, "{:?}: jumps {:?} fail Hasse-Arf", a.series(), fr.jumps);
        ensure!(fr.jumps[1] % 2 == fr.jumps[0] % 2, "jumps {:?} differ in parity", fr.jumps);
        seen.push(fr.jumps);
    }
    Ok(format!("jumps {seen:?}"))
}

fn determinism() -> Outcome {
    let run = || serde_json::to_string(&commands::selfcheck(Budget::Default, 11).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string());
    let (a, b) = (run()?, run()?);
    ensure!(a == b, "library runs differ");
    let bin = || {
        Command::new(env!("CARGO_BIN_EXE_ramify"))
            .args(["selfcheck", "--seed", "11", "--budget", "quick"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (x, y) = (bin()?, bin()?);
    ensure!(x.status.success() && y.status.success(), "selfcheck exited with {:?}", x.status);
    ensure!(x.stdout == y.stdout, "binary runs differ");
    Ok(format!("{} bytes of JSON", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("sigma_m family: order p, break m", sigma_family),
        ("Hasse-Arf verdict <=> integral upper jumps <=> orbit profile", hasse_arf_equivalence),
        ("jump formula from orbit counts and round trip", orbit_formula),
        ("Artin identity and different balance", artin_identity),
        ("lifted homography: order p, degree-2 divisor, exact factorization", lift_demo),
        ("brute-force G-set oracle agrees with orbit profiles", oracle_agreement),
        ("searched order-p^2 automorphisms satisfy Hasse-Arf", searched_automorphisms),
        ("selfcheck output is deterministic", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
