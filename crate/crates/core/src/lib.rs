//! Exact ramification data for wild automorphisms of the formal disk.
//!
//! * [`series`]: truncated power series over `F_p`.
//! * [`automorphism`]: disk automorphisms, breaks and cyclic filtrations.
//! * [`lift`]: the truncated cyclotomic lifting ring and Weierstrass preparation.
//! * [`reports`]: Artin values, differents, upper numbering, Hasse-Arf verdicts.
//! * [`oort`]: generic-fiber orbit profiles and the two-fiber balance checks.
//! * [`selfcheck`]: exhaustive property suites behind `ramify selfcheck`.
//! * [`commands`]: the `ramify` subcommands.

pub mod arith;
pub mod automorphism;
pub mod lift;
pub mod oort;
pub mod reports;
pub mod series;
pub mod selfcheck;
pub mod commands;
