//! Simulator and exhaustive verifier for self-stabilizing protocols in the
//! shared-register state model.
//!
//! The crate simulates guarded-rule protocols under adversarial schedulers
//! and measures stabilization times exactly at desk scale:
//!
//! * [`topology`] — graphs, generators, and the constants (diameter,
//!   largest hole, cyclomatic characteristic) that bound clock parameters;
//! * [`clock`] — the bounded clock domain and its algebra;
//! * [`engine`] — guarded-rule evaluation, atomic snapshot steps, traces;
//! * [`protocols`] — the bounded-clock unison, the speculatively-stabilizing
//!   mutual-exclusion protocol built on it, and the token-ring baseline;
//! * [`daemons`] — synchronous, random-subset, single-node and scripted
//!   schedulers, plus full choice enumeration for the checker;
//! * [`analysis`] — orbit-based synchronous measurement, unfair-daemon game
//!   search, closure and starvation checks, speculation reports;
//! * [`cli`] — the `stabsim` command-line front end.

pub mod analysis;
pub mod cli;
pub mod clock;
pub mod daemons;
pub mod engine;
pub mod protocols;
pub mod rng;
pub mod topology;
