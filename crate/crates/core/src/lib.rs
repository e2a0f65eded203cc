//! Simulation core for quantum encryption of classical messages (QECM).
//!
//! Everything here is pure computation over finite-dimensional complex
//! matrices: Wiesner states, Kraus channels and POVMs ([`quantum`]), a
//! quantum-accessible random oracle and keyed pseudorandom function
//! ([`oracle`]), the one-time pad / conjugate / F-conjugate encryption
//! schemes ([`scheme`]), attack strategies including a seesaw optimizer for
//! monogamy-of-entanglement games ([`adversary`]), and exact / Monte Carlo
//! evaluators for the security games ([`games`]).
//!
//! The crate is `no_std` and only needs `alloc`. All randomness is taken from
//! explicitly seeded generators so every result is reproducible.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod adversary;
pub mod bits;
pub mod error;
pub mod games;
pub mod linalg;
pub mod oracle;
pub mod quantum;
pub mod random;
pub mod scheme;

pub use bits::BitString;
pub use error::{Error, Result};
