//! Interference-aware link scheduling for device-to-device networks.
//!
//! The crate covers node placement ([`topology`]), channel gains
//! ([`channel`]), information-theoretic independent sets and covers
//! ([`itis`]), priority-based schedulers ([`scheduling`]), rate evaluation
//! ([`rates`]) and a seeded Monte Carlo driver ([`harness`]).

pub mod channel;
pub mod cli;
pub mod error;
pub mod harness;
pub mod itis;
pub mod rates;
pub mod rng;
pub mod scheduling;
pub mod topology;

pub use error::{Error, Result};
