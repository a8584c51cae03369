//! Capacity solver and cooperative-bin-forward simulator for semideterministic
//! relay channels and partially cribbing multiple-access channels with states.
//!
//! The crate is organized bottom-up:
//!
//! * [`probability`] holds finite pmf tables and the entropy / mutual information measures.
//! * [`channels`] describes the five supported setups and samples them.
//! * [`typicality`] implements the strong-typicality membership test.
//! * [`capacity`] evaluates and maximizes the capacity expressions.
//! * [`simulator`] runs the block-Markov binning scheme end to end.

pub mod capacity;
pub mod channels;
mod error;
pub mod probability;
pub mod rng;
pub mod simulator;
pub mod typicality;

pub use error::{Error, Result};
