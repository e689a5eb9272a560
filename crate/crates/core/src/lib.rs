//! Models and analyses of evolving software systems: tinkered network
//! growth, motif statistics, rank-popularity laws, language competition,
//! frequency-dependent cultural selection, complexity-based imitation
//! detection, dependency extraction and inter-event statistics.
//!
//! Continuous models are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix them to `f64`, the precision the CLI uses.

// `!(x > 0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexity;
pub mod depgraph;
pub mod distfit;
pub mod eco;
pub mod error;
pub mod fds;
pub mod graph;
pub mod growth;
pub mod motif;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod synth;
pub mod temporal;

pub use error::{Error, Result};
pub use graph::{CanonicalCode, DirectedGraph, NodeId};
pub use rng::SimRng;
pub use scalar::Real;

pub type PowerLawFit = distfit::PowerLawFit<f64>;
pub type ExponentialFit = distfit::ExponentialFit<f64>;
pub type WeibullFit = distfit::WeibullFit<f64>;
pub type DgbdFit = distfit::DgbdFit<f64>;
pub type CompetitionParams = eco::CompetitionParams<f64>;
pub type CompetitionState = eco::CompetitionState<f64>;
pub type CompetitionTrajectory = eco::CompetitionTrajectory<f64>;
pub type FdsParams = fds::FdsParams<f64>;
pub type TraitPopulation = fds::TraitPopulation<f64>;
pub type PunctuationEvent = fds::PunctuationEvent<f64>;
pub type FdsRun = fds::FdsRun<f64>;
pub type InvasionBarrier = fds::InvasionBarrier<f64>;
pub type LineFit = stats::LineFit<f64>;
