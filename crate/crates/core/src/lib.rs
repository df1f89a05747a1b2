//! Convex envelopes of boundary data from a stochastic one-player game on
//! random geometric graphs.
//!
//! The pipeline: sample a point cloud ([`geometry`]), build the radius-`r`
//! proximity graph and its annulus stencil ([`rgg`]), solve the min-average
//! dynamic programming principle by monotone value iteration ([`dpp`]),
//! cross-check the solution by simulating the game ([`game`]), and compare
//! against continuum envelopes ([`envelope`]).

pub mod dpp;
pub mod envelope;
pub mod error;
pub mod game;
pub mod geometry;
pub mod rgg;
pub mod rng;

pub use error::{Error, Result};
