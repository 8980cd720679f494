//! Simulation and verification of a market game with short-lived assets.
//!
//! Investors split their wealth across assets whose exogenous payoffs are
//! divided in proportion to the amounts invested. This crate evolves the
//! wealth process in discrete and continuous time, constructs the survival
//! strategy from the payoff model, and measures how strategies fare against
//! it: the submartingale drift of log relative wealth, the closeness integral
//! against `H`, dominance of the survival investor and growth rates.

pub mod config;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod market;
pub mod payoff;
pub mod report;
pub mod rng;
pub mod scenarios;
pub mod simplex;
pub mod strategy;

pub use error::{Error, Result};
pub use market::{MarketSpec, Trajectory, WealthState};
pub use payoff::{Atom, DiscreteIidModel, JumpAtom, KernelSpec, MarkovModulatedModel, PayoffModel};
pub use rng::RngStream;
pub use simplex::{make_simplex, SimplexVector};
pub use strategy::{Schedule, StrategyHandle};
