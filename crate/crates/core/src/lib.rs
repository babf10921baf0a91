//! Energy, scaling and spiking-dynamics models for optoelectronic neural
//! hardware: optical link budgets, platform power limits, wafer-scale wiring
//! requirements, random-graph path statistics, an event-driven network
//! simulator with an energy ledger, and a synaptic-memory benchmark.

pub mod error;
pub mod linkbudget;
pub mod membench;
pub mod netgen;
pub mod platform;
pub mod quantities;
pub mod scaling;
pub mod seeding;
pub mod simulator;

pub use error::{Error, Result};
