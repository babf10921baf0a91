//! Seeded discrete-event simulation of an optoelectronic spiking network.
//!
//! A spike schedules one photon-delivery trial per outgoing synapse after the
//! transmit delay. Detected pulses add a weight-scaled increment to the
//! synapse filter; somas integrate the filters, fire on threshold and go
//! refractory. Every energy-bearing event is booked in an [`EnergyLedger`].

mod config;
mod engine;
mod ledger;
mod memory;
mod report;
mod soma;

pub use config::{
    default_link, Drive, MemoryConfig, NeuronParams, PhotodiodeDetection, PlatformChoice, Plasticity, PowerBudget,
    RecordFlags, ResolvedConfig, SimConfig, SynapseTemplate, DEFAULT_LINK_RELIABILITY,
};
pub use engine::{run, SimOutput, Spike, SpikeRecord};
pub use ledger::{Category, CategoryTotal, CompensatedSum, EnergyLedger, LedgerSummary};
pub use memory::{
    apply_stdp, default_max_fluxons, loop_write_energy, weight_to_fluxon_rate, AnalogCell, EndurancePolicy, LoopCell,
    MemoryCell, StdpParams, WriteOutcome, ANALOG_FULL_SCALE_LEVELS, DEFAULT_FLUXON_ENERGY_BUDGET,
    DEFAULT_LOOP_CRITICAL_CURRENT, MAX_LOOP_BITS,
};
pub use report::{power_report, PowerContext, PowerReport, SynapseReport, SynapseStats};
pub use soma::{Kernel, Soma};
