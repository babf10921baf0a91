//! Post-run summaries: per-synapse counters and the power report.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::netgen::NetworkGraph;
use crate::platform::{max_average_spike_rate, PlatformProfile};
use crate::quantities::{Energy, Length, Power, Time};

use super::config::PowerBudget;
use super::engine::SimOutput;
use super::ledger::{Category, EnergyLedger};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynapseStats {
    pub index: usize,
    pub src: u32,
    pub dst: u32,
    pub inhibitory: bool,
    pub arrivals: u64,
    pub detections: u64,
    pub misses: u64,
    /// Pulses that arrived while the detector was still resetting.
    pub suppressed: u64,
    pub final_weight: f64,
    pub level: Option<u32>,
    pub write_count: u64,
    pub degraded: bool,
    pub min_detection_interval_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynapseReport {
    pub arrivals: u64,
    pub detections: u64,
    pub misses: u64,
    pub suppressed: u64,
    /// Detections over detection trials; `None` before any trial.
    pub detected_fraction: Option<f64>,
    pub stdp_writes: u64,
    /// Updates predicted by the rule that each spike touches √(fan-in)
    /// synapses, for comparison with `stdp_writes`.
    pub sqrt_rule_updates: f64,
    pub degraded: usize,
    pub synapses: Vec<SynapseStats>,
}

impl SynapseReport {
    pub fn from_stats(synapses: Vec<SynapseStats>, sqrt_rule_updates: f64) -> Self {
        let sum = |f: fn(&SynapseStats) -> u64| synapses.iter().map(f).sum::<u64>();
        let detections = sum(|s| s.detections);
        let misses = sum(|s| s.misses);
        let trials = detections + misses;
        Self {
            arrivals: sum(|s| s.arrivals),
            detections,
            misses,
            suppressed: sum(|s| s.suppressed),
            detected_fraction: (trials > 0).then(|| detections as f64 / trials as f64),
            stdp_writes: sum(|s| s.write_count),
            sqrt_rule_updates,
            degraded: synapses.iter().filter(|s| s.degraded).count(),
            synapses,
        }
    }
}

/// Network-level facts the power report needs besides the ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerContext {
    pub n_neurons: usize,
    pub n_synapses: usize,
    pub total_spikes: u64,
    pub w_sy: Length,
    pub budget: Option<Power>,
}

impl PowerContext {
    pub fn from_run(graph: &NetworkGraph, output: &SimOutput, power: &PowerBudget) -> Self {
        Self {
            n_neurons: graph.n(),
            n_synapses: graph.edges().len(),
            total_spikes: output.spikes.total(),
            w_sy: power.w_sy,
            budget: power.budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub duration_s: f64,
    pub specific_power: f64,
    /// Average on-chip dissipation, all categories.
    pub cold_power_w: f64,
    pub dynamic_cold_power_w: f64,
    pub static_cold_power_w: f64,
    pub source_cold_power_w: f64,
    pub wall_power_w: f64,
    pub source_wall_power_w: f64,
    /// On-chip power per synapse footprint w_sy².
    pub power_density_w_per_m2: Option<f64>,
    pub power_density_limit_w_per_m2: f64,
    pub within_power_density_limit: Option<bool>,
    pub mean_rate_hz: f64,
    pub mean_fanout: f64,
    /// Dynamic wall energy per transmitted synapse event.
    pub wall_energy_per_synapse_event_j: Option<f64>,
    pub budget_w: Option<f64>,
    pub budget_utilization: Option<f64>,
    /// Highest mean rate the budget sustains at the measured per-event energy.
    pub budget_max_rate_hz: Option<f64>,
    pub rate_utilization: Option<f64>,
}

pub fn power_report(ledger: &EnergyLedger, duration: Time, profile: &PlatformProfile, ctx: &PowerContext) -> Result<PowerReport> {
    crate::quantities::positive("duration", duration.value())?;
    let d = duration.value();
    let sp = profile.specific_power;
    let cold = ledger.on_chip_total().value() / d;
    let stat = ledger.total(Category::StaticLeakage).value() / d;
    let dynamic = cold - stat;
    let source = ledger.total(Category::SourceOptical).value() / d;
    let density = (ctx.n_synapses > 0).then(|| cold / (ctx.n_synapses as f64 * ctx.w_sy.value().powi(2)));
    let limit = profile.power_density_limit.value();
    let mean_rate = if ctx.n_neurons > 0 { ctx.total_spikes as f64 / (ctx.n_neurons as f64 * d) } else { 0.0 };
    let mean_fanout = if ctx.n_neurons > 0 { ctx.n_synapses as f64 / ctx.n_neurons as f64 } else { 0.0 };
    let events = ledger.events(Category::SourceOptical);
    let per_event = (events > 0).then(|| dynamic * d * sp / events as f64);
    let budget_max_rate = match (ctx.budget, per_event) {
        (Some(b), Some(e)) if e > 0.0 && mean_fanout > 0.0 => {
            Some(max_average_spike_rate(b, ctx.n_neurons as f64, mean_fanout, Energy::new(e))?.value())
        }
        _ => None,
    };
    Ok(PowerReport {
        duration_s: d,
        specific_power: sp,
        cold_power_w: cold,
        dynamic_cold_power_w: dynamic,
        static_cold_power_w: stat,
        source_cold_power_w: source,
        wall_power_w: cold * sp,
        source_wall_power_w: source * sp,
        power_density_w_per_m2: density,
        power_density_limit_w_per_m2: limit,
        within_power_density_limit: density.map(|p| p <= limit),
        mean_rate_hz: mean_rate,
        mean_fanout,
        wall_energy_per_synapse_event_j: per_event,
        budget_w: ctx.budget.map(|b| b.value()),
        budget_utilization: ctx.budget.map(|b| cold * sp / b.value()),
        budget_max_rate_hz: budget_max_rate,
        rate_utilization: budget_max_rate.map(|f| mean_rate / f),
    })
}
