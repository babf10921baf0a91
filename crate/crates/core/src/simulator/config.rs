//! Simulation configuration, its JSON schema, and validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::{photons_for_reliability, OpticalLink, ReceiverModel, ReceiverlessPhotodiode, SnspdReceiver};
use crate::netgen::NetworkGraph;
use crate::platform::{PlatformKind, PlatformProfile, SUPERCONDUCTING_4K};
use crate::quantities::{Current, Energy, Length, Power, Probability, Time};

use super::memory::{
    default_max_fluxons, EndurancePolicy, StdpParams, DEFAULT_FLUXON_ENERGY_BUDGET, DEFAULT_LOOP_CRITICAL_CURRENT,
    MAX_LOOP_BITS,
};

/// Detection probability SNSPD links are provisioned for by default.
pub const DEFAULT_LINK_RELIABILITY: f64 = 0.99;

/// A built-in profile by name, or a full custom profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlatformChoice {
    Named(String),
    Custom(PlatformProfile),
}

impl Default for PlatformChoice {
    fn default() -> Self {
        PlatformChoice::Named(SUPERCONDUCTING_4K.to_string())
    }
}

impl PlatformChoice {
    pub fn resolve(&self) -> Result<PlatformProfile> {
        match self {
            PlatformChoice::Named(name) => PlatformProfile::builtin(name).ok_or_else(|| {
                Error::Config(vec![format!(
                    "unknown platform `{name}`; built-in profiles are {}",
                    PlatformProfile::builtin_names().join(", ")
                )])
            }),
            PlatformChoice::Custom(p) => {
                let errs = p.validate();
                if errs.is_empty() {
                    Ok(p.clone())
                } else {
                    Err(Error::Config(errs))
                }
            }
        }
    }
}

fn default_tau_s() -> Time {
    Time::new(1e-6)
}
fn default_weight() -> f64 {
    0.5
}
fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}

/// Parameters shared by all synapses that reference this template through
/// their edge's link index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynapseTemplate {
    /// Optical link; the platform's default link when absent.
    #[serde(default)]
    pub link: Option<OpticalLink>,
    /// Decay constant of the post-synaptic filter.
    #[serde(default = "default_tau_s", rename = "tau_s")]
    pub tau: Time,
    /// Initial weight in units of the soma threshold.
    #[serde(default = "default_weight")]
    pub weight: f64,
    /// Weight represented by a full-scale memory cell.
    #[serde(default = "one")]
    pub max_weight: f64,
}

impl Default for SynapseTemplate {
    fn default() -> Self {
        Self { link: None, tau: default_tau_s(), weight: default_weight(), max_weight: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronParams {
    #[serde(default = "one")]
    pub threshold: f64,
    /// Leak of the soma integrator; defaults to the longest synaptic τ.
    #[serde(default, rename = "tau_soma_s")]
    pub tau_soma: Option<Time>,
    /// Defaults to one SNSPD reset time.
    #[serde(default, rename = "refractory_s")]
    pub refractory: Option<Time>,
    /// Defaults to one SNSPD reset time.
    #[serde(default, rename = "transmit_delay_s")]
    pub transmit_delay: Option<Time>,
    /// Fixed energy per emitted spike for the soma and transmitter driver.
    #[serde(default, rename = "spike_overhead_j")]
    pub spike_overhead: Energy,
    /// Whether a spike also empties the neuron's synaptic filters, so one
    /// volley cannot fire the neuron again after the refractory period.
    #[serde(default = "yes")]
    pub reset_clears_filters: bool,
}

impl Default for NeuronParams {
    fn default() -> Self {
        Self { threshold: 1.0, tau_soma: None, refractory: None, transmit_delay: None, spike_overhead: Energy::ZERO, reset_clears_filters: true }
    }
}

fn default_bits() -> u8 {
    MAX_LOOP_BITS
}
fn default_i_c() -> Current {
    DEFAULT_LOOP_CRITICAL_CURRENT
}
fn default_fluxon_budget() -> Energy {
    DEFAULT_FLUXON_ENERGY_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MemoryConfig {
    Loop {
        #[serde(default = "default_bits")]
        bits: u8,
        #[serde(default = "default_i_c", rename = "i_c_a")]
        i_c: Current,
        /// Energy per detection available for fluxons; sets `max_fluxons`
        /// when that is absent.
        #[serde(default = "default_fluxon_budget", rename = "fluxon_energy_budget_j")]
        fluxon_energy_budget: Energy,
        #[serde(default)]
        max_fluxons: Option<u32>,
    },
    Analog {
        #[serde(default)]
        write_noise: f64,
        #[serde(default)]
        endurance: Option<u64>,
        #[serde(default, rename = "write_energy_j")]
        write_energy: Energy,
    },
}

impl Default for MemoryConfig {
    fn default() -> Self {
        MemoryConfig::Loop {
            bits: MAX_LOOP_BITS,
            i_c: DEFAULT_LOOP_CRITICAL_CURRENT,
            fluxon_energy_budget: DEFAULT_FLUXON_ENERGY_BUDGET,
            max_fluxons: None,
        }
    }
}

fn default_amplitude() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Plasticity {
    #[default]
    Off,
    /// Amplitudes in levels; time constants default to ten mean
    /// inter-spike intervals of the configured drives.
    Stdp {
        #[serde(default = "default_amplitude")]
        a_plus: f64,
        #[serde(default = "default_amplitude")]
        a_minus: f64,
        #[serde(default, rename = "tau_plus_s")]
        tau_plus: Option<Time>,
        #[serde(default, rename = "tau_minus_s")]
        tau_minus: Option<Time>,
        #[serde(default)]
        endurance_policy: EndurancePolicy,
    },
}

/// External stimulus that makes a neuron emit spikes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Drive {
    Poisson {
        neuron: usize,
        rate_hz: f64,
        #[serde(default)]
        start_s: f64,
    },
    Periodic {
        neuron: usize,
        period_s: f64,
        #[serde(default)]
        start_s: f64,
        #[serde(default)]
        count: Option<u64>,
    },
    Schedule {
        neuron: usize,
        times_s: Vec<f64>,
    },
}

impl Drive {
    pub fn neuron(&self) -> usize {
        match self {
            Drive::Poisson { neuron, .. } | Drive::Periodic { neuron, .. } | Drive::Schedule { neuron, .. } => *neuron,
        }
    }

    /// Mean spike rate this drive produces over `duration`.
    pub fn mean_rate(&self, duration: f64) -> f64 {
        match self {
            Drive::Poisson { rate_hz, .. } => *rate_hz,
            Drive::Periodic { period_s, start_s, count, .. } => {
                let span = (duration - start_s).max(0.0);
                let n = (span / period_s).ceil();
                count.map_or(n, |c| n.min(c as f64)) / duration
            }
            Drive::Schedule { times_s, .. } => times_s.iter().filter(|&&t| t < duration).count() as f64 / duration,
        }
    }
}

/// How photodiode receivers decide whether a pulse was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotodiodeDetection {
    /// Detect iff the mean photon number meets the required count.
    #[default]
    Deterministic,
    /// Detect iff a Poisson sample of the photon number meets the required count.
    PoissonThreshold,
}

fn default_trace_tail() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordFlags {
    #[serde(default = "yes")]
    pub spikes: bool,
    #[serde(default = "yes")]
    pub per_neuron_energy: bool,
    /// Events kept for diagnostics when a run aborts.
    #[serde(default = "default_trace_tail")]
    pub trace_tail: usize,
}

impl Default for RecordFlags {
    fn default() -> Self {
        Self { spikes: true, per_neuron_energy: true, trace_tail: default_trace_tail() }
    }
}

fn default_w_sy() -> Length {
    Length::new(10e-6)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerBudget {
    /// Synapse footprint used for power density.
    #[serde(default = "default_w_sy", rename = "w_sy_m")]
    pub w_sy: Length,
    /// Wall-plug power budget for the whole network.
    #[serde(default, rename = "budget_w")]
    pub budget: Option<Power>,
}

impl Default for PowerBudget {
    fn default() -> Self {
        Self { w_sy: default_w_sy(), budget: None }
    }
}

fn default_max_events() -> u64 {
    100_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(rename = "duration_s")]
    pub duration: Time,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub platform: PlatformChoice,
    /// Indexed by each edge's link index.
    #[serde(default = "default_templates")]
    pub synapses: Vec<SynapseTemplate>,
    /// Per-edge initial weights overriding the template weight.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub neuron: NeuronParams,
    #[serde(default)]
    pub memory: MemoryConfig,
    #[serde(default)]
    pub plasticity: Plasticity,
    #[serde(default)]
    pub drives: Vec<Drive>,
    #[serde(default)]
    pub photodiode_detection: PhotodiodeDetection,
    #[serde(default)]
    pub power: PowerBudget,
    #[serde(default)]
    pub record: RecordFlags,
    #[serde(default = "default_max_events")]
    pub max_events: u64,
}

fn default_templates() -> Vec<SynapseTemplate> {
    vec![SynapseTemplate::default()]
}

impl SimConfig {
    pub fn new(duration: Time) -> Self {
        Self {
            duration,
            seed: 0,
            platform: PlatformChoice::default(),
            synapses: default_templates(),
            weights: None,
            neuron: NeuronParams::default(),
            memory: MemoryConfig::default(),
            plasticity: Plasticity::Off,
            drives: Vec::new(),
            photodiode_detection: PhotodiodeDetection::default(),
            power: PowerBudget::default(),
            record: RecordFlags::default(),
            max_events: default_max_events(),
        }
    }

    /// Checks every constraint, including those that depend on `graph`, and
    /// resolves defaults. All violations are reported together.
    pub fn resolve(&self, graph: &NetworkGraph) -> Result<ResolvedConfig> {
        let mut errs = Vec::new();
        let profile = match self.platform.resolve() {
            Ok(p) => Some(p),
            Err(Error::Config(e)) => {
                errs.extend(e);
                None
            }
            Err(e) => return Err(e),
        };
        let d = self.duration.value();
        if !(d > 0.0 && d.is_finite()) {
            errs.push("duration_s must be finite and > 0".into());
        }
        if graph.n() == 0 {
            errs.push("graph has no neurons".into());
        }
        if self.synapses.is_empty() {
            errs.push("synapses must list at least one template".into());
        }
        if self.max_events == 0 {
            errs.push("max_events must be > 0".into());
        }

        let mut links = Vec::with_capacity(self.synapses.len());
        for (i, t) in self.synapses.iter().enumerate() {
            if !(t.tau.value() > 0.0 && t.tau.value().is_finite()) {
                errs.push(format!("synapses[{i}].tau_s must be finite and > 0"));
            }
            if !(t.max_weight > 0.0 && t.max_weight.is_finite()) {
                errs.push(format!("synapses[{i}].max_weight must be finite and > 0"));
            }
            if !(0.0..=t.max_weight).contains(&t.weight) {
                errs.push(format!("synapses[{i}].weight must be in [0, max_weight]"));
            }
            let link = match (&t.link, &profile) {
                (Some(l), _) => Some(*l),
                (None, Some(p)) => match default_link(p) {
                    Ok(l) => Some(l),
                    Err(e) => {
                        errs.push(format!("synapses[{i}]: {e}"));
                        None
                    }
                },
                (None, None) => None,
            };
            if let Some(l) = &link {
                errs.extend(l.validate().into_iter().map(|e| format!("synapses[{i}].{e}")));
            }
            links.push(link);
        }

        for (i, e) in graph.edges().iter().enumerate() {
            if e.link as usize >= self.synapses.len() {
                errs.push(format!("edge {i} references synapse template {} of {}", e.link, self.synapses.len()));
            }
        }
        if let Some(w) = &self.weights {
            if w.len() != graph.edges().len() {
                errs.push(format!("weights has {} entries for {} edges", w.len(), graph.edges().len()));
            } else {
                for (i, (&wi, e)) in w.iter().zip(graph.edges()).enumerate() {
                    let max = self.synapses.get(e.link as usize).map_or(f64::INFINITY, |t| t.max_weight);
                    if !(0.0..=max).contains(&wi) {
                        errs.push(format!("weights[{i}] must be in [0, max_weight]"));
                    }
                }
            }
        }

        let n = &self.neuron;
        if !(n.threshold > 0.0 && n.threshold.is_finite()) {
            errs.push("neuron.threshold must be finite and > 0".into());
        }
        for (name, t) in [("tau_soma_s", n.tau_soma), ("refractory_s", n.refractory), ("transmit_delay_s", n.transmit_delay)] {
            if let Some(t) = t {
                let ok = if name == "tau_soma_s" { t.value() > 0.0 } else { t.value() >= 0.0 };
                if !ok || !t.value().is_finite() {
                    errs.push(format!("neuron.{name} must be finite and {}", if name == "tau_soma_s" { "> 0" } else { ">= 0" }));
                }
            }
        }
        if !(n.spike_overhead.value() >= 0.0) {
            errs.push("neuron.spike_overhead_j must be >= 0".into());
        }

        let mut max_fluxons = None;
        let mut loop_i_c = None;
        match &self.memory {
            MemoryConfig::Loop { bits, i_c, fluxon_energy_budget, max_fluxons: mf } => {
                if *bits == 0 || *bits > MAX_LOOP_BITS {
                    errs.push(format!("memory.bits must be in [1, {MAX_LOOP_BITS}]"));
                }
                if !(i_c.value() > 0.0) {
                    errs.push("memory.i_c_a must be > 0".into());
                }
                if profile.as_ref().is_some_and(|p| p.kind != PlatformKind::Superconducting) {
                    errs.push("memory.kind loop needs a superconducting platform".into());
                }
                match mf {
                    Some(m) => max_fluxons = Some(*m),
                    None => match default_max_fluxons(*fluxon_energy_budget, *i_c) {
                        Ok(m) => max_fluxons = Some(m),
                        Err(e) => errs.push(format!("memory.fluxon_energy_budget_j: {e}")),
                    },
                }
                loop_i_c = Some(*i_c);
            }
            MemoryConfig::Analog { write_noise, write_energy, .. } => {
                if !(*write_noise >= 0.0 && write_noise.is_finite()) {
                    errs.push("memory.write_noise must be finite and >= 0".into());
                }
                if !(write_energy.value() >= 0.0) {
                    errs.push("memory.write_energy_j must be >= 0".into());
                }
            }
        }

        let mut stdp = None;
        if let Plasticity::Stdp { a_plus, a_minus, tau_plus, tau_minus, endurance_policy } = &self.plasticity {
            let rates: Vec<f64> = self.drives.iter().map(|dr| dr.mean_rate(d)).filter(|r| *r > 0.0).collect();
            let default_tau = (!rates.is_empty()).then(|| {
                let mean = rates.iter().sum::<f64>() / rates.len() as f64;
                Time::new(10.0 / mean)
            });
            match (tau_plus.or(default_tau), tau_minus.or(default_tau)) {
                (Some(tp), Some(tm)) => {
                    let p = StdpParams {
                        a_plus: *a_plus,
                        a_minus: *a_minus,
                        tau_plus: tp,
                        tau_minus: tm,
                        endurance_policy: *endurance_policy,
                    };
                    errs.extend(p.validate());
                    stdp = Some(p);
                }
                _ => errs.push("plasticity time constants are required when no drive sets a mean rate".into()),
            }
        }

        for (i, dr) in self.drives.iter().enumerate() {
            if dr.neuron() >= graph.n() {
                errs.push(format!("drives[{i}].neuron {} is outside the graph", dr.neuron()));
            }
            match dr {
                Drive::Poisson { rate_hz, start_s, .. } => {
                    if !(*rate_hz >= 0.0 && rate_hz.is_finite()) {
                        errs.push(format!("drives[{i}].rate_hz must be finite and >= 0"));
                    }
                    if !(*start_s >= 0.0) {
                        errs.push(format!("drives[{i}].start_s must be >= 0"));
                    }
                }
                Drive::Periodic { period_s, start_s, .. } => {
                    if !(*period_s > 0.0 && period_s.is_finite()) {
                        errs.push(format!("drives[{i}].period_s must be finite and > 0"));
                    }
                    if !(*start_s >= 0.0) {
                        errs.push(format!("drives[{i}].start_s must be >= 0"));
                    }
                }
                Drive::Schedule { times_s, .. } => {
                    if times_s.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                        errs.push(format!("drives[{i}].times_s must be finite and >= 0"));
                    }
                    if times_s.windows(2).any(|w| w[1] < w[0]) {
                        errs.push(format!("drives[{i}].times_s must be sorted"));
                    }
                }
            }
        }

        if !(self.power.w_sy.value() > 0.0) {
            errs.push("power.w_sy_m must be > 0".into());
        }
        if self.power.budget.is_some_and(|b| !(b.value() > 0.0)) {
            errs.push("power.budget_w must be > 0".into());
        }

        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        let profile = profile.expect("no errors implies a profile");
        let links: Vec<OpticalLink> = links.into_iter().map(|l| l.expect("no errors implies links")).collect();
        let snspd_reset = links
            .iter()
            .find_map(|l| match l.receiver {
                ReceiverModel::Snspd(r) => Some(r.reset_time),
                ReceiverModel::Photodiode(_) => None,
            })
            .unwrap_or(SnspdReceiver::default().reset_time);
        let tau_soma = n.tau_soma.unwrap_or_else(|| {
            self.synapses.iter().map(|t| t.tau).fold(Time::ZERO, |a, b| if b.value() > a.value() { b } else { a })
        });
        Ok(ResolvedConfig {
            profile,
            links,
            tau_soma,
            refractory: n.refractory.unwrap_or(snspd_reset),
            transmit_delay: n.transmit_delay.unwrap_or(snspd_reset),
            stdp,
            max_fluxons,
            loop_i_c,
        })
    }
}

/// The platform's default link: an SNSPD provisioned for 99% detection, or
/// a photodiode fed exactly its required photon count.
pub fn default_link(profile: &PlatformProfile) -> Result<OpticalLink> {
    match profile.kind {
        PlatformKind::Superconducting => {
            let r = SnspdReceiver::default();
            let n_ph = photons_for_reliability(Probability::new(DEFAULT_LINK_RELIABILITY)?, r.eta_d)?.ceil();
            Ok(OpticalLink::snspd(r, profile.wavelength, profile.default_eta, n_ph))
        }
        PlatformKind::Semiconductor => OpticalLink::photodiode(
            ReceiverlessPhotodiode::at_wavelength(profile.wavelength)?,
            profile.wavelength,
            profile.default_eta,
        ),
    }
}

/// Defaults filled in and cross-checked against the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub profile: PlatformProfile,
    /// One link per synapse template.
    pub links: Vec<OpticalLink>,
    pub tau_soma: Time,
    pub refractory: Time,
    pub transmit_delay: Time,
    pub stdp: Option<StdpParams>,
    pub max_fluxons: Option<u32>,
    pub loop_i_c: Option<Current>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::Edge;

    fn two_nodes() -> NetworkGraph {
        NetworkGraph::from_edges(2, vec![Edge::new(0, 1)]).unwrap()
    }

    #[test]
    fn defaults_resolve() {
        let r = SimConfig::new(Time::new(1e-3)).resolve(&two_nodes()).unwrap();
        assert_eq!(r.links[0].n_ph, 7.0);
        assert_eq!(r.max_fluxons, Some(161));
        assert_eq!(r.tau_soma, Time::new(1e-6));
        assert_eq!(r.refractory, SnspdReceiver::default().reset_time);
        assert_eq!(r.transmit_delay, r.refractory);
    }

    #[test]
    fn all_violations_reported_together() {
        let mut c = SimConfig::new(Time::new(-1.0));
        c.neuron.threshold = 0.0;
        c.synapses[0].tau = Time::ZERO;
        c.drives.push(Drive::Poisson { neuron: 5, rate_hz: -1.0, start_s: 0.0 });
        c.weights = Some(vec![0.1, 0.2]);
        match c.resolve(&two_nodes()) {
            Err(Error::Config(errs)) => assert!(errs.len() >= 6, "{errs:?}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn loop_memory_rejected_on_semiconductor() {
        let mut c = SimConfig::new(Time::new(1e-3));
        c.platform = PlatformChoice::Named("semiconductor-300K".into());
        assert!(c.resolve(&two_nodes()).is_err());
        c.memory = MemoryConfig::Analog { write_noise: 0.0, endurance: None, write_energy: Energy::ZERO };
        let r = c.resolve(&two_nodes()).unwrap();
        assert!(matches!(r.links[0].receiver, ReceiverModel::Photodiode(_)));
    }

    #[test]
    fn stdp_time_constants_follow_drive_rate() {
        let mut c = SimConfig::new(Time::new(1.0));
        c.plasticity = Plasticity::Stdp {
            a_plus: 4.0,
            a_minus: 4.0,
            tau_plus: None,
            tau_minus: None,
            endurance_policy: EndurancePolicy::Freeze,
        };
        assert!(c.resolve(&two_nodes()).is_err());
        c.drives.push(Drive::Poisson { neuron: 0, rate_hz: 100.0, start_s: 0.0 });
        let r = c.resolve(&two_nodes()).unwrap();
        assert!((r.stdp.unwrap().tau_plus.value() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn json_rejects_unknown_keys_and_accepts_minimal() {
        let c: SimConfig = serde_json::from_str(r#"{"duration_s": 0.001}"#).unwrap();
        assert_eq!(c, SimConfig::new(Time::new(1e-3)));
        assert!(serde_json::from_str::<SimConfig>(r#"{"duration_s": 0.001, "bogus": 1}"#).is_err());
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<SimConfig>(&text).unwrap(), c);
    }
}
