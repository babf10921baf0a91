//! Priority-queue execution of a network run.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::{photodiode_static_power, photons_sufficient, ReceiverModel};
use crate::netgen::NetworkGraph;
use crate::quantities::Energy;
use crate::seeding::{self, StreamRng};

use super::config::{Drive, MemoryConfig, PhotodiodeDetection, ResolvedConfig, SimConfig};
use super::ledger::{Category, EnergyLedger};
use super::memory::{apply_stdp, loop_write_energy, weight_to_fluxon_rate, AnalogCell, EndurancePolicy, LoopCell, MemoryCell, WriteOutcome};
use super::report::{SynapseReport, SynapseStats};
use super::soma::Soma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    pub neuron: u32,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpikeRecord {
    /// Empty when spike recording is off.
    pub spikes: Vec<Spike>,
    pub counts: Vec<u64>,
}

impl SpikeRecord {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub spikes: SpikeRecord,
    pub ledger: EnergyLedger,
    pub synapses: SynapseReport,
    pub events_processed: u64,
    pub resolved: ResolvedConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Drive { drive: usize, index: u64 },
    Arrival { synapse: usize },
    Crossing { neuron: usize, version: u64 },
    RefractoryEnd { neuron: usize },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.seq.cmp(&other.seq))
    }
}

/// Per-template quantities fixed for the whole run.
struct LinkRuntime {
    source_energy: Energy,
    dead_time: f64,
    detector: Detector,
    reset_energy: Energy,
}

enum Detector {
    Bernoulli(f64),
    Always(bool),
    PoissonCount { mean: f64, needed: u64 },
}

struct SynapseState {
    cell: MemoryCell,
    group: usize,
    max_weight: f64,
    last_detection: Option<f64>,
    min_interval: Option<f64>,
    arrivals: u64,
    detections: u64,
    misses: u64,
    suppressed: u64,
    degraded: bool,
}

struct NeuronState {
    soma: Soma,
    version: u64,
    last_spike: Option<f64>,
}

struct Engine<'a> {
    graph: &'a NetworkGraph,
    cfg: &'a SimConfig,
    res: ResolvedConfig,
    duration: f64,
    threshold: f64,
    links: Vec<LinkRuntime>,
    synapses: Vec<SynapseState>,
    neurons: Vec<NeuronState>,
    queue: BinaryHeap<Reverse<Event>>,
    seq: u64,
    ledger: EnergyLedger,
    spikes: SpikeRecord,
    detect_rng: StreamRng,
    noise_rng: StreamRng,
    drive_rngs: Vec<StreamRng>,
    trace: VecDeque<Event>,
    processed: u64,
}

/// Runs `graph` under `config`. Identical inputs give bit-identical outputs.
pub fn run(graph: &NetworkGraph, config: &SimConfig) -> Result<SimOutput> {
    let resolved = config.resolve(graph)?;
    let mut engine = Engine::new(graph, config, resolved)?;
    engine.seed_drives();
    engine.execute()?;
    engine.finish()
}

impl<'a> Engine<'a> {
    fn new(graph: &'a NetworkGraph, cfg: &'a SimConfig, res: ResolvedConfig) -> Result<Self> {
        let links = res
            .links
            .iter()
            .map(|l| {
                let (detector, reset_energy) = match &l.receiver {
                    ReceiverModel::Snspd(r) => (Detector::Bernoulli(l.detection_probability()?.value()), r.reset_energy()),
                    ReceiverModel::Photodiode(pd) => {
                        let required = pd.required_photons(l.wavelength)?;
                        let d = match cfg.photodiode_detection {
                            PhotodiodeDetection::Deterministic => Detector::Always(photons_sufficient(l.n_ph, required)),
                            PhotodiodeDetection::PoissonThreshold => Detector::PoissonCount {
                                mean: l.n_ph,
                                needed: (required * (1.0 - 1e-12)).ceil() as u64,
                            },
                        };
                        (d, Energy::ZERO)
                    }
                };
                Ok(LinkRuntime {
                    source_energy: l.source_energy()?,
                    dead_time: l.receiver.dead_time().value(),
                    detector,
                    reset_energy,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut neurons: Vec<NeuronState> = (0..graph.n())
            .map(|_| NeuronState { soma: Soma::new(res.tau_soma.value()), version: 0, last_spike: None })
            .collect();
        let mut synapses = Vec::with_capacity(graph.edges().len());
        for (i, e) in graph.edges().iter().enumerate() {
            let t = &cfg.synapses[e.link as usize];
            let weight = cfg.weights.as_ref().map_or(t.weight, |w| w[i]);
            let fraction = weight / t.max_weight;
            let cell = match &cfg.memory {
                MemoryConfig::Loop { bits, .. } => MemoryCell::Loop(LoopCell::from_fraction(*bits, fraction)?),
                MemoryConfig::Analog { write_noise, endurance, .. } => {
                    MemoryCell::Analog(AnalogCell::new(fraction.clamp(0.0, 1.0), *write_noise, *endurance)?)
                }
            };
            let group = neurons[e.dst as usize].soma.group_for(t.tau.value(), e.inhibitory);
            synapses.push(SynapseState {
                cell,
                group,
                max_weight: t.max_weight,
                last_detection: None,
                min_interval: None,
                arrivals: 0,
                detections: 0,
                misses: 0,
                suppressed: 0,
                degraded: false,
            });
        }

        let seed = cfg.seed;
        Ok(Self {
            graph,
            cfg,
            duration: cfg.duration.value(),
            threshold: cfg.neuron.threshold,
            links,
            synapses,
            neurons,
            queue: BinaryHeap::new(),
            seq: 0,
            ledger: EnergyLedger::new(graph.n(), res.profile.specific_power, cfg.record.per_neuron_energy),
            spikes: SpikeRecord { spikes: Vec::new(), counts: vec![0; graph.n()] },
            detect_rng: seeding::stream(seed, seeding::DETECTION),
            noise_rng: seeding::stream(seed, seeding::WRITE_NOISE),
            drive_rngs: (0..cfg.drives.len() as u64).map(|i| seeding::stream(seed, seeding::DRIVE_BASE + i)).collect(),
            trace: VecDeque::with_capacity(cfg.record.trace_tail),
            processed: 0,
            res,
        })
    }

    fn schedule(&mut self, time: f64, kind: EventKind) {
        if time < self.duration {
            self.seq += 1;
            self.queue.push(Reverse(Event { time, seq: self.seq, kind }));
        }
    }

    fn seed_drives(&mut self) {
        for d in 0..self.cfg.drives.len() {
            if let Some(t) = self.drive_time(d, 0, 0.0) {
                self.schedule(t, EventKind::Drive { drive: d, index: 0 });
            }
        }
    }

    /// Time of the `index`-th spike of drive `d`, given the previous one at `prev`.
    fn drive_time(&mut self, d: usize, index: u64, prev: f64) -> Option<f64> {
        match &self.cfg.drives[d] {
            Drive::Poisson { rate_hz, start_s, .. } => {
                if *rate_hz <= 0.0 {
                    return None;
                }
                let from = if index == 0 { *start_s } else { prev };
                let gap: f64 = Exp::new(*rate_hz).expect("validated rate").sample(&mut self.drive_rngs[d]);
                Some(from + gap)
            }
            Drive::Periodic { period_s, start_s, count, .. } => {
                (count.is_none_or(|c| index < c)).then(|| start_s + index as f64 * period_s)
            }
            Drive::Schedule { times_s, .. } => times_s.get(index as usize).copied(),
        }
    }

    fn execute(&mut self) -> Result<()> {
        while let Some(Reverse(ev)) = self.queue.pop() {
            self.processed += 1;
            if self.processed > self.cfg.max_events {
                return Err(self.abort(format!("event budget of {} exhausted at t = {:e} s", self.cfg.max_events, ev.time)));
            }
            if self.cfg.record.trace_tail > 0 {
                if self.trace.len() == self.cfg.record.trace_tail {
                    self.trace.pop_front();
                }
                self.trace.push_back(ev);
            }
            let t = ev.time;
            match ev.kind {
                EventKind::Drive { drive, index } => {
                    let neuron = self.cfg.drives[drive].neuron();
                    self.emit(neuron, t)?;
                    if let Some(next) = self.drive_time(drive, index + 1, t) {
                        self.schedule(next, EventKind::Drive { drive, index: index + 1 });
                    }
                }
                EventKind::Arrival { synapse } => self.arrive(synapse, t)?,
                EventKind::Crossing { neuron, version } => {
                    if self.neurons[neuron].version == version {
                        self.emit(neuron, t)?;
                    }
                }
                EventKind::RefractoryEnd { neuron } => {
                    self.neurons[neuron].soma.advance(t);
                    self.predict(neuron, t)?;
                }
            }
        }
        Ok(())
    }

    fn abort(&self, reason: String) -> Error {
        let trace = self
            .trace
            .iter()
            .map(|e| format!("  t = {:e} s  #{}  {:?}", e.time, e.seq, e.kind))
            .collect::<Vec<_>>()
            .join("\n");
        Error::Simulation { reason, trace }
    }

    fn check_finite(&self, neuron: usize) -> Result<()> {
        if self.neurons[neuron].soma.is_finite() {
            Ok(())
        } else {
            Err(self.abort(format!("non-finite soma state on neuron {neuron}")))
        }
    }

    /// Schedules the next threshold crossing of `neuron`, invalidating any
    /// earlier prediction.
    fn predict(&mut self, neuron: usize, t: f64) -> Result<()> {
        self.check_finite(neuron)?;
        let n = &mut self.neurons[neuron];
        n.version += 1;
        if n.soma.in_refractory(t) {
            return Ok(());
        }
        let version = n.version;
        if let Some(s) = n.soma.next_crossing(self.threshold) {
            self.schedule(t + s, EventKind::Crossing { neuron, version });
        }
        Ok(())
    }

    fn emit(&mut self, neuron: usize, t: f64) -> Result<()> {
        self.spikes.counts[neuron] += 1;
        if self.cfg.record.spikes {
            self.spikes.spikes.push(Spike { neuron: neuron as u32, time_s: t });
        }
        self.ledger.accrue(Category::SpikeOverhead, neuron, self.cfg.neuron.spike_overhead);
        let delay = self.res.transmit_delay.value();
        for &e in self.graph.out_edges(neuron) {
            let link = self.graph.edges()[e].link as usize;
            self.ledger.accrue(Category::SourceOptical, neuron, self.links[link].source_energy);
            self.schedule(t + delay, EventKind::Arrival { synapse: e });
        }

        if self.res.stdp.is_some() {
            for &e in self.graph.in_edges(neuron) {
                if let Some(pre) = self.synapses[e].last_detection {
                    self.plasticity(e, pre, t)?;
                }
            }
        }

        let refractory = self.res.refractory.value();
        let n = &mut self.neurons[neuron];
        n.last_spike = Some(t);
        n.soma.advance(t);
        n.soma.reset(self.cfg.neuron.reset_clears_filters);
        n.soma.refractory_until = t + refractory;
        if refractory > 0.0 {
            n.version += 1;
            self.schedule(t + refractory, EventKind::RefractoryEnd { neuron });
            Ok(())
        } else {
            self.predict(neuron, t)
        }
    }

    fn detect(&mut self, link: usize) -> bool {
        match self.links[link].detector {
            Detector::Bernoulli(p) => self.detect_rng.random::<f64>() < p,
            Detector::Always(d) => d,
            Detector::PoissonCount { mean, needed } => {
                let count = if mean > 0.0 {
                    Poisson::new(mean).expect("positive mean").sample(&mut self.detect_rng) as u64
                } else {
                    0
                };
                count >= needed
            }
        }
    }

    fn arrive(&mut self, e: usize, t: f64) -> Result<()> {
        let edge = self.graph.edges()[e];
        let link = edge.link as usize;
        let post = edge.dst as usize;
        self.synapses[e].arrivals += 1;
        if let Some(last) = self.synapses[e].last_detection {
            if t - last < self.links[link].dead_time {
                self.synapses[e].suppressed += 1;
                return Ok(());
            }
        }
        if !self.detect(link) {
            self.synapses[e].misses += 1;
            return Ok(());
        }

        let syn = &mut self.synapses[e];
        syn.detections += 1;
        if let Some(last) = syn.last_detection {
            let gap = t - last;
            syn.min_interval = Some(syn.min_interval.map_or(gap, |m: f64| m.min(gap)));
        }
        syn.last_detection = Some(t);
        let amount = syn.cell.fraction() * syn.max_weight;
        let group = syn.group;

        if matches!(self.res.links[link].receiver, ReceiverModel::Snspd(_)) {
            self.ledger.accrue(Category::DetectorReset, post, self.links[link].reset_energy);
        }
        if let (Some(max_fluxons), Some(i_c)) = (self.res.max_fluxons, self.res.loop_i_c) {
            let fluxons = weight_to_fluxon_rate(&self.synapses[e].cell, max_fluxons)?;
            self.ledger.accrue(Category::Fluxon, post, loop_write_energy(i64::from(fluxons), i_c));
        }

        let soma = &mut self.neurons[post].soma;
        soma.advance(t);
        soma.inject(group, amount);

        if self.res.stdp.is_some() {
            if let Some(last_post) = self.neurons[post].last_spike {
                self.plasticity(e, t, last_post)?;
            }
        }
        self.predict(post, t)
    }

    fn plasticity(&mut self, e: usize, pre: f64, post: f64) -> Result<()> {
        let Some(params) = self.res.stdp else { return Ok(()) };
        let syn = &mut self.synapses[e];
        if syn.degraded {
            return Ok(());
        }
        match apply_stdp(pre, post, &mut syn.cell, &params, &mut self.noise_rng) {
            WriteOutcome::Unchanged => {}
            WriteOutcome::Written { levels, .. } => {
                let energy = match (&self.cfg.memory, self.res.loop_i_c) {
                    (MemoryConfig::Loop { .. }, Some(i_c)) => loop_write_energy(levels, i_c),
                    (MemoryConfig::Analog { write_energy, .. }, _) => *write_energy,
                    _ => Energy::ZERO,
                };
                let post_neuron = self.graph.edges()[e].dst as usize;
                self.ledger.accrue(Category::MemoryUpdate, post_neuron, energy);
            }
            WriteOutcome::Exhausted => match params.endurance_policy {
                EndurancePolicy::Freeze => syn.degraded = true,
                EndurancePolicy::Fault => {
                    return Err(Error::EnduranceExhausted { synapse: e, writes: syn.cell.write_count() })
                }
            },
        }
        Ok(())
    }

    fn finish(mut self) -> Result<SimOutput> {
        for e in self.graph.edges() {
            if let ReceiverModel::Photodiode(pd) = &self.res.links[e.link as usize].receiver {
                let leak = Energy::new(photodiode_static_power(pd).value() * self.duration);
                self.ledger.accrue(Category::StaticLeakage, e.dst as usize, leak);
            }
        }
        let stats: Vec<SynapseStats> = self
            .graph
            .edges()
            .iter()
            .zip(&self.synapses)
            .enumerate()
            .map(|(i, (e, s))| SynapseStats {
                index: i,
                src: e.src,
                dst: e.dst,
                inhibitory: e.inhibitory,
                arrivals: s.arrivals,
                detections: s.detections,
                misses: s.misses,
                suppressed: s.suppressed,
                final_weight: s.cell.fraction() * s.max_weight,
                level: match s.cell {
                    MemoryCell::Loop(c) => Some(c.level()),
                    MemoryCell::Analog(_) => None,
                },
                write_count: s.cell.write_count(),
                degraded: s.degraded,
                min_detection_interval_s: s.min_interval,
            })
            .collect();
        let sqrt_rule = (0..self.graph.n())
            .map(|j| self.spikes.counts[j] as f64 * (self.graph.in_edges(j).len() as f64).sqrt())
            .sum();
        Ok(SimOutput {
            synapses: SynapseReport::from_stats(stats, sqrt_rule),
            spikes: self.spikes,
            ledger: self.ledger,
            events_processed: self.processed,
            resolved: self.res,
        })
    }
}
