//! Per-category energy accounting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::quantities::Energy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    /// Optical energy emitted by transmitters, one share per outgoing synapse.
    SourceOptical,
    /// ½·L·I² dissipated when an SNSPD resets after a detection.
    DetectorReset,
    /// Fluxons injected into integration loops.
    Fluxon,
    /// Plasticity writes.
    MemoryUpdate,
    /// Photodiode bias leakage integrated over the run.
    StaticLeakage,
    /// Fixed per-spike cost of the soma and transmitter driver.
    SpikeOverhead,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::SourceOptical,
        Category::DetectorReset,
        Category::Fluxon,
        Category::MemoryUpdate,
        Category::StaticLeakage,
        Category::SpikeOverhead,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::SourceOptical => "source_optical",
            Category::DetectorReset => "detector_reset",
            Category::Fluxon => "fluxon",
            Category::MemoryUpdate => "memory_update",
            Category::StaticLeakage => "static_leakage",
            Category::SpikeOverhead => "spike_overhead",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Neumaier-compensated running sum, so totals over millions of identical
/// events match count × energy to rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Cumulative energy per category, globally and per neuron. All categories
/// are dissipated on chip, so the wall total is the on-chip total times the
/// platform's specific power.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    totals: [CompensatedSum; 6],
    events: [u64; 6],
    per_neuron: Option<Vec<[CompensatedSum; 6]>>,
    specific_power: f64,
}

impl EnergyLedger {
    pub fn new(n_neurons: usize, specific_power: f64, per_neuron: bool) -> Self {
        Self {
            totals: Default::default(),
            events: [0; 6],
            per_neuron: per_neuron.then(|| vec![Default::default(); n_neurons]),
            specific_power,
        }
    }

    /// Records one event; negative or non-finite energies are a caller bug.
    pub fn accrue(&mut self, category: Category, neuron: usize, energy: Energy) {
        let e = energy.value();
        debug_assert!(e >= 0.0 && e.is_finite(), "ledger entry {e} for {}", category.name());
        let i = category.index();
        self.totals[i].add(e);
        self.events[i] += 1;
        if let Some(rows) = self.per_neuron.as_mut() {
            rows[neuron][i].add(e);
        }
    }

    pub fn total(&self, category: Category) -> Energy {
        Energy::new(self.totals[category.index()].value())
    }

    pub fn events(&self, category: Category) -> u64 {
        self.events[category.index()]
    }

    pub fn on_chip_total(&self) -> Energy {
        let mut s = CompensatedSum::default();
        for t in &self.totals {
            s.add(t.value());
        }
        Energy::new(s.value())
    }

    pub fn wall_total(&self) -> Energy {
        self.on_chip_total() * self.specific_power
    }

    pub fn specific_power(&self) -> f64 {
        self.specific_power
    }

    pub fn neuron_total(&self, neuron: usize, category: Category) -> Option<Energy> {
        self.per_neuron.as_ref().map(|rows| Energy::new(rows[neuron][category.index()].value()))
    }

    pub fn summary(&self) -> LedgerSummary {
        let categories = Category::ALL
            .iter()
            .map(|&c| (c.name().to_string(), CategoryTotal { energy_j: self.total(c).value(), events: self.events(c) }))
            .collect();
        let per_neuron = self.per_neuron.as_ref().map(|rows| {
            rows.iter()
                .map(|row| {
                    let mut s = CompensatedSum::default();
                    row.iter().for_each(|c| s.add(c.value()));
                    s.value()
                })
                .collect()
        });
        LedgerSummary {
            categories,
            on_chip_total_j: self.on_chip_total().value(),
            wall_total_j: self.wall_total().value(),
            specific_power: self.specific_power,
            per_neuron_on_chip_j: per_neuron,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryTotal {
    pub energy_j: f64,
    pub events: u64,
}

/// Serializable snapshot of a ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerSummary {
    pub categories: BTreeMap<String, CategoryTotal>,
    pub on_chip_total_j: f64,
    pub wall_total_j: f64,
    pub specific_power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_neuron_on_chip_j: Option<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_of_repeated_values() {
        let mut s = CompensatedSum::default();
        let x = 92.70e-18;
        for _ in 0..1_000_000 {
            s.add(x);
        }
        assert!((s.value() - x * 1e6).abs() <= 1e-15 * x * 1e6);
    }

    #[test]
    fn wall_total_scales_on_chip() {
        let mut l = EnergyLedger::new(2, 1000.0, true);
        l.accrue(Category::DetectorReset, 1, Energy::new(5e-18));
        l.accrue(Category::SourceOptical, 0, Energy::new(1e-18));
        assert_eq!(l.events(Category::DetectorReset), 1);
        assert!((l.wall_total().value() - 6e-15).abs() < 1e-27);
        assert_eq!(l.neuron_total(1, Category::DetectorReset).unwrap(), Energy::new(5e-18));
        let s = l.summary();
        assert_eq!(s.categories.len(), 6);
        assert_eq!(s.per_neuron_on_chip_j.as_ref().unwrap().len(), 2);
    }
}
