//! Synaptic weight storage and pair-based STDP.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::platform::{fluxon_budget, fluxon_energy};
use crate::quantities::{Current, Energy, Time};

pub const MAX_LOOP_BITS: u8 = 10;
/// Levels that span an analog cell's full range when STDP amplitudes are
/// given in levels.
pub const ANALOG_FULL_SCALE_LEVELS: f64 = 1023.0;
pub const DEFAULT_LOOP_CRITICAL_CURRENT: Current = Current::new(300e-6);
/// Energy a loop synapse may spend in fluxons per detection.
pub const DEFAULT_FLUXON_ENERGY_BUDGET: Energy = Energy::new(100e-18);

/// Weight held as circulating current in a superconducting loop, quantized in
/// fluxon levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopCell {
    level: u32,
    bits: u8,
    write_count: u64,
}

impl LoopCell {
    pub fn new(bits: u8, level: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_LOOP_BITS {
            return Err(Error::domain("bits", format!("must be in [1, {MAX_LOOP_BITS}], got {bits}")));
        }
        let cell = Self { level: 0, bits, write_count: 0 };
        if level > cell.max_level() {
            return Err(Error::domain("level", format!("{level} exceeds {}", cell.max_level())));
        }
        Ok(Self { level, ..cell })
    }

    /// Nearest level to a normalized weight in `[0, 1]`.
    pub fn from_fraction(bits: u8, fraction: f64) -> Result<Self> {
        let probe = Self::new(bits, 0)?;
        let level = (fraction.clamp(0.0, 1.0) * f64::from(probe.max_level())).round_ties_even() as u32;
        Self::new(bits, level)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn max_level(&self) -> u32 {
        (1u32 << self.bits) - 1
    }

    pub fn write_count(&self) -> u64 {
        self.write_count
    }
}

/// Continuous weight with write noise and a finite write endurance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalogCell {
    value: f64,
    write_noise: f64,
    endurance: Option<u64>,
    write_count: u64,
}

impl AnalogCell {
    pub fn new(value: f64, write_noise: f64, endurance: Option<u64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::domain("value", format!("must be in [0, 1], got {value}")));
        }
        if !(write_noise >= 0.0 && write_noise.is_finite()) {
            return Err(Error::domain("write_noise", format!("must be finite and >= 0, got {write_noise}")));
        }
        Ok(Self { value, write_noise, endurance, write_count: 0 })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn write_count(&self) -> u64 {
        self.write_count
    }

    pub fn remaining_writes(&self) -> Option<u64> {
        self.endurance.map(|e| e.saturating_sub(self.write_count))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MemoryCell {
    Loop(LoopCell),
    Analog(AnalogCell),
}

impl MemoryCell {
    /// Weight as a fraction of full scale.
    pub fn fraction(&self) -> f64 {
        match self {
            MemoryCell::Loop(c) => f64::from(c.level) / f64::from(c.max_level()),
            MemoryCell::Analog(c) => c.value,
        }
    }

    pub fn write_count(&self) -> u64 {
        match self {
            MemoryCell::Loop(c) => c.write_count,
            MemoryCell::Analog(c) => c.write_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndurancePolicy {
    /// Stop updating the cell and mark the synapse degraded.
    #[default]
    Freeze,
    /// Abort the run.
    Fault,
}

/// Pair-based exponential STDP. Amplitudes are in weight levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StdpParams {
    pub a_plus: f64,
    pub a_minus: f64,
    #[serde(rename = "tau_plus_s")]
    pub tau_plus: Time,
    #[serde(rename = "tau_minus_s")]
    pub tau_minus: Time,
    #[serde(default)]
    pub endurance_policy: EndurancePolicy,
}

impl StdpParams {
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        for (name, v) in [("a_plus", self.a_plus), ("a_minus", self.a_minus)] {
            if !(v >= 0.0 && v.is_finite()) {
                errs.push(format!("plasticity.{name} must be finite and >= 0"));
            }
        }
        for (name, t) in [("tau_plus_s", self.tau_plus), ("tau_minus_s", self.tau_minus)] {
            if !(t.value() > 0.0 && t.value().is_finite()) {
                errs.push(format!("plasticity.{name} must be finite and > 0"));
            }
        }
        errs
    }

    /// Requested change in levels for a spike pair; Δt = post − pre, and a
    /// zero interval potentiates.
    pub fn delta_levels(&self, pre: f64, post: f64) -> f64 {
        let dt = post - pre;
        if dt >= 0.0 {
            self.a_plus * (-dt / self.tau_plus.value()).exp()
        } else {
            -self.a_minus * (dt / self.tau_minus.value()).exp()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WriteOutcome {
    /// The cell changed by `delta` in normalized weight (`levels` for loop cells).
    Written { delta: f64, levels: i64 },
    Unchanged,
    /// The analog cell has no writes left; the cell was not touched.
    Exhausted,
}

/// Applies one STDP pair update to `cell`. Loop cells round the change to
/// whole levels (ties to even) and clamp; analog cells add Gaussian write
/// noise and clamp to `[0, 1]`. Only nonzero applied changes count as writes.
pub fn apply_stdp<R: Rng + ?Sized>(
    pre: f64,
    post: f64,
    cell: &mut MemoryCell,
    params: &StdpParams,
    rng: &mut R,
) -> WriteOutcome {
    let requested = params.delta_levels(pre, post);
    match cell {
        MemoryCell::Loop(c) => {
            let step = requested.round_ties_even() as i64;
            let target = (i64::from(c.level) + step).clamp(0, i64::from(c.max_level()));
            let applied = target - i64::from(c.level);
            if applied == 0 {
                return WriteOutcome::Unchanged;
            }
            c.level = target as u32;
            c.write_count += 1;
            WriteOutcome::Written { delta: applied as f64 / f64::from(c.max_level()), levels: applied }
        }
        MemoryCell::Analog(c) => {
            if requested == 0.0 {
                return WriteOutcome::Unchanged;
            }
            if c.remaining_writes() == Some(0) {
                return WriteOutcome::Exhausted;
            }
            let mut delta = requested / ANALOG_FULL_SCALE_LEVELS;
            if c.write_noise > 0.0 {
                delta += Normal::new(0.0, c.write_noise).expect("validated noise").sample(rng);
            }
            let next = (c.value + delta).clamp(0.0, 1.0);
            let applied = next - c.value;
            if applied == 0.0 {
                return WriteOutcome::Unchanged;
            }
            c.value = next;
            c.write_count += 1;
            WriteOutcome::Written { delta: applied, levels: 0 }
        }
    }
}

/// Fluxons injected per detection for a loop cell: the level mapped linearly
/// onto `[0, max_fluxons]`, rounded half to even.
pub fn weight_to_fluxon_rate(cell: &MemoryCell, max_fluxons: u32) -> Result<u32> {
    match cell {
        MemoryCell::Loop(c) => {
            let x = f64::from(c.level) / f64::from(c.max_level()) * f64::from(max_fluxons);
            Ok(x.round_ties_even() as u32)
        }
        MemoryCell::Analog(_) => Err(Error::MemoryKind("fluxon rate needs a loop cell".into())),
    }
}

/// Largest fluxon count per detection within `budget` at critical current `i_c`.
pub fn default_max_fluxons(budget: Energy, i_c: Current) -> Result<u32> {
    Ok(fluxon_budget(budget, i_c)?.floor() as u32)
}

/// Energy of writing `levels` fluxon levels into a loop cell.
pub fn loop_write_energy(levels: i64, i_c: Current) -> Energy {
    fluxon_energy(i_c) * levels.unsigned_abs() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;

    fn params(a: f64) -> StdpParams {
        StdpParams {
            a_plus: a,
            a_minus: a,
            tau_plus: Time::new(1e-3),
            tau_minus: Time::new(1e-3),
            endurance_policy: EndurancePolicy::Freeze,
        }
    }

    #[test]
    fn zero_interval_potentiates() {
        let p = params(4.0);
        assert_eq!(p.delta_levels(1.0, 1.0), 4.0);
        assert!(p.delta_levels(1.0, 0.999) < 0.0);
    }

    #[test]
    fn loop_clamps_at_top_without_write() {
        let mut cell = MemoryCell::Loop(LoopCell::new(10, 1023).unwrap());
        let out = apply_stdp(0.0, 0.0, &mut cell, &params(4.0), &mut seeding::stream(0, 0));
        assert_eq!(out, WriteOutcome::Unchanged);
        assert_eq!(cell.write_count(), 0);
        assert_eq!(cell.fraction(), 1.0);
    }

    #[test]
    fn loop_rounds_to_whole_levels() {
        let mut cell = MemoryCell::Loop(LoopCell::new(10, 100).unwrap());
        let out = apply_stdp(0.0, 1e-3, &mut cell, &params(2.5), &mut seeding::stream(0, 0));
        assert_eq!(out, WriteOutcome::Written { delta: 1.0 / 1023.0, levels: 1 });
        assert_eq!(cell.write_count(), 1);
        // 0.5 rounds to even (zero), so nothing is written.
        let mut cell = MemoryCell::Loop(LoopCell::new(10, 100).unwrap());
        let half = StdpParams { a_plus: 0.5, ..params(0.5) };
        assert_eq!(apply_stdp(0.0, 0.0, &mut cell, &half, &mut seeding::stream(0, 0)), WriteOutcome::Unchanged);
    }

    #[test]
    fn analog_noise_stays_in_range_and_exhausts() {
        let mut cell = MemoryCell::Analog(AnalogCell::new(0.99, 0.05, Some(3)).unwrap());
        let mut rng = seeding::stream(1, 0);
        let mut writes = 0;
        for _ in 0..10 {
            match apply_stdp(0.0, 0.0, &mut cell, &params(40.0), &mut rng) {
                WriteOutcome::Written { .. } => writes += 1,
                WriteOutcome::Exhausted => break,
                WriteOutcome::Unchanged => {}
            }
            assert!((0.0..=1.0).contains(&cell.fraction()));
        }
        assert_eq!(writes, 3);
        assert_eq!(cell.write_count(), 3);
    }

    #[test]
    fn fluxon_rate_mapping() {
        let at = |level| MemoryCell::Loop(LoopCell::new(10, level).unwrap());
        assert_eq!(weight_to_fluxon_rate(&at(0), 161).unwrap(), 0);
        assert_eq!(weight_to_fluxon_rate(&at(1023), 161).unwrap(), 161);
        assert_eq!(weight_to_fluxon_rate(&at(512), 161).unwrap(), 81);
        let analog = MemoryCell::Analog(AnalogCell::new(0.5, 0.0, None).unwrap());
        assert!(matches!(weight_to_fluxon_rate(&analog, 161), Err(Error::MemoryKind(_))));
        assert_eq!(default_max_fluxons(DEFAULT_FLUXON_ENERGY_BUDGET, DEFAULT_LOOP_CRITICAL_CURRENT).unwrap(), 161);
    }

    #[test]
    fn cell_construction_bounds() {
        assert!(LoopCell::new(11, 0).is_err());
        assert!(LoopCell::new(0, 0).is_err());
        assert!(LoopCell::new(4, 16).is_err());
        assert_eq!(LoopCell::from_fraction(10, 0.6).unwrap().level(), 614);
        assert!(AnalogCell::new(1.5, 0.0, None).is_err());
        assert!(AnalogCell::new(0.5, -1.0, None).is_err());
    }
}
