//! Synaptic-memory targets derived from system assumptions, and scoring of
//! memory technologies against them.
//!
//! Each post-synaptic spike is assumed to update √N of a neuron's N input
//! synapses. Over a lifetime L at mean rate f a synapse then sees L·f/√N
//! writes, and keeping update power below optical power bounds each write at
//! √N·E_opt. Unknown (null) technology figures score as unknown, never as a
//! pass. Boundary values pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::{format_si, Energy, Frequency, Time, Voltage};

pub const MIN_PRECISION_BITS: u32 = 4;
/// Precision beyond which more bits are noted as beyond the stated need.
pub const ADVISORY_PRECISION_BITS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemAssumptions {
    #[serde(rename = "lifetime_s")]
    pub lifetime: Time,
    #[serde(rename = "mean_rate_hz")]
    pub mean_rate: Frequency,
    pub fanin: f64,
    /// Optical energy to produce one spike.
    #[serde(rename = "e_opt_j")]
    pub e_opt: Energy,
    #[serde(rename = "max_rate_hz")]
    pub max_rate: Frequency,
}

impl Default for SystemAssumptions {
    /// Decades of operation at 10 kHz mean and 10 MHz peak rate, fan-in of
    /// 1000, and 100 fJ per spike.
    fn default() -> Self {
        Self {
            lifetime: Time::new(1e9),
            mean_rate: Frequency::new(1e4),
            fanin: 1000.0,
            e_opt: Energy::new(100e-15),
            max_rate: Frequency::new(1e7),
        }
    }
}

impl SystemAssumptions {
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        for (name, v) in [("lifetime_s", self.lifetime.value()), ("max_rate_hz", self.max_rate.value())] {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(format!("assumptions.{name} must be finite and > 0"));
            }
        }
        for (name, v) in [("mean_rate_hz", self.mean_rate.value()), ("e_opt_j", self.e_opt.value())] {
            if !(v >= 0.0 && v.is_finite()) {
                errs.push(format!("assumptions.{name} must be finite and >= 0"));
            }
        }
        if !(self.fanin >= 1.0 && self.fanin.is_finite()) {
            errs.push("assumptions.fanin must be >= 1".into());
        }
        if self.mean_rate.value() > self.max_rate.value() {
            errs.push("assumptions.mean_rate_hz must not exceed max_rate_hz".into());
        }
        errs
    }
}

fn check_fanin(a: &SystemAssumptions) -> Result<()> {
    if a.fanin >= 1.0 {
        Ok(())
    } else {
        Err(Error::domain("fanin", format!("must be >= 1, got {}", a.fanin)))
    }
}

/// Writes per synapse over its lifetime: L·f/√N.
pub fn lifetime_updates(a: &SystemAssumptions) -> Result<f64> {
    check_fanin(a)?;
    Ok(a.lifetime.value() * a.mean_rate.value() / a.fanin.sqrt())
}

/// Largest write energy that keeps update power below optical power: √N·E_opt.
pub fn max_update_energy(a: &SystemAssumptions) -> Result<Energy> {
    check_fanin(a)?;
    Ok(a.e_opt * a.fanin.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub endurance_min: f64,
    pub update_energy_max_j: f64,
    pub update_time_max_s: f64,
    pub precision_min_bits: u32,
    pub precision_advisory_bits: u32,
}

impl Targets {
    pub fn from_assumptions(a: &SystemAssumptions) -> Result<Self> {
        let errs = a.validate();
        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        Ok(Self {
            endurance_min: lifetime_updates(a)?,
            update_energy_max_j: max_update_energy(a)?.value(),
            update_time_max_s: 1.0 / a.max_rate.value(),
            precision_min_bits: MIN_PRECISION_BITS,
            precision_advisory_bits: ADVISORY_PRECISION_BITS,
        })
    }

    /// The targets as a metric/goal table at the rounding a summary table
    /// would use: endurance to its power of ten, energy and time to one
    /// significant figure.
    pub fn table(&self) -> Vec<(&'static str, String)> {
        vec![
            ("Endurance", format!(">10^{} updates", self.endurance_min.log10().floor() as i32)),
            ("Update Energy", format!("<{}", one_significant_si(self.update_energy_max_j, "J"))),
            ("Update Speed", format!("<{}", one_significant_si(self.update_time_max_s, "s"))),
            ("Weight Precision", format!("{}-{} bits", self.precision_min_bits, self.precision_advisory_bits)),
        ]
    }
}

/// Engineering-prefixed value rounded to one significant figure, e.g. "3 pJ".
fn one_significant_si(value: f64, unit: &str) -> String {
    if value == 0.0 {
        return format!("0 {unit}");
    }
    let rounded = {
        let mag = 10f64.powf(value.abs().log10().floor());
        (value / mag).round() * mag
    };
    // Reuse the 4-significant-digit formatter for the prefix, then trim.
    let s = format_si(rounded, unit);
    let (num, rest) = s.split_once(' ').unwrap_or((&s, ""));
    let trimmed = if num.contains('.') { num.trim_end_matches('0').trim_end_matches('.') } else { num };
    format!("{trimmed} {rest}")
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryTechSpec {
    pub name: String,
    /// Lifetime writes.
    #[serde(default)]
    pub endurance: Option<f64>,
    #[serde(default, rename = "update_energy_j")]
    pub update_energy: Option<Energy>,
    #[serde(default, rename = "update_time_s")]
    pub update_time: Option<Time>,
    #[serde(default)]
    pub precision_bits: Option<u32>,
    #[serde(default)]
    pub volatile_on_warmup: Option<bool>,
    /// Informational only.
    #[serde(default, rename = "programming_voltage_v")]
    pub programming_voltage: Option<Voltage>,
}

impl MemoryTechSpec {
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let check = |errs: &mut Vec<String>, field: &str, v: Option<f64>| {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    errs.push(format!("{}.{field} must be finite and > 0", self.name));
                }
            }
        };
        if self.name.trim().is_empty() {
            errs.push("technology name must not be empty".into());
        }
        check(&mut errs, "endurance", self.endurance);
        check(&mut errs, "update_energy_j", self.update_energy.map(|e| e.value()));
        check(&mut errs, "update_time_s", self.update_time.map(|t| t.value()));
        check(&mut errs, "precision_bits", self.precision_bits.map(f64::from));
        check(&mut errs, "programming_voltage_v", self.programming_voltage.map(|v| v.value().abs()));
        errs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AtLeast,
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub metric: String,
    pub direction: Direction,
    pub target: f64,
    pub value: Option<f64>,
    /// value/target; passes at ≥ 1 for at-least metrics and ≤ 1 for at-most.
    pub margin: Option<f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MetricScore {
    fn new(metric: &str, direction: Direction, target: f64, value: Option<f64>) -> Self {
        let margin = value.map(|v| v / target);
        let verdict = match (margin, direction) {
            (None, _) => Verdict::Unknown,
            (Some(m), Direction::AtLeast) if m >= 1.0 => Verdict::Pass,
            (Some(m), Direction::AtMost) if m <= 1.0 => Verdict::Pass,
            _ => Verdict::Fail,
        };
        Self { metric: metric.to_string(), direction, target, value, margin, verdict, note: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnologyScore {
    pub name: String,
    pub metrics: Vec<MetricScore>,
    /// Fail if any metric fails, otherwise unknown if any is unknown.
    pub overall: Verdict,
    pub notes: Vec<String>,
}

impl TechnologyScore {
    pub fn metric(&self, name: &str) -> Option<&MetricScore> {
        self.metrics.iter().find(|m| m.metric == name)
    }
}

pub fn score_technology(tech: &MemoryTechSpec, a: &SystemAssumptions) -> Result<TechnologyScore> {
    let errs = tech.validate();
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    let t = Targets::from_assumptions(a)?;
    let mut precision = MetricScore::new(
        "precision_bits",
        Direction::AtLeast,
        f64::from(t.precision_min_bits),
        tech.precision_bits.map(f64::from),
    );
    if tech.precision_bits.is_some_and(|b| b > t.precision_advisory_bits) {
        precision.note = Some(format!("more than {} bits exceeds the stated need", t.precision_advisory_bits));
    }
    let metrics = vec![
        MetricScore::new("endurance", Direction::AtLeast, t.endurance_min, tech.endurance),
        MetricScore::new("update_energy_j", Direction::AtMost, t.update_energy_max_j, tech.update_energy.map(|e| e.value())),
        MetricScore::new("update_time_s", Direction::AtMost, t.update_time_max_s, tech.update_time.map(|x| x.value())),
        precision,
    ];
    let overall = if metrics.iter().any(|m| m.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if metrics.iter().any(|m| m.verdict == Verdict::Unknown) {
        Verdict::Unknown
    } else {
        Verdict::Pass
    };
    let mut notes = vec!["targets are inclusive: values exactly at a target pass".to_string()];
    if tech.volatile_on_warmup == Some(true) {
        notes.push("weights are lost when the cryostat warms up".into());
    }
    Ok(TechnologyScore { name: tech.name.clone(), metrics, overall, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_memory() -> MemoryTechSpec {
        MemoryTechSpec {
            name: "loop".into(),
            endurance: Some(1e15),
            update_energy: Some(Energy::new(1.2e-18)),
            update_time: Some(Time::new(1e-9)),
            precision_bits: Some(10),
            volatile_on_warmup: Some(true),
            programming_voltage: None,
        }
    }

    #[test]
    fn lifetime_updates_examples() {
        let a = SystemAssumptions::default();
        assert!((lifetime_updates(&a).unwrap() - 3.1623e11).abs() < 1e7);
        let idle = SystemAssumptions { mean_rate: Frequency::ZERO, ..a };
        assert_eq!(lifetime_updates(&idle).unwrap(), 0.0);
        let wide = SystemAssumptions { fanin: 4000.0, ..a };
        assert!((lifetime_updates(&wide).unwrap() * 2.0 - lifetime_updates(&a).unwrap()).abs() < 1.0);
        assert!(lifetime_updates(&SystemAssumptions { fanin: 0.5, ..a }).is_err());
    }

    #[test]
    fn max_update_energy_examples() {
        let a = SystemAssumptions::default();
        assert!((max_update_energy(&a).unwrap().value() - 3.1623e-12).abs() < 1e-16);
        assert_eq!(max_update_energy(&SystemAssumptions { fanin: 1.0, ..a }).unwrap(), a.e_opt);
        assert_eq!(max_update_energy(&SystemAssumptions { e_opt: Energy::ZERO, ..a }).unwrap(), Energy::ZERO);
    }

    #[test]
    fn default_targets_table() {
        let t = Targets::from_assumptions(&SystemAssumptions::default()).unwrap();
        let rows: Vec<(&str, &str)> = vec![
            ("Endurance", ">10^11 updates"),
            ("Update Energy", "<3 pJ"),
            ("Update Speed", "<100 ns"),
            ("Weight Precision", "4-8 bits"),
        ];
        let table = t.table();
        for ((m, g), (em, eg)) in table.iter().zip(rows) {
            assert_eq!((*m, g.as_str()), (em, eg));
        }
    }

    #[test]
    fn loop_memory_passes_everything() {
        let s = score_technology(&loop_memory(), &SystemAssumptions::default()).unwrap();
        assert_eq!(s.overall, Verdict::Pass);
        assert!(s.metric("precision_bits").unwrap().note.is_some());
        assert_eq!(s.notes.len(), 2);
    }

    #[test]
    fn slow_update_fails_speed() {
        let slow = MemoryTechSpec { update_time: Some(Time::new(50e-6)), ..loop_memory() };
        let s = score_technology(&slow, &SystemAssumptions::default()).unwrap();
        assert_eq!(s.metric("update_time_s").unwrap().verdict, Verdict::Fail);
        assert_eq!(s.overall, Verdict::Fail);
    }

    #[test]
    fn boundaries_pass() {
        let a = SystemAssumptions::default();
        let t = Targets::from_assumptions(&a).unwrap();
        let edge = MemoryTechSpec {
            name: "edge".into(),
            endurance: Some(t.endurance_min),
            update_energy: Some(Energy::new(t.update_energy_max_j)),
            update_time: Some(Time::new(t.update_time_max_s)),
            precision_bits: Some(4),
            ..Default::default()
        };
        let s = score_technology(&edge, &a).unwrap();
        assert_eq!(s.overall, Verdict::Pass);
        assert!(s.metrics.iter().all(|m| m.margin == Some(1.0)));
    }

    #[test]
    fn nulls_are_unknown() {
        let s = score_technology(&MemoryTechSpec { endurance: None, ..loop_memory() }, &SystemAssumptions::default()).unwrap();
        assert_eq!(s.metric("endurance").unwrap().verdict, Verdict::Unknown);
        assert_eq!(s.overall, Verdict::Unknown);
    }

    #[test]
    fn invalid_inputs_rejected() {
        let bad = MemoryTechSpec { update_time: Some(Time::new(-1.0)), ..loop_memory() };
        assert!(score_technology(&bad, &SystemAssumptions::default()).is_err());
        let a = SystemAssumptions { mean_rate: Frequency::new(1e8), ..Default::default() };
        assert!(score_technology(&loop_memory(), &a).is_err());
    }
}
