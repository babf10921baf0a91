//! Platform-wide power, cooling, SQUID sizing, and synaptic time-constant models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkbudget::DEFAULT_WAVELENGTH;
use crate::quantities::{
    cast, constants, non_negative, positive, Area, ArealCapacitance, Capacitance, Current, Energy,
    Frequency, Inductance, InductancePerSquare, Length, Power, PowerDensity, Probability,
    Resistance, SheetResistance, Temperature, Time, TypedQuantity, Voltage,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlatformKind {
    Superconducting,
    Semiconductor,
}

/// Constants shared by every analysis on one hardware platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformProfile {
    pub name: String,
    pub kind: PlatformKind,
    /// Watts drawn at the wall per watt dissipated on chip.
    pub specific_power: f64,
    #[serde(rename = "t_hot_k")]
    pub t_hot: Temperature,
    #[serde(rename = "t_cold_k")]
    pub t_cold: Temperature,
    #[serde(rename = "power_density_limit_w_per_m2")]
    pub power_density_limit: PowerDensity,
    #[serde(rename = "wavelength_m")]
    pub wavelength: Length,
    pub default_eta: Probability,
}

pub const SUPERCONDUCTING_4K: &str = "superconducting-4K";
pub const SEMICONDUCTOR_300K: &str = "semiconductor-300K";

impl PlatformProfile {
    /// Liquid-helium platform: 1000 W/W refrigeration, 1 W/cm² on-chip limit.
    pub fn superconducting_4k() -> Self {
        Self {
            name: SUPERCONDUCTING_4K.to_string(),
            kind: PlatformKind::Superconducting,
            specific_power: 1000.0,
            t_hot: Temperature::new(300.0),
            t_cold: Temperature::new(4.2),
            power_density_limit: PowerDensity::new(1.0e4),
            wavelength: DEFAULT_WAVELENGTH,
            default_eta: Probability::new(0.01).expect("constant"),
        }
    }

    /// Room-temperature platform: no cooling overhead, 1 kW/cm² limit.
    pub fn semiconductor_300k() -> Self {
        Self {
            name: SEMICONDUCTOR_300K.to_string(),
            kind: PlatformKind::Semiconductor,
            specific_power: 1.0,
            t_hot: Temperature::new(300.0),
            t_cold: Temperature::new(300.0),
            power_density_limit: PowerDensity::new(1.0e7),
            wavelength: DEFAULT_WAVELENGTH,
            default_eta: Probability::new(0.01).expect("constant"),
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            SUPERCONDUCTING_4K => Some(Self::superconducting_4k()),
            SEMICONDUCTOR_300K => Some(Self::semiconductor_300k()),
            _ => None,
        }
    }

    pub fn builtin_names() -> [&'static str; 2] {
        [SUPERCONDUCTING_4K, SEMICONDUCTOR_300K]
    }

    /// Checks the profile invariants, including that the refrigerator is no
    /// better than Carnot.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !(self.specific_power >= 1.0) {
            errs.push(format!("profile.specific_power must be >= 1, got {}", self.specific_power));
        }
        match carnot_specific_power(self.t_hot, self.t_cold) {
            Ok(carnot) if self.specific_power < carnot => errs.push(format!(
                "profile.specific_power {} is below the Carnot bound {carnot:.3}",
                self.specific_power
            )),
            Ok(_) => {}
            Err(e) => errs.push(format!("profile temperatures: {e}")),
        }
        if !(self.power_density_limit.value() > 0.0) {
            errs.push("profile.power_density_limit_w_per_m2 must be > 0".to_string());
        }
        if !(self.wavelength.value() > 0.0) {
            errs.push("profile.wavelength_m must be > 0".to_string());
        }
        if self.default_eta.value() <= 0.0 {
            errs.push("profile.default_eta must be > 0".to_string());
        }
        errs
    }
}

/// Carnot specific power, (T_hot − T_cold)/T_cold.
pub fn carnot_specific_power(t_hot: Temperature, t_cold: Temperature) -> Result<f64> {
    positive("t_cold", t_cold.value())?;
    if t_hot.value() < t_cold.value() {
        return Err(Error::domain("t_hot", "must not be below t_cold"));
    }
    (t_hot.q().checked_sub(t_cold.q())? / t_cold).scalar()
}

/// Wall-plug power for a given on-chip dissipation.
pub fn wall_power(cold_power: Power, profile: &PlatformProfile) -> Result<Power> {
    non_negative("cold_power", cold_power.value())?;
    Ok(cold_power * profile.specific_power)
}

/// Wall-plug energy for a given on-chip dissipation.
pub fn wall_energy(cold_energy: Energy, profile: &PlatformProfile) -> Result<Energy> {
    non_negative("cold_energy", cold_energy.value())?;
    Ok(cold_energy * profile.specific_power)
}

/// Highest mean spike rate a population can sustain within a power budget:
/// P / (N_neurons·fanout·E).
pub fn max_average_spike_rate(
    power_budget: Power,
    n_neurons: f64,
    fanout: f64,
    e_per_synapse_event: Energy,
) -> Result<Frequency> {
    positive("power_budget", power_budget.value())?;
    positive("n_neurons", n_neurons)?;
    positive("fanout", fanout)?;
    positive("e_per_synapse_event", e_per_synapse_event.value())?;
    Ok(cast(power_budget.q() / (e_per_synapse_event.q() * n_neurons * fanout)))
}

/// Spike rate at which one synapse of width `w_sy` reaches the power density
/// limit, using the on-chip energy per event.
pub fn power_density_spike_limit(
    w_sy: Length,
    e_on_chip_per_event: Energy,
    density_limit: PowerDensity,
) -> Result<Frequency> {
    positive("w_sy", w_sy.value())?;
    positive("e_on_chip_per_event", e_on_chip_per_event.value())?;
    positive("density_limit", density_limit.value())?;
    Ok(cast(density_limit.q() * w_sy * w_sy / e_on_chip_per_event))
}

/// SQUID dimensions derived from the junction critical current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquidSpec {
    pub i_c: Current,
    /// Inner dimension of the washer hole.
    pub w_sq: Length,
    /// Energy to produce two fluxons.
    pub e_sq: Energy,
    pub l_sq: Inductance,
}

/// Sizes a washer SQUID with 2·L·I_c/Φ₀ = 1 and L ≈ 1.25·µ₀·w_sq.
pub fn squid_from_critical_current(i_c: Current) -> Result<SquidSpec> {
    positive("i_c", i_c.value())?;
    let e_sq: Energy = cast(i_c.q() * constants::PHI0 * 2.0);
    let l_sq: Inductance = cast(constants::PHI0 / (i_c.q() * 2.0));
    let w_sq: Length = cast(l_sq.q() / (constants::MU0 * 1.25));
    Ok(SquidSpec { i_c, w_sq, e_sq, l_sq })
}

/// Energy of a single fluxon from a junction biased at `i_c`: I_c·Φ₀.
pub fn fluxon_energy(i_c: Current) -> Energy {
    cast(i_c.q() * constants::PHI0)
}

/// Fluxons affordable within an energy budget: E / (I_c·Φ₀).
pub fn fluxon_budget(e_budget: Energy, i_c: Current) -> Result<f64> {
    non_negative("e_budget", e_budget.value())?;
    positive("i_c", i_c.value())?;
    (e_budget.q() / fluxon_energy(i_c)).scalar()
}

/// Parameters of the CMOS (DPI) and superconducting (L/r) synaptic filters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConstantSpec {
    #[serde(rename = "c_density_f_per_m2")]
    pub c_density: ArealCapacitance,
    /// Thermal voltage.
    #[serde(rename = "v_th_v")]
    pub v_th: Voltage,
    /// Subthreshold slope factor.
    pub kappa: f64,
    /// Leak current off the filter capacitor.
    #[serde(rename = "i_tau_a")]
    pub i_tau: Current,
    #[serde(rename = "l_square_h")]
    pub l_square: InductancePerSquare,
    #[serde(rename = "r_sheet_ohm")]
    pub r_s: SheetResistance,
    #[serde(rename = "w_wire_m")]
    pub w_wire: Length,
    #[serde(rename = "w_gap_m")]
    pub w_gap: Length,
}

impl Default for TimeConstantSpec {
    /// 20 fF/µm² MIM capacitors, 25 mV, κ = 1, 10 fA; MoSi at 160 pH/□ with
    /// a 1 mΩ/□ gold resistor layer and 100 nm features.
    fn default() -> Self {
        Self {
            c_density: ArealCapacitance::new(20e-15 / 1e-12),
            v_th: Voltage::new(25e-3),
            kappa: 1.0,
            i_tau: Current::new(10e-15),
            l_square: InductancePerSquare::new(160e-12),
            r_s: SheetResistance::new(1e-3),
            w_wire: Length::new(100e-9),
            w_gap: Length::new(100e-9),
        }
    }
}

impl TimeConstantSpec {
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        for (name, v) in [
            ("c_density_f_per_m2", self.c_density.value()),
            ("v_th_v", self.v_th.value()),
            ("i_tau_a", self.i_tau.value()),
            ("l_square_h", self.l_square.value()),
            ("r_sheet_ohm", self.r_s.value()),
            ("w_wire_m", self.w_wire.value()),
            ("w_gap_m", self.w_gap.value()),
        ] {
            if !(v > 0.0) {
                errs.push(format!("time_constants.{name} must be > 0"));
            }
        }
        if !(self.kappa > 0.0 && self.kappa <= 2.0) {
            errs.push(format!("time_constants.kappa must be in (0, 2], got {}", self.kappa));
        }
        errs
    }
}

/// DPI synapse time constant, C·V_th/(κ·I_τ).
pub fn dpi_time_constant(c_si: Capacitance, v_th: Voltage, kappa: f64, i_tau: Current) -> Result<Time> {
    positive("c_si", c_si.value())?;
    positive("v_th", v_th.value())?;
    positive("kappa", kappa)?;
    positive("i_tau", i_tau.value())?;
    Ok(cast(c_si.q() * v_th / (i_tau.q() * kappa)))
}

/// Longest DPI time constant when a whole `w_sy × w_sy` footprint is capacitor.
pub fn cmos_max_time_constant(w_sy: Length, spec: &TimeConstantSpec) -> Result<Time> {
    positive("w_sy", w_sy.value())?;
    let area: Area = cast(w_sy.q() * w_sy);
    let c: Capacitance = cast(spec.c_density.q() * area);
    dpi_time_constant(c, spec.v_th, spec.kappa, spec.i_tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScTimeConstant {
    /// Largest meander inductance in the footprint.
    pub l_si: Inductance,
    /// Smallest parallel-strip resistance in the footprint.
    pub r_si: Resistance,
    pub tau_max: Time,
}

/// Longest L/r time constant that fits in a `w_sy × w_sy` footprint.
pub fn sc_max_time_constant(w_sy: Length, spec: &TimeConstantSpec) -> Result<ScTimeConstant> {
    positive("w_sy", w_sy.value())?;
    let pitch = spec.w_wire.q().checked_add(spec.w_gap.q())?;
    let area = w_sy.q() * w_sy;
    let l_si: Inductance = (area * spec.l_square / (spec.w_wire.q() * pitch)).into_typed()?;
    let r_si: Resistance = (spec.r_s.q() * spec.w_gap * pitch / area).into_typed()?;
    let tau_max: Time = (l_si.q() / r_si).into_typed()?;
    Ok(ScTimeConstant { l_si, r_si, tau_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn carnot_examples() {
        let t = |v| Temperature::new(v);
        assert_relative_eq!(carnot_specific_power(t(300.0), t(4.0)).unwrap(), 74.0, max_relative = 1e-12);
        assert_relative_eq!(carnot_specific_power(t(300.0), t(4.2)).unwrap(), 70.428_571, max_relative = 1e-6);
        assert_eq!(carnot_specific_power(t(77.0), t(77.0)).unwrap(), 0.0);
        assert!(carnot_specific_power(t(4.0), t(300.0)).is_err());
        assert!(carnot_specific_power(t(300.0), t(0.0)).is_err());
    }

    #[test]
    fn wall_power_examples() {
        let sc = PlatformProfile::superconducting_4k();
        let semi = PlatformProfile::semiconductor_300k();
        assert_relative_eq!(wall_energy(Energy::new(1e-18), &sc).unwrap().value(), 1e-15, max_relative = 1e-12);
        assert_eq!(wall_power(Power::new(3.5), &semi).unwrap().value(), 3.5);
        assert_relative_eq!(wall_energy(Energy::new(5e-18), &sc).unwrap().value(), 5e-15, max_relative = 1e-12);
        assert!(wall_power(Power::new(-1.0), &sc).is_err());
    }

    #[test]
    fn builtin_profiles_are_valid() {
        for name in PlatformProfile::builtin_names() {
            let p = PlatformProfile::builtin(name).unwrap();
            assert!(p.validate().is_empty(), "{name}: {:?}", p.validate());
        }
        assert!(PlatformProfile::builtin("room-temp").is_none());
    }

    #[test]
    fn sub_carnot_profile_is_rejected() {
        let p = PlatformProfile { specific_power: 50.0, ..PlatformProfile::superconducting_4k() };
        let errs = p.validate();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].contains("Carnot"));
    }

    #[test]
    fn max_rate_examples() {
        let f = max_average_spike_rate(Power::new(10e6), 1e10, 1e3, Energy::new(1e-15)).unwrap();
        assert_relative_eq!(f.value(), 1e9, max_relative = 1e-12);
        let f = max_average_spike_rate(Power::new(10e6), 1e10, 1e3, Energy::new(100e-15)).unwrap();
        assert_relative_eq!(f.value(), 10e6, max_relative = 1e-12);
        let f2 = max_average_spike_rate(Power::new(10e6), 2e10, 1e3, Energy::new(100e-15)).unwrap();
        assert_relative_eq!(f2.value() * 2.0, f.value(), max_relative = 1e-12);
        assert!(max_average_spike_rate(Power::new(10e6), 0.0, 1e3, Energy::new(1e-15)).is_err());
    }

    #[test]
    fn power_density_examples() {
        let sc = power_density_spike_limit(Length::new(30e-6), Energy::new(9.27e-15), PowerDensity::new(1e4)).unwrap();
        assert_relative_eq!(sc.value(), 0.9709e9, max_relative = 1e-3);
        let semi =
            power_density_spike_limit(Length::new(10e-6), Energy::new(0.662e-12), PowerDensity::new(1e7)).unwrap();
        assert_relative_eq!(semi.value(), 1.511e9, max_relative = 1e-3);
        let big = power_density_spike_limit(Length::new(60e-6), Energy::new(9.27e-15), PowerDensity::new(1e4)).unwrap();
        assert_relative_eq!(big.value(), 4.0 * sc.value(), max_relative = 1e-12);
    }

    #[test]
    fn squid_examples() {
        let s = squid_from_critical_current(Current::new(300e-6)).unwrap();
        assert_relative_eq!(s.w_sq.value(), 2.194e-6, max_relative = 1e-3);
        assert_relative_eq!(s.e_sq.value(), 1.2407e-18, max_relative = 1e-4);
        let criterion = 2.0 * s.l_sq.value() * s.i_c.value() / constants::FLUX_QUANTUM;
        assert_relative_eq!(criterion, 1.0, max_relative = 1e-12);
        let d = squid_from_critical_current(Current::new(600e-6)).unwrap();
        assert_relative_eq!(d.w_sq.value() * 2.0, s.w_sq.value(), max_relative = 1e-12);
        assert_relative_eq!(d.e_sq.value(), 2.0 * s.e_sq.value(), max_relative = 1e-12);
        let h = squid_from_critical_current(Current::new(150e-6)).unwrap();
        assert_relative_eq!(h.w_sq.value(), 4.389e-6, max_relative = 1e-3);
        assert!(squid_from_critical_current(Current::ZERO).is_err());
    }

    #[test]
    fn fluxon_budget_examples() {
        let ic = Current::new(300e-6);
        assert_relative_eq!(fluxon_budget(Energy::new(100e-18), ic).unwrap(), 161.2, max_relative = 1e-3);
        assert_eq!(fluxon_budget(Energy::ZERO, ic).unwrap(), 0.0);
        let e_sq = squid_from_critical_current(ic).unwrap().e_sq;
        assert_relative_eq!(fluxon_budget(e_sq, ic).unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn dpi_examples() {
        let tau = dpi_time_constant(Capacitance::new(2e-12), Voltage::new(25e-3), 1.0, Current::new(10e-15)).unwrap();
        assert_relative_eq!(tau.value(), 5.0, max_relative = 1e-12);
        let tau2 = dpi_time_constant(Capacitance::new(4e-12), Voltage::new(25e-3), 1.0, Current::new(10e-15)).unwrap();
        assert_relative_eq!(tau2.value(), 10.0, max_relative = 1e-12);
        let spec = TimeConstantSpec::default();
        assert_relative_eq!(cmos_max_time_constant(Length::new(1e-6), &spec).unwrap().value(), 0.05, max_relative = 1e-12);
        assert_relative_eq!(cmos_max_time_constant(Length::new(10e-6), &spec).unwrap().value(), 5.0, max_relative = 1e-12);
        assert_relative_eq!(cmos_max_time_constant(Length::new(30e-6), &spec).unwrap().value(), 45.0, max_relative = 1e-12);
    }

    #[test]
    fn sc_time_constant_examples() {
        let spec = TimeConstantSpec::default();
        let t = sc_max_time_constant(Length::new(30e-6), &spec).unwrap();
        assert_relative_eq!(t.l_si.value(), 7.2e-6, max_relative = 1e-12);
        assert_relative_eq!(t.r_si.value(), 22.222e-9, max_relative = 1e-4);
        assert_relative_eq!(t.tau_max.value(), 324.0, max_relative = 1e-12);
        let small = sc_max_time_constant(Length::new(3e-6), &spec).unwrap();
        assert_relative_eq!(small.tau_max.value(), 32.4e-3, max_relative = 1e-12);
    }

    #[test]
    fn time_constant_spec_validation() {
        assert!(TimeConstantSpec::default().validate().is_empty());
        let bad = TimeConstantSpec { kappa: 3.0, ..TimeConstantSpec::default() };
        assert_eq!(bad.validate().len(), 1);
    }
}
