//! Optical receiver and transmitter energy models.
//!
//! Two receiver families are covered: a superconducting nanowire single-photon
//! detector (SNSPD), which registers a synaptic event on the first absorbed
//! photon, and a "receiverless" photodiode that charges a CMOS gate directly
//! and therefore needs enough photo-electrons to swing the gate voltage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::{
    cast, non_negative, photon_energy, positive, quantum_limited_responsivity, Capacitance,
    Current, Energy, Frequency, Inductance, Length, Power, Probability, Responsivity, Time,
    TypedQuantity, Voltage,
};

/// Default operating wavelength, 1.5 µm.
pub const DEFAULT_WAVELENGTH: Length = Length::new(1.5e-6);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnspdReceiver {
    /// Detection efficiency η_D.
    pub eta_d: Probability,
    /// Kinetic inductance of the nanowire.
    #[serde(rename = "l_spd_h")]
    pub l_spd: Inductance,
    /// Bias current.
    #[serde(rename = "i_spd_a")]
    pub i_spd: Current,
    /// Dead time after a detection.
    #[serde(rename = "reset_time_s")]
    pub reset_time: Time,
    #[serde(rename = "max_count_rate_hz")]
    pub max_count_rate: Frequency,
}

impl SnspdReceiver {
    /// WSi/MoSi-class detector: 20 MHz count rate.
    pub fn wsi() -> Self {
        Self::with_count_rate(Frequency::new(20e6))
    }

    /// NbN-class detector: 1 GHz count rate.
    pub fn nbn() -> Self {
        Self::with_count_rate(Frequency::new(1e9))
    }

    /// 70 % detection efficiency, 100 nH, 10 µA, and a non-paralyzable dead
    /// time equal to one period of the maximum count rate.
    pub fn with_count_rate(max_count_rate: Frequency) -> Self {
        Self {
            eta_d: Probability::new(0.7).expect("constant"),
            l_spd: Inductance::new(100e-9),
            i_spd: Current::new(10e-6),
            reset_time: Time::new(1.0 / max_count_rate.value()),
            max_count_rate,
        }
    }

    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.eta_d.value() <= 0.0 {
            errs.push("snspd.eta_d must be > 0".to_string());
        }
        if !(self.l_spd.value() > 0.0) {
            errs.push("snspd.l_spd_h must be > 0".to_string());
        }
        if !(self.i_spd.value() > 0.0) {
            errs.push("snspd.i_spd_a must be > 0".to_string());
        }
        if !(self.reset_time.value() >= 0.0) {
            errs.push("snspd.reset_time_s must be >= 0".to_string());
        }
        if !(self.max_count_rate.value() > 0.0) {
            errs.push("snspd.max_count_rate_hz must be > 0".to_string());
        }
        errs
    }

    pub fn reset_energy(&self) -> Energy {
        // Inputs are validated positive; the fallible path only rejects negatives.
        snspd_reset_energy(self.l_spd, self.i_spd).unwrap_or(Energy::ZERO)
    }
}

impl Default for SnspdReceiver {
    fn default() -> Self {
        Self::wsi()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverlessPhotodiode {
    /// Photodiode, gate, and wiring capacitance.
    #[serde(rename = "c_tot_f")]
    pub c_tot: Capacitance,
    /// Voltage swing needed to switch the gate.
    #[serde(rename = "v_swing_v")]
    pub v_swing: Voltage,
    #[serde(rename = "responsivity_a_per_w")]
    pub responsivity: Responsivity,
    /// Dark (leakage) current.
    #[serde(rename = "i_leak_a")]
    pub i_leak: Current,
    #[serde(rename = "v_bias_v")]
    pub v_bias: Voltage,
}

impl ReceiverlessPhotodiode {
    /// 1 fF, 0.8 V swing, quantum-limited responsivity, 1 nA leakage at 1 V.
    pub fn at_wavelength(wavelength: Length) -> Result<Self> {
        Ok(Self {
            c_tot: Capacitance::new(1e-15),
            v_swing: Voltage::new(0.8),
            responsivity: quantum_limited_responsivity(wavelength)?,
            i_leak: Current::new(1e-9),
            v_bias: Voltage::new(1.0),
        })
    }

    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        for (name, v) in [
            ("photodiode.c_tot_f", self.c_tot.value()),
            ("photodiode.v_swing_v", self.v_swing.value()),
            ("photodiode.responsivity_a_per_w", self.responsivity.value()),
            ("photodiode.v_bias_v", self.v_bias.value()),
        ] {
            if !(v > 0.0) {
                errs.push(format!("{name} must be > 0"));
            }
        }
        if !(self.i_leak.value() >= 0.0) {
            errs.push("photodiode.i_leak_a must be >= 0".to_string());
        }
        errs
    }

    /// Photons that must arrive to swing the gate: C·V / (𝓡·hν).
    pub fn required_photons(&self, wavelength: Length) -> Result<f64> {
        let e_receiver = receiverless_optical_energy(self, Probability::ONE)?;
        Ok(e_receiver / photon_energy(wavelength)?)
    }
}

impl Default for ReceiverlessPhotodiode {
    fn default() -> Self {
        Self::at_wavelength(DEFAULT_WAVELENGTH).expect("default wavelength is positive")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReceiverModel {
    Snspd(SnspdReceiver),
    Photodiode(ReceiverlessPhotodiode),
}

impl ReceiverModel {
    pub fn validate(&self) -> Vec<String> {
        match self {
            ReceiverModel::Snspd(r) => r.validate(),
            ReceiverModel::Photodiode(p) => p.validate(),
        }
    }

    /// Dead time of the receiver; photodiodes have none.
    pub fn dead_time(&self) -> Time {
        match self {
            ReceiverModel::Snspd(r) => r.reset_time,
            ReceiverModel::Photodiode(_) => Time::ZERO,
        }
    }
}

/// A point-to-point optical synapse link.
///
/// `n_ph` is the mean photon number arriving at the receiver per spike. The
/// source must emit `n_ph·hν/η`, independent of the receiver family; for a
/// photodiode receiver the natural choice of `n_ph` is
/// [`ReceiverlessPhotodiode::required_photons`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticalLink {
    #[serde(rename = "wavelength_m")]
    pub wavelength: Length,
    /// End-to-end link efficiency, transmitter included.
    pub eta: Probability,
    pub n_ph: f64,
    pub receiver: ReceiverModel,
}

impl OpticalLink {
    pub fn snspd(receiver: SnspdReceiver, wavelength: Length, eta: Probability, n_ph: f64) -> Self {
        Self { wavelength, eta, n_ph, receiver: ReceiverModel::Snspd(receiver) }
    }

    /// Link that delivers exactly the photons the photodiode needs.
    pub fn photodiode(pd: ReceiverlessPhotodiode, wavelength: Length, eta: Probability) -> Result<Self> {
        let n_ph = pd.required_photons(wavelength)?;
        Ok(Self { wavelength, eta, n_ph, receiver: ReceiverModel::Photodiode(pd) })
    }

    pub fn validate(&self) -> Vec<String> {
        let mut errs = self.receiver.validate();
        if !(self.wavelength.value() > 0.0) {
            errs.push("link.wavelength_m must be > 0".to_string());
        }
        if self.eta.value() <= 0.0 {
            errs.push("link.eta must be > 0".to_string());
        }
        if !(self.n_ph >= 0.0) || !self.n_ph.is_finite() {
            errs.push("link.n_ph must be finite and >= 0".to_string());
        }
        errs
    }

    /// Optical energy the source must emit per spike for this synapse.
    pub fn source_energy(&self) -> Result<Energy> {
        link_source_energy(self.n_ph, self.wavelength, self.eta)
    }

    /// Per-spike detection probability under the deterministic-threshold view
    /// for photodiodes and Eq. (1) for SNSPDs.
    pub fn detection_probability(&self) -> Result<Probability> {
        match &self.receiver {
            ReceiverModel::Snspd(r) => Ok(miss_probability(self.n_ph, r.eta_d)?.complement()),
            ReceiverModel::Photodiode(pd) => {
                let required = pd.required_photons(self.wavelength)?;
                Ok(if photons_sufficient(self.n_ph, required) { Probability::ONE } else { Probability::ZERO })
            }
        }
    }
}

/// Threshold comparison with a relative slack for rounding in `required_photons`.
pub(crate) fn photons_sufficient(available: f64, required: f64) -> bool {
    available >= required * (1.0 - 1e-12)
}

/// Probability that no photon is registered: exp(−N_ph·η_D).
pub fn miss_probability(n_ph: f64, eta_d: Probability) -> Result<Probability> {
    non_negative("n_ph", n_ph)?;
    Probability::new((-n_ph * eta_d.value()).exp())
}

/// Mean photons per spike required for the given detection probability,
/// −ln(1 − p)/η_D. Real-valued; callers round up if they need an integer.
pub fn photons_for_reliability(p_detect: Probability, eta_d: Probability) -> Result<f64> {
    if p_detect.value() >= 1.0 {
        return Err(Error::Infeasible("certain detection needs infinitely many photons".into()));
    }
    positive("eta_d", eta_d.value())?;
    Ok(-(1.0 - p_detect.value()).ln() / eta_d.value())
}

/// Source optical energy per spike, N_ph·hν/η.
pub fn link_source_energy(n_ph: f64, wavelength: Length, eta: Probability) -> Result<Energy> {
    positive("eta", eta.value())?;
    non_negative("n_ph", n_ph)?;
    let hv = photon_energy(wavelength)?;
    Ok(cast((hv.q() * n_ph) / eta))
}

/// Energy dissipated by one SNSPD detection, ½·L·I².
pub fn snspd_reset_energy(l_spd: Inductance, i_spd: Current) -> Result<Energy> {
    non_negative("l_spd", l_spd.value())?;
    non_negative("i_spd", i_spd.value())?;
    Ok(cast(l_spd.q() * i_spd * i_spd * 0.5))
}

/// Optical energy needed to drive a receiverless photodiode, C·V/(η·𝓡).
pub fn receiverless_optical_energy(pd: &ReceiverlessPhotodiode, eta: Probability) -> Result<Energy> {
    positive("eta", eta.value())?;
    positive("responsivity", pd.responsivity.value())?;
    Ok(cast(pd.c_tot.q() * pd.v_swing / (pd.responsivity.q() * eta.value())))
}

/// Photons delivered to the receiver by a source emitting `source_energy`.
pub fn implied_photon_count(source_energy: Energy, eta: Probability, wavelength: Length) -> Result<f64> {
    Ok(source_energy.value() * eta.value() / photon_energy(wavelength)?.value())
}

/// Static dissipation of a biased photodiode, V_bias·I_leak.
pub fn photodiode_static_power(pd: &ReceiverlessPhotodiode) -> Power {
    cast(pd.v_bias.q() * pd.i_leak)
}

/// Spike rate below which static leakage dominates the per-synapse dynamic
/// source power: P_static / E_source.
pub fn static_dominance_frequency(pd: &ReceiverlessPhotodiode, link: &OpticalLink) -> Result<Frequency> {
    let e = link.source_energy()?;
    if e.value() <= 0.0 {
        return Err(Error::Infeasible("link has no dynamic energy per spike".into()));
    }
    Ok(cast(photodiode_static_power(pd).q() / e))
}

/// Optical power a transmitter must supply to drive `fanout` receivers once
/// per inter-spike interval.
pub fn transmitter_power(
    fanout: f64,
    per_synapse_receiver_energy: Energy,
    spike_rate: Frequency,
    eta: Probability,
) -> Result<Power> {
    positive("eta", eta.value())?;
    non_negative("fanout", fanout)?;
    Ok(cast(per_synapse_receiver_energy.q() * fanout * spike_rate / eta))
}
