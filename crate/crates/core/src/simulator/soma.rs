//! Leaky integrate-and-fire soma driven by exponentially decaying synaptic
//! filters, evaluated in closed form between events.
//!
//! Filters with time constant τ_k hold a current I_k(t) = I_k(t₀)·e^{−(t−t₀)/τ_k}.
//! The membrane obeys τ_m·dm/dt = −m + Σ_k g_k·I_k(t), where the gain g_k
//! makes an isolated unit increment peak at exactly 1. A synapse of weight w
//! acting alone therefore raises the membrane to w at most, so weights read
//! directly in units of the threshold.

/// Membrane response to a unit filter increment at s = 0, before gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    tau_filter: f64,
    tau_soma: f64,
    /// 1/τ_m − 1/τ_k.
    rate_gap: f64,
    gain: f64,
    peak_time: f64,
}

/// −expm1(−x)/x, continuous through x = 0.
fn phi(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - 0.5 * x
    } else {
        -(-x).exp_m1() / x
    }
}

impl Kernel {
    pub fn new(tau_filter: f64, tau_soma: f64) -> Self {
        let rate_gap = 1.0 / tau_soma - 1.0 / tau_filter;
        let rel = (tau_filter - tau_soma) / tau_soma;
        let peak_time = if rel.abs() < 1e-12 { tau_soma } else { rel.ln_1p() / rate_gap };
        let mut k = Self { tau_filter, tau_soma, rate_gap, gain: 1.0, peak_time };
        k.gain = 1.0 / k.shape(peak_time);
        k
    }

    /// τ_k/(τ_k − τ_m)·(e^{−s/τ_k} − e^{−s/τ_m}), or (s/τ)·e^{−s/τ} when equal.
    pub fn shape(&self, s: f64) -> f64 {
        let x = s * self.rate_gap;
        if x.abs() < 1.0 {
            (-s / self.tau_filter).exp() * (s / self.tau_soma) * phi(x)
        } else {
            self.tau_filter / (self.tau_filter - self.tau_soma) * ((-s / self.tau_filter).exp() - (-s / self.tau_soma).exp())
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn peak_time(&self) -> f64 {
        self.peak_time
    }

    pub fn tau_filter(&self) -> f64 {
        self.tau_filter
    }
}

/// Filters sharing a time constant and sign are summed into one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterGroup {
    pub kernel: Kernel,
    pub inhibitory: bool,
    pub current: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Soma {
    pub membrane: f64,
    pub groups: Vec<FilterGroup>,
    pub updated_at: f64,
    pub refractory_until: f64,
    tau: f64,
}

/// Samples per decade in the crossing search.
const SAMPLES_PER_DECADE: f64 = 64.0;

impl Soma {
    pub fn new(tau: f64) -> Self {
        Self { membrane: 0.0, groups: Vec::new(), updated_at: 0.0, refractory_until: f64::NEG_INFINITY, tau }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Group index for filters of `tau_filter` and sign, created on demand.
    pub fn group_for(&mut self, tau_filter: f64, inhibitory: bool) -> usize {
        if let Some(i) = self.groups.iter().position(|g| g.kernel.tau_filter == tau_filter && g.inhibitory == inhibitory) {
            return i;
        }
        self.groups.push(FilterGroup { kernel: Kernel::new(tau_filter, self.tau), inhibitory, current: 0.0 });
        self.groups.len() - 1
    }

    pub fn in_refractory(&self, t: f64) -> bool {
        t < self.refractory_until
    }

    fn membrane_after(&self, s: f64) -> f64 {
        let mut m = self.membrane * (-s / self.tau).exp();
        for g in &self.groups {
            if g.current != 0.0 {
                m += g.kernel.gain * g.current * g.kernel.shape(s);
            }
        }
        m
    }

    fn decay_filters(&mut self, s: f64) {
        for g in &mut self.groups {
            g.current *= (-s / g.kernel.tau_filter).exp();
        }
    }

    /// Evolves the state to `t`. The membrane is clamped to zero while
    /// refractory; filters keep decaying.
    pub fn advance(&mut self, t: f64) {
        let mut from = self.updated_at;
        if self.refractory_until > from {
            let until = self.refractory_until.min(t);
            self.decay_filters(until - from);
            self.membrane = 0.0;
            from = until;
        }
        if t > from {
            let s = t - from;
            self.membrane = self.membrane_after(s);
            self.decay_filters(s);
        }
        self.updated_at = self.updated_at.max(t);
    }

    /// Empties the membrane and, optionally, every filter.
    pub fn reset(&mut self, clear_filters: bool) {
        self.membrane = 0.0;
        if clear_filters {
            self.groups.iter_mut().for_each(|g| g.current = 0.0);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.membrane.is_finite() && self.groups.iter().all(|g| g.current.is_finite())
    }

    /// Adds a signed increment to a filter group; the state must already be
    /// advanced to the current time.
    pub fn inject(&mut self, group: usize, amount: f64) {
        let g = &mut self.groups[group];
        g.current += if g.inhibitory { -amount } else { amount };
    }

    /// Membrane value `s` after the last update if no input arrives.
    pub fn projected(&self, s: f64) -> f64 {
        self.membrane_after(s)
    }

    /// Earliest offset from the last update at which the membrane reaches
    /// `threshold` with no further input, or `None`.
    pub fn next_crossing(&self, threshold: f64) -> Option<f64> {
        if self.membrane >= threshold {
            return Some(0.0);
        }
        let bound = self.membrane.max(0.0) + self.groups.iter().map(|g| g.current.max(0.0)).sum::<f64>();
        if bound < threshold {
            return None;
        }
        let live = self.groups.iter().filter(|g| g.current != 0.0);
        let tau_min = live.clone().map(|g| g.kernel.tau_filter).fold(self.tau, f64::min);
        let tau_max = live.clone().map(|g| g.kernel.tau_filter).fold(self.tau, f64::max);
        let s_min = 1e-4 * tau_min;
        let s_max = 20.0 * tau_max;
        let ratio = 10f64.powf(1.0 / SAMPLES_PER_DECADE);
        let mut samples: Vec<f64> = std::iter::successors(Some(s_min), |s| Some(s * ratio)).take_while(|&s| s <= s_max).collect();
        samples.extend(live.filter(|g| g.current > 0.0).map(|g| g.kernel.peak_time));
        samples.sort_by(f64::total_cmp);

        let mut lo = 0.0;
        for s in samples {
            if self.membrane_after(s) >= threshold {
                let mut hi = s;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.membrane_after(mid) >= threshold {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Some(hi);
            }
            lo = s;
        }
        None
    }
}
