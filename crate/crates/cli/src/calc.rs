//! Single-value formula evaluation: `calc <formula> --param value ...`.

use std::collections::BTreeMap;

use optoneuro::linkbudget::{
    implied_photon_count, link_source_energy, miss_probability, photodiode_static_power, photons_for_reliability,
    receiverless_optical_energy, snspd_reset_energy, transmitter_power, ReceiverlessPhotodiode,
};
use optoneuro::membench::{lifetime_updates, max_update_energy, SystemAssumptions};
use optoneuro::platform::{
    carnot_specific_power, cmos_max_time_constant, fluxon_budget, max_average_spike_rate, power_density_spike_limit,
    sc_max_time_constant, squid_from_critical_current, PlatformProfile, TimeConstantSpec,
};
use optoneuro::quantities::{
    format_si, quantum_limited_responsivity, Capacitance, Current, Energy, Frequency, Inductance, Length, Power,
    PowerDensity, Probability, Responsivity, Temperature, Time, Voltage,
};
use optoneuro::scaling::{achievable_path_length, electronic_area, photonic_area, required_degree, required_planes, Wafer};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy)]
pub enum Default {
    Required,
    Value(f64),
    /// Falls back to a value derived from the other inputs or the profile.
    Derived,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub name: &'static str,
    pub help: &'static str,
    pub default: Default,
}

const fn req(name: &'static str, help: &'static str) -> Param {
    Param { name, help, default: Default::Required }
}

const fn opt(name: &'static str, help: &'static str, v: f64) -> Param {
    Param { name, help, default: Default::Value(v) }
}

const fn derived(name: &'static str, help: &'static str) -> Param {
    Param { name, help, default: Default::Derived }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Output {
    pub name: &'static str,
    pub value: f64,
    pub unit: &'static str,
}

impl Output {
    fn new(name: &'static str, value: f64, unit: &'static str) -> Self {
        Self { name, value, unit }
    }

    pub fn display(&self) -> String {
        format_si(self.value, self.unit).trim_end().to_string()
    }
}

pub struct Inputs<'a> {
    values: BTreeMap<&'static str, f64>,
    pub profile: &'a PlatformProfile,
}

impl Inputs<'_> {
    fn get(&self, name: &str) -> f64 {
        self.values[name]
    }

    fn maybe(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

type Eval = fn(&Inputs) -> optoneuro::Result<Vec<Output>>;

pub struct Formula {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub summary: &'static str,
    pub params: &'static [Param],
    eval: Eval,
}

fn prob(v: f64) -> optoneuro::Result<Probability> {
    Probability::new(v)
}

pub static FORMULAS: &[Formula] = &[
    Formula {
        name: "miss-probability",
        aliases: &["eq1"],
        summary: "probability that a pulse of mean photon number nph goes undetected",
        params: &[req("nph", "mean photons at the detector"), req("etad", "detector efficiency")],
        eval: |i| Ok(vec![Output::new("miss_probability", miss_probability(i.get("nph"), prob(i.get("etad"))?)?.value(), "")]),
    },
    Formula {
        name: "photons",
        aliases: &["eq1-inverse"],
        summary: "photons needed for a detection probability",
        params: &[req("p", "detection probability"), req("etad", "detector efficiency")],
        eval: |i| {
            let n = photons_for_reliability(prob(i.get("p"))?, prob(i.get("etad"))?)?;
            Ok(vec![Output::new("photons", n, ""), Output::new("photons_ceil", n.ceil(), "")])
        },
    },
    Formula {
        name: "source-energy",
        aliases: &["eq2"],
        summary: "source energy per synapse for nph photons at the receiver",
        params: &[req("nph", "photons at the receiver"), opt("lambda", "wavelength [m]", 1.5e-6), req("eta", "link efficiency")],
        eval: |i| {
            let e = link_source_energy(i.get("nph"), Length::new(i.get("lambda")), prob(i.get("eta"))?)?;
            Ok(vec![Output::new("source_energy", e.value(), "J")])
        },
    },
    Formula {
        name: "receiverless",
        aliases: &["eq3"],
        summary: "optical energy to switch a receiverless photodiode gate",
        params: &[
            opt("c", "total capacitance [F]", 1e-15),
            opt("v", "voltage swing [V]", 0.8),
            opt("lambda", "wavelength [m]", 1.5e-6),
            derived("r", "responsivity [A/W]; default quantum-limited at lambda"),
            opt("eta", "link efficiency", 1.0),
        ],
        eval: |i| {
            let lambda = Length::new(i.get("lambda"));
            let responsivity = match i.maybe("r") {
                Some(r) => Responsivity::new(r),
                None => quantum_limited_responsivity(lambda)?,
            };
            let pd = ReceiverlessPhotodiode {
                c_tot: Capacitance::new(i.get("c")),
                v_swing: Voltage::new(i.get("v")),
                responsivity,
                ..ReceiverlessPhotodiode::at_wavelength(lambda)?
            };
            let eta = prob(i.get("eta"))?;
            let e = receiverless_optical_energy(&pd, eta)?;
            Ok(vec![
                Output::new("optical_energy", e.value(), "J"),
                Output::new("photons", implied_photon_count(e, eta, lambda)?, ""),
            ])
        },
    },
    Formula {
        name: "reset-energy",
        aliases: &["snspd-reset"],
        summary: "detector reset energy ½LI² and its wall-plug cost under the profile",
        params: &[opt("l", "kinetic inductance [H]", 100e-9), opt("i", "bias current [A]", 10e-6)],
        eval: |i| {
            let e = snspd_reset_energy(Inductance::new(i.get("l")), Current::new(i.get("i")))?;
            Ok(vec![
                Output::new("reset_energy", e.value(), "J"),
                Output::new("wall_energy", e.value() * i.profile.specific_power, "J"),
            ])
        },
    },
    Formula {
        name: "static-crossover",
        aliases: &[],
        summary: "spike rate below which photodiode leakage dominates dynamic source power",
        params: &[
            opt("ileak", "leakage current [A]", 1e-9),
            opt("vbias", "bias voltage [V]", 1.0),
            req("e", "per-synapse source energy [J]"),
        ],
        eval: |i| {
            let pd = ReceiverlessPhotodiode {
                i_leak: Current::new(i.get("ileak")),
                v_bias: Voltage::new(i.get("vbias")),
                ..ReceiverlessPhotodiode::default()
            };
            let e = i.get("e");
            if !(e > 0.0) {
                return Err(optoneuro::Error::Infeasible("per-synapse source energy must be > 0".into()));
            }
            let p = photodiode_static_power(&pd).value();
            Ok(vec![Output::new("static_power", p, "W"), Output::new("crossover_rate", p / e, "Hz")])
        },
    },
    Formula {
        name: "transmitter-power",
        aliases: &[],
        summary: "optical power to drive a fan-out once per inter-spike interval",
        params: &[
            opt("fanout", "downstream synapses", 1000.0),
            req("e", "per-synapse receiver energy [J]"),
            req("rate", "spike rate [Hz]"),
            opt("eta", "link efficiency", 1.0),
        ],
        eval: |i| {
            let p = transmitter_power(
                i.get("fanout"),
                Energy::new(i.get("e")),
                Frequency::new(i.get("rate")),
                prob(i.get("eta"))?,
            )?;
            Ok(vec![Output::new("optical_power", p.value(), "W")])
        },
    },
    Formula {
        name: "lifetime-updates",
        aliases: &["eq4"],
        summary: "synaptic updates over a system lifetime",
        params: &[
            opt("lifetime", "lifetime [s]", 1e9),
            opt("rate", "mean spike rate [Hz]", 1e4),
            opt("fanin", "synapses per neuron", 1000.0),
        ],
        eval: |i| {
            let a = SystemAssumptions {
                lifetime: Time::new(i.get("lifetime")),
                mean_rate: Frequency::new(i.get("rate")),
                fanin: i.get("fanin"),
                ..SystemAssumptions::default()
            };
            Ok(vec![Output::new("updates", lifetime_updates(&a)?, "")])
        },
    },
    Formula {
        name: "update-energy",
        aliases: &["eq5"],
        summary: "largest affordable energy per synaptic update",
        params: &[opt("fanin", "synapses per neuron", 1000.0), opt("eopt", "optical energy per spike [J]", 100e-15)],
        eval: |i| {
            let a = SystemAssumptions {
                fanin: i.get("fanin"),
                e_opt: Energy::new(i.get("eopt")),
                ..SystemAssumptions::default()
            };
            Ok(vec![Output::new("update_energy", max_update_energy(&a)?.value(), "J")])
        },
    },
    Formula {
        name: "required-degree",
        aliases: &["eq6"],
        summary: "mean degree of a random graph of n nodes with mean path length L",
        params: &[req("n", "network size"), req("L", "mean shortest path length")],
        eval: |i| Ok(vec![Output::new("degree", required_degree(i.get("n"), i.get("L"))?, "")]),
    },
    Formula {
        name: "path-length",
        aliases: &["eq6-inverse"],
        summary: "mean path length of a random graph of n nodes with mean degree k",
        params: &[req("n", "network size"), req("k", "mean degree")],
        eval: |i| Ok(vec![Output::new("path_length", achievable_path_length(i.get("n"), i.get("k"))?, "")]),
    },
    Formula {
        name: "photonic-area",
        aliases: &["eq7"],
        summary: "passive routing area per neuron",
        params: &[req("k", "degree"), opt("wwg", "waveguide pitch [m]", 2e-6), opt("pp", "photonic planes", 1.0)],
        eval: |i| {
            let a = photonic_area(i.get("k"), Length::new(i.get("wwg")), i.get("pp"))?;
            Ok(vec![Output::new("area", a.value(), "m²")])
        },
    },
    Formula {
        name: "electronic-area",
        aliases: &["eq8"],
        summary: "synaptic circuit area per neuron",
        params: &[req("k", "degree"), opt("wsy", "synapse width [m]", 10e-6), opt("pe", "electronic planes", 1.0)],
        eval: |i| {
            let a = electronic_area(i.get("k"), Length::new(i.get("wsy")), i.get("pe"))?;
            Ok(vec![Output::new("area", a.value(), "m²")])
        },
    },
    Formula {
        name: "planes",
        aliases: &[],
        summary: "photonic and electronic planes for n neurons on a 300 mm wafer",
        params: &[
            req("n", "neurons per wafer"),
            opt("L", "mean path length", 2.5),
            opt("wwg", "waveguide pitch [m]", 2e-6),
            opt("wsy", "synapse width [m]", 10e-6),
        ],
        eval: |i| {
            let r = required_planes(
                i.get("n"),
                i.get("L"),
                Length::new(i.get("wwg")),
                Length::new(i.get("wsy")),
                &Wafer::default(),
            )?;
            Ok(vec![
                Output::new("degree", r.degree, ""),
                Output::new("photonic_planes", r.p_p, ""),
                Output::new("electronic_planes", r.p_e, ""),
            ])
        },
    },
    Formula {
        name: "squid",
        aliases: &[],
        summary: "SQUID washer size and two-fluxon energy from the junction critical current",
        params: &[opt("ic", "critical current [A]", 300e-6)],
        eval: |i| {
            let s = squid_from_critical_current(Current::new(i.get("ic")))?;
            Ok(vec![
                Output::new("w_sq", s.w_sq.value(), "m"),
                Output::new("e_sq", s.e_sq.value(), "J"),
                Output::new("l_sq", s.l_sq.value(), "H"),
            ])
        },
    },
    Formula {
        name: "fluxons",
        aliases: &[],
        summary: "fluxons affordable within an energy budget",
        params: &[opt("e", "energy budget [J]", 100e-18), opt("ic", "critical current [A]", 300e-6)],
        eval: |i| Ok(vec![Output::new("fluxons", fluxon_budget(Energy::new(i.get("e")), Current::new(i.get("ic")))?, "")]),
    },
    Formula {
        name: "carnot",
        aliases: &[],
        summary: "ideal specific power of a refrigerator",
        params: &[opt("thot", "hot temperature [K]", 300.0), opt("tcold", "cold temperature [K]", 4.2)],
        eval: |i| {
            let w = carnot_specific_power(Temperature::new(i.get("thot")), Temperature::new(i.get("tcold")))?;
            Ok(vec![Output::new("specific_power", w, "")])
        },
    },
    Formula {
        name: "max-rate",
        aliases: &[],
        summary: "mean spike rate sustainable within a power budget",
        params: &[
            opt("p", "power budget [W]", 10e6),
            req("n", "neurons"),
            opt("fanout", "synapses per neuron", 1000.0),
            req("e", "energy per synapse event [J]"),
        ],
        eval: |i| {
            let f = max_average_spike_rate(Power::new(i.get("p")), i.get("n"), i.get("fanout"), Energy::new(i.get("e")))?;
            Ok(vec![Output::new("rate", f.value(), "Hz")])
        },
    },
    Formula {
        name: "density-limit",
        aliases: &[],
        summary: "spike rate at which a synapse reaches the power-density limit",
        params: &[
            req("w", "synapse width [m]"),
            req("e", "on-chip energy per event [J]"),
            derived("limit", "power density limit [W/m²]; default from the profile"),
        ],
        eval: |i| {
            let limit = i.maybe("limit").unwrap_or(i.profile.power_density_limit.value());
            let f = power_density_spike_limit(Length::new(i.get("w")), Energy::new(i.get("e")), PowerDensity::new(limit))?;
            Ok(vec![Output::new("rate", f.value(), "Hz")])
        },
    },
    Formula {
        name: "time-constants",
        aliases: &[],
        summary: "longest CMOS and superconducting synaptic time constants in a w × w footprint",
        params: &[req("w", "synapse width [m]")],
        eval: |i| {
            let spec = TimeConstantSpec::default();
            let w = Length::new(i.get("w"));
            Ok(vec![
                Output::new("cmos_tau", cmos_max_time_constant(w, &spec)?.value(), "s"),
                Output::new("superconducting_tau", sc_max_time_constant(w, &spec)?.tau_max.value(), "s"),
            ])
        },
    },
];

pub fn find(name: &str) -> Option<&'static Formula> {
    FORMULAS.iter().find(|f| f.name == name || f.aliases.contains(&name))
}

pub fn usage(f: &Formula) -> String {
    let mut s = format!("{}: {}\nparameters:", f.name, f.summary);
    for p in f.params {
        let d = match p.default {
            Default::Required => "required".to_string(),
            Default::Value(v) => format!("default {v:e}"),
            Default::Derived => "optional".to_string(),
        };
        s.push_str(&format!("\n  --{} <value>  {} ({d})", p.name, p.help));
    }
    s
}

pub fn listing() -> String {
    FORMULAS
        .iter()
        .map(|f| {
            let aliases = if f.aliases.is_empty() { String::new() } else { format!(" ({})", f.aliases.join(", ")) };
            format!("  {}{aliases}: {}", f.name, f.summary)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses `--name value` / `--name=value` pairs against the formula's list.
pub fn parse_params(f: &Formula, args: &[String]) -> Result<BTreeMap<&'static str, f64>, CliError> {
    let bad = |msg: String| CliError::Usage(format!("{msg}\n{}", usage(f)));
    let mut values = BTreeMap::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let key = arg.strip_prefix("--").ok_or_else(|| bad(format!("unexpected argument `{arg}`")))?;
        let (key, raw) = match key.split_once('=') {
            Some((k, v)) => (k, v.to_string()),
            None => (key, it.next().ok_or_else(|| bad(format!("--{key} needs a value")))?.clone()),
        };
        let param = f.params.iter().find(|p| p.name == key).ok_or_else(|| bad(format!("unknown parameter --{key}")))?;
        let v: f64 = raw.parse().map_err(|_| bad(format!("--{key}: `{raw}` is not a number")))?;
        values.insert(param.name, v);
    }
    for p in f.params {
        match p.default {
            Default::Required if !values.contains_key(p.name) => {
                return Err(bad(format!("missing parameter --{}", p.name)));
            }
            Default::Value(v) => {
                values.entry(p.name).or_insert(v);
            }
            _ => {}
        }
    }
    Ok(values)
}

pub fn evaluate(f: &Formula, args: &[String], profile: &PlatformProfile) -> Result<Vec<Output>, CliError> {
    let values = parse_params(f, args)?;
    Ok((f.eval)(&Inputs { values, profile })?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(name: &str, args: &[&str]) -> Result<Vec<Output>, CliError> {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        evaluate(find(name).unwrap(), &args, &PlatformProfile::superconducting_4k())
    }

    #[test]
    fn documented_examples() {
        let d = run("eq6", &["--n", "1e6", "--L", "3"]).unwrap();
        assert_eq!(d[0].display(), "199.4");
        let s = run("squid", &["--ic=300e-6"]).unwrap();
        assert_eq!(s[0].display(), "2.194 µm");
        assert_eq!(s[1].display(), "1.241 aJ");
        assert_eq!(run("eq1", &["--nph", "0", "--etad", "0.7"]).unwrap()[0].value, 1.0);
    }

    #[test]
    fn defaults_and_derived_values() {
        let r = run("receiverless", &[]).unwrap();
        assert!((r[0].value - 0.6612e-15).abs() < 1e-19);
        let r = run("receiverless", &["--r", "1.0"]).unwrap();
        assert!((r[0].value - 0.8e-15).abs() < 1e-27);
        let w = run("reset-energy", &[]).unwrap();
        assert!((w[1].value - 5e-15).abs() < 1e-27);
    }

    #[test]
    fn usage_errors_list_parameters() {
        for args in [&["--n", "1e6"][..], &["--n", "1e6", "--L", "x"], &["--n", "1e6", "--L", "3", "--z", "1"], &["n"]] {
            match run("eq6", args) {
                Err(CliError::Usage(msg)) => assert!(msg.contains("--L <value>"), "{msg}"),
                other => panic!("{other:?}"),
            }
        }
        assert!(find("nope").is_none());
    }

    #[test]
    fn domain_errors_are_validation_errors() {
        assert!(matches!(run("eq6", &["--n", "1e6", "--L", "0.5"]), Err(CliError::Validation(_))));
    }

    #[test]
    fn names_are_unique() {
        let mut all: Vec<&str> = FORMULAS.iter().flat_map(|f| std::iter::once(f.name).chain(f.aliases.iter().copied())).collect();
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
    }
}
