//! Figure datasets: parameter sweeps over the analytic models.

use optoneuro::linkbudget::{receiverless_optical_energy, transmitter_power, ReceiverlessPhotodiode};
use optoneuro::platform::{cmos_max_time_constant, max_average_spike_rate, sc_max_time_constant, TimeConstantSpec};
use optoneuro::quantities::{Energy, Frequency, Length, Power, Probability};
use optoneuro::scaling::{degree_sweep, log_grid, required_planes, sweep_path_length_vs_width, Wafer, WidthAxis};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dataset::Dataset;
use crate::scenario::{apply_overrides, decode};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureId {
    Fig3,
    Fig4,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl FigureId {
    pub const ALL: [FigureId; 6] =
        [FigureId::Fig3, FigureId::Fig4, FigureId::Fig6, FigureId::Fig7, FigureId::Fig8, FigureId::Fig9];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            FigureId::Fig3 => "transmitter optical power to drive a fan-out of receiverless photodiodes vs spike rate",
            FigureId::Fig4 => "photonic and electronic planes for a fixed path length vs neurons per wafer",
            FigureId::Fig6 => "mean spike rate within a power budget vs population size",
            FigureId::Fig7 => "maximum synaptic time constant vs synapse width",
            FigureId::Fig8 => "mean degree vs network size for several path lengths",
            FigureId::Fig9 => "achievable path length vs synapse width and waveguide pitch",
        }
    }

    /// Default parameters as JSON, the base that config files and `--set`
    /// overrides are applied to.
    pub fn defaults(self) -> Value {
        let v = match self {
            FigureId::Fig3 => serde_json::to_value(TransmitterParams::default()),
            FigureId::Fig4 => serde_json::to_value(PlaneParams::default()),
            FigureId::Fig6 => serde_json::to_value(RateParams::default()),
            FigureId::Fig7 => serde_json::to_value(TimeConstantParams::default()),
            FigureId::Fig8 => serde_json::to_value(DegreeParams::default()),
            FigureId::Fig9 => serde_json::to_value(PathLengthParams::default()),
        };
        v.expect("parameter structs serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmitterParams {
    pub fanout: f64,
    pub eta: f64,
    pub wavelength_m: f64,
    pub rates_hz: Vec<f64>,
}

impl Default for TransmitterParams {
    fn default() -> Self {
        Self { fanout: 1000.0, eta: 1.0, wavelength_m: 1.5e-6, rates_hz: log_grid(1e3, 1e10, 29) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneParams {
    pub path_length: f64,
    pub n_300: Vec<f64>,
    pub w_wg_m: f64,
    pub w_sy_m: Vec<f64>,
    pub wafer: Wafer,
}

impl Default for PlaneParams {
    fn default() -> Self {
        Self {
            path_length: 2.5,
            n_300: log_grid(1e4, 1e7, 31),
            w_wg_m: 2e-6,
            w_sy_m: vec![10e-6, 30e-6],
            wafer: Wafer::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateParams {
    pub power_budget_w: f64,
    pub fanout: f64,
    /// Energy per synapse event at unit link efficiency, cooling included.
    pub e_opt_j: f64,
    pub etas: Vec<f64>,
    pub n_neurons: Vec<f64>,
}

impl Default for RateParams {
    fn default() -> Self {
        Self {
            power_budget_w: 10e6,
            fanout: 1000.0,
            e_opt_j: 1e-15,
            etas: vec![1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5],
            n_neurons: log_grid(1e6, 1e12, 25),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConstantParams {
    pub widths_m: Vec<f64>,
    pub circuit: TimeConstantSpec,
}

impl Default for TimeConstantParams {
    fn default() -> Self {
        Self { widths_m: (1..=100).map(|w| f64::from(w) / 1e6).collect(), circuit: TimeConstantSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeParams {
    pub n_total: Vec<f64>,
    pub path_lengths: Vec<f64>,
}

impl Default for DegreeParams {
    fn default() -> Self {
        Self { n_total: log_grid(1e2, 1e12, 41), path_lengths: vec![1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLengthParams {
    pub n_300: Vec<f64>,
    pub planes: Vec<f64>,
    pub w_sy_m: Vec<f64>,
    pub w_wg_m: Vec<f64>,
    pub wafer: Wafer,
}

impl Default for PathLengthParams {
    fn default() -> Self {
        Self {
            n_300: vec![1e5, 1e6, 1e7],
            planes: vec![1.0, 10.0],
            w_sy_m: log_grid(1e-6, 1e-4, 41),
            w_wg_m: log_grid(1e-7, 1e-5, 41),
            wafer: Wafer::default(),
        }
    }
}

fn params<T: DeserializeOwned + Serialize>(value: Value) -> Result<(T, String), CliError> {
    let p: T = decode(value, |e| CliError::Usage(format!("invalid figure parameter: {e}")))?;
    let json = serde_json::to_string(&p).expect("parameter structs serialize");
    Ok((p, json))
}

fn prob(v: f64) -> Result<Probability, CliError> {
    Probability::new(v).map_err(|e| CliError::Usage(e.to_string()))
}

/// Builds a figure dataset from defaults overlaid with `config` keys and then
/// `--set` overrides.
pub fn build(id: FigureId, config: Option<Value>, sets: &[String]) -> Result<Dataset, CliError> {
    let mut value = id.defaults();
    if let Some(Value::Object(cfg)) = config {
        let base = value.as_object_mut().expect("parameters are objects");
        for (k, v) in cfg {
            base.insert(k, v);
        }
    } else if config.is_some() {
        return Err(CliError::Usage("figure config must be a JSON object".into()));
    }
    apply_overrides(&mut value, sets)?;
    let built = match id {
        FigureId::Fig3 => params(value).and_then(transmitter),
        FigureId::Fig4 => params(value).and_then(planes),
        FigureId::Fig6 => params(value).and_then(rates),
        FigureId::Fig7 => params(value).and_then(time_constants),
        FigureId::Fig8 => params(value).and_then(degrees),
        FigureId::Fig9 => params(value).and_then(path_lengths),
    };
    // Out-of-domain parameters can only come from overrides here.
    let (mut data, json) = built.map_err(|e| match e {
        CliError::Validation(m) => CliError::Usage(m),
        e => e,
    })?;
    data.provenance.insert("figure".into(), id.name().into());
    data.provenance.insert("title".into(), id.title().into());
    data.provenance.insert("params".into(), json);
    data.provenance.insert("seed".into(), "none (deterministic)".into());
    Ok(data)
}

fn transmitter((p, json): (TransmitterParams, String)) -> Result<(Dataset, String), CliError> {
    let pd = ReceiverlessPhotodiode::at_wavelength(Length::new(p.wavelength_m))?;
    let e = receiverless_optical_energy(&pd, prob(1.0)?)?;
    let eta = prob(p.eta)?;
    let mut d = Dataset::new("fig3", &["spike_rate_hz", "per_synapse_energy_j", "optical_power_w"]);
    for &f in &p.rates_hz {
        let power = transmitter_power(p.fanout, e, Frequency::new(f), eta)?;
        d.push(vec![f.into(), e.value().into(), power.value().into()]);
    }
    Ok((d, json))
}

fn planes((p, json): (PlaneParams, String)) -> Result<(Dataset, String), CliError> {
    let mut d = Dataset::new(
        "fig4",
        &[
            "n_300",
            "w_wg_m",
            "w_sy_m",
            "degree",
            "photonic_planes",
            "electronic_planes",
            "photonic_planes_ceil",
            "electronic_planes_ceil",
        ],
    );
    for &w_sy in &p.w_sy_m {
        for &n in &p.n_300 {
            let r = required_planes(n, p.path_length, Length::new(p.w_wg_m), Length::new(w_sy), &p.wafer)?;
            d.push(vec![
                n.into(),
                p.w_wg_m.into(),
                w_sy.into(),
                r.degree.into(),
                r.p_p.into(),
                r.p_e.into(),
                r.p_p.ceil().max(1.0).into(),
                r.p_e.ceil().max(1.0).into(),
            ]);
        }
    }
    Ok((d, json))
}

fn rates((p, json): (RateParams, String)) -> Result<(Dataset, String), CliError> {
    let mut d = Dataset::new("fig6", &["eta", "n_neurons", "e_per_event_j", "rate_hz"]);
    for &eta in &p.etas {
        let e = p.e_opt_j / prob(eta)?.value();
        for &n in &p.n_neurons {
            let f = max_average_spike_rate(Power::new(p.power_budget_w), n, p.fanout, Energy::new(e))?;
            d.push(vec![eta.into(), n.into(), e.into(), f.value().into()]);
        }
    }
    Ok((d, json))
}

fn time_constants((p, json): (TimeConstantParams, String)) -> Result<(Dataset, String), CliError> {
    let mut d = Dataset::new("fig7", &["w_sy_m", "cmos_tau_s", "superconducting_tau_s"]);
    for &w in &p.widths_m {
        let cmos = cmos_max_time_constant(Length::new(w), &p.circuit)?;
        let sc = sc_max_time_constant(Length::new(w), &p.circuit)?;
        d.push(vec![w.into(), cmos.value().into(), sc.tau_max.value().into()]);
    }
    Ok((d, json))
}

fn degrees((p, json): (DegreeParams, String)) -> Result<(Dataset, String), CliError> {
    let mut d = Dataset::new("fig8", &["n_total", "path_length", "degree"]);
    for (n, l, k) in degree_sweep(&p.n_total, &p.path_lengths)? {
        d.push(vec![n.into(), l.into(), k.into()]);
    }
    Ok((d, json))
}

fn path_lengths((p, json): (PathLengthParams, String)) -> Result<(Dataset, String), CliError> {
    let mut d = Dataset::new("fig9", &["axis", "n_300", "planes", "width_m", "max_degree", "path_length"]);
    for (axis, widths) in [(WidthAxis::SynapseWidth, &p.w_sy_m), (WidthAxis::WaveguidePitch, &p.w_wg_m)] {
        let widths: Vec<Length> = widths.iter().map(|&w| Length::new(w)).collect();
        for pt in sweep_path_length_vs_width(axis, &p.n_300, &p.planes, &widths, &p.wafer)? {
            d.push(vec![
                axis.label().into(),
                pt.n_300.into(),
                pt.planes.into(),
                pt.width.value().into(),
                pt.max_degree.into(),
                pt.path_length.into(),
            ]);
        }
    }
    Ok((d, json))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Cell;

    fn find(d: &Dataset, key: &[(&str, f64)]) -> Vec<Cell> {
        let idx: Vec<usize> = key.iter().map(|(c, _)| d.column(c).unwrap()).collect();
        d.rows
            .iter()
            .find(|r| idx.iter().zip(key).all(|(&i, (_, v))| (r[i].as_f64().unwrap() - v).abs() <= 1e-9 * v.abs()))
            .unwrap_or_else(|| panic!("no row for {key:?}"))
            .clone()
    }

    #[test]
    fn time_constant_rows() {
        let d = build(FigureId::Fig7, None, &[]).unwrap();
        let row = find(&d, &[("w_sy_m", 30e-6)]);
        assert!((row[1].as_f64().unwrap() - 45.0).abs() < 1e-9);
        assert!((row[2].as_f64().unwrap() - 324.0).abs() < 1e-9);
    }

    #[test]
    fn degree_rows() {
        let d = build(FigureId::Fig8, None, &[]).unwrap();
        let k = find(&d, &[("n_total", 1e6), ("path_length", 3.0)])[2].as_f64().unwrap();
        assert!((k - 199.7).abs() / 199.7 < 0.01);
        let k = find(&d, &[("n_total", 1e8), ("path_length", 2.0)])[2].as_f64().unwrap();
        assert!(k > 1e5);
    }

    #[test]
    fn rate_rows() {
        let d = build(FigureId::Fig6, None, &[]).unwrap();
        let f = find(&d, &[("eta", 0.01), ("n_neurons", 1e10)])[3].as_f64().unwrap();
        assert!((f - 1e7).abs() / 1e7 < 1e-9);
    }

    #[test]
    fn transmitter_rows() {
        let d = build(FigureId::Fig3, None, &["rates_hz=[1e6,1e9]".into()]).unwrap();
        assert_eq!(d.rows.len(), 2);
        assert!((d.rows[0][2].as_f64().unwrap() - 0.6612e-6).abs() < 1e-10);
        assert!((d.rows[1][2].as_f64().unwrap() - 0.6612e-3).abs() < 1e-7);
    }

    #[test]
    fn plane_rows() {
        let d = build(FigureId::Fig4, None, &["n_300=[1e6]".into()]).unwrap();
        assert_eq!(d.rows.len(), 2);
        let single = d.rows[0][5].as_f64().unwrap();
        let thirty = d.rows[1][5].as_f64().unwrap();
        assert!((0.9..=1.3).contains(&single));
        assert!((8.0..=11.0).contains(&thirty));
        assert!((4.5..=7.0).contains(&d.rows[0][4].as_f64().unwrap()));
    }

    #[test]
    fn path_length_rows_flag_infeasible_points() {
        let d = build(FigureId::Fig9, None, &["w_sy_m=[1e-5,1e-1]".into(), "w_wg_m=[2e-6]".into()]).unwrap();
        assert_eq!(d.rows.len(), 3 * 2 * 3);
        assert!(d.rows.iter().any(|r| r[5] == Cell::Missing));
        let ten_um = d.rows.iter().find(|r| r[0].as_str() == Some("w_sy") && r[1].as_f64() == Some(1e6) && r[2].as_f64() == Some(1.0) && r[3].as_f64() == Some(1e-5)).unwrap();
        assert!((ten_um[5].as_f64().unwrap() - 2.5).abs() < 0.05);
    }

    #[test]
    fn overrides_are_validated() {
        assert!(matches!(build(FigureId::Fig7, None, &["bogus=1".into()]), Err(CliError::Usage(_))));
        assert!(matches!(build(FigureId::Fig7, None, &["widths_m=wide".into()]), Err(CliError::Usage(_))));
        assert!(matches!(build(FigureId::Fig7, None, &["widths_m=[-1]".into()]), Err(CliError::Usage(_))));
        let cfg = serde_json::json!({"widths_m": [1e-5]});
        assert_eq!(build(FigureId::Fig7, Some(cfg), &[]).unwrap().rows.len(), 1);
    }

    #[test]
    fn every_figure_has_rows_and_provenance() {
        for id in FigureId::ALL {
            let d = build(id, None, &[]).unwrap();
            assert!(!d.rows.is_empty());
            assert_eq!(d.name, id.name());
            for key in ["figure", "title", "params", "seed", "tool"] {
                assert!(d.provenance.contains_key(key), "{key}");
            }
        }
    }
}
