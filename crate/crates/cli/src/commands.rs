//! Verb implementations. Each returns the text to print on success.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use optoneuro::membench::{score_technology, Targets, Verdict};
use optoneuro::netgen::validate_eq6;
use optoneuro::platform::PlatformProfile;
use optoneuro::simulator::{power_report, run, Category, PlatformChoice, PowerContext, PowerReport, SimOutput};
use serde::Serialize;
use serde_json::json;

use crate::calc;
use crate::dataset::{Cell, Dataset, Format};
use crate::figures::{self, FigureId};
use crate::scenario::{apply_overrides, decode, load_text, parse_value, Scenario, TechnologyFile};
use crate::CliError;

/// Flags shared by every verb.
#[derive(Debug, Clone)]
pub struct Globals {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub profile: Option<String>,
    pub format: Format,
    pub config: Option<String>,
    pub sets: Vec<String>,
}

impl Globals {
    fn profile(&self) -> Result<PlatformProfile, CliError> {
        match &self.profile {
            None => Ok(PlatformProfile::superconducting_4k()),
            Some(name) => PlatformProfile::builtin(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown profile `{name}`; built-in profiles are {}",
                    PlatformProfile::builtin_names().join(", ")
                ))
            }),
        }
    }

    fn json(&self) -> bool {
        self.format == Format::Json
    }
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

pub fn calc(g: &Globals, formula: Option<&str>, args: &[String]) -> Result<String, CliError> {
    let Some(name) = formula.filter(|f| *f != "list") else {
        return Ok(format!("formulas:\n{}", calc::listing()));
    };
    let f = calc::find(name)
        .ok_or_else(|| CliError::Usage(format!("unknown formula `{name}`; available:\n{}", calc::listing())))?;
    let profile = g.profile()?;
    let outputs = calc::evaluate(f, args, &profile)?;
    if g.json() {
        let inputs = calc::parse_params(f, args)?;
        return Ok(pretty(&json!({ "formula": f.name, "profile": profile.name, "inputs": inputs, "outputs": outputs })));
    }
    Ok(outputs.iter().map(|o| format!("{} = {}", o.name, o.display())).collect::<Vec<_>>().join("\n"))
}

fn figure_config(g: &Globals) -> Result<Option<serde_json::Value>, CliError> {
    g.config
        .as_deref()
        .map(|path| {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))
        })
        .transpose()
}

pub fn figure(g: &Globals, id: Option<FigureId>) -> Result<String, CliError> {
    let ids: Vec<FigureId> = id.map_or_else(|| FigureId::ALL.to_vec(), |id| vec![id]);
    if ids.len() > 1 && (g.config.is_some() || !g.sets.is_empty()) {
        return Err(CliError::Usage("--config and --set need a single figure id".into()));
    }
    let config = figure_config(g)?;
    // Build everything first so a bad override writes nothing.
    let datasets = ids.iter().map(|&id| figures::build(id, config.clone(), &g.sets)).collect::<Result<Vec<_>, _>>()?;
    let paths = datasets.iter().map(|d| d.save(&g.out, g.format)).collect::<Result<Vec<_>, _>>()?;
    Ok(paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join("\n"))
}

#[derive(Debug, Serialize)]
struct SimulationSummary {
    scenario: String,
    seed: u64,
    platform: String,
    neurons: usize,
    synapses: usize,
    duration_s: f64,
    events_processed: u64,
    total_spikes: u64,
    spike_counts: Vec<u64>,
    mean_rate_hz: f64,
    detected_fraction: Option<f64>,
    on_chip_energy_j: f64,
    wall_energy_j: f64,
    wall_power_w: f64,
    budget_utilization: Option<f64>,
    outputs: Vec<String>,
}

fn summary_text(s: &SimulationSummary) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "scenario: {} (seed {}, platform {})", s.scenario, s.seed, s.platform);
    let _ = writeln!(t, "network: {} neurons, {} synapses, {} s", s.neurons, s.synapses, s.duration_s);
    let _ = writeln!(t, "events processed: {}", s.events_processed);
    let _ = writeln!(t, "spikes: {} total", s.total_spikes);
    if s.spike_counts.len() <= 16 {
        let _ = writeln!(t, "spikes per neuron: {:?}", s.spike_counts);
    }
    let _ = writeln!(t, "mean rate: {:e} Hz", s.mean_rate_hz);
    if let Some(f) = s.detected_fraction {
        let _ = writeln!(t, "detected fraction: {f:.6}");
    }
    let _ = writeln!(t, "on-chip energy: {:e} J", s.on_chip_energy_j);
    let _ = writeln!(t, "wall energy: {:e} J", s.wall_energy_j);
    let _ = writeln!(t, "wall power: {:e} W", s.wall_power_w);
    match s.budget_utilization {
        Some(u) => {
            let _ = writeln!(t, "budget utilization: {:.2}%", u * 100.0);
        }
        None => {
            let _ = writeln!(t, "budget utilization: no budget configured");
        }
    }
    for o in &s.outputs {
        let _ = writeln!(t, "wrote {o}");
    }
    t.trim_end().to_string()
}

fn spike_dataset(out: &SimOutput, scenario: &Scenario) -> Option<Dataset> {
    if out.spikes.spikes.is_empty() {
        return None;
    }
    let mut d = Dataset::new("spikes", &["neuron_id", "time_s"])
        .with("scenario", &scenario.name)
        .with("seed", scenario.simulation.seed);
    for s in &out.spikes.spikes {
        d.push(vec![Cell::Number(f64::from(s.neuron)), s.time_s.into()]);
    }
    Some(d)
}

fn ledger_document(scenario: &Scenario, out: &SimOutput, power: &PowerReport) -> serde_json::Value {
    json!({
        "provenance": {
            "tool": format!("optoneuro {}", env!("CARGO_PKG_VERSION")),
            "scenario": scenario.name,
            "seed": scenario.simulation.seed,
            "config": scenario,
        },
        "energy": out.ledger.summary(),
        "synapses": out.synapses,
        "power": power,
        "spike_counts": out.spikes.counts,
        "events_processed": out.events_processed,
    })
}

pub fn simulate(g: &Globals, positional: Option<&str>) -> Result<String, CliError> {
    let spec = positional
        .or(g.config.as_deref())
        .ok_or_else(|| CliError::Usage("simulate needs a scenario: a path or a bundled name".into()))?;
    let (text, base) = load_text(spec)?;
    let mut value = parse_value(&text, spec)?;
    apply_overrides(&mut value, &g.sets)?;
    let mut scenario: Scenario = decode(value, |e| CliError::Validation(format!("{spec}: {e}")))?;
    if let Some(seed) = g.seed {
        scenario.simulation.seed = seed;
    }
    if let Some(p) = &g.profile {
        g.profile()?;
        scenario.simulation.platform = PlatformChoice::Named(p.clone());
    }
    let graph = scenario.build_network(base.as_deref())?;
    let out = run(&graph, &scenario.simulation)?;
    let ctx = PowerContext::from_run(&graph, &out, &scenario.simulation.power);
    let power = power_report(&out.ledger, scenario.simulation.duration, &out.resolved.profile, &ctx)?;

    let dir = g.out.join(&scenario.name);
    let mut outputs = Vec::new();
    if let Some(d) = spike_dataset(&out, &scenario) {
        outputs.push(d.save(&dir, g.format)?);
    }
    std::fs::create_dir_all(&dir)?;
    let ledger_path = dir.join("ledger.json");
    let mut doc = pretty(&ledger_document(&scenario, &out, &power));
    doc.push('\n');
    std::fs::write(&ledger_path, doc)?;
    outputs.push(ledger_path);

    let syn = &out.synapses;
    let summary = SimulationSummary {
        scenario: scenario.name.clone(),
        seed: scenario.simulation.seed,
        platform: out.resolved.profile.name.clone(),
        neurons: graph.n(),
        synapses: graph.edges().len(),
        duration_s: scenario.simulation.duration.value(),
        events_processed: out.events_processed,
        total_spikes: out.spikes.total(),
        spike_counts: out.spikes.counts.clone(),
        mean_rate_hz: power.mean_rate_hz,
        detected_fraction: syn.detected_fraction,
        on_chip_energy_j: out.ledger.on_chip_total().value(),
        wall_energy_j: out.ledger.wall_total().value(),
        wall_power_w: power.wall_power_w,
        budget_utilization: power.budget_utilization,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    debug_assert!(out.ledger.total(Category::SourceOptical).value() >= 0.0);
    Ok(if g.json() { pretty(&summary) } else { summary_text(&summary) })
}

#[derive(Debug, Clone)]
pub struct Eq6Args {
    pub n: Vec<usize>,
    pub k: Vec<f64>,
    pub seeds: usize,
    pub tolerance: f64,
}

/// Returns the report and whether every row met the tolerance.
pub fn validate(g: &Globals, a: &Eq6Args) -> Result<(String, bool), CliError> {
    if !(a.tolerance > 0.0) {
        return Err(CliError::Usage(format!("--tolerance must be > 0, got {}", a.tolerance)));
    }
    let base_seed = g.seed.unwrap_or(0);
    let rows = validate_eq6(&a.n, &a.k, a.seeds, base_seed, a.tolerance)?;
    let mut d = Dataset::new(
        "validate-eq6",
        &[
            "n",
            "k",
            "seeds",
            "empirical_mean",
            "empirical_std",
            "prediction",
            "relative_error",
            "min_reachable_fraction",
            "realized_mean_degree",
            "within_tolerance",
        ],
    )
    .with("seed", base_seed)
    .with("tolerance", a.tolerance);
    let mut text = String::from("n\tk\tmean\tpredicted\trel_error\tresult\n");
    for r in &rows {
        d.push(vec![
            (r.n as f64).into(),
            r.k.into(),
            (r.seeds as f64).into(),
            r.empirical_mean.into(),
            r.empirical_std.into(),
            r.prediction.into(),
            r.relative_error.into(),
            r.min_reachable_fraction.into(),
            r.realized_mean_degree.into(),
            Cell::from(if r.within_tolerance { "true" } else { "false" }),
        ]);
        let _ = writeln!(
            text,
            "{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}",
            r.n,
            r.k,
            r.empirical_mean,
            r.prediction,
            r.relative_error,
            if r.within_tolerance { "ok" } else { "FAIL" }
        );
    }
    let ok = rows.iter().all(|r| r.within_tolerance);
    let path = d.save(&g.out, g.format)?;
    let _ = write!(text, "wrote {}", path.display());
    Ok((text, ok))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Unknown => "unknown",
    }
}

pub fn membench(g: &Globals) -> Result<String, CliError> {
    let spec = g.config.as_deref().unwrap_or("technologies");
    let (text, _) = load_text(spec)?;
    let mut value = parse_value(&text, spec)?;
    apply_overrides(&mut value, &g.sets)?;
    let file: TechnologyFile = decode(value, |e| CliError::Validation(format!("{spec}: {e}")))?;
    let targets = Targets::from_assumptions(&file.assumptions)?;
    let scores = file
        .technologies
        .iter()
        .map(|t| score_technology(t, &file.assumptions))
        .collect::<Result<Vec<_>, _>>()?;

    let mut d = Dataset::new("membench", &["technology", "metric", "direction", "target", "value", "margin", "verdict"])
        .with("assumptions", serde_json::to_string(&file.assumptions).expect("serializable"))
        .with("source", spec);
    for s in &scores {
        for m in &s.metrics {
            let direction = match m.direction {
                optoneuro::membench::Direction::AtLeast => "at_least",
                optoneuro::membench::Direction::AtMost => "at_most",
            };
            d.push(vec![
                s.name.as_str().into(),
                m.metric.as_str().into(),
                direction.into(),
                m.target.into(),
                m.value.into(),
                m.margin.into(),
                verdict_name(m.verdict).into(),
            ]);
        }
    }
    let path = d.save(&g.out, g.format)?;
    if g.json() {
        return Ok(pretty(&json!({ "targets": targets, "scores": scores, "dataset": path })));
    }
    let mut t = String::from("targets:\n");
    for (metric, goal) in targets.table() {
        let _ = writeln!(t, "  {metric}: {goal}");
    }
    for s in &scores {
        let _ = writeln!(t, "{}: {}", s.name, verdict_name(s.overall));
        for m in &s.metrics {
            let margin = m.margin.map_or("-".to_string(), |x| format!("{x:.3e}"));
            let _ = writeln!(t, "  {:<16} {:<8} margin {margin}", m.metric, verdict_name(m.verdict));
        }
        for n in &s.notes {
            let _ = writeln!(t, "  note: {n}");
        }
    }
    let _ = write!(t, "wrote {}", path.display());
    Ok(t)
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os("OPTONEURO_OUT").map_or_else(|| Path::new("optoneuro-out").to_path_buf(), PathBuf::from)
}
