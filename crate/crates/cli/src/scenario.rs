//! Scenario files, bundled examples, and `--set key=value` overrides.

use std::path::Path;

use optoneuro::membench::{MemoryTechSpec, SystemAssumptions};
use optoneuro::netgen::{generate_er, Edge, NetworkGraph};
use optoneuro::simulator::SimConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Scenarios and data files shipped with the binary, by name.
pub const BUNDLED: [(&str, &str); 4] = [
    ("two-synapse-coincidence", include_str!("../data/two-synapse-coincidence.json")),
    ("poisson-link", include_str!("../data/poisson-link.json")),
    ("fanout-ledger", include_str!("../data/fanout-ledger.json")),
    ("technologies", include_str!("../data/technologies.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// How the network of a simulation scenario is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NetworkSpec {
    Edges { n: usize, edges: Vec<Edge> },
    /// Erdős–Rényi graph; the seed defaults to the simulation seed.
    Random { n: usize, mean_degree: f64, seed: Option<u64> },
    /// Edge-list file, relative paths resolved against the scenario file.
    EdgeList { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub network: NetworkSpec,
    pub simulation: SimConfig,
}

impl Scenario {
    pub fn build_network(&self, base: Option<&Path>) -> Result<NetworkGraph, CliError> {
        Ok(match &self.network {
            NetworkSpec::Edges { n, edges } => NetworkGraph::from_edges(*n, edges.clone())?,
            NetworkSpec::Random { n, mean_degree, seed } => {
                generate_er(*n, *mean_degree, seed.unwrap_or(self.simulation.seed))?
            }
            NetworkSpec::EdgeList { path } => {
                let p = base.map_or_else(|| Path::new(path).to_path_buf(), |b| b.join(path));
                let file = std::fs::File::open(&p).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
                NetworkGraph::parse_edge_list(std::io::BufReader::new(file))?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyFile {
    #[serde(default)]
    pub assumptions: SystemAssumptions,
    pub technologies: Vec<MemoryTechSpec>,
}

/// Text of a config given as a file path or, failing that, a bundled name.
/// Returns the directory relative paths inside it resolve against.
pub fn load_text(spec: &str) -> Result<(String, Option<std::path::PathBuf>), CliError> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        return Ok((text, path.parent().map(Path::to_path_buf)));
    }
    bundled(spec).map(|t| (t.to_string(), None)).ok_or_else(|| {
        let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
        CliError::Usage(format!("no file `{spec}` and no bundled config of that name (bundled: {})", names.join(", ")))
    })
}

pub fn parse_value(text: &str, origin: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(format!("{origin}: {e}")))
}

/// Deserializes after overrides; unknown or ill-typed keys become `err`.
pub fn decode<T: DeserializeOwned>(value: Value, err: impl FnOnce(String) -> CliError) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| err(e.to_string()))
}

/// Applies `a.b.0.c=value` overrides. Values parse as JSON, falling back to
/// a bare string, so `--set name=run2` and `--set ns=[1e3,1e4]` both work.
pub fn apply_overrides(value: &mut Value, sets: &[String]) -> Result<(), CliError> {
    for set in sets {
        let (path, raw) =
            set.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects key=value, got `{set}`")))?;
        let new = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut slot = &mut *value;
        for key in path.split('.') {
            if key.is_empty() {
                return Err(CliError::Usage(format!("empty key segment in `{path}`")));
            }
            slot = match slot {
                Value::Array(items) => {
                    let i: usize = key.parse().map_err(|_| CliError::Usage(format!("`{key}` in `{path}` is not an index")))?;
                    let len = items.len();
                    items.get_mut(i).ok_or_else(|| CliError::Usage(format!("index {i} out of range ({len}) in `{path}`")))?
                }
                Value::Object(map) => map.entry(key.to_string()).or_insert(Value::Null),
                other @ Value::Null => {
                    *other = Value::Object(Default::default());
                    other.as_object_mut().expect("just set").entry(key.to_string()).or_insert(Value::Null)
                }
                _ => return Err(CliError::Usage(format!("`{path}` descends into a scalar"))),
            };
        }
        *slot = new;
    }
    Ok(())
}
