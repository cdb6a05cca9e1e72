//! JSON documents for failure scenarios and routing structures.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tree_route_core::structures::distances_to_exit;
use tree_route_core::{Edge, FailureModel, FailureScenario, Graph, Mode, RoutingStructures, Unit};

use crate::error::{Error, Result};

/// Serialized failure scenario; links are pairs of dense node ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub model: FailureModel,
    pub rate: f64,
    pub seed: u64,
    pub failed: Vec<[u32; 2]>,
}

impl ScenarioDoc {
    pub fn from_scenario(s: &FailureScenario) -> Self {
        let failed = s
            .failed
            .iter()
            .map(|e| {
                let (a, b) = e.endpoints();
                [a.0, b.0]
            })
            .collect();
        ScenarioDoc { model: s.model, rate: s.rate, seed: s.seed, failed }
    }

    /// Checks every link against `g`.
    pub fn to_scenario(&self, g: &Graph) -> Result<FailureScenario> {
        let mut failed = std::collections::BTreeSet::new();
        for &[a, b] in &self.failed {
            let (u, v) = (tree_route_core::NodeId(a), tree_route_core::NodeId(b));
            if a == b || !g.contains_node(u) || !g.contains_node(v) || !g.has_edge(u, v) {
                return Err(Error::UnknownNode(format!("{a}-{b}")));
            }
            failed.insert(Edge::new(u, v));
        }
        Ok(FailureScenario { failed, model: self.model, rate: self.rate, seed: self.seed })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// Reads a map whose JSON object keys are node ids.
fn id_keyed<'de, D, V>(de: D) -> std::result::Result<BTreeMap<u32, V>, D::Error>
where
    D: serde::Deserializer<'de>,
    V: Deserialize<'de>,
{
    BTreeMap::<String, V>::deserialize(de)?
        .into_iter()
        .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(serde::de::Error::custom))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UnitDoc {
    Path {
        nodes: Vec<u32>,
    },
    Tree {
        root: u32,
        edges: Vec<[u32; 2]>,
        /// Ranked children per node, in routing order.
        #[serde(deserialize_with = "id_keyed")]
        children: BTreeMap<u32, Vec<u32>>,
        /// Hops from each node to the nearest node adjacent to the destination.
        #[serde(deserialize_with = "id_keyed")]
        exit_distance: BTreeMap<u32, usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        priority_path: Option<Vec<u32>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuresDoc {
    pub source: u32,
    pub destination: u32,
    pub mode: Mode,
    pub edps: Vec<Vec<u32>>,
    pub units: Vec<UnitDoc>,
}

fn ids(nodes: &[tree_route_core::NodeId]) -> Vec<u32> {
    nodes.iter().map(|v| v.0).collect()
}

impl StructuresDoc {
    pub fn new(g: &Graph, rs: &RoutingStructures) -> Self {
        let units = rs
            .units
            .iter()
            .map(|u| match u {
                Unit::Path(p) => UnitDoc::Path { nodes: ids(p.nodes()) },
                Unit::Tree(t) => UnitDoc::Tree {
                    root: t.root().0,
                    edges: t
                        .edges()
                        .map(|e| {
                            let (a, b) = e.endpoints();
                            [a.0, b.0]
                        })
                        .collect(),
                    children: t
                        .nodes()
                        .iter()
                        .filter(|&&v| !t.children(v).is_empty())
                        .map(|&v| (v.0, ids(t.children(v))))
                        .collect(),
                    exit_distance: distances_to_exit(g, t, rs.destination)
                        .into_iter()
                        .map(|(v, h)| (v.0, h))
                        .collect(),
                    priority_path: t.priority_path().map(ids),
                },
            })
            .collect();
        StructuresDoc {
            source: rs.source.0,
            destination: rs.destination.0,
            mode: rs.mode,
            edps: rs.edps.paths.iter().map(|p| ids(p.nodes())).collect(),
            units,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| Error::Json { path: path.into(), source })?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
