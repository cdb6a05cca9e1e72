//! Link-failure models.
//!
//! * Random: `round(rate * k)` distinct links fail, drawn uniformly, where `k`
//!   is the graph's edge connectivity. Rounding is half-up.
//! * Clustered: failures concentrate around the destination. A link whose
//!   closer endpoint is `h` hops from `d` fails independently with probability
//!   `rate * (1 - delta)^h` (multiplicative decay, the default) or
//!   `max(0, rate - h * delta)` (subtractive decay).
//!
//! Clustered scenarios draw one uniform number per link in canonical edge
//! order, so scenarios with the same seed are nested in the rate.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::graph::{Edge, Graph, NodeId};
use crate::rng::seeded;
use crate::{Error, Result};

/// Decay of the clustered failure probability per hop away from `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Decay {
    #[default]
    Multiplicative,
    Subtractive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum FailureModel {
    Random,
    Clustered {
        delta: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        decay: Decay,
    },
}

impl FailureModel {
    pub const DEFAULT_DELTA: f64 = 0.3;

    pub fn clustered() -> Self {
        FailureModel::Clustered { delta: Self::DEFAULT_DELTA, decay: Decay::Multiplicative }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FailureModel::Random => "random",
            FailureModel::Clustered { .. } => "clustered",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailureScenario {
    pub failed: BTreeSet<Edge>,
    pub model: FailureModel,
    pub rate: f64,
    pub seed: u64,
}

/// Failed-link count for the random model: `rate * k` rounded half-up. The
/// small epsilon absorbs representation error (`0.7 * 5` is just below 3.5).
pub fn random_failure_count(rate: f64, k: usize) -> usize {
    let x = rate * k as f64;
    if x <= 0.0 {
        0
    } else {
        (x + 0.5 + 1e-9) as usize
    }
}

pub fn random_failures(g: &Graph, rate: f64, k: usize, seed: u64) -> Result<FailureScenario> {
    if !(rate >= 0.0) {
        return Err(Error::InvalidParameters("failure rate must be non-negative"));
    }
    let count = random_failure_count(rate, k);
    let available = g.edge_count();
    if count > available {
        return Err(Error::TooManyFailures { requested: count, available });
    }
    let mut rng = seeded(seed);
    let failed = index::sample(&mut rng, available, count)
        .into_iter()
        .map(|i| g.edges()[i])
        .collect();
    Ok(FailureScenario { failed, model: FailureModel::Random, rate, seed })
}

/// Hop distance of every edge to `d`, measured from its closer endpoint.
pub fn edge_distances(g: &Graph, d: NodeId) -> Vec<usize> {
    let dist = g.bfs_distances(d);
    g.edges()
        .iter()
        .map(|e| {
            let (a, b) = e.endpoints();
            let da = dist[a.index()].unwrap_or(usize::MAX);
            let db = dist[b.index()].unwrap_or(usize::MAX);
            da.min(db)
        })
        .collect()
}

/// Failure probability of an edge `hops` away from the epicenter.
pub fn clustered_probability(rate: f64, delta: f64, decay: Decay, hops: usize) -> f64 {
    match decay {
        Decay::Multiplicative => {
            let keep = 1.0 - delta;
            let mut p = rate;
            for _ in 0..hops {
                if p == 0.0 {
                    break;
                }
                p *= keep;
            }
            p
        }
        Decay::Subtractive => (rate - hops as f64 * delta).max(0.0),
    }
}

pub fn clustered_failures(
    g: &Graph,
    d: NodeId,
    rate: f64,
    delta: f64,
    decay: Decay,
    seed: u64,
) -> Result<FailureScenario> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameters("clustered failure rate must lie in [0, 1]"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameters("clustered decay must lie in [0, 1]"));
    }
    if !g.contains_node(d) {
        return Err(Error::NodeOutOfRange { node: d.index(), nodes: g.node_count() });
    }
    let mut rng = seeded(seed);
    let hops = edge_distances(g, d);
    let failed = g
        .edges()
        .iter()
        .zip(hops)
        .filter_map(|(&e, h)| {
            let draw: f64 = rng.gen();
            (draw < clustered_probability(rate, delta, decay, h)).then_some(e)
        })
        .collect();
    Ok(FailureScenario { failed, model: FailureModel::Clustered { delta, decay }, rate, seed })
}
