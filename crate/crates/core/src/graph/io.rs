//! JSON graph files.
//!
//! ```json
//! { "vertices": [{"id": 0, "c": 1.0}, ...],
//!   "edges": [{"u": 0, "v": 1, "r": 1.0}, ...],
//!   "frontier": [ids...],
//!   "ray_ends": [ids...] }
//! ```
//!
//! Ids may be integers or strings. `ray_ends` is optional and marks frontier
//! vertices that continue as infinite rays; plain `frontier` entries are
//! sealed. Loading applies the same validation as [`build_graph`].
//!
//! [`build_graph`]: super::build_graph

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FrontierKind, VertexId, WeightedGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
}

impl Label {
    fn key(&self) -> String {
        match self {
            Label::Int(i) => i.to_string(),
            Label::Str(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFileVertex {
    pub id: Label,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFileEdge {
    pub u: Label,
    pub v: Label,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<GraphFileVertex>,
    pub edges: Vec<GraphFileEdge>,
    #[serde(default)]
    pub frontier: Vec<Label>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ray_ends: Vec<Label>,
}

impl GraphFile {
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let label = |x: VertexId| match g.label(x).parse::<i64>() {
            Ok(i) if i.to_string() == g.label(x) => Label::Int(i),
            _ => Label::Str(g.label(x).to_owned()),
        };
        let vertices = g
            .vertices()
            .map(|x| GraphFileVertex {
                id: label(x),
                c: g.c(x),
            })
            .collect();
        let edges = g
            .canonical_edges()
            .map(|e| GraphFileEdge {
                u: label(e.tail),
                v: label(e.head),
                r: g.r(e.edge),
            })
            .collect();
        let of_kind = |k| {
            g.vertices()
                .filter(|&x| g.frontier_kind(x) == Some(k))
                .map(label)
                .collect()
        };
        GraphFile {
            vertices,
            edges,
            frontier: of_kind(FrontierKind::Sealed),
            ray_ends: of_kind(FrontierKind::RayEnd),
        }
    }

    pub fn into_graph(self) -> Result<WeightedGraph> {
        let mut index = HashMap::with_capacity(self.vertices.len());
        let mut labels = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            let key = v.id.key();
            if index.insert(key.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate vertex id {key:?}")));
            }
            labels.push(key);
        }
        let lookup = |l: &Label| {
            index
                .get(&l.key())
                .copied()
                .ok_or_else(|| Error::UnknownLabel(l.key()))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| Ok((lookup(&e.u)?, lookup(&e.v)?, e.r)))
            .collect::<Result<Vec<_>>>()?;
        let weights = self.vertices.iter().map(|v| v.c).collect();
        let sealed = self
            .frontier
            .iter()
            .map(|l| lookup(l).map(VertexId))
            .collect::<Result<Vec<_>>>()?;
        let rays = self
            .ray_ends
            .iter()
            .map(|l| lookup(l).map(VertexId))
            .collect::<Result<Vec<_>>>()?;
        WeightedGraph::new(weights, &edges)?
            .with_labels(labels)?
            .with_frontier(&sealed, &rays)
    }
}

impl WeightedGraph {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        file.into_graph()
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&GraphFile::from_graph(self))?)
    }
}
