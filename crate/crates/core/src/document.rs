//! On-disk form of a poset with its chains: JSON for round trips, DOT for
//! drawing the Hasse diagram.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::metric::Layout;
use crate::order::{Chain, ChainId, EventId, FrozenPoset, OrderError, Poset};
use crate::rational::{serde_rational_vec, Rational};

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Order(#[from] OrderError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub id: ChainId,
    pub events: Vec<EventId>,
    #[serde(with = "serde_rational_vec")]
    pub valuations: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetDocument {
    pub events: Vec<EventId>,
    pub covers: Vec<(EventId, EventId)>,
    #[serde(default)]
    pub chains: Vec<ChainRecord>,
}

impl PosetDocument {
    pub fn from_parts(poset: &FrozenPoset, chains: &[Chain]) -> Self {
        PosetDocument {
            events: poset.events().to_vec(),
            covers: poset.covers_list().to_vec(),
            chains: chains
                .iter()
                .map(|c| ChainRecord {
                    id: c.id().clone(),
                    events: c.elements().to_vec(),
                    valuations: c.valuations().to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_layout(layout: &Layout) -> Self {
        Self::from_parts(&layout.poset, &layout.chains)
    }

    /// Rebuilds the poset from its covers and revalidates every chain.
    pub fn build(&self) -> Result<(FrozenPoset, Vec<Chain>), DocumentError> {
        let mut poset = Poset::new();
        for &e in &self.events {
            poset.add_event(e)?;
        }
        for &(a, b) in &self.covers {
            if a == b {
                return Err(OrderError::CycleViolation { a, b }.into());
            }
            poset.add_influence(a, b)?;
        }
        let chains = self
            .chains
            .iter()
            .map(|r| Chain::new(&poset, r.id.clone(), r.events.clone(), r.valuations.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((poset.freeze(), chains))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DocumentError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DocumentError> {
        let mut s = self.to_json();
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }

    /// Hasse diagram in Graphviz syntax, cover edges only.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for e in &self.events {
            let _ = writeln!(out, "  {};", e.0);
        }
        for (a, b) in &self.covers {
            let _ = writeln!(out, "  {} -> {};", a.0, b.0);
        }
        out.push_str("}\n");
        out
    }
}
