//! JSON documents for mass functions, fusion outcomes and sharpenings.
//!
//! ```json
//! { "atoms": ["a","b","c"], "world": "closed",
//!   "masses": [ {"set": ["a"], "mass": 0.3}, {"set": ["a","b","c"], "mass": 0.7} ] }
//! ```
//!
//! Sets are sorted arrays of atom labels, `[]` is the contradiction and any
//! omitted set has mass zero.

use serde::{Deserialize, Serialize};

use crate::emr::{FusionOutcome, FusionStatus};
use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};
use crate::mass::{MassFunction, World};
use crate::sharpening::Sharpening;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorldTag {
    Open,
    Closed,
}

impl From<World> for WorldTag {
    fn from(w: World) -> Self {
        match w {
            World::Open => WorldTag::Open,
            World::Closed => WorldTag::Closed,
        }
    }
}

impl From<WorldTag> for World {
    fn from(w: WorldTag) -> Self {
        match w {
            WorldTag::Open => World::Open,
            WorldTag::Closed => World::Closed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassEntry {
    pub set: Vec<String>,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassDocument {
    pub atoms: Vec<String>,
    pub world: WorldTag,
    pub masses: Vec<MassEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatusTag {
    Fused,
    Rejected,
}

/// A mass document with the solver's report. A rejected fusion carries no
/// masses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionDocument {
    #[serde(flatten)]
    pub mass: MassDocument,
    pub status: StatusTag,
    pub iterations: usize,
    pub entropy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferEntry {
    pub from: Vec<String>,
    pub to: Vec<String>,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpeningDocument {
    pub atoms: Vec<String>,
    pub entries: Vec<TransferEntry>,
}

fn set_of(frame: &Frame, labels: &[String], field: &str) -> Result<Proposition> {
    let mut p = Proposition::EMPTY;
    for l in labels {
        let i = frame
            .atom_index(l)
            .ok_or_else(|| Error::Document(format!("{field}: unknown atom {l:?}")))?;
        if p.contains_atom(i) {
            return Err(Error::Document(format!("{field}: atom {l:?} listed twice")));
        }
        p = p.union(Proposition::atom(i));
    }
    Ok(p)
}

impl MassDocument {
    pub fn from_mass(m: &MassFunction) -> Self {
        let frame = m.frame();
        MassDocument {
            atoms: frame.atoms().to_vec(),
            world: m.world().into(),
            masses: m
                .entries()
                .map(|(p, v)| MassEntry {
                    set: frame.labels(p),
                    mass: v,
                })
                .collect(),
        }
    }

    /// Builds and validates the mass function.
    pub fn to_mass(&self) -> Result<MassFunction> {
        let frame = Frame::new(self.atoms.iter().cloned()).map_err(|e| Error::Document(format!("atoms: {e}")))?;
        let mut entries = Vec::with_capacity(self.masses.len());
        for (k, e) in self.masses.iter().enumerate() {
            let p = set_of(&frame, &e.set, &format!("masses[{k}].set"))?;
            if entries.iter().any(|(q, _)| *q == p) {
                return Err(Error::Document(format!("masses[{k}].set: set listed twice")));
            }
            if !e.mass.is_finite() || e.mass < 0.0 {
                return Err(Error::Document(format!(
                    "masses[{k}].mass: {} is not a nonnegative number",
                    e.mass
                )));
            }
            entries.push((p, e.mass));
        }
        MassFunction::new(frame, self.world.into(), entries)
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mass documents serialize")
    }
}

impl FusionDocument {
    /// `frame` and `world` label a rejection, which has no fused mass.
    pub fn from_outcome(outcome: &FusionOutcome, frame: &Frame, world: World) -> Self {
        let mass = match &outcome.fused {
            Some(m) => MassDocument::from_mass(m),
            None => MassDocument {
                atoms: frame.atoms().to_vec(),
                world: world.into(),
                masses: Vec::new(),
            },
        };
        FusionDocument {
            mass,
            status: match outcome.status {
                FusionStatus::Fused => StatusTag::Fused,
                FusionStatus::Rejected => StatusTag::Rejected,
            },
            iterations: outcome.iterations,
            entropy: outcome.entropy,
        }
    }

    /// A classical rule's output: fused, no iterations.
    pub fn from_mass(m: &MassFunction) -> Self {
        FusionDocument {
            mass: MassDocument::from_mass(m),
            status: StatusTag::Fused,
            iterations: 0,
            entropy: 0.0,
        }
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fusion documents serialize")
    }
}

impl SharpeningDocument {
    pub fn from_sharpening(r: &Sharpening) -> Self {
        let frame = r.from_mass().frame();
        SharpeningDocument {
            atoms: frame.atoms().to_vec(),
            entries: r
                .entries()
                .map(|(x, y, v)| TransferEntry {
                    from: frame.labels(x),
                    to: frame.labels(y),
                    mass: v,
                })
                .collect(),
        }
    }

    /// Rebuilds the sharpening between two given bbas; the caller verifies it.
    pub fn to_sharpening(&self, from: &MassFunction, to: &MassFunction) -> Result<Sharpening> {
        let frame = from.frame();
        if self.atoms != frame.atoms() {
            return Err(Error::Document("atoms: differ from the mass functions' frame".into()));
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for (k, e) in self.entries.iter().enumerate() {
            let x = set_of(frame, &e.from, &format!("entries[{k}].from"))?;
            let y = set_of(frame, &e.to, &format!("entries[{k}].to"))?;
            entries.push(((x, y), e.mass));
        }
        Ok(Sharpening::new(from.clone(), to.clone(), entries))
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sharpening documents serialize")
    }
}
