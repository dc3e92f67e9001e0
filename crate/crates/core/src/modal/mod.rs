//! A finite model of the multimodal logic behind the entropy maximizing rule.
//!
//! A point of the model is a pair `(x₀, E₁…Eₙ)`: `x₀` is the true atom and
//! `Eᵢ` is what source `i` knows, as a set of atoms. Every formula of the
//! simple fragment denotes a set of points.

mod axioms;
mod bridge;
mod formula;
mod semantics;

pub use axioms::{t_counterexample, verify_axioms, verify_properties, AxiomCheck, AxiomReport};
pub use bridge::logic_bridge_fuse;
pub use formula::{parse, Formula};
pub use semantics::{bla_model, box_model, classical_model, logical_combine, logical_combine_many, model_of};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};

pub const DEFAULT_MAX_ATOMS: usize = 4;
pub const DEFAULT_MAX_SOURCES: usize = 3;
/// Hard ceiling on the size of the point universe.
const MAX_UNIVERSE_BITS: usize = 24;

/// Whether the model satisfies axiom T (`[J]X → X`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TMode {
    WithT,
    WithoutT,
}

/// Atoms `P` and the number `n` of sources, numbered `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicSignature {
    frame: Frame,
    sources: usize,
}

impl LogicSignature {
    pub fn new(frame: Frame, sources: usize) -> Result<Self> {
        Self::with_caps(frame, sources, DEFAULT_MAX_ATOMS, DEFAULT_MAX_SOURCES)
    }

    pub fn with_caps(frame: Frame, sources: usize, max_atoms: usize, max_sources: usize) -> Result<Self> {
        if sources == 0 {
            return Err(Error::InvalidSources("at least one source is required".into()));
        }
        if frame.len() > max_atoms || sources > max_sources {
            return Err(Error::CapExceeded(format!(
                "{} atoms and {} sources exceed the caps ({max_atoms}, {max_sources})",
                frame.len(),
                sources
            )));
        }
        if frame.len() * sources + bits_for(frame.len()) > MAX_UNIVERSE_BITS {
            return Err(Error::CapExceeded("model universe too large to enumerate".into()));
        }
        Ok(LogicSignature { frame, sources })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn atoms(&self) -> usize {
        self.frame.len()
    }

    pub fn sources(&self) -> usize {
        self.sources
    }

    /// Size of the index space: `|P|·2^{n|P|}`.
    pub fn index_len(&self) -> usize {
        self.atoms() << (self.atoms() * self.sources)
    }

    pub fn index(&self, point: &ModelPoint) -> usize {
        let p = self.atoms();
        let mut code = 0usize;
        for (i, e) in point.knowledge.iter().enumerate() {
            code |= (e.bits() as usize) << (i * p);
        }
        point.truth + p * code
    }

    pub fn point(&self, index: usize) -> ModelPoint {
        let p = self.atoms();
        let mask = (1usize << p) - 1;
        let code = index / p;
        ModelPoint {
            truth: index % p,
            knowledge: (0..self.sources)
                .map(|i| Proposition::from_bits(((code >> (i * p)) & mask) as u32))
                .collect(),
        }
    }

    /// Nonempty source groups, as sorted index lists.
    pub fn source_groups(&self) -> Vec<Vec<usize>> {
        (1u32..1 << self.sources)
            .map(|mask| (0..self.sources).filter(|i| mask & (1 << i) != 0).collect())
            .collect()
    }

    pub(crate) fn check_group(&self, group: &[usize]) -> Result<()> {
        if group.is_empty() {
            return Err(Error::InvalidSources("source group must be nonempty".into()));
        }
        if let Some(s) = group.iter().find(|s| **s >= self.sources) {
            return Err(Error::InvalidSources(format!(
                "source {} out of range 1..={}",
                s + 1,
                self.sources
            )));
        }
        Ok(())
    }
}

fn bits_for(n: usize) -> usize {
    usize::BITS as usize - n.leading_zeros() as usize
}

/// `(x₀, E₁…Eₙ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelPoint {
    pub truth: usize,
    pub knowledge: Vec<Proposition>,
}

impl ModelPoint {
    /// `∩_{j∈J} E_j`.
    pub fn joint_knowledge(&self, group: &[usize]) -> Proposition {
        group.iter().fold(Proposition::from_bits(u32::MAX), |acc, j| {
            acc.intersection(self.knowledge[*j])
        })
    }

    pub fn is_admissible(&self, mode: TMode) -> bool {
        match mode {
            TMode::WithoutT => true,
            TMode::WithT => self.knowledge.iter().all(|e| e.contains_atom(self.truth)),
        }
    }
}

/// A set of model points in one universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSet {
    signature: LogicSignature,
    mode: TMode,
    bits: FixedBitSet,
}

impl ModelSet {
    pub fn empty(signature: &LogicSignature, mode: TMode) -> Self {
        ModelSet {
            signature: signature.clone(),
            mode,
            bits: FixedBitSet::with_capacity(signature.index_len()),
        }
    }

    /// Every admissible point: `⟦⊤⟧`.
    pub fn universe(signature: &LogicSignature, mode: TMode) -> Self {
        Self::filter(signature, mode, |_| true)
    }

    /// Admissible points satisfying a predicate.
    pub fn filter(signature: &LogicSignature, mode: TMode, keep: impl Fn(&ModelPoint) -> bool) -> Self {
        let mut set = Self::empty(signature, mode);
        for i in 0..signature.index_len() {
            let point = signature.point(i);
            if point.is_admissible(mode) && keep(&point) {
                set.bits.insert(i);
            }
        }
        set
    }

    pub fn signature(&self) -> &LogicSignature {
        &self.signature
    }

    pub fn mode(&self) -> TMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, point: &ModelPoint) -> bool {
        self.bits.contains(self.signature.index(point))
    }

    pub fn points(&self) -> impl Iterator<Item = ModelPoint> + '_ {
        self.bits.ones().map(|i| self.signature.point(i))
    }

    pub fn union(&self, other: &ModelSet) -> ModelSet {
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn intersection(&self, other: &ModelSet) -> ModelSet {
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn difference(&self, other: &ModelSet) -> ModelSet {
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    /// Complement within the universe of the set's mode.
    pub fn complement(&self) -> ModelSet {
        ModelSet::universe(&self.signature, self.mode).difference(self)
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &ModelSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }
}
