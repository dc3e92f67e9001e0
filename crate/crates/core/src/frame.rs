//! Power-set frames of discernment and propositions as atom subsets.

use std::fmt;

use crate::error::{Error, Result};

/// Default upper bound on the number of atoms in a frame.
pub const DEFAULT_ATOM_CAP: usize = 16;

/// A subset of the atoms of a frame, stored as a bitmask.
///
/// Bit `i` is set when the `i`-th atom of the frame belongs to the set. The
/// empty set is the contradiction and the full set is the tautology.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Proposition(u32);

impl Proposition {
    pub const EMPTY: Proposition = Proposition(0);

    pub const fn from_bits(bits: u32) -> Self {
        Proposition(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn atom(index: usize) -> Self {
        Proposition(1 << index)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_atom(self) -> bool {
        self.0.count_ones() == 1
    }

    pub fn intersection(self, other: Self) -> Self {
        Proposition(self.0 & other.0)
    }

    pub fn union(self, other: Self) -> Self {
        Proposition(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn contains_atom(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    /// Indices of the atoms in this set, ascending.
    pub fn atoms(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Proposition> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Proposition(cur))
        })
    }
}

impl fmt::Debug for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.atoms().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// An ordered finite set of distinct atom labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    atoms: Vec<String>,
}

impl Frame {
    pub fn new<S: Into<String>>(atoms: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::with_cap(atoms, DEFAULT_ATOM_CAP)
    }

    pub fn with_cap<S: Into<String>>(atoms: impl IntoIterator<Item = S>, cap: usize) -> Result<Self> {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::InvalidFrame("a frame needs at least one atom".into()));
        }
        let cap = cap.min(31);
        if atoms.len() > cap {
            return Err(Error::CapExceeded(format!(
                "frame has {} atoms, cap is {cap}",
                atoms.len()
            )));
        }
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(Error::InvalidFrame(format!("duplicate atom label {a:?}")));
            }
        }
        Ok(Frame { atoms })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The tautology: every atom.
    pub fn full(&self) -> Proposition {
        Proposition((1u32 << self.atoms.len()) - 1)
    }

    pub fn contains(&self, p: Proposition) -> bool {
        p.is_subset_of(self.full())
    }

    pub fn check(&self, p: Proposition) -> Result<Proposition> {
        if self.contains(p) {
            Ok(p)
        } else {
            Err(Error::FrameMismatch(format!(
                "proposition {p:?} uses atoms outside a frame of {} atoms",
                self.len()
            )))
        }
    }

    pub fn atom_index(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == label)
    }

    /// Builds a proposition from atom labels.
    pub fn prop<S: AsRef<str>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Proposition> {
        let mut bits = 0u32;
        for l in labels {
            let l = l.as_ref();
            let i = self
                .atom_index(l)
                .ok_or_else(|| Error::FrameMismatch(format!("unknown atom {l:?}")))?;
            bits |= 1 << i;
        }
        Ok(Proposition(bits))
    }

    /// Atom labels of a proposition, in frame order.
    pub fn labels(&self, p: Proposition) -> Vec<String> {
        p.atoms().map(|i| self.atoms[i].clone()).collect()
    }

    /// Every subset of the frame, ordered by bitmask.
    pub fn power_set(&self) -> impl Iterator<Item = Proposition> {
        (0..=self.full().0).map(Proposition)
    }

    pub fn and(&self, a: Proposition, b: Proposition) -> Result<Proposition> {
        Ok(self.check(a)?.intersection(self.check(b)?))
    }

    pub fn or(&self, a: Proposition, b: Proposition) -> Result<Proposition> {
        Ok(self.check(a)?.union(self.check(b)?))
    }

    pub fn not(&self, a: Proposition) -> Result<Proposition> {
        Ok(Proposition(self.full().0 & !self.check(a)?.0))
    }

    pub fn subset(&self, a: Proposition, b: Proposition) -> Result<bool> {
        Ok(self.check(a)?.is_subset_of(self.check(b)?))
    }

    pub fn display(&self, p: Proposition) -> String {
        if p.is_empty() {
            return "∅".into();
        }
        if p == self.full() {
            return "Ω".into();
        }
        let labels = self.labels(p);
        if labels.len() == 1 {
            labels[0].clone()
        } else {
            format!("{{{}}}", labels.join(","))
        }
    }
}
