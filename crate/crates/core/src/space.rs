//! Finite measurable spaces.
//!
//! A σ-algebra on a finite set is generated by a partition, so a space is
//! just its ordered list of atoms and the measurable sets are all subsets of
//! that list. Sets are bitmasks over atom indices; the canonical text key of
//! a set is its sorted index list joined by commas (`""` for ∅).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of atoms: set functions store `2^k` values.
pub const MAX_ATOMS: usize = 16;

/// Upper bound on `(m+1)^k` for exhaustive enumeration of disjoint m-tuples.
pub const ENUMERATION_LIMIT: u128 = 100_000_000;

/// Largest supported tuple arity for disjoint-tuple enumeration.
pub const MAX_ARITY: usize = 16;

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    atoms: Vec<String>,
}

/// A finite measurable space, identified with its atom partition.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct FiniteSpace {
    atoms: Arc<[String]>,
}

impl TryFrom<SpaceRepr> for FiniteSpace {
    type Error = Error;

    fn try_from(repr: SpaceRepr) -> Result<Self> {
        FiniteSpace::new(repr.atoms)
    }
}

impl From<FiniteSpace> for SpaceRepr {
    fn from(space: FiniteSpace) -> Self {
        SpaceRepr {
            atoms: space.atoms.to_vec(),
        }
    }
}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.atoms.iter()).finish()
    }
}

impl FiniteSpace {
    pub fn new<S: Into<String>>(atoms: impl IntoIterator<Item = S>) -> Result<Self> {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one atom".into()));
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::InvalidSpace(format!(
                "{} atoms exceeds the cap of {MAX_ATOMS}",
                atoms.len()
            )));
        }
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(Error::InvalidSpace(format!("duplicate atom label {a:?}")));
            }
        }
        Ok(FiniteSpace {
            atoms: atoms.into(),
        })
    }

    /// A space with atoms labelled `a`, `b`, `c`, ...
    pub fn lettered(k: usize) -> Result<Self> {
        if k > MAX_ATOMS {
            return Err(Error::InvalidSpace(format!(
                "{k} atoms exceeds the cap of {MAX_ATOMS}"
            )));
        }
        FiniteSpace::new((0..k).map(|i| ((b'a' + i as u8) as char).to_string()))
    }

    /// A space with atoms labelled `0`, `1`, ..., `n-1`.
    pub fn numbered(n: usize) -> Result<Self> {
        FiniteSpace::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn label(&self, index: usize) -> &str {
        &self.atoms[index]
    }

    /// Bitmask of the whole space.
    pub fn full_mask(&self) -> u32 {
        (1u32 << self.len()) - 1
    }

    /// Number of measurable sets, `2^k`.
    pub fn set_count(&self) -> usize {
        1usize << self.len()
    }

    pub fn empty_set(&self) -> MSet {
        MSet {
            space: self.clone(),
            bits: 0,
        }
    }

    pub fn full_set(&self) -> MSet {
        MSet {
            space: self.clone(),
            bits: self.full_mask(),
        }
    }

    pub fn set(&self, indices: &[usize]) -> Result<MSet> {
        MSet::new(self, indices)
    }

    pub fn set_from_mask(&self, mask: u32) -> Result<MSet> {
        MSet::from_mask(self, mask)
    }

    pub fn set_from_key(&self, key: &str) -> Result<MSet> {
        MSet::from_key(self, key)
    }

    /// All measurable sets in mask order.
    pub fn sets(&self) -> impl Iterator<Item = MSet> + '_ {
        (0..=self.full_mask()).map(move |bits| MSet {
            space: self.clone(),
            bits,
        })
    }

    /// The subspace on the atoms outside `removed`, keeping labels and order.
    pub fn complement_subspace(&self, removed: u32) -> Result<FiniteSpace> {
        let atoms: Vec<String> = (0..self.len())
            .filter(|i| removed & (1 << i) == 0)
            .map(|i| self.atoms[i].clone())
            .collect();
        FiniteSpace::new(atoms)
    }

    pub(crate) fn check_mask(&self, mask: u32) -> Result<()> {
        if mask & !self.full_mask() != 0 {
            return Err(Error::InvalidSet(format!(
                "mask {mask:#b} has atoms outside a {}-atom space",
                self.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn same_as(&self, other: &FiniteSpace) -> bool {
        Arc::ptr_eq(&self.atoms, &other.atoms) || self.atoms == other.atoms
    }
}

/// A measurable set: a subset of a space's atoms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MSet {
    space: FiniteSpace,
    bits: u32,
}

impl fmt::Debug for MSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.members().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.space.label(i))?;
        }
        write!(f, "}}")
    }
}

impl MSet {
    pub fn new(space: &FiniteSpace, indices: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &i in indices {
            if i >= space.len() {
                return Err(Error::InvalidSet(format!(
                    "atom index {i} out of range for a {}-atom space",
                    space.len()
                )));
            }
            bits |= 1 << i;
        }
        Ok(MSet {
            space: space.clone(),
            bits,
        })
    }

    pub fn from_mask(space: &FiniteSpace, mask: u32) -> Result<Self> {
        space.check_mask(mask)?;
        Ok(MSet {
            space: space.clone(),
            bits: mask,
        })
    }

    /// Parses a canonical key such as `"0,2"`; `""` is the empty set.
    /// Indices must be strictly increasing.
    pub fn from_key(space: &FiniteSpace, key: &str) -> Result<Self> {
        let key = key.trim();
        if key.is_empty() {
            return Ok(space.empty_set());
        }
        let mut indices = Vec::new();
        for part in key.split(',') {
            let i: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSet(format!("bad set key {key:?}")))?;
            if indices.last().is_some_and(|&last| last >= i) {
                return Err(Error::InvalidSet(format!(
                    "set key {key:?} is not strictly increasing"
                )));
            }
            indices.push(i);
        }
        MSet::new(space, &indices)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn mask(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, atom: usize) -> bool {
        atom < 32 && self.bits & (1 << atom) != 0
    }

    /// Member atom indices in increasing order.
    pub fn members(&self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    /// Canonical key, e.g. `"0,2"`.
    pub fn key(&self) -> String {
        mask_key(self.bits)
    }

    fn check_same(&self, other: &MSet) -> Result<()> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    fn with_bits(&self, bits: u32) -> MSet {
        MSet {
            space: self.space.clone(),
            bits,
        }
    }

    pub fn union(&self, other: &MSet) -> Result<MSet> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits | other.bits))
    }

    pub fn intersection(&self, other: &MSet) -> Result<MSet> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits & other.bits))
    }

    pub fn difference(&self, other: &MSet) -> Result<MSet> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits & !other.bits))
    }

    pub fn complement(&self) -> MSet {
        self.with_bits(!self.bits & self.space.full_mask())
    }

    pub fn is_disjoint(&self, other: &MSet) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.bits & other.bits == 0)
    }

    pub fn is_subset(&self, other: &MSet) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.bits & !other.bits == 0)
    }
}

/// Canonical key of a bitmask.
pub fn mask_key(mask: u32) -> String {
    let mut out = String::new();
    for i in 0..32 {
        if mask & (1 << i) != 0 {
            if !out.is_empty() {
                out.push(',');
            }
            out.push_str(&i.to_string());
        }
    }
    out
}

/// Checks that every set belongs to `space` and returns their masks.
pub(crate) fn masks_in(space: &FiniteSpace, sets: &[MSet]) -> Result<Vec<u32>> {
    sets.iter()
        .map(|s| {
            if s.space.same_as(space) {
                Ok(s.bits)
            } else {
                Err(Error::SpaceMismatch)
            }
        })
        .collect()
}

pub(crate) fn pairwise_disjoint(masks: &[u32]) -> bool {
    let mut seen = 0u32;
    for &m in masks {
        if seen & m != 0 {
            return false;
        }
        seen |= m;
    }
    true
}

/// `(m+1)^k`, the number of pairwise-disjoint m-tuples on k atoms.
pub fn disjoint_tuple_count(k: usize, m: usize) -> u128 {
    (m as u128 + 1).saturating_pow(k as u32)
}

pub(crate) fn check_enumeration(k: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Arity {
            expected: 1,
            got: 0,
        });
    }
    let count = disjoint_tuple_count(k, m);
    if m > MAX_ARITY || count > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Pairwise-disjoint m-tuples of masks in lexicographic order.
///
/// Component `p` ranges over subsets of the atoms not used by components
/// `0..p`, in increasing mask order; components after the last incremented
/// one restart at ∅. Every assignment of atoms to one of the m components or
/// to none appears exactly once, so the stream has `(m+1)^k` items. The
/// iterator can be pinned to a fixed first component, which is how
/// exhaustive checks split work across threads.
#[derive(Clone, Debug)]
pub struct DisjointMasks {
    full: u32,
    current: Vec<u32>,
    first_fixed: bool,
    done: bool,
}

impl DisjointMasks {
    pub fn new(full: u32, m: usize) -> Self {
        assert!(m >= 1, "tuple arity must be positive");
        DisjointMasks {
            full,
            current: vec![0; m],
            first_fixed: false,
            done: false,
        }
    }

    /// Tuples whose first component is exactly `first`.
    pub fn with_first(full: u32, m: usize, first: u32) -> Self {
        let mut it = DisjointMasks::new(full, m);
        it.current[0] = first & full;
        it.first_fixed = true;
        it
    }

    fn advance(&mut self) -> bool {
        let lowest = usize::from(self.first_fixed);
        for p in (lowest..self.current.len()).rev() {
            let used = self.current[..p].iter().fold(0, |a, &b| a | b);
            let free = self.full & !used;
            let next = (self.current[p] | !free).wrapping_add(1) & free;
            if next != 0 {
                self.current[p] = next;
                self.current[p + 1..].iter_mut().for_each(|c| *c = 0);
                return true;
            }
        }
        false
    }
}

impl Iterator for DisjointMasks {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !self.advance();
        Some(out)
    }
}

/// Every m-tuple of pairwise-disjoint measurable sets, empty components
/// included, in lexicographic mask order.
pub fn enumerate_disjoint_tuples(
    space: &FiniteSpace,
    m: usize,
) -> Result<impl Iterator<Item = Vec<MSet>> + '_> {
    check_enumeration(space.len(), m)?;
    Ok(DisjointMasks::new(space.full_mask(), m).map(move |masks| {
        masks
            .into_iter()
            .map(|bits| MSet {
                space: space.clone(),
                bits,
            })
            .collect()
    }))
}
