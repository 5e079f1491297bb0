//! Finite polymeasures on products of finite spaces.
//!
//! A polymeasure is stored at atom level as a dense rank-d tensor; its value
//! on a cylinder `A_1 × ... × A_d` is the sum of the entries over the atom
//! tuples inside the cylinder. That makes every [`PolyMeasure`] separately
//! additive in each slot by construction. Externally supplied cylinder
//! tables go through [`RawCylinderTable`], which validates slot-wise
//! additivity before compressing to a tensor.

use std::collections::HashMap;
use std::fmt;
use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{Nums, Scalar, Scaled};
use crate::setfn::SetFunction;
use crate::space::{mask_key, masks_in, pairwise_disjoint, DisjointMasks, FiniteSpace, MSet, ENUMERATION_LIMIT};

/// Exact semivariation enumerates at most this many sign patterns.
pub const SIGN_PATTERN_LIMIT: u128 = 1 << 24;

/// Largest cylinder table materialized from a tensor.
pub const CYLINDER_TABLE_LIMIT: u128 = 1 << 20;

/// A signed polymeasure with atom-level tensor representation.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMeasure {
    factors: Vec<FiniteSpace>,
    tensor: Vec<Scalar>,
}

impl fmt::Debug for PolyMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolyMeasure")
            .field("factors", &self.factors)
            .field("tensor", &self.tensor.iter().map(|s| s.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

fn shape_of(factors: &[FiniteSpace]) -> Vec<usize> {
    factors.iter().map(FiniteSpace::len).collect()
}

/// Row-major odometer over a shape, slot 0 outermost.
fn next_index(index: &mut [usize], shape: &[usize]) -> bool {
    for j in (0..shape.len()).rev() {
        index[j] += 1;
        if index[j] < shape[j] {
            return true;
        }
        index[j] = 0;
    }
    false
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(d), &mut vec![false; d], &mut out);
    out
}

fn factorial(d: usize) -> i64 {
    (1..=d as i64).product()
}

impl PolyMeasure {
    /// `tensor` is row-major with slot 0 outermost.
    pub fn new(factors: Vec<FiniteSpace>, tensor: Vec<Scalar>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Shape("a polymeasure needs at least one factor".into()));
        }
        let size: usize = factors.iter().map(FiniteSpace::len).product();
        if tensor.len() != size {
            return Err(Error::Shape(format!(
                "tensor has {} entries, shape {:?} needs {size}",
                tensor.len(),
                shape_of(&factors)
            )));
        }
        Ok(PolyMeasure { factors, tensor })
    }

    pub fn from_fn(factors: Vec<FiniteSpace>, mut f: impl FnMut(&[usize]) -> Scalar) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Shape("a polymeasure needs at least one factor".into()));
        }
        let shape = shape_of(&factors);
        let mut index = vec![0; shape.len()];
        let mut tensor = Vec::with_capacity(shape.iter().product());
        loop {
            tensor.push(f(&index));
            if !next_index(&mut index, &shape) {
                break;
            }
        }
        PolyMeasure::new(factors, tensor)
    }

    pub fn zeros(factors: Vec<FiniteSpace>) -> Result<Self> {
        PolyMeasure::from_fn(factors, |_| Scalar::zero())
    }

    /// Rank-d polymeasure with every factor equal to `space`.
    pub fn on_power(space: &FiniteSpace, d: usize, f: impl FnMut(&[usize]) -> Scalar) -> Result<Self> {
        PolyMeasure::from_fn(vec![space.clone(); d], f)
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[FiniteSpace] {
        &self.factors
    }

    pub fn shape(&self) -> Vec<usize> {
        shape_of(&self.factors)
    }

    pub fn tensor(&self) -> &[Scalar] {
        &self.tensor
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, f)| acc * f.len() + i)
    }

    pub fn entry(&self, index: &[usize]) -> &Scalar {
        &self.tensor[self.offset(index)]
    }

    fn has_equal_factors(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].same_as(&w[1]))
    }

    fn require_equal_factors(&self) -> Result<&FiniteSpace> {
        if self.has_equal_factors() {
            Ok(&self.factors[0])
        } else {
            Err(Error::UnequalFactors)
        }
    }

    fn cylinder_masks(&self, sets: &[MSet]) -> Result<Vec<u32>> {
        if sets.len() != self.rank() {
            return Err(Error::Arity {
                expected: self.rank(),
                got: sets.len(),
            });
        }
        sets.iter()
            .zip(&self.factors)
            .map(|(s, f)| {
                if s.space().same_as(f) {
                    Ok(s.mask())
                } else {
                    Err(Error::SpaceMismatch)
                }
            })
            .collect()
    }

    /// Offsets of the atom tuples inside a cylinder.
    fn cylinder_offsets(&self, masks: &[u32]) -> Vec<usize> {
        let mut offsets = vec![0usize];
        for (f, &m) in self.factors.iter().zip(masks) {
            let members: Vec<usize> = (0..f.len()).filter(|i| m & (1 << i) != 0).collect();
            offsets = offsets
                .iter()
                .flat_map(|&o| members.iter().map(move |&i| o * f.len() + i))
                .collect();
        }
        offsets
    }

    fn evaluate_masks(&self, masks: &[u32]) -> Scalar {
        self.cylinder_offsets(masks)
            .into_iter()
            .map(|o| &self.tensor[o])
            .sum()
    }

    /// Value on the cylinder `sets[0] × ... × sets[d-1]`.
    pub fn evaluate(&self, sets: &[MSet]) -> Result<Scalar> {
        let masks = self.cylinder_masks(sets)?;
        Ok(self.evaluate_masks(&masks))
    }

    /// `A ↦ λ(A, ..., A)`.
    pub fn diagonal(&self) -> Result<SetFunction> {
        let space = self.require_equal_factors()?.clone();
        let scaled = Scaled::from_scalars(&self.tensor);
        let nums: Vec<BigInt> = (0..=space.full_mask())
            .into_par_iter()
            .map(|a| {
                let masks = vec![a; self.rank()];
                let mut acc = scaled.acc_zero();
                for o in self.cylinder_offsets(&masks) {
                    scaled.accumulate(&mut acc, o, true);
                }
                match acc {
                    crate::scalar::Acc::Small(v) => BigInt::from(v),
                    crate::scalar::Acc::Big(v) => v,
                }
            })
            .collect();
        Ok(SetFunction::from_scaled(
            space,
            Scaled::from_numerators(scaled.den().clone(), nums),
        ))
    }

    /// The measure `B ↦ λ(X, ..., B, ..., X)` with `B` in `slot`.
    pub fn marginal(&self, slot: usize) -> Result<SetFunction> {
        if slot >= self.rank() {
            return Err(Error::InvalidSlot {
                slot,
                rank: self.rank(),
            });
        }
        let space = &self.factors[slot];
        let mut weights = vec![Scalar::zero(); space.len()];
        let shape = self.shape();
        let mut index = vec![0; shape.len()];
        for v in &self.tensor {
            weights[index[slot]] += v;
            next_index(&mut index, &shape);
        }
        SetFunction::measure(space, &weights)
    }

    /// Fixes the assigned slots to the given sets, leaving a polymeasure on
    /// the remaining slots (in their original order).
    pub fn fix_arguments(&self, assignment: &[Option<MSet>]) -> Result<PolyMeasure> {
        if assignment.len() != self.rank() {
            return Err(Error::Arity {
                expected: self.rank(),
                got: assignment.len(),
            });
        }
        let fixed = assignment.iter().filter(|a| a.is_some()).count();
        if fixed == 0 || fixed == self.rank() {
            return Err(Error::InvalidFixing(format!(
                "must fix between 1 and {} of {} slots, got {fixed}",
                self.rank().saturating_sub(1),
                self.rank()
            )));
        }
        for (a, f) in assignment.iter().zip(&self.factors) {
            if let Some(s) = a {
                if !s.space().same_as(f) {
                    return Err(Error::SpaceMismatch);
                }
            }
        }
        let free: Vec<usize> = (0..self.rank()).filter(|&j| assignment[j].is_none()).collect();
        let factors: Vec<FiniteSpace> = free.iter().map(|&j| self.factors[j].clone()).collect();
        let mut out = PolyMeasure::zeros(factors)?;
        let shape = self.shape();
        let mut index = vec![0; shape.len()];
        for v in &self.tensor {
            let inside = assignment
                .iter()
                .zip(&index)
                .all(|(a, &i)| a.as_ref().map_or(true, |s| s.contains(i)));
            if inside {
                let sub: Vec<usize> = free.iter().map(|&j| index[j]).collect();
                let o = out.offset(&sub);
                out.tensor[o] += v;
            }
            next_index(&mut index, &shape);
        }
        Ok(out)
    }

    /// Average over all permutations of the slots.
    pub fn symmetrize(&self) -> Result<PolyMeasure> {
        self.require_equal_factors()?;
        let d = self.rank();
        let perms = permutations(d);
        let scale = Scalar::new(1, factorial(d));
        let shape = self.shape();
        let mut permuted = vec![0; d];
        PolyMeasure::from_fn(self.factors.clone(), |index| {
            let mut sum = Scalar::zero();
            for p in &perms {
                for (j, &pj) in p.iter().enumerate() {
                    permuted[j] = index[pj];
                }
                sum += &self.tensor[self.offset(&permuted)];
            }
            debug_assert_eq!(shape.len(), d);
            sum * &scale
        })
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.has_equal_factors() {
            return false;
        }
        let shape = self.shape();
        let mut index = vec![0; shape.len()];
        let mut swapped = vec![0; shape.len()];
        loop {
            let v = &self.tensor[self.offset(&index)];
            for j in 0..index.len().saturating_sub(1) {
                swapped.copy_from_slice(&index);
                swapped.swap(j, j + 1);
                if &self.tensor[self.offset(&swapped)] != v {
                    return false;
                }
            }
            if !next_index(&mut index, &shape) {
                return true;
            }
        }
    }

    /// Whether the diagonal is non-negative everywhere; the witness is the
    /// first violating set in mask order.
    pub fn is_diagonally_positive(&self) -> Result<DiagonalPositivity> {
        let witness = self.diagonal()?.first_negative();
        Ok(DiagonalPositivity {
            positive: witness.is_none(),
            witness,
        })
    }

    /// Supremum of `Σ |λ(cylinder)|` over finite disjoint cylinder families.
    ///
    /// Splitting a cylinder never decreases the sum, so the atom-level
    /// partition attains the supremum: the result is `Σ |entry|`.
    pub fn variation(&self) -> Scalar {
        self.tensor.iter().map(Scalar::abs).sum()
    }

    /// Supremum over ±1 coefficients per slot of
    /// `|Σ ε¹_{i_1} ⋯ εᵈ_{i_d} λ(i_1, ..., i_d)|`.
    pub fn semivariation(&self, mode: SemivariationMode) -> Result<Semivariation> {
        let scaled = Scaled::from_scalars(&self.tensor);
        semivariation_of(&self.shape(), &scaled, mode)
    }
}

/// `Σ_{T ⊆ {1..d}} (-1)^{d-|T|} μ(⊔_{i∈T} A_i)` for pairwise-disjoint
/// `A_1, ..., A_d`.
///
/// When `μ` is the diagonal of a polymeasure `λ`, this equals the sum of `λ`
/// over all orderings of the arguments, i.e. `d!` times the symmetrized
/// cylinder value.
pub fn polarization_recover(mu: &SetFunction, sets: &[MSet]) -> Result<Scalar> {
    if sets.is_empty() {
        return Err(Error::Arity {
            expected: 1,
            got: 0,
        });
    }
    let masks = masks_in(mu.space(), sets)?;
    if !pairwise_disjoint(&masks) {
        return Err(Error::NotDisjoint);
    }
    let d = masks.len();
    let mut acc = mu.scaled().acc_zero();
    for t in 0usize..(1 << d) {
        let union = masks
            .iter()
            .enumerate()
            .filter(|(i, _)| t & (1 << i) != 0)
            .fold(0, |u, (_, &m)| u | m);
        let sign_positive = (d - t.count_ones() as usize) % 2 == 0;
        mu.accumulate(&mut acc, union, sign_positive);
    }
    Ok(mu.scaled().acc_to_scalar(acc))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalPositivity {
    pub positive: bool,
    pub witness: Option<MSet>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemivariationMode {
    /// Every sign pattern; exact.
    Exact,
    /// Best over `trials` seeded random patterns; a lower bound.
    Sampled { seed: u64, trials: u64 },
}

/// Result of a semivariation computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semivariation {
    pub value: Scalar,
    /// `true` for the exact supremum, `false` for a sampled lower bound.
    pub exact: bool,
    /// Maximizing ±1 coefficients, one vector per slot.
    pub signs: Vec<Vec<i8>>,
}

trait Num: Clone + Send + Sync + Ord + Zero + Signed + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}
impl Num for i128 {}
impl Num for BigInt {}

/// Given sign vectors for every slot but the last, returns the best
/// attainable `|Σ|` and the matching last-slot signs.
fn contract<T: Num>(nums: &[T], shape: &[usize], prefix_signs: &[Vec<bool>]) -> (T, Vec<i8>) {
    let last = *shape.last().expect("rank at least one");
    let mut flips = vec![false];
    for (j, signs) in prefix_signs.iter().enumerate() {
        debug_assert_eq!(signs.len(), shape[j]);
        flips = flips
            .iter()
            .flat_map(|&f| signs.iter().map(move |&s| f ^ s))
            .collect();
    }
    let mut row = vec![T::zero(); last];
    for (p, &neg) in flips.iter().enumerate() {
        let block = &nums[p * last..(p + 1) * last];
        for (r, v) in row.iter_mut().zip(block) {
            if neg {
                *r -= v
            } else {
                *r += v
            }
        }
    }
    let mut total = T::zero();
    let mut eta = Vec::with_capacity(last);
    for r in &row {
        total += &r.abs();
        eta.push(if r.is_negative() { -1 } else { 1 });
    }
    (total, eta)
}

fn to_i8(signs: &[bool]) -> Vec<i8> {
    signs.iter().map(|&neg| if neg { -1 } else { 1 }).collect()
}

fn split_code(code: u64, shape: &[usize]) -> Vec<Vec<bool>> {
    let mut bit = 0;
    shape[..shape.len() - 1]
        .iter()
        .map(|&k| {
            let v = (0..k).map(|i| code & (1 << (bit + i)) != 0).collect();
            bit += k;
            v
        })
        .collect()
}

fn best_of<T: Num>(
    nums: &[T],
    shape: &[usize],
    count: u64,
    pattern_at: &(dyn Fn(u64) -> Vec<Vec<bool>> + Sync),
) -> (T, Vec<Vec<i8>>) {
    let (value, _, signs) = (0..count)
        .into_par_iter()
        .map(|n| {
            let prefix = pattern_at(n);
            let (v, eta) = contract(nums, shape, &prefix);
            let mut signs: Vec<Vec<i8>> = prefix.iter().map(|s| to_i8(s)).collect();
            signs.push(eta);
            (v, n, signs)
        })
        .reduce_with(|a, b| {
            // larger value wins; ties go to the earlier pattern
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        })
        .expect("at least one sign pattern");
    (value, signs)
}

pub(crate) fn semivariation_of(shape: &[usize], scaled: &Scaled, mode: SemivariationMode) -> Result<Semivariation> {
    let prefix_shape = &shape[..shape.len() - 1];
    let prefix_bits: usize = prefix_shape.iter().sum();
    let (count, pattern_at): (u64, Box<dyn Fn(u64) -> Vec<Vec<bool>> + Sync>) = match mode {
        SemivariationMode::Exact => {
            let patterns = 1u128.checked_shl(prefix_bits as u32).unwrap_or(u128::MAX);
            if prefix_bits >= 64 || patterns > SIGN_PATTERN_LIMIT {
                return Err(Error::SemivariationGuard {
                    patterns,
                    limit: SIGN_PATTERN_LIMIT,
                });
            }
            // a global sign flip leaves |Σ| unchanged, so the first sign stays +1
            let count = if prefix_bits == 0 { 1 } else { 1u64 << (prefix_bits - 1) };
            (count, Box::new(move |c| split_code(c << 1, shape)))
        }
        SemivariationMode::Sampled { seed, trials } => {
            if trials == 0 {
                return Err(Error::ResourceGuard("sampled mode needs at least one trial".into()));
            }
            let f = move |t: u64| -> Vec<Vec<bool>> {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                prefix_shape
                    .iter()
                    .map(|&k| (0..k).map(|_| rng.random::<bool>()).collect())
                    .collect()
            };
            (trials, Box::new(f))
        }
    };
    let (value, signs) = match scaled.nums() {
        Nums::Small(nums) => {
            let (v, s) = best_of(nums, shape, count, &*pattern_at);
            (Scalar::new(v, scaled.den().clone()), s)
        }
        Nums::Big(nums) => {
            let (v, s) = best_of(nums, shape, count, &*pattern_at);
            (Scalar::new(v, scaled.den().clone()), s)
        }
    };
    Ok(Semivariation {
        value,
        exact: matches!(mode, SemivariationMode::Exact),
        signs,
    })
}

/// Cylinder values as supplied from outside, possibly partial or
/// non-additive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawCylinderTable {
    factors: Vec<FiniteSpace>,
    entries: HashMap<Vec<u32>, Scalar>,
}

/// First failure of slot-wise additivity found by
/// [`RawCylinderTable::check_separate_additivity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditivityViolation {
    pub slot: usize,
    /// The cylinder whose `slot` component is `left ⊔ right`.
    pub sets: Vec<MSet>,
    pub left: MSet,
    pub right: MSet,
    /// Value on the joint cylinder.
    pub joint: Scalar,
    /// Sum of the values on the two split cylinders.
    pub split_sum: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditivityReport {
    pub additive: bool,
    pub violation: Option<AdditivityViolation>,
}

fn cylinder_count(factors: &[FiniteSpace]) -> u128 {
    factors.iter().map(|f| 1u128 << f.len()).product()
}

/// Odometer over all mask tuples for the given factors.
fn next_masks(masks: &mut [u32], factors: &[FiniteSpace]) -> bool {
    for j in (0..masks.len()).rev() {
        if masks[j] < factors[j].full_mask() {
            masks[j] += 1;
            return true;
        }
        masks[j] = 0;
    }
    false
}

impl RawCylinderTable {
    pub fn new(factors: Vec<FiniteSpace>, entries: Vec<(Vec<MSet>, Scalar)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Shape("a cylinder table needs at least one factor".into()));
        }
        let mut map = HashMap::with_capacity(entries.len());
        for (sets, value) in entries {
            if sets.len() != factors.len() {
                return Err(Error::Arity {
                    expected: factors.len(),
                    got: sets.len(),
                });
            }
            let masks: Vec<u32> = sets
                .iter()
                .zip(&factors)
                .map(|(s, f)| if s.space().same_as(f) { Ok(s.mask()) } else { Err(Error::SpaceMismatch) })
                .collect::<Result<_>>()?;
            if map.insert(masks.clone(), value).is_some() {
                return Err(Error::DuplicateEntry(format!("cylinder ({})", keys_of(&masks))));
            }
        }
        Ok(RawCylinderTable { factors, entries: map })
    }

    /// The full table of cylinder values of a polymeasure.
    pub fn from_polymeasure(lambda: &PolyMeasure) -> Result<Self> {
        let count = cylinder_count(lambda.factors());
        if count > CYLINDER_TABLE_LIMIT {
            return Err(Error::ResourceGuard(format!(
                "{count} cylinders exceeds the table limit of {CYLINDER_TABLE_LIMIT}"
            )));
        }
        let mut entries = HashMap::with_capacity(count as usize);
        let mut masks = vec![0u32; lambda.rank()];
        loop {
            entries.insert(masks.clone(), lambda.evaluate_masks(&masks));
            if !next_masks(&mut masks, lambda.factors()) {
                break;
            }
        }
        Ok(RawCylinderTable {
            factors: lambda.factors().to_vec(),
            entries,
        })
    }

    pub fn factors(&self) -> &[FiniteSpace] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, sets: &[MSet]) -> Option<&Scalar> {
        let masks: Vec<u32> = sets.iter().map(MSet::mask).collect();
        self.entries.get(&masks)
    }

    /// Replaces (or inserts) the value of one cylinder.
    pub fn set(&mut self, sets: &[MSet], value: Scalar) -> Result<()> {
        if sets.len() != self.factors.len() {
            return Err(Error::Arity {
                expected: self.factors.len(),
                got: sets.len(),
            });
        }
        let mut masks = Vec::with_capacity(sets.len());
        for (s, f) in sets.iter().zip(&self.factors) {
            if !s.space().same_as(f) {
                return Err(Error::SpaceMismatch);
            }
            masks.push(s.mask());
        }
        self.entries.insert(masks, value);
        Ok(())
    }

    fn require_total(&self) -> Result<()> {
        let count = cylinder_count(&self.factors);
        if count > CYLINDER_TABLE_LIMIT {
            return Err(Error::ResourceGuard(format!(
                "{count} cylinders exceeds the table limit of {CYLINDER_TABLE_LIMIT}"
            )));
        }
        if self.entries.len() as u128 == count {
            return Ok(());
        }
        let mut masks = vec![0u32; self.factors.len()];
        loop {
            if !self.entries.contains_key(&masks) {
                return Err(Error::PartialTable(keys_of(&masks)));
            }
            if !next_masks(&mut masks, &self.factors) {
                unreachable!("entry count below cylinder count implies a gap");
            }
        }
    }

    fn sets_of(&self, masks: &[u32]) -> Vec<MSet> {
        masks
            .iter()
            .zip(&self.factors)
            .map(|(&m, f)| f.set_from_mask(m).expect("mask within factor"))
            .collect()
    }

    /// Checks `v(.., B ⊔ C, ..) = v(.., B, ..) + v(.., C, ..)` for every slot,
    /// every choice of the other slots and every disjoint pair `(B, C)`.
    pub fn check_separate_additivity(&self) -> Result<AdditivityReport> {
        self.require_total()?;
        let work: u128 = (0..self.factors.len())
            .map(|j| cylinder_count(&self.factors) / (1u128 << self.factors[j].len()) * 3u128.pow(self.factors[j].len() as u32))
            .sum();
        if work > ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge {
                count: work,
                limit: ENUMERATION_LIMIT,
            });
        }
        for slot in 0..self.factors.len() {
            let mut masks = vec![0u32; self.factors.len()];
            loop {
                if masks[slot] == 0 {
                    for pair in DisjointMasks::new(self.factors[slot].full_mask(), 2) {
                        let (b, c) = (pair[0], pair[1]);
                        let mut at = masks.clone();
                        at[slot] = b | c;
                        let joint = &self.entries[&at];
                        at[slot] = b;
                        let vb = &self.entries[&at];
                        at[slot] = c;
                        let vc = &self.entries[&at];
                        let split_sum = vb + vc;
                        if *joint != split_sum {
                            at[slot] = b | c;
                            let f = &self.factors[slot];
                            return Ok(AdditivityReport {
                                additive: false,
                                violation: Some(AdditivityViolation {
                                    slot,
                                    sets: self.sets_of(&at),
                                    left: f.set_from_mask(b)?,
                                    right: f.set_from_mask(c)?,
                                    joint: joint.clone(),
                                    split_sum,
                                }),
                            });
                        }
                    }
                }
                if !next_masks(&mut masks, &self.factors) {
                    break;
                }
            }
        }
        Ok(AdditivityReport {
            additive: true,
            violation: None,
        })
    }

    /// Validates separate additivity and compresses to atom level.
    pub fn to_polymeasure(&self) -> Result<PolyMeasure> {
        let report = self.check_separate_additivity()?;
        if let Some(v) = report.violation {
            return Err(Error::Shape(format!(
                "table is not separately additive in slot {} at ({})",
                v.slot,
                v.sets.iter().map(MSet::key).collect::<Vec<_>>().join(" | ")
            )));
        }
        PolyMeasure::from_fn(self.factors.clone(), |index| {
            let masks: Vec<u32> = index.iter().map(|&i| 1u32 << i).collect();
            self.entries[&masks].clone()
        })
    }
}

fn keys_of(masks: &[u32]) -> String {
    masks
        .iter()
        .map(|&m| format!("{:?}", mask_key(m)))
        .collect::<Vec<_>>()
        .join(", ")
}

// JSON forms

fn nest(tensor: &[Scalar], shape: &[usize]) -> Value {
    match shape {
        [] => Value::String(tensor[0].to_string()),
        [n] => Value::Array(tensor[..*n].iter().map(|v| Value::String(v.to_string())).collect()),
        [n, rest @ ..] => {
            let stride: usize = rest.iter().product();
            Value::Array((0..*n).map(|i| nest(&tensor[i * stride..], rest)).collect())
        }
    }
}

fn flatten(value: &Value, shape: &[usize], out: &mut Vec<Scalar>) -> Result<()> {
    match shape {
        [] => {
            let s = Scalar::deserialize(value).map_err(|e| Error::Shape(e.to_string()))?;
            out.push(s);
            Ok(())
        }
        [n, rest @ ..] => {
            let items = value
                .as_array()
                .ok_or_else(|| Error::Shape(format!("expected an array of length {n}")))?;
            if items.len() != *n {
                return Err(Error::Shape(format!(
                    "expected an array of length {n}, got {}",
                    items.len()
                )));
            }
            items.iter().try_for_each(|v| flatten(v, rest, out))
        }
    }
}

impl Serialize for PolyMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("factors", &self.factors)?;
        map.serialize_entry("tensor", &nest(&self.tensor, &self.shape()))?;
        map.end()
    }
}

#[derive(Deserialize)]
struct PolyMeasureRepr {
    factors: Vec<FiniteSpace>,
    tensor: Value,
}

impl<'de> Deserialize<'de> for PolyMeasure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let repr = PolyMeasureRepr::deserialize(deserializer)?;
        let shape = shape_of(&repr.factors);
        let mut tensor = Vec::new();
        flatten(&repr.tensor, &shape, &mut tensor).map_err(de::Error::custom)?;
        PolyMeasure::new(repr.factors, tensor).map_err(de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    sets: Vec<String>,
    value: Scalar,
}

#[derive(Serialize, Deserialize)]
struct RawTableRepr {
    factors: Vec<FiniteSpace>,
    entries: Vec<EntryRepr>,
}

impl Serialize for RawCylinderTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        let mut keys: Vec<&Vec<u32>> = self.entries.keys().collect();
        keys.sort();
        let entries = keys
            .into_iter()
            .map(|m| EntryRepr {
                sets: m.iter().map(|&x| mask_key(x)).collect(),
                value: self.entries[m].clone(),
            })
            .collect();
        RawTableRepr {
            factors: self.factors.clone(),
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RawCylinderTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let repr = RawTableRepr::deserialize(deserializer)?;
        let build = || -> Result<RawCylinderTable> {
            let entries = repr
                .entries
                .into_iter()
                .map(|e| {
                    if e.sets.len() != repr.factors.len() {
                        return Err(Error::Arity {
                            expected: repr.factors.len(),
                            got: e.sets.len(),
                        });
                    }
                    let sets = e
                        .sets
                        .iter()
                        .zip(&repr.factors)
                        .map(|(k, f)| f.set_from_key(k))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((sets, e.value))
                })
                .collect::<Result<Vec<_>>>()?;
            RawCylinderTable::new(repr.factors.clone(), entries)
        };
        build().map_err(de::Error::custom)
    }
}
