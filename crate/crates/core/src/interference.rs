//! Interference operators and grade-d additivity.
//!
//! For pairwise-disjoint `S_0, ..., S_d` the interference of a set function is
//! the alternating sum over nonempty index sets `J ⊆ {0..d}`:
//!
//! ```text
//! I_d μ(S_0, ..., S_d) = Σ_{∅≠J} (-1)^{|J|-1} μ(⊔_{j∈J} S_j)
//! ```
//!
//! so `I_1 μ(A, B) = μ(A) + μ(B) - μ(A ⊔ B)`. A set function is grade-d
//! additive when `I_d` vanishes on every disjoint (d+1)-tuple, empty
//! components included; the all-empty tuple gives `I_d μ = μ(∅)`, so every
//! grade-d additive function is grounded.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Acc, Scalar, Scaled};
use crate::setfn::SetFunction;
use crate::space::{check_enumeration, masks_in, pairwise_disjoint, DisjointMasks, FiniteSpace, MSet};

/// A disjoint tuple on which an interference operator does not vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub sets: Vec<MSet>,
    pub value: Scalar,
}

/// Outcome of an exhaustive grade-d additivity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradeReport {
    pub grade: usize,
    pub is_additive_at_grade: bool,
    /// Lexicographically first violating tuple; present iff not additive.
    pub witness: Option<Witness>,
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        let keys: Vec<String> = self.sets.iter().map(MSet::key).collect();
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("sets", &keys)?;
        map.serialize_entry("value", &self.value)?;
        map.end()
    }
}

impl Serialize for GradeReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("grade", &self.grade)?;
        map.serialize_entry("grade_additive", &self.is_additive_at_grade)?;
        map.serialize_entry("witness", &self.witness)?;
        map.end()
    }
}

/// Alternating union sum over the nonempty sub-tuples of `masks`.
/// `unions` is scratch space, resized as needed.
fn alternating_sum(mu: &SetFunction, masks: &[u32], unions: &mut Vec<u32>) -> Acc {
    let n = masks.len();
    unions.clear();
    unions.resize(1 << n, 0);
    let mut acc = mu.scaled().acc_zero();
    for j in 1usize..(1 << n) {
        let low = j.trailing_zeros() as usize;
        let u = unions[j & (j - 1)] | masks[low];
        unions[j] = u;
        mu.accumulate(&mut acc, u, j.count_ones() % 2 == 1);
    }
    acc
}

fn check_tuple(mu: &SetFunction, sets: &[MSet], min_len: usize) -> Result<Vec<u32>> {
    if sets.len() < min_len {
        return Err(Error::InvalidGrade(sets.len().saturating_sub(1), min_len - 1));
    }
    let masks = masks_in(mu.space(), sets)?;
    if !pairwise_disjoint(&masks) {
        return Err(Error::NotDisjoint);
    }
    Ok(masks)
}

/// `I_d μ(S_0, ..., S_d)` with `d = sets.len() - 1 ≥ 1`.
pub fn interference(mu: &SetFunction, sets: &[MSet]) -> Result<Scalar> {
    let masks = check_tuple(mu, sets, 2)?;
    let acc = alternating_sum(mu, &masks, &mut Vec::new());
    Ok(mu.scaled().acc_to_scalar(acc))
}

/// `Δ_S ν`: the set function `T ↦ ν(T) - ν(S ⊔ T)` on the subspace `X ∖ S`.
pub fn delta(nu: &SetFunction, s: &MSet) -> Result<SetFunction> {
    if !s.space().same_as(nu.space()) {
        return Err(Error::SpaceMismatch);
    }
    let sub = nu.space().complement_subspace(s.mask());
    let free = free_atoms(nu.space(), s.mask());
    let s0 = s.mask();
    match sub {
        Ok(sub) => {
            let nums: Vec<BigInt> = (0..sub.set_count() as u32)
                .map(|t| {
                    let t = expand(t, &free);
                    nu.numer_at(t) - nu.numer_at(t | s0)
                })
                .collect();
            let values = Scaled::from_numerators(nu.common_denominator().clone(), nums);
            Ok(SetFunction::from_scaled(sub, values))
        }
        Err(_) => Err(Error::InvalidSpace(
            "Δ_S with S the whole space leaves no atoms".into(),
        )),
    }
}

fn free_atoms(space: &FiniteSpace, removed: u32) -> Vec<usize> {
    (0..space.len()).filter(|i| removed & (1 << i) == 0).collect()
}

/// Subspace mask → ambient mask.
fn expand(sub_mask: u32, free: &[usize]) -> u32 {
    free.iter()
        .enumerate()
        .filter(|(j, _)| sub_mask & (1 << j) != 0)
        .fold(0, |m, (_, &i)| m | (1 << i))
}

/// Ambient mask (disjoint from the removed atoms) → subspace mask.
fn compress(mask: u32, free: &[usize]) -> u32 {
    free.iter()
        .enumerate()
        .filter(|(_, &i)| mask & (1 << i) != 0)
        .fold(0, |m, (j, _)| m | (1 << j))
}

/// `I_{d-1} Δ_{S_0} ν(S_1..S_d) - (I_d ν(S_0..S_d) - ν(S_0))`, which the
/// recursion identity for interference operators says is always zero.
pub fn recursion_residual(nu: &SetFunction, s0: &MSet, rest: &[MSet]) -> Result<Scalar> {
    if rest.len() < 2 {
        return Err(Error::InvalidGrade(rest.len(), 2));
    }
    let mut all = Vec::with_capacity(rest.len() + 1);
    all.push(s0.clone());
    all.extend_from_slice(rest);
    let masks = check_tuple(nu, &all, 3)?;
    let (lhs, rhs) = residual_sides(nu, &masks, None)?;
    Ok(lhs - rhs)
}

fn residual_sides(nu: &SetFunction, masks: &[u32], cached: Option<&SetFunction>) -> Result<(Scalar, Scalar)> {
    let s0 = masks[0];
    let free = free_atoms(nu.space(), s0);
    let owned;
    let d_nu = match cached {
        Some(d) => d,
        None => {
            owned = delta(nu, &nu.space().set_from_mask(s0)?)?;
            &owned
        }
    };
    let mut scratch = Vec::new();
    let sub_masks: Vec<u32> = masks[1..].iter().map(|&m| compress(m, &free)).collect();
    let lhs = d_nu.scaled().acc_to_scalar(alternating_sum(d_nu, &sub_masks, &mut scratch));
    let full = nu.scaled().acc_to_scalar(alternating_sum(nu, masks, &mut scratch));
    Ok((lhs, full - nu.value_at(s0)))
}

/// Exhaustively checks the recursion identity over every disjoint
/// `(S_0, S_1, ..., S_d)` with `S_0` a proper subset of the space. Returns
/// the first tuple with a nonzero residual, if any.
pub fn recursion_identity_counterexample(nu: &SetFunction, d: usize) -> Result<Option<Witness>> {
    if d < 2 {
        return Err(Error::InvalidGrade(d, 2));
    }
    let space = nu.space();
    check_enumeration(space.len(), d + 1)?;
    let full = space.full_mask();
    let found = (0..full)
        .into_par_iter()
        .map(|s0| -> Result<Option<Witness>> {
            let d_nu = delta(nu, &space.set_from_mask(s0)?)?;
            for rest in DisjointMasks::new(full & !s0, d) {
                let mut masks = Vec::with_capacity(d + 1);
                masks.push(s0);
                masks.extend_from_slice(&rest);
                let (lhs, rhs) = residual_sides(nu, &masks, Some(&d_nu))?;
                if lhs != rhs {
                    let sets = masks
                        .iter()
                        .map(|&m| space.set_from_mask(m))
                        .collect::<Result<_>>()?;
                    return Ok(Some(Witness {
                        sets,
                        value: lhs - rhs,
                    }));
                }
            }
            Ok(None)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    found.unwrap_or(Ok(None))
}

/// Exhaustive grade-d additivity check over all disjoint (d+1)-tuples.
pub fn is_grade_additive(mu: &SetFunction, d: usize) -> Result<GradeReport> {
    if d < 1 {
        return Err(Error::InvalidGrade(d, 1));
    }
    let space = mu.space();
    check_enumeration(space.len(), d + 1)?;
    let full = space.full_mask();
    let hit = (0..=full).into_par_iter().find_map_first(|first| {
        let mut scratch = Vec::new();
        DisjointMasks::with_first(full, d + 1, first).find_map(|t| {
            let acc = alternating_sum(mu, &t, &mut scratch);
            (!acc.is_zero()).then(|| (t, mu.scaled().acc_to_scalar(acc)))
        })
    });
    let witness = match hit {
        None => None,
        Some((masks, value)) => Some(Witness {
            sets: masks
                .iter()
                .map(|&m| space.set_from_mask(m))
                .collect::<Result<_>>()?,
            value,
        }),
    };
    Ok(GradeReport {
        grade: d,
        is_additive_at_grade: witness.is_none(),
        witness,
    })
}

/// Smallest `d ≤ d_max` at which `mu` is grade-d additive.
pub fn grade_of(mu: &SetFunction, d_max: usize) -> Result<Option<usize>> {
    if d_max < 1 {
        return Err(Error::InvalidGrade(d_max, 1));
    }
    for d in 1..=d_max {
        if is_grade_additive(mu, d)?.is_additive_at_grade {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> FiniteSpace {
        FiniteSpace::lettered(3).unwrap()
    }

    fn squares(space: &FiniteSpace) -> SetFunction {
        SetFunction::from_fn(space, |s| Scalar::from((s.len() * s.len()) as i64))
    }

    fn singles(space: &FiniteSpace) -> Vec<MSet> {
        (0..space.len()).map(|i| space.set(&[i]).unwrap()).collect()
    }

    #[test]
    fn interference_of_squares() {
        let s = abc();
        let mu = squares(&s);
        let [a, b, c] = <[MSet; 3]>::try_from(singles(&s)).unwrap();
        assert_eq!(interference(&mu, &[a.clone(), b.clone()]).unwrap(), Scalar::from(-2));
        assert_eq!(interference(&mu, &[a, b, c]).unwrap(), Scalar::zero());
    }

    #[test]
    fn interference_vanishes_on_measures() {
        let s = abc();
        let mu = SetFunction::measure(&s, &[Scalar::from(2), Scalar::new(-1, 3), Scalar::from(5)]).unwrap();
        for t in crate::space::enumerate_disjoint_tuples(&s, 2).unwrap() {
            assert!(interference(&mu, &t).unwrap().is_zero());
        }
    }

    #[test]
    fn interference_errors() {
        let s = abc();
        let mu = squares(&s);
        let ab = s.set(&[0, 1]).unwrap();
        let b = s.set(&[1]).unwrap();
        assert_eq!(interference(&mu, &[ab, b.clone()]), Err(Error::NotDisjoint));
        assert!(matches!(interference(&mu, &[b.clone()]), Err(Error::InvalidGrade(..))));
        let other = FiniteSpace::new(["x", "y", "z"]).unwrap();
        assert_eq!(interference(&mu, &[b, other.set(&[0]).unwrap()]), Err(Error::SpaceMismatch));
    }

    #[test]
    fn delta_examples() {
        let s = abc();
        let mu = squares(&s);
        let a = s.set(&[0]).unwrap();
        let d = delta(&mu, &a).unwrap();
        assert_eq!(d.space().atoms(), ["b", "c"]);
        // {b} in the subspace is index 0
        assert_eq!(d.value_at(0b01), Scalar::from(-3));

        let w = [Scalar::from(1), Scalar::new(2, 3), Scalar::from(-4)];
        let nu = SetFunction::measure(&s, &w).unwrap();
        let ac = s.set(&[0, 2]).unwrap();
        let d = delta(&nu, &ac).unwrap();
        for v in d.values() {
            assert_eq!(v, Scalar::from(3));
        }

        let d = delta(&mu, &s.empty_set()).unwrap();
        assert_eq!(d, SetFunction::zero(&s));
        assert!(delta(&mu, &s.full_set()).is_err());
    }

    #[test]
    fn residual_examples() {
        let s = abc();
        let mu = squares(&s);
        let [a, b, c] = <[MSet; 3]>::try_from(singles(&s)).unwrap();
        assert!(recursion_residual(&mu, &a, &[b.clone(), c.clone()]).unwrap().is_zero());
        assert_eq!(
            recursion_residual(&mu, &a, &[a.clone(), c.clone()]),
            Err(Error::NotDisjoint)
        );
        assert!(recursion_residual(&mu, &a, &[b]).is_err());
        assert_eq!(recursion_identity_counterexample(&mu, 2).unwrap(), None);
        assert_eq!(recursion_identity_counterexample(&mu, 3).unwrap(), None);
    }

    #[test]
    fn grade_reports() {
        let s = abc();
        let mu = squares(&s);
        let r1 = is_grade_additive(&mu, 1).unwrap();
        assert!(!r1.is_additive_at_grade);
        let w = r1.witness.unwrap();
        assert_eq!(w.sets.iter().map(MSet::key).collect::<Vec<_>>(), ["0", "1"]);
        assert_eq!(w.value, Scalar::from(-2));
        assert!(is_grade_additive(&mu, 2).unwrap().is_additive_at_grade);
        assert_eq!(grade_of(&mu, 3).unwrap(), Some(2));

        let m = SetFunction::measure(&s, &[Scalar::from(1), Scalar::from(-1), Scalar::new(1, 2)]).unwrap();
        assert_eq!(grade_of(&m, 3).unwrap(), Some(1));

        let shifted = SetFunction::from_fn(&s, |_| Scalar::one());
        assert_eq!(grade_of(&shifted, 3).unwrap(), None);
        let r = is_grade_additive(&shifted, 2).unwrap();
        let w = r.witness.unwrap();
        assert!(w.sets.iter().all(MSet::is_empty));
        assert_eq!(w.value, Scalar::one());
    }

    #[test]
    fn cubes_are_grade_three() {
        let s = abc();
        let mu = SetFunction::from_fn(&s, |a| Scalar::from((a.len() as i64).pow(3)));
        assert!(!is_grade_additive(&mu, 2).unwrap().is_additive_at_grade);
        let t: Vec<MSet> = singles(&s);
        assert_eq!(interference(&mu, &t).unwrap(), Scalar::from(6));
        assert_eq!(grade_of(&mu, 3).unwrap(), Some(3));
    }

    #[test]
    fn grade_guard() {
        let s = FiniteSpace::numbered(16).unwrap();
        let mu = SetFunction::zero(&s);
        assert!(matches!(is_grade_additive(&mu, 3), Err(Error::EnumerationTooLarge { .. })));
        assert!(is_grade_additive(&mu, 0).is_err());
    }
}
