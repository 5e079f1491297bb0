//! Real-valued set functions on a finite space.

use std::fmt;

use num_bigint::BigInt;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Acc, Scalar, Scaled};
use crate::space::{mask_key, FiniteSpace, MSet};

/// A rational value on every measurable set of a space.
///
/// No positivity or grounding is imposed; the checkers in
/// [`crate::interference`] report those properties.
#[derive(Clone, PartialEq, Eq)]
pub struct SetFunction {
    space: FiniteSpace,
    values: Scaled,
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for mask in 0..=self.space.full_mask() {
            m.entry(&mask_key(mask), &self.value_at(mask).to_string());
        }
        m.finish()
    }
}

impl SetFunction {
    /// Builds from `2^k` values indexed by bitmask.
    pub fn from_values(space: &FiniteSpace, values: Vec<Scalar>) -> Result<Self> {
        if values.len() != space.set_count() {
            return Err(Error::Shape(format!(
                "a {}-atom space needs {} values, got {}",
                space.len(),
                space.set_count(),
                values.len()
            )));
        }
        Ok(SetFunction {
            space: space.clone(),
            values: Scaled::from_scalars(&values),
        })
    }

    pub fn from_fn(space: &FiniteSpace, mut f: impl FnMut(&MSet) -> Scalar) -> Self {
        let values: Vec<Scalar> = space.sets().map(|s| f(&s)).collect();
        SetFunction {
            space: space.clone(),
            values: Scaled::from_scalars(&values),
        }
    }

    pub fn zero(space: &FiniteSpace) -> Self {
        SetFunction::from_fn(space, |_| Scalar::zero())
    }

    /// The additive measure with the given atom weights.
    pub fn measure(space: &FiniteSpace, weights: &[Scalar]) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::Shape(format!(
                "{} weights for a {}-atom space",
                weights.len(),
                space.len()
            )));
        }
        Ok(SetFunction::from_fn(space, |s| {
            s.members().map(|i| &weights[i]).sum()
        }))
    }

    pub(crate) fn from_scaled(space: FiniteSpace, values: Scaled) -> Self {
        debug_assert_eq!(values.len(), space.set_count());
        SetFunction { space, values }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn value(&self, set: &MSet) -> Result<Scalar> {
        if !set.space().same_as(&self.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.values.get(set.mask() as usize))
    }

    /// Value at a bitmask; panics if the mask is outside the space.
    pub fn value_at(&self, mask: u32) -> Scalar {
        self.values.get(mask as usize)
    }

    /// All values in mask order.
    pub fn values(&self) -> Vec<Scalar> {
        self.values.to_scalars()
    }

    pub(crate) fn scaled(&self) -> &Scaled {
        &self.values
    }

    pub(crate) fn numer_at(&self, mask: u32) -> BigInt {
        self.values.numer_at(mask as usize)
    }

    pub(crate) fn common_denominator(&self) -> &BigInt {
        self.values.den()
    }

    #[inline]
    pub(crate) fn accumulate(&self, acc: &mut Acc, mask: u32, positive: bool) {
        self.values.accumulate(acc, mask as usize, positive)
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: &Scalar, other: &SetFunction, b: &Scalar) -> Result<Self> {
        if !self.space.same_as(&other.space) {
            return Err(Error::SpaceMismatch);
        }
        let values = (0..=self.space.full_mask())
            .map(|m| a * &self.value_at(m) + b * &other.value_at(m))
            .collect();
        SetFunction::from_values(&self.space, values)
    }

    pub fn is_grounded(&self) -> bool {
        self.value_at(0).is_zero()
    }

    /// First set (in mask order) with a negative value.
    pub fn first_negative(&self) -> Option<MSet> {
        (0..=self.space.full_mask())
            .find(|&m| self.value_at(m).is_negative())
            .map(|m| self.space.set_from_mask(m).expect("mask within space"))
    }

    pub fn is_positive(&self) -> bool {
        self.first_negative().is_none()
    }
}

impl Serialize for SetFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        struct Values<'a>(&'a SetFunction);

        impl Serialize for Values<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
                let full = self.0.space.full_mask();
                let mut map = serializer.serialize_map(Some(full as usize + 1))?;
                for mask in 0..=full {
                    map.serialize_entry(&mask_key(mask), &self.0.value_at(mask))?;
                }
                map.end()
            }
        }

        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("space", &self.space)?;
        map.serialize_entry("values", &Values(self))?;
        map.end()
    }
}

/// Map entries kept in input order so duplicate keys can be rejected.
struct Entries(Vec<(String, Scalar)>);

impl<'de> Deserialize<'de> for Entries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = Entries;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from set keys to scalars")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> core::result::Result<Entries, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, Scalar>()? {
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

#[derive(Deserialize)]
struct SetFunctionRepr {
    space: FiniteSpace,
    values: Entries,
}

impl SetFunctionRepr {
    fn build(self) -> Result<SetFunction> {
        let space = self.space;
        let mut slots: Vec<Option<Scalar>> = vec![None; space.set_count()];
        for (key, value) in self.values.0 {
            let set = space.set_from_key(&key)?;
            let slot = &mut slots[set.mask() as usize];
            if slot.is_some() {
                return Err(Error::DuplicateEntry(format!("set {key:?}")));
            }
            *slot = Some(value);
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(m, v)| {
                v.ok_or_else(|| {
                    Error::PartialTable(format!("set function has no value for {:?}", mask_key(m as u32)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SetFunction::from_values(&space, values)
    }
}

impl<'de> Deserialize<'de> for SetFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        SetFunctionRepr::deserialize(deserializer)?
            .build()
            .map_err(de::Error::custom)
    }
}
