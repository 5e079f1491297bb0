//! Diagonal length of finite unions of rational boxes in `[0,1]^d`.
//!
//! For `T ⊆ [0,1]^d` the diagonal length is the Lebesgue measure of
//! `{t ∈ [0,1] : (t, ..., t) ∈ T}`. A box `Π_j [a_j, b_j]` meets the diagonal
//! in the parameter interval `[max_j a_j, min_j b_j]`, so the diagonal length
//! of a union is the length of a union of intervals. Intervals are closed;
//! boundary points carry no length, so nothing depends on that choice.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A closed interval `[lo, hi]` with `0 ≤ lo ≤ hi ≤ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RInterval {
    lo: Scalar,
    hi: Scalar,
}

impl RInterval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo.is_negative() || hi > Scalar::one() || lo > hi {
            return Err(Error::InvalidInterval(format!(
                "[{lo}, {hi}] is not a subinterval of [0, 1]"
            )));
        }
        Ok(RInterval { lo, hi })
    }

    pub fn unit() -> Self {
        RInterval {
            lo: Scalar::zero(),
            hi: Scalar::one(),
        }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, t: &Scalar) -> bool {
        &self.lo <= t && t <= &self.hi
    }

    pub fn intersect(&self, other: &RInterval) -> Option<RInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(RInterval { lo, hi })
    }
}

impl Serialize for RInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RInterval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let (lo, hi) = <(Scalar, Scalar)>::deserialize(deserializer)?;
        RInterval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// A box `Π_j sides[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RBox {
    sides: Vec<RInterval>,
}

impl RBox {
    pub fn new(sides: Vec<RInterval>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::Shape("a box needs at least one side".into()));
        }
        Ok(RBox { sides })
    }

    pub fn unit_cube(dim: usize) -> Self {
        RBox {
            sides: vec![RInterval::unit(); dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[RInterval] {
        &self.sides
    }

    /// The parameter interval of the diagonal points inside the box.
    pub fn diagonal_trace(&self) -> Option<RInterval> {
        let lo = self.sides.iter().map(RInterval::lo).max()?.clone();
        let hi = self.sides.iter().map(RInterval::hi).min()?.clone();
        (lo <= hi).then_some(RInterval { lo, hi })
    }

    pub fn contains(&self, point: &[Scalar]) -> bool {
        self.sides.iter().zip(point).all(|(s, t)| s.contains(t))
    }

    pub fn intersect(&self, other: &RBox) -> Option<RBox> {
        let sides = self
            .sides
            .iter()
            .zip(&other.sides)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()?;
        Some(RBox { sides })
    }

    pub fn is_unit_cube(&self) -> bool {
        self.sides.iter().all(|s| *s == RInterval::unit())
    }
}

#[derive(Deserialize)]
struct BoxUnionRepr {
    dim: usize,
    boxes: Vec<RBox>,
}

/// A finite union of boxes of one dimension; overlaps are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BoxUnionRepr")]
pub struct BoxUnion {
    dim: usize,
    boxes: Vec<RBox>,
}

impl TryFrom<BoxUnionRepr> for BoxUnion {
    type Error = Error;

    fn try_from(r: BoxUnionRepr) -> Result<Self> {
        BoxUnion::new(r.dim, r.boxes)
    }
}

impl BoxUnion {
    pub fn new(dim: usize, boxes: Vec<RBox>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be at least 1".into()));
        }
        if let Some(b) = boxes.iter().find(|b| b.dim() != dim) {
            return Err(Error::Shape(format!(
                "box of dimension {} in a union of dimension {dim}",
                b.dim()
            )));
        }
        Ok(BoxUnion { dim, boxes })
    }

    pub fn empty(dim: usize) -> Result<Self> {
        BoxUnion::new(dim, Vec::new())
    }

    pub fn full_cube(dim: usize) -> Result<Self> {
        BoxUnion::new(dim, vec![RBox::unit_cube(dim)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[RBox] {
        &self.boxes
    }

    pub fn push(&mut self, b: RBox) -> Result<()> {
        if b.dim() != self.dim {
            return Err(Error::Shape(format!(
                "box of dimension {} in a union of dimension {}",
                b.dim(),
                self.dim
            )));
        }
        self.boxes.push(b);
        Ok(())
    }

    pub fn contains(&self, point: &[Scalar]) -> bool {
        self.boxes.iter().any(|b| b.contains(point))
    }

    /// Pairwise intersection of the two unions.
    pub fn intersect(&self, other: &BoxUnion) -> Result<BoxUnion> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "cannot intersect dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        let boxes = self
            .boxes
            .iter()
            .flat_map(|a| other.boxes.iter().filter_map(move |b| a.intersect(b)))
            .collect();
        BoxUnion::new(self.dim, boxes)
    }

    pub fn is_full_cube(&self) -> bool {
        self.boxes.iter().any(RBox::is_unit_cube)
    }
}

/// Lebesgue measure of a finite union of intervals: sort, merge, sum.
pub fn interval_union_length(intervals: &[RInterval]) -> Scalar {
    let mut sorted: Vec<&RInterval> = intervals.iter().collect();
    sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut total = Scalar::zero();
    let mut current: Option<(Scalar, Scalar)> = None;
    for iv in sorted {
        current = match current {
            Some((lo, hi)) if iv.lo <= hi => Some((lo, hi.max(iv.hi.clone()))),
            Some((lo, hi)) => {
                total += hi - lo;
                Some((iv.lo.clone(), iv.hi.clone()))
            }
            None => Some((iv.lo.clone(), iv.hi.clone())),
        };
    }
    if let Some((lo, hi)) = current {
        total += hi - lo;
    }
    total
}

/// `ℓ({t ∈ [0,1] : (t, ..., t) ∈ T})`.
pub fn diag_length(t: &BoxUnion) -> Scalar {
    let traces: Vec<RInterval> = t.boxes.iter().filter_map(RBox::diagonal_trace).collect();
    interval_union_length(&traces)
}

/// Diagonal length of `t ∩ ([0,1] × .. × S × .. × [0,1])` with the union of
/// the intervals `s` in `slot`. Only defined for `t` the full cube, where
/// it equals the Lebesgue measure of `s`.
pub fn marginal_slice_length(t: &BoxUnion, slot: usize, s: &[RInterval]) -> Result<Scalar> {
    if slot >= t.dim {
        return Err(Error::InvalidSlot { slot, rank: t.dim });
    }
    if !t.is_full_cube() {
        return Err(Error::NotFullCube);
    }
    let slab = BoxUnion::new(
        t.dim,
        s.iter()
            .map(|iv| {
                let mut sides = vec![RInterval::unit(); t.dim];
                sides[slot] = iv.clone();
                RBox { sides }
            })
            .collect(),
    )?;
    Ok(diag_length(&slab.intersect(t)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> Scalar {
        Scalar::new(p, r)
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> RInterval {
        RInterval::new(q(a.0, a.1), q(b.0, b.1)).unwrap()
    }

    fn single(sides: Vec<RInterval>) -> BoxUnion {
        let d = sides.len();
        BoxUnion::new(d, vec![RBox::new(sides).unwrap()]).unwrap()
    }

    #[test]
    fn interval_unions() {
        assert_eq!(interval_union_length(&[iv((0, 1), (1, 2))]), q(1, 2));
        assert_eq!(
            interval_union_length(&[iv((0, 1), (1, 2)), iv((1, 4), (3, 4))]),
            q(3, 4)
        );
        assert_eq!(interval_union_length(&[]), q(0, 1));
        assert_eq!(
            interval_union_length(&[iv((1, 2), (1, 1)), iv((0, 1), (1, 4))]),
            q(3, 4)
        );
        assert_eq!(
            interval_union_length(&[iv((0, 1), (1, 1)), iv((1, 4), (1, 3))]),
            q(1, 1)
        );
    }

    #[test]
    fn diag_length_examples() {
        let half = iv((0, 1), (1, 2));
        assert_eq!(diag_length(&single(vec![half.clone(), half.clone()])), q(1, 2));
        assert_eq!(diag_length(&single(vec![half, iv((1, 2), (1, 1))])), q(0, 1));
        let t = single(vec![iv((1, 4), (1, 1)), iv((0, 1), (3, 4)), iv((1, 2), (1, 1))]);
        assert_eq!(diag_length(&t), q(1, 4));
        assert_eq!(diag_length(&BoxUnion::full_cube(3).unwrap()), q(1, 1));
        assert_eq!(diag_length(&BoxUnion::empty(2).unwrap()), q(0, 1));
    }

    #[test]
    fn marginal_examples() {
        let cube = BoxUnion::full_cube(2).unwrap();
        let s = [iv((0, 1), (1, 3))];
        assert_eq!(marginal_slice_length(&cube, 0, &s).unwrap(), q(1, 3));
        assert_eq!(marginal_slice_length(&cube, 1, &s).unwrap(), q(1, 3));
        assert_eq!(marginal_slice_length(&cube, 1, &[]).unwrap(), q(0, 1));
        assert_eq!(marginal_slice_length(&cube, 0, &[RInterval::unit()]).unwrap(), q(1, 1));
        let half = single(vec![iv((0, 1), (1, 2)), iv((0, 1), (1, 2))]);
        assert_eq!(marginal_slice_length(&half, 0, &s), Err(Error::NotFullCube));
        assert!(matches!(
            marginal_slice_length(&cube, 2, &s),
            Err(Error::InvalidSlot { .. })
        ));
    }

    #[test]
    fn validation() {
        assert!(RInterval::new(q(1, 2), q(1, 3)).is_err());
        assert!(RInterval::new(q(-1, 2), q(1, 3)).is_err());
        assert!(RInterval::new(q(0, 1), q(3, 2)).is_err());
        assert!(BoxUnion::new(2, vec![RBox::unit_cube(3)]).is_err());
        let json = r#"{"dim": 2, "boxes": [{"sides": [["0","1/2"],["0","1/2"]]}]}"#;
        let t: BoxUnion = serde_json::from_str(json).unwrap();
        assert_eq!(diag_length(&t), q(1, 2));
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<BoxUnion>(&text).unwrap(), t);
        let bad = r#"{"dim": 2, "boxes": [{"sides": [["0","1/2"]]}]}"#;
        assert!(serde_json::from_str::<BoxUnion>(bad).is_err());
        let bad = r#"{"dim": 1, "boxes": [{"sides": [["1","1/2"]]}]}"#;
        assert!(serde_json::from_str::<BoxUnion>(bad).is_err());
    }
}
