//! Grade-2 measures and symmetric bimeasures.
//!
//! A grounded set function is grade-2 additive exactly when it is the
//! diagonal of a symmetric bimeasure, and that bimeasure is unique:
//!
//! ```text
//! λ(A, B) = ½ (μ(A ∪ B) + μ(A ∩ B) − μ(A ∖ B) − μ(B ∖ A))
//! ```
//!
//! [`reconstruct`] applies this formula to any set function; the check
//! functions verify both directions of the correspondence and the matching
//! of positivity with diagonal positivity.

use crate::error::{Error, Result};
use crate::polymeasure::PolyMeasure;
use crate::scalar::Scalar;
use crate::setfn::SetFunction;
use crate::space::FiniteSpace;

/// The symmetric bimeasure whose diagonal is `mu`, when `mu` is grade-2.
/// Defined (and symmetric) for every set function.
pub fn reconstruct(mu: &SetFunction) -> PolyMeasure {
    let space = mu.space();
    let half = Scalar::new(1, 2);
    let value = |m: u32| mu.value_at(m);
    PolyMeasure::on_power(space, 2, |ix| {
        let a = 1u32 << ix[0];
        let b = 1u32 << ix[1];
        let sum = value(a | b) + value(a & b) - value(a & !b) - value(b & !a);
        sum * &half
    })
    .expect("rank-2 power of a valid space")
}

/// Whether `diagonal(reconstruct(mu)) == mu` on every set.
pub fn roundtrip_check(mu: &SetFunction) -> bool {
    let lambda = reconstruct(mu);
    lambda.diagonal().expect("equal factors") == *mu
}

/// Whether `reconstruct(diagonal(lambda)) == lambda` entry for entry.
pub fn inverse_roundtrip_check(lambda: &PolyMeasure) -> Result<bool> {
    if lambda.rank() != 2 {
        return Err(Error::Arity {
            expected: 2,
            got: lambda.rank(),
        });
    }
    let mu = lambda.diagonal()?;
    if !lambda.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(reconstruct(&mu) == *lambda)
}

/// Evaluates `[mu ≥ 0] ⇔ [reconstruct(mu) is diagonally positive]` for a
/// grade-2 measure.
pub fn positivity_correspondence(mu: &SetFunction) -> Result<bool> {
    if !roundtrip_check(mu) {
        return Err(Error::NotGrade2);
    }
    let lhs = mu.is_positive();
    let rhs = reconstruct(mu).is_diagonally_positive()?.positive;
    Ok(lhs == rhs)
}

/// `max |μ(A)|` over all sets.
pub fn sup_bound(mu: &SetFunction) -> Scalar {
    mu.values()
        .iter()
        .map(Scalar::abs)
        .max()
        .expect("a space has at least one set")
}

/// Rank over the rationals, by fraction-exact Gaussian elimination.
pub fn exact_rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][c].recip();
        let pivot: Vec<Scalar> = rows[rank].iter().map(|v| v * &inv).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot).skip(c) {
                *x -= &(p * &f);
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// Dimension of the space of grade-2 measures on `space`, computed as the
/// rank of the diagonals of the symmetric bimeasure basis `E_ab + E_ba`.
pub fn diagonal_image_rank(space: &FiniteSpace) -> usize {
    let k = space.len();
    let rows = (0..k)
        .flat_map(|a| (a..k).map(move |b| (a, b)))
        .map(|(a, b)| {
            let basis = PolyMeasure::on_power(space, 2, |ix| {
                if (ix[0], ix[1]) == (a, b) || (ix[0], ix[1]) == (b, a) {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            })
            .expect("rank-2 power of a valid space");
            basis.diagonal().expect("equal factors").values()
        })
        .collect();
    exact_rank(rows)
}
