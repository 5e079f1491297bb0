//! Brute-force oracles. Each one evaluates a defining formula directly from
//! set-function values or tensor entries and shares no code path with the
//! library routine it checks.
#![allow(dead_code)]

use itertools::Itertools;
use qmeasure::diagbox::RInterval;
use qmeasure::{BoxUnion, FiniteSpace, MSet, PolyMeasure, Scalar, SetFunction};

pub fn union_all<'a>(space: &FiniteSpace, sets: impl IntoIterator<Item = &'a MSet>) -> MSet {
    sets.into_iter()
        .fold(space.empty_set(), |acc, s| acc.union(s).unwrap())
}

/// `Σ_{ℓ=0}^{d} (-1)^ℓ Σ_{i_0<...<i_ℓ} μ(⊔_k S_{i_k})`.
pub fn interference(mu: &SetFunction, sets: &[MSet]) -> Scalar {
    let space = mu.space();
    let mut total = Scalar::zero();
    for l in 0..sets.len() {
        let sign = if l % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        for combo in (0..sets.len()).combinations(l + 1) {
            let u = union_all(space, combo.iter().map(|&i| &sets[i]));
            total += sign.clone() * mu.value(&u).unwrap();
        }
    }
    total
}

/// `μ(A) + μ(B) - μ(A ⊔ B)`.
pub fn interference_pair(mu: &SetFunction, a: &MSet, b: &MSet) -> Scalar {
    mu.value(a).unwrap() + mu.value(b).unwrap() - mu.value(&a.union(b).unwrap()).unwrap()
}

/// `I_{d-1} Δ_{S_0} ν (S_1..S_d)` with `Δ` written out on ambient sets.
pub fn delta_interference(nu: &SetFunction, s0: &MSet, rest: &[MSet]) -> Scalar {
    let space = nu.space();
    let mut total = Scalar::zero();
    for l in 0..rest.len() {
        let sign = if l % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        for combo in (0..rest.len()).combinations(l + 1) {
            let u = union_all(space, combo.iter().map(|&i| &rest[i]));
            let d = nu.value(&u).unwrap() - nu.value(&u.union(s0).unwrap()).unwrap();
            total += sign.clone() * d;
        }
    }
    total
}

/// Both sides of the recursion identity, computed from the definitions.
pub fn recursion_sides(nu: &SetFunction, s0: &MSet, rest: &[MSet]) -> (Scalar, Scalar) {
    let lhs = delta_interference(nu, s0, rest);
    let mut all = vec![s0.clone()];
    all.extend_from_slice(rest);
    let rhs = interference(nu, &all) - nu.value(s0).unwrap();
    (lhs, rhs)
}

/// Cylinder value as a sum of tensor entries over the atom tuples inside.
pub fn cylinder_value(lambda: &PolyMeasure, sets: &[MSet]) -> Scalar {
    sets.iter()
        .map(|s| s.members().collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|ix| lambda.entry(&ix).clone())
        .sum()
}

/// `Σ_{σ ∈ S_d} λ(A_{σ1}, ..., A_{σd})`.
pub fn permutation_sum(lambda: &PolyMeasure, sets: &[MSet]) -> Scalar {
    (0..sets.len())
        .permutations(sets.len())
        .map(|p| {
            let permuted: Vec<MSet> = p.iter().map(|&i| sets[i].clone()).collect();
            cylinder_value(lambda, &permuted)
        })
        .sum()
}

/// Every set partition of `0..k` as lists of blocks.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![vec![]];
    for x in 0..k {
        let mut next = Vec::new();
        for p in &out {
            for b in 0..p.len() {
                let mut q: Vec<Vec<usize>> = p.clone();
                q[b].push(x);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![x]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// Best `Σ |λ(P_i × Q_j)|` over all partition pairs of a bimeasure.
pub fn partition_pair_variation(lambda: &PolyMeasure) -> Scalar {
    let f = lambda.factors();
    let parts0 = set_partitions(f[0].len());
    let parts1 = set_partitions(f[1].len());
    let mut best = Scalar::zero();
    for p in &parts0 {
        for q in &parts1 {
            let mut sum = Scalar::zero();
            for b in p {
                for c in q {
                    let sb = f[0].set(b).unwrap();
                    let sc = f[1].set(c).unwrap();
                    sum += cylinder_value(lambda, &[sb, sc]).abs();
                }
            }
            best = best.max(sum);
        }
    }
    best
}

/// `max |Σ ε¹⋯εᵈ λ(i)|` over every sign vector of every slot.
pub fn brute_semivariation(lambda: &PolyMeasure) -> Scalar {
    let shape: Vec<usize> = lambda.factors().iter().map(FiniteSpace::len).collect();
    let bits: usize = shape.iter().sum();
    let indices: Vec<Vec<usize>> = shape
        .iter()
        .map(|&k| (0..k).collect::<Vec<_>>())
        .multi_cartesian_product()
        .collect();
    let mut best = Scalar::zero();
    for code in 0u64..(1 << bits) {
        let mut sum = Scalar::zero();
        for ix in &indices {
            let mut offset = 0;
            let mut negative = false;
            for (j, &i) in ix.iter().enumerate() {
                negative ^= code & (1 << (offset + i)) != 0;
                offset += shape[j];
            }
            let v = lambda.entry(ix);
            if negative {
                sum -= v;
            } else {
                sum += v;
            }
        }
        best = best.max(sum.abs());
    }
    best
}

/// Diagonal length by subdividing `[0,1]` at every box endpoint and testing
/// each cell's midpoint for membership.
pub fn subdivision_diag_length(t: &BoxUnion) -> Scalar {
    let mut cuts = vec![Scalar::zero(), Scalar::one()];
    for b in t.boxes() {
        for s in b.sides() {
            cuts.push(s.lo().clone());
            cuts.push(s.hi().clone());
        }
    }
    cuts.sort();
    cuts.dedup();
    let half = Scalar::new(1, 2);
    cuts.windows(2)
        .filter_map(|w| {
            let mid = (&w[0] + &w[1]) * &half;
            let point = vec![mid; t.dim()];
            t.contains(&point).then(|| &w[1] - &w[0])
        })
        .sum()
}

/// Lebesgue measure of an interval union by cell midpoints.
pub fn subdivision_length(intervals: &[RInterval]) -> Scalar {
    let mut cuts = vec![Scalar::zero(), Scalar::one()];
    for iv in intervals {
        cuts.push(iv.lo().clone());
        cuts.push(iv.hi().clone());
    }
    cuts.sort();
    cuts.dedup();
    let half = Scalar::new(1, 2);
    cuts.windows(2)
        .filter(|w| {
            let mid = (&w[0] + &w[1]) * &half;
            intervals.iter().any(|iv| iv.contains(&mid))
        })
        .map(|w| &w[1] - &w[0])
        .sum()
}

/// Every set function on `space` with values in `{-1, 0, 1}`.
pub fn ternary_set_functions(space: &FiniteSpace) -> Vec<SetFunction> {
    let n = space.set_count();
    let total = 3usize.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let values = (0..n)
                .map(|_| {
                    let v = (code % 3) as i64 - 1;
                    code /= 3;
                    Scalar::from(v)
                })
                .collect();
            SetFunction::from_values(space, values).unwrap()
        })
        .collect()
}

/// `Σ_{k=1}^{K} 2^k / k`.
pub fn walsh_variation_closed_form(blocks: usize) -> Scalar {
    (1..=blocks)
        .map(|k| Scalar::new(1i64 << k, k as i64))
        .sum()
}
