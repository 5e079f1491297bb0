//! Seeded generators for set functions, polymeasures, sets and boxes.
//!
//! All randomness flows from a ChaCha8 stream seeded by a single `u64`, so a
//! seed reproduces its output bit for bit on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagbox::{BoxUnion, RBox, RInterval};
use crate::error::Result;
use crate::polymeasure::PolyMeasure;
use crate::scalar::Scalar;
use crate::setfn::SetFunction;
use crate::space::{FiniteSpace, MSet};

/// Denominators of generated scalars.
pub const DENOMINATORS: [i64; 5] = [1, 2, 3, 4, 6];

/// Largest denominator of generated interval endpoints.
pub const ENDPOINT_DENOMINATOR: i64 = 12;

pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Numerator uniform in `[-bound, bound]`, denominator from [`DENOMINATORS`].
    pub fn scalar(&mut self, bound: i64) -> Scalar {
        let p = self.rng.random_range(-bound..=bound);
        let q = DENOMINATORS[self.below(DENOMINATORS.len())];
        Scalar::new(p, q)
    }

    pub fn set_function(&mut self, space: &FiniteSpace, bound: i64) -> SetFunction {
        SetFunction::from_fn(space, |_| self.scalar(bound))
    }

    pub fn polymeasure(&mut self, factors: Vec<FiniteSpace>, bound: i64) -> Result<PolyMeasure> {
        PolyMeasure::from_fn(factors, |_| self.scalar(bound))
    }

    /// A random symmetric rank-2 tensor: upper triangle drawn, then mirrored.
    pub fn symmetric_bimeasure(&mut self, space: &FiniteSpace, bound: i64) -> PolyMeasure {
        let k = space.len();
        let mut upper = vec![Scalar::zero(); k * k];
        for a in 0..k {
            for b in a..k {
                upper[a * k + b] = self.scalar(bound);
            }
        }
        PolyMeasure::on_power(space, 2, |ix| {
            let (a, b) = (ix[0].min(ix[1]), ix[0].max(ix[1]));
            upper[a * k + b].clone()
        })
        .expect("rank-2 power of a valid space")
    }

    /// A grade-2 measure, drawn as the diagonal of a random symmetric bimeasure.
    pub fn grade2_measure(&mut self, space: &FiniteSpace, bound: i64) -> SetFunction {
        self.symmetric_bimeasure(space, bound)
            .diagonal()
            .expect("equal factors")
    }

    pub fn mset(&mut self, space: &FiniteSpace) -> MSet {
        let mask = self.rng.random_range(0..=space.full_mask());
        space.set_from_mask(mask).expect("mask within space")
    }

    /// `m` pairwise-disjoint sets: each atom joins one of them or none.
    pub fn disjoint_tuple(&mut self, space: &FiniteSpace, m: usize) -> Vec<MSet> {
        let mut masks = vec![0u32; m];
        for atom in 0..space.len() {
            let bin = self.below(m + 1);
            if bin < m {
                masks[bin] |= 1 << atom;
            }
        }
        masks
            .into_iter()
            .map(|mask| space.set_from_mask(mask).expect("mask within space"))
            .collect()
    }

    fn endpoint(&mut self) -> Scalar {
        let q = self.rng.random_range(1..=ENDPOINT_DENOMINATOR);
        let p = self.rng.random_range(0..=q);
        Scalar::new(p, q)
    }

    pub fn interval(&mut self) -> RInterval {
        let a = self.endpoint();
        let b = self.endpoint();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        RInterval::new(lo, hi).expect("sorted endpoints in [0,1]")
    }

    pub fn intervals(&mut self, max_count: usize) -> Vec<RInterval> {
        let n = self.below(max_count + 1);
        (0..n).map(|_| self.interval()).collect()
    }

    pub fn rbox(&mut self, dim: usize) -> RBox {
        RBox::new((0..dim).map(|_| self.interval()).collect()).expect("dim >= 1")
    }

    pub fn box_union(&mut self, dim: usize, max_boxes: usize) -> BoxUnion {
        let n = self.below(max_boxes + 1);
        BoxUnion::new(dim, (0..n).map(|_| self.rbox(dim)).collect()).expect("consistent dims")
    }
}
