//! Fixtures shared by the criterion benchmarks.

use qmeasure::random::Generator;
use qmeasure::{BoxUnion, FiniteSpace, PolyMeasure, SetFunction};

/// Diagonal of a random rank-`d` polymeasure on `k` atoms.
pub fn random_diagonal(k: usize, d: usize, seed: u64) -> SetFunction {
    let space = FiniteSpace::lettered(k).expect("k within the atom cap");
    Generator::new(seed)
        .polymeasure(vec![space; d], 9)
        .expect("non-empty factor list")
        .diagonal()
        .expect("equal factors")
}

pub fn random_polymeasure(k: usize, d: usize, seed: u64) -> PolyMeasure {
    let space = FiniteSpace::lettered(k).expect("k within the atom cap");
    Generator::new(seed)
        .polymeasure(vec![space; d], 9)
        .expect("non-empty factor list")
}

pub fn random_boxes(dim: usize, boxes: usize, seed: u64) -> BoxUnion {
    let mut g = Generator::new(seed);
    let all = (0..boxes).map(|_| g.rbox(dim)).collect();
    BoxUnion::new(dim, all).expect("consistent dims")
}
