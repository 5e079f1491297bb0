//! Truncated kernel bimeasures `λ(S, T) = Σ_{s∈S, t∈T} a(s, t)`.
//!
//! [`walsh_block_kernel`] places scaled Walsh–Hadamard blocks along the
//! diagonal: block `k` has size `2^k` and entries `±1 / (2^k · k)`. Its
//! contribution to the variation is exactly `2^k / k`, so the variation of
//! the truncations diverges, while the orthogonal sign pattern of each block
//! keeps signed sums small. Variation and sampled semivariation work directly
//! on the matrix, without materializing the `2^n` subsets of each factor.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polymeasure::{semivariation_of, PolyMeasure, Semivariation, SemivariationMode};
use crate::scalar::{Scalar, Scaled};
use crate::space::{FiniteSpace, MAX_ATOMS};

/// Largest number of Walsh blocks: `n = 2^{K+1} - 2` must stay manageable.
pub const MAX_WALSH_BLOCKS: usize = 10;

/// A square `n × n` matrix of rational kernel values, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelMatrix {
    n: usize,
    entries: Vec<Scalar>,
}

impl KernelMatrix {
    pub fn new(n: usize, entries: Vec<Scalar>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::Shape(format!(
                "a {n}×{n} kernel needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(KernelMatrix { n, entries })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        KernelMatrix::new(n, vec![Scalar::zero(); n * n])
    }

    pub fn identity(n: usize) -> Result<Self> {
        KernelMatrix::new(
            n,
            (0..n * n)
                .map(|i| if i / n == i % n { Scalar::one() } else { Scalar::zero() })
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.n + col]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// `Σ |a(s, t)|`.
    pub fn variation(&self) -> Scalar {
        self.entries.iter().map(Scalar::abs).sum()
    }

    /// Semivariation of the kernel bimeasure straight from the matrix.
    pub fn semivariation(&self, mode: SemivariationMode) -> Result<Semivariation> {
        semivariation_of(&[self.n, self.n], &Scaled::from_scalars(&self.entries), mode)
    }
}

/// The bimeasure of a kernel on `{0..n-1}²`.
pub fn kernel_to_bimeasure(kernel: &KernelMatrix) -> Result<PolyMeasure> {
    if kernel.n > MAX_ATOMS {
        return Err(Error::ResourceGuard(format!(
            "a {}-atom factor cannot be materialized (cap {MAX_ATOMS}); use the streaming \
             KernelMatrix::variation / KernelMatrix::semivariation instead",
            kernel.n
        )));
    }
    let space = FiniteSpace::numbered(kernel.n)?;
    PolyMeasure::new(vec![space.clone(), space], kernel.entries.clone())
}

/// Sylvester Walsh–Hadamard sign `(-1)^{popcount(i & j)}`.
pub fn walsh_sign(i: usize, j: usize) -> i64 {
    if (i & j).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Offset and size of block `k` (1-based) in the block kernel.
pub fn block_range(k: usize) -> (usize, usize) {
    ((1usize << k) - 2, 1usize << k)
}

/// The `k`-th Walsh block alone: `2^k × 2^k` with entries `w_i(j) / (2^k · k)`.
pub fn walsh_block(k: usize) -> Result<KernelMatrix> {
    if k == 0 || k > MAX_WALSH_BLOCKS {
        return Err(Error::ResourceGuard(format!(
            "block index {k} outside 1..={MAX_WALSH_BLOCKS}"
        )));
    }
    let size = 1usize << k;
    let div = (size * k) as i64;
    let entries = (0..size * size)
        .map(|x| Scalar::new(walsh_sign(x / size, x % size), div))
        .collect();
    KernelMatrix::new(size, entries)
}

/// Blocks `1..=blocks` placed along the diagonal; `n = 2 + 4 + ... + 2^K`.
pub fn walsh_block_kernel(blocks: usize) -> Result<KernelMatrix> {
    if blocks == 0 || blocks > MAX_WALSH_BLOCKS {
        return Err(Error::ResourceGuard(format!(
            "block count {blocks} outside 1..={MAX_WALSH_BLOCKS}"
        )));
    }
    let n = (1usize << (blocks + 1)) - 2;
    let mut entries = vec![Scalar::zero(); n * n];
    for k in 1..=blocks {
        let (offset, size) = block_range(k);
        let div = (size * k) as i64;
        for i in 0..size {
            for j in 0..size {
                entries[(offset + i) * n + offset + j] = Scalar::new(walsh_sign(i, j), div);
            }
        }
    }
    KernelMatrix::new(n, entries)
}

/// One truncation level of [`variation_growth_report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRow {
    pub blocks: usize,
    pub n: usize,
    pub variation: Scalar,
    /// Best sampled signed sum: a lower bound on the semivariation.
    pub semivar_lb: Scalar,
}

impl Serialize for GrowthRow {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(4))?;
        map.serialize_entry("K", &self.blocks)?;
        map.serialize_entry("n", &self.n)?;
        map.serialize_entry("variation", &self.variation)?;
        map.serialize_entry("semivar_lb", &self.semivar_lb)?;
        map.end()
    }
}

/// Exact variation and a seeded semivariation lower bound for every
/// truncation `K = 1..=k_max` of the Walsh block kernel.
pub fn variation_growth_report(k_max: usize, trials: u64, seed: u64) -> Result<Vec<GrowthRow>> {
    if k_max == 0 || k_max > MAX_WALSH_BLOCKS {
        return Err(Error::ResourceGuard(format!(
            "K_max {k_max} outside 1..={MAX_WALSH_BLOCKS}"
        )));
    }
    (1..=k_max)
        .map(|blocks| {
            let kernel = walsh_block_kernel(blocks)?;
            let sv = kernel.semivariation(SemivariationMode::Sampled { seed, trials })?;
            Ok(GrowthRow {
                blocks,
                n: kernel.size(),
                variation: kernel.variation(),
                semivar_lb: sv.value,
            })
        })
        .collect()
}

/// Aligned-column rendering of a growth report.
pub fn render_table(rows: &[GrowthRow]) -> String {
    let mut out = format!("{:>3} {:>6} {:>24} {:>24}\n", "K", "n", "variation", "semivar_lb");
    for r in rows {
        out.push_str(&format!(
            "{:>3} {:>6} {:>24} {:>24}\n",
            r.blocks,
            r.n,
            r.variation.to_string(),
            r.semivar_lb.to_string()
        ));
    }
    out
}
