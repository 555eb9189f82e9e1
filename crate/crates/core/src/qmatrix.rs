//! Intersection matrices of the tripled lattice triples.
//!
//! For a lattice of `n` points the matrix has `−1` on the diagonal and `+1`
//! between nearest neighbours. The circle closes the lattice through the
//! corner entries, the segment leaves them zero. Determinants and ranks are
//! computed exactly with fraction-free elimination.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[cfg_attr(feature = "cli", derive(clap::ValueEnum))]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Segment,
}

impl Shape {
    /// Corner parameter `b`: 1 closes the lattice into a circle.
    pub fn corner(self) -> i64 {
        match self {
            Shape::Circle => 1,
            Shape::Segment => 0,
        }
    }

    /// Smallest lattice with a well-defined neighbour pattern.
    pub fn min_size(self) -> usize {
        match self {
            Shape::Circle => 3,
            Shape::Segment => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::Circle => "circle",
            Shape::Segment => "segment",
        }
    }

    pub fn is_periodic(self) -> bool {
        self == Shape::Circle
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circle" => Ok(Shape::Circle),
            "segment" => Ok(Shape::Segment),
            other => Err(Error::InvalidArgument(format!("unknown shape `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionMatrix {
    shape: Shape,
    n: usize,
    entries: Vec<i64>,
}

impl IntersectionMatrix {
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    /// Nonzero entries `(i, j, q_ij)` in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        let n = self.n;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(move |(k, &v)| (k / n, k % n, v))
    }

    pub fn determinant(&self) -> BigInt {
        Elimination::run(self).det
    }

    /// `det` as a machine integer; the values stay tiny for these matrices.
    pub fn det_i64(&self) -> Result<i64> {
        self.determinant().to_i64().ok_or(Error::Overflow)
    }

    pub fn rank(&self) -> usize {
        Elimination::run(self).rank
    }

    /// Dimension of the rational null space.
    pub fn kernel_dimension(&self) -> usize {
        self.n - self.rank()
    }

    pub fn is_degenerate(&self) -> bool {
        self.determinant().is_zero()
    }
}

/// Builds the intersection matrix for `n` lattice points.
///
/// Wrap-around neighbours of the circle coincide with the corner entries, so
/// every off-diagonal nonzero is exactly `+1` even for `n = 3`.
pub fn build_q(shape: Shape, n: usize) -> Result<IntersectionMatrix> {
    let min = shape.min_size();
    if n < min {
        return Err(Error::SizeTooSmall { shape, n, min });
    }
    let mut entries = vec![0i64; n * n];
    for i in 0..n {
        entries[i * n + i] = -1;
        if i + 1 < n {
            entries[i * n + i + 1] = 1;
            entries[(i + 1) * n + i] = 1;
        }
    }
    let b = shape.corner();
    if b != 0 {
        entries[n - 1] = b;
        entries[(n - 1) * n] = b;
    }
    Ok(IntersectionMatrix { shape, n, entries })
}

/// `det q` for every constructible size up to `n_max`, starting at
/// [`Shape::min_size`].
pub fn det_sequence(shape: Shape, n_max: usize) -> Result<Vec<i64>> {
    let min = shape.min_size();
    if n_max < min {
        return Err(Error::SizeTooSmall {
            shape,
            n: n_max,
            min,
        });
    }
    (min..=n_max)
        .map(|n| build_q(shape, n)?.det_i64())
        .collect()
}

pub fn kernel_dimension(q: &IntersectionMatrix) -> usize {
    q.kernel_dimension()
}

/// Sizes in `n_min..=n_max` whose intersection matrix is invertible.
/// Sizes below the shape minimum are skipped.
pub fn select_nondegenerate(shape: Shape, n_min: usize, n_max: usize) -> Result<Vec<usize>> {
    if n_min > n_max {
        return Err(Error::InvalidRange { n_min, n_max });
    }
    let mut out = Vec::new();
    for n in n_min.max(shape.min_size())..=n_max {
        if !build_q(shape, n)?.is_degenerate() {
            out.push(n);
        }
    }
    if out.is_empty() {
        return Err(Error::EmptySelection {
            shape,
            n_min,
            n_max,
        });
    }
    Ok(out)
}

/// Fraction-free (Bareiss) row reduction to echelon form.
///
/// After processing pivot `k` every remaining entry is a `(k+1)`-minor of the
/// input, so each division by the previous pivot is exact. Columns without a
/// pivot are skipped, which keeps the division exact and gives the rank.
struct Elimination {
    rank: usize,
    det: BigInt,
}

impl Elimination {
    fn run(q: &IntersectionMatrix) -> Self {
        let n = q.n;
        let mut a: Vec<Vec<BigInt>> = q
            .entries
            .chunks(n)
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        let mut prev = BigInt::from(1);
        let mut negate = false;
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            if p != rank {
                a.swap(p, rank);
                negate = !negate;
            }
            let pivot = a[rank][col].clone();
            for r in rank + 1..n {
                let lead = a[r][col].clone();
                #[allow(clippy::needless_range_loop)] // reads two rows at once
                for c in col + 1..n {
                    // Banded input: most products vanish, skip them outright.
                    let keep = !a[r][c].is_zero();
                    let fill = !lead.is_zero() && !a[rank][c].is_zero();
                    if !keep && !fill {
                        continue;
                    }
                    let mut v = &pivot * &a[r][c];
                    if fill {
                        v -= &lead * &a[rank][c];
                    }
                    a[r][c] = v / &prev;
                }
                a[r][col] = BigInt::zero();
            }
            prev = pivot;
            rank += 1;
        }
        let det = if rank < n {
            BigInt::zero()
        } else if negate {
            -prev
        } else {
            prev
        };
        Elimination { rank, det }
    }
}
