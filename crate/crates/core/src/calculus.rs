//! The differential `[D, π(a)]` and its per-point block structure.
//!
//! Row couplings (`i = k`) drop out of the commutator because both ends carry
//! the same sample `a_i`, so `[D, π(a)]` only acts inside the column blocks
//! `H_{l−1,l} ⊕ H_{l,l} ⊕ H_{l+1,l}`. With the default couplings the block at
//! point `l` is
//!
//! ```text
//!         ⎡ 0    a′₋  0   ⎤
//!   i·c · ⎢ a′₋  0    a′₊ ⎥
//!         ⎣ 0    a′₊  0   ⎦
//! ```
//!
//! with the backward and forward difference quotients `a′₋`, `a′₊`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dirac::DiracOperator;
use crate::linalg::{null_space, DenseMatrix, SparseMatrix};
use crate::triple::{left_diagonal, AlgebraElement, TripleBasis};
use crate::{Error, Result};

/// Off-block tolerance for [`blocks`].
pub const BLOCK_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `[D, π(a)] = D·π(a) − π(a)·D`, entrywise `m_{ij,kl}·(a_k − a_i)`.
pub fn commutator(d: &DiracOperator, a: &AlgebraElement) -> Result<SparseMatrix> {
    let diag = left_diagonal(a, d.basis())?;
    Ok(d.matrix().commutator_with_diagonal(&diag))
}

/// Kernel of one block.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockKernel {
    /// Only the zero vector.
    Trivial,
    /// A single normalized direction.
    Line(Vec<Complex64>),
    /// The block vanishes; every vector is in the kernel.
    Whole,
}

/// `[D, π(a)]` restricted to the column block of one lattice point.
#[derive(Clone, Debug)]
pub struct CommutatorBlockSet {
    pub point: usize,
    /// Subspace labels of the block rows, in basis order.
    pub labels: Vec<(usize, usize)>,
    pub block: DenseMatrix,
    /// Backward quotient, absent at the left end of a segment.
    pub a_minus: Option<Complex64>,
    /// Forward quotient, absent at the right end of a segment.
    pub a_plus: Option<Complex64>,
    /// Coupling scale `c`.
    pub scale: f64,
}

impl CommutatorBlockSet {
    pub fn is_interior(&self) -> bool {
        self.a_minus.is_some() && self.a_plus.is_some()
    }

    /// Nonzero singular value `c·√(|a′₋|² + |a′₊|²)` (doubly degenerate in the
    /// interior).
    pub fn nu(&self) -> f64 {
        let m = self.a_minus.map_or(0.0, |z| z.norm_sqr());
        let p = self.a_plus.map_or(0.0, |z| z.norm_sqr());
        self.scale * (m + p).sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.a_minus.unwrap_or(ZERO) == ZERO && self.a_plus.unwrap_or(ZERO) == ZERO
    }
}

/// Splits a commutator into per-point column blocks and reads off the
/// difference quotients from the couplings of `d`.
pub fn blocks(c: &SparseMatrix, d: &DiracOperator) -> Result<Vec<CommutatorBlockSet>> {
    let basis = d.basis();
    let residual = off_block_residual(c, basis);
    if residual > BLOCK_TOLERANCE {
        return Err(Error::NotBlockDiagonal { residual });
    }
    let scale = d.normalization().factor();
    let dx = d.spacing();
    let couplings = d.couplings();
    let mut out = Vec::with_capacity(basis.n());
    for l in 0..basis.n() {
        let idx: Vec<usize> = basis.column_block(l).collect();
        let labels: Vec<_> = idx.iter().map(|&k| basis.subspace_of(k).label()).collect();
        let block = c.submatrix(&idx);
        let pos = |label| labels.iter().position(|&x| x == label);
        // Entry (row, col) equals m_{row,col}·(a_col − a_row); dividing by the
        // coupling recovers the raw difference.
        let quotient = |row: (usize, usize), col: (usize, usize)| -> Option<Complex64> {
            let (r, k) = (pos(row)?, pos(col)?);
            let m = couplings.get(row, col)?;
            Some(block[(r, k)] / m * Complex64::new(1.0 / dx, 0.0))
        };
        let a_minus = basis.neighbor(l, -1).and_then(|p| quotient((p, l), (l, l)));
        let a_plus = basis.neighbor(l, 1).and_then(|q| quotient((l, l), (q, l)));
        out.push(CommutatorBlockSet {
            point: l,
            labels,
            block,
            a_minus,
            a_plus,
            scale,
        });
    }
    Ok(out)
}

/// Largest entry of `c` joining two different column blocks.
pub fn off_block_residual(c: &SparseMatrix, basis: &TripleBasis) -> f64 {
    c.iter()
        .filter(|&(r, k, _)| basis.subspace_of(r).col != basis.subspace_of(k).col)
        .map(|(_, _, v)| v.norm())
        .fold(0.0, f64::max)
}

/// Normalizes `v` and rotates its phase so the first nonzero entry is real
/// and positive.
fn canonical(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if let Some(first) = v.iter().find(|z| z.norm() > 0.0).copied() {
        let phase = first.conj() / first.norm();
        for z in &mut v {
            *z *= phase / norm;
        }
    }
    v
}

/// Kernel of a block. In the interior this is
/// `Ω ∝ a′₊·e_{l−1,l} − a′₋·e_{l+1,l}`.
pub fn block_kernel(b: &CommutatorBlockSet) -> BlockKernel {
    if b.is_degenerate() {
        return BlockKernel::Whole;
    }
    match (b.a_minus, b.a_plus) {
        (Some(m), Some(p)) => BlockKernel::Line(canonical(vec![p, ZERO, -m])),
        _ => BlockKernel::Trivial,
    }
}

/// Interior block rewritten in adapted frames.
///
/// The right frame is `(v, e_ll, Ω)` with `v ∝ conj(a′₋, 0, a′₊)`, the left
/// frame `(w, e_ll, Ω*)` with `w ∝ (a′₋, 0, a′₊)` and `Ω*` spanning the left
/// kernel. For real samples both frames coincide, so this is a single
/// unitary change of basis. In these frames the block is
/// `[[0, iν, 0], [iν, 0, 0], [0, 0, 0]]`.
#[derive(Clone, Debug)]
pub struct RotatedBlock {
    pub point: usize,
    pub left_frame: DenseMatrix,
    pub right_frame: DenseMatrix,
    pub rotated: DenseMatrix,
    pub nu: f64,
}

impl RotatedBlock {
    /// The 2×2 restriction to `span(v, e_ll)`.
    pub fn effective(&self) -> DenseMatrix {
        self.rotated.view((0, 0), (2, 2)).into_owned()
    }

    /// Largest entry in the third row and column; zero up to rounding.
    pub fn kernel_residual(&self) -> f64 {
        (0..3)
            .flat_map(|k| [self.rotated[(2, k)], self.rotated[(k, 2)]])
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn rotate_block(b: &CommutatorBlockSet) -> Result<RotatedBlock> {
    let (Some(x), Some(y)) = (b.a_minus, b.a_plus) else {
        return Err(Error::BoundaryBlock { point: b.point });
    };
    if b.is_degenerate() {
        return Err(Error::DegenerateBlock { point: b.point });
    }
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let e1 = [ZERO, Complex64::new(1.0, 0.0), ZERO];
    let v = [x.conj() / r, ZERO, y.conj() / r];
    let omega = [y / r, ZERO, -x / r];
    let w = [x / r, ZERO, y / r];
    let omega_left = [y.conj() / r, ZERO, -x.conj() / r];
    let frame = |cols: [[Complex64; 3]; 3]| DenseMatrix::from_fn(3, 3, |i, j| cols[j][i]);
    let right_frame = frame([v, e1, omega]);
    let left_frame = frame([w, e1, omega_left]);
    let rotated = left_frame.adjoint() * &b.block * &right_frame;
    Ok(RotatedBlock {
        point: b.point,
        left_frame,
        right_frame,
        rotated,
        nu: b.scale * r,
    })
}

/// The continuum frame: normalized sums of all backward neighbour vectors
/// `E⁻`, all diagonal vectors `E⁰` and all forward neighbour vectors `E⁺`.
#[derive(Clone, Debug)]
pub struct LimitFrame {
    pub minus: Vec<Complex64>,
    pub zero: Vec<Complex64>,
    pub plus: Vec<Complex64>,
}

pub fn global_limit_frame(basis: &TripleBasis) -> Result<LimitFrame> {
    if !basis.shape().is_periodic() {
        return Err(Error::ShapeUnsupported(basis.shape()));
    }
    let n = basis.n();
    let weight = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut frame = LimitFrame {
        minus: vec![ZERO; basis.total_dim()],
        zero: vec![ZERO; basis.total_dim()],
        plus: vec![ZERO; basis.total_dim()],
    };
    for l in 0..n {
        let prev = basis.neighbor(l, -1).expect("periodic");
        let next = basis.neighbor(l, 1).expect("periodic");
        frame.minus[basis.offset(prev, l).expect("neighbour")] = weight;
        frame.zero[basis.offset(l, l).expect("diagonal")] = weight;
        frame.plus[basis.offset(next, l).expect("neighbour")] = weight;
    }
    Ok(frame)
}

/// Embeds each interior block kernel direction into the full space.
pub fn embedded_block_kernels(
    sets: &[CommutatorBlockSet],
    basis: &TripleBasis,
) -> Vec<Vec<Complex64>> {
    sets.iter()
        .filter_map(|b| match block_kernel(b) {
            BlockKernel::Line(v) => {
                let mut full = vec![ZERO; basis.total_dim()];
                for (k, idx) in basis.column_block(b.point).enumerate() {
                    full[idx] = v[k];
                }
                Some(full)
            }
            _ => None,
        })
        .collect()
}

/// Numerical kernel of the full commutator from its singular vectors.
pub fn commutator_kernel(c: &SparseMatrix, tol: f64) -> Vec<Vec<Complex64>> {
    null_space(&c.to_dense(), tol)
}

/// Serializable summary of one block.
#[derive(Clone, Debug, Serialize)]
pub struct BlockSummary {
    pub l: usize,
    pub a_minus: Option<[f64; 2]>,
    pub a_plus: Option<[f64; 2]>,
    pub nu: f64,
    pub kernel: KernelSummary,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum KernelSummary {
    Vector(Vec<[f64; 2]>),
    Marker(&'static str),
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl From<&CommutatorBlockSet> for BlockSummary {
    fn from(b: &CommutatorBlockSet) -> Self {
        let kernel = match block_kernel(b) {
            BlockKernel::Trivial => KernelSummary::Marker("trivial"),
            BlockKernel::Whole => KernelSummary::Marker("whole"),
            BlockKernel::Line(v) => KernelSummary::Vector(v.into_iter().map(pair).collect()),
        };
        BlockSummary {
            l: b.point,
            a_minus: b.a_minus.map(pair),
            a_plus: b.a_plus.map(pair),
            nu: b.nu(),
            kernel,
        }
    }
}

/// Reference block `i·c·[[0,x,0],[x,0,y],[0,y,0]]`.
pub fn model_block(scale: f64, a_minus: Complex64, a_plus: Complex64) -> DenseMatrix {
    let s = I * scale;
    let mut m = DenseMatrix::zeros(3, 3);
    m[(0, 1)] = s * a_minus;
    m[(1, 0)] = s * a_minus;
    m[(1, 2)] = s * a_plus;
    m[(2, 1)] = s * a_plus;
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::{LatticeTriple, Normalization};
    use crate::linalg::{max_abs_dense, singular_values};
    use crate::qmatrix::Shape;
    use crate::samples::{lattice_spacing, TestFunction};

    fn triple(shape: Shape, n: usize, norm: Normalization) -> LatticeTriple {
        LatticeTriple::new(shape, n, norm).unwrap()
    }

    fn synthetic(scale: f64, x: f64, y: f64) -> CommutatorBlockSet {
        let (x, y) = (Complex64::new(x, 0.0), Complex64::new(y, 0.0));
        CommutatorBlockSet {
            point: 1,
            labels: vec![(0, 1), (1, 1), (2, 1)],
            block: model_block(scale, x, y),
            a_minus: Some(x),
            a_plus: Some(y),
            scale,
        }
    }

    #[test]
    fn constant_commutes() {
        let t = triple(Shape::Circle, 5, Normalization::Unit);
        let c = commutator(
            t.dirac(),
            &AlgebraElement::constant(5, Complex64::new(2.5, -1.0)),
        )
        .unwrap();
        assert_eq!(c.max_abs(), 0.0);
        for b in blocks(&c, t.dirac()).unwrap() {
            assert!(b.is_degenerate());
            assert_eq!(block_kernel(&b), BlockKernel::Whole);
            assert!(matches!(
                rotate_block(&b),
                Err(Error::DegenerateBlock { .. })
            ));
        }
    }

    #[test]
    fn delta_touches_three_columns() {
        let t = triple(Shape::Circle, 5, Normalization::Unit);
        let mut s = vec![0.0; 5];
        s[0] = 1.0;
        let c = commutator(t.dirac(), &AlgebraElement::from_real(&s)).unwrap();
        // Dense oracle.
        let pa = crate::triple::represent(&AlgebraElement::from_real(&s), t.basis()).unwrap();
        let d = t.dirac().matrix().to_dense();
        let dense = &d * pa.to_dense() - pa.to_dense() * &d;
        assert!(max_abs_dense(&(dense - c.to_dense())) < 1e-14);
        let mut cols: Vec<usize> = c
            .iter()
            .filter(|(_, _, v)| v.norm() > 0.0)
            .map(|(r, _, _)| t.basis().subspace_of(r).col)
            .collect();
        cols.sort();
        cols.dedup();
        assert_eq!(cols, vec![0, 1, 4]);
    }

    #[test]
    fn linear_on_segment_gives_unit_quotients() {
        let n = 9;
        let t = triple(Shape::Segment, n, Normalization::Sqrt2Corrected);
        let a = TestFunction::Linear.sample(Shape::Segment, n).unwrap();
        let sets = blocks(&commutator(t.dirac(), &a).unwrap(), t.dirac()).unwrap();
        for b in &sets[1..n - 1] {
            assert!((b.a_minus.unwrap() - 1.0).norm() < 1e-12);
            assert!((b.a_plus.unwrap() - 1.0).norm() < 1e-12);
            assert!(max_abs_dense(&(&b.block - &sets[1].block)) < 1e-12);
        }
        assert_eq!(sets[0].block.nrows(), 2);
        assert!(sets[0].a_minus.is_none());
        assert!(sets[n - 1].a_plus.is_none());
        assert_eq!(block_kernel(&sets[0]), BlockKernel::Trivial);
        assert!(matches!(
            rotate_block(&sets[0]),
            Err(Error::BoundaryBlock { point: 0 })
        ));
    }

    #[test]
    fn sine_quotients_at_origin() {
        let n = 16;
        let dx = lattice_spacing(Shape::Circle, n);
        let t = triple(Shape::Circle, n, Normalization::Unit);
        let a = TestFunction::Sin.sample(Shape::Circle, n).unwrap();
        let sets = blocks(&commutator(t.dirac(), &a).unwrap(), t.dirac()).unwrap();
        let minus = (0f64.sin() - (-dx).sin()) / dx;
        let plus = (dx.sin() - 0.0) / dx;
        assert!((sets[0].a_minus.unwrap().re - minus).abs() < 1e-12);
        assert!((sets[0].a_plus.unwrap().re - plus).abs() < 1e-12);
    }

    #[test]
    fn kernel_examples() {
        let k = block_kernel(&synthetic(1.0, 1.0, 1.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let BlockKernel::Line(v) = k else { panic!() };
        assert!((v[0] - s).norm() < 1e-15 && v[1] == ZERO && (v[2] + s).norm() < 1e-15);

        let BlockKernel::Line(v) = block_kernel(&synthetic(1.0, 1.0, 0.0)) else {
            panic!()
        };
        assert_eq!(v, vec![ZERO, ZERO, Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn rotation_examples() {
        assert!((rotate_block(&synthetic(1.0, 1.0, 1.0)).unwrap().nu - 2f64.sqrt()).abs() < 1e-15);
        let r = rotate_block(&synthetic(1.0, 3.0, 4.0)).unwrap();
        assert!((r.nu - 5.0).abs() < 1e-15);
        assert!((r.effective()[(0, 1)] - Complex64::new(0.0, 5.0)).norm() < 1e-14);
        assert!((r.effective()[(1, 0)] - Complex64::new(0.0, 5.0)).norm() < 1e-14);
        assert!(r.kernel_residual() < 1e-14);
        let b = synthetic(std::f64::consts::FRAC_1_SQRT_2, 1.0, 1.0);
        let r = rotate_block(&b).unwrap();
        assert!((r.nu - 1.0).abs() < 1e-15);
        assert!((singular_values(&b.block)[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_samples_rotate_to_the_same_form() {
        let n = 7;
        let t = triple(Shape::Circle, n, Normalization::Sqrt2Corrected);
        let a = TestFunction::Exp { k: 2.0 }
            .sample(Shape::Circle, n)
            .unwrap();
        let sets = blocks(&commutator(t.dirac(), &a).unwrap(), t.dirac()).unwrap();
        for b in &sets {
            let r = rotate_block(b).unwrap();
            let target = model_block(1.0, Complex64::new(r.nu, 0.0), ZERO);
            let got = r.rotated.clone();
            // [[0, iν, 0], [iν, 0, 0], [0, 0, 0]]
            assert!(max_abs_dense(&(got - target)) < 1e-12);
            let BlockKernel::Line(v) = block_kernel(b) else {
                panic!()
            };
            let bv = &b.block * DenseMatrix::from_column_slice(3, 1, &v);
            assert!(max_abs_dense(&bv) < 1e-12);
            let sv = singular_values(&b.block);
            assert!((sv[0] - r.nu).abs() < 1e-12 && (sv[1] - r.nu).abs() < 1e-12 && sv[2] < 1e-12);
        }
    }

    #[test]
    fn limit_frame() {
        let t = triple(Shape::Circle, 3, Normalization::Unit);
        let f = global_limit_frame(t.basis()).unwrap();
        let w = 1.0 / 3f64.sqrt();
        for l in 0..3 {
            assert!((f.zero[t.basis().offset(l, l).unwrap()].re - w).abs() < 1e-15);
        }
        assert_eq!(crate::linalg::inner(&f.minus, &f.plus), ZERO);
        let g = crate::dirac::FiniteTriple::grading(&t);
        assert_eq!(g.apply(&f.minus), f.minus);
        assert_eq!(g.apply(&f.plus), f.plus);
        assert_eq!(
            g.apply(&f.zero),
            f.zero.iter().map(|z| -z).collect::<Vec<_>>()
        );
        let s = triple(Shape::Segment, 4, Normalization::Unit);
        assert!(matches!(
            global_limit_frame(s.basis()),
            Err(Error::ShapeUnsupported(_))
        ));
    }

    #[test]
    fn full_kernel_dimension_and_chirality() {
        let n = 10;
        let t = triple(Shape::Circle, n, Normalization::Sqrt2Corrected);
        let a = TestFunction::Sin.sample(Shape::Circle, n).unwrap();
        let c = commutator(t.dirac(), &a).unwrap();
        let kernel = commutator_kernel(&c, 1e-9);
        assert_eq!(kernel.len(), n);
        let g = crate::dirac::FiniteTriple::grading(&t);
        for v in &kernel {
            for (z, &s) in v.iter().zip(g.signs()) {
                if s < 0 {
                    assert!(z.norm() < 1e-10);
                }
            }
        }
    }
}
