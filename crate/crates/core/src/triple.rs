//! Hilbert space, grading, real structure and algebra representations.
//!
//! Each nonzero `q_ij` contributes a subspace `H_ij` of dimension `|q_ij|`
//! (always one here). Basis vectors are grouped by column `j`, and inside a
//! column ordered as `H_{j−1,j}, H_{j,j}, H_{j+1,j}`, so the three-dimensional
//! block attached to lattice point `j` is a contiguous index range.

use std::collections::HashMap;
use std::ops::Range;

use num_complex::Complex64;
use rand_chacha::rand_core::RngCore;

use crate::linalg::SparseMatrix;
use crate::qmatrix::{IntersectionMatrix, Shape};
use crate::{Error, Result};

/// One summand `H_ij` of the Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub row: usize,
    pub col: usize,
    pub dim: usize,
    pub offset: usize,
    /// Grading sign, the sign of `q_ij`.
    pub sign: i8,
}

impl Subspace {
    pub fn label(&self) -> (usize, usize) {
        (self.row, self.col)
    }
}

#[derive(Clone, Debug)]
pub struct TripleBasis {
    q: IntersectionMatrix,
    subspaces: Vec<Subspace>,
    total_dim: usize,
    lookup: HashMap<(usize, usize), usize>,
    columns: Vec<Range<usize>>,
}

impl TripleBasis {
    pub fn q(&self) -> &IntersectionMatrix {
        &self.q
    }

    pub fn shape(&self) -> Shape {
        self.q.shape()
    }

    /// Number of lattice points.
    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn subspace(&self, row: usize, col: usize) -> Option<&Subspace> {
        self.lookup.get(&(row, col)).map(|&k| &self.subspaces[k])
    }

    /// First basis index of `H_ij`.
    pub fn offset(&self, row: usize, col: usize) -> Option<usize> {
        self.subspace(row, col).map(|s| s.offset)
    }

    /// Subspace containing basis index `idx`.
    pub fn subspace_of(&self, idx: usize) -> &Subspace {
        let k = self.subspaces.partition_point(|s| s.offset + s.dim <= idx);
        &self.subspaces[k]
    }

    /// Index range of the column block `H_{l−1,l} ⊕ H_{l,l} ⊕ H_{l+1,l}`.
    pub fn column_block(&self, l: usize) -> Range<usize> {
        self.columns[l].clone()
    }

    /// Lattice neighbour of `l` in direction `step` (±1), wrapping on the circle.
    pub fn neighbor(&self, l: usize, step: isize) -> Option<usize> {
        let n = self.n() as isize;
        let m = l as isize + step;
        if self.shape().is_periodic() {
            Some(m.rem_euclid(n) as usize)
        } else if (0..n).contains(&m) {
            Some(m as usize)
        } else {
            None
        }
    }

    /// Whether `l` has both neighbours.
    pub fn is_interior(&self, l: usize) -> bool {
        self.neighbor(l, -1).is_some() && self.neighbor(l, 1).is_some()
    }
}

pub fn build_basis(q: &IntersectionMatrix) -> TripleBasis {
    let n = q.n();
    let mut subspaces = Vec::new();
    let mut lookup = HashMap::new();
    let mut columns = Vec::with_capacity(n);
    let mut offset = 0;
    for j in 0..n {
        let start = offset;
        // Rows j−1, j, j+1 in that order; on the circle the wrapped
        // neighbours are the corner entries.
        let mut rows: Vec<usize> = Vec::with_capacity(3);
        for step in [-1isize, 0, 1] {
            let i = j as isize + step;
            let i = if q.shape().is_periodic() {
                i.rem_euclid(n as isize) as usize
            } else if (0..n as isize).contains(&i) {
                i as usize
            } else {
                continue;
            };
            if !rows.contains(&i) && q.get(i, j) != 0 {
                rows.push(i);
            }
        }
        for i in rows {
            let v = q.get(i, j);
            let dim = v.unsigned_abs() as usize;
            lookup.insert((i, j), subspaces.len());
            subspaces.push(Subspace {
                row: i,
                col: j,
                dim,
                offset,
                sign: v.signum() as i8,
            });
            offset += dim;
        }
        columns.push(start..offset);
    }
    debug_assert_eq!(lookup.len(), q.nonzero().count());
    TripleBasis {
        q: q.clone(),
        subspaces,
        total_dim: offset,
        lookup,
        columns,
    }
}

/// Chirality operator γ, diagonal with entries ±1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    signs: Vec<i8>,
}

impl Grading {
    pub fn from_signs(signs: Vec<i8>) -> Self {
        assert!(signs.iter().all(|&s| s == 1 || s == -1));
        Self { signs }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn trace(&self) -> i64 {
        self.signs.iter().map(|&s| s as i64).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.signs
            .iter()
            .map(|&s| Complex64::new(s as f64, 0.0))
            .collect()
    }

    pub fn to_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_diagonal(&self.diagonal())
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        v.iter()
            .zip(&self.signs)
            .map(|(z, &s)| z * s as f64)
            .collect()
    }

    /// `γ₁ ⊗ γ₂`, factor-major.
    pub fn tensor(&self, other: &Grading) -> Grading {
        let signs = self
            .signs
            .iter()
            .flat_map(|&a| other.signs.iter().map(move |&b| a * b))
            .collect();
        Grading { signs }
    }
}

pub fn grading(basis: &TripleBasis) -> Grading {
    let signs = basis
        .subspaces()
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.sign, s.dim))
        .collect();
    Grading { signs }
}

/// Antilinear involution `J = P ∘ K`: a basis permutation `P` composed with
/// complex conjugation `K` of coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealStructure {
    pairing: Vec<usize>,
}

impl RealStructure {
    pub fn from_pairing(pairing: Vec<usize>) -> Self {
        Self { pairing }
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn dim(&self) -> usize {
        self.pairing.len()
    }

    pub fn is_involution(&self) -> bool {
        self.pairing
            .iter()
            .enumerate()
            .all(|(i, &p)| self.pairing.get(p) == Some(&i))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (i, z) in v.iter().enumerate() {
            out[self.pairing[i]] = z.conj();
        }
        out
    }

    /// The linear operator `J A J⁻¹ = P Ā Pᵀ`.
    pub fn conjugate(&self, a: &SparseMatrix) -> SparseMatrix {
        a.conj().permuted(&self.pairing)
    }

    /// `J diag(d) J⁻¹` as a diagonal.
    pub fn conjugate_diagonal(&self, d: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); d.len()];
        for (i, z) in d.iter().enumerate() {
            out[self.pairing[i]] = z.conj();
        }
        out
    }

    /// `J₁ ⊗ J₂`, factor-major.
    pub fn tensor(&self, other: &RealStructure) -> RealStructure {
        let d2 = other.dim();
        let pairing = self
            .pairing
            .iter()
            .flat_map(|&p1| other.pairing.iter().map(move |&p2| p1 * d2 + p2))
            .collect();
        RealStructure { pairing }
    }
}

pub fn real_structure(basis: &TripleBasis) -> RealStructure {
    let mut pairing = vec![0; basis.total_dim()];
    for s in basis.subspaces() {
        let partner = basis
            .subspace(s.col, s.row)
            .expect("intersection matrix is symmetric");
        for k in 0..s.dim {
            pairing[s.offset + k] = partner.offset + k;
        }
    }
    RealStructure { pairing }
}

/// A function on the lattice, `a_l = a(x_l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    samples: Vec<Complex64>,
}

impl AlgebraElement {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Self { samples }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(n: usize, value: Complex64) -> Self {
        Self::new(vec![value; n])
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Complex64::new(1.0, 0.0))
    }

    /// Components uniform in `[−1, 1)`, real and imaginary parts independent.
    pub fn random<R: RngCore>(n: usize, rng: &mut R) -> Self {
        let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
        Self::new((0..n).map(|_| Complex64::new(unit(), unit())).collect())
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.samples.iter().map(Complex64::conj).collect())
    }

    pub fn pointwise_mul(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self::new(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }
}

fn check_len(a: &AlgebraElement, basis: &TripleBasis) -> Result<()> {
    if a.len() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            found: a.len(),
        });
    }
    Ok(())
}

/// Diagonal of π(a): `a_i` on `H_ij`.
pub fn left_diagonal(a: &AlgebraElement, basis: &TripleBasis) -> Result<Vec<Complex64>> {
    check_len(a, basis)?;
    Ok(basis
        .subspaces()
        .iter()
        .flat_map(|s| std::iter::repeat_n(a.samples[s.row], s.dim))
        .collect())
}

/// Diagonal of π°(a): `a_j` on `H_ij`.
pub fn right_diagonal(a: &AlgebraElement, basis: &TripleBasis) -> Result<Vec<Complex64>> {
    check_len(a, basis)?;
    Ok(basis
        .subspaces()
        .iter()
        .flat_map(|s| std::iter::repeat_n(a.samples[s.col], s.dim))
        .collect())
}

pub fn represent(a: &AlgebraElement, basis: &TripleBasis) -> Result<SparseMatrix> {
    Ok(SparseMatrix::from_diagonal(&left_diagonal(a, basis)?))
}

/// Opposite representation, read off the column index. Equals
/// `J π(ā) J⁻¹`; on each column block it is the scalar `a_l`.
pub fn represent_opposite(a: &AlgebraElement, basis: &TripleBasis) -> Result<SparseMatrix> {
    Ok(SparseMatrix::from_diagonal(&right_diagonal(a, basis)?))
}

#[cfg(test)]
mod tests {
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::linalg::inner;
    use crate::qmatrix::build_q;

    fn basis(shape: Shape, n: usize) -> TripleBasis {
        build_basis(&build_q(shape, n).unwrap())
    }

    #[test]
    fn dimensions() {
        assert_eq!(basis(Shape::Circle, 5).total_dim(), 15);
        assert_eq!(basis(Shape::Segment, 3).total_dim(), 7);
        for n in 3..20 {
            assert_eq!(basis(Shape::Circle, n).total_dim(), 3 * n);
            assert_eq!(basis(Shape::Segment, n).total_dim(), 3 * n - 2);
        }
    }

    #[test]
    fn every_entry_once_and_symmetric() {
        for (shape, n) in [(Shape::Circle, 3), (Shape::Circle, 7), (Shape::Segment, 6)] {
            let b = basis(shape, n);
            assert_eq!(b.subspaces().len(), b.q().nonzero().count());
            for s in b.subspaces() {
                let t = b.subspace(s.col, s.row).unwrap();
                assert_eq!(s.dim, t.dim);
                assert_eq!(s.sign as i64, b.q().get(s.row, s.col).signum());
            }
        }
    }

    #[test]
    fn column_blocks_are_contiguous() {
        let b = basis(Shape::Circle, 5);
        for l in 0..5 {
            let r = b.column_block(l);
            assert_eq!(r.len(), 3);
            let labels: Vec<_> = r.map(|k| b.subspace_of(k).label()).collect();
            assert_eq!(labels, vec![((l + 4) % 5, l), (l, l), ((l + 1) % 5, l)]);
        }
        let s = basis(Shape::Segment, 4);
        assert_eq!(s.column_block(0).len(), 2);
        assert_eq!(s.column_block(3).len(), 2);
        assert_eq!(s.column_block(1).len(), 3);
    }

    #[test]
    fn chirality_counts() {
        let b = basis(Shape::Circle, 6);
        let g = grading(&b);
        assert_eq!(g.dim(), 18);
        assert_eq!(g.signs().iter().filter(|&&s| s == 1).count(), 12);
        assert_eq!(g.signs().iter().filter(|&&s| s == -1).count(), 6);
        for n in 3..12 {
            assert_eq!(grading(&basis(Shape::Circle, n)).trace(), n as i64);
        }
        let off = b.offset(2, 2).unwrap();
        assert_eq!(g.signs()[off], -1);
        assert_eq!(g.signs()[b.offset(1, 2).unwrap()], 1);
        assert_eq!(g.signs()[b.offset(3, 2).unwrap()], 1);
    }

    #[test]
    fn real_structure_swaps_labels() {
        let b = basis(Shape::Circle, 5);
        let j = real_structure(&b);
        assert!(j.is_involution());
        let e12 = b.offset(1, 2).unwrap();
        let e21 = b.offset(2, 1).unwrap();
        assert_eq!(j.pairing()[e12], e21);

        let c = Complex64::new(0.3, -1.7);
        let mut v = vec![Complex64::new(0.0, 0.0); b.total_dim()];
        v[e12] = c;
        let w = j.apply(&v);
        assert_eq!(w[e21], c.conj());
        assert_eq!(w.iter().filter(|z| z.norm() != 0.0).count(), 1);
    }

    #[test]
    fn j_is_antiunitary_involution_commuting_with_grading() {
        let b = basis(Shape::Circle, 7);
        let j = real_structure(&b);
        let g = grading(&b);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = AlgebraElement::random(b.total_dim(), &mut rng);
        let v = AlgebraElement::random(b.total_dim(), &mut rng);
        let (u, v) = (u.samples(), v.samples());
        assert_eq!(j.apply(&j.apply(u)), u);
        let lhs = inner(&j.apply(u), &j.apply(v));
        assert!((lhs - inner(u, v).conj()).norm() < 1e-12);
        assert_eq!(j.apply(&g.apply(u)), g.apply(&j.apply(u)));
    }

    #[test]
    fn representations() {
        let b = basis(Shape::Circle, 4);
        let one = AlgebraElement::one(4);
        assert_eq!(represent(&one, &b).unwrap(), SparseMatrix::identity(12));
        assert_eq!(
            represent_opposite(&one, &b).unwrap(),
            SparseMatrix::identity(12)
        );

        let a = AlgebraElement::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let pa = represent(&a, &b).unwrap();
        let k = b.offset(0, 1).unwrap();
        assert_eq!(pa.get(k, k).re, 1.0);

        let pa_op = represent_opposite(&a, &b).unwrap();
        for l in 0..4 {
            for k in b.column_block(l) {
                assert_eq!(pa_op.get(k, k).re, a.samples()[l].re);
            }
        }
        assert!(matches!(
            represent(&AlgebraElement::one(3), &b),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn algebra_and_opposite() {
        let b = basis(Shape::Segment, 5);
        let j = real_structure(&b);
        let g = grading(&b).to_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..4 {
            let a = AlgebraElement::random(5, &mut rng);
            let c = AlgebraElement::random(5, &mut rng);
            let pa = represent(&a, &b).unwrap();
            let pc = represent(&c, &b).unwrap();
            assert_eq!(pa.matmul(&pc), represent(&a.pointwise_mul(&c), &b).unwrap());
            let op = represent_opposite(&c, &b).unwrap();
            assert_eq!(pa.commutator(&op).max_abs(), 0.0);
            assert_eq!(g.commutator(&pa).max_abs(), 0.0);
            assert_eq!(g.commutator(&op).max_abs(), 0.0);
            assert_eq!(
                j.conjugate(&represent(&a.conj(), &b).unwrap()),
                represent_opposite(&a, &b).unwrap()
            );
        }
    }
}
