//! Products of two lattice triples.
//!
//! Hilbert space, grading and real structure multiply factorwise
//! (`γ₂ = γ⊗γ`, `J₂ = J⊗J`, even case, no extra sign) and the Dirac operator
//! is `D₂ = D⊗1 + γ⊗D`, so `D₂²` = `D²⊗1 + 1⊗D²`. Basis indices are
//! factor-major: `i₁·d₂ + i₂`.
//!
//! The commutator with `a⊗b` obeys
//! `[D₂, a⊗b] = [D,a]⊗b + γa⊗[D,b]`. Projected onto the continuum frame
//! `{(e_{l−1,l} + e_{l+1,l})/√2, e_{l,l}}` of each factor, `γ` becomes `σ₃`
//! and each one-dimensional block becomes a multiple of `σ₁`, so the two terms
//! tend to `i·a′b·σ₁⊗1` and `i·ab′·σ₃⊗σ₁`, which anticommute.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::commutator;
use crate::dirac::{
    validate_axioms, AxiomReport, FiniteTriple, LatticeTriple, Normalization, AXIOM_TOLERANCE,
    PRODUCT_AXIOM_TOLERANCE,
};
use crate::linalg::{dense_kron, singular_values, DenseMatrix, SparseMatrix};
use crate::qmatrix::Shape;
use crate::samples::{lattice_spacing, positions, TestFunction};
use crate::triple::{left_diagonal, AlgebraElement, Grading, RealStructure};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct ProductTriple {
    left: LatticeTriple,
    right: LatticeTriple,
    grading: Grading,
    real: RealStructure,
    dirac: SparseMatrix,
    report: AxiomReport,
}

impl ProductTriple {
    pub fn left(&self) -> &LatticeTriple {
        &self.left
    }

    pub fn right(&self) -> &LatticeTriple {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }

    /// Axiom report computed at construction.
    pub fn report(&self) -> &AxiomReport {
        &self.report
    }

    fn diagonal(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<Vec<Complex64>> {
        let da = left_diagonal(a, self.left.basis())?;
        let db = left_diagonal(b, self.right.basis())?;
        Ok(da
            .iter()
            .flat_map(|x| db.iter().map(move |y| x * y))
            .collect())
    }
}

impl FiniteTriple for ProductTriple {
    fn grading(&self) -> &Grading {
        &self.grading
    }

    fn real_structure(&self) -> &RealStructure {
        &self.real
    }

    fn dirac_matrix(&self) -> &SparseMatrix {
        &self.dirac
    }

    fn random_representation(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let a = AlgebraElement::random(self.left.n(), rng);
        let b = AlgebraElement::random(self.right.n(), rng);
        self.diagonal(&a, &b).expect("sample lengths match factors")
    }
}

fn require_axioms(report: &AxiomReport) -> Result<()> {
    match report.first_failure() {
        Some(c) => Err(Error::AxiomFailure {
            check: c.check_name.clone(),
            residual: c.max_residual,
        }),
        None => Ok(()),
    }
}

/// Forms the product triple and checks its axioms at
/// [`PRODUCT_AXIOM_TOLERANCE`].
pub fn tensor_triple(
    left: LatticeTriple,
    right: LatticeTriple,
    seed: u64,
) -> Result<ProductTriple> {
    require_axioms(&validate_axioms(&left, seed, AXIOM_TOLERANCE))?;
    require_axioms(&validate_axioms(&right, seed, AXIOM_TOLERANCE))?;
    let d1 = left.dirac().matrix();
    let d2 = right.dirac().matrix();
    let g1 = left.grading().to_matrix();
    let dirac = d1
        .kron(&SparseMatrix::identity(right.dim()))
        .add(&g1.kron(d2));
    let grading = left.grading().tensor(right.grading());
    let real = left.real_structure().tensor(right.real_structure());
    let mut product = ProductTriple {
        left,
        right,
        grading,
        real,
        dirac,
        report: AxiomReport {
            tolerance: PRODUCT_AXIOM_TOLERANCE,
            checks: Vec::new(),
        },
    };
    product.report = validate_axioms(&product, seed, PRODUCT_AXIOM_TOLERANCE);
    require_axioms(&product.report)?;
    Ok(product)
}

/// `[D₂, π(a)⊗π(b)]`, computed directly from `D₂`.
pub fn product_commutator(
    p: &ProductTriple,
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<SparseMatrix> {
    Ok(p.dirac.commutator_with_diagonal(&p.diagonal(a, b)?))
}

/// `[D,π(a)]⊗π(b) + γπ(a)⊗[D,π(b)]`, assembled from the factors.
pub fn leibniz_expansion(
    p: &ProductTriple,
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<SparseMatrix> {
    let ca = commutator(p.left.dirac(), a)?;
    let cb = commutator(p.right.dirac(), b)?;
    let pa = left_diagonal(a, p.left.basis())?;
    let pb = SparseMatrix::from_diagonal(&left_diagonal(b, p.right.basis())?);
    let gamma_a = p.left.grading().to_matrix().mul_diag_right(&pa);
    Ok(ca.kron(&pb).add(&gamma_a.kron(&cb)))
}

/// Largest entrywise difference between the direct commutator and its
/// Leibniz expansion.
pub fn leibniz_residual(p: &ProductTriple, a: &AlgebraElement, b: &AlgebraElement) -> Result<f64> {
    Ok(product_commutator(p, a, b)?
        .sub(&leibniz_expansion(p, a, b)?)
        .max_abs())
}

/// Coefficients of a 4×4 block against `σ₁⊗1` and `σ₃⊗σ₁`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SigmaDecomposition {
    /// Coefficient of `σ₁⊗1`; tends to `i·a′·b`.
    pub x: [f64; 2],
    /// Coefficient of `σ₃⊗σ₁`; tends to `i·a·b′`.
    pub y: [f64; 2],
    /// Frobenius norm of what the two terms leave over.
    pub residual: f64,
}

/// One point pair `(l, m)` projected onto the continuum frames.
#[derive(Clone, Debug)]
pub struct ProjectedBlock {
    pub l: usize,
    pub m: usize,
    /// Projection of the directly computed 9×9 commutator block.
    pub matrix: DenseMatrix,
    /// Projection of `[D,a]⊗b`.
    pub g1: DenseMatrix,
    /// Projection of `γa⊗[D,b]`.
    pub g2: DenseMatrix,
    pub anticommutator_norm: f64,
    pub top_singular_value: f64,
    pub decomposition: SigmaDecomposition,
}

fn pauli(k: usize) -> DenseMatrix {
    let (o, one, i) = (ZERO, Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    let e = match k {
        0 => [one, o, o, one],
        1 => [o, one, one, o],
        2 => [o, -i, i, o],
        3 => [one, o, o, -one],
        _ => unreachable!("pauli index"),
    };
    DenseMatrix::from_row_slice(2, 2, &e)
}

/// Operator 2-norm.
fn op_norm(m: &DenseMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

fn decompose(m: &DenseMatrix) -> SigmaDecomposition {
    let sx = dense_kron(&pauli(1), &pauli(0));
    let sy = dense_kron(&pauli(3), &pauli(1));
    // Pauli products are hermitian with Tr(σσ) = 4.
    let coeff = |s: &DenseMatrix| (s * m).trace() / 4.0;
    let (x, y) = (coeff(&sx), coeff(&sy));
    let rest = m - sx * x - sy * y;
    SigmaDecomposition {
        x: [x.re, x.im],
        y: [y.re, y.im],
        residual: rest.norm(),
    }
}

/// The 3×2 continuum frame of one interior column block.
fn continuum_frame() -> DenseMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let one = Complex64::new(1.0, 0.0);
    DenseMatrix::from_row_slice(3, 2, &[s, ZERO, ZERO, one, s, ZERO])
}

/// Projects every 9×9 point-pair block of `[D₂, π(a)⊗π(b)]` onto the tensor
/// product of the factor continuum frames. Both factors must be circles.
pub fn limit_frame_2d(
    p: &ProductTriple,
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<Vec<ProjectedBlock>> {
    for t in [&p.left, &p.right] {
        if t.shape() != Shape::Circle {
            return Err(Error::ShapeUnsupported(t.shape()));
        }
    }
    let full = product_commutator(p, a, b)?;
    let ca = commutator(p.left.dirac(), a)?;
    let cb = commutator(p.right.dirac(), b)?;
    let pa = left_diagonal(a, p.left.basis())?;
    let pb = left_diagonal(b, p.right.basis())?;
    let gamma = p.left.grading().signs();

    let frame = continuum_frame();
    let frame2 = dense_kron(&frame, &frame);
    let frame2_adj = frame2.adjoint();
    let project = |m: &DenseMatrix| &frame2_adj * m * &frame2;

    let d2 = p.right.dim();
    let mut out = Vec::with_capacity(p.left.n() * p.right.n());
    for l in 0..p.left.n() {
        let rows_l: Vec<usize> = p.left.basis().column_block(l).collect();
        let block_a = ca.submatrix(&rows_l);
        let gamma_a = DenseMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            rows_l.len(),
            rows_l.iter().map(|&k| pa[k] * gamma[k] as f64),
        ));
        for m in 0..p.right.n() {
            let rows_m: Vec<usize> = p.right.basis().column_block(m).collect();
            let block_b = cb.submatrix(&rows_m);
            if block_a.iter().all(|z| *z == ZERO) && block_b.iter().all(|z| *z == ZERO) {
                return Err(Error::DegeneratePair { l, m });
            }
            let diag_b = DenseMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                rows_m.len(),
                rows_m.iter().map(|&k| pb[k]),
            ));
            let idx: Vec<usize> = rows_l
                .iter()
                .flat_map(|&i| rows_m.iter().map(move |&j| i * d2 + j))
                .collect();
            let matrix = project(&full.submatrix(&idx));
            let g1 = project(&dense_kron(&block_a, &diag_b));
            let g2 = project(&dense_kron(&gamma_a, &block_b));
            let anticommutator_norm = op_norm(&(&g1 * &g2 + &g2 * &g1));
            out.push(ProjectedBlock {
                l,
                m,
                top_singular_value: op_norm(&matrix),
                decomposition: decompose(&matrix),
                matrix,
                g1,
                g2,
                anticommutator_norm,
            });
        }
    }
    Ok(out)
}

/// Continuum value of the top singular value of `i(a′b·σ₁⊗1 + ab′·σ₃⊗σ₁)`:
/// `√(|α|² + |β|² + 2|Im(ᾱβ)|)` with `α = a′b`, `β = ab′`. For real functions
/// and plane waves this is `√(|a′|²|b|² + |a|²|b′|²)`.
pub fn continuum_top_singular_value(
    fx: &TestFunction,
    fy: &TestFunction,
    x: f64,
    y: f64,
) -> Option<f64> {
    let alpha = fx.derivative(x)? * fy.value(y)?;
    let beta = fx.value(x)? * fy.derivative(y)?;
    Some((alpha.norm_sqr() + beta.norm_sqr() + 2.0 * (alpha.conj() * beta).im.abs()).sqrt())
}

/// One row of a product convergence study.
#[derive(Clone, Debug, Serialize)]
pub struct LimitRow {
    pub n: usize,
    pub dx: f64,
    /// Top singular value of the projected block at the origin `(0, 0)`.
    pub top_sv_origin: f64,
    pub reference_origin: f64,
    /// Largest `|top_sv − reference|` over all point pairs.
    pub max_sv_error: f64,
    /// Largest `‖G₁G₂ + G₂G₁‖` over all point pairs.
    pub anticomm_norm: f64,
    pub leibniz_residual: f64,
}

/// Circle ⊗ circle study of the projected blocks for each `n` per factor.
pub fn limit_study(
    fx: &TestFunction,
    fy: &TestFunction,
    n_list: &[usize],
    normalization: Normalization,
    seed: u64,
) -> Result<Vec<LimitRow>> {
    let row = |&n: &usize| -> Result<LimitRow> {
        let left = LatticeTriple::new(Shape::Circle, n, normalization)?;
        let right = LatticeTriple::new(Shape::Circle, n, normalization)?;
        let p = tensor_triple(left, right, seed)?;
        let a = fx.sample(Shape::Circle, n)?;
        let b = fy.sample(Shape::Circle, n)?;
        let blocks = limit_frame_2d(&p, &a, &b)?;
        let xs = positions(Shape::Circle, n);
        // The Sqrt2Corrected scale is the one whose limit is the plain Dirac
        // operator; other scales multiply it by c·√2.
        let scale = normalization.factor() * std::f64::consts::SQRT_2;
        let mut max_err: f64 = 0.0;
        let mut reference_origin = f64::NAN;
        for blk in &blocks {
            let reference = continuum_top_singular_value(fx, fy, xs[blk.l], xs[blk.m])
                .map(|r| r * scale)
                .ok_or_else(|| {
                    Error::InvalidArgument("limit study needs analytic functions".into())
                })?;
            if blk.l == 0 && blk.m == 0 {
                reference_origin = reference;
            }
            max_err = max_err.max((blk.top_singular_value - reference).abs());
        }
        Ok(LimitRow {
            n,
            dx: lattice_spacing(Shape::Circle, n),
            top_sv_origin: blocks[0].top_singular_value,
            reference_origin,
            max_sv_error: max_err,
            anticomm_norm: blocks
                .iter()
                .map(|b| b.anticommutator_norm)
                .fold(0.0, f64::max),
            leibniz_residual: leibniz_residual(&p, &a, &b)?,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        n_list.par_iter().map(row).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        n_list.iter().map(row).collect()
    }
}
