//! Dirac operators on the lattice triples and the axiom checks.
//!
//! A Dirac operator is fixed by couplings `m_{ij,kl}`, the matrix element
//! between `H_kl` (column) and `H_ij` (row). Admissible couplings
//!
//! * join subspaces sharing a row (`i = k`) or a column (`j = l`),
//! * join subspaces of opposite grading,
//! * satisfy `m_{ij,kl} = conj(m_{kl,ij})` (self-adjointness) and
//!   `m_{ij,kl} = conj(m_{ji,lk})` (commutation with `J`).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::SparseMatrix;
use crate::qmatrix::{build_q, Shape};
use crate::samples::lattice_spacing;
use crate::triple::{
    build_basis, grading, left_diagonal, real_structure, AlgebraElement, Grading, RealStructure,
    TripleBasis,
};
use crate::{Error, Result};

/// Residual bound for the axioms of a lattice triple.
pub const AXIOM_TOLERANCE: f64 = 1e-12;
/// Residual bound for the axioms of a product triple.
pub const PRODUCT_AXIOM_TOLERANCE: f64 = 1e-10;
/// Number of pseudorandom algebra elements fed to each axiom check.
pub const AXIOM_SAMPLES: usize = 8;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Overall scale `c` of the nearest-neighbour couplings `i·c/Δx`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[cfg_attr(feature = "cli", derive(clap::ValueEnum))]
pub enum Normalization {
    /// `c = 1/√2`: the rotated block value tends to `|a′|`.
    #[default]
    #[serde(rename = "sqrt2")]
    #[cfg_attr(feature = "cli", value(name = "sqrt2"))]
    Sqrt2Corrected,
    /// `c = 1`: the rotated block value tends to `√2·|a′|`.
    #[serde(rename = "unit")]
    #[cfg_attr(feature = "cli", value(name = "unit"))]
    Unit,
}

impl Normalization {
    pub fn factor(self) -> f64 {
        match self {
            Normalization::Sqrt2Corrected => std::f64::consts::FRAC_1_SQRT_2,
            Normalization::Unit => 1.0,
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Sqrt2Corrected => "sqrt2",
            Normalization::Unit => "unit",
        })
    }
}

pub type Label = (usize, usize);

fn transpose((i, j): Label) -> Label {
    (j, i)
}

/// Coupling map `((i,j), (k,l)) → m_{ij,kl}` together with the lattice scale
/// it was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct Couplings {
    entries: BTreeMap<(Label, Label), Complex64>,
    spacing: f64,
    normalization: Normalization,
}

impl Couplings {
    pub fn new(spacing: f64, normalization: Normalization) -> Self {
        Self {
            entries: BTreeMap::new(),
            spacing,
            normalization,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn get(&self, row: Label, col: Label) -> Option<Complex64> {
        self.entries.get(&(row, col)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, Label, Complex64)> + '_ {
        self.entries.iter().map(|(&(r, c), &m)| (r, c, m))
    }

    /// Sets a single entry with no symmetry closure.
    pub fn insert(&mut self, row: Label, col: Label, m: Complex64) {
        self.entries.insert((row, col), m);
    }

    pub fn remove(&mut self, row: Label, col: Label) -> Option<Complex64> {
        self.entries.remove(&(row, col))
    }

    /// Sets `m_{row,col}` and the three entries forced by the symmetries.
    pub fn insert_closed(&mut self, row: Label, col: Label, m: Complex64) {
        self.insert(row, col, m);
        self.insert(col, row, m.conj());
        self.insert(transpose(row), transpose(col), m.conj());
        self.insert(transpose(col), transpose(row), m);
    }
}

/// Nearest-neighbour couplings `m_{l−1 l, ll} = m_{ll, l+1 l} = i·c/Δx`, closed
/// under both symmetries. Column couplings generate row couplings through the
/// reality condition, giving four couplings per interior point.
pub fn default_couplings(
    basis: &TripleBasis,
    spacing: f64,
    normalization: Normalization,
) -> Couplings {
    let m = Complex64::new(0.0, normalization.factor() / spacing);
    let mut out = Couplings::new(spacing, normalization);
    for l in 0..basis.n() {
        if let Some(prev) = basis.neighbor(l, -1) {
            out.insert_closed((prev, l), (l, l), m);
        }
        if let Some(next) = basis.neighbor(l, 1) {
            out.insert_closed((l, l), (next, l), m);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct DiracOperator {
    basis: TripleBasis,
    matrix: SparseMatrix,
    couplings: Couplings,
}

impl DiracOperator {
    pub fn basis(&self) -> &TripleBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn couplings(&self) -> &Couplings {
        &self.couplings
    }

    pub fn spacing(&self) -> f64 {
        self.couplings.spacing
    }

    pub fn normalization(&self) -> Normalization {
        self.couplings.normalization
    }

    /// The zero operator on `basis`.
    pub fn zero(basis: &TripleBasis) -> Self {
        let spacing = lattice_spacing(basis.shape(), basis.n());
        Self {
            basis: basis.clone(),
            matrix: SparseMatrix::zeros(basis.total_dim()),
            couplings: Couplings::new(spacing, Normalization::default()),
        }
    }

    /// Assembles the matrix without checking the coupling constraints. Only
    /// the subspace labels are validated.
    pub fn assemble_unchecked(basis: &TripleBasis, couplings: Couplings) -> Result<Self> {
        let mut matrix = SparseMatrix::zeros(basis.total_dim());
        for (row, col, m) in couplings.iter() {
            let r = basis
                .offset(row.0, row.1)
                .ok_or(Error::UnknownSubspace(row))?;
            let c = basis
                .offset(col.0, col.1)
                .ok_or(Error::UnknownSubspace(col))?;
            matrix.set(r, c, m);
        }
        Ok(Self {
            basis: basis.clone(),
            matrix,
            couplings,
        })
    }
}

/// Checks every coupling against the three constraint classes.
pub fn check_couplings(basis: &TripleBasis, couplings: &Couplings) -> Result<()> {
    for (from, to, m) in couplings.iter() {
        if m == Complex64::new(0.0, 0.0) {
            continue;
        }
        let a = basis
            .subspace(from.0, from.1)
            .ok_or(Error::UnknownSubspace(from))?;
        let b = basis
            .subspace(to.0, to.1)
            .ok_or(Error::UnknownSubspace(to))?;
        if from.0 != to.0 && from.1 != to.1 {
            return Err(Error::PatternViolation { from, to });
        }
        if a.sign == b.sign {
            return Err(Error::ChiralityViolation { from, to });
        }
        let zero = Complex64::new(0.0, 0.0);
        let partners = [
            ("hermitian", (to, from)),
            ("reality", (transpose(from), transpose(to))),
        ];
        for (partner, (r, c)) in partners {
            let mismatch = (couplings.get(r, c).unwrap_or(zero) - m.conj()).norm();
            if mismatch > SYMMETRY_TOLERANCE {
                return Err(Error::SymmetryViolation {
                    from,
                    to,
                    partner,
                    mismatch,
                });
            }
        }
    }
    Ok(())
}

pub fn build_dirac(basis: &TripleBasis, couplings: Couplings) -> Result<DiracOperator> {
    check_couplings(basis, &couplings)?;
    DiracOperator::assemble_unchecked(basis, couplings)
}

/// Reads couplings from lines `i,j,k,l,re,im` meaning `m_{ij,kl} = re + i·im`.
pub fn parse_couplings(
    text: &str,
    origin: &str,
    spacing: f64,
    normalization: Normalization,
) -> Result<Couplings> {
    let mut out = Couplings::new(spacing, normalization);
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: origin.to_string(),
            line: k + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(err(format!(
                "expected 6 fields `i,j,k,l,re,im`, got {}",
                fields.len()
            )));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| err(format!("index `{s}`: {e}")))
        };
        let val = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| err(format!("value `{s}`: {e}")))
        };
        out.insert(
            (idx(fields[0])?, idx(fields[1])?),
            (idx(fields[2])?, idx(fields[3])?),
            Complex64::new(val(fields[4])?, val(fields[5])?),
        );
    }
    Ok(out)
}

/// A finite even real triple whose algebra acts diagonally.
pub trait FiniteTriple {
    fn grading(&self) -> &Grading;
    fn real_structure(&self) -> &RealStructure;
    fn dirac_matrix(&self) -> &SparseMatrix;
    /// Diagonal of `π(a)` for a pseudorandom algebra element `a`.
    fn random_representation(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64>;
}

/// A lattice triple: basis, grading, real structure and Dirac operator.
#[derive(Clone, Debug)]
pub struct LatticeTriple {
    grading: Grading,
    real: RealStructure,
    dirac: DiracOperator,
}

impl LatticeTriple {
    /// Lattice triple with the default nearest-neighbour Dirac operator.
    pub fn new(shape: Shape, n: usize, normalization: Normalization) -> Result<Self> {
        let basis = build_basis(&build_q(shape, n)?);
        let couplings = default_couplings(&basis, lattice_spacing(shape, n), normalization);
        Ok(Self::with_dirac(build_dirac(&basis, couplings)?))
    }

    pub fn with_dirac(dirac: DiracOperator) -> Self {
        let basis = dirac.basis();
        Self {
            grading: grading(basis),
            real: real_structure(basis),
            dirac,
        }
    }

    pub fn basis(&self) -> &TripleBasis {
        self.dirac.basis()
    }

    pub fn dirac(&self) -> &DiracOperator {
        &self.dirac
    }

    pub fn shape(&self) -> Shape {
        self.basis().shape()
    }

    pub fn n(&self) -> usize {
        self.basis().n()
    }

    pub fn dim(&self) -> usize {
        self.basis().total_dim()
    }
}

impl FiniteTriple for LatticeTriple {
    fn grading(&self) -> &Grading {
        &self.grading
    }

    fn real_structure(&self) -> &RealStructure {
        &self.real
    }

    fn dirac_matrix(&self) -> &SparseMatrix {
        self.dirac.matrix()
    }

    fn random_representation(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let a = AlgebraElement::random(self.n(), rng);
        left_diagonal(&a, self.basis()).expect("sample length matches lattice")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub check_name: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub tolerance: f64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.check_name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

pub const CHECK_SELF_ADJOINT: &str = "self_adjoint";
pub const CHECK_GRADING: &str = "grading_anticommutes";
pub const CHECK_REALITY: &str = "reality_commutes";
pub const CHECK_ZERO_ORDER: &str = "zero_order";
pub const CHECK_FIRST_ORDER: &str = "first_order";

/// Runs the five axiom checks on explicit algebra samples (diagonals of π(a)).
///
/// The opposite algebra is obtained through `J`, never from the column index,
/// so these checks are independent of [`crate::triple::represent_opposite`].
pub fn check_axioms(
    grading: &Grading,
    real: &RealStructure,
    dirac: &SparseMatrix,
    elements: &[Vec<Complex64>],
    tolerance: f64,
) -> AxiomReport {
    let gamma = grading.diagonal();
    let self_adjoint = dirac.sub(&dirac.adjoint()).max_abs();
    let anticomm = dirac
        .mul_diag_right(&gamma)
        .add(&dirac.mul_diag_left(&gamma))
        .max_abs();
    let reality = real.conjugate(dirac).sub(dirac).max_abs();

    let opposites: Vec<Vec<Complex64>> = elements
        .iter()
        .map(|b| real.conjugate_diagonal(b))
        .collect();
    let mut zero_order: f64 = 0.0;
    let mut first_order: f64 = 0.0;
    for a in elements {
        let pa = SparseMatrix::from_diagonal(a);
        let da = dirac.commutator_with_diagonal(a);
        for b in &opposites {
            zero_order = zero_order.max(pa.max_abs_commutator_with_diagonal(b));
            first_order = first_order.max(da.max_abs_commutator_with_diagonal(b));
        }
    }

    let checks = [
        (CHECK_SELF_ADJOINT, self_adjoint),
        (CHECK_GRADING, anticomm),
        (CHECK_REALITY, reality),
        (CHECK_ZERO_ORDER, zero_order),
        (CHECK_FIRST_ORDER, first_order),
    ]
    .into_iter()
    .map(|(name, r)| AxiomCheck {
        check_name: name.to_string(),
        max_residual: r,
        pass: r < tolerance,
    })
    .collect();
    AxiomReport { tolerance, checks }
}

/// Checks the axioms on [`AXIOM_SAMPLES`] algebra elements drawn from `seed`.
pub fn validate_axioms<T: FiniteTriple + ?Sized>(
    triple: &T,
    seed: u64,
    tolerance: f64,
) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements: Vec<_> = (0..AXIOM_SAMPLES)
        .map(|_| triple.random_representation(&mut rng))
        .collect();
    check_axioms(
        triple.grading(),
        triple.real_structure(),
        triple.dirac_matrix(),
        &elements,
        tolerance,
    )
}
