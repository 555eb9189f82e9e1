//! Browser bindings. Each export returns a JSON string; the plain functions
//! underneath are ordinary Rust and are tested natively.

use fintriple::analysis::{degeneracy_survey, spectrum};
use fintriple::calculus::{blocks, commutator, off_block_residual};
use fintriple::dirac::{
    validate_axioms, FiniteTriple, LatticeTriple, Normalization, AXIOM_TOLERANCE,
};
use fintriple::qmatrix::{build_q, Shape};
use fintriple::samples::{positions, TestFunction};
use fintriple::{Error, Result, DEFAULT_SEED};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest lattice the page will build; the spectrum is dense `3n × 3n`.
pub const MAX_N: usize = 200;

fn parse_shape(s: &str) -> Result<Shape> {
    s.parse()
}

fn parse_normalization(s: &str) -> Result<Normalization> {
    match s {
        "sqrt2" => Ok(Normalization::Sqrt2Corrected),
        "unit" => Ok(Normalization::Unit),
        other => Err(Error::InvalidArgument(format!(
            "unknown normalization `{other}`"
        ))),
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::InvalidArgument(format!("n = {n} exceeds {MAX_N}")));
    }
    Ok(())
}

#[derive(Serialize)]
pub struct SurveyRow {
    pub n: usize,
    pub det: i64,
    pub kernel_dim: usize,
}

pub fn survey_rows(shape: &str, n_max: usize) -> Result<Vec<SurveyRow>> {
    check_size(n_max)?;
    Ok(degeneracy_survey(parse_shape(shape)?, n_max)?
        .into_iter()
        .map(|r| SurveyRow {
            n: r.n,
            det: r.det,
            kernel_dim: r.kernel_dim,
        })
        .collect())
}

#[derive(Serialize)]
pub struct Profile {
    pub shape: Shape,
    pub n: usize,
    pub degenerate: bool,
    pub x: Vec<f64>,
    /// Rotated block value per point (boundary points of a segment included).
    pub nu: Vec<f64>,
    /// `c·√2·|a′(x)|` at each point.
    pub reference: Vec<f64>,
    pub off_block_residual: f64,
}

pub fn commutator_profile(
    shape: &str,
    n: usize,
    function: &str,
    k: f64,
    normalization: &str,
) -> Result<Profile> {
    check_size(n)?;
    if function.starts_with("file:") {
        return Err(Error::InvalidArgument(
            "sample files are not available in the browser".into(),
        ));
    }
    let shape = parse_shape(shape)?;
    let normalization = parse_normalization(normalization)?;
    let f = TestFunction::parse(function, k)?;
    let t = LatticeTriple::new(shape, n, normalization)?;
    let a = f.sample(shape, n)?;
    let c = commutator(t.dirac(), &a)?;
    let sets = blocks(&c, t.dirac())?;
    let x = positions(shape, n);
    let scale = normalization.factor() * std::f64::consts::SQRT_2;
    let reference = x
        .iter()
        .map(|&p| f.derivative(p).map_or(f64::NAN, |d| scale * d.norm()))
        .collect();
    Ok(Profile {
        shape,
        n,
        degenerate: build_q(shape, n)?.is_degenerate(),
        nu: sets.iter().map(|b| b.nu()).collect(),
        reference,
        x,
        off_block_residual: off_block_residual(&c, t.basis()),
    })
}

#[derive(Serialize)]
pub struct SpectrumView {
    pub shape: Shape,
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    pub symmetry_residual: f64,
    pub axioms: fintriple::dirac::AxiomReport,
}

pub fn spectrum_view(shape: &str, n: usize, normalization: &str) -> Result<SpectrumView> {
    check_size(n)?;
    let shape = parse_shape(shape)?;
    let t = LatticeTriple::new(shape, n, parse_normalization(normalization)?)?;
    let s = spectrum(t.dirac_matrix(), n)?;
    Ok(SpectrumView {
        shape,
        n,
        symmetry_residual: s.symmetry_residual(),
        kernel_dim: s.kernel_dim,
        eigenvalues: s.eigenvalues,
        axioms: validate_axioms(&t, DEFAULT_SEED, AXIOM_TOLERANCE),
    })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn survey(shape: &str, n_max: usize) -> std::result::Result<String, JsError> {
    to_js(survey_rows(shape, n_max))
}

#[wasm_bindgen]
pub fn profile(
    shape: &str,
    n: usize,
    function: &str,
    k: f64,
    normalization: &str,
) -> std::result::Result<String, JsError> {
    to_js(commutator_profile(shape, n, function, k, normalization))
}

#[wasm_bindgen(js_name = diracSpectrum)]
pub fn dirac_spectrum(
    shape: &str,
    n: usize,
    normalization: &str,
) -> std::result::Result<String, JsError> {
    to_js(spectrum_view(shape, n, normalization))
}
