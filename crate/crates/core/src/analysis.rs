//! Convergence sweeps, spectra, determinant surveys and partial zeta sums.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::calculus::{blocks, commutator};
use crate::dirac::{LatticeTriple, Normalization};
use crate::linalg::{hermitian_eigenvalues, SparseMatrix};
use crate::qmatrix::{build_q, Shape};
use crate::samples::{lattice_spacing, positions, TestFunction};
use crate::{Error, Result};

/// Eigenvalues below this (relative to `max(1, |λ|max)`) count as zero.
pub const ZERO_EIGENVALUE_TOLERANCE: f64 = 1e-10;

#[cfg(feature = "parallel")]
fn map_sizes<T, F>(sizes: &[usize], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    sizes.par_iter().map(|&n| f(n)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_sizes<T, F>(sizes: &[usize], f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T>,
{
    sizes.iter().map(|&n| f(n)).collect()
}

/// One row of a convergence table. Column order is fixed for CSV output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub n: usize,
    pub dx: f64,
    pub metric: String,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub records: Vec<ConvergenceRecord>,
    /// Least-squares slope of `ln error` against `ln Δx`; absent when fewer
    /// than [`MIN_ORDER_SIZES`] errors are resolvable.
    pub order: Option<f64>,
}

pub const METRIC_NU: &str = "max_nu_error";

/// Sizes needed before `converge_1d` reports a fitted order.
pub const MIN_ORDER_SIZES: usize = 4;

/// Worst pointwise gap between the rotated block value `ν_l` and the
/// continuum value `c·√2·|a′(x_l)|` over interior points, for each size.
///
/// With the default normalization the continuum value is `|a′(x_l)|`, the
/// modulus of the symbol of `iσ₁∂ₓ` applied to `a`.
pub fn converge_1d(
    f: &TestFunction,
    shape: Shape,
    n_list: &[usize],
    normalization: Normalization,
) -> Result<ConvergenceStudy> {
    if f.derivative(0.0).is_none() {
        return Err(Error::InvalidArgument(
            "convergence needs an analytic function, not samples".into(),
        ));
    }
    let mut sizes = n_list.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    for &n in &sizes {
        if build_q(shape, n)?.is_degenerate() {
            return Err(Error::DegenerateSize { shape, n });
        }
    }
    let limit_scale = normalization.factor() * std::f64::consts::SQRT_2;
    let records = map_sizes(&sizes, |n| {
        let t = LatticeTriple::new(shape, n, normalization)?;
        let a = f.sample(shape, n)?;
        let sets = blocks(&commutator(t.dirac(), &a)?, t.dirac())?;
        let xs = positions(shape, n);
        let mut worst = ConvergenceRecord {
            n,
            dx: lattice_spacing(shape, n),
            metric: METRIC_NU.to_string(),
            value: 0.0,
            reference: 0.0,
            error: 0.0,
        };
        for b in sets.iter().filter(|b| b.is_interior()) {
            let value = b.nu();
            let reference = limit_scale * f.derivative(xs[b.point]).expect("analytic").norm();
            let error = (value - reference).abs();
            if error > worst.error {
                worst.value = value;
                worst.reference = reference;
                worst.error = error;
            }
        }
        Ok(worst)
    })?;
    let (dx, err): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter(|r| r.error > RESOLVABLE_ERROR)
        .map(|r| (r.dx, r.error))
        .unzip();
    let order = if dx.len() >= MIN_ORDER_SIZES {
        fit_order(&dx, &err)
    } else {
        None
    };
    Ok(ConvergenceStudy { order, records })
}

/// Errors at or below this are treated as exact and excluded from fits.
const RESOLVABLE_ERROR: f64 = 1e-13;

/// Least-squares slope of `ln error` on `ln h`.
pub fn fit_order(h: &[f64], error: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(error)
        .filter(|(_, &e)| e > RESOLVABLE_ERROR)
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Richardson extrapolation from values at spacings `h` and `h/ratio`, for
/// an error expansion starting at `h^order`.
pub fn richardson(coarse: f64, fine: f64, ratio: f64, order: f64) -> f64 {
    let w = ratio.powf(order);
    (w * fine - coarse) / (w - 1.0)
}

pub fn write_convergence_csv<W: Write>(records: &[ConvergenceRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
}

impl SpectrumRecord {
    /// `max_k |λ_k + λ_{dim−1−k}|` over the sorted spectrum.
    pub fn symmetry_residual(&self) -> f64 {
        let ev = &self.eigenvalues;
        ev.iter()
            .zip(ev.iter().rev())
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max)
    }

    fn zero_threshold(&self) -> f64 {
        let top = self.eigenvalues.iter().map(|v| v.abs()).fold(1.0, f64::max);
        ZERO_EIGENVALUE_TOLERANCE * top
    }
}

/// Full spectrum of a self-adjoint operator on an `n`-point lattice.
pub fn spectrum(d: &SparseMatrix, n: usize) -> Result<SpectrumRecord> {
    let residual = d.sub(&d.adjoint()).max_abs();
    if residual > ZERO_EIGENVALUE_TOLERANCE {
        return Err(Error::NotSelfAdjoint { residual });
    }
    let eigenvalues = hermitian_eigenvalues(&d.to_dense());
    let mut rec = SpectrumRecord {
        n,
        eigenvalues,
        kernel_dim: 0,
    };
    let tol = rec.zero_threshold();
    rec.kernel_dim = rec.eigenvalues.iter().filter(|v| v.abs() <= tol).count();
    Ok(rec)
}

/// Partial sums of `|λ|^{−s}` over nonzero eigenvalues. Exploratory output:
/// no limit is claimed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaAction {
    pub s: f64,
    pub cutoff: usize,
    /// Number of terms actually summed (at most `cutoff`).
    pub terms: usize,
    pub value: f64,
    /// `S_N` for `N = 1..=terms`.
    pub partial_sums: Vec<f64>,
    /// `S_N / ln N` for `N = 2..=terms`, the logarithmic-mean proxy of a
    /// singular trace.
    pub log_normalized: Vec<f64>,
    pub exploratory: bool,
}

/// Sums the `cutoff` largest terms `|λ|^{−s}`, i.e. the smallest nonzero
/// `|λ|` first.
pub fn zeta_action(spec: &SpectrumRecord, s: f64, cutoff: usize) -> Result<ZetaAction> {
    if s.is_nan() || s <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "s must be positive, got {s}"
        )));
    }
    let tol = spec.zero_threshold();
    let mut mags: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .filter(|&v| v > tol)
        .collect();
    if mags.is_empty() {
        return Err(Error::AllZeroSpectrum);
    }
    mags.sort_by(f64::total_cmp);
    let partial_sums: Vec<f64> = mags
        .iter()
        .take(cutoff)
        .scan(0.0, |acc, &m| {
            *acc += m.powf(-s);
            Some(*acc)
        })
        .collect();
    let log_normalized = partial_sums
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &v)| v / ((k + 1) as f64).ln())
        .collect();
    Ok(ZetaAction {
        s,
        cutoff,
        terms: partial_sums.len(),
        value: partial_sums.last().copied().unwrap_or(0.0),
        partial_sums,
        log_normalized,
        exploratory: true,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub n: usize,
    pub det: i64,
    pub kernel_dim: usize,
}

/// `(n, det q, dim ker q)` for every constructible size up to `n_max`.
pub fn degeneracy_survey(shape: Shape, n_max: usize) -> Result<Vec<SurveyRow>> {
    let min = shape.min_size();
    if n_max < min {
        return Err(Error::SizeTooSmall {
            shape,
            n: n_max,
            min,
        });
    }
    let sizes: Vec<usize> = (min..=n_max).collect();
    map_sizes(&sizes, |n| {
        let q = build_q(shape, n)?;
        Ok(SurveyRow {
            n,
            det: q.det_i64()?,
            kernel_dim: q.kernel_dimension(),
        })
    })
}

pub fn write_survey_csv<W: Write>(rows: &[SurveyRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
