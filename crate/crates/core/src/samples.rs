//! Lattice coordinates and the named test functions used by the sweeps.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;

use crate::qmatrix::Shape;
use crate::triple::AlgebraElement;
use crate::{Error, Result};

/// Lattice spacing: circumference 2π on the circle, the unit interval on the
/// segment.
pub fn lattice_spacing(shape: Shape, n: usize) -> f64 {
    match shape {
        Shape::Circle => 2.0 * std::f64::consts::PI / n as f64,
        Shape::Segment => 1.0 / (n as f64 - 1.0),
    }
}

pub fn positions(shape: Shape, n: usize) -> Vec<f64> {
    let dx = lattice_spacing(shape, n);
    (0..n).map(|l| l as f64 * dx).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    Sin,
    Cos,
    /// Plane wave `exp(i k x)`.
    Exp {
        k: f64,
    },
    Linear,
    Const(Complex64),
    /// Explicit samples, one per lattice point.
    Samples(Vec<Complex64>),
}

impl TestFunction {
    /// Parses `sin`, `cos`, `exp`, `linear`, `const` or `file:PATH`.
    /// `k` is the wave number used by `exp`.
    pub fn parse(spec: &str, k: f64) -> Result<Self> {
        if let Some(path) = spec.strip_prefix("file:") {
            return Ok(TestFunction::Samples(read_samples(Path::new(path))?));
        }
        match spec {
            "sin" => Ok(TestFunction::Sin),
            "cos" => Ok(TestFunction::Cos),
            "exp" => Ok(TestFunction::Exp { k }),
            "linear" => Ok(TestFunction::Linear),
            "const" => Ok(TestFunction::Const(Complex64::new(1.0, 0.0))),
            other => Err(Error::InvalidArgument(format!(
                "unknown function `{other}`"
            ))),
        }
    }

    pub fn value(&self, x: f64) -> Option<Complex64> {
        let re = |v: f64| Some(Complex64::new(v, 0.0));
        match self {
            TestFunction::Sin => re(x.sin()),
            TestFunction::Cos => re(x.cos()),
            TestFunction::Exp { k } => Some(Complex64::from_polar(1.0, k * x)),
            TestFunction::Linear => re(x),
            TestFunction::Const(c) => Some(*c),
            TestFunction::Samples(_) => None,
        }
    }

    /// Exact derivative, when the function is analytic rather than sampled.
    pub fn derivative(&self, x: f64) -> Option<Complex64> {
        let re = |v: f64| Some(Complex64::new(v, 0.0));
        match self {
            TestFunction::Sin => re(x.cos()),
            TestFunction::Cos => re(-x.sin()),
            TestFunction::Exp { k } => {
                Some(Complex64::new(0.0, *k) * Complex64::from_polar(1.0, k * x))
            }
            TestFunction::Linear => re(1.0),
            TestFunction::Const(_) => re(0.0),
            TestFunction::Samples(_) => None,
        }
    }

    pub fn sample(&self, shape: Shape, n: usize) -> Result<AlgebraElement> {
        if let TestFunction::Samples(v) = self {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            return Ok(AlgebraElement::new(v.clone()));
        }
        Ok(AlgebraElement::new(
            positions(shape, n)
                .into_iter()
                .map(|x| self.value(x).expect("analytic function"))
                .collect(),
        ))
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Sin => f.write_str("sin"),
            TestFunction::Cos => f.write_str("cos"),
            TestFunction::Exp { k } => write!(f, "exp(i*{k}*x)"),
            TestFunction::Linear => f.write_str("linear"),
            TestFunction::Const(c) => write!(f, "const({c})"),
            TestFunction::Samples(v) => write!(f, "samples[{}]", v.len()),
        }
    }
}

/// Reads one complex value per line as `re,im` (or a bare `re`). Blank lines
/// and `#` comments are ignored.
pub fn read_samples(path: &Path) -> Result<Vec<Complex64>> {
    let text = std::fs::read_to_string(path)?;
    parse_samples(&text, &path.display().to_string())
}

pub fn parse_samples(text: &str, origin: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
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
        let mut parts = line.split(',').map(str::trim);
        let re: f64 = parts
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|e| err(format!("real part: {e}")))?;
        let im: f64 = match parts.next() {
            Some(s) => s.parse().map_err(|e| err(format!("imaginary part: {e}")))?,
            None => 0.0,
        };
        if parts.next().is_some() {
            return Err(err("expected `re,im`".into()));
        }
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}
