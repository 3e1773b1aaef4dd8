//! Antilinear conjugations, PT / anti-PT classification, inner products, Gram
//! matrices and ground-state normalization.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::ClosedFormFunction;
use crate::domain::{parity_decompose, quadrature, reflect, sample, ComplexGridFunction, Grid};
use crate::error::{Error, Result};

/// Antilinear map `Λ` used to build inner products `(φ, ψ) = ∫ (Λφ)·ψ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugationStrategy {
    /// `conj(u(x))`
    Hermitian,
    /// `conj(u(-x))`
    Pt,
    /// `-conj(u(-x))`
    Apt,
}

impl ConjugationStrategy {
    pub const ALL: [ConjugationStrategy; 3] =
        [ConjugationStrategy::Hermitian, ConjugationStrategy::Pt, ConjugationStrategy::Apt];

    pub fn name(self) -> &'static str {
        match self {
            ConjugationStrategy::Hermitian => "hermitian",
            ConjugationStrategy::Pt => "pt",
            ConjugationStrategy::Apt => "apt",
        }
    }
}

impl fmt::Display for ConjugationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConjugationStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hermitian" => Ok(ConjugationStrategy::Hermitian),
            "pt" => Ok(ConjugationStrategy::Pt),
            "apt" => Ok(ConjugationStrategy::Apt),
            other => Err(Error::InvalidArgument(format!("unknown conjugation strategy {other:?}"))),
        }
    }
}

pub fn apply_conjugation(s: ConjugationStrategy, u: &ComplexGridFunction) -> Result<ComplexGridFunction> {
    match s {
        ConjugationStrategy::Hermitian => Ok(u.conj()),
        ConjugationStrategy::Pt => Ok(reflect(u)?.conj()),
        ConjugationStrategy::Apt => Ok(reflect(u)?.map(|v| -v.conj())),
    }
}

/// Sup-norms of the even and odd parts of the real and imaginary components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParityNorms {
    pub real_even: f64,
    pub real_odd: f64,
    pub imag_even: f64,
    pub imag_odd: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub is_pt_symmetric: bool,
    pub is_apt_symmetric: bool,
    pub pt_defect: f64,
    pub apt_defect: f64,
    /// `max_j |u_j - (Λu)_j| / max(1, |u_j| + |(Λu)_j|)`; the verdicts compare
    /// these with `tolerance`.
    pub pt_relative_defect: f64,
    pub apt_relative_defect: f64,
    pub tolerance: f64,
    pub parity: ParityNorms,
}

fn defects(u: &ComplexGridFunction, s: ConjugationStrategy) -> Result<(f64, f64)> {
    let image = apply_conjugation(s, u)?;
    Ok(u.values().iter().zip(image.values()).fold((0.0f64, 0.0f64), |(abs, rel), (a, b)| {
        let d = (a - b).norm();
        (abs.max(d), rel.max(d / (a.norm() + b.norm()).max(1.0)))
    }))
}

fn classify(u: &ComplexGridFunction, tol: f64) -> Result<SymmetryReport> {
    let (pt_defect, pt_relative_defect) = defects(u, ConjugationStrategy::Pt)?;
    let (apt_defect, apt_relative_defect) = defects(u, ConjugationStrategy::Apt)?;
    let re = parity_decompose(&u.real_part())?;
    let im = parity_decompose(&u.imag_part())?;
    Ok(SymmetryReport {
        is_pt_symmetric: pt_relative_defect <= tol,
        is_apt_symmetric: apt_relative_defect <= tol,
        pt_defect,
        apt_defect,
        pt_relative_defect,
        apt_relative_defect,
        tolerance: tol,
        parity: ParityNorms {
            real_even: re.even.sup_norm(),
            real_odd: re.odd.sup_norm(),
            imag_even: im.even.sup_norm(),
            imag_odd: im.odd.sup_norm(),
        },
    })
}

/// PT symmetry means even real part and odd imaginary part.
pub fn classify_pt(u: &ComplexGridFunction, tol: f64) -> Result<SymmetryReport> {
    classify(u, tol)
}

/// APT symmetry means odd real part and even imaginary part.
pub fn classify_apt(u: &ComplexGridFunction, tol: f64) -> Result<SymmetryReport> {
    classify(u, tol)
}

pub fn inner_product(phi: &ComplexGridFunction, psi: &ComplexGridFunction, s: ConjugationStrategy) -> Result<C64> {
    if !phi.same_grid(psi) {
        return Err(Error::GridMismatch);
    }
    Ok(quadrature(&apply_conjugation(s, phi)?.mul(psi)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramMatrix {
    pub strategy: ConjugationStrategy,
    pub entries: Vec<Vec<C64>>,
    pub max_off_diagonal: f64,
    /// Largest `| |G[j][j]| - 1 |`.
    pub max_diagonal_defect: f64,
}

pub fn gram_matrix(states: &[ComplexGridFunction], s: ConjugationStrategy) -> Result<GramMatrix> {
    if let Some(first) = states.first() {
        if states.iter().any(|u| !u.same_grid(first)) {
            return Err(Error::GridMismatch);
        }
    }
    let conjugated: Vec<ComplexGridFunction> = states.iter().map(|u| apply_conjugation(s, u)).collect::<Result<_>>()?;
    let entries: Vec<Vec<C64>> = conjugated
        .par_iter()
        .map(|l| states.iter().map(|r| l.mul(r).map(|p| quadrature(&p))).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut max_off_diagonal: f64 = 0.0;
    let mut max_diagonal_defect: f64 = 0.0;
    for (i, row) in entries.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i == j {
                max_diagonal_defect = max_diagonal_defect.max((v.norm() - 1.0).abs());
            } else {
                max_off_diagonal = max_off_diagonal.max(v.norm());
            }
        }
    }
    Ok(GramMatrix { strategy: s, entries, max_off_diagonal, max_diagonal_defect })
}

/// Scales `u` to unit Hermitian norm and rotates its phase so that the value
/// at the grid center (or, if that vanishes, at the first node of maximal
/// modulus) is real and positive.
pub fn normalize_state(u: &ComplexGridFunction) -> Result<ComplexGridFunction> {
    let norm2 = quadrature(&u.map(|v| C64::new(v.norm_sqr(), 0.0))).re;
    if !(norm2.is_finite() && norm2 > 0.0) {
        return Err(Error::InvalidArgument("cannot normalize a state of zero or infinite norm".into()));
    }
    let values = u.values();
    let sup = u.sup_norm();
    let center = values[u.grid().center_index()];
    let anchor = if u.grid().is_symmetric() && center.norm() > 1e-8 * sup {
        center
    } else {
        let mut best = values[0];
        for &v in values {
            if v.norm() > best.norm() {
                best = v;
            }
        }
        best
    };
    let phase = anchor.conj() / anchor.norm();
    Ok(u.scale(phase / norm2.sqrt()))
}

/// `N = 1/√(∫ exp{-2·even(Re f)})`, the normalization of `N·exp{-f}`.
pub fn normalization_constant(f: &ClosedFormFunction, grid: &Arc<Grid>) -> Result<f64> {
    let real = sample(f, grid)?.real_part();
    let even = parity_decompose(&real)?.even;
    let integrand = even.map(|v| (-2.0 * v).exp());
    let value = quadrature(&integrand).re;
    if !value.is_finite() || value > 1e300 {
        return Err(Error::DivergentNorm { value });
    }
    if value <= 0.0 {
        return Err(Error::InvalidArgument(format!("normalization integral is not positive ({value})")));
    }
    Ok(1.0 / value.sqrt())
}
