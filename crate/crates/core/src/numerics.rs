//! Discretized Hamiltonians and their low-lying spectra.
//!
//! `H = -d²/dx² + V` is discretized with the three-point rule in the
//! computational coordinate `y`. On a mapped grid the operator becomes the
//! Sturm-Liouville problem `-(p·ψ_y)_y + w·V·ψ = E·w·ψ` with `p = 1/x'(y)` and
//! `w = x'(y)`. Symmetrizing with `v = w^(1/2)·ψ` gives a complex-symmetric
//! tridiagonal matrix whose eigenvalues approximate those of `H` to second
//! order in the computational spacing.

use std::cmp::Ordering;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::ClosedFormFunction;
use crate::domain::{ComplexGridFunction, Grid, GridMap, DEFAULT_Y_MAX};
use crate::error::{Error, Result};
use crate::operators::sample_coefficient;
use crate::susy::{closed_form_potentials, FamilyParams};
use crate::symmetry::normalize_state;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Largest backward error `‖Mv - λv‖ / (‖M‖∞·‖v‖)` accepted for a reported pair.
pub const BACKWARD_ERROR_BOUND: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalComplexMatrix {
    diag: Vec<C64>,
    off: Vec<C64>,
    // ψ_j = scale_j · v_j for eigenvectors v of this matrix
    scale: Vec<f64>,
    grid: Option<Arc<Grid>>,
}

impl TridiagonalComplexMatrix {
    /// A symmetric tridiagonal matrix with the given diagonal and off-diagonal.
    pub fn new(diag: Vec<C64>, off: Vec<C64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::LengthMismatch { expected: diag.len() - 1, got: off.len() });
        }
        let scale = vec![1.0; diag.len()];
        Ok(TridiagonalComplexMatrix { diag, off, scale, grid: None })
    }

    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[C64] {
        &self.diag
    }

    pub fn off(&self) -> &[C64] {
        &self.off
    }

    pub fn grid(&self) -> Option<&Arc<Grid>> {
        self.grid.as_ref()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        let n = self.dimension();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].norm();
                if i > 0 {
                    s += self.off[i - 1].norm();
                }
                if i + 1 < n {
                    s += self.off[i].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dimension();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// `‖Mv - λv‖ / (‖M‖∞·‖v‖)`.
    pub fn backward_error(&self, lambda: C64, v: &[C64]) -> f64 {
        let mv = self.apply(v);
        let r = norm2(&mv.iter().zip(v).map(|(a, b)| a - lambda * b).collect::<Vec<_>>());
        r / (self.inf_norm() * norm2(v))
    }

    /// `max_i |(Mv - λv)_i| / (|M||v| + |λ||v|)_i`, the row-scaled residual;
    /// unlike [`Self::backward_error`] it stays meaningful when rows differ
    /// in scale by many orders of magnitude.
    pub fn componentwise_error(&self, lambda: C64, v: &[C64]) -> f64 {
        let mv = self.apply(v);
        let n = v.len();
        (0..n)
            .map(|i| {
                let mut den = (self.diag[i].norm() + lambda.norm()) * v[i].norm();
                if i > 0 {
                    den += self.off[i - 1].norm() * v[i - 1].norm();
                }
                if i + 1 < n {
                    den += self.off[i].norm() * v[i + 1].norm();
                }
                let r = (mv[i] - lambda * v[i]).norm();
                if r == 0.0 {
                    0.0
                } else {
                    r / den
                }
            })
            .fold(0.0, f64::max)
    }
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn bilinear(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Three-point discretization of `-d²/dx² + V` on the nodes of `grid`, with
/// Dirichlet conditions at the walls.
pub fn discretize(v: &ClosedFormFunction, grid: &Arc<Grid>) -> Result<TridiagonalComplexMatrix> {
    let pot = sample_coefficient(v, grid)?;
    let n = grid.n_interior();
    let h = grid.spacing();
    let h2 = h * h;
    let y = grid.computational_nodes();
    let w = grid.jacobian();
    let p_half: Vec<f64> = (0..=n)
        .map(|j| {
            // half point between node j - 1 and node j (wall at either end)
            let yh = if j == 0 { y[0] - 0.5 * h } else { y[j - 1] + 0.5 * h };
            1.0 / grid.jacobian_at(yh)
        })
        .collect();
    let diag = (0..n).map(|j| C64::new((p_half[j] + p_half[j + 1]) / (h2 * w[j]), 0.0) + pot.values()[j]).collect();
    let off = (0..n - 1).map(|j| C64::new(-p_half[j + 1] / (h2 * (w[j] * w[j + 1]).sqrt()), 0.0)).collect();
    let scale = w.iter().map(|wj| 1.0 / wj.sqrt()).collect();
    Ok(TridiagonalComplexMatrix { diag, off, scale, grid: Some(grid.clone()) })
}

/// Orders by real part, then imaginary part.
pub fn spectral_order(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

const QL_MAX_SWEEPS: usize = 60;

/// All eigenvalues of a complex-symmetric tridiagonal matrix by implicit QL
/// with complex orthogonal rotations. Unsorted.
pub fn ql_eigenvalues(m: &TridiagonalComplexMatrix) -> Result<Vec<C64>> {
    let n = m.dimension();
    let mut d = m.diag.clone();
    let mut e = m.off.clone();
    e.push(ZERO);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].norm() + d[mm + 1].norm();
                if e[mm].norm() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::NoConvergence { index: l });
            }
            let (d0, e0) = (d.clone(), e.clone());
            let mut shift = wilkinson_like_shift(&d, &e, l);
            if sweeps % 10 == 0 {
                // exceptional shift after a run of stalled sweeps
                shift += e[l] * C64::new(0.75, 0.25);
            }
            if !ql_sweep(&mut d, &mut e, l, mm, shift) {
                d = d0;
                e = e0;
                let kick = e[l] * C64::new(0.3, 0.7) + d[l] * 1e-3;
                if !ql_sweep(&mut d, &mut e, l, mm, shift + kick) {
                    return Err(Error::NoConvergence { index: l });
                }
            }
        }
    }
    Ok(d)
}

fn wilkinson_like_shift(d: &[C64], e: &[C64], l: usize) -> C64 {
    let g = (d[l + 1] - d[l]) / (e[l] * 2.0);
    let r = (g * g + 1.0).sqrt();
    let denom = if (g + r).norm() >= (g - r).norm() { g + r } else { g - r };
    // shift relative to d[l]: the returned value plays the role of d[m] - g
    d[l] - e[l] / denom
}

/// One implicit QL sweep on rows `l..=m`. Returns `false` when a rotation
/// meets a (numerically) isotropic vector, leaving `d`, `e` inconsistent.
fn ql_sweep(d: &mut [C64], e: &mut [C64], l: usize, m: usize, shift: C64) -> bool {
    let mut g = d[m] - shift;
    let mut s = C64::new(1.0, 0.0);
    let mut c = C64::new(1.0, 0.0);
    let mut p = ZERO;
    let mut i = m;
    while i > l {
        i -= 1;
        let f = s * e[i];
        let b = c * e[i];
        let r = (f * f + g * g).sqrt();
        e[i + 1] = r;
        if r.norm() == 0.0 {
            d[i + 1] -= p;
            e[m] = ZERO;
            return true;
        }
        if r.norm() < 1e-6 * (f.norm() + g.norm()) {
            return false;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        let r2 = (d[i] - g) * s + c * b * 2.0;
        p = s * r2;
        d[i + 1] = g + p;
        g = c * r2 - b;
    }
    d[l] -= p;
    e[l] = g;
    e[m] = ZERO;
    true
}

/// `M - σI` factored as `P·L·U` with partial pivoting.
struct TridiagonalLu {
    dl: Vec<C64>,
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn new(m: &TridiagonalComplexMatrix, sigma: C64) -> Self {
        let n = m.dimension();
        let mut dl = m.off.clone();
        let mut du = m.off.clone();
        let mut d: Vec<C64> = m.diag.iter().map(|x| x - sigma).collect();
        let mut du2 = vec![ZERO; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * m.inf_norm().max(f64::MIN_POSITIVE);
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i].norm() == 0.0 {
                    d[i] = C64::new(tiny, 0.0);
                }
                let l = dl[i] / d[i];
                dl[i] = l;
                d[i + 1] -= l * du[i];
            } else {
                let l = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = l;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - l * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -l * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].norm() == 0.0 {
            d[n - 1] = C64::new(tiny, 0.0);
        }
        TridiagonalLu { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [C64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// An eigenpair of a [`TridiagonalComplexMatrix`] together with its backward
/// error.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    /// Unit 2-norm, phase fixed so the center component is real and positive.
    pub vector: Vec<C64>,
    pub backward_error: f64,
    /// See [`TridiagonalComplexMatrix::componentwise_error`].
    pub componentwise_error: f64,
}

const REFINE_MAX_ITER: usize = 40;

fn fix_phase(v: &mut [C64]) {
    let n = v.len();
    let center = v[n / 2];
    let anchor = if center.norm() > 1e-8 * v.iter().map(|z| z.norm()).fold(0.0, f64::max) {
        center
    } else {
        *v.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap()
    };
    let rot = anchor.conj() / anchor.norm();
    let nrm = norm2(v);
    for z in v.iter_mut() {
        *z = *z * rot / nrm;
    }
}

/// Inverse iteration from shift `sigma`, switching to Rayleigh-quotient shifts
/// (`vᵀMv / vᵀv`) once the vector has settled.
pub fn refine_eigenpair(m: &TridiagonalComplexMatrix, sigma: C64, index: usize) -> Result<EigenPair> {
    let n = m.dimension();
    let mut v: Vec<C64> = (0..n).map(|j| C64::new(1.0 + 0.1 * (j as f64).sin(), 0.0)).collect();
    let mut shift = sigma;
    let mut lambda = sigma;
    let mut best: Option<EigenPair> = None;
    for it in 0..REFINE_MAX_ITER {
        let lu = TridiagonalLu::new(m, shift);
        lu.solve(&mut v);
        let nrm = norm2(&v);
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::NoConvergence { index });
        }
        for z in v.iter_mut() {
            *z /= nrm;
        }
        let mv = m.apply(&v);
        let denom = bilinear(&v, &v);
        let rho = if denom.norm() > 1e-12 { bilinear(&v, &mv) / denom } else { lambda };
        let ce = m.componentwise_error(rho, &v);
        let settled = (rho - lambda).norm() <= 1e-15 * rho.norm().max(1.0);
        lambda = rho;
        if best.as_ref().is_none_or(|b| ce <= b.componentwise_error) {
            let be = m.backward_error(rho, &v);
            best = Some(EigenPair { value: rho, vector: v.clone(), backward_error: be, componentwise_error: ce });
        }
        if it >= 2 && (settled || ce <= 1e-14) {
            break;
        }
        if it >= 4 {
            shift = rho;
        }
    }
    let mut pair = best.ok_or(Error::NoConvergence { index })?;
    if pair.backward_error > BACKWARD_ERROR_BOUND || pair.componentwise_error > BACKWARD_ERROR_BOUND {
        return Err(Error::NoConvergence { index });
    }
    fix_phase(&mut pair.vector);
    Ok(pair)
}

/// The `count` eigenvalues with smallest real part, each refined by inverse
/// iteration and certified by its backward error.
pub fn eigenpairs_lowest(m: &TridiagonalComplexMatrix, count: usize) -> Result<Vec<EigenPair>> {
    if count > m.dimension() {
        return Err(Error::InvalidArgument(format!(
            "asked for {count} eigenvalues of a {}-dimensional matrix",
            m.dimension()
        )));
    }
    let mut all = ql_eigenvalues(m)?;
    all.sort_by(spectral_order);
    let mut pairs = all[..count]
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| refine_eigenpair(m, lambda, i))
        .collect::<Result<Vec<_>>>()?;
    pairs.sort_by(|a, b| spectral_order(&a.value, &b.value));
    Ok(pairs)
}

pub fn eigenvalues_lowest(m: &TridiagonalComplexMatrix, count: usize) -> Result<Vec<C64>> {
    Ok(eigenpairs_lowest(m, count)?.into_iter().map(|p| p.value).collect())
}

/// `d/dλ ln det(M - λI)` from the ratio form of the three-term recurrence
/// `det_j = (d_j - λ)·det_{j-1} - e_{j-1}²·det_{j-2}`.
fn log_det_derivative(m: &TridiagonalComplexMatrix, lambda: C64) -> C64 {
    let mut r = ZERO;
    let mut dr = ZERO;
    let mut sum = ZERO;
    for j in 0..m.dimension() {
        let shifted = m.diag[j] - lambda;
        if j == 0 {
            r = shifted;
            dr = C64::new(-1.0, 0.0);
        } else {
            let e2 = m.off[j - 1] * m.off[j - 1];
            let (rp, drp) = (r, dr);
            r = shifted - e2 / rp;
            dr = C64::new(-1.0, 0.0) + e2 * drp / (rp * rp);
        }
        if r.norm() == 0.0 {
            // exact zero pivot: nudge by one unit in the last place of the local scale
            r = C64::new(f64::EPSILON * (shifted.norm() + 1.0), 0.0);
        }
        sum += dr / r;
    }
    sum
}

const NEWTON_MAX_ITER: usize = 200;
// roundoff floor of the recurrence on wall-clustered grids sits near 1e-12
const NEWTON_TOL: f64 = 1e-11;
// on uniform grids the floor is higher; a stalled step this small is accepted
// and left to inverse iteration to polish
const NEWTON_STALL: f64 = 1e-6;

/// Roots of the characteristic polynomial by Newton's method on
/// `ln det(M - λI)`, one per seed, with previously found roots deflated.
pub fn eigenvalues_by_determinant(m: &TridiagonalComplexMatrix, seeds: &[f64]) -> Result<Vec<C64>> {
    let mut roots: Vec<C64> = Vec::with_capacity(seeds.len());
    for (index, &seed) in seeds.iter().enumerate() {
        let mut lambda = C64::new(seed, 0.0);
        let mut converged = false;
        let mut previous = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITER {
            let deflation: C64 = roots.iter().map(|&r| (lambda - r).inv()).sum();
            let step = (log_det_derivative(m, lambda) - deflation).inv();
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            lambda -= step;
            let (size, scale) = (step.norm(), lambda.norm().max(1.0));
            if size <= NEWTON_TOL * scale || (size <= NEWTON_STALL * scale && size >= 0.5 * previous) {
                converged = true;
                break;
            }
            previous = size;
        }
        if !converged {
            return Err(Error::NoConvergence { index });
        }
        roots.push(lambda);
    }
    roots.sort_by(spectral_order);
    Ok(roots)
}

/// Eigenpairs continued from the real-well values `seeds`: determinant roots
/// polished by inverse iteration, sorted by real part.
///
/// Unlike [`eigenpairs_lowest`] this never sees eigenvalues far from the
/// seeds, and it stays accurate on strongly graded matrices where a full QL
/// sweep loses all relative accuracy in the small eigenvalues.
pub fn branch_eigenpairs(m: &TridiagonalComplexMatrix, seeds: &[f64]) -> Result<Vec<EigenPair>> {
    let roots = eigenvalues_by_determinant(m, seeds)?;
    let mut pairs =
        roots.par_iter().enumerate().map(|(i, &lambda)| refine_eigenpair(m, lambda, i)).collect::<Result<Vec<_>>>()?;
    pairs.sort_by(|a, b| spectral_order(&a.value, &b.value));
    Ok(pairs)
}

/// Eigenvalues nearest to each seed by shifted inverse iteration started
/// directly at the seed.
pub fn eigenvalues_by_inverse_iteration(m: &TridiagonalComplexMatrix, seeds: &[f64]) -> Result<Vec<C64>> {
    let mut vals = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| refine_eigenpair(m, C64::new(s, 0.0), i).map(|p| p.value))
        .collect::<Result<Vec<_>>>()?;
    vals.sort_by(spectral_order);
    Ok(vals)
}

/// Eigenvectors for the given eigenvalues as normalized grid functions.
pub fn eigenvectors_for(m: &TridiagonalComplexMatrix, lambdas: &[C64]) -> Result<Vec<ComplexGridFunction>> {
    let grid = m.grid.clone().ok_or_else(|| Error::InvalidArgument("matrix is not attached to a grid".into()))?;
    lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let pair = refine_eigenpair(m, lambda, i)?;
            let psi: Vec<C64> = pair.vector.iter().zip(&m.scale).map(|(v, s)| v * *s).collect();
            normalize_state(&ComplexGridFunction::from_values(&grid, psi)?)
        })
        .collect()
}

/// Branch eigenvalues of `V₁` on the wall-clustered grid with their
/// normalized eigenfunctions, in coordinates centered on the well.
pub fn branch_states(p: &FamilyParams, m: usize, n_grid: usize) -> Result<Vec<(C64, ComplexGridFunction)>> {
    let pair = closed_form_potentials(p)?;
    let center = p.variant.center(p.k);
    let grid = Grid::stretched(p.well().1 - center, n_grid, DEFAULT_Y_MAX)?;
    let mat = discretize(&pair.v1.shifted(center), &grid)?;
    branch_eigenpairs(&mat, &level_targets(p.n, p.k, m))?
        .into_iter()
        .map(|e| {
            let psi: Vec<C64> = e.vector.iter().zip(&mat.scale).map(|(v, s)| v * *s).collect();
            Ok((e.value, normalize_state(&ComplexGridFunction::from_values(&grid, psi)?)?))
        })
        .collect()
}

/// `(4·e_{h/2} - e_h)/3`, the second-order Richardson extrapolation for an
/// exact halving of the spacing.
pub fn richardson(e_h: f64, e_h2: f64) -> f64 {
    (4.0 * e_h2 - e_h) / 3.0
}

/// Richardson extrapolation of an order-`order` method for spacings
/// `h_coarse = ratio · h_fine`.
pub fn richardson_with_ratio(e_coarse: f64, e_fine: f64, ratio: f64, order: f64) -> f64 {
    let f = ratio.powf(order);
    (f * e_fine - e_coarse) / (f - 1.0)
}

/// Observed convergence order from three successive refinements with a
/// common spacing ratio.
pub fn observed_order(e_coarse: f64, e_mid: f64, e_fine: f64, ratio: f64) -> f64 {
    ((e_mid - e_coarse).abs() / (e_fine - e_mid).abs()).ln() / ratio.ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsospectralityBlock {
    /// Lowest partner eigenvalues.
    pub partner_eigenvalues: Vec<C64>,
    /// `|Re spec(V₂)[j] - Re spec(V₁)[j + 1]|`.
    pub deviations: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PtPairing {
    pub tolerance: f64,
    /// Reported eigenvalues with a sizable imaginary part whose conjugate is
    /// not an eigenvalue.
    pub unpaired: Vec<C64>,
}

impl PtPairing {
    pub fn ok(&self) -> bool {
        self.unpaired.is_empty()
    }
}

/// Lowest eigenvalue of the full spectrum of the uniform discretization at
/// two resolutions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WallProbe {
    pub grid_sizes: [usize; 2],
    pub lowest: [C64; 2],
    /// `Re λ_fine / Re λ_coarse`.
    pub growth: f64,
    /// The lowest eigenvalue sits below the expected ground level and runs
    /// off to −∞ as the spacing shrinks.
    pub diverging: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub params: FamilyParams,
    pub grid_map: GridMap,
    /// Node counts, coarsest first.
    pub grid_sizes: Vec<usize>,
    /// The branch continued from the real-well levels: extrapolated real
    /// parts with the finest-grid imaginary parts when the branch converges,
    /// the finest-grid values otherwise.
    pub eigenvalues: Vec<C64>,
    /// Branch eigenvalues on every grid, aligned with `grid_sizes`.
    pub raw: Vec<Vec<C64>>,
    pub imag_max: f64,
    pub targets: Vec<f64>,
    pub abs_errors: Vec<f64>,
    pub extrapolated: bool,
    pub observed_orders: Vec<f64>,
    /// `Unstable` when the branch fails to converge or the wall probe
    /// diverges.
    pub stability: Stability,
    pub wall_probe: WallProbe,
    pub isospectrality: IsospectralityBlock,
    pub pt_pairing: PtPairing,
    /// Largest relative gap between determinant roots and independent
    /// inverse iteration on the finest grid.
    pub solver_agreement: f64,
    /// Backward errors of the finest-grid eigenpairs.
    pub backward_errors: Vec<f64>,
}

impl SpectrumReport {
    /// Every eigenvalue within `tol` of its target, with negligible imaginary
    /// parts and a stable refinement.
    pub fn meets(&self, tol: f64) -> bool {
        self.stability == Stability::Stable
            && self.abs_errors.iter().all(|&e| e <= tol)
            && self.eigenvalues.iter().all(|z| z.im.abs() <= 1e-6 * z.re.abs().max(1.0))
            && self.pt_pairing.ok()
    }
}

fn pt_pairing(m: &TridiagonalComplexMatrix, reported: &[C64]) -> PtPairing {
    let tolerance = 1e-6;
    let near = |a: C64, b: C64| (a - b).norm() <= tolerance * b.norm().max(1.0);
    let unpaired = reported
        .iter()
        .filter(|z| z.im.abs() > tolerance * z.re.abs().max(1.0))
        .filter(|z| {
            let target = z.conj();
            if reported.iter().any(|&w| near(w, target)) {
                return false;
            }
            let shift = target + 1e-9 * target.norm().max(1.0);
            refine_eigenpair(m, shift, 0).map_or(true, |pair| !near(pair.value, target))
        })
        .copied()
        .collect();
    PtPairing { tolerance, unpaired }
}

/// Eigenvalues `((n + j)² - 1)·k²` of the level-`n` Hamiltonian.
pub fn level_targets(n: usize, k: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| (((n + j) * (n + j)) as f64 - 1.0) * k * k).collect()
}

fn build_grid(half_width: f64, n: usize, map: GridMap) -> Result<Arc<Grid>> {
    match map {
        GridMap::Uniform => Grid::symmetric(half_width, n),
        GridMap::Stretched { y_max } => Grid::stretched(half_width, n, y_max),
    }
}

/// Refinement ladder `(n+1)/2, n, 2n-1` (all odd), coarsest first.
pub fn refinement_sizes(n_grid: usize) -> Result<[usize; 3]> {
    if n_grid < 11 || n_grid.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!("grid size must be odd and at least 11, got {n_grid}")));
    }
    let mut third = n_grid.div_ceil(2);
    if third.is_multiple_of(2) {
        third += 1;
    }
    Ok([third, n_grid, 2 * n_grid - 1])
}

/// Full-spectrum minimum of the uniform discretization of `v` at two sizes.
/// `floor` is the level below which nothing should exist.
pub fn wall_probe(v: &ClosedFormFunction, half_width: f64, sizes: [usize; 2], floor: f64) -> Result<WallProbe> {
    let lows = sizes
        .par_iter()
        .map(|&n| {
            let m = discretize(v, &Grid::symmetric(half_width, n)?)?;
            let all = ql_eigenvalues(&m)?;
            Ok(*all.iter().min_by(|a, b| spectral_order(a, b)).expect("nonempty spectrum"))
        })
        .collect::<Result<Vec<_>>>()?;
    let lowest = [lows[0], lows[1]];
    let growth = lowest[1].re / lowest[0].re;
    let diverging = lowest[1].re < floor && lowest[1].re <= 2.0 * lowest[0].re.min(floor);
    Ok(WallProbe { grid_sizes: sizes, lowest, growth, diverging })
}

struct GridSpectrum {
    roots: Vec<C64>,
    v1: Vec<EigenPair>,
    v2: Vec<C64>,
    matrix: TridiagonalComplexMatrix,
}

/// [`spectrum_report_with`] on wall-clustered grids.
pub fn spectrum_report(p: &FamilyParams, m: usize, n_grid: usize) -> Result<SpectrumReport> {
    spectrum_report_with(p, m, n_grid, GridMap::Stretched { y_max: DEFAULT_Y_MAX })
}

/// Lowest `m` levels of the level-`p.n` Hamiltonian and its partner on three
/// refinements of the centered well, extrapolated and compared with the exact
/// values, together with a probe for eigenvalues escaping below the ground
/// level.
pub fn spectrum_report_with(p: &FamilyParams, m: usize, n_grid: usize, map: GridMap) -> Result<SpectrumReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one eigenvalue".into()));
    }
    let sizes = refinement_sizes(n_grid)?;
    let pair = closed_form_potentials(p)?;
    let center = p.variant.center(p.k);
    let (v1, v2) = (pair.v1.shifted(center), pair.v2.shifted(center));
    let half = p.well().1 - center;
    let targets = level_targets(p.n, p.k, m);
    let partner_targets = level_targets(p.n + 1, p.k, m - 1);

    let (spectra, probe) = rayon::join(
        || {
            sizes
                .par_iter()
                .map(|&n| {
                    let grid = build_grid(half, n, map)?;
                    let m1 = discretize(&v1, &grid)?;
                    let m2 = discretize(&v2, &grid)?;
                    let roots = eigenvalues_by_determinant(&m1, &targets)?;
                    let v1_pairs = roots
                        .par_iter()
                        .enumerate()
                        .map(|(i, &lambda)| refine_eigenpair(&m1, lambda, i))
                        .collect::<Result<Vec<_>>>()?;
                    let v2_vals = branch_eigenpairs(&m2, &partner_targets)?.into_iter().map(|p| p.value).collect();
                    Ok(GridSpectrum { roots, v1: v1_pairs, v2: v2_vals, matrix: m1 })
                })
                .collect::<Result<Vec<_>>>()
        },
        || wall_probe(&v1, half, [sizes[0], sizes[1]], targets[0] - p.k * p.k),
    );
    let (spectra, probe) = (spectra?, probe?);

    let spacing = |n: usize| 1.0 / (n + 1) as f64;
    let ratio_fine = spacing(sizes[1]) / spacing(sizes[2]);
    let ratio_mid = spacing(sizes[0]) / spacing(sizes[1]);
    let re_of = |g: usize, j: usize| spectra[g].v1[j].value.re;

    let mut converging = true;
    let mut observed_orders = Vec::with_capacity(m);
    for j in 0..m {
        let (a, b, c) = (re_of(0, j), re_of(1, j), re_of(2, j));
        let floor = 1e-10 * c.abs().max(1.0);
        let (d1, d2) = (b - a, c - b);
        let order = observed_order(a, b, c, 0.5 * (ratio_fine + ratio_mid));
        observed_orders.push(order);
        if d2.abs() > floor && (d1.abs() <= d2.abs() || !(order >= 1.0) || d1 * d2 < 0.0) {
            converging = false;
        }
    }
    let stability = if converging && !probe.diverging { Stability::Stable } else { Stability::Unstable };

    let fine = &spectra[2];
    let coarse = &spectra[1];
    let extrapolate = |c: C64, f: C64| C64::new(richardson_with_ratio(c.re, f.re, ratio_fine, 2.0), f.im);
    let eigenvalues: Vec<C64> = if converging {
        coarse.v1.iter().zip(&fine.v1).map(|(c, f)| extrapolate(c.value, f.value)).collect()
    } else {
        fine.v1.iter().map(|f| f.value).collect()
    };
    let partner: Vec<C64> = if converging {
        coarse.v2.iter().zip(&fine.v2).map(|(&c, &f)| extrapolate(c, f)).collect()
    } else {
        fine.v2.clone()
    };

    let abs_errors = eigenvalues.iter().zip(&targets).map(|(z, t)| (z - t).norm()).collect();
    let imag_max = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let deviations = partner.iter().zip(eigenvalues.iter().skip(1)).map(|(a, b)| (a.re - b.re).abs()).collect();

    let independent = eigenvalues_by_inverse_iteration(&fine.matrix, &targets)?;
    let solver_agreement = fine
        .roots
        .iter()
        .map(|r| independent.iter().map(|z| (z - r).norm() / r.norm().max(1.0)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);

    let reported: Vec<C64> = fine.v1.iter().map(|p| p.value).collect();
    Ok(SpectrumReport {
        params: *p,
        grid_map: map,
        grid_sizes: sizes.to_vec(),
        pt_pairing: pt_pairing(&fine.matrix, &reported),
        raw: spectra.iter().map(|s| s.v1.iter().map(|p| p.value).collect()).collect(),
        eigenvalues,
        imag_max,
        targets,
        abs_errors,
        extrapolated: converging,
        observed_orders,
        stability,
        wall_probe: probe,
        isospectrality: IsospectralityBlock { partner_eigenvalues: partner, deviations },
        solver_agreement,
        backward_errors: fine.v1.iter().map(|p| p.backward_error).collect(),
    })
}
