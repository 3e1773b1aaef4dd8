//! Ladder operators, Hamiltonian application and factorization checks on
//! Dirichlet grids.
//!
//! Grid derivatives use fourth-order centered stencils in the computational
//! coordinate. Wall values are zero. The first and last nodes use one-sided
//! six-point closures that include the wall value, so every node keeps at
//! least fourth-order accuracy for functions that are smooth up to the walls.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::ClosedFormFunction;
use crate::domain::{sample, ComplexGridFunction, Grid};
use crate::error::{Error, Result};
use crate::susy::{
    build_superpotential, closed_form_potentials, ground_state_wavefunction, FamilyParams, HierarchyMode, PartnerPair,
};
use crate::symmetry::{apply_conjugation, normalize_state, ConjugationStrategy};

/// Finite-difference weights for derivatives `0..=order` at `z` from the
/// stencil points `xs` (Fornberg's recursion). `w[m][j]` multiplies `u(xs[j])`.
pub fn fornberg_weights(z: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

struct Stencils {
    center1: [f64; 5],
    center2: [f64; 5],
    // first node: points -1..=4 relative to the node, -1 being the wall
    left1: [f64; 6],
    left2: [f64; 6],
}

fn stencils() -> Stencils {
    let centered = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
    let left = fornberg_weights(0.0, &[-1.0, 0.0, 1.0, 2.0, 3.0, 4.0], 2);
    let arr5 = |v: &[f64]| -> [f64; 5] { v.try_into().unwrap() };
    let arr6 = |v: &[f64]| -> [f64; 6] { v.try_into().unwrap() };
    Stencils { center1: arr5(&centered[1]), center2: arr5(&centered[2]), left1: arr6(&left[1]), left2: arr6(&left[2]) }
}

fn dot<'a>(pts: impl Iterator<Item = &'a C64>, w: &[f64]) -> C64 {
    pts.zip(w).map(|(u, w)| u * w).sum()
}

/// First and second derivatives with respect to the computational coordinate.
fn computational_derivatives(values: &[C64], h: f64) -> (Vec<C64>, Vec<C64>) {
    let n = values.len();
    let s = stencils();
    // padded with the wall zeros: ext[j + 1] = values[j]
    let mut ext = Vec::with_capacity(n + 2);
    ext.push(C64::new(0.0, 0.0));
    ext.extend_from_slice(values);
    ext.push(C64::new(0.0, 0.0));
    let zero = C64::new(0.0, 0.0);
    let mut d1 = vec![zero; n];
    let mut d2 = vec![zero; n];
    for j in 0..n {
        let e = j + 1;
        let (a, b) = if e >= 2 && e + 2 < n + 2 {
            let pts = &ext[e - 2..=e + 2];
            (dot(pts.iter(), &s.center1), dot(pts.iter(), &s.center2))
        } else if e < 2 {
            let pts = &ext[e - 1..=e + 4];
            (dot(pts.iter(), &s.left1), dot(pts.iter(), &s.left2))
        } else {
            // mirror image of the left closure: odd weights flip sign for d1
            let pts = &ext[e - 4..=e + 1];
            (-dot(pts.iter().rev(), &s.left1), dot(pts.iter().rev(), &s.left2))
        };
        d1[j] = a / h;
        d2[j] = b / (h * h);
    }
    (d1, d2)
}

/// `u'` and `u''` in the physical coordinate.
pub fn grid_derivatives(u: &ComplexGridFunction) -> (ComplexGridFunction, ComplexGridFunction) {
    let g = u.grid();
    if u.len() < 6 {
        panic!("grid derivatives need at least 6 nodes, got {}", u.len());
    }
    let (dy, dyy) = computational_derivatives(u.values(), g.spacing());
    let jac = g.jacobian();
    let ld = g.jacobian_log_deriv();
    let d1: Vec<C64> = dy.iter().zip(jac).map(|(d, &j)| d / j).collect();
    let d2: Vec<C64> =
        dyy.iter().zip(&dy).enumerate().map(|(i, (dd, d))| (dd - d * ld[i]) / (jac[i] * jac[i])).collect();
    (ComplexGridFunction::from_raw(g.clone(), d1), ComplexGridFunction::from_raw(g.clone(), d2))
}

pub fn first_derivative(u: &ComplexGridFunction) -> ComplexGridFunction {
    grid_derivatives(u).0
}

pub fn second_derivative(u: &ComplexGridFunction) -> ComplexGridFunction {
    grid_derivatives(u).1
}

/// Samples an operator coefficient, rejecting grids with a node on one of its
/// poles.
pub fn sample_coefficient(f: &ClosedFormFunction, grid: &Arc<Grid>) -> Result<ComplexGridFunction> {
    for pole in f.poles().within(grid.lo(), grid.hi()) {
        let tol = 1e-12 * pole.abs().max(1.0);
        if let Some(index) = grid.nodes().iter().position(|&x| (x - pole).abs() <= tol) {
            return Err(Error::PoleOnGrid { index, x: grid.node(index) });
        }
    }
    sample(f, grid).map_err(|e| match e {
        Error::NonFiniteSample { index, x } => Error::PoleOnGrid { index, x },
        other => other,
    })
}

/// `s·d/dx + W` with `W` optionally conjugated.
#[derive(Clone, Debug)]
pub struct LadderOperator {
    pub w: ClosedFormFunction,
    pub derivative_sign: f64,
    pub conjugate_w: bool,
}

impl LadderOperator {
    /// `A = d/dx + W`.
    pub fn a(w: &ClosedFormFunction) -> Self {
        LadderOperator { w: w.clone(), derivative_sign: 1.0, conjugate_w: false }
    }

    /// `A^APT = -d/dx + W`.
    pub fn a_apt(w: &ClosedFormFunction) -> Self {
        LadderOperator { w: w.clone(), derivative_sign: -1.0, conjugate_w: false }
    }

    /// `A† = -d/dx + conj(W)`.
    pub fn a_dagger(w: &ClosedFormFunction) -> Self {
        LadderOperator { w: w.clone(), derivative_sign: -1.0, conjugate_w: true }
    }

    fn coefficient(&self) -> ClosedFormFunction {
        if self.conjugate_w {
            self.w.conj()
        } else {
            self.w.clone()
        }
    }

    pub fn apply(&self, psi: &ComplexGridFunction) -> Result<ComplexGridFunction> {
        apply_ladder(self, psi)
    }

    /// Applies the operator to a closed form with exact derivatives.
    pub fn apply_exact(&self, psi: &ClosedFormFunction) -> ClosedFormFunction {
        let d = psi.derivative().scale(C64::new(self.derivative_sign, 0.0));
        &d + &(&self.coefficient() * psi)
    }
}

fn first_order(sign: f64, coeff: &ComplexGridFunction, psi: &ComplexGridFunction) -> Result<ComplexGridFunction> {
    first_derivative(psi).scale(C64::new(sign, 0.0)).add(&coeff.mul(psi)?)
}

pub fn apply_ladder(l: &LadderOperator, psi: &ComplexGridFunction) -> Result<ComplexGridFunction> {
    let w = sample_coefficient(&l.coefficient(), psi.grid())?;
    first_order(l.derivative_sign, &w, psi)
}

/// `-ψ'' + V·ψ`.
pub fn hamiltonian_apply(v: &ClosedFormFunction, psi: &ComplexGridFunction) -> Result<ComplexGridFunction> {
    let v = sample_coefficient(v, psi.grid())?;
    second_derivative(psi).scale(C64::new(-1.0, 0.0)).add(&v.mul(psi)?)
}

/// Which first-order operator plays the role of the adjoint of `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjoint {
    /// `-d/dx + W`
    Apt,
    /// `-d/dx + conj(W)`
    Hermitian,
}

impl Adjoint {
    pub fn ladder(self, w: &ClosedFormFunction) -> LadderOperator {
        match self {
            Adjoint::Apt => LadderOperator::a_apt(w),
            Adjoint::Hermitian => LadderOperator::a_dagger(w),
        }
    }
}

/// Sup-norms of `B·A·ψ - (-ψ'' + (V₁ - e0)·ψ)` and `A·B·ψ - (-ψ'' + (V₂ - e0)·ψ)`
/// with `B = A^APT`.
pub fn factorization_residual(
    w: &ClosedFormFunction,
    pair: &PartnerPair,
    psi: &ComplexGridFunction,
) -> Result<(f64, f64)> {
    factorization_residual_with(w, pair, psi, Adjoint::Apt)
}

/// [`factorization_residual`] with a chosen adjoint `B`.
pub fn factorization_residual_with(
    w: &ClosedFormFunction,
    pair: &PartnerPair,
    psi: &ComplexGridFunction,
    adjoint: Adjoint,
) -> Result<(f64, f64)> {
    let a = LadderOperator::a(w);
    let b = adjoint.ladder(w);
    let shift = C64::new(-pair.e0, 0.0);
    let lower = b.apply(&a.apply(psi)?)?;
    let upper = a.apply(&b.apply(psi)?)?;
    let h1 = hamiltonian_apply(&pair.v1.add_const(shift), psi)?;
    let h2 = hamiltonian_apply(&pair.v2.add_const(shift), psi)?;
    Ok((lower.max_distance(&h1)?, upper.max_distance(&h2)?))
}

/// Sup-norm of `H₂^APT·ψ - H₁·ψ`, where `H₁ = A^APT·A` and `H₂^APT` is
/// `H₂ = A·A^APT` with `d/dx ↦ -d/dx` and `W ↦ Λ_APT W = -conj(W(-x))`.
/// Vanishes identically for APT-symmetric `W`.
pub fn apt_partner_relation_check(w: &ClosedFormFunction, psi: &ComplexGridFunction) -> Result<f64> {
    let g = psi.grid();
    if !g.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let ws = sample_coefficient(w, g)?;
    let wt = apply_conjugation(ConjugationStrategy::Apt, &ws)?;
    let h1 = first_order(-1.0, &ws, &first_order(1.0, &ws, psi)?)?;
    let h2 = first_order(-1.0, &wt, &first_order(1.0, &wt, psi)?)?;
    h2.max_distance(&h1)
}

/// Relative residual `‖Hψ - Eψ‖_sup / ‖ψ‖_sup`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residuals {
    /// With exact derivatives of the closed form.
    pub exact: f64,
    /// With the grid stencils.
    pub grid: f64,
    /// With the grid stencils, ignoring the outer tenth of the nodes on each side.
    pub grid_interior: f64,
}

#[derive(Clone, Debug)]
pub struct ExcitedState {
    pub index: usize,
    pub energy: f64,
    pub closed_form: ClosedFormFunction,
    pub state: ComplexGridFunction,
    pub residuals: Residuals,
}

fn relative(res: &ComplexGridFunction, psi: &ComplexGridFunction, margin: Option<usize>) -> f64 {
    match margin {
        Some(m) => res.sup_norm_interior(m) / psi.sup_norm_interior(m),
        None => res.sup_norm() / psi.sup_norm(),
    }
}

/// Residuals of `H = -d²/dx² + V` with eigenvalue `energy` for a closed-form
/// state sampled on `grid`.
pub fn eigen_residuals(
    v: &ClosedFormFunction,
    psi: &ClosedFormFunction,
    energy: f64,
    grid: &Arc<Grid>,
) -> Result<Residuals> {
    let samples = sample(psi, grid)?;
    let vs = sample_coefficient(v, grid)?;
    let exact: Vec<C64> = grid
        .nodes()
        .iter()
        .zip(vs.values())
        .map(|(&x, &vx)| {
            let d = psi.derivatives(x, 2);
            -d[2] + (vx - energy) * d[0]
        })
        .collect();
    let exact = ComplexGridFunction::from_values(grid, exact)?;
    let fd = hamiltonian_apply(v, &samples)?.sub(&samples.scale(C64::new(energy, 0.0)))?;
    let margin = grid.n_interior() / 10;
    Ok(Residuals {
        exact: relative(&exact, &samples, None),
        grid: relative(&fd, &samples, None),
        grid_interior: relative(&fd, &samples, Some(margin)),
    })
}

/// The `j`-th state of the level-one Hamiltonian, obtained from the ground
/// state of level `j + 1` by the lowering chain `A^APT_1 ⋯ A^APT_j`.
pub fn excited_state_closed_form(p: &FamilyParams, j: usize) -> Result<ClosedFormFunction> {
    let base = p.with_level(1);
    let mut psi = ground_state_wavefunction(&base.with_level(j + 1), base.well())?;
    for level in (1..=j).rev() {
        let w = build_superpotential(&base.with_level(level))?;
        psi = LadderOperator::a_apt(&w).apply_exact(&psi);
    }
    Ok(psi)
}

pub const MAX_EXCITED_STATES: usize = 8;

/// The lowest `count` states of the level-one Hamiltonian of `p`, normalized
/// and sampled on `grid`, with their residuals against `E_j = j(j+2)·k²`.
pub fn build_excited_states(
    p: &FamilyParams,
    count: usize,
    mode: HierarchyMode,
    grid: &Arc<Grid>,
) -> Result<Vec<ExcitedState>> {
    if mode != HierarchyMode::FixedK {
        return Err(Error::UnsupportedMode);
    }
    if count > MAX_EXCITED_STATES {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_EXCITED_STATES} excited states are supported, asked for {count}"
        )));
    }
    let base = p.with_level(1);
    let v1 = closed_form_potentials(&base)?.v1;
    (0..count)
        .into_par_iter()
        .map(|j| {
            let psi = excited_state_closed_form(&base, j)?;
            let energy = (j * (j + 2)) as f64 * base.k * base.k;
            let residuals = eigen_residuals(&v1, &psi, energy, grid)?;
            let state = normalize_state(&sample(&psi, grid)?)?;
            Ok(ExcitedState { index: j, energy, closed_form: psi, state, residuals })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::susy::{partner_pair_from_superpotential, Variant};
    use std::f64::consts::FRAC_PI_2;

    fn tangent(q: f64) -> FamilyParams {
        FamilyParams::specialized(Variant::Tangent, 1.0, q, 1).unwrap()
    }

    fn gaussian() -> ClosedFormFunction {
        ClosedFormFunction::from_jet(|x| (x * x).scale_re(-0.5).exp())
    }

    fn cos2() -> ClosedFormFunction {
        ClosedFormFunction::from_jet(|x| x.cos().powi(2))
    }

    #[test]
    fn fornberg_reproduces_classic_stencils() {
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-14);
            assert!((w[2][j] - d2[j]).abs() < 1e-14);
        }
        assert_eq!(w[0][2], 1.0);
    }

    #[test]
    fn derivatives_are_fourth_order_up_to_the_walls() {
        // sin²(x)·cos(x) vanishes at ±π/2; errors shrink 16x per halving
        let f = ClosedFormFunction::from_jet(|x| &x.sin().powi(2) * &x.cos());
        let err = |n: usize| {
            let g = Grid::well(n).unwrap();
            let (d1, d2) = grid_derivatives(&sample(&f, &g).unwrap());
            let e1 = d1.max_distance(&ComplexGridFunction::from_fn(&g, |x| f.deriv1(x)).unwrap()).unwrap();
            let e2 = d2.max_distance(&ComplexGridFunction::from_fn(&g, |x| f.deriv2(x)).unwrap()).unwrap();
            (e1, e2)
        };
        let (a, b) = (err(51), err(103));
        assert!(a.0 / b.0 > 12.0, "{a:?} {b:?}");
        assert!(a.1 / b.1 > 12.0, "{a:?} {b:?}");
    }

    #[test]
    fn stretched_grid_derivatives() {
        // the outermost nodes divide by a vanishing Jacobian, so only the bulk is checked
        let g = Grid::stretched(FRAC_PI_2, 2001, 12.0).unwrap();
        let f = cos2();
        let (d1, d2) = grid_derivatives(&sample(&f, &g).unwrap());
        let e1 = d1.sub(&ComplexGridFunction::from_fn(&g, |x| f.deriv1(x)).unwrap()).unwrap();
        let e2 = d2.sub(&ComplexGridFunction::from_fn(&g, |x| f.deriv2(x)).unwrap()).unwrap();
        let margin = g.n_interior() / 10;
        assert!(e1.sup_norm_interior(margin) < 1e-6, "{}", e1.sup_norm_interior(margin));
        assert!(e2.sup_norm_interior(margin) < 1e-5, "{}", e2.sup_norm_interior(margin));
    }

    #[test]
    fn ladder_examples() {
        let g = Grid::symmetric(8.0, 4001).unwrap();
        let psi = sample(&gaussian(), &g).unwrap();
        let x = ClosedFormFunction::identity();
        assert!(apply_ladder(&LadderOperator::a(&x), &psi).unwrap().sup_norm() < 1e-8);
        let up = apply_ladder(&LadderOperator::a_apt(&x), &psi).unwrap();
        let expect = ComplexGridFunction::from_fn(&g, |x| C64::new(2.0 * x * (-0.5 * x * x).exp(), 0.0)).unwrap();
        assert!(up.max_distance(&expect).unwrap() < 1e-8);

        let exact = LadderOperator::a_apt(&x).apply_exact(&gaussian());
        assert!((exact.eval(1.3) - C64::new(2.6 * (-0.845f64).exp(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn ground_state_annihilation() {
        let g = Grid::well(4001).unwrap();
        let p = tangent(0.0);
        let w = build_superpotential(&p).unwrap();
        let psi = sample(&ground_state_wavefunction(&p, p.well()).unwrap(), &g).unwrap();
        assert!(apply_ladder(&LadderOperator::a(&w), &psi).unwrap().sup_norm() < 1e-6);
        // with q ≠ 0 the exact annihilation holds in closed form
        let p = tangent(2.0);
        let w = build_superpotential(&p).unwrap();
        let psi = ground_state_wavefunction(&p, p.well()).unwrap();
        let a_psi = LadderOperator::a(&w).apply_exact(&psi);
        for x in [-1.5, -0.3, 0.0, 0.9, 1.55] {
            assert!(a_psi.eval(x).norm() < 1e-13);
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let g = Grid::well(4001).unwrap();
        let cos = sample(&ClosedFormFunction::from_jet(|x| x.cos()), &g).unwrap();
        let out = hamiltonian_apply(&ClosedFormFunction::constant(C64::new(-1.0, 0.0)), &cos).unwrap();
        // roundoff of the second difference is about eps/h²
        assert!(out.sup_norm() < 1e-8);

        let wide = Grid::symmetric(8.0, 4001).unwrap();
        let psi = sample(&gaussian(), &wide).unwrap();
        let x2 = &ClosedFormFunction::identity() * &ClosedFormFunction::identity();
        assert!(hamiltonian_apply(&x2, &psi).unwrap().max_distance(&psi).unwrap() < 1e-8);

        let g3 = Grid::symmetric(FRAC_PI_2 * 3.0, 5).unwrap();
        let w = build_superpotential(&tangent(2.0)).unwrap();
        assert!(matches!(
            hamiltonian_apply(&w, &ComplexGridFunction::zeros(&g3)),
            Err(Error::PoleOnGrid { index: 1, .. })
        ));
    }

    #[test]
    fn singular_ground_state_residual_grows_like_inverse_spacing() {
        let p = tangent(2.0);
        let v = closed_form_potentials(&p).unwrap().v1;
        let psi = ground_state_wavefunction(&p, p.well()).unwrap();
        let r1 = eigen_residuals(&v, &psi, 0.0, &Grid::well(1001).unwrap()).unwrap();
        let r2 = eigen_residuals(&v, &psi, 0.0, &Grid::well(2001).unwrap()).unwrap();
        assert!(r1.exact < 1e-10 && r2.exact < 1e-10, "{r1:?} {r2:?}");
        assert!(r2.grid_interior < 1e-7 && r1.grid_interior / r2.grid_interior > 12.0, "{r1:?} {r2:?}");
        let ratio = r2.grid / r1.grid;
        assert!(ratio > 1.8 && ratio < 2.2, "{r1:?} {r2:?}");
    }

    #[test]
    fn factorization_examples() {
        let g = Grid::symmetric(8.0, 4001).unwrap();
        let x = ClosedFormFunction::identity();
        let pair = partner_pair_from_superpotential(&x, 0.0);
        let (r1, r2) = factorization_residual(&x, &pair, &sample(&gaussian(), &g).unwrap()).unwrap();
        assert!(r1 < 1e-8 && r2 < 1e-8, "{r1} {r2}");

        let well = Grid::well(4001).unwrap();
        let psi = sample(&cos2(), &well).unwrap();
        let w = build_superpotential(&tangent(2.0)).unwrap();
        let pair = partner_pair_from_superpotential(&w, 0.0);
        let (r1, r2) = factorization_residual(&w, &pair, &psi).unwrap();
        assert!(r1 < 1e-5 && r2 < 1e-5, "{r1} {r2}");
        let (h1, _) = factorization_residual_with(&w, &pair, &psi, Adjoint::Hermitian).unwrap();
        assert!(h1 >= 0.1, "{h1}");
    }

    #[test]
    fn adjoints_differ_by_twice_the_imaginary_part() {
        let g = Grid::well(2001).unwrap();
        let psi = sample(&cos2(), &g).unwrap();
        let w = build_superpotential(&tangent(2.0)).unwrap();
        let dagger = apply_ladder(&LadderOperator::a_dagger(&w), &psi).unwrap();
        let apt = apply_ladder(&LadderOperator::a_apt(&w), &psi).unwrap();
        let expect = g.nodes().iter().zip(psi.values()).map(|(x, v)| 4.0 * (v / x.cos()).norm()).fold(0.0, f64::max);
        assert!((dagger.max_distance(&apt).unwrap() - expect).abs() < 1e-8);
    }

    #[test]
    fn apt_partner_relation_examples() {
        let g = Grid::symmetric(8.0, 4001).unwrap();
        let x = ClosedFormFunction::identity();
        assert!(apt_partner_relation_check(&x, &sample(&gaussian(), &g).unwrap()).unwrap() < 1e-8);

        let well = Grid::well(4001).unwrap();
        let psi = sample(&cos2(), &well).unwrap();
        let w = build_superpotential(&tangent(2.0)).unwrap();
        assert!(apt_partner_relation_check(&w, &psi).unwrap() < 1e-5);
        let cos = ClosedFormFunction::from_jet(|x| x.cos());
        assert!(apt_partner_relation_check(&cos, &psi).unwrap() >= 0.1);

        let asym = Grid::new(0.0, 1.0, 11).unwrap();
        assert_eq!(
            apt_partner_relation_check(&x, &ComplexGridFunction::zeros(&asym)).unwrap_err(),
            Error::AsymmetricGrid
        );
    }

    #[test]
    fn excited_states_of_the_real_well() {
        let g = Grid::well(2001).unwrap();
        let states = build_excited_states(&tangent(0.0), 4, HierarchyMode::FixedK, &g).unwrap();
        for s in &states {
            let m = (s.index + 1) as f64;
            let textbook = normalize_state(
                &ComplexGridFunction::from_fn(&g, |x| C64::new((m * (x + FRAC_PI_2)).sin(), 0.0)).unwrap(),
            )
            .unwrap();
            let d = s
                .state
                .max_distance(&textbook)
                .unwrap()
                .min(s.state.max_distance(&textbook.scale(C64::new(-1.0, 0.0))).unwrap());
            assert!(d < 1e-10, "state {}: {d}", s.index);
            assert!(s.residuals.grid < 1e-4 && s.residuals.exact < 1e-10, "{:?}", s.residuals);
        }
    }

    #[test]
    fn excited_states_with_imaginary_part() {
        let g = Grid::well(4001).unwrap();
        let p = tangent(2.0);
        let states = build_excited_states(&p, 3, HierarchyMode::FixedK, &g).unwrap();
        let ground = normalize_state(&sample(&ground_state_wavefunction(&p, p.well()).unwrap(), &g).unwrap()).unwrap();
        assert!(states[0].state.max_distance(&ground).unwrap() < 1e-12);
        for s in &states {
            assert!(s.residuals.exact < 1e-10 && s.residuals.grid_interior < 1e-7, "{:?}", s.residuals);
        }
        // A maps eigenstates of H₁ onto eigenstates of H₂ with the same energy
        let pair = closed_form_potentials(&p).unwrap();
        let w = build_superpotential(&p).unwrap();
        for s in &states[1..] {
            let mapped = LadderOperator::a(&w).apply_exact(&s.closed_form);
            let r = eigen_residuals(&pair.v2, &mapped, s.energy, &g).unwrap();
            assert!(r.exact < 1e-6 && r.grid_interior < 1e-6, "{r:?}");
        }
        assert!(matches!(build_excited_states(&p, 2, HierarchyMode::PaperK, &g), Err(Error::UnsupportedMode)));
        assert!(build_excited_states(&p, 9, HierarchyMode::FixedK, &g).is_err());
    }
}
