//! Closed-form complexified square-well superpartners.
//!
//! The tangent family lives on the well `(-π/(2k), π/(2k))` and the cotangent
//! family on `(0, π/k)`. With `α = k` and the shape-invariance constraint
//! applied, level `n` of either family has
//!
//! ```text
//! W_n  = n·k·tan(kx) + i·q·sec(kx)          (tangent)
//! W_n  = -n·k·cot(kx) + i·q·csc(kx)         (cotangent)
//! V_n  = W_n² - W_n' + (n² - 1)·k²
//! ```
//!
//! and ground state `cosⁿ(kx)·exp{-i(q/k)·ln[sec(kx) + tan(kx)]}` (resp.
//! `sinⁿ(kx)·exp{-i(q/k)·ln[csc(kx) - cot(kx)]}`), all unnormalized.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::closed_form::{ClosedFormFunction, PoleSet};
use crate::error::{Error, Result};
use crate::jet::Jet;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Cotangent,
    Tangent,
}

impl Variant {
    /// The well between adjacent singularities of the family at wave number `k`.
    pub fn well(self, k: f64) -> (f64, f64) {
        match self {
            Variant::Tangent => (-FRAC_PI_2 / k, FRAC_PI_2 / k),
            Variant::Cotangent => (0.0, PI / k),
        }
    }

    /// Midpoint of [`Variant::well`]; shifting by it centers the well on 0.
    pub fn center(self, k: f64) -> f64 {
        match self {
            Variant::Tangent => 0.0,
            Variant::Cotangent => FRAC_PI_2 / k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Tangent => "tangent",
            Variant::Cotangent => "cotangent",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tangent" => Ok(Variant::Tangent),
            "cotangent" => Ok(Variant::Cotangent),
            other => Err(Error::InvalidArgument(format!("unknown variant {other:?}"))),
        }
    }
}

/// One member of the superpartner family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyParams {
    pub variant: Variant,
    pub k: f64,
    pub q: f64,
    pub alpha: f64,
    pub n: usize,
}

impl FamilyParams {
    pub fn new(variant: Variant, k: f64, q: f64, alpha: f64, n: usize) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        if !q.is_finite() {
            return Err(Error::InvalidArgument(format!("q must be finite, got {q}")));
        }
        if n < 1 {
            return Err(Error::InvalidArgument("hierarchy level n must be at least 1".into()));
        }
        Ok(FamilyParams { variant, k, q, alpha, n })
    }

    /// The `α = k` member, the only one with closed-form superpotentials.
    pub fn specialized(variant: Variant, k: f64, q: f64, n: usize) -> Result<Self> {
        Self::new(variant, k, q, k, n)
    }

    pub fn is_specialized(&self) -> bool {
        (self.alpha - self.k).abs() <= 1e-12 * self.k
    }

    pub fn with_level(self, n: usize) -> Self {
        FamilyParams { n, ..self }
    }

    pub fn with_q(self, q: f64) -> Self {
        FamilyParams { q, ..self }
    }

    pub fn well(&self) -> (f64, f64) {
        self.variant.well(self.k)
    }

    fn require_specialized(&self) -> Result<()> {
        if self.is_specialized() {
            Ok(())
        } else {
            Err(Error::UnsupportedParameters(format!(
                "closed forms need alpha = k (alpha = {}, k = {})",
                self.alpha, self.k
            )))
        }
    }
}

/// Poles of `sec(αx)` (tangent) or `csc(αx)` (cotangent).
fn family_poles(variant: Variant, alpha: f64) -> PoleSet {
    match variant {
        Variant::Tangent => PoleSet::periodic(FRAC_PI_2 / alpha, PI / alpha),
        Variant::Cotangent => PoleSet::periodic(0.0, PI / alpha),
    }
}

fn wall_zeros(variant: Variant, k: f64) -> PoleSet {
    match variant {
        Variant::Tangent => PoleSet::periodic(FRAC_PI_2 / k, PI / k),
        Variant::Cotangent => PoleSet::periodic(0.0, PI / k),
    }
}

/// `ln(sec θ + tan θ)`, written as `ln[(1 + sin θ)/cos θ]` or
/// `ln[cos θ/(1 - sin θ)]` so that no sum cancels near either wall.
fn ln_sec_plus_tan(theta: &Jet) -> Jet {
    let (s, c) = theta.sin_cos();
    if theta.value().re >= 0.0 {
        s.add_const(re(1.0)).ln() - c.ln()
    } else {
        c.ln() - (-s).add_const(re(1.0)).ln()
    }
}

/// `ln(csc θ - cot θ)`, as `ln[(1 - cos θ)/sin θ]` or `ln[sin θ/(1 + cos θ)]`.
fn ln_csc_minus_cot(theta: &Jet) -> Jet {
    let (s, c) = theta.sin_cos();
    if theta.value().re >= FRAC_PI_2 {
        (-c).add_const(re(1.0)).ln() - s.ln()
    } else {
        s.ln() - c.add_const(re(1.0)).ln()
    }
}

/// Unnormalized `sin(kx)` and `cos(kx)`.
pub fn square_well_ground_states(k: f64) -> (ClosedFormFunction, ClosedFormFunction) {
    let sin = ClosedFormFunction::from_jet(move |x| x.scale_re(k).sin()).with_zeros(wall_zeros(Variant::Cotangent, k));
    let cos = ClosedFormFunction::from_jet(move |x| x.scale_re(k).cos()).with_zeros(wall_zeros(Variant::Tangent, k));
    (sin, cos)
}

fn jet_from_derivatives(d: &[C64]) -> Jet {
    let mut fact = 1.0;
    let c = d
        .iter()
        .enumerate()
        .map(|(m, &v)| {
            if m > 0 {
                fact *= m as f64;
            }
            v / fact
        })
        .collect();
    Jet::from_coefficients(c)
}

/// `W = -ψ'/ψ`. The result is singular at the zeros of `ψ`.
pub fn superpotential_from_wavefunction(psi: &ClosedFormFunction) -> ClosedFormFunction {
    let psi_inner = psi.clone();
    ClosedFormFunction::new(move |x, order| {
        let d = psi_inner.derivatives(x, order + 1);
        let value = jet_from_derivatives(&d[..=order]);
        let slope = jet_from_derivatives(&d[1..]);
        (-(&slope / &value)).derivatives()
    })
    .with_poles(psi.poles().union(psi.zeros()))
}

/// Checked evaluation of `-ψ'(x)/ψ(x)`.
pub fn log_derivative_at(psi: &ClosedFormFunction, x: f64) -> Result<C64> {
    let on_zero = psi.zeros().within(x - 1e-12, x + 1e-12);
    let d = psi.derivatives(x, 1);
    if !on_zero.is_empty() || d[0].norm() == 0.0 {
        return Err(Error::EvaluationAtZero { x });
    }
    let w = -d[1] / d[0];
    if w.re.is_finite() && w.im.is_finite() {
        Ok(w)
    } else {
        Err(Error::EvaluationAtZero { x })
    }
}

/// The shape-invariance constraint `q·csc(αx)` (cotangent) or `q·sec(αx)`
/// (tangent).
pub fn constraint_function(variant: Variant, q: f64, alpha: f64) -> ClosedFormFunction {
    if q == 0.0 {
        return ClosedFormFunction::constant(re(0.0));
    }
    let f = match variant {
        Variant::Tangent => ClosedFormFunction::from_jet(move |x| x.scale_re(alpha).sec().scale_re(q)),
        Variant::Cotangent => ClosedFormFunction::from_jet(move |x| x.scale_re(alpha).csc().scale_re(q)),
    };
    f.with_poles(family_poles(variant, alpha))
}

/// `k·tan(αx) + i·f(x)` or `-k·cot(αx) + i·f(x)` for an arbitrary real `f`.
pub fn general_superpotential(
    variant: Variant,
    k: f64,
    alpha: f64,
    imaginary: &ClosedFormFunction,
) -> ClosedFormFunction {
    let real = match variant {
        Variant::Tangent => ClosedFormFunction::from_jet(move |x| x.scale_re(alpha).tan().scale_re(k)),
        Variant::Cotangent => ClosedFormFunction::from_jet(move |x| x.scale_re(alpha).cot().scale_re(-k)),
    }
    .with_poles(family_poles(variant, alpha));
    &real + &imaginary.scale(im(1.0))
}

/// The closed-form superpotential of level `p.n` (requires `α = k`).
pub fn build_superpotential(p: &FamilyParams) -> Result<ClosedFormFunction> {
    p.require_specialized()?;
    let (k, q, n) = (p.k, p.q, p.n as f64);
    let (w, f) = match p.variant {
        Variant::Tangent => (
            ClosedFormFunction::from_jet(move |x| {
                let kx = x.scale_re(k);
                let (s, c) = kx.sin_cos();
                let sec = c.recip();
                (&s * &sec).scale_re(n * k) + sec.scale(im(q))
            }),
            ClosedFormFunction::from_jet(move |x| {
                let kx = x.scale_re(k);
                kx.cos().ln().scale_re(-n) + ln_sec_plus_tan(&kx).scale(im(q / k))
            }),
        ),
        Variant::Cotangent => (
            ClosedFormFunction::from_jet(move |x| {
                let kx = x.scale_re(k);
                let (s, c) = kx.sin_cos();
                let csc = s.recip();
                (&c * &csc).scale_re(-n * k) + csc.scale(im(q))
            }),
            ClosedFormFunction::from_jet(move |x| {
                let kx = x.scale_re(k);
                kx.sin().ln().scale_re(-n) + ln_csc_minus_cot(&kx).scale(im(q / k))
            }),
        ),
    };
    let poles = family_poles(p.variant, k);
    Ok(w.with_poles(poles.clone()).with_primitive(f.with_poles(poles)))
}

/// Partner potentials `W² ∓ W' + e0`.
#[derive(Clone, Debug)]
pub struct PartnerPair {
    pub v1: ClosedFormFunction,
    pub v2: ClosedFormFunction,
    pub e0: f64,
}

pub fn partner_pair_from_superpotential(w: &ClosedFormFunction, e0: f64) -> PartnerPair {
    let w2 = w * w;
    let dw = w.derivative();
    PartnerPair { v1: (&w2 - &dw).add_const(re(e0)), v2: (&w2 + &dw).add_const(re(e0)), e0 }
}

/// Ground-state energy of level `n` at wave number `k`: `(n² - 1)·k²`.
pub fn level_offset(n: usize, k: f64) -> f64 {
    ((n * n) as f64 - 1.0) * k * k
}

/// Level-`n` potential and its partner assembled term by term:
/// `[n(n∓1)k² - q²]·sec²(kx) - k² + i(2n∓1)·q·k·tan(kx)·sec(kx)` for the
/// tangent family and the `csc`/`-cot` analogue for the cotangent family.
pub fn closed_form_potentials(p: &FamilyParams) -> Result<PartnerPair> {
    p.require_specialized()?;
    let (k, q, n) = (p.k, p.q, p.n as f64);
    let variant = p.variant;
    let level = move |m: f64| {
        ClosedFormFunction::from_jet(move |x| {
            let kx = x.scale_re(k);
            let (s, c) = kx.sin_cos();
            match variant {
                Variant::Tangent => {
                    let sec = c.recip();
                    let sec2 = &sec * &sec;
                    sec2.scale_re(m * (m - 1.0) * k * k - q * q).add_const(re(-k * k))
                        + (&s * &sec2).scale(im((2.0 * m - 1.0) * q * k))
                }
                Variant::Cotangent => {
                    let csc = s.recip();
                    let csc2 = &csc * &csc;
                    csc2.scale_re(m * (m - 1.0) * k * k - q * q).add_const(re(-k * k))
                        + (&c * &csc2).scale(im(-(2.0 * m - 1.0) * q * k))
                }
            }
        })
        .with_poles(family_poles(variant, k))
    };
    Ok(PartnerPair { v1: level(n), v2: level(n + 1.0), e0: level_offset(p.n, k) })
}

/// `R(x) = V₂(k, x) - V₁(k + α, x)` for the `n = 1` family with an arbitrary
/// imaginary part `f`, without the `α = k` specialization.
pub fn remainder_for(variant: Variant, k: f64, alpha: f64, imaginary: &ClosedFormFunction) -> ClosedFormFunction {
    let here = partner_pair_from_superpotential(&general_superpotential(variant, k, alpha, imaginary), 0.0);
    let shifted = partner_pair_from_superpotential(&general_superpotential(variant, k + alpha, alpha, imaginary), 0.0);
    &here.v2 - &shifted.v1
}

/// The remainder with `f` fixed by the shape-invariance constraint; constant
/// `α(α + 2k)`.
pub fn shape_invariance_remainder(p: &FamilyParams) -> ClosedFormFunction {
    remainder_for(p.variant, p.k, p.alpha, &constraint_function(p.variant, p.q, p.alpha))
}

/// `W_n² + W_n' - (W_{n+1}² - W_{n+1}')` along the fixed-k hierarchy;
/// constant `(2n + 1)·k²`.
pub fn level_remainder(p: &FamilyParams) -> Result<ClosedFormFunction> {
    let here = partner_pair_from_superpotential(&build_superpotential(p)?, 0.0);
    let next = partner_pair_from_superpotential(&build_superpotential(&p.with_level(p.n + 1))?, 0.0);
    Ok(&here.v2 - &next.v1)
}

/// `(2n + 1)·k_n²`.
pub fn remainder_value(n: usize, k_n: f64) -> f64 {
    (2 * n + 1) as f64 * k_n * k_n
}

/// `k_n = n + 1`.
pub fn wave_number(n: usize) -> f64 {
    (n + 1) as f64
}

/// `E_n = k_n² - 1 = n(n + 2)`.
pub fn energy_spectrum(n: usize) -> f64 {
    (n * (n + 2)) as f64
}

/// Checks that `cos(kx) > 0` (tangent) or `sin(kx) > 0` (cotangent) on the
/// open interval, so that the logarithm in the ground-state phase stays on the
/// principal branch.
fn check_branch(variant: Variant, k: f64, lo: f64, hi: f64) -> Result<()> {
    let (t_lo, t_hi) = (k * lo, k * hi);
    let mid = 0.5 * (t_lo + t_hi);
    // positive half-period of cos is (-π/2, π/2) + 2πm, of sin (0, π) + 2πm
    let start_offset = match variant {
        Variant::Tangent => -FRAC_PI_2,
        Variant::Cotangent => 0.0,
    };
    let m = ((mid - start_offset) / (2.0 * PI)).floor();
    let start = start_offset + 2.0 * PI * m;
    let end = start + PI;
    let slack = 1e-12 * (1.0 + t_lo.abs().max(t_hi.abs()));
    if t_lo >= start - slack && t_hi <= end + slack {
        return Ok(());
    }
    let bad = if t_lo < start - slack {
        start
    } else if t_hi > end + slack {
        end
    } else {
        mid
    };
    Err(Error::BranchViolation { x: bad / k })
}

/// Unnormalized ground state of level `p.n`, valid on `domain`.
pub fn ground_state_wavefunction(p: &FamilyParams, domain: (f64, f64)) -> Result<ClosedFormFunction> {
    p.require_specialized()?;
    check_branch(p.variant, p.k, domain.0, domain.1)?;
    let (k, q, n) = (p.k, p.q, p.n as u32);
    let psi = match p.variant {
        Variant::Tangent => ClosedFormFunction::from_jet(move |x| {
            let kx = x.scale_re(k);
            &kx.cos().powi(n) * &ln_sec_plus_tan(&kx).scale(im(-q / k)).exp()
        }),
        Variant::Cotangent => ClosedFormFunction::from_jet(move |x| {
            let kx = x.scale_re(k);
            &kx.sin().powi(n) * &ln_csc_minus_cot(&kx).scale(im(-q / k)).exp()
        }),
    };
    Ok(psi.with_zeros(wall_zeros(p.variant, k)))
}

const ANTIDERIVATIVE_PANELS: usize = 2048;

fn simpson(w: &ClosedFormFunction, a: f64, b: f64) -> C64 {
    let n = ANTIDERIVATIVE_PANELS;
    let h = (b - a) / n as f64;
    let mut s = w.eval(a) + w.eval(b);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w.eval(a + i as f64 * h) * weight;
    }
    s * (h / 3.0)
}

/// `f(x) = ∫_anchor^x W(t) dt`, so that `exp{-f}` is the ground state
/// belonging to `W`.
///
/// Uses the attached closed-form primitive when `W` carries one and composite
/// Simpson integration from the anchor otherwise. The numerical antiderivative
/// evaluates to NaN when the path to `x` crosses a pole of `W`.
pub fn exponent_from_superpotential(w: &ClosedFormFunction, anchor: f64) -> Result<ClosedFormFunction> {
    if let Some(&pole) = w.poles().within(anchor - 1e-12, anchor + 1e-12).first() {
        return Err(Error::PoleOnPath { pole });
    }
    if let Some(f) = w.primitive() {
        let offset = f.eval(anchor);
        return Ok(f.add_const(-offset).with_poles(w.poles().clone()));
    }
    Ok(numerical_antiderivative(w, anchor))
}

/// Composite Simpson antiderivative anchored at `anchor`, independent of any
/// attached closed-form primitive.
pub fn numerical_antiderivative(w: &ClosedFormFunction, anchor: f64) -> ClosedFormFunction {
    let w_inner = w.clone();
    ClosedFormFunction::new(move |x, order| {
        let (a, b) = if x < anchor { (x, anchor) } else { (anchor, x) };
        let value = if !w_inner.poles().within(a, b).is_empty() {
            C64::new(f64::NAN, f64::NAN)
        } else if x == anchor {
            re(0.0)
        } else {
            simpson(&w_inner, anchor, x)
        };
        let mut d = vec![value];
        if order > 0 {
            d.extend(w_inner.derivatives(x, order - 1));
        }
        d
    })
    .with_poles(w.poles().clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HierarchyMode {
    /// `k` held fixed at the base value on every level.
    FixedK,
    /// `k_j = j + 1` substituted literally on level `j`.
    PaperK,
}

impl FromStr for HierarchyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-k" => Ok(HierarchyMode::FixedK),
            "paper-k" => Ok(HierarchyMode::PaperK),
            other => Err(Error::InvalidArgument(format!("unknown hierarchy mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HierarchyFlag {
    PolesInsideDomain,
}

#[derive(Clone, Debug)]
pub struct HierarchyLevel {
    pub level: usize,
    pub params: FamilyParams,
    pub superpotential: ClosedFormFunction,
    pub pair: PartnerPair,
    pub e0: f64,
    pub interior_poles: Vec<f64>,
    pub flags: Vec<HierarchyFlag>,
}

/// Levels `1..=depth` of the Hamiltonian hierarchy over the well of `p`.
pub fn hierarchy(p: &FamilyParams, depth: usize, mode: HierarchyMode) -> Result<Vec<HierarchyLevel>> {
    if depth < 1 {
        return Err(Error::InvalidArgument("hierarchy depth must be at least 1".into()));
    }
    p.require_specialized()?;
    let (lo, hi) = p.well();
    (1..=depth)
        .map(|level| {
            let k = match mode {
                HierarchyMode::FixedK => p.k,
                HierarchyMode::PaperK => wave_number(level),
            };
            let params = FamilyParams::specialized(p.variant, k, p.q, level)?;
            let w = build_superpotential(&params)?;
            let e0 = level_offset(level, k);
            let pair = partner_pair_from_superpotential(&w, e0);
            let interior_poles = pair.v1.poles().interior(lo, hi, 1e-9 * (hi - lo));
            let flags = if interior_poles.is_empty() { Vec::new() } else { vec![HierarchyFlag::PolesInsideDomain] };
            Ok(HierarchyLevel { level, params, superpotential: w, pair, e0, interior_poles, flags })
        })
        .collect()
}
