//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; errors come back as `{"error": ...}`.

use ptsusy::figures::{figure_rows, figure_series};
use ptsusy::numerics::{branch_states, spectrum_report, Stability};
use ptsusy::susy::{build_superpotential, closed_form_potentials, FamilyParams, Variant};
use ptsusy::symmetry::{classify_apt, classify_pt, gram_matrix, ConjugationStrategy};
use ptsusy::{sample, ComplexGridFunction, Grid};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

/// Points per curve; enough for a canvas a few hundred pixels wide.
pub const CURVE_POINTS: usize = 601;
const MAX_GRID: usize = 4001;

#[derive(Serialize)]
struct Curve {
    name: String,
    x: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn variant(name: &str) -> Result<Variant, String> {
    name.parse().map_err(|e: ptsusy::Error| e.to_string())
}

fn params(name: &str, k: f64, q: f64) -> Result<FamilyParams, String> {
    FamilyParams::specialized(variant(name)?, k, q, 1).map_err(|e| e.to_string())
}

fn grid_size(n: usize) -> Result<usize, String> {
    if (201..=MAX_GRID).contains(&n) && n % 2 == 1 {
        Ok(n)
    } else {
        Err(format!("grid size must be odd and within 201..={MAX_GRID}, got {n}"))
    }
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    let value = match r {
        Ok(v) => serde_json::to_value(v),
        Err(e) => Ok(serde_json::json!({ "error": e })),
    };
    value.map_or_else(|e| format!("{{\"error\":\"{e}\"}}"), |v| v.to_string())
}

/// The nine figure curves at `(k, q)`, clamped to `±ceiling`.
pub fn curves_json(k: f64, q: f64, ceiling: f64) -> String {
    to_json((|| {
        let series = figure_series(k, q).map_err(|e| e.to_string())?;
        series
            .iter()
            .map(|s| {
                let rows = figure_rows(&s.function, s.domain, CURVE_POINTS, ceiling).map_err(|e| e.to_string())?;
                Ok(Curve {
                    name: s.name.clone(),
                    x: rows.iter().map(|r| r.x).collect(),
                    re: rows.iter().map(|r| r.re).collect(),
                    im: rows.iter().map(|r| r.im).collect(),
                })
            })
            .collect::<Result<Vec<_>, String>>()
    })())
}

#[derive(Serialize)]
struct Spectrum {
    targets: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    abs_errors: Vec<f64>,
    stable: bool,
    wall_state: [f64; 2],
}

/// The lowest `m` levels next to `n(n+2)k²`.
pub fn spectrum_json(variant_name: &str, k: f64, q: f64, m: usize, n_grid: usize) -> String {
    to_json((|| {
        let r = spectrum_report(&params(variant_name, k, q)?, m, grid_size(n_grid)?).map_err(|e| e.to_string())?;
        let lowest = r.wall_probe.lowest[1];
        Ok(Spectrum {
            targets: r.targets.clone(),
            re: r.eigenvalues.iter().map(|z| z.re).collect(),
            im: r.eigenvalues.iter().map(|z| z.im).collect(),
            abs_errors: r.abs_errors.clone(),
            stable: r.stability == Stability::Stable,
            wall_state: [lowest.re, lowest.im],
        })
    })())
}

#[derive(Serialize)]
struct Defects {
    v1_pt: f64,
    v2_pt: f64,
    w1_apt: f64,
    w1_pt: f64,
    gram_hermitian: f64,
    gram_pt: f64,
    gram_apt: f64,
}

/// Relative symmetry defects of `V₁`, `V₂`, `W₁` and the largest
/// off-diagonal Gram entry of the four lowest states per conjugation.
pub fn symmetry_json(variant_name: &str, k: f64, q: f64) -> String {
    to_json((|| {
        let err = |e: ptsusy::Error| e.to_string();
        let p = params(variant_name, k, q)?;
        let c = p.variant.center(k);
        let g = Grid::symmetric(std::f64::consts::FRAC_PI_2 / k, 1001).map_err(err)?;
        let pair = closed_form_potentials(&p).map_err(err)?;
        let w = build_superpotential(&p).map_err(err)?;
        let on = |f: &ptsusy::ClosedFormFunction| sample(&f.shifted(c), &g).map_err(err);
        let tol = 1e-10;
        let pt = |u: ComplexGridFunction| classify_pt(&u, tol).map(|r| r.pt_relative_defect).map_err(err);
        let ws = on(&w)?;
        let states: Vec<_> = branch_states(&p, 4, 1001).map_err(err)?.into_iter().map(|(_, s)| s).collect();
        let gram = |s| gram_matrix(&states, s).map(|g| g.max_off_diagonal).map_err(err);
        Ok(Defects {
            v1_pt: pt(on(&pair.v1)?)?,
            v2_pt: pt(on(&pair.v2)?)?,
            w1_apt: classify_apt(&ws, tol).map_err(err)?.apt_relative_defect,
            w1_pt: pt(ws)?,
            gram_hermitian: gram(ConjugationStrategy::Hermitian)?,
            gram_pt: gram(ConjugationStrategy::Pt)?,
            gram_apt: gram(ConjugationStrategy::Apt)?,
        })
    })())
}

#[wasm_bindgen]
pub fn curves(k: f64, q: f64, ceiling: f64) -> String {
    curves_json(k, q, ceiling)
}

#[wasm_bindgen]
pub fn spectrum(variant: &str, k: f64, q: f64, m: usize, grid_size: usize) -> String {
    spectrum_json(variant, k, q, m, grid_size)
}

#[wasm_bindgen]
pub fn symmetry(variant: &str, k: f64, q: f64) -> String {
    symmetry_json(variant, k, q)
}

#[wasm_bindgen]
pub fn version() -> String {
    ptsusy::VERSION.to_string()
}
