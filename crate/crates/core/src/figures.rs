//! Figure data: superpotentials and partner potentials of both families
//! sampled on the open well, with deterministic CSV rendering.

use std::fmt::Write as _;

use crate::closed_form::ClosedFormFunction;
use crate::error::{Error, Result};
use crate::susy::{build_superpotential, closed_form_potentials, FamilyParams, Variant};
use crate::C64;

pub const FIGURE_ROWS: usize = 2001;
pub const DEFAULT_PLOT_CEILING: f64 = 25.0;
pub const CSV_HEADER: &str = "x,re,im,clipped";

/// One curve of a figure.
#[derive(Clone, Debug)]
pub struct FigureSeries {
    /// File stem, e.g. `fig2_v1t`.
    pub name: String,
    pub function: ClosedFormFunction,
    /// Open interval the curve is drawn on.
    pub domain: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigureRow {
    pub x: f64,
    pub re: f64,
    pub im: f64,
    pub clipped: bool,
}

/// The nine curves: `W₁` of both families (figure 1), the real-well baseline
/// and `V₁` of both families (figure 2), and `V₂` of both families at `q = 0`
/// and at `q` (figure 3).
pub fn figure_series(k: f64, q: f64) -> Result<Vec<FigureSeries>> {
    let tan = FamilyParams::specialized(Variant::Tangent, k, q, 1)?;
    let cot = FamilyParams::specialized(Variant::Cotangent, k, q, 1)?;
    let series = |name: &str, function: ClosedFormFunction, p: &FamilyParams| FigureSeries {
        name: name.to_string(),
        function,
        domain: p.well(),
    };
    let v = |p: &FamilyParams| closed_form_potentials(p);
    Ok(vec![
        series("fig1_w1c", build_superpotential(&cot)?, &cot),
        series("fig1_w1t", build_superpotential(&tan)?, &tan),
        series("fig2_v1_baseline", ClosedFormFunction::constant(C64::new(-k * k, 0.0)), &tan),
        series("fig2_v1c", v(&cot)?.v1, &cot),
        series("fig2_v1t", v(&tan)?.v1, &tan),
        series("fig3_v2c_q0", v(&cot.with_q(0.0))?.v2, &cot),
        series("fig3_v2t_q0", v(&tan.with_q(0.0))?.v2, &tan),
        series("fig3_v2c", v(&cot)?.v2, &cot),
        series("fig3_v2t", v(&tan)?.v2, &tan),
    ])
}

/// `rows` equally spaced points strictly inside `domain`, symmetric about
/// its midpoint (which is hit exactly for odd `rows`). Components beyond
/// `ceiling` in modulus are clamped to `±ceiling` and the row is marked.
pub fn figure_rows(f: &ClosedFormFunction, domain: (f64, f64), rows: usize, ceiling: f64) -> Result<Vec<FigureRow>> {
    if rows == 0 {
        return Err(Error::InvalidArgument("a figure needs at least one row".into()));
    }
    if !(ceiling > 0.0) || !ceiling.is_finite() {
        return Err(Error::InvalidArgument(format!("plot ceiling must be positive and finite, got {ceiling}")));
    }
    let (lo, hi) = domain;
    let mid = 0.5 * (lo + hi);
    let h = (hi - lo) / (rows + 1) as f64;
    let half = (rows as f64 - 1.0) / 2.0;
    Ok((0..rows)
        .map(|j| {
            let x = mid + h * (j as f64 - half);
            let z = f.eval(x);
            let clamp = |v: f64| {
                if v.is_nan() {
                    (ceiling, true)
                } else if v.abs() > ceiling {
                    (ceiling.copysign(v), true)
                } else {
                    (v, false)
                }
            };
            let (re, c1) = clamp(z.re);
            let (im, c2) = clamp(z.im);
            FigureRow { x, re, im, clipped: c1 || c2 }
        })
        .collect())
}

/// Shortest round-trip decimal form; exponent notation (lowercase `e`)
/// outside `[1e-5, 1e16)`, and no negative zero.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn render_csv(rows: &[FigureRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_float(r.x),
            format_float(r.re),
            format_float(r.im),
            u8::from(r.clipped)
        );
    }
    out
}

/// `(name, csv)` for every series of [`figure_series`].
pub fn figure_csvs(k: f64, q: f64, ceiling: f64) -> Result<Vec<(String, String)>> {
    figure_series(k, q)?
        .into_iter()
        .map(|s| Ok((s.name, render_csv(&figure_rows(&s.function, s.domain, FIGURE_ROWS, ceiling)?))))
        .collect()
}
