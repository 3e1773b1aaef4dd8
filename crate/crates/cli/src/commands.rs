use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use ptsusy::figures::figure_csvs;
use ptsusy::numerics::{branch_states, spectrum_report, SpectrumReport};
use ptsusy::operators::{apt_partner_relation_check, factorization_residual_with, Adjoint};
use ptsusy::susy::{
    build_superpotential, closed_form_potentials, constraint_function, energy_spectrum, general_superpotential,
    hierarchy, partner_pair_from_superpotential, remainder_value, wave_number, FamilyParams,
};
use ptsusy::symmetry::{classify_apt, classify_pt, gram_matrix, ConjugationStrategy, GramMatrix, SymmetryReport};
use ptsusy::{sample, ClosedFormFunction, ComplexGridFunction, Grid, C64};
use serde::Serialize;

use crate::config::{Command, Format, RunConfig};
use crate::error::CliError;
use crate::output::{cell, cxs, emit, nums, to_json, write_atomic, Cx, Num};

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const REMAINDER_TOL: f64 = 1e-10;
pub const SPECTRUM_TOL: f64 = 1e-3;
pub const FACTORIZATION_TOL: f64 = 1e-5;
pub const GRAM_TOL: f64 = 1e-6;

/// A finished command: what to print and whether its checks held.
pub struct Outcome {
    pub passed: bool,
    pub text: String,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    config: &'a RunConfig,
    passed: bool,
    result: T,
}

fn json<T: Serialize>(cfg: &RunConfig, passed: bool, result: T) -> Result<Outcome, CliError> {
    let text = to_json(&Envelope { version: ptsusy::VERSION, config: cfg, passed, result })?;
    Ok(Outcome { passed, text })
}

fn table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        let _ = writeln!(s, "{}", r.join(","));
    }
    s
}

fn render<T: Serialize>(
    cfg: &RunConfig,
    passed: bool,
    result: T,
    csv: impl FnOnce() -> String,
) -> Result<Outcome, CliError> {
    match cfg.format {
        Format::Json => json(cfg, passed, result),
        Format::Csv => Ok(Outcome { passed, text: csv() }),
    }
}

pub fn run(cfg: &RunConfig) -> Result<bool, CliError> {
    if cfg.command == Command::Figures {
        return figures(cfg).map(|_| true);
    }
    let outcome = match cfg.command {
        Command::Spectrum => spectrum(cfg)?,
        Command::VerifySymmetry => verify_symmetry(cfg)?,
        Command::VerifyShapeInvariance => verify_shape_invariance(cfg)?,
        Command::VerifyFactorization => verify_factorization(cfg)?,
        Command::Gram => gram(cfg)?,
        Command::Hierarchy => hierarchy_levels(cfg)?,
        Command::Figures => unreachable!(),
    };
    emit(cfg.output_path.as_deref(), &outcome.text)?;
    Ok(outcome.passed)
}

fn figures(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = cfg.output_path.clone().unwrap_or_else(|| PathBuf::from("figures"));
    if !dir.is_dir() {
        crate::output::require_parent(&dir)?;
        std::fs::create_dir(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    for (name, csv) in figure_csvs(cfg.k, cfg.q, cfg.plot_ceiling)? {
        write_atomic(&dir.join(format!("{name}.csv")), &csv)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumOut<'a> {
    eigenvalues: Vec<Cx>,
    targets: Vec<Num>,
    abs_errors: Vec<Num>,
    imag_max: Num,
    extrapolated: bool,
    observed_orders: Vec<Num>,
    stability: ptsusy::numerics::Stability,
    grid_map: ptsusy::GridMap,
    grid_sizes: &'a [usize],
    raw: Vec<Vec<Cx>>,
    wall_probe: WallOut,
    partner_eigenvalues: Vec<Cx>,
    isospectrality_deviations: Vec<Num>,
    pt_pairing_ok: bool,
    unpaired: Vec<Cx>,
    solver_agreement: Num,
    backward_errors: Vec<Num>,
    tolerance: f64,
}

#[derive(Serialize)]
struct WallOut {
    grid_sizes: [usize; 2],
    lowest: Vec<Cx>,
    growth: Num,
    diverging: bool,
}

fn spectrum_out(r: &SpectrumReport) -> SpectrumOut<'_> {
    SpectrumOut {
        eigenvalues: cxs(&r.eigenvalues),
        targets: nums(&r.targets),
        abs_errors: nums(&r.abs_errors),
        imag_max: Num(r.imag_max),
        extrapolated: r.extrapolated,
        observed_orders: nums(&r.observed_orders),
        stability: r.stability,
        grid_map: r.grid_map,
        grid_sizes: &r.grid_sizes,
        raw: r.raw.iter().map(|v| cxs(v)).collect(),
        wall_probe: WallOut {
            grid_sizes: r.wall_probe.grid_sizes,
            lowest: cxs(&r.wall_probe.lowest),
            growth: Num(r.wall_probe.growth),
            diverging: r.wall_probe.diverging,
        },
        partner_eigenvalues: cxs(&r.isospectrality.partner_eigenvalues),
        isospectrality_deviations: nums(&r.isospectrality.deviations),
        pt_pairing_ok: r.pt_pairing.ok(),
        unpaired: cxs(&r.pt_pairing.unpaired),
        solver_agreement: Num(r.solver_agreement),
        backward_errors: nums(&r.backward_errors),
        tolerance: SPECTRUM_TOL,
    }
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = spectrum_report(&cfg.params()?, cfg.m, cfg.grid_size)?;
    let passed = r.meets(SPECTRUM_TOL);
    render(cfg, passed, spectrum_out(&r), || {
        let rows = r
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, z)| vec![j.to_string(), cell(r.targets[j]), cell(z.re), cell(z.im), cell(r.abs_errors[j])]);
        table("index,target,re,im,abs_error", rows)
    })
}

/// Grid centered on the well of `p`, with `f` shifted onto it.
fn centered(p: &FamilyParams, n: usize) -> Result<(Arc<Grid>, f64), CliError> {
    Ok((Grid::symmetric(FRAC_PI_2 / p.k, n)?, p.variant.center(p.k)))
}

#[derive(Serialize)]
struct SymmetryCheck {
    name: &'static str,
    symmetry: &'static str,
    expected: bool,
    observed: bool,
    defect: Num,
    relative_defect: Num,
    passed: bool,
    report: SymmetryReport,
}

fn verify_symmetry(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let (g, c) = centered(&p, cfg.grid_size)?;
    let pair = closed_form_potentials(&p)?;
    let w = build_superpotential(&p)?;
    let on_grid = |f: &ClosedFormFunction| sample(&f.shifted(c), &g);
    let (v1, v2, ws) = (on_grid(&pair.v1)?, on_grid(&pair.v2)?, on_grid(&w)?);
    let check = |name, symmetry, expected, u: &ComplexGridFunction| -> Result<SymmetryCheck, CliError> {
        let report = if symmetry == "pt" { classify_pt(u, SYMMETRY_TOL)? } else { classify_apt(u, SYMMETRY_TOL)? };
        let (observed, defect, relative) = if symmetry == "pt" {
            (report.is_pt_symmetric, report.pt_defect, report.pt_relative_defect)
        } else {
            (report.is_apt_symmetric, report.apt_defect, report.apt_relative_defect)
        };
        Ok(SymmetryCheck {
            name,
            symmetry,
            expected,
            observed,
            defect: Num(defect),
            relative_defect: Num(relative),
            passed: observed == expected,
            report,
        })
    };
    let checks = vec![
        check("V1", "pt", true, &v1)?,
        check("V2", "pt", true, &v2)?,
        check("W1", "apt", true, &ws)?,
        check("W1", "pt", false, &ws)?,
    ];
    let passed = checks.iter().all(|c| c.passed);
    let csv = || {
        let rows = checks.iter().map(|c| {
            vec![
                c.name.into(),
                c.symmetry.into(),
                c.expected.to_string(),
                c.observed.to_string(),
                cell(c.defect.0),
                cell(c.relative_defect.0),
            ]
        });
        table("function,symmetry,expected,observed,defect,relative_defect", rows)
    };
    let text = csv();
    render(cfg, passed, &checks, || text)
}

#[derive(Serialize)]
struct LevelCheck {
    level: usize,
    expected: f64,
    deviation: Num,
    relative_deviation: Num,
    energy: f64,
    telescoped: f64,
    passed: bool,
}

#[derive(Serialize)]
struct ShapeInvarianceOut {
    remainder_expected: f64,
    remainder_min: Num,
    remainder_max: Num,
    remainder_deviation: Num,
    remainder_relative_deviation: Num,
    levels: Vec<LevelCheck>,
    tolerance: f64,
}

/// Range of `a - b` over the grid, with its largest absolute and relative
/// distance from `expected`; the relative one is scaled by `1 + |a| + |b|`.
struct Difference {
    min: f64,
    max: f64,
    deviation: f64,
    relative: f64,
}

fn difference(
    a: &ClosedFormFunction,
    b: &ClosedFormFunction,
    grid: &Arc<Grid>,
    expected: f64,
) -> Result<Difference, CliError> {
    let (a, b) = (sample(a, grid)?, sample(b, grid)?);
    let mut d = Difference { min: f64::INFINITY, max: f64::NEG_INFINITY, deviation: 0.0, relative: 0.0 };
    for (x, y) in a.values().iter().zip(b.values()) {
        let r = x - y;
        let dev = (r - expected).norm();
        d.min = d.min.min(r.re);
        d.max = d.max.max(r.re);
        d.deviation = d.deviation.max(dev);
        d.relative = d.relative.max(dev / (1.0 + x.norm() + y.norm()));
    }
    Ok(d)
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn verify_shape_invariance(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let k = p.k;
    let expected = k * (k + 2.0 * k);
    let f = constraint_function(p.variant, p.q, k);
    let here = partner_pair_from_superpotential(&general_superpotential(p.variant, k, k, &f), 0.0);
    let there = partner_pair_from_superpotential(&general_superpotential(p.variant, 2.0 * k, k, &f), 0.0);
    // the shifted partner lives on the narrower well of wave number 2k
    let (lo, hi) = p.variant.well(2.0 * k);
    let r = difference(&here.v2, &there.v1, &Grid::new(lo, hi, cfg.grid_size)?, expected)?;
    let (lo, hi) = p.well();
    let g = Grid::new(lo, hi, cfg.grid_size)?;
    let mut telescoped = 0.0;
    let mut levels = Vec::with_capacity(cfg.depth);
    for n in 1..=cfg.depth {
        let want = remainder_value(n, k);
        let lower = partner_pair_from_superpotential(&build_superpotential(&p.with_level(n))?, 0.0);
        let upper = partner_pair_from_superpotential(&build_superpotential(&p.with_level(n + 1))?, 0.0);
        let d = difference(&lower.v2, &upper.v1, &g, want)?;
        telescoped += want;
        let energy = energy_spectrum(n) * k * k;
        let summed = (1..=n).map(|j| 1.0 + 2.0 * wave_number(j - 1)).sum::<f64>() * k * k;
        levels.push(LevelCheck {
            level: n,
            expected: want,
            deviation: Num(d.deviation),
            relative_deviation: Num(d.relative),
            energy,
            telescoped,
            passed: d.relative <= REMAINDER_TOL && same(telescoped, energy) && same(summed, energy),
        });
    }
    let passed = r.relative <= REMAINDER_TOL && levels.iter().all(|l| l.passed);
    let csv = || {
        let rows = levels.iter().map(|l| {
            vec![
                l.level.to_string(),
                cell(l.expected),
                cell(l.deviation.0),
                cell(l.relative_deviation.0),
                cell(l.energy),
                cell(l.telescoped),
            ]
        });
        table("level,remainder,deviation,relative_deviation,energy,telescoped", rows)
    };
    let text = csv();
    let out = ShapeInvarianceOut {
        remainder_expected: expected,
        remainder_min: Num(r.min),
        remainder_max: Num(r.max),
        remainder_deviation: Num(r.deviation),
        remainder_relative_deviation: Num(r.relative),
        levels,
        tolerance: REMAINDER_TOL,
    };
    render(cfg, passed, out, || text)
}

#[derive(Serialize)]
struct FactorizationOut {
    adjoint: Adjoint,
    test_function: &'static str,
    grid_sizes: [usize; 3],
    lower_residuals: Vec<Num>,
    upper_residuals: Vec<Num>,
    observed_orders: Vec<Num>,
    apt_relation: Option<Num>,
    tolerance: f64,
}

/// cos⁶(k·x)·exp(10i·k·x) on the centered well.
fn test_function(k: f64) -> ClosedFormFunction {
    ClosedFormFunction::from_jet(move |x| {
        let kx = x.scale_re(k);
        kx.cos().powi(6) * kx.scale(C64::new(0.0, 10.0)).exp()
    })
}

fn verify_factorization(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let adjoint = match cfg.strategy {
        Some(ConjugationStrategy::Hermitian) => Adjoint::Hermitian,
        _ => Adjoint::Apt,
    };
    let c = p.variant.center(p.k);
    let w = build_superpotential(&p)?.shifted(c);
    let pair = partner_pair_from_superpotential(&w, 0.0);
    let f = test_function(p.k);
    let n = cfg.grid_size;
    let sizes = [n, 2 * n + 1, 4 * n + 3];
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &size in &sizes {
        let psi = sample(&f, &Grid::symmetric(FRAC_PI_2 / p.k, size)?)?;
        let (l, u) = factorization_residual_with(&w, &pair, &psi, adjoint)?;
        lower.push(l);
        upper.push(u);
    }
    let orders: Vec<f64> = lower.windows(2).map(|r| (r[0] / r[1]).log2()).collect();
    let finest = sample(&f, &Grid::symmetric(FRAC_PI_2 / p.k, sizes[2])?)?;
    let apt_relation = if cfg.strategy == Some(ConjugationStrategy::Apt) {
        Some(apt_partner_relation_check(&w, &finest)?)
    } else {
        None
    };
    let passed = lower[2] <= FACTORIZATION_TOL
        && upper[2] <= FACTORIZATION_TOL
        && apt_relation.is_none_or(|r| r <= FACTORIZATION_TOL);
    let csv = || {
        let rows = (0..3).map(|i| vec![sizes[i].to_string(), cell(lower[i]), cell(upper[i])]);
        table("grid_size,lower_residual,upper_residual", rows)
    };
    let text = csv();
    let out = FactorizationOut {
        adjoint,
        test_function: "cos^6(kx) exp(10ikx)",
        grid_sizes: sizes,
        lower_residuals: nums(&lower),
        upper_residuals: nums(&upper),
        observed_orders: nums(&orders),
        apt_relation: apt_relation.map(Num),
        tolerance: FACTORIZATION_TOL,
    };
    render(cfg, passed, out, || text)
}

#[derive(Serialize)]
struct GramOut {
    eigenvalues: Vec<Cx>,
    matrices: Vec<GramEntry>,
    tolerance: f64,
}

#[derive(Serialize)]
struct GramEntry {
    strategy: ConjugationStrategy,
    entries: Vec<Vec<Cx>>,
    max_off_diagonal: Num,
    max_diagonal_defect: Num,
    /// Orthogonality is asserted only for the Hermitian product of a real potential.
    asserted: bool,
    passed: bool,
}

fn gram(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let (values, states): (Vec<C64>, Vec<ComplexGridFunction>) =
        branch_states(&p, cfg.m, cfg.grid_size)?.into_iter().unzip();
    let strategies = match cfg.strategy {
        Some(s) => vec![s],
        None => ConjugationStrategy::ALL.to_vec(),
    };
    let matrices = strategies
        .into_iter()
        .map(|s| {
            let g: GramMatrix = gram_matrix(&states, s)?;
            let asserted = s == ConjugationStrategy::Hermitian && cfg.q == 0.0;
            Ok(GramEntry {
                strategy: s,
                entries: g.entries.iter().map(|r| cxs(r)).collect(),
                max_off_diagonal: Num(g.max_off_diagonal),
                max_diagonal_defect: Num(g.max_diagonal_defect),
                asserted,
                passed: !asserted || g.max_off_diagonal <= GRAM_TOL,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let passed = matrices.iter().all(|m| m.passed);
    let csv = || {
        let rows = matrices.iter().map(|m| {
            vec![
                m.strategy.name().into(),
                cell(m.max_off_diagonal.0),
                cell(m.max_diagonal_defect.0),
                m.asserted.to_string(),
            ]
        });
        table("strategy,max_off_diagonal,max_diagonal_defect,asserted", rows)
    };
    let text = csv();
    render(cfg, passed, GramOut { eigenvalues: cxs(&values), matrices, tolerance: GRAM_TOL }, || text)
}

#[derive(Serialize)]
struct LevelOut {
    level: usize,
    k: f64,
    e0: f64,
    interior_poles: Vec<Num>,
    flags: Vec<ptsusy::susy::HierarchyFlag>,
    w_center: Cx,
    v1_center: Cx,
    v2_center: Cx,
}

fn hierarchy_levels(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let c = p.variant.center(p.k);
    let levels: Vec<LevelOut> = hierarchy(&p, cfg.depth, cfg.mode)?
        .into_iter()
        .map(|l| LevelOut {
            level: l.level,
            k: l.params.k,
            e0: l.e0,
            interior_poles: nums(&l.interior_poles),
            flags: l.flags,
            w_center: l.superpotential.eval(c).into(),
            v1_center: l.pair.v1.eval(c).into(),
            v2_center: l.pair.v2.eval(c).into(),
        })
        .collect();
    let csv = || {
        let rows = levels.iter().map(|l| {
            vec![
                l.level.to_string(),
                cell(l.k),
                cell(l.e0),
                l.interior_poles.len().to_string(),
                cell(l.v1_center.re.0),
                cell(l.v1_center.im.0),
            ]
        });
        table("level,k,e0,interior_poles,v1_center_re,v1_center_im", rows)
    };
    let text = csv();
    render(cfg, true, levels, || text)
}
