use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ptsusy::susy::{FamilyParams, HierarchyMode, Variant};
use ptsusy::symmetry::ConjugationStrategy;
use serde::Serialize;

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "ptsusy", version, about = "Complex PT-symmetric superpartners of the infinite square well")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Write the figure curves as CSV files into the --out directory.
    Figures,
    /// Lowest levels of the Hamiltonian, extrapolated and compared with n(n+2)k².
    Spectrum,
    /// PT/APT classification of the potentials and superpotential.
    VerifySymmetry,
    /// Constancy of the shape-invariance remainders and their telescoped sums.
    VerifyShapeInvariance,
    /// Factorization of the Hamiltonians by the ladder operators.
    VerifyFactorization,
    /// Gram matrices of the lowest eigenstates under each conjugation.
    Gram,
    /// The hierarchy of superpotentials and partner potentials.
    Hierarchy,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Options {
    /// tangent or cotangent
    #[arg(long, global = true, default_value = "tangent")]
    pub variant: Variant,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, global = true, default_value_t = 2.0, allow_negative_numbers = true)]
    pub q: f64,
    /// Hierarchy level.
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    /// Number of eigenvalues or states.
    #[arg(long, global = true, default_value_t = 4)]
    pub m: usize,
    /// Interior node count (odd, at least 201).
    #[arg(long, global = true, default_value_t = 2001)]
    pub grid_size: usize,
    #[arg(long, global = true, default_value_t = 4)]
    pub depth: usize,
    /// hermitian, pt or apt
    #[arg(long, global = true)]
    pub strategy: Option<ConjugationStrategy>,
    /// fixed-k or paper-k
    #[arg(long, global = true, default_value = "fixed-k")]
    pub mode: HierarchyMode,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (a directory for `figures`); standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = ptsusy::figures::DEFAULT_PLOT_CEILING, allow_negative_numbers = true)]
    pub plot_ceiling: f64,
}

/// The validated, fully resolved configuration echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub variant: Variant,
    pub k: f64,
    pub q: f64,
    pub n: usize,
    pub m: usize,
    pub grid_size: usize,
    pub depth: usize,
    pub strategy: Option<ConjugationStrategy>,
    pub mode: HierarchyMode,
    pub format: Format,
    pub output_path: Option<PathBuf>,
    pub plot_ceiling: f64,
}

pub const MAX_DEPTH: usize = 12;

impl RunConfig {
    pub fn resolve(command: Command, o: Options) -> Result<Self, CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if o.grid_size < 201 || o.grid_size.is_multiple_of(2) {
            return bad(format!("--grid-size must be odd and at least 201, got {}", o.grid_size));
        }
        if !(o.k.is_finite() && o.k > 0.0) {
            return bad(format!("--k must be positive and finite, got {}", o.k));
        }
        if !o.q.is_finite() {
            return bad(format!("--q must be finite, got {}", o.q));
        }
        if o.n == 0 {
            return bad("--n must be at least 1".into());
        }
        if o.m == 0 || o.m > ptsusy::operators::MAX_EXCITED_STATES {
            return bad(format!("--m must lie in 1..={}, got {}", ptsusy::operators::MAX_EXCITED_STATES, o.m));
        }
        if o.depth == 0 || o.depth > MAX_DEPTH {
            return bad(format!("--depth must lie in 1..={MAX_DEPTH}, got {}", o.depth));
        }
        if !(o.plot_ceiling.is_finite() && o.plot_ceiling > 0.0) {
            return bad(format!("--plot-ceiling must be positive and finite, got {}", o.plot_ceiling));
        }
        let format = match (command, o.format) {
            (Command::Figures, Some(Format::Json)) => return bad("figures are written as CSV only".into()),
            (Command::Figures, _) => Format::Csv,
            (_, f) => f.unwrap_or(Format::Json),
        };
        if command == Command::VerifyFactorization && o.strategy == Some(ConjugationStrategy::Pt) {
            return bad("the factorization adjoint is apt or hermitian".into());
        }
        Ok(RunConfig {
            command,
            variant: o.variant,
            k: o.k,
            q: o.q,
            n: o.n,
            m: o.m,
            grid_size: o.grid_size,
            depth: o.depth,
            strategy: o.strategy,
            mode: o.mode,
            format,
            output_path: o.out,
            plot_ceiling: o.plot_ceiling,
        })
    }

    pub fn params(&self) -> Result<FamilyParams, CliError> {
        Ok(FamilyParams::specialized(self.variant, self.k, self.q, self.n)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn options(args: &[&str]) -> Options {
        let mut full = vec!["ptsusy", "spectrum"];
        full.extend_from_slice(args);
        Cli::try_parse_from(full).unwrap().options
    }

    #[test]
    fn defaults_resolve() {
        let cfg = RunConfig::resolve(Command::Spectrum, options(&[])).unwrap();
        assert_eq!((cfg.grid_size, cfg.m, cfg.format), (2001, 4, Format::Json));
        assert_eq!(cfg.variant, Variant::Tangent);
    }

    #[test]
    fn rejects_bad_values() {
        for args in [
            &["--grid-size", "200"][..],
            &["--grid-size", "101"],
            &["--k", "0"],
            &["--m", "9"],
            &["--depth", "0"],
            &["--plot-ceiling", "-1"],
        ] {
            assert!(RunConfig::resolve(Command::Spectrum, options(args)).is_err(), "{args:?}");
        }
        assert!(Cli::try_parse_from(["ptsusy", "gram", "--strategy", "bogus"]).is_err());
        assert!(RunConfig::resolve(Command::Figures, options(&["--format", "json"])).is_err());
        let pt = options(&["--strategy", "pt"]);
        assert!(RunConfig::resolve(Command::VerifyFactorization, pt).is_err());
    }

    #[test]
    fn negative_q_is_accepted() {
        assert_eq!(options(&["--q", "-1.5"]).q, -1.5);
    }
}
