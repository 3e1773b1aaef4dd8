use std::io::Write;
use std::path::{Path, PathBuf};

use ptsusy::figures::format_float;
use ptsusy::C64;
use serde::{Serialize, Serializer};

use crate::error::CliError;

/// A float that serializes non-finite values as the strings `"NaN"`,
/// `"inf"` and `"-inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cx {
    pub re: Num,
    pub im: Num,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: Num(z.re), im: Num(z.im) }
    }
}

pub fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

pub fn cxs(v: &[C64]) -> Vec<Cx> {
    v.iter().copied().map(Cx::from).collect()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// CSV cell for a float, in the same format as the figure files.
pub fn cell(v: f64) -> String {
    if v.is_finite() {
        format_float(v)
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parent_of(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Fails with a configuration error when the directory that would hold
/// `path` does not exist.
pub fn require_parent(path: &Path) -> Result<(), CliError> {
    let parent = parent_of(path);
    if parent.is_dir() {
        Ok(())
    } else {
        Err(CliError::Config(format!("output directory {} does not exist", parent.display())))
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    require_parent(path)?;
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(parent_of(path)).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
