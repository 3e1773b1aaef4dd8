use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error(transparent)]
    Library(#[from] ptsusy::Error),
}

#[derive(Serialize)]
struct Reason<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(ptsusy::Error::NoConvergence { .. }) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Library(ptsusy::Error::NoConvergence { .. }) => "no_convergence",
            CliError::Library(_) => "invalid_parameters",
        }
    }

    /// One-line JSON object for standard error.
    pub fn to_json(&self) -> String {
        let reason = Reason { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() };
        serde_json::to_string(&reason).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.kind()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(ptsusy::Error::NoConvergence { index: 1 }).exit_code(), 3);
        assert_eq!(CliError::from(ptsusy::Error::UnsupportedMode).exit_code(), 2);
        let j: serde_json::Value = serde_json::from_str(&CliError::Config("bad".into()).to_json()).unwrap();
        assert_eq!(j["error"], "config");
        assert_eq!(j["exit_code"], 2);
    }
}
