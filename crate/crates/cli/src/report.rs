use std::fmt;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use specbound::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_VIOLATION: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Usage(String),
    Library(Error),
    InFile(String, Error),
}

impl CliError {
    pub fn in_file(path: &Path, e: Error) -> Self {
        CliError::InFile(path.display().to_string(), e)
    }

    fn library(&self) -> Option<&Error> {
        match self {
            CliError::Library(e) | CliError::InFile(_, e) => Some(e),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
            _ => match self.library().expect("library error") {
                Error::Parse { .. } => "parse",
                Error::InvalidInput(_) => "invalid input",
                Error::InvalidParameter(_) => "invalid parameter",
                Error::UnsupportedFunction(_) => "unsupported function",
                Error::Domain(_) => "domain",
                Error::NotPositiveDefinite { .. } => "not positive definite",
                Error::NotSymmetric { .. } => "not symmetric",
                Error::RankDeficient { .. } => "rank deficient",
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.library() {
            Some(
                Error::Domain(_)
                | Error::NotPositiveDefinite { .. }
                | Error::NotSymmetric { .. }
                | Error::RankDeficient { .. },
            ) => EXIT_DOMAIN,
            _ => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Usage(m) => f.write_str(m),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::InFile(p, e) => write!(f, "{p}: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

#[derive(Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

impl Input {
    pub fn new(path: &Path, bytes: &[u8]) -> Self {
        Input { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

#[derive(Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Vec<Input>,
    pub parameters: Value,
    pub result: Value,
    pub elapsed_seconds: f64,
    #[serde(skip)]
    pub violation: bool,
    #[serde(skip)]
    silent: bool,
}

impl Report {
    pub fn new(command: &'static str, inputs: Vec<Input>, parameters: Value, result: Value) -> Self {
        Report { command, inputs, parameters, result, elapsed_seconds: 0.0, violation: false, silent: false }
    }

    /// For commands whose stdout is a data file rather than a report.
    pub fn silent() -> Self {
        let mut r = Report::new("", Vec::new(), Value::Null, Value::Null);
        r.silent = true;
        r
    }

    pub fn emit(&self) -> ExitCode {
        if self.silent {
            return ExitCode::SUCCESS;
        }
        let text = serde_json::to_string_pretty(self).expect("serializable");
        if writeln!(std::io::stdout().lock(), "{text}").is_err() {
            return ExitCode::from(EXIT_USAGE);
        }
        if self.violation {
            eprintln!("{}: property violation", self.command);
            ExitCode::from(EXIT_VIOLATION)
        } else {
            ExitCode::SUCCESS
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let parse = CliError::from(Error::Parse { line: 3, message: "x".into() });
        assert_eq!((parse.exit_code(), parse.kind()), (EXIT_USAGE, "parse"));
        assert_eq!(CliError::from(Error::Domain("x".into())).exit_code(), EXIT_DOMAIN);
        assert_eq!(CliError::from(Error::NotPositiveDefinite { min_eigenvalue: -1.0 }).exit_code(), EXIT_DOMAIN);
        assert_eq!(CliError::Io("x".into()).exit_code(), EXIT_USAGE);
    }

    #[test]
    fn input_hash_is_sha256() {
        let i = Input::new(Path::new("f"), b"");
        assert_eq!(i.sha256, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
