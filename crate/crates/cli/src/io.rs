use std::fmt;
use std::io::{IsTerminal, Read};
use std::path::Path;

use modal_fixpoint::{parse, Formula, LogicIndex};

/// Usage errors exit 2, domain errors exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(_) => "domain",
        }
    }

    pub fn domain(e: impl fmt::Display) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Style {
    color: bool,
}

impl Style {
    pub fn plain() -> Self {
        Style { color: false }
    }

    /// From `FP_COLOR` (`auto`, `always`, `never`; unset means `auto`).
    pub fn from_env() -> Result<Self, CliError> {
        let color = match std::env::var("FP_COLOR").as_deref() {
            Err(_) | Ok("auto") => std::io::stdout().is_terminal(),
            Ok("always") => true,
            Ok("never") => false,
            Ok(other) => {
                return Err(CliError::Usage(format!(
                    "FP_COLOR: expected auto, always or never, got {other:?}"
                )))
            }
        };
        Ok(Style { color })
    }

    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    pub fn good(&self, s: &str) -> String {
        self.paint("32", s)
    }

    pub fn bad(&self, s: &str) -> String {
        self.paint("31", s)
    }

    pub fn label(&self, s: &str) -> String {
        self.paint("1", s)
    }
}

/// Inline text, `@path`, or `-` for stdin.
pub fn read_source(flag: &str, value: &str) -> Result<String, CliError> {
    if value == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Usage(format!("{flag}: reading stdin: {e}")))?;
        Ok(s)
    } else if let Some(path) = value.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{flag}: reading {path}: {e}")))
    } else {
        Ok(value.to_string())
    }
}

pub fn formula_arg(flag: &str, value: &str) -> Result<Formula, CliError> {
    let text = read_source(flag, value)?;
    parse(text.trim()).map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

pub fn logic_arg(n: usize) -> Result<LogicIndex, CliError> {
    LogicIndex::new(n).map_err(|_| CliError::Usage(format!("--n: logic index must be at least 1, got {n}")))
}

pub fn var_arg(var: &str) -> Result<String, CliError> {
    match parse(var) {
        Ok(f) if f.as_var() == Some(var) => Ok(var.to_string()),
        _ => Err(CliError::Usage(format!("--var: {var:?} is not an identifier"))),
    }
}

pub fn write_file(flag: &str, path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Usage(format!("{flag}: writing {}: {e}", path.display())))
}
