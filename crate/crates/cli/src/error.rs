use curvecx::CoreError;
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Config(String),
    Io(String),
    Invariant(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Invariant(m) => CliError::Invariant(m),
            e => CliError::Core(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Config(_) => "CONFIG",
            CliError::Io(_) => "IO",
            CliError::Invariant(_) => "INVARIANT_VIOLATION",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(_) | CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Config(m) | CliError::Io(m) | CliError::Invariant(m) => m.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorJson { error: self.code(), message: self.message() }).expect("error serialises")
    }
}
