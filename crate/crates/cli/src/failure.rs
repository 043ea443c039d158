use boexplore::Error;

pub const OK: u8 = 0;
pub const VIOLATION: u8 = 1;
pub const INPUT: u8 = 2;
pub const UNSUPPORTED: u8 = 3;

/// Message plus process exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn violation(message: impl Into<String>) -> Self {
        Self { code: VIOLATION, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unsupported(_) => UNSUPPORTED,
            Error::ModelFit(_) | Error::State(_) => VIOLATION,
            Error::InvalidInput(_) | Error::InvalidConfig(_) | Error::Parse { .. } | Error::Format { .. } | Error::Io(_) => INPUT,
        };
        Self { code, message: e.to_string() }
    }
}
