use std::fmt;
use std::process::ExitCode;

/// A failed command and the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or invalid input values: exit 2.
    Usage(anyhow::Error),
    /// I/O, parsing or anything else that went wrong at run time: exit 1.
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure::Usage(anyhow::anyhow!("{msg}"))
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(2),
            Failure::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Runtime(e) => {
                // some errors already quote their source; skip causes that would repeat
                let mut text = String::new();
                for cause in e.chain().map(|c| c.to_string()) {
                    if text.contains(&cause) {
                        continue;
                    }
                    if !text.is_empty() {
                        text.push_str(": ");
                    }
                    text.push_str(&cause);
                }
                f.write_str(&text)
            }
        }
    }
}

pub trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E> Classify<T> for Result<T, E>
where
    E: Into<anyhow::Error>,
{
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

pub type CmdResult = Result<(), Failure>;
