//! Problem files, the command dispatcher and the benchmark generators.

pub mod bench;
pub mod localize;
pub mod problem;
pub mod run;
pub mod sexp;
pub mod suite1;
pub mod suite2;

use std::time::Duration;

use thiserror::Error;

use crate::automata::AutomataError;
use crate::sl::SlError;
use crate::theory::TheoryError;
use crate::wordeq::WordEqError;

pub use problem::{parse, Command, FileStatement, ProblemFile, Rhs};
pub use run::{run, Report, RunOptions, Verdict};

impl std::error::Error for sexp::SyntaxError {}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Syntax(#[from] sexp::SyntaxError),
    #[error("{path}:{source}")]
    File {
        path: String,
        source: sexp::SyntaxError,
    },
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Sl(#[from] SlError),
    #[error(transparent)]
    WordEq(#[from] WordEqError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("timed out after {0:?}")]
    Timeout(Duration),
}

impl From<problem::Unsupported> for CliError {
    fn from(u: problem::Unsupported) -> Self {
        CliError::Unsupported(u.0)
    }
}

impl CliError {
    /// True when a cap or the clock stopped the computation.
    pub fn is_resource(&self) -> bool {
        let theory = |t: &TheoryError| matches!(t, TheoryError::BranchLimit(_));
        let automata = |a: &AutomataError| match a {
            AutomataError::StateBlowup(_) | AutomataError::PathBlowup(_) => true,
            AutomataError::Theory(t) => theory(t),
            _ => false,
        };
        match self {
            CliError::Timeout(_) => true,
            CliError::Automata(a) | CliError::Sl(SlError::Automata(a)) => automata(a),
            CliError::WordEq(w) => match w {
                WordEqError::TooManyAtoms(..)
                | WordEqError::BoundTooLarge(..)
                | WordEqError::AlphabetTooLarge(_)
                | WordEqError::RegexTooLarge(_) => true,
                WordEqError::Theory(t) => theory(t),
                _ => false,
            },
            _ => false,
        }
    }
}

/// Runs `f` on a worker thread and gives up after `limit`. The worker is
/// left to finish on its own.
pub fn with_timeout<T: Send + 'static>(
    limit: Option<Duration>,
    f: impl FnOnce() -> T + Send + 'static,
) -> Result<T, CliError> {
    let Some(limit) = limit else { return Ok(f()) };
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(f());
    });
    rx.recv_timeout(limit).map_err(|_| CliError::Timeout(limit))
}
