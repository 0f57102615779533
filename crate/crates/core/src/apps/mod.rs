//! Concrete instances: Latin transversals, rainbow perfect matchings, proper
//! vertex coloring with `Δ+1` colors, and 6-edge-colorings whose palettes
//! properly color the vertices.
//!
//! Input files use 1-indexed vertices; everything is 0-indexed in memory.

pub mod colorblind;
pub mod coloring;
pub mod graph;
pub mod latin;
pub mod matching;

use thiserror::Error;

pub use colorblind::ColorBlindProblem;
pub use coloring::ColoringProblem;
pub use graph::SimpleGraph;
pub use latin::{ColorMatrix, LatinProblem};
pub use matching::{EdgeColoredComplete, MatchingProblem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AppError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl AppError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        AppError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        AppError::Invalid(message.into())
    }
}

/// Why a candidate solution is not flawless, in domain terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_numbers<T: std::str::FromStr>(
    line: usize,
    text: &str,
) -> Result<Vec<T>, AppError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| AppError::parse(line, format!("`{tok}` is not a valid number")))
        })
        .collect()
}

/// `log₂(n!)`.
pub fn log2_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).log2()).sum()
}
