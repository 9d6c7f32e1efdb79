//! Instance generation, file formats and the embedded counterexample corpus.

mod counterexamples;
mod dimacs;
mod generator;
mod native;
mod orlib;

use thiserror::Error;

use crate::model::ModelError;

pub use counterexamples::{
    all_records, record, verify_counterexamples, verify_record, Claim, ClaimOutcome,
    CounterexampleId, CounterexampleRecord, NamedClaim,
};
pub use dimacs::parse_dimacs_vertex_cover;
pub use generator::{attach_quadratic, generate, Category, GeneratorConfig, MAX_GENERATED_N};
pub use native::{format_number, parse_number, read_native, write_native};
pub use orlib::parse_orlib_scp;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("n = {n} exceeds the generator limit of {MAX_GENERATED_N}")]
    DimensionOverflow { n: usize },
    #[error("instance already has quadratic costs")]
    NotLinear,
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl InstanceError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Whitespace-separated tokens tagged with their 1-based line number.
pub(crate) struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut last_line = 1;
        for (i, line) in text.lines().enumerate() {
            last_line = i + 1;
            items.extend(line.split_whitespace().map(|tok| (i + 1, tok)));
        }
        Self {
            items,
            pos: 0,
            last_line,
        }
    }

    pub(crate) fn next(&mut self, what: &str) -> Result<(usize, &'a str), InstanceError> {
        let item = self.items.get(self.pos).copied().ok_or_else(|| {
            InstanceError::parse(self.last_line, format!("unexpected end of input, expected {what}"))
        })?;
        self.pos += 1;
        Ok(item)
    }

    pub(crate) fn next_usize(&mut self, what: &str) -> Result<(usize, usize), InstanceError> {
        let (line, tok) = self.next(what)?;
        tok.parse::<usize>()
            .map(|v| (line, v))
            .map_err(|_| InstanceError::parse(line, format!("expected {what}, found {tok:?}")))
    }

    pub(crate) fn next_number(&mut self, what: &str) -> Result<(usize, f64), InstanceError> {
        let (line, tok) = self.next(what)?;
        parse_number(tok)
            .map(|v| (line, v))
            .ok_or_else(|| InstanceError::parse(line, format!("expected {what}, found {tok:?}")))
    }

    pub(crate) fn finish(&self) -> Result<(), InstanceError> {
        match self.items.get(self.pos) {
            Some((line, tok)) => Err(InstanceError::parse(*line, format!("unexpected trailing data {tok:?}"))),
            None => Ok(()),
        }
    }
}
