//! Plain-text file formats for networks, selectors, schedules, traces and
//! simulation output.
//!
//! Every parser takes the name of its source (used in error messages) and
//! the file contents. Lines starting with `#` are comments.

mod graph;
mod metrics;
mod records;
mod schedule;
mod selector;
mod trace;

use std::fs;
use std::path::Path;

use oblivio_core::num::parse_rational;
use oblivio_core::Rational;

pub use graph::{parse_graph, write_graph};
pub use metrics::{write_metrics_csv, write_run_log};
pub use records::{coloring_records, conflict_records};
pub use schedule::{parse_schedule, provenance_name, write_schedule};
pub use selector::{parse_selector, write_selector};
pub use trace::{parse_trace, write_trace};

use crate::error::{CliError, Result};

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Writes `contents`, creating parent directories as needed.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Cursor over the lines of one file that remembers where it is for error
/// messages.
struct LineReader<'a> {
    source: &'a str,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> LineReader<'a> {
    fn new(source: &'a str, text: &'a str) -> Self {
        LineReader {
            source,
            lines: text.lines().enumerate(),
            line: 0,
        }
    }

    /// Next line that is neither blank nor a comment, trimmed.
    fn next_content(&mut self) -> Option<&'a str> {
        loop {
            let raw = self.next_raw()?;
            if !raw.is_empty() && !raw.starts_with('#') {
                return Some(raw);
            }
        }
    }

    /// Next line, trimmed, with comments and blanks included.
    fn next_raw(&mut self) -> Option<&'a str> {
        let (idx, raw) = self.lines.next()?;
        self.line = idx + 1;
        Some(raw.trim())
    }

    fn error(&self, message: impl Into<String>) -> CliError {
        CliError::Format {
            path: self.source.to_string(),
            line: self.line,
            message: message.into(),
        }
    }

    fn number<T: std::str::FromStr>(&self, token: &str, what: &str) -> Result<T> {
        token
            .parse()
            .map_err(|_| self.error(format!("expected {what}, found `{token}`")))
    }

    fn rational(&self, token: &str, what: &str) -> Result<Rational> {
        parse_rational(token).map_err(|_| self.error(format!("expected {what} as p/q, found `{token}`")))
    }

    /// Splits `key=value` tokens after a header keyword.
    fn header<'t>(&self, line: &'t str, keyword: &str) -> Result<Vec<(&'t str, &'t str)>> {
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some(keyword) {
            return Err(self.error(format!("expected a `{keyword} ...` header")));
        }
        tokens
            .map(|t| {
                t.split_once('=')
                    .ok_or_else(|| self.error(format!("expected key=value, found `{t}`")))
            })
            .collect()
    }
}

fn lookup<'t>(fields: &[(&str, &'t str)], key: &str) -> Option<&'t str> {
    fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

fn format_links(links: &[usize]) -> String {
    links.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}
