//! Job files.
//!
//! ```text
//! # comment
//! [chart]
//! two_n = 2
//! order = 6
//!
//! [connection]
//! 1 1 2 : q1 + 1/2
//!
//! [observables]
//! f = q1*q2
//! g = q2^2 + hbar*q1
//! ```
//!
//! Connection lines give `Γ_{ijk}` for one index triple; any permutation may be
//! listed too but must carry the same polynomial. Unlisted components are zero.
//! Observables are polynomials in `q1 … q{two_n}` and `hbar`.

use fedosov_core::connection::{Connection, ConnectionTable};
use fedosov_core::fedosov::Observable;
use fedosov_core::parse::parse_poly;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line<T> {
    pub line: usize,
    pub value: T,
}

/// A job file as written, before any polynomial is parsed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Job {
    pub two_n: Option<usize>,
    pub order: Option<u32>,
    pub connection: Vec<Line<([usize; 3], String)>>,
    pub observables: Vec<Line<(String, String)>>,
}

/// A job with its connection validated and observables parsed.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub two_n: usize,
    pub order: u32,
    pub connection: Connection,
    pub observables: Vec<(String, Observable)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Chart,
    Connection,
    Observables,
}

fn syntax(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { line, message: message.into() }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_job(text: &str) -> Result<Job, CliError> {
    let mut job = Job::default();
    let mut section = Section::None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            section = match name.trim() {
                "chart" => Section::Chart,
                "connection" => Section::Connection,
                "observables" => Section::Observables,
                other => return Err(syntax(line, format!("unknown section [{other}]"))),
            };
            continue;
        }
        match section {
            Section::None => return Err(syntax(line, "entry before any section header")),
            Section::Chart => {
                let (key, value) = body.split_once('=').ok_or_else(|| syntax(line, "expected `key = value`"))?;
                let value = value.trim();
                match key.trim() {
                    "two_n" => job.two_n = Some(value.parse().map_err(|_| syntax(line, format!("bad two_n `{value}`")))?),
                    "order" => job.order = Some(value.parse().map_err(|_| syntax(line, format!("bad order `{value}`")))?),
                    other => return Err(syntax(line, format!("unknown chart key `{other}`"))),
                }
            }
            Section::Connection => {
                let (idx, poly) = body.split_once(':').ok_or_else(|| syntax(line, "expected `i j k : poly`"))?;
                let parts: Vec<&str> = idx.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(syntax(line, "expected three indices before `:`"));
                }
                let mut index = [0usize; 3];
                for (slot, p) in index.iter_mut().zip(&parts) {
                    *slot = p.parse().map_err(|_| syntax(line, format!("bad index `{p}`")))?;
                }
                job.connection.push(Line { line, value: (index, poly.trim().to_string()) });
            }
            Section::Observables => {
                let (name, poly) = body.split_once('=').ok_or_else(|| syntax(line, "expected `name = poly`"))?;
                let name = name.trim();
                if !is_name(name) {
                    return Err(syntax(line, format!("bad observable name `{name}`")));
                }
                if job.observables.iter().any(|o| o.value.0 == name) {
                    return Err(syntax(line, format!("observable `{name}` defined twice")));
                }
                job.observables.push(Line { line, value: (name.to_string(), poly.trim().to_string()) });
            }
        }
    }
    Ok(job)
}

impl Job {
    /// Parses every polynomial and validates the connection. `order` overrides the file.
    pub fn prepare(&self, order: Option<u32>) -> Result<Prepared, CliError> {
        let two_n = self.two_n.ok_or_else(|| CliError::Validation("[chart] is missing two_n".into()))?;
        let order = order.or(self.order).ok_or_else(|| CliError::Validation("[chart] is missing order and no --order was given".into()))?;
        if two_n < 2 || two_n % 2 != 0 {
            return Err(CliError::Validation(format!("two_n = {two_n} must be even and at least 2")));
        }
        if order < 2 {
            return Err(CliError::Validation(format!("order = {order} must be at least 2")));
        }
        let mut table = ConnectionTable::new(two_n);
        for Line { line, value: (index, text) } in &self.connection {
            let p = parse_poly(text, two_n).map_err(|e| syntax(*line, e.to_string()))?;
            table.push(*index, p);
        }
        let connection = table.validate().map_err(CliError::from)?;
        let mut observables = Vec::new();
        for Line { line, value: (name, text) } in &self.observables {
            let o = Observable::parse(text, two_n, order).map_err(|e| syntax(*line, e.to_string()))?;
            observables.push((name.clone(), o));
        }
        Ok(Prepared { two_n, order, connection, observables })
    }
}

impl Prepared {
    pub fn observable(&self, name: &str) -> Result<&Observable, CliError> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, o)| o)
            .ok_or_else(|| CliError::Validation(format!("no observable named `{name}`")))
    }
}
