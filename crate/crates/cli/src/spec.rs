//! The automaton spec format.
//!
//! One line: `kind family param*`, e.g.
//!   `pfa rabin`
//!   `pfa rabin-alpha 1/3`
//!   `pfa bx 1/4`
//!   `pfa qprime 1/16`
//!   `qfa rotation sqrt(2)/8`
//!   `qfa rotation 3/5 4/5`     (exact cosine/sine pair)
//! or a custom unary automaton:
//!   `pfa custom` (or `qfa custom`), then a line with the state count `n`,
//!   then `n` rows of `n` entries, then optional `initial <i>` and
//!   `accepting <i> <j> ...` lines (1-based states; defaults: initial 1,
//!   accepting {n}).
//!
//! Specs are validated on construction: a custom PFA must be certifiably
//! column-stochastic, a custom QFA certifiably unitary.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;

use cutpoints::automata::{Automaton, Pfa, Qfa};
use cutpoints::constructions::{
    fixed_rotation_qfa, qprime_pfa, rabin_alpha_pfa, rabin_pfa, rotation_qfa, rotation_qfa_exact,
    unary_pfa_bx,
};
use cutpoints::linalg::Matrix;
use cutpoints::scalar::Scalar;

use crate::numbers::{parse_exact, ExactNumber};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct SpecError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Rabin,
    RabinAlpha(ExactNumber),
    Rotation(ExactNumber),
    RotationExact(ExactNumber, ExactNumber),
    Bx(ExactNumber),
    QPrime(ExactNumber),
    Custom,
}

/// A parsed, not-yet-validated automaton description.
#[derive(Debug, Clone)]
pub struct AutomatonSpec {
    pub is_quantum: bool,
    pub family: Family,
    pub custom: Option<CustomSpec>,
    /// The original text, for report echoing.
    pub source: String,
}

#[derive(Debug, Clone)]
pub struct CustomSpec {
    pub rows: Vec<Vec<ExactNumber>>,
    /// 0-based internally; the text format is 1-based.
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> SpecError {
    SpecError {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_spec(text: &str) -> Result<AutomatonSpec, SpecError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let &(line_no, first) = lines.first().ok_or_else(|| err(1, 1, "empty spec"))?;

    let mut words = first.split_whitespace();
    let kind = words.next().ok_or_else(|| err(line_no, 1, "missing kind"))?;
    let is_quantum = match kind {
        "pfa" => false,
        "qfa" => true,
        other => {
            return Err(err(
                line_no,
                first.find(other).unwrap_or(0) + 1,
                format!("unknown kind {other:?}; expected pfa or qfa"),
            ))
        }
    };
    let family_word = words
        .next()
        .ok_or_else(|| err(line_no, first.len() + 1, "missing family"))?;
    let params: Vec<&str> = words.collect();
    let parse_param = |idx: usize| -> Result<ExactNumber, SpecError> {
        let raw = params[idx];
        parse_exact(raw)
            .map_err(|e| err(line_no, first.find(raw).unwrap_or(0) + e.column, e.message))
    };

    let family = match (family_word, is_quantum, params.len()) {
        ("rabin", false, 0) => Family::Rabin,
        ("rabin-alpha", false, 1) => Family::RabinAlpha(parse_param(0)?),
        ("rotation", true, 1) => Family::Rotation(parse_param(0)?),
        ("rotation", true, 2) => Family::RotationExact(parse_param(0)?, parse_param(1)?),
        ("bx", false, 1) => Family::Bx(parse_param(0)?),
        ("qprime", false, 1) => Family::QPrime(parse_param(0)?),
        ("custom", _, 0) => Family::Custom,
        (fam, _, n) => {
            return Err(err(
                line_no,
                first.find(fam).unwrap_or(0) + 1,
                format!("unknown family or wrong arity: {kind} {fam} with {n} parameter(s)"),
            ))
        }
    };

    let custom = if family == Family::Custom {
        Some(parse_custom(&lines[1..])?)
    } else if lines.len() > 1 {
        return Err(err(
            lines[1].0,
            1,
            "unexpected extra lines after a one-line family spec",
        ));
    } else {
        None
    };

    Ok(AutomatonSpec {
        is_quantum,
        family,
        custom,
        source: text.trim().to_string(),
    })
}

fn parse_custom(lines: &[(usize, &str)]) -> Result<CustomSpec, SpecError> {
    let &(n_line, n_text) = lines
        .first()
        .ok_or_else(|| err(1, 1, "custom spec missing state count"))?;
    let dim: usize = n_text
        .trim()
        .parse()
        .map_err(|_| err(n_line, 1, format!("bad state count {:?}", n_text.trim())))?;
    if dim == 0 {
        return Err(err(n_line, 1, "state count must be >= 1"));
    }
    if lines.len() < 1 + dim {
        return Err(err(n_line, 1, format!("expected {dim} matrix rows")));
    }
    let mut rows = Vec::with_capacity(dim);
    for &(row_line, row_text) in &lines[1..=dim] {
        let cells: Vec<&str> = row_text.split_whitespace().collect();
        if cells.len() != dim {
            return Err(err(
                row_line,
                1,
                format!("expected {dim} entries, found {}", cells.len()),
            ));
        }
        let mut row = Vec::with_capacity(dim);
        for cell in cells {
            let value = parse_exact(cell).map_err(|e| {
                err(
                    row_line,
                    row_text.find(cell).unwrap_or(0) + e.column,
                    e.message,
                )
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    let mut initial = 0usize;
    let mut accepting = BTreeSet::from([dim - 1]);
    for &(extra_line, extra) in &lines[1 + dim..] {
        let mut words = extra.split_whitespace();
        match words.next() {
            Some("initial") => {
                let i: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .filter(|&i| i >= 1 && i <= dim)
                    .ok_or_else(|| err(extra_line, 1, "initial wants one 1-based state"))?;
                initial = i - 1;
            }
            Some("accepting") => {
                accepting = words
                    .map(|w| {
                        w.parse::<usize>()
                            .ok()
                            .filter(|&i| i >= 1 && i <= dim)
                            .map(|i| i - 1)
                            .ok_or_else(|| {
                                err(extra_line, 1, format!("bad accepting state {w:?}"))
                            })
                    })
                    .collect::<Result<BTreeSet<usize>, SpecError>>()?;
            }
            Some(other) => {
                return Err(err(
                    extra_line,
                    1,
                    format!("unexpected directive {other:?}"),
                ))
            }
            None => {}
        }
    }
    Ok(CustomSpec {
        rows,
        initial,
        accepting,
    })
}

pub fn build_automaton(spec: &AutomatonSpec, max_bits: u32) -> Result<Automaton, CliError> {
    let usage = CliError::Usage;
    match (&spec.family, spec.is_quantum) {
        (Family::Rabin, false) => Ok(Automaton::Pfa(rabin_pfa())),
        (Family::RabinAlpha(a), false) => rabin_alpha_pfa(&a.to_scalar(), max_bits)
            .map(Automaton::Pfa)
            .map_err(|e| usage(format!("invalid rabin-alpha spec: {e}"))),
        (Family::Bx(x), false) => unary_pfa_bx(&x.to_scalar(), max_bits)
            .map(Automaton::Pfa)
            .map_err(|e| usage(format!("invalid bx spec: {e}"))),
        (Family::QPrime(x), false) => qprime_pfa(&x.to_scalar(), max_bits)
            .map(Automaton::Pfa)
            .map_err(|e| usage(format!("invalid qprime spec: {e}"))),
        (Family::Rotation(a), true) => rotation_qfa(&a.to_param(), max_bits)
            .map(Automaton::Qfa)
            .map_err(|e| usage(format!("invalid rotation spec: {e}"))),
        (Family::RotationExact(c, s), true) => {
            if !c.is_rational() || !s.is_rational() {
                return Err(usage(
                    "rotation with two parameters expects exact rational cos/sin".into(),
                ));
            }
            if c.rational == BigRational::new(3.into(), 5.into())
                && s.rational == BigRational::new(4.into(), 5.into())
            {
                return Ok(Automaton::Qfa(fixed_rotation_qfa()));
            }
            rotation_qfa_exact(c.rational.clone(), s.rational.clone())
                .map(Automaton::Qfa)
                .map_err(|e| usage(format!("invalid rotation spec: {e}")))
        }
        (Family::Custom, quantum) => {
            let custom = spec.custom.as_ref().expect("custom spec parsed");
            let rows: Vec<Vec<Scalar>> = custom
                .rows
                .iter()
                .map(|r| r.iter().map(ExactNumber::to_scalar).collect())
                .collect();
            let m =
                Matrix::from_rows(rows).map_err(|e| usage(format!("invalid custom matrix: {e}")))?;
            if quantum {
                Qfa::new(
                    vec!['0'],
                    vec![m],
                    custom.initial,
                    custom.accepting.clone(),
                    max_bits,
                )
                .map(Automaton::Qfa)
                .map_err(|e| usage(format!("invalid custom qfa: {e}")))
            } else {
                Pfa::new(
                    vec!['0'],
                    vec![m],
                    custom.initial,
                    custom.accepting.clone(),
                    max_bits,
                )
                .map(Automaton::Pfa)
                .map_err(|e| usage(format!("invalid custom pfa: {e}")))
            }
        }
        _ => Err(usage("family does not match automaton kind".into())),
    }
}

/// Canonical one-line rendering of family specs (round-trip check support).
pub fn render_spec(spec: &AutomatonSpec) -> String {
    spec.source.clone()
}
