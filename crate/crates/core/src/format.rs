//! BPPLIB text formats.
//!
//! BPP: `n`, `c`, then `n` lines holding one weight each (duplicates allowed).
//! CSP: `m`, `c`, then `m` lines holding `weight demand`.
//! Blank lines and surrounding whitespace are ignored; CRLF is accepted.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::instance::{Instance, InstanceError, Item};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Bpp,
    Csp,
    #[default]
    Auto,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bpp" => Ok(Format::Bpp),
            "csp" => Ok(Format::Csp),
            "auto" => Ok(Format::Auto),
            other => Err(format!("unknown format `{other}` (expected bpp, csp or auto)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("missing {0} line")]
    MissingHeader(&'static str),
    #[error("expected {expected} token(s), found {found}")]
    TokenCount { expected: usize, found: usize },
    #[error("`{0}` is not a non-negative integer")]
    NotInteger(String),
    #[error("{declared} items declared, {found} provided")]
    TooFewItems { declared: usize, found: usize },
    #[error("unexpected content after the {declared} declared items")]
    TrailingContent { declared: usize },
    #[error(transparent)]
    Invalid(InstanceError),
}

/// A parse failure with the 1-based line it refers to.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, kind }
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

fn integer<T: FromStr>(token: &str, line: usize) -> Result<T, ParseError> {
    token
        .parse()
        .map_err(|_| ParseError::new(line, ParseErrorKind::NotInteger(token.to_string())))
}

fn single<T: FromStr>(line: &Line<'_>) -> Result<T, ParseError> {
    if line.tokens.len() != 1 {
        return Err(ParseError::new(
            line.number,
            ParseErrorKind::TokenCount {
                expected: 1,
                found: line.tokens.len(),
            },
        ));
    }
    integer(line.tokens[0], line.number)
}

/// Parses a BPP or CSP text instance into canonical form.
///
/// In [`Format::Auto`] mode the first item line decides: two tokens mean CSP.
pub fn parse_instance(text: &[u8], format: Format) -> Result<Instance, ParseError> {
    let text = std::str::from_utf8(text).map_err(|e| {
        let line = text[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        ParseError::new(line, ParseErrorKind::Encoding)
    })?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| Line {
            number: i + 1,
            tokens: l.split_whitespace().collect(),
        })
        .filter(|l| !l.tokens.is_empty());

    let count_line = lines
        .next()
        .ok_or_else(|| ParseError::new(1, ParseErrorKind::MissingHeader("item count")))?;
    let declared: usize = single(&count_line)?;
    let cap_line = lines.next().ok_or_else(|| {
        ParseError::new(count_line.number + 1, ParseErrorKind::MissingHeader("capacity"))
    })?;
    let capacity: u64 = single(&cap_line)?;

    let mut last_line = cap_line.number;
    let mut items = Vec::with_capacity(declared);
    let mut item_lines = Vec::with_capacity(declared);
    let mut width = match format {
        Format::Bpp => Some(1),
        Format::Csp => Some(2),
        Format::Auto => None,
    };
    for _ in 0..declared {
        let line = lines.next().ok_or_else(|| {
            ParseError::new(
                last_line + 1,
                ParseErrorKind::TooFewItems {
                    declared,
                    found: items.len(),
                },
            )
        })?;
        last_line = line.number;
        let expected = *width.get_or_insert(if line.tokens.len() == 2 { 2 } else { 1 });
        if line.tokens.len() != expected {
            return Err(ParseError::new(
                line.number,
                ParseErrorKind::TokenCount {
                    expected,
                    found: line.tokens.len(),
                },
            ));
        }
        let weight: u64 = integer(line.tokens[0], line.number)?;
        let demand: u32 = if expected == 2 {
            integer(line.tokens[1], line.number)?
        } else {
            1
        };
        items.push(Item { weight, demand });
        item_lines.push(line.number);
    }
    if let Some(extra) = lines.next() {
        return Err(ParseError::new(
            extra.number,
            ParseErrorKind::TrailingContent { declared },
        ));
    }

    Instance::from_items(capacity, items).map_err(|e| {
        let line = match &e {
            InstanceError::WeightOutOfRange { index, .. } | InstanceError::ZeroDemand { index } => {
                item_lines[*index]
            }
            InstanceError::ZeroCapacity => cap_line.number,
            InstanceError::Empty => count_line.number,
        };
        ParseError::new(line, ParseErrorKind::Invalid(e))
    })
}

/// Writes the instance in CSP format.
pub fn to_csp_string(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", inst.len());
    let _ = writeln!(out, "{}", inst.capacity());
    for it in inst.items() {
        let _ = writeln!(out, "{} {}", it.weight, it.demand);
    }
    out
}

/// Writes the instance in BPP format, one line per item unit.
pub fn to_bpp_string(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", inst.total_units());
    let _ = writeln!(out, "{}", inst.capacity());
    for w in inst.expanded_weights() {
        let _ = writeln!(out, "{w}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::canonicalize;
    use proptest::prelude::*;

    #[test]
    fn parses_bpp_example() {
        let inst = parse_instance(b"6\n100\n72\n54\n34\n33\n19\n18\n", Format::Bpp).unwrap();
        assert_eq!(inst, canonicalize(100, &[72, 54, 34, 33, 19, 18]).unwrap());
    }

    #[test]
    fn parses_csp() {
        let inst = parse_instance(b"1\n100\n50 4\n", Format::Csp).unwrap();
        assert_eq!(inst.items(), &[Item { weight: 50, demand: 4 }]);
        let auto = parse_instance(b"1\n100\n50 4\n", Format::Auto).unwrap();
        assert_eq!(auto, inst);
    }

    #[test]
    fn reports_missing_items() {
        let err = parse_instance(b"2\n100\n50\n", Format::Auto).unwrap_err();
        assert_eq!(err.line, 4);
        assert_eq!(
            err.kind,
            ParseErrorKind::TooFewItems {
                declared: 2,
                found: 1
            }
        );
    }

    #[test]
    fn tolerates_whitespace_and_crlf() {
        let inst = parse_instance(b"  3\r\n\r\n 10 \r\n4\r\n4\r\n 7\t\r\n", Format::Auto).unwrap();
        assert_eq!(inst.items(), &[Item { weight: 7, demand: 1 }, Item { weight: 4, demand: 2 }]);
    }

    #[test]
    fn rejects_bad_tokens() {
        let err = parse_instance(b"2\n100\n50\nabc\n", Format::Bpp).unwrap_err();
        assert_eq!(err.line, 4);
        assert!(matches!(err.kind, ParseErrorKind::NotInteger(_)));

        let err = parse_instance(b"2\n100\n50\n30 2\n", Format::Auto).unwrap_err();
        assert_eq!(err.line, 4);
        assert!(matches!(err.kind, ParseErrorKind::TokenCount { expected: 1, found: 2 }));

        let err = parse_instance(b"2\n100\n50 1\n30 2\n", Format::Bpp).unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn names_line_of_oversized_weight() {
        let err = parse_instance(b"3\n100\n50\n\n101\n3\n", Format::Bpp).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(matches!(err.kind, ParseErrorKind::Invalid(_)));
    }

    #[test]
    fn rejects_trailing_items() {
        let err = parse_instance(b"1\n100\n50\n20\n", Format::Bpp).unwrap_err();
        assert_eq!(err.line, 4);
    }

    #[test]
    fn rejects_invalid_utf8() {
        let err = parse_instance(b"1\n100\n\xff\n", Format::Auto).unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.kind, ParseErrorKind::Encoding);
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1u64..500).prop_flat_map(|c| {
            prop::collection::vec((1..=c, 1u32..5), 1..15).prop_map(move |items| {
                Instance::from_items(
                    c,
                    items.into_iter().map(|(weight, demand)| Item { weight, demand }),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn serialize_parse_is_identity(inst in arb_instance()) {
            let csp = parse_instance(to_csp_string(&inst).as_bytes(), Format::Auto).unwrap();
            prop_assert_eq!(&csp, &inst);
            let bpp = parse_instance(to_bpp_string(&inst).as_bytes(), Format::Auto).unwrap();
            prop_assert_eq!(&bpp, &inst);
        }

        #[test]
        fn canonicalize_is_idempotent(inst in arb_instance()) {
            let again = canonicalize(inst.capacity(), &inst.expanded_weights()).unwrap();
            prop_assert_eq!(again, inst);
        }
    }
}
