//! Safety properties over the recent history of control outputs.
//!
//! Concrete syntax:
//!
//! ```text
//! always <var> <cmp> <int>                     cmp: <= < >= > == != (or ≤ ≥ ≠ =)
//! window <var> in (<lo>,<hi>) persist <n>
//! ```
//!
//! The window form is violated when the last `n` outputs all lie outside the
//! inclusive range `[lo, hi]`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
}

impl Comparison {
    pub fn holds(self, value: i32, bound: i32) -> bool {
        match self {
            Comparison::Le => value <= bound,
            Comparison::Lt => value < bound,
            Comparison::Ge => value >= bound,
            Comparison::Gt => value > bound,
            Comparison::Eq => value == bound,
            Comparison::Ne => value != bound,
        }
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Comparison::Le => "<=",
            Comparison::Lt => "<",
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
            Comparison::Eq => "==",
            Comparison::Ne => "!=",
        }
    }

    pub fn math(self) -> &'static str {
        match self {
            Comparison::Le => "≤",
            Comparison::Lt => "<",
            Comparison::Ge => "≥",
            Comparison::Gt => ">",
            Comparison::Eq => "=",
            Comparison::Ne => "≠",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum PhiForm {
    Instant { comparison: Comparison, bound: i32 },
    Window { r_min: i32, r_max: i32, n: usize },
}

/// The property Φ and the variable whose value is the control output.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SafetySpec {
    pub output_variable: String,
    pub form: PhiForm,
}

impl SafetySpec {
    /// How many outputs Φ looks at.
    pub fn history(&self) -> usize {
        match self.form {
            PhiForm::Instant { .. } => 1,
            PhiForm::Window { n, .. } => n,
        }
    }

    pub fn new_buffer(&self) -> OutputBuffer {
        OutputBuffer::new(self.history())
    }

    /// Canonical concrete syntax; parses back to the same spec.
    pub fn to_source(&self) -> String {
        match self.form {
            PhiForm::Instant { comparison, bound } => {
                format!("always {} {} {bound}", self.output_variable, comparison.ascii())
            }
            PhiForm::Window { r_min, r_max, n } => format!(
                "window {} in ({r_min},{r_max}) persist {n}",
                self.output_variable
            ),
        }
    }
}

impl fmt::Display for SafetySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.form {
            PhiForm::Instant { comparison, bound } => {
                write!(f, "{} {} {bound}", self.output_variable, comparison.math())
            }
            PhiForm::Window { r_min, r_max, n } => write!(
                f,
                "{} ∈ [{r_min}, {r_max}] within last {n}",
                self.output_variable
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("property syntax error at column {col}: {message}")]
    Syntax { col: usize, message: String },
    #[error("window range ({r_min},{r_max}) is empty: the lower bound must be below the upper bound")]
    EmptyRange { r_min: i32, r_max: i32 },
    #[error("window length must be at least 1")]
    ZeroWindow,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropertyError {
    #[error("cannot evaluate an instantaneous property on an empty output history")]
    EmptyBuffer,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Int(i64),
    Cmp(Comparison),
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, SpecError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, message: String| SpecError::Syntax { col: col + 1, message };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Word(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            Tok::Int(s.parse().map_err(|_| err(start, format!("bad integer `{s}`")))?)
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                ('<', Some('=')) => (Tok::Cmp(Comparison::Le), 2),
                ('>', Some('=')) => (Tok::Cmp(Comparison::Ge), 2),
                ('=', Some('=')) => (Tok::Cmp(Comparison::Eq), 2),
                ('!', Some('=')) => (Tok::Cmp(Comparison::Ne), 2),
                ('<', _) => (Tok::Cmp(Comparison::Lt), 1),
                ('>', _) => (Tok::Cmp(Comparison::Gt), 1),
                ('=', _) => (Tok::Cmp(Comparison::Eq), 1),
                ('≤', _) => (Tok::Cmp(Comparison::Le), 1),
                ('≥', _) => (Tok::Cmp(Comparison::Ge), 1),
                ('≠', _) => (Tok::Cmp(Comparison::Ne), 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                _ => return Err(err(start, format!("unexpected character {c:?}"))),
            };
            i += len;
            tok
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct SpecParser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl SpecParser {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0) + 1
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, SpecError> {
        Err(SpecError::Syntax {
            col: self.col(),
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn word(&mut self, what: &str) -> Result<String, SpecError> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Word(w))) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SpecError> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Word(w))) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(format!("expected `{kw}`")),
        }
    }

    fn int(&mut self) -> Result<i32, SpecError> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Int(v))) => {
                let v = i32::try_from(*v);
                match v {
                    Ok(v) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    Err(_) => self.fail("integer does not fit in 32 bits"),
                }
            }
            _ => self.fail("expected an integer"),
        }
    }

    fn punct(&mut self, want: Tok, what: &str) -> Result<(), SpecError> {
        if self.toks.get(self.pos).map(|t| &t.1) == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected `{what}`"))
        }
    }
}

pub fn parse_spec(text: &str) -> Result<SafetySpec, SpecError> {
    let toks = tokenize(text)?;
    let mut p = SpecParser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let head = p.word("`always` or `window`")?;
    let spec = match head.as_str() {
        "always" => {
            let var = p.word("the output variable")?;
            let comparison = match p.next() {
                Some(Tok::Cmp(c)) => c,
                _ => {
                    p.pos -= 1;
                    return p.fail("expected a comparison operator");
                }
            };
            let bound = p.int()?;
            SafetySpec {
                output_variable: var,
                form: PhiForm::Instant { comparison, bound },
            }
        }
        "window" => {
            let var = p.word("the output variable")?;
            p.keyword("in")?;
            p.punct(Tok::LParen, "(")?;
            let r_min = p.int()?;
            p.punct(Tok::Comma, ",")?;
            let r_max = p.int()?;
            p.punct(Tok::RParen, ")")?;
            p.keyword("persist")?;
            let n = p.int()?;
            if r_min >= r_max {
                return Err(SpecError::EmptyRange { r_min, r_max });
            }
            if n < 1 {
                return Err(SpecError::ZeroWindow);
            }
            SafetySpec {
                output_variable: var,
                form: PhiForm::Window {
                    r_min,
                    r_max,
                    n: n as usize,
                },
            }
        }
        other => {
            p.pos -= 1;
            return p.fail(format!("unknown property form `{other}`"));
        }
    };
    if p.pos < p.toks.len() {
        return p.fail("unexpected trailing input");
    }
    Ok(spec)
}

/// The most recent control outputs, oldest first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OutputBuffer {
    capacity: usize,
    entries: VecDeque<i32>,
}

impl OutputBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "output buffer capacity must be positive");
        OutputBuffer {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn append(&mut self, value: i32) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(value);
    }

    pub fn with(mut self, value: i32) -> Self {
        self.append(value);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn newest(&self) -> Option<i32> {
        self.entries.back().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = i32> + '_ {
        self.entries.iter().copied()
    }
}

/// Φ over the buffer.
pub fn eval_phi(spec: &SafetySpec, buffer: &OutputBuffer) -> Result<bool, PropertyError> {
    match spec.form {
        PhiForm::Instant { comparison, bound } => buffer
            .newest()
            .map(|v| comparison.holds(v, bound))
            .ok_or(PropertyError::EmptyBuffer),
        PhiForm::Window { r_min, r_max, n } => Ok(buffer.len() < n
            || !buffer.entries().all(|v| v < r_min || v > r_max)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_instant_form() {
        let s = parse_spec("always output <= 10").unwrap();
        assert_eq!(s.output_variable, "output");
        assert_eq!(
            s.form,
            PhiForm::Instant {
                comparison: Comparison::Le,
                bound: 10
            }
        );
        assert_eq!(s.to_string(), "output ≤ 10");
        assert_eq!(parse_spec("always t ≥ -3").unwrap().to_string(), "t ≥ -3");
    }

    #[test]
    fn parses_window_form() {
        let s = parse_spec("window o in (0,100) persist 5").unwrap();
        assert_eq!(
            s.form,
            PhiForm::Window {
                r_min: 0,
                r_max: 100,
                n: 5
            }
        );
        assert_eq!(parse_spec(&s.to_source()).unwrap(), s);
    }

    #[test]
    fn rejects_bad_specs() {
        assert_eq!(
            parse_spec("window o in (10,5) persist 3"),
            Err(SpecError::EmptyRange { r_min: 10, r_max: 5 })
        );
        assert_eq!(parse_spec("window o in (1,5) persist 0"), Err(SpecError::ZeroWindow));
        assert!(matches!(parse_spec("always o <= "), Err(SpecError::Syntax { .. })));
        assert!(matches!(parse_spec("sometimes o < 1"), Err(SpecError::Syntax { col: 1, .. })));
        assert!(matches!(parse_spec("always o < 1 extra"), Err(SpecError::Syntax { .. })));
        assert!(matches!(parse_spec("always o < 99999999999"), Err(SpecError::Syntax { .. })));
    }

    #[test]
    fn ring_buffer_appends() {
        let b = OutputBuffer::new(5).with(4);
        assert_eq!(b.entries().collect::<Vec<_>>(), [4]);
        let mut b = OutputBuffer::new(5);
        for v in 1..=6 {
            b.append(v);
        }
        assert_eq!(b.entries().collect::<Vec<_>>(), [2, 3, 4, 5, 6]);
        let mut b = OutputBuffer::new(5);
        for _ in 0..5 {
            b.append(11);
        }
        assert_eq!(b.entries().collect::<Vec<_>>(), [11; 5]);
    }

    #[test]
    fn window_evaluation() {
        let spec = parse_spec("window o in (0,10) persist 5").unwrap();
        let full = |vals: [i32; 5]| vals.iter().fold(OutputBuffer::new(5), |b, &v| b.with(v));
        assert_eq!(eval_phi(&spec, &full([11; 5])), Ok(false));
        assert_eq!(eval_phi(&spec, &full([11, 11, 5, 11, 11])), Ok(true));
        assert_eq!(eval_phi(&spec, &OutputBuffer::new(5).with(50)), Ok(true));
        assert_eq!(eval_phi(&spec, &full([-1, 11, 10_000, 11, 11])), Ok(false));
        assert_eq!(eval_phi(&spec, &full([0, 11, 11, 11, 11])), Ok(true));
    }

    #[test]
    fn instant_evaluation() {
        let spec = parse_spec("always output <= 10").unwrap();
        assert_eq!(eval_phi(&spec, &OutputBuffer::new(1).with(11)), Ok(false));
        assert_eq!(eval_phi(&spec, &OutputBuffer::new(1)), Err(PropertyError::EmptyBuffer));
        for b in [i32::MIN, -1, 0, 10, i32::MAX] {
            let spec = SafetySpec {
                output_variable: "o".into(),
                form: PhiForm::Instant {
                    comparison: Comparison::Le,
                    bound: b,
                },
            };
            let mut probes = vec![b, i32::MIN, i32::MAX];
            probes.extend(b.checked_sub(1));
            probes.extend(b.checked_add(1));
            for v in probes {
                let got = eval_phi(&spec, &OutputBuffer::new(1).with(v)).unwrap();
                assert_eq!(got, v <= b, "{v} <= {b}");
            }
        }
    }
}
