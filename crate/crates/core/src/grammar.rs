//! Text syntax for operators.
//!
//! ```text
//! spec    := name [':' number]
//!          | 'dual' '(' spec ')'
//!          | 'ordinal' '(' [summand (',' summand)*] ')'
//!          | 'gen' '(' ('luka' | 'nlog' | 'yager' ':' number) ')'
//!          | 'blend' '(' number ',' spec ',' spec ')'
//! summand := spec '@' number '-' number
//! ```
//!
//! Names are case-insensitive and whitespace is ignored everywhere. A
//! conorm is named by its own name (`bounded_sum`, `frank_conorm`) or by a
//! trailing `'` on the norm name (`frank'`).

use std::fmt;

use crate::catalog::{make_operator, standard_dual, Family, FamilyId, Operator, Provenance};
use crate::constructors::{ordinal_sum, tnorm_from_generator, Generator, OrdinalSummand};
use crate::error::{Error, Result};

const ALIASES: &[(&str, FamilyId)] = &[
    ("min", FamilyId::norm(Family::Minimum)),
    ("prod", FamilyId::norm(Family::Product)),
    ("luka", FamilyId::norm(Family::Lukasiewicz)),
    ("nmin", FamilyId::norm(Family::NilpotentMinimum)),
    ("max", FamilyId::conorm(Family::Minimum)),
    ("probsum", FamilyId::conorm(Family::Product)),
    ("bsum", FamilyId::conorm(Family::Lukasiewicz)),
    ("nmax", FamilyId::conorm(Family::NilpotentMinimum)),
];

/// Resolves a family name or alias, case-insensitively.
pub fn lookup_family(name: &str) -> Option<FamilyId> {
    let lower = name.to_ascii_lowercase();
    if let Some(base) = lower.strip_suffix('\'') {
        return lookup_family(base)
            .filter(|id| id.polarity == crate::catalog::Polarity::Norm)
            .map(FamilyId::dual);
    }
    FamilyId::all()
        .find(|id| id.name() == lower)
        .or_else(|| ALIASES.iter().find(|(a, _)| *a == lower).map(|(_, id)| *id))
}

/// Parses an operator spec.
pub fn parse_operator_spec(text: &str) -> Result<Operator> {
    let mut p = Parser { text, pos: 0 };
    let op = p.spec()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(op)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected an operator name"));
        }
        self.pos += len;
        let mut name = self.text[start..self.pos].to_string();
        if self.rest().starts_with('\'') {
            self.pos += 1;
            name.push('\'');
        }
        Ok(name)
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut i = self.pos;
        if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
            i += 1;
        }
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'-' || bytes[j] == b'+') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        match self.text[start..i].parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = i;
                Ok(v)
            }
            _ => Err(self.error("expected a number")),
        }
    }

    fn spec(&mut self) -> Result<Operator> {
        let name = self.ident()?;
        match name.to_ascii_lowercase().as_str() {
            "dual" if self.peek() == Some('(') => {
                self.expect('(')?;
                let inner = self.spec()?;
                self.expect(')')?;
                Ok(standard_dual(&inner))
            }
            "ordinal" if self.peek() == Some('(') => {
                self.expect('(')?;
                let mut summands = Vec::new();
                if !self.eat(')') {
                    loop {
                        summands.push(self.summand()?);
                        if self.eat(')') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                ordinal_sum(summands)
            }
            "gen" if self.peek() == Some('(') => {
                self.expect('(')?;
                let gen = self.generator()?;
                self.expect(')')?;
                Ok(tnorm_from_generator(&gen))
            }
            "blend" if self.peek() == Some('(') => {
                self.expect('(')?;
                let weight = self.number()?;
                self.expect(',')?;
                let first = self.spec()?;
                self.expect(',')?;
                let second = self.spec()?;
                self.expect(')')?;
                Operator::blend(weight, &first, &second)
            }
            _ => {
                let id = lookup_family(&name).ok_or_else(|| Error::UnknownFamily(name.clone()))?;
                let alpha = if self.eat(':') {
                    Some(self.number()?)
                } else {
                    None
                };
                make_operator(id, alpha)
            }
        }
    }

    fn summand(&mut self) -> Result<OrdinalSummand> {
        let op = self.spec()?;
        self.expect('@')?;
        let a = self.number()?;
        self.expect('-')?;
        let b = self.number()?;
        OrdinalSummand::new(op, a, b)
    }

    fn generator(&mut self) -> Result<Generator> {
        let name = self.ident()?;
        match name.to_ascii_lowercase().as_str() {
            "luka" => Ok(Generator::lukasiewicz()),
            "nlog" => Ok(Generator::neg_log()),
            "yager" => {
                self.expect(':')?;
                Generator::yager(self.number()?)
            }
            other => Err(Error::UnknownFamily(format!("gen({other})"))),
        }
    }
}

/// Renders an operator in the spec grammar where possible; custom rules
/// render as their label.
pub fn render(op: &Operator) -> String {
    op.to_string()
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.provenance() {
            Provenance::ClosedForm { id, alpha: None } => write!(f, "{id}"),
            Provenance::ClosedForm { id, alpha: Some(a) } => write!(f, "{id}:{a}"),
            Provenance::StandardDual(inner) => write!(f, "dual({inner})"),
            Provenance::DualUnder { inner, .. } => write!(f, "dual_under({inner})"),
            Provenance::OrdinalSum(summands) => {
                f.write_str("ordinal(")?;
                for (i, s) in summands.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}@{}-{}", s.op(), s.a(), s.b())?;
                }
                f.write_str(")")
            }
            Provenance::Generator(gen) => f.write_str(&gen.label()),
            Provenance::Blend {
                weight,
                first,
                second,
            } => write!(f, "blend({weight},{first},{second})"),
            Provenance::Custom(rule) => f.write_str(&rule.label),
        }
    }
}
