//! Relevant formulas with finite-width conjunction and disjunction.
//!
//! Concrete syntax:
//!
//! ```text
//! formula := "bot" | "top" | ident | "~" formula | "(" formula "->" formula ")"
//!          | "And" "[" [formula {"," formula}] "]" | "Or" "[" [formula {"," formula}] "]"
//! ident   := [a-z][a-z0-9_]*
//! ```
//!
//! `top` is sugar for `~bot` and is never produced by the printer.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("invalid proposition name {0:?}: expected [a-z][a-z0-9_]*")]
    InvalidPropName(String),
    #[error("iterated entailment needs a bound of at least 2, got {0}")]
    BoundTooSmall(usize),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Parse failure with a 1-based position and the tokens that would have been accepted.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: expected {}, found {found}", .expected.join(" or "))]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

/// Name of a propositional variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropId(Arc<str>);

impl PropId {
    pub fn new(name: &str) -> Result<Self, FormulaError> {
        if is_ident(name) && !is_keyword(name) {
            Ok(PropId(Arc::from(name)))
        } else {
            Err(FormulaError::InvalidPropName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for PropId {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropId::new(s)
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "bot" | "top")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(PropId),
    Bottom,
    Neg(Box<Formula>),
    /// Empty conjunction holds everywhere.
    Conj(Vec<Formula>),
    /// Empty disjunction holds nowhere.
    Disj(Vec<Formula>),
    Impl(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Result<Self, FormulaError> {
        PropId::new(name).map(Formula::Atom)
    }

    /// `~bot`, the defined verum.
    pub fn top() -> Self {
        Formula::Bottom.neg()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Formula::Neg(Box::new(self))
    }

    pub fn implies(self, consequent: Formula) -> Self {
        Formula::Impl(Box::new(self), Box::new(consequent))
    }

    /// Nesting depth of `->`; negation, conjunction and disjunction do not add to it.
    pub fn degree(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Neg(f) => f.degree(),
            Formula::Conj(items) | Formula::Disj(items) => {
                items.iter().map(Formula::degree).max().unwrap_or(0)
            }
            Formula::Impl(a, b) => a.degree().max(b.degree()) + 1,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 1,
            Formula::Neg(f) => 1 + f.size(),
            Formula::Conj(items) | Formula::Disj(items) => {
                1 + items.iter().map(Formula::size).sum::<usize>()
            }
            Formula::Impl(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Propositional variables occurring in the formula, in first-occurrence order.
    pub fn props(&self) -> Vec<PropId> {
        let mut out = Vec::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut Vec<PropId>) {
        match self {
            Formula::Atom(p) => {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
            Formula::Bottom => {}
            Formula::Neg(f) => f.collect_props(out),
            Formula::Conj(items) | Formula::Disj(items) => {
                items.iter().for_each(|f| f.collect_props(out))
            }
            Formula::Impl(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }
}

/// `phi -> (phi -> ... (phi -> psi))` with `count` copies of `phi`.
fn nested_arrow(phi: &Formula, psi: &Formula, count: usize) -> Formula {
    (0..count).fold(psi.clone(), |acc, _| phi.clone().implies(acc))
}

/// Iterated entailment truncated at `bound`: the disjunction over n = 2..=bound of
/// the n-fold nested implication of `psi` from `phi`.
pub fn omega_arrow(phi: &Formula, psi: &Formula, bound: usize) -> Result<Formula, FormulaError> {
    if bound < 2 {
        return Err(FormulaError::BoundTooSmall(bound));
    }
    Ok(Formula::Disj(
        (2..=bound).map(|n| nested_arrow(phi, psi, n)).collect(),
    ))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Bottom => f.write_str("bot"),
            Formula::Neg(inner) => write!(f, "~{inner}"),
            Formula::Conj(items) => write_list(f, "And", items),
            Formula::Disj(items) => write_list(f, "Or", items),
            Formula::Impl(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, head: &str, items: &[Formula]) -> fmt::Result {
    write!(f, "{head}[")?;
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    f.write_str("]")
}

/// Canonical text of a formula; `parse(&print(f)) == Ok(f)`.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

/// Parses a formula. A single unparenthesized `->` is accepted at the top level,
/// so `p -> q` reads as `(p -> q)`; nested implications need parentheses.
pub fn parse(text: &str) -> Result<Formula, SyntaxError> {
    let mut parser = Parser::new(text);
    let mut formula = parser.formula()?;
    if parser.eat("->") {
        formula = formula.implies(parser.formula()?);
    }
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error(&["end of input"]));
    }
    Ok(formula)
}

impl FromStr for Formula {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

const FORMULA_START: &[&str] = &[
    "bot",
    "top",
    "identifier",
    "\"~\"",
    "\"(\"",
    "\"And\"",
    "\"Or\"",
];

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn position(&self) -> (usize, usize) {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..self.pos] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        (line, column)
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let (line, column) = self.position();
        let found = match self.chars.get(self.pos) {
            None => "end of input".to_string(),
            Some(c) if c.is_alphanumeric() || *c == '_' => {
                let word: String = self.chars[self.pos..]
                    .iter()
                    .take_while(|c| c.is_alphanumeric() || **c == '_')
                    .collect();
                format!("{word:?}")
            }
            Some(c) => format!("{:?}", c.to_string()),
        };
        SyntaxError {
            line,
            column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        let len = token.chars().count();
        if self.chars.len() >= self.pos + len
            && self.chars[self.pos..self.pos + len]
                .iter()
                .copied()
                .eq(token.chars())
        {
            self.pos += len;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), SyntaxError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&[&format!("{token:?}")]))
        }
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some('~') => {
                self.pos += 1;
                Ok(self.formula()?.neg())
            }
            Some('(') => {
                self.pos += 1;
                let antecedent = self.formula()?;
                self.expect("->")?;
                let consequent = self.formula()?;
                self.expect(")")?;
                Ok(antecedent.implies(consequent))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let word = self.word();
                match word.as_str() {
                    "bot" => Ok(Formula::Bottom),
                    "top" => Ok(Formula::top()),
                    "And" => Ok(Formula::Conj(self.items()?)),
                    "Or" => Ok(Formula::Disj(self.items()?)),
                    w if is_ident(w) => Ok(Formula::Atom(PropId(Arc::from(w)))),
                    _ => {
                        self.pos = start;
                        Err(self.error(FORMULA_START))
                    }
                }
            }
            _ => Err(self.error(FORMULA_START)),
        }
    }

    fn items(&mut self) -> Result<Vec<Formula>, SyntaxError> {
        self.expect("[")?;
        let mut items = Vec::new();
        if self.eat("]") {
            return Ok(items);
        }
        loop {
            items.push(self.formula()?);
            if self.eat("]") {
                return Ok(items);
            }
            if !self.eat(",") {
                return Err(self.error(&["\",\"", "\"]\""]));
            }
        }
    }
}
