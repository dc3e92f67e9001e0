//! Formulas of the simple modal fragment and their textual syntax.
//!
//! ```text
//! formula := implication
//! implication := disjunction ("->" implication)?
//! disjunction := conjunction ("|" conjunction)*
//! conjunction := unary ("&" unary)*
//! unary := "~" unary | "[" sources "]" unary | "(" sources ")" unary | primary
//! primary := atom | "true" | "false" | "(" formula ")"
//! ```
//!
//! Sources are written 1-based (`[1,2] p`) and stored 0-based.

use std::fmt;

use crate::error::{Error, Result};
use crate::frame::{Frame, Proposition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Bottom,
    Top,
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `[J]X`.
    Necessity(Vec<usize>, Box<Formula>),
    /// The basic logical assignment `(J)X`.
    Bla(Vec<usize>, Box<Formula>),
}

impl Formula {
    pub fn atom(i: usize) -> Self {
        Formula::Atom(i)
    }

    pub fn not(x: Formula) -> Self {
        Formula::Not(Box::new(x))
    }

    pub fn and(x: Formula, y: Formula) -> Self {
        Formula::And(Box::new(x), Box::new(y))
    }

    pub fn or(x: Formula, y: Formula) -> Self {
        Formula::Or(Box::new(x), Box::new(y))
    }

    pub fn implies(x: Formula, y: Formula) -> Self {
        Formula::Implies(Box::new(x), Box::new(y))
    }

    pub fn necessity(group: impl IntoIterator<Item = usize>, x: Formula) -> Self {
        Formula::Necessity(normalize(group), Box::new(x))
    }

    pub fn bla(group: impl IntoIterator<Item = usize>, x: Formula) -> Self {
        Formula::Bla(normalize(group), Box::new(x))
    }

    /// `⟨J⟩X = ¬[J]¬X`.
    pub fn possibility(group: impl IntoIterator<Item = usize>, x: Formula) -> Self {
        Formula::not(Formula::necessity(group, Formula::not(x)))
    }

    /// `⋁E` for an atom set.
    pub fn disjunction_of(p: Proposition) -> Self {
        p.atoms()
            .map(Formula::Atom)
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    pub fn is_classical(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Top | Formula::Atom(_) => true,
            Formula::Not(x) => x.is_classical(),
            Formula::And(x, y) | Formula::Or(x, y) | Formula::Implies(x, y) => x.is_classical() && y.is_classical(),
            Formula::Necessity(..) | Formula::Bla(..) => false,
        }
    }

    /// Whether modalities only ever wrap classical formulas.
    pub fn is_simple(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Top | Formula::Atom(_) => true,
            Formula::Not(x) => x.is_simple(),
            Formula::And(x, y) | Formula::Or(x, y) | Formula::Implies(x, y) => x.is_simple() && y.is_simple(),
            Formula::Necessity(_, x) | Formula::Bla(_, x) => x.is_classical(),
        }
    }

    /// The atom set `pX` of a classical formula; `None` for modal ones.
    pub fn atoms_of(&self, frame: &Frame) -> Option<Proposition> {
        Some(match self {
            Formula::Bottom => Proposition::EMPTY,
            Formula::Top => frame.full(),
            Formula::Atom(i) => Proposition::atom(*i),
            Formula::Not(x) => Proposition::from_bits(frame.full().bits() & !x.atoms_of(frame)?.bits()),
            Formula::And(x, y) => x.atoms_of(frame)?.intersection(y.atoms_of(frame)?),
            Formula::Or(x, y) => x.atoms_of(frame)?.union(y.atoms_of(frame)?),
            Formula::Implies(x, y) => {
                Proposition::from_bits(frame.full().bits() & !x.atoms_of(frame)?.bits()).union(y.atoms_of(frame)?)
            }
            Formula::Necessity(..) | Formula::Bla(..) => return None,
        })
    }

    /// Renders the formula in the parser's syntax.
    pub fn display<'a>(&'a self, frame: &'a Frame) -> impl fmt::Display + 'a {
        Shown { formula: self, frame }
    }
}

fn normalize(group: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut g: Vec<usize> = group.into_iter().collect();
    g.sort_unstable();
    g.dedup();
    g
}

struct Shown<'a> {
    formula: &'a Formula,
    frame: &'a Frame,
}

fn shown<'a>(formula: &'a Formula, frame: &'a Frame) -> Shown<'a> {
    Shown { formula, frame }
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |x| shown(x, self.frame);
        let group = |g: &[usize]| g.iter().map(|s| (s + 1).to_string()).collect::<Vec<_>>().join(",");
        match self.formula {
            Formula::Bottom => write!(f, "false"),
            Formula::Top => write!(f, "true"),
            Formula::Atom(i) => match self.frame.atoms().get(*i) {
                Some(name) => write!(f, "{name}"),
                None => write!(f, "#{i}"),
            },
            Formula::Not(x) => write!(f, "~{}", sub(x)),
            Formula::And(x, y) => write!(f, "({} & {})", sub(x), sub(y)),
            Formula::Or(x, y) => write!(f, "({} | {})", sub(x), sub(y)),
            Formula::Implies(x, y) => write!(f, "({} -> {})", sub(x), sub(y)),
            Formula::Necessity(g, x) => write!(f, "[{}] {}", group(g), sub(x)),
            Formula::Bla(g, x) => write!(f, "({}) {}", group(g), sub(x)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    Number(usize),
    And,
    Or,
    Not,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        let single = match c {
            '&' => Some(Token::And),
            '|' => Some(Token::Or),
            '~' => Some(Token::Not),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            '[' => Some(Token::LBracket),
            ']' => Some(Token::RBracket),
            ',' => Some(Token::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            k += 1;
        } else if c.is_whitespace() {
            k += 1;
        } else if c == '-' {
            if chars.get(k + 1).map(|x| x.1) != Some('>') {
                return Err(Error::Parse {
                    position: pos,
                    message: "expected '->'".into(),
                });
            }
            out.push((pos, Token::Arrow));
            k += 2;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let text: String = chars[start..k].iter().map(|x| x.1).collect();
            let n = text.parse().map_err(|_| Error::Parse {
                position: pos,
                message: format!("bad number '{text}'"),
            })?;
            out.push((pos, Token::Number(n)));
        } else if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            out.push((pos, Token::Ident(chars[start..k].iter().map(|x| x.1).collect())));
        } else {
            return Err(Error::Parse {
                position: pos,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    at: usize,
    end: usize,
    frame: &'a Frame,
    sources: usize,
    /// Position of the innermost enclosing modality, if any.
    modal_depth: Option<usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|t| &t.1)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |t| t.0)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.position(),
            message: message.into(),
        })
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<()> {
        if self.peek() == Some(&token) {
            self.at += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let left = self.disjunction()?;
        if self.peek() == Some(&Token::Arrow) {
            self.at += 1;
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut left = self.conjunction()?;
        while self.peek() == Some(&Token::Or) {
            self.at += 1;
            left = Formula::or(left, self.conjunction()?);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.at += 1;
            left = Formula::and(left, self.unary()?);
        }
        Ok(left)
    }

    fn sources(&mut self, close: Token, what: &str) -> Result<Vec<usize>> {
        let mut group = Vec::new();
        loop {
            let pos = self.position();
            match self.peek() {
                Some(Token::Number(n)) => {
                    let n = *n;
                    if n == 0 || n > self.sources {
                        return Err(Error::Parse {
                            position: pos,
                            message: format!("source {n} out of range 1..={}", self.sources),
                        });
                    }
                    group.push(n - 1);
                    self.at += 1;
                }
                _ => return self.error("expected a source number"),
            }
            match self.peek() {
                Some(Token::Comma) => self.at += 1,
                _ => break,
            }
        }
        self.expect(close, what)?;
        Ok(group)
    }

    fn modal_body(&mut self, start: usize) -> Result<Formula> {
        if self.modal_depth.is_some() {
            return Err(Error::NestedModality { position: start });
        }
        self.modal_depth = Some(start);
        let body = self.unary();
        self.modal_depth = None;
        body
    }

    fn unary(&mut self) -> Result<Formula> {
        let start = self.position();
        match self.peek() {
            Some(Token::Not) => {
                self.at += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Token::LBracket) => {
                self.at += 1;
                let group = self.sources(Token::RBracket, "']'")?;
                let body = self.modal_body(start)?;
                Ok(Formula::necessity(group, body))
            }
            Some(Token::LParen) if matches!(self.tokens.get(self.at + 1), Some((_, Token::Number(_)))) => {
                self.at += 1;
                let group = self.sources(Token::RParen, "')'")?;
                let body = self.modal_body(start)?;
                Ok(Formula::bla(group, body))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        let pos = self.position();
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                self.at += 1;
                match name.as_str() {
                    "true" => Ok(Formula::Top),
                    "false" => Ok(Formula::Bottom),
                    _ => match self.frame.atom_index(&name) {
                        Some(i) => Ok(Formula::Atom(i)),
                        None => Err(Error::Parse {
                            position: pos,
                            message: format!("unknown atom '{name}'"),
                        }),
                    },
                }
            }
            Some(Token::LParen) => {
                self.at += 1;
                let inner = self.implication()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(_) => self.error("expected a formula"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses a simple modal formula over the atoms of `frame` with `sources`
/// sources. Positions in errors are byte offsets.
pub fn parse(input: &str, frame: &Frame, sources: usize) -> Result<Formula> {
    let mut parser = Parser {
        tokens: tokenize(input)?,
        at: 0,
        end: input.len(),
        frame,
        sources,
        modal_depth: None,
    };
    let formula = parser.implication()?;
    if parser.at < parser.tokens.len() {
        return parser.error("unexpected trailing input");
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> Frame {
        Frame::new(["p", "q", "r"]).unwrap()
    }

    #[test]
    fn parses_connectives_with_precedence() {
        let f = frame();
        let x = parse("p & q | ~r -> p", &f, 2).unwrap();
        let expected = Formula::implies(
            Formula::or(
                Formula::and(Formula::atom(0), Formula::atom(1)),
                Formula::not(Formula::atom(2)),
            ),
            Formula::atom(0),
        );
        assert_eq!(x, expected);
        assert_eq!(
            parse("p -> q -> r", &f, 1).unwrap(),
            parse("p -> (q -> r)", &f, 1).unwrap()
        );
    }

    #[test]
    fn parses_modalities() {
        let f = frame();
        let x = parse("[2,1] (p | q) & (1) r", &f, 2).unwrap();
        assert_eq!(
            x,
            Formula::and(
                Formula::necessity([0, 1], Formula::or(Formula::atom(0), Formula::atom(1))),
                Formula::bla([0], Formula::atom(2)),
            )
        );
        assert!(x.is_simple());
        assert!(!x.is_classical());
        assert_eq!(parse("true", &f, 1).unwrap(), Formula::Top);
        assert_eq!(parse("~false", &f, 1).unwrap(), Formula::not(Formula::Bottom));
    }

    #[test]
    fn rejects_nested_modalities_with_position() {
        let f = frame();
        assert_eq!(parse("[1] [2] p", &f, 2), Err(Error::NestedModality { position: 4 }));
        assert_eq!(
            parse("p & [1] (q | (2) r)", &f, 2),
            Err(Error::NestedModality { position: 13 })
        );
        assert_eq!(parse("[1] ~[1] p", &f, 2), Err(Error::NestedModality { position: 5 }));
    }

    #[test]
    fn reports_errors() {
        let f = frame();
        assert!(matches!(parse("p &", &f, 1), Err(Error::Parse { position: 3, .. })));
        assert!(matches!(parse("s", &f, 1), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse("[3] p", &f, 2), Err(Error::Parse { position: 1, .. })));
        assert!(matches!(parse("p - q", &f, 1), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse("p q", &f, 1), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse("(p", &f, 1), Err(Error::Parse { .. })));
    }

    #[test]
    fn atom_sets_of_classical_formulas() {
        let f = frame();
        let x = parse("(p | q) & ~q", &f, 1).unwrap();
        assert_eq!(x.atoms_of(&f), Some(f.prop(["p"]).unwrap()));
        let y = parse("p -> q", &f, 1).unwrap();
        assert_eq!(y.atoms_of(&f), Some(f.prop(["q", "r"]).unwrap()));
        assert_eq!(parse("[1] p", &f, 1).unwrap().atoms_of(&f), None);
        assert_eq!(Formula::disjunction_of(Proposition::EMPTY), Formula::Bottom);
    }

    #[test]
    fn display_round_trips() {
        let f = frame();
        for text in ["[1,2] (p | ~q) -> (2) r", "~(p & q) | [1] false"] {
            let x = parse(text, &f, 2).unwrap();
            let shown = x.display(&f).to_string();
            assert_eq!(parse(&shown, &f, 2).unwrap(), x, "{shown}");
        }
    }
}
