//! The universe description language.
//!
//! ```text
//! doc   := (stmt NEWLINE)*
//! stmt  := name "=" "{" [name ("," name)*] "}"
//!        | "urelement" name [ "index" "(" "{" tokens "}" "," "{" tokens "}" ")" ]
//!        | "#" comment
//! name  := [A-Za-z_][A-Za-z0-9_]*
//! token := "0rep" | name
//! ```
//!
//! Whitespace around tokens is insignificant, blank lines are skipped and
//! names may be used before they are defined. `urelement` lines are only
//! accepted by [`parse_document`]; plain universes go through
//! [`parse_universe`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::universe::{ElementId, Universe};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("input is not valid UTF-8 (byte {offset})")]
    Encoding { offset: usize },
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}: `{name}` is defined more than once (first at line {first})")]
    Duplicate {
        name: ElementId,
        line: usize,
        first: usize,
    },
    #[error("{line}:{column}: `{name}` is not defined")]
    Undefined {
        name: ElementId,
        line: usize,
        column: usize,
    },
}

/// One side of an urelement index: a zero-level representative or a name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexToken {
    ZeroRep,
    Name(ElementId),
}

/// The `(level 0, level μ)` token lists of an `index (...)` clause.
pub type IndexTokens = (Vec<IndexToken>, Vec<IndexToken>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Define {
        name: ElementId,
        members: Vec<ElementId>,
    },
    Urelement {
        name: ElementId,
        index: Option<IndexTokens>,
    },
}

impl Statement {
    pub fn name(&self) -> &ElementId {
        match self {
            Statement::Define { name, .. } | Statement::Urelement { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located<T> {
    pub line: usize,
    pub value: T,
}

/// A parsed document: statements in source order, comments dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniverseDoc {
    pub statements: Vec<Located<Statement>>,
}

impl UniverseDoc {
    pub fn definitions(&self) -> impl Iterator<Item = (&ElementId, &[ElementId])> {
        self.statements.iter().filter_map(|s| match &s.value {
            Statement::Define { name, members } => Some((name, members.as_slice())),
            _ => None,
        })
    }

    pub fn urelements(&self) -> impl Iterator<Item = (&ElementId, Option<&IndexTokens>)> {
        self.statements.iter().filter_map(|s| match &s.value {
            Statement::Urelement { name, index } => Some((name, index.as_ref())),
            _ => None,
        })
    }

    /// The universe of the document's set definitions.
    pub fn universe(&self) -> Universe {
        Universe::from_definitions(
            self.definitions()
                .map(|(name, members)| (name.clone(), members.iter().cloned())),
        )
        .expect("names were validated during parsing")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    ZeroRep,
    Eq,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("name `{n}`"),
            Tok::ZeroRep => "`0rep`".into(),
            Tok::Eq => "`=`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

/// Tokens of one line, each with its 1-based column.
fn lex_line(line_no: usize, line: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let single = match c {
            '=' => Some(Tok::Eq),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((col, t));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((col, Tok::Name(chars[start..i].iter().collect())));
        } else if chars[i..].starts_with(&['0', 'r', 'e', 'p'])
            && !chars
                .get(i + 4)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            out.push((col, Tok::ZeroRep));
            i += 4;
        } else {
            return Err(ParseError::Syntax {
                line: line_no,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct LineParser {
    line: usize,
    end_col: usize,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl LineParser {
    fn error(&self, col: usize, message: String) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: col,
            message,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn next_col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(c, _)| *c)
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.toks.get(self.pos) {
            Some((_, t)) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some((c, t)) => Err(self.error(
                *c,
                format!("expected {}, found {}", want.describe(), t.describe()),
            )),
            None => Err(self.error(
                self.end_col,
                format!("expected {}, found end of line", want.describe()),
            )),
        }
    }

    fn name(&mut self) -> Result<(usize, ElementId), ParseError> {
        match self.toks.get(self.pos) {
            Some((c, Tok::Name(n))) => {
                let c = *c;
                let id = ElementId::new(n.clone());
                self.pos += 1;
                Ok((c, id))
            }
            Some((c, t)) => Err(self.error(*c, format!("expected a name, found {}", t.describe()))),
            None => Err(self.error(self.end_col, "expected a name, found end of line".into())),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some((c, t)) => {
                Err(self.error(*c, format!("unexpected {} after statement", t.describe())))
            }
        }
    }

    /// `{ a, b, c }` as located names.
    fn name_set(&mut self) -> Result<Vec<(usize, ElementId)>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut names = Vec::new();
        if self.peek() == Some(&Tok::RBrace) {
            self.pos += 1;
            return Ok(names);
        }
        loop {
            names.push(self.name()?);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    return Ok(names);
                }
                Some(t) => {
                    let msg = format!("expected `,` or `}}`, found {}", t.describe());
                    return Err(self.error(self.next_col(), msg));
                }
                None => return Err(self.error(self.end_col, "unclosed `{`".into())),
            }
        }
    }

    /// `{ 0rep, a }` as located index tokens.
    fn token_set(&mut self) -> Result<Vec<(usize, IndexToken)>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut toks = Vec::new();
        if self.peek() == Some(&Tok::RBrace) {
            self.pos += 1;
            return Ok(toks);
        }
        loop {
            let col = self.next_col();
            match self.peek() {
                Some(Tok::ZeroRep) => {
                    self.pos += 1;
                    toks.push((col, IndexToken::ZeroRep));
                }
                _ => {
                    let (c, n) = self.name()?;
                    toks.push((c, IndexToken::Name(n)));
                }
            }
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    return Ok(toks);
                }
                Some(t) => {
                    let msg = format!("expected `,` or `}}`, found {}", t.describe());
                    return Err(self.error(self.next_col(), msg));
                }
                None => return Err(self.error(self.end_col, "unclosed `{`".into())),
            }
        }
    }
}

/// Names referenced by a statement, with their columns.
type References = Vec<(usize, ElementId)>;

fn parse_statement(
    line_no: usize,
    line: &str,
    allow_urelements: bool,
) -> Result<Option<(Statement, References)>, ParseError> {
    let trimmed = line.trim_start();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let toks = lex_line(line_no, line)?;
    let mut p = LineParser {
        line: line_no,
        end_col: line.chars().count() + 1,
        toks,
        pos: 0,
    };
    let (name_col, name) = p.name()?;
    let is_urelement = name.as_str() == "urelement" && p.peek() != Some(&Tok::Eq);
    if is_urelement {
        if !allow_urelements {
            return Err(p.error(
                name_col,
                "urelement declarations are only allowed in model files".into(),
            ));
        }
        let (_, ur) = p.name()?;
        let mut refs = Vec::new();
        let index = match p.peek() {
            None => None,
            Some(Tok::Name(k)) if k == "index" => {
                p.pos += 1;
                p.expect(Tok::LParen)?;
                let zero = p.token_set()?;
                p.expect(Tok::Comma)?;
                let mu = p.token_set()?;
                p.expect(Tok::RParen)?;
                let mut strip = |v: Vec<(usize, IndexToken)>| -> Vec<IndexToken> {
                    v.into_iter()
                        .map(|(c, t)| {
                            if let IndexToken::Name(n) = &t {
                                refs.push((c, n.clone()));
                            }
                            t
                        })
                        .collect()
                };
                let zero = strip(zero);
                let mu = strip(mu);
                Some((zero, mu))
            }
            Some(t) => {
                let msg = format!("expected `index` or end of line, found {}", t.describe());
                return Err(p.error(p.next_col(), msg));
            }
        };
        p.finish()?;
        return Ok(Some((Statement::Urelement { name: ur, index }, refs)));
    }
    p.expect(Tok::Eq)?;
    let members = p.name_set()?;
    p.finish()?;
    let refs = members.clone();
    Ok(Some((
        Statement::Define {
            name,
            members: members.into_iter().map(|(_, n)| n).collect(),
        },
        refs,
    )))
}

fn parse_text(text: &str, allow_urelements: bool) -> Result<UniverseDoc, ParseError> {
    let mut statements = Vec::new();
    let mut first_line: BTreeMap<ElementId, usize> = BTreeMap::new();
    let mut pending: Vec<(usize, usize, ElementId)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let Some((stmt, refs)) = parse_statement(line_no, line, allow_urelements)? else {
            continue;
        };
        if let Some(&first) = first_line.get(stmt.name()) {
            return Err(ParseError::Duplicate {
                name: stmt.name().clone(),
                line: line_no,
                first,
            });
        }
        first_line.insert(stmt.name().clone(), line_no);
        pending.extend(refs.into_iter().map(|(c, n)| (line_no, c, n)));
        statements.push(Located {
            line: line_no,
            value: stmt,
        });
    }
    if let Some((line, column, name)) = pending
        .into_iter()
        .find(|(_, _, n)| !first_line.contains_key(n))
    {
        return Err(ParseError::Undefined { name, line, column });
    }
    Ok(UniverseDoc { statements })
}

fn decode(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| ParseError::Encoding {
        offset: e.valid_up_to(),
    })
}

/// Parses a plain universe description.
pub fn parse_universe(bytes: &[u8]) -> Result<UniverseDoc, ParseError> {
    parse_text(decode(bytes)?, false)
}

/// Parses a description that may also declare urelements (model files).
pub fn parse_document(bytes: &[u8]) -> Result<UniverseDoc, ParseError> {
    parse_text(decode(bytes)?, true)
}

/// Renders a universe in canonical order, one definition per line.
pub fn print_universe(u: &Universe) -> String {
    let mut out = String::new();
    for (i, id) in u.ids().iter().enumerate() {
        let members: Vec<&str> = u.ext_at(i).iter().map(|p| u.id(p).as_str()).collect();
        let _ = writeln!(out, "{id} = {{{}}}", members.join(", "));
    }
    out
}
