//! Text formats for graphs, shape expressions and documents.
//!
//! Documents hold one item per line: `s <- EXPR` or a target
//! (`target node <a> s`, `target class A s`, `target role r s`). Expressions use
//! `!s`, `&`, `|` (left-associative, `&` binds tighter), `some r . E`,
//! `all r . E` (the body is a unary expression), `r-` for inverse roles,
//! `<a>` for nominals, capitalised tokens for concepts and lower-case tokens
//! for shape names. Graph lines are `A(a)` or `r(a,b)`. A `#` that starts a
//! token begins a comment running to the end of the line.

use super::document::{ConstraintSet, Document, Target, TargetSubject};
use super::expr::ShapeExpr;
use super::graph::DataGraph;
use super::names::{ConceptName, NodeId, Role, RoleName, ShapeName};
use super::ParseError;

/// Removes a trailing comment: a `#` at the start of the line or after whitespace.
pub(crate) fn strip_comment(line: &str) -> &str {
    let mut prev_space = true;
    for (i, ch) in line.char_indices() {
        if ch == '#' && prev_space {
            return &line[..i];
        }
        prev_space = ch.is_whitespace();
    }
    line
}

pub(crate) fn is_ident_char(ch: char) -> bool {
    ch.is_alphanumeric() || matches!(ch, '_' | '\'' | '#')
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    NodeRef(String),
    Not,
    And,
    Or,
    Dot,
    LParen,
    RParen,
    Arrow,
    Minus,
}

struct Lexer<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(line: usize, text: &'a str, base_col: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { line, text, pos: 0 };
        let mut out = Vec::new();
        while let Some((tok, col)) = lx.next_tok()? {
            out.push((tok, col + base_col));
        }
        Ok(out)
    }

    fn err(&self, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, col + 1, msg)
    }

    fn next_tok(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        let rest = &self.text[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
        let start = self.pos;
        let mut chars = trimmed.chars();
        let Some(ch) = chars.next() else { return Ok(None) };
        let single = |tok: Tok, me: &mut Self| {
            me.pos += ch.len_utf8();
            Ok(Some((tok, start)))
        };
        match ch {
            '!' | '¬' => single(Tok::Not, self),
            '&' | '∧' => single(Tok::And, self),
            '|' | '∨' => single(Tok::Or, self),
            '.' => single(Tok::Dot, self),
            '(' => single(Tok::LParen, self),
            ')' => single(Tok::RParen, self),
            '-' => single(Tok::Minus, self),
            '←' => single(Tok::Arrow, self),
            '<' => {
                if trimmed.starts_with("<-") {
                    self.pos += 2;
                    return Ok(Some((Tok::Arrow, start)));
                }
                let Some(end) = trimmed.find('>') else {
                    return Err(self.err(start, "unterminated nominal, expected `>`"));
                };
                let name = trimmed[1..end].trim();
                if name.is_empty() {
                    return Err(self.err(start, "empty nominal"));
                }
                self.pos += end + 1;
                Ok(Some((Tok::NodeRef(name.to_string()), start)))
            }
            c if is_ident_char(c) => {
                let len: usize = trimmed.chars().take_while(|&c| is_ident_char(c)).map(char::len_utf8).sum();
                self.pos += len;
                Ok(Some((Tok::Ident(trimmed[..len].to_string()), start)))
            }
            other => Err(self.err(start, format!("unexpected character `{other}`"))),
        }
    }
}

struct ExprParser<'t> {
    line: usize,
    toks: &'t [(Tok, usize)],
    pos: usize,
    end_col: usize,
}

fn is_shape_token(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_lowercase()) && !matches!(s, "some" | "all" | "target")
}

fn is_concept_token(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_uppercase())
}

impl<'t> ExprParser<'t> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| c + 1).unwrap_or(self.end_col + 1)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<ShapeExpr, ParseError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.conj()?;
            lhs = ShapeExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<ShapeExpr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = ShapeExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn role(&mut self) -> Result<Role, ParseError> {
        match self.bump() {
            Some(Tok::Ident(name)) if is_shape_token(&name) || name.starts_with('_') => {
                let inverted = if self.peek() == Some(&Tok::Minus) {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                Ok(Role { name: RoleName::new(name), inverted })
            }
            _ => {
                self.pos -= 1;
                Err(self.err("expected a role name"))
            }
        }
    }

    fn unary(&mut self) -> Result<ShapeExpr, ParseError> {
        match self.bump() {
            Some(Tok::Not) => match self.bump() {
                Some(Tok::Ident(s)) if is_shape_token(&s) => Ok(ShapeExpr::NotShape(ShapeName::new(s))),
                _ => {
                    self.pos -= 1;
                    Err(self.err("negation applies only to shape names"))
                }
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::NodeRef(a)) => Ok(ShapeExpr::Nominal(NodeId::new(a))),
            Some(Tok::Ident(kw)) if kw == "some" || kw == "all" => {
                let role = self.role()?;
                self.expect(Tok::Dot, "`.` after the role")?;
                let body = self.unary()?;
                Ok(if kw == "some" { ShapeExpr::exists(role, body) } else { ShapeExpr::forall(role, body) })
            }
            Some(Tok::Ident(name)) if is_concept_token(&name) => Ok(ShapeExpr::Concept(ConceptName::new(name))),
            Some(Tok::Ident(name)) if is_shape_token(&name) => Ok(ShapeExpr::Shape(ShapeName::new(name))),
            _ => {
                self.pos -= 1;
                Err(self.err("expected a shape expression"))
            }
        }
    }
}

/// Parses a single shape expression.
pub fn parse_expr(text: &str) -> Result<ShapeExpr, ParseError> {
    let toks = Lexer::tokens(1, text, 0)?;
    let mut p = ExprParser { line: 1, toks: &toks, pos: 0, end_col: text.len() };
    let e = p.expr()?;
    if p.pos < toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

fn parse_target(lineno: usize, line: &str) -> Result<Target, ParseError> {
    let toks = Lexer::tokens(lineno, line, 0)?;
    let mut p = ExprParser { line: lineno, toks: &toks, pos: 1, end_col: line.len() };
    let kind = match p.bump() {
        Some(Tok::Ident(k)) if matches!(k.as_str(), "node" | "class" | "role") => k,
        _ => {
            p.pos -= 1;
            return Err(p.err("expected `node`, `class` or `role` after `target`"));
        }
    };
    let subject = match kind.as_str() {
        "node" => match p.bump() {
            Some(Tok::NodeRef(a)) | Some(Tok::Ident(a)) => TargetSubject::Node(NodeId::new(a)),
            _ => {
                p.pos -= 1;
                return Err(p.err("expected an individual"));
            }
        },
        "class" => match p.bump() {
            Some(Tok::Ident(c)) if is_concept_token(&c) => TargetSubject::Class(ConceptName::new(c)),
            _ => {
                p.pos -= 1;
                return Err(p.err("expected a concept name"));
            }
        },
        _ => TargetSubject::Role(p.role()?),
    };
    let shape = match p.bump() {
        Some(Tok::Ident(s)) if is_shape_token(&s) => ShapeName::new(s),
        _ => {
            p.pos -= 1;
            return Err(p.err("expected a shape name"));
        }
    };
    if p.pos < toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(Target { subject, shape })
}

/// Parses a document; every referenced shape must be defined.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut constraints = ConstraintSet::new();
    let mut targets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        if line.trim_start().starts_with("target") && line.trim_start()[6..].starts_with(char::is_whitespace) {
            targets.push(parse_target(lineno, line)?);
            continue;
        }
        let toks = Lexer::tokens(lineno, line, 0)?;
        let mut p = ExprParser { line: lineno, toks: &toks, pos: 0, end_col: line.len() };
        let head = match p.bump() {
            Some(Tok::Ident(s)) if is_shape_token(&s) => ShapeName::new(s),
            _ => {
                p.pos -= 1;
                return Err(p.err("expected a shape name at the start of a constraint"));
            }
        };
        p.expect(Tok::Arrow, "`<-`")?;
        let body = p.expr()?;
        if p.pos < toks.len() {
            return Err(p.err("unexpected trailing input"));
        }
        constraints
            .define(head.clone(), body)
            .map_err(|_| ParseError::new(lineno, 1, format!("shape `{head}` is the head of more than one constraint")))?;
    }
    let doc = Document { constraints, targets };
    doc.check_well_formed().map_err(|e| ParseError::new(0, 0, e.to_string()))?;
    Ok(doc)
}

/// Parses a data graph: atoms `A(a)` / `r(a,b)`, any number per line.
pub fn parse_graph(text: &str) -> Result<DataGraph, ParseError> {
    let mut g = DataGraph::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        let mut rest = line;
        let mut offset = 0;
        loop {
            let trimmed = rest.trim_start_matches(|c: char| c.is_whitespace() || c == '.' || c == ',');
            offset += rest.len() - trimmed.len();
            if trimmed.is_empty() {
                break;
            }
            let open = trimmed.find('(').ok_or_else(|| ParseError::new(lineno, offset + 1, "expected `(` in atom"))?;
            let close = trimmed.find(')').ok_or_else(|| ParseError::new(lineno, offset + 1, "expected `)` in atom"))?;
            if close < open {
                return Err(ParseError::new(lineno, offset + close + 1, "unbalanced parentheses"));
            }
            let pred = trimmed[..open].trim();
            if pred.is_empty() || !pred.chars().all(is_ident_char) {
                return Err(ParseError::new(lineno, offset + 1, format!("invalid predicate `{pred}`")));
            }
            let args: Vec<&str> = trimmed[open + 1..close].split(',').map(str::trim).collect();
            if args.iter().any(|a| a.is_empty()) {
                return Err(ParseError::new(lineno, offset + open + 2, "empty argument"));
            }
            match args.as_slice() {
                [a] => {
                    g.add_concept(ConceptName::new(pred), NodeId::new(*a));
                }
                [a, b] => {
                    g.add_role(RoleName::new(pred), NodeId::new(*a), NodeId::new(*b));
                }
                _ => return Err(ParseError::new(lineno, offset + open + 2, "atoms take one or two arguments")),
            }
            rest = &trimmed[close + 1..];
            offset += close + 1;
        }
    }
    Ok(g)
}
