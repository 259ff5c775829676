//! Text syntax for formulas: `mu X . (A | <p> X)`, `nu X . …`, `[r-] Φ`,
//! `@a` (nominal), `!A`, `!@a`, `true`, `false`, `&`, `|`, parentheses.
//! An identifier is a variable when bound by an enclosing binder (or declared
//! free), otherwise a concept name (which must start with an upper-case letter).

use std::fmt;

use crate::model::{ConceptName, NodeId, ParseError, Role, RoleName};

use super::formula::{MuFormula, Var};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Mu,
    Nu,
    Not,
    At,
    And,
    Or,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    Dot,
    Minus,
    True,
    False,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '#' | '~')
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let col = text[..pos].chars().count() + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '!' | '¬' => Some(Tok::Not),
            '@' => Some(Tok::At),
            '&' | '∧' => Some(Tok::And),
            '|' | '∨' => Some(Tok::Or),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '<' | '⟨' => Some(Tok::LAngle),
            '>' | '⟩' => Some(Tok::RAngle),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '.' => Some(Tok::Dot),
            '-' | '⁻' => Some(Tok::Minus),
            'μ' => Some(Tok::Mu),
            'ν' => Some(Tok::Nu),
            '⊤' => Some(Tok::True),
            '⊥' => Some(Tok::False),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, col));
            i += 1;
            continue;
        }
        if ident_char(c) {
            let start = i;
            while i < chars.len() && ident_char(chars[i].1) {
                i += 1;
            }
            let word: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            let tok = match word.as_str() {
                "mu" => Tok::Mu,
                "nu" => Tok::Nu,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word),
            };
            out.push((tok, col));
            continue;
        }
        return Err(ParseError::new(1, col, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    scope: Vec<Var>,
    free: &'a [Var],
}

impl Parser<'_> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(1, self.col(), msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.peek().cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<MuFormula, ParseError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = MuFormula::or(lhs, self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<MuFormula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = MuFormula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn role(&mut self) -> Result<Role, ParseError> {
        let name = self.ident("a role name")?;
        let inverted = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        Ok(Role { name: RoleName::new(name), inverted })
    }

    fn unary(&mut self) -> Result<MuFormula, ParseError> {
        let here = self.col();
        match self.next() {
            Some(Tok::True) => Ok(MuFormula::Top),
            Some(Tok::False) => Ok(MuFormula::Bot),
            Some(Tok::At) => Ok(MuFormula::Nominal(NodeId::new(self.ident("an individual after `@`")?))),
            Some(Tok::Not) => match self.next() {
                Some(Tok::At) => Ok(MuFormula::NotNominal(NodeId::new(self.ident("an individual after `@`")?))),
                Some(Tok::Ident(name)) if name.starts_with(char::is_uppercase) && !self.is_var(&name) => {
                    Ok(MuFormula::NotConcept(ConceptName::new(name)))
                }
                _ => {
                    self.pos -= 1;
                    Err(self.err("negation applies only to concept names and nominals"))
                }
            },
            Some(Tok::LParen) => {
                let f = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::LAngle) => {
                let r = self.role()?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(MuFormula::diamond(r, self.unary()?))
            }
            Some(Tok::LBracket) => {
                let r = self.role()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(MuFormula::boxed(r, self.unary()?))
            }
            Some(t @ (Tok::Mu | Tok::Nu)) => {
                let x = Var::new(self.ident("a variable after the binder")?);
                self.expect(Tok::Dot, "`.` after the bound variable")?;
                self.scope.push(x.clone());
                let body = self.expr();
                self.scope.pop();
                let body = body?;
                Ok(if t == Tok::Mu { MuFormula::mu(x, body) } else { MuFormula::nu(x, body) })
            }
            Some(Tok::Ident(name)) => {
                if self.is_var(&name) {
                    Ok(MuFormula::Var(Var::new(name)))
                } else if name.starts_with(char::is_uppercase) {
                    Ok(MuFormula::Concept(ConceptName::new(name)))
                } else {
                    Err(ParseError::new(1, here, format!("unbound variable `{name}` (concept names start with an upper-case letter)")))
                }
            }
            _ => {
                if self.pos > 0 && self.pos <= self.toks.len() {
                    self.pos -= 1;
                }
                Err(ParseError::new(1, here, "expected a formula"))
            }
        }
    }

    fn is_var(&self, name: &str) -> bool {
        self.scope.iter().any(|v| v.as_str() == name) || self.free.iter().any(|v| v.as_str() == name)
    }
}

/// Parses a closed formula (or one whose free variables are listed in `free`).
pub fn parse_formula_with_free(text: &str, free: &[Var]) -> Result<MuFormula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end_col: text.chars().count() + 1, scope: Vec::new(), free };
    let f = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a formula; unbound lower-case identifiers are errors.
pub fn parse_formula(text: &str) -> Result<MuFormula, ParseError> {
    parse_formula_with_free(text, &[])
}

impl MuFormula {
    /// Parses the text syntax.
    pub fn parse(text: &str) -> Result<MuFormula, ParseError> {
        parse_formula(text)
    }

    /// Parses the text syntax with the given free variables.
    pub fn parse_free(text: &str, free: &[&str]) -> Result<MuFormula, ParseError> {
        let vars: Vec<Var> = free.iter().map(|x| Var::new(*x)).collect();
        parse_formula_with_free(text, &vars)
    }

    fn precedence(&self) -> u8 {
        match self {
            MuFormula::Or(..) => 1,
            MuFormula::And(..) => 2,
            _ => 3,
        }
    }

    /// `tail`: nothing follows this subformula before the end of the enclosing
    /// group, so a binder (whose body extends to the right) needs no parentheses.
    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8, tail: bool) -> fmt::Result {
        match self {
            MuFormula::Top => f.write_str("true"),
            MuFormula::Bot => f.write_str("false"),
            MuFormula::Concept(c) => write!(f, "{c}"),
            MuFormula::NotConcept(c) => write!(f, "!{c}"),
            MuFormula::Nominal(a) => write!(f, "@{a}"),
            MuFormula::NotNominal(a) => write!(f, "!@{a}"),
            MuFormula::Var(x) => write!(f, "{x}"),
            MuFormula::And(l, r) | MuFormula::Or(l, r) => {
                let prec = self.precedence();
                let paren = prec < min;
                if paren {
                    f.write_str("(")?;
                }
                l.fmt_at(f, prec, false)?;
                f.write_str(if prec == 2 { " & " } else { " | " })?;
                r.fmt_at(f, prec + 1, paren || tail)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            MuFormula::Box(role, b) => {
                write!(f, "[{role}] ")?;
                b.fmt_at(f, 3, tail)
            }
            MuFormula::Diamond(role, b) => {
                write!(f, "<{role}> ")?;
                b.fmt_at(f, 3, tail)
            }
            MuFormula::Mu(x, b) | MuFormula::Nu(x, b) => {
                if !tail {
                    f.write_str("(")?;
                }
                let kw = if matches!(self, MuFormula::Mu(..)) { "mu" } else { "nu" };
                write!(f, "{kw} {x} . ")?;
                if b.precedence() < 3 {
                    f.write_str("(")?;
                    b.fmt_at(f, 0, true)?;
                    f.write_str(")")?;
                } else {
                    b.fmt_at(f, 0, true)?;
                }
                if !tail {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }

    /// Renders with Unicode symbols (`μ`, `ν`, `⟨r⟩`, `∧`, `∨`, `¬`, `⊤`, `⊥`).
    pub fn to_unicode(&self) -> String {
        let ascii = self.to_string();
        let mut out = String::with_capacity(ascii.len());
        let mut chars = ascii.chars().peekable();
        let mut prev_ident = false;
        while let Some(c) = chars.next() {
            match c {
                '&' => out.push('∧'),
                '|' => out.push('∨'),
                '!' => out.push('¬'),
                '<' => out.push('⟨'),
                '>' => out.push('⟩'),
                _ if !prev_ident && ident_char(c) => {
                    let mut word = String::from(c);
                    while let Some(&d) = chars.peek() {
                        if !ident_char(d) {
                            break;
                        }
                        word.push(d);
                        chars.next();
                    }
                    out.push_str(match word.as_str() {
                        "mu" => "μ",
                        "nu" => "ν",
                        "true" => "⊤",
                        "false" => "⊥",
                        w => w,
                    });
                    prev_ident = true;
                    continue;
                }
                _ => out.push(c),
            }
            prev_ident = false;
        }
        out
    }
}

impl fmt::Display for MuFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0, true)
    }
}

impl fmt::Debug for MuFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}
