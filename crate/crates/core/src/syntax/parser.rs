//! Lexer and recursive-descent parser for the circuit language.
//!
//! ```text
//! obj  := I | B | obj^n | obj^* | obj x obj | (obj)
//! term := id<obj> | swap<obj,obj> | copy<obj> | del<obj> | coin(p) | if<obj>
//!       | t ; t | t x t | iter[obj; (obj,...); (obj,...)](t) | (t)
//!       | name | name<obj,...> | name(p) | name<obj,...>(p)
//! file := (let name = term)* main = term      -- comments run to end of line
//! ```
//! `;` binds looser than `x`; both associate to the left.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{judge, Generator, NodeShape, Object, ObjectExpr, Term, TupleSpec, TypeError, TypeJudgement};
use crate::iteration::combinators::{self, Param};
use crate::ratio::{self, Rational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown identifier `{name}`")]
    UnknownIdentifier { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {err}")]
    Rational {
        line: usize,
        col: usize,
        err: RationalError,
    },
    #[error("{line}:{col}: {err}")]
    Type { line: usize, col: usize, err: TypeError },
    #[error("{line}:{col}: {msg}")]
    Combinator { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate binding `{name}`")]
    DuplicateBinding { line: usize, col: usize, name: String },
    #[error("no `main = ...` entry")]
    MissingMain,
}

impl ParseError {
    /// `(line, col)` of the error, when it has one.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::UnknownIdentifier { line, col, .. }
            | ParseError::Rational { line, col, .. }
            | ParseError::Type { line, col, .. }
            | ParseError::Combinator { line, col, .. }
            | ParseError::DuplicateBinding { line, col, .. } => Some((*line, *col)),
            ParseError::MissingMain => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Slash,
    Caret,
    Star,
    LAngle,
    RAngle,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Equals,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let single = |tok| Token { tok, line: tl, col: tc };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(single(Tok::Ident(word)));
                continue;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(single(Tok::Int(word)));
                continue;
            }
            _ => {}
        }
        let tok = match c {
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '*' => Tok::Star,
            '<' => Tok::LAngle,
            '>' => Tok::RAngle,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '=' => Tok::Equals,
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(single(tok));
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const KEYWORDS: &[&str] = &["id", "swap", "copy", "del", "coin", "if", "iter", "let", "main", "x", "I", "B"];

struct Typed {
    term: Term,
    ty: Option<TypeJudgement>,
}

struct Parser<'e> {
    toks: Vec<Token>,
    pos: usize,
    typed: bool,
    env: &'e BTreeMap<String, Typed>,
}

/// A parsed circuit file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub bindings: Vec<(String, Term)>,
    pub main: Term,
}

impl Program {
    pub fn binding(&self, name: &str) -> Option<&Term> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

/// Parses a single term. Library names (`xor`, `zip<B,B>`, ...) are expanded.
/// No typechecking is performed.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let env = BTreeMap::new();
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        typed: false,
        env: &env,
    };
    let t = p.term()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(t.term)
}

pub fn parse_object(src: &str) -> Result<Object, ParseError> {
    let env = BTreeMap::new();
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        typed: false,
        env: &env,
    };
    let o = p.object()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(o.normalize())
}

/// Parses and typechecks a circuit file; type errors carry the source position
/// of the offending node.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let toks = lex(src)?;
    let mut env: BTreeMap<String, Typed> = BTreeMap::new();
    let mut order = Vec::new();
    let mut main = None;
    let mut pos = 0;
    loop {
        let tok = toks[pos].clone();
        match &tok.tok {
            Tok::Eof => break,
            Tok::Ident(w) if w == "let" || w == "main" => {
                let is_main = w == "main";
                pos += 1;
                let name = if is_main {
                    "main".to_string()
                } else {
                    match &toks[pos].tok {
                        Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) => {
                            pos += 1;
                            n.clone()
                        }
                        _ => {
                            return Err(ParseError::Syntax {
                                line: toks[pos].line,
                                col: toks[pos].col,
                                msg: "expected a binding name after `let`".into(),
                            })
                        }
                    }
                };
                if env.contains_key(&name) || (is_main && main.is_some()) {
                    return Err(ParseError::DuplicateBinding {
                        line: tok.line,
                        col: tok.col,
                        name,
                    });
                }
                let mut p = Parser {
                    toks: toks.clone(),
                    pos,
                    typed: true,
                    env: &env,
                };
                p.expect(Tok::Equals, "`=`")?;
                let t = p.term()?;
                pos = p.pos;
                if is_main {
                    main = Some(t.term);
                } else {
                    order.push(name.clone());
                    env.insert(name, t);
                }
            }
            _ => {
                return Err(ParseError::Syntax {
                    line: tok.line,
                    col: tok.col,
                    msg: "expected `let` or `main`".into(),
                })
            }
        }
    }
    let main = main.ok_or(ParseError::MissingMain)?;
    let bindings = order
        .into_iter()
        .map(|n| {
            let t = env.remove(&n).expect("binding recorded").term;
            (n, t)
        })
        .collect();
    Ok(Program { bindings, main })
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            let found = describe(&self.peek().tok);
            self.err(format!("expected {what}, found {found}"))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == w)
    }

    fn build(&self, at: &Token, term: Term, shape: impl FnOnce() -> Option<Result<TypeJudgement, TypeError>>) -> Result<Typed, ParseError> {
        if !self.typed {
            return Ok(Typed { term, ty: None });
        }
        match shape() {
            Some(Ok(ty)) => Ok(Typed { term, ty: Some(ty) }),
            Some(Err(err)) => Err(ParseError::Type {
                line: at.line,
                col: at.col,
                err,
            }),
            None => Ok(Typed { term, ty: None }),
        }
    }

    fn term(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.par()?;
        while self.peek().tok == Tok::Semi {
            let at = self.bump();
            let rhs = self.par()?;
            let term = lhs.term.seq(rhs.term);
            let (a, b) = (lhs.ty, rhs.ty);
            lhs = self.build(&at, term, || Some(judge(NodeShape::Seq(a.as_ref()?, b.as_ref()?))))?;
        }
        Ok(lhs)
    }

    fn par(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.atom()?;
        while self.is_word("x") {
            let at = self.bump();
            let rhs = self.atom()?;
            let term = lhs.term.par(rhs.term);
            let (a, b) = (lhs.ty, rhs.ty);
            lhs = self.build(&at, term, || Some(judge(NodeShape::Par(a.as_ref()?, b.as_ref()?))))?;
        }
        Ok(lhs)
    }

    fn angle_object(&mut self) -> Result<Object, ParseError> {
        self.expect(Tok::LAngle, "`<`")?;
        let o = self.object()?.normalize();
        self.expect(Tok::RAngle, "`>`")?;
        Ok(o)
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let start = self.peek().clone();
        let num = match self.bump().tok {
            Tok::Int(n) => n,
            other => {
                return Err(ParseError::Syntax {
                    line: start.line,
                    col: start.col,
                    msg: format!("expected a rational, found {}", describe(&other)),
                })
            }
        };
        let text = if self.peek().tok == Tok::Slash {
            self.bump();
            match self.bump().tok {
                Tok::Int(d) => format!("{num}/{d}"),
                other => {
                    return Err(ParseError::Syntax {
                        line: start.line,
                        col: start.col,
                        msg: format!("malformed rational: expected denominator, found {}", describe(&other)),
                    })
                }
            }
        } else {
            num
        };
        ratio::parse_rational(&text).map_err(|err| ParseError::Rational {
            line: start.line,
            col: start.col,
            err,
        })
    }

    fn paren_rational(&mut self) -> Result<Rational, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let r = self.rational()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(r)
    }

    fn object_list(&mut self) -> Result<Vec<Object>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = Vec::new();
        if self.peek().tok != Tok::RParen {
            loop {
                out.push(self.object()?.normalize());
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<Typed, ParseError> {
        let at = self.peek().clone();
        let word = match &at.tok {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(t);
            }
            Tok::Ident(w) => w.clone(),
            other => return self.err(format!("expected a term, found {}", describe(other))),
        };
        self.bump();
        match word.as_str() {
            "id" => {
                let o = self.angle_object()?;
                self.build(&at, Term::Id(o.clone()), || Some(judge(NodeShape::Id(&o))))
            }
            "swap" => {
                self.expect(Tok::LAngle, "`<`")?;
                let a = self.object()?.normalize();
                self.expect(Tok::Comma, "`,`")?;
                let b = self.object()?.normalize();
                self.expect(Tok::RAngle, "`>`")?;
                self.build(&at, Term::Swap(a.clone(), b.clone()), || Some(judge(NodeShape::Swap(&a, &b))))
            }
            "copy" | "del" | "if" => {
                let o = self.angle_object()?;
                let g = match word.as_str() {
                    "copy" => Generator::Copy(o),
                    "del" => Generator::Discard(o),
                    _ => Generator::Phi(o),
                };
                self.build(&at, Term::Gen(g.clone()), || Some(judge(NodeShape::Gen(&g))))
            }
            "coin" => {
                let p = self.paren_rational()?;
                let g = Generator::Coin(p);
                self.build(&at, Term::Gen(g.clone()), || Some(judge(NodeShape::Gen(&g))))
            }
            "iter" => {
                self.expect(Tok::LBracket, "`[`")?;
                let state = self.object()?.normalize();
                self.expect(Tok::Semi, "`;`")?;
                let inputs = self.object_list()?;
                self.expect(Tok::Semi, "`;`")?;
                let outputs = self.object_list()?;
                self.expect(Tok::RBracket, "`]`")?;
                self.expect(Tok::LParen, "`(`")?;
                let body = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                let spec = TupleSpec::new(state, inputs, outputs);
                let bty = body.ty;
                let term = Term::tau_star(spec.clone(), body.term);
                self.build(&at, term, || Some(judge(NodeShape::TauStar(&spec, bty.as_ref()?))))
            }
            w if KEYWORDS.contains(&w) => Err(ParseError::Syntax {
                line: at.line,
                col: at.col,
                msg: format!("unexpected keyword `{w}`"),
            }),
            name => self.reference(&at, name),
        }
    }

    fn reference(&mut self, at: &Token, name: &str) -> Result<Typed, ParseError> {
        let mut params = Vec::new();
        if self.peek().tok == Tok::LAngle {
            self.bump();
            loop {
                params.push(Param::Object(self.object()?.normalize()));
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RAngle, "`>`")?;
        }
        if self.peek().tok == Tok::LParen {
            params.push(Param::Prob(self.paren_rational()?));
        }
        if params.is_empty() {
            if let Some(t) = self.env.get(name) {
                return Ok(Typed {
                    term: t.term.clone(),
                    ty: t.ty.clone(),
                });
            }
        }
        if !combinators::is_known(name) {
            return Err(ParseError::UnknownIdentifier {
                line: at.line,
                col: at.col,
                name: name.to_string(),
            });
        }
        let term = combinators::combinator(name, &params).map_err(|e| ParseError::Combinator {
            line: at.line,
            col: at.col,
            msg: e.to_string(),
        })?;
        let ty = if self.typed {
            Some(super::typecheck(&term).map_err(|err| ParseError::Type {
                line: at.line,
                col: at.col,
                err,
            })?)
        } else {
            None
        };
        Ok(Typed { term, ty })
    }

    fn object(&mut self) -> Result<ObjectExpr, ParseError> {
        let mut lhs = self.object_factor()?;
        while self.is_word("x") {
            self.bump();
            let rhs = self.object_factor()?;
            lhs = ObjectExpr::Tensor(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn object_factor(&mut self) -> Result<ObjectExpr, ParseError> {
        let mut base = match self.peek().tok.clone() {
            Tok::Ident(w) if w == "I" => {
                self.bump();
                ObjectExpr::Unit
            }
            Tok::Ident(w) if w == "B" => {
                self.bump();
                ObjectExpr::Bool
            }
            Tok::LParen => {
                self.bump();
                let o = self.object()?;
                self.expect(Tok::RParen, "`)`")?;
                o
            }
            other => return self.err(format!("expected an object, found {}", describe(&other))),
        };
        while self.peek().tok == Tok::Caret {
            self.bump();
            match self.bump().tok {
                Tok::Star => base = ObjectExpr::Star(Box::new(base)),
                Tok::Int(n) => {
                    let n: usize = n.parse().map_err(|_| ParseError::Syntax {
                        line: self.peek().line,
                        col: self.peek().col,
                        msg: "exponent too large".into(),
                    })?;
                    base = ObjectExpr::Power(Box::new(base), n)
                }
                other => return self.err(format!("expected `*` or a number after `^`, found {}", describe(&other))),
            }
        }
        Ok(base)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(w) => format!("`{w}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Eof => "end of input".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::Star => "`*`".into(),
        Tok::LAngle => "`<`".into(),
        Tok::RAngle => "`>`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Equals => "`=`".into(),
    }
}
