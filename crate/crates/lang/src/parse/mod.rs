//! Parser for the annotated C subset, lowering to the exported AST.
//!
//! Lowering rules:
//!
//! * `int x = e; rest` becomes `Let(x, e, lower(rest))`;
//! * a statement list becomes a right-nested `Seq` chain ending in `Skip`;
//! * a brace block becomes `Block(lower(list))`;
//! * `while (c) //@ invariant i; { b }` becomes
//!   `While(c, i, Seq(Block(lower(b)), Skip))`.
//!
//! Unary minus on a literal folds into a negative literal; any other unary
//! minus lowers to `0 - e`. `a > b` and `a >= b` lower to `b < a` and
//! `b <= a`.

mod lexer;

use std::fmt;

use crate::ast::{Expr, Func, Ident, Stmt};
use crate::site::{Pos, SiteMap, StmtPath};
use crate::store::{MAX_SIGNED, MIN_SIGNED};
use lexer::{lex, Tok, Token};

pub struct SourceProgram<'a> {
    pub text: &'a str,
    pub path: &'a str,
}

impl<'a> SourceProgram<'a> {
    pub fn new(path: &'a str, text: &'a str) -> Self {
        SourceProgram { text, path }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedProgram {
    pub name: String,
    pub func: Func,
    pub sites: SiteMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: Vec<String>, found: String },
    Annotation(String),
    Unsupported(String),
    Literal(String),
    Lexical(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}:{pos}: error: {kind}")]
pub struct ParseError {
    pub path: String,
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "syntax error: expected {}, found {found}", expected.join(" or "))
            }
            ParseErrorKind::Annotation(m) => write!(f, "annotation error: {m}"),
            ParseErrorKind::Unsupported(m) => write!(f, "unsupported construct: {m}"),
            ParseErrorKind::Literal(m) => write!(f, "{m}"),
            ParseErrorKind::Lexical(m) => write!(f, "{m}"),
        }
    }
}

/// Parses a whole program: one `int` function with `requires`/`ensures`
/// annotations.
pub fn parse_program(src: &SourceProgram<'_>) -> Result<ParsedProgram, ParseError> {
    let mut p = Parser::new(src.path, src.text)?;
    let program = p.program()?;
    Ok(lower_program(program))
}

/// Parses the text of an annotation expression (without the `//@` marker).
pub fn parse_annotation_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new("<annotation>", text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a single C expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parse_annotation_expr(text)
}

// ---------------------------------------------------------------------------
// Concrete syntax, before lowering

struct Program {
    name: String,
    header: Pos,
    params: Vec<Ident>,
    requires: (Expr, Pos),
    ensures: (Expr, Pos),
    body: Vec<CStmt>,
}

struct CStmt {
    pos: Pos,
    kind: CStmtKind,
}

enum CStmtKind {
    Decl(Ident, Expr),
    Expr(Expr),
    If(Expr, Branch, Option<Branch>),
    While(Expr, Expr, Vec<CStmt>),
    Return(Expr),
    Block(Vec<CStmt>),
    Empty,
}

enum Branch {
    Braced(Vec<CStmt>),
    Single(Box<CStmt>),
}

struct Parser<'a> {
    path: &'a str,
    toks: Vec<Token>,
    at: usize,
}

const UNSUPPORTED_KEYWORDS: &[(&str, &str)] = &[
    ("for", "for-loop"),
    ("do", "do-while loop"),
    ("switch", "switch statement"),
    ("goto", "goto"),
    ("break", "break"),
    ("continue", "continue"),
    ("struct", "struct"),
    ("union", "union"),
    ("enum", "enum"),
    ("typedef", "typedef"),
    ("sizeof", "sizeof"),
    ("char", "type other than int"),
    ("long", "type other than int"),
    ("short", "type other than int"),
    ("unsigned", "type other than int"),
    ("signed", "type other than int"),
    ("float", "type other than int"),
    ("double", "type other than int"),
    ("_Bool", "type other than int"),
    ("static", "storage class"),
    ("extern", "storage class"),
    ("const", "qualifier"),
    ("volatile", "qualifier"),
];

const KEYWORDS: &[&str] = &["int", "return", "while", "if", "else", "void", "true", "false"];

impl<'a> Parser<'a> {
    fn new(path: &'a str, text: &str) -> Result<Self, ParseError> {
        let toks = lex(text).map_err(|e| ParseError {
            path: path.to_string(),
            pos: e.pos,
            kind: ParseErrorKind::Lexical(e.message),
        })?;
        Ok(Parser { path, toks, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, pos: Pos, kind: ParseErrorKind) -> ParseError {
        ParseError {
            path: self.path.to_string(),
            pos,
            kind,
        }
    }

    fn syntax<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(self.error(
            self.pos(),
            ParseErrorKind::Syntax {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: self.peek().describe(),
            },
        ))
    }

    fn unsupported<T>(&self, pos: Pos, what: &str) -> Result<T, ParseError> {
        Err(self.error(pos, ParseErrorKind::Unsupported(what.to_string())))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<Pos, ParseError> {
        if self.is_punct(p) {
            Ok(self.bump().pos)
        } else {
            self.syntax(&[&format!("`{p}`")])
        }
    }

    fn expect_keyword(&mut self, k: &str) -> Result<Pos, ParseError> {
        if self.is_keyword(k) {
            Ok(self.bump().pos)
        } else {
            self.syntax(&[&format!("`{k}`")])
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.syntax(&["end of input"])
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let pos = self.pos();
                if let Some((_, what)) = UNSUPPORTED_KEYWORDS.iter().find(|(k, _)| *k == s) {
                    return self.unsupported(pos, what);
                }
                self.bump();
                Ok(Ident::new(s).expect("lexer yields valid identifiers"))
            }
            _ => self.syntax(&["identifier"]),
        }
    }

    // -- program structure ------------------------------------------------

    fn program(&mut self) -> Result<Program, ParseError> {
        let header = self.pos();
        if self.is_keyword("void") {
            return self.unsupported(header, "function returning void (return type must be int)");
        }
        self.expect_keyword("int")?;
        let name = self.ident()?;
        self.expect_punct("(")?;
        let params = self.params()?;
        self.expect_punct(")")?;

        let mut requires = None;
        let mut ensures = None;
        while *self.peek() == Tok::AnnotStart {
            self.bump();
            while *self.peek() != Tok::AnnotEnd {
                let pos = self.pos();
                let slot = if self.is_keyword("requires") {
                    &mut requires
                } else if self.is_keyword("ensures") {
                    &mut ensures
                } else {
                    return self.syntax(&["`requires`", "`ensures`"]);
                };
                let Tok::Ident(kw) = self.bump().tok else {
                    unreachable!()
                };
                let e = self.expr()?;
                self.expect_punct(";")?;
                if slot.is_some() {
                    return Err(self.error(
                        pos,
                        ParseErrorKind::Annotation(format!("duplicate `{kw}` clause")),
                    ));
                }
                *slot = Some((e, pos));
            }
            self.bump();
        }
        let Some(requires) = requires else {
            return Err(self.error(
                header,
                ParseErrorKind::Annotation("missing `requires` clause".into()),
            ));
        };
        let Some(ensures) = ensures else {
            return Err(self.error(
                header,
                ParseErrorKind::Annotation("missing `ensures` clause".into()),
            ));
        };

        self.expect_punct("{")?;
        let body = self.stmt_list()?;
        self.expect_punct("}")?;
        if *self.peek() != Tok::Eof {
            let pos = self.pos();
            if matches!(self.peek(), Tok::Ident(s) if s == "int") {
                return self.unsupported(pos, "multiple functions or global variables");
            }
            return self.syntax(&["end of file"]);
        }
        Ok(Program {
            name: name.to_string(),
            header,
            params,
            requires,
            ensures,
            body,
        })
    }

    fn params(&mut self) -> Result<Vec<Ident>, ParseError> {
        let mut params = Vec::new();
        if self.is_punct(")") {
            return Ok(params);
        }
        if self.is_keyword("void") && matches!(self.peek_at(1), Tok::Punct(")")) {
            self.bump();
            return Ok(params);
        }
        loop {
            self.expect_keyword("int")?;
            if self.is_punct("*") {
                return self.unsupported(self.pos(), "pointer");
            }
            params.push(self.ident()?);
            if !self.eat_punct(",") {
                return Ok(params);
            }
        }
    }

    // -- statements -------------------------------------------------------

    fn stmt_list(&mut self) -> Result<Vec<CStmt>, ParseError> {
        let mut out = Vec::new();
        while !self.is_punct("}") {
            if *self.peek() == Tok::Eof {
                return self.syntax(&["`}`"]);
            }
            out.push(self.stmt(true)?);
        }
        Ok(out)
    }

    fn stmt(&mut self, allow_decl: bool) -> Result<CStmt, ParseError> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::AnnotStart => {
                return Err(self.error(
                    pos,
                    ParseErrorKind::Annotation(
                        "annotations are only allowed after the function header and loop headers"
                            .into(),
                    ),
                ))
            }
            Tok::Punct(";") => {
                self.bump();
                CStmtKind::Empty
            }
            Tok::Punct("{") => {
                self.bump();
                let list = self.stmt_list()?;
                self.expect_punct("}")?;
                CStmtKind::Block(list)
            }
            Tok::Ident(k) if k == "int" => {
                if !allow_decl {
                    return Err(self.error(
                        pos,
                        ParseErrorKind::Unsupported(
                            "declaration as the body of an if without braces".into(),
                        ),
                    ));
                }
                self.bump();
                if self.is_punct("*") {
                    return self.unsupported(self.pos(), "pointer");
                }
                let name = self.ident()?;
                if self.is_punct(";") {
                    return Err(self.error(
                        pos,
                        ParseErrorKind::Unsupported(format!(
                            "declaration of `{name}` without an initializer"
                        )),
                    ));
                }
                if self.is_punct("[") {
                    return self.unsupported(self.pos(), "array");
                }
                if self.is_punct("(") {
                    return self.unsupported(pos, "nested function definition or call");
                }
                self.expect_punct("=")?;
                let init = self.expr()?;
                self.expect_punct(";")?;
                CStmtKind::Decl(name, init)
            }
            Tok::Ident(k) if k == "return" => {
                self.bump();
                if self.is_punct(";") {
                    return self.syntax(&["expression"]);
                }
                let e = self.expr()?;
                self.expect_punct(";")?;
                CStmtKind::Return(e)
            }
            Tok::Ident(k) if k == "if" => {
                self.bump();
                self.expect_punct("(")?;
                let c = self.expr()?;
                self.expect_punct(")")?;
                let then_b = self.branch()?;
                let else_b = if self.is_keyword("else") {
                    self.bump();
                    Some(self.branch()?)
                } else {
                    None
                };
                CStmtKind::If(c, then_b, else_b)
            }
            Tok::Ident(k) if k == "while" => {
                self.bump();
                self.expect_punct("(")?;
                let c = self.expr()?;
                self.expect_punct(")")?;
                let inv = self.loop_invariant(pos)?;
                if !self.is_punct("{") {
                    return Err(self.error(
                        self.pos(),
                        ParseErrorKind::Unsupported("loop body must be a braced block".into()),
                    ));
                }
                self.bump();
                let body = self.stmt_list()?;
                self.expect_punct("}")?;
                CStmtKind::While(c, inv, body)
            }
            Tok::Ident(k) if k == "else" => return self.syntax(&["statement"]),
            _ => {
                let e = self.expr()?;
                self.expect_punct(";")?;
                CStmtKind::Expr(e)
            }
        };
        Ok(CStmt { pos, kind })
    }

    fn branch(&mut self) -> Result<Branch, ParseError> {
        if self.eat_punct("{") {
            let list = self.stmt_list()?;
            self.expect_punct("}")?;
            Ok(Branch::Braced(list))
        } else {
            Ok(Branch::Single(Box::new(self.stmt(false)?)))
        }
    }

    fn loop_invariant(&mut self, loop_pos: Pos) -> Result<Expr, ParseError> {
        let mut inv: Option<Expr> = None;
        if *self.peek() != Tok::AnnotStart {
            return Err(self.error(
                loop_pos,
                ParseErrorKind::Annotation("loop is missing its `invariant` annotation".into()),
            ));
        }
        while *self.peek() == Tok::AnnotStart {
            self.bump();
            while *self.peek() != Tok::AnnotEnd {
                let pos = self.pos();
                if !self.is_keyword("invariant") {
                    return self.syntax(&["`invariant`"]);
                }
                self.bump();
                let e = self.expr()?;
                self.expect_punct(";")?;
                if inv.is_some() {
                    return Err(self.error(
                        pos,
                        ParseErrorKind::Annotation("duplicate `invariant` clause".into()),
                    ));
                }
                inv = Some(e);
            }
            self.bump();
        }
        inv.ok_or_else(|| {
            self.error(
                loop_pos,
                ParseErrorKind::Annotation("loop is missing its `invariant` annotation".into()),
            )
        })
    }

    // -- expressions ------------------------------------------------------

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.assignment()
    }

    fn assignment(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        let lhs = self.or_expr()?;
        for op in ["+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="] {
            if self.is_punct(op) {
                return self.unsupported(self.pos(), &format!("compound assignment `{op}`"));
            }
        }
        if self.is_punct("=") {
            self.bump();
            let rhs = self.assignment()?;
            return match lhs {
                Expr::Var(x) => Ok(Expr::Assign(x, Box::new(rhs))),
                _ => self.unsupported(pos, "assignment to something other than a variable"),
            };
        }
        if self.is_punct("?") {
            return self.unsupported(self.pos(), "conditional operator `?:`");
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.and_expr()?;
        while self.eat_punct("||") {
            e = Expr::or(e, self.and_expr()?);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.bit_or()?;
        while self.eat_punct("&&") {
            e = Expr::and(e, self.bit_or()?);
        }
        Ok(e)
    }

    fn bit_or(&mut self) -> Result<Expr, ParseError> {
        let e = self.equality()?;
        for op in ["|", "^", "&"] {
            if self.is_punct(op) {
                return self.unsupported(self.pos(), &format!("bitwise operator `{op}`"));
            }
        }
        Ok(e)
    }

    fn equality(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.relational()?;
        loop {
            if self.eat_punct("==") {
                e = Expr::eq(e, self.relational()?);
            } else if self.eat_punct("!=") {
                e = Expr::ne(e, self.relational()?);
            } else {
                return Ok(e);
            }
        }
    }

    fn relational(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.additive()?;
        loop {
            if self.eat_punct("<") {
                e = Expr::lt(e, self.additive()?);
            } else if self.eat_punct("<=") {
                e = Expr::le(e, self.additive()?);
            } else if self.eat_punct(">") {
                let r = self.additive()?;
                e = Expr::lt(r, e);
            } else if self.eat_punct(">=") {
                let r = self.additive()?;
                e = Expr::le(r, e);
            } else {
                return Ok(e);
            }
        }
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        if self.is_punct("<<") || self.is_punct(">>") {
            return self.unsupported(self.pos(), "shift");
        }
        let mut e = self.multiplicative()?;
        loop {
            if self.eat_punct("+") {
                e = Expr::add(e, self.multiplicative()?);
            } else if self.eat_punct("-") {
                e = Expr::sub(e, self.multiplicative()?);
            } else if self.is_punct("<<") || self.is_punct(">>") {
                return self.unsupported(self.pos(), "shift");
            } else {
                return Ok(e);
            }
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            if self.eat_punct("/") {
                e = Expr::div(e, self.unary()?);
            } else if self.is_punct("*") {
                return self.unsupported(self.pos(), "multiplication");
            } else if self.is_punct("%") {
                return self.unsupported(self.pos(), "remainder operator `%`");
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        if self.eat_punct("!") {
            return Ok(Expr::not(self.unary()?));
        }
        if self.eat_punct("+") {
            return self.unary();
        }
        if self.eat_punct("-") {
            if let Tok::Int(text) = self.peek().clone() {
                let lit_pos = self.pos();
                self.bump();
                return self.literal(&text, true, lit_pos);
            }
            return Ok(Expr::sub(Expr::Int(0), self.unary()?));
        }
        if self.is_punct("*") || self.is_punct("&") {
            return self.unsupported(pos, "pointer");
        }
        if self.is_punct("++") || self.is_punct("--") || self.is_punct("~") {
            return self.unsupported(pos, &format!("operator {}", self.peek().describe()));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let e = self.primary()?;
        let pos = self.pos();
        if self.is_punct("(") {
            return self.unsupported(pos, "function call");
        }
        if self.is_punct("[") {
            return self.unsupported(pos, "array");
        }
        if self.is_punct("++") || self.is_punct("--") {
            return self.unsupported(pos, &format!("operator {}", self.peek().describe()));
        }
        if self.is_punct(".") || self.is_punct("->") {
            return self.unsupported(pos, "member access");
        }
        Ok(e)
    }

    fn literal(&self, text: &str, negated: bool, pos: Pos) -> Result<Expr, ParseError> {
        let out_of_range = || {
            self.error(
                pos,
                ParseErrorKind::Literal(format!(
                    "integer literal `{}{text}` is outside [{MIN_SIGNED}, {MAX_SIGNED}]",
                    if negated { "-" } else { "" }
                )),
            )
        };
        let magnitude: i64 = text.parse().map_err(|_| out_of_range())?;
        let value = if negated { -magnitude } else { magnitude };
        if !(MIN_SIGNED..=MAX_SIGNED).contains(&value) {
            return Err(out_of_range());
        }
        Ok(Expr::Int(value))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(text) => {
                self.bump();
                self.literal(&text, false, pos)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Expr::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Expr::False)
            }
            Tok::Ident(_) => Ok(Expr::Var(self.ident()?)),
            Tok::Punct("(") => {
                self.bump();
                if self.is_keyword("int") {
                    return self.unsupported(pos, "cast");
                }
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            _ => self.syntax(&["expression"]),
        }
    }
}

// ---------------------------------------------------------------------------
// Lowering

struct Lowerer {
    sites: SiteMap,
}

fn lower_program(p: Program) -> ParsedProgram {
    let mut l = Lowerer {
        sites: SiteMap {
            header: p.header,
            pre: p.requires.1,
            post: p.ensures.1,
            ..SiteMap::default()
        },
    };
    let body = l.list(p.body, StmtPath::root());
    ParsedProgram {
        name: p.name,
        func: Func::new(p.params, p.requires.0, body, p.ensures.0),
        sites: l.sites,
    }
}

impl Lowerer {
    fn list(&mut self, stmts: Vec<CStmt>, path: StmtPath) -> Stmt {
        let mut iter = stmts.into_iter();
        let Some(first) = iter.next() else {
            return Stmt::Skip;
        };
        let rest: Vec<CStmt> = iter.collect();
        match first.kind {
            CStmtKind::Decl(x, init) => {
                self.sites.stmts.insert(path.clone(), first.pos);
                let body = self.list(rest, path.child(0));
                Stmt::Let(x, init, Box::new(body))
            }
            kind => {
                let head = self.one(
                    CStmt {
                        pos: first.pos,
                        kind,
                    },
                    path.child(0),
                );
                let tail = self.list(rest, path.child(1));
                Stmt::seq(head, tail)
            }
        }
    }

    fn one(&mut self, s: CStmt, path: StmtPath) -> Stmt {
        self.sites.stmts.insert(path.clone(), s.pos);
        match s.kind {
            CStmtKind::Decl(..) => unreachable!("declarations are lowered by `list`"),
            CStmtKind::Expr(e) => Stmt::Expr(e),
            CStmtKind::Return(e) => Stmt::Return(e),
            CStmtKind::Empty => Stmt::Skip,
            CStmtKind::Block(list) => Stmt::block(self.list(list, path.child(0))),
            CStmtKind::If(c, t, e) => {
                let then_s = self.branch(t, path.child(0));
                let else_s = match e {
                    Some(b) => self.branch(b, path.child(1)),
                    None => Stmt::Skip,
                };
                Stmt::if_(c, then_s, else_s)
            }
            CStmtKind::While(c, inv, body) => {
                // While -> Seq -> Block -> list
                let inner = self.list(body, path.child(0).child(0).child(0));
                Stmt::while_(c, inv, Stmt::seq(Stmt::block(inner), Stmt::Skip))
            }
        }
    }

    fn branch(&mut self, b: Branch, path: StmtPath) -> Stmt {
        match b {
            Branch::Braced(list) => Stmt::block(self.list(list, path.child(0))),
            Branch::Single(s) => self.one(*s, path),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{countdown, COUNTDOWN_SOURCE};
    use crate::sexpr::stmt_to_string;

    fn parse(src: &str) -> Result<ParsedProgram, ParseError> {
        parse_program(&SourceProgram::new("t.c", src))
    }

    fn body_of(src: &str) -> Stmt {
        parse(src).unwrap().func.body
    }

    #[test]
    fn countdown_lowers_exactly() {
        let p = parse(COUNTDOWN_SOURCE).unwrap();
        assert_eq!(p.name, "main");
        assert_eq!(p.func, countdown());
    }

    #[test]
    fn minimal_program() {
        let p = parse("int main() //@ requires true;\n//@ ensures true;\n{ return 0; }").unwrap();
        assert_eq!(
            p.func,
            Func::new(
                vec![],
                Expr::True,
                Stmt::seq(Stmt::ret(Expr::int(0)), Stmt::Skip),
                Expr::True
            )
        );
    }

    #[test]
    fn division_lowering_via_printer() {
        let body = body_of("int main() //@ requires true;\n//@ ensures result == 2;\n{ return 4 / 2; }");
        assert_eq!(
            stmt_to_string(&body),
            "(seq (return (div (int 4) (int 2))) skip)"
        );
    }

    #[test]
    fn annotation_expressions() {
        assert_eq!(
            parse_annotation_expr("0 <= x").unwrap(),
            Expr::le(Expr::int(0), Expr::var("x"))
        );
        assert_eq!(parse_annotation_expr("true").unwrap(), Expr::True);
        assert_eq!(
            parse_annotation_expr("result == 0").unwrap(),
            Expr::eq(Expr::var("result"), Expr::int(0))
        );
    }

    #[test]
    fn precedence_matches_c() {
        assert_eq!(
            parse_expr("0 < x - 1").unwrap(),
            Expr::lt(Expr::int(0), Expr::sub(Expr::var("x"), Expr::int(1)))
        );
        assert_eq!(
            parse_expr("!a && b || c").unwrap(),
            Expr::or(
                Expr::and(Expr::not(Expr::var("a")), Expr::var("b")),
                Expr::var("c")
            )
        );
        assert_eq!(
            parse_expr("a - b - c").unwrap(),
            Expr::sub(Expr::sub(Expr::var("a"), Expr::var("b")), Expr::var("c"))
        );
        assert_eq!(
            parse_expr("a + b / c").unwrap(),
            Expr::add(Expr::var("a"), Expr::div(Expr::var("b"), Expr::var("c")))
        );
        assert_eq!(
            parse_expr("x = y = 1").unwrap(),
            Expr::assign("x", Expr::assign("y", Expr::int(1)))
        );
    }

    #[test]
    fn unary_minus_and_greater_than() {
        assert_eq!(parse_expr("-2147483648").unwrap(), Expr::int(-2147483648));
        assert_eq!(
            parse_expr("-x").unwrap(),
            Expr::sub(Expr::int(0), Expr::var("x"))
        );
        assert_eq!(
            parse_expr("a > b").unwrap(),
            Expr::lt(Expr::var("b"), Expr::var("a"))
        );
        assert_eq!(
            parse_expr("a >= 1").unwrap(),
            Expr::le(Expr::int(1), Expr::var("a"))
        );
    }

    #[test]
    fn literal_range_is_checked() {
        assert!(parse_expr("2147483647").is_ok());
        let e = parse_expr("2147483648").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Literal(_)));
        assert!(parse_expr("-2147483649").is_err());
        assert!(parse_expr("99999999999999999999999").is_err());
    }

    #[test]
    fn statement_lists_are_right_nested() {
        let body = body_of(
            "int main() //@ requires true;\n//@ ensures true;\n{ int a = 1; a = 2; a = 3; return a; }",
        );
        let Stmt::Let(_, _, rest) = body else {
            panic!("expected let")
        };
        let expected = Stmt::list([
            Stmt::assign("a", Expr::int(2)),
            Stmt::assign("a", Expr::int(3)),
            Stmt::ret(Expr::var("a")),
        ]);
        assert_eq!(*rest, expected);
    }

    #[test]
    fn if_else_and_nested_blocks() {
        let body = body_of(
            "int f(int a) //@ requires true;\n//@ ensures true;\n{ if (a < 0) { return 0; } else return a; { } }",
        );
        let expected = Stmt::list([
            Stmt::if_(
                Expr::lt(Expr::var("a"), Expr::int(0)),
                Stmt::block(Stmt::list([Stmt::ret(Expr::int(0))])),
                Stmt::ret(Expr::var("a")),
            ),
            Stmt::block(Stmt::Skip),
        ]);
        assert_eq!(body, expected);
    }

    #[test]
    fn parameters_are_arguments() {
        let p = parse("int f(int a, int b) //@ requires a <= b;\n//@ ensures true;\n{ return a; }")
            .unwrap();
        assert_eq!(p.name, "f");
        assert_eq!(p.func.args.len(), 2);
    }

    #[test]
    fn diagnostics_carry_positions() {
        let e = parse("int main() //@ requires true;\n//@ ensures true;\n{ return 0 }").unwrap_err();
        assert_eq!(e.pos, Pos { line: 3, col: 12 });
        assert_eq!(
            e.to_string(),
            "t.c:3:12: error: syntax error: expected `;`, found `}`"
        );
    }

    #[test]
    fn annotation_errors() {
        let missing = parse("int main() //@ requires true;\n{ return 0; }").unwrap_err();
        assert!(matches!(missing.kind, ParseErrorKind::Annotation(_)));
        let dup = parse("int main() //@ requires true; requires true;\n//@ ensures true;\n{ return 0; }")
            .unwrap_err();
        assert!(dup.to_string().contains("duplicate"));
        let no_inv = parse(
            "int main() //@ requires true;\n//@ ensures true;\n{ while (true) { } return 0; }",
        )
        .unwrap_err();
        assert!(no_inv.to_string().contains("invariant"));
        let two_inv = parse(
            "int main() //@ requires true;\n//@ ensures true;\n{ while (true) //@ invariant true;\n//@ invariant true;\n{ } return 0; }",
        )
        .unwrap_err();
        assert!(two_inv.to_string().contains("duplicate `invariant`"));
    }

    #[test]
    fn block_annotations_accepted() {
        let p = parse("int main() /*@ requires true; ensures result == 1; @*/ { return 1; }").unwrap();
        assert_eq!(p.func.post, Expr::eq(Expr::var("result"), Expr::int(1)));
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let cases = [
            ("for (;;) { }", "for-loop"),
            ("int y = f(1);", "function call"),
            ("int *p = 0;", "pointer"),
            ("int y = 2 * 3;", "multiplication"),
            ("int y;", "without an initializer"),
            ("while (true) //@ invariant true;\n return 0;", "braced block"),
            ("x += 1;", "compound assignment"),
        ];
        for (stmt, what) in cases {
            let src = format!(
                "int main() //@ requires true;\n//@ ensures true;\n{{ int x = 0; {stmt} return 0; }}"
            );
            let e = parse(&src).unwrap_err();
            assert!(
                e.to_string().contains(what),
                "`{stmt}` gave `{e}`, expected mention of {what}"
            );
        }
    }

    #[test]
    fn sites_record_statement_positions() {
        let p = parse(COUNTDOWN_SOURCE).unwrap();
        // Let at the root, while at body.0.0, the decrement inside the loop
        // block, and return at body.0.1.0.
        assert_eq!(p.sites.stmts[&StmtPath(vec![])], Pos { line: 5, col: 5 });
        assert_eq!(p.sites.stmts[&StmtPath(vec![0, 0])], Pos { line: 6, col: 5 });
        assert_eq!(
            p.sites.stmts[&StmtPath(vec![0, 0, 0, 0, 0, 0])],
            Pos { line: 9, col: 9 }
        );
        assert_eq!(p.sites.stmts[&StmtPath(vec![0, 1, 0])], Pos { line: 11, col: 5 });
        assert_eq!(p.sites.post, Pos { line: 3, col: 9 });
    }
}
