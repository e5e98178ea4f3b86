//! Canonical prefix text form of expressions, statements and functions.
//!
//! ```text
//! (func (args) (pre true)
//!   (body (let x (int 32767) (seq (while ...) (seq (return (var x)) skip))))
//!   (post (eq (var result) (int 0))))
//! ```
//!
//! Printing is single-line with one space between tokens, so two ASTs are
//! equal exactly when their printed forms are byte-equal. Reading accepts any
//! whitespace.

use std::fmt::{self, Write as _};

use crate::ast::{BinOp, Expr, Func, Ident, Stmt};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("s-expression error at byte {offset}: {message}")]
pub struct SexprError {
    pub offset: usize,
    pub message: String,
}

fn op_name(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "add",
        BinOp::Sub => "sub",
        BinOp::Div => "div",
        BinOp::Lt => "lt",
        BinOp::Le => "le",
        BinOp::Eq => "eq",
        BinOp::Ne => "ne",
        BinOp::And => "and",
        BinOp::Or => "or",
    }
}

fn op_from_name(name: &str) -> Option<BinOp> {
    BinOp::ALL.into_iter().find(|op| op_name(*op) == name)
}

pub fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::True => out.push_str("true"),
        Expr::False => out.push_str("false"),
        Expr::Int(z) => {
            let _ = write!(out, "(int {z})");
        }
        Expr::Var(x) => {
            let _ = write!(out, "(var {x})");
        }
        Expr::Binary(op, l, r) => {
            let _ = write!(out, "({} ", op_name(*op));
            write_expr(out, l);
            out.push(' ');
            write_expr(out, r);
            out.push(')');
        }
        Expr::Not(inner) => {
            out.push_str("(not ");
            write_expr(out, inner);
            out.push(')');
        }
        Expr::Assign(x, rhs) => {
            let _ = write!(out, "(assign {x} ");
            write_expr(out, rhs);
            out.push(')');
        }
    }
}

pub fn write_stmt(out: &mut String, s: &Stmt) {
    match s {
        Stmt::Skip => out.push_str("skip"),
        Stmt::Seq(a, b) => {
            out.push_str("(seq ");
            write_stmt(out, a);
            out.push(' ');
            write_stmt(out, b);
            out.push(')');
        }
        Stmt::Let(x, init, body) => {
            let _ = write!(out, "(let {x} ");
            write_expr(out, init);
            out.push(' ');
            write_stmt(out, body);
            out.push(')');
        }
        Stmt::Expr(e) => {
            out.push_str("(expr ");
            write_expr(out, e);
            out.push(')');
        }
        Stmt::If(c, a, b) => {
            out.push_str("(if ");
            write_expr(out, c);
            out.push(' ');
            write_stmt(out, a);
            out.push(' ');
            write_stmt(out, b);
            out.push(')');
        }
        Stmt::Return(e) => {
            out.push_str("(return ");
            write_expr(out, e);
            out.push(')');
        }
        Stmt::While {
            cond,
            invariant,
            body,
        } => {
            out.push_str("(while ");
            write_expr(out, cond);
            out.push(' ');
            write_expr(out, invariant);
            out.push(' ');
            write_stmt(out, body);
            out.push(')');
        }
        Stmt::Block(inner) => {
            out.push_str("(block ");
            write_stmt(out, inner);
            out.push(')');
        }
    }
}

pub fn write_func(out: &mut String, f: &Func) {
    out.push_str("(func (args");
    for a in &f.args {
        out.push(' ');
        out.push_str(a.as_str());
    }
    out.push_str(") (pre ");
    write_expr(out, &f.pre);
    out.push_str(") (body ");
    write_stmt(out, &f.body);
    out.push_str(") (post ");
    write_expr(out, &f.post);
    out.push_str("))");
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

pub fn stmt_to_string(st: &Stmt) -> String {
    let mut s = String::new();
    write_stmt(&mut s, st);
    s
}

pub fn func_to_string(f: &Func) -> String {
    let mut s = String::new();
    write_func(&mut s, f);
    s
}

/// Wrapper whose `Display` prints the canonical form.
pub struct Canonical<'a, T>(pub &'a T);

impl fmt::Display for Canonical<'_, Expr> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&expr_to_string(self.0))
    }
}

impl fmt::Display for Canonical<'_, Stmt> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&stmt_to_string(self.0))
    }
}

impl fmt::Display for Canonical<'_, Func> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&func_to_string(self.0))
    }
}

// ---------------------------------------------------------------------------
// Reading

/// Generic S-expression tree with byte offsets for error reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    pub fn offset(&self) -> usize {
        match self {
            Sexp::Atom(_, o) | Sexp::List(_, o) => *o,
        }
    }
}

/// Reads exactly one S-expression from `text`.
pub fn read(text: &str) -> Result<Sexp, SexprError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let sexp = read_one(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(SexprError {
            offset: pos,
            message: "trailing input".into(),
        });
    }
    Ok(sexp)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn read_one(bytes: &[u8], pos: &mut usize) -> Result<Sexp, SexprError> {
    // Iterative on the list spine, recursive on nesting.
    skip_ws(bytes, pos);
    let start = *pos;
    match bytes.get(*pos) {
        None => Err(SexprError {
            offset: start,
            message: "unexpected end of input".into(),
        }),
        Some(b'(') => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    None => {
                        return Err(SexprError {
                            offset: start,
                            message: "unclosed `(`".into(),
                        })
                    }
                    Some(b')') => {
                        *pos += 1;
                        return Ok(Sexp::List(items, start));
                    }
                    Some(_) => items.push(read_one(bytes, pos)?),
                }
            }
        }
        Some(b')') => Err(SexprError {
            offset: start,
            message: "unexpected `)`".into(),
        }),
        Some(_) => {
            while *pos < bytes.len()
                && !bytes[*pos].is_ascii_whitespace()
                && bytes[*pos] != b'('
                && bytes[*pos] != b')'
            {
                *pos += 1;
            }
            let atom = std::str::from_utf8(&bytes[start..*pos]).map_err(|_| SexprError {
                offset: start,
                message: "invalid utf-8".into(),
            })?;
            Ok(Sexp::Atom(atom.to_string(), start))
        }
    }
}

fn err<T>(at: &Sexp, message: impl Into<String>) -> Result<T, SexprError> {
    Err(SexprError {
        offset: at.offset(),
        message: message.into(),
    })
}

fn head(items: &[Sexp]) -> Option<&str> {
    match items.first() {
        Some(Sexp::Atom(a, _)) => Some(a),
        _ => None,
    }
}

fn as_ident(s: &Sexp) -> Result<Ident, SexprError> {
    match s {
        Sexp::Atom(a, _) => Ident::new(a.clone()).or_else(|e| err(s, e.to_string())),
        _ => err(s, "expected identifier"),
    }
}

fn arity(s: &Sexp, items: &[Sexp], n: usize) -> Result<(), SexprError> {
    if items.len() == n + 1 {
        Ok(())
    } else {
        err(
            s,
            format!(
                "`{}` takes {n} operand(s), got {}",
                head(items).unwrap_or("?"),
                items.len().saturating_sub(1)
            ),
        )
    }
}

pub fn expr_from_sexp(s: &Sexp) -> Result<Expr, SexprError> {
    match s {
        Sexp::Atom(a, _) => match a.as_str() {
            "true" => Ok(Expr::True),
            "false" => Ok(Expr::False),
            other => err(s, format!("unknown expression atom `{other}`")),
        },
        Sexp::List(items, _) => {
            let Some(h) = head(items) else {
                return err(s, "expected expression form");
            };
            match h {
                "int" => {
                    arity(s, items, 1)?;
                    match &items[1] {
                        Sexp::Atom(n, _) => n
                            .parse::<i64>()
                            .map(Expr::Int)
                            .or_else(|_| err(&items[1], format!("bad integer `{n}`"))),
                        other => err(other, "expected integer"),
                    }
                }
                "var" => {
                    arity(s, items, 1)?;
                    Ok(Expr::Var(as_ident(&items[1])?))
                }
                "not" => {
                    arity(s, items, 1)?;
                    Ok(Expr::not(expr_from_sexp(&items[1])?))
                }
                "assign" => {
                    arity(s, items, 2)?;
                    Ok(Expr::Assign(
                        as_ident(&items[1])?,
                        Box::new(expr_from_sexp(&items[2])?),
                    ))
                }
                name => match op_from_name(name) {
                    Some(op) => {
                        arity(s, items, 2)?;
                        Ok(Expr::binary(
                            op,
                            expr_from_sexp(&items[1])?,
                            expr_from_sexp(&items[2])?,
                        ))
                    }
                    None => err(s, format!("unknown expression form `{name}`")),
                },
            }
        }
    }
}

pub fn stmt_from_sexp(s: &Sexp) -> Result<Stmt, SexprError> {
    match s {
        Sexp::Atom(a, _) if a == "skip" => Ok(Stmt::Skip),
        Sexp::Atom(a, _) => err(s, format!("unknown statement atom `{a}`")),
        Sexp::List(items, _) => {
            let Some(h) = head(items) else {
                return err(s, "expected statement form");
            };
            match h {
                "seq" => {
                    arity(s, items, 2)?;
                    Ok(Stmt::seq(stmt_from_sexp(&items[1])?, stmt_from_sexp(&items[2])?))
                }
                "let" => {
                    arity(s, items, 3)?;
                    Ok(Stmt::Let(
                        as_ident(&items[1])?,
                        expr_from_sexp(&items[2])?,
                        Box::new(stmt_from_sexp(&items[3])?),
                    ))
                }
                "expr" => {
                    arity(s, items, 1)?;
                    Ok(Stmt::Expr(expr_from_sexp(&items[1])?))
                }
                "if" => {
                    arity(s, items, 3)?;
                    Ok(Stmt::if_(
                        expr_from_sexp(&items[1])?,
                        stmt_from_sexp(&items[2])?,
                        stmt_from_sexp(&items[3])?,
                    ))
                }
                "return" => {
                    arity(s, items, 1)?;
                    Ok(Stmt::Return(expr_from_sexp(&items[1])?))
                }
                "while" => {
                    arity(s, items, 3)?;
                    Ok(Stmt::while_(
                        expr_from_sexp(&items[1])?,
                        expr_from_sexp(&items[2])?,
                        stmt_from_sexp(&items[3])?,
                    ))
                }
                "block" => {
                    arity(s, items, 1)?;
                    Ok(Stmt::block(stmt_from_sexp(&items[1])?))
                }
                other => err(s, format!("unknown statement form `{other}`")),
            }
        }
    }
}

fn section<'a>(s: &'a Sexp, name: &str) -> Result<&'a [Sexp], SexprError> {
    match s {
        Sexp::List(items, _) if head(items) == Some(name) => Ok(&items[1..]),
        _ => err(s, format!("expected `({name} ...)`")),
    }
}

pub fn func_from_sexp(s: &Sexp) -> Result<Func, SexprError> {
    let Sexp::List(items, _) = s else {
        return err(s, "expected `(func ...)`");
    };
    if head(items) != Some("func") || items.len() != 5 {
        return err(s, "expected `(func (args ...) (pre e) (body s) (post e))`");
    }
    let args = section(&items[1], "args")?
        .iter()
        .map(as_ident)
        .collect::<Result<Vec<_>, _>>()?;
    let single = |i: usize, name: &str| -> Result<&Sexp, SexprError> {
        match section(&items[i], name)? {
            [one] => Ok(one),
            _ => err(&items[i], format!("`{name}` takes exactly one operand")),
        }
    };
    Ok(Func {
        args,
        pre: expr_from_sexp(single(2, "pre")?)?,
        body: stmt_from_sexp(single(3, "body")?)?,
        post: expr_from_sexp(single(4, "post")?)?,
    })
}

pub fn parse_expr(text: &str) -> Result<Expr, SexprError> {
    expr_from_sexp(&read(text)?)
}

pub fn parse_stmt(text: &str) -> Result<Stmt, SexprError> {
    stmt_from_sexp(&read(text)?)
}

pub fn parse_func(text: &str) -> Result<Func, SexprError> {
    func_from_sexp(&read(text)?)
}
