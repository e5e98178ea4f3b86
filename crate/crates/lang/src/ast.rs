//! Abstract syntax of the exported language: expressions, statements and
//! functions. Statement lists are already lowered to right-nested `Seq`
//! chains, declarations to `Let`, and loops carry their invariant.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A program identifier. Case-sensitive, matches `[A-Za-z_][A-Za-z0-9_]*`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ident(String);

impl Ident {
    /// Builds an identifier, rejecting text outside the identifier grammar.
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidIdent> {
        let name = name.into();
        if is_valid_ident(&name) {
            Ok(Ident(name))
        } else {
            Err(InvalidIdent(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Reserved name under which the return value is visible to postconditions.
pub const RESULT: &str = "result";

pub fn is_valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid identifier `{0}`")]
pub struct InvalidIdent(pub String);

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl PartialEq<str> for Ident {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Ident {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

impl std::borrow::Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Shorthand for building identifiers in tests and examples.
///
/// # Panics
///
/// Panics if `name` is not a valid identifier.
pub fn ident(name: &str) -> Ident {
    Ident::new(name).expect("invalid identifier literal")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Div,
    Lt,
    Le,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Div)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Eq | BinOp::Ne)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    /// C spelling of the operator.
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub const ALL: [BinOp; 9] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Div,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::And,
        BinOp::Or,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    True,
    False,
    /// Integer literal. Wider than the 32-bit range so that out-of-range
    /// literals stay representable and fail later, at evaluation.
    Int(i64),
    Var(Ident),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Assign(Ident, Box<Expr>),
}

impl Expr {
    pub fn int(z: i64) -> Expr {
        Expr::Int(z)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(ident(name))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn add(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Add, l, r)
    }

    pub fn sub(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Sub, l, r)
    }

    pub fn div(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Div, l, r)
    }

    pub fn lt(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Lt, l, r)
    }

    pub fn le(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Le, l, r)
    }

    pub fn eq(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Eq, l, r)
    }

    pub fn ne(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Ne, l, r)
    }

    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::And, l, r)
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Or, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn assign(name: &str, rhs: Expr) -> Expr {
        Expr::Assign(ident(name), Box::new(rhs))
    }

    /// Calls `f` on every identifier read or written by this expression,
    /// left to right.
    pub fn for_each_ident(&self, f: &mut impl FnMut(&Ident)) {
        match self {
            Expr::True | Expr::False | Expr::Int(_) => {}
            Expr::Var(x) => f(x),
            Expr::Binary(_, l, r) => {
                l.for_each_ident(f);
                r.for_each_ident(f);
            }
            Expr::Not(e) => e.for_each_ident(f),
            Expr::Assign(x, e) => {
                f(x);
                e.for_each_ident(f);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Seq(Box<Stmt>, Box<Stmt>),
    Let(Ident, Expr, Box<Stmt>),
    Expr(Expr),
    If(Expr, Box<Stmt>, Box<Stmt>),
    Return(Expr),
    While {
        cond: Expr,
        invariant: Expr,
        body: Box<Stmt>,
    },
    Block(Box<Stmt>),
}

impl Stmt {
    pub fn seq(first: Stmt, second: Stmt) -> Stmt {
        Stmt::Seq(Box::new(first), Box::new(second))
    }

    pub fn let_(name: &str, init: Expr, body: Stmt) -> Stmt {
        Stmt::Let(ident(name), init, Box::new(body))
    }

    pub fn assign(name: &str, rhs: Expr) -> Stmt {
        Stmt::Expr(Expr::assign(name, rhs))
    }

    pub fn if_(cond: Expr, then_s: Stmt, else_s: Stmt) -> Stmt {
        Stmt::If(cond, Box::new(then_s), Box::new(else_s))
    }

    pub fn ret(e: Expr) -> Stmt {
        Stmt::Return(e)
    }

    pub fn while_(cond: Expr, invariant: Expr, body: Stmt) -> Stmt {
        Stmt::While {
            cond,
            invariant,
            body: Box::new(body),
        }
    }

    pub fn block(inner: Stmt) -> Stmt {
        Stmt::Block(Box::new(inner))
    }

    /// Right-nested `Seq` chain terminated by `Skip`, the shape statement
    /// lists take after lowering.
    pub fn list(stmts: impl IntoIterator<Item = Stmt>) -> Stmt {
        let items: Vec<Stmt> = stmts.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(Stmt::Skip, |rest, s| Stmt::seq(s, rest))
    }

    /// Number of statement nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Stmt::Skip | Stmt::Expr(_) | Stmt::Return(_) => 0,
            Stmt::Seq(a, b) | Stmt::If(_, a, b) => a.size() + b.size(),
            Stmt::Let(_, _, s) | Stmt::Block(s) | Stmt::While { body: s, .. } => s.size(),
        }
    }
}

/// A function: argument names, precondition, body and postcondition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Func {
    pub args: Vec<Ident>,
    pub pre: Expr,
    pub body: Stmt,
    pub post: Expr,
}

impl Func {
    pub fn new(args: Vec<Ident>, pre: Expr, body: Stmt, post: Expr) -> Self {
        Func {
            args,
            pre,
            body,
            post,
        }
    }
}

/// The running example: count `x` down from 32767 to zero and return it.
///
/// ```c
/// int main()
///     //@ requires true;
///     //@ ensures result == 0;
/// {
///     int x = 32767;
///     while (0 < x)
///         //@ invariant 0 <= x;
///     {
///         x = x - 1;
///     }
///     return x;
/// }
/// ```
pub fn countdown() -> Func {
    let x = || Expr::var("x");
    let body = Stmt::let_(
        "x",
        Expr::int(32767),
        Stmt::seq(
            Stmt::while_(
                Expr::lt(Expr::int(0), x()),
                Expr::le(Expr::int(0), x()),
                Stmt::seq(
                    Stmt::block(Stmt::seq(
                        Stmt::assign("x", Expr::sub(x(), Expr::int(1))),
                        Stmt::Skip,
                    )),
                    Stmt::Skip,
                ),
            ),
            Stmt::seq(Stmt::ret(x()), Stmt::Skip),
        ),
    );
    Func::new(
        vec![],
        Expr::True,
        body,
        Expr::eq(Expr::var(RESULT), Expr::int(0)),
    )
}

/// Source text of [`countdown`].
pub const COUNTDOWN_SOURCE: &str = "\
int main()
    //@ requires true;
    //@ ensures result == 0;
{
    int x = 32767;
    while (0 < x)
        //@ invariant 0 <= x;
    {
        x = x - 1;
    }
    return x;
}
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifier_grammar() {
        assert!(Ident::new("x").is_ok());
        assert!(Ident::new("_tmp9").is_ok());
        assert!(Ident::new("9x").is_err());
        assert!(Ident::new("").is_err());
        assert!(Ident::new("a-b").is_err());
    }

    #[test]
    fn list_is_right_nested_and_skip_terminated() {
        let a = Stmt::ret(Expr::int(1));
        let b = Stmt::ret(Expr::int(2));
        assert_eq!(
            Stmt::list([a.clone(), b.clone()]),
            Stmt::seq(a, Stmt::seq(b, Stmt::Skip))
        );
        assert_eq!(Stmt::list([]), Stmt::Skip);
    }
}
