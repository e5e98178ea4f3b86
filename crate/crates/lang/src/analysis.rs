//! Static analyses over the AST.

use std::fmt;

use crate::ast::{Expr, Func, Ident, Stmt, RESULT};

/// Identifiers assigned somewhere in `s` that are not bound by an enclosing
/// `Let` inside `s`, in order of first occurrence.
///
/// These are the variables a loop body may modify and that symbolic
/// execution has to forget at the loop head.
pub fn free_targets(s: &Stmt) -> Vec<Ident> {
    let mut out = Vec::new();
    let mut bound = Vec::new();
    collect_stmt(s, &mut bound, &mut out);
    out
}

fn collect_stmt<'a>(s: &'a Stmt, bound: &mut Vec<&'a Ident>, out: &mut Vec<Ident>) {
    match s {
        Stmt::Skip => {}
        Stmt::Seq(a, b) => {
            collect_stmt(a, bound, out);
            collect_stmt(b, bound, out);
        }
        Stmt::Let(x, init, body) => {
            collect_expr(init, bound, out);
            bound.push(x);
            collect_stmt(body, bound, out);
            bound.pop();
        }
        Stmt::Expr(e) | Stmt::Return(e) => collect_expr(e, bound, out),
        Stmt::If(c, a, b) => {
            collect_expr(c, bound, out);
            collect_stmt(a, bound, out);
            collect_stmt(b, bound, out);
        }
        Stmt::While {
            cond,
            invariant,
            body,
        } => {
            collect_expr(cond, bound, out);
            collect_expr(invariant, bound, out);
            collect_stmt(body, bound, out);
        }
        Stmt::Block(inner) => collect_stmt(inner, bound, out),
    }
}

fn collect_expr(e: &Expr, bound: &[&Ident], out: &mut Vec<Ident>) {
    match e {
        Expr::True | Expr::False | Expr::Int(_) | Expr::Var(_) => {}
        Expr::Binary(_, l, r) => {
            collect_expr(l, bound, out);
            collect_expr(r, bound, out);
        }
        Expr::Not(inner) => collect_expr(inner, bound, out),
        Expr::Assign(x, rhs) => {
            collect_expr(rhs, bound, out);
            if !bound.contains(&x) && !out.contains(x) {
                out.push(x.clone());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    DuplicateArg(Ident),
    ResultAsArg,
    UnboundIdent(Ident),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DuplicateArg(x) => write!(f, "duplicate argument `{x}`"),
            Diagnostic::ResultAsArg => write!(f, "`{RESULT}` is reserved and cannot be an argument"),
            Diagnostic::UnboundIdent(x) => write!(f, "unbound identifier `{x}`"),
        }
    }
}

/// Scoping pre-check. An empty result means the arguments are distinct,
/// none of them is `result`, and every identifier is in scope where used.
pub fn well_formed(f: &Func) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for (i, a) in f.args.iter().enumerate() {
        if f.args[..i].contains(a) && !diags.contains(&Diagnostic::DuplicateArg(a.clone())) {
            diags.push(Diagnostic::DuplicateArg(a.clone()));
        }
        if a == RESULT && !diags.contains(&Diagnostic::ResultAsArg) {
            diags.push(Diagnostic::ResultAsArg);
        }
    }

    let mut unbound = Vec::new();
    let mut scope: Vec<&Ident> = f.args.iter().collect();
    check_expr(&f.pre, &scope, &mut unbound);
    check_stmt(&f.body, &mut scope, &mut unbound);
    let result = Ident::new(RESULT).expect("reserved name is an identifier");
    let mut post_scope: Vec<&Ident> = f.args.iter().collect();
    post_scope.push(&result);
    check_expr(&f.post, &post_scope, &mut unbound);

    diags.extend(unbound.into_iter().map(Diagnostic::UnboundIdent));
    diags
}

fn check_expr(e: &Expr, scope: &[&Ident], unbound: &mut Vec<Ident>) {
    e.for_each_ident(&mut |x| {
        if !scope.contains(&x) && !unbound.contains(x) {
            unbound.push(x.clone());
        }
    });
}

fn check_stmt<'a>(s: &'a Stmt, scope: &mut Vec<&'a Ident>, unbound: &mut Vec<Ident>) {
    match s {
        Stmt::Skip => {}
        Stmt::Seq(a, b) => {
            check_stmt(a, scope, unbound);
            check_stmt(b, scope, unbound);
        }
        Stmt::Let(x, init, body) => {
            check_expr(init, scope, unbound);
            scope.push(x);
            check_stmt(body, scope, unbound);
            scope.pop();
        }
        Stmt::Expr(e) | Stmt::Return(e) => check_expr(e, scope, unbound),
        Stmt::If(c, a, b) => {
            check_expr(c, scope, unbound);
            check_stmt(a, scope, unbound);
            check_stmt(b, scope, unbound);
        }
        Stmt::While {
            cond,
            invariant,
            body,
        } => {
            check_expr(cond, scope, unbound);
            check_expr(invariant, scope, unbound);
            check_stmt(body, scope, unbound);
        }
        Stmt::Block(inner) => check_stmt(inner, scope, unbound),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{countdown, ident};

    fn names(v: &[&str]) -> Vec<Ident> {
        v.iter().map(|n| ident(n)).collect()
    }

    #[test]
    fn free_targets_of_decrement_is_x() {
        let s = Stmt::seq(
            Stmt::assign("x", Expr::sub(Expr::var("x"), Expr::int(1))),
            Stmt::Skip,
        );
        assert_eq!(free_targets(&s), names(&["x"]));
    }

    #[test]
    fn free_targets_of_skip_is_empty() {
        assert!(free_targets(&Stmt::Skip).is_empty());
    }

    #[test]
    fn let_bound_names_are_not_free() {
        let s = Stmt::let_("y", Expr::int(0), Stmt::assign("y", Expr::int(1)));
        assert!(free_targets(&s).is_empty());
    }

    #[test]
    fn let_scope_ends_with_its_body() {
        // (let y 0 (y = 1)); y = 2  -> the second assignment is free
        let s = Stmt::seq(
            Stmt::let_("y", Expr::int(0), Stmt::assign("y", Expr::int(1))),
            Stmt::assign("y", Expr::int(2)),
        );
        assert_eq!(free_targets(&s), names(&["y"]));
    }

    #[test]
    fn first_occurrence_order_without_duplicates() {
        let s = Stmt::list([
            Stmt::assign("b", Expr::int(1)),
            Stmt::assign("a", Expr::int(1)),
            Stmt::assign("b", Expr::int(2)),
        ]);
        assert_eq!(free_targets(&s), names(&["b", "a"]));
    }

    #[test]
    fn countdown_is_well_formed() {
        assert!(well_formed(&countdown()).is_empty());
    }

    #[test]
    fn undeclared_assignment_target() {
        let f = Func::new(
            vec![],
            Expr::True,
            Stmt::assign("z", Expr::int(1)),
            Expr::True,
        );
        assert_eq!(well_formed(&f), vec![Diagnostic::UnboundIdent(ident("z"))]);
    }

    #[test]
    fn duplicate_arguments() {
        let f = Func::new(names(&["a", "a"]), Expr::True, Stmt::Skip, Expr::True);
        assert_eq!(well_formed(&f), vec![Diagnostic::DuplicateArg(ident("a"))]);
    }

    #[test]
    fn result_is_reserved() {
        let f = Func::new(names(&["result"]), Expr::True, Stmt::Skip, Expr::True);
        assert_eq!(well_formed(&f), vec![Diagnostic::ResultAsArg]);
    }

    #[test]
    fn result_only_visible_in_post() {
        let f = Func::new(
            vec![],
            Expr::eq(Expr::var("result"), Expr::int(0)),
            Stmt::ret(Expr::int(0)),
            Expr::eq(Expr::var("result"), Expr::int(0)),
        );
        assert_eq!(well_formed(&f), vec![Diagnostic::UnboundIdent(ident("result"))]);
    }
}
