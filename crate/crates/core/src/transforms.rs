//! Statement normalizations applied before a program runs: dropping
//! trailing `skip`s and appending a final `return 0`.

use vfx_lang::ast::{Expr, Stmt};

/// Removes `Seq(s, Skip)` nodes. The equations are tried in order, so for
/// `Seq(s, Skip)` the left part `s` is returned as is.
pub fn simplify(s: &Stmt) -> Stmt {
    match s {
        Stmt::Seq(s1, s2) if **s2 == Stmt::Skip => (**s1).clone(),
        Stmt::Seq(s1, s2) => Stmt::seq(simplify(s1), simplify(s2)),
        Stmt::Let(x, e, body) => Stmt::Let(x.clone(), e.clone(), Box::new(simplify(body))),
        Stmt::If(c, s1, s2) => Stmt::if_(c.clone(), simplify(s1), simplify(s2)),
        Stmt::While {
            cond,
            invariant,
            body,
        } => Stmt::while_(cond.clone(), invariant.clone(), simplify(body)),
        Stmt::Block(inner) => Stmt::block(simplify(inner)),
        Stmt::Skip | Stmt::Expr(_) | Stmt::Return(_) => s.clone(),
    }
}

/// Derivability of `s1 ~> s2` in the inductive relation that mirrors
/// [`simplify`].
pub fn check_simplify_rel(s1: &Stmt, s2: &Stmt) -> bool {
    match (s1, s2) {
        (Stmt::Seq(a, b), _) if **b == Stmt::Skip => **a == *s2,
        (Stmt::Seq(a, b), Stmt::Seq(a2, b2)) => {
            check_simplify_rel(a, a2) && check_simplify_rel(b, b2)
        }
        (Stmt::Let(x, e, b), Stmt::Let(x2, e2, b2)) => {
            x == x2 && e == e2 && check_simplify_rel(b, b2)
        }
        (Stmt::If(c, a, b), Stmt::If(c2, a2, b2)) => {
            c == c2 && check_simplify_rel(a, a2) && check_simplify_rel(b, b2)
        }
        (
            Stmt::While {
                cond,
                invariant,
                body,
            },
            Stmt::While {
                cond: c2,
                invariant: i2,
                body: b2,
            },
        ) => cond == c2 && invariant == i2 && check_simplify_rel(body, b2),
        (Stmt::Block(a), Stmt::Block(b)) => check_simplify_rel(a, b),
        (Stmt::Skip, Stmt::Skip) => true,
        (Stmt::Expr(a), Stmt::Expr(b)) | (Stmt::Return(a), Stmt::Return(b)) => a == b,
        _ => false,
    }
}

/// `s; return 0`, the shape of a program's main function.
pub fn programify(s: Stmt) -> Stmt {
    Stmt::seq(s, Stmt::ret(Expr::int(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbsem::{exec_stmt, ExecResult, Outcome, ZStore};
    use vfx_lang::ast::countdown;

    fn ret_x() -> Stmt {
        Stmt::ret(Expr::var("x"))
    }

    #[test]
    fn simplify_examples() {
        assert_eq!(simplify(&Stmt::seq(ret_x(), Stmt::Skip)), ret_x());
        assert_eq!(simplify(&Stmt::Skip), Stmt::Skip);
        let s1 = Stmt::assign("a", Expr::int(1));
        let s2 = Stmt::assign("b", Expr::int(2));
        let s = Stmt::seq(Stmt::seq(s1.clone(), Stmt::Skip), Stmt::seq(s2.clone(), Stmt::Skip));
        assert_eq!(simplify(&s), Stmt::seq(s1, s2));
    }

    #[test]
    fn seq_skip_does_not_recurse_into_the_left() {
        let inner = Stmt::seq(ret_x(), Stmt::Skip);
        let s = Stmt::seq(inner.clone(), Stmt::Skip);
        assert_eq!(simplify(&s), inner);
    }

    #[test]
    fn relation_examples() {
        assert!(check_simplify_rel(&Stmt::seq(ret_x(), Stmt::Skip), &ret_x()));
        assert!(check_simplify_rel(&Stmt::Skip, &Stmt::Skip));
        assert!(!check_simplify_rel(&Stmt::Skip, &Stmt::ret(Expr::int(0))));
        let body = countdown().body;
        assert!(check_simplify_rel(&body, &simplify(&body)));
    }

    #[test]
    fn programify_keeps_an_earlier_return() {
        let s = programify(Stmt::ret(Expr::int(7)));
        assert_eq!(s, Stmt::seq(Stmt::ret(Expr::int(7)), Stmt::ret(Expr::int(0))));
        assert_eq!(
            exec_stmt(&ZStore::new(), &s, 0),
            ExecResult::Terminated(ZStore::new(), Outcome::Return(7))
        );
        assert_eq!(programify(Stmt::Skip), Stmt::seq(Stmt::Skip, Stmt::ret(Expr::int(0))));
    }
}
