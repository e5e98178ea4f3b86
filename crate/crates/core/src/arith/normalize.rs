//! From propositions over terms to negation-normal formulas over linear
//! constraints.

use std::collections::HashMap;

use super::linear::{Constraint, Lin, Overflow, Var};
use crate::symexec::{Prop, Rel, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(Constraint),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn eval(&self, model: &impl Fn(Var) -> i128) -> Result<bool, Overflow> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(c) => c.holds(model)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(model)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(model)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}

enum TermError {
    Overflow,
    /// Division by a non-constant or zero divisor.
    Undecidable,
}

impl From<Overflow> for TermError {
    fn from(_: Overflow) -> Self {
        TermError::Overflow
    }
}

/// Translation state for one query. Divisions by a nonzero constant are
/// replaced by fresh quotient variables whose defining constraints collect
/// in `axioms`.
#[derive(Default)]
pub struct Normalizer {
    next_aux: u32,
    quotients: HashMap<(Lin, i128), Var>,
    pub axioms: Vec<Formula>,
    /// Set when an atom had to be dropped. Dropping only weakens the
    /// formula, so unsatisfiability still carries over, but a model does not.
    pub weakened: bool,
}

impl Normalizer {
    pub fn new() -> Self {
        Self::default()
    }

    fn term(&mut self, t: &Term) -> Result<Lin, TermError> {
        match t {
            Term::Const(z) => Ok(Lin::constant(*z as i128)),
            Term::Sym(s) => Ok(Lin::var(Var::Sym(*s))),
            Term::Add(a, b) => Ok(self.term(a)?.add(&self.term(b)?)?),
            Term::Sub(a, b) => Ok(self.term(a)?.sub(&self.term(b)?)?),
            Term::Div(a, b) => {
                let a = self.term(a)?;
                let c = match self.term(b)?.as_constant() {
                    Some(c) if c != 0 => c,
                    _ => return Err(TermError::Undecidable),
                };
                if let Some(k) = a.as_constant() {
                    // Rust's `/` truncates toward zero, as C does.
                    return Ok(Lin::constant(k.checked_div(c).ok_or(Overflow)?));
                }
                Ok(Lin::var(self.quotient(a, c)?))
            }
        }
    }

    /// `q = a / c` truncating:  with `r = a - c·q`,
    /// `a ≥ 0 ∧ 0 ≤ r ≤ |c|-1`  or  `a ≤ -1 ∧ -(|c|-1) ≤ r ≤ 0`.
    fn quotient(&mut self, a: Lin, c: i128) -> Result<Var, Overflow> {
        if let Some(v) = self.quotients.get(&(a.clone(), c)) {
            return Ok(*v);
        }
        let q = Var::Aux(self.next_aux);
        self.next_aux += 1;
        let r = a.add_scaled(-c, &Lin::var(q))?;
        let m = c.checked_abs().ok_or(Overflow)? - 1;
        let neg_a = a.scale(-1)?;
        let neg_r = r.scale(-1)?;
        let nonneg = Formula::And(vec![
            Formula::Atom(Constraint::le(neg_a)),
            Formula::Atom(Constraint::le(neg_r.clone())),
            Formula::Atom(Constraint::le(r.plus(-m)?)),
        ]);
        let neg = Formula::And(vec![
            Formula::Atom(Constraint::le(a.plus(1)?)),
            Formula::Atom(Constraint::le(neg_r.plus(-m)?)),
            Formula::Atom(Constraint::le(r)),
        ]);
        self.axioms.push(Formula::Or(vec![nonneg, neg]));
        self.quotients.insert((a, c), q);
        Ok(q)
    }

    /// `p` if `positive`, else `¬p`, in negation normal form.
    pub fn prop(&mut self, p: &Prop, positive: bool) -> Result<Formula, Overflow> {
        Ok(match p {
            Prop::TT => bool_formula(positive),
            Prop::FF => bool_formula(!positive),
            Prop::Not(q) => self.prop(q, !positive)?,
            Prop::And(a, b) | Prop::Or(a, b) => {
                let conj = matches!(p, Prop::And(..)) == positive;
                let parts = vec![self.prop(a, positive)?, self.prop(b, positive)?];
                if conj {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            Prop::Cmp(rel, l, r) => {
                let (l, r) = match (self.term(l), self.term(r)) {
                    (Ok(l), Ok(r)) => (l, r),
                    (Err(TermError::Overflow), _) | (_, Err(TermError::Overflow)) => {
                        return Err(Overflow)
                    }
                    _ => {
                        self.weakened = true;
                        return Ok(Formula::True);
                    }
                };
                cmp(*rel, &l, &r, positive)?
            }
        })
    }
}

fn bool_formula(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

fn cmp(rel: Rel, l: &Lin, r: &Lin, positive: bool) -> Result<Formula, Overflow> {
    let lt = |a: &Lin, b: &Lin| -> Result<Formula, Overflow> {
        Ok(Formula::Atom(Constraint::le(a.sub(b)?.plus(1)?)))
    };
    let le = |a: &Lin, b: &Lin| -> Result<Formula, Overflow> {
        Ok(Formula::Atom(Constraint::le(a.sub(b)?)))
    };
    let eq = |a: &Lin, b: &Lin| -> Result<Formula, Overflow> {
        Ok(Formula::Atom(Constraint::eq(a.sub(b)?)))
    };
    // The `a > b` disjunct comes first so that models prefer it.
    let ne = |a: &Lin, b: &Lin| -> Result<Formula, Overflow> {
        Ok(Formula::Or(vec![lt(b, a)?, lt(a, b)?]))
    };
    match (rel, positive) {
        (Rel::Lt, true) => lt(l, r),
        (Rel::Lt, false) => le(r, l),
        (Rel::Le, true) => le(l, r),
        (Rel::Le, false) => lt(r, l),
        (Rel::Eq, true) | (Rel::Ne, false) => eq(l, r),
        (Rel::Eq, false) | (Rel::Ne, true) => ne(l, r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(f: &Formula) -> String {
        match f {
            Formula::Atom(c) => c.to_string(),
            other => panic!("not an atom: {other:?}"),
        }
    }

    #[test]
    fn strict_inequality() {
        let p = Prop::cmp(Rel::Lt, Term::Const(0), Term::Sym(0));
        let mut n = Normalizer::new();
        assert_eq!(atom(&n.prop(&p, true).unwrap()), "-s0 + 1 ≤ 0");
        assert_eq!(atom(&n.prop(&Prop::not(p), true).unwrap()), "s0 ≤ 0");
    }

    #[test]
    fn disequality_is_a_disjunction() {
        let p = Prop::cmp(Rel::Ne, Term::Sym(0), Term::Sym(1));
        let mut n = Normalizer::new();
        let Formula::Or(parts) = n.prop(&p, true).unwrap() else { panic!() };
        assert_eq!(atom(&parts[0]), "-s0 + s1 + 1 ≤ 0");
        assert_eq!(atom(&parts[1]), "s0 - s1 + 1 ≤ 0");
    }

    #[test]
    fn constant_division_folds() {
        let p = Prop::cmp(
            Rel::Eq,
            Term::div(Term::Const(7), Term::Const(2)),
            Term::Const(3),
        );
        let mut n = Normalizer::new();
        assert_eq!(n.prop(&p, true).unwrap(), Formula::Atom(Constraint::eq(Lin::constant(0))));
        let p = Prop::cmp(
            Rel::Eq,
            Term::div(Term::Const(-7), Term::Const(2)),
            Term::Const(-3),
        );
        assert_eq!(n.prop(&p, true).unwrap(), Formula::Atom(Constraint::eq(Lin::constant(0))));
    }

    #[test]
    fn symbolic_division_adds_axiom() {
        let p = Prop::cmp(Rel::Eq, Term::div(Term::Sym(0), Term::Const(2)), Term::Const(3));
        let mut n = Normalizer::new();
        n.prop(&p, true).unwrap();
        assert_eq!(n.axioms.len(), 1);
        assert!(!n.weakened);
    }

    #[test]
    fn symbolic_divisor_weakens() {
        let p = Prop::cmp(Rel::Eq, Term::div(Term::Const(1), Term::Sym(0)), Term::Const(3));
        let mut n = Normalizer::new();
        assert_eq!(n.prop(&p, false).unwrap(), Formula::True);
        assert!(n.weakened);
    }
}
