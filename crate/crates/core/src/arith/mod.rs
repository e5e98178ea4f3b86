//! Decision procedure for verification-formula leaves: linear integer
//! arithmetic with truncated division by constants.
//!
//! A query is a set of propositions. They are put in negation normal form
//! over linear constraints, disjunctions are case-split (at most
//! [`BRANCH_BUDGET`] branches per query), and each conjunction of atoms goes
//! to the Fourier-Motzkin core in [`fm`]. Answers are sound: `Unsat` is only
//! returned with a refutation, `Sat` only with a checked model. Anything else
//! is `Unknown`.

pub mod fm;
pub mod linear;
pub mod normalize;
mod prove;

use std::collections::BTreeMap;
use std::fmt;

use crate::symexec::{Prop, Symbol};
use fm::Feasibility;
use linear::{Constraint, Normal, Var};
use normalize::{Formula, Normalizer};

pub use prove::{prove_sep, ProofTrace, ProveFailure, ProveFailureReason};

pub const BRANCH_BUDGET: usize = 256;

/// Values for the symbols of a query.
pub type Model = BTreeMap<Symbol, i128>;

pub fn format_model(m: &Model) -> String {
    if m.is_empty() {
        return "{}".into();
    }
    let parts: Vec<String> = m.iter().map(|(s, z)| format!("s{s} = {z}")).collect();
    format!("{{{}}}", parts.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Unsat,
    Sat(Model),
    Unknown(String),
}

/// Result of an entailment or unsatisfiability question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    /// No, with a counter-model.
    No(Model),
    Unknown(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Yes => f.write_str("yes"),
            Verdict::No(m) => write!(f, "no, counter-model {}", format_model(m)),
            Verdict::Unknown(why) => write!(f, "unknown ({why})"),
        }
    }
}

/// Satisfiability of the conjunction of `props`.
pub fn solve(props: &[Prop]) -> Answer {
    let mut n = Normalizer::new();
    let mut formulas = Vec::new();
    for p in props {
        match n.prop(p, true) {
            Ok(f) => formulas.push(f),
            Err(_) => return Answer::Unknown("arithmetic overflow".into()),
        }
    }
    formulas.append(&mut n.axioms);
    let mut search = Search {
        branches: 0,
        all: Formula::And(formulas.clone()),
    };
    match search.run(Vec::new(), formulas, Vec::new()) {
        Answer::Sat(_) if n.weakened => {
            Answer::Unknown("division by a non-constant divisor".into())
        }
        a => a,
    }
}

struct Search {
    branches: usize,
    all: Formula,
}

impl Search {
    fn run(&mut self, mut atoms: Vec<Constraint>, mut todo: Vec<Formula>, mut ors: Vec<Vec<Formula>>) -> Answer {
        while let Some(f) = todo.pop() {
            match f {
                Formula::True => {}
                Formula::False => return Answer::Unsat,
                Formula::Atom(c) => match c.normalize() {
                    Normal::Valid => {}
                    Normal::Infeasible => return Answer::Unsat,
                    Normal::Constraint(c) => atoms.push(c),
                },
                Formula::And(fs) => todo.extend(fs),
                Formula::Or(fs) => {
                    if fs.contains(&Formula::True) {
                        continue;
                    }
                    let mut fs: Vec<Formula> =
                        fs.into_iter().filter(|f| *f != Formula::False).collect();
                    match fs.len() {
                        0 => return Answer::Unsat,
                        1 => todo.push(fs.pop().unwrap()),
                        _ => ors.push(fs),
                    }
                }
            }
        }

        let base = fm::check(&atoms);
        if base == Feasibility::Infeasible {
            return Answer::Unsat;
        }
        if let Feasibility::Feasible(assignment) = &base {
            let lookup = |v: Var| assignment.get(&v).copied().unwrap_or(0);
            if self.all.eval(&lookup) == Ok(true) {
                return Answer::Sat(symbols(assignment));
            }
        }
        let Some(split) = ors.pop() else {
            return match base {
                Feasibility::Feasible(a) => Answer::Sat(symbols(&a)),
                Feasibility::Unknown(why) => Answer::Unknown(why.into()),
                Feasibility::Infeasible => unreachable!(),
            };
        };
        let mut unknown = None;
        for d in split {
            self.branches += 1;
            if self.branches > BRANCH_BUDGET {
                return Answer::Unknown("case-split budget exhausted".into());
            }
            match self.run(atoms.clone(), vec![d], ors.clone()) {
                Answer::Unsat => {}
                sat @ Answer::Sat(_) => return sat,
                Answer::Unknown(why) => unknown = Some(why),
            }
        }
        match unknown {
            None => Answer::Unsat,
            Some(why) => Answer::Unknown(why),
        }
    }
}

fn symbols(a: &fm::Assignment) -> Model {
    a.iter()
        .filter_map(|(v, z)| match v {
            Var::Sym(s) => Some((*s, *z)),
            Var::Aux(_) => None,
        })
        .collect()
}

/// Hypotheses in scope, organised as a stack of frames.
#[derive(Debug, Clone, Default)]
pub struct Context {
    hyps: Vec<Prop>,
    frames: Vec<usize>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self) {
        self.frames.push(self.hyps.len());
    }

    pub fn pop(&mut self) {
        let n = self.frames.pop().expect("pop without push");
        self.hyps.truncate(n);
    }

    pub fn assume(&mut self, p: Prop) {
        self.hyps.push(p);
    }

    pub fn hypotheses(&self) -> &[Prop] {
        &self.hyps
    }

    /// Does every model of the context satisfy `goal`?
    pub fn entails(&self, goal: &Prop) -> Verdict {
        let mut q = self.hyps.clone();
        q.push(Prop::not(goal.clone()));
        match solve(&q) {
            Answer::Unsat => Verdict::Yes,
            Answer::Sat(m) => Verdict::No(m),
            Answer::Unknown(why) => Verdict::Unknown(why),
        }
    }

    /// Is the context contradictory?
    pub fn unsat(&self) -> Verdict {
        match solve(&self.hyps) {
            Answer::Unsat => Verdict::Yes,
            Answer::Sat(m) => Verdict::No(m),
            Answer::Unknown(why) => Verdict::Unknown(why),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexec::{Rel, Term};

    fn s(i: u32) -> Term {
        Term::Sym(i)
    }

    fn c(z: i64) -> Term {
        Term::Const(z)
    }

    fn ctx(hyps: &[Prop]) -> Context {
        let mut c = Context::new();
        for h in hyps {
            c.assume(h.clone());
        }
        c
    }

    #[test]
    fn loop_body_bound_is_entailed() {
        let cx = ctx(&[Prop::cmp(Rel::Le, c(0), s(0)), Prop::cmp(Rel::Lt, c(0), s(0))]);
        let goal = Prop::cmp(Rel::Le, c(vfx_lang::MIN_SIGNED), Term::sub(s(0), c(1)));
        assert_eq!(cx.entails(&goal), Verdict::Yes);
        assert_eq!(cx.entails(&Prop::cmp(Rel::Le, c(0), Term::sub(s(0), c(1)))), Verdict::Yes);
    }

    #[test]
    fn loop_exit_post_is_entailed() {
        let cx = ctx(&[
            Prop::cmp(Rel::Le, c(0), s(0)),
            Prop::not(Prop::cmp(Rel::Lt, c(0), s(0))),
        ]);
        assert_eq!(cx.entails(&Prop::cmp(Rel::Eq, s(0), c(0))), Verdict::Yes);
    }

    #[test]
    fn underconstrained_goal_has_counter_model() {
        let cx = Context::new();
        assert_eq!(
            cx.entails(&Prop::cmp(Rel::Eq, s(0), c(0))),
            Verdict::No(Model::from([(0, 1)]))
        );
    }

    #[test]
    fn unsat_examples() {
        let cx = ctx(&[Prop::cmp(Rel::Lt, c(0), s(0)), Prop::cmp(Rel::Le, s(0), c(0))]);
        assert_eq!(cx.unsat(), Verdict::Yes);
        let cx = ctx(&[Prop::cmp(Rel::Le, c(0), s(0))]);
        assert_eq!(cx.unsat(), Verdict::No(Model::from([(0, 0)])));
        let two_s = Term::add(s(0), s(0));
        let cx = ctx(&[Prop::cmp(Rel::Eq, two_s, c(1))]);
        assert_eq!(cx.unsat(), Verdict::Yes);
    }

    #[test]
    fn truncated_division_by_constant() {
        // 7 / 2 = 3
        let cx = Context::new();
        let goal = Prop::cmp(Rel::Eq, Term::div(c(7), c(2)), c(3));
        assert_eq!(cx.entails(&goal), Verdict::Yes);
        // s = -7  ⊨  s / 2 = -3
        let cx = ctx(&[Prop::cmp(Rel::Eq, s(0), c(-7))]);
        assert_eq!(cx.entails(&Prop::cmp(Rel::Eq, Term::div(s(0), c(2)), c(-3))), Verdict::Yes);
        assert!(matches!(
            cx.entails(&Prop::cmp(Rel::Eq, Term::div(s(0), c(2)), c(-4))),
            Verdict::No(_)
        ));
    }

    #[test]
    fn symbolic_divisor_is_never_refuted_by_a_spurious_model() {
        let cx = ctx(&[Prop::cmp(Rel::Lt, c(0), s(1))]);
        let goal = Prop::cmp(Rel::Eq, Term::div(s(0), s(1)), c(0));
        assert!(matches!(cx.entails(&goal), Verdict::Unknown(_)));
    }

    #[test]
    fn push_pop() {
        let mut cx = Context::new();
        cx.assume(Prop::cmp(Rel::Le, c(0), s(0)));
        cx.push();
        cx.assume(Prop::cmp(Rel::Lt, s(0), c(0)));
        assert_eq!(cx.unsat(), Verdict::Yes);
        cx.pop();
        assert!(matches!(cx.unsat(), Verdict::No(_)));
    }

    #[test]
    fn disequality_hypotheses_split() {
        // s ≠ 0, 0 ≤ s ≤ 1  ⊨  s = 1
        let cx = ctx(&[
            Prop::cmp(Rel::Ne, s(0), c(0)),
            Prop::cmp(Rel::Le, c(0), s(0)),
            Prop::cmp(Rel::Le, s(0), c(1)),
        ]);
        assert_eq!(cx.entails(&Prop::cmp(Rel::Eq, s(0), c(1))), Verdict::Yes);
    }

    #[test]
    fn adding_a_hypothesis_keeps_entailment() {
        let base = [Prop::cmp(Rel::Lt, c(3), s(0))];
        let goal = Prop::cmp(Rel::Lt, c(0), s(0));
        assert_eq!(ctx(&base).entails(&goal), Verdict::Yes);
        let mut more = base.to_vec();
        more.push(Prop::cmp(Rel::Ne, s(0), s(1)));
        assert_eq!(ctx(&more).entails(&goal), Verdict::Yes);
    }
}
