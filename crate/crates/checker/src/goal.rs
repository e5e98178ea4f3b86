//! Goals rebuilt from a function's syntax. The construction walks an
//! explicit work list instead of nesting closures, so the code shares no
//! structure with the verifier's builder.

use std::collections::HashMap;
use std::fmt::Write as _;

use vfx_lang::analysis::free_targets;
use vfx_lang::ast::{BinOp, Expr, Func, Ident, Stmt, RESULT};
use vfx_lang::store::{Store, MAX_SIGNED, MIN_SIGNED};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Val {
    Num(i64),
    Var(u32),
    Plus(Box<Val>, Box<Val>),
    Minus(Box<Val>, Box<Val>),
    Quot(Box<Val>, Box<Val>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ne,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Fact {
    Yes,
    No,
    Rel(Cmp, Val, Val),
    Neg(Box<Fact>),
    Both(Box<Fact>, Box<Fact>),
    Either(Box<Fact>, Box<Fact>),
}

impl Fact {
    pub fn neg(f: Fact) -> Fact {
        Fact::Neg(Box::new(f))
    }

    fn in_range(v: u32) -> Fact {
        Fact::Both(
            Box::new(Fact::Rel(Cmp::Le, Val::Num(MIN_SIGNED), Val::Var(v))),
            Box::new(Fact::Rel(Cmp::Le, Val::Var(v), Val::Num(MAX_SIGNED))),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    Top,
    Bot,
    Assert(Fact),
    Pair(Box<Goal>, Box<Goal>),
    Assume(Fact, Box<Goal>),
    All(u32, Box<Goal>),
}

fn pair(a: Goal, b: Goal) -> Goal {
    Goal::Pair(Box::new(a), Box::new(b))
}

fn assume(f: Fact, g: Goal) -> Goal {
    Goal::Assume(f, Box::new(g))
}

type Env = Store<Val>;

/// Pending work after the current statement.
#[derive(Clone)]
enum Work<'a> {
    Run(&'a Stmt),
    Drop(&'a Ident),
    /// End of a loop body: re-establish the invariant, then stop.
    Reestablish(&'a Expr),
}

struct Builder<'f> {
    next: u32,
    post: &'f Expr,
    entry: Env,
}

fn result_name() -> Ident {
    Ident::new(RESULT).expect("valid identifier")
}

/// Pure translation, no side conditions. `None` if a name is unbound or a
/// form is of the wrong sort.
fn val_of(e: &Expr, env: &Env) -> Option<Val> {
    Some(match e {
        Expr::Int(z) => Val::Num(*z),
        Expr::Var(x) => env.get(x.as_str())?.clone(),
        Expr::Binary(BinOp::Add, a, b) => Val::Plus(Box::new(val_of(a, env)?), Box::new(val_of(b, env)?)),
        Expr::Binary(BinOp::Sub, a, b) => Val::Minus(Box::new(val_of(a, env)?), Box::new(val_of(b, env)?)),
        Expr::Binary(BinOp::Div, a, b) => Val::Quot(Box::new(val_of(a, env)?), Box::new(val_of(b, env)?)),
        _ => return None,
    })
}

fn cmp_of(op: BinOp) -> Option<Cmp> {
    Some(match op {
        BinOp::Lt => Cmp::Lt,
        BinOp::Le => Cmp::Le,
        BinOp::Eq => Cmp::Eq,
        BinOp::Ne => Cmp::Ne,
        _ => return None,
    })
}

fn fact_of(e: &Expr, env: &Env) -> Option<Fact> {
    Some(match e {
        Expr::True => Fact::Yes,
        Expr::False => Fact::No,
        Expr::Binary(op, a, b) => match op {
            BinOp::And => Fact::Both(Box::new(fact_of(a, env)?), Box::new(fact_of(b, env)?)),
            BinOp::Or => Fact::Either(Box::new(fact_of(a, env)?), Box::new(fact_of(b, env)?)),
            _ => Fact::Rel(cmp_of(*op)?, val_of(a, env)?, val_of(b, env)?),
        },
        Expr::Not(a) => Fact::neg(fact_of(a, env)?),
        _ => return None,
    })
}

/// Evaluation with side conditions: the obligations met on the way, in
/// order, and the value if evaluation got through.
fn eval_val(e: &Expr, env: &Env, checks: &mut Vec<Fact>) -> Option<Val> {
    match e {
        Expr::Int(z) => (MIN_SIGNED..=MAX_SIGNED).contains(z).then_some(Val::Num(*z)),
        Expr::Var(x) => env.get(x.as_str()).cloned(),
        Expr::Binary(op @ (BinOp::Add | BinOp::Sub | BinOp::Div), a, b) => {
            let a = eval_val(a, env, checks)?;
            let b = eval_val(b, env, checks)?;
            if *op == BinOp::Div {
                checks.push(Fact::Rel(Cmp::Ne, b.clone(), Val::Num(0)));
                checks.push(Fact::Either(
                    Box::new(Fact::Rel(Cmp::Ne, a.clone(), Val::Num(MIN_SIGNED))),
                    Box::new(Fact::Rel(Cmp::Ne, b.clone(), Val::Num(-1))),
                ));
                return Some(Val::Quot(Box::new(a), Box::new(b)));
            }
            let v = if *op == BinOp::Add {
                Val::Plus(Box::new(a), Box::new(b))
            } else {
                Val::Minus(Box::new(a), Box::new(b))
            };
            checks.push(Fact::Rel(Cmp::Le, Val::Num(MIN_SIGNED), v.clone()));
            checks.push(Fact::Rel(Cmp::Le, v.clone(), Val::Num(MAX_SIGNED)));
            Some(v)
        }
        _ => None,
    }
}

fn eval_fact(e: &Expr, env: &Env, checks: &mut Vec<Fact>) -> Option<Fact> {
    match e {
        Expr::True => Some(Fact::Yes),
        Expr::False => Some(Fact::No),
        Expr::Binary(BinOp::And | BinOp::Or, a, b) => {
            let a = eval_fact(a, env, checks)?;
            let b = eval_fact(b, env, checks)?;
            Some(if matches!(e, Expr::Binary(BinOp::And, ..)) {
                Fact::Both(Box::new(a), Box::new(b))
            } else {
                Fact::Either(Box::new(a), Box::new(b))
            })
        }
        Expr::Binary(op, a, b) => {
            let c = cmp_of(*op)?;
            let a = eval_val(a, env, checks)?;
            let b = eval_val(b, env, checks)?;
            Some(Fact::Rel(c, a, b))
        }
        Expr::Not(a) => Some(Fact::neg(eval_fact(a, env, checks)?)),
        _ => None,
    }
}

/// Prefixes `rest` with the obligations in `checks`, or ends in `Bot` if
/// evaluation failed part way.
fn guarded(checks: Vec<Fact>, rest: Option<Goal>) -> Goal {
    let mut g = rest.unwrap_or(Goal::Bot);
    for c in checks.into_iter().rev() {
        g = pair(Goal::Assert(c), g);
    }
    g
}

impl<'f> Builder<'f> {
    fn fresh(&mut self) -> u32 {
        let v = self.next;
        self.next += 1;
        v
    }

    fn quantify(&mut self, names: &[Ident], env: Env, then: impl FnOnce(&mut Self, Env) -> Goal) -> Goal {
        let mut vars = Vec::new();
        let mut env = env;
        for x in names {
            let v = self.fresh();
            vars.push(v);
            env = env.with(x, Val::Var(v));
        }
        let mut g = then(self, env);
        for v in vars.into_iter().rev() {
            g = Goal::All(v, Box::new(assume(Fact::in_range(v), g)));
        }
        g
    }

    fn returned(&mut self, v: Val) -> Goal {
        let env = self.entry.with(&result_name(), v);
        match fact_of(self.post, &env) {
            Some(f) => pair(Goal::Assert(f), Goal::Top),
            None => Goal::Bot,
        }
    }

    fn run<'a>(&mut self, mut work: Vec<Work<'a>>, mut env: Env) -> Goal {
        loop {
            let Some(item) = work.pop() else {
                // fell off the end of the function body
                return Goal::Bot;
            };
            let s = match item {
                Work::Drop(x) => {
                    env = env.without(x);
                    continue;
                }
                Work::Reestablish(inv) => {
                    return match fact_of(inv, &env) {
                        Some(f) => pair(Goal::Assert(f), Goal::Top),
                        None => Goal::Bot,
                    };
                }
                Work::Run(s) => s,
            };
            match s {
                Stmt::Skip => {}
                Stmt::Seq(a, b) => {
                    work.push(Work::Run(b));
                    work.push(Work::Run(a));
                }
                Stmt::Block(a) => work.push(Work::Run(a)),
                Stmt::Let(x, init, body) => {
                    if env.is_bound(x.as_str()) {
                        return Goal::Bot;
                    }
                    let mut checks = Vec::new();
                    let Some(v) = eval_val(init, &env, &mut checks) else {
                        return guarded(checks, None);
                    };
                    work.push(Work::Drop(x));
                    work.push(Work::Run(body));
                    let rest = self.run(work, env.with(x, v));
                    return guarded(checks, Some(rest));
                }
                Stmt::Expr(Expr::Assign(x, rhs)) => {
                    let mut checks = Vec::new();
                    let Some(v) = eval_val(rhs, &env, &mut checks) else {
                        return guarded(checks, None);
                    };
                    if !checks.is_empty() {
                        let rest = self.run(work, env.with(x, v));
                        return guarded(checks, Some(rest));
                    }
                    env = env.with(x, v);
                }
                Stmt::Expr(_) => return Goal::Bot,
                Stmt::Return(e) => {
                    let mut checks = Vec::new();
                    let rest = eval_val(e, &env, &mut checks).map(|v| self.returned(v));
                    return guarded(checks, rest);
                }
                Stmt::If(c, a, b) => {
                    let mut checks = Vec::new();
                    let Some(f) = eval_fact(c, &env, &mut checks) else {
                        return guarded(checks, None);
                    };
                    let mut wa = work.clone();
                    wa.push(Work::Run(a));
                    let ga = self.run(wa, env.clone());
                    work.push(Work::Run(b));
                    let gb = self.run(work, env);
                    let g = pair(assume(f.clone(), ga), assume(Fact::neg(f), gb));
                    return guarded(checks, Some(g));
                }
                Stmt::While {
                    cond,
                    invariant,
                    body,
                } => return self.while_loop(cond, invariant, body, work, env),
            }
        }
    }

    fn while_loop<'a>(
        &mut self,
        cond: &'a Expr,
        invariant: &'a Expr,
        body: &'a Stmt,
        work: Vec<Work<'a>>,
        env: Env,
    ) -> Goal {
        let Some(entry_inv) = fact_of(invariant, &env) else {
            return Goal::Bot;
        };
        let targets = free_targets(body);
        let havocked = if targets.iter().all(|x| env.is_bound(x.as_str())) {
            self.quantify(&targets, env, |b, env| {
                let Some(inv) = fact_of(invariant, &env) else {
                    return Goal::Bot;
                };
                let mut checks = Vec::new();
                let inner = match eval_fact(cond, &env, &mut checks) {
                    None => None,
                    Some(c) => {
                        let g_body = b.run(vec![Work::Reestablish(invariant), Work::Run(body)], env.clone());
                        let g_exit = b.run(work, env);
                        Some(pair(assume(c.clone(), g_body), assume(Fact::neg(c), g_exit)))
                    }
                };
                assume(inv, guarded(checks, inner))
            })
        } else {
            Goal::Bot
        };
        pair(Goal::Assert(entry_inv), havocked)
    }
}

/// The goal whose proof establishes `f`.
pub fn goal_of(f: &Func) -> Goal {
    let mut b = Builder {
        next: 0,
        post: &f.post,
        entry: Env::new(),
    };
    b.quantify(&f.args, Env::new(), |b, env| {
        let Some(pre) = fact_of(&f.pre, &env) else {
            return Goal::Bot;
        };
        b.entry = env.clone();
        assume(pre, b.run(vec![Work::Run(&f.body)], env))
    })
}

// -- text form ----------------------------------------------------------------

struct Printer {
    names: HashMap<u32, usize>,
    out: String,
}

impl Printer {
    fn val(&mut self, v: &Val) {
        match v {
            Val::Num(z) => write!(self.out, "{z}").unwrap(),
            Val::Var(x) => match self.names.get(x) {
                Some(i) => write!(self.out, "s{i}").unwrap(),
                None => write!(self.out, "?{x}").unwrap(),
            },
            Val::Plus(a, b) => self.node("+", |p| p.val(a), |p| p.val(b)),
            Val::Minus(a, b) => self.node("-", |p| p.val(a), |p| p.val(b)),
            Val::Quot(a, b) => self.node("/", |p| p.val(a), |p| p.val(b)),
        }
    }

    fn node(&mut self, head: &str, a: impl FnOnce(&mut Self), b: impl FnOnce(&mut Self)) {
        write!(self.out, "({head} ").unwrap();
        a(self);
        self.out.push(' ');
        b(self);
        self.out.push(')');
    }

    fn fact(&mut self, f: &Fact) {
        match f {
            Fact::Yes => self.out.push_str("true"),
            Fact::No => self.out.push_str("false"),
            Fact::Rel(c, a, b) => {
                let head = match c {
                    Cmp::Lt => "<",
                    Cmp::Le => "<=",
                    Cmp::Eq => "=",
                    Cmp::Ne => "!=",
                };
                self.node(head, |p| p.val(a), |p| p.val(b))
            }
            Fact::Neg(a) => {
                self.out.push_str("(not ");
                self.fact(a);
                self.out.push(')');
            }
            Fact::Both(a, b) => self.node("and", |p| p.fact(a), |p| p.fact(b)),
            Fact::Either(a, b) => self.node("or", |p| p.fact(a), |p| p.fact(b)),
        }
    }

    fn goal(&mut self, g: &Goal) {
        match g {
            Goal::Top => self.out.push_str("top"),
            Goal::Bot => self.out.push_str("bot"),
            Goal::Assert(f) => {
                self.out.push_str("(holds ");
                self.fact(f);
                self.out.push(')');
            }
            Goal::Pair(a, b) => self.node("conj", |p| p.goal(a), |p| p.goal(b)),
            Goal::Assume(f, a) => self.node("imp", |p| p.fact(f), |p| p.goal(a)),
            Goal::All(v, a) => {
                let i = self.names.len();
                self.names.insert(*v, i);
                write!(self.out, "(forall s{i} ").unwrap();
                self.goal(a);
                self.out.push(')');
            }
        }
    }
}

/// S-expression text with bound variables renamed `s0, s1, ...` in order of
/// appearance.
pub fn goal_text(g: &Goal) -> String {
    let mut p = Printer {
        names: HashMap::new(),
        out: String::new(),
    };
    p.goal(g);
    p.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use vfx_lang::ast::countdown;

    #[test]
    fn countdown_goal_text() {
        let bounds = "(and (<= -2147483648 s0) (<= s0 2147483647))";
        let expected = format!(
            "(imp true (conj (holds (<= 0 32767)) (forall s0 (imp {bounds} (imp (<= 0 s0) \
             (conj (imp (< 0 s0) (conj (holds (<= -2147483648 (- s0 1))) (conj (holds (<= (- s0 1) 2147483647)) \
             (conj (holds (<= 0 (- s0 1))) top)))) (imp (not (< 0 s0)) (conj (holds (= s0 0)) top))))))))"
        );
        assert_eq!(goal_text(&goal_of(&countdown())), expected);
    }

    #[test]
    fn body_without_return_ends_in_bot() {
        let f = Func::new(vec![], Expr::True, Stmt::Skip, Expr::True);
        assert_eq!(goal_text(&goal_of(&f)), "(imp true bot)");
    }
}
