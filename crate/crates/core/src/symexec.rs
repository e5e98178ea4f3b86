//! Symbolic execution of functions into an explicit verification formula.
//!
//! The formula (`Sep`) is built in continuation-passing style: every
//! evaluation function takes the rest of the construction as a callback and
//! wraps the callback's result in whatever obligations or hypotheses the
//! current construct contributes. Continuations only exist while building;
//! the finished `Sep` is plain data.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use vfx_lang::analysis::free_targets;
use vfx_lang::ast::{BinOp, Expr, Func, Ident, Stmt, RESULT};
use vfx_lang::site::{Site, StmtPath};
use vfx_lang::store::{is_int, Store, MAX_SIGNED, MIN_SIGNED};

pub type Symbol = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Const(i64),
    Sym(Symbol),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    /// Division truncating toward zero.
    Div(Box<Term>, Box<Term>),
}

impl Term {
    pub fn add(l: Term, r: Term) -> Term {
        Term::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: Term, r: Term) -> Term {
        Term::Sub(Box::new(l), Box::new(r))
    }

    pub fn div(l: Term, r: Term) -> Term {
        Term::Div(Box::new(l), Box::new(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ne,
}

impl Rel {
    fn ascii(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ne => "!=",
        }
    }

    fn pretty(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "≤",
            Rel::Eq => "=",
            Rel::Ne => "≠",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Prop {
    TT,
    FF,
    Cmp(Rel, Term, Term),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn cmp(rel: Rel, l: Term, r: Term) -> Prop {
        Prop::Cmp(rel, l, r)
    }

    pub fn not(p: Prop) -> Prop {
        Prop::Not(Box::new(p))
    }

    pub fn and(l: Prop, r: Prop) -> Prop {
        Prop::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Prop, r: Prop) -> Prop {
        Prop::Or(Box::new(l), Box::new(r))
    }

    /// `min_signed <= s && s <= max_signed`.
    pub fn bounds(s: Symbol) -> Prop {
        Prop::and(
            Prop::cmp(Rel::Le, Term::Const(MIN_SIGNED), Term::Sym(s)),
            Prop::cmp(Rel::Le, Term::Sym(s), Term::Const(MAX_SIGNED)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObligationKind {
    LowerBound,
    UpperBound,
    DivisorNonZero,
    DivisionOverflow,
    InvariantOnEntry,
    InvariantPreserved,
    Postcondition,
}

impl fmt::Display for ObligationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObligationKind::LowerBound => "lower-bound",
            ObligationKind::UpperBound => "upper-bound",
            ObligationKind::DivisorNonZero => "divisor-nonzero",
            ObligationKind::DivisionOverflow => "division-overflow",
            ObligationKind::InvariantOnEntry => "invariant-on-entry",
            ObligationKind::InvariantPreserved => "invariant-preserved",
            ObligationKind::Postcondition => "postcondition",
        })
    }
}

/// Where an obligation came from. Not part of the formula's identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Obligation {
    pub kind: ObligationKind,
    pub site: Site,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FailureCause {
    LiteralOutOfRange(i64),
    UnboundVariable(Ident),
    NotArithmetic,
    NotBoolean,
    Shadowing(Ident),
    HavocUnbound(Ident),
    UnsupportedStatement,
    FellOffEnd,
}

impl fmt::Display for FailureCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureCause::LiteralOutOfRange(z) => write!(f, "literal {z} is out of range"),
            FailureCause::UnboundVariable(x) => write!(f, "variable `{x}` is not in scope"),
            FailureCause::NotArithmetic => f.write_str("expected an integer expression"),
            FailureCause::NotBoolean => f.write_str("expected a boolean expression"),
            FailureCause::Shadowing(x) => write!(f, "declaration of `{x}` shadows a variable"),
            FailureCause::HavocUnbound(x) => {
                write!(f, "loop assigns `{x}`, which is not in scope")
            }
            FailureCause::UnsupportedStatement => f.write_str("unsupported statement"),
            FailureCause::FellOffEnd => f.write_str("function can end without returning"),
        }
    }
}

/// Why a `False` leaf was produced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Failure {
    pub cause: FailureCause,
    pub site: Site,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sep {
    True,
    False(Failure),
    Holds(Prop, Obligation),
    And(Box<Sep>, Box<Sep>),
    Implies(Prop, Box<Sep>),
    /// Universal over a fresh symbol; the child is always
    /// `Implies(Prop::bounds(sym), ..)`.
    Forall(Symbol, Box<Sep>),
}

impl Sep {
    pub fn and(l: Sep, r: Sep) -> Sep {
        Sep::And(Box::new(l), Box::new(r))
    }

    pub fn implies(p: Prop, rest: Sep) -> Sep {
        Sep::Implies(p, Box::new(rest))
    }

    pub fn holds(p: Prop, kind: ObligationKind, site: &Site) -> Sep {
        Sep::Holds(
            p,
            Obligation {
                kind,
                site: site.clone(),
            },
        )
    }

    pub fn fail(cause: FailureCause, site: &Site) -> Sep {
        Sep::False(Failure {
            cause,
            site: site.clone(),
        })
    }

    /// Node counts: (forall, implies, and, leaves).
    pub fn shape(&self) -> SepShape {
        let mut c = SepShape::default();
        self.walk(&mut |s| match s {
            Sep::Forall(..) => c.foralls += 1,
            Sep::Implies(..) => c.implies += 1,
            Sep::And(..) => c.ands += 1,
            _ => c.leaves += 1,
        });
        c
    }

    pub fn walk(&self, f: &mut impl FnMut(&Sep)) {
        f(self);
        match self {
            Sep::And(l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Sep::Implies(_, s) | Sep::Forall(_, s) => s.walk(f),
            _ => {}
        }
    }

    /// Leaves in depth-first, left-to-right order.
    pub fn leaves(&self) -> Vec<&Sep> {
        let mut out = Vec::new();
        fn go<'a>(s: &'a Sep, out: &mut Vec<&'a Sep>) {
            match s {
                Sep::And(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Sep::Implies(_, s) | Sep::Forall(_, s) => go(s, out),
                leaf => out.push(leaf),
            }
        }
        go(self, &mut out);
        out
    }

    /// Symbols occurring in the formula that no enclosing `Forall` binds.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut free = BTreeSet::new();
        let mut bound = Vec::new();
        free_in_sep(self, &mut bound, &mut free);
        free
    }

    /// Single-line prefix form with binders renamed `s0, s1, ..` in order of
    /// appearance. Two formulas print identically iff they are equal up to
    /// symbol naming and obligation metadata.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut names = HashMap::new();
        write_sep(&mut out, self, &mut names);
        out
    }

    /// Indented infix rendering for people.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        let mut names = HashMap::new();
        pretty_sep(&mut out, self, &mut names, 0);
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SepShape {
    pub foralls: usize,
    pub implies: usize,
    pub ands: usize,
    pub leaves: usize,
}

fn free_in_term(t: &Term, bound: &[Symbol], free: &mut BTreeSet<Symbol>) {
    match t {
        Term::Const(_) => {}
        Term::Sym(s) => {
            if !bound.contains(s) {
                free.insert(*s);
            }
        }
        Term::Add(a, b) | Term::Sub(a, b) | Term::Div(a, b) => {
            free_in_term(a, bound, free);
            free_in_term(b, bound, free);
        }
    }
}

fn free_in_prop(p: &Prop, bound: &[Symbol], free: &mut BTreeSet<Symbol>) {
    match p {
        Prop::TT | Prop::FF => {}
        Prop::Cmp(_, a, b) => {
            free_in_term(a, bound, free);
            free_in_term(b, bound, free);
        }
        Prop::Not(p) => free_in_prop(p, bound, free),
        Prop::And(a, b) | Prop::Or(a, b) => {
            free_in_prop(a, bound, free);
            free_in_prop(b, bound, free);
        }
    }
}

fn free_in_sep(s: &Sep, bound: &mut Vec<Symbol>, free: &mut BTreeSet<Symbol>) {
    match s {
        Sep::True | Sep::False(_) => {}
        Sep::Holds(p, _) => free_in_prop(p, bound, free),
        Sep::And(a, b) => {
            free_in_sep(a, bound, free);
            free_in_sep(b, bound, free);
        }
        Sep::Implies(p, rest) => {
            free_in_prop(p, bound, free);
            free_in_sep(rest, bound, free);
        }
        Sep::Forall(sym, rest) => {
            bound.push(*sym);
            free_in_sep(rest, bound, free);
            bound.pop();
        }
    }
}

// -- printing ---------------------------------------------------------------

fn sym_name(names: &HashMap<Symbol, usize>, s: Symbol) -> String {
    match names.get(&s) {
        Some(i) => format!("s{i}"),
        None => format!("?{s}"),
    }
}

fn bind(names: &mut HashMap<Symbol, usize>, s: Symbol) -> String {
    let i = names.len();
    names.insert(s, i);
    format!("s{i}")
}

fn write_term(out: &mut String, t: &Term, names: &HashMap<Symbol, usize>) {
    match t {
        Term::Const(z) => write!(out, "{z}").unwrap(),
        Term::Sym(s) => out.push_str(&sym_name(names, *s)),
        Term::Add(a, b) | Term::Sub(a, b) | Term::Div(a, b) => {
            let op = match t {
                Term::Add(..) => "+",
                Term::Sub(..) => "-",
                _ => "/",
            };
            write!(out, "({op} ").unwrap();
            write_term(out, a, names);
            out.push(' ');
            write_term(out, b, names);
            out.push(')');
        }
    }
}

fn write_prop(out: &mut String, p: &Prop, names: &HashMap<Symbol, usize>) {
    match p {
        Prop::TT => out.push_str("true"),
        Prop::FF => out.push_str("false"),
        Prop::Cmp(rel, a, b) => {
            write!(out, "({} ", rel.ascii()).unwrap();
            write_term(out, a, names);
            out.push(' ');
            write_term(out, b, names);
            out.push(')');
        }
        Prop::Not(p) => {
            out.push_str("(not ");
            write_prop(out, p, names);
            out.push(')');
        }
        Prop::And(a, b) | Prop::Or(a, b) => {
            out.push_str(if matches!(p, Prop::And(..)) { "(and " } else { "(or " });
            write_prop(out, a, names);
            out.push(' ');
            write_prop(out, b, names);
            out.push(')');
        }
    }
}

fn write_sep(out: &mut String, s: &Sep, names: &mut HashMap<Symbol, usize>) {
    match s {
        Sep::True => out.push_str("top"),
        Sep::False(_) => out.push_str("bot"),
        Sep::Holds(p, _) => {
            out.push_str("(holds ");
            write_prop(out, p, names);
            out.push(')');
        }
        Sep::And(a, b) => {
            out.push_str("(conj ");
            write_sep(out, a, names);
            out.push(' ');
            write_sep(out, b, names);
            out.push(')');
        }
        Sep::Implies(p, rest) => {
            out.push_str("(imp ");
            write_prop(out, p, names);
            out.push(' ');
            write_sep(out, rest, names);
            out.push(')');
        }
        Sep::Forall(sym, rest) => {
            let n = bind(names, *sym);
            write!(out, "(forall {n} ").unwrap();
            write_sep(out, rest, names);
            out.push(')');
        }
    }
}

fn pretty_term(t: &Term, names: &HashMap<Symbol, usize>, nested: bool) -> String {
    match t {
        Term::Const(MIN_SIGNED) => "min_signed".into(),
        Term::Const(MAX_SIGNED) => "max_signed".into(),
        Term::Const(z) => z.to_string(),
        Term::Sym(s) => sym_name(names, *s),
        Term::Add(a, b) | Term::Sub(a, b) | Term::Div(a, b) => {
            let op = match t {
                Term::Add(..) => "+",
                Term::Sub(..) => "-",
                _ => "÷",
            };
            let text = format!(
                "{} {op} {}",
                pretty_term(a, names, !matches!(t, Term::Div(..)) && matches!(**a, Term::Div(..))),
                pretty_term(b, names, true)
            );
            if nested {
                format!("({text})")
            } else {
                text
            }
        }
    }
}

pub fn pretty_prop(p: &Prop, names: &HashMap<Symbol, usize>) -> String {
    fn go(p: &Prop, names: &HashMap<Symbol, usize>, nested: bool) -> String {
        let text = match p {
            Prop::TT => return "True".into(),
            Prop::FF => return "False".into(),
            Prop::Cmp(rel, a, b) => {
                return format!(
                    "{} {} {}",
                    pretty_term(a, names, false),
                    rel.pretty(),
                    pretty_term(b, names, false)
                )
            }
            Prop::Not(q) => return format!("¬({})", go(q, names, false)),
            Prop::And(a, b) => format!("{} ∧ {}", go(a, names, true), go(b, names, true)),
            Prop::Or(a, b) => format!("{} ∨ {}", go(a, names, true), go(b, names, true)),
        };
        if nested {
            format!("({text})")
        } else {
            text
        }
    }
    go(p, names, false)
}

fn pretty_sep(out: &mut String, s: &Sep, names: &mut HashMap<Symbol, usize>, indent: usize) {
    let pad = " ".repeat(indent);
    match s {
        Sep::True => out.push_str("True"),
        Sep::False(_) => out.push_str("False"),
        Sep::Holds(p, _) => out.push_str(&pretty_prop(p, names)),
        Sep::And(a, b) => {
            let wrap = |s: &Sep| matches!(s, Sep::Implies(..) | Sep::Forall(..));
            if wrap(a) {
                out.push('(');
                pretty_sep(out, a, names, indent + 1);
                out.push(')');
            } else {
                pretty_sep(out, a, names, indent);
            }
            write!(out, " ∧\n{pad}").unwrap();
            if wrap(b) {
                out.push('(');
                pretty_sep(out, b, names, indent + 1);
                out.push(')');
            } else {
                pretty_sep(out, b, names, indent);
            }
        }
        Sep::Implies(p, rest) => {
            let hyp = pretty_prop(p, names);
            if matches!(p, Prop::And(..) | Prop::Or(..)) {
                write!(out, "({hyp}) →\n{pad}  ").unwrap();
            } else {
                write!(out, "{hyp} →\n{pad}  ").unwrap();
            }
            pretty_sep(out, rest, names, indent + 2);
        }
        Sep::Forall(sym, rest) => {
            let n = bind(names, *sym);
            write!(out, "∀ {n}: Z,\n{pad}  ").unwrap();
            pretty_sep(out, rest, names, indent + 2);
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_term(self, &HashMap::new(), false))
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_prop(self, &HashMap::new()))
    }
}

// -- construction -----------------------------------------------------------

pub type SymStore = Store<Term>;

/// Fresh-symbol supply. Symbols strictly increase.
#[derive(Debug, Default)]
pub struct Builder {
    next: Symbol,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> Symbol {
        let s = self.next;
        self.next += 1;
        s
    }

    pub fn symbols_used(&self) -> u32 {
        self.next
    }
}

pub type KStore<'a> = dyn Fn(&mut Builder, &SymStore) -> Sep + 'a;
pub type KTerm<'a> = dyn Fn(&mut Builder, Term, &SymStore) -> Sep + 'a;
pub type KProp<'a> = dyn Fn(&mut Builder, Prop, &SymStore) -> Sep + 'a;

/// Evaluates an integer expression, emitting the side conditions that rule
/// out overflow and invalid division.
pub fn eval_z(b: &mut Builder, e: &Expr, store: &SymStore, site: &Site, k: &KTerm<'_>) -> Sep {
    match e {
        Expr::Int(z) => {
            if is_int(*z as i128) {
                k(b, Term::Const(*z), store)
            } else {
                Sep::fail(FailureCause::LiteralOutOfRange(*z), site)
            }
        }
        Expr::Var(x) => match store.get(x.as_str()) {
            Some(t) => k(b, t.clone(), store),
            None => Sep::fail(FailureCause::UnboundVariable(x.clone()), site),
        },
        Expr::Binary(op @ (BinOp::Add | BinOp::Sub | BinOp::Div), l, r) => {
            let op = *op;
            eval_z(b, l, store, site, &|b, tl, store| {
                eval_z(b, r, store, site, &|b, tr, store| match op {
                    BinOp::Div => {
                        let nonzero =
                            Prop::cmp(Rel::Ne, tr.clone(), Term::Const(0));
                        let no_overflow = Prop::or(
                            Prop::cmp(Rel::Ne, tl.clone(), Term::Const(MIN_SIGNED)),
                            Prop::cmp(Rel::Ne, tr.clone(), Term::Const(-1)),
                        );
                        Sep::and(
                            Sep::holds(nonzero, ObligationKind::DivisorNonZero, site),
                            Sep::and(
                                Sep::holds(no_overflow, ObligationKind::DivisionOverflow, site),
                                k(b, Term::div(tl.clone(), tr), store),
                            ),
                        )
                    }
                    _ => {
                        let t = if op == BinOp::Add {
                            Term::add(tl.clone(), tr)
                        } else {
                            Term::sub(tl.clone(), tr)
                        };
                        Sep::and(
                            Sep::holds(
                                Prop::cmp(Rel::Le, Term::Const(MIN_SIGNED), t.clone()),
                                ObligationKind::LowerBound,
                                site,
                            ),
                            Sep::and(
                                Sep::holds(
                                    Prop::cmp(Rel::Le, t.clone(), Term::Const(MAX_SIGNED)),
                                    ObligationKind::UpperBound,
                                    site,
                                ),
                                k(b, t, store),
                            ),
                        )
                    }
                })
            })
        }
        _ => Sep::fail(FailureCause::NotArithmetic, site),
    }
}

fn comparison(op: BinOp) -> Option<Rel> {
    match op {
        BinOp::Lt => Some(Rel::Lt),
        BinOp::Le => Some(Rel::Le),
        BinOp::Eq => Some(Rel::Eq),
        BinOp::Ne => Some(Rel::Ne),
        _ => None,
    }
}

/// Evaluates a boolean expression; comparisons carry the side conditions of
/// their operands.
pub fn eval_prop(b: &mut Builder, e: &Expr, store: &SymStore, site: &Site, k: &KProp<'_>) -> Sep {
    match e {
        Expr::True => k(b, Prop::TT, store),
        Expr::False => k(b, Prop::FF, store),
        Expr::Binary(op, l, r) if op.is_comparison() => {
            let rel = comparison(*op).unwrap();
            eval_z(b, l, store, site, &|b, tl, store| {
                eval_z(b, r, store, site, &|b, tr, store| {
                    k(b, Prop::cmp(rel, tl.clone(), tr), store)
                })
            })
        }
        Expr::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
            let op = *op;
            eval_prop(b, l, store, site, &|b, pl, store| {
                eval_prop(b, r, store, site, &|b, pr, store| {
                    let p = if op == BinOp::And {
                        Prop::and(pl.clone(), pr)
                    } else {
                        Prop::or(pl.clone(), pr)
                    };
                    k(b, p, store)
                })
            })
        }
        Expr::Not(inner) => eval_prop(b, inner, store, site, &|b, p, store| {
            k(b, Prop::not(p), store)
        }),
        _ => Sep::fail(FailureCause::NotBoolean, site),
    }
}

/// Side-condition-free translation of an integer expression.
pub fn translate_z(e: &Expr, store: &SymStore) -> Result<Term, FailureCause> {
    match e {
        Expr::Int(z) => Ok(Term::Const(*z)),
        Expr::Var(x) => store
            .get(x.as_str())
            .cloned()
            .ok_or_else(|| FailureCause::UnboundVariable(x.clone())),
        Expr::Binary(BinOp::Add, l, r) => Ok(Term::add(translate_z(l, store)?, translate_z(r, store)?)),
        Expr::Binary(BinOp::Sub, l, r) => Ok(Term::sub(translate_z(l, store)?, translate_z(r, store)?)),
        Expr::Binary(BinOp::Div, l, r) => Ok(Term::div(translate_z(l, store)?, translate_z(r, store)?)),
        _ => Err(FailureCause::NotArithmetic),
    }
}

/// Side-condition-free translation of a boolean expression.
pub fn translate_bool(e: &Expr, store: &SymStore) -> Result<Prop, FailureCause> {
    match e {
        Expr::True => Ok(Prop::TT),
        Expr::False => Ok(Prop::FF),
        Expr::Binary(op, l, r) if op.is_comparison() => {
            let rel = comparison(*op).unwrap();
            Ok(Prop::cmp(rel, translate_z(l, store)?, translate_z(r, store)?))
        }
        Expr::Binary(BinOp::And, l, r) => {
            Ok(Prop::and(translate_bool(l, store)?, translate_bool(r, store)?))
        }
        Expr::Binary(BinOp::Or, l, r) => {
            Ok(Prop::or(translate_bool(l, store)?, translate_bool(r, store)?))
        }
        Expr::Not(p) => Ok(Prop::not(translate_bool(p, store)?)),
        _ => Err(FailureCause::NotBoolean),
    }
}

pub fn translate_prop(
    b: &mut Builder,
    e: &Expr,
    store: &SymStore,
    site: &Site,
    k: &dyn Fn(&mut Builder, Prop) -> Sep,
) -> Sep {
    match translate_bool(e, store) {
        Ok(p) => k(b, p),
        Err(cause) => Sep::fail(cause, site),
    }
}

/// Assumes `e`.
pub fn produce(b: &mut Builder, e: &Expr, store: &SymStore, site: &Site, k: &KStore<'_>) -> Sep {
    translate_prop(b, e, store, site, &|b, p| Sep::implies(p, k(b, store)))
}

/// Asserts `e`.
pub fn consume(
    b: &mut Builder,
    e: &Expr,
    store: &SymStore,
    kind: ObligationKind,
    site: &Site,
    k: &KStore<'_>,
) -> Sep {
    translate_prop(b, e, store, site, &|b, p| {
        Sep::and(Sep::holds(p, kind, site), k(b, store))
    })
}

/// Binds each name to a fresh bounded symbol, quantifying over it.
pub fn for_zs(b: &mut Builder, names: &[Ident], store: &SymStore, k: &KStore<'_>) -> Sep {
    match names.split_first() {
        None => k(b, store),
        Some((x, rest)) => {
            let s = b.fresh();
            let store = store.with(x, Term::Sym(s));
            let inner = for_zs(b, rest, &store, k);
            Sep::Forall(s, Box::new(Sep::implies(Prop::bounds(s), inner)))
        }
    }
}

/// Like [`for_zs`], but every name must already be bound.
pub fn havoc_zs(
    b: &mut Builder,
    names: &[Ident],
    store: &SymStore,
    site: &Site,
    k: &KStore<'_>,
) -> Sep {
    if let Some(x) = names.iter().find(|x| !store.is_bound(x.as_str())) {
        return Sep::fail(FailureCause::HavocUnbound(x.clone()), site);
    }
    for_zs(b, names, store, k)
}

/// The end-of-scope resource check; trivial without a heap.
pub fn leak_check(_: &mut Builder, _: &SymStore) -> Sep {
    Sep::True
}

pub fn sym_exec_stmt(
    b: &mut Builder,
    s: &Stmt,
    path: &StmtPath,
    store: &SymStore,
    kn: &KStore<'_>,
    kr: &KTerm<'_>,
) -> Sep {
    let site = Site::Stmt(path.clone());
    match s {
        Stmt::Skip => kn(b, store),
        Stmt::Seq(s1, s2) => {
            let p2 = path.child(1);
            sym_exec_stmt(
                b,
                s1,
                &path.child(0),
                store,
                &|b, store| sym_exec_stmt(b, s2, &p2, store, kn, kr),
                kr,
            )
        }
        Stmt::Return(e) => eval_z(b, e, store, &site, kr),
        Stmt::Block(inner) => sym_exec_stmt(b, inner, &path.child(0), store, kn, kr),
        Stmt::Let(x, init, body) => {
            if store.is_bound(x.as_str()) {
                return Sep::fail(FailureCause::Shadowing(x.clone()), &site);
            }
            let p0 = path.child(0);
            eval_z(b, init, store, &site, &|b, t, store| {
                sym_exec_stmt(
                    b,
                    body,
                    &p0,
                    &store.with(x, t),
                    &|b, store| kn(b, &store.without(x)),
                    &|b, t, store| kr(b, t, &store.without(x)),
                )
            })
        }
        Stmt::Expr(Expr::Assign(x, rhs)) => {
            eval_z(b, rhs, store, &site, &|b, t, store| kn(b, &store.with(x, t)))
        }
        Stmt::Expr(_) => Sep::fail(FailureCause::UnsupportedStatement, &site),
        Stmt::If(c, s1, s2) => {
            let (p0, p1) = (path.child(0), path.child(1));
            eval_prop(b, c, store, &site, &|b, p, store| {
                let then_s = sym_exec_stmt(b, s1, &p0, store, kn, kr);
                let else_s = sym_exec_stmt(b, s2, &p1, store, kn, kr);
                Sep::and(Sep::implies(p.clone(), then_s), Sep::implies(Prop::not(p), else_s))
            })
        }
        Stmt::While {
            cond,
            invariant,
            body,
        } => {
            let targets = free_targets(body);
            let p0 = path.child(0);
            consume(b, invariant, store, ObligationKind::InvariantOnEntry, &site, &|b, store| {
                havoc_zs(b, &targets, store, &site, &|b, store| {
                    produce(b, invariant, store, &site, &|b, store| {
                        eval_prop(b, cond, store, &site, &|b, pc, store| {
                            let again = sym_exec_stmt(
                                b,
                                body,
                                &p0,
                                store,
                                &|b, store| {
                                    consume(
                                        b,
                                        invariant,
                                        store,
                                        ObligationKind::InvariantPreserved,
                                        &site,
                                        &leak_check,
                                    )
                                },
                                kr,
                            );
                            let exit = kn(b, store);
                            Sep::and(
                                Sep::implies(pc.clone(), again),
                                Sep::implies(Prop::not(pc), exit),
                            )
                        })
                    })
                })
            })
        }
    }
}

/// Return continuation: drops the store reached at the `return` and checks
/// `k` in the entry store extended with `result`.
pub fn ret<'a>(entry: &'a SymStore, k: &'a KStore<'a>) -> impl Fn(&mut Builder, Term, &SymStore) -> Sep + 'a {
    move |b, t, _| k(b, &entry.with(&Ident::new(RESULT).unwrap(), t))
}

/// The verification formula of a whole function.
pub fn sym_exec_func(f: &Func) -> Sep {
    let mut b = Builder::new();
    sym_exec_func_with(&mut b, f)
}

pub fn sym_exec_func_with(b: &mut Builder, f: &Func) -> Sep {
    for_zs(b, &f.args, &Store::new(), &|b, store| {
        produce(b, &f.pre, store, &Site::Pre, &|b, entry| {
            let post = |b: &mut Builder, store: &SymStore| {
                consume(b, &f.post, store, ObligationKind::Postcondition, &Site::Post, &leak_check)
            };
            let kr = ret(entry, &post);
            sym_exec_stmt(
                b,
                &f.body,
                &StmtPath::root(),
                entry,
                &|_, _| Sep::fail(FailureCause::FellOffEnd, &Site::Stmt(StmtPath::root())),
                &kr,
            )
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use vfx_lang::ast::{countdown, ident};

    fn root() -> Site {
        Site::Stmt(StmtPath::root())
    }

    fn done(_: &mut Builder, t: Term, _: &SymStore) -> Sep {
        Sep::Holds(
            Prop::cmp(Rel::Eq, t, t_zero()),
            Obligation {
                kind: ObligationKind::Postcondition,
                site: Site::Post,
            },
        )
    }

    fn t_zero() -> Term {
        Term::Const(0)
    }

    fn sym_store(pairs: &[(&str, Term)]) -> SymStore {
        pairs.iter().map(|(x, t)| (ident(x), t.clone())).collect()
    }

    #[test]
    fn literal_in_range_passes_straight_through() {
        let mut b = Builder::new();
        let sep = eval_z(&mut b, &Expr::int(32767), &Store::new(), &root(), &done);
        assert_eq!(sep.canonical(), "(holds (= 32767 0))");
    }

    #[test]
    fn literal_out_of_range_fails() {
        let mut b = Builder::new();
        let sep = eval_z(&mut b, &Expr::int(5_000_000_000), &Store::new(), &root(), &done);
        assert!(matches!(
            sep,
            Sep::False(Failure {
                cause: FailureCause::LiteralOutOfRange(_),
                ..
            })
        ));
    }

    #[test]
    fn subtraction_emits_lower_then_upper_bound() {
        let mut b = Builder::new();
        let st = sym_store(&[("x", Term::Sym(0))]);
        let e = Expr::sub(Expr::var("x"), Expr::int(1));
        let sep = eval_z(&mut b, &e, &st, &root(), &done);
        let Sep::And(lo, rest) = &sep else { panic!() };
        let Sep::And(hi, _) = &**rest else { panic!() };
        assert!(matches!(&**lo, Sep::Holds(_, o) if o.kind == ObligationKind::LowerBound));
        assert!(matches!(&**hi, Sep::Holds(_, o) if o.kind == ObligationKind::UpperBound));
        assert_eq!(
            sep.canonical(),
            "(conj (holds (<= -2147483648 (- ?0 1))) (conj (holds (<= (- ?0 1) 2147483647)) (holds (= (- ?0 1) 0))))"
        );
    }

    #[test]
    fn division_emits_zero_and_overflow_checks() {
        let mut b = Builder::new();
        let e = Expr::div(Expr::int(4), Expr::int(2));
        let sep = eval_z(&mut b, &e, &Store::new(), &root(), &done);
        assert_eq!(
            sep.canonical(),
            "(conj (holds (!= 2 0)) (conj (holds (or (!= 4 -2147483648) (!= 2 -1))) (holds (= (/ 4 2) 0))))"
        );
    }

    #[test]
    fn eval_prop_examples() {
        let mut b = Builder::new();
        let st = sym_store(&[("x", Term::Sym(0))]);
        let k = |_: &mut Builder, p: Prop, _: &SymStore| Sep::implies(p, Sep::True);
        let sep = eval_prop(&mut b, &Expr::lt(Expr::int(0), Expr::var("x")), &st, &root(), &k);
        assert_eq!(sep.canonical(), "(imp (< 0 ?0) top)");
        let sep = eval_prop(&mut b, &Expr::True, &st, &root(), &k);
        assert_eq!(sep.canonical(), "(imp true top)");
        let sep = eval_prop(
            &mut b,
            &Expr::not(Expr::le(Expr::var("x"), Expr::int(0))),
            &st,
            &root(),
            &k,
        );
        assert_eq!(sep, Sep::implies(Prop::not(Prop::cmp(Rel::Le, Term::Sym(0), t_zero())), Sep::True));
        assert!(matches!(
            eval_prop(&mut b, &Expr::int(1), &st, &root(), &k),
            Sep::False(_)
        ));
    }

    #[test]
    fn translate_has_no_side_conditions() {
        let mut b = Builder::new();
        let e = Expr::eq(Expr::div(Expr::var("a"), Expr::int(0)), Expr::int(1));
        let st = sym_store(&[("a", Term::Sym(3))]);
        let sep = translate_prop(&mut b, &e, &st, &Site::Pre, &|_, p| Sep::implies(p, Sep::True));
        assert_eq!(sep.canonical(), "(imp (= (/ ?3 0) 1) top)");
        let st = sym_store(&[("x", Term::Const(32767))]);
        let sep = translate_prop(
            &mut b,
            &Expr::le(Expr::int(0), Expr::var("x")),
            &st,
            &Site::Pre,
            &|_, p| Sep::implies(p, Sep::True),
        );
        assert_eq!(sep.canonical(), "(imp (<= 0 32767) top)");
    }

    #[test]
    fn produce_and_consume() {
        let mut b = Builder::new();
        let st = sym_store(&[("x", Term::Const(32767))]);
        let inv = Expr::le(Expr::int(0), Expr::var("x"));
        let c = consume(&mut b, &inv, &st, ObligationKind::InvariantOnEntry, &root(), &leak_check);
        assert_eq!(c.canonical(), "(conj (holds (<= 0 32767)) top)");
        let p = produce(&mut b, &Expr::True, &st, &Site::Pre, &leak_check);
        assert_eq!(p.canonical(), "(imp true top)");
    }

    #[test]
    fn for_zs_and_havoc() {
        let mut b = Builder::new();
        let sep = for_zs(&mut b, &[ident("x")], &Store::new(), &|_, st| {
            assert_eq!(st.get("x"), Some(&Term::Sym(0)));
            Sep::True
        });
        assert_eq!(
            sep.canonical(),
            "(forall s0 (imp (and (<= -2147483648 s0) (<= s0 2147483647)) top))"
        );
        let st = sym_store(&[("x", Term::Const(32767))]);
        let h = havoc_zs(&mut b, &[ident("x")], &st, &root(), &leak_check);
        assert_eq!(h.canonical(), sep.canonical());
        let bad = havoc_zs(&mut b, &[ident("y")], &Store::new(), &root(), &leak_check);
        assert!(matches!(bad, Sep::False(_)));
    }

    #[test]
    fn ret_discards_the_current_store() {
        let mut b = Builder::new();
        let k = |_: &mut Builder, st: &SymStore| {
            assert_eq!(st.len(), 1);
            assert_eq!(st.get(RESULT), Some(&Term::Const(0)));
            Sep::True
        };
        let entry = Store::new();
        let r = ret(&entry, &k);
        let st = sym_store(&[("x", Term::Const(5))]);
        assert_eq!(r(&mut b, Term::Const(0), &st), Sep::True);
    }

    #[test]
    fn countdown_sep_matches_the_worked_example() {
        let sep = sym_exec_func(&countdown());
        let bounds = "(and (<= -2147483648 s0) (<= s0 2147483647))";
        let expected = format!(
            "(imp true (conj (holds (<= 0 32767)) (forall s0 (imp {bounds} (imp (<= 0 s0) (conj \
             (imp (< 0 s0) (conj (holds (<= -2147483648 (- s0 1))) (conj (holds (<= (- s0 1) 2147483647)) (conj (holds (<= 0 (- s0 1))) top)))) \
             (imp (not (< 0 s0)) (conj (holds (= s0 0)) top))))))))"
        );
        assert_eq!(sep.canonical(), expected);
        assert!(sep.free_symbols().is_empty());
        assert_eq!(sep.shape().leaves, 7);
    }

    #[test]
    fn return_constant_and_missing_return() {
        let f = Func::new(
            vec![],
            Expr::True,
            Stmt::seq(Stmt::ret(Expr::int(0)), Stmt::Skip),
            Expr::eq(Expr::var(RESULT), Expr::int(0)),
        );
        assert_eq!(sym_exec_func(&f).canonical(), "(imp true (conj (holds (= 0 0)) top))");
        let g = Func::new(vec![], Expr::True, Stmt::Skip, Expr::False);
        let sep = sym_exec_func(&g);
        assert_eq!(sep.canonical(), "(imp true bot)");
        assert!(matches!(
            sep,
            Sep::Implies(_, ref s) if matches!(**s, Sep::False(Failure { cause: FailureCause::FellOffEnd, .. }))
        ));
    }

    #[test]
    fn let_shadowing_fails() {
        let f = Func::new(
            vec![ident("a")],
            Expr::True,
            Stmt::let_("a", Expr::int(1), Stmt::ret(Expr::var("a"))),
            Expr::True,
        );
        let sep = sym_exec_func(&f);
        assert!(sep
            .leaves()
            .iter()
            .any(|l| matches!(l, Sep::False(Failure { cause: FailureCause::Shadowing(_), .. }))));
    }

    #[test]
    fn construction_is_deterministic() {
        let f = countdown();
        assert_eq!(sym_exec_func(&f), sym_exec_func(&f));
    }

    #[test]
    fn pretty_uses_named_bounds() {
        let text = sym_exec_func(&countdown()).pretty();
        assert!(text.contains("min_signed ≤ s0 - 1"), "{text}");
        assert!(text.contains("¬(0 < s0)"), "{text}");
    }
}
