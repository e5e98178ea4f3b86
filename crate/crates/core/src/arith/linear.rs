//! Linear forms over integer variables with overflow-checked arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::symexec::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Sym(Symbol),
    /// Introduced while eliminating divisions.
    Aux(u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Sym(s) => write!(f, "s{s}"),
            Var::Aux(a) => write!(f, "q{a}"),
        }
    }
}

/// Arithmetic left the i128 range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

/// `Σ coeffs[v]·v + constant`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Lin {
    pub coeffs: BTreeMap<Var, i128>,
    pub constant: i128,
}

impl Lin {
    pub fn constant(k: i128) -> Lin {
        Lin {
            coeffs: BTreeMap::new(),
            constant: k,
        }
    }

    pub fn var(v: Var) -> Lin {
        Lin {
            coeffs: BTreeMap::from([(v, 1)]),
            constant: 0,
        }
    }

    pub fn as_constant(&self) -> Option<i128> {
        self.coeffs.is_empty().then_some(self.constant)
    }

    pub fn coeff(&self, v: Var) -> i128 {
        self.coeffs.get(&v).copied().unwrap_or(0)
    }

    /// `self + k·other`.
    pub fn add_scaled(&self, k: i128, other: &Lin) -> Result<Lin, Overflow> {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            let add = c.checked_mul(k).ok_or(Overflow)?;
            let entry = out.coeffs.entry(*v).or_insert(0);
            *entry = entry.checked_add(add).ok_or(Overflow)?;
            if *entry == 0 {
                out.coeffs.remove(v);
            }
        }
        out.constant = other
            .constant
            .checked_mul(k)
            .and_then(|c| c.checked_add(out.constant))
            .ok_or(Overflow)?;
        Ok(out)
    }

    pub fn add(&self, other: &Lin) -> Result<Lin, Overflow> {
        self.add_scaled(1, other)
    }

    pub fn sub(&self, other: &Lin) -> Result<Lin, Overflow> {
        self.add_scaled(-1, other)
    }

    pub fn scale(&self, k: i128) -> Result<Lin, Overflow> {
        Lin::default().add_scaled(k, self)
    }

    pub fn plus(&self, k: i128) -> Result<Lin, Overflow> {
        let mut out = self.clone();
        out.constant = out.constant.checked_add(k).ok_or(Overflow)?;
        Ok(out)
    }

    /// Replaces `v` by `def`.
    pub fn substitute(&self, v: Var, def: &Lin) -> Result<Lin, Overflow> {
        let c = self.coeff(v);
        if c == 0 {
            return Ok(self.clone());
        }
        let mut base = self.clone();
        base.coeffs.remove(&v);
        base.add_scaled(c, def)
    }

    pub fn eval(&self, model: &impl Fn(Var) -> i128) -> Result<i128, Overflow> {
        let mut acc = self.constant;
        for (v, c) in &self.coeffs {
            let term = c.checked_mul(model(*v)).ok_or(Overflow)?;
            acc = acc.checked_add(term).ok_or(Overflow)?;
        }
        Ok(acc)
    }

    fn coeff_gcd(&self) -> i128 {
        self.coeffs.values().fold(0i128, |g, c| g.gcd(c))
    }
}

impl fmt::Display for Lin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if first {
                if *c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag != 1 {
                write!(f, "{mag}·")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant != 0 {
            let sign = if self.constant < 0 { "-" } else { "+" };
            write!(f, " {sign} {}", self.constant.abs())
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    /// `lin ≤ 0`
    Le,
    /// `lin = 0`
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub lin: Lin,
    pub rel: Relation,
}

/// Result of normalizing a constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normal {
    Valid,
    Infeasible,
    Constraint(Constraint),
}

impl Constraint {
    pub fn le(lin: Lin) -> Constraint {
        Constraint {
            lin,
            rel: Relation::Le,
        }
    }

    pub fn eq(lin: Lin) -> Constraint {
        Constraint {
            lin,
            rel: Relation::Eq,
        }
    }

    /// Divides through by the coefficient gcd. For `≤` the constant is
    /// rounded up, which is exact over the integers; an equality whose
    /// constant is not a multiple of the gcd has no integer solution.
    pub fn normalize(self) -> Normal {
        let g = self.lin.coeff_gcd();
        if g == 0 {
            let k = self.lin.constant;
            let ok = match self.rel {
                Relation::Le => k <= 0,
                Relation::Eq => k == 0,
            };
            return if ok { Normal::Valid } else { Normal::Infeasible };
        }
        let k = self.lin.constant;
        let constant = match self.rel {
            Relation::Le => Integer::div_ceil(&k, &g),
            Relation::Eq => {
                if k % g != 0 {
                    return Normal::Infeasible;
                }
                k / g
            }
        };
        let coeffs = self.lin.coeffs.into_iter().map(|(v, c)| (v, c / g)).collect();
        Normal::Constraint(Constraint {
            lin: Lin { coeffs, constant },
            rel: self.rel,
        })
    }

    pub fn holds(&self, model: &impl Fn(Var) -> i128) -> Result<bool, Overflow> {
        let v = self.lin.eval(model)?;
        Ok(match self.rel {
            Relation::Le => v <= 0,
            Relation::Eq => v == 0,
        })
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rel {
            Relation::Le => write!(f, "{} ≤ 0", self.lin),
            Relation::Eq => write!(f, "{} = 0", self.lin),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: u32) -> Lin {
        Lin::var(Var::Sym(i))
    }

    #[test]
    fn arithmetic_cancels_zero_coefficients() {
        let a = s(0).plus(3).unwrap();
        let d = a.sub(&s(0)).unwrap();
        assert_eq!(d.as_constant(), Some(3));
    }

    #[test]
    fn gcd_tightening_rounds_up() {
        // 2x + 1 ≤ 0  ⇒  x + 1 ≤ 0 over the integers
        let c = Constraint::le(s(0).scale(2).unwrap().plus(1).unwrap());
        let Normal::Constraint(n) = c.normalize() else { panic!() };
        assert_eq!(n.lin, s(0).plus(1).unwrap());
    }

    #[test]
    fn parity_equality_is_infeasible() {
        // 2s - 1 = 0
        let c = Constraint::eq(s(0).scale(2).unwrap().plus(-1).unwrap());
        assert_eq!(c.normalize(), Normal::Infeasible);
    }

    #[test]
    fn constant_constraints_decide_immediately() {
        assert_eq!(Constraint::le(Lin::constant(-1)).normalize(), Normal::Valid);
        assert_eq!(Constraint::le(Lin::constant(1)).normalize(), Normal::Infeasible);
    }

    #[test]
    fn overflow_is_reported() {
        let big = Lin::constant(i128::MAX);
        assert_eq!(big.plus(1), Err(Overflow));
    }

    #[test]
    fn display() {
        let l = s(0).scale(-2).unwrap().add(&s(1)).unwrap().plus(-4).unwrap();
        assert_eq!(l.to_string(), "-2·s0 + s1 - 4");
    }
}
