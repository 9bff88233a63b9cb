//! TPTL formulas with MTL/SMTL interval-annotated Until as first-class
//! sugar, plus the structural transformations the checkers rely on:
//! desugaring to pure TPTL, negation normal form, and the size metrics
//! that drive engine selection.

mod parse;

pub use parse::{parse, parse_trusted, FormulaError};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// Comparison relation of a register constraint `x ~ c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn eval(self, lhs: &BigInt, rhs: &BigInt) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        })
    }
}

/// One end of a constraint interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bound {
    /// `-inf` for lower ends, `inf` for upper ends.
    Unbounded,
    Incl(BigInt),
    Excl(BigInt),
}

/// An interval over the integers with open or closed ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn closed(lo: i64, hi: i64) -> Self {
        Interval {
            lo: Bound::Incl(BigInt::from(lo)),
            hi: Bound::Incl(BigInt::from(hi)),
        }
    }

    pub fn singleton(v: BigInt) -> Self {
        Interval {
            lo: Bound::Incl(v.clone()),
            hi: Bound::Incl(v),
        }
    }

    /// The smallest integer contained, if bounded below.
    fn lo_int(&self) -> Option<BigInt> {
        match &self.lo {
            Bound::Unbounded => None,
            Bound::Incl(v) => Some(v.clone()),
            Bound::Excl(v) => Some(v + BigInt::one()),
        }
    }

    /// The largest integer contained, if bounded above.
    fn hi_int(&self) -> Option<BigInt> {
        match &self.hi {
            Bound::Unbounded => None,
            Bound::Incl(v) => Some(v.clone()),
            Bound::Excl(v) => Some(v - BigInt::one()),
        }
    }

    pub fn is_empty(&self) -> bool {
        match (self.lo_int(), self.hi_int()) {
            (Some(lo), Some(hi)) => lo > hi,
            _ => false,
        }
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        let lo_ok = match &self.lo {
            Bound::Unbounded => true,
            Bound::Incl(b) => v >= b,
            Bound::Excl(b) => v > b,
        };
        let hi_ok = match &self.hi {
            Bound::Unbounded => true,
            Bound::Incl(b) => v <= b,
            Bound::Excl(b) => v < b,
        };
        lo_ok && hi_ok
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lo {
            Bound::Unbounded => write!(f, "(-inf,")?,
            Bound::Incl(v) => write!(f, "[{v},")?,
            Bound::Excl(v) => write!(f, "({v},")?,
        }
        match &self.hi {
            Bound::Unbounded => write!(f, "inf)"),
            Bound::Incl(v) => write!(f, "{v}]"),
            Bound::Excl(v) => write!(f, "{v})"),
        }
    }
}

/// A nonempty finite union of nonempty intervals, annotating an Until.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntervalUnion(pub Vec<Interval>);

impl IntervalUnion {
    pub fn contains(&self, v: &BigInt) -> bool {
        self.0.iter().any(|i| i.contains(v))
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "(")?;
            for (n, i) in self.0.iter().enumerate() {
                if n > 0 {
                    write!(f, "|")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, ")")
        }
    }
}

/// A TPTL formula. `F`, `G`, `X`, `->` and `false` are expanded by the
/// parser; `UntilAnnotated` carries the MTL/SMTL interval constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Prop(String),
    Constraint(String, Rel, BigInt),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Freeze(String, Box<Formula>),
    UntilAnnotated(Box<Formula>, IntervalUnion, Box<Formula>),
}

impl Formula {
    pub fn ff() -> Formula {
        Formula::Not(Box::new(Formula::True))
    }

    pub fn prop(p: &str) -> Formula {
        Formula::Prop(p.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Formula {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn freeze(x: &str, f: Formula) -> Formula {
        Formula::Freeze(x.to_string(), Box::new(f))
    }

    pub fn constraint(x: &str, rel: Rel, c: i64) -> Formula {
        Formula::Constraint(x.to_string(), rel, BigInt::from(c))
    }

    /// `F f := true U f`
    pub fn finally(f: Formula) -> Formula {
        Formula::until(Formula::True, f)
    }

    /// `G f := !F !f`
    pub fn globally(f: Formula) -> Formula {
        Formula::not(Formula::finally(Formula::not(f)))
    }

    /// `X f := false U f`
    pub fn next(f: Formula) -> Formula {
        Formula::until(Formula::ff(), f)
    }

    pub fn next_n(n: u64, f: Formula) -> Formula {
        (0..n).fold(f, |acc, _| Formula::next(acc))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn until_in(a: Formula, iv: IntervalUnion, b: Formula) -> Formula {
        Formula::UntilAnnotated(Box::new(a), iv, Box::new(b))
    }

    /// `F_I f := true U_I f`
    pub fn finally_in(iv: IntervalUnion, f: Formula) -> Formula {
        Formula::until_in(Formula::True, iv, f)
    }

    /// `G_I f := !F_I !f`
    pub fn globally_in(iv: IntervalUnion, f: Formula) -> Formula {
        Formula::not(Formula::finally_in(iv, Formula::not(f)))
    }

    /// Folds a disjunction; the empty disjunction is `false`.
    pub fn any<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let items: Vec<Formula> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .reduce(|acc, f| Formula::or(f, acc))
            .unwrap_or_else(Formula::ff)
    }

    /// Folds a conjunction; the empty conjunction is `true`.
    pub fn all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let items: Vec<Formula> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .reduce(|acc, f| Formula::and(f, acc))
            .unwrap_or(Formula::True)
    }

    /// Number of AST nodes; stands in for the symbol count `|f|`.
    pub fn size(&self) -> u64 {
        match self {
            Formula::True | Formula::Prop(_) | Formula::Constraint(..) => 1,
            Formula::Not(a) | Formula::Freeze(_, a) => 1 + a.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b)
            | Formula::UntilAnnotated(a, _, b) => 1 + a.size() + b.size(),
        }
    }

    /// Maximum nesting depth of temporal operators.
    pub fn temporal_depth(&self) -> u64 {
        match self {
            Formula::True | Formula::Prop(_) | Formula::Constraint(..) => 0,
            Formula::Not(a) | Formula::Freeze(_, a) => a.temporal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) => a.temporal_depth().max(b.temporal_depth()),
            Formula::Until(a, b) | Formula::Release(a, b) | Formula::UntilAnnotated(a, _, b) => {
                1 + a.temporal_depth().max(b.temporal_depth())
            }
        }
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::True | Formula::Prop(_) | Formula::Constraint(..) => {}
            Formula::Not(a) | Formula::Freeze(_, a) => a.visit(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b)
            | Formula::UntilAnnotated(a, _, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Largest constraint constant, floored at zero.
    pub fn c_max(&self) -> BigInt {
        let mut c = BigInt::zero();
        self.visit(&mut |f| {
            if let Formula::Constraint(_, _, v) = f {
                if *v > c {
                    c = v.clone();
                }
            }
        });
        c
    }

    /// Largest constraint constant in absolute value.
    pub fn c_abs_max(&self) -> BigInt {
        let mut c = BigInt::zero();
        self.visit(&mut |f| {
            if let Formula::Constraint(_, _, v) = f {
                let m = v.magnitude().clone().into();
                if m > c {
                    c = m;
                }
            }
        });
        c
    }

    /// All register variables used in freezes or constraints.
    pub fn registers(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Constraint(x, _, _) | Formula::Freeze(x, _) => {
                set.insert(x.clone());
            }
            _ => {}
        });
        set
    }

    pub fn register_count(&self) -> usize {
        self.registers().len()
    }

    /// Registers read by constraints without an enclosing freeze.
    pub fn free_registers(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, free: &mut BTreeSet<String>) {
            match f {
                Formula::Constraint(x, _, _) => {
                    if !bound.iter().any(|b| b == x) {
                        free.insert(x.clone());
                    }
                }
                Formula::Freeze(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, free);
                    bound.pop();
                }
                Formula::Not(a) => go(a, bound, free),
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Until(a, b)
                | Formula::Release(a, b)
                | Formula::UntilAnnotated(a, _, b) => {
                    go(a, bound, free);
                    go(b, bound, free);
                }
                Formula::True | Formula::Prop(_) => {}
            }
        }
        let mut free = BTreeSet::new();
        go(self, &mut Vec::new(), &mut free);
        free
    }

    /// Every occurrence of a register variable is under the scope of a
    /// freeze quantifier for it.
    pub fn is_closed(&self) -> bool {
        self.free_registers().is_empty()
    }

    /// All constraints are of the form `x = 0`.
    pub fn is_freeze_ltl(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |f| {
            if let Formula::Constraint(_, rel, c) = f {
                if *rel != Rel::Eq || !c.is_zero() {
                    ok = false;
                }
            }
        });
        ok
    }

    pub fn has_annotations(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if matches!(f, Formula::UntilAnnotated(..)) {
                found = true;
            }
        });
        found
    }

    /// Until rank of an LTL formula: atoms are 0, negation preserves,
    /// conjunction takes the maximum, Until adds one.
    pub fn until_rank(&self) -> Result<u64, FormulaError> {
        match self {
            Formula::True | Formula::Prop(_) => Ok(0),
            Formula::Not(a) => a.until_rank(),
            Formula::And(a, b) | Formula::Or(a, b) => Ok(a.until_rank()?.max(b.until_rank()?)),
            Formula::Until(a, b) | Formula::Release(a, b) => {
                Ok(1 + a.until_rank()?.max(b.until_rank()?))
            }
            Formula::Constraint(..) | Formula::Freeze(..) | Formula::UntilAnnotated(..) => {
                Err(FormulaError::NotLtl)
            }
        }
    }

    /// Rewrites every annotated Until into a freeze over a fresh register:
    /// `a U_I b` becomes `z.(a U ((z in I) & b))` where the membership test
    /// is a disjunction over the union's intervals, each a conjunction of
    /// the two bound constraints. Fresh registers use the reserved `$u`
    /// prefix. The result is polynomial in the input size.
    pub fn desugar(&self) -> Formula {
        let mut counter = 0u64;
        self.desugar_with(&mut counter)
    }

    fn desugar_with(&self, counter: &mut u64) -> Formula {
        match self {
            Formula::True | Formula::Prop(_) | Formula::Constraint(..) => self.clone(),
            Formula::Not(a) => Formula::not(a.desugar_with(counter)),
            Formula::And(a, b) => Formula::and(a.desugar_with(counter), b.desugar_with(counter)),
            Formula::Or(a, b) => Formula::or(a.desugar_with(counter), b.desugar_with(counter)),
            Formula::Until(a, b) => {
                Formula::until(a.desugar_with(counter), b.desugar_with(counter))
            }
            Formula::Release(a, b) => {
                Formula::release(a.desugar_with(counter), b.desugar_with(counter))
            }
            Formula::Freeze(x, a) => Formula::Freeze(x.clone(), Box::new(a.desugar_with(counter))),
            Formula::UntilAnnotated(a, iv, b) => {
                let z = format!("$u{counter}");
                *counter += 1;
                let membership = Formula::any(iv.0.iter().map(|i| interval_membership(&z, i)));
                let body = Formula::until(
                    a.desugar_with(counter),
                    Formula::and(membership, b.desugar_with(counter)),
                );
                Formula::Freeze(z, Box::new(body))
            }
        }
    }

    /// Negation normal form: negation is pushed down to `true` and
    /// propositions, constraint negations flip the relation, and the
    /// Until/Release duality is applied. Requires a desugared formula.
    pub fn nnf(&self) -> Formula {
        match self {
            Formula::True | Formula::Prop(_) | Formula::Constraint(..) => self.clone(),
            Formula::And(a, b) => Formula::and(a.nnf(), b.nnf()),
            Formula::Or(a, b) => Formula::or(a.nnf(), b.nnf()),
            Formula::Until(a, b) => Formula::until(a.nnf(), b.nnf()),
            Formula::Release(a, b) => Formula::release(a.nnf(), b.nnf()),
            Formula::Freeze(x, a) => Formula::Freeze(x.clone(), Box::new(a.nnf())),
            Formula::UntilAnnotated(..) => {
                panic!("nnf requires a desugared formula")
            }
            Formula::Not(inner) => match inner.as_ref() {
                Formula::True => Formula::ff(),
                Formula::Prop(_) => Formula::not((**inner).clone()),
                Formula::Constraint(x, rel, c) => negate_constraint(x, *rel, c),
                Formula::Not(a) => a.nnf(),
                Formula::And(a, b) => Formula::or(
                    Formula::not((**a).clone()).nnf(),
                    Formula::not((**b).clone()).nnf(),
                ),
                Formula::Or(a, b) => Formula::and(
                    Formula::not((**a).clone()).nnf(),
                    Formula::not((**b).clone()).nnf(),
                ),
                Formula::Until(a, b) => Formula::release(
                    Formula::not((**a).clone()).nnf(),
                    Formula::not((**b).clone()).nnf(),
                ),
                Formula::Release(a, b) => Formula::until(
                    Formula::not((**a).clone()).nnf(),
                    Formula::not((**b).clone()).nnf(),
                ),
                Formula::Freeze(x, a) => {
                    Formula::Freeze(x.clone(), Box::new(Formula::not((**a).clone()).nnf()))
                }
                Formula::UntilAnnotated(..) => {
                    panic!("nnf requires a desugared formula")
                }
            },
        }
    }
}

fn negate_constraint(x: &str, rel: Rel, c: &BigInt) -> Formula {
    let cons = |rel: Rel| Formula::Constraint(x.to_string(), rel, c.clone());
    match rel {
        Rel::Lt => cons(Rel::Ge),
        Rel::Le => cons(Rel::Gt),
        Rel::Ge => cons(Rel::Lt),
        Rel::Gt => cons(Rel::Le),
        Rel::Eq => Formula::or(cons(Rel::Lt), cons(Rel::Gt)),
    }
}

fn interval_membership(z: &str, iv: &Interval) -> Formula {
    let mut parts = Vec::new();
    match &iv.lo {
        Bound::Unbounded => {}
        Bound::Incl(v) => parts.push(Formula::Constraint(z.to_string(), Rel::Ge, v.clone())),
        Bound::Excl(v) => parts.push(Formula::Constraint(z.to_string(), Rel::Gt, v.clone())),
    }
    match &iv.hi {
        Bound::Unbounded => {}
        Bound::Incl(v) => parts.push(Formula::Constraint(z.to_string(), Rel::Le, v.clone())),
        Bound::Excl(v) => parts.push(Formula::Constraint(z.to_string(), Rel::Lt, v.clone())),
    }
    Formula::all(parts)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::Not(a) if **a == Formula::True => write!(f, "false"),
            Formula::Prop(p) => write!(f, "{p}"),
            Formula::Constraint(x, rel, c) => write!(f, "{x} {rel} {c}"),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
            Formula::Release(a, b) => write!(f, "({a} R {b})"),
            Formula::Freeze(x, a) => write!(f, "{x}.({a})"),
            Formula::UntilAnnotated(a, iv, b) => write!(f, "({a} U{iv} {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_operator_expansion() {
        assert_eq!(Formula::next(Formula::prop("p")), parse("X p").unwrap());
        assert_eq!(Formula::finally(Formula::prop("p")), parse("F p").unwrap());
        assert_eq!(Formula::globally(Formula::prop("p")), parse("G p").unwrap());
    }

    #[test]
    fn desugar_mtl_until() {
        // p U[2,3) q  ==>  $u0.(p U (($u0 >= 2 & $u0 < 3) & q))
        let f = parse("p U[2,3) q").unwrap().desugar();
        let expect = Formula::freeze(
            "$u0",
            Formula::until(
                Formula::prop("p"),
                Formula::and(
                    Formula::and(
                        Formula::constraint("$u0", Rel::Ge, 2),
                        Formula::constraint("$u0", Rel::Lt, 3),
                    ),
                    Formula::prop("q"),
                ),
            ),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn desugar_leaves_plain_until() {
        let f = parse("p U q").unwrap();
        assert_eq!(f.desugar(), f);
    }

    #[test]
    fn desugar_union() {
        // p U([1,2]|[5,7]) q
        let f = parse("p U([1,2]|[5,7]) q").unwrap().desugar();
        let member = Formula::or(
            Formula::and(
                Formula::constraint("$u0", Rel::Ge, 1),
                Formula::constraint("$u0", Rel::Le, 2),
            ),
            Formula::and(
                Formula::constraint("$u0", Rel::Ge, 5),
                Formula::constraint("$u0", Rel::Le, 7),
            ),
        );
        let expect = Formula::freeze(
            "$u0",
            Formula::until(Formula::prop("p"), Formula::and(member, Formula::prop("q"))),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn nnf_dualities() {
        let f = parse("!(p U q)").unwrap().nnf();
        assert_eq!(f, parse("!p R !q").unwrap());
        let f = parse("!(x < 5)").unwrap().nnf();
        assert_eq!(f, parse("x >= 5").unwrap());
        let f = parse("!x.(p & x = 0)").unwrap().nnf();
        assert_eq!(f, parse("x.((!p | (x < 0 | x > 0)))").unwrap());
    }

    #[test]
    fn constants() {
        let f = parse("x.(F (x = 5 & y <= -2))").unwrap();
        assert_eq!(f.c_max(), BigInt::from(5));
        assert_eq!(f.c_abs_max(), BigInt::from(5));
        assert_eq!(parse("p U q").unwrap().c_max(), BigInt::zero());
        assert_eq!(parse("x.(x = -3)").unwrap().c_max(), BigInt::zero());
        assert_eq!(parse("x.(x = -3)").unwrap().c_abs_max(), BigInt::from(3));
    }

    #[test]
    fn register_helpers() {
        let f = parse("x.(F (x = 0))").unwrap();
        assert_eq!(f.register_count(), 1);
        assert!(f.is_freeze_ltl());
        assert!(f.is_closed());

        let f = parse("F (x = 0)").unwrap();
        assert!(!f.is_closed());

        let f = parse("x.(y.(x = 1 & y > 0))").unwrap();
        assert_eq!(f.register_count(), 2);
        assert!(!f.is_freeze_ltl());
    }

    #[test]
    fn until_rank_rules() {
        assert_eq!(parse("p").unwrap().until_rank().unwrap(), 0);
        assert_eq!(parse("p U q").unwrap().until_rank().unwrap(), 1);
        assert_eq!(parse("p U (q U r)").unwrap().until_rank().unwrap(), 2);
        assert_eq!(parse("!!(p U q)").unwrap().until_rank().unwrap(), 1);
        assert!(parse("x.(x = 0)").unwrap().until_rank().is_err());
    }

    #[test]
    fn display_roundtrip() {
        for text in [
            "x.(p U (q & (x >= 2 & x < 3)))",
            "(p U[2,2] q)",
            "!X true",
            "(p R (q | false))",
            "p U([1,2]|[5,7]) q",
            "F(-inf,5] p",
        ] {
            let f = parse(text).unwrap();
            let printed = f.to_string();
            let reparsed = parse(&printed).unwrap();
            assert_eq!(f, reparsed, "round-trip of {text} via {printed}");
        }
    }
}
