//! Polynomial-time checking of one-register formulas over periodic words.
//!
//! Every freeze subformula is closed when only one register exists, so its
//! truth at a position depends on the position alone. Working bottom-up,
//! each freeze subformula is decided at every window position by rotating
//! the word to start there, turning the register constraints into fresh
//! propositions over repetition-index classes (whose truth switches at most
//! once per period position as the repetition index grows), truncating the
//! class exponents, and handing the residual LTL formula to the periodic
//! engine. The subformula is then replaced by a fresh proposition labelled
//! onto the window.

use super::{check_periodic, CheckError, Verdict};
use crate::dataword::{ceil_div, DataPoint, DataWord, PeriodicWord};
use crate::formula::{Formula, Rel};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

struct Ctx {
    u1: Vec<DataPoint>,
    u2: Vec<DataPoint>,
    k: BigInt,
    fresh: u64,
}

impl Ctx {
    fn window(&self) -> u64 {
        (self.u1.len() + self.u2.len()) as u64
    }

    fn add_prop(&mut self, i: u64, prop: &str) {
        let n1 = self.u1.len() as u64;
        let point = if i < n1 {
            &mut self.u1[i as usize]
        } else {
            &mut self.u2[(i - n1) as usize]
        };
        point.props.insert(prop.to_string());
    }

    /// The suffix word starting at window position `i`, as prefix, period
    /// and first value. Past the prefix the period is rotated and its
    /// wrapped head shifted by one offset.
    fn rotate(&self, i: u64) -> (Vec<DataPoint>, Vec<DataPoint>, BigInt) {
        let n1 = self.u1.len() as u64;
        if i < n1 {
            let v1: Vec<DataPoint> = self.u1[i as usize..].to_vec();
            let d0 = BigInt::from(v1[0].value.clone());
            (v1, self.u2.clone(), d0)
        } else {
            let j = (i - n1) as usize;
            let mut v2: Vec<DataPoint> = self.u2[j..].to_vec();
            for p in &self.u2[..j] {
                let shifted = BigInt::from(p.value.clone()) + &self.k;
                v2.push(p.with_value(shifted.to_biguint().expect("offset is natural")));
            }
            let d0 = BigInt::from(v2[0].value.clone());
            (Vec::new(), v2, d0)
        }
    }
}

/// Rewrites constraints so only `<` and `>` remain.
fn normalize(f: &Formula) -> Formula {
    match f {
        Formula::Constraint(x, rel, c) => match rel {
            Rel::Lt | Rel::Gt => f.clone(),
            Rel::Le => Formula::Constraint(x.clone(), Rel::Lt, c + BigInt::one()),
            Rel::Ge => Formula::Constraint(x.clone(), Rel::Gt, c - BigInt::one()),
            Rel::Eq => Formula::and(
                Formula::Constraint(x.clone(), Rel::Gt, c - BigInt::one()),
                Formula::Constraint(x.clone(), Rel::Lt, c + BigInt::one()),
            ),
        },
        Formula::True | Formula::Prop(_) => f.clone(),
        Formula::Not(a) => Formula::not(normalize(a)),
        Formula::And(a, b) => Formula::and(normalize(a), normalize(b)),
        Formula::Or(a, b) => Formula::or(normalize(a), normalize(b)),
        Formula::Until(a, b) => Formula::until(normalize(a), normalize(b)),
        Formula::Release(a, b) => Formula::release(normalize(a), normalize(b)),
        Formula::Freeze(..) | Formula::UntilAnnotated(..) => {
            unreachable!("normalize runs on freeze-free desugared formulas")
        }
    }
}

/// Replaces `x < c` / `x > c` constraints by the propositions in `props`.
fn to_ltl(f: &Formula, props: &BTreeMap<(Rel, BigInt), String>) -> Formula {
    match f {
        Formula::Constraint(_, rel, c) => Formula::Prop(props[&(*rel, c.clone())].clone()),
        Formula::True | Formula::Prop(_) => f.clone(),
        Formula::Not(a) => Formula::not(to_ltl(a, props)),
        Formula::And(a, b) => Formula::and(to_ltl(a, props), to_ltl(b, props)),
        Formula::Or(a, b) => Formula::or(to_ltl(a, props), to_ltl(b, props)),
        Formula::Until(a, b) => Formula::until(to_ltl(a, props), to_ltl(b, props)),
        Formula::Release(a, b) => Formula::release(to_ltl(a, props), to_ltl(b, props)),
        _ => unreachable!(),
    }
}

/// Decides whether the rotated word `v1 (v2)^w +k` satisfies the
/// freeze-free formula `psi` whose single register holds `d0`.
fn check_rotated(
    v1: &[DataPoint],
    v2: &[DataPoint],
    k: &BigInt,
    d0: &BigInt,
    psi: &Formula,
) -> bool {
    let psi = normalize(psi);

    let mut constraints: BTreeMap<(Rel, BigInt), String> = BTreeMap::new();
    {
        let mut collect = |f: &Formula| {
            if let Formula::Constraint(_, rel, c) = f {
                let next = constraints.len();
                constraints
                    .entry((*rel, c.clone()))
                    .or_insert_with(|| format!("$c{next}"));
            }
        };
        fn walk(f: &Formula, collect: &mut impl FnMut(&Formula)) {
            collect(f);
            match f {
                Formula::Not(a) => walk(a, collect),
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Until(a, b)
                | Formula::Release(a, b) => {
                    walk(a, collect);
                    walk(b, collect);
                }
                _ => {}
            }
        }
        walk(&psi, &mut collect);
    }
    let ltl = to_ltl(&psi, &constraints);

    let holds = |d: &BigInt, rel: Rel, c: &BigInt| match rel {
        Rel::Lt => d - d0 < *c,
        Rel::Gt => d - d0 > *c,
        _ => unreachable!(),
    };
    let label = |p: &DataPoint, copy: &BigInt| -> DataPoint {
        let d = BigInt::from(p.value.clone()) + copy * k;
        let mut props = p.props.clone();
        for ((rel, c), name) in &constraints {
            if holds(&d, *rel, c) {
                props.insert(name.clone());
            }
        }
        DataPoint {
            props,
            value: BigUint::zero(),
        }
    };

    // switching points: per period position and constraint, the truth of
    // `d + x*k - d0 ~ c` changes at most once as the copy index x grows
    let mut boundaries: Vec<BigInt> = vec![BigInt::zero()];
    if !k.is_zero() {
        for p in v2 {
            let d = BigInt::from(p.value.clone());
            for (rel, c) in constraints.keys() {
                let q = c + d0 - &d;
                let s = match rel {
                    Rel::Lt => ceil_div(&q, k),
                    Rel::Gt => q.div_floor(k) + BigInt::one(),
                    _ => unreachable!(),
                };
                if s.is_positive() {
                    boundaries.push(s);
                }
            }
        }
    }
    boundaries.sort();
    boundaries.dedup();

    let cap = BigInt::from(ltl.size());
    let mut prefix: Vec<DataPoint> = v1.iter().map(|p| label(p, &BigInt::zero())).collect();
    for w in boundaries.windows(2) {
        let reps = (&w[1] - &w[0]).min(cap.clone());
        let reps = reps.to_u64().expect("capped exponent fits");
        for _ in 0..reps {
            prefix.extend(v2.iter().map(|p| label(p, &w[0])));
        }
    }
    let last = boundaries.last().unwrap();
    let period: Vec<DataPoint> = v2.iter().map(|p| label(p, last)).collect();

    let word = PeriodicWord::new(
        DataWord::new(prefix),
        DataWord::new(period),
        BigUint::zero(),
    )
    .expect("period is nonempty");
    check_periodic(&word, &ltl).satisfied
}

fn process(f: &Formula, ctx: &mut Ctx) -> Formula {
    match f {
        Formula::True | Formula::Prop(_) | Formula::Constraint(..) => f.clone(),
        Formula::Not(a) => Formula::not(process(a, ctx)),
        Formula::And(a, b) => Formula::and(process(a, ctx), process(b, ctx)),
        Formula::Or(a, b) => Formula::or(process(a, ctx), process(b, ctx)),
        Formula::Until(a, b) => Formula::until(process(a, ctx), process(b, ctx)),
        Formula::Release(a, b) => Formula::release(process(a, ctx), process(b, ctx)),
        Formula::UntilAnnotated(..) => unreachable!("input is desugared"),
        Formula::Freeze(_, a) => {
            let body = process(a, ctx);
            let prop = format!("$s{}", ctx.fresh);
            ctx.fresh += 1;
            for i in 0..ctx.window() {
                let (v1, v2, d0) = ctx.rotate(i);
                if check_rotated(&v1, &v2, &ctx.k, &d0, &body) {
                    ctx.add_prop(i, &prop);
                }
            }
            Formula::Prop(prop)
        }
    }
}

/// One-register engine: polynomial-time path checking for TPTL with at
/// most one register variable over infinite periodic words.
pub fn check_tptl1(w: &PeriodicWord, f: &Formula) -> Result<Verdict, CheckError> {
    let desugared = f.desugar();
    let found = desugared.register_count();
    if found > 1 {
        return Err(CheckError::RegisterCount { found, allowed: 1 });
    }
    let mut ctx = Ctx {
        u1: w.prefix().points().to_vec(),
        u2: w.period().points().to_vec(),
        k: BigInt::from(w.offset().clone()),
        fresh: 0,
    };
    let top = process(&desugared, &mut ctx);
    let (v1, v2, d0) = ctx.rotate(0);
    let satisfied = check_rotated(&v1, &v2, &ctx.k, &d0, &top);
    Ok(Verdict::new(satisfied))
}
