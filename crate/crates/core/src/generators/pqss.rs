//! Positive quantified subset sum: alternately pick `x_i` from `{1, a_i}`
//! and ask whether the sum can always/ever reach `b`. Encoded two ways:
//! over the counting word `0,1,2,...` with two registers (quantifier steps
//! are value jumps of `1` or `a_i`), and over a period carrying the partial
//! sums as data values with a FreezeLTL formula using only `= 0`
//! constraints.

use super::GenError;
use crate::dataword::{DataPoint, DataWord, PeriodicWord};
use crate::formula::{Formula, Rel};
use num_bigint::BigInt;
use num_traits::One;

/// An instance: choices `a_1..a_2n` (even count) and target `b`, all
/// positive.
#[derive(Debug, Clone)]
pub struct PqssInstance {
    pub a: Vec<u64>,
    pub b: u64,
}

impl PqssInstance {
    pub fn new(a: Vec<u64>, b: u64) -> Result<PqssInstance, GenError> {
        if a.is_empty() || !a.len().is_multiple_of(2) {
            return Err(GenError::OddChoices);
        }
        if b == 0 || a.contains(&0) {
            return Err(GenError::NonPositive);
        }
        Ok(PqssInstance { a, b })
    }
}

/// Direct min/max recursion over the choice tree: odd positions (1-based)
/// choose universally, even positions existentially; at the end the sum
/// must equal `b`. The oracle.
pub fn eval_pqss(p: &PqssInstance) -> bool {
    fn go(p: &PqssInstance, i: usize, sum: u64) -> bool {
        if i == p.a.len() {
            return sum == p.b;
        }
        let universal = i.is_multiple_of(2); // x_{i+1}, 1-based odd
        let choices = [1, p.a[i]];
        if universal {
            choices.iter().all(|c| go(p, i + 1, sum + c))
        } else {
            choices.iter().any(|c| go(p, i + 1, sum + c))
        }
    }
    go(p, 0, 0)
}

/// The two-register formula checked against `0 (1)^w +1`: each quantifier
/// freezes `y` and jumps to the positions exactly `1` or `a_i` ahead;
/// finally `x = b` compares against the start.
pub fn gen_pqss_tptl2(p: &PqssInstance) -> Formula {
    let mut body = Formula::Constraint("x".to_string(), Rel::Eq, BigInt::from(p.b));
    for (idx, a) in p.a.iter().enumerate().rev() {
        let i = idx + 1;
        let here = Formula::or(
            Formula::Constraint("y".to_string(), Rel::Eq, BigInt::one()),
            Formula::Constraint("y".to_string(), Rel::Eq, BigInt::from(*a)),
        );
        body = if !i.is_multiple_of(2) {
            Formula::Freeze(
                "y".to_string(),
                Box::new(Formula::globally(Formula::implies(here, body))),
            )
        } else {
            Formula::Freeze(
                "y".to_string(),
                Box::new(Formula::finally(Formula::and(here, body))),
            )
        };
    }
    Formula::Freeze("x".to_string(), Box::new(body))
}

/// The word `gen_pqss_tptl2` is meant to be checked against.
pub fn pqss_counting_word() -> PeriodicWord {
    PeriodicWord::new(
        DataWord::from_values([0]),
        DataWord::from_values([1]),
        1u32.into(),
    )
    .unwrap()
}

/// `F_p psi := p U (p & psi)` — a Finally restricted to an unbroken block
/// of `p` positions.
fn finally_p(psi: Formula) -> Formula {
    Formula::until(Formula::prop("p"), Formula::and(Formula::prop("p"), psi))
}

/// `G_p psi := !p R (p -> psi)`, the dual of `F_p`.
fn globally_p(psi: Formula) -> Formula {
    Formula::release(
        Formula::not(Formula::prop("p")),
        Formula::implies(Formula::prop("p"), psi),
    )
}

/// The FreezeLTL encoding over the word
/// `(r,b) ((q,0) prod_i (p,1)(p,a_i)(r,0))^w +1`: partial sums live in the
/// data values of the `p` positions, each quantifier hops to the iteration
/// whose `q` value equals the reached sum, and the final `x = 0` compares
/// the reached sum with `b` frozen at position 0.
pub fn gen_pqss_freezeltl(p: &PqssInstance) -> (PeriodicWord, Formula) {
    let prefix = DataWord::new(vec![DataPoint::new(["r"], p.b)]);
    let mut period = vec![DataPoint::new(["q"], 0)];
    for a in &p.a {
        period.push(DataPoint::new(["p"], 1));
        period.push(DataPoint::new(["p"], *a));
        period.push(DataPoint::new(["r"], 0));
    }
    let word =
        PeriodicWord::new(prefix, DataWord::new(period), 1u32.into()).expect("period is nonempty");

    let mut body = Formula::Constraint("x".to_string(), Rel::Eq, BigInt::ZERO);
    for (idx, _) in p.a.iter().enumerate().rev() {
        let i = idx + 1;
        let hop = Formula::Freeze(
            "y".to_string(),
            Box::new(Formula::finally(Formula::all([
                Formula::prop("q"),
                Formula::Constraint("y".to_string(), Rel::Eq, BigInt::ZERO),
                body,
            ]))),
        );
        let guarded = if !i.is_multiple_of(2) {
            globally_p(hop)
        } else {
            finally_p(hop)
        };
        body = Formula::next_n(3 * (i as u64 - 1), guarded);
    }
    let formula = Formula::Freeze(
        "x".to_string(),
        Box::new(Formula::Freeze(
            "y".to_string(),
            Box::new(Formula::next(body)),
        )),
    );
    (word, formula)
}

/// Parses the one-line format `pqss a=1,2,3,4 b=6`.
pub fn parse_pqss(text: &str) -> Result<PqssInstance, GenError> {
    let err = |msg: &str| GenError::Parse {
        line: 1,
        msg: msg.to_string(),
    };
    let line = text
        .lines()
        .map(|l| match l.find('#') {
            Some(h) => l[..h].trim(),
            None => l.trim(),
        })
        .find(|l| !l.is_empty())
        .ok_or_else(|| err("empty input"))?;
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.first() != Some(&"pqss") {
        return Err(err("expected `pqss a=... b=...`"));
    }
    let mut a = None;
    let mut b = None;
    for f in &fields[1..] {
        if let Some(list) = f.strip_prefix("a=") {
            let parsed: Result<Vec<u64>, _> = list.split(',').map(str::parse).collect();
            a = Some(parsed.map_err(|_| err("bad a= list"))?);
        } else if let Some(v) = f.strip_prefix("b=") {
            b = Some(v.parse::<u64>().map_err(|_| err("bad b="))?);
        } else {
            return Err(err("unknown field"));
        }
    }
    match (a, b) {
        (Some(a), Some(b)) => PqssInstance::new(a, b),
        _ => Err(err("need both a= and b=")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{check_periodic, check_tptl1};

    #[test]
    fn oracle() {
        assert!(eval_pqss(&PqssInstance::new(vec![1, 1], 2).unwrap()));
        // x1 = 1 forces x2 = 3, which is not available
        assert!(!eval_pqss(&PqssInstance::new(vec![2, 2], 4).unwrap()));
        assert!(eval_pqss(&PqssInstance::new(vec![1, 2], 3).unwrap()));
    }

    #[test]
    fn instance_validation() {
        assert!(PqssInstance::new(vec![1, 2, 3], 4).is_err());
        assert!(PqssInstance::new(vec![], 4).is_err());
        assert!(PqssInstance::new(vec![0, 2], 4).is_err());
        assert!(PqssInstance::new(vec![1, 2], 0).is_err());
        assert!(parse_pqss("pqss a=1,2,3,4 b=6").is_ok());
    }

    #[test]
    fn tptl2_encoding() {
        let w = pqss_counting_word();
        for (a, b, expect) in [
            (vec![1, 1], 2, true),
            (vec![2, 2], 4, false),
            (vec![1, 2], 3, true),
            (vec![2, 3], 4, false),
        ] {
            let inst = PqssInstance::new(a.clone(), b).unwrap();
            let f = gen_pqss_tptl2(&inst);
            assert_eq!(f.register_count(), 2);
            assert_eq!(eval_pqss(&inst), expect);
            assert_eq!(check_periodic(&w, &f).satisfied, expect, "a={a:?} b={b}");
        }
    }

    #[test]
    fn freezeltl_encoding() {
        for (a, b) in [(vec![1, 1], 2), (vec![2, 2], 4), (vec![1, 2], 3)] {
            let inst = PqssInstance::new(a.clone(), b).unwrap();
            let (w, f) = gen_pqss_freezeltl(&inst);
            assert!(f.is_freeze_ltl());
            assert!(f.register_count() <= 2);
            assert_eq!(
                check_periodic(&w, &f).satisfied,
                eval_pqss(&inst),
                "a={a:?} b={b}"
            );
        }
    }

    #[test]
    fn tptl1_rejects_two_register_instances() {
        let f = gen_pqss_tptl2(&PqssInstance::new(vec![1, 1], 2).unwrap());
        assert!(check_tptl1(&pqss_counting_word(), &f).is_err());
    }
}
