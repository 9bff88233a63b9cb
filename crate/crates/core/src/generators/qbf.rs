//! Quantified Boolean formulas encoded as pure-TPTL(F) path checking over
//! the word `0,1,...,2n+1`: freezing register `x_i` at data value `2i-1` or
//! `2i` sets the Boolean variable `x_i` to 1 or 0, and at the final
//! position (value `2n+1`) the matrix reads each variable back through the
//! constraint `x_i = 2(n-i)+2`.

use super::GenError;
use crate::dataword::{DataPoint, DataWord};
use crate::formula::{parse, Formula, Rel};
use num_bigint::BigInt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// A closed QBF: a quantifier prefix over `x1..xn` and a quantifier-free
/// matrix mentioning only those variables.
#[derive(Debug, Clone)]
pub struct QbfInstance {
    pub prefix: Vec<Quantifier>,
    pub matrix: Formula,
}

impl QbfInstance {
    pub fn new(prefix: Vec<Quantifier>, matrix: Formula) -> Result<QbfInstance, GenError> {
        if prefix.is_empty() {
            return Err(GenError::NonClosedQbf("empty quantifier prefix".into()));
        }
        validate_matrix(&matrix, prefix.len())?;
        Ok(QbfInstance { prefix, matrix })
    }

    pub fn vars(&self) -> usize {
        self.prefix.len()
    }
}

fn validate_matrix(f: &Formula, n: usize) -> Result<(), GenError> {
    match f {
        Formula::True => Ok(()),
        Formula::Prop(p) => {
            let ok = p
                .strip_prefix('x')
                .and_then(|i| i.parse::<usize>().ok())
                .is_some_and(|i| i >= 1 && i <= n);
            if ok {
                Ok(())
            } else {
                Err(GenError::NonClosedQbf(format!(
                    "proposition `{p}` is not one of x1..x{n}"
                )))
            }
        }
        Formula::Not(a) => validate_matrix(a, n),
        Formula::And(a, b) | Formula::Or(a, b) => {
            validate_matrix(a, n)?;
            validate_matrix(b, n)
        }
        _ => Err(GenError::NonClosedQbf(
            "matrix must be quantifier-free propositional".into(),
        )),
    }
}

fn eval_matrix(f: &Formula, assignment: &[bool]) -> bool {
    match f {
        Formula::True => true,
        Formula::Prop(p) => {
            let i: usize = p[1..].parse().expect("validated");
            assignment[i - 1]
        }
        Formula::Not(a) => !eval_matrix(a, assignment),
        Formula::And(a, b) => eval_matrix(a, assignment) && eval_matrix(b, assignment),
        Formula::Or(a, b) => eval_matrix(a, assignment) || eval_matrix(b, assignment),
        _ => unreachable!("validated"),
    }
}

/// Direct recursive evaluation over the quantifier tree; the oracle.
pub fn eval_qbf(q: &QbfInstance) -> bool {
    fn go(q: &QbfInstance, i: usize, assignment: &mut Vec<bool>) -> bool {
        if i == q.prefix.len() {
            return eval_matrix(&q.matrix, assignment);
        }
        let mut result = match q.prefix[i] {
            Quantifier::Forall => true,
            Quantifier::Exists => false,
        };
        for v in [false, true] {
            assignment.push(v);
            let sub = go(q, i + 1, assignment);
            assignment.pop();
            result = match q.prefix[i] {
                Quantifier::Forall => result && sub,
                Quantifier::Exists => result || sub,
            };
        }
        result
    }
    go(q, 0, &mut Vec::new())
}

/// Emits the word `0..2n+1` and the pure-TPTL(F) formula
/// `x.x1...xn.Psi'`; the checker verdict equals [`eval_qbf`].
pub fn gen_qbf(q: &QbfInstance) -> (DataWord, Formula) {
    let n = q.vars() as u64;
    let word = DataWord::new((0..=2 * n + 1).map(DataPoint::pure).collect());

    // matrix with every x_i replaced by the readback constraint
    fn subst(f: &Formula, n: u64) -> Formula {
        match f {
            Formula::True => Formula::True,
            Formula::Prop(p) => {
                let i: u64 = p[1..].parse().expect("validated");
                Formula::Constraint(p.clone(), Rel::Eq, BigInt::from(2 * (n - i) + 2))
            }
            Formula::Not(a) => Formula::not(subst(a, n)),
            Formula::And(a, b) => Formula::and(subst(a, n), subst(b, n)),
            Formula::Or(a, b) => Formula::or(subst(a, n), subst(b, n)),
            _ => unreachable!("validated"),
        }
    }

    let mut body = Formula::finally(Formula::and(
        Formula::Constraint("x".to_string(), Rel::Eq, BigInt::from(2 * n + 1)),
        subst(&q.matrix, n),
    ));
    for (idx, quant) in q.prefix.iter().enumerate().rev() {
        let i = idx as u64 + 1;
        let reg = format!("x{i}");
        let here = Formula::or(
            Formula::Constraint(reg.clone(), Rel::Eq, BigInt::from(2 * i - 1)),
            Formula::Constraint(reg.clone(), Rel::Eq, BigInt::from(2 * i)),
        );
        let rebind = Formula::Freeze(reg.clone(), Box::new(body));
        body = match quant {
            Quantifier::Forall => Formula::globally(Formula::implies(here, rebind)),
            Quantifier::Exists => Formula::finally(Formula::and(here, rebind)),
        };
    }
    for idx in (0..q.prefix.len()).rev() {
        body = Formula::Freeze(format!("x{}", idx + 1), Box::new(body));
    }
    let formula = Formula::Freeze("x".to_string(), Box::new(body));
    (word, formula)
}

/// Parses a prefix string like `AEA` plus a matrix in the formula grammar
/// restricted to propositions `x1..xn`.
pub fn parse_qbf(prefix: &str, matrix: &str) -> Result<QbfInstance, GenError> {
    let prefix: Vec<Quantifier> = prefix
        .chars()
        .map(|c| match c {
            'A' | 'a' => Ok(Quantifier::Forall),
            'E' | 'e' => Ok(Quantifier::Exists),
            _ => Err(GenError::Parse {
                line: 0,
                msg: format!("quantifier prefix may only contain A/E, found `{c}`"),
            }),
        })
        .collect::<Result<_, _>>()?;
    let matrix = parse(matrix).map_err(|e| GenError::Parse {
        line: 0,
        msg: e.to_string(),
    })?;
    QbfInstance::new(prefix, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{check_finite, check_naive};
    use num_traits::ToPrimitive;

    #[test]
    fn oracle() {
        assert!(eval_qbf(&parse_qbf("E", "x1").unwrap()));
        assert!(!eval_qbf(&parse_qbf("A", "x1").unwrap()));
        assert!(eval_qbf(&parse_qbf("AE", "x1 | x2").unwrap()));
        assert!(eval_qbf(
            &parse_qbf("AE", "!(x1 & x2) & (x1 | x2) | !x1 & !x2").unwrap()
        ));
        assert!(!eval_qbf(&parse_qbf("EA", "x1 & x2").unwrap()));
    }

    #[test]
    fn word_is_exact_range() {
        let q = parse_qbf("AE", "x1 | x2").unwrap();
        let (w, f) = gen_qbf(&q);
        let values: Vec<u64> = w.values().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(values, (0..=5).collect::<Vec<u64>>());
        assert!(f.is_closed());
    }

    #[test]
    fn single_exists_example() {
        let q = parse_qbf("E", "x1").unwrap();
        let (w, f) = gen_qbf(&q);
        assert_eq!(w.len(), 4);
        let expect =
            crate::formula::parse("x.(x1.(F((x1 = 1 | x1 = 2) & x1.(F(x = 3 & x1 = 2)))))")
                .unwrap();
        assert_eq!(f, expect);
        assert!(check_naive(&w, &f).satisfied);
        assert!(check_finite(&w, &f).satisfied);
    }

    #[test]
    fn rejects_open_matrix() {
        assert!(parse_qbf("E", "x2").is_err());
        assert!(parse_qbf("E", "y").is_err());
        assert!(parse_qbf("E", "F x1").is_err());
    }

    #[test]
    fn checker_agrees_with_oracle() {
        for (prefix, matrix) in [
            ("AE", "x1 | x2"),
            ("AE", "x1 & x2"),
            ("EA", "x1 | !x2"),
            ("EE", "x1 & !x2"),
            ("AA", "x1 -> x2"),
            ("A", "x1 | !x1"),
        ] {
            let q = parse_qbf(prefix, matrix).unwrap();
            let (w, f) = gen_qbf(&q);
            assert_eq!(
                check_finite(&w, &f).satisfied,
                eval_qbf(&q),
                "{prefix}: {matrix}"
            );
        }
    }
}
