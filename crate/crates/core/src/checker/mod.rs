//! The evaluation engines.
//!
//! `check_naive` is the reference oracle: a direct recursion over the
//! absolute satisfaction relation. The production engines work in the
//! relative semantics, where a valuation stores differences to the current
//! data value: `check_periodic` folds positions into the prefix-plus-period
//! window and clamps valuations so the state space stays finite,
//! `check_slp` runs the same recursion against SLP-compressed words without
//! expanding them, `check_finite` labels finite words bottom-up over all
//! register valuations, and `check_tptl1` decides one-register formulas in
//! polynomial time by closed-subformula labelling.

mod engine;
mod finite;
mod naive;
mod tptl1;

pub use engine::{check_periodic, check_slp, check_slp_finite};
pub use finite::check_finite;
pub use naive::{
    check_naive, check_naive_periodic, eval_absolute, eval_relative, naive_hop, replay_witness,
    NaiveWord,
};
pub use tptl1::check_tptl1;

use crate::dataword::{ceil_div, DataWord, PeriodicWord};
use crate::formula::Formula;
use crate::slp::Slp;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("formula uses {found} registers, but this engine allows at most {allowed}")]
    RegisterCount { found: usize, allowed: usize },
    #[error("word is not quasi-monotonic")]
    NotQuasiMonotonic,
    #[error("word must be nonempty")]
    EmptyWord,
}

/// One existential choice made by a satisfied run, outermost first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessStep {
    OrLeft,
    OrRight,
    /// The chosen Until witness position (an absolute word index).
    UntilAt(u64),
    /// Release held by its universal branch.
    ReleaseHold,
    /// Release held with this position satisfying the left operand.
    ReleaseAt(u64),
}

/// Outcome of a check: the verdict plus an optional replayable trace of the
/// existential choices on the outermost satisfied run.
#[derive(Debug, Clone, Default)]
pub struct Verdict {
    pub satisfied: bool,
    pub witness: Option<Vec<WitnessStep>>,
    /// Number of memo table entries the engine ended with, for reporting.
    pub memo_entries: usize,
}

impl Verdict {
    pub fn new(satisfied: bool) -> Self {
        Verdict {
            satisfied,
            witness: None,
            memo_entries: 0,
        }
    }
}

/// Engine selector, as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Engine {
    Auto,
    Naive,
    Finite,
    Periodic,
    Slp,
    Tptl1,
    Quasimono,
}

/// A word in any of the supported input representations.
#[derive(Debug, Clone)]
pub enum WordSource {
    Finite(DataWord),
    Periodic(PeriodicWord),
    SlpFinite(Slp),
    SlpPeriodic {
        prefix: Option<Slp>,
        period: Slp,
        offset: BigUint,
    },
}

/// Data values above this make the quasi-monotonic shrink worthwhile.
const SHRINK_THRESHOLD_BITS: u64 = 16;

/// Dispatches to the engine matching the input class: finite words get the
/// bottom-up labelling, one-register formulas over periodic words the
/// polynomial engine, quasi-monotonic words with large values are shrunk
/// first, and everything else runs the bounded relative-semantics engine.
pub fn check_auto(source: &WordSource, f: &Formula) -> Result<Verdict, CheckError> {
    match source {
        WordSource::Finite(w) => {
            if w.is_empty() {
                return Err(CheckError::EmptyWord);
            }
            Ok(check_finite(w, f))
        }
        WordSource::Periodic(w) => {
            let desugared = f.desugar();
            if desugared.register_count() <= 1 {
                return check_tptl1(w, &desugared);
            }
            let big_values = w
                .period()
                .max_value()
                .map(|v| v.bits() > SHRINK_THRESHOLD_BITS)
                .unwrap_or(false);
            if w.is_quasi_monotonic() && big_values {
                return check_quasi_monotonic_fast(w, &desugared);
            }
            Ok(check_periodic(w, &desugared))
        }
        WordSource::SlpFinite(g) => Ok(check_slp_finite(g, f)),
        WordSource::SlpPeriodic {
            prefix,
            period,
            offset,
        } => Ok(check_slp(prefix.as_ref(), period, offset, f)),
    }
}

/// Runs a named engine against the given word representation.
pub fn check_with_engine(
    engine: Engine,
    source: &WordSource,
    f: &Formula,
) -> Result<Verdict, CheckError> {
    match (engine, source) {
        (Engine::Auto, _) => check_auto(source, f),
        (Engine::Naive, WordSource::Finite(w)) => {
            if w.is_empty() {
                return Err(CheckError::EmptyWord);
            }
            Ok(check_naive(w, f))
        }
        (Engine::Naive, WordSource::Periodic(w)) => Ok(check_naive_periodic(w, f)),
        (Engine::Finite, WordSource::Finite(w)) => {
            if w.is_empty() {
                return Err(CheckError::EmptyWord);
            }
            Ok(check_finite(w, f))
        }
        (Engine::Periodic, WordSource::Periodic(w)) => Ok(check_periodic(w, f)),
        (Engine::Tptl1, WordSource::Periodic(w)) => check_tptl1(w, f),
        (Engine::Quasimono, WordSource::Periodic(w)) => check_quasi_monotonic_fast(w, f),
        (Engine::Slp, WordSource::SlpFinite(g)) => Ok(check_slp_finite(g, f)),
        (
            Engine::Slp,
            WordSource::SlpPeriodic {
                prefix,
                period,
                offset,
            },
        ) => Ok(check_slp(prefix.as_ref(), period, offset, f)),
        _ => check_auto(source, f),
    }
}

/// Shrinks a quasi-monotonic word down to polynomially bounded values and
/// offset, then runs the bounded engine; the verdict is unchanged because
/// every pairwise value difference stays in the same region relative to the
/// formula's constraint constants.
pub fn check_quasi_monotonic_fast(w: &PeriodicWord, f: &Formula) -> Result<Verdict, CheckError> {
    let desugared = f.desugar();
    // The regions are delimited by the constants themselves, so the gap cap
    // must dominate their absolute values, not just the positive maximum.
    let c = desugared
        .c_abs_max()
        .to_biguint()
        .expect("absolute value is non-negative");
    let shrunk = w.shrink(&c).map_err(|_| CheckError::NotQuasiMonotonic)?;
    let mut verdict = check_periodic(&shrunk, &desugared);
    // witness positions would refer to the shrunk word; drop them
    verdict.witness = None;
    Ok(verdict)
}

/// The constants of the bounded evaluation procedure.
#[derive(Debug, Clone)]
pub struct EngineBounds {
    /// Largest constraint constant, at least 0.
    pub c: BigInt,
    /// Largest difference between two data values in the period.
    pub m: BigInt,
    /// Largest difference between two data values in prefix plus period.
    pub m1: BigInt,
    /// Smallest data value in the period.
    pub m2: BigInt,
    /// Largest data value in prefix plus period.
    pub d_max: BigInt,
    /// Per-repetition offset.
    pub k: BigInt,
}

impl EngineBounds {
    pub fn for_word(w: &PeriodicWord, f: &Formula) -> EngineBounds {
        let to_int = |v: &BigUint| BigInt::from(v.clone());
        let min_u2 = to_int(w.period().min_value().unwrap());
        let max_u2 = to_int(w.period().max_value().unwrap());
        let (min_all, max_all) = match (w.prefix().min_value(), w.prefix().max_value()) {
            (Some(lo), Some(hi)) => (
                min_u2.clone().min(to_int(lo)),
                max_u2.clone().max(to_int(hi)),
            ),
            _ => (min_u2.clone(), max_u2.clone()),
        };
        EngineBounds {
            c: f.c_max(),
            m: &max_u2 - &min_u2,
            m1: &max_all - &min_all,
            m2: min_u2,
            d_max: max_all,
            k: BigInt::from(w.offset().clone()),
        }
    }

    pub(crate) fn from_stats(
        min_u2: BigInt,
        max_u2: BigInt,
        min_all: BigInt,
        max_all: BigInt,
        k: BigInt,
        f: &Formula,
    ) -> EngineBounds {
        EngineBounds {
            c: f.c_max(),
            m: &max_u2 - &min_u2,
            m1: &max_all - &min_all,
            m2: min_u2,
            d_max: max_all,
            k,
        }
    }

    /// Valuations are clamped to this value at positions past the prefix.
    pub fn clamp(&self) -> BigInt {
        &self.c + &self.m + BigInt::one()
    }

    /// The minimal `n >= 2` with `m_delta + m2 + (n-1)k - d_i >= C+M+1`;
    /// any Until or Release witness then lies within `|u1| + n|u2|`.
    /// For `k = 0` the witness bound is `|u1| + 2|u2|`, i.e. `n = 2`.
    pub fn n_delta(&self, m_delta: &BigInt, d_i: &BigInt) -> BigInt {
        let two = BigInt::from(2);
        if self.k.is_zero() {
            return two;
        }
        let numer = self.clamp() + d_i - m_delta - &self.m2;
        two.max(ceil_div(&numer, &self.k) + BigInt::one())
    }

    /// Worst-case `n_delta`: the smallest possible clamped register value
    /// `-m1` together with the largest data value in the window.
    pub fn n_max(&self) -> BigInt {
        let neg_m1 = -self.m1.clone();
        let d_max = self.d_max.clone();
        self.n_delta(&neg_m1, &d_max)
    }
}

/// The single-hop witness horizon `|u1| + n|u2|`, with `n` computed for the
/// initial all-zero valuation and the largest window value (`|u1| + 2|u2|`
/// when the offset is zero). Any Until or Release started at position 0
/// finds its witness within `H`; the naive oracle applies this window per
/// temporal operator, from each operator's own position, which also covers
/// nested operators.
pub fn unroll_horizon(w: &PeriodicWord, f: &Formula) -> BigUint {
    let desugared = f.desugar();
    let bounds = EngineBounds::for_word(w, &desugared);
    let n1 = BigUint::from(w.prefix().len());
    let n2 = BigUint::from(w.period().len());
    let d_max = bounds.d_max.clone();
    let n = bounds
        .n_delta(&BigInt::zero(), &d_max)
        .to_biguint()
        .expect("n_delta is positive");
    n1 + n * n2
}

pub(crate) fn big_to_u64(v: &BigInt, what: &str) -> u64 {
    v.to_u64()
        .unwrap_or_else(|| panic!("{what} ({v}) exceeds the supported position range"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataword::DataPoint;
    use crate::formula::parse;
    use std::collections::BTreeMap;

    fn word(values: &[u64]) -> DataWord {
        DataWord::from_values(values.iter().copied())
    }

    fn pw(prefix: &[u64], period: &[u64], k: u64) -> PeriodicWord {
        PeriodicWord::new(word(prefix), word(period), BigUint::from(k)).unwrap()
    }

    /// 0 (1)^w +1 = 0,1,2,3,...
    fn counting_word() -> PeriodicWord {
        pw(&[0], &[1], 1)
    }

    #[test]
    fn naive_basics() {
        let w = word(&[0, 2]);
        assert!(check_naive(&w, &parse("X(x = 2)").unwrap()).satisfied);
        let one = word(&[7]);
        assert!(!check_naive(&one, &parse("F(p | !p)").unwrap()).satisfied);
        assert!(check_naive(&one, &parse("x.(x = 0)").unwrap()).satisfied);
    }

    #[test]
    fn naive_strict_until() {
        // a strict-future witness needs a successor position
        let w = word(&[0, 0]);
        assert!(check_naive(&w, &parse("true U true").unwrap()).satisfied);
        let one = word(&[0]);
        assert!(!check_naive(&one, &parse("true U true").unwrap()).satisfied);
    }

    #[test]
    fn horizon_example() {
        // u1=(0), u2=(1), k=1 and C=5: n = max{2, ceil((5+0+1+1-0-1)/1)+1} = 7
        let w = counting_word();
        let f = parse("x.(F(x = 5))").unwrap();
        assert_eq!(unroll_horizon(&w, &f), BigUint::from(8u32));
        // k = 0 gives |u1| + 2|u2|
        let w0 = pw(&[3, 3], &[2, 2, 2], 0);
        assert_eq!(unroll_horizon(&w0, &f), BigUint::from(8u32));
        let g = parse("p U q").unwrap();
        assert_eq!(unroll_horizon(&w0, &g), BigUint::from(8u32));
    }

    #[test]
    fn periodic_examples() {
        let w = counting_word();
        assert!(check_periodic(&w, &parse("x.(F(x = 5))").unwrap()).satisfied);
        assert!(check_periodic(&w, &parse("G(x >= 0)").unwrap()).satisfied);
        assert!(!check_periodic(&w, &parse("F(x = -1)").unwrap()).satisfied);
        // values never repeat, so eventually-constant fails
        assert!(!check_periodic(&w, &parse("F(G(x.(X(x = 0))))").unwrap()).satisfied);
    }

    #[test]
    fn periodic_matches_naive_on_examples() {
        let w = pw(&[2, 0], &[1, 3], 2);
        for text in [
            "x.(F(x = 5))",
            "G(x >= 0)",
            "x.(p U (x >= 2))",
            "G(x.(F(x = 2)))",
            "F(G(x >= 3))",
            "!(true U (x.(X(x = 0))))",
            "x.(y.((x = 0) U (y >= 1)))",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(
                check_periodic(&w, &f).satisfied,
                check_naive_periodic(&w, &f).satisfied,
                "engine vs oracle on {text}"
            );
        }
    }

    #[test]
    fn slp_engine_examples() {
        use crate::slp::SlpBuilder;
        let u1 = Slp::leaf(Default::default(), BigUint::zero());
        let u2 = Slp::leaf(Default::default(), BigUint::one());
        let f = parse("x.(F(x = 5))").unwrap();
        assert!(check_slp(Some(&u1), &u2, &BigUint::one(), &f).satisfied);

        // doubling chain: 1024 equal values; the value never moves
        let mut b = SlpBuilder::new();
        let mut v = b.leaf(Default::default(), 2u32.into());
        for _ in 0..10 {
            v = b.concat(v, v);
        }
        let chain = b.build(v);
        let f = parse("x.(G(x = 0))").unwrap();
        assert!(check_slp(None, &chain, &BigUint::zero(), &f).satisfied);
        assert!(check_slp_finite(&chain, &f).satisfied);
        let exp = chain.expand(1 << 11).unwrap();
        assert_eq!(
            check_finite(&exp, &f).satisfied,
            check_slp_finite(&chain, &f).satisfied
        );
    }

    #[test]
    fn finite_examples() {
        let one = word(&[5]);
        assert!(check_finite(&one, &parse("!X true").unwrap()).satisfied);
        assert!(!check_finite(&one, &parse("true U true").unwrap()).satisfied);
        assert!(check_finite(&word(&[5, 5]), &parse("true U true").unwrap()).satisfied);
    }

    #[test]
    fn finite_agrees_with_naive() {
        let w = DataWord::new(vec![
            DataPoint::new(["p"], 2),
            DataPoint::pure(0),
            DataPoint::new(["q"], 4),
            DataPoint::pure(1),
        ]);
        for text in [
            "p U q",
            "x.(F(x = 2))",
            "x.(G(y.(x <= 2)))",
            "F(q & x.(X(x = -3)))",
            "(p | q) R (x >= -2)",
            "p U[1,3] q",
            "F[=2] q",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(
                check_finite(&w, &f).satisfied,
                check_naive(&w, &f).satisfied,
                "finite vs naive on {text}"
            );
        }
    }

    #[test]
    fn tptl1_examples() {
        let w = counting_word();
        assert!(
            check_tptl1(&w, &parse("F(x >= 3)").unwrap())
                .unwrap()
                .satisfied
        );
        assert!(
            check_tptl1(&w, &parse("G(x.(X(x = 1)))").unwrap())
                .unwrap()
                .satisfied
        );
        assert!(matches!(
            check_tptl1(&w, &parse("x.(y.(x = 0 & y = 0))").unwrap()),
            Err(CheckError::RegisterCount { found: 2, .. })
        ));
    }

    #[test]
    fn tptl1_matches_periodic() {
        let words = [counting_word(), pw(&[2, 0], &[1, 3], 2), pw(&[], &[5], 0)];
        for w in &words {
            for text in [
                "F(x >= 3)",
                "G(x.(X(x = 1)))",
                "x.(F(x = 4))",
                "G(x.(F(x <= 0)))",
                "(x >= 1) U (x.(X(x > 0)))",
                "F(G(x > 2))",
            ] {
                let f = parse(text).unwrap();
                assert_eq!(
                    check_tptl1(w, &f).unwrap().satisfied,
                    check_periodic(w, &f).satisfied,
                    "tptl1 vs periodic on {text} over {w}"
                );
            }
        }
    }

    #[test]
    fn quasi_monotonic_fast_path() {
        let w = pw(&[], &[0, 100], 200);
        let f = parse("x.(F(x >= 4))").unwrap();
        let fast = check_quasi_monotonic_fast(&w, &f).unwrap();
        assert_eq!(fast.satisfied, check_periodic(&w, &f).satisfied);

        let not_qm = pw(&[], &[5, 0], 1);
        assert!(matches!(
            check_quasi_monotonic_fast(&not_qm, &f),
            Err(CheckError::NotQuasiMonotonic)
        ));

        // monotonic words are quasi-monotonic
        let mono = pw(&[0, 1], &[2, 3], 2);
        assert!(check_quasi_monotonic_fast(&mono, &f).is_ok());
    }

    #[test]
    fn relative_semantics_lemmas_smoke() {
        let w = pw(&[2, 0], &[1, 3], 2);
        let f = parse("x.(F(x = 5)) & G(y >= -2)").unwrap();
        // absolute vs relative from matched valuations
        for i in 0..6u64 {
            let d_i = BigInt::from(w.value_at(i));
            let nu: BTreeMap<String, BigInt> = [
                ("x".to_string(), BigInt::from(1)),
                ("y".to_string(), BigInt::from(3)),
            ]
            .into_iter()
            .collect();
            let delta: BTreeMap<String, BigInt> =
                nu.iter().map(|(r, v)| (r.clone(), &d_i - v)).collect();
            assert_eq!(
                eval_absolute(&w, i, &nu, &f),
                eval_relative(&w, i, &delta, &f),
                "lemma 4.2 at {i}"
            );
        }
        // period shift at positions past the prefix
        let delta: BTreeMap<String, BigInt> = [
            ("x".to_string(), BigInt::from(2)),
            ("y".to_string(), BigInt::from(0)),
        ]
        .into_iter()
        .collect();
        for i in 2..6u64 {
            assert_eq!(
                eval_relative(&w, i, &delta, &f),
                eval_relative(&w, i + 2, &delta, &f),
                "lemma 4.3 at {i}"
            );
        }
    }

    #[test]
    fn witness_replays_through_naive() {
        let w = pw(&[2, 0], &[1, 3], 2);
        for text in [
            "x.(F(x = 5))",
            "F(x >= 2) | G(x >= 100)",
            "G(x >= -2)",
            "x.((x <= 0) U (x = 4))",
        ] {
            let f = parse(text).unwrap();
            let v = check_periodic(&w, &f);
            if v.satisfied {
                let steps = v.witness.expect("satisfied verdicts carry a witness");
                assert!(
                    replay_witness(
                        NaiveWord::Periodic {
                            word: &w,
                            hop: naive_hop(&w, &f.desugar())
                        },
                        &f,
                        &steps
                    ),
                    "witness replay failed for {text}: {steps:?}"
                );
            }
        }
    }

    #[test]
    fn auto_dispatch() {
        let f = parse("x.(F(x = 5))").unwrap();
        let v = check_auto(&WordSource::Periodic(counting_word()), &f).unwrap();
        assert!(v.satisfied);
        let v = check_auto(&WordSource::Finite(word(&[0, 5])), &f).unwrap();
        assert!(v.satisfied);
        assert!(matches!(
            check_auto(&WordSource::Finite(DataWord::empty()), &f),
            Err(CheckError::EmptyWord)
        ));
    }
}
