//! The reference oracle: direct recursion over the absolute satisfaction
//! relation, with each quantifier written out as stated. Memoization keeps
//! it usable on the differential corpora, but nothing here folds positions,
//! clamps valuations, or reasons about periods — that is the point, since
//! this is what the production engines are checked against.

use super::{EngineBounds, Verdict, WitnessStep};
use crate::dataword::{DataWord, PeriodicWord};
use crate::formula::Formula;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

/// Either a finite word or a periodic word with a quantifier window: on an
/// infinite word every Until/Release search is capped at `hop` positions
/// past its start, which is sound once `hop` dominates the witness bound.
#[derive(Clone, Copy)]
pub enum NaiveWord<'a> {
    Finite(&'a DataWord),
    Periodic { word: &'a PeriodicWord, hop: u64 },
}

impl NaiveWord<'_> {
    fn value(&self, i: u64) -> BigInt {
        match self {
            NaiveWord::Finite(w) => BigInt::from(w.point(i as usize).value.clone()),
            NaiveWord::Periodic { word, .. } => BigInt::from(word.value_at(i)),
        }
    }

    fn has_prop(&self, i: u64, p: &str) -> bool {
        match self {
            NaiveWord::Finite(w) => w.point(i as usize).props.contains(p),
            NaiveWord::Periodic { word, .. } => word.at(i).props.contains(p),
        }
    }

    /// Last position an Until/Release starting at `i` may quantify over.
    fn last(&self, i: u64) -> u64 {
        match self {
            NaiveWord::Finite(w) => w.len() as u64 - 1,
            NaiveWord::Periodic { hop, .. } => i + hop,
        }
    }
}

/// Window size for naive evaluation over a periodic word: `|u1| +
/// (n_max + 1)|u2|`, one period more than the worst-case witness bound so
/// that the bound also covers evaluation from unfolded positions.
pub fn naive_hop(w: &PeriodicWord, f: &Formula) -> u64 {
    let bounds = EngineBounds::for_word(w, f);
    let n1 = BigInt::from(w.prefix().len());
    let n2 = BigInt::from(w.period().len());
    let hop = n1 + (bounds.n_max() + BigInt::one()) * n2;
    super::big_to_u64(&hop, "naive evaluation window")
}

type Valuation = BTreeMap<String, BigInt>;

struct NaiveEval<'a> {
    word: NaiveWord<'a>,
    regs: Vec<String>,
    memo: HashMap<(u64, usize, Vec<BigInt>), bool>,
}

impl NaiveEval<'_> {
    fn key(&self, i: u64, f: &Formula, nu: &Valuation) -> (u64, usize, Vec<BigInt>) {
        let vals = self
            .regs
            .iter()
            .map(|r| nu.get(r).cloned().unwrap_or_else(BigInt::zero))
            .collect();
        (i, f as *const Formula as usize, vals)
    }

    fn eval(&mut self, i: u64, nu: &Valuation, f: &Formula) -> bool {
        match f {
            Formula::True => true,
            Formula::Prop(p) => self.word.has_prop(i, p),
            Formula::Constraint(x, rel, c) => {
                let d = self.word.value(i);
                let frozen = nu.get(x).cloned().unwrap_or_else(BigInt::zero);
                rel.eval(&(d - frozen), c)
            }
            Formula::Not(a) => !self.eval(i, nu, a),
            Formula::And(a, b) => self.eval(i, nu, a) && self.eval(i, nu, b),
            Formula::Or(a, b) => self.eval(i, nu, a) || self.eval(i, nu, b),
            Formula::Freeze(x, a) => {
                let mut nu2 = nu.clone();
                nu2.insert(x.clone(), self.word.value(i));
                self.eval(i, &nu2, a)
            }
            Formula::Until(..) | Formula::Release(..) => {
                let key = self.key(i, f, nu);
                if let Some(&v) = self.memo.get(&key) {
                    return v;
                }
                let v = match f {
                    Formula::Until(a, b) => self.until(i, nu, a, b),
                    Formula::Release(a, b) => self.release(i, nu, a, b),
                    _ => unreachable!(),
                };
                self.memo.insert(key, v);
                v
            }
            Formula::UntilAnnotated(a, iv, b) => {
                // native MTL semantics: the witness difference d_j - d_i
                // must lie in the annotated union
                let d_i = self.word.value(i);
                let last = self.word.last(i);
                for j in i + 1..=last {
                    if iv.contains(&(self.word.value(j) - &d_i))
                        && self.eval(j, nu, b)
                        && (i + 1..j).all_memo(self, nu, a)
                    {
                        return true;
                    }
                }
                false
            }
        }
    }

    /// `exists j > i: b(j) and for all t in (i,j): a(t)`, quantifiers
    /// written out directly.
    fn until(&mut self, i: u64, nu: &Valuation, a: &Formula, b: &Formula) -> bool {
        let last = self.word.last(i);
        for j in i + 1..=last {
            if self.eval(j, nu, b) && (i + 1..j).all_memo(self, nu, a) {
                return true;
            }
        }
        false
    }

    /// `for all j > i: b(j) or exists t in (i,j): a(t)`.
    fn release(&mut self, i: u64, nu: &Valuation, a: &Formula, b: &Formula) -> bool {
        let last = self.word.last(i);
        for j in i + 1..=last {
            if !self.eval(j, nu, b) {
                let mut found = false;
                for t in i + 1..j {
                    if self.eval(t, nu, a) {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return false;
                }
            }
        }
        true
    }
}

trait AllMemo {
    fn all_memo(self, ev: &mut NaiveEval<'_>, nu: &Valuation, f: &Formula) -> bool;
}

impl AllMemo for std::ops::Range<u64> {
    fn all_memo(self, ev: &mut NaiveEval<'_>, nu: &Valuation, f: &Formula) -> bool {
        for t in self {
            if !ev.eval(t, nu, f) {
                return false;
            }
        }
        true
    }
}

fn initial_valuation(f: &Formula, d0: BigInt) -> (Vec<String>, Valuation) {
    let regs: Vec<String> = f.registers().into_iter().collect();
    let nu = regs.iter().map(|r| (r.clone(), d0.clone())).collect();
    (regs, nu)
}

/// Direct evaluation of the absolute satisfaction relation on a nonempty
/// finite word, starting from the valuation that maps every register to the
/// initial data value. This is the oracle all engines are tested against.
pub fn check_naive(w: &DataWord, f: &Formula) -> Verdict {
    assert!(!w.is_empty(), "check_naive requires a nonempty word");
    let desugared = f.desugar();
    let d0 = BigInt::from(w.point(0).value.clone());
    let (regs, nu) = initial_valuation(&desugared, d0);
    let mut ev = NaiveEval {
        word: NaiveWord::Finite(w),
        regs,
        memo: HashMap::new(),
    };
    let satisfied = ev.eval(0, &nu, &desugared);
    Verdict {
        satisfied,
        witness: None,
        memo_entries: ev.memo.len(),
    }
}

/// Naive evaluation over an infinite periodic word, with every temporal
/// quantifier capped at the worst-case witness window.
pub fn check_naive_periodic(w: &PeriodicWord, f: &Formula) -> Verdict {
    let desugared = f.desugar();
    let hop = naive_hop(w, &desugared);
    let d0 = BigInt::from(w.value_at(0));
    let (regs, nu) = initial_valuation(&desugared, d0);
    let mut ev = NaiveEval {
        word: NaiveWord::Periodic { word: w, hop },
        regs,
        memo: HashMap::new(),
    };
    let satisfied = ev.eval(0, &nu, &desugared);
    Verdict {
        satisfied,
        witness: None,
        memo_entries: ev.memo.len(),
    }
}

/// Absolute-semantics evaluation at an arbitrary position and valuation of
/// an infinite word. Registers missing from `nu` default to 0.
pub fn eval_absolute(w: &PeriodicWord, i: u64, nu: &Valuation, f: &Formula) -> bool {
    let hop = naive_hop(w, f);
    let regs: Vec<String> = f.registers().into_iter().collect();
    let mut ev = NaiveEval {
        word: NaiveWord::Periodic { word: w, hop },
        regs,
        memo: HashMap::new(),
    };
    ev.eval(i, nu, f)
}

/// Relative-semantics evaluation at an arbitrary position and difference
/// valuation: a constraint `x ~ c` reads `delta(x) ~ c` directly, an Until
/// step to position `j` advances the whole valuation by `d_j - d_i`, and a
/// freeze resets the register to 0. No folding or clamping happens here;
/// this is the reference the period-shift and clamping lemmas are tested
/// against.
pub fn eval_relative(w: &PeriodicWord, i: u64, delta: &Valuation, f: &Formula) -> bool {
    struct RelEval<'a> {
        word: &'a PeriodicWord,
        hop: u64,
        regs: Vec<String>,
        memo: HashMap<(u64, usize, Vec<BigInt>), bool>,
    }
    impl RelEval<'_> {
        fn advance(&self, delta: &Valuation, diff: &BigInt) -> Valuation {
            self.regs
                .iter()
                .map(|r| {
                    let v = delta.get(r).cloned().unwrap_or_else(BigInt::zero);
                    (r.clone(), v + diff)
                })
                .collect()
        }

        fn eval(&mut self, i: u64, delta: &Valuation, f: &Formula) -> bool {
            match f {
                Formula::True => true,
                Formula::Prop(p) => self.word.at(i).props.contains(p),
                Formula::Constraint(x, rel, c) => {
                    let v = delta.get(x).cloned().unwrap_or_else(BigInt::zero);
                    rel.eval(&v, c)
                }
                Formula::Not(a) => !self.eval(i, delta, a),
                Formula::And(a, b) => self.eval(i, delta, a) && self.eval(i, delta, b),
                Formula::Or(a, b) => self.eval(i, delta, a) || self.eval(i, delta, b),
                Formula::Freeze(x, a) => {
                    let mut d2 = delta.clone();
                    d2.insert(x.clone(), BigInt::zero());
                    self.eval(i, &d2, a)
                }
                Formula::UntilAnnotated(..) => {
                    panic!("relative evaluation requires a desugared formula")
                }
                Formula::Until(..) | Formula::Release(..) => {
                    let key = (
                        i,
                        f as *const Formula as usize,
                        self.regs
                            .iter()
                            .map(|r| delta.get(r).cloned().unwrap_or_else(BigInt::zero))
                            .collect(),
                    );
                    if let Some(&v) = self.memo.get(&key) {
                        return v;
                    }
                    let d_i = BigInt::from(self.word.value_at(i));
                    let v = match f {
                        Formula::Until(a, b) => {
                            let mut found = false;
                            'outer: for j in i + 1..=i + self.hop {
                                let dj = self
                                    .advance(delta, &(BigInt::from(self.word.value_at(j)) - &d_i));
                                if self.eval(j, &dj, b) {
                                    for t in i + 1..j {
                                        let dt = self.advance(
                                            delta,
                                            &(BigInt::from(self.word.value_at(t)) - &d_i),
                                        );
                                        if !self.eval(t, &dt, a) {
                                            continue 'outer;
                                        }
                                    }
                                    found = true;
                                    break;
                                }
                            }
                            found
                        }
                        Formula::Release(a, b) => {
                            let mut holds = true;
                            for j in i + 1..=i + self.hop {
                                let dj = self
                                    .advance(delta, &(BigInt::from(self.word.value_at(j)) - &d_i));
                                if !self.eval(j, &dj, b) {
                                    let mut rescued = false;
                                    for t in i + 1..j {
                                        let dt = self.advance(
                                            delta,
                                            &(BigInt::from(self.word.value_at(t)) - &d_i),
                                        );
                                        if self.eval(t, &dt, a) {
                                            rescued = true;
                                            break;
                                        }
                                    }
                                    if !rescued {
                                        holds = false;
                                        break;
                                    }
                                }
                            }
                            holds
                        }
                        _ => unreachable!(),
                    };
                    self.memo.insert(key, v);
                    v
                }
            }
        }
    }
    let hop = naive_hop(w, f);
    let regs: Vec<String> = f.registers().into_iter().collect();
    let mut ev = RelEval {
        word: w,
        hop,
        regs,
        memo: HashMap::new(),
    };
    ev.eval(i, delta, f)
}

/// Replays the existential choices of a witness through the naive
/// semantics: recorded Or branches and Until/Release positions are taken as
/// given, everything else (universal branches, subformulas past the end of
/// the trace) is re-checked by full naive evaluation.
pub fn replay_witness(word: NaiveWord<'_>, f: &Formula, steps: &[WitnessStep]) -> bool {
    let desugared = f.desugar();
    let d0 = word.value(0);
    let (regs, nu) = initial_valuation(&desugared, d0);
    let mut ev = NaiveEval {
        word,
        regs,
        memo: HashMap::new(),
    };
    let mut steps = steps.iter();
    replay(&mut ev, 0, &nu, &desugared, &mut steps)
}

fn replay<'s>(
    ev: &mut NaiveEval<'_>,
    i: u64,
    nu: &Valuation,
    f: &Formula,
    steps: &mut std::slice::Iter<'s, WitnessStep>,
) -> bool {
    match f {
        Formula::Or(a, b) => match steps.next() {
            Some(WitnessStep::OrLeft) => replay(ev, i, nu, a, steps),
            Some(WitnessStep::OrRight) => replay(ev, i, nu, b, steps),
            _ => ev.eval(i, nu, f),
        },
        Formula::Until(a, b) => match steps.next() {
            Some(WitnessStep::UntilAt(j)) => {
                let j = *j;
                j > i && (i + 1..j).all_memo(ev, nu, a) && replay(ev, j, nu, b, steps)
            }
            _ => ev.eval(i, nu, f),
        },
        Formula::Release(a, b) => match steps.next() {
            Some(WitnessStep::ReleaseHold) => ev.release(i, nu, a, b),
            Some(WitnessStep::ReleaseAt(j)) => {
                let j = *j;
                let mut all = j > i;
                for t in i + 1..=j {
                    if !ev.eval(t, nu, b) {
                        all = false;
                        break;
                    }
                }
                all && replay(ev, j, nu, a, steps)
            }
            _ => ev.eval(i, nu, f),
        },
        Formula::Freeze(x, a) => {
            let mut nu2 = nu.clone();
            nu2.insert(x.clone(), ev.word.value(i));
            replay(ev, i, &nu2, a, steps)
        }
        Formula::Not(a) => !ev.eval(i, nu, a),
        _ => ev.eval(i, nu, f),
    }
}
