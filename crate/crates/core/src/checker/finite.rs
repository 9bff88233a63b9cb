//! Finite-word checking by bottom-up labelling.
//!
//! For every subformula, every position, and every valuation of the
//! registers occurring free in that subformula over the word's data values,
//! satisfaction is tabulated bottom-up; Until and Release are a
//! right-to-left sweep per valuation. With a fixed number of registers this
//! is the polynomial finite-word engine.

use super::Verdict;
use crate::dataword::DataWord;
use crate::formula::Formula;
use num_bigint::BigInt;
use std::collections::HashMap;

struct NodeTable {
    /// Register names free in this subformula, sorted.
    free: Vec<String>,
    /// Valuation (values of `free`, in order) to per-position satisfaction.
    sat: HashMap<Vec<BigInt>, Vec<bool>>,
}

struct Labelling<'w> {
    values: Vec<BigInt>,
    domain: Vec<BigInt>,
    tables: HashMap<usize, NodeTable>,
    _word: &'w DataWord,
}

fn ptr(f: &Formula) -> usize {
    f as *const Formula as usize
}

impl Labelling<'_> {
    fn n(&self) -> usize {
        self.values.len()
    }

    /// All valuations of `free` over the word's value domain.
    fn valuations(&self, free: &[String]) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for _ in free {
            let mut next = Vec::with_capacity(out.len() * self.domain.len());
            for v in &out {
                for d in &self.domain {
                    let mut v2 = v.clone();
                    v2.push(d.clone());
                    next.push(v2);
                }
            }
            out = next;
        }
        out
    }

    fn project(parent_free: &[String], val: &[BigInt], child_free: &[String]) -> Vec<BigInt> {
        child_free
            .iter()
            .map(|r| {
                let idx = parent_free
                    .iter()
                    .position(|p| p == r)
                    .expect("free subset");
                val[idx].clone()
            })
            .collect()
    }

    fn build(&mut self, f: &Formula) {
        if self.tables.contains_key(&ptr(f)) {
            return;
        }
        let n = self.n();
        let table = match f {
            Formula::True => NodeTable {
                free: Vec::new(),
                sat: HashMap::from([(Vec::new(), vec![true; n])]),
            },
            Formula::Prop(p) => {
                let row = (0..n)
                    .map(|i| self._word.point(i).props.contains(p))
                    .collect();
                NodeTable {
                    free: Vec::new(),
                    sat: HashMap::from([(Vec::new(), row)]),
                }
            }
            Formula::Constraint(x, rel, c) => {
                let free = vec![x.clone()];
                let mut sat = HashMap::new();
                for val in self.valuations(&free) {
                    let row = (0..n)
                        .map(|i| rel.eval(&(&self.values[i] - &val[0]), c))
                        .collect();
                    sat.insert(val, row);
                }
                NodeTable { free, sat }
            }
            Formula::Not(a) => {
                self.build(a);
                let child = &self.tables[&ptr(a)];
                NodeTable {
                    free: child.free.clone(),
                    sat: child
                        .sat
                        .iter()
                        .map(|(k, row)| (k.clone(), row.iter().map(|b| !b).collect()))
                        .collect(),
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                self.build(a);
                self.build(b);
                let free = union(&self.tables[&ptr(a)].free, &self.tables[&ptr(b)].free);
                let conj = matches!(f, Formula::And(..));
                let mut sat = HashMap::new();
                for val in self.valuations(&free) {
                    let ta = &self.tables[&ptr(a)];
                    let tb = &self.tables[&ptr(b)];
                    let ka = Self::project(&free, &val, &ta.free);
                    let kb = Self::project(&free, &val, &tb.free);
                    let ra = &ta.sat[&ka];
                    let rb = &tb.sat[&kb];
                    let row = (0..n)
                        .map(|i| if conj { ra[i] && rb[i] } else { ra[i] || rb[i] })
                        .collect();
                    sat.insert(val, row);
                }
                NodeTable { free, sat }
            }
            Formula::Freeze(x, a) => {
                self.build(a);
                let child_free = self.tables[&ptr(a)].free.clone();
                let free: Vec<String> = child_free.iter().filter(|r| *r != x).cloned().collect();
                let mut sat = HashMap::new();
                for val in self.valuations(&free) {
                    let row = (0..n)
                        .map(|i| {
                            let key: Vec<BigInt> = child_free
                                .iter()
                                .map(|r| {
                                    if r == x {
                                        self.values[i].clone()
                                    } else {
                                        let idx = free.iter().position(|p| p == r).expect("free");
                                        val[idx].clone()
                                    }
                                })
                                .collect();
                            self.tables[&ptr(a)].sat[&key][i]
                        })
                        .collect();
                    sat.insert(val, row);
                }
                NodeTable { free, sat }
            }
            Formula::Until(a, b) | Formula::Release(a, b) => {
                self.build(a);
                self.build(b);
                let free = union(&self.tables[&ptr(a)].free, &self.tables[&ptr(b)].free);
                let is_until = matches!(f, Formula::Until(..));
                let mut sat = HashMap::new();
                for val in self.valuations(&free) {
                    let ta = &self.tables[&ptr(a)];
                    let tb = &self.tables[&ptr(b)];
                    let ra = &ta.sat[&Self::project(&free, &val, &ta.free)];
                    let rb = &tb.sat[&Self::project(&free, &val, &tb.free)];
                    let mut row = vec![false; n];
                    // strict-future sweep: the last position has no future
                    row[n - 1] = !is_until;
                    for i in (0..n - 1).rev() {
                        row[i] = if is_until {
                            rb[i + 1] || (ra[i + 1] && row[i + 1])
                        } else {
                            rb[i + 1] && (ra[i + 1] || row[i + 1])
                        };
                    }
                    sat.insert(val, row);
                }
                NodeTable { free, sat }
            }
            Formula::UntilAnnotated(..) => unreachable!("labelling requires a desugared formula"),
        };
        self.tables.insert(ptr(f), table);
    }
}

fn union(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = a.to_vec();
    for r in b {
        if !out.contains(r) {
            out.push(r.clone());
        }
    }
    out.sort();
    out
}

/// Bottom-up labelling engine for nonempty finite words; agrees with
/// `check_naive` on all inputs and is polynomial for a fixed register
/// count.
pub fn check_finite(w: &DataWord, f: &Formula) -> Verdict {
    assert!(!w.is_empty(), "check_finite requires a nonempty word");
    let desugared = f.desugar();
    let values: Vec<BigInt> = w.values().map(|v| BigInt::from(v.clone())).collect();
    let mut domain = values.clone();
    domain.sort();
    domain.dedup();
    let mut lab = Labelling {
        values,
        domain,
        tables: HashMap::new(),
        _word: w,
    };
    lab.build(&desugared);
    let root = &lab.tables[&ptr(&desugared)];
    let key: Vec<BigInt> = root.free.iter().map(|_| lab.values[0].clone()).collect();
    let satisfied = root.sat[&key][0];
    let memo_entries = lab.tables.values().map(|t| t.sat.len()).sum();
    Verdict {
        satisfied,
        witness: None,
        memo_entries,
    }
}
