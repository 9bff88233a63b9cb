//! One-counter machines and the extraction of their computations as data
//! words.
//!
//! A deterministic machine has a unique computation from `(q0, 0)`; it is
//! either finite or ultimately periodic with the counter shifted by a fixed
//! amount per repetition. For unary machines the computation is found by
//! plain simulation; for binary machines counter values can grow
//! exponentially, so the extraction assembles SLPs instead, iterating
//! descending cycles with the shift-product construction.

use crate::checker::{check_finite, check_periodic, check_slp, check_slp_finite, Verdict};
use crate::dataword::{DataPoint, DataWord, PeriodicWord};
use crate::formula::Formula;
use crate::slp::{Slp, SlpBuilder, VarId};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OcmError {
    #[error("machine is not deterministic: configuration ({state}, {counter}) has {successors} successors")]
    Nondeterministic {
        state: String,
        counter: BigUint,
        successors: usize,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Edge operation: a zero test or a counter update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    Zero,
    Add(BigInt),
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Zero => write!(f, "zero"),
            Op::Add(a) => write!(f, "add({a})"),
        }
    }
}

/// Whether update numbers are meant to be read as unary or binary encoded;
/// this selects the extraction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Unary,
    Binary,
}

/// A one-counter machine.
#[derive(Debug, Clone)]
pub struct Ocm {
    states: Vec<String>,
    initial: usize,
    edges: Vec<(usize, Op, usize)>,
    pub encoding: Encoding,
}

/// A computation, as a data word labelled with the visited states.
#[derive(Debug, Clone)]
pub enum Computation {
    Finite(DataWord),
    Periodic(PeriodicWord),
}

/// Like [`Computation`], but SLP-compressed, as produced for binary
/// machines.
#[derive(Debug)]
pub enum SlpComputation {
    Finite(Slp),
    Periodic {
        prefix: Option<Slp>,
        period: Slp,
        offset: BigUint,
    },
}

impl Ocm {
    pub fn new(
        states: Vec<String>,
        initial: &str,
        edges: Vec<(String, Op, String)>,
        encoding: Encoding,
    ) -> Result<Ocm, OcmError> {
        let index: HashMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let lookup = |name: &str| {
            index.get(name).copied().ok_or_else(|| OcmError::Parse {
                line: 0,
                msg: format!("unknown state `{name}`"),
            })
        };
        let initial = lookup(initial)?;
        let edges = edges
            .into_iter()
            .map(|(a, op, b)| Ok((lookup(&a)?, op, lookup(&b)?)))
            .collect::<Result<Vec<_>, OcmError>>()?;
        Ok(Ocm {
            states,
            initial,
            edges,
            encoding,
        })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    /// All successor configurations of `(q, c)`: a zero edge fires when the
    /// counter is zero, an add edge when the result stays non-negative.
    pub fn step(&self, q: usize, c: &BigUint) -> Vec<(usize, BigUint)> {
        let mut out = Vec::new();
        for (from, op, to) in &self.edges {
            if *from != q {
                continue;
            }
            match op {
                Op::Zero => {
                    if c.is_zero() {
                        out.push((*to, BigUint::zero()));
                    }
                }
                Op::Add(a) => {
                    let next = BigInt::from(c.clone()) + a;
                    if !next.is_negative() {
                        out.push((*to, next.to_biguint().unwrap()));
                    }
                }
            }
        }
        out
    }

    fn point(&self, q: usize, c: &BigUint) -> DataPoint {
        DataPoint {
            props: BTreeSet::from([self.states[q].clone()]),
            value: c.clone(),
        }
    }

    fn add_edge_count(&self, q: usize) -> usize {
        self.edges
            .iter()
            .filter(|(from, op, _)| *from == q && matches!(op, Op::Add(_)))
            .count()
    }

    /// Decides determinism by running the binary extraction while checking
    /// that every visited configuration has at most one successor, and that
    /// states on an infinitely growing cycle keep at most one add edge (a
    /// second one would eventually become enabled as the counter grows).
    pub fn is_deterministic(&self) -> bool {
        self.extract_binary().is_ok()
    }

    /// Extracts the computation of a unary-encoded deterministic machine by
    /// plain simulation. The computation is periodic once a configuration
    /// `(q, n)` is preceded by `(q, m)` with `m <= n` and, unless `m = n`,
    /// no zero test inside the repeated segment; the period then shifts by
    /// `k = n - m <= |Q|` and `|u1 u2| <= |Q|^3`.
    pub fn comp_unary(&self) -> Result<Computation, OcmError> {
        if !self.is_deterministic() {
            return Err(self.nondet_error());
        }
        // |Q|^3 covers unit updates; excursions scale with the largest
        // update magnitude, so widen the window accordingly
        let max_add = self
            .edges
            .iter()
            .filter_map(|(_, op, _)| match op {
                Op::Add(a) => a.magnitude().to_u64(),
                Op::Zero => None,
            })
            .max()
            .unwrap_or(1)
            .max(1);
        let limit = (self.states.len().pow(3) as u64) * 2 * max_add + 4;
        let mut trace: Vec<(usize, BigUint)> = vec![(self.initial, BigUint::zero())];
        let mut zero_steps: Vec<bool> = Vec::new(); // was step t -> t+1 a zero edge
        for _ in 0..limit {
            let (q, c) = trace.last().unwrap().clone();
            let succ = self.step(q, &c);
            match succ.as_slice() {
                [] => {
                    let points = trace.iter().map(|(q, c)| self.point(*q, c)).collect();
                    return Ok(Computation::Finite(DataWord::new(points)));
                }
                [(q2, c2)] => {
                    zero_steps.push(c2.is_zero() && self.zero_fires(q, &c));
                    trace.push((*q2, c2.clone()));
                }
                _ => return Err(self.nondet_error()),
            }
            // look for a repeat ending at the newest configuration
            let t = trace.len() - 1;
            let (qt, ct) = &trace[t];
            for s in (0..t).rev() {
                let (qs, cs) = &trace[s];
                if qs != qt || cs > ct {
                    continue;
                }
                let k = ct - cs;
                if !k.is_zero() && zero_steps[s..t].iter().any(|z| *z) {
                    // a zero test inside the segment would not survive the shift
                    continue;
                }
                let prefix: Vec<DataPoint> =
                    trace[..s].iter().map(|(q, c)| self.point(*q, c)).collect();
                let period: Vec<DataPoint> =
                    trace[s..t].iter().map(|(q, c)| self.point(*q, c)).collect();
                let w = PeriodicWord::new(DataWord::new(prefix), DataWord::new(period), k)
                    .expect("repeat segment is nonempty");
                return Ok(Computation::Periodic(w));
            }
        }
        unreachable!("a deterministic run repeats a configuration within the window")
    }

    fn zero_fires(&self, q: usize, c: &BigUint) -> bool {
        c.is_zero()
            && self
                .edges
                .iter()
                .any(|(from, op, _)| *from == q && matches!(op, Op::Zero))
    }

    fn nondet_error(&self) -> OcmError {
        // re-run to locate a nondeterministic configuration for the message
        match self.extract_binary() {
            Err(e) => e,
            Ok(_) => OcmError::Nondeterministic {
                state: self.states[self.initial].clone(),
                counter: BigUint::zero(),
                successors: 2,
            },
        }
    }

    /// Extracts the computation of a binary-encoded deterministic machine
    /// as SLPs, without materializing the (possibly exponential) run.
    ///
    /// From each entry state the machine is simulated from counter zero for
    /// at most `|Q|+1` transitions; the first matching case applies:
    /// a halt yields an explicit tail, a counter return to zero chains to
    /// the next entry state, a state repeat with non-decreasing counter
    /// closes an infinite periodic tail, and a state repeat with decreasing
    /// counter iterates the cycle as a shift product until the counter
    /// would go negative, then halts or chains depending on whether it hit
    /// exactly zero. The overall word follows the unique chain of entry
    /// states until a tail is produced or an entry state repeats (an
    /// offset-zero loop).
    pub fn comp_binary(&self) -> Result<SlpComputation, OcmError> {
        self.extract_binary()
    }

    fn extract_binary(&self) -> Result<SlpComputation, OcmError> {
        let mut builder = SlpBuilder::new();
        // SLP pieces for the chain of comp(q) calls, in order
        let mut pieces: Vec<VarId> = Vec::new();
        let mut seen: HashMap<usize, usize> = HashMap::new(); // entry state -> piece index
        let mut entry = self.initial;

        loop {
            if let Some(&at) = seen.get(&entry) {
                // the chain of entry states closed a cycle: offset-zero loop
                let prefix = concat_all(&mut builder, &pieces[..at]);
                let period = concat_all(&mut builder, &pieces[at..]).expect("cycle is nonempty");
                return Ok(SlpComputation::Periodic {
                    prefix: prefix.map(|v| builder_clone(&builder, v)),
                    period: builder_clone(&builder, period),
                    offset: BigUint::zero(),
                });
            }
            seen.insert(entry, pieces.len());

            match self.run_window(entry)? {
                Window::Halt(word) => {
                    let var = builder.word(&word).expect("halt window is nonempty");
                    pieces.push(var);
                    let all = concat_all(&mut builder, &pieces).unwrap();
                    return Ok(SlpComputation::Finite(builder_clone(&builder, all)));
                }
                Window::ZeroChain { word, next } => {
                    if !word.is_empty() {
                        let var = builder.word(&word).expect("nonempty");
                        pieces.push(var);
                    }
                    entry = next;
                }
                Window::PeriodicTail { prefix, period, k } => {
                    if !prefix.is_empty() {
                        let var = builder.word(&prefix).expect("nonempty");
                        pieces.push(var);
                    }
                    let head = concat_all(&mut builder, &pieces);
                    let period_var = builder.word(&period).expect("period is nonempty");
                    return Ok(SlpComputation::Periodic {
                        prefix: head.map(|v| builder_clone(&builder, v)),
                        period: builder_clone(&builder, period_var),
                        offset: k,
                    });
                }
                Window::DescendingCycle {
                    head,
                    cycle,
                    reps,
                    step,
                    tail,
                    next,
                } => {
                    if !head.is_empty() {
                        let var = builder.word(&head).expect("nonempty");
                        pieces.push(var);
                    }
                    let base = builder.word(&cycle).expect("cycle is nonempty");
                    pieces.push(base);
                    if !reps.is_zero() {
                        let iter = Slp::iterate(&cycle, &reps, &step)
                            .expect("cycle values stay non-negative across the iterations");
                        let var = import(&mut builder, &iter);
                        pieces.push(var);
                    }
                    if !tail.is_empty() {
                        let var = builder.word(&tail).expect("nonempty");
                        pieces.push(var);
                    }
                    match next {
                        Some(q) => entry = q,
                        None => {
                            let all = concat_all(&mut builder, &pieces).unwrap();
                            return Ok(SlpComputation::Finite(builder_clone(&builder, all)));
                        }
                    }
                }
            }
        }
    }

    /// Simulates at most `|Q|+1` transitions from `(entry, 0)` and
    /// classifies the outcome.
    fn run_window(&self, entry: usize) -> Result<Window, OcmError> {
        let mut trace: Vec<(usize, BigUint)> = vec![(entry, BigUint::zero())];
        for _ in 0..self.states.len() + 1 {
            let (q, c) = trace.last().unwrap().clone();
            let succ = self.step(q, &c);
            match succ.as_slice() {
                [] => {
                    let points = trace.iter().map(|(q, c)| self.point(*q, c)).collect();
                    return Ok(Window::Halt(DataWord::new(points)));
                }
                [(q2, c2)] => {
                    trace.push((*q2, c2.clone()));
                }
                _ => {
                    return Err(OcmError::Nondeterministic {
                        state: self.states[q].clone(),
                        counter: c,
                        successors: succ.len(),
                    })
                }
            }
            let t = trace.len() - 1;
            let (qt, ct) = trace[t].clone();
            if ct.is_zero() && t >= 1 {
                let points = trace[..t].iter().map(|(q, c)| self.point(*q, c)).collect();
                return Ok(Window::ZeroChain {
                    word: DataWord::new(points),
                    next: qt,
                });
            }
            for s in 1..t {
                let (qs, cs) = trace[s].clone();
                if qs != qt {
                    continue;
                }
                if cs <= ct {
                    // growing (or flat) cycle: infinite periodic tail
                    self.check_growing_cycle(&trace[s..t], &cs, &ct)?;
                    let prefix: Vec<DataPoint> =
                        trace[..s].iter().map(|(q, c)| self.point(*q, c)).collect();
                    let period: Vec<DataPoint> =
                        trace[s..t].iter().map(|(q, c)| self.point(*q, c)).collect();
                    return Ok(Window::PeriodicTail {
                        prefix: DataWord::new(prefix),
                        period: DataWord::new(period),
                        k: ct - cs,
                    });
                }
                // descending cycle
                let k = BigInt::from(ct.clone()) - BigInt::from(cs.clone());
                let cycle: Vec<(usize, BigUint)> = trace[s..t].to_vec();
                let c_min = cycle.iter().map(|(_, c)| c.clone()).min().unwrap();
                // largest m with c_min + m*k > 0
                let m = (BigInt::from(c_min) - BigInt::one()).div_floor(&-k.clone());
                let m = m.to_biguint().expect("cycle counters are positive");
                // the word is head . cycle . prod_{i=1..m} cycle_{+ik} . tail
                let shift = BigInt::from(m.clone() + BigUint::one()) * &k;
                let mut tail_points = Vec::new();
                let mut landing = None;
                for (idx, (q, c)) in cycle.iter().enumerate() {
                    let v = BigInt::from(c.clone()) + &shift;
                    if v.is_negative() {
                        break;
                    }
                    if v.is_zero() {
                        landing = Some((cycle[idx].0, idx));
                        break;
                    }
                    let _ = idx;
                    tail_points.push(self.point(*q, &v.to_biguint().unwrap()));
                }
                let head: Vec<DataPoint> =
                    trace[..s].iter().map(|(q, c)| self.point(*q, c)).collect();
                let cycle_points: Vec<DataPoint> =
                    cycle.iter().map(|(q, c)| self.point(*q, c)).collect();
                return Ok(Window::DescendingCycle {
                    head: DataWord::new(head),
                    cycle: DataWord::new(cycle_points),
                    reps: m,
                    step: k,
                    tail: DataWord::new(tail_points),
                    next: landing.map(|(q, _)| q),
                });
            }
        }
        unreachable!("a state repeats within |Q|+1 transitions")
    }

    /// On an infinitely growing cycle every add edge of a visited state
    /// eventually becomes enabled, so determinism additionally requires at
    /// most one add edge per cycle state.
    fn check_growing_cycle(
        &self,
        cycle: &[(usize, BigUint)],
        cs: &BigUint,
        ct: &BigUint,
    ) -> Result<(), OcmError> {
        if cs == ct {
            return Ok(()); // exact repeat: only the visited configurations recur
        }
        for (q, c) in cycle {
            if self.add_edge_count(*q) > 1 {
                return Err(OcmError::Nondeterministic {
                    state: self.states[*q].clone(),
                    counter: c.clone(),
                    successors: 2,
                });
            }
        }
        Ok(())
    }

    /// Extracts the computation (per the encoding hint) and hands it to the
    /// matching checking engine. Propositions in the formula may name
    /// machine states.
    pub fn model_check(&self, f: &Formula) -> Result<Verdict, OcmError> {
        match self.encoding {
            Encoding::Unary => match self.comp_unary()? {
                Computation::Finite(w) => Ok(check_finite(&w, f)),
                Computation::Periodic(w) => Ok(check_periodic(&w, f)),
            },
            Encoding::Binary => match self.comp_binary()? {
                SlpComputation::Finite(g) => Ok(check_slp_finite(&g, f)),
                SlpComputation::Periodic {
                    prefix,
                    period,
                    offset,
                } => Ok(check_slp(prefix.as_ref(), &period, &offset, f)),
            },
        }
    }
}

enum Window {
    /// The run halts within the window; the word includes the final
    /// configuration.
    Halt(DataWord),
    /// The counter returned to zero; the word excludes the zero
    /// configuration, which becomes the next entry.
    ZeroChain { word: DataWord, next: usize },
    /// A state repeated with non-decreasing counter: infinite tail.
    PeriodicTail {
        prefix: DataWord,
        period: DataWord,
        k: BigUint,
    },
    /// A state repeated with decreasing counter: the cycle is iterated
    /// `reps` more times (shifted by `step` each time) and then partially
    /// replayed until the counter would go negative (`tail`); `next` is the
    /// state reached if it hit exactly zero.
    DescendingCycle {
        head: DataWord,
        cycle: DataWord,
        reps: BigUint,
        step: BigInt,
        tail: DataWord,
        next: Option<usize>,
    },
}

fn concat_all(b: &mut SlpBuilder, pieces: &[VarId]) -> Option<VarId> {
    let mut it = pieces.iter().copied();
    let first = it.next()?;
    Some(it.fold(first, |acc, v| b.concat(acc, v)))
}

/// Materializes a standalone SLP rooted at `var` out of a builder.
fn builder_clone(b: &SlpBuilder, var: VarId) -> Slp {
    b.clone().build(var)
}

/// Copies all rules of `g` into `b`, returning the new root.
fn import(b: &mut SlpBuilder, g: &Slp) -> VarId {
    use crate::slp::Rule;
    let mut map: HashMap<VarId, VarId> = HashMap::new();
    for (v, rule) in g.rules().iter().enumerate() {
        let new = match rule {
            Rule::Leaf(props, d) => b.leaf(props.clone(), d.clone()),
            Rule::Shift(x, d) => {
                let nx = map[x];
                b.shift(nx, d.clone())
            }
            Rule::Concat(x, y) => b.concat(map[x], map[y]),
        };
        map.insert(v, new);
    }
    map[&g.output()]
}

/// Parses the machine text format. `#` starts a comment.
///
/// ```text
/// ocm unary        # or: ocm binary
/// init q0
/// q0 add(2) q1
/// q1 zero q1
/// ```
pub fn parse_ocm(text: &str) -> Result<Ocm, OcmError> {
    let err = |line: usize, msg: &str| OcmError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text.lines().enumerate().filter_map(|(n, l)| {
        let l = match l.find('#') {
            Some(h) => &l[..h],
            None => l,
        };
        let l = l.trim();
        if l.is_empty() {
            None
        } else {
            Some((n + 1, l))
        }
    });
    let (hline, header) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let encoding = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["ocm", "unary"] => Encoding::Unary,
        ["ocm", "binary"] => Encoding::Binary,
        _ => return Err(err(hline, "expected header `ocm unary` or `ocm binary`")),
    };
    let mut initial: Option<String> = None;
    let mut edges: Vec<(String, Op, String)> = Vec::new();
    let mut states: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    let add_state = |s: &str, states: &mut Vec<String>, seen: &mut BTreeSet<String>| {
        if seen.insert(s.to_string()) {
            states.push(s.to_string());
        }
    };
    for (n, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        match fields.as_slice() {
            ["init", q] => {
                add_state(q, &mut states, &mut seen);
                initial = Some(q.to_string());
            }
            [a, op, b] => {
                let op = if *op == "zero" {
                    Op::Zero
                } else if let Some(v) = op.strip_prefix("add(").and_then(|r| r.strip_suffix(')')) {
                    let v = v
                        .parse::<BigInt>()
                        .map_err(|_| err(n, "expected an integer in add(...)"))?;
                    Op::Add(v)
                } else {
                    return Err(err(n, "expected `zero` or `add(a)`"));
                };
                add_state(a, &mut states, &mut seen);
                add_state(b, &mut states, &mut seen);
                edges.push((a.to_string(), op, b.to_string()));
            }
            _ => return Err(err(n, "expected `init q` or `q op q'`")),
        }
    }
    let initial = initial.ok_or_else(|| err(hline, "missing `init` line"))?;
    Ocm::new(states, &initial, edges, encoding)
}

impl fmt::Display for Ocm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "ocm {}",
            match self.encoding {
                Encoding::Unary => "unary",
                Encoding::Binary => "binary",
            }
        )?;
        writeln!(f, "init {}", self.states[self.initial])?;
        for (a, op, b) in &self.edges {
            writeln!(f, "{} {} {}", self.states[*a], op, self.states[*b])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use num_traits::ToPrimitive;

    fn machine(text: &str) -> Ocm {
        parse_ocm(text).unwrap()
    }

    /// Direct step-by-step simulation, for cross-checking extractions.
    fn simulate(m: &Ocm, steps: usize) -> Vec<(String, u64)> {
        let mut out = Vec::new();
        let mut q = m.initial_state();
        let mut c = BigUint::zero();
        for _ in 0..steps {
            out.push((m.state_name(q).to_string(), c.to_u64().unwrap()));
            match m.step(q, &c).as_slice() {
                [(q2, c2)] => {
                    q = *q2;
                    c = c2.clone();
                }
                _ => break,
            }
        }
        out
    }

    #[test]
    fn step_rules() {
        let m = machine("ocm unary\ninit q0\nq0 zero q1\n");
        assert_eq!(m.step(0, &BigUint::zero()), vec![(1, BigUint::zero())]);
        assert!(m.step(0, &BigUint::from(3u32)).is_empty());
        let m = machine("ocm unary\ninit q0\nq0 add(-1) q1\n");
        assert!(m.step(0, &BigUint::zero()).is_empty());
    }

    #[test]
    fn determinism() {
        let m = machine("ocm unary\ninit q0\nq0 add(1) q1\nq0 add(2) q1\nq1 add(1) q0\n");
        assert!(!m.is_deterministic());
        // zero and add(1) both fire at (q0, 0)
        let m = machine("ocm unary\ninit q0\nq0 zero q1\nq0 add(1) q1\nq1 add(1) q0\n");
        assert!(!m.is_deterministic());
        let m = machine("ocm unary\ninit q0\nq0 add(1) q1\nq1 add(1) q0\n");
        assert!(m.is_deterministic());
        // the add(-5) edge only becomes enabled once the counter grows
        let m = machine("ocm unary\ninit q0\nq0 add(1) q0\nq0 add(-5) q0\n");
        assert!(!m.is_deterministic());
    }

    #[test]
    fn unary_periodic_extraction() {
        let m = machine("ocm unary\ninit q0\nq0 add(1) q1\nq1 add(1) q0\n");
        match m.comp_unary().unwrap() {
            Computation::Periodic(w) => {
                assert!(w.prefix().is_empty());
                assert_eq!(*w.offset(), BigUint::from(2u32));
                let vals: Vec<u64> = w.period().values().map(|v| v.to_u64().unwrap()).collect();
                assert_eq!(vals, vec![0, 1]);
                assert!(w.period().point(0).props.contains("q0"));
                assert!(w.period().point(1).props.contains("q1"));
            }
            _ => panic!("expected a periodic computation"),
        }
    }

    #[test]
    fn unary_zero_loop_and_halt() {
        let m = machine("ocm unary\ninit q0\nq0 zero q0\n");
        match m.comp_unary().unwrap() {
            Computation::Periodic(w) => {
                assert!(w.offset().is_zero());
                assert_eq!(w.period().len(), 1);
            }
            _ => panic!("expected periodic"),
        }
        let m = machine("ocm unary\ninit q0\nq0 add(-1) q1\n");
        match m.comp_unary().unwrap() {
            Computation::Finite(w) => {
                assert_eq!(w.len(), 1);
                assert!(w.point(0).props.contains("q0"));
            }
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn unary_extraction_matches_simulation() {
        let m = machine(
            "ocm unary\ninit q0\nq0 add(3) q1\nq1 add(-1) q2\nq2 add(-1) q3\nq3 add(2) q1\n",
        );
        let sim = simulate(&m, 40);
        match m.comp_unary().unwrap() {
            Computation::Periodic(w) => {
                for (i, (state, value)) in sim.iter().enumerate() {
                    let p = w.at(i as u64);
                    assert!(p.props.contains(state), "state at {i}");
                    assert_eq!(p.value.to_u64().unwrap(), *value, "value at {i}");
                }
            }
            Computation::Finite(_) => panic!("run is infinite"),
        }
    }

    #[test]
    fn binary_countdown() {
        // climb to 2^10, count down by 1, then halt after the zero test
        let m = machine("ocm binary\ninit q0\nq0 add(1024) q1\nq1 add(-1) q1\nq1 zero q2\n");
        match m.comp_binary().unwrap() {
            SlpComputation::Finite(g) => {
                let expanded = g.expand(1 << 12).unwrap();
                let sim = simulate(&m, 1 << 12);
                assert_eq!(expanded.len(), sim.len());
                for (i, (state, value)) in sim.iter().enumerate() {
                    assert!(expanded.point(i).props.contains(state), "state at {i}");
                    assert_eq!(
                        expanded.point(i).value.to_u64().unwrap(),
                        *value,
                        "value at {i}"
                    );
                }
            }
            _ => panic!("expected a finite computation"),
        }
    }

    #[test]
    fn binary_agrees_with_unary_on_growing_loop() {
        let text = "ocm unary\ninit q0\nq0 add(1) q1\nq1 add(1) q0\n";
        let m = machine(text);
        let unary = match m.comp_unary().unwrap() {
            Computation::Periodic(w) => w,
            _ => panic!(),
        };
        match m.comp_binary().unwrap() {
            SlpComputation::Periodic {
                prefix,
                period,
                offset,
            } => {
                let view_len = 3 * (unary.prefix().len() + unary.period().len()) as u64;
                let plen = prefix.as_ref().map_or(0, |g| g.length().to_u64().unwrap());
                let n2 = period.length().to_u64().unwrap();
                for i in 0..view_len {
                    let expect = unary.at(i);
                    let got = if i < plen {
                        prefix.as_ref().unwrap().at_u64(i).unwrap()
                    } else {
                        let rel = i - plen;
                        let mut p = period.at_u64(rel % n2).unwrap();
                        p.value += &offset * BigUint::from(rel / n2);
                        p
                    };
                    assert_eq!(expect, got, "position {i}");
                }
            }
            _ => panic!("expected periodic"),
        }
    }

    #[test]
    fn model_check_examples() {
        let m = machine("ocm unary\ninit q0\nq0 add(1) q0\n");
        assert!(
            m.model_check(&parse("G(x >= 0)").unwrap())
                .unwrap()
                .satisfied
        );
        assert!(
            m.model_check(&parse("F(q0 & x = 1)").unwrap())
                .unwrap()
                .satisfied
        );
        let halt = machine("ocm unary\ninit q0\nq0 add(-1) q1\n");
        assert!(
            !halt
                .model_check(&parse("X true").unwrap())
                .unwrap()
                .satisfied
        );
    }

    #[test]
    fn roundtrip_format() {
        let m = machine("ocm binary\ninit q0\nq0 add(-3) q2\nq2 zero q0\n");
        let m2 = machine(&m.to_string());
        assert_eq!(m.to_string(), m2.to_string());
    }
}
