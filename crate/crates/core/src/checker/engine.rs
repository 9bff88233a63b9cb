//! The bounded relative-semantics engine.
//!
//! Evaluation is a memoized AND-OR recursion over triples of a position, a
//! difference valuation and a subformula. On infinite words positions are
//! folded into the window `[0, |u1|+|u2|)`, valuations are clamped to
//! `C+M+1` at positions past the prefix, and each Until/Release search is
//! cut off at `|u1| + n|u2|` where `n` is recomputed from the current
//! valuation. All word access goes through a view, so the same recursion
//! runs against explicit periods and against SLP-compressed words without
//! expanding them.

use super::{big_to_u64, EngineBounds, Verdict, WitnessStep};
use crate::dataword::PeriodicWord;
use crate::formula::{Formula, Rel};
use crate::slp::Slp;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use std::collections::HashMap;

/// Word access used by the engine: positions are `u64`, values `BigInt`.
/// Value bounds come from the representation (compressed-domain min/max for
/// SLPs), never from expansion.
pub(crate) trait WordView {
    fn prefix_len(&self) -> u64;
    /// `None` for finite words.
    fn period_len(&self) -> Option<u64>;
    /// `Some(n)` for finite words of length `n`.
    fn total_len(&self) -> Option<u64>;
    fn value(&self, i: u64) -> BigInt;
    fn has_prop(&self, i: u64, p: &str) -> bool;
    /// (min, max) over the period; only called on infinite words.
    fn period_bounds(&self) -> (BigInt, BigInt);
    /// (min, max) over prefix plus period; only called on infinite words.
    fn window_bounds(&self) -> (BigInt, BigInt);
    /// Per-repetition offset.
    fn offset(&self) -> BigInt;

    fn fold(&self, i: u64) -> u64 {
        match self.period_len() {
            Some(n2) => {
                let n1 = self.prefix_len();
                if i < n1 {
                    i
                } else {
                    (i - n1) % n2 + n1
                }
            }
            None => i,
        }
    }
}

pub(crate) struct PeriodicView<'a> {
    word: &'a PeriodicWord,
    /// Values of the `|u1|+|u2|` window, precomputed.
    window: Vec<BigInt>,
    k: BigInt,
}

impl<'a> PeriodicView<'a> {
    pub fn new(word: &'a PeriodicWord) -> Self {
        let n = word.prefix().len() + word.period().len();
        let window = (0..n as u64)
            .map(|i| BigInt::from(word.value_at(i)))
            .collect();
        PeriodicView {
            word,
            window,
            k: BigInt::from(word.offset().clone()),
        }
    }
}

impl WordView for PeriodicView<'_> {
    fn prefix_len(&self) -> u64 {
        self.word.prefix().len() as u64
    }

    fn period_len(&self) -> Option<u64> {
        Some(self.word.period().len() as u64)
    }

    fn total_len(&self) -> Option<u64> {
        None
    }

    fn value(&self, i: u64) -> BigInt {
        let n1 = self.prefix_len();
        let n2 = self.word.period().len() as u64;
        if i < n1 {
            self.window[i as usize].clone()
        } else {
            let wraps = (i - n1) / n2;
            &self.window[self.fold(i) as usize] + &self.k * BigInt::from(wraps)
        }
    }

    fn has_prop(&self, i: u64, p: &str) -> bool {
        let f = self.fold(i) as usize;
        let n1 = self.word.prefix().len();
        if f < n1 {
            self.word.prefix().point(f).props.contains(p)
        } else {
            self.word.period().point(f - n1).props.contains(p)
        }
    }

    fn period_bounds(&self) -> (BigInt, BigInt) {
        (
            BigInt::from(self.word.period().min_value().unwrap().clone()),
            BigInt::from(self.word.period().max_value().unwrap().clone()),
        )
    }

    fn window_bounds(&self) -> (BigInt, BigInt) {
        let (lo, hi) = self.period_bounds();
        match (
            self.word.prefix().min_value(),
            self.word.prefix().max_value(),
        ) {
            (Some(a), Some(b)) => (
                lo.min(BigInt::from(a.clone())),
                hi.max(BigInt::from(b.clone())),
            ),
            _ => (lo, hi),
        }
    }

    fn offset(&self) -> BigInt {
        self.k.clone()
    }
}

/// An infinite word `val(g1) (val(g2))^w +k` given by SLPs, or a finite
/// word `val(g)` when `period` is absent.
pub(crate) struct SlpView<'a> {
    prefix: Option<&'a Slp>,
    period: Option<&'a Slp>,
    prefix_len: u64,
    period_len: u64,
    k: BigInt,
}

impl<'a> SlpView<'a> {
    pub fn infinite(prefix: Option<&'a Slp>, period: &'a Slp, k: &BigUint) -> Self {
        SlpView {
            prefix,
            period: Some(period),
            prefix_len: prefix.map_or(0, |g| big_to_u64_biguint(g.length())),
            period_len: big_to_u64_biguint(period.length()),
            k: BigInt::from(k.clone()),
        }
    }

    pub fn finite(g: &'a Slp) -> Self {
        SlpView {
            prefix: Some(g),
            period: None,
            prefix_len: big_to_u64_biguint(g.length()),
            period_len: 0,
            k: BigInt::zero(),
        }
    }
}

fn big_to_u64_biguint(v: &BigUint) -> u64 {
    use num_traits::ToPrimitive;
    v.to_u64()
        .unwrap_or_else(|| panic!("SLP length {v} exceeds the supported position range"))
}

impl WordView for SlpView<'_> {
    fn prefix_len(&self) -> u64 {
        self.prefix_len
    }

    fn period_len(&self) -> Option<u64> {
        self.period.map(|_| self.period_len)
    }

    fn total_len(&self) -> Option<u64> {
        match self.period {
            Some(_) => None,
            None => Some(self.prefix_len),
        }
    }

    fn value(&self, i: u64) -> BigInt {
        if i < self.prefix_len {
            let g = self.prefix.expect("position within prefix");
            return BigInt::from(g.at_u64(i).expect("index checked").value);
        }
        let g = self.period.expect("position beyond a finite word");
        let rel = i - self.prefix_len;
        let idx = rel % self.period_len;
        let wraps = rel / self.period_len;
        BigInt::from(g.at_u64(idx).expect("index checked").value) + &self.k * BigInt::from(wraps)
    }

    fn has_prop(&self, i: u64, p: &str) -> bool {
        if i < self.prefix_len {
            let g = self.prefix.expect("position within prefix");
            return g.at_u64(i).expect("index checked").props.contains(p);
        }
        let g = self.period.expect("position beyond a finite word");
        let rel = (i - self.prefix_len) % self.period_len;
        g.at_u64(rel).expect("index checked").props.contains(p)
    }

    fn period_bounds(&self) -> (BigInt, BigInt) {
        let g = self.period.expect("finite words have no period");
        (
            BigInt::from(g.min_value().clone()),
            BigInt::from(g.max_value().clone()),
        )
    }

    fn window_bounds(&self) -> (BigInt, BigInt) {
        let (lo, hi) = self.period_bounds();
        match self.prefix {
            Some(g) => (
                lo.min(BigInt::from(g.min_value().clone())),
                hi.max(BigInt::from(g.max_value().clone())),
            ),
            None => (lo, hi),
        }
    }

    fn offset(&self) -> BigInt {
        self.k.clone()
    }
}

/// Interned negation-normal-form representation: identical subformulas
/// share a node, registers are numbered, and each node knows which
/// registers occur free below it (those are the memo key components).
struct Ir {
    nodes: Vec<Node>,
    root: usize,
    free: Vec<Vec<usize>>,
    reg_count: usize,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Prop(String),
    NotProp(String),
    Constraint(usize, Rel, BigInt),
    And(usize, usize),
    Or(usize, usize),
    Until(usize, usize),
    Release(usize, usize),
    Freeze(usize, usize),
}

impl Ir {
    fn build(f: &Formula) -> Ir {
        struct B {
            nodes: Vec<Node>,
            dedup: HashMap<Node, usize>,
            regs: HashMap<String, usize>,
        }
        impl B {
            fn intern(&mut self, n: Node) -> usize {
                if let Some(&id) = self.dedup.get(&n) {
                    return id;
                }
                let id = self.nodes.len();
                self.nodes.push(n.clone());
                self.dedup.insert(n, id);
                id
            }

            fn reg(&mut self, x: &str) -> usize {
                let next = self.regs.len();
                *self.regs.entry(x.to_string()).or_insert(next)
            }

            fn go(&mut self, f: &Formula) -> usize {
                let node = match f {
                    Formula::True => Node::True,
                    Formula::Prop(p) => Node::Prop(p.clone()),
                    Formula::Constraint(x, rel, c) => {
                        Node::Constraint(self.reg(x), *rel, c.clone())
                    }
                    Formula::And(a, b) => {
                        let (a, b) = (self.go(a), self.go(b));
                        Node::And(a, b)
                    }
                    Formula::Or(a, b) => {
                        let (a, b) = (self.go(a), self.go(b));
                        Node::Or(a, b)
                    }
                    Formula::Until(a, b) => {
                        let (a, b) = (self.go(a), self.go(b));
                        Node::Until(a, b)
                    }
                    Formula::Release(a, b) => {
                        let (a, b) = (self.go(a), self.go(b));
                        Node::Release(a, b)
                    }
                    Formula::Freeze(x, a) => {
                        let x = self.reg(x);
                        let a = self.go(a);
                        Node::Freeze(x, a)
                    }
                    Formula::Not(inner) => match inner.as_ref() {
                        Formula::True => Node::False,
                        Formula::Prop(p) => Node::NotProp(p.clone()),
                        _ => unreachable!("engine input must be in negation normal form"),
                    },
                    Formula::UntilAnnotated(..) => {
                        unreachable!("engine input must be desugared")
                    }
                };
                self.intern(node)
            }
        }
        let mut b = B {
            nodes: Vec::new(),
            dedup: HashMap::new(),
            regs: HashMap::new(),
        };
        let root = b.go(f);
        let mut free: Vec<Vec<usize>> = Vec::with_capacity(b.nodes.len());
        for (id, node) in b.nodes.iter().enumerate() {
            let set: Vec<usize> = match node {
                Node::Constraint(x, _, _) => vec![*x],
                Node::And(a, c) | Node::Or(a, c) | Node::Until(a, c) | Node::Release(a, c) => {
                    debug_assert!(*a < id && *c < id);
                    let mut s = free[*a].clone();
                    for r in &free[*c] {
                        if !s.contains(r) {
                            s.push(*r);
                        }
                    }
                    s.sort_unstable();
                    s
                }
                Node::Freeze(x, a) => free[*a].iter().copied().filter(|r| r != x).collect(),
                _ => Vec::new(),
            };
            free.push(set);
        }
        Ir {
            nodes: b.nodes,
            root,
            free,
            reg_count: b.regs.len(),
        }
    }
}

struct Engine<'a, V: WordView> {
    view: &'a V,
    ir: &'a Ir,
    bounds: EngineBounds,
    clamp: BigInt,
    memo: HashMap<(u64, usize, Vec<BigInt>), bool>,
}

impl<V: WordView> Engine<'_, V> {
    /// Valuation after stepping from position `i` (value `d_i`) to `j`.
    fn advance(&self, delta: &[BigInt], d_i: &BigInt, j: u64) -> (u64, Vec<BigInt>) {
        let diff = self.view.value(j) - d_i;
        let clamp_here = self.view.period_len().is_some() && j >= self.view.prefix_len();
        let next = delta
            .iter()
            .map(|v| {
                let moved = v + &diff;
                if clamp_here && moved > self.clamp {
                    self.clamp.clone()
                } else {
                    moved
                }
            })
            .collect();
        (self.view.fold(j), next)
    }

    /// Last position an Until/Release starting at folded position `i` with
    /// valuation `delta` needs to examine.
    fn search_bound(&self, node: usize, i: u64, delta: &[BigInt]) -> u64 {
        match self.view.total_len() {
            Some(n) => n - 1,
            None => {
                let n1 = BigInt::from(self.view.prefix_len());
                let n2 = BigInt::from(self.view.period_len().unwrap());
                let m_delta = self.ir.free[node].iter().map(|r| delta[*r].clone()).min();
                let n = match m_delta {
                    Some(m) => {
                        let d_i = self.view.value(i);
                        self.bounds.n_delta(&m, &d_i)
                    }
                    None => BigInt::from(2),
                };
                big_to_u64(&(n1 + n * n2), "Until/Release search bound")
            }
        }
    }

    fn eval(&mut self, i: u64, delta: &[BigInt], node: usize) -> bool {
        let ir = self.ir;
        match &ir.nodes[node] {
            Node::True => true,
            Node::False => false,
            Node::Prop(p) => self.view.has_prop(i, p),
            Node::NotProp(p) => !self.view.has_prop(i, p),
            Node::Constraint(x, rel, c) => rel.eval(&delta[*x], c),
            Node::And(a, b) => self.eval(i, delta, *a) && self.eval(i, delta, *b),
            Node::Or(a, b) => self.eval(i, delta, *a) || self.eval(i, delta, *b),
            Node::Freeze(x, a) => {
                let mut d2 = delta.to_vec();
                d2[*x] = BigInt::zero();
                self.eval(i, &d2, *a)
            }
            Node::Until(..) | Node::Release(..) => {
                let key = (
                    i,
                    node,
                    ir.free[node]
                        .iter()
                        .map(|r| delta[*r].clone())
                        .collect::<Vec<_>>(),
                );
                if let Some(&v) = self.memo.get(&key) {
                    return v;
                }
                let v = match &ir.nodes[node] {
                    Node::Until(a, b) => self.until(node, i, delta, *a, *b).is_some(),
                    Node::Release(a, b) => self.release(node, i, delta, *a, *b).is_none(),
                    _ => unreachable!(),
                };
                self.memo.insert(key, v);
                v
            }
        }
    }

    /// Scans positions ascending. Returns the witness position where the
    /// right operand held with all intermediates satisfying the left one,
    /// or `None` when no such witness exists within the bound.
    fn until(&mut self, node: usize, i: u64, delta: &[BigInt], a: usize, b: usize) -> Option<u64> {
        let bound = self.search_bound(node, i, delta);
        let d_i = self.view.value(i);
        for j in i + 1..=bound {
            let (jf, dj) = self.advance(delta, &d_i, j);
            if self.eval(jf, &dj, b) {
                return Some(j);
            }
            if !self.eval(jf, &dj, a) {
                return None;
            }
        }
        None
    }

    /// Scans positions ascending while the right operand holds. Returns
    /// `None` when the release holds (all positions up to the bound satisfy
    /// the right operand, or the left operand rescues it), and the failing
    /// position otherwise.
    fn release(
        &mut self,
        node: usize,
        i: u64,
        delta: &[BigInt],
        a: usize,
        b: usize,
    ) -> Option<u64> {
        let bound = self.search_bound(node, i, delta);
        let d_i = self.view.value(i);
        for j in i + 1..=bound {
            let (jf, dj) = self.advance(delta, &d_i, j);
            if !self.eval(jf, &dj, b) {
                return Some(j);
            }
            if self.eval(jf, &dj, a) {
                return None;
            }
        }
        None
    }

    /// Extracts the existential choices of the outermost satisfied run.
    /// Only called on satisfied configurations; universal branches end the
    /// spine. The engine works in folded coordinates, so `shift` carries
    /// the number of positions folded away so far (a multiple of the period
    /// length) and recorded positions are absolute word indices.
    fn spine(
        &mut self,
        i: u64,
        shift: u64,
        delta: &[BigInt],
        node: usize,
        out: &mut Vec<WitnessStep>,
    ) {
        match self.ir.nodes[node].clone() {
            Node::Or(a, b) => {
                if self.eval(i, delta, a) {
                    out.push(WitnessStep::OrLeft);
                    self.spine(i, shift, delta, a, out);
                } else {
                    out.push(WitnessStep::OrRight);
                    self.spine(i, shift, delta, b, out);
                }
            }
            Node::Until(a, b) => {
                if let Some(j) = self.until(node, i, delta, a, b) {
                    out.push(WitnessStep::UntilAt(j + shift));
                    let d_i = self.view.value(i);
                    let (jf, dj) = self.advance(delta, &d_i, j);
                    self.spine(jf, shift + j - jf, &dj, b, out);
                }
            }
            Node::Release(a, b) => {
                // re-run the scan to find which alternative held
                let bound = self.search_bound(node, i, delta);
                let d_i = self.view.value(i);
                for j in i + 1..=bound {
                    let (jf, dj) = self.advance(delta, &d_i, j);
                    if self.eval(jf, &dj, a) && self.eval(jf, &dj, b) {
                        out.push(WitnessStep::ReleaseAt(j + shift));
                        self.spine(jf, shift + j - jf, &dj, a, out);
                        return;
                    }
                    if !self.eval(jf, &dj, b) {
                        return;
                    }
                }
                out.push(WitnessStep::ReleaseHold);
            }
            Node::Freeze(x, a) => {
                let mut d2 = delta.to_vec();
                d2[x] = BigInt::zero();
                self.spine(i, shift, &d2, a, out);
            }
            _ => {}
        }
    }
}

fn run<V: WordView>(view: &V, f: &Formula) -> Verdict {
    let nnf = f.desugar().nnf();
    let ir = Ir::build(&nnf);
    let bounds_formula = &nnf;
    let bounds = match view.period_len() {
        Some(_) => stats_bounds(view, bounds_formula),
        // finite words never compute n_delta; keep zeros
        None => EngineBounds::from_stats(
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            bounds_formula,
        ),
    };
    let clamp = bounds.clamp();
    let mut engine = Engine {
        view,
        ir: &ir,
        bounds,
        clamp,
        memo: HashMap::new(),
    };
    let delta0 = vec![BigInt::zero(); ir.reg_count];
    let satisfied = engine.eval(0, &delta0, ir.root);
    let witness = if satisfied {
        let mut steps = Vec::new();
        engine.spine(0, 0, &delta0, ir.root, &mut steps);
        Some(steps)
    } else {
        None
    };
    Verdict {
        satisfied,
        witness,
        memo_entries: engine.memo.len(),
    }
}

fn stats_bounds<V: WordView>(view: &V, f: &Formula) -> EngineBounds {
    let (min_u2, max_u2) = view.period_bounds();
    let (min_all, max_all) = view.window_bounds();
    EngineBounds::from_stats(min_u2, max_u2, min_all, max_all, view.offset(), f)
}

/// Decides `u1 (u2)^w +k |= f` with the memoized relative-semantics
/// engine.
pub fn check_periodic(w: &PeriodicWord, f: &Formula) -> Verdict {
    run(&PeriodicView::new(w), f)
}

/// Infinite-word checking where prefix and period are SLP-compressed; the
/// word is never expanded. An absent prefix SLP stands for the empty
/// prefix.
pub fn check_slp(prefix: Option<&Slp>, period: &Slp, offset: &BigUint, f: &Formula) -> Verdict {
    run(&SlpView::infinite(prefix, period, offset), f)
}

/// Finite-word checking over an SLP-compressed word.
pub fn check_slp_finite(g: &Slp, f: &Formula) -> Verdict {
    run(&SlpView::finite(g), f)
}
