//! Straight-line programs generating data words.
//!
//! An SLP is an acyclic grammar with one rule per variable, each of the form
//! `B C` (concatenation), `B + d` (shift all values by `d`), or a single
//! point `(P, d)`. The generated word can be exponentially longer than the
//! program, so all compressed-domain operations (length, min, max, random
//! access) work directly on the rules.

use crate::dataword::{DataPoint, DataWord, DataWordError};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Default expansion budget: exceeding it is an error, not a truncation.
pub const DEFAULT_EXPANSION_BUDGET: u64 = 1 << 20;

pub type VarId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Concat(VarId, VarId),
    Shift(VarId, BigUint),
    Leaf(BTreeSet<String>, BigUint),
}

/// A straight-line program with precomputed per-variable lengths and
/// value bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slp {
    names: Vec<String>,
    rules: Vec<Rule>,
    output: VarId,
    lengths: Vec<BigUint>,
    mins: Vec<BigUint>,
    maxs: Vec<BigUint>,
}

impl Slp {
    /// A single-leaf program.
    pub fn leaf(props: BTreeSet<String>, value: BigUint) -> Slp {
        let mut b = SlpBuilder::new();
        let v = b.leaf(props, value);
        b.build(v)
    }

    /// A program expanding to exactly `w` (balanced concatenation tree).
    pub fn from_word(w: &DataWord) -> Result<Slp, DataWordError> {
        let mut b = SlpBuilder::new();
        let v = b.word(w)?;
        Ok(b.build(v))
    }

    pub fn output(&self) -> VarId {
        self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v]
    }

    /// `|val(G)|`, computed bottom-up without expansion.
    pub fn length(&self) -> &BigUint {
        &self.lengths[self.output]
    }

    /// Smallest data value of the generated word.
    pub fn min_value(&self) -> &BigUint {
        &self.mins[self.output]
    }

    /// Largest data value of the generated word.
    pub fn max_value(&self) -> &BigUint {
        &self.maxs[self.output]
    }

    /// The generated word, by structural recursion on the rules. Fails when
    /// the decoded length exceeds `budget` points.
    pub fn expand(&self, budget: u64) -> Result<DataWord, DataWordError> {
        if *self.length() > BigUint::from(budget) {
            return Err(DataWordError::BudgetExceeded {
                budget,
                length: self.length().clone(),
            });
        }
        let mut out = Vec::new();
        self.expand_into(self.output, &BigUint::zero(), &mut out);
        Ok(DataWord::new(out))
    }

    fn expand_into(&self, v: VarId, shift: &BigUint, out: &mut Vec<DataPoint>) {
        match &self.rules[v] {
            Rule::Leaf(props, d) => out.push(DataPoint {
                props: props.clone(),
                value: d + shift,
            }),
            Rule::Shift(b, d) => self.expand_into(*b, &(shift + d), out),
            Rule::Concat(b, c) => {
                self.expand_into(*b, shift, out);
                self.expand_into(*c, shift, out);
            }
        }
    }

    /// Random access: the point at position `i` of the generated word,
    /// found by descending the rules with `length` and accumulating shifts.
    pub fn at(&self, i: &BigUint) -> Result<DataPoint, DataWordError> {
        if i >= self.length() {
            return Err(DataWordError::IndexOutOfRange {
                index: i.clone(),
                length: self.length().clone(),
            });
        }
        let mut v = self.output;
        let mut i = i.clone();
        let mut shift = BigUint::zero();
        loop {
            match &self.rules[v] {
                Rule::Leaf(props, d) => {
                    return Ok(DataPoint {
                        props: props.clone(),
                        value: d + &shift,
                    })
                }
                Rule::Shift(b, d) => {
                    shift += d;
                    v = *b;
                }
                Rule::Concat(b, c) => {
                    if i < self.lengths[*b] {
                        v = *b;
                    } else {
                        i -= &self.lengths[*b];
                        v = *c;
                    }
                }
            }
        }
    }

    pub fn at_u64(&self, i: u64) -> Result<DataPoint, DataWordError> {
        self.at(&BigUint::from(i))
    }

    /// An SLP for `u_{+k} u_{+2k} ... u_{+mk}`, of size polynomial in
    /// `|u| + log m`.
    ///
    /// For `k >= 0` this uses the doubling recurrence
    /// `U_{n+1} = U_n (U_n)_{+2^n k}` composed along the binary expansion of
    /// `m`. For `k < 0` the product is built for the reversed word
    /// `y = (u_{+mk})^rev` with positive step `-k` and the resulting rules
    /// are reversed by swapping the children of every concatenation.
    pub fn iterate(u: &DataWord, m: &BigUint, k: &BigInt) -> Result<Slp, DataWordError> {
        if u.is_empty() || m.is_zero() {
            return Err(DataWordError::IteratePrecondition(
                "base word and repetition count must be nonempty".to_string(),
            ));
        }
        if k.is_negative() {
            let min = BigInt::from(u.min_value().unwrap().clone());
            if (min + BigInt::from(m.clone()) * k).is_negative() {
                return Err(DataWordError::IteratePrecondition(format!(
                    "data value would become negative after {m} shifts by {k}"
                )));
            }
            let y = u.shift(&(BigInt::from(m.clone()) * k))?.reversed();
            let step = k.magnitude();
            let mut b = SlpBuilder::new();
            let base = b.word(&y)?;
            let mut top = base;
            if *m > BigUint::one() {
                let rest = b.iterate_positive(base, y.len() as u64, &(m - 1u32), step);
                top = b.concat(base, rest);
            }
            let mut slp = b.build(top);
            for r in &mut slp.rules {
                if let Rule::Concat(x, y) = r {
                    std::mem::swap(x, y);
                }
            }
            slp.recompute();
            Ok(slp)
        } else {
            let mut b = SlpBuilder::new();
            let base = b.word(u)?;
            let top = b.iterate_positive(base, u.len() as u64, m, k.magnitude());
            Ok(b.build(top))
        }
    }

    fn recompute(&mut self) {
        let n = self.rules.len();
        let mut lengths = vec![BigUint::zero(); n];
        let mut mins = vec![BigUint::zero(); n];
        let mut maxs = vec![BigUint::zero(); n];
        for v in 0..n {
            match &self.rules[v] {
                Rule::Leaf(_, d) => {
                    lengths[v] = BigUint::one();
                    mins[v] = d.clone();
                    maxs[v] = d.clone();
                }
                Rule::Shift(b, d) => {
                    lengths[v] = lengths[*b].clone();
                    mins[v] = &mins[*b] + d;
                    maxs[v] = &maxs[*b] + d;
                }
                Rule::Concat(b, c) => {
                    lengths[v] = &lengths[*b] + &lengths[*c];
                    mins[v] = mins[*b].clone().min(mins[*c].clone());
                    maxs[v] = maxs[*b].clone().max(maxs[*c].clone());
                }
            }
        }
        self.lengths = lengths;
        self.mins = mins;
        self.maxs = maxs;
    }
}

/// Incremental SLP construction. Rules may only reference variables that
/// already exist, so the result is acyclic by construction.
#[derive(Debug, Default, Clone)]
pub struct SlpBuilder {
    names: Vec<String>,
    rules: Vec<Rule>,
}

impl SlpBuilder {
    pub fn new() -> Self {
        SlpBuilder::default()
    }

    fn push(&mut self, rule: Rule) -> VarId {
        let id = self.rules.len();
        self.names.push(format!("A{id}"));
        self.rules.push(rule);
        id
    }

    pub fn leaf(&mut self, props: BTreeSet<String>, value: BigUint) -> VarId {
        self.push(Rule::Leaf(props, value))
    }

    pub fn concat(&mut self, a: VarId, b: VarId) -> VarId {
        assert!(a < self.rules.len() && b < self.rules.len());
        self.push(Rule::Concat(a, b))
    }

    pub fn shift(&mut self, a: VarId, d: BigUint) -> VarId {
        assert!(a < self.rules.len());
        if d.is_zero() {
            return a;
        }
        self.push(Rule::Shift(a, d))
    }

    /// A variable expanding to `w`, as a balanced concatenation of leaves.
    pub fn word(&mut self, w: &DataWord) -> Result<VarId, DataWordError> {
        if w.is_empty() {
            return Err(DataWordError::IteratePrecondition(
                "cannot build an SLP for the empty word".to_string(),
            ));
        }
        let leaves: Vec<VarId> = w
            .iter()
            .map(|p| self.leaf(p.props.clone(), p.value.clone()))
            .collect();
        Ok(self.balance(&leaves))
    }

    fn balance(&mut self, vars: &[VarId]) -> VarId {
        match vars {
            [v] => *v,
            _ => {
                let mid = vars.len() / 2;
                let left = self.balance(&vars[..mid]);
                let right = self.balance(&vars[mid..]);
                self.concat(left, right)
            }
        }
    }

    /// `base_{+k} base_{+2k} ... base_{+mk}` for `k > 0` (or `base^m` for
    /// `k = 0`), via doubling and the binary expansion of `m`.
    fn iterate_positive(&mut self, base: VarId, _len: u64, m: &BigUint, k: &BigUint) -> VarId {
        // u_n = base_{+k} ... base_{+2^n k}
        let bits = m.bits();
        let mut doubled = Vec::with_capacity(bits as usize);
        let mut u = self.shift(base, k.clone());
        doubled.push(u);
        for n in 0..bits.saturating_sub(1) {
            let shifted = self.shift(u, (BigUint::one() << n) * k);
            u = self.concat(u, shifted);
            doubled.push(u);
        }
        let mut acc: Option<(VarId, BigUint)> = None; // (product so far, count so far)
        for n in 0..bits {
            if !m.bit(n) {
                continue;
            }
            acc = Some(match acc {
                None => (doubled[n as usize], BigUint::one() << n),
                Some((v, cnt)) => {
                    let shifted = self.shift(doubled[n as usize], &cnt * k);
                    (self.concat(v, shifted), cnt + (BigUint::one() << n))
                }
            });
        }
        acc.unwrap().0
    }

    pub fn build(self, output: VarId) -> Slp {
        let mut slp = Slp {
            names: self.names,
            rules: self.rules,
            output,
            lengths: Vec::new(),
            mins: Vec::new(),
            maxs: Vec::new(),
        };
        slp.recompute();
        slp
    }
}

/// Parses the SLP text format. `#` starts a comment.
///
/// ```text
/// slp output=A0
/// A0 = B C
/// B = C + 5
/// C = leaf {p} 7
/// ```
pub fn parse_slp(text: &str) -> Result<Slp, DataWordError> {
    let err = |line: usize, msg: String| DataWordError::Parse { line, msg };
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
    let (hline, header) = lines.next().ok_or_else(|| err(0, "empty input".into()))?;
    let output_name = header
        .strip_prefix("slp")
        .map(str::trim)
        .and_then(|r| r.strip_prefix("output="))
        .ok_or_else(|| err(hline, "expected header `slp output=A0`".into()))?
        .trim()
        .to_string();

    struct RawRule {
        line: usize,
        rhs: Vec<String>,
    }
    let mut raw: HashMap<String, RawRule> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    for (n, l) in lines {
        let (name, rhs) = l
            .split_once('=')
            .ok_or_else(|| err(n, "expected `NAME = ...`".into()))?;
        let name = name.trim().to_string();
        // keep `{p,q}` together as one token
        let mut toks: Vec<String> = Vec::new();
        let rhs = rhs.trim();
        let mut rest = rhs;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if let Some(r) = rest.strip_prefix('{') {
                let close = r
                    .find('}')
                    .ok_or_else(|| err(n, "missing `}` in leaf".into()))?;
                toks.push(format!("{{{}}}", &r[..close]));
                rest = &r[close + 1..];
            } else {
                let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                toks.push(rest[..end].to_string());
                rest = &rest[end..];
            }
        }
        if raw
            .insert(name.clone(), RawRule { line: n, rhs: toks })
            .is_some()
        {
            return Err(err(n, format!("duplicate rule for `{name}`")));
        }
        order.push(name);
    }

    let ids: HashMap<String, VarId> = order
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect();
    let lookup = |name: &str, line: usize| -> Result<VarId, DataWordError> {
        ids.get(name)
            .copied()
            .ok_or_else(|| err(line, format!("undefined variable `{name}`")))
    };

    let mut rules = vec![Rule::Leaf(BTreeSet::new(), BigUint::zero()); order.len()];
    for name in &order {
        let RawRule { line, rhs } = &raw[name];
        let n = *line;
        let strs: Vec<&str> = rhs.iter().map(String::as_str).collect();
        let rule = match strs.as_slice() {
            ["leaf", props, d] => {
                let inner = props
                    .strip_prefix('{')
                    .and_then(|p| p.strip_suffix('}'))
                    .ok_or_else(|| err(n, "leaf expects `leaf {p,q} d`".into()))?;
                let mut set = BTreeSet::new();
                for p in inner.split(',') {
                    let p = p.trim();
                    if !p.is_empty() {
                        set.insert(p.to_string());
                    }
                }
                let d = d
                    .parse::<BigUint>()
                    .map_err(|_| err(n, "leaf value must be a natural number".into()))?;
                Rule::Leaf(set, d)
            }
            [b, "+", d] => {
                let d = d
                    .parse::<BigUint>()
                    .map_err(|_| err(n, "shift amount must be a natural number".into()))?;
                Rule::Shift(lookup(b, n)?, d)
            }
            [b, c] => Rule::Concat(lookup(b, n)?, lookup(c, n)?),
            _ => return Err(err(n, "expected `B C`, `B + d`, or `leaf {p} d`".into())),
        };
        rules[ids[name]] = rule;
    }

    // acyclicity check by depth-first search
    let mut state = vec![0u8; rules.len()]; // 0 new, 1 open, 2 done
    fn visit(v: VarId, rules: &[Rule], state: &mut [u8]) -> bool {
        match state[v] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        state[v] = 1;
        let ok = match &rules[v] {
            Rule::Leaf(..) => true,
            Rule::Shift(b, _) => visit(*b, rules, state),
            Rule::Concat(b, c) => visit(*b, rules, state) && visit(*c, rules, state),
        };
        state[v] = 2;
        ok
    }
    let out = lookup(&output_name, hline)?;
    if !visit(out, &rules, &mut state) {
        return Err(err(hline, "SLP rules are cyclic".into()));
    }

    let mut slp = Slp {
        names: order,
        rules,
        output: out,
        lengths: Vec::new(),
        mins: Vec::new(),
        maxs: Vec::new(),
    };
    // reorder so that children precede parents, as recompute assumes
    let mut topo: Vec<VarId> = Vec::with_capacity(slp.rules.len());
    let mut seen = vec![false; slp.rules.len()];
    fn order_of(v: VarId, rules: &[Rule], seen: &mut [bool], topo: &mut Vec<VarId>) {
        if seen[v] {
            return;
        }
        seen[v] = true;
        match &rules[v] {
            Rule::Leaf(..) => {}
            Rule::Shift(b, _) => order_of(*b, rules, seen, topo),
            Rule::Concat(b, c) => {
                order_of(*b, rules, seen, topo);
                order_of(*c, rules, seen, topo);
            }
        }
        topo.push(v);
    }
    for v in 0..slp.rules.len() {
        order_of(v, &slp.rules, &mut seen, &mut topo);
    }
    let pos: HashMap<VarId, VarId> = topo.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut names = vec![String::new(); slp.names.len()];
    let mut rules = vec![Rule::Leaf(BTreeSet::new(), BigUint::zero()); slp.rules.len()];
    for (old, new) in &pos {
        names[*new] = slp.names[*old].clone();
        rules[*new] = match &slp.rules[*old] {
            Rule::Leaf(p, d) => Rule::Leaf(p.clone(), d.clone()),
            Rule::Shift(b, d) => Rule::Shift(pos[b], d.clone()),
            Rule::Concat(b, c) => Rule::Concat(pos[b], pos[c]),
        };
    }
    slp.names = names;
    slp.rules = rules;
    slp.output = pos[&out];
    slp.recompute();
    Ok(slp)
}

impl fmt::Display for Slp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "slp output={}", self.names[self.output])?;
        for (v, rule) in self.rules.iter().enumerate() {
            match rule {
                Rule::Concat(b, c) => writeln!(
                    f,
                    "{} = {} {}",
                    self.names[v], self.names[*b], self.names[*c]
                )?,
                Rule::Shift(b, d) => writeln!(f, "{} = {} + {}", self.names[v], self.names[*b], d)?,
                Rule::Leaf(props, d) => {
                    write!(f, "{} = leaf {{", self.names[v])?;
                    for (n, p) in props.iter().enumerate() {
                        if n > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{p}")?;
                    }
                    writeln!(f, "}} {d}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn values(w: &DataWord) -> Vec<u64> {
        w.values().map(|v| v.to_u64().unwrap()).collect()
    }

    fn concat_shift_example() -> Slp {
        // A0 = B C, B = leaf {} 5, C = B + 3  =>  (5)(8)
        let mut b = SlpBuilder::new();
        let leaf = b.leaf(BTreeSet::new(), 5u32.into());
        let shifted = b.shift(leaf, 3u32.into());
        let top = b.concat(leaf, shifted);
        b.build(top)
    }

    fn doubling_chain(n: usize, value: u64) -> Slp {
        let mut b = SlpBuilder::new();
        let mut v = b.leaf(BTreeSet::new(), value.into());
        for _ in 0..n {
            v = b.concat(v, v);
        }
        b.build(v)
    }

    #[test]
    fn expand_basics() {
        let g = Slp::leaf(["p".to_string()].into(), 5u32.into());
        let w = g.expand(16).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w.point(0).props.contains("p"));

        let g = concat_shift_example();
        assert_eq!(values(&g.expand(16).unwrap()), vec![5, 8]);

        let mut b = SlpBuilder::new();
        let leaf = b.leaf(BTreeSet::new(), 1u32.into());
        let top = b.concat(leaf, leaf);
        let g = b.build(top);
        assert_eq!(values(&g.expand(16).unwrap()), vec![1, 1]);
    }

    #[test]
    fn length_min_max() {
        let g = doubling_chain(10, 2);
        assert_eq!(*g.length(), BigUint::from(1024u32));
        assert_eq!(*g.min_value(), BigUint::from(2u32));
        assert_eq!(*g.max_value(), BigUint::from(2u32));

        let g = concat_shift_example();
        assert_eq!(*g.length(), BigUint::from(2u32));
        assert_eq!(*g.min_value(), BigUint::from(5u32));
        assert_eq!(*g.max_value(), BigUint::from(8u32));
    }

    #[test]
    fn random_access() {
        let g = concat_shift_example();
        assert_eq!(g.at_u64(1).unwrap().value, BigUint::from(8u32));
        assert!(matches!(
            g.at_u64(2),
            Err(DataWordError::IndexOutOfRange { .. })
        ));
        let g = doubling_chain(10, 2);
        assert_eq!(g.at_u64(1023).unwrap().value, BigUint::from(2u32));
    }

    #[test]
    fn budget_is_enforced() {
        let g = doubling_chain(12, 1);
        assert!(matches!(
            g.expand(1024),
            Err(DataWordError::BudgetExceeded { .. })
        ));
        assert_eq!(g.expand(4096).unwrap().len(), 4096);
    }

    #[test]
    fn iterate_small() {
        let u = DataWord::from_values([3]);
        let g = Slp::iterate(&u, &2u32.into(), &BigInt::from(1)).unwrap();
        assert_eq!(values(&g.expand(16).unwrap()), vec![4, 5]);

        let u = DataWord::from_values([0, 1]);
        let g = Slp::iterate(&u, &3u32.into(), &BigInt::from(2)).unwrap();
        assert_eq!(values(&g.expand(16).unwrap()), vec![2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn iterate_negative_step() {
        let u = DataWord::from_values([10]);
        let g = Slp::iterate(&u, &3u32.into(), &BigInt::from(-2)).unwrap();
        assert_eq!(values(&g.expand(16).unwrap()), vec![8, 6, 4]);

        let u = DataWord::from_values([10]);
        assert!(Slp::iterate(&u, &6u32.into(), &BigInt::from(-2)).is_err());
    }

    #[test]
    fn iterate_matches_explicit_product() {
        for len in 1..=4usize {
            for m in 1..=20u32 {
                for k in -5i64..=5 {
                    let u = DataWord::from_values((0..len as u64).map(|i| 7 + 3 * i));
                    let kk = BigInt::from(k);
                    let min = u.min_value().unwrap().clone();
                    if BigInt::from(min) + BigInt::from(m) * &kk < BigInt::zero() {
                        continue;
                    }
                    let g = Slp::iterate(&u, &m.into(), &kk).unwrap();
                    let mut expect = DataWord::empty();
                    for i in 1..=m {
                        expect = expect.concat(&u.shift(&(BigInt::from(i) * &kk)).unwrap());
                    }
                    assert_eq!(g.expand(1 << 12).unwrap(), expect, "len={len} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn parse_and_print() {
        let txt = "slp output=A0\nA0 = B C\nB = leaf {} 5\nC = B + 3\n";
        let g = parse_slp(txt).unwrap();
        assert_eq!(values(&g.expand(16).unwrap()), vec![5, 8]);
        assert_eq!(*g.min_value(), BigUint::from(5u32));
        let reparsed = parse_slp(&g.to_string()).unwrap();
        assert_eq!(reparsed.expand(16).unwrap(), g.expand(16).unwrap());
    }

    #[test]
    fn parse_rejects_cycles_and_unknowns() {
        assert!(parse_slp("slp output=A\nA = A B\nB = leaf {} 1\n").is_err());
        assert!(parse_slp("slp output=A\nA = B C\nB = leaf {} 1\n").is_err());
    }
}
