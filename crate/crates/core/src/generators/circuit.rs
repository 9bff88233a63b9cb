//! Synchronous alternating monotone circuits with fanin and fanout 2, their
//! direct evaluator, and the three encodings of the circuit value problem
//! into path checking: pure MTL(F,X) over a finite non-monotonic word, its
//! infinite variant, and pure SMTL(F,X) over a strictly monotonic word.

use super::GenError;
use crate::dataword::{DataPoint, DataWord, PeriodicWord};
use crate::formula::{Formula, Interval, IntervalUnion};
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    And,
    Or,
}

/// A SAM2 circuit: `levels` levels of `gates` gates each, wires only
/// between consecutive levels, all degrees exactly 2, level types
/// alternating, level 1 holding the outputs and the last level the inputs.
#[derive(Debug, Clone)]
pub struct Sam2Circuit {
    levels: usize,
    gates: usize,
    /// Gate kind per inner level, index 0 = level 1.
    kinds: Vec<GateKind>,
    /// Input values of the last level.
    inputs: Vec<bool>,
    /// `wires[p]` connects upper level `p+1` and lower level `p+2`
    /// (1-based); entries are (upper gate, lower gate), 0-based, in input
    /// order. Parallel edges are allowed towards level 1.
    wires: Vec<Vec<(usize, usize)>>,
    /// Designated output gate in level 1, 0-based.
    output: usize,
}

impl Sam2Circuit {
    pub fn new(
        levels: usize,
        gates: usize,
        kinds: Vec<GateKind>,
        inputs: Vec<bool>,
        wires: Vec<Vec<(usize, usize)>>,
        output: usize,
    ) -> Result<Sam2Circuit, GenError> {
        let err = |msg: String| Err(GenError::MalformedCircuit(msg));
        if levels < 2 {
            return err("need at least two levels".into());
        }
        if gates == 0 {
            return err("need at least one gate per level".into());
        }
        if kinds.len() != levels - 1 {
            return err(format!("expected {} level kinds", levels - 1));
        }
        for w in kinds.windows(2) {
            if w[0] == w[1] {
                return err("level kinds must alternate".into());
            }
        }
        if inputs.len() != gates {
            return err(format!("expected {gates} input values"));
        }
        if output >= gates {
            return err("output gate out of range".into());
        }
        if wires.len() != levels - 1 {
            return err(format!("expected wires for {} level pairs", levels - 1));
        }
        for (p, pair) in wires.iter().enumerate() {
            let mut up = vec![0usize; gates];
            let mut down = vec![0usize; gates];
            for (a, b) in pair {
                if *a >= gates || *b >= gates {
                    return err(format!("wire gate index out of range in pair {}", p + 1));
                }
                up[*a] += 1;
                down[*b] += 1;
            }
            if up.iter().any(|d| *d != 2) || down.iter().any(|d| *d != 2) {
                return err(format!(
                    "every gate needs degree exactly 2 between levels {} and {}",
                    p + 1,
                    p + 2
                ));
            }
            // receiving gates of inner levels have two different inputs
            if (2..levels).contains(&(p + 1)) {
                for g in 0..gates {
                    let ins: Vec<usize> = pair
                        .iter()
                        .filter(|(a, _)| *a == g)
                        .map(|(_, b)| *b)
                        .collect();
                    if ins.len() == 2 && ins[0] == ins[1] {
                        return err(format!(
                            "gate {} in level {} has equal input gates",
                            g + 1,
                            p + 1
                        ));
                    }
                }
            }
        }
        Ok(Sam2Circuit {
            levels,
            gates,
            kinds,
            inputs,
            wires,
            output,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn gates(&self) -> usize {
        self.gates
    }

    pub fn inputs(&self) -> &[bool] {
        &self.inputs
    }
}

/// Direct bottom-up evaluation of the designated output gate.
pub fn eval_circuit(c: &Sam2Circuit) -> bool {
    let mut vals = c.inputs.clone();
    for p in (0..c.levels - 1).rev() {
        let mut next = vec![None::<bool>; c.gates];
        for (a, b) in &c.wires[p] {
            let v = vals[*b];
            next[*a] = Some(match (next[*a], c.kinds[p]) {
                (None, _) => v,
                (Some(x), GateKind::And) => x && v,
                (Some(x), GateKind::Or) => x || v,
            });
        }
        vals = next
            .into_iter()
            .map(|v| v.expect("degree checked"))
            .collect();
    }
    vals[c.output]
}

/// A cycle of the induced graph between two consecutive levels; `uppers`
/// and `lowers` list the member gates in walk order.
struct Cycle {
    uppers: Vec<usize>,
    lowers: Vec<usize>,
}

/// Decomposes the degree-2 bipartite graph into cycles with the
/// deterministic walk: start from the lowest unvisited lower gate, move to
/// its smaller upper neighbour, and keep leaving each gate by its other
/// incident edge until the walk closes.
fn cycles(gates: usize, edges: &[(usize, usize)]) -> Vec<Cycle> {
    let mut upper_adj: Vec<Vec<usize>> = vec![Vec::new(); gates];
    let mut lower_adj: Vec<Vec<usize>> = vec![Vec::new(); gates];
    for (e, (a, b)) in edges.iter().enumerate() {
        upper_adj[*a].push(e);
        lower_adj[*b].push(e);
    }
    let mut used = vec![false; edges.len()];
    let mut out = Vec::new();
    for start in 0..gates {
        if lower_adj[start].iter().any(|e| used[*e]) {
            continue;
        }
        // first move: to the smaller upper neighbour
        let first = *lower_adj[start]
            .iter()
            .min_by_key(|e| edges[**e].0)
            .expect("degree 2");
        let mut uppers = Vec::new();
        let mut lowers = vec![start];
        let mut edge = first;
        loop {
            used[edge] = true;
            let a = edges[edge].0;
            uppers.push(a);
            // leave the upper gate by its other edge
            let out_edge = *upper_adj[a].iter().find(|e| **e != edge).expect("degree 2");
            used[out_edge] = true;
            let b = edges[out_edge].1;
            if b == start {
                break;
            }
            lowers.push(b);
            // leave the lower gate by its other edge
            edge = *lower_adj[b]
                .iter()
                .find(|e| **e != out_edge)
                .expect("degree 2");
        }
        out.push(Cycle { uppers, lowers });
    }
    out
}

/// An entry of a lower-level enumeration: a gate, the copy of a cycle's
/// first gate, or an inert padding point.
#[derive(Debug, Clone, Copy, PartialEq)]
enum LowerRef {
    Gate(usize),
    Copy(usize),
    Pad(usize),
}

impl LowerRef {
    fn gate(&self) -> Option<usize> {
        match self {
            LowerRef::Gate(g) | LowerRef::Copy(g) => Some(*g),
            LowerRef::Pad(_) => None,
        }
    }
}

struct PairEncoding {
    /// Real upper gates with their data values, in cycle order (copy slots
    /// are skipped, so values have gaps).
    upper: Vec<(usize, u64)>,
    /// All `m` lower entries with their data values.
    lower: Vec<(LowerRef, u64)>,
}

struct CircuitLayout {
    m: u64,
    pairs: Vec<PairEncoding>,
}

/// Lays out every level pair: cycles are enumerated, upper slots get values
/// `d..d+m-1` with a hole after each cycle, lower slots get `d+m..d+2m-1`
/// with the cycle's first gate repeated, and pairs with fewer cycles than
/// the widest pair are padded with inert points whose values no jump from a
/// real position can reach.
fn layout(c: &Sam2Circuit) -> CircuitLayout {
    let n = c.gates;
    let all_cycles: Vec<Vec<Cycle>> = c.wires.iter().map(|w| cycles(n, w)).collect();
    let m = all_cycles
        .iter()
        .map(|cy| (n + cy.len()) as u64)
        .max()
        .expect("at least one pair");

    let pairs = all_cycles
        .iter()
        .enumerate()
        .map(|(p, cyc)| {
            let d = p as u64 * 2 * m;
            let d_low = d + m;
            let mut upper = Vec::with_capacity(n);
            let mut lower = Vec::with_capacity(m as usize);
            let mut slot = 0u64;
            for cy in cyc {
                for (i, (a, b)) in cy.uppers.iter().zip(&cy.lowers).enumerate() {
                    let _ = (i, b);
                    upper.push((*a, d + slot));
                    slot += 1;
                }
                slot += 1; // the upper copy slot stays a hole
            }
            let mut slot = 0u64;
            for cy in cyc {
                for b in &cy.lowers {
                    lower.push((LowerRef::Gate(*b), d_low + slot));
                    slot += 1;
                }
                lower.push((LowerRef::Copy(cy.lowers[0]), d_low + slot));
                slot += 1;
            }
            // inert padding up to m entries; these values sit beyond every
            // reachable jump target of this pair
            let mut pad = 0;
            while slot < m {
                lower.push((LowerRef::Pad(pad), d_low + slot));
                slot += 1;
                pad += 1;
            }
            PairEncoding { upper, lower }
        })
        .collect();
    CircuitLayout { m, pairs }
}

/// The value sequence of the whole circuit encoding:
/// `w_{1,1} w_{1,2} v_{2,1} w_{2,2} ... w_{l-1,2}`, where `v_{p+1,1}`
/// repeats the lower enumeration of pair `p` with the values the gates got
/// in pair `p+1`'s upper enumeration.
fn circuit_values(c: &Sam2Circuit, layout: &CircuitLayout) -> Vec<u64> {
    let m = layout.m;
    let mut values: Vec<u64> = Vec::new();
    values.extend(layout.pairs[0].upper.iter().map(|(_, v)| *v));
    values.extend(layout.pairs[0].lower.iter().map(|(_, v)| *v));
    for p in 1..c.levels - 1 {
        let d = p as u64 * 2 * m;
        // value of each gate in pair p's upper enumeration
        let mut z = vec![0u64; c.gates];
        for (g, v) in &layout.pairs[p].upper {
            z[*g] = *v;
        }
        let r = layout.pairs[p].upper.len() as u64 + cycle_count(&layout.pairs[p]);
        for (t, (entry, _)) in layout.pairs[p - 1].lower.iter().enumerate() {
            match entry.gate() {
                Some(g) => values.push(z[g]),
                // any value below d+m is unreachable by real jumps
                None => values.push(d + (r + t as u64) % m),
            }
        }
        values.extend(layout.pairs[p].lower.iter().map(|(_, v)| *v));
    }
    values
}

fn cycle_count(pair: &PairEncoding) -> u64 {
    pair.lower
        .iter()
        .filter(|(e, _)| matches!(e, LowerRef::Copy(_)))
        .count() as u64
}

fn jump(kind: GateKind, m: u64, inner: Formula) -> Formula {
    let iv = IntervalUnion(vec![Interval::closed(m as i64, m as i64 + 1)]);
    match kind {
        GateKind::Or => Formula::finally_in(iv, inner),
        GateKind::And => Formula::globally_in(iv, inner),
    }
}

/// Positions (1-based) in the last lower enumeration carrying a gate, or a
/// copy of a gate, whose input value is 1.
fn true_input_positions(c: &Sam2Circuit, layout: &CircuitLayout) -> Vec<u64> {
    layout
        .pairs
        .last()
        .unwrap()
        .lower
        .iter()
        .enumerate()
        .filter_map(|(j, (entry, _))| match entry.gate() {
            Some(g) if c.inputs[g] => Some(j as u64 + 1),
            _ => None,
        })
        .collect()
}

fn output_position(c: &Sam2Circuit, layout: &CircuitLayout) -> u64 {
    layout.pairs[0]
        .upper
        .iter()
        .position(|(g, _)| *g == c.output)
        .expect("output gate appears in the first upper enumeration") as u64
}

fn mtl_formula(c: &Sam2Circuit, layout: &CircuitLayout, end: impl Fn(u64) -> Formula) -> Formula {
    let m = layout.m;
    let ends = true_input_positions(c, layout);
    let endpoint = Formula::any(ends.iter().map(|j| Formula::next_n(m - j, end(*j))));
    let mut f = jump(c.kinds[c.levels - 2], m, endpoint);
    for p in (0..c.levels - 2).rev() {
        f = jump(c.kinds[p], m, Formula::next_n(m, f));
    }
    Formula::next_n(output_position(c, layout), f)
}

/// Encodes the circuit value problem as pure-MTL(F,X) path checking over a
/// finite pure data word: the word satisfies the formula exactly when the
/// circuit evaluates to 1.
pub fn gen_circuit_mtl(c: &Sam2Circuit) -> (DataWord, Formula) {
    let layout = layout(c);
    let word = DataWord::new(
        circuit_values(c, &layout)
            .into_iter()
            .map(DataPoint::pure)
            .collect(),
    );
    let f = mtl_formula(c, &layout, |_| Formula::not(Formula::next(Formula::True)));
    (word, f)
}

/// The infinite variant: the finite encoding followed by a constant tail
/// carrying a fresh proposition, with the end-of-word detector replaced by
/// the word/tail boundary detector.
pub fn gen_circuit_mtl_infinite(c: &Sam2Circuit) -> (PeriodicWord, Formula) {
    let layout = layout(c);
    let m = layout.m;
    let prefix = DataWord::new(
        circuit_values(c, &layout)
            .into_iter()
            .map(DataPoint::pure)
            .collect(),
    );
    let tail = DataPoint {
        props: BTreeSet::from(["p".to_string()]),
        value: BigUint::from(5 * m * c.levels as u64),
    };
    let word = PeriodicWord::new(prefix, DataWord::new(vec![tail]), BigUint::zero())
        .expect("period is nonempty");
    let f = mtl_formula(c, &layout, |_| {
        Formula::and(
            Formula::not(Formula::prop("p")),
            Formula::next(Formula::prop("p")),
        )
    });
    (word, f)
}

/// Encodes the circuit value problem as pure-SMTL(F,X) path checking over a
/// strictly monotonic pure data word: level `j` lives in the `j`-th shifted
/// copy of `1..n, 2(n+1), 3(n+1), .., (n+1)(n+1)`, and the jump set for a
/// level pair collects `(i2+1)(n+1) - i1` over its wires.
///
/// Every element of a jump set is at least `n+2` and nonzero modulo `n+1`,
/// while the differences between two first-half positions stay below `n`
/// and those between two second-half positions are multiples of `n+1`, so
/// within a copy a jump can only land on a second-half position wired to
/// the source gate; the copy shift `2(n+1)^2` puts every cross-copy
/// difference above the largest jump.
pub fn gen_circuit_smtl(c: &Sam2Circuit) -> (DataWord, Formula) {
    let n = c.gates as u64;
    let shift = 2 * (n + 1) * (n + 1);
    let mut values = Vec::new();
    for copy in 0..c.levels as u64 - 1 {
        let base = copy * shift;
        values.extend((1..=n).map(|i| base + i));
        values.extend((1..=n).map(|i| base + (i + 1) * (n + 1)));
    }
    let word = DataWord::new(values.into_iter().map(DataPoint::pure).collect());

    let jump_set = |p: usize| -> IntervalUnion {
        let mut diffs: Vec<i64> = c.wires[p]
            .iter()
            .map(|(a, b)| ((b + 2) as i64) * (n as i64 + 1) - (a + 1) as i64)
            .collect();
        diffs.sort_unstable();
        diffs.dedup();
        IntervalUnion(diffs.into_iter().map(|d| Interval::closed(d, d)).collect())
    };
    let jump = |p: usize, inner: Formula| -> Formula {
        match c.kinds[p] {
            GateKind::Or => Formula::finally_in(jump_set(p), inner),
            GateKind::And => Formula::globally_in(jump_set(p), inner),
        }
    };

    let ends: Vec<u64> = (0..c.gates)
        .filter(|g| c.inputs[*g])
        .map(|g| g as u64 + 1)
        .collect();
    let endpoint = Formula::any(
        ends.iter()
            .map(|i| Formula::next_n(n - i, Formula::not(Formula::next(Formula::True)))),
    );
    let mut f = jump(c.levels - 2, endpoint);
    for p in (0..c.levels - 2).rev() {
        f = jump(p, Formula::next_n(n, f));
    }
    (word, Formula::next_n(c.output as u64, f))
}

/// Parses the circuit text format. `#` starts a comment.
///
/// ```text
/// circuit levels=3 gates=5 output=3
/// level 1 and
/// level 2 or
/// level 3 input 0,1,1,0,0
/// wire 2:1 -> 1:1
/// ```
pub fn parse_circuit(text: &str) -> Result<Sam2Circuit, GenError> {
    let err = |line: usize, msg: &str| GenError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text.lines().enumerate().filter_map(|(no, l)| {
        let l = match l.find('#') {
            Some(h) => &l[..h],
            None => l,
        };
        let l = l.trim();
        if l.is_empty() {
            None
        } else {
            Some((no + 1, l))
        }
    });
    let (hline, header) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let mut levels = None;
    let mut gates = None;
    let mut output = None;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&"circuit") {
        return Err(err(
            hline,
            "expected header `circuit levels=L gates=N output=K`",
        ));
    }
    for f in &fields[1..] {
        if let Some(v) = f.strip_prefix("levels=") {
            levels = v.parse::<usize>().ok();
        } else if let Some(v) = f.strip_prefix("gates=") {
            gates = v.parse::<usize>().ok();
        } else if let Some(v) = f.strip_prefix("output=") {
            output = v.parse::<usize>().ok();
        } else {
            return Err(err(hline, "unknown header field"));
        }
    }
    let (levels, gates, output) = match (levels, gates, output) {
        (Some(l), Some(n), Some(k)) if k >= 1 => (l, n, k - 1),
        _ => {
            return Err(err(
                hline,
                "header needs levels=, gates=, output= (1-based)",
            ))
        }
    };
    let mut kinds: Vec<Option<GateKind>> = vec![None; levels.saturating_sub(1)];
    let mut inputs: Option<Vec<bool>> = None;
    let mut wires: Vec<Vec<(usize, usize)>> = vec![Vec::new(); levels.saturating_sub(1)];
    for (no, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        match fields.as_slice() {
            ["level", idx, kind] => {
                let idx: usize = idx.parse().map_err(|_| err(no, "bad level index"))?;
                if idx == levels {
                    return Err(err(no, "last level must be `level L input ...`"));
                }
                let k = match *kind {
                    "and" => GateKind::And,
                    "or" => GateKind::Or,
                    _ => return Err(err(no, "expected `and` or `or`")),
                };
                *kinds
                    .get_mut(idx.wrapping_sub(1))
                    .ok_or_else(|| err(no, "level index out of range"))? = Some(k);
            }
            ["level", idx, "input", vals] => {
                let idx: usize = idx.parse().map_err(|_| err(no, "bad level index"))?;
                if idx != levels {
                    return Err(err(no, "only the last level takes inputs"));
                }
                let parsed: Result<Vec<bool>, _> = vals
                    .split(',')
                    .map(|v| match v.trim() {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        _ => Err(()),
                    })
                    .collect();
                inputs = Some(parsed.map_err(|_| err(no, "inputs must be 0 or 1"))?);
            }
            ["wire", from, "->", to] => {
                let parse_ref = |s: &str| -> Option<(usize, usize)> {
                    let (lv, g) = s.split_once(':')?;
                    Some((lv.parse().ok()?, g.parse().ok()?))
                };
                let (flv, fg) = parse_ref(from).ok_or_else(|| err(no, "bad wire endpoint"))?;
                let (tlv, tg) = parse_ref(to).ok_or_else(|| err(no, "bad wire endpoint"))?;
                if flv != tlv + 1 {
                    return Err(err(no, "wires go from level i+1 to level i"));
                }
                if fg < 1 || tg < 1 {
                    return Err(err(no, "gate indices are 1-based"));
                }
                let pair = wires
                    .get_mut(tlv.wrapping_sub(1))
                    .ok_or_else(|| err(no, "wire level out of range"))?;
                pair.push((tg - 1, fg - 1));
            }
            _ => return Err(err(no, "expected `level ...` or `wire i+1:g -> i:g`")),
        }
    }
    let kinds: Vec<GateKind> = kinds
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| err(hline, "missing a `level i and|or` line"))?;
    let inputs = inputs.ok_or_else(|| err(hline, "missing the input level line"))?;
    Sam2Circuit::new(levels, gates, kinds, inputs, wires, output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{check_finite, check_periodic};
    use num_traits::ToPrimitive;

    /// The three-level circuit of the worked example: level 1 and-gates,
    /// level 2 or-gates, level 3 inputs; output gate a3; inputs
    /// c2 = c3 = 1, the others 0.
    pub(crate) fn example_circuit() -> Sam2Circuit {
        let text = "\
circuit levels=3 gates=5 output=3
level 1 and
level 2 or
level 3 input 0,1,1,0,0
# level 2 -> level 1
wire 2:1 -> 1:1
wire 2:2 -> 1:1
wire 2:2 -> 1:2
wire 2:1 -> 1:2  # crossing pair for gates 1,2
wire 2:3 -> 1:3
wire 2:4 -> 1:3
wire 2:4 -> 1:4
wire 2:5 -> 1:4
wire 2:5 -> 1:5
wire 2:3 -> 1:5
# level 3 -> level 2
wire 3:1 -> 2:1
wire 3:3 -> 2:1
wire 3:2 -> 2:2
wire 3:4 -> 2:2
wire 3:1 -> 2:3
wire 3:5 -> 2:3
wire 3:2 -> 2:4
wire 3:4 -> 2:4
wire 3:3 -> 2:5
wire 3:5 -> 2:5
";
        parse_circuit(text).unwrap()
    }

    #[test]
    fn eval_example() {
        let c = example_circuit();
        // b3 = c1 | c5 = 0, so a3 = b3 & b4 = 0
        assert!(!eval_circuit(&c));
        let mut all_on = c.clone();
        all_on.inputs = vec![true; 5];
        assert!(eval_circuit(&all_on));
        let mut all_off = c.clone();
        all_off.inputs = vec![false; 5];
        assert!(!eval_circuit(&all_off));
    }

    #[test]
    fn golden_word() {
        let (word, _f) = gen_circuit_mtl(&example_circuit());
        let values: Vec<u64> = word.values().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(
            values,
            vec![
                0, 1, 3, 4, 5, //
                7, 8, 9, 10, 11, 12, 13, //
                14, 18, 14, 16, 19, 15, 16, //
                21, 22, 23, 24, 25, 26, 27,
            ]
        );
    }

    #[test]
    fn golden_formula() {
        let (_, f) = gen_circuit_mtl(&example_circuit());
        let expect = crate::formula::parse(
            "X^2 (G[7,8] X^7 (F[7,8] (X^5 !X true | X^2 !X true | X^0 !X true)))",
        )
        .unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn golden_verdict() {
        let c = example_circuit();
        let (word, f) = gen_circuit_mtl(&c);
        assert_eq!(check_finite(&word, &f).satisfied, eval_circuit(&c));
    }

    #[test]
    fn infinite_variant() {
        let c = example_circuit();
        let (word, f) = gen_circuit_mtl_infinite(&c);
        assert_eq!(word.period().len(), 1);
        // m = 7, l = 3: tail value 5*m*l
        assert_eq!(
            *word.period().point(0).value.to_u64().as_ref().unwrap(),
            105
        );
        assert!(word.offset().is_zero());
        assert_eq!(check_periodic(&word, &f).satisfied, eval_circuit(&c));
    }

    #[test]
    fn smtl_word_shape() {
        // two parallel wires per gate pair keep degrees at 2
        let c = Sam2Circuit::new(
            2,
            4,
            vec![GateKind::And],
            vec![true, false, true, true],
            vec![vec![
                (0, 0),
                (0, 0),
                (1, 1),
                (1, 1),
                (2, 2),
                (2, 2),
                (3, 3),
                (3, 3),
            ]],
            0,
        )
        .unwrap();
        let (word, _f) = gen_circuit_smtl(&c);
        let values: Vec<u64> = word.values().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(values, vec![1, 2, 3, 4, 10, 15, 20, 25]);
        assert!(word.is_strictly_monotonic());
        let c3 = example_circuit();
        let (w3, f3) = gen_circuit_smtl(&c3);
        assert!(w3.is_strictly_monotonic());
        // n = 5: first half 1..5, second half 2*6..6*6, copy shift 72
        assert_eq!(
            w3.values()
                .map(|v| v.to_u64().unwrap())
                .take(11)
                .collect::<Vec<_>>(),
            vec![1, 2, 3, 4, 5, 12, 18, 24, 30, 36, 73]
        );
        assert_eq!(check_finite(&w3, &f3).satisfied, eval_circuit(&c3));
    }

    /// The literal labeling from the construction this is derived from
    /// (second half at `i(n+1)`) admits spurious jumps: with a wire from
    /// lower gate 1 to upper gate 2, the difference `(n+1)-2 = n-1` is also
    /// the distance between two first-half positions, so a universal jump
    /// lands on a first-half position and falsifies a true instance. The
    /// shifted labeling keeps every jump difference above `n`.
    #[test]
    fn smtl_no_spurious_first_half_jumps() {
        // gate1 <- gate2 twice, gate2 <- gate1 twice, gate3 <- gate3 twice
        let c = Sam2Circuit::new(
            2,
            3,
            vec![GateKind::And],
            vec![true, true, false],
            vec![vec![(0, 1), (0, 1), (1, 0), (1, 0), (2, 2), (2, 2)]],
            0,
        )
        .unwrap();
        assert!(eval_circuit(&c));
        let (w, f) = gen_circuit_smtl(&c);
        assert!(check_finite(&w, &f).satisfied);
    }

    #[test]
    fn mtl_matches_oracle_on_example_inputs() {
        // all 32 input vectors of the example circuit
        let base = example_circuit();
        for bits in 0..32u32 {
            let mut c = base.clone();
            c.inputs = (0..5).map(|i| bits & (1 << i) != 0).collect();
            let expected = eval_circuit(&c);
            let (word, f) = gen_circuit_mtl(&c);
            assert_eq!(
                check_finite(&word, &f).satisfied,
                expected,
                "finite encoding, inputs {bits:05b}"
            );
            let (word, f) = gen_circuit_smtl(&c);
            assert_eq!(
                check_finite(&word, &f).satisfied,
                expected,
                "smtl encoding, inputs {bits:05b}"
            );
        }
    }
}
