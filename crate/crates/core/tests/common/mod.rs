//! Seeded random corpora shared by the integration suites.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use pathcheck::dataword::{DataPoint, DataWord, PeriodicWord};
use pathcheck::docm::{parse_ocm, Ocm};
use pathcheck::formula::Formula;
use pathcheck::generators::{GateKind, Sam2Circuit};
use pathcheck::slp::{Slp, SlpBuilder};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeSet;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_word(rng: &mut StdRng, max_len: usize, max_value: u64, props: &[&str]) -> DataWord {
    let len = rng.gen_range(0..=max_len);
    random_word_exact(rng, len, max_value, props)
}

pub fn random_word_exact(rng: &mut StdRng, len: usize, max_value: u64, props: &[&str]) -> DataWord {
    (0..len)
        .map(|_| {
            let mut set = BTreeSet::new();
            for p in props {
                if rng.gen_bool(0.4) {
                    set.insert(p.to_string());
                }
            }
            DataPoint {
                props: set,
                value: BigUint::from(rng.gen_range(0..=max_value)),
            }
        })
        .collect()
}

/// A periodic word with `|u1| <= 3`, `|u2| <= 4`, values `<= 8`, `k <= 3`.
pub fn random_periodic(rng: &mut StdRng, props: &[&str]) -> PeriodicWord {
    let prefix = random_word(rng, 3, 8, props);
    let period_len = rng.gen_range(1..=4);
    let period = random_word_exact(rng, period_len, 8, props);
    let k = rng.gen_range(0..=3u64);
    PeriodicWord::new(prefix, period, BigUint::from(k)).unwrap()
}

/// Configuration for random formula generation.
pub struct FormulaCfg<'a> {
    pub depth: u32,
    pub props: &'a [&'a str],
    pub registers: &'a [&'a str],
    pub max_const: i64,
    pub allow_freeze: bool,
    /// Also emit interval-annotated Until/F/G (MTL/SMTL sugar).
    pub allow_annotations: bool,
}

impl Default for FormulaCfg<'_> {
    fn default() -> Self {
        FormulaCfg {
            depth: 5,
            props: &["p", "q"],
            registers: &["x", "y"],
            max_const: 6,
            allow_freeze: true,
            allow_annotations: false,
        }
    }
}

pub fn random_formula(rng: &mut StdRng, cfg: &FormulaCfg) -> Formula {
    gen_formula(rng, cfg, cfg.depth)
}

fn atom(rng: &mut StdRng, cfg: &FormulaCfg) -> Formula {
    let has_cons = !cfg.registers.is_empty();
    match rng.gen_range(0..if has_cons { 3 } else { 2 }) {
        0 => Formula::True,
        1 if !cfg.props.is_empty() => Formula::prop(cfg.props[rng.gen_range(0..cfg.props.len())]),
        1 => Formula::True,
        _ => {
            let reg = cfg.registers[rng.gen_range(0..cfg.registers.len())];
            let rel = match rng.gen_range(0..5) {
                0 => pathcheck::formula::Rel::Lt,
                1 => pathcheck::formula::Rel::Le,
                2 => pathcheck::formula::Rel::Eq,
                3 => pathcheck::formula::Rel::Ge,
                _ => pathcheck::formula::Rel::Gt,
            };
            let c = rng.gen_range(-cfg.max_const..=cfg.max_const);
            Formula::Constraint(reg.to_string(), rel, BigInt::from(c))
        }
    }
}

fn random_interval(rng: &mut StdRng, cfg: &FormulaCfg) -> pathcheck::formula::IntervalUnion {
    use pathcheck::formula::{Bound, Interval, IntervalUnion};
    let parts = rng.gen_range(1..=2);
    let mut out = Vec::new();
    for _ in 0..parts {
        let a = rng.gen_range(-cfg.max_const..=cfg.max_const);
        let b = rng.gen_range(a..=cfg.max_const);
        let lo = if rng.gen_bool(0.15) {
            Bound::Unbounded
        } else if rng.gen_bool(0.3) && a < b {
            Bound::Excl(BigInt::from(a))
        } else {
            Bound::Incl(BigInt::from(a))
        };
        let hi = if rng.gen_bool(0.15) {
            Bound::Unbounded
        } else if rng.gen_bool(0.3) && a < b {
            Bound::Excl(BigInt::from(b))
        } else {
            Bound::Incl(BigInt::from(b))
        };
        let iv = Interval { lo, hi };
        if !iv.is_empty() {
            out.push(iv);
        }
    }
    if out.is_empty() {
        out.push(Interval::closed(0, 1));
    }
    IntervalUnion(out)
}

fn gen_formula(rng: &mut StdRng, cfg: &FormulaCfg, depth: u32) -> Formula {
    if depth == 0 {
        return atom(rng, cfg);
    }
    let roll = rng.gen_range(0..100);
    match roll {
        0..=14 => atom(rng, cfg),
        15..=29 => Formula::not(gen_formula(rng, cfg, depth - 1)),
        30..=41 => Formula::and(
            gen_formula(rng, cfg, depth - 1),
            gen_formula(rng, cfg, depth - 1),
        ),
        42..=53 => Formula::or(
            gen_formula(rng, cfg, depth - 1),
            gen_formula(rng, cfg, depth - 1),
        ),
        54..=68 => {
            let a = gen_formula(rng, cfg, depth - 1);
            let b = gen_formula(rng, cfg, depth - 1);
            if cfg.allow_annotations && rng.gen_bool(0.5) {
                Formula::until_in(a, random_interval(rng, cfg), b)
            } else {
                Formula::until(a, b)
            }
        }
        69..=78 => Formula::release(
            gen_formula(rng, cfg, depth - 1),
            gen_formula(rng, cfg, depth - 1),
        ),
        79..=88 => {
            let inner = gen_formula(rng, cfg, depth - 1);
            match rng.gen_range(0..3) {
                0 => Formula::next(inner),
                1 if cfg.allow_annotations => Formula::finally_in(random_interval(rng, cfg), inner),
                1 => Formula::finally(inner),
                _ if cfg.allow_annotations && rng.gen_bool(0.4) => {
                    Formula::globally_in(random_interval(rng, cfg), inner)
                }
                _ => Formula::globally(inner),
            }
        }
        _ => {
            if cfg.allow_freeze && !cfg.registers.is_empty() {
                let reg = cfg.registers[rng.gen_range(0..cfg.registers.len())];
                Formula::Freeze(reg.to_string(), Box::new(gen_formula(rng, cfg, depth - 1)))
            } else {
                atom(rng, cfg)
            }
        }
    }
}

/// All subformulas of a desugared formula.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    let mut out = vec![f.clone()];
    match f {
        Formula::Not(a) | Formula::Freeze(_, a) => out.extend(subformulas(a)),
        Formula::And(a, b)
        | Formula::Or(a, b)
        | Formula::Until(a, b)
        | Formula::Release(a, b)
        | Formula::UntilAnnotated(a, _, b) => {
            out.extend(subformulas(a));
            out.extend(subformulas(b));
        }
        _ => {}
    }
    out
}

/// A random SLP of at most `max_rules` rules over small leaf values.
pub fn random_slp(rng: &mut StdRng, max_rules: usize, props: &[&str]) -> Slp {
    let mut b = SlpBuilder::new();
    let mut vars = Vec::new();
    let rules = rng.gen_range(1..=max_rules);
    for _ in 0..rules {
        let choice = if vars.is_empty() {
            0
        } else {
            rng.gen_range(0..3)
        };
        let var = match choice {
            0 => {
                let mut set = BTreeSet::new();
                for p in props {
                    if rng.gen_bool(0.3) {
                        set.insert(p.to_string());
                    }
                }
                b.leaf(set, BigUint::from(rng.gen_range(0..=8u64)))
            }
            1 => {
                let child = vars[rng.gen_range(0..vars.len())];
                b.shift(child, BigUint::from(rng.gen_range(0..=5u64)))
            }
            _ => {
                let x = vars[rng.gen_range(0..vars.len())];
                let y = vars[rng.gen_range(0..vars.len())];
                b.concat(x, y)
            }
        };
        vars.push(var);
    }
    let out = *vars.last().unwrap();
    b.build(out)
}

/// A random SAM2 circuit: per level pair, a random matching plus its
/// rotation by `r` places, which keeps all degrees at 2 and, for `r != 0`,
/// every receiving gate's inputs distinct. Cycle counts vary with `gcd(n, r)`.
pub fn random_circuit(rng: &mut StdRng, max_gates: usize, max_levels: usize) -> Sam2Circuit {
    let levels = rng.gen_range(2..=max_levels.max(2));
    let gates = if levels == 2 {
        rng.gen_range(1..=max_gates)
    } else {
        rng.gen_range(2..=max_gates.max(2))
    };
    let first = if rng.gen_bool(0.5) {
        GateKind::And
    } else {
        GateKind::Or
    };
    let kinds: Vec<GateKind> = (0..levels - 1)
        .map(|i| {
            if i % 2 == 0 {
                first
            } else {
                match first {
                    GateKind::And => GateKind::Or,
                    GateKind::Or => GateKind::And,
                }
            }
        })
        .collect();
    let inputs: Vec<bool> = (0..gates).map(|_| rng.gen_bool(0.5)).collect();
    let mut wires = Vec::new();
    for p in 0..levels - 1 {
        // receiving level p+1 must have distinct inputs unless it is level 1
        let min_r = if p == 0 { 0 } else { 1 };
        let r = if gates == 1 {
            0
        } else {
            rng.gen_range(min_r..gates)
        };
        let mut perm: Vec<usize> = (0..gates).collect();
        for i in (1..gates).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let mut pair = Vec::new();
        for u in 0..gates {
            pair.push((u, perm[u]));
            pair.push((u, perm[(u + r) % gates]));
        }
        wires.push(pair);
    }
    let output = rng.gen_range(0..gates);
    Sam2Circuit::new(levels, gates, kinds, inputs, wires, output).expect("construction is valid")
}

/// A random machine built from per-state edge menus that keep most
/// machines deterministic; callers still filter with `is_deterministic`.
pub fn random_ocm(rng: &mut StdRng, max_states: usize, max_add: i64, unary: bool) -> Ocm {
    let n = rng.gen_range(1..=max_states);
    let mut text = String::from(if unary { "ocm unary\n" } else { "ocm binary\n" });
    text.push_str("init q0\n");
    for q in 0..n {
        let target = |rng: &mut StdRng| format!("q{}", rng.gen_range(0..n));
        match rng.gen_range(0..10) {
            0..=5 => {
                let a = rng.gen_range(-max_add..=max_add);
                text.push_str(&format!("q{q} add({a}) {}\n", target(rng)));
            }
            6..=7 => {
                // zero test plus a strictly negative update never conflict
                let a = rng.gen_range(-max_add..=-1);
                text.push_str(&format!("q{q} zero {}\n", target(rng)));
                text.push_str(&format!("q{q} add({a}) {}\n", target(rng)));
            }
            8 => {
                text.push_str(&format!("q{q} zero {}\n", target(rng)));
            }
            _ => {} // stuck state
        }
    }
    parse_ocm(&text).unwrap()
}

/// Direct configuration-by-configuration simulation of a machine.
pub fn simulate_ocm(m: &Ocm, max_steps: usize) -> Vec<(String, BigUint)> {
    let mut out = Vec::new();
    let mut q = m.initial_state();
    let mut c = BigUint::from(0u32);
    for _ in 0..max_steps {
        out.push((m.state_name(q).to_string(), c.clone()));
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
