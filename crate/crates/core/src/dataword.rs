//! Finite and infinite-periodic data words.
//!
//! A data word is a sequence of pairs `(P, d)` where `P` is a set of
//! propositions and `d` a natural number. An infinite word is represented
//! as `u1 (u2)^w +k`: a finite prefix `u1`, then the period `u2` repeated
//! forever with all data values shifted by `k` per repetition.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataWordError {
    #[error("shifting data value {value} by {shift} gives a negative value")]
    NegativeValue { value: BigUint, shift: BigInt },
    #[error("the period of an infinite word must be nonempty")]
    EmptyPeriod,
    #[error("word is not quasi-monotonic")]
    NotQuasiMonotonic,
    #[error("iteration precondition violated: {0}")]
    IteratePrecondition(String),
    #[error("expansion budget of {budget} points exceeded (length is {length})")]
    BudgetExceeded { budget: u64, length: BigUint },
    #[error("index {index} out of range for word of length {length}")]
    IndexOutOfRange { index: BigUint, length: BigUint },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One position of a data word: a set of propositions and a data value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DataPoint {
    pub props: BTreeSet<String>,
    pub value: BigUint,
}

impl DataPoint {
    pub fn new<I, S>(props: I, value: u64) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        DataPoint {
            props: props.into_iter().map(Into::into).collect(),
            value: BigUint::from(value),
        }
    }

    /// A point with no propositions, as used in pure data words.
    pub fn pure(value: u64) -> Self {
        DataPoint {
            props: BTreeSet::new(),
            value: BigUint::from(value),
        }
    }

    pub fn with_value(&self, value: BigUint) -> Self {
        DataPoint {
            props: self.props.clone(),
            value,
        }
    }
}

impl fmt::Display for DataPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, p) in self.props.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}} {}", self.value)
    }
}

/// Word length: finite words have a point count, periodic words do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Length {
    Finite(u64),
    Infinite,
}

/// A finite data word. May be empty (the neutral element of concatenation).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DataWord {
    points: Vec<DataPoint>,
}

impl DataWord {
    pub fn new(points: Vec<DataPoint>) -> Self {
        DataWord { points }
    }

    pub fn empty() -> Self {
        DataWord { points: Vec::new() }
    }

    /// Builds a pure word from a value sequence.
    pub fn from_values<I: IntoIterator<Item = u64>>(values: I) -> Self {
        DataWord {
            points: values.into_iter().map(DataPoint::pure).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn length(&self) -> Length {
        Length::Finite(self.points.len() as u64)
    }

    pub fn point(&self, i: usize) -> &DataPoint {
        &self.points[i]
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DataPoint> {
        self.points.iter()
    }

    pub fn values(&self) -> impl Iterator<Item = &BigUint> {
        self.points.iter().map(|p| &p.value)
    }

    pub fn min_value(&self) -> Option<&BigUint> {
        self.values().min()
    }

    pub fn max_value(&self) -> Option<&BigUint> {
        self.values().max()
    }

    /// Largest difference `d_i - d_j` over all pairs of data values; 0 when
    /// the word has fewer than two points.
    pub fn max_diff(&self) -> BigUint {
        match (self.min_value(), self.max_value()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => BigUint::zero(),
        }
    }

    /// The suffix starting at position `i`.
    pub fn suffix(&self, i: usize) -> DataWord {
        DataWord {
            points: self.points[i..].to_vec(),
        }
    }

    /// The prefix of the first `i` points.
    pub fn prefix(&self, i: usize) -> DataWord {
        DataWord {
            points: self.points[..i].to_vec(),
        }
    }

    /// `w_{+k}`: every data value increased by `k`, propositions unchanged.
    /// Fails if any resulting value would be negative.
    pub fn shift(&self, k: &BigInt) -> Result<DataWord, DataWordError> {
        let mut points = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let v = BigInt::from(p.value.clone()) + k;
            if v.is_negative() {
                return Err(DataWordError::NegativeValue {
                    value: p.value.clone(),
                    shift: k.clone(),
                });
            }
            points.push(p.with_value(v.to_biguint().unwrap()));
        }
        Ok(DataWord { points })
    }

    pub fn concat(&self, other: &DataWord) -> DataWord {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        DataWord { points }
    }

    pub fn push(&mut self, p: DataPoint) {
        self.points.push(p);
    }

    pub fn reversed(&self) -> DataWord {
        let mut points = self.points.clone();
        points.reverse();
        DataWord { points }
    }

    pub fn is_strictly_monotonic(&self) -> bool {
        self.points.windows(2).all(|w| w[0].value < w[1].value)
    }
}

impl FromIterator<DataPoint> for DataWord {
    fn from_iter<T: IntoIterator<Item = DataPoint>>(iter: T) -> Self {
        DataWord {
            points: iter.into_iter().collect(),
        }
    }
}

/// The infinite data word `u1 (u2)^w +k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicWord {
    prefix: DataWord,
    period: DataWord,
    offset: BigUint,
}

impl PeriodicWord {
    pub fn new(prefix: DataWord, period: DataWord, offset: BigUint) -> Result<Self, DataWordError> {
        if period.is_empty() {
            return Err(DataWordError::EmptyPeriod);
        }
        Ok(PeriodicWord {
            prefix,
            period,
            offset,
        })
    }

    pub fn prefix(&self) -> &DataWord {
        &self.prefix
    }

    pub fn period(&self) -> &DataWord {
        &self.period
    }

    pub fn offset(&self) -> &BigUint {
        &self.offset
    }

    pub fn length(&self) -> Length {
        Length::Infinite
    }

    /// The point at position `i`: a prefix point, or a period point with its
    /// value raised by `offset` for every completed repetition.
    pub fn at(&self, i: u64) -> DataPoint {
        let n1 = self.prefix.len() as u64;
        if i < n1 {
            return self.prefix.point(i as usize).clone();
        }
        let n2 = self.period.len() as u64;
        let rel = i - n1;
        let idx = (rel % n2) as usize;
        let wraps = rel / n2;
        let base = self.period.point(idx);
        if wraps == 0 || self.offset.is_zero() {
            return base.clone();
        }
        base.with_value(&base.value + &self.offset * BigUint::from(wraps))
    }

    pub fn value_at(&self, i: u64) -> BigUint {
        self.at(i).value
    }

    /// Folds a position into the window `[0, |u1|+|u2|)` that determines it.
    pub fn fold(&self, i: u64) -> u64 {
        let n1 = self.prefix.len() as u64;
        let n2 = self.period.len() as u64;
        if i < n1 {
            i
        } else {
            (i - n1) % n2 + n1
        }
    }

    /// Expands the first `n` points into a finite word.
    pub fn expand(&self, n: u64) -> DataWord {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// `max(u1) <= max(u2) <= min(u2) + k`, with the maximum over an empty
    /// prefix taken as 0.
    pub fn is_quasi_monotonic(&self) -> bool {
        let zero = BigUint::zero();
        let max_u1 = self.prefix.max_value().unwrap_or(&zero);
        let max_u2 = self.period.max_value().unwrap();
        let min_u2 = self.period.min_value().unwrap();
        max_u1 <= max_u2 && *max_u2 <= min_u2 + &self.offset
    }

    /// Shrinks a quasi-monotonic word so that all data values and the offset
    /// are bounded polynomially in `|u1 u2|` and `bound`, without changing
    /// the verdict of any formula whose constraint constants are bounded in
    /// absolute value by `bound`.
    ///
    /// Every gap between consecutive sorted values that exceeds `bound` is
    /// clamped to `bound + 1`, values are renumbered accordingly, and the new
    /// offset becomes `max(v2) - min(v2) + min{min(u2)+k-max(u2), bound+1}`.
    pub fn shrink(&self, bound: &BigUint) -> Result<PeriodicWord, DataWordError> {
        if !self.is_quasi_monotonic() {
            return Err(DataWordError::NotQuasiMonotonic);
        }
        let mut sorted: Vec<BigUint> = self
            .prefix
            .values()
            .chain(self.period.values())
            .cloned()
            .collect();
        sorted.sort();
        sorted.dedup();

        let cap = bound + BigUint::one();
        let mut map = std::collections::BTreeMap::new();
        let mut cur = BigUint::zero();
        let mut prev: Option<BigUint> = None;
        for d in sorted {
            if let Some(p) = &prev {
                let gap = &d - p;
                cur += if gap > *bound { cap.clone() } else { gap };
            }
            prev = Some(d.clone());
            map.insert(d, cur.clone());
        }

        let remap = |w: &DataWord| -> DataWord {
            w.iter()
                .map(|p| p.with_value(map[&p.value].clone()))
                .collect()
        };
        let v1 = remap(&self.prefix);
        let v2 = remap(&self.period);

        // delta >= 0 by quasi-monotonicity
        let delta =
            self.period.min_value().unwrap() + &self.offset - self.period.max_value().unwrap();
        let l = v2.max_value().unwrap() - v2.min_value().unwrap() + delta.min(cap);
        PeriodicWord::new(v1, v2, l)
    }
}

/// A data word loaded from the text format: finite or periodic.
#[derive(Debug, Clone)]
pub enum WordInput {
    Finite(DataWord),
    Periodic(PeriodicWord),
}

fn parse_point(line: &str, lineno: usize) -> Result<DataPoint, DataWordError> {
    let err = |msg: &str| DataWordError::Parse {
        line: lineno,
        msg: msg.to_string(),
    };
    let line = line.trim();
    let rest = line
        .strip_prefix('{')
        .ok_or_else(|| err("expected point of the form `{p,q} 3`"))?;
    let close = rest.find('}').ok_or_else(|| err("missing `}`"))?;
    let mut props = BTreeSet::new();
    for p in rest[..close].split(',') {
        let p = p.trim();
        if !p.is_empty() {
            props.insert(p.to_string());
        }
    }
    let value_str = rest[close + 1..].trim();
    let value = value_str
        .parse::<BigUint>()
        .map_err(|_| err("expected a natural number data value"))?;
    Ok(DataPoint { props, value })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(n, l)| {
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
    })
}

/// Parses the line-oriented word format. `#` starts a comment.
///
/// ```text
/// word finite          word periodic offset=2
/// {p,q} 3              prefix:
/// {} 0                 {} 0
///                      period:
///                      {p} 1
/// ```
pub fn parse_word(text: &str) -> Result<WordInput, DataWordError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(DataWordError::Parse {
        line: 0,
        msg: "empty input".to_string(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let err = |line: usize, msg: String| DataWordError::Parse { line, msg };
    match fields.as_slice() {
        ["word", "finite"] => {
            let mut points = Vec::new();
            for (n, l) in lines {
                points.push(parse_point(l, n)?);
            }
            Ok(WordInput::Finite(DataWord::new(points)))
        }
        ["word", "periodic", off] => {
            let offset = off
                .strip_prefix("offset=")
                .and_then(|v| v.parse::<BigUint>().ok())
                .ok_or_else(|| err(hline, "expected `offset=K`".to_string()))?;
            let mut prefix = Vec::new();
            let mut period = Vec::new();
            let mut section: Option<bool> = None; // true = period
            for (n, l) in lines {
                match l {
                    "prefix:" => section = Some(false),
                    "period:" => section = Some(true),
                    _ => match section {
                        Some(true) => period.push(parse_point(l, n)?),
                        Some(false) => prefix.push(parse_point(l, n)?),
                        None => {
                            return Err(err(
                                n,
                                "expected `prefix:` or `period:` section".to_string(),
                            ))
                        }
                    },
                }
            }
            let p = PeriodicWord::new(DataWord::new(prefix), DataWord::new(period), offset)?;
            Ok(WordInput::Periodic(p))
        }
        _ => Err(err(
            hline,
            "expected header `word finite` or `word periodic offset=K`".to_string(),
        )),
    }
}

impl fmt::Display for DataWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "word finite")?;
        for p in &self.points {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "word periodic offset={}", self.offset)?;
        writeln!(f, "prefix:")?;
        for p in self.prefix.iter() {
            writeln!(f, "{p}")?;
        }
        writeln!(f, "period:")?;
        for p in self.period.iter() {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Ceiling division for (possibly negative) big integers.
pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.is_zero() || (a.is_negative() != b.is_negative()) {
        q
    } else {
        q + BigInt::one()
    }
}
