//! Excitation patterns and their extraction from outcome trajectories.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// Binary string that starts and ends with a 1.
///
/// Ordered by binary value, so `1 < 11 < 101 < 111 < 1001 < …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    bits: Vec<bool>,
}

impl Pattern {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        match (bits.first(), bits.last()) {
            (Some(true), Some(true)) => Ok(Self { bits }),
            _ => Err(Error::InvalidPattern(render(&bits))),
        }
    }

    /// The pattern with the given binary value, most significant bit first.
    pub fn from_value(value: u64) -> Result<Self> {
        if value == 0 || value.is_multiple_of(2) {
            return Err(Error::InvalidPattern(format!("{value:b}")));
        }
        let len = 64 - value.leading_zeros() as usize;
        Ok(Self { bits: (0..len).rev().map(|i| value >> i & 1 == 1).collect() })
    }

    pub fn single() -> Self {
        Self { bits: vec![true] }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Longest internal run of zeros.
    pub fn max_gap(&self) -> usize {
        let mut best = 0;
        let mut run = 0;
        for &b in &self.bits {
            if b {
                run = 0;
            } else {
                run += 1;
                best = best.max(run);
            }
        }
        best
    }

    /// Binary value, if it fits in 64 bits.
    pub fn value(&self) -> Option<u64> {
        if self.bits.len() > 64 {
            return None;
        }
        Some(self.bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64))
    }

    /// All patterns of length at most `max_len`, in increasing order.
    pub fn all_up_to(max_len: usize) -> Vec<Pattern> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            if len == 1 {
                out.push(Self::single());
                continue;
            }
            for mid in 0..(1u64 << (len - 2)) {
                let mut bits = Vec::with_capacity(len);
                bits.push(true);
                bits.extend((0..len - 2).rev().map(|i| mid >> i & 1 == 1));
                bits.push(true);
                out.push(Self { bits });
            }
        }
        out
    }
}

fn render(bits: &[bool]) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bits.len().cmp(&other.bits.len()).then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.bits))
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidPattern(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One extracted pattern and the position of its first bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub offset: usize,
    pub pattern: Pattern,
}

/// Pattern counts of one trajectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternCounts {
    counts: BTreeMap<Pattern, u64>,
    occurrences: Vec<Occurrence>,
    n: usize,
    separation: usize,
}

impl PatternCounts {
    pub fn counts(&self) -> &BTreeMap<Pattern, u64> {
        &self.counts
    }

    pub fn get(&self, p: &Pattern) -> u64 {
        self.counts.get(p).copied().unwrap_or(0)
    }

    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn separation(&self) -> usize {
        self.separation
    }

    pub fn total(&self) -> u64 {
        total_patterns(self)
    }

    /// Rebuilds the trajectory the counts were extracted from.
    pub fn resynthesize(&self) -> Trajectory {
        let mut ones = Vec::new();
        for occ in &self.occurrences {
            for (i, &b) in occ.pattern.bits().iter().enumerate() {
                if b {
                    ones.push(occ.offset + i);
                }
            }
        }
        Trajectory::from_ones(self.n, ones).expect("occurrences lie inside the trajectory")
    }

    /// Rows `pattern,count` with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        wr.write_record(["pattern", "count"])?;
        for (p, c) in &self.counts {
            wr.write_record([p.to_string(), c.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Splits `traj` at zero-runs of length ≥ `s`. Leading and trailing zeros
/// are dropped, every remaining segment is one pattern occurrence.
pub fn extract(traj: &Trajectory, s: usize) -> PatternCounts {
    let s = s.max(1);
    let ones = traj.ones();
    let mut occurrences = Vec::new();
    let mut start = 0;
    for i in 1..=ones.len() {
        let split = i == ones.len() || ones[i] - ones[i - 1] > s;
        if !split {
            continue;
        }
        let first = ones[start];
        let last = ones[i - 1];
        let mut bits = vec![false; last - first + 1];
        for &p in &ones[start..i] {
            bits[p - first] = true;
        }
        occurrences.push(Occurrence { offset: first, pattern: Pattern { bits } });
        start = i;
    }
    let mut counts = BTreeMap::new();
    for occ in &occurrences {
        *counts.entry(occ.pattern.clone()).or_insert(0) += 1;
    }
    PatternCounts { counts, occurrences, n: traj.len(), separation: s }
}

/// `⌈n^γ⌉`, at least 1.
pub fn default_separation(n: usize, gamma: f64) -> Result<usize> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::BadGamma(gamma));
    }
    let x = (n as f64).powf(gamma);
    // Snap values that are integers up to rounding, e.g. 100^0.5.
    let r = x.round();
    let s = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    Ok((s as usize).max(1))
}

pub fn total_patterns(pc: &PatternCounts) -> u64 {
    pc.counts.values().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(s: &str) -> Trajectory {
        Trajectory::from_bits(&s.chars().map(|c| c == '1').collect::<Vec<_>>())
    }

    fn p(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn order_is_binary_value() {
        let all = Pattern::all_up_to(3);
        let names: Vec<String> = all.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["1", "11", "101", "111"]);
        let mut v: Vec<Pattern> = Pattern::all_up_to(6);
        let values: Vec<u64> = v.iter().map(|p| p.value().unwrap()).collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
        v.reverse();
        v.sort();
        assert_eq!(v, Pattern::all_up_to(6));
        assert_eq!(Pattern::all_up_to(12).len(), 1 + (2..=12).map(|k| 1 << (k - 2)).sum::<usize>());
    }

    #[test]
    fn rejects_bad_patterns() {
        assert!("10".parse::<Pattern>().is_err());
        assert!("".parse::<Pattern>().is_err());
        assert!("1a1".parse::<Pattern>().is_err());
        assert_eq!(Pattern::from_value(5).unwrap(), p("101"));
    }

    #[test]
    fn extraction_examples() {
        let pc = extract(&traj("000001000001100000"), 4);
        assert_eq!(pc.get(&p("1")), 1);
        assert_eq!(pc.get(&p("11")), 1);
        assert_eq!(pc.total(), 2);

        let pc = extract(&traj("1010000001"), 3);
        assert_eq!(pc.get(&p("101")), 1);
        assert_eq!(pc.get(&p("1")), 1);

        let pc = extract(&traj("0000000"), 2);
        assert_eq!(pc.total(), 0);
    }

    #[test]
    fn separation_ceiling() {
        assert_eq!(default_separation(600_000, 0.5).unwrap(), 775);
        assert_eq!(default_separation(100, 0.5).unwrap(), 10);
        assert!(matches!(default_separation(100, 1.0), Err(Error::BadGamma(_))));
        assert!(default_separation(100, 0.0).is_err());
    }

    #[test]
    fn csv_has_header() {
        let pc = extract(&traj("1100001"), 2);
        let mut buf = Vec::new();
        pc.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "pattern,count\n1,1\n11,1\n");
    }
}
