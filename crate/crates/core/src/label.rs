//! Bin tokens and cluster labels.
//!
//! A label is one token per attribute. Base tokens come from initial
//! labeling (`Q1..Q4` at quartiles, `H1 H2` at halves, `D1..D10` at
//! deciles); coarser tokens (`H1 H2` at quartiles, `F`) only arise from
//! merging.

use std::cmp::Ordering;
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quantile::Granularity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinToken {
    Quartile(u8),
    Decile(u8),
    Half(u8),
    /// The whole range of the attribute.
    Full,
}

impl BinToken {
    /// The base token for 1-based `bin` at granularity `g`.
    pub fn base(g: Granularity, bin: u8) -> BinToken {
        match g {
            Granularity::Halves => BinToken::Half(bin),
            Granularity::Quartiles => BinToken::Quartile(bin),
            Granularity::Deciles => BinToken::Decile(bin),
        }
    }

    /// The contiguous run of base bins this token spans at granularity `g`.
    pub fn covered_bins(self, g: Granularity) -> RangeInclusive<u8> {
        match (self, g) {
            (BinToken::Half(i), Granularity::Quartiles) => 2 * i - 1..=2 * i,
            (BinToken::Half(i), Granularity::Deciles) => 5 * i - 4..=5 * i,
            (BinToken::Full, g) => 1..=g.bins(),
            (BinToken::Quartile(i) | BinToken::Decile(i) | BinToken::Half(i), _) => i..=i,
        }
    }

    /// Whether this token is a single bin of granularity `g`.
    pub fn is_base(self, g: Granularity) -> bool {
        matches!(
            (self, g),
            (BinToken::Half(_), Granularity::Halves)
                | (BinToken::Quartile(_), Granularity::Quartiles)
                | (BinToken::Decile(_), Granularity::Deciles)
        )
    }

    fn is_valid(self, g: Granularity) -> bool {
        match (self, g) {
            (BinToken::Full, _) => true,
            (BinToken::Half(i), Granularity::Halves | Granularity::Quartiles) => {
                (1..=2).contains(&i)
            }
            (BinToken::Quartile(i), Granularity::Quartiles) => (1..=4).contains(&i),
            (BinToken::Decile(i), Granularity::Deciles) => (1..=10).contains(&i),
            _ => false,
        }
    }
}

impl fmt::Display for BinToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinToken::Quartile(i) => write!(f, "Q{i}"),
            BinToken::Decile(i) => write!(f, "D{i}"),
            BinToken::Half(i) => write!(f, "H{i}"),
            BinToken::Full => f.write_str("F"),
        }
    }
}

/// Parses a run of tokens such as `Q1H2F` or `D10D3`.
pub fn parse_tokens(s: &str) -> Result<Vec<BinToken>> {
    let bad = || Error::MalformedLabel(s.to_string());
    let bytes = s.trim().as_bytes();
    let mut out = vec![];
    let mut i = 0;
    while i < bytes.len() {
        let kind = bytes[i].to_ascii_uppercase();
        i += 1;
        if kind == b'F' {
            out.push(BinToken::Full);
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let num: u8 = std::str::from_utf8(&bytes[start..i])
            .ok()
            .and_then(|d| d.parse().ok())
            .ok_or_else(bad)?;
        out.push(match kind {
            b'Q' => BinToken::Quartile(num),
            b'D' => BinToken::Decile(num),
            b'H' => BinToken::Half(num),
            _ => return Err(bad()),
        });
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// One token per attribute. The canonical string form (e.g. `Q4Q1Q3Q3`)
/// is the cluster's identity; labels order by it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClusterLabel(Vec<BinToken>);

impl ClusterLabel {
    pub fn new(tokens: Vec<BinToken>) -> Self {
        ClusterLabel(tokens)
    }

    /// Parses a canonical string and checks each token is valid at `g`.
    pub fn parse(s: &str, g: Granularity) -> Result<Self> {
        let tokens = parse_tokens(s)?;
        if tokens.iter().any(|t| !t.is_valid(g)) {
            return Err(Error::MalformedLabel(s.to_string()));
        }
        Ok(ClusterLabel(tokens))
    }

    pub fn tokens(&self) -> &[BinToken] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }

    /// Bin digits (`4133`) for base labels at halves or quartiles. Deciles
    /// have a two-digit bin and merged tokens have no single bin, so both
    /// yield `None`.
    pub fn digits(&self, g: Granularity) -> Option<String> {
        if g == Granularity::Deciles || !self.0.iter().all(|t| t.is_base(g)) {
            return None;
        }
        Some(
            self.0
                .iter()
                .map(|t| char::from(b'0' + *t.covered_bins(g).start()))
                .collect(),
        )
    }

    pub fn is_base(&self, g: Granularity) -> bool {
        self.0.iter().all(|t| t.is_base(g))
    }
}

impl fmt::Display for ClusterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl Ord for ClusterLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for ClusterLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for ClusterLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
