//! Order statistics: quantiles under two conventions, five-number summaries,
//! and the per-attribute boundary grid used for labeling.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// How a quantile is read off the sorted sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Linear interpolation between order statistics at 1-based position
    /// `(n - 1)p + 1`.
    #[default]
    Interp,
    /// Tukey hinges: Q1/Q3 are medians of the lower/upper halves, each half
    /// including the median when `n` is odd. Other fractions interpolate
    /// piecewise-linearly in position between min, hinges, median and max.
    Hinges,
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interp" => Ok(Convention::Interp),
            "hinges" => Ok(Convention::Hinges),
            _ => Err(Error::InvalidConfig(format!("unknown convention {s:?}"))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Interp => "interp",
            Convention::Hinges => "hinges",
        })
    }
}

/// Bins per attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Halves,
    Quartiles,
    Deciles,
}

impl Granularity {
    pub fn bins(self) -> u8 {
        match self {
            Granularity::Halves => 2,
            Granularity::Quartiles => 4,
            Granularity::Deciles => 10,
        }
    }
}

impl FromStr for Granularity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" | "halves" | "median" => Ok(Granularity::Halves),
            "quartile" | "quartiles" => Ok(Granularity::Quartiles),
            "decile" | "deciles" => Ok(Granularity::Deciles),
            _ => Err(Error::InvalidConfig(format!("unknown granularity {s:?}"))),
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Halves => "half",
            Granularity::Quartiles => "quartile",
            Granularity::Deciles => "decile",
        })
    }
}

fn sorted_finite(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue);
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Value at fractional 0-based position `lo + frac` of a sorted slice.
///
/// Never returns the upper neighbour for `frac < 1`, so that "≤ boundary"
/// tests depend only on ranks.
fn at_position(sorted: &[f64], lo: usize, frac: f64) -> f64 {
    let a = sorted[lo];
    if frac <= 0.0 || lo + 1 >= sorted.len() {
        return a;
    }
    let b = sorted[lo + 1];
    if b == a {
        return a;
    }
    let v = a + frac * (b - a);
    if v >= b {
        prev_float(b).max(a)
    } else {
        v
    }
}

fn prev_float(x: f64) -> f64 {
    if x == 0.0 {
        -f64::from_bits(1)
    } else if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}

/// Quantile of an already sorted, non-empty sample at the exact fraction
/// `num / den`.
fn sorted_quantile_ratio(sorted: &[f64], num: usize, den: usize, conv: Convention) -> f64 {
    let n = sorted.len();
    match conv {
        Convention::Interp => {
            let scaled = (n - 1) * num;
            at_position(sorted, scaled / den, (scaled % den) as f64 / den as f64)
        }
        Convention::Hinges => hinge_quantile(sorted, num as f64 / den as f64),
    }
}

fn hinge_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    // 1-based positions of min, lower hinge, median, upper hinge, max
    let median = (n as f64 + 1.0) / 2.0;
    let lower = (n.div_ceil(2) + 1) as f64 / 2.0;
    let upper = n as f64 + 1.0 - lower;
    let knots = [
        (0.0, 1.0),
        (0.25, lower),
        (0.5, median),
        (0.75, upper),
        (1.0, n as f64),
    ];
    let pos = knots
        .windows(2)
        .find(|w| p <= w[1].0)
        .map(|w| {
            let ((p0, x0), (p1, x1)) = (w[0], w[1]);
            if p >= p1 {
                x1
            } else {
                x0 + (x1 - x0) * (p - p0) / (p1 - p0)
            }
        })
        .unwrap_or(n as f64);
    let zero_based = pos - 1.0;
    let lo = zero_based.floor() as usize;
    at_position(sorted, lo.min(n - 1), zero_based - lo as f64)
}

pub fn quantile(values: &[f64], p: f64, convention: Convention) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidFraction(p));
    }
    let sorted = sorted_finite(values)?;
    Ok(match convention {
        Convention::Interp => {
            let h = (sorted.len() - 1) as f64 * p;
            let lo = h.floor() as usize;
            at_position(&sorted, lo, h - lo as f64)
        }
        Convention::Hinges => hinge_quantile(&sorted, p),
    })
}

pub fn median(values: &[f64]) -> Result<f64> {
    let sorted = sorted_finite(values)?;
    Ok(sorted_quantile_ratio(&sorted, 1, 2, Convention::Interp))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn five_number_summary(values: &[f64], convention: Convention) -> Result<FiveNumberSummary> {
    let sorted = sorted_finite(values)?;
    Ok(FiveNumberSummary {
        min: sorted[0],
        q1: sorted_quantile_ratio(&sorted, 1, 4, convention),
        median: sorted_quantile_ratio(&sorted, 2, 4, convention),
        q3: sorted_quantile_ratio(&sorted, 3, 4, convention),
        max: sorted[sorted.len() - 1],
    })
}

/// Per-attribute bin boundaries: `g - 1` non-decreasing cut points each.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileGrid {
    granularity: Granularity,
    convention: Convention,
    boundaries: Vec<Vec<f64>>,
}

impl QuantileGrid {
    /// Uses the given cut points directly; each list must hold `g - 1`
    /// non-decreasing finite values.
    pub fn from_boundaries(
        granularity: Granularity,
        convention: Convention,
        boundaries: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let cuts = granularity.bins() as usize - 1;
        for b in &boundaries {
            if b.len() != cuts {
                return Err(Error::LengthMismatch {
                    expected: cuts,
                    found: b.len(),
                });
            }
            if b.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue);
            }
            if b.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidConfig(
                    "boundaries must be non-decreasing".into(),
                ));
            }
        }
        Ok(QuantileGrid {
            granularity,
            convention,
            boundaries,
        })
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        self.boundaries.len()
    }

    pub fn boundaries(&self, attribute: usize) -> &[f64] {
        &self.boundaries[attribute]
    }

    /// 1-based bin of `value` on `attribute`: the first boundary it does not
    /// exceed, else the top bin.
    pub fn bin_of(&self, attribute: usize, value: f64) -> u8 {
        let cuts = &self.boundaries[attribute];
        cuts.iter().position(|&b| value <= b).unwrap_or(cuts.len()) as u8 + 1
    }
}

pub fn build_grid(
    dataset: &Dataset,
    granularity: Granularity,
    convention: Convention,
) -> Result<QuantileGrid> {
    let g = granularity.bins() as usize;
    let boundaries = (0..dataset.dim())
        .map(|j| {
            let sorted = sorted_finite(&dataset.column(j))?;
            Ok((1..g)
                .map(|i| sorted_quantile_ratio(&sorted, i, g, convention))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    QuantileGrid::from_boundaries(granularity, convention, boundaries)
}
