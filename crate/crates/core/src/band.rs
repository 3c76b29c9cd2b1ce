//! Frequency bands: finite unions of disjoint intervals of `[0, ∞]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One interval `[lo, hi]` in rad/s; `hi` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn is_unbounded(&self) -> bool {
        self.hi.is_infinite()
    }
}

/// Sorted union of disjoint frequency intervals. Adjacent intervals may
/// share an endpoint; only the last may be unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBand {
    intervals: Vec<Interval>,
}

impl FrequencyBand {
    /// Builds a band from `(lo, hi)` pairs, sorting them by `lo`.
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut intervals: Vec<Interval> = pairs
            .into_iter()
            .map(|(lo, hi)| Interval { lo, hi })
            .collect();
        if intervals.is_empty() {
            return Err(Error::EmptyBand);
        }
        for (k, iv) in intervals.iter().enumerate() {
            if !iv.lo.is_finite() || iv.lo < 0.0 || iv.hi.is_nan() || iv.hi == f64::NEG_INFINITY {
                return Err(Error::InvalidBand(format!(
                    "interval {}: bounds ({}, {}) must satisfy 0 <= lo < hi",
                    k + 1,
                    iv.lo,
                    iv.hi
                )));
            }
            if iv.lo >= iv.hi {
                return Err(Error::InvalidBand(format!(
                    "interval {}: lower bound {} is not below upper bound {}",
                    k + 1,
                    iv.lo,
                    iv.hi
                )));
            }
        }
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in intervals.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::BandOverlap(format!(
                    "[{}, {}] and [{}, {}]",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(Self { intervals })
    }

    /// `[0, ∞)`.
    pub fn full() -> Self {
        Self {
            intervals: vec![Interval { lo: 0.0, hi: f64::INFINITY }],
        }
    }

    /// `[0, ω]`.
    pub fn up_to(omega: f64) -> Result<Self> {
        Self::new([(0.0, omega)])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_unbounded(&self) -> bool {
        self.intervals.last().is_some_and(Interval::is_unbounded)
    }

    /// One-sided measure divided by `2π`: `θ(Ω) = Σ (hi − lo) / 2π`.
    ///
    /// This is the weight of the feedthrough term `D Dᵀ` in the band norm;
    /// infinite for unbounded bands.
    pub fn theta(&self) -> f64 {
        self.intervals.iter().map(|iv| iv.hi - iv.lo).sum::<f64>() / (2.0 * std::f64::consts::PI)
    }

    /// Finite, strictly positive endpoints with the sign they carry in
    /// `S_Ω = Σ (S_hi − S_lo)`.
    pub fn signed_endpoints(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(2 * self.intervals.len());
        for iv in &self.intervals {
            if iv.lo > 0.0 {
                out.push((iv.lo, -1.0));
            }
            if iv.hi.is_finite() {
                out.push((iv.hi, 1.0));
            }
        }
        out
    }

    /// Largest finite endpoint, or `None` for `[0, ∞)`.
    pub fn max_finite(&self) -> Option<f64> {
        self.intervals
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .filter(|w| w.is_finite() && *w > 0.0)
            .fold(None, |acc, w| Some(acc.map_or(w, |a: f64| a.max(w))))
    }
}

fn parse_bound(text: &str, interval: usize, which: &str) -> Result<f64> {
    let t = text.trim();
    let value = match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
        _ => t.parse::<f64>(),
    };
    value.map_err(|_| Error::Parse {
        location: format!("band interval {interval}, {which} bound"),
        message: format!("cannot parse '{t}' as a frequency"),
    })
}

impl FromStr for FrequencyBand {
    type Err = Error;

    /// Parses `"lo:hi[,lo:hi...]"`, e.g. `"0:1.7"`, `"0:1.7,3:4"`, `"0:inf"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (k, part) in s.split(',').enumerate() {
            let idx = k + 1;
            let (lo, hi) = part.split_once(':').ok_or_else(|| Error::Parse {
                location: format!("band interval {idx}"),
                message: format!("expected 'lo:hi', got '{}'", part.trim()),
            })?;
            let lo = parse_bound(lo, idx, "lower")?;
            let hi = parse_bound(hi, idx, "upper")?;
            if lo.is_infinite() {
                return Err(Error::Parse {
                    location: format!("band interval {idx}, lower bound"),
                    message: "lower bound must be finite".into(),
                });
            }
            if !(lo >= 0.0 && lo < hi) {
                return Err(Error::Parse {
                    location: format!("band interval {idx}"),
                    message: format!("need 0 <= lo < hi, got {lo}:{hi}"),
                });
            }
            pairs.push((lo, hi));
        }
        let unbounded = pairs.iter().filter(|(_, hi)| hi.is_infinite()).count();
        let last_hi = pairs.last().map(|p| p.1);
        if unbounded > 1 || (unbounded == 1 && !last_hi.is_some_and(f64::is_infinite)) {
            return Err(Error::Parse {
                location: "band".into(),
                message: "'inf' is only allowed as the upper bound of the last interval".into(),
            });
        }
        Self::new(pairs)
    }
}

impl fmt::Display for FrequencyBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, iv) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            if iv.hi.is_infinite() {
                write!(f, "{}:inf", iv.lo)?;
            } else {
                write!(f, "{}:{}", iv.lo, iv.hi)?;
            }
        }
        Ok(())
    }
}
