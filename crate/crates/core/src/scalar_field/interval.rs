use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::LipError;

/// An interval of the real line with independently open or closed,
/// possibly infinite, endpoints. Infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Self {
        Self {
            lo,
            hi,
            lo_open: lo_open || lo == f64::NEG_INFINITY,
            hi_open: hi_open || hi == f64::INFINITY,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        if x.is_nan() {
            return false;
        }
        let above = if self.lo_open {
            x > self.lo
        } else {
            x >= self.lo
        };
        let below = if self.hi_open {
            x < self.hi
        } else {
            x <= self.hi
        };
        above && below
    }

    /// Degenerate: empty or a single point.
    pub fn is_degenerate(&self) -> bool {
        self.lo.is_nan() || self.hi.is_nan() || self.lo >= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_real_line(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }

    pub fn require_nondegenerate(&self) -> Result<(), LipError> {
        if self.is_degenerate() {
            Err(LipError::DegenerateInterval(self.to_string()))
        } else {
            Ok(())
        }
    }

    /// A point of the interval, used for extensions from an empty set.
    pub fn representative(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

fn parse_endpoint(s: &str) -> Result<f64, String> {
    match s.trim() {
        "-inf" | "-infinity" | "-∞" => Ok(f64::NEG_INFINITY),
        "inf" | "+inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        other => other
            .parse::<f64>()
            .map_err(|e| format!("bad endpoint {other:?}: {e}")),
    }
}

fn parse_kind(s: &str) -> Result<bool, String> {
    match s.trim() {
        "open" => Ok(true),
        "closed" => Ok(false),
        other => Err(format!("expected open|closed, got {other:?}")),
    }
}

/// Parses `lo,hi,open|closed,open|closed`; the last two parts default to
/// `closed`.
impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if !(2..=4).contains(&parts.len()) {
            return Err(format!(
                "expected lo,hi[,open|closed,open|closed], got {s:?}"
            ));
        }
        let lo = parse_endpoint(parts[0])?;
        let hi = parse_endpoint(parts[1])?;
        let lo_open = parts
            .get(2)
            .map(|p| parse_kind(p))
            .transpose()?
            .unwrap_or(false);
        let hi_open = parts
            .get(3)
            .map(|p| parse_kind(p))
            .transpose()?
            .unwrap_or(false);
        Ok(Interval::new(lo, hi, lo_open, hi_open))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_respects_endpoint_kinds() {
        let half = Interval::new(0.0, 1.0, true, false);
        assert!(!half.contains(0.0));
        assert!(half.contains(1.0));
        assert!(Interval::real_line().contains(-1e300));
        assert!(!Interval::closed(0.0, 1.0).contains(f64::NAN));
    }

    #[test]
    fn parse_interval() {
        let i: Interval = "0,inf,open,open".parse().unwrap();
        assert_eq!(i, Interval::open(0.0, f64::INFINITY));
        let j: Interval = "-1,2".parse().unwrap();
        assert_eq!(j, Interval::closed(-1.0, 2.0));
        // infinite endpoints are forced open
        let k: Interval = "-inf,3,closed,closed".parse().unwrap();
        assert!(k.lo_open && !k.hi_open);
        assert!("1,2,ajar".parse::<Interval>().is_err());
    }

    #[test]
    fn degenerate() {
        assert!(Interval::closed(1.0, 1.0).is_degenerate());
        assert!(Interval::closed(2.0, 1.0).require_nondegenerate().is_err());
        assert!(!Interval::open(0.0, f64::INFINITY).is_degenerate());
    }
}
