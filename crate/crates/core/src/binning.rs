//! Logarithmic counting intervals `[α^s, α^{s+1})` over balance ratios.
//!
//! Ratios are rationals `t/m` of in-degrees, so a ratio can sit exactly on a
//! bin edge (`R = 1`, `R = 10` with `α = 10^0.1`, `R = 1/4` with `α = 2`).
//! Binning goes through `ln` first and, when the result lands within a hair
//! of an integer, the edge is decided exactly. That is possible whenever `α`
//! is recognised as `b^(1/q)` for small integers `b` and `q`: then
//! `t/m ≥ α^j` iff `t^q ≥ b^j·m^q`, an integer comparison. Other values of
//! `α` snap near-edge ratios onto the upper bin.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `10^0.1`, ten bins per decade.
pub const DEFAULT_ALPHA: f64 = 1.258_925_411_794_167_3;

const MAX_ROOT_BASE: u64 = 100;
const MAX_ROOT_ORDER: u32 = 64;
const EDGE_WINDOW: f64 = 1e-9;

/// An interval parameter `α > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha {
    value: f64,
    ln: f64,
    /// `(b, q)` with `α = b^(1/q)`.
    root: Option<(u64, u32)>,
}

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 1.0 {
            return Err(Error::Parameter(format!(
                "interval parameter alpha must be > 1, got {value}"
            )));
        }
        let root = detect_root(value);
        // a recognised root is stored in its canonical rounding
        let value = root.map_or(value, |(b, q)| (b as f64).powf(1.0 / q as f64));
        Ok(Alpha {
            value,
            ln: value.ln(),
            root,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// `(b, q)` when `α` was recognised as `b^(1/q)`.
    pub fn exact_root(&self) -> Option<(u64, u32)> {
        self.root
    }

    pub fn pow(&self, s: i32) -> f64 {
        match self.root {
            Some((b, q)) => (b as f64).powf(s as f64 / q as f64),
            None => self.value.powi(s),
        }
    }

    pub fn lower_edge(&self, s: i32) -> f64 {
        self.pow(s)
    }

    pub fn upper_edge(&self, s: i32) -> f64 {
        self.pow(s + 1)
    }

    /// The bin edge nearest `R = 1`: the lower edge for `s ≥ 0`, the upper
    /// edge for `s < 0`. Far-section predictions are stated at these points.
    pub fn anchor(&self, s: i32) -> f64 {
        if s >= 0 {
            self.lower_edge(s)
        } else {
            self.upper_edge(s)
        }
    }

    /// Bin index of the ratio `target / source` (both ≥ 1).
    pub fn bin_of_ratio(&self, target: u64, source: u64) -> i32 {
        debug_assert!(target >= 1 && source >= 1);
        if target == source {
            return 0;
        }
        let x = ((target as f64).ln() - (source as f64).ln()) / self.ln;
        self.resolve(x, target, source)
    }

    /// Same as [`bin_of_ratio`](Self::bin_of_ratio) with precomputed logs.
    #[inline]
    pub(crate) fn bin_of_logs(&self, ln_t: f64, ln_m: f64, target: u64, source: u64) -> i32 {
        if target == source {
            return 0;
        }
        self.resolve((ln_t - ln_m) / self.ln, target, source)
    }

    #[inline]
    fn resolve(&self, x: f64, target: u64, source: u64) -> i32 {
        let nearest = x.round();
        if (x - nearest).abs() > EDGE_WINDOW {
            return x.floor() as i32;
        }
        let j = nearest as i32;
        match self.root {
            Some((b, q)) => {
                if ratio_at_least_root_power(target, source, b, q, j) {
                    j
                } else {
                    j - 1
                }
            }
            None => j,
        }
    }

    /// Bin index of an arbitrary positive real (used for grid points).
    pub fn bin_of_value(&self, r: f64) -> i32 {
        let x = r.ln() / self.ln;
        let nearest = x.round();
        if (x - nearest).abs() <= EDGE_WINDOW {
            nearest as i32
        } else {
            x.floor() as i32
        }
    }

    /// Same parameter up to float noise in serialisation.
    pub fn matches(&self, other: &Alpha) -> bool {
        (self.value - other.value).abs() <= 1e-12 * self.value
    }
}

impl Default for Alpha {
    fn default() -> Self {
        Alpha::new(DEFAULT_ALPHA).expect("default alpha is valid")
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// Accepts a plain float or `b^e` (e.g. `10^0.1`).
impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parameter(format!("cannot parse alpha from {s:?}"));
        let value = match s.split_once('^') {
            Some((b, e)) => {
                let b: f64 = b.trim().parse().map_err(|_| bad())?;
                let e: f64 = e.trim().parse().map_err(|_| bad())?;
                b.powf(e)
            }
            None => s.parse().map_err(|_| bad())?,
        };
        Alpha::new(value)
    }
}

impl Serialize for Alpha {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value)
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Alpha::new(v).map_err(serde::de::Error::custom)
    }
}

fn detect_root(value: f64) -> Option<(u64, u32)> {
    for q in 1..=MAX_ROOT_ORDER {
        let b = value.powi(q as i32);
        if b > MAX_ROOT_BASE as f64 + 0.5 {
            break;
        }
        let rounded = b.round();
        if rounded >= 2.0 && (b - rounded).abs() <= 1e-9 * rounded {
            let candidate = rounded as u64;
            let back = (candidate as f64).powf(1.0 / q as f64);
            if (back - value).abs() <= 4.0 * f64::EPSILON * value {
                return Some((candidate, q));
            }
        }
    }
    None
}

/// `t/m ≥ b^(j/q)`, decided in integers.
fn ratio_at_least_root_power(t: u64, m: u64, b: u64, q: u32, j: i32) -> bool {
    let t_q = BigUint::from(t).pow(q);
    let m_q = BigUint::from(m).pow(q);
    let b_j = BigUint::from(b).pow(j.unsigned_abs());
    if j >= 0 {
        t_q >= b_j * m_q
    } else {
        t_q * b_j >= m_q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_alpha_at_most_one() {
        assert!(Alpha::new(1.0).is_err());
        assert!(Alpha::new(0.5).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!("1.0".parse::<Alpha>().is_err());
    }

    #[test]
    fn recognises_roots() {
        assert_eq!(Alpha::new(2.0).unwrap().exact_root(), Some((2, 1)));
        assert_eq!(Alpha::default().exact_root(), Some((10, 10)));
        assert_eq!("10^0.1".parse::<Alpha>().unwrap().exact_root(), Some((10, 10)));
        assert_eq!(Alpha::new(2f64.sqrt()).unwrap().exact_root(), Some((2, 2)));
        assert_eq!(Alpha::new(1.7).unwrap().exact_root(), None);
    }

    #[test]
    fn unit_ratio_is_bin_zero() {
        for a in [1.05, 1.5, 2.0, DEFAULT_ALPHA, 7.0] {
            let alpha = Alpha::new(a).unwrap();
            assert_eq!(alpha.bin_of_ratio(5, 5), 0);
            assert_eq!(alpha.bin_of_ratio(1, 1), 0);
        }
    }

    #[test]
    fn exact_powers_go_to_lower_closed_bin() {
        let two = Alpha::new(2.0).unwrap();
        assert_eq!(two.bin_of_ratio(2, 1), 1);
        assert_eq!(two.bin_of_ratio(1, 2), -1);
        assert_eq!(two.bin_of_ratio(1, 4), -2);
        assert_eq!(two.bin_of_ratio(3, 1), 1);
        assert_eq!(two.bin_of_ratio(1, 3), -2);
        assert_eq!(two.bin_of_ratio(1024, 1), 10);
        assert_eq!(two.bin_of_ratio(1023, 1), 9);

        let decade = Alpha::default();
        assert_eq!(decade.bin_of_ratio(10, 1), 10);
        assert_eq!(decade.bin_of_ratio(100, 1), 20);
        assert_eq!(decade.bin_of_ratio(1, 10), -10);
        assert_eq!(decade.bin_of_ratio(3, 30), -10);
        assert_eq!(decade.bin_of_ratio(1, 100_000), -50);
        assert_eq!(decade.bin_of_ratio(99_999, 10_000), 9);
        assert_eq!(decade.bin_of_ratio(2, 1), 3);
        assert_eq!(decade.bin_of_ratio(1, 2), -4);
    }

    #[test]
    fn anchors_face_unit_ratio() {
        let two = Alpha::new(2.0).unwrap();
        assert_eq!(two.anchor(3), 8.0);
        assert_eq!(two.anchor(-1), 1.0);
        assert_eq!(two.anchor(-3), 0.25);
    }
}
