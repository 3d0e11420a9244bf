//! Exponent patterns indexing the symmetric moment estimators.
//!
//! A pattern is the multiset of exponents appearing in one estimator, e.g.
//! `{3,2,1,1}` for the average of `E[X_i^3 X_j^2 X_k X_l]` over distinct
//! index tuples. Patterns are kept sorted descending; the estimator group is
//! always `order / 2` (the tables of group k collect the patterns of total
//! order 2k).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// A multiset of positive exponents, canonically sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentPattern {
    exponents: Vec<u8>,
}

impl ExponentPattern {
    /// Build a pattern from any exponent order; sorts descending.
    pub fn new(exponents: impl Into<Vec<u8>>) -> crate::Result<Self> {
        let mut exponents = exponents.into();
        if exponents.is_empty() || exponents.contains(&0) {
            return Err(Error::InvalidParameter(String::from(
                "pattern exponents must be positive",
            )));
        }
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        let pattern = Self { exponents };
        if pattern.order() > 8 {
            return Err(Error::OrderTooHigh {
                order: pattern.order(),
            });
        }
        Ok(pattern)
    }

    /// Sum of exponents.
    pub fn order(&self) -> u32 {
        self.exponents.iter().map(|&e| e as u32).sum()
    }

    /// Number of exponents (distinct indices used).
    pub fn arity(&self) -> usize {
        self.exponents.len()
    }

    /// Estimator group: the tables of group k hold the order-2k patterns.
    pub fn group(&self) -> u8 {
        (self.order() / 2) as u8
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    /// All patterns of a group, i.e. the integer partitions of `2 * group`,
    /// in the canonical (descending lexicographic) order.
    pub fn group_catalog(group: u8) -> Vec<ExponentPattern> {
        assert!((1..=4).contains(&group), "groups 1..=4 only");
        let mut out = Vec::new();
        let mut current = Vec::new();
        partitions(2 * group as u32, 8, &mut current, &mut out);
        out
    }
}

fn partitions(remaining: u32, max_part: u8, current: &mut Vec<u8>, out: &mut Vec<ExponentPattern>) {
    if remaining == 0 {
        out.push(ExponentPattern {
            exponents: current.clone(),
        });
        return;
    }
    let cap = max_part.min(remaining as u8);
    for part in (1..=cap).rev() {
        current.push(part);
        partitions(remaining - part as u32, part, current, out);
        current.pop();
    }
}

impl fmt::Display for ExponentPattern {
    /// Dotted form used as the JSON key, e.g. `3.2.1.1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for ExponentPattern {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let exponents = s
            .split('.')
            .map(|part| {
                part.parse::<u8>().map_err(|_| {
                    Error::InvalidParameter(alloc::format!("bad pattern component {part:?}"))
                })
            })
            .collect::<crate::Result<Vec<u8>>>()?;
        Self::new(exponents)
    }
}

impl serde::Serialize for ExponentPattern {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ExponentPattern {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <&str as serde::Deserialize>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
