//! Symmetric moment estimators: averages of joint moments over all
//! distinct-index tuples, normalised by the falling factorial.
//!
//! For a pattern with exponents `(e_1..e_m)` and sample size n the value is
//!
//! ```text
//! (1 / n(n-1)...(n-m+1)) * sum over injective (i_1..i_m) of E[prod X_{i_j}^{e_j}]
//! ```
//!
//! The enumeration iterates unordered index combinations times the distinct
//! assignments of the exponent multiset (the `prod mult!` symmetry factor is
//! applied once), which cuts the work by the pattern's symmetry. I.i.d.
//! models factorise outright; stationary Gaussian models group tuples by
//! their offset signature and weight each signature by the number of
//! translates that fit in `1..=n`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::numeric::NeumaierSum;
use crate::pattern::ExponentPattern;
use crate::process::{MomentCache, ProcessModel};
use crate::Result;

/// Refusal threshold for naive enumeration (no fast path) at high arity.
const NAIVE_N_CAP: usize = 64;
/// Refusal threshold on offset signatures for the stationary path.
const STATIONARY_SIGNATURE_CAP: f64 = 2e7;

/// One group of estimators (group k holds the order-2k patterns).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SymmetricMomentTable {
    pub n: usize,
    pub group: u8,
    entries: BTreeMap<ExponentPattern, f64>,
}

impl SymmetricMomentTable {
    pub fn get(&self, pattern: &ExponentPattern) -> Option<f64> {
        self.entries.get(pattern).copied()
    }

    /// Lookup by raw exponent list (any order).
    pub fn get_exponents(&self, exponents: &[u8]) -> Option<f64> {
        let pattern = ExponentPattern::new(exponents.to_vec()).ok()?;
        self.get(&pattern)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ExponentPattern, f64)> {
        self.entries.iter().map(|(p, &v)| (p, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Exact falling factorial n(n-1)...(n-k+1) (fits f64 exactly for the
/// n <= 64, k <= 8 range enforced by the enumeration caps).
pub fn falling_factorial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i) as f64;
    }
    acc
}

/// The estimator value for one pattern.
pub fn symmetric_moment(model: &ProcessModel, pattern: &ExponentPattern, n: usize) -> Result<f64> {
    let mut cache = MomentCache::new();
    symmetric_moment_cached(model, pattern, n, &mut cache)
}

pub(crate) fn symmetric_moment_cached(
    model: &ProcessModel,
    pattern: &ExponentPattern,
    n: usize,
    cache: &mut MomentCache,
) -> Result<f64> {
    let m = pattern.arity();
    if n < m {
        return Err(Error::InsufficientSampleSize { needed: m, got: n });
    }
    if let Some(fixed) = model.fixed_n() {
        if fixed != n {
            return Err(Error::InvalidParameter(alloc::format!(
                "model fixes n = {fixed}, got n = {n}"
            )));
        }
    }
    match model {
        ProcessModel::Iid { .. } => {
            // Independence and identical marginals: the average over tuples
            // is the single product of raw moments.
            let indices: Vec<(usize, u8)> = pattern
                .exponents()
                .iter()
                .enumerate()
                .map(|(slot, &e)| (slot + 1, e))
                .collect();
            model.joint_moment_cached(&indices, cache)
        }
        ProcessModel::GaussianStationary { .. } => stationary_value(model, pattern, n, cache),
        ProcessModel::FiniteJoint { .. } => enumerated_value(model, pattern, n, cache),
    }
}

/// Build the tables for groups 1..=max_group.
pub fn build_tables(
    model: &ProcessModel,
    n: usize,
    max_group: u8,
) -> Result<Vec<SymmetricMomentTable>> {
    if !(1..=4).contains(&max_group) {
        return Err(Error::InvalidParameter(String::from(
            "max_group must be in 1..=4",
        )));
    }
    if n < 2 * max_group as usize {
        return Err(Error::InsufficientSampleSize {
            needed: 2 * max_group as usize,
            got: n,
        });
    }
    let mut cache = MomentCache::new();
    let mut tables = Vec::with_capacity(max_group as usize);
    for group in 1..=max_group {
        let mut entries = BTreeMap::new();
        for pattern in ExponentPattern::group_catalog(group) {
            let value = symmetric_moment_cached(model, &pattern, n, &mut cache)?;
            if !value.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!(
                    "estimator {pattern} is not finite"
                )));
            }
            entries.insert(pattern, value);
        }
        tables.push(SymmetricMomentTable { n, group, entries });
    }
    Ok(tables)
}

/// All distinct orderings of the exponent multiset, lexicographically.
fn distinct_assignments(exponents: &[u8]) -> Vec<Vec<u8>> {
    let mut current = exponents.to_vec();
    current.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(current.clone());
        if !next_permutation(&mut current) {
            break;
        }
    }
    out
}

fn next_permutation(seq: &mut [u8]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

fn multiplicity_factor(exponents: &[u8]) -> f64 {
    let mut factor = 1.0;
    let mut run = 1u32;
    for w in exponents.windows(2) {
        if w[0] == w[1] {
            run += 1;
            factor *= run as f64;
        } else {
            run = 1;
        }
    }
    factor
}

fn binomial_approx(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// General path: unordered combinations x distinct exponent assignments.
fn enumerated_value(
    model: &ProcessModel,
    pattern: &ExponentPattern,
    n: usize,
    cache: &mut MomentCache,
) -> Result<f64> {
    let m = pattern.arity();
    if n > NAIVE_N_CAP && m >= 6 {
        return Err(Error::EnumerationTooLarge { n, arity: m });
    }
    let assignments = distinct_assignments(pattern.exponents());
    let mut sum = NeumaierSum::new();
    let mut combo: Vec<usize> = (1..=m).collect();
    let mut indices: Vec<(usize, u8)> = Vec::with_capacity(m);
    loop {
        for assignment in &assignments {
            indices.clear();
            indices.extend(combo.iter().copied().zip(assignment.iter().copied()));
            sum.add(model.joint_moment_cached(&indices, cache)?);
        }
        if !advance_combination(&mut combo, n) {
            break;
        }
    }
    Ok(sum.value() * multiplicity_factor(pattern.exponents()) / falling_factorial(n, m))
}

/// Lexicographic successor of a 1-based combination; false when exhausted.
fn advance_combination(combo: &mut [usize], n: usize) -> bool {
    let m = combo.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if combo[i] < n - (m - 1 - i) {
            combo[i] += 1;
            for j in i + 1..m {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Stationary path: group combinations by their offset signature
/// (positions relative to the smallest index); a signature spanning `s`
/// positions occurs `n - s` times.
fn stationary_value(
    model: &ProcessModel,
    pattern: &ExponentPattern,
    n: usize,
    cache: &mut MomentCache,
) -> Result<f64> {
    let m = pattern.arity();
    if m == 1 {
        let value = model.joint_moment_cached(&[(1, pattern.exponents()[0])], cache)?;
        return Ok(value);
    }
    if binomial_approx(n - 1, m - 1) > STATIONARY_SIGNATURE_CAP {
        return Err(Error::EnumerationTooLarge { n, arity: m });
    }
    let assignments = distinct_assignments(pattern.exponents());
    let mut sum = NeumaierSum::new();
    // Offsets o_1 = 0 < o_2 < ... < o_m <= n-1, stored 1-based for queries.
    let mut offsets: Vec<usize> = (1..=m).collect();
    let mut indices: Vec<(usize, u8)> = Vec::with_capacity(m);
    loop {
        let span = offsets[m - 1] - offsets[0];
        let weight = (n - span) as f64;
        for assignment in &assignments {
            indices.clear();
            indices.extend(offsets.iter().copied().zip(assignment.iter().copied()));
            sum.add(weight * model.joint_moment_cached(&indices, cache)?);
        }
        if !advance_anchored(&mut offsets, n) {
            break;
        }
    }
    Ok(sum.value() * multiplicity_factor(pattern.exponents()) / falling_factorial(n, m))
}

/// Successor over combinations whose first element is pinned at 1.
fn advance_anchored(offsets: &mut [usize], n: usize) -> bool {
    let m = offsets.len();
    let mut i = m;
    while i > 1 {
        i -= 1;
        if offsets[i] < n - (m - 1 - i) {
            offsets[i] += 1;
            for j in i + 1..m {
                offsets[j] = offsets[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
