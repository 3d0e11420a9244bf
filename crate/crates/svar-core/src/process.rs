//! Process models and the joint raw-moment oracle.
//!
//! Every downstream quantity is an average of joint moments
//! `E[X_{i1}^{a1} ... X_{ik}^{ak}]`, so a process is anything that can answer
//! that query exactly:
//!
//! * [`ProcessModel::Iid`] — factorises into marginal raw moments,
//! * [`ProcessModel::GaussianStationary`] — zero-mean stationary Gaussian,
//!   answered by the Isserlis (Wick) pairing sum over autocovariances,
//! * [`ProcessModel::FiniteJoint`] — an explicit finite-support joint law,
//!   the universal exactness fallback (Markov chains are materialised into
//!   it rather than given a bespoke moment path).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::numeric::{self, fabs, powi, NeumaierSum};
use crate::Result;

/// Probability tolerance for distributions summing to one.
pub const PROB_TOL: f64 = 1e-12;

/// Cap on the number of atoms a finite-support construction may produce.
pub const SUPPORT_CAP: u64 = 10_000_000;

/// Autocovariance of a zero-mean stationary Gaussian process.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Autocovariance {
    /// AR(1): gamma(h) = variance * phi^h with `variance = gamma(0)`.
    Ar1 { variance: f64, phi: f64 },
    /// Tabulated gamma(0), gamma(1), ...; zero beyond the table.
    Table(Vec<f64>),
}

impl Autocovariance {
    pub fn gamma(&self, lag: usize) -> f64 {
        match self {
            Autocovariance::Ar1 { variance, phi } => variance * powi(*phi, lag as i32),
            Autocovariance::Table(values) => values.get(lag).copied().unwrap_or(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let gamma0 = self.gamma(0);
        if gamma0 <= 0.0 || gamma0.is_nan() {
            return Err(Error::InvalidParameter(String::from(
                "autocovariance must have gamma(0) > 0",
            )));
        }
        match self {
            Autocovariance::Ar1 { phi, .. } => {
                if fabs(*phi) >= 1.0 {
                    return Err(Error::InvalidParameter(String::from(
                        "AR(1) coefficient must satisfy |phi| < 1",
                    )));
                }
            }
            Autocovariance::Table(values) => {
                for (lag, &value) in values.iter().enumerate() {
                    if fabs(value) > gamma0 {
                        return Err(Error::InvalidAutocovariance { lag, value, gamma0 });
                    }
                }
            }
        }
        Ok(())
    }
}

/// A process description exposing exact joint moments.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ProcessModel {
    /// Independent identically distributed observations described by their
    /// raw moments `mu_1..mu_k` (index `raw_moments[j]` is `mu_{j+1}`).
    Iid { raw_moments: Vec<f64> },
    /// Zero-mean stationary Gaussian process.
    GaussianStationary { autocov: Autocovariance },
    /// Explicit joint law with finite support: `atoms` are
    /// `(path of length n, probability)` pairs.
    FiniteJoint {
        n: usize,
        atoms: Vec<(Vec<f64>, f64)>,
    },
}

impl ProcessModel {
    pub fn iid(raw_moments: Vec<f64>) -> Result<Self> {
        if raw_moments.is_empty() {
            return Err(Error::InvalidParameter(String::from(
                "need at least one raw moment",
            )));
        }
        if raw_moments.len() >= 2 {
            let mu1 = raw_moments[0];
            let mu2 = raw_moments[1];
            if mu2 < mu1 * mu1 - PROB_TOL {
                return Err(Error::InvalidDistribution(alloc::format!(
                    "mu_2 = {mu2} < mu_1^2 = {}",
                    mu1 * mu1
                )));
            }
        }
        Ok(ProcessModel::Iid { raw_moments })
    }

    /// Raw moments of N(0, sigma^2) up to order 8: mu_{2k} = sigma^{2k} (2k-1)!!.
    pub fn iid_normal(sigma: f64) -> Result<Self> {
        if sigma <= 0.0 || sigma.is_nan() {
            return Err(Error::InvalidParameter(String::from("sigma must be > 0")));
        }
        let s2 = sigma * sigma;
        Self::iid(vec![
            0.0,
            s2,
            0.0,
            3.0 * powi(s2, 2),
            0.0,
            15.0 * powi(s2, 3),
            0.0,
            105.0 * powi(s2, 4),
        ])
    }

    /// Zero-mean stationary Gaussian. A non-zero mean is rejected: the
    /// sample variance only depends on the observations through
    /// `X_i - mean(X)`, so zero mean loses no generality and silent shifting
    /// would hide a modelling mistake.
    pub fn gaussian_stationary(mean: f64, autocov: Autocovariance) -> Result<Self> {
        if mean != 0.0 {
            return Err(Error::NonZeroGaussianMean(mean));
        }
        autocov.validate()?;
        Ok(ProcessModel::GaussianStationary { autocov })
    }

    /// Stationary Gaussian AR(1) with innovation standard deviation `sd`:
    /// gamma(h) = sd^2 / (1 - phi^2) * phi^h.
    pub fn gaussian_ar1(phi: f64, innovation_sd: f64) -> Result<Self> {
        if fabs(phi) >= 1.0 {
            return Err(Error::InvalidParameter(String::from(
                "AR(1) coefficient must satisfy |phi| < 1",
            )));
        }
        if innovation_sd <= 0.0 || innovation_sd.is_nan() {
            return Err(Error::InvalidParameter(String::from(
                "innovation sd must be > 0",
            )));
        }
        let variance = innovation_sd * innovation_sd / (1.0 - phi * phi);
        Self::gaussian_stationary(0.0, Autocovariance::Ar1 { variance, phi })
    }

    pub fn finite_joint(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution(String::from("no atoms")));
        }
        let n = atoms[0].0.len();
        if n == 0 {
            return Err(Error::InvalidDistribution(String::from(
                "atoms must have positive length",
            )));
        }
        let mut total = NeumaierSum::new();
        for (path, p) in &atoms {
            if path.len() != n {
                return Err(Error::InvalidDistribution(String::from(
                    "atom paths must share one length",
                )));
            }
            if *p < -PROB_TOL {
                return Err(Error::InvalidDistribution(alloc::format!(
                    "negative atom probability {p}"
                )));
            }
            total.add(*p);
        }
        if fabs(total.value() - 1.0) > PROB_TOL {
            return Err(Error::InvalidDistribution(alloc::format!(
                "atom probabilities sum to {}, not 1",
                total.value()
            )));
        }
        Ok(ProcessModel::FiniteJoint { n, atoms })
    }

    /// The constant process X = c, materialised as a single atom.
    pub fn constant(value: f64, n: usize) -> Result<Self> {
        Self::finite_joint(vec![(vec![value; n], 1.0)])
    }

    /// Product measure of an i.i.d. marginal on a finite support, as an
    /// explicit joint law (used to cross-check the i.i.d. fast path against
    /// exact enumeration).
    pub fn finite_joint_from_iid_marginal(
        support: &[f64],
        probs: &[f64],
        n: usize,
    ) -> Result<Self> {
        if support.len() != probs.len() || support.is_empty() {
            return Err(Error::InvalidDistribution(String::from(
                "support and probabilities must be non-empty and congruent",
            )));
        }
        check_distribution(probs)?;
        let count = (support.len() as u64).checked_pow(n as u32);
        match count {
            Some(c) if c <= SUPPORT_CAP => {}
            _ => {
                return Err(Error::SupportExplosion {
                    atoms: count.unwrap_or(u64::MAX),
                    cap: SUPPORT_CAP,
                })
            }
        }
        let mut atoms = Vec::new();
        let mut path = Vec::with_capacity(n);
        fn recurse(
            support: &[f64],
            probs: &[f64],
            n: usize,
            prob: f64,
            path: &mut Vec<f64>,
            atoms: &mut Vec<(Vec<f64>, f64)>,
        ) {
            if path.len() == n {
                if prob > 0.0 {
                    atoms.push((path.clone(), prob));
                }
                return;
            }
            for (x, p) in support.iter().zip(probs) {
                if *p == 0.0 {
                    continue;
                }
                path.push(*x);
                recurse(support, probs, n, prob * p, path, atoms);
                path.pop();
            }
        }
        recurse(support, probs, n, 1.0, &mut path, &mut atoms);
        Self::finite_joint(atoms)
    }

    /// Raw moments of the marginal of an i.i.d. finite-support law, for
    /// pairing a [`ProcessModel::Iid`] with its enumerable twin.
    pub fn raw_moments_of_support(support: &[f64], probs: &[f64], upto: usize) -> Vec<f64> {
        (1..=upto)
            .map(|k| {
                compensated(
                    support
                        .iter()
                        .zip(probs)
                        .map(|(x, p)| p * powi(*x, k as i32)),
                )
            })
            .collect()
    }

    /// Number of observations the model pins down, if any (`FiniteJoint`
    /// fixes its own n; the other models answer queries for any n).
    pub fn fixed_n(&self) -> Option<usize> {
        match self {
            ProcessModel::FiniteJoint { n, .. } => Some(*n),
            _ => None,
        }
    }

    /// Joint raw moment `E[prod_j X_{i_j}^{a_j}]` for distinct 1-based
    /// indices. The result never depends on the ordering of `indices`.
    pub fn joint_moment(&self, indices: &[(usize, u8)]) -> Result<f64> {
        let mut cache = MomentCache::new();
        self.joint_moment_cached(indices, &mut cache)
    }

    pub(crate) fn joint_moment_cached(
        &self,
        indices: &[(usize, u8)],
        cache: &mut MomentCache,
    ) -> Result<f64> {
        let mut order: u32 = 0;
        for (pos, &(index, exponent)) in indices.iter().enumerate() {
            if index == 0 {
                return Err(Error::IndexOutOfRange { index, n: 0 });
            }
            if let Some(n) = self.fixed_n() {
                if index > n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if exponent == 0 {
                return Err(Error::InvalidParameter(String::from(
                    "exponents must be positive",
                )));
            }
            for (other, &(j, _)) in indices.iter().enumerate() {
                if other != pos && j == index {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "indices must be distinct (index {index} repeats)"
                    )));
                }
            }
            order += exponent as u32;
        }
        if order > 8 {
            return Err(Error::OrderTooHigh { order });
        }
        // Canonicalise the factor order so permuted queries are bit-identical
        // (float products are not commutative in rounding). The enumeration
        // kernels already pass ascending indices, so this is usually free.
        let sorted_storage: Vec<(usize, u8)>;
        let indices: &[(usize, u8)] = if indices.windows(2).all(|w| w[0].0 < w[1].0) {
            indices
        } else {
            let mut sorted = indices.to_vec();
            sorted.sort_unstable();
            sorted_storage = sorted;
            &sorted_storage
        };
        match self {
            ProcessModel::Iid { raw_moments } => {
                let mut product = 1.0;
                for &(_, exponent) in indices {
                    let mu = raw_moments.get(exponent as usize - 1).ok_or_else(|| {
                        Error::InvalidParameter(alloc::format!(
                            "raw moment mu_{exponent} not supplied"
                        ))
                    })?;
                    product *= mu;
                }
                Ok(product)
            }
            ProcessModel::GaussianStationary { autocov } => {
                if order % 2 == 1 {
                    return Ok(0.0);
                }
                Ok(isserlis(indices, autocov, cache))
            }
            ProcessModel::FiniteJoint { atoms, .. } => {
                let mut sum = NeumaierSum::new();
                for (path, p) in atoms {
                    let mut product = *p;
                    for &(index, exponent) in indices {
                        product *= powi(path[index - 1], exponent as i32);
                    }
                    sum.add(product);
                }
                Ok(sum.value())
            }
        }
    }

    /// Model for `c * X`: raw moments scale by `c^k`, covariances by `c^2`,
    /// atoms pointwise.
    pub fn scaled(&self, c: f64) -> ProcessModel {
        match self {
            ProcessModel::Iid { raw_moments } => ProcessModel::Iid {
                raw_moments: raw_moments
                    .iter()
                    .enumerate()
                    .map(|(j, mu)| powi(c, j as i32 + 1) * mu)
                    .collect(),
            },
            ProcessModel::GaussianStationary { autocov } => {
                let autocov = match autocov {
                    Autocovariance::Ar1 { variance, phi } => Autocovariance::Ar1 {
                        variance: c * c * variance,
                        phi: *phi,
                    },
                    Autocovariance::Table(values) => {
                        Autocovariance::Table(values.iter().map(|g| c * c * g).collect())
                    }
                };
                ProcessModel::GaussianStationary { autocov }
            }
            ProcessModel::FiniteJoint { n, atoms } => ProcessModel::FiniteJoint {
                n: *n,
                atoms: atoms
                    .iter()
                    .map(|(path, p)| (path.iter().map(|x| c * x).collect(), *p))
                    .collect(),
            },
        }
    }

    /// Model for `X + c`. Raw moments shift binomially; atoms shift
    /// pointwise. Rejected for Gaussian models, whose mean is pinned to 0.
    pub fn shifted(&self, c: f64) -> Result<ProcessModel> {
        match self {
            ProcessModel::Iid { raw_moments } => Ok(ProcessModel::Iid {
                raw_moments: shifted_raw_moments(raw_moments, c),
            }),
            ProcessModel::GaussianStationary { .. } => Err(Error::NonZeroGaussianMean(c)),
            ProcessModel::FiniteJoint { n, atoms } => Ok(ProcessModel::FiniteJoint {
                n: *n,
                atoms: atoms
                    .iter()
                    .map(|(path, p)| (path.iter().map(|x| x + c).collect(), *p))
                    .collect(),
            }),
        }
    }
}

/// Raw moments of `X + c` from raw moments of `X`:
/// `E[(X+c)^k] = sum_j C(k,j) c^{k-j} E[X^j]`.
pub fn shifted_raw_moments(raw_moments: &[f64], c: f64) -> Vec<f64> {
    (1..=raw_moments.len())
        .map(|k| {
            compensated((0..=k).map(|j| {
                let mu_j = if j == 0 { 1.0 } else { raw_moments[j - 1] };
                binomial(k, j) as f64 * powi(c, (k - j) as i32) * mu_j
            }))
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k.min(n));
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

fn compensated<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    numeric::compensated_sum(iter)
}

fn check_distribution(probs: &[f64]) -> Result<()> {
    let mut total = NeumaierSum::new();
    for &p in probs {
        if p < -PROB_TOL {
            return Err(Error::InvalidDistribution(alloc::format!(
                "negative probability {p}"
            )));
        }
        total.add(p);
    }
    if fabs(total.value() - 1.0) > PROB_TOL {
        return Err(Error::InvalidDistribution(alloc::format!(
            "probabilities sum to {}, not 1",
            total.value()
        )));
    }
    Ok(())
}

/// Memo table for Isserlis evaluations, keyed on the expanded, min-translated
/// position multiset. The cache lives with the computation (per worker), not
/// with the model, so concurrent queries never share mutable state.
pub(crate) struct MomentCache {
    map: BTreeMap<Vec<u32>, f64>,
}

impl MomentCache {
    pub(crate) fn new() -> Self {
        Self {
            map: BTreeMap::new(),
        }
    }
}

/// Isserlis / Wick: the joint moment of a zero-mean Gaussian vector is the
/// sum over perfect pairings of products of covariances. Exponents expand
/// into repeated factors first; the moment then only depends on the multiset
/// of positions relative to the smallest one.
fn isserlis(indices: &[(usize, u8)], autocov: &Autocovariance, cache: &mut MomentCache) -> f64 {
    let mut positions: Vec<u32> = Vec::new();
    for &(index, exponent) in indices {
        for _ in 0..exponent {
            positions.push(index as u32);
        }
    }
    positions.sort_unstable();
    let base = positions[0];
    for p in &mut positions {
        *p -= base;
    }
    pairing_sum(&positions, autocov, cache)
}

fn pairing_sum(positions: &[u32], autocov: &Autocovariance, cache: &mut MomentCache) -> f64 {
    if positions.is_empty() {
        return 1.0;
    }
    // Re-anchor at zero so every translate of a shape shares a cache entry.
    let translated: Vec<u32>;
    let positions: &[u32] = if positions[0] == 0 {
        positions
    } else {
        let base = positions[0];
        translated = positions.iter().map(|p| p - base).collect();
        &translated
    };
    if let Some(&value) = cache.map.get(positions) {
        return value;
    }
    let first = positions[0];
    let mut total = NeumaierSum::new();
    for k in 1..positions.len() {
        // Skip duplicate partners: pairing with equal positions gives equal
        // sub-sums, so weight by the run length instead.
        if k > 1 && positions[k] == positions[k - 1] {
            continue;
        }
        let run = positions[1..]
            .iter()
            .filter(|&&p| p == positions[k])
            .count();
        let gamma = autocov.gamma((positions[k] - first) as usize);
        let mut rest: Vec<u32> = Vec::with_capacity(positions.len() - 2);
        let mut skipped = false;
        for (i, &p) in positions.iter().enumerate().skip(1) {
            if !skipped && i >= k && p == positions[k] {
                skipped = true;
                continue;
            }
            rest.push(p);
        }
        total.add(run as f64 * gamma * pairing_sum(&rest, autocov, cache));
    }
    let value = total.value();
    cache.map.insert(positions.to_vec(), value);
    value
}

/// Enumerate every state path of a finite-state Markov chain into an
/// explicit joint law with exact path probabilities.
pub fn markov_to_finite_joint(
    states: &[f64],
    transition: &[Vec<f64>],
    initial: &[f64],
    n: usize,
) -> Result<ProcessModel> {
    let s = states.len();
    if s == 0 || n == 0 {
        return Err(Error::InvalidParameter(String::from(
            "need at least one state and n >= 1",
        )));
    }
    if transition.len() != s || initial.len() != s {
        return Err(Error::InvalidParameter(String::from(
            "transition matrix and initial distribution must match the state count",
        )));
    }
    for (row_index, row) in transition.iter().enumerate() {
        if row.len() != s {
            return Err(Error::InvalidParameter(String::from(
                "transition matrix must be square",
            )));
        }
        let sum = compensated(row.iter().copied());
        if fabs(sum - 1.0) > PROB_TOL {
            return Err(Error::InvalidTransitionRow {
                row: row_index,
                sum,
            });
        }
        if row.iter().any(|&p| p < -PROB_TOL) {
            return Err(Error::InvalidDistribution(alloc::format!(
                "negative transition probability in row {row_index}"
            )));
        }
    }
    check_distribution(initial)?;
    match (s as u64).checked_pow(n as u32) {
        Some(count) if count <= SUPPORT_CAP => {}
        other => {
            return Err(Error::SupportExplosion {
                atoms: other.unwrap_or(u64::MAX),
                cap: SUPPORT_CAP,
            })
        }
    }

    let mut atoms = Vec::new();
    let mut path_states: Vec<usize> = Vec::with_capacity(n);
    fn recurse(
        states: &[f64],
        transition: &[Vec<f64>],
        n: usize,
        prob: f64,
        path_states: &mut Vec<usize>,
        atoms: &mut Vec<(Vec<f64>, f64)>,
    ) {
        if path_states.len() == n {
            atoms.push((path_states.iter().map(|&k| states[k]).collect(), prob));
            return;
        }
        let last = *path_states.last().expect("non-empty by construction");
        for (next, &p) in transition[last].iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            path_states.push(next);
            recurse(states, transition, n, prob * p, path_states, atoms);
            path_states.pop();
        }
    }
    for (start, &p0) in initial.iter().enumerate() {
        if p0 == 0.0 {
            continue;
        }
        path_states.push(start);
        recurse(states, transition, n, p0, &mut path_states, &mut atoms);
        path_states.pop();
    }
    ProcessModel::finite_joint(atoms)
}

/// Stationary distribution of a two-state chain, handy for tests and the
/// CLI's `initial = "stationary"` shortcut. General chains solve pi P = pi
/// by power iteration.
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let s = transition.len();
    let mut pi = vec![1.0 / s as f64; s];
    for _ in 0..20_000 {
        let mut next = vec![0.0; s];
        for (i, row) in transition.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                next[j] += pi[i] * p;
            }
        }
        let diff: f64 = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| fabs(a - b))
            .fold(0.0, f64::max);
        pi = next;
        if diff < 1e-15 {
            break;
        }
    }
    let total = compensated(pi.iter().copied());
    for p in &mut pi {
        *p /= total;
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iid_moment_factorises() {
        let model = ProcessModel::iid(vec![0.0, 1.0, 0.0, 3.0]).unwrap();
        // E[X^2] = mu_2
        assert_eq!(model.joint_moment(&[(1, 2)]).unwrap(), 1.0);
        // zero mean kills any factor with exponent 1
        assert_eq!(model.joint_moment(&[(1, 1), (2, 3)]).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_pair_moment_matches_isserlis_by_hand() {
        let model = ProcessModel::gaussian_stationary(
            0.0,
            Autocovariance::Ar1 {
                variance: 1.0,
                phi: 0.5,
            },
        )
        .unwrap();
        // E[X_1^2 X_2^2] = gamma(0)^2 + 2 gamma(1)^2
        let value = model.joint_moment(&[(1, 2), (2, 2)]).unwrap();
        assert!((value - 1.5).abs() < 1e-15);
        // odd total exponent vanishes
        assert_eq!(model.joint_moment(&[(1, 2), (2, 1)]).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_isserlis_matches_finite_joint_discretisation() {
        // Brute force check of the pairing sum on a 3-point stencil:
        // E[X1 X2 X3 X4] = g12 g34 + g13 g24 + g14 g23 for a Gaussian vector.
        let model = ProcessModel::gaussian_stationary(
            0.0,
            Autocovariance::Table(vec![1.0, 0.5, 0.25, 0.125]),
        )
        .unwrap();
        let value = model
            .joint_moment(&[(1, 1), (2, 1), (3, 1), (4, 1)])
            .unwrap();
        let expected = 0.5 * 0.5 + 0.25 * 0.25 + 0.125 * 0.5;
        assert!((value - expected).abs() < 1e-15);
    }

    #[test]
    fn joint_moment_is_permutation_consistent() {
        let model = ProcessModel::gaussian_stationary(
            0.0,
            Autocovariance::Ar1 {
                variance: 2.0,
                phi: -0.3,
            },
        )
        .unwrap();
        let a = model.joint_moment(&[(1, 2), (3, 1), (5, 1)]).unwrap();
        let b = model.joint_moment(&[(5, 1), (1, 2), (3, 1)]).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn rejects_bad_queries() {
        let model = ProcessModel::iid(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            model.joint_moment(&[(1, 5), (2, 4)]),
            Err(Error::OrderTooHigh { order: 9 })
        ));
        assert!(model.joint_moment(&[(1, 1), (1, 2)]).is_err());
        let fj = ProcessModel::constant(2.0, 3).unwrap();
        assert!(matches!(
            fj.joint_moment(&[(4, 1)]),
            Err(Error::IndexOutOfRange { index: 4, n: 3 })
        ));
    }

    #[test]
    fn gaussian_mean_must_be_zero() {
        let err = ProcessModel::gaussian_stationary(
            0.5,
            Autocovariance::Ar1 {
                variance: 1.0,
                phi: 0.0,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonZeroGaussianMean(_)));
    }

    #[test]
    fn markov_absorbing_chain_has_two_constant_paths() {
        let model = markov_to_finite_joint(
            &[-1.0, 1.0],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[0.5, 0.5],
            3,
        )
        .unwrap();
        let ProcessModel::FiniteJoint { atoms, .. } = &model else {
            panic!("expected FiniteJoint")
        };
        assert_eq!(atoms.len(), 2);
        assert_eq!(atoms[0].0, vec![-1.0, -1.0, -1.0]);
        assert!((atoms[0].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn markov_uniform_two_step_has_four_quarter_atoms() {
        let model = markov_to_finite_joint(
            &[0.0, 1.0],
            &[vec![0.5, 0.5], vec![0.5, 0.5]],
            &[0.5, 0.5],
            2,
        )
        .unwrap();
        let ProcessModel::FiniteJoint { atoms, .. } = &model else {
            panic!("expected FiniteJoint")
        };
        assert_eq!(atoms.len(), 4);
        assert!(atoms.iter().all(|(_, p)| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn markov_path_probability_by_hand() {
        // P(0,0,0) = pi_0 * 0.9 * 0.9 with the stationary start (2/3, 1/3).
        let model = markov_to_finite_joint(
            &[0.0, 1.0],
            &[vec![0.9, 0.1], vec![0.2, 0.8]],
            &[2.0 / 3.0, 1.0 / 3.0],
            3,
        )
        .unwrap();
        let ProcessModel::FiniteJoint { atoms, .. } = &model else {
            panic!("expected FiniteJoint")
        };
        assert_eq!(atoms.len(), 8);
        let p000 = atoms
            .iter()
            .find(|(path, _)| path.iter().all(|&x| x == 0.0))
            .unwrap()
            .1;
        assert!((p000 - 0.54).abs() < 1e-12);
    }

    #[test]
    fn stationary_distribution_of_reference_chain() {
        let pi = stationary_distribution(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((pi[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_raw_moments_match_direct_computation() {
        // Moments of support {-1, 2} with probs {0.5, 0.5}, shifted by 0.7.
        let support = [-1.0, 2.0];
        let probs = [0.5, 0.5];
        let base = ProcessModel::raw_moments_of_support(&support, &probs, 6);
        let shifted = shifted_raw_moments(&base, 0.7);
        let direct = ProcessModel::raw_moments_of_support(&[-0.3, 2.7], &probs, 6);
        for (a, b) in shifted.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn iid_marginal_product_measure_agrees_with_iid_moments() {
        let support = [-1.0, 0.0, 2.0];
        let probs = [0.5, 0.3, 0.2];
        let joint = ProcessModel::finite_joint_from_iid_marginal(&support, &probs, 4).unwrap();
        let iid =
            ProcessModel::iid(ProcessModel::raw_moments_of_support(&support, &probs, 8)).unwrap();
        for indices in [
            alloc::vec![(1usize, 2u8)],
            alloc::vec![(1, 1), (3, 3)],
            alloc::vec![(1, 2), (2, 2), (4, 1)],
        ] {
            let a = joint.joint_moment(&indices).unwrap();
            let b = iid.joint_moment(&indices).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn support_cap_is_enforced() {
        let err = markov_to_finite_joint(
            &[0.0, 1.0],
            &[vec![0.5, 0.5], vec![0.5, 0.5]],
            &[0.5, 0.5],
            40,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SupportExplosion { .. }));
    }
}
