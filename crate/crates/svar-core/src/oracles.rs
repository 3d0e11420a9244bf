//! Independent ground truth for validating the cumulant engines: exact
//! enumeration of the law of `s_n^2` over finite supports, a reproducible
//! Monte Carlo simulator for Gaussian AR(1) samples, and the chi-squared /
//! Gamma closed form for i.i.d. normal data.
//!
//! Nothing here goes through the symmetric-estimator machinery; agreement
//! between these oracles and [`crate::cumulants`] is the core correctness
//! evidence.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::cumulants::{CumulantSet, Engine, Residuals};
use crate::error::Error;
use crate::numeric::{
    self, compensated_sum, exp, fabs, ln, ln_gamma, powi, regularized_lower_gamma, sqrt,
    NeumaierSum,
};
use crate::process::ProcessModel;
use crate::Result;

/// Value-merge tolerance for the exact law (floating-point images of equal
/// rational outcomes can differ in the last bits).
const VALUE_MERGE_TOL: f64 = 1e-12;

/// Draws per Monte Carlo stream, the unit of reproducible partitioning.
pub const STREAM_DRAWS: u64 = 8192;

/// The exact distribution of `s_n^2` for a finite-support process.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExactLaw {
    pub n: usize,
    /// `(value, probability)` sorted by value, merged within 1e-12.
    pub atoms: Vec<(f64, f64)>,
}

impl ExactLaw {
    /// E[(s^2)^k] of the enumerated law.
    pub fn moment(&self, k: u32) -> f64 {
        compensated_sum(self.atoms.iter().map(|&(v, p)| p * powi(v, k as i32)))
    }

    pub fn total_probability(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|&(_, p)| p))
    }
}

/// Sample variance of one path.
pub fn sample_variance(path: &[f64]) -> f64 {
    let n = path.len();
    debug_assert!(n >= 2);
    let mean = compensated_sum(path.iter().copied()) / n as f64;
    let ss = compensated_sum(path.iter().map(|&x| (x - mean) * (x - mean)));
    ss / (n - 1) as f64
}

/// Enumerate the law of `s_n^2` from an explicit joint law.
///
/// ```
/// use svar_core::{oracles::exact_law, ProcessModel};
///
/// // Four Rademacher draws: s^2 takes the values {0, 1, 4/3}.
/// let model = ProcessModel::finite_joint_from_iid_marginal(&[-1.0, 1.0], &[0.5, 0.5], 4).unwrap();
/// let law = exact_law(&model).unwrap();
/// assert_eq!(law.atoms.len(), 3);
/// assert!((law.moment(1) - 1.0).abs() < 1e-12);
/// ```
pub fn exact_law(model: &ProcessModel) -> Result<ExactLaw> {
    let ProcessModel::FiniteJoint { n, atoms } = model else {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "exact_law needs a finite-support model",
        )));
    };
    if *n < 2 {
        return Err(Error::InsufficientSampleSize { needed: 2, got: *n });
    }
    let mut values: Vec<(f64, f64)> = atoms
        .iter()
        .map(|(path, p)| (sample_variance(path), *p))
        .collect();
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite sample variances"));
    // Sorted sweep: merge runs anchored at the first value of each group.
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut mass = NeumaierSum::new();
    let mut anchor = f64::NAN;
    for (value, p) in values {
        if merged.is_empty() && mass.value() == 0.0 && anchor.is_nan() {
            anchor = value;
            mass.add(p);
        } else if value - anchor <= VALUE_MERGE_TOL {
            mass.add(p);
        } else {
            merged.push((anchor, mass.value()));
            anchor = value;
            mass = NeumaierSum::new();
            mass.add(p);
        }
    }
    if !anchor.is_nan() {
        merged.push((anchor, mass.value()));
    }
    Ok(ExactLaw { n: *n, atoms: merged })
}

/// Exact cumulants of an enumerated law through the standard
/// cumulant-moment relations.
pub fn exact_cumulants(law: &ExactLaw) -> CumulantSet {
    let m1 = law.moment(1);
    let m2 = law.moment(2);
    let m3 = law.moment(3);
    let m4 = law.moment(4);
    CumulantSet {
        n: law.n,
        engine: Engine::ExactEnumeration,
        k1: m1,
        k2: m2 - m1 * m1,
        k3: Some(m3 - 3.0 * m2 * m1 + 2.0 * powi(m1, 3)),
        k4: Some(m4 - 4.0 * m1 * m3 - 3.0 * m2 * m2 + 12.0 * m1 * m1 * m2 - 6.0 * powi(m1, 4)),
        residuals: Residuals::default(),
    }
}

/// Monte Carlo summary of the law of `s_n^2`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct McSummary {
    pub draws: u64,
    pub seed: u64,
    /// Unbiased cumulant estimators k_1..k_4 over all draws.
    pub k_stats: [f64; 4],
    /// Batch-mean standard errors of the k-statistics.
    pub standard_errors: [f64; 4],
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Histogram {
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    /// Mass per bin; sums to 1.
    pub masses: Vec<f64>,
}

/// Draw `s_n^2` for a stationary Gaussian AR(1) process, reproducibly.
///
/// The generator is counter-based: stream `t` is the seeded ChaCha12 state
/// with stream id `t`, and draws are partitioned into fixed 8192-draw
/// streams. Any parallel execution over streams that reduces in stream
/// order reproduces the serial result bit for bit.
pub fn simulate_ar1(
    phi: f64,
    innovation_sd: f64,
    n: usize,
    draws: u64,
    seed: u64,
) -> Result<McSummary> {
    if fabs(phi) >= 1.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "|phi| = {} must be < 1",
            fabs(phi)
        )));
    }
    if innovation_sd <= 0.0 || innovation_sd.is_nan() {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "innovation sd must be > 0",
        )));
    }
    if n < 2 {
        return Err(Error::InsufficientSampleSize { needed: 2, got: n });
    }
    if draws < 10_000 {
        return Err(Error::InvalidParameter(alloc::format!(
            "need at least 10^4 draws, got {draws}"
        )));
    }
    let stationary_sd = innovation_sd / sqrt(1.0 - phi * phi);
    let streams = draws.div_ceil(STREAM_DRAWS);
    let mut values: Vec<f64> = Vec::with_capacity(draws as usize);
    let mut path = alloc::vec![0.0f64; n];
    for stream in 0..streams {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let in_stream = STREAM_DRAWS.min(draws - stream * STREAM_DRAWS);
        for _ in 0..in_stream {
            path[0] = stationary_sd * standard_normal(&mut rng);
            for t in 1..n {
                path[t] = phi * path[t - 1] + innovation_sd * standard_normal(&mut rng);
            }
            values.push(sample_variance(&path));
        }
    }

    let k_stats = k_statistics(&values);
    let standard_errors = batch_standard_errors(&values);
    let histogram = build_histogram(&values, 60);
    Ok(McSummary {
        draws,
        seed,
        k_stats,
        standard_errors,
        histogram,
    })
}

/// Basic-form Box-Muller: branch-free, two uniforms per normal.
fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * SCALE; // (0, 1]
    let u2 = (rng.next_u64() >> 11) as f64 * SCALE; // [0, 1)
    sqrt(-2.0 * ln(u1)) * numeric::cos(2.0 * core::f64::consts::PI * u2)
}

/// Unbiased cumulant estimators (k-statistics) from a sample.
pub fn k_statistics(values: &[f64]) -> [f64; 4] {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    let mut m2 = NeumaierSum::new();
    let mut m3 = NeumaierSum::new();
    let mut m4 = NeumaierSum::new();
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2.add(d2);
        m3.add(d2 * d);
        m4.add(d2 * d2);
    }
    let m2 = m2.value() / n;
    let m3 = m3.value() / n;
    let m4 = m4.value() / n;
    let k2 = n / (n - 1.0) * m2;
    let k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
    let k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
        / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    [mean, k2, k3, k4]
}

/// Number of equal batches used for standard errors.
const SE_BATCHES: usize = 50;

/// Standard errors from the spread of per-batch k-statistics over 50 equal
/// batches: SE = sd(batch values) / sqrt(batches). The k-statistics are
/// unbiased at every batch size, so the batch mean and the full-sample
/// statistic share the same leading-order variance.
fn batch_standard_errors(values: &[f64]) -> [f64; 4] {
    let batch_size = values.len() / SE_BATCHES;
    debug_assert!(batch_size >= 4);
    let mut per_batch: [Vec<f64>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for b in 0..SE_BATCHES {
        let slice = &values[b * batch_size..(b + 1) * batch_size];
        let ks = k_statistics(slice);
        for (collector, k) in per_batch.iter_mut().zip(ks) {
            collector.push(k);
        }
    }
    let mut out = [0.0f64; 4];
    for (slot, batch_values) in out.iter_mut().zip(&per_batch) {
        let b = batch_values.len() as f64;
        let mean = compensated_sum(batch_values.iter().copied()) / b;
        let var =
            compensated_sum(batch_values.iter().map(|&k| (k - mean) * (k - mean))) / (b - 1.0);
        *slot = sqrt(var / b);
    }
    out
}

fn build_histogram(values: &[f64], bins: usize) -> Histogram {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if max <= min || max.is_nan() || min.is_nan() {
        // Degenerate sample: one bin around the single value.
        return Histogram {
            edges: alloc::vec![min - 0.5, min + 0.5],
            masses: alloc::vec![1.0],
        };
    }
    let width = (max - min) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| min + width * k as f64).collect();
    let mut counts = alloc::vec![0u64; bins];
    for &v in values {
        let mut bin = ((v - min) / width) as usize;
        if bin >= bins {
            bin = bins - 1;
        }
        counts[bin] += 1;
    }
    let total = values.len() as f64;
    Histogram {
        edges,
        masses: counts.iter().map(|&c| c as f64 / total).collect(),
    }
}

/// Exact density and CDF of the law of `s_n^2` for i.i.d. N(0, sigma^2)
/// observations: `s^2 ~ sigma^2 chi^2_{n-1} / (n-1)`, i.e.
/// Gamma(shape (n-1)/2, scale 2 sigma^2 / (n-1)).
pub fn gamma_reference(n: usize, sigma: f64, x: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InsufficientSampleSize { needed: 2, got: n });
    }
    if sigma <= 0.0 || sigma.is_nan() {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "sigma must be > 0",
        )));
    }
    if x < 0.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "x = {x} must be >= 0"
        )));
    }
    let shape = (n as f64 - 1.0) / 2.0;
    let scale = 2.0 * sigma * sigma / (n as f64 - 1.0);
    let density = if x == 0.0 {
        match shape.partial_cmp(&1.0).expect("finite shape") {
            core::cmp::Ordering::Greater => 0.0,
            core::cmp::Ordering::Equal => 1.0 / scale,
            core::cmp::Ordering::Less => f64::INFINITY,
        }
    } else {
        exp((shape - 1.0) * ln(x) - x / scale - ln_gamma(shape) - shape * ln(scale))
    };
    let cdf = regularized_lower_gamma(shape, x / scale);
    Ok((density, cdf))
}
