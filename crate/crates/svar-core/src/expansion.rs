//! Truncated Gram-Charlier A and Edgeworth approximations built from a
//! cumulant set.
//!
//! With mu = kappa_1 and sigma^2 = kappa_2 the reference normal absorbs the
//! first two cumulants, and the series reads
//!
//! ```text
//! f(x) = phi_{mu,sigma}(x) * sum_j c_j He_j((x - mu)/sigma),
//! c_j = B_j(0, 0, kappa_3, ..., kappa_j) / (j! sigma^j)
//! ```
//!
//! with `B_j` the complete Bell polynomials and `He_j` the probabilists'
//! Hermite polynomials. Truncating at Hermite degree J gives the
//! Gram-Charlier family; regrouping by powers of n^{-1/2} of the
//! standardised statistic gives the Edgeworth family, whose order-2 form
//! picks up the `He_6` term with weight `kappa_3^2 / 72` (that is exactly
//! `B_6(0,0,k3,k4,0,0)/6! = 10 k3^2/720`, so with cumulants beyond kappa_4
//! absent — as here, where the engine stops at kappa_4 — Edgeworth-2
//! coincides with the J = 6 Gram-Charlier truncation, and Edgeworth-1 with
//! J = 3).
//!
//! Truncated series may go negative in the tails. Values are reported as-is,
//! never clamped; [`negativity_diagnostic`] locates the negative-mass
//! regions instead.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cumulants::CumulantSet;
use crate::error::Error;
use crate::numeric::{
    fabs, integrate, powi, sqrt, std_normal_cdf, std_normal_pdf, NeumaierSum,
};
use crate::Result;

/// Probabilists' Hermite polynomial He_j via the three-term recurrence
/// `He_{j+1}(x) = x He_j(x) - j He_{j-1}(x)`.
pub fn hermite_he(j: u32, x: f64) -> f64 {
    debug_assert!(j <= 12, "degrees above 12 are never used here");
    if j == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut current = x;
    for degree in 1..j {
        let next = x * current - degree as f64 * prev;
        prev = current;
        current = next;
    }
    current
}

/// Complete Bell polynomial `B_j(0, 0, kappa_3, ..., kappa_j)` via
/// `B_{m+1} = sum_k C(m, k) x_{k+1} B_{m-k}`. `higher` supplies
/// `kappa_3, kappa_4, ...`; entries beyond its length are zero.
pub fn bell_coefficient(j: u32, higher: &[f64]) -> f64 {
    let x = |index: usize| -> f64 {
        // x_1 = x_2 = 0; x_k = kappa_k = higher[k - 3] for k >= 3.
        if index < 3 {
            0.0
        } else {
            higher.get(index - 3).copied().unwrap_or(0.0)
        }
    };
    let mut bell = Vec::with_capacity(j as usize + 1);
    bell.push(1.0);
    for m in 0..j as usize {
        let mut sum = NeumaierSum::new();
        for k in 0..=m {
            sum.add(binomial(m, k) * x(k + 1) * bell[m - k]);
        }
        bell.push(sum.value());
    }
    bell[j as usize]
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Which family a truncation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ExpansionKind {
    #[serde(rename = "gram-charlier")]
    GramCharlier,
    #[serde(rename = "edgeworth")]
    Edgeworth,
}

/// Hermite-degree coefficients of a truncated series (`c_0 = 1` and the
/// degree-1/2 coefficients vanish by the mean/variance matching).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SeriesCoefficients {
    /// `(degree, c_degree)` for the correction degrees actually included.
    pub terms: Vec<(u32, f64)>,
}

/// A validated, evaluable truncation.
///
/// ```
/// use svar_core::{cumulants::cumulants_moment_route, ProcessModel};
/// use svar_core::expansion::{ExpansionKind, ExpansionSpec};
///
/// let model = ProcessModel::iid_normal(1.0).unwrap();
/// let set = cumulants_moment_route(&model, 10, 4).unwrap();
/// let spec = ExpansionSpec::new(ExpansionKind::Edgeworth, 2, &set).unwrap();
/// // The CDF runs from 0 to 1 across the support of s^2.
/// assert!(spec.cdf(0.0) < 0.02);
/// assert!((spec.cdf(4.0) - 1.0).abs() < 0.01);
/// ```
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExpansionSpec {
    pub kind: ExpansionKind,
    /// Highest Hermite degree J in {0,3,4,6} for Gram-Charlier;
    /// 1 or 2 for Edgeworth.
    pub order: u8,
    pub mu: f64,
    pub sigma: f64,
    pub coefficients: SeriesCoefficients,
}

impl ExpansionSpec {
    pub fn new(kind: ExpansionKind, order: u8, cumulants: &CumulantSet) -> Result<Self> {
        let mu = cumulants.k1;
        let variance = cumulants.k2;
        if variance <= 0.0 || variance.is_nan() {
            return Err(Error::InvalidExpansionSpec(alloc::format!(
                "kappa_2 = {variance} must be positive (point masses have no density)"
            )));
        }
        let sigma = sqrt(variance);
        let degrees: &[u32] = match (kind, order) {
            (ExpansionKind::GramCharlier, 0) => &[],
            (ExpansionKind::GramCharlier, 3) => &[3],
            (ExpansionKind::GramCharlier, 4) => &[3, 4],
            (ExpansionKind::GramCharlier, 6) => &[3, 4, 5, 6],
            (ExpansionKind::Edgeworth, 1) => &[3],
            (ExpansionKind::Edgeworth, 2) => &[3, 4, 6],
            _ => {
                return Err(Error::InvalidExpansionSpec(alloc::format!(
                    "unsupported {kind:?} order {order}"
                )))
            }
        };
        let needs_k3 = !degrees.is_empty();
        let needs_k4 = degrees.contains(&4);
        let k3 = match (needs_k3, cumulants.k3) {
            (false, _) => 0.0,
            (true, Some(k3)) => k3,
            (true, None) => {
                return Err(Error::InvalidExpansionSpec(String::from(
                    "kappa_3 required but absent from the cumulant set",
                )))
            }
        };
        let k4 = match (needs_k4, cumulants.k4) {
            (false, _) => 0.0,
            (true, Some(k4)) => k4,
            (true, None) => {
                return Err(Error::InvalidExpansionSpec(String::from(
                    "kappa_4 required but absent from the cumulant set",
                )))
            }
        };
        let higher = [k3, k4];
        let terms = degrees
            .iter()
            .map(|&degree| {
                let c = bell_coefficient(degree, &higher)
                    / (factorial(degree) * powi(sigma, degree as i32));
                (degree, c)
            })
            .collect();
        Ok(Self {
            kind,
            order,
            mu,
            sigma,
            coefficients: SeriesCoefficients { terms },
        })
    }

    /// Series density at x (may be negative in the tails).
    pub fn density(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        let mut series = NeumaierSum::new();
        series.add(1.0);
        for &(degree, c) in &self.coefficients.terms {
            series.add(c * hermite_he(degree, z));
        }
        std_normal_pdf(z) / self.sigma * series.value()
    }

    /// Series CDF at x, using `int He_j(t) phi(t) dt = -He_{j-1}(z) phi(z)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        let mut correction = NeumaierSum::new();
        for &(degree, c) in &self.coefficients.terms {
            correction.add(c * hermite_he(degree - 1, z));
        }
        std_normal_cdf(z) - std_normal_pdf(z) * correction.value()
    }

    /// The pure reference normal (all corrections dropped).
    pub fn reference_normal(&self) -> ExpansionSpec {
        ExpansionSpec {
            kind: ExpansionKind::GramCharlier,
            order: 0,
            mu: self.mu,
            sigma: self.sigma,
            coefficients: SeriesCoefficients { terms: Vec::new() },
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Gram-Charlier density of the given truncation degree.
pub fn gc_density(spec: &ExpansionSpec, x: f64) -> f64 {
    debug_assert_eq!(spec.kind, ExpansionKind::GramCharlier);
    spec.density(x)
}

/// Gram-Charlier CDF.
pub fn gc_cdf(spec: &ExpansionSpec, x: f64) -> f64 {
    debug_assert_eq!(spec.kind, ExpansionKind::GramCharlier);
    spec.cdf(x)
}

/// Edgeworth density of order 1 or 2.
pub fn edgeworth_density(spec: &ExpansionSpec, x: f64) -> f64 {
    debug_assert_eq!(spec.kind, ExpansionKind::Edgeworth);
    spec.density(x)
}

/// Edgeworth CDF of order 1 or 2.
pub fn edgeworth_cdf(spec: &ExpansionSpec, x: f64) -> f64 {
    debug_assert_eq!(spec.kind, ExpansionKind::Edgeworth);
    spec.cdf(x)
}

/// Raw moments `E[X^k]`, k = 1..=count, of the truncated series by adaptive
/// quadrature over mu +/- 12 sigma (Gaussian decay keeps the truncation
/// error below the 1e-10 target).
pub fn quadrature_moments(spec: &ExpansionSpec, count: u32) -> Vec<f64> {
    let a = spec.mu - 12.0 * spec.sigma;
    let b = spec.mu + 12.0 * spec.sigma;
    (1..=count)
        .map(|k| integrate(&|x| powi(x, k as i32) * spec.density(x), a, b, 1e-10))
        .collect()
}

/// Total mass of the truncated series by quadrature (1 up to truncation
/// error when the coefficients are consistent).
pub fn quadrature_mass(spec: &ExpansionSpec) -> f64 {
    let a = spec.mu - 12.0 * spec.sigma;
    let b = spec.mu + 12.0 * spec.sigma;
    integrate(&|x| spec.density(x), a, b, 1e-10)
}

/// Where a truncated series goes negative.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NegativityReport {
    /// Maximal intervals within mu +/- 12 sigma where the density is < 0.
    pub intervals: Vec<(f64, f64)>,
    /// Total mass of the negative part, reported as a non-negative number.
    pub negative_mass: f64,
}

/// Scan mu +/- 12 sigma for sign changes, bisect the crossings, and
/// integrate the negative regions.
pub fn negativity_diagnostic(spec: &ExpansionSpec) -> NegativityReport {
    const SCAN_POINTS: usize = 4800;
    let a = spec.mu - 12.0 * spec.sigma;
    let b = spec.mu + 12.0 * spec.sigma;
    let step = (b - a) / SCAN_POINTS as f64;
    let mut crossings: Vec<f64> = Vec::new();
    let mut prev_x = a;
    let mut prev_f = spec.density(a);
    for k in 1..=SCAN_POINTS {
        let x = a + step * k as f64;
        let f = spec.density(x);
        if (prev_f < 0.0) != (f < 0.0) {
            crossings.push(bisect_sign_change(spec, prev_x, x));
        }
        prev_x = x;
        prev_f = f;
    }
    let mut intervals = Vec::new();
    let mut boundaries = Vec::with_capacity(crossings.len() + 2);
    boundaries.push(a);
    boundaries.extend(crossings);
    boundaries.push(b);
    for window in boundaries.windows(2) {
        let (lo, hi) = (window[0], window[1]);
        let midpoint = 0.5 * (lo + hi);
        if spec.density(midpoint) < 0.0 {
            intervals.push((lo, hi));
        }
    }
    let mut mass = NeumaierSum::new();
    for &(lo, hi) in &intervals {
        mass.add(-integrate(&|x| spec.density(x), lo, hi, 1e-10));
    }
    NegativityReport {
        intervals,
        negative_mass: mass.value().max(0.0),
    }
}

fn bisect_sign_change(spec: &ExpansionSpec, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = spec.density(lo);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let f_mid = spec.density(mid);
        if (f_lo < 0.0) == (f_mid < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * (1.0 + fabs(lo)) {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::{Engine, Residuals};

    fn cumulant_set(k1: f64, k2: f64, k3: f64, k4: f64) -> CumulantSet {
        CumulantSet {
            n: 10,
            engine: Engine::MomentRoute,
            k1,
            k2,
            k3: Some(k3),
            k4: Some(k4),
            residuals: Residuals::default(),
        }
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite_he(3, 2.0), 2.0); // x^3 - 3x at 2
        assert_eq!(hermite_he(4, 1.0), -2.0); // x^4 - 6x^2 + 3 at 1
        assert_eq!(hermite_he(0, 17.3), 1.0);
        // Recurrence vs explicit x^5 - 10x^3 + 15x.
        let x = 0.7;
        let explicit = powi(x, 5) - 10.0 * powi(x, 3) + 15.0 * x;
        assert!((hermite_he(5, x) - explicit).abs() < 1e-14);
    }

    #[test]
    fn bell_values() {
        assert_eq!(bell_coefficient(0, &[]), 1.0);
        assert_eq!(bell_coefficient(1, &[2.0, 3.0]), 0.0);
        assert_eq!(bell_coefficient(2, &[2.0, 3.0]), 0.0);
        assert_eq!(bell_coefficient(3, &[2.0, 3.0]), 2.0); // B3 = kappa3
        assert_eq!(bell_coefficient(4, &[2.0, 3.0]), 3.0); // B4 = kappa4
        assert_eq!(bell_coefficient(5, &[2.0, 3.0]), 0.0); // B5 = 0 with x1=x2=x5=0
        assert_eq!(bell_coefficient(6, &[2.0, 3.0]), 40.0); // B6 = 10 kappa3^2
    }

    #[test]
    fn order_zero_is_the_reference_normal() {
        let set = cumulant_set(1.0, 0.25, 0.3, 0.2);
        let spec = ExpansionSpec::new(ExpansionKind::GramCharlier, 0, &set).unwrap();
        let at_mean = spec.density(1.0);
        assert!((at_mean - 1.0 / (0.5 * crate::numeric::SQRT_2PI)).abs() < 1e-15);
        assert!((spec.cdf(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn skew_term_vanishes_at_the_mean() {
        let set = cumulant_set(0.0, 1.0, 0.5, 0.0);
        let spec = ExpansionSpec::new(ExpansionKind::GramCharlier, 3, &set).unwrap();
        // He_3(0) = 0, so the density at the mean is the pure normal value.
        assert!((spec.density(0.0) - std_normal_pdf(0.0)).abs() < 1e-15);
        // CDF at the mean picks up +kappa_3 phi(0) / (6 sigma^3).
        let expected = 0.5 + 0.5 / 6.0 * std_normal_pdf(0.0);
        assert!((spec.cdf(0.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn cdf_limits() {
        let set = cumulant_set(2.0, 4.0, 1.0, 0.5);
        for order in [0u8, 3, 4, 6] {
            let spec = ExpansionSpec::new(ExpansionKind::GramCharlier, order, &set).unwrap();
            let far_right = spec.cdf(spec.mu + 12.0 * spec.sigma);
            let far_left = spec.cdf(spec.mu - 12.0 * spec.sigma);
            assert!((far_right - 1.0).abs() < 1e-6);
            assert!(far_left.abs() < 1e-6);
        }
    }

    #[test]
    fn edgeworth2_with_zero_skew_equals_gc4() {
        let set = cumulant_set(1.0, 0.3, 0.0, 0.05);
        let edgeworth = ExpansionSpec::new(ExpansionKind::Edgeworth, 2, &set).unwrap();
        let gc4 = ExpansionSpec::new(ExpansionKind::GramCharlier, 4, &set).unwrap();
        for k in -30..=30 {
            let x = 1.0 + 0.1 * k as f64;
            assert!((edgeworth.density(x) - gc4.density(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn edgeworth_matches_normal_when_higher_cumulants_vanish() {
        let set = cumulant_set(0.5, 2.0, 0.0, 0.0);
        let spec = ExpansionSpec::new(ExpansionKind::Edgeworth, 2, &set).unwrap();
        let normal = spec.reference_normal();
        for k in -20..=20 {
            let x = 0.5 + 0.3 * k as f64;
            assert_eq!(spec.density(x), normal.density(x));
        }
    }

    #[test]
    fn cdf_differentiates_to_density() {
        let set = cumulant_set(1.0, 0.2222222222222222, 0.0987654, 0.0658436);
        for (kind, order) in [
            (ExpansionKind::GramCharlier, 4),
            (ExpansionKind::Edgeworth, 2),
        ] {
            let spec = ExpansionSpec::new(kind, order, &set).unwrap();
            let h = 1e-6;
            for k in 0..=40 {
                let x = 0.2 + 0.05 * k as f64;
                let derivative = (spec.cdf(x + h) - spec.cdf(x - h)) / (2.0 * h);
                assert!(
                    (derivative - spec.density(x)).abs() < 1e-6,
                    "x = {x}: {derivative} vs {}",
                    spec.density(x)
                );
            }
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        let set = cumulant_set(1.0, 0.25, 0.3, 0.2);
        assert!(ExpansionSpec::new(ExpansionKind::GramCharlier, 5, &set).is_err());
        assert!(ExpansionSpec::new(ExpansionKind::Edgeworth, 3, &set).is_err());
        let degenerate = cumulant_set(1.0, 0.0, 0.0, 0.0);
        assert!(ExpansionSpec::new(ExpansionKind::GramCharlier, 0, &degenerate).is_err());
        let mut missing = cumulant_set(1.0, 0.25, 0.3, 0.2);
        missing.k4 = None;
        assert!(ExpansionSpec::new(ExpansionKind::GramCharlier, 4, &missing).is_err());
        assert!(ExpansionSpec::new(ExpansionKind::GramCharlier, 3, &missing).is_ok());
    }

    #[test]
    fn strong_skew_goes_negative_and_is_flagged() {
        let set = cumulant_set(0.0, 1.0, 1.5, 0.0);
        let spec = ExpansionSpec::new(ExpansionKind::GramCharlier, 3, &set).unwrap();
        let report = negativity_diagnostic(&spec);
        assert!(!report.intervals.is_empty());
        assert!(report.negative_mass > 0.0);
        // The flagged intervals are exactly where the density is negative.
        for &(lo, hi) in &report.intervals {
            assert!(spec.density(0.5 * (lo + hi)) < 0.0);
        }
    }

    #[test]
    fn mass_stays_one_for_mild_corrections() {
        let set = cumulant_set(1.0, 0.2222222222222222, 0.0987654, 0.0658436);
        let spec = ExpansionSpec::new(ExpansionKind::GramCharlier, 4, &set).unwrap();
        assert!((quadrature_mass(&spec) - 1.0).abs() < 1e-8);
        let report = negativity_diagnostic(&spec);
        // Mild chi-squared-like corrections: the negative lobes live far in
        // the left tail and stay small.
        assert!(report.negative_mass < 5e-3, "{}", report.negative_mass);
        for &(lo, hi) in &report.intervals {
            assert!(spec.density(0.5 * (lo + hi)) < 0.0);
        }
    }
}
