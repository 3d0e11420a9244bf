//! The two cumulant engines for the sample variance.
//!
//! * **Moment route (authoritative).** `E[(s_n^2)^m]` for m = 1..4 from the
//!   exact expansion in [`crate::algebra`], then the standard cumulant-moment
//!   relations. This is the route every oracle-equivalence criterion is held
//!   to.
//! * **Coefficient-table route (diagnostic).** kappa_2..kappa_4 assembled
//!   from the published regrouped tables in [`crate::tables`]. The kappa_2
//!   table is exact (the audit proves it identical to the moment route); the
//!   kappa_3 rest term is ambiguous in print and the kappa_4 rest term was
//!   never published, so those values are reported with residuals instead of
//!   being patched.
//!
//! Residuals are table-route minus moment-route; `r3` uses the conventional
//! `(n-1) n^2` denominator for the `(1,2)` slot and `r3_alt` the denominator
//! as printed (shared with the `(2,1)` slot).

use alloc::vec::Vec;

use crate::algebra::VariancePowerExpansion;
use crate::error::Error;
use crate::numeric::{fabs, powi, NeumaierSum};
use crate::symmetric::{build_tables, SymmetricMomentTable};
use crate::tables;
use crate::ProcessModel;
use crate::Result;

/// Which engine produced a [`CumulantSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Engine {
    #[serde(rename = "moment-route")]
    MomentRoute,
    #[serde(rename = "cumulant-route")]
    CumulantRoute,
    /// Exact enumeration oracle (see [`crate::oracles`]).
    #[serde(rename = "exact-enumeration")]
    ExactEnumeration,
}

/// Differences between the two engines where both are computable.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Residuals {
    pub r2: Option<f64>,
    pub r3: Option<f64>,
    /// kappa_3 residual with the `(1,2)` slot read with the printed
    /// denominator instead of the conventional one.
    pub r3_alt: Option<f64>,
    pub r4: Option<f64>,
}

/// First four cumulants of `s_n^2`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CumulantSet {
    pub n: usize,
    pub engine: Engine,
    pub k1: f64,
    pub k2: f64,
    pub k3: Option<f64>,
    pub k4: Option<f64>,
    pub residuals: Residuals,
}

impl CumulantSet {
    /// Cumulants of `a * S + b` given cumulants of `S`: the mean shifts and
    /// scales, kappa_r scales by `a^r` for r >= 2. Scaling the underlying
    /// observations by c corresponds to `a = c^2, b = 0` here.
    pub fn affine_transformed(&self, a: f64, b: f64) -> CumulantSet {
        CumulantSet {
            n: self.n,
            engine: self.engine,
            k1: a * self.k1 + b,
            k2: a * a * self.k2,
            k3: self.k3.map(|k3| powi(a, 3) * k3),
            k4: self.k4.map(|k4| powi(a, 4) * k4),
            residuals: Residuals::default(),
        }
    }
}

/// Raw moments `E[(s_n^2)^m]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MomentSet {
    pub n: usize,
    pub m1: f64,
    pub m2: f64,
    pub m3: Option<f64>,
    pub m4: Option<f64>,
}

fn group_table(tables: &[SymmetricMomentTable], group: u8) -> Result<&SymmetricMomentTable> {
    tables.iter().find(|t| t.group == group).ok_or_else(|| {
        Error::InvalidParameter(alloc::format!("group-{group} table not available"))
    })
}

fn estimator(table: &SymmetricMomentTable, exponents: &[u8]) -> Result<f64> {
    table.get_exponents(exponents).ok_or_else(|| {
        Error::InvalidParameter(alloc::format!("estimator {exponents:?} not in table"))
    })
}

/// kappa_1 = (mu2)_1 - (mu1^2)_1, shared by both engines.
pub fn kappa1(tables: &[SymmetricMomentTable]) -> Result<f64> {
    let t1 = group_table(tables, 1)?;
    Ok(estimator(t1, &[2])? - estimator(t1, &[1, 1])?)
}

/// The second-order rest term R_2 (identically zero for i.i.d. samples).
pub fn kappa2_rest_term(tables: &[SymmetricMomentTable]) -> Result<f64> {
    let t2 = group_table(tables, 2)?;
    let k1 = kappa1(tables)?;
    let mut sum = NeumaierSum::new();
    for &(coeff, exps) in tables::R2_TERMS {
        sum.add(coeff as f64 * estimator(t2, exps)?);
    }
    Ok(sum.value() - k1 * k1)
}

/// kappa_2 from the regrouped coefficient table plus the rest term.
pub fn kappa2_table_route(tables: &[SymmetricMomentTable], n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::InsufficientSampleSize { needed: 4, got: n });
    }
    let t2 = group_table(tables, 2)?;
    let a_sum = tables::eval_regrouped(tables::A2_SLOTS, t2, n)?;
    Ok(a_sum + kappa2_rest_term(tables)?)
}

/// Both readings of the table-route kappa_3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa3Routes {
    /// `(1,2)` slot over `(n-1) n^2` (the convention used everywhere else).
    pub standard: f64,
    /// `(1,2)` slot over `(n-1)^2 n`, the denominator as printed.
    pub printed: f64,
}

/// kappa_3 from the regrouped tables plus the rest term
/// `R_3 = -3 m2 m1 + 2 kappa_1^3`, with the moments taken to be those of
/// `s_n^2`. Neither reading reproduces the moment route (the rest term is
/// underspecified at its source); both are carried as diagnostics.
pub fn kappa3_table_route(
    tables: &[SymmetricMomentTable],
    n: usize,
    lower: &MomentSet,
) -> Result<Kappa3Routes> {
    if n < 6 {
        return Err(Error::InsufficientSampleSize { needed: 6, got: n });
    }
    let t3 = group_table(tables, 3)?;
    let common = tables::eval_regrouped(tables::A3_UNAMBIGUOUS, t3, n)?;
    let ambiguous = tables::eval_slot(&tables::A3_12, t3)?;
    let nf = n as f64;
    let k1 = lower.m1;
    let rest = -3.0 * lower.m2 * lower.m1 + 2.0 * powi(k1, 3);
    Ok(Kappa3Routes {
        standard: common + ambiguous / ((nf - 1.0) * nf * nf) + rest,
        printed: common + ambiguous / ((nf - 1.0) * (nf - 1.0) * nf) + rest,
    })
}

/// kappa_4 from the regrouped tables. No rest term is available for this
/// level, so the sum is reported as-is and `r4` measures the gap to the
/// moment route.
pub fn kappa4_table_route(tables: &[SymmetricMomentTable], n: usize) -> Result<f64> {
    if n < 8 {
        return Err(Error::InsufficientSampleSize { needed: 8, got: n });
    }
    let t4 = group_table(tables, 4)?;
    tables::eval_regrouped(tables::A4_SLOTS, t4, n)
}

/// `E[(s_n^2)^m]` for m = 1..=max_order from prebuilt tables.
pub fn moments_from_tables(tables: &[SymmetricMomentTable], max_order: u8) -> Result<MomentSet> {
    if !(2..=4).contains(&max_order) {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "max_order must be 2, 3 or 4",
        )));
    }
    let n = group_table(tables, 1)?.n;
    let m1 = VariancePowerExpansion::new(1).evaluate_with_table(group_table(tables, 1)?)?;
    let m2 = VariancePowerExpansion::new(2).evaluate_with_table(group_table(tables, 2)?)?;
    let m3 = if max_order >= 3 {
        Some(VariancePowerExpansion::new(3).evaluate_with_table(group_table(tables, 3)?)?)
    } else {
        None
    };
    let m4 = if max_order >= 4 {
        Some(VariancePowerExpansion::new(4).evaluate_with_table(group_table(tables, 4)?)?)
    } else {
        None
    };
    Ok(MomentSet { n, m1, m2, m3, m4 })
}

/// `E[(s_n^2)^3]` for a model (needs n >= 6).
pub fn moment3(model: &ProcessModel, n: usize) -> Result<f64> {
    VariancePowerExpansion::new(3).evaluate(model, n)
}

/// `E[(s_n^2)^4]` for a model (needs n >= 8).
pub fn moment4(model: &ProcessModel, n: usize) -> Result<f64> {
    VariancePowerExpansion::new(4).evaluate(model, n)
}

/// Standard cumulant-moment relations applied to a [`MomentSet`].
pub fn cumulants_from_moments(moments: &MomentSet) -> CumulantSet {
    let MomentSet { n, m1, m2, m3, m4 } = *moments;
    let k1 = m1;
    let k2 = m2 - m1 * m1;
    let k3 = m3.map(|m3| m3 - 3.0 * m2 * m1 + 2.0 * powi(m1, 3));
    let k4 = m4.map(|m4| {
        let m3 = m3.expect("m4 implies m3");
        m4 - 4.0 * m1 * m3 - 3.0 * m2 * m2 + 12.0 * m1 * m1 * m2 - 6.0 * powi(m1, 4)
    });
    CumulantSet {
        n,
        engine: Engine::MomentRoute,
        k1,
        k2,
        k3,
        k4,
        residuals: Residuals::default(),
    }
}

/// The authoritative cumulants of `s_n^2`: moment route, no diagnostics.
///
/// ```
/// use svar_core::{cumulants::cumulants_moment_route, ProcessModel};
///
/// // For i.i.d. N(0,1) data, s^2 ~ chi^2_{n-1}/(n-1): kappa_2 = 2/(n-1).
/// let model = ProcessModel::iid_normal(1.0).unwrap();
/// let set = cumulants_moment_route(&model, 10, 4).unwrap();
/// assert!((set.k2 - 2.0 / 9.0).abs() < 1e-12);
/// assert!((set.k4.unwrap() - 48.0 / 729.0).abs() < 1e-12);
/// ```
pub fn cumulants_moment_route(model: &ProcessModel, n: usize, max_order: u8) -> Result<CumulantSet> {
    let tables = build_tables(model, n, max_order)?;
    Ok(cumulants_from_moments(&moments_from_tables(&tables, max_order)?))
}

/// Both engines evaluated side by side, residuals filled in.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnginePair {
    pub moment: CumulantSet,
    pub table: CumulantSet,
}

pub fn cumulant_engines(model: &ProcessModel, n: usize, max_order: u8) -> Result<EnginePair> {
    let tables = build_tables(model, n, max_order)?;
    let moments = moments_from_tables(&tables, max_order)?;
    let mut moment_set = cumulants_from_moments(&moments);

    let k1 = kappa1(&tables)?;
    let k2 = kappa2_table_route(&tables, n)?;
    let k3_routes = if max_order >= 3 {
        Some(kappa3_table_route(&tables, n, &moments)?)
    } else {
        None
    };
    let k4 = if max_order >= 4 {
        Some(kappa4_table_route(&tables, n)?)
    } else {
        None
    };

    let residuals = Residuals {
        r2: Some(k2 - moment_set.k2),
        r3: k3_routes
            .as_ref()
            .zip(moment_set.k3)
            .map(|(routes, mk3)| routes.standard - mk3),
        r3_alt: k3_routes
            .as_ref()
            .zip(moment_set.k3)
            .map(|(routes, mk3)| routes.printed - mk3),
        r4: k4.zip(moment_set.k4).map(|(tk4, mk4)| tk4 - mk4),
    };
    moment_set.residuals = residuals;
    let table_set = CumulantSet {
        n,
        engine: Engine::CumulantRoute,
        k1,
        k2,
        k3: k3_routes.map(|routes| routes.standard),
        k4,
        residuals,
    };
    Ok(EnginePair {
        moment: moment_set,
        table: table_set,
    })
}

/// Result of the quadratic-form exactness test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ChisqCheck {
    pub exact: bool,
    pub max_deviation: f64,
}

/// With `B = I - (1/n) 1 1^T`, the scaled sample variance `X^T B X` of a
/// centred Gaussian vector with covariance `Sigma` is chi-squared
/// distributed iff `B Sigma B = B`. Returns the max-entry deviation.
pub fn chisq_exactness_check(covariance: &[Vec<f64>], tol: f64) -> Result<ChisqCheck> {
    let n = covariance.len();
    if n == 0 {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "empty covariance matrix",
        )));
    }
    for row in covariance {
        if row.len() != n {
            return Err(Error::NonSquareMatrix {
                rows: n,
                cols: row.len(),
            });
        }
    }
    let b = |i: usize, j: usize| -> f64 {
        let identity = if i == j { 1.0 } else { 0.0 };
        identity - 1.0 / n as f64
    };
    // S = Sigma B
    let mut sigma_b = alloc::vec![alloc::vec![0.0f64; n]; n];
    for (out_row, cov_row) in sigma_b.iter_mut().zip(covariance) {
        for (j, out) in out_row.iter_mut().enumerate() {
            let mut acc = NeumaierSum::new();
            for (k, &value) in cov_row.iter().enumerate() {
                acc.add(value * b(k, j));
            }
            *out = acc.value();
        }
    }
    // deviation = max |(B * S)_{ij} - B_{ij}|
    let mut max_deviation = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = NeumaierSum::new();
            for (k, s_row) in sigma_b.iter().enumerate() {
                acc.add(b(i, k) * s_row[j]);
            }
            let deviation = fabs(acc.value() - b(i, j));
            if deviation > max_deviation {
                max_deviation = deviation;
            }
        }
    }
    Ok(ChisqCheck {
        exact: max_deviation <= tol,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Autocovariance;
    use alloc::vec;

    #[test]
    fn kappa1_examples() {
        let iid = ProcessModel::iid(vec![0.0, 1.0]).unwrap();
        let tables = build_tables(&iid, 5, 1).unwrap();
        assert_eq!(kappa1(&tables).unwrap(), 1.0);

        let constant = ProcessModel::constant(3.0, 5).unwrap();
        let tables = build_tables(&constant, 5, 1).unwrap();
        assert!(fabs(kappa1(&tables).unwrap()) < 1e-12);

        // AR(1)-style gamma(h) = 0.5^h at n = 3: 1 - 5/12.
        let ar = ProcessModel::gaussian_stationary(
            0.0,
            Autocovariance::Ar1 {
                variance: 1.0,
                phi: 0.5,
            },
        )
        .unwrap();
        let tables = build_tables(&ar, 3, 1).unwrap();
        assert!(fabs(kappa1(&tables).unwrap() - 7.0 / 12.0) < 1e-14);
    }

    #[test]
    fn kappa2_closed_forms() {
        // i.i.d. normal: kappa_2 = 2/(n-1).
        let normal = ProcessModel::iid_normal(1.0).unwrap();
        let tables = build_tables(&normal, 10, 2).unwrap();
        assert!(fabs(kappa2_table_route(&tables, 10).unwrap() - 2.0 / 9.0) < 1e-14);

        // Rademacher at n = 4: kappa_2 = 1/6.
        let rademacher = ProcessModel::iid(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let tables = build_tables(&rademacher, 4, 2).unwrap();
        assert!(fabs(kappa2_table_route(&tables, 4).unwrap() - 1.0 / 6.0) < 1e-14);

        let constant = ProcessModel::constant(2.0, 6).unwrap();
        let tables = build_tables(&constant, 6, 2).unwrap();
        assert!(fabs(kappa2_table_route(&tables, 6).unwrap()) < 1e-12);
    }

    #[test]
    fn rest_term_vanishes_for_iid() {
        for model in [
            ProcessModel::iid_normal(2.0).unwrap(),
            ProcessModel::iid(vec![0.3, 1.1, 0.4, 3.7]).unwrap(),
        ] {
            let tables = build_tables(&model, 9, 2).unwrap();
            assert!(fabs(kappa2_rest_term(&tables).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn moment_route_matches_scaled_chi_squared() {
        let model = ProcessModel::iid_normal(1.0).unwrap();
        let set = cumulants_moment_route(&model, 10, 4).unwrap();
        assert!(fabs(set.k1 - 1.0) < 1e-12);
        assert!(fabs(set.k2 - 2.0 / 9.0) < 1e-12);
        assert!(fabs(set.k3.unwrap() - 8.0 / 81.0) < 1e-12);
        assert!(fabs(set.k4.unwrap() - 48.0 / 729.0) < 1e-12);
    }

    #[test]
    fn constant_process_has_vanishing_cumulants() {
        let model = ProcessModel::constant(5.0, 8).unwrap();
        let set = cumulants_moment_route(&model, 8, 4).unwrap();
        for value in [set.k1, set.k2, set.k3.unwrap(), set.k4.unwrap()] {
            assert!(fabs(value) < 1e-9, "{value}");
        }
        // The table route must agree on the exact-zero case too.
        let pair = cumulant_engines(&model, 8, 4).unwrap();
        assert!(fabs(pair.table.k3.unwrap()) < 1e-9);
        assert!(fabs(pair.table.k4.unwrap()) < 1e-9);
    }

    #[test]
    fn table_route_kappa2_agrees_with_moment_route() {
        let chain = crate::process::markov_to_finite_joint(
            &[0.0, 1.0],
            &[vec![0.9, 0.1], vec![0.2, 0.8]],
            &[2.0 / 3.0, 1.0 / 3.0],
            8,
        )
        .unwrap();
        let pair = cumulant_engines(&chain, 8, 4).unwrap();
        assert!(
            fabs(pair.moment.residuals.r2.unwrap()) < 1e-13,
            "r2 = {:?}",
            pair.moment.residuals.r2
        );
    }

    #[test]
    fn chisq_check_examples() {
        let eye = |n: usize| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect()
        };
        // Identity covariance: exactly chi-squared.
        let check = chisq_exactness_check(&eye(5), 1e-12).unwrap();
        assert!(check.exact, "deviation {}", check.max_deviation);

        // Rank-one inflation I + c 1 1^T is annihilated by B.
        let mut inflated = eye(4);
        for row in inflated.iter_mut() {
            for value in row.iter_mut() {
                *value += 0.7;
            }
        }
        let check = chisq_exactness_check(&inflated, 1e-12).unwrap();
        assert!(check.exact, "deviation {}", check.max_deviation);

        // diag(1, 2) at n = 2 fails: B Sigma B = 1.5 B.
        let diag = vec![vec![1.0, 0.0], vec![0.0, 2.0]];
        let check = chisq_exactness_check(&diag, 1e-12).unwrap();
        assert!(!check.exact);
        assert!(fabs(check.max_deviation - 0.25) < 1e-15);

        let ragged = vec![vec![1.0, 0.0], vec![0.0]];
        assert!(matches!(
            chisq_exactness_check(&ragged, 1e-12),
            Err(Error::NonSquareMatrix { .. })
        ));
    }
}
