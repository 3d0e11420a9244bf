//! The oracle-equivalence validation suite behind the CLI's `validate`
//! subcommand: for a configured process, run every applicable invariant and
//! report the measured error against its tolerance.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cumulants::{cumulant_engines, kappa2_rest_term, CumulantSet};
use crate::numeric::fabs;
use crate::oracles::{exact_cumulants, exact_law};
use crate::process::ProcessModel;
use crate::symmetric::build_tables;
use crate::Result;

/// Outcome of one validation check.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Measured error (absolute).
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        let measured = fabs(measured);
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }
}

/// Tolerances for the suite; defaults match the engine contracts.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct CheckTolerances {
    /// Relative tolerance for oracle and cross-engine comparisons.
    pub relative: f64,
    /// Absolute floor near zero.
    pub absolute: f64,
    /// Rest-term and probability-mass tolerance.
    pub exact_zero: f64,
    /// Location-shift invariance tolerance.
    pub shift: f64,
}

impl Default for CheckTolerances {
    fn default() -> Self {
        Self {
            relative: 1e-10,
            absolute: 1e-12,
            exact_zero: 1e-12,
            shift: 1e-9,
        }
    }
}

fn scaled_tol(reference: f64, tol: &CheckTolerances) -> f64 {
    (tol.relative * fabs(reference)).max(tol.absolute)
}

fn compare_sets(
    name_prefix: &str,
    got: &CumulantSet,
    want: &CumulantSet,
    tol_fn: impl Fn(f64) -> f64,
    out: &mut Vec<CheckResult>,
) {
    let pairs = [
        ("k1", Some(got.k1), Some(want.k1)),
        ("k2", Some(got.k2), Some(want.k2)),
        ("k3", got.k3, want.k3),
        ("k4", got.k4, want.k4),
    ];
    for (label, g, w) in pairs {
        if let (Some(g), Some(w)) = (g, w) {
            out.push(CheckResult::new(
                alloc::format!("{name_prefix} {label}"),
                g - w,
                tol_fn(w),
            ));
        }
    }
}

/// Run every check applicable to the model at sample size n, computing
/// cumulants up to `max_order`.
pub fn validate_model(
    model: &ProcessModel,
    n: usize,
    max_order: u8,
    tolerances: &CheckTolerances,
) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let pair = cumulant_engines(model, n, max_order)?;
    let moment = &pair.moment;

    // Cross-engine agreement on kappa_2 (exact by construction of the
    // level-2 table; the higher residuals are diagnostics, not checks).
    if let Some(r2) = moment.residuals.r2 {
        out.push(CheckResult::new(
            "engines agree on k2",
            r2,
            scaled_tol(moment.k2, tolerances),
        ));
    }

    // Variance of a statistic is non-negative.
    out.push(CheckResult::new(
        "k2 is non-negative",
        if moment.k2 < 0.0 { moment.k2 } else { 0.0 },
        tolerances.exact_zero,
    ));

    // Cauchy-Schwarz on the raw moments of s^2: m2 >= m1^2 and m4 >= m2^2.
    let tables = build_tables(model, n, max_order)?;
    let moments = crate::cumulants::moments_from_tables(&tables, max_order)?;
    let mut cauchy_violation = (moments.m1 * moments.m1 - moments.m2).max(0.0);
    if let (Some(_), Some(m4)) = (moments.m3, moments.m4) {
        cauchy_violation = cauchy_violation.max((moments.m2 * moments.m2 - m4).max(0.0));
    }
    out.push(CheckResult::new(
        "moment sequence is Cauchy-Schwarz consistent",
        cauchy_violation,
        (tolerances.relative * moments.m2.abs()).max(tolerances.exact_zero),
    ));

    // Determinism: recomputation is bit-identical.
    let again = cumulant_engines(model, n, max_order)?;
    let identical = again.moment.k1.to_bits() == moment.k1.to_bits()
        && again.moment.k2.to_bits() == moment.k2.to_bits()
        && again.moment.k3.map(f64::to_bits) == moment.k3.map(f64::to_bits)
        && again.moment.k4.map(f64::to_bits) == moment.k4.map(f64::to_bits);
    out.push(CheckResult::new(
        "deterministic recompute",
        if identical { 0.0 } else { 1.0 },
        0.0,
    ));

    // Scale equivariance: scaling observations by c multiplies kappa_r of
    // s^2 by c^{2r}. Compared after descaling so the tolerance floor works
    // in the original units (degenerate processes have exact-zero cumulants
    // whose computed noise would otherwise scale with c).
    let c = 1.7;
    let scaled = cumulant_engines(&model.scaled(c), n, max_order)?;
    let descaled = scaled.moment.affine_transformed(1.0 / (c * c), 0.0);
    compare_sets(
        "scale equivariance",
        &descaled,
        moment,
        |w| scaled_tol(w, tolerances),
        &mut out,
    );

    // Location invariance (models whose mean is free).
    if let Ok(shifted_model) = model.shifted(0.9) {
        let shifted = cumulant_engines(&shifted_model, n, max_order)?;
        compare_sets(
            "location invariance",
            &shifted.moment,
            moment,
            |w| (tolerances.shift * fabs(w)).max(tolerances.shift),
            &mut out,
        );
    }

    match model {
        ProcessModel::Iid { .. } => {
            // The second-order rest term vanishes identically for i.i.d.
            let tables = build_tables(model, n, 2)?;
            out.push(CheckResult::new(
                "iid rest term R2 vanishes",
                kappa2_rest_term(&tables)?,
                tolerances.exact_zero,
            ));
        }
        ProcessModel::GaussianStationary { .. } => {
            // Odd total exponents vanish exactly.
            let odd = model.joint_moment(&[(1, 2), (2, 1)])?;
            out.push(CheckResult::new(
                "odd gaussian moments vanish",
                odd,
                0.0,
            ));
        }
        ProcessModel::FiniteJoint { .. } => {
            // The exact enumeration oracle is available: the strongest check.
            let law = exact_law(model)?;
            out.push(CheckResult::new(
                "exact law total probability",
                law.total_probability() - 1.0,
                tolerances.exact_zero,
            ));
            let oracle = exact_cumulants(&law);
            let mut truncated = oracle;
            if max_order < 3 {
                truncated.k3 = None;
            }
            if max_order < 4 {
                truncated.k4 = None;
            }
            compare_sets(
                "moment route vs exact law",
                moment,
                &truncated,
                |w| scaled_tol(w, tolerances),
                &mut out,
            );
        }
    }
    Ok(out)
}
