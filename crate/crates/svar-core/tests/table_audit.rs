//! Exact audits of the published coefficient tables against the
//! first-principles expansion in `svar_core::algebra`.
//!
//! Comparisons are done in integer arithmetic (cross-multiplied rational
//! coefficients evaluated at enough integer n to pin the polynomials), so a
//! single off-by-one in a transcribed coefficient cannot hide. Where the
//! printed tables are internally inconsistent, the audit freezes the exact
//! discrepancy instead of papering over it.

use svar_core::algebra::VariancePowerExpansion;
use svar_core::cumulants::{
    cumulant_engines, kappa2_rest_term, kappa3_table_route, kappa4_table_route,
    moments_from_tables,
};
use svar_core::pattern::ExponentPattern;
use svar_core::process::{markov_to_finite_joint, ProcessModel};
use svar_core::symmetric::build_tables;
use svar_core::tables::{
    eval_regrouped, eval_slot, regrouped_numerator_at, TableSlot, A2_SLOTS, ES6_CLOSED,
    ES8_DISPLAY, M3_00, M3_02, M3_10_FIRST, M3_10_SECOND, M3_11, M3_12, M3_20, M3_21, M3_22,
    R2_TERMS,
};

/// n-values used to compare coefficient polynomials; more points than any
/// polynomial degree in play, so matching everywhere means identical.
const PROBE_NS: [i128; 12] = [8, 9, 10, 11, 12, 13, 14, 15, 17, 19, 23, 29];

fn denom_pow(n: i128, i: u8, j: u8) -> i128 {
    (n - 1).pow(i as u32) * n.pow(j as u32)
}

/// Coefficient of `pattern` in a closed-form display, as numerator over
/// `(n-1)^2 n^2` (sixth moment) or `(n-1)^3 n^3` (eighth moment).
fn display_numerator_at(
    rows: &[svar_core::tables::DisplayRow],
    exponents: &[u8],
    n: i128,
    i_max: u8,
    j_max: u8,
) -> i128 {
    let mut key = exponents.to_vec();
    key.sort_unstable_by(|a, b| b.cmp(a));
    rows.iter()
        .filter(|row| {
            let mut other = row.exponents.to_vec();
            other.sort_unstable_by(|a, b| b.cmp(a));
            other == key
        })
        .map(|row| (row.numerator)(n) * denom_pow(n, i_max - row.i, j_max - row.j))
        .sum()
}

/// Coefficient of `pattern` in the derived expansion of `E[(s^2)^m]`:
/// numerator over the denominator `(n-1)^m n^m`, plus that denominator as
/// the cross-multiplication scale for the table side. Equality of
/// `table_numer / ((n-1)^imax n^jmax)` with `derived_numer / ((n-1)^m n^m)`
/// is `table_numer * scale == derived_numer * denom_pow(n, i_max, j_max)`.
fn cross_multiplied(
    expansion: &VariancePowerExpansion,
    exponents: &[u8],
    n: i128,
) -> (i128, i128) {
    let m = expansion.power();
    let derived = expansion.coefficient_numerator_at(exponents, n);
    let scale = (n - 1).pow(m) * n.pow(m);
    (derived, scale)
}

#[test]
fn level2_table_plus_rest_is_exactly_the_derived_second_moment() {
    // kappa_2 = A-sum + R_2 and mu'_2 = kappa_2 + kappa_1^2, with the
    // kappa_1^2 inside R_2 cancelling, so as *linear* tables:
    // E[s^4] = A-sum + (R2 terms at slot (0,0)).
    let expansion = VariancePowerExpansion::new(2);
    let rest_slot = TableSlot {
        i: 0,
        j: 0,
        terms: R2_TERMS,
    };
    let mut slots: Vec<TableSlot> = A2_SLOTS.to_vec();
    slots.push(rest_slot);
    for pattern in ExponentPattern::group_catalog(2) {
        for n in PROBE_NS {
            let printed = regrouped_numerator_at(&slots, pattern.exponents(), n, 1, 1);
            let (derived, scale) = cross_multiplied(&expansion, pattern.exponents(), n);
            assert_eq!(
                printed * scale,
                derived * denom_pow(n, 1, 1),
                "kappa_2 table disagrees on {pattern} at n = {n}"
            );
        }
    }
}

#[test]
fn es6_closed_form_display_matches_derived_expansion() {
    let expansion = VariancePowerExpansion::new(3);
    for pattern in ExponentPattern::group_catalog(3) {
        for n in PROBE_NS {
            let display = display_numerator_at(ES6_CLOSED, pattern.exponents(), n, 2, 2);
            let (derived, scale) = cross_multiplied(&expansion, pattern.exponents(), n);
            assert_eq!(
                display * scale,
                derived * denom_pow(n, 2, 2),
                "sixth-moment display disagrees on {pattern} at n = {n}"
            );
        }
    }
}

#[test]
fn es8_display_matches_derived_expansion() {
    let expansion = VariancePowerExpansion::new(4);
    for pattern in ExponentPattern::group_catalog(4) {
        for n in PROBE_NS {
            let display = display_numerator_at(ES8_DISPLAY, pattern.exponents(), n, 3, 3);
            let (derived, scale) = cross_multiplied(&expansion, pattern.exponents(), n);
            assert_eq!(
                display * scale,
                derived * denom_pow(n, 3, 3),
                "eighth-moment display disagrees on {pattern} at n = {n}"
            );
        }
    }
}

/// The printed regrouped sixth-moment table carries two misprints relative
/// to both the closed-form display and the derived expansion:
///
/// 1. its (2,0) slot contains a spurious extra `2 x M3_00` (so the mu1^6,
///    mu1^4 mu2, mu1^2 mu2^2 and mu2^3 coefficients are off by exactly
///    twice the (0,0) ones), and
/// 2. the row printed with a duplicated "(1,0)" label really belongs at
///    (1,0) — summed with the first (1,0) row — not at the vacant (0,1)
///    slot (assigning it to (0,1) breaks even the i.i.d. normal case).
#[test]
fn printed_m3_misprints_are_exactly_the_frozen_ones() {
    let expansion = VariancePowerExpansion::new(3);

    // Reading A: duplicated row at its printed (1,0) position.
    let reading_a: Vec<TableSlot> = vec![
        M3_00,
        M3_10_FIRST,
        M3_10_SECOND,
        M3_20,
        M3_11,
        M3_02,
        M3_21,
        M3_12,
        M3_22,
    ];
    // With the spurious 2 x M3_00 removed from the (2,0) slot the printed
    // table must agree with the derived expansion exactly.
    let m3_20_corrected = TableSlot {
        i: 2,
        j: 0,
        terms: &[
            (-58, &[1, 1, 1, 1, 1, 1]),
            (174, &[2, 1, 1, 1, 1]),
            (-68, &[3, 1, 1, 1]),
            (-123, &[2, 2, 1, 1]),
            (60, &[3, 2, 1]),
            (11, &[2, 2, 2]),
            (-6, &[3, 3]),
        ],
    };
    let corrected: Vec<TableSlot> = vec![
        M3_00,
        M3_10_FIRST,
        M3_10_SECOND,
        m3_20_corrected,
        M3_11,
        M3_02,
        M3_21,
        M3_12,
        M3_22,
    ];
    for pattern in ExponentPattern::group_catalog(3) {
        for n in PROBE_NS {
            let (derived, scale) = cross_multiplied(&expansion, pattern.exponents(), n);
            let derived_side = derived * denom_pow(n, 2, 2);

            let fixed = regrouped_numerator_at(&corrected, pattern.exponents(), n, 2, 2);
            assert_eq!(
                fixed * scale,
                derived_side,
                "corrected regrouped table still disagrees on {pattern} at n = {n}"
            );

            // The printed table differs from the derived expansion by
            // exactly 2 x M3_00 / (n-1)^2 on the four affected patterns.
            let printed = regrouped_numerator_at(&reading_a, pattern.exponents(), n, 2, 2);
            let extra = TableSlot {
                i: 2,
                j: 0,
                terms: M3_00.terms,
            };
            let expected_excess =
                2 * regrouped_numerator_at(&[extra], pattern.exponents(), n, 2, 2);
            assert_eq!(
                printed * scale - derived_side,
                expected_excess * scale,
                "printed-vs-derived difference is not the frozen misprint on {pattern} at n = {n}"
            );
        }
    }

    // Reading B (duplicated row forced to the vacant (0,1) slot) breaks the
    // mu4-bearing rows; demonstrate on mu2 mu4.
    let moved = TableSlot {
        i: 0,
        j: 1,
        terms: M3_10_SECOND.terms,
    };
    let reading_b: Vec<TableSlot> = vec![
        M3_00, M3_10_FIRST, moved, M3_20, M3_11, M3_02, M3_21, M3_12, M3_22,
    ];
    let n = 10;
    let (derived, scale) = cross_multiplied(&expansion, &[4, 2], n);
    let printed_b = regrouped_numerator_at(&reading_b, &[4, 2], n, 2, 2);
    assert_ne!(printed_b * scale, derived * denom_pow(n, 2, 2));
    let printed_a = regrouped_numerator_at(&reading_a, &[4, 2], n, 2, 2);
    assert_eq!(printed_a * scale, derived * denom_pow(n, 2, 2));
}

/// With the rest terms set to zero, the regrouped kappa_3 / kappa_4 tables
/// reproduce the moment route exactly for i.i.d. models (the published
/// kappa_3 rest expression does not); the `(1,2)` slot must use the
/// conventional `(n-1) n^2` denominator for this to hold. For dependent
/// processes a genuine nonzero rest remains, measured by the residuals.
#[test]
fn zero_rest_table_route_is_exact_for_iid_and_documented_for_dependent() {
    let asymmetric = ProcessModel::iid(ProcessModel::raw_moments_of_support(
        &[-1.0, 0.0, 2.0],
        &[0.5, 0.3, 0.2],
        8,
    ))
    .unwrap();
    for (model, n) in [
        (ProcessModel::iid_normal(1.0).unwrap(), 10usize),
        (ProcessModel::iid_normal(0.7).unwrap(), 9),
        (asymmetric, 10),
    ] {
        let tables = build_tables(&model, n, 4).unwrap();
        let moments = moments_from_tables(&tables, 4).unwrap();
        let pair = cumulant_engines(&model, n, 4).unwrap();
        let k3_routes = kappa3_table_route(&tables, n, &moments).unwrap();
        let rest3 = -3.0 * moments.m2 * moments.m1 + 2.0 * moments.m1.powi(3);
        let a3_sum_standard = k3_routes.standard - rest3;
        let a3_sum_printed = k3_routes.printed - rest3;
        let k3_moment = pair.moment.k3.unwrap();
        assert!(
            (a3_sum_standard - k3_moment).abs() <= 1e-12 * k3_moment.abs().max(1.0),
            "zero-rest kappa_3 route off for iid: {a3_sum_standard} vs {k3_moment}"
        );
        assert!(
            (a3_sum_printed - k3_moment).abs() > 1e-6 * k3_moment.abs().max(1e-3),
            "printed denominator variant unexpectedly matches"
        );
        let k4_table = kappa4_table_route(&tables, n).unwrap();
        let k4_moment = pair.moment.k4.unwrap();
        assert!(
            (k4_table - k4_moment).abs() <= 1e-12 * k4_moment.abs().max(1.0),
            "zero-rest kappa_4 route off for iid: {k4_table} vs {k4_moment}"
        );
    }

    // Dependent case: the zero-rest route no longer matches; the gap is the
    // (unpublished) higher-order rest, reported via r3/r4.
    let chain = markov_to_finite_joint(
        &[0.0, 1.0],
        &[vec![0.9, 0.1], vec![0.2, 0.8]],
        &[2.0 / 3.0, 1.0 / 3.0],
        8,
    )
    .unwrap();
    let tables = build_tables(&chain, 8, 4).unwrap();
    let moments = moments_from_tables(&tables, 4).unwrap();
    let pair = cumulant_engines(&chain, 8, 4).unwrap();
    let rest2 = kappa2_rest_term(&tables).unwrap();
    let routes = kappa3_table_route(&tables, 8, &moments).unwrap();
    let rest3_measured = pair.moment.k3.unwrap() - (routes.standard + 3.0 * moments.m2 * moments.m1
        - 2.0 * moments.m1.powi(3));
    println!("dependent-case rests: R2 = {rest2:.6e}, measured kappa_3 rest = {rest3_measured:.6e}, r4 = {:.6e}", pair.moment.residuals.r4.unwrap());
    assert!(rest2.abs() > 1e-6, "R2 should be nonzero for a dependent process");
    // kappa_2's published table remains exact even here.
    let t2 = tables.iter().find(|t| t.group == 2).unwrap();
    let a2 = eval_regrouped(A2_SLOTS, t2, 8).unwrap();
    let k2_table = a2 + rest2;
    assert!((k2_table - pair.moment.k2).abs() <= 1e-13);
    // Sanity: slot evaluation surface stays available for diagnostics.
    let _ = eval_slot(&M3_11, tables.iter().find(|t| t.group == 3).unwrap()).unwrap();
}
