//! Published coefficient tables for the cumulants and moments of the sample
//! variance, stored as data (integer coefficient x exponent pattern) so they
//! can be diffed term by term against the first-principles expansion in
//! [`crate::algebra`].
//!
//! Two independent forms exist for the same quantities:
//!
//! * regrouped tables `A^level_{i,j}` (and `M^3_{i,j}` for `E[s^6]`) whose
//!   slot `(i, j)` carries denominator `(n-1)^i n^j`,
//! * closed-form displays whose per-pattern coefficients are explicit
//!   rational functions of n.
//!
//! The test suite compares both against the derived expansion; the
//! transcriptions here are verbatim, misprints included (see the audit tests
//! for what disagrees where). Production cumulants therefore come from the
//! moment route; these tables power the diagnostic route and its residuals.

use alloc::vec::Vec;

use crate::error::Error;
use crate::numeric::{powi, NeumaierSum};
use crate::symmetric::SymmetricMomentTable;
use crate::Result;

/// One `(i, j)` slot of a regrouped table: a linear combination of
/// symmetric estimators over the denominator `(n-1)^i n^j`.
#[derive(Debug, Clone, Copy)]
pub struct TableSlot {
    pub i: u8,
    pub j: u8,
    pub terms: &'static [(i64, &'static [u8])],
}

/// Evaluate the numerator of one slot against a group table.
pub fn eval_slot(slot: &TableSlot, table: &SymmetricMomentTable) -> Result<f64> {
    let mut sum = NeumaierSum::new();
    for &(coeff, exponents) in slot.terms {
        let value = table.get_exponents(exponents).ok_or_else(|| {
            Error::InvalidParameter(alloc::format!(
                "estimator {exponents:?} missing from group-{} table",
                table.group
            ))
        })?;
        sum.add(coeff as f64 * value);
    }
    Ok(sum.value())
}

/// Evaluate a full regrouped sum `sum_slots slot / ((n-1)^i n^j)`.
pub fn eval_regrouped(slots: &[TableSlot], table: &SymmetricMomentTable, n: usize) -> Result<f64> {
    let nf = n as f64;
    let mut sum = NeumaierSum::new();
    for slot in slots {
        let numerator = eval_slot(slot, table)?;
        sum.add(numerator / (powi(nf - 1.0, slot.i as i32) * powi(nf, slot.j as i32)));
    }
    Ok(sum.value())
}

// ---------------------------------------------------------------------------
// kappa_2 regrouped table (level 2).
// ---------------------------------------------------------------------------

pub const A2_SLOTS: &[TableSlot] = &[
    TableSlot {
        i: 1,
        j: 0,
        terms: &[(-4, &[1, 1, 1, 1]), (8, &[2, 1, 1]), (-1, &[2, 2])],
    },
    TableSlot {
        i: 0,
        j: 1,
        terms: &[(1, &[4]), (-4, &[3, 1])],
    },
    TableSlot {
        i: 1,
        j: 1,
        terms: &[(6, &[1, 1, 1, 1]), (-12, &[2, 1, 1]), (3, &[2, 2])],
    },
];

/// The second-order rest term
/// `R_2 = (mu2^2)_2 - 2 (mu1^2 mu2)_2 + (mu1^4)_2 - kappa_1^2`,
/// identically zero for i.i.d. samples.
pub const R2_TERMS: &[(i64, &[u8])] =
    &[(1, &[2, 2]), (-2, &[2, 1, 1]), (1, &[1, 1, 1, 1])];

// ---------------------------------------------------------------------------
// kappa_3 regrouped table (level 3). The (1,2) slot is printed with the same
// denominator as (2,1); both readings are evaluated by the diagnostic route.
// ---------------------------------------------------------------------------

pub const A3_20: TableSlot = TableSlot {
    i: 2,
    j: 0,
    terms: &[
        (-40, &[1, 1, 1, 1, 1, 1]),
        (120, &[2, 1, 1, 1, 1]),
        (-56, &[3, 1, 1, 1]),
        (-78, &[2, 2, 1, 1]),
        (48, &[3, 2, 1]),
        (2, &[2, 2, 2]),
        (-6, &[3, 3]),
    ],
};

pub const A3_11: TableSlot = TableSlot {
    i: 1,
    j: 1,
    terms: &[(18, &[4, 1, 1]), (-3, &[4, 2])],
};

pub const A3_02: TableSlot = TableSlot {
    i: 0,
    j: 2,
    terms: &[(1, &[6]), (-6, &[5, 1])],
};

pub const A3_21: TableSlot = TableSlot {
    i: 2,
    j: 1,
    terms: &[
        (136, &[1, 1, 1, 1, 1, 1]),
        (-408, &[2, 1, 1, 1, 1]),
        (160, &[3, 1, 1, 1]),
        (288, &[2, 2, 1, 1]),
        (-144, &[3, 2, 1]),
        (-24, &[2, 2, 2]),
        (12, &[3, 3]),
    ],
};

/// Numerator of the (1,2) slot; the denominator is ambiguous in print.
pub const A3_12: TableSlot = TableSlot {
    i: 1,
    j: 2,
    terms: &[(15, &[4, 2]), (-30, &[4, 1, 1])],
};

pub const A3_22: TableSlot = TableSlot {
    i: 2,
    j: 2,
    terms: &[
        (-120, &[1, 1, 1, 1, 1, 1]),
        (360, &[2, 1, 1, 1, 1]),
        (-120, &[3, 1, 1, 1]),
        (-270, &[2, 2, 1, 1]),
        (120, &[3, 2, 1]),
        (30, &[2, 2, 2]),
        (-10, &[3, 3]),
    ],
};

/// Slots of the kappa_3 sum excluding the ambiguous (1,2) one.
pub const A3_UNAMBIGUOUS: &[TableSlot] = &[A3_20, A3_11, A3_02, A3_21, A3_22];

// ---------------------------------------------------------------------------
// kappa_4 regrouped table (level 4), ten slots.
// ---------------------------------------------------------------------------

pub const A4_SLOTS: &[TableSlot] = &[
    TableSlot {
        i: 3,
        j: 0,
        terms: &[
            (-672, &[1, 1, 1, 1, 1, 1, 1, 1]),
            (2688, &[2, 1, 1, 1, 1, 1, 1]),
            (-1216, &[3, 1, 1, 1, 1, 1]),
            (-3120, &[2, 2, 1, 1, 1, 1]),
            (400, &[4, 1, 1, 1, 1]),
            (2240, &[3, 2, 1, 1, 1]),
            (960, &[2, 2, 2, 1, 1]),
            (-384, &[3, 3, 1, 1]),
            (-480, &[4, 2, 1, 1]),
            (-624, &[3, 2, 2, 1]),
            (144, &[4, 3, 1]),
            (-6, &[2, 2, 2, 2]),
            (96, &[3, 3, 2]),
            (-3, &[4, 4]),
            (12, &[4, 2, 2]),
        ],
    },
    TableSlot {
        i: 2,
        j: 1,
        terms: &[(-128, &[5, 1, 1, 1]), (96, &[5, 2, 1]), (-24, &[5, 3])],
    },
    TableSlot {
        i: 1,
        j: 2,
        terms: &[(32, &[6, 1, 1]), (-4, &[6, 2])],
    },
    TableSlot {
        i: 0,
        j: 3,
        terms: &[(1, &[8]), (-8, &[7, 1])],
    },
    TableSlot {
        i: 3,
        j: 1,
        terms: &[
            (3792, &[1, 1, 1, 1, 1, 1, 1, 1]),
            (-15168, &[2, 1, 1, 1, 1, 1, 1]),
            (6144, &[3, 1, 1, 1, 1, 1]),
            (18144, &[2, 2, 1, 1, 1, 1]),
            (-1920, &[4, 1, 1, 1, 1]),
            (-11520, &[3, 2, 1, 1, 1]),
            (-6336, &[2, 2, 2, 1, 1]),
            (1680, &[3, 3, 1, 1]),
            (2520, &[4, 2, 1, 1]),
            (3600, &[3, 2, 2, 1]),
            (-624, &[4, 3, 1]),
            (234, &[2, 2, 2, 2]),
            (-432, &[3, 3, 2]),
            (33, &[4, 4]),
            (-252, &[4, 2, 2]),
        ],
    },
    TableSlot {
        i: 2,
        j: 2,
        terms: &[(400, &[5, 1, 1, 1]), (-336, &[5, 2, 1]), (48, &[5, 3])],
    },
    TableSlot {
        i: 1,
        j: 3,
        terms: &[(28, &[6, 2]), (-56, &[6, 1, 1])],
    },
    TableSlot {
        i: 3,
        j: 2,
        terms: &[
            (-7440, &[1, 1, 1, 1, 1, 1, 1, 1]),
            (29760, &[2, 1, 1, 1, 1, 1, 1]),
            (-10880, &[3, 1, 1, 1, 1, 1]),
            (-36480, &[2, 2, 1, 1, 1, 1]),
            (3104, &[4, 1, 1, 1, 1]),
            (20992, &[3, 2, 1, 1, 1]),
            (13824, &[2, 2, 2, 1, 1]),
            (-2752, &[3, 3, 1, 1]),
            (-4368, &[4, 2, 1, 1]),
            (-7248, &[3, 2, 2, 1]),
            (976, &[4, 3, 1]),
            (-738, &[2, 2, 2, 2]),
            (800, &[3, 3, 2]),
            (-57, &[4, 4]),
            (612, &[4, 2, 2]),
        ],
    },
    TableSlot {
        i: 2,
        j: 3,
        terms: &[(-336, &[5, 1, 1, 1]), (336, &[5, 2, 1]), (-56, &[5, 3])],
    },
    TableSlot {
        i: 3,
        j: 3,
        terms: &[
            (5040, &[1, 1, 1, 1, 1, 1, 1, 1]),
            (-20160, &[2, 1, 1, 1, 1, 1, 1]),
            (6720, &[3, 1, 1, 1, 1, 1]),
            (25200, &[2, 2, 1, 1, 1, 1]),
            (-1680, &[4, 1, 1, 1, 1]),
            (-13440, &[3, 2, 1, 1, 1]),
            (-10080, &[2, 2, 2, 1, 1]),
            (1680, &[3, 3, 1, 1]),
            (2520, &[4, 2, 1, 1]),
            (5040, &[3, 2, 2, 1]),
            (-560, &[4, 3, 1]),
            (630, &[2, 2, 2, 2]),
            (-560, &[3, 3, 2]),
            (35, &[4, 4]),
            (-420, &[4, 2, 2]),
        ],
    },
];

// ---------------------------------------------------------------------------
// E[s^6] regrouped table as printed. The (1,0) label appears twice in print;
// both rows are kept verbatim so the audit can test each assignment of the
// second one.
// ---------------------------------------------------------------------------

pub const M3_00: TableSlot = TableSlot {
    i: 0,
    j: 0,
    terms: &[
        (-1, &[1, 1, 1, 1, 1, 1]),
        (3, &[2, 1, 1, 1, 1]),
        (-3, &[2, 2, 1, 1]),
        (1, &[2, 2, 2]),
    ],
};

pub const M3_10_FIRST: TableSlot = TableSlot {
    i: 1,
    j: 0,
    terms: &[
        (12, &[1, 1, 1, 1, 1, 1]),
        (-36, &[2, 1, 1, 1, 1]),
        (12, &[3, 1, 1, 1]),
        (27, &[2, 2, 1, 1]),
        (-12, &[3, 2, 1]),
        (-3, &[2, 2, 2]),
    ],
};

/// The row printed with the duplicated `(1,0)` label.
pub const M3_10_SECOND: TableSlot = TableSlot {
    i: 1,
    j: 0,
    terms: &[(-3, &[4, 1, 1]), (3, &[4, 2])],
};

pub const M3_20: TableSlot = TableSlot {
    i: 2,
    j: 0,
    terms: &[
        (-60, &[1, 1, 1, 1, 1, 1]),
        (180, &[2, 1, 1, 1, 1]),
        (-68, &[3, 1, 1, 1]),
        (-129, &[2, 2, 1, 1]),
        (60, &[3, 2, 1]),
        (13, &[2, 2, 2]),
        (-6, &[3, 3]),
    ],
};

pub const M3_11: TableSlot = TableSlot {
    i: 1,
    j: 1,
    terms: &[(21, &[4, 1, 1]), (-6, &[4, 2])],
};

pub const M3_02: TableSlot = TableSlot {
    i: 0,
    j: 2,
    terms: &[(1, &[6]), (-6, &[5, 1])],
};

pub const M3_21: TableSlot = TableSlot {
    i: 2,
    j: 1,
    terms: &[
        (154, &[1, 1, 1, 1, 1, 1]),
        (-462, &[2, 1, 1, 1, 1]),
        (172, &[3, 1, 1, 1]),
        (333, &[2, 2, 1, 1]),
        (-156, &[3, 2, 1]),
        (-33, &[2, 2, 2]),
        (12, &[3, 3]),
    ],
};

pub const M3_12: TableSlot = TableSlot {
    i: 1,
    j: 2,
    terms: &[(15, &[4, 2]), (-30, &[4, 1, 1])],
};

pub const M3_22: TableSlot = TableSlot {
    i: 2,
    j: 2,
    terms: &[
        (-120, &[1, 1, 1, 1, 1, 1]),
        (360, &[2, 1, 1, 1, 1]),
        (-120, &[3, 1, 1, 1]),
        (-270, &[2, 2, 1, 1]),
        (120, &[3, 2, 1]),
        (30, &[2, 2, 2]),
        (-10, &[3, 3]),
    ],
};

/// All printed `M^3` rows with the duplicated row at its printed `(1,0)`
/// position (the reading the closed-form display confirms).
pub const M3_PRINTED: &[TableSlot] = &[
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

// ---------------------------------------------------------------------------
// Closed-form displays: per-pattern rational coefficients.
// ---------------------------------------------------------------------------

/// One row of a closed-form display: the coefficient of the estimator with
/// the listed exponents is `numerator(n) / ((n-1)^i n^j)`.
#[derive(Clone, Copy)]
pub struct DisplayRow {
    pub exponents: &'static [u8],
    pub i: u8,
    pub j: u8,
    pub numerator: fn(i128) -> i128,
}

impl DisplayRow {
    pub fn coefficient(&self, n: usize) -> f64 {
        let nf = n as f64;
        (self.numerator)(n as i128) as f64
            / (powi(nf - 1.0, self.i as i32) * powi(nf, self.j as i32))
    }
}

/// Evaluate a closed-form display against a group table.
pub fn eval_display(rows: &[DisplayRow], table: &SymmetricMomentTable, n: usize) -> Result<f64> {
    let mut sum = NeumaierSum::new();
    for row in rows {
        let value = table.get_exponents(row.exponents).ok_or_else(|| {
            Error::InvalidParameter(alloc::format!(
                "estimator {:?} missing from group-{} table",
                row.exponents,
                table.group
            ))
        })?;
        sum.add(row.coefficient(n) * value);
    }
    Ok(sum.value())
}

/// The closed-form display of `E[s_n^6]` (printed under a mislabeled
/// eighth-moment heading; its degree-6 terms identify it).
pub const ES6_CLOSED: &[DisplayRow] = &[
    DisplayRow {
        exponents: &[1, 1, 1, 1, 1, 1],
        i: 2,
        j: 2,
        numerator: |n| -((n - 5) * (n - 4) * (n - 3) * (n - 2)),
    },
    DisplayRow {
        exponents: &[2, 1, 1, 1, 1],
        i: 2,
        j: 2,
        numerator: |n| 3 * (n - 5) * (n - 4) * (n - 3) * (n - 2),
    },
    DisplayRow {
        exponents: &[3, 1, 1, 1],
        i: 2,
        j: 2,
        numerator: |n| 4 * (n - 3) * (n - 2) * (3 * n - 5),
    },
    DisplayRow {
        exponents: &[2, 2, 1, 1],
        i: 2,
        j: 2,
        numerator: |n| -3 * (n - 3) * (n - 2) * (n * n - 6 * n + 15),
    },
    DisplayRow {
        exponents: &[4, 1, 1],
        i: 1,
        j: 2,
        numerator: |n| -3 * (n - 5) * (n - 2),
    },
    DisplayRow {
        exponents: &[3, 2, 1],
        i: 2,
        j: 2,
        numerator: |n| -12 * (n - 2) * (n * n - 4 * n + 5),
    },
    DisplayRow {
        exponents: &[5, 1],
        i: 0,
        j: 2,
        numerator: |_| -6,
    },
    DisplayRow {
        exponents: &[3, 3],
        i: 2,
        j: 2,
        numerator: |n| -2 * (3 * n * n - 6 * n + 5),
    },
    DisplayRow {
        exponents: &[4, 2],
        i: 1,
        j: 2,
        numerator: |n| 3 * (n * n - 2 * n + 5),
    },
    DisplayRow {
        exponents: &[6],
        i: 0,
        j: 2,
        numerator: |_| 1,
    },
    DisplayRow {
        exponents: &[2, 2, 2],
        i: 2,
        j: 2,
        numerator: |n| (n - 2) * (n * n * n - 3 * n * n + 9 * n - 15),
    },
];

/// The full closed-form display of `E[s_n^8]`.
pub const ES8_DISPLAY: &[DisplayRow] = &[
    DisplayRow {
        exponents: &[1, 1, 1, 1, 1, 1, 1, 1],
        i: 3,
        j: 3,
        numerator: |n| (n - 7) * (n - 6) * (n - 5) * (n - 4) * (n - 3) * (n - 2),
    },
    DisplayRow {
        exponents: &[2, 1, 1, 1, 1, 1, 1],
        i: 3,
        j: 3,
        numerator: |n| -4 * (n - 7) * (n - 6) * (n - 5) * (n - 4) * (n - 3) * (n - 2),
    },
    DisplayRow {
        exponents: &[3, 1, 1, 1, 1, 1],
        i: 3,
        j: 3,
        numerator: |n| -8 * (n - 5) * (n - 4) * (n - 3) * (n - 2) * (3 * n - 7),
    },
    DisplayRow {
        exponents: &[2, 2, 1, 1, 1, 1],
        i: 3,
        j: 3,
        numerator: |n| 6 * (n - 5) * (n - 4) * (n - 3) * (n - 2) * (n * n - 10 * n + 35),
    },
    DisplayRow {
        exponents: &[4, 1, 1, 1, 1],
        i: 3,
        j: 3,
        numerator: |n| 2 * (n - 4) * (n - 3) * (n - 2) * (3 * n * n - 30 * n + 35),
    },
    DisplayRow {
        exponents: &[3, 2, 1, 1, 1],
        i: 3,
        j: 3,
        numerator: |n| 16 * (n - 4) * (n - 3) * (n - 2) * (3 * n * n - 20 * n + 35),
    },
    DisplayRow {
        exponents: &[5, 1, 1, 1],
        i: 2,
        j: 3,
        numerator: |n| 8 * (n - 3) * (n - 2) * (3 * n - 7),
    },
    DisplayRow {
        exponents: &[2, 2, 2, 1, 1],
        i: 3,
        j: 3,
        numerator: |n| -4 * (n - 4) * (n - 3) * (n - 2) * (n * n * n - 9 * n * n + 45 * n - 105),
    },
    DisplayRow {
        exponents: &[3, 3, 1, 1],
        i: 3,
        j: 3,
        numerator: |n| 8 * (n - 3) * (n - 2) * (9 * n * n - 30 * n + 35),
    },
    DisplayRow {
        exponents: &[4, 2, 1, 1],
        i: 3,
        j: 3,
        numerator: |n| -12 * (n - 3) * (n - 2) * (n * n * n - 9 * n * n + 35 * n - 35),
    },
    DisplayRow {
        exponents: &[6, 1, 1],
        i: 1,
        j: 3,
        numerator: |n| -4 * (n - 7) * (n - 2),
    },
    DisplayRow {
        exponents: &[3, 2, 2, 1],
        i: 3,
        j: 3,
        numerator: |n| -24 * (n - 3) * (n - 2) * (n * n * n - 7 * n * n + 25 * n - 35),
    },
    DisplayRow {
        exponents: &[4, 3, 1],
        i: 3,
        j: 3,
        numerator: |n| -8 * (n - 2) * (3 * n * n * n - 21 * n * n + 45 * n - 35),
    },
    DisplayRow {
        exponents: &[5, 2, 1],
        i: 2,
        j: 3,
        numerator: |n| -24 * (n - 2) * (n * n - 4 * n + 7),
    },
    DisplayRow {
        exponents: &[7, 1],
        i: 0,
        j: 3,
        numerator: |_| -8,
    },
    DisplayRow {
        exponents: &[2, 2, 2, 2],
        i: 3,
        j: 3,
        numerator: |n| {
            (n - 3) * (n - 2) * (n * n * n * n - 4 * n * n * n + 18 * n * n - 60 * n + 105)
        },
    },
    DisplayRow {
        exponents: &[3, 3, 2],
        i: 3,
        j: 3,
        numerator: |n| -8 * (n - 2) * (3 * n * n * n - 15 * n * n + 35 * n - 35),
    },
    DisplayRow {
        exponents: &[4, 4],
        i: 3,
        j: 3,
        numerator: |n| 3 * n * n * n * n - 12 * n * n * n + 42 * n * n - 60 * n + 35,
    },
    DisplayRow {
        exponents: &[4, 2, 2],
        i: 3,
        j: 3,
        numerator: |n| 6 * (n - 2) * (n * n * n * n - 4 * n * n * n + 16 * n * n - 40 * n + 35),
    },
    DisplayRow {
        exponents: &[5, 3],
        i: 2,
        j: 3,
        numerator: |n| -8 * (3 * n * n - 6 * n + 7),
    },
    DisplayRow {
        exponents: &[6, 2],
        i: 1,
        j: 3,
        numerator: |n| 4 * (n * n - 2 * n + 7),
    },
    DisplayRow {
        exponents: &[8],
        i: 0,
        j: 3,
        numerator: |_| 1,
    },
];

/// Rational coefficient of one pattern across a set of regrouped slots, as
/// `(numerator(n), (n-1)^i n^j)` pairs collapsed over the common denominator
/// `(n-1)^imax n^jmax`. Used by the audits to compare tables exactly.
pub fn regrouped_numerator_at(
    slots: &[TableSlot],
    exponents: &[u8],
    n: i128,
    i_max: u8,
    j_max: u8,
) -> i128 {
    let mut key: Vec<u8> = exponents.to_vec();
    key.sort_unstable_by(|a, b| b.cmp(a));
    let mut total = 0i128;
    for slot in slots {
        for &(coeff, exps) in slot.terms {
            let mut other: Vec<u8> = exps.to_vec();
            other.sort_unstable_by(|a, b| b.cmp(a));
            if other == key {
                let scale = (n - 1).pow((i_max - slot.i) as u32) * n.pow((j_max - slot.j) as u32);
                total += coeff as i128 * scale;
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::ProcessModel;
    use crate::symmetric::build_tables;

    #[test]
    fn a2_slots_reduce_to_known_iid_variance() {
        // Var(s^2) = mu4/n - (n-3)/(n(n-1)) for zero-mean unit-variance iid.
        let model = ProcessModel::iid(vec![0.0, 1.0, 0.5, 2.9]).unwrap();
        let n = 9;
        let tables = build_tables(&model, n, 2).unwrap();
        let value = eval_regrouped(A2_SLOTS, &tables[1], n).unwrap();
        let nf = n as f64;
        let expected = 2.9 / nf - (nf - 3.0) / (nf * (nf - 1.0));
        assert!((value - expected).abs() < 1e-14);
    }

    #[test]
    fn es6_closed_matches_chi_squared_for_iid_normal() {
        let model = ProcessModel::iid_normal(1.0).unwrap();
        let n = 10;
        let tables = build_tables(&model, n, 3).unwrap();
        let value = eval_display(ES6_CLOSED, &tables[2], n).unwrap();
        assert!((value - 143.0 / 81.0).abs() < 1e-12, "{value}");
    }

    #[test]
    fn es8_display_matches_chi_squared_for_iid_normal() {
        let model = ProcessModel::iid_normal(1.0).unwrap();
        let n = 10;
        let tables = build_tables(&model, n, 4).unwrap();
        let value = eval_display(ES8_DISPLAY, &tables[3], n).unwrap();
        assert!((value - 2145.0 / 729.0).abs() < 1e-12, "{value}");
    }
}
