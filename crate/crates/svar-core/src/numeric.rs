//! Shared numeric kernels: compensated summation, adaptive quadrature and the
//! special functions needed by the Gamma reference and the normal series.
//!
//! All transcendental calls go through `libm` (the crate is `no_std`), which
//! also pins results to one implementation across platforms.

/// Kahan-Babuska (Neumaier) compensated accumulator.
///
/// Used everywhere a sum's value must not depend on how the term stream is
/// partitioned: the estimator enumerations, exact-law moments, Monte Carlo
/// power sums and the quadrature rules all accumulate through this.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if fabs(self.sum) >= fabs(value) {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Merge another accumulator (deterministic reduction step).
    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.compensation += other.compensation;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sum an iterator with compensation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for v in iter {
        acc.add(v);
    }
    acc.value()
}

#[inline]
pub fn fabs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Integer power by repeated multiplication (exact for exact inputs, no
/// libm rounding surprises for the small exponents used here).
pub fn powi(x: f64, mut n: i32) -> f64 {
    if n < 0 {
        return 1.0 / powi(x, -n);
    }
    let mut base = x;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

/// Relative-or-absolute closeness test: absolute tolerance `abs_tol` near
/// zero, relative tolerance `rel_tol` otherwise.
pub fn close(a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> bool {
    let diff = fabs(a - b);
    let scale = fabs(a).max(fabs(b));
    diff <= abs_tol || diff <= rel_tol * scale
}

pub const SQRT_2PI: f64 = 2.506628274631000502415765284811;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(z: f64) -> f64 {
    exp(-0.5 * z * z) / SQRT_2PI
}

/// Standard normal CDF via the complementary error function.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * core::f64::consts::FRAC_1_SQRT_2)
}

/// log Gamma(x), x > 0.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

const GAMMA_EPS: f64 = 1e-15;
const GAMMA_MAX_ITER: usize = 500;

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
///
/// Series expansion for x < a + 1, Lentz continued fraction for the
/// complement otherwise (the classic gammp/gammq split).
pub fn regularized_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        lower_gamma_series(a, x)
    } else {
        1.0 - upper_gamma_cf(a, x)
    }
}

fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if fabs(term) < fabs(sum) * GAMMA_EPS {
            break;
        }
    }
    sum * exp(-x + a * ln(x) - ln_gamma(a))
}

fn upper_gamma_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = b + an / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if fabs(delta - 1.0) < GAMMA_EPS {
            break;
        }
    }
    exp(-x + a * ln(x) - ln_gamma(a)) * h
}

/// Adaptive Simpson quadrature with an absolute error target.
///
/// The domain is first cut into 32 equal panels so a feature narrower than
/// the initial stencil cannot be skipped silently (densities integrated over
/// wide supports concentrate their mass in a few panels); each panel then
/// refines adaptively with the 1/15 Richardson correction.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> f64 {
    const PANELS: usize = 32;
    let step = (b - a) / PANELS as f64;
    let panel_tol = abs_tol / PANELS as f64;
    let mut total = NeumaierSum::new();
    for k in 0..PANELS {
        let lo = a + step * k as f64;
        let hi = if k + 1 == PANELS { b } else { lo + step };
        let flo = f(lo);
        let fhi = f(hi);
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let whole = simpson(lo, hi, flo, fmid, fhi);
        total.add(adaptive(f, lo, hi, flo, fmid, fhi, whole, panel_tol, 55));
    }
    total.value()
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || fabs(delta) <= 15.0 * abs_tol {
        left + right + delta / 15.0
    } else {
        let half_tol = 0.5 * abs_tol;
        adaptive(f, a, m, fa, flm, fm, left, half_tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, half_tol, depth - 1)
    }
}
