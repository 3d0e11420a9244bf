//! Exact expansion of powers of the sample variance into symmetric
//! estimators.
//!
//! Writing `A = sum_i X_i^2` and `B = sum_{i != j} X_i X_j`, the identity
//! `(n-1) n s_n^2 = (n-1) A - B` reduces `E[(s_n^2)^m]` to expectations of
//! products of distinct-index sums. Such products expand exactly over
//! "augmented monomials" `T(e_1..e_k) = sum over injective tuples of
//! prod X_{i_j}^{e_j}`: every pair of tuples corresponds to exactly one
//! injective partial matching of the factors, so
//!
//! ```text
//! T(e) * T(f) = sum over injective partial maps sigma: slots(f) -> slots(e)
//!               of T(merge_sigma(e, f))
//! ```
//!
//! with unit multiplicity per map. Expectations then read off as
//! `E[T(p)] = n(n-1)...(n-arity+1) * (mu'_p)_k`, giving the expansion of
//! `E[(s_n^2)^m]` with integer polynomial coefficients in n — derived here
//! from first principles rather than transcribed, so the moment route is
//! immune to table misprints. The printed tables live in [`crate::tables`]
//! and are diffed against this expansion in the test suite.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::numeric::NeumaierSum;
use crate::pattern::ExponentPattern;
use crate::process::{MomentCache, ProcessModel};
use crate::symmetric::{symmetric_moment_cached, SymmetricMomentTable};
use crate::Result;

/// Exponent multiset, sorted descending (canonical).
pub type Mono = Vec<u8>;

/// Integer linear combination of augmented monomials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MonoSum {
    terms: BTreeMap<Mono, i128>,
}

impl MonoSum {
    pub fn single(exponents: &[u8]) -> Self {
        let mut mono = exponents.to_vec();
        mono.sort_unstable_by(|a, b| b.cmp(a));
        let mut terms = BTreeMap::new();
        terms.insert(mono, 1);
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, i128)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, mono: &[u8]) -> i128 {
        let mut key = mono.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.terms.get(&key).copied().unwrap_or(0)
    }

    /// Product via injective partial matchings of factor slots.
    pub fn product(&self, other: &MonoSum) -> MonoSum {
        let mut out = BTreeMap::new();
        for (e, ce) in &self.terms {
            for (f, cf) in &other.terms {
                let coeff = ce * cf;
                let mut used = vec![false; e.len()];
                let mut merged: Vec<u8> = e.clone();
                let mut extra: Vec<u8> = Vec::new();
                merge_recurse(e, f, 0, &mut used, &mut merged, &mut extra, coeff, &mut out);
            }
        }
        MonoSum { terms: out }
    }
}

#[allow(clippy::too_many_arguments)]
fn merge_recurse(
    e: &[u8],
    f: &[u8],
    slot: usize,
    used: &mut [bool],
    merged: &mut Vec<u8>,
    extra: &mut Vec<u8>,
    coeff: i128,
    out: &mut BTreeMap<Mono, i128>,
) {
    if slot == f.len() {
        let mut mono: Mono = merged.iter().copied().chain(extra.iter().copied()).collect();
        mono.sort_unstable_by(|a, b| b.cmp(a));
        *out.entry(mono).or_insert(0) += coeff;
        return;
    }
    // The slot joins a fresh index...
    extra.push(f[slot]);
    merge_recurse(e, f, slot + 1, used, merged, extra, coeff, out);
    extra.pop();
    // ...or merges onto any unused slot of e.
    for target in 0..e.len() {
        if used[target] {
            continue;
        }
        used[target] = true;
        merged[target] += f[slot];
        merge_recurse(e, f, slot + 1, used, merged, extra, coeff, out);
        merged[target] -= f[slot];
        used[target] = false;
    }
}

/// Polynomial in n with integer coefficients, ascending powers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<i128>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: i128) -> Self {
        Poly(vec![c])
    }

    /// (n - 1)^k expanded binomially.
    pub fn n_minus_one_pow(k: u32) -> Self {
        let mut poly = Poly(vec![1]);
        for _ in 0..k {
            let mut next = vec![0; poly.0.len() + 1];
            for (i, &c) in poly.0.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c;
            }
            poly = Poly(next);
        }
        poly
    }

    pub fn add_scaled(&mut self, other: &Poly, scale: i128) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (i, &c) in other.0.iter().enumerate() {
            self.0[i] += scale * c;
        }
    }

    pub fn eval_i128(&self, n: i128) -> i128 {
        let mut acc = 0i128;
        for &c in self.0.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }
}

/// The exact expansion of `E[(n (n-1) s_n^2)^m]` as
/// `sum_p poly_p(n) * E[T(p)]`.
#[derive(Debug, Clone)]
pub struct VariancePowerExpansion {
    m: u32,
    terms: Vec<(Mono, Poly)>,
}

impl VariancePowerExpansion {
    /// Expand `((n-1) A - B)^m` for m in 1..=4.
    pub fn new(m: u32) -> Self {
        assert!((1..=4).contains(&m), "powers 1..=4 only");
        let a = MonoSum::single(&[2]);
        let b = MonoSum::single(&[1, 1]);
        let mut a_pows = vec![MonoSum::single(&[])];
        let mut b_pows = vec![MonoSum::single(&[])];
        for k in 1..=m as usize {
            a_pows.push(a_pows[k - 1].product(&a));
            b_pows.push(b_pows[k - 1].product(&b));
        }
        let mut collected: BTreeMap<Mono, Poly> = BTreeMap::new();
        for k in 0..=m {
            // C(m,k) (n-1)^k A^k (-B)^{m-k}
            let sign = if (m - k).is_multiple_of(2) { 1 } else { -1 };
            let scale = binomial_i128(m, k) * sign;
            let prefactor = Poly::n_minus_one_pow(k);
            let prod = a_pows[k as usize].product(&b_pows[(m - k) as usize]);
            for (mono, coeff) in prod.terms() {
                collected
                    .entry(mono.clone())
                    .or_insert_with(Poly::zero)
                    .add_scaled(&prefactor, scale * coeff);
            }
        }
        let terms = collected
            .into_iter()
            .filter(|(_, poly)| poly.0.iter().any(|&c| c != 0))
            .collect();
        Self { m, terms }
    }

    pub fn power(&self) -> u32 {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Poly)> {
        self.terms.iter().map(|(m, p)| (m, p))
    }

    /// Numerator of the coefficient of estimator `mono` at integer n, over
    /// the common denominator `n^m (n-1)^m`:
    /// `poly_mono(n) * n(n-1)...(n-arity+1)`.
    pub fn coefficient_numerator_at(&self, mono: &[u8], n: i128) -> i128 {
        let mut key = mono.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        let Some((_, poly)) = self.terms.iter().find(|(m, _)| *m == key) else {
            return 0;
        };
        let mut falling = 1i128;
        for i in 0..key.len() as i128 {
            falling *= n - i;
        }
        poly.eval_i128(n) * falling
    }

    /// `E[(s_n^2)^m]` from a prebuilt group-m table.
    pub fn evaluate_with_table(&self, table: &SymmetricMomentTable) -> Result<f64> {
        let n = table.n;
        self.evaluate_impl(n, |pattern| {
            table.get(pattern).ok_or_else(|| {
                Error::InvalidParameter(alloc::format!("pattern {pattern} missing from table"))
            })
        })
    }

    /// `E[(s_n^2)^m]` straight from a model.
    pub fn evaluate(&self, model: &ProcessModel, n: usize) -> Result<f64> {
        let mut cache = MomentCache::new();
        self.evaluate_impl(n, |pattern| {
            symmetric_moment_cached(model, pattern, n, &mut cache)
        })
    }

    fn evaluate_impl<F>(&self, n: usize, mut estimator: F) -> Result<f64>
    where
        F: FnMut(&ExponentPattern) -> Result<f64>,
    {
        if n < 2 * self.m as usize {
            return Err(Error::InsufficientSampleSize {
                needed: 2 * self.m as usize,
                got: n,
            });
        }
        let n_i = n as i128;
        let mut denominator = 1i128;
        for _ in 0..self.m {
            denominator *= n_i * (n_i - 1);
        }
        let mut sum = NeumaierSum::new();
        for (mono, _) in &self.terms {
            let pattern = ExponentPattern::new(mono.clone())?;
            let numerator = self.coefficient_numerator_at(mono, n_i);
            if numerator == 0 {
                continue;
            }
            let value = estimator(&pattern)?;
            sum.add((numerator as f64 / denominator as f64) * value);
        }
        Ok(sum.value())
    }
}

fn binomial_i128(n: u32, k: u32) -> i128 {
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}
