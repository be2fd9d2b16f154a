//! Truncated Laurent series in one formal variable, and coefficient tables of
//! two-variable expansions in `w/z`.
//!
//! A [`LaurentSeries`] with window `[lo, hi]` stands for
//! `x^e * sum_{k >= lo} c_k x^k` where the coefficients below `lo` are exactly
//! zero and those above `hi` are unknown. The overall exponent `e` absorbs
//! non-integer monomials so the table stays integer keyed.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::report::{scaled_residual, CheckReport, Location, ParamRecord, TruncationRecord, WorstTracker};

const MONOMIAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    exponent: Complex64,
    lo: i64,
    hi: i64,
    coeffs: BTreeMap<i64, Complex64>,
}

impl LaurentSeries {
    pub fn zero(lo: i64, hi: i64) -> Self {
        Self {
            exponent: Complex64::new(0.0, 0.0),
            lo,
            hi,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant series 1 known up to order `hi`.
    pub fn one(hi: i64) -> Self {
        Self::from_coeffs(0, hi, [(0, Complex64::new(1.0, 0.0))])
    }

    /// Builds a series on `[lo, hi]`; entries outside the window and exact zeros are dropped.
    pub fn from_coeffs(lo: i64, hi: i64, entries: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut s = Self::zero(lo, hi);
        for (k, c) in entries {
            s.add_at(k, c);
        }
        s
    }

    /// Power series `sum_{k=0}^{n} c_k x^k` from a dense coefficient slice.
    pub fn from_dense(coeffs: &[Complex64]) -> Self {
        let hi = coeffs.len() as i64 - 1;
        Self::from_coeffs(0, hi, coeffs.iter().enumerate().map(|(k, c)| (k as i64, *c)))
    }

    pub fn with_exponent(mut self, exponent: Complex64) -> Self {
        self.exponent = exponent;
        self
    }

    pub fn exponent(&self) -> Complex64 {
        self.exponent
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }

    fn add_at(&mut self, k: i64, c: Complex64) {
        if k < self.lo || k > self.hi || c == Complex64::new(0.0, 0.0) {
            return;
        }
        let slot = self.coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&k);
        }
    }

    /// Coefficient of `x^{e+k}`; zero below the window, an error above it.
    pub fn coeff(&self, k: i64) -> Result<Complex64> {
        if k > self.hi {
            return Err(Error::WindowUnderflow { lo: self.lo, hi: self.hi });
        }
        Ok(self.coeffs.get(&k).copied().unwrap_or_default())
    }

    /// Dense coefficients `c_0 .. c_hi` (requires `lo >= 0`).
    pub fn dense(&self) -> Vec<Complex64> {
        (0..=self.hi.max(-1)).map(|k| self.coeffs.get(&k).copied().unwrap_or_default()).collect()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::zero(self.lo, self.hi).with_exponent(self.exponent);
        for (k, c) in self.iter() {
            out.add_at(k, c * factor);
        }
        out
    }

    /// Truncates the known range to `hi` (never extends it).
    pub fn truncate(&self, hi: i64) -> Self {
        let hi = hi.min(self.hi);
        Self::from_coeffs(self.lo, hi, self.iter()).with_exponent(self.exponent)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_exponent(other)?;
        let lo = self.lo.min(other.lo);
        let hi = self.hi.min(other.hi);
        if hi < lo {
            return Err(Error::WindowUnderflow { lo, hi });
        }
        let mut out = Self::zero(lo, hi).with_exponent(self.exponent);
        for (k, c) in self.iter().chain(other.iter()) {
            out.add_at(k, c);
        }
        Ok(out)
    }

    /// Cauchy product. The known range of the product is
    /// `[lo_a + lo_b, min(hi_a + lo_b, hi_b + lo_a)]`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let lo = self.lo + other.lo;
        let hi = (self.hi + other.lo).min(other.hi + self.lo);
        if hi < lo {
            return Err(Error::WindowUnderflow { lo, hi });
        }
        let mut out = Self::zero(lo, hi).with_exponent(self.exponent + other.exponent);
        for (i, a) in self.iter() {
            for (j, b) in other.iter() {
                if i + j > hi {
                    break;
                }
                out.add_at(i + j, a * b);
            }
        }
        Ok(out)
    }

    /// Reciprocal by recursive division; the coefficient at `lo` must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.coeffs.get(&self.lo).copied().unwrap_or_default();
        if a0.norm() == 0.0 {
            return Err(Error::Pole(format!("series has vanishing leading coefficient at order {}", self.lo)));
        }
        let len = (self.hi - self.lo) as usize;
        let a: Vec<Complex64> = (0..=len as i64)
            .map(|j| self.coeffs.get(&(self.lo + j)).copied().unwrap_or_default())
            .collect();
        let mut b = vec![Complex64::new(0.0, 0.0); len + 1];
        b[0] = 1.0 / a0;
        for k in 1..=len {
            let acc: Complex64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -acc / a0;
        }
        let lo = -self.lo;
        Ok(Self::from_coeffs(lo, lo + len as i64, b.into_iter().enumerate().map(|(j, c)| (lo + j as i64, c)))
            .with_exponent(-self.exponent))
    }

    /// Numerical value at `x` from the stored coefficients (principal branch for `x^e`).
    pub fn evaluate(&self, x: Complex64) -> Complex64 {
        let body: Complex64 = self.iter().map(|(k, c)| c * x.powi(k as i32)).sum();
        if self.exponent == Complex64::new(0.0, 0.0) {
            body
        } else {
            body * (self.exponent * x.ln()).exp()
        }
    }

    fn check_exponent(&self, other: &Self) -> Result<()> {
        if (self.exponent - other.exponent).norm() > MONOMIAL_TOL {
            return Err(Error::Monomial(format!(
                "series exponents differ: {} vs {}",
                self.exponent, other.exponent
            )));
        }
        Ok(())
    }
}

/// `exp(sum_{n=1}^{order} c_n x^n)` as a power series known to `order`.
pub fn series_exp(log_coeffs: impl Fn(i64) -> Complex64, order: i64) -> LaurentSeries {
    let order = order.max(0);
    let a: Vec<Complex64> = (1..=order).map(&log_coeffs).collect();
    let mut e = vec![Complex64::new(0.0, 0.0); order as usize + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for k in 1..=order as usize {
        let acc: Complex64 = (1..=k).map(|j| (j as f64) * a[j - 1] * e[k - j]).sum();
        e[k] = acc / k as f64;
    }
    LaurentSeries::from_dense(&e)
}

/// Coefficients of a two-variable expansion `z^{a} w^{b} sum_k c_k (w/z)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub z_exponent: Complex64,
    pub w_exponent: Complex64,
    pub entries: BTreeMap<i64, Complex64>,
}

impl CoeffTable {
    pub fn new(z_exponent: Complex64, w_exponent: Complex64) -> Self {
        Self {
            z_exponent,
            w_exponent,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.entries.get(&k).copied().unwrap_or_default()
    }

    pub fn add(&mut self, k: i64, c: Complex64) {
        *self.entries.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn same_monomial(&self, other: &Self) -> bool {
        (self.z_exponent - other.z_exponent).norm() <= MONOMIAL_TOL
            && (self.w_exponent - other.w_exponent).norm() <= MONOMIAL_TOL
    }

    /// Largest scaled mismatch over the union of keys, with its key.
    pub fn compare(&self, other: &Self) -> Result<(f64, i64)> {
        if !self.same_monomial(other) {
            return Err(Error::Monomial(format!(
                "monomials z^{} w^{} and z^{} w^{} differ",
                self.z_exponent, self.w_exponent, other.z_exponent, other.w_exponent
            )));
        }
        let mut worst = (0.0, 0);
        for k in self.entries.keys().chain(other.entries.keys()) {
            let r = scaled_residual(self.get(*k), other.get(*k));
            if r > worst.0 {
                worst = (r, *k);
            }
        }
        Ok(worst)
    }
}

/// Checks, coefficient by coefficient over powers `-window..=window`,
/// `E1(x) - (-x)^{m-1} prod r_i E2(1/x) = prod (1 - r_i) delta(x)` with
/// `E1(x) = exp(sum (1/n)(1 - sum r_i^n) x^n)` and
/// `E2(y) = exp(sum (1/n)(1 - sum r_i^{-n}) y^n)`, each expanded in its own domain.
// exp(sum_n (1/n)(1 - sum_i r_i^n) x^n) as exp(sum x^n/n) * prod_i exp(-sum (r_i x)^n/n).
// Each factor is expanded in its own variable u = r_i x, where the recursion is
// well conditioned, and rescaled by r_i^k; a single expansion with log
// coefficients r_i^n loses all precision once some |r_i| is far from 1.
fn power_sum_exp(r: &[Complex64], order: i64) -> Result<LaurentSeries> {
    let mut acc = series_exp(|n| Complex64::new(1.0 / n as f64, 0.0), order);
    let neg = series_exp(|n| Complex64::new(-1.0 / n as f64, 0.0), order);
    for &x in r {
        let factor = LaurentSeries::from_coeffs(0, order, neg.iter().map(|(k, c)| (k, c * x.powi(k as i32))));
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

pub fn check_delta_identity(r: &[Complex64], window: i64, tol: f64) -> Result<CheckReport> {
    if r.is_empty() {
        return Err(Error::InvalidArgument("delta identity needs at least one r_i".into()));
    }
    if r.iter().any(|x| x.norm() == 0.0) {
        return Err(Error::InvalidArgument("delta identity requires every r_i != 0".into()));
    }
    let m = r.len() as i64;
    let order = window + m;
    let e1 = power_sum_exp(r, order)?;
    let inv: Vec<Complex64> = r.iter().map(|x| 1.0 / x).collect();
    let e2 = power_sum_exp(&inv, order)?;
    let prod_r: Complex64 = r.iter().product();
    let sign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let rhs: Complex64 = r.iter().map(|x| 1.0 - x).product();
    let mut worst = WorstTracker::default();
    for n in -window..=window {
        let first = if n >= 0 { e1.coeff(n)? } else { Complex64::new(0.0, 0.0) };
        let j = m - 1 - n;
        let second = if j >= 0 { sign * prod_r * e2.coeff(j)? } else { Complex64::new(0.0, 0.0) };
        let res = scaled_residual(first - second, rhs);
        worst.observe(res, || Location {
            bra: format!("r = {r:?}"),
            ket: String::new(),
            power: n,
        });
    }
    Ok(CheckReport::judged(
        "delta-identity",
        worst.residual,
        tol,
        worst.location,
        ParamRecord::default(),
        TruncationRecord {
            degree: None,
            window: Some(window),
        },
    ))
}
