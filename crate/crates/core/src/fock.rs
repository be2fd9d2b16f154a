//! Heisenberg modes, charged Fock states and exponential vertex operators.
//!
//! The Fock module is realised on polynomials in power sums: `h_{-n}` acts by
//! multiplication with `p_n` and `h_n` by `c_n d/dp_n`, where
//! `c_n = [h_n, h_{-n}]`. A state of degree `d` is a combination of monomials
//! `p_lambda` over partitions of `d`. Operators are stored as coefficient
//! matrices in this monomial basis, which needs no Gram inversion and stays
//! valid at degenerate points where some `c_n` vanish.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qspecial::QParams;
use crate::series::{series_exp, CoeffTable, LaurentSeries};

/// `[h_0, Q_h]`.
pub const ZERO_MODE_COMMUTATOR: f64 = 0.5;

const MOMENTUM_TOL: f64 = 1e-12;

/// `c_n = [h_n, h_{-n}] = (1/n)(q^{n/2}-q^{-n/2})(t^{n/2}-t^{-n/2})/(p^{n/2}+p^{-n/2})`, `n != 0`.
pub fn heisenberg_coefficient(n: i64, params: &QParams) -> Complex64 {
    let nf = n as f64;
    let two_sinh = |l: Complex64| 2.0 * (nf * l / 2.0).sinh();
    two_sinh(params.log_q()) * two_sinh(params.log_t()) / (2.0 * (nf * params.log_p() / 2.0).cosh()) / nf
}

/// `[h_n, h_m]`.
pub fn mode_commutator(n: i64, m: i64, params: &QParams) -> Complex64 {
    if n == 0 || n + m != 0 {
        Complex64::new(0.0, 0.0)
    } else {
        heisenberg_coefficient(n, params)
    }
}

/// A partition stored with weakly decreasing parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument("partition parts must be >= 1".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    /// `m[k]` is the number of parts equal to `k` (index 0 unused).
    pub fn multiplicities(&self, max_part: usize) -> Vec<u32> {
        let mut m = vec![0u32; max_part + 1];
        for &p in &self.0 {
            m[p as usize] += 1;
        }
        m
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// All partitions of `d`, largest first part first.
pub fn partitions(d: usize) -> Vec<Partition> {
    fn rec(d: usize, max: usize, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if d == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for k in (1..=d.min(max)).rev() {
            prefix.push(k as u32);
            rec(d - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// Partitions of every degree up to a cap, with index lookup.
#[derive(Debug, Clone)]
pub struct PartitionBasis {
    by_degree: Vec<Vec<Partition>>,
    index: Vec<HashMap<Partition, usize>>,
}

impl PartitionBasis {
    pub fn new(max_degree: usize) -> Self {
        let by_degree: Vec<Vec<Partition>> = (0..=max_degree).map(partitions).collect();
        let index = by_degree
            .iter()
            .map(|ps| ps.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect())
            .collect();
        Self { by_degree, index }
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len() - 1
    }

    pub fn degree(&self, d: usize) -> &[Partition] {
        &self.by_degree[d]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p.degree())?.get(p).copied()
    }
}

/// A charged Fock state `|m; lambda> = prod h_{-lambda_i} |m>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub momentum: Complex64,
    pub partition: Partition,
}

impl FockState {
    pub fn new(momentum: impl Into<Complex64>, partition: Partition) -> Self {
        Self {
            momentum: momentum.into(),
            partition,
        }
    }

    pub fn vacuum(momentum: impl Into<Complex64>) -> Self {
        Self::new(momentum, Partition::empty())
    }

    pub fn degree(&self) -> usize {
        self.partition.degree()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}; {}>", fmt_momentum(self.momentum), self.partition)
    }
}

fn fmt_momentum(m: Complex64) -> String {
    if m.im == 0.0 {
        format!("{}", m.re)
    } else {
        format!("{m}")
    }
}

/// `<lambda|lambda> = prod_k c_k^{m_k} m_k!`; zero for different partitions or momenta.
pub fn inner_product(bra: &FockState, ket: &FockState, params: &QParams) -> Complex64 {
    if (bra.momentum - ket.momentum).norm() > MOMENTUM_TOL || bra.partition != ket.partition {
        return Complex64::new(0.0, 0.0);
    }
    state_norm(&ket.partition, params)
}

fn state_norm(p: &Partition, params: &QParams) -> Complex64 {
    let mult = p.multiplicities(p.parts().first().copied().unwrap_or(0) as usize);
    let mut acc = Complex64::new(1.0, 0.0);
    for (k, &m) in mult.iter().enumerate().skip(1) {
        if m > 0 {
            let ck = heisenberg_coefficient(k as i64, params);
            acc *= ck.powi(m as i32) * factorial(m);
        }
    }
    acc
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

pub type ModeFn = Arc<dyn Fn(i64) -> Complex64 + Send + Sync>;

/// `s * exp(sum_{n<0} A_n h_n z^{-n}) exp(sum_{n>0} A_n h_n z^{-n}) e^{c Q} z^{gamma h_0} e^{kappa h_0}`.
#[derive(Clone)]
pub struct NormalOrderedVertex {
    modes: ModeFn,
    pub charge: Complex64,
    pub h0_power: Complex64,
    pub zero_mode_log: Complex64,
    pub scalar: Complex64,
    pub label: String,
}

impl fmt::Debug for NormalOrderedVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormalOrderedVertex")
            .field("label", &self.label)
            .field("A[-1]", &self.mode(-1))
            .field("A[1]", &self.mode(1))
            .field("charge", &self.charge)
            .field("h0_power", &self.h0_power)
            .field("zero_mode_log", &self.zero_mode_log)
            .field("scalar", &self.scalar)
            .finish()
    }
}

impl NormalOrderedVertex {
    pub fn new(label: impl Into<String>, modes: impl Fn(i64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            modes: Arc::new(modes),
            charge: Complex64::new(0.0, 0.0),
            h0_power: Complex64::new(0.0, 0.0),
            zero_mode_log: Complex64::new(0.0, 0.0),
            scalar: Complex64::new(1.0, 0.0),
            label: label.into(),
        }
    }

    /// The identity operator.
    pub fn identity() -> Self {
        Self::new("1", |_| Complex64::new(0.0, 0.0))
    }

    pub fn with_charge(mut self, charge: Complex64, h0_power: Complex64) -> Self {
        self.charge = charge;
        self.h0_power = h0_power;
        self
    }

    pub fn with_zero_mode_log(mut self, kappa: Complex64) -> Self {
        self.zero_mode_log = kappa;
        self
    }

    pub fn with_scalar(mut self, scalar: Complex64) -> Self {
        self.scalar = scalar;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `A_n` (the value at `n = 0` is ignored by every consumer).
    pub fn mode(&self, n: i64) -> Complex64 {
        (self.modes)(n)
    }

    /// Data change under `(q,t) -> (1/q,1/t)` after the parameters were mapped: `A_n -> -A_n`.
    pub fn flip_theta(&self) -> Self {
        let m = self.modes.clone();
        Self {
            modes: Arc::new(move |n| -m(n)),
            ..self.clone()
        }
    }

    /// Data change under `h_n -> -h_n`, `Q_h -> -Q_h` after `q <-> t` was applied to the parameters.
    pub fn flip_omega(&self) -> Self {
        let m = self.modes.clone();
        Self {
            modes: Arc::new(move |n| -m(n)),
            charge: -self.charge,
            h0_power: -self.h0_power,
            zero_mode_log: -self.zero_mode_log,
            ..self.clone()
        }
    }

    /// Data of `X(xi z)` given `log xi`.
    pub fn shifted(&self, log_xi: Complex64) -> Self {
        if log_xi == Complex64::new(0.0, 0.0) {
            return self.clone();
        }
        let m = self.modes.clone();
        Self {
            modes: Arc::new(move |n| m(n) * (-(n as f64) * log_xi).exp()),
            zero_mode_log: self.zero_mode_log + self.h0_power * log_xi,
            ..self.clone()
        }
    }

    /// Data of the normal-ordered product `:X(z) Y(z):`.
    pub fn normal_product(&self, other: &Self) -> Self {
        let (a, b) = (self.modes.clone(), other.modes.clone());
        Self {
            modes: Arc::new(move |n| a(n) + b(n)),
            charge: self.charge + other.charge,
            h0_power: self.h0_power + other.h0_power,
            zero_mode_log: self.zero_mode_log + other.zero_mode_log,
            scalar: self.scalar * other.scalar,
            label: format!(":{} {}:", self.label, other.label),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            scalar: self.scalar * factor,
            ..self.clone()
        }
    }

    /// `s e^{kappa m}`, the zero-mode factor on momentum `m` apart from `z^{gamma m}`.
    pub fn zero_mode_factor(&self, momentum: Complex64) -> Complex64 {
        self.scalar * (self.zero_mode_log * momentum).exp()
    }

    /// Largest scaled difference of the data, comparing modes `1 <= |n| <= n_max`.
    pub fn distance(&self, other: &Self, n_max: i64) -> f64 {
        let mut worst: f64 = 0.0;
        let mut see = |a: Complex64, b: Complex64| {
            worst = worst.max(crate::report::scaled_residual(a, b));
        };
        for n in (-n_max..=n_max).filter(|n| *n != 0) {
            see(self.mode(n), other.mode(n));
        }
        see(self.charge, other.charge);
        see(self.h0_power, other.h0_power);
        see(self.zero_mode_log, other.zero_mode_log);
        see(self.scalar, other.scalar);
        worst
    }
}

/// Coefficient matrices of a vertex operator between degree blocks.
///
/// `block(d_out, d_in)` is the part of the operator mapping degree `d_in` to
/// degree `d_out` (the mode `X_{d_in - d_out}`), with rows and columns indexed
/// by [`partitions`] and the zero-mode factors excluded.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    vertex: NormalOrderedVertex,
    blocks: Vec<Vec<DMatrix<Complex64>>>,
}

impl ModeOperator {
    pub fn new(vertex: &NormalOrderedVertex, params: &QParams, basis: &PartitionBasis) -> Self {
        let dmax = basis.max_degree();
        let a_pos: Vec<Complex64> = (0..=dmax as i64).map(|k| if k == 0 { Complex64::default() } else { vertex.mode(k) }).collect();
        let a_neg: Vec<Complex64> = (0..=dmax as i64).map(|k| if k == 0 { Complex64::default() } else { vertex.mode(-k) }).collect();
        let ck: Vec<Complex64> = (0..=dmax as i64)
            .map(|k| if k == 0 { Complex64::default() } else { heisenberg_coefficient(k, params) })
            .collect();
        let mults: Vec<Vec<Vec<u32>>> = (0..=dmax)
            .map(|d| basis.degree(d).iter().map(|p| p.multiplicities(dmax)).collect())
            .collect();
        let mut blocks = Vec::with_capacity(dmax + 1);
        for d_out in 0..=dmax {
            let mut row = Vec::with_capacity(dmax + 1);
            for d_in in 0..=dmax {
                let (outs, ins) = (&mults[d_out], &mults[d_in]);
                let m = DMatrix::from_fn(outs.len(), ins.len(), |i, j| {
                    let (mu, la) = (&outs[i], &ins[j]);
                    let mut val = Complex64::new(1.0, 0.0);
                    for k in 1..=dmax {
                        let (a, b) = (la[k], mu[k]);
                        if a == 0 && b == 0 {
                            continue;
                        }
                        let down = a_pos[k] * ck[k];
                        let mut s = Complex64::new(0.0, 0.0);
                        for jj in 0..=a.min(b) {
                            s += binomial(a, jj) * down.powi((a - jj) as i32) * a_neg[k].powi((b - jj) as i32)
                                / factorial(b - jj);
                        }
                        val *= s;
                        if val == Complex64::new(0.0, 0.0) {
                            break;
                        }
                    }
                    val
                });
                row.push(m);
            }
            blocks.push(row);
        }
        Self {
            vertex: vertex.clone(),
            blocks,
        }
    }

    pub fn vertex(&self) -> &NormalOrderedVertex {
        &self.vertex
    }

    pub fn max_degree(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, d_out: usize, d_in: usize) -> Result<&DMatrix<Complex64>> {
        self.blocks
            .get(d_out)
            .and_then(|r| r.get(d_in))
            .ok_or_else(|| Error::InvalidArgument(format!("degree block ({d_out}, {d_in}) exceeds the basis")))
    }

    /// Full coefficient block including `s e^{kappa m}` (the monomial `z^{gamma m - (d_in - d_out)}` is implied).
    pub fn element(&self, momentum: Complex64, d_ket: usize, d_bra: usize) -> Result<DMatrix<Complex64>> {
        Ok(self.block(d_bra, d_ket)? * self.vertex.zero_mode_factor(momentum))
    }
}

/// Coefficient of `(w/z)^a` in `<bra| X(z) Y(w) |ket>` on ket momentum `m`,
/// with the monomial `z^{gamma_X (m + c_Y/2)} w^{gamma_Y m - (d_ket - d_bra)}` factored out.
/// `None` when the coefficient vanishes identically.
pub fn direct_pair(
    x: &ModeOperator,
    y: &ModeOperator,
    m: Complex64,
    d_ket: usize,
    d_bra: usize,
    a: i64,
) -> Result<Option<DMatrix<Complex64>>> {
    let mid = d_bra as i64 + a;
    if mid < 0 {
        return Ok(None);
    }
    let mid = mid as usize;
    let (xv, yv) = (x.vertex(), y.vertex());
    let pref = xv.zero_mode_factor(m + yv.charge * ZERO_MODE_COMMUTATOR) * yv.zero_mode_factor(m);
    Ok(Some(x.block(d_bra, mid)? * y.block(mid, d_ket)? * pref))
}

/// Coefficient of `(w/z)^a` in `<bra| Y(w) X(z) |ket>`, with the monomial
/// `z^{gamma_X m} w^{gamma_Y (m + c_X/2) - (d_ket - d_bra)}` factored out.
pub fn exchanged_pair(
    x: &ModeOperator,
    y: &ModeOperator,
    m: Complex64,
    d_ket: usize,
    d_bra: usize,
    a: i64,
) -> Result<Option<DMatrix<Complex64>>> {
    let mid = d_ket as i64 - a;
    if mid < 0 {
        return Ok(None);
    }
    let mid = mid as usize;
    let (xv, yv) = (x.vertex(), y.vertex());
    let pref = xv.zero_mode_factor(m) * yv.zero_mode_factor(m + xv.charge * ZERO_MODE_COMMUTATOR);
    Ok(Some(y.block(d_bra, mid)? * x.block(mid, d_ket)? * pref))
}

/// Scalar factor produced by normal ordering `X(z) Y(w)`:
/// `z^{left_exponent} * constant * series(w/z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contraction {
    pub series: LaurentSeries,
    pub left_exponent: Complex64,
    pub constant: Complex64,
}

/// Wick contraction `X(z) Y(w) = contraction * :X(z) Y(w):`, with the series
/// `exp(sum_{n>0} A^X_n A^Y_{-n} c_n (w/z)^n)` known to `order`.
pub fn contract(x: &NormalOrderedVertex, y: &NormalOrderedVertex, params: &QParams, order: i64) -> Contraction {
    let series = series_exp(|n| x.mode(n) * y.mode(-n) * heisenberg_coefficient(n, params), order);
    Contraction {
        series,
        left_exponent: x.h0_power * y.charge * ZERO_MODE_COMMUTATOR,
        constant: (x.zero_mode_log * y.charge * ZERO_MODE_COMMUTATOR).exp(),
    }
}

/// A factor `X(xi * z_v)` of an operator product.
#[derive(Debug, Clone)]
pub struct Factor {
    pub vertex: NormalOrderedVertex,
    pub variable: usize,
    pub log_shift: Complex64,
}

impl Factor {
    pub fn at(vertex: NormalOrderedVertex, variable: usize) -> Self {
        Self {
            vertex,
            variable,
            log_shift: Complex64::new(0.0, 0.0),
        }
    }

    pub fn shifted(vertex: NormalOrderedVertex, variable: usize, log_shift: Complex64) -> Self {
        Self {
            vertex,
            variable,
            log_shift,
        }
    }

    /// Data of the factor as a function of its bare variable.
    pub fn data(&self) -> NormalOrderedVertex {
        self.vertex.shifted(self.log_shift)
    }
}

/// A pairwise contraction between factors `left < right` of a product.
#[derive(Debug, Clone)]
pub struct PairContraction {
    pub left: usize,
    pub right: usize,
    pub contraction: Contraction,
}

/// An ordered product of vertex operators together with the contraction
/// factors that relate it to its normal-ordered form.
#[derive(Debug, Clone)]
pub struct OperatorProduct {
    pub factors: Vec<Factor>,
    pub contractions: Vec<PairContraction>,
}

impl OperatorProduct {
    /// The normal-ordered part as a single vertex; all factors must share one variable.
    pub fn normal_ordered_vertex(&self) -> Result<NormalOrderedVertex> {
        let Some(first) = self.factors.first() else {
            return Ok(NormalOrderedVertex::identity());
        };
        if self.factors.iter().any(|f| f.variable != first.variable) {
            return Err(Error::InvalidArgument(
                "normal-ordered vertex data needs all factors on one variable".into(),
            ));
        }
        let mut acc = first.data();
        for f in &self.factors[1..] {
            acc = acc.normal_product(&f.data());
        }
        Ok(acc)
    }
}

/// Normal orders a product, recording the contraction of every ordered pair.
pub fn normal_order(factors: Vec<Factor>, params: &QParams, order: i64) -> Result<OperatorProduct> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("normal ordering needs at least one factor".into()));
    }
    let data: Vec<NormalOrderedVertex> = factors.iter().map(Factor::data).collect();
    let mut contractions = Vec::new();
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            contractions.push(PairContraction {
                left: i,
                right: j,
                contraction: contract(&data[i], &data[j], params, order),
            });
        }
    }
    Ok(OperatorProduct { factors, contractions })
}

/// `<bra| prod |ket>` as a coefficient table in `w/z` (variables 0 = z, 1 = w).
///
/// Supports the empty product, one factor, or two factors on distinct
/// variables in either order; larger products are rejected. Entries run over
/// the powers `-window..=window` that the grading allows.
pub fn matrix_element(
    prod: &OperatorProduct,
    bra: &FockState,
    ket: &FockState,
    window: i64,
    params: &QParams,
) -> Result<CoeffTable> {
    let zero = Complex64::new(0.0, 0.0);
    let total_charge: Complex64 = prod.factors.iter().map(|f| f.vertex.charge).sum();
    let (d_bra, d_ket) = (bra.degree(), ket.degree());
    let delta = d_ket as f64 - d_bra as f64;
    let m = ket.momentum;
    if (bra.momentum - m - total_charge * ZERO_MODE_COMMUTATOR).norm() > MOMENTUM_TOL {
        return Ok(CoeffTable::new(zero, zero));
    }
    let norm = state_norm(&bra.partition, params);
    match prod.factors.as_slice() {
        [] => {
            let mut t = CoeffTable::new(zero, zero);
            t.add(0, inner_product(bra, ket, params));
            Ok(t)
        }
        [f] => {
            let basis = PartitionBasis::new(d_bra.max(d_ket));
            let x = f.data();
            let op = ModeOperator::new(&x, params, &basis);
            let (i, j) = locate(&basis, bra, ket)?;
            let exponent = x.h0_power * m - delta;
            let (mut t, key) = if f.variable == 0 {
                (CoeffTable::new(exponent, zero), 0)
            } else {
                (CoeffTable::new(zero, exponent), 0)
            };
            t.add(key, op.element(m, d_ket, d_bra)?[(i, j)] * norm);
            Ok(t)
        }
        [f, g] if f.variable != g.variable => {
            if window < 0 {
                return Err(Error::WindowUnderflow { lo: -window, hi: window });
            }
            let basis = PartitionBasis::new(d_bra.max(d_ket) + window.max(0) as usize);
            let (i, j) = locate(&basis, bra, ket)?;
            let (fx, fy) = (f.data(), g.data());
            let (ox, oy) = (ModeOperator::new(&fx, params, &basis), ModeOperator::new(&fy, params, &basis));
            if f.variable == 0 {
                // X(z) Y(w)
                let mut t = CoeffTable::new(fx.h0_power * (m + fy.charge * ZERO_MODE_COMMUTATOR), fy.h0_power * m - delta);
                for a in -window..=window {
                    if let Some(c) = direct_pair(&ox, &oy, m, d_ket, d_bra, a)? {
                        t.add(a, c[(i, j)] * norm);
                    }
                }
                Ok(t)
            } else {
                // Y(w) X(z): the first factor lives on w
                let mut t = CoeffTable::new(fy.h0_power * m, fx.h0_power * (m + fy.charge * ZERO_MODE_COMMUTATOR) - delta);
                for a in -window..=window {
                    if let Some(c) = exchanged_pair(&oy, &ox, m, d_ket, d_bra, a)? {
                        t.add(a, c[(i, j)] * norm);
                    }
                }
                Ok(t)
            }
        }
        _ => Err(Error::InvalidArgument(
            "matrix elements are implemented for at most two factors on distinct variables".into(),
        )),
    }
}

fn locate(basis: &PartitionBasis, bra: &FockState, ket: &FockState) -> Result<(usize, usize)> {
    let i = basis
        .index_of(&bra.partition)
        .ok_or_else(|| Error::InvalidArgument(format!("bra {bra} outside the basis")))?;
    let j = basis
        .index_of(&ket.partition)
        .ok_or_else(|| Error::InvalidArgument(format!("ket {ket} outside the basis")))?;
    Ok((i, j))
}

#[cfg(test)]
mod tests;
