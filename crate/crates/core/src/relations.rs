//! Numerical certification of the operator identities.
//!
//! Every exchange relation has the shape
//!
//! `g(w/z) X(z) Y(w) - (-z/w)^E g(z/w) Y(w) X(z) = sum_i c_i delta(alpha_i w/z) W_i(w)`
//!
//! and is checked on matrix elements between Fock states of degree up to
//! `degree_cap`, for every power `(w/z)^N` with `|N| <= mode_window`. For fixed
//! bra and ket both sides are finite mode convolutions, so each coefficient is
//! computed exactly (no series truncation error): the structure series is
//! expanded just far enough to cover every surviving term.
//!
//! Each checker can be run in an involution frame: the operators are replaced
//! by their images and every scalar coefficient is evaluated at the image
//! parameters, while the Fock space stays the one at the original parameters.

use std::ops::RangeInclusive;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{direct_pair, exchanged_pair, FockState, ModeOperator, NormalOrderedVertex, PartitionBasis};
use crate::qspecial::QParams;
use crate::report::{scaled_residual, CheckReport, Location, ParamRecord, TruncationRecord, WorstTracker};
use crate::series::check_delta_identity;
use crate::voa::{
    dressing, fused_vertex, lambda_minus, lambda_plus, screening_plus, shift_identity_sides, structure_series, vertex,
    Involution, Sign, StructureFamily,
};

type Matrix = DMatrix<Complex64>;

/// Truncation and tolerance for the operator checkers.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    /// Largest bra/ket degree.
    pub degree_cap: usize,
    /// Largest `|N|` for the coefficient of `(w/z)^N`.
    pub mode_window: i64,
    pub tol: f64,
    /// Ket momenta (`h_0` eigenvalues) at which every cell is evaluated.
    pub momenta: Vec<Complex64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            degree_cap: 4,
            mode_window: 4,
            tol: 1e-8,
            momenta: vec![Complex64::new(0.0, 0.0), Complex64::new(0.23, 0.0)],
        }
    }
}

impl CheckConfig {
    pub fn new(degree_cap: usize, mode_window: i64, tol: f64) -> Self {
        Self {
            degree_cap,
            mode_window,
            tol,
            ..Self::default()
        }
    }

    /// Replaces the momenta by `{0}` plus `extra` values drawn uniformly from `(-0.5, 0.5)`.
    pub fn with_seeded_momenta(mut self, seed: u64, extra: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.momenta = std::iter::once(Complex64::new(0.0, 0.0))
            .chain((0..extra).map(|_| Complex64::new(rng.random_range(-0.5..0.5), 0.0)))
            .collect();
        self
    }

    fn truncation(&self) -> TruncationRecord {
        TruncationRecord {
            degree: Some(self.degree_cap),
            window: Some(self.mode_window),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mode_window < 0 {
            return Err(Error::InvalidArgument("mode window must be >= 0".into()));
        }
        if self.momenta.is_empty() {
            return Err(Error::InvalidArgument("at least one momentum is required".into()));
        }
        Ok(())
    }
}

fn sign_pow(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn frame_name(base: &str, frame: Involution) -> String {
    match frame {
        Involution::Identity => base.to_string(),
        other => format!("{base}[{}]", other.name()),
    }
}

/// The left side `g(w/z) X(z) Y(w) - (-z/w)^E g(z/w) Y(w) X(z)`, summed over the `X`s.
struct ExchangeSide {
    xs: Vec<ModeOperator>,
    y: ModeOperator,
    g: Vec<Complex64>,
    e: i64,
}

impl ExchangeSide {
    fn new(
        xs: &[NormalOrderedVertex],
        y: &NormalOrderedVertex,
        g: Vec<Complex64>,
        e: i64,
        params: &QParams,
        basis: &PartitionBasis,
    ) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        if xs.iter().any(|x| x.charge != zero || x.h0_power != zero) {
            return Err(Error::Monomial(
                "the left operator must carry no charge for the two orderings to share a monomial".into(),
            ));
        }
        Ok(Self {
            xs: xs.iter().map(|x| ModeOperator::new(x, params, basis)).collect(),
            y: ModeOperator::new(y, params, basis),
            g,
            e,
        })
    }

    fn coefficient(&self, m: Complex64, d_ket: usize, d_bra: usize, n: i64, shape: (usize, usize)) -> Result<Matrix> {
        let mut tot = Matrix::zeros(shape.0, shape.1);
        let sign = sign_pow(self.e);
        for x in &self.xs {
            for s in 0..=(n + d_bra as i64) {
                if let Some(c) = direct_pair(x, &self.y, m, d_ket, d_bra, n - s)? {
                    tot += c * self.g_at(s)?;
                }
            }
            for s in 0..=(d_ket as i64 - n - self.e) {
                if let Some(d) = exchanged_pair(x, &self.y, m, d_ket, d_bra, n + self.e + s)? {
                    tot -= d * (sign * self.g_at(s)?);
                }
            }
        }
        Ok(tot)
    }

    fn g_at(&self, s: i64) -> Result<Complex64> {
        self.g.get(s as usize).copied().ok_or(Error::WindowUnderflow {
            lo: 0,
            hi: self.g.len() as i64 - 1,
        })
    }
}

/// A delta term `coef * alpha^N * W(w)`.
struct DeltaTerm {
    coef: Complex64,
    alpha: Complex64,
    w: ModeOperator,
}

impl DeltaTerm {
    fn new(coef: Complex64, alpha: Complex64, w: &NormalOrderedVertex, y: &NormalOrderedVertex, params: &QParams, basis: &PartitionBasis) -> Result<Self> {
        if (w.h0_power - y.h0_power).norm() > 1e-12 || (w.charge - y.charge).norm() > 1e-12 {
            return Err(Error::Monomial(format!(
                "delta term {} does not carry the zero modes of {}",
                w.label, y.label
            )));
        }
        Ok(Self {
            coef,
            alpha,
            w: ModeOperator::new(w, params, basis),
        })
    }

    fn coefficient(&self, m: Complex64, d_ket: usize, d_bra: usize, n: i64) -> Result<Matrix> {
        Ok(self.w.element(m, d_ket, d_bra)? * (self.coef * self.alpha.powi(n as i32)))
    }
}

fn structure_coefficients(family: StructureFamily, p: &QParams, cfg: &CheckConfig, e: i64) -> Result<Vec<Complex64>> {
    let order = cfg.mode_window + cfg.degree_cap as i64 + e.abs() + 2;
    Ok(structure_series(family, p, order)?.dense())
}

fn basis_for(cfg: &CheckConfig, e: i64) -> PartitionBasis {
    PartitionBasis::new(cfg.degree_cap + cfg.mode_window as usize + e.unsigned_abs() as usize)
}

/// Compares two coefficient families cell by cell.
fn compare_cells<L, R>(
    cfg: &CheckConfig,
    basis: &PartitionBasis,
    powers: RangeInclusive<i64>,
    mut lhs: L,
    mut rhs: R,
) -> Result<WorstTracker>
where
    L: FnMut(Complex64, usize, usize, i64, (usize, usize)) -> Result<Matrix>,
    R: FnMut(Complex64, usize, usize, i64, (usize, usize)) -> Result<Matrix>,
{
    let mut worst = WorstTracker::default();
    for &m in &cfg.momenta {
        for d_ket in 0..=cfg.degree_cap {
            for d_bra in 0..=cfg.degree_cap {
                let shape = (basis.degree(d_bra).len(), basis.degree(d_ket).len());
                for n in powers.clone() {
                    let l = lhs(m, d_ket, d_bra, n, shape)?;
                    let r = rhs(m, d_ket, d_bra, n, shape)?;
                    for i in 0..shape.0 {
                        for j in 0..shape.1 {
                            let res = scaled_residual(l[(i, j)], r[(i, j)]);
                            worst.observe(res, || Location {
                                bra: basis.degree(d_bra)[i].to_string(),
                                ket: FockState::new(m, basis.degree(d_ket)[j].clone()).to_string(),
                                power: n,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn report(name: String, worst: WorstTracker, cfg: &CheckConfig, record: ParamRecord) -> CheckReport {
    CheckReport::judged(name, worst.residual, cfg.tol, worst.location, record, cfg.truncation())
}

/// `-(q^{1/2}-q^{-1/2})(t^{1/2}-t^{-1/2}) (p^N - p^{-N}) / (p^{1/2} - p^{-1/2})`,
/// with the analytic limit near `p = 1`.
pub fn central_term(p: &QParams, n: i64) -> Complex64 {
    let two_sinh = |x: Complex64| 2.0 * x.sinh();
    let lp = p.log_p();
    let nf = n as f64;
    let ratio = if (p.p() - 1.0).norm() < 1e-6 {
        // sinh(N x)/sinh(x/2) = 2N (1 + x^2 (4N^2 - 1)/24 + O(x^4))
        2.0 * nf * (1.0 + lp * lp * (4.0 * nf * nf - 1.0) / 24.0)
    } else {
        two_sinh(nf * lp) / two_sinh(lp / 2.0)
    };
    -two_sinh(p.log_q() / 2.0) * two_sinh(p.log_t() / 2.0) * ratio
}

/// `f(w/z) T(z) T(w) - T(w) T(z) f(z/w) = central * delta(w/z)`.
pub fn check_defining_relation(params: &QParams, cfg: &CheckConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let basis = basis_for(cfg, 0);
    let f = structure_coefficients(StructureFamily::F, params, cfg, 0)?;
    let t = [lambda_plus(params), lambda_minus(params)];
    let sides: Vec<ExchangeSide> = t
        .iter()
        .map(|y| ExchangeSide::new(&t, y, f.clone(), 0, params, &basis))
        .collect::<Result<_>>()?;
    let worst = compare_cells(
        cfg,
        &basis,
        -cfg.mode_window..=cfg.mode_window,
        |m, dk, db, n, shape| {
            let mut acc = Matrix::zeros(shape.0, shape.1);
            for s in &sides {
                acc += s.coefficient(m, dk, db, n, shape)?;
            }
            Ok(acc)
        },
        |_, dk, db, n, shape| {
            if dk == db {
                Ok(Matrix::identity(shape.0, shape.1) * central_term(params, n))
            } else {
                Ok(Matrix::zeros(shape.0, shape.1))
            }
        },
    )?;
    Ok(report("defining-relation".into(), worst, cfg, ParamRecord::from_params(params)))
}

/// `[T(z), S_+(w)] = -(1 - t^{-1}) (q^{-N/2} :Lambda^-(q^{-1/2} w) S_+(w): - q^{1 + N/2} :Lambda^-(q^{1/2} w) S_+(q w):)`
/// at the power `(w/z)^N`, the expanded form of the total `q`-difference.
pub fn check_screening_relation(params: &QParams, frame: Involution, cfg: &CheckConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let c = frame.params(params);
    let basis = basis_for(cfg, 0);
    let s = frame.apply(screening_plus, params);
    let lp = frame.apply(lambda_plus, params);
    let lm = frame.apply(lambda_minus, params);
    // no structure function: the series is exactly 1
    let mut one = vec![Complex64::new(0.0, 0.0); cfg.degree_cap + cfg.mode_window as usize + 2];
    one[0] = Complex64::new(1.0, 0.0);
    let lhs = ExchangeSide::new(&[lp, lm.clone()], &s, one, 0, params, &basis)?;
    let w1 = lm.shifted(-c.log_q() / 2.0).normal_product(&s);
    let w2 = lm.shifted(c.log_q() / 2.0).normal_product(&s.shifted(c.log_q()));
    let pre = -(1.0 - 1.0 / c.t());
    let t1 = DeltaTerm::new(pre, c.q_pow(-0.5), &w1, &s, params, &basis)?;
    let t2 = DeltaTerm::new(-pre * c.q(), c.q_pow(0.5), &w2, &s, params, &basis)?;
    let worst = compare_cells(
        cfg,
        &basis,
        -cfg.mode_window..=cfg.mode_window,
        |m, dk, db, n, shape| lhs.coefficient(m, dk, db, n, shape),
        |m, dk, db, n, _| Ok(t1.coefficient(m, dk, db, n)? + t2.coefficient(m, dk, db, n)?),
    )?;
    Ok(report(frame_name("screening-relation", frame), worst, cfg, ParamRecord::from_params(params)))
}

fn prod_range(lo: u32, hi: i64, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
    (i64::from(lo)..=hi).map(|j| f(j as f64)).product()
}

fn require_ell(ell: u32) -> Result<()> {
    if ell == 0 {
        return Err(Error::InvalidArgument("ell must be >= 1".into()));
    }
    Ok(())
}

/// The `Lambda^+` relation with `V_{l+1,1}`:
/// `g(w/z) Lambda^+(z) V(w) - V(w) Lambda^+(z) (-z/w)^{2-l} g(z/w)
///  = p^{1/2} t^{-l/2} prod_{j=0}^{l-2} (1 - t q^{-j/l}) delta(p^{1/2} q^{-1/2l} w/z) V(q^{-1/l} w)`.
pub fn check_lambda_vertex_relation(ell: u32, params: &QParams, frame: Involution, cfg: &CheckConfig) -> Result<CheckReport> {
    require_ell(ell)?;
    cfg.validate()?;
    let c = frame.params(params);
    let l = f64::from(ell);
    let e = 2 - i64::from(ell);
    let basis = basis_for(cfg, e);
    let g = structure_coefficients(StructureFamily::G { ell, k: 0 }, &c, cfg, e)?;
    let v = frame.apply(|pp| vertex(ell, 0, pp).expect("ell >= 1"), params);
    let lhs = ExchangeSide::new(&[frame.apply(lambda_plus, params)], &v, g, e, params, &basis)?;
    let coef = c.p_pow(0.5) * c.t_pow(-l / 2.0) * prod_range(0, i64::from(ell) - 2, |j| 1.0 - c.t() * c.q_pow(-j / l));
    let alpha = c.p_pow(0.5) * c.q_pow(-1.0 / (2.0 * l));
    let term = DeltaTerm::new(coef, alpha, &v.shifted(-c.log_q() / l), &v, params, &basis)?;
    let worst = compare_cells(
        cfg,
        &basis,
        -cfg.mode_window..=cfg.mode_window,
        |m, dk, db, n, shape| lhs.coefficient(m, dk, db, n, shape),
        |m, dk, db, n, _| term.coefficient(m, dk, db, n),
    )?;
    Ok(report(
        frame_name("lambda-vertex-relation", frame),
        worst,
        cfg,
        ParamRecord::from_params(params).with_ell(ell),
    ))
}

/// Scalar data of the `T`-`V_{l+1,1}` relation: the common product and the two delta terms
/// `(coefficient, alpha, log of the shift of V)`.
struct CurrentVertexData {
    common: Complex64,
    terms: [(Complex64, Complex64, Complex64); 2],
}

fn current_vertex_data(ell: u32, c: &QParams) -> CurrentVertexData {
    let l = f64::from(ell);
    let common = prod_range(0, i64::from(ell) - 2, |j| {
        c.t_pow(-0.5) * c.q_pow(j / (2.0 * l)) - c.t_pow(0.5) * c.q_pow(-j / (2.0 * l))
    });
    let e = (l - 1.0) * (l - 2.0) / (4.0 * l);
    let alpha = c.p_pow(0.5) * c.q_pow(-1.0 / (2.0 * l));
    let first = c.p_pow(0.5) * c.t_pow(-0.5) * c.q_pow(-e);
    let second = -sign_pow(i64::from(ell)) * c.p_pow(-0.5) * c.t_pow(0.5) * c.q_pow(e);
    CurrentVertexData {
        common,
        terms: [
            (first, alpha, -c.log_q() / l),
            (second, 1.0 / alpha, c.log_q() / l),
        ],
    }
}

/// The `T` relation with `V_{l+1,1}`, two delta terms at `alpha^{+-1}`, `alpha = p^{1/2} q^{-1/2l}`.
pub fn check_current_vertex_relation(ell: u32, params: &QParams, frame: Involution, cfg: &CheckConfig) -> Result<CheckReport> {
    require_ell(ell)?;
    cfg.validate()?;
    let c = frame.params(params);
    let e = 2 - i64::from(ell);
    let basis = basis_for(cfg, e);
    let g = structure_coefficients(StructureFamily::G { ell, k: 0 }, &c, cfg, e)?;
    let v = frame.apply(|pp| vertex(ell, 0, pp).expect("ell >= 1"), params);
    let xs = [frame.apply(lambda_plus, params), frame.apply(lambda_minus, params)];
    let lhs = ExchangeSide::new(&xs, &v, g, e, params, &basis)?;
    let data = current_vertex_data(ell, &c);
    let terms: Vec<DeltaTerm> = data
        .terms
        .iter()
        .map(|(coef, alpha, shift)| DeltaTerm::new(data.common * coef, *alpha, &v.shifted(*shift), &v, params, &basis))
        .collect::<Result<_>>()?;
    let worst = compare_cells(
        cfg,
        &basis,
        -cfg.mode_window..=cfg.mode_window,
        |m, dk, db, n, shape| lhs.coefficient(m, dk, db, n, shape),
        |m, dk, db, n, shape| {
            let mut acc = Matrix::zeros(shape.0, shape.1);
            for t in &terms {
                acc += t.coefficient(m, dk, db, n)?;
            }
            Ok(acc)
        },
    )?;
    Ok(report(
        frame_name("current-vertex-relation", frame),
        worst,
        cfg,
        ParamRecord::from_params(params).with_ell(ell),
    ))
}

/// One cell of `<bra| T_n V(w) |ket>`: the coefficient block times `w^n w^{w_exponent}`.
#[derive(Debug, Clone)]
pub struct ActionCell {
    pub momentum: Complex64,
    pub d_ket: usize,
    pub d_bra: usize,
    pub coefficient: Matrix,
    /// `gamma m - (d_ket - d_bra)`.
    pub w_exponent: Complex64,
}

impl ActionCell {
    pub fn value(&self, n: i64, w: Complex64) -> Matrix {
        &self.coefficient * (w.powi(n as i32) * (self.w_exponent * w.ln()).exp())
    }
}

/// The modes `T_n = oint dz/(2 pi i z) z^n T(z)` acting on `g(w/z)`-dressed `V_{l+1,1}(w)`:
/// the `(w/z)^n` coefficient of the exchange side, one cell per momentum and degree pair.
pub fn adjoint_action(ell: u32, n: i64, params: &QParams, cfg: &CheckConfig) -> Result<Vec<ActionCell>> {
    require_ell(ell)?;
    cfg.validate()?;
    let e = 2 - i64::from(ell);
    let wide = CheckConfig {
        mode_window: cfg.mode_window.max(n.abs()),
        ..cfg.clone()
    };
    let basis = basis_for(&wide, e);
    let g = structure_coefficients(StructureFamily::G { ell, k: 0 }, params, &wide, e)?;
    let v = vertex(ell, 0, params)?;
    let lhs = ExchangeSide::new(&[lambda_plus(params), lambda_minus(params)], &v, g, e, params, &basis)?;
    let mut cells = Vec::new();
    for &m in &cfg.momenta {
        for d_ket in 0..=cfg.degree_cap {
            for d_bra in 0..=cfg.degree_cap {
                let shape = (basis.degree(d_bra).len(), basis.degree(d_ket).len());
                cells.push(ActionCell {
                    momentum: m,
                    d_ket,
                    d_bra,
                    coefficient: lhs.coefficient(m, d_ket, d_bra, n, shape)?,
                    w_exponent: v.h0_power * m - (d_ket as f64 - d_bra as f64),
                });
            }
        }
    }
    Ok(cells)
}

/// `T_n V(w) = C (p^{(n+1)/2} t^{-1/2} q^{-((l-1)(l-2)+2n)/4l} w^n V(q^{-1/l} w)
///  - (-1)^l p^{-(n+1)/2} t^{1/2} q^{((l-1)(l-2)+2n)/4l} w^n V(q^{1/l} w))`,
/// compared on matrix elements evaluated at each `w` in `scales`.
/// `V(xi w)` is obtained by substituting the argument, not from shifted vertex data.
pub fn check_adjoint_shift_form(
    ell: u32,
    n_window: i64,
    params: &QParams,
    cfg: &CheckConfig,
    scales: &[f64],
) -> Result<CheckReport> {
    require_ell(ell)?;
    let l = f64::from(ell);
    let data = current_vertex_data(ell, params);
    let v = vertex(ell, 0, params)?;
    let basis = PartitionBasis::new(cfg.degree_cap);
    let v_op = ModeOperator::new(&v, params, &basis);
    let a = (l - 1.0) * (l - 2.0);
    let mut worst = WorstTracker::default();
    for n in -n_window..=n_window {
        let nf = n as f64;
        let e = (a + 2.0 * nf) / (4.0 * l);
        let c_minus = data.common * params.p_pow((nf + 1.0) / 2.0) * params.t_pow(-0.5) * params.q_pow(-e);
        let c_plus =
            -data.common * sign_pow(i64::from(ell)) * params.p_pow(-(nf + 1.0) / 2.0) * params.t_pow(0.5) * params.q_pow(e);
        for cell in adjoint_action(ell, n, params, cfg)? {
            let element = v_op.element(cell.momentum, cell.d_ket, cell.d_bra)?;
            for &scale in scales {
                let w = Complex64::new(scale, 0.0);
                let lhs = cell.value(n, w);
                let at = |log_xi: Complex64| ((log_xi + w.ln()) * cell.w_exponent).exp();
                let rhs = &element
                    * (w.powi(n as i32) * (c_minus * at(-params.log_q() / l) + c_plus * at(params.log_q() / l)));
                for i in 0..lhs.nrows() {
                    for j in 0..lhs.ncols() {
                        worst.observe(scaled_residual(lhs[(i, j)], rhs[(i, j)]), || Location {
                            bra: format!("{} @ w={scale}", basis.degree(cell.d_bra)[i]),
                            ket: FockState::new(cell.momentum, basis.degree(cell.d_ket)[j].clone()).to_string(),
                            power: n,
                        });
                    }
                }
            }
        }
    }
    let trunc = TruncationRecord {
        degree: Some(cfg.degree_cap),
        window: Some(n_window),
    };
    Ok(CheckReport::judged(
        "adjoint-shift-form",
        worst.residual,
        cfg.tol,
        worst.location,
        ParamRecord::from_params(params).with_ell(ell),
        trunc,
    ))
}

/// A support `alpha` of the composite relation with its coefficient, including the common prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub log_alpha: Complex64,
    pub coefficient: Complex64,
}

/// Supports of the `Lambda^+`-`V_{l+1,k+1}` relation: `p^{1/2} q^{-1/2l}` (for `l >= 1`)
/// and `p^{1/2} t^{1/2k}` (for `k >= 1`), each with prefactor `q^{k/2} t^{-l/2}`.
pub fn composite_supports(ell: u32, k: u32, c: &QParams) -> Vec<Support> {
    let (l, kf) = (f64::from(ell), f64::from(k));
    let pre = c.q_pow(kf / 2.0) * c.t_pow(-l / 2.0);
    let mut out = Vec::new();
    if ell > 0 {
        let mut c1 = prod_range(0, i64::from(ell) - 2, |i| 1.0 - c.t() * c.q_pow(-i / l));
        if k > 0 {
            c1 *= prod_range(0, i64::from(k) - 2, |j| {
                1.0 - c.q_pow(1.0 / (2.0 * l) - 1.0) * c.t_pow(1.0 / (2.0 * kf) + j / kf)
            });
            c1 /= 1.0 - c.q_pow(1.0 / (2.0 * l)) * c.t_pow(1.0 / (2.0 * kf));
        }
        out.push(Support {
            log_alpha: c.log_p() / 2.0 - c.log_q() / (2.0 * l),
            coefficient: pre * c1,
        });
    }
    if k > 0 {
        let mut c2 = prod_range(0, i64::from(k) - 2, |j| 1.0 - c.t_pow(j / kf) / c.q());
        if ell > 0 {
            c2 *= prod_range(0, i64::from(ell) - 2, |i| {
                1.0 - c.t_pow(1.0 - 1.0 / (2.0 * kf)) * c.q_pow(-1.0 / (2.0 * l) - i / l)
            });
            c2 /= 1.0 - c.q_pow(-1.0 / (2.0 * l)) * c.t_pow(-1.0 / (2.0 * kf));
        }
        out.push(Support {
            log_alpha: c.log_p() / 2.0 + c.log_t() / (2.0 * kf),
            coefficient: pre * c2,
        });
    }
    out
}

fn check_composite(name: &str, ell: u32, k: u32, params: &QParams, frame: Involution, cfg: &CheckConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let c = frame.params(params);
    let e = if k == 0 { 2 - i64::from(ell) } else { 4 - i64::from(ell) - i64::from(k) };
    let basis = basis_for(cfg, e);
    let g = structure_coefficients(StructureFamily::G { ell, k }, &c, cfg, e)?;
    let v = frame.apply(|pp| vertex(ell, k, pp).expect("type checked by the caller"), params);
    let lp = frame.apply(lambda_plus, params);
    let lm = frame.apply(lambda_minus, params);
    let lhs = ExchangeSide::new(std::slice::from_ref(&lp), &v, g, e, params, &basis)?;
    let mut terms = Vec::new();
    let mut dress = Vec::new();
    for s in composite_supports(ell, k, &c) {
        let alpha = s.log_alpha.exp();
        let g_minus = dressing(Sign::Minus, ell, k, &c, alpha)?;
        dress.push(g_minus.norm());
        let w_plus = v.normal_product(&lp.shifted(s.log_alpha));
        let w_minus = v.normal_product(&lm.shifted(s.log_alpha));
        terms.push(DeltaTerm::new(s.coefficient, alpha, &w_plus, &v, params, &basis)?);
        terms.push(DeltaTerm::new(s.coefficient * g_minus, alpha, &w_minus, &v, params, &basis)?);
    }
    let worst = compare_cells(
        cfg,
        &basis,
        -cfg.mode_window..=cfg.mode_window,
        |m, dk, db, n, shape| lhs.coefficient(m, dk, db, n, shape),
        |m, dk, db, n, shape| {
            let mut acc = Matrix::zeros(shape.0, shape.1);
            for t in &terms {
                acc += t.coefficient(m, dk, db, n)?;
            }
            Ok(acc)
        },
    )?;
    let dress: Vec<String> = dress.iter().map(|d| format!("{d:e}")).collect();
    Ok(report(
        frame_name(name, frame),
        worst,
        cfg,
        ParamRecord::from_params(params).with_ell(ell).with_k(k),
    )
    .with_note(format!("|G-| at supports: {}", dress.join(", "))))
}

/// The `Lambda^+` relation with `V_{l+1,1}` written with the dressed product
/// `:V_{l+1,1}(w) Lambda^+(alpha w):` on the right, `alpha = p^{1/2} q^{-1/2l}`.
pub fn check_dressed_lambda_relation(ell: u32, params: &QParams, frame: Involution, cfg: &CheckConfig) -> Result<CheckReport> {
    require_ell(ell)?;
    check_composite("dressed-lambda-relation", ell, 0, params, frame, cfg)
}

/// The `Lambda^+` relation with the composite `V_{l+1,k+1}`, `l, k >= 1`.
pub fn check_composite_vertex_relation(
    ell: u32,
    k: u32,
    params: &QParams,
    frame: Involution,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    if ell == 0 || k == 0 {
        return Err(Error::InvalidArgument("the composite relation needs ell, k >= 1".into()));
    }
    check_composite("composite-vertex-relation", ell, k, params, frame, cfg)
}

const VERTEX_DATA_MODES: i64 = 12;

fn vertex_data_report(name: String, lhs: &NormalOrderedVertex, rhs: &NormalOrderedVertex, params: &QParams, ell: u32, tol: f64) -> CheckReport {
    let d = lhs.distance(rhs, VERTEX_DATA_MODES);
    let loc = Location {
        bra: lhs.label.clone(),
        ket: rhs.label.clone(),
        power: VERTEX_DATA_MODES,
    };
    CheckReport::judged(
        name,
        d,
        tol,
        Some(loc),
        ParamRecord::from_params(params).with_ell(ell),
        TruncationRecord {
            degree: None,
            window: Some(VERTEX_DATA_MODES),
        },
    )
}

/// `V_{l+1,1}(z) = :prod_j V_{2,1}(q^{(l+1-2j)/2l} z):` compared as vertex data
/// (modes up to `|n| <= 12`, charge, zero-mode exponent and scalar).
pub fn check_fusion(ell: u32, params: &QParams, frame: Involution, tol: f64) -> Result<CheckReport> {
    require_ell(ell)?;
    let fused = fused_vertex(ell, frame, params)?;
    let direct = frame.apply(|pp| vertex(ell, 0, pp).expect("ell >= 1"), params);
    Ok(vertex_data_report(frame_name("fusion", frame), &fused, &direct, params, ell, tol))
}

/// `V_{l+1,1}(q^{-1/l} w) = p^{-1/2} :V_{l+1,1}(w) Lambda^+(p^{1/2} q^{-1/2l} w):` as vertex data.
pub fn check_shift_identity(ell: u32, params: &QParams, frame: Involution, tol: f64) -> Result<CheckReport> {
    require_ell(ell)?;
    let (lhs, rhs) = shift_identity_sides(ell, frame, params)?;
    Ok(vertex_data_report(frame_name("shift-identity", frame), &lhs, &rhs, params, ell, tol))
}

/// The delta-function identity on `count` ratios drawn uniformly from `(0, 1)` by a seeded generator.
pub fn check_delta_identity_seeded(count: usize, seed: u64, window: i64, tol: f64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r: Vec<Complex64> = (0..count)
        .map(|_| Complex64::new(rng.random_range(f64::EPSILON..1.0), 0.0))
        .collect();
    check_delta_identity(&r, window, tol)
}
