//! Two-point and screened four-point functions of `V_l = V_{l+1,1}`, and the
//! connection formula between the two orderings of the four-point functions.
//!
//! Correlators are products of pairwise contraction scalars: the dual state is
//! normalised so that the fully normal-ordered remainder contributes 1, and
//! `V_L(0)` only contributes zero-mode monomials.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qspecial::{
    beta_q, bracket, phi21, pochhammer, try_jackson_integral, BracketParams, JacksonRange, PochOrder, QParams,
    SeriesControl,
};
use crate::report::{relative_residual, CheckReport, Location, ParamRecord, TruncationRecord, WorstTracker};
use crate::series::{series_exp, LaurentSeries};
use crate::voa::Sign;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Parameters of the four-point functions `<* | V_l(z) V_l(w) S_+(mu) V_L(0)|0>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorParams {
    pub qparams: QParams,
    pub ell: u32,
    /// Momentum label `L` of `V_L(0)`.
    pub l_label: Complex64,
    /// Bracket parameter of the connection matrix.
    pub r: f64,
}

impl CorrelatorParams {
    pub fn new(qparams: QParams, ell: u32, l_label: impl Into<Complex64>, r: f64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidArgument("correlators need ell >= 1".into()));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("r = {r} must be positive")));
        }
        Ok(Self {
            qparams,
            ell,
            l_label: l_label.into(),
            r,
        })
    }

    /// `a = l beta`.
    pub fn a(&self) -> Complex64 {
        f64::from(self.ell) * self.qparams.beta()
    }

    /// `b = 1 - L beta`.
    pub fn b(&self) -> Complex64 {
        1.0 - self.l_label * self.qparams.beta()
    }

    fn l(&self) -> f64 {
        f64::from(self.ell)
    }

    /// `Q = q^{1/l}`, the Jackson base.
    fn log_base(&self) -> Complex64 {
        self.qparams.log_q() / self.l()
    }

    fn record(&self) -> ParamRecord {
        ParamRecord {
            L: Some(self.l_label.re),
            r: Some(self.r),
            ..ParamRecord::from_params(&self.qparams).with_ell(self.ell)
        }
    }
}

fn check_ell(ell: u32) -> Result<()> {
    if ell == 0 {
        return Err(Error::InvalidArgument("ell must be >= 1".into()));
    }
    Ok(())
}

/// The four `(base-independent)` prefactors `a` of `prod_j (a x; p^2, Q)` in the
/// two-point function: numerator `t^{-1} Q^j`, `p Q^j`, denominator `Q^j`, `t^{-1} p Q^j`.
fn two_point_factors(ell: u32, p: &QParams, j: u32) -> ([Complex64; 2], [Complex64; 2]) {
    let qj = p.q_pow(f64::from(j) / f64::from(ell));
    let tinv = 1.0 / p.t();
    ([tinv * qj, p.p() * qj], [qj, tinv * p.p() * qj])
}

// (a x; p^2, Q)_inf, continued to |p| > 1 through 1/(a p^{-2} x; p^{-2}, Q)_inf.
fn double_poch(a: Complex64, p2: Complex64, base: Complex64) -> Result<Complex64> {
    if p2.norm() < 1.0 {
        pochhammer(a, &[p2, base], PochOrder::Infinite)
    } else {
        let inv = 1.0 / p2;
        let den = pochhammer(a * inv, &[inv, base], PochOrder::Infinite)?;
        if den.norm() == 0.0 {
            return Err(Error::Pole(format!("continued double product vanishes at a = {a}")));
        }
        Ok(1.0 / den)
    }
}

/// `<V_l(z) V_l(w)> = z^{l^2 beta/2} prod_{j=1}^{l} (t^{-1} Q^j x, p Q^j x; p^2, Q)_inf / (Q^j x, t^{-1} p Q^j x; p^2, Q)_inf`
/// with `x = w/z` and `Q = q^{1/l}`.
pub fn two_point(ell: u32, p: &QParams, z: Complex64, w: Complex64) -> Result<Complex64> {
    check_ell(ell)?;
    let x = w / z;
    let p2 = p.p() * p.p();
    let base = p.q_pow(1.0 / f64::from(ell));
    let mut acc = one();
    for j in 1..=ell {
        let (num, den) = two_point_factors(ell, p, j);
        for a in num {
            acc *= double_poch(a * x, p2, base)?;
        }
        for a in den {
            let d = double_poch(a * x, p2, base)?;
            if d.norm() < 1e-300 {
                return Err(Error::Pole(format!("two-point denominator (a x; p^2, Q) vanishes at a = {a}, x = {x}")));
            }
            acc /= d;
        }
    }
    let lf = f64::from(ell);
    Ok((lf * lf * p.beta() / 2.0 * z.ln()).exp() * acc)
}

/// `<V_l(z) V_l(w)>` as `z^{z_exponent}` times a series in `w/z`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPointSeries {
    pub z_exponent: Complex64,
    pub series: LaurentSeries,
}

/// Series form of [`two_point`], from the logarithm of the products:
/// `(a x; p^2, Q)_inf = exp(-sum_n a^n x^n / (n (1 - p^{2n})(1 - Q^n)))`.
/// The coefficients are the same in both `|p| < 1` and `|p| > 1`.
pub fn two_point_series(ell: u32, p: &QParams, order: i64) -> Result<TwoPointSeries> {
    check_ell(ell)?;
    let lf = f64::from(ell);
    let base = p.q_pow(1.0 / lf);
    let logs: Vec<Complex64> = (1..=order.max(0))
        .map(|n| {
            let ni = n as i32;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 1..=ell {
                let (num, den) = two_point_factors(ell, p, j);
                s += den.iter().map(|a| a.powi(ni)).sum::<Complex64>() - num.iter().map(|a| a.powi(ni)).sum::<Complex64>();
            }
            s / ((1.0 - (p.p() * p.p()).powi(ni)) * (1.0 - base.powi(ni)) * n as f64)
        })
        .collect();
    if logs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Pole("two-point series needs p^2 and q^{1/l} away from roots of unity".into()));
    }
    Ok(TwoPointSeries {
        z_exponent: lf * lf * p.beta() / 2.0,
        series: series_exp(|n| logs[n as usize - 1], order),
    })
}

/// `Phi(y) = (t^{1/2} Q^{1/2} y; Q)_inf / (t^{-1/2} Q^{1/2} y; Q)_inf`, the series part of
/// the contraction between `S_+` and `V_l` in either order (`y = z/mu` for `S_+(mu) V_l(z)`,
/// `y = mu/z` for `V_l(z) S_+(mu)`).
pub fn screening_contraction(ell: u32, p: &QParams, y: Complex64) -> Result<Complex64> {
    check_ell(ell)?;
    let lf = f64::from(ell);
    let base = p.q_pow(1.0 / lf);
    let half = p.q_pow(0.5 / lf);
    let num = pochhammer(p.t_pow(0.5) * half * y, &[base], PochOrder::Infinite)?;
    let den = pochhammer(p.t_pow(-0.5) * half * y, &[base], PochOrder::Infinite)?;
    if den.norm() < 1e-300 {
        return Err(Error::Pole(format!("screening contraction pole at y = {y}")));
    }
    Ok(num / den)
}

/// `R(y) = y^{l beta} Phi(y) / Phi(1/y)`: the ratio of the scalar factors of `S_+(mu) V_l(z)`
/// and `V_l(z) S_+(mu)` at `y = z/mu`.
pub fn exchange_ratio(ell: u32, p: &QParams, y: Complex64) -> Result<Complex64> {
    let mono = (f64::from(ell) * p.beta() * y.ln()).exp();
    Ok(mono * screening_contraction(ell, p, y)? / screening_contraction(ell, p, 1.0 / y)?)
}

/// Invariance of [`exchange_ratio`] under `y -> q^{1/l} y`.
pub fn pseudo_constant_check(ell: u32, p: &QParams, ratio_point: Complex64, tol: f64) -> Result<CheckReport> {
    check_ell(ell)?;
    if ratio_point.norm() == 0.0 {
        return Err(Error::InvalidArgument("ratio point must be nonzero".into()));
    }
    let shifted = ratio_point * p.q_pow(1.0 / f64::from(ell));
    let a = exchange_ratio(ell, p, ratio_point)?;
    let b = exchange_ratio(ell, p, shifted)?;
    Ok(CheckReport::judged(
        "pseudo-constant",
        relative_residual(a, b),
        tol,
        Some(Location {
            bra: format!("y = {ratio_point}"),
            ket: format!("y = {shifted}"),
            power: 0,
        }),
        ParamRecord::from_params(p).with_ell(ell),
        TruncationRecord::default(),
    ))
}

/// `U_+` and `U_-` divided by `<V_l(z) V_l(w)>`, from the closed forms:
///
/// `U_+ = (zw)^{l L beta/2} B_Q(2a-b, 1-a) (t^{1/2} q^{-1/2l} z)^{b-2a} 2phi1(Q^a, Q^{2a-b}; Q^{1+a-b}; Q, Q^{1-a} w/z)`
///
/// `U_- = (zw)^{l L beta/2} B_Q(b, 1-a) (zw)^{-a} (t^{-1/2} q^{1/2l} w)^b 2phi1(Q^a, Q^b; Q^{1-a+b}; Q, Q^{1-a} w/z)`
pub fn four_point_closed(sign: Sign, z: Complex64, w: Complex64, cp: &CorrelatorParams) -> Result<Complex64> {
    let p = &cp.qparams;
    let (a, b, l) = (cp.a(), cp.b(), cp.l());
    let lb = cp.log_base();
    let base = lb.exp();
    let qp = |e: Complex64| (e * lb).exp();
    let (lz, lw) = (z.ln(), w.ln());
    let common = (l * cp.l_label * p.beta() / 2.0 * (lz + lw)).exp();
    let arg = qp(1.0 - a) * w / z;
    match sign {
        Sign::Plus => {
            let mono = ((b - 2.0 * a) * (p.log_t() / 2.0 - p.log_q() / (2.0 * l) + lz)).exp();
            let f = phi21(qp(a), qp(2.0 * a - b), qp(1.0 + a - b), base, arg)?;
            Ok(common * beta_q(2.0 * a - b, 1.0 - a, base)? * mono * f)
        }
        Sign::Minus => {
            let mono = (-a * (lz + lw) + b * (-p.log_t() / 2.0 + p.log_q() / (2.0 * l) + lw)).exp();
            let f = phi21(qp(a), qp(b), qp(1.0 - a + b), base, arg)?;
            Ok(common * beta_q(b, 1.0 - a, base)? * mono * f)
        }
    }
}

/// `U_+` and `U_-` divided by `<V_l(z) V_l(w)>`, by Jackson summation of the screened integrand
///
/// `U_+ = (zw)^{l L beta/2} int_{A}^{A inf} d_Q mu mu^{-2a - L beta} Phi(z/mu) Phi(w/mu)`, `A = t^{1/2} q^{1/2l} z`,
///
/// `U_- = (zw)^{l L beta/2} (zw)^{-a} int_0^{A'} d_Q mu mu^{-L beta} Phi(mu/z) Phi(mu/w)`, `A' = t^{-1/2} q^{1/2l} w`.
pub fn four_point_jackson(sign: Sign, z: Complex64, w: Complex64, cp: &CorrelatorParams) -> Result<Complex64> {
    four_point_jackson_with(sign, z, w, cp, &SeriesControl::default())
}

pub fn four_point_jackson_with(
    sign: Sign,
    z: Complex64,
    w: Complex64,
    cp: &CorrelatorParams,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    let p = &cp.qparams;
    let (a, l, ell) = (cp.a(), cp.l(), cp.ell);
    let lbeta = cp.l_label * p.beta();
    let base = cp.log_base().exp();
    let (lz, lw) = (z.ln(), w.ln());
    let common = (l * lbeta / 2.0 * (lz + lw)).exp();
    let half = p.q_pow(0.5 / l);
    let annotate = |e: Error| match e {
        Error::Convergence {
            direction,
            terms,
            context,
        } => Error::Convergence {
            direction,
            terms,
            context: format!("{context}; U{} at a = {a}, b = {}", sign_char(sign), cp.b()),
        },
        other => other,
    };
    match sign {
        Sign::Plus => {
            let start = p.t_pow(0.5) * half * z;
            let sum = try_jackson_integral(
                |mu| {
                    let mono = (-(2.0 * a + lbeta) * mu.ln()).exp();
                    Ok(mono * screening_contraction(ell, p, z / mu)? * screening_contraction(ell, p, w / mu)?)
                },
                JacksonRange::ToInfinity(start),
                base,
                ctl,
            )
            .map_err(annotate)?;
            Ok(common * sum)
        }
        Sign::Minus => {
            let end = p.t_pow(-0.5) * half * w;
            let sum = try_jackson_integral(
                |mu| {
                    let mono = (-lbeta * mu.ln()).exp();
                    Ok(mono * screening_contraction(ell, p, mu / z)? * screening_contraction(ell, p, mu / w)?)
                },
                JacksonRange::ZeroTo(end),
                base,
                ctl,
            )
            .map_err(annotate)?;
            Ok(common * (-a * (lz + lw)).exp() * sum)
        }
    }
}

fn sign_char(sign: Sign) -> char {
    match sign {
        Sign::Plus => '+',
        Sign::Minus => '-',
    }
}

/// [`four_point_closed`] against [`four_point_jackson`] for both signs at `z = 1`,
/// `w` in `ratios`; inconclusive when a sum diverges or hits a pole.
pub fn check_four_point_forms(cp: &CorrelatorParams, ratios: &[f64], tol: f64) -> Result<CheckReport> {
    let mut worst = WorstTracker::default();
    for &x in ratios {
        for sign in [Sign::Plus, Sign::Minus] {
            let pair = four_point_closed(sign, one(), Complex64::new(x, 0.0), cp)
                .and_then(|a| Ok((a, four_point_jackson(sign, one(), Complex64::new(x, 0.0), cp)?)));
            let (a, b) = match pair {
                Ok(v) => v,
                Err(e @ (Error::Convergence { .. } | Error::Pole(_))) => {
                    return Ok(CheckReport::inconclusive("four-point-forms", tol, cp.record(), format!("w/z = {x}: {e}")));
                }
                Err(e) => return Err(e),
            };
            worst.observe(relative_residual(a, b), || Location {
                bra: format!("U{}", sign_char(sign)),
                ket: format!("w/z = {x}"),
                power: 0,
            });
        }
    }
    Ok(CheckReport::judged(
        "four-point-forms",
        worst.residual,
        tol,
        worst.location,
        cp.record(),
        TruncationRecord::default(),
    ))
}

/// The full correlator `<V_l(z) V_l(w)> * U_{+-}`, with `U` from Jackson summation.
pub fn four_point_full(sign: Sign, z: Complex64, w: Complex64, cp: &CorrelatorParams) -> Result<Complex64> {
    Ok(two_point(cp.ell, &cp.qparams, z, w)? * four_point_jackson(sign, z, w, cp)?)
}

/// `M(u)` and the two-point swap ratio `<V(z)V(w)>/<V(w)V(z)>` at `z = 1`, `w = x^{2u}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix {
    pub entries: Matrix2<Complex64>,
    pub u: Complex64,
    pub prefactor: Complex64,
}

/// `M(u) = [[ [l][-u+l+L], [L][-u] ], [ [2l+L][-u], [l][u+l+L] ]] / ([l+L][u+l])`.
pub fn connection_matrix(u: Complex64, cp: &CorrelatorParams) -> Result<ConnectionMatrix> {
    let bp = BracketParams::new(cp.r, cp.ell, &cp.qparams)?;
    let br = |v: Complex64| bracket(v, &bp);
    let (l, big_l) = (Complex64::new(cp.l(), 0.0), cp.l_label);
    let den = br(l + big_l)? * br(u + l)?;
    let scale = bp.normalization() * bp.normalization();
    if den.norm() < 1e-14 * scale {
        return Err(Error::Pole(format!("connection matrix denominator [l+L][u+l] vanishes at u = {u}")));
    }
    let entries = Matrix2::new(
        br(l)? * br(-u + l + big_l)?,
        br(big_l)? * br(-u)?,
        br(2.0 * l + big_l)? * br(-u)?,
        br(l)? * br(u + l + big_l)?,
    ) / den;
    let (z, w) = (one(), bp.x_pow(2.0 * u));
    let prefactor = two_point(cp.ell, &cp.qparams, z, w)? / two_point(cp.ell, &cp.qparams, w, z)?;
    Ok(ConnectionMatrix { entries, u, prefactor })
}

/// Which matrix the connection check uses: the printed one, or the one with its rows
/// exchanged (a control that must fail).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixVariant {
    #[default]
    Printed,
    RowsSwapped,
}

struct Sample {
    lhs: [Complex64; 2],
    rhs: [Complex64; 2],
}

fn connection_sample(u: Complex64, cp: &CorrelatorParams, variant: MatrixVariant) -> Result<Sample> {
    let cm = connection_matrix(u, cp)?;
    let mut m = cm.entries;
    if variant == MatrixVariant::RowsSwapped {
        m.swap_rows(0, 1);
    }
    let bp = BracketParams::new(cp.r, cp.ell, &cp.qparams)?;
    let (z, w) = (one(), bp.x_pow(2.0 * u));
    let direct = [four_point_full(Sign::Plus, z, w, cp)?, four_point_full(Sign::Minus, z, w, cp)?];
    let swapped = [four_point_full(Sign::Plus, w, z, cp)?, four_point_full(Sign::Minus, w, z, cp)?];
    let rhs = [
        cm.prefactor * (m[(0, 0)] * swapped[0] + m[(0, 1)] * swapped[1]),
        cm.prefactor * (m[(1, 0)] * swapped[0] + m[(1, 1)] * swapped[1]),
    ];
    Ok(Sample { lhs: direct, rhs })
}

/// `(U_+(z,w), U_-(z,w)) = prefactor * M(u) (U_+(w,z), U_-(w,z))` at `z = 1`, `w = x^{2u}`
/// for each sample `u`, all four correlators by Jackson summation. A sample whose
/// sums diverge or hit a pole makes the report inconclusive. Samples are evaluated
/// on separate threads.
pub fn check_connection_formula(
    u_samples: &[Complex64],
    cp: &CorrelatorParams,
    tol: f64,
    variant: MatrixVariant,
) -> Result<CheckReport> {
    if u_samples.is_empty() {
        return Err(Error::InvalidArgument("no u samples".into()));
    }
    let name = match variant {
        MatrixVariant::Printed => "connection-formula",
        MatrixVariant::RowsSwapped => "connection-formula[rows-swapped]",
    };
    let results: Vec<Result<Sample>> = std::thread::scope(|s| {
        let handles: Vec<_> = u_samples
            .iter()
            .map(|&u| s.spawn(move || connection_sample(u, cp, variant)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("connection sample panicked")).collect()
    });
    let mut worst = WorstTracker::default();
    for (&u, res) in u_samples.iter().zip(results) {
        let sample = match res {
            Ok(s) => s,
            Err(e @ (Error::Convergence { .. } | Error::Pole(_))) => {
                return Ok(CheckReport::inconclusive(name, tol, cp.record(), format!("u = {u}: {e}")));
            }
            Err(e) => return Err(e),
        };
        for (i, row) in ["U+", "U-"].iter().enumerate() {
            worst.observe(relative_residual(sample.lhs[i], sample.rhs[i]), || Location {
                bra: row.to_string(),
                ket: format!("u = {u}"),
                power: 0,
            });
        }
    }
    Ok(CheckReport::judged(
        name,
        worst.residual,
        tol,
        worst.location,
        cp.record(),
        TruncationRecord::default(),
    ))
}
