//! The named operators of the free-field realisation: the currents
//! `Lambda^{+-}` and `T`, the screening currents `S_{+-}`, the vertex operators
//! `V_{l+1,1}`, `V_{1,k+1}`, `V_{l+1,k+1}`, the involutions `theta` and
//! `omega`, and the structure functions `f`, `g`, `g~`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::NormalOrderedVertex;
use crate::qspecial::QParams;
use crate::series::{series_exp, LaurentSeries};

pub use crate::fock::{contract, normal_order, Contraction, Factor, OperatorProduct};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// The parameter maps `theta: (q,t) -> (1/q,1/t)` and `omega: q <-> t`, and their composite.
///
/// Applied to an operator builder `X`, `(theta . X)(P) = X(theta P)` with the
/// bosons sent to `h_n -> -h_n`; `omega` additionally sends `Q_h -> -Q_h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Involution {
    Identity,
    Theta,
    Omega,
    ThetaOmega,
}

impl Involution {
    pub const ALL: [Involution; 4] = [Self::Identity, Self::Theta, Self::Omega, Self::ThetaOmega];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "id",
            Self::Theta => "theta",
            Self::Omega => "omega",
            Self::ThetaOmega => "theta-omega",
        }
    }

    pub fn params(&self, p: &QParams) -> QParams {
        match self {
            Self::Identity => *p,
            Self::Theta => p.theta(),
            Self::Omega => p.omega(),
            Self::ThetaOmega => p.omega().theta(),
        }
    }

    /// Image of the operator produced by `builder`, realised on the Fock space at `p`.
    pub fn apply<F>(&self, builder: F, p: &QParams) -> NormalOrderedVertex
    where
        F: Fn(&QParams) -> NormalOrderedVertex,
    {
        let x = builder(&self.params(p));
        match self {
            Self::Identity => x,
            Self::Theta => x.flip_theta(),
            Self::Omega => x.flip_omega(),
            Self::ThetaOmega => x.flip_omega().flip_theta(),
        }
    }
}

/// A sum of vertex operators, e.g. `T = Lambda^+ + Lambda^-`.
#[derive(Debug, Clone)]
pub struct OperatorSum {
    pub terms: Vec<NormalOrderedVertex>,
}

fn two_sinh(x: Complex64) -> Complex64 {
    2.0 * x.sinh()
}

fn two_cosh(x: Complex64) -> Complex64 {
    2.0 * x.cosh()
}

/// `Lambda^+(z) = :exp(sum_{n != 0} h_n p^{n/2} z^{-n}): q^{sqrt(beta) h_0} p^{1/2}`.
pub fn lambda_plus(p: &QParams) -> NormalOrderedVertex {
    let lp = p.log_p();
    NormalOrderedVertex::new("Lambda+", move |n| (n as f64 * lp / 2.0).exp())
        .with_zero_mode_log(p.sqrt_beta() * p.log_q())
        .with_scalar(p.p_pow(0.5))
}

/// `Lambda^- = theta . Lambda^+` (equal to `omega . Lambda^+`).
pub fn lambda_minus(p: &QParams) -> NormalOrderedVertex {
    Involution::Theta.apply(lambda_plus, p).with_label("Lambda-")
}

pub fn lambda(sign: Sign, p: &QParams) -> NormalOrderedVertex {
    match sign {
        Sign::Plus => lambda_plus(p),
        Sign::Minus => lambda_minus(p),
    }
}

/// `T(z) = Lambda^+(z) + Lambda^-(z)`.
pub fn t_current(p: &QParams) -> OperatorSum {
    OperatorSum {
        terms: vec![lambda_plus(p), lambda_minus(p)],
    }
}

/// `S_+(z) = :exp(-sum_{n != 0} (p^{n/2}+p^{-n/2})/(q^{n/2}-q^{-n/2}) h_n z^{-n}): e^{2 sqrt(beta) Q_h} z^{2 sqrt(beta) h_0}`.
pub fn screening_plus(p: &QParams) -> NormalOrderedVertex {
    let (lp, lq) = (p.log_p(), p.log_q());
    let two_sb = 2.0 * p.sqrt_beta();
    NormalOrderedVertex::new("S+", move |n| {
        let nf = n as f64;
        -two_cosh(nf * lp / 2.0) / two_sinh(nf * lq / 2.0)
    })
    .with_charge(two_sb, two_sb)
}

/// `S_- = omega . S_+`.
pub fn screening_minus(p: &QParams) -> NormalOrderedVertex {
    Involution::Omega.apply(screening_plus, p).with_label("S-")
}

pub fn screening(sign: Sign, p: &QParams) -> NormalOrderedVertex {
    match sign {
        Sign::Plus => screening_plus(p),
        Sign::Minus => screening_minus(p),
    }
}

/// `V_{l+1,1}(z) = :exp(sum_{n != 0} h_n z^{-n} / (q^{n/2l} - q^{-n/2l})): e^{-l sqrt(beta) Q_h} z^{-l sqrt(beta) h_0}`.
fn vertex_l1(ell: u32, p: &QParams) -> NormalOrderedVertex {
    let lq = p.log_q();
    let l = f64::from(ell);
    let c = -l * p.sqrt_beta();
    NormalOrderedVertex::new(format!("V({},1)", ell + 1), move |n| 1.0 / two_sinh(n as f64 * lq / (2.0 * l)))
        .with_charge(c, c)
}

/// `V_{l+1,k+1}`: `V_{l+1,1}` for `k = 0`, `V_{1,k+1} = omega . V_{k+1,1}` for
/// `l = 0`, and their normal-ordered product otherwise.
pub fn vertex(ell: u32, k: u32, p: &QParams) -> Result<NormalOrderedVertex> {
    let label = format!("V({},{})", ell + 1, k + 1);
    let v = match (ell, k) {
        (0, 0) => return Err(Error::InvalidArgument("V(1,1) is the identity and is excluded".into())),
        (_, 0) => vertex_l1(ell, p),
        (0, _) => Involution::Omega.apply(|pp| vertex_l1(k, pp), p),
        _ => vertex_l1(ell, p).normal_product(&Involution::Omega.apply(|pp| vertex_l1(k, pp), p)),
    };
    Ok(v.with_label(label))
}

/// The structure functions, each `exp(sum_{n>0} (1/n) c_n x^n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureFamily {
    /// `f(x)` of the current-current relation.
    F,
    /// `g^{(l+1,k+1)}`; `k = 0` and `l = 0` give the single-type factors.
    G { ell: u32, k: u32 },
    /// `g~^{(l+1,k+1)}`.
    GTilde { ell: u32, k: u32 },
}

impl StructureFamily {
    /// The coefficient `c_n`.
    pub fn log_coefficient(&self, p: &QParams, n: i64) -> Result<Complex64> {
        let nf = n as f64;
        match *self {
            Self::F => Ok(-two_sinh(nf * p.log_q() / 2.0) * two_sinh(nf * p.log_t() / 2.0)
                / two_cosh(nf * p.log_p() / 2.0)),
            Self::G { ell, k } => {
                check_types(ell, k)?;
                let mut acc = Complex64::new(0.0, 0.0);
                if ell > 0 {
                    acc += g_single(ell, p, nf);
                }
                if k > 0 {
                    acc += g_single(k, &p.omega(), nf);
                }
                Ok(acc)
            }
            Self::GTilde { ell, k } => {
                check_types(ell, k)?;
                let mut acc = Complex64::new(0.0, 0.0);
                if ell > 0 {
                    acc += g_tilde_single(ell, p, nf);
                }
                if k > 0 {
                    acc += g_tilde_single(k, &p.omega().theta(), nf);
                }
                Ok(acc)
            }
        }
    }
}

fn check_types(ell: u32, k: u32) -> Result<()> {
    if ell == 0 && k == 0 {
        return Err(Error::InvalidArgument("structure function of type (1,1) is undefined".into()));
    }
    Ok(())
}

fn g_single(ell: u32, p: &QParams, n: f64) -> Complex64 {
    let l = f64::from(ell);
    let d = two_sinh(n * p.log_q() / (2.0 * l));
    -two_sinh(n * p.log_t()) / d / two_cosh(n * p.log_p() / 2.0)
        + (p.p_pow(-n / 2.0) * p.q_pow(n / l) - p.p_pow(n / 2.0) * p.q_pow(-n / l)) / d
}

fn g_tilde_single(ell: u32, p: &QParams, n: f64) -> Complex64 {
    let l = f64::from(ell);
    let d = two_sinh(n * p.log_q() / (2.0 * l));
    -p.p_pow(-n / 2.0) * two_sinh(n * p.log_q() / 2.0) * two_sinh(n * p.log_t() / 2.0)
        / (d * two_cosh(n * p.log_p() / 2.0))
}

/// `exp(sum_{n=1}^{order} (1/n) c_n x^n)` for the family.
pub fn structure_series(family: StructureFamily, p: &QParams, order: i64) -> Result<LaurentSeries> {
    let coeffs: Vec<Complex64> = (1..=order.max(0))
        .map(|n| family.log_coefficient(p, n).map(|c| c / n as f64))
        .collect::<Result<_>>()?;
    Ok(series_exp(|n| coeffs[n as usize - 1], order))
}

/// Closed form of `g~^{(l+1,k+1)}(y) <V_{l+1,k+1}(w) Lambda^{+-}(z)>` at `y = z/w`,
/// the factor multiplying `:V(w) Lambda^{+-}(z):` on the right of the
/// commutation relation. For `+` it is identically 1; for `-` it is
///
/// `prod_{j<l} (1 - rho_j t^{1/2} y)/(1 - rho_j t^{-1/2} y) * prod_{i<k} (1 - sigma_i q^{-1/2} y)/(1 - sigma_i q^{1/2} y)`
///
/// with `rho_j = q^{(l-1-2j)/2l}` and `sigma_i = t^{(k-1-2i)/2k}`.
pub fn dressing(sign: Sign, ell: u32, k: u32, p: &QParams, y: Complex64) -> Result<Complex64> {
    check_types(ell, k)?;
    if sign == Sign::Plus {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut acc = Complex64::new(1.0, 0.0);
    let l = f64::from(ell);
    for j in 0..ell {
        let rho = p.q_pow((l - 1.0 - 2.0 * f64::from(j)) / (2.0 * l));
        let den = 1.0 - rho * p.t_pow(-0.5) * y;
        if den.norm() < 1e-14 {
            return Err(Error::Pole(format!("dressing factor pole at y = {y}")));
        }
        acc *= (1.0 - rho * p.t_pow(0.5) * y) / den;
    }
    let kf = f64::from(k);
    for i in 0..k {
        let sigma = p.t_pow((kf - 1.0 - 2.0 * f64::from(i)) / (2.0 * kf));
        let den = 1.0 - sigma * p.q_pow(0.5) * y;
        if den.norm() < 1e-14 {
            return Err(Error::Pole(format!("dressing factor pole at y = {y}")));
        }
        acc *= (1.0 - sigma * p.q_pow(-0.5) * y) / den;
    }
    Ok(acc)
}

/// The dressing as a series: `g~(y)` times the contraction series of `V(w) Lambda^{+-}(z)`.
pub fn dressing_series(sign: Sign, ell: u32, k: u32, p: &QParams, order: i64) -> Result<LaurentSeries> {
    let v = vertex(ell, k, p)?;
    let g = structure_series(StructureFamily::GTilde { ell, k }, p, order)?;
    let con = contract(&v, &lambda(sign, p), p, order);
    g.mul(&con.series)
}

/// `:prod_{j=1}^{l} V_{2,1}(q^{(l+1-2j)/2l} z):` (or, in the `omega` image,
/// `:prod_j V_{1,2}(t^{(l+1-2j)/2l} z):`) as vertex data.
pub fn fused_vertex(ell: u32, frame: Involution, p: &QParams) -> Result<NormalOrderedVertex> {
    if ell == 0 {
        return Err(Error::InvalidArgument("fusion needs ell >= 1".into()));
    }
    let c = frame.params(p);
    let base = frame.apply(|pp| vertex_l1(1, pp), p);
    let l = f64::from(ell);
    let factors: Vec<Factor> = (1..=ell)
        .map(|j| Factor::shifted(base.clone(), 0, c.log_q() * ((l + 1.0 - 2.0 * f64::from(j)) / (2.0 * l))))
        .collect();
    normal_order(factors, p, 1)?.normal_ordered_vertex()
}

/// The two sides of `V_{l+1,1}(q^{-1/l} w) = p^{-1/2} :V_{l+1,1}(w) Lambda^+(p^{1/2} q^{-1/2l} w):` as vertex data.
pub fn shift_identity_sides(ell: u32, frame: Involution, p: &QParams) -> Result<(NormalOrderedVertex, NormalOrderedVertex)> {
    let c = frame.params(p);
    let l = f64::from(ell);
    let v = frame.apply(|pp| vertex_l1(ell, pp), p);
    let lp = frame.apply(lambda_plus, p);
    let lhs = v.shifted(-c.log_q() / l);
    let log_alpha = c.log_p() / 2.0 - c.log_q() / (2.0 * l);
    let rhs = v.normal_product(&lp.shifted(log_alpha)).scaled(c.p_pow(-0.5));
    Ok((lhs, rhs))
}
