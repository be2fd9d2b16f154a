//! Scalar q-special functions: multi-base q-Pochhammer symbols, q-Gamma and
//! q-Beta, the theta function, the basic hypergeometric series 2phi1,
//! Jackson integrals and the theta-function bracket `[u]`.
//!
//! Everything works in `Complex64` with principal branches for fractional
//! powers. Fractional powers of `q` and `t` are always taken through the
//! stored logarithms in [`QParams`], never by re-taking a logarithm of a
//! derived quantity.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Direction, Error, Result};

/// Deformation parameters `(q, t)` with `beta = log t / log q` and `p = q / t`.
///
/// `QParams::new` enforces the default regime `0 < |q|, |t| < 1`, `q != t`.
/// Images under the involutions (which leave that regime) are built with
/// [`QParams::theta`], [`QParams::omega`] or [`QParams::from_logs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParams {
    q: Complex64,
    t: Complex64,
    log_q: Complex64,
    log_t: Complex64,
    beta: Complex64,
    sqrt_beta: Complex64,
}

impl QParams {
    pub fn new(q: impl Into<Complex64>, t: impl Into<Complex64>) -> Result<Self> {
        let (q, t) = (q.into(), t.into());
        for (name, v) in [("q", q), ("t", t)] {
            if !v.is_finite() || v.norm() == 0.0 {
                return Err(Error::Domain(format!("{name} = {v} must be finite and nonzero")));
            }
            if v.norm() >= 1.0 {
                return Err(Error::Domain(format!("|{name}| = {} must be < 1", v.norm())));
            }
        }
        if q == t {
            return Err(Error::Domain("q = t gives p = 1, excluded from the default regime".into()));
        }
        // keep q and t exactly as given rather than exp(ln q)
        Ok(Self { q, t, ..Self::from_logs(q.ln(), t.ln()) })
    }

    /// Builds parameters from principal logarithms without any regime check.
    ///
    /// Used for involution images and for degenerate points such as `t = 1`.
    pub fn from_logs(log_q: Complex64, log_t: Complex64) -> Self {
        let beta = log_t / log_q;
        Self {
            q: log_q.exp(),
            t: log_t.exp(),
            log_q,
            log_t,
            beta,
            sqrt_beta: beta.sqrt(),
        }
    }

    /// Unchecked constructor from values (principal logarithms).
    pub fn new_unchecked(q: impl Into<Complex64>, t: impl Into<Complex64>) -> Self {
        Self::from_logs(q.into().ln(), t.into().ln())
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }
    pub fn t(&self) -> Complex64 {
        self.t
    }
    pub fn log_q(&self) -> Complex64 {
        self.log_q
    }
    pub fn log_t(&self) -> Complex64 {
        self.log_t
    }
    pub fn log_p(&self) -> Complex64 {
        self.log_q - self.log_t
    }
    pub fn beta(&self) -> Complex64 {
        self.beta
    }
    pub fn sqrt_beta(&self) -> Complex64 {
        self.sqrt_beta
    }
    pub fn p(&self) -> Complex64 {
        self.log_p().exp()
    }

    /// `q^e` on the principal branch.
    pub fn q_pow(&self, e: f64) -> Complex64 {
        (self.log_q * e).exp()
    }
    pub fn t_pow(&self, e: f64) -> Complex64 {
        (self.log_t * e).exp()
    }
    pub fn p_pow(&self, e: f64) -> Complex64 {
        (self.log_p() * e).exp()
    }
    pub fn q_powc(&self, e: Complex64) -> Complex64 {
        (self.log_q * e).exp()
    }

    /// Image under `(q, t) -> (1/q, 1/t)`.
    pub fn theta(&self) -> Self {
        Self::from_logs(-self.log_q, -self.log_t)
    }

    /// Image under `q <-> t` (so `beta -> 1/beta`, `p -> 1/p`).
    pub fn omega(&self) -> Self {
        Self::from_logs(self.log_t, self.log_q)
    }
}

/// Truncation policy for infinite products, sums and Jackson integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Relative tail threshold.
    pub eps: f64,
    /// Hard cap on the number of terms (per direction).
    pub max_terms: usize,
    /// Consecutive sub-threshold terms required before a Jackson sum stops.
    pub quiet_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            eps: 1e-14,
            max_terms: 100_000,
            quiet_terms: 5,
        }
    }
}

/// Order of a Pochhammer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochOrder {
    Finite(u32),
    Infinite,
}

/// `(a; q_1, ..., q_l)_n = prod_{k_1..k_l = 0}^{n-1} (1 - a q_1^{k_1} ... q_l^{k_l})`.
///
/// With no bases this is the single factor `1 - a`.
pub fn pochhammer(a: Complex64, bases: &[Complex64], order: PochOrder) -> Result<Complex64> {
    pochhammer_with(a, bases, order, &SeriesControl::default())
}

pub fn pochhammer_with(
    a: Complex64,
    bases: &[Complex64],
    order: PochOrder,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    match order {
        PochOrder::Finite(n) => Ok(poch_finite(a, bases, n)),
        PochOrder::Infinite => {
            if let Some(b) = bases.iter().find(|b| b.norm() >= 1.0) {
                return Err(Error::Domain(format!(
                    "infinite Pochhammer product with |base| = {} >= 1",
                    b.norm()
                )));
            }
            let damping: f64 = bases.iter().map(|b| 1.0 - b.norm()).product();
            poch_infinite(a, bases, damping, ctl)
        }
    }
}

fn poch_finite(a: Complex64, bases: &[Complex64], n: u32) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    match bases.split_first() {
        None => 1.0 - a,
        Some((b, rest)) => {
            let mut acc = Complex64::new(1.0, 0.0);
            let mut y = a;
            for _ in 0..n {
                acc *= poch_finite(y, rest, n);
                y *= b;
            }
            acc
        }
    }
}

// `damping` is prod (1 - |b_i|) over all bases, so |y| / damping bounds the
// log of the remaining tail.
fn poch_infinite(a: Complex64, bases: &[Complex64], damping: f64, ctl: &SeriesControl) -> Result<Complex64> {
    let Some((b, rest)) = bases.split_first() else {
        return Ok(1.0 - a);
    };
    let mut acc = Complex64::new(1.0, 0.0);
    let mut y = a;
    for _ in 0..ctl.max_terms {
        if y.norm() <= ctl.eps * damping * 1e-2 {
            return Ok(acc);
        }
        acc *= poch_infinite(y, rest, damping, ctl)?;
        if acc.norm() == 0.0 {
            return Ok(acc);
        }
        y *= b;
    }
    Err(Error::Convergence {
        direction: Direction::Forward,
        terms: ctl.max_terms,
        context: format!("infinite Pochhammer product (a = {a}, base = {b})"),
    })
}

/// `(a; q)_inf` for a single base.
pub fn qpoch_inf(a: Complex64, q: Complex64) -> Result<Complex64> {
    pochhammer(a, &[q], PochOrder::Infinite)
}

// (q^z; q)_inf with pole detection on exact vanishing factors.
fn qpoch_inf_power(z: Complex64, q: Complex64, what: &str) -> Result<Complex64> {
    let log_q = q.ln();
    let ctl = SeriesControl::default();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut y = (z * log_q).exp();
    for k in 0..ctl.max_terms {
        let factor = 1.0 - y;
        if factor.norm() < 1e-13 {
            return Err(Error::Pole(format!("{what}: q^(z+{k}) = 1 at z = {z}")));
        }
        acc *= factor;
        if y.norm() <= ctl.eps * (1.0 - q.norm()) * 1e-2 {
            return Ok(acc);
        }
        y *= q;
    }
    Err(Error::Convergence {
        direction: Direction::Forward,
        terms: ctl.max_terms,
        context: format!("{what}: (q^z; q)_inf at z = {z}"),
    })
}

fn check_base(q: Complex64) -> Result<()> {
    if q.norm() >= 1.0 || q.norm() == 0.0 {
        return Err(Error::Domain(format!("base q = {q} must satisfy 0 < |q| < 1")));
    }
    Ok(())
}

/// `Gamma_q(z) = (1-q)^{1-z} (q;q)_inf / (q^z;q)_inf`.
pub fn gamma_q(z: Complex64, q: Complex64) -> Result<Complex64> {
    check_base(q)?;
    let num = qpoch_inf(q, q)?;
    let den = qpoch_inf_power(z, q, "Gamma_q")?;
    Ok(((1.0 - z) * (1.0 - q).ln()).exp() * num / den)
}

/// `B_q(x, y) = Gamma_q(x) Gamma_q(y) / Gamma_q(x + y)`, evaluated in the
/// cancelled product form `(1-q) (q;q)(q^{x+y};q) / ((q^x;q)(q^y;q))`.
pub fn beta_q(x: Complex64, y: Complex64, q: Complex64) -> Result<Complex64> {
    check_base(q)?;
    let num = qpoch_inf(q, q)? * qpoch_inf(((x + y) * q.ln()).exp(), q)?;
    let den = qpoch_inf_power(x, q, "B_q first argument")? * qpoch_inf_power(y, q, "B_q second argument")?;
    Ok((1.0 - q) * num / den)
}

/// `theta_q(z) = (q;q)_inf (z;q)_inf (q/z;q)_inf`.
pub fn theta_q(z: Complex64, q: Complex64) -> Result<Complex64> {
    check_base(q)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("theta_q(0) is undefined".into()));
    }
    Ok(qpoch_inf(q, q)? * qpoch_inf(z, q)? * qpoch_inf(q / z, q)?)
}

/// Basic hypergeometric series `2phi1(a, b; c; q, z)`.
pub fn phi21(a: Complex64, b: Complex64, c: Complex64, q: Complex64, z: Complex64) -> Result<Complex64> {
    phi21_with(a, b, c, q, z, &SeriesControl::default())
}

pub fn phi21_with(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    q: Complex64,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    check_base(q)?;
    if z.norm() >= 1.0 {
        return Err(Error::Convergence {
            direction: Direction::Forward,
            terms: 0,
            context: format!("2phi1 requires |z| < 1, got |z| = {}", z.norm()),
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 0..ctl.max_terms {
        sum += term;
        let den_c = 1.0 - c * qn;
        let next = term * (1.0 - a * qn) * (1.0 - b * qn);
        if next.norm() == 0.0 {
            // terminating series
            return Ok(sum);
        }
        if den_c.norm() < 1e-14 {
            return Err(Error::Pole(format!("2phi1: 1 - c q^{n} = 0 at c = {c}")));
        }
        let next = next / ((1.0 - qn * q) * den_c) * z;
        let ratio = next.norm() / term.norm();
        term = next;
        qn *= q;
        if ratio < 1.0 && term.norm() / (1.0 - ratio) <= ctl.eps * sum.norm() {
            return Ok(sum + term);
        }
    }
    Err(Error::Convergence {
        direction: Direction::Forward,
        terms: ctl.max_terms,
        context: "2phi1 partial sums".into(),
    })
}

/// Integration range of a Jackson integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JacksonRange {
    /// `int_0^a d_q z f(z) = a(1-q) sum_{n>=0} f(a q^n) q^n`.
    ZeroTo(Complex64),
    /// `int_0^{a inf} d_q z f(z) = a(1-q) sum_{n in Z} f(a q^n) q^n`.
    ZeroToInfinity(Complex64),
    /// `int_A^B = int_0^B - int_0^A`.
    Between(Complex64, Complex64),
    /// `int_a^{a inf} = int_0^{a inf} - int_0^a`, summed directly over `n <= -1`.
    ToInfinity(Complex64),
}

/// Jackson integral of an infallible integrand.
pub fn jackson_integral<F>(mut f: F, range: JacksonRange, q: Complex64) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Complex64,
{
    try_jackson_integral(|z| Ok(f(z)), range, q, &SeriesControl::default())
}

/// Jackson integral of a fallible integrand (pole errors propagate).
pub fn try_jackson_integral<F>(mut f: F, range: JacksonRange, q: Complex64, ctl: &SeriesControl) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    check_base(q)?;
    match range {
        JacksonRange::ZeroTo(a) => Ok(a * (1.0 - q) * jackson_sum(&mut f, a, q, Direction::Forward, ctl)?),
        JacksonRange::ZeroToInfinity(a) => {
            let fwd = jackson_sum(&mut f, a, q, Direction::Forward, ctl)?;
            let bwd = jackson_sum(&mut f, a, q, Direction::Backward, ctl)?;
            Ok(a * (1.0 - q) * (fwd + bwd))
        }
        JacksonRange::ToInfinity(a) => Ok(a * (1.0 - q) * jackson_sum(&mut f, a, q, Direction::Backward, ctl)?),
        JacksonRange::Between(lo, hi) => {
            if lo == hi {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let upper = hi * (1.0 - q) * jackson_sum(&mut f, hi, q, Direction::Forward, ctl)?;
            let lower = lo * (1.0 - q) * jackson_sum(&mut f, lo, q, Direction::Forward, ctl)?;
            Ok(upper - lower)
        }
    }
}

// sum of f(a q^n) q^n over n >= 0 (Forward) or n <= -1 (Backward).
fn jackson_sum<F>(f: &mut F, a: Complex64, q: Complex64, dir: Direction, ctl: &SeriesControl) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let step = match dir {
        Direction::Forward => q,
        Direction::Backward => 1.0 / q,
    };
    let mut weight = match dir {
        Direction::Forward => Complex64::new(1.0, 0.0),
        Direction::Backward => 1.0 / q,
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut quiet = 0usize;
    let mut used = 0usize;
    for _ in 0..ctl.max_terms {
        let node = a * weight;
        if !node.is_finite() || node.norm() == 0.0 {
            break;
        }
        let term = f(node)? * weight;
        used += 1;
        if !term.is_finite() {
            break;
        }
        sum += term;
        if term.norm() <= ctl.eps * sum.norm() {
            quiet += 1;
            if quiet >= ctl.quiet_terms {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
        weight *= step;
    }
    Err(Error::Convergence {
        direction: dir,
        terms: used,
        context: format!("Jackson sum at a = {a}, base {q}"),
    })
}

/// Parameters of the theta-function bracket `[u]`: `x = q^{1/(2 r l)}` and
/// `epsilon = -2 pi^2 / log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketParams {
    pub r: f64,
    pub ell: u32,
    log_x: Complex64,
    pub epsilon: f64,
}

impl BracketParams {
    pub fn new(r: f64, ell: u32, params: &QParams) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("bracket parameter r = {r} must be positive")));
        }
        if ell == 0 {
            return Err(Error::InvalidArgument("bracket requires ell >= 1".into()));
        }
        let log_x = params.log_q() / (2.0 * r * f64::from(ell));
        let epsilon = -2.0 * PI * PI / log_x.re;
        Ok(Self { r, ell, log_x, epsilon })
    }

    pub fn x(&self) -> Complex64 {
        self.log_x.exp()
    }
    pub fn log_x(&self) -> Complex64 {
        self.log_x
    }
    /// `x^e` on the principal branch.
    pub fn x_pow(&self, e: Complex64) -> Complex64 {
        (self.log_x * e).exp()
    }
    /// The constant `sqrt(2 pi r / epsilon)`. It cancels from every ratio of
    /// brackets with equal numbers of factors upstairs and downstairs.
    pub fn normalization(&self) -> f64 {
        (2.0 * PI * self.r / self.epsilon).sqrt()
    }
}

/// `[u] = sqrt(2 pi r / eps) x^{r/4} x^{u(u-r)/r} theta_{x^{2r}}(x^{2u})`.
pub fn bracket(u: Complex64, bp: &BracketParams) -> Result<Complex64> {
    let r = bp.r;
    let nome = bp.x_pow(Complex64::new(2.0 * r, 0.0));
    let th = theta_q(bp.x_pow(2.0 * u), nome)?;
    Ok(bp.normalization() * bp.x_pow(Complex64::new(r / 4.0, 0.0)) * bp.x_pow(u * (u - r) / r) * th)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn params_reject_outside_default_regime() {
        assert!(QParams::new(1.2, 0.3).is_err());
        assert!(QParams::new(0.3, 1.0).is_err());
        assert!(QParams::new(0.3, 0.3).is_err());
        let p = QParams::new(0.7, 0.3).unwrap();
        assert_abs_diff_eq!((p.p() * p.t() - p.q()).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((p.q_powc(p.beta()) - p.t()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn involution_images_swap_and_invert() {
        let p = QParams::new(0.7, 0.3).unwrap();
        let w = p.omega();
        assert_abs_diff_eq!((w.beta() * p.beta() - 1.0).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((w.p() * p.p() - 1.0).norm(), 0.0, epsilon = 1e-14);
        let th = p.theta();
        assert_abs_diff_eq!((th.q() * p.q() - 1.0).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((th.beta() - p.beta()).norm(), 0.0, epsilon = 1e-14);
        assert_eq!(p.theta().theta(), p);
        assert_eq!(p.omega().omega(), p);
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(c(0.3), &[c(0.5)], PochOrder::Finite(0)).unwrap(), c(1.0));
        assert_eq!(pochhammer(c(0.0), &[c(0.5)], PochOrder::Infinite).unwrap(), c(1.0));
        let v = pochhammer(c(0.5), &[c(0.5)], PochOrder::Finite(2)).unwrap();
        assert_abs_diff_eq!(v.re, 0.375, epsilon = 1e-15);
        assert!(matches!(
            pochhammer(c(0.5), &[c(1.1)], PochOrder::Infinite),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pochhammer_recursion() {
        for &(a, q) in &[(0.3, 0.5), (-0.7, 0.9), (1.4, 0.2)] {
            for n in 0..20u32 {
                let lhs = pochhammer(c(a), &[c(q)], PochOrder::Finite(n + 1)).unwrap();
                let rhs = pochhammer(c(a), &[c(q)], PochOrder::Finite(n)).unwrap() * (1.0 - a * q.powi(n as i32));
                assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn multi_base_finite_matches_nested_product() {
        let (a, q1, q2) = (c(0.4), c(0.5), c(0.3));
        let mut brute = c(1.0);
        for i in 0..3 {
            for j in 0..3 {
                brute *= 1.0 - a * q1.powi(i) * q2.powi(j);
            }
        }
        let v = pochhammer(a, &[q1, q2], PochOrder::Finite(3)).unwrap();
        assert_abs_diff_eq!((v - brute).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn multi_base_infinite_matches_log_series() {
        // log (a; q1, q2)_inf = -sum_n a^n / (n (1 - q1^n)(1 - q2^n))
        let (a, q1, q2) = (0.35f64, 0.4f64, 0.6f64);
        let log: f64 = (1..400)
            .map(|n| {
                let n = n as f64;
                -a.powf(n) / (n * (1.0 - q1.powf(n)) * (1.0 - q2.powf(n)))
            })
            .sum();
        let v = pochhammer(c(a), &[c(q1), c(q2)], PochOrder::Infinite).unwrap();
        assert_abs_diff_eq!(v.re, log.exp(), epsilon = 1e-13);
    }

    #[test]
    fn gamma_q_examples() {
        let q = c(0.37);
        assert_abs_diff_eq!((gamma_q(c(1.0), q).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((gamma_q(c(2.0), q).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-14);
        assert!(matches!(gamma_q(c(0.0), q), Err(Error::Pole(_))));
        assert!(matches!(gamma_q(c(-3.0), q), Err(Error::Pole(_))));
        let (x, y, q) = (c(0.3), c(0.7), c(0.5));
        assert_abs_diff_eq!((beta_q(x, y, q).unwrap() - beta_q(y, x, q).unwrap()).norm(), 0.0, epsilon = 1e-15);
        let via_gamma = gamma_q(x, q).unwrap() * gamma_q(y, q).unwrap() / gamma_q(x + y, q).unwrap();
        assert_abs_diff_eq!((beta_q(x, y, q).unwrap() - via_gamma).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn gamma_q_functional_equation_grid() {
        for &q in &[0.2, 0.5, 0.8] {
            for k in 0..12 {
                let z = c(0.15 + 0.31 * k as f64);
                let lhs = gamma_q(z + 1.0, c(q)).unwrap();
                let rhs = (1.0 - c(q).powc(z)) / (1.0 - q) * gamma_q(z, c(q)).unwrap();
                assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0), "q={q} z={z}");
            }
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_q(c(1.0), c(0.5)).unwrap().norm(), 0.0);
        assert!(theta_q(c(0.0), c(0.5)).is_err());
        let (z, q) = (c(0.3), c(0.5));
        let lhs = theta_q(q * z, q).unwrap();
        let rhs = -theta_q(z, q).unwrap() / z;
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn theta_matches_truncated_triple_products() {
        let (z, q) = (0.2f64, 0.4f64);
        let trunc = |terms: i32| {
            let mut acc = 1.0;
            for k in 0..terms {
                acc *= (1.0 - q.powi(k + 1)) * (1.0 - z * q.powi(k)) * (1.0 - q.powi(k + 1) / z);
            }
            acc
        };
        let (t60, t120) = (trunc(60), trunc(120));
        assert_abs_diff_eq!(t60, t120, epsilon = 1e-12);
        assert_abs_diff_eq!(theta_q(c(z), c(q)).unwrap().re, t120, epsilon = 1e-12);
    }

    #[test]
    fn phi21_examples() {
        let (a, b, cc, q) = (c(0.2), c(0.3), c(0.6), c(0.5));
        assert_eq!(phi21(a, b, cc, q, c(0.0)).unwrap(), c(1.0));
        // q-binomial theorem
        let z = c(0.3);
        let v = phi21(a, b, b, q, z).unwrap();
        let closed = qpoch_inf(a * z, q).unwrap() / qpoch_inf(z, q).unwrap();
        assert_abs_diff_eq!((v - closed).norm(), 0.0, epsilon = 1e-12);
        assert!(matches!(phi21(a, b, cc, q, c(1.0)), Err(Error::Convergence { .. })));
        assert!(matches!(phi21(a, b, c(4.0), q, c(0.5)), Err(Error::Pole(_))));
    }

    #[test]
    fn phi21_long_sum() {
        let (q, z) = (0.5f64, 0.25f64);
        let (a, b, cc) = (q, q, q * 0.9);
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..200 {
            sum += term;
            let qn = q.powi(n);
            term *= (1.0 - a * qn) * (1.0 - b * qn) / ((1.0 - q * qn) * (1.0 - cc * qn)) * z;
        }
        let v = phi21(c(a), c(b), c(cc), c(q), c(z)).unwrap();
        assert_abs_diff_eq!(v.re, sum, epsilon = 1e-12);
    }

    #[test]
    fn jackson_examples() {
        let q = c(0.5);
        let one = jackson_integral(|_| c(1.0), JacksonRange::ZeroTo(c(1.0)), q).unwrap();
        assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-15);
        let lin = jackson_integral(|z| z, JacksonRange::ZeroTo(c(1.0)), q).unwrap();
        assert_abs_diff_eq!(lin.re, 2.0 / 3.0, epsilon = 1e-15);
        let zero = jackson_integral(|z| z, JacksonRange::Between(c(0.4), c(0.4)), q).unwrap();
        assert_eq!(zero, c(0.0));
    }

    #[test]
    fn bilateral_jackson_splits() {
        // f(z) = z^s / (1 + z)^2 decays both ways for 0 < s < 2
        let q = c(0.6);
        let a = c(0.8);
        let f = |z: Complex64| z.powf(0.7) / ((1.0 + z) * (1.0 + z));
        let full = jackson_integral(f, JacksonRange::ZeroToInfinity(a), q).unwrap();
        let low = jackson_integral(f, JacksonRange::ZeroTo(a), q).unwrap();
        let high = jackson_integral(f, JacksonRange::ToInfinity(a), q).unwrap();
        assert_abs_diff_eq!((full - low - high).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bilateral_divergence_reports_direction() {
        let err = jackson_integral(|z| z.powf(-2.0), JacksonRange::ZeroToInfinity(c(1.0)), c(0.5)).unwrap_err();
        match err {
            Error::Convergence { direction, .. } => assert_eq!(direction, Direction::Forward),
            other => panic!("unexpected {other:?}"),
        }
        let err = jackson_integral(|z| z, JacksonRange::ToInfinity(c(1.0)), c(0.5)).unwrap_err();
        assert!(matches!(err, Error::Convergence { direction: Direction::Backward, .. }));
    }

    #[test]
    fn bracket_examples() {
        let p = QParams::new(0.5, 0.2).unwrap();
        let bp = BracketParams::new(5.0, 1, &p).unwrap();
        assert!(bp.epsilon > 0.0);
        assert_abs_diff_eq!((bp.x_pow(c(2.0 * 5.0)) - p.q()).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(bracket(c(0.0), &bp).unwrap().norm(), 0.0);
        assert!(bracket(c(5.0), &bp).unwrap().norm() < 1e-15);
        let u = c(0.7);
        let s = bracket(u, &bp).unwrap() + bracket(-u, &bp).unwrap();
        assert_abs_diff_eq!(s.norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn bracket_antisymmetry_grid() {
        let p = QParams::new(0.7, 0.3).unwrap();
        for &(r, ell) in &[(5.0, 1), (3.5, 2), (7.0, 3)] {
            let bp = BracketParams::new(r, ell, &p).unwrap();
            for k in 0..15 {
                let u = c(-2.1 + 0.37 * k as f64);
                let s = bracket(u, &bp).unwrap() + bracket(-u, &bp).unwrap();
                assert!(s.norm() < 1e-12, "r={r} u={u}");
            }
        }
    }
}
