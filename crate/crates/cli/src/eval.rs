//! `qvir eval <function>`: single evaluations.

use qvir_core::correlators::{connection_matrix, four_point_closed, four_point_jackson, two_point};
use qvir_core::qspecial::{bracket, gamma_q, phi21, theta_q};
use qvir_core::{BracketParams, Complex64, CorrelatorParams, QParams, Sign};

use crate::config::{ConfigError, EvalArgs, RunConfig};

pub const FUNCTIONS: [&str; 7] = ["phi21", "gamma", "theta", "bracket", "two-point", "four-point", "connection-matrix"];

fn need(v: Option<f64>, name: &str) -> Result<Complex64, ConfigError> {
    v.map(|x| Complex64::new(x, 0.0))
        .ok_or_else(|| ConfigError::Invalid(format!("--{name} is required")))
}

/// Real numbers print as reals, complex ones as `re+imi`.
pub fn format_value(v: Complex64) -> String {
    if v.im == 0.0 {
        format!("{}", v.re)
    } else {
        format!("{}{:+}i", v.re, v.im)
    }
}

#[derive(Debug)]
pub enum EvalError {
    Config(ConfigError),
    Math(qvir_core::Error),
}

impl From<ConfigError> for EvalError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<qvir_core::Error> for EvalError {
    fn from(e: qvir_core::Error) -> Self {
        Self::Math(e)
    }
}

/// Evaluates and returns the lines to print.
pub fn evaluate(args: &EvalArgs, cfg: &RunConfig) -> Result<Vec<String>, EvalError> {
    let q = Complex64::new(cfg.q, 0.0);
    let params = || QParams::new(cfg.q, cfg.t).map_err(|e| ConfigError::Invalid(e.to_string()));
    let ell = cfg.ell.unwrap_or(1);
    let value = match args.function.as_str() {
        "phi21" => phi21(need(args.a, "a")?, need(args.b, "b")?, need(args.c, "c")?, q, need(args.z, "z")?)?,
        "gamma" => gamma_q(need(args.z, "z")?, q)?,
        "theta" => theta_q(need(args.z, "z")?, q)?,
        "bracket" => bracket(need(args.u, "u")?, &BracketParams::new(cfg.r, ell, &params()?)?)?,
        "two-point" => two_point(ell, &params()?, need(args.z, "z")?, need(args.w, "w")?)?,
        "four-point" => {
            let sign = match args.sign.as_str() {
                "+" | "plus" => Sign::Plus,
                "-" | "minus" => Sign::Minus,
                other => return Err(ConfigError::Invalid(format!("--sign must be + or -, got {other:?}")).into()),
            };
            let cp = CorrelatorParams::new(params()?, ell, cfg.l_label, cfg.r)?;
            let (z, w) = (need(args.z, "z")?, need(args.w, "w")?);
            match args.method.as_str() {
                "closed" => four_point_closed(sign, z, w, &cp)?,
                "jackson" => four_point_jackson(sign, z, w, &cp)?,
                other => return Err(ConfigError::Invalid(format!("--method must be closed or jackson, got {other:?}")).into()),
            }
        }
        "connection-matrix" => {
            let cp = CorrelatorParams::new(params()?, ell, cfg.l_label, cfg.r)?;
            let m = connection_matrix(need(args.u, "u")?, &cp)?;
            return Ok(vec![
                format!("{} {}", format_value(m.entries[(0, 0)]), format_value(m.entries[(0, 1)])),
                format!("{} {}", format_value(m.entries[(1, 0)]), format_value(m.entries[(1, 1)])),
                format!("prefactor {}", format_value(m.prefactor)),
            ]);
        }
        other => {
            return Err(ConfigError::Invalid(format!("unknown function {other:?}; valid: {}", FUNCTIONS.join(", "))).into())
        }
    };
    Ok(vec![format_value(value)])
}
