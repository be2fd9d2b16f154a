//! Named verification suites and their expansion into independent jobs.

use std::time::Instant;

use qvir_core::correlators::{check_connection_formula, check_four_point_forms, pseudo_constant_check};
use qvir_core::relations::*;
use qvir_core::{CheckReport, Complex64, CorrelatorParams, Involution, MatrixVariant, ParamRecord, QParams};
use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    DefiningRelation,
    ScreeningRelation,
    LambdaVertex,
    CurrentVertex,
    AdjointShift,
    DressedLambda,
    CompositeVertex,
    Fusion,
    ShiftIdentity,
    DeltaIdentity,
    PseudoConstant,
    FourPoint,
    Connection,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Self::DefiningRelation,
        Self::ScreeningRelation,
        Self::LambdaVertex,
        Self::CurrentVertex,
        Self::AdjointShift,
        Self::DressedLambda,
        Self::CompositeVertex,
        Self::Fusion,
        Self::ShiftIdentity,
        Self::DeltaIdentity,
        Self::PseudoConstant,
        Self::FourPoint,
        Self::Connection,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::DefiningRelation => "defining-relation",
            Self::ScreeningRelation => "screening-relation",
            Self::LambdaVertex => "lambda-vertex-relation",
            Self::CurrentVertex => "current-vertex-relation",
            Self::AdjointShift => "adjoint-shift-form",
            Self::DressedLambda => "dressed-lambda-relation",
            Self::CompositeVertex => "composite-vertex-relation",
            Self::Fusion => "fusion",
            Self::ShiftIdentity => "shift-identity",
            Self::DeltaIdentity => "delta-identity",
            Self::PseudoConstant => "pseudo-constant",
            Self::FourPoint => "four-point-forms",
            Self::Connection => "connection-formula",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(Suite::name).chain(std::iter::once("all")).collect()
    }

    /// Parses names; `all` or an empty list selects every suite. Order follows
    /// [`Suite::ALL`] and duplicates collapse, so output order is independent of the input order.
    pub fn parse_list(names: &[String]) -> Result<Vec<Suite>, ConfigError> {
        let mut picked = [false; 13];
        if names.is_empty() {
            picked = [true; 13];
        }
        for n in names {
            if n == "all" {
                picked = [true; 13];
                continue;
            }
            let i = Self::ALL
                .iter()
                .position(|s| s.name() == n)
                .ok_or_else(|| ConfigError::UnknownSuite(n.clone()))?;
            picked[i] = true;
        }
        Ok(Self::ALL.iter().zip(picked).filter(|(_, p)| *p).map(|(s, _)| *s).collect())
    }

    fn default_tol(&self) -> f64 {
        match self {
            Self::Fusion | Self::ShiftIdentity | Self::DeltaIdentity | Self::PseudoConstant => 1e-10,
            Self::Connection => 1e-6,
            _ => 1e-8,
        }
    }
}

/// One report with its wall-clock time.
#[derive(Debug, Clone)]
pub struct Record {
    pub report: CheckReport,
    pub runtime_ms: f64,
}

type JobFn = Box<dyn Fn() -> qvir_core::Result<CheckReport> + Send + Sync>;

struct Job {
    identity: String,
    tol: f64,
    params: ParamRecord,
    run: JobFn,
}

const CONNECTION_SAMPLES: [f64; 3] = [0.6, 1.3, 2.2];
const FOUR_POINT_RATIOS: [f64; 2] = [0.25, 0.5];
const PSEUDO_POINTS: [f64; 2] = [0.35, 0.5];
const ADJOINT_SCALES: [f64; 2] = [1.0, 1.3];

fn ells(cfg: &RunConfig, default: std::ops::RangeInclusive<u32>) -> Vec<u32> {
    match cfg.ell {
        Some(l) => vec![l],
        None => default.collect(),
    }
}

fn jobs_for(suite: Suite, cfg: &RunConfig, p: QParams) -> Vec<Job> {
    let tol = cfg.tol.unwrap_or_else(|| suite.default_tol());
    let mut check = CheckConfig::new(cfg.degree, cfg.window, tol);
    if let Some(seed) = cfg.seed {
        check = check.with_seeded_momenta(seed, 1);
    }
    let base = ParamRecord::from_params(&p);
    let mut jobs = Vec::new();
    let mut push = |identity: String, params: ParamRecord, run: JobFn| {
        jobs.push(Job {
            identity,
            tol,
            params,
            run,
        })
    };
    let frames = [Involution::Identity, Involution::Omega];
    match suite {
        Suite::DefiningRelation => {
            let c = check.clone();
            push(suite.name().into(), base, Box::new(move || check_defining_relation(&p, &c)));
        }
        Suite::ScreeningRelation => {
            for frame in frames {
                let c = check.clone();
                push(suite.name().into(), base.clone(), Box::new(move || check_screening_relation(&p, frame, &c)));
            }
        }
        Suite::LambdaVertex | Suite::CurrentVertex => {
            for ell in ells(cfg, 1..=3) {
                for frame in frames {
                    let c = check.clone();
                    let run: JobFn = if suite == Suite::LambdaVertex {
                        Box::new(move || check_lambda_vertex_relation(ell, &p, frame, &c))
                    } else {
                        Box::new(move || check_current_vertex_relation(ell, &p, frame, &c))
                    };
                    push(suite.name().into(), base.clone().with_ell(ell), run);
                }
            }
        }
        Suite::AdjointShift => {
            for ell in ells(cfg, 1..=2) {
                let c = check.clone();
                let n_window = cfg.window;
                push(
                    suite.name().into(),
                    base.clone().with_ell(ell),
                    Box::new(move || check_adjoint_shift_form(ell, n_window, &p, &c, &ADJOINT_SCALES)),
                );
            }
        }
        Suite::DressedLambda => {
            for ell in ells(cfg, 1..=2) {
                let c = check.clone();
                push(
                    suite.name().into(),
                    base.clone().with_ell(ell),
                    Box::new(move || check_dressed_lambda_relation(ell, &p, Involution::Identity, &c)),
                );
            }
        }
        Suite::CompositeVertex => {
            let pairs = match (cfg.ell, cfg.k) {
                (Some(l), Some(k)) => vec![(l, k)],
                _ => vec![(1, 1), (2, 1), (1, 2)],
            };
            for (ell, k) in pairs {
                let c = check.clone();
                push(
                    suite.name().into(),
                    base.clone().with_ell(ell).with_k(k),
                    Box::new(move || check_composite_vertex_relation(ell, k, &p, Involution::Identity, &c)),
                );
            }
        }
        Suite::Fusion | Suite::ShiftIdentity => {
            for ell in ells(cfg, 1..=3) {
                for frame in frames {
                    let run: JobFn = if suite == Suite::Fusion {
                        Box::new(move || check_fusion(ell, &p, frame, tol))
                    } else {
                        Box::new(move || check_shift_identity(ell, &p, frame, tol))
                    };
                    push(suite.name().into(), base.clone().with_ell(ell), run);
                }
            }
        }
        Suite::DeltaIdentity => {
            let seed = cfg.seed.unwrap_or(0);
            let window = cfg.window.max(8);
            for m in 1..=3 {
                push(
                    suite.name().into(),
                    ParamRecord::default(),
                    Box::new(move || {
                        check_delta_identity_seeded(m, seed, window, tol)
                            .map(|r| r.with_note(format!("{m} ratios, seed {seed}")))
                    }),
                );
            }
        }
        Suite::PseudoConstant => {
            for ell in ells(cfg, 1..=3) {
                for y in PSEUDO_POINTS {
                    push(
                        suite.name().into(),
                        base.clone().with_ell(ell),
                        Box::new(move || pseudo_constant_check(ell, &p, Complex64::new(y, 0.0), tol)),
                    );
                }
            }
        }
        Suite::FourPoint | Suite::Connection => {
            let ell = cfg.ell.unwrap_or(1);
            let (l_label, r) = (cfg.l_label, cfg.r);
            let params = ParamRecord {
                L: Some(l_label),
                r: Some(r),
                ..base.clone().with_ell(ell)
            };
            let run: JobFn = if suite == Suite::FourPoint {
                Box::new(move || check_four_point_forms(&CorrelatorParams::new(p, ell, l_label, r)?, &FOUR_POINT_RATIOS, tol))
            } else {
                Box::new(move || {
                    let cp = CorrelatorParams::new(p, ell, l_label, r)?;
                    let us: Vec<Complex64> = CONNECTION_SAMPLES.iter().map(|&u| Complex64::new(u, 0.0)).collect();
                    let report = check_connection_formula(&us, &cp, tol, MatrixVariant::Printed)?;
                    let line = (r - 1.0) / r;
                    let beta = p.beta().re;
                    Ok(if (beta - line).abs() > 1e-9 && report.note.is_none() {
                        report.with_note(format!("beta = {beta} is off the line (r-1)/r = {line}"))
                    } else {
                        report
                    })
                })
            };
            push(suite.name().into(), params, run);
        }
    }
    jobs
}

fn execute(job: &Job) -> Record {
    let start = Instant::now();
    let report = match (job.run)() {
        Ok(r) => r,
        Err(e) => CheckReport::inconclusive(job.identity.clone(), job.tol, job.params.clone(), e.to_string()),
    };
    Record {
        report,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Runs every selected suite on the rayon pool; records come back in job order.
pub fn run(cfg: &RunConfig) -> Result<Vec<Record>, ConfigError> {
    let p = QParams::new(cfg.q, cfg.t).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let jobs: Vec<Job> = cfg.suites.iter().flat_map(|&s| jobs_for(s, cfg, p)).collect();
    let work = || jobs.par_iter().map(execute).collect::<Vec<_>>();
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ConfigError::Invalid(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse_list(&[s.name().to_string()]).unwrap(), vec![s]);
        }
        assert_eq!(Suite::parse_list(&["all".into()]).unwrap().len(), 13);
        let picked = Suite::parse_list(&["fusion".into(), "defining-relation".into(), "fusion".into()]).unwrap();
        assert_eq!(picked, vec![Suite::DefiningRelation, Suite::Fusion]);
    }
}
