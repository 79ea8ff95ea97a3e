//! Trials: generate, solve, verify, aggregate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shadowkit::verify::{exponential_bound_trace, BoundMode};
use shadowkit::{
    generate, perturb_pair, shadow_contracting, shadow_expanding, shadow_h, shadow_hyperbolic, shadow_slimit_gluing,
    Anchor, Criteria, DefectProfile, DefectSchedule, Point, PseudoOrbit, ShadowCertificate, TailTest, Thresholds,
};

use crate::config::{ExperimentConfig, SolverKind};
use crate::systems::{anchor, build, Built};
use crate::CliError;

/// Per-trial seed; trials are independent streams of the run seed.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One named pass/fail check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub pseudo_orbit: Vec<Point>,
    pub defects: Vec<f64>,
    pub certificate: ShadowCertificate,
    pub violations: usize,
    pub checks: Vec<Check>,
}

impl TrialOutcome {
    pub fn max_error(&self) -> f64 {
        self.certificate.max_error()
    }
}

/// Builds trial `t`'s system and pseudo-orbit.
pub fn generate_trial(cfg: &ExperimentConfig, t: usize) -> Result<(Built, PseudoOrbit), CliError> {
    let ts = trial_seed(cfg.seed, t);
    let built = build(&cfg.system, ts)?;
    let schedule = DefectSchedule::new(cfg.defect_profile()?, cfg.defects.sampling, ts);
    let mut rng = rng_for(ts, 1);
    let p = match &built {
        Built::Hyperbolic(fam) => {
            let x = anchor(&cfg.system, fam.system.space(), &mut rng)?;
            let (s, u) = x.into_pair().expect("split point");
            perturb_pair(
                &fam.system,
                (&fam.stable, Anchor::Forward(s)),
                (&fam.unstable, Anchor::Backward(u)),
                cfg.horizon,
                &schedule,
            )?
        }
        Built::Plain(sys) => {
            let x = anchor(&cfg.system, sys.space(), &mut rng)?;
            // expanding pseudo-orbits are generated from the end so they stay bounded
            let backward = match cfg.solver.kind {
                SolverKind::Expanding | SolverKind::Gluing => true,
                SolverKind::H => sys.beta().is_some(),
                _ => false,
            };
            let a = if backward { Anchor::Backward(x) } else { Anchor::Forward(x) };
            generate(sys, a, cfg.horizon, &schedule)?
        }
    };
    Ok((built, p))
}

fn tail_test(cfg: &ExperimentConfig, len: usize) -> Option<TailTest> {
    cfg.verify.tail_tol.map(|tol| match cfg.verify.tail_window {
        Some(w) => TailTest { window: w, tol },
        None => TailTest::final_quarter(len, tol),
    })
}

fn solve(cfg: &ExperimentConfig, built: &Built, p: &PseudoOrbit, ts: u64) -> Result<ShadowCertificate, CliError> {
    let kind = cfg.solver.kind;
    Ok(match (kind, built) {
        (SolverKind::Hyperbolic, Built::Hyperbolic(fam)) => shadow_hyperbolic(fam, p, cfg.solver.tol)?.certificate,
        (SolverKind::Hyperbolic, _) | (_, Built::Hyperbolic(_)) => {
            return Err(CliError::Config("the hyperbolic solver and catalog go together".into()))
        }
        (SolverKind::Contracting, Built::Plain(sys)) => {
            let start = match (cfg.solver.start_radius_fraction, cfg.verify.epsilon) {
                (Some(f), Some(eps)) => {
                    let mut rng = rng_for(ts, 3);
                    let r = f * eps * rng.random::<f64>();
                    Some(sys.space().perturb(p.first(), r, &mut rng))
                }
                _ => None,
            };
            shadow_contracting(sys, p, start.as_ref())?
        }
        (SolverKind::Expanding, Built::Plain(sys)) => shadow_expanding(sys, p, cfg.solver.tol)?.0,
        (SolverKind::H, Built::Plain(sys)) => shadow_h(sys, p)?,
        (SolverKind::Gluing, Built::Plain(sys)) => {
            let delta = cfg
                .solver
                .delta
                .ok_or_else(|| CliError::Config("gluing needs solver.delta".into()))?;
            let tail = tail_test(cfg, p.len()).ok_or_else(|| CliError::Config("gluing needs verify.tail_tol".into()))?;
            shadow_slimit_gluing(sys, p, cfg.solver.stages, &Criteria { delta: Some(delta), tail: Some(tail), exponential: None })?
                .certificate
        }
    })
}

/// The exponential error envelope implied by an exponential defect profile.
fn exponential_envelope(cfg: &ExperimentConfig, built: &Built) -> Result<Option<shadowkit::verify::ExponentialBound>, CliError> {
    if !cfg.verify.exponential {
        return Ok(None);
    }
    let DefectProfile::Exponential { l, theta } = cfg.defect_profile()? else {
        return Err(CliError::Config("verify.exponential needs an exponential defect profile".into()));
    };
    let sys = built.system();
    let mode = match cfg.solver.kind {
        SolverKind::Contracting => BoundMode::Contracting {
            alpha: sys.alpha().ok_or_else(|| CliError::Config("system has no contraction certificate".into()))?,
        },
        SolverKind::Expanding => BoundMode::Expanding {
            beta: sys.beta().ok_or_else(|| CliError::Config("system has no expansion certificate".into()))?,
        },
        _ => return Err(CliError::Config("exponential checks apply to contracting and expanding solvers".into())),
    };
    Ok(Some(exponential_bound_trace(mode, l, theta)?))
}

pub fn run_trial(cfg: &ExperimentConfig, t: usize) -> Result<TrialOutcome, CliError> {
    let ts = trial_seed(cfg.seed, t);
    let (built, p) = generate_trial(cfg, t)?;
    let envelope = exponential_envelope(cfg, &built)?;
    let mut cert = solve(cfg, &built, &p, ts)?;
    let slack = cfg.verify.slack;
    cert.assess(&Thresholds { eps: None, tail: tail_test(cfg, p.len()), exponential: None })?;

    let violations = cert.bound_violations(slack).len();
    let mut checks = vec![Check { name: "bound domination".into(), pass: violations == 0 }];
    if let Some(eps) = cfg.verify.epsilon {
        checks.push(Check { name: format!("max_error ≤ {eps}"), pass: cert.max_error() <= eps + slack });
    }
    if let Some(l) = cert.flags.limit_ok {
        checks.push(Check { name: format!("tail_sup < {}", l.tol), pass: l.holds });
    }
    if let Some(env) = envelope {
        let pass = cert.errors.iter().enumerate().all(|(n, &e)| e <= env.at(n) + slack);
        checks.push(Check { name: "exponential bound".into(), pass });
    }
    if let Some(hit) = cert.flags.exact_hit {
        checks.push(Check { name: "exact hit".into(), pass: hit });
    }
    Ok(TrialOutcome {
        trial: t,
        defects: p.defects().to_vec(),
        pseudo_orbit: p.into_points(),
        certificate: cert,
        violations,
        checks,
    })
}

/// All trials, in trial order regardless of scheduling.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialOutcome>, CliError> {
    (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect()
}

/// One row of the per-step table: worst case over trials at step `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub n: usize,
    /// `tau_n`; absent at the final index.
    pub defect: Option<f64>,
    pub shadow_error: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub horizon: usize,
    pub max_error: f64,
    pub tail_sup: Option<f64>,
    pub bound_violations: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub summary: Summary,
    pub rows: Vec<StepRow>,
}

pub fn aggregate(cfg: &ExperimentConfig, outcomes: &[TrialOutcome]) -> RunReport {
    let len = outcomes.iter().map(|o| o.certificate.errors.len()).max().unwrap_or(0);
    let slack = cfg.verify.slack;
    let rows = (0..len)
        .map(|n| {
            let mut row = StepRow { n, defect: None, shadow_error: 0.0, bound: 0.0, pass: true };
            for o in outcomes {
                if let Some(&d) = o.defects.get(n) {
                    row.defect = Some(row.defect.unwrap_or(0.0).max(d));
                }
                let (e, b) = (o.certificate.errors[n], o.certificate.bound[n]);
                row.shadow_error = row.shadow_error.max(e);
                row.bound = row.bound.max(b);
                row.pass &= e <= b + slack;
            }
            row
        })
        .collect();

    let mut checks: Vec<Check> = Vec::new();
    for o in outcomes {
        for c in &o.checks {
            match checks.iter_mut().find(|k| k.name == c.name) {
                Some(k) => k.pass &= c.pass,
                None => checks.push(c.clone()),
            }
        }
    }
    let tail_sup = outcomes
        .iter()
        .filter_map(|o| o.certificate.flags.limit_ok.map(|l| l.tail_sup))
        .reduce(f64::max);
    let summary = Summary {
        trials: outcomes.len(),
        horizon: cfg.horizon,
        max_error: outcomes.iter().map(TrialOutcome::max_error).fold(0.0, f64::max),
        tail_sup,
        bound_violations: outcomes.iter().map(|o| o.violations).sum(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    };
    RunReport { summary, rows }
}

/// Convenience: `run_trials` then `aggregate`.
pub fn run(cfg: &ExperimentConfig) -> Result<(RunReport, Vec<TrialOutcome>), CliError> {
    let outcomes = run_trials(cfg)?;
    Ok((aggregate(cfg, &outcomes), outcomes))
}
