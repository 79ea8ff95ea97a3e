//! Re-verification of stored certificates without re-running solvers.

use shadowkit::verify::{check_eps_shadowing_orbit, check_limit_shadowing_orbit, error_trace};
use shadowkit::PseudoOrbit;

use crate::config::ExperimentConfig;
use crate::run::{trial_seed, Check, TrialOutcome};
use crate::systems::build;
use crate::CliError;

/// Stored errors must be reproduced to this absolute tolerance.
const REPRODUCE_TOL: f64 = 1e-12;

/// Checks each stored trial against the system rebuilt from `cfg`:
/// the claimed orbit is a true orbit, stored errors are reproduced, the
/// bound dominates, and the stored eps / limit flags agree with
/// independent checks.
pub fn recheck(cfg: &ExperimentConfig, trials: &[TrialOutcome]) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let slack = cfg.verify.slack;
    for o in trials {
        let built = build(&cfg.system, trial_seed(cfg.seed, o.trial))?;
        let sys = built.system();
        let p = PseudoOrbit::from_points(sys, o.pseudo_orbit.clone())?;
        let cert = &o.certificate;
        let tag = |what: &str| format!("trial {}: {what}", o.trial);

        let errors = error_trace(sys, &p, &cert.orbit)?;
        let same = errors.len() == cert.errors.len()
            && errors.iter().zip(&cert.errors).all(|(a, b)| (a - b).abs() <= REPRODUCE_TOL);
        checks.push(Check { name: tag("errors reproduced"), pass: same });
        let dominated = errors.iter().zip(&cert.bound).all(|(e, b)| *e <= b + slack);
        checks.push(Check { name: tag("bound domination"), pass: dominated });

        let eps = cert.flags.eps_shadowed.map(|f| (f.eps, f.holds));
        match eps {
            Some((eps, claimed)) => match check_eps_shadowing_orbit(sys, &p, &cert.orbit, eps) {
                Ok(v) => checks.push(Check { name: tag("eps flag agrees"), pass: v.holds == claimed }),
                Err(e) => checks.push(Check { name: tag(&format!("true orbit ({e})")), pass: false }),
            },
            None => {}
        }
        if let Some(l) = cert.flags.limit_ok {
            let v = check_limit_shadowing_orbit(sys, &p, &cert.orbit, l.window, l.tol);
            let pass = matches!(v, Ok(v) if v.holds == l.holds);
            checks.push(Check { name: tag("limit flag agrees"), pass });
        }
    }
    Ok(checks)
}
