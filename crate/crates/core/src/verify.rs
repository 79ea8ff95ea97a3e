//! Independent verdicts on shadowing claims.
//!
//! Nothing here calls into the solvers. Checks take either a candidate
//! point (orbit evaluated forward) or an explicit orbit trace (checked for
//! step-by-step consistency first), since forward evaluation of expanding
//! systems amplifies rounding by `beta^n`.

use serde::Serialize;

use crate::error::{Result, ShadowError};
use crate::pseudo_orbit::{tail_sup, PseudoOrbit};
use crate::space::Point;
use crate::system::TimeVaryingSystem;
use crate::tolerance;

/// Per-step residual tolerated in a claimed true orbit.
pub const ORBIT_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowVerdict {
    /// Every error strictly below epsilon.
    pub holds: bool,
    pub max_error: f64,
    pub argmax: usize,
    pub errors: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitVerdict {
    /// Tail sup strictly below the tolerance.
    pub holds: bool,
    pub tail_sup: f64,
    pub window: usize,
}

/// `d(orbit_n, x_n)` for each `n`.
pub fn error_trace(system: &TimeVaryingSystem, orbit: &PseudoOrbit, shadow_orbit: &[Point]) -> Result<Vec<f64>> {
    if shadow_orbit.len() != orbit.len() {
        return Err(ShadowError::Input(format!(
            "shadow orbit has {} points, pseudo-orbit has {}",
            shadow_orbit.len(),
            orbit.len()
        )));
    }
    let space = system.space();
    shadow_orbit.iter().zip(orbit.points()).map(|(a, b)| space.distance(a, b)).collect()
}

/// Largest one-step residual `d(f_{n+1}(w_n), w_{n+1})` of a claimed orbit.
pub fn orbit_residual(system: &TimeVaryingSystem, orbit: &[Point]) -> Result<f64> {
    let space = system.space();
    for p in orbit {
        space.contains(p)?;
    }
    Ok(orbit
        .windows(2)
        .enumerate()
        .map(|(n, w)| space.dist(&system.apply(n + 1, &w[0]), &w[1]))
        .fold(0.0, f64::max))
}

fn require_true_orbit(system: &TimeVaryingSystem, orbit: &[Point]) -> Result<()> {
    let r = orbit_residual(system, orbit)?;
    if !tolerance::le(r, 0.0) || r > ORBIT_RESIDUAL_TOL {
        return Err(ShadowError::Precondition(format!("claimed shadow orbit is not a true orbit (residual {r:e})")));
    }
    Ok(())
}

fn eps_verdict(errors: Vec<f64>, eps: f64) -> ShadowVerdict {
    let (argmax, max_error) = errors
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, e)| if e > acc.1 { (i, e) } else { acc });
    let max_error = max_error.max(0.0);
    ShadowVerdict { holds: errors.iter().all(|&e| e < eps), max_error, argmax, errors }
}

/// Is `orbit` epsilon-shadowed by the true orbit of `x`?
pub fn check_eps_shadowing(system: &TimeVaryingSystem, orbit: &PseudoOrbit, x: &Point, eps: f64) -> Result<ShadowVerdict> {
    let traj = system.orbit(x, orbit.horizon())?;
    Ok(eps_verdict(error_trace(system, orbit, &traj)?, eps))
}

/// As [`check_eps_shadowing`], for an explicit orbit trace that is first
/// checked to be a true orbit.
pub fn check_eps_shadowing_orbit(
    system: &TimeVaryingSystem,
    orbit: &PseudoOrbit,
    shadow_orbit: &[Point],
    eps: f64,
) -> Result<ShadowVerdict> {
    require_true_orbit(system, shadow_orbit)?;
    Ok(eps_verdict(error_trace(system, orbit, shadow_orbit)?, eps))
}

fn limit_verdict(errors: &[f64], window: usize, tol: f64) -> Result<LimitVerdict> {
    if window == 0 {
        return Err(ShadowError::Input("tail window must be positive".into()));
    }
    if window > errors.len() {
        return Err(ShadowError::Input(format!("window {window} exceeds {} entries", errors.len())));
    }
    let s = tail_sup(errors, window);
    Ok(LimitVerdict { holds: s < tol, tail_sup: s, window })
}

/// Sup of the final `window` errors below `tol`.
pub fn check_limit_shadowing(
    system: &TimeVaryingSystem,
    orbit: &PseudoOrbit,
    x: &Point,
    window: usize,
    tol: f64,
) -> Result<LimitVerdict> {
    let traj = system.orbit(x, orbit.horizon())?;
    limit_verdict(&error_trace(system, orbit, &traj)?, window, tol)
}

pub fn check_limit_shadowing_orbit(
    system: &TimeVaryingSystem,
    orbit: &PseudoOrbit,
    shadow_orbit: &[Point],
    window: usize,
    tol: f64,
) -> Result<LimitVerdict> {
    require_true_orbit(system, shadow_orbit)?;
    limit_verdict(&error_trace(system, orbit, shadow_orbit)?, window, tol)
}

/// `e_n <= l * theta^(xi * n)` for every entry, up to float tolerance.
pub fn exponential_verdict(errors: &[f64], l: f64, theta: f64, xi: f64) -> bool {
    errors.iter().enumerate().all(|(n, &e)| tolerance::le(e, l * theta.powf(xi * n as f64)))
}

/// Dominating geometric envelope `a_n <= l * theta^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub l: f64,
    pub theta: f64,
    /// Mean log-gap between envelope and sequence over positive entries.
    pub residual: f64,
    /// Exponent used by exponential verdicts.
    pub xi: f64,
    /// True when no decay was detected and `theta` was clamped to 1.
    pub non_decaying: bool,
}

impl DecayFit {
    pub fn envelope(&self, n: usize) -> f64 {
        self.l * self.theta.powi(n as i32)
    }

    pub fn with_exponent(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    /// `e_n <= l * theta^(xi * n)` for all `n`.
    pub fn dominates(&self, errors: &[f64]) -> bool {
        exponential_verdict(errors, self.l, self.theta, self.xi)
    }
}

/// Envelope fit with the default minimum gap: half the span between the
/// first and last positive entries.
pub fn fit_decay(seq: &[f64]) -> Result<DecayFit> {
    fit_decay_with_gap(seq, None)
}

/// Upper-envelope rate estimate.
///
/// With `M_n = max_{k >= n} a_k`, the rate is the largest
/// `(M_m / M_n)^{1/(m-n)}` over positive pairs `n < m` at least `min_gap`
/// apart, clamped to `(0, 1]`; then `L = max a_n / theta^n`, so the
/// envelope dominates every entry by construction.
pub fn fit_decay_with_gap(seq: &[f64], min_gap: Option<usize>) -> Result<DecayFit> {
    if let Some(bad) = seq.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(ShadowError::Input(format!("decay fit needs finite nonnegative entries, got {bad}")));
    }
    let positive: Vec<usize> = (0..seq.len()).filter(|&i| seq[i] > 0.0).collect();
    if positive.len() < 3 {
        return Err(ShadowError::InsufficientData { needed: 3, found: positive.len() });
    }
    let mut tail_max = seq.to_vec();
    for i in (0..seq.len().saturating_sub(1)).rev() {
        tail_max[i] = tail_max[i].max(tail_max[i + 1]);
    }
    let span = positive[positive.len() - 1] - positive[0];
    let gap = min_gap.unwrap_or(span.div_ceil(2)).clamp(1, span);

    let mut log_theta = f64::NEG_INFINITY;
    for (a, &n) in positive.iter().enumerate() {
        for &m in &positive[a + 1..] {
            if m - n < gap {
                continue;
            }
            let r = (tail_max[m].ln() - tail_max[n].ln()) / (m - n) as f64;
            log_theta = log_theta.max(r);
        }
    }
    let non_decaying = log_theta >= 0.0;
    let log_theta = log_theta.min(0.0);
    let theta = log_theta.exp();

    let log_l = positive.iter().map(|&n| seq[n].ln() - n as f64 * log_theta).fold(f64::NEG_INFINITY, f64::max);
    let residual = positive.iter().map(|&n| log_l + n as f64 * log_theta - seq[n].ln()).sum::<f64>() / positive.len() as f64;
    Ok(DecayFit { l: log_l.exp(), theta, residual, xi: 1.0, non_decaying })
}

/// `b_0 = d0`, `b_{n+1} = alpha * b_n + tau_n`.
///
/// Equivalently `b_n = alpha^n d0 + sum_i alpha^{n-1-i} tau_i`, the error
/// bound for a contracting system shadowed from a start at distance `d0`.
pub fn contracting_bound_trace(alpha: f64, d0: f64, defects: &[f64]) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(ShadowError::Input(format!("alpha must lie in [0,1), got {alpha}")));
    }
    let mut out = Vec::with_capacity(defects.len() + 1);
    out.push(d0);
    for (n, &tau) in defects.iter().enumerate() {
        out.push(alpha * out[n] + tau);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum BoundMode {
    Contracting { alpha: f64 },
    Expanding { beta: f64 },
}

/// `n -> coefficient * theta^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentialBound {
    pub coefficient: f64,
    pub theta: f64,
}

impl ExponentialBound {
    pub fn at(&self, n: usize) -> f64 {
        self.coefficient * self.theta.powi(n as i32)
    }

    pub fn trace(&self, len: usize) -> Vec<f64> {
        (0..len).map(|n| self.at(n)).collect()
    }
}

/// Exponential error bound for defects `<= l * theta^n`:
/// `(l / (theta - alpha)) theta^n` (contracting, needs `theta in (alpha, 1)`)
/// or `(l / (beta - 1)) theta^n` (expanding, needs `beta > 1`).
pub fn exponential_bound_trace(mode: BoundMode, l: f64, theta: f64) -> Result<ExponentialBound> {
    if !(l >= 0.0 && l.is_finite()) {
        return Err(ShadowError::Input(format!("L must be nonnegative, got {l}")));
    }
    match mode {
        BoundMode::Contracting { alpha } => {
            if !(0.0..1.0).contains(&alpha) {
                return Err(ShadowError::Hypothesis(format!("alpha must lie in [0,1), got {alpha}")));
            }
            if !(theta > alpha && theta < 1.0) {
                return Err(ShadowError::Hypothesis(format!("theta must lie in (alpha, 1) = ({alpha}, 1), got {theta}")));
            }
            Ok(ExponentialBound { coefficient: l / (theta - alpha), theta })
        }
        BoundMode::Expanding { beta } => {
            if beta <= 1.0 {
                return Err(ShadowError::Hypothesis(format!("beta must exceed 1, got {beta}")));
            }
            if !(theta > 0.0 && theta < 1.0) {
                return Err(ShadowError::Hypothesis(format!("theta must lie in (0, 1), got {theta}")));
            }
            Ok(ExponentialBound { coefficient: l / (beta - 1.0), theta })
        }
    }
}

/// Finite-horizon evidence for strong expansivity. Never a certificate:
/// `gamma_hat` only says no counterexample was found among the samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansivityEstimate {
    pub gamma_hat: f64,
    pub horizon: usize,
    pub pairs_tested: usize,
    /// Smallest observed max-separation over pairs and start indices.
    pub min_separation: f64,
    /// Pairs that failed to separate beyond the next grid value above `gamma_hat`.
    pub failures: Vec<usize>,
}

/// For each pair and start index `N`, the largest
/// `d(F_[N,n](x), F_[N,n](y))` over `N <= n <= N + horizon`; `gamma_hat`
/// is the largest grid value strictly below the minimum of these.
pub fn probe_expansivity(
    system: &TimeVaryingSystem,
    pairs: &[(Point, Point)],
    horizon: usize,
    gamma_grid: &[f64],
    starts: &[usize],
) -> Result<ExpansivityEstimate> {
    if horizon < 1 {
        return Err(ShadowError::Input("horizon must be >= 1".into()));
    }
    if starts.iter().any(|&s| s < 1) || starts.is_empty() {
        return Err(ShadowError::Input("start indices must be >= 1".into()));
    }
    let space = system.space();
    let mut per_pair = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        if space.distance(x, y)? == 0.0 {
            return Err(ShadowError::Precondition("probe pairs must be distinct".into()));
        }
        let mut worst = f64::INFINITY;
        for &start in starts {
            let (mut a, mut b) = (x.clone(), y.clone());
            let mut best = 0.0f64;
            for n in start..=start + horizon {
                a = system.apply(n, &a);
                b = system.apply(n, &b);
                best = best.max(space.dist(&a, &b));
            }
            worst = worst.min(best);
        }
        per_pair.push(worst);
    }
    let min_separation = per_pair.iter().copied().fold(f64::INFINITY, f64::min);
    let gamma_hat = gamma_grid.iter().copied().filter(|&g| g > 0.0 && g < min_separation).fold(0.0, f64::max);
    let next = gamma_grid.iter().copied().filter(|&g| g > gamma_hat).fold(f64::INFINITY, f64::min);
    let failures = per_pair.iter().enumerate().filter(|(_, &s)| s <= next).map(|(i, _)| i).collect();
    Ok(ExpansivityEstimate { gamma_hat, horizon, pairs_tested: pairs.len(), min_separation, failures })
}
