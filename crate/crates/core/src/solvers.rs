//! Constructive shadowing.
//!
//! Each solver returns a [`ShadowCertificate`]: the shadow point, its true
//! orbit, the error trace against the pseudo-orbit, the theoretical bound
//! trace for that solver, and verdict flags.
//!
//! Expanding solvers never iterate the shadow forward. Forward evaluation
//! multiplies rounding error by `beta^n`, so the shadow's orbit is instead
//! obtained by pulling back from the last pseudo-orbit point:
//! `w_N = x_N`, `w_n = f_{n+1}^{-1}(w_{n+1})`. The shadow is `w_0`, which is
//! the backward iterate `z_N`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShadowError};
use crate::pseudo_orbit::{classify, tail_sup, Criteria, PseudoOrbit, TailTest};
use crate::space::Point;
use crate::system::TimeVaryingSystem;
use crate::tolerance::FLOAT_TOL;
use crate::verify::{contracting_bound_trace, exponential_verdict, orbit_residual, ORBIT_RESIDUAL_TOL};

/// Default truncation tolerance for backward iteration.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Distance at or below which `F_m(shadow)` counts as hitting `x_m`.
pub const EXACT_HIT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsFlag {
    pub eps: f64,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitFlag {
    pub window: usize,
    pub tol: f64,
    pub tail_sup: f64,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFlag {
    pub l: f64,
    pub theta: f64,
    pub holds: bool,
}

/// Verdicts attached to a certificate; `None` when not evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub eps_shadowed: Option<EpsFlag>,
    pub exact_hit: Option<bool>,
    pub limit_ok: Option<LimitFlag>,
    pub exponential_ok: Option<ExponentialFlag>,
}

/// Thresholds for [`ShadowCertificate::assess`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub eps: Option<f64>,
    pub tail: Option<TailTest>,
    /// `(L', theta')`: errors must satisfy `e_n <= L' theta'^n`.
    pub exponential: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowCertificate {
    pub shadow: Point,
    /// True orbit of the shadow, one point per pseudo-orbit point.
    pub orbit: Vec<Point>,
    /// `e_n = d(F_n(shadow), x_n)`.
    pub errors: Vec<f64>,
    /// Theoretical bound `b_n` for this solver.
    pub bound: Vec<f64>,
    pub flags: Flags,
}

impl ShadowCertificate {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }

    /// Indices with `e_n > b_n + slack`.
    pub fn bound_violations(&self, slack: f64) -> Vec<usize> {
        self.errors
            .iter()
            .zip(&self.bound)
            .enumerate()
            .filter(|(_, (e, b))| **e > **b + slack)
            .map(|(n, _)| n)
            .collect()
    }

    /// Evaluates the requested verdicts on the error trace; flags not
    /// requested keep their current value.
    pub fn assess(&mut self, t: &Thresholds) -> Result<()> {
        if let Some(eps) = t.eps {
            self.flags.eps_shadowed = Some(EpsFlag { eps, holds: self.errors.iter().all(|&e| e < eps) });
        }
        if let Some(tail) = t.tail {
            if tail.window == 0 {
                return Err(ShadowError::Input("tail window must be positive".into()));
            }
            let s = tail_sup(&self.errors, tail.window);
            self.flags.limit_ok =
                Some(LimitFlag { window: tail.window.min(self.errors.len()), tol: tail.tol, tail_sup: s, holds: s < tail.tol });
        }
        if let Some((l, theta)) = t.exponential {
            self.flags.exponential_ok =
                Some(ExponentialFlag { l, theta, holds: exponential_verdict(&self.errors, l, theta, 1.0) });
        }
        Ok(())
    }

    pub fn with_assessment(mut self, t: &Thresholds) -> Result<Self> {
        self.assess(t)?;
        Ok(self)
    }

    fn default_eps(&mut self, slack: f64) {
        let eps = self.bound.iter().copied().fold(0.0, f64::max) + slack;
        self.flags.eps_shadowed = Some(EpsFlag { eps, holds: self.errors.iter().all(|&e| e < eps) });
    }
}

/// Backward iterates `z_n = f_1^{-1} ∘ ... ∘ f_n^{-1}(x_n)` for `n <= N*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackwardTrace {
    pub z: Vec<Point>,
    /// Smallest `N` with `(delta/(beta-1)) beta^{-N} < tol`.
    pub truncation: usize,
}

impl BackwardTrace {
    /// Largest excess of `d(z_n, z_{n+p})` over `(delta/(beta-1)) beta^{-n}`
    /// across all stored pairs; nonpositive when the Cauchy bound holds.
    pub fn cauchy_excess(&self, system: &TimeVaryingSystem, delta: f64, beta: f64) -> f64 {
        let space = system.space();
        let mut worst = f64::NEG_INFINITY;
        for n in 0..self.z.len() {
            let bound = delta / (beta - 1.0) * beta.powi(-(n as i32));
            for m in n + 1..self.z.len() {
                worst = worst.max(space.dist(&self.z[n], &self.z[m]) - bound);
            }
        }
        worst
    }
}

fn check_orbit_space(system: &TimeVaryingSystem, p: &PseudoOrbit) -> Result<()> {
    // points were validated against *a* system at construction; make sure
    // it was one over this space
    system.space().contains(p.first())?;
    system.space().contains(p.last())
}

fn errors_against(system: &TimeVaryingSystem, orbit: &[Point], p: &PseudoOrbit) -> Vec<f64> {
    let space = system.space();
    orbit.iter().zip(p.points()).map(|(a, b)| space.dist(a, b)).collect()
}

/// `w_N = x_N`, `w_n = f_{n+1}^{-1}(w_{n+1})`.
fn pull_back_orbit(system: &TimeVaryingSystem, terminal: &Point, horizon: usize) -> Result<Vec<Point>> {
    let mut w = vec![terminal.clone(); horizon + 1];
    for n in (0..horizon).rev() {
        w[n] = system.apply_inverse(n + 1, &w[n + 1])?;
    }
    Ok(w)
}

fn contraction_ratio(system: &TimeVaryingSystem) -> Result<f64> {
    let alpha = system
        .alpha()
        .ok_or_else(|| ShadowError::Capability("system carries no contraction certificate".into()))?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(ShadowError::Certificate(format!("contracting ratio must lie in [0,1), got {alpha}")));
    }
    Ok(alpha)
}

fn expansion_ratio(system: &TimeVaryingSystem, horizon: usize) -> Result<f64> {
    let beta = system
        .beta()
        .ok_or_else(|| ShadowError::Capability("system carries no expansion certificate".into()))?;
    if beta <= 1.0 {
        return Err(ShadowError::Certificate(format!("expanding ratio must exceed 1, got {beta}")));
    }
    if !system.invertible_up_to(horizon.max(1)) {
        return Err(ShadowError::Capability("expanding solvers need every step to be invertible".into()));
    }
    Ok(beta)
}

/// Shadowing for contracting systems: the shadow is `start` (default `x_0`)
/// and `b_0 = d(start, x_0)`, `b_{n+1} = alpha b_n + tau_n`.
///
/// The eps flag is set at `max b_n + 1e-9`.
pub fn shadow_contracting(
    system: &TimeVaryingSystem,
    p: &PseudoOrbit,
    start: Option<&Point>,
) -> Result<ShadowCertificate> {
    let alpha = contraction_ratio(system)?;
    check_orbit_space(system, p)?;
    let shadow = start.unwrap_or(p.first()).clone();
    let d0 = system.space().distance(&shadow, p.first())?;
    let orbit = system.orbit(&shadow, p.horizon())?;
    let errors = errors_against(system, &orbit, p);
    let bound = contracting_bound_trace(alpha, d0, p.defects())?;
    let mut cert = ShadowCertificate { shadow, orbit, errors, bound, flags: Flags::default() };
    cert.default_eps(FLOAT_TOL);
    Ok(cert)
}

/// Smallest `N` with `(delta/(beta-1)) beta^{-N} < tol`.
pub fn truncation_index(delta: f64, beta: f64, tol: f64) -> usize {
    let c = delta / (beta - 1.0);
    if c < tol {
        return 0;
    }
    let mut n = ((c / tol).ln() / beta.ln()).floor().max(0.0) as usize;
    while c * beta.powi(-(n as i32)) >= tol {
        n += 1;
    }
    n
}

/// Shadowing for expanding systems with `delta` the largest observed defect.
///
/// Bounds: `b_n = delta/(beta-1)` for `n >= 1`, and
/// `b_0 = (max_{n>=1} e_n + delta)/beta`. The eps flag is set at
/// `delta/(beta-1) + tol`.
pub fn shadow_expanding(
    system: &TimeVaryingSystem,
    p: &PseudoOrbit,
    tol: f64,
) -> Result<(ShadowCertificate, BackwardTrace)> {
    if !(tol > 0.0) {
        return Err(ShadowError::Input(format!("tolerance must be positive, got {tol}")));
    }
    let h = p.horizon();
    let beta = expansion_ratio(system, h)?;
    check_orbit_space(system, p)?;
    let delta = p.max_defect();
    let truncation = truncation_index(delta, beta, tol);

    let stored = truncation.min(h);
    let z = (0..=stored)
        .map(|n| system.pull_back_window(1, n, p.point(n)))
        .collect::<Result<Vec<_>>>()?;

    let orbit = pull_back_orbit(system, p.last(), h)?;
    let errors = errors_against(system, &orbit, p);
    let eps = delta / (beta - 1.0);
    let tail_max = errors.iter().skip(1).copied().fold(0.0, f64::max);
    let mut bound = vec![eps; h + 1];
    bound[0] = if h == 0 { 0.0 } else { (tail_max + delta) / beta };

    let mut cert = ShadowCertificate { shadow: orbit[0].clone(), orbit, errors, bound, flags: Flags::default() };
    cert.flags.eps_shadowed =
        Some(EpsFlag { eps: eps + tol, holds: cert.errors.iter().all(|&e| e < eps + tol) });
    Ok((cert, BackwardTrace { z, truncation }))
}

fn hits(system: &TimeVaryingSystem, shadow: &Point, p: &PseudoOrbit) -> Result<bool> {
    let end = system.compose_window(1, p.horizon(), shadow)?;
    Ok(system.space().dist(&end, p.last()) <= EXACT_HIT_TOL)
}

/// Finite-orbit h-shadowing: `shadow = f_1^{-1} ∘ ... ∘ f_m^{-1}(x_m)`.
///
/// Works for any system whose steps carry inverses that are right
/// inverses on the pseudo-orbit (e.g. Bernoulli prepend maps). The bound
/// trace comes from whichever certificate the system carries: expanding
/// `delta/(beta-1)`, else the contracting recurrence from `e_0`.
/// `exact_hit` is decided by forward evaluation of `F_m(shadow)`.
pub fn shadow_h(system: &TimeVaryingSystem, p: &PseudoOrbit) -> Result<ShadowCertificate> {
    check_orbit_space(system, p)?;
    let m = p.horizon();
    if !system.invertible_up_to(m.max(1)) {
        return Err(ShadowError::Capability("h-shadowing needs inverses of every step".into()));
    }
    let pulled = pull_back_orbit(system, p.last(), m)?;
    // a right inverse that misses the step's image yields a broken chain;
    // the shadow's actual orbit is then recomputed forward
    let orbit = if orbit_residual(system, &pulled)? <= ORBIT_RESIDUAL_TOL {
        pulled
    } else {
        system.orbit(&pulled[0], m)?
    };
    let errors = errors_against(system, &orbit, p);
    let delta = p.max_defect();
    let bound = match (system.beta().filter(|&b| b > 1.0), system.alpha().filter(|&a| (0.0..1.0).contains(&a))) {
        (Some(beta), _) => vec![delta / (beta - 1.0); m + 1],
        (None, Some(alpha)) => contracting_bound_trace(alpha, errors[0], p.defects())?,
        (None, None) => {
            return Err(ShadowError::Capability("h-shadowing bound needs a contraction or expansion certificate".into()))
        }
    };
    let shadow = orbit[0].clone();
    let exact = hits(system, &shadow, p)?;
    let mut cert = ShadowCertificate { shadow, orbit, errors, bound, flags: Flags::default() };
    cert.flags.exact_hit = Some(exact);
    cert.default_eps(FLOAT_TOL);
    Ok(cert)
}

/// [`shadow_h`] for certified expanding systems.
pub fn shadow_h_expanding(system: &TimeVaryingSystem, p: &PseudoOrbit) -> Result<ShadowCertificate> {
    expansion_ratio(system, p.horizon())?;
    shadow_h(system, p)
}

/// One stage of the gluing construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluingStage {
    /// Defect threshold `delta / 2^{i+2}` defining the cut.
    pub threshold: f64,
    /// Last index of the spliced finite pseudo-orbit.
    pub end: usize,
    /// Largest defect of the spliced finite pseudo-orbit.
    pub spliced_defect: f64,
    pub exact_hit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluedShadow {
    pub certificate: ShadowCertificate,
    pub stages: Vec<GluingStage>,
}

/// Smallest `k` such that every defect from index `k` on is `< threshold`.
fn cut_index(defects: &[f64], threshold: f64) -> usize {
    defects.iter().rposition(|&t| t >= threshold).map_or(0, |i| i + 1)
}

/// s-limit shadowing by recursive gluing of h-shadows.
///
/// `criteria` must request both the `delta` and the tail test; the
/// pseudo-orbit must pass both. Stage `i` (from 1) cuts at the first index
/// after which all defects are `< delta / 2^{i+2}`, splices the previous
/// stage's true orbit up to the previous cut with the pseudo-orbit up to
/// the new cut, and h-shadows the result. The last stage extends to the
/// horizon. Flags: eps at `delta/(beta-1)` and the requested tail test.
pub fn shadow_slimit_gluing(
    system: &TimeVaryingSystem,
    p: &PseudoOrbit,
    stages: usize,
    criteria: &Criteria,
) -> Result<GluedShadow> {
    if stages == 0 {
        return Err(ShadowError::Input("gluing needs at least one stage".into()));
    }
    let (Some(delta), Some(tail)) = (criteria.delta, criteria.tail) else {
        return Err(ShadowError::Input("gluing needs both a delta and a tail criterion".into()));
    };
    let class = classify(p, &Criteria { delta: Some(delta), tail: Some(tail), exponential: None })?;
    if class.is_delta_pseudo != Some(true) || class.is_limit_pseudo != Some(true) {
        return Err(ShadowError::Precondition(format!(
            "pseudo-orbit must be {delta}-pseudo and limit-pseudo (tail sup {:e} vs {:e})",
            class.tail_sup.unwrap_or(f64::NAN),
            tail.tol
        )));
    }
    let h = p.horizon();
    let beta = expansion_ratio(system, h)?;

    let mut record = Vec::with_capacity(stages);
    let mut prev_orbit: Vec<Point> = Vec::new();
    let mut prev_end: Option<usize> = None;
    let mut last = None;
    for i in 1..=stages {
        let threshold = delta / 2f64.powi(i as i32 + 2);
        let end = if i == stages { h } else { cut_index(p.defects(), threshold).min(h) };
        let end = end.max(prev_end.unwrap_or(0));
        let mut spliced: Vec<Point> = match prev_end {
            Some(k) => prev_orbit[..=k].to_vec(),
            None => vec![p.first().clone()],
        };
        let from = spliced.len();
        spliced.extend_from_slice(&p.points()[from..=end]);
        let q = PseudoOrbit::from_points(system, spliced)?;
        let cert = shadow_h(system, &q)?;
        record.push(GluingStage {
            threshold,
            end,
            spliced_defect: q.max_defect(),
            exact_hit: cert.flags.exact_hit.unwrap_or(false),
        });
        prev_orbit = cert.orbit.clone();
        prev_end = Some(end);
        last = Some(cert);
    }

    let stage_cert = last.expect("at least one stage");
    let errors = errors_against(system, &stage_cert.orbit, p);
    let eps = delta / (beta - 1.0);
    let mut cert = ShadowCertificate {
        shadow: stage_cert.shadow,
        orbit: stage_cert.orbit,
        errors,
        bound: vec![eps; h + 1],
        flags: Flags::default(),
    };
    cert.flags.exact_hit = stage_cert.flags.exact_hit;
    cert.assess(&Thresholds { eps: Some(eps), tail: Some(tail), exponential: None })?;
    Ok(GluedShadow { certificate: cert, stages: record })
}

/// Block solutions of [`shadow_hyperbolic`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicShadow {
    pub certificate: ShadowCertificate,
    pub stable: ShadowCertificate,
    pub unstable: ShadowCertificate,
}

/// Shadowing for a hyperbolic family: the contracting solver on the stable
/// block (from `x_0`), the expanding solver on the unstable block, and the
/// recombined pair. Errors are measured in the max-product metric; the
/// bound is the entrywise max of the block bounds.
pub fn shadow_hyperbolic(
    family: &crate::catalog::HyperbolicFamily,
    p: &PseudoOrbit,
    tol: f64,
) -> Result<HyperbolicShadow> {
    let split = &family.splitting;
    if !(split.alpha_stable < 1.0) {
        return Err(ShadowError::Certificate(format!("stable ratio {} is not below 1", split.alpha_stable)));
    }
    if !(split.beta_unstable > 1.0) {
        return Err(ShadowError::Certificate(format!("unstable ratio {} is not above 1", split.beta_unstable)));
    }
    check_orbit_space(&family.system, p)?;
    let (mut s_pts, mut u_pts) = (Vec::with_capacity(p.len()), Vec::with_capacity(p.len()));
    for pt in p.points() {
        let (s, u) = pt.as_pair().ok_or_else(|| ShadowError::Input("expected split points".into()))?;
        s_pts.push(s.clone());
        u_pts.push(u.clone());
    }
    let ps = PseudoOrbit::from_points(&family.stable, s_pts)?;
    let pu = PseudoOrbit::from_points(&family.unstable, u_pts)?;
    let stable = shadow_contracting(&family.stable, &ps, None)?;
    let (unstable, _) = shadow_expanding(&family.unstable, &pu, tol)?;

    let orbit: Vec<Point> =
        stable.orbit.iter().zip(&unstable.orbit).map(|(a, b)| Point::pair(a.clone(), b.clone())).collect();
    let errors = errors_against(&family.system, &orbit, p);
    let bound = stable.bound.iter().zip(&unstable.bound).map(|(a, b)| a.max(*b)).collect();
    let mut cert = ShadowCertificate { shadow: orbit[0].clone(), orbit, errors, bound, flags: Flags::default() };
    cert.default_eps(tol.max(FLOAT_TOL));
    Ok(HyperbolicShadow { certificate: cert, stable, unstable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{doubling_system, hyperbolic_family, hyperbolic_linear, scalar_contraction};
    use crate::space::MetricSpace;
    use nalgebra::DMatrix;

    fn s(x: f64) -> Point {
        Point::scalar(x)
    }

    fn halving() -> TimeVaryingSystem {
        TimeVaryingSystem::autonomous(MetricSpace::euclidean(1), scalar_contraction(0.5).unwrap())
    }

    #[test]
    fn contracting_constant_orbit() {
        let sys = halving();
        let p = PseudoOrbit::from_points(&sys, vec![s(1.0); 21]).unwrap();
        let c = shadow_contracting(&sys, &p, None).unwrap();
        for n in 0..=20 {
            let closed = (2f64.powi(-(n as i32)) - 1.0).abs();
            assert!((c.errors[n] - closed).abs() < 1e-15);
            assert!((c.bound[n] - (1.0 - 2f64.powi(-(n as i32)))).abs() < 1e-15);
            assert!(c.errors[n] <= c.bound[n] + 1e-9);
            assert!(c.bound[n] <= 1.0);
        }
    }

    #[test]
    fn contracting_true_orbit_has_zero_error() {
        let sys = halving();
        let p = PseudoOrbit::true_orbit(&sys, &s(3.0), 10).unwrap();
        let c = shadow_contracting(&sys, &p, None).unwrap();
        assert!(c.errors.iter().all(|&e| e == 0.0));
        assert_eq!(c.shadow, s(3.0));
    }

    #[test]
    fn contracting_needs_certificate() {
        let sys = halving().without_certificates();
        let p = PseudoOrbit::true_orbit(&sys, &s(3.0), 2).unwrap();
        assert!(matches!(shadow_contracting(&sys, &p, None), Err(ShadowError::Capability(_))));
    }

    #[test]
    fn expanding_constant_orbit() {
        let sys = doubling_system();
        let p = PseudoOrbit::from_points(&sys, vec![s(0.3); 41]).unwrap();
        let (c, trace) = shadow_expanding(&sys, &p, DEFAULT_TOL).unwrap();
        assert!(c.shadow.as_vector().unwrap()[0].abs() < 1e-11);
        // pulled back from x_40: w_n = 0.3 * 2^{n-40}
        for n in 0..=40 {
            let closed = 0.3 * (1.0 - 2f64.powi(n as i32 - 40));
            assert!((c.errors[n] - closed).abs() < 1e-15);
            assert!(c.errors[n] <= c.bound[n] + 1e-10);
        }
        for (n, z) in trace.z.iter().enumerate() {
            assert!((z.as_vector().unwrap()[0] - 0.3 * 2f64.powi(-(n as i32))).abs() < 1e-16);
        }
        assert!(trace.cauchy_excess(&sys, 0.3, 2.0) <= 1e-15);
        assert_eq!(trace.truncation, truncation_index(0.3, 2.0, DEFAULT_TOL));
        assert!(c.flags.eps_shadowed.unwrap().holds);
    }

    #[test]
    fn truncation_index_is_minimal() {
        for &(d, b, t) in &[(0.3, 2.0, 1e-10), (0.1, 1.5, 1e-10), (1.0, 4.0, 1e-3), (0.0, 2.0, 1e-10)] {
            let n = truncation_index(d, b, t);
            assert!(d / (b - 1.0) * b.powi(-(n as i32)) < t);
            if n > 0 {
                assert!(d / (b - 1.0) * b.powi(-(n as i32 - 1)) >= t);
            }
        }
    }

    #[test]
    fn expanding_rejects_bad_certificates() {
        let sys = halving().with_uniform_beta(0.5);
        let p = PseudoOrbit::true_orbit(&sys, &s(1.0), 3).unwrap();
        assert!(matches!(shadow_expanding(&sys, &p, 1e-10), Err(ShadowError::Certificate(_))));
    }

    #[test]
    fn h_shadow_example() {
        let sys = doubling_system();
        let p = PseudoOrbit::from_points(&sys, vec![s(0.3); 3]).unwrap();
        let c = shadow_h_expanding(&sys, &p).unwrap();
        assert_eq!(c.shadow, s(0.075));
        assert_eq!(c.flags.exact_hit, Some(true));
        assert!((c.errors[0] - 0.225).abs() < 1e-15);
        assert!(c.errors[0] <= 0.3);
    }

    #[test]
    fn singleton_orbits() {
        let sys = doubling_system();
        let p = PseudoOrbit::from_points(&sys, vec![s(0.7)]).unwrap();
        let c = shadow_h_expanding(&sys, &p).unwrap();
        assert_eq!((c.shadow.clone(), c.errors.clone(), c.flags.exact_hit), (s(0.7), vec![0.0], Some(true)));
        let (c, _) = shadow_expanding(&sys, &p, 1e-10).unwrap();
        assert_eq!(c.shadow, s(0.7));
        assert_eq!(c.bound, vec![0.0]);
        let c = shadow_contracting(&halving(), &PseudoOrbit::from_points(&halving(), vec![s(0.7)]).unwrap(), None).unwrap();
        assert_eq!(c.errors, vec![0.0]);
    }

    #[test]
    fn gluing_constant_then_zero() {
        let sys = doubling_system();
        let h = 40;
        // x_{n+1} = 2 x_n + 0.3 for n < 10, exact afterwards
        let mut pts = vec![s(0.0)];
        for n in 0..h {
            let x = pts[n].as_vector().unwrap()[0];
            pts.push(s(2.0 * x + if n < 10 { 0.3 } else { 0.0 }));
        }
        let p = PseudoOrbit::from_points(&sys, pts).unwrap();
        let criteria = Criteria { delta: Some(0.31), tail: Some(TailTest::final_quarter(h, 1e-6)), exponential: None };
        let g = shadow_slimit_gluing(&sys, &p, 5, &criteria).unwrap();
        let c = &g.certificate;
        assert!(c.errors.iter().all(|&e| e <= 0.3 + 1e-12));
        assert!(c.errors[10..].iter().all(|&e| e == 0.0));
        assert!(g.stages.iter().all(|st| st.exact_hit));
        assert!(c.flags.limit_ok.unwrap().holds);
    }

    #[test]
    fn gluing_rejects_non_limit_orbits() {
        let sys = doubling_system();
        let p = PseudoOrbit::from_points(&sys, vec![s(0.3); 20]).unwrap();
        let criteria = Criteria { delta: Some(0.5), tail: Some(TailTest::final_quarter(20, 1e-6)), exponential: None };
        assert!(matches!(shadow_slimit_gluing(&sys, &p, 3, &criteria), Err(ShadowError::Precondition(_))));
    }

    #[test]
    fn hyperbolic_constant_pair() {
        let step = hyperbolic_linear(DMatrix::from_element(1, 1, 0.5), DMatrix::from_element(1, 1, 2.0)).unwrap();
        let fam = hyperbolic_family(vec![step], vec![0]).unwrap();
        let p = PseudoOrbit::from_points(&fam.system, vec![Point::pair(s(1.0), s(0.3)); 31]).unwrap();
        let hs = shadow_hyperbolic(&fam, &p, DEFAULT_TOL).unwrap();
        for n in 0..=30 {
            let es = 1.0 - 2f64.powi(-(n as i32));
            assert!((hs.stable.errors[n] - es).abs() < 1e-15);
            assert!((hs.unstable.errors[n] - 0.3 * (1.0 - 2f64.powi(n as i32 - 30))).abs() < 1e-15);
            assert_eq!(hs.certificate.errors[n], hs.stable.errors[n].max(hs.unstable.errors[n]));
        }
    }

    #[test]
    fn assess_sets_requested_flags() {
        let sys = halving();
        let p = PseudoOrbit::true_orbit(&sys, &s(1.0), 8).unwrap();
        let c = shadow_contracting(&sys, &p, None)
            .unwrap()
            .with_assessment(&Thresholds {
                eps: Some(0.0),
                tail: Some(TailTest { window: 2, tol: 1e-3 }),
                exponential: Some((1.0, 0.5)),
            })
            .unwrap();
        assert!(!c.flags.eps_shadowed.unwrap().holds);
        assert!(c.flags.limit_ok.unwrap().holds);
        assert!(c.flags.exponential_ok.unwrap().holds);
    }
}
