//! Pseudo-orbits: generation from defect schedules, measurement,
//! classification and the structural transforms used by the proofs
//! (iterate interpolation and true-orbit extension).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ShadowError};
use crate::space::{MetricSpace, Point};
use crate::system::TimeVaryingSystem;
use crate::tolerance;

/// A finite point sequence `x_0..x_N` together with its defects
/// `tau_n = d(f_{n+1}(x_n), x_{n+1})`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoOrbit {
    points: Vec<Point>,
    defects: Vec<f64>,
}

impl PseudoOrbit {
    /// Validates the points against the system's space and measures defects.
    pub fn from_points(system: &TimeVaryingSystem, points: Vec<Point>) -> Result<Self> {
        let defects = defects(system, &points)?;
        Ok(PseudoOrbit { points, defects })
    }

    /// The true orbit of `x0` up to `horizon`; all defects are zero.
    pub fn true_orbit(system: &TimeVaryingSystem, x0: &Point, horizon: usize) -> Result<Self> {
        Self::from_points(system, system.orbit(x0, horizon)?)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, n: usize) -> &Point {
        &self.points[n]
    }

    pub fn defects(&self) -> &[f64] {
        &self.defects
    }

    /// Number of points, `N + 1`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the last point, `N`.
    pub fn horizon(&self) -> usize {
        self.points.len() - 1
    }

    pub fn first(&self) -> &Point {
        &self.points[0]
    }

    pub fn last(&self) -> &Point {
        &self.points[self.points.len() - 1]
    }

    pub fn max_defect(&self) -> f64 {
        self.defects.iter().copied().fold(0.0, f64::max)
    }

    /// Points `x_0..x_m`.
    pub fn prefix(&self, m: usize) -> PseudoOrbit {
        PseudoOrbit { points: self.points[..=m].to_vec(), defects: self.defects[..m].to_vec() }
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

/// Consecutive one-step deviations; empty for a single point.
pub fn defects(system: &TimeVaryingSystem, points: &[Point]) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(ShadowError::Input("a pseudo-orbit needs at least one point".into()));
    }
    let space = system.space();
    for p in points {
        space.contains(p)?;
    }
    Ok(points
        .windows(2)
        .enumerate()
        .map(|(n, w)| space.dist(&system.apply(n + 1, &w[0]), &w[1]))
        .collect())
}

/// Magnitude envelope for generated defects.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DefectProfile {
    /// True orbit.
    Zero,
    /// Every defect strictly below `delta`.
    Constant { delta: f64 },
    /// Bound `scale / (n + 1)`.
    Harmonic { scale: f64 },
    /// Bound `l * theta^n`.
    Exponential { l: f64, theta: f64 },
    /// Bound `magnitude` for `n < until`, then 0.
    Window { magnitude: f64, until: usize },
}

impl DefectProfile {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ShadowError::Input(m));
        match *self {
            DefectProfile::Zero => Ok(()),
            DefectProfile::Constant { delta } if !(delta > 0.0 && delta.is_finite()) => {
                bad(format!("delta must be positive, got {delta}"))
            }
            DefectProfile::Harmonic { scale } if !(scale >= 0.0 && scale.is_finite()) => {
                bad(format!("harmonic scale must be nonnegative, got {scale}"))
            }
            DefectProfile::Exponential { l, .. } if !(l >= 0.0 && l.is_finite()) => {
                bad(format!("L must be nonnegative, got {l}"))
            }
            DefectProfile::Exponential { theta, .. } if !(theta > 0.0 && theta < 1.0) => {
                bad(format!("theta must lie in (0,1), got {theta}"))
            }
            DefectProfile::Window { magnitude, .. } if !(magnitude >= 0.0 && magnitude.is_finite()) => {
                bad(format!("window magnitude must be nonnegative, got {magnitude}"))
            }
            _ => Ok(()),
        }
    }

    /// Envelope value at step `n`.
    pub fn bound(&self, n: usize) -> f64 {
        match *self {
            DefectProfile::Zero => 0.0,
            DefectProfile::Constant { delta } => delta,
            DefectProfile::Harmonic { scale } => scale / (n as f64 + 1.0),
            DefectProfile::Exponential { l, theta } => l * theta.powi(n as i32),
            DefectProfile::Window { magnitude, until } => {
                if n < until {
                    magnitude
                } else {
                    0.0
                }
            }
        }
    }
}

/// How a magnitude is drawn under the envelope.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Uniform in `[0, bound)`.
    #[default]
    Uniform,
    /// Exactly the bound. Not allowed for constant profiles, whose
    /// defects must stay strictly below `delta`.
    Saturated,
}

/// Seeded recipe for generated defects.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectSchedule {
    pub profile: DefectProfile,
    #[serde(default)]
    pub sampling: Sampling,
    pub seed: u64,
}

impl DefectSchedule {
    pub fn new(profile: DefectProfile, sampling: Sampling, seed: u64) -> Self {
        DefectSchedule { profile, sampling, seed }
    }

    pub fn constant(delta: f64, seed: u64) -> Self {
        Self::new(DefectProfile::Constant { delta }, Sampling::Uniform, seed)
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if matches!(self.profile, DefectProfile::Constant { .. }) && self.sampling == Sampling::Saturated {
            return Err(ShadowError::Input("constant profiles must sample strictly below delta".into()));
        }
        Ok(())
    }

    fn magnitudes(&self, horizon: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..horizon)
            .map(|n| {
                let bound = self.profile.bound(n);
                match (self.sampling, self.profile) {
                    // keep rounding in later distance evaluations clear of the strict bound
                    (_, DefectProfile::Constant { .. }) => bound * rng.random::<f64>() * (1.0 - 1e-9),
                    (Sampling::Uniform, _) => bound * rng.random::<f64>(),
                    (Sampling::Saturated, _) => bound,
                }
            })
            .collect()
    }
}

/// Where generation is anchored.
#[derive(Clone, Debug, PartialEq)]
pub enum Anchor {
    /// `x_0 = start`, `x_{n+1} = f_{n+1}(x_n) + noise_n`.
    Forward(Point),
    /// `x_N = terminal`, `x_n = f_{n+1}^{-1}(x_{n+1} - noise_n)`.
    /// Keeps pseudo-orbits of expanding systems bounded.
    Backward(Point),
}

/// Forward-generated pseudo-orbit of `horizon` steps from `x0`.
pub fn perturb_orbit(
    system: &TimeVaryingSystem,
    x0: &Point,
    horizon: usize,
    schedule: &DefectSchedule,
) -> Result<PseudoOrbit> {
    generate(system, Anchor::Forward(x0.clone()), horizon, schedule)
}

/// Backward-generated pseudo-orbit ending at `terminal`; needs inverses.
pub fn perturb_orbit_backward(
    system: &TimeVaryingSystem,
    terminal: &Point,
    horizon: usize,
    schedule: &DefectSchedule,
) -> Result<PseudoOrbit> {
    generate(system, Anchor::Backward(terminal.clone()), horizon, schedule)
}

/// Generates a pseudo-orbit whose defect at step `n` is the scheduled
/// magnitude (realised exactly up to rounding in Euclidean factors).
pub fn generate(
    system: &TimeVaryingSystem,
    anchor: Anchor,
    horizon: usize,
    schedule: &DefectSchedule,
) -> Result<PseudoOrbit> {
    schedule.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mags = schedule.magnitudes(horizon, &mut rng);
    let points = walk(system, &anchor, &mags, &mut rng)?;
    PseudoOrbit::from_points(system, points)
}

fn walk(system: &TimeVaryingSystem, anchor: &Anchor, mags: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
    let space = system.space();
    let horizon = mags.len();
    match anchor {
        Anchor::Forward(x0) => {
            space.contains(x0)?;
            let mut pts = Vec::with_capacity(horizon + 1);
            pts.push(x0.clone());
            for (n, &m) in mags.iter().enumerate() {
                let image = system.apply(n + 1, &pts[n]);
                pts.push(space.perturb(&image, m, rng));
            }
            Ok(pts)
        }
        Anchor::Backward(terminal) => {
            space.contains(terminal)?;
            if !system.invertible_up_to(horizon) {
                return Err(ShadowError::Capability("backward generation needs invertible steps".into()));
            }
            let mut pts = vec![terminal.clone(); horizon + 1];
            for n in (0..horizon).rev() {
                let image = space.perturb(&pts[n + 1], mags[n], rng);
                pts[n] = system.apply_inverse(n + 1, &image)?;
            }
            Ok(pts)
        }
    }
}

/// Pseudo-orbit of a product system `A x B` whose two components are
/// generated independently (each with its own anchor) under one shared
/// magnitude sequence, so the max-metric defect equals the scheduled
/// magnitude. Used for hyperbolic families: stable part forward, unstable
/// part backward.
pub fn perturb_pair(
    product: &TimeVaryingSystem,
    (system_a, anchor_a): (&TimeVaryingSystem, Anchor),
    (system_b, anchor_b): (&TimeVaryingSystem, Anchor),
    horizon: usize,
    schedule: &DefectSchedule,
) -> Result<PseudoOrbit> {
    schedule.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mags = schedule.magnitudes(horizon, &mut rng);
    let a = walk(system_a, &anchor_a, &mags, &mut rng)?;
    let b = walk(system_b, &anchor_b, &mags, &mut rng)?;
    let points = a.into_iter().zip(b).map(|(p, q)| Point::pair(p, q)).collect();
    PseudoOrbit::from_points(product, points)
}

/// Classification thresholds; at least one must be set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    /// `delta`-pseudo test: every defect `< delta`.
    pub delta: Option<f64>,
    /// Limit test: sup of the final `window` defects `< tol`.
    pub tail: Option<TailTest>,
    /// Exponential test: `defect_n <= l * theta^n` for all `n`.
    pub exponential: Option<(f64, f64)>,
}

/// Finite-horizon stand-in for a `-> 0` statement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailTest {
    pub window: usize,
    pub tol: f64,
}

impl TailTest {
    /// Window covering the final quarter of `len` entries (at least one).
    pub fn final_quarter(len: usize, tol: f64) -> Self {
        TailTest { window: (len / 4).max(1), tol }
    }
}

/// Outcome of [`classify`]; `None` for criteria not requested.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub is_delta_pseudo: Option<bool>,
    pub is_limit_pseudo: Option<bool>,
    pub is_exponential_pseudo: Option<bool>,
    /// Number of trailing defects inspected by the limit test.
    pub tested_window: Option<usize>,
    pub tail_sup: Option<f64>,
}

/// Sup over the final `window` entries (all entries if shorter).
pub fn tail_sup(values: &[f64], window: usize) -> f64 {
    let start = values.len().saturating_sub(window);
    values[start..].iter().copied().fold(0.0, f64::max)
}

pub fn classify(orbit: &PseudoOrbit, criteria: &Criteria) -> Result<Classification> {
    if criteria.delta.is_none() && criteria.tail.is_none() && criteria.exponential.is_none() {
        return Err(ShadowError::Input("classify needs at least one criterion".into()));
    }
    let d = orbit.defects();
    let is_delta_pseudo = criteria.delta.map(|delta| d.iter().all(|&t| t < delta));
    let (is_limit_pseudo, tested_window, tail) = match criteria.tail {
        Some(t) => {
            if t.window == 0 {
                return Err(ShadowError::Input("tail window must be positive".into()));
            }
            let s = tail_sup(d, t.window);
            (Some(s < t.tol), Some(t.window.min(d.len())), Some(s))
        }
        None => (None, None, None),
    };
    let is_exponential_pseudo = criteria.exponential.map(|(l, theta)| {
        d.iter().enumerate().all(|(n, &t)| tolerance::le(t, l * theta.powi(n as i32)))
    });
    Ok(Classification { is_delta_pseudo, is_limit_pseudo, is_exponential_pseudo, tested_window, tail_sup: tail })
}

/// Refines a pseudo-orbit `y_0..y_N` of the `k`-th iterate into one of
/// the base system via `x_{nk+j} = F_[nk+1, nk+j](y_n)`.
pub fn interpolate_iterate(system: &TimeVaryingSystem, k: usize, coarse: &[Point]) -> Result<PseudoOrbit> {
    if k == 0 {
        return Err(ShadowError::Input("iterate order must be >= 1".into()));
    }
    if coarse.is_empty() {
        return Err(ShadowError::Input("coarse pseudo-orbit is empty".into()));
    }
    let n_coarse = coarse.len() - 1;
    let mut fine = Vec::with_capacity(k * n_coarse + 1);
    for (n, y) in coarse.iter().enumerate().take(n_coarse) {
        fine.push(y.clone());
        for j in 1..k {
            let prev = &fine[n * k + j - 1];
            let next = system.apply(n * k + j, prev);
            fine.push(next);
        }
    }
    fine.push(coarse[n_coarse].clone());
    PseudoOrbit::from_points(system, fine)
}

/// Appends `extra` points of the true orbit of the last point.
pub fn extend_finite(system: &TimeVaryingSystem, orbit: &PseudoOrbit, extra: usize) -> Result<PseudoOrbit> {
    let m = orbit.horizon();
    let mut points = orbit.points().to_vec();
    for i in 1..=extra {
        let next = system.apply(m + i, &points[m + i - 1]);
        points.push(next);
    }
    PseudoOrbit::from_points(system, points)
}

/// Space helper used by generators that need a random start.
pub fn sample_start(space: &MetricSpace, scale: f64, seed: u64) -> Point {
    space.sample(scale, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{doubling_system, scalar_contraction};
    use crate::space::Word;
    use crate::system::TimeVaryingSystem;
    use proptest::prelude::*;

    fn halving() -> TimeVaryingSystem {
        TimeVaryingSystem::autonomous(MetricSpace::euclidean(1), scalar_contraction(0.5).unwrap())
    }

    #[test]
    fn defects_examples() {
        let sys = halving();
        let orbit = sys.orbit(&Point::scalar(3.0), 6).unwrap();
        assert!(defects(&sys, &orbit).unwrap().iter().all(|&t| t == 0.0));
        let ones = vec![Point::scalar(1.0); 4];
        assert_eq!(defects(&sys, &ones).unwrap(), vec![0.5; 3]);
        assert!(defects(&sys, &ones[..1]).unwrap().is_empty());
        assert!(defects(&sys, &[]).is_err());
    }

    #[test]
    fn zero_schedule_gives_true_orbit() {
        let sys = halving();
        let p = perturb_orbit(&sys, &Point::scalar(1.0), 10, &DefectSchedule::new(DefectProfile::Zero, Sampling::Uniform, 1)).unwrap();
        assert_eq!(p.points(), sys.orbit(&Point::scalar(1.0), 10).unwrap().as_slice());
        assert!(p.defects().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn exponential_schedule_respects_envelope() {
        let sys = halving();
        let s = DefectSchedule::new(DefectProfile::Exponential { l: 2.0, theta: 0.7 }, Sampling::Uniform, 4);
        let p = perturb_orbit(&sys, &Point::scalar(1.0), 60, &s).unwrap();
        for (n, &t) in p.defects().iter().enumerate() {
            assert!(t <= 2.0 * 0.7f64.powi(n as i32) * (1.0 + 1e-12), "n={n}");
        }
        let c = classify(&p, &Criteria { exponential: Some((2.0, 0.7)), ..Default::default() }).unwrap();
        assert_eq!(c.is_exponential_pseudo, Some(true));
    }

    #[test]
    fn schedule_parameters_are_validated() {
        let sys = halving();
        let x = Point::scalar(0.0);
        for profile in [
            DefectProfile::Constant { delta: 0.0 },
            DefectProfile::Exponential { l: 1.0, theta: 1.0 },
            DefectProfile::Exponential { l: -1.0, theta: 0.5 },
            DefectProfile::Exponential { l: 1.0, theta: 0.0 },
        ] {
            let s = DefectSchedule::new(profile, Sampling::Uniform, 0);
            assert!(matches!(perturb_orbit(&sys, &x, 3, &s), Err(ShadowError::Input(_))), "{profile:?}");
        }
        let sat = DefectSchedule::new(DefectProfile::Constant { delta: 0.1 }, Sampling::Saturated, 0);
        assert!(perturb_orbit(&sys, &x, 3, &sat).is_err());
    }

    #[test]
    fn backward_generation_keeps_expanding_orbits_bounded() {
        let sys = doubling_system();
        let s = DefectSchedule::constant(0.3, 11);
        let p = perturb_orbit_backward(&sys, &Point::scalar(0.2), 500, &s).unwrap();
        assert!(p.points().iter().all(|q| q.as_vector().unwrap()[0].abs() < 1.0));
        assert!(p.defects().iter().all(|&t| t < 0.3));
    }

    #[test]
    fn classify_examples() {
        let sys = halving();
        let truth = PseudoOrbit::true_orbit(&sys, &Point::scalar(1.0), 20).unwrap();
        let all = Criteria { delta: Some(1e-3), tail: Some(TailTest { window: 5, tol: 1e-3 }), exponential: Some((1e-3, 0.1)) };
        let c = classify(&truth, &all).unwrap();
        assert_eq!((c.is_delta_pseudo, c.is_limit_pseudo, c.is_exponential_pseudo), (Some(true), Some(true), Some(true)));

        // x_{n+1} = x_n / 2 + 1/(n+1), so tau_n = 1/(n+1) exactly on the reals
        let mut pts = vec![Point::scalar(0.0)];
        for n in 0..200 {
            let x = pts[n].as_vector().unwrap()[0];
            pts.push(Point::scalar(x / 2.0 + 1.0 / (n as f64 + 1.0)));
        }
        let p = PseudoOrbit::from_points(&sys, pts).unwrap();
        let c = classify(
            &p,
            &Criteria { delta: Some(2.0), tail: Some(TailTest { window: 100, tol: 0.05 }), exponential: Some((1.0, 0.9)) },
        )
        .unwrap();
        // brute comparison of 1/(n+1) against 0.9^n over the horizon
        let oracle = (0..200).all(|n| 1.0 / (n as f64 + 1.0) <= 0.9f64.powi(n));
        assert!(!oracle);
        assert_eq!(c.is_delta_pseudo, Some(true));
        assert_eq!(c.is_limit_pseudo, Some(true));
        assert_eq!(c.is_exponential_pseudo, Some(oracle));

        // defects 3 * 0.5^n: x_{n+1} = x_n/2 + 3*0.5^n
        let mut pts = vec![Point::scalar(0.0)];
        for n in 0..30 {
            let x = pts[n].as_vector().unwrap()[0];
            pts.push(Point::scalar(x / 2.0 + 3.0 * 0.5f64.powi(n as i32)));
        }
        let p = PseudoOrbit::from_points(&sys, pts).unwrap();
        let c = classify(&p, &Criteria { exponential: Some((3.0, 0.5)), ..Default::default() }).unwrap();
        assert_eq!(c.is_exponential_pseudo, Some(true));
        assert!(classify(&p, &Criteria::default()).is_err());
    }

    #[test]
    fn interpolation_examples() {
        let sys = halving();
        let coarse = vec![Point::scalar(1.0), Point::scalar(0.7), Point::scalar(0.2)];
        let same = interpolate_iterate(&sys, 1, &coarse).unwrap();
        assert_eq!(same.points(), coarse.as_slice());

        // coarse true orbit of the second iterate: 1, 1/4, 1/16
        let coarse = vec![Point::scalar(1.0), Point::scalar(0.25), Point::scalar(0.0625)];
        let fine = interpolate_iterate(&sys, 2, &coarse).unwrap();
        assert_eq!(fine.len(), 5);
        assert!(fine.defects().iter().all(|&t| t == 0.0));
        assert!(interpolate_iterate(&sys, 0, &coarse).is_err());
    }

    #[test]
    fn extension_examples() {
        let sys = halving();
        let p = PseudoOrbit::from_points(&sys, vec![Point::scalar(1.0), Point::scalar(1.0), Point::scalar(0.1)]).unwrap();
        assert_eq!(extend_finite(&sys, &p, 0).unwrap(), p);
        let e = extend_finite(&sys, &p, 5).unwrap();
        let mut expected = p.defects().to_vec();
        expected.extend([0.0; 5]);
        assert_eq!(e.defects(), expected.as_slice());

        let d = doubling_system();
        let p = PseudoOrbit::from_points(&d, vec![Point::scalar(0.1), Point::scalar(0.3)]).unwrap();
        let e = extend_finite(&d, &p, 2).unwrap();
        assert_eq!(&e.points()[2..], &[Point::scalar(0.6), Point::scalar(1.2)]);
    }

    #[test]
    fn bernoulli_generation_uses_symbol_flips() {
        let sys = TimeVaryingSystem::autonomous(MetricSpace::bernoulli(12), crate::catalog::bernoulli_prepend(1).unwrap());
        let x0 = Point::Word(Word::constant(0, 12).unwrap());
        let p = perturb_orbit(&sys, &x0, 40, &DefectSchedule::constant(0.1, 2)).unwrap();
        for &t in p.defects() {
            assert!(t < 0.1);
            assert!(t == 0.0 || (t.log2().fract() == 0.0), "dyadic defect {t}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn constant_schedules_classify_as_delta_pseudo(seed in any::<u64>(), delta in 1e-6f64..2.0) {
            let sys = TimeVaryingSystem::autonomous(
                MetricSpace::euclidean(2),
                crate::catalog::sierpinski_homotheties().remove(1),
            );
            let x0 = Point::Vector(vec![0.3, 0.1]);
            let p = perturb_orbit(&sys, &x0, 30, &DefectSchedule::constant(delta, seed)).unwrap();
            let c = classify(&p, &Criteria { delta: Some(delta), ..Default::default() }).unwrap();
            prop_assert_eq!(c.is_delta_pseudo, Some(true));
        }

        #[test]
        fn extension_appends_zero_defects(seed in any::<u64>(), extra in 0usize..20) {
            let sys = halving();
            let p = perturb_orbit(&sys, &Point::scalar(1.0), 15, &DefectSchedule::constant(0.2, seed)).unwrap();
            let e = extend_finite(&sys, &p, extra).unwrap();
            let mut expected = p.defects().to_vec();
            expected.extend(std::iter::repeat_n(0.0, extra));
            prop_assert_eq!(e.defects(), expected.as_slice());
        }
    }
}
