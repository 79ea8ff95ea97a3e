//! System-level transforms: products, iterates, shifts and conjugacy, plus
//! transport of pseudo-orbits and shadow points across them.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ShadowError};
use crate::pseudo_orbit::PseudoOrbit;
use crate::space::{MetricSpace, Point};
use crate::system::{MapStep, PointFn, TimeVaryingSystem};

/// `(f_n × g_n)` on the max-product space. Certificates combine as
/// `alpha = max`, `beta = min` when both factors carry one.
pub fn product(a: &TimeVaryingSystem, b: &TimeVaryingSystem) -> TimeVaryingSystem {
    let space = MetricSpace::product(a.space().clone(), b.space().clone());
    let (sa, sb) = (a.clone(), b.clone());
    let mut out = TimeVaryingSystem::generated(space, move |n| {
        let (fa, fb) = (sa.step(n), sb.step(n));
        let label = format!("{} x {}", fa.label(), fb.label());
        let (fwd_a, fwd_b) = (fa.clone(), fb.clone());
        let forward: PointFn = Arc::new(move |p: &Point| {
            let (x, y) = p.as_pair().expect("product step acts on pairs");
            Point::pair(fwd_a.apply(x), fwd_b.apply(y))
        });
        let inverse: Option<PointFn> = (fa.is_invertible() && fb.is_invertible()).then(|| {
            Arc::new(move |p: &Point| {
                let (x, y) = p.as_pair().expect("product step acts on pairs");
                Point::pair(
                    fa.apply_inverse(x).expect("checked invertible"),
                    fb.apply_inverse(y).expect("checked invertible"),
                )
            }) as PointFn
        });
        MapStep::from_parts(label, forward, inverse, None)
    });
    if let (Some(x), Some(y)) = (a.alpha(), b.alpha()) {
        out = out.with_uniform_alpha(x.max(y));
    }
    if let (Some(x), Some(y)) = (a.beta(), b.beta()) {
        out = out.with_uniform_beta(x.min(y));
    }
    out
}

/// Product pseudo-orbit `(x_n, y_n)` of two pseudo-orbits of equal length.
pub fn product_pseudo_orbit(product: &TimeVaryingSystem, a: &PseudoOrbit, b: &PseudoOrbit) -> Result<PseudoOrbit> {
    if a.len() != b.len() {
        return Err(ShadowError::Input(format!("pseudo-orbit lengths differ: {} vs {}", a.len(), b.len())));
    }
    let points = a.points().iter().zip(b.points()).map(|(x, y)| Point::pair(x.clone(), y.clone())).collect();
    PseudoOrbit::from_points(product, points)
}

/// The `k`-th iterate: step `n` is `F_[(n-1)k+1, nk]`. Certificates
/// become `alpha^k` and `beta^k`.
pub fn iterate(system: &TimeVaryingSystem, k: usize) -> Result<TimeVaryingSystem> {
    if k == 0 {
        return Err(ShadowError::Input("iterate order must be >= 1".into()));
    }
    let base = system.clone();
    let mut out = TimeVaryingSystem::generated(system.space().clone(), move |n| {
        let steps: Vec<MapStep> = ((n - 1) * k + 1..=n * k).map(|i| base.step(i)).collect();
        let label = format!("F[{},{}]", (n - 1) * k + 1, n * k);
        let invertible = steps.iter().all(MapStep::is_invertible);
        let fwd = steps.clone();
        let forward: PointFn = Arc::new(move |p: &Point| fwd.iter().fold(p.clone(), |x, s| s.apply(&x)));
        let inverse: Option<PointFn> = invertible.then(|| {
            Arc::new(move |p: &Point| {
                steps.iter().rev().fold(p.clone(), |y, s| s.apply_inverse(&y).expect("checked invertible"))
            }) as PointFn
        });
        MapStep::from_parts(label, forward, inverse, None)
    });
    if let Some(a) = system.alpha() {
        out = out.with_uniform_alpha(a.powi(k as i32));
    }
    if let Some(b) = system.beta() {
        out = out.with_uniform_beta(b.powi(k as i32));
    }
    Ok(out)
}

/// `{f_n}_{n > k}` re-indexed from 1: step `n` is base step `n + k`.
pub fn shift(system: &TimeVaryingSystem, k: usize) -> TimeVaryingSystem {
    if k == 0 {
        return system.clone();
    }
    let base = system.clone();
    let mut out = TimeVaryingSystem::generated(system.space().clone(), move |n| base.step(n + k));
    if let Some(a) = system.alpha() {
        out = out.with_uniform_alpha(a);
    }
    if let Some(b) = system.beta() {
        out = out.with_uniform_beta(b);
    }
    out
}

/// `x_k, x_{k+1}, ...` as a pseudo-orbit of `shift(system, k)`.
pub fn shift_pseudo_orbit(shifted: &TimeVaryingSystem, p: &PseudoOrbit, k: usize) -> Result<PseudoOrbit> {
    if k > p.horizon() {
        return Err(ShadowError::Input(format!("shift {k} exceeds horizon {}", p.horizon())));
    }
    PseudoOrbit::from_points(shifted, p.points()[k..].to_vec())
}

/// Pulls a shadow `y` of the shifted pseudo-orbit back to a point
/// `x = F_k^{-1}(y)` of the base system, so that `F_{n+k}(x) = F'_n(y)`.
/// Refuses when any of `f_1..f_k` lacks an inverse.
pub fn pull_back_shift(system: &TimeVaryingSystem, k: usize, y: &Point) -> Result<Point> {
    if k > 0 && !system.invertible_up_to(k) {
        return Err(ShadowError::Capability(format!("steps 1..={k} must be invertible to pull back a shift")));
    }
    system.pull_back_window(1, k, y)
}

/// Uniform homeomorphism `h: X -> Y` with inverse.
#[derive(Clone)]
pub struct Conjugacy {
    pub target: MetricSpace,
    forward: PointFn,
    backward: PointFn,
}

impl std::fmt::Debug for Conjugacy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Conjugacy").field("target", &self.target).finish_non_exhaustive()
    }
}

/// Which way to push points through a conjugacy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Apply `h`.
    Forward,
    /// Apply `h^{-1}`.
    Backward,
}

impl Conjugacy {
    pub fn new<F, G>(target: MetricSpace, forward: F, backward: G) -> Self
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
        G: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        Conjugacy { target, forward: Arc::new(forward), backward: Arc::new(backward) }
    }

    pub fn identity(space: MetricSpace) -> Self {
        Self::new(space, Point::clone, Point::clone)
    }

    /// `h(x) = a x + b` on the real line; `a` must be nonzero.
    pub fn affine_scalar(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(ShadowError::Input(format!("affine conjugacy needs finite a != 0, got a = {a}, b = {b}")));
        }
        let coord = |p: &Point| p.as_vector().expect("scalar conjugacy")[0];
        Ok(Self::new(
            MetricSpace::euclidean(1),
            move |p: &Point| Point::scalar(a * coord(p) + b),
            move |p: &Point| Point::scalar((coord(p) - b) / a),
        ))
    }

    pub fn apply(&self, x: &Point) -> Point {
        (self.forward)(x)
    }

    pub fn apply_inverse(&self, y: &Point) -> Point {
        (self.backward)(y)
    }

    pub fn map(&self, direction: Direction, p: &Point) -> Point {
        match direction {
            Direction::Forward => self.apply(p),
            Direction::Backward => self.apply_inverse(p),
        }
    }

    /// Largest `d(h^{-1}(h(x)), x)` over `samples` points drawn from
    /// `source` at `scale`.
    pub fn round_trip_error(&self, source: &MetricSpace, scale: f64, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                let x = source.sample(scale, &mut rng);
                source.dist(&self.apply_inverse(&self.apply(&x)), &x)
            })
            .fold(0.0, f64::max)
    }
}

/// `g_n = h ∘ f_n ∘ h^{-1}` on the conjugacy's target space.
/// Certificates are dropped: a homeomorphism need not preserve ratios.
pub fn conjugate_system(system: &TimeVaryingSystem, conj: &Conjugacy) -> TimeVaryingSystem {
    let base = system.clone();
    let conj = conj.clone();
    TimeVaryingSystem::generated(conj.target.clone(), move |n| {
        let f = base.step(n);
        let label = format!("h ∘ ({}) ∘ h^-1", f.label());
        let (h, f_fwd) = (conj.clone(), f.clone());
        let forward: PointFn = Arc::new(move |y: &Point| h.apply(&f_fwd.apply(&h.apply_inverse(y))));
        let h = conj.clone();
        let inverse: Option<PointFn> = f.is_invertible().then(|| {
            Arc::new(move |y: &Point| h.apply(&f.apply_inverse(&h.apply_inverse(y)).expect("checked invertible")))
                as PointFn
        });
        MapStep::from_parts(label, forward, inverse, None)
    })
}

/// Maps the points of `p` through `h` (or `h^{-1}`) and recomputes
/// defects under `target_system`.
pub fn transport_pseudo_orbit(
    p: &PseudoOrbit,
    conj: &Conjugacy,
    direction: Direction,
    target_system: &TimeVaryingSystem,
) -> Result<PseudoOrbit> {
    let points = p.points().iter().map(|x| conj.map(direction, x)).collect();
    PseudoOrbit::from_points(target_system, points)
}
