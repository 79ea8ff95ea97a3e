//! Map steps, schedules and time-varying systems.
//!
//! A time-varying system is a sequence `f_1, f_2, ...` of self-maps of a
//! metric space. The state after `n` steps is `F_n = f_n ∘ ... ∘ f_1`, with
//! `F_0` the identity, and the window `F_[i,j] = f_j ∘ ... ∘ f_i` is the
//! identity whenever `i > j`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, ShadowError};
use crate::space::{MetricSpace, Point};

/// Shared point map.
pub type PointFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// Uniform two-point ratio certificate of a single step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Certificate {
    /// `d(f(x), f(y)) <= alpha_upper * d(x, y)`.
    Contracting { alpha_upper: f64 },
    /// `d(f(x), f(y)) >= beta_lower * d(x, y)`.
    Expanding { beta_lower: f64 },
}

/// One map of the family, with optional inverse and certificate.
#[derive(Clone)]
pub struct MapStep {
    label: String,
    forward: PointFn,
    inverse: Option<PointFn>,
    certificate: Option<Certificate>,
}

impl fmt::Debug for MapStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapStep")
            .field("label", &self.label)
            .field("invertible", &self.inverse.is_some())
            .field("certificate", &self.certificate)
            .finish()
    }
}

impl MapStep {
    pub fn new<F>(label: impl Into<String>, forward: F) -> Self
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        MapStep { label: label.into(), forward: Arc::new(forward), inverse: None, certificate: None }
    }

    pub fn with_inverse<G>(mut self, inverse: G) -> Self
    where
        G: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn with_certificate(mut self, certificate: Certificate) -> Self {
        self.certificate = Some(certificate);
        self
    }

    pub(crate) fn from_parts(
        label: String,
        forward: PointFn,
        inverse: Option<PointFn>,
        certificate: Option<Certificate>,
    ) -> Self {
        MapStep { label, forward, inverse, certificate }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, x: &Point) -> Point {
        (self.forward)(x)
    }

    pub fn apply_inverse(&self, y: &Point) -> Option<Point> {
        self.inverse.as_ref().map(|g| g(y))
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn certificate(&self) -> Option<Certificate> {
        self.certificate
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.certificate {
            Some(Certificate::Contracting { alpha_upper }) => Some(alpha_upper),
            _ => None,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self.certificate {
            Some(Certificate::Expanding { beta_lower }) => Some(beta_lower),
            _ => None,
        }
    }

    pub(crate) fn forward_fn(&self) -> PointFn {
        self.forward.clone()
    }

    pub(crate) fn inverse_fn(&self) -> Option<PointFn> {
        self.inverse.clone()
    }
}

/// Rule producing the step used at time `n >= 1`.
#[derive(Clone)]
pub enum Schedule {
    /// `f_n = steps[(n - 1) % len]`.
    Cyclic(Vec<MapStep>),
    /// `f_n = catalog[indices[(n - 1) % indices.len()]]`.
    Sequence { catalog: Vec<MapStep>, indices: Vec<usize> },
    /// Arbitrary rule `n -> f_n`.
    Generated(Arc<dyn Fn(usize) -> MapStep + Send + Sync>),
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Cyclic(steps) => f.debug_tuple("Cyclic").field(steps).finish(),
            Schedule::Sequence { catalog, indices } => f
                .debug_struct("Sequence")
                .field("catalog", catalog)
                .field("period", &indices.len())
                .finish(),
            Schedule::Generated(_) => f.write_str("Generated(..)"),
        }
    }
}

impl Schedule {
    /// The finite set of steps the schedule draws from, if known.
    fn catalog(&self) -> Option<&[MapStep]> {
        match self {
            Schedule::Cyclic(steps) => Some(steps),
            Schedule::Sequence { catalog, .. } => Some(catalog),
            Schedule::Generated(_) => None,
        }
    }
}

/// A time-varying map over a metric space.
#[derive(Clone, Debug)]
pub struct TimeVaryingSystem {
    space: MetricSpace,
    schedule: Schedule,
    alpha: Option<f64>,
    beta: Option<f64>,
}

impl TimeVaryingSystem {
    /// Builds a system from a schedule. Uniform certificates are derived
    /// from a finite catalog: `alpha = max` of step alphas and `beta = min`
    /// of step betas, when every catalog entry carries one.
    pub fn new(space: MetricSpace, schedule: Schedule) -> Result<Self> {
        match &schedule {
            Schedule::Cyclic(steps) if steps.is_empty() => {
                return Err(ShadowError::Input("cyclic schedule needs at least one step".into()))
            }
            Schedule::Sequence { catalog, indices } => {
                if indices.is_empty() {
                    return Err(ShadowError::Input("sequence schedule needs indices".into()));
                }
                if let Some(bad) = indices.iter().find(|&&i| i >= catalog.len()) {
                    return Err(ShadowError::Input(format!(
                        "schedule index {bad} out of range for catalog of {}",
                        catalog.len()
                    )));
                }
            }
            _ => {}
        }
        let (alpha, beta) = match schedule.catalog() {
            Some(steps) => (
                steps.iter().map(MapStep::alpha).collect::<Option<Vec<_>>>().map(|v| v.into_iter().fold(0.0, f64::max)),
                steps
                    .iter()
                    .map(MapStep::beta)
                    .collect::<Option<Vec<_>>>()
                    .map(|v| v.into_iter().fold(f64::INFINITY, f64::min)),
            ),
            None => (None, None),
        };
        Ok(TimeVaryingSystem { space, schedule, alpha, beta })
    }

    /// Autonomous system `f_n = step` for all `n`.
    pub fn autonomous(space: MetricSpace, step: MapStep) -> Self {
        Self::new(space, Schedule::Cyclic(vec![step])).expect("one-step schedule is valid")
    }

    /// Steps `catalog[indices[0]], catalog[indices[1]], ...` repeating.
    pub fn sequence(space: MetricSpace, catalog: Vec<MapStep>, indices: Vec<usize>) -> Result<Self> {
        Self::new(space, Schedule::Sequence { catalog, indices })
    }

    /// System from an arbitrary rule. Certificates, if any, must be
    /// attached with [`with_uniform_alpha`](Self::with_uniform_alpha) or
    /// [`with_uniform_beta`](Self::with_uniform_beta).
    pub fn generated<F>(space: MetricSpace, rule: F) -> Self
    where
        F: Fn(usize) -> MapStep + Send + Sync + 'static,
    {
        TimeVaryingSystem { space, schedule: Schedule::Generated(Arc::new(rule)), alpha: None, beta: None }
    }

    pub fn with_uniform_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_uniform_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    /// Drops both uniform certificates.
    pub fn without_certificates(mut self) -> Self {
        self.alpha = None;
        self.beta = None;
        self
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// Uniform contracting ratio, when certified.
    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// Uniform expanding ratio, when certified.
    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// The step `f_n`, `n >= 1`.
    pub fn step(&self, n: usize) -> MapStep {
        assert!(n >= 1, "steps are indexed from 1");
        match &self.schedule {
            Schedule::Cyclic(steps) => steps[(n - 1) % steps.len()].clone(),
            Schedule::Sequence { catalog, indices } => catalog[indices[(n - 1) % indices.len()]].clone(),
            Schedule::Generated(rule) => rule(n),
        }
    }

    /// Applies `f_n`.
    pub fn apply(&self, n: usize, x: &Point) -> Point {
        self.step(n).apply(x)
    }

    /// Applies `f_n^{-1}`; capability error when the step has no inverse.
    pub fn apply_inverse(&self, n: usize, y: &Point) -> Result<Point> {
        self.step(n)
            .apply_inverse(y)
            .ok_or_else(|| ShadowError::Capability(format!("step {n} has no inverse")))
    }

    /// True when every step in `1..=n` is invertible.
    pub fn invertible_up_to(&self, n: usize) -> bool {
        match self.schedule.catalog() {
            Some(steps) => steps.iter().all(MapStep::is_invertible),
            None => (1..=n).all(|i| self.step(i).is_invertible()),
        }
    }

    /// `[x0, F_1(x0), ..., F_N(x0)]`.
    pub fn orbit(&self, x0: &Point, horizon: usize) -> Result<Vec<Point>> {
        self.space.contains(x0)?;
        let mut out = Vec::with_capacity(horizon + 1);
        out.push(x0.clone());
        for n in 1..=horizon {
            let next = self.apply(n, &out[n - 1]);
            out.push(next);
        }
        Ok(out)
    }

    /// `F_[i,j](x) = f_j ∘ ... ∘ f_i (x)`; identity when `i > j`.
    pub fn compose_window(&self, i: usize, j: usize, x: &Point) -> Result<Point> {
        if i < 1 {
            return Err(ShadowError::Input("window start must be >= 1".into()));
        }
        self.space.contains(x)?;
        let mut y = x.clone();
        for n in i..=j {
            y = self.apply(n, &y);
        }
        Ok(y)
    }

    /// `F_[i,j]^{-1}(y) = f_i^{-1} ∘ ... ∘ f_j^{-1} (y)`; identity when `i > j`.
    pub fn pull_back_window(&self, i: usize, j: usize, y: &Point) -> Result<Point> {
        if i < 1 {
            return Err(ShadowError::Input("window start must be >= 1".into()));
        }
        self.space.contains(y)?;
        let mut x = y.clone();
        for n in (i..=j).rev() {
            x = self.apply_inverse(n, &x)?;
        }
        Ok(x)
    }

    /// `d(f_n(x), f_n(y)) / d(x, y)`.
    pub fn step_ratio(&self, n: usize, x: &Point, y: &Point) -> Result<f64> {
        if n < 1 {
            return Err(ShadowError::Input("steps are indexed from 1".into()));
        }
        let d = self.space.distance(x, y)?;
        if d == 0.0 {
            return Err(ShadowError::DegeneratePair);
        }
        let step = self.step(n);
        Ok(self.space.dist(&step.apply(x), &step.apply(y)) / d)
    }
}
