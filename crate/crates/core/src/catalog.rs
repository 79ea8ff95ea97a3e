//! Constructors for the standard example families. Every constructor
//! validates its certificate before handing out a step.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, ShadowError};
use crate::space::{MetricSpace, Point};
use crate::system::{Certificate, MapStep, TimeVaryingSystem};

/// Grid resolution for derivative certificates of interval maps.
pub const DEFAULT_DERIVATIVE_GRID: usize = 10_000;

fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    a.clone().svd(false, false).singular_values
}

/// Spectral norm, i.e. the Euclidean operator norm.
pub fn operator_norm(a: &DMatrix<f64>) -> f64 {
    singular_values(a).iter().copied().fold(0.0, f64::max)
}

/// Smallest singular value: the exact global lower two-point ratio of `x -> Ax`.
pub fn min_singular_value(a: &DMatrix<f64>) -> f64 {
    singular_values(a).iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_affine_shape(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<()> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(ShadowError::Input(format!("matrix must be square and non-empty, got {}x{}", a.nrows(), a.ncols())));
    }
    if b.len() != a.nrows() {
        return Err(ShadowError::Input(format!("offset has {} entries, matrix has {} rows", b.len(), a.nrows())));
    }
    Ok(())
}

fn affine_fn(a: DMatrix<f64>, b: DVector<f64>) -> impl Fn(&Point) -> Point + Send + Sync + 'static {
    move |p: &Point| {
        let x = DVector::from_column_slice(p.as_vector().expect("affine map on a vector"));
        Point::Vector((&a * x + &b).as_slice().to_vec())
    }
}

fn affine_inverse_fn(a_inv: DMatrix<f64>, b: DVector<f64>) -> impl Fn(&Point) -> Point + Send + Sync + 'static {
    move |p: &Point| {
        let y = DVector::from_column_slice(p.as_vector().expect("affine map on a vector"));
        Point::Vector((&a_inv * (y - &b)).as_slice().to_vec())
    }
}

fn describe(a: &DMatrix<f64>, b: &DVector<f64>) -> String {
    let rows: Vec<String> = a
        .row_iter()
        .map(|r| r.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(","))
        .collect();
    let off: Vec<String> = b.iter().map(|v| format!("{v}")).collect();
    format!("x -> [{}]x + ({})", rows.join(";"), off.join(","))
}

/// `x -> Ax + b` with `alpha_upper = ||A||`. Requires `||A|| < 1`.
/// The step carries an inverse when `A` is invertible.
pub fn affine_contraction(a: DMatrix<f64>, b: DVector<f64>) -> Result<MapStep> {
    check_affine_shape(&a, &b)?;
    let alpha = operator_norm(&a);
    if alpha >= 1.0 {
        return Err(ShadowError::Certificate(format!("operator norm {alpha} is not below 1")));
    }
    let label = describe(&a, &b);
    let inverse = a.clone().try_inverse().filter(|_| min_singular_value(&a) > 1e-12);
    let mut step = MapStep::new(label, affine_fn(a, b.clone()))
        .with_certificate(Certificate::Contracting { alpha_upper: alpha });
    if let Some(a_inv) = inverse {
        step = step.with_inverse(affine_inverse_fn(a_inv, b));
    }
    Ok(step)
}

/// Invertible `x -> Ax + b` on Euclidean space with
/// `beta_lower = sigma_min(A)`. Requires `sigma_min(A) > 1`.
///
/// Quotient-torus endomorphisms are not offered: being non-injective they
/// have global two-point ratio infimum 0.
pub fn affine_expansion(a: DMatrix<f64>, b: DVector<f64>) -> Result<MapStep> {
    check_affine_shape(&a, &b)?;
    let sigma_min = min_singular_value(&a);
    let a_inv = a
        .clone()
        .try_inverse()
        .filter(|_| sigma_min > 0.0)
        .ok_or_else(|| ShadowError::Inversion(describe(&a, &b)))?;
    if sigma_min <= 1.0 {
        return Err(ShadowError::Certificate(format!("smallest singular value {sigma_min} is not above 1")));
    }
    let label = describe(&a, &b);
    Ok(MapStep::new(label, affine_fn(a, b.clone()))
        .with_inverse(affine_inverse_fn(a_inv, b))
        .with_certificate(Certificate::Expanding { beta_lower: sigma_min }))
}

/// `x -> beta * x` on the real line.
pub fn scalar_expansion(beta: f64) -> Result<MapStep> {
    affine_expansion(DMatrix::from_element(1, 1, beta), DVector::zeros(1))
}

/// `x -> alpha * x` on the real line.
pub fn scalar_contraction(alpha: f64) -> Result<MapStep> {
    affine_contraction(DMatrix::from_element(1, 1, alpha), DVector::zeros(1))
}

/// The doubling map `x -> 2x` as an autonomous system on the real line.
pub fn doubling_system() -> TimeVaryingSystem {
    TimeVaryingSystem::autonomous(MetricSpace::euclidean(1), scalar_expansion(2.0).expect("2 > 1"))
}

/// The three rate-1/2 homotheties fixing the vertices of the unit
/// equilateral triangle.
pub fn sierpinski_homotheties() -> Vec<MapStep> {
    let vertices = [(0.0, 0.0), (1.0, 0.0), (0.5, 3f64.sqrt() / 2.0)];
    vertices
        .iter()
        .map(|&(vx, vy)| {
            affine_contraction(DMatrix::identity(2, 2) * 0.5, DVector::from_vec(vec![vx / 2.0, vy / 2.0]))
                .expect("norm 1/2")
        })
        .collect()
}

/// Prepends `symbol` to a Bernoulli word; contracting with ratio 1/2.
///
/// The attached inverse drops the first symbol. It is a right inverse on
/// the image of the step (words starting with `symbol`), which is all the
/// pull-back constructions need.
pub fn bernoulli_prepend(symbol: u8) -> Result<MapStep> {
    if symbol > 1 {
        return Err(ShadowError::Input(format!("symbol {symbol} is not in {{0,1}}")));
    }
    Ok(MapStep::new(format!("prepend {symbol}"), move |p: &Point| {
        Point::Word(p.as_word().expect("prepend acts on words").prepend(symbol))
    })
    .with_inverse(|p: &Point| Point::Word(p.as_word().expect("prepend acts on words").drop_first()))
    .with_certificate(Certificate::Contracting { alpha_upper: 0.5 }))
}

/// Stable/unstable coordinate split shared by a hyperbolic family.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicSplitting {
    pub stable_dims: Vec<usize>,
    pub unstable_dims: Vec<usize>,
    /// Upper ratio on the stable block.
    pub alpha_stable: f64,
    /// Lower ratio on the unstable block.
    pub beta_unstable: f64,
}

impl HyperbolicSplitting {
    pub fn dim(&self) -> usize {
        self.stable_dims.len() + self.unstable_dims.len()
    }

    /// Space of split points: stable block times unstable block, max metric.
    pub fn space(&self) -> MetricSpace {
        MetricSpace::product(
            MetricSpace::euclidean(self.stable_dims.len()),
            MetricSpace::euclidean(self.unstable_dims.len()),
        )
    }

    /// Coordinates -> `(stable, unstable)` pair.
    pub fn project(&self, v: &[f64]) -> Result<Point> {
        if v.len() != self.dim() {
            return Err(ShadowError::Input(format!("expected {} coordinates, got {}", self.dim(), v.len())));
        }
        let pick = |dims: &[usize]| Point::Vector(dims.iter().map(|&i| v[i]).collect());
        Ok(Point::pair(pick(&self.stable_dims), pick(&self.unstable_dims)))
    }

    /// Inverse of [`project`](Self::project).
    pub fn embed(&self, p: &Point) -> Result<Vec<f64>> {
        let (s, u) = p.as_pair().ok_or_else(|| ShadowError::Input("expected a split point".into()))?;
        let (s, u) = (
            s.as_vector().ok_or_else(|| ShadowError::Input("stable part is not a vector".into()))?,
            u.as_vector().ok_or_else(|| ShadowError::Input("unstable part is not a vector".into()))?,
        );
        let mut v = vec![0.0; self.dim()];
        for (&i, &x) in self.stable_dims.iter().zip(s) {
            v[i] = x;
        }
        for (&i, &x) in self.unstable_dims.iter().zip(u) {
            v[i] = x;
        }
        Ok(v)
    }

    fn validate(&self) -> Result<()> {
        let mut all: Vec<usize> = self.stable_dims.iter().chain(&self.unstable_dims).copied().collect();
        all.sort_unstable();
        if all != (0..all.len()).collect::<Vec<_>>() {
            return Err(ShadowError::Input("stable and unstable dims must partition the coordinates".into()));
        }
        Ok(())
    }
}

/// A block-diagonal hyperbolic linear map and its two blocks.
#[derive(Clone, Debug)]
pub struct HyperbolicStep {
    /// Acts on `(stable, unstable)` pairs.
    pub step: MapStep,
    pub stable: MapStep,
    pub unstable: MapStep,
    pub splitting: HyperbolicSplitting,
}

/// `diag(S | U)` with `||S|| < 1` and `||U^{-1}|| < 1`.
pub fn hyperbolic_linear(stable: DMatrix<f64>, unstable: DMatrix<f64>) -> Result<HyperbolicStep> {
    let ds = stable.nrows();
    let du = unstable.nrows();
    let s_step = affine_contraction(stable.clone(), DVector::zeros(ds));
    let u_step = affine_expansion(unstable.clone(), DVector::zeros(du));
    let (s_step, u_step) = match (s_step, u_step) {
        (Ok(s), Ok(u)) => (s, u),
        (Err(es), Err(eu)) => {
            return Err(ShadowError::Certificate(format!("stable block: {es}; unstable block: {eu}")))
        }
        (Err(e), _) => return Err(ShadowError::Certificate(format!("stable block: {e}"))),
        (_, Err(e)) => return Err(ShadowError::Certificate(format!("unstable block: {e}"))),
    };
    let splitting = HyperbolicSplitting {
        stable_dims: (0..ds).collect(),
        unstable_dims: (ds..ds + du).collect(),
        alpha_stable: s_step.alpha().expect("contraction certificate"),
        beta_unstable: u_step.beta().expect("expansion certificate"),
    };
    let label = format!("diag({} | {})", s_step.label(), u_step.label());
    let (sf, uf) = (s_step.forward_fn(), u_step.forward_fn());
    let forward = Arc::new(move |p: &Point| {
        let (a, b) = p.as_pair().expect("hyperbolic step acts on split points");
        Point::pair(sf(a), uf(b))
    });
    let inverse = match (s_step.inverse_fn(), u_step.inverse_fn()) {
        (Some(si), Some(ui)) => Some(Arc::new(move |p: &Point| {
            let (a, b) = p.as_pair().expect("hyperbolic step acts on split points");
            Point::pair(si(a), ui(b))
        }) as crate::system::PointFn),
        _ => None,
    };
    Ok(HyperbolicStep {
        step: MapStep::from_parts(label, forward, inverse, None),
        stable: s_step,
        unstable: u_step,
        splitting,
    })
}

/// A schedule of hyperbolic steps sharing one splitting, together with
/// its stable and unstable block systems.
#[derive(Clone, Debug)]
pub struct HyperbolicFamily {
    pub system: TimeVaryingSystem,
    pub stable: TimeVaryingSystem,
    pub unstable: TimeVaryingSystem,
    /// Uniform splitting: `alpha` is the max over steps, `beta` the min.
    pub splitting: HyperbolicSplitting,
}

/// Builds the family `f_n = steps[indices[(n-1) % len]]`.
pub fn hyperbolic_family(steps: Vec<HyperbolicStep>, indices: Vec<usize>) -> Result<HyperbolicFamily> {
    let first = steps.first().ok_or_else(|| ShadowError::Input("empty hyperbolic catalog".into()))?;
    for s in &steps {
        s.splitting.validate()?;
        if s.splitting.stable_dims != first.splitting.stable_dims
            || s.splitting.unstable_dims != first.splitting.unstable_dims
        {
            return Err(ShadowError::Input("steps do not share stable and unstable subspaces".into()));
        }
    }
    let splitting = HyperbolicSplitting {
        stable_dims: first.splitting.stable_dims.clone(),
        unstable_dims: first.splitting.unstable_dims.clone(),
        alpha_stable: steps.iter().map(|s| s.splitting.alpha_stable).fold(0.0, f64::max),
        beta_unstable: steps.iter().map(|s| s.splitting.beta_unstable).fold(f64::INFINITY, f64::min),
    };
    let space = splitting.space();
    let (ss, us) = space.factors().expect("product space");
    let (ss, us) = (ss.clone(), us.clone());
    let system = TimeVaryingSystem::sequence(space, steps.iter().map(|s| s.step.clone()).collect(), indices.clone())?;
    let stable = TimeVaryingSystem::sequence(ss, steps.iter().map(|s| s.stable.clone()).collect(), indices.clone())?;
    let unstable = TimeVaryingSystem::sequence(us, steps.iter().map(|s| s.unstable.clone()).collect(), indices)?;
    Ok(HyperbolicFamily { system, stable, unstable, splitting })
}

/// A differentiable real map with its derivative.
#[derive(Clone)]
pub struct IntervalMap {
    pub label: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl IntervalMap {
    pub fn new<F, D>(label: impl Into<String>, f: F, df: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        IntervalMap { label: label.into(), f: Arc::new(f), df: Arc::new(df) }
    }
}

/// Steps for maps sharing an attracting fixed point `p` inside `U = (lo, hi)`.
///
/// Each map must fix `p`, send the sampled grid of `[lo, hi]` into
/// `[lo, hi]`, and have `|f'| < 1 - margin` there. The step certificate is
/// the grid supremum of `|f'|`.
pub fn interval_attractor_family(
    maps: &[IntervalMap],
    p: f64,
    interval: (f64, f64),
    margin: f64,
    grid: usize,
) -> Result<Vec<MapStep>> {
    let (lo, hi) = interval;
    if !(lo < p && p < hi) {
        return Err(ShadowError::Input(format!("fixed point {p} is not inside ({lo}, {hi})")));
    }
    if !(margin > 0.0 && margin < 1.0) || grid < 2 {
        return Err(ShadowError::Input("margin must lie in (0,1) and grid must have >= 2 points".into()));
    }
    maps.iter()
        .map(|m| {
            if ((m.f)(p) - p).abs() > 1e-12 {
                return Err(ShadowError::Input(format!("{} does not fix {p}", m.label)));
            }
            let mut sup = 0.0f64;
            for i in 0..grid {
                let x = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
                let y = (m.f)(x);
                if !(lo..=hi).contains(&y) {
                    return Err(ShadowError::Certificate(format!("{} maps {x} outside the interval", m.label)));
                }
                sup = sup.max((m.df)(x).abs());
            }
            if sup >= 1.0 - margin {
                return Err(ShadowError::Certificate(format!(
                    "{}: sampled |f'| reaches {sup}, not below 1 - {margin}",
                    m.label
                )));
            }
            let f = m.f.clone();
            Ok(MapStep::new(m.label.clone(), move |q: &Point| {
                Point::scalar(f(q.as_vector().expect("interval map on a scalar")[0]))
            })
            .with_certificate(Certificate::Contracting { alpha_upper: sup }))
        })
        .collect()
}

/// `f_n(x) = x^(n+1)` on `[0, 1]`.
pub fn power_family() -> TimeVaryingSystem {
    TimeVaryingSystem::generated(MetricSpace::euclidean(1), |n| {
        let e = (n + 1) as i32;
        MapStep::new(format!("x^{e}"), move |p: &Point| Point::scalar(p.as_vector().expect("scalar")[0].powi(e)))
    })
}

/// `g_n(x) = 2((x+1)/2)^(n+1) - 1` on `[-1, 1]`; conjugate to
/// [`power_family`] through `h(x) = 2x - 1`.
pub fn shifted_power_family() -> TimeVaryingSystem {
    TimeVaryingSystem::generated(MetricSpace::euclidean(1), |n| {
        let e = (n + 1) as i32;
        MapStep::new(format!("2((x+1)/2)^{e}-1"), move |p: &Point| {
            let x = p.as_vector().expect("scalar")[0];
            Point::scalar(2.0 * ((x + 1.0) / 2.0).powi(e) - 1.0)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Word;
    use crate::system::TimeVaryingSystem;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sampled_ratio_violation(step: &MapStep, space: &MetricSpace, scale: f64, seed: u64) -> f64 {
        let sys = TimeVaryingSystem::autonomous(space.clone(), step.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let x = space.sample(scale, &mut rng);
            let y = space.sample(scale, &mut rng);
            let Ok(r) = sys.step_ratio(1, &x, &y) else { continue };
            let v = match step.certificate() {
                Some(Certificate::Contracting { alpha_upper }) => r - alpha_upper,
                Some(Certificate::Expanding { beta_lower }) => beta_lower - r,
                None => panic!("no certificate"),
            };
            worst = worst.max(v);
        }
        worst
    }

    #[test]
    fn sierpinski_homotheties_have_rate_one_half() {
        for g in sierpinski_homotheties() {
            assert!((g.alpha().unwrap() - 0.5).abs() < 1e-12);
            assert!(sampled_ratio_violation(&g, &MetricSpace::euclidean(2), 2.0, 1) <= 1e-9);
        }
    }

    #[test]
    fn zero_matrix_is_a_constant_map() {
        let s = affine_contraction(DMatrix::zeros(2, 2), DVector::from_vec(vec![1.0, 2.0])).unwrap();
        assert_eq!(s.alpha(), Some(0.0));
        assert!(!s.is_invertible());
        assert_eq!(s.apply(&Point::Vector(vec![5.0, -3.0])), Point::Vector(vec![1.0, 2.0]));
    }

    #[test]
    fn diagonal_contraction_norm() {
        let s = affine_contraction(DMatrix::from_diagonal(&DVector::from_vec(vec![0.3, 0.8])), DVector::zeros(2)).unwrap();
        assert!((s.alpha().unwrap() - 0.8).abs() < 1e-12);
        assert!(matches!(
            affine_contraction(DMatrix::identity(2, 2), DVector::zeros(2)),
            Err(ShadowError::Certificate(_))
        ));
    }

    #[test]
    fn expansion_certificates() {
        let d = scalar_expansion(2.0).unwrap();
        assert_eq!(d.beta(), Some(2.0));
        assert_eq!(d.apply(&Point::scalar(0.3)), Point::scalar(0.6));
        let s = affine_expansion(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0])), DVector::zeros(2)).unwrap();
        assert!((s.beta().unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            affine_expansion(DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 2.0])), DVector::zeros(2)),
            Err(ShadowError::Certificate(_))
        ));
        assert!(matches!(
            affine_expansion(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]), DVector::zeros(2)),
            Err(ShadowError::Inversion(_))
        ));
    }

    #[test]
    fn sampled_ratios_respect_certificates() {
        let sheared = affine_expansion(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]), DVector::from_vec(vec![0.1, -0.2])).unwrap();
        assert!(sampled_ratio_violation(&sheared, &MetricSpace::euclidean(2), 5.0, 2) <= 1e-9);
        let rot = affine_contraction(DMatrix::from_row_slice(2, 2, &[0.0, -0.7, 0.7, 0.1]), DVector::zeros(2)).unwrap();
        assert!(sampled_ratio_violation(&rot, &MetricSpace::euclidean(2), 5.0, 3) <= 1e-9);
        for s in [0, 1] {
            assert!(sampled_ratio_violation(&bernoulli_prepend(s).unwrap(), &MetricSpace::bernoulli(32), 1.0, 4) <= 1e-9);
        }
    }

    #[test]
    fn prepend_examples() {
        let f = bernoulli_prepend(0).unwrap();
        let ones = Point::Word(Word::constant(1, 6).unwrap());
        assert_eq!(f.apply(&ones), Point::Word(Word::from_symbols(&[0, 1, 1, 1, 1, 1]).unwrap()));
        let sp = MetricSpace::bernoulli(32);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let (x, y) = (sp.sample(1.0, &mut rng), sp.sample(1.0, &mut rng));
            let (d, fd) = (sp.dist(&x, &y), sp.dist(&f.apply(&x), &f.apply(&y)));
            // halving is exact unless the mismatch sits at the last symbol
            if d > 2f64.powi(-32) {
                assert_eq!(fd, d / 2.0);
            }
        }
        assert_eq!(sp.dist(&f.apply(&ones_at(32)), &f.apply(&ones_at(32))), 0.0);
        assert!(bernoulli_prepend(2).is_err());
    }

    fn ones_at(depth: u32) -> Point {
        Point::Word(Word::constant(1, depth).unwrap())
    }

    #[test]
    fn hyperbolic_blocks() {
        let h = hyperbolic_linear(DMatrix::from_element(1, 1, 0.5), DMatrix::from_element(1, 1, 2.0)).unwrap();
        assert_eq!(h.splitting.alpha_stable, 0.5);
        assert_eq!(h.splitting.beta_unstable, 2.0);
        let err = hyperbolic_linear(DMatrix::identity(1, 1), DMatrix::identity(1, 1)).unwrap_err();
        match err {
            ShadowError::Certificate(msg) => assert!(msg.contains("stable block") && msg.contains("unstable block")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hyperbolic_family_shares_splitting() {
        let a = hyperbolic_linear(DMatrix::from_element(1, 1, 0.5), DMatrix::from_element(1, 1, 2.0)).unwrap();
        let b = hyperbolic_linear(DMatrix::from_element(1, 1, 1.0 / 3.0), DMatrix::from_element(1, 1, 3.0)).unwrap();
        let fam = hyperbolic_family(vec![a.clone(), b], vec![0, 1, 1]).unwrap();
        assert_eq!(fam.splitting.alpha_stable, 0.5);
        assert_eq!(fam.splitting.beta_unstable, 2.0);
        assert_eq!(fam.stable.alpha(), Some(0.5));
        assert_eq!(fam.unstable.beta(), Some(2.0));
        let wide = hyperbolic_linear(DMatrix::from_element(1, 1, 0.5), DMatrix::identity(2, 2) * 2.0).unwrap();
        assert!(hyperbolic_family(vec![a, wide], vec![0, 1]).is_err());
    }

    #[test]
    fn hyperbolic_step_commutes_with_projection() {
        let s = DMatrix::from_row_slice(2, 2, &[0.2, 0.1, 0.0, 0.4]);
        let u = DMatrix::from_element(1, 1, 3.0);
        let h = hyperbolic_linear(s.clone(), u.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let full = DMatrix::from_row_slice(3, 3, &[0.2, 0.1, 0.0, 0.0, 0.4, 0.0, 0.0, 0.0, 3.0]);
        for _ in 0..100 {
            let v = MetricSpace::euclidean(3).sample(2.0, &mut rng);
            let v = v.as_vector().unwrap().to_vec();
            let projected = h.splitting.project(&v).unwrap();
            let stepped = h.step.apply(&projected);
            let block: Vec<f64> = (&full * DVector::from_vec(v.clone())).as_slice().to_vec();
            assert_eq!(h.splitting.project(&block).unwrap(), stepped);
            assert_eq!(h.splitting.embed(&projected).unwrap(), v);
        }
    }

    #[test]
    fn interval_family_examples() {
        let quad = IntervalMap::new("x/2+x^2/8", |x| x / 2.0 + x * x / 8.0, |x| 0.5 + x / 4.0);
        let steps = interval_attractor_family(&[quad], 0.0, (-0.5, 0.5), 0.1, DEFAULT_DERIVATIVE_GRID).unwrap();
        // oracle: brute-force grid supremum of |1/2 + x/4| on [-1/2, 1/2]
        let oracle = (0..DEFAULT_DERIVATIVE_GRID)
            .map(|i| -0.5 + i as f64 / (DEFAULT_DERIVATIVE_GRID - 1) as f64)
            .map(|x| (0.5 + x / 4.0f64).abs())
            .fold(0.0, f64::max);
        assert_eq!(steps[0].alpha(), Some(oracle));
        assert!((oracle - 0.625).abs() < 1e-12);

        let id = IntervalMap::new("x", |x| x, |_| 1.0);
        assert!(matches!(
            interval_attractor_family(&[id], 0.0, (-0.5, 0.5), 0.1, 100),
            Err(ShadowError::Certificate(_))
        ));

        let pair = [IntervalMap::new("x/2", |x| x / 2.0, |_| 0.5), IntervalMap::new("x/3", |x| x / 3.0, |_| 1.0 / 3.0)];
        let steps = interval_attractor_family(&pair, 0.0, (-1.0, 1.0), 0.1, 1000).unwrap();
        let sys = TimeVaryingSystem::new(MetricSpace::euclidean(1), crate::system::Schedule::Cyclic(steps)).unwrap();
        assert_eq!(sys.alpha(), Some(0.5));
    }

    #[test]
    fn power_families_match_closed_forms() {
        let f = power_family();
        let g = shifted_power_family();
        assert_eq!(f.apply(2, &Point::scalar(0.5)), Point::scalar(0.125));
        assert_eq!(g.apply(1, &Point::scalar(0.0)), Point::scalar(-0.5));
    }
}
