//! Catalog ids -> systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowkit::catalog::{
    affine_contraction, affine_expansion, bernoulli_prepend, hyperbolic_family, hyperbolic_linear, power_family,
    scalar_contraction, scalar_expansion, shifted_power_family, sierpinski_homotheties, HyperbolicFamily,
};
use shadowkit::nalgebra::{DMatrix, DVector};
use shadowkit::{MapStep, MetricSpace, Point, TimeVaryingSystem};

use crate::config::SystemConfig;
use crate::CliError;

/// A built system; hyperbolic families keep their block systems.
pub enum Built {
    Plain(TimeVaryingSystem),
    Hyperbolic(HyperbolicFamily),
}

impl Built {
    pub fn system(&self) -> &TimeVaryingSystem {
        match self {
            Built::Plain(s) => s,
            Built::Hyperbolic(f) => &f.system,
        }
    }
}

fn need(v: Option<f64>, name: &str, id: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Config(format!("system {id:?} needs {name}")))
}

fn rotation_scaled(dim: usize, s: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim) * s;
    if dim >= 2 {
        let (c, sn) = (0.7f64.cos(), 0.7f64.sin());
        m[(0, 0)] = s * c;
        m[(0, 1)] = -s * sn;
        m[(1, 0)] = s * sn;
        m[(1, 1)] = s * c;
    }
    m
}

/// `diag(s, s*r, s*r, ...)`.
fn graded(dim: usize, s: f64, r: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_fn(dim, |i, _| if i == 0 { s } else { s * r }))
}

fn offsets(dim: usize, which: usize) -> DVector<f64> {
    let base = [[0.3, -0.2, 0.1], [-0.1, 0.4, -0.3]][which];
    DVector::from_fn(dim, |i, _| base[i % 3])
}

/// Schedule indices: explicit, random (per trial), or cyclic over the catalog.
fn indices(cfg: &SystemConfig, catalog_len: usize, trial_seed: u64) -> Vec<usize> {
    if let Some(ix) = &cfg.schedule {
        return ix.clone();
    }
    if let Some(len) = cfg.random_schedule {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        rng.set_stream(2);
        return (0..len.max(1)).map(|_| rng.random_range(0..catalog_len)).collect();
    }
    (0..catalog_len).collect()
}

pub fn build(cfg: &SystemConfig, trial_seed: u64) -> Result<Built, CliError> {
    let id = cfg.catalog.as_str();
    let dim = cfg.dim.unwrap_or(2);
    let seq = |space: MetricSpace, steps: Vec<MapStep>| -> Result<Built, CliError> {
        let ix = indices(cfg, steps.len(), trial_seed);
        Ok(Built::Plain(TimeVaryingSystem::sequence(space, steps, ix)?))
    };
    match id {
        "affine_contraction" => {
            let a = need(cfg.alpha, "alpha", id)?;
            let steps = vec![
                affine_contraction(rotation_scaled(dim, a), offsets(dim, 0))?,
                affine_contraction(graded(dim, a, 0.5), offsets(dim, 1))?,
            ];
            seq(MetricSpace::euclidean(dim), steps)
        }
        "linear_contraction" => {
            let a = need(cfg.alpha, "alpha", id)?;
            seq(MetricSpace::euclidean(dim), vec![affine_contraction(rotation_scaled(dim, a), DVector::zeros(dim))?])
        }
        "scalar_contraction" => seq(MetricSpace::euclidean(1), vec![scalar_contraction(need(cfg.alpha, "alpha", id)?)?]),
        "scalar_expansion" => seq(MetricSpace::euclidean(1), vec![scalar_expansion(need(cfg.beta, "beta", id)?)?]),
        "affine_expansion" => {
            let b = need(cfg.beta, "beta", id)?;
            let steps = vec![
                affine_expansion(rotation_scaled(dim, b), offsets(dim, 0))?,
                affine_expansion(graded(dim, b, 1.5), offsets(dim, 1))?,
            ];
            seq(MetricSpace::euclidean(dim), steps)
        }
        "sierpinski" => seq(MetricSpace::euclidean(2), sierpinski_homotheties()),
        "bernoulli_prepend" => {
            let depth = cfg.depth.unwrap_or(12);
            let symbols = cfg.symbols.clone().unwrap_or_else(|| vec![0, 1]);
            let steps = symbols.iter().map(|&s| bernoulli_prepend(s)).collect::<Result<Vec<_>, _>>()?;
            seq(MetricSpace::bernoulli(depth), steps)
        }
        "hyperbolic" => {
            let blocks = cfg.blocks.clone().unwrap_or_else(|| vec![[0.5, 2.0], [1.0 / 3.0, 3.0]]);
            let steps = blocks
                .iter()
                .map(|&[s, u]| hyperbolic_linear(DMatrix::from_element(1, 1, s), DMatrix::from_element(1, 1, u)))
                .collect::<Result<Vec<_>, _>>()?;
            let ix = indices(cfg, steps.len(), trial_seed);
            Ok(Built::Hyperbolic(hyperbolic_family(steps, ix)?))
        }
        "power" => Ok(Built::Plain(power_family())),
        "shifted_power" => Ok(Built::Plain(shifted_power_family())),
        other => Err(CliError::Config(format!("unknown catalog id {other:?}"))),
    }
}

/// Anchor point: the configured start, else a seeded sample.
pub fn anchor(cfg: &SystemConfig, space: &MetricSpace, rng: &mut ChaCha8Rng) -> Result<Point, CliError> {
    let p = match (&cfg.start, space) {
        (Some(v), MetricSpace::MaxProduct(a, b)) => {
            let (MetricSpace::Euclidean { dim: da }, MetricSpace::Euclidean { .. }) = (&**a, &**b) else {
                return Err(CliError::Config("start coordinates need a Euclidean space".into()));
            };
            if v.len() < *da {
                return Err(CliError::Config("start has too few coordinates".into()));
            }
            Point::pair(Point::Vector(v[..*da].to_vec()), Point::Vector(v[*da..].to_vec()))
        }
        (Some(v), MetricSpace::Euclidean { .. }) => Point::Vector(v.clone()),
        (Some(_), _) => return Err(CliError::Config("start coordinates need a Euclidean space".into())),
        (None, _) => space.sample(cfg.start_scale, rng),
    };
    space.contains(&p)?;
    Ok(p)
}
