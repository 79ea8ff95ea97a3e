//! Shadowing for time-varying maps.
//!
//! A [`TimeVaryingSystem`] is a sequence of self-maps `f_1, f_2, ...` of a
//! [`MetricSpace`]. Given a pseudo-orbit (a sequence that follows the maps
//! only approximately), the solvers construct a true orbit that stays close
//! to it and return a [`ShadowCertificate`] with the error trace and the
//! bound the relevant theorem promises. [`verify`] re-checks certificates
//! without trusting the solvers.
//!
//! ```
//! use shadowkit::{catalog, perturb_orbit, shadow_contracting, DefectSchedule, MetricSpace, Point, TimeVaryingSystem};
//!
//! let sys = TimeVaryingSystem::autonomous(MetricSpace::euclidean(1), catalog::scalar_contraction(0.5)?);
//! let p = perturb_orbit(&sys, &Point::scalar(1.0), 200, &DefectSchedule::constant(0.1, 7))?;
//! let cert = shadow_contracting(&sys, &p, None)?;
//! assert!(cert.max_error() <= 0.2);
//! # Ok::<(), shadowkit::ShadowError>(())
//! ```

pub mod catalog;
pub mod combinators;
pub mod error;
pub mod pseudo_orbit;
pub mod solvers;
pub mod space;
pub mod system;
pub mod tolerance;
pub mod verify;

pub use error::{Result, ShadowError};
pub use pseudo_orbit::{
    classify, defects, generate, interpolate_iterate, extend_finite, perturb_orbit, perturb_orbit_backward,
    perturb_pair, Anchor, Classification, Criteria, DefectProfile, DefectSchedule, PseudoOrbit, Sampling, TailTest,
};
pub use solvers::{
    shadow_contracting, shadow_expanding, shadow_h, shadow_h_expanding, shadow_hyperbolic, shadow_slimit_gluing,
    BackwardTrace, Flags, ShadowCertificate, Thresholds,
};
pub use space::{MetricSpace, Point, Word};
pub use system::{Certificate, MapStep, Schedule, TimeVaryingSystem};
pub use nalgebra;
