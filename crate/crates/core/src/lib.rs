//! Rate functions `I_X = K_X*` of random vectors from a finitely described
//! class: log-Laplace transforms, exact convex-support geometry, numerical
//! conjugation, and decision procedures for strict convexity of `I_X`.

pub mod conjugate;
pub mod convgeo;
pub mod criteria;
pub mod distmodel;
pub mod error;
pub mod exact;
pub mod extended;
pub mod fixtures;
pub mod interval;
pub mod logmgf;
pub mod quadrature;
pub mod verify;

pub use conjugate::{rate_eval, rate_eval_f64, RateOptions, RateResult, RateStatus};
pub use convgeo::{Face, Facet, Hyperplane, Polyhedron};
pub use distmodel::{Component, DistributionSpec, Law1D, Orientation};
pub use error::{Error, Result};
pub use extended::{Extended, ExtendedRational, ExtendedReal};
pub use logmgf::{k_domain, k_eval, k_grad, BoxRegion};
