//! Numerical toolkit for best log-Sobolev constants on weighted 1D model
//! geometries.
//!
//! The crate computes the best constant
//!
//! ```text
//! λ(D) = inf { ∫(4|v'|² + R v² − v² ln v²) w dx : ∫ v² w dx = 1 }
//! ```
//!
//! and its extremal on chains of product segments (round necks, flat tubes,
//! core surrogates), checks a family of quantitative decay and stability
//! estimates on the computed extremals, and runs the counterexample
//! construction pipeline: pinch-exponent root finding, the component ladder
//! with its prescribed λ decrements, mirror assembly, and the no-extremal
//! certificate algebra.
//!
//! Modules:
//! * [`geometry`] — segments, chains, pinch families, JSON domain specs.
//! * [`grid`] — discretization, fields, quadrature, CSV field exchange.
//! * [`functional`] — the log-Sobolev functional, its gradient, the
//!   Euler-Lagrange residual, and the scaled entropy `W`.
//! * [`solver`] — projected-gradient minimization on the unit sphere of the
//!   weighted L² norm, multi-start, truncation ladders.
//! * [`verification`] — numerical checks of the decay/stability estimates.
//! * [`construction`] — the counterexample pipeline and certificates.

pub mod construction;
pub mod error;
pub mod functional;
pub mod geometry;
pub mod grid;
pub mod solver;
pub mod verification;

pub use error::{Error, Result};
pub use functional::FunctionalValue;
pub use geometry::{
    apply_pinch, chain, chain_with_collars, disjoint_union, make_core_surrogate, make_flat_tube,
    make_line, make_round_neck, BoundaryCondition, DisconnectedDomain, DomainChain, DomainSpec,
    FiberKind, FiberProfile, JunctionPolicy, PinchFamily, Segment, SegmentProfile,
};
pub use grid::{DiscreteField, Grid};
pub use solver::{SolverOptions, SpectralResult};
pub use verification::{DecayFit, LemmaReport};
