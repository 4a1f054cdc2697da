//! Shared fixtures for the benchmark targets.

use lslab_core::geometry::{
    chain, make_core_surrogate, make_line, make_round_neck, BoundaryCondition, DomainChain,
    JunctionPolicy,
};

/// Flat Dirichlet line `[-half, half]`.
pub fn flat_line(half: f64) -> DomainChain {
    chain(
        vec![make_line(-half, half).expect("segment")],
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )
    .expect("chain")
}

/// Core + neck + core host used by the neck diagnostics.
pub fn neck_chain(h: f64, l: f64) -> DomainChain {
    chain(
        vec![
            make_core_surrogate(h).expect("core"),
            make_round_neck(h, -l, l).expect("neck"),
            make_core_surrogate(h).expect("core"),
        ],
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )
    .expect("chain")
}
