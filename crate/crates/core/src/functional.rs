//! The log-Sobolev functional on discrete fields, its weighted-L² gradient,
//! the Euler-Lagrange residual, and the τ-scaled entropy `W`.
//!
//! For a chain with weight `w` and curvature `R`, the functional of a
//! unit-norm field is
//!
//! ```text
//! L(v) = ∫ (4|v'|² + R v² − v² ln v²) w dx.
//! ```
//!
//! The Dirichlet energy is assembled cellwise from midpoint weights, and the
//! zero-order terms use nodal trapezoid quadrature, so the discrete
//! functional is a smooth function of the node values whose exact derivative
//! [`functional_gradient`] returns. The map `t ↦ t ln t` is extended by `0`
//! at `t = 0`, making the entropy integrand continuous for nonnegative
//! fields and keeping Dirichlet boundaries NaN-free.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, DomainChain};
use crate::grid::DiscreteField;

/// Tolerance on `|∫v²w − 1|` below which a field counts as normalized.
pub const NORM_TOL: f64 = 1e-8;

/// `t ln t` extended continuously by 0 at `t = 0`.
#[inline]
pub fn xlnx(t: f64) -> f64 {
    if t > 0.0 {
        t * t.ln()
    } else {
        0.0
    }
}

/// Value of the functional split into its three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    pub total: f64,
    /// `4 ∫ |v'|² w dx`
    pub dirichlet_part: f64,
    /// `∫ R v² w dx`
    pub curvature_part: f64,
    /// `−∫ v² ln v² w dx`
    pub entropy_part: f64,
}

fn check_domain(v: &DiscreteField, domain: &DomainChain) -> Result<()> {
    if !v.grid.matches(domain) {
        return Err(Error::ShapeError(format!(
            "field discretizes domain {:016x}, got domain {:016x}",
            v.grid.chain_hash(),
            domain.domain_hash()
        )));
    }
    Ok(())
}

fn check_finite(v: &DiscreteField) -> Result<()> {
    if v.values().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidField("field contains NaN or infinity".into()));
    }
    Ok(())
}

/// `∫ v² w dx` over the chain.
pub fn l2_norm_sq(v: &DiscreteField, domain: &DomainChain) -> Result<f64> {
    check_domain(v, domain)?;
    Ok(v.weighted_norm_sq())
}

/// Functional parts of an arbitrary (not necessarily normalized) field.
/// Callers that need the λ semantics should use [`evaluate_log_sobolev`].
pub fn log_sobolev_parts(v: &DiscreteField) -> FunctionalValue {
    let grid = &v.grid;
    let vals = v.values();
    let mut dirichlet = 0.0;
    for (c, cell) in grid.cells().iter().enumerate() {
        let (i, j) = grid.cell_nodes(c);
        let dv = vals[j] - vals[i];
        dirichlet += 4.0 * cell.w_mid * dv * dv / cell.len;
    }
    let mut curvature = 0.0;
    let mut entropy = 0.0;
    let w = grid.node_weight();
    let r = grid.node_curvature();
    let q = grid.node_measure();
    for k in 0..vals.len() {
        let v2 = vals[k] * vals[k];
        let m = w[k] * q[k];
        curvature += r[k] * v2 * m;
        entropy -= xlnx(v2) * m;
    }
    FunctionalValue {
        total: dirichlet + curvature + entropy,
        dirichlet_part: dirichlet,
        curvature_part: curvature,
        entropy_part: entropy,
    }
}

/// Evaluate the functional of a normalized field.
pub fn evaluate_log_sobolev(v: &DiscreteField, domain: &DomainChain) -> Result<FunctionalValue> {
    check_domain(v, domain)?;
    check_finite(v)?;
    let n2 = v.weighted_norm_sq();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NormalizationError(format!("∫v²w dx = {n2}, expected 1")));
    }
    Ok(log_sobolev_parts(v))
}

/// Exact weighted-L² gradient of the discrete functional: the field `g` with
/// `⟨g, δv⟩_w = d/dε L(v + ε δv)|₀` for perturbations `δv` vanishing at
/// Dirichlet ends. Per node,
///
/// ```text
/// g = −8 (w v')' / w + 2 R v − 2 v ln v² − 2 v.
/// ```
pub fn functional_gradient(v: &DiscreteField, domain: &DomainChain) -> Result<DiscreteField> {
    check_domain(v, domain)?;
    check_finite(v)?;
    Ok(gradient_unchecked(v))
}

pub(crate) fn gradient_unchecked(v: &DiscreteField) -> DiscreteField {
    let grid = &v.grid;
    let vals = v.values();
    let n = vals.len();
    let mut acc = vec![0.0; n];
    for (c, cell) in grid.cells().iter().enumerate() {
        let (i, j) = grid.cell_nodes(c);
        let flux = 8.0 * cell.w_mid * (vals[j] - vals[i]) / cell.len;
        acc[i] -= flux;
        acc[j] += flux;
    }
    let w = grid.node_weight();
    let r = grid.node_curvature();
    let q = grid.node_measure();
    let mut g = vec![0.0; n];
    for k in 0..n {
        let vk = vals[k];
        // 2v ln v² = 4v ln|v|, safe against v² underflowing to 0
        let log_term = if vk != 0.0 { 4.0 * vk * vk.abs().ln() } else { 0.0 };
        g[k] = acc[k] / (w[k] * q[k]) + 2.0 * r[k] * vk - log_term - 2.0 * vk;
    }
    if !grid.is_periodic() {
        if grid.left_bc == BoundaryCondition::Dirichlet {
            g[0] = 0.0;
        }
        if grid.right_bc == BoundaryCondition::Dirichlet {
            g[n - 1] = 0.0;
        }
    }
    DiscreteField::from_values(Arc::clone(grid), g).expect("same grid")
}

/// Weighted-L² norm of the Euler-Lagrange residual
/// `4Δv − Rv + 2v ln v + λv` over interior nodes, with `v ln v = 0` at
/// `v = 0`. The Laplacian is the conservative weighted stencil
/// `(w v')'/w` built from the same cell data as the functional.
pub fn el_residual(v: &DiscreteField, lambda: f64, domain: &DomainChain) -> Result<f64> {
    check_domain(v, domain)?;
    check_finite(v)?;
    if v.values().iter().any(|&x| x < 0.0) {
        return Err(Error::SignError("residual is defined for nonnegative fields".into()));
    }
    let grid = &v.grid;
    let vals = v.values();
    let n = vals.len();
    let mut flux_sum = vec![0.0; n];
    for (c, cell) in grid.cells().iter().enumerate() {
        let (i, j) = grid.cell_nodes(c);
        let flux = cell.w_mid * (vals[j] - vals[i]) / cell.len;
        flux_sum[i] += flux;
        flux_sum[j] -= flux;
    }
    let w = grid.node_weight();
    let r = grid.node_curvature();
    let q = grid.node_measure();
    let interior = |k: usize| grid.is_periodic() || (k > 0 && k + 1 < n);
    let mut norm2 = 0.0;
    for k in 0..n {
        if !interior(k) {
            continue;
        }
        let vk = vals[k];
        let lap = flux_sum[k] / (w[k] * q[k]);
        let log_term = if vk > 0.0 { 2.0 * vk * vk.ln() } else { 0.0 };
        let res = 4.0 * lap - r[k] * vk + log_term + lambda * vk;
        norm2 += res * res * w[k] * q[k];
    }
    Ok(norm2.sqrt())
}

/// The τ-scaled entropy of a normalized field:
///
/// ```text
/// W(v, τ) = ∫ [τ(4|v'|² + Rv²) − v² ln v² − (n/2)(ln 4πτ) v² − n v²] w dx.
/// ```
///
/// At `τ = 1` this equals `L(v) − (n/2) ln(4π) − n`.
pub fn evaluate_w_entropy(
    v: &DiscreteField,
    domain: &DomainChain,
    tau: f64,
    n: u32,
) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("τ = {tau} must be positive")));
    }
    check_domain(v, domain)?;
    check_finite(v)?;
    let n2 = v.weighted_norm_sq();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NormalizationError(format!("∫v²w dx = {n2}, expected 1")));
    }
    let parts = log_sobolev_parts(v);
    let nd = n as f64;
    Ok(tau * (parts.dirichlet_part + parts.curvature_part) + parts.entropy_part
        - (0.5 * nd * (4.0 * std::f64::consts::PI * tau).ln() + nd) * n2)
}
