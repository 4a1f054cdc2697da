use lslab_core::geometry::*;
use lslab_core::solver::*;
use std::time::Instant;

fn main() {
    let d = chain(
        vec![make_line(-10.0, 10.0).unwrap()],
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )
    .unwrap();
    let opts = SolverOptions { dx: 1e-3, ..Default::default() };
    let t = Instant::now();
    let res = minimize_log_sobolev(&d, &opts).unwrap();
    let expected = 1.0 + 0.5 * (4.0 * std::f64::consts::PI).ln();
    println!(
        "lambda={:.6} expected={:.6} err={:.2e} conv={} iters={} resid={:.2e} spread={:.2e} [{:.2?}]",
        res.lambda, expected, (res.lambda - expected).abs(), res.converged,
        res.iterations, res.residual, res.multi_start_spread, t.elapsed()
    );
}
