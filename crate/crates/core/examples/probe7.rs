use lslab_core::construction::*;
use lslab_core::functional::*;
use lslab_core::solver::*;

fn main() {
    let opts = SolverOptions { dx: 0.005, restarts: 1, max_iterations: 20_000, ..Default::default() };
    let fam = handbag_family(0.02, 4.6).unwrap();
    let c = fam.apply(0.0).unwrap();
    let res = minimize_log_sobolev(&c, &opts).unwrap();
    let v = &res.extremal;
    let g = functional_gradient(v, &c).unwrap();
    // project
    let gv = g.weighted_dot(v);
    let grid = &v.grid;
    let mut contrib: Vec<(f64, usize)> = (0..grid.len())
        .map(|k| {
            let pg = g.values()[k] - gv * v.values()[k];
            (pg * pg * grid.node_weight()[k] * grid.node_measure()[k], k)
        })
        .collect();
    contrib.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let total: f64 = contrib.iter().map(|c| c.0).sum();
    println!("pg_norm = {:.3e}, lambda = {:+.9}", total.sqrt(), res.lambda);
    for (c2, k) in contrib.iter().take(12) {
        let x = grid.nodes()[*k];
        println!(
            "node {k:5} x={x:8.4} v={:+.3e} w={:.3e} R={:8.1} pg²wq={:.3e} ({:.1}%)",
            v.values()[*k], grid.node_weight()[*k], grid.node_curvature()[*k], c2, 100.0 * c2 / total
        );
    }
}
