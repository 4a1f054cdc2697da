use lslab_core::construction::*;
use lslab_core::grid::*;
use lslab_core::solver::*;

fn main() {
    let opts = SolverOptions { dx: 0.005, restarts: 4, ..Default::default() };
    let comps = build_component_sequence(3, 0.02, 4.6, &opts).unwrap();
    let m = assemble_counterexample(&comps, 3).unwrap();
    let g = Grid::new(&m, opts.dx).unwrap();
    // compare weight profiles of H[-3] (reflected) and H[3]
    let (_, a3, b3) = m.find_segment("H[3]").unwrap();
    let (_, am, bm) = m.find_segment("H[-3]").unwrap();
    println!("H[3]=[{a3:.2},{b3:.2}] H[-3]=[{am:.2},{bm:.2}]");
    let mut worst = (0.0f64, 0.0f64);
    for k in 0..=400 {
        let t = k as f64 / 400.0 * (b3 - a3);
        let w1 = m.weight_at(a3 + t);
        let w2 = m.weight_at(bm - t);
        let rel = ((w1 - w2) / w1).abs();
        if rel > worst.0 { worst = (rel, t); }
    }
    println!("max mirror weight mismatch: {:.3e} at offset {:.3}", worst.0, worst.1);
    for (label, center) in [("H[-3]", 0.5 * (am + bm)), ("H[3]", 0.5 * (a3 + b3))] {
        let init = DiscreteField::from_fn(std::sync::Arc::clone(&g), |x| {
            0.01 + 1285.0 * (-(x - center) * (x - center) / 2.0).exp()
        });
        let res = minimize_log_sobolev_from(&m, &opts, init.values()).unwrap();
        println!("{label} bump: lambda={:+.6} conv={} iters={}", res.lambda, res.converged, res.iterations);
    }
}
