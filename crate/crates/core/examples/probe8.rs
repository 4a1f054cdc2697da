use lslab_core::construction::*;
use lslab_core::grid::*;
use lslab_core::solver::*;

fn main() {
    let opts = SolverOptions { dx: 0.005, restarts: 4, ..Default::default() };
    let comps = build_component_sequence(3, 0.02, 4.6, &opts).unwrap();
    let m = assemble_counterexample(&comps, 3).unwrap();
    // H[3] center
    let (_, a, b) = m.find_segment("H[3]").unwrap();
    let center = 0.5 * (a + b);
    println!("H[3] span {a:.1}..{b:.1}");
    let g = Grid::new(&m, opts.dx).unwrap();
    for width in [0.3f64, 0.6, 1.0] {
        let init = DiscreteField::from_fn(std::sync::Arc::clone(&g), |x| {
            0.01 + 4000.0 * (-(x - center) * (x - center) / (2.0 * width * width)).exp()
        });
        let res = minimize_log_sobolev_from(&m, &opts, init.values()).unwrap();
        println!("bump width {width}: lambda={:+.6} conv={} iters={}", res.lambda, res.converged, res.iterations);
    }
    let res = minimize_log_sobolev(&m, &SolverOptions { restarts: 16, ..opts.clone() }).unwrap();
    println!("restarts=16: lambda={:+.6} spread={:.3}", res.lambda, res.multi_start_spread);
}
