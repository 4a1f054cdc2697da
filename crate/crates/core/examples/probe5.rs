use lslab_core::construction::*;
use lslab_core::geometry::*;
use lslab_core::solver::*;
use std::time::Instant;

fn main() {
    let opts = SolverOptions { dx: 0.005, restarts: 4, ..Default::default() };
    let fam = handbag_family(0.02, 4.6).unwrap();
    let mut warm: Option<Vec<f64>> = None;
    for p in [0.0f64, 1.0, 2.0, 4.0, 8.0, 12.0, 14.0] {
        let c = fam.apply(p).unwrap();
        let t = Instant::now();
        let res = match &warm {
            None => minimize_log_sobolev(&c, &opts).unwrap(),
            Some(w) => minimize_log_sobolev_from(&c, &opts, w).unwrap(),
        };
        println!("p={p:5.1} lambda={:+.8} iters={:6} conv={} [{:.2?}]",
            res.lambda, res.iterations, res.converged, t.elapsed());
        warm = Some(res.extremal.values().to_vec());
    }
}
