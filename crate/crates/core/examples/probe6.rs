use lslab_core::construction::*;
use lslab_core::solver::*;

fn main() {
    let opts = SolverOptions { dx: 0.005, restarts: 1, max_iterations: 40_000, ..Default::default() };
    let fam = handbag_family(0.02, 4.6).unwrap();
    let c0 = fam.apply(0.0).unwrap();
    let r0 = minimize_log_sobolev(&c0, &opts).unwrap();
    eprintln!("p=0: lambda={:+.8} conv={}", r0.lambda, r0.converged);
    let c4 = fam.apply(4.0).unwrap();
    let r4 = minimize_log_sobolev_from(&c4, &opts, r0.extremal.values()).unwrap();
    eprintln!("p=4 warm: lambda={:+.8} conv={} iters={}", r4.lambda, r4.converged, r4.iterations);
    let r4c = minimize_log_sobolev(&c4, &SolverOptions { restarts: 4, ..opts.clone() }).unwrap();
    eprintln!("p=4 cold: lambda={:+.8} conv={} iters={}", r4c.lambda, r4c.converged, r4c.iterations);
}
