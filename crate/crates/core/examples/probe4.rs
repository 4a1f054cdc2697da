use lslab_core::construction::*;
use lslab_core::solver::*;
use std::time::Instant;

fn main() {
    let opts = SolverOptions { dx: 0.005, restarts: 4, ..Default::default() };
    let t0 = Instant::now();
    match build_component_sequence(3, 0.02, 4.6, &opts) {
        Ok(comps) => {
            for c in &comps {
                println!(
                    "k={} neck={} p={:.6} lambda={:+.8} resid={:.2e}",
                    c.index, c.neck_length, c.pinch_exponent, c.lambda, c.residual
                );
            }
            // ladder check
            for k in 1..comps.len() {
                let dec = if k == 1 { 1.0 } else { 1.0 / (((k - 1) * (k - 1)) as f64 + 1.0) };
                let diff = comps[k - 1].lambda - comps[k].lambda;
                println!("  step {}->{}: diff={:+.8} target={:+.8} err={:.2e}",
                    k - 1, k, diff, dec, (diff - dec).abs());
            }
            let t1 = Instant::now();
            let m = assemble_counterexample(&comps, 3).unwrap();
            println!("assembled length={:.2} segs={}", m.total_length(), m.segments().len());
            let res = minimize_log_sobolev(&m, &opts).unwrap();
            println!("lambda(assembled K=3) = {:+.6} conv={} [{:.1?}]", res.lambda, res.converged, t1.elapsed());
        }
        Err(e) => println!("FAILED: {e}"),
    }
    println!("total {:.1?}", t0.elapsed());
}
