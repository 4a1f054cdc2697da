use lslab_core::geometry::*;
use lslab_core::solver::*;
use lslab_core::verification::*;
use lslab_core::construction::*;
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    match which.as_str() {
        "neckdecay" => neckdecay(),
        "handbag" => handbag(),
        "extension" => extension(),
        "tube36" => tube36(),
        _ => println!("unknown probe"),
    }
}

fn neckdecay() {
    let h = 0.2;
    let opts = SolverOptions {
        dx: 0.01,
        restarts: 4,
        tail_polish_iterations: 60_000,
        max_iterations: 300_000,
        ..Default::default()
    };
    let t0 = Instant::now();
    for l in [4.0f64, 6.0, 8.0, 10.0, 12.0] {
        let host = neck_host(h, l).unwrap();
        let t = Instant::now();
        let res = minimize_log_sobolev(&host, &opts).unwrap();
        let center = 2.0 + l;
        let v_mid = res.extremal.value_at(center);
        let mid_mass = res.extremal.mass_on(center - l / 2.0, center + l / 2.0);
        let end_mass = res.extremal.mass_on(2.0, 4.0)
            + res.extremal.mass_on(2.0 + 2.0 * l - 2.0, 2.0 + 2.0 * l);
        println!(
            "l={l:5.1} lambda={:+.6} v_mid={:.3e} ln={:+.2} ratio={:.3e} conv={} iters={} spread={:.1e} [{:.1?}]",
            res.lambda, v_mid, v_mid.max(1e-300).ln(), mid_mass / end_mass, res.converged,
            res.iterations, res.multi_start_spread, t.elapsed()
        );
    }
    println!("total {:.1?}", t0.elapsed());
}

fn handbag() {
    for h in [0.05f64, 0.02, 0.01] {
        let opts = SolverOptions { dx: 0.005, restarts: 6, ..Default::default() };
        let (c, region) = handbag_chain(h, 3.0).unwrap();
        let t = Instant::now();
        let res = minimize_log_sobolev(&c, &opts).unwrap();
        println!(
            "h={h}: lambda0={:+.6} conv={} iters={} spread={:.2e} region={:?} [{:.1?}]",
            res.lambda, res.converged, res.iterations, res.multi_start_spread, region, t.elapsed()
        );
        // try one pinch bisection: target λ0 − 1
        let mut fam = handbag_family(h, 4.0).unwrap();
        fam.p = 0.0;
        let t = Instant::now();
        match find_pinch_exponent(&fam, res.lambda - 1.0, &opts) {
            Ok(p) => {
                let lam = minimize_log_sobolev(&fam.apply(p).unwrap(), &opts).unwrap().lambda;
                println!("  p1={p:.4} lambda(p1)={lam:+.6} target={:+.6} [{:.1?}]", res.lambda - 1.0, t.elapsed());
            }
            Err(e) => println!("  bisect failed: {e}"),
        }
    }
}

fn extension() {
    // host with a pinched tube driving lambda <= 0 and a moderate neck
    let h_neck = 0.8f64;
    let h_tube = 0.08f64;
    let mut neck = make_round_neck(h_neck, 0.0, 6.0).unwrap();
    neck.label = "N".into();
    let tube = make_flat_tube(h_tube, -2.0, 2.0).unwrap();
    let collar = make_collar(&neck, &tube);
    let collar2 = make_collar(&tube, &neck);
    let mut neck2 = make_round_neck(h_neck, 0.0, 2.0).unwrap();
    neck2.label = "N2".into();
    let base = chain(
        vec![tube.clone(), collar2.clone(), neck.clone()],
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )
    .unwrap();
    let _ = (collar, neck2);
    let opts = SolverOptions { dx: 0.005, restarts: 4, tail_polish_iterations: 40_000, ..Default::default() };
    let mut prev: Option<f64> = None;
    for l in [1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0] {
        let c = base.with_segment_length("N", l).unwrap();
        let t = Instant::now();
        let res = minimize_log_sobolev(&c, &opts).unwrap();
        let diff = prev.map(|p| p - res.lambda);
        println!(
            "l={l:4.1} lambda={:+.10} diff={:?} conv={} [{:.1?}]",
            res.lambda, diff.map(|d| format!("{d:.3e}")), res.converged, t.elapsed()
        );
        prev = Some(res.lambda);
    }
}

fn tube36() {
    let opts = SolverOptions { dx: 1e-3, restarts: 4, ..Default::default() };
    let mut prev: Option<f64> = None;
    for h in [0.1f64, 0.01, 0.001] {
        let d = chain(
            vec![make_flat_tube(h, 0.0, 1.0).unwrap()],
            BoundaryCondition::Dirichlet,
            BoundaryCondition::Dirichlet,
            JunctionPolicy::Continuous,
        )
        .unwrap();
        let t = Instant::now();
        let res = minimize_log_sobolev(&d, &opts).unwrap();
        println!(
            "h={h}: lambda={:+.6} conv={} drop={:?} [{:.1?}]",
            res.lambda,
            res.converged,
            prev.map(|p| p - res.lambda),
            t.elapsed()
        );
        prev = Some(res.lambda);
    }
}
