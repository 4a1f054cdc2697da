//! Acceptance suite: one pass/fail line per criterion, each at its stated
//! tolerance. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines as they complete.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lslab_core::construction::{
    assemble_counterexample, build_component_sequence, choose_neck_length, disconnected_infimum,
    handbag_chain, no_extremal_certificate,
};
use lslab_core::functional::{
    el_residual, evaluate_log_sobolev, evaluate_w_entropy, functional_gradient, l2_norm_sq,
    log_sobolev_parts,
};
use lslab_core::geometry::{
    chain, disjoint_union, make_collar, make_flat_tube, make_line, make_round_neck,
    BoundaryCondition, DomainChain, JunctionPolicy,
};
use lslab_core::grid::{DiscreteField, Grid};
use lslab_core::solver::{minimize_log_sobolev, minimize_union, SolverOptions};
use lslab_core::verification::{
    check_max_lower_bound, check_neck_extension, check_neck_middle_decay,
};

const GAUSSIAN_LAMBDA: f64 = 2.265512123484645; // 1 + ln(4π)/2

fn dirichlet(segs: Vec<lslab_core::geometry::Segment>) -> DomainChain {
    chain(
        segs,
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )
    .unwrap()
}

fn flat_line(half: f64) -> DomainChain {
    dirichlet(vec![make_line(-half, half).unwrap()])
}

fn neck_host(h: f64, l: f64) -> DomainChain {
    lslab_core::verification::neck_host(h, l).unwrap()
}

fn check(cond: bool, detail: String) -> Result<String, String> {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_budget(start: Instant, budget: Duration, detail: &mut String) -> bool {
    let elapsed = start.elapsed();
    detail.push_str(&format!(", runtime {:.1?} (budget {:.0?})", elapsed, budget));
    elapsed <= budget
}

/// 1. Euclidean extremal on the point-fiber line at Δx = 1e-3.
fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    let domain = flat_line(10.0);
    let opts = SolverOptions { dx: 1e-3, ..Default::default() };
    let res = minimize_log_sobolev(&domain, &opts).unwrap();
    let lambda_err = (res.lambda - GAUSSIAN_LAMBDA).abs();

    // closed-form Gaussian centered at the chain midpoint
    let grid = Grid::new(&domain, 1e-3).unwrap();
    let c = (4.0 * PI).powf(-0.25);
    let gauss = DiscreteField::from_fn(Arc::clone(&grid), |x| {
        c * (-(x - 10.0) * (x - 10.0) / 8.0).exp()
    });
    let residual = el_residual(&gauss, GAUSSIAN_LAMBDA, &domain).unwrap();
    let l2_dist = {
        let d: f64 = res
            .extremal
            .values()
            .iter()
            .zip(gauss.values())
            .zip(grid.node_weight().iter().zip(grid.node_measure()))
            .map(|((&a, &b), (&w, &q))| (a - b) * (a - b) * w * q)
            .sum();
        d.sqrt()
    };
    let mut detail = format!(
        "lambda = {:.6} (err {:.1e} <= 1e-2), Gaussian EL residual {:.2e} <= 1e-4, extremal L2 distance {:.2e}",
        res.lambda, lambda_err, residual, l2_dist
    );
    let in_time = within_budget(start, Duration::from_secs(60), &mut detail);
    check(
        res.converged && lambda_err <= 1e-2 && residual <= 1e-4 && l2_dist <= 1e-2 && in_time,
        detail,
    )
}

/// 2. Tube test-function integrals and the unbounded λ descent in h.
fn criterion_2() -> Result<String, String> {
    let start = Instant::now();
    let h = 0.01;
    let tube = dirichlet(vec![make_flat_tube(h, 0.0, 1.0).unwrap()]);
    let grid = Grid::new(&tube, 1e-4).unwrap();
    let c0 = 3.0f64.sqrt() / (8.0f64.sqrt() * PI * h);
    let v = DiscreteField::from_fn(grid, move |x| {
        if x <= 0.25 {
            4.0 * c0 * x
        } else if x <= 0.75 {
            c0
        } else {
            c0 * (1.0 - 4.0 * (x - 0.75))
        }
    });
    let norm = l2_norm_sq(&v, &tube).unwrap();
    let dirichlet_part = evaluate_log_sobolev(&v.normalized().unwrap(), &tube)
        .unwrap()
        .dirichlet_part;

    let opts = SolverOptions { dx: 2e-3, restarts: 4, ..Default::default() };
    let mut lambdas = Vec::new();
    for hv in [0.1, 0.01, 0.001] {
        let d = dirichlet(vec![make_flat_tube(hv, 0.0, 1.0).unwrap()]);
        lambdas.push(minimize_log_sobolev(&d, &opts).unwrap().lambda);
    }
    let drop1 = lambdas[0] - lambdas[1];
    let drop2 = lambdas[1] - lambdas[2];
    let mut detail = format!(
        "norm = {norm:.9} (|err| {:.1e} <= 1e-6), 4*dirichlet = {dirichlet_part:.6} (err {:.1e} <= 1e-3), drops {drop1:.3}, {drop2:.3} >= 1",
        (norm - 1.0).abs(),
        (dirichlet_part - 48.0).abs()
    );
    let in_time = within_budget(start, Duration::from_secs(120), &mut detail);
    check(
        (norm - 1.0).abs() <= 1e-6
            && (dirichlet_part - 48.0).abs() <= 1e-3
            && drop1 >= 1.0
            && drop2 >= 1.0
            && in_time,
        detail,
    )
}

/// 3. Interior maximum lower bound on every converged Dirichlet extremal.
fn criterion_3() -> Result<String, String> {
    let opts = SolverOptions { dx: 0.01, restarts: 4, ..Default::default() };
    let handbag = handbag_chain(0.02, 3.0).unwrap().0;
    let domains: Vec<(&str, DomainChain)> = vec![
        ("flat line", flat_line(10.0)),
        ("neck h=0.1", neck_host(0.1, 5.0)),
        ("neck h=0.2", neck_host(0.2, 5.0)),
        ("hand-bag surrogate", handbag),
    ];
    let mut detail = String::new();
    let mut all = true;
    for (name, d) in &domains {
        let res = minimize_log_sobolev(d, &opts).unwrap();
        let report = check_max_lower_bound(&res, d).unwrap();
        all &= report.pass;
        detail.push_str(&format!(
            "{name}: sup v = {:.4} >= bound {:.4} ({}); ",
            report.get("sup_v").unwrap(),
            report.get("bound").unwrap(),
            if report.pass { "ok" } else { "VIOLATED" }
        ));
    }
    check(all, detail)
}

/// 4. Exponential smallness in the neck middle over l = 4..12 at h = 0.2.
fn criterion_4() -> Result<String, String> {
    let start = Instant::now();
    let opts = SolverOptions { dx: 0.01, restarts: 4, ..Default::default() };
    let l_list: Vec<f64> = (4..=12).map(|l| l as f64).collect();
    let reports = check_neck_middle_decay(0.2, &l_list, &opts).unwrap();
    let fit = reports.last().unwrap();
    let slope = fit.get("mid_value_slope").unwrap();
    let r2 = fit.get("mid_value_r2").unwrap();
    let rate = fit.get("mass_rate").unwrap();
    let env = fit.get("envelope_amplitude").unwrap();
    // the integral inequality with the fitted envelope, recomputed from the
    // stored per-l measurements
    let envelope_holds = reports[..reports.len() - 1].iter().all(|r| {
        let l = r.get("l").unwrap();
        let ratio = r.get("mass_ratio").unwrap();
        ratio <= env * (-rate * l).exp() * (1.0 + 1e-9)
    });
    let mut detail = format!(
        "mid-value slope {slope:.3} <= -1e-2, r² {r2:.4} >= 0.95, mass-ratio envelope {env:.2}·e^(-{rate:.2} l) dominates: {envelope_holds}"
    );
    let in_time = within_budget(start, Duration::from_secs(600), &mut detail);
    check(
        fit.pass && slope <= -1e-2 && r2 >= 0.95 && envelope_holds && in_time,
        detail,
    )
}

/// 5. Neck-extension stability: nonnegative differences with an exponential
/// envelope fit.
fn criterion_5() -> Result<String, String> {
    let opts = SolverOptions { dx: 0.005, restarts: 4, ..Default::default() };
    let mut tube = make_flat_tube(0.02, -2.0, 2.0).unwrap();
    tube.label = "handle".into();
    let mut neck = make_round_neck(1.0, 0.0, 1.0).unwrap();
    neck.label = "N".into();
    let collar = make_collar(&tube, &neck);
    let base = dirichlet(vec![tube, collar, neck]);
    let reports =
        check_neck_extension(&base, "N", &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &opts).unwrap();
    let fit = reports.last().unwrap();
    let rate = fit.get("rate").unwrap();
    let r2 = fit.get("r_squared").unwrap();
    let nonneg = fit.get("nonnegative_differences").unwrap() == 1.0;
    let detail = format!(
        "differences nonnegative: {nonneg}, fitted rate {rate:.2} > 0, r² {r2:.4} >= 0.9"
    );
    check(fit.pass && nonneg && rate > 0.0 && r2 >= 0.9, detail)
}

/// 6. Construction ladder at K = 3 plus the neck-length budget.
fn criterion_6() -> Result<String, String> {
    let start = Instant::now();
    let opts = SolverOptions { dx: 0.005, restarts: 4, ..Default::default() };
    // fitted decay constants from a short neck sweep feed the neck length
    let fit_reports =
        check_neck_middle_decay(0.2, &[4.0, 5.0, 6.0], &SolverOptions { dx: 0.01, restarts: 4, ..Default::default() })
            .unwrap();
    let fitted = fit_reports.last().unwrap();
    let a = fitted.get("mass_rate").unwrap();
    let amp = fitted.get("envelope_amplitude").unwrap();
    let l = match choose_neck_length(a, amp, 2.0) {
        Ok(l) => l,
        Err(e) => return Err(format!("neck budget violated: {e}")),
    };
    // the reference constants pass the k <= 50 budget too
    if let Err(e) = choose_neck_length(1.0, 1.0, 2.0) {
        return Err(format!("budget check failed at (1,1,2): {e}"));
    }
    let l = (l / opts.dx).ceil() * opts.dx;
    let comps = match build_component_sequence(3, 0.02, l, &opts) {
        Ok(c) => c,
        Err(e) => return Err(format!("ladder build failed: {e}")),
    };
    let mut detail = format!("fitted a = {a:.2}, A = {amp:.1}, l = {l:.3}; ");
    let mut ok = true;
    for k in 1..comps.len() {
        let target = if k == 1 { 1.0 } else { 1.0 / (((k - 1) * (k - 1)) as f64 + 1.0) };
        let diff = comps[k - 1].lambda - comps[k].lambda;
        let err = (diff - target).abs();
        ok &= err <= 1e-4;
        detail.push_str(&format!("step {}: err {:.1e}; ", k - 1, err));
    }
    let monotone = comps.windows(2).all(|w| w[1].pinch_exponent >= w[0].pinch_exponent - 1e-12);
    detail.push_str(&format!("p non-decreasing: {monotone}"));
    let in_time = within_budget(start, Duration::from_secs(1800), &mut detail);
    check(ok && monotone && in_time, detail)
}

/// 7. Certificate positivity over 1000 random mass distributions.
fn criterion_7() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let base = -4.2;
    let ladder: Vec<f64> = (0..7).map(|k| base + 1.0 / (1.0 + (k * k) as f64)).collect();
    let mut min_value = f64::INFINITY;
    for _ in 0..1000 {
        let raw: Vec<f64> = (0..ladder.len()).map(|_| rng.gen_range(1e-9..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let masses: Vec<f64> = raw.iter().map(|&m| m / total).collect();
        let cert =
            no_extremal_certificate(&ladder, &masses, 1.0, 1.0, 9.0, Some(base)).unwrap();
        min_value = min_value.min(cert.contradiction_value);
        if cert.contradiction_value <= 0.0 {
            return Err(format!("nonpositive contradiction value {}", cert.contradiction_value));
        }
    }
    let flat = vec![0.75; 5];
    let eq = no_extremal_certificate(&flat, &[0.2; 5], 1.0, 1.0, 9.0, None).unwrap();
    check(
        eq.contradiction_value == 0.0,
        format!(
            "1000 random distributions positive (min {min_value:.3e}); constant ladder gives exactly {}",
            eq.contradiction_value
        ),
    )
}

fn random_field(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> DiscreteField {
    let l = grid.total_length();
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(0.0..l), rng.gen_range(0.3..1.2), rng.gen_range(0.2..2.0)))
        .collect();
    DiscreteField::from_fn(Arc::clone(grid), move |x| {
        0.05 + bumps
            .iter()
            .map(|&(c, s, a)| a * (-(x - c) * (x - c) / (2.0 * s * s)).exp())
            .sum::<f64>()
    })
    .with_dirichlet_ends()
}

/// 8. W = L − (3/2)ln(4π) − 3 at τ = 1, and the scaling identity at c = 4.
fn criterion_8() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let domain = dirichlet(vec![
        make_round_neck(0.5, 0.0, 3.0).unwrap(),
        lslab_core::geometry::make_core_surrogate(0.5).unwrap(),
    ]);
    let grid = Grid::new(&domain, 0.01).unwrap();
    let shift = 1.5 * (4.0 * PI).ln() + 3.0;
    let mut max_identity_err: f64 = 0.0;
    for _ in 0..100 {
        let v = random_field(&grid, &mut rng).normalized().unwrap();
        let w = evaluate_w_entropy(&v, &domain, 1.0, 3).unwrap();
        let l = evaluate_log_sobolev(&v, &domain).unwrap().total;
        max_identity_err = max_identity_err.max((w - (l - shift)).abs());
    }

    // scaling: lengths ×√c, fiber scale ×√c, values ×c^{-3/4}, τ ×c
    let c: f64 = 4.0;
    let rt = c.sqrt();
    let segs = |hh: f64, s: f64| {
        vec![
            make_round_neck(hh, 0.0, 2.0 * s).unwrap(),
            make_flat_tube(hh, 0.0, 3.0 * s).unwrap(),
        ]
    };
    let base = chain(
        segs(0.4, 1.0),
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::KinkAllowed,
    )
    .unwrap();
    let scaled = chain(
        segs(0.4 * rt, rt),
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::KinkAllowed,
    )
    .unwrap();
    let g0 = Grid::new(&base, 0.01).unwrap();
    let g1 = Grid::new(&scaled, 0.01 * rt).unwrap();
    let mut max_scaling_err: f64 = 0.0;
    for _ in 0..10 {
        let v = random_field(&g0, &mut rng).normalized().unwrap();
        let tau = rng.gen_range(0.4..2.0);
        let w0 = evaluate_w_entropy(&v, &base, tau, 3).unwrap();
        let sv = DiscreteField::from_values(
            Arc::clone(&g1),
            v.values().iter().map(|&x| x * c.powf(-0.75)).collect(),
        )
        .unwrap();
        let w1 = evaluate_w_entropy(&sv, &scaled, c * tau, 3).unwrap();
        max_scaling_err = max_scaling_err.max((w0 - w1).abs());
    }
    check(
        max_identity_err <= 1e-12 && max_scaling_err <= 1e-6,
        format!(
            "identity error {max_identity_err:.2e} <= 1e-12 on 100 fields; scaling error {max_scaling_err:.2e} <= 1e-6"
        ),
    )
}

/// 9. Analytic gradient vs central finite differences on 100 random triples.
fn criterion_9() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let domains = vec![
        flat_line(4.0),
        chain(
            vec![
                make_round_neck(0.3, 0.0, 2.0).unwrap(),
                lslab_core::geometry::make_core_surrogate(0.3).unwrap(),
            ],
            BoundaryCondition::Dirichlet,
            BoundaryCondition::Neumann,
            JunctionPolicy::Continuous,
        )
        .unwrap(),
        chain(
            vec![make_flat_tube(0.7, 0.0, 3.0).unwrap()],
            BoundaryCondition::Periodic,
            BoundaryCondition::Periodic,
            JunctionPolicy::Continuous,
        )
        .unwrap(),
    ];
    let step = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let d = &domains[i % domains.len()];
        let grid = Grid::new(d, 0.02).unwrap();
        let v = random_field(&grid, &mut rng).normalized().unwrap();
        let dir = random_field(&grid, &mut rng);
        let grad = functional_gradient(&v, d).unwrap();
        let analytic = grad.weighted_dot(&dir);
        let shift = |sign: f64| {
            DiscreteField::from_values(
                Arc::clone(&grid),
                v.values()
                    .iter()
                    .zip(dir.values())
                    .map(|(&a, &b)| a + sign * step * b)
                    .collect(),
            )
            .unwrap()
        };
        let fd = (log_sobolev_parts(&shift(1.0)).total - log_sobolev_parts(&shift(-1.0)).total)
            / (2.0 * step);
        let rel = (analytic - fd).abs() / fd.abs().max(1e-12);
        worst = worst.max(rel);
    }
    check(worst <= 1e-5, format!("max relative error {worst:.2e} <= 1e-5 over 100 triples"))
}

/// 10. Domain monotonicity under 50 random extensions, and the disconnected
/// infimum against joint minimization.
fn criterion_10() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let opts = SolverOptions { dx: 0.02, restarts: 3, ..Default::default() };
    let mut max_violation: f64 = f64::NEG_INFINITY;
    for _ in 0..50 {
        let half = rng.gen_range(3.0..6.0);
        let delta = rng.gen_range(0.5..3.0);
        let base = flat_line(half);
        let extended = flat_line(half + delta / 2.0);
        let lb = minimize_log_sobolev(&base, &opts).unwrap().lambda;
        let le = minimize_log_sobolev(&extended, &opts).unwrap().lambda;
        max_violation = max_violation.max(le - lb);
    }

    let tube = |h: f64| dirichlet(vec![make_flat_tube(h, 0.0, 4.0).unwrap()]);
    let a = tube(0.3);
    let b = tube(0.15);
    let opts_u = SolverOptions { dx: 0.01, restarts: 6, ..Default::default() };
    let la = minimize_log_sobolev(&a, &opts_u).unwrap().lambda;
    let lb = minimize_log_sobolev(&b, &opts_u).unwrap().lambda;
    let joint = minimize_union(&disjoint_union(vec![a, b]).unwrap(), &opts_u).unwrap();
    let inf = disconnected_infimum(&[la, lb]).unwrap();
    let union_err = (joint.lambda - inf).abs();
    check(
        max_violation <= 1e-6 && union_err <= 1e-4,
        format!(
            "max extension violation {max_violation:.2e} <= 1e-6 over 50 pairs; |joint - min| = {union_err:.2e} <= 1e-4"
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Result<String, String>)> = vec![
        ("1 Euclidean extremal", criterion_1),
        ("2 tube test function and lambda descent", criterion_2),
        ("3 maximum lower bound suite", criterion_3),
        ("4 neck middle decay", criterion_4),
        ("5 neck-extension stability", criterion_5),
        ("6 construction ladder", criterion_6),
        ("7 certificate positivity", criterion_7),
        ("8 scaled-entropy identities", criterion_8),
        ("9 gradient consistency", criterion_9),
        ("10 domain monotonicity", criterion_10),
    ];
    let mut failures = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("[PASS] criterion {name}: {detail}"),
            Err(detail) => {
                println!("[FAIL] criterion {name}: {detail}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
