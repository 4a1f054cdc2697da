//! `lslab` — reproducible runs of the log-Sobolev toolkit.
//!
//! Subcommands: `lambda` (one minimization), `sweep` (grid over tube
//! parameters), `verify` (named lemma suites), `construct` (the full
//! counterexample pipeline), `certify` (certificate from a ladder file),
//! `export` (consolidated CSV/JSON bundle of a finished run).
//!
//! Every run writes a `manifest.json` echoing the fully resolved
//! configuration; identical configurations and seeds reproduce identical
//! output bytes. `LSLAB_THREADS` bounds the worker pool.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lslab_core::construction::{
    assemble_counterexample, build_component_sequence, choose_neck_length, no_extremal_certificate,
    read_ladder_csv, write_ladder_csv, Certificate, ComponentRow,
};
use lslab_core::geometry::{
    chain, make_flat_tube, BoundaryCondition, DomainSpec, JunctionPolicy, PinchFamily,
};
use lslab_core::grid::{DiscreteField, Grid};
use lslab_core::solver::{minimize_log_sobolev, SolverOptions};
use lslab_core::verification::{
    check_cutoff_comparison, check_max_lower_bound, check_mean_value, check_neck_extension,
    check_neck_middle_decay, check_pinch_continuity, fit_gaussian_decay, neck_host,
    write_reports_jsonl, write_summary_csv, LemmaReport,
};
use lslab_core::Error as CoreError;

const EXIT_PARSE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "lslab", version, about = "best log-Sobolev constants on chained model geometries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Output directory for manifest and artifacts.
    #[arg(long, default_value = "lslab-out")]
    out: PathBuf,
    /// RNG seed for solver restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid step.
    #[arg(long, default_value_t = 0.01)]
    dx: f64,
    /// Solver restarts.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Projected-gradient tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

impl CommonOpts {
    fn solver(&self) -> SolverOptions {
        SolverOptions {
            dx: self.dx,
            tolerance: self.tol,
            restarts: self.restarts,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the functional on a JSON domain spec.
    Lambda {
        #[command(flatten)]
        common: CommonOpts,
        /// Domain spec path (JSON).
        #[arg(long)]
        spec: PathBuf,
    },
    /// λ over a (h, l, p) grid of pinched flat tubes.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated tube scales.
        #[arg(long, default_value = "0.1,0.05")]
        h: String,
        /// Comma-separated tube lengths.
        #[arg(long, default_value = "1,2,4")]
        l: String,
        /// Comma-separated pinch exponents.
        #[arg(long, default_value = "0,1")]
        p: String,
    },
    /// Run a named lemma suite.
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// Lemma id: 2.1, 2.2, 2.3, 2.4, 2.5, 3.2, 3.4, 3.5, 3.6.
        #[arg(long)]
        lemma: String,
        /// Scale parameter where the lemma needs one.
        #[arg(long)]
        h: Option<f64>,
        /// Length parameter where the lemma needs one.
        #[arg(long)]
        l: Option<f64>,
        /// Pinch exponent where the lemma needs one.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Full construction pipeline: decay fit, neck length, ladder, assembly,
    /// certificate.
    Construct {
        #[command(flatten)]
        common: CommonOpts,
        /// Handle scale (λ(Ω₀) must be negative; shrink if the run reports
        /// a pinch precondition failure).
        #[arg(long, default_value_t = 0.02)]
        h: f64,
        /// Number of components beyond the central one.
        #[arg(long = "K", default_value_t = 3)]
        k: usize,
        /// Override the neck length (skips the (3.14) selection).
        #[arg(long)]
        l: Option<f64>,
        /// Override the fitted decay rate (skips the neck-decay fit).
        #[arg(long)]
        a: Option<f64>,
        /// Override the fitted decay amplitude (skips the neck-decay fit).
        #[arg(long = "A")]
        amplitude: Option<f64>,
    },
    /// Certificate algebra from a ladder CSV (k, neck_length, p, lambda).
    Certify {
        #[command(flatten)]
        common: CommonOpts,
        /// Ladder CSV path.
        #[arg(long)]
        spec: PathBuf,
        /// Decay rate for the neck budget check.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Decay amplitude for the neck budget check.
        #[arg(long = "A", default_value_t = 1.0)]
        amplitude: f64,
        /// Claimed ladder infimum; defaults to the ladder minimum.
        #[arg(long)]
        lambda_inf: Option<f64>,
    },
    /// Consolidate a finished run directory into CSV/JSON tables.
    Export {
        /// Run directory written by another subcommand.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("LSLAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}

/// Map failures onto the documented exit codes: 2 parse, 3 numeric, 4 io.
fn classify(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<CoreError>() {
        return match core {
            CoreError::Io(_) => EXIT_IO,
            CoreError::IncompleteRun(_) => EXIT_IO,
            CoreError::BracketFailure(_) | CoreError::PinchPrecondition(_) => EXIT_NUMERIC,
            _ => EXIT_PARSE,
        };
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_IO;
    }
    if let Some(&code) = e.downcast_ref::<u8>() {
        return code;
    }
    EXIT_PARSE
}

fn numeric_failure(msg: String) -> anyhow::Error {
    anyhow::Error::new(CoreError::BracketFailure(msg)).context("numeric non-convergence")
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    out: &'a Path,
    seed: u64,
    dx: f64,
    restarts: usize,
    tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    spec: Option<&'a Path>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extra: Option<serde_json::Value>,
}

fn prepare_out(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).map_err(|e| anyhow::Error::new(CoreError::Io(e)))?;
    Ok(())
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    fs::write(dir.join("manifest.json"), text).map_err(|e| anyhow::Error::new(CoreError::Io(e)))?;
    Ok(())
}

fn run(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Lambda { common, spec } => cmd_lambda(common, spec),
        Command::Sweep { common, h, l, p } => cmd_sweep(common, &h, &l, &p),
        Command::Verify { common, lemma, h, l, p } => cmd_verify(common, &lemma, h, l, p),
        Command::Construct { common, h, k, l, a, amplitude } => {
            cmd_construct(common, h, k, l, a, amplitude)
        }
        Command::Certify { common, spec, a, amplitude, lambda_inf } => {
            cmd_certify(common, spec, a, amplitude, lambda_inf)
        }
        Command::Export { out } => cmd_export(&out),
    }
}

fn load_spec(path: &Path) -> anyhow::Result<DomainSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::Error::new(CoreError::Io(e)).context(format!("reading {path:?}")))?;
    Ok(DomainSpec::from_json(&text)?)
}

fn cmd_lambda(common: CommonOpts, spec_path: PathBuf) -> anyhow::Result<()> {
    prepare_out(&common.out)?;
    let spec = load_spec(&spec_path)?;
    let domain = spec.build()?;
    write_manifest(
        &common.out,
        &Manifest {
            command: "lambda",
            out: &common.out,
            seed: common.seed,
            dx: common.dx,
            restarts: common.restarts,
            tol: common.tol,
            spec: Some(&spec_path),
            extra: None,
        },
    )?;
    let res = minimize_log_sobolev(&domain, &common.solver())?;
    let csv_path = common.out.join("extremal.csv");
    res.extremal.write_csv(&csv_path)?;
    let summary = res.summary(csv_path.display().to_string());
    let text = serde_json::to_string_pretty(&summary)?;
    fs::write(common.out.join("result.json"), &text)?;
    println!("{text}");
    if !res.converged {
        return Err(numeric_failure(format!(
            "minimization did not converge (residual {:.3e})",
            res.residual
        )));
    }
    Ok(())
}

fn parse_list(s: &str, what: &str) -> anyhow::Result<Vec<f64>> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    vals.map_err(|e| anyhow::Error::new(CoreError::Parse(format!("{what} list '{s}': {e}"))))
}

fn cmd_sweep(common: CommonOpts, h: &str, l: &str, p: &str) -> anyhow::Result<()> {
    use rayon::prelude::*;
    prepare_out(&common.out)?;
    let hs = parse_list(h, "h")?;
    let ls = parse_list(l, "l")?;
    let ps = parse_list(p, "p")?;
    write_manifest(
        &common.out,
        &Manifest {
            command: "sweep",
            out: &common.out,
            seed: common.seed,
            dx: common.dx,
            restarts: common.restarts,
            tol: common.tol,
            spec: None,
            extra: Some(serde_json::json!({"h": hs, "l": ls, "p": ps})),
        },
    )?;
    let mut cases = Vec::new();
    for &hv in &hs {
        for &lv in &ls {
            for &pv in &ps {
                cases.push((hv, lv, pv));
            }
        }
    }
    let opts = common.solver();
    let rows: Vec<anyhow::Result<String>> = cases
        .par_iter()
        .map(|&(hv, lv, pv)| {
            let tube = make_flat_tube(hv, 0.0, lv)?;
            let base = chain(
                vec![tube],
                BoundaryCondition::Dirichlet,
                BoundaryCondition::Dirichlet,
                JunctionPolicy::Continuous,
            )?;
            let domain = if pv > 0.0 {
                PinchFamily::new(base, (0.0, lv))?.apply(pv)?
            } else {
                base
            };
            let res = minimize_log_sobolev(&domain, &opts)?;
            Ok(format!(
                "{hv:.17e},{lv:.17e},{pv:.17e},{:.17e},{},{:.17e}\n",
                res.lambda, res.converged, res.residual
            ))
        })
        .collect();
    let mut out = String::from("h,l,p,lambda,converged,residual\n");
    let mut all_ok = true;
    for row in rows {
        let row = row?;
        all_ok &= !row.contains("false");
        out.push_str(&row);
    }
    fs::write(common.out.join("sweep.csv"), &out)?;
    println!("{}", out.trim_end());
    if !all_ok {
        return Err(numeric_failure("a sweep member did not converge".into()));
    }
    Ok(())
}

fn cmd_verify(
    common: CommonOpts,
    lemma: &str,
    h: Option<f64>,
    l: Option<f64>,
    p: Option<f64>,
) -> anyhow::Result<()> {
    prepare_out(&common.out)?;
    write_manifest(
        &common.out,
        &Manifest {
            command: "verify",
            out: &common.out,
            seed: common.seed,
            dx: common.dx,
            restarts: common.restarts,
            tol: common.tol,
            spec: None,
            extra: Some(serde_json::json!({"lemma": lemma, "h": h, "l": l, "p": p})),
        },
    )?;
    let opts = common.solver();
    let reports = run_lemma_suite(lemma, h, l, p, &opts)?;
    write_reports_jsonl(&common.out.join("reports.jsonl"), &reports)?;
    write_summary_csv(&common.out.join("summary.csv"), &reports)?;
    for r in &reports {
        println!("{} [{}] pass={} margin={:.3e}", r.lemma, r.inputs, r.pass, r.margin);
    }
    Ok(())
}

fn flat_line(half: f64) -> anyhow::Result<lslab_core::geometry::DomainChain> {
    Ok(chain(
        vec![lslab_core::geometry::make_line(-half, half)?],
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )?)
}

fn run_lemma_suite(
    lemma: &str,
    h: Option<f64>,
    l: Option<f64>,
    p: Option<f64>,
    opts: &SolverOptions,
) -> anyhow::Result<Vec<LemmaReport>> {
    let mut reports = Vec::new();
    match lemma {
        "2.1" => {
            // mean-value stability across scales (the h-independence of the
            // constant is reported as a spread, not thresholded)
            let hs = [0.05, 0.1, 0.2];
            let mut cs = Vec::new();
            for &hv in &hs {
                let host = neck_host(hv, 4.0)?;
                let res = minimize_log_sobolev(&host, opts)?;
                let m = host.total_length() / 2.0;
                let rep = check_mean_value(&res, &host, m, opts)?;
                cs.push(rep.get("c_obs").unwrap_or(f64::NAN));
                reports.push(rep);
            }
            let spread = cs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - cs.iter().cloned().fold(f64::INFINITY, f64::min);
            reports.push(LemmaReport {
                lemma: "mean-value/h-spread".into(),
                inputs: format!("h={hs:?}"),
                measured: vec![("c_obs_spread".into(), spread)],
                pass: spread.is_finite(),
                margin: spread,
            });
        }
        "2.2" => {
            let line = flat_line(10.0)?;
            let res = minimize_log_sobolev(&line, opts)?;
            reports.push(check_max_lower_bound(&res, &line)?);
            for hv in [0.1, 0.2] {
                let host = neck_host(hv, 5.0)?;
                let res = minimize_log_sobolev(&host, opts)?;
                reports.push(check_max_lower_bound(&res, &host)?);
            }
        }
        "2.3" => {
            let line = flat_line(10.0)?;
            let res = minimize_log_sobolev(&line, opts)?;
            let (_, rep) = fit_gaussian_decay(&res, &line, 10.0)?;
            reports.push(rep);
        }
        "2.4" | "3.4" => {
            let line = flat_line(8.0)?;
            let res = minimize_log_sobolev(&line, opts)?;
            let total = line.total_length();
            let grid = std::sync::Arc::clone(&res.extremal.grid);
            let eta = DiscreteField::from_fn(grid, move |x| {
                x.min(total - x).min(1.0).clamp(0.0, 1.0)
            });
            reports.push(check_cutoff_comparison(&res, &line, (0.0, total), &eta, opts)?);
        }
        "2.5" => {
            let hv = h.unwrap_or(0.1);
            let tube = make_flat_tube(hv, -2.0, 2.0)?;
            let base = chain(
                vec![tube],
                BoundaryCondition::Dirichlet,
                BoundaryCondition::Dirichlet,
                JunctionPolicy::Continuous,
            )?;
            let fam = PinchFamily::new(base, (0.0, 4.0))?;
            reports.push(check_pinch_continuity(
                &fam,
                p.unwrap_or(0.5),
                &[0.5, 0.25, 0.125],
                opts,
            )?);
        }
        "3.2" | "3.3" => {
            let hv = h.unwrap_or(0.2);
            let lmax = l.unwrap_or(8.0);
            let mut ls = Vec::new();
            let mut cur = 4.0;
            while cur <= lmax + 1e-9 {
                ls.push(cur);
                cur += 1.0;
            }
            reports.extend(check_neck_middle_decay(hv, &ls, opts)?);
        }
        "3.5" => {
            let mut tube = make_flat_tube(h.unwrap_or(0.02), -2.0, 2.0)?;
            tube.label = "handle".into();
            let mut neck = lslab_core::geometry::make_round_neck(1.0, 0.0, 1.0)?;
            neck.label = "N".into();
            let collar = lslab_core::geometry::make_collar(&tube, &neck);
            let base = chain(
                vec![tube, collar, neck],
                BoundaryCondition::Dirichlet,
                BoundaryCondition::Dirichlet,
                JunctionPolicy::Continuous,
            )?;
            reports.extend(check_neck_extension(
                &base,
                "N",
                &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
                opts,
            )?);
        }
        "3.6" => {
            reports.extend(tube_functional_suite(h.unwrap_or(0.01), opts)?);
        }
        other => {
            return Err(anyhow::Error::new(CoreError::Parse(format!(
                "unknown lemma id '{other}'"
            ))))
        }
    }
    Ok(reports)
}

/// Tube test-function integrals plus the λ(h) drop ladder.
fn tube_functional_suite(h: f64, opts: &SolverOptions) -> anyhow::Result<Vec<LemmaReport>> {
    use lslab_core::functional::{evaluate_log_sobolev, l2_norm_sq};
    use std::f64::consts::PI;
    let tube = make_flat_tube(h, 0.0, 1.0)?;
    let domain = chain(
        vec![tube],
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )?;
    let grid = Grid::new(&domain, 1e-4)?;
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
    let norm = l2_norm_sq(&v, &domain)?;
    let parts = evaluate_log_sobolev(&v.normalized()?, &domain)?;
    let entropy_closed = -((3.0 / (8.0 * PI * PI)).ln() + (1.0 / (h * h)).ln() - 1.0 / 6.0);
    let mut reports = vec![LemmaReport {
        lemma: "tube-test-function".into(),
        inputs: format!("h={h}, dx=1e-4"),
        measured: vec![
            ("norm_sq".into(), norm),
            ("dirichlet_part".into(), parts.dirichlet_part),
            ("entropy_part".into(), parts.entropy_part),
            ("entropy_closed_form".into(), entropy_closed),
            ("upper_bound_for_lambda".into(), parts.total),
        ],
        pass: (norm - 1.0).abs() <= 1e-6
            && (parts.dirichlet_part - 48.0).abs() <= 1e-3
            && (parts.entropy_part - entropy_closed).abs() <= 1e-3,
        margin: 1e-3 - (parts.dirichlet_part - 48.0).abs(),
    }];
    // λ(H(h,0,1)) decreases without bound as h shrinks
    let mut prev: Option<f64> = None;
    let mut drops_ok = true;
    let mut measured = Vec::new();
    for hv in [0.1, 0.01, 0.001] {
        let d = chain(
            vec![make_flat_tube(hv, 0.0, 1.0)?],
            BoundaryCondition::Dirichlet,
            BoundaryCondition::Dirichlet,
            JunctionPolicy::Continuous,
        )?;
        let res = minimize_log_sobolev(&d, opts)?;
        measured.push((format!("lambda_h_{hv}"), res.lambda));
        if let Some(pl) = prev {
            drops_ok &= pl - res.lambda >= 1.0;
            measured.push((format!("drop_into_{hv}"), pl - res.lambda));
        }
        prev = Some(res.lambda);
    }
    reports.push(LemmaReport {
        lemma: "tube-lambda-unbounded-below".into(),
        inputs: "h in {1e-1, 1e-2, 1e-3}".into(),
        measured,
        pass: drops_ok,
        margin: 0.0,
    });
    Ok(reports)
}

#[derive(Serialize)]
struct ConstructReport {
    fitted_rate: f64,
    fitted_amplitude: f64,
    neck_length: f64,
    components: Vec<ComponentRow>,
    assembled_lambda: f64,
    assembled_converged: bool,
    certificate: Certificate,
}

fn cmd_construct(
    common: CommonOpts,
    h: f64,
    k_max: usize,
    l_override: Option<f64>,
    a_override: Option<f64>,
    amp_override: Option<f64>,
) -> anyhow::Result<()> {
    prepare_out(&common.out)?;
    write_manifest(
        &common.out,
        &Manifest {
            command: "construct",
            out: &common.out,
            seed: common.seed,
            dx: common.dx,
            restarts: common.restarts,
            tol: common.tol,
            spec: None,
            extra: Some(serde_json::json!({
                "h": h, "K": k_max, "l": l_override, "a": a_override, "A": amp_override
            })),
        },
    )?;
    let opts = common.solver();

    // step 1: decay constants, fitted from the neck sweep unless supplied
    let (rate, amplitude) = match (a_override, amp_override) {
        (Some(a), Some(amp)) => (a, amp),
        _ => {
            let reports = check_neck_middle_decay(0.2, &[4.0, 5.0, 6.0], &opts)?;
            let fit = reports.last().expect("summary report");
            (
                fit.get("mass_rate").unwrap_or(1.0),
                fit.get("envelope_amplitude").unwrap_or(1.0),
            )
        }
    };

    // step 2: neck length from the decay budget, rounded up to the grid
    let l = match l_override {
        Some(l) => l,
        None => {
            let raw = choose_neck_length(rate, amplitude, 2.0)?;
            (raw / common.dx).ceil() * common.dx
        }
    };

    // step 3: the component ladder
    let components = build_component_sequence(k_max, h, l, &opts)?;
    let rows: Vec<ComponentRow> = components.iter().map(|c| c.row()).collect();
    write_ladder_csv(&common.out.join("ladder.csv"), &rows)?;
    for comp in &components {
        let g = Grid::new(&comp.chain, opts.dx)?;
        let res = minimize_log_sobolev(&comp.chain, &opts)?;
        drop(g);
        res.extremal
            .write_csv(&common.out.join(format!("extremal_k{}.csv", comp.index)))?;
    }

    // step 4: mirror assembly, truncated at ±K with Dirichlet ends
    let assembled = assemble_counterexample(&components, k_max)?;
    let assembled_res = minimize_log_sobolev(&assembled, &opts)?;
    assembled_res.extremal.write_csv(&common.out.join("assembled_extremal.csv"))?;

    // step 5: certificate with the infinite-ladder infimum
    // λ_inf = λ₀ − 1 − Σ_{j≥1} 1/(j²+1), the sum in closed form
    let tail_sum = (std::f64::consts::PI / std::f64::consts::PI.tanh() - 1.0) / 2.0;
    let lambda_inf = components[0].lambda - 1.0 - tail_sum;
    let ladder: Vec<f64> = components.iter().map(|c| c.lambda).collect();
    let masses = vec![1.0 / ladder.len() as f64; ladder.len()];
    let certificate =
        no_extremal_certificate(&ladder, &masses, rate, amplitude, l, Some(lambda_inf))?;

    let report = ConstructReport {
        fitted_rate: rate,
        fitted_amplitude: amplitude,
        neck_length: l,
        components: rows,
        assembled_lambda: assembled_res.lambda,
        assembled_converged: assembled_res.converged,
        certificate,
    };
    let text = serde_json::to_string_pretty(&report)?;
    fs::write(common.out.join("pipeline.json"), &text)?;
    println!("{text}");
    if !assembled_res.converged {
        return Err(numeric_failure("assembled-chain minimization did not converge".into()));
    }
    Ok(())
}

fn cmd_certify(
    common: CommonOpts,
    ladder_path: PathBuf,
    a: f64,
    amplitude: f64,
    lambda_inf: Option<f64>,
) -> anyhow::Result<()> {
    prepare_out(&common.out)?;
    let rows = read_ladder_csv(&ladder_path)?;
    write_manifest(
        &common.out,
        &Manifest {
            command: "certify",
            out: &common.out,
            seed: common.seed,
            dx: common.dx,
            restarts: common.restarts,
            tol: common.tol,
            spec: Some(&ladder_path),
            extra: Some(serde_json::json!({"a": a, "A": amplitude, "lambda_inf": lambda_inf})),
        },
    )?;
    let ladder: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let masses = vec![1.0 / ladder.len() as f64; ladder.len()];
    let l = rows[0].neck_length;
    let cert = no_extremal_certificate(&ladder, &masses, a, amplitude, l, lambda_inf)?;
    let text = serde_json::to_string_pretty(&cert)?;
    fs::write(common.out.join("certificate.json"), &text)?;
    println!("{text}");
    Ok(())
}

fn cmd_export(run_dir: &Path) -> anyhow::Result<()> {
    let manifest = run_dir.join("manifest.json");
    if !manifest.exists() {
        return Err(anyhow::Error::new(CoreError::IncompleteRun(format!(
            "no manifest.json under {run_dir:?}"
        ))));
    }
    let bundle = run_dir.join("export");
    fs::create_dir_all(&bundle).map_err(|e| anyhow::Error::new(CoreError::Io(e)))?;
    let mut copied = 0;
    for entry in fs::read_dir(run_dir)? {
        let entry = entry?;
        let path = entry.path();
        let name = entry.file_name();
        let is_artifact = path.extension().map_or(false, |e| e == "csv" || e == "json" || e == "jsonl");
        if path.is_file() && is_artifact {
            fs::copy(&path, bundle.join(&name))?;
            copied += 1;
        }
    }
    if copied <= 1 {
        return Err(anyhow::Error::new(CoreError::IncompleteRun(format!(
            "run directory {run_dir:?} holds no result artifacts"
        ))));
    }
    // decay fits and per-length sweeps condensed from the reports
    let reports_path = run_dir.join("reports.jsonl");
    if reports_path.exists() {
        let mut fits = String::from("lemma,rate,r_squared,pass\n");
        let mut sweep = String::from("l,v_mid,mass_ratio,lambda\n");
        let mut fitted_rate = f64::NAN;
        for line in fs::read_to_string(&reports_path)?.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let rep: LemmaReport = serde_json::from_str(line)?;
            if let Some(rate) = rep.get("rate").or_else(|| rep.get("mass_rate")) {
                let r2 = rep
                    .get("r_squared")
                    .or_else(|| rep.get("mass_r2"))
                    .unwrap_or(f64::NAN);
                fits.push_str(&format!("{},{rate:.12e},{r2:.12e},{}\n", rep.lemma, rep.pass));
                fitted_rate = rate;
            }
            if let (Some(l), Some(v_mid)) = (rep.get("l"), rep.get("v_mid")) {
                sweep.push_str(&format!(
                    "{l:.6},{v_mid:.12e},{:.12e},{:.12e}\n",
                    rep.get("mass_ratio").unwrap_or(f64::NAN),
                    rep.get("lambda").unwrap_or(f64::NAN),
                ));
            }
        }
        fs::write(bundle.join("decay_fits.csv"), fits)?;
        if sweep.lines().count() > 1 {
            if fitted_rate.is_finite() {
                sweep.push_str(&format!("# fitted rate {fitted_rate:.12e}\n"));
            }
            fs::write(bundle.join("neck_decay.csv"), sweep)?;
        }
    }
    println!("exported {copied} artifacts to {}", bundle.display());
    Ok(())
}
