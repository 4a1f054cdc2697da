//! Numerical checks of the quantitative estimates on computed extremals:
//! interior maximum lower bound, mean-value stability, Gaussian far-field
//! decay, exponential smallness in long neck middles, cutoff comparison of
//! two domains, neck-extension stability of λ, and pinch continuity.
//!
//! Decay constants are always *fitted* quantities with their regression
//! diagnostics attached; the estimates assert existence of constants, not
//! values, so no fit is silently accepted and every report's pass flag is
//! recomputable from the measured numbers it stores.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{xlnx, NORM_TOL};
use crate::geometry::{
    chain, make_core_surrogate, make_round_neck, BoundaryCondition, DomainChain, JunctionPolicy,
    PinchFamily,
};
use crate::grid::DiscreteField;
use crate::solver::{minimize_log_sobolev, SolverOptions, SpectralResult};

/// Least-squares exponential fit: rate, amplitude, the coordinate range the
/// fit used, and its r².
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayFit {
    /// Decay rate `a` in `A e^{−a·s}` (s is d² for Gaussian fits, l for
    /// neck-length fits).
    pub rate: f64,
    /// Least-squares amplitude `A`.
    pub amplitude: f64,
    pub fit_range: (f64, f64),
    pub r_squared: f64,
}

/// Outcome of one lemma check: inputs, measured quantities, verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub inputs: String,
    pub measured: Vec<(String, f64)>,
    pub pass: bool,
    pub margin: f64,
}

impl LemmaReport {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.measured.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

/// Ordinary least squares of `y = slope·x + intercept`; returns
/// `(slope, intercept, r²)`.
pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 =
        xs.iter().zip(ys).map(|(&x, &y)| (y - slope * x - intercept).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|&y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

fn require_converged(res: &SpectralResult) -> Result<()> {
    if !res.converged {
        return Err(Error::StaleResult("solver result did not converge".into()));
    }
    let n2 = res.extremal.weighted_norm_sq();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NormalizationError(format!("extremal has ∫v²w = {n2}")));
    }
    Ok(())
}

/// Interior maximum lower bound: for a Dirichlet extremal,
/// `sup v ≥ e^{(inf R − λ)/2}`.
pub fn check_max_lower_bound(res: &SpectralResult, domain: &DomainChain) -> Result<LemmaReport> {
    require_converged(res)?;
    if domain.is_periodic()
        || domain.left_bc != BoundaryCondition::Dirichlet
        || domain.right_bc != BoundaryCondition::Dirichlet
    {
        return Err(Error::InvalidParameter("max lower bound needs a Dirichlet chain".into()));
    }
    let sup = res.extremal.sup();
    let inf_r = domain.min_curvature();
    let bound = ((inf_r - res.lambda) / 2.0).exp();
    let pass = sup >= bound - 1e-6;
    Ok(LemmaReport {
        lemma: "max-lower-bound".into(),
        inputs: format!("lambda={:.6}, inf_R={inf_r:.6}", res.lambda),
        measured: vec![
            ("sup_v".into(), sup),
            ("bound".into(), bound),
            ("lambda".into(), res.lambda),
            ("inf_R".into(), inf_r),
        ],
        pass,
        margin: sup - bound,
    })
}

fn window_mass(v: &DiscreteField, center: f64, radius: f64) -> f64 {
    let l = v.grid.total_length();
    if v.grid.is_periodic() {
        if 2.0 * radius >= l {
            return v.mass_on(0.0, l);
        }
        let a = (center - radius).rem_euclid(l);
        let b = (center + radius).rem_euclid(l);
        if a < b {
            v.mass_on(a, b)
        } else {
            v.mass_on(a, l) + v.mass_on(0.0, b)
        }
    } else {
        v.mass_on(center - radius, center + radius)
    }
}

fn window_sup(v: &DiscreteField, center: f64, radius: f64) -> f64 {
    let l = v.grid.total_length();
    if v.grid.is_periodic() {
        if 2.0 * radius >= l {
            return v.sup();
        }
        let a = (center - radius).rem_euclid(l);
        let b = (center + radius).rem_euclid(l);
        if a < b {
            v.sup_on(a, b)
        } else {
            v.sup_on(a, l).max(v.sup_on(0.0, b))
        }
    } else {
        v.sup_on(center - radius, center + radius)
    }
}

/// Mean-value stability: `C_obs = sup_{B(m,1)} v² / ∫_{B(m,2)} v² w` is
/// finite and moves by at most 20% under one grid refinement (the refined
/// value comes from a fresh solve at Δx/2).
pub fn check_mean_value(
    res: &SpectralResult,
    domain: &DomainChain,
    m: f64,
    opts: &SolverOptions,
) -> Result<LemmaReport> {
    require_converged(res)?;
    if !domain.is_periodic() && (m - 2.0 < -1e-12 || m + 2.0 > domain.total_length() + 1e-12) {
        return Err(Error::OutOfRange(format!(
            "ball B({m}, 2) exits the chain [0, {}]",
            domain.total_length()
        )));
    }
    if domain.is_periodic() && domain.total_length() < 4.0 {
        return Err(Error::OutOfRange("periodic chain shorter than the ball diameter".into()));
    }
    let c_obs = |v: &DiscreteField| {
        let s = window_sup(v, m, 1.0);
        let mass = window_mass(v, m, 2.0);
        s * s / mass
    };
    let coarse = c_obs(&res.extremal);
    let fine_opts = SolverOptions { dx: opts.dx / 2.0, ..opts.clone() };
    let fine_res = minimize_log_sobolev(domain, &fine_opts)?;
    let fine = c_obs(&fine_res.extremal);
    let rel = (fine - coarse).abs() / coarse.abs().max(f64::MIN_POSITIVE);
    let pass = coarse.is_finite() && fine.is_finite() && rel <= 0.2;
    Ok(LemmaReport {
        lemma: "mean-value".into(),
        inputs: format!("m={m:.4}, dx={:.2e}", opts.dx),
        measured: vec![
            ("c_obs".into(), coarse),
            ("c_obs_refined".into(), fine),
            ("relative_change".into(), rel),
        ],
        pass,
        margin: 0.2 - rel,
    })
}

/// Far-field Gaussian decay: least squares of `ln v` against `d(x, origin)²`
/// beyond radius 2. Passes when the slope is genuinely negative and the
/// (residual-adjusted) envelope dominates the far field.
pub fn fit_gaussian_decay(
    res: &SpectralResult,
    domain: &DomainChain,
    origin: f64,
) -> Result<(DecayFit, LemmaReport)> {
    require_converged(res)?;
    let r0 = 2.0;
    let far_reach = (domain.total_length() - origin).max(origin);
    if far_reach < r0 + 4.0 {
        return Err(Error::OutOfRange(format!(
            "domain extends only {far_reach:.2} beyond the origin; need {}",
            r0 + 4.0
        )));
    }
    let v = &res.extremal;
    let mut d2 = Vec::new();
    let mut lnv = Vec::new();
    let mut dmax: f64 = 0.0;
    for (&x, &val) in v.grid.nodes().iter().zip(v.values()) {
        let d = (x - origin).abs();
        if d >= r0 && val > 1e-300 {
            d2.push(d * d);
            lnv.push(val.ln());
            dmax = dmax.max(d);
        }
    }
    if d2.len() < 3 {
        return Err(Error::UnderflowRegion(
            "far field below 1e-300 everywhere; shrink the fit range".into(),
        ));
    }
    let (slope, intercept, r2) = fit_line(&d2, &lnv);
    let rate = -slope;
    let max_resid = d2
        .iter()
        .zip(lnv.iter())
        .map(|(&x, &y)| y - (slope * x + intercept))
        .fold(f64::NEG_INFINITY, f64::max);
    let env_amplitude = (intercept + max_resid).exp();
    let dominates = max_resid.is_finite();
    let pass = slope <= -1e-3 && dominates;
    let fit = DecayFit {
        rate,
        amplitude: intercept.exp(),
        fit_range: (r0, dmax),
        r_squared: r2,
    };
    let report = LemmaReport {
        lemma: "gaussian-decay".into(),
        inputs: format!("origin={origin:.4}, r0={r0}"),
        measured: vec![
            ("rate".into(), rate),
            ("amplitude".into(), fit.amplitude),
            ("envelope_amplitude".into(), env_amplitude),
            ("r_squared".into(), r2),
            ("points".into(), d2.len() as f64),
        ],
        pass,
        margin: -1e-3 - slope,
    };
    Ok((fit, report))
}

/// Default cap on the neck scale for the neck-decay checks; beyond it the
/// curvature is too weak for the middle of the neck to be forced small.
pub const NECK_H0: f64 = 0.25;

/// Re-solve the Euler-Lagrange equation `4Δv − Rv + 2v ln v + λv = 0` on a
/// coordinate window, holding the window's end values fixed at the field's
/// converged values, and splice the solution back in.
///
/// A descent iteration resolves the extremal down to its gradient tolerance,
/// which leaves far-field values at the optimizer's noise floor (~1e-10)
/// even though the true tail is far smaller. Solving the same discrete
/// stationarity system directly — damped Newton, one tridiagonal solve per
/// sweep, Jacobian an M-matrix wherever v is small — recovers the tail at
/// relative precision; the boundary data and λ come from the converged
/// solve, so the spliced field still satisfies the full residual check.
pub fn settle_el_window(
    field: &DiscreteField,
    lambda: f64,
    window: (f64, f64),
) -> Result<DiscreteField> {
    let grid = &field.grid;
    if grid.is_periodic() {
        return Err(Error::InvalidParameter("window settling needs a non-periodic grid".into()));
    }
    let i0 = grid.nearest_node(window.0);
    let i1 = grid.nearest_node(window.1);
    if i1 <= i0 + 2 {
        return Err(Error::OutOfRange("window too narrow".into()));
    }
    let n = i1 - i0 + 1;
    let cells = grid.cells();
    let w = grid.node_weight();
    let r = grid.node_curvature();
    let q = grid.node_measure();
    let mut v: Vec<f64> = field.values()[i0..=i1].iter().map(|&x| x.max(1e-280)).collect();
    v[0] = field.values()[i0];
    v[n - 1] = field.values()[i1];
    // conservative Laplacian on the window: cells i0..i1-1
    let lap = |vv: &[f64], k: usize| -> f64 {
        let cl = &cells[i0 + k - 1];
        let cr = &cells[i0 + k];
        (cr.w_mid * (vv[k + 1] - vv[k]) / cr.len - cl.w_mid * (vv[k] - vv[k - 1]) / cl.len)
            / (w[i0 + k] * q[i0 + k])
    };
    for _ in 0..100 {
        // residual and Jacobian of F(v) = 4Δv − Rv + 2v ln v + λv
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for k in 1..n - 1 {
            let gk = i0 + k;
            let cl = &cells[gk - 1];
            let cr = &cells[gk];
            let m = w[gk] * q[gk];
            let f = 4.0 * lap(&v, k) - r[gk] * v[k]
                + 2.0 * v[k] * v[k].max(1e-300).ln()
                + lambda * v[k];
            rhs[k] = -f;
            sub[k] = 4.0 * cl.w_mid / (cl.len * m);
            sup[k] = 4.0 * cr.w_mid / (cr.len * m);
            diag[k] = -4.0 * (cl.w_mid / cl.len + cr.w_mid / cr.len) / m - r[gk]
                + 2.0 * v[k].max(1e-300).ln()
                + 2.0
                + lambda;
        }
        // pinned ends
        sub[0] = 0.0;
        sup[0] = 0.0;
        rhs[0] = 0.0;
        sub[n - 1] = 0.0;
        sup[n - 1] = 0.0;
        rhs[n - 1] = 0.0;
        sup[0] = 0.0;
        sub[1] = 0.0;
        sup[n - 2] = 0.0;
        let delta = solve_tridiag_local(&sub, &diag, &sup, &rhs);
        let mut max_rel: f64 = 0.0;
        for k in 1..n - 1 {
            let step = delta[k];
            let new = if v[k] + step > 0.25 * v[k] { v[k] + step } else { 0.25 * v[k] };
            max_rel = max_rel.max((new - v[k]).abs() / v[k].max(1e-280));
            v[k] = new;
        }
        if max_rel <= 1e-12 {
            break;
        }
    }
    let mut out = field.values().to_vec();
    out[i0..=i1].copy_from_slice(&v);
    DiscreteField::from_values(std::sync::Arc::clone(grid), out)
}

fn solve_tridiag_local(sub: &[f64], diag: &[f64], sup: &[f64], d: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = sup[0] / beta;
    x[0] = d[0] / beta;
    for k in 1..n {
        beta = diag[k] - sub[k] * c[k - 1];
        c[k] = sup[k] / beta;
        x[k] = (d[k] - sub[k] * x[k - 1]) / beta;
    }
    for k in (0..n - 1).rev() {
        x[k] -= c[k] * x[k + 1];
    }
    x
}

/// Host chain for neck lemmas: core + neck(−l, l) + core with Dirichlet
/// outer ends, so the neck is an interior region of a composite domain and
/// the extremal does not vanish on its ends.
pub fn neck_host(h: f64, l: f64) -> Result<DomainChain> {
    chain(
        vec![
            make_core_surrogate(h)?,
            make_round_neck(h, -l, l)?,
            make_core_surrogate(h)?,
        ],
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )
}

/// Exponential smallness in the middle of long necks: sweep the half-length
/// `l`, record the neck midpoint value and the middle-half to end-collar
/// mass ratio, and fit both against `l`. The last report summarizes the
/// fits; per-`l` reports carry the raw measurements.
pub fn check_neck_middle_decay(
    h: f64,
    l_list: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<LemmaReport>> {
    if !(h > 0.0 && h <= NECK_H0) {
        return Err(Error::InvalidParameter(format!("h = {h} outside (0, {NECK_H0}]")));
    }
    if l_list.len() < 3 {
        return Err(Error::InsufficientData("need at least 3 neck lengths for a fit".into()));
    }
    if l_list.iter().any(|&l| l < 2.0) {
        return Err(Error::InvalidParameter("neck half-lengths must be at least 2".into()));
    }
    let mut reports = Vec::new();
    let mut ls = Vec::new();
    let mut ln_mid = Vec::new();
    let mut ln_ratio = Vec::new();
    for &l in l_list {
        let host = neck_host(h, l)?;
        let res = minimize_log_sobolev(&host, opts)?;
        // neck occupies [2, 2 + 2l] globally; settle the stationarity
        // system one unit in from the neck ends so the deep tail carries
        // true values instead of the optimizer's noise floor
        let neck_start = 2.0;
        let neck_end = neck_start + 2.0 * l;
        let field = settle_el_window(&res.extremal, res.lambda, (neck_start + 1.0, neck_end - 1.0))?;
        let residual = crate::functional::el_residual(&field, res.lambda, &host)?;
        let center = neck_start + l;
        let v_mid = field.value_at(center).max(0.0);
        let mid_mass = field.mass_on(center - l / 2.0, center + l / 2.0);
        let end_mass = field.mass_on(neck_start, neck_start + 2.0)
            + field.mass_on(neck_end - 2.0, neck_end);
        let ratio = mid_mass / end_mass;
        let ok = res.converged && v_mid > 0.0 && ratio.is_finite();
        reports.push(LemmaReport {
            lemma: "neck-middle-decay".into(),
            inputs: format!("h={h}, l={l}"),
            measured: vec![
                ("l".into(), l),
                ("v_mid".into(), v_mid),
                ("mid_mass".into(), mid_mass),
                ("end_mass".into(), end_mass),
                ("mass_ratio".into(), ratio),
                ("lambda".into(), res.lambda),
                ("el_residual".into(), residual),
            ],
            pass: ok,
            margin: if ok { v_mid } else { -1.0 },
        });
        ls.push(l);
        ln_mid.push(v_mid.max(1e-300).ln());
        ln_ratio.push(ratio.max(1e-300).ln());
    }
    let (slope_v, _b_v, r2_v) = fit_line(&ls, &ln_mid);
    let (slope_m, b_m, r2_m) = fit_line(&ls, &ln_ratio);
    let env_resid = ls
        .iter()
        .zip(ln_ratio.iter())
        .map(|(&l, &y)| y - (slope_m * l + b_m))
        .fold(f64::NEG_INFINITY, f64::max);
    let env_amplitude = (b_m + env_resid).exp();
    let decreasing = ln_mid.windows(2).all(|w| w[1] < w[0]);
    let pass = slope_v <= -1e-2 && r2_v >= 0.95 && slope_m < 0.0 && decreasing;
    reports.push(LemmaReport {
        lemma: "neck-middle-decay/fit".into(),
        inputs: format!("h={h}, l={:?}", l_list),
        measured: vec![
            ("mid_value_slope".into(), slope_v),
            ("mid_value_r2".into(), r2_v),
            ("mass_rate".into(), -slope_m),
            ("mass_r2".into(), r2_m),
            ("envelope_amplitude".into(), env_amplitude),
            ("strictly_decreasing".into(), if decreasing { 1.0 } else { 0.0 }),
        ],
        pass,
        margin: -1e-2 - slope_v,
    });
    Ok(reports)
}

/// Cutoff comparison between a sub-domain `E` (a coordinate window of `F`)
/// and `F` itself:
///
/// ```text
/// λ(E)‖ηv‖² ≤ λ(F)‖ηv‖² + 4∫v²|η'|²w − ∫(ηv)² ln η² w
/// ```
///
/// with `v` the extremal of `F` and `η ∈ [0, 1]` supported in `E`; λ(E)
/// comes from a fresh minimization.
pub fn check_cutoff_comparison(
    res: &SpectralResult,
    f_domain: &DomainChain,
    e_window: (f64, f64),
    eta: &DiscreteField,
    opts: &SolverOptions,
) -> Result<LemmaReport> {
    require_converged(res)?;
    if !eta.grid.matches(f_domain) || eta.values().len() != res.extremal.values().len() {
        return Err(Error::ShapeError("cutoff lives on a different grid".into()));
    }
    if eta.values().iter().any(|&e| !(0.0..=1.0 + 1e-12).contains(&e)) {
        return Err(Error::InvalidCutoff("η must take values in [0, 1]".into()));
    }
    let (e0, e1) = e_window;
    for (&x, &e) in eta.grid.nodes().iter().zip(eta.values()) {
        if (x < e0 - 1e-9 || x > e1 + 1e-9) && e.abs() > 1e-12 {
            return Err(Error::InvalidCutoff(format!("η nonzero at x={x} outside E")));
        }
    }
    let v = &res.extremal;
    let grid = &v.grid;
    let mut etav_sq = 0.0;
    let mut log_term = 0.0;
    for k in 0..grid.len() {
        let m = grid.node_weight()[k] * grid.node_measure()[k];
        let ev = eta.values()[k] * v.values()[k];
        etav_sq += ev * ev * m;
        log_term += v.values()[k] * v.values()[k] * xlnx(eta.values()[k] * eta.values()[k]) * m;
    }
    let mut grad_term = 0.0;
    for (c, cell) in grid.cells().iter().enumerate() {
        let (i, j) = grid.cell_nodes(c);
        let de = (eta.values()[j] - eta.values()[i]) / cell.len;
        let vm = 0.5 * (v.values()[i] + v.values()[j]);
        grad_term += 4.0 * vm * vm * de * de * cell.w_mid * cell.len;
    }
    let full_window = e0 <= 1e-12 && e1 >= f_domain.total_length() - 1e-12;
    let e_domain = if full_window {
        f_domain.clone()
    } else {
        f_domain.sub_chain(e0, e1)?
    };
    let lambda_e = minimize_log_sobolev(&e_domain, opts)?.lambda;
    let lhs = lambda_e * etav_sq;
    let rhs = res.lambda * etav_sq + grad_term - log_term;
    let slack = rhs - lhs;
    Ok(LemmaReport {
        lemma: "cutoff-comparison".into(),
        inputs: format!("E=[{e0:.3},{e1:.3}] inside F of length {:.3}", f_domain.total_length()),
        measured: vec![
            ("lambda_E".into(), lambda_e),
            ("lambda_F".into(), res.lambda),
            ("etav_norm_sq".into(), etav_sq),
            ("grad_term".into(), grad_term),
            ("log_term".into(), log_term),
            ("slack".into(), slack),
        ],
        pass: slack >= -1e-4,
        margin: slack,
    })
}

/// Neck-extension stability: λ changes by an exponentially small amount when
/// a labeled round neck is lengthened. Sweeps the neck length, requires the
/// consecutive differences to be nonnegative, and fits them to `A e^{−a l}`.
pub fn check_neck_extension(
    base: &DomainChain,
    neck_label: &str,
    l_list: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<LemmaReport>> {
    if base.find_segment(neck_label).is_none() {
        return Err(Error::UnknownSegment(neck_label.into()));
    }
    if l_list.len() < 3 {
        return Err(Error::InsufficientData("need at least 3 lengths".into()));
    }
    let mut reports = Vec::new();
    let mut lambdas = Vec::new();
    for &l in l_list {
        let extended = base.with_segment_length(neck_label, l)?;
        let res = minimize_log_sobolev(&extended, opts)?;
        reports.push(LemmaReport {
            lemma: "neck-extension".into(),
            inputs: format!("neck='{neck_label}', l={l}"),
            measured: vec![("l".into(), l), ("lambda".into(), res.lambda)],
            pass: res.converged,
            margin: 0.0,
        });
        lambdas.push(res.lambda);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut nonneg = true;
    let mut diffs = Vec::new();
    for k in 0..lambdas.len() - 1 {
        let diff = lambdas[k] - lambdas[k + 1];
        diffs.push(diff);
        if diff < -1e-9 {
            nonneg = false;
        }
        if diff > 0.0 {
            xs.push(l_list[k]);
            ys.push(diff.ln());
        }
    }
    let (rate, r2, env_amp, envelope_ok) = if xs.len() >= 2 {
        let (slope, intercept, r2) = fit_line(&xs, &ys);
        let max_resid = xs
            .iter()
            .zip(ys.iter())
            .map(|(&x, &y)| y - (slope * x + intercept))
            .fold(f64::NEG_INFINITY, f64::max);
        let env = (intercept + max_resid).exp();
        let ok = diffs
            .iter()
            .zip(l_list.iter())
            .all(|(&d, &l)| d <= env * (slope * l).exp() * (1.0 + 1e-9) + 1e-15);
        (-slope, r2, env, ok)
    } else {
        (f64::NAN, f64::NAN, f64::NAN, false)
    };
    let pass = nonneg && rate > 0.0 && r2 >= 0.9 && envelope_ok;
    reports.push(LemmaReport {
        lemma: "neck-extension/fit".into(),
        inputs: format!("neck='{neck_label}', l={l_list:?}"),
        measured: vec![
            ("rate".into(), rate),
            ("r_squared".into(), r2),
            ("envelope_amplitude".into(), env_amp),
            ("nonnegative_differences".into(), if nonneg { 1.0 } else { 0.0 }),
            ("fit_points".into(), xs.len() as f64),
        ],
        pass,
        margin: if r2.is_finite() { r2 - 0.9 } else { -1.0 },
    });
    Ok(reports)
}

/// Continuity of λ in the pinch exponent: |λ(p+δ) − λ(p)| shrinks as δ does.
/// The observed direction of the change is reported but not asserted.
pub fn check_pinch_continuity(
    family: &PinchFamily,
    p: f64,
    deltas: &[f64],
    opts: &SolverOptions,
) -> Result<LemmaReport> {
    if !(p >= 0.0) {
        return Err(Error::InvalidParameter(format!("pinch exponent {p} must be nonnegative")));
    }
    if deltas.is_empty() || deltas.windows(2).any(|w| w[1] >= w[0]) || deltas.iter().any(|&d| d < 0.0)
    {
        return Err(Error::InvalidParameter(
            "deltas must be nonnegative and strictly decreasing".into(),
        ));
    }
    let base = minimize_log_sobolev(&family.apply(p)?, opts)?.lambda;
    let mut measured = vec![("lambda_p".into(), base)];
    let mut diffs = Vec::new();
    let mut monotone_lambda = true;
    for &d in deltas {
        let lam = if d == 0.0 {
            base
        } else {
            minimize_log_sobolev(&family.apply(p + d)?, opts)?.lambda
        };
        if lam > base + 1e-9 {
            monotone_lambda = false;
        }
        let diff = (lam - base).abs();
        measured.push((format!("diff_delta_{d}"), diff));
        diffs.push(diff);
    }
    let shrinking = diffs.windows(2).all(|w| w[1] <= w[0] + 1e-5);
    measured.push(("lambda_nonincreasing_in_p".into(), if monotone_lambda { 1.0 } else { 0.0 }));
    let margin = if diffs.len() >= 2 {
        diffs[0] - diffs[diffs.len() - 1]
    } else {
        0.0
    };
    Ok(LemmaReport {
        lemma: "pinch-continuity".into(),
        inputs: format!("p={p}, deltas={deltas:?}"),
        measured,
        pass: shrinking,
        margin,
    })
}

/// One report per line, JSON.
pub fn write_reports_jsonl(path: &Path, reports: &[LemmaReport]) -> Result<()> {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Summary CSV: lemma, params, pass, margin.
pub fn write_summary_csv(path: &Path, reports: &[LemmaReport]) -> Result<()> {
    let mut out = String::from("lemma,params,pass,margin\n");
    for r in reports {
        out.push_str(&format!(
            "{},\"{}\",{},{:.6e}\n",
            r.lemma,
            r.inputs.replace('"', "'"),
            r.pass,
            r.margin
        ));
    }
    fs::write(path, out)?;
    Ok(())
}
