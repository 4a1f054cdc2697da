//! The counterexample pipeline: neck-length selection, hand-bag components,
//! pinch-exponent root finding for the prescribed λ ladder, mirror assembly
//! of the glued chain, and the no-extremal certificate algebra.
//!
//! Component k is the surrogate hand-bag `Z_k ∪ X ∪ H ∪ Y_k`: two round
//! necks of length `l + k` around a core, with a flat-tube handle on top
//! whose fiber is pinched by `θ^{p_k}`. The exponents are chosen so the
//! ladder decrements are exactly 1 for the first step and `1/(k²+1)` after
//! that; the infimum of the infinite ladder is finite, is approached but
//! never attained, and the certificate turns that gap into the
//! contradiction `Σ m_k (λ_k − λ) > 0` for any unit mass split.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    chain, make_collar, make_core_surrogate, make_flat_tube, make_round_neck, BoundaryCondition,
    DomainChain, JunctionPolicy, PinchFamily,
};
use crate::solver::{minimize_log_sobolev, SolverOptions};

/// Bisection tolerance on |λ(p) − target|; safely inside the ladder budget.
pub const PINCH_TOL: f64 = 5e-5;

/// Hard cap on the pinch exponent during bracket doubling.
pub const PINCH_CAP: f64 = 64.0;

/// One component of the ladder.
#[derive(Debug, Clone)]
pub struct ComponentSpec {
    pub index: i32,
    pub neck_length: f64,
    pub pinch_exponent: f64,
    pub lambda: f64,
    pub residual: f64,
    pub chain: DomainChain,
    /// Global coordinates of the pinched handle.
    pub pinch_region: (f64, f64),
}

/// Serializable row of the ladder table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentRow {
    pub k: i32,
    pub neck_length: f64,
    pub p: f64,
    pub lambda: f64,
    pub residual: f64,
}

impl ComponentSpec {
    pub fn row(&self) -> ComponentRow {
        ComponentRow {
            k: self.index,
            neck_length: self.neck_length,
            p: self.pinch_exponent,
            lambda: self.lambda,
            residual: self.residual,
        }
    }
}

/// The no-extremal certificate: mass split, ladder, and the strictly
/// positive combination that contradicts extremality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub lambda_ladder: Vec<f64>,
    pub masses: Vec<f64>,
    /// `Σ m_k (λ_k − λ)` with λ the ladder infimum.
    pub contradiction_value: f64,
    /// Whether `1/(1+k²) − 20Ae^{2a}e^{−a(l+k)} > 0` for all supplied k.
    pub neck_budget_ok: bool,
}

/// Neck length from the decay constants:
///
/// ```text
/// l = max{ l0, (1/a) ln(1000 A e^{2a} / a²), (1/a) ln(1000 e^{2a} A), 2 }
/// ```
///
/// The returned value is post-checked against the budget
/// `20Ae^{2a}e^{−a(l+k)} ≤ 1/(2(1+k²))` for k = 0..50; a violation would
/// signal an arithmetic bug, not a data problem.
pub fn choose_neck_length(a: f64, amplitude: f64, l0: f64) -> Result<f64> {
    if !(a > 0.0 && amplitude > 0.0 && l0 > 0.0) {
        return Err(Error::InvalidParameter(
            "decay rate, amplitude and l0 must be positive".into(),
        ));
    }
    let t1 = (1000.0 * amplitude * (2.0 * a).exp() / (a * a)).ln() / a;
    let t2 = (1000.0 * (2.0 * a).exp() * amplitude).ln() / a;
    let l = l0.max(t1).max(t2).max(2.0);
    for k in 0..=50 {
        let kf = k as f64;
        let lhs = 20.0 * amplitude * (2.0 * a).exp() * (-a * (l + kf)).exp();
        let rhs = 1.0 / (2.0 * (1.0 + kf * kf));
        if lhs > rhs {
            return Err(Error::BudgetViolation(format!(
                "20Ae^{{2a}}e^{{-a(l+k)}} = {lhs:.3e} > {rhs:.3e} at k = {k}"
            )));
        }
    }
    Ok(l)
}

/// Build the hand-bag surrogate with neck length `neck_len`: necks `Z`/`Y`
/// around cores, with the length-4 flat-tube handle `H` bridged in by
/// collars. Returns the chain and the handle's global coordinate span.
pub fn handbag_chain(h: f64, neck_len: f64) -> Result<(DomainChain, (f64, f64))> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("scale h = {h} must be positive")));
    }
    if !(neck_len >= 2.0) {
        return Err(Error::InvalidParameter(format!("neck length {neck_len} below 2")));
    }
    let mut z = make_round_neck(h, 0.0, neck_len)?;
    z.label = "Z".into();
    let core_left = make_core_surrogate(h)?;
    let mut tube = make_flat_tube(h, -2.0, 2.0)?;
    tube.label = "H".into();
    let collar_in = make_collar(&core_left, &tube);
    let core_right = make_core_surrogate(h)?;
    let collar_out = make_collar(&tube, &core_right);
    let mut y = make_round_neck(h, 0.0, neck_len)?;
    y.label = "Y".into();

    let collar = collar_in.length();
    let h_start = neck_len + 2.0 + collar;
    let h_end = h_start + 4.0;
    let segments = vec![z, core_left, collar_in, tube, collar_out, core_right, y];
    let c = chain(
        segments,
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )?;
    Ok((c, (h_start, h_end)))
}

/// Pinch family of the hand-bag: the whole handle is the pinch region.
pub fn handbag_family(h: f64, neck_len: f64) -> Result<PinchFamily> {
    let (base, region) = handbag_chain(h, neck_len)?;
    PinchFamily::new(base, region)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PinchSolution {
    pub p: f64,
    pub lambda: f64,
}

pub(crate) fn find_pinch_exponent_detailed(
    family: &PinchFamily,
    target_lambda: f64,
    opts: &SolverOptions,
) -> Result<PinchSolution> {
    // all chains of the family share one grid layout, so evaluations after
    // the first warm-start from the previous extremal
    let mut warm: Option<Vec<f64>> = None;
    let mut eval = |p: f64| -> Result<f64> {
        let chain = family.apply(p)?;
        let res = match &warm {
            Some(init) => crate::solver::minimize_log_sobolev_from(&chain, opts, init)?,
            None => minimize_log_sobolev(&chain, opts)?,
        };
        warm = Some(res.extremal.values().to_vec());
        Ok(res.lambda)
    };
    let p_low = family.p;
    let lambda_low = eval(p_low)?;
    if (lambda_low - target_lambda).abs() <= PINCH_TOL {
        return Ok(PinchSolution { p: p_low, lambda: lambda_low });
    }
    if lambda_low < target_lambda {
        return Err(Error::BracketFailure(format!(
            "λ(p={p_low}) = {lambda_low:.6} already below target {target_lambda:.6}"
        )));
    }
    // double p until λ drops below the target; λ(p) → −∞ guarantees a
    // bracket exists, the cap catches misconfiguration
    let mut p_high = if p_low > 0.0 { 2.0 * p_low } else { 1.0 };
    let mut lambda_high = eval(p_high)?;
    while lambda_high > target_lambda {
        p_high *= 2.0;
        if p_high > PINCH_CAP {
            return Err(Error::BracketFailure(format!(
                "no sign change up to p = {PINCH_CAP}; λ = {lambda_high:.6} vs target {target_lambda:.6}"
            )));
        }
        lambda_high = eval(p_high)?;
    }
    let mut lo = p_low;
    let mut hi = p_high;
    let mut best = PinchSolution { p: p_high, lambda: lambda_high };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let lam = eval(mid)?;
        if (lam - target_lambda).abs() < (best.lambda - target_lambda).abs() {
            best = PinchSolution { p: mid, lambda: lam };
        }
        if (lam - target_lambda).abs() <= PINCH_TOL {
            return Ok(PinchSolution { p: mid, lambda: lam });
        }
        // non-monotone noise: always keep the bracket of the last sign change
        if lam > target_lambda {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(best)
}

/// Pinch exponent p with `|λ(family at p) − target_lambda| ≤ 5·10⁻⁵`, found
/// by bisection from the family's anchor exponent, with bracket growth by
/// doubling.
pub fn find_pinch_exponent(
    family: &PinchFamily,
    target_lambda: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    find_pinch_exponent_detailed(family, target_lambda, opts).map(|s| s.p)
}

/// Build components k = 0..K with neck lengths `l + k` and pinch exponents
/// matching the ladder decrements: 1 for k = 0→1, then `1/(k²+1)`.
pub fn build_component_sequence(
    k_max: usize,
    h: f64,
    l: f64,
    opts: &SolverOptions,
) -> Result<Vec<ComponentSpec>> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("need K ≥ 1".into()));
    }
    let (chain0, region0) = handbag_chain(h, l)?;
    let res0 = minimize_log_sobolev(&chain0, opts)?;
    if res0.lambda >= 0.0 {
        return Err(Error::PinchPrecondition(format!(
            "λ(Ω₀) = {:.6} ≥ 0; use a smaller h",
            res0.lambda
        )));
    }
    let mut components = vec![ComponentSpec {
        index: 0,
        neck_length: l,
        pinch_exponent: 0.0,
        lambda: res0.lambda,
        residual: res0.residual,
        chain: chain0,
        pinch_region: region0,
    }];
    for k in 1..=k_max {
        let prev = components.last().unwrap();
        let decrement = if k == 1 { 1.0 } else { 1.0 / (((k - 1) * (k - 1)) as f64 + 1.0) };
        let target = prev.lambda - decrement;
        let mut family = handbag_family(h, l + k as f64)?;
        family.p = prev.pinch_exponent;
        let sol = find_pinch_exponent_detailed(&family, target, opts)?;
        if sol.p < prev.pinch_exponent - 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "pinch exponent decreased: p_{k} = {} < p_{} = {}",
                sol.p,
                k - 1,
                prev.pinch_exponent
            )));
        }
        // authoritative λ from a full multi-start solve at the chosen p
        let pinched = family.apply(sol.p)?;
        let res = minimize_log_sobolev(&pinched, opts)?;
        if (res.lambda - target).abs() > 1e-4 {
            return Err(Error::BracketFailure(format!(
                "λ(p_{k}) = {:.8} misses ladder target {:.8} after full solve",
                res.lambda, target
            )));
        }
        components.push(ComponentSpec {
            index: k as i32,
            neck_length: l + k as f64,
            pinch_exponent: sol.p,
            lambda: res.lambda,
            residual: res.residual,
            chain: pinched,
            pinch_region: family.pinch_region,
        });
    }
    Ok(components)
}

/// Glue components −K..K into one chain: mirror copies for negative k, the
/// right end of each `Y_k` pasted to the left end of `Z_{k+1}`, Dirichlet
/// truncation ends.
pub fn assemble_counterexample(components: &[ComponentSpec], k: usize) -> Result<DomainChain> {
    if components.len() <= k {
        return Err(Error::InvalidParameter(format!(
            "need components 0..={k}, got {}",
            components.len()
        )));
    }
    let mut segments = Vec::new();
    for idx in -(k as i32)..=(k as i32) {
        let comp = &components[idx.unsigned_abs() as usize];
        let part = if idx < 0 { comp.chain.reflected()? } else { comp.chain.clone() };
        for seg in part.segments() {
            let mut s = seg.clone();
            s.label = format!("{}[{idx}]", seg.label);
            segments.push(s);
        }
    }
    chain(
        segments,
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Dirichlet,
        JunctionPolicy::Continuous,
    )
}

/// The certificate: for masses `m_k ≥ 0` summing to 1 and λ the ladder
/// infimum (`lambda_inf` when supplied, otherwise the minimum of the list),
///
/// ```text
/// contradiction_value = Σ m_k (λ_k − λ),
/// ```
///
/// strictly positive whenever mass sits on entries above the infimum. The
/// budget flag checks `1/(1+k²) − 20Ae^{2a}e^{−a(l+|k|)} > 0` termwise.
pub fn no_extremal_certificate(
    lambda_ladder: &[f64],
    masses: &[f64],
    a: f64,
    amplitude: f64,
    l: f64,
    lambda_inf: Option<f64>,
) -> Result<Certificate> {
    if lambda_ladder.is_empty() {
        return Err(Error::InvalidParameter("empty ladder".into()));
    }
    if masses.len() != lambda_ladder.len() {
        return Err(Error::InvalidDistribution(format!(
            "{} masses for {} ladder entries",
            masses.len(),
            lambda_ladder.len()
        )));
    }
    if masses.iter().any(|&m| m < 0.0) {
        return Err(Error::InvalidDistribution("negative mass".into()));
    }
    let total: f64 = masses.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("masses sum to {total}, expected 1")));
    }
    let inf = lambda_inf
        .unwrap_or_else(|| lambda_ladder.iter().cloned().fold(f64::INFINITY, f64::min));
    if lambda_ladder.iter().any(|&lam| lam < inf - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "ladder entry below the claimed infimum {inf}"
        )));
    }
    let contradiction_value: f64 =
        masses.iter().zip(lambda_ladder).map(|(&m, &lam)| m * (lam - inf)).sum();
    let neck_budget_ok = (0..lambda_ladder.len()).all(|k| {
        let kf = k as f64;
        1.0 / (1.0 + kf * kf) - 20.0 * amplitude * (2.0 * a).exp() * (-a * (l + kf)).exp() > 0.0
    });
    Ok(Certificate {
        lambda_ladder: lambda_ladder.to_vec(),
        masses: masses.to_vec(),
        contradiction_value,
        neck_budget_ok,
    })
}

/// Infimum of the functional over a disjoint union: the minimum of the
/// component values (any competitor splits mass, and splitting only adds
/// the nonnegative `−Σ m ln m` terms).
pub fn disconnected_infimum(component_lambdas: &[f64]) -> Result<f64> {
    if component_lambdas.is_empty() {
        return Err(Error::InvalidParameter("no components".into()));
    }
    Ok(component_lambdas.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Ladder table CSV: `k, neck_length, p_k, lambda_k`.
pub fn write_ladder_csv(path: &Path, rows: &[ComponentRow]) -> Result<()> {
    let mut out = String::from("k,neck_length,p,lambda\n");
    for r in rows {
        out.push_str(&format!("{},{:.17e},{:.17e},{:.17e}\n", r.k, r.neck_length, r.p, r.lambda));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parse a ladder CSV produced by [`write_ladder_csv`].
pub fn read_ladder_csv(path: &Path) -> Result<Vec<ComponentRow>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if ln == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("ladder line {}: expected 4 fields", ln + 1)));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|e| Error::Parse(format!("ladder line {}: {e}", ln + 1)))
        };
        rows.push(ComponentRow {
            k: fields[0]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("ladder line {}: {e}", ln + 1)))?,
            neck_length: parse(fields[1])?,
            p: parse(fields[2])?,
            lambda: parse(fields[3])?,
            residual: 0.0,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse("ladder CSV has no data rows".into()));
    }
    Ok(rows)
}
