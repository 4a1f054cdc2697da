//! Symmetry-reduced model geometries.
//!
//! Every domain is a weighted interval problem: a product 3-manifold whose
//! metric only varies along the longitudinal coordinate reduces, for
//! fiber-constant candidate functions, to a 1D problem with
//!
//! * a weight density `w(x)` equal to the 2D fiber volume, and
//! * a scalar-curvature function `R(x)`.
//!
//! The fiber cross sections are round 2-spheres (curvature normalized to
//! `1/h²`), flat 2-tori, or points. Chains of segments model necks, tubes,
//! hand-bags, and their glued unions; the computed λ of a chain is an upper
//! bound for the λ of the full product domain because fiber-constant
//! functions are a subfamily of all candidates (and genuine solutions of the
//! Euler-Lagrange equation on exact product pieces).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for weight continuity at junctions under
/// [`JunctionPolicy::Continuous`].
pub const JUNCTION_RTOL: f64 = 1e-9;

/// Length of the smooth interpolation collars inserted by
/// [`chain_with_collars`]. The exact collar shape is a choice (the underlying
/// smoothing construction is only described as "standard"); we use a quintic
/// ramp so weight and curvature are C² at both collar ends.
pub const COLLAR_LENGTH: f64 = 0.2;

/// Quintic smoothstep: C² monotone map of [0,1] onto [0,1] with vanishing
/// first and second derivatives at both ends.
pub(crate) fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

/// Cross-section kind of a product segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberKind {
    /// Round 2-sphere `h²S²`.
    Sphere2,
    /// Flat 2-torus `h²(S¹×S¹)`.
    Torus2,
    /// Point fiber (plain weighted line with unit weight).
    Point,
}

/// The 2D cross-section of a product segment: kind plus length scale `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberProfile {
    pub kind: FiberKind,
    /// Length scale; `None` for the point fiber.
    pub scale: Option<f64>,
}

impl FiberProfile {
    pub fn sphere2(h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("sphere2 scale h = {h} must be positive")));
        }
        Ok(Self { kind: FiberKind::Sphere2, scale: Some(h) })
    }

    pub fn torus2(h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("torus2 scale h = {h} must be positive")));
        }
        Ok(Self { kind: FiberKind::Torus2, scale: Some(h) })
    }

    pub fn point() -> Self {
        Self { kind: FiberKind::Point, scale: None }
    }

    /// Fiber volume: `4πh²` for the sphere, `4π²h²` for the torus (two unit
    /// circles scaled by h), `1` for the point fiber.
    pub fn volume(&self) -> f64 {
        match self.kind {
            FiberKind::Sphere2 => 4.0 * std::f64::consts::PI * self.h2(),
            FiberKind::Torus2 => 4.0 * std::f64::consts::PI.powi(2) * self.h2(),
            FiberKind::Point => 1.0,
        }
    }

    /// Scalar curvature of the product along this fiber. The round metric on
    /// `h²S²` carries the normalization `R = 1/h²`; tori and points are flat.
    pub fn curvature(&self) -> f64 {
        match self.kind {
            FiberKind::Sphere2 => 1.0 / self.h2(),
            FiberKind::Torus2 | FiberKind::Point => 0.0,
        }
    }

    fn h2(&self) -> f64 {
        let h = self.scale.expect("scaled fiber");
        h * h
    }
}

/// Smooth pinch profile θ for a coordinate region `[a, b]`: equal to 1
/// outside, 1/2 on the middle third, quintic ramps on the outer thirds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    pub a: f64,
    pub b: f64,
}

impl Theta {
    pub fn eval(&self, x: f64) -> f64 {
        let third = (self.b - self.a) / 3.0;
        if x <= self.a || x >= self.b {
            1.0
        } else if x < self.a + third {
            1.0 - 0.5 * smoothstep((x - self.a) / third)
        } else if x <= self.b - third {
            0.5
        } else {
            1.0 - 0.5 * smoothstep((self.b - x) / third)
        }
    }
}

/// How a segment's weight and curvature vary along its length.
#[derive(Debug, Clone, PartialEq)]
pub enum SegmentProfile {
    /// Constant fiber cross-section.
    Uniform { fiber: FiberProfile },
    /// Core surrogate: fixed length-2 piece whose weight and curvature ramp
    /// from round-neck data `(4πh², 1/h²)` at both ends to unit-sphere bulk
    /// data `(4π, 1)` in the middle.
    Core { h: f64 },
    /// Interpolation collar blending `(w0, r0)` into `(w1, r1)` with a
    /// quintic ramp over `len`.
    Blend { w0: f64, r0: f64, w1: f64, r1: f64, len: f64 },
    /// Flat-torus tube pinched by `θ(x)^p` on the fiber area. `theta` lives
    /// in segment-local coordinates; its region may extend past the segment.
    Pinched { h: f64, theta: Theta, p: f64 },
}

/// One interval of a chain: positive weight density and scalar curvature on
/// `[0, length]` in local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub label: String,
    length: f64,
    /// Offset into the profile's own coordinate; nonzero for slices.
    origin: f64,
    /// Traverse the profile right-to-left (mirror image).
    reversed: bool,
    profile: SegmentProfile,
}

impl Segment {
    pub fn new(label: impl Into<String>, length: f64, profile: SegmentProfile) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::InvalidParameter(format!("segment length {length} must be positive")));
        }
        Ok(Self { label: label.into(), length, origin: 0.0, reversed: false, profile })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn profile(&self) -> &SegmentProfile {
        &self.profile
    }

    /// Map local coordinate to the profile's own coordinate.
    fn profile_coord(&self, x: f64) -> f64 {
        if self.reversed {
            self.origin + (self.length - x)
        } else {
            self.origin + x
        }
    }

    /// Weight density at local coordinate `x ∈ [0, length]`.
    pub fn weight(&self, x: f64) -> f64 {
        let u = self.profile_coord(x);
        match &self.profile {
            SegmentProfile::Uniform { fiber } => fiber.volume(),
            SegmentProfile::Core { h } => {
                let neck = 4.0 * std::f64::consts::PI * h * h;
                let bulk = 4.0 * std::f64::consts::PI;
                let t = smoothstep(u.min(2.0 - u));
                neck + (bulk - neck) * t
            }
            SegmentProfile::Blend { w0, w1, len, .. } => {
                let t = smoothstep(u / len);
                w0 + (w1 - w0) * t
            }
            SegmentProfile::Pinched { h, theta, p } => {
                let base = 4.0 * std::f64::consts::PI.powi(2) * h * h;
                base * theta.eval(u).powf(*p)
            }
        }
    }

    /// Scalar curvature at local coordinate `x ∈ [0, length]`.
    pub fn curvature(&self, x: f64) -> f64 {
        let u = self.profile_coord(x);
        match &self.profile {
            SegmentProfile::Uniform { fiber } => fiber.curvature(),
            SegmentProfile::Core { h } => {
                let neck = 1.0 / (h * h);
                let t = smoothstep(u.min(2.0 - u));
                neck + (1.0 - neck) * t
            }
            SegmentProfile::Blend { r0, r1, len, .. } => {
                let t = smoothstep(u / len);
                r0 + (r1 - r0) * t
            }
            SegmentProfile::Pinched { .. } => 0.0,
        }
    }

    /// Exact lower bound of the curvature over the segment (all profiles are
    /// monotone between their endpoint/midpoint data).
    pub fn min_curvature(&self) -> f64 {
        match &self.profile {
            SegmentProfile::Uniform { fiber } => fiber.curvature(),
            SegmentProfile::Core { h } => (1.0 / (h * h)).min(1.0),
            SegmentProfile::Blend { r0, r1, .. } => r0.min(*r1),
            SegmentProfile::Pinched { .. } => 0.0,
        }
    }

    /// Sub-segment `[from, to]` in local coordinates.
    pub fn slice(&self, from: f64, to: f64) -> Result<Segment> {
        if !(from >= -1e-12 && to <= self.length + 1e-12 && to > from) {
            return Err(Error::OutOfRange(format!(
                "slice [{from}, {to}] outside segment of length {}",
                self.length
            )));
        }
        let origin = if self.reversed {
            self.origin + (self.length - to)
        } else {
            self.origin + from
        };
        Ok(Segment {
            label: self.label.clone(),
            length: to - from,
            origin,
            reversed: self.reversed,
            profile: self.profile.clone(),
        })
    }

    /// Mirror image: same data traversed in the opposite direction.
    pub fn reflected(&self) -> Segment {
        Segment {
            label: self.label.clone(),
            length: self.length,
            origin: self.origin,
            reversed: !self.reversed,
            profile: self.profile.clone(),
        }
    }
}

/// Boundary condition at a chain end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Periodic,
}

/// Whether adjacent segments must match in weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JunctionPolicy {
    Continuous,
    KinkAllowed,
}

/// Ordered sequence of segments with end boundary conditions; the global
/// coordinate is cumulative arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainChain {
    segments: Vec<Segment>,
    starts: Vec<f64>,
    total_length: f64,
    pub left_bc: BoundaryCondition,
    pub right_bc: BoundaryCondition,
    pub junction_policy: JunctionPolicy,
    hash: u64,
}

impl DomainChain {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Global start coordinate of segment `i`.
    pub fn segment_start(&self, i: usize) -> f64 {
        self.starts[i]
    }

    pub fn is_periodic(&self) -> bool {
        self.left_bc == BoundaryCondition::Periodic
    }

    /// Stable hash of the sampled geometry; used to bind exported fields to
    /// the domain they were computed on.
    pub fn domain_hash(&self) -> u64 {
        self.hash
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let x = x.clamp(0.0, self.total_length);
        // binary search over starts
        let mut i = match self.starts.binary_search_by(|s| s.partial_cmp(&x).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        if i >= self.segments.len() {
            i = self.segments.len() - 1;
        }
        (i, x - self.starts[i])
    }

    pub fn weight_at(&self, x: f64) -> f64 {
        let (i, xl) = self.locate(x);
        self.segments[i].weight(xl)
    }

    pub fn curvature_at(&self, x: f64) -> f64 {
        let (i, xl) = self.locate(x);
        self.segments[i].curvature(xl)
    }

    pub fn min_curvature(&self) -> f64 {
        self.segments.iter().map(Segment::min_curvature).fold(f64::INFINITY, f64::min)
    }

    /// First segment whose label matches, with its global coordinate span.
    pub fn find_segment(&self, label: &str) -> Option<(usize, f64, f64)> {
        self.segments.iter().enumerate().find(|(_, s)| s.label == label).map(|(i, s)| {
            (i, self.starts[i], self.starts[i] + s.length())
        })
    }

    /// Dirichlet sub-chain over the global coordinate window `[from, to]`.
    pub fn sub_chain(&self, from: f64, to: f64) -> Result<DomainChain> {
        if !(from >= -1e-12 && to <= self.total_length + 1e-12 && to > from) {
            return Err(Error::OutOfRange(format!(
                "window [{from}, {to}] outside chain of length {}",
                self.total_length
            )));
        }
        let mut parts = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            let s0 = self.starts[i];
            let s1 = s0 + seg.length();
            let lo = from.max(s0);
            let hi = to.min(s1);
            if hi - lo > 1e-12 {
                parts.push(seg.slice(lo - s0, hi - s0)?);
            }
        }
        chain(parts, BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet, self.junction_policy)
    }

    /// Mirror image of the whole chain (segments reversed and reflected,
    /// boundary conditions swapped).
    pub fn reflected(&self) -> Result<DomainChain> {
        let segs: Vec<Segment> = self.segments.iter().rev().map(Segment::reflected).collect();
        chain(segs, self.right_bc, self.left_bc, self.junction_policy)
    }

    /// New chain with the labeled uniform segment's length replaced.
    pub fn with_segment_length(&self, label: &str, new_len: f64) -> Result<DomainChain> {
        if !(new_len > 0.0) {
            return Err(Error::InvalidParameter(format!("length {new_len} must be positive")));
        }
        let mut segs = self.segments.clone();
        let idx = segs
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownSegment(label.to_string()))?;
        match segs[idx].profile {
            SegmentProfile::Uniform { .. } => {
                segs[idx].length = new_len;
            }
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "segment '{label}' is not a uniform segment"
                )))
            }
        }
        chain(segs, self.left_bc, self.right_bc, self.junction_policy)
    }
}

fn fnv1a(bytes: &[u8], mut hash: u64) -> u64 {
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn hash_chain(segments: &[Segment], left: BoundaryCondition, right: BoundaryCondition) -> u64 {
    let mut h = 0xcbf29ce484222325;
    h = fnv1a(&[left as u8, right as u8], h);
    for seg in segments {
        h = fnv1a(seg.label.as_bytes(), h);
        h = fnv1a(&seg.length.to_bits().to_le_bytes(), h);
        // sample the profile at a few interior points
        for k in 0..5 {
            let x = seg.length * (k as f64 + 0.5) / 5.0;
            h = fnv1a(&seg.weight(x).to_bits().to_le_bytes(), h);
            h = fnv1a(&seg.curvature(x).to_bits().to_le_bytes(), h);
        }
    }
    h
}

/// Round neck `h²S² × [A, B]`: constant weight `4πh²`, curvature `1/h²`.
pub fn make_round_neck(h: f64, a: f64, b: f64) -> Result<Segment> {
    if !(b > a) {
        return Err(Error::InvalidParameter(format!("empty interval [{a}, {b}]")));
    }
    Segment::new("neck", b - a, SegmentProfile::Uniform { fiber: FiberProfile::sphere2(h)? })
}

/// Flat tube `h²(S¹×S¹) × [A, B]`: constant weight `4π²h²`, zero curvature.
pub fn make_flat_tube(h: f64, a: f64, b: f64) -> Result<Segment> {
    if !(b > a) {
        return Err(Error::InvalidParameter(format!("empty interval [{a}, {b}]")));
    }
    Segment::new("tube", b - a, SegmentProfile::Uniform { fiber: FiberProfile::torus2(h)? })
}

/// Point-fiber interval `[A, B]`: unit weight, zero curvature.
pub fn make_line(a: f64, b: f64) -> Result<Segment> {
    if !(b > a) {
        return Err(Error::InvalidParameter(format!("empty interval [{a}, {b}]")));
    }
    Segment::new("line", b - a, SegmentProfile::Uniform { fiber: FiberProfile::point() })
}

/// 1D stand-in for the hand-bag core: a fixed length-2 segment matching
/// round-neck weight `4πh²` and curvature `1/h²` exactly at both ends and
/// interpolating smoothly to unit-sphere bulk data `(4π, 1)` in the middle.
pub fn make_core_surrogate(h: f64) -> Result<Segment> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("core scale h = {h} must be positive")));
    }
    Segment::new("core", 2.0, SegmentProfile::Core { h })
}

/// Smooth collar of length [`COLLAR_LENGTH`] blending the end data of `left`
/// into the start data of `right`.
pub fn make_collar(left: &Segment, right: &Segment) -> Segment {
    let w0 = left.weight(left.length());
    let r0 = left.curvature(left.length());
    let w1 = right.weight(0.0);
    let r1 = right.curvature(0.0);
    Segment {
        label: "collar".into(),
        length: COLLAR_LENGTH,
        origin: 0.0,
        reversed: false,
        profile: SegmentProfile::Blend { w0, r0, w1, r1, len: COLLAR_LENGTH },
    }
}

/// Assemble segments into a chain, checking junction continuity under the
/// chosen policy.
pub fn chain(
    segments: Vec<Segment>,
    left_bc: BoundaryCondition,
    right_bc: BoundaryCondition,
    junction_policy: JunctionPolicy,
) -> Result<DomainChain> {
    if segments.is_empty() {
        return Err(Error::InvalidParameter("chain needs at least one segment".into()));
    }
    if (left_bc == BoundaryCondition::Periodic) != (right_bc == BoundaryCondition::Periodic) {
        return Err(Error::InvalidParameter(
            "periodic requires both ends periodic".into(),
        ));
    }
    if junction_policy == JunctionPolicy::Continuous {
        let mismatch = |wl: f64, wr: f64| {
            let scale = wl.abs().max(wr.abs()).max(f64::MIN_POSITIVE);
            (wl - wr).abs() > JUNCTION_RTOL * scale
        };
        for pair in segments.windows(2) {
            let wl = pair[0].weight(pair[0].length());
            let wr = pair[1].weight(0.0);
            if mismatch(wl, wr) {
                return Err(Error::JunctionMismatch(format!(
                    "weight jump {wl} -> {wr} between '{}' and '{}'",
                    pair[0].label, pair[1].label
                )));
            }
        }
        if left_bc == BoundaryCondition::Periodic {
            let last = segments.last().unwrap();
            let wl = last.weight(last.length());
            let wr = segments[0].weight(0.0);
            if mismatch(wl, wr) {
                return Err(Error::JunctionMismatch(format!(
                    "weight jump {wl} -> {wr} across the periodic wrap"
                )));
            }
        }
    }
    let mut starts = Vec::with_capacity(segments.len());
    let mut acc = 0.0;
    for seg in &segments {
        starts.push(acc);
        acc += seg.length();
    }
    let hash = hash_chain(&segments, left_bc, right_bc);
    Ok(DomainChain {
        segments,
        starts,
        total_length: acc,
        left_bc,
        right_bc,
        junction_policy,
        hash,
    })
}

/// Like [`chain`], but inserts smooth blend collars wherever adjacent
/// segments disagree in weight or curvature.
pub fn chain_with_collars(
    segments: Vec<Segment>,
    left_bc: BoundaryCondition,
    right_bc: BoundaryCondition,
) -> Result<DomainChain> {
    let mut out: Vec<Segment> = Vec::with_capacity(2 * segments.len());
    for seg in segments {
        if let Some(prev) = out.last() {
            let wl = prev.weight(prev.length());
            let wr = seg.weight(0.0);
            let rl = prev.curvature(prev.length());
            let rr = seg.curvature(0.0);
            let scale = wl.abs().max(wr.abs()).max(f64::MIN_POSITIVE);
            if (wl - wr).abs() > JUNCTION_RTOL * scale || (rl - rr).abs() > 1e-9 * (1.0 + rl.abs().max(rr.abs())) {
                out.push(make_collar(prev, &seg));
            }
        }
        out.push(seg);
    }
    chain(out, left_bc, right_bc, JunctionPolicy::Continuous)
}

/// Family of chains obtained from `base` by scaling the torus-fiber area by
/// `θ(x)^p` on `pinch_region` (global coordinates).
#[derive(Debug, Clone)]
pub struct PinchFamily {
    pub base: DomainChain,
    pub pinch_region: (f64, f64),
    /// Exponent the family is currently anchored at; used as the lower
    /// bracket by the pinch root finder.
    pub p: f64,
}

impl PinchFamily {
    pub fn new(base: DomainChain, pinch_region: (f64, f64)) -> Result<Self> {
        let (a, b) = pinch_region;
        if !(b > a && a >= -1e-12 && b <= base.total_length() + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "pinch region [{a}, {b}] outside chain of length {}",
                base.total_length()
            )));
        }
        // every point of the region must lie in a torus2 uniform segment
        for (i, seg) in base.segments.iter().enumerate() {
            let s0 = base.starts[i];
            let s1 = s0 + seg.length();
            if s1 <= a + 1e-12 || s0 >= b - 1e-12 {
                continue;
            }
            match seg.profile() {
                SegmentProfile::Uniform { fiber } if fiber.kind == FiberKind::Torus2 => {}
                _ => {
                    return Err(Error::UnsupportedPinch(format!(
                        "pinch region overlaps non-torus segment '{}'",
                        seg.label
                    )))
                }
            }
        }
        Ok(Self { base, pinch_region, p: 0.0 })
    }

    /// θ at a global coordinate.
    pub fn theta(&self, x: f64) -> f64 {
        Theta { a: self.pinch_region.0, b: self.pinch_region.1 }.eval(x)
    }

    /// Chain with the pinch applied at exponent `p`. At `p = 0` the base
    /// chain is returned unchanged.
    pub fn apply(&self, p: f64) -> Result<DomainChain> {
        if !(p >= 0.0) {
            return Err(Error::InvalidParameter(format!("pinch exponent {p} must be nonnegative")));
        }
        if p == 0.0 {
            return Ok(self.base.clone());
        }
        let (a, b) = self.pinch_region;
        let mut segs = Vec::with_capacity(self.base.segments.len());
        for (i, seg) in self.base.segments.iter().enumerate() {
            let s0 = self.base.starts[i];
            let s1 = s0 + seg.length();
            if s1 <= a + 1e-12 || s0 >= b - 1e-12 {
                segs.push(seg.clone());
                continue;
            }
            let h = match seg.profile() {
                SegmentProfile::Uniform { fiber } if fiber.kind == FiberKind::Torus2 => {
                    fiber.scale.unwrap()
                }
                _ => unreachable!("validated at construction"),
            };
            segs.push(Segment {
                label: seg.label.clone(),
                length: seg.length(),
                origin: 0.0,
                reversed: false,
                profile: SegmentProfile::Pinched {
                    h,
                    theta: Theta { a: a - s0, b: b - s0 },
                    p,
                },
            });
        }
        chain(segs, self.base.left_bc, self.base.right_bc, self.base.junction_policy)
    }
}

/// Apply the pinch of `family` at exponent `p`.
pub fn apply_pinch(family: &PinchFamily, p: f64) -> Result<DomainChain> {
    family.apply(p)
}

/// Disjoint union of chains: components are fully independent.
#[derive(Debug, Clone)]
pub struct DisconnectedDomain {
    pub components: Vec<DomainChain>,
}

/// Store chains as independent components of a disconnected domain.
pub fn disjoint_union(domains: Vec<DomainChain>) -> Result<DisconnectedDomain> {
    if domains.is_empty() {
        return Err(Error::InvalidParameter("disjoint union of zero components".into()));
    }
    Ok(DisconnectedDomain { components: domains })
}

// ---------------------------------------------------------------------------
// JSON domain-spec format
// ---------------------------------------------------------------------------

/// One segment of the JSON domain spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub profile: FiberKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinchSpec {
    pub region: [f64; 2],
    pub p: f64,
}

/// JSON description of a domain: constant-profile segments, boundary
/// conditions, optional pinch. Round-trips losslessly through serde.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub segments: Vec<SegmentSpec>,
    pub left_bc: BoundaryCondition,
    pub right_bc: BoundaryCondition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinch: Option<PinchSpec>,
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("domain spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("domain spec serializes")
    }

    /// Build the chain this spec describes (pinch applied if present).
    pub fn build(&self) -> Result<DomainChain> {
        let mut segs = Vec::with_capacity(self.segments.len());
        for (i, s) in self.segments.iter().enumerate() {
            let mut seg = match s.profile {
                FiberKind::Sphere2 => make_round_neck(
                    s.h.ok_or_else(|| Error::Parse(format!("segment {i}: sphere2 needs h")))?,
                    s.a,
                    s.b,
                )?,
                FiberKind::Torus2 => make_flat_tube(
                    s.h.ok_or_else(|| Error::Parse(format!("segment {i}: torus2 needs h")))?,
                    s.a,
                    s.b,
                )?,
                FiberKind::Point => make_line(s.a, s.b)?,
            };
            if let Some(label) = &s.label {
                seg.label = label.clone();
            }
            segs.push(seg);
        }
        let base = chain(segs, self.left_bc, self.right_bc, JunctionPolicy::KinkAllowed)?;
        match &self.pinch {
            None => Ok(base),
            Some(p) => PinchFamily::new(base, (p.region[0], p.region[1]))?.apply(p.p),
        }
    }
}

impl fmt::Display for DomainChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chain[")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}({:.3})", s.label, s.length())?;
        }
        write!(f, "] {:?}/{:?}", self.left_bc, self.right_bc)
    }
}
