//! The quadratic term `Q(R)` in a Berger frame, the polygon optimization of
//! `q(x, z) = x² + z² + 4xz`, the sign thresholds, and pointwise certificates.
//!
//! After normalizing `K_max = 1` and writing `δ = -K_min`, Berger's
//! inequalities confine the mixed components to a parallelogram. At a minimum
//! point the relevant pair is `(x, z) = (R_0123, R_0231)` in
//!
//! ```text
//! D(δ):  |x - z| <= 2 - δ,   |x + 2z| <= 2δ - 1
//! ```
//!
//! and at a maximum point it is `(y, z) = (R_0312, R_0231)` in
//!
//! ```text
//! D'(δ): |y + 2z| <= 2 - δ,  |z - y| <= 2δ - 1
//! ```

use serde::Serialize;

use crate::curvature::{conjugate, q_tensor, ricci, Riemann4};
use crate::error::{Error, Result};
use crate::grassmann::{
    berger_frame_with, extremize_sectional_with, BergerConfig, BergerReport, ExtremaReport,
};
use crate::Tolerances;

/// Slack allowed when tagging a candidate as inside a region.
pub const INSIDE_TOL: f64 = 1e-12;

pub fn q_value(x: f64, z: f64) -> f64 {
    x * x + z * z + 4.0 * x * z
}

/// `½ Q(R)_0303` in a Berger frame.
pub fn half_q0303_frame(k01: f64, k03: f64, lambda: f64, x: f64, z: f64) -> f64 {
    k03 * k03 + 2.0 * (lambda - k03) * k01 - 2.0 * k01 * k01 + q_value(x, z)
}

/// `½ Q(R)_0101` in a Berger frame of a Ricci-flat tensor.
pub fn half_q0101_frame(k01: f64, k03: f64, y: f64, z: f64) -> f64 {
    k01 * k01 - 2.0 * k01 * k03 - 2.0 * k03 * k03 + q_value(y, z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    Vertex,
    EdgeCritical,
    /// The origin, the only stationary point of `q`; never a strict extremum.
    InteriorStationary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub label: &'static str,
    pub kind: CandidateKind,
    pub point: [f64; 2],
    pub value: f64,
    pub inside: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `|x - z| <= 2 - δ`, `|x + 2z| <= 2δ - 1` in `(x, z)`.
    MinPoint,
    /// `|y + 2z| <= 2 - δ`, `|z - y| <= 2δ - 1` in `(y, z)`.
    MaxPoint,
}

impl Region {
    /// The two slab constraints `|n·p| <= b`.
    fn slabs(self, delta: f64) -> [([f64; 2], f64); 2] {
        match self {
            Region::MinPoint => [([1.0, -1.0], 2.0 - delta), ([1.0, 2.0], 2.0 * delta - 1.0)],
            Region::MaxPoint => [([1.0, 2.0], 2.0 - delta), ([-1.0, 1.0], 2.0 * delta - 1.0)],
        }
    }

    pub fn contains(self, delta: f64, p: [f64; 2], tol: f64) -> bool {
        self.slabs(delta)
            .iter()
            .all(|(n, b)| (n[0] * p[0] + n[1] * p[1]).abs() <= b + tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonExtrema {
    pub delta: f64,
    pub region: Region,
    pub vertices: [[f64; 2]; 4],
    pub candidates: Vec<Candidate>,
    pub q_min: f64,
    pub argmin: Vec<[f64; 2]>,
    pub q_max: f64,
    pub argmax: Vec<[f64; 2]>,
    /// The region has collapsed to a segment (`δ = 1/2` or `δ = 2`).
    pub degenerate: bool,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.5..=2.0).contains(&delta) || !delta.is_finite() {
        return Err(Error::DegenerateRegion { delta });
    }
    Ok(())
}

fn vertex(label: &'static str, p: [f64; 2]) -> Candidate {
    Candidate {
        label,
        kind: CandidateKind::Vertex,
        point: p,
        value: q_value(p[0], p[1]),
        inside: true,
    }
}

fn tagged(region: Region, delta: f64, label: &'static str, kind: CandidateKind, p: [f64; 2]) -> Candidate {
    Candidate {
        label,
        kind,
        point: p,
        value: q_value(p[0], p[1]),
        inside: region.contains(delta, p, INSIDE_TOL),
    }
}

fn neg(p: [f64; 2]) -> [f64; 2] {
    [-p[0], -p[1]]
}

/// Vertices of `D(δ)`: `p1 = (1, δ-1)`, `p2 = -p1`, `p3 = ((4δ-5)/3, (δ+1)/3)`, `p4 = -p3`.
pub fn min_region_vertices(delta: f64) -> [[f64; 2]; 4] {
    let p1 = [1.0, delta - 1.0];
    let p3 = [(4.0 * delta - 5.0) / 3.0, (delta + 1.0) / 3.0];
    [p1, neg(p1), p3, neg(p3)]
}

/// Vertices of `D'(δ)`: `r1 = ((4-5δ)/3, (1+δ)/3)`, `r2 = (δ, 1-δ)` and negatives.
pub fn max_region_vertices(delta: f64) -> [[f64; 2]; 4] {
    let r1 = [(4.0 - 5.0 * delta) / 3.0, (1.0 + delta) / 3.0];
    let r2 = [delta, 1.0 - delta];
    [r1, neg(r1), r2, neg(r2)]
}

fn is_degenerate(delta: f64) -> bool {
    delta == 0.5 || delta == 2.0
}

fn collect(delta: f64, region: Region, vertices: [[f64; 2]; 4], candidates: Vec<Candidate>) -> PolygonExtrema {
    let degenerate = is_degenerate(delta);
    let pool: Vec<&Candidate> = candidates.iter().filter(|c| c.inside).collect();
    let q_min = pool.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    let q_max = pool.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    let near = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    let mut argmin: Vec<[f64; 2]> = Vec::new();
    let mut argmax: Vec<[f64; 2]> = Vec::new();
    for c in &pool {
        let fresh = |list: &Vec<[f64; 2]>| {
            !list
                .iter()
                .any(|p| (p[0] - c.point[0]).abs() < 1e-12 && (p[1] - c.point[1]).abs() < 1e-12)
        };
        if near(c.value, q_min) && fresh(&argmin) {
            argmin.push(c.point);
        }
        if near(c.value, q_max) && fresh(&argmax) {
            argmax.push(c.point);
        }
    }
    PolygonExtrema {
        delta,
        region,
        vertices,
        candidates,
        q_min,
        argmin,
        q_max,
        argmax,
        degenerate,
    }
}

/// On a collapsed region, `q` restricted to the segment `[v, -v]` is `q(v)·s²`
/// for `s ∈ [-1, 1]`, so the extrema are `q(v)` at the ends and `0` at the origin.
fn segment_candidates(region: Region, delta: f64, end: [f64; 2]) -> Vec<Candidate> {
    vec![
        vertex("segment end", end),
        vertex("segment end", neg(end)),
        tagged(region, delta, "segment midpoint", CandidateKind::InteriorStationary, [0.0, 0.0]),
    ]
}

/// Exact extrema of `q` over `D(δ)` by candidate enumeration.
pub fn polygon_extrema(delta: f64) -> Result<PolygonExtrema> {
    check_delta(delta)?;
    let region = Region::MinPoint;
    let v = min_region_vertices(delta);
    if is_degenerate(delta) {
        return Ok(collect(delta, region, v, segment_candidates(region, delta, v[0])));
    }
    let h = (2.0 - delta) / 2.0;
    let w = 2.0 * delta - 1.0;
    let mut c = vec![
        vertex("p1", v[0]),
        vertex("p2", v[1]),
        vertex("p3", v[2]),
        vertex("p4", v[3]),
    ];
    for (label, p) in [("x=-z=(2-δ)/2", [h, -h]), ("x=-z=-(2-δ)/2", [-h, h])] {
        c.push(tagged(region, delta, label, CandidateKind::EdgeCritical, p));
    }
    for (label, p) in [("z=0,x=2δ-1", [w, 0.0]), ("z=0,x=-(2δ-1)", [-w, 0.0])] {
        c.push(tagged(region, delta, label, CandidateKind::EdgeCritical, p));
    }
    c.push(tagged(region, delta, "origin", CandidateKind::InteriorStationary, [0.0, 0.0]));
    Ok(collect(delta, region, v, c))
}

/// Exact extrema of `q(y, z)` over the maximum-point region `D'(δ)`.
pub fn remark_max_extrema(delta: f64) -> Result<PolygonExtrema> {
    check_delta(delta)?;
    let region = Region::MaxPoint;
    let v = max_region_vertices(delta);
    if is_degenerate(delta) {
        let end = if delta == 0.5 { v[0] } else { v[2] };
        return Ok(collect(delta, region, v, segment_candidates(region, delta, end)));
    }
    let s = 2.0 - delta;
    let h = (2.0 * delta - 1.0) / 2.0;
    let mut c = vec![
        vertex("r1", v[0]),
        vertex("r2", v[1]),
        vertex("r3", v[2]),
        vertex("r4", v[3]),
    ];
    for (label, p) in [("z=0,y=2-δ", [s, 0.0]), ("z=0,y=-(2-δ)", [-s, 0.0])] {
        c.push(tagged(region, delta, label, CandidateKind::EdgeCritical, p));
    }
    for (label, p) in [("y=-z=-(2δ-1)/2", [-h, h]), ("y=-z=(2δ-1)/2", [h, -h])] {
        c.push(tagged(region, delta, label, CandidateKind::EdgeCritical, p));
    }
    c.push(tagged(region, delta, "origin", CandidateKind::InteriorStationary, [0.0, 0.0]));
    Ok(collect(delta, region, v, c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundBranch {
    /// `-(2-δ)²/2`, active for `δ >= 4/5`.
    EdgeCritical,
    /// `δ² + 2δ - 2`
    CornerP1,
    /// `(11δ² - 14δ + 2)/3`
    CornerP3,
}

impl BoundBranch {
    pub fn formula(self) -> &'static str {
        match self {
            BoundBranch::EdgeCritical => "-(2-δ)²/2",
            BoundBranch::CornerP1 => "δ²+2δ-2",
            BoundBranch::CornerP3 => "(11δ²-14δ+2)/3",
        }
    }
}

pub fn corner_p1_value(delta: f64) -> f64 {
    delta * delta + 2.0 * delta - 2.0
}

pub fn corner_p3_value(delta: f64) -> f64 {
    (11.0 * delta * delta - 14.0 * delta + 2.0) / 3.0
}

pub fn edge_critical_value(delta: f64) -> f64 {
    -(2.0 - delta) * (2.0 - delta) / 2.0
}

/// The piecewise lower bound for `q` on `D(δ)` and the branch that produced it.
pub fn q_min_bound_branch(delta: f64) -> (f64, BoundBranch) {
    if delta >= 0.8 {
        (edge_critical_value(delta), BoundBranch::EdgeCritical)
    } else {
        let (a, b) = (corner_p1_value(delta), corner_p3_value(delta));
        if a <= b {
            (a, BoundBranch::CornerP1)
        } else {
            (b, BoundBranch::CornerP3)
        }
    }
}

pub fn q_min_bound(delta: f64) -> f64 {
    q_min_bound_branch(delta).0
}

/// Upper bound for `q(y, z)` on `D'(δ)`: the largest of the vertex values and,
/// once it lies in the region (`δ >= 1`), the edge value `(2-δ)²`.
pub fn remark_q_max_bound(delta: f64) -> f64 {
    let r1 = (2.0 * delta * delta - 14.0 * delta + 11.0) / 3.0;
    let r2 = 1.0 + 2.0 * delta - 2.0 * delta * delta;
    let mut m = r1.max(r2);
    if delta >= 1.0 {
        m = m.max((2.0 - delta) * (2.0 - delta));
    }
    m
}

/// `δ² + 2δ - 2 + q_min_bound(δ)`: lower bound for `½Q_0303` at a minimum point.
pub fn min_point_margin(delta: f64) -> f64 {
    corner_p1_value(delta) + q_min_bound(delta)
}

/// `1 + 2δ - 2δ² + q_max_bound(δ)`: upper bound for `½Q_0101` at a maximum point.
pub fn max_point_margin(delta: f64) -> f64 {
    1.0 + 2.0 * delta - 2.0 * delta * delta + remark_q_max_bound(delta)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridExtrema {
    pub n: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub points: usize,
}

/// Grid oracle: `q` on an `n × n` lattice spanning the region.
pub fn region_bruteforce(region: Region, delta: f64, n: usize) -> Result<GridExtrema> {
    check_delta(delta)?;
    if n < 101 {
        return Err(Error::Invariant(format!("grid size {n} is below the minimum of 101")));
    }
    let mut out = GridExtrema {
        n,
        q_min: f64::INFINITY,
        q_max: f64::NEG_INFINITY,
        points: 0,
    };
    for_each_grid_point(region, delta, n, |_, _, q| {
        out.q_min = out.q_min.min(q);
        out.q_max = out.q_max.max(q);
        out.points += 1;
    });
    Ok(out)
}

pub fn polygon_bruteforce(delta: f64, n: usize) -> Result<GridExtrema> {
    region_bruteforce(Region::MinPoint, delta, n)
}

pub fn remark_bruteforce(delta: f64, n: usize) -> Result<GridExtrema> {
    region_bruteforce(Region::MaxPoint, delta, n)
}

/// Grid points of the region with their `q` values, for external plotting.
pub fn grid_dump(region: Region, delta: f64, n: usize) -> Result<Vec<[f64; 3]>> {
    check_delta(delta)?;
    let mut out = Vec::new();
    for_each_grid_point(region, delta, n.max(2), |a, b, q| out.push([a, b, q]));
    Ok(out)
}

/// The region is the parallelogram `|n1·p| <= b1`, `|n2·p| <= b2`; the lattice
/// is uniform in `(n1·p, n2·p)`, so it contains the vertices and covers the
/// region evenly however thin it is.
fn for_each_grid_point(region: Region, delta: f64, n: usize, mut f: impl FnMut(f64, f64, f64)) {
    let [(n1, b1), (n2, b2)] = region.slabs(delta);
    let det = n1[0] * n2[1] - n1[1] * n2[0];
    let step = |b: f64, i: usize| -b + 2.0 * b * i as f64 / (n - 1) as f64;
    let vs: Vec<f64> = (0..n).map(|j| step(b2, j)).collect();
    for i in 0..n {
        let u = step(b1, i);
        for &v in &vs {
            let a = (u * n2[1] - v * n1[1]) / det;
            let b = (v * n1[0] - u * n2[0]) / det;
            f(a, b, q_value(a, b));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    /// `2(√6 - 2)`, the positive root of `δ² + 8δ - 8`.
    pub delta_star_min: f64,
    /// `(√6 + 2)/4 = 1/delta_star_min`
    pub c_star_min: f64,
    /// `√6 - 1`, the positive root of `δ² + 2δ - 5`.
    pub delta_star_max: f64,
    /// `(√6 + 1)/5 = 1/delta_star_max`
    pub c_star_max: f64,
}

pub fn threshold_constants() -> Thresholds {
    let s6 = 6f64.sqrt();
    Thresholds {
        delta_star_min: 2.0 * (s6 - 2.0),
        c_star_min: (s6 + 2.0) / 4.0,
        delta_star_max: s6 - 1.0,
        c_star_max: (s6 + 1.0) / 5.0,
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return None;
    }
    let rising = flo < fhi;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Positive,
    Negative,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapCertificate {
    pub delta: f64,
    pub x: f64,
    pub z: f64,
    pub q_actual: f64,
    pub q_lower_bound: f64,
    pub bound_branch: BoundBranch,
    pub half_q0303: f64,
    /// `½ Q(R)_0303` by direct contraction in the Berger frame.
    pub half_q0303_contraction: f64,
    /// `(x, z)` lies in `D(δ)` up to `1e-8`.
    pub inside_region: bool,
    pub sign_conclusion: Verdict,
    /// Factor applied to the tensor so that `K_max = 1`.
    pub normalization: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxGapCertificate {
    pub delta: f64,
    pub y: f64,
    pub z: f64,
    pub q_actual: f64,
    pub q_upper_bound: f64,
    pub half_q0101: f64,
    pub half_q0101_contraction: f64,
    pub inside_region: bool,
    pub sign_conclusion: Verdict,
    pub normalization: f64,
}

/// Frame-formula and contraction values must agree to this absolute gap.
pub const FRAME_FORMULA_TOL: f64 = 1e-8;

/// Tensor rescaled to `K_max = 1` with its Berger frame.
pub struct NormalizedFrame {
    pub tensor: Riemann4,
    pub normalization: f64,
    pub delta: f64,
    pub berger: BergerReport,
}

/// Validates Ricci-flatness, rescales to `K_max = 1`, and builds the Berger frame.
pub fn normalized_berger(r: &Riemann4, tol: &Tolerances) -> Result<NormalizedFrame> {
    let scale = r.max_abs().max(1.0);
    let residual = ricci(r).amax();
    if residual > tol.invariant * scale {
        return Err(Error::NotRicciFlat {
            residual,
            tolerance: tol.invariant * scale,
        });
    }
    let e = extremize_sectional_with(r, tol.invariant * scale)?;
    normalize_with_extrema(r, &e, tol)
}

/// As [`normalized_berger`] with precomputed extrema of `r`.
pub fn normalize_with_extrema(r: &Riemann4, e: &ExtremaReport, tol: &Tolerances) -> Result<NormalizedFrame> {
    let scale = r.max_abs().max(1.0);
    let residual = ricci(r).amax();
    if residual > tol.invariant * scale {
        return Err(Error::NotRicciFlat {
            residual,
            tolerance: tol.invariant * scale,
        });
    }
    if e.k_max <= 1e-12 {
        return Err(Error::FlatTensor { k_max: e.k_max });
    }
    let t = 1.0 / e.k_max;
    let tensor = r.scaled(t);
    let cfg = BergerConfig {
        tolerance: tol.berger,
        einstein_tol: tol.invariant * scale * t.max(1.0),
        ..BergerConfig::default()
    };
    let berger = berger_frame_with(&tensor, &e.scaled(t), &cfg)?;
    let delta = -berger.k03;
    if !(0.5 - 1e-8..=2.0 + 1e-8).contains(&delta) {
        return Err(Error::Invariant(format!(
            "normalized K_min = {} violates the pinching bounds of a Ricci-flat tensor",
            berger.k03
        )));
    }
    Ok(NormalizedFrame {
        tensor,
        normalization: t,
        delta,
        berger,
    })
}

fn frame_contraction(n: &NormalizedFrame, i: usize, j: usize) -> f64 {
    let rr = conjugate(&n.tensor, &n.berger.frame);
    0.5 * q_tensor(&rr).get(i, j, i, j)
}

/// Sign certificate for `Q(R)_0303` at a point where `K_min` is attained.
pub fn certify_min_point(r: &Riemann4) -> Result<GapCertificate> {
    certify_min_point_with(r, &Tolerances::default())
}

pub fn certify_min_point_with(r: &Riemann4, tol: &Tolerances) -> Result<GapCertificate> {
    let n = normalized_berger(r, tol)?;
    min_certificate(&n)
}

fn check_formula(frame: f64, contraction: f64) -> Result<()> {
    let gap = (frame - contraction).abs();
    if gap > FRAME_FORMULA_TOL {
        return Err(Error::Invariant(format!(
            "frame formula {frame} disagrees with direct contraction {contraction}"
        )));
    }
    Ok(())
}

pub fn min_certificate(n: &NormalizedFrame) -> Result<GapCertificate> {
    let b = &n.berger;
    let delta = n.delta;
    let (q_lower_bound, bound_branch) = q_min_bound_branch(delta.clamp(0.5, 2.0));
    let half_q0303 = half_q0303_frame(b.k01, b.k03, 0.0, b.x, b.z);
    let contraction = frame_contraction(n, 0, 3);
    check_formula(half_q0303, contraction)?;
    let inside_region = Region::MinPoint.contains(delta, [b.x, b.z], 1e-8);
    if !inside_region {
        log::warn!(
            "mixed components (x, z) = ({}, {}) fall outside D({delta})",
            b.x,
            b.z
        );
    }
    Ok(GapCertificate {
        delta,
        x: b.x,
        z: b.z,
        q_actual: q_value(b.x, b.z),
        q_lower_bound,
        bound_branch,
        half_q0303,
        half_q0303_contraction: contraction,
        inside_region,
        sign_conclusion: if delta > threshold_constants().delta_star_min {
            Verdict::Positive
        } else {
            Verdict::Inconclusive
        },
        normalization: n.normalization,
    })
}

/// Sign certificate for `Q(R)_0101` at a point where `K_max` is attained.
pub fn certify_max_point(r: &Riemann4) -> Result<MaxGapCertificate> {
    certify_max_point_with(r, &Tolerances::default())
}

pub fn certify_max_point_with(r: &Riemann4, tol: &Tolerances) -> Result<MaxGapCertificate> {
    let n = normalized_berger(r, tol)?;
    max_certificate(&n)
}

pub fn max_certificate(n: &NormalizedFrame) -> Result<MaxGapCertificate> {
    let b = &n.berger;
    let delta = n.delta;
    let half_q0101 = half_q0101_frame(b.k01, b.k03, b.y, b.z);
    let contraction = frame_contraction(n, 0, 1);
    check_formula(half_q0101, contraction)?;
    let inside_region = Region::MaxPoint.contains(delta, [b.y, b.z], 1e-8);
    if !inside_region {
        log::warn!(
            "mixed components (y, z) = ({}, {}) fall outside D'({delta})",
            b.y,
            b.z
        );
    }
    Ok(MaxGapCertificate {
        delta,
        y: b.y,
        z: b.z,
        q_actual: q_value(b.y, b.z),
        q_upper_bound: remark_q_max_bound(delta.clamp(0.5, 2.0)),
        half_q0101,
        half_q0101_contraction: contraction,
        inside_region,
        sign_conclusion: if delta > threshold_constants().delta_star_max {
            Verdict::Negative
        } else {
            Verdict::Inconclusive
        },
        normalization: n.normalization,
    })
}
