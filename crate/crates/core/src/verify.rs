//! Seeded property suites over random samples.
//!
//! Sample `i` of suite `s` draws from stream `(s << 40) | i` of the master
//! seed, so results do not depend on how samples are spread over threads.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bochner::{
    bisect, corner_p1_value, corner_p3_value, edge_critical_value, max_certificate, max_point_margin,
    min_certificate, min_point_margin, min_region_vertices, normalize_with_extrema, polygon_bruteforce,
    polygon_extrema, q_min_bound_branch, q_value, remark_bruteforce, remark_max_extrema, remark_q_max_bound,
    threshold_constants, Region, Verdict, INSIDE_TOL,
};
use crate::curvature::{
    b_tensor, conjugate, curvature_operator, dual_blocks, q_tensor, ricci, sample_weyl, scalar_curvature,
    sectional, symmetrize, symmetry_residuals, to_riemann, Frame4, Plane2, Riemann4, Tensor4, WeylBlocks,
};
use crate::error::{Error, Result};
use crate::grassmann::{corollary_bounds_check, eigen_oracle, numeric_search, COROLLARY_SLACK_TOL};
use crate::kahler::{
    critical_frame_check, einstein_constant, extremize_hol_with, family_f, hol_sectional,
    kahler_pinching_bounds, kahler_ricci, kahler_thresholds, sample_einstein_kahler, siu_yang_laplacian,
    KahlerCurv2, Orientation, UnitaryFrame2,
};
use crate::oracle::{b_tensor_reference, q_tensor_reference, relative_gap};
use crate::rng::SampleStream;
use crate::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Core,
    Berger,
    Polygon,
    Kahler,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Berger => "berger",
            Suite::Polygon => "polygon",
            Suite::Kahler => "kahler",
            Suite::All => "all",
        }
    }

    fn members(self) -> &'static [Suite] {
        match self {
            Suite::All => &[Suite::Core, Suite::Berger, Suite::Polygon, Suite::Kahler],
            Suite::Core => &[Suite::Core],
            Suite::Berger => &[Suite::Berger],
            Suite::Polygon => &[Suite::Polygon],
            Suite::Kahler => &[Suite::Kahler],
        }
    }

    fn stream_id(self) -> u64 {
        match self {
            Suite::Core => 1,
            Suite::Berger => 2,
            Suite::Polygon => 3,
            Suite::Kahler => 4,
            Suite::All => 0,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "core" => Ok(Suite::Core),
            "berger" => Ok(Suite::Berger),
            "polygon" => Ok(Suite::Polygon),
            "kahler" => Ok(Suite::Kahler),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite '{other}' (expected core, berger, polygon, kahler or all)")),
        }
    }
}

/// Replaceable pieces of the core pipeline, so the suite itself can be
/// checked against a deliberately broken implementation.
#[derive(Clone, Copy)]
pub struct CoreHooks {
    pub symmetrize: fn(&Tensor4) -> Tensor4,
}

fn library_symmetrize(t: &Tensor4) -> Tensor4 {
    symmetrize(t).tensor().clone()
}

impl Default for CoreHooks {
    fn default() -> Self {
        Self {
            symmetrize: library_symmetrize,
        }
    }
}

#[derive(Clone, Copy)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    /// Worker threads; `0` lets the pool decide.
    pub jobs: usize,
    pub tol: Tolerances,
    pub hooks: CoreHooks,
}

impl VerifyConfig {
    pub fn new(suite: Suite, samples: usize, seed: u64) -> Self {
        Self {
            suite,
            samples,
            seed,
            jobs: 0,
            tol: Tolerances::default(),
            hooks: CoreHooks::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    /// `None` for checks that do not belong to a sample.
    pub sample: Option<u64>,
    pub seed: u64,
    pub check: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub samples: usize,
    pub seed: u64,
    /// Number of evaluations per check.
    pub checks: BTreeMap<String, u64>,
    pub failures: Vec<Failure>,
    pub status: Status,
}

#[derive(Default)]
struct Outcome {
    checks: BTreeMap<String, u64>,
    failures: Vec<Failure>,
}

impl Outcome {
    fn absorb(&mut self, other: Outcome) {
        for (k, v) in other.checks {
            *self.checks.entry(k).or_default() += v;
        }
        self.failures.extend(other.failures);
    }
}

struct Recorder {
    suite: &'static str,
    sample: Option<u64>,
    seed: u64,
    out: Outcome,
}

impl Recorder {
    fn new(suite: Suite, sample: Option<u64>, seed: u64) -> Self {
        Self {
            suite: suite.name(),
            sample,
            seed,
            out: Outcome::default(),
        }
    }

    fn record(&mut self, name: &str, ok: bool, observed: f64, expected: f64, tolerance: f64, detail: Option<String>) {
        let key = format!("{}.{name}", self.suite);
        *self.out.checks.entry(key.clone()).or_default() += 1;
        if !ok {
            self.out.failures.push(Failure {
                sample: self.sample,
                seed: self.seed,
                check: key,
                observed,
                expected,
                tolerance,
                detail,
            });
        }
    }

    /// `|observed - expected| <= tol`; NaN fails.
    fn close(&mut self, name: &str, observed: f64, expected: f64, tol: f64) {
        let ok = (observed - expected).abs() <= tol;
        self.record(name, ok, observed, expected, tol, None);
    }

    /// A nonnegative residual that must not exceed `tol`.
    fn small(&mut self, name: &str, residual: f64, tol: f64) {
        self.record(name, residual <= tol, residual, 0.0, tol, None);
    }

    /// A slack that must be `>= -tol`.
    fn slack(&mut self, name: &str, slack: f64, tol: f64) {
        self.record(name, slack >= -tol, slack, 0.0, tol, None);
    }

    fn holds(&mut self, name: &str, ok: bool, observed: f64) {
        self.record(name, ok, observed, f64::NAN, 0.0, None);
    }

    fn error(&mut self, name: &str, e: &Error) {
        self.record(name, false, f64::NAN, 0.0, 0.0, Some(e.to_string()));
    }

    fn ok<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => {
                self.record(name, true, 0.0, 0.0, 0.0, None);
                Some(v)
            }
            Err(e) => {
                self.error(name, &e);
                None
            }
        }
    }
}

fn stream(suite: Suite, seed: u64, i: u64) -> SampleStream {
    SampleStream::new(seed, (suite.stream_id() << 40) | i)
}

/// Runs the configured suite; the JSON form of the result depends only on
/// `(suite, samples, seed)`.
pub fn run(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Invariant(format!("cannot start worker pool: {e}")))?;
    let mut total = Outcome::default();
    for &suite in cfg.suite.members() {
        let per_sample: Vec<Outcome> = pool.install(|| {
            (0..cfg.samples as u64)
                .into_par_iter()
                .map(|i| run_sample(suite, cfg, i))
                .collect()
        });
        for o in per_sample {
            total.absorb(o);
        }
        total.absorb(pool.install(|| run_global(suite, cfg)));
    }
    let status = if total.failures.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(SuiteResult {
        suite: cfg.suite.name(),
        samples: cfg.samples,
        seed: cfg.seed,
        checks: total.checks,
        failures: total.failures,
        status,
    })
}

fn run_sample(suite: Suite, cfg: &VerifyConfig, i: u64) -> Outcome {
    let mut rec = Recorder::new(suite, Some(i), cfg.seed);
    let mut s = stream(suite, cfg.seed, i);
    match suite {
        Suite::Core => core_sample(&mut rec, &mut s, &cfg.hooks),
        Suite::Berger => berger_sample(&mut rec, &mut s, &cfg.tol),
        Suite::Polygon => polygon_sample(&mut rec, &mut s),
        Suite::Kahler => kahler_sample(&mut rec, &mut s, &cfg.tol, i),
        Suite::All => {}
    }
    rec.out
}

fn run_global(suite: Suite, cfg: &VerifyConfig) -> Outcome {
    let mut rec = Recorder::new(suite, None, cfg.seed);
    match suite {
        Suite::Berger => berger_global(&mut rec),
        Suite::Polygon => polygon_global(&mut rec),
        Suite::Kahler => kahler_global(&mut rec, &cfg.tol),
        Suite::Core | Suite::All => {}
    }
    rec.out
}

const PLANES_PER_SAMPLE: usize = 10;

fn plane_duality(rec: &mut Recorder, r: &Riemann4, s: &mut SampleStream) {
    for _ in 0..PLANES_PER_SAMPLE {
        let p = Plane2::random(s);
        let (a, b) = (sectional(r, &p), sectional(r, &p.orthogonal_complement()));
        rec.close("plane_duality", a, b, 1e-10);
    }
}

fn weyl_diff(a: &WeylBlocks, b: &WeylBlocks) -> f64 {
    (a.w_plus - b.w_plus).amax().max((a.w_minus - b.w_minus).amax())
}

fn core_sample(rec: &mut Recorder, s: &mut SampleStream, hooks: &CoreHooks) {
    let raw = Tensor4::random(s, 1.0);
    let t = (hooks.symmetrize)(&raw);
    let res = symmetry_residuals(&t);
    rec.small("antisymmetry", res.antisymmetry, 1e-12);
    rec.small("pair_symmetry", res.pair_symmetry, 1e-12);
    rec.small("first_bianchi", res.bianchi, 1e-12);
    rec.small("symmetrize_idempotent", (hooks.symmetrize)(&t).max_abs_diff(&t), 1e-14);
    let Some(r) = rec.ok("curvature_tensor_valid", Riemann4::from_tensor(t, 1e-10)) else {
        return;
    };

    let ric = ricci(&r);
    rec.small("ricci_symmetric", (ric - ric.transpose()).amax(), 1e-12);
    rec.close("scalar_is_ricci_trace", scalar_curvature(&r), ric.trace(), 1e-12);
    rec.small("b_tensor_oracle", relative_gap(&b_tensor(&r), &b_tensor_reference(&r)), 1e-12);
    let q = q_tensor(&r);
    rec.small("q_tensor_oracle", relative_gap(&q, &q_tensor_reference(&r)), 1e-12);
    rec.small("q_tensor_symmetries", symmetry_residuals(&q).max(), 1e-10);
    if let Some(back) = rec.ok(
        "operator_round_trip_valid",
        Riemann4::from_operator(&curvature_operator(&r), 1e-10),
    ) {
        rec.small("operator_round_trip", back.max_abs_diff(&r), 1e-12);
    }

    let f = Frame4::random(s);
    let c = conjugate(&r, &f);
    rec.small("conjugate_symmetries", symmetry_residuals(c.tensor()).max(), 1e-12);
    rec.close("scalar_invariance", scalar_curvature(&c), scalar_curvature(&r), 1e-12);
    if let Ok(p) = Plane2::new(f.column(0), f.column(1)) {
        rec.close("frame_sectional", sectional(&c, &Plane2::coordinate(0, 1)), sectional(&r, &p), 1e-12);
    }
    rec.small("conjugate_round_trip", conjugate(&c, &f.transpose()).max_abs_diff(&r), 1e-12);

    let w = sample_weyl(s, 1.0);
    let rw = to_riemann(&w);
    rec.small("weyl_ricci_flat", ricci(&rw).amax(), 1e-12);
    rec.small("weyl_no_mixed_block", dual_blocks(&rw).duality_residual(), 1e-12);
    if let Some(back) = rec.ok("weyl_blocks_recovered", WeylBlocks::from_riemann(&rw, 1e-10)) {
        rec.small("weyl_block_round_trip", weyl_diff(&back, &w), 1e-12);
    }
    plane_duality(rec, &rw, s);
}

const PROBES: usize = 20;

fn berger_sample(rec: &mut Recorder, s: &mut SampleStream, tol: &Tolerances) {
    let w = sample_weyl(s, 1.0);
    let r = to_riemann(&w);
    let scale = r.max_abs().max(1.0);
    let Some(e) = rec.ok("eigen_oracle", eigen_oracle(&r, tol.invariant * scale)) else {
        return;
    };
    if let Some(n) = rec.ok("numeric_search", numeric_search(&r)) {
        rec.close("search_matches_oracle_max", n.k_max, e.k_max, 1e-8);
        rec.close("search_matches_oracle_min", n.k_min, e.k_min, 1e-8);
    }
    rec.close("plane_max_attains", sectional(&r, &e.plane_max), e.k_max, 1e-10);
    rec.close("plane_min_attains", sectional(&r, &e.plane_min), e.k_min, 1e-10);
    for _ in 0..PROBES {
        let k = sectional(&r, &Plane2::random(s));
        rec.close("probe_within_extrema", k, k.clamp(e.k_min, e.k_max), 1e-10);
    }
    let rotated = conjugate(&r, &Frame4::random(s));
    if let Some(e2) = rec.ok("eigen_oracle_rotated", eigen_oracle(&rotated, tol.invariant * scale)) {
        rec.close("rotation_invariance_max", e2.k_max, e.k_max, 1e-10);
        rec.close("rotation_invariance_min", e2.k_min, e.k_min, 1e-10);
    }
    let c = corollary_bounds_check(&e);
    rec.slack("pinching_lower", c.lower_slack, COROLLARY_SLACK_TOL);
    rec.slack("pinching_upper", c.upper_slack, COROLLARY_SLACK_TOL);
    plane_duality(rec, &r, s);

    let Some(n) = rec.ok("berger_frame", normalize_with_extrema(&r, &e, tol)) else {
        return;
    };
    let b = &n.berger;
    rec.small("berger_offdiag", b.residual_offdiag, 1e-6);
    rec.slack("berger_inequality_first", b.residual_ineq[0], 1e-8);
    rec.slack("berger_inequality_second", b.residual_ineq[1], 1e-8);
    rec.small("berger_extremal", b.extremal_gap, 1e-8);
    rec.slack("berger_order", b.k02 - b.k03, 1e-12);
    rec.close("normalized_k_max", b.k01, 1.0, 1e-8);
    rec.close("mixed_bianchi", b.x + b.y + b.z, 0.0, 1e-10);

    let th = threshold_constants();
    if let Some(cert) = rec.ok("min_point_certificate", min_certificate(&n)) {
        let scale = cert.half_q0303_contraction.abs().max(1.0);
        rec.small(
            "frame_formula",
            (cert.half_q0303 - cert.half_q0303_contraction).abs() / scale,
            1e-8,
        );
        rec.holds("min_region_containment", cert.inside_region, cert.delta);
        rec.slack("min_region_bound", cert.q_actual - cert.q_lower_bound, 1e-9);
        if cert.delta > th.delta_star_min + 1e-3 {
            rec.holds("min_point_sign", cert.half_q0303 > 0.0, cert.half_q0303);
            rec.holds(
                "min_point_verdict",
                cert.sign_conclusion == Verdict::Positive,
                cert.half_q0303,
            );
        }
    }
    if let Some(cert) = rec.ok("max_point_certificate", max_certificate(&n)) {
        let scale = cert.half_q0101_contraction.abs().max(1.0);
        rec.small(
            "frame_formula_max_point",
            (cert.half_q0101 - cert.half_q0101_contraction).abs() / scale,
            1e-8,
        );
        rec.holds("max_region_containment", cert.inside_region, cert.delta);
        rec.slack("max_region_bound", cert.q_upper_bound - cert.q_actual, 1e-9);
        if cert.delta > th.delta_star_max + 1e-3 {
            rec.holds("max_point_sign", cert.half_q0101 < 0.0, cert.half_q0101);
        }
    }
}

fn berger_global(rec: &mut Recorder) {
    // both ends of the pinching interval are attained by diagonal tensors
    for (k, upper) in [([1.0, -0.5, -0.5], true), ([0.5, 0.5, -1.0], false)] {
        let r = Riemann4::diagonal(k);
        if let Some(e) = rec.ok("saturating_diagonal", eigen_oracle(&r, 1e-12)) {
            let c = corollary_bounds_check(&e);
            let slack = if upper { c.upper_slack } else { c.lower_slack };
            rec.close("saturating_diagonal_slack", slack, 0.0, 1e-12);
        }
    }
}

pub const POLYGON_GRID: usize = 2001;
const GRID_AGREEMENT: f64 = 5e-3;

fn polygon_sample(rec: &mut Recorder, s: &mut SampleStream) {
    let delta = s.range(0.5, 2.0);
    let Some(pe) = rec.ok("enumeration", polygon_extrema(delta)) else {
        return;
    };
    if let Some(g) = rec.ok("grid_oracle", polygon_bruteforce(delta, POLYGON_GRID)) {
        rec.close("grid_min", g.q_min, pe.q_min, GRID_AGREEMENT);
        rec.close("grid_max", g.q_max, pe.q_max, GRID_AGREEMENT);
        rec.slack("grid_not_below_exact", g.q_min - pe.q_min, 1e-12);
    }
    let (bound, _) = q_min_bound_branch(delta);
    rec.close("min_bound_attained", pe.q_min, bound, 1e-12);

    let Some(rm) = rec.ok("remark_enumeration", remark_max_extrema(delta)) else {
        return;
    };
    if let Some(g) = rec.ok("remark_grid_oracle", remark_bruteforce(delta, POLYGON_GRID)) {
        rec.close("remark_grid_min", g.q_min, rm.q_min, GRID_AGREEMENT);
        rec.close("remark_grid_max", g.q_max, rm.q_max, GRID_AGREEMENT);
        rec.slack("remark_grid_not_above_exact", rm.q_max - g.q_max, 1e-12);
    }
    rec.close("remark_max_bound_attained", rm.q_max, remark_q_max_bound(delta), 1e-12);
}

/// `δ = 0.5 + k·1e-4`, `k = 0..=15000`, built from integers.
fn fine_deltas() -> impl Iterator<Item = f64> {
    (5000..=20000u32).map(|k| f64::from(k) / 10000.0)
}

fn polygon_global(rec: &mut Recorder) {
    let th = threshold_constants();
    match bisect(min_point_margin, 0.5, 1.0, 1e-13) {
        Some(root) => rec.close("min_point_threshold", root, th.delta_star_min, 1e-9),
        None => rec.holds("min_point_threshold", false, f64::NAN),
    }
    match bisect(max_point_margin, 1.0, 2.0, 1e-13) {
        Some(root) => rec.close("max_point_threshold", root, th.delta_star_max, 1e-9),
        None => rec.holds("max_point_threshold", false, f64::NAN),
    }
    rec.close("min_threshold_reciprocal", th.delta_star_min * th.c_star_min, 1.0, 1e-14);
    rec.close("max_threshold_reciprocal", th.delta_star_max * th.c_star_max, 1.0, 1e-14);

    for delta in fine_deltas() {
        let h = (2.0 - delta) / 2.0;
        let inside = Region::MinPoint.contains(delta, [h, -h], INSIDE_TOL);
        rec.holds("edge_critical_containment", inside == (delta >= 0.8 - 1e-12), delta);
        let w = 2.0 * delta - 1.0;
        let inside = Region::MinPoint.contains(delta, [w, 0.0], INSIDE_TOL);
        rec.holds("axis_critical_containment", inside == (delta <= 1.0 + 1e-12), delta);
        let corners = corner_p1_value(delta).min(corner_p3_value(delta));
        rec.slack("corner_dominance", corners - edge_critical_value(delta), 1e-12);
        let v = min_region_vertices(delta);
        rec.close("corner_value_p1", q_value(v[0][0], v[0][1]), corner_p1_value(delta), 1e-12);
        rec.close("corner_value_p3", q_value(v[2][0], v[2][1]), corner_p3_value(delta), 1e-12);
        let inside = Region::MaxPoint.contains(delta, [2.0 - delta, 0.0], INSIDE_TOL);
        rec.holds("remark_edge_containment", inside == (delta >= 1.0 - 1e-12), delta);
    }
}

/// Grid for the `(t, φ)` seeding of the CP¹ search inside the suites.
pub const SUITE_HOL_GRID: usize = 501;
const KAHLER_IDENTITY_TOL: f64 = 1e-7;
/// Every fifth Kähler sample also draws an Einstein tensor with `λ != 0`.
const EINSTEIN_STRIDE: u64 = 5;

fn random_direction(s: &mut SampleStream) -> [num_complex::Complex64; 2] {
    let g: [f64; 4] = s.unit_vector();
    [
        num_complex::Complex64::new(g[0], g[1]),
        num_complex::Complex64::new(g[2], g[3]),
    ]
}

fn kahler_sample(rec: &mut Recorder, s: &mut SampleStream, tol: &Tolerances, i: u64) {
    let seed = s.unit().to_bits();
    let k = sample_einstein_kahler(seed, 0, 1.0, 0.0);
    rec.small("symmetries", k.symmetry_residual(), 1e-14);
    let ric = kahler_ricci(&k).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    rec.small("ricci_flat", ric, 1e-12);
    let Some(rep) = rec.ok("cp1_extrema", extremize_hol_with(&k, tol, SUITE_HOL_GRID)) else {
        return;
    };
    for _ in 0..PROBES {
        let h = hol_sectional(&k, &random_direction(s));
        rec.close("probe_within_extrema", h, h.clamp(rep.h_min, rep.h_max), 1e-9);
    }
    rec.small("critical_min_direction", critical_frame_check(&k, &rep.dir_min), 1e-7);
    rec.small("critical_max_direction", critical_frame_check(&k, &rep.dir_max), 1e-7);
    rec.close("mean_vanishes", rep.h_av, 0.0, KAHLER_IDENTITY_TOL);
    let p = kahler_pinching_bounds(&rep);
    for (n, v) in p.ke.iter().enumerate() {
        rec.slack(&format!("mean_pinching_{n}"), *v, 1e-8);
    }
    match p.ke2 {
        Some([a, b]) => {
            rec.slack("flat_pinching_lower", a, 1e-8);
            rec.slack("flat_pinching_upper", b, 1e-8);
        }
        None => rec.holds("flat_pinching_present", false, 0.0),
    }
    if let Some(c) = rec.ok("min_orientation", siu_yang_laplacian(&k, &rep, Orientation::Min, tol)) {
        rec.close("a_identity", c.a_value, -3.0 * rep.h_min, KAHLER_IDENTITY_TOL);
        rec.close("b_identity", c.b_modulus, 2.0 * rep.h_max + rep.h_min, KAHLER_IDENTITY_TOL);
        rec.close("mixed_component_identity", c.r11_22, -rep.h_min, KAHLER_IDENTITY_TOL);
        rec.close("laplacian_closed_form", c.laplacian_value, c.closed_form_value, KAHLER_IDENTITY_TOL);
    }
    if let Some(c) = rec.ok("max_orientation", siu_yang_laplacian(&k, &rep, Orientation::Max, tol)) {
        rec.close("a_identity_max", c.a_value, -3.0 * rep.h_max, KAHLER_IDENTITY_TOL);
        rec.close(
            "b_identity_max",
            c.b_modulus,
            -(rep.h_max + 2.0 * rep.h_min),
            KAHLER_IDENTITY_TOL,
        );
        rec.close("laplacian_closed_form_max", c.laplacian_value, c.closed_form_value, KAHLER_IDENTITY_TOL);
    }
    let u = UnitaryFrame2::random(s);
    let ku = k.in_frame(&u);
    let v = random_direction(s);
    rec.close("unitary_covariance", hol_sectional(&ku, &v), hol_sectional(&k, &u.apply(&v)), 1e-12);
    if let Some(r2) = rec.ok("cp1_extrema_rotated", extremize_hol_with(&ku, tol, SUITE_HOL_GRID)) {
        rec.close("unitary_invariance_max", r2.h_max, rep.h_max, 1e-9);
        rec.close("unitary_invariance_min", r2.h_min, rep.h_min, 1e-9);
    }

    if i % EINSTEIN_STRIDE == 0 {
        let lambda = if s.unit() < 0.5 { -1.0 } else { 1.0 } * s.range(0.2, 1.0);
        let e = sample_einstein_kahler(seed, 1, 1.0, lambda);
        einstein_sample(rec, &e, lambda, tol);
    }
}

fn einstein_sample(rec: &mut Recorder, e: &KahlerCurv2, lambda: f64, tol: &Tolerances) {
    match einstein_constant(e, 1e-10) {
        Some(l) => rec.close("einstein_constant", l, lambda, 1e-10),
        None => rec.holds("einstein_constant", false, f64::NAN),
    }
    let Some(rep) = rec.ok("einstein_cp1_extrema", extremize_hol_with(e, tol, SUITE_HOL_GRID)) else {
        return;
    };
    rec.close("einstein_mean", rep.h_av, 2.0 * lambda / 3.0, KAHLER_IDENTITY_TOL);
    let p = kahler_pinching_bounds(&rep);
    for (n, v) in p.ke.iter().enumerate() {
        rec.slack(&format!("einstein_pinching_{n}"), *v, 1e-8);
    }
}

fn family_laplacian(c: f64, orientation: Orientation, tol: &Tolerances) -> f64 {
    let k = family_f(2.0 * c - 1.0);
    extremize_hol_with(&k, tol, SUITE_HOL_GRID)
        .and_then(|rep| siu_yang_laplacian(&k, &rep, orientation, tol))
        .map_or(f64::NAN, |cert| cert.laplacian_value)
}

fn kahler_global(rec: &mut Recorder, tol: &Tolerances) {
    for n in 0..=30u32 {
        let b = f64::from(n) / 10.0;
        let k = family_f(b);
        let Some(rep) = rec.ok("family_extrema", extremize_hol_with(&k, tol, SUITE_HOL_GRID)) else {
            continue;
        };
        rec.close("family_h_min", rep.h_min, -1.0, 1e-9);
        rec.close("family_h_max", rep.h_max, (1.0 + b) / 2.0, 1e-9);
        if let Some(c) = rec.ok("family_certificate", siu_yang_laplacian(&k, &rep, Orientation::Min, tol)) {
            rec.close("family_laplacian", c.laplacian_value, b * b - 3.0, 1e-9);
        }
        if let Some(c) = rec.ok("family_certificate_max", siu_yang_laplacian(&k, &rep, Orientation::Max, tol)) {
            rec.close("family_laplacian_max", c.laplacian_value, -(b * b + 6.0 * b - 3.0) / 2.0, 1e-9);
        }
    }
    // in terms of the pinching ratio c = H_max / (-H_min) = (1 + b)/2
    let th = kahler_thresholds();
    match bisect(|c| family_laplacian(c, Orientation::Min, tol), 0.5, 2.0, 1e-12) {
        Some(root) => rec.close("min_orientation_threshold", root, th.c_min_case, 1e-9),
        None => rec.holds("min_orientation_threshold", false, f64::NAN),
    }
    match bisect(|c| family_laplacian(c, Orientation::Max, tol), 0.5, 2.0, 1e-12) {
        Some(root) => rec.close("max_orientation_threshold", root, th.c_max_case, 1e-9),
        None => rec.holds("max_orientation_threshold", false, f64::NAN),
    }
    let below = family_f(2.0 * (th.c_min_case - 1e-3) - 1.0);
    let verdict = extremize_hol_with(&below, tol, SUITE_HOL_GRID)
        .and_then(|rep| siu_yang_laplacian(&below, &rep, Orientation::Min, tol));
    if let Some(c) = rec.ok("below_threshold_certificate", verdict) {
        rec.holds("below_threshold_negative", c.sign_conclusion == Verdict::Negative, c.laplacian_value);
    }
    let below = family_f(2.0 * (th.c_max_case - 1e-3) - 1.0);
    let verdict = extremize_hol_with(&below, tol, SUITE_HOL_GRID)
        .and_then(|rep| siu_yang_laplacian(&below, &rep, Orientation::Max, tol));
    if let Some(c) = rec.ok("below_threshold_certificate_max", verdict) {
        rec.holds("below_threshold_positive", c.sign_conclusion == Verdict::Positive, c.laplacian_value);
    }
    rec.close("threshold_product", th.c_max_case * (th.c_min_case * 2.0), 2.0, 1e-14);
}
