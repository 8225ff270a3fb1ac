//! The single-tensor analysis pipeline behind `rfgap analyze`.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::bochner::{max_certificate, min_certificate, normalize_with_extrema, GapCertificate, MaxGapCertificate};
use crate::curvature::{to_riemann, Riemann4};
use crate::error::{Error, Result};
use crate::grassmann::{corollary_bounds_check, extremize_sectional_with, BergerReport, CorollaryCheck, ExtremaReport};
use crate::io::{parse_tensor, sha256_hex, TensorFile};
use crate::kahler::{
    extremize_hol_with, kahler_pinching_bounds, siu_yang_laplacian, HolExtremaReport, KahlerCurv2,
    Orientation, PinchingSlacks, SiuYangCertificate, HOL_GRID,
};
use crate::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindFilter {
    Auto,
    Riemann,
    Weyl,
    Kahler,
}

impl std::str::FromStr for KindFilter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "riemann" => Ok(Self::Riemann),
            "weyl" => Ok(Self::Weyl),
            "kahler" => Ok(Self::Kahler),
            other => Err(format!("unknown kind '{other}' (expected auto, riemann, weyl or kahler)")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RiemannAnalysis {
    /// Extrema in the units of the input tensor.
    pub extrema: ExtremaReport,
    pub corollary: CorollaryCheck,
    /// Berger frame of the tensor rescaled to `K_max = 1`.
    pub berger: BergerReport,
    pub certificate: GapCertificate,
    pub max_point_certificate: MaxGapCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct KahlerAnalysis {
    pub extrema: HolExtremaReport,
    pub pinching: PinchingSlacks,
    pub certificate: SiuYangCertificate,
    pub max_point_certificate: SiuYangCertificate,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalysisBody {
    Weyl(RiemannAnalysis),
    Riemann(RiemannAnalysis),
    Kahler(KahlerAnalysis),
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub input_digest: String,
    #[serde(flatten)]
    pub body: AnalysisBody,
    /// Milliseconds per stage; present only when requested, since wall-clock
    /// values would break byte-stable output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<&'static str, f64>>,
}

struct Clock {
    enabled: bool,
    last: Instant,
    laps: BTreeMap<&'static str, f64>,
}

impl Clock {
    fn new(enabled: bool) -> Self {
        Self {
            enabled,
            last: Instant::now(),
            laps: BTreeMap::new(),
        }
    }

    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.laps
            .insert(stage, (now - self.last).as_secs_f64() * 1e3);
        self.last = now;
    }

    fn finish(self) -> Option<BTreeMap<&'static str, f64>> {
        self.enabled.then_some(self.laps)
    }
}

pub fn analyze_riemann(r: &Riemann4, tol: &Tolerances) -> Result<RiemannAnalysis> {
    analyze_riemann_timed(r, tol, &mut Clock::new(false))
}

fn analyze_riemann_timed(r: &Riemann4, tol: &Tolerances, clock: &mut Clock) -> Result<RiemannAnalysis> {
    let scale = r.max_abs().max(1.0);
    let extrema = extremize_sectional_with(r, tol.invariant * scale)?;
    let corollary = corollary_bounds_check(&extrema);
    clock.lap("extrema");
    let frame = normalize_with_extrema(r, &extrema, tol)?;
    clock.lap("berger");
    let certificate = min_certificate(&frame)?;
    let max_point_certificate = max_certificate(&frame)?;
    clock.lap("certificate");
    Ok(RiemannAnalysis {
        extrema,
        corollary,
        berger: frame.berger,
        certificate,
        max_point_certificate,
    })
}

pub fn analyze_kahler(k: &KahlerCurv2, tol: &Tolerances) -> Result<KahlerAnalysis> {
    analyze_kahler_timed(k, tol, &mut Clock::new(false))
}

fn analyze_kahler_timed(k: &KahlerCurv2, tol: &Tolerances, clock: &mut Clock) -> Result<KahlerAnalysis> {
    let extrema = extremize_hol_with(k, tol, HOL_GRID)?;
    let pinching = kahler_pinching_bounds(&extrema);
    clock.lap("extrema");
    let certificate = siu_yang_laplacian(k, &extrema, Orientation::Min, tol)?;
    let max_point_certificate = siu_yang_laplacian(k, &extrema, Orientation::Max, tol)?;
    clock.lap("certificate");
    Ok(KahlerAnalysis {
        extrema,
        pinching,
        certificate,
        max_point_certificate,
    })
}

/// Full pipeline on the bytes of a tensor file.
pub fn analyze_bytes(bytes: &[u8], kind: KindFilter, tol: &Tolerances, timings: bool) -> Result<AnalysisReport> {
    let mut clock = Clock::new(timings);
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 1,
        column: e.valid_up_to() + 1,
        message: "input is not UTF-8".into(),
    })?;
    let file = parse_tensor(text, tol.invariant)?;
    let matches = match kind {
        KindFilter::Auto => true,
        KindFilter::Riemann => matches!(file, TensorFile::Riemann(_)),
        KindFilter::Weyl => matches!(file, TensorFile::Weyl(_)),
        KindFilter::Kahler => matches!(file, TensorFile::Kahler(_)),
    };
    if !matches {
        return Err(Error::Schema(format!(
            "file holds a {} tensor but --kind {kind:?} was requested",
            file.kind()
        )));
    }
    clock.lap("parse");
    let body = match &file {
        TensorFile::Weyl(w) => AnalysisBody::Weyl(analyze_riemann_timed(&to_riemann(w), tol, &mut clock)?),
        TensorFile::Riemann(r) => AnalysisBody::Riemann(analyze_riemann_timed(r, tol, &mut clock)?),
        TensorFile::Kahler(k) => AnalysisBody::Kahler(analyze_kahler_timed(k, tol, &mut clock)?),
    };
    Ok(AnalysisReport {
        input_digest: sha256_hex(bytes),
        body,
        timings: clock.finish(),
    })
}
