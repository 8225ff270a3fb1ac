//! Pointwise curvature algebra for Ricci-flat 4-manifolds and Ricci-flat
//! Kähler surfaces.
//!
//! The crate works at a single tangent space. It represents algebraic
//! curvature tensors, extremizes sectional and holomorphic sectional
//! curvature, builds Berger frames, and evaluates the quadratic term `Q(R)`
//! of the Bochner formula `ΔR + Q(R) = 2λR` in those frames, certifying the
//! sign of `Q(R)_{0303}` under curvature pinching.
//!
//! Module map:
//! - [`curvature`]: dense Riemann tensors, symmetrization, contractions, Weyl blocks
//! - [`grassmann`]: sectional-curvature extrema over 2-planes and Berger frames
//! - [`bochner`]: the polygon optimization of `q`, thresholds, gap certificates
//! - [`kahler`]: Kähler curvature on C^2 and the Laplacian formula at critical frames
//! - [`io`], [`analysis`], [`verify`]: file formats, the analysis pipeline, batch suites

pub mod analysis;
pub mod bochner;
pub mod curvature;
pub mod error;
pub mod grassmann;
pub mod io;
pub mod kahler;
pub mod oracle;
pub mod rng;
pub mod verify;

pub use error::{Error, ErrorClass, Result};

/// Environment variable overriding [`Tolerances::invariant`].
pub const TOL_ENV: &str = "RFGAP_TOL";

/// Absolute tolerances used by validation and frame checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Symmetry, Einstein, and Ricci-flat checks.
    pub invariant: f64,
    /// Accepted `max |R_ijik|` in a Berger frame.
    pub berger: f64,
    /// Accepted three-equal-index residual at a Kähler critical direction.
    pub critical: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            invariant: 1e-10,
            berger: 1e-6,
            critical: 1e-7,
        }
    }
}

impl Tolerances {
    /// Defaults, with `RFGAP_TOL` applied when it parses as a positive float.
    pub fn from_env() -> Self {
        let mut t = Self::default();
        if let Some(v) = std::env::var(TOL_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
        {
            t.invariant = v;
        }
        t
    }
}
