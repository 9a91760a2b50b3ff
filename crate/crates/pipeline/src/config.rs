//! TOML generation config.
//!
//! ```toml
//! input = "frames"
//! output = "out"
//! seed = 7
//! workers = 8
//! emit_viz = true
//! emit_transmission = false
//!
//! # Either a single corruption ...
//! corruption = "grf_turbulence"
//! # ... or a weighted mix:
//! # [mix]
//! # brown_conrady = 1.0
//! # lens_flare = 0.5
//!
//! [grf_turbulence]
//! correlation_length = [32, 96]   # sampled uniformly; a bare number fixes it
//! alpha = [1, 4]
//! ```
//!
//! Every section is optional and falls back to the defaults of its type.
//! Unknown keys are rejected. Validation errors name the dotted key path.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use distortkit_core::fields::OctaveSpec;
use distortkit_core::warps::CameraIntrinsics;
use distortkit_core::weather::fog::{DEFAULT_AIRLIGHT, DEFAULT_K0, DEFAULT_MAX_DEPTH, MAX_JITTER};
use distortkit_core::weather::{Extinction, FogParams};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{PipelineError, Result};

/// The seven corruption families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corruption {
    BrownConrady,
    GrfTurbulence,
    Tps,
    DivergenceFree,
    UniformFog,
    HeteroFog,
    LensFlare,
}

impl Corruption {
    pub const ALL: [Corruption; 7] = [
        Corruption::BrownConrady,
        Corruption::GrfTurbulence,
        Corruption::Tps,
        Corruption::DivergenceFree,
        Corruption::UniformFog,
        Corruption::HeteroFog,
        Corruption::LensFlare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Corruption::BrownConrady => "brown_conrady",
            Corruption::GrfTurbulence => "grf_turbulence",
            Corruption::Tps => "tps",
            Corruption::DivergenceFree => "divergence_free",
            Corruption::UniformFog => "uniform_fog",
            Corruption::HeteroFog => "hetero_fog",
            Corruption::LensFlare => "lens_flare",
        }
    }

    /// Geometric warps carry a UV field; the rest carry a scalar map.
    pub fn is_refractive(self) -> bool {
        matches!(
            self,
            Corruption::BrownConrady | Corruption::GrfTurbulence | Corruption::Tps | Corruption::DivergenceFree
        )
    }
}

impl fmt::Display for Corruption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Corruption {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Corruption::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = Corruption::ALL.iter().map(|c| c.as_str()).collect();
            format!("unknown corruption {s:?}; expected one of {}", names.join(", "))
        })
    }
}

/// Closed interval sampled uniformly. Written as `[lo, hi]` or a bare number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn fixed(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    /// One uniform draw mapped onto the interval; a degenerate interval
    /// returns `lo` exactly but still consumes the draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let t: f64 = rng.random();
        if self.lo == self.hi {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * t
        }
    }

    fn check(&self, path: &str, min: f64, max: f64) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return Err(PipelineError::config(path, "bounds must be finite"));
        }
        if self.lo > self.hi {
            return Err(PipelineError::config(
                path,
                format!("range must satisfy lo <= hi, got [{}, {}]", self.lo, self.hi),
            ));
        }
        if self.lo < min || self.hi > max {
            return Err(PipelineError::config(
                path,
                format!("range [{}, {}] must lie within [{min}, {max}]", self.lo, self.hi),
            ));
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for Range {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Fixed(f64),
            Span([f64; 2]),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Fixed(v) => Range::fixed(v),
            Raw::Span([lo, hi]) => Range::new(lo, hi),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntrinsicsConfig {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl From<IntrinsicsConfig> for CameraIntrinsics {
    fn from(c: IntrinsicsConfig) -> Self {
        CameraIntrinsics {
            fx: c.fx,
            fy: c.fy,
            cx: c.cx,
            cy: c.cy,
        }
    }
}

/// `[brown_conrady]`. Intrinsics default to a centred principal point and
/// `f = max(W, H) / 2`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LensSection {
    pub intrinsics: Option<IntrinsicsConfig>,
    pub k1: Range,
    pub k2: Range,
    pub k3: Range,
    pub k4: Range,
    pub k5: Range,
    pub k6: Range,
    pub p1: Range,
    pub p2: Range,
    pub s1: Range,
    pub s2: Range,
    pub s3: Range,
    pub s4: Range,
}

impl Default for LensSection {
    fn default() -> Self {
        let zero = Range::fixed(0.0);
        Self {
            intrinsics: None,
            k1: Range::new(-0.25, 0.25),
            k2: Range::new(-0.05, 0.05),
            k3: zero,
            k4: zero,
            k5: zero,
            k6: zero,
            p1: Range::new(-0.005, 0.005),
            p2: Range::new(-0.005, 0.005),
            s1: zero,
            s2: zero,
            s3: zero,
            s4: zero,
        }
    }
}

impl LensSection {
    /// Coefficient ranges in draw order: `k1..k6, p1, p2, s1..s4`.
    pub fn ranges(&self) -> [(&'static str, Range); 12] {
        [
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("k4", self.k4),
            ("k5", self.k5),
            ("k6", self.k6),
            ("p1", self.p1),
            ("p2", self.p2),
            ("s1", self.s1),
            ("s2", self.s2),
            ("s3", self.s3),
            ("s4", self.s4),
        ]
    }

    fn validate(&self) -> Result<()> {
        for (name, r) in self.ranges() {
            r.check(&format!("brown_conrady.{name}"), f64::MIN, f64::MAX)?;
        }
        if let Some(i) = self.intrinsics {
            for (name, v) in [("fx", i.fx), ("fy", i.fy)] {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(PipelineError::config(
                        format!("brown_conrady.intrinsics.{name}"),
                        format!("must be positive, got {v}"),
                    ));
                }
            }
            for (name, v) in [("cx", i.cx), ("cy", i.cy)] {
                if !v.is_finite() {
                    return Err(PipelineError::config(format!("brown_conrady.intrinsics.{name}"), "must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// `[grf_turbulence]` and `[divergence_free]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSection {
    /// Pixels.
    pub correlation_length: Range,
    /// Pixels.
    pub alpha: Range,
    /// Covariance inner scale as a fraction of the correlation length;
    /// `0` selects the unsmoothed exponential.
    pub inner_scale_ratio: f64,
}

impl Default for FlowSection {
    fn default() -> Self {
        Self {
            correlation_length: Range::new(32.0, 96.0),
            alpha: Range::new(1.0, 4.0),
            inner_scale_ratio: distortkit_core::fields::DEFAULT_INNER_SCALE_RATIO,
        }
    }
}

impl FlowSection {
    fn validate(&self, section: &str) -> Result<()> {
        self.correlation_length
            .check(&format!("{section}.correlation_length"), f64::MIN_POSITIVE, f64::MAX)?;
        self.alpha.check(&format!("{section}.alpha"), 0.0, f64::MAX)?;
        if !(self.inner_scale_ratio >= 0.0 && self.inner_scale_ratio.is_finite()) {
            return Err(PipelineError::config(
                format!("{section}.inner_scale_ratio"),
                format!("must be non-negative, got {}", self.inner_scale_ratio),
            ));
        }
        Ok(())
    }
}

/// `[tps]`: control points on a `grid[0] x grid[1]` lattice, targets
/// jittered by a Gaussian whose sigma (pixels) is drawn from `jitter`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TpsSection {
    pub grid: [usize; 2],
    pub jitter: Range,
}

impl Default for TpsSection {
    fn default() -> Self {
        Self {
            grid: [4, 4],
            jitter: Range::new(2.0, 6.0),
        }
    }
}

impl TpsSection {
    fn validate(&self) -> Result<()> {
        if self.grid.iter().any(|&n| n < 2) {
            return Err(PipelineError::config(
                "tps.grid",
                format!("need at least 2 points per axis, got {:?}", self.grid),
            ));
        }
        self.jitter.check("tps.jitter", 0.0, f64::MAX)
    }
}

/// `[fog]`, shared by both fog corruptions. Give at most one of `k0`
/// (per metre) and `visibility_m`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FogSection {
    pub k0: Option<f64>,
    pub visibility_m: Option<f64>,
    pub max_depth: f64,
    pub airlight: [f64; 3],
    pub jitter: f64,
}

impl Default for FogSection {
    fn default() -> Self {
        Self {
            k0: None,
            visibility_m: None,
            max_depth: DEFAULT_MAX_DEPTH,
            airlight: DEFAULT_AIRLIGHT,
            jitter: MAX_JITTER,
        }
    }
}

impl FogSection {
    pub fn params(&self) -> Result<FogParams> {
        let extinction = match (self.k0, self.visibility_m) {
            (Some(_), Some(_)) => {
                return Err(PipelineError::config("fog", "set at most one of k0 and visibility_m"));
            }
            (Some(k), None) => Extinction::Coefficient(k),
            (None, Some(v)) => Extinction::Visibility(v),
            (None, None) => Extinction::Coefficient(DEFAULT_K0),
        };
        let params = FogParams {
            extinction,
            max_depth: self.max_depth,
            airlight: self.airlight,
            jitter: self.jitter,
        };
        params.validate().map_err(|e| match e {
            distortkit_core::Error::InvalidParameter { name, reason } => {
                let key = if name == "visibility" { "visibility_m" } else { name };
                PipelineError::config(format!("fog.{key}"), reason)
            }
            other => PipelineError::config("fog", other.to_string()),
        })?;
        Ok(params)
    }
}

/// `[hetero_fog]`: octave scales (pixels) and weights of the noise stack.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OctaveSection {
    pub scales: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Default for OctaveSection {
    fn default() -> Self {
        let spec = OctaveSpec::default();
        Self {
            scales: spec.scales,
            weights: spec.weights,
        }
    }
}

impl OctaveSection {
    pub fn spec(&self) -> Result<OctaveSpec> {
        OctaveSpec::new(self.scales.clone(), self.weights.clone()).map_err(|e| match e {
            distortkit_core::Error::InvalidParameter { name, reason } => {
                PipelineError::config(format!("hetero_fog.{name}"), reason)
            }
            other => PipelineError::config("hetero_fog", other.to_string()),
        })
    }
}

/// `[lens_flare]`: radius fraction of the diagonal and peak intensity.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlareSection {
    pub rho: Range,
    pub beta: Range,
}

impl Default for FlareSection {
    fn default() -> Self {
        Self {
            rho: Range::new(0.25, 0.35),
            beta: Range::new(0.55, 0.65),
        }
    }
}

impl FlareSection {
    fn validate(&self) -> Result<()> {
        self.rho.check("lens_flare.rho", f64::MIN_POSITIVE, f64::MAX)?;
        self.beta.check("lens_flare.beta", 0.0, 1.0)
    }
}

/// `[checkerboard]`: probe canvas for the `checkerboard` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckerboardSection {
    pub width: usize,
    pub height: usize,
    pub cell: usize,
}

impl Default for CheckerboardSection {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            cell: 32,
        }
    }
}

/// Resolved corruption selector.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    Single(Corruption),
    /// Strictly positive weights, in canonical corruption order.
    Mix(Vec<(Corruption, f64)>),
}

impl Selection {
    /// Corruptions that can be drawn.
    pub fn corruptions(&self) -> Vec<Corruption> {
        match self {
            Selection::Single(c) => vec![*c],
            Selection::Mix(m) => m.iter().map(|(c, _)| *c).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    pub workers: Option<usize>,
    #[serde(default)]
    pub emit_viz: bool,
    #[serde(default)]
    pub emit_transmission: bool,
    pub corruption: Option<String>,
    pub mix: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub brown_conrady: LensSection,
    #[serde(default)]
    pub grf_turbulence: FlowSection,
    #[serde(default)]
    pub divergence_free: FlowSection,
    #[serde(default)]
    pub tps: TpsSection,
    #[serde(default)]
    pub fog: FogSection,
    #[serde(default)]
    pub hetero_fog: OctaveSection,
    #[serde(default)]
    pub lens_flare: FlareSection,
    #[serde(default)]
    pub checkerboard: CheckerboardSection,
}

impl GenerationConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| PipelineError::ConfigSyntax {
            file: origin.to_path_buf(),
            reason: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file. Relative `input`/`output` paths are
    /// resolved against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text, path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for dir in [&mut cfg.input, &mut cfg.output].into_iter().flatten() {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.selection()?;
        if self.workers == Some(0) {
            return Err(PipelineError::config("workers", "must be at least 1"));
        }
        self.brown_conrady.validate()?;
        self.grf_turbulence.validate("grf_turbulence")?;
        self.divergence_free.validate("divergence_free")?;
        self.tps.validate()?;
        self.fog.params()?;
        self.hetero_fog.spec()?;
        self.lens_flare.validate()?;
        let cb = &self.checkerboard;
        if cb.width < 2 || cb.height < 2 {
            return Err(PipelineError::config("checkerboard", "width and height must be at least 2"));
        }
        if cb.cell == 0 {
            return Err(PipelineError::config("checkerboard.cell", "must be at least 1"));
        }
        Ok(())
    }

    pub fn selection(&self) -> Result<Selection> {
        match (&self.corruption, &self.mix) {
            (Some(_), Some(_)) => Err(PipelineError::config("corruption", "set either corruption or [mix], not both")),
            (None, None) => Err(PipelineError::config("corruption", "missing; set corruption or a [mix] table")),
            (Some(name), None) => name
                .parse()
                .map(Selection::Single)
                .map_err(|e| PipelineError::config("corruption", e)),
            (None, Some(mix)) => {
                let mut entries = Vec::new();
                for (name, &w) in mix {
                    let path = format!("mix.{name}");
                    let c: Corruption = name.parse().map_err(|e| PipelineError::config(&path, e))?;
                    if !(w >= 0.0 && w.is_finite()) {
                        return Err(PipelineError::config(path, format!("weight must be non-negative, got {w}")));
                    }
                    if w > 0.0 {
                        entries.push((c, w));
                    }
                }
                if entries.is_empty() {
                    return Err(PipelineError::config("mix", "weights must sum to a positive value"));
                }
                entries.sort_by_key(|(c, _)| *c);
                Ok(Selection::Mix(entries))
            }
        }
    }

    pub fn worker_count(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}
