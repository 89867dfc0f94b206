//! `RunConfig`: the TOML file driving every verb.

use std::path::{Path, PathBuf};

use hyperleaf_core::boundary::{IdealCurve, PlusSide};
use hyperleaf_core::geometry::IdealPoint;
use hyperleaf_core::solver::SolverConfig;
use hyperleaf_core::Vec3;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

/// Largest |H| a config may request.
pub const H_MAX: f64 = 0.95;

pub const CHECKS: [&str; 8] = [
    "pairwise_disjoint",
    "probe_monotone",
    "fill_scan",
    "hull_containment",
    "area_bound",
    "boundary_slope",
    "translate_disjointness",
    "gap_scan",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub curve: CurveSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// `ρ(θ) = radius + Σ aₖ cos kθ + bₖ sin kθ` about `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default = "north")]
    pub center: [f64; 3],
    pub radius: f64,
    #[serde(default)]
    pub harmonics: Vec<[f64; 2]>,
    #[serde(default = "inside")]
    pub plus_side: PlusSide,
}

fn north() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn inside() -> PlusSide {
    PlusSide::Inside
}

/// Either an explicit `grid` or `range` + `step`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub grid: Option<Vec<f64>>,
    pub range: Option<[f64; 2]>,
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    pub checks: Vec<String>,
    pub probes: usize,
    pub hull_budget: usize,
    pub hull_tolerance: f64,
    /// Largest admissible crossing jump; derived from the grid when absent.
    pub fill_bound: Option<f64>,
    pub area_radii: Vec<f64>,
    pub slope_tolerance: f64,
    pub slope_abs_tolerance: f64,
    pub translate: [f64; 2],
    pub gap_h0: Vec<f64>,
    pub gap_dh: Vec<f64>,
    pub gap_probes: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            checks: CHECKS[..7].iter().map(|s| s.to_string()).collect(),
            probes: 200,
            hull_budget: 256,
            hull_tolerance: 1e-3,
            fill_bound: None,
            area_radii: vec![1.0, 2.0, 3.0],
            slope_tolerance: 0.1,
            slope_abs_tolerance: 1e-2,
            translate: [1.1, 1.3],
            gap_h0: vec![0.0, 0.3],
            gap_dh: vec![0.2, 0.1, 0.05, 0.025],
            gap_probes: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub formats: Vec<String>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: PathBuf::from("out"), formats: vec!["obj".into(), "json".into(), "csv".into()] }
    }
}

impl OutputSpec {
    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig, Failure> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Failure::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.curve()?;
        self.solver.validate().map_err(|e| Failure::Config(e.to_string()))?;
        if let Some(grid) = self.grid_opt()? {
            check_h_values(&grid)?;
        }
        let v = &self.verify;
        if let Some(bad) = v.checks.iter().find(|c| !CHECKS.contains(&c.as_str())) {
            return Err(Failure::Config(format!("unknown check {bad:?}; known checks: {}", CHECKS.join(", "))));
        }
        let positive = [
            ("hull_tolerance", v.hull_tolerance),
            ("slope_tolerance", v.slope_tolerance),
            ("slope_abs_tolerance", v.slope_abs_tolerance),
            ("fill_bound", v.fill_bound.unwrap_or(1.0)),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, x)| !(*x > 0.0)) {
            return Err(Failure::Config(format!("verify.{name} must be positive")));
        }
        if v.probes == 0 || v.hull_budget == 0 || v.gap_probes == 0 {
            return Err(Failure::Config("probe counts and hull budget must be at least 1".into()));
        }
        if v.area_radii.iter().any(|r| !(*r > 0.0)) || v.gap_dh.iter().any(|d| !(*d > 0.0)) {
            return Err(Failure::Config("area radii and gap steps must be positive".into()));
        }
        if v.translate.iter().any(|t| !(*t > 0.0)) || v.translate[0] == v.translate[1] {
            return Err(Failure::Config("verify.translate needs two distinct positive dilations".into()));
        }
        check_h_values(&v.gap_h0)?;
        if let Some(f) = self.output.formats.iter().find(|f| !["obj", "json", "csv"].contains(&f.as_str())) {
            return Err(Failure::Config(format!("unknown output format {f:?}")));
        }
        Ok(())
    }

    pub fn curve(&self) -> Result<IdealCurve, Failure> {
        let c = &self.curve;
        let center = IdealPoint::from_direction(Vec3::new(c.center[0], c.center[1], c.center[2]))
            .map_err(|e| Failure::Config(format!("curve.center: {e}")))?;
        IdealCurve::new(center, c.radius, c.harmonics.iter().map(|h| (h[0], h[1])).collect(), c.plus_side)
            .map_err(|e| Failure::Config(format!("curve: {e}")))
    }

    fn grid_opt(&self) -> Result<Option<Vec<f64>>, Failure> {
        let s = &self.sweep;
        match (&s.grid, s.range, s.step) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                Err(Failure::Config("sweep: give either grid or range + step, not both".into()))
            }
            (Some(g), None, None) => Ok(Some(g.clone())),
            (None, Some([lo, hi]), Some(step)) => {
                if !(step > 0.0) || !(hi >= lo) {
                    return Err(Failure::Config("sweep: need step > 0 and range[0] ≤ range[1]".into()));
                }
                let n = ((hi - lo) / step + 1e-9).floor() as usize;
                // Snap to 1e-12 so that the grid hits 0 exactly.
                Ok(Some((0..=n).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12 + 0.0).collect()))
            }
            (None, None, None) => Ok(None),
            _ => Err(Failure::Config("sweep: range and step go together".into())),
        }
    }

    /// The H grid of the sweep block.
    pub fn grid(&self) -> Result<Vec<f64>, Failure> {
        let g = self.grid_opt()?.ok_or_else(|| Failure::Config("config has no sweep block".into()))?;
        if g.is_empty() {
            return Err(Failure::Config("sweep grid is empty".into()));
        }
        if g.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Failure::Config("sweep grid must be strictly increasing".into()));
        }
        Ok(g)
    }

    /// SHA-256 of everything that determines the artifacts (the output
    /// block excluded).
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.output = OutputSpec::default();
        let json = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

pub fn check_h_values(hs: &[f64]) -> Result<(), Failure> {
    for &h in hs {
        if !(h.abs() < 1.0) {
            return Err(Failure::Config(format!(
                "H = {h} is not allowed: leaves asymptotic to a curve need |H| < 1"
            )));
        }
        if !(h.abs() <= H_MAX) {
            return Err(Failure::Config(format!("H = {h} exceeds the supported range [-{H_MAX}, {H_MAX}]")));
        }
    }
    Ok(())
}
