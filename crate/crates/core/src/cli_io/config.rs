//! Run configuration: one JSON document per run, unknown keys rejected.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{Contrast, ContrastSampling, IncidentField, Medium, SolverOptions};
use crate::geometry::{Domain, GridSpec, Point};
use crate::herglotz::{DirectionQuadrature, DEFAULT_DIRECTIONS};
use crate::lsm::{Cutoff, TeScanOptions};
use crate::teig::QepOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    Farfield,
    Lsm,
    TeRadial,
    TeGrid,
    ProbeCorner,
    ProbeSurface,
    HerglotzFit,
    CalderonDemo,
    TeScan,
    Invisibility,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        ExperimentKind::Simulate,
        ExperimentKind::Farfield,
        ExperimentKind::Lsm,
        ExperimentKind::TeRadial,
        ExperimentKind::TeGrid,
        ExperimentKind::ProbeCorner,
        ExperimentKind::ProbeSurface,
        ExperimentKind::HerglotzFit,
        ExperimentKind::CalderonDemo,
        ExperimentKind::TeScan,
        ExperimentKind::Invisibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Farfield => "farfield",
            ExperimentKind::Lsm => "lsm",
            ExperimentKind::TeRadial => "te-radial",
            ExperimentKind::TeGrid => "te-grid",
            ExperimentKind::ProbeCorner => "probe-corner",
            ExperimentKind::ProbeSurface => "probe-surface",
            ExperimentKind::HerglotzFit => "herglotz-fit",
            ExperimentKind::CalderonDemo => "calderon-demo",
            ExperimentKind::TeScan => "te-scan",
            ExperimentKind::Invisibility => "invisibility",
        }
    }

    fn needs_medium(self) -> bool {
        !matches!(self, ExperimentKind::CalderonDemo)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown experiment kind '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub domain: Domain,
    pub contrast: Contrast,
    #[serde(default)]
    pub sampling: ContrastSampling,
}

impl MediumConfig {
    pub fn build(&self) -> Result<Medium> {
        Medium::new(self.domain.clone(), self.contrast.clone())?.with_sampling(self.sampling)
    }
}

/// Uniform grid covering the scatterer's bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub h: f64,
    /// Extra cells on every side.
    pub margin: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { h: 0.05, margin: 3 }
    }
}

impl GridConfig {
    pub fn build(&self, domain: &Domain) -> Result<GridSpec> {
        GridSpec::covering(domain, self.h, self.margin)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Equispaced directions for incidence and observation.
    pub directions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { directions: DEFAULT_DIRECTIONS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateParams {
    pub k: f64,
    pub incident: IncidentField,
}

impl Default for SimulateParams {
    fn default() -> Self {
        SimulateParams { k: 2.0, incident: IncidentField::PlaneWave { direction: Point::new(1.0, 0.0) } }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FarfieldParams {
    pub k: f64,
    /// Relative Gaussian noise added to the matrix (seeded by `seed`).
    pub noise_level: f64,
}

impl Default for FarfieldParams {
    fn default() -> Self {
        FarfieldParams { k: 2.0, noise_level: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LsmParams {
    pub k: f64,
    pub noise_level: f64,
    /// Square sampling mesh `[lo, hi]²` with `n` points per side.
    pub mesh_lo: f64,
    pub mesh_hi: f64,
    pub mesh_n: usize,
    /// Fixed Tikhonov parameter; absent uses the default rule.
    pub eps: Option<f64>,
    pub cutoff: Cutoff,
}

impl Default for LsmParams {
    fn default() -> Self {
        LsmParams { k: 2.0, noise_level: 0.0, mesh_lo: -2.0, mesh_hi: 2.0, mesh_n: 41, eps: None, cutoff: Cutoff::Auto }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeRadialParams {
    pub k_min: f64,
    pub k_max: f64,
    pub m_max: usize,
    /// Number of the smallest roots whose eigenpairs are written as grids.
    pub export_pairs: usize,
}

impl Default for TeRadialParams {
    fn default() -> Self {
        TeRadialParams { k_min: 0.5, k_max: 12.0, m_max: 10, export_pairs: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeGridParams {
    /// Window for `λ = k²`.
    pub window: (f64, f64),
    pub max_modes: usize,
    /// Real modes whose eigenpairs are written as grids.
    pub export_pairs: usize,
}

impl Default for TeGridParams {
    fn default() -> Self {
        TeGridParams { window: (1.0, 400.0), max_modes: 10, export_pairs: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeCornerParams {
    pub window: (f64, f64),
    /// Real eigenpairs probed, smallest first.
    pub modes: usize,
    /// Strictly decreasing ball radii.
    pub radii: Vec<f64>,
}

impl Default for ProbeCornerParams {
    fn default() -> Self {
        ProbeCornerParams { window: (1.0, 400.0), modes: 5, radii: vec![0.2, 0.1, 0.05] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSurfaceParams {
    pub m_max: usize,
    pub eps: f64,
}

impl Default for ProbeSurfaceParams {
    fn default() -> Self {
        ProbeSurfaceParams { m_max: 40, eps: 0.1 }
    }
}

/// Field fitted by a Herglotz wave.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FitTarget {
    /// `J_m(kr) e^{imθ}`.
    JacobiAnger { m: usize },
    PlaneWave { direction: Point },
    /// `v` of the radial transmission pair of order `m` at its smallest root;
    /// the run's `k` is ignored.
    RadialTe { m: usize },
    /// `v` of the `index`-th real grid eigenpair in `window`.
    GridTe { window: (f64, f64), index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HerglotzFitParams {
    pub k: f64,
    pub target: FitTarget,
    /// Strictly decreasing Tikhonov parameters.
    pub alphas: Vec<f64>,
}

impl Default for HerglotzFitParams {
    fn default() -> Self {
        HerglotzFitParams {
            k: 2.0,
            target: FitTarget::JacobiAnger { m: 0 },
            alphas: crate::herglotz::default_alpha_sweep(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalderonParams {
    /// Nodes per side of the square grid `[-half_width, half_width)²`.
    pub n: usize,
    pub half_width: f64,
    pub center: Point,
    pub radius: f64,
    pub amplitude: f64,
}

impl Default for CalderonParams {
    fn default() -> Self {
        CalderonParams { n: 32, half_width: 1.0, center: Point::new(0.1, -0.15), radius: 0.6, amplitude: 1.5 }
    }
}

impl CalderonParams {
    pub fn grid(&self) -> Result<GridSpec> {
        let h = 2.0 * self.half_width / self.n as f64;
        GridSpec::new(Point::new(-self.half_width, -self.half_width), h, self.n, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeScanParams {
    pub k_min: f64,
    pub k_max: f64,
    pub step: f64,
    /// Sampling points; absent uses the centroid plus two rings of eight.
    pub probes: Option<Vec<Point>>,
    pub options: TeScanOptions,
}

impl Default for TeScanParams {
    fn default() -> Self {
        TeScanParams { k_min: 7.2, k_max: 7.6, step: 0.02, probes: None, options: TeScanOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InvisibilityParams {
    /// Angular order of the eigenfunction; its smallest root is the TE `k`.
    pub m: usize,
    /// Strictly decreasing fit parameters.
    pub alphas: Vec<f64>,
    /// Wavenumber of the `g ≡ 1` control; absent uses the midpoint of the
    /// two smallest roots of order `m`.
    pub control_k: Option<f64>,
}

impl Default for InvisibilityParams {
    fn default() -> Self {
        InvisibilityParams { m: 0, alphas: (2..=6).map(|e| 10f64.powi(-e)).collect(), control_k: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub medium: Option<MediumConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub qep: QepOptions,
    /// Output directory; the command line's `--out` takes precedence.
    #[serde(default)]
    pub output: Option<String>,
    /// Seed for optional noise.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub simulate: SimulateParams,
    #[serde(default)]
    pub farfield: FarfieldParams,
    #[serde(default)]
    pub lsm: LsmParams,
    #[serde(default)]
    pub te_radial: TeRadialParams,
    #[serde(default)]
    pub te_grid: TeGridParams,
    #[serde(default)]
    pub probe_corner: ProbeCornerParams,
    #[serde(default)]
    pub probe_surface: ProbeSurfaceParams,
    #[serde(default)]
    pub herglotz_fit: HerglotzFitParams,
    #[serde(default)]
    pub calderon_demo: CalderonParams,
    #[serde(default)]
    pub te_scan: TeScanParams,
    #[serde(default)]
    pub invisibility: InvisibilityParams,
}

fn invalid(e: Error) -> Error {
    match e {
        Error::Validation(_) => e,
        other => Error::Validation(other.to_string()),
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg()))
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    require(x > 0.0 && x.is_finite(), || format!("{name} must be a finite positive number, got {x}"))
}

fn decreasing(name: &str, xs: &[f64]) -> Result<()> {
    require(!xs.is_empty() && xs.iter().all(|&x| x > 0.0 && x.is_finite()), || format!("{name} must be non-empty and positive"))?;
    require(xs.windows(2).all(|w| w[1] < w[0]), || format!("{name} must be strictly decreasing"))
}

fn window(name: &str, w: (f64, f64)) -> Result<()> {
    require(w.0 > 0.0 && w.1 > w.0 && w.1.is_finite(), || format!("{name} must satisfy 0 < a < b, got [{}, {}]", w.0, w.1))
}

fn noise(x: f64) -> Result<()> {
    require((0.0..=1.0).contains(&x), || format!("noise_level must lie in [0, 1], got {x}"))
}

impl RunConfig {
    /// A config with every section at its default.
    pub fn new(experiment: ExperimentKind, medium: Option<MediumConfig>) -> Self {
        RunConfig {
            experiment,
            medium,
            grid: GridConfig::default(),
            quadrature: QuadratureConfig::default(),
            solver: SolverOptions::default(),
            qep: QepOptions::default(),
            output: None,
            seed: 0,
            simulate: Default::default(),
            farfield: Default::default(),
            lsm: Default::default(),
            te_radial: Default::default(),
            te_grid: Default::default(),
            probe_corner: Default::default(),
            probe_surface: Default::default(),
            herglotz_fit: Default::default(),
            calderon_demo: Default::default(),
            te_scan: Default::default(),
            invisibility: Default::default(),
        }
    }

    /// Parses and validates; JSON syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            if e.is_syntax() || e.is_eof() {
                Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
            } else {
                Error::Validation(e.to_string())
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn medium(&self) -> Result<Medium> {
        self.medium
            .as_ref()
            .ok_or_else(|| Error::Validation(format!("experiment '{}' needs a medium", self.experiment)))?
            .build()
            .map_err(invalid)
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        self.grid.build(&self.medium()?.domain).map_err(invalid)
    }

    pub fn quadrature(&self) -> Result<DirectionQuadrature> {
        DirectionQuadrature::new(self.quadrature.directions).map_err(invalid)
    }

    /// Every range check for the selected experiment; failures are
    /// [`Error::Validation`].
    pub fn validate(&self) -> Result<()> {
        use ExperimentKind as E;
        if self.experiment.needs_medium() {
            self.grid_spec()?;
        } else if let Some(m) = &self.medium {
            m.build().map_err(invalid)?;
        }
        self.quadrature()?;
        positive("grid.h", self.grid.h)?;
        positive("solver.gmres_tol", self.solver.gmres_tol)?;
        require(self.solver.gmres_restart > 0 && self.solver.gmres_max_iter > 0, || "GMRES restart and iteration limits must be > 0".into())?;
        positive("qep.tol", self.qep.tol)?;
        require(self.qep.shifts > 0 && self.qep.block > 0 && self.qep.krylov_dim >= 2 * self.qep.block, || {
            "qep needs shifts > 0, block > 0 and krylov_dim >= 2 block".into()
        })?;
        match self.experiment {
            E::Simulate => {
                positive("simulate.k", self.simulate.k)?;
                self.simulate.incident.validate(&self.medium()?.domain).map_err(invalid)?;
            }
            E::Farfield => {
                positive("farfield.k", self.farfield.k)?;
                noise(self.farfield.noise_level)?;
            }
            E::Lsm => {
                let p = &self.lsm;
                positive("lsm.k", p.k)?;
                noise(p.noise_level)?;
                require(p.mesh_hi > p.mesh_lo && p.mesh_n >= 2, || "lsm mesh needs mesh_hi > mesh_lo and mesh_n >= 2".into())?;
                if let Some(e) = p.eps {
                    positive("lsm.eps", e)?;
                }
                if let Cutoff::Value(c) = p.cutoff {
                    positive("lsm.cutoff", c)?;
                }
            }
            E::TeRadial => {
                let p = &self.te_radial;
                positive("te_radial.k_min", p.k_min)?;
                require(p.k_max > p.k_min && p.k_max.is_finite(), || "te_radial.k_max must exceed k_min".into())?;
                self.constant_disk()?;
            }
            E::TeGrid => {
                window("te_grid.window", self.te_grid.window)?;
                require(self.te_grid.max_modes > 0, || "te_grid.max_modes must be > 0".into())?;
            }
            E::ProbeCorner => {
                let p = &self.probe_corner;
                window("probe_corner.window", p.window)?;
                require(p.modes > 0, || "probe_corner.modes must be > 0".into())?;
                decreasing("probe_corner.radii", &p.radii)?;
                require(matches!(self.medium()?.domain, Domain::Polygon { .. }), || "corner probes need a polygon".into())?;
            }
            E::ProbeSurface => {
                positive("probe_surface.eps", self.probe_surface.eps)?;
                self.constant_disk()?;
            }
            E::HerglotzFit => {
                let p = &self.herglotz_fit;
                positive("herglotz_fit.k", p.k)?;
                decreasing("herglotz_fit.alphas", &p.alphas)?;
                match &p.target {
                    FitTarget::PlaneWave { direction } => {
                        require((direction.norm() - 1.0).abs() <= 1e-12, || "plane-wave direction must be unit".into())?
                    }
                    FitTarget::RadialTe { .. } => {
                        self.constant_disk()?;
                    }
                    FitTarget::GridTe { window: w, .. } => window("herglotz_fit.target.window", *w)?,
                    FitTarget::JacobiAnger { .. } => {}
                }
            }
            E::CalderonDemo => {
                let p = &self.calderon_demo;
                require(p.n >= 8, || format!("calderon_demo.n must be >= 8, got {}", p.n))?;
                positive("calderon_demo.half_width", p.half_width)?;
                positive("calderon_demo.radius", p.radius)?;
                require(p.amplitude.is_finite(), || "calderon_demo.amplitude must be finite".into())?;
                p.grid().map_err(invalid)?;
            }
            E::TeScan => {
                let p = &self.te_scan;
                positive("te_scan.k_min", p.k_min)?;
                require(p.k_max > p.k_min && p.k_max.is_finite(), || "te_scan.k_max must exceed k_min".into())?;
                require(p.step > 0.0 && p.step <= 0.02, || format!("te_scan.step must lie in (0, 0.02], got {}", p.step))?;
                noise(p.options.noise_level)?;
                positive("te_scan.options.eps_factor", p.options.eps_factor)?;
                if let Some(e) = p.options.eps {
                    positive("te_scan.options.eps", e)?;
                }
                if let Some(pr) = &p.probes {
                    require(!pr.is_empty(), || "te_scan.probes must not be empty".into())?;
                }
            }
            E::Invisibility => {
                let p = &self.invisibility;
                decreasing("invisibility.alphas", &p.alphas)?;
                if let Some(k) = p.control_k {
                    positive("invisibility.control_k", k)?;
                }
                self.constant_disk()?;
            }
        }
        Ok(())
    }

    /// Radius and contrast of a constant disk centred at the origin.
    pub fn constant_disk(&self) -> Result<(f64, f64)> {
        let med = self.medium()?;
        match (&med.domain, med.constant_value()) {
            (Domain::Disk { center, radius }, Some(v)) if center.norm() == 0.0 && v != 0.0 => Ok((*radius, v)),
            _ => Err(Error::Validation(format!(
                "experiment '{}' needs a nonzero constant contrast on a disk centred at the origin",
                self.experiment
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "experiment": "simulate",
        "medium": {"domain": {"disk": {"center": [0, 0], "radius": 1}}, "contrast": {"constant": 1.0}}
    }"#;

    #[test]
    fn minimal_config_parses() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.experiment, ExperimentKind::Simulate);
        assert_eq!(c.simulate.k, 2.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("\"experiment\"", "\"colour\": 1, \"experiment\"");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Validation(_))));
        let nested = MINIMAL.replace("\"radius\": 1", "\"radius\": 1, \"r\": 2");
        assert!(RunConfig::from_json(&nested).is_err());
        let section = MINIMAL.replace("\"experiment\"", "\"lsm\": {\"kk\": 1}, \"experiment\"");
        assert!(matches!(RunConfig::from_json(&section), Err(Error::Validation(_))));
    }

    #[test]
    fn non_positive_index_is_validation_error() {
        let text = MINIMAL.replace("1.0", "-1.0");
        let e = RunConfig::from_json(&text).unwrap_err();
        assert!(matches!(e, Error::Validation(_)), "{e:?}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn syntax_error_has_position() {
        match RunConfig::from_json("{\n  \"experiment\": \"lsm\",,\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kinds_round_trip_through_names() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
    }

    #[test]
    fn full_config_echo_round_trips() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        let echo = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&echo).unwrap(), c);
    }
}
