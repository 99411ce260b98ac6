//! Executes one validated [`RunConfig`] and writes its artifacts and manifest.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cli_io::config::{ExperimentKind, FitTarget, RunConfig};
use crate::cli_io::formats::{far_field_json, grid_csv, real_grid_csv, to_json, write_atomic, Artifact};
use crate::error::{Error, Result};
use crate::forward::{solve_scattering, ComplexField2D, Medium};
use crate::geometry::{corners, Domain, GridSpec, Point};
use crate::herglotz::{
    assemble_far_field_matrix, density_growth_profile, herglotz_eval, FitProblem,
    HerglotzDensity,
};
use crate::lsm::{add_relative_noise, classify, indicator_map, jaccard, te_scan, SamplingMesh, TeScanOptions};
use crate::probes::{
    calderon_recover, corner_profile, localization_scan, smallest_radial_root, smooth_bump, InvisibilityProbe,
    XiLattice,
};
use crate::specialfn::bessel_j;
use crate::teig::{qep_assemble, qep_pairs, qep_solve, radial_eigenpair, radial_te_roots, recover_pair, with_residuals};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
}

/// Everything needed to reproduce and audit a run. Only `timings` varies
/// between identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub experiment: ExperimentKind,
    /// The config as executed, command-line overrides applied.
    pub config: RunConfig,
    pub artifacts: Vec<Artifact>,
    /// Headline numbers of the experiment.
    pub summary: Value,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

impl Manifest {
    /// The manifest with timing fields zeroed, for comparisons.
    pub fn without_timings(&self) -> Manifest {
        Manifest { timings: Timings { total_seconds: 0.0 }, ..self.clone() }
    }
}

struct Outputs<'a> {
    dir: &'a Path,
    artifacts: Vec<Artifact>,
    warnings: Vec<String>,
}

impl Outputs<'_> {
    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        self.artifacts.push(write_atomic(self.dir, name, body.as_bytes())?);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.text(name, &to_json(value)?)
    }

    fn grid(&mut self, name: &str, field: &ComplexField2D, k: f64) -> Result<()> {
        self.text(name, &grid_csv(field, k))
    }
}

/// Output directory: `--out` first, then the config's `output`.
pub fn output_dir(config: &RunConfig, out: Option<&Path>) -> Result<PathBuf> {
    match (out, &config.output) {
        (Some(p), _) => Ok(p.to_path_buf()),
        (None, Some(s)) => Ok(PathBuf::from(s)),
        (None, None) => Err(Error::Validation("no output directory: pass --out or set \"output\"".into())),
    }
}

/// Validates, runs, writes every artifact atomically and finally the
/// manifest. Nothing is written outside `dir`.
pub fn run(config: &RunConfig, dir: &Path) -> Result<Manifest> {
    config.validate()?;
    std::fs::create_dir_all(dir)?;
    let t0 = Instant::now();
    let mut out = Outputs { dir, artifacts: Vec::new(), warnings: Vec::new() };
    use ExperimentKind as E;
    let summary = match config.experiment {
        E::Simulate => simulate(config, &mut out)?,
        E::Farfield => farfield(config, &mut out)?,
        E::Lsm => lsm(config, &mut out)?,
        E::TeRadial => te_radial(config, &mut out)?,
        E::TeGrid => te_grid(config, &mut out)?,
        E::ProbeCorner => probe_corner(config, &mut out)?,
        E::ProbeSurface => probe_surface(config, &mut out)?,
        E::HerglotzFit => herglotz_fit(config, &mut out)?,
        E::CalderonDemo => calderon_demo(config, &mut out)?,
        E::TeScan => scan(config, &mut out)?,
        E::Invisibility => invisibility(config, &mut out)?,
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: config.experiment,
        config: config.clone(),
        artifacts: out.artifacts,
        summary,
        warnings: out.warnings,
        timings: Timings { total_seconds: t0.elapsed().as_secs_f64() },
    };
    write_atomic(dir, MANIFEST_NAME, to_json(&manifest)?.as_bytes())?;
    Ok(manifest)
}

fn domain_mask(spec: &GridSpec, domain: &Domain) -> Vec<bool> {
    spec.points().map(|p| domain.contains(p)).collect()
}

fn simulate(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let (med, spec, quad) = (cfg.medium()?, cfg.grid_spec()?, cfg.quadrature()?);
    let k = cfg.simulate.k;
    let sol = solve_scattering(&med, k, &cfg.simulate.incident, &spec, &cfg.solver)?;
    out.warnings.extend(sol.report.warnings.iter().cloned());
    out.grid("total.csv", &sol.total, k)?;
    out.grid("scattered.csv", &sol.scattered, k)?;
    let ff = crate::forward::far_field(&med, k, &sol.total, &quad.directions())?;
    let rows: Vec<Value> = (0..quad.len())
        .map(|j| json!({"angle": quad.angle(j), "re": ff[j].re, "im": ff[j].im}))
        .collect();
    out.json("far_field.json", &json!({"k": k, "n_dir": quad.len(), "pattern": rows}))?;
    out.json("solve_report.json", &sol.report)?;
    let ff_norm = (ff.iter().map(|z| z.norm_sqr()).sum::<f64>() * quad.weight()).sqrt();
    Ok(json!({
        "unknowns": sol.report.unknowns,
        "relative_residual": sol.report.relative_residual,
        "far_field_norm": ff_norm,
    }))
}

fn far_field_matrix(cfg: &RunConfig, k: f64, noise: f64) -> Result<crate::herglotz::FarFieldMatrix> {
    let f = assemble_far_field_matrix(&cfg.medium()?, k, &cfg.quadrature()?, &cfg.grid_spec()?, &cfg.solver)?;
    Ok(if noise > 0.0 { add_relative_noise(&f, noise, cfg.seed) } else { f })
}

fn farfield(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = &cfg.farfield;
    let f = far_field_matrix(cfg, p.k, p.noise_level)?;
    out.text("far_field_matrix.json", &far_field_json(&f))?;
    Ok(json!({
        "k": p.k,
        "n_dir": f.n(),
        "frobenius": f.frobenius(),
        "reciprocity_defect": f.reciprocity_defect()?,
    }))
}

fn lsm(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = &cfg.lsm;
    let med = cfg.medium()?;
    let f = far_field_matrix(cfg, p.k, p.noise_level)?;
    let mesh = SamplingMesh::square(p.mesh_lo, p.mesh_hi, p.mesh_n)?;
    let mut res = indicator_map(&f, &mesh, p.eps)?;
    let (mask, cutoff) = classify(&mut res, p.cutoff)?;
    out.text("indicator.csv", &real_grid_csv(&mesh.spec, &res.indicator, &mask, p.k)?)?;
    let truth = domain_mask(&mesh.spec, &med.domain);
    let overlap = jaccard(&mask, &truth);
    let detected: Vec<Point> = mesh.points().into_iter().zip(&mask).filter(|(_, &m)| m).map(|(z, _)| z).collect();
    out.json("detections.json", &json!({"k": p.k, "eps": res.eps, "cutoff": cutoff, "points": detected}))?;
    Ok(json!({"eps": res.eps, "cutoff": cutoff, "detected": detected.len(), "jaccard": overlap}))
}

fn te_radial(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = &cfg.te_radial;
    let (radius, v) = cfg.constant_disk()?;
    let roots = radial_te_roots(p.m_max, p.k_min, p.k_max, radius, v)?;
    out.json("eigenvalues.json", &roots)?;
    let spec = cfg.grid_spec()?;
    let med = cfg.medium()?;
    let mut residuals = Vec::new();
    for (i, r) in roots.iter().take(p.export_pairs).enumerate() {
        let (pair, how) = radial_eigenpair(r.m, r.k, radius, v, &spec)?;
        let pair = with_residuals(pair, &med)?;
        out.grid(&format!("pair_{i}_u.csv"), &pair.u, r.k)?;
        out.grid(&format!("pair_{i}_v.csv"), &pair.v, r.k)?;
        residuals.push(json!({"m": r.m, "k": r.k, "normalization": how, "residuals": pair.residuals}));
    }
    out.json("pair_residuals.json", &residuals)?;
    Ok(json!({"roots": roots.len(), "smallest": roots.first()}))
}

fn te_grid(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = &cfg.te_grid;
    let disc = qep_assemble(&cfg.medium()?, &cfg.grid_spec()?)?;
    let modes = qep_solve(&disc, p.window, p.max_modes, &cfg.qep)?;
    let table: Vec<Value> = modes
        .iter()
        .map(|m| {
            json!({
                "lambda": [m.lambda.re, m.lambda.im],
                "real": m.is_real(),
                "k": if m.is_real() { Some(m.lambda.re.sqrt()) } else { None },
                "pencil_residual": m.residual,
            })
        })
        .collect();
    out.json("eigenvalues.json", &json!({"unknowns": disc.dim(), "window": p.window, "modes": table}))?;
    let mut residuals = Vec::new();
    for (i, m) in modes.iter().filter(|m| m.is_real()).take(p.export_pairs).enumerate() {
        let pair = recover_pair(&m.w, m.lambda.re, &disc)?;
        out.grid(&format!("pair_{i}_u.csv"), &pair.u, pair.k)?;
        out.grid(&format!("pair_{i}_v.csv"), &pair.v, pair.k)?;
        residuals.push(json!({"k": pair.k, "residuals": pair.residuals}));
    }
    out.json("pair_residuals.json", &residuals)?;
    let smallest = modes.iter().find(|m| m.is_real()).map(|m| m.lambda.re);
    Ok(json!({
        "unknowns": disc.dim(),
        "eigenvalues": modes.len(),
        "complex": modes.iter().filter(|m| !m.is_real()).count(),
        "smallest_real_lambda": smallest,
    }))
}

fn probe_corner(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = &cfg.probe_corner;
    let med = cfg.medium()?;
    let disc = qep_assemble(&med, &cfg.grid_spec()?)?;
    let pairs = qep_pairs(&disc, p.window, p.modes, &cfg.qep)?;
    if pairs.len() < p.modes {
        out.warnings.push(format!("only {} real eigenpairs in the window, {} requested", pairs.len(), p.modes));
    }
    let cs = corners(&med.domain);
    let mut records = Vec::new();
    let mut csv = String::from("mode,k,corner,r,corner_avg,interior_avg,edge_avg,ratio\n");
    let mut worst = Vec::new();
    for (i, pair) in pairs.iter().enumerate() {
        let mut max_ratio = 0.0f64;
        for c in &cs {
            let prof = corner_profile(&pair.v, &med.domain, c, &p.radii)?;
            let ratios = prof.corner_to_interior();
            for (j, r) in prof.radii.iter().enumerate() {
                csv.push_str(&format!(
                    "{i},{},{},{r},{},{},{},{}\n",
                    pair.k, c.index, prof.corner_avg[j], prof.interior_avg[j], prof.edge_avg[j], ratios[j]
                ));
            }
            max_ratio = max_ratio.max(*ratios.last().unwrap());
            records.push(json!({"mode": i, "k": pair.k, "corner_index": c.index, "profile": prof, "ratio": ratios}));
        }
        worst.push(max_ratio);
    }
    out.text("corner_profile.csv", &csv)?;
    out.json("corner_probes.json", &records)?;
    Ok(json!({
        "modes": pairs.len(),
        "k": pairs.iter().map(|p| p.k).collect::<Vec<_>>(),
        "max_ratio_at_smallest_radius": worst,
    }))
}

fn probe_surface(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = &cfg.probe_surface;
    let recs = localization_scan(&cfg.medium()?, p.m_max, p.eps, &cfg.grid_spec()?)?;
    let mut csv = String::from("m,k,eps,rho_u,rho_v,running_max\n");
    for r in &recs {
        csv.push_str(&format!("{},{},{},{},{},{}\n", r.m, r.k, r.eps, r.rho_u, r.rho_v, r.running_max));
    }
    out.text("localization.csv", &csv)?;
    out.json("localization.json", &recs)?;
    Ok(json!({"m_max": p.m_max, "eps": p.eps, "running_max": recs.last().map(|r| r.running_max)}))
}

/// Target field of a Herglotz fit and the wavenumber it lives at.
fn fit_target(cfg: &RunConfig) -> Result<(ComplexField2D, f64)> {
    let p = &cfg.herglotz_fit;
    let med = cfg.medium()?;
    let spec = cfg.grid_spec()?;
    let mask = domain_mask(&spec, &med.domain);
    Ok(match &p.target {
        FitTarget::JacobiAnger { m } => {
            let m = *m;
            let f = ComplexField2D::from_fn(spec, mask, |x| {
                Complex64::from_polar(bessel_j(m, p.k * x.norm()), m as f64 * x.angle())
            });
            (f, p.k)
        }
        FitTarget::PlaneWave { direction } => {
            (ComplexField2D::from_fn(spec, mask, |x| Complex64::from_polar(1.0, p.k * x.dot(*direction))), p.k)
        }
        FitTarget::RadialTe { m } => {
            let (radius, v) = cfg.constant_disk()?;
            let k = smallest_radial_root(*m, radius, v)?;
            (radial_eigenpair(*m, k, radius, v, &spec)?.0.v, k)
        }
        FitTarget::GridTe { window, index } => {
            let disc = qep_assemble(&med, &spec)?;
            let pairs = qep_pairs(&disc, *window, index + 1, &cfg.qep)?;
            let pair = pairs.into_iter().nth(*index).ok_or_else(|| {
                Error::Convergence(format!("fewer than {} real eigenpairs in [{}, {}]", index + 1, window.0, window.1))
            })?;
            (pair.v, pair.k)
        }
    })
}

fn herglotz_fit(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let (target, k) = fit_target(cfg)?;
    let prof = density_growth_profile(&target, k, &cfg.quadrature()?, &cfg.herglotz_fit.alphas)?;
    let mut csv = String::from("alpha,error,relative_error,density_norm\n");
    for r in &prof.rows {
        csv.push_str(&format!("{},{},{},{}\n", r.alpha, r.error, r.relative_error, r.density_norm));
    }
    out.text("growth.csv", &csv)?;
    out.json("growth.json", &json!({"k": k, "profile": prof}))?;
    Ok(json!({
        "k": k,
        "growth_ratio": prof.growth_ratio,
        "norm_strictly_increasing": prof.norm_strictly_increasing,
        "error_nonincreasing": prof.error_nonincreasing,
    }))
}

fn calderon_demo(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = &cfg.calderon_demo;
    let spec = p.grid()?;
    let dv = smooth_bump(&spec, p.center, p.radius, p.amplitude);
    let res = calderon_recover(&spec, &dv, &XiLattice::conjugate(&spec))?;
    let all = vec![true; spec.len()];
    out.text("delta_v.csv", &real_grid_csv(&spec, &dv, &all, 0.0)?)?;
    out.text("recovered.csv", &real_grid_csv(&spec, &res.recovered, &all, 0.0)?)?;
    let summary = json!({"relative_error": res.relative_error, "imaginary_residue": res.imaginary_residue});
    out.json("calderon.json", &summary)?;
    Ok(summary)
}

/// The centroid plus eight points on each of the rings at 0.3 and 0.6 of the
/// inradius-like scale `sqrt(area / π)`.
pub fn default_probes(domain: &Domain) -> Vec<Point> {
    let c = domain.centroid();
    let s = (domain.area() / PI).sqrt();
    let mut probes = vec![c];
    for r in [0.3, 0.6] {
        probes.extend((0..8).map(|i| c + Point::from_polar(r * s, i as f64 * PI / 4.0)));
    }
    probes
}

fn scan(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = &cfg.te_scan;
    let med = cfg.medium()?;
    let probes = p.probes.clone().unwrap_or_else(|| default_probes(&med.domain));
    let opts = TeScanOptions { seed: cfg.seed, ..p.options.clone() };
    let res = te_scan(&med, (p.k_min, p.k_max), p.step, &probes, &cfg.grid_spec()?, &cfg.solver, &opts)?;
    let mut csv = String::from("k,indicator\n");
    for (k, v) in res.ks.iter().zip(&res.curve) {
        csv.push_str(&format!("{k},{v}\n"));
    }
    out.text("scan.csv", &csv)?;
    out.json("peaks.json", &json!({"median": res.median, "peaks": res.peaks}))?;
    Ok(json!({"points": res.ks.len(), "peaks": res.peaks.iter().map(|p| p.k).collect::<Vec<_>>()}))
}

/// `||H g||_{L²(Ω)}` on the grid.
fn herglotz_norm(g: &HerglotzDensity, k: f64, spec: &GridSpec, med: &Medium) -> Result<f64> {
    let pts: Vec<Point> = spec.points().filter(|p| med.domain.contains(*p)).collect();
    let vals = herglotz_eval(g, k, &pts)?;
    Ok((vals.iter().map(|z| z.norm_sqr()).sum::<f64>() * spec.cell_area()).sqrt())
}

fn invisibility(cfg: &RunConfig, out: &mut Outputs) -> Result<Value> {
    let p = &cfg.invisibility;
    let (radius, v) = cfg.constant_disk()?;
    let (med, spec, quad) = (cfg.medium()?, cfg.grid_spec()?, cfg.quadrature()?);
    let k_te = smallest_radial_root(p.m, radius, v)?;
    let (pair, _) = radial_eigenpair(p.m, k_te, radius, v, &spec)?;
    let problem = FitProblem::new(&pair.v, k_te, &quad)?;
    let probe = InvisibilityProbe::new(&med, k_te, &spec, &cfg.solver, quad.len(), Some(&[k_te]))?;
    let mut rows = Vec::new();
    for &alpha in &p.alphas {
        let fit = problem.solve(alpha)?;
        let rep = probe.defect(&fit.density, fit.error)?;
        rows.push(json!({
            "alpha": alpha,
            "fit_error": fit.error,
            "density_norm": rep.density_norm,
            "far_field_norm": rep.far_field_norm,
        }));
    }
    let control_k = match p.control_k {
        Some(k) => k,
        None => {
            let next = radial_te_roots(p.m, k_te + 1e-2, k_te + 20.0 / radius, radius, v)?
                .into_iter()
                .find(|r| r.m == p.m)
                .ok_or_else(|| Error::Convergence("no second root of the same order for the control".into()))?;
            0.5 * (k_te + next.k)
        }
    };
    // g ≡ const, scaled so the incident wave has unit norm on Ω
    let ones = HerglotzDensity::from_fn(quad, |_| Complex64::new(1.0, 0.0));
    let s = herglotz_norm(&ones, control_k, &spec, &med)?;
    let g = HerglotzDensity::from_fn(quad, |_| Complex64::new(1.0 / s, 0.0));
    let control = InvisibilityProbe::new(&med, control_k, &spec, &cfg.solver, quad.len(), None)?.defect(&g, 0.0)?;
    let norms: Vec<f64> = rows.iter().map(|r| r["far_field_norm"].as_f64().unwrap_or(f64::NAN)).collect();
    let monotone = norms.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let last = *norms.last().unwrap();
    let summary = json!({
        "k": k_te,
        "m": p.m,
        "far_field_norms": norms,
        "monotone_with_slack": monotone,
        "control_k": control_k,
        "control_far_field_norm": control.far_field_norm,
        "control_ratio": control.far_field_norm / last,
    });
    out.json("invisibility.json", &json!({"rows": rows, "summary": summary}))?;
    Ok(summary)
}
