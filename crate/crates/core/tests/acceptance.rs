//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use translab::cli_io::{run, MediumConfig, RunConfig};
use translab::cli_io::{ExperimentKind, FitTarget};
use translab::forward::{
    equispaced_directions, far_field, solve_scattering, ComplexField2D, Contrast, ContrastSampling, IncidentField,
    Medium, MieDisk, SolverOptions,
};
use translab::geometry::{corners, Domain, GridSpec, Point};
use translab::herglotz::{
    assemble_far_field_matrix, density_growth_profile, herglotz_eval, herglotz_fit, DirectionQuadrature,
    HerglotzDensity,
};
use translab::lsm::{classify, indicator_map, jaccard, median, te_scan, Cutoff, SamplingMesh, TeScanOptions};
use translab::probes::{
    calderon_recover, cgo_pair, corner_profile, localization_scan, smooth_bump, XiLattice,
};
use translab::probes::cgo::bilinear;
use translab::specialfn::bessel_j;
use translab::teig::{
    qep_assemble, qep_solve, radial_eigenpair, radial_te_roots, recover_pair, te_residual, QepOptions,
    TransmissionEigenpair,
};
use translab::Result;

type Check = Result<(bool, String)>;

fn unit_disk(v: f64) -> Result<Medium> {
    Medium::constant(Domain::disk(Point::ORIGIN, 1.0)?, v)
}

fn unit_square(v: f64) -> Result<Medium> {
    Medium::constant(Domain::square(Point::ORIGIN, 1.0)?, v)
}

/// Nodes on the square's edges with three margin cells.
fn square_grid(cells: usize) -> Result<GridSpec> {
    let h = 1.0 / cells as f64;
    GridSpec::new(Point::new(-3.0 * h, -3.0 * h), h, cells + 7, cells + 7)
}

fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Real eigenpairs of the unit square with `V = 2` at `h = 1/80`, shared by
/// several criteria.
struct SquareModes {
    lambdas: Vec<f64>,
    pairs: Vec<TransmissionEigenpair>,
}

fn square_modes(cells: usize, count: usize) -> Result<SquareModes> {
    let disc = qep_assemble(&unit_square(2.0)?, &square_grid(cells)?)?;
    let modes = qep_solve(&disc, (1.0, 400.0), usize::MAX, &QepOptions::default())?;
    let real: Vec<_> = modes.into_iter().filter(|m| m.is_real()).collect();
    let lambdas = real.iter().map(|m| m.lambda.re).collect();
    let pairs = real.iter().take(count).map(|m| recover_pair(&m.w, m.lambda.re, &disc)).collect::<Result<_>>()?;
    Ok(SquareModes { lambdas, pairs })
}

fn c1_forward_oracle() -> Check {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
    pool.install(|| {
        let t0 = Instant::now();
        let med = unit_disk(1.0)?;
        let spec = GridSpec::covering(&med.domain, 0.02, 3)?;
        let sol = solve_scattering(&med, 2.0, &IncidentField::plane_wave_angle(0.0), &spec, &SolverOptions::default())?;
        let dirs = equispaced_directions(128);
        let ff = far_field(&med, 2.0, &sol.total, &dirs)?;
        let secs = t0.elapsed().as_secs_f64();
        let mie = MieDisk::new(1.0, 1.0, 2.0, Point::new(1.0, 0.0), 30)?;
        let exact = ComplexField2D::from_fn(spec, sol.scattered.mask.clone(), |p| mie.total(p) - mie.incident(p));
        let e_us = sol.scattered.relative_error_on(&exact, &vec![true; spec.len()])?;
        let ff_exact: Vec<Complex64> = dirs.iter().map(|d| mie.far_field(d.angle())).collect();
        let e_ff = rel_l2(&ff, &ff_exact);
        Ok((
            e_us <= 0.02 && e_ff <= 0.02 && secs <= 120.0,
            format!("h = 0.02: scattered {e_us:.4}, far field {e_ff:.4} (<= 0.02), {secs:.1} s single-threaded (<= 120)"),
        ))
    })
}

fn c2_zero_contrast() -> Check {
    let med = unit_disk(0.0)?;
    let spec = GridSpec::covering(&med.domain, 0.05, 3)?;
    let sol = solve_scattering(&med, 2.0, &IncidentField::plane_wave_angle(0.3), &spec, &SolverOptions::default())?;
    let us = sol.scattered.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let f = assemble_far_field_matrix(&med, 2.0, &DirectionQuadrature::new(64)?, &spec, &SolverOptions::default())?;
    let fmax = f.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((us <= 1e-12 && fmax <= 1e-12, format!("max |u^s| = {us:.1e}, max |F| = {fmax:.1e} (<= 1e-12)")))
}

fn c3_reciprocity() -> Check {
    let med = unit_disk(1.0)?;
    let spec = GridSpec::covering(&med.domain, 0.02, 3)?;
    let f = assemble_far_field_matrix(&med, 2.0, &DirectionQuadrature::new(64)?, &spec, &SolverOptions::default())?;
    let d = f.reciprocity_defect()?;
    Ok((d <= 0.02, format!("||F - P F^T P|| / ||F|| = {d:.2e} at N = 64, h = 0.02 (<= 0.02)")))
}

fn c4_jacobi_anger() -> Check {
    let k = 2.0;
    let disk = Domain::disk(Point::ORIGIN, 1.0)?;
    let spec = GridSpec::covering(&disk, 0.05, 3)?;
    let mask: Vec<bool> = spec.points().map(|p| disk.contains(p)).collect();
    let pts: Vec<Point> = spec.points().filter(|p| disk.contains(*p)).collect();
    let quad = DirectionQuadrature::new(64)?;
    let (mut worst_eval, mut worst_fit) = (0.0f64, 0.0f64);
    for m in 0..=5usize {
        let im = Complex64::i().powu(m as u32);
        let exact = |p: Point| im * Complex64::from_polar(2.0 * PI * bessel_j(m, k * p.norm()), m as f64 * p.angle());
        let g = HerglotzDensity::from_fn(quad, |phi| Complex64::from_polar(1.0, m as f64 * phi));
        let vals = herglotz_eval(&g, k, &pts)?;
        let ex: Vec<Complex64> = pts.iter().map(|&p| exact(p)).collect();
        worst_eval = worst_eval.max(rel_l2(&vals, &ex));
        let target = ComplexField2D::from_fn(spec, mask.clone(), exact);
        worst_fit = worst_fit.max(herglotz_fit(&target, k, &quad, 1e-8)?.relative_error);
    }
    Ok((
        worst_eval <= 0.01 && worst_fit <= 0.01,
        format!("m <= 5: evaluation {worst_eval:.1e}, fit {worst_fit:.1e} (<= 0.01)"),
    ))
}

fn c5_lsm() -> Check {
    let t0 = Instant::now();
    let med = unit_disk(1.0)?;
    let spec = GridSpec::covering(&med.domain, 0.05, 3)?;
    let f = assemble_far_field_matrix(&med, 2.0, &DirectionQuadrature::new(64)?, &spec, &SolverOptions::default())?;
    let mesh = SamplingMesh::square(-2.0, 2.0, 41)?;
    let mut res = indicator_map(&f, &mesh, None)?;
    let (mask, _) = classify(&mut res, Cutoff::Auto)?;
    let truth: Vec<bool> = mesh.points().iter().map(|&z| med.domain.contains(z)).collect();
    let j = jaccard(&mask, &truth);
    let pick = |inside: bool| -> Vec<f64> {
        res.indicator.iter().zip(&truth).filter(|(_, &t)| t == inside).map(|(v, _)| *v).collect()
    };
    let (mi, mo) = (median(&pick(true)), median(&pick(false)));
    let secs = t0.elapsed().as_secs_f64();
    Ok((
        j >= 0.7 && mi < mo && secs <= 300.0,
        format!("Jaccard {j:.3} (>= 0.7), median inside {mi:.3e} < outside {mo:.3e}, {secs:.1} s (<= 300)"),
    ))
}

fn c6_radial_oracle() -> Check {
    let roots = radial_te_roots(10, 0.5, 12.0, 1.0, 1.0)?;
    let max_res = roots.iter().map(|r| r.residual).fold(0.0, f64::max);
    let mut scale = 0.0f64;
    for &radius in &[0.5, 2.0, 3.0] {
        let scaled = radial_te_roots(10, 0.5 / radius, 12.0 / radius, radius, 1.0)?;
        if scaled.len() != roots.len() {
            return Ok((false, format!("R = {radius} finds {} roots, R = 1 finds {}", scaled.len(), roots.len())));
        }
        for (a, b) in roots.iter().zip(&scaled) {
            scale = scale.max((a.k - b.k * radius).abs());
        }
    }
    // second-order residuals of the constructed pairs
    let med = unit_disk(1.0)?;
    let mut ratios = Vec::new();
    for r in roots.iter().take(4) {
        let mut prev: Option<(f64, f64)> = None;
        for h in [0.04, 0.02, 0.01] {
            let spec = GridSpec::covering(&med.domain, h, 3)?;
            let (pair, _) = radial_eigenpair(r.m, r.k, 1.0, 1.0, &spec)?;
            let res = te_residual(&pair, &med, r.k)?;
            if let Some((p, t)) = prev {
                ratios.push((p / res.pde()).min(t / res.trace()));
            }
            prev = Some((res.pde(), res.trace()));
        }
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((
        max_res <= 1e-8 && scale <= 1e-10 && min_ratio >= 3.0,
        format!(
            "{} roots, max |d_m| = {max_res:.1e} (<= 1e-8), kR drift {scale:.1e} (<= 1e-10), \
             min residual ratio per halving {min_ratio:.2} (>= 3)",
            roots.len()
        ),
    ))
}

fn c7_qep(sq80: &SquareModes) -> Check {
    let med = unit_disk(1.0)?;
    let disc = qep_assemble(&med, &GridSpec::covering(&med.domain, 1.0 / 40.0, 3)?)?;
    let oracle = radial_te_roots(30, 0.5, 20.0, 1.0, 1.0)?[0].k.powi(2);
    let modes = qep_solve(&disc, (0.5 * oracle, 3.0 * oracle), usize::MAX, &QepOptions::default())?;
    let smallest = modes.iter().filter(|m| m.is_real()).map(|m| m.lambda.re).fold(f64::INFINITY, f64::min);
    let rel = (smallest - oracle).abs() / oracle;
    let l20 = square_modes(20, 0)?.lambdas[0];
    let l40 = square_modes(40, 0)?.lambdas[0];
    let l80 = sq80.lambdas[0];
    let ratio = (l20 - l40) / (l40 - l80);
    Ok((
        rel <= 0.05 && (3.0..=5.0).contains(&ratio),
        format!(
            "disk h = 1/40: λ = {smallest:.4} vs oracle {oracle:.4}, rel {rel:.2e} (<= 0.05); \
             square λ1 = {l20:.4}/{l40:.4}/{l80:.4}, Richardson ratio {ratio:.2} (in [3, 5])"
        ),
    ))
}

fn c8_te_scan() -> Check {
    let oracle = radial_te_roots(10, 0.5, 12.0, 1.0, 1.0)?[0].k;
    let med = unit_disk(1.0)?.with_sampling(ContrastSampling::CellAverage { sub: 8 })?;
    let spec = GridSpec::covering(&med.domain, 0.035, 3)?;
    let mut probes = vec![Point::ORIGIN];
    for r in [0.3, 0.6] {
        probes.extend((0..8).map(|i| Point::from_polar(r, i as f64 * PI / 4.0)));
    }
    let opts = TeScanOptions { eps_factor: 1e-8, ..Default::default() };
    let scan = te_scan(&med, (7.34, 7.44), 0.005, &probes, &spec, &SolverOptions::default(), &opts)?;
    let best = scan.peaks.iter().map(|p| p.k).min_by(|a, b| (a - oracle).abs().total_cmp(&(b - oracle).abs()));
    match best {
        Some(k) => Ok((
            (k - oracle).abs() <= 0.02,
            format!("peak at k = {k:.4}, oracle {oracle:.5}, |Δk| = {:.4} (<= 0.02)", (k - oracle).abs()),
        )),
        None => Ok((false, "no peak in [7.34, 7.44]".into())),
    }
}

fn c9_corner(sq80: &SquareModes) -> Check {
    let domain = Domain::square(Point::ORIGIN, 1.0)?;
    let cs = corners(&domain);
    let mut ratios = Vec::new();
    for pair in sq80.pairs.iter().take(5) {
        // the worst of the four corners
        let mut worst = 0.0f64;
        for c in &cs {
            let prof = corner_profile(&pair.v, &domain, c, &[0.2, 0.1, 0.05])?;
            worst = worst.max(prof.corner_to_interior()[2]);
        }
        ratios.push(worst);
    }
    let below = ratios.iter().filter(|&&r| r < 0.5).count();
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Ok((
        ratios.len() == 5 && below >= 3,
        format!("h = 1/80, r = 1/20, max over corners: [{}]; {below}/5 below 0.5 (>= 3)", shown.join(", ")),
    ))
}

fn disk_config(kind: ExperimentKind, v: f64, h: f64) -> RunConfig {
    let mut c = RunConfig::new(
        kind,
        Some(MediumConfig {
            domain: Domain::Disk { center: Point::ORIGIN, radius: 1.0 },
            contrast: Contrast::Constant(v),
            sampling: ContrastSampling::NodeCenter,
        }),
    );
    c.grid.h = h;
    c
}

fn c10_invisibility() -> Check {
    let dir = tempfile::tempdir()?;
    let cfg = disk_config(ExperimentKind::Invisibility, 1.0, 0.035);
    let s = run(&cfg, dir.path())?.summary;
    let norms: Vec<f64> = s["far_field_norms"].as_array().unwrap().iter().filter_map(|x| x.as_f64()).collect();
    let monotone = norms.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let ratio = s["control_ratio"].as_f64().unwrap_or(0.0);
    let shown: Vec<String> = norms.iter().map(|x| format!("{x:.3e}")).collect();
    Ok((
        monotone && ratio >= 10.0,
        format!(
            "k = {:.5}, ||u_inf|| over α = 1e-2..1e-6: [{}] (non-increasing, 10% slack); control at k = {:.3} is {ratio:.1}x larger (>= 10)",
            s["k"].as_f64().unwrap_or(f64::NAN),
            shown.join(", "),
            s["control_k"].as_f64().unwrap_or(f64::NAN)
        ),
    ))
}

fn c11_surface() -> Check {
    let med = unit_disk(1.0)?;
    let spec = GridSpec::covering(&med.domain, 0.01, 3)?;
    let recs = localization_scan(&med, 40, 0.1, &spec)?;
    let last = recs.last().unwrap();
    Ok((
        last.running_max >= 0.9,
        format!("m = 40 (k = {:.3}): ρ(u) {:.3}, ρ(v) {:.3}; running max {:.3} (>= 0.9)", last.k, last.rho_u, last.rho_v, last.running_max),
    ))
}

fn c12_calderon() -> Check {
    let spec = GridSpec::new(Point::new(-1.0, -1.0), 2.0 / 32.0, 32, 32)?;
    let dv = smooth_bump(&spec, Point::new(0.1, -0.15), 0.6, 1.5);
    let res = calderon_recover(&spec, &dv, &XiLattice::conjugate(&spec))?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    let mut exact_sum = true;
    for _ in 0..10_000 {
        let xi = Point::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        let c = cgo_pair(xi);
        let s = xi.norm().powi(2).max(1.0);
        worst = worst.max(bilinear(c.rho1, c.rho1).norm() / s).max(bilinear(c.rho2, c.rho2).norm() / s);
        exact_sum &= c.rho1[0] + c.rho2[0] == Complex64::new(0.0, xi.x) && c.rho1[1] + c.rho2[1] == Complex64::new(0.0, xi.y);
    }
    Ok((
        res.relative_error <= 0.05 && worst <= 1e-14 && exact_sum,
        format!(
            "32x32 bump: relative error {:.1e} (<= 0.05); max |ρ·ρ|/max(|ξ|², 1) = {worst:.1e} (<= 1e-14), ρ1 + ρ2 = iξ exact: {exact_sum}",
            res.relative_error
        ),
    ))
}

fn c13_density_growth(sq80: &SquareModes) -> Check {
    let pair = &sq80.pairs[0];
    let quad = DirectionQuadrature::new(64)?;
    let alphas: Vec<f64> = (2..=8).map(|e| 10f64.powi(-e)).collect();
    let te = density_growth_profile(&pair.v, pair.k, &quad, &alphas)?;
    let control_target = ComplexField2D::from_fn(pair.v.spec, pair.v.mask.clone(), |p| {
        Complex64::new(bessel_j(0, pair.k * p.norm()), 0.0)
    });
    let control = density_growth_profile(&control_target, pair.k, &quad, &alphas)?;
    let shown: Vec<String> = te.rows.iter().map(|r| format!("{:.3e}", r.density_norm)).collect();
    Ok((
        te.norm_strictly_increasing && control.growth_ratio <= 2.0,
        format!(
            "square V = 2, k = {:.4}: ||g|| over α = 1e-2..1e-8 [{}], strictly increasing: {}; J0 control growth {:.3} (<= 2)",
            pair.k,
            shown.join(", "),
            te.norm_strictly_increasing,
            control.growth_ratio
        ),
    ))
}

fn c14_determinism() -> Check {
    let mut configs = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..3 {
        let mut c = disk_config(ExperimentKind::Lsm, rng.random_range(0.5..2.0), 0.1);
        c.lsm.noise_level = 0.05;
        c.lsm.mesh_n = 21;
        c.quadrature.directions = 32;
        c.seed = rng.random();
        configs.push(c);
    }
    let mut sim = disk_config(ExperimentKind::Simulate, 1.0, 0.05);
    sim.simulate.k = rng.random_range(1.0..3.0);
    configs.push(sim);
    let mut grid = RunConfig::new(
        ExperimentKind::HerglotzFit,
        Some(MediumConfig {
            domain: Domain::square(Point::ORIGIN, 1.0)?,
            contrast: Contrast::Constant(2.0),
            sampling: ContrastSampling::NodeCenter,
        }),
    );
    grid.grid.h = 1.0 / 20.0;
    grid.herglotz_fit.target = FitTarget::GridTe { window: (1.0, 400.0), index: 0 };
    configs.push(grid);
    let mut checked = 0;
    for c in &configs {
        let (a, b, r) = (tempfile::tempdir()?, tempfile::tempdir()?, tempfile::tempdir()?);
        let ma = run(c, a.path())?;
        let mb = run(c, b.path())?;
        if ma.without_timings() != mb.without_timings() {
            return Ok((false, format!("{} manifests differ between identical runs", c.experiment)));
        }
        // re-execute from the manifest's echoed config
        let text = std::fs::read_to_string(a.path().join("manifest.json"))?;
        let echoed: serde_json::Value = serde_json::from_str(&text).expect("manifest is JSON");
        let cfg = RunConfig::from_json(&echoed["config"].to_string())?;
        let mr = run(&cfg, r.path())?;
        if mr.artifacts != ma.artifacts {
            return Ok((false, format!("{} rerun from the echoed config changed artifact hashes", c.experiment)));
        }
        checked += ma.artifacts.len();
    }
    Ok((true, format!("{} configs, {checked} artifacts bit-identical across reruns and echoed-config replays", configs.len())))
}

fn report(n: usize, name: &str, f: impl FnOnce() -> Check) -> bool {
    let t0 = Instant::now();
    let (ok, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    println!("{} {n:>2} {name}: {detail} [{:.1} s]", if ok { "PASS" } else { "FAIL" }, t0.elapsed().as_secs_f64());
    ok
}

fn main() {
    let mut ok = true;
    ok &= report(1, "forward oracle", c1_forward_oracle);
    ok &= report(2, "zero contrast", c2_zero_contrast);
    ok &= report(3, "reciprocity", c3_reciprocity);
    ok &= report(4, "Jacobi-Anger", c4_jacobi_anger);
    ok &= report(5, "LSM reconstruction", c5_lsm);
    ok &= report(6, "radial TE oracle", c6_radial_oracle);
    let t0 = Instant::now();
    let sq80 = square_modes(80, 5);
    println!("     (square V = 2, h = 1/80 pencil solved in {:.1} s)", t0.elapsed().as_secs_f64());
    let sq = &sq80;
    let shared = |f: fn(&SquareModes) -> Check| {
        move || match sq {
            Ok(s) => f(s),
            Err(e) => Err(translab::Error::Convergence(format!("square pencil: {e}"))),
        }
    };
    ok &= report(7, "QEP vs oracle", shared(c7_qep));
    ok &= report(8, "TE detection from data", c8_te_scan);
    ok &= report(9, "corner vanishing", shared(c9_corner));
    ok &= report(10, "near-invisibility", c10_invisibility);
    ok &= report(11, "surface localization", c11_surface);
    ok &= report(12, "Calderon demo", c12_calderon);
    ok &= report(13, "Herglotz density growth", shared(c13_density_growth));
    ok &= report(14, "determinism", c14_determinism);
    if !ok {
        std::process::exit(1);
    }
}
