//! The four verbs. Each returns `Ok(())` on success or the [`Failure`]
//! that decides the exit code; artifacts are written either way.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use hyperleaf_core::boundary::IdealCurve;
use hyperleaf_core::geometry::{equidistant_leaf, BallPoint, IdealCircle, Orientation};
use hyperleaf_core::oracle::{crossing_pair, h2_exchange, h2_foliation_check};
use hyperleaf_core::solver::{check_grid, solve, sweep_order, LeafFamily, SolveReport, Solved, SolverConfig};
use hyperleaf_core::verify::CheckResult;
use hyperleaf_core::error::SolverFailure;
use hyperleaf_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::checks::run_checks;
use crate::config::{check_h_values, OutputSpec, RunConfig};
use crate::io::{obj_string, parse_obj, sha256_hex, write_atomic, write_json, SCHEMA_VERSION};
use crate::Failure;

pub const MANIFEST: &str = "manifest.json";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const REPORT: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FailureRecord {
    pub h: f64,
    pub reason: String,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub residual_median: f64,
    pub energy: f64,
}

impl FailureRecord {
    fn from_error(h: f64, e: &Error) -> FailureRecord {
        match e {
            Error::SolverFailed(SolverFailure { h, reason, iterations, gradient_norm, residual_median, energy }) => {
                FailureRecord {
                    h: *h,
                    reason: reason.clone(),
                    iterations: *iterations,
                    gradient_norm: *gradient_norm,
                    residual_median: *residual_median,
                    energy: *energy,
                }
            }
            other => FailureRecord {
                h,
                reason: other.to_string(),
                iterations: 0,
                gradient_norm: f64::NAN,
                residual_median: f64::NAN,
                energy: f64::NAN,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LeafEntry {
    pub h: f64,
    /// Mesh path relative to the manifest, when OBJ output is enabled.
    pub mesh: Option<String>,
    pub sha256: Option<String>,
    pub vertices: usize,
    pub triangles: usize,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub area: f64,
    pub volume: f64,
    pub energy: f64,
    pub residual_median: f64,
    pub residual_p90: f64,
    pub residual_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub schema_version: u32,
    pub kind: String,
    pub fingerprint: String,
    pub config: RunConfig,
    pub grid: Vec<f64>,
    pub eps: f64,
    pub complete: bool,
    pub leaves: Vec<LeafEntry>,
    pub failure: Option<FailureRecord>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
struct SolveRecord<'a> {
    schema_version: u32,
    kind: &'static str,
    fingerprint: String,
    h: f64,
    converged: bool,
    mesh: Option<String>,
    report: Option<&'a SolveReport>,
    failure: Option<FailureRecord>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportDocument {
    pub schema_version: u32,
    pub kind: String,
    pub fingerprint: String,
    pub manifest_sha256: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "H")]
    h: f64,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "V")]
    v: f64,
    #[serde(rename = "I")]
    i: f64,
    residual_median: f64,
}

fn h_tag(h: f64) -> String {
    format!("{h:+.6}")
}

/// Output directory: the `--out` flag, else `HYPERLEAF_OUT`, else the config.
pub fn output_dir(flag: Option<&Path>, output: &OutputSpec) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os("HYPERLEAF_OUT").map(PathBuf::from))
        .unwrap_or_else(|| output.dir.clone())
}

/// Solves one leaf and writes `solve_<H>.obj` and `solve_<H>.json`.
pub fn cmd_solve(cfg: &RunConfig, h: f64, out: &Path) -> Result<(), Failure> {
    check_h_values(&[h])?;
    let curve = cfg.curve()?;
    let tag = h_tag(h);
    let result = solve(&curve, h, &cfg.solver, None);
    let (mesh, failure) = match &result {
        Ok(s) if cfg.output.wants("obj") => {
            let name = format!("solve_{tag}.obj");
            write_atomic(&out.join(&name), obj_string(&s.surface).as_bytes())?;
            (Some(name), None)
        }
        Ok(_) => (None, None),
        Err(Error::SolverFailed(_)) => (None, Some(FailureRecord::from_error(h, result.as_ref().unwrap_err()))),
        Err(e) => return Err(e.clone().into()),
    };
    let record = SolveRecord {
        schema_version: SCHEMA_VERSION,
        kind: "solve",
        fingerprint: cfg.fingerprint(),
        h,
        converged: result.is_ok(),
        mesh,
        report: result.as_ref().ok().map(|s| &s.report),
        failure,
    };
    write_json(&out.join(format!("solve_{tag}.json")), &record)?;
    match result {
        Ok(_) => Ok(()),
        Err(e) => Err(Failure::Solver(e.to_string())),
    }
}

/// Solves every grid value, chaining warm starts when `cfg.warm_start` is
/// set, otherwise on up to `jobs` threads. Returns the solves in grid order,
/// truncated at the first failure in sweep order exactly as a sequential
/// sweep would be.
pub fn run_sweep(
    curve: &IdealCurve,
    grid: &[f64],
    cfg: &SolverConfig,
    jobs: usize,
) -> Result<(Vec<Option<Solved>>, Option<(f64, Error)>), Failure> {
    cfg.validate()?;
    check_grid(grid, cfg.h_limit.min(crate::config::H_MAX))?;
    let order = sweep_order(grid);
    let mut solved: Vec<Option<Solved>> = vec![None; grid.len()];
    if cfg.warm_start || jobs <= 1 {
        for &(i, prev) in &order {
            let warm = if cfg.warm_start { prev.and_then(|j| solved[j].as_ref()).map(|s| &s.surface) } else { None };
            match solve(curve, grid[i], cfg, warm) {
                Ok(s) => solved[i] = Some(s),
                Err(e) => return Ok((solved, Some((grid[i], e)))),
            }
        }
        return Ok((solved, None));
    }
    let results: Mutex<Vec<Option<hyperleaf_core::Result<Solved>>>> = Mutex::new((0..grid.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(grid.len()) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, _)) = order.get(k) else { break };
                let r = solve(curve, grid[i], cfg, None);
                results.lock().expect("no panics while holding the lock")[i] = Some(r);
            });
        }
    });
    let mut results = results.into_inner().expect("threads joined");
    for &(i, _) in &order {
        match results[i].take().expect("every leaf was attempted") {
            Ok(s) => solved[i] = Some(s),
            Err(e) => return Ok((solved, Some((grid[i], e)))),
        }
    }
    Ok((solved, None))
}

/// Sweeps the configured grid and writes per-leaf meshes under `leaves/`,
/// `manifest.json` and `sweep.csv`. The manifest is written even when a
/// leaf fails.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path, jobs: usize) -> Result<Manifest, Failure> {
    let curve = cfg.curve()?;
    let grid = cfg.grid()?;
    let (solved, failure) = run_sweep(&curve, &grid, &cfg.solver, jobs)?;
    let mut leaves = Vec::new();
    let mut rows = Vec::new();
    for (i, s) in solved.iter().enumerate() {
        let Some(s) = s else { continue };
        let (mesh, sha256) = if cfg.output.wants("obj") {
            let name = format!("leaves/leaf_{i:03}.obj");
            let text = obj_string(&s.surface);
            write_atomic(&out.join(&name), text.as_bytes())?;
            (Some(name), Some(sha256_hex(text.as_bytes())))
        } else {
            (None, None)
        };
        let r = &s.report;
        leaves.push(LeafEntry {
            h: s.surface.h,
            mesh,
            sha256,
            vertices: s.surface.vertices.len(),
            triangles: s.surface.triangles.len(),
            iterations: r.iterations,
            gradient_norm: r.gradient_norm,
            area: r.energy.area,
            volume: r.energy.volume,
            energy: r.energy.energy,
            residual_median: r.residual.median,
            residual_p90: r.residual.p90,
            residual_max: r.residual.max,
        });
        rows.push(CsvRow { h: s.surface.h, a: r.energy.area, v: r.energy.volume, i: r.energy.energy, residual_median: r.residual.median });
    }
    let mut stored = cfg.clone();
    stored.output = OutputSpec::default();
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        kind: "leaf-family".into(),
        fingerprint: cfg.fingerprint(),
        config: stored,
        grid,
        eps: cfg.solver.eps,
        complete: failure.is_none(),
        leaves,
        failure: failure.as_ref().map(|(h, e)| FailureRecord::from_error(*h, e)),
    };
    if cfg.output.wants("csv") {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &rows {
            w.serialize(row).map_err(|e| Failure::Config(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Config(e.to_string()))?;
        write_atomic(&out.join(SWEEP_CSV), &bytes)?;
    }
    write_json(&out.join(MANIFEST), &manifest)?;
    match failure {
        None => Ok(manifest),
        Some((h, e)) => Err(Failure::Solver(format!("leaf H = {h}: {e}"))),
    }
}

/// Reads a manifest and its meshes back into a family.
pub fn load_family(manifest_path: &Path) -> Result<(Manifest, LeafFamily, Vec<u8>), Failure> {
    let bytes = std::fs::read(manifest_path)
        .map_err(|e| Failure::Config(format!("cannot read manifest {}: {e}", manifest_path.display())))?;
    let manifest: Manifest =
        serde_json::from_slice(&bytes).map_err(|e| Failure::Config(format!("manifest: {e}")))?;
    if manifest.schema_version != SCHEMA_VERSION || manifest.kind != "leaf-family" {
        return Err(Failure::Config("not a leaf-family manifest of a supported schema version".into()));
    }
    manifest.config.validate()?;
    if manifest.leaves.is_empty() {
        return Err(Failure::Config("manifest lists no leaves".into()));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut leaves = Vec::with_capacity(manifest.leaves.len());
    for entry in &manifest.leaves {
        let rel = entry.mesh.as_ref().ok_or_else(|| Failure::Config(format!("leaf H = {} has no mesh file", entry.h)))?;
        let path = base.join(rel);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::Config(format!("cannot read mesh {}: {e}", path.display())))?;
        let surface = parse_obj(&text, entry.h, manifest.eps)
            .map_err(|e| Failure::Config(format!("mesh {}: {e}", path.display())))?;
        leaves.push(surface);
    }
    let family = LeafFamily::from_leaves(manifest.config.curve()?, manifest.eps, leaves)?;
    Ok((manifest, family, bytes))
}

/// Verifies the family of a manifest and writes `report.json`.
pub fn cmd_verify(manifest_path: &Path, out: &Path, seed: Option<u64>) -> Result<ReportDocument, Failure> {
    let (manifest, family, bytes) = load_family(manifest_path)?;
    let cfg = &manifest.config;
    let report = run_checks(&family, &manifest.grid, &cfg.verify, &cfg.solver, seed.unwrap_or(cfg.seed))?;
    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        kind: "verification".into(),
        fingerprint: manifest.fingerprint.clone(),
        manifest_sha256: sha256_hex(&bytes),
        passed: report.passed(),
        checks: report.checks,
    };
    write_json(&out.join(REPORT), &doc)?;
    if doc.passed {
        Ok(doc)
    } else {
        let failed: Vec<&str> = doc.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(Failure::Verification(format!("failed checks: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CapRow {
    h: f64,
    iterations: usize,
    max_distance: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ExchangeRow {
    k1: f64,
    k2: f64,
    crossings: usize,
    lens_area: f64,
    t1: f64,
    t2: f64,
    delta_i1: f64,
    delta_i2: f64,
    chain_feasible: bool,
}

/// Runs one oracle suite and writes `oracle_<name>.json`.
pub fn cmd_oracle(name: &str, cfg: Option<&RunConfig>, out: &Path, seed: u64) -> Result<(), Failure> {
    let (passed, doc) = match name {
        "cap-compare" => {
            let default;
            let cfg = match cfg {
                Some(c) => c,
                None => {
                    default = RunConfig::parse("[curve]\nradius = 1.0471975511965976\n[sweep]\nrange = [-0.8, 0.8]\nstep = 0.2\n")?;
                    &default
                }
            };
            let curve = cfg.curve()?;
            if curve.order() != 0 {
                return Err(Failure::Config("cap-compare needs a round curve (no harmonics)".into()));
            }
            let circle = IdealCircle::new(curve.center(), cfg.curve.radius)?;
            let side = match curve.plus_side() {
                hyperleaf_core::boundary::PlusSide::Inside => Orientation::Plus,
                hyperleaf_core::boundary::PlusSide::Outside => Orientation::Minus,
            };
            let tol = 5e-3;
            let mut rows = Vec::new();
            for h in cfg.grid()? {
                let s = solve(&curve, h, &cfg.solver, None).map_err(|e| Failure::Solver(e.to_string()))?;
                let leaf = equidistant_leaf(&circle, h, side)?;
                let mut d = 0.0f64;
                for &p in &s.surface.vertices {
                    let dist = leaf.signed_hyperbolic_distance(BallPoint::new(p)?).expect("|H| < 1");
                    d = d.max(dist.abs());
                }
                rows.push(CapRow { h, iterations: s.report.iterations, max_distance: d });
            }
            let passed = rows.iter().all(|r| r.max_distance < tol);
            (passed, serde_json::json!({ "tolerance": tol, "rows": rows }))
        }
        "h2-foliation" => {
            let grid: Vec<f64> = (-9..=9).map(|i| i as f64 / 10.0).collect();
            let tol = 1e-12;
            let r = h2_foliation_check([1.0, 0.0], [-1.0, 0.0], &grid, tol)?;
            let doc = serde_json::json!({
                "grid": grid,
                "tolerance": tol,
                "leaves": r.leaves,
                "pairsDisjoint": r.pairs_disjoint,
                "probes": r.probes,
                "probesMonotone": r.probes_monotone,
                "sidesConsistent": r.sides_consistent,
                "sweptFraction": r.swept_fraction,
            });
            (r.passed(), doc)
        }
        "h2-exchange" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            for _ in 0..50 {
                let (c1, c2) = crossing_pair(&mut rng)?;
                let e = h2_exchange(&c1, &c2)?;
                rows.push(ExchangeRow {
                    k1: e.k1,
                    k2: e.k2,
                    crossings: e.crossings,
                    lens_area: e.q,
                    t1: e.t1,
                    t2: e.t2,
                    delta_i1: e.delta_i1,
                    delta_i2: e.delta_i2,
                    chain_feasible: e.chain_feasible(),
                });
            }
            let detected = rows.iter().filter(|r| !r.chain_feasible).count();
            (detected == rows.len(), serde_json::json!({ "seed": seed, "pairs": rows.len(), "infeasibleDetected": detected, "rows": rows }))
        }
        other => {
            return Err(Failure::Config(format!(
                "unknown oracle {other:?}; expected cap-compare, h2-foliation or h2-exchange"
            )))
        }
    };
    let doc = serde_json::json!({
        "schemaVersion": SCHEMA_VERSION,
        "kind": format!("oracle-{name}"),
        "passed": passed,
        "result": doc,
    });
    write_json(&out.join(format!("oracle_{}.json", name.replace('-', "_"))), &doc)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification(format!("oracle {name} did not pass")))
    }
}
