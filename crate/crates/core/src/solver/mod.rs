//! Variational solver for `I_H = A + 2·H·V`.

mod energy;
mod precond;

pub use energy::{
    area_volume_gradients, cone_reference, energy, energy_gradient, energy_with_flux, gradient_norm,
    hyperbolic_triangle_area, normal_gradient_norm, mean_curvature_residual, surface_area, surface_flux, vertex_normals,
    vertex_residuals, EnergyBreakdown, ResidualStats,
};
pub use precond::Laplacian;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::boundary::{is_star_shaped, osculating_collar_ring, IdealCurve};
use crate::error::{Error, Result, SolverFailure};
use crate::math::Vec3;
use crate::mesh::{cap_point, layout_for, place_on_cap, rms_radius, DiscreteSurface, Provenance};
#[allow(unused_imports)]
use num_traits::Float;

/// Smallest accepted mesh resolution.
pub const MIN_RESOLUTION: usize = 200;

/// Knobs of a single solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverConfig {
    /// Collar height in half-space coordinates.
    pub eps: f64,
    /// Target vertex count.
    pub resolution: usize,
    pub max_iterations: usize,
    /// Stop once the dual gradient norm drops below `gradient_tolerance·√V`.
    pub gradient_tolerance: f64,
    pub initial_step: f64,
    pub shrink: f64,
    /// Sufficient-decrease constant of the backtracking line search.
    pub armijo: f64,
    /// Largest admissible |H|.
    pub h_limit: f64,
    /// Median mean-curvature residual a solved leaf must reach.
    pub residual_tolerance: f64,
    /// Chain warm starts through a sweep (disable to solve leaves independently).
    pub warm_start: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: 0.02,
            resolution: 10_000,
            max_iterations: 200,
            gradient_tolerance: 2e-5,
            initial_step: 1.0,
            shrink: 0.5,
            armijo: 1e-4,
            h_limit: 0.95,
            residual_tolerance: 5e-3,
            warm_start: true,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(String::from(m)));
        if !(self.eps > 0.0 && self.eps <= 0.05) {
            return bad("eps must lie in (0, 0.05]");
        }
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::InvalidArgument(format!(
                "resolution {} is below the minimum of {MIN_RESOLUTION} vertices",
                self.resolution
            )));
        }
        if !(self.gradient_tolerance > 0.0) || !(self.residual_tolerance > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.initial_step > 0.0) {
            return bad("initial step must be positive");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink factor must lie in (0, 1)");
        }
        if !(self.armijo > 0.0 && self.armijo <= 0.5) {
            return bad("sufficient-decrease constant must lie in (0, 0.5]");
        }
        if !(self.h_limit > 0.0 && self.h_limit < 1.0) {
            return bad("h_limit must lie in (0, 1)");
        }
        Ok(())
    }

    fn check_h(&self, h: f64) -> Result<()> {
        if !(h.abs() <= self.h_limit) || h.abs() >= 1.0 {
            // Leaves escape every compact set as |H| → 1 (horosphere barrier).
            return Err(Error::CurvatureOutOfRange { h, limit: self.h_limit });
        }
        Ok(())
    }
}

/// Initial mesh for `curve` at curvature `h`: the pinned osculating collar
/// ring, with the interior on the exact cap of the RMS round circle.
pub fn build_initial_mesh(curve: &IdealCurve, h: f64, cfg: &SolverConfig) -> Result<DiscreteSurface> {
    cfg.validate()?;
    cfg.check_h(h)?;
    if !is_star_shaped(curve).star {
        return Err(Error::InvalidCurve("curve is not star-shaped about its center".into()));
    }
    let layout = layout_for(curve, cfg.eps, cfg.resolution)?;
    let ring = osculating_collar_ring(curve, h, cfg.eps, layout.boundary_size())?;
    let ring: Vec<Vec3> = ring.into_iter().map(|p| p.coords()).collect();
    place_on_cap(&layout, curve, h, cfg.eps, &ring, Provenance::Initial)
}

/// Apex of the reference cone: the pole of the `H = 0` RMS cap.
pub fn reference_apex(curve: &IdealCurve) -> Vec3 {
    let r0 = rms_radius(curve, 256.max(16 * curve.order()));
    let z = cap_point(r0, 0.0, 0.0).1;
    curve.frame().half_to_ball(Vec3::new(0.0, 0.0, z))
}

/// Diagnostics of a converged solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub h: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub energy: EnergyBreakdown,
    pub residual: ResidualStats,
    /// `I` after every accepted step, starting with the initial mesh.
    pub history: Vec<f64>,
}

/// A solved leaf with its diagnostics.
#[derive(Debug, Clone)]
pub struct Solved {
    pub surface: DiscreteSurface,
    pub report: SolveReport,
}

fn min_triangle_area(s: &DiscreteSurface) -> f64 {
    s.triangles
        .iter()
        .map(|t| hyperbolic_triangle_area(s.vertices[t[0]], s.vertices[t[1]], s.vertices[t[2]]))
        .fold(f64::INFINITY, f64::min)
}

/// Minimizes `I_H` over the interior vertices, starting from `warm` (shifted
/// by the difference of initial meshes) or from [`build_initial_mesh`].
pub fn solve(curve: &IdealCurve, h: f64, cfg: &SolverConfig, warm: Option<&DiscreteSurface>) -> Result<Solved> {
    let init = build_initial_mesh(curve, h, cfg)?;
    let mut s = init.clone();
    if let Some(w) = warm {
        if w.triangles != init.triangles || w.eps != init.eps {
            return Err(Error::InvalidMesh("warm start does not share the leaf topology".into()));
        }
        if w.h != h {
            let base = build_initial_mesh(curve, w.h, cfg)?;
            let pinned = init.pinned_mask();
            for i in 0..s.vertices.len() {
                if !pinned[i] {
                    let p = w.vertices[i] + (init.vertices[i] - base.vertices[i]);
                    if p.norm() < 1.0 - cfg.eps / 4.0 {
                        s.vertices[i] = p;
                    }
                }
            }
        } else {
            let pinned = init.pinned_mask();
            for i in 0..s.vertices.len() {
                if !pinned[i] {
                    s.vertices[i] = w.vertices[i];
                }
            }
        }
    }
    let reference = cone_reference(&s, reference_apex(curve));
    let ref_flux = surface_flux(&reference);
    let bound = 1.0 - cfg.eps / 4.0;
    let tol = cfg.gradient_tolerance * (s.vertices.len() as f64).sqrt();

    let fail = |s: &DiscreteSurface, reason: String, iterations: usize, gn: f64, e: f64| {
        Error::SolverFailed(SolverFailure {
            h,
            reason,
            iterations,
            gradient_norm: gn,
            residual_median: mean_curvature_residual(s, h).median,
            energy: e,
        })
    };

    let mut e = energy_with_flux(&s, h, ref_flux).energy;
    let mut history = alloc::vec![e];
    let mut step = cfg.initial_step;
    let mut iterations = 0;
    let mut g = energy_gradient(&s, h);
    let mut gn = normal_gradient_norm(&s, &g);
    let mut stalled = false;
    while gn >= tol {
        if iterations >= cfg.max_iterations {
            return Err(fail(&s, format!("no convergence within {} iterations", cfg.max_iterations), iterations, gn, e));
        }
        // Move along vertex normals only: tangential motion just reparametrizes
        // the leaf and lets coarse meshes slide into degenerate triangles.
        let normals = vertex_normals(&s);
        let gn_only: Vec<Vec3> = g.iter().zip(&normals).map(|(gi, n)| *n * gi.dot(*n)).collect();
        let d: Vec<Vec3> = Laplacian::new(&s)
            .solve(&gn_only, 1e-6, 2000)
            .into_iter()
            .zip(&normals)
            .map(|(v, n)| *n * -v.dot(*n))
            .collect();
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a.dot(*b)).sum();
        if !(slope < 0.0) {
            return Err(fail(&s, "preconditioned direction is not a descent direction".into(), iterations, gn, e));
        }
        let mut t = step;
        let mut trial = s.clone();
        let accepted = loop {
            let mut inside = true;
            for (p, q) in trial.vertices.iter_mut().zip(s.vertices.iter().zip(&d)) {
                *p = *q.0 + *q.1 * t;
                if !(p.norm() < bound) {
                    inside = false;
                }
            }
            if inside {
                let et = energy_with_flux(&trial, h, ref_flux).energy;
                if et.is_finite() && et <= e + cfg.armijo * t * slope {
                    break Some(et);
                }
            }
            t *= cfg.shrink;
            if t < 1e-10 * cfg.initial_step {
                break None;
            }
        };
        match accepted {
            Some(et) => {
                s = trial;
                e = et;
                history.push(e);
                iterations += 1;
                step = (t / cfg.shrink).min(cfg.initial_step);
                if min_triangle_area(&s) < 1e-12 {
                    return Err(fail(&s, "triangle collapse".into(), iterations, gn, e));
                }
                g = energy_gradient(&s, h);
                gn = normal_gradient_norm(&s, &g);
            }
            None => {
                // No decrease is resolvable in floating point any more.
                stalled = true;
                break;
            }
        }
    }
    let residual = mean_curvature_residual(&s, h);
    if stalled && gn >= tol && residual.median >= cfg.residual_tolerance {
        return Err(fail(&s, "line search stalled".into(), iterations, gn, e));
    }
    if !(residual.median < cfg.residual_tolerance) {
        return Err(fail(&s, "median residual above tolerance".into(), iterations, gn, e));
    }
    s.provenance = Provenance::Solved;
    let energy = energy_with_flux(&s, h, ref_flux);
    Ok(Solved { surface: s, report: SolveReport { h, iterations, gradient_norm: gn, energy, residual, history } })
}

/// Ordered family of leaves over one curve.
#[derive(Debug, Clone)]
pub struct LeafFamily {
    pub curve: IdealCurve,
    pub eps: f64,
    /// Leaves in strictly increasing `H`.
    pub leaves: Vec<DiscreteSurface>,
    pub reports: Vec<SolveReport>,
}

impl LeafFamily {
    pub fn new(curve: IdealCurve, eps: f64) -> LeafFamily {
        LeafFamily { curve, eps, leaves: Vec::new(), reports: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn h_values(&self) -> Vec<f64> {
        self.leaves.iter().map(|l| l.h).collect()
    }

    /// Builds a family from already-solved leaves, sorting by `H`.
    pub fn from_leaves(curve: IdealCurve, eps: f64, mut leaves: Vec<DiscreteSurface>) -> Result<LeafFamily> {
        leaves.sort_by(|a, b| a.h.total_cmp(&b.h));
        check_grid(&leaves.iter().map(|l| l.h).collect::<Vec<_>>(), 1.0)?;
        Ok(LeafFamily { curve, eps, leaves, reports: Vec::new() })
    }
}

/// Result of a sweep: the (possibly partial) family and the first failure.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub family: LeafFamily,
    pub failure: Option<Error>,
}

pub fn check_grid(grid: &[f64], limit: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty H grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("H grid must be strictly increasing".into()));
    }
    if let Some(&h) = grid.iter().find(|h| !(h.abs() <= limit)) {
        return Err(Error::CurvatureOutOfRange { h, limit });
    }
    Ok(())
}

/// Order in which a sweep visits `grid`: outward from `H = 0`, each entry
/// paired with the index of its warm-start neighbour.
pub fn sweep_order(grid: &[f64]) -> Vec<(usize, Option<usize>)> {
    let mut idx: Vec<usize> = (0..grid.len()).collect();
    idx.sort_by(|&a, &b| grid[a].abs().total_cmp(&grid[b].abs()).then(a.cmp(&b)));
    let mut order = Vec::with_capacity(grid.len());
    let mut done = alloc::vec![false; grid.len()];
    for i in idx {
        // The neighbour toward H = 0 has already been solved.
        let prev = if grid[i] > 0.0 {
            i.checked_sub(1).filter(|&j| done[j])
        } else if grid[i] < 0.0 {
            Some(i + 1).filter(|&j| j < grid.len() && done[j])
        } else {
            None
        };
        order.push((i, prev));
        done[i] = true;
    }
    order
}

/// Solves every `H` of a strictly increasing grid, outward from `H = 0`,
/// warm-starting each leaf from its already-solved neighbour.
pub fn sweep(curve: &IdealCurve, grid: &[f64], cfg: &SolverConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    check_grid(grid, cfg.h_limit.min(0.95))?;
    let mut solved: Vec<Option<Solved>> = alloc::vec![None; grid.len()];
    let mut failure = None;
    for (i, prev) in sweep_order(grid) {
        let warm = if cfg.warm_start { prev.and_then(|j| solved[j].as_ref()).map(|s| &s.surface) } else { None };
        match solve(curve, grid[i], cfg, warm) {
            Ok(s) => solved[i] = Some(s),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let mut family = LeafFamily::new(curve.clone(), cfg.eps);
    for s in solved.into_iter().flatten() {
        family.leaves.push(s.surface);
        family.reports.push(s.report);
    }
    Ok(SweepOutcome { family, failure })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_order_goes_outward() {
        let grid = [-0.4, -0.2, 0.0, 0.2, 0.4];
        let order = sweep_order(&grid);
        assert_eq!(order[0], (2, None));
        assert_eq!(order[1], (1, Some(2)));
        assert_eq!(order[2], (3, Some(2)));
        assert_eq!(order[3], (0, Some(1)));
        assert_eq!(order[4], (4, Some(3)));
    }

    #[test]
    fn grid_guards() {
        assert!(check_grid(&[0.0, 0.0], 0.95).is_err());
        assert!(check_grid(&[0.2, 0.1], 0.95).is_err());
        assert!(check_grid(&[0.0, 0.99], 0.95).is_err());
        assert!(check_grid(&[0.0], 0.95).is_ok());
    }
}
