//! Runs the enabled verifier checks on a family and collects one
//! [`CheckResult`] per check.

use hyperleaf_core::boundary::IdealCurve;
use hyperleaf_core::solver::{reference_apex, SolverConfig};
use hyperleaf_core::verify::*;

use crate::config::VerifySpec;
use crate::Failure;

/// Jump bound for `fill_scan`: 1.5× the widest closed-form axial spacing
/// `|atanh Hᵢ₊₁ − atanh Hᵢ|` of consecutive grid values.
pub fn default_fill_bound(grid: &[f64]) -> f64 {
    1.5 * grid.windows(2).map(|w| (w[1].atanh() - w[0].atanh()).abs()).fold(0.0, f64::max)
}

fn check(name: &str, passed: bool, margin: f64, parameters: Vec<(&str, f64)>, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        margin,
        parameters: parameters.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        detail,
    }
}

/// Runs every check named in `spec.checks`, in the order given there.
/// `grid` is the configured sweep grid (it may contain H values that are
/// missing from the family).
pub fn run_checks(
    family: &LeafFamily,
    grid: &[f64],
    spec: &VerifySpec,
    solver: &SolverConfig,
    seed: u64,
) -> Result<VerificationReport, Failure> {
    let curve: &IdealCurve = &family.curve;
    let mut report = VerificationReport::default();
    let probe_set = if spec.checks.iter().any(|c| c == "probe_monotone" || c == "fill_scan") {
        probes(curve, spec.probes, seed, solver.h_limit)?
    } else {
        Vec::new()
    };
    for name in &spec.checks {
        let result = match name.as_str() {
            "pairwise_disjoint" => {
                let r = pairwise_disjoint(family);
                let hyp = r.hyperbolic.iter().flatten().copied().fold(f64::INFINITY, f64::min);
                check(
                    name,
                    r.passed(),
                    r.min_separation(),
                    vec![("leaves", family.len() as f64), ("min_hyperbolic", hyp), ("intersecting", r.intersecting.len() as f64)],
                    format!("{} intersecting pairs", r.intersecting.len()),
                )
            }
            "probe_monotone" => {
                let r = probe_monotone(family, &probe_set);
                let margin = if r.violations > 0 { -(r.violations as f64) } else { r.valid_fraction() - r.quota };
                check(
                    name,
                    r.passed(),
                    margin,
                    vec![("probes", r.probes as f64), ("valid", r.valid as f64), ("violations", r.violations as f64), ("quota", r.quota)],
                    format!("{}/{} probes valid, {} violations", r.valid, r.probes, r.violations),
                )
            }
            "fill_scan" => {
                let bound = spec.fill_bound.unwrap_or_else(|| default_fill_bound(grid));
                let r = fill_scan(family, &probe_set, bound);
                check(
                    name,
                    r.passed(),
                    r.bound - r.max_jump,
                    vec![("max_jump", r.max_jump), ("bound", r.bound), ("swept_fraction", r.swept_fraction), ("valid", r.valid as f64)],
                    format!("largest crossing jump {:.4} against bound {:.4}", r.max_jump, r.bound),
                )
            }
            "hull_containment" => {
                let rows = hull_containment(family, spec.hull_budget)?;
                let (h, worst) = rows.iter().copied().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
                check(
                    name,
                    worst >= -spec.hull_tolerance,
                    worst + spec.hull_tolerance,
                    vec![("min_margin", worst), ("worst_h", h), ("budget", spec.hull_budget as f64)],
                    format!("smallest hull margin {worst:.3e} at H = {h}"),
                )
            }
            "area_bound" => {
                let apex = reference_apex(curve);
                let mut worst = (0.0, 0.0, 0.0);
                for leaf in &family.leaves {
                    for (r, ratio) in area_bound(leaf, apex, &spec.area_radii) {
                        if ratio > worst.2 {
                            worst = (leaf.h, r, ratio);
                        }
                    }
                }
                check(
                    name,
                    worst.2 < 1.0,
                    1.0 - worst.2,
                    vec![("max_ratio", worst.2), ("worst_h", worst.0), ("worst_radius", worst.1)],
                    format!("largest |Σ ∩ B_R| / |∂B_R| = {:.4}", worst.2),
                )
            }
            "boundary_slope" => {
                let (mut margin, mut first_order) = (f64::INFINITY, 0.0f64);
                for leaf in &family.leaves {
                    let r = boundary_slope_check(leaf, curve, leaf.h)?;
                    let m = if leaf.h.abs() < 0.05 {
                        spec.slope_abs_tolerance - r.max_abs_error
                    } else {
                        first_order = first_order.max(r.first_order_rel_error);
                        spec.slope_tolerance - r.max_rel_error
                    };
                    margin = margin.min(m);
                }
                check(
                    name,
                    margin >= 0.0,
                    margin,
                    vec![("first_order_rel_error", first_order)],
                    "boundary drift against the asymptotic estimate".into(),
                )
            }
            "translate_disjointness" => {
                let leaf = family
                    .leaves
                    .iter()
                    .min_by(|a, b| a.h.abs().total_cmp(&b.h.abs()))
                    .ok_or_else(|| Failure::Config("empty family".into()))?;
                let (e, d) = translate_disjointness(leaf, curve, spec.translate[0], spec.translate[1])?;
                check(
                    name,
                    e > 0.0,
                    e,
                    vec![("h", leaf.h), ("t", spec.translate[0]), ("s", spec.translate[1]), ("hyperbolic", d)],
                    format!("dilated copies of the H = {} leaf are {d:.4} apart", leaf.h),
                )
            }
            "gap_scan" => {
                let p = probes(curve, spec.gap_probes, seed, solver.h_limit)?;
                let mut worst = 0.0f64;
                let mut ok = true;
                let mut params = Vec::new();
                for &h0 in &spec.gap_h0 {
                    let r = gap_scan(curve, h0, &spec.gap_dh, solver, &p)?;
                    ok &= r.passed();
                    worst = worst.max(r.worst_ratio());
                    params.push(("h0", h0));
                    for (_, d) in &r.rows {
                        params.push(("displacement", *d));
                    }
                }
                check(name, ok, 0.8 - worst, params, format!("worst halving ratio {worst:.3}"))
            }
            other => return Err(Failure::Config(format!("unknown check {other:?}"))),
        };
        report.push(result)?;
    }
    Ok(report)
}
