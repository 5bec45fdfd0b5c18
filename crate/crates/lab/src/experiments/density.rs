use deloc_core::smallball::{density_grid, weighted_sum_density_with, WeightedSumSpec};

use crate::config::{distribution, Params, Setup};
use crate::error::LabError;
use crate::registry::{Experiment, Output, Plan, RunContext};
use crate::row;
use crate::table::Table;

const DEFAULT_GRID_SIZE: usize = 401;

pub struct DensityCurveKind;

enum Grid {
    Points(Vec<f64>),
    /// `size` evenly spaced points over `range`, or over the support when absent.
    Even {
        size: usize,
        range: Option<(f64, f64)>,
    },
}

struct DensityPlan {
    spec: WeightedSumSpec,
    grid: Grid,
}

impl Experiment for DensityCurveKind {
    fn name(&self) -> &'static str {
        "density_curve"
    }

    fn summary(&self) -> &'static str {
        "density of a unit-norm weighted sum of independent laws by Fourier inversion"
    }

    fn prepare(&self, p: &mut Params, _setup: &Setup) -> Option<Box<dyn Plan>> {
        let dists = p.objects("dists", distribution);
        let weights = p.f64_list("weights");
        let sigma = p.f64_or("smoothing_sigma", 0.0);
        let points = p.opt_f64_list("points");
        let size = p.opt_usize("grid_size");
        let range = p.opt_f64_list("range");

        if !(sigma.is_finite() && sigma >= 0.0) {
            p.error("smoothing_sigma", "must be finite and nonnegative");
        }
        if let (Some(d), Some(w)) = (&dists, &weights) {
            if d.len() != w.len() {
                p.error(
                    "weights",
                    format!("{} weights for {} laws", w.len(), d.len()),
                );
            }
        }
        let grid = match points {
            Some(pts) => {
                if size.is_some() || range.is_some() {
                    p.error("points", "cannot be combined with `grid_size` or `range`");
                }
                check_points(p, &pts);
                Grid::Points(pts)
            }
            None => {
                let size = size.unwrap_or(DEFAULT_GRID_SIZE);
                if size < 2 {
                    p.error("grid_size", "needs at least 2 points");
                }
                let range = match range.as_deref() {
                    None => None,
                    Some(&[lo, hi]) if lo < hi && lo.is_finite() && hi.is_finite() => {
                        Some((lo, hi))
                    }
                    Some(_) => {
                        p.error("range", "expected [lo, hi] with lo < hi");
                        None
                    }
                };
                Grid::Even { size, range }
            }
        };
        if p.has_errors() {
            return None;
        }
        let spec = WeightedSumSpec::new(dists?, weights?).with_smoothing(sigma);
        Some(Box::new(DensityPlan { spec, grid }))
    }
}

fn check_points(p: &mut Params, pts: &[f64]) {
    if pts.is_empty() || pts.iter().any(|x| !x.is_finite()) {
        p.error("points", "expected a nonempty list of finite numbers");
        return;
    }
    if pts.len() > 1 {
        let h = pts[1] - pts[0];
        let even = pts
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
        if !(h > 0.0 && even) {
            p.error("points", "points must be increasing and evenly spaced");
        }
    }
}

impl Plan for DensityPlan {
    fn run(&self, ctx: &RunContext) -> Result<Output, LabError> {
        let pts = match &self.grid {
            Grid::Points(p) => p.clone(),
            Grid::Even { size, range: None } => density_grid(&self.spec, *size)?,
            Grid::Even {
                size,
                range: Some((lo, hi)),
            } => {
                let h = (hi - lo) / (*size - 1) as f64;
                (0..*size).map(|i| lo + h * i as f64).collect()
            }
        };
        let curve = weighted_sum_density_with(&self.spec, &pts, ctx.constants.fourier_tail)?;
        let mut values = Table::new(None, &["x", "density"]);
        for (x, f) in curve.grid.iter().zip(&curve.values) {
            values.push(row![*x, *f]);
        }
        let mut summary = Table::new(
            Some("summary"),
            &[
                "points",
                "grid_step",
                "mass",
                "argmax",
                "max",
                "truncation_window",
                "truncation_error",
            ],
        );
        let (argmax, max) = curve.max();
        summary.push(row![
            curve.grid.len(),
            curve.grid_step,
            curve.trapezoid_mass(),
            argmax,
            max,
            curve.truncation_window,
            curve.truncation_error,
        ]);
        Ok(Output {
            tables: vec![values, summary],
            warnings: Vec::new(),
        })
    }
}
