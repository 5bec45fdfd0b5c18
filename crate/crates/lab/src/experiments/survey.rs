use deloc_core::deloc::{deloc_survey, theorem_delta, SurveyConfig};
use deloc_core::ensembles::{frozen_imaginary, EnsembleSpec, Symmetry};
use deloc_core::rng::Seed;

use crate::config::{check_eps, distribution, symmetry, Params, Setup};
use crate::error::LabError;
use crate::registry::{Experiment, Output, Plan, RunContext};
use crate::row;
use crate::table::{grid_columns, header, Table};

/// Trial index of the seed that draws a frozen imaginary part; kept out of
/// the range used by real trials.
const IMAGINARY_TRIAL: u64 = u64::MAX;

pub struct DelocSurvey;

struct SurveyPlan {
    spec: EnsembleSpec,
    imaginary: Option<deloc_core::ensembles::DistributionSpec>,
    trials: usize,
    eps_grid: Vec<f64>,
    loc_eps: f64,
    loc_delta: Option<f64>,
}

impl Experiment for DelocSurvey {
    fn name(&self) -> &'static str {
        "deloc_survey"
    }

    fn summary(&self) -> &'static str {
        "mass profiles and localization events of every eigenvector of sampled matrices"
    }

    fn prepare(&self, p: &mut Params, _setup: &Setup) -> Option<Box<dyn Plan>> {
        let n = p.usize("n");
        let sym = symmetry(p, "symmetry", Symmetry::Symmetric);
        let entry = p.object("entry", distribution);
        let imaginary = if p.has("imaginary_entry") {
            Some(p.opt_object("imaginary_entry", distribution))
        } else {
            None
        };
        let shift_mu = p.f64_or("shift_mu", 0.0);
        let trials = p.usize("trials");
        let eps_grid = p.f64_list("eps_grid");
        let loc_eps = p.opt_f64("loc_eps");
        let loc_delta = p.opt_f64("loc_delta");

        if n == Some(0) {
            p.error("n", "matrix side must be positive");
        }
        if trials == Some(0) {
            p.error("trials", "must be at least 1");
        }
        if !shift_mu.is_finite() {
            p.error("shift_mu", "must be finite");
        }
        if let Some(d) = loc_delta {
            if !(d > 0.0) {
                p.error("loc_delta", "must be positive");
            }
        }
        if let (Some(n), Some(grid)) = (n.filter(|&n| n > 0), &eps_grid) {
            for (i, &e) in grid.iter().enumerate() {
                check_eps(p, &format!("eps_grid[{i}]"), e, n);
            }
            if let Some(e) = loc_eps {
                check_eps(p, "loc_eps", e, n);
            }
        }
        if p.has_errors() {
            return None;
        }
        let eps_grid = eps_grid?;
        let imaginary = match imaginary {
            Some(d) => Some(d?),
            None => None,
        };
        let mut spec = EnsembleSpec::new(n?, sym?, entry?);
        spec.shift_mu = shift_mu;
        Some(Box::new(SurveyPlan {
            spec,
            imaginary,
            trials: trials?,
            loc_eps: loc_eps.unwrap_or(eps_grid[0]),
            eps_grid,
            loc_delta,
        }))
    }
}

impl Plan for SurveyPlan {
    fn run(&self, ctx: &RunContext) -> Result<Output, LabError> {
        let mut spec = self.spec.clone();
        if let Some(d) = &self.imaginary {
            spec.fixed_imaginary = Some(frozen_imaginary(
                spec.n,
                d,
                Seed::new(ctx.master_seed, IMAGINARY_TRIAL),
            )?);
        }
        let loc_delta = self
            .loc_delta
            .unwrap_or_else(|| theorem_delta(self.loc_eps, ctx.constants.s));
        let cfg = SurveyConfig {
            trials: self.trials,
            eps_grid: self.eps_grid.clone(),
            master_seed: ctx.master_seed,
            loc_eps: self.loc_eps,
            loc_delta,
        };
        let report = deloc_survey(&spec, &cfg)?;
        let mass_cols = grid_columns("min_mass", &self.eps_grid);

        let mut rows = Table::with_header(
            None,
            header(
                &["trial", "index", "eigenvalue_re", "eigenvalue_im", "linf"],
                mass_cols.clone(),
            ),
        );
        for r in &report.rows {
            let mut cells = row![r.trial, r.index, r.eigenvalue.re, r.eigenvalue.im, r.linf];
            cells.extend(r.min_mass.iter().map(|&m| m.into()));
            rows.push(cells);
        }

        let bound = ctx.constants.m * (spec.n as f64).sqrt();
        let cols = mass_cols.iter().cloned().chain(["localized".to_string()]);
        let mut trials = Table::with_header(
            Some("trials"),
            header(&["trial", "norm", "bounded", "max_linf"], cols),
        );
        for t in &report.trials {
            let mut cells = row![t.trial, t.norm, t.norm <= bound, t.max_linf];
            cells.extend(t.min_mass.iter().map(|&m| m.into()));
            cells.push(t.localized.into());
            trials.push(cells);
        }

        let s = &report.summary;
        let fixed = [
            "trials",
            "max_linf",
            "loc_eps",
            "loc_delta",
            "loc_events",
            "loc_frequency",
        ];
        let mut summary = Table::with_header(Some("summary"), header(&fixed, mass_cols));
        let mut cells = row![
            s.trials,
            s.max_linf,
            s.loc_eps,
            s.loc_delta,
            s.loc_events,
            s.loc_frequency()
        ];
        cells.extend(s.min_mass.iter().map(|&m| m.into()));
        summary.push(cells);

        Ok(Output {
            tables: vec![rows, trials, summary],
            warnings: Vec::new(),
        })
    }
}
