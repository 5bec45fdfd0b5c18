use deloc_core::graphs::{gnp_property_audit, laplacian_deloc_audit, GnpAudit, LaplacianDeloc};

use super::{per_graph, recoverable};
use crate::config::{check_eps, graph_source, GraphSource, Params, Setup};
use crate::error::LabError;
use crate::registry::{Experiment, Output, Plan, RunContext};
use crate::row;
use crate::table::{grid_columns, header, Cell, Table};

pub struct GraphAudit;

struct GraphAuditPlan {
    source: GraphSource,
    eps_grid: Vec<f64>,
}

impl Experiment for GraphAudit {
    fn name(&self) -> &'static str {
        "graph_audit"
    }

    fn summary(&self) -> &'static str {
        "G(n, p) property checks and delocalization of the spectral-gap eigenvector"
    }

    fn prepare(&self, p: &mut Params, setup: &Setup) -> Option<Box<dyn Plan>> {
        let source = graph_source(p, setup.base_dir);
        let eps_grid = p.opt_f64_list("eps_grid").unwrap_or_else(|| vec![0.1, 0.5]);
        if let Some(s) = &source {
            for (i, &e) in eps_grid.iter().enumerate() {
                check_eps(p, &format!("eps_grid[{i}]"), e, s.n());
            }
        }
        if p.has_errors() {
            return None;
        }
        Some(Box::new(GraphAuditPlan {
            source: source?,
            eps_grid,
        }))
    }
}

type TrialResult = Result<(GnpAudit, LaplacianDeloc), &'static str>;

impl Plan for GraphAuditPlan {
    fn run(&self, ctx: &RunContext) -> Result<Output, LabError> {
        let c_audit = ctx.constants.c_audit;
        let results = per_graph(&self.source, ctx.master_seed, |_, g, seed| {
            let both = gnp_property_audit(g, c_audit, seed)
                .and_then(|a| Ok((a, laplacian_deloc_audit(g, &self.eps_grid)?)));
            let r: TrialResult = match both {
                Ok(x) => Ok(x),
                Err(e) => Err(recoverable(&e).ok_or_else(|| LabError::from(e))?),
            };
            Ok((g.n(), g.edge_count(), g.mean_degree(), r))
        })?;

        let mut checks = Table::new(
            None,
            &["trial", "property", "value", "bound", "holds", "heuristic"],
        );
        let fixed = [
            "trial",
            "status",
            "n",
            "edges",
            "mean_degree",
            "exact_items_hold",
            "linf",
            "frac_below",
            "multiplicity",
        ];
        let mass_cols = grid_columns("min_mass", &self.eps_grid);
        let mut trials = Table::with_header(Some("trials"), header(&fixed, mass_cols));
        for (t, (n, edges, dbar, r)) in results.into_iter().enumerate() {
            match r {
                Ok((audit, lap)) => {
                    for c in &audit.checks {
                        checks.push(row![t, c.name, c.value, c.bound, c.holds, c.heuristic]);
                    }
                    let mut cells = row![
                        t,
                        "ok",
                        n,
                        edges,
                        dbar,
                        audit.exact_items_hold(),
                        lap.linf,
                        lap.frac_below,
                        lap.multiplicity
                    ];
                    cells.extend(lap.profile.min_mass.iter().map(|&m| m.into()));
                    trials.push(cells);
                }
                Err(status) => {
                    let mut cells = row![t, status, n, edges, dbar];
                    cells.resize(trials.header.len(), Cell::Empty);
                    trials.push(cells);
                }
            }
        }
        Ok(Output {
            tables: vec![checks, trials],
            warnings: Vec::new(),
        })
    }
}
