use deloc_core::graphs::{a_minus, BraessMode, BraessOptions, BraessReport};

use super::{per_graph, recoverable};
use crate::config::{graph_source, GraphSource, Params, Setup};
use crate::error::LabError;
use crate::registry::{Experiment, Output, Plan, RunContext};
use crate::row;
use crate::table::{Cell, Table};

pub struct Braess;

#[derive(Clone, Copy)]
enum Mode {
    Exact,
    Sampled(usize),
}

struct BraessPlan {
    source: GraphSource,
    mode: Mode,
    exact_max_n: usize,
    frontier_c1: Option<Vec<f64>>,
}

impl Experiment for Braess {
    fn name(&self) -> &'static str {
        "braess"
    }

    fn summary(&self) -> &'static str {
        "fraction of non-edges whose addition lowers the normalized-Laplacian spectral gap"
    }

    fn prepare(&self, p: &mut Params, setup: &Setup) -> Option<Box<dyn Plan>> {
        let source = graph_source(p, setup.base_dir);
        let mode = p.opt_string("mode").unwrap_or_else(|| "exact".into());
        let m = p.opt_usize("m");
        let exact_max_n = p.usize_or("exact_max_n", BraessOptions::default().exact_max_n);
        let frontier_c1 = p.opt_f64_list("frontier_c1");
        let mode = match (mode.as_str(), m) {
            ("exact", None) => Some(Mode::Exact),
            ("exact", Some(_)) => {
                p.error("m", "only used in sampled mode");
                None
            }
            ("sampled", Some(m)) if m > 0 => Some(Mode::Sampled(m)),
            ("sampled", _) => {
                p.error("m", "sampled mode needs a positive sample size `m`");
                None
            }
            (other, _) => {
                p.error(
                    "mode",
                    format!("unknown mode `{other}`; expected exact or sampled"),
                );
                None
            }
        };
        if let (Some(Mode::Exact), Some(s)) = (mode, &source) {
            if s.n() > exact_max_n {
                p.error(
                    "mode",
                    format!(
                        "exact mode allows n <= {exact_max_n}, got n = {}; use sampled mode",
                        s.n()
                    ),
                );
            }
        }
        if frontier_c1
            .as_ref()
            .is_some_and(|g| g.iter().any(|c| !(c.is_finite() && *c >= 0.0)))
        {
            p.error("frontier_c1", "values must be finite and nonnegative");
        }
        if p.has_errors() {
            return None;
        }
        Some(Box::new(BraessPlan {
            source: source?,
            mode: mode?,
            exact_max_n,
            frontier_c1,
        }))
    }
}

impl Plan for BraessPlan {
    fn run(&self, ctx: &RunContext) -> Result<Output, LabError> {
        let defaults = BraessOptions::default();
        let opts = BraessOptions {
            c1: ctx.constants.c1,
            c2: ctx.constants.c2,
            tie_tol: ctx.constants.tie_tol,
            exact_max_n: self.exact_max_n,
            frontier_c1: self.frontier_c1.clone().unwrap_or(defaults.frontier_c1),
        };
        let results = per_graph(&self.source, ctx.master_seed, |_, g, seed| {
            let mode = match self.mode {
                Mode::Exact => BraessMode::Exact,
                Mode::Sampled(m) => BraessMode::Sampled { m, seed },
            };
            let r: Result<BraessReport, &'static str> = match a_minus(g, mode, &opts) {
                Ok(rep) => Ok(rep),
                Err(e) => Err(recoverable(&e).ok_or_else(|| LabError::from(e))?),
            };
            Ok((g.n(), g.edge_count(), r))
        })?;

        let mut graphs = Table::new(
            None,
            &[
                "trial",
                "status",
                "n",
                "edges",
                "mode",
                "lambda2_base",
                "multiplicity",
                "degree_hypothesis",
                "tested",
                "decreased",
                "ties",
                "a_minus",
                "c1",
                "c2",
                "flagged",
                "flagged_decreased",
            ],
        );
        let mut pairs = Table::new(
            Some("pairs"),
            &[
                "trial",
                "u",
                "w",
                "lambda2_new",
                "decreased",
                "tie",
                "sufficient_condition",
            ],
        );
        let mut frontier = Table::new(Some("frontier"), &["trial", "c1", "c2_max"]);
        let mode_name = match self.mode {
            Mode::Exact => "exact",
            Mode::Sampled(_) => "sampled",
        };
        for (t, (n, edges, r)) in results.into_iter().enumerate() {
            match r {
                Ok(rep) => {
                    let decreased = rep.tested.iter().filter(|r| r.decreased).count();
                    let ties = rep.tested.iter().filter(|r| r.tie).count();
                    let flagged = rep.tested.iter().filter(|r| r.sufficient_condition).count();
                    let confirmed = rep
                        .tested
                        .iter()
                        .filter(|r| r.sufficient_condition && r.decreased)
                        .count();
                    graphs.push(row![
                        t,
                        "ok",
                        n,
                        edges,
                        mode_name,
                        rep.lambda2_base,
                        rep.multiplicity,
                        rep.degree_hypothesis,
                        rep.tested.len(),
                        decreased,
                        ties,
                        rep.a_minus,
                        rep.c1,
                        rep.c2,
                        flagged,
                        confirmed
                    ]);
                    for r in &rep.tested {
                        pairs.push(row![
                            t,
                            r.u,
                            r.w,
                            r.lambda2_new,
                            r.decreased,
                            r.tie,
                            r.sufficient_condition
                        ]);
                    }
                    for f in &rep.frontier {
                        frontier.push(row![t, f.c1, f.c2_max]);
                    }
                }
                Err(status) => {
                    let mut cells = row![t, status, n, edges, mode_name];
                    cells.resize(graphs.header.len(), Cell::Empty);
                    graphs.push(cells);
                }
            }
        }
        Ok(Output {
            tables: vec![graphs, pairs, frontier],
            warnings: Vec::new(),
        })
    }
}
