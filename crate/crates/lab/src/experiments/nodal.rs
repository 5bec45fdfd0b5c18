use deloc_core::graphs::{cross_domain_degrees, nodal_domains};
use deloc_core::linalg::{eigenpairs, SymmetryHint};

use super::per_graph;
use crate::config::{graph_source, GraphSource, Params, Setup};
use crate::error::LabError;
use crate::registry::{Experiment, Output, Plan, RunContext};
use crate::row;
use crate::table::Table;

pub struct Nodal;

struct NodalPlan {
    source: GraphSource,
    include_first: bool,
}

impl Experiment for Nodal {
    fn name(&self) -> &'static str {
        "nodal"
    }

    fn summary(&self) -> &'static str {
        "nodal domains and cross-domain degrees of adjacency eigenvectors"
    }

    fn prepare(&self, p: &mut Params, setup: &Setup) -> Option<Box<dyn Plan>> {
        let source = graph_source(p, setup.base_dir);
        let include_first = p.bool_or("include_first", false);
        if p.has_errors() {
            return None;
        }
        Some(Box::new(NodalPlan {
            source: source?,
            include_first,
        }))
    }
}

struct VectorRow {
    index: usize,
    eigenvalue: f64,
    positive: usize,
    negative: usize,
    zero: usize,
    cross: Option<(usize, usize)>,
}

impl Plan for NodalPlan {
    fn run(&self, ctx: &RunContext) -> Result<Output, LabError> {
        let zero_tol = ctx.constants.zero_tol;
        let start = usize::from(!self.include_first);
        let results = per_graph(&self.source, ctx.master_seed, |_, g, seed| {
            // Eigenvalues in descending order; index 0 is the Perron vector.
            let data = eigenpairs(&g.adjacency_matrix(), SymmetryHint::Symmetric)
                .map_err(|e| e.with_seed(seed))?;
            let mut rows = Vec::with_capacity(data.len());
            for i in start..data.len() {
                let v = data
                    .real_eigenvector(i)
                    .expect("symmetric input has real eigenvectors");
                let d = nodal_domains(g, &v, zero_tol)?;
                rows.push(VectorRow {
                    index: i,
                    eigenvalue: data.eigenvalues[i].re,
                    positive: d.positive_domains.len(),
                    negative: d.negative_domains.len(),
                    zero: d.zero_set.len(),
                    cross: cross_domain_degrees(g, &v).ok(),
                });
            }
            Ok(rows)
        })?;

        let mut vectors = Table::new(
            None,
            &[
                "trial",
                "index",
                "eigenvalue",
                "positive_domains",
                "negative_domains",
                "domains",
                "zero_set",
                "cross_min_positive",
                "cross_min_negative",
            ],
        );
        let mut summary = Table::new(
            Some("summary"),
            &[
                "trial",
                "vectors",
                "two_domains",
                "empty_zero_set",
                "two_domains_and_empty_zero_set",
            ],
        );
        for (t, rows) in results.into_iter().enumerate() {
            let mut two = 0;
            let mut empty = 0;
            let mut both = 0;
            for r in &rows {
                let domains = r.positive + r.negative;
                two += usize::from(domains == 2);
                empty += usize::from(r.zero == 0);
                both += usize::from(domains == 2 && r.zero == 0);
                vectors.push(row![
                    t,
                    r.index,
                    r.eigenvalue,
                    r.positive,
                    r.negative,
                    domains,
                    r.zero,
                    r.cross.map(|c| c.0),
                    r.cross.map(|c| c.1)
                ]);
            }
            summary.push(row![t, rows.len(), two, empty, both]);
        }
        Ok(Output {
            tables: vec![vectors, summary],
            warnings: Vec::new(),
        })
    }
}
