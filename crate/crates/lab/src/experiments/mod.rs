//! Built-in experiment kinds.

mod braess;
mod density;
mod graph_audit;
mod nodal;
mod smallball;
mod survey;

use deloc_core::graphs::{sample_gnp, GraphSample};
use deloc_core::rng::Seed;
use rayon::prelude::*;

use crate::config::GraphSource;
use crate::error::LabError;
use crate::registry::Experiment;

pub use braess::Braess;
pub use density::DensityCurveKind;
pub use graph_audit::GraphAudit;
pub use nodal::Nodal;
pub use smallball::SmallBallAudit;
pub use survey::DelocSurvey;

pub fn builtin() -> Vec<Box<dyn Experiment>> {
    vec![
        Box::new(DelocSurvey),
        Box::new(SmallBallAudit),
        Box::new(DensityCurveKind),
        Box::new(GraphAudit),
        Box::new(Braess),
        Box::new(Nodal),
    ]
}

/// Applies `f` to every graph of `source` in parallel and returns the
/// results in trial order. Trial `t` of a `G(n, p)` source is seeded by
/// `(master, t)`.
fn per_graph<T: Send>(
    source: &GraphSource,
    master: u64,
    f: impl Fn(usize, &GraphSample, Seed) -> Result<T, LabError> + Sync,
) -> Result<Vec<T>, LabError> {
    match source {
        GraphSource::EdgeList { graph, .. } => Ok(vec![f(0, graph, Seed::new(master, 0))?]),
        GraphSource::Gnp { n, p, trials } => (0..*trials)
            .into_par_iter()
            .map(|t| {
                let seed = Seed::new(master, t as u64);
                let g = sample_gnp(*n, *p, seed)?;
                f(t, &g, seed)
            })
            .collect(),
    }
}

/// Status cell for a per-graph failure that the run can report and survive.
fn recoverable(e: &deloc_core::Error) -> Option<&'static str> {
    match e {
        deloc_core::Error::NoNonEdges => Some("NoNonEdges"),
        deloc_core::Error::Degenerate(_) => Some("Degenerate"),
        _ => None,
    }
}
