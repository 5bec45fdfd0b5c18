use deloc_core::ensembles::DistributionSpec;
use deloc_core::linalg::SubspaceBasis;
use deloc_core::rng::{Domain, Seed};
use deloc_core::smallball::{
    levy_concentration, projection_density_sup, randomize_coordinates_audit, small_ball_gx,
    superlevel_measure, tensorization_audit, ProjectionMethod, Samples, TensorizationKind,
};
use deloc_core::Complex64;
use nalgebra::DVector;
use rayon::prelude::*;
use statrs::function::erf::erf;

use crate::config::{distribution, nonnegative_grid, Params, Setup};
use crate::error::LabError;
use crate::registry::{Experiment, Output, Plan, RunContext};
use crate::row;
use crate::table::{fmt_f64, Table};

const AUDITS: &str = "levy, superlevel, tensorization_z1z2, tensorization_product, small_ball_gx, randomize, projection_sup";

pub struct SmallBallAudit;

enum Audit {
    Levy {
        entry: DistributionSpec,
        samples: usize,
        r_grid: Vec<f64>,
    },
    Superlevel {
        entry: DistributionSpec,
        t_grid: Vec<f64>,
    },
    Tensorization {
        kind: TensorizationKind,
        t_grid: Vec<f64>,
        samples: usize,
    },
    SmallBall {
        l: usize,
        entry: DistributionSpec,
        x: DVector<Complex64>,
        theta_grid: Vec<f64>,
        trials: usize,
    },
    Randomize {
        n: usize,
        k: usize,
        entry: DistributionSpec,
        imaginary: Option<DVector<f64>>,
        r_grid: Vec<f64>,
        trials: usize,
    },
    Projection {
        dists: Vec<DistributionSpec>,
        basis: Vec<DVector<f64>>,
        method: Method,
        c: f64,
    },
}

#[derive(Clone, Copy)]
enum Method {
    Fourier,
    Histogram { samples: usize, bin: f64 },
}

struct AuditPlan {
    name: String,
    audit: Audit,
}

impl Experiment for SmallBallAudit {
    fn name(&self) -> &'static str {
        "smallball_audit"
    }

    fn summary(&self) -> &'static str {
        "Lévy concentration, characteristic-function decay, tensorization and small-ball audits"
    }

    fn prepare(&self, p: &mut Params, _setup: &Setup) -> Option<Box<dyn Plan>> {
        let name = p.string("audit")?;
        let audit = match name.as_str() {
            "levy" => levy(p),
            "superlevel" => superlevel(p),
            "tensorization_z1z2" => z1z2(p),
            "tensorization_product" => product(p),
            "small_ball_gx" => small_ball(p),
            "randomize" => randomize(p),
            "projection_sup" => projection(p),
            other => {
                p.error(
                    "audit",
                    format!("unknown audit `{other}`; expected one of {AUDITS}"),
                );
                None
            }
        };
        if p.has_errors() {
            return None;
        }
        Some(Box::new(AuditPlan {
            name,
            audit: audit?,
        }))
    }
}

fn positive_count(p: &mut Params, key: &str, default: usize, min: usize) -> usize {
    let v = p.usize_or(key, default);
    if v < min {
        p.error(key, format!("must be at least {min}"));
    }
    v
}

fn unit_grid(p: &mut Params, key: &str) -> Option<Vec<f64>> {
    let g = p.f64_list(key)?;
    if g.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        p.error(key, "values must lie in (0, 1)");
        return None;
    }
    Some(g)
}

fn levy(p: &mut Params) -> Option<Audit> {
    let entry = p.object("entry", distribution);
    let samples = positive_count(p, "samples", 100_000, 1);
    let r_grid = nonnegative_grid(p, "r_grid");
    Some(Audit::Levy {
        entry: entry?,
        samples,
        r_grid: r_grid?,
    })
}

fn superlevel(p: &mut Params) -> Option<Audit> {
    let entry = p.object("entry", distribution);
    let rescale = p.bool_or("rescale", false);
    let t_grid = unit_grid(p, "t_grid");
    let mut entry = entry?;
    if rescale {
        match entry.rescaled_to_unit_density() {
            Ok(d) => entry = d,
            Err(e) => {
                p.error("rescale", e.to_string());
                return None;
            }
        }
    } else if entry
        .density_bound()
        .is_none_or(|k| (k - 1.0).abs() > 1e-12)
    {
        p.error(
            "entry",
            "the law must have density bound 1; set `rescale` to rescale it",
        );
        return None;
    }
    Some(Audit::Superlevel {
        entry,
        t_grid: t_grid?,
    })
}

fn z1z2(p: &mut Params) -> Option<Audit> {
    let d = p.f64("d");
    let m = p.f64("m");
    let t_grid = nonnegative_grid(p, "t_grid");
    let samples = positive_count(p, "samples", 1_000_000, 1);
    if d.is_some_and(|d| !(d > 1.0)) {
        p.error("d", "must exceed 1");
    }
    Some(Audit::Tensorization {
        kind: TensorizationKind::Z1Z2 { d: d?, m: m? },
        t_grid: t_grid?,
        samples,
    })
}

fn product(p: &mut Params) -> Option<Audit> {
    let l = positive_count(p, "l", 4, 1);
    let c = p.f64_or("c", 1.0);
    let t_grid = nonnegative_grid(p, "t_grid");
    let samples = positive_count(p, "samples", 1_000_000, 1);
    if !(c > 0.0) {
        p.error("c", "must be positive");
    }
    Some(Audit::Tensorization {
        kind: TensorizationKind::product(l, c),
        t_grid: t_grid?,
        samples,
    })
}

fn small_ball(p: &mut Params) -> Option<Audit> {
    let l = positive_count(p, "l", 1, 1);
    let m = positive_count(p, "m", 1, 1);
    let entry = p.object("entry", distribution);
    let x = p.opt_f64_list("x");
    let theta_grid = nonnegative_grid(p, "theta_grid");
    let trials = positive_count(p, "trials", 10_000, 100);
    let x = match x {
        None => DVector::from_fn(m, |i, _| if i == 0 { 1.0 } else { 0.0 }),
        Some(v) => {
            let v = DVector::from_vec(v);
            if v.len() != m {
                p.error("x", format!("length {} does not match m = {m}", v.len()));
                return None;
            }
            if (v.norm() - 1.0).abs() > 1e-8 {
                p.error("x", format!("must be a unit vector, norm is {}", v.norm()));
                return None;
            }
            v
        }
    };
    Some(Audit::SmallBall {
        l,
        entry: entry?,
        x: x.map(|t| Complex64::new(t, 0.0)),
        theta_grid: theta_grid?,
        trials,
    })
}

fn randomize(p: &mut Params) -> Option<Audit> {
    let n = positive_count(p, "n", 1, 1);
    let k = positive_count(p, "k", 1, 1);
    let entry = p.object("entry", distribution);
    let imaginary = p.opt_f64_list("imaginary");
    let r_grid = nonnegative_grid(p, "r_grid");
    let trials = positive_count(p, "trials", 100_000, 1);
    if k > n {
        p.error("k", format!("subspace dimension {k} exceeds n = {n}"));
    }
    if let Some(y) = &imaginary {
        if y.len() != n {
            p.error(
                "imaginary",
                format!("length {} does not match n = {n}", y.len()),
            );
        }
    }
    let entry = entry?;
    if !entry.is_continuous() {
        p.error("entry", "the law must have a density");
        return None;
    }
    Some(Audit::Randomize {
        n,
        k,
        entry,
        imaginary: imaginary.map(DVector::from_vec),
        r_grid: r_grid?,
        trials,
    })
}

fn projection(p: &mut Params) -> Option<Audit> {
    let dists = p.objects("dists", distribution);
    let basis = p
        .f64_rows("basis")
        .map(|rows| rows.into_iter().map(DVector::from_vec).collect::<Vec<_>>());
    let method = p.opt_string("method").unwrap_or_else(|| "fourier".into());
    let samples = positive_count(p, "samples", 400_000, 1);
    let bin = p.f64_or("bin", 0.05);
    let c = p.f64_or("c", 2.0);
    let method = match method.as_str() {
        "fourier" => Method::Fourier,
        "histogram" => Method::Histogram { samples, bin },
        other => {
            p.error(
                "method",
                format!("unknown method `{other}`; expected fourier or histogram"),
            );
            return None;
        }
    };
    if !(bin > 0.0) {
        p.error("bin", "must be positive");
    }
    if !(c > 0.0) {
        p.error("c", "must be positive");
    }
    let (dists, basis) = (dists?, basis?);
    if basis.is_empty() || basis.len() > 2 {
        p.error("basis", "expected 1 or 2 spanning vectors");
    }
    if basis.iter().any(|v| v.len() != dists.len()) {
        p.error("basis", format!("vectors must have length {}", dists.len()));
    }
    Some(Audit::Projection {
        dists,
        basis,
        method,
        c,
    })
}

impl Plan for AuditPlan {
    fn run(&self, ctx: &RunContext) -> Result<Output, LabError> {
        let mut t = Table::new(
            None,
            &[
                "audit",
                "x",
                "empirical",
                "bound",
                "reference",
                "margin",
                "holds",
                "note",
            ],
        );
        let seed = |i| Seed::new(ctx.master_seed, i);
        let name = self.name.as_str();
        match &self.audit {
            Audit::Levy {
                entry,
                samples,
                r_grid,
            } => {
                let xs: Vec<f64> = (0..*samples)
                    .into_par_iter()
                    .map(|i| entry.sample(&mut seed(0).stream(Domain::MonteCarlo, i as u64, 0)))
                    .collect();
                let s = Samples::from_scalars(&xs);
                for &r in r_grid {
                    let est = levy_concentration(&s, r)?;
                    let reference = levy_reference(entry, r);
                    let margin = reference.map(|q| 3.0 * (q * (1.0 - q) / *samples as f64).sqrt());
                    t.push(row![
                        name,
                        r,
                        est,
                        None::<f64>,
                        reference,
                        margin,
                        None::<bool>,
                        None::<String>
                    ]);
                }
            }
            Audit::Superlevel { entry, t_grid } => {
                for &level in t_grid {
                    let r = superlevel_measure(entry, level, ctx.constants.halasz_c)?;
                    let note = format!("window={}", fmt_f64(r.window));
                    t.push(row![
                        name,
                        level,
                        r.measure,
                        r.applicable_bound(),
                        None::<f64>,
                        None::<f64>,
                        r.holds(),
                        note
                    ]);
                }
            }
            Audit::Tensorization {
                kind,
                t_grid,
                samples,
            } => {
                let rows =
                    tensorization_audit(*kind, t_grid, *samples, seed(0), ctx.constants.m_guard)?;
                for r in rows {
                    t.push(row![
                        name,
                        r.t,
                        r.empirical,
                        r.bound,
                        None::<f64>,
                        3.0 * r.sigma,
                        r.holds,
                        None::<String>
                    ]);
                }
            }
            Audit::SmallBall {
                l,
                entry,
                x,
                theta_grid,
                trials,
            } => {
                let c0 = ctx.constants.c0;
                for &theta in theta_grid {
                    let r =
                        small_ball_gx(*l, x.len(), entry, x, theta, *trials, ctx.master_seed, c0)?;
                    let note = format!("smallest_c0={}", fmt_f64(r.smallest_c0));
                    let holds = r.empirical <= r.bound;
                    t.push(row![
                        name,
                        theta,
                        r.empirical,
                        r.bound,
                        None::<f64>,
                        None::<f64>,
                        holds,
                        note
                    ]);
                    let row_holds = r.row_bound.map(|b| r.row_empirical <= b);
                    t.push(row![
                        "small_ball_row",
                        theta,
                        r.row_empirical,
                        r.row_bound,
                        None::<f64>,
                        None::<f64>,
                        row_holds,
                        None::<String>
                    ]);
                }
            }
            Audit::Randomize {
                n,
                k,
                entry,
                imaginary,
                r_grid,
                trials,
            } => {
                let e = SubspaceBasis::random_complex(*n, *k, seed(1))?;
                for &r in r_grid {
                    let rep = randomize_coordinates_audit(
                        entry,
                        &e,
                        imaginary.as_ref(),
                        r,
                        *trials,
                        seed(2),
                    )?;
                    t.push(row![
                        name,
                        r,
                        rep.lhs,
                        rep.rhs,
                        None::<f64>,
                        rep.margin,
                        rep.holds,
                        None::<String>
                    ]);
                }
            }
            Audit::Projection {
                dists,
                basis,
                method,
                c,
            } => {
                let e = SubspaceBasis::spanned_by(dists.len(), basis)?;
                let m = match *method {
                    Method::Fourier => ProjectionMethod::Fourier,
                    Method::Histogram { samples, bin } => ProjectionMethod::Histogram {
                        samples,
                        bin,
                        seed: seed(0),
                    },
                };
                let r = projection_density_sup(dists, &e, m, *c)?;
                t.push(row![
                    name,
                    e.dim(),
                    r.sup,
                    r.bound,
                    None::<f64>,
                    3.0 * r.std_error,
                    r.holds,
                    None::<String>
                ]);
            }
        }
        Ok(Output {
            tables: vec![t],
            warnings: Vec::new(),
        })
    }
}

/// Exact `L(X, r)` for laws whose concentration function has a closed form.
fn levy_reference(d: &DistributionSpec, r: f64) -> Option<f64> {
    Some(match *d {
        DistributionSpec::Uniform { a, b } => (2.0 * r / (b - a)).min(1.0),
        DistributionSpec::Gaussian { sigma, .. } => erf(r / (sigma * std::f64::consts::SQRT_2)),
        DistributionSpec::BernoulliSym => {
            if r >= 1.0 {
                1.0
            } else {
                0.5
            }
        }
        DistributionSpec::Bernoulli { p } => {
            if r >= 0.5 {
                1.0
            } else {
                p.max(1.0 - p)
            }
        }
        DistributionSpec::PointMass { .. } => 1.0,
    })
}
