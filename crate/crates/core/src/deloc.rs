//! No-gaps mass profiles, ℓ∞ norms and localization events of eigenvectors.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::ensembles::{sample_matrix, EnsembleSpec, SampledMatrix, Symmetry};
use crate::error::{Error, Result};
use crate::linalg::{
    eigenpairs, eigenpairs_complex, operator_norm, smin_submatrix, SpectralData, SymmetryHint,
};
use crate::rng::Seed;
use crate::tolerances::{robust_ceil, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct MinMass {
    pub mass: f64,
    /// Indices of the `⌈εn⌉` smallest coordinates, ties broken by lowest index.
    pub indices: Vec<usize>,
}

/// Size of the forced subsets, `k = ⌈εn⌉`.
pub fn subset_size(n: usize, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Argument(format!("eps = {eps} outside (0, 1]")));
    }
    let scaled = eps * n as f64;
    if scaled < 1.0 - Tolerances::DEFAULT.ceil_slack {
        return Err(Error::Argument(format!(
            "eps * n = {} < 1; need eps >= 1/n",
            scaled
        )));
    }
    Ok(robust_ceil(scaled).clamp(1, n))
}

fn check_unit<T: ComplexField<RealField = f64>>(v: &DVector<T>) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > Tolerances::DEFAULT.unit_norm {
        return Err(Error::Argument(format!("vector norm {norm} is not 1")));
    }
    Ok(())
}

fn sorted_magnitudes<T: ComplexField<RealField = f64>>(v: &DVector<T>) -> Vec<(f64, usize)> {
    let mut mags: Vec<(f64, usize)> = v
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone().modulus(), i))
        .collect();
    mags.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    mags
}

/// Minimum of `‖v_I‖₂` over `|I| = ⌈εn⌉`, realized by the smallest coordinates.
pub fn min_mass<T: ComplexField<RealField = f64>>(v: &DVector<T>, eps: f64) -> Result<MinMass> {
    check_unit(v)?;
    let k = subset_size(v.len(), eps)?;
    let mags = sorted_magnitudes(v);
    Ok(mass_of_smallest(&mags, k))
}

fn mass_of_smallest(mags: &[(f64, usize)], k: usize) -> MinMass {
    let mass = mags[..k].iter().map(|(m, _)| m * m).sum::<f64>().sqrt();
    let mut indices: Vec<usize> = mags[..k].iter().map(|&(_, i)| i).collect();
    indices.sort_unstable();
    MinMass { mass, indices }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassProfile {
    pub n: usize,
    pub eps_grid: Vec<f64>,
    pub min_mass: Vec<f64>,
    pub linf: f64,
}

pub fn mass_profile<T: ComplexField<RealField = f64>>(
    v: &DVector<T>,
    eps_grid: &[f64],
) -> Result<MassProfile> {
    check_unit(v)?;
    let n = v.len();
    let mags = sorted_magnitudes(v);
    // Prefix sums of squared sorted magnitudes give every k at once.
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for (m, _) in &mags {
        prefix.push(prefix.last().unwrap() + m * m);
    }
    let min_mass = eps_grid
        .iter()
        .map(|&eps| subset_size(n, eps).map(|k| prefix[k].sqrt()))
        .collect::<Result<Vec<_>>>()?;
    Ok(MassProfile {
        n,
        eps_grid: eps_grid.to_vec(),
        min_mass,
        linf: mags.last().map(|m| m.0).unwrap_or(0.0),
    })
}

/// Default localization threshold `δ = (εs)^6`.
pub fn theorem_delta(eps: f64, s: f64) -> f64 {
    (eps * s).powi(6)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocWitness {
    pub eigen_index: usize,
    pub indices: Vec<usize>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocReport {
    pub event: bool,
    pub witness: Option<LocWitness>,
    pub eps: f64,
    pub delta: f64,
}

/// Some eigenvector carries mass below `delta` on `⌈εn⌉` coordinates.
/// The witness is the first such eigenvector in eigenvalue order.
pub fn localization_event(s: &SpectralData, eps: f64, delta: f64) -> Result<LocReport> {
    for (idx, v) in s.eigenvectors.iter().enumerate() {
        let m = min_mass(v, eps)?;
        if m.mass < delta {
            return Ok(LocReport {
                event: true,
                witness: Some(LocWitness {
                    eigen_index: idx,
                    indices: m.indices,
                    mass: m.mass,
                }),
                eps,
                delta,
            });
        }
    }
    Ok(LocReport {
        event: false,
        witness: None,
        eps,
        delta,
    })
}

/// Localization of an approximate eigenvector: `‖(A - λ)v‖ <= Mδ√n` and the
/// smallest `⌈εn⌉` coordinates of `v` carry mass below `delta`.
pub fn approx_localization_event(
    a: &DMatrix<Complex64>,
    v: &DVector<Complex64>,
    lambda: Complex64,
    eps: f64,
    delta: f64,
    m: f64,
) -> Result<bool> {
    let n = a.nrows() as f64;
    if lambda.norm() > m * n.sqrt() {
        return Err(Error::Argument(format!(
            "|lambda| = {} exceeds M sqrt(n) = {}",
            lambda.norm(),
            m * n.sqrt()
        )));
    }
    let residual = (a * v - v * lambda).norm();
    if residual > m * delta * n.sqrt() {
        return Ok(false);
    }
    Ok(min_mass(v, eps)?.mass < delta)
}

/// Deterministic step of the reduction to invertibility: for an eigenpair
/// `(λ, v)` with light coordinate set `I`, the columns of `A - λ` outside `I`
/// satisfy `s_min ≤ ‖A - λ‖ ‖v_I‖ / ‖v_{I^c}‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionWitness {
    pub mass: f64,
    pub smin: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn reduction_witness(
    a: &DMatrix<Complex64>,
    lambda: Complex64,
    v: &DVector<Complex64>,
    eps: f64,
) -> Result<ReductionWitness> {
    let mm = min_mass(v, eps)?;
    let n = a.nrows();
    if mm.indices.len() >= n {
        return Err(Error::Argument("eps selects every coordinate".into()));
    }
    let smin = smin_submatrix(a, lambda, &mm.indices)?;
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= lambda;
    }
    let norm = operator_norm(&shifted);
    let rest = (1.0 - mm.mass * mm.mass).max(0.0).sqrt();
    let bound = if rest > 0.0 {
        norm * mm.mass / rest
    } else {
        f64::INFINITY
    };
    let residual = (a * v - v * lambda).norm();
    let slack = residual / rest.max(f64::MIN_POSITIVE) + 1e-12 * norm.max(1.0);
    Ok(ReductionWitness {
        mass: mm.mass,
        smin,
        bound,
        holds: smin <= bound + slack,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyConfig {
    pub trials: usize,
    pub eps_grid: Vec<f64>,
    pub master_seed: u64,
    pub loc_eps: f64,
    pub loc_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRow {
    pub trial: usize,
    pub index: usize,
    pub eigenvalue: Complex64,
    pub linf: f64,
    pub min_mass: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trial: usize,
    pub norm: f64,
    pub max_linf: f64,
    pub min_mass: Vec<f64>,
    pub localized: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveySummary {
    pub eps_grid: Vec<f64>,
    pub min_mass: Vec<f64>,
    pub max_linf: f64,
    pub loc_eps: f64,
    pub loc_delta: f64,
    pub loc_events: usize,
    pub trials: usize,
}

impl SurveySummary {
    pub fn loc_frequency(&self) -> f64 {
        self.loc_events as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyReport {
    pub rows: Vec<SurveyRow>,
    pub trials: Vec<TrialSummary>,
    pub summary: SurveySummary,
}

pub fn spectral_data_of(sample: &SampledMatrix, symmetry: Symmetry) -> Result<SpectralData> {
    match (sample, symmetry) {
        (SampledMatrix::Real(a), Symmetry::Symmetric) => eigenpairs(a, SymmetryHint::Symmetric),
        (SampledMatrix::Real(a), _) => eigenpairs(a, SymmetryHint::General),
        (SampledMatrix::Complex(a), _) => eigenpairs_complex(a),
    }
}

/// Samples `trials` matrices and records the profile of every eigenvector.
/// Trials run in parallel; output order is `(trial, eigen index)`.
pub fn deloc_survey(spec: &EnsembleSpec, cfg: &SurveyConfig) -> Result<SurveyReport> {
    spec.validate()?;
    if cfg.trials == 0 {
        return Err(Error::Argument("trials must be >= 1".into()));
    }
    if cfg.eps_grid.is_empty() {
        return Err(Error::Argument("eps_grid must not be empty".into()));
    }
    for &eps in cfg.eps_grid.iter().chain(std::iter::once(&cfg.loc_eps)) {
        subset_size(spec.n, eps)?;
    }

    let per_trial: Vec<(Vec<SurveyRow>, TrialSummary)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = Seed::new(cfg.master_seed, trial as u64);
            survey_trial(spec, cfg, trial, seed).map_err(|e| e.with_seed(seed))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut trials = Vec::with_capacity(per_trial.len());
    for (r, t) in per_trial {
        rows.extend(r);
        trials.push(t);
    }
    let min_mass = (0..cfg.eps_grid.len())
        .map(|g| {
            trials
                .iter()
                .map(|t| t.min_mass[g])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let summary = SurveySummary {
        eps_grid: cfg.eps_grid.clone(),
        min_mass,
        max_linf: trials.iter().map(|t| t.max_linf).fold(0.0, f64::max),
        loc_eps: cfg.loc_eps,
        loc_delta: cfg.loc_delta,
        loc_events: trials.iter().filter(|t| t.localized).count(),
        trials: cfg.trials,
    };
    Ok(SurveyReport {
        rows,
        trials,
        summary,
    })
}

fn survey_trial(
    spec: &EnsembleSpec,
    cfg: &SurveyConfig,
    trial: usize,
    seed: Seed,
) -> Result<(Vec<SurveyRow>, TrialSummary)> {
    let sample = sample_matrix(spec, seed)?.shifted(spec.shift_mu);
    let norm = match &sample {
        SampledMatrix::Real(a) => operator_norm(a),
        SampledMatrix::Complex(a) => operator_norm(a),
    };
    let data = spectral_data_of(&sample, spec.symmetry)?;
    let mut rows = Vec::with_capacity(data.len());
    for (index, v) in data.eigenvectors.iter().enumerate() {
        let profile = mass_profile(v, &cfg.eps_grid)?;
        rows.push(SurveyRow {
            trial,
            index,
            eigenvalue: data.eigenvalues[index],
            linf: profile.linf,
            min_mass: profile.min_mass,
        });
    }
    let localized = localization_event(&data, cfg.loc_eps, cfg.loc_delta)?.event;
    let min_mass = (0..cfg.eps_grid.len())
        .map(|g| {
            rows.iter()
                .map(|r| r.min_mass[g])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let summary = TrialSummary {
        trial,
        norm,
        max_linf: rows.iter().map(|r| r.linf).fold(0.0, f64::max),
        min_mass,
        localized,
    };
    Ok((rows, summary))
}
