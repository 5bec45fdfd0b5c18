//! Small-ball machinery: Lévy concentration estimators, characteristic
//! functions and their superlevel sets, Fourier-inversion densities of
//! weighted sums, and Monte Carlo audits of the tensorization lemmas.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::ensembles::{sample_rectangular, DistributionSpec};
use crate::error::{Error, Result};
use crate::linalg::{real_embedding_vector, SubspaceBasis};
use crate::quadrature::{bisect, gauss_legendre};
use crate::rng::{Domain, Seed};
use crate::tolerances::Tolerances;

// ---------------------------------------------------------------------------
// Lévy concentration
// ---------------------------------------------------------------------------

/// Row-major point cloud in R^dim.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    dim: usize,
    data: Vec<f64>,
}

impl Samples {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::Argument(format!(
                "{} values do not form points of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_scalars(xs: &[f64]) -> Self {
        Self {
            dim: 1,
            data: xs.to_vec(),
        }
    }

    pub fn from_vectors(points: &[DVector<f64>]) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(1);
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::Argument("points of mixed dimension".into()));
            }
            data.extend(p.iter());
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

/// Candidate centers used by the multidimensional estimator by default.
pub const DEFAULT_MAX_CENTERS: usize = 2000;

/// Empirical Lévy concentration `max_c #{i : ‖Y_i - c‖ ≤ r} / N`.
///
/// In one dimension this is the exact supremum over closed intervals of
/// length `2r`. In higher dimension centers range over the first
/// [`DEFAULT_MAX_CENTERS`] samples (an iid subsample) while counts run over
/// all samples, so the estimate lies between `L(Y, r)` (up to sampling
/// error) and `L(Y, 2r)`.
pub fn levy_concentration(samples: &Samples, r: f64) -> Result<f64> {
    levy_concentration_with(samples, r, DEFAULT_MAX_CENTERS)
}

pub fn levy_concentration_with(samples: &Samples, r: f64, max_centers: usize) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Argument("need at least two samples".into()));
    }
    if !(r >= 0.0) {
        return Err(Error::Argument(format!("radius {r} must be >= 0")));
    }
    if max_centers == 0 {
        return Err(Error::Argument("max_centers must be positive".into()));
    }
    if samples.dim == 1 {
        return Ok(levy_1d(&samples.data, r));
    }
    Ok(levy_multi(samples, r, max_centers))
}

fn levy_1d(xs: &[f64], r: f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let width = 2.0 * r;
    let mut best = 0usize;
    let mut lo = 0usize;
    for hi in 0..s.len() {
        while s[hi] - s[lo] > width {
            lo += 1;
        }
        best = best.max(hi - lo + 1);
    }
    best as f64 / s.len() as f64
}

const HASH_DIMS: usize = 4;
type CellKey = [i64; HASH_DIMS];

fn levy_multi(samples: &Samples, r: f64, max_centers: usize) -> f64 {
    let n = samples.len();
    let centers = n.min(max_centers);
    let r2 = r * r;
    let within = |c: usize, j: usize| -> bool {
        let mut s = 0.0;
        for (a, b) in samples.point(c).iter().zip(samples.point(j)) {
            let d = a - b;
            s += d * d;
        }
        s <= r2
    };
    if r == 0.0 {
        let best = (0..centers)
            .into_par_iter()
            .map(|c| {
                (0..n)
                    .filter(|&j| samples.point(j) == samples.point(c))
                    .count()
            })
            .max()
            .unwrap_or(0);
        return best as f64 / n as f64;
    }

    // Hash on the first few coordinates with cell side r; a ball of radius r
    // around a point meets only the 3^q neighbouring cells.
    let q = samples.dim.min(HASH_DIMS);
    let key_of = |p: &[f64]| -> CellKey {
        let mut k = [0i64; HASH_DIMS];
        for (d, slot) in k.iter_mut().enumerate().take(q) {
            *slot = (p[d] / r).floor() as i64;
        }
        k
    };
    let mut cells: HashMap<CellKey, Vec<usize>> = HashMap::new();
    for i in 0..n {
        cells.entry(key_of(samples.point(i))).or_default().push(i);
    }
    let offsets = neighbour_offsets(q);
    let best = (0..centers)
        .into_par_iter()
        .map(|c| {
            let key = key_of(samples.point(c));
            offsets
                .iter()
                .filter_map(|off| {
                    let mut k = key;
                    for d in 0..q {
                        k[d] += off[d];
                    }
                    cells.get(&k)
                })
                .map(|members| members.iter().filter(|&&j| within(c, j)).count())
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0);
    best as f64 / n as f64
}

fn neighbour_offsets(q: usize) -> Vec<[i64; HASH_DIMS]> {
    let mut out = vec![[0i64; HASH_DIMS]];
    for d in 0..q {
        let mut next = Vec::with_capacity(out.len() * 3);
        for o in &out {
            for delta in -1..=1 {
                let mut k = *o;
                k[d] = delta;
                next.push(k);
            }
        }
        out = next;
    }
    out
}

/// Sample-centered concentration computed directly with complex distances,
/// with the same center rule as [`levy_concentration_with`]. Intended for
/// cross-checks.
pub fn levy_concentration_complex(
    samples: &[DVector<Complex64>],
    r: f64,
    max_centers: usize,
) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Argument("need at least two samples".into()));
    }
    let n = samples.len();
    let best = samples
        .iter()
        .take(max_centers.max(1))
        .map(|c| samples.iter().filter(|y| (*y - c).norm() <= r).count())
        .max()
        .unwrap_or(0);
    Ok(best as f64 / n as f64)
}

// ---------------------------------------------------------------------------
// Characteristic functions
// ---------------------------------------------------------------------------

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

/// `E e^{ixX}` in closed form.
pub fn char_fn(d: &DistributionSpec, x: f64) -> Complex64 {
    match *d {
        DistributionSpec::Uniform { a, b } => {
            Complex64::from_polar(sinc(x * (b - a) / 2.0), x * (a + b) / 2.0)
        }
        DistributionSpec::Gaussian { mean, sigma } => {
            Complex64::from_polar((-0.5 * sigma * sigma * x * x).exp(), x * mean)
        }
        DistributionSpec::BernoulliSym => Complex64::new(x.cos(), 0.0),
        DistributionSpec::Bernoulli { p } => {
            Complex64::new(1.0 - p, 0.0) + Complex64::from_polar(p, x)
        }
        DistributionSpec::PointMass { c } => Complex64::from_polar(1.0, x * c),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperlevelReport {
    pub t: f64,
    /// Lebesgue measure of `{x : |φ(x)| > t}`.
    pub measure: f64,
    /// Integration window `[-T, T]`; `|φ| ≤ t` outside it.
    pub window: f64,
    /// `2π / t²`, the bound for `t < 3/4`.
    pub bound_small: f64,
    /// `C √(1 - t²)`, the bound for `t ≥ 3/4`.
    pub bound_large: f64,
    pub holds_small: bool,
    pub holds_large: bool,
}

impl SuperlevelReport {
    /// Verdict of the bound that applies at this `t`.
    pub fn holds(&self) -> bool {
        if self.t < 0.75 {
            self.holds_small
        } else {
            self.holds_large
        }
    }

    pub fn applicable_bound(&self) -> f64 {
        if self.t < 0.75 {
            self.bound_small
        } else {
            self.bound_large
        }
    }
}

const SUPERLEVEL_STEP: f64 = 1e-3;
const SUPERLEVEL_CORE: f64 = 50.0;

/// Measure of the superlevel set of `|φ|` for a law of density bound 1.
pub fn superlevel_measure(d: &DistributionSpec, t: f64, halasz_c: f64) -> Result<SuperlevelReport> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Argument(format!("t = {t} outside (0, 1)")));
    }
    d.validate()?;
    match d.density_bound() {
        Some(k) if (k - 1.0).abs() <= 1e-12 => {}
        Some(k) => {
            return Err(Error::Argument(format!(
                "density bound {k} is not 1; rescale first"
            )))
        }
        None => return Err(Error::Argument(format!("{} has no density", d.kind_name()))),
    }
    // Beyond the window |φ| ≤ t by the closed-form envelope.
    let window = match *d {
        DistributionSpec::Uniform { a, b } => SUPERLEVEL_CORE.max(2.0 / ((b - a) * t)) + 1.0,
        DistributionSpec::Gaussian { sigma, .. } => (2.0 * (1.0 / t).ln()).sqrt() / sigma + 1.0,
        _ => unreachable!("checked above"),
    };
    let g = |x: f64| char_fn(d, x).norm() - t;
    // |φ| is even for these kinds, so integrate over [0, T] and double.
    let steps = (window / SUPERLEVEL_STEP).ceil() as usize;
    let mut length = 0.0;
    let mut prev_x = 0.0;
    let mut prev_g = g(0.0);
    let mut start = if prev_g > 0.0 { Some(0.0) } else { None };
    for s in 1..=steps {
        let x = (s as f64 * SUPERLEVEL_STEP).min(window);
        let gx = g(x);
        if (gx > 0.0) != (prev_g > 0.0) {
            let root = bisect(g, prev_x, x);
            match start.take() {
                Some(s0) => length += root - s0,
                None => start = Some(root),
            }
        }
        prev_x = x;
        prev_g = gx;
    }
    if let Some(s0) = start {
        length += window - s0;
    }
    let measure = 2.0 * length;
    let bound_small = 2.0 * PI / (t * t);
    let bound_large = halasz_c * (1.0 - t * t).sqrt();
    Ok(SuperlevelReport {
        t,
        measure,
        window,
        bound_small,
        bound_large,
        holds_small: measure <= bound_small,
        holds_large: measure <= bound_large,
    })
}

// ---------------------------------------------------------------------------
// Densities of weighted sums via Fourier inversion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSumSpec {
    pub dists: Vec<DistributionSpec>,
    pub weights: Vec<f64>,
    /// Standard deviation of an independent Gaussian added to the sum.
    pub smoothing_sigma: f64,
}

impl WeightedSumSpec {
    pub fn new(dists: Vec<DistributionSpec>, weights: Vec<f64>) -> Self {
        Self {
            dists,
            weights,
            smoothing_sigma: 0.0,
        }
    }

    pub fn with_smoothing(mut self, sigma: f64) -> Self {
        self.smoothing_sigma = sigma;
        self
    }

    /// Checks the invariants and returns the factors with nonzero weight.
    fn factors(&self) -> Result<Vec<(DistributionSpec, f64)>> {
        if self.dists.len() != self.weights.len() {
            return Err(Error::spec(
                "weights",
                format!(
                    "{} weights for {} distributions",
                    self.weights.len(),
                    self.dists.len()
                ),
            ));
        }
        let sq: f64 = self.weights.iter().map(|a| a * a).sum();
        if (sq - 1.0).abs() > 1e-10 {
            return Err(Error::spec(
                "weights",
                format!("sum of squares is {sq}, expected 1"),
            ));
        }
        if !(self.smoothing_sigma >= 0.0 && self.smoothing_sigma.is_finite()) {
            return Err(Error::spec("smoothing_sigma", "must be a nonnegative real"));
        }
        let mut out = Vec::new();
        for (d, &a) in self.dists.iter().zip(&self.weights) {
            d.validate()?;
            if !d.is_continuous() {
                return Err(Error::spec(
                    "dists",
                    format!("{} is not a continuous law", d.kind_name()),
                ));
            }
            if a != 0.0 {
                out.push((*d, a));
            }
        }
        Ok(out)
    }

    /// Interval containing all but a negligible part of the mass of the sum.
    pub fn support(&self) -> Result<(f64, f64)> {
        let factors = self.factors()?;
        let mut lo = 0.0;
        let mut hi = 0.0;
        let mut var = self.smoothing_sigma.powi(2);
        for (d, a) in factors {
            match d {
                DistributionSpec::Uniform { a: l, b: h } => {
                    lo += (a * l).min(a * h);
                    hi += (a * l).max(a * h);
                }
                DistributionSpec::Gaussian { mean, sigma } => {
                    lo += a * mean;
                    hi += a * mean;
                    var += (a * sigma).powi(2);
                }
                _ => unreachable!(),
            }
        }
        let spread = 9.0 * var.sqrt();
        Ok((lo - spread, hi + spread))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub grid_step: f64,
    /// Frequency cutoff `T` of the inversion integral.
    pub truncation_window: f64,
    /// Certified bound on the truncation error of every value.
    pub truncation_error: f64,
}

impl DensityCurve {
    pub fn trapezoid_mass(&self) -> f64 {
        if self.values.len() < 2 {
            return 0.0;
        }
        let inner: f64 = self.values[1..self.values.len() - 1].iter().sum();
        self.grid_step * (inner + 0.5 * (self.values[0] + self.values[self.values.len() - 1]))
    }

    pub fn max(&self) -> (f64, f64) {
        self.grid
            .iter()
            .zip(&self.values)
            .fold((f64::NAN, f64::NEG_INFINITY), |acc, (&x, &v)| {
                if v > acc.1 {
                    (x, v)
                } else {
                    acc
                }
            })
    }
}

/// Closed-form envelope of `|Π φ_j(a_j x)|` together with the quantities the
/// truncation bound needs.
struct Envelope {
    /// `(|a_j| (b_j - a_j) / 2)` per uniform factor.
    uniform_scales: Vec<f64>,
    /// Total Gaussian variance in the frequency domain.
    gauss_var: f64,
    /// Oscillation frequency bound of the product.
    frequency: f64,
}

impl Envelope {
    fn new(factors: &[(DistributionSpec, f64)], smoothing: f64) -> Self {
        let mut uniform_scales = Vec::new();
        let mut gauss_var = smoothing * smoothing;
        let mut frequency = 0.0;
        for &(d, a) in factors {
            match d {
                DistributionSpec::Uniform { a: l, b: h } => {
                    uniform_scales.push(a.abs() * (h - l) / 2.0);
                    frequency += a.abs() * l.abs().max(h.abs());
                }
                DistributionSpec::Gaussian { mean, sigma } => {
                    gauss_var += (a * sigma).powi(2);
                    frequency += (a * mean).abs();
                }
                _ => unreachable!(),
            }
        }
        Self {
            uniform_scales,
            gauss_var,
            frequency,
        }
    }

    fn integrable(&self) -> bool {
        self.uniform_scales.len() >= 2 || self.gauss_var > 0.0
    }

    fn uniform_part(&self, x: f64) -> f64 {
        self.uniform_scales
            .iter()
            .map(|&s| (1.0 / (s * x)).min(1.0))
            .product()
    }

    /// Smallest x beyond which every uniform factor is on the `1/(s x)` branch.
    fn knee(&self) -> f64 {
        self.uniform_scales
            .iter()
            .map(|&s| 1.0 / s)
            .fold(1.0, f64::max)
    }

    /// Upper bound on `∫_T^∞ |Φ(x)| dx`, valid for `T ≥ knee`.
    fn tail(&self, t: f64) -> f64 {
        let k = self.uniform_scales.len();
        let u = self.uniform_part(t);
        let mut best = f64::INFINITY;
        if k >= 2 {
            best = best.min(u * (-0.5 * self.gauss_var * t * t).exp() * t / (k as f64 - 1.0));
        }
        if self.gauss_var > 0.0 {
            let s = self.gauss_var.sqrt();
            best = best.min(u * (PI / 2.0).sqrt() / s * erfc(s * t / std::f64::consts::SQRT_2));
        }
        best
    }

    /// Cutoff whose truncation error in the density is at most `target`.
    fn cutoff(&self, target: f64) -> Result<f64> {
        // Density error ≤ (1/π) ∫_T^∞ |Φ|.
        let err = |t: f64| self.tail(t) / PI;
        let mut hi = self.knee();
        while err(hi) > target {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::numerical("truncation window diverged"));
            }
        }
        let lo = (hi / 2.0).max(self.knee());
        if lo < hi && err(lo) > target {
            let t = bisect(|t| err(t) - target, lo, hi);
            return Ok(t.max(lo).min(hi) * (1.0 + 1e-12));
        }
        Ok(hi)
    }
}

const GL_ORDER: usize = 16;
const NODE_CHUNK: usize = 8192;

/// Density of `Σ a_j X_j` (plus optional Gaussian smoothing) at evenly spaced
/// points, by numerical inversion of the product of closed-form
/// characteristic functions:
///
/// `f(y) = (1/π) ∫_0^T Re[Φ(x) e^{-ixy}] dx`, `Φ(x) = Π_j φ_j(a_j x) · e^{-σ²x²/2}`.
///
/// `T` is chosen from the envelope `|φ_uniform(u)| ≤ min(1, 2/((b-a)|u|))`
/// (and the Gaussian factors) so the truncation error is at most the
/// configured tail target.
pub fn weighted_sum_density(spec: &WeightedSumSpec, eval_points: &[f64]) -> Result<DensityCurve> {
    weighted_sum_density_with(spec, eval_points, Tolerances::DEFAULT.fourier_tail)
}

pub fn weighted_sum_density_with(
    spec: &WeightedSumSpec,
    eval_points: &[f64],
    tail_target: f64,
) -> Result<DensityCurve> {
    let factors = spec.factors()?;
    if factors.is_empty() {
        return Err(Error::Argument("all weights are zero".into()));
    }
    if eval_points.is_empty() {
        return Err(Error::Argument("no evaluation points".into()));
    }
    let step = if eval_points.len() >= 2 {
        eval_points[1] - eval_points[0]
    } else {
        0.0
    };
    for w in eval_points.windows(2) {
        if ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs().max(1.0) || !(step > 0.0) {
            return Err(Error::Argument(
                "evaluation points must be increasing and evenly spaced".into(),
            ));
        }
    }
    let env = Envelope::new(&factors, spec.smoothing_sigma);
    if !env.integrable() {
        return Err(Error::Argument(
            "characteristic-function product is not integrable; set smoothing_sigma > 0".into(),
        ));
    }
    let cutoff = env.cutoff(tail_target)?;
    let y_max = eval_points.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let freq = env.frequency + y_max + env.gauss_var.sqrt();
    // About one and a half oscillations per 16-node panel.
    let panel = (3.0 * PI / freq.max(1e-300)).min(cutoff).min(12.0);
    let panels = (cutoff / panel).ceil() as usize;
    let panel = cutoff / panels as f64;
    let (gx, gw) = gauss_legendre(GL_ORDER);
    let total_nodes = panels * GL_ORDER;

    let y0 = eval_points[0];
    let p = eval_points.len();
    let smoothing = spec.smoothing_sigma;
    let node = |idx: usize| -> (f64, f64) {
        let (pi, k) = (idx / GL_ORDER, idx % GL_ORDER);
        let lo = panel * pi as f64;
        (lo + 0.5 * panel * (gx[k] + 1.0), 0.5 * panel * gw[k])
    };

    let chunks = total_nodes.div_ceil(NODE_CHUNK);
    let partials: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; p];
            let end = ((c + 1) * NODE_CHUNK).min(total_nodes);
            for idx in c * NODE_CHUNK..end {
                let (x, w) = node(idx);
                let mut phi = Complex64::new(w * (-0.5 * smoothing * smoothing * x * x).exp(), 0.0);
                for (d, a) in &factors {
                    phi *= char_fn(d, a * x);
                }
                let mut term = phi * Complex64::from_polar(1.0, -x * y0);
                let rot = Complex64::from_polar(1.0, -x * step);
                for (j, slot) in acc.iter_mut().enumerate() {
                    if j > 0 && j % 64 == 0 {
                        // Re-anchor the rotation to bound drift.
                        term = phi * Complex64::from_polar(1.0, -x * (y0 + step * j as f64));
                    }
                    *slot += term.re;
                    term *= rot;
                }
            }
            acc
        })
        .collect();

    let mut values = vec![0.0; p];
    for part in partials {
        for (v, x) in values.iter_mut().zip(part) {
            *v += x;
        }
    }
    for v in values.iter_mut() {
        *v = (*v / PI).max(0.0);
    }
    Ok(DensityCurve {
        grid: eval_points.to_vec(),
        values,
        grid_step: step,
        truncation_window: cutoff,
        truncation_error: env.tail(cutoff) / PI,
    })
}

/// `points` evenly spaced points spanning the support of the sum.
pub fn density_grid(spec: &WeightedSumSpec, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Argument("need at least two grid points".into()));
    }
    let (lo, hi) = spec.support()?;
    let margin = 0.05 * (hi - lo).max(1e-3);
    let (lo, hi) = (lo - margin, hi + margin);
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|i| lo + step * i as f64).collect())
}

/// Center of symmetry of the weighted sum.
fn weighted_center(factors: &[(DistributionSpec, f64)]) -> f64 {
    factors.iter().map(|(d, a)| a * d.mean()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectionMethod {
    /// Fourier inversion (dimension 1 only).
    Fourier,
    /// Histogram of `samples` projected points with square bins of side `bin`.
    Histogram {
        samples: usize,
        bin: f64,
        seed: Seed,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSup {
    pub sup: f64,
    /// One-standard-error bar (histogram method only).
    pub std_error: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Supremum of the density of `P_E X` for `X` with independent coordinates
/// `dists` and `E` of dimension 1 or 2; checked against `(C K)^d` where `K`
/// is the largest coordinate density bound.
pub fn projection_density_sup(
    dists: &[DistributionSpec],
    e: &SubspaceBasis<f64>,
    method: ProjectionMethod,
    c: f64,
) -> Result<ProjectionSup> {
    let n = dists.len();
    if e.ambient_dim() != n {
        return Err(Error::Argument(format!(
            "subspace in dimension {} for {n} coordinates",
            e.ambient_dim()
        )));
    }
    let d = e.dim();
    if d > 2 {
        return Err(Error::Unsupported(format!("projection dimension {d} > 2")));
    }
    let mut k = 0.0f64;
    for dist in dists {
        dist.validate()?;
        k = k.max(dist.density_bound().ok_or_else(|| {
            Error::Argument(format!("{} has no density bound", dist.kind_name()))
        })?);
    }
    let bound = (c * k).powi(d as i32);
    let (sup, std_error) = match (method, d) {
        (ProjectionMethod::Fourier, 1) => (fourier_sup(dists, e)?, 0.0),
        (ProjectionMethod::Fourier, _) => {
            return Err(Error::Unsupported(
                "Fourier method needs dimension 1".into(),
            ))
        }
        (ProjectionMethod::Histogram { samples, bin, seed }, _) => {
            histogram_sup(dists, e, samples, bin, seed)?
        }
    };
    Ok(ProjectionSup {
        sup,
        std_error,
        bound,
        holds: sup <= bound + 3.0 * std_error,
    })
}

const SUP_GRID_HALF: usize = 10;

fn fourier_sup(dists: &[DistributionSpec], e: &SubspaceBasis<f64>) -> Result<f64> {
    let a: Vec<f64> = e.matrix().column(0).iter().copied().collect();
    let spec = WeightedSumSpec::new(dists.to_vec(), a);
    let factors = spec.factors()?;
    if factors.len() == 1 {
        // A single factor is a rescaled copy of one coordinate.
        let (d, w) = factors[0];
        return Ok(d.density_bound().unwrap() / w.abs());
    }
    // Sums of independent symmetric unimodal laws are symmetric unimodal
    // (Wintner), so the supremum sits at the center of symmetry; the grid
    // around it guards that claim numerically.
    let center = weighted_center(&factors);
    let (lo, hi) = spec.support()?;
    let half = (hi - center).max(center - lo);
    let h = half / SUP_GRID_HALF as f64;
    let grid: Vec<f64> = (0..=2 * SUP_GRID_HALF)
        .map(|i| center + h * (i as f64 - SUP_GRID_HALF as f64))
        .collect();
    let curve = weighted_sum_density(&spec, &grid)?;
    Ok(curve.max().1)
}

fn histogram_sup(
    dists: &[DistributionSpec],
    e: &SubspaceBasis<f64>,
    samples: usize,
    bin: f64,
    seed: Seed,
) -> Result<(f64, f64)> {
    if samples == 0 || !(bin > 0.0) {
        return Err(Error::Argument(
            "histogram needs samples > 0 and bin > 0".into(),
        ));
    }
    let q = e.matrix();
    let d = q.ncols();
    let keys: Vec<(i64, i64)> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = seed.stream(Domain::MonteCarlo, s as u64, 0);
            let x =
                DVector::from_iterator(dists.len(), dists.iter().map(|dist| dist.sample(&mut rng)));
            let y = q.transpose() * x;
            let k0 = (y[0] / bin).floor() as i64;
            let k1 = if d > 1 {
                (y[1] / bin).floor() as i64
            } else {
                0
            };
            (k0, k1)
        })
        .collect();
    let mut counts: HashMap<(i64, i64), usize> = HashMap::new();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    let max = counts.values().copied().max().unwrap_or(0) as f64;
    let volume = bin.powi(d as i32) * samples as f64;
    Ok((max / volume, max.sqrt() / volume))
}

// ---------------------------------------------------------------------------
// Small-ball probability of ‖Gx‖
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallBallReport {
    /// Fraction of trials with `‖Gx‖₂ ≤ θ√l`.
    pub empirical: f64,
    /// `(C₀ θ)^l`.
    pub bound: f64,
    /// Fraction of rows with `|⟨G_j, x⟩| ≤ θ`.
    pub row_empirical: f64,
    /// `C₀ K θ`, when the entry law has a density.
    pub row_bound: Option<f64>,
    /// Smallest `C₀` for which `empirical ≤ (C₀ θ)^l`.
    pub smallest_c0: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn small_ball_gx(
    l: usize,
    m: usize,
    entry: &DistributionSpec,
    x: &DVector<Complex64>,
    theta: f64,
    trials: usize,
    master_seed: u64,
    c0: f64,
) -> Result<SmallBallReport> {
    entry.validate()?;
    if trials < 100 {
        return Err(Error::Argument(format!("trials = {trials} < 100")));
    }
    if x.len() != m || l == 0 {
        return Err(Error::Argument(format!(
            "x has length {}, expected m = {m}",
            x.len()
        )));
    }
    if !(theta >= 0.0) {
        return Err(Error::Argument("theta must be >= 0".into()));
    }
    let radius = theta * (l as f64).sqrt();
    let per_trial: Vec<(bool, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let g = sample_rectangular(l, m, entry, Seed::new(master_seed, t as u64));
            let gc: DMatrix<Complex64> = g.map(|v| Complex64::new(v, 0.0));
            let gx = gc * x;
            let small_rows = gx.iter().filter(|z| z.norm() <= theta).count();
            (gx.norm() <= radius, small_rows)
        })
        .collect();
    let hits = per_trial.iter().filter(|p| p.0).count();
    let rows = per_trial.iter().map(|p| p.1).sum::<usize>();
    let empirical = hits as f64 / trials as f64;
    let smallest_c0 = if theta > 0.0 {
        empirical.powf(1.0 / l as f64) / theta
    } else {
        0.0
    };
    Ok(SmallBallReport {
        empirical,
        bound: (c0 * theta).powi(l as i32),
        row_empirical: rows as f64 / (trials * l) as f64,
        row_bound: entry.density_bound().map(|k| c0 * k * theta),
        smallest_c0,
    })
}

// ---------------------------------------------------------------------------
// Tensorization audits
// ---------------------------------------------------------------------------

/// Synthetic laws meeting each tensorization lemma's hypotheses exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TensorizationKind {
    /// `Z₁ ~ U[0, 1/2]`, `Z₂ = √(d-1) U^{1/(d-1)} / M`; checks
    /// `P(√(Z₁² + Z₂²) ≤ t√d) ≤ (Mt)^d`.
    Z1Z2 { d: f64, m: f64 },
    /// `V_j ~ U[0, 1/C]` for `j ≤ l`; checks `P(Σ V_j² < t² l) ≤ (ct)^l`.
    Product { l: usize, c: f64, c_small: f64 },
}

impl TensorizationKind {
    /// Product kind with the constant `c = C e √π / 2` obtained from the
    /// Laplace-transform argument.
    pub fn product(l: usize, c: f64) -> Self {
        TensorizationKind::Product {
            l,
            c,
            c_small: c * std::f64::consts::E * PI.sqrt() / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorRow {
    pub t: f64,
    pub empirical: f64,
    pub bound: f64,
    /// Binomial standard deviation at the bound.
    pub sigma: f64,
    pub holds: bool,
}

type Curve = Box<dyn Fn(f64) -> f64>;

pub const DEFAULT_M_GUARD: f64 = 4.0;

pub fn tensorization_audit(
    kind: TensorizationKind,
    t_grid: &[f64],
    samples: usize,
    seed: Seed,
    m_guard: f64,
) -> Result<Vec<TensorRow>> {
    if samples == 0 {
        return Err(Error::Argument("samples must be positive".into()));
    }
    if t_grid.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Argument("t grid must be nonnegative".into()));
    }
    let draw = |s: usize| -> f64 {
        let mut rng = seed.stream(Domain::MonteCarlo, s as u64, 0);
        match kind {
            TensorizationKind::Z1Z2 { d, m } => {
                let z1 = 0.5 * rng.random::<f64>();
                let z2 = (d - 1.0).sqrt() * rng.random::<f64>().powf(1.0 / (d - 1.0)) / m;
                (z1 * z1 + z2 * z2).sqrt()
            }
            TensorizationKind::Product { l, c, .. } => (0..l)
                .map(|_| {
                    let v = rng.random::<f64>() / c;
                    v * v
                })
                .sum(),
        }
    };
    // Per t: (statistic threshold, strict comparison, bound).
    let (threshold, strict, bound): (Curve, bool, Curve) = match kind {
        TensorizationKind::Z1Z2 { d, m } => {
            if !(d > 1.0) {
                return Err(Error::Argument(format!("d = {d} must exceed 1")));
            }
            if !(m >= m_guard) {
                return Err(Error::Argument(format!(
                    "M = {m} below the guard {m_guard}"
                )));
            }
            (
                Box::new(move |t| t * d.sqrt()),
                false,
                Box::new(move |t| (m * t).powf(d)),
            )
        }
        TensorizationKind::Product { l, c, c_small } => {
            if l == 0 || !(c > 0.0) || !(c_small > 0.0) {
                return Err(Error::Argument(
                    "product kind needs l >= 1 and positive constants".into(),
                ));
            }
            (
                Box::new(move |t| t * t * l as f64),
                true,
                Box::new(move |t| (c_small * t).powi(l as i32)),
            )
        }
    };
    let mut stats: Vec<f64> = (0..samples).into_par_iter().map(draw).collect();
    stats.sort_by(f64::total_cmp);
    let n = samples as f64;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let thr = threshold(t);
            let count = if strict {
                stats.partition_point(|&s| s < thr)
            } else {
                stats.partition_point(|&s| s <= thr)
            };
            let empirical = count as f64 / n;
            let b = bound(t);
            let sigma = if b < 1.0 {
                (b * (1.0 - b) / n).sqrt()
            } else {
                0.0
            };
            TensorRow {
                t,
                empirical,
                bound: b,
                sigma,
                holds: b >= 1.0 || empirical <= b + 3.0 * sigma,
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Randomizing all coordinates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomizeReport {
    /// Estimate of `L(P_E Z, r)`.
    pub lhs: f64,
    /// Square root of the estimate of `L(P_{Real(E)} Ẑ, 2r)`.
    pub rhs: f64,
    /// Three combined standard errors.
    pub margin: f64,
    pub holds: bool,
}

/// Compares `L(P_E Z, r)` for `Z = X + iY` (`Y` fixed) against
/// `L(P_{Real(E)} Ẑ, 2r)^{1/2}` where `Ẑ` stacks two independent copies of `X`.
pub fn randomize_coordinates_audit(
    dist: &DistributionSpec,
    e: &SubspaceBasis<Complex64>,
    fixed_imaginary: Option<&DVector<f64>>,
    r: f64,
    trials: usize,
    seed: Seed,
) -> Result<RandomizeReport> {
    dist.validate()?;
    if !dist.is_continuous() {
        return Err(Error::Argument(format!(
            "{} is not continuous",
            dist.kind_name()
        )));
    }
    let n = e.ambient_dim();
    let zero = DVector::zeros(n);
    let y = fixed_imaginary.unwrap_or(&zero);
    if y.len() != n {
        return Err(Error::Argument(
            "imaginary part has the wrong length".into(),
        ));
    }
    let real_e = e.realified();
    let draw = |t: usize, copy: u64| -> DVector<f64> {
        let mut rng =
            Seed::new(seed.master, seed.trial_index).stream(Domain::MonteCarlo, t as u64, copy);
        DVector::from_iterator(n, (0..n).map(|_| dist.sample(&mut rng)))
    };
    let lhs_points: Vec<f64> = (0..trials)
        .into_par_iter()
        .flat_map_iter(|t| {
            let x = draw(t, 0);
            let z = DVector::from_fn(n, |i, _| Complex64::new(x[i], y[i]));
            let c: Vec<f64> = real_embedding_vector(&e.coordinates_of(&z)).data.into();
            c
        })
        .collect();
    let rhs_points: Vec<f64> = (0..trials)
        .into_par_iter()
        .flat_map_iter(|t| {
            let x1 = draw(t, 1);
            let x2 = draw(t, 2);
            let zhat = DVector::from_iterator(2 * n, x1.iter().chain(x2.iter()).copied());
            let c: Vec<f64> = real_e.coordinates_of(&zhat).data.into();
            c
        })
        .collect();
    let dim = 2 * e.dim();
    let lhs = levy_concentration(&Samples::new(dim, lhs_points)?, r)?;
    let rhs_sq = levy_concentration(&Samples::new(dim, rhs_points)?, 2.0 * r)?;
    let rhs = rhs_sq.sqrt();
    let nt = trials as f64;
    let var_l = lhs * (1.0 - lhs) / nt;
    let var_r = if rhs_sq > 0.0 {
        rhs_sq * (1.0 - rhs_sq) / nt / (4.0 * rhs_sq)
    } else {
        0.0
    };
    let margin = 3.0 * (var_l + var_r).sqrt();
    Ok(RandomizeReport {
        lhs,
        rhs,
        margin,
        holds: lhs <= rhs + margin,
    })
}
