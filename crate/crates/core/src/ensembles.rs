//! Entry laws and random matrix ensembles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::rng::{Domain, Seed};

/// Scalar law of a matrix entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Uniform {
        a: f64,
        b: f64,
    },
    Gaussian {
        mean: f64,
        sigma: f64,
    },
    /// ±1 with probability one half each.
    BernoulliSym,
    /// Values 0/1, uncentered.
    Bernoulli {
        p: f64,
    },
    PointMass {
        c: f64,
    },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::spec(
                        "entry.b",
                        format!("uniform requires a < b, got a={a}, b={b}"),
                    ));
                }
                if !(b - a).is_finite() {
                    return Err(Error::spec("entry.b", "uniform width b - a overflows"));
                }
            }
            DistributionSpec::Gaussian { mean, sigma } => {
                if !mean.is_finite() {
                    return Err(Error::spec("entry.mean", "must be finite"));
                }
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::spec(
                        "entry.sigma",
                        format!("gaussian requires sigma > 0, got {sigma}"),
                    ));
                }
            }
            DistributionSpec::Bernoulli { p } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::spec(
                        "entry.p",
                        format!("bernoulli requires p in (0,1), got {p}"),
                    ));
                }
            }
            DistributionSpec::PointMass { c } => {
                if !c.is_finite() {
                    return Err(Error::spec("entry.c", "must be finite"));
                }
            }
            DistributionSpec::BernoulliSym => {}
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DistributionSpec::Uniform { .. } => "uniform",
            DistributionSpec::Gaussian { .. } => "gaussian",
            DistributionSpec::BernoulliSym => "bernoulli_sym",
            DistributionSpec::Bernoulli { .. } => "bernoulli",
            DistributionSpec::PointMass { .. } => "point_mass",
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(
            self,
            DistributionSpec::Uniform { .. } | DistributionSpec::Gaussian { .. }
        )
    }

    /// Essential supremum of the density, `None` for discrete laws.
    pub fn density_bound(&self) -> Option<f64> {
        density_bound(self)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Uniform { a, b } => 0.5 * (a + b),
            DistributionSpec::Gaussian { mean, .. } => mean,
            DistributionSpec::BernoulliSym => 0.0,
            DistributionSpec::Bernoulli { p } => p,
            DistributionSpec::PointMass { c } => c,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            DistributionSpec::Uniform { a, b } => (b - a) * (b - a) / 12.0,
            DistributionSpec::Gaussian { sigma, .. } => sigma * sigma,
            DistributionSpec::BernoulliSym => 1.0,
            DistributionSpec::Bernoulli { p } => p * (1.0 - p),
            DistributionSpec::PointMass { .. } => 0.0,
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            DistributionSpec::Gaussian { mean, sigma } => {
                0.5 * erfc(-(x - mean) / (sigma * std::f64::consts::SQRT_2))
            }
            DistributionSpec::BernoulliSym => {
                if x < -1.0 {
                    0.0
                } else if x < 1.0 {
                    0.5
                } else {
                    1.0
                }
            }
            DistributionSpec::Bernoulli { p } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
            DistributionSpec::PointMass { c } => {
                if x < c {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            DistributionSpec::Gaussian { mean, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sigma * z
            }
            DistributionSpec::BernoulliSym => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            DistributionSpec::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            DistributionSpec::PointMass { c } => c,
        }
    }

    /// Affine copy of a continuous law whose density bound is exactly 1.
    pub fn rescaled_to_unit_density(&self) -> Result<DistributionSpec> {
        match *self {
            DistributionSpec::Uniform { a, b } => {
                let mid = 0.5 * (a + b);
                Ok(DistributionSpec::Uniform {
                    a: mid - 0.5,
                    b: mid + 0.5,
                })
            }
            DistributionSpec::Gaussian { mean, .. } => Ok(DistributionSpec::Gaussian {
                mean,
                sigma: 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            }),
            _ => Err(Error::Argument(format!(
                "{} has no density to rescale",
                self.kind_name()
            ))),
        }
    }
}

pub fn density_bound(d: &DistributionSpec) -> Option<f64> {
    match *d {
        DistributionSpec::Uniform { a, b } => Some(1.0 / (b - a)),
        DistributionSpec::Gaussian { sigma, .. } => {
            Some(1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt()))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Iid,
    Symmetric,
    SkewSymmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub n: usize,
    pub symmetry: Symmetry,
    pub entry: DistributionSpec,
    pub shift_mu: f64,
    /// Imaginary part held fixed across trials; its presence makes samples complex.
    pub fixed_imaginary: Option<DMatrix<f64>>,
}

impl EnsembleSpec {
    pub fn new(n: usize, symmetry: Symmetry, entry: DistributionSpec) -> Self {
        Self {
            n,
            symmetry,
            entry,
            shift_mu: 0.0,
            fixed_imaginary: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::spec("n", "matrix side must be positive"));
        }
        self.entry.validate()?;
        if !self.shift_mu.is_finite() {
            return Err(Error::spec("shift_mu", "must be finite"));
        }
        if let Some(im) = &self.fixed_imaginary {
            if im.nrows() != self.n || im.ncols() != self.n {
                return Err(Error::spec(
                    "fixed_imaginary",
                    format!(
                        "expected {0}x{0}, got {1}x{2}",
                        self.n,
                        im.nrows(),
                        im.ncols()
                    ),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampledMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl SampledMatrix {
    pub fn n(&self) -> usize {
        match self {
            SampledMatrix::Real(m) => m.nrows(),
            SampledMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match self {
            SampledMatrix::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            SampledMatrix::Complex(m) => m.clone(),
        }
    }

    pub fn as_real(&self) -> Option<&DMatrix<f64>> {
        match self {
            SampledMatrix::Real(m) => Some(m),
            SampledMatrix::Complex(_) => None,
        }
    }

    /// `A - mu * J` with `J` the all-ones matrix.
    pub fn shifted(&self, mu: f64) -> SampledMatrix {
        match self {
            SampledMatrix::Real(m) => SampledMatrix::Real(shift_matrix(m, mu)),
            SampledMatrix::Complex(m) => SampledMatrix::Complex(m.map(|z| z - mu)),
        }
    }
}

/// Draws one matrix. Entries `A_ij` and `A_ji` come from the stream of the
/// unordered pair `{i, j}`; the symmetric classes use its first draw for both.
/// The shift `spec.shift_mu` is not applied here (see [`shift_matrix`]).
pub fn sample_matrix(spec: &EnsembleSpec, seed: Seed) -> Result<SampledMatrix> {
    spec.validate()?;
    let n = spec.n;
    let entry = spec.entry;
    let mut real = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut stream = seed.pair_stream(Domain::MatrixEntry, i, j);
            let upper = entry.sample(&mut stream);
            match spec.symmetry {
                Symmetry::Iid => {
                    real[(i, j)] = upper;
                    if i != j {
                        real[(j, i)] = entry.sample(&mut stream);
                    }
                }
                Symmetry::Symmetric => {
                    real[(i, j)] = upper;
                    real[(j, i)] = upper;
                }
                Symmetry::SkewSymmetric => {
                    if i != j {
                        real[(i, j)] = upper;
                        real[(j, i)] = -upper;
                    }
                }
            }
        }
    }
    Ok(match &spec.fixed_imaginary {
        None => SampledMatrix::Real(real),
        Some(im) => SampledMatrix::Complex(DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(real[(i, j)], im[(i, j)])
        })),
    })
}

/// Rectangular `rows x cols` matrix of iid entries, entry `(i, j)` from its own stream.
pub fn sample_rectangular(
    rows: usize,
    cols: usize,
    entry: &DistributionSpec,
    seed: Seed,
) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |i, j| {
        entry.sample(&mut seed.stream(Domain::Rectangular, i as u64, j as u64))
    })
}

/// Generates an imaginary part once, to be frozen into [`EnsembleSpec::fixed_imaginary`].
pub fn frozen_imaginary(n: usize, entry: &DistributionSpec, seed: Seed) -> Result<DMatrix<f64>> {
    entry.validate()?;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        entry.sample(&mut seed.stream(Domain::ImaginaryPart, i as u64, j as u64))
    }))
}

pub fn shift_matrix(a: &DMatrix<f64>, mu: f64) -> DMatrix<f64> {
    if mu == 0.0 {
        return a.clone();
    }
    a.map(|x| x - mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed() -> Seed {
        Seed::new(11, 0)
    }

    #[test]
    fn uniform_width_must_be_finite() {
        assert!(DistributionSpec::Uniform {
            a: -1e308,
            b: 1e308
        }
        .validate()
        .is_err());
        assert!(DistributionSpec::Uniform {
            a: -1e300,
            b: 1e300
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn symmetric_bernoulli_is_symmetric_pm_one() {
        let spec = EnsembleSpec::new(3, Symmetry::Symmetric, DistributionSpec::BernoulliSym);
        for t in 0..20 {
            let a = sample_matrix(&spec, seed().trial(t)).unwrap();
            let a = a.as_real().unwrap();
            assert_eq!(a, &a.transpose());
            assert!(a.iter().all(|&x| x == 1.0 || x == -1.0));
        }
    }

    #[test]
    fn skew_symmetric_has_zero_diagonal() {
        let spec = EnsembleSpec::new(
            6,
            Symmetry::SkewSymmetric,
            DistributionSpec::Gaussian {
                mean: 0.0,
                sigma: 1.0,
            },
        );
        let a = sample_matrix(&spec, seed()).unwrap();
        let a = a.as_real().unwrap();
        assert_eq!(a, &(-a.transpose()));
        assert!((0..6).all(|i| a[(i, i)] == 0.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = EnsembleSpec::new(
            8,
            Symmetry::Iid,
            DistributionSpec::Uniform { a: -1.0, b: 2.0 },
        );
        assert_eq!(
            sample_matrix(&spec, seed()).unwrap(),
            sample_matrix(&spec, seed()).unwrap()
        );
        assert_ne!(
            sample_matrix(&spec, seed()).unwrap(),
            sample_matrix(&spec, seed().trial(1)).unwrap()
        );
    }

    #[test]
    fn gaussian_entry_moments() {
        let spec = EnsembleSpec::new(
            200,
            Symmetry::Iid,
            DistributionSpec::Gaussian {
                mean: 0.0,
                sigma: 1.0,
            },
        );
        let a = sample_matrix(&spec, Seed::new(2024, 0)).unwrap();
        let a = a.as_real().unwrap();
        let n = a.len() as f64;
        let mean = a.iter().sum::<f64>() / n;
        let var = a.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }

    #[test]
    fn fixed_imaginary_gives_complex_with_frozen_part() {
        let mut spec = EnsembleSpec::new(4, Symmetry::Iid, DistributionSpec::BernoulliSym);
        let im = frozen_imaginary(
            4,
            &DistributionSpec::Uniform { a: 0.0, b: 1.0 },
            Seed::new(5, 0),
        )
        .unwrap();
        spec.fixed_imaginary = Some(im.clone());
        for t in 0..3 {
            match sample_matrix(&spec, seed().trial(t)).unwrap() {
                SampledMatrix::Complex(m) => assert_eq!(m.map(|z| z.im), im),
                SampledMatrix::Real(_) => panic!("expected complex sample"),
            }
        }
    }

    #[test]
    fn invalid_specs_name_their_field() {
        let bad = [
            (DistributionSpec::Uniform { a: 1.0, b: 1.0 }, "entry.b"),
            (
                DistributionSpec::Gaussian {
                    mean: 0.0,
                    sigma: 0.0,
                },
                "entry.sigma",
            ),
            (DistributionSpec::Bernoulli { p: 1.0 }, "entry.p"),
        ];
        for (d, field) in bad {
            match sample_matrix(&EnsembleSpec::new(2, Symmetry::Iid, d), seed()) {
                Err(Error::Spec { field: f, .. }) => assert_eq!(f, field),
                other => panic!("unexpected {other:?}"),
            }
        }
        assert!(matches!(
            EnsembleSpec::new(0, Symmetry::Iid, DistributionSpec::BernoulliSym).validate(),
            Err(Error::Spec { .. })
        ));
    }

    #[test]
    fn density_bounds() {
        assert_eq!(
            density_bound(&DistributionSpec::Uniform { a: -0.5, b: 0.5 }),
            Some(1.0)
        );
        let g = density_bound(&DistributionSpec::Gaussian {
            mean: 0.0,
            sigma: 1.0,
        })
        .unwrap();
        assert!((g - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(density_bound(&DistributionSpec::BernoulliSym), None);
        assert_eq!(density_bound(&DistributionSpec::PointMass { c: 2.0 }), None);
    }

    #[test]
    fn shift_examples() {
        let j = DMatrix::from_element(4, 4, 1.0);
        assert_eq!(shift_matrix(&j, 1.0), DMatrix::zeros(4, 4));
        let a = DMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        assert_eq!(shift_matrix(&a, 0.0), a);
        assert_eq!(shift_matrix(&shift_matrix(&a, 3.0), -3.0), a);
    }
}
