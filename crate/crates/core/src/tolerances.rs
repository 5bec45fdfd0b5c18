/// Numerical tolerances shared by the audits.
///
/// The defaults are the contract values; callers that need a different knob
/// construct their own record and pass it explicitly where an operation accepts one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Eigen-residual bound is `residual_factor * (1 + ‖A‖)`.
    pub residual_factor: f64,
    /// Pairwise orthogonality of symmetric eigenvectors.
    pub orthogonality: f64,
    /// Unit-norm slack for vectors handed to the mass-profile routines.
    pub unit_norm: f64,
    /// Relative agreement of the two sides of the negative second moment identity.
    pub second_moment_rel: f64,
    /// Smallest singular value below which a matrix counts as rank deficient.
    pub rank_floor: f64,
    /// Relative slack for `s_A >= bound` comparisons in the decomposition audit.
    pub decomposition_slack: f64,
    /// Nodal-domain zero threshold, relative to `‖v‖∞`.
    pub zero_tol: f64,
    /// Band within which a spectral-gap change counts as a tie.
    pub tie_tol: f64,
    /// Target for the certified Fourier-inversion truncation error.
    pub fourier_tail: f64,
    /// Two eigenvalues closer than this are flagged as a multiplicity.
    pub multiplicity: f64,
    /// Slack when comparing floating-point products to `k = ⌈εn⌉`.
    pub ceil_slack: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        residual_factor: 1e-8,
        orthogonality: 1e-10,
        unit_norm: 1e-10,
        second_moment_rel: 1e-8,
        rank_floor: 1e-10,
        decomposition_slack: 1e-12,
        zero_tol: 1e-12,
        tie_tol: 1e-10,
        fourier_tail: 1e-6,
        multiplicity: 1e-8,
        ceil_slack: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// `⌈x⌉` that ignores representation noise, so `0.1 * 400` maps to 40.
pub fn robust_ceil(x: f64) -> usize {
    let slack = Tolerances::DEFAULT.ceil_slack * x.abs().max(1.0);
    (x - slack).ceil().max(0.0) as usize
}
