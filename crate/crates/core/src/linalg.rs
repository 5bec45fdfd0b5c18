//! Dense linear-algebra kernels and audits of the matrix identities used by the
//! invertibility argument.
//!
//! All routines accept real or complex matrices through nalgebra's
//! `ComplexField` with `f64` as the real field.

use nalgebra::{ComplexField, DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{Domain, Seed};
use crate::tolerances::Tolerances;

/// Eigenpairs of one matrix sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// Sorted by real part, then imaginary part, descending.
    pub eigenvalues: Vec<Complex64>,
    /// Unit vectors; the largest-magnitude coordinate of each is positive real.
    pub eigenvectors: Vec<DVector<Complex64>>,
    /// `‖A v - λ v‖₂` per pair.
    pub residuals: Vec<f64>,
}

impl SpectralData {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Real copy of eigenvector `i` when all its imaginary parts vanish.
    pub fn real_eigenvector(&self, i: usize) -> Option<DVector<f64>> {
        let v = &self.eigenvectors[i];
        v.iter().all(|z| z.im == 0.0).then(|| v.map(|z| z.re))
    }

    /// Builds spectral data from caller-supplied pairs, normalizing signs and
    /// computing residuals against `a`.
    pub fn from_pairs(a: &DMatrix<Complex64>, pairs: Vec<(Complex64, DVector<Complex64>)>) -> Self {
        let mut pairs: Vec<_> = pairs
            .into_iter()
            .map(|(l, v)| (l, normalize_phase(v.normalize())))
            .collect();
        pairs.sort_by(|x, y| descending(x.0, y.0));
        let residuals = pairs.iter().map(|(l, v)| residual(a, *l, v)).collect();
        let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
        Self {
            eigenvalues,
            eigenvectors,
            residuals,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryHint {
    Symmetric,
    General,
}

/// Orthonormal basis of a subspace, stored as the columns of an `n x k` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis<T: ComplexField<RealField = f64>> {
    columns: DMatrix<T>,
}

impl<T: ComplexField<RealField = f64>> SubspaceBasis<T> {
    /// Takes columns that are already orthonormal to `1e-10`.
    pub fn from_orthonormal(columns: DMatrix<T>) -> Result<Self> {
        let k = columns.ncols();
        if k == 0 || k > columns.nrows() {
            return Err(Error::Argument(format!(
                "subspace dimension {k} outside 1..={}",
                columns.nrows()
            )));
        }
        let gram = columns.adjoint() * &columns;
        let defect = (gram - DMatrix::<T>::identity(k, k)).camax();
        if defect > Tolerances::DEFAULT.orthogonality {
            return Err(Error::Argument(format!(
                "columns not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Self { columns })
    }

    /// Orthonormal basis of the span of `vectors` (numerically dependent directions dropped).
    pub fn spanned_by(n: usize, vectors: &[DVector<T>]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Argument("empty spanning set".into()));
        }
        let u = span_basis(n, vectors)?;
        if u.ncols() == 0 {
            return Err(Error::Degenerate("spanning set is numerically zero".into()));
        }
        Ok(Self { columns: u })
    }

    pub fn full(n: usize) -> Self {
        Self {
            columns: DMatrix::identity(n, n),
        }
    }

    /// Span of the coordinate vectors `e_i`, `i ∈ indices`.
    pub fn coordinates(n: usize, indices: &[usize]) -> Result<Self> {
        let mut m = DMatrix::<T>::zeros(n, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            if i >= n {
                return Err(Error::Argument(format!(
                    "coordinate {i} out of range for n={n}"
                )));
            }
            m[(i, c)] = T::one();
        }
        Self::from_orthonormal(m)
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.columns
    }

    pub fn project(&self, x: &DVector<T>) -> DVector<T> {
        &self.columns * (self.columns.adjoint() * x)
    }

    /// Coordinates of the projection of `x` in this basis.
    pub fn coordinates_of(&self, x: &DVector<T>) -> DVector<T> {
        self.columns.adjoint() * x
    }
}

impl SubspaceBasis<f64> {
    /// Random `k`-dimensional subspace of R^n (orthonormalized Gaussian columns).
    pub fn random(n: usize, k: usize, seed: Seed) -> Result<Self> {
        let g = DMatrix::from_fn(n, k, |i, j| {
            StandardNormal.sample(&mut seed.stream(Domain::MonteCarlo, i as u64, j as u64))
        });
        let cols: Vec<_> = g.column_iter().map(|c| c.into_owned()).collect();
        Self::spanned_by(n, &cols)
    }
}

impl SubspaceBasis<Complex64> {
    /// Random `k`-dimensional complex subspace of C^n.
    pub fn random_complex(n: usize, k: usize, seed: Seed) -> Result<Self> {
        let g = DMatrix::from_fn(n, k, |i, j| {
            let mut s = seed.stream(Domain::MonteCarlo, i as u64, j as u64);
            let re: f64 = StandardNormal.sample(&mut s);
            let im: f64 = StandardNormal.sample(&mut s);
            Complex64::new(re, im)
        });
        let cols: Vec<_> = g.column_iter().map(|c| c.into_owned()).collect();
        Self::spanned_by(n, &cols)
    }

    /// The real subspace `{Real(z) : z ∈ E}` of R^{2n}; its dimension is `2k`.
    pub fn realified(&self) -> SubspaceBasis<f64> {
        let n = self.ambient_dim();
        let k = self.dim();
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * k);
        for c in 0..k {
            let q = self.columns.column(c);
            for i in 0..n {
                // Real(q) and Real(i q).
                m[(i, 2 * c)] = q[i].re;
                m[(n + i, 2 * c)] = q[i].im;
                m[(i, 2 * c + 1)] = -q[i].im;
                m[(n + i, 2 * c + 1)] = q[i].re;
            }
        }
        SubspaceBasis { columns: m }
    }
}

fn span_basis<T: ComplexField<RealField = f64>>(
    n: usize,
    vectors: &[DVector<T>],
) -> Result<DMatrix<T>> {
    for v in vectors {
        if v.len() != n {
            return Err(Error::Argument(format!(
                "vector of length {} in ambient dimension {n}",
                v.len()
            )));
        }
    }
    let s = DMatrix::from_columns(vectors);
    let svd = SVD::new(s, true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = smax * (n.max(vectors.len()) as f64) * f64::EPSILON * 16.0;
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff && smax > 0.0)
        .collect();
    Ok(u.select_columns(keep.iter()))
}

/// Nonincreasing singular values of `m` (`min(rows, cols)` of them).
pub fn singular_values<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let k = m.nrows().min(m.ncols());
    // Non-finite input would never converge; report NaN instead.
    if !is_finite(m) {
        return vec![f64::NAN; k];
    }
    let Some(svd) = SVD::try_new(m.clone(), false, false, f64::EPSILON, 1000 * k.max(1)) else {
        return vec![f64::NAN; k];
    };
    let mut s: Vec<f64> = svd.singular_values.iter().map(|x| x.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn is_finite<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> bool {
    m.iter().all(|x| x.clone().is_finite())
}

fn ensure_finite<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::numerical("matrix has non-finite entries"))
    }
}

pub fn operator_norm<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn smallest_singular_value<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Smallest singular value of the columns of `A - λI` outside `excluded` (0-based).
pub fn smin_submatrix<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    lambda: T,
    excluded: &[usize],
) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Argument(
            "smin_submatrix needs a square matrix".into(),
        ));
    }
    let mut drop = vec![false; n];
    for &i in excluded {
        if i >= n {
            return Err(Error::Argument(format!("index {i} outside [0, {n})")));
        }
        drop[i] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !drop[i]).collect();
    if kept.len() == n || kept.is_empty() {
        return Err(Error::Argument(format!(
            "index set must satisfy 1 <= |I| < n, got |I| = {}",
            n - kept.len()
        )));
    }
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= lambda.clone();
    }
    Ok(smallest_singular_value(
        &shifted.select_columns(kept.iter()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundednessEvent {
    pub holds: bool,
    pub norm: f64,
}

/// The event `‖A‖ <= M √n`.
pub fn boundedness_event<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    m: f64,
) -> BoundednessEvent {
    let norm = operator_norm(a);
    BoundednessEvent {
        holds: norm <= m * (a.nrows() as f64).sqrt(),
        norm,
    }
}

/// `‖x - P_H x‖₂` for `H = span(s)`.
pub fn distance_to_span<T: ComplexField<RealField = f64>>(
    x: &DVector<T>,
    s: &[DVector<T>],
) -> Result<f64> {
    if s.is_empty() {
        return Ok(x.norm());
    }
    let u = span_basis(x.len(), s)?;
    if u.ncols() == 0 {
        return Ok(x.norm());
    }
    // Two passes of projection removal for orthogonality.
    let mut r = x - &u * (u.adjoint() * x);
    r -= &u * (u.adjoint() * &r);
    Ok(r.norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMomentAudit {
    /// `Σ s_j(B)^-2`.
    pub lhs: f64,
    /// `Σ dist(B_j, H_j)^-2` with `H_j` spanned by the other columns.
    pub rhs: f64,
}

impl SecondMomentAudit {
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs()
    }
}

pub fn negative_second_moment_audit<T: ComplexField<RealField = f64>>(
    b: &DMatrix<T>,
) -> Result<SecondMomentAudit> {
    let (k, m) = b.shape();
    if k < m || m == 0 {
        return Err(Error::Argument(format!("need k >= m >= 1, got {k}x{m}")));
    }
    let s = singular_values(b);
    let smin = *s.last().unwrap();
    if smin <= Tolerances::DEFAULT.rank_floor {
        return Err(Error::Degenerate(format!(
            "rank deficient: smallest singular value {smin:e}"
        )));
    }
    let lhs = s.iter().map(|x| x.powi(-2)).sum();
    let cols: Vec<DVector<T>> = b.column_iter().map(|c| c.into_owned()).collect();
    let mut rhs = 0.0;
    for j in 0..m {
        let others: Vec<DVector<T>> = cols
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != j)
            .map(|(_, c)| c.clone())
            .collect();
        let d = distance_to_span(&cols[j], &others)?;
        rhs += d.powi(-2);
    }
    Ok(SecondMomentAudit { lhs, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionAudit {
    pub s_a: f64,
    /// Smallest retained singular value of `B` (on `E⁺`); `+∞` when `E⁺ = {0}`.
    pub s_b: f64,
    /// `inf ‖Gx‖` over unit `x ∈ E⁻`; `+∞` when `E⁻ = {0}`.
    pub s_g: f64,
    pub norm_a: f64,
    pub bound: f64,
    pub holds: bool,
    /// One of `E⁺`, `E⁻` is trivial; `bound` then falls back to the single-block value.
    pub degenerate: bool,
    pub dim_plus: usize,
}

/// Splits `A` into the first `m1` rows `B` and the rest `G`, splits the row
/// space along the right singular vectors of `B` at `threshold`, and checks
/// `s_A >= s_B s_G / (4 ‖A‖)`.
pub fn decomposition_bound_audit<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    m1: usize,
    threshold: f64,
) -> Result<DecompositionAudit> {
    let (m, n) = a.shape();
    if m1 == 0 || m1 >= m {
        return Err(Error::Argument(format!("m1 = {m1} must lie in [1, {m})")));
    }
    if !(threshold > 0.0) {
        return Err(Error::Argument("threshold must be positive".into()));
    }
    ensure_finite(a)?;
    let b = a.rows(0, m1).into_owned();
    let g = a.rows(m1, m - m1).into_owned();

    // Pad B with zero rows so the SVD returns a full right basis.
    let rows = m1.max(n);
    let mut padded = DMatrix::<T>::zeros(rows, n);
    padded.rows_mut(0, m1).copy_from(&b);
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sv = &svd.singular_values;

    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for i in 0..n {
        // Row i of V^T is the conjugate of the i-th right singular vector.
        let v: DVector<T> = v_t.row(i).adjoint();
        if sv[i] > threshold {
            plus.push((sv[i], v));
        } else {
            minus.push(v);
        }
    }

    let s_a = smallest_singular_value(a);
    let norm_a = operator_norm(a);
    let s_b = plus.iter().map(|(s, _)| *s).fold(f64::INFINITY, f64::min);
    let s_g = if minus.is_empty() {
        f64::INFINITY
    } else {
        let e = SubspaceBasis {
            columns: DMatrix::from_columns(&minus),
        };
        restricted_smin(&g, &e)?
    };
    let dim_plus = plus.len();
    let degenerate = plus.is_empty() || minus.is_empty();
    let bound = if minus.is_empty() {
        s_b
    } else if plus.is_empty() {
        s_g
    } else if norm_a == 0.0 {
        0.0
    } else {
        s_b * s_g / (4.0 * norm_a)
    };
    let slack = Tolerances::DEFAULT.decomposition_slack * norm_a.max(1.0);
    Ok(DecompositionAudit {
        s_a,
        s_b,
        s_g,
        norm_a,
        bound,
        holds: s_a >= bound - slack,
        degenerate,
        dim_plus,
    })
}

/// `inf ‖Gx‖₂` over unit `x ∈ E`.
pub fn restricted_smin<T: ComplexField<RealField = f64>>(
    g: &DMatrix<T>,
    e: &SubspaceBasis<T>,
) -> Result<f64> {
    if e.ambient_dim() != g.ncols() {
        return Err(Error::Argument(format!(
            "subspace lives in dimension {}, matrix has {} columns",
            e.ambient_dim(),
            g.ncols()
        )));
    }
    let gq = g * e.matrix();
    let s = singular_values(&gq);
    // A wide product has a kernel on E.
    if gq.nrows() < gq.ncols() {
        return Ok(0.0);
    }
    Ok(s.last().copied().unwrap_or(0.0))
}

/// Cardinality bound `(1 + 2/ε)^k` of an ε-net of the sphere.
pub fn net_cardinality_bound(k: usize, eps: f64) -> f64 {
    (1.0 + 2.0 / eps).powi(k as i32)
}

/// Greedy farthest-point ε-net of `S^{k-1}` built from a seeded pool of random
/// unit vectors. Points are inserted until every pool point lies within
/// `0.9 ε` of the net, leaving slack for sphere points between pool points.
pub fn epsilon_net(k: usize, eps: f64) -> Result<Vec<DVector<f64>>> {
    if !(1..=12).contains(&k) {
        return Err(Error::Argument(format!("k = {k} outside 1..=12")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Argument(format!("eps = {eps} outside (0, 1]")));
    }
    let bound = net_cardinality_bound(k, eps);
    let pool_size = (40.0 * bound).clamp(256.0, 60_000.0) as usize;
    let seed = Seed::new(eps.to_bits(), k as u64);
    let pool: Vec<DVector<f64>> = (0..pool_size)
        .map(|p| {
            let mut s = seed.stream(Domain::Net, p as u64, 0);
            loop {
                let v: DVector<f64> = DVector::from_fn(k, |_, _| StandardNormal.sample(&mut s));
                let norm = v.norm();
                if norm > 1e-12 {
                    return v / norm;
                }
            }
        })
        .collect();

    let target = 0.9 * eps;
    let mut net: Vec<DVector<f64>> = Vec::new();
    let mut dist = vec![f64::INFINITY; pool_size];
    let mut next = 0;
    loop {
        let point = pool[next].clone();
        for (d, p) in dist.iter_mut().zip(&pool) {
            *d = d.min((p - &point).norm());
        }
        net.push(point);
        let (far, &far_d) = dist
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        if far_d <= target {
            break;
        }
        next = far;
    }
    if net.len() as f64 > bound {
        return Err(Error::numerical(format!(
            "net of size {} exceeds cardinality bound {bound}",
            net.len()
        )));
    }
    Ok(net)
}

/// `Real(z) = [Re z; Im z]`.
pub fn real_embedding_vector(z: &DVector<Complex64>) -> DVector<f64> {
    let n = z.len();
    DVector::from_fn(2 * n, |i, _| if i < n { z[i].re } else { z[i - n].im })
}

/// `RealMat(B) = [[R, -T], [T, R]]` for `B = R + iT`.
pub fn real_embedding_matrix(b: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (l, m) = b.shape();
    DMatrix::from_fn(2 * l, 2 * m, |i, j| {
        let z = b[(i % l, j % m)];
        match (i < l, j < m) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn descending(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Rotates `v` so that its first largest-magnitude coordinate is positive real.
fn normalize_phase(v: DVector<Complex64>) -> DVector<Complex64> {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best = i;
            best_abs = a;
        }
    }
    if best_abs <= 0.0 {
        return v;
    }
    let phase = v[best].conj() / best_abs;
    let mut out = v * phase;
    out[best] = Complex64::new(out[best].norm(), 0.0);
    out
}

fn normalize_sign_real(mut v: DVector<f64>) -> DVector<f64> {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best = i;
            best_abs = x.abs();
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
    v
}

fn residual(a: &DMatrix<Complex64>, lambda: Complex64, v: &DVector<Complex64>) -> f64 {
    (a * v - v * lambda).norm()
}

/// Eigenpairs of a real matrix. With [`SymmetryHint::Symmetric`] the matrix
/// must be symmetric to `1e-12` relative; it is symmetrized before solving.
pub fn eigenpairs(a: &DMatrix<f64>, hint: SymmetryHint) -> Result<SpectralData> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Argument("eigenpairs needs a square matrix".into()));
    }
    ensure_finite(a)?;
    match hint {
        SymmetryHint::Symmetric => symmetric_eigenpairs(a),
        SymmetryHint::General => eigenpairs_complex(&a.map(|x| Complex64::new(x, 0.0))),
    }
}

fn symmetric_eigenpairs(a: &DMatrix<f64>) -> Result<SpectralData> {
    let n = a.nrows();
    let scale = a.amax();
    let asym = (a - a.transpose()).amax();
    if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Argument(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::numerical("symmetric eigensolver did not converge"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .total_cmp(&eig.eigenvalues[i])
            .then(i.cmp(&j))
    });
    let norm = operator_norm_symmetric(&eig.eigenvalues);
    let bound = Tolerances::DEFAULT.residual_factor * (1.0 + norm);

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &i in &order {
        let lambda = eig.eigenvalues[i];
        let v = eig.eigenvectors.column(i).into_owned();
        let v = normalize_sign_real(v.normalize());
        let r = (a * &v - &v * lambda).norm();
        if !(r <= bound) {
            return Err(Error::numerical(format!(
                "eigen-residual {r:e} exceeds {bound:e}"
            )));
        }
        eigenvalues.push(Complex64::new(lambda, 0.0));
        eigenvectors.push(v.map(|x| Complex64::new(x, 0.0)));
        residuals.push(r);
    }
    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
        residuals,
    })
}

fn operator_norm_symmetric(eigs: &DVector<f64>) -> f64 {
    eigs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Eigenvalues only, ascending, of a symmetric matrix.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::Argument("eigenvalues need a square matrix".into()));
    }
    ensure_finite(a)?;
    let sym = (a + a.transpose()) * 0.5;
    let n = a.nrows();
    // Eigenvalues only: skips the eigenvector accumulation.
    let mut vals: Vec<f64> = SymmetricEigen::try_new(sym, f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::numerical("symmetric eigensolver did not converge"))?
        .eigenvalues
        .iter()
        .copied()
        .collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("non-finite eigenvalue"));
    }
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigenpairs of a general complex matrix via the complex Schur form,
/// triangular back-substitution and, when needed, inverse-iteration refinement.
pub fn eigenpairs_complex(a: &DMatrix<Complex64>) -> Result<SpectralData> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Argument("eigenpairs needs a square matrix".into()));
    }
    if n == 0 {
        return Ok(SpectralData {
            eigenvalues: vec![],
            eigenvectors: vec![],
            residuals: vec![],
        });
    }
    ensure_finite(a)?;
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 1000 * n)
        .ok_or_else(|| Error::numerical("Schur decomposition did not converge"))?;
    let (q, t) = schur.unpack();
    let norm = operator_norm(a);
    let bound = Tolerances::DEFAULT.residual_factor * (1.0 + norm);
    let small = f64::EPSILON * norm.max(f64::MIN_POSITIVE);

    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = DVector::<Complex64>::zeros(n);
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[i] = -s / d;
        }
        let mut v = (&q * y).normalize();
        if residual(a, lambda, &v) > bound {
            v = inverse_iteration(a, lambda, v, small.max(norm * 1e-14))?;
        }
        let r = residual(a, lambda, &v);
        if !(r <= bound) {
            return Err(Error::numerical(format!(
                "eigen-residual {r:e} exceeds {bound:e} for eigenvalue {lambda}"
            )));
        }
        pairs.push((lambda, v));
    }
    Ok(SpectralData::from_pairs(a, pairs))
}

fn inverse_iteration(
    a: &DMatrix<Complex64>,
    lambda: Complex64,
    mut v: DVector<Complex64>,
    shift: f64,
) -> Result<DVector<Complex64>> {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= lambda + shift;
    }
    let lu = m.lu();
    for _ in 0..3 {
        let w = lu
            .solve(&v)
            .ok_or_else(|| Error::numerical("inverse iteration hit a singular system"))?;
        v = w.normalize();
    }
    Ok(v)
}
