//! Reference implementations used only as test oracles. They share no code
//! with the library and favour transparency over speed.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut StdRng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(n: usize, rng: &mut StdRng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

pub fn unit_gaussian(n: usize, rng: &mut StdRng) -> DVector<f64> {
    gaussian_vector(n, rng).normalize()
}

/// Cyclic Jacobi eigenvalue algorithm for symmetric matrices: eigenvalues
/// ascending with matching eigenvector columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off < 1e-30 * (1.0 + m.norm_squared()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let vals = order.iter().map(|&i| m[(i, i)]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

/// One-sided (Hestenes) Jacobi SVD: singular values, descending.
pub fn jacobi_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut u = if a.nrows() >= a.ncols() {
        a.clone()
    } else {
        a.transpose()
    };
    let n = u.ncols();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = u.column(p).norm_squared();
                let beta: f64 = u.column(q).norm_squared();
                let gamma: f64 = u.column(p).dot(&u.column(q));
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..u.nrows() {
                    let x = u[(k, p)];
                    let y = u[(k, q)];
                    u[(k, p)] = c * x - s * y;
                    u[(k, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = (0..n).map(|j| u.column(j).norm()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Least-squares residual of `x` against the span of `s` via normal equations.
pub fn normal_equations_residual(x: &DVector<f64>, s: &[DVector<f64>]) -> f64 {
    let b = DMatrix::from_columns(s);
    let gram = b.transpose() * &b;
    let rhs = b.transpose() * x;
    let coef = gram.lu().solve(&rhs).expect("full rank span");
    (x - b * coef).norm()
}

/// Minimum of `‖v_I‖₂` over all subsets of size `k`, by enumeration.
pub fn brute_force_min_mass(mags: &[f64], k: usize) -> f64 {
    let n = mags.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let s: f64 = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| mags[i] * mags[i])
            .sum();
        best = best.min(s);
    }
    best.sqrt()
}

/// Irwin–Hall density of the sum of `n` uniforms on [0, 1].
pub fn irwin_hall_density(n: u32, x: f64) -> f64 {
    let mut fact = 1.0;
    for i in 1..n {
        fact *= i as f64;
    }
    let mut s = 0.0;
    let mut binom = 1.0;
    for k in 0..=n {
        if (k as f64) <= x {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binom * (x - k as f64).powi(n as i32 - 1);
        }
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    s / fact
}

/// `P(χ²_k ≤ x)` for even `k`, by the Poisson-sum closed form.
pub fn chi_square_cdf_even(k: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 0..k / 2 {
        if j > 0 {
            term *= half / j as f64;
        }
        sum += term;
    }
    1.0 - (-half).exp() * sum
}

/// Breadth-first components of the vertices accepted by `keep`, using an
/// explicit adjacency matrix.
pub fn components(adj: &DMatrix<f64>, keep: &dyn Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let n = adj.nrows();
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !keep(s) || label[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        label[s] = id;
        let mut comp = Vec::new();
        while let Some(u) = stack.pop() {
            comp.push(u);
            for w in 0..n {
                if adj[(u, w)] != 0.0 && keep(w) && label[w] == usize::MAX {
                    label[w] = id;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Second-smallest eigenvalue of `I - D^{-1/2} A D^{-1/2}` from an explicit
/// adjacency matrix, by Jacobi.
pub fn lambda2_oracle(adj: &DMatrix<f64>) -> f64 {
    let n = adj.nrows();
    let d: Vec<f64> = (0..n).map(|i| adj.row(i).sum()).collect();
    let l = DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - adj[(i, j)] / (d[i] * d[j]).sqrt()
    });
    jacobi_eigen(&l).0[1]
}
