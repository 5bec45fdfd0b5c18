//! Erdős–Rényi graphs, normalized-Laplacian spectra, nodal domains and the
//! Braess fraction of non-edges whose addition lowers the spectral gap.

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::deloc::{mass_profile, MassProfile};
use crate::error::{Error, Result};
use crate::linalg::{eigenpairs, operator_norm, symmetric_eigenvalues, SymmetryHint};
use crate::rng::{Domain, Seed};
use crate::tolerances::Tolerances;

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    degrees: Vec<usize>,
    pub p: Option<f64>,
    pub seed: Option<Seed>,
}

impl GraphSample {
    /// Builds a graph from an edge list. Duplicate edges collapse; loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, w) in edges {
            if u >= n || w >= n {
                return Err(Error::Argument(format!("edge ({u}, {w}) outside 0..{n}")));
            }
            if u == w {
                return Err(Error::Argument(format!("self-loop at {u}")));
            }
            adjacency[u].push(w);
            adjacency[w].push(u);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        let degrees = adjacency.iter().map(Vec::len).collect();
        Ok(Self {
            n,
            adjacency,
            degrees,
            p: None,
            seed: None,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |w| (u, w)))
            .collect();
        Self::from_edges(n, &edges).expect("valid edges")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Argument("a cycle needs n >= 3".into()));
        }
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|u| (u - 1, u)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn edge_count(&self) -> usize {
        self.degrees.iter().sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.n as f64
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        u < self.n && self.adjacency[u].binary_search(&w).is_ok()
    }

    /// Edges `(u, w)` with `u < w`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for &w in &self.adjacency[u] {
                if u < w {
                    out.push((u, w));
                }
            }
        }
        out
    }

    /// Non-edges `(u, w)` with `u < w`, in lexicographic order.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            let mut it = self.adjacency[u].iter().peekable();
            for w in 0..self.n {
                while it.peek().is_some_and(|&&x| x < w) {
                    it.next();
                }
                let present = it.peek().is_some_and(|&&x| x == w);
                if u < w && !present {
                    out.push((u, w));
                }
            }
        }
        out
    }

    /// Copy with the edge `(u, w)` added.
    pub fn with_edge(&self, u: usize, w: usize) -> Result<Self> {
        if u == w || u >= self.n || w >= self.n {
            return Err(Error::Argument(format!("cannot add edge ({u}, {w})")));
        }
        let mut g = self.clone();
        for (a, b) in [(u, w), (w, u)] {
            if let Err(pos) = g.adjacency[a].binary_search(&b) {
                g.adjacency[a].insert(pos, b);
                g.degrees[a] += 1;
            }
        }
        Ok(g)
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for u in 0..self.n {
            for &w in &self.adjacency[u] {
                a[(u, w)] = 1.0;
            }
        }
        a
    }

    /// Number of edges with both endpoints in `j`.
    pub fn edges_inside(&self, j: &[usize]) -> usize {
        let mut member = vec![false; self.n];
        for &v in j {
            member[v] = true;
        }
        j.iter()
            .map(|&u| {
                self.adjacency[u]
                    .iter()
                    .filter(|&&w| member[w] && u < w)
                    .count()
            })
            .sum()
    }

    /// Number of non-adjacent pairs inside `j`.
    pub fn non_edges_inside(&self, j: &[usize]) -> usize {
        let k = j.len();
        k * k.saturating_sub(1) / 2 - self.edges_inside(j)
    }
}

/// `G(n, p)`: each pair `{u, w}` is an edge when its own substream's first
/// uniform draw falls below `p`.
pub fn sample_gnp(n: usize, p: f64, seed: Seed) -> Result<GraphSample> {
    if n < 2 {
        return Err(Error::spec("n", format!("{n} < 2")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::spec("p", format!("{p} outside (0, 1)")));
    }
    let adjacency: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|u| {
            (0..n)
                .filter(|&w| {
                    w != u && {
                        let (a, b) = (u.min(w), u.max(w));
                        seed.pair_stream(Domain::GraphEdge, a, b).random::<f64>() < p
                    }
                })
                .collect()
        })
        .collect();
    let degrees = adjacency.iter().map(Vec::len).collect();
    Ok(GraphSample {
        n,
        adjacency,
        degrees,
        p: Some(p),
        seed: Some(seed),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphMatrices {
    pub adjacency: DMatrix<f64>,
    pub degree: DMatrix<f64>,
    /// `D^{-1/2} A D^{-1/2}`.
    pub normalized_adjacency: DMatrix<f64>,
    /// `I - D^{-1/2} A D^{-1/2}`.
    pub laplacian: DMatrix<f64>,
}

fn require_no_isolated(g: &GraphSample) -> Result<()> {
    if let Some(v) = g.degrees.iter().position(|&d| d == 0) {
        return Err(Error::Degenerate(format!(
            "vertex {v} is isolated; the normalized Laplacian is undefined"
        )));
    }
    Ok(())
}

pub fn normalized_adjacency(g: &GraphSample) -> Result<DMatrix<f64>> {
    require_no_isolated(g)?;
    let inv: Vec<f64> = g.degrees.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let mut m = DMatrix::zeros(g.n, g.n);
    for u in 0..g.n {
        for &w in &g.adjacency[u] {
            m[(u, w)] = inv[u] * inv[w];
        }
    }
    Ok(m)
}

pub fn normalized_laplacian(g: &GraphSample) -> Result<DMatrix<f64>> {
    let mut l = -normalized_adjacency(g)?;
    for i in 0..g.n {
        l[(i, i)] += 1.0;
    }
    Ok(l)
}

pub fn graph_matrices(g: &GraphSample) -> Result<GraphMatrices> {
    let normalized_adjacency = normalized_adjacency(g)?;
    let laplacian = DMatrix::identity(g.n, g.n) - &normalized_adjacency;
    Ok(GraphMatrices {
        adjacency: g.adjacency_matrix(),
        degree: DMatrix::from_diagonal(&DVector::from_iterator(
            g.n,
            g.degrees.iter().map(|&d| d as f64),
        )),
        normalized_adjacency,
        laplacian,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGap {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: Option<f64>,
    /// Unit eigenvector for `λ₂`.
    pub vector: DVector<f64>,
    /// `|λ₂ - λ₃| ≤ 1e-8`: the eigenvector is not unique.
    pub multiplicity: bool,
}

pub fn spectral_gap(g: &GraphSample) -> Result<SpectralGap> {
    let l = normalized_laplacian(g)?;
    let data = eigenpairs(&l, SymmetryHint::Symmetric)?;
    // Eigenvalues arrive in descending order.
    let n = data.len();
    let at = |k: usize| data.eigenvalues[n - 1 - k].re;
    let lambda3 = (n >= 3).then(|| at(2));
    let lambda2 = at(1);
    Ok(SpectralGap {
        lambda1: at(0),
        lambda2,
        lambda3,
        vector: data.real_eigenvector(n - 2).expect("real eigenvector"),
        multiplicity: lambda3
            .is_some_and(|l3| (l3 - lambda2).abs() <= Tolerances::DEFAULT.multiplicity),
    })
}

/// `λ₂` of the normalized Laplacian from a full eigenvalue solve.
pub fn lambda2(g: &GraphSample) -> Result<f64> {
    let vals = symmetric_eigenvalues(&normalized_laplacian(g)?)?;
    Ok(vals[1])
}

// ---------------------------------------------------------------------------
// Property audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
    /// True when the check samples instead of certifying.
    pub heuristic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GnpAudit {
    /// Edge probability used for the bounds: the generation parameter when
    /// known, otherwise the edge density.
    pub p: f64,
    pub checks: Vec<PropertyCheck>,
}

impl GnpAudit {
    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// All of the exact checks on degrees, spectrum and non-edges hold.
    pub fn exact_items_hold(&self) -> bool {
        [
            "degree_min",
            "degree_max",
            "lambda_hat_1",
            "lambda_hat_rest",
            "non_edges",
            "non_edge_identity",
        ]
        .iter()
        .all(|n| self.check(n).is_some_and(|c| c.holds))
    }
}

const GREEDY_ROUNDS: usize = 50;
const CROSSING_PAIRS: usize = 100;
const NON_EDGE_SETS: usize = 20;

/// Audits the five `G(n, p)` properties with constant `c_audit`. Items on
/// independent sets and crossing edges between disjoint sets are sampled;
/// the others are exact.
pub fn gnp_property_audit(g: &GraphSample, c_audit: f64, seed: Seed) -> Result<GnpAudit> {
    let n = g.n;
    if n < 2 {
        return Err(Error::Argument("graph needs at least two vertices".into()));
    }
    let p =
        g.p.unwrap_or_else(|| g.edge_count() as f64 / (n * (n - 1) / 2) as f64);
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Degenerate(format!(
            "edge density {p} outside (0, 1)"
        )));
    }
    let ln = (n as f64).ln();
    let np = n as f64 * p;
    let set_bound = c_audit * ln / p;
    let mut checks = Vec::new();

    // (1) greedy maximal independent sets in random orders.
    let largest = (0..GREEDY_ROUNDS)
        .map(|r| {
            let mut rng = seed.stream(Domain::Subsets, 1, r as u64);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut blocked = vec![false; n];
            let mut size = 0;
            for v in order {
                if !blocked[v] {
                    size += 1;
                    blocked[v] = true;
                    for &w in &g.adjacency[v] {
                        blocked[w] = true;
                    }
                }
            }
            size
        })
        .max()
        .unwrap_or(0) as f64;
    checks.push(PropertyCheck {
        name: "independent_set",
        value: largest,
        bound: set_bound,
        holds: largest <= set_bound,
        heuristic: true,
    });

    // (2) random disjoint pairs of sets of the critical size share an edge.
    let k = (set_bound.ceil() as usize).clamp(1, n / 2);
    let mut crossing = 0;
    for r in 0..CROSSING_PAIRS {
        let mut rng = seed.stream(Domain::Subsets, 2, r as u64);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut in_q = vec![false; n];
        for &v in &order[k..2 * k] {
            in_q[v] = true;
        }
        if order[..k]
            .iter()
            .any(|&u| g.adjacency[u].iter().any(|&w| in_q[w]))
        {
            crossing += 1;
        }
    }
    let frac = crossing as f64 / CROSSING_PAIRS as f64;
    checks.push(PropertyCheck {
        name: "crossing_edges",
        value: frac,
        bound: 1.0,
        holds: crossing == CROSSING_PAIRS,
        heuristic: true,
    });

    // (3) degrees.
    let spread = ln * np.sqrt();
    let dmin = *g.degrees.iter().min().unwrap() as f64;
    let dmax = *g.degrees.iter().max().unwrap() as f64;
    checks.push(PropertyCheck {
        name: "degree_min",
        value: dmin,
        bound: np - spread,
        holds: dmin >= np - spread,
        heuristic: false,
    });
    checks.push(PropertyCheck {
        name: "degree_max",
        value: dmax,
        bound: np + spread,
        holds: dmax <= np + spread,
        heuristic: false,
    });

    // (4) spectrum of the normalized adjacency (requires no isolated vertex).
    let vals = symmetric_eigenvalues(&normalized_adjacency(g)?)?;
    let top = vals[n - 1];
    let rest = vals[..n - 1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    checks.push(PropertyCheck {
        name: "lambda_hat_1",
        value: top,
        bound: 1.0,
        holds: (top - 1.0).abs() <= 1e-10,
        heuristic: false,
    });
    let rest_bound = c_audit / np.sqrt();
    checks.push(PropertyCheck {
        name: "lambda_hat_rest",
        value: rest,
        bound: rest_bound,
        holds: rest <= rest_bound,
        heuristic: false,
    });

    // (5) non-edges inside random vertex sets.
    let slack = (n as f64).powf(1.5);
    let mut worst = 0.0f64;
    let mut identity = true;
    for r in 0..NON_EDGE_SETS {
        let mut rng = seed.stream(Domain::Subsets, 5, r as u64);
        let size = rng.random_range(2..=n);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let j = &order[..size];
        let non = g.non_edges_inside(j);
        identity &= non + g.edges_inside(j) == size * (size - 1) / 2;
        let expected = (1.0 - p) * (size * (size - 1) / 2) as f64;
        worst = worst.max((non as f64 - expected).abs());
    }
    checks.push(PropertyCheck {
        name: "non_edges",
        value: worst,
        bound: slack,
        holds: worst <= slack,
        heuristic: false,
    });
    checks.push(PropertyCheck {
        name: "non_edge_identity",
        value: if identity { 1.0 } else { 0.0 },
        bound: 1.0,
        holds: identity,
        heuristic: false,
    });
    Ok(GnpAudit { p, checks })
}

// ---------------------------------------------------------------------------
// Nodal domains
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct NodalDecomposition {
    pub positive_domains: Vec<Vec<usize>>,
    pub negative_domains: Vec<Vec<usize>>,
    pub zero_set: Vec<usize>,
    pub zero_tol: f64,
}

impl NodalDecomposition {
    pub fn count(&self) -> usize {
        self.positive_domains.len() + self.negative_domains.len()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sign {
    Pos,
    Neg,
    Zero,
}

fn signs(v: &DVector<f64>, zero_tol: f64) -> Vec<Sign> {
    let cut = zero_tol * v.amax();
    v.iter()
        .map(|&x| {
            if x.abs() <= cut {
                Sign::Zero
            } else if x > 0.0 {
                Sign::Pos
            } else {
                Sign::Neg
            }
        })
        .collect()
}

/// Connected components of the positive and negative supports of `v`.
/// Coordinates with `|v_i| ≤ zero_tol · max|v|` form the zero set. Each
/// domain is sorted, and domains are ordered by their smallest vertex.
pub fn nodal_domains(
    g: &GraphSample,
    v: &DVector<f64>,
    zero_tol: f64,
) -> Result<NodalDecomposition> {
    if v.len() != g.n {
        return Err(Error::Argument(format!(
            "vector of length {} for {} vertices",
            v.len(),
            g.n
        )));
    }
    let s = signs(v, zero_tol);
    let mut seen = vec![false; g.n];
    let mut out = NodalDecomposition {
        positive_domains: Vec::new(),
        negative_domains: Vec::new(),
        zero_set: Vec::new(),
        zero_tol,
    };
    for start in 0..g.n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        if s[start] == Sign::Zero {
            out.zero_set.push(start);
            continue;
        }
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &g.adjacency[u] {
                if !seen[w] && s[w] == s[start] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        match s[start] {
            Sign::Pos => out.positive_domains.push(comp),
            _ => out.negative_domains.push(comp),
        }
    }
    Ok(out)
}

/// `(min_{v∈P} |Γ(v)∩N|, min_{v∈N} |Γ(v)∩P|)` for the positive and negative
/// supports `P`, `N` of `v`.
pub fn cross_domain_degrees(g: &GraphSample, v: &DVector<f64>) -> Result<(usize, usize)> {
    if v.len() != g.n {
        return Err(Error::Argument(format!(
            "vector of length {} for {} vertices",
            v.len(),
            g.n
        )));
    }
    let s = signs(v, Tolerances::DEFAULT.zero_tol);
    let min_into = |from: Sign, to: Sign| -> Option<usize> {
        (0..g.n)
            .filter(|&u| s[u] == from)
            .map(|u| g.adjacency[u].iter().filter(|&&w| s[w] == to).count())
            .min()
    };
    match (
        min_into(Sign::Pos, Sign::Neg),
        min_into(Sign::Neg, Sign::Pos),
    ) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Degenerate(
            "positive or negative support is empty".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Braess fraction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraessCondition {
    pub holds: bool,
    /// `(1/2) d̄ ≤ d_v ≤ (3/2) d̄` for every vertex.
    pub degree_hypothesis: bool,
}

fn degree_hypothesis(g: &GraphSample) -> bool {
    let d = g.mean_degree();
    g.degrees
        .iter()
        .all(|&x| (x as f64) >= 0.5 * d && (x as f64) <= 1.5 * d)
}

fn condition_holds(x: &DVector<f64>, u: usize, w: usize, c1: f64, c2: f64, dbar: f64) -> bool {
    let lhs = (x[u] * x[u] + x[w] * x[w]) / dbar.sqrt() + c1 / (dbar * dbar);
    lhs < c2 * x[u] * x[w]
}

/// Left side over `x_u x_w` of the sufficient condition; the condition holds
/// iff `x_u x_w > 0` and `c2` exceeds this ratio.
fn condition_ratio(x: &DVector<f64>, u: usize, w: usize, c1: f64, dbar: f64) -> f64 {
    let lhs = (x[u] * x[u] + x[w] * x[w]) / dbar.sqrt() + c1 / (dbar * dbar);
    lhs / (x[u] * x[w])
}

/// Sufficient condition for the non-edge `(u, w)` to lower the spectral gap:
/// `(x_u² + x_w²)/√d̄ + c1 d̄⁻² < c2 x_u x_w` with `d̄ = 2|E|/n` standing in for `np`.
pub fn braess_sufficient_condition(
    g: &GraphSample,
    x: &DVector<f64>,
    u: usize,
    w: usize,
    c1: f64,
    c2: f64,
) -> Result<BraessCondition> {
    if x.len() != g.n || u >= g.n || w >= g.n || u == w {
        return Err(Error::Argument(format!(
            "pair ({u}, {w}) invalid for this graph"
        )));
    }
    if g.has_edge(u, w) {
        return Err(Error::Argument(format!("({u}, {w}) is already an edge")));
    }
    Ok(BraessCondition {
        holds: condition_holds(x, u, w, c1, c2, g.mean_degree()),
        degree_hypothesis: degree_hypothesis(g),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BraessMode {
    Exact,
    Sampled { m: usize, seed: Seed },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraessRow {
    pub u: usize,
    pub w: usize,
    pub lambda2_new: f64,
    pub decreased: bool,
    /// `|λ₂_new - λ₂_base| ≤ tie_tol`.
    pub tie: bool,
    pub sufficient_condition: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    pub c1: f64,
    /// Largest `c2` with no false positives; infinite when nothing can fire.
    pub c2_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BraessReport {
    pub lambda2_base: f64,
    pub multiplicity: bool,
    pub degree_hypothesis: bool,
    pub tested: Vec<BraessRow>,
    pub a_minus: f64,
    pub mode: BraessMode,
    pub c1: f64,
    pub c2: f64,
    pub frontier: Vec<FrontierPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BraessOptions {
    pub c1: f64,
    pub c2: f64,
    pub tie_tol: f64,
    /// Largest `n` allowed in exact mode.
    pub exact_max_n: usize,
    pub frontier_c1: Vec<f64>,
}

impl Default for BraessOptions {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: 0.5,
            tie_tol: Tolerances::DEFAULT.tie_tol,
            exact_max_n: 150,
            frontier_c1: vec![0.0, 0.5, 1.0, 2.0, 4.0],
        }
    }
}

/// Fraction of tested non-edges whose addition lowers `λ₂`, each by a full
/// eigenvalue solve of the augmented graph. Rows are ordered by `(u, w)`.
pub fn a_minus(g: &GraphSample, mode: BraessMode, opts: &BraessOptions) -> Result<BraessReport> {
    let mut candidates = g.non_edges();
    if candidates.is_empty() {
        return Err(Error::NoNonEdges);
    }
    match mode {
        BraessMode::Exact => {
            if g.n > opts.exact_max_n {
                return Err(Error::spec(
                    "mode",
                    format!(
                        "exact mode allows n <= {}, got {}; use sampled mode",
                        opts.exact_max_n, g.n
                    ),
                ));
            }
        }
        BraessMode::Sampled { m, seed } => {
            if m == 0 {
                return Err(Error::spec("m", "sample size must be positive"));
            }
            let mut rng = seed.stream(Domain::Subsets, 7, 0);
            candidates.shuffle(&mut rng);
            candidates.truncate(m);
            candidates.sort_unstable();
        }
    }
    let gap = spectral_gap(g)?;
    let base = gap.lambda2;
    let x = &gap.vector;
    let dbar = g.mean_degree();
    let tested: Vec<BraessRow> = candidates
        .par_iter()
        .map(|&(u, w)| -> Result<BraessRow> {
            let new = lambda2(&g.with_edge(u, w)?)?;
            Ok(BraessRow {
                u,
                w,
                lambda2_new: new,
                decreased: new < base - opts.tie_tol,
                tie: (new - base).abs() <= opts.tie_tol,
                sufficient_condition: condition_holds(x, u, w, opts.c1, opts.c2, dbar),
            })
        })
        .collect::<Result<_>>()?;
    let decreased = tested.iter().filter(|r| r.decreased).count();
    let frontier = opts
        .frontier_c1
        .iter()
        .map(|&c1| FrontierPoint {
            c1,
            c2_max: tested
                .iter()
                .filter(|r| !r.decreased && x[r.u] * x[r.w] > 0.0)
                .map(|r| condition_ratio(x, r.u, r.w, c1, dbar))
                .fold(f64::INFINITY, f64::min),
        })
        .collect();
    Ok(BraessReport {
        lambda2_base: base,
        multiplicity: gap.multiplicity,
        degree_hypothesis: degree_hypothesis(g),
        a_minus: decreased as f64 / tested.len() as f64,
        tested,
        mode,
        c1: opts.c1,
        c2: opts.c2,
        frontier,
    })
}

// ---------------------------------------------------------------------------
// Laplacian eigenvector delocalization and perturbation audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianDeloc {
    pub linf: f64,
    /// Fraction of coordinates with `|f_v| < n^{-5/8}`.
    pub frac_below: f64,
    pub profile: MassProfile,
    pub multiplicity: bool,
}

pub fn laplacian_deloc_audit(g: &GraphSample, eps_grid: &[f64]) -> Result<LaplacianDeloc> {
    let gap = spectral_gap(g)?;
    let f = &gap.vector;
    let floor = (g.n as f64).powf(-5.0 / 8.0);
    let below = f.iter().filter(|x| x.abs() < floor).count();
    Ok(LaplacianDeloc {
        linf: f.amax(),
        frac_below: below as f64 / g.n as f64,
        profile: mass_profile(f, eps_grid)?,
        multiplicity: gap.multiplicity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylAudit {
    /// `‖Â_new - Â_old‖`.
    pub perturbation: f64,
    /// `max_j |λ̂_j(new) - λ̂_j(old)|` over sorted spectra.
    pub max_shift: f64,
    pub holds: bool,
}

/// Checks Weyl's inequality for the normalized adjacency when `(u, w)` is added.
pub fn weyl_audit(g: &GraphSample, u: usize, w: usize) -> Result<WeylAudit> {
    let old = normalized_adjacency(g)?;
    let new = normalized_adjacency(&g.with_edge(u, w)?)?;
    let perturbation = operator_norm(&(&new - &old));
    let a = symmetric_eigenvalues(&old)?;
    let b = symmetric_eigenvalues(&new)?;
    let max_shift = a
        .iter()
        .zip(&b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(WeylAudit {
        perturbation,
        max_shift,
        holds: max_shift <= perturbation + 1e-10,
    })
}

// ---------------------------------------------------------------------------
// Edge-list format: header `n <count>`, then one `u v` pair per line.
// ---------------------------------------------------------------------------

pub fn parse_edge_list(text: &str) -> Result<GraphSample> {
    let mut n = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{s}` is not a vertex index"),
            })
        };
        match n {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected header `n <count>`".into(),
                    });
                }
                n = Some(parse(fields[1])?);
            }
            Some(count) => {
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected `u v`".into(),
                    });
                }
                let (u, w) = (parse(fields[0])?, parse(fields[1])?);
                if u >= count || w >= count || u == w {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("invalid edge ({u}, {w}) for n = {count}"),
                    });
                }
                edges.push((u, w));
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        message: "missing header `n <count>`".into(),
    })?;
    GraphSample::from_edges(n, &edges)
}

pub fn write_edge_list(g: &GraphSample) -> String {
    let mut out = format!("n {}\n", g.n);
    for (u, w) in g.edges() {
        let _ = writeln!(out, "{u} {w}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eigs(m: &DMatrix<f64>) -> Vec<f64> {
        symmetric_eigenvalues(m).unwrap()
    }

    #[test]
    fn complete_graph_matrices() {
        let k4 = GraphSample::complete(4);
        let m = graph_matrices(&k4).unwrap();
        assert!((m.normalized_adjacency[(0, 1)] - 1.0 / 3.0).abs() < 1e-15);
        let l = eigs(&m.laplacian);
        assert!(l[0].abs() < 1e-12);
        for v in &l[1..] {
            assert!((v - 4.0 / 3.0).abs() < 1e-12);
        }
        let gap = spectral_gap(&k4).unwrap();
        assert!((gap.lambda2 - 4.0 / 3.0).abs() < 1e-12);
        assert!(gap.multiplicity);
    }

    #[test]
    fn single_edge() {
        let g = GraphSample::from_edges(2, &[(0, 1)]).unwrap();
        let m = graph_matrices(&g).unwrap();
        assert_eq!(
            m.laplacian,
            DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
        );
        let gap = spectral_gap(&g).unwrap();
        assert!((gap.lambda2 - 2.0).abs() < 1e-12);
        let audit = laplacian_deloc_audit(&g, &[0.5]).unwrap();
        assert!((audit.linf - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(audit.frac_below, 0.0);
    }

    #[test]
    fn isolated_vertex_is_degenerate() {
        let g = GraphSample::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(graph_matrices(&g), Err(Error::Degenerate(_))));
        assert!(matches!(spectral_gap(&g), Err(Error::Degenerate(_))));
    }

    #[test]
    fn cycle_gap() {
        let gap = spectral_gap(&GraphSample::cycle(4).unwrap()).unwrap();
        assert!((gap.lambda2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gnp_determinism_and_guards() {
        let a = sample_gnp(30, 0.3, Seed::new(4, 0)).unwrap();
        let b = sample_gnp(30, 0.3, Seed::new(4, 0)).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_ne!(
            a.edges(),
            sample_gnp(30, 0.3, Seed::new(4, 1)).unwrap().edges()
        );
        assert!(sample_gnp(1, 0.3, Seed::new(0, 0)).is_err());
        assert!(sample_gnp(5, 1.0, Seed::new(0, 0)).is_err());
        assert!(sample_gnp(5, 0.0, Seed::new(0, 0)).is_err());
        for u in 0..30 {
            for &w in a.neighbors(u) {
                assert!(a.has_edge(w, u) && w != u);
            }
        }
    }

    #[test]
    fn n2_edge_follows_pair_draw() {
        let seed = Seed::new(11, 0);
        let draw: f64 = seed.pair_stream(Domain::GraphEdge, 0, 1).random();
        let g = sample_gnp(2, 0.5, seed).unwrap();
        assert_eq!(g.has_edge(0, 1), draw < 0.5);
    }

    #[test]
    fn path_nodal_domains() {
        let g = GraphSample::path(3).unwrap();
        let v = DVector::from_vec(vec![1.0, -1.0, 1.0]);
        let d = nodal_domains(&g, &v, 1e-12).unwrap();
        assert_eq!(d.positive_domains, vec![vec![0], vec![2]]);
        assert_eq!(d.negative_domains, vec![vec![1]]);
        assert!(d.zero_set.is_empty());
        assert_eq!(d.count(), 3);
        assert_eq!(cross_domain_degrees(&g, &v).unwrap(), (1, 2));
    }

    #[test]
    fn positive_vector_one_domain() {
        let g = GraphSample::cycle(5).unwrap();
        let v = DVector::from_element(5, 0.3);
        let d = nodal_domains(&g, &v, 1e-12).unwrap();
        assert_eq!(d.count(), 1);
        assert!(cross_domain_degrees(&g, &v).is_err());
    }

    #[test]
    fn zero_coordinates() {
        let g = GraphSample::path(3).unwrap();
        let v = DVector::from_vec(vec![1.0, 1e-14, 1.0]);
        let d = nodal_domains(&g, &v, 1e-12).unwrap();
        assert_eq!(d.zero_set, vec![1]);
        assert_eq!(d.positive_domains.len(), 2);
    }

    #[test]
    fn braess_condition_examples() {
        let g = GraphSample::cycle(6).unwrap();
        let x = DVector::from_element(6, 1.0 / 6f64.sqrt());
        let c = braess_sufficient_condition(&g, &x, 0, 2, 0.0, 2.0).unwrap();
        assert!(c.holds && c.degree_hypothesis);
        let mut y = x.clone();
        y[2] = -y[2];
        assert!(
            !braess_sufficient_condition(&g, &y, 0, 2, 0.0, 2.0)
                .unwrap()
                .holds
        );
        assert!(braess_sufficient_condition(&g, &x, 0, 1, 0.0, 2.0).is_err());
    }

    #[test]
    fn complete_graph_has_no_non_edges() {
        let err = a_minus(
            &GraphSample::complete(3),
            BraessMode::Exact,
            &BraessOptions::default(),
        );
        assert_eq!(err.unwrap_err(), Error::NoNonEdges);
    }

    #[test]
    fn cycle_braess_exact() {
        let c4 = GraphSample::cycle(4).unwrap();
        let r = a_minus(&c4, BraessMode::Exact, &BraessOptions::default()).unwrap();
        assert_eq!(r.tested.len(), 2);
        assert_eq!((r.tested[0].u, r.tested[0].w), (0, 2));
        assert_eq!((r.tested[1].u, r.tested[1].w), (1, 3));
        assert!([0.0, 0.5, 1.0].contains(&r.a_minus));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = sample_gnp(12, 0.4, Seed::new(2, 0)).unwrap();
        let text = write_edge_list(&g);
        let back = parse_edge_list(&text).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert!(matches!(
            parse_edge_list("3\n0 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("n 3\n0 5\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("n 3\n0 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn non_edge_identity_on_full_vertex_set() {
        let g = sample_gnp(25, 0.5, Seed::new(8, 0)).unwrap();
        let all: Vec<usize> = (0..25).collect();
        assert_eq!(g.non_edges_inside(&all), 300 - g.edge_count());
        assert_eq!(g.non_edges().len(), 300 - g.edge_count());
    }
}
