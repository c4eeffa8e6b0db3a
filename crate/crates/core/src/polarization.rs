//! Friedkin–Johnsen equilibrium opinions and the polarization index.
//!
//! Each node holds an innate opinion `s_i` in `[-1, 1]` and settles on an
//! expressed opinion that averages its innate opinion with its neighbors'
//! expressed opinions:
//!
//! ```text
//! z_i = (s_i + sum_{j ~ i} z_j) / (1 + deg(i))      i.e.   (I + L) z = s
//! ```
//!
//! with `L` the combinatorial Laplacian. The polarization index is the mean
//! squared equilibrium opinion `|z|^2 / n`, which is 1 when every connected
//! component agrees on +1 or -1 and 0 when all innate opinions are 0.
//!
//! `I + L` is symmetric positive definite with `(I + L)^{-1}` row-stochastic,
//! so `|z - z*|_inf <= |(I + L) z - s|_inf` and the residual bounds the error.

use serde::Serialize;
use sprs::{CsMat, TriMat};
use sprs_ldl::Ldl;

use crate::graph::InteractionGraph;
use crate::stance::{opinion_vector, StanceMap};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum PolarizationError {
    #[error("polarization index is undefined on an empty graph")]
    EmptyGraph,
    #[error("opinion vector has {got} entries for {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("innate opinion {value} at node {index} outside [-1, 1]")]
    InvalidOpinion { index: usize, value: f64 },
    #[error("fixed-point iteration stopped after {iterations} sweeps with residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("factorization failed: {0}")]
    Factorization(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SolverMethod {
    /// Sparse LDL^T factorization of `I + L`, per connected component.
    DirectSolve,
    /// In-place sweeps of the averaging map in ascending node order.
    FixedPoint,
}

impl SolverMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverMethod::DirectSolve => "DirectSolve",
            SolverMethod::FixedPoint => "FixedPoint",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: SolverMethod,
    pub tol: f64,
    /// Sweep cap for [`SolverMethod::FixedPoint`]; `None` means `10 n + 1000`.
    pub max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: SolverMethod::DirectSolve,
            tol: 1e-10,
            max_iter: None,
        }
    }
}

impl SolverOptions {
    pub fn fixed_point() -> Self {
        SolverOptions {
            method: SolverMethod::FixedPoint,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverInfo {
    pub method: SolverMethod,
    /// Sweeps for the fixed point, refinement steps for the direct solve.
    pub iterations: usize,
    /// `|(I + L) z - s|_inf`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarizationResult {
    pub pi: f64,
    pub z: Vec<f64>,
    pub solver: SolverInfo,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiOptions {
    pub solver: SolverOptions,
    /// Keep degree-0 nodes (whose equilibrium opinion is their innate one).
    pub include_isolated: bool,
}

impl Default for PiOptions {
    fn default() -> Self {
        PiOptions {
            solver: SolverOptions::default(),
            include_isolated: true,
        }
    }
}

/// `|(I + L) z - s|_inf`
pub fn residual(g: &InteractionGraph, s: &[f64], z: &[f64]) -> f64 {
    (0..g.node_count())
        .map(|i| {
            let ns = g.neighbors(i);
            let lz = ns.len() as f64 * z[i] - ns.iter().map(|&j| z[j]).sum::<f64>();
            (z[i] + lz - s[i]).abs()
        })
        .fold(0.0, f64::max)
}

fn check_input(g: &InteractionGraph, s: &[f64]) -> Result<(), PolarizationError> {
    if s.len() != g.node_count() {
        return Err(PolarizationError::LengthMismatch {
            expected: g.node_count(),
            got: s.len(),
        });
    }
    if let Some((index, &value)) = s.iter().enumerate().find(|(_, v)| !(v.abs() <= 1.0)) {
        return Err(PolarizationError::InvalidOpinion { index, value });
    }
    Ok(())
}

/// Solves `(I + L) z = s`.
pub fn fj_equilibrium(
    g: &InteractionGraph,
    s: &[f64],
    opts: SolverOptions,
) -> Result<(Vec<f64>, SolverInfo), PolarizationError> {
    check_input(g, s)?;
    match opts.method {
        SolverMethod::DirectSolve => direct_solve(g, s, opts.tol),
        SolverMethod::FixedPoint => {
            let cap = opts.max_iter.unwrap_or(10 * g.node_count() + 1000);
            fixed_point(g, s, opts.tol, cap)
        }
    }
}

/// Connected components as sorted index lists, ordered by smallest member.
pub(crate) fn components(g: &InteractionGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut comp = vec![root];
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn direct_solve(
    g: &InteractionGraph,
    s: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, SolverInfo), PolarizationError> {
    let n = g.node_count();
    let mut z = s.to_vec();
    let mut refinements = 0;
    // local index of each node within its component
    let mut local = vec![0usize; n];
    for comp in components(g) {
        if comp.len() == 1 {
            continue;
        }
        for (k, &v) in comp.iter().enumerate() {
            local[v] = k;
        }
        let size = comp.len();
        let mut tri = TriMat::new((size, size));
        for (k, &v) in comp.iter().enumerate() {
            tri.add_triplet(k, k, 1.0 + g.degree(v) as f64);
            for &w in g.neighbors(v) {
                tri.add_triplet(k, local[w], -1.0);
            }
        }
        let a: CsMat<f64> = tri.to_csc();
        let ldl = Ldl::new()
            .check_symmetry(sprs::SymmetryCheck::DontCheckSymmetry)
            .numeric(a.view())
            .map_err(|e| PolarizationError::Factorization(e.to_string()))?;
        let rhs: Vec<f64> = comp.iter().map(|&v| s[v]).collect();
        let mut x = ldl.solve(&rhs);
        // a couple of refinement steps guard against round-off on hubs
        for step in 0..3 {
            let r: Vec<f64> = (0..size)
                .map(|k| {
                    let v = comp[k];
                    let ns = g.neighbors(v);
                    let ax = (1.0 + ns.len() as f64) * x[k]
                        - ns.iter().map(|&w| x[local[w]]).sum::<f64>();
                    rhs[k] - ax
                })
                .collect();
            if r.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= tol * 1e-2 {
                break;
            }
            let dx = ldl.solve(&r);
            for (xk, d) in x.iter_mut().zip(&dx) {
                *xk += d;
            }
            refinements = refinements.max(step + 1);
        }
        for (k, &v) in comp.iter().enumerate() {
            z[v] = x[k];
        }
    }
    let residual = residual(g, s, &z);
    Ok((
        z,
        SolverInfo {
            method: SolverMethod::DirectSolve,
            iterations: refinements,
            residual,
        },
    ))
}

fn fixed_point(
    g: &InteractionGraph,
    s: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolverInfo), PolarizationError> {
    let n = g.node_count();
    let mut z = s.to_vec();
    let mut res = residual(g, s, &z);
    let mut sweeps = 0;
    while res > tol {
        if sweeps == max_iter {
            return Err(PolarizationError::NotConverged {
                iterations: sweeps,
                residual: res,
            });
        }
        for i in 0..n {
            let ns = g.neighbors(i);
            if ns.is_empty() {
                continue;
            }
            let sum: f64 = ns.iter().map(|&j| z[j]).sum();
            z[i] = (s[i] + sum) / (1.0 + ns.len() as f64);
        }
        sweeps += 1;
        res = residual(g, s, &z);
    }
    Ok((
        z,
        SolverInfo {
            method: SolverMethod::FixedPoint,
            iterations: sweeps,
            residual: res,
        },
    ))
}

/// Mean squared opinion.
pub fn polarization_index(z: &[f64]) -> Result<f64, PolarizationError> {
    if z.is_empty() {
        return Err(PolarizationError::EmptyGraph);
    }
    Ok(z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64)
}

/// Index of `g` for explicit innate opinions `s` (indexed like `g`).
pub fn compute_pi_from_opinions(
    g: &InteractionGraph,
    s: &[f64],
    opts: PiOptions,
) -> Result<PolarizationResult, PolarizationError> {
    check_input(g, s)?;
    if !opts.include_isolated && g.isolated_count() > 0 {
        let keep: Vec<bool> = (0..g.node_count()).map(|i| g.degree(i) > 0).collect();
        let sub = g.induced(&keep);
        let s_sub: Vec<f64> = s
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .map(|(v, _)| *v)
            .collect();
        return compute_pi_from_opinions(&sub, &s_sub, opts);
    }
    if g.is_empty() {
        return Err(PolarizationError::EmptyGraph);
    }
    let (z, solver) = fj_equilibrium(g, s, opts.solver)?;
    let pi = polarization_index(&z)?;
    Ok(PolarizationResult {
        pi,
        z,
        solver,
        n: g.node_count(),
        m: g.edge_count(),
    })
}

/// Polarization index of `g` with innate opinions taken from `stances`.
pub fn compute_pi(
    g: &InteractionGraph,
    stances: &StanceMap,
    opts: PiOptions,
) -> Result<PolarizationResult, PolarizationError> {
    compute_pi_from_opinions(g, &opinion_vector(g, stances), opts)
}
