use serde::Serialize;

use super::StructureError;
use crate::graph::InteractionGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Diagonal shift applied during iteration. Any positive value makes the
    /// Perron root strictly dominant, so bipartite graphs converge.
    pub shift: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-10,
            max_iter: 10_000,
            shift: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub lambda: f64,
    /// Unit 2-norm, nonnegative entries.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `|A u - lambda u|_inf`
    pub residual: f64,
}

fn adjacency_mul(g: &InteractionGraph, x: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = g.neighbors(i).iter().map(|&j| x[j]).sum();
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Largest eigenvalue of the adjacency matrix and its eigenvector, by power
/// iteration from the uniform vector.
///
/// Stops once `|A u - lambda u|_inf <= tol * max(1, lambda)`. On failure the
/// error carries the last estimate.
pub fn leading_eigenpair(
    g: &InteractionGraph,
    opts: EigenOptions,
) -> Result<EigenPair, StructureError> {
    let n = g.node_count();
    if n == 0 {
        return Err(StructureError::EmptyGraph);
    }
    let mut u = vec![1.0 / (n as f64).sqrt(); n];
    let mut au = vec![0.0; n];
    let mut iterations = 0;
    loop {
        adjacency_mul(g, &u, &mut au);
        let lambda: f64 = u.iter().zip(&au).map(|(a, b)| a * b).sum();
        let residual = u
            .iter()
            .zip(&au)
            .map(|(x, ax)| (ax - lambda * x).abs())
            .fold(0.0, f64::max);
        if residual <= opts.tol * lambda.max(1.0) {
            return Ok(EigenPair {
                lambda,
                vector: u,
                iterations,
                residual,
            });
        }
        if iterations == opts.max_iter {
            return Err(StructureError::NotConverged {
                iterations,
                residual,
                estimate: Box::new(EigenPair {
                    lambda,
                    vector: u,
                    iterations,
                    residual,
                }),
            });
        }
        for (x, ax) in u.iter_mut().zip(&au) {
            *x = ax + opts.shift * *x;
        }
        normalize(&mut u);
        iterations += 1;
    }
}
