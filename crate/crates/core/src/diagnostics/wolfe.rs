//! Wolfe's minimum-norm-point algorithm.
//!
//! Maintains a corral: an affinely independent subset `S` of the generators
//! and convex weights on it. A major cycle adds the generator most aligned
//! against the current point; minor cycles move toward the affine minimizer
//! of `S` and drop generators whose weight reaches zero, until the affine
//! minimizer lies in the relative interior of `conv(S)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::problems::GeneratorSet;
use crate::vector::ParamVector;

/// Relative optimality tolerance.
pub const WOLFE_TOL: f64 = 1e-10;
pub const MAX_MAJOR_CYCLES: usize = 1000;

/// Weights at or below this are treated as zero inside the corral.
const WEIGHT_EPS: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct MinNormPoint {
    pub point: ParamVector,
    pub norm: f64,
    /// Convex weights, one per input generator.
    pub weights: Vec<f64>,
    pub major_cycles: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(points: &[&[f64]], weights: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (p, &w) in points.iter().zip(weights) {
        for (o, v) in out.iter_mut().zip(p.iter()) {
            *o += w * v;
        }
    }
    out
}

/// Affine weights (summing to one) of the min-norm point of `aff(points)`.
fn affine_minimizer(points: &[&[f64]]) -> Vec<f64> {
    let k = points.len();
    if k == 1 {
        return vec![1.0];
    }
    let base = points[0];
    let dim = base.len();
    // y = base + D β with D = [p_i − base]; normal equations Dᵀ D β = −Dᵀ base
    let d = DMatrix::from_fn(dim, k - 1, |r, c| points[c + 1][r] - base[r]);
    let rhs = -(d.transpose() * DVector::from_column_slice(base));
    let gram = d.transpose() * &d;
    let beta = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .unwrap_or_else(|_| DVector::zeros(k - 1)),
    };
    let mut w = Vec::with_capacity(k);
    w.push(1.0 - beta.sum());
    w.extend(beta.iter());
    w
}

/// Euclidean projection of the origin onto `conv(generators)`.
pub fn min_norm_in_hull(set: &GeneratorSet) -> Result<MinNormPoint> {
    let gens = &set.generators;
    let Some(first) = gens.first() else {
        return Err(Error::contract("min-norm point of an empty generator set"));
    };
    let dim = first.dim();
    for g in gens {
        g.check_dim(dim)?;
        if !g.is_finite() {
            return Err(Error::contract("generators must be finite"));
        }
    }
    let pts: Vec<&[f64]> = gens.iter().map(ParamVector::as_slice).collect();
    let max_norm = pts.iter().map(|p| dot(p, p).sqrt()).fold(0.0, f64::max);
    let scale = max_norm.max(f64::MIN_POSITIVE);

    // start from the shortest generator, lowest index on ties
    let start = (0..pts.len())
        .min_by(|&a, &b| dot(pts[a], pts[a]).total_cmp(&dot(pts[b], pts[b])))
        .unwrap_or(0);
    let mut corral = vec![start];
    let mut lambda = vec![1.0];
    let mut x = pts[start].to_vec();
    let mut cycles = 0;

    while cycles < MAX_MAJOR_CYCLES {
        cycles += 1;
        let xx = dot(&x, &x);
        if xx.sqrt() <= WOLFE_TOL * scale {
            break;
        }
        let mut best = 0;
        let mut best_dot = f64::INFINITY;
        for (j, p) in pts.iter().enumerate() {
            let v = dot(&x, p);
            if v < best_dot {
                best_dot = v;
                best = j;
            }
        }
        if xx - best_dot <= WOLFE_TOL * xx.sqrt() * scale || corral.contains(&best) {
            break;
        }
        corral.push(best);
        lambda.push(0.0);

        loop {
            let members: Vec<&[f64]> = corral.iter().map(|&i| pts[i]).collect();
            let alpha = affine_minimizer(&members);
            if alpha.iter().all(|&a| a > WEIGHT_EPS) {
                lambda = alpha;
                x = combine(&members, &lambda, dim);
                break;
            }
            // largest step toward alpha that keeps the weights nonnegative
            let mut theta: f64 = 1.0;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= WEIGHT_EPS && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let mut keep_c = Vec::with_capacity(corral.len());
            let mut keep_l = Vec::with_capacity(corral.len());
            for (&c, &l) in corral.iter().zip(&lambda) {
                if l > WEIGHT_EPS {
                    keep_c.push(c);
                    keep_l.push(l);
                }
            }
            if keep_c.is_empty() {
                // numerically degenerate; fall back to the newest point alone
                keep_c.push(*corral.last().unwrap());
                keep_l.push(1.0);
            }
            let total: f64 = keep_l.iter().sum();
            corral = keep_c;
            lambda = keep_l.into_iter().map(|l| l / total).collect();
            let members: Vec<&[f64]> = corral.iter().map(|&i| pts[i]).collect();
            x = combine(&members, &lambda, dim);
            if corral.len() == 1 {
                break;
            }
        }
    }

    let mut weights = vec![0.0; pts.len()];
    for (&c, &l) in corral.iter().zip(&lambda) {
        weights[c] += l;
    }
    let mut norm = dot(&x, &x).sqrt();
    if norm <= WOLFE_TOL * scale.max(1.0) {
        x.iter_mut().for_each(|v| *v = 0.0);
        norm = 0.0;
    }
    Ok(MinNormPoint {
        point: ParamVector::new(x),
        norm,
        weights,
        major_cycles: cycles,
    })
}
