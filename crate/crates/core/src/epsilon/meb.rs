//! Smallest enclosing balls in `ℝ^d` by move-to-front recursion on support
//! sets.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EpsilonError;

/// Largest dimension the enclosing-ball routines accept.
pub const MAX_DIMENSION: usize = 8;

/// Relative slack used when testing whether a point lies in a ball.
const CONTAIN_TOL: f64 = 1e-12;

/// Shuffle seed; the recursion is deterministic for a given input.
const MEB_SEED: u64 = 0x3EB0_5EED;

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: DVector<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, p: &DVector<f64>) -> bool {
        (p - &self.center).norm() <= self.radius * (1.0 + CONTAIN_TOL) + CONTAIN_TOL
    }
}

/// The smallest ball through every point of `support` whose center lies in
/// their affine hull. `None` for an empty support.
pub fn circumball(support: &[DVector<f64>]) -> Option<Ball> {
    let p0 = support.first()?;
    let k = support.len() - 1;
    if k == 0 {
        return Some(Ball {
            center: p0.clone(),
            radius: 0.0,
        });
    }
    let diffs: Vec<DVector<f64>> = support[1..].iter().map(|p| p - p0).collect();
    let g = DMatrix::from_fn(k, k, |i, j| 2.0 * diffs[i].dot(&diffs[j]));
    let b = DVector::from_fn(k, |i, _| diffs[i].norm_squared());
    let lambda = g
        .clone()
        .lu()
        .solve(&b)
        .filter(|l| l.iter().all(|x| x.is_finite()))
        .or_else(|| g.svd(true, true).solve(&b, 1e-12).ok())?;
    let mut center = p0.clone();
    for (l, d) in lambda.iter().zip(&diffs) {
        center += d * *l;
    }
    let radius = support
        .iter()
        .map(|p| (p - &center).norm())
        .fold(0.0, f64::max);
    Some(Ball { center, radius })
}

fn move_to_front(
    points: &mut Vec<DVector<f64>>,
    n: usize,
    support: &mut Vec<DVector<f64>>,
    dim: usize,
) -> Option<Ball> {
    let mut ball = circumball(support);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..n {
        let inside = ball.as_ref().is_some_and(|b| b.contains(&points[i]));
        if !inside {
            support.push(points[i].clone());
            ball = move_to_front(points, i, support, dim);
            support.pop();
            let p = points.remove(i);
            points.insert(0, p);
        }
    }
    ball
}

/// Smallest enclosing ball of a non-empty point set of one dimension.
pub fn min_enclosing_ball(points: &[DVector<f64>]) -> Result<Ball, EpsilonError> {
    let first = points.first().ok_or(EpsilonError::EmptyInput)?;
    let dim = first.len();
    if dim > MAX_DIMENSION {
        return Err(EpsilonError::DimensionTooLarge {
            dimension: dim,
            bound: MAX_DIMENSION,
        });
    }
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(EpsilonError::DimensionMismatch {
            expected: dim,
            found: p.len(),
        });
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(MEB_SEED));
    let n = pts.len();
    let ball = move_to_front(&mut pts, n, &mut Vec::new(), dim).expect("non-empty input");
    // Recompute the radius against every point so it is never understated.
    let radius = points
        .iter()
        .map(|p| (p - &ball.center).norm())
        .fold(0.0, f64::max);
    Ok(Ball { radius, ..ball })
}
